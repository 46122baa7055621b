//! Measures on an interval written as Chebyshev series, with closed-form
//! logarithmic potentials and Stieltjes transforms.
//!
//! On `[a, b] = [c − r, c + r]` put `x = c + r·S`. A density `ρ` is stored
//! through `G(S) = r·ρ(c + rS)·√(1−S²) = Σ c_k T_k(S)`, so that
//! `ρ(x) dx = G(S)/√(1−S²) dS`. With `w = X + √(X−1)√(X+1)`:
//!
//! - mass `= π c₀`
//! - `∫ρ(s) log(z−s) ds = π[c₀ (log r + log(w/2)) − Σ_{k≥1} c_k w^{−k}/k]`
//! - `∫ρ(s)/(z−s) ds = (π/r) Σ c_k w^{−k} / √(X²−1)`

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Interval, Polynomial, Side};

/// Inverse Joukowski map onto `|w| ≥ 1`, analytic off `[−1, 1]`.
pub fn joukowski(x: Complex64) -> Complex64 {
    x + (x - 1.0).sqrt() * (x + 1.0).sqrt()
}

/// Chebyshev coefficients of `f` on `[−1, 1]` from `m` first-kind nodes.
/// `c[0]` is the plain mean coefficient (`f ≈ Σ c_k T_k`).
pub fn cheb_coeffs<F: Fn(f64) -> f64>(f: F, m: usize) -> Vec<f64> {
    let th: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) * PI / m as f64).collect();
    let vals: Vec<f64> = th.iter().map(|t| f(t.cos())).collect();
    (0..m)
        .map(|k| {
            let s: f64 = vals.iter().zip(&th).map(|(v, t)| v * (k as f64 * t).cos()).sum();
            if k == 0 {
                s / m as f64
            } else {
                2.0 * s / m as f64
            }
        })
        .collect()
}

/// Clenshaw evaluation of `Σ c_k T_k(s)`.
pub fn cheb_eval(c: &[f64], s: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * s * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    s * b1 - b2 + c.first().copied().unwrap_or(0.0)
}

const SIDE_EPS: f64 = 1e-200;

#[derive(Debug, Clone)]
pub struct ChebMeasure {
    center: f64,
    radius: f64,
    coef: Vec<f64>,
}

impl ChebMeasure {
    pub fn from_coeffs(iv: Interval, coef: Vec<f64>) -> Self {
        Self { center: iv.center(), radius: iv.radius(), coef }
    }

    /// Density `g(x)·√((b−x)(x−a))` with `g` smooth; the series length is
    /// doubled until the tail falls below `tol` relative to the head.
    pub fn from_sqrt_density<F: Fn(f64) -> f64>(iv: Interval, g: F, tol: f64) -> Self {
        let (c, r) = (iv.center(), iv.radius());
        let big_g = |s: f64| g(c + r * s) * r * r * (1.0 - s * s);
        let mut m = 32;
        loop {
            let coef = cheb_coeffs(big_g, m);
            let head = coef.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let tail = coef[m - 4..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if tail <= tol.max(8.0 * f64::EPSILON) * head || m >= 4096 {
                return Self::from_coeffs(iv, trim(coef, 1e-18 * head));
            }
            m *= 2;
        }
    }

    /// Density `p(x)·√((b−x)(x−a))` with `p` a polynomial: exact series.
    pub fn from_polynomial_density(iv: Interval, p: &Polynomial) -> Self {
        let (c, r) = (iv.center(), iv.radius());
        let m = p.degree() + 4;
        let coef = cheb_coeffs(|s| p.eval(c + r * s) * r * r * (1.0 - s * s), m);
        let head = coef.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Self::from_coeffs(iv, trim(coef, 1e-17 * head))
    }

    /// `λ·μ + κ·ν` for two measures on the same interval.
    pub fn combine(&self, lambda: f64, other: &ChebMeasure, kappa: f64) -> Self {
        let n = self.coef.len().max(other.coef.len());
        let get = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        Self {
            center: self.center,
            radius: self.radius,
            coef: (0..n).map(|k| lambda * get(&self.coef, k) + kappa * get(&other.coef, k)).collect(),
        }
    }

    pub fn support(&self) -> Interval {
        Interval::new(self.center - self.radius, self.center + self.radius).expect("positive radius")
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coef
    }

    pub fn mass(&self) -> f64 {
        PI * self.coef.first().copied().unwrap_or(0.0)
    }

    fn local(&self, x: f64) -> f64 {
        (x - self.center) / self.radius
    }

    pub fn density(&self, x: f64) -> f64 {
        let s = self.local(x);
        if s.abs() >= 1.0 {
            return 0.0;
        }
        cheb_eval(&self.coef, s) / (self.radius * (1.0 - s * s).sqrt())
    }

    fn log_potential_w(&self, w: Complex64) -> Complex64 {
        let c0 = self.coef.first().copied().unwrap_or(0.0);
        let inv = 1.0 / w;
        let mut p = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(c0 * self.radius.ln(), 0.0) + c0 * (w / 2.0).ln();
        for (k, &ck) in self.coef.iter().enumerate().skip(1) {
            p *= inv;
            acc -= ck * p / k as f64;
        }
        PI * acc
    }

    fn stieltjes_w(&self, w: Complex64) -> Complex64 {
        let inv = 1.0 / w;
        let mut p = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for &ck in &self.coef {
            acc += ck * p;
            p *= inv;
        }
        // √(X²−1) = (w − 1/w)/2 on the same branch as w
        PI / self.radius * acc * 2.0 / (w - inv)
    }

    fn w_side(&self, x: f64, side: Side) -> Complex64 {
        joukowski(Complex64::new(self.local(x), side.sign() * SIDE_EPS))
    }

    /// `∫ρ(s) log(z−s) ds`, principal logarithm, `z` off the support and off
    /// the ray to its left.
    pub fn log_potential(&self, z: Complex64) -> Complex64 {
        self.log_potential_w(joukowski((z - self.center) / self.radius))
    }

    /// Boundary value of [`Self::log_potential`] from one side of the real axis.
    pub fn log_potential_side(&self, x: f64, side: Side) -> Complex64 {
        self.log_potential_w(self.w_side(x, side))
    }

    /// `∫ρ(s) log|x−s| ds` for real `x`.
    pub fn log_potential_real(&self, x: f64) -> f64 {
        self.log_potential_side(x, Side::Upper).re
    }

    /// `∫ρ(s)/(z−s) ds`.
    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        self.stieltjes_w(joukowski((z - self.center) / self.radius))
    }

    pub fn stieltjes_side(&self, x: f64, side: Side) -> Complex64 {
        self.stieltjes_w(self.w_side(x, side))
    }

    /// `∫_x^b ρ(s) ds`.
    pub fn mass_right_of(&self, x: f64) -> f64 {
        let s = self.local(x).clamp(-1.0, 1.0);
        let th = s.acos();
        let mut acc = self.coef.first().copied().unwrap_or(0.0) * th;
        for (k, &ck) in self.coef.iter().enumerate().skip(1) {
            acc += ck * (k as f64 * th).sin() / k as f64;
        }
        acc
    }
}

fn trim(mut v: Vec<f64>, floor: f64) -> Vec<f64> {
    while v.len() > 1 && v.last().is_some_and(|c| c.abs() <= floor) {
        v.pop();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, PrecisionContext, QuadKind};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn semicircle() -> ChebMeasure {
        let iv = Interval::new(-2.0, 2.0).unwrap();
        ChebMeasure::from_polynomial_density(iv, &Polynomial::constant(1.0 / (2.0 * PI)))
    }

    #[test]
    fn semicircle_closed_forms() {
        let m = semicircle();
        assert_relative_eq!(m.mass(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(m.density(0.5), (4.0f64 - 0.25).sqrt() / (2.0 * PI), epsilon = 1e-15);
        // G(z) = (z − √(z²−4))/2
        let g = m.stieltjes(Complex64::new(5.0, 0.0));
        assert_relative_eq!(g.re, (5.0 - 21f64.sqrt()) / 2.0, epsilon = 1e-15);
        // log potential on the support equals x²/4 − 1/2
        for x in [-1.5, 0.0, 0.7, 1.9] {
            assert_relative_eq!(m.log_potential_real(x), x * x / 4.0 - 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn jumps_of_log_potential() {
        let m = semicircle();
        let up = m.log_potential_side(-3.0, Side::Upper);
        let dn = m.log_potential_side(-3.0, Side::Lower);
        assert_relative_eq!((up - dn).im, 2.0 * PI, epsilon = 1e-14);
        let x = 0.4;
        let jump = (m.log_potential_side(x, Side::Upper) - m.log_potential_side(x, Side::Lower)).im;
        assert_relative_eq!(jump, 2.0 * PI * m.mass_right_of(x), epsilon = 1e-13);
    }

    proptest! {
        #[test]
        fn log_potential_matches_quadrature(x in 2.2f64..8.0, a in 0.1f64..1.0, b in -0.5f64..0.5) {
            let iv = Interval::new(-1.0, 2.0).unwrap();
            let p = Polynomial::new(vec![a, b, 0.2]);
            let m = ChebMeasure::from_polynomial_density(iv, &p);
            let ctx = PrecisionContext::default();
            let q = integrate(|s| p.eval(s) * (x - s).ln(), iv, QuadKind::SqrtEndpoints, &ctx).unwrap();
            prop_assert!((m.log_potential_real(x) - q).abs() < 1e-12);
            let st = integrate(|s| p.eval(s) / (x - s), iv, QuadKind::SqrtEndpoints, &ctx).unwrap();
            prop_assert!((m.stieltjes(Complex64::new(x, 0.0)).re - st).abs() < 1e-12);
        }

        #[test]
        fn mass_matches_quadrature(a in 0.1f64..1.0, b in -0.5f64..0.5) {
            let iv = Interval::new(-1.0, 2.0).unwrap();
            let g = move |s: f64| a + b * s.sin();
            let m = ChebMeasure::from_sqrt_density(iv, g, 1e-16);
            let q = integrate(g, iv, QuadKind::SqrtEndpoints, &PrecisionContext::default()).unwrap();
            prop_assert!((m.mass() - q).abs() < 1e-13);
        }
    }
}
