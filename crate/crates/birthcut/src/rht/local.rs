use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{GFunction, Regime};
use crate::equilibrium::{CriticalReport, OneCutMeasure, Potential};
use crate::numerics::{integrate, Interval, PrecisionContext, QuadKind};
use crate::orthopoly::line_cauchy_transform;
use crate::{Error, Result};

const TAYLOR_TERMS: usize = 64;

/// Taylor series of `c_k ξ^k` at `ξ = 0`.
fn series_eval(c: &[f64], xi: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * xi + ck)
}

fn series_mul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for (i, &ai) in a.iter().enumerate().take(m) {
        for (j, &bj) in b.iter().enumerate().take(m - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Square root of a series with positive constant term.
fn series_sqrt(p: &[f64], m: usize) -> Vec<f64> {
    let mut s = vec![0.0; m];
    s[0] = p[0].sqrt();
    for k in 1..m {
        let conv: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
        s[k] = (p.get(k).copied().unwrap_or(0.0) - conv) / (2.0 * s[0]);
    }
    s
}

/// Local coordinate at `x*`: `−E(x) = ξ^{2ν}ψ(ξ)` with `ξ = x − x*`, where `E`
/// is the `t = 1` effective potential. Then `ζ = n^{1/2ν}ξψ^{1/2ν}`.
#[derive(Debug, Clone)]
pub struct ConformalMap {
    x_star: f64,
    nu: u32,
    n: f64,
    radius: f64,
    psi: Vec<f64>,
}

impl ConformalMap {
    pub fn new(report: &CriticalReport, n: u64, radius: f64) -> Result<Self> {
        let (a, b) = (report.support.lo(), report.support.hi());
        let xs = report.x_star;
        let limit = 0.5 * (xs - b);
        if !(radius > 0.0 && radius <= limit) {
            return Err(Error::RadiusTooLarge { radius, limit });
        }
        let m = TAYLOR_TERMS;
        // Q(x* + ξ)
        let q: Vec<f64> = report.q_poly.shift(xs).coeffs().to_vec();
        // (x*−a+ξ)(x*−b+ξ)
        let p = [(xs - a) * (xs - b), 2.0 * xs - a - b, 1.0];
        let root = series_sqrt(&p, m);
        let mq = series_mul(&q, &root, m);
        let two_nu = 2 * report.nu as usize;
        let psi: Vec<f64> = mq.iter().enumerate().map(|(j, v)| v / (two_nu + j) as f64).collect();
        let map = Self { x_star: xs, nu: report.nu, n: n as f64, radius, psi };
        // ψ must stay off the principal cut on the whole disk
        let p0 = map.psi[0];
        for k in 0..256 {
            let xi = Complex64::from_polar(radius, 2.0 * PI * k as f64 / 256.0);
            if (series_eval(&map.psi, xi) - p0).norm() >= p0 {
                return Err(Error::RadiusTooLarge { radius, limit: radius });
            }
        }
        Ok(map)
    }

    /// Map with the largest admissible disk.
    pub fn with_default_radius(report: &CriticalReport, n: u64) -> Result<Self> {
        let mut r = 0.5 * (report.x_star - report.support.hi());
        loop {
            match Self::new(report, n, r) {
                Err(Error::RadiusTooLarge { .. }) if r > 1e-3 => r *= 0.7,
                other => return other,
            }
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn x_star(&self) -> f64 {
        self.x_star
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    fn local(&self, x: Complex64) -> Result<Complex64> {
        let xi = x - self.x_star;
        if xi.norm() > self.radius {
            return Err(Error::RadiusTooLarge { radius: xi.norm(), limit: self.radius });
        }
        Ok(xi)
    }

    /// `ψ(ξ)` with `−E(x*+ξ) = ξ^{2ν}ψ(ξ)`.
    pub fn psi(&self, x: Complex64) -> Result<Complex64> {
        Ok(series_eval(&self.psi, self.local(x)?))
    }

    /// `ϕ(x) = ψ^{1/2ν}`, so `ζ = n^{1/2ν}(x−x*)ϕ(x)`.
    pub fn varphi(&self, x: Complex64) -> Result<Complex64> {
        Ok(self.psi(x)?.powf(1.0 / (2.0 * self.nu as f64)))
    }

    pub fn varphi_at_xstar(&self) -> f64 {
        self.psi[0].powf(1.0 / (2.0 * self.nu as f64))
    }

    pub fn zeta(&self, x: Complex64) -> Result<Complex64> {
        let xi = self.local(x)?;
        Ok(self.n.powf(1.0 / (2.0 * self.nu as f64)) * xi * self.varphi(x)?)
    }

    /// `ζ^{2ν} = nξ^{2ν}ψ` without taking roots.
    pub fn zeta_pow(&self, x: Complex64) -> Result<Complex64> {
        let xi = self.local(x)?;
        Ok(self.n * xi.powu(2 * self.nu) * self.psi(x)?)
    }
}

/// `ζ(x)` for the `t = 1` report on the largest admissible disk.
pub fn conformal_zeta(x: Complex64, report: &CriticalReport, n: u64) -> Result<Complex64> {
    ConformalMap::with_default_radius(report, n)?.zeta(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauRegime {
    Supercritical,
    Subcritical,
}

/// `Z_t` and an evaluator of `τ_t` on the disk of the conformal map.
#[derive(Debug, Clone)]
pub struct TauZ {
    pub regime: TauRegime,
    pub z: f64,
    pub u: f64,
    map: ConformalMap,
    gf: GFunction,
    v: Potential,
}

/// Number of nodes on the circle used for `τ` near `x*`.
const CIRCLE_NODES: usize = 128;

impl TauZ {
    pub fn map(&self) -> &ConformalMap {
        &self.map
    }

    /// `n(2g₁ − V/t − l̃/t) + ζ^{2ν} − 2u log(n^{1/2ν}ϕ) − 2Z`, analytic on
    /// the disk with a simple zero at `x*`.
    fn numerator(&self, x: Complex64) -> Result<Complex64> {
        let n = self.map.n;
        let t = self.gf.t();
        let base = n * (2.0 * self.gf.g1(x) - self.v.poly().eval_complex(x) / t - self.gf.l_tilde() / t);
        let mut out = base + self.map.zeta_pow(x)? - 2.0 * self.z;
        if self.u != 0.0 {
            let scale = n.powf(1.0 / (2.0 * self.map.nu as f64));
            out -= 2.0 * self.u * (scale * self.map.varphi(x)?).ln();
        }
        Ok(out)
    }

    /// `τ_t(x)`; inside half the disk radius it is the Cauchy mean over a
    /// circle, which removes the division by `ζ`.
    pub fn tau(&self, x: Complex64) -> Result<Complex64> {
        let xs = self.map.x_star;
        let rho = 0.8 * self.map.radius;
        if (x - xs).norm() >= 0.5 * rho {
            return Ok(self.numerator(x)? / self.map.zeta(x)?);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..CIRCLE_NODES {
            let w = Complex64::from_polar(rho, 2.0 * PI * (k as f64 + 0.5) / CIRCLE_NODES as f64);
            let p = xs + w;
            let tau = self.numerator(p)? / self.map.zeta(p)?;
            acc += tau * w / (p - x);
        }
        Ok(acc / CIRCLE_NODES as f64)
    }

    /// Residual of `n(g − V/2t − l̃/2t) + ζ^{2ν}/2 − τζ/2 − u log ζ − Z = 0`.
    pub fn jump_identity_residual(&self, x: Complex64) -> Result<f64> {
        let n = self.map.n;
        let t = self.gf.t();
        let g = super::g_eval(&self.gf, x);
        let lhs = n * (g - self.v.poly().eval_complex(x) / (2.0 * t) - self.gf.l_tilde() / (2.0 * t));
        let zeta = self.map.zeta(x)?;
        let r = lhs + 0.5 * self.map.zeta_pow(x)? - 0.5 * self.tau(x)? * zeta - self.u * zeta.ln() - self.z;
        Ok(r.norm())
    }

    /// `Z_t + (u_t/2ν) log log n`, bounded for `t > 1`.
    pub fn z_scaled(&self) -> f64 {
        self.z + self.u / (2.0 * self.map.nu as f64) * self.map.n.ln().ln()
    }

    /// `τ_t(x*)·n^{1/2ν}/log n`, bounded for `t > 1`.
    pub fn tau_scaled(&self) -> Result<f64> {
        let n = self.map.n;
        Ok(self.tau(Complex64::new(self.map.x_star, 0.0))?.re * n.powf(1.0 / (2.0 * self.map.nu as f64)) / n.ln())
    }
}

/// `(Z_t, τ_t)` for `gf` with the conformal map of the `t = 1` report.
pub fn tau_z(gf: &GFunction, v: &Potential, report: &CriticalReport, n: u64) -> Result<TauZ> {
    let map = ConformalMap::with_default_radius(report, n)?;
    let regime = match gf.regime() {
        Regime::Supercritical => TauRegime::Supercritical,
        Regime::Subcritical => TauRegime::Subcritical,
    };
    let u = gf.u_t();
    let xs = Complex64::new(report.x_star, 0.0);
    let t = gf.t();
    let nf = n as f64;
    let mut z = 0.5 * nf * (2.0 * gf.g1(xs).re - v.eval(report.x_star) / t - gf.l_tilde() / t);
    if u != 0.0 {
        z -= u * (map.varphi_at_xstar().ln() + nf.ln() / (2.0 * report.nu as f64));
    }
    Ok(TauZ { regime, z, u, map, gf: gf.clone(), v: v.clone() })
}

/// `n·c*` with `c* = −E_t(x*)/2 = (1/2t)∫_b^{x*} hpoly(s)√((s−a)(s−b)) ds`.
pub fn c_star_quadrature(m: &OneCutMeasure, x_star: f64, n: u64, ctx: &PrecisionContext) -> Result<f64> {
    let (a, b) = (m.a(), m.b());
    let len = x_star - b;
    // s = b + len·u² removes the square root at b
    let f = |u: f64| {
        let s = b + len * u * u;
        m.hpoly().eval(s) * ((s - a) * len).sqrt() * u * 2.0 * len * u
    };
    let val = integrate(f, Interval::new(0.0, 1.0)?, QuadKind::Plain, ctx)?;
    Ok(n as f64 * val / (2.0 * m.t()))
}

/// Upper-triangular parametrix with `(1,2)` entry
/// `(1/2πi)∫ e^{−s^{2ν}+τs}/(s−ζ) ds`.
pub fn cauchy_parametrix(zeta: Complex64, tau: f64, nu: u32, ctx: &PrecisionContext) -> Result<Matrix2<Complex64>> {
    let w = |s: f64| (-s.powi(2 * nu as i32) + tau * s).exp();
    let window = model_window(tau, nu);
    let c = line_cauchy_transform(w, window, zeta, ctx)?;
    let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    Ok(Matrix2::new(one, c, zero, one))
}

/// Interval outside of which `e^{−s^{2ν}+τs} < e^{−45}`.
pub fn model_window(tau: f64, nu: u32) -> Interval {
    let p = 1.0 / (2.0 * nu as f64);
    let mut l = 45f64.powf(p);
    for _ in 0..50 {
        l = (45.0 + tau.abs() * l).powf(p);
    }
    Interval::new(-l, l).expect("positive window")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{effective_potential, solve_one_cut, synthesize_birth_potential};
    use crate::rht::tests::fixture;
    use crate::rht::{matrix_jump, EPS_LIST};
    use approx::assert_relative_eq;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn psi_reproduces_effective_potential() {
        let f = fixture();
        let map = ConformalMap::with_default_radius(&f.report, 100).unwrap();
        for x in [f.report.x_star - 0.2, f.report.x_star + 0.13] {
            let xi = x - f.report.x_star;
            let e = effective_potential(&f.m1, &f.v, x);
            let psi = map.psi(Complex64::new(x, 0.0)).unwrap().re;
            assert_relative_eq!(-e, xi.powi(2) * psi, max_relative = 1e-8);
        }
    }

    #[test]
    fn zeta_branch_and_leading_coefficient() {
        let f = fixture();
        let n = 500;
        let map = ConformalMap::with_default_radius(&f.report, n).unwrap();
        let xs = f.report.x_star;
        assert_eq!(map.zeta(Complex64::new(xs, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        let below = map.zeta(Complex64::new(xs - 1e-3, 0.0)).unwrap();
        let above = map.zeta(Complex64::new(xs + 1e-3, 0.0)).unwrap();
        assert!(below.re < 0.0 && below.im.abs() < 1e-14);
        assert!(above.re > 0.0 && above.im.abs() < 1e-14);
        assert_relative_eq!(map.varphi_at_xstar(), f.report.varphi_at_xstar, max_relative = 1e-8);
        for k in 2..=6 {
            let h = 10f64.powi(-k);
            let ratio = map.zeta(Complex64::new(xs + h, 0.0)).unwrap().re / ((n as f64).powf(0.5) * h);
            assert!((ratio - f.report.varphi_at_xstar).abs() < 10.0 * h);
        }
        assert!(matches!(ConformalMap::new(&f.report, n, 0.9 * (xs - 2.0)), Err(Error::RadiusTooLarge { .. })));
    }

    #[test]
    fn supercritical_jump_identity() {
        let f = fixture();
        let tz = tau_z(&f.gf, &f.v, &f.report, f.params.n).unwrap();
        let r = tz.map().radius();
        for k in 0..10 {
            let th = 0.3 + 0.57 * k as f64;
            let rad = r * (0.1 + 0.08 * k as f64);
            let x = Complex64::new(f.params.x_star, 0.0) + Complex64::from_polar(rad, th);
            let res = tz.jump_identity_residual(x).unwrap();
            assert!(res < 1e-8, "{x}: {res}");
        }
        assert!(tz.tau_scaled().unwrap().is_finite());
    }

    #[test]
    fn subcritical_z_is_minus_c_star() {
        let f = fixture();
        let c = ctx();
        let n = 400;
        let m = solve_one_cut(&f.v, 0.97, &c).unwrap();
        let gf = GFunction::subcritical(&m, n, f.report.x_star).unwrap();
        let tz = tau_z(&gf, &f.v, &f.report, n).unwrap();
        let cs = c_star_quadrature(&m, f.report.x_star, n, &c).unwrap();
        assert!(tz.z < 0.0);
        assert_relative_eq!(tz.z, -cs, max_relative = 1e-8);
        let x = Complex64::new(f.report.x_star + 0.01, 0.02);
        assert!(tz.jump_identity_residual(x).unwrap() < 1e-8);
    }

    #[test]
    fn critical_time_has_vanishing_z() {
        let f = fixture();
        let gf = GFunction::subcritical(&f.m1, 300, f.report.x_star).unwrap();
        let tz = tau_z(&gf, &f.v, &f.report, 300).unwrap();
        assert!(tz.z.abs() < 1e-6);
        assert!(tz.tau(Complex64::new(f.report.x_star, 0.0)).unwrap().norm() < 1e-4);
    }

    #[test]
    fn nu_two_map() {
        let (v, report) = synthesize_birth_potential(3.0, 2, &ctx()).unwrap();
        let m1 = solve_one_cut(&v, 1.0, &ctx()).unwrap();
        let map = ConformalMap::with_default_radius(&report, 100).unwrap();
        let x = report.x_star + 0.1;
        let e = effective_potential(&m1, &v, x);
        assert_relative_eq!(-e, 0.1f64.powi(4) * map.psi(Complex64::new(x, 0.0)).unwrap().re, max_relative = 1e-7);
        assert_relative_eq!(map.varphi_at_xstar(), report.varphi_at_xstar, max_relative = 1e-8);
    }

    #[test]
    fn parametrix_jump_and_decay() {
        let c = ctx();
        for (nu, tau) in [(1u32, 0.4), (2, -0.7)] {
            for x in [-1.3, -0.2, 0.0, 0.6, 1.1] {
                let w = (-f64::powi(x, 2 * nu as i32) + tau * x).exp();
                let r = matrix_jump("Psi", "R", x, |z| cauchy_parametrix(z, tau, nu, &c), |_| {
                    Matrix2::new(Complex64::new(1.0, 0.0), Complex64::new(w, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
                })
                .unwrap();
                assert!(r.residual < 1e-8, "{r:?}");
                assert_eq!(r.eps, EPS_LIST.to_vec());
            }
            let big = cauchy_parametrix(Complex64::new(300.0, 400.0), tau, nu, &c).unwrap();
            assert!(big[(0, 1)].norm() < 2e-3);
            assert_eq!(big.determinant(), Complex64::new(1.0, 0.0));
        }
    }
}
