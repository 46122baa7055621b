use std::f64::consts::PI;

use num_complex::Complex64;

use super::Potential;
use crate::numerics::{find_root, integrate, ChebMeasure, Interval, Polynomial, PrecisionContext, QuadKind};
use crate::{Error, Result};

/// Equilibrium measure of `V_t = V/t` supported on one interval, with density
/// `ρ^t(x) = hpoly(x)·√((b−x)(x−a)) / (2πt)`.
#[derive(Debug, Clone)]
pub struct OneCutMeasure {
    t: f64,
    support: Interval,
    hpoly: Polynomial,
    l_t: f64,
    measure: ChebMeasure,
}

impl OneCutMeasure {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn a(&self) -> f64 {
        self.support.lo()
    }

    pub fn b(&self) -> f64 {
        self.support.hi()
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn hpoly(&self) -> &Polynomial {
        &self.hpoly
    }

    /// Lagrange constant of the variational equality for `V_t`.
    pub fn l_t(&self) -> f64 {
        self.l_t
    }

    /// Chebyshev representation of `ρ^t`.
    pub fn measure(&self) -> &ChebMeasure {
        &self.measure
    }

    pub fn density(&self, x: f64) -> f64 {
        if !self.support.interior(x) {
            return 0.0;
        }
        self.hpoly.eval(x) * ((self.b() - x) * (x - self.a())).sqrt() / (2.0 * PI * self.t)
    }

    pub fn mass(&self) -> f64 {
        self.measure.mass()
    }

    /// `∫ρ^t(s) log(z−s) ds`, principal branch.
    pub fn log_potential(&self, z: Complex64) -> Complex64 {
        self.measure.log_potential(z)
    }

    /// `√((x−a)(x−b))` on the branch positive to the right of the support.
    pub fn edge_root(&self, x: f64) -> f64 {
        let (a, b) = (self.a(), self.b());
        if x >= b {
            ((x - a) * (x - b)).sqrt()
        } else if x <= a {
            -((x - a) * (x - b)).sqrt()
        } else {
            0.0
        }
    }

    /// `E_t′(x) = −hpoly(x)·√((x−a)(x−b))/t` off the support.
    pub fn effective_derivative(&self, x: f64) -> f64 {
        -self.hpoly.eval(x) * self.edge_root(x) / self.t
    }
}

/// `∫₀^π p(c + r cos θ) dθ`, exact for polynomials of degree < 2n.
fn theta_mean<F: Fn(f64) -> f64>(f: F, c: f64, r: f64, n: usize) -> f64 {
    (1..=n)
        .map(|k| f(c + r * ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos()))
        .sum::<f64>()
        * PI
        / n as f64
}

/// Endpoint residuals `(F₀, F₁ − 1)` and their Jacobian in `(c, r)`.
fn endpoint_system(vp: &Polynomial, vpp: &Polynomial, c: f64, r: f64, n: usize) -> ([f64; 2], [[f64; 2]; 2]) {
    let k = 1.0 / (2.0 * PI);
    let cosv = |x: f64| (x - c) / r;
    let f0 = k * theta_mean(|x| vp.eval(x), c, r, n);
    let f1 = k * theta_mean(|x| (x - c) * vp.eval(x), c, r, n) - 1.0;
    let d0c = k * theta_mean(|x| vpp.eval(x), c, r, n);
    let d0r = k * theta_mean(|x| cosv(x) * vpp.eval(x), c, r, n);
    let d1c = k * theta_mean(|x| (x - c) * vpp.eval(x), c, r, n);
    let d1r = k * theta_mean(|x| cosv(x) * vp.eval(x) + (x - c) * cosv(x) * vpp.eval(x), c, r, n);
    ([f0, f1], [[d0c, d0r], [d1c, d1r]])
}

/// One-cut equilibrium measure of `V/t`.
///
/// Endpoints solve `(1/2π)∫V_t′/√((b−s)(s−a)) ds = 0` and
/// `(1/2π)∫s·V_t′/√((b−s)(s−a)) ds = 1`; the density factor is the
/// polynomial part `hpoly(x) = (1/π)∫(V′(x)−V′(s))/((x−s)√((b−s)(s−a))) ds`.
pub fn solve_one_cut(v: &Potential, t: f64, ctx: &PrecisionContext) -> Result<OneCutMeasure> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("t must be positive, got {t}")));
    }
    let vp = v.derivative().scale(1.0 / t);
    let vpp = vp.derivative();
    let n = vp.degree() + 3;

    // radius from the centred second condition, then Newton in (c, r)
    let f1_at = |r: f64| endpoint_system(&vp, &vpp, 0.0, r, n).0[1];
    let mut hi = 1e-3;
    while f1_at(hi) < 0.0 {
        hi *= 1.5;
        if hi > 1e6 {
            return Err(Error::EndpointSolve("no bracket for the support radius".into()));
        }
    }
    let lo = if hi > 1e-3 { hi / 1.5 } else { 1e-6 };
    let mut r = match find_root(f1_at, Interval::new(lo, hi)?, &ctx.with_tol(1e-14, 0.0)) {
        Ok(r) => r,
        Err(_) => hi,
    };
    let mut c = 0.0;
    let norm = |f: [f64; 2]| f[0].hypot(f[1]);
    let (mut f, mut jac) = endpoint_system(&vp, &vpp, c, r, n);
    let mut converged = false;
    for _ in 0..200 {
        if norm(f) < 1e-15 {
            converged = true;
            break;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dc = (f[0] * jac[1][1] - f[1] * jac[0][1]) / det;
        let dr = (jac[0][0] * f[1] - jac[1][0] * f[0]) / det;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (cn, rn) = (c - step * dc, r - step * dr);
            if rn > 0.0 {
                let (fnew, jnew) = endpoint_system(&vp, &vpp, cn, rn, n);
                if norm(fnew) < norm(f) || norm(fnew) < 1e-15 {
                    c = cn;
                    r = rn;
                    f = fnew;
                    jac = jnew;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            converged = norm(f) < 1e-12;
            break;
        }
    }
    if !converged {
        return Err(Error::EndpointSolve(format!("residual {:e} at c = {c}, r = {r}", norm(f))));
    }
    let support = Interval::new(c - r, c + r)?;

    // hpoly_j = (1/π) Σ_{k>j} v_k m_{k−1−j}, m_i = ∫ s^i/√((b−s)(s−a)) ds
    let vprime = v.derivative();
    let d = vprime.degree();
    let moments: Vec<f64> = (0..=d).map(|i| theta_mean(|x| x.powi(i as i32), c, r, d + 2)).collect();
    let hcoef: Vec<f64> = (0..d)
        .map(|j| (j + 1..=d).map(|k| vprime.coeff(k) * moments[k - 1 - j]).sum::<f64>() / PI)
        .collect();
    let hpoly = Polynomial::new(hcoef);

    let hmax = support.samples(200, 0.0).iter().fold(0.0f64, |m, &x| m.max(hpoly.eval(x).abs()));
    for x in support.samples(200, 0.0) {
        let h = hpoly.eval(x);
        if h < -1e-10 * hmax.max(1e-300) {
            return Err(Error::NotOneCut { x, value: h });
        }
    }

    let measure = ChebMeasure::from_polynomial_density(support, &hpoly.scale(1.0 / (2.0 * PI * t)));
    let b = support.hi();
    let l_t = 2.0 * measure.log_potential_real(b) - v.eval(b) / t;
    Ok(OneCutMeasure { t, support, hpoly, l_t, measure })
}

/// `E_t(x) = 2∫log|x−s|ρ^t(s)ds − V_t(x) − l_t`.
pub fn effective_potential(m: &OneCutMeasure, v: &Potential, x: f64) -> f64 {
    2.0 * m.measure.log_potential_real(x) - v.eval(x) / m.t - m.l_t
}

/// Difference between the two expressions for `q_t(x)` off the support:
/// `(V_t′/2)² − ∫(V_t′(x)−V_t′(s))/(x−s) ρ^t(s) ds` and `(V_t′/2 − G(x))²`.
pub fn q_identity_check(m: &OneCutMeasure, v: &Potential, x: f64, ctx: &PrecisionContext) -> Result<f64> {
    if m.support.contains(x) {
        return Err(Error::Precondition(format!("x = {x} lies on the support")));
    }
    let vp = v.derivative().scale(1.0 / m.t);
    let half = 0.5 * vp.eval(x);
    let g = |s: f64| m.hpoly.eval(s) / (2.0 * PI * m.t);
    let f = integrate(|s| (vp.eval(x) - vp.eval(s)) / (x - s) * g(s), m.support, QuadKind::SqrtEndpoints, ctx)?;
    let from_qt = half * half - f;
    let st = m.measure.stieltjes(Complex64::new(x, 0.0)).re;
    let from_curve = (half - st) * (half - st);
    Ok((from_qt - from_curve).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrRow {
    pub t: f64,
    pub residual: f64,
}

/// `sup |(tρ^t − ρ)/(t−1) − w|` over interior points of the `t = 1`
/// support, with `w` the arcsine density of that support.
pub fn br_derivative_check(v: &Potential, t_list: &[f64], ctx: &PrecisionContext) -> Result<Vec<BrRow>> {
    let m1 = solve_one_cut(v, 1.0, ctx)?;
    let (a, b) = (m1.a(), m1.b());
    let grid = Interval::new(a + 0.25, b - 0.25)?.samples(41, 0.0);
    t_list
        .iter()
        .map(|&t| {
            if !(t < 1.0) {
                return Err(Error::Precondition(format!("br_derivative_check needs t < 1, got {t}")));
            }
            let mt = solve_one_cut(v, t, ctx)?;
            let residual = grid
                .iter()
                .map(|&x| {
                    let w = 1.0 / (PI * ((b - x) * (x - a)).sqrt());
                    ((t * mt.density(x) - m1.density(x)) / (t - 1.0) - w).abs()
                })
                .fold(0.0, f64::max);
            Ok(BrRow { t, residual })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn semicircle() {
        let m = solve_one_cut(&Potential::gaussian(), 1.0, &ctx()).unwrap();
        assert_relative_eq!(m.a(), -2.0, epsilon = 1e-12);
        assert_relative_eq!(m.b(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(m.mass(), 1.0, epsilon = 1e-13);
        for x in Interval::new(-2.0, 2.0).unwrap().samples(50, 0.0) {
            assert_relative_eq!(m.density(x), (4.0 - x * x).sqrt() / (2.0 * PI), epsilon = 1e-13);
        }
        // semicircle: l = −1 (E = 0 on the support with V = x²/2)
        assert_relative_eq!(m.l_t(), -1.0, epsilon = 1e-13);
    }

    #[test]
    fn semicircle_scales_with_t() {
        let m = solve_one_cut(&Potential::gaussian(), 0.25, &ctx()).unwrap();
        assert_relative_eq!(m.a(), -1.0, epsilon = 1e-12);
        assert_relative_eq!(m.b(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn effective_potential_of_semicircle() {
        let v = Potential::gaussian();
        let m = solve_one_cut(&v, 1.0, &ctx()).unwrap();
        assert!(effective_potential(&m, &v, 0.0).abs() < 1e-14);
        // quadrature oracle at x = 3
        let q = integrate(|s| (3.0 - s).ln() / (2.0 * PI), m.support(), QuadKind::SqrtEndpoints, &ctx()).unwrap();
        let e3 = effective_potential(&m, &v, 3.0);
        assert_relative_eq!(e3, 2.0 * q - 4.5 - m.l_t(), epsilon = 1e-13);
        assert!(e3 < 0.0);
        // derivative agrees with a central difference
        let h = 1e-5;
        let fd = (effective_potential(&m, &v, 3.0 + h) - effective_potential(&m, &v, 3.0 - h)) / (2.0 * h);
        assert_relative_eq!(m.effective_derivative(3.0), fd, epsilon = 1e-8);
        assert_relative_eq!(m.effective_derivative(-3.0), -fd, epsilon = 1e-8);
    }

    #[test]
    fn q_identity() {
        let v = Potential::gaussian();
        let m = solve_one_cut(&v, 1.0, &ctx()).unwrap();
        assert!(q_identity_check(&m, &v, 3.0, &ctx()).unwrap() < 1e-10);
        let g5 = (5.0 - 21f64.sqrt()) / 2.0;
        let st = m.measure().stieltjes(Complex64::new(5.0, 0.0)).re;
        assert_relative_eq!(st, g5, epsilon = 1e-15);
        let q5 = (2.5 - st).powi(2);
        assert_relative_eq!(q5, (2.5 - g5).powi(2), epsilon = 1e-14);
        // vanishes at the regular edge: (V′/2 − G)² → 0 at b
        let near = (1.0 - m.measure().stieltjes(Complex64::new(2.0 + 1e-12, 0.0)).re).powi(2);
        assert!(near < 1e-10);
    }

    #[test]
    fn br_rejects_t_one() {
        assert!(br_derivative_check(&Potential::gaussian(), &[1.0], &ctx()).is_err());
    }

    #[test]
    fn br_first_order() {
        let rows = br_derivative_check(&Potential::gaussian(), &[0.99, 0.995], &ctx()).unwrap();
        let ratio = rows[1].residual / rows[0].residual;
        assert!((ratio - 0.5).abs() < 0.05, "ratio {ratio}");
    }
}
