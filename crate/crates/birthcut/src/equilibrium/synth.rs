use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{
    detect_critical_point, effective_potential, off_support_samples, solve_one_cut, CriticalReport, Potential,
};
use crate::numerics::{integrate, Interval, Polynomial, PrecisionContext, QuadKind};
use crate::{Error, Result};

/// Required strictness `E < −MIN_MARGIN` away from the support collars and
/// from `|x − x*| < 0.1`.
pub const MIN_MARGIN: f64 = 1e-6;

/// Cubic retries: `(Q(x*), q₃/Q(x*))`, tried in order.
const CUBIC_SCAN: [(f64, f64); 9] = [
    (0.1, 1.0 / 16.0),
    (0.1, 1.0 / 32.0),
    (0.1, 1.0 / 8.0),
    (0.05, 1.0 / 16.0),
    (0.05, 1.0 / 32.0),
    (0.05, 1.0 / 8.0),
    (0.2, 1.0 / 16.0),
    (0.2, 1.0 / 32.0),
    (0.2, 1.0 / 8.0),
];

struct Moments {
    /// `∫₋₂² z^k (z−x*)^{2ν−1} √(4−z²) dz`
    inner: Vec<f64>,
    /// `∫₂^{x*} s^k (s−x*)^{2ν−1} √(s²−4) ds`
    outer: Vec<f64>,
}

fn moments(x_star: f64, nu: u32, kmax: usize, ctx: &PrecisionContext) -> Result<Moments> {
    let p = 2 * nu as i32 - 1;
    let sc = Interval::new(-2.0, 2.0)?;
    let gap = Interval::new(0.0, (x_star - 2.0).sqrt())?;
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for k in 0..=kmax as i32 {
        inner.push(integrate(|z| z.powi(k) * (z - x_star).powi(p), sc, QuadKind::SqrtEndpoints, ctx)?);
        // s = 2 + u² removes the square-root endpoint
        outer.push(integrate(
            |u| {
                let s = 2.0 + u * u;
                s.powi(k) * (s - x_star).powi(p) * u * (4.0 + u * u).sqrt() * 2.0 * u
            },
            gap,
            QuadKind::Plain,
            ctx,
        )?);
    }
    Ok(Moments { inner, outer })
}

/// Polynomial part of `h(z)√(z²−4)` at infinity.
fn polynomial_part_sqrt(h: &Polynomial) -> Polynomial {
    let d = h.degree();
    let mut binom = vec![1.0];
    for j in 0..=d {
        let b = binom[j] * (0.5 - j as f64) / (j + 1) as f64;
        binom.push(b);
    }
    let mut out = vec![0.0; d + 2];
    for (i, &hi) in h.coeffs().iter().enumerate() {
        for (j, &bj) in binom.iter().enumerate() {
            let e = i as i64 + 1 - 2 * j as i64;
            if e < 0 {
                break;
            }
            out[e as usize] += hi * bj * (-4f64).powi(j as i32);
        }
    }
    Polynomial::new(out)
}

fn solve_linear(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let x = a.lu().solve(&DVector::from_vec(rhs))?;
    Some(x.iter().copied().collect())
}

struct Candidate {
    v: Potential,
    report: CriticalReport,
}

fn check_candidate(q: Polynomial, x_star: f64, nu: u32, ctx: &PrecisionContext) -> std::result::Result<Candidate, String> {
    if !(q.eval(x_star) > 0.0) {
        return Err(format!("Q(x*) = {} not positive", q.eval(x_star)));
    }
    let h = &q * &Polynomial::linear_root(x_star).pow(2 * nu - 1);
    let sc = Interval::new(-2.0, 2.0).expect("ordered");
    if let Some(x) = sc.samples(399, 0.0).into_iter().find(|&x| h.eval(x) <= 0.0) {
        return Err(format!("density changes sign at {x}"));
    }
    let vprime = polynomial_part_sqrt(&h);
    let v = Potential::new(
        vprime.antiderivative(),
        format!("synthesized x*={x_star} nu={nu} Q degree {}", q.degree()),
    )
    .map_err(|e| e.to_string())?;
    let m = solve_one_cut(&v, 1.0, ctx).map_err(|e| e.to_string())?;
    if (m.a() + 2.0).abs() > 1e-9 || (m.b() - 2.0).abs() > 1e-9 {
        return Err(format!("support [{}, {}] is not [-2, 2]", m.a(), m.b()));
    }
    let mut scan = off_support_samples(m.support(), Some(x_star), x_star + 3.0);
    scan.extend(Interval::new(-8.0, -2.05).expect("ordered").samples(600, 0.0));
    scan.extend(Interval::new(2.05, x_star + 6.0).expect("ordered").samples(1400, 0.0));
    for &x in &scan {
        if (x - x_star).abs() < 0.1 {
            continue;
        }
        let e = effective_potential(&m, &v, x);
        if e > -MIN_MARGIN {
            return Err(format!("E({x}) = {e:e} violates the strictness margin"));
        }
    }
    let search = Interval::new(2.0 + 0.05, x_star + 3.0).expect("ordered");
    let report = detect_critical_point(&m, &v, search, ctx).map_err(|e| e.to_string())?;
    if (report.x_star - x_star).abs() > 1e-6 || report.nu != nu {
        return Err(format!("round trip gave x* = {}, nu = {}", report.x_star, report.nu));
    }
    Ok(Candidate { v, report })
}

/// Potential whose equilibrium measure at `t = 1` is
/// `ρ(x) = Q(x)(x−x*)^{2ν−1}√(4−x²)/2π` on `[−2, 2]` with `E(x*) = 0`.
///
/// `Q` is linear, fixed by `∫ρ = 1` and `E(x*) = 0`. If that candidate is not
/// admissible, cubic `Q` are scanned with `Q(x*)` and the cubic coefficient
/// prescribed.
pub fn synthesize_birth_potential(x_star: f64, nu: u32, ctx: &PrecisionContext) -> Result<(Potential, CriticalReport)> {
    if !(x_star > 2.0) {
        return Err(Error::Precondition(format!("x* must exceed 2, got {x_star}")));
    }
    if nu == 0 {
        return Err(Error::Precondition("nu must be positive".into()));
    }
    let mo = moments(x_star, nu, 3, ctx)?;
    let mut reasons = Vec::new();

    let linear = solve_linear(
        vec![mo.inner[..2].to_vec(), mo.outer[..2].to_vec()],
        vec![2.0 * PI, 0.0],
    );
    if let Some(q) = linear {
        match check_candidate(Polynomial::new(q), x_star, nu, ctx) {
            Ok(c) => return Ok((c.v, c.report)),
            Err(r) => reasons.push(format!("degree 1: {r}")),
        }
    }

    for (target, frac) in CUBIC_SCAN {
        let q3 = target * frac;
        let rows = vec![
            mo.inner[..3].to_vec(),
            mo.outer[..3].to_vec(),
            vec![1.0, x_star, x_star * x_star],
        ];
        let rhs = vec![2.0 * PI - q3 * mo.inner[3], -q3 * mo.outer[3], target - q3 * x_star.powi(3)];
        let Some(mut q) = solve_linear(rows, rhs) else { continue };
        q.push(q3);
        match check_candidate(Polynomial::new(q), x_star, nu, ctx) {
            Ok(c) => return Ok((c.v, c.report)),
            Err(r) => reasons.push(format!("degree 3 (Q(x*)={target}, q3={q3}): {r}")),
        }
    }
    Err(Error::SynthesisFailed(reasons.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sqrt_expansion_of_constant() {
        // Pol(√(z²−4)) = z
        let p = polynomial_part_sqrt(&Polynomial::constant(1.0));
        assert_eq!(p.coeffs(), &[0.0, 1.0]);
        // Pol(z²√(z²−4)) = z³ − 2z
        let p = polynomial_part_sqrt(&Polynomial::new(vec![0.0, 0.0, 1.0]));
        assert_relative_eq!(p.coeff(3), 1.0);
        assert_relative_eq!(p.coeff(1), -2.0);
    }

    #[test]
    fn rejects_low_x_star() {
        let ctx = PrecisionContext::default();
        assert!(matches!(synthesize_birth_potential(2.0, 1, &ctx), Err(Error::Precondition(_))));
    }

    #[test]
    fn quartic_for_nu_one() {
        let ctx = PrecisionContext::default();
        let (v, rep) = synthesize_birth_potential(3.0, 1, &ctx).unwrap();
        assert_eq!(v.poly().degree(), 4);
        assert_eq!(rep.nu, 1);
        assert!((rep.x_star - 3.0).abs() < 1e-6);
        assert!(rep.q_at_xstar > 0.0);
        let m = solve_one_cut(&v, 1.0, &ctx).unwrap();
        assert_relative_eq!(m.mass(), 1.0, epsilon = 1e-12);
        assert!(effective_potential(&m, &v, 3.0).abs() < 1e-10);
    }
}
