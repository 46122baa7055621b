use num_complex::Complex64;

use super::{effective_potential, OneCutMeasure, Potential, EDGE_COLLAR};
use crate::numerics::{factorial, find_root, joukowski, Interval, Polynomial, PrecisionContext, QuadKind};
use crate::{Error, Result};

/// Acceptance tolerance for `|E_t(x*)|`.
pub const CRITICAL_TOL: f64 = 1e-8;

/// Exterior point where the effective potential touches zero.
#[derive(Debug, Clone)]
pub struct CriticalReport {
    pub x_star: f64,
    pub nu: u32,
    /// `Q` with `ρ(x) = Q(x)(x−x*)^{2ν−1}√((b−x)(x−a))/2π`.
    pub q_poly: Polynomial,
    pub q_at_xstar: f64,
    /// Log potential of the arcsine law of the support at `x*` (Green's function).
    pub phi_at_xstar: f64,
    /// `(Q(x*)√((x*−a)(x*−b))/2ν)^{1/2ν}`.
    pub varphi_at_xstar: f64,
    /// `c_{x*}/n = −E_t(x*)/2`.
    pub c_star: f64,
    /// `min(−E)` over off-support samples outside `|x−x*| < 0.1`.
    pub margin: f64,
    pub support: Interval,
    pub t: f64,
}

impl CriticalReport {
    /// `Q(x)(x−x*)^{2ν−1}`.
    pub fn h0(&self, x: f64) -> f64 {
        self.q_poly.eval(x) * (x - self.x_star).powi(2 * self.nu as i32 - 1)
    }

    pub fn q(&self, x: f64) -> f64 {
        self.q_poly.eval(x)
    }
}

/// `∫ log(x−s) ds / (π√(4−s²))` over `[−2, 2]`, real part.
pub fn arcsine_log_potential(x: f64) -> f64 {
    if x.abs() <= 2.0 {
        0.0
    } else {
        ((x.abs() + (x * x - 4.0).sqrt()) / 2.0).ln()
    }
}

/// `φ(x) = ς/2 + ∫log(x−s)w(s)ds` for the arcsine law of `[−2, 2]` (`ς = 0`).
pub fn phi(x: f64) -> Result<f64> {
    if !(x > 2.0) {
        return Err(Error::Precondition(format!("phi needs x > 2, got {x}")));
    }
    Ok(arcsine_log_potential(x))
}

/// `φ` for the arcsine law of a general interval, normalized to vanish on it.
pub fn phi_on(support: Interval, x: f64) -> f64 {
    joukowski(Complex64::new((x - support.center()) / support.radius(), 0.0)).norm().ln()
}

/// Off-support sample points: 25 left of `a − 0.05` down to `a − 4`, 25
/// right of `b + 0.05` up to `right_end`, skipping `|x−x*| < 0.1`.
pub fn off_support_samples(support: Interval, x_star: Option<f64>, right_end: f64) -> Vec<f64> {
    let left = Interval::new(support.lo() - 4.0, support.lo() - EDGE_COLLAR).expect("ordered");
    let right = Interval::new(support.hi() + EDGE_COLLAR, right_end.max(support.hi() + 1.0)).expect("ordered");
    let mut out: Vec<f64> = left.samples(25, 0.0);
    out.extend(right.samples(25, 0.0));
    if let Some(xs) = x_star {
        out.retain(|x| (x - xs).abs() >= 0.1);
    }
    out
}

/// Increment `E(x0 + h) − E(x0)` through the exact derivative, avoiding
/// cancellation in `E` itself.
fn increment(m: &OneCutMeasure, x0: f64, h: f64) -> f64 {
    let iv = if h > 0.0 { Interval::new(x0, x0 + h) } else { Interval::new(x0 + h, x0) };
    let iv = iv.expect("nonzero offset");
    let rule = crate::numerics::QuadratureRule::new(QuadKind::Plain, 48, iv);
    let s = rule.apply(|x| m.effective_derivative(x));
    if h > 0.0 {
        s
    } else {
        -s
    }
}

/// Least-squares slope of `log|ΔE|` against `log h` on 8 log-spaced offsets
/// in `[10⁻³, 10⁻¹]`; both sides are averaged to cancel odd corrections.
fn vanishing_slope(m: &OneCutMeasure, x0: f64) -> f64 {
    let pts: Vec<(f64, f64)> = (0..8)
        .map(|j| {
            let h = 1e-3 * 100f64.powf(j as f64 / 7.0);
            let e = 0.5 * (increment(m, x0, h).abs() + increment(m, x0, -h).abs());
            (h.ln(), e.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Locate the maximizer of `E_t` on `search` and characterize it.
pub fn detect_critical_point(
    m: &OneCutMeasure,
    v: &Potential,
    search: Interval,
    ctx: &PrecisionContext,
) -> Result<CriticalReport> {
    let sup = m.support();
    if search.hi() > sup.lo() && search.lo() < sup.hi() {
        return Err(Error::Precondition("search interval overlaps the support".into()));
    }
    let lo = if search.lo() >= sup.hi() { search.lo().max(sup.hi() + EDGE_COLLAR) } else { search.lo() };
    let hi = if search.hi() <= sup.lo() { search.hi().min(sup.lo() - EDGE_COLLAR) } else { search.hi() };
    let grid = Interval::new(lo, hi)?.samples(801, 0.0);
    let (x0, e0) = grid
        .iter()
        .map(|&x| (x, effective_potential(m, v, x)))
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let step = (hi - lo) / 801.0;

    // a zero of the density factor of odd multiplicity sits at the maximizer;
    // the grid itself only locates it to within a step
    let h = m.hpoly();
    let near = h.real_roots_in(x0 - 2.0 * step, x0 + 2.0 * step, 64);
    if e0 < -CRITICAL_TOL && near.is_empty() {
        return Err(Error::NoCriticalPoint { x: x0, max: e0 });
    }
    let x_approx = near
        .iter()
        .copied()
        .min_by(|a, b| (a - x0).abs().total_cmp(&(b - x0).abs()))
        .unwrap_or(x0);

    let slope = vanishing_slope(m, x_approx);
    let order = 2.0 * (slope / 2.0).round();
    if (slope - order).abs() > 0.2 || order < 2.0 {
        return Err(Error::AmbiguousOrder { slope });
    }
    let nu = (order / 2.0) as u32;

    // refine on the simple root of h^{(2ν−2)}
    let mut dk = h.clone();
    for _ in 0..(2 * nu - 2) {
        dk = dk.derivative();
    }
    let bracket = Interval::new(x_approx - 0.01, x_approx + 0.01)?;
    let x_star = find_root(|x| dk.eval(x), bracket, &ctx.with_tol(0.0, 0.0)).unwrap_or(x_approx);

    let e_star = effective_potential(m, v, x_star);
    if e_star.abs() > CRITICAL_TOL {
        return Err(Error::NoCriticalPoint { x: x_star, max: e_star });
    }

    let mut q = h.clone();
    for _ in 0..(2 * nu - 1) {
        q = q.deflate(x_star).0;
    }
    let q_poly = q.scale(1.0 / m.t());
    let q_at_xstar = q_poly.eval(x_star);
    if !(q_at_xstar > 0.0) {
        return Err(Error::Precondition(format!("Q(x*) = {q_at_xstar} is not positive")));
    }
    let edge = ((x_star - sup.lo()) * (x_star - sup.hi())).sqrt();
    let varphi_at_xstar = (q_at_xstar * edge / (2.0 * nu as f64)).powf(1.0 / (2.0 * nu as f64));
    let margin = off_support_samples(sup, Some(x_star), x_star + 3.0)
        .iter()
        .map(|&x| -effective_potential(m, v, x))
        .fold(f64::INFINITY, f64::min);
    Ok(CriticalReport {
        x_star,
        nu,
        q_poly,
        q_at_xstar,
        phi_at_xstar: phi_on(sup, x_star),
        varphi_at_xstar,
        c_star: -e_star / 2.0,
        margin,
        support: sup,
        t: m.t(),
    })
}

/// `P(2y) = y^{2ν−2}(2ν)!/(2(ν−1)!ν!)`.
pub(crate) fn p_at_2y(nu: u32, y: f64) -> f64 {
    y.powi(2 * nu as i32 - 2) * factorial(2 * nu) / (2.0 * factorial(nu - 1) * factorial(nu))
}
