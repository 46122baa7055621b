use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ansatz::{
    build_params, filling_identity, h_tilde_residual, p_polynomial, sqrt_q_residual, xstar_potential_residual,
};
use crate::equilibrium::critical::p_at_2y;
use crate::equilibrium::{
    br_derivative_check, detect_critical_point, effective_potential, off_support_samples, solve_one_cut,
    synthesize_birth_potential, CriticalReport, OneCutMeasure, Potential,
};
use crate::numerics::{Interval, Mp, PrecisionContext};
use crate::orthopoly::{measured_orthogonality, stieltjes_recurrence, KernelEvaluator, RecurrenceTable, WeightSpec};
use crate::rht::{cauchy_parametrix, jump_suite, matrix_jump, pi_matrix, CMat, GFunction, ParametrixFrame};
use crate::Result;

/// One identity check. `pass` compares `residual` with `tolerance` in the
/// direction named by the case (`≤` unless the case says `>=`).
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub suite: String,
    pub case: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityRow {
    pub fn upper(suite: &str, case: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { suite: suite.into(), case: case.into(), residual, tolerance, pass: residual <= tolerance }
    }

    pub fn lower(suite: &str, case: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { suite: suite.into(), case: case.into(), residual: value, tolerance: bound, pass: value >= bound }
    }

    pub fn within(suite: &str, case: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self { suite: suite.into(), case: case.into(), residual: value, tolerance: hi, pass: value >= lo && value <= hi }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IdentityOptions {
    /// Append a recurrence table with a scaled `b_k` and measure it.
    pub inject_fault: bool,
}

/// Residuals normalized by `δt/|log δt|` at `δt ∈ {1e−3, 1e−4, 1e−5}`.
pub fn ansatz_stability(
    report: &CriticalReport,
    v: &Potential,
    m1: &OneCutMeasure,
    x: f64,
    ctx: &PrecisionContext,
) -> Result<[(&'static str, [f64; 3]); 3]> {
    let mut out = [("sqrt-q expansion", [0.0; 3]), ("h-tilde expansion", [0.0; 3]), ("potential at x*", [0.0; 3])];
    for (i, dt) in [1e-3, 1e-4, 1e-5].into_iter().enumerate() {
        let p = build_params(report, dt, 1000, ctx)?;
        let scale = dt / dt.ln().abs();
        out[0].1[i] = sqrt_q_residual(x, &p, report) / scale;
        out[1].1[i] = h_tilde_residual(x, &p, m1) / scale;
        out[2].1[i] = xstar_potential_residual(&p, report, v, m1) / scale;
    }
    Ok(out)
}

/// `max|r|/min|r|` over a scan.
pub fn spread(vals: &[f64]) -> f64 {
    let hi = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let lo = vals.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    hi / lo
}

fn semicircle(rows: &mut Vec<IdentityRow>, ctx: &PrecisionContext) -> Result<()> {
    let m = solve_one_cut(&Potential::gaussian(), 1.0, ctx)?;
    let s = "semicircle";
    rows.push(IdentityRow::upper(s, "endpoints", (m.a() + 2.0).abs().max((m.b() - 2.0).abs()), 1e-10));
    let err = Interval::new(-2.0, 2.0)?
        .samples(50, 0.0)
        .into_iter()
        .map(|x| (m.density(x) - (4.0 - x * x).sqrt() / (2.0 * PI)).abs())
        .fold(0.0, f64::max);
    rows.push(IdentityRow::upper(s, "density sup error", err, 1e-10));
    Ok(())
}

fn synthesis(rows: &mut Vec<IdentityRow>, nu: u32, ctx: &PrecisionContext) -> Result<(Potential, CriticalReport)> {
    let s = "synthesis";
    let (v, rep) = synthesize_birth_potential(3.0, nu, ctx)?;
    let m = solve_one_cut(&v, 1.0, ctx)?;
    rows.push(IdentityRow::upper(s, format!("nu={nu} |E(x*)|"), effective_potential(&m, &v, rep.x_star).abs(), 1e-10));
    rows.push(IdentityRow::upper(s, format!("nu={nu} mass"), (m.mass() - 1.0).abs(), 1e-10));
    let worst = off_support_samples(m.support(), None, rep.x_star + 3.0)
        .into_iter()
        .filter(|x| (x - rep.x_star).abs() >= 0.1)
        .map(|x| -effective_potential(&m, &v, x))
        .fold(f64::INFINITY, f64::min);
    rows.push(IdentityRow::lower(s, format!("nu={nu} off-support margin >="), worst, 1e-6));
    let found = detect_critical_point(&m, &v, Interval::new(m.b(), m.b() + 4.0)?, ctx)?;
    rows.push(IdentityRow::upper(s, format!("nu={nu} detected x*"), (found.x_star - rep.x_star).abs(), 1e-6));
    rows.push(IdentityRow::upper(s, format!("nu={nu} detected order"), (found.nu as f64 - nu as f64).abs(), 0.0));
    Ok((v, rep))
}

fn filling(rows: &mut Vec<IdentityRow>, ctx: &PrecisionContext) -> Result<()> {
    for nu in 1..=4u32 {
        let mut worst = 0.0f64;
        let mut pworst = 0.0f64;
        for y in [0.25, 1.0, 2.0] {
            let (l, r) = filling_identity(nu, y, ctx)?;
            worst = worst.max(((l - r) / r).abs());
            let closed = p_at_2y(nu, y);
            pworst = pworst.max(((p_polynomial(nu, y).eval(2.0 * y) - closed) / closed).abs());
        }
        rows.push(IdentityRow::upper("filling", format!("nu={nu} integral"), worst, 1e-10));
        rows.push(IdentityRow::upper("filling", format!("nu={nu} P(2y)"), pworst, 1e-12));
    }
    Ok(())
}

fn buyarov_rakhmanov(rows: &mut Vec<IdentityRow>, v: &Potential, ctx: &PrecisionContext) -> Result<()> {
    let s = "buyarov-rakhmanov";
    let br = br_derivative_check(v, &[1.0 - 1e-2, 1.0 - 1e-3, 1.0 - 1e-4], ctx)?;
    for r in &br {
        rows.push(IdentityRow::upper(s, format!("t={} sup residual", r.t), r.residual, 1.0));
    }
    for w in br.windows(2) {
        rows.push(IdentityRow::within(s, format!("ratio t={}/{}", w[0].t, w[1].t), w[0].residual / w[1].residual, 5.0, 20.0));
    }
    Ok(())
}

fn ansatz(rows: &mut Vec<IdentityRow>, v: &Potential, rep: &CriticalReport, ctx: &PrecisionContext) -> Result<()> {
    let m1 = solve_one_cut(v, 1.0, ctx)?;
    for (name, vals) in ansatz_stability(rep, v, &m1, 5.0, ctx)? {
        rows.push(IdentityRow::upper("ansatz", format!("{name} normalized spread over dt decade"), spread(&vals), 3.0));
    }
    Ok(())
}

fn rht(rows: &mut Vec<IdentityRow>, v: &Potential, rep: &CriticalReport, ctx: &PrecisionContext) -> Result<()> {
    let m1 = solve_one_cut(v, 1.0, ctx)?;
    let params = build_params(rep, 1e-3, 2000, ctx)?;
    let gf = GFunction::supercritical(&params, &m1)?;
    let frame = ParametrixFrame::supercritical(&gf, v, &params)?;
    let jumps = jump_suite(&gf, &frame, 5)?;
    let mut groups: Vec<(String, f64)> = Vec::new();
    for j in &jumps {
        let key = format!("{} on {}", j.object, j.piece);
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1 = g.1.max(j.residual),
            None => groups.push((key, j.residual)),
        }
    }
    for (key, r) in groups {
        rows.push(IdentityRow::upper("rht", format!("jump {key}"), r, 1e-8));
    }
    let det = [Complex64::new(0.3, 0.7), Complex64::new(-4.0, 0.1), Complex64::new(2.5, -1e-3)]
        .iter()
        .map(|&z| Ok((pi_matrix(z, gf.band().lo(), gf.band().hi())?.determinant() - 1.0).norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rows.push(IdentityRow::upper("rht", "det Pi", det, 1e-12));
    let mut worst = 0.0f64;
    for x in [-1.2f64, -0.4, 0.1, 0.7, 1.5] {
        let w = (-x * x + 0.3 * x).exp();
        let r = matrix_jump("Psi", "R", x, |z| cauchy_parametrix(z, 0.3, 1, ctx), |_| {
            CMat::new(Complex64::new(1.0, 0.0), Complex64::new(w, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
        })?;
        worst = worst.max(r.residual);
    }
    rows.push(IdentityRow::upper("rht", "jump Psi on R", worst, 1e-8));
    let off = crate::rht::gineq_residuals(&gf, v, &[rep.x_star + 0.5])[0].residual;
    rows.push(IdentityRow::upper("rht", "g inequality at x*+0.5", off, 0.0));
    Ok(())
}

fn orthopoly(rows: &mut Vec<IdentityRow>, opts: IdentityOptions) -> Result<()> {
    let s = "orthopoly";
    let ctx = PrecisionContext::with_bits(128);
    let w = WeightSpec::model(1, 0.0)?;
    let table = stieltjes_recurrence(&w, 40, &ctx)?;
    rows.push(IdentityRow::upper(s, "hermite recurrence k<=40 (relative, 128 bits)", hermite_residual(&table), 1e-20));
    for n in [8usize, 16] {
        let ev = KernelEvaluator::new(WeightSpec::model(1, 0.0)?, n, &ctx)?;
        let qctx = PrecisionContext::default();
        rows.push(IdentityRow::upper(s, format!("n={n} trace"), (ev.trace(&qctx)? - n as f64).abs(), 1e-8));
        rows.push(IdentityRow::upper(s, format!("n={n} reproducing"), ev.reproducing_residual(0.3, -0.8, &qctx)?, 1e-8));
    }
    rows.push(IdentityRow::upper(s, "discrete orthogonality", measured_orthogonality(&table, &w), 1e-18));
    if opts.inject_fault {
        let bad = table.with_corrupted_b(10, 1.0 + 1e-6);
        rows.push(IdentityRow::upper(s, "corrupted b_10 orthogonality", measured_orthogonality(&bad, &w), 1e-18));
    }
    Ok(())
}

/// Largest relative deviation of a `e^{−x²}` table from `a_k = 0`,
/// `b_k = k/2`, `h_0 = √π`, in the table's own precision.
pub fn hermite_residual(table: &RecurrenceTable) -> f64 {
    let bits = table.bits();
    let root_pi = Mp::pi(bits).sqrt();
    let mut worst = ((table.h_mp(0) - &root_pi) / &root_pi).abs().to_f64();
    for k in 0..=table.max_degree() {
        worst = worst.max(table.a_mp(k).abs().to_f64());
        if k > 0 {
            let exact = Mp::from_f64(k as f64 / 2.0, bits);
            worst = worst.max(((table.b_mp(k) - &exact) / &exact).abs().to_f64());
        }
    }
    worst
}

/// Every module-level identity, one row per check.
pub fn run_identity_suite(opts: IdentityOptions) -> Result<Vec<IdentityRow>> {
    let ctx = PrecisionContext::default();
    let mut rows = Vec::new();
    semicircle(&mut rows, &ctx)?;
    let (v1, rep1) = synthesis(&mut rows, 1, &ctx)?;
    synthesis(&mut rows, 2, &ctx)?;
    filling(&mut rows, &ctx)?;
    buyarov_rakhmanov(&mut rows, &v1, &ctx)?;
    ansatz(&mut rows, &v1, &rep1, &ctx)?;
    rht(&mut rows, &v1, &rep1, &ctx)?;
    orthopoly(&mut rows, opts)?;
    Ok(rows)
}
