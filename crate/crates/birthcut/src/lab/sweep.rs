use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ScalingRegime};
use crate::equilibrium::{solve_one_cut, CriticalReport, OneCutMeasure, Potential};
use crate::numerics::PrecisionContext;
use crate::orthopoly::{cd_kernel, precision_schedule, stieltjes_recurrence, KernelEvaluator, PointValues, WeightSpec};
use crate::rht::{c_star_quadrature, tau_z, GFunction};
use crate::{Error, Result};

/// One kernel sample. For the subcritical sweep `k_scaled` holds the
/// prefactored kernel and `k_model` the limit shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub n_big: u64,
    pub t: f64,
    pub z: f64,
    pub zprime: f64,
    pub k_scaled: f64,
    pub k_model: f64,
    pub abs_err: f64,
}

/// `N = round(n/t₀)` and `t = n/N`.
pub fn couple(regime: &ScalingRegime, n: u64) -> Result<(u64, f64)> {
    let t0 = regime.nominal_t(n);
    if !(t0 > 0.0) {
        return Err(Error::Config(format!("nominal t = {t0} at n = {n} is not positive")));
    }
    let n_big = ((n as f64 / t0).round() as u64).max(1);
    Ok((n_big, n as f64 / n_big as f64))
}

fn ctx_for(cfg: &ExperimentConfig, n: u64) -> PrecisionContext {
    PrecisionContext::with_bits(cfg.bits.unwrap_or_else(|| precision_schedule(n as usize)))
}

/// Weighted point values of `π_{n−1}, π_n` at `x* + z/s` for every grid point.
fn grid_points(ev: &KernelEvaluator, x_star: f64, scale: f64, z: &[f64]) -> Vec<PointValues> {
    z.par_iter().map(|&zi| ev.point(x_star + zi / scale)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniversalitySummary {
    pub u: f64,
    pub ubar: u64,
    /// `(n, sup |K_scaled − K_model|)`
    pub sup_err: Vec<(u64, f64)>,
    pub decreasing: bool,
}

impl UniversalitySummary {
    /// Recomputes the summary from emitted rows.
    pub fn from_rows(rows: &[SweepRow], u: f64, ubar: u64) -> Self {
        let mut sup_err: Vec<(u64, f64)> = Vec::new();
        for r in rows {
            match sup_err.last_mut() {
                Some((n, e)) if *n == r.n => *e = e.max(r.abs_err),
                _ => sup_err.push((r.n, r.abs_err)),
            }
        }
        let decreasing = sup_err.windows(2).all(|w| w[1].1 < w[0].1);
        Self { u, ubar, sup_err, decreasing }
    }
}

/// `K_scaled(z,z′) = K_{n,N}(x*+z/s, x*+z′/s)/s` with `s = ϕ(x*)n^{1/2ν}`
/// against `K^ν_ū`.
pub fn run_universality_sweep(
    cfg: &ExperimentConfig,
    v: &Potential,
    report: &CriticalReport,
) -> Result<(Vec<SweepRow>, UniversalitySummary)> {
    cfg.validate()?;
    if !matches!(cfg.regime, ScalingRegime::Supercritical { .. }) {
        return Err(Error::Config("universality sweep needs the supercritical regime".into()));
    }
    let nu = report.nu;
    let u = cfg.check_filling(nu, report.phi_at_xstar)?;
    let ubar = (u + 0.5).floor().max(0.0) as u64;
    let z = cfg.grid.values();
    let model = model_grid(nu, ubar as usize, &z)?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let (n_big, t) = couple(&cfg.regime, n)?;
        let ctx = ctx_for(cfg, n);
        let ev = KernelEvaluator::new(WeightSpec::ensemble(v.clone(), n_big)?, n as usize, &ctx)?;
        let s = report.varphi_at_xstar * (n as f64).powf(1.0 / (2.0 * nu as f64));
        let pts = grid_points(&ev, report.x_star, s, &z);
        for (i, &zi) in z.iter().enumerate() {
            for (j, &zj) in z.iter().enumerate() {
                let k = ev.table.kernel_from(n as usize, &pts[i], &pts[j]) / s;
                let km = model[i * z.len() + j];
                rows.push(SweepRow { n, n_big, t, z: zi, zprime: zj, k_scaled: k, k_model: km, abs_err: (k - km).abs() });
            }
        }
    }
    let summary = UniversalitySummary::from_rows(&rows, u, ubar);
    Ok((rows, summary))
}

/// `K^ν_m` on the grid, row-major.
fn model_grid(nu: u32, m: usize, z: &[f64]) -> Result<Vec<f64>> {
    if m == 0 {
        return Ok(vec![0.0; z.len() * z.len()]);
    }
    let ctx = PrecisionContext::with_bits(precision_schedule(m));
    let w = WeightSpec::model(nu, 0.0)?;
    let table = stieltjes_recurrence(&w, m, &ctx)?;
    let mut out = Vec::with_capacity(z.len() * z.len());
    for &a in z {
        for &b in z {
            out.push(cd_kernel(&table, &w, m, a, b)?);
        }
    }
    Ok(out)
}

/// Exponent multiplier on `c_{x*}` in the subcritical prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prefactor {
    /// `e^{c_{x*}}`
    Single,
    /// `e^{2c_{x*}} = e^{−2Z_t}`
    Double,
}

impl Prefactor {
    pub fn multiplier(self) -> f64 {
        match self {
            Self::Single => 1.0,
            Self::Double => 2.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Single => "exp(c)",
            Self::Double => "exp(2c)",
        }
    }
}

/// Diagonal fit `log(e^{mc}K(z,z)) + z^{2ν} ≈ log C` at one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefactorFit {
    pub n: u64,
    pub t: f64,
    pub c_star: f64,
    pub prefactor: Prefactor,
    /// `exp` of the mean residual.
    pub constant: f64,
    /// Variance of the residual over the grid.
    pub variance: f64,
    /// Variance of `log(e^{mc}K) + Re(ζ^{2ν} − τζ)` with the finite-`n` map and
    /// `τ_t`; `None` when the grid leaves the conformal disk.
    pub local_variance: Option<f64>,
    /// `(1/8π)(1/(x*−β_t) − 1/(x*−α_t))`
    pub limit_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubcriticalSummary {
    pub fits: Vec<PrefactorFit>,
    /// `(1/8π)(1/(x*−β) − 1/(x*−α))` for the `t = 1` support.
    pub limit: f64,
    /// Prefactor whose constant moves least between the last two `n`.
    pub stable: Prefactor,
}

impl SubcriticalSummary {
    pub fn fits_for(&self, p: Prefactor) -> impl Iterator<Item = &PrefactorFit> {
        self.fits.iter().filter(move |f| f.prefactor == p)
    }

    pub fn last(&self, p: Prefactor) -> Option<&PrefactorFit> {
        self.fits_for(p).last()
    }
}

fn drift(fits: &[&PrefactorFit]) -> f64 {
    match fits {
        [.., a, b] => (b.constant / a.constant).ln().abs(),
        _ => f64::INFINITY,
    }
}

fn limit_constant(x_star: f64, alpha: f64, beta: f64) -> f64 {
    (1.0 / (x_star - beta) - 1.0 / (x_star - alpha)) / (8.0 * std::f64::consts::PI)
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (mean, v.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / v.len() as f64)
}

/// `Re(ζ^{2ν} − τζ)` at `x* + z/s`, or `None` when some point falls
/// outside the map's disk.
fn local_exponent(m: &OneCutMeasure, v: &Potential, report: &CriticalReport, n: u64, s: f64, z: &[f64]) -> Option<Vec<f64>> {
    let gf = GFunction::subcritical(m, n, report.x_star).ok()?;
    let tz = tau_z(&gf, v, report, n).ok()?;
    z.iter()
        .map(|&zi| {
            let x = Complex64::new(report.x_star + zi / s, 0.0);
            let zeta = tz.map().zeta(x).ok()?;
            let tau = tz.tau(x).ok()?;
            Some((tz.map().zeta_pow(x).ok()? - tau * zeta).re)
        })
        .collect()
}

/// Prefactored kernels `e^{mc}K_{n,N}(x*+z/s, x*+z′/s)` for `m ∈ {1, 2}`
/// against `e^{−(z^{2ν}+z′^{2ν})/2}(1/8π)(1/(x*−β_t) − 1/(x*−α_t))`.
/// Rows come in two tables, one per prefactor.
pub fn run_subcritical_sweep(
    cfg: &ExperimentConfig,
    v: &Potential,
    report: &CriticalReport,
) -> Result<([Vec<SweepRow>; 2], SubcriticalSummary)> {
    cfg.validate()?;
    let nu = report.nu;
    if !matches!(cfg.regime, ScalingRegime::Subcritical { .. }) {
        return Err(Error::Config("subcritical sweep needs the subcritical regime".into()));
    }
    cfg.regime.check_nu(nu)?;
    let z = cfg.grid.values();
    let two_nu = 2 * nu as i32;
    let mut tables: [Vec<SweepRow>; 2] = [Vec::new(), Vec::new()];
    let mut fits = Vec::new();
    for &n in &cfg.n_list {
        let (n_big, t) = couple(&cfg.regime, n)?;
        if t > 1.0 {
            return Err(Error::Config(format!("n = {n}: rounded t = {t} exceeds 1")));
        }
        let ctx = ctx_for(cfg, n);
        let qctx = PrecisionContext::default();
        let m = solve_one_cut(v, t, &qctx)?;
        let c = c_star_quadrature(&m, report.x_star, n, &qctx)?;
        let limit_t = limit_constant(report.x_star, m.a(), m.b());
        let ev = KernelEvaluator::new(WeightSpec::ensemble(v.clone(), n_big)?, n as usize, &ctx)?;
        let s = report.varphi_at_xstar * (n as f64).powf(1.0 / (2.0 * nu as f64));
        let pts = grid_points(&ev, report.x_star, s, &z);
        let local = local_exponent(&m, v, report, n, s, &z);
        let raw: Vec<f64> = (0..z.len() * z.len())
            .map(|idx| ev.table.kernel_from(n as usize, &pts[idx / z.len()], &pts[idx % z.len()]))
            .collect();
        for (slot, p) in [Prefactor::Single, Prefactor::Double].into_iter().enumerate() {
            let pre = (p.multiplier() * c).exp();
            let mut resid = Vec::with_capacity(z.len());
            let mut resid_local = Vec::with_capacity(z.len());
            for (i, &zi) in z.iter().enumerate() {
                for (j, &zj) in z.iter().enumerate() {
                    let k = pre * raw[i * z.len() + j];
                    let km = (-(zi.powi(two_nu) + zj.powi(two_nu)) / 2.0).exp() * limit_t;
                    tables[slot].push(SweepRow { n, n_big, t, z: zi, zprime: zj, k_scaled: k, k_model: km, abs_err: (k - km).abs() });
                    if i == j {
                        resid.push(k.ln() + zi.powi(two_nu));
                        if let Some(e) = &local {
                            resid_local.push(k.ln() + e[i]);
                        }
                    }
                }
            }
            let (mean, variance) = mean_var(&resid);
            let local_variance = local.as_ref().map(|_| mean_var(&resid_local).1);
            fits.push(PrefactorFit { n, t, c_star: c, prefactor: p, constant: mean.exp(), variance, local_variance, limit_t });
        }
    }
    let limit = limit_constant(report.x_star, report.support.lo(), report.support.hi());
    let single: Vec<&PrefactorFit> = fits.iter().filter(|f| f.prefactor == Prefactor::Single).collect();
    let double: Vec<&PrefactorFit> = fits.iter().filter(|f| f.prefactor == Prefactor::Double).collect();
    let stable = if drift(&double) <= drift(&single) { Prefactor::Double } else { Prefactor::Single };
    Ok((tables, SubcriticalSummary { fits, limit, stable }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::synthesize_birth_potential;

    #[test]
    fn coupling_is_exact() {
        let r = ScalingRegime::new_supercritical(0.675).unwrap();
        for n in [16, 32, 48] {
            let (nb, t) = couple(&r, n).unwrap();
            assert_eq!(t, n as f64 / nb as f64);
            assert!(t > 1.0);
        }
        let (nb, t) = couple(&ScalingRegime::new_subcritical(0.5, -1.0).unwrap(), 16).unwrap();
        assert_eq!((nb, t), (21, 16.0 / 21.0));
    }

    #[test]
    fn small_filling_gives_vanishing_kernel() {
        let ctx = PrecisionContext::default();
        let (v, report) = synthesize_birth_potential(3.0, 1, &ctx).unwrap();
        // u = 0.3: ū = 0, the model kernel vanishes identically
        let u_plus = 0.3 / (2.0 * report.phi_at_xstar);
        let cfg = ExperimentConfig {
            regime: ScalingRegime::new_supercritical(u_plus).unwrap(),
            n_list: vec![8, 16],
            grid: crate::lab::GridSpec { lo: -1.0, hi: 1.0, points: 3 },
            ..ExperimentConfig::default()
        };
        let (rows, summary) = run_universality_sweep(&cfg, &v, &report).unwrap();
        assert_eq!(summary.ubar, 0);
        assert!(rows.iter().all(|r| r.k_model == 0.0));
        assert_eq!(rows.len(), 18);
        let diag = rows.iter().find(|r| r.z == r.zprime).unwrap();
        assert!(diag.k_scaled > 0.0);
    }
}
