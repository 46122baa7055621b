//! Supercritical kernel against the finite-ensemble limit for a synthesized
//! ν = 1 potential with filling u ≈ 1.3.

use birthcut::lab::{run_universality_sweep, ExperimentConfig, ScalingRegime};
use birthcut::numerics::PrecisionContext;

fn main() -> birthcut::Result<()> {
    let mut cfg = ExperimentConfig::default();
    let (v, report) = cfg.potential.resolve(&PrecisionContext::default())?;
    let u_plus = 1.3 / (2.0 * report.nu as f64 * report.phi_at_xstar);
    cfg.regime = ScalingRegime::new_supercritical(u_plus)?;

    let (rows, summary) = run_universality_sweep(&cfg, &v, &report)?;
    println!("u = {:.4}, u_bar = {}, U+ = {u_plus:.4}", summary.u, summary.ubar);
    for (n, err) in &summary.sup_err {
        let t = rows.iter().find(|r| r.n == *n).map_or(f64::NAN, |r| r.t);
        println!("n = {n:3}  t = {t:.5}  sup|K_scaled - K_model| = {err:.4e}");
    }
    println!("decreasing: {}", summary.decreasing);
    Ok(())
}
