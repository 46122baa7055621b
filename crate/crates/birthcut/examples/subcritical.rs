//! Subcritical side (t < 1): the kernel at x* is exponentially small and,
//! after the e^{c} or e^{2c} prefactor, approaches a Gaussian profile.

use birthcut::lab::{run_subcritical_sweep, ExperimentConfig, Prefactor, ScalingRegime};
use birthcut::numerics::PrecisionContext;

fn main() -> birthcut::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.regime = ScalingRegime::new_subcritical(0.5, -1.0)?;
    let (v, report) = cfg.potential.resolve(&PrecisionContext::default())?;

    let (_, summary) = run_subcritical_sweep(&cfg, &v, &report)?;
    println!("limit constant = {:.6e}", summary.limit);
    for p in [Prefactor::Single, Prefactor::Double] {
        println!("prefactor {}", p.label());
        for f in summary.fits_for(p) {
            println!(
                "  n = {:3}  t = {:.5}  c* = {:+.4}  C = {:.6e}  C/limit_t = {:.4}  var = {:.3e}  local var = {}",
                f.n,
                f.t,
                f.c_star,
                f.constant,
                f.constant / f.limit_t,
                f.variance,
                f.local_variance.map_or("-".to_string(), |v| format!("{v:.3e}"))
            );
        }
    }
    println!("stable prefactor: {}", summary.stable.label());
    Ok(())
}
