//! The approximate t > 1 measure: main band plus a newborn band at x*.

use birthcut::ansatz::{build_params, rho_tilde};
use birthcut::equilibrium::{solve_one_cut, synthesize_birth_potential};
use birthcut::lab::{ansatz_stability, spread};
use birthcut::numerics::PrecisionContext;

fn main() -> birthcut::Result<()> {
    let ctx = PrecisionContext::default();
    let (v, report) = synthesize_birth_potential(3.0, 1, &ctx)?;
    for dt in [1e-2, 1e-3, 1e-4] {
        let p = build_params(&report, dt, 1000, &ctx)?;
        println!(
            "dt = {dt:e}: main [{:.8}, {:.8}], newborn [{:.6}, {:.6}], total mass {:.10}, rho(0) = {:.6}",
            p.main_band().lo(),
            p.main_band().hi(),
            p.newborn_band().lo(),
            p.newborn_band().hi(),
            p.total_mass(),
            rho_tilde(0.0, &p, &report)
        );
    }
    let m1 = solve_one_cut(&v, 1.0, &ctx)?;
    for (name, vals) in ansatz_stability(&report, &v, &m1, 5.0, &ctx)? {
        println!("{name:>18}: residual/(dt/|log dt|) = {:+.4} {:+.4} {:+.4}  spread {:.3}", vals[0], vals[1], vals[2], spread(&vals));
    }
    Ok(())
}
