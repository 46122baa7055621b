//! Jump relations of the scalar Riemann–Hilbert objects, checked by
//! extrapolated boundary values.

use birthcut::ansatz::build_params;
use birthcut::equilibrium::{solve_one_cut, synthesize_birth_potential};
use birthcut::numerics::PrecisionContext;
use birthcut::rht::{jump_suite, tau_z, GFunction, ParametrixFrame};

fn main() -> birthcut::Result<()> {
    let ctx = PrecisionContext::default();
    let (v, report) = synthesize_birth_potential(3.0, 1, &ctx)?;
    let m1 = solve_one_cut(&v, 1.0, &ctx)?;
    let params = build_params(&report, 1e-3, 2000, &ctx)?;
    let gf = GFunction::supercritical(&params, &m1)?;
    let frame = ParametrixFrame::supercritical(&gf, &v, &params)?;
    let mut worst: Vec<(String, f64)> = Vec::new();
    for j in jump_suite(&gf, &frame, 5)? {
        let key = format!("{} on {}", j.object, j.piece);
        match worst.iter_mut().find(|w| w.0 == key) {
            Some(w) => w.1 = w.1.max(j.residual),
            None => worst.push((key, j.residual)),
        }
    }
    for (key, r) in worst {
        println!("{key:<28} max residual {r:.2e}");
    }
    let tz = tau_z(&gf, &v, &report, 2000)?;
    println!("u_t = {:.6}, Z_t = {:.6}, scaled tau = {:.6}", gf.u_t(), tz.z, tz.tau_scaled()?);
    Ok(())
}
