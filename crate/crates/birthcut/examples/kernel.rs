//! Orthogonal polynomials for e^{-x²} and e^{-N V}, and their
//! Christoffel–Darboux kernels.

use birthcut::equilibrium::synthesize_birth_potential;
use birthcut::orthopoly::{correlation_det, model_kernel, precision_schedule, KernelEvaluator, WeightSpec};
use birthcut::numerics::PrecisionContext;

fn main() -> birthcut::Result<()> {
    let qctx = PrecisionContext::default();
    let ctx = PrecisionContext::with_bits(128);
    let ev = KernelEvaluator::new(WeightSpec::model(1, 0.0)?, 8, &ctx)?;
    for k in [1, 4, 7] {
        println!("hermite: b_{k} = {:.15} (k/2 = {})", ev.table.b(k), k as f64 / 2.0);
    }
    println!("trace of K_8 = {:.12}", ev.trace(&qctx)?);
    println!("reproducing residual = {:.3e}", ev.reproducing_residual(0.3, -0.8, &qctx)?);
    let pts = [-0.5, 0.0, 0.7];
    println!("det[K_8(x_i, x_j)] = {:.6e}", correlation_det(|x, y| ev.eval(x, y), &pts)?);
    println!("K^2_1(0, 0) = {:.12}", model_kernel(2, 1, 0.0, 0.0, &qctx)?);

    let (v, report) = synthesize_birth_potential(3.0, 1, &qctx)?;
    let n = 24;
    let ctx = PrecisionContext::with_bits(precision_schedule(n));
    let ens = KernelEvaluator::new(WeightSpec::ensemble(v, 23)?, n, &ctx)?;
    println!("ensemble n = {n}, N = 23 at {} bits:", ctx.bits);
    for x in [0.0, 1.5, 2.5, report.x_star] {
        println!("  K({x:.3}, {x:.3}) = {:.6e}", ens.eval(x, x));
    }
    Ok(())
}
