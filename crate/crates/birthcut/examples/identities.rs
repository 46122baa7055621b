//! The identity suite: closed forms and jump relations checked at desk scale.

use birthcut::lab::{run_identity_suite, IdentityOptions};

fn main() -> birthcut::Result<()> {
    let rows = run_identity_suite(IdentityOptions::default())?;
    for r in &rows {
        println!("{:<5} {:<20} {:<44} {:.3e} (tol {:.1e})", if r.pass { "ok" } else { "FAIL" }, r.suite, r.case, r.residual, r.tolerance);
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!("{} rows, {failed} failed", rows.len());
    Ok(())
}
