use super::{Interval, PrecisionContext};
use crate::{Error, Result};

/// Root of `f` in a sign-changing bracket: Illinois-weighted secant steps,
/// falling back to bisection whenever a step fails to halve the bracket.
/// Stops when `|f| ≤ abs_tol` or the bracket collapses to a few ulps.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: Interval, ctx: &PrecisionContext) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo(), bracket.hi());
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange { lo: a, hi: b, flo: fa, fhi: fb });
    }
    let (mut ga, mut gb) = (fa, fb);
    let mut last_side = 0i8;
    let mut force_bisect = false;
    for _ in 0..400 {
        let width = b - a;
        if width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        let mut x = if force_bisect { 0.5 * (a + b) } else { a - ga * (b - a) / (gb - ga) };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 || fx.abs() <= ctx.abs_tol {
            return Ok(x);
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
            ga = fx;
            if last_side == -1 {
                gb *= 0.5;
            }
            last_side = -1;
        } else {
            b = x;
            fb = fx;
            gb = fx;
            if last_side == 1 {
                ga *= 0.5;
            }
            last_side = 1;
        }
        force_bisect = b - a > 0.5 * width;
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tight() -> PrecisionContext {
        PrecisionContext::default().with_tol(1e-15, 1e-15)
    }

    #[test]
    fn classic_roots() {
        let r = find_root(|x| x * x - 2.0, Interval::new(1.0, 2.0).unwrap(), &tight()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        let r = find_root(f64::cos, Interval::new(1.0, 2.0).unwrap(), &tight()).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn needs_sign_change() {
        let e = find_root(|x| x * x + 1.0, Interval::new(-1.0, 1.0).unwrap(), &tight());
        assert!(matches!(e, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn flat_odd_root_is_resolved() {
        // triple root: tolerance in f alone would stop far from the root
        let ctx = PrecisionContext::default().with_tol(1e-300, 0.0);
        let r = find_root(|x| (x - 0.3).powi(3), Interval::new(0.0, 1.0).unwrap(), &ctx).unwrap();
        assert!((r - 0.3).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn nested_brackets_agree(c in 0.2f64..0.8, w1 in 0.05f64..0.2, w2 in 0.01f64..0.05) {
            let f = |x: f64| (x - c) * (1.0 + x * x) + 0.1 * (x - c).powi(3);
            let ctx = tight();
            let r1 = find_root(f, Interval::new(c - w1, c + 1.3 * w1).unwrap(), &ctx).unwrap();
            let r2 = find_root(f, Interval::new(c - w2, c + 0.7 * w2).unwrap(), &ctx).unwrap();
            prop_assert!((r1 - r2).abs() < 1e-14);
        }
    }
}
