//! Gaussian rules on a finite interval and adaptive node doubling.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

use gauss_quad::legendre::GaussLegendre;

use super::{Interval, PrecisionContext};
use crate::{Error, Result};

/// Weight attached to a rule on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    /// `1` (Gauss–Legendre).
    Plain,
    /// `√((b−x)(x−a))` (Gauss–Chebyshev, second kind).
    SqrtEndpoints,
    /// `1/√((b−x)(x−a))` (Gauss–Chebyshev, first kind).
    ChebyshevFirstKind,
}

/// Nodes and positive weights on a concrete interval. The kind's weight
/// function is folded into `weights`, so `Σ wᵢ f(xᵢ)` approximates
/// `∫ f(x)·weight(x) dx`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub kind: QuadKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

thread_local! {
    static LEGENDRE: RefCell<HashMap<usize, Rc<Vec<(f64, f64)>>>> = RefCell::new(HashMap::new());
}

fn legendre(n: usize) -> Rc<Vec<(f64, f64)>> {
    LEGENDRE.with(|cache| {
        cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let rule = GaussLegendre::new(n).expect("n >= 2");
                Rc::new(rule.as_node_weight_pairs().to_vec())
            })
            .clone()
    })
}

impl QuadratureRule {
    pub fn new(kind: QuadKind, n: usize, iv: Interval) -> Self {
        let n = n.max(2);
        let (c, r) = (iv.center(), iv.radius());
        let (nodes, weights) = match kind {
            QuadKind::Plain => legendre(n).iter().map(|&(x, w)| (c + r * x, r * w)).unzip(),
            QuadKind::SqrtEndpoints => (1..=n)
                .map(|k| {
                    let th = k as f64 * PI / (n + 1) as f64;
                    let s = th.sin();
                    (c + r * th.cos(), r * r * PI / (n + 1) as f64 * s * s)
                })
                .unzip(),
            QuadKind::ChebyshevFirstKind => (1..=n)
                .map(|k| {
                    let th = (2 * k - 1) as f64 * PI / (2 * n) as f64;
                    (c + r * th.cos(), PI / n as f64)
                })
                .unzip(),
        };
        Self { kind, nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `∫ f(x)·weight(x) dx` over `iv` with the weight named by `kind`, doubling
/// nodes until two successive estimates agree.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, iv: Interval, kind: QuadKind, ctx: &PrecisionContext) -> Result<f64> {
    let mut n = 16;
    let (mut prev, _) = weighted_sum(&QuadratureRule::new(kind, n, iv), &mut f);
    loop {
        n *= 2;
        let (est, l1) = weighted_sum(&QuadratureRule::new(kind, n, iv), &mut f);
        // roundoff floor: cancellation in Σ wᵢ fᵢ cannot be resolved below ~ε·Σ|wᵢ fᵢ|
        if ctx.agree(est, prev) || (est - prev).abs() <= 64.0 * f64::EPSILON * l1 {
            return Ok(est);
        }
        if n >= ctx.max_nodes {
            return Err(Error::NonConvergence { nodes: n, prev, last: est });
        }
        prev = est;
    }
}

fn weighted_sum<F: FnMut(f64) -> f64>(rule: &QuadratureRule, f: &mut F) -> (f64, f64) {
    rule.nodes.iter().zip(&rule.weights).fold((0.0, 0.0), |(s, l1), (&x, &w)| {
        let v = w * f(x);
        (s + v, l1 + v.abs())
    })
}

/// Plain `∫ f` over `iv` for integrands with structure of width `width` at
/// `pole`: the interval is split at `pole` and graded geometrically toward it.
pub fn integrate_graded<F: FnMut(f64) -> f64>(
    mut f: F,
    iv: Interval,
    pole: f64,
    width: f64,
    ctx: &PrecisionContext,
) -> Result<f64> {
    let p = pole.clamp(iv.lo(), iv.hi());
    let floor = width.abs().max(1e-14 * iv.width()) * 0.25;
    // nodes within distance d of the pole carry relative error ~ ε|p|/d in s − p
    let scale = p.abs() + iv.radius();
    let piece_ctx = |d: f64| ctx.with_tol(ctx.abs_tol, ctx.rel_tol.max(64.0 * f64::EPSILON * scale / d));
    let mut total = 0.0;
    for (far, sign) in [(iv.lo(), -1.0), (iv.hi(), 1.0)] {
        let mut d = (far - p).abs();
        if d == 0.0 {
            continue;
        }
        let mut outer = far;
        while d > floor {
            d *= 0.25;
            let inner = p + sign * d;
            let piece = Interval::new(inner.min(outer), inner.max(outer))?;
            total += integrate(&mut f, piece, QuadKind::Plain, &piece_ctx(d))?;
            outer = inner;
        }
        let piece = Interval::new(p.min(outer), p.max(outer))?;
        total += integrate(&mut f, piece, QuadKind::Plain, &piece_ctx(width.abs().max(d)))?;
    }
    Ok(total)
}

/// Principal value `PV ∫ f(x)·weight(x)/(x − pole) dx` for `f` smooth near
/// the pole. The value `f(pole)` is subtracted and its bare-weight principal
/// value added back in closed form.
pub fn integrate_pv<F: Fn(f64) -> f64>(
    f: F,
    pole: f64,
    iv: Interval,
    kind: QuadKind,
    ctx: &PrecisionContext,
) -> Result<f64> {
    if !iv.interior(pole) {
        return Err(Error::PoleOnBoundary { pole });
    }
    let fp = f(pole);
    let h = 1e-4 * iv.radius();
    let slope = (f(pole + h) - f(pole - h)) / (2.0 * h);
    let near = 1e-7 * iv.radius();
    let smooth = |x: f64| {
        let d = x - pole;
        if d.abs() < near {
            slope
        } else {
            (f(x) - fp) / d
        }
    };
    let body = integrate(smooth, iv, kind, ctx)?;
    let c = iv.center();
    let bare = match kind {
        QuadKind::Plain => ((iv.hi() - pole) / (pole - iv.lo())).ln(),
        QuadKind::SqrtEndpoints => -PI * (pole - c),
        QuadKind::ChebyshevFirstKind => 0.0,
    };
    Ok(body + fp * bare)
}
