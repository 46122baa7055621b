//! Monic orthogonal polynomials for `e^{−NV(x)}` and `e^{−x^{2ν}+τx}` in
//! extended precision, Christoffel–Darboux kernels, correlation determinants
//! and weighted Cauchy transforms.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::equilibrium::Potential;
use crate::numerics::{find_root, integrate, integrate_graded, integrate_pv, Interval, Mp, PrecisionContext, QuadKind, Side};
use crate::{Error, Result};

/// Precision used for ensemble weights of degree up to `max_degree`.
pub fn precision_schedule(max_degree: usize) -> u32 {
    (64 + 8 * max_degree as u32).max(128)
}

#[derive(Debug, Clone)]
pub enum WeightSpec {
    /// `e^{−N V(x)}`
    Ensemble { v: Potential, n_big: u64 },
    /// `e^{−x^{2ν} + τx}`
    Model { nu: u32, tau: f64 },
}

impl WeightSpec {
    pub fn ensemble(v: Potential, n_big: u64) -> Result<Self> {
        if n_big == 0 {
            return Err(Error::Precondition("N must be positive".into()));
        }
        Ok(Self::Ensemble { v, n_big })
    }

    pub fn model(nu: u32, tau: f64) -> Result<Self> {
        if nu == 0 || !tau.is_finite() {
            return Err(Error::Precondition(format!("model weight needs nu >= 1 and finite tau (got {nu}, {tau})")));
        }
        Ok(Self::Model { nu, tau })
    }

    pub fn log_weight(&self, x: f64) -> f64 {
        match self {
            Self::Ensemble { v, n_big } => -(*n_big as f64) * v.eval(x),
            Self::Model { nu, tau } => -x.powi(2 * *nu as i32) + tau * x,
        }
    }

    pub fn log_weight_mp(&self, x: &Mp) -> Mp {
        match self {
            Self::Ensemble { v, n_big } => -v.poly().eval_mp(x).mul_f64(*n_big as f64),
            Self::Model { nu, tau } => x.mul_f64(*tau) - x.powi(2 * nu),
        }
    }

    pub fn is_even(&self) -> bool {
        match self {
            Self::Ensemble { v, .. } => v.poly().coeffs().iter().skip(1).step_by(2).all(|c| *c == 0.0),
            Self::Model { tau, .. } => *tau == 0.0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Ensemble { v, n_big } => format!("ensemble N={n_big} V={}", v.poly()),
            Self::Model { nu, tau } => format!("model nu={nu} tau={tau}"),
        }
    }

    /// Finite window outside of which `w(x)(1+|x|)^{2d}` is below
    /// `10^{−(digits+10)}` relative to the peak of `w`.
    pub fn truncation(&self, max_degree: usize, ctx: &PrecisionContext) -> Result<Interval> {
        let reach = match self {
            Self::Ensemble { v, .. } => {
                let c = v.poly().coeffs();
                let lead = v.poly().leading();
                1.0 + c.iter().map(|x| (x / lead).abs()).fold(0.0, f64::max)
            }
            Self::Model { nu, tau } => 2.0 + tau.abs().powf(1.0 / (2 * nu - 1) as f64),
        };
        let scan = Interval::new(-reach, reach)?.samples(4001, 0.0);
        let (x0, peak) = scan
            .iter()
            .map(|&x| (x, self.log_weight(x)))
            .fold((0.0, f64::NEG_INFINITY), |a, p| if p.1 > a.1 { p } else { a });
        let drop = (ctx.digits() + 10.0) * std::f64::consts::LN_10;
        let d = 2.0 * max_degree as f64;
        let excess = |x: f64| self.log_weight(x) + d * (1.0 + x.abs()).ln() - peak + drop;
        let mut ends = [0.0; 2];
        for (slot, dir) in [(0usize, -1.0), (1, 1.0)] {
            let mut step = 0.5;
            let mut inner = x0;
            let mut outer = x0 + dir * step;
            while excess(outer) > 0.0 {
                inner = outer;
                step *= 2.0;
                outer = x0 + dir * step;
                if step > 1e8 {
                    return Err(Error::Precondition("weight does not decay".into()));
                }
            }
            let (lo, hi) = if dir < 0.0 { (outer, inner) } else { (inner, outer) };
            ends[slot] = if excess(inner) > 0.0 {
                find_root(excess, Interval::new(lo, hi)?, &ctx.with_tol(1e-12, 0.0))?
            } else {
                outer
            };
        }
        Interval::new(ends[0], ends[1])
    }
}

/// `π_{k+1} = (x − a_k)π_k − b_kπ_{k−1}`, `h_k = ∫π_k² w`, with `b_0 = 0`.
#[derive(Debug, Clone)]
pub struct RecurrenceTable {
    a: Vec<Mp>,
    b: Vec<Mp>,
    h: Vec<Mp>,
    bits: u32,
    max_degree: usize,
    weight: String,
    window: Interval,
    nodes: usize,
    orthogonality: f64,
}

/// Values at one point needed by the kernel: `π_n, π_{n−1}` and their
/// derivatives, and `√w`.
#[derive(Debug, Clone)]
pub struct PointValues {
    pub x: f64,
    pub p: Mp,
    pub q: Mp,
    pub dp: Mp,
    pub dq: Mp,
    pub sqrt_w: Mp,
}

impl RecurrenceTable {
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn weight(&self) -> &str {
        &self.weight
    }

    pub fn a(&self, k: usize) -> f64 {
        self.a[k].to_f64()
    }

    pub fn b(&self, k: usize) -> f64 {
        self.b[k].to_f64()
    }

    pub fn h(&self, k: usize) -> f64 {
        self.h[k].to_f64()
    }

    pub fn a_mp(&self, k: usize) -> &Mp {
        &self.a[k]
    }

    pub fn b_mp(&self, k: usize) -> &Mp {
        &self.b[k]
    }

    pub fn h_mp(&self, k: usize) -> &Mp {
        &self.h[k]
    }

    /// `max_{j<k} |⟨π_j,π_k⟩|/√(h_j h_k)` on the discretized measure.
    pub fn orthogonality_residual(&self) -> f64 {
        self.orthogonality
    }

    /// `max_k |h_k/(h_0 ∏_{j≤k} b_j) − 1|`.
    pub fn norm_consistency(&self) -> f64 {
        let mut prod = self.h[0].clone();
        let mut worst = 0.0f64;
        for k in 1..self.h.len() {
            prod = prod * &self.b[k];
            worst = worst.max(((&self.h[k] / &prod).to_f64() - 1.0).abs());
        }
        worst
    }

    /// Copy with `b_k` multiplied by `factor`.
    pub fn with_corrupted_b(&self, k: usize, factor: f64) -> Self {
        let mut out = self.clone();
        out.b[k] = out.b[k].mul_f64(factor);
        out
    }

    /// `(π_0(x), …, π_n(x))`.
    pub fn eval_all(&self, x: &Mp, n: usize) -> Vec<Mp> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(Mp::one(self.bits));
        if n >= 1 {
            out.push(x - &self.a[0]);
        }
        for k in 1..n {
            let next = (x - &self.a[k]) * &out[k] - &self.b[k] * &out[k - 1];
            out.push(next);
        }
        out
    }

    pub fn eval(&self, k: usize, x: f64) -> f64 {
        self.eval_all(&Mp::from_f64(x, self.bits), k)[k].to_f64()
    }

    pub fn point_values(&self, w: &WeightSpec, n: usize, x: f64) -> PointValues {
        let xm = Mp::from_f64(x, self.bits);
        let zero = Mp::zero(self.bits);
        let (mut p0, mut p1) = (zero.clone(), Mp::one(self.bits));
        let (mut d0, mut d1) = (zero.clone(), zero);
        for k in 0..n {
            let t = &xm - &self.a[k];
            let p2 = &t * &p1 - &self.b[k] * &p0;
            let d2 = &p1 + &t * &d1 - &self.b[k] * &d0;
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
        }
        PointValues { x, p: p1, q: p0, dp: d1, dq: d0, sqrt_w: (w.log_weight_mp(&xm).mul_f64(0.5)).exp() }
    }

    /// Kernel of degree `n` from two precomputed point values.
    pub fn kernel_from(&self, n: usize, u: &PointValues, v: &PointValues) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let h = &self.h[n - 1];
        let num = if u.x == v.x {
            &u.dp * &u.q - &u.p * &u.dq
        } else {
            (&u.p * &v.q - &v.p * &u.q) / Mp::from_f64(u.x - v.x, self.bits)
        };
        (num / h * &u.sqrt_w * &v.sqrt_w).to_f64()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# weight: {}", self.weight);
        let _ = writeln!(s, "# bits: {}", self.bits);
        let _ = writeln!(s, "# window: [{}, {}] nodes: {}", self.window.lo(), self.window.hi(), self.nodes);
        s.push_str("k,a_k,b_k,h_k\n");
        for k in 0..self.a.len() {
            let _ = writeln!(s, "{k},{:e},{:e},{:e}", self.a(k), self.b(k), self.h(k));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

struct Discrete {
    x: Vec<Mp>,
    w: Vec<Mp>,
}

fn trapezoid(w: &WeightSpec, window: Interval, m: usize, bits: u32) -> Discrete {
    let lo = Mp::from_f64(window.lo(), bits);
    let step = Mp::from_f64(window.hi(), bits) - &lo;
    let step = step / Mp::from_i64(m as i64, bits);
    let mut x = Vec::with_capacity(m + 1);
    let mut wt = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let xi = &lo + &step * Mp::from_i64(i as i64, bits);
        let mut wi = w.log_weight_mp(&xi).exp() * &step;
        if i == 0 || i == m {
            wi = wi.mul_f64(0.5);
        }
        x.push(xi);
        wt.push(wi);
    }
    Discrete { x, w: wt }
}

/// `(a, b, h, π_k values at the nodes)`.
fn stieltjes_discrete(d: &Discrete, n: usize, bits: u32, keep: bool) -> (Vec<Mp>, Vec<Mp>, Vec<Mp>, Vec<Vec<Mp>>) {
    let m = d.x.len();
    let mut prev = vec![Mp::zero(bits); m];
    let mut cur = vec![Mp::one(bits); m];
    let (mut a, mut b, mut h) = (Vec::new(), Vec::new(), Vec::new());
    let mut kept = Vec::new();
    for k in 0..=n {
        let mut hk = Mp::zero(bits);
        let mut xk = Mp::zero(bits);
        for i in 0..m {
            let t = &d.w[i] * &cur[i] * &cur[i];
            xk = xk + &t * &d.x[i];
            hk = hk + t;
        }
        let ak = &xk / &hk;
        let bk = if k == 0 { Mp::zero(bits) } else { &hk / &h[k - 1] };
        let next: Vec<Mp> = (0..m).map(|i| (&d.x[i] - &ak) * &cur[i] - &bk * &prev[i]).collect();
        if keep {
            kept.push(cur.clone());
        }
        a.push(ak);
        b.push(bk);
        h.push(hk);
        prev = std::mem::replace(&mut cur, next);
    }
    (a, b, h, kept)
}

fn rel_gap(x: &Mp, y: &Mp, scale: &Mp) -> f64 {
    ((x - y).abs() / scale).to_f64()
}

/// Discretized Stieltjes procedure on a trapezoid rule over the truncation
/// window, doubling the node count until `a_k, b_k, h_k` settle.
pub fn stieltjes_recurrence(w: &WeightSpec, max_degree: usize, ctx: &PrecisionContext) -> Result<RecurrenceTable> {
    if max_degree < 1 {
        return Err(Error::Precondition("max_degree must be at least 1".into()));
    }
    let bits = ctx.bits;
    let window = w.truncation(max_degree, ctx)?;
    let settle = 10f64.powf(-0.6 * ctx.digits());
    let mut m = 64.max(4 * max_degree);
    let (mut a, mut b, mut h, _) = stieltjes_discrete(&trapezoid(w, window, m, bits), max_degree, bits, false);
    loop {
        if m > ctx.max_nodes {
            return Err(Error::PrecisionExhausted {
                degree: max_degree,
                reason: format!("recurrence did not settle within {} nodes", ctx.max_nodes),
            });
        }
        m *= 2;
        let (a2, b2, h2, _) = stieltjes_discrete(&trapezoid(w, window, m, bits), max_degree, bits, false);
        let mut gap = 0.0f64;
        for k in 0..=max_degree {
            let scale = a2[k].abs() + b2.get(k + 1).map_or_else(|| Mp::one(bits), |x| x.sqrt());
            gap = gap.max(rel_gap(&a[k], &a2[k], &scale));
            gap = gap.max(rel_gap(&h[k], &h2[k], &h2[k]));
            if k > 0 {
                gap = gap.max(rel_gap(&b[k], &b2[k], &b2[k]));
            }
        }
        a = a2;
        b = b2;
        h = h2;
        if gap <= settle {
            break;
        }
    }
    let d = trapezoid(w, window, m, bits);
    let (a, b, h, vals) = stieltjes_discrete(&d, max_degree, bits, true);
    for k in 1..=max_degree {
        if !b[k].is_positive() {
            return Err(Error::PrecisionExhausted { degree: k, reason: format!("b_{k} = {} is not positive", b[k]) });
        }
    }
    let orthogonality = discrete_orthogonality(&d, &vals, &h);
    let limit = 10f64.powf(-ctx.digits() / 2.0);
    if !(orthogonality <= limit) {
        return Err(Error::PrecisionExhausted {
            degree: max_degree,
            reason: format!("orthogonality residual {orthogonality:e} exceeds {limit:e}"),
        });
    }
    Ok(RecurrenceTable { a, b, h, bits, max_degree, weight: w.describe(), window, nodes: m + 1, orthogonality })
}

fn discrete_orthogonality(d: &Discrete, vals: &[Vec<Mp>], h: &[Mp]) -> f64 {
    let n = vals.len();
    (1..n)
        .into_par_iter()
        .map(|k| {
            let mut worst = 0.0f64;
            for j in 0..k {
                let mut s = Mp::zero(h[0].bits());
                for i in 0..d.x.len() {
                    s = s + &d.w[i] * &vals[j][i] * &vals[k][i];
                }
                let r = (s.abs() / (&h[j] * &h[k]).sqrt()).to_f64();
                worst = worst.max(r);
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Orthogonality residual of a table's recurrence re-measured against `w`
/// on the table's own window; exposes corrupted coefficients.
pub fn measured_orthogonality(table: &RecurrenceTable, w: &WeightSpec) -> f64 {
    let m = table.nodes - 1;
    let d = trapezoid(w, table.window, m, table.bits);
    let n = table.max_degree;
    let vals: Vec<Vec<Mp>> = {
        let per_node: Vec<Vec<Mp>> = d.x.iter().map(|x| table.eval_all(x, n)).collect();
        (0..=n).map(|k| per_node.iter().map(|v| v[k].clone()).collect()).collect()
    };
    let h: Vec<Mp> = (0..=n)
        .map(|k| {
            let mut s = Mp::zero(table.bits);
            for i in 0..d.x.len() {
                s = s + &d.w[i] * &vals[k][i] * &vals[k][i];
            }
            s
        })
        .collect();
    discrete_orthogonality(&d, &vals, &h)
}

/// `K_n(x, x′) = √(w(x)w(x′))·(π_n(x)π_{n−1}(x′) − π_n(x′)π_{n−1}(x))/(h_{n−1}(x−x′))`,
/// confluent form on the diagonal.
pub fn cd_kernel(table: &RecurrenceTable, w: &WeightSpec, n: usize, x: f64, xp: f64) -> Result<f64> {
    if n > table.max_degree {
        return Err(Error::Precondition(format!("n = {n} exceeds table degree {}", table.max_degree)));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let u = table.point_values(w, n, x);
    let v = if x == xp { u.clone() } else { table.point_values(w, n, xp) };
    Ok(table.kernel_from(n, &u, &v))
}

/// Kernel evaluator bound to one table, weight and `n`.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    pub table: RecurrenceTable,
    pub weight: WeightSpec,
    pub n: usize,
}

impl KernelEvaluator {
    pub fn new(weight: WeightSpec, n: usize, ctx: &PrecisionContext) -> Result<Self> {
        let table = stieltjes_recurrence(&weight, n.max(1), ctx)?;
        Ok(Self { table, weight, n })
    }

    pub fn point(&self, x: f64) -> PointValues {
        self.table.point_values(&self.weight, self.n, x)
    }

    pub fn eval(&self, x: f64, xp: f64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let u = self.point(x);
        if x == xp {
            return self.table.kernel_from(self.n, &u, &u);
        }
        self.table.kernel_from(self.n, &u, &self.point(xp))
    }

    /// `∫K(x,x)dx` over the truncation window.
    pub fn trace(&self, ctx: &PrecisionContext) -> Result<f64> {
        integrate(|x| self.eval(x, x), self.table.window, QuadKind::Plain, &ctx.with_tol(1e-11, 1e-12))
    }

    /// `|∫K(x,y)K(y,z)dy − K(x,z)|`.
    pub fn reproducing_residual(&self, x: f64, z: f64, ctx: &PrecisionContext) -> Result<f64> {
        let (px, pz) = (self.point(x), self.point(z));
        let lhs = integrate(
            |y| {
                let py = self.point(y);
                self.table.kernel_from(self.n, &px, &py) * self.table.kernel_from(self.n, &py, &pz)
            },
            self.table.window,
            QuadKind::Plain,
            &ctx.with_tol(1e-11, 1e-12),
        )?;
        Ok((lhs - self.table.kernel_from(self.n, &px, &pz)).abs())
    }
}

/// `K_m^ν(z, z′)` for the weight `e^{−x^{2ν}}`.
pub fn model_kernel(nu: u32, m: usize, z: f64, zp: f64, ctx: &PrecisionContext) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    let w = WeightSpec::model(nu, 0.0)?;
    let table = stieltjes_recurrence(&w, m, ctx)?;
    cd_kernel(&table, &w, m, z, zp)
}

/// `det(K(x_j, x_k))`.
pub fn correlation_det<F: Fn(f64, f64) -> f64>(kernel: F, points: &[f64]) -> Result<f64> {
    let m = points.len();
    if m == 0 || m > 6 {
        return Err(Error::Precondition(format!("need 1 to 6 points, got {m}")));
    }
    let mat = DMatrix::from_fn(m, m, |j, k| kernel(points[j], points[k]));
    Ok(mat.determinant())
}

/// Smallest `|Im z|` accepted by the off-axis Cauchy transforms.
pub const AXIS_FLOOR: f64 = 1e-7;

/// `(1/2πi)∫ f(s)/(s−z) ds` over `iv`, by subtracting `f(Re z)`.
pub fn line_cauchy_transform<F: Fn(f64) -> f64>(f: F, iv: Interval, z: Complex64, ctx: &PrecisionContext) -> Result<Complex64> {
    if z.im.abs() < AXIS_FLOOR {
        return Err(Error::TooCloseToAxis { im: z.im });
    }
    let x0 = z.re.clamp(iv.lo(), iv.hi());
    let f0 = f(x0);
    let c = ctx.with_tol(ctx.abs_tol.max(1e-15), ctx.rel_tol);
    let g = |s: f64| (f(s) - f0) / (Complex64::new(s, 0.0) - z);
    let re = integrate_graded(|s| g(s).re, iv, x0, z.im, &c)?;
    let im = integrate_graded(|s| g(s).im, iv, x0, z.im, &c)?;
    let mut acc = Complex64::new(re, im);
    let hi = Complex64::new(iv.hi(), 0.0) - z;
    let lo = Complex64::new(iv.lo(), 0.0) - z;
    acc += f0 * (hi.ln() - lo.ln());
    Ok(acc / Complex64::new(0.0, 2.0 * PI))
}

/// Plemelj boundary value `±½f(x) + (1/2πi) PV∫ f(s)/(s−x) ds`.
pub fn line_cauchy_boundary<F: Fn(f64) -> f64>(f: F, iv: Interval, x: f64, side: Side, ctx: &PrecisionContext) -> Result<Complex64> {
    let pv = integrate_pv(&f, x, iv, QuadKind::Plain, ctx)?;
    Ok(Complex64::new(0.5 * side.sign() * f(x), 0.0) + Complex64::new(pv, 0.0) / Complex64::new(0.0, 2.0 * PI))
}

/// `(1/2πi)∫ π_k(s)w(s)/(s−z) ds`.
pub fn weighted_cauchy_transform(
    table: &RecurrenceTable,
    w: &WeightSpec,
    k: usize,
    z: Complex64,
    ctx: &PrecisionContext,
) -> Result<Complex64> {
    if k > table.max_degree {
        return Err(Error::Precondition(format!("k = {k} exceeds table degree {}", table.max_degree)));
    }
    line_cauchy_transform(|s| weighted_poly(table, w, k, s), table.window, z, ctx)
}

/// Boundary value of [`weighted_cauchy_transform`] on the real line.
pub fn weighted_cauchy_boundary(
    table: &RecurrenceTable,
    w: &WeightSpec,
    k: usize,
    x: f64,
    side: Side,
    ctx: &PrecisionContext,
) -> Result<Complex64> {
    line_cauchy_boundary(|s| weighted_poly(table, w, k, s), table.window, x, side, ctx)
}

fn weighted_poly(table: &RecurrenceTable, w: &WeightSpec, k: usize, s: f64) -> f64 {
    let sm = Mp::from_f64(s, table.bits);
    (table.eval_all(&sm, k)[k].clone() * w.log_weight_mp(&sm).exp()).to_f64()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelMeta {
    pub n: usize,
    pub n_big: u64,
    pub t: f64,
    pub x_star: f64,
    pub phi: f64,
    pub prefactor: String,
}

/// Kernel samples on `z × z′`, row-major in `z`.
#[derive(Debug, Clone)]
pub struct KernelGrid {
    pub z: Vec<f64>,
    pub zp: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: KernelMeta,
}

impl KernelGrid {
    pub fn fill<F: Fn(f64, f64) -> f64 + Sync>(z: Vec<f64>, zp: Vec<f64>, meta: KernelMeta, f: F) -> Self {
        let cols = zp.len();
        let values = (0..z.len() * cols).into_par_iter().map(|i| f(z[i / cols], zp[i % cols])).collect();
        Self { z, zp, values, meta }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.zp.len() + j]
    }

    /// Largest relative asymmetry over index pairs with `z_i = z′_j` and
    /// `z_j = z′_i`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.z.len() {
            for j in 0..self.zp.len() {
                let (Some(jj), Some(ii)) = (
                    self.z.iter().position(|v| *v == self.zp[j]),
                    self.zp.iter().position(|v| *v == self.z[i]),
                ) else {
                    continue;
                };
                let (a, b) = (self.get(i, j), self.get(jj, ii));
                let scale = a.abs().max(b.abs()).max(1e-300);
                worst = worst.max((a - b).abs() / scale);
            }
        }
        worst
    }
}
