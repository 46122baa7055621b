//! Scalar Riemann–Hilbert objects: the g-function, the Abelian map `F`, the
//! Szegő-type function `K`, the global parametrix `Π`, `S^∞`, the local
//! conformal map with `(τ_t, Z_t)`, and a jump-residual harness.

mod local;
mod szego;

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::ansatz::AnsatzParams;
use crate::equilibrium::{OneCutMeasure, Potential};
use crate::numerics::{cheb_coeffs, ChebMeasure, Interval, Polynomial, Side};
use crate::{Error, Result};

pub use local::{cauchy_parametrix, c_star_quadrature, conformal_zeta, tau_z, ConformalMap, TauRegime, TauZ};
pub use szego::{szego_k, szego_k0, szego_k_boundary, SzegoSeries};

pub type CMat = Matrix2<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Supercritical,
    Subcritical,
}

/// `g^t`: log-integral of the main band (with the mass correction) plus the
/// point charge `u_t/n` at `x*` when `t > 1`; the plain equilibrium
/// log-integral when `t ≤ 1`.
#[derive(Debug, Clone)]
pub struct GFunction {
    regime: Regime,
    main: ChebMeasure,
    t: f64,
    l_tilde: f64,
    u_t: f64,
    n: f64,
    x_star: f64,
    delta_t: f64,
    iota_t: f64,
}

impl GFunction {
    /// Supercritical `g` from the ansatz and the `t = 1` measure (for `l̃`).
    pub fn supercritical(params: &AnsatzParams, m1: &OneCutMeasure) -> Result<Self> {
        let iv = params.main_band();
        let (a, b) = (iv.lo(), iv.hi());
        // unit-mass semicircle density on the main band
        let unit = ChebMeasure::from_polynomial_density(iv, &Polynomial::constant(8.0 / (PI * (b - a) * (b - a))));
        let shift = params.iota_t * params.delta_t / params.delta_t.ln();
        let main = params.main_measure().combine(1.0, &unit, -shift);
        Ok(Self {
            regime: Regime::Supercritical,
            main,
            t: params.t,
            l_tilde: m1.l_t(),
            u_t: params.u_t,
            n: params.n as f64,
            x_star: params.x_star,
            delta_t: params.delta_t,
            iota_t: params.iota_t,
        })
    }

    pub fn subcritical(m: &OneCutMeasure, n: u64, x_star: f64) -> Result<Self> {
        if m.t() > 1.0 {
            return Err(Error::Precondition(format!("subcritical g needs t <= 1, got {}", m.t())));
        }
        Ok(Self {
            regime: Regime::Subcritical,
            main: m.measure().clone(),
            t: m.t(),
            l_tilde: m.l_t() * m.t(),
            u_t: 0.0,
            n: n as f64,
            x_star,
            delta_t: m.t() - 1.0,
            iota_t: 0.0,
        })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Constant with `g₊ + g₋ − V/t − l̃/t = 0` to leading order on the band.
    pub fn l_tilde(&self) -> f64 {
        self.l_tilde
    }

    pub fn u_t(&self) -> f64 {
        self.u_t
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn x_star(&self) -> f64 {
        self.x_star
    }

    pub fn iota_t(&self) -> f64 {
        self.iota_t
    }

    pub fn band(&self) -> Interval {
        self.main.support()
    }

    /// Main-band part `g₁`.
    pub fn main_measure(&self) -> &ChebMeasure {
        &self.main
    }

    /// Main-band mass plus `u_t/n`.
    pub fn total_mass(&self) -> f64 {
        self.main.mass() + self.u_t / self.n
    }

    fn charge(&self, x: Complex64) -> Complex64 {
        if self.u_t == 0.0 {
            return c(0.0);
        }
        self.u_t / self.n * (x - self.x_star).ln()
    }

    /// `g₁(x)`, the main-band log-integral.
    pub fn g1(&self, x: Complex64) -> Complex64 {
        self.main.log_potential(x)
    }

    /// `(g₊ + g₋)/2` on the real line, which is `Re g` there.
    pub fn g_real(&self, x: f64) -> f64 {
        let charge = if self.u_t == 0.0 { 0.0 } else { self.u_t / self.n * (x - self.x_star).abs().ln() };
        self.main.log_potential_real(x) + charge
    }

    /// Variational residual `g₊ + g₋ − V/t − l̃/t` at real `x`.
    pub fn variational(&self, v: &Potential, x: f64) -> f64 {
        2.0 * self.g_real(x) - v.eval(x) / self.t - self.l_tilde / self.t
    }

    /// `D_n(x) = (n/2)(g₊ + g₋ − V/t − l̃/t)` on the band, `0` when `t ≤ 1`.
    pub fn d_n(&self, v: &Potential, x: f64) -> f64 {
        match self.regime {
            Regime::Subcritical => 0.0,
            Regime::Supercritical => 0.5 * self.n * self.variational(v, x),
        }
    }
}

/// `g^t(x)`, principal branches.
pub fn g_eval(gf: &GFunction, x: Complex64) -> Complex64 {
    gf.g1(x) + gf.charge(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GineqRow {
    pub x: f64,
    pub on_band: bool,
    /// Band: `(g₊+g₋−V/t−l̃/t)·(log δt/δt)` (unscaled when `t ≤ 1`).
    /// Off band: `g₊+g₋−V/t−l̃/t`, expected negative.
    pub residual: f64,
}

pub fn gineq_residuals(gf: &GFunction, v: &Potential, grid: &[f64]) -> Vec<GineqRow> {
    let band = gf.band();
    let scale = match gf.regime {
        Regime::Supercritical => gf.delta_t.ln() / gf.delta_t,
        Regime::Subcritical => 1.0,
    };
    grid.iter()
        .map(|&x| {
            let on_band = band.interior(x);
            let r = gf.variational(v, x);
            GineqRow { x, on_band, residual: if on_band { r * scale } else { r } }
        })
        .collect()
}

/// Band grid avoiding collars of radius `collar` at `±2` and at the band ends.
pub fn band_grid(gf: &GFunction, points: usize, collar: f64) -> Vec<f64> {
    gf.band()
        .samples(points, collar)
        .into_iter()
        .filter(|x| (x - 2.0).abs() >= collar && (x + 2.0).abs() >= collar)
        .collect()
}

fn ratio_root(x: Complex64, alpha: f64, beta: f64) -> Complex64 {
    (x - alpha).sqrt() * (x - beta).sqrt() / (x - beta)
}

/// `F(x) = log((A − √((x−α)/(x−β)))/(A + √((x−α)/(x−β))))`, with
/// `A = √((x*−α)/(x*−β))` and `√((x−α)/(x−β)) = √(x−α)√(x−β)/(x−β)`.
pub fn f_map(x: Complex64, alpha: f64, beta: f64, x_star: f64) -> Result<Complex64> {
    if x == c(x_star) {
        return Err(Error::Singular { x: x_star });
    }
    let a = ((x_star - alpha) / (x_star - beta)).sqrt();
    let r = ratio_root(x, alpha, beta);
    Ok(((a - r) / (a + r)).ln())
}

/// `F₀ = log((A − 1)/(A + 1))`.
pub fn f0(alpha: f64, beta: f64, x_star: f64) -> f64 {
    let a = ((x_star - alpha) / (x_star - beta)).sqrt();
    ((a - 1.0) / (a + 1.0)).ln()
}

/// `γ(x) = ((x−β)/(x−α))^{1/4}`, cut on `[α, β]`.
pub fn gamma(x: Complex64, alpha: f64, beta: f64) -> Complex64 {
    ((x - beta) / (x - alpha)).powf(0.25)
}

fn check_off_cut(x: Complex64, alpha: f64, beta: f64) -> Result<()> {
    if x.im == 0.0 && x.re >= alpha && x.re <= beta {
        return Err(Error::OnCut { x: x.re });
    }
    Ok(())
}

/// `Π(x)`.
pub fn pi_matrix(x: Complex64, alpha: f64, beta: f64) -> Result<CMat> {
    check_off_cut(x, alpha, beta)?;
    let g = gamma(x, alpha, beta);
    let (p, m) = ((g + 1.0 / g) / 2.0, (g - 1.0 / g) / (2.0 * I));
    Ok(CMat::new(p, m, -m, p))
}

/// Constants and evaluators of the global parametrix.
#[derive(Debug, Clone)]
pub struct ParametrixFrame {
    pub alpha: f64,
    pub beta: f64,
    pub x_star: f64,
    pub f0: f64,
    pub k0: f64,
    pub u: f64,
    pub ubar: u64,
    pub szego: SzegoSeries,
}

impl ParametrixFrame {
    /// Frame for `t > 1`; `D_n` is sampled from the g-function residual.
    pub fn supercritical(gf: &GFunction, v: &Potential, params: &AnsatzParams) -> Result<Self> {
        let band = gf.band();
        let szego = SzegoSeries::from_fn(|x| gf.d_n(v, x), band);
        Ok(Self {
            alpha: band.lo(),
            beta: band.hi(),
            x_star: params.x_star,
            f0: f0(band.lo(), band.hi(), params.x_star),
            k0: szego.k0(),
            u: params.u_t,
            ubar: params.ubar_t,
            szego,
        })
    }

    /// Frame for `t ≤ 1`: `K ≡ 0` and `u = ū = 0`.
    pub fn subcritical(m: &OneCutMeasure, x_star: f64) -> Self {
        let band = m.support();
        Self {
            alpha: band.lo(),
            beta: band.hi(),
            x_star,
            f0: f0(band.lo(), band.hi(), x_star),
            k0: 0.0,
            u: 0.0,
            ubar: 0,
            szego: SzegoSeries::zero(band),
        }
    }

    pub fn excess(&self) -> f64 {
        self.u - self.ubar as f64
    }

    pub fn d_n(&self, x: f64) -> f64 {
        self.szego.d(x)
    }
}

/// `S^∞(x) = e^{(K₀+(u−ū)F₀)σ₃} Π(x) e^{−(K(x)+(u−ū)F(x))σ₃}`.
pub fn global_parametrix(x: Complex64, frame: &ParametrixFrame) -> Result<CMat> {
    let pi = pi_matrix(x, frame.alpha, frame.beta)?;
    let du = frame.excess();
    let fx = if du == 0.0 { c(0.0) } else { f_map(x, frame.alpha, frame.beta, frame.x_star)? };
    let left = c(frame.k0 + du * frame.f0);
    let right = frame.szego.eval(x) + du * fx;
    Ok(sigma3_exp(left) * pi * sigma3_exp(-right))
}

/// `e^{aσ₃}`.
pub fn sigma3_exp(a: Complex64) -> CMat {
    CMat::new(a.exp(), c(0.0), c(0.0), (-a).exp())
}

/// One verified jump relation at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpResidual {
    pub object: String,
    pub piece: String,
    pub point: f64,
    pub eps: Vec<f64>,
    pub residual: f64,
}

/// Default offsets for boundary values.
pub const EPS_LIST: [f64; 3] = [1e-4, 1e-5, 1e-6];

/// Values that can be combined linearly by the extrapolation.
pub trait Linear: Clone {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self;
}

impl Linear for f64 {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        a * self + b * other
    }
}

impl Linear for Complex64 {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        a * self + b * other
    }
}

impl Linear for CMat {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        self.map(|z| z * a) + other.map(|z| z * b)
    }
}

/// Neville extrapolation of `(ε_i, v_i)` to `ε = 0`.
pub fn extrapolate<T: Linear>(eps: &[f64], vals: &[T]) -> T {
    let mut p: Vec<T> = vals.to_vec();
    let n = eps.len();
    for m in 1..n {
        for i in 0..n - m {
            let (ei, ej) = (eps[i], eps[i + m]);
            // P(0) from the two neighbouring interpolants
            p[i] = p[i + 1].lin(ei / (ei - ej), &p[i], -ej / (ei - ej));
        }
    }
    p[0].clone()
}

/// Boundary value of `f` at `x` from `side`, extrapolated over `eps`.
pub fn boundary_value<T: Linear, F>(f: F, x: f64, side: Side, eps: &[f64]) -> Result<T>
where
    F: Fn(Complex64) -> Result<T>,
{
    let vals = eps.iter().map(|e| f(Complex64::new(x, side.sign() * e))).collect::<Result<Vec<T>>>()?;
    Ok(extrapolate(eps, &vals))
}

fn mat_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn row(object: &str, piece: &str, x: f64, residual: f64) -> JumpResidual {
    JumpResidual { object: object.into(), piece: piece.into(), point: x, eps: EPS_LIST.to_vec(), residual }
}

/// Scalar jump check: `|combine(f₊, f₋) − expect(x)|`.
pub fn scalar_jump<F, G>(object: &str, piece: &str, x: f64, f: F, relation: G) -> Result<JumpResidual>
where
    F: Fn(Complex64) -> Result<Complex64>,
    G: Fn(Complex64, Complex64) -> Complex64,
{
    let up = boundary_value(&f, x, Side::Upper, &EPS_LIST)?;
    let dn = boundary_value(&f, x, Side::Lower, &EPS_LIST)?;
    Ok(row(object, piece, x, relation(up, dn).norm()))
}

/// Matrix jump check: `|M₋⁻¹M₊ − J(x)|`.
pub fn matrix_jump<F, J>(object: &str, piece: &str, x: f64, f: F, jump: J) -> Result<JumpResidual>
where
    F: Fn(Complex64) -> Result<CMat>,
    J: Fn(f64) -> CMat,
{
    let up = boundary_value(&f, x, Side::Upper, &EPS_LIST)?;
    let dn = boundary_value(&f, x, Side::Lower, &EPS_LIST)?;
    let inv = dn.try_inverse().ok_or(Error::Singular { x })?;
    Ok(row(object, piece, x, mat_norm(&(inv * up - jump(x)))))
}

/// `k` points spread over the open interval `(lo, hi)`.
fn spread(lo: f64, hi: f64, k: usize, collar: f64) -> Vec<f64> {
    Interval::new(lo, hi).map(|iv| iv.samples(k, collar)).unwrap_or_default()
}

/// Every jump relation of `g`, `F`, `K`, `Π` and `S^∞` for a supercritical
/// frame, at `per_piece` points on each contour piece.
pub fn jump_suite(gf: &GFunction, frame: &ParametrixFrame, per_piece: usize) -> Result<Vec<JumpResidual>> {
    let (a, b, xs) = (frame.alpha, frame.beta, frame.x_star);
    let collar = 0.02 * (b - a);
    let band = spread(a, b, per_piece, collar);
    let gap = spread(b, xs, per_piece, 0.05 * (xs - b));
    let left = spread(a - 3.0, a, per_piece, 0.1);
    let right = spread(xs, xs + 3.0, per_piece, 0.1);
    let mut out = Vec::new();
    for &x in &left {
        out.push(scalar_jump("g", "(-inf,alpha)", x, |z| Ok(g_eval(gf, z)), |p, m| p - m - 2.0 * PI * I)?);
    }
    let un = gf.u_t() / gf.n();
    for &x in &gap {
        out.push(scalar_jump("g", "(beta,x*)", x, |z| Ok(g_eval(gf, z)), |p, m| p - m - 2.0 * PI * I * un)?);
    }
    for &x in &band {
        out.push(scalar_jump("F", "(alpha,beta)", x, |z| f_map(z, a, b, xs), |p, m| p + m)?);
    }
    for &x in &gap {
        out.push(scalar_jump("F", "(beta,x*)", x, |z| f_map(z, a, b, xs), |p, m| p - m - 2.0 * PI * I)?);
    }
    for &x in left.iter().chain(&right) {
        out.push(scalar_jump("F", "off [alpha,x*]", x, |z| f_map(z, a, b, xs), |p, m| p - m)?);
    }
    for &x in &band {
        let d = frame.d_n(x);
        out.push(scalar_jump("K", "(alpha,beta)", x, |z| Ok(frame.szego.eval(z)), |p, m| p + m - 2.0 * d)?);
    }
    let j0 = CMat::new(c(0.0), c(1.0), c(-1.0), c(0.0));
    for &x in &band {
        out.push(matrix_jump("Pi", "(alpha,beta)", x, |z| pi_matrix(z, a, b), |_| j0)?);
    }
    let u = frame.u;
    for &x in &gap {
        out.push(matrix_jump(
            "S_inf",
            "(beta,x*)",
            x,
            |z| global_parametrix(z, frame),
            |_| CMat::new((-2.0 * PI * I * u).exp(), c(0.0), c(0.0), (2.0 * PI * I * u).exp()),
        )?);
    }
    for &x in &band {
        let d = frame.d_n(x);
        out.push(matrix_jump(
            "S_inf",
            "(alpha,beta)",
            x,
            |z| global_parametrix(z, frame),
            |_| CMat::new(c(0.0), c((2.0 * d).exp()), c(-(-2.0 * d).exp()), c(0.0)),
        )?);
    }
    Ok(out)
}

/// `object,piece,point,residual` with a `#` header.
pub fn jumps_to_csv(rows: &[JumpResidual]) -> String {
    let mut s = String::from("# eps: 1e-4,1e-5,1e-6 (Neville extrapolated)\nobject,piece,point,residual\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:e},{:e}", r.object, r.piece, r.point, r.residual);
    }
    s
}

/// Chebyshev coefficients of `f` on `iv`, adaptive length.
pub(crate) fn cheb_fit<F: Fn(f64) -> f64>(f: F, iv: Interval) -> Vec<f64> {
    let (c0, r) = (iv.center(), iv.radius());
    let g = |s: f64| f(c0 + r * s);
    let mut m = 16;
    loop {
        let coef = cheb_coeffs(g, m);
        let head = coef.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        let tail = coef[m - 3..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if tail <= 1e-15 * head || m >= 2048 {
            let mut coef = coef;
            while coef.len() > 1 && coef.last().is_some_and(|v| v.abs() <= 1e-17 * head) {
                coef.pop();
            }
            return coef;
        }
        m *= 2;
    }
}
