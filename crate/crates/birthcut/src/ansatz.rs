//! Approximate equilibrium measure for `t = 1 + δt > 1`: a main band on
//! `[α_t, β_t]` and a newborn band `[x* − σ_t, x* + σ_t]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::equilibrium::{arcsine_log_potential, CriticalReport, OneCutMeasure, Potential};
use crate::numerics::{central_binomial, factorial, integrate, ChebMeasure, Interval, Polynomial, PrecisionContext, QuadKind};
use crate::{Error, Result};

/// `δt = t − 1`, restricted to `(0, e⁻¹)` so that `−δt/log δt` is positive
/// and increasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaT(f64);

impl DeltaT {
    pub fn new(d: f64) -> Result<Self> {
        if d > 0.0 && d < (-1f64).exp() {
            Ok(Self(d))
        } else {
            Err(Error::Precondition(format!("delta_t must lie in (0, 1/e), got {d}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `−δt/log δt`.
    pub fn small(self) -> f64 {
        -self.0 / self.0.ln()
    }
}

#[derive(Debug, Clone)]
pub struct AnsatzParams {
    pub delta_t: f64,
    pub t: f64,
    pub n: u64,
    pub x_star: f64,
    pub nu: u32,
    pub alpha_t: f64,
    pub beta_t: f64,
    pub y: f64,
    pub sigma_t: f64,
    /// `H_t` as a polynomial in `x − x*`.
    pub h_coeffs: Polynomial,
    pub iota_t: f64,
    pub u_t: f64,
    pub ubar_t: u64,
    pub xi_minus2: f64,
    pub xi_plus2: f64,
    main: ChebMeasure,
    newborn: ChebMeasure,
    q_poly: Polynomial,
    eta_poly: Polynomial,
}

impl AnsatzParams {
    pub fn small(&self) -> f64 {
        -self.delta_t / self.delta_t.ln()
    }

    pub fn main_band(&self) -> Interval {
        Interval::new(self.alpha_t, self.beta_t).expect("ordered band")
    }

    pub fn newborn_band(&self) -> Interval {
        Interval::new(self.x_star - self.sigma_t, self.x_star + self.sigma_t).expect("ordered band")
    }

    /// `ρ̃` restricted to the main band.
    pub fn main_measure(&self) -> &ChebMeasure {
        &self.main
    }

    pub fn newborn_measure(&self) -> &ChebMeasure {
        &self.newborn
    }

    pub fn total_mass(&self) -> f64 {
        self.main.mass() + self.newborn.mass()
    }

    pub fn h_t(&self, x: f64) -> f64 {
        self.h_coeffs.eval(x - self.x_star)
    }

    /// Asymptotic filling `−n(δt/log δt)·2νφ(x*)`, for comparison with `u_t`.
    pub fn u_asymptotic(&self, phi_at_xstar: f64) -> f64 {
        self.n as f64 * self.small() * 2.0 * self.nu as f64 * phi_at_xstar
    }

    /// Main-band factor of `√q̃` on the real line left of the newborn band.
    fn main_factor(&self, x: f64) -> f64 {
        let xi = x - self.x_star;
        let inner = -(xi * xi - self.sigma_t * self.sigma_t).sqrt();
        self.q_poly.eval(x) * self.h_t(x) * inner + self.eta_poly.eval(x) * self.delta_t
    }
}

/// `H_t(ξ) = Σ_{k<ν} (2k)!/(k!)² y^{2k} s^{k/ν} ξ^{2ν−2−2k}`, `s = −δt/log δt`.
pub fn h_polynomial(nu: u32, y: f64, s: f64) -> Polynomial {
    let mut c = vec![0.0; 2 * nu as usize - 1];
    for k in 0..nu {
        c[(2 * nu - 2 - 2 * k) as usize] = central_binomial(k) * y.powi(2 * k as i32) * s.powf(k as f64 / nu as f64);
    }
    Polynomial::new(c)
}

/// `P(ξ)`: `H_t` with `s = 1`.
pub fn p_polynomial(nu: u32, y: f64) -> Polynomial {
    h_polynomial(nu, y, 1.0)
}

fn h0(report: &CriticalReport, x: f64) -> f64 {
    report.h0(x)
}

/// Polynomial form of `η`, exact on the whole line.
pub fn eta_polynomial(report: &CriticalReport) -> Polynomial {
    let hq = &report.q_poly * &Polynomial::linear_root(report.x_star).pow(2 * report.nu - 1);
    let dp = hq.divided_difference(2.0).scale(1.0 / (2.0 * h0(report, 2.0)));
    let dm = hq.divided_difference(-2.0).scale(1.0 / (2.0 * h0(report, -2.0)));
    &dp - &dm
}

/// `η(x)`: the three-term expression, switching to its polynomial form
/// within `10⁻³` of `±2` where the terms cancel.
pub fn eta(x: f64, report: &CriticalReport) -> f64 {
    if (x - 2.0).abs() < 1e-3 || (x + 2.0).abs() < 1e-3 {
        return eta_polynomial(report).eval(x);
    }
    let p = 2 * report.nu as i32 - 1;
    let xs = report.x_star;
    let qh = report.q(x) * (x - xs).powi(p);
    qh / (2.0 * report.q(2.0) * (2.0 - xs).powi(p) * (x - 2.0))
        + qh / (2.0 * report.q(-2.0) * (2.0 + xs).powi(p) * (x + 2.0))
        - 2.0 / (x * x - 4.0)
}

/// `y = (4ν²φ(x*)(ν−1)!ν!/(Q(x*)√(x*²−4)(2ν)!))^{1/2ν}`.
pub fn y_constant(report: &CriticalReport) -> f64 {
    let nu = report.nu;
    let num = 4.0 * (nu * nu) as f64 * report.phi_at_xstar * factorial(nu - 1) * factorial(nu);
    let den = report.q_at_xstar * (report.x_star * report.x_star - 4.0).sqrt() * factorial(2 * nu);
    (num / den).powf(1.0 / (2.0 * nu as f64))
}

fn check_normalized(report: &CriticalReport) -> Result<()> {
    let s = report.support;
    if (s.lo() + 2.0).abs() > 1e-8 || (s.hi() - 2.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "ansatz needs the t = 1 support normalized to [-2, 2], got [{}, {}]",
            s.lo(),
            s.hi()
        )));
    }
    Ok(())
}

/// All ansatz constants for `δt` and `n`.
pub fn build_params(report: &CriticalReport, delta_t: f64, n: u64, _ctx: &PrecisionContext) -> Result<AnsatzParams> {
    check_normalized(report)?;
    let d = DeltaT::new(delta_t)?;
    let (dt, s) = (d.value(), d.small());
    let nu = report.nu;
    let xs = report.x_star;
    let t = 1.0 + dt;
    let xi_minus2 = 1.0 / h0(report, -2.0);
    let xi_plus2 = 1.0 / h0(report, 2.0);
    let p = 2 * nu as i32 - 1;
    let alpha_t = -2.0 + dt / ((2.0 + xs).powi(p) * report.q(-2.0));
    let beta_t = 2.0 - dt / ((xs - 2.0).powi(p) * report.q(2.0));
    let y = y_constant(report);
    let sigma_t = 2.0 * y * s.powf(1.0 / (2.0 * nu as f64));
    let h_coeffs = h_polynomial(nu, y, s);
    let q_poly = report.q_poly.clone();
    let eta_poly = eta_polynomial(report);

    let mut params = AnsatzParams {
        delta_t: dt,
        t,
        n,
        x_star: xs,
        nu,
        alpha_t,
        beta_t,
        y,
        sigma_t,
        h_coeffs,
        iota_t: 0.0,
        u_t: 0.0,
        ubar_t: 0,
        xi_minus2,
        xi_plus2,
        main: ChebMeasure::from_coeffs(Interval::new(-1.0, 1.0)?, vec![0.0]),
        newborn: ChebMeasure::from_coeffs(Interval::new(-1.0, 1.0)?, vec![0.0]),
        q_poly,
        eta_poly,
    };
    if !(alpha_t < beta_t && beta_t < xs - sigma_t) {
        return Err(Error::Precondition(format!(
            "bands overlap: [{alpha_t}, {beta_t}] and [{}, {}]",
            xs - sigma_t,
            xs + sigma_t
        )));
    }
    let pm = params.clone();
    params.main = ChebMeasure::from_sqrt_density(pm.main_band(), |x| pm.main_factor(x) / (2.0 * t * PI), 1e-16);
    let pn = params.clone();
    params.newborn = ChebMeasure::from_sqrt_density(
        pn.newborn_band(),
        |x| ((x - alpha_t) * (x - beta_t)).sqrt() * pn.q_poly.eval(x) * pn.h_t(x) / (2.0 * t * PI),
        1e-16,
    );
    params.u_t = n as f64 * params.newborn.mass();
    params.ubar_t = if params.u_t >= 0.0 { (params.u_t + 0.5).floor() as u64 } else { 0 };
    params.iota_t = (params.total_mass() - 1.0) * dt.ln() / dt;
    Ok(params)
}

/// `√q̃(x)` with `√((x−α)(x−β))` positive on `(β, ∞)` and the inner root
/// positive on `(x*+σ, ∞)`.
pub fn sqrt_q_tilde(x: Complex64, params: &AnsatzParams, _report: &CriticalReport) -> Complex64 {
    let r = (x - params.alpha_t).sqrt() * (x - params.beta_t).sqrt();
    let xi = x - params.x_star;
    let inner = if xi.norm() == 0.0 {
        Complex64::new(0.0, params.sigma_t)
    } else {
        xi * (1.0 - params.sigma_t * params.sigma_t / (xi * xi)).sqrt()
    };
    let hq = params.q_poly.eval_complex(x) * params.h_coeffs.eval_complex(xi);
    r / 2.0 * (hq * inner + params.eta_poly.eval_complex(x) * params.delta_t)
}

/// `√q(x) = √(x²−4)·Q(x)(x−x*)^{2ν−1}/2` at `t = 1`, for real `x > 2`.
pub fn sqrt_q(x: f64, report: &CriticalReport) -> f64 {
    0.5 * (x * x - 4.0).sqrt() * h0(report, x)
}

/// Piecewise density `ρ̃`.
pub fn rho_tilde(x: f64, params: &AnsatzParams, _report: &CriticalReport) -> f64 {
    params.main.density(x) + params.newborn.density(x)
}

/// `h̃(z) = ∫ρ̃(s) log(z−s) ds` over both bands.
pub fn h_tilde(z: Complex64, params: &AnsatzParams) -> Complex64 {
    params.main.log_potential(z) + params.newborn.log_potential(z)
}

/// `(∫P(ξ)√(4y²−ξ²)dξ, 2πy²P(2y)/ν)`.
pub fn filling_identity(nu: u32, y: f64, ctx: &PrecisionContext) -> Result<(f64, f64)> {
    if nu == 0 || !(y > 0.0) {
        return Err(Error::Precondition(format!("filling identity needs nu >= 1, y > 0 (got {nu}, {y})")));
    }
    let p = p_polynomial(nu, y);
    let lhs = integrate(|xi| p.eval(xi), Interval::new(-2.0 * y, 2.0 * y)?, QuadKind::SqrtEndpoints, ctx)?;
    let rhs = 2.0 * PI * y * y * crate::equilibrium::critical::p_at_2y(nu, y) / nu as f64;
    Ok((lhs, rhs))
}

/// Undivided residual `√q̃ − √q + δt/√(x²−4)` at real `x > x* + σ`.
pub fn sqrt_q_residual(x: f64, params: &AnsatzParams, report: &CriticalReport) -> f64 {
    let a = sqrt_q_tilde(Complex64::new(x, 0.0), params, report).re;
    a - sqrt_q(x, report) + params.delta_t / (x * x - 4.0).sqrt()
}

/// Quotient form `(√q̃ − √q)/δt + 1/√(x²−4)`.
pub fn sqrt_q_quotient_residual(x: f64, params: &AnsatzParams, report: &CriticalReport) -> f64 {
    sqrt_q_residual(x, params, report) / params.delta_t
}

/// `h̃(x) − h(x)/t − (δt/t)·arcsine_log_potential(x)` at real `x > x* + σ`,
/// with `h` the log potential of the `t = 1` measure.
pub fn h_tilde_residual(x: f64, params: &AnsatzParams, m1: &OneCutMeasure) -> f64 {
    let z = Complex64::new(x, 0.0);
    h_tilde(z, params).re - m1.log_potential(z).re / params.t - params.delta_t / params.t * arcsine_log_potential(x)
}

/// Main-band potential at `x*` minus `V(x*)/2t + l̃/2t + δt·φ(x*)`.
pub fn xstar_potential_residual(params: &AnsatzParams, report: &CriticalReport, v: &Potential, m1: &OneCutMeasure) -> f64 {
    let xs = params.x_star;
    let g1 = params.main.log_potential_real(xs);
    g1 - v.eval(xs) / (2.0 * params.t) - m1.l_t() / (2.0 * params.t) - params.delta_t * report.phi_at_xstar
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThineqRow {
    pub x: f64,
    pub upsilon: f64,
}

/// `υ_t(x) = (h̃₊+h̃₋ − V/t − l̃/t)·(log δt/δt)` on grid points of the main
/// band; `l̃ = l` of the `t = 1` measure (the Robin constant of `[−2, 2]`
/// vanishes).
pub fn check_thineq(params: &AnsatzParams, v: &Potential, m1: &OneCutMeasure, grid: &[f64]) -> Vec<ThineqRow> {
    let scale = params.delta_t.ln() / params.delta_t;
    grid.iter()
        .map(|&x| {
            let two_h = 2.0 * (params.main.log_potential_real(x) + params.newborn.log_potential_real(x));
            let upsilon = (two_h - v.eval(x) / params.t - m1.l_t() / params.t) * scale;
            ThineqRow { x, upsilon }
        })
        .collect()
}

/// Grid on `[α_t, β_t]` avoiding collars of radius `collar` at `±2` and at
/// the band ends.
pub fn thineq_grid(params: &AnsatzParams, points: usize, collar: f64) -> Vec<f64> {
    params
        .main_band()
        .samples(points, collar)
        .into_iter()
        .filter(|x| (x - 2.0).abs() >= collar && (x + 2.0).abs() >= collar)
        .collect()
}
