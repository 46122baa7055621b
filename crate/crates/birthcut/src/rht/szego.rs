use std::f64::consts::PI;

use num_complex::Complex64;

use super::cheb_fit;
use crate::numerics::{cheb_eval, integrate, integrate_graded, integrate_pv, joukowski, Interval, PrecisionContext, QuadKind, Side};
use crate::Result;

/// `K` for `D_n` given by Chebyshev coefficients on `[α, β]`:
/// `K(x) = Σ e_k w^{−k}` with `w` the exterior Joukowski variable, so that
/// `K₊ + K₋ = 2D_n` on the band and `K(∞) = e_0`.
#[derive(Debug, Clone)]
pub struct SzegoSeries {
    band: Interval,
    e: Vec<f64>,
}

impl SzegoSeries {
    pub fn from_fn<F: Fn(f64) -> f64>(d: F, band: Interval) -> Self {
        Self { band, e: cheb_fit(d, band) }
    }

    pub fn zero(band: Interval) -> Self {
        Self { band, e: vec![0.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.e
    }

    pub fn k0(&self) -> f64 {
        self.e[0]
    }

    /// `D_n(x)` from the stored series.
    pub fn d(&self, x: f64) -> f64 {
        cheb_eval(&self.e, (x - self.band.center()) / self.band.radius())
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        let w = joukowski((x - self.band.center()) / self.band.radius());
        let inv = 1.0 / w;
        let mut p = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for &ek in &self.e {
            acc += ek * p;
            p *= inv;
        }
        acc
    }
}

/// `K(x) = (√((x−α)(x−β))/2πi)∫ 2D(s)ds/((√((s−α)(s−β)))₊(s−x))` by
/// quadrature; `D(Re x)` is subtracted so points near the band stay
/// accurate.
pub fn szego_k<F: Fn(f64) -> f64>(x: Complex64, d: F, alpha: f64, beta: f64, ctx: &PrecisionContext) -> Result<Complex64> {
    let band = Interval::new(alpha, beta)?;
    let (c, r) = (band.center(), band.radius());
    let root = (x - alpha).sqrt() * (x - beta).sqrt();
    let x0 = x.re.clamp(alpha, beta);
    let d0 = d(x0);
    // (√)₊ = i√((s−α)(β−s)), so K = −(√((x−α)(x−β))/π)∫ D(s)/(√((s−α)(β−s))(s−x)) ds;
    // with s = c + r cos θ the weight becomes dθ
    let g = |th: f64| {
        let s = c + r * th.cos();
        (d(s) - d0) / (Complex64::new(s, 0.0) - x)
    };
    let th0 = ((x0 - c) / r).clamp(-1.0, 1.0).acos();
    let width = x.im.abs() / (r * th0.sin()).max((x.im.abs() / r).sqrt());
    let range = Interval::new(0.0, PI)?;
    let re = integrate_graded(|th| g(th).re, range, th0, width, ctx)?;
    let im = integrate_graded(|th| g(th).im, range, th0, width, ctx)?;
    // ∫ ds/(√((s−α)(β−s))(s−x)) = −π/(√(x−α)√(x−β))
    let bare = -PI / root;
    Ok(-root / PI * (Complex64::new(re, im) + d0 * bare))
}

/// Boundary value `K±(x)` on the band through the principal value.
pub fn szego_k_boundary<F: Fn(f64) -> f64>(
    x: f64,
    d: F,
    alpha: f64,
    beta: f64,
    side: Side,
    ctx: &PrecisionContext,
) -> Result<Complex64> {
    let band = Interval::new(alpha, beta)?;
    let pv = integrate_pv(&d, x, band, QuadKind::ChebyshevFirstKind, ctx)?;
    let rho = ((x - alpha) * (beta - x)).sqrt();
    Ok(Complex64::new(d(x), -side.sign() * rho * pv / PI))
}

/// `K₀ = −(1/2πi)∫ 2D(s)ds/(√((s−α)(s−β)))₊ = (1/π)∫ D(s)/√((s−α)(β−s)) ds`.
pub fn szego_k0<F: Fn(f64) -> f64>(d: F, alpha: f64, beta: f64, ctx: &PrecisionContext) -> Result<f64> {
    let band = Interval::new(alpha, beta)?;
    Ok(integrate(d, band, QuadKind::ChebyshevFirstKind, ctx)? / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn constant_density_gives_constant() {
        // K₊ + K₋ = 2c and K(∞) = c are met by K ≡ c
        let (a, b) = (-1.7, 2.3);
        for z in [Complex64::new(0.1, 0.5), Complex64::new(4.0, -0.2), Complex64::new(-9.0, 3.0)] {
            let k = szego_k(z, |_| 0.7, a, b, &ctx()).unwrap();
            assert!((k - 0.7).norm() < 1e-12, "{z} {k}");
        }
        assert_relative_eq!(szego_k0(|_| 0.7, a, b, &ctx()).unwrap(), 0.7, epsilon = 1e-14);
    }

    #[test]
    fn series_matches_quadrature() {
        let (a, b) = (-2.0, 2.1);
        let d = |s: f64| (0.3 * s).sin() + 0.2 * s * s;
        let ser = SzegoSeries::from_fn(d, Interval::new(a, b).unwrap());
        for z in [Complex64::new(0.1, 0.5), Complex64::new(3.0, -0.2), Complex64::new(-1.0, 1e-3)] {
            let q = szego_k(z, d, a, b, &ctx()).unwrap();
            assert!((q - ser.eval(z)).norm() < 1e-11, "{z}: {q} vs {}", ser.eval(z));
        }
        assert_relative_eq!(ser.k0(), szego_k0(d, a, b, &ctx()).unwrap(), epsilon = 1e-13);
        let far = ser.eval(Complex64::new(1e6, 0.0));
        assert!((far - ser.k0()).norm() < 1e-5);
    }

    #[test]
    fn plemelj_boundary_values() {
        let (a, b) = (-2.0, 2.1);
        let d = |s: f64| (0.3 * s).sin() + 0.2 * s * s;
        let ser = SzegoSeries::from_fn(d, Interval::new(a, b).unwrap());
        let x = 0.4;
        let up = szego_k_boundary(x, d, a, b, Side::Upper, &ctx()).unwrap();
        let near = ser.eval(Complex64::new(x, 1e-9));
        assert!((up - near).norm() < 1e-7, "{up} {near}");
        let dn = szego_k_boundary(x, d, a, b, Side::Lower, &ctx()).unwrap();
        assert!((up + dn - 2.0 * d(x)).norm() < 1e-14);
    }
}
