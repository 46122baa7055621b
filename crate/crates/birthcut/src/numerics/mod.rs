//! Scalar plumbing shared by every other module.

mod cheb;
mod mp;
mod poly;
mod quad;
mod root;

pub use cheb::{cheb_coeffs, cheb_eval, joukowski, ChebMeasure};
pub use mp::Mp;
pub use poly::Polynomial;
pub use quad::{integrate, integrate_graded, integrate_pv, QuadKind, QuadratureRule};
pub use root::find_root;

use crate::{Error, Result};

/// Working precision and tolerances. One context is threaded through a whole
/// computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    pub bits: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Node cap for adaptive quadrature.
    pub max_nodes: usize,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            bits: 128,
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_nodes: 1 << 15,
        }
    }
}

impl PrecisionContext {
    pub fn with_bits(bits: u32) -> Self {
        Self {
            bits: bits.max(53),
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    /// Decimal digits carried by `bits`.
    pub fn digits(&self) -> f64 {
        self.bits as f64 * std::f64::consts::LOG10_2
    }

    pub(crate) fn agree(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_tol.max(self.rel_tol * b.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo < hi && lo.is_finite() && hi.is_finite() {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn interior(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// `n` equispaced points strictly inside, avoiding a relative collar.
    pub fn samples(&self, n: usize, collar: f64) -> Vec<f64> {
        let lo = self.lo + collar;
        let hi = self.hi - collar;
        (0..n)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
            .collect()
    }
}

/// Side of the real axis from which a boundary value is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Central binomial coefficient `(2k)!/(k!)^2`.
pub fn central_binomial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * (2 * j - 1) as f64 * 2.0 * j as f64 / (j * j) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rejects_empty() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn central_binomials() {
        assert_eq!(central_binomial(0), 1.0);
        assert_eq!(central_binomial(1), 2.0);
        assert_eq!(central_binomial(2), 6.0);
        assert_eq!(central_binomial(3), 20.0);
        assert_eq!(factorial(5), 120.0);
    }
}
