use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::Mp;

/// Real polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x - r`.
    pub fn linear_root(r: f64) -> Self {
        Self::new(vec![-r, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_mp(&self, x: &Mp) -> Mp {
        let bits = x.bits();
        self.coeffs
            .iter()
            .rev()
            .fold(Mp::zero(bits), |acc, &c| (&acc * x).add_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut c = vec![0.0];
        c.extend(self.coeffs.iter().enumerate().map(|(k, &a)| a / (k + 1) as f64));
        Self::new(c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, m: u32) -> Self {
        (0..m).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// Coefficients of `p(s + x)` as a polynomial in `x` (Taylor shift).
    pub fn shift(&self, s: f64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] += s * c[j + 1];
            }
        }
        Self::new(c)
    }

    /// Coefficients of `p(c + r x)`.
    pub fn affine(&self, c: f64, r: f64) -> Self {
        let shifted = self.shift(c);
        let mut scale = 1.0;
        Self::new(
            shifted
                .coeffs
                .iter()
                .map(|&a| {
                    let v = a * scale;
                    scale *= r;
                    v
                })
                .collect(),
        )
    }

    /// Synthetic division by `x - r`: returns quotient and remainder.
    pub fn deflate(&self, r: f64) -> (Self, f64) {
        if self.coeffs.is_empty() {
            return (Self::zero(), 0.0);
        }
        let n = self.coeffs.len();
        let mut q = vec![0.0; n.saturating_sub(1)];
        let mut acc = 0.0;
        for k in (0..n).rev() {
            let next = self.coeffs[k] + acc * r;
            if k > 0 {
                q[k - 1] = next;
            } else {
                return (Self::new(q), next);
            }
            acc = next;
        }
        unreachable!()
    }

    /// Divided difference `(p(x) - p(r)) / (x - r)` as a polynomial.
    pub fn divided_difference(&self, r: f64) -> Self {
        self.deflate(r).0
    }

    /// Real roots in `[lo, hi]` located by sign changes on a grid of `m`
    /// cells and refined by bisection.
    pub fn real_roots_in(&self, lo: f64, hi: f64, m: usize) -> Vec<f64> {
        let mut roots = Vec::new();
        let h = (hi - lo) / m as f64;
        let mut a = lo;
        let mut fa = self.eval(a);
        for i in 1..=m {
            let b = lo + h * i as f64;
            let fb = self.eval(b);
            if fa == 0.0 {
                roots.push(a);
            } else if fa * fb < 0.0 {
                let (mut x0, mut x1, mut f0) = (a, b, fa);
                for _ in 0..200 {
                    let mid = 0.5 * (x0 + x1);
                    if mid <= x0 || mid >= x1 {
                        break;
                    }
                    let fm = self.eval(mid);
                    if fm == 0.0 {
                        x0 = mid;
                        x1 = mid;
                        break;
                    }
                    if (fm < 0.0) == (f0 < 0.0) {
                        x0 = mid;
                        f0 = fm;
                    } else {
                        x1 = mid;
                    }
                }
                roots.push(0.5 * (x0 + x1));
            }
            a = b;
            fa = fb;
        }
        roots
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let c = if first {
                *c
            } else {
                write!(f, "{}", if *c < 0.0 { " - " } else { " + " })?;
                c.abs()
            };
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·x")?,
                _ => write!(f, "{c}·x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}
