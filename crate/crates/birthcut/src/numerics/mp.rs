//! Extended-precision reals over `astro_float::BigFloat`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

/// Extended-precision real. Each value carries its own precision and binary
/// operations round to the larger of the two.
#[derive(Clone, Debug)]
pub struct Mp(BigFloat);

impl Mp {
    pub fn from_f64(x: f64, bits: u32) -> Self {
        Mp(BigFloat::from_f64(x, bits as usize))
    }

    pub fn from_i64(x: i64, bits: u32) -> Self {
        Mp(BigFloat::from_i64(x, bits as usize))
    }

    pub fn zero(bits: u32) -> Self {
        Self::from_f64(0.0, bits)
    }

    pub fn one(bits: u32) -> Self {
        Self::from_f64(1.0, bits)
    }

    pub fn pi(bits: u32) -> Self {
        CONSTS.with(|c| Mp(c.borrow_mut().pi(bits as usize, RM)))
    }

    pub fn bits(&self) -> u32 {
        // zeros produced by cancellation can carry an empty mantissa
        self.0.precision().filter(|p| *p > 0).unwrap_or(64) as u32
    }

    fn p2(&self, other: &Mp) -> usize {
        self.bits().max(other.bits()) as usize
    }

    /// Nearest double (ties and overflow handled by IEEE scaling).
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((m, n, s, e, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        if n == 0 || m.is_empty() {
            return 0.0;
        }
        let top = m[m.len() - 1];
        let next = if m.len() > 1 { m[m.len() - 2] } else { 0 };
        // mantissa in [0.5, 1)
        let frac = top as f64 / 2f64.powi(64) + next as f64 / 2f64.powi(128);
        let v = scale2(frac, e as i64);
        match s {
            Sign::Neg => -v,
            Sign::Pos => v,
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.bits() as usize;
        // astro-float yields NaN for a zero argument
        if self.0.is_zero() {
            return Self::one(p as u32);
        }
        CONSTS.with(|c| Mp(self.0.exp(p, RM, &mut c.borrow_mut())))
    }

    pub fn ln(&self) -> Self {
        let p = self.bits() as usize;
        CONSTS.with(|c| Mp(self.0.ln(p, RM, &mut c.borrow_mut())))
    }

    pub fn sqrt(&self) -> Self {
        Mp(self.0.sqrt(self.bits() as usize, RM))
    }

    pub fn abs(&self) -> Self {
        Mp(self.0.abs())
    }

    pub fn powi(&self, n: u32) -> Self {
        Mp(self.0.powi(n as usize, self.bits() as usize, RM))
    }

    pub fn recip(&self) -> Self {
        Mp(self.0.reciprocal(self.bits() as usize, RM))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }

    pub fn max(self, other: Mp) -> Mp {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn mul_f64(&self, x: f64) -> Self {
        self * &Mp::from_f64(x, self.bits())
    }

    pub fn add_f64(&self, x: f64) -> Self {
        self + &Mp::from_f64(x, self.bits())
    }
}

fn scale2(x: f64, e: i64) -> f64 {
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e as i32)
}

impl PartialEq for Mp {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Mp> for &Mp {
            type Output = Mp;
            fn $m(self, rhs: &Mp) -> Mp {
                Mp(self.0.$m(&rhs.0, self.p2(rhs), RM))
            }
        }
        impl $tr<Mp> for Mp {
            type Output = Mp;
            fn $m(self, rhs: Mp) -> Mp {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Mp> for Mp {
            type Output = Mp;
            fn $m(self, rhs: &Mp) -> Mp {
                (&self).$m(rhs)
            }
        }
        impl $tr<Mp> for &Mp {
            type Output = Mp;
            fn $m(self, rhs: Mp) -> Mp {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(BigFloat::neg(&self.0))
    }
}

impl Neg for &Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(BigFloat::neg(&self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_signed_zero() {
        let z = Mp::from_f64(-0.0, 128);
        assert_eq!(z.exp().to_f64(), 1.0);
        assert_eq!((Mp::zero(128) - Mp::zero(128)).exp().to_f64(), 1.0);
    }

    #[test]
    fn round_trips_doubles() {
        for x in [1.0, -0.1, 3.5, 1e-300, 6.02e23, -2.5e-17] {
            assert_eq!(Mp::from_f64(x, 128).to_f64(), x);
        }
        assert_eq!(Mp::zero(128).to_f64(), 0.0);
    }

    #[test]
    fn arithmetic_and_functions() {
        let b = 256;
        let two = Mp::from_f64(2.0, b);
        let r = two.sqrt();
        assert!((&r * &r - &two).abs().to_f64() < 1e-70);
        assert!((two.ln().to_f64() - std::f64::consts::LN_2).abs() < 1e-16);
        assert!((Mp::pi(b).to_f64() - std::f64::consts::PI).abs() < 1e-16);
        let e = Mp::one(b).exp();
        assert!((e.ln() - Mp::one(b)).abs().to_f64() < 1e-70);
        assert!(Mp::from_f64(-3.0, b) < Mp::from_f64(2.0, b));
        assert_eq!(Mp::from_i64(-7, b).powi(3).to_f64(), -343.0);
    }

    #[test]
    fn huge_exponents_convert() {
        let big = Mp::from_f64(1e200, 128) * Mp::from_f64(1e200, 128);
        assert!(big.to_f64().is_infinite());
        let small = Mp::from_f64(1e-200, 128) * Mp::from_f64(1e-200, 128);
        assert_eq!(small.to_f64(), 0.0);
        let mid = Mp::from_f64(1e200, 128) * Mp::from_f64(1e-250, 128);
        assert!((mid.to_f64() / 1e-50 - 1.0).abs() < 1e-15);
    }
}
