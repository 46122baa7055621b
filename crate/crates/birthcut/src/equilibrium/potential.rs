use std::fmt::Write as _;

use crate::numerics::Polynomial;
use crate::{Error, Result};

/// Confining polynomial potential `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    poly: Polynomial,
    provenance: String,
}

impl Potential {
    /// Requires even degree ≥ 2 and a positive leading coefficient.
    pub fn new(poly: Polynomial, provenance: impl Into<String>) -> Result<Self> {
        let d = poly.degree();
        if d < 2 || !d.is_multiple_of(2) || poly.leading() <= 0.0 {
            return Err(Error::Precondition(format!(
                "potential must have even degree >= 2 and positive leading coefficient, got degree {d}, leading {}",
                poly.leading()
            )));
        }
        Ok(Self { poly, provenance: provenance.into() })
    }

    /// `x²/2`.
    pub fn gaussian() -> Self {
        Self::new(Polynomial::new(vec![0.0, 0.0, 0.5]), "gaussian x^2/2").expect("valid")
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.poly.eval(x)
    }

    pub fn derivative(&self) -> Polynomial {
        self.poly.derivative()
    }

    /// Coefficients one per line, ascending, after a `#` header.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# potential: {}", self.provenance);
        let _ = writeln!(s, "# coefficients ascending in degree");
        for c in self.poly.coeffs() {
            let _ = writeln!(s, "{c:e}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut provenance = String::from("user-supplied");
        let mut coeffs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(p) = rest.trim().strip_prefix("potential:") {
                    provenance = p.trim().to_string();
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let c: f64 = line
                .parse()
                .map_err(|_| Error::Config(format!("line {}: not a number: {line}", i + 1)))?;
            coeffs.push(c);
        }
        Self::new(Polynomial::new(coeffs), provenance)
    }
}
