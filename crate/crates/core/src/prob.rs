//! Probabilities that may underflow `f64`.
//!
//! Calibrations such as `δ = 2ω / (16 C d n²)^d` drop below `1e-300` for
//! moderate `d`. [`LogProb`] carries the natural log alongside the plain value
//! so downstream formulas can stay in log space.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
pub struct LogProb {
    ln: f64,
    value: f64,
}

impl LogProb {
    /// Wraps a probability in `(0, 1]`.
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::param(format!("probability must lie in (0, 1], got {p}")));
        }
        Ok(Self { ln: p.ln(), value: p })
    }

    /// Builds from a natural log `ln p ≤ 0`; the plain value may underflow to 0.
    pub fn from_ln(ln: f64) -> Result<Self> {
        if !(ln.is_finite() && ln <= 0.0) {
            return Err(Error::param(format!("log-probability must be finite and <= 0, got {ln}")));
        }
        Ok(Self { ln, value: ln.exp() })
    }

    /// Prefers an exactly computed `value` when it is a normal float and
    /// falls back to `exp(ln)` otherwise.
    pub(crate) fn from_parts(value: f64, ln: f64) -> Result<Self> {
        if value.is_normal() && value > 0.0 && value <= 1.0 {
            Ok(Self { ln, value })
        } else {
            Self::from_ln(ln)
        }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// `ln(1/p)`.
    pub fn ln_inv(self) -> f64 {
        -self.ln
    }

    /// Plain value; zero if it underflows.
    pub fn value(self) -> f64 {
        self.value
    }

    /// Multiplies by a positive factor in log space.
    pub fn scale(self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::param(format!("scale factor must be > 0, got {factor}")));
        }
        Self::from_parts(self.value * factor, self.ln + factor.ln())
    }
}

impl fmt::Debug for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogProb(e^{})", self.ln)
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value > 0.0 {
            write!(f, "{:e}", self.value)
        } else {
            write!(f, "exp({})", self.ln)
        }
    }
}

impl TryFrom<f64> for LogProb {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_plain_values() {
        let p = LogProb::new(1e-6).unwrap();
        assert_eq!(p.value(), 1e-6);
        assert!((p.ln() - (1e-6f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn keeps_log_when_value_underflows() {
        let p = LogProb::from_ln(-5000.0).unwrap();
        assert_eq!(p.value(), 0.0);
        assert_eq!(p.ln(), -5000.0);
        assert_eq!(p.ln_inv(), 5000.0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(LogProb::new(0.0).is_err());
        assert!(LogProb::new(1.5).is_err());
        assert!(LogProb::from_ln(0.1).is_err());
        assert!(LogProb::from_ln(f64::NEG_INFINITY).is_err());
    }
}
