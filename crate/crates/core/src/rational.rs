//! Exact rationals for closed-form probabilities.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

/// `num / 2^e`.
pub fn dyadic(num: impl Into<BigInt>, e: u32) -> BigRational {
    BigRational::new(num.into(), pow2(e))
}

pub fn to_f64(r: &BigRational) -> f64 {
    // numerator and denominator may exceed f64 range separately
    let (n, d) = (r.numer(), r.denom());
    let shift = (d.bits() as i64 - 1000).max(0).max(n.bits() as i64 - 1000);
    if shift > 0 {
        let s = shift as usize;
        let n = n >> s;
        let d = d >> s;
        if d.is_zero() {
            return if n.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0)
    } else {
        n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0)
    }
}

/// Serialized form: numerator and denominator as decimal strings plus a
/// floating approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRational {
    pub num: String,
    pub den: String,
    pub value: f64,
}

impl ExactRational {
    pub fn to_rational(&self) -> Result<BigRational> {
        let num: BigInt = self
            .num
            .parse()
            .map_err(|_| Error::parse(1, format!("bad numerator {:?}", self.num)))?;
        let den: BigInt = self
            .den
            .parse()
            .map_err(|_| Error::parse(1, format!("bad denominator {:?}", self.den)))?;
        if den.is_zero() {
            return Err(Error::parse(1, "zero denominator"));
        }
        Ok(BigRational::new(num, den))
    }
}

impl From<&BigRational> for ExactRational {
    fn from(r: &BigRational) -> Self {
        ExactRational { num: r.numer().to_string(), den: r.denom().to_string(), value: to_f64(r) }
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == "1" {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
