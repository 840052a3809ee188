use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `(a₀ + a₁ω + a₂ω² + a₃ω³) / √2^e` with `ω = e^{iπ/4}`.
///
/// Values are kept in a canonical form (numerator not divisible by `√2`,
/// zero stored as all-zero with `e = 0`), so structural equality is value
/// equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclotomicAmplitude {
    coeffs: [i64; 4],
    half_exponent: i32,
}

impl CyclotomicAmplitude {
    pub fn new(coeffs: [i64; 4], half_exponent: i32) -> Self {
        CyclotomicAmplitude { coeffs, half_exponent }.canonical()
    }

    pub fn zero() -> Self {
        CyclotomicAmplitude { coeffs: [0; 4], half_exponent: 0 }
    }

    /// `Σ_j counts[j] ω^j / √2^e`.
    pub fn from_counts(counts: &[u64; 8], half_exponent: i32) -> Self {
        let mut c = [0i64; 4];
        for (j, &n) in counts.iter().enumerate() {
            let sign = if j < 4 { 1 } else { -1 };
            c[j % 4] += sign * n as i64;
        }
        Self::new(c, half_exponent)
    }

    pub fn coeffs(&self) -> [i64; 4] {
        self.coeffs
    }

    pub fn half_exponent(&self) -> i32 {
        self.half_exponent
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0; 4]
    }

    fn mul_omega(c: [i64; 4]) -> [i64; 4] {
        [-c[3], c[0], c[1], c[2]]
    }

    fn canonical(mut self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        loop {
            // z / √2 = z (ω − ω³) / 2
            let w = Self::mul_omega(self.coeffs);
            let w3 = Self::mul_omega(Self::mul_omega(w));
            let prod = [w[0] - w3[0], w[1] - w3[1], w[2] - w3[2], w[3] - w3[3]];
            if prod.iter().all(|x| x % 2 == 0) {
                self.coeffs = prod.map(|x| x / 2);
                self.half_exponent -= 1;
            } else {
                return self;
            }
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (k, &a) in self.coeffs.iter().enumerate() {
            z += Complex64::from_polar(a as f64, std::f64::consts::FRAC_PI_4 * k as f64);
        }
        z * 2f64.powf(-self.half_exponent as f64 / 2.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_complex().norm_sqr()
    }
}

impl fmt::Display for CyclotomicAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.coeffs;
        write!(f, "({a} + {b}ω + {c}ω² + {d}ω³)/√2^{}", self.half_exponent)
    }
}
