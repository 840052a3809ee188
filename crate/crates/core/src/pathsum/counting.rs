//! Counting the roots of `p(x) ≡ j (mod 8)` through low-degree indicator
//! polynomials, a modulus-amplifying polynomial, and partial sums.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::cyclotomic::CyclotomicAmplitude;
use super::poly::{compose, compose_wrapping, zeta_wrapping, ComposeRoute, IntPolynomial, UniPoly, MAX_DENSE_VARS};
use super::{direct_sum, PhasePolynomialMod8};
use crate::error::{Error, Result};

/// `48·q(y)` with `q(y) = (1 − y)(1 − C(y,2))(1 − C(y,4))`.
fn q_times_48() -> UniPoly {
    let y = UniPoly::from_i64(&[0, 1]);
    let one_minus_y = UniPoly::from_i64(&[1, -1]);
    // 2 − y(y − 1)
    let two_minus = UniPoly::from_i64(&[2]).add(&y.mul(&UniPoly::from_i64(&[1, -1])));
    // 24 − y(y − 1)(y − 2)(y − 3)
    let falling4 = y
        .mul(&UniPoly::from_i64(&[-1, 1]))
        .mul(&UniPoly::from_i64(&[-2, 1]))
        .mul(&UniPoly::from_i64(&[-3, 1]));
    let twenty_four_minus = UniPoly::from_i64(&[24]).add(&falling4.mul(&UniPoly::from_i64(&[-1])));
    one_minus_y.mul(&two_minus).mul(&twenty_four_minus)
}

/// `q(y)` for an integer `y`; odd exactly when `y ≡ 0 (mod 8)`.
pub fn q_value(y: i64) -> BigInt {
    q_times_48().eval(&BigInt::from(y)) / 48
}

/// `p_j(x) = q(p(x) − j + 8B)` reduced multilinearly; `p_j(x)` is odd iff
/// `p(x) ≡ j (mod 8)`. `B` makes the argument nonnegative on `{0,1}^w`.
pub fn indicator_poly(p: &IntPolynomial, j: u8) -> Result<IntPolynomial> {
    indicator_poly_via(p, j, ComposeRoute::Auto)
}

pub fn indicator_poly_via(p: &IntPolynomial, j: u8, route: ComposeRoute) -> Result<IntPolynomial> {
    if j >= 8 {
        return Err(Error::precondition(format!("residue j = {j} outside 0..8")));
    }
    let lower = p.lower_bound();
    let deficit = BigInt::from(j) - lower;
    let b = if deficit > BigInt::zero() { Integer::div_ceil(&deficit, &BigInt::from(8)) } else { BigInt::zero() };
    let shift = b * 8 - j;
    let mut arg = p.clone();
    arg.add_term(0, shift);
    compose(&q_times_48(), &arg, route)?.div_exact(&BigInt::from(48))
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `r_k(x) = x^k Σ_{j<k} C(k−1+j, j)(1 − x)^j`, degree `2k − 1`: even
/// arguments map to `0` and odd arguments to `1` modulo `2^k`.
pub fn mod_amplifier(k: usize) -> Result<UniPoly> {
    if k == 0 {
        return Err(Error::precondition("amplifier order k must be >= 1"));
    }
    let one_minus_x = UniPoly::from_i64(&[1, -1]);
    let mut sum = UniPoly::new(vec![]);
    for j in 0..k {
        let c = binomial((k - 1 + j) as u64, j as u64);
        sum = sum.add(&one_minus_x.pow(j).mul(&UniPoly::new(vec![c])));
    }
    Ok(UniPoly::from_i64(&[0, 1]).pow(k).mul(&sum))
}

/// `s_{j,k}(y) = Σ_{z∈{0,1}^k} r_{k+1}(p_j(y, z)) mod 2^{k+1}`, where `z`
/// are the last `k` variables. The result lives on the first `w − k`
/// variables with coefficients in `[0, 2^{k+1})`.
///
/// Since `r_{k+1}` has integer coefficients, reducing `p_j` modulo
/// `2^{k+1}` before composing leaves the result unchanged modulo `2^{k+1}`.
pub fn partial_sum(p_j: &IntPolynomial, k: usize) -> Result<IntPolynomial> {
    let w = p_j.num_vars();
    if k == 0 || k >= w {
        return Err(Error::precondition(format!("split k = {k} must satisfy 1 <= k < {w}")));
    }
    if k > 62 {
        return Err(Error::precondition("split k too large for 64-bit residues"));
    }
    let modulus = 1u64 << (k + 1);
    let reduced = p_j.reduce_mod(&BigInt::from(modulus));
    let composed = compose_wrapping(&mod_amplifier(k + 1)?, &reduced)?;
    let ny = w - k;
    let ymask = (1u32 << ny) - 1;
    let mut acc = vec![0u64; 1 << ny];
    for (mask, &c) in composed.iter().enumerate() {
        let c = c % modulus;
        if c == 0 {
            continue;
        }
        let mask = mask as u32;
        let free_z = k as u32 - (mask >> ny).count_ones();
        let weight = (1u64 << free_z) % modulus;
        let slot = &mut acc[(mask & ymask) as usize];
        *slot = (*slot + c * weight) % modulus;
    }
    Ok(IntPolynomial::from_terms(
        ny,
        acc.into_iter().enumerate().map(|(m, c)| (m as u32, BigInt::from(c))),
    ))
}

/// Values of `poly mod modulus` at every assignment, in lexicographic order
/// with variable 0 most significant.
pub fn evaluate_all(poly: &IntPolynomial, modulus: u64) -> Result<Vec<u64>> {
    let w = poly.num_vars();
    if w > MAX_DENSE_VARS {
        return Err(Error::WidthOverflow { width: w, limit: MAX_DENSE_VARS });
    }
    if modulus == 0 {
        return Err(Error::precondition("modulus must be positive"));
    }
    let m = BigInt::from(modulus);
    let mut t = vec![0u64; 1 << w];
    for (&mask, c) in poly.terms() {
        // variable j sits at bit w − 1 − j of the lexicographic index
        let idx = if w == 0 { 0 } else { (mask.reverse_bits() >> (32 - w)) as usize };
        t[idx] = c.mod_floor(&m).to_u64().expect("reduced");
    }
    if modulus.is_power_of_two() {
        zeta_wrapping(&mut t, w, false);
        t.iter_mut().for_each(|x| *x %= modulus);
    } else {
        for j in 0..w {
            let bit = 1usize << j;
            for i in 0..t.len() {
                if i & bit != 0 {
                    t[i] = ((t[i] as u128 + t[i ^ bit] as u128) % modulus as u128) as u64;
                }
            }
        }
    }
    Ok(t)
}

/// Root counts `N_j = #{x : p(x) ≡ j (mod 8)}` and pipeline statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingReport {
    pub counts: [u64; 8],
    pub v: usize,
    pub k: usize,
    /// Largest monomial count among the partial sums `s_{j,k}`.
    pub term_count: usize,
    /// `Σ_j N_j = 2^v`.
    pub conserved: bool,
}

pub fn count_roots_mod8(p: &PhasePolynomialMod8, k: usize) -> Result<CountingReport> {
    let v = p.v();
    if k == 0 || k >= v {
        return Err(Error::precondition(format!("split k = {k} must satisfy 1 <= k < v = {v}")));
    }
    if v > MAX_DENSE_VARS {
        return Err(Error::WidthOverflow { width: v, limit: MAX_DENSE_VARS });
    }
    let lifted = p.to_int_polynomial();
    let modulus = 1u64 << (k + 1);
    let mut counts = [0u64; 8];
    let mut term_count = 0;
    for (j, slot) in counts.iter_mut().enumerate() {
        let p_j = indicator_poly(&lifted, j as u8)?;
        let s = partial_sum(&p_j, k)?;
        term_count = term_count.max(s.term_count());
        // Σ_z g_j(y, z) ≤ 2^k < 2^{k+1}, so each residue is the exact count
        *slot = evaluate_all(&s, modulus)?.iter().sum();
    }
    let conserved = counts.iter().sum::<u64>() == 1u64 << v;
    Ok(CountingReport { counts, v, k, term_count, conserved })
}

/// `k = max(1, ⌊0.015035·v⌋)`.
pub fn default_split(v: usize) -> usize {
    ((0.015035 * v as f64).floor() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingAmplitude {
    pub amplitude: CyclotomicAmplitude,
    /// `None` when `v < 2` and the direct sum was used instead.
    pub report: Option<CountingReport>,
}

/// `2^{−e/2} Σ_j N_j ω^j`.
pub fn amplitude_from_polynomial(p: &PhasePolynomialMod8, k: Option<usize>) -> Result<CountingAmplitude> {
    if p.is_flagged_zero() {
        return Ok(CountingAmplitude { amplitude: CyclotomicAmplitude::zero(), report: None });
    }
    if p.v() < 2 {
        return Ok(CountingAmplitude { amplitude: direct_sum(p)?, report: None });
    }
    let k = k.unwrap_or_else(|| default_split(p.v()));
    let report = count_roots_mod8(p, k)?;
    if !report.conserved {
        return Err(Error::precondition("root counts do not sum to 2^v"));
    }
    Ok(CountingAmplitude {
        amplitude: CyclotomicAmplitude::from_counts(&report.counts, p.scale_exponent()),
        report: Some(report),
    })
}
