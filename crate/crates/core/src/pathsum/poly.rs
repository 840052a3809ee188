//! Exact multilinear integer polynomials over `{0,1}` variables.
//!
//! A monomial is a `u32` mask with bit `j` set for variable `j`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest variable count for dense (`2^w`-table) transforms.
pub const MAX_DENSE_VARS: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    w: usize,
    terms: BTreeMap<u32, BigInt>,
}

impl IntPolynomial {
    pub fn zero(w: usize) -> Self {
        assert!(w <= 32, "at most 32 variables");
        IntPolynomial { w, terms: BTreeMap::new() }
    }

    pub fn constant(w: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(w);
        p.add_term(0, c.into());
        p
    }

    pub fn var(w: usize, j: usize) -> Self {
        assert!(j < w);
        let mut p = Self::zero(w);
        p.add_term(1 << j, BigInt::one());
        p
    }

    pub fn from_terms(w: usize, terms: impl IntoIterator<Item = (u32, BigInt)>) -> Self {
        let mut p = Self::zero(w);
        for (m, c) in terms {
            assert!(w == 32 || m >> w == 0, "monomial {m:#b} uses a variable >= {w}");
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, mask: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.w
    }

    pub fn terms(&self) -> &BTreeMap<u32, BigInt> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mask: u32) -> BigInt {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    /// Value at the assignment whose set variables are `mask`.
    pub fn eval_mask(&self, mask: u32) -> BigInt {
        self.terms
            .iter()
            .filter(|(m, _)| *m & mask == **m)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn eval(&self, x: &[bool]) -> Result<BigInt> {
        if x.len() != self.w {
            return Err(Error::LengthMismatch { expected: self.w, got: x.len() });
        }
        let mask = x.iter().enumerate().fold(0u32, |m, (j, &b)| m | ((b as u32) << j));
        Ok(self.eval_mask(mask))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.w, other.w);
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::from_terms(self.w, self.terms.iter().map(|(&m, c)| (m, c * s)))
    }

    /// Product with `x_i² = x_i`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.w, other.w);
        let mut out = Self::zero(self.w);
        for (&ma, ca) in &self.terms {
            for (&mb, cb) in &other.terms {
                out.add_term(ma | mb, ca * cb);
            }
        }
        out
    }

    /// Coefficients reduced into `[0, modulus)`.
    pub fn reduce_mod(&self, modulus: &BigInt) -> Self {
        Self::from_terms(self.w, self.terms.iter().map(|(&m, c)| (m, c.mod_floor(modulus))))
    }

    /// Exact division of every coefficient; errors if any is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Result<Self> {
        let mut out = Self::zero(self.w);
        for (&m, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return Err(Error::precondition(format!("coefficient {c} not divisible by {d}")));
            }
            out.add_term(m, q);
        }
        Ok(out)
    }

    /// Smallest value the polynomial can take: constant plus all negative
    /// non-constant coefficients.
    pub fn lower_bound(&self) -> BigInt {
        self.terms
            .iter()
            .filter(|(&m, c)| m == 0 || c.is_negative())
            .map(|(_, c)| c)
            .sum()
    }

    fn check_dense(&self) -> Result<()> {
        if self.w > MAX_DENSE_VARS {
            return Err(Error::WidthOverflow { width: self.w, limit: MAX_DENSE_VARS });
        }
        Ok(())
    }

    /// Dense coefficient table indexed by mask, if every coefficient fits.
    fn dense_i128(&self) -> Option<Vec<i128>> {
        let mut t = vec![0i128; 1 << self.w];
        for (&m, c) in &self.terms {
            t[m as usize] = c.to_i128()?;
        }
        Some(t)
    }

    fn dense_big(&self) -> Vec<BigInt> {
        let mut t = vec![BigInt::zero(); 1 << self.w];
        for (&m, c) in &self.terms {
            t[m as usize] = c.clone();
        }
        t
    }

    fn from_dense<T: Into<BigInt> + Clone>(w: usize, t: &[T]) -> Self {
        let mut p = Self::zero(w);
        for (m, c) in t.iter().enumerate() {
            p.add_term(m as u32, c.clone().into());
        }
        p
    }

    /// Values at all `2^w` assignments, indexed by mask.
    pub fn values_big(&self) -> Result<Vec<BigInt>> {
        self.check_dense()?;
        let mut t = self.dense_big();
        zeta_big(&mut t, self.w, false);
        Ok(t)
    }

    /// The polynomial with the given values (indexed by mask).
    pub fn interpolate_big(w: usize, mut values: Vec<BigInt>) -> Self {
        zeta_big(&mut values, w, true);
        Self::from_dense(w, &values)
    }
}

/// In-place subset-sum (`inverse = false`) or Möbius (`inverse = true`)
/// transform.
fn zeta_big(t: &mut [BigInt], w: usize, inverse: bool) {
    for j in 0..w {
        let bit = 1usize << j;
        for m in 0..t.len() {
            if m & bit != 0 {
                let lo = t[m ^ bit].clone();
                if inverse {
                    t[m] -= lo;
                } else {
                    t[m] += lo;
                }
            }
        }
    }
}

fn zeta_i128(t: &mut [i128], w: usize, inverse: bool) -> Option<()> {
    for j in 0..w {
        let bit = 1usize << j;
        for m in 0..t.len() {
            if m & bit != 0 {
                let lo = t[m ^ bit];
                t[m] = if inverse { t[m].checked_sub(lo)? } else { t[m].checked_add(lo)? };
            }
        }
    }
    Some(())
}

/// Subset-sum or Möbius transform in `Z / 2^64`.
pub(crate) fn zeta_wrapping(t: &mut [u64], w: usize, inverse: bool) {
    for j in 0..w {
        let bit = 1usize << j;
        for m in 0..t.len() {
            if m & bit != 0 {
                let lo = t[m ^ bit];
                t[m] = if inverse { t[m].wrapping_sub(lo) } else { t[m].wrapping_add(lo) };
            }
        }
    }
}

/// Univariate integer polynomial, coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[BigInt], i: usize| v.get(i).cloned().unwrap_or_default();
        Self::new((0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::from_i64(&[1]), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    fn eval_i128(&self, coeffs: &[i128], x: i128) -> Option<i128> {
        debug_assert_eq!(coeffs.len(), self.coeffs.len());
        coeffs.iter().rev().try_fold(0i128, |acc, &c| acc.checked_mul(x)?.checked_add(c))
    }

    /// Coefficients modulo `2^64`.
    pub(crate) fn wrapping_coeffs(&self) -> Vec<u64> {
        let m = BigInt::one() << 64;
        self.coeffs.iter().map(|c| c.mod_floor(&m).to_u64().expect("reduced")).collect()
    }
}

/// How [`compose`] builds `u(p(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposeRoute {
    /// Horner's rule with sparse multilinear products.
    Horner,
    /// Values at all points, `u` applied pointwise, then Möbius inversion.
    Evaluation,
    /// Whichever has the smaller cost estimate.
    Auto,
}

fn binomial_prefix_sum(w: usize, d: usize) -> f64 {
    let mut total = 0.0;
    let mut c = 1.0;
    for k in 0..=d.min(w) {
        total += c;
        c = c * (w - k) as f64 / (k + 1) as f64;
    }
    total
}

/// Rough operation counts of the two routes.
pub fn compose_costs(u: &UniPoly, p: &IntPolynomial) -> (f64, f64) {
    let w = p.num_vars();
    let dense = if w > MAX_DENSE_VARS {
        f64::INFINITY
    } else {
        (1u64 << w) as f64 * (2.0 * w as f64 + u.degree() as f64 + 1.0)
    };
    let deg_p = p.degree().max(1);
    let mut horner = 0.0;
    for i in 1..=u.degree() {
        horner += binomial_prefix_sum(w, (i - 1) * deg_p) * p.term_count() as f64;
    }
    (horner, dense)
}

/// `u(p(x))` reduced multilinearly.
pub fn compose(u: &UniPoly, p: &IntPolynomial, route: ComposeRoute) -> Result<IntPolynomial> {
    let route = match route {
        ComposeRoute::Auto => {
            let (horner, dense) = compose_costs(u, p);
            if dense < horner {
                ComposeRoute::Evaluation
            } else {
                ComposeRoute::Horner
            }
        }
        r => r,
    };
    let w = p.num_vars();
    match route {
        ComposeRoute::Horner => {
            let mut acc = IntPolynomial::zero(w);
            for c in u.coeffs().iter().rev() {
                acc = acc.mul(p);
                acc.add_term(0, c.clone());
            }
            Ok(acc)
        }
        _ => {
            p.check_dense()?;
            if let Some(r) = compose_dense_i128(u, p) {
                return Ok(r);
            }
            let values: Vec<BigInt> = p.values_big()?.iter().map(|x| u.eval(x)).collect();
            Ok(IntPolynomial::interpolate_big(w, values))
        }
    }
}

fn compose_dense_i128(u: &UniPoly, p: &IntPolynomial) -> Option<IntPolynomial> {
    let w = p.num_vars();
    let uc: Vec<i128> = u.coeffs().iter().map(|c| c.to_i128()).collect::<Option<_>>()?;
    let mut t = p.dense_i128()?;
    zeta_i128(&mut t, w, false)?;
    for x in t.iter_mut() {
        *x = u.eval_i128(&uc, *x)?;
    }
    zeta_i128(&mut t, w, true)?;
    Some(IntPolynomial::from_dense(w, &t))
}

/// `u(p(x)) mod 2^64` as a dense coefficient table indexed by mask.
pub(crate) fn compose_wrapping(u: &UniPoly, p: &IntPolynomial) -> Result<Vec<u64>> {
    p.check_dense()?;
    let w = p.num_vars();
    let m = BigInt::one() << 64;
    let mut t = vec![0u64; 1 << w];
    for (&mask, c) in p.terms() {
        t[mask as usize] = c.mod_floor(&m).to_u64().expect("reduced");
    }
    zeta_wrapping(&mut t, w, false);
    let uc = u.wrapping_coeffs();
    for x in t.iter_mut() {
        *x = uc.iter().rev().fold(0u64, |acc, &c| acc.wrapping_mul(*x).wrapping_add(c));
    }
    zeta_wrapping(&mut t, w, true);
    Ok(t)
}
