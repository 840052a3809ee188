//! Exact evaluation of `Σ_x ω^{p(x)}` by summing variables out one at a
//! time over factor tables (bucket elimination). Cost is exponential in the
//! largest neighbourhood met along a min-degree order, not in `v`.

use std::collections::BTreeSet;

use super::cyclotomic::CyclotomicAmplitude;
use super::PhasePolynomialMod8;
use crate::error::{Error, Result};

/// Largest scope a factor table may have.
pub const MAX_FACTOR_SCOPE: usize = 24;

type Zw = [i128; 4];

fn overflow() -> Error {
    Error::precondition("elimination intermediate exceeds 128 bits")
}

fn mul(a: &Zw, b: &Zw) -> Result<Zw> {
    let mut out = [0i128; 4];
    for i in 0..4 {
        if a[i] == 0 {
            continue;
        }
        for j in 0..4 {
            let p = a[i].checked_mul(b[j]).ok_or_else(overflow)?;
            let slot = &mut out[(i + j) % 4];
            *slot = if i + j < 4 { slot.checked_add(p) } else { slot.checked_sub(p) }.ok_or_else(overflow)?;
        }
    }
    Ok(out)
}

/// Divides every entry by `√2` while that stays integral; returns the
/// number of divisions.
fn reduce_sqrt2(table: &mut [Zw]) -> Result<i32> {
    let mut count = 0;
    loop {
        if table.iter().all(|z| *z == [0; 4]) {
            return Ok(count);
        }
        // z / √2 = z (ω − ω³) / 2
        let mut next = Vec::with_capacity(table.len());
        for z in table.iter() {
            let w = mul(z, &[0, 1, 0, -1])?;
            if w.iter().any(|c| c % 2 != 0) {
                return Ok(count);
            }
            next.push(w.map(|c| c / 2));
        }
        table.copy_from_slice(&next);
        count += 1;
    }
}

fn omega_pow(k: u8) -> Zw {
    let mut z = [0i128; 4];
    z[(k % 4) as usize] = if k % 8 < 4 { 1 } else { -1 };
    z
}

/// Values over the assignments of `vars`, bit `i` of the index holding
/// `vars[i]`.
struct Factor {
    vars: Vec<usize>,
    table: Vec<Zw>,
}

impl Factor {
    fn value(&self, scope: &[usize], assignment: usize) -> &Zw {
        let mut idx = 0;
        for (i, v) in self.vars.iter().enumerate() {
            let pos = scope.binary_search(v).expect("factor scope is a subset");
            idx |= ((assignment >> pos) & 1) << i;
        }
        &self.table[idx]
    }
}

/// `2^{−e/2} Σ_x ω^{p(x)}` by variable elimination.
pub fn eliminate_sum(p: &PhasePolynomialMod8) -> Result<CyclotomicAmplitude> {
    if p.is_flagged_zero() {
        return Ok(CyclotomicAmplitude::zero());
    }
    let v = p.v();
    let mut factors: Vec<Factor> = Vec::new();
    for (x, &a) in p.linear().iter().enumerate() {
        factors.push(Factor { vars: vec![x], table: vec![omega_pow(0), omega_pow(a)] });
    }
    for &(i, j) in p.quadratic() {
        let (one, minus) = (omega_pow(0), omega_pow(4));
        factors.push(Factor { vars: vec![i, j], table: vec![one, one, one, minus] });
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); v];
    for &(i, j) in p.quadratic() {
        adj[i].insert(j);
        adj[j].insert(i);
    }
    let mut alive = vec![true; v];
    let mut scalar = omega_pow(p.constant());
    // factored-out powers of √2
    let mut e = p.scale_exponent();

    for _ in 0..v {
        let x = (0..v).filter(|&x| alive[x]).min_by_key(|&x| adj[x].len()).expect("variables remain");
        let (bucket, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&x));
        factors = rest;
        let mut scope: Vec<usize> = bucket.iter().flat_map(|f| f.vars.iter().copied()).collect();
        scope.sort_unstable();
        scope.dedup();
        if scope.len() > MAX_FACTOR_SCOPE {
            return Err(Error::WidthOverflow { width: scope.len(), limit: MAX_FACTOR_SCOPE });
        }
        let out_vars: Vec<usize> = scope.iter().copied().filter(|&y| y != x).collect();
        let xpos = scope.binary_search(&x).expect("x in scope");
        let mut table = vec![[0i128; 4]; 1 << out_vars.len()];
        for (out_idx, slot) in table.iter_mut().enumerate() {
            // spread out_idx around the bit of x
            let low = out_idx & ((1 << xpos) - 1);
            let high = (out_idx >> xpos) << (xpos + 1);
            for xv in 0..2usize {
                let assignment = high | (xv << xpos) | low;
                let mut prod = omega_pow(0);
                for f in &bucket {
                    prod = mul(&prod, f.value(&scope, assignment))?;
                }
                for k in 0..4 {
                    slot[k] = slot[k].checked_add(prod[k]).ok_or_else(overflow)?;
                }
            }
        }
        e -= reduce_sqrt2(&mut table)?;
        if out_vars.is_empty() {
            scalar = mul(&scalar, &table[0])?;
        } else {
            factors.push(Factor { vars: out_vars.clone(), table });
        }
        // the new factor links every neighbour of x
        alive[x] = false;
        let nbrs: Vec<usize> = std::mem::take(&mut adj[x]).into_iter().collect();
        for &a in &nbrs {
            adj[a].remove(&x);
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    for f in &factors {
        scalar = mul(&scalar, &f.table[0])?;
    }
    to_amplitude(scalar, e)
}

/// Canonicalizes in i128, then narrows to i64.
fn to_amplitude(mut z: Zw, mut e: i32) -> Result<CyclotomicAmplitude> {
    if z == [0; 4] {
        return Ok(CyclotomicAmplitude::zero());
    }
    let mut one = [z];
    e -= reduce_sqrt2(&mut one)?;
    z = one[0];
    let mut c = [0i64; 4];
    for (dst, src) in c.iter_mut().zip(z) {
        *dst = i64::try_from(src).map_err(|_| Error::precondition("amplitude numerator exceeds 64 bits"))?;
    }
    Ok(CyclotomicAmplitude::new(c, e))
}
