//! Exact amplitudes of {H, T, CZ} circuits as sums `Σ_x ω^{p(x)}` over a
//! degree-2 phase polynomial modulo 8.

pub mod counting;
pub mod cyclotomic;
pub mod eliminate;
pub mod poly;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, QuantumCircuit};
use crate::error::{Error, Result};

pub use counting::{
    amplitude_from_polynomial, count_roots_mod8, default_split, evaluate_all, indicator_poly, mod_amplifier,
    partial_sum, CountingAmplitude, CountingReport,
};
pub use cyclotomic::CyclotomicAmplitude;
pub use eliminate::eliminate_sum;
pub use poly::{ComposeRoute, IntPolynomial, UniPoly};

pub const MAX_DIRECT_VARS: usize = 30;

/// `amplitude = 2^{−e/2} Σ_{x∈{0,1}^v} ω^{p(x)}` with
/// `p(x) = β + Σ α_i x_i + 4 Σ_{(i,j)∈Q} x_i x_j (mod 8)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhasePolynomialMod8 {
    v: usize,
    constant: u8,
    linear: Vec<u8>,
    /// Pairs `i < j` whose coefficient is 4; every other pair is 0.
    quadratic: BTreeSet<(usize, usize)>,
    scale_exponent: i32,
    /// Set when a boundary condition is unsatisfiable: the sum is exactly 0.
    zero: bool,
}

impl PhasePolynomialMod8 {
    pub fn new(
        v: usize,
        constant: u8,
        linear: Vec<u8>,
        quadratic: Vec<(usize, usize)>,
        scale_exponent: i32,
    ) -> Result<Self> {
        if linear.len() != v {
            return Err(Error::LengthMismatch { expected: v, got: linear.len() });
        }
        let mut q = BTreeSet::new();
        for (i, j) in quadratic {
            if i == j || i >= v || j >= v {
                return Err(Error::precondition(format!("bad quadratic pair ({i}, {j}) for v = {v}")));
            }
            let pair = (i.min(j), i.max(j));
            if !q.insert(pair) {
                q.remove(&pair);
            }
        }
        Ok(PhasePolynomialMod8 {
            v,
            constant: constant % 8,
            linear: linear.into_iter().map(|a| a % 8).collect(),
            quadratic: q,
            scale_exponent,
            zero: false,
        })
    }

    pub fn flagged_zero(scale_exponent: i32) -> Self {
        PhasePolynomialMod8 {
            v: 0,
            constant: 0,
            linear: vec![],
            quadratic: BTreeSet::new(),
            scale_exponent,
            zero: true,
        }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn constant(&self) -> u8 {
        self.constant
    }

    pub fn linear(&self) -> &[u8] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeSet<(usize, usize)> {
        &self.quadratic
    }

    /// Coefficient of `x_i x_j`: 4 or 0.
    pub fn quadratic_coeff(&self, i: usize, j: usize) -> u8 {
        if self.quadratic.contains(&(i.min(j), i.max(j))) {
            4
        } else {
            0
        }
    }

    pub fn scale_exponent(&self) -> i32 {
        self.scale_exponent
    }

    pub fn is_flagged_zero(&self) -> bool {
        self.zero
    }

    pub fn eval(&self, x: &[bool]) -> Result<u8> {
        if x.len() != self.v {
            return Err(Error::LengthMismatch { expected: self.v, got: x.len() });
        }
        let mut acc = self.constant as u32;
        for (i, &b) in x.iter().enumerate() {
            if b {
                acc += self.linear[i] as u32;
            }
        }
        for &(i, j) in &self.quadratic {
            if x[i] && x[j] {
                acc += 4;
            }
        }
        Ok((acc % 8) as u8)
    }

    /// Integer lift with coefficients in `0..8` (quadratic coefficients 4).
    ///
    /// Panics when `v > 32`.
    pub fn to_int_polynomial(&self) -> IntPolynomial {
        let mut p = IntPolynomial::constant(self.v, self.constant);
        for (i, &a) in self.linear.iter().enumerate() {
            p.add_term(1 << i, BigInt::from(a));
        }
        for &(i, j) in &self.quadratic {
            p.add_term((1 << i) | (1 << j), BigInt::from(4));
        }
        p
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Wire {
    Const(bool),
    Var(usize),
}

/// Mutable sum-over-paths form with sparse adjacency for the 4-weighted
/// cross terms.
struct Builder {
    constant: u8,
    linear: Vec<u8>,
    adj: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
    e: i32,
    zero: bool,
}

impl Builder {
    fn fresh(&mut self) -> usize {
        self.linear.push(0);
        self.adj.push(BTreeSet::new());
        self.alive.push(true);
        self.linear.len() - 1
    }

    fn add_linear(&mut self, x: usize, a: u8) {
        self.linear[x] = (self.linear[x] + a) % 8;
    }

    fn toggle_edge(&mut self, a: usize, b: usize) {
        if a == b {
            // 4·x·x = 4·x
            self.add_linear(a, 4);
        } else if !self.adj[a].remove(&b) {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        } else {
            self.adj[b].remove(&a);
        }
    }

    /// Adds `4·u·w` for wire values `u`, `w`.
    fn add_product4(&mut self, u: Wire, w: Wire) {
        match (u, w) {
            (Wire::Const(false), _) | (_, Wire::Const(false)) => {}
            (Wire::Const(true), Wire::Const(true)) => self.constant = (self.constant + 4) % 8,
            (Wire::Const(true), Wire::Var(x)) | (Wire::Var(x), Wire::Const(true)) => self.add_linear(x, 4),
            (Wire::Var(a), Wire::Var(b)) => self.toggle_edge(a, b),
        }
    }

    /// Replaces `x` by the constant `c` everywhere.
    fn substitute_const(&mut self, x: usize, c: bool) {
        if c {
            self.constant = (self.constant + self.linear[x]) % 8;
            let nbrs: Vec<usize> = self.adj[x].iter().copied().collect();
            for y in nbrs {
                self.add_linear(y, 4);
            }
        }
        self.remove(x);
    }

    fn remove(&mut self, x: usize) {
        let nbrs: Vec<usize> = std::mem::take(&mut self.adj[x]).into_iter().collect();
        for y in nbrs {
            self.adj[y].remove(&x);
        }
        self.linear[x] = 0;
        self.alive[x] = false;
    }

    /// One elimination step on a variable whose linear coefficient is 0 or
    /// 4. Summing it out forces `L = α/4 ⊕ ⊕_{y∈N(x)} y` to 0; a pivot
    /// `y ∈ N(x)` is then solved for and substituted. Returns whether the
    /// polynomial changed.
    fn eliminate(&mut self, x: usize) -> bool {
        let alpha = self.linear[x];
        if alpha % 4 != 0 {
            return false;
        }
        let c = alpha == 4;
        let nbrs: Vec<usize> = self.adj[x].iter().copied().collect();
        if nbrs.is_empty() {
            if c {
                self.zero = true;
            } else {
                self.e -= 2;
            }
            self.remove(x);
            return true;
        }
        let pivot = nbrs
            .iter()
            .copied()
            .find(|&y| self.linear[y] % 2 == 0)
            .or(if nbrs.len() <= 2 { Some(nbrs[0]) } else { None });
        let Some(y) = pivot else { return false };
        let rest: Vec<usize> = nbrs.iter().copied().filter(|&z| z != y).collect();
        self.remove(x);

        // y := c ⊕ Σ rest
        let alpha_y = self.linear[y];
        let y_nbrs: Vec<usize> = self.adj[y].iter().copied().collect();
        self.remove(y);
        if c {
            self.constant = (self.constant + alpha_y) % 8;
        }
        // α_y · lift(c ⊕ S) = α_y c + α_y (1 − 2c) (Σ z − 2 Σ_{z<z'} z z')
        let lin = if c { (8 - alpha_y) % 8 } else { alpha_y };
        for &z in &rest {
            self.add_linear(z, lin);
        }
        if alpha_y % 4 == 2 {
            for (i, &a) in rest.iter().enumerate() {
                for &b in &rest[i + 1..] {
                    self.toggle_edge(a, b);
                }
            }
        }
        // 4 w (c ⊕ S) = 4 w c + 4 w Σ z  (mod 8)
        for &w in &y_nbrs {
            if c {
                self.add_linear(w, 4);
            }
            for &z in &rest {
                self.toggle_edge(w, z);
            }
        }
        self.e -= 2;
        true
    }

    /// Sums out a variable whose linear coefficient is 2 or 6:
    /// `Σ_x ω^{αx + 4xL} = √2 ω^{±(1 − 2L)}`, and `2L` for a parity `L`
    /// lifts to `2Σy + 4Σ_{y<y'} y y'` modulo 8.
    fn eliminate_omega(&mut self, x: usize) {
        let alpha = self.linear[x];
        debug_assert!(alpha % 4 == 2);
        let (phase, lin) = if alpha == 2 { (1, 6) } else { (7, 2) };
        let nbrs: Vec<usize> = self.adj[x].iter().copied().collect();
        self.remove(x);
        self.constant = (self.constant + phase) % 8;
        for &y in &nbrs {
            self.add_linear(y, lin);
        }
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
        self.e -= 1;
    }

    fn simplify(&mut self) {
        loop {
            if self.zero {
                return;
            }
            let mut changed = false;
            for x in 0..self.linear.len() {
                if self.alive[x] && self.eliminate(x) {
                    changed = true;
                    if self.zero {
                        return;
                    }
                }
            }
            if changed {
                continue;
            }
            // fall back to the ω rule on the sparsest candidate
            let candidate = (0..self.linear.len())
                .filter(|&x| self.alive[x] && self.linear[x] % 4 == 2)
                .min_by_key(|&x| self.adj[x].len());
            match candidate {
                Some(x) => self.eliminate_omega(x),
                None => return,
            }
        }
    }

    fn finish(self) -> PhasePolynomialMod8 {
        if self.zero {
            return PhasePolynomialMod8::flagged_zero(self.e);
        }
        let live: Vec<usize> = (0..self.linear.len()).filter(|&x| self.alive[x]).collect();
        let mut index = vec![usize::MAX; self.linear.len()];
        for (new, &old) in live.iter().enumerate() {
            index[old] = new;
        }
        let linear = live.iter().map(|&x| self.linear[x]).collect();
        let mut quadratic = BTreeSet::new();
        for &a in &live {
            for &b in &self.adj[a] {
                if a < b {
                    quadratic.insert((index[a], index[b]));
                }
            }
        }
        PhasePolynomialMod8 {
            v: live.len(),
            constant: self.constant,
            linear,
            quadratic,
            scale_exponent: self.e,
            zero: false,
        }
    }

    fn from_polynomial(p: &PhasePolynomialMod8) -> Self {
        let mut adj = vec![BTreeSet::new(); p.v];
        for &(i, j) in &p.quadratic {
            adj[i].insert(j);
            adj[j].insert(i);
        }
        Builder {
            constant: p.constant,
            linear: p.linear.clone(),
            adj,
            alive: vec![true; p.v],
            e: p.scale_exponent,
            zero: p.zero,
        }
    }
}

/// Sum-over-paths form of `⟨a|qc|b⟩` for a circuit over {H, T, CZ}.
///
/// Each H gives its output wire a fresh variable; output variables are then
/// fixed by `a`. `scale_exponent` is the number of H gates and `v ≤ h`.
pub fn extract_phase_polynomial(qc: &QuantumCircuit, a: &[bool], b: &[bool]) -> Result<PhasePolynomialMod8> {
    let n = qc.width();
    for s in [a, b] {
        if s.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: s.len() });
        }
    }
    let mut bld = Builder { constant: 0, linear: vec![], adj: vec![], alive: vec![], e: 0, zero: false };
    let mut wires: Vec<Wire> = b.iter().map(|&x| Wire::Const(x)).collect();
    for g in qc.gates() {
        match *g {
            Gate::H(q) => {
                let y = bld.fresh();
                bld.add_product4(wires[q], Wire::Var(y));
                wires[q] = Wire::Var(y);
                bld.e += 1;
            }
            Gate::T(q) => match wires[q] {
                Wire::Const(true) => bld.constant = (bld.constant + 1) % 8,
                Wire::Const(false) => {}
                Wire::Var(x) => bld.add_linear(x, 1),
            },
            Gate::Cz(p, q) => bld.add_product4(wires[p], wires[q]),
            ref other => {
                return Err(Error::UnsupportedGate(format!(
                    "{} is outside {{H, T, CZ}}; rewrite the circuit first",
                    other.name()
                )))
            }
        }
    }
    for (q, &w) in wires.iter().enumerate() {
        match w {
            Wire::Const(c) if c != a[q] => bld.zero = true,
            Wire::Const(_) => {}
            Wire::Var(x) => bld.substitute_const(x, a[q]),
        }
    }
    Ok(bld.finish())
}

/// Removes variables by summing out those with an even linear coefficient.
/// Preserves the amplitude exactly; every remaining variable has an odd
/// linear coefficient or (for 0/4) only odd-coefficient neighbours.
pub fn simplify(p: &PhasePolynomialMod8) -> PhasePolynomialMod8 {
    let mut b = Builder::from_polynomial(p);
    b.simplify();
    b.finish()
}

/// `2^{−e/2} Σ_x ω^{p(x)}` by Gray-code enumeration.
pub fn direct_sum(p: &PhasePolynomialMod8) -> Result<CyclotomicAmplitude> {
    if p.zero {
        return Ok(CyclotomicAmplitude::zero());
    }
    Ok(CyclotomicAmplitude::from_counts(&residue_counts(p)?, p.scale_exponent))
}

/// `N_j = #{x : p(x) ≡ j (mod 8)}` by enumeration.
pub fn residue_counts(p: &PhasePolynomialMod8) -> Result<[u64; 8]> {
    if p.v > MAX_DIRECT_VARS {
        return Err(Error::WidthOverflow { width: p.v, limit: MAX_DIRECT_VARS });
    }
    let mut adj = vec![Vec::new(); p.v];
    for &(i, j) in &p.quadratic {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut x = vec![false; p.v];
    // parity of set neighbours of each variable
    let mut nb = vec![false; p.v];
    let mut value = p.constant;
    let mut counts = [0u64; 8];
    counts[value as usize] += 1;
    for step in 1u64..(1u64 << p.v) {
        let i = step.trailing_zeros() as usize;
        let delta = (p.linear[i] + if nb[i] { 4 } else { 0 }) % 8;
        value = if x[i] { (value + 8 - delta) % 8 } else { (value + delta) % 8 };
        x[i] = !x[i];
        for &j in &adj[i] {
            nb[j] = !nb[j];
        }
        counts[value as usize] += 1;
    }
    Ok(counts)
}

/// Above this many variables [`exact_sum`] switches to elimination.
pub const DIRECT_SUM_PREFERRED: usize = 20;

/// [`direct_sum`] for small `v`, [`eliminate_sum`] otherwise.
pub fn exact_sum(p: &PhasePolynomialMod8) -> Result<CyclotomicAmplitude> {
    if p.v() <= DIRECT_SUM_PREFERRED {
        direct_sum(p)
    } else {
        eliminate_sum(p)
    }
}

/// Exact `⟨a|qc|b⟩` via extraction, simplification, and [`exact_sum`].
pub fn amplitude_pathsum(qc: &QuantumCircuit, a: &[bool], b: &[bool]) -> Result<(CyclotomicAmplitude, PhasePolynomialMod8)> {
    let p = simplify(&extract_phase_polynomial(qc, a, b)?);
    Ok((exact_sum(&p)?, p))
}

/// Exact `⟨a|qc|b⟩` via the root-counting pipeline on the extracted
/// polynomial; `k` defaults to [`default_split`]. A polynomial wider than
/// the dense tables allow is first passed through [`simplify`]. Returns the
/// polynomial actually counted.
pub fn amplitude_via_counting(
    qc: &QuantumCircuit,
    a: &[bool],
    b: &[bool],
    k: Option<usize>,
) -> Result<(CountingAmplitude, PhasePolynomialMod8)> {
    let mut p = extract_phase_polynomial(qc, a, b)?;
    if p.v() > poly::MAX_DENSE_VARS {
        p = simplify(&p);
    }
    Ok((amplitude_from_polynomial(&p, k)?, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn circuit(width: usize, gates: Vec<Gate>) -> QuantumCircuit {
        QuantumCircuit::new(width, gates).unwrap()
    }

    #[test]
    fn extraction_examples() {
        let h = circuit(1, vec![Gate::H(0)]);
        let p = extract_phase_polynomial(&h, &[false], &[false]).unwrap();
        assert_eq!((p.v(), p.constant(), p.scale_exponent()), (0, 0, 1));
        let amp = direct_sum(&p).unwrap().to_complex();
        assert!((amp - Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);

        let t = circuit(1, vec![Gate::T(0)]);
        let p = extract_phase_polynomial(&t, &[true], &[true]).unwrap();
        assert_eq!((p.v(), p.constant()), (0, 1));
        assert_eq!(direct_sum(&p).unwrap(), CyclotomicAmplitude::new([0, 1, 0, 0], 0));

        let hth = circuit(1, vec![Gate::H(0), Gate::T(0), Gate::H(0)]);
        let p = extract_phase_polynomial(&hth, &[false], &[false]).unwrap();
        assert_eq!(direct_sum(&p).unwrap(), CyclotomicAmplitude::new([1, 1, 0, 0], 2));
        let via = amplitude_via_counting(&hth, &[false], &[false], None).unwrap().0;
        assert_eq!(via.amplitude, CyclotomicAmplitude::new([1, 1, 0, 0], 2));
    }

    #[test]
    fn inconsistent_boundary_is_flagged_zero() {
        let t = circuit(1, vec![Gate::T(0)]);
        let p = extract_phase_polynomial(&t, &[true], &[false]).unwrap();
        assert!(p.is_flagged_zero());
        assert!(direct_sum(&p).unwrap().is_zero());
        assert!(amplitude_via_counting(&t, &[true], &[false], None).unwrap().0.amplitude.is_zero());
        let x = circuit(1, vec![Gate::X(0)]);
        assert!(matches!(extract_phase_polynomial(&x, &[true], &[false]), Err(Error::UnsupportedGate(_))));
    }

    #[test]
    fn direct_sum_examples() {
        let p = PhasePolynomialMod8::new(1, 0, vec![4], vec![], 0).unwrap();
        assert!(direct_sum(&p).unwrap().is_zero());
        let p = PhasePolynomialMod8::new(1, 0, vec![1], vec![], 0).unwrap();
        assert_eq!(direct_sum(&p).unwrap(), CyclotomicAmplitude::new([1, 1, 0, 0], 0));
        let p = PhasePolynomialMod8::new(3, 0, vec![0; 3], vec![], 0).unwrap();
        assert_eq!(direct_sum(&p).unwrap(), CyclotomicAmplitude::new([8, 0, 0, 0], 0));
        let big = PhasePolynomialMod8::new(31, 0, vec![0; 31], vec![], 0).unwrap();
        assert!(matches!(direct_sum(&big), Err(Error::WidthOverflow { .. })));
    }

    #[test]
    fn simplify_preserves_value() {
        let cases = [
            PhasePolynomialMod8::new(4, 3, vec![0, 1, 2, 4], vec![(0, 1), (0, 2), (0, 3), (1, 2)], 4).unwrap(),
            PhasePolynomialMod8::new(5, 0, vec![4, 3, 6, 1, 0], vec![(0, 1), (0, 2), (0, 4), (2, 3), (3, 4)], 5).unwrap(),
            PhasePolynomialMod8::new(3, 1, vec![4, 0, 0], vec![], 3).unwrap(),
            PhasePolynomialMod8::new(4, 0, vec![0, 7, 5, 3], vec![(0, 1), (0, 2), (0, 3)], 2).unwrap(),
        ];
        for p in cases {
            let s = simplify(&p);
            assert!(s.v() <= p.v());
            assert_eq!(direct_sum(&s).unwrap(), direct_sum(&p).unwrap(), "{p:?}");
        }
    }

    #[test]
    fn simplify_random_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let v = rng.gen_range(1..=10);
            let linear = (0..v).map(|_| rng.gen_range(0..8)).collect();
            let pairs = (0..v)
                .flat_map(|i| (i + 1..v).map(move |j| (i, j)))
                .filter(|_| rng.gen_bool(0.4))
                .collect();
            let p = PhasePolynomialMod8::new(v, rng.gen_range(0..8), linear, pairs, v as i32).unwrap();
            let s = simplify(&p);
            assert!(s.is_flagged_zero() || s.linear().iter().all(|&a| a % 2 == 1 || a % 4 == 0));
            assert_eq!(direct_sum(&s).unwrap(), direct_sum(&p).unwrap(), "{p:?}");
        }
    }

    #[test]
    fn hh_cancels() {
        let hh = circuit(1, vec![Gate::H(0), Gate::H(0)]);
        for (a, b, want) in [(false, false, 1), (true, true, 1), (true, false, 0)] {
            let (amp, p) = amplitude_pathsum(&hh, &[a], &[b]).unwrap();
            assert_eq!(p.v(), 0);
            assert_eq!(amp, CyclotomicAmplitude::new([want, 0, 0, 0], 0));
        }
    }
}
