//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use fgs_core::boolean::{BooleanCircuit, CircuitBuilder, CnfFormula, GateKind, Literal, Wire};
use fgs_core::circuit::{Gate, QuantumCircuit};
use fgs_core::pathsum::PhasePolynomialMod8;
use fgs_core::reversible::{Control, RevGate, ReversibleCircuit};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn maybe_not(b: &mut CircuitBuilder, w: Wire, rng: &mut ChaCha8Rng) -> Wire {
    if rng.gen_bool(0.35) {
        b.not(w)
    } else {
        w
    }
}

/// `n` inputs, `gates` AND/OR gates over earlier wires with random NOTs.
/// The output is the last AND/OR gate, possibly negated.
pub fn random_circuit_with(rng: &mut ChaCha8Rng, n: usize, gates: usize) -> BooleanCircuit {
    assert!(n >= 1 && gates >= 1);
    let mut b = CircuitBuilder::new(n);
    let mut pool: Vec<Wire> = (0..n).map(Wire::Input).collect();
    let mut last = pool[0];
    for _ in 0..gates {
        let i = rng.gen_range(0..pool.len());
        let mut j = rng.gen_range(0..pool.len());
        if pool.len() > 1 {
            while j == i {
                j = rng.gen_range(0..pool.len());
            }
        }
        let a = maybe_not(&mut b, pool[i], rng);
        let c = maybe_not(&mut b, pool[j], rng);
        last = if rng.gen_bool(0.5) { b.and(a, c) } else { b.or(a, c) };
        pool.push(last);
    }
    let out = maybe_not(&mut b, last, rng);
    b.finish(out)
}

/// `n ∈ [2, 5]`, `ξ ∈ [1, 4]`.
pub fn random_circuit(rng: &mut ChaCha8Rng) -> BooleanCircuit {
    let n = rng.gen_range(2..=5);
    let gates = rng.gen_range(1..=4);
    random_circuit_with(rng, n, gates)
}

/// `f = (x1 ∧ g) ∨ (¬x1 ∧ ¬g)` with `g` a random circuit on `x2..xn`;
/// exactly half the inputs are accepted.
pub fn balanced_circuit(rng: &mut ChaCha8Rng) -> BooleanCircuit {
    let n = rng.gen_range(2..=3);
    let mut b = CircuitBuilder::new(n);
    let mut g = Wire::Input(rng.gen_range(1..n));
    if n > 2 && rng.gen_bool(0.6) {
        let (a, c) = (Wire::Input(1), Wire::Input(2));
        let a = maybe_not(&mut b, a, rng);
        g = if rng.gen_bool(0.5) { b.and(a, c) } else { b.or(a, c) };
    }
    let x1 = Wire::Input(0);
    let left = b.and(x1, g);
    let nx1 = b.not(x1);
    let ng = b.not(g);
    let right = b.and(nx1, ng);
    let out = b.or(left, right);
    b.finish(out)
}

/// A 3-CNF equivalent to one literal, so exactly half the inputs satisfy it.
pub fn balanced_3cnf(rng: &mut ChaCha8Rng) -> CnfFormula {
    let n = rng.gen_range(3..=4);
    let mut vars: Vec<usize> = (1..=n).collect();
    vars.shuffle(rng);
    let (p, a, c) = (vars[0], vars[1], vars[2]);
    let pin = if rng.gen_bool(0.5) { Literal::pos(p) } else { Literal::neg(p) };
    let lit = |v: usize, s: bool| if s { Literal::pos(v) } else { Literal::neg(v) };
    let mut clauses: Vec<Vec<Literal>> = if rng.gen_bool(0.5) {
        vec![vec![pin, lit(a, true), lit(a, true)], vec![pin, lit(a, false), lit(a, false)]]
    } else {
        [(true, true), (true, false), (false, true), (false, false)]
            .iter()
            .map(|&(sa, sc)| vec![pin, lit(a, sa), lit(c, sc)])
            .collect()
    };
    clauses.shuffle(rng);
    CnfFormula::new(n, clauses).unwrap()
}

/// Clauses of exactly `k` distinct variables.
pub fn random_kcnf(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> CnfFormula {
    let clauses = (0..m)
        .map(|_| {
            let mut vars: Vec<usize> = (1..=n).collect();
            vars.shuffle(rng);
            vars[..k]
                .iter()
                .map(|&v| if rng.gen_bool(0.5) { Literal::pos(v) } else { Literal::neg(v) })
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses).unwrap()
}

/// `x = a ∧ h(x)` where `a` pins every variable, so `#f = h(a) ∈ {0, 1}`.
pub fn pinned_circuit(rng: &mut ChaCha8Rng) -> BooleanCircuit {
    let n = rng.gen_range(1..=5);
    let gates = rng.gen_range(1..=3);
    let h = random_circuit_with(rng, n, gates);
    let mut b = CircuitBuilder::new(n);
    // replay h's gates so its wires stay valid in the new builder
    let mut map: Vec<Wire> = Vec::new();
    let resolve = |w: Wire, map: &[Wire]| match w {
        Wire::Input(i) => Wire::Input(i),
        Wire::Gate(g) => map[g],
    };
    for g in h.gates() {
        use fgs_core::boolean::BoolGate;
        let w = match *g {
            BoolGate::And(a, c) => b.and(resolve(a, &map), resolve(c, &map)),
            BoolGate::Or(a, c) => b.or(resolve(a, &map), resolve(c, &map)),
            BoolGate::Not(a) => b.not(resolve(a, &map)),
        };
        map.push(w);
    }
    let h_out = resolve(h.output(), &map);
    let lits: Vec<Wire> = (0..n)
        .map(|i| if rng.gen_bool(0.5) { Wire::Input(i) } else { b.not(Wire::Input(i)) })
        .collect();
    let pin = b.balanced(lits, GateKind::And);
    let out = b.and(pin, h_out);
    b.finish(out)
}

pub fn random_reversible(rng: &mut ChaCha8Rng, width: usize, gates: usize) -> ReversibleCircuit {
    let mut out = Vec::with_capacity(gates);
    for _ in 0..gates {
        let mut bits: Vec<usize> = (0..width).collect();
        bits.shuffle(rng);
        let ctrl = |b: usize, rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { Control::pos(b) } else { Control::neg(b) };
        out.push(match rng.gen_range(0..4) {
            0 => RevGate::Not(bits[0]),
            1 => RevGate::Cnot(bits[0], bits[1]),
            2 if width >= 3 => RevGate::Toffoli(bits[0], bits[1], bits[2]),
            _ => {
                let k = rng.gen_range(1..width);
                let controls = bits[1..=k].iter().map(|&b| ctrl(b, rng)).collect();
                RevGate::gtoffoli(controls, bits[0])
            }
        });
    }
    ReversibleCircuit::plain(width, out).unwrap()
}

/// A random {H, T, CZ} circuit with exactly `h` Hadamards.
pub fn random_htcz(rng: &mut ChaCha8Rng, width: usize, h: usize) -> QuantumCircuit {
    let mut kinds: Vec<u8> = vec![0; h];
    let others = rng.gen_range(width..=3 * width);
    kinds.extend((0..others).map(|_| rng.gen_range(1..=2)));
    kinds.shuffle(rng);
    let mut qc = QuantumCircuit::empty(width);
    for kind in kinds {
        let q = rng.gen_range(0..width);
        let g = match kind {
            0 => Gate::H(q),
            1 => Gate::T(q),
            _ if width >= 2 => {
                let mut r = rng.gen_range(0..width);
                while r == q {
                    r = rng.gen_range(0..width);
                }
                Gate::Cz(q, r)
            }
            _ => Gate::T(q),
        };
        qc.push(g).unwrap();
    }
    qc
}

/// A random Clifford+T circuit with exactly `t` gates from {T, TDG}.
pub fn random_clifford_t(rng: &mut ChaCha8Rng, width: usize, t: usize) -> QuantumCircuit {
    let mut kinds: Vec<bool> = vec![true; t];
    kinds.extend((0..rng.gen_range(2..=12)).map(|_| false));
    kinds.shuffle(rng);
    let mut qc = QuantumCircuit::empty(width);
    for is_t in kinds {
        let q = rng.gen_range(0..width);
        let r = (q + rng.gen_range(1..width.max(2))) % width;
        let g = if is_t {
            if rng.gen_bool(0.5) {
                Gate::T(q)
            } else {
                Gate::Tdg(q)
            }
        } else {
            match rng.gen_range(0..8) {
                0 | 1 => Gate::H(q),
                2 => Gate::S(q),
                3 => Gate::Sdg(q),
                4 => Gate::X(q),
                5 => Gate::Z(q),
                6 if width >= 2 => Gate::Cnot(q, r),
                7 if width >= 2 => Gate::Cz(q, r),
                _ => Gate::H(q),
            }
        };
        qc.push(g).unwrap();
    }
    qc
}

/// Random degree-2 mod-8 phase polynomial on `v` variables.
pub fn random_phase_poly(rng: &mut ChaCha8Rng, v: usize) -> PhasePolynomialMod8 {
    let linear: Vec<u8> = (0..v).map(|_| rng.gen_range(0..8)).collect();
    let mut pairs = Vec::new();
    for i in 0..v {
        for j in i + 1..v {
            if rng.gen_bool(0.4) {
                pairs.push((i, j));
            }
        }
    }
    let e = rng.gen_range(0..=v as i32);
    PhasePolynomialMod8::new(v, rng.gen_range(0..8), linear, pairs, e).unwrap()
}

pub fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(0.5)).collect()
}
