//! Reversible NOT/CNOT/TOFFOLI circuits: per-gate AND/OR gadgets, the
//! counter-based k-CNF compiler, and borrowed-ancilla decomposition of
//! generalized TOFFOLIs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boolean::{BoolGate, BooleanCircuit, CnfFormula, GateKind, Wire};
use crate::error::{Error, Result};

/// A control line with its polarity: `positive` fires on 1, otherwise on 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub bit: usize,
    pub positive: bool,
}

impl Control {
    pub fn pos(bit: usize) -> Self {
        Control { bit, positive: true }
    }

    pub fn neg(bit: usize) -> Self {
        Control { bit, positive: false }
    }

    pub fn negated(self) -> Self {
        Control { bit: self.bit, positive: !self.positive }
    }

    pub fn fires(&self, bits: &[bool]) -> bool {
        bits[self.bit] == self.positive
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.positive { '+' } else { '-' }, self.bit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RevGate {
    Not(usize),
    Cnot(usize, usize),
    Toffoli(usize, usize, usize),
    GToffoli { controls: Vec<Control>, target: usize },
}

impl RevGate {
    pub fn gtoffoli(controls: Vec<Control>, target: usize) -> Self {
        RevGate::GToffoli { controls, target }
    }

    /// All bit indices touched, controls first, target last.
    pub fn bits(&self) -> Vec<usize> {
        match self {
            RevGate::Not(t) => vec![*t],
            RevGate::Cnot(c, t) => vec![*c, *t],
            RevGate::Toffoli(a, b, t) => vec![*a, *b, *t],
            RevGate::GToffoli { controls, target } => {
                controls.iter().map(|c| c.bit).chain(std::iter::once(*target)).collect()
            }
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let bits = self.bits();
        for (i, &b) in bits.iter().enumerate() {
            if b >= width {
                return Err(Error::IndexOutOfRange { index: b, width });
            }
            if bits[..i].contains(&b) {
                return Err(Error::DuplicateIndex(b));
            }
        }
        Ok(())
    }

    pub fn apply(&self, bits: &mut [bool]) {
        match self {
            RevGate::Not(t) => bits[*t] ^= true,
            RevGate::Cnot(c, t) => bits[*t] ^= bits[*c],
            RevGate::Toffoli(a, b, t) => bits[*t] ^= bits[*a] && bits[*b],
            RevGate::GToffoli { controls, target } => {
                if controls.iter().all(|c| c.fires(bits)) {
                    bits[*target] ^= true;
                }
            }
        }
    }
}

impl fmt::Display for RevGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RevGate::Not(t) => write!(f, "NOT {t}"),
            RevGate::Cnot(c, t) => write!(f, "CNOT {c} {t}"),
            RevGate::Toffoli(a, b, t) => write!(f, "TOF {a} {b} {t}"),
            RevGate::GToffoli { controls, target } => {
                write!(f, "GTOF")?;
                for c in controls {
                    write!(f, " {c}")?;
                }
                write!(f, " {target}")
            }
        }
    }
}

/// How the ancillas of a compiled circuit are spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AncillaBreakdown {
    /// No ancilla accounting (hand-built or component circuits).
    None,
    /// One fresh ancilla per AND and per OR gate.
    PerGate { and: usize, or: usize },
    /// The clause-counter construction: reusable clause scratch, the counter
    /// register, one borrowed bit for TOFFOLI decompositions, one output bit.
    Counter { clause_scratch: usize, counter: usize, borrowed: usize, output: usize },
}

impl AncillaBreakdown {
    pub fn total(&self) -> usize {
        match *self {
            AncillaBreakdown::None => 0,
            AncillaBreakdown::PerGate { and, or } => and + or,
            AncillaBreakdown::Counter { clause_scratch, counter, borrowed, output } => {
                clause_scratch + counter + borrowed + output
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaLedger {
    /// Payload (input) bits, occupying indices `0..n`.
    pub n: usize,
    pub xi: usize,
    pub breakdown: AncillaBreakdown,
    /// Bit carrying `f(x)` after the circuit runs on `x0^ξ`.
    pub output_bit: Option<usize>,
}

impl AncillaLedger {
    pub fn plain(width: usize) -> Self {
        AncillaLedger { n: width, xi: 0, breakdown: AncillaBreakdown::None, output_bit: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversibleCircuit {
    width: usize,
    gates: Vec<RevGate>,
    ledger: AncillaLedger,
}

impl ReversibleCircuit {
    pub fn new(width: usize, gates: Vec<RevGate>, ledger: AncillaLedger) -> Result<Self> {
        for g in &gates {
            g.validate(width)?;
        }
        if ledger.n + ledger.xi != width {
            return Err(Error::precondition(format!(
                "ledger n + xi = {} does not match width {width}",
                ledger.n + ledger.xi
            )));
        }
        if ledger.breakdown != AncillaBreakdown::None && ledger.breakdown.total() != ledger.xi {
            return Err(Error::precondition("ledger breakdown does not sum to xi"));
        }
        if let Some(o) = ledger.output_bit {
            if o >= width {
                return Err(Error::IndexOutOfRange { index: o, width });
            }
        }
        Ok(ReversibleCircuit { width, gates, ledger })
    }

    /// A circuit with no ancilla accounting.
    pub fn plain(width: usize, gates: Vec<RevGate>) -> Result<Self> {
        Self::new(width, gates, AncillaLedger::plain(width))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[RevGate] {
        &self.gates
    }

    pub fn ledger(&self) -> &AncillaLedger {
        &self.ledger
    }

    pub fn toffoli_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, RevGate::Toffoli(..))).count()
    }

    pub fn gtoffoli_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, RevGate::GToffoli { .. })).count()
    }

    /// Every gate is self-inverse, so the reversed gate list is the inverse.
    pub fn inverse(&self) -> Self {
        let mut gates = self.gates.clone();
        gates.reverse();
        ReversibleCircuit { width: self.width, gates, ledger: self.ledger }
    }

    /// Replaces every generalized TOFFOLI by NOT/CNOT/TOFFOLI gates using
    /// `borrowed` as the dirty ancilla.
    pub fn decompose_gtoffolis(&self, borrowed: usize) -> Result<Self> {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match g {
                RevGate::GToffoli { controls, target } => {
                    gates.extend(decompose_gtoffoli(controls, *target, borrowed)?)
                }
                other => gates.push(other.clone()),
            }
        }
        Ok(ReversibleCircuit { width: self.width, gates, ledger: self.ledger })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("width {}\n", self.width);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

/// Forward execution on a basis input.
pub fn run_reversible(c: &ReversibleCircuit, input: &[bool]) -> Result<Vec<bool>> {
    if input.len() != c.width {
        return Err(Error::LengthMismatch { expected: c.width, got: input.len() });
    }
    let mut bits = input.to_vec();
    for g in &c.gates {
        g.apply(&mut bits);
    }
    Ok(bits)
}

/// Parses `width W` followed by `NOT t` / `CNOT c t` / `TOF c1 c2 t` /
/// `GTOF [+c|-c]... t` lines. `#` starts a comment.
pub fn parse_reversible(text: &str) -> Result<ReversibleCircuit> {
    let mut width: Option<usize> = None;
    let mut gates = Vec::new();
    let num = |tok: &str, line: usize| -> Result<usize> {
        tok.parse().map_err(|_| Error::parse(line, format!("bad bit index {tok:?}")))
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(w) = width else {
            if toks.len() == 2 && toks[0] == "width" {
                width = Some(num(toks[1], line_no)?);
                continue;
            }
            return Err(Error::parse(line_no, "expected `width <W>` first"));
        };
        let gate = match (toks[0], toks.len()) {
            ("NOT", 2) => RevGate::Not(num(toks[1], line_no)?),
            ("CNOT", 3) => RevGate::Cnot(num(toks[1], line_no)?, num(toks[2], line_no)?),
            ("TOF", 4) => RevGate::Toffoli(
                num(toks[1], line_no)?,
                num(toks[2], line_no)?,
                num(toks[3], line_no)?,
            ),
            ("GTOF", l) if l >= 2 => {
                let controls = toks[1..l - 1]
                    .iter()
                    .map(|t| parse_control(t, line_no))
                    .collect::<Result<Vec<_>>>()?;
                RevGate::GToffoli { controls, target: num(toks[l - 1], line_no)? }
            }
            _ => return Err(Error::parse(line_no, format!("bad gate {line:?}"))),
        };
        gate.validate(w).map_err(|e| Error::parse(line_no, e.to_string()))?;
        gates.push(gate);
    }
    let width = width.ok_or_else(|| Error::parse(1, "missing `width` line"))?;
    ReversibleCircuit::plain(width, gates)
}

pub(crate) fn parse_control(tok: &str, line: usize) -> Result<Control> {
    let (sign, rest) = tok.split_at(1.min(tok.len()));
    let bit = rest
        .parse()
        .map_err(|_| Error::parse(line, format!("bad control {tok:?}")))?;
    match sign {
        "+" => Ok(Control::pos(bit)),
        "-" => Ok(Control::neg(bit)),
        _ => Err(Error::parse(line, format!("control {tok:?} needs a +/- polarity"))),
    }
}

/// Writes `AND(a, b)` or `OR(a, b)` into a fresh zeroed ancilla.
///
/// For distinct positive inputs AND is a single TOFFOLI and OR is
/// `NOT a, NOT b, TOF(a, b, anc), NOT anc, NOT a, NOT b`; negative inputs
/// cancel the corresponding NOT pair. Inputs on the same bit degenerate to a
/// CNOT copy (`a ∧ a`, `a ∨ a`) or to a constant.
pub fn compile_gate_gadgets(kind: GateKind, a: Control, b: Control, anc: usize) -> Vec<RevGate> {
    // OR(a, b) = NOT AND(¬a, ¬b)
    let (a, b, flip_out) = match kind {
        GateKind::And => (a, b, false),
        GateKind::Or => (a.negated(), b.negated(), true),
    };
    let mut core = Vec::new();
    if a.bit == b.bit {
        if a.positive == b.positive {
            core.extend(conjugate_polarity(&[a], vec![RevGate::Cnot(a.bit, anc)]));
        }
        // contradictory pair: AND is constant 0
    } else {
        core.extend(conjugate_polarity(&[a, b], vec![RevGate::Toffoli(a.bit, b.bit, anc)]));
    }
    if flip_out {
        core.push(RevGate::Not(anc));
    }
    core
}

/// Wraps `body` in NOTs on every negative control so that it sees them as
/// positive. The NOT layer before and after is emitted in the same order.
fn conjugate_polarity(controls: &[Control], body: Vec<RevGate>) -> Vec<RevGate> {
    let flips: Vec<RevGate> = controls
        .iter()
        .filter(|c| !c.positive)
        .map(|c| RevGate::Not(c.bit))
        .collect();
    let mut out = flips.clone();
    out.extend(body);
    out.extend(flips);
    out
}

/// The counter `|a⟩|b⟩ → |a⟩|b + a mod 2^r⟩` on `1 + r` bits: bit 0 is `a`,
/// bits `1..=r` hold `b` big-endian. Built from `r` generalized TOFFOLIs,
/// widest (most significant bit, `r` controls) first.
pub fn build_counter(r: usize) -> Result<ReversibleCircuit> {
    if r == 0 {
        return Err(Error::precondition("counter width r must be >= 1"));
    }
    let gates = counter_gates(Control::pos(0), &(1..=r).collect::<Vec<_>>());
    ReversibleCircuit::plain(1 + r, gates)
}

/// Increment of the big-endian register `reg` conditioned on `a`.
fn counter_gates(a: Control, reg: &[usize]) -> Vec<RevGate> {
    (0..reg.len())
        .map(|i| {
            let controls = std::iter::once(a)
                .chain(reg[i + 1..].iter().map(|&b| Control::pos(b)))
                .collect();
            RevGate::GToffoli { controls, target: reg[i] }
        })
        .collect()
}

/// `ceil(log2(v))` for `v >= 1`.
pub fn ceil_log2(v: usize) -> usize {
    assert!(v >= 1);
    (usize::BITS - (v - 1).leading_zeros()) as usize
}

/// Compiles a k-CNF with the clause-counting construction.
///
/// Layout: `x` (n bits) | clause scratch (k−1) | counter (⌈log2(m+1)⌉) |
/// borrowed (1) | output (1). Each clause is OR-ed into the scratch bits,
/// added into the counter, and uncomputed; a final generalized TOFFOLI
/// matching the binary encoding of `m` writes `f(x)` into the output bit.
/// All generalized TOFFOLIs are decomposed with the borrowed bit, so the
/// result contains only NOT, CNOT and TOFFOLI.
pub fn compile_cnf_counter(f: &CnfFormula) -> Result<ReversibleCircuit> {
    let n = f.n();
    let k = f.k();
    let m = f.m();
    if k > n {
        return Err(Error::precondition(format!("clause width k = {k} exceeds n = {n}")));
    }
    let scratch_len = k.saturating_sub(1);
    let r = ceil_log2(m + 1);
    let scratch: Vec<usize> = (n..n + scratch_len).collect();
    let counter: Vec<usize> = (n + scratch_len..n + scratch_len + r).collect();
    let borrowed = n + scratch_len + r;
    let output = borrowed + 1;
    let width = output + 1;

    let mut gates = Vec::new();
    for clause in f.clauses() {
        let lits: Vec<Control> = clause
            .iter()
            .map(|l| Control { bit: l.var - 1, positive: l.positive })
            .collect();
        let mut compute = Vec::new();
        let mut acc = lits[0];
        for (i, &lit) in lits.iter().enumerate().skip(1) {
            compute.extend(compile_gate_gadgets(GateKind::Or, acc, lit, scratch[i - 1]));
            acc = Control::pos(scratch[i - 1]);
        }
        gates.extend(compute.iter().cloned());
        gates.extend(counter_gates(acc, &counter));
        gates.extend(compute.into_iter().rev());
    }
    let controls: Vec<Control> = counter
        .iter()
        .enumerate()
        .map(|(i, &bit)| Control { bit, positive: (m >> (r - 1 - i)) & 1 == 1 })
        .collect();
    gates.push(RevGate::GToffoli { controls, target: output });

    let ledger = AncillaLedger {
        n,
        xi: scratch_len + r + 2,
        breakdown: AncillaBreakdown::Counter {
            clause_scratch: scratch_len,
            counter: r,
            borrowed: 1,
            output: 1,
        },
        output_bit: Some(output),
    };
    ReversibleCircuit::new(width, gates, ledger)?.decompose_gtoffolis(borrowed)
}

/// Compiles a gate circuit with one fresh ancilla per AND/OR gate, giving
/// `|x⟩|0^ξ⟩ → |junk(x)⟩|f(x)⟩`.
///
/// NOT gates cost nothing: they flip the polarity of the wire they read.
/// The ancilla of the gate driving the output is placed last, so whenever
/// the output depends on at least one AND/OR gate, `f(x)` lands on bit
/// `n + ξ − 1`.
pub fn compile_boolean_naive(f: &BooleanCircuit) -> Result<ReversibleCircuit> {
    let n = f.n();
    let gates = f.gates();
    let xi = f.and_count() + f.or_count();

    // resolve the output through NOT chains to find the driving gate
    let mut out_wire = f.output();
    let mut out_positive = true;
    while let Wire::Gate(g) = out_wire {
        match gates[g] {
            BoolGate::Not(a) => {
                out_wire = a;
                out_positive = !out_positive;
            }
            _ => break,
        }
    }
    let out_gate = match out_wire {
        Wire::Gate(g) => Some(g),
        Wire::Input(_) => None,
    };

    let mut next_anc = n;
    let mut values: Vec<Control> = Vec::with_capacity(gates.len());
    let mut out = Vec::new();
    let value = |w: Wire, values: &[Control]| match w {
        Wire::Input(i) => Control::pos(i),
        Wire::Gate(g) => values[g],
    };
    for (gi, gate) in gates.iter().enumerate() {
        let v = match *gate {
            BoolGate::Not(a) => value(a, &values).negated(),
            BoolGate::And(a, b) | BoolGate::Or(a, b) => {
                let anc = if Some(gi) == out_gate {
                    n + xi - 1
                } else {
                    let anc = next_anc;
                    next_anc += 1;
                    anc
                };
                let kind = if matches!(gate, BoolGate::And(..)) { GateKind::And } else { GateKind::Or };
                out.extend(compile_gate_gadgets(kind, value(a, &values), value(b, &values), anc));
                Control::pos(anc)
            }
        };
        values.push(v);
    }
    let out_ctrl = value(f.output(), &values);
    if !out_ctrl.positive {
        out.push(RevGate::Not(out_ctrl.bit));
    }
    debug_assert_eq!(out_ctrl.positive, out_positive);

    let ledger = AncillaLedger {
        n,
        xi,
        breakdown: AncillaBreakdown::PerGate { and: f.and_count(), or: f.or_count() },
        output_bit: Some(out_ctrl.bit),
    };
    ReversibleCircuit::new(n + xi, out, ledger)
}

/// Lowers a CNF and compiles it gate by gate.
pub fn compile_cnf_naive(f: &CnfFormula) -> Result<ReversibleCircuit> {
    compile_boolean_naive(&f.to_circuit()?)
}

/// Decomposes a generalized TOFFOLI into NOT/CNOT/TOFFOLI gates with one
/// borrowed bit whose initial value is arbitrary and is restored.
///
/// Up to two controls need no ancilla. Larger gates split the controls into
/// two halves `A`, `B` and apply `C^A X(anc) · C^{B,anc} X(t)` twice; each
/// half is a V-chain that borrows the bits of the other half.
pub fn decompose_gtoffoli(
    controls: &[Control],
    target: usize,
    borrowed: usize,
) -> Result<Vec<RevGate>> {
    RevGate::GToffoli { controls: controls.to_vec(), target }
        .validate(usize::MAX)?;
    if borrowed == target || controls.iter().any(|c| c.bit == borrowed) {
        return Err(Error::precondition(format!(
            "no free bit: borrowed ancilla {borrowed} is used by the gate itself"
        )));
    }
    let pos: Vec<usize> = controls.iter().map(|c| c.bit).collect();
    let body = if pos.len() <= 2 {
        mcx_dirty(&pos, target, &[])
    } else {
        let k1 = pos.len().div_ceil(2);
        let (a, b) = pos.split_at(k1);
        let mut a_dirty: Vec<usize> = b.to_vec();
        a_dirty.push(target);
        let mut b_controls = b.to_vec();
        b_controls.push(borrowed);
        let first = mcx_dirty(a, borrowed, &a_dirty);
        let second = mcx_dirty(&b_controls, target, a);
        let mut body = Vec::new();
        for _ in 0..2 {
            body.extend(first.iter().cloned());
            body.extend(second.iter().cloned());
        }
        body
    };
    Ok(conjugate_polarity(controls, body))
}

/// Multi-controlled NOT with `controls.len() − 2` borrowed bits taken from
/// `dirty`, as a 4(k−2)-TOFFOLI V-chain.
fn mcx_dirty(controls: &[usize], target: usize, dirty: &[usize]) -> Vec<RevGate> {
    let k = controls.len();
    match k {
        0 => return vec![RevGate::Not(target)],
        1 => return vec![RevGate::Cnot(controls[0], target)],
        2 => return vec![RevGate::Toffoli(controls[0], controls[1], target)],
        _ => {}
    }
    assert!(dirty.len() >= k - 2, "V-chain needs {} dirty bits, got {}", k - 2, dirty.len());
    let c = controls;
    let a = &dirty[..k - 2];
    let ladder_down: Vec<RevGate> = (1..k - 2)
        .rev()
        .map(|i| RevGate::Toffoli(c[i + 1], a[i - 1], a[i]))
        .collect();
    let ladder_up: Vec<RevGate> = (1..k - 2)
        .map(|i| RevGate::Toffoli(c[i + 1], a[i - 1], a[i]))
        .collect();
    let top = RevGate::Toffoli(c[k - 1], a[k - 3], target);
    let base = RevGate::Toffoli(c[0], c[1], a[0]);

    let mut out = vec![top.clone()];
    out.extend(ladder_down.iter().cloned());
    out.push(base.clone());
    out.extend(ladder_up.iter().cloned());
    out.push(top);
    out.extend(ladder_down);
    out.push(base);
    out.extend(ladder_up);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::{index_to_bits, parse_circuit, parse_dimacs, BooleanFunction};

    fn run(c: &ReversibleCircuit, bits: &[bool]) -> Vec<bool> {
        run_reversible(c, bits).unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        crate::parse_bits(s).unwrap()
    }

    fn apply_all(gates: &[RevGate], input: &[bool]) -> Vec<bool> {
        let mut b = input.to_vec();
        for g in gates {
            g.apply(&mut b);
        }
        b
    }

    #[test]
    fn gadgets_trace() {
        let and = compile_gate_gadgets(GateKind::And, Control::pos(0), Control::pos(1), 2);
        assert_eq!(and, vec![RevGate::Toffoli(0, 1, 2)]);
        assert_eq!(apply_all(&and, &bits("110")), bits("111"));

        let or = compile_gate_gadgets(GateKind::Or, Control::pos(0), Control::pos(1), 2);
        assert_eq!(
            or,
            vec![
                RevGate::Not(0),
                RevGate::Not(1),
                RevGate::Toffoli(0, 1, 2),
                RevGate::Not(0),
                RevGate::Not(1),
                RevGate::Not(2),
            ]
        );
        assert_eq!(apply_all(&or, &bits("000")), bits("000"));
        assert_eq!(apply_all(&or, &bits("100")), bits("101"));
        for i in 0..4u64 {
            let x = index_to_bits(i, 2);
            let out = apply_all(&or, &[x[0], x[1], false]);
            assert_eq!(out, vec![x[0], x[1], x[0] || x[1]]);
        }
    }

    #[test]
    fn degenerate_gadgets() {
        for &(kind, pa, pb) in &[
            (GateKind::And, true, true),
            (GateKind::And, true, false),
            (GateKind::Or, true, true),
            (GateKind::Or, false, true),
            (GateKind::Or, false, false),
        ] {
            let g = compile_gate_gadgets(kind, Control { bit: 0, positive: pa }, Control { bit: 0, positive: pb }, 1);
            for x in [false, true] {
                let (la, lb) = (x == pa, x == pb);
                let want = match kind {
                    GateKind::And => la && lb,
                    GateKind::Or => la || lb,
                };
                assert_eq!(apply_all(&g, &[x, false]), vec![x, want]);
            }
        }
    }

    #[test]
    fn counter_examples() {
        let c4 = build_counter(4).unwrap();
        assert_eq!(c4.gtoffoli_count(), 4);
        assert_eq!(c4.gates().len(), 4);
        let c2 = build_counter(2).unwrap();
        assert_eq!(run(&c2, &bits("100")), bits("101"));
        assert_eq!(run(&c2, &bits("111")), bits("100"));
        assert!(build_counter(0).is_err());
    }

    #[test]
    fn counter_adds_mod_2r() {
        for r in 1..=5usize {
            let c = build_counter(r).unwrap();
            for a in 0..2u64 {
                for b in 0..(1u64 << r) {
                    let input = index_to_bits((a << r) | b, r + 1);
                    let out = run(&c, &input);
                    let expect = index_to_bits((a << r) | ((b + a) % (1 << r)), r + 1);
                    assert_eq!(out, expect, "r={r} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(9), 4);
    }

    fn check_counter_compile(f: &CnfFormula) {
        let c = compile_cnf_counter(f).unwrap();
        let l = c.ledger();
        assert_eq!(l.xi, f.k().saturating_sub(1) + ceil_log2(f.m() + 1) + 2);
        assert_eq!(c.width(), f.n() + l.xi);
        assert_eq!(c.gtoffoli_count(), 0);
        let out = l.output_bit.unwrap();
        let borrowed = out - 1;
        for idx in 0..(1u64 << f.n()) {
            let x = index_to_bits(idx, f.n());
            for dirty in [false, true] {
                let mut input = x.clone();
                input.resize(c.width(), false);
                input[borrowed] = dirty;
                let y = run(&c, &input);
                assert_eq!(y[out], f.eval_bits(&x), "x={x:?}");
                assert_eq!(y[borrowed], dirty);
                // clause scratch returns to zero
                for s in f.n()..f.n() + f.k().saturating_sub(1) {
                    assert!(!y[s]);
                }
            }
        }
    }

    #[test]
    fn counter_compile_fig3() {
        let f = parse_dimacs("p cnf 4 2\n1 -2 3 0\n2 3 4 0").unwrap();
        let c = compile_cnf_counter(&f).unwrap();
        assert_eq!(
            c.ledger().breakdown,
            AncillaBreakdown::Counter { clause_scratch: 2, counter: 2, borrowed: 1, output: 1 }
        );
        assert_eq!(c.ledger().xi, 6);
        let out = c.ledger().output_bit.unwrap();
        let mut x = bits("1111");
        x.resize(10, false);
        assert!(run(&c, &x)[out]);
        let mut x = bits("0100");
        x.resize(10, false);
        assert!(!run(&c, &x)[out]);
        check_counter_compile(&f);
    }

    #[test]
    fn counter_compile_edge_shapes() {
        check_counter_compile(&parse_dimacs("p cnf 2 1\n-1 0").unwrap());
        check_counter_compile(&parse_dimacs("p cnf 3 3\n1 0\n-1 2 0\n1 -2 -3 0").unwrap());
        check_counter_compile(&parse_dimacs("p cnf 3 0\n").unwrap());
        assert!(compile_cnf_counter(&parse_dimacs("p cnf 2 1\n1 2 -1 0").unwrap()).is_err());
    }

    #[test]
    fn naive_examples() {
        let and2 = parse_circuit("g1 = AND x1 x2\nout g1").unwrap();
        let c = compile_boolean_naive(&and2).unwrap();
        assert_eq!(c.ledger().xi, 1);
        assert_eq!(c.gates(), &[RevGate::Toffoli(0, 1, 2)]);
        assert_eq!(run(&c, &bits("110")), bits("111"));

        let clause = parse_dimacs("p cnf 3 1\n1 2 3 0").unwrap();
        let c = compile_cnf_naive(&clause).unwrap();
        assert_eq!(c.ledger().xi, 2);

        let f = parse_dimacs("p cnf 4 3\n1 2 3 0\n-1 2 4 0\n2 -3 -4 0").unwrap();
        let c = compile_cnf_naive(&f).unwrap();
        assert_eq!(c.ledger().xi, 3 * 3 - 1);
        assert_eq!(c.ledger().output_bit, Some(c.width() - 1));
    }

    #[test]
    fn naive_computes_f_on_last_bit() {
        let texts = [
            "g1 = OR x1 x2\ng2 = NOT g1\nout g2",
            "g1 = AND x1 x2\ng2 = OR x3 x1\ng3 = NOT x2\ng4 = AND g2 g3\ng5 = OR g4 g1\nout g5",
            "g1 = AND x1 x2\ng2 = OR g1 x3\ng3 = AND x2 x3\nout g2",
        ];
        for t in texts {
            let f = parse_circuit(t).unwrap();
            let c = compile_boolean_naive(&f).unwrap();
            assert_eq!(c.ledger().output_bit, Some(c.width() - 1));
            for idx in 0..(1u64 << f.n()) {
                let mut x = index_to_bits(idx, f.n());
                let fx = f.eval_bits(&x);
                x.resize(c.width(), false);
                assert_eq!(run(&c, &x)[c.width() - 1], fx);
            }
        }
    }

    #[test]
    fn gtoffoli_small_cases() {
        let two = decompose_gtoffoli(&[Control::pos(0), Control::pos(1)], 2, 3).unwrap();
        assert_eq!(two, vec![RevGate::Toffoli(0, 1, 2)]);
        let neg = decompose_gtoffoli(&[Control::neg(0)], 1, 2).unwrap();
        assert_eq!(neg, vec![RevGate::Not(0), RevGate::Cnot(0, 1), RevGate::Not(0)]);
        assert!(decompose_gtoffoli(&[Control::pos(0), Control::pos(1), Control::pos(2)], 3, 1).is_err());
        assert!(decompose_gtoffoli(&[Control::pos(0), Control::pos(0)], 3, 4).is_err());
    }

    #[test]
    fn gtoffoli_three_controls_dirty_one() {
        let ctl = [Control::pos(0), Control::pos(1), Control::pos(2)];
        let gates = decompose_gtoffoli(&ctl, 3, 4).unwrap();
        for idx in 0..16u64 {
            let mut input = index_to_bits(idx, 4);
            input.push(true);
            let out = apply_all(&gates, &input);
            let mut want = input.clone();
            want[3] ^= input[0] && input[1] && input[2];
            assert_eq!(out, want);
            assert!(out[4]);
        }
    }

    #[test]
    fn gtoffoli_exhaustive_up_to_six_controls() {
        for k in 0..=6usize {
            for pattern in 0..(1u32 << k) {
                let controls: Vec<Control> = (0..k)
                    .map(|i| Control { bit: i, positive: (pattern >> i) & 1 == 1 })
                    .collect();
                let (t, anc) = (k, k + 1);
                let gates = decompose_gtoffoli(&controls, t, anc).unwrap();
                let reference = RevGate::GToffoli { controls: controls.clone(), target: t };
                for idx in 0..(1u64 << (k + 2)) {
                    let input = index_to_bits(idx, k + 2);
                    let mut want = input.clone();
                    reference.apply(&mut want);
                    assert_eq!(apply_all(&gates, &input), want, "k={k} pattern={pattern:b}");
                }
                assert!(gates.len() <= 8 * k + 2 * k + 4, "gate count not linear: {}", gates.len());
            }
        }
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let c = ReversibleCircuit::plain(
            4,
            vec![
                RevGate::Not(0),
                RevGate::Cnot(0, 1),
                RevGate::Toffoli(0, 1, 2),
                RevGate::GToffoli { controls: vec![Control::pos(0), Control::neg(1)], target: 3 },
            ],
        )
        .unwrap();
        assert_eq!(parse_reversible(&c.to_text()).unwrap(), c);
        assert!(matches!(parse_reversible("width 2\nNOT 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_reversible("NOT 0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_reversible("width 3\nGTOF 0 1 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_reversible("width 3\nTOF 0 0 2"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn run_examples() {
        let empty = ReversibleCircuit::plain(3, vec![]).unwrap();
        assert_eq!(run(&empty, &bits("101")), bits("101"));
        let not0 = ReversibleCircuit::plain(3, vec![RevGate::Not(0)]).unwrap();
        assert_eq!(run(&not0, &bits("000")), bits("100"));
        assert!(run_reversible(&not0, &bits("00")).is_err());
    }
}
