//! Boolean functions in CNF and gate-circuit form, with brute-force `#f` and
//! `gap(f)` oracles.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the number of inputs `count` will enumerate.
pub const DEFAULT_ENUM_CAP: usize = 28;

/// A DIMACS literal: 1-based variable index plus polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    fn from_dimacs(v: i64) -> Self {
        Literal { var: v.unsigned_abs() as usize, positive: v > 0 }
    }

    fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (ci, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::precondition(format!("clause {} is empty", ci + 1)));
            }
            for lit in clause {
                if lit.var == 0 || lit.var > n {
                    return Err(Error::precondition(format!(
                        "clause {}: variable {} outside [1, {n}]",
                        ci + 1,
                        lit.var
                    )));
                }
            }
        }
        Ok(CnfFormula { n, clauses })
    }

    /// Builds a formula from DIMACS-style signed integers.
    pub fn from_signed(n: usize, clauses: &[&[i64]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| c.iter().map(|&v| Literal::from_dimacs(v)).collect())
            .collect();
        Self::new(n, clauses)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Maximum clause width.
    pub fn k(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Clause density `m / n`. Metadata only.
    pub fn density(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m() as f64 / self.n as f64
        }
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// True when every clause has exactly three literals.
    pub fn is_exact_3cnf(&self) -> bool {
        !self.clauses.is_empty() && self.clauses.iter().all(|c| c.len() == 3)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.m());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&lit.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    /// Lowers the formula to a gate circuit: a balanced OR tree per clause
    /// and a balanced AND tree over the clause outputs. A width-`w` clause
    /// costs `w - 1` ORs and the conjunction costs `m - 1` ANDs; negative
    /// literals become NOT gates.
    pub fn to_circuit(&self) -> Result<BooleanCircuit> {
        if self.clauses.is_empty() {
            return Err(Error::precondition("cannot lower a CNF with no clauses"));
        }
        let mut b = CircuitBuilder::new(self.n);
        let mut clause_outs = Vec::with_capacity(self.m());
        for clause in &self.clauses {
            let lits: Vec<Wire> = clause
                .iter()
                .map(|lit| {
                    let x = Wire::Input(lit.var - 1);
                    if lit.positive {
                        x
                    } else {
                        b.not(x)
                    }
                })
                .collect();
            clause_outs.push(b.balanced(lits, GateKind::Or));
        }
        let out = b.balanced(clause_outs, GateKind::And);
        Ok(b.finish(out))
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> = c
                    .iter()
                    .map(|l| format!("{}x{}", if l.positive { "" } else { "!" }, l.var))
                    .collect();
                format!("({})", lits.join(" | "))
            })
            .collect();
        write!(f, "{}", parts.join(" & "))
    }
}

/// Parses DIMACS CNF: optional `c` comment lines, a `p cnf n m` header, then
/// clauses as signed integers each terminated by `0` (clauses may span lines).
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate problem line"));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
                return Err(Error::parse(line_no, "malformed header, expected `p cnf <n> <m>`"));
            }
            let n = toks[2]
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("bad variable count {:?}", toks[2])))?;
            let m = toks[3]
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("bad clause count {:?}", toks[3])))?;
            header = Some((n, m, line_no));
            continue;
        }
        let Some((n, _, _)) = header else {
            return Err(Error::parse(line_no, "clause data before `p cnf` header"));
        };
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("unexpected token {tok:?}")))?;
            if v == 0 {
                if current.is_empty() {
                    return Err(Error::parse(line_no, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                let lit = Literal::from_dimacs(v);
                if lit.var > n {
                    return Err(Error::parse(
                        line_no,
                        format!("literal {v} out of range for {n} variables"),
                    ));
                }
                current.push(lit);
            }
        }
    }

    let Some((n, m, header_line)) = header else {
        return Err(Error::parse(last_line.max(1), "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(Error::parse(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            header_line,
            format!("header declares {m} clauses but {} were found", clauses.len()),
        ));
    }
    CnfFormula::new(n, clauses).map_err(|e| Error::parse(header_line, e.to_string()))
}

/// A wire in a gate circuit: a primary input (0-based) or the output of an
/// earlier gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wire {
    Input(usize),
    Gate(usize),
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wire::Input(i) => write!(f, "x{}", i + 1),
            Wire::Gate(g) => write!(f, "g{}", g + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolGate {
    And(Wire, Wire),
    Or(Wire, Wire),
    Not(Wire),
}

impl BoolGate {
    fn inputs(&self) -> [Option<Wire>; 2] {
        match *self {
            BoolGate::And(a, b) | BoolGate::Or(a, b) => [Some(a), Some(b)],
            BoolGate::Not(a) => [Some(a), None],
        }
    }
}

/// A topologically ordered {AND, OR, NOT} circuit with one output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanCircuit {
    n: usize,
    gates: Vec<BoolGate>,
    output: Wire,
}

impl BooleanCircuit {
    pub fn new(n: usize, gates: Vec<BoolGate>, output: Wire) -> Result<Self> {
        let check = |w: Wire, limit: usize, ctx: &str| -> Result<()> {
            match w {
                Wire::Input(i) if i < n => Ok(()),
                Wire::Gate(g) if g < limit => Ok(()),
                _ => Err(Error::precondition(format!("{ctx}: wire {w} is not defined before use"))),
            }
        };
        for (gi, gate) in gates.iter().enumerate() {
            for w in gate.inputs().into_iter().flatten() {
                check(w, gi, &format!("gate g{}", gi + 1))?;
            }
        }
        check(output, gates.len(), "output")?;
        Ok(BooleanCircuit { n, gates, output })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[BoolGate] {
        &self.gates
    }

    pub fn output(&self) -> Wire {
        self.output
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, BoolGate::And(..))).count()
    }

    pub fn or_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, BoolGate::Or(..))).count()
    }

    fn eval_unchecked(&self, x: &[bool], scratch: &mut Vec<bool>) -> bool {
        scratch.clear();
        let get = |w: Wire, s: &[bool]| match w {
            Wire::Input(i) => x[i],
            Wire::Gate(g) => s[g],
        };
        for gate in &self.gates {
            let v = match *gate {
                BoolGate::And(a, b) => get(a, scratch) && get(b, scratch),
                BoolGate::Or(a, b) => get(a, scratch) || get(b, scratch),
                BoolGate::Not(a) => !get(a, scratch),
            };
            scratch.push(v);
        }
        get(self.output, scratch)
    }

    /// Serializes to the line-oriented circuit text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("inputs {}\n", self.n);
        for (i, gate) in self.gates.iter().enumerate() {
            let body = match gate {
                BoolGate::And(a, b) => format!("AND {a} {b}"),
                BoolGate::Or(a, b) => format!("OR {a} {b}"),
                BoolGate::Not(a) => format!("NOT {a}"),
            };
            out.push_str(&format!("g{} = {body}\n", i + 1));
        }
        out.push_str(&format!("out {}\n", self.output));
        out
    }
}

/// Parses the circuit text format:
///
/// ```text
/// inputs 2          # optional; otherwise the largest x<i> referenced
/// g1 = AND x1 x2
/// g2 = NOT g1
/// out g2
/// ```
///
/// Gates must be numbered `g1, g2, ...` in order.
pub fn parse_circuit(text: &str) -> Result<BooleanCircuit> {
    let mut declared_n: Option<usize> = None;
    let mut max_input = 0usize;
    let mut gates = Vec::new();
    let mut output: Option<(Wire, usize)> = None;

    let parse_wire = |tok: &str, line: usize, max_input: &mut usize| -> Result<Wire> {
        let (kind, num) = tok.split_at(1.min(tok.len()));
        let idx: usize = num
            .parse()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| Error::parse(line, format!("bad wire {tok:?}")))?;
        match kind {
            "x" => {
                *max_input = (*max_input).max(idx);
                Ok(Wire::Input(idx - 1))
            }
            "g" => Ok(Wire::Gate(idx - 1)),
            _ => Err(Error::parse(line, format!("bad wire {tok:?}"))),
        }
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if output.is_some() {
            return Err(Error::parse(line_no, "content after `out` line"));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "inputs" => {
                if toks.len() != 2 {
                    return Err(Error::parse(line_no, "expected `inputs <n>`"));
                }
                declared_n = Some(
                    toks[1]
                        .parse()
                        .map_err(|_| Error::parse(line_no, "bad input count"))?,
                );
            }
            "out" => {
                if toks.len() != 2 {
                    return Err(Error::parse(line_no, "expected `out <wire>`"));
                }
                output = Some((parse_wire(toks[1], line_no, &mut max_input)?, line_no));
            }
            name => {
                let expected = format!("g{}", gates.len() + 1);
                if name != expected || toks.get(1) != Some(&"=") {
                    return Err(Error::parse(line_no, format!("expected `{expected} = ...`")));
                }
                let op = toks.get(2).copied().unwrap_or("");
                let args = &toks[3.min(toks.len())..];
                let gate = match (op, args.len()) {
                    ("AND", 2) => BoolGate::And(
                        parse_wire(args[0], line_no, &mut max_input)?,
                        parse_wire(args[1], line_no, &mut max_input)?,
                    ),
                    ("OR", 2) => BoolGate::Or(
                        parse_wire(args[0], line_no, &mut max_input)?,
                        parse_wire(args[1], line_no, &mut max_input)?,
                    ),
                    ("NOT", 1) => BoolGate::Not(parse_wire(args[0], line_no, &mut max_input)?),
                    _ => return Err(Error::parse(line_no, format!("bad gate definition {line:?}"))),
                };
                gates.push(gate);
            }
        }
    }
    let Some((out, out_line)) = output else {
        return Err(Error::parse(text.lines().count().max(1), "missing `out` line"));
    };
    let n = match declared_n {
        Some(n) if n < max_input => {
            return Err(Error::parse(out_line, format!("x{max_input} exceeds declared inputs {n}")))
        }
        Some(n) => n,
        None => max_input,
    };
    BooleanCircuit::new(n, gates, out).map_err(|e| Error::parse(out_line, e.to_string()))
}

/// Anything with a fixed number of inputs that can be evaluated on an
/// assignment.
pub trait BooleanFunction: Sync {
    fn num_inputs(&self) -> usize;

    /// Evaluates on `x` without checking its length.
    fn eval_bits(&self, x: &[bool]) -> bool;

    fn eval(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.num_inputs() {
            return Err(Error::LengthMismatch { expected: self.num_inputs(), got: x.len() });
        }
        Ok(self.eval_bits(x))
    }
}

impl BooleanFunction for CnfFormula {
    fn num_inputs(&self) -> usize {
        self.n
    }

    fn eval_bits(&self, x: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| x[l.var - 1] == l.positive))
    }
}

impl BooleanFunction for BooleanCircuit {
    fn num_inputs(&self) -> usize {
        self.n
    }

    fn eval_bits(&self, x: &[bool]) -> bool {
        self.eval_unchecked(x, &mut Vec::with_capacity(self.gates.len()))
    }
}

/// Big-endian unpacking of an enumeration index: `x_1` is the top bit.
pub fn index_to_bits(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect()
}

pub fn bits_to_index(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub n: usize,
    pub sharp: u64,
    pub gap: i64,
}

impl CountReport {
    fn from_sharp(n: usize, sharp: u64) -> Self {
        CountReport { n, sharp, gap: (1i64 << n) - 2 * sharp as i64 }
    }
}

/// Counts satisfying assignments by full enumeration, refusing `n` above
/// [`DEFAULT_ENUM_CAP`].
pub fn count<F: BooleanFunction + ?Sized>(f: &F) -> Result<CountReport> {
    count_with_cap(f, DEFAULT_ENUM_CAP)
}

pub fn count_with_cap<F: BooleanFunction + ?Sized>(f: &F, cap: usize) -> Result<CountReport> {
    let n = f.num_inputs();
    if n > cap || n > 62 {
        return Err(Error::EnumerationCap { n, cap: cap.min(62) });
    }
    let mut x = vec![false; n];
    let mut sharp = 0u64;
    for idx in 0..(1u64 << n) {
        for (i, bit) in x.iter_mut().enumerate() {
            *bit = (idx >> (n - 1 - i)) & 1 == 1;
        }
        sharp += f.eval_bits(&x) as u64;
    }
    Ok(CountReport::from_sharp(n, sharp))
}

/// Incremental construction helper for gate circuits.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n: usize,
    gates: Vec<BoolGate>,
}

impl CircuitBuilder {
    pub fn new(n: usize) -> Self {
        CircuitBuilder { n, gates: Vec::new() }
    }

    pub fn input(&self, i: usize) -> Wire {
        assert!(i < self.n, "input {i} out of range");
        Wire::Input(i)
    }

    fn push(&mut self, g: BoolGate) -> Wire {
        self.gates.push(g);
        Wire::Gate(self.gates.len() - 1)
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(BoolGate::And(a, b))
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(BoolGate::Or(a, b))
    }

    pub fn not(&mut self, a: Wire) -> Wire {
        self.push(BoolGate::Not(a))
    }

    /// Pairwise reduction of `wires` under `kind`; `len - 1` gates.
    pub fn balanced(&mut self, mut wires: Vec<Wire>, kind: GateKind) -> Wire {
        assert!(!wires.is_empty());
        while wires.len() > 1 {
            let mut next = Vec::with_capacity(wires.len().div_ceil(2));
            for pair in wires.chunks(2) {
                next.push(match (pair, kind) {
                    ([a, b], GateKind::And) => self.and(*a, *b),
                    ([a, b], GateKind::Or) => self.or(*a, *b),
                    _ => pair[0],
                });
            }
            wires = next;
        }
        wires[0]
    }

    pub fn finish(self, output: Wire) -> BooleanCircuit {
        BooleanCircuit::new(self.n, self.gates, output).expect("builder wires are always valid")
    }
}

/// Builds `g(x, x_{n+1}) = [x_{n+1} ∧ ¬f(x)] ∨ [¬x_{n+1} ∧ x_1 ∧ ... ∧ x_n]`,
/// whose gap is `2^n - 2 + Σ_x (-1)^{¬f(x)}`: zero when `#f = 1`, equal to
/// `-2` when `#f = 0`.
pub fn unique_gap_reduction(f: &BooleanCircuit) -> Result<BooleanCircuit> {
    let n = f.n();
    if n == 0 {
        return Err(Error::precondition("unique-gap reduction needs n >= 1"));
    }
    let mut b = CircuitBuilder { n: n + 1, gates: f.gates.clone() };
    let extra = Wire::Input(n);
    let not_f = b.not(f.output);
    let left = b.and(extra, not_f);
    let xs: Vec<Wire> = (0..n).map(Wire::Input).collect();
    let all_ones = b.balanced(xs, GateKind::And);
    let not_extra = b.not(extra);
    let right = b.and(not_extra, all_ones);
    let out = b.or(left, right);
    Ok(b.finish(out))
}
