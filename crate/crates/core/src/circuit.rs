//! Quantum circuit IR, resource counts, and the exact rewrites between gate
//! sets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reversible::{decompose_gtoffoli, parse_control, Control, RevGate, ReversibleCircuit};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    X(usize),
    Cnot(usize, usize),
    Toffoli(usize, usize, usize),
    GToffoli { controls: Vec<Control>, target: usize },
    H(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    Cz(usize, usize),
    /// Phase −1 on basis states matching every polarity.
    Mcz(Vec<Control>),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::H(q) | Gate::Z(q) | Gate::S(q) | Gate::Sdg(q) | Gate::T(q) | Gate::Tdg(q) => {
                vec![*q]
            }
            Gate::Cnot(a, b) | Gate::Cz(a, b) => vec![*a, *b],
            Gate::Toffoli(a, b, c) => vec![*a, *b, *c],
            Gate::GToffoli { controls, target } => {
                controls.iter().map(|c| c.bit).chain(std::iter::once(*target)).collect()
            }
            Gate::Mcz(controls) => controls.iter().map(|c| c.bit).collect(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::Cnot(..) => "CNOT",
            Gate::Toffoli(..) => "CCX",
            Gate::GToffoli { .. } => "GTOF",
            Gate::H(_) => "H",
            Gate::Z(_) => "Z",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::T(_) => "T",
            Gate::Tdg(_) => "TDG",
            Gate::Cz(..) => "CZ",
            Gate::Mcz(_) => "MCZ",
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.is_empty() {
            return Err(Error::precondition("MCZ needs at least one control"));
        }
        for (i, &q) in qs.iter().enumerate() {
            if q >= width {
                return Err(Error::IndexOutOfRange { index: q, width });
            }
            if qs[..i].contains(&q) {
                return Err(Error::DuplicateIndex(q));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::T(q) => Gate::Tdg(*q),
            Gate::Tdg(q) => Gate::T(*q),
            g => g.clone(),
        }
    }

    pub fn is_clifford(&self) -> bool {
        matches!(
            self,
            Gate::X(_) | Gate::Cnot(..) | Gate::H(_) | Gate::Z(_) | Gate::S(_) | Gate::Sdg(_) | Gate::Cz(..)
        )
    }

    fn shifted(&self, offset: usize) -> Gate {
        let c = |c: &Control| Control { bit: c.bit + offset, positive: c.positive };
        match self {
            Gate::X(q) => Gate::X(q + offset),
            Gate::Cnot(a, b) => Gate::Cnot(a + offset, b + offset),
            Gate::Toffoli(a, b, t) => Gate::Toffoli(a + offset, b + offset, t + offset),
            Gate::GToffoli { controls, target } => {
                Gate::GToffoli { controls: controls.iter().map(c).collect(), target: target + offset }
            }
            Gate::H(q) => Gate::H(q + offset),
            Gate::Z(q) => Gate::Z(q + offset),
            Gate::S(q) => Gate::S(q + offset),
            Gate::Sdg(q) => Gate::Sdg(q + offset),
            Gate::T(q) => Gate::T(q + offset),
            Gate::Tdg(q) => Gate::Tdg(q + offset),
            Gate::Cz(a, b) => Gate::Cz(a + offset, b + offset),
            Gate::Mcz(cs) => Gate::Mcz(cs.iter().map(c).collect()),
        }
    }
}

impl From<&RevGate> for Gate {
    fn from(g: &RevGate) -> Self {
        match g {
            RevGate::Not(t) => Gate::X(*t),
            RevGate::Cnot(c, t) => Gate::Cnot(*c, *t),
            RevGate::Toffoli(a, b, t) => Gate::Toffoli(*a, *b, *t),
            RevGate::GToffoli { controls, target } => {
                Gate::GToffoli { controls: controls.clone(), target: *target }
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match self {
            Gate::GToffoli { controls, target } => {
                for c in controls {
                    write!(f, " {c}")?;
                }
                write!(f, " {target}")
            }
            Gate::Mcz(controls) => {
                for c in controls {
                    write!(f, " {c}")?;
                }
                Ok(())
            }
            g => {
                for q in g.qubits() {
                    write!(f, " {q}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// Probability of one outcome on the measured qubits, the rest traced out.
    ExactOutcome,
    /// Marginal of the measured qubits summed over every other qubit.
    Marginal,
}

/// Both semantics reduce to `Σ |⟨y|ψ⟩|²` over basis states `y` that agree
/// with `accept` on `measured`; the label records which claim is tested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    pub measured: Vec<usize>,
    pub accept: Vec<bool>,
    pub semantics: Semantics,
}

impl MeasurementSpec {
    pub fn new(measured: Vec<usize>, accept: Vec<bool>, semantics: Semantics) -> Result<Self> {
        if measured.len() != accept.len() {
            return Err(Error::precondition(format!(
                "accept string has {} bits for {} measured qubits",
                accept.len(),
                measured.len()
            )));
        }
        for (i, q) in measured.iter().enumerate() {
            if measured[..i].contains(q) {
                return Err(Error::DuplicateIndex(*q));
            }
        }
        Ok(MeasurementSpec { measured, accept, semantics })
    }

    /// All `width` qubits measured with outcome `accept`.
    pub fn all(accept: Vec<bool>) -> Self {
        MeasurementSpec {
            measured: (0..accept.len()).collect(),
            accept,
            semantics: Semantics::ExactOutcome,
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        Self::new(self.measured.clone(), self.accept.clone(), self.semantics)?;
        match self.measured.iter().find(|&&q| q >= width) {
            Some(&q) => Err(Error::IndexOutOfRange { index: q, width }),
            None => Ok(()),
        }
    }

    pub fn to_text(&self) -> String {
        let qs: Vec<String> = self.measured.iter().map(|q| q.to_string()).collect();
        let bs: Vec<String> = self.accept.iter().map(|&b| (b as u8).to_string()).collect();
        let mut s = format!("measure {} accept {}", qs.join(" "), bs.join(" "));
        if self.semantics == Semantics::Marginal {
            s.push_str(" marginal");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumCircuit {
    width: usize,
    gates: Vec<Gate>,
}

impl QuantumCircuit {
    pub fn new(width: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(width)?;
        }
        Ok(QuantumCircuit { width, gates })
    }

    pub fn empty(width: usize) -> Self {
        QuantumCircuit { width, gates: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.width)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Appends `other`, acting on qubits `offset..offset + other.width()`.
    pub fn append_at(&mut self, other: &QuantumCircuit, offset: usize) -> Result<()> {
        if offset + other.width > self.width {
            return Err(Error::IndexOutOfRange { index: offset + other.width - 1, width: self.width });
        }
        self.gates.extend(other.gates.iter().map(|g| g.shifted(offset)));
        Ok(())
    }

    /// `H` on every qubit in `qubits`.
    pub fn h_layer(&mut self, qubits: impl IntoIterator<Item = usize>) -> Result<()> {
        self.extend(qubits.into_iter().map(Gate::H))
    }

    /// Number of T and Tdg gates.
    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::T(_) | Gate::Tdg(_))).count()
    }

    pub fn h_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::H(_))).count()
    }

    pub fn count_of(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.name() == name).count()
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(Gate::is_clifford)
    }

    pub fn is_htcz(&self) -> bool {
        self.gates.iter().all(|g| matches!(g, Gate::H(_) | Gate::T(_) | Gate::Cz(..)))
    }

    pub fn to_text(&self, measurement: Option<&MeasurementSpec>) -> String {
        let mut out = format!("qubits {}\n", self.width);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        if let Some(m) = measurement {
            out.push_str(&m.to_text());
            out.push('\n');
        }
        out
    }
}

/// Gate-for-gate lift of a reversible circuit.
pub fn lift_reversible(c: &ReversibleCircuit) -> QuantumCircuit {
    QuantumCircuit { width: c.width(), gates: c.gates().iter().map(Gate::from).collect() }
}

/// Reversed gate order, each gate inverted.
pub fn inverse(qc: &QuantumCircuit) -> QuantumCircuit {
    QuantumCircuit { width: qc.width, gates: qc.gates.iter().rev().map(Gate::inverse).collect() }
}

/// Seven-T network for TOFFOLI(a, b, c): 2 H, 6 CNOT, 4 T and 3 Tdg.
pub fn toffoli_network(a: usize, b: usize, c: usize) -> Vec<Gate> {
    vec![
        Gate::H(c),
        Gate::Cnot(b, c),
        Gate::Tdg(c),
        Gate::Cnot(a, c),
        Gate::T(c),
        Gate::Cnot(b, c),
        Gate::Tdg(c),
        Gate::Cnot(a, c),
        Gate::T(b),
        Gate::T(c),
        Gate::H(c),
        Gate::Cnot(a, b),
        Gate::T(a),
        Gate::Tdg(b),
        Gate::Cnot(a, b),
    ]
}

/// Replaces every TOFFOLI by [`toffoli_network`].
pub fn toffoli_to_clifford_t(qc: &QuantumCircuit) -> Result<QuantumCircuit> {
    let mut gates = Vec::with_capacity(qc.gates.len());
    for g in &qc.gates {
        match g {
            Gate::Toffoli(a, b, c) => gates.extend(toffoli_network(*a, *b, *c)),
            Gate::GToffoli { .. } | Gate::Mcz(_) => {
                return Err(Error::UnsupportedGate(format!(
                    "{} must be decomposed before Clifford+T conversion",
                    g.name()
                )))
            }
            other => gates.push(other.clone()),
        }
    }
    Ok(QuantumCircuit { width: qc.width, gates })
}

/// Rewrites into {H, T, CZ} with no global phase.
pub fn rewrite_to_htcz(qc: &QuantumCircuit) -> Result<QuantumCircuit> {
    let mut gates = Vec::new();
    let ts = |q: usize, k: usize| std::iter::repeat(Gate::T(q)).take(k);
    for g in &qc.gates {
        match *g {
            Gate::H(_) | Gate::T(_) | Gate::Cz(..) => gates.push(g.clone()),
            Gate::Z(q) => gates.extend(ts(q, 4)),
            Gate::S(q) => gates.extend(ts(q, 2)),
            Gate::Sdg(q) => gates.extend(ts(q, 6)),
            Gate::Tdg(q) => gates.extend(ts(q, 7)),
            Gate::X(q) => {
                gates.push(Gate::H(q));
                gates.extend(ts(q, 4));
                gates.push(Gate::H(q));
            }
            Gate::Cnot(c, t) => gates.extend([Gate::H(t), Gate::Cz(c, t), Gate::H(t)]),
            _ => {
                return Err(Error::UnsupportedGate(format!(
                    "{} has no direct H/T/CZ rewrite",
                    g.name()
                )))
            }
        }
    }
    Ok(QuantumCircuit { width: qc.width, gates })
}

/// Multi-controlled Z on `width` qubits.
pub fn mcz(controls: Vec<Control>, width: usize) -> Result<Gate> {
    let g = Gate::Mcz(controls);
    g.validate(width)?;
    Ok(g)
}

/// Decomposes a multi-controlled Z into X/CNOT/TOFFOLI/H/Z/CZ with one
/// borrowed qubit (needed only for ≥ 4 controls).
pub fn decompose_mcz(controls: &[Control], borrowed: usize) -> Result<Vec<Gate>> {
    Gate::Mcz(controls.to_vec()).validate(usize::MAX)?;
    let flips: Vec<Gate> = controls.iter().filter(|c| !c.positive).map(|c| Gate::X(c.bit)).collect();
    let body = match controls {
        [c] => vec![Gate::Z(c.bit)],
        [a, b] => vec![Gate::Cz(a.bit, b.bit)],
        _ => {
            let (t, rest) = controls.split_last().expect("non-empty");
            let positive: Vec<Control> = rest.iter().map(|c| Control::pos(c.bit)).collect();
            let mut body = vec![Gate::H(t.bit)];
            body.extend(decompose_gtoffoli(&positive, t.bit, borrowed)?.iter().map(Gate::from));
            body.push(Gate::H(t.bit));
            body
        }
    };
    let mut out = flips.clone();
    out.extend(body);
    out.extend(flips);
    Ok(out)
}

/// Expands every GTOFFOLI and MCZ with `borrowed` as the dirty qubit.
pub fn decompose_multi_controlled(qc: &QuantumCircuit, borrowed: usize) -> Result<QuantumCircuit> {
    let mut gates = Vec::with_capacity(qc.gates.len());
    for g in &qc.gates {
        match g {
            Gate::GToffoli { controls, target } => gates
                .extend(decompose_gtoffoli(controls, *target, borrowed)?.iter().map(Gate::from)),
            Gate::Mcz(controls) => gates.extend(decompose_mcz(controls, borrowed)?),
            other => gates.push(other.clone()),
        }
    }
    QuantumCircuit::new(qc.width, gates)
}

/// Parses `qubits N`, gate lines, and an optional trailing
/// `measure q... accept b... [marginal]` line.
pub fn parse_quantum(text: &str) -> Result<(QuantumCircuit, Option<MeasurementSpec>)> {
    let mut width: Option<usize> = None;
    let mut gates = Vec::new();
    let mut measurement = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |tok: &str| -> Result<usize> {
            tok.parse().map_err(|_| Error::parse(line_no, format!("bad qubit index {tok:?}")))
        };
        let Some(w) = width else {
            if toks.len() == 2 && toks[0] == "qubits" {
                width = Some(num(toks[1])?);
                continue;
            }
            return Err(Error::parse(line_no, "expected `qubits <N>` first"));
        };
        if measurement.is_some() {
            return Err(Error::parse(line_no, "nothing may follow the measure line"));
        }
        if toks[0] == "measure" {
            let spec = parse_measure(&toks[1..], line_no)?;
            spec.validate(w).map_err(|e| Error::parse(line_no, e.to_string()))?;
            measurement = Some(spec);
            continue;
        }
        let args = &toks[1..];
        let one = |f: fn(usize) -> Gate| -> Result<Gate> {
            match args {
                [q] => Ok(f(num(q)?)),
                _ => Err(Error::parse(line_no, format!("{} takes one qubit", toks[0]))),
            }
        };
        let gate = match toks[0] {
            "X" => one(Gate::X)?,
            "H" => one(Gate::H)?,
            "Z" => one(Gate::Z)?,
            "S" => one(Gate::S)?,
            "SDG" => one(Gate::Sdg)?,
            "T" => one(Gate::T)?,
            "TDG" => one(Gate::Tdg)?,
            "CNOT" | "CZ" => match args {
                [a, b] if toks[0] == "CNOT" => Gate::Cnot(num(a)?, num(b)?),
                [a, b] => Gate::Cz(num(a)?, num(b)?),
                _ => return Err(Error::parse(line_no, format!("{} takes two qubits", toks[0]))),
            },
            "CCX" => match args {
                [a, b, c] => Gate::Toffoli(num(a)?, num(b)?, num(c)?),
                _ => return Err(Error::parse(line_no, "CCX takes three qubits")),
            },
            "GTOF" => match args.split_last() {
                Some((t, cs)) => Gate::GToffoli {
                    controls: cs.iter().map(|c| parse_control(c, line_no)).collect::<Result<_>>()?,
                    target: num(t)?,
                },
                None => return Err(Error::parse(line_no, "GTOF needs a target")),
            },
            "MCZ" => Gate::Mcz(args.iter().map(|c| parse_control(c, line_no)).collect::<Result<_>>()?),
            other => return Err(Error::parse(line_no, format!("unknown gate {other:?}"))),
        };
        gate.validate(w).map_err(|e| Error::parse(line_no, e.to_string()))?;
        gates.push(gate);
    }
    let width = width.ok_or_else(|| Error::parse(1, "missing `qubits` line"))?;
    Ok((QuantumCircuit { width, gates }, measurement))
}

fn parse_measure(toks: &[&str], line: usize) -> Result<MeasurementSpec> {
    let split = toks
        .iter()
        .position(|&t| t == "accept")
        .ok_or_else(|| Error::parse(line, "measure line needs `accept`"))?;
    let mut tail = &toks[split + 1..];
    let mut semantics = Semantics::ExactOutcome;
    if tail.last() == Some(&"marginal") {
        semantics = Semantics::Marginal;
        tail = &tail[..tail.len() - 1];
    }
    let measured = toks[..split]
        .iter()
        .map(|t| t.parse().map_err(|_| Error::parse(line, format!("bad qubit {t:?}"))))
        .collect::<Result<Vec<usize>>>()?;
    let accept = tail
        .iter()
        .map(|t| match *t {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(Error::parse(line, format!("bad accept bit {t:?}"))),
        })
        .collect::<Result<Vec<bool>>>()?;
    MeasurementSpec::new(measured, accept, semantics).map_err(|e| Error::parse(line, e.to_string()))
}
