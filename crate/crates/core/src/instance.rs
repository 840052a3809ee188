//! Instance files: one line of JSON header followed by the circuit text.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::boolean::CountReport;
use crate::circuit::{parse_quantum, MeasurementSpec, QuantumCircuit, Semantics};
use crate::constructions::{
    CliffordTInstance, Dqc1Instance, GapCoreInstance, HCountInstance, Hc1qInstance, SharpMarginalInstance, Variant,
};
use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::reversible::{parse_reversible, AncillaBreakdown, AncillaLedger, ReversibleCircuit};
use crate::{format_bits, parse_bits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceType {
    Reversible,
    GapCore,
    Dqc1,
    Hc1q,
    CliffordTSharp,
    CliffordTGap,
    HCount,
    SharpMarginal,
}

impl InstanceType {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceType::Reversible => "reversible",
            InstanceType::GapCore => "gap-core",
            InstanceType::Dqc1 => "dqc1",
            InstanceType::Hc1q => "hc1q",
            InstanceType::CliffordTSharp => "clifford-t-sharp",
            InstanceType::CliffordTGap => "clifford-t-gap",
            InstanceType::HCount => "h-count",
            InstanceType::SharpMarginal => "sharp-marginal",
        }
    }
}

/// For `reversible` instances `formula` is `#f` and `measured` holds the
/// output bit; for `dqc1` it is the clean-qubit accept probability under
/// the mixed input; otherwise it is the probability of `accept_outcome` on
/// `measured` starting from `|0…0⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceHeader {
    #[serde(rename = "type")]
    pub kind: InstanceType,
    pub n: usize,
    pub xi: usize,
    pub t: usize,
    pub h: usize,
    pub width: usize,
    pub formula: ExactRational,
    pub accept_outcome: String,
    pub measured: Vec<usize>,
    pub semantics: Semantics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharp: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<AncillaBreakdown>,
}

impl InstanceHeader {
    pub fn measurement(&self) -> Result<MeasurementSpec> {
        MeasurementSpec::new(self.measured.clone(), parse_bits(&self.accept_outcome)?, self.semantics)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Quantum(QuantumCircuit),
    Reversible(ReversibleCircuit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub header: InstanceHeader,
    pub payload: Payload,
}

struct Common<'a> {
    kind: InstanceType,
    n: usize,
    xi: usize,
    formula: &'a BigRational,
    spec: MeasurementSpec,
    count: Option<&'a CountReport>,
}

fn quantum(c: Common<'_>, qc: &QuantumCircuit) -> Instance {
    Instance {
        header: InstanceHeader {
            kind: c.kind,
            n: c.n,
            xi: c.xi,
            t: qc.t_count(),
            h: qc.h_count(),
            width: qc.width(),
            formula: c.formula.into(),
            accept_outcome: format_bits(&c.spec.accept),
            measured: c.spec.measured.clone(),
            semantics: c.spec.semantics,
            sharp: c.count.map(|r| r.sharp),
            gap: c.count.map(|r| r.gap),
            breakdown: None,
        },
        payload: Payload::Quantum(qc.clone()),
    }
}

fn all_zero_spec(width: usize) -> MeasurementSpec {
    MeasurementSpec::all(vec![false; width])
}

impl Instance {
    /// A reversible compilation whose checkable claim is the number of
    /// payloads with output bit 1.
    pub fn from_reversible(c: &ReversibleCircuit, count: &CountReport) -> Result<Self> {
        let l = c.ledger();
        let out = l.output_bit.ok_or_else(|| Error::precondition("reversible instance needs an output bit"))?;
        Ok(Instance {
            header: InstanceHeader {
                kind: InstanceType::Reversible,
                n: l.n,
                xi: l.xi,
                t: 0,
                h: 0,
                width: c.width(),
                formula: (&BigRational::from_integer(BigInt::from(count.sharp))).into(),
                accept_outcome: "1".into(),
                measured: vec![out],
                semantics: Semantics::ExactOutcome,
                sharp: Some(count.sharp),
                gap: Some(count.gap),
                breakdown: Some(l.breakdown),
            },
            payload: Payload::Reversible(c.clone()),
        })
    }

    pub fn from_gap_core(g: &GapCoreInstance) -> Self {
        let spec = all_zero_spec(g.v.width());
        let c = Common { kind: InstanceType::GapCore, n: g.n, xi: g.xi, formula: &g.eta, spec, count: Some(&g.count) };
        quantum(c, &g.v)
    }

    /// Needs the exact `η` (as set by `build_dqc1`).
    pub fn from_dqc1(d: &Dqc1Instance, core: &GapCoreInstance) -> Result<Self> {
        let p = d.p_formula().ok_or_else(|| Error::precondition("DQC1 instance has no exact eta"))?;
        let spec = MeasurementSpec::new(
            vec![Dqc1Instance::CLEAN_QUBIT],
            vec![Dqc1Instance::ACCEPT],
            Semantics::ExactOutcome,
        )?;
        let c = Common { kind: InstanceType::Dqc1, n: core.n, xi: core.xi, formula: &p, spec, count: Some(&core.count) };
        Ok(quantum(c, &d.w))
    }

    pub fn from_hc1q(h: &Hc1qInstance) -> Self {
        let c = Common {
            kind: InstanceType::Hc1q,
            n: h.n,
            xi: h.xi,
            formula: &h.p_formula,
            spec: h.spec.clone(),
            count: Some(&h.count),
        };
        quantum(c, &h.circuit)
    }

    pub fn from_cliffordt(ct: &CliffordTInstance) -> Self {
        let kind = match ct.variant {
            Variant::Sharp => InstanceType::CliffordTSharp,
            Variant::Gap => InstanceType::CliffordTGap,
        };
        let spec = all_zero_spec(ct.v.width());
        quantum(Common { kind, n: ct.n, xi: ct.xi, formula: &ct.p_formula, spec, count: Some(&ct.count) }, &ct.v)
    }

    pub fn from_hcount(h: &HCountInstance) -> Self {
        let c = Common {
            kind: InstanceType::HCount,
            n: h.n,
            xi: h.xi,
            formula: &h.p_formula,
            spec: h.spec.clone(),
            count: Some(&h.count),
        };
        quantum(c, &h.w)
    }

    pub fn from_sharp_marginal(s: &SharpMarginalInstance) -> Self {
        let c = Common {
            kind: InstanceType::SharpMarginal,
            n: s.n,
            xi: s.xi,
            formula: &s.p_formula,
            spec: s.spec.clone(),
            count: Some(&s.count),
        };
        quantum(c, &s.v)
    }

    pub fn to_text(&self) -> Result<String> {
        let header = serde_json::to_string(&self.header)
            .map_err(|e| Error::precondition(format!("header serialization failed: {e}")))?;
        let body = match &self.payload {
            Payload::Quantum(qc) => qc.to_text(Some(&self.header.measurement()?)),
            Payload::Reversible(c) => c.to_text(),
        };
        Ok(format!("{header}\n{body}"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
        let header: InstanceHeader =
            serde_json::from_str(first).map_err(|e| Error::parse(1, format!("bad JSON header: {e}")))?;
        header.measurement().map_err(|e| Error::parse(1, e.to_string()))?;
        // payload line numbers are reported relative to the whole file
        let shift = |e: Error| match e {
            Error::Parse { line, msg } => Error::Parse { line: line + 1, msg },
            other => other,
        };
        let payload = if header.kind == InstanceType::Reversible {
            let plain = parse_reversible(rest).map_err(shift)?;
            let ledger = AncillaLedger {
                n: header.n,
                xi: header.xi,
                breakdown: header.breakdown.unwrap_or(AncillaBreakdown::None),
                output_bit: header.measured.first().copied(),
            };
            Payload::Reversible(
                ReversibleCircuit::new(plain.width(), plain.gates().to_vec(), ledger)
                    .map_err(|e| Error::parse(1, e.to_string()))?,
            )
        } else {
            let (qc, spec) = parse_quantum(rest).map_err(shift)?;
            if spec.as_ref() != Some(&header.measurement()?) {
                return Err(Error::parse(1, "header measurement does not match the circuit's measure line"));
            }
            Payload::Quantum(qc)
        };
        let width = match &payload {
            Payload::Quantum(qc) => qc.width(),
            Payload::Reversible(c) => c.width(),
        };
        if width != header.width {
            return Err(Error::parse(1, format!("header width {} but circuit width {width}", header.width)));
        }
        Ok(Instance { header, payload })
    }
}
