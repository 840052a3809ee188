//! Circuit families whose acceptance probabilities encode `gap(f)` or `#f`,
//! each paired with its closed-form probability, and the T-gate gadgetizer.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use crate::boolean::{count, BooleanCircuit, CnfFormula, CountReport};
use crate::circuit::{
    inverse, lift_reversible, toffoli_to_clifford_t, Gate, MeasurementSpec, QuantumCircuit, Semantics,
};
use crate::error::{Error, Result};
use crate::rational::dyadic;
use crate::reversible::{
    compile_boolean_naive, decompose_gtoffoli, AncillaLedger, AncillaBreakdown, Control, ReversibleCircuit,
};
use crate::statevector;

fn compile_counted(f: &BooleanCircuit) -> Result<(ReversibleCircuit, CountReport)> {
    let c = compile_boolean_naive(f)?;
    let report = count(f)?;
    Ok((c, report))
}

fn output_bit(c: &ReversibleCircuit) -> usize {
    c.ledger().output_bit.expect("naive compilation always records the output bit")
}

fn square_over_pow2(v: i64, e: usize) -> BigRational {
    let v = BigInt::from(v);
    dyadic(&v * &v, e as u32)
}

/// `V = H^{⊗n+ξ} · Z(out) · U · H^{⊗n}` on `m = n + ξ` qubits with
/// `|⟨0^m|V|0^m⟩|² = gap(f)² / 2^{2n+ξ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCoreInstance {
    pub v: QuantumCircuit,
    pub n: usize,
    pub xi: usize,
    pub count: CountReport,
    pub eta: BigRational,
}

pub fn build_gap_core(f: &BooleanCircuit) -> Result<GapCoreInstance> {
    let (c, report) = compile_counted(f)?;
    let (n, xi) = (f.n(), c.ledger().xi);
    let m = n + xi;
    let mut v = QuantumCircuit::empty(m);
    v.h_layer(0..n)?;
    v.append_at(&lift_reversible(&c), 0)?;
    v.push(Gate::Z(output_bit(&c)))?;
    v.h_layer(0..m)?;
    Ok(GapCoreInstance { v, n, xi, count: report, eta: square_over_pow2(report.gap, 2 * n + xi) })
}

/// One-clean-qubit embedding of an `m`-qubit unitary on `N = m + 2`
/// qubits: qubit 0 is clean, `1..=m` carry `V`, and `m + 1` is the borrowed
/// qubit for the multi-controlled gates. Accepts on clean outcome 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Dqc1Instance {
    pub w: QuantumCircuit,
    pub m: usize,
    /// `|⟨0^m|V|0^m⟩|²` when known exactly.
    pub eta: Option<BigRational>,
}

impl Dqc1Instance {
    pub const CLEAN_QUBIT: usize = 0;
    pub const ACCEPT: bool = false;

    pub fn width(&self) -> usize {
        self.m + 2
    }

    /// `4η(1 − η) / 2^m`.
    pub fn p_formula(&self) -> Option<BigRational> {
        self.eta.as_ref().map(|eta| dqc1_formula(eta, self.m))
    }
}

pub fn dqc1_formula(eta: &BigRational, m: usize) -> BigRational {
    let four = BigRational::from_integer(BigInt::from(4));
    four * eta * (BigRational::one() - eta) / BigRational::from_integer(BigInt::one() << m)
}

/// Flags clean on `work = 0^m`, applies `V`, phase-flips
/// `clean = 1 ∧ work = 0^m`, undoes `V`, unflags, then applies `X` on clean.
pub fn embed_dqc1(v: &QuantumCircuit) -> Result<Dqc1Instance> {
    let m = v.width();
    if m == 0 {
        return Err(Error::precondition("DQC1 embedding needs m >= 1 work qubits"));
    }
    let clean = Dqc1Instance::CLEAN_QUBIT;
    let borrowed = m + 1;
    let work_zero: Vec<Control> = (1..=m).map(Control::neg).collect();
    let flag: Vec<Gate> = decompose_gtoffoli(&work_zero, clean, borrowed)?.iter().map(Gate::from).collect();

    let mut w = QuantumCircuit::empty(m + 2);
    w.extend(flag.iter().cloned())?;
    w.append_at(v, 1)?;
    w.push(Gate::H(clean))?;
    w.extend(flag.iter().cloned())?;
    w.push(Gate::H(clean))?;
    w.append_at(&inverse(v), 1)?;
    w.extend(flag)?;
    w.push(Gate::X(clean))?;
    Ok(Dqc1Instance { w, m, eta: None })
}

pub fn build_dqc1(f: &BooleanCircuit) -> Result<(GapCoreInstance, Dqc1Instance)> {
    let core = build_gap_core(f)?;
    let mut inst = embed_dqc1(&core.v)?;
    inst.eta = Some(core.eta.clone());
    Ok((core, inst))
}

/// Hadamard sandwich around a classical reversible circuit on
/// `N = n + ξ + 2` bits: the register (`n + ξ`), one borrowed qubit for
/// the flag gate, and the flag. The borrowed qubit is sandwiched but not
/// measured; the flag is measured but not sandwiched.
#[derive(Debug, Clone, PartialEq)]
pub struct Hc1qInstance {
    pub c: ReversibleCircuit,
    pub circuit: QuantumCircuit,
    pub spec: MeasurementSpec,
    pub n: usize,
    pub xi: usize,
    pub count: CountReport,
    pub p_formula: BigRational,
}

pub fn build_hc1q(f: &BooleanCircuit) -> Result<Hc1qInstance> {
    let (u, report) = compile_counted(f)?;
    let (n, xi) = (f.n(), u.ledger().xi);
    if xi == 0 {
        return Err(Error::precondition("HC1Q layout needs at least one AND/OR gate (xi >= 1)"));
    }
    if output_bit(&u) != n + xi - 1 {
        return Err(Error::precondition("HC1Q layout needs f(x) on the last register bit"));
    }
    let reg = n + xi;
    let borrowed = reg;
    let flag = reg + 1;
    let width = reg + 2;
    let anc_zero: Vec<Control> = (n..reg).map(Control::neg).collect();
    let mut gates = decompose_gtoffoli(&anc_zero, flag, borrowed)?;
    gates.extend(u.gates().iter().cloned());
    let ledger = AncillaLedger { n, xi: xi + 2, breakdown: AncillaBreakdown::None, output_bit: Some(flag) };
    let c = ReversibleCircuit::new(width, gates, ledger)?;

    let mut circuit = QuantumCircuit::empty(width);
    circuit.h_layer(0..width - 1)?;
    circuit.append_at(&lift_reversible(&c), 0)?;
    circuit.h_layer(0..width - 1)?;

    let mut measured: Vec<usize> = (0..reg).collect();
    measured.push(flag);
    let mut accept = vec![false; reg - 1];
    accept.extend([true, true]);
    let spec = MeasurementSpec::new(measured, accept, Semantics::ExactOutcome)?;
    Ok(Hc1qInstance {
        c,
        circuit,
        spec,
        n,
        xi,
        count: report,
        p_formula: square_over_pow2(report.gap, 2 * n + 2 * xi),
    })
}

/// The amplitude `⟨z|(H^{⊗N−1}⊗I) C (H^{⊗N−1}⊗I)|0^N⟩` predicted from the
/// classical action of `C`: `2^{−(N−1)} Σ_x (−1)^{Σ_{j<N} z_j C_j(x0)} δ[z_N = C_N(x0)]`.
pub fn hc1q_amplitude_law(c: &ReversibleCircuit, z: &[bool]) -> Result<f64> {
    let w = c.width();
    if z.len() != w {
        return Err(Error::LengthMismatch { expected: w, got: z.len() });
    }
    let mut total = 0i64;
    for idx in 0..(1u64 << (w - 1)) {
        let mut x = crate::boolean::index_to_bits(idx, w - 1);
        x.push(false);
        let y = crate::reversible::run_reversible(c, &x)?;
        if y[w - 1] != z[w - 1] {
            continue;
        }
        let parity = (0..w - 1).filter(|&j| z[j] && y[j]).count() % 2;
        total += if parity == 0 { 1 } else { -1 };
    }
    Ok(total as f64 / (1u64 << (w - 1)) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Sharp,
    Gap,
}

/// Clifford+T circuit from a 3-CNF with `|⟨0|V|0⟩|²` equal to the formula.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordTInstance {
    pub v: QuantumCircuit,
    pub variant: Variant,
    pub n: usize,
    pub xi: usize,
    pub m: usize,
    pub t: usize,
    pub count: CountReport,
    pub p_formula: BigRational,
}

fn require_3cnf(f: &CnfFormula) -> Result<()> {
    if f.m() == 0 || !f.is_exact_3cnf() {
        return Err(Error::precondition("Clifford+T targets need a 3-CNF with m >= 1 clauses of exactly 3 literals"));
    }
    Ok(())
}

/// `V = (H^{⊗n+ξ−1} ⊗ X) · U · H^{⊗n}`, TOFFOLIs expanded to Clifford+T;
/// `p = (#f)² / 2^{2n+ξ−1}`.
pub fn build_cliffordt_sharp(f: &CnfFormula) -> Result<CliffordTInstance> {
    require_3cnf(f)?;
    let circ = f.to_circuit()?;
    let (u, report) = compile_counted(&circ)?;
    let (n, xi) = (f.n(), u.ledger().xi);
    let m = n + xi;
    debug_assert_eq!(output_bit(&u), m - 1);
    let mut v = QuantumCircuit::empty(m);
    v.h_layer(0..n)?;
    v.append_at(&lift_reversible(&u), 0)?;
    v.h_layer(0..m - 1)?;
    v.push(Gate::X(m - 1))?;
    let v = toffoli_to_clifford_t(&v)?;
    Ok(CliffordTInstance {
        t: v.t_count(),
        v,
        variant: Variant::Sharp,
        n,
        xi,
        m: f.m(),
        count: report,
        p_formula: square_over_pow2(report.sharp as i64, 2 * n + xi - 1),
    })
}

/// The gap core with TOFFOLIs expanded; `p = gap² / 2^{2n+ξ}`.
pub fn build_cliffordt_gap(f: &CnfFormula) -> Result<CliffordTInstance> {
    require_3cnf(f)?;
    let core = build_gap_core(&f.to_circuit()?)?;
    let v = toffoli_to_clifford_t(&core.v)?;
    Ok(CliffordTInstance {
        t: v.t_count(),
        v,
        variant: Variant::Gap,
        n: core.n,
        xi: core.xi,
        m: f.m(),
        count: core.count,
        p_formula: core.eta,
    })
}

/// `W = (H^{⊗n}⊗I^{⊗ξ}⊗H) · U† · CNOT(out → extra) · U · H^{⊗n}` on
/// `n + ξ + 1` qubits, accepting `0^{n+ξ}1` with probability
/// `gap² / 2^{2n+1}`; `W` has `2n + 1` Hadamards.
#[derive(Debug, Clone, PartialEq)]
pub struct HCountInstance {
    pub w: QuantumCircuit,
    pub spec: MeasurementSpec,
    pub n: usize,
    pub xi: usize,
    pub h: usize,
    pub count: CountReport,
    pub p_formula: BigRational,
}

/// `H^n`, clean computation of `f` into a fresh last qubit.
fn clean_f_copy(u: &ReversibleCircuit, n: usize) -> Result<QuantumCircuit> {
    let width = u.width() + 1;
    let lifted = lift_reversible(u);
    let mut qc = QuantumCircuit::empty(width);
    qc.h_layer(0..n)?;
    qc.append_at(&lifted, 0)?;
    qc.push(Gate::Cnot(output_bit(u), width - 1))?;
    qc.append_at(&inverse(&lifted), 0)?;
    Ok(qc)
}

pub fn build_hcount_gap(f: &BooleanCircuit) -> Result<HCountInstance> {
    let (u, report) = compile_counted(f)?;
    let (n, xi) = (f.n(), u.ledger().xi);
    let mut w = clean_f_copy(&u, n)?;
    let extra = n + xi;
    w.h_layer(0..n)?;
    w.push(Gate::H(extra))?;
    let mut accept = vec![false; n + xi];
    accept.push(true);
    Ok(HCountInstance {
        h: w.h_count(),
        w,
        spec: MeasurementSpec::all(accept),
        n,
        xi,
        count: report,
        p_formula: square_over_pow2(report.gap, 2 * n + 1),
    })
}

/// `V = U_clean · H^{⊗n}` whose last-qubit marginal is `#f / 2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpMarginalInstance {
    pub v: QuantumCircuit,
    pub spec: MeasurementSpec,
    pub n: usize,
    pub xi: usize,
    pub h: usize,
    pub count: CountReport,
    pub p_formula: BigRational,
}

pub fn build_sharp_marginal(f: &BooleanCircuit) -> Result<SharpMarginalInstance> {
    let (u, report) = compile_counted(f)?;
    let (n, xi) = (f.n(), u.ledger().xi);
    let v = clean_f_copy(&u, n)?;
    let last = v.width() - 1;
    let spec = MeasurementSpec::new(vec![last], vec![true], Semantics::Marginal)?;
    Ok(SharpMarginalInstance {
        h: v.h_count(),
        v,
        spec,
        n,
        xi,
        count: report,
        p_formula: dyadic(report.sharp, n as u32),
    })
}

/// A Clifford circuit on `n + t` qubits with T gates replaced by injection
/// gadgets, plus the preparation of `|A⟩^{⊗t}` on the gadget qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetizedInstance {
    pub vc: QuantumCircuit,
    pub n: usize,
    pub t: usize,
}

impl GadgetizedInstance {
    /// `H` then `T` on every gadget qubit.
    pub fn magic_prep(&self) -> QuantumCircuit {
        let mut prep = QuantumCircuit::empty(self.n + self.t);
        for q in self.n..self.n + self.t {
            prep.push(Gate::H(q)).expect("in range");
            prep.push(Gate::T(q)).expect("in range");
        }
        prep
    }

    /// `√2^t · ⟨0^{n+t}|Vc(|0^n⟩⊗|A⟩^{⊗t})`.
    pub fn gadget_amplitude(&self) -> Result<Complex64> {
        let mut full = self.magic_prep();
        full.append_at(&self.vc, 0)?;
        let zeros = vec![false; self.n + self.t];
        let amp = statevector::amplitude(&full, &zeros, &zeros)?;
        Ok(amp * 2f64.powf(self.t as f64 / 2.0))
    }
}

/// Replaces each T on qubit `q` by `H(a) CZ(q, a) H(a)` on a fresh qubit
/// `a` holding `|A⟩` and post-selected on `⟨0|`. TDG is first rewritten as
/// `Z S T`.
pub fn gadgetize_t(u: &QuantumCircuit) -> Result<GadgetizedInstance> {
    let n = u.width();
    let mut body = Vec::new();
    let mut t = 0;
    for g in u.gates() {
        let expanded = match *g {
            Gate::Tdg(q) => vec![Gate::Z(q), Gate::S(q), Gate::T(q)],
            ref other => vec![other.clone()],
        };
        for g in expanded {
            match g {
                Gate::T(q) => {
                    let a = n + t;
                    t += 1;
                    body.extend([Gate::H(a), Gate::Cz(q, a), Gate::H(a)]);
                }
                ref c if c.is_clifford() => body.push(g),
                other => {
                    return Err(Error::UnsupportedGate(format!(
                        "{} is not Clifford+T; decompose it before gadgetizing",
                        other.name()
                    )))
                }
            }
        }
    }
    let vc = QuantumCircuit::new(n + t, body)?;
    Ok(GadgetizedInstance { vc, n, t })
}
