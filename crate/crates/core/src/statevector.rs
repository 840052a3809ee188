//! Dense statevector simulator used as ground truth.
//!
//! Qubit `q` of an `N`-qubit register is bit `N − 1 − q` of the amplitude
//! index, so index order equals the lexicographic order of ket strings.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use num_complex::Complex64;

use crate::circuit::{Gate, MeasurementSpec, QuantumCircuit};
use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceType, Payload};
use crate::rational::{to_f64, ExactRational};
use crate::reversible::{run_reversible, Control};
use serde::{Deserialize, Serialize};

pub const MAX_WIDTH: usize = 26;
pub const MAX_DQC1_WIDTH: usize = 18;
pub const TOLERANCE: f64 = 1e-9;

fn omega_pow(k: u32) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * k as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(bits: &[bool]) -> Result<Self> {
        let width = bits.len();
        if width > MAX_WIDTH {
            return Err(Error::WidthOverflow { width, limit: MAX_WIDTH });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
        amps[index_of(bits)] = Complex64::new(1.0, 0.0);
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude_of(&self, bits: &[bool]) -> Result<Complex64> {
        if bits.len() != self.width {
            return Err(Error::LengthMismatch { expected: self.width, got: bits.len() });
        }
        Ok(self.amps[index_of(bits)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.width - 1 - q)
    }

    /// Mask and required value for a polarity pattern.
    fn pattern(&self, controls: &[Control]) -> (usize, usize) {
        controls.iter().fold((0, 0), |(m, v), c| {
            let b = self.mask(c.bit);
            (m | b, if c.positive { v | b } else { v })
        })
    }

    fn controlled_flip(&mut self, cmask: usize, cval: usize, target: usize) {
        let t = self.mask(target);
        for i in 0..self.amps.len() {
            if i & t == 0 && i & cmask == cval {
                self.amps.swap(i, i | t);
            }
        }
    }

    fn phase_where(&mut self, cmask: usize, cval: usize, phase: Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & cmask == cval {
                *a *= phase;
            }
        }
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.width)?;
        match gate {
            Gate::X(q) => self.controlled_flip(0, 0, *q),
            Gate::Cnot(c, t) => {
                let m = self.mask(*c);
                self.controlled_flip(m, m, *t)
            }
            Gate::Toffoli(a, b, t) => {
                let m = self.mask(*a) | self.mask(*b);
                self.controlled_flip(m, m, *t)
            }
            Gate::GToffoli { controls, target } => {
                let (m, v) = self.pattern(controls);
                self.controlled_flip(m, v, *target)
            }
            Gate::H(q) => {
                let m = self.mask(*q);
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | m]);
                        self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                        self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::Z(q) => self.phase_where(self.mask(*q), self.mask(*q), omega_pow(4)),
            Gate::S(q) => self.phase_where(self.mask(*q), self.mask(*q), omega_pow(2)),
            Gate::Sdg(q) => self.phase_where(self.mask(*q), self.mask(*q), omega_pow(6)),
            Gate::T(q) => self.phase_where(self.mask(*q), self.mask(*q), omega_pow(1)),
            Gate::Tdg(q) => self.phase_where(self.mask(*q), self.mask(*q), omega_pow(7)),
            Gate::Cz(a, b) => {
                let m = self.mask(*a) | self.mask(*b);
                self.phase_where(m, m, Complex64::new(-1.0, 0.0))
            }
            Gate::Mcz(controls) => {
                let (m, v) = self.pattern(controls);
                self.phase_where(m, v, Complex64::new(-1.0, 0.0))
            }
        }
        Ok(())
    }

    /// `Σ |⟨y|ψ⟩|²` over basis states matching the measured outcome.
    pub fn probability(&self, spec: &MeasurementSpec) -> Result<f64> {
        spec.validate(self.width)?;
        let (m, v) = self.pattern(
            &spec
                .measured
                .iter()
                .zip(&spec.accept)
                .map(|(&bit, &positive)| Control { bit, positive })
                .collect::<Vec<_>>(),
        );
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m == v)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }
}

fn index_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn run(qc: &QuantumCircuit, input: &[bool]) -> Result<StateVector> {
    if qc.width() > MAX_WIDTH {
        return Err(Error::WidthOverflow { width: qc.width(), limit: MAX_WIDTH });
    }
    if input.len() != qc.width() {
        return Err(Error::LengthMismatch { expected: qc.width(), got: input.len() });
    }
    let mut sv = StateVector::basis(input)?;
    for g in qc.gates() {
        sv.apply(g)?;
    }
    Ok(sv)
}

/// `⟨a|qc|b⟩`.
pub fn amplitude(qc: &QuantumCircuit, a: &[bool], b: &[bool]) -> Result<Complex64> {
    if a.len() != qc.width() {
        return Err(Error::LengthMismatch { expected: qc.width(), got: a.len() });
    }
    run(qc, b)?.amplitude_of(a)
}

pub fn outcome_probability(qc: &QuantumCircuit, input: &[bool], spec: &MeasurementSpec) -> Result<f64> {
    spec.validate(qc.width())?;
    run(qc, input)?.probability(spec)
}

/// Accept probability of the one-clean-qubit model: the clean qubit starts
/// in |0⟩, every other qubit is maximally mixed, and the clean qubit is
/// measured with outcome `accept`. Computed by exact averaging over the
/// `2^{N−1}` basis states of the mixed register.
pub fn dqc1_accept_probability(w: &QuantumCircuit, clean: usize, accept: bool) -> Result<f64> {
    let n = w.width();
    if n > MAX_DQC1_WIDTH {
        return Err(Error::WidthOverflow { width: n, limit: MAX_DQC1_WIDTH });
    }
    if clean >= n {
        return Err(Error::IndexOutOfRange { index: clean, width: n });
    }
    let spec = MeasurementSpec::new(vec![clean], vec![accept], crate::circuit::Semantics::ExactOutcome)?;
    let others: Vec<usize> = (0..n).filter(|&q| q != clean).collect();
    let mut total = 0.0;
    let mut input = vec![false; n];
    for idx in 0..(1u64 << others.len()) {
        for (j, &q) in others.iter().enumerate() {
            input[q] = (idx >> (others.len() - 1 - j)) & 1 == 1;
        }
        total += run(w, &input)?.probability(&spec)?;
    }
    Ok(total / (1u64 << others.len()) as f64)
}

/// Oracle value next to the closed form carried by an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub instance_type: InstanceType,
    pub n: usize,
    pub xi: usize,
    pub t: usize,
    pub h: usize,
    pub formula_value: ExactRational,
    pub oracle_value: f64,
    pub abs_diff: f64,
    pub pass: bool,
    pub timing_ms: f64,
}

/// Recomputes the instance's claimed quantity with the dense simulator
/// (or by enumeration for reversible instances) and compares it with the
/// header formula.
pub fn verify_instance(inst: &Instance) -> Result<VerifyReport> {
    let start = Instant::now();
    let hdr = &inst.header;
    let formula = hdr.formula.to_rational()?;
    let spec = hdr.measurement()?;
    let oracle_value = match (&inst.payload, hdr.kind) {
        (Payload::Reversible(c), _) => {
            let out = spec.measured[0];
            let n = hdr.n;
            if n > crate::boolean::DEFAULT_ENUM_CAP {
                return Err(Error::EnumerationCap { n, cap: crate::boolean::DEFAULT_ENUM_CAP });
            }
            let mut hits = 0u64;
            let mut input = vec![false; c.width()];
            for idx in 0..(1u64 << n) {
                for (j, slot) in input.iter_mut().take(n).enumerate() {
                    *slot = (idx >> (n - 1 - j)) & 1 == 1;
                }
                input[n..].iter_mut().for_each(|b| *b = false);
                if run_reversible(c, &input)?[out] == spec.accept[0] {
                    hits += 1;
                }
            }
            hits as f64
        }
        (Payload::Quantum(qc), InstanceType::Dqc1) => {
            dqc1_accept_probability(qc, spec.measured[0], spec.accept[0])?
        }
        (Payload::Quantum(qc), _) => outcome_probability(qc, &vec![false; qc.width()], &spec)?,
    };
    let formula_f = to_f64(&formula);
    let abs_diff = (oracle_value - formula_f).abs();
    Ok(VerifyReport {
        instance_type: hdr.kind,
        n: hdr.n,
        xi: hdr.xi,
        t: hdr.t,
        h: hdr.h,
        formula_value: ExactRational::from(&formula),
        oracle_value,
        abs_diff,
        pass: abs_diff <= TOLERANCE,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Semantics;
    use crate::parse_bits;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn single_gate_examples() {
        let h = QuantumCircuit::new(1, vec![Gate::H(0)]).unwrap();
        let sv = run(&h, &[false]).unwrap();
        assert!(close(sv.amplitudes()[0], c(FRAC_1_SQRT_2, 0.0)));
        assert!(close(sv.amplitudes()[1], c(FRAC_1_SQRT_2, 0.0)));

        let t = QuantumCircuit::new(1, vec![Gate::T(0)]).unwrap();
        assert!(close(amplitude(&t, &[true], &[true]).unwrap(), c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)));

        let cz = QuantumCircuit::new(2, vec![Gate::Cz(0, 1)]).unwrap();
        assert!(close(amplitude(&cz, &[true, true], &[true, true]).unwrap(), c(-1.0, 0.0)));
    }

    #[test]
    fn amplitude_examples() {
        let h = QuantumCircuit::new(1, vec![Gate::H(0)]).unwrap();
        assert!(close(amplitude(&h, &[false], &[false]).unwrap(), c(FRAC_1_SQRT_2, 0.0)));
        let hth = QuantumCircuit::new(1, vec![Gate::H(0), Gate::T(0), Gate::H(0)]).unwrap();
        let w = c(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert!(close(amplitude(&hth, &[false], &[false]).unwrap(), (c(1.0, 0.0) + w) / 2.0));
        let id = QuantumCircuit::empty(4);
        assert!(close(amplitude(&id, &[false; 4], &[false; 4]).unwrap(), c(1.0, 0.0)));
        assert!(amplitude(&id, &[false; 3], &[false; 4]).is_err());
    }

    #[test]
    fn big_endian_ordering() {
        let x0 = QuantumCircuit::new(3, vec![Gate::X(0)]).unwrap();
        let sv = run(&x0, &[false; 3]).unwrap();
        assert_eq!(sv.amplitudes()[0b100], c(1.0, 0.0));
    }

    #[test]
    fn polarity_gates() {
        let g = QuantumCircuit::new(
            3,
            vec![Gate::GToffoli { controls: vec![Control::pos(0), Control::neg(1)], target: 2 }],
        )
        .unwrap();
        assert!(close(amplitude(&g, &parse_bits("101").unwrap(), &parse_bits("100").unwrap()).unwrap(), c(1.0, 0.0)));
        assert!(close(amplitude(&g, &parse_bits("110").unwrap(), &parse_bits("110").unwrap()).unwrap(), c(1.0, 0.0)));
        let m = QuantumCircuit::new(3, vec![Gate::Mcz(vec![Control::pos(0), Control::neg(1), Control::neg(2)])]).unwrap();
        for idx in 0..8u64 {
            let b = crate::boolean::index_to_bits(idx, 3);
            let want = if idx == 0b100 { -1.0 } else { 1.0 };
            assert!(close(amplitude(&m, &b, &b).unwrap(), c(want, 0.0)));
        }
    }

    #[test]
    fn outcome_probability_examples() {
        let h = QuantumCircuit::new(1, vec![Gate::H(0)]).unwrap();
        let spec = MeasurementSpec::new(vec![0], vec![false], Semantics::ExactOutcome).unwrap();
        assert!((outcome_probability(&h, &[false], &spec).unwrap() - 0.5).abs() < 1e-12);
        let bad = MeasurementSpec { measured: vec![1], accept: vec![true], semantics: Semantics::ExactOutcome };
        assert!(outcome_probability(&h, &[false], &bad).is_err());
    }

    #[test]
    fn dqc1_identity() {
        let id = QuantumCircuit::empty(3);
        assert!((dqc1_accept_probability(&id, 0, false).unwrap() - 1.0).abs() < 1e-12);
        assert!(dqc1_accept_probability(&QuantumCircuit::empty(19), 0, false).is_err());
    }

    #[test]
    fn verify_examples() {
        use crate::boolean::{parse_circuit, parse_dimacs};
        use crate::constructions::*;
        let and2 = parse_circuit("g1 = AND x1 x2\nout g1").unwrap();
        let r = verify_instance(&Instance::from_hc1q(&build_hc1q(&and2).unwrap())).unwrap();
        assert!(r.pass);
        assert_eq!(r.formula_value.to_string(), "1/16");
        let clause = parse_dimacs("p cnf 3 1\n1 2 3 0").unwrap();
        let r = verify_instance(&Instance::from_cliffordt(&build_cliffordt_sharp(&clause).unwrap())).unwrap();
        assert!(r.pass && r.formula_value.to_string() == "49/128");
        let balanced = parse_circuit("g1 = AND x1 x1\nout g1").unwrap();
        let r = verify_instance(&Instance::from_gap_core(&build_gap_core(&balanced).unwrap())).unwrap();
        assert!(r.pass && r.formula_value.to_string() == "0" && r.oracle_value.abs() < 1e-12);
    }

    #[test]
    fn corrupted_instance_fails() {
        use crate::boolean::parse_circuit;
        use crate::constructions::build_hcount_gap;
        let f = parse_circuit("g1 = AND x1 x2\nout g1").unwrap();
        let mut inst = Instance::from_hcount(&build_hcount_gap(&f).unwrap());
        if let Payload::Quantum(qc) = &mut inst.payload {
            let mut gates = qc.gates().to_vec();
            gates.remove(0);
            *qc = QuantumCircuit::new(qc.width(), gates).unwrap();
        }
        assert!(!verify_instance(&inst).unwrap().pass);
    }

    #[test]
    fn width_limits() {
        let big = QuantumCircuit::empty(27);
        assert!(matches!(run(&big, &[false; 27]), Err(Error::WidthOverflow { .. })));
    }
}
