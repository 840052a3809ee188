//! Module-level laws checked on seeded random inputs.

mod common;

use fgs_core::boolean::{count, index_to_bits, unique_gap_reduction, BooleanFunction};
use fgs_core::circuit::{
    inverse, lift_reversible, rewrite_to_htcz, toffoli_to_clifford_t, Gate, QuantumCircuit,
};
use fgs_core::constructions::{
    build_cliffordt_gap, build_cliffordt_sharp, build_dqc1, build_gap_core, build_hc1q, build_hcount_gap,
    build_sharp_marginal, dqc1_formula, embed_dqc1,
};
use fgs_core::instance::Instance;
use fgs_core::pathsum::{indicator_poly, mod_amplifier, partial_sum};
use fgs_core::rational::to_f64;
use fgs_core::reversible::{compile_cnf_naive, run_reversible};
use fgs_core::statevector::{amplitude, dqc1_accept_probability, run, verify_instance};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rand::Rng;

#[test]
fn gap_by_independent_summation() {
    let mut rng = common::rng(101);
    for _ in 0..40 {
        let n = rng.gen_range(1..=12);
        let gates = rng.gen_range(1..=8);
        let f = common::random_circuit_with(&mut rng, n, gates);
        let signed: i64 = (0..1u64 << n).map(|i| if f.eval_bits(&index_to_bits(i, n)) { -1 } else { 1 }).sum();
        let r = count(&f).unwrap();
        assert_eq!(r.gap, signed);
        assert_eq!(r.gap.rem_euclid(2), 0);
    }
}

#[test]
fn unique_gap_on_pinned_circuits() {
    let mut rng = common::rng(102);
    for _ in 0..100 {
        let f = common::pinned_circuit(&mut rng);
        let sharp = count(&f).unwrap().sharp;
        assert!(sharp <= 1);
        let gap = count(&unique_gap_reduction(&f).unwrap()).unwrap().gap;
        assert_eq!(gap == 0, sharp == 1);
    }
}

#[test]
fn reversed_gates_undo() {
    let mut rng = common::rng(103);
    for _ in 0..100 {
        let width = rng.gen_range(2..=7);
        let gates = rng.gen_range(1..=15);
        let c = common::random_reversible(&mut rng, width, gates);
        let x = common::random_bits(&mut rng, width);
        let y = run_reversible(&c, &x).unwrap();
        assert_eq!(run_reversible(&c.inverse(), &y).unwrap(), x);
    }
}

#[test]
fn naive_ledger_on_3cnf() {
    let mut rng = common::rng(104);
    for _ in 0..30 {
        let n = rng.gen_range(3..=8);
        let m = rng.gen_range(1..=6);
        let f = common::random_kcnf(&mut rng, n, m, 3);
        assert_eq!(compile_cnf_naive(&f).unwrap().ledger().xi, 3 * m - 1);
    }
}

fn all_amplitudes_close(a: &QuantumCircuit, b: &QuantumCircuit, tol: f64) {
    let w = a.width();
    for i in 0..1u64 << w {
        let input = index_to_bits(i, w);
        let (sa, sb) = (run(a, &input).unwrap(), run(b, &input).unwrap());
        for (x, y) in sa.amplitudes().iter().zip(sb.amplitudes()) {
            assert!((x - y).norm() <= tol, "{x} vs {y}");
        }
    }
}

#[test]
fn rewrites_are_exact() {
    let mut rng = common::rng(105);
    for _ in 0..20 {
        let width = rng.gen_range(3..=4);
        let t = rng.gen_range(0..=4);
        let mut qc = common::random_clifford_t(&mut rng, width, t);
        let tofs = rng.gen_range(1..=3);
        for _ in 0..tofs {
            let c = common::random_reversible(&mut rng, width, 1);
            if let fgs_core::reversible::RevGate::Toffoli(..) = c.gates()[0] {
                qc.extend(lift_reversible(&c).gates().iter().cloned()).unwrap();
            } else {
                qc.push(Gate::Toffoli(0, 1, 2)).unwrap();
            }
        }
        let ct = toffoli_to_clifford_t(&qc).unwrap();
        assert_eq!(ct.t_count(), qc.t_count() + 7 * qc.count_of("CCX"));
        all_amplitudes_close(&qc, &ct, 1e-12);
        all_amplitudes_close(&qc, &rewrite_to_htcz(&ct).unwrap(), 1e-12);
        assert_eq!(inverse(&inverse(&qc)), qc);
    }
}

#[test]
fn every_construction_matches_its_formula() {
    let mut rng = common::rng(106);
    for _ in 0..12 {
        let n = rng.gen_range(3..=6);
        let m = rng.gen_range(1..=4);
        let cnf = common::random_kcnf(&mut rng, n, m, 3);
        let f = cnf.to_circuit().unwrap();
        let mut insts = vec![
            Instance::from_gap_core(&build_gap_core(&f).unwrap()),
            Instance::from_hc1q(&build_hc1q(&f).unwrap()),
            Instance::from_cliffordt(&build_cliffordt_sharp(&cnf).unwrap()),
            Instance::from_cliffordt(&build_cliffordt_gap(&cnf).unwrap()),
            Instance::from_hcount(&build_hcount_gap(&f).unwrap()),
            Instance::from_sharp_marginal(&build_sharp_marginal(&f).unwrap()),
        ];
        let (core, d) = build_dqc1(&f).unwrap();
        // mixed-input averaging is 4^N; keep it to desk-sized widths
        if d.width() <= 12 {
            insts.push(Instance::from_dqc1(&d, &core).unwrap());
        }
        for inst in insts {
            let r = verify_instance(&inst).unwrap();
            assert!(r.pass, "{:?} n={n} m={m}: {r:?}", inst.header.kind);
        }
    }
}

#[test]
fn dqc1_depends_only_on_eta() {
    // V = H(0) and V = X(0)·H(0) on two qubits both have η = 1/2
    let v1 = QuantumCircuit::new(2, vec![Gate::H(0)]).unwrap();
    let v2 = QuantumCircuit::new(2, vec![Gate::X(0), Gate::H(0), Gate::S(1)]).unwrap();
    let p1 = dqc1_accept_probability(&embed_dqc1(&v1).unwrap().w, 0, false).unwrap();
    let p2 = dqc1_accept_probability(&embed_dqc1(&v2).unwrap().w, 0, false).unwrap();
    assert!((p1 - p2).abs() < 1e-9);
    assert!((p1 - 0.25).abs() < 1e-9);
}

#[test]
fn dqc1_against_independent_eta() {
    let mut rng = common::rng(107);
    for _ in 0..50 {
        let t = rng.gen_range(0..=4);
        let v = common::random_clifford_t(&mut rng, 3, t);
        let z = [false; 3];
        let eta = amplitude(&v, &z, &z).unwrap().norm_sqr();
        let p = dqc1_accept_probability(&embed_dqc1(&v).unwrap().w, 0, false).unwrap();
        assert!((p - 4.0 * eta * (1.0 - eta) / 8.0).abs() < 1e-9);
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    assert!((to_f64(&dqc1_formula(&half, 3)) - 0.125).abs() < 1e-15);
}

#[test]
fn norm_is_preserved() {
    let mut rng = common::rng(108);
    let qc = common::random_clifford_t(&mut rng, 10, 0);
    let mut big = QuantumCircuit::empty(10);
    while big.gates().len() < 1000 {
        let t = rng.gen_range(0..=3);
        let more = common::random_clifford_t(&mut rng, 10, t);
        big.extend(more.gates().iter().cloned()).unwrap();
        let tof = common::random_reversible(&mut rng, 10, 2);
        big.extend(lift_reversible(&tof).gates().iter().cloned()).unwrap();
    }
    big.extend(qc.gates().iter().cloned()).unwrap();
    let state = run(&big, &common::random_bits(&mut rng, 10)).unwrap();
    assert!((state.norm_sqr() - 1.0).abs() <= 1e-9);
}

#[test]
fn reversible_lifts_map_basis_to_basis() {
    let mut rng = common::rng(109);
    for _ in 0..30 {
        let c = common::random_reversible(&mut rng, 5, 10);
        let x = common::random_bits(&mut rng, 5);
        let y = run_reversible(&c, &x).unwrap();
        let amp = amplitude(&lift_reversible(&c), &y, &x).unwrap();
        assert!((amp.norm() - 1.0).abs() <= 1e-12);
    }
}

fn binomial_sum(n: usize, dmax: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for d in 0..=n.min(dmax) {
        total += c;
        c = c * (n - d) as u128 / (d + 1) as u128;
    }
    total
}

/// `s_{j,k}` agrees with direct summation of `r_{k+1}(p_j)` over `z`, and
/// its monomial count respects the binomial bound.
#[test]
fn partial_sum_law() {
    let mut rng = common::rng(110);
    for _ in 0..12 {
        let v = rng.gen_range(3..=10);
        let p = common::random_phase_poly(&mut rng, v).to_int_polynomial();
        let j = rng.gen_range(0..8u8);
        let pj = indicator_poly(&p, j).unwrap();
        for k in 1..=3.min(v - 1) {
            let s = partial_sum(&pj, k).unwrap();
            assert!(s.term_count() as u128 <= binomial_sum(v - k, 14 * (2 * k + 1)));
            let r = mod_amplifier(k + 1).unwrap();
            let modulus = BigInt::from(1u64 << (k + 1));
            let ny = v - k;
            for ymask in 0..1u32 << ny {
                let mut direct = BigInt::from(0);
                for zmask in 0..1u32 << k {
                    direct += r.eval(&pj.eval_mask(ymask | (zmask << ny)));
                }
                assert_eq!(direct.mod_floor(&modulus), s.eval_mask(ymask).mod_floor(&modulus));
            }
        }
    }
}
