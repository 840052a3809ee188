use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fgs_core::boolean::{
    count_with_cap, parse_circuit, parse_dimacs, unique_gap_reduction, BooleanCircuit, CnfFormula, CountReport,
    DEFAULT_ENUM_CAP,
};
use fgs_core::circuit::{parse_quantum, rewrite_to_htcz, toffoli_to_clifford_t, Gate, QuantumCircuit};
use fgs_core::constructions::{
    build_cliffordt_gap, build_cliffordt_sharp, build_dqc1, build_gap_core, build_hc1q, build_hcount_gap,
    build_sharp_marginal,
};
use fgs_core::instance::Instance;
use fgs_core::pathsum::{
    amplitude_pathsum, amplitude_via_counting, count_roots_mod8, default_split, direct_sum, CyclotomicAmplitude,
    PhasePolynomialMod8,
};
use fgs_core::reversible::{compile_boolean_naive, compile_cnf_counter};
use fgs_core::statevector::{amplitude, outcome_probability, verify_instance};
use fgs_core::{parse_bits, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

const EXIT_PARSE: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;
const EXIT_VERIFY: u8 = 5;
const BENCH_MAX_H: usize = 26;

#[derive(Parser)]
#[command(name = "fgs", version, about = "Compile Boolean formulas into counting-hard quantum circuits and check them exactly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count satisfying assignments by enumeration.
    Count {
        #[command(flatten)]
        input: FunctionInput,
        #[arg(long, value_enum, default_value_t = Mode::Sharp)]
        mode: Mode,
    },
    /// Build an instance file.
    Compile {
        #[command(flatten)]
        input: FunctionInput,
        #[arg(long, value_enum)]
        target: Target,
        /// Instance path; the instance goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an instance's closed-form probability against the statevector.
    Verify {
        #[arg(long, conflicts_with_all = ["cnf", "circuit"])]
        instance: Option<PathBuf>,
        #[arg(long, conflicts_with = "circuit")]
        cnf: Option<PathBuf>,
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[arg(long, value_enum, required_unless_present = "instance")]
        target: Option<Target>,
    },
    /// Compute one amplitude ⟨output|U|input⟩ of a quantum circuit file.
    Simulate {
        /// Quantum circuit or instance file.
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Statevector)]
        method: Method,
        /// Input basis state as a bit string (default all zeros).
        #[arg(long)]
        input: Option<String>,
        /// Output basis state as a bit string (default all zeros).
        #[arg(long)]
        output: Option<String>,
        /// Split size for the counting method.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Time direct summation against the counting pipeline.
    Bench {
        /// Benchmark the path-sum evaluators (the only suite).
        #[arg(long)]
        pathsum: bool,
        /// Inclusive range of variable counts, e.g. `10..14`.
        #[arg(long, default_value = "8..14")]
        h_range: String,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FunctionInput {
    /// DIMACS CNF file.
    #[arg(long)]
    cnf: Option<PathBuf>,
    /// Gate-circuit file.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Sharp,
    Gap,
    UniqueGap,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Reversible,
    GapCore,
    Dqc1,
    Hc1q,
    CliffordTSharp,
    CliffordTGap,
    HCount,
    SharpMarginal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Statevector,
    Pathsum,
    Counting,
}

enum Function {
    Cnf(CnfFormula),
    Circuit(BooleanCircuit),
}

impl Function {
    fn n(&self) -> usize {
        match self {
            Function::Cnf(f) => f.n(),
            Function::Circuit(c) => c.n(),
        }
    }

    fn circuit(&self) -> fgs_core::Result<BooleanCircuit> {
        match self {
            Function::Cnf(f) => f.to_circuit(),
            Function::Circuit(c) => Ok(c.clone()),
        }
    }
}

fn enum_cap() -> anyhow::Result<usize> {
    match std::env::var("FGS_ENUM_CAP") {
        Ok(v) => v.trim().parse().with_context(|| format!("FGS_ENUM_CAP={v:?} is not a number")),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_function(cnf: Option<&Path>, circuit: Option<&Path>) -> anyhow::Result<Function> {
    match (cnf, circuit) {
        (Some(p), None) => Ok(Function::Cnf(parse_dimacs(&read(p)?).with_context(|| p.display().to_string())?)),
        (None, Some(p)) => {
            Ok(Function::Circuit(parse_circuit(&read(p)?).with_context(|| p.display().to_string())?))
        }
        _ => bail!(Error::Precondition("give exactly one of --cnf and --circuit".into())),
    }
}

fn check_cap(n: usize) -> anyhow::Result<()> {
    let cap = enum_cap()?;
    if n > cap {
        bail!(Error::EnumerationCap { n, cap });
    }
    Ok(())
}

fn print_json(v: &impl Serialize) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn cmd_count(f: &Function, mode: Mode) -> anyhow::Result<()> {
    let cap = enum_cap()?;
    let report: CountReport = match (mode, f) {
        (Mode::UniqueGap, _) => count_with_cap(&unique_gap_reduction(&f.circuit()?)?, cap)?,
        (_, Function::Cnf(c)) => count_with_cap(c, cap)?,
        (_, Function::Circuit(c)) => count_with_cap(c, cap)?,
    };
    print_json(&json!({ "mode": mode, "n": report.n, "sharp": report.sharp, "gap": report.gap }))
}

fn require_3cnf(f: &Function) -> anyhow::Result<&CnfFormula> {
    match f {
        Function::Cnf(c) => Ok(c),
        Function::Circuit(_) => bail!(Error::Precondition("clifford-t targets need a 3-CNF given with --cnf".into())),
    }
}

fn build(f: &Function, target: Target) -> anyhow::Result<Instance> {
    check_cap(f.n())?;
    Ok(match target {
        Target::Reversible => {
            let (c, report) = match f {
                Function::Cnf(cnf) => (compile_cnf_counter(cnf)?, count_with_cap(cnf, enum_cap()?)?),
                Function::Circuit(bc) => (compile_boolean_naive(bc)?, count_with_cap(bc, enum_cap()?)?),
            };
            Instance::from_reversible(&c, &report)?
        }
        Target::GapCore => Instance::from_gap_core(&build_gap_core(&f.circuit()?)?),
        Target::Dqc1 => {
            let (core, d) = build_dqc1(&f.circuit()?)?;
            Instance::from_dqc1(&d, &core)?
        }
        Target::Hc1q => Instance::from_hc1q(&build_hc1q(&f.circuit()?)?),
        Target::CliffordTSharp => Instance::from_cliffordt(&build_cliffordt_sharp(require_3cnf(f)?)?),
        Target::CliffordTGap => Instance::from_cliffordt(&build_cliffordt_gap(require_3cnf(f)?)?),
        Target::HCount => Instance::from_hcount(&build_hcount_gap(&f.circuit()?)?),
        Target::SharpMarginal => Instance::from_sharp_marginal(&build_sharp_marginal(&f.circuit()?)?),
    })
}

fn cmd_compile(f: &Function, target: Target, out: Option<&Path>) -> anyhow::Result<()> {
    let inst = build(f, target)?;
    let text = inst.to_text()?;
    match out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
            print_json(&inst.header)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_verify(inst: &Instance) -> anyhow::Result<bool> {
    let report = verify_instance(inst)?;
    print_json(&report)?;
    Ok(report.pass)
}

/// Lowers to {H, T, CZ} when the circuit has no multi-controlled gates.
fn lower_for_pathsum(qc: &QuantumCircuit) -> anyhow::Result<QuantumCircuit> {
    if qc.is_htcz() {
        return Ok(qc.clone());
    }
    if qc.gates().iter().any(|g| matches!(g, Gate::GToffoli { .. } | Gate::Mcz(_))) {
        bail!(Error::UnsupportedGate("GTOF/MCZ must be decomposed before path-sum simulation".into()));
    }
    Ok(rewrite_to_htcz(&toffoli_to_clifford_t(qc)?)?)
}

fn bits_or_zeros(s: Option<&str>, width: usize) -> anyhow::Result<Vec<bool>> {
    let bits = match s {
        Some(s) => parse_bits(s)?,
        None => vec![false; width],
    };
    if bits.len() != width {
        bail!(Error::LengthMismatch { expected: width, got: bits.len() });
    }
    Ok(bits)
}

fn load_quantum(path: &Path) -> anyhow::Result<QuantumCircuit> {
    let text = read(path)?;
    // instance files start with a JSON header
    if text.trim_start().starts_with('{') {
        return match Instance::parse(&text)?.payload {
            fgs_core::instance::Payload::Quantum(qc) => Ok(qc),
            fgs_core::instance::Payload::Reversible(c) => Ok(fgs_core::circuit::lift_reversible(&c)),
        };
    }
    Ok(parse_quantum(&text)?.0)
}

fn cmd_simulate(
    path: &Path,
    method: Method,
    input: Option<&str>,
    output: Option<&str>,
    k: Option<usize>,
) -> anyhow::Result<()> {
    let qc = load_quantum(path)?;
    let b = bits_or_zeros(input, qc.width())?;
    let a = bits_or_zeros(output, qc.width())?;
    match method {
        Method::Statevector => {
            let amp = amplitude(&qc, &a, &b)?;
            let mut report = json!({
                "amplitude_re": amp.re,
                "amplitude_im": amp.im,
                "probability": amp.norm_sqr(),
            });
            if let Ok((_, Some(spec))) = parse_quantum(&read(path)?) {
                report["accept_probability"] = json!(outcome_probability(&qc, &b, &spec)?);
            }
            print_json(&report)
        }
        Method::Pathsum | Method::Counting => {
            let low = lower_for_pathsum(&qc)?;
            let (amp, v, k, term_count) = if matches!(method, Method::Pathsum) {
                let (amp, s) = amplitude_pathsum(&low, &a, &b)?;
                (amp, s.v(), None, None)
            } else {
                let (c, p) = amplitude_via_counting(&low, &a, &b, k)?;
                let (k, terms) = match &c.report {
                    Some(r) => (Some(r.k), Some(r.term_count)),
                    None => (None, None),
                };
                (c.amplitude, p.v(), k, terms)
            };
            let z = amp.to_complex();
            print_json(&json!({
                "coeffs": amp.coeffs(),
                "half_exponent": amp.half_exponent(),
                "complex": { "re": z.re, "im": z.im },
                "v": v,
                "k": k,
                "term_count": term_count,
            }))
        }
    }
}

fn parse_range(s: &str) -> anyhow::Result<(usize, usize)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| Error::Parse { line: 1, msg: format!("h-range {s:?} is not LO..HI") })?;
    let parse = |t: &str| -> anyhow::Result<usize> {
        t.trim().parse().map_err(|_| anyhow!(Error::Parse { line: 1, msg: format!("bad bound {t:?}") }))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo < 2 || lo > hi {
        bail!(Error::Precondition(format!("h-range needs 2 <= LO <= HI, got {lo}..{hi}")));
    }
    if hi > BENCH_MAX_H {
        bail!(Error::WidthOverflow { width: hi, limit: BENCH_MAX_H });
    }
    Ok((lo, hi))
}

fn random_phase_poly(rng: &mut ChaCha8Rng, v: usize) -> fgs_core::Result<PhasePolynomialMod8> {
    let linear = (0..v).map(|_| rng.gen_range(0..8)).collect();
    let mut pairs = Vec::new();
    for i in 0..v {
        for j in i + 1..v {
            if rng.gen_bool(0.5) {
                pairs.push((i, j));
            }
        }
    }
    PhasePolynomialMod8::new(v, rng.gen_range(0..8), linear, pairs, v as i32)
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Least-squares slope of `log2(ms)` against `h`.
fn log2_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(h, t)| (h as f64, t.log2())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn cmd_bench(h_range: &str, trials: usize, seed: u64) -> anyhow::Result<()> {
    let (lo, hi) = parse_range(h_range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let (mut direct_pts, mut counting_pts) = (Vec::new(), Vec::new());
    if trials > 0 {
        for h in lo..=hi {
            let (mut direct_ms, mut counting_ms) = (Vec::new(), Vec::new());
            let mut agree = true;
            for _ in 0..trials {
                let p = random_phase_poly(&mut rng, h)?;
                let t = Instant::now();
                let d = direct_sum(&p)?;
                direct_ms.push(t.elapsed().as_secs_f64() * 1e3);
                let t = Instant::now();
                let r = count_roots_mod8(&p, default_split(h))?;
                counting_ms.push(t.elapsed().as_secs_f64() * 1e3);
                agree &= r.conserved && CyclotomicAmplitude::from_counts(&r.counts, h as i32) == d;
            }
            let (dm, cm) = (median(&mut direct_ms), median(&mut counting_ms));
            direct_pts.push((h, dm));
            counting_pts.push((h, cm));
            rows.push(json!({
                "h": h,
                "k": default_split(h),
                "direct_sum_median_ms": dm,
                "counting_median_ms": cm,
                "agree": agree,
            }));
        }
    }
    print_json(&json!({
        "seed": seed,
        "trials": trials,
        "h_range": [lo, hi],
        "split_rule": "k = max(1, floor(0.015035 v))",
        "rows": rows,
        "fitted_log2_slope": {
            "direct_sum": log2_slope(&direct_pts),
            "counting": log2_slope(&counting_pts),
        },
    }))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Count { input, mode } => {
            let f = load_function(input.cnf.as_deref(), input.circuit.as_deref())?;
            cmd_count(&f, mode)?;
        }
        Command::Compile { input, target, out } => {
            let f = load_function(input.cnf.as_deref(), input.circuit.as_deref())?;
            cmd_compile(&f, target, out.as_deref())?;
        }
        Command::Verify { instance, cnf, circuit, target } => {
            let inst = match (instance, target) {
                (Some(path), _) => Instance::parse(&read(&path)?).with_context(|| path.display().to_string())?,
                (None, Some(t)) => build(&load_function(cnf.as_deref(), circuit.as_deref())?, t)?,
                (None, None) => bail!(Error::Precondition("verify needs --instance or --target".into())),
            };
            if !cmd_verify(&inst)? {
                return Ok(ExitCode::from(EXIT_VERIFY));
            }
        }
        Command::Simulate { file, method, input, output, k } => {
            cmd_simulate(&file, method, input.as_deref(), output.as_deref(), k)?;
        }
        Command::Bench { pathsum: _, h_range, trials, seed } => cmd_bench(&h_range, trials, seed)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Parse { .. }) => EXIT_PARSE,
        Some(Error::EnumerationCap { .. }) => EXIT_CAP,
        Some(_) => EXIT_PRECONDITION,
        None => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
