//! `dlshor` — command-line front end for the discrete-logarithm simulation
//! toolkit: capture tables, histogram building and sampling, classical
//! post-processing, end-to-end simulation campaigns, exact-oracle
//! comparison, and the quantum cost model.
//!
//! Exit codes: 0 success, 1 usage or file/parse error, 2 computation
//! failure, 3 no solution found, 4 resource guard refusal.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;
use rug::Integer;

use dlshor::histogram::{self, Histogram, SampledOutcome};
use dlshor::oracle;
use dlshor::quadrature::{capture_table, QuadratureConfig};
use dlshor::solver::{self, EqualityVerifier, Failure, GroupVerifier};
use dlshor::{Error, FrequencyPair, ProblemInstance, PublicInstance};

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTE: u8 = 2;
const EXIT_NO_SOLUTION: u8 = 3;
const EXIT_RESOURCE_GUARD: u8 = 4;

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn compute(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_COMPUTE,
            message: message.into(),
        }
    }

    fn no_solution(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NO_SOLUTION,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ResourceGuard(..) => EXIT_RESOURCE_GUARD,
            Error::InvalidInput(_) | Error::InvalidModulus => EXIT_USAGE,
            Error::Malformed(_) | Error::UnknownVersion(_) | Error::ChecksumMismatch => EXIT_USAGE,
            _ => EXIT_COMPUTE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(format!("i/o error: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "dlshor",
    version,
    about = "Model, simulate and post-process the uniform-superposition discrete-log quantum algorithm"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the capture-probability table over an ell range and B list
    Table(TableArgs),
    /// Build a histogram file for an instance
    BuildHist(BuildHistArgs),
    /// Draw simulated outputs (j, k) from a histogram file
    Sample(SampleArgs),
    /// Post-process a single pair (j, k) into candidate logarithms
    Solve(SolveArgs),
    /// End-to-end campaign: build, sample, solve, report rates
    Simulate(SimulateArgs),
    /// Compare the heuristic model against the exact brute-force oracle
    ExactCompare(ExactCompareArgs),
    /// Report the quantum cost model for given m and ell
    Cost(CostArgs),
}

#[derive(Args)]
struct TableArgs {
    /// Bit length of the group order
    #[arg(long)]
    m: u32,
    /// Padding lengths: single value, comma list, or inclusive range "0..8"
    #[arg(long)]
    ell: String,
    /// Group order: decimal, 0x-hex, "max" (2^m - 1), or "prime:<bits>"
    #[arg(long)]
    r: String,
    /// Search bounds B, comma separated
    #[arg(long = "B", value_name = "LIST", default_value = "0,1,2,10,20,50,100,200,500")]
    b_list: String,
    #[arg(long, default_value_t = 192)]
    precision: u32,
    /// Seed (used only when --r needs randomness)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildHistArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    ell: u32,
    /// Group order: decimal, 0x-hex, "max", or "prime:<bits>"
    #[arg(long)]
    r: String,
    /// Known logarithm; drawn uniformly from [0, r) when omitted
    #[arg(long)]
    d: Option<String>,
    /// Histogram covers |Delta| <= B_max
    #[arg(long = "B-max")]
    b_max: u64,
    #[arg(long, default_value_t = 16)]
    cells_per_unit: u32,
    #[arg(long, default_value_t = 192)]
    precision: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output histogram file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    /// Histogram file produced by build-hist
    #[arg(long)]
    hist: PathBuf,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    ell: u32,
    #[arg(long)]
    r: String,
    /// First measured frequency
    #[arg(long)]
    j: String,
    /// Second measured frequency
    #[arg(long)]
    k: String,
    /// Search bound B
    #[arg(long = "B")]
    b: u64,
    /// Verify candidates against this known logarithm
    #[arg(long)]
    expect_d: Option<String>,
    /// Verify candidates in the group Z_p^*: modulus p
    #[arg(long, requires = "group_gen", requires = "group_x")]
    group_mod: Option<String>,
    /// Group generator g
    #[arg(long)]
    group_gen: Option<String>,
    /// Group element x = g^d
    #[arg(long)]
    group_x: Option<String>,
    #[arg(long, default_value_t = solver::DEFAULT_TAU_LIMIT)]
    tau_limit: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    ell: u32,
    #[arg(long)]
    r: String,
    /// Known logarithm; drawn uniformly from [0, r) when omitted
    #[arg(long)]
    d: Option<String>,
    /// Post-processing search bound
    #[arg(long = "B")]
    b: u64,
    /// Histogram coverage; defaults to B
    #[arg(long = "B-max")]
    b_max: Option<u64>,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    cells_per_unit: u32,
    #[arg(long, default_value_t = 192)]
    precision: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactCompareArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    ell: u32,
    #[arg(long)]
    r: String,
    #[arg(long)]
    d: String,
    /// Search bounds B, comma separated
    #[arg(long = "B", value_name = "LIST", default_value = "0,1,2")]
    b_list: String,
    #[arg(long, default_value_t = 192)]
    precision: u32,
    /// Also cross-validate the two exact computation paths on a pair sample
    #[arg(long, default_value_t = 0)]
    check_paths: usize,
    /// Absolute agreement bound on |exact - heuristic| capture
    #[arg(long, default_value_t = 0.03)]
    agreement: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    ell: u32,
}

fn main() -> ExitCode {
    // clap's own exit would use code 2; route usage errors to code 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version are successful terminations
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Table(args) => cmd_table(args),
        Command::BuildHist(args) => cmd_build_hist(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::ExactCompare(args) => cmd_exact_compare(args),
        Command::Cost(args) => cmd_cost(args),
    }
}

// ---- flag parsing helpers ----

fn parse_integer(s: &str) -> CliResult<Integer> {
    let s = s.trim();
    let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Integer::from_str_radix(hex, 16)
    } else {
        s.parse::<Integer>()
    };
    parsed.map_err(|_| CliError::usage(format!("not an integer: {s:?}")))
}

/// Group-order spec: plain integer, "max" = 2^m - 1, or "prime:<bits>"
/// (least prime at or above a seeded uniform value with that bit length).
fn parse_order(spec: &str, m: u32, rng: &mut ChaCha12Rng) -> CliResult<Integer> {
    let spec = spec.trim();
    if spec == "max" {
        return Ok((Integer::from(1) << m) - 1u32);
    }
    if let Some(bits) = spec.strip_prefix("prime:") {
        let bits: u32 = bits
            .parse()
            .map_err(|_| CliError::usage(format!("bad prime spec: {spec:?}")))?;
        if bits < 3 {
            return Err(CliError::usage("prime:<bits> needs bits >= 3"));
        }
        let low = Integer::from(1) << (bits - 1);
        let high = Integer::from(1) << bits;
        loop {
            let start = low.clone() + solver::uniform_below(&low, rng);
            let p = start.next_prime();
            if p < high {
                return Ok(p);
            }
        }
    }
    parse_integer(spec)
}

fn parse_u64_list(s: &str) -> CliResult<Vec<u64>> {
    s.split(',')
        .map(|f| {
            f.trim()
                .parse::<u64>()
                .map_err(|_| CliError::usage(format!("bad list entry: {f:?}")))
        })
        .collect()
}

/// "0..8" (inclusive), "0,1,2", or "3".
fn parse_ell_spec(s: &str) -> CliResult<Vec<u32>> {
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad range start: {s:?}")))?;
        let hi: u32 = hi
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad range end: {s:?}")))?;
        if lo > hi {
            return Err(CliError::usage(format!("empty range: {s:?}")));
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|f| {
            f.trim()
                .parse::<u32>()
                .map_err(|_| CliError::usage(format!("bad ell entry: {f:?}")))
        })
        .collect()
}

fn quadrature_config(precision: u32) -> QuadratureConfig {
    QuadratureConfig::with_precision(precision)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn reproduction_header(flags: &str) -> String {
    format!("# dlshor v{} {}\n", env!("CARGO_PKG_VERSION"), flags)
}

// ---- commands ----

fn cmd_table(args: TableArgs) -> CliResult<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let r = parse_order(&args.r, args.m, &mut rng)?;
    let ells = parse_ell_spec(&args.ell)?;
    let bs = parse_u64_list(&args.b_list)?;
    let cfg = quadrature_config(args.precision);
    let table = capture_table(args.m, &r, &ells, &bs, &cfg).map_err(CliError::from)?;
    let mut text = reproduction_header(&format!(
        "table --m {} --ell {} --r 0x{} --B {} --precision {} --seed {}",
        args.m,
        args.ell,
        r.to_string_radix(16),
        args.b_list,
        args.precision,
        args.seed
    ));
    text.push_str(&table.to_text());
    emit(args.out.as_deref(), &text)
}

fn resolve_instance(
    m: u32,
    ell: u32,
    r_spec: &str,
    d_spec: Option<&str>,
    rng: &mut ChaCha12Rng,
) -> CliResult<ProblemInstance> {
    let r = parse_order(r_spec, m, rng)?;
    let d = match d_spec {
        Some(s) => parse_integer(s)?,
        None => solver::uniform_below(&r, rng),
    };
    ProblemInstance::new(m, ell, r, d).map_err(CliError::from)
}

fn cmd_build_hist(args: BuildHistArgs) -> CliResult<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let inst = resolve_instance(args.m, args.ell, &args.r, args.d.as_deref(), &mut rng)?;
    let cfg = quadrature_config(args.precision);
    let hist = histogram::build(&inst, args.b_max, args.cells_per_unit, &cfg)
        .map_err(CliError::from)?;
    write_atomic(&args.out, &hist.serialize())?;
    println!(
        "wrote {} ({} cells, total mass {:.10})",
        args.out.display(),
        hist.cells().len(),
        hist.total_mass().to_f64()
    );
    Ok(())
}

fn load_histogram(path: &Path) -> CliResult<(Histogram, ProblemInstance)> {
    let bytes = std::fs::read(path)?;
    let hist = Histogram::deserialize(&bytes).map_err(CliError::from)?;
    let inst = hist.instance().map_err(CliError::from)?;
    Ok((hist, inst))
}

fn cmd_sample(args: SampleArgs) -> CliResult<()> {
    if args.count == 0 {
        return Err(CliError::usage("--count must be at least 1"));
    }
    let (hist, inst) = load_histogram(&args.hist)?;
    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let outcomes =
        histogram::sample(&inst, &hist, &mut rng, args.count).map_err(CliError::from)?;
    let mut text = reproduction_header(&format!(
        "sample --hist {} --count {} --seed {}",
        args.hist.display(),
        args.count,
        args.seed
    ));
    text.push_str("# j\tk\tdelta\talpha_r\n");
    for o in &outcomes {
        match o {
            SampledOutcome::Pair {
                pair,
                delta,
                alpha_r,
            } => {
                let _ = writeln!(text, "{}\t{}\t{}\t{}", pair.j, pair.k, delta, alpha_r);
            }
            SampledOutcome::OutsideCapture => {
                let _ = writeln!(text, "OUTSIDE");
            }
        }
    }
    emit(args.out.as_deref(), &text)
}

fn cmd_solve(args: SolveArgs) -> CliResult<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(0);
    let r = parse_order(&args.r, args.m, &mut rng)?;
    let pub_inst = PublicInstance::new(args.m, args.ell, r).map_err(CliError::from)?;
    let pair = FrequencyPair {
        j: parse_integer(&args.j)?,
        k: parse_integer(&args.k)?,
    };
    let set = match solver::enumerate_candidates_bounded(&pub_inst, &pair, args.b, args.tau_limit)
    {
        Ok(set) => set,
        Err(Failure::ZZero) => {
            return Err(CliError::no_solution(
                "z = 0 modulo r: the pair carries no information, re-run the quantum algorithm",
            ))
        }
        Err(f @ Failure::TauTooLarge { .. }) => return Err(CliError::no_solution(f.to_string())),
        Err(Failure::Exhausted) => unreachable!("enumeration itself cannot exhaust"),
    };

    println!(
        "z = {}, tau = {}, search bound |t| <= {}, {} candidates",
        set.z,
        set.tau,
        set.search_bound,
        set.candidates.len()
    );

    let verifier: Option<Box<dyn solver::DlogVerifier>> = if let Some(d) = &args.expect_d {
        Some(Box::new(EqualityVerifier {
            d: parse_integer(d)?,
        }))
    } else if let Some(p) = &args.group_mod {
        Some(Box::new(GroupVerifier {
            modulus: parse_integer(p)?,
            generator: parse_integer(args.group_gen.as_deref().expect("clap requires"))?,
            target: parse_integer(args.group_x.as_deref().expect("clap requires"))?,
        }))
    } else {
        None
    };

    match verifier {
        None => {
            for c in &set.candidates {
                println!("candidate {c}");
            }
            Ok(())
        }
        Some(v) => match set.candidates.iter().find(|c| v.accepts(c)) {
            Some(d) => {
                println!("recovered d = {d}");
                Ok(())
            }
            None => Err(CliError::no_solution(
                "candidate search exhausted without an accepted logarithm",
            )),
        },
    }
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    if args.count == 0 {
        return Err(CliError::usage("--count must be at least 1"));
    }
    let b_max = args.b_max.unwrap_or(args.b);
    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let inst = resolve_instance(args.m, args.ell, &args.r, args.d.as_deref(), &mut rng)?;
    let cfg = quadrature_config(args.precision);
    let hist =
        histogram::build(&inst, b_max, args.cells_per_unit, &cfg).map_err(CliError::from)?;
    let outcomes =
        histogram::sample(&inst, &hist, &mut rng, args.count).map_err(CliError::from)?;

    let pub_inst = inst.public();
    let results = dlshor::map_range(outcomes.len(), |i| match &outcomes[i] {
        SampledOutcome::OutsideCapture => SimOutcome::Outside,
        SampledOutcome::Pair { pair, .. } => {
            match solver::enumerate_candidates(&pub_inst, pair, args.b) {
                Err(Failure::ZZero) => SimOutcome::ZZero,
                Err(Failure::TauTooLarge { .. }) => SimOutcome::TauOverflow,
                Err(Failure::Exhausted) => unreachable!(),
                Ok(set) => match set.candidates.iter().position(|c| c == inst.d()) {
                    Some(idx) => SimOutcome::Success { tested: idx + 1 },
                    None => SimOutcome::Exhausted,
                },
            }
        }
    });

    let mut success = 0usize;
    let mut outside = 0usize;
    let mut z_zero = 0usize;
    let mut exhausted = 0usize;
    let mut tau_overflow = 0usize;
    let mut tested_total = 0usize;
    let mut tested_max = 0usize;
    for r in &results {
        match r {
            SimOutcome::Success { tested } => {
                success += 1;
                tested_total += tested;
                tested_max = tested_max.max(*tested);
            }
            SimOutcome::Outside => outside += 1,
            SimOutcome::ZZero => z_zero += 1,
            SimOutcome::Exhausted => exhausted += 1,
            SimOutcome::TauOverflow => tau_overflow += 1,
        }
    }

    let n = args.count as f64;
    let mut text = reproduction_header(&format!(
        "simulate --m {} --ell {} --r 0x{} --d 0x{} --B {} --B-max {} --count {} --seed {} --cells-per-unit {} --precision {}",
        args.m,
        args.ell,
        inst.r().to_string_radix(16),
        inst.d().to_string_radix(16),
        args.b,
        b_max,
        args.count,
        args.seed,
        args.cells_per_unit,
        args.precision
    ));
    let _ = writeln!(text, "samples\t{}", args.count);
    let _ = writeln!(text, "histogram_mass\t{:.10}", hist.total_mass().to_f64());
    let _ = writeln!(text, "success\t{}\t{:.4}", success, success as f64 / n);
    let _ = writeln!(text, "outside_capture\t{}\t{:.4}", outside, outside as f64 / n);
    let _ = writeln!(text, "z_zero\t{}\t{:.4}", z_zero, z_zero as f64 / n);
    let _ = writeln!(text, "exhausted\t{}\t{:.4}", exhausted, exhausted as f64 / n);
    let _ = writeln!(
        text,
        "tau_overflow\t{}\t{:.4}",
        tau_overflow,
        tau_overflow as f64 / n
    );
    let mean_tested = if success > 0 {
        tested_total as f64 / success as f64
    } else {
        0.0
    };
    let _ = writeln!(
        text,
        "candidates_tested\tmean\t{:.4}\tmax\t{}",
        mean_tested, tested_max
    );
    let ops = 2 * (args.m + args.ell) as u64;
    let _ = writeln!(
        text,
        "quantum_cost\tgroup_ops_per_run\t{}\textra_vs_unpadded\t{}",
        ops,
        2 * args.ell as u64
    );
    emit(args.out.as_deref(), &text)
}

enum SimOutcome {
    Success { tested: usize },
    Outside,
    ZZero,
    Exhausted,
    TauOverflow,
}

fn cmd_exact_compare(args: ExactCompareArgs) -> CliResult<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(0);
    let r = parse_order(&args.r, args.m, &mut rng)?;
    let d = parse_integer(&args.d)?;
    let inst = ProblemInstance::new(args.m, args.ell, r, d).map_err(CliError::from)?;
    let bs = parse_u64_list(&args.b_list)?;
    let cfg = quadrature_config(args.precision);
    let report = oracle::compare_report(&inst, &bs, &cfg).map_err(CliError::from)?;

    let mut text = reproduction_header(&format!(
        "exact-compare --m {} --ell {} --r 0x{} --d 0x{} --B {} --precision {}",
        args.m,
        args.ell,
        inst.r().to_string_radix(16),
        inst.d().to_string_radix(16),
        args.b_list,
        args.precision
    ));
    text.push_str(&report.to_text());

    let mut path_note = String::new();
    if args.check_paths > 0 {
        let worst = cross_validate_paths(&inst, args.check_paths)?;
        let _ = writeln!(path_note, "paths\tmax_abs_diff\t{worst:.3e}");
        text.push_str(&path_note);
        if worst > 1e-12 {
            emit(args.out.as_deref(), &text)?;
            return Err(CliError::compute(format!(
                "exact computation paths disagree: max |diff| = {worst:.3e} > 1e-12"
            )));
        }
    }
    emit(args.out.as_deref(), &text)?;

    for (b, exact, heuristic) in &report.capture_rows {
        let diff = (exact - heuristic).abs();
        if diff > args.agreement {
            return Err(CliError::compute(format!(
                "agreement bound violated at B={b}: |{exact:.5} - {heuristic:.5}| = {diff:.5} > {}",
                args.agreement
            )));
        }
    }
    Ok(())
}

/// Max |FFT path - geometric path| over a deterministic stratified sample.
fn cross_validate_paths(inst: &ProblemInstance, count: usize) -> CliResult<f64> {
    let dist = oracle::exact_distribution(inst).map_err(CliError::from)?;
    let geo = oracle::GeometricOracle::new(inst).map_err(CliError::from)?;
    let l = dist.register_size() as u64;
    let side = (count as f64).sqrt().ceil() as u64;
    let step = (l / side).max(1);
    let mut worst = 0.0f64;
    for j in (0..l).step_by(step as usize) {
        for k in (0..l).step_by(step as usize) {
            let diff = (dist.prob(j, k) - geo.probability(j, k)).abs();
            worst = worst.max(diff);
        }
    }
    Ok(worst)
}

fn cmd_cost(args: CostArgs) -> CliResult<()> {
    let total = 2 * (args.m + args.ell) as u64;
    println!("control bits per register\t{}", args.m + args.ell);
    println!("group operations per run\t{total}");
    println!("extra vs unpadded (2*ell)\t{}", 2 * args.ell as u64);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_parsing_accepts_hex_and_decimal() {
        assert_eq!(parse_integer("4093").unwrap(), 4093);
        assert_eq!(parse_integer("0xffd").unwrap(), 4093);
        assert_eq!(parse_integer("0XFFD").unwrap(), 4093);
        assert!(parse_integer("12x").is_err());
    }

    #[test]
    fn order_specs() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert_eq!(
            parse_order("max", 16, &mut rng).unwrap(),
            Integer::from(65535)
        );
        let p = parse_order("prime:16", 16, &mut rng).unwrap();
        assert!(p.is_probably_prime(40) != rug::integer::IsPrime::No);
        assert!(p >= Integer::from(1) << 15 && p < Integer::from(1) << 16);
        // deterministic per seed
        let mut rng2 = ChaCha12Rng::seed_from_u64(1);
        let _ = parse_order("max", 16, &mut rng2).unwrap();
        assert_eq!(parse_order("prime:16", 16, &mut rng2).unwrap(), p);
    }

    #[test]
    fn ell_specs() {
        assert_eq!(parse_ell_spec("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_ell_spec("5").unwrap(), vec![5]);
        assert_eq!(parse_ell_spec("1,4,2").unwrap(), vec![1, 4, 2]);
        assert!(parse_ell_spec("3..1").is_err());
        assert!(parse_ell_spec("a").is_err());
    }
}
