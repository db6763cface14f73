use crate::error::CliError;
use crate::format::{fmt_f64, parse_problem, parse_vector, write_problem, write_vector};
use crate::generate::protocol_problem;
use ess_core::oracle::{assemble_dense_with, DenseLu};
use ess_core::{Embed, EssFactor, ExponentialKernelSpec, Strategy};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(CliError::io(path))
}

/// Writes to `out`, or to standard output when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(CliError::io(path)),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(CliError::io("<stdout>")),
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn generate(n: usize, p: usize, seed: u64, out: Option<&Path>, rhs: Option<&Path>) -> Result<(), CliError> {
    if n == 0 || p == 0 {
        return Err(CliError::Usage("generate needs n >= 1 and p >= 1".into()));
    }
    let (k, b) = protocol_problem(n, p, seed)?;
    if let Some(path) = rhs {
        emit(Some(path), &write_vector(&b))?;
    }
    emit(out, &write_problem(&k))
}

#[derive(Debug, Clone, Copy, Default)]
struct Timed {
    assembly_ms: f64,
    factorize_ms: f64,
    solve_ms: f64,
}

struct FastRun {
    x: Vec<f64>,
    logdet: ess_core::LogDet,
    residual_inf: f64,
    timings: Timed,
}

fn run_fast(k: &ExponentialKernelSpec, b: &[f64], triplets: Option<&Path>) -> Result<FastRun, CliError> {
    let start = Instant::now();
    let sys = k.embed()?;
    let assembly_ms = ms(start);
    if let Some(path) = triplets {
        let mut s = String::new();
        for (i, j, v) in sys.band().triplets() {
            let _ = writeln!(s, "{i} {j} {}", fmt_f64(v));
        }
        emit(Some(path), &s)?;
    }
    let start = Instant::now();
    let f = EssFactor::from_system(sys)?;
    let factorize_ms = ms(start);
    let start = Instant::now();
    let x = f.solve(b)?;
    let solve_ms = ms(start);
    let residual_inf = ess_core::residual_inf(k, &x, b)?;
    Ok(FastRun { x, logdet: f.logdet(), residual_inf, timings: Timed { assembly_ms, factorize_ms, solve_ms } })
}

struct DenseRun {
    x: Vec<f64>,
    log_abs: f64,
    residual_inf: f64,
    timings: Timed,
}

fn run_dense(k: &ExponentialKernelSpec, b: &[f64], cap: usize) -> Result<DenseRun, CliError> {
    let start = Instant::now();
    let a = assemble_dense_with(k, cap, Strategy::Sequential)?;
    let assembly_ms = ms(start);
    let start = Instant::now();
    let lu = DenseLu::factor(&a);
    let factorize_ms = ms(start);
    let start = Instant::now();
    let x = lu.solve(b)?;
    let solve_ms = ms(start);
    let residual_inf = ess_core::residual_inf(k, &x, b)?;
    Ok(DenseRun { x, log_abs: lu.log_abs_det().log_abs, residual_inf, timings: Timed { assembly_ms, factorize_ms, solve_ms } })
}

fn rel_err_inf(got: &[f64], want: &[f64]) -> f64 {
    let (num, den) = got
        .iter()
        .zip(want)
        .fold((0.0f64, 0.0f64), |(n, d), (g, w)| (n.max((g - w).abs()), d.max(w.abs())));
    num / den
}

#[derive(Serialize)]
struct Verification {
    dense_residual_inf: f64,
    dense_logdet: f64,
    solution_rel_err: f64,
    logdet_rel_err: f64,
}

#[derive(Serialize)]
struct SolveReport {
    n: usize,
    p: usize,
    logdet: f64,
    logdet_sign: i8,
    residual_inf: f64,
    assembly_ms: f64,
    factorize_ms: f64,
    solve_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<Verification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify_skipped: Option<String>,
    x: Vec<f64>,
}

pub struct SolveArgs<'a> {
    pub problem: &'a Path,
    pub rhs: Option<&'a Path>,
    pub verify: bool,
    pub dense_cap: usize,
    pub out: Option<&'a Path>,
    pub triplets: Option<&'a Path>,
}

pub fn solve(args: SolveArgs<'_>) -> Result<(), CliError> {
    let k = parse_problem(&read(args.problem)?, &args.problem.display().to_string())?;
    let b = match args.rhs {
        Some(path) => {
            let b = parse_vector(&read(path)?, &path.display().to_string())?;
            if b.len() != k.n() {
                return Err(CliError::Usage(format!(
                    "{}: right-hand side has {} values, problem has n = {}",
                    path.display(),
                    b.len(),
                    k.n()
                )));
            }
            b
        }
        None => vec![1.0; k.n()],
    };
    let fast = run_fast(&k, &b, args.triplets)?;
    let (mut verify, mut verify_skipped) = (None, None);
    if args.verify {
        if k.n() <= args.dense_cap {
            let dense = run_dense(&k, &b, args.dense_cap)?;
            verify = Some(Verification {
                dense_residual_inf: dense.residual_inf,
                dense_logdet: dense.log_abs,
                solution_rel_err: rel_err_inf(&fast.x, &dense.x),
                logdet_rel_err: ((fast.logdet.log_abs - dense.log_abs) / dense.log_abs).abs(),
            });
        } else {
            verify_skipped = Some(format!("n = {} exceeds dense cap {}", k.n(), args.dense_cap));
        }
    }
    let report = SolveReport {
        n: k.n(),
        p: k.p(),
        logdet: fast.logdet.log_abs,
        logdet_sign: fast.logdet.sign,
        residual_inf: fast.residual_inf,
        assembly_ms: fast.timings.assembly_ms,
        factorize_ms: fast.timings.factorize_ms,
        solve_ms: fast.timings.solve_ms,
        verify,
        verify_skipped,
        x: fast.x,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(args.out, &text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Banded solver only.
    Fast,
    /// Dense oracle only; cases above the dense cap are reported as errors.
    Dense,
    /// Both, with the oracle comparison; dense columns are dropped above
    /// the dense cap.
    Both,
}

#[derive(Serialize)]
struct BenchRecord {
    n: usize,
    p: usize,
    seed: u64,
    mode: Mode,
    assembly_ms: f64,
    factorize_ms: f64,
    solve_ms: f64,
    residual_inf: f64,
    logdet: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    logdet_rel_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution_rel_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dense_total_ms: Option<f64>,
}

#[derive(Serialize)]
struct BenchFailure {
    n: usize,
    p: usize,
    seed: u64,
    mode: Mode,
    error: String,
}

fn bench_case(n: usize, p: usize, seed: u64, mode: Mode, cap: usize) -> Result<BenchRecord, CliError> {
    if n == 0 || p == 0 {
        return Err(CliError::Usage("n and p must be at least 1".into()));
    }
    let (k, b) = protocol_problem(n, p, seed)?;
    if mode == Mode::Dense {
        let d = run_dense(&k, &b, cap)?;
        return Ok(BenchRecord {
            n,
            p,
            seed,
            mode,
            assembly_ms: d.timings.assembly_ms,
            factorize_ms: d.timings.factorize_ms,
            solve_ms: d.timings.solve_ms,
            residual_inf: d.residual_inf,
            logdet: d.log_abs,
            logdet_rel_err: None,
            solution_rel_err: None,
            dense_total_ms: None,
        });
    }
    let fast = run_fast(&k, &b, None)?;
    let mut rec = BenchRecord {
        n,
        p,
        seed,
        mode: Mode::Fast,
        assembly_ms: fast.timings.assembly_ms,
        factorize_ms: fast.timings.factorize_ms,
        solve_ms: fast.timings.solve_ms,
        residual_inf: fast.residual_inf,
        logdet: fast.logdet.log_abs,
        logdet_rel_err: None,
        solution_rel_err: None,
        dense_total_ms: None,
    };
    if mode == Mode::Both && n <= cap {
        let d = run_dense(&k, &b, cap)?;
        rec.mode = Mode::Both;
        rec.logdet_rel_err = Some(((fast.logdet.log_abs - d.log_abs) / d.log_abs).abs());
        rec.solution_rel_err = Some(rel_err_inf(&fast.x, &d.x));
        rec.dense_total_ms = Some(d.timings.assembly_ms + d.timings.factorize_ms + d.timings.solve_ms);
    }
    Ok(rec)
}

pub struct BenchArgs<'a> {
    pub ns: &'a [usize],
    pub ps: &'a [usize],
    pub seeds: &'a [u64],
    pub mode: Mode,
    pub dense_cap: usize,
    pub out: Option<PathBuf>,
}

/// Runs every (n, p, seed) case in turn, one JSON record per line. Records
/// are flushed as they complete; failures become records with an `error`
/// field and do not stop the sweep.
pub fn bench(args: BenchArgs<'_>) -> Result<(), CliError> {
    if args.ns.is_empty() || args.ps.is_empty() || args.seeds.is_empty() {
        return Err(CliError::Usage("--n, --p and --seed each need at least one value".into()));
    }
    let mut sink: Box<dyn std::io::Write> = match &args.out {
        Some(path) => Box::new(std::fs::File::create(path).map_err(CliError::io(path))?),
        None => Box::new(std::io::stdout()),
    };
    let sink_path = args.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    for &n in args.ns {
        for &p in args.ps {
            for &seed in args.seeds {
                let line = match bench_case(n, p, seed, args.mode, args.dense_cap) {
                    Ok(rec) => serde_json::to_string(&rec),
                    Err(e) => serde_json::to_string(&BenchFailure { n, p, seed, mode: args.mode, error: e.to_string() }),
                }
                .expect("record serializes");
                writeln!(sink, "{line}").and_then(|_| sink.flush()).map_err(CliError::io(&sink_path))?;
            }
        }
    }
    Ok(())
}
