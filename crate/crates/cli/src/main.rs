//! Command-line front end for the Hessian-graph toolkit.
//!
//! Three subcommands:
//! - `graph`: build one functional graph and export it as DOT or JSON;
//! - `verify`: run theorem suites over a range of primes, with a JSON report;
//! - `stats`: one CSV summary row per prime.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
//! 3 I/O failure. Output files are written atomically (temp file + rename)
//! and identical configurations produce byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use hessgraph::field::{is_prime_u64, FiniteField, PrimeField, QuadExtField};
use hessgraph::graphs::{
    self, fkl_graph, graph_stats, hessian_graph, lambda_graph, psi_proj_graph,
    s_quotient_graph, FunctionalGraph, StructureReport,
};
use hessgraph::curves::ModelCurve;
use hessgraph::report::{
    components_json, reports_json, stats_csv_row, to_dot, Highlight, STATS_CSV_HEADER,
};

#[derive(Parser)]
#[command(name = "hessgraph", version, about = "Hessian dynamics of plane cubics over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one functional graph and export it.
    Graph(GraphArgs),
    /// Run theorem verifiers over a prime range.
    Verify(VerifyArgs),
    /// Emit one CSV statistics row per prime.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    /// Hessian map on j-invariants (k = -6912, l = -27).
    Hess,
    /// The family map with explicit --k and --l.
    F,
    /// The x-level endomorphism with explicit --k.
    Psi,
    /// The Hesse-pencil parameter step.
    Lambda,
    /// The psi-action on x-coordinate classes, built through the curve.
    PsiS,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldKind {
    Base,
    Ext,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HighlightKind {
    None,
    /// Mark x-classes lifting to rational curve points (psi-s only).
    Rational,
    /// Mark vertices that are cubes in the field.
    Cubes,
}

#[derive(Args)]
struct GraphArgs {
    /// The prime p (p != 2, 3).
    #[arg(long)]
    p: u64,
    #[arg(long, value_enum, default_value = "hess")]
    map: MapKind,
    /// Parameter k for --map f / psi / psi-s.
    #[arg(long, allow_negative_numbers = true, default_value_t = -6912)]
    k: i64,
    /// Parameter l for --map f.
    #[arg(long, allow_negative_numbers = true, default_value_t = -27)]
    l: i64,
    /// Build over F_p or over F_{p^2}.
    #[arg(long, value_enum, default_value = "base")]
    field: FieldKind,
    #[arg(long, value_enum, default_value = "dot")]
    format: Format,
    #[arg(long, value_enum, default_value = "none")]
    highlight: HighlightKind,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Theorem {
    All,
    Q2Structure,
    Q1Structure,
    CurveStructure,
    SelfLoops,
    Fibers,
    FibersExt,
    EvenTrace,
    Supersingular,
    SupersingularExt,
    Conjugacy,
    Commuting,
}

#[derive(Args)]
struct VerifyArgs {
    /// Theorem suite to run.
    #[arg(long, value_enum, default_value = "all")]
    theorems: Theorem,
    /// Half-open prime range, e.g. 5..200.
    #[arg(long, value_parser = parse_range, conflicts_with = "p")]
    p_range: Option<(u64, u64)>,
    /// A single prime instead of a range.
    #[arg(long)]
    p: Option<u64>,
    /// Worker threads (default: all cores; HESSGRAPH_THREADS overrides).
    #[arg(long)]
    threads: Option<usize>,
    /// Write the JSON report here (stdout summary always printed).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, value_enum, default_value = "hess")]
    map: MapKind,
    #[arg(long, allow_negative_numbers = true, default_value_t = -6912)]
    k: i64,
    #[arg(long, allow_negative_numbers = true, default_value_t = -27)]
    l: i64,
    #[arg(long, value_enum, default_value = "base")]
    field: FieldKind,
    #[arg(long, value_parser = parse_range, conflicts_with = "p")]
    p_range: Option<(u64, u64)>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Half-open range `LO..HI`; an empty range is legal and selects no primes.
fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {s}"))?;
    let lo = lo.parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi = hi.parse().map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((lo, hi))
}

enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Graph(args) => cmd_graph(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Stats(args) => cmd_stats(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn checked_prime(p: u64) -> Result<PrimeField, CliError> {
    PrimeField::new(p).map_err(|e| CliError::Config(e.to_string()))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            let write = || -> std::io::Result<()> {
                let mut file = std::fs::File::create(&tmp)?;
                file.write_all(content.as_bytes())?;
                file.sync_all()?;
                std::fs::rename(&tmp, path)
            };
            write().map_err(|e| {
                let _ = std::fs::remove_file(&tmp);
                CliError::Io(format!("writing {}: {e}", path.display()))
            })
        }
    }
}

/// Build the requested graph plus an optional highlight mask over a field.
fn build_graph_over<F: FiniteField>(
    f: &F,
    args: &GraphArgs,
) -> Result<(FunctionalGraph, Option<Highlight>), CliError> {
    let bad_param = |name: &str| {
        CliError::Config(format!("parameter {name} reduces to zero mod the characteristic"))
    };
    let graph = match args.map {
        MapKind::Hess => hessian_graph(f),
        MapKind::F => fkl_graph(f, f.from_i64(args.k), f.from_i64(args.l))
            .map_err(|_| bad_param("k or l"))?,
        MapKind::Psi => {
            psi_proj_graph(f, f.from_i64(args.k)).map_err(|_| bad_param("k"))?
        }
        MapKind::Lambda => lambda_graph(f),
        MapKind::PsiS => unreachable!("psi-s is handled on the base field"),
    };
    let highlight = match args.highlight {
        HighlightKind::None => None,
        HighlightKind::Rational => {
            return Err(CliError::Config(
                "--highlight rational applies only to --map psi-s".into(),
            ))
        }
        HighlightKind::Cubes => Some(Highlight {
            mask: (0..graph.n())
                .map(|v| v < f.order() as usize && f.is_nth_power(f.element(v), 3))
                .collect(),
            color: "lightblue".into(),
        }),
    };
    Ok((graph, highlight))
}

fn cmd_graph(args: GraphArgs) -> Result<u8, CliError> {
    let base = checked_prime(args.p)?;
    let (graph, highlight) = if args.map == MapKind::PsiS {
        if args.field == FieldKind::Ext {
            return Err(CliError::Config(
                "--map psi-s is defined over the base field".into(),
            ));
        }
        let k = base.from_i64(args.k);
        let model = ModelCurve::with_k(base, k)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let graph = s_quotient_graph(&model);
        let highlight = match args.highlight {
            HighlightKind::None => None,
            HighlightKind::Cubes => Some(Highlight {
                mask: (0..graph.n())
                    .map(|v| v < args.p as usize && base.is_nth_power(v as u64, 3))
                    .collect(),
                color: "lightblue".into(),
            }),
            HighlightKind::Rational => {
                let quarter_k = base.div(k, 4).expect("4 is a unit");
                Some(Highlight {
                    mask: (0..graph.n())
                        .map(|v| {
                            v == args.p as usize
                                || base.legendre(base.add(base.cube(v as u64), quarter_k)) >= 0
                        })
                        .collect(),
                    color: "gray".into(),
                })
            }
        };
        (graph, highlight)
    } else {
        match args.field {
            FieldKind::Base => build_graph_over(&base, &args)?,
            FieldKind::Ext => build_graph_over(&QuadExtField::new(base), &args)?,
        }
    };

    let q = match args.field {
        FieldKind::Base => args.p as u128,
        FieldKind::Ext => (args.p as u128) * (args.p as u128),
    };
    let content = match args.format {
        Format::Dot => {
            let name = format!("g{}", args.p);
            to_dot(&graph, &name, highlight.as_ref())
        }
        Format::Json => components_json(&graph, q, map_name(args.map)),
    };
    write_output(args.out.as_deref(), &content)?;
    Ok(0)
}

fn map_name(map: MapKind) -> &'static str {
    match map {
        MapKind::Hess => "hess",
        MapKind::F => "f",
        MapKind::Psi => "psi",
        MapKind::Lambda => "lambda",
        MapKind::PsiS => "psi-s",
    }
}

fn primes_of(args_range: Option<(u64, u64)>, single: Option<u64>) -> Result<Vec<u64>, CliError> {
    match (args_range, single) {
        (Some((lo, hi)), None) => Ok((lo..hi)
            .filter(|&p| p != 2 && p != 3 && is_prime_u64(p))
            .collect()),
        (None, Some(p)) => {
            checked_prime(p)?;
            Ok(vec![p])
        }
        (None, None) => Err(CliError::Config("one of --p or --p-range is required".into())),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let n = std::env::var("HESSGRAPH_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .or(threads)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))
}

/// The k-samples used by the conjugacy and commuting suites: small,
/// deterministic, nonzero mod p.
fn sample_ks(p: u64, count: usize) -> Vec<i64> {
    let mut ks = vec![-6912, 108, 1];
    ks.extend((2..).map(|k| k as i64).take(count));
    ks.retain(|&k| k.rem_euclid(p as i64) != 0);
    ks
}

fn applicable(theorem: Theorem, p: u64) -> bool {
    match theorem {
        Theorem::All => true,
        Theorem::Q2Structure => p % 3 == 2,
        Theorem::Q1Structure => p % 3 == 1,
        Theorem::CurveStructure => p <= 100,
        Theorem::SelfLoops | Theorem::Conjugacy | Theorem::Commuting => true,
        Theorem::Fibers => p <= 200,
        Theorem::FibersExt => p <= 13,
        Theorem::EvenTrace => p <= 200,
        Theorem::Supersingular => p <= 200,
        Theorem::SupersingularExt => p <= 50,
    }
}

fn run_theorem(theorem: Theorem, p: u64) -> Result<StructureReport, CliError> {
    let res = match theorem {
        Theorem::Q2Structure => graphs::verify_structure_q2(p),
        Theorem::Q1Structure => graphs::verify_structure_q1(p),
        Theorem::CurveStructure => graphs::verify_curve_structure(p),
        Theorem::SelfLoops => graphs::verify_self_loops(p),
        Theorem::Fibers => graphs::verify_fibers(p, false),
        Theorem::FibersExt => graphs::verify_fibers(p, true),
        Theorem::EvenTrace => graphs::leaves_vs_trace(p),
        Theorem::Supersingular => graphs::supersingular_components(p, false),
        Theorem::SupersingularExt => graphs::supersingular_components(p, true),
        Theorem::Conjugacy => graphs::verify_conjugacy(p, &sample_ks(p, 20)),
        Theorem::Commuting => graphs::verify_commuting(p, &sample_ks(p, 4)),
        Theorem::All => unreachable!("expanded before dispatch"),
    };
    res.map_err(|e| CliError::Config(e.to_string()))
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let primes = primes_of(args.p_range, args.p)?;
    let selected: Vec<Theorem> = match args.theorems {
        Theorem::All => vec![
            Theorem::Q2Structure,
            Theorem::Q1Structure,
            Theorem::CurveStructure,
            Theorem::SelfLoops,
            Theorem::Fibers,
            Theorem::FibersExt,
            Theorem::EvenTrace,
            Theorem::Supersingular,
            Theorem::SupersingularExt,
            Theorem::Conjugacy,
            Theorem::Commuting,
        ],
        t => vec![t],
    };
    let jobs: Vec<(u64, Theorem)> = primes
        .iter()
        .flat_map(|&p| {
            selected
                .iter()
                .filter(move |&&t| applicable(t, p))
                .map(move |&t| (p, t))
        })
        .collect();

    let pool = thread_pool(args.threads)?;
    let results: Result<Vec<StructureReport>, CliError> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, theorem)| run_theorem(theorem, p))
            .collect()
    });
    let mut reports = results?;
    reports.sort_by(|a, b| (a.prime, &a.theorem).cmp(&(b.prime, &b.theorem)));

    let mut all_ok = true;
    for r in &reports {
        let status = if r.passed() { "ok" } else { "FAIL" };
        println!("p={} {}: {}", r.prime, r.theorem, status);
        for (name, witness) in r.failures() {
            all_ok = false;
            println!("  check {name}: {witness}");
        }
    }
    if let Some(out) = args.out.as_deref() {
        write_output(Some(out), &reports_json(&reports))?;
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn cmd_stats(args: StatsArgs) -> Result<u8, CliError> {
    let primes = match (args.p_range, args.p) {
        // an empty range is fine for stats: header-only output
        (Some((lo, hi)), None) => (lo..hi)
            .filter(|&p| p != 2 && p != 3 && is_prime_u64(p))
            .collect(),
        other => primes_of(other.0, other.1)?,
    };
    let pool = thread_pool(args.threads)?;
    let rows: Result<Vec<(u64, String)>, CliError> = pool.install(|| {
        primes
            .par_iter()
            .map(|&p| {
                let base = checked_prime(p)?;
                let record = match args.field {
                    FieldKind::Base => stats_for(&base, &args, p as u128)?,
                    FieldKind::Ext => {
                        stats_for(&QuadExtField::new(base), &args, (p as u128) * (p as u128))?
                    }
                };
                Ok((p, stats_csv_row(&record)))
            })
            .collect()
    });
    let mut rows = rows?;
    rows.sort_by_key(|&(p, _)| p);
    let mut content = String::from(STATS_CSV_HEADER);
    content.push('\n');
    for (_, row) in rows {
        content.push_str(&row);
        content.push('\n');
    }
    write_output(args.out.as_deref(), &content)?;
    Ok(0)
}

fn stats_for<F: FiniteField>(
    f: &F,
    args: &StatsArgs,
    q: u128,
) -> Result<hessgraph::graphs::GraphStatsRecord, CliError> {
    let bad_param =
        |name: &str| CliError::Config(format!("parameter {name} reduces to zero mod p"));
    let graph = match args.map {
        MapKind::Hess => hessian_graph(f),
        MapKind::F => {
            fkl_graph(f, f.from_i64(args.k), f.from_i64(args.l)).map_err(|_| bad_param("k or l"))?
        }
        MapKind::Psi => psi_proj_graph(f, f.from_i64(args.k)).map_err(|_| bad_param("k"))?,
        MapKind::Lambda => lambda_graph(f),
        MapKind::PsiS => {
            return Err(CliError::Config(
                "stats for psi-s: use --map psi, the graphs coincide".into(),
            ))
        }
    };
    Ok(graph_stats(&graph, q, map_name(args.map)))
}
