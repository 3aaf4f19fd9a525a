//! Command-line interface: exact hyperdeterminants, nullity tests, rank
//! certificates, echelon detection, and colored sum-ordered set tooling.
//!
//! Every subcommand prints exactly one machine-readable record on stdout
//! (JSON for most commands, `key=value` for `capset bound`, CSV for
//! `bench`) and diagnostics on stderr. Exit codes: 0 success, 2 input
//! error, 3 budget exceeded, 4 mathematical precondition not met.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hyperdet_core::capset::{
    search_sum_ordered, size_bound, verify_sum_ordered, CapsetError,
};
use hyperdet_core::hyperdet::{
    hyperdet_dp_budgeted, hyperdet_naive_budgeted, is_k_null, laplace_expand_budgeted,
    HyperdetError, KNull,
};
use hyperdet_core::io::{parse_family, parse_poset, parse_tensor, IoError};
use hyperdet_core::order::{echelon_det, find_echelon_poset, is_echelon_form, EchelonCheck, OrderError};
use hyperdet_core::ranks::{brute_force_rank, det_rank_bound, RankError, RankKind};
use hyperdet_core::ring::RingSpec;
use hyperdet_core::rng::SplitMix64;
use hyperdet_core::tensor::Tensor;
use hyperdet_core::Budget;

#[derive(Parser)]
#[command(name = "hyperdet", version, about = "Exact hyperdeterminants and tensor rank certificates")]
struct Cli {
    /// Work budget for combinatorial operations (also via HYPERDET_BUDGET)
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Reserved for parallel builds; this build runs single-threaded
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Seed for generated data (bench)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hyperdeterminant of a tensor file
    Det {
        file: String,
        /// naive, dp, or laplace
        #[arg(long, default_value = "dp")]
        engine: String,
    },
    /// Whether every k-minor hyperdeterminant vanishes
    Knull {
        file: String,
        #[arg(long)]
        k: usize,
    },
    /// Hyperdeterminant-based lower-bound certificate for a rank function
    RankBound {
        file: String,
        /// rank, srank, prank, or oprank
        #[arg(long, default_value = "oprank")]
        kind: String,
    },
    /// Exact rank by exhaustive search over a small prime field
    RankExact {
        file: String,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        rmax: usize,
    },
    /// Echelon-form test and determinant shortcut
    Echelon {
        file: String,
        /// Poset file; without it a compatible poset is searched for
        #[arg(long)]
        poset: Option<String>,
    },
    /// Colored sum-ordered set operations
    #[command(subcommand)]
    Capset(CapsetCommand),
    /// Engine timing table (CSV)
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum CapsetCommand {
    /// Verify the sum-ordered condition for a family file
    Verify {
        file: String,
        #[arg(long)]
        poset: Option<String>,
    },
    /// Size bounds: the monomial count c(n), the rate constant, and
    /// (p-1) d c(n)
    Bound {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Exhaustive search for a family of the given size
    Search {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        size: usize,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Shapes as dxn pairs, comma separated
    #[arg(long, default_value = "3x4,4x3")]
    shapes: String,
    /// Engines to time: naive, dp, laplace
    #[arg(long, default_value = "naive,dp")]
    engines: String,
    /// Ring descriptors, comma separated
    #[arg(long, default_value = "Fp:7")]
    rings: String,
    /// Repetitions per cell; the median is reported
    #[arg(long, default_value_t = 3)]
    reps: usize,
}

/// A failed command, classified for the exit code.
enum Failure {
    Input(String),
    Budget(String),
    Hypothesis(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Hypothesis(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Budget(m) | Failure::Hypothesis(m) => m,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<HyperdetError> for Failure {
    fn from(e: HyperdetError) -> Self {
        match e {
            HyperdetError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            HyperdetError::OddOrder { .. } | HyperdetError::SupportViolation { .. } => {
                Failure::Hypothesis(e.to_string())
            }
            HyperdetError::ShapeMismatch(_) => Failure::Input(e.to_string()),
        }
    }
}

impl From<OrderError> for Failure {
    fn from(e: OrderError) -> Self {
        match e {
            OrderError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            OrderError::DisconnectedPoset | OrderError::NotEchelon { .. } => {
                Failure::Hypothesis(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<RankError> for Failure {
    fn from(e: RankError) -> Self {
        match e {
            RankError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            RankError::UnsupportedRing { .. }
            | RankError::OddOrder { .. }
            | RankError::HypothesisNotMet(_) => Failure::Hypothesis(e.to_string()),
            RankError::Hyperdet(inner) => inner.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<CapsetError> for Failure {
    fn from(e: CapsetError) -> Self {
        match e {
            CapsetError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            CapsetError::NumericalFailure(_) => Failure::Hypothesis(e.to_string()),
            CapsetError::Order(inner) => inner.into(),
            CapsetError::InvalidFamily(_) => Failure::Input(e.to_string()),
        }
    }
}

fn read_file(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {}", path, e)))
}

fn load_tensor(path: &str) -> Result<Tensor, Failure> {
    Ok(parse_tensor(&read_file(path)?)?)
}

fn effective_budget(flag: Option<u64>) -> Budget {
    if let Some(b) = flag {
        return Budget::uniform(b);
    }
    if let Ok(env) = std::env::var("HYPERDET_BUDGET") {
        if let Ok(b) = env.parse::<u64>() {
            return Budget::uniform(b);
        }
    }
    Budget::default()
}

fn json_index_list(indices: &[Vec<usize>]) -> String {
    let inner: Vec<String> = indices
        .iter()
        .map(|set| {
            let items: Vec<String> = set.iter().map(|i| i.to_string()).collect();
            format!("[{}]", items.join(","))
        })
        .collect();
    format!("[{}]", inner.join(","))
}

fn json_usize_list(values: &[usize]) -> String {
    let items: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", items.join(","))
}

fn json_pairs(pairs: &[(usize, usize)]) -> String {
    let inner: Vec<String> = pairs.iter().map(|&(a, b)| format!("[{},{}]", a, b)).collect();
    format!("[{}]", inner.join(","))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let budget = effective_budget(cli.budget);
    match &cli.command {
        Command::Det { file, engine } => {
            let t = load_tensor(file)?;
            let det = match engine.as_str() {
                "naive" => hyperdet_naive_budgeted(&t, &budget)?,
                "dp" => hyperdet_dp_budgeted(&t, &budget)?,
                "laplace" => laplace_expand_budgeted(&t, &budget)?,
                other => return Err(Failure::Input(format!("unknown engine '{}'", other))),
            };
            Ok(format!("{{\"det\":\"{}\"}}", det))
        }
        Command::Knull { file, k } => {
            let t = load_tensor(file)?;
            match is_k_null(&t, *k, &budget)? {
                KNull::Null => Ok("{\"knull\":true}".to_string()),
                KNull::Witness { selector, det } => Ok(format!(
                    "{{\"knull\":false,\"witness\":{},\"witness_det\":\"{}\"}}",
                    json_index_list(selector.index_sets()),
                    det
                )),
            }
        }
        Command::RankBound { file, kind } => {
            let kind = RankKind::parse(kind)
                .ok_or_else(|| Failure::Input(format!("unknown rank kind '{}'", kind)))?;
            let t = load_tensor(file)?;
            match det_rank_bound(&t, kind, &budget)? {
                Some(cert) => {
                    let upper = cert
                        .upper
                        .as_ref()
                        .map_or("null".to_string(), |w| w.rank.to_string());
                    Ok(format!(
                        "{{\"kind\":\"{}\",\"lower\":{},\"justification\":\"{}\",\"upper\":{}}}",
                        cert.kind,
                        cert.lower,
                        cert.justification.label(),
                        upper
                    ))
                }
                None => Ok(format!(
                    "{{\"kind\":\"{}\",\"lower\":0,\"justification\":\"none\",\"upper\":null}}",
                    kind
                )),
            }
        }
        Command::RankExact { file, kind, rmax } => {
            let kind = RankKind::parse(kind)
                .ok_or_else(|| Failure::Input(format!("unknown rank kind '{}'", kind)))?;
            let t = load_tensor(file)?;
            match brute_force_rank(&t, kind, *rmax, &budget)? {
                Some(witness) => Ok(format!(
                    "{{\"kind\":\"{}\",\"rank\":{},\"terms\":{}}}",
                    kind,
                    witness.rank,
                    witness.terms.len()
                )),
                None => Ok(format!("{{\"kind\":\"{}\",\"rank\":null}}", kind)),
            }
        }
        Command::Echelon { file, poset } => {
            let t = load_tensor(file)?;
            match poset {
                Some(path) => {
                    let p = parse_poset(&read_file(path)?)?;
                    match is_echelon_form(&t, &p)? {
                        EchelonCheck::Echelon => {
                            let det = echelon_det(&t, &p)?;
                            Ok(format!("{{\"echelon\":true,\"det\":\"{}\"}}", det))
                        }
                        EchelonCheck::Violation { index } => Ok(format!(
                            "{{\"echelon\":false,\"violation\":{}}}",
                            json_usize_list(&index)
                        )),
                    }
                }
                None => match find_echelon_poset(&t, &budget)? {
                    Some(p) => {
                        let det = echelon_det(&t, &p)?;
                        Ok(format!(
                            "{{\"poset\":{},\"det\":\"{}\"}}",
                            json_pairs(p.covers()),
                            det
                        ))
                    }
                    None => Ok("{\"poset\":null}".to_string()),
                },
            }
        }
        Command::Capset(cmd) => run_capset(cmd, &budget),
        Command::Bench(args) => run_bench(args, cli.seed, &budget),
    }
}

fn run_capset(cmd: &CapsetCommand, budget: &Budget) -> Result<String, Failure> {
    match cmd {
        CapsetCommand::Verify { file, poset } => {
            let family = parse_family(&read_file(file)?)?;
            let poset = match poset {
                Some(path) => Some(parse_poset(&read_file(path)?)?),
                None => None,
            };
            let report = verify_sum_ordered(&family, poset.as_ref(), budget)?;
            if report.ok {
                let covers = report.poset.map_or("null".to_string(), |p| json_pairs(p.covers()));
                Ok(format!("{{\"ok\":true,\"poset\":{}}}", covers))
            } else {
                let witness = report
                    .counterexample
                    .map_or("null".to_string(), |t| json_usize_list(&t));
                Ok(format!("{{\"ok\":false,\"counterexample\":{}}}", witness))
            }
        }
        CapsetCommand::Bound { p, n, d } => {
            let bound = size_bound(*p, *n, *d)?;
            Ok(format!(
                "c={} gamma={:.12} bound={}",
                bound.c, bound.gamma, bound.bound_exact
            ))
        }
        CapsetCommand::Search { p, n, d, size } => {
            match search_sum_ordered(*p, *n, *d, *size, budget)? {
                Some(family) => {
                    let mut blocks = Vec::new();
                    for block in family.vectors() {
                        let rows: Vec<String> = block
                            .iter()
                            .map(|v| {
                                let coords: Vec<String> =
                                    v.iter().map(|r| r.to_string()).collect();
                                format!("[{}]", coords.join(","))
                            })
                            .collect();
                        blocks.push(format!("[{}]", rows.join(",")));
                    }
                    Ok(format!(
                        "{{\"found\":true,\"N\":{},\"vectors\":[{}]}}",
                        family.size(),
                        blocks.join(",")
                    ))
                }
                None => Ok("{\"found\":false}".to_string()),
            }
        }
    }
}

fn median_secs<F: FnMut() -> Result<(), Failure>>(reps: usize, mut f: F) -> Result<f64, Failure> {
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        f()?;
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(times[reps / 2])
}

fn run_bench(args: &BenchArgs, seed: u64, budget: &Budget) -> Result<String, Failure> {
    let mut shapes = Vec::new();
    for token in args.shapes.split(',') {
        let (d, n) = token
            .split_once('x')
            .ok_or_else(|| Failure::Input(format!("shape '{}' is not dxn", token)))?;
        let d: usize = d.parse().map_err(|_| Failure::Input(format!("bad order in '{}'", token)))?;
        let n: usize = n.parse().map_err(|_| Failure::Input(format!("bad side in '{}'", token)))?;
        shapes.push((d, n));
    }
    let engines: Vec<&str> = args.engines.split(',').collect();
    let mut rings = Vec::new();
    for token in args.rings.split(',') {
        rings.push(RingSpec::parse_descriptor(token).map_err(|e| Failure::Input(e.to_string()))?);
    }
    if args.reps == 0 {
        return Err(Failure::Input("reps must be positive".into()));
    }
    let mut out = String::from("engine,d,n,ring,reps,median_us,status\n");
    let root = SplitMix64::new(seed);
    for &(d, n) in &shapes {
        for &ring in &rings {
            // the same seeded tensor for every engine in this cell
            let label = (d as u64) << 32 | (n as u64) << 16;
            let mut rng = root.split(label);
            let t = Tensor::random(d, n, ring, &mut rng);
            for engine in &engines {
                let timing = median_secs(args.reps, || {
                    let result = match *engine {
                        "naive" => hyperdet_naive_budgeted(&t, budget),
                        "dp" => hyperdet_dp_budgeted(&t, budget),
                        "laplace" => laplace_expand_budgeted(&t, budget),
                        other => return Err(Failure::Input(format!("unknown engine '{}'", other))),
                    };
                    match result {
                        Ok(_) => Ok(()),
                        Err(e) => Err(e.into()),
                    }
                });
                match timing {
                    Ok(median) => {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{:.1},ok",
                            engine,
                            d,
                            n,
                            ring,
                            args.reps,
                            median * 1e6
                        );
                    }
                    Err(Failure::Budget(_)) => {
                        let _ = writeln!(out, "{},{},{},{},{},,budget_exceeded", engine, d, n, ring, args.reps);
                    }
                    Err(Failure::Hypothesis(_)) => {
                        let _ = writeln!(out, "{},{},{},{},{},,not_applicable", engine, d, n, ring, args.reps);
                    }
                    Err(other) => return Err(other),
                }
            }
        }
    }
    // trim the trailing newline; main prints one
    out.pop();
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads != 1 {
        eprintln!("note: --threads is reserved; this build runs single-threaded");
    }
    match run(&cli) {
        Ok(record) => {
            println!("{}", record);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
