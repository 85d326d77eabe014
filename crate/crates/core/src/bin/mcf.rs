use clap::{Parser, Subcommand, ValueEnum};
use mcf_core::io::bench::{run_bench, write_csv, BenchConfig};
use mcf_core::io::dimacs::{parse_dimacs, parse_solution, write_dimacs, write_solution};
use mcf_core::io::generate::{generate, Family, GenSpec};
use mcf_core::verify::{verify_optimality, Violation, Witness};
use mcf_core::{run, Algorithm, CasParams, CosParams, CosVariant, Heuristics, NsParams, PivotRule, Status};
use std::error::Error;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "mcf", version, about = "Minimum-cost flow solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a DIMACS instance and print the solution.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Write a generated instance in DIMACS format.
    Gen(GenArgs),
    /// Run a benchmark described by a TOML file and print CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Also write the per-size summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Scc,
    Mmcc,
    Cat,
    Ssp,
    Cas,
    Cos,
    Ns,
}

#[derive(Clone, Copy, ValueEnum)]
enum CosKind {
    Pr,
    Ar,
    Par,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pivot {
    Be,
    Fe,
    Bs,
    Cl,
    Al,
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "ns")]
    alg: Alg,
    #[arg(long, value_enum, default_value = "par")]
    cos_variant: CosKind,
    /// Path length limit for partial augment-relabel.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Scaling factor; defaults to 16 for cos and 4 for cas.
    #[arg(long)]
    alpha: Option<i64>,
    #[arg(long, value_enum, default_value = "bs")]
    pivot: Pivot,
    /// Turn off the cost scaling heuristics.
    #[arg(long)]
    no_heuristics: bool,
    #[arg(long)]
    timeout: Option<f64>,
    file: PathBuf,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Average outdegree; the family default when omitted.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn algorithm(args: &SolveArgs) -> Algorithm {
    match args.alg {
        Alg::Scc => Algorithm::Scc,
        Alg::Mmcc => Algorithm::Mmcc,
        Alg::Cat => Algorithm::Cat,
        Alg::Ssp => Algorithm::Ssp,
        Alg::Cas => Algorithm::Cas(CasParams { alpha: args.alpha.unwrap_or(4), ..Default::default() }),
        Alg::Cos => Algorithm::Cos(CosParams {
            variant: match args.cos_variant {
                CosKind::Pr => CosVariant::PushRelabel,
                CosKind::Ar => CosVariant::AugmentRelabel,
                CosKind::Par => CosVariant::PartialAugmentRelabel,
            },
            alpha: args.alpha.unwrap_or(16),
            k: args.k,
            heuristics: if args.no_heuristics { Heuristics::none() } else { Heuristics::default() },
        }),
        Alg::Ns => Algorithm::Ns(NsParams {
            rule: match args.pivot {
                Pivot::Be => PivotRule::BestEligible,
                Pivot::Fe => PivotRule::FirstEligible,
                Pivot::Bs => PivotRule::BlockSearch { block: None },
                Pivot::Cl => PivotRule::CandidateList { list: None, minor: None },
                Pivot::Al => PivotRule::AlteringList { block: None, head: None },
            },
            ..Default::default()
        }),
    }
}

fn solve(args: &SolveArgs) -> Result<ExitCode, Box<dyn Error>> {
    let problem = parse_dimacs(&fs::read_to_string(&args.file)?)?;
    let alg = algorithm(args);
    let timeout = args.timeout.map(Duration::from_secs_f64);
    let (report, flow) = run(&problem.network, &alg, timeout)?;
    let mut out = io::stdout().lock();
    writeln!(out, "c solver {alg}")?;
    writeln!(out, "c status {}", report.status)?;
    writeln!(out, "c time_ms {:.3}", report.wall_time.as_secs_f64() * 1e3)?;
    for (name, value) in &report.counters {
        writeln!(out, "c {name} {value}")?;
    }
    let Some(flow) = flow else {
        return Ok(ExitCode::from(2));
    };
    let check = verify_optimality(&problem.network, &flow)?;
    if !(check.feasible && check.optimal) {
        return Err(format!("{alg} produced a flow that does not verify").into());
    }
    let objective = problem.original_objective(problem.network.objective(&flow));
    out.write_all(write_solution(&problem.network, objective, &problem.original_flow(&flow)).as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn verify(instance: &PathBuf, solution: &PathBuf) -> Result<ExitCode, Box<dyn Error>> {
    let problem = parse_dimacs(&fs::read_to_string(instance)?)?;
    let sol = parse_solution(&fs::read_to_string(solution)?, &problem.network)?;
    let flow = problem.reduced_flow(&sol.flow);
    let report = verify_optimality(&problem.network, &flow)?;
    let actual = problem.original_objective(problem.network.objective(&flow));
    let mut out = io::stdout().lock();
    for v in &report.violations {
        match v {
            Violation::Length { expected, found } => writeln!(out, "expected {expected} flow values, found {found}")?,
            Violation::Capacity { arc, flow, capacity } => {
                writeln!(out, "arc {}: flow {flow} outside [0, {capacity}] after lower bounds", arc + 1)?
            }
            Violation::Conservation { node, excess } => writeln!(out, "node {}: excess {excess}", node + 1)?,
        }
    }
    if let Some(Witness::NegativeCycle(cycle)) = &report.witness {
        let nodes: Vec<String> = cycle.nodes.iter().map(|v| (v + 1).to_string()).collect();
        writeln!(out, "negative residual cycle of cost {}: {}", cycle.cost, nodes.join(" "))?;
    }
    if actual != sol.objective {
        writeln!(out, "claimed objective {} but the flow costs {actual}", sol.objective)?;
    }
    let ok = report.feasible && report.optimal && actual == sol.objective;
    writeln!(out, "{}", if ok { "optimal" } else if report.feasible { "feasible, not optimal" } else { "infeasible" })?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn gen(args: &GenArgs) -> Result<ExitCode, Box<dyn Error>> {
    let family: Family = args.family.parse()?;
    let mut spec = GenSpec::new(family, args.n, args.seed);
    if let Some(d) = args.degree {
        spec = spec.degree(d);
    }
    let text = format!("c {family} n={} seed={}\n{}", args.n, args.seed, write_dimacs(&generate(&spec)?));
    match &args.output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn bench(config: &PathBuf, summary: Option<&PathBuf>) -> Result<ExitCode, Box<dyn Error>> {
    let config = BenchConfig::from_toml(&fs::read_to_string(config)?)?;
    let mut w = csv::Writer::from_writer(io::stdout());
    let mut failed = None;
    let outcome = run_bench(&config, &mut |row| {
        if failed.is_none() {
            failed = w.serialize(row).and_then(|_| w.flush().map_err(csv::Error::from)).err();
        }
    })?;
    if let Some(e) = failed {
        return Err(e.into());
    }
    match summary {
        Some(path) => write_csv(&outcome.summary, fs::File::create(path)?)?,
        None => {
            eprintln!();
            write_csv(&outcome.summary, io::stderr())?;
        }
    }
    let timeouts = outcome.rows.iter().filter(|r| r.status == Status::Timeout.to_string()).count();
    if timeouts > 0 {
        eprintln!("{timeouts} run(s) timed out");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Verify { instance, solution } => verify(instance, solution),
        Command::Gen(args) => gen(args),
        Command::Bench { config, summary } => bench(config, summary.as_ref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mcf: {e}");
            ExitCode::FAILURE
        }
    }
}
