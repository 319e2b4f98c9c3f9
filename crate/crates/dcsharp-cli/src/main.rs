//! `dcsharp`: validate DC# programs, answer queries by sampling or enumeration,
//! inspect ground dependency graphs, import BIF networks, and run benchmarks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dcsharp::analysis::Analysis;
use dcsharp::bench::{bn_case, loans_evidence, loans_program, LOANS_QUERY};
use dcsharp::bif::{parse_bif, ImportMode};
use dcsharp::distribution::CombiningRule;
use dcsharp::estimator::{Algorithm, Estimate};
use dcsharp::fo::SamplerOptions;
use dcsharp::oracle::{assignment_probability, exact_query, ground_program, Assignment};
use dcsharp::parser::{parse_evidence, parse_program, parse_query};
use dcsharp::program::Literal;
use dcsharp::run::{Query, RunConfig};
use dcsharp::state::Evidence;
use dcsharp::term::Term;
use dcsharp::validate::validate;

#[derive(Parser)]
#[command(name = "dcsharp", version, about = "Inference for DC# probabilistic logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, check and analyse a program.
    Validate(ProgramArgs),
    /// Estimate P(query | evidence) by sampling.
    Query {
        #[command(flatten)]
        query: QueryArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Compute P(query | evidence) exactly by enumeration (discrete programs).
    Exact(QueryArgs),
    /// Print the ground dependency graph, or the grounding under an assignment.
    Ground {
        #[command(flatten)]
        program: ProgramArgs,
        /// File of `rv ~= value.` lines; `undefined` marks an undefined RV.
        #[arg(short, long)]
        assignment: Option<PathBuf>,
    },
    /// Convert a BIF network to a DC# program.
    Bif2dcs {
        bif: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Tree)]
        mode: Mode,
    },
    /// Repeated estimates against the exact answer, as CSV.
    Bench {
        #[command(subcommand)]
        workload: Workload,
    },
}

#[derive(Args)]
struct ProgramArgs {
    #[arg(short, long)]
    program: PathBuf,
    /// Override the program's combining rule.
    #[arg(long, value_enum)]
    combining: Option<Combining>,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    program: ProgramArgs,
    /// A conjunction of body literals, e.g. "debt(c1) ~= t".
    #[arg(short, long)]
    query: String,
    /// File of `rv ~= value.` observations.
    #[arg(short, long)]
    evidence: Option<PathBuf>,
    /// Treat RVs without an applicable clause as errors.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, value_enum, default_value_t = Sampler::Focslw)]
    algorithm: Sampler,
    #[arg(long, default_value_t = 10_000, value_parser = positive)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Workload {
    /// Generated tree-CPD networks: LW on the tabular import, CS-LW on the tree import.
    Random {
        #[arg(long, default_value_t = 20, value_parser = positive)]
        cases: usize,
        #[command(flatten)]
        reps: RepArgs,
    },
    /// The loan program over domain sizes, with the noisy-or rule.
    Loans {
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 5, 10, 20], value_parser = positive)]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Sampler::Focslw)]
        algorithm: Sampler,
        #[command(flatten)]
        reps: RepArgs,
    },
    /// A given program, query and evidence.
    Program {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Sampler::Lw, Sampler::Cslw, Sampler::Focslw])]
        algorithms: Vec<Sampler>,
        #[command(flatten)]
        reps: RepArgs,
    },
}

#[derive(Args)]
struct RepArgs {
    /// Repetitions per configuration; repetition r uses seed `seed + r`.
    #[arg(long, default_value_t = 30, value_parser = positive)]
    reps: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1000], value_parser = positive)]
    samples: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    jobs: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampler {
    Lw,
    Cslw,
    Focslw,
}

impl From<Sampler> for Algorithm {
    fn from(s: Sampler) -> Algorithm {
        match s {
            Sampler::Lw => Algorithm::Lw,
            Sampler::Cslw => Algorithm::Cslw,
            Sampler::Focslw => Algorithm::Focslw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Combining {
    Mean,
    Noisyor,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Tabular,
    Tree,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

type CliResult<T> = Result<T, Value>;
type Observations = Vec<(Term, Term)>;

fn fail(e: impl std::fmt::Display) -> Value {
    json!({ "error": e.to_string() })
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load(args: &ProgramArgs) -> CliResult<Analysis> {
    let mut program = parse_program(&read(&args.program)?).map_err(fail)?;
    if let Some(c) = args.combining {
        program.combining = match c {
            Combining::Mean => CombiningRule::Mean,
            Combining::Noisyor => CombiningRule::NoisyOr,
        };
    }
    let diagnostics = validate(&program);
    if !diagnostics.is_empty() {
        let list: Vec<String> = diagnostics.iter().map(ToString::to_string).collect();
        return Err(json!({ "error": "program failed validation", "diagnostics": list }));
    }
    Analysis::new(program).map_err(fail)
}

fn load_query(args: &QueryArgs) -> CliResult<(Analysis, Vec<Literal>, Observations)> {
    let an = load(&args.program)?;
    let goals = parse_query(&args.query).map_err(fail)?;
    let evidence = match &args.evidence {
        Some(path) => parse_evidence(&read(path)?).map_err(fail)?,
        None => Vec::new(),
    };
    Ok((an, goals, evidence))
}

fn estimate_json(e: &Estimate, seed: u64, elapsed_ms: u128) -> Value {
    json!({
        "estimate": e.value,
        "std_error": e.std_error,
        "samples": e.n_samples,
        "algorithm": e.algorithm.name(),
        "seed": seed,
        "elapsed_ms": elapsed_ms as u64,
    })
}

/// Estimate with fresh classification, timed from query setup to the final ratio.
fn timed(an: &Analysis, goals: &[Literal], ev: &[(Term, Term)], cfg: &RunConfig) -> CliResult<(Estimate, u128)> {
    let start = Instant::now();
    let evidence = Evidence::new(&an.dag, ev).map_err(fail)?;
    let q = Query::new(an, goals.to_vec(), evidence).map_err(fail)?;
    let e = q.estimate(cfg).map_err(fail)?;
    Ok((e, start.elapsed().as_millis()))
}

fn config(algorithm: Algorithm, samples: usize, seed: u64, jobs: usize, strict: bool) -> RunConfig {
    RunConfig { algorithm, samples, seed, jobs, options: SamplerOptions { strict, check: false } }
}

fn csv_line(fields: &[String]) {
    println!("{}", fields.join(","));
}

fn oracle_cell(exact: Option<f64>, estimate: f64) -> String {
    exact.map(|x| format!("{}", (estimate - x).abs())).unwrap_or_default()
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Validate(args) => {
            let an = load(&args)?;
            let out = json!({
                "valid": true,
                "clauses": an.program.clauses.len(),
                "rvs": an.dag.len(),
                "edges": an.dag.edges().len(),
            });
            println!("{out}");
        }
        Command::Query { query, sampling } => {
            let (an, goals, ev) = load_query(&query)?;
            let cfg = config(sampling.algorithm.into(), sampling.samples, sampling.seed, sampling.jobs, query.strict);
            let (e, ms) = timed(&an, &goals, &ev, &cfg)?;
            println!("{}", estimate_json(&e, sampling.seed, ms));
        }
        Command::Exact(query) => {
            let (an, goals, ev) = load_query(&query)?;
            let start = Instant::now();
            let evidence = Evidence::new(&an.dag, &ev).map_err(fail)?;
            let p = exact_query(&an, &goals, &evidence).map_err(fail)?;
            let e = Estimate { value: p, std_error: None, n_samples: 0, algorithm: Algorithm::Exact };
            println!("{}", estimate_json(&e, 0, start.elapsed().as_millis()));
        }
        Command::Ground { program, assignment } => {
            let an = load(&program)?;
            match assignment {
                None => print!("{}", an.dag.dump()),
                Some(path) => {
                    let pairs = parse_evidence(&read(&path)?).map_err(fail)?;
                    let u = Assignment::from_pairs(&an, &pairs).map_err(fail)?;
                    for c in ground_program(&an, &u).map_err(fail)? {
                        println!("{c}");
                    }
                    println!("% log-probability {}", assignment_probability(&an, &u).map_err(fail)?);
                }
            }
        }
        Command::Bif2dcs { bif, mode } => {
            let bn = parse_bif(&read(&bif)?).map_err(fail)?;
            let mode = match mode {
                Mode::Tabular => ImportMode::Tabular,
                Mode::Tree => ImportMode::Tree,
            };
            print!("{}", bn.to_program(mode));
        }
        Command::Bench { workload } => bench(workload)?,
    }
    Ok(())
}

fn bench(workload: Workload) -> CliResult<()> {
    match workload {
        Workload::Random { cases, reps } => {
            csv_line(&["case,nodes,algorithm,n_samples,repetition,estimate,abs_error_vs_oracle,elapsed_ms".into()]);
            for case in 0..cases {
                let c = bn_case(reps.seed + case as u64).map_err(fail)?;
                let goals = parse_query(&c.query_text()).map_err(fail)?;
                let ev = c.evidence_terms();
                for (mode, alg) in [(ImportMode::Tabular, Algorithm::Lw), (ImportMode::Tree, Algorithm::Cslw)] {
                    let an = Analysis::new(c.bn.to_program(mode)).map_err(fail)?;
                    for &n in &reps.samples {
                        for r in 0..reps.reps {
                            let cfg = config(alg, n, reps.seed + r as u64, reps.jobs, false);
                            let (e, ms) = timed(&an, &goals, &ev, &cfg)?;
                            csv_line(&[
                                case.to_string(),
                                c.bn.vars.len().to_string(),
                                alg.to_string(),
                                n.to_string(),
                                r.to_string(),
                                e.value.to_string(),
                                oracle_cell(Some(c.exact), e.value),
                                ms.to_string(),
                            ]);
                        }
                    }
                }
            }
        }
        Workload::Loans { sizes, algorithm, reps } => {
            csv_line(&["algorithm,domain_size,n_samples,repetition,estimate,abs_error_vs_oracle,elapsed_ms".into()]);
            let goals = parse_query(LOANS_QUERY).map_err(fail)?;
            for n in sizes {
                let program = parse_program(&loans_program(n)).map_err(fail)?.with_combining(CombiningRule::NoisyOr);
                let an = Analysis::new(program).map_err(fail)?;
                let ev = loans_evidence(n);
                let evidence = Evidence::new(&an.dag, &ev).map_err(fail)?;
                let exact = exact_query(&an, &goals, &evidence).ok();
                for &m in &reps.samples {
                    for r in 0..reps.reps {
                        let cfg = config(algorithm.into(), m, reps.seed + r as u64, reps.jobs, false);
                        let (e, ms) = timed(&an, &goals, &ev, &cfg)?;
                        csv_line(&[
                            Algorithm::from(algorithm).to_string(),
                            n.to_string(),
                            m.to_string(),
                            r.to_string(),
                            e.value.to_string(),
                            oracle_cell(exact, e.value),
                            ms.to_string(),
                        ]);
                    }
                }
            }
        }
        Workload::Program { query, algorithms, reps } => {
            let (an, goals, ev) = load_query(&query)?;
            let evidence = Evidence::new(&an.dag, &ev).map_err(fail)?;
            let exact = exact_query(&an, &goals, &evidence).ok();
            csv_line(&["algorithm,n_samples,repetition,estimate,abs_error_vs_oracle,elapsed_ms".into()]);
            for alg in algorithms {
                for &m in &reps.samples {
                    for r in 0..reps.reps {
                        let cfg = config(alg.into(), m, reps.seed + r as u64, reps.jobs, query.strict);
                        let (e, ms) = timed(&an, &goals, &ev, &cfg)?;
                        csv_line(&[
                            Algorithm::from(alg).to_string(),
                            m.to_string(),
                            r.to_string(),
                            e.value.to_string(),
                            oracle_cell(exact, e.value),
                            ms.to_string(),
                        ]);
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            println!("{e}");
            ExitCode::FAILURE
        }
    }
}
