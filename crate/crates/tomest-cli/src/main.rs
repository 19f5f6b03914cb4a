//! `tomest`: validate measurements, run estimators, scan risks, optimize
//! the purity slack, simulate experiments, and emit figure data.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric or guard error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tomest::figures::{emit_fig1, emit_fig2, emit_fig3, Fig1Params, Fig2Params, Fig3Params};
use tomest::minimax::{optimize_epsilon, worst_case_beta_classical, EpsilonFamily, SearchSpec};
use tomest::optim::NelderMead;
use tomest::risk::GridSpec;
use tomest::{
    build_pom, check_physical, empirical_risk, estimator::quantum_minimax_full, risk_exact,
    risk_extrema, validate_spom, BlochVector, CountVector, Error as CoreError, EstimatorSpec,
    PointEstimator, PomKind, ProbVector, Rotation, SimConfig, SymmetricPOM,
};

#[derive(Parser)]
#[command(name = "tomest", version, about = "Minimax estimators for quantum state tomography")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the primary output to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for the risk engine (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized probes and simulations.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a POM and report its geometric identity checks.
    ValidatePom {
        /// tetrahedron | trine | von-neumann | die<K> (e.g. die6)
        #[arg(long)]
        kind: Option<String>,
        /// Validate a POM stored as JSON instead of building one.
        #[arg(long, conflicts_with = "kind")]
        file: Option<PathBuf>,
        /// Include the POM itself (JSON) in the output.
        #[arg(long)]
        emit_pom: bool,
    },
    /// Apply an estimator to click counts.
    Estimate {
        #[arg(long, default_value = "tetrahedron")]
        pom: String,
        /// Comma-separated click counts, e.g. 4,0,0,0
        #[arg(long)]
        counts: String,
        #[command(flatten)]
        estimator: EstimatorArgs,
    },
    /// Exact risk of an estimator at one true state.
    Risk {
        #[arg(long, default_value = "tetrahedron")]
        pom: String,
        #[command(flatten)]
        estimator: EstimatorArgs,
        /// Number of measured copies.
        #[arg(long = "N")]
        n: u64,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Scan the state space for risk extrema.
    RiskScan {
        #[arg(long, default_value = "tetrahedron")]
        pom: String,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long = "N")]
        n: u64,
        /// Bloch-ball radii in the scan grid.
        #[arg(long, default_value_t = 25)]
        radii: usize,
        /// Directions per radius.
        #[arg(long, default_value_t = 162)]
        directions: usize,
        /// Random simplex probes (die POMs).
        #[arg(long, default_value_t = 2000)]
        random_probes: usize,
        /// Skip the Nelder-Mead refinement of the extrema.
        #[arg(long)]
        no_refine: bool,
    },
    /// Minimize the worst-case risk over the purity slack epsilon.
    OptimizeEpsilon {
        /// quantum_minimax | ml_quantum
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Single N, comma list, or inclusive range a..b selecting the
        /// default grid {1,2,4,7,10,15,20,30,50,100}.
        #[arg(long = "N")]
        n: String,
        /// Golden-section bracket tolerance on epsilon.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Coarse scan points before golden section.
        #[arg(long, default_value_t = 16)]
        scan_points: usize,
        #[arg(long, default_value_t = 25)]
        radii: usize,
        #[arg(long, default_value_t = 162)]
        directions: usize,
        /// Include the probe trace in JSON output.
        #[arg(long)]
        trace: bool,
    },
    /// Scan worst-case risk of add-beta estimators on the classical die.
    WorstBeta {
        /// Number of die faces.
        #[arg(long, default_value_t = 4)]
        faces: usize,
        #[arg(long = "N")]
        n: u64,
        /// Comma-separated beta grid, e.g. 0.1,0.2,0.5,1.0
        #[arg(long)]
        betas: String,
        #[arg(long, default_value_t = 2000)]
        random_probes: usize,
    },
    /// Monte Carlo tomography experiments against a true state.
    Simulate {
        #[arg(long, default_value = "tetrahedron")]
        pom: String,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Emit the data behind the likelihood, risk-vs-N, and epsilon-vs-N figures.
    Figures {
        /// fig1 | fig2 | fig3
        #[arg(long)]
        id: String,
        /// Comma-separated N values (default depends on the figure).
        #[arg(long)]
        n_values: Option<String>,
        /// Probability grid resolution (fig1).
        #[arg(long, default_value_t = 201)]
        grid_points: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 16)]
        scan_points: usize,
        #[arg(long, default_value_t = 25)]
        radii: usize,
        #[arg(long, default_value_t = 162)]
        directions: usize,
    },
}

#[derive(Args)]
struct EstimatorArgs {
    /// ml_classical | add_beta | classical_minimax | quantum_minimax |
    /// ml_quantum | mean_mc
    #[arg(long)]
    estimator: EstimatorName,
    /// Purity slack for the quantum estimators.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Fake counts per detector (add_beta, mean_mc).
    #[arg(long)]
    beta: Option<f64>,
    /// Use the b_N^2 = 1 - 4 epsilon variant (quantum_minimax).
    #[arg(long)]
    variant_bn: bool,
    /// Monte Carlo samples (mean_mc).
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Apply the qubit physicality indicator (mean_mc).
    #[arg(long)]
    indicator: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum EstimatorName {
    MlClassical,
    AddBeta,
    ClassicalMinimax,
    QuantumMinimax,
    MlQuantum,
    MeanMc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyArg {
    QuantumMinimax,
    MlQuantum,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct StateArgs {
    /// True state as a Bloch vector x,y,z (qubit POMs).
    #[arg(long)]
    bloch: Option<String>,
    /// True state as outcome probabilities p1,p2,...
    #[arg(long, alias = "true-probs")]
    probs: Option<String>,
    /// True state is the maximally mixed state.
    #[arg(long)]
    mixed: bool,
}

enum CliError {
    Usage(String),
    Numeric(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::ValidatePom { kind, file, emit_pom } => {
            let pom = match (kind, file) {
                (_, Some(path)) => SymmetricPOM::from_json(&fs::read_to_string(path)?)?,
                (Some(kind), None) => build_pom(parse_pom_kind(kind)?, &Rotation::identity())?,
                (None, None) => {
                    return Err(CliError::Usage("give either --kind or --file".into()))
                }
            };
            let report = validate_spom(&pom);
            let mut value = json!({
                "kind": pom.kind().name(),
                "dim": pom.dim(),
                "K": pom.num_outcomes(),
                "all_passed": report.all_passed(),
                "max_residual": report.max_residual(),
                "checks": report.checks,
            });
            if *emit_pom {
                value["pom"] = serde_json::to_value(&pom).expect("POM serializes");
            }
            emit(&cli, &to_json_line(&value))
        }
        Command::Estimate { pom, counts, estimator } => {
            let pom = build_pom(parse_pom_kind(pom)?, &Rotation::identity())?;
            let counts = CountVector::new(parse_u64_list(counts)?)?;
            if counts.len() != pom.num_outcomes() {
                return Err(CliError::Usage(format!(
                    "{} counts given but the POM has {} outcomes",
                    counts.len(),
                    pom.num_outcomes()
                )));
            }
            let spec = estimator.to_spec(cli.seed)?;
            spec.validate()?;

            let mut lambda = None;
            let mut std_err = None;
            let mut acceptance = None;
            let p_hat = match &spec {
                EstimatorSpec::QuantumMinimax { epsilon, variant_bn } => {
                    let full = quantum_minimax_full(&counts, *epsilon, *variant_bn)?;
                    lambda = Some(full.lambda);
                    full.p_hat
                }
                EstimatorSpec::MeanMc {
                    beta,
                    samples,
                    seed,
                    indicator,
                } => {
                    let r = tomest::estimator::estimate_mean_mc(
                        &counts, *beta, *samples, *seed, *indicator,
                    )?;
                    std_err = Some(r.std_err);
                    acceptance = Some(r.acceptance);
                    r.p_hat
                }
                other => other.estimate(&counts)?,
            };
            let physicality = check_physical(&p_hat, &pom);
            let value = json!({
                "estimator": spec,
                "counts": counts.counts(),
                "N": counts.total(),
                "p_hat": p_hat.as_slice(),
                "lambda": lambda,
                "std_err": std_err,
                "acceptance": acceptance,
                "sum_sq": physicality.sum_sq,
                "physical": physicality.physical,
            });
            emit(&cli, &to_json_line(&value))
        }
        Command::Risk { pom, estimator, n, state } => {
            let pom = build_pom(parse_pom_kind(pom)?, &Rotation::identity())?;
            let spec = estimator.to_spec(cli.seed)?;
            spec.validate()?;
            let true_p = state.resolve(&pom)?;
            let risk = risk_exact(&spec, &true_p, &pom, *n)?;
            let value = json!({
                "estimator": spec,
                "N": n,
                "true_probs": true_p.as_slice(),
                "risk": risk,
            });
            emit(&cli, &to_json_line(&value))
        }
        Command::RiskScan {
            pom,
            estimator,
            n,
            radii,
            directions,
            random_probes,
            no_refine,
        } => {
            let pom = build_pom(parse_pom_kind(pom)?, &Rotation::identity())?;
            let spec = estimator.to_spec(cli.seed)?;
            spec.validate()?;
            let grid = GridSpec {
                radii: *radii,
                directions: *directions,
                random_probes: *random_probes,
                seed: cli.seed,
                refine: !no_refine,
                nelder_mead: NelderMead::default(),
            };
            let surface = risk_extrema(&spec, &pom, *n, &grid)?;
            match cli.format {
                Format::Json => {
                    let value = json!({
                        "estimator": spec,
                        "N": n,
                        "extrema": surface.extrema,
                        "grid": surface.grid,
                    });
                    emit(&cli, &to_json_line(&value))
                }
                Format::Csv => {
                    // Surface rows go to --out (or stdout); the extrema JSON
                    // goes to the remaining stream so both stay parseable.
                    let extrema = to_json_line(&json!({ "extrema": surface.extrema }));
                    emit(&cli, &surface.to_csv())?;
                    if cli.out.is_some() {
                        print!("{extrema}");
                    } else {
                        eprint!("{extrema}");
                    }
                    Ok(())
                }
            }
        }
        Command::OptimizeEpsilon {
            family,
            n,
            tol,
            scan_points,
            radii,
            directions,
            trace,
        } => {
            let family = match family {
                FamilyArg::QuantumMinimax => EpsilonFamily::QuantumMinimax,
                FamilyArg::MlQuantum => EpsilonFamily::MlQuantum,
            };
            let search = SearchSpec {
                scan_points: *scan_points,
                tol: *tol,
                grid: GridSpec {
                    radii: *radii,
                    directions: *directions,
                    ..GridSpec::default()
                },
                ..SearchSpec::default()
            };
            let mut results = Vec::new();
            for n in parse_n_spec(n)? {
                results.push(optimize_epsilon(family, n, &search)?);
            }
            match cli.format {
                Format::Csv => {
                    let mut csv = String::from("N,epsilon_star,max_risk_star,max_risk_zero\n");
                    for r in &results {
                        let _ = writeln!(
                            csv,
                            "{},{},{},{}",
                            r.n, r.epsilon_star, r.max_risk_at_star, r.max_risk_at_zero
                        );
                    }
                    emit(&cli, &csv)
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = results
                        .iter()
                        .map(|r| {
                            let mut v = json!({
                                "N": r.n,
                                "epsilon_star": r.epsilon_star,
                                "max_risk_star": r.max_risk_at_star,
                                "max_risk_zero": r.max_risk_at_zero,
                            });
                            if *trace {
                                v["trace"] = json!(r.trace);
                            }
                            v
                        })
                        .collect();
                    emit(&cli, &to_json_line(&json!(rows)))
                }
            }
        }
        Command::WorstBeta {
            faces,
            n,
            betas,
            random_probes,
        } => {
            let grid = parse_f64_list(betas)?;
            let result = worst_case_beta_classical(*faces, *n, &grid, *random_probes, cli.seed)?;
            match cli.format {
                Format::Csv => {
                    let mut csv = String::from("beta,worst_risk\n");
                    for (beta, worst) in &result.worst_risks {
                        let _ = writeln!(csv, "{beta},{worst}");
                    }
                    emit(&cli, &csv)
                }
                Format::Json => emit(&cli, &to_json_line(&json!(result))),
            }
        }
        Command::Simulate {
            pom,
            estimator,
            n,
            trials,
            state,
        } => {
            let pom = build_pom(parse_pom_kind(pom)?, &Rotation::identity())?;
            let spec = estimator.to_spec(cli.seed)?;
            spec.validate()?;
            let true_p = state.resolve(&pom)?;
            let config = SimConfig::new(cli.seed, *trials, *n)?;
            let result = empirical_risk(&spec, &true_p, &pom, &config)?;
            let value = json!({
                "estimator": spec,
                "N": n,
                "true_probs": true_p.as_slice(),
                "mean": result.mean,
                "std_err": result.std_err,
                "trials": result.trials,
            });
            emit(&cli, &to_json_line(&value))
        }
        Command::Figures {
            id,
            n_values,
            grid_points,
            tol,
            scan_points,
            radii,
            directions,
        } => {
            let n_values = n_values.as_deref().map(parse_u64_list).transpose()?;
            let search = SearchSpec {
                scan_points: *scan_points,
                tol: *tol,
                grid: GridSpec {
                    radii: *radii,
                    directions: *directions,
                    ..GridSpec::default()
                },
                ..SearchSpec::default()
            };
            let table = match id.as_str() {
                "fig1" => {
                    let mut params = Fig1Params::default();
                    params.grid_points = *grid_points;
                    if let Some(ns) = n_values {
                        params.n_values = ns;
                    }
                    emit_fig1(&params)?
                }
                "fig2" => {
                    let mut params = Fig2Params {
                        search,
                        ..Fig2Params::default()
                    };
                    if let Some(ns) = n_values {
                        params.n_values = ns;
                    }
                    emit_fig2(&params)?
                }
                "fig3" => {
                    let mut params = Fig3Params {
                        search,
                        ..Fig3Params::default()
                    };
                    if let Some(ns) = n_values {
                        params.n_values = ns;
                    }
                    emit_fig3(&params)?
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown figure {other:?}; expected fig1, fig2, or fig3"
                    )))
                }
            };
            match cli.format {
                Format::Csv => emit(&cli, &table.to_csv()),
                Format::Json => emit(&cli, &to_json_line(&serde_json::to_value(&table).expect("table serializes"))),
            }
        }
    }
}

impl EstimatorArgs {
    fn to_spec(&self, seed: u64) -> Result<EstimatorSpec, CliError> {
        let epsilon = self.epsilon.unwrap_or(0.0);
        Ok(match self.estimator {
            EstimatorName::MlClassical => EstimatorSpec::MlClassical,
            EstimatorName::AddBeta => EstimatorSpec::AddBeta {
                beta: self
                    .beta
                    .ok_or_else(|| CliError::Usage("add_beta needs --beta".into()))?,
            },
            EstimatorName::ClassicalMinimax => EstimatorSpec::ClassicalMinimax,
            EstimatorName::QuantumMinimax => EstimatorSpec::QuantumMinimax {
                epsilon,
                variant_bn: self.variant_bn,
            },
            EstimatorName::MlQuantum => {
                if self.epsilon.is_some() {
                    EstimatorSpec::MlQuantumEpsilon { epsilon }
                } else {
                    EstimatorSpec::MlQuantum
                }
            }
            EstimatorName::MeanMc => EstimatorSpec::MeanMc {
                beta: self
                    .beta
                    .ok_or_else(|| CliError::Usage("mean_mc needs --beta".into()))?,
                samples: self.samples,
                seed,
                indicator: self.indicator,
            },
        })
    }
}

impl StateArgs {
    fn resolve(&self, pom: &SymmetricPOM) -> Result<ProbVector, CliError> {
        if self.mixed {
            return Ok(ProbVector::uniform(pom.num_outcomes()));
        }
        if let Some(text) = &self.bloch {
            let v = parse_f64_list(text)?;
            if v.len() != 3 {
                return Err(CliError::Usage("--bloch needs exactly x,y,z".into()));
            }
            let s = BlochVector([v[0], v[1], v[2]]);
            if !s.is_physical() {
                return Err(CliError::Numeric(format!(
                    "Bloch vector has norm {} > 1",
                    s.norm()
                )));
            }
            return Ok(tomest::qubit_probs(&s, pom)?);
        }
        if let Some(text) = &self.probs {
            let p = ProbVector::new(parse_f64_list(text)?)?;
            if p.len() != pom.num_outcomes() {
                return Err(CliError::Usage(format!(
                    "{} probabilities given but the POM has {} outcomes",
                    p.len(),
                    pom.num_outcomes()
                )));
            }
            return Ok(p);
        }
        Err(CliError::Usage("give one of --bloch, --probs, --mixed".into()))
    }
}

fn parse_pom_kind(text: &str) -> Result<PomKind, CliError> {
    let lower = text.to_ascii_lowercase();
    match lower.as_str() {
        "tetrahedron" => return Ok(PomKind::Tetrahedron),
        "trine" => return Ok(PomKind::Trine),
        "von-neumann" | "von_neumann" | "vonneumann" => return Ok(PomKind::VonNeumann),
        _ => {}
    }
    if let Some(rest) = lower.strip_prefix("die") {
        let digits = rest.trim_start_matches(':');
        if let Ok(k) = digits.parse::<usize>() {
            return Ok(PomKind::ClassicalDie(k));
        }
    }
    Err(CliError::Usage(format!(
        "unknown POM kind {text:?}; expected tetrahedron, trine, von-neumann, or die<K>"
    )))
}

fn parse_u64_list(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|e| CliError::Usage(format!("bad integer {s:?}: {e}")))
        })
        .collect()
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad number {s:?}: {e}")))
        })
        .collect()
}

/// Default N grid used by the figures and accepted by `--N a..b`.
const DEFAULT_N_GRID: [u64; 10] = [1, 2, 4, 7, 10, 15, 20, 30, 50, 100];

fn parse_n_spec(text: &str) -> Result<Vec<u64>, CliError> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo
            .parse()
            .map_err(|e| CliError::Usage(format!("bad range start {lo:?}: {e}")))?;
        let hi: u64 = hi
            .parse()
            .map_err(|e| CliError::Usage(format!("bad range end {hi:?}: {e}")))?;
        let values: Vec<u64> = DEFAULT_N_GRID
            .iter()
            .copied()
            .filter(|&n| n >= lo && n <= hi)
            .collect();
        if values.is_empty() {
            return Err(CliError::Usage(format!(
                "range {lo}..{hi} selects no grid point of {DEFAULT_N_GRID:?}"
            )));
        }
        return Ok(values);
    }
    parse_u64_list(text)
}

fn to_json_line(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON output serializes");
    text.push('\n');
    text
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
