use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use cmop_ela::coverage::{self, Target};
use cmop_ela::features::{compute_features, Family, FeatureConfig};
use cmop_ela::problem::ObjectiveCount;
use cmop_ela::sampling::SampleCache;
use cmop_ela::sensitivity::{self, SweepConfig};
use cmop_ela::{gridscan, Error, ProblemInstance, ProblemRegistry};
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "cmop-ela",
    version,
    about = "Landscape features of constrained multiobjective problems"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered problems.
    List {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Compute feature records.
    Features(FeatureArgs),
    /// Evaluate a full grid over a two-variable problem.
    Gridscan {
        #[arg(long)]
        problem: String,
        /// Points per axis.
        #[arg(long, default_value_t = 201)]
        resolution: usize,
        #[arg(long, default_value = "gridscan")]
        out: PathBuf,
    },
    /// Suite coverage matrix over a directory of feature records.
    Coverage {
        #[arg(long)]
        records: PathBuf,
        /// Target suite, or `all`.
        #[arg(long, default_value = "all")]
        target: String,
        #[arg(long, default_value = "coverage")]
        out: PathBuf,
    },
    /// Sweep sample size and clustering radius for the component count.
    Sensitivity(SensitivityArgs),
}

#[derive(Args)]
struct FeatureArgs {
    #[arg(long, required_unless_present = "suite")]
    problem: Vec<String>,
    #[arg(long)]
    suite: Vec<String>,
    #[arg(long, default_value = "2", value_delimiter = ',')]
    dim: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Space-filling sample size.
    #[arg(long)]
    samples: Option<usize>,
    /// Clustering radius for space-filling and adaptive walks.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    walks: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// Compute only these families.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[arg(long, default_value = "records")]
    out: PathBuf,
    #[arg(long, env = "CMOP_CACHE_DIR")]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Known number of feasible components.
    #[arg(long)]
    exact: usize,
    #[arg(long, value_delimiter = ',')]
    samples: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 30)]
    repetitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "sensitivity")]
    out: PathBuf,
    #[arg(long, env = "CMOP_CACHE_DIR")]
    cache: Option<PathBuf>,
}

/// Exit code 2 for invalid input, 3 for failures during computation.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn config(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn compute(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 3,
        error: error.into(),
    }
}

fn classify(error: Error) -> Failure {
    match error {
        Error::UnknownProblem(_)
        | Error::UnsupportedDimension { .. }
        | Error::InvalidParameter(_) => config(error),
        other => compute(other),
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let registry = ProblemRegistry::with_builtins();
    let result = match cli.command {
        Command::List { suite, json } => list(&registry, suite.as_deref(), json),
        Command::Features(args) => features(&registry, &args),
        Command::Gridscan {
            problem,
            resolution,
            out,
        } => grid(&registry, &problem, resolution, &out),
        Command::Coverage {
            records,
            target,
            out,
        } => coverage_report(&records, &target, &out),
        Command::Sensitivity(args) => sweep(&registry, &args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn list(registry: &ProblemRegistry, suite: Option<&str>, json: bool) -> CliResult {
    let entries: Vec<_> = match suite {
        Some(s) => registry.suite(s).collect(),
        None => registry.entries().collect(),
    };
    let objectives = |o: ObjectiveCount| match o {
        ObjectiveCount::Fixed(m) => m.to_string(),
        ObjectiveCount::Scalable { default } => format!("{default}+"),
    };
    if json {
        let rows: Vec<serde_json::Value> = entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "id": e.id,
                    "suite": e.suite,
                    "objectives": e.objectives.default_count(),
                    "scalable_objectives": matches!(e.objectives, ObjectiveCount::Scalable { .. }),
                    "min_dimension": e.min_dimension,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&rows).map_err(compute)?);
    } else {
        println!(
            "{:<12} {:<10} {:>10} {:>8}",
            "id", "suite", "objectives", "min_dim"
        );
        for e in entries {
            println!(
                "{:<12} {:<10} {:>10} {:>8}",
                e.id,
                e.suite,
                objectives(e.objectives),
                e.min_dimension
            );
        }
    }
    Ok(())
}

/// Problem ids with a flag telling whether they were named explicitly.
fn selected_problems(
    registry: &ProblemRegistry,
    args: &FeatureArgs,
) -> CliResult<Vec<(String, bool)>> {
    let mut ids: Vec<(String, bool)> = Vec::new();
    for id in &args.problem {
        let entry = registry
            .get(id)
            .ok_or_else(|| config(Error::UnknownProblem(id.clone())))?;
        if !ids.iter().any(|(i, _)| *i == entry.id) {
            ids.push((entry.id.clone(), true));
        }
    }
    for suite in &args.suite {
        let mut found = false;
        for e in registry.suite(suite) {
            found = true;
            if !ids.iter().any(|(i, _)| *i == e.id) {
                ids.push((e.id.clone(), false));
            }
        }
        if !found {
            return Err(config(anyhow!("unknown suite `{suite}`")));
        }
    }
    Ok(ids)
}

fn feature_config(args: &FeatureArgs, d: usize) -> CliResult<FeatureConfig> {
    let mut cfg = FeatureConfig::for_dimension(d);
    if let Some(n) = args.samples {
        cfg.spacefill.samples = n;
    }
    if let Some(eps) = args.eps {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(config(anyhow!("--eps must be positive")));
        }
        cfg.spacefill.dbscan.epsilon = eps;
        cfg.adaptivewalk.dbscan.epsilon = eps;
    }
    if let Some(w) = args.walks {
        cfg.randomwalk.walks = w;
    }
    if let Some(s) = args.steps {
        cfg.randomwalk.steps = s;
    }
    Ok(cfg)
}

fn families(only: &[String]) -> CliResult<Vec<Family>> {
    if only.is_empty() {
        return Ok(Family::ALL.to_vec());
    }
    only.iter()
        .map(|s| s.parse::<Family>().map_err(classify))
        .collect()
}

fn features(registry: &ProblemRegistry, args: &FeatureArgs) -> CliResult {
    let ids = selected_problems(registry, args)?;
    let families = families(&args.only)?;
    let mut jobs: Vec<(ProblemInstance, FeatureConfig)> = Vec::new();
    for (id, explicit) in &ids {
        for &d in &args.dim {
            let min = registry.get(id).map_or(0, |e| e.min_dimension);
            if !explicit && d < min {
                eprintln!("skipping {id}: needs at least {min} variables");
                continue;
            }
            let problem = registry.instantiate(id, d).map_err(classify)?;
            jobs.push((problem, feature_config(args, d)?));
        }
    }
    let cache = args.cache.as_ref().map(SampleCache::new);
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))
        .map_err(config)?;
    jobs.par_iter()
        .map(|(problem, cfg)| {
            let record = compute_features(problem, cfg, args.seed, &families, cache.as_ref())
                .with_context(|| format!("{} at D={}", problem.id(), problem.dimension()))
                .map_err(compute)?;
            let path = args.out.join(format!(
                "{}-D{}-s{}.json",
                problem.id(),
                problem.dimension(),
                args.seed
            ));
            let text = record.to_json().map_err(compute)?;
            fs::write(&path, text + "\n")
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(compute)?;
            println!("{}", path.display());
            Ok(())
        })
        .collect()
}

fn grid(registry: &ProblemRegistry, id: &str, resolution: usize, out: &Path) -> CliResult {
    let problem = registry.instantiate(id, 2).map_err(classify)?;
    if resolution < 2 {
        return Err(config(anyhow!("--resolution must be at least 2")));
    }
    let scan = gridscan::scan(&problem, resolution).map_err(classify)?;
    for path in scan.write_csvs(out).map_err(compute)? {
        println!("{}", path.display());
    }
    eprintln!(
        "{}: {} feasible components on a {resolution}x{resolution} grid",
        problem.id(),
        scan.feasible_components()
    );
    Ok(())
}

fn coverage_report(records_dir: &Path, target: &str, out: &Path) -> CliResult {
    if !records_dir.is_dir() {
        return Err(config(anyhow!(
            "records directory {} does not exist",
            records_dir.display()
        )));
    }
    let records = coverage::load_records(records_dir).map_err(config)?;
    let matrix = coverage::coverage_matrix(&records, &Target::parse(target)).map_err(classify)?;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create {}", out.display()))
        .map_err(config)?;
    let csv_path = out.join("coverage.csv");
    let file = fs::File::create(&csv_path)
        .with_context(|| format!("cannot write {}", csv_path.display()))
        .map_err(compute)?;
    matrix.write_csv(file).map_err(compute)?;
    let bounds_path = out.join("normalization.json");
    let bounds = matrix.normalization.to_json().map_err(compute)?;
    fs::write(&bounds_path, bounds + "\n")
        .with_context(|| format!("cannot write {}", bounds_path.display()))
        .map_err(compute)?;
    for f in &matrix.excluded {
        eprintln!(
            "warning: feature `{}` has no values; its cells are null",
            f.key()
        );
    }
    println!("{}", csv_path.display());
    println!("{}", bounds_path.display());
    Ok(())
}

fn sweep(registry: &ProblemRegistry, args: &SensitivityArgs) -> CliResult {
    let problem = registry
        .instantiate(&args.problem, args.dim)
        .map_err(classify)?;
    let mut cfg = SweepConfig {
        repetitions: args.repetitions,
        ..SweepConfig::default()
    };
    if !args.samples.is_empty() {
        cfg.sizes = args.samples.clone();
    }
    if !args.eps.is_empty() {
        cfg.epsilons = args.eps.clone();
    }
    let cache = args.cache.as_ref().map(SampleCache::new);
    let cells = sensitivity::sweep(&problem, args.exact, &cfg, args.seed, cache.as_ref())
        .map_err(classify)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))
        .map_err(config)?;
    let summary = args.out.join("summary.csv");
    let counts = args.out.join("counts.csv");
    let open = |p: &Path| {
        fs::File::create(p)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(compute)
    };
    sensitivity::write_summary_csv(&cells, open(&summary)?).map_err(compute)?;
    sensitivity::write_counts_csv(&cells, open(&counts)?).map_err(compute)?;
    println!("{}", summary.display());
    println!("{}", counts.display());
    Ok(())
}
