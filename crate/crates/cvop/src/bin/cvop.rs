//! Command-line workbench: classify tractability, compute certified
//! sandwich approximations, demonstrate divergence, and evaluate
//! upper-set expressions. Exit codes: 0 decided/certified, 2
//! undetermined/uncertified, 1 error.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde_json::Value;

use cvop::classify::{classify, Boundedness, ClassifyConfig};
use cvop::cone::PolyCone;
use cvop::config::{SolverConfig, DEFAULT_EPS, DEFAULT_RESOLUTION_DEG, DEFAULT_SEED, DEFAULT_WEIGHT_BUDGET, THREADS_ENV_VAR};
use cvop::error::CvopError;
use cvop::jsonio;
use cvop::problem::CvopProblem;
use cvop::registry::{self, ProblemSpec};
use cvop::sandwich::{divergence_demo, sandwich_solve, DivergenceOutcome, SandwichConfig};
use cvop::setops;
use cvop::Result;

#[derive(Parser)]
#[command(
    name = "cvop",
    version,
    about = "Polyhedral approximation workbench for convex vector optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write the JSON artifact here (stdout when omitted); a run record
    /// lands next to it as <out>.run.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also export a CSV table of the main result
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide boundedness/self-boundedness of a problem
    Classify {
        /// Problem: builtin:<name> or a path to a problem JSON file
        problem: String,
        /// Angular grid resolution in degrees
        #[arg(long, default_value_t = DEFAULT_RESOLUTION_DEG)]
        resolution: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute a certified inner/outer sandwich of the upper image
    Solve {
        problem: String,
        /// Certified gap target (Hausdorff distance, in units of the
        /// reference direction)
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Maximum number of scalarizations
        #[arg(long, default_value_t = DEFAULT_WEIGHT_BUDGET)]
        budget: usize,
        /// Classifier resolution used when --k-cone auto needs a verdict
        #[arg(long, default_value_t = DEFAULT_RESOLUTION_DEG)]
        resolution: f64,
        /// Approximation cone: auto | ordering | inline JSON | path to a
        /// cone JSON file
        #[arg(long, default_value = "auto")]
        k_cone: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Walk y_bar + n*k_bar and track its distance to the upper image
    Diverge {
        problem: String,
        /// Claimed bounding cone: ordering | inline JSON | path
        #[arg(long, default_value = "ordering")]
        k_cone: String,
        /// Base point, JSON array (e.g. "[0,0]")
        #[arg(long)]
        y_bar: String,
        /// Walk direction, JSON array
        #[arg(long)]
        k_bar: String,
        /// Number of walk steps
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate an upper-set expression from a request file
    Setops {
        /// Request JSON: {"expr": "...", "bindings": {name: upper set}}
        request: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> std::process::ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::ExitCode::from(1)
        }
    }
}

fn configure_threads() {
    if let Ok(text) = std::env::var(THREADS_ENV_VAR) {
        if let Ok(n) = text.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Classify {
            problem,
            resolution,
            seed,
            output,
        } => cmd_classify(&problem, resolution, seed, &output),
        Command::Solve {
            problem,
            eps,
            budget,
            resolution,
            k_cone,
            seed,
            output,
        } => cmd_solve(&problem, eps, budget, resolution, &k_cone, seed, &output),
        Command::Diverge {
            problem,
            k_cone,
            y_bar,
            k_bar,
            n_max,
            seed,
            output,
        } => cmd_diverge(&problem, &k_cone, &y_bar, &k_bar, n_max, seed, &output),
        Command::Setops { request, output } => cmd_setops(&request, &output),
    }
}

/// Hash of the problem argument: file bytes when it is a path, the
/// argument itself for builtin references.
fn spec_hash(problem_arg: &str) -> String {
    if let Ok(bytes) = std::fs::read(problem_arg) {
        jsonio::sha256_hex(&bytes)
    } else {
        jsonio::sha256_hex(problem_arg.as_bytes())
    }
}

fn finish(
    artifact: Value,
    command: String,
    hash: String,
    config: Value,
    started: Instant,
    output: &OutputArgs,
    csv_rows: Vec<Vec<String>>,
    exit: u8,
) -> Result<u8> {
    let mut outputs = Vec::new();
    if let Some(path) = &output.out {
        jsonio::write_artifact(path, &artifact)?;
        outputs.push(path.display().to_string());
    } else {
        print!("{}", jsonio::emit(&artifact));
    }
    if let Some(path) = &output.csv {
        let mut writer = csv::Writer::from_path(path).map_err(csv_error)?;
        for row in &csv_rows {
            writer.write_record(row).map_err(csv_error)?;
        }
        writer.flush()?;
        outputs.push(path.display().to_string());
    }
    if let Some(path) = &output.out {
        let record = jsonio::RunRecord {
            command,
            spec_sha256: hash,
            config,
            outputs,
            wall_time_s: started.elapsed().as_secs_f64(),
        };
        let mut run_path = path.as_os_str().to_owned();
        run_path.push(".run.json");
        jsonio::write_artifact(
            std::path::Path::new(&run_path),
            &jsonio::run_record_to_json(&record)?,
        )?;
    }
    Ok(exit)
}

fn csv_error(err: csv::Error) -> CvopError {
    CvopError::InvalidProblem(format!("csv export failed: {err}"))
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn load(problem_arg: &str, seed: u64) -> Result<(CvopProblem, ProblemSpec)> {
    registry::load_from_arg(problem_arg, seed)
}

fn parse_vector_arg(text: &str, what: &str) -> Result<DVector<f64>> {
    let value = jsonio::parse_str(text)?;
    jsonio::vector_from(&value, what)
}

fn cone_from_arg(arg: &str, problem: &CvopProblem) -> Result<Option<PolyCone>> {
    match arg {
        "auto" => Ok(None),
        "ordering" => Ok(Some(problem.ordering.clone())),
        inline if inline.trim_start().starts_with('{') => {
            Ok(Some(jsonio::cone_from_json(&jsonio::parse_str(inline)?)?))
        }
        path => {
            let text = std::fs::read_to_string(path)?;
            Ok(Some(jsonio::cone_from_json(&jsonio::parse_str(&text)?)?))
        }
    }
}

fn cmd_classify(
    problem_arg: &str,
    resolution: f64,
    seed: u64,
    output: &OutputArgs,
) -> Result<u8> {
    let started = Instant::now();
    let (problem, _spec) = load(problem_arg, seed)?;
    let config = ClassifyConfig {
        resolution_deg: resolution,
        solver: SolverConfig::default(),
    };
    let report = classify(&problem, &config)?;
    eprintln!("verdict: {}", report.verdict);

    let mut csv_rows = vec![];
    if output.csv.is_some() {
        let q = problem.dim_y();
        let mut header = vec!["status".to_string()];
        header.extend((0..q).map(|i| format!("w{i}")));
        header.push("value".into());
        header.push("bound_gap".into());
        csv_rows.push(header);
        for v in report
            .w_estimate
            .evidence
            .iter()
            .chain(report.refinement_evidence.iter())
        {
            let mut row = vec![format!("{:?}", v.status)];
            row.extend(v.weight.iter().map(|&x| fmt(x)));
            row.push(v.value.filter(|x| x.is_finite()).map_or(String::new(), fmt));
            row.push(if v.bound_gap.is_finite() {
                fmt(v.bound_gap)
            } else {
                String::new()
            });
            csv_rows.push(row);
        }
    }

    let exit = if report.verdict == Boundedness::Undetermined {
        2
    } else {
        0
    };
    let config_json = jsonio::parse_str(&format!(
        "{{\"resolution_deg\": {resolution}, \"seed\": {seed}}}"
    ))?;
    finish(
        jsonio::classify_report_to_json(&report)?,
        format!("classify {problem_arg}"),
        spec_hash(problem_arg),
        config_json,
        started,
        output,
        csv_rows,
        exit,
    )
}

fn select_k(
    problem: &CvopProblem,
    k_cone: &str,
    resolution: f64,
) -> Result<PolyCone> {
    if let Some(k) = cone_from_arg(k_cone, problem)? {
        return Ok(k);
    }
    let config = ClassifyConfig {
        resolution_deg: resolution,
        solver: SolverConfig::default(),
    };
    let report = classify(problem, &config)?;
    eprintln!("classifier verdict: {}", report.verdict);
    match report.verdict {
        Boundedness::Bounded => Ok(problem.ordering.clone()),
        Boundedness::SelfBoundedUnbounded => {
            report.recc_estimate.ok_or_else(|| {
                CvopError::Undetermined(
                    "classifier produced no recession-cone estimate".into(),
                )
            })
        }
        Boundedness::NotSelfBounded => Err(CvopError::NotAmenable(
            "the problem is not self-bounded: every polyhedral outer \
             approximation of the upper image lies at infinite Hausdorff \
             distance, no finite weight set can certify a gap"
                .into(),
        )),
        Boundedness::Undetermined => Err(CvopError::Undetermined(
            "classification is undetermined at this resolution; rerun with \
             a finer --resolution or pass --k-cone explicitly"
                .into(),
        )),
    }
}

fn cmd_solve(
    problem_arg: &str,
    eps: f64,
    budget: usize,
    resolution: f64,
    k_cone: &str,
    seed: u64,
    output: &OutputArgs,
) -> Result<u8> {
    let started = Instant::now();
    let (problem, _spec) = load(problem_arg, seed)?;
    let k = match select_k(&problem, k_cone, resolution) {
        Ok(k) => k,
        Err(CvopError::Undetermined(msg)) => {
            eprintln!("undetermined: {msg}");
            return Ok(2);
        }
        Err(other) => return Err(other),
    };
    let config = SandwichConfig {
        eps,
        budget,
        solver: SolverConfig::default(),
    };
    let result = sandwich_solve(&problem, &k, &config)?;
    eprintln!(
        "certified: {} (eps_certified = {:.3e}, {} weights, {} minimizers)",
        result.certified,
        result.eps_certified,
        result.weight_log.len(),
        result.weak_minimizers.len()
    );

    let mut csv_rows = vec![];
    if output.csv.is_some() {
        let n = problem.dim_x();
        let q = problem.dim_y();
        let mut header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        header.extend((0..q).map(|j| format!("f{j}")));
        csv_rows.push(header);
        for x in &result.weak_minimizers {
            let image = problem.objective.eval(x);
            let mut row: Vec<String> = x.iter().map(|&v| fmt(v)).collect();
            row.extend(image.iter().map(|&v| fmt(v)));
            csv_rows.push(row);
        }
    }

    let exit = if result.certified { 0 } else { 2 };
    let config_json = jsonio::parse_str(&format!(
        "{{\"eps\": {eps}, \"budget\": {budget}, \"k_cone\": \"{k_cone}\", \
         \"resolution_deg\": {resolution}, \"seed\": {seed}}}"
    ))?;
    finish(
        jsonio::sandwich_result_to_json(&result)?,
        format!("solve {problem_arg}"),
        spec_hash(problem_arg),
        config_json,
        started,
        output,
        csv_rows,
        exit,
    )
}

fn cmd_diverge(
    problem_arg: &str,
    k_cone: &str,
    y_bar: &str,
    k_bar: &str,
    n_max: usize,
    seed: u64,
    output: &OutputArgs,
) -> Result<u8> {
    let started = Instant::now();
    let (problem, _spec) = load(problem_arg, seed)?;
    let k = cone_from_arg(k_cone, &problem)?.ok_or_else(|| {
        CvopError::InvalidProblem(
            "diverge needs an explicit --k-cone (ordering, inline JSON, or path)".into(),
        )
    })?;
    let y_bar = parse_vector_arg(y_bar, "--y-bar")?;
    let k_bar = parse_vector_arg(k_bar, "--k-bar")?;
    let outcome = divergence_demo(
        &problem,
        &k,
        &y_bar,
        &k_bar,
        n_max,
        &SolverConfig::default(),
    )?;
    let trace = match &outcome {
        DivergenceOutcome::Diverging(t) => {
            eprintln!("diverging: the distances grow without bound");
            t
        }
        DivergenceOutcome::Contradiction { trace, reason } => {
            eprintln!("contradiction: {reason}");
            trace
        }
    };

    let mut csv_rows = vec![];
    if output.csv.is_some() {
        csv_rows.push(vec!["n".to_string(), "distance".to_string()]);
        for (n, d) in &trace.distances {
            csv_rows.push(vec![n.to_string(), fmt(*d)]);
        }
    }

    let config_json = jsonio::parse_str(&format!(
        "{{\"n_max\": {n_max}, \"seed\": {seed}}}"
    ))?;
    finish(
        jsonio::divergence_outcome_to_json(&outcome)?,
        format!("diverge {problem_arg}"),
        spec_hash(problem_arg),
        config_json,
        started,
        output,
        csv_rows,
        0,
    )
}

fn cmd_setops(request_path: &PathBuf, output: &OutputArgs) -> Result<u8> {
    let started = Instant::now();
    let bytes = std::fs::read(request_path)?;
    let request = jsonio::parse_str(&String::from_utf8_lossy(&bytes))?;
    let (expr, bindings) = jsonio::setops_request_from_json(&request)?;
    let value = setops::run(&expr, &bindings)?;
    match &value {
        setops::SetopsValue::Set(set) => eprintln!(
            "set result: {} points, dim {}",
            set.points().len(),
            set.dim()
        ),
        setops::SetopsValue::Bool(b) => eprintln!("boolean result: {b}"),
    }

    let mut csv_rows = vec![];
    if output.csv.is_some() {
        if let setops::SetopsValue::Set(set) = &value {
            let q = set.dim();
            let mut header = vec!["kind".to_string()];
            header.extend((0..q).map(|i| format!("y{i}")));
            csv_rows.push(header);
            for p in set.points() {
                let mut row = vec!["point".to_string()];
                row.extend(p.iter().map(|&x| fmt(x)));
                csv_rows.push(row);
            }
            if !set.is_empty() {
                for r in set.recession_cone()?.generators() {
                    let mut row = vec!["ray".to_string()];
                    row.extend(r.iter().map(|&x| fmt(x)));
                    csv_rows.push(row);
                }
            }
        }
    }

    finish(
        jsonio::setops_value_to_json(&value)?,
        format!("setops {}", request_path.display()),
        jsonio::sha256_hex(&bytes),
        Value::Object(serde_json::Map::new()),
        started,
        output,
        csv_rows,
        0,
    )
}
