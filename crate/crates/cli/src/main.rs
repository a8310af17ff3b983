use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use entanglab_core::ensembles::{EnsembleKind, EnsembleSpec};
use entanglab_core::experiments::{
    concentration_experiment, configure_threads_from_env, gue_approx_experiment, monotonicity_experiment,
    point_stream, run_config, spectral_experiment, threshold_scan, Criterion, GaugeBody, ScanPlan,
};
use entanglab_core::geometry::{s0_estimate, s0_ppt_estimate};
use entanglab_core::linalg::{hermitian_eigenvalues, HermitianOperator, ProductDims, TracelessHermitian};
use entanglab_core::matrix_io::{read_matrix_file, write_matrices};
use entanglab_core::rng::SeededStream;
use entanglab_core::separability::{gauge_d0, gauge_ppt0, gauge_s0, gauge_ssym};
use entanglab_core::{Error, Result};

mod geometry;
mod report;

use report::{print_json, write_rows, Format};

#[derive(Parser)]
#[command(name = "entanglab", version, about = "Random induced states, separability and convex-geometry experiments")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, env = "ENTANGLAB_SEED", default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw matrices from an ensemble and write eigenvalues (CSV) or a binary dump.
    Sample(SampleArgs),
    /// Per-trial spectral statistics against the semicircle law.
    Spectral(SpectralArgs),
    /// Gauge of a traceless Hermitian matrix read from a file.
    Gauge(GaugeArgs),
    /// Exact and Monte-Carlo convex-geometry checks.
    Geometry(geometry::GeometryArgs),
    /// Separability (or PPT) probability over a grid of environment dimensions.
    ScanThreshold(ScanArgs),
    /// Threshold estimate s₀(d) from GUE⁰ gauges.
    EstimateS0(EstimateArgs),
    /// Ratio of induced-state and GUE⁰ gauges.
    GueApprox(BodyRunArgs),
    /// Gauge fluctuations of induced states at s and 4s.
    Concentration(BodyRunArgs),
    /// Coupled monotonicity of PPT probabilities.
    Monotonicity(MonotonicityArgs),
    /// Run a JSON experiment configuration.
    Run {
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFormat {
    Eigenvalues,
    Binary,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_parser = parse_ensemble)]
    ensemble: EnsembleKind,
    #[arg(long)]
    n: usize,
    /// Environment dimension (induced) or column count (ginibre).
    #[arg(long, default_value_t = 0)]
    s: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, value_enum, default_value = "eigenvalues")]
    format: SampleFormat,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long, value_parser = parse_ensemble)]
    ensemble: EnsembleKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GaugeChoice {
    S0,
    Ssym,
    D0,
    Ppt0,
}

#[derive(Args)]
struct GaugeArgs {
    /// Matrix file: binary dump (first record) or JSON {"real", "imag"}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    body: GaugeChoice,
    /// Tensor factors, e.g. 2,2.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 2])]
    dims: Vec<usize>,
    /// Absolute bisection tolerance for s0 and ssym.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Subtract tr(A)/n·Id first instead of requiring a traceless input.
    #[arg(long)]
    center: bool,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 2])]
    dims: Vec<usize>,
    /// Comma list (1,2,4) or inclusive range start:stop:step (16:64:4).
    #[arg(long, value_parser = parse_s_values)]
    s: SList,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, value_parser = parse_criterion, default_value = "ppt")]
    criterion: Criterion,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    /// Use the closed-form PPT gauge (any d) instead of the exact one (d = 2).
    #[arg(long)]
    ppt: bool,
}

#[derive(Args)]
struct BodyRunArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 2])]
    dims: Vec<usize>,
    #[arg(long)]
    s: usize,
    #[arg(long, value_parser = parse_body)]
    body: GaugeBody,
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

#[derive(Args)]
struct MonotonicityArgs {
    #[arg(long, default_value_t = 2)]
    d1: usize,
    #[arg(long, default_value_t = 3)]
    d2: usize,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
}

#[derive(Clone, Debug)]
struct SList(Vec<usize>);

fn parse_ensemble(s: &str) -> std::result::Result<EnsembleKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_body(s: &str) -> std::result::Result<GaugeBody, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_criterion(s: &str) -> std::result::Result<Criterion, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_s_values(raw: &str) -> std::result::Result<SList, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not a non-negative integer"));
    let parts: Vec<&str> = raw.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (a, b, k) = (num(start)?, num(stop)?, num(step)?);
            if k == 0 || a > b {
                return Err("range needs step >= 1 and start <= stop".into());
            }
            (a..=b).step_by(k).collect()
        }
        [_] => raw.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?,
        _ => return Err("expected a comma list or start:stop:step".into()),
    };
    if values.is_empty() || values.contains(&0) {
        return Err("s values must be positive".into());
    }
    Ok(SList(values))
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sample(args: &SampleArgs, seed: u64) -> Result<()> {
    let spec = EnsembleSpec {
        kind: args.ensemble,
        n: args.n,
        s: args.s,
    };
    spec.validate()?;
    let stream = SeededStream::new(seed, 0);
    let draws = (0..args.trials)
        .map(|t| spec.sample(stream.child(t as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = output(args.out.as_ref())?;
    match args.format {
        SampleFormat::Binary => {
            let ms: Vec<_> = draws.iter().map(|d| d.matrix().clone()).collect();
            write_matrices(&mut out, &ms)?;
        }
        SampleFormat::Eigenvalues => {
            let mut rows = Vec::new();
            for (t, d) in draws.iter().enumerate() {
                let h = d
                    .hermitian()
                    .ok_or_else(|| Error::Input("ginibre draws have no real spectrum; use --format binary".into()))?;
                for (i, l) in hermitian_eigenvalues(h)?.as_slice().iter().enumerate() {
                    rows.push(json!({ "trial": t, "index": i, "eigenvalue": l }));
                }
            }
            write_rows(&mut out, &rows, Format::Csv)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn spectral(args: &SpectralArgs, seed: u64) -> Result<()> {
    let s = match args.ensemble {
        EnsembleKind::Induced => Some(args.s.ok_or_else(|| Error::Input("--s is required for induced".into()))?),
        _ => args.s,
    };
    let stream = point_stream(seed, s.unwrap_or(0));
    let rows: Vec<_> = spectral_experiment(args.ensemble, args.n, s, args.trials, stream)?
        .into_iter()
        .map(|r| {
            json!({
                "trial": r.trial, "n": r.n, "s": r.s, "ensemble": r.ensemble.to_string(),
                "dinf": r.dinf, "alpha": r.alpha, "beta": r.beta,
                "lambda_max": r.lambda_max, "lambda_min": r.lambda_min,
            })
        })
        .collect();
    let mut out = output(args.out.as_ref())?;
    write_rows(&mut out, &rows, Format::Csv)?;
    out.flush()?;
    Ok(())
}

fn gauge(args: &GaugeArgs) -> Result<()> {
    let dims = ProductDims::new(&args.dims)?;
    let h = HermitianOperator::new(read_matrix_file(&args.input)?)?;
    if h.dim() != dims.total() {
        return Err(Error::Input(format!(
            "matrix is {0}x{0} but dims {1:?} need {2}",
            h.dim(),
            args.dims,
            dims.total()
        )));
    }
    let a = if args.center {
        TracelessHermitian::project(h)
    } else {
        TracelessHermitian::new(h)?
    };
    let (value, width, evals) = match args.body {
        GaugeChoice::D0 => (gauge_d0(&a)?, 0.0, 0),
        GaugeChoice::Ppt0 => (gauge_ppt0(&a, &dims)?, 0.0, 0),
        GaugeChoice::S0 => {
            let r = gauge_s0(&a, &dims, args.tol)?;
            (r.value, r.bracket_width, r.membership_evals)
        }
        GaugeChoice::Ssym => {
            let r = gauge_ssym(&a, &dims, args.tol)?;
            (r.value, r.bracket_width, r.membership_evals)
        }
    };
    print_json(&json!({ "value": value, "bracket_width": width, "evals": evals }))
}

fn scan(args: &ScanArgs, seed: u64) -> Result<()> {
    let plan = ScanPlan::new(ProductDims::new(&args.dims)?, args.s.0.clone(), args.trials, args.criterion, seed)?;
    let result = threshold_scan(&plan)?;
    let label = result.probability_label();
    let rows: Vec<_> = result
        .records
        .iter()
        .map(|r| {
            let mut m = serde_json::Map::new();
            m.insert("s".into(), json!(r.s));
            m.insert("trials".into(), json!(r.trials));
            m.insert("successes".into(), json!(r.successes));
            m.insert(label.into(), json!(r.p_hat));
            m.insert("ci_low".into(), json!(r.ci_low));
            m.insert("ci_high".into(), json!(r.ci_high));
            serde_json::Value::Object(m)
        })
        .collect();
    let mut out = output(args.out.as_ref())?;
    write_rows(&mut out, &rows, Format::Csv)?;
    out.flush()?;
    let summary = json!({
        "seed": seed,
        "crossing": result.crossing,
        "monotone_within_2sigma": result.monotone_within_2sigma,
        "bound_entanglement_window": result.bound_entanglement_window,
    });
    eprintln!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

fn estimate(args: &EstimateArgs, seed: u64) -> Result<()> {
    let stream = SeededStream::new(seed, 0);
    if args.ppt {
        let e = s0_ppt_estimate(args.d, args.trials, stream)?;
        print_json(&json!({
            "d": e.d, "criterion": "ppt", "trials": args.trials, "seed": seed,
            "s0": e.s0.mean, "s0_se": e.s0.stderr,
            "mean_gauge": e.mean_gauge.mean, "mean_gauge_se": e.mean_gauge.stderr,
            "polar_width": e.polar_width.mean, "polar_width_se": e.polar_width.stderr,
        }))
    } else {
        let e = s0_estimate(args.d, args.trials, stream)?;
        print_json(&json!({
            "d": args.d, "criterion": "exact", "trials": e.trials, "seed": seed,
            "s0": e.mean, "s0_se": e.stderr,
        }))
    }
}

fn gue_approx(args: &BodyRunArgs, seed: u64) -> Result<()> {
    let dims = ProductDims::new(&args.dims)?;
    let r = gue_approx_experiment(&dims, args.s, args.body, args.trials, point_stream(seed, args.s))?;
    print_json(&json!({
        "n": r.n, "s": r.s, "body": r.body, "trials": args.trials, "seed": seed,
        "ratio": r.ratio, "ratio_se": r.ratio_se,
        "state_gauge": r.state_gauge, "gue_gauge": r.gue_gauge,
    }))
}

fn concentration(args: &BodyRunArgs, seed: u64) -> Result<()> {
    let dims = ProductDims::new(&args.dims)?;
    let c = concentration_experiment(&dims, args.s, args.body, args.trials, point_stream(seed, args.s))?;
    print_json(&json!({ "dims": args.dims, "seed": seed, "result": c }))
}

fn monotonicity(args: &MonotonicityArgs, seed: u64) -> Result<()> {
    let m = monotonicity_experiment(args.d1, args.d2, args.s, args.trials, point_stream(seed, args.s))?;
    print_json(&json!({ "d1": args.d1, "d2": args.d2, "s": args.s, "seed": seed, "result": m }))
}

fn dispatch(cli: Cli) -> Result<()> {
    configure_threads_from_env()?;
    let seed = cli.seed;
    match &cli.command {
        Command::Sample(a) => sample(a, seed),
        Command::Spectral(a) => spectral(a, seed),
        Command::Gauge(a) => gauge(a),
        Command::Geometry(a) => geometry::run(a, seed),
        Command::ScanThreshold(a) => scan(a, seed),
        Command::EstimateS0(a) => estimate(a, seed),
        Command::GueApprox(a) => gue_approx(a, seed),
        Command::Concentration(a) => concentration(a, seed),
        Command::Monotonicity(a) => monotonicity(a, seed),
        Command::Run { config } => {
            let summary = run_config(config)?;
            print_json(&serde_json::to_value(&summary)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } | Error::Input(_) | Error::UnsupportedDimension { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_value_syntax() {
        assert_eq!(parse_s_values("1,2,4").unwrap().0, vec![1, 2, 4]);
        assert_eq!(parse_s_values("16:28:4").unwrap().0, vec![16, 20, 24, 28]);
        assert!(parse_s_values("0,1").is_err());
        assert!(parse_s_values("4:1:1").is_err());
        assert!(parse_s_values("1:2").is_err());
    }
}
