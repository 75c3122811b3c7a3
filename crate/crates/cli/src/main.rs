//! `convpr`: measurement, solving, experiment sweeps, lemma verification,
//! plotting and the image demo from the command line.
//!
//! Exit codes: 0 success, 1 invalid arguments or configuration, 2 runtime
//! failure, 3 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convpr_core::harness::{self, ExperimentConfig, ModelKind, PairedReport, ReportFormat, SignalPattern};
use convpr_core::initialization::{spectral_init, InitOptions};
use convpr_core::lemma_verify::{run_verify_suite, VerifyConfig};
use convpr_core::solver::{adm_solve, gd_solve, SolverConfig, StepPolicy};
use convpr_core::weighting::WeightingScheme;
use convpr_core::{
    rng, ComplexVector, ConvolutionalMeasurement, Error, MeasurementOperator, Observations,
};

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (defaults: sigma_sq=0.51, tau=2.02, eps=1e-5)"
);

#[derive(Parser, Debug)]
#[command(name = "convpr", version = VERSION, about = "Convolutional phase retrieval toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute y = |a ⊛ x| for a signal and a kernel.
    Measure(MeasureArgs),
    /// Recover a signal from magnitudes.
    Solve(SolveArgs),
    /// Run a phase-transition sweep.
    Transition(SweepArgs),
    /// Run a paired comparison sweep.
    Compare(CompareArgs),
    /// Run the Monte-Carlo lemma verification suite.
    Verify(VerifyArgs),
    /// Reconstruct a grayscale PGM image from convolutional magnitudes.
    ImageDemo(ImageArgs),
    /// Render an existing CSV or JSON report as SVG.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct MeasureArgs {
    /// Signal x as JSON `[[re, im], ...]`.
    #[arg(long)]
    signal: PathBuf,
    /// Kernel a as JSON; omit to draw a Gaussian kernel of length --m.
    #[arg(long, conflicts_with = "m")]
    kernel: Option<PathBuf>,
    #[arg(long, required_unless_present = "kernel")]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write a generated kernel.
    #[arg(long)]
    kernel_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmArg {
    Gd,
    Adm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WeightingArg {
    Zeta,
    Uniform,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Kernel a as JSON.
    #[arg(long)]
    kernel: PathBuf,
    /// Observations y as JSON; mutually exclusive with --signal.
    #[arg(long, conflicts_with = "signal", required_unless_present = "signal")]
    y: Option<PathBuf>,
    /// Simulate y from this signal.
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Ground truth for dist reporting and stopping.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Signal length, needed when only --y is given.
    #[arg(long)]
    n: Option<usize>,
    /// Solver configuration JSON; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Gd)]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum)]
    weighting: Option<WeightingArg>,
    #[arg(long)]
    sigma_sq: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    backtracking: bool,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 100)]
    power_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the per-iteration trajectory as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Conv,
    Iid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PatternArg {
    Delta,
    Sphere,
    Ones,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Experiment configuration JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, value_enum, value_delimiter = ',')]
    patterns: Option<Vec<PatternArg>>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CompareKind {
    Models,
    Inits,
    Weightings,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, value_enum, default_value_t = CompareKind::Models)]
    kind: CompareKind,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    scalar_samples: Option<usize>,
    #[arg(long)]
    kernel_samples: Option<usize>,
    #[arg(long)]
    inequality_samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ImageArgs {
    /// 8-bit binary PGM (P5).
    #[arg(long)]
    image: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    factor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reconstructed image (PGM).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-channel results as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// CSV or JSON report.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidDimension { .. } | Error::InvalidParameter(_) | Error::InvalidInput(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &[u8]) -> CliResult {
    std::fs::write(path, text).map_err(|e| {
        Error::Io {
            path: path.to_path_buf(),
            source: e,
        }
        .into()
    })
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable value")
}

fn emit_json<T: serde::Serialize>(v: &T, out: Option<&Path>) -> CliResult {
    match out {
        Some(p) => write_text(p, to_json(v).as_bytes()),
        None => {
            println!("{}", to_json(v));
            Ok(())
        }
    }
}

fn measure(args: MeasureArgs) -> CliResult {
    let x: ComplexVector = read_json(&args.signal)?;
    let kernel = match (&args.kernel, args.m) {
        (Some(p), _) => read_json(p)?,
        (None, Some(m)) => harness::gen_kernel(m, &mut rng::stream(args.seed))?,
        (None, None) => return Err(usage("either --kernel or --m is required")),
    };
    if let Some(p) = &args.kernel_out {
        write_text(p, to_json(&kernel).as_bytes())?;
    }
    let model = ConvolutionalMeasurement::new(kernel, x.len())?;
    let y = model.measure(&x)?;
    emit_json(&y, args.out.as_deref())
}

fn solver_config(args: &SolveArgs) -> CliResult<SolverConfig> {
    let mut cfg: SolverConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => SolverConfig::default(),
    };
    let sigma_sq = args.sigma_sq.unwrap_or(match cfg.weighting {
        WeightingScheme::GaussianSmoothed { sigma_sq } => sigma_sq,
        WeightingScheme::Uniform => convpr_core::DEFAULT_SIGMA_SQ,
    });
    match args.weighting {
        Some(WeightingArg::Uniform) => cfg.weighting = WeightingScheme::Uniform,
        Some(WeightingArg::Zeta) => cfg.weighting = WeightingScheme::GaussianSmoothed { sigma_sq },
        None if args.sigma_sq.is_some() => cfg.weighting = WeightingScheme::GaussianSmoothed { sigma_sq },
        None => {}
    }
    if args.backtracking {
        cfg.step_policy = StepPolicy::backtracking();
    }
    if let Some(tau) = args.tau {
        cfg.step_policy = match cfg.step_policy {
            StepPolicy::Fixed { .. } => StepPolicy::Fixed { tau },
            StepPolicy::Backtracking { shrink, armijo_c, .. } => StepPolicy::Backtracking {
                init_tau: tau,
                shrink,
                armijo_c,
            },
        };
    }
    if let Some(k) = args.max_iters {
        cfg.max_iters = k;
    }
    if let Some(t) = args.tol {
        cfg.success_tol = t;
    }
    cfg.record_trajectory |= args.trajectory.is_some();
    cfg.validate()?;
    Ok(cfg)
}

fn solve(args: SolveArgs) -> CliResult {
    let config = solver_config(&args)?;
    let kernel: ComplexVector = read_json(&args.kernel)?;
    let signal: Option<ComplexVector> = args.signal.as_deref().map(read_json).transpose()?;
    let truth: Option<ComplexVector> = args.truth.as_deref().map(read_json).transpose()?;
    let n = args
        .n
        .or(signal.as_ref().map(|s| s.len()))
        .or(truth.as_ref().map(|t| t.len()))
        .ok_or_else(|| usage("cannot infer n: pass --n, --signal or --truth"))?;
    let model = ConvolutionalMeasurement::new(kernel, n)?;
    let y: Observations = match (&signal, &args.y) {
        (Some(x), _) => model.measure(x)?,
        (None, Some(p)) => read_json(p)?,
        (None, None) => return Err(usage("either --y or --signal is required")),
    };
    let init = InitOptions {
        power_iters: args.power_iters,
        ..InitOptions::default()
    };
    let z0 = spectral_init(&model, &y, init, &mut rng::stream(args.seed))?.z0;
    let truth = truth.as_ref().map(|t| t.as_slice());
    let result = match args.algorithm {
        AlgorithmArg::Gd => gd_solve(&model, &y, &z0, &config, truth)?,
        AlgorithmArg::Adm => adm_solve(&model, &y, &z0, &config, truth)?,
    };
    if let Some(p) = &args.trajectory {
        let mut buf = Vec::new();
        result.write_trajectory_csv(&mut buf).expect("in-memory write");
        write_text(p, &buf)?;
    }
    match result.final_dist {
        Some(d) => println!(
            "iterations {}  converged {}  objective {:e}  dist {:e}",
            result.iterations, result.converged, result.final_objective, d
        ),
        None => println!(
            "iterations {}  converged {}  objective {:e}",
            result.iterations, result.converged, result.final_objective
        ),
    }
    if let Some(p) = &args.out {
        write_text(p, to_json(&result).as_bytes())?;
    }
    Ok(())
}

fn experiment_config(args: &SweepArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::from_json_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(r) = &args.ratios {
        cfg.ratios = r.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(k) = args.max_iters {
        cfg.solver.max_iters = k;
    }
    if let Some(m) = args.model {
        cfg.model = match m {
            ModelArg::Conv => ModelKind::Convolutional,
            ModelArg::Iid => ModelKind::DenseIid,
        };
    }
    if let Some(ps) = &args.patterns {
        cfg.patterns = ps
            .iter()
            .map(|p| match p {
                PatternArg::Delta => SignalPattern::Delta,
                PatternArg::Sphere => SignalPattern::UniformSphere,
                PatternArg::Ones => SignalPattern::ConstantOnes,
            })
            .collect();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report_format(args: &SweepArgs, path: &Path) -> ReportFormat {
    match args.format {
        Some(FormatArg::Csv) => ReportFormat::Csv,
        Some(FormatArg::Json) => ReportFormat::Json,
        None => ReportFormat::from_path(path),
    }
}

fn print_cells(prefix: &str, report: &harness::TransitionReport) {
    for c in &report.grid {
        println!("{prefix}{:<16} m/n={:<6} {:>4}/{:<4} rate {:.3}", c.pattern, c.ratio, c.successes, c.trials, c.rate);
    }
}

fn transition(args: SweepArgs) -> CliResult {
    let cfg = experiment_config(&args)?;
    let report = harness::phase_transition(&cfg)?;
    print_cells("", &report);
    if let Some(p) = &args.out {
        report.write(p, report_format(&args, p))?;
    }
    if let Some(p) = &args.svg {
        harness::render_svg(&report, p)?;
    }
    Ok(())
}

fn compare(args: CompareArgs) -> CliResult {
    let cfg = experiment_config(&args.sweep)?;
    let paired: PairedReport = match args.kind {
        CompareKind::Models => harness::compare_models(&cfg)?,
        CompareKind::Inits => harness::compare_inits(&cfg)?,
        CompareKind::Weightings => harness::compare_weightings(&cfg)?,
    };
    for arm in &paired.arms {
        print_cells(&format!("{:<14} ", arm.label), &arm.report);
    }
    if let Some(p) = &args.sweep.out {
        paired.write(p, report_format(&args.sweep, p))?;
    }
    if let Some(p) = &args.sweep.svg {
        write_text(p, harness::render_grid_svg(&paired.flattened()).as_bytes())?;
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> CliResult<bool> {
    let d = VerifyConfig::default();
    let cfg = VerifyConfig {
        seed: args.seed,
        scalar_samples: args.scalar_samples.unwrap_or(d.scalar_samples),
        kernel_samples: args.kernel_samples.unwrap_or(d.kernel_samples),
        inequality_samples: args.inequality_samples.unwrap_or(d.inequality_samples),
        ..d
    };
    if cfg.scalar_samples < 2 || cfg.kernel_samples < 2 || cfg.inequality_samples == 0 {
        return Err(usage("sample counts must be at least 2"));
    }
    let summary = run_verify_suite(&cfg)?;
    for r in &summary.monte_carlo {
        println!("{} {:<48} z = {:.3}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.z_score);
    }
    for r in &summary.inequalities {
        println!(
            "{} {:<48} violations = {} / {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.violations,
            r.samples
        );
    }
    let d = &summary.delta_infty;
    println!(
        "{} {:<48} value = {:.6}",
        if d.pass { "PASS" } else { "FAIL" },
        format!("delta_infty(sigma_sq={}, eps={})", d.sigma_sq, d.epsilon),
        d.value
    );
    if let Some(p) = &args.out {
        write_text(p, to_json(&summary).as_bytes())?;
    }
    Ok(summary.all_pass)
}

fn image_demo(args: ImageArgs) -> CliResult {
    let result = harness::image_demo(&args.image, args.factor, args.seed)?;
    for ch in &result.channels {
        match (&ch.dist, &ch.error) {
            (Some(d), _) => println!("channel {}: dist {:e}", ch.channel, d),
            (None, Some(e)) => println!("channel {}: {e}", ch.channel),
            (None, None) => {}
        }
    }
    match result.psnr_db {
        Some(p) => println!("n {}  m {}  PSNR {:.2} dB", result.n, result.m, p),
        None => println!("n {}  m {}  exact reconstruction", result.n, result.m),
    }
    if let Some(p) = &args.out {
        harness::write_pgm(&result.reconstructed, p)?;
    }
    if let Some(p) = &args.report {
        write_text(p, to_json(&result).as_bytes())?;
    }
    Ok(())
}

fn plot(args: PlotArgs) -> CliResult {
    let cells = harness::read_grid(&args.input)?;
    write_text(&args.out, harness::render_grid_svg(&cells).as_bytes())
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Measure(a) => measure(a)?,
        Command::Solve(a) => solve(a)?,
        Command::Transition(a) => transition(a)?,
        Command::Compare(a) => compare(a)?,
        Command::Verify(a) => return Ok(if verify(a)? { 0 } else { 3 }),
        Command::ImageDemo(a) => image_demo(a)?,
        Command::Plot(a) => plot(a)?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
