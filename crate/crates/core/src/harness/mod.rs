//! Seeded experiment engine: signal and kernel generators, single trials,
//! phase-transition sweeps and paired comparisons.
//!
//! Every trial is a pure function of `(config, pattern, ratio index, trial
//! index)`. Trials run on a rayon pool and are collected in schedule order, so
//! pool width never changes a report.

mod image;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initialization::{norm_estimate, spectral_init, InitOptions};
use crate::operators::{
    dist_mod_phase, norm, ComplexVector, ConvolutionalMeasurement, DenseMeasurement,
    MeasurementOperator, Observations, C64,
};
use crate::rng::{complex_gaussian_vec, mix_seed, splitmix64, stream};
use crate::solver::{adm_solve, gd_solve, SolveResult, SolverConfig, StepPolicy};
use crate::weighting::WeightingScheme;

pub use image::{encode_pgm, image_demo, image_demo_on, parse_pgm, read_pgm, write_pgm, ChannelOutcome, GrayImage, ImageDemoOptions, ImageDemoResult};
pub use report::{
    read_grid, render_grid_svg, render_svg, write_grid_csv, Arm, GridCell, Metadata,
    PairedReport, ReportFormat, TransitionReport,
};

/// Environment variable overriding the worker-pool width.
pub const THREADS_ENV: &str = "CONVPR_THREADS";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalPattern {
    /// `e₁`, for which `‖C_x‖ = 1`.
    Delta,
    /// Complex Gaussian draw normalized to the unit sphere.
    UniformSphere,
    /// `(1/√n)·1`, for which `‖C_x‖ = √n`.
    ConstantOnes,
    /// A stored vector (JSON, or the binary format for `.bin`), normalized.
    FromFile { path: PathBuf },
}

impl SignalPattern {
    pub fn label(&self) -> String {
        match self {
            SignalPattern::Delta => "Delta".into(),
            SignalPattern::UniformSphere => "UniformSphere".into(),
            SignalPattern::ConstantOnes => "ConstantOnes".into(),
            SignalPattern::FromFile { path } => format!("FromFile:{}", path.display()),
        }
    }

    fn seed_key(&self) -> u64 {
        match self {
            SignalPattern::Delta => 0,
            SignalPattern::UniformSphere => 1,
            SignalPattern::ConstantOnes => 2,
            SignalPattern::FromFile { path } => path
                .to_string_lossy()
                .bytes()
                .fold(3, |h, b| splitmix64(h ^ u64::from(b))),
        }
    }
}

fn load_vector(path: &Path) -> Result<ComplexVector> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "bin") {
        ComplexVector::read_binary(bytes.as_slice())
    } else {
        serde_json::from_slice(&bytes)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
    }
}

/// Unit-norm test signal of length `n`.
pub fn gen_signal<R: Rng + ?Sized>(pattern: &SignalPattern, n: usize, rng: &mut R) -> Result<ComplexVector> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("signal length must be >= 2, got {n}")));
    }
    let v = match pattern {
        SignalPattern::Delta => return Ok(ComplexVector::basis(n, 0)),
        SignalPattern::ConstantOnes => vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n],
        SignalPattern::UniformSphere => loop {
            let v = complex_gaussian_vec(rng, n);
            if norm(&v) > 0.0 {
                break v;
            }
        },
        SignalPattern::FromFile { path } => {
            let v = load_vector(path)?;
            if v.len() != n {
                return Err(Error::InvalidInput(format!(
                    "{}: expected {n} entries, found {}",
                    path.display(),
                    v.len()
                )));
            }
            v.into_inner()
        }
    };
    let s = norm(&v);
    if s == 0.0 {
        return Err(Error::InvalidInput("signal file holds the zero vector".into()));
    }
    ComplexVector::new(v.into_iter().map(|c| c / s).collect())
}

/// Kernel with i.i.d. `CN(0, 1)` entries.
pub fn gen_kernel<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<ComplexVector> {
    if m == 0 {
        return Err(Error::InvalidParameter("kernel length must be >= 1".into()));
    }
    Ok(ComplexVector::from_vec_unchecked(complex_gaussian_vec(rng, m)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Convolutional,
    #[serde(rename = "DenseIID")]
    DenseIid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitKind {
    Spectral,
    /// Unit-norm complex Gaussian scaled by the norm estimate.
    RandomStart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Algorithm {
    #[default]
    GradientDescent,
    Adm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    /// Oversampling ratios `m/n`; `m = round(ratio·n)`.
    pub ratios: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub model: ModelKind,
    pub init: InitKind,
    #[serde(default)]
    pub init_options: InitOptions,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default)]
    pub solver: SolverConfig,
    pub patterns: Vec<SignalPattern>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 64,
            ratios: vec![2.0, 3.0, 4.0, 6.0, 8.0, 12.0],
            trials: 50,
            base_seed: 0,
            model: ModelKind::Convolutional,
            init: InitKind::Spectral,
            init_options: InitOptions::default(),
            algorithm: Algorithm::GradientDescent,
            solver: SolverConfig::default(),
            patterns: vec![
                SignalPattern::Delta,
                SignalPattern::UniformSphere,
                SignalPattern::ConstantOnes,
            ],
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 {
            return bad(format!("n must be >= 2, got {}", self.n));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if let Some(r) = self.ratios.iter().find(|r| !(r.is_finite() && **r >= 1.0)) {
            return bad(format!("every ratio must be >= 1, got {r}"));
        }
        if self.init_options.power_iters == 0 {
            return bad("power_iters must be >= 1".into());
        }
        self.solver.validate()
    }

    pub fn num_measurements(&self, ratio: f64) -> usize {
        ((ratio * self.n as f64).round() as usize).max(self.n)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub pattern: String,
    pub ratio: f64,
    pub m: usize,
    pub trial_index: usize,
    pub seed: u64,
    pub success: bool,
    /// `None` when the trial ended in an error.
    pub final_dist: Option<f64>,
    pub iterations: usize,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// A generated problem: truth, operator and observations.
pub struct TrialInstance {
    pub seed: u64,
    pub x: ComplexVector,
    pub model: Box<dyn MeasurementOperator>,
    pub y: Observations,
}

/// Seed of trial `trial_index` at ratio `ratio_index` for `pattern`.
pub fn trial_seed(config: &ExperimentConfig, pattern: &SignalPattern, ratio_index: usize, trial_index: usize) -> u64 {
    mix_seed(
        config.base_seed,
        &[pattern.seed_key(), ratio_index as u64, trial_index as u64],
    )
}

/// Draws `x` and then the measurement operator from separate streams, so the
/// two model arms see identical signals.
pub fn trial_instance(
    config: &ExperimentConfig,
    pattern: &SignalPattern,
    ratio_index: usize,
    trial_index: usize,
) -> Result<TrialInstance> {
    let ratio = *config
        .ratios
        .get(ratio_index)
        .ok_or_else(|| Error::InvalidParameter(format!("ratio index {ratio_index} out of range")))?;
    let seed = trial_seed(config, pattern, ratio_index, trial_index);
    let n = config.n;
    let m = config.num_measurements(ratio);
    let x = gen_signal(pattern, n, &mut stream(mix_seed(seed, &[1])))?;
    let mut op_rng = stream(mix_seed(seed, &[2]));
    let model: Box<dyn MeasurementOperator> = match config.model {
        ModelKind::Convolutional => Box::new(ConvolutionalMeasurement::new(gen_kernel(m, &mut op_rng)?, n)?),
        ModelKind::DenseIid => Box::new(DenseMeasurement::new(m, n, complex_gaussian_vec(&mut op_rng, m * n))?),
    };
    let y = model.measure(&x)?;
    Ok(TrialInstance { seed, x, model, y })
}

/// Initializes and solves a generated instance against its truth.
pub fn solve_instance(config: &ExperimentConfig, inst: &TrialInstance) -> Result<SolveResult> {
    let mut init_rng = stream(mix_seed(inst.seed, &[3]));
    let model = inst.model.as_ref();
    let z0 = match config.init {
        InitKind::Spectral => spectral_init(model, &inst.y, config.init_options, &mut init_rng)?.z0,
        InitKind::RandomStart => {
            let v = complex_gaussian_vec(&mut init_rng, config.n);
            let s = norm_estimate(&inst.y) / norm(&v);
            ComplexVector::new(v.into_iter().map(|c| c * s).collect())?
        }
    };
    match config.algorithm {
        Algorithm::GradientDescent => gd_solve(model, &inst.y, &z0, &config.solver, Some(&inst.x)),
        Algorithm::Adm => adm_solve(model, &inst.y, &z0, &config.solver, Some(&inst.x)),
    }
}

/// One seeded trial. Solver errors are recorded as failures.
pub fn run_trial(
    config: &ExperimentConfig,
    pattern: &SignalPattern,
    ratio_index: usize,
    trial_index: usize,
) -> Result<TrialRecord> {
    config.validate()?;
    let start = Instant::now();
    let ratio = *config
        .ratios
        .get(ratio_index)
        .ok_or_else(|| Error::InvalidParameter(format!("ratio index {ratio_index} out of range")))?;
    let inst = trial_instance(config, pattern, ratio_index, trial_index)?;
    let outcome = solve_instance(config, &inst);
    let mut record = TrialRecord {
        pattern: pattern.label(),
        ratio,
        m: inst.model.num_measurements(),
        trial_index,
        seed: inst.seed,
        success: false,
        final_dist: None,
        iterations: 0,
        wall_time_ms: 0.0,
        error: None,
    };
    match outcome {
        Ok(res) => {
            let d = match res.final_dist {
                Some(d) => d,
                None => dist_mod_phase(&res.z_hat, &inst.x)?,
            };
            record.success = d <= config.solver.success_tol;
            record.final_dist = Some(d);
            record.iterations = res.iterations;
        }
        Err(e @ (Error::NumericalDivergence { .. }
        | Error::DegenerateOperator(_)
        | Error::IllConditionedSystem { .. })) => record.error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(record)
}

/// Worker count from `CONVPR_THREADS`, else rayon's default.
pub fn worker_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

fn in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads())
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs the full schedule and returns the report with every trial record in
/// schedule order (pattern, then ratio, then trial).
pub fn run_sweep(config: &ExperimentConfig) -> Result<(TransitionReport, Vec<TrialRecord>)> {
    use rayon::prelude::*;
    config.validate()?;
    let jobs: Vec<(usize, usize, usize)> = (0..config.patterns.len())
        .flat_map(|p| (0..config.ratios.len()).flat_map(move |r| (0..config.trials).map(move |t| (p, r, t))))
        .collect();
    let records: Vec<TrialRecord> = in_pool(|| {
        jobs.par_iter()
            .map(|&(p, r, t)| run_trial(config, &config.patterns[p], r, t))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut grid = Vec::with_capacity(config.patterns.len() * config.ratios.len());
    for (chunk, (p, r)) in records.chunks(config.trials).zip(
        (0..config.patterns.len()).flat_map(|p| (0..config.ratios.len()).map(move |r| (p, r))),
    ) {
        grid.push(GridCell::new(
            config.patterns[p].label(),
            config.ratios[r],
            chunk.len(),
            chunk.iter().filter(|t| t.success).count(),
        ));
    }
    let report = TransitionReport {
        config: config.clone(),
        grid,
        metadata: Metadata::collect(),
    };
    Ok((report, records))
}

/// Success rate per `(pattern, ratio)`.
pub fn phase_transition(config: &ExperimentConfig) -> Result<TransitionReport> {
    Ok(run_sweep(config)?.0)
}

/// Runs each labelled configuration on its own schedule.
pub fn run_arms(arms: &[(String, ExperimentConfig)]) -> Result<PairedReport> {
    let arms = arms
        .iter()
        .map(|(label, cfg)| {
            Ok(Arm {
                label: label.clone(),
                report: phase_transition(cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairedReport { arms })
}

/// Convolutional versus dense i.i.d. Gaussian measurements with matched seeds.
pub fn compare_models(config: &ExperimentConfig) -> Result<PairedReport> {
    let with = |model| ExperimentConfig {
        model,
        ..config.clone()
    };
    run_arms(&[
        ("convolutional".into(), with(ModelKind::Convolutional)),
        ("dense_iid".into(), with(ModelKind::DenseIid)),
    ])
}

/// Spectral initialization versus a random start with backtracking steps.
pub fn compare_inits(config: &ExperimentConfig) -> Result<PairedReport> {
    let random = ExperimentConfig {
        init: InitKind::RandomStart,
        solver: SolverConfig {
            step_policy: StepPolicy::backtracking(),
            ..config.solver
        },
        ..config.clone()
    };
    let spectral = ExperimentConfig {
        init: InitKind::Spectral,
        ..config.clone()
    };
    run_arms(&[("spectral".into(), spectral), ("random_start".into(), random)])
}

/// ζ-weighting versus uniform weights `b = 1`.
pub fn compare_weightings(config: &ExperimentConfig) -> Result<PairedReport> {
    let with = |weighting| ExperimentConfig {
        solver: SolverConfig {
            weighting,
            ..config.solver
        },
        ..config.clone()
    };
    let sigma_sq = match config.solver.weighting {
        WeightingScheme::GaussianSmoothed { sigma_sq } => sigma_sq,
        WeightingScheme::Uniform => crate::DEFAULT_SIGMA_SQ,
    };
    run_arms(&[
        ("zeta".into(), with(WeightingScheme::GaussianSmoothed { sigma_sq })),
        ("uniform".into(), with(WeightingScheme::Uniform)),
    ])
}
