//! Weighted amplitude objective and its solvers.
//!
//! `f(z) = (1/2m) ‖b^{1/2} ⊙ (y − |Az|)‖²`, minimized by generalized gradient
//! descent `z ← z − τ ∂f/∂z` with
//! `∂f/∂z = (1/m) A* diag(b) [Az − y ⊙ exp(iφ(Az))]`. Under `Cⁿ ≅ R²ⁿ` this is
//! `∂f/∂Re z + i ∂f/∂Im z`. The phase convention `exp(iφ(0)) = 1` makes the
//! gradient defined everywhere.
//!
//! [`adm_solve`] is the alternating-direction baseline: fix the phases
//! `c = y ⊙ exp(iφ(Az))`, then solve `min ‖Az − c‖` by CG on the normal
//! equations.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{
    dist_mod_phase, norm_sqr, phase_unit, ComplexVector, MeasurementOperator, Observations, C64,
};
use crate::weighting::WeightingScheme;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepPolicy {
    Fixed { tau: f64 },
    /// Armijo backtracking: shrink `τ` from `init_tau` until
    /// `f(z − τg) ≤ f(z) − c τ ‖g‖²`.
    Backtracking {
        init_tau: f64,
        shrink: f64,
        armijo_c: f64,
    },
}

impl StepPolicy {
    pub fn backtracking() -> Self {
        StepPolicy::Backtracking {
            init_tau: crate::DEFAULT_TAU,
            shrink: 0.5,
            armijo_c: 1e-4,
        }
    }
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy::Fixed {
            tau: crate::DEFAULT_TAU,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub weighting: WeightingScheme,
    pub step_policy: StepPolicy,
    pub max_iters: usize,
    /// Stop once `dist(z, truth) ≤ success_tol` (needs the truth).
    pub success_tol: f64,
    /// Without truth, stop once `f(z) ≤ residual_tol`.
    pub residual_tol: f64,
    pub record_trajectory: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            weighting: WeightingScheme::default(),
            step_policy: StepPolicy::default(),
            max_iters: crate::DEFAULT_MAX_ITERS,
            success_tol: crate::SUCCESS_TOL,
            residual_tol: 1e-14,
            record_trajectory: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.weighting.validate()?;
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        match self.step_policy {
            StepPolicy::Fixed { tau } if !(tau > 0.0 && tau.is_finite()) => {
                return bad("stepsize tau must be positive")
            }
            StepPolicy::Backtracking {
                init_tau,
                shrink,
                armijo_c,
            } => {
                if !(init_tau > 0.0 && init_tau.is_finite()) {
                    return bad("backtracking init_tau must be positive");
                }
                if !(shrink > 0.0 && shrink < 1.0) {
                    return bad("backtracking shrink must lie in (0, 1)");
                }
                if !(armijo_c > 0.0 && armijo_c < 1.0) {
                    return bad("armijo constant must lie in (0, 1)");
                }
            }
            _ => {}
        }
        if self.max_iters == 0 {
            return bad("max_iters must be >= 1");
        }
        if !(self.success_tol > 0.0 && self.residual_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iter: usize,
    pub dist: Option<f64>,
    pub objective: f64,
    /// Step taken to reach this iterate (`None` at iteration 0 and for ADM).
    pub tau: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResult {
    pub z_hat: ComplexVector,
    pub iterations: usize,
    pub converged: bool,
    pub final_dist: Option<f64>,
    pub final_objective: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

impl SolveResult {
    /// CSV with header `iter,dist,objective,tau`; missing values are empty.
    pub fn write_trajectory_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,dist,objective,tau")?;
        for p in self.trajectory.iter().flatten() {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
            writeln!(w, "{},{},{:e},{}", p.iter, opt(p.dist), p.objective, opt(p.tau))?;
        }
        Ok(())
    }
}

fn check_problem<A: MeasurementOperator + ?Sized>(
    model: &A,
    y: &[f64],
    b: &[f64],
    z: &[C64],
) -> Result<()> {
    let m = model.num_measurements();
    if y.len() != m {
        return Err(Error::dim(m, y.len(), "observations vs measurements"));
    }
    if b.len() != m {
        return Err(Error::dim(m, b.len(), "weights vs measurements"));
    }
    if z.len() != model.signal_dim() {
        return Err(Error::dim(model.signal_dim(), z.len(), "iterate vs signal dimension"));
    }
    Ok(())
}

fn objective_from_image(y: &[f64], b: &[f64], az: &[C64]) -> f64 {
    let m = y.len() as f64;
    y.iter()
        .zip(b)
        .zip(az)
        .map(|((yk, bk), u)| {
            let r = yk - u.norm();
            bk * r * r
        })
        .sum::<f64>()
        / (2.0 * m)
}

/// `residual ← (1/m) b ⊙ (Az − y ⊙ exp(iφ(Az)))`.
fn gradient_residual(y: &[f64], b: &[f64], az: &[C64], residual: &mut [C64]) {
    let inv_m = 1.0 / y.len() as f64;
    for (((r, u), yk), bk) in residual.iter_mut().zip(az).zip(y).zip(b) {
        *r = (u - phase_unit(*u) * *yk) * (bk * inv_m);
    }
}

/// `f(z) = (1/2m) Σ b_k (y_k − |[Az]_k|)²`.
pub fn objective<A: MeasurementOperator + ?Sized>(
    model: &A,
    y: &Observations,
    b: &[f64],
    z: &[C64],
) -> Result<f64> {
    check_problem(model, y, b, z)?;
    let mut az = vec![C64::new(0.0, 0.0); model.num_measurements()];
    model.forward_into(z, &mut az)?;
    Ok(objective_from_image(y, b, &az))
}

/// Generalized Wirtinger gradient `(1/m) A* diag(b) [Az − y ⊙ exp(iφ(Az))]`.
pub fn wirtinger_gradient<A: MeasurementOperator + ?Sized>(
    model: &A,
    y: &Observations,
    b: &[f64],
    z: &[C64],
) -> Result<ComplexVector> {
    check_problem(model, y, b, z)?;
    let m = model.num_measurements();
    let mut az = vec![C64::new(0.0, 0.0); m];
    model.forward_into(z, &mut az)?;
    let mut residual = vec![C64::new(0.0, 0.0); m];
    gradient_residual(y, b, &az, &mut residual);
    model.adjoint(&residual)
}

/// Buffers and state shared by the iterative solvers.
struct Workspace<'a, A: MeasurementOperator + ?Sized> {
    model: &'a A,
    y: &'a [f64],
    b: Vec<f64>,
    z: Vec<C64>,
    az: Vec<C64>,
    objective: f64,
}

impl<'a, A: MeasurementOperator + ?Sized> Workspace<'a, A> {
    fn new(model: &'a A, y: &'a Observations, b: Vec<f64>, z0: &[C64]) -> Result<Self> {
        check_problem(model, y, &b, z0)?;
        let mut az = vec![C64::new(0.0, 0.0); model.num_measurements()];
        model.forward_into(z0, &mut az)?;
        let objective = objective_from_image(y, &b, &az);
        Ok(Workspace {
            model,
            y: y.as_slice(),
            b,
            z: z0.to_vec(),
            az,
            objective,
        })
    }

    /// Recomputes `Az` and `f` after `z` changed.
    fn refresh(&mut self) -> Result<()> {
        self.model.forward_into(&self.z, &mut self.az)?;
        self.objective = objective_from_image(self.y, &self.b, &self.az);
        Ok(())
    }
}

struct Monitor<'t> {
    truth: Option<&'t [C64]>,
    config: SolverConfig,
    trajectory: Option<Vec<TrajectoryPoint>>,
    last_dist: Option<f64>,
}

impl<'t> Monitor<'t> {
    fn new(truth: Option<&'t [C64]>, config: SolverConfig) -> Self {
        Monitor {
            truth,
            config,
            trajectory: config.record_trajectory.then(Vec::new),
            last_dist: None,
        }
    }

    /// Records the iterate and reports whether a stopping rule holds.
    fn observe(&mut self, iter: usize, z: &[C64], objective: f64, tau: Option<f64>) -> Result<bool> {
        let dist = match self.truth {
            Some(x) => Some(dist_mod_phase(z, x)?),
            None => None,
        };
        self.last_dist = dist;
        if let Some(t) = self.trajectory.as_mut() {
            t.push(TrajectoryPoint {
                iter,
                dist,
                objective,
                tau,
            });
        }
        Ok(match dist {
            Some(d) => d <= self.config.success_tol,
            None => objective <= self.config.residual_tol,
        })
    }

    fn finish(self, z: Vec<C64>, iterations: usize, converged: bool, objective: f64) -> SolveResult {
        SolveResult {
            z_hat: ComplexVector::from_vec_unchecked(z),
            iterations,
            converged,
            final_dist: self.last_dist,
            final_objective: objective,
            trajectory: self.trajectory,
        }
    }
}

fn all_finite(v: &[C64]) -> bool {
    v.iter().all(|c| c.is_finite())
}

/// Maximum number of step shrinks per backtracking line search.
const MAX_BACKTRACKS: usize = 60;

/// Generalized gradient descent from `z0`.
///
/// Weights are computed once from `y`. With `truth` the iteration stops at
/// `dist(z, truth) ≤ success_tol`, otherwise at `f(z) ≤ residual_tol`.
pub fn gd_solve<A: MeasurementOperator + ?Sized>(
    model: &A,
    y: &Observations,
    z0: &[C64],
    config: &SolverConfig,
    truth: Option<&[C64]>,
) -> Result<SolveResult> {
    config.validate()?;
    if let Some(x) = truth {
        if x.len() != model.signal_dim() {
            return Err(Error::dim(model.signal_dim(), x.len(), "truth vs signal dimension"));
        }
    }
    let b = config.weighting.weights(y)?;
    let mut ws = Workspace::new(model, y, b, z0)?;
    let mut monitor = Monitor::new(truth, *config);
    let m = model.num_measurements();
    let n = model.signal_dim();
    let mut residual = vec![C64::new(0.0, 0.0); m];
    let mut grad = vec![C64::new(0.0, 0.0); n];
    let mut trial = vec![C64::new(0.0, 0.0); n];
    let mut trial_az = vec![C64::new(0.0, 0.0); m];

    let mut iter = 0;
    let mut tau_used = None;
    loop {
        if monitor.observe(iter, &ws.z, ws.objective, tau_used)? {
            return Ok(monitor.finish(ws.z, iter, true, ws.objective));
        }
        if iter == config.max_iters {
            return Ok(monitor.finish(ws.z, iter, false, ws.objective));
        }
        gradient_residual(ws.y, &ws.b, &ws.az, &mut residual);
        model.adjoint_into(&residual, &mut grad)?;

        match config.step_policy {
            StepPolicy::Fixed { tau } => {
                for (zi, gi) in ws.z.iter_mut().zip(&grad) {
                    *zi -= gi * tau;
                }
                if !all_finite(&ws.z) {
                    return Err(Error::NumericalDivergence { iteration: iter + 1 });
                }
                ws.refresh()?;
                tau_used = Some(tau);
            }
            StepPolicy::Backtracking {
                init_tau,
                shrink,
                armijo_c,
            } => {
                let g2 = norm_sqr(&grad);
                let mut tau = init_tau;
                let mut accepted = None;
                for _ in 0..MAX_BACKTRACKS {
                    for ((t, zi), gi) in trial.iter_mut().zip(&ws.z).zip(&grad) {
                        *t = zi - gi * tau;
                    }
                    if !all_finite(&trial) {
                        return Err(Error::NumericalDivergence { iteration: iter + 1 });
                    }
                    model.forward_into(&trial, &mut trial_az)?;
                    let f_trial = objective_from_image(ws.y, &ws.b, &trial_az);
                    if f_trial <= ws.objective - armijo_c * tau * g2 {
                        accepted = Some(f_trial);
                        break;
                    }
                    tau *= shrink;
                }
                let Some(f_trial) = accepted else {
                    // No sufficient decrease at any trial step: stationary to
                    // working precision.
                    return Ok(monitor.finish(ws.z, iter, false, ws.objective));
                };
                std::mem::swap(&mut ws.z, &mut trial);
                std::mem::swap(&mut ws.az, &mut trial_az);
                ws.objective = f_trial;
                tau_used = Some(tau);
            }
        }
        if !ws.objective.is_finite() {
            return Err(Error::NumericalDivergence { iteration: iter + 1 });
        }
        iter += 1;
    }
}

/// One step of gradient descent with a fixed stepsize.
pub fn gd_step<A: MeasurementOperator + ?Sized>(
    model: &A,
    y: &Observations,
    b: &[f64],
    z: &[C64],
    tau: f64,
) -> Result<ComplexVector> {
    let g = wirtinger_gradient(model, y, b, z)?;
    ComplexVector::new(z.iter().zip(g.iter()).map(|(zi, gi)| zi - gi * tau).collect())
}

/// Inner least-squares solver settings for ADM.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Relative residual that must be reached by `max_iters`.
    pub stagnation_tol: f64,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            tol: 1e-10,
            max_iters: 500,
            stagnation_tol: 1e-6,
        }
    }
}

/// Solves `A*A z = A* c` by conjugate gradients, warm-started at `z`.
pub fn cg_normal_equations<A: MeasurementOperator + ?Sized>(
    model: &A,
    c: &[C64],
    z: &mut [C64],
    opts: CgOptions,
) -> Result<usize> {
    let m = model.num_measurements();
    let n = model.signal_dim();
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    model.adjoint_into(c, &mut rhs)?;
    let rhs_norm = norm_sqr(&rhs).sqrt();
    if rhs_norm == 0.0 {
        z.fill(C64::new(0.0, 0.0));
        return Ok(0);
    }
    let mut image = vec![C64::new(0.0, 0.0); m];
    let mut normal = |v: &[C64], out: &mut [C64]| -> Result<()> {
        model.forward_into(v, &mut image)?;
        model.adjoint_into(&image, out)
    };

    let mut ap = vec![C64::new(0.0, 0.0); n];
    normal(z, &mut ap)?;
    let mut r: Vec<C64> = rhs.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = norm_sqr(&r);
    let mut iters = 0;
    while rr.sqrt() > opts.tol * rhs_norm && iters < opts.max_iters {
        normal(&p, &mut ap)?;
        let pap = crate::operators::inner(&p, &ap).re;
        if !(pap > 0.0) {
            break;
        }
        let alpha = rr / pap;
        for ((zi, pi), (ri, api)) in z.iter_mut().zip(&p).zip(r.iter_mut().zip(&ap)) {
            *zi += pi * alpha;
            *ri -= api * alpha;
        }
        let rr_next = norm_sqr(&r);
        let beta = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + *pi * beta;
        }
        rr = rr_next;
        iters += 1;
    }
    let rel = rr.sqrt() / rhs_norm;
    if rel > opts.stagnation_tol {
        return Err(Error::IllConditionedSystem {
            relative_residual: rel,
            iterations: iters,
        });
    }
    Ok(iters)
}

/// Alternating-direction baseline: `c ← y ⊙ exp(iφ(Az))`, `z ← A†c`.
///
/// The reported objective uses uniform weights. Stopping rules match
/// [`gd_solve`].
pub fn adm_solve<A: MeasurementOperator + ?Sized>(
    model: &A,
    y: &Observations,
    z0: &[C64],
    config: &SolverConfig,
    truth: Option<&[C64]>,
) -> Result<SolveResult> {
    config.validate()?;
    if let Some(x) = truth {
        if x.len() != model.signal_dim() {
            return Err(Error::dim(model.signal_dim(), x.len(), "truth vs signal dimension"));
        }
    }
    let mut ws = Workspace::new(model, y, vec![1.0; y.len()], z0)?;
    let mut monitor = Monitor::new(truth, *config);
    let mut phased = vec![C64::new(0.0, 0.0); model.num_measurements()];
    let mut iter = 0;
    loop {
        if monitor.observe(iter, &ws.z, ws.objective, None)? {
            return Ok(monitor.finish(ws.z, iter, true, ws.objective));
        }
        if iter == config.max_iters {
            return Ok(monitor.finish(ws.z, iter, false, ws.objective));
        }
        for ((c, u), yk) in phased.iter_mut().zip(&ws.az).zip(ws.y) {
            *c = phase_unit(*u) * *yk;
        }
        cg_normal_equations(model, &phased, &mut ws.z, CgOptions::default())?;
        if !all_finite(&ws.z) {
            return Err(Error::NumericalDivergence { iteration: iter + 1 });
        }
        ws.refresh()?;
        iter += 1;
    }
}
