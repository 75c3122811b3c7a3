//! Spectral initialization.
//!
//! `z⁽⁰⁾ = λ v`, where `λ = sqrt(mean(y²))` estimates `‖x‖` and `v` is the
//! leading unit eigenvector of `Y = (1/m) A* diag(y²) A`, found by the power
//! method. `Y` is never formed; each application is one forward and one
//! adjoint product.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{inner, norm, ComplexVector, MeasurementOperator, Observations, C64};
use crate::rng::complex_gaussian_vec;

/// `λ = sqrt((1/m) Σ y_k²)`.
pub fn norm_estimate(y: &Observations) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    (y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64).sqrt()
}

/// Applies `Y v = (1/m) A* (y² ⊙ A v)` using caller-provided buffers.
pub struct YOperator<'a, A: MeasurementOperator + ?Sized> {
    model: &'a A,
    y_sq_over_m: Vec<f64>,
    buf: Vec<C64>,
}

impl<'a, A: MeasurementOperator + ?Sized> YOperator<'a, A> {
    pub fn new(model: &'a A, y: &Observations) -> Result<Self> {
        let m = model.num_measurements();
        if y.len() != m {
            return Err(Error::dim(m, y.len(), "observations vs measurements"));
        }
        let inv_m = 1.0 / m as f64;
        Ok(YOperator {
            model,
            y_sq_over_m: y.iter().map(|v| v * v * inv_m).collect(),
            buf: vec![C64::new(0.0, 0.0); m],
        })
    }

    pub fn apply(&mut self, v: &[C64], out: &mut [C64]) -> Result<()> {
        self.model.forward_into(v, &mut self.buf)?;
        for (b, w) in self.buf.iter_mut().zip(&self.y_sq_over_m) {
            *b *= *w;
        }
        self.model.adjoint_into(&self.buf, out)
    }
}

/// `Y v` for a single vector.
pub fn apply_y<A: MeasurementOperator + ?Sized>(
    model: &A,
    y: &Observations,
    v: &[C64],
) -> Result<ComplexVector> {
    let mut op = YOperator::new(model, y)?;
    let mut out = vec![C64::new(0.0, 0.0); model.signal_dim()];
    op.apply(v, &mut out)?;
    ComplexVector::new(out)
}

#[derive(Clone, Debug)]
pub struct PowerIteration {
    pub eigvec: ComplexVector,
    pub eigval: f64,
    pub iterations: usize,
    /// Rayleigh quotient after each application.
    pub rayleigh_history: Vec<f64>,
}

/// Power method from a random complex Gaussian start drawn from `rng`.
pub fn power_method<F, R>(
    apply: F,
    n: usize,
    max_iters: usize,
    rel_tol: f64,
    rng: &mut R,
) -> Result<PowerIteration>
where
    F: FnMut(&[C64], &mut [C64]) -> Result<()>,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(Error::InvalidInput("power method needs n >= 1".into()));
    }
    let start = complex_gaussian_vec(rng, n);
    power_method_from(apply, &start, max_iters, rel_tol)
}

/// Power method from an explicit start. Stops when the relative change of the
/// Rayleigh quotient drops below `rel_tol` or after `max_iters` normalizations.
pub fn power_method_from<F>(
    mut apply: F,
    start: &[C64],
    max_iters: usize,
    rel_tol: f64,
) -> Result<PowerIteration>
where
    F: FnMut(&[C64], &mut [C64]) -> Result<()>,
{
    if max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
    }
    let n = start.len();
    let start_norm = norm(start);
    if n == 0 || start_norm == 0.0 || !start_norm.is_finite() {
        return Err(Error::InvalidInput("power method needs a nonzero finite start".into()));
    }
    let mut v: Vec<C64> = start.iter().map(|c| c / start_norm).collect();
    let mut w = vec![C64::new(0.0, 0.0); n];

    let mut step = |v: &[C64], w: &mut [C64]| -> Result<f64> {
        apply(v, w)?;
        let wn = norm(w);
        if wn == 0.0 {
            return Err(Error::DegenerateOperator(
                "operator maps a unit vector to zero".into(),
            ));
        }
        if !wn.is_finite() {
            return Err(Error::InvalidInput("operator produced non-finite output".into()));
        }
        Ok(inner(v, w).re)
    };

    let mut rq = step(&v, &mut w)?;
    let mut history = vec![rq];
    let mut iterations = 0;
    while iterations < max_iters {
        let wn = norm(&w);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        iterations += 1;
        let next = step(&v, &mut w)?;
        history.push(next);
        let change = (next - rq).abs();
        rq = next;
        if change <= rel_tol * rq.abs() {
            break;
        }
    }
    Ok(PowerIteration {
        eigvec: ComplexVector::from_vec_unchecked(v),
        eigval: rq,
        iterations,
        rayleigh_history: history,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitOptions {
    pub power_iters: usize,
    pub rel_tol: f64,
}

impl Default for InitOptions {
    fn default() -> Self {
        InitOptions {
            power_iters: 100,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InitResult {
    pub z0: ComplexVector,
    pub lambda: f64,
    pub eigvec: ComplexVector,
    pub eigval_estimate: f64,
    pub power_iters_used: usize,
}

/// Spectral initializer `z⁽⁰⁾ = λ · leading_eigvec(Y)`.
pub fn spectral_init<A, R>(
    model: &A,
    y: &Observations,
    opts: InitOptions,
    rng: &mut R,
) -> Result<InitResult>
where
    A: MeasurementOperator + ?Sized,
    R: Rng + ?Sized,
{
    let mut yop = YOperator::new(model, y)?;
    let lambda = norm_estimate(y);
    if lambda == 0.0 {
        return Err(Error::DegenerateOperator("all observations are zero".into()));
    }
    let pm = power_method(
        |v, out| yop.apply(v, out),
        model.signal_dim(),
        opts.power_iters,
        opts.rel_tol,
        rng,
    )?;
    let z0 = pm.eigvec.scaled(C64::new(lambda, 0.0));
    Ok(InitResult {
        z0,
        lambda,
        eigvec: pm.eigvec,
        eigval_estimate: pm.eigval,
        power_iters_used: pm.iterations,
    })
}
