//! Gaussian smoothing weights and associated scalar functions.
//!
//! With `ξ_{σ²}(t) = exp(−|t|²/(2σ²)) / (2πσ²)` the weights are
//! `b = ζ_{σ²}(y) = 1 − 2πσ² ξ_{σ²}(y)`, well defined for `σ² > 1/2`.
//! `η` and `ν` are the companions whose `CN(0,1)`-smoothings reproduce `ζ`,
//! and `h(t) = E_{s~CN(0,1)} ψ(t+s)` with `ψ(t) = exp(−2iφ(t))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{phase_unit, Observations, C64};

/// Choice of the weight vector `b` in the objective.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightingScheme {
    /// `b = 1`.
    Uniform,
    /// `b = ζ_{σ²}(y)`.
    GaussianSmoothed { sigma_sq: f64 },
}

impl Default for WeightingScheme {
    fn default() -> Self {
        WeightingScheme::GaussianSmoothed {
            sigma_sq: crate::DEFAULT_SIGMA_SQ,
        }
    }
}

impl WeightingScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightingScheme::Uniform => Ok(()),
            WeightingScheme::GaussianSmoothed { sigma_sq } => require_above_half(sigma_sq),
        }
    }

    /// Weight vector for observations `y`. Depends on `y` only.
    pub fn weights(&self, y: &Observations) -> Result<Vec<f64>> {
        self.validate()?;
        Ok(match *self {
            WeightingScheme::Uniform => vec![1.0; y.len()],
            WeightingScheme::GaussianSmoothed { sigma_sq } => {
                y.iter().map(|&v| zeta_abs(v, sigma_sq)).collect()
            }
        })
    }
}

fn require_above_half(sigma_sq: f64) -> Result<()> {
    if sigma_sq.is_finite() && sigma_sq > 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "sigma^2 must exceed 1/2, got {sigma_sq}"
        )))
    }
}

/// `b = weights_from_observations(y, scheme)`.
pub fn weights_from_observations(y: &Observations, scheme: WeightingScheme) -> Result<Vec<f64>> {
    scheme.weights(y)
}

/// `ξ_{σ²}(t) = exp(−|t|²/(2σ²)) / (2πσ²)`.
pub fn xi(t: C64, sigma_sq: f64) -> f64 {
    (-t.norm_sqr() / (2.0 * sigma_sq)).exp() / (2.0 * PI * sigma_sq)
}

/// `ζ_{σ²}(t) = 1 − exp(−|t|²/(2σ²))`.
pub fn zeta(t: C64, sigma_sq: f64) -> f64 {
    -(-t.norm_sqr() / (2.0 * sigma_sq)).exp_m1()
}

/// `ζ` evaluated at a real magnitude.
#[inline]
pub fn zeta_abs(r: f64, sigma_sq: f64) -> f64 {
    -(-r * r / (2.0 * sigma_sq)).exp_m1()
}

/// `ψ(t) = exp(−2iφ(t)) = conj(t/|t|)²`, with `ψ(0) = 1`.
pub fn psi(t: C64) -> C64 {
    let p = phase_unit(t).conj();
    p * p
}

/// `h(t) = E_{s~CN(0,1)} ψ(t+s)` for real `t ≥ 0`:
/// `1 − t⁻² + t⁻² e^{−t²}`, with `h(0) = 0`.
pub fn h_closed_form(t: f64) -> f64 {
    let u = t * t;
    if u < 1.0 {
        // h = Σ_{k≥1} (−1)^{k+1} u^k / (k+1)!; the closed form cancels here.
        let coeffs: [f64; 20] = std::array::from_fn(|k| (2..=k + 2).map(|j| 1.0 / j as f64).product());
        u * coeffs.iter().rev().fold(0.0, |acc, c| c - u * acc)
    } else {
        1.0 + (-u).exp_m1() / u
    }
}

/// `η_{σ²}(t) = 1 − 2πσ² ξ_{σ²−1/2}(t) = 1 − σ²/(σ²−½) · exp(−|t|²/(2σ²−1))`.
pub fn eta(t: C64, sigma_sq: f64) -> Result<f64> {
    require_above_half(sigma_sq)?;
    Ok(1.0 - 2.0 * PI * sigma_sq * xi(t, sigma_sq - 0.5))
}

/// `ν_{σ²}(t) = 1 − 4πσ⁴/(2σ²−1) · ξ_{σ²−1/2}(t)`.
pub fn nu(t: C64, sigma_sq: f64) -> Result<f64> {
    require_above_half(sigma_sq)?;
    let s4 = sigma_sq * sigma_sq;
    Ok(1.0 - 4.0 * PI * s4 / (2.0 * sigma_sq - 1.0) * xi(t, sigma_sq - 0.5))
}

/// Sampling grid for the supremum in [`delta_infty`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            t_max: 50.0,
            step: 1e-3,
        }
    }
}

/// `Δ∞(ε) = (1+2σ²) sup_t |(1+ε) h(t) − ζ_{σ²}(t)|`.
///
/// Both functions are rotation invariant, so the supremum runs over real
/// `t ≥ 0`: a uniform grid on `[0, t_max]` plus the limit `(1+2σ²)ε` as
/// `t → ∞` (the difference is monotone past `t = 10`).
pub fn delta_infty(sigma_sq: f64, epsilon: f64, grid: GridSpec) -> Result<f64> {
    require_above_half(sigma_sq)?;
    if !(epsilon >= 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in [0, 1), got {epsilon}"
        )));
    }
    if !(grid.step > 0.0 && grid.t_max > 0.0) {
        return Err(Error::InvalidParameter("grid step and t_max must be positive".into()));
    }
    let points = (grid.t_max / grid.step).round() as usize;
    let gap = |t: f64| ((1.0 + epsilon) * h_closed_form(t) - zeta_abs(t, sigma_sq)).abs();
    let sup = (0..=points)
        .map(|k| gap(k as f64 * grid.step))
        .fold(epsilon, f64::max);
    Ok((1.0 + 2.0 * sigma_sq) * sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn xi_values() {
        assert!((xi(c(0.0, 0.0), 0.5) - 1.0 / PI).abs() < 1e-15);
        assert!(xi(c(1e3, 0.0), 0.51) == 0.0);
        let want = (-1.0f64 / 1.02).exp() / (2.0 * PI * 0.51);
        assert!((xi(c(1.0, 0.0), 0.51) - want).abs() < 1e-15);
        assert!((xi(c(0.6, 0.8), 0.51) - want).abs() < 1e-15);
    }

    #[test]
    fn xi_integrates_to_one() {
        // polar quadrature: ∫ ξ dA = ∫ 2πr ξ(r) dr
        let s2 = 0.51;
        let dr = 1e-4;
        let total: f64 = (0..200_000)
            .map(|k| {
                let r = (k as f64 + 0.5) * dr;
                2.0 * PI * r * xi(c(r, 0.0), s2) * dr
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn zeta_values() {
        let s2 = 0.51;
        assert_eq!(zeta(c(0.0, 0.0), s2), 0.0);
        let r = (2.0 * s2 * 2f64.ln()).sqrt();
        assert!((zeta(c(r, 0.0), s2) - 0.5).abs() < 1e-15);
        assert_eq!(zeta(c(100.0, 0.0), s2), 1.0);
        for t in [c(0.3, 0.1), c(1.0, -2.0), c(0.0, 0.7)] {
            let alt = 1.0 - 2.0 * PI * s2 * xi(t, s2);
            assert!((zeta(t, s2) - alt).abs() < 1e-15);
        }
    }

    #[test]
    fn weight_schemes() {
        let y = Observations::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(WeightingScheme::Uniform.weights(&y).unwrap(), vec![1.0, 1.0]);
        let b = WeightingScheme::GaussianSmoothed { sigma_sq: 0.51 }.weights(&y).unwrap();
        assert!((b[0] - (1.0 - (-1.0f64 / 1.02).exp())).abs() < 1e-15);
        assert!((b[1] - (1.0 - (-4.0f64 / 1.02).exp())).abs() < 1e-15);
        let zero = Observations::new(vec![0.0; 3]).unwrap();
        assert_eq!(WeightingScheme::default().weights(&zero).unwrap(), vec![0.0; 3]);
        assert!(WeightingScheme::GaussianSmoothed { sigma_sq: 0.5 }.weights(&y).is_err());
    }

    #[test]
    fn psi_values() {
        assert!((psi(c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((psi(c(0.0, 1.0)) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((psi(c(1.0, 1.0)) - c(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(psi(c(0.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn h_values() {
        assert_eq!(h_closed_form(0.0), 0.0);
        assert!((h_closed_form(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((h_closed_form(1e4) - 1.0).abs() < 1e-7);
        let t5 = 1.0 - 1.0 / 25.0 + (-25.0f64).exp() / 25.0;
        assert!((h_closed_form(5.0) - t5).abs() < 1e-15);
    }

    #[test]
    fn h_series_and_closed_form_agree_at_switch() {
        let below = h_closed_form(1.0 - 1e-15);
        assert!((below - (-1.0f64).exp()).abs() < 1e-14);
        assert!((h_closed_form(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        let t = 1e-3;
        let u = t * t;
        let series = u / 2.0 - u * u / 6.0 + u * u * u / 24.0;
        assert!((h_closed_form(t) - series).abs() <= 1e-16 * series);
        assert!((h_closed_form(1e-5) - 0.5e-10).abs() < 1e-20);
    }

    #[test]
    fn eta_nu_values() {
        assert!((eta(c(0.0, 0.0), 1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((eta(c(50.0, 0.0), 0.51).unwrap() - 1.0).abs() < 1e-15);
        assert!((nu(c(50.0, 0.0), 0.51).unwrap() - 1.0).abs() < 1e-15);
        // σ² = 1: ν(0) = 1 − σ⁴/(σ²−½)² = −3
        assert!((nu(c(0.0, 0.0), 1.0).unwrap() + 3.0).abs() < 1e-14);
        assert!(matches!(eta(c(0.0, 0.0), 0.5), Err(Error::InvalidParameter(_))));
        assert!(matches!(nu(c(0.0, 0.0), 0.3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn delta_infty_bound_holds() {
        let d = delta_infty(0.51, 0.2, GridSpec::default()).unwrap();
        assert!(d <= 0.404 + 1e-3, "{d}");
        // the supremum is carried by the t → ∞ limit
        assert!((d - 0.404).abs() < 1e-12, "{d}");
    }

    #[test]
    fn delta_infty_grid_refinement() {
        let coarse = delta_infty(0.51, 0.2, GridSpec { t_max: 50.0, step: 2e-3 }).unwrap();
        let fine = delta_infty(0.51, 0.2, GridSpec { t_max: 50.0, step: 1e-3 }).unwrap();
        assert!((coarse - fine).abs() < 1e-4);
    }

    #[test]
    fn delta_infty_zero_epsilon_tail_vanishes() {
        // with ε = 0 the grid maximum comes from finite t only
        let base = delta_infty(0.51, 0.0, GridSpec::default()).unwrap();
        let far = (1.0 + 2.0 * 0.51) * (h_closed_form(50.0) - zeta_abs(50.0, 0.51)).abs();
        assert!(far < 1e-3);
        assert!(base > far);
    }
}
