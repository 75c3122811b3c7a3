mod common;

use common::{gaussian, unit};
use convpr_core::harness::{
    gen_kernel, gen_signal, solve_instance, trial_instance, Algorithm, ExperimentConfig, SignalPattern,
};
use convpr_core::initialization::{norm_estimate, power_method, spectral_init, InitOptions};
use convpr_core::lemma_verify::dense_leading_eigenpair;
use convpr_core::operators::{dist_mod_phase, inner};
use convpr_core::rng::{mix_seed, stream};
use convpr_core::solver::{SolverConfig, StepPolicy};
use convpr_core::weighting::WeightingScheme;
use convpr_core::{ConvolutionalMeasurement, DenseMeasurement, MeasurementOperator, C64};
use nalgebra::DMatrix;

fn desk_config(trials: usize) -> ExperimentConfig {
    let n = 64;
    let m = 8 * n * (n as f64).ln().ceil() as usize;
    ExperimentConfig {
        n,
        ratios: vec![m as f64 / n as f64],
        trials,
        base_seed: 0x5eed,
        patterns: vec![SignalPattern::UniformSphere],
        ..Default::default()
    }
}

fn successes(cfg: &ExperimentConfig) -> usize {
    (0..cfg.trials)
        .filter(|&t| {
            let inst = trial_instance(cfg, &cfg.patterns[0], 0, t).unwrap();
            solve_instance(cfg, &inst)
                .map(|r| r.final_dist.unwrap() <= cfg.solver.success_tol)
                .unwrap_or(false)
        })
        .count()
}

#[test]
fn spectral_init_lands_near_the_orbit() {
    let n = 32;
    let m = n * (n as f64).ln().ceil() as usize * 8;
    let mut dists: Vec<f64> = (0..100)
        .map(|t| {
            let seed = mix_seed(77, &[t]);
            let x = gen_signal(&SignalPattern::UniformSphere, n, &mut stream(mix_seed(seed, &[1]))).unwrap();
            let op = ConvolutionalMeasurement::new(gen_kernel(m, &mut stream(mix_seed(seed, &[2]))).unwrap(), n)
                .unwrap();
            let y = op.measure(&x).unwrap();
            let init = spectral_init(&op, &y, InitOptions::default(), &mut stream(mix_seed(seed, &[3]))).unwrap();
            assert!((init.eigvec.norm() - 1.0).abs() < 1e-10);
            dist_mod_phase(&init.z0, &x).unwrap()
        })
        .collect();
    dists.sort_by(f64::total_cmp);
    let median = 0.5 * (dists[49] + dists[50]);
    println!("median init dist {median:.4}");
    assert!(median < 0.7, "median {median}");
}

#[test]
fn norm_estimate_is_unbiased_in_square() {
    let n = 16;
    let m = 64;
    let x = unit(gaussian(3, n));
    let samples: Vec<f64> = (0..10_000)
        .map(|t| {
            let op = ConvolutionalMeasurement::new(gen_kernel(m, &mut stream(mix_seed(4, &[t]))).unwrap(), n)
                .unwrap();
            norm_estimate(&op.measure(&x).unwrap()).powi(2)
        })
        .collect();
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let se = (var / k).sqrt();
    assert!((mean - 1.0).abs() <= 4.0 * se, "mean {mean} se {se}");
}

#[test]
fn power_method_matches_dense_eigensolver() {
    for seed in 0..5 {
        let n = 8;
        let g = DenseMeasurement::new(12, n, gaussian(seed, 12 * n)).unwrap();
        let mut dense = DMatrix::<C64>::zeros(n, n);
        for j in 0..n {
            let col = g.adjoint(&g.forward(&convpr_core::ComplexVector::basis(n, j)).unwrap()).unwrap();
            for i in 0..n {
                dense[(i, j)] = col[i];
            }
        }
        let dense = (&dense + dense.adjoint()) * C64::new(0.5, 0.0);
        let (v_ref, l_ref) = dense_leading_eigenpair(&dense).unwrap();
        let pm = power_method(
            |v, out| {
                let gv = g.forward(v)?;
                g.adjoint_into(&gv, out)
            },
            n,
            5000,
            1e-15,
            &mut stream(seed + 100),
        )
        .unwrap();
        assert!((pm.eigval - l_ref).abs() <= 1e-6 * l_ref);
        assert!(inner(&pm.eigvec, &v_ref).norm() > 1.0 - 1e-6);
    }
}

#[test]
fn adm_baseline_succeeds_in_the_desk_regime() {
    let cfg = ExperimentConfig {
        algorithm: Algorithm::Adm,
        ..desk_config(100)
    };
    let s = successes(&cfg);
    println!("ADM successes {s}/100");
    assert!(s >= 90, "{s}/100");
}

#[test]
fn uniform_weights_with_backtracking_track_zeta_weights() {
    let zeta = desk_config(100);
    let uniform = ExperimentConfig {
        solver: SolverConfig {
            weighting: WeightingScheme::Uniform,
            step_policy: StepPolicy::backtracking(),
            ..zeta.solver
        },
        ..zeta.clone()
    };
    let a = successes(&zeta);
    let b = successes(&uniform);
    println!("zeta {a}/100, uniform {b}/100");
    assert!(a.abs_diff(b) <= 10, "zeta {a} uniform {b}");
}
