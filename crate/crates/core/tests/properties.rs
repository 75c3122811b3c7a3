mod common;

use common::{gaussian, unit};
use convpr_core::initialization::power_method;
use convpr_core::operators::{dist_mod_phase, norm, phase_unit};
use convpr_core::rng::stream;
use convpr_core::solver::{gd_solve, wirtinger_gradient, SolverConfig, StepPolicy};
use convpr_core::weighting::{psi, zeta_abs, WeightingScheme};
use convpr_core::{ComplexVector, ConvolutionalMeasurement, DenseMeasurement, MeasurementOperator, C64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn zeta_is_monotone_and_bounded(r1 in 0.0f64..20.0, dr in 0.0f64..5.0, s2 in 0.51f64..10.0) {
        let a = zeta_abs(r1, s2);
        let b = zeta_abs(r1 + dr, s2);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(a <= b);
    }

    #[test]
    fn psi_has_unit_modulus(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        prop_assert!((psi(C64::new(re, im)).norm() - 1.0).abs() < 1e-12);
        prop_assert!((phase_unit(C64::new(re, im)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dist_is_phase_invariant_and_bounded(seed in any::<u64>(), n in 1usize..16, phi in -3.2f64..3.2) {
        let x = gaussian(seed, n);
        let z = gaussian(seed ^ 9, n);
        let rot: Vec<C64> = z.iter().map(|c| c * C64::from_polar(1.0, phi)).collect();
        let d = dist_mod_phase(&z, &x).unwrap();
        prop_assert!((d - dist_mod_phase(&rot, &x).unwrap()).abs() < 1e-10);
        let plain: Vec<C64> = z.iter().zip(&x).map(|(a, b)| a - b).collect();
        prop_assert!(d <= norm(&plain) + 1e-12);
        prop_assert!(d + 1e-12 >= (norm(&z) - norm(&x)).abs());
    }

    #[test]
    fn gradient_is_phase_equivariant(seed in any::<u64>(), n in 2usize..12, phi in -3.2f64..3.2) {
        let m = 4 * n;
        let op = ConvolutionalMeasurement::new(ComplexVector::new(gaussian(seed, m)).unwrap(), n).unwrap();
        let x = unit(gaussian(seed ^ 1, n));
        let y = op.measure(&x).unwrap();
        let b = WeightingScheme::default().weights(&y).unwrap();
        let z = gaussian(seed ^ 2, n);
        let w = C64::from_polar(1.0, phi);
        let rot: Vec<C64> = z.iter().map(|c| c * w).collect();
        let g = wirtinger_gradient(&op, &y, &b, &z).unwrap();
        let gr = wirtinger_gradient(&op, &y, &b, &rot).unwrap();
        for (a, b) in g.iter().zip(gr.iter()) {
            prop_assert!((a * w - b).norm() <= 1e-10 * (1.0 + g.norm()));
        }
    }

    #[test]
    fn rayleigh_quotients_increase_for_psd(seed in any::<u64>(), n in 2usize..10) {
        // B = G*G is Hermitian PSD.
        let g = DenseMeasurement::new(n + 3, n, gaussian(seed, (n + 3) * n)).unwrap();
        let pm = power_method(
            |v, out| {
                let gv = g.forward(v)?;
                g.adjoint_into(&gv, out)
            },
            n,
            50,
            0.0,
            &mut stream(seed ^ 7),
        )
        .unwrap();
        for w in pm.rayleigh_history.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-12), "{:?}", pm.rayleigh_history);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn backtracking_never_increases_the_objective(seed in any::<u64>(), n in 4usize..16) {
        let m = 6 * n;
        let op = ConvolutionalMeasurement::new(ComplexVector::new(gaussian(seed, m)).unwrap(), n).unwrap();
        let x = unit(gaussian(seed ^ 1, n));
        let y = op.measure(&x).unwrap();
        let z0 = gaussian(seed ^ 2, n);
        let cfg = SolverConfig {
            step_policy: StepPolicy::backtracking(),
            max_iters: 200,
            record_trajectory: true,
            ..SolverConfig::default()
        };
        let res = gd_solve(&op, &y, &z0, &cfg, Some(&x)).unwrap();
        let traj = res.trajectory.unwrap();
        for w in traj.windows(2) {
            prop_assert!(w[1].objective <= w[0].objective);
        }
    }
}
