use lambda_fwm_core::model::{amplitude_residuals, atomic_amplitudes, spectral_response};
use lambda_fwm_core::spectral::{
    conjugate_times, efficiency_trace, inverse_transform, transfer_matrix, transfer_matrix_from,
};
use lambda_fwm_core::{MediumParams, ProbePulse, SpectralGrid, SpectralSolver, TransferMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

fn rabi() -> impl Strategy<Value = Complex64> {
    (20.0..200.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, phase)| Complex64::from_polar(r, phase))
}

prop_compose! {
    fn medium()(
        omega12 in rabi(),
        omega13 in rabi(),
        delta in prop::array::uniform3(-10.0..10.0f64),
        gamma in prop::array::uniform3(0.5..5.0f64),
        kappa02 in 0.5..20.0f64,
        kappa03 in 0.5..20.0f64,
    ) -> MediumParams {
        MediumParams {
            omega12,
            omega13,
            delta1: delta[0],
            delta2: delta[1],
            delta3: delta[2],
            gamma1: gamma[0],
            gamma2: gamma[1],
            gamma3: gamma[2],
            kappa02,
            kappa03,
        }
    }
}

prop_compose! {
    fn lossless()(
        omega12 in 20.0..200.0f64,
        omega13 in 20.0..200.0f64,
        delta in prop::array::uniform3(-10.0..10.0f64),
        kappa02 in 0.5..20.0f64,
        kappa03 in 0.5..20.0f64,
    ) -> MediumParams {
        MediumParams {
            omega12: Complex64::new(omega12, 0.0),
            omega13: Complex64::new(omega13, 0.0),
            delta1: delta[0],
            delta2: delta[1],
            delta3: delta[2],
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            kappa02,
            kappa03,
        }
    }
}

fn amplitude() -> impl Strategy<Value = Complex64> {
    (1e-4..1e-2f64, 0.0..std::f64::consts::TAU).prop_map(|(r, phase)| Complex64::from_polar(r, phase))
}

fn max_diff(a: &TransferMatrix, b: &TransferMatrix) -> f64 {
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lambda_and_mean_identities(p in medium(), eta in -8.0..8.0f64) {
        let r = spectral_response(&p, eta).unwrap();
        let half = (r.k2 - r.k3) / 2.0;
        let rhs = half * half + r.s2 * r.s3;
        prop_assert!((r.lambda * r.lambda - rhs).norm() <= 1e-12 * rhs.norm().max(1e-300));
        prop_assert!((r.d_bar - (r.k2 + r.k3) / 2.0).norm() <= 1e-15 * r.d_bar.norm());
        prop_assert_eq!(spectral_response(&p, eta).unwrap(), r);
    }

    #[test]
    fn branch_invariance(p in medium(), eta in -8.0..8.0f64, z in 0.1..3.0f64) {
        let r = spectral_response(&p, eta).unwrap();
        let a = transfer_matrix_from(&r, z).unwrap();
        let b = transfer_matrix_from(&r.flipped_branch(), z).unwrap();
        prop_assert!(max_diff(&a, &b) <= 1e-13 * a.max_abs());
    }

    #[test]
    fn semigroup(p in medium(), eta in -8.0..8.0f64, z1 in 0.1..3.0f64, z2 in 0.1..3.0f64) {
        let whole = transfer_matrix(&p, eta, z1 + z2).unwrap();
        let parts = transfer_matrix(&p, eta, z2).unwrap().compose(&transfer_matrix(&p, eta, z1).unwrap());
        prop_assert!(max_diff(&whole, &parts) <= 1e-10 * whole.max_abs());
    }

    #[test]
    fn zero_distance_identity(p in medium(), eta in -8.0..8.0f64) {
        prop_assert_eq!(transfer_matrix(&p, eta, 0.0).unwrap(), TransferMatrix::identity());
    }

    #[test]
    fn lossless_weighted_flux_is_conserved(
        p in lossless(),
        eta in -8.0..8.0f64,
        z in 0.1..3.0f64,
        w in prop::array::uniform2((-1.0..1.0f64, -1.0..1.0f64)),
    ) {
        let Ok(t) = transfer_matrix(&p, eta, z) else { return Ok(()) };
        let (w20, w30) = (Complex64::new(w[0].0, w[0].1), Complex64::new(w[1].0, w[1].1));
        let flux = |a: Complex64, b: Complex64| a.norm_sqr() / p.kappa02 + b.norm_sqr() / p.kappa03;
        let (u20, u30) = t.apply(w20, w30);
        let before = flux(w20, w30);
        prop_assert!((flux(u20, u30) - before).abs() <= 1e-10 * before);
    }

    #[test]
    fn parseval_after_propagation(p in medium(), z in 0.1..3.0f64) {
        let solver = SpectralSolver::new(SpectralGrid::new(-16.0, 16.0, 1024).unwrap());
        let f = solver.field(&p, &ProbePulse::gaussian(Complex64::new(1.0, 0.0)), z).unwrap();
        let grid = f.grid;
        let times = conjugate_times(&grid, -40.0, grid.n_points());
        let tr = inverse_transform(&f, &times, Complex64::new(1.0, 0.0)).unwrap();
        let dt = times[1] - times[0];
        for (time, freq) in [(&tr.envelope20, &f.w20), (&tr.envelope30, &f.w30)] {
            let e_t: f64 = time.iter().map(|x| x.norm_sqr()).sum::<f64>() * dt;
            let e_w: f64 = freq.iter().map(|x| x.norm_sqr()).sum::<f64>() * grid.spacing();
            prop_assert!((e_t - e_w).abs() <= 1e-8 * e_w.max(1e-300));
        }
    }

    #[test]
    fn probe_linearity(p in medium(), z in 0.1..3.0f64, a in amplitude(), c in amplitude()) {
        let solver = SpectralSolver::new(SpectralGrid::new(-16.0, 16.0, 1024).unwrap());
        let times: Vec<f64> = (0..64).map(|k| -5.0 + 0.25 * k as f64).collect();
        let base = ProbePulse::gaussian(a);
        let scaled = ProbePulse::gaussian(a * c * 100.0);
        let one = solver.solve(&p, &base, z, &times).unwrap();
        let two = solver.solve(&p, &scaled, z, &times).unwrap();
        let (o1, o2) = (one.omega30(), two.omega30());
        let (p1, p2) = (one.omega20(), two.omega20());
        for k in 0..times.len() {
            prop_assert!((o1[k] * c * 100.0 - o2[k]).norm() <= 1e-14 * (o2[k].norm() + 1e-300) + 1e-300);
            prop_assert!((p1[k] * c * 100.0 - p2[k]).norm() <= 1e-14 * (p2[k].norm() + 1e-300) + 1e-300);
        }
        let e1 = efficiency_trace(&one, &p, &base).unwrap();
        let e2 = efficiency_trace(&two, &p, &scaled).unwrap();
        prop_assert_eq!(e1, e2);
    }

    #[test]
    fn back_substitution(p in medium(), eta in -8.0..8.0f64, w in prop::array::uniform2((-1.0..1.0f64, -1.0..1.0f64))) {
        let (w20, w30) = (Complex64::new(w[0].0, w[0].1), Complex64::new(w[1].0, w[1].1));
        let alpha = atomic_amplitudes(&p, eta, w20, w30).unwrap();
        let scale = w20.norm().max(w30.norm());
        for r in amplitude_residuals(&p, eta, alpha, w20, w30) {
            prop_assert!(r.norm() <= 1e-10 * scale);
        }
    }
}
