use lambda_fwm_core::analytic::optimal_distance;
use lambda_fwm_core::oracle::{auto_grid, compare_solvers, Oracle, OracleOptions, SpaceTimeGrid, ZScheme};
use lambda_fwm_core::spectral::efficiency_trace;
use lambda_fwm_core::{presets, MediumParams, ProbePulse, SpectralSolver};
use num_complex::Complex64;

fn probe() -> ProbePulse {
    ProbePulse::gaussian(Complex64::new(1e-3, 0.0))
}

fn agree(params: MediumParams, z: f64) {
    let cmp = compare_solvers(&params, &probe(), z, &Oracle::default(), &SpectralSolver::default()).unwrap();
    assert!(cmp.omega20.relative_l2 <= 1e-2, "{cmp:?}");
    assert!(cmp.omega30.relative_l2 <= 1e-2, "{cmp:?}");
}

#[test]
fn fig2a_medium() {
    let p = presets::fig2a();
    let z = optimal_distance(&p).unwrap();
    let pulse = probe();
    let report = Oracle::default().solve(&p, &pulse, z).unwrap();
    let oracle_peak = efficiency_trace(&report.trace, &p, &pulse).unwrap().peak;
    let spectral = SpectralSolver::default().solve(&p, &pulse, z, &report.trace.times).unwrap();
    let spectral_peak = efficiency_trace(&spectral, &p, &pulse).unwrap().peak;
    assert!((oracle_peak - spectral_peak).abs() < 0.02);
    agree(p, z);
}

#[test]
fn fig2b_medium() {
    let p = presets::fig2b();
    agree(p, optimal_distance(&p).unwrap());
}

#[test]
fn resonant_medium_agrees_and_locks_ratio() {
    let p = presets::resonant_dark_state();
    agree(p, 10.0);

    let report = Oracle::default().solve(&p, &probe(), 10.0).unwrap();
    let (o20, o30) = (report.trace.omega20(), report.trace.omega30());
    let peak = |v: &[Complex64]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let (p20, p30) = (peak(&o20), peak(&o30));
    let mut checked = 0;
    for k in 0..o20.len() {
        if o20[k].norm() > 1e-4 * p20 && o30[k].norm() > 1e-4 * p30 {
            let ratio = o20[k] / o30[k];
            assert!((ratio - 0.25).norm() < 1e-4 * 0.25, "ratio {ratio} at t = {}", report.trace.times[k]);
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn richardson_error_falls_at_fourth_order() {
    let p = presets::resonant_dark_state();
    let base = SpaceTimeGrid { z_steps: 40, s_steps: 400, ..auto_grid(&p, &probe(), 0.5) };
    let error = |grid: SpaceTimeGrid| {
        let options = OracleOptions { grid: Some(grid), tolerance: 1.0, ..OracleOptions::default() };
        Oracle::new(options).solve(&p, &probe(), 0.5).unwrap().richardson_error.unwrap()
    };
    let (coarse, fine) = (error(base), error(base.halved()));
    assert!(coarse / fine >= 8.0, "coarse {coarse:e}, fine {fine:e}");
}

#[test]
fn heun_converges_at_second_order() {
    let p = presets::resonant_dark_state();
    let base = SpaceTimeGrid { z_steps: 100, s_steps: 400, ..auto_grid(&p, &probe(), 0.5) };
    let error = |grid: SpaceTimeGrid| {
        let options =
            OracleOptions { grid: Some(grid), tolerance: 1.0, z_scheme: ZScheme::Heun, ..OracleOptions::default() };
        Oracle::new(options).solve(&p, &probe(), 0.5).unwrap().richardson_error.unwrap()
    };
    let (coarse, fine) = (error(base), error(base.halved()));
    assert!(coarse / fine >= 3.5, "coarse {coarse:e}, fine {fine:e}");
}

#[test]
fn oracle_is_linear_in_probe() {
    let p = presets::fig2b();
    let grid = SpaceTimeGrid { z_steps: 16, s_steps: 4000, s_min: -5.0, s_max: 5.0 };
    let options = OracleOptions { grid: Some(grid), richardson: false, ..OracleOptions::default() };
    let a = Complex64::new(1e-3, 2e-4);
    let one = Oracle::new(options).solve(&p, &ProbePulse::gaussian(a), 0.05).unwrap();
    let two = Oracle::new(options).solve(&p, &ProbePulse::gaussian(a * 2.0), 0.05).unwrap();
    assert_eq!(one.trace.envelope30, two.trace.envelope30);
    for (x, y) in one.trace.omega30().iter().zip(two.trace.omega30()) {
        assert_eq!(x * 2.0, y);
    }
}
