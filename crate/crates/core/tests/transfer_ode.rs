//! The closed-form transfer matrix against direct integration of
//! dW/dz = iM(η)W.

use lambda_fwm_core::model::spectral_response;
use lambda_fwm_core::spectral::transfer_matrix;
use lambda_fwm_core::{presets, MediumParams};
use num_complex::Complex64;

type V = [Complex64; 2];

fn integrate(m: [[Complex64; 2]; 2], w0: V, z: f64, steps: usize) -> V {
    let i = Complex64::i();
    let f = |w: &V| [i * (m[0][0] * w[0] + m[0][1] * w[1]), i * (m[1][0] * w[0] + m[1][1] * w[1])];
    let h = z / steps as f64;
    let mut w = w0;
    for _ in 0..steps {
        let k1 = f(&w);
        let k2 = f(&[w[0] + k1[0] * (h / 2.0), w[1] + k1[1] * (h / 2.0)]);
        let k3 = f(&[w[0] + k2[0] * (h / 2.0), w[1] + k2[1] * (h / 2.0)]);
        let k4 = f(&[w[0] + k3[0] * h, w[1] + k3[1] * h]);
        w = [0, 1].map(|c| w[c] + (k1[c] + (k2[c] + k3[c]) * 2.0 + k4[c]) * (h / 6.0));
    }
    w
}

fn check(params: &MediumParams, eta: f64, z: f64) {
    let m = spectral_response(params, eta).unwrap().generator();
    let t = transfer_matrix(params, eta, z).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    for (input, column) in [([one, zero], [t.t11, t.t21]), ([zero, one], [t.t12, t.t22])] {
        let coarse = integrate(m, input, z, 20_000);
        let fine = integrate(m, input, z, 40_000);
        let scale = fine[0].norm().max(fine[1].norm());
        for c in 0..2 {
            assert!((coarse[c] - fine[c]).norm() < 1e-11 * scale, "reference not converged");
            let err = (column[c] - fine[c]).norm() / scale;
            assert!(err < 1e-8, "eta {eta} z {z}: relative error {err:e}");
        }
    }
}

#[test]
fn fig2a_at_optimal_distance() {
    for eta in [-4.0, -1.0, 0.0, 0.5, 3.0] {
        check(&presets::fig2a(), eta, 3.927);
    }
}

#[test]
fn fig2b_and_resonant_media() {
    for eta in [-2.0, 0.0, 2.0] {
        check(&presets::fig2b(), eta, 1.963);
        check(&presets::resonant_dark_state(), eta, 1.0);
    }
}
