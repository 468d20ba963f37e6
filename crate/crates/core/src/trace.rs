use num_complex::Complex64;

/// Complex field envelopes at a fixed propagation distance z (in cτ).
///
/// Envelopes are stored relative to the entrance probe amplitude Ω₂₀(0,0);
/// [`omega20`](Self::omega20) and [`omega30`](Self::omega30) give Ωτ.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeTrace {
    /// t/τ in the laboratory frame.
    pub times: Vec<f64>,
    pub z: f64,
    pub probe_amplitude: Complex64,
    pub envelope20: Vec<Complex64>,
    pub envelope30: Vec<Complex64>,
}

impl EnvelopeTrace {
    pub fn omega20(&self) -> Vec<Complex64> {
        self.envelope20.iter().map(|e| e * self.probe_amplitude).collect()
    }

    pub fn omega30(&self) -> Vec<Complex64> {
        self.envelope30.iter().map(|e| e * self.probe_amplitude).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn with_amplitude(mut self, probe_amplitude: Complex64) -> Self {
        self.probe_amplitude = probe_amplitude;
        self
    }
}

/// Photon-flux conversion efficiency F_m/F_p against t/τ.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyTrace {
    pub times: Vec<f64>,
    pub efficiency: Vec<f64>,
    pub peak: f64,
    pub peak_time: f64,
}

impl EfficiencyTrace {
    /// Peak is the maximum over the samples; no interpolation.
    pub fn from_samples(times: Vec<f64>, efficiency: Vec<f64>) -> Self {
        assert_eq!(times.len(), efficiency.len());
        let (peak, peak_time) =
            times.iter().zip(&efficiency).fold((f64::NEG_INFINITY, f64::NAN), |(best, at), (&t, &e)| {
                if e > best {
                    (e, t)
                } else {
                    (best, at)
                }
            });
        Self { times, efficiency, peak, peak_time }
    }
}

/// `n` evenly spaced points on [min, max].
pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (n - 1) as f64;
            (0..n).map(|k| min + step * k as f64).collect()
        }
    }
}
