//! Brute-force time-domain solver used to check the spectral solution.
//!
//! Works in the retarded frame s = t − z (units τ, cτ), where the field
//! equations become ∂Ω/∂z = iκA at fixed s and the atomic equations become
//! ordinary differential equations in s:
//!
//! dA/ds = i(H A + f),  H = [[D₁, Ω₁₂, Ω₁₃], [Ω₂₁, D₂, 0], [Ω₃₁, 0, D₃]],
//! f = (0, Ω₂₀, Ω₃₀), Dᵢ = δᵢ + iγᵢ/2.
//!
//! Each z step solves the atomic equations over the whole s window with
//! classical RK4 and advances the fields with RK4 (or Heun) in z.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{spectral_response, MediumParams, ProbePulse};
use crate::spectral::{inverse_transform, SpectralSolver};
use crate::trace::EnvelopeTrace;

type C = Complex64;
type Mat3 = [[C; 3]; 3];

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Trailing s margin after the slowest group delay.
const TRAILING_MARGIN: f64 = 5.0;

/// Retarded-time window and step counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeGrid {
    pub z_steps: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub s_steps: usize,
}

impl SpaceTimeGrid {
    pub fn new(z_steps: usize, s_min: f64, s_max: f64, s_steps: usize) -> Result<Self> {
        let grid = Self { z_steps, s_min, s_max, s_steps };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Err(Error::InvalidParameter { field: "space_time_grid", reason });
        if self.z_steps < 8 {
            return invalid(format!("need at least 8 z steps, got {}", self.z_steps));
        }
        if self.s_steps < 64 {
            return invalid(format!("need at least 64 s steps, got {}", self.s_steps));
        }
        if !(self.s_min.is_finite() && self.s_max.is_finite() && self.s_min < self.s_max) {
            return invalid(format!("need finite s_min < s_max, got [{}, {}]", self.s_min, self.s_max));
        }
        Ok(())
    }

    pub fn ds(&self) -> f64 {
        (self.s_max - self.s_min) / self.s_steps as f64
    }

    pub fn s(&self, k: usize) -> f64 {
        self.s_min + self.ds() * k as f64
    }

    pub fn s_nodes(&self) -> Vec<f64> {
        (0..=self.s_steps).map(|k| self.s(k)).collect()
    }

    /// Half the step in both s and z.
    pub fn halved(&self) -> Self {
        Self { z_steps: 2 * self.z_steps, s_steps: 2 * self.s_steps, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZScheme {
    #[default]
    Rk4,
    /// Two-stage predictor-corrector.
    Heun,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub z_scheme: ZScheme,
    /// Explicit grid; chosen from the parameters when `None`.
    pub grid: Option<SpaceTimeGrid>,
    /// Run a half-grid solve and report the difference.
    pub richardson: bool,
    pub tolerance: f64,
    /// Largest relative growth of the weighted field energy per z step.
    pub max_energy_growth: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { z_scheme: ZScheme::Rk4, grid: None, richardson: true, tolerance: 1e-3, max_energy_growth: 1e-2 }
    }
}

/// Atomic amplitudes and fields over the s nodes at one z.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    pub a1: Vec<C>,
    pub a2: Vec<C>,
    pub a3: Vec<C>,
    pub omega20: Vec<C>,
    pub omega30: Vec<C>,
}

impl OracleState {
    /// Largest |A₁|² + |A₂|² + |A₃|² over the nodes.
    pub fn max_excitation(&self) -> f64 {
        (0..self.a1.len())
            .map(|k| self.a1[k].norm_sqr() + self.a2[k].norm_sqr() + self.a3[k].norm_sqr())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// Envelopes on t = s + z.
    pub trace: EnvelopeTrace,
    /// Peak-normalized difference against the half-grid solve (`None` when
    /// the check was not run). The returned trace is the finer solution.
    pub richardson_error: Option<f64>,
    /// Largest total excited-state population at the exit, including the
    /// probe amplitude.
    pub max_excitation: f64,
    pub grid: SpaceTimeGrid,
}

fn atomic_matrix(params: &MediumParams) -> Mat3 {
    [
        [C::new(params.delta1, params.gamma1 / 2.0), params.omega12, params.omega13],
        [params.omega21(), C::new(params.delta2, params.gamma2 / 2.0), ZERO],
        [params.omega31(), ZERO, C::new(params.delta3, params.gamma3 / 2.0)],
    ]
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[ZERO; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn mat_add(terms: &[(C, &Mat3)]) -> Mat3 {
    let mut out = [[ZERO; 3]; 3];
    for (w, m) in terms {
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += w * m[i][j];
            }
        }
    }
    out
}

fn identity() -> Mat3 {
    let mut m = [[ZERO; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

fn mat_vec(m: &Mat3, v: &[C; 3]) -> [C; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// One classical RK4 step of y' = Jy + g(s) written as the affine map
/// y⁺ = R y + C₀ g(s) + Cₘ g(s + h/2) + C₁ g(s + h).
#[derive(Debug, Clone, Copy)]
struct Rk4Map {
    r: Mat3,
    c0: Mat3,
    cm: Mat3,
    c1: Mat3,
}

impl Rk4Map {
    fn new(j: &Mat3, h: f64) -> Self {
        let id = identity();
        let hj = mat_add(&[(C::new(h, 0.0), j)]);
        let hj2 = mat_mul(&hj, &hj);
        let hj3 = mat_mul(&hj2, &hj);
        let hj4 = mat_mul(&hj3, &hj);
        let r = mat_add(&[
            (ONE, &id),
            (ONE, &hj),
            (C::new(0.5, 0.0), &hj2),
            (C::new(1.0 / 6.0, 0.0), &hj3),
            (C::new(1.0 / 24.0, 0.0), &hj4),
        ]);
        let w = C::new(h / 6.0, 0.0);
        let c0 = mat_add(&[(w, &id), (w, &hj), (w * 0.5, &hj2), (w * 0.25, &hj3)]);
        let cm = mat_add(&[(w * 4.0, &id), (w * 2.0, &hj), (w * 0.5, &hj2)]);
        let c1 = mat_add(&[(w, &id)]);
        Self { r, c0, cm, c1 }
    }

    #[cfg(test)]
    fn step(&self, y: &[C; 3], g0: &[C; 3], gm: &[C; 3], g1: &[C; 3]) -> [C; 3] {
        let parts = [mat_vec(&self.r, y), mat_vec(&self.c0, g0), mat_vec(&self.cm, gm), mat_vec(&self.c1, g1)];
        [0, 1, 2].map(|i| parts.iter().map(|p| p[i]).sum())
    }
}

/// Field value at the midpoint of interval k by cubic interpolation.
fn midpoint(f: &[[C; 2]], k: usize) -> [C; 2] {
    let n = f.len() - 1;
    let (idx, w): ([usize; 4], [f64; 4]) = if k == 0 {
        ([0, 1, 2, 3], [0.3125, 0.9375, -0.3125, 0.0625])
    } else if k == n - 1 {
        ([n - 3, n - 2, n - 1, n], [0.0625, -0.3125, 0.9375, 0.3125])
    } else {
        ([k - 1, k, k + 1, k + 2], [-0.0625, 0.5625, 0.5625, -0.0625])
    };
    [0, 1].map(|c| (0..4).map(|m| f[idx[m]][c] * w[m]).sum())
}

/// The RK4 map specialised to forcing (0, iΩ₂₀, iΩ₃₀).
struct Stepper {
    r: Mat3,
    /// Columns 2 and 3 of C₀ and Cₘ, times i.
    p0: [[C; 2]; 3],
    pm: [[C; 2]; 3],
    /// C₁ = (h/6)·identity, times i.
    w1: C,
    kappa: [f64; 2],
}

impl Stepper {
    fn new(params: &MediumParams, ds: f64) -> Self {
        let h = atomic_matrix(params);
        let j = mat_add(&[(I, &h)]);
        let map = Rk4Map::new(&j, ds);
        let pick = |m: &Mat3| [0, 1, 2].map(|i| [I * m[i][1], I * m[i][2]]);
        Self {
            r: map.r,
            p0: pick(&map.c0),
            pm: pick(&map.cm),
            w1: I * map.c1[0][0],
            kappa: [params.kappa02, params.kappa03],
        }
    }

    #[inline]
    fn step(&self, y: &[C; 3], f0: &[C; 2], fm: &[C; 2], f1: &[C; 2]) -> [C; 3] {
        let mut out = mat_vec(&self.r, y);
        for (i, o) in out.iter_mut().enumerate() {
            *o += self.p0[i][0] * f0[0] + self.p0[i][1] * f0[1] + self.pm[i][0] * fm[0] + self.pm[i][1] * fm[1];
        }
        out[1] += self.w1 * f1[0];
        out[2] += self.w1 * f1[1];
        out
    }

    /// Atomic amplitudes over all nodes driven by `fields`, starting from
    /// the ground state at the first node.
    fn atoms(&self, fields: &[[C; 2]]) -> Vec<[C; 3]> {
        let mut out = Vec::with_capacity(fields.len());
        let mut y = [ZERO; 3];
        out.push(y);
        for k in 0..fields.len() - 1 {
            y = self.step(&y, &fields[k], &midpoint(fields, k), &fields[k + 1]);
            out.push(y);
        }
        out
    }

    /// ∂Ω/∂z = iκA at every node, written into `out`.
    fn derivative(&self, fields: &[[C; 2]], out: &mut [[C; 2]]) {
        let gain = [I * self.kappa[0], I * self.kappa[1]];
        let mut y = [ZERO; 3];
        out[0] = [ZERO; 2];
        for k in 0..fields.len() - 1 {
            y = self.step(&y, &fields[k], &midpoint(fields, k), &fields[k + 1]);
            out[k + 1] = [gain[0] * y[1], gain[1] * y[2]];
        }
    }
}

fn weighted_energy(fields: &[[C; 2]], kappa: [f64; 2]) -> f64 {
    fields.iter().map(|f| (0..2).filter(|&c| kappa[c] > 0.0).map(|c| f[c].norm_sqr() / kappa[c]).sum::<f64>()).sum()
}

/// `out = base + scale·dir`, and `acc += acc_scale·dir`.
fn combine(base: &[[C; 2]], dir: &[[C; 2]], scale: f64, out: &mut [[C; 2]], acc: &mut [[C; 2]], acc_scale: f64) {
    for k in 0..base.len() {
        for c in 0..2 {
            out[k][c] = base[k][c] + dir[k][c] * scale;
            acc[k][c] += dir[k][c] * acc_scale;
        }
    }
}

struct March {
    fields: Vec<[C; 2]>,
    atoms: Vec<[C; 3]>,
}

fn march(
    params: &MediumParams,
    pulse: &ProbePulse,
    z: f64,
    grid: &SpaceTimeGrid,
    options: &OracleOptions,
) -> Result<March> {
    let stepper = Stepper::new(params, grid.ds());
    let mut fields: Vec<[C; 2]> = grid.s_nodes().iter().map(|&s| [pulse.shape_at(s), ZERO]).collect();
    let n = fields.len();
    let (mut slope, mut stage, mut acc) = (vec![[ZERO; 2]; n], vec![[ZERO; 2]; n], vec![[ZERO; 2]; n]);
    let dz = z / grid.z_steps as f64;
    let mut energy = weighted_energy(&fields, stepper.kappa);
    if dz > 0.0 {
        for step in 0..grid.z_steps {
            acc.copy_from_slice(&fields);
            match options.z_scheme {
                ZScheme::Rk4 => {
                    stepper.derivative(&fields, &mut slope);
                    combine(&fields, &slope, dz / 2.0, &mut stage, &mut acc, dz / 6.0);
                    stepper.derivative(&stage, &mut slope);
                    combine(&fields, &slope, dz / 2.0, &mut stage, &mut acc, dz / 3.0);
                    stepper.derivative(&stage, &mut slope);
                    combine(&fields, &slope, dz, &mut stage, &mut acc, dz / 3.0);
                    stepper.derivative(&stage, &mut slope);
                    combine(&fields, &slope, 0.0, &mut stage, &mut acc, dz / 6.0);
                }
                ZScheme::Heun => {
                    stepper.derivative(&fields, &mut slope);
                    combine(&fields, &slope, dz, &mut stage, &mut acc, dz / 2.0);
                    stepper.derivative(&stage, &mut slope);
                    combine(&fields, &slope, 0.0, &mut stage, &mut acc, dz / 2.0);
                }
            }
            std::mem::swap(&mut fields, &mut acc);
            let next = weighted_energy(&fields, stepper.kappa);
            let growth = if energy > 0.0 { next / energy - 1.0 } else { 0.0 };
            if growth > options.max_energy_growth || !next.is_finite() {
                return Err(Error::StepTooLarge { z: dz * (step + 1) as f64, growth });
            }
            energy = next;
        }
    }
    let atoms = stepper.atoms(&fields);
    Ok(March { fields, atoms })
}

/// Largest rate at which any frequency component of the fields changes
/// per unit distance: the spectral radius of diag(κ₀₂, κ₀₃)·G(ω) over real
/// ω, where G is the probe/generated block of (ω + H)⁻¹.
fn max_field_rate(params: &MediumParams) -> f64 {
    let h = atomic_matrix(params);
    let radius = |omega: f64| -> f64 {
        let mut m = h;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += omega;
        }
        let Some(inv) = inverse3(&m) else { return f64::INFINITY };
        let a = [
            [inv[1][1] * params.kappa02, inv[1][2] * params.kappa02],
            [inv[2][1] * params.kappa03, inv[2][2] * params.kappa03],
        ];
        let half_trace = (a[0][0] + a[1][1]) / 2.0;
        let root = (half_trace * half_trace - (a[0][0] * a[1][1] - a[0][1] * a[1][0])).sqrt();
        (half_trace + root).norm().max((half_trace - root).norm())
    };
    let scale = h.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt() + 1.0;
    let width = [params.gamma1, params.gamma2, params.gamma3].into_iter().fold(f64::INFINITY, f64::min);
    let step = (width / 4.0).max(1e-3);
    let n = (2.0 * scale / step).ceil() as usize;
    let samples: Vec<(f64, f64)> = (0..=n)
        .map(|k| {
            let omega = -scale + step * k as f64;
            (omega, radius(omega))
        })
        .collect();
    let mut best = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    for k in 1..samples.len() - 1 {
        if samples[k].1 >= samples[k - 1].1 && samples[k].1 >= samples[k + 1].1 {
            let (mut lo, mut hi) = (samples[k - 1].0, samples[k + 1].0);
            for _ in 0..60 {
                let a = lo + (hi - lo) / 3.0;
                let b = hi - (hi - lo) / 3.0;
                if radius(a) < radius(b) {
                    lo = a;
                } else {
                    hi = b;
                }
            }
            best = best.max(radius((lo + hi) / 2.0));
        }
    }
    best
}

fn inverse3(m: &Mat3) -> Option<Mat3> {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    if det.norm() == 0.0 {
        return None;
    }
    Some(adj.map(|row| row.map(|x| x / det)))
}

/// Extra retarded delay of the slowest non-attenuated propagation mode
/// over the band |η| ≤ 3, from the slope of Re λ(η).
fn max_group_delay(params: &MediumParams, z: f64) -> f64 {
    let modes = |eta: f64| -> Option<[C; 2]> {
        let r = spectral_response(params, eta).ok()?;
        Some([r.d_bar - eta + r.lambda, r.d_bar - eta - r.lambda])
    };
    let h = 1e-4;
    let mut delay: f64 = 0.0;
    for k in 0..=60 {
        let eta = -3.0 + 0.1 * k as f64;
        let (Some(lo), Some(mid), Some(hi)) = (modes(eta - h), modes(eta), modes(eta + h)) else {
            continue;
        };
        for m in mid {
            if (-m.im * z).exp() < 1e-6 {
                continue;
            }
            let near = |pair: [C; 2]| if (pair[0] - m).norm() <= (pair[1] - m).norm() { pair[0] } else { pair[1] };
            let slope = (near(hi) - near(lo)).re / (2.0 * h);
            delay = delay.max(slope * z);
        }
    }
    delay
}

/// Grid resolving the fastest Rabi oscillation in s and keeping RK4 in z
/// inside its stability region.
pub fn auto_grid(params: &MediumParams, pulse: &ProbePulse, z: f64) -> SpaceTimeGrid {
    let fastest = [
        params.omega12.norm(),
        params.omega13.norm(),
        params.delta1.abs(),
        params.delta2.abs(),
        params.delta3.abs(),
        1.0,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let ds_max = 0.1 / fastest;
    let (start, end) = pulse.support();
    let s_max = end + max_group_delay(params, z) + TRAILING_MARGIN;
    let s_steps = (((s_max - start) / ds_max).ceil() as usize).max(64);
    let rate = max_field_rate(params);
    let z_steps = ((z * rate / 2.0).ceil() as usize).max(8);
    SpaceTimeGrid { z_steps, s_min: start, s_max, s_steps }
}

fn to_trace(grid: &SpaceTimeGrid, z: f64, fields: &[[C; 2]], amplitude: C) -> EnvelopeTrace {
    EnvelopeTrace {
        times: grid.s_nodes().iter().map(|s| s + z).collect(),
        z,
        probe_amplitude: amplitude,
        envelope20: fields.iter().map(|f| f[0]).collect(),
        envelope30: fields.iter().map(|f| f[1]).collect(),
    }
}

/// Time-domain solution on an explicit grid, without the convergence check.
pub fn oracle_solve(params: &MediumParams, pulse: &ProbePulse, z: f64, grid: SpaceTimeGrid) -> Result<EnvelopeTrace> {
    let options = OracleOptions { grid: Some(grid), richardson: false, ..OracleOptions::default() };
    Ok(Oracle::new(options).solve(params, pulse, z)?.trace)
}

/// Atomic amplitudes and fields at distance `z` on the given grid.
pub fn oracle_state(params: &MediumParams, pulse: &ProbePulse, z: f64, grid: SpaceTimeGrid) -> Result<OracleState> {
    params.validate()?;
    pulse.validate()?;
    grid.validate()?;
    let m = march(params, &pulse.unit(), z, &grid, &OracleOptions::default())?;
    let a = pulse.amplitude;
    Ok(OracleState {
        a1: m.atoms.iter().map(|x| x[0] * a).collect(),
        a2: m.atoms.iter().map(|x| x[1] * a).collect(),
        a3: m.atoms.iter().map(|x| x[2] * a).collect(),
        omega20: m.fields.iter().map(|f| f[0] * a).collect(),
        omega30: m.fields.iter().map(|f| f[1] * a).collect(),
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Oracle {
    pub options: OracleOptions,
}

impl Oracle {
    pub fn new(options: OracleOptions) -> Self {
        Self { options }
    }

    pub fn solve(&self, params: &MediumParams, pulse: &ProbePulse, z: f64) -> Result<OracleReport> {
        params.validate()?;
        pulse.validate()?;
        if !(z.is_finite() && z >= 0.0) {
            return Err(Error::InvalidParameter { field: "z", reason: format!("must be finite and >= 0, got {z}") });
        }
        params.check_weak_probe(pulse);
        let unit = pulse.unit();
        let grid = self.options.grid.unwrap_or_else(|| auto_grid(params, &unit, z));
        grid.validate()?;
        log::debug!("oracle grid: {grid:?}");

        let (result, grid, richardson_error) = if self.options.richardson {
            let fine_grid = grid.halved();
            let (coarse, fine) = rayon::join(
                || march(params, &unit, z, &grid, &self.options),
                || march(params, &unit, z, &fine_grid, &self.options),
            );
            let (coarse, fine) = (coarse?, fine?);
            let peak = fine.fields.iter().flat_map(|f| f.iter().map(|x| x.norm())).fold(0.0, f64::max);
            let diff = coarse
                .fields
                .iter()
                .zip(fine.fields.iter().step_by(2))
                .flat_map(|(a, b)| [(a[0] - b[0]).norm(), (a[1] - b[1]).norm()])
                .fold(0.0, f64::max);
            let error = if peak > 0.0 { diff / peak } else { 0.0 };
            if error > self.options.tolerance {
                return Err(Error::NotConverged { error, tolerance: self.options.tolerance });
            }
            (fine, fine_grid, Some(error))
        } else {
            (march(params, &unit, z, &grid, &self.options)?, grid, None)
        };

        let max_excitation =
            result.atoms.iter().map(|a| a.iter().map(|x| x.norm_sqr()).sum::<f64>()).fold(0.0, f64::max)
                * pulse.amplitude.norm_sqr();
        if max_excitation > 1.0 {
            log::warn!("excited population {max_excitation:.3} exceeds 1: weak-probe treatment is invalid");
        }
        Ok(OracleReport {
            trace: to_trace(&grid, z, &result.fields, ONE).with_amplitude(pulse.amplitude),
            richardson_error,
            max_excitation,
            grid,
        })
    }
}

/// Difference of one channel between two solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelError {
    pub max_abs: f64,
    /// ‖a − b‖₂ / ‖b‖₂ with the oracle as reference; 0 when both vanish.
    pub relative_l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverComparison {
    pub omega20: ChannelError,
    pub omega30: ChannelError,
    pub times: Vec<f64>,
    pub richardson_error: Option<f64>,
}

fn channel_error(a: &[C], reference: &[C]) -> ChannelError {
    let max_abs = a.iter().zip(reference).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let diff: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).norm_sqr()).sum();
    let norm: f64 = reference.iter().map(|y| y.norm_sqr()).sum();
    let relative_l2 = match (diff, norm) {
        (0.0, _) => 0.0,
        (_, 0.0) => f64::INFINITY,
        (d, n) => (d / n).sqrt(),
    };
    ChannelError { max_abs, relative_l2 }
}

/// Runs the oracle and the spectral solver and compares them on the
/// oracle's time nodes, thinned to about 2000 samples.
pub fn compare_solvers(
    params: &MediumParams,
    pulse: &ProbePulse,
    z: f64,
    oracle: &Oracle,
    spectral: &SpectralSolver,
) -> Result<SolverComparison> {
    let report = oracle.solve(params, pulse, z)?;
    let stride = (report.trace.len() / 2000).max(1);
    let pick = |v: &[C]| -> Vec<C> { v.iter().step_by(stride).copied().collect() };
    let times: Vec<f64> = report.trace.times.iter().step_by(stride).copied().collect();
    let field = spectral.field(params, pulse, z)?;
    let spectral_trace = inverse_transform(&field, &times, ONE)?.with_amplitude(pulse.amplitude);
    let reference = (pick(&report.trace.omega20()), pick(&report.trace.omega30()));
    Ok(SolverComparison {
        omega20: channel_error(&spectral_trace.omega20(), &reference.0),
        omega30: channel_error(&spectral_trace.omega30(), &reference.1),
        times,
        richardson_error: report.richardson_error,
    })
}
