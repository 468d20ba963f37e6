//! Datasets for the reference figures: efficiency against retarded time,
//! one curve per parameter value, plus a peak table.

use std::collections::BTreeMap;

use clap::ValueEnum;
use lambda_fwm_core::analytic::{default_time_grid, optimal_distance};
use lambda_fwm_core::{presets, MediumParams};
use serde::Serialize;

use crate::config::{DistanceConfig, Format, RunConfig, Solver, TimeGridConfig};
use crate::error::CliResult;
use crate::output::{csv_error, finish_csv};
use crate::run::{execute, Dataset, Peak};

/// Samples per curve on the shared retarded-time axis.
const CURVE_SAMPLES: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "lowercase")]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
            Self::Fig4 => "fig4",
        }
    }

    /// Name of the varied quantity and the media, one per curve.
    pub fn curves(self) -> (&'static str, Vec<(f64, MediumParams)>) {
        let base = presets::fig2a();
        match self {
            Self::Fig2a => ("delta2_tau", vec![(20.0, base)]),
            Self::Fig2b => ("delta2_tau", vec![(10.0, presets::fig2b())]),
            Self::Fig3a => {
                ("delta2_tau", [10.0, 20.0, 40.0, 60.0].map(|d| (d, MediumParams { delta2: d, ..base })).to_vec())
            }
            Self::Fig3b => {
                ("delta3_tau", [10.0, 20.0, 40.0, 60.0].map(|d| (d, MediumParams { delta3: d, ..base })).to_vec())
            }
            Self::Fig4 => (
                "rabi_ratio_sq",
                [1.0, 0.5, 0.25, 0.1]
                    .map(|r: f64| (r, MediumParams { omega13: base.omega12 * r.sqrt(), ..base }))
                    .to_vec(),
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub value: f64,
    pub dataset: Dataset,
}

#[derive(Debug, Clone)]
pub struct FigureData {
    pub figure: Figure,
    pub parameter: &'static str,
    /// (t − z/c)/τ, shared by every curve.
    pub retarded: Vec<f64>,
    pub curves: Vec<Curve>,
}

impl FigureData {
    pub fn peak(&self, value: f64, solver: Solver) -> Option<f64> {
        let curve = self.curves.iter().find(|c| c.value == value)?;
        Some(curve.dataset.output(solver)?.efficiency.peak)
    }
}

/// Runs each curve at its optimal distance on a common retarded-time axis.
pub fn figure_data(figure: Figure, solvers: &[Solver], stamp: bool) -> CliResult<FigureData> {
    let (parameter, media) = figure.curves();
    let mut s_max = f64::NEG_INFINITY;
    let mut s_min = f64::INFINITY;
    for (_, params) in &media {
        let z = optimal_distance(params)?;
        let times = default_time_grid(params, z);
        s_min = s_min.min(times[0] - z);
        s_max = s_max.max(times[times.len() - 1] - z);
    }
    let mut curves = Vec::new();
    for (value, params) in media {
        let mut config = RunConfig::from_medium(&params, DistanceConfig::Keyword("auto".into()), solvers.to_vec());
        let z = config.resolve_distance(&params)?;
        config.time_grid = Some(TimeGridConfig { t_min_tau: s_min + z, t_max_tau: s_max + z, n: CURVE_SAMPLES });
        let run = config.resolve()?;
        log::info!("{} curve {parameter}={value} at z={z}", figure.name());
        let dataset = execute(&run, stamp)?;
        curves.push(Curve { label: format!("{parameter}={value}"), value, dataset });
    }
    let retarded = curves[0].dataset.retarded_times();
    Ok(FigureData { figure, parameter, retarded, curves })
}

/// Efficiency traces: one column per curve and solver.
pub fn curves_csv(data: &FigureData) -> CliResult<String> {
    let mut head = format!("# figure = {}\n# parameter = {}\n", data.figure.name(), data.parameter);
    for c in &data.curves {
        let config = serde_json::to_string(&c.dataset.metadata.config).expect("plain data always serializes");
        head.push_str(&format!("# curve {} = {}\n", c.label, config));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t_minus_z_over_tau".to_string()];
    for c in &data.curves {
        for o in &c.dataset.outputs {
            header.push(format!("{}_{}_efficiency", c.label, o.solver.name()));
        }
    }
    writer.write_record(&header).map_err(csv_error)?;
    for (k, s) in data.retarded.iter().enumerate() {
        let mut row = vec![s.to_string()];
        for c in &data.curves {
            row.extend(c.dataset.outputs.iter().map(|o| o.efficiency.efficiency[k].to_string()));
        }
        writer.write_record(&row).map_err(csv_error)?;
    }
    finish_csv(writer, head)
}

/// One row per curve and solver.
pub fn peaks_csv(data: &FigureData) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "parameter",
            "value",
            "z_over_c_tau",
            "z_cm",
            "solver",
            "peak_efficiency",
            "peak_t_minus_z_over_tau",
        ])
        .map_err(csv_error)?;
    for c in &data.curves {
        let meta = &c.dataset.metadata;
        for o in &c.dataset.outputs {
            let peak = &meta.peaks[o.solver.name()];
            writer
                .write_record([
                    data.parameter.to_string(),
                    c.value.to_string(),
                    meta.z_over_c_tau.to_string(),
                    meta.z_cm.to_string(),
                    o.solver.name().to_string(),
                    peak.efficiency.to_string(),
                    peak.t_minus_z_over_tau.to_string(),
                ])
                .map_err(csv_error)?;
        }
    }
    finish_csv(writer, String::new())
}

#[derive(Serialize)]
struct CurveJson<'a> {
    label: &'a str,
    value: f64,
    z_over_c_tau: f64,
    z_cm: f64,
    config: &'a RunConfig,
    efficiency: BTreeMap<&'static str, &'a [f64]>,
    peaks: &'a BTreeMap<String, Peak>,
}

#[derive(Serialize)]
struct FigureJson<'a> {
    figure: &'static str,
    parameter: &'static str,
    t_minus_z_over_tau: &'a [f64],
    curves: Vec<CurveJson<'a>>,
}

pub fn to_json(data: &FigureData) -> String {
    let curves = data
        .curves
        .iter()
        .map(|c| {
            let meta = &c.dataset.metadata;
            CurveJson {
                label: &c.label,
                value: c.value,
                z_over_c_tau: meta.z_over_c_tau,
                z_cm: meta.z_cm,
                config: &meta.config,
                efficiency: c.dataset.outputs.iter().map(|o| (o.solver.name(), &o.efficiency.efficiency[..])).collect(),
                peaks: &meta.peaks,
            }
        })
        .collect();
    let doc = FigureJson {
        figure: data.figure.name(),
        parameter: data.parameter,
        t_minus_z_over_tau: &data.retarded,
        curves,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data always serializes");
    text.push('\n');
    text
}

/// File names and contents for a figure in the given format.
pub fn render(data: &FigureData, format: Format) -> CliResult<Vec<(String, String)>> {
    let name = data.figure.name();
    Ok(match format {
        Format::Csv => {
            vec![(format!("{name}.csv"), curves_csv(data)?), (format!("{name}_peaks.csv"), peaks_csv(data)?)]
        }
        Format::Json => vec![(format!("{name}.json"), to_json(data))],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig4_curves_keep_the_coupling_ratio() {
        let (parameter, curves) = Figure::Fig4.curves();
        assert_eq!(parameter, "rabi_ratio_sq");
        for (r, p) in curves {
            assert!((p.rabi13_sq() / p.rabi12_sq() - r).abs() < 1e-12);
            assert_eq!(p.kappa02 / p.kappa03, 4.0);
        }
    }

    #[test]
    fn fig3_curves_vary_one_detuning() {
        let (_, curves) = Figure::Fig3b.curves();
        let values: Vec<f64> = curves.iter().map(|(_, p)| p.delta3).collect();
        assert_eq!(values, vec![10.0, 20.0, 40.0, 60.0]);
        assert!(curves.iter().all(|(_, p)| p.delta2 == 20.0));
    }
}
