//! CSV and JSON serialization of datasets, and atomic file writes.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, CliResult};
use crate::run::{Dataset, Metadata};

pub(crate) fn csv_error(e: csv::Error) -> CliError {
    CliError::Validation(format!("csv encoding failed: {e}"))
}

/// Appends the rows held by `writer` to `head`.
pub(crate) fn finish_csv(writer: csv::Writer<Vec<u8>>, mut head: String) -> CliResult<String> {
    let bytes = writer.into_inner().map_err(|e| CliError::Validation(e.to_string()))?;
    head.push_str(std::str::from_utf8(&bytes).expect("csv output is utf-8"));
    Ok(head)
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data always serializes")
}

/// `#`-prefixed metadata lines followed by one row per time sample.
pub fn to_csv(dataset: &Dataset) -> CliResult<String> {
    let meta = &dataset.metadata;
    let mut out = String::new();
    out.push_str(&format!("# tool = {} {}\n", meta.tool, meta.version));
    out.push_str(&format!("# z_over_c_tau = {}\n", meta.z_over_c_tau));
    out.push_str(&format!("# z_cm = {}\n", meta.z_cm));
    out.push_str(&format!("# config = {}\n", json_line(&meta.config)));
    out.push_str(&format!("# metadata = {}\n", json_line(meta)));

    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t_over_tau".to_string(), "t_minus_z_over_tau".to_string()];
    for o in &dataset.outputs {
        for col in ["omega20_re", "omega20_im", "omega30_re", "omega30_im", "efficiency"] {
            header.push(format!("{}_{col}", o.solver.name()));
        }
    }
    writer.write_record(&header).map_err(csv_error)?;
    for (k, t) in dataset.times.iter().enumerate() {
        let mut row = vec![t.to_string(), (t - meta.z_over_c_tau).to_string()];
        for o in &dataset.outputs {
            let (a, b) = (o.omega20[k], o.omega30[k]);
            row.extend([a.re, a.im, b.re, b.im, o.efficiency.efficiency[k]].map(|v| v.to_string()));
        }
        writer.write_record(&row).map_err(csv_error)?;
    }
    finish_csv(writer, out)
}

#[derive(Serialize)]
struct ChannelJson {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ChannelJson {
    fn new(values: &[Complex64]) -> Self {
        Self { re: values.iter().map(|v| v.re).collect(), im: values.iter().map(|v| v.im).collect() }
    }
}

#[derive(Serialize)]
struct SolverJson {
    omega20: ChannelJson,
    omega30: ChannelJson,
    efficiency: Vec<f64>,
}

#[derive(Serialize)]
struct DatasetJson<'a> {
    metadata: &'a Metadata,
    t_over_tau: &'a [f64],
    t_minus_z_over_tau: Vec<f64>,
    solvers: BTreeMap<&'static str, SolverJson>,
}

pub fn to_json(dataset: &Dataset) -> String {
    let solvers = dataset
        .outputs
        .iter()
        .map(|o| {
            let json = SolverJson {
                omega20: ChannelJson::new(&o.omega20),
                omega30: ChannelJson::new(&o.omega30),
                efficiency: o.efficiency.efficiency.clone(),
            };
            (o.solver.name(), json)
        })
        .collect();
    let doc = DatasetJson {
        metadata: &dataset.metadata,
        t_over_tau: &dataset.times,
        t_minus_z_over_tau: dataset.retarded_times(),
        solvers,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data always serializes");
    text.push('\n');
    text
}

pub fn render(dataset: &Dataset, format: Format) -> CliResult<String> {
    match format {
        Format::Csv => to_csv(dataset),
        Format::Json => Ok(to_json(dataset)),
    }
}

/// Writes through a temporary sibling and renames it into place, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
