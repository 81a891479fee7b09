//! Dataset files.
//!
//! CSV: header `id,q1..qm,p1..pm`, one observation per row. JSON:
//! `{"dimension": m, "observations": [{"id", "quantities", "prices"}]}`.
//! Numbers are parsed with `str::parse`, so the decimal point is always `.`
//! and thousands separators are rejected.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use revpref_core::{Bundle, Dataset, PriceVector, TransportInstance};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Chosen by extension; anything other than `.json` is read as CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// A dataset together with the observation ids from its file.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub ids: Vec<String>,
    pub data: Dataset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationRecord {
    pub id: String,
    pub quantities: Vec<f64>,
    pub prices: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireDataset {
    pub dimension: usize,
    pub observations: Vec<ObservationRecord>,
}

/// A weighted transport instance: `{"sources", "source_weights", "targets", "target_weights"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireInstance {
    pub sources: Vec<Vec<f64>>,
    pub source_weights: Vec<f64>,
    pub targets: Vec<Vec<f64>>,
    pub target_weights: Vec<f64>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: cannot read: {e}", path.display())))
}

pub fn parse_dataset(path: &Path, format: Format) -> Result<LabeledDataset, CliError> {
    let text = read(path)?;
    let parsed = match format {
        Format::Csv => parse_csv(&text),
        Format::Json => parse_json(&text),
    };
    parsed.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn check_value(value: f64, at: impl Fn() -> String) -> Result<f64, String> {
    if !value.is_finite() {
        return Err(format!("{}: value {value} is not finite", at()));
    }
    if value <= 0.0 {
        return Err(format!("{}: value {value} must be strictly positive", at()));
    }
    Ok(value)
}

fn build(ids: Vec<String>, rows: Vec<(Vec<f64>, Vec<f64>)>) -> Result<LabeledDataset, String> {
    let data = Dataset::from_rows(rows).map_err(|e| e.to_string())?;
    Ok(LabeledDataset { ids, data })
}

pub fn parse_csv(text: &str) -> Result<LabeledDataset, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| format!("line 1: {e}"))?
        .clone();
    let width = header.len();
    if width < 3 || width % 2 == 0 {
        return Err(format!(
            "line 1: header has {width} columns; expected id,q1..qm,p1..pm"
        ));
    }
    let m = (width - 1) / 2;
    let expected: Vec<String> = std::iter::once("id".to_string())
        .chain((1..=m).map(|k| format!("q{k}")))
        .chain((1..=m).map(|k| format!("p{k}")))
        .collect();
    for (col, (got, want)) in header.iter().zip(&expected).enumerate() {
        if got.trim_start_matches('\u{feff}') != want {
            return Err(format!(
                "line 1, column {}: header `{got}` where `{want}` was expected",
                col + 1
            ));
        }
    }

    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(format!(
                "line {line}: row has {} columns, header has {width}",
                record.len()
            ));
        }
        let mut values = Vec::with_capacity(2 * m);
        for col in 1..width {
            let cell = &record[col];
            let at = || format!("line {line}, column {} ({})", col + 1, expected[col]);
            let v: f64 = cell
                .parse()
                .map_err(|_| format!("{}: cannot parse `{cell}` as a number", at()))?;
            values.push(check_value(v, at)?);
        }
        ids.push(record[0].to_string());
        let prices = values.split_off(m);
        rows.push((values, prices));
    }
    if rows.is_empty() {
        return Err("no observations".into());
    }
    build(ids, rows)
}

pub fn parse_json(text: &str) -> Result<LabeledDataset, String> {
    let wire: WireDataset = serde_json::from_str(text).map_err(|e| e.to_string())?;
    from_wire(wire)
}

pub fn from_wire(wire: WireDataset) -> Result<LabeledDataset, String> {
    let m = wire.dimension;
    if m == 0 {
        return Err("dimension must be positive".into());
    }
    if wire.observations.is_empty() {
        return Err("no observations".into());
    }
    let mut ids = Vec::with_capacity(wire.observations.len());
    let mut rows = Vec::with_capacity(wire.observations.len());
    for (row, obs) in wire.observations.into_iter().enumerate() {
        for (name, v) in [("quantities", &obs.quantities), ("prices", &obs.prices)] {
            if v.len() != m {
                return Err(format!(
                    "observation {} (id {}): {name} has {} entries, dimension is {m}",
                    row + 1,
                    obs.id,
                    v.len()
                ));
            }
            for (k, &x) in v.iter().enumerate() {
                check_value(x, || {
                    format!("observation {} (id {}), {name}[{k}]", row + 1, obs.id)
                })?;
            }
        }
        ids.push(obs.id);
        rows.push((obs.quantities, obs.prices));
    }
    build(ids, rows)
}

pub fn to_wire(data: &LabeledDataset) -> WireDataset {
    WireDataset {
        dimension: data.data.dimension(),
        observations: data
            .data
            .observations()
            .iter()
            .zip(&data.ids)
            .map(|(o, id)| ObservationRecord {
                id: id.clone(),
                quantities: o.bundle.as_slice().to_vec(),
                prices: o.prices.as_slice().to_vec(),
            })
            .collect(),
    }
}

/// Shortest round-trip decimal form of every number, so output is lossless and byte-stable.
pub fn to_csv(data: &LabeledDataset) -> String {
    let m = data.data.dimension();
    let mut out = String::from("id");
    for k in 1..=m {
        let _ = write!(out, ",q{k}");
    }
    for k in 1..=m {
        let _ = write!(out, ",p{k}");
    }
    out.push('\n');
    for (o, id) in data.data.observations().iter().zip(&data.ids) {
        out.push_str(id);
        for v in o.bundle.as_slice().iter().chain(o.prices.as_slice()) {
            let _ = write!(out, ",{v:?}");
        }
        out.push('\n');
    }
    out
}

pub fn to_json(data: &LabeledDataset) -> String {
    let mut s = serde_json::to_string_pretty(&to_wire(data)).expect("dataset serializes");
    s.push('\n');
    s
}

pub fn serialize(data: &LabeledDataset, format: Format) -> String {
    match format {
        Format::Csv => to_csv(data),
        Format::Json => to_json(data),
    }
}

/// Default ids `1..=n`.
pub fn label(data: Dataset) -> LabeledDataset {
    LabeledDataset {
        ids: (1..=data.len()).map(|i| i.to_string()).collect(),
        data,
    }
}

/// What a transport input file contains.
#[derive(Debug, Clone)]
pub enum TransportInput {
    Dataset(LabeledDataset),
    Instance(TransportInstance),
}

/// A JSON file with a `sources` key is an instance; anything else is a dataset.
pub fn parse_transport_input(path: &Path) -> Result<TransportInput, CliError> {
    let format = Format::from_path(path);
    if format == Format::Json {
        let text = read(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if value.get("sources").is_some() {
            let wire: WireInstance = serde_json::from_value(value)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            return instance_from_wire(wire)
                .map(TransportInput::Instance)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())));
        }
    }
    parse_dataset(path, format).map(TransportInput::Dataset)
}

pub fn instance_from_wire(wire: WireInstance) -> Result<TransportInstance, String> {
    let sources = wire
        .sources
        .into_iter()
        .enumerate()
        .map(|(i, v)| Bundle::new(v).map_err(|e| format!("source {}: {e}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let targets = wire
        .targets
        .into_iter()
        .enumerate()
        .map(|(j, v)| PriceVector::new(v).map_err(|e| format!("target {}: {e}", j + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    TransportInstance::new(
        sources,
        wire.source_weights,
        targets,
        wire.target_weights,
        revpref_core::default_kernel(),
    )
    .map_err(|e| e.to_string())
}
