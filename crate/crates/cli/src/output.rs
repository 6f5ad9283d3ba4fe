//! The row table and its CSV / JSON encodings.

use std::io::{Read, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::Format;
use crate::CliError;

/// One output row. Every row carries the parameters it was computed with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub p: u32,
    pub quantity: String,
    #[serde(serialize_with = "finite_or_null", deserialize_with = "null_as_nan")]
    pub value: f64,
    /// Step count, iteration count, eigenvalue index or grid size, by quantity.
    pub n_or_dim: Option<u64>,
    #[serde(rename = "N")]
    pub degree: usize,
    #[serde(rename = "K")]
    pub cutoff: usize,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Verification outcome; only present on `verify` rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

// JSON has no NaN; write null and read it back as NaN.
fn finite_or_null<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn null_as_nan<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// CSV wants a fixed column set, so optional fields are always present.
#[derive(Serialize, Deserialize)]
struct CsvRow {
    p: u32,
    quantity: String,
    value: f64,
    n_or_dim: Option<u64>,
    #[serde(rename = "N")]
    degree: usize,
    #[serde(rename = "K")]
    cutoff: usize,
    tol: f64,
    seed: Option<u64>,
    pass: Option<bool>,
}

impl From<&Row> for CsvRow {
    fn from(r: &Row) -> Self {
        Self {
            p: r.p,
            quantity: r.quantity.clone(),
            value: r.value,
            n_or_dim: r.n_or_dim,
            degree: r.degree,
            cutoff: r.cutoff,
            tol: r.tol,
            seed: r.seed,
            pass: r.pass,
        }
    }
}

impl From<CsvRow> for Row {
    fn from(r: CsvRow) -> Self {
        Self {
            p: r.p,
            quantity: r.quantity,
            value: r.value,
            n_or_dim: r.n_or_dim,
            degree: r.degree,
            cutoff: r.cutoff,
            tol: r.tol,
            seed: r.seed,
            pass: r.pass,
        }
    }
}

pub fn write_rows<W: Write>(rows: &[Row], format: Format, mut w: W) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            w.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut cw = csv::Writer::from_writer(&mut w);
            for r in rows {
                cw.serialize(CsvRow::from(r))?;
            }
            cw.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(format: Format, r: R) -> Result<Vec<Row>, CliError> {
    match format {
        Format::Json => Ok(serde_json::from_reader(r)?),
        Format::Csv => csv::Reader::from_reader(r)
            .deserialize::<CsvRow>()
            .map(|r| r.map(Row::from).map_err(CliError::from))
            .collect(),
    }
}
