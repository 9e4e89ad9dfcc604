//! File formats: state files, measure reports, copy series, CHSH results and
//! locality certificates.
//!
//! Numbers are rounded to 12 decimal places and written in their shortest
//! round-trip form, so `0` prints as `0.0`.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bell::{ChshResult, LocalityCertificate};
use crate::error::{Error, Result};
use crate::measures::{MeasureReport, SeparableState};
use crate::model::Charge;
use crate::multicopy::CopySeries;
use crate::operator::{BlockKey, CMatrix, GradedDensityOperator};
use crate::states::SchmidtState;

/// Decimal places kept in emitted numbers.
pub const DECIMALS: i32 = 12;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    sectors: BTreeMap<String, Vec<f64>>,
}

/// Parses `{"sectors": {"1": [...], "tau": [...]}}`.
pub fn parse_state(text: &str) -> Result<SchmidtState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut map = BTreeMap::new();
    for (key, values) in file.sectors {
        let charge = Charge::from_str(&key)?;
        if map.insert(charge, values).is_some() {
            return Err(Error::Parse(format!("sector {charge} given twice")));
        }
    }
    SchmidtState::from_map(&map)
}

/// Writes a state in the state-file format, one entry per coefficient.
///
/// Fails with `TooLarge` for states whose expanded rank exceeds the dense
/// limit.
pub fn state_to_json(state: &SchmidtState) -> Result<String> {
    let mut sectors = Map::new();
    for c in state.occupied() {
        let values = state.coefficients(c)?;
        sectors.insert(c.label().to_string(), Value::from(values));
    }
    Ok(json!({ "sectors": sectors }).to_string())
}

/// `x` rounded to [`DECIMALS`] places.
pub fn round_decimal(x: f64) -> f64 {
    let scale = 10f64.powi(DECIMALS);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// A rounded number as a JSON value.
pub fn number(x: f64) -> Value {
    Value::from(round_decimal(x))
}

/// A rounded number as text.
pub fn format_number(x: f64) -> String {
    number(x).to_string()
}

pub fn report_to_json(report: &MeasureReport) -> String {
    json!({
        "aee": number(report.aee),
        "aree": number(report.aree),
        "ace": number(report.ace),
        "ce": number(report.ce),
    })
    .to_string()
}

pub fn parse_report(text: &str) -> Result<MeasureReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub const SERIES_HEADER: &str = "n,aee,aree,ace,ce";

pub fn series_to_csv(series: &CopySeries) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for r in &series.rows {
        let cells = [r.aee, r.aree, r.ace, r.ce].map(format_number);
        out.push_str(&format!("{},{}\n", r.n, cells.join(",")));
    }
    out
}

pub fn series_to_json(series: &CopySeries) -> String {
    let rows: Vec<Value> = series
        .rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "aee": number(r.aee),
                "aree": number(r.aree),
                "ace": number(r.ace),
                "ce": number(r.ce),
            })
        })
        .collect();
    json!({ "rows": rows }).to_string()
}

/// Parses the CSV written by [`series_to_csv`].
pub fn parse_series_csv(text: &str) -> Result<CopySeries> {
    let mut lines = text.lines();
    if lines.next() != Some(SERIES_HEADER) {
        return Err(Error::Parse(format!("expected header `{SERIES_HEADER}`")));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 5 {
            return Err(Error::Parse(format!("row {} has {} cells", k + 1, cells.len())));
        }
        let bad = |e: String| Error::Parse(format!("row {}: {e}", k + 1));
        let n = cells[0].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
        let mut vals = [0.0; 4];
        for (v, cell) in vals.iter_mut().zip(&cells[1..]) {
            *v = cell.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
        }
        rows.push(crate::multicopy::CopyRow {
            n,
            aee: vals[0],
            aree: vals[1],
            ace: vals[2],
            ce: vals[3],
        });
    }
    Ok(CopySeries { rows })
}

pub fn chsh_to_json(result: &ChshResult) -> String {
    let angles: Vec<Value> = result
        .angles
        .map(|a| a.iter().map(|&x| number(x)).collect())
        .unwrap_or_default();
    json!({
        "value": number(result.value),
        "angles": angles,
        "copies": result.copies,
        "verdict": result.verdict,
    })
    .to_string()
}

fn matrix_json(m: &CMatrix) -> Value {
    let part = |f: fn(&num_complex::Complex64) -> f64| -> Value {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| number(f(&m[(i, j)]))).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .into()
    };
    json!({ "re": part(|z| z.re), "im": part(|z| z.im) })
}

fn factor_json(op: &GradedDensityOperator) -> Value {
    let blocks: Vec<Value> = op
        .blocks()
        .filter_map(|(k, m)| match k {
            BlockKey::Subsystem(c) => Some(json!({ "sector": c.label(), "block": matrix_json(m) })),
            _ => None,
        })
        .collect();
    Value::from(blocks)
}

pub fn separable_to_json(state: &SeparableState) -> Value {
    let terms: Vec<Value> = state
        .terms()
        .iter()
        .map(|t| {
            json!({
                "probability": number(t.probability),
                "alice": factor_json(&t.alice),
                "bob": factor_json(&t.bob),
            })
        })
        .collect();
    Value::from(terms)
}

pub fn certificate_to_json(cert: &LocalityCertificate, copies: u32) -> String {
    match cert {
        LocalityCertificate::Separable {
            decomposition,
            residual,
        } => json!({
            "status": "separable",
            "copies": copies,
            // residual is tiny; keep full precision
            "residual": residual,
            "terms": separable_to_json(decomposition),
        }),
        LocalityCertificate::Refused(reason) => json!({
            "status": "refused",
            "copies": copies,
            "reason": reason,
        }),
    }
    .to_string()
}
