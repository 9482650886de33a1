//! Diagnostics and lab report files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nsfp_core::besov_lab::LabReport;
use nsfp_core::DiagnosticsRecord;
use serde_json::{Map, Value};

use crate::error::AppError;

/// 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn record_fields(r: &DiagnosticsRecord) -> Vec<String> {
    let vals = r.values();
    let mut out: Vec<String> = vals[..17].iter().map(|v| format_float(*v)).collect();
    out.push(if r.positivity_flag { "1" } else { "0" }.to_string());
    out
}

/// Keys as in the CSV header; non-finite values become null.
pub fn record_json(r: &DiagnosticsRecord) -> Value {
    let mut m = Map::new();
    for (name, v) in DiagnosticsRecord::FIELD_NAMES.iter().zip(r.values()) {
        let value = if *name == "positivity_flag" {
            Value::from(r.positivity_flag)
        } else {
            serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
        };
        m.insert((*name).to_string(), value);
    }
    Value::Object(m)
}

/// Streams records to CSV, flushing each row so an aborted run leaves a
/// complete prefix on disk.
pub struct CsvSink {
    inner: csv::Writer<BufWriter<File>>,
}

impl CsvSink {
    pub fn create(path: &Path) -> Result<Self, AppError> {
        let file = File::create(path).map_err(|e| AppError::Io(format!("cannot create {}: {e}", path.display())))?;
        let mut inner = csv::Writer::from_writer(BufWriter::new(file));
        inner.write_record(DiagnosticsRecord::FIELD_NAMES).map_err(csv_err)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn push(&mut self, r: &DiagnosticsRecord) -> Result<(), AppError> {
        self.inner.write_record(record_fields(r)).map_err(csv_err)?;
        self.inner.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> AppError {
    AppError::Io(e.to_string())
}

pub fn write_records_json(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), AppError> {
    let arr = Value::Array(records.iter().map(record_json).collect());
    write_json(path, &arr)
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), AppError> {
    let file = File::create(path).map_err(|e| AppError::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| AppError::Io(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_lab_csv(path: &Path, report: &LabReport) -> Result<(), AppError> {
    let file = File::create(path).map_err(|e| AppError::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["function", "inequality", "r", "block", "ratio"]).map_err(csv_err)?;
    for row in &report.rows {
        w.write_record([
            row.function.clone(),
            row.inequality.name().to_string(),
            format_float(row.r),
            row.block.map(|b| b.to_string()).unwrap_or_default(),
            format_float(row.ratio),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn lab_summary_json(report: &LabReport, family: &str, seed: u64) -> Value {
    let summary: Vec<Value> = report
        .summary
        .iter()
        .map(|s| {
            serde_json::json!({
                "inequality": s.inequality.name(),
                "r": s.r,
                "sup_ratio": s.sup_ratio,
                "argmax": s.argmax,
            })
        })
        .collect();
    serde_json::json!({
        "nx": report.nx,
        "family": family,
        "seed": seed,
        "rows": report.rows.len(),
        "summary": summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> DiagnosticsRecord {
        DiagnosticsRecord {
            t: 0.1,
            kinetic_energy: 1.0 / 3.0,
            free_energy_total: -72.5,
            dissipation_total: 0.0,
            balance_residual: f64::NAN,
            grad_u_inf: 1.0,
            omega_lq: 2.0,
            n_lq: 0.0,
            y_pq: 0.0,
            z_pq: 0.0,
            tau_inf: 0.5,
            sigma_inf: 0.25,
            log_bound_ratio: 1.25,
            total_mass: 39.47841760435743,
            rho_dev: 1e-16,
            min_f: 0.1,
            div_u_max: 0.0,
            positivity_flag: false,
        }
    }

    #[test]
    fn floats_round_trip_through_text() {
        for v in [0.1, 1.0 / 3.0, -72.5, 1e-300, 6.02214076e23, std::f64::consts::PI] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        let f = record_fields(&record());
        assert_eq!(f.len(), 18);
        assert_eq!(f[1], "3.3333333333333331e-1");
        assert_eq!(f[4], "NaN");
        assert_eq!(f[17], "0");
    }

    #[test]
    fn json_uses_csv_keys() {
        let v = record_json(&record());
        let obj = v.as_object().unwrap();
        assert_eq!(obj.len(), 18);
        for k in DiagnosticsRecord::FIELD_NAMES {
            assert!(obj.contains_key(k));
        }
        assert!(obj["balance_residual"].is_null());
        assert_eq!(obj["positivity_flag"], Value::Bool(false));
    }
}
