//! CSV and JSON serialization of sweeps and sampled curves.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::surfaces::SurfaceSample;
use crate::sweep::{SweepRow, SweepSpec};
use crate::AppError;

/// Floats are written with nine significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

/// Column names for `states` vibronic states; for two states this is
/// `r1,r2,r3,n_used,converged,e0_level,e1_level,s0,s1,rho0,rho1,modality,theta_opt_deg`.
pub fn sweep_header(states: usize) -> Vec<String> {
    let mut h: Vec<String> = ["r1", "r2", "r3", "n_used", "converged"].map(String::from).to_vec();
    h.extend((0..states).map(|k| format!("e{k}_level")));
    h.extend((0..states).map(|k| format!("s{k}")));
    h.extend((0..states).map(|k| format!("rho{k}")));
    h.push("modality".into());
    h.push("theta_opt_deg".into());
    h
}

fn sweep_record(row: &SweepRow) -> Vec<String> {
    let mut r = vec![
        fmt_float(row.r1),
        fmt_float(row.r2),
        fmt_float(row.r3),
        row.n_used.to_string(),
        row.converged.to_string(),
    ];
    r.extend(row.e_levels.iter().map(|&x| fmt_float(x)));
    r.extend(row.s.iter().map(|&x| fmt_float(x)));
    r.extend(row.rho.iter().map(|&x| fmt_float(x)));
    r.push(row.modality.as_str().into());
    r.push(fmt_float(row.theta_opt));
    r
}

fn csv_error(e: csv::Error) -> AppError {
    AppError::Format(format!("csv: {e}"))
}

pub fn write_sweep_csv<W: Write>(out: W, spec: &SweepSpec, rows: &[SweepRow]) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(sweep_header(spec.states)).map_err(csv_error)?;
    for row in rows {
        w.write_record(sweep_record(row)).map_err(csv_error)?;
    }
    w.flush().map_err(|e| AppError::Format(format!("csv: {e}")))
}

pub fn sweep_csv_string(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, spec, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// `{meta, rows}` where each row object carries the CSV columns.
pub fn sweep_json(spec: &SweepSpec, rows: &[SweepRow]) -> Value {
    let header = sweep_header(spec.states);
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut values = vec![json!(row.r1), json!(row.r2), json!(row.r3), json!(row.n_used), json!(row.converged)];
            values.extend(row.e_levels.iter().map(|x| json!(x)));
            values.extend(row.s.iter().map(|x| json!(x)));
            values.extend(row.rho.iter().map(|x| json!(x)));
            values.push(json!(row.modality.as_str()));
            values.push(json!(row.theta_opt));
            Value::Object(header.iter().cloned().zip(values).collect::<Map<_, _>>())
        })
        .collect();
    json!({
        "meta": {
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "tol": spec.tol,
            "states": spec.states,
            "energy_unit": "hbar_omega",
            "grid": {
                "r1_values": spec.r1_values,
                "r2_values": spec.r2_values,
                "r3_values": spec.r3_values,
            },
            "points": spec.len(),
        },
        "rows": rows,
    })
}

pub const SURFACE_HEADER: [&str; 6] = ["q", "diabat1", "diabat2", "e_gs", "e_es", "ground_density"];

pub fn write_surfaces_csv<W: Write>(out: W, samples: &[SurfaceSample]) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SURFACE_HEADER).map_err(csv_error)?;
    for s in samples {
        w.write_record([s.q, s.diabat1, s.diabat2, s.e_gs, s.e_es, s.ground_density].map(fmt_float))
            .map_err(csv_error)?;
    }
    w.flush().map_err(|e| AppError::Format(format!("csv: {e}")))
}

pub fn write_density_csv<W: Write>(out: W, q: &[f64], density: &[f64]) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["q", "density"]).map_err(csv_error)?;
    for (&x, &y) in q.iter().zip(density) {
        w.write_record([fmt_float(x), fmt_float(y)]).map_err(csv_error)?;
    }
    w.flush().map_err(|e| AppError::Format(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use vibronic_core::density::Modality;

    #[test]
    fn header_is_fixed() {
        assert_eq!(
            sweep_header(2).join(","),
            "r1,r2,r3,n_used,converged,e0_level,e1_level,s0,s1,rho0,rho1,modality,theta_opt_deg"
        );
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_float(0.1), "1.00000000e-1");
        assert_eq!(fmt_float(1234.5678912), "1.23456789e3");
        assert_eq!(fmt_float(0.0), "0.00000000e0");
    }

    #[test]
    fn row_layout() {
        let spec = SweepSpec::default();
        let row = SweepRow {
            r1: 0.1,
            r2: 0.2,
            r3: 0.0,
            n_used: 64,
            converged: true,
            e_levels: vec![1.0, 2.0],
            s: vec![0.5, 0.25],
            rho: vec![0.11, 0.04],
            modality: Modality::Bimodal,
            theta_opt: 1.5,
        };
        let text = sweep_csv_string(&spec, std::slice::from_ref(&row));
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line.split(',').count(), 13);
        assert!(line.contains(",64,true,") && line.contains(",bimodal,"));
        let v = sweep_json(&spec, &[row]);
        assert_eq!(v["rows"][0]["s1"], json!(0.25));
        assert_eq!(v["rows"][0]["modality"], json!("bimodal"));
        assert_eq!(v["meta"]["points"], json!(6724));
    }
}
