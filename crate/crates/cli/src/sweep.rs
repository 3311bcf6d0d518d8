//! Grid sweeps over the dimensionless coordinates `(r1, r2, r3)` with
//! `hbar_omega = 1`.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};
use vibronic_core::density::Modality;
use vibronic_core::hamiltonian::{ConvergenceOptions, DEFAULT_TOL};
use vibronic_core::point::{analyze_point, PointOptions};
use vibronic_core::{DimensionlessPoint, ModelParams};

use crate::AppError;

pub const DEFAULT_R3: [f64; 4] = [0.0, 0.01, 0.1, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(deserialize_with = "axis")]
    pub r1_values: Vec<f64>,
    #[serde(deserialize_with = "axis")]
    pub r2_values: Vec<f64>,
    #[serde(deserialize_with = "axis")]
    pub r3_values: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_states")]
    pub states: usize,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_states() -> usize {
    2
}

/// Either an explicit list or an `"a:b:n"` log range.
fn axis<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Axis {
        Values(Vec<f64>),
        Text(String),
    }
    match Axis::deserialize(d)? {
        Axis::Values(v) => Ok(v),
        Axis::Text(s) => parse_axis(&s).map_err(serde::de::Error::custom),
    }
}

impl Default for SweepSpec {
    /// 41 x 41 log grid on `[0.01, 100]` in `r1` and `r2` at four asymmetries.
    fn default() -> Self {
        Self {
            r1_values: log_space(0.01, 100.0, 41),
            r2_values: log_space(0.01, 100.0, 41),
            r3_values: DEFAULT_R3.to_vec(),
            tol: DEFAULT_TOL,
            states: 2,
        }
    }
}

/// `n` points from `a` to `b`, evenly spaced in `log10`; both ends exact.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.log10(), b.log10());
            (0..n)
                .map(|k| match k {
                    0 => a,
                    k if k + 1 == n => b,
                    k => 10f64.powf(la + (lb - la) * k as f64 / (n - 1) as f64),
                })
                .collect()
        }
    }
}

/// `"a:b:n"` is a log range, anything else a comma-separated list.
pub fn parse_axis(text: &str) -> Result<Vec<f64>, AppError> {
    let bad = || AppError::Usage(format!("cannot parse axis `{text}`"));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if !(a > 0.0 && b > 0.0 && n >= 1 && a.is_finite() && b.is_finite()) {
            return Err(AppError::Usage(format!(
                "log range `{text}` needs positive finite ends and n >= 1"
            )));
        }
        Ok(log_space(a, b, n))
    } else {
        text.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad())).collect()
    }
}

impl SweepSpec {
    pub fn from_file(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        let spec: Self = serde_json::from_str(&text)
            .map_err(|e| AppError::Format(format!("{}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        let positive = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x > 0.0);
        if self.r1_values.is_empty() || self.r2_values.is_empty() || self.r3_values.is_empty() {
            return Err(AppError::Usage("every axis needs at least one value".into()));
        }
        if !positive(&self.r1_values) || !positive(&self.r2_values) {
            return Err(AppError::Usage("r1 and r2 values must be positive".into()));
        }
        if !self.r3_values.iter().all(|x| x.is_finite() && *x >= 0.0) {
            return Err(AppError::Usage("r3 values must be nonnegative".into()));
        }
        if !(self.tol > 0.0) {
            return Err(AppError::Usage("tol must be positive".into()));
        }
        if self.states == 0 {
            return Err(AppError::Usage("states must be at least 1".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.r1_values.len() * self.r2_values.len() * self.r3_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in output order: `r3` slowest, then `r2`, then `r1`.
    pub fn points(&self) -> Vec<DimensionlessPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &r3 in &self.r3_values {
            for &r2 in &self.r2_values {
                for &r1 in &self.r1_values {
                    out.push(DimensionlessPoint::new(r1, r2, r3));
                }
            }
        }
        out
    }

    pub fn point_options(&self) -> PointOptions {
        PointOptions {
            convergence: ConvergenceOptions::with_tol(self.tol),
            states: self.states,
            ..PointOptions::default()
        }
    }
}

/// Observables at one grid point; energies in units of `hbar_omega`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub n_used: usize,
    pub converged: bool,
    pub e_levels: Vec<f64>,
    pub s: Vec<f64>,
    pub rho: Vec<f64>,
    pub modality: Modality,
    pub theta_opt: f64,
}

pub fn run_point(point: DimensionlessPoint, options: &PointOptions) -> Result<SweepRow, AppError> {
    let params = ModelParams::from_dimensionless(point, 1.0)?;
    let a = analyze_point(&params, options)?;
    Ok(SweepRow {
        r1: point.r1,
        r2: point.r2,
        r3: point.r3,
        n_used: a.solution.n_used,
        converged: a.solution.converged,
        e_levels: a.solution.energies.clone(),
        s: a.entanglement.iter().map(|r| r.entropy).collect(),
        rho: a.entanglement.iter().map(|r| r.rho).collect(),
        modality: a.modality,
        theta_opt: a.fit.theta_opt,
    })
}

/// Evaluates every grid point on a pool of `threads` workers (machine
/// parallelism when `None`). Rows come back in [`SweepSpec::points`] order
/// whatever the worker count.
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<SweepRow>, AppError> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(AppError::Usage("threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| AppError::Pool(e.to_string()))?;
    let options = spec.point_options();
    let points = spec.points();
    pool.install(|| {
        points
            .par_iter()
            .map(|&p| {
                run_point(p, &options).map_err(|e| match e {
                    AppError::Core(c) => AppError::Format(format!(
                        "point r1={} r2={} r3={}: {c}",
                        p.r1, p.r2, p.r3
                    )),
                    other => other,
                })
            })
            .collect()
    })
}
