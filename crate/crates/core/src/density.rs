//! Vibrational probability densities and their modality.

use alloc::vec;
use alloc::vec::Vec;

use crate::hamiltonian::VibronicSolution;
use crate::math::{exp, sqrt};
use crate::model::ModelParams;
use crate::{Error, Result};

/// Points in the default grid.
pub const DEFAULT_GRID_POINTS: usize = 2001;
/// Margin added beyond each diabatic minimum by the default grid.
pub const DEFAULT_GRID_MARGIN: f64 = 6.0;
/// A dip counts when it is deeper than this fraction of the global maximum.
pub const DEFAULT_PROMINENCE: f64 = 1e-3;
/// Endpoint density above which the grid is flagged as too narrow.
pub const EDGE_DENSITY_TOL: f64 = 1e-8;

/// pi^(-1/4)
const CHI0_NORM: f64 = 0.751_125_544_464_942_5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Modality {
    Unimodal,
    Bimodal,
}

impl Modality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Modality::Unimodal => "unimodal",
            Modality::Bimodal => "bimodal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Extremum {
    pub q: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityProfile {
    pub q_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub modality: Modality,
    pub extrema: Vec<Extremum>,
    /// The density has not decayed at the grid ends.
    pub grid_too_narrow: bool,
}

impl DensityProfile {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.q_grid, &self.values)
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Normalized oscillator eigenfunction `chi_i(q)` of the unit-frequency
/// dimensionless oscillator.
pub fn ho_wavefunction(i: usize, q: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = CHI0_NORM * exp(-0.5 * q * q);
    for k in 0..i {
        let next = sqrt(2.0 / (k as f64 + 1.0)) * q * cur - sqrt(k as f64 / (k as f64 + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[i] = chi_i(q)` for `i < out.len()`.
pub fn ho_values(q: f64, out: &mut [f64]) {
    let Some(first) = out.first_mut() else {
        return;
    };
    *first = CHI0_NORM * exp(-0.5 * q * q);
    if out.len() > 1 {
        out[1] = sqrt(2.0) * q * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        out[k + 1] = sqrt(2.0 / (k as f64 + 1.0)) * q * out[k] - sqrt(k as f64 / (k as f64 + 1.0)) * out[k - 1];
    }
}

/// `npts` evenly spaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, npts: usize) -> Vec<f64> {
    match npts {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (npts - 1) as f64;
            (0..npts).map(|k| if k + 1 == npts { hi } else { lo + step * k as f64 }).collect()
        }
    }
}

/// `DEFAULT_GRID_POINTS` points on `[-(delta + 6), delta + 6]`.
pub fn default_grid(params: &ModelParams) -> Vec<f64> {
    let half = params.delta() + DEFAULT_GRID_MARGIN;
    uniform_grid(-half, half, DEFAULT_GRID_POINTS)
}

/// `n(Q) = sum_k (sum_i c_{k,i} chi_i(Q))^2` on the grid.
pub fn density_values(state: &[f64], n: usize, grid: &[f64]) -> Result<Vec<f64>> {
    if state.len() != 2 * n {
        return Err(Error::InvalidParameter {
            name: "state",
            reason: "coefficient row length must be 2n",
        });
    }
    let (c1, c2) = state.split_at(n);
    let mut chi = vec![0.0; n];
    Ok(grid
        .iter()
        .map(|&q| {
            ho_values(q, &mut chi);
            let a: f64 = c1.iter().zip(&chi).map(|(c, x)| c * x).sum();
            let b: f64 = c2.iter().zip(&chi).map(|(c, x)| c * x).sum();
            a * a + b * b
        })
        .collect())
}

fn find_extrema(values: &[f64]) -> Vec<(usize, ExtremumKind)> {
    let mut out = Vec::new();
    for k in 1..values.len().saturating_sub(1) {
        let (l, c, r) = (values[k - 1], values[k], values[k + 1]);
        if c > l && c >= r {
            out.push((k, ExtremumKind::Max));
        } else if c < l && c <= r {
            out.push((k, ExtremumKind::Min));
        }
    }
    out
}

/// Two maxima separated by a dip deeper than `prominence * max` below the
/// lower of the two.
fn modality(values: &[f64], extrema: &[(usize, ExtremumKind)], prominence: f64) -> Modality {
    let global = values.iter().cloned().fold(0.0, f64::max);
    let tol = prominence * global;
    let maxima: Vec<usize> = extrema
        .iter()
        .filter(|(_, k)| *k == ExtremumKind::Max)
        .map(|(i, _)| *i)
        .collect();
    for (a, &left) in maxima.iter().enumerate() {
        let mut dip = f64::INFINITY;
        let mut cursor = left;
        for &right in &maxima[a + 1..] {
            dip = values[cursor..=right].iter().cloned().fold(dip, f64::min);
            cursor = right;
            if values[left].min(values[right]) - dip > tol {
                return Modality::Bimodal;
            }
        }
    }
    Modality::Unimodal
}

/// Density of a coefficient row on `grid` with its extrema and modality.
pub fn profile(state: &[f64], n: usize, grid: &[f64]) -> Result<DensityProfile> {
    profile_with(state, n, grid, DEFAULT_PROMINENCE)
}

pub fn profile_with(state: &[f64], n: usize, grid: &[f64], prominence: f64) -> Result<DensityProfile> {
    let norm = sqrt(state.iter().map(|c| c * c).sum());
    if !((norm - 1.0).abs() <= crate::entanglement::NORM_TOL) {
        return Err(Error::NotNormalized { norm });
    }
    if grid.len() < 3 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "need at least three strictly ascending points",
        });
    }
    let values = density_values(state, n, grid)?;
    let found = find_extrema(&values);
    let modality = modality(&values, &found, prominence);
    let extrema = found
        .iter()
        .map(|&(k, kind)| Extremum {
            q: grid[k],
            value: values[k],
            kind,
        })
        .collect();
    let grid_too_narrow =
        values[0] > EDGE_DENSITY_TOL || values[values.len() - 1] > EDGE_DENSITY_TOL;
    Ok(DensityProfile {
        q_grid: grid.to_vec(),
        values,
        modality,
        extrema,
        grid_too_narrow,
    })
}

/// Modality of the ground vibronic state on the default grid.
pub fn classify_region(params: &ModelParams, solution: &VibronicSolution) -> Result<Modality> {
    if solution.state_count() == 0 {
        return Err(Error::StateCount {
            requested: 1,
            available: 0,
        });
    }
    let grid = default_grid(params);
    Ok(profile(solution.state(0), solution.n_used, &grid)?.modality)
}
