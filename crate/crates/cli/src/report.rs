//! Single-point pipeline in physical units.

use serde::Serialize;
use vibronic_core::density::Modality;
use vibronic_core::perturbation::{self, PerturbativeEstimates, ThresholdVariant};
use vibronic_core::point::{analyze_point, PointOptions};
use vibronic_core::{DimensionlessPoint, ModelParams};

use crate::presets::{Coordinates, MoleculePreset};
use crate::AppError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub unit: String,
    pub e0: f64,
    pub hbar_omega: f64,
    pub j: f64,
    pub lambda: f64,
    pub delta: f64,
    pub delta_e: f64,
    pub huang_rhys: f64,
    /// `None` where a ratio is undefined (`lambda = 0` or `dE = 0`).
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub r3: f64,
}

impl ParamSummary {
    pub fn new(params: &ModelParams) -> Self {
        let d = params.derive();
        Self {
            unit: params.unit_label().to_string(),
            e0: params.e0(),
            hbar_omega: params.hbar_omega(),
            j: params.j(),
            lambda: d.lambda,
            delta: params.delta(),
            delta_e: d.delta_e,
            huang_rhys: d.huang_rhys,
            r1: d.r1().ok(),
            r2: d.r2().ok(),
            r3: d.r3(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub params: ParamSummary,
    pub n_used: usize,
    pub converged: bool,
    /// Lowest levels, measured from the lower diabatic minimum.
    pub energies: Vec<f64>,
    pub entropies: Vec<f64>,
    pub rho: Vec<f64>,
    pub rho_pm: Vec<f64>,
    pub modality: Modality,
    pub density_grid_too_narrow: bool,
    pub theta_opt_deg: f64,
    pub theta_fit_rms: f64,
    /// Closed-form perturbative values, for comparison only.
    pub reference_estimates: PerturbativeEstimates,
}

impl PointReport {
    pub fn s0(&self) -> f64 {
        self.entropies[0]
    }

    pub fn s1(&self) -> Option<f64> {
        self.entropies.get(1).copied()
    }
}

pub fn solve_params(
    params: &ModelParams,
    options: &PointOptions,
    variant: ThresholdVariant,
) -> Result<PointReport, AppError> {
    let a = analyze_point(params, options)?;
    Ok(PointReport {
        params: ParamSummary::new(params),
        n_used: a.solution.n_used,
        converged: a.solution.converged,
        energies: a.solution.energies.clone(),
        entropies: a.entanglement.iter().map(|r| r.entropy).collect(),
        rho: a.entanglement.iter().map(|r| r.rho).collect(),
        rho_pm: a.entanglement.iter().map(|r| r.rho_pm).collect(),
        modality: a.modality,
        density_grid_too_narrow: a.density_grid_too_narrow,
        theta_opt_deg: a.fit.theta_opt,
        theta_fit_rms: a.fit.rms,
        reference_estimates: perturbation::estimates(params, variant),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetReport {
    pub name: String,
    pub coordinates: Coordinates,
    pub point: DimensionlessPoint,
    pub reference_s0: Option<f64>,
    pub reference_s1: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub notes: String,
    #[serde(flatten)]
    pub report: PointReport,
}

pub fn solve_preset(
    preset: &MoleculePreset,
    coords: Coordinates,
    options: &PointOptions,
    variant: ThresholdVariant,
) -> Result<PresetReport, AppError> {
    let params = preset.params(coords)?;
    let point = match coords {
        Coordinates::Tabulated => preset.point()?,
        Coordinates::Raw => params.derive().point()?,
    };
    Ok(PresetReport {
        name: preset.name.clone(),
        coordinates: coords,
        point,
        reference_s0: preset.reference_s0,
        reference_s1: preset.reference_s1,
        notes: preset.notes.clone(),
        report: solve_params(&params, options, variant)?,
    })
}
