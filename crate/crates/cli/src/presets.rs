//! Molecular parameter sets. The built-in table is embedded from
//! `data/presets.json`; user files in the same format extend or override it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use vibronic_core::{DimensionlessPoint, ModelParams};

use crate::AppError;

pub const UNIT_LABEL: &str = "cm^-1";

const BUILTIN: &str = include_str!("../data/presets.json");

/// One row of parameters, energies in cm^-1.
///
/// `r1`, `r2`, `r3` are the rounded dimensionless coordinates `2|J|/lambda`,
/// `hw/dE` and `E0/hw` quoted with the parameters. They are what the
/// reference entropies were computed at, so they are the default solve point;
/// when absent they are derived from the energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculePreset {
    pub name: String,
    pub e0: f64,
    pub hbar_omega: f64,
    pub j: f64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_s0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_s1: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

/// Which parameters of a preset to solve at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    /// The quoted dimensionless coordinates with the preset's `hbar_omega`.
    #[default]
    Tabulated,
    /// The energy columns as given.
    Raw,
}

impl MoleculePreset {
    pub fn raw_params(&self) -> Result<ModelParams, AppError> {
        Ok(ModelParams::from_lambda(self.e0, self.hbar_omega, self.j, self.lambda, UNIT_LABEL)?)
    }

    /// Dimensionless coordinates, quoted values first, then derived ones.
    pub fn point(&self) -> Result<DimensionlessPoint, AppError> {
        let derived = self.raw_params()?.derive();
        let r1 = match self.r1 {
            Some(v) => v,
            None => derived.r1()?,
        };
        let r2 = match self.r2 {
            Some(v) => v,
            None => derived.r2()?,
        };
        Ok(DimensionlessPoint::new(r1, r2, self.r3.unwrap_or(derived.r3())))
    }

    pub fn tabulated_params(&self) -> Result<ModelParams, AppError> {
        Ok(ModelParams::from_dimensionless(self.point()?, self.hbar_omega)?.with_unit_label(UNIT_LABEL))
    }

    pub fn params(&self, coords: Coordinates) -> Result<ModelParams, AppError> {
        match coords {
            Coordinates::Tabulated => self.tabulated_params(),
            Coordinates::Raw => self.raw_params(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetCatalog {
    presets: Vec<MoleculePreset>,
}

impl PresetCatalog {
    pub fn builtin() -> Self {
        let presets = serde_json::from_str(BUILTIN).expect("embedded preset table is valid");
        Self { presets }
    }

    /// Built-ins plus the presets in `path`; a file entry replaces a
    /// built-in of the same name.
    pub fn with_file(path: &Path) -> Result<Self, AppError> {
        let mut catalog = Self::builtin();
        for p in read_presets(path)? {
            catalog.insert(p);
        }
        Ok(catalog)
    }

    pub fn insert(&mut self, preset: MoleculePreset) {
        match self.presets.iter_mut().find(|p| p.name.eq_ignore_ascii_case(&preset.name)) {
            Some(slot) => *slot = preset,
            None => self.presets.push(preset),
        }
    }

    pub fn get(&self, name: &str) -> Result<&MoleculePreset, AppError> {
        self.presets
            .iter()
            .find(|p| p.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| AppError::UnknownPreset(name.to_string()))
    }

    pub fn presets(&self) -> &[MoleculePreset] {
        &self.presets
    }
}

pub fn read_presets(path: &Path) -> Result<Vec<MoleculePreset>, AppError> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| AppError::Format(format!("{}: {e}", path.display())))
}

pub fn write_presets(path: &Path, presets: &[MoleculePreset]) -> Result<(), AppError> {
    let text = serde_json::to_string_pretty(presets).expect("presets serialize");
    fs::write(path, text + "\n").map_err(|e| AppError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table() {
        let c = PresetCatalog::builtin();
        let names: Vec<&str> = c.presets().iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["ammonia", "benzene", "3pyr", "ct", "prc", "semibullvalene", "ct-xps"]);
        assert!(c.get("CT").is_ok());
        assert!(matches!(c.get("water"), Err(AppError::UnknownPreset(_))));
        let xps = c.get("ct-xps").unwrap();
        let ct = c.get("ct").unwrap();
        assert_eq!((xps.hbar_omega, xps.j, xps.lambda), (ct.hbar_omega, ct.j, ct.lambda));
        assert_eq!(xps.e0, 22000.0);
    }

    #[test]
    fn tabulated_point_is_used() {
        let c = PresetCatalog::builtin();
        let p = c.get("ammonia").unwrap();
        let d = p.tabulated_params().unwrap().derive();
        assert!((d.r1().unwrap() - 0.8).abs() < 1e-12);
        assert!((d.r2().unwrap() - 0.01).abs() < 1e-14);
        let raw = p.raw_params().unwrap().derive();
        assert!((raw.r1().unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(p.params(Coordinates::Tabulated).unwrap().unit_label(), UNIT_LABEL);
    }

    #[test]
    fn derived_point_when_unquoted() {
        let mut p = PresetCatalog::builtin().get("ct").unwrap().clone();
        p.r1 = None;
        p.r2 = None;
        p.r3 = None;
        let pt = p.point().unwrap();
        assert!((pt.r1 - 5800.0 / 7100.0).abs() < 1e-12);
        assert_eq!(pt.r3, 0.0);
    }

    #[test]
    fn file_entries_override() {
        let mut c = PresetCatalog::builtin();
        let mut p = c.get("prc").unwrap().clone();
        p.name = "PRC".into();
        p.e0 = 0.0;
        c.insert(p);
        assert_eq!(c.presets().len(), 7);
        assert_eq!(c.get("prc").unwrap().e0, 0.0);
    }
}
