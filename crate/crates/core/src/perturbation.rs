//! Closed-form perturbative estimates, evaluated exactly as written in the
//! source expressions. They are reference values; the exact solver is the
//! authority.

use crate::math::{exp, log2};
use crate::model::ModelParams;
use crate::{Error, Result};

/// Which reading of the asymmetry threshold to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ThresholdVariant {
    /// `2|J| exp(+lambda / (2 hw))`. Grows with lambda; kept for comparison.
    PositiveExponent,
    /// `2|J| exp(-lambda / (2 hw)) = 2|J| F00`, consistent with the
    /// localized estimate.
    #[default]
    OverlapScaled,
}

/// Franck-Condon overlap of the two well ground states, `exp(-lambda/(2 hw))`.
pub fn franck_condon_overlap(params: &ModelParams) -> f64 {
    exp(-params.lambda() / (2.0 * params.hbar_omega()))
}

/// Localized-limit `rho_pm = (1 - (1 - F00) / (1 + E0 / (2|J| F00)))^(1/2)`.
pub fn rho_pm_localized(params: &ModelParams) -> Result<f64> {
    let j = params.j().abs();
    if j == 0.0 {
        return Err(Error::ZeroCoupling("localized rho_pm"));
    }
    let f00 = franck_condon_overlap(params);
    let ratio = params.e0() / (2.0 * j * f00);
    Ok(libm::sqrt(1.0 - (1.0 - f00) / (1.0 + ratio)))
}

/// Asymmetry below which the localized ground state stays strongly entangled.
pub fn e0_fragility_threshold(params: &ModelParams, variant: ThresholdVariant) -> Result<f64> {
    let j = params.j().abs();
    if j == 0.0 {
        return Err(Error::ZeroCoupling("fragility threshold"));
    }
    let x = params.lambda() / (2.0 * params.hbar_omega());
    Ok(match variant {
        ThresholdVariant::PositiveExponent => 2.0 * j * exp(x),
        ThresholdVariant::OverlapScaled => 2.0 * j * exp(-x),
    })
}

/// Delocalized-limit
/// `rho_pm = 1 - hw lambda / (2 (hw - 2|J|)^2 (1 + E0^2 / (16 J^2)))`.
pub fn rho_pm_delocalized(params: &ModelParams) -> Result<f64> {
    let hw = params.hbar_omega();
    let j = params.j();
    let detune = hw - 2.0 * j.abs();
    if detune == 0.0 {
        return Err(Error::DelocalizedPole);
    }
    let e0 = params.e0();
    // E0 = 0 drops the asymmetry factor even when J = 0
    let asym = if e0 == 0.0 { 0.0 } else { e0 * e0 / (16.0 * j * j) };
    Ok(1.0 - hw * params.lambda() / (2.0 * detune * detune * (1.0 + asym)))
}

/// Delocalized-limit entropy `S ~ -rho log2 rho` with
/// `rho = (1/4) (lambda / 2|J|) (hw / dE) (1 + lambda / (4|J|))`.
pub fn entropy_delocalized_approx(params: &ModelParams) -> Result<f64> {
    let j = params.j().abs();
    if j == 0.0 {
        return Err(Error::ZeroCoupling("delocalized entropy"));
    }
    let derived = params.derive();
    if !(derived.delta_e > 0.0) {
        return Err(Error::UndefinedRatio("hbar_omega/dE"));
    }
    let x = derived.lambda / (2.0 * j);
    let rho = 0.25 * x * (params.hbar_omega() / derived.delta_e) * (1.0 + 0.5 * x);
    Ok(if rho > 0.0 { -rho * log2(rho) } else { 0.0 })
}

/// `(E0/hw)^2 + (2J/hw)^2`; values near 1 mark the excited-state resonance.
pub fn resonance_metric(params: &ModelParams) -> f64 {
    let hw = params.hbar_omega();
    let a = params.e0() / hw;
    let b = 2.0 * params.j() / hw;
    a * a + b * b
}

/// All estimates for one parameter set; `None` where an expression is
/// undefined (zero coupling, or the delocalized pole).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerturbativeEstimates {
    pub f00: f64,
    pub rho_pm_localized: Option<f64>,
    pub e0_fragility_threshold: Option<f64>,
    pub threshold_variant: ThresholdVariant,
    pub rho_pm_delocalized: Option<f64>,
    pub entropy_delocalized: Option<f64>,
    pub resonance_metric: f64,
}

pub fn estimates(params: &ModelParams, variant: ThresholdVariant) -> PerturbativeEstimates {
    PerturbativeEstimates {
        f00: franck_condon_overlap(params),
        rho_pm_localized: rho_pm_localized(params).ok(),
        e0_fragility_threshold: e0_fragility_threshold(params, variant).ok(),
        threshold_variant: variant,
        rho_pm_delocalized: rho_pm_delocalized(params).ok(),
        entropy_delocalized: entropy_delocalized_approx(params).ok(),
        resonance_metric: resonance_metric(params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lam(e0: f64, hw: f64, j: f64, lambda: f64) -> ModelParams {
        ModelParams::from_lambda(e0, hw, j, lambda, "x").unwrap()
    }

    #[test]
    fn overlap_values() {
        assert_eq!(franck_condon_overlap(&lam(0.0, 1.0, -1.0, 0.0)), 1.0);
        assert_relative_eq!(franck_condon_overlap(&lam(0.0, 1.3, -1.0, 2.6)), 0.367879, epsilon = 1e-6);
        let ammonia = lam(0.0, 1700.0, -60000.0, 160000.0);
        let f = franck_condon_overlap(&ammonia);
        assert_relative_eq!(f, libm::exp(-160000.0 / 3400.0), max_relative = 1e-12);
        assert!(f > 3.5e-21 && f < 3.7e-21);
    }

    #[test]
    fn localized_limits() {
        let p = lam(0.0, 1.0, -0.2, 3.0);
        assert_relative_eq!(rho_pm_localized(&p).unwrap(), libm::sqrt(franck_condon_overlap(&p)), max_relative = 1e-14);
        assert_eq!(rho_pm_localized(&lam(0.0, 1.0, -0.2, 0.0)).unwrap(), 1.0);
        assert_relative_eq!(rho_pm_localized(&lam(1e12, 1.0, -0.2, 3.0)).unwrap(), 1.0, epsilon = 1e-9);
        assert!(rho_pm_localized(&lam(0.0, 1.0, 0.0, 3.0)).is_err());
    }

    #[test]
    fn threshold_variants() {
        let p = lam(0.0, 1.0, -0.5, 0.0);
        assert_eq!(e0_fragility_threshold(&p, ThresholdVariant::PositiveExponent).unwrap(), 1.0);
        assert_eq!(e0_fragility_threshold(&p, ThresholdVariant::OverlapScaled).unwrap(), 1.0);
        let p = lam(0.0, 1.0, -1.0, 2.0);
        assert_relative_eq!(e0_fragility_threshold(&p, ThresholdVariant::PositiveExponent).unwrap(), 5.436564, epsilon = 1e-6);
        assert_relative_eq!(e0_fragility_threshold(&p, ThresholdVariant::OverlapScaled).unwrap(), 0.735759, epsilon = 1e-6);
        assert_eq!(ThresholdVariant::default(), ThresholdVariant::OverlapScaled);
    }

    #[test]
    fn delocalized_values() {
        assert_eq!(rho_pm_delocalized(&lam(0.0, 1.0, -5.0, 0.0)).unwrap(), 1.0);
        assert_relative_eq!(rho_pm_delocalized(&lam(0.0, 1.0, -5.0, 0.5)).unwrap(), 1.0 - 0.5 / 162.0, max_relative = 1e-15);
        assert_relative_eq!(rho_pm_delocalized(&lam(0.0, 1.0, -5.0, 0.5)).unwrap(), 0.996914, epsilon = 1e-6);
        assert_relative_eq!(rho_pm_delocalized(&lam(1e9, 1.0, -5.0, 0.5)).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(rho_pm_delocalized(&lam(0.0, 1.0, -0.5, 0.5)), Err(Error::DelocalizedPole));
    }

    #[test]
    fn delocalized_entropy() {
        assert_eq!(entropy_delocalized_approx(&lam(0.0, 1.0, -5.0, 0.0)).unwrap(), 0.0);
        // lambda / 2|J| = 0.1 and hw / dE = 1
        let lambda: f64 = 1.0 / libm::sqrt(1.0 + 100.0);
        let p = lam(0.0, 1.0, -5.0 * lambda, lambda);
        // rho = 0.02625 exactly; -rho log2 rho = 0.1378529
        assert_relative_eq!(entropy_delocalized_approx(&p).unwrap(), 0.1378529, epsilon = 1e-6);
        let mut last = f64::INFINITY;
        for r1 in [2.0, 4.0, 8.0, 16.0, 32.0] {
            let lambda = 1.0 / libm::sqrt(1.0 + r1 * r1);
            let s = entropy_delocalized_approx(&lam(0.0, 1.0, -r1 * lambda / 2.0, lambda)).unwrap();
            assert!(s < last);
            last = s;
        }
    }

    #[test]
    fn resonance_values() {
        assert_eq!(resonance_metric(&lam(1.0, 1.0, 0.0, 1.0)), 1.0);
        assert_eq!(resonance_metric(&lam(0.0, 1.0, -0.5, 1.0)), 1.0);
        assert_relative_eq!(resonance_metric(&lam(0.6, 1.0, -0.4, 1.0)), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn estimates_report_undefined_entries() {
        let e = estimates(&lam(0.0, 1.0, 0.0, 1.0), ThresholdVariant::PositiveExponent);
        assert!(e.rho_pm_localized.is_none());
        assert!(e.e0_fragility_threshold.is_none());
        assert!(e.entropy_delocalized.is_none());
        assert_relative_eq!(e.rho_pm_delocalized.unwrap(), 0.5, epsilon = 1e-14);
    }
}
