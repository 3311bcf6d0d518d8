//! Model parameters of the coupled harmonic diabatic surfaces, derived
//! quantities and the Born-Oppenheimer adiabatic surfaces.
//!
//! The diabatic potential matrix in the dimensionless coordinate `Q` is
//!
//! ```text
//! V(Q) = | hw/2 (Q + delta)^2        J                  |
//!        | J                         hw/2 (Q - delta)^2 + E0 |
//! ```
//!
//! with reorganization energy `lambda = 2 hw delta^2` and electronic spacing
//! `dE = sqrt(lambda^2 + 4 J^2)` at a diabatic minimum.

use alloc::string::String;

use crate::math::{hypot, sqrt};
use crate::{Error, Result};

/// Physical parameters of the two-state one-mode model.
///
/// All energies share the unit named by `unit_label`. The canonical
/// constructor [`ModelParams::new`] stores `J <= 0` and `E0 >= 0`; a negative
/// asymmetry is removed by swapping the diabat labels (together with
/// `Q -> -Q`), so energies are then measured from the lower diabatic minimum.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawParams"))]
pub struct ModelParams {
    e0: f64,
    hbar_omega: f64,
    j: f64,
    delta: f64,
    unit_label: String,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct RawParams {
    e0: f64,
    hbar_omega: f64,
    j: f64,
    delta: f64,
    unit_label: String,
}

#[cfg(feature = "serde")]
impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::with_signed_coupling(raw.e0, raw.hbar_omega, raw.j, raw.delta, raw.unit_label)
    }
}

impl ModelParams {
    /// Canonical constructor: normalizes to `J <= 0` and `E0 >= 0`.
    pub fn new(
        e0: f64,
        hbar_omega: f64,
        j: f64,
        delta: f64,
        unit_label: impl Into<String>,
    ) -> Result<Self> {
        Self::with_signed_coupling(e0, hbar_omega, -j.abs(), delta, unit_label)
    }

    /// Like [`ModelParams::new`] but keeps the sign of `J`. Every observable
    /// depends on `|J|` only; this exists to check that.
    pub fn with_signed_coupling(
        e0: f64,
        hbar_omega: f64,
        j: f64,
        delta: f64,
        unit_label: impl Into<String>,
    ) -> Result<Self> {
        if !(hbar_omega.is_finite() && hbar_omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "hbar_omega",
                reason: "must be finite and positive",
            });
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "must be finite and nonnegative",
            });
        }
        if !e0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "e0",
                reason: "must be finite",
            });
        }
        if !j.is_finite() {
            return Err(Error::InvalidParameter {
                name: "j",
                reason: "must be finite",
            });
        }
        Ok(Self {
            e0: e0.abs(),
            hbar_omega,
            j,
            delta,
            unit_label: unit_label.into(),
        })
    }

    /// Builds parameters from the reorganization energy instead of the
    /// displacement, `delta = sqrt(lambda / (2 hw))`.
    pub fn from_lambda(
        e0: f64,
        hbar_omega: f64,
        j: f64,
        lambda: f64,
        unit_label: impl Into<String>,
    ) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: "must be finite and nonnegative",
            });
        }
        if !(hbar_omega.is_finite() && hbar_omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "hbar_omega",
                reason: "must be finite and positive",
            });
        }
        Self::new(e0, hbar_omega, j, sqrt(lambda / (2.0 * hbar_omega)), unit_label)
    }

    /// Inverts the dimensionless parametrization for a given vibrational
    /// quantum. `J` comes out nonpositive and the unit label is left empty.
    pub fn from_dimensionless(point: DimensionlessPoint, hbar_omega: f64) -> Result<Self> {
        let DimensionlessPoint { r1, r2, r3 } = point;
        if !(r2.is_finite() && r2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r2",
                reason: "must be finite and positive",
            });
        }
        if !(r1.is_finite() && r1 >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "r1",
                reason: "must be finite and nonnegative",
            });
        }
        if !(r3.is_finite() && r3 >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "r3",
                reason: "must be finite and nonnegative",
            });
        }
        let delta_e = hbar_omega / r2;
        let lambda = delta_e / hypot(1.0, r1);
        let j = -r1 * lambda / 2.0;
        Self::from_lambda(r3 * hbar_omega, hbar_omega, j, lambda, "")
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn hbar_omega(&self) -> f64 {
        self.hbar_omega
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn unit_label(&self) -> &str {
        &self.unit_label
    }

    pub fn with_unit_label(mut self, unit_label: impl Into<String>) -> Self {
        self.unit_label = unit_label.into();
        self
    }

    /// Replaces the asymmetry, keeping the canonical `E0 >= 0` form.
    pub fn with_e0(&self, e0: f64) -> Result<Self> {
        Self::with_signed_coupling(e0, self.hbar_omega, self.j, self.delta, self.unit_label.clone())
    }

    /// Same model with the opposite sign of the resonance coupling.
    pub fn flipped_coupling(&self) -> Self {
        Self {
            j: -self.j,
            ..self.clone()
        }
    }

    /// Multiplies every energy (`E0`, `hw`, `J`) by `s > 0`; `delta` is unchanged.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter {
                name: "scale",
                reason: "must be finite and positive",
            });
        }
        Self::with_signed_coupling(
            self.e0 * s,
            self.hbar_omega * s,
            self.j * s,
            self.delta,
            self.unit_label.clone(),
        )
    }

    /// Reorganization energy `2 hw delta^2`.
    pub fn lambda(&self) -> f64 {
        2.0 * self.hbar_omega * self.delta * self.delta
    }

    pub fn derive(&self) -> DerivedQuantities {
        derive(self)
    }

    /// Adiabatic ground and excited surfaces at coordinate `q`.
    pub fn bo_energies(&self, q: f64) -> (f64, f64) {
        bo_energies(self, q)
    }

    /// The two diagonal (diabatic) potentials at `q`.
    pub fn diabats(&self, q: f64) -> (f64, f64) {
        let half = 0.5 * self.hbar_omega;
        (
            half * (q + self.delta) * (q + self.delta),
            half * (q - self.delta) * (q - self.delta) + self.e0,
        )
    }
}

/// Quantities derived from [`ModelParams`].
///
/// The ratios are exposed through fallible accessors because `2|J|/lambda`
/// has no value when `lambda = 0` and `hw/dE` has none when `dE = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivedQuantities {
    pub lambda: f64,
    pub delta_e: f64,
    pub huang_rhys: f64,
    hbar_omega: f64,
    abs_j: f64,
    e0: f64,
}

impl DerivedQuantities {
    /// `2|J| / lambda`.
    pub fn r1(&self) -> Result<f64> {
        if self.lambda > 0.0 {
            Ok(2.0 * self.abs_j / self.lambda)
        } else {
            Err(Error::UndefinedRatio("2|J|/lambda"))
        }
    }

    /// `hw / dE`.
    pub fn r2(&self) -> Result<f64> {
        if self.delta_e > 0.0 {
            Ok(self.hbar_omega / self.delta_e)
        } else {
            Err(Error::UndefinedRatio("hbar_omega/dE"))
        }
    }

    /// `E0 / hw`.
    pub fn r3(&self) -> f64 {
        self.e0 / self.hbar_omega
    }

    pub fn point(&self) -> Result<DimensionlessPoint> {
        Ok(DimensionlessPoint {
            r1: self.r1()?,
            r2: self.r2()?,
            r3: self.r3(),
        })
    }
}

/// Coordinates `(2|J|/lambda, hw/dE, E0/hw)` of the model's parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DimensionlessPoint {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl DimensionlessPoint {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Self {
        Self { r1, r2, r3 }
    }
}

pub fn derive(params: &ModelParams) -> DerivedQuantities {
    let lambda = params.lambda();
    DerivedQuantities {
        lambda,
        delta_e: hypot(lambda, 2.0 * params.j),
        huang_rhys: 2.0 * params.delta * params.delta,
        hbar_omega: params.hbar_omega,
        abs_j: params.j.abs(),
        e0: params.e0,
    }
}

/// Eigenvalues of the 2x2 diabatic potential matrix at `q`, ordered
/// `(ground, excited)`.
pub fn bo_energies(params: &ModelParams, q: f64) -> (f64, f64) {
    let (v1, v2) = params.diabats(q);
    let mean = 0.5 * (v1 + v2);
    let half_gap = hypot(0.5 * (v1 - v2), params.j);
    (mean - half_gap, mean + half_gap)
}
