//! Full analysis of one parameter set: converged solve, entanglement of each
//! state, ground-state modality and the fitted diabatization angle.

use alloc::vec::Vec;

use crate::density::{self, Modality};
use crate::diabatization::{self, DiabatFit, DEFAULT_FIT_LEVELS};
use crate::entanglement::{self, EntanglementReport};
use crate::hamiltonian::{self, BasisSpec, ConvergenceOptions, VibronicSolution};
use crate::model::ModelParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointOptions {
    pub convergence: ConvergenceOptions,
    /// Number of vibronic states analysed.
    pub states: usize,
    /// Levels used for the angle fit.
    pub fit_levels: usize,
}

impl Default for PointOptions {
    fn default() -> Self {
        Self {
            convergence: ConvergenceOptions::default(),
            states: 2,
            fit_levels: DEFAULT_FIT_LEVELS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointAnalysis {
    pub solution: VibronicSolution,
    pub entanglement: Vec<EntanglementReport>,
    pub modality: Modality,
    /// The ground-state density had not decayed at the default grid ends.
    pub density_grid_too_narrow: bool,
    pub fit: DiabatFit,
}

pub fn analyze_point(params: &ModelParams, options: &PointOptions) -> Result<PointAnalysis> {
    if options.states == 0 {
        return Err(Error::InvalidParameter {
            name: "states",
            reason: "need at least one state",
        });
    }
    let solution = hamiltonian::auto_solve_with(params, options.states, &options.convergence)?;
    let n = solution.n_used;
    let entanglement = (0..solution.state_count())
        .map(|s| entanglement::analyze(solution.state(s), n))
        .collect::<Result<Vec<_>>>()?;

    let grid = density::default_grid(params);
    let ground = density::profile(solution.state(0), n, &grid)?;

    let ladder = hamiltonian::solve(params, BasisSpec::new(n)?, options.fit_levels)?;
    let fit = diabatization::fit_theta(params, &ladder, options.fit_levels)?;

    Ok(PointAnalysis {
        entanglement,
        modality: ground.modality,
        density_grid_too_narrow: ground.grid_too_narrow,
        fit,
        solution,
    })
}
