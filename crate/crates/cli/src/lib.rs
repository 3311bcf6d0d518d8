//! Presets, parameter sweeps, reports and tabulated outputs on top of
//! `vibronic-core`. The `vibronic` binary is a thin clap layer over this.

use std::io;
use std::path::Path;

pub mod output;
pub mod presets;
pub mod report;
pub mod surfaces;
pub mod sweep;

pub use presets::{Coordinates, MoleculePreset, PresetCatalog};
pub use report::{solve_params, solve_preset, PointReport, PresetReport};
pub use surfaces::{sample_surfaces, SurfaceSample};
pub use sweep::{run_sweep, SweepRow, SweepSpec};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] vibronic_core::Error),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

impl AppError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        AppError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// True for errors caused by the caller's input rather than by a failure
    /// while computing.
    pub fn is_usage(&self) -> bool {
        match self {
            AppError::Usage(_) | AppError::UnknownPreset(_) | AppError::Format(_) => true,
            AppError::Core(e) => matches!(
                e,
                vibronic_core::Error::InvalidParameter { .. }
                    | vibronic_core::Error::UndefinedRatio(_)
                    | vibronic_core::Error::StateCount { .. }
            ),
            _ => false,
        }
    }
}
