//! Diabatic and adiabatic curves with the ground-state density, sampled on a
//! coordinate grid.

use serde::Serialize;
use vibronic_core::density::density_values;
use vibronic_core::hamiltonian::auto_solve;
use vibronic_core::ModelParams;

use crate::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceSample {
    pub q: f64,
    pub diabat1: f64,
    pub diabat2: f64,
    pub e_gs: f64,
    pub e_es: f64,
    pub ground_density: f64,
}

/// Samples all curves on an ascending `grid`. The density belongs to the
/// converged ground vibronic state.
pub fn sample_surfaces(params: &ModelParams, grid: &[f64], tol: f64) -> Result<Vec<SurfaceSample>, AppError> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(AppError::Usage("grid must be strictly ascending".into()));
    }
    let sol = auto_solve(params, 1, tol)?;
    let density = density_values(sol.state(0), sol.n_used, grid)?;
    Ok(grid
        .iter()
        .zip(density)
        .map(|(&q, ground_density)| {
            let (diabat1, diabat2) = params.diabats(q);
            let (e_gs, e_es) = params.bo_energies(q);
            SurfaceSample {
                q,
                diabat1,
                diabat2,
                e_gs,
                e_es,
                ground_density,
            }
        })
        .collect())
}

/// `"lo:hi:npts"`, evenly spaced.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, AppError> {
    let bad = || AppError::Usage(format!("grid `{text}` is not lo:hi:npts"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && hi > lo && n >= 3) {
        return Err(AppError::Usage(format!("grid `{text}` needs lo < hi and at least 3 points")));
    }
    Ok(vibronic_core::density::uniform_grid(lo, hi, n))
}
