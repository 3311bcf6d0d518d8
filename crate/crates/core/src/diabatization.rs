//! Electronic-basis rotations, rotated diabatic surfaces and the fit of the
//! rotation angle to the exact vibronic levels.
//!
//! Rotating the diabatic basis by `R(theta) = [[cos, -sin], [sin, cos]]`
//! leaves every diagonal surface harmonic with frequency `hw`:
//!
//! ```text
//! q_min = -/+ delta cos 2t
//! e_min = (lambda/4) sin^2 2t + E0 sin^2 t - J sin 2t     (first)
//!         (lambda/4) sin^2 2t + E0 cos^2 t + J sin 2t     (second)
//! ```

use alloc::vec::Vec;

use crate::hamiltonian::{build_matrix, BasisSpec, SymmetricMatrix, VibronicSolution};
use crate::math::{cos, deg_to_rad, sin, sqrt};
use crate::model::ModelParams;
use crate::{Error, Result};

/// Default number of levels compared by [`fit_theta`].
pub const DEFAULT_FIT_LEVELS: usize = 10;
const COARSE_STEP_DEG: f64 = 0.5;
const REFINE_TOL_DEG: f64 = 0.01;
const MAX_THETA_DEG: f64 = 45.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RotatedDiabat {
    pub q_min: f64,
    pub e_min: f64,
    /// Vibrational quantum of the surface (always `hw`).
    pub omega: f64,
}

impl RotatedDiabat {
    pub fn potential(&self, q: f64) -> f64 {
        self.e_min + 0.5 * self.omega * (q - self.q_min) * (q - self.q_min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiabatFit {
    pub theta_opt: f64,
    pub rms: f64,
    pub levels_compared: usize,
}

/// The two diagonal surfaces of `R V(Q) R^T` for `theta` in degrees.
pub fn rotated_diabats(params: &ModelParams, theta_deg: f64) -> Result<(RotatedDiabat, RotatedDiabat)> {
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: "must lie in [0, 90] degrees",
        });
    }
    let t = deg_to_rad(theta_deg);
    let (s1, c1) = (sin(t), cos(t));
    let (s2, c2) = (sin(2.0 * t), cos(2.0 * t));
    let hw = params.hbar_omega();
    let base = 0.25 * params.lambda() * s2 * s2;
    let (e0, j, delta) = (params.e0(), params.j(), params.delta());
    Ok((
        RotatedDiabat {
            q_min: -delta * c2,
            e_min: base + e0 * s1 * s1 - j * s2,
            omega: hw,
        },
        RotatedDiabat {
            q_min: delta * c2,
            e_min: base + e0 * c1 * c1 + j * s2,
            omega: hw,
        },
    ))
}

/// Lowest `count` levels of the two harmonic ladders, merged and sorted.
pub fn diabatic_ladder(diabats: &(RotatedDiabat, RotatedDiabat), count: usize) -> Vec<f64> {
    let (a, b) = diabats;
    let mut out = Vec::with_capacity(count);
    let (mut i, mut k) = (0usize, 0usize);
    while out.len() < count {
        let ea = a.e_min + (i as f64 + 0.5) * a.omega;
        let eb = b.e_min + (k as f64 + 0.5) * b.omega;
        if ea <= eb {
            out.push(ea);
            i += 1;
        } else {
            out.push(eb);
            k += 1;
        }
    }
    out
}

fn ladder_rms(params: &ModelParams, exact: &[f64], theta_deg: f64) -> f64 {
    let diabats = rotated_diabats(params, theta_deg).expect("theta within bounds");
    let ladder = diabatic_ladder(&diabats, exact.len());
    let ss: f64 = ladder.iter().zip(exact).map(|(a, b)| (a - b) * (a - b)).sum();
    sqrt(ss / exact.len() as f64)
}

/// Rotation angle in `[0, 45]` degrees whose diabatic ladders best match the
/// lowest `count` exact levels in the RMS sense. A 0.5 degree scan is refined
/// by golden-section search to 0.01 degree; ties go to the smaller angle.
pub fn fit_theta(params: &ModelParams, exact: &VibronicSolution, count: usize) -> Result<DiabatFit> {
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            reason: "need at least one level",
        });
    }
    if exact.state_count() < count {
        return Err(Error::StateCount {
            requested: count,
            available: exact.state_count(),
        });
    }
    let levels = &exact.energies[..count];
    let rms = |theta: f64| ladder_rms(params, levels, theta);

    let steps = (MAX_THETA_DEG / COARSE_STEP_DEG) as usize;
    let (mut best_theta, mut best_rms) = (0.0, rms(0.0));
    for k in 1..=steps {
        let theta = k as f64 * COARSE_STEP_DEG;
        let r = rms(theta);
        if r < best_rms {
            best_theta = theta;
            best_rms = r;
        }
    }

    let mut lo = (best_theta - COARSE_STEP_DEG).max(0.0);
    let mut hi = (best_theta + COARSE_STEP_DEG).min(MAX_THETA_DEG);
    let inv_phi = 0.5 * (sqrt(5.0) - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (rms(x1), rms(x2));
    while hi - lo > REFINE_TOL_DEG {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = rms(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = rms(x2);
        }
    }
    let refined = 0.5 * (lo + hi);
    let refined_rms = rms(refined);
    if refined_rms < best_rms {
        best_theta = refined;
        best_rms = refined_rms;
    }
    Ok(DiabatFit {
        theta_opt: best_theta,
        rms: best_rms,
        levels_compared: count,
    })
}

/// Applies `R(theta)` (degrees) to the electronic factor of a coefficient row.
pub fn rotate_state(state: &[f64], n: usize, theta_deg: f64) -> Vec<f64> {
    let t = deg_to_rad(theta_deg);
    let (s, c) = (sin(t), cos(t));
    let (c1, c2) = state.split_at(n);
    let first = c1.iter().zip(c2).map(|(a, b)| c * a - s * b);
    let second = c1.iter().zip(c2).map(|(a, b)| s * a + c * b);
    first.chain(second).collect()
}

/// The product-basis Hamiltonian expressed in the rotated electronic basis,
/// `(R (x) 1) H (R (x) 1)^T`.
pub fn rotated_matrix(params: &ModelParams, basis: BasisSpec, theta_deg: f64) -> SymmetricMatrix {
    let h = build_matrix(params, basis);
    let n = basis.n();
    let t = deg_to_rad(theta_deg);
    let r = [[cos(t), -sin(t)], [sin(t), cos(t)]];
    let mut out = SymmetricMatrix::zeros(basis.order());
    for k in 0..2 {
        for l in k..2 {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    for a in 0..2 {
                        for b in 0..2 {
                            v += r[k][a] * h.get(a * n + i, b * n + j) * r[l][b];
                        }
                    }
                    let (row, col) = (k * n + i, l * n + j);
                    if k == l && col < row {
                        continue;
                    }
                    out.set(row, col, v);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(e0: f64, j: f64, delta: f64) -> ModelParams {
        ModelParams::with_signed_coupling(e0, 1.0, j, delta, "x").unwrap()
    }

    #[test]
    fn identity_rotation_gives_original_diabats() {
        let p = params(0.4, -0.3, 1.2);
        let (a, b) = rotated_diabats(&p, 0.0).unwrap();
        assert_eq!(a.q_min, -1.2);
        assert_eq!(b.q_min, 1.2);
        assert_eq!(a.e_min, 0.0);
        assert_relative_eq!(b.e_min, 0.4, max_relative = 1e-15);
    }

    #[test]
    fn half_rotation_centres_both_surfaces() {
        let p = params(0.0, -0.3, 1.2);
        let (a, b) = rotated_diabats(&p, 45.0).unwrap();
        let quarter = p.lambda() / 4.0;
        assert!(a.q_min.abs() < 1e-15 && b.q_min.abs() < 1e-15);
        assert_relative_eq!(a.e_min, quarter + 0.3, max_relative = 1e-14);
        assert_relative_eq!(b.e_min, quarter - 0.3, max_relative = 1e-14);
    }

    #[test]
    fn out_of_range_angles_rejected() {
        let p = params(0.0, -0.3, 1.2);
        assert!(rotated_diabats(&p, -1.0).is_err());
        assert!(rotated_diabats(&p, 90.5).is_err());
    }

    #[test]
    fn complementary_angle_swaps_labels() {
        let p = params(0.37, -0.6, 0.9);
        let q = p.flipped_coupling();
        for &t in &[0.0, 10.0, 33.3, 45.0, 71.0] {
            let (a, b) = rotated_diabats(&p, t).unwrap();
            let (c, d) = rotated_diabats(&q, 90.0 - t).unwrap();
            assert_relative_eq!(a.q_min, d.q_min, epsilon = 1e-14);
            assert_relative_eq!(a.e_min, d.e_min, epsilon = 1e-14);
            assert_relative_eq!(b.q_min, c.q_min, epsilon = 1e-14);
            assert_relative_eq!(b.e_min, c.e_min, epsilon = 1e-14);
        }
    }

    #[test]
    fn ladders() {
        let p = params(0.0, 0.0, 1.0);
        let pair = rotated_diabats(&p, 0.0).unwrap();
        assert_eq!(diabatic_ladder(&pair, 6), [0.5, 0.5, 1.5, 1.5, 2.5, 2.5]);

        let p = params(1.0, 0.0, 1.0);
        let pair = rotated_diabats(&p, 0.0).unwrap();
        assert_eq!(diabatic_ladder(&pair, 5), [0.5, 1.5, 1.5, 2.5, 2.5]);

        // 2|J| = hw at 45 degrees: e_min = lambda/4 -/+ J are one quantum apart
        let p = params(0.0, -0.5, 1.0);
        let pair = rotated_diabats(&p, 45.0).unwrap();
        let ladder = diabatic_ladder(&pair, 7);
        let base = p.lambda() / 4.0 - 0.5 + 0.5;
        let want = [0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        for (got, w) in ladder.iter().zip(want) {
            assert_relative_eq!(*got, base + w, epsilon = 1e-14);
        }
    }

    #[test]
    fn rotate_state_is_orthogonal() {
        let row = [0.1, 0.5, -0.2, 0.3, 0.7, -0.1];
        let r = rotate_state(&row, 3, 27.0);
        let back = rotate_state(&r, 3, -27.0);
        for (a, b) in row.iter().zip(&back) {
            assert_relative_eq!(a, b, epsilon = 1e-15);
        }
    }
}
