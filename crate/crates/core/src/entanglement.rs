//! Reduced density matrices and von Neumann entropy of a vibronic state.
//!
//! A state with coefficients `c_{k,i}` has the 2x2 electronic reduced density
//! matrix `rho^E_{kl} = sum_i c_{k,i} c_{l,i}` and the `n x n` vibrational one
//! `rho^V_{ij} = c_{1,i} c_{1,j} + c_{2,i} c_{2,j}`. Both carry the same two
//! Schmidt weights `rho` and `1 - rho`; the entropy is measured in bits.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{log2, sqrt};
use crate::{Error, Result};

/// Largest allowed deviation of a coefficient row from unit norm.
pub const NORM_TOL: f64 = 1e-8;
/// Roundoff slack for Schmidt weights outside [0, 1].
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntanglementReport {
    /// Smaller Schmidt weight, in [0, 1/2].
    pub rho: f64,
    /// von Neumann entropy in bits, in [0, 1].
    pub entropy: f64,
    /// `1 - 2 rho`.
    pub rho_pm: f64,
}

fn check_row(state: &[f64], n: usize) -> Result<()> {
    if state.len() != 2 * n {
        return Err(Error::InvalidParameter {
            name: "state",
            reason: "coefficient row length must be 2n",
        });
    }
    let norm = sqrt(state.iter().map(|c| c * c).sum());
    if !((norm - 1.0).abs() <= NORM_TOL) {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `[[rho11, rho12], [rho21, rho22]]`.
pub fn reduced_electronic(state: &[f64], n: usize) -> Result<[[f64; 2]; 2]> {
    check_row(state, n)?;
    let (c1, c2) = state.split_at(n);
    let a: f64 = c1.iter().map(|x| x * x).sum();
    let b: f64 = c1.iter().zip(c2).map(|(x, y)| x * y).sum();
    let d: f64 = c2.iter().map(|x| x * x).sum();
    Ok([[a, b], [b, d]])
}

/// The `n x n` vibrational reduced density matrix, row-major.
pub fn reduced_vibrational(state: &[f64], n: usize) -> Result<Vec<f64>> {
    check_row(state, n)?;
    let (c1, c2) = state.split_at(n);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = c1[i] * c1[j] + c2[i] * c2[j];
        }
    }
    Ok(out)
}

/// Eigenvalues `(small, large)` of a symmetric 2x2 matrix with unit trace.
fn schmidt_weights(m: [[f64; 2]; 2]) -> (f64, f64) {
    let trace = m[0][0] + m[1][1];
    let half_split = crate::math::hypot(0.5 * (m[0][0] - m[1][1]), m[0][1]);
    let large = 0.5 * trace + half_split;
    let det = m[0][0] * m[1][1] - m[0][1] * m[0][1];
    // det / large avoids cancellation in trace/2 - half_split
    let small = if large > 0.0 { det / large } else { 0.0 };
    (small, large)
}

/// Schmidt weight, entropy and `rho_pm` of a normalized coefficient row.
pub fn analyze(state: &[f64], n: usize) -> Result<EntanglementReport> {
    let mut m = reduced_electronic(state, n)?;
    let trace = m[0][0] + m[1][1];
    for row in &mut m {
        for v in row.iter_mut() {
            *v /= trace;
        }
    }
    let (small, large) = schmidt_weights(m);
    for v in [small, large] {
        if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
            return Err(Error::EigenvalueOutOfRange { value: v });
        }
    }
    let rho = small.clamp(0.0, 0.5);
    Ok(EntanglementReport {
        rho,
        entropy: binary_entropy(rho)?,
        rho_pm: 1.0 - 2.0 * rho,
    })
}

/// `-p log2 p - (1 - p) log2 (1 - p)` with `0 log 0 = 0`.
pub fn binary_entropy(rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: "must lie in [0, 1]",
        });
    }
    let term = |p: f64| if p > 0.0 { -p * log2(p) } else { 0.0 };
    Ok(term(rho) + term(1.0 - rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pure_diabat_is_unentangled() {
        let mut row = vec![0.0; 8];
        row[0] = 0.6;
        row[2] = 0.8;
        let m = reduced_electronic(&row, 4).unwrap();
        assert_relative_eq!(m[0][0], 1.0, epsilon = 1e-15);
        assert_eq!(m[1][1], 0.0);
        assert_eq!(m[0][1], 0.0);
        let r = analyze(&row, 4).unwrap();
        assert_eq!(r.entropy, 0.0);
        assert_eq!(r.rho_pm, 1.0);
    }

    #[test]
    fn orthogonal_vibrational_factors_are_maximally_entangled() {
        let h = libm::sqrt(0.5);
        let mut row = vec![0.0; 6];
        row[0] = h;
        row[3 + 1] = h;
        let m = reduced_electronic(&row, 3).unwrap();
        assert_relative_eq!(m[0][0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(m[1][1], 0.5, epsilon = 1e-15);
        assert_eq!(m[0][1], 0.0);
        let r = analyze(&row, 3).unwrap();
        assert_relative_eq!(r.entropy, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.rho_pm, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn product_with_superposed_electronic_factor() {
        // (a|1> + b|2>) (x) chi, with a shared vibrational factor
        let chi = [0.6, 0.0, 0.8];
        let (a, b) = (0.28, 0.96);
        let row: Vec<f64> = chi.iter().map(|c| a * c).chain(chi.iter().map(|c| b * c)).collect();
        let r = analyze(&row, 3).unwrap();
        assert!(r.rho < 1e-15);
        assert!(r.entropy < 1e-12);
    }

    #[test]
    fn rejects_unnormalized_rows() {
        let row = [1.0, 0.0, 0.1, 0.0];
        assert!(matches!(analyze(&row, 2), Err(Error::NotNormalized { .. })));
        assert!(reduced_electronic(&[1.0, 0.0, 0.0], 2).is_err());
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // -0.25 log2 0.25 - 0.75 log2 0.75 = 0.5 + 0.311278...
        assert_relative_eq!(binary_entropy(0.25).unwrap(), 0.811278, epsilon = 1e-6);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn rho_pm_identity() {
        let row = [0.5, 0.5, 0.5, -0.5];
        let r = analyze(&row, 2).unwrap();
        assert_eq!(r.rho_pm, 1.0 - 2.0 * r.rho);
    }
}
