//! Product-basis Hamiltonian, exact diagonalization and basis-size control.
//!
//! Basis functions are `phi_k (x) chi_i` with electronic index `k` in {0, 1}
//! (diabat 1 and 2) and harmonic-oscillator level `i` in `0..n`, laid out as
//! `k * n + i`. Matrix elements:
//!
//! ```text
//! <1i|H|1i>   = (i + 1/2) hw          <1i|H|1,i+1> = -delta hw sqrt((i+1)/2)
//! <2i|H|2i>   = E0 + (i + 1/2) hw     <2i|H|2,i+1> = +delta hw sqrt((i+1)/2)
//! <1i|H|2j>   = J delta_ij
//! ```
//!
//! The constant `hw delta^2 / 2 = lambda / 4` of the displaced diabats is left
//! out of the matrix and added back to reported energies, so energies share
//! the zero of the diabatic potentials.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::{self, SymBand};
use crate::entanglement;
use crate::math::{atan2, cos, sin, sqrt};
use crate::model::ModelParams;
use crate::{Error, Result};

/// Default relative gap below which adjacent levels count as degenerate.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;
/// Default convergence tolerance for [`auto_solve`].
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_N_START: usize = 32;
pub const DEFAULT_N_MAX: usize = 4096;

/// Truncated product basis: `n` oscillator functions per diabat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisSpec {
    n: usize,
}

impl BasisSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "basis needs at least two oscillator functions",
            });
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        2 * self.n
    }

    /// Position of `phi_k chi_i` in a coefficient row; `k` is 0 or 1.
    pub fn index(&self, k: usize, i: usize) -> usize {
        debug_assert!(k < 2 && i < self.n);
        k * self.n + i
    }
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
        self.data[j * self.order + i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.order).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.order)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        sqrt(self.data.iter().map(|v| v * v).sum())
    }
}

#[inline]
fn ladder_coupling(delta: f64, i: usize) -> f64 {
    delta * sqrt((i as f64 + 1.0) / 2.0)
}

/// The `2n x 2n` Hamiltonian in the energy unit of `params`.
pub fn build_matrix(params: &ModelParams, basis: BasisSpec) -> SymmetricMatrix {
    let n = basis.n();
    let hw = params.hbar_omega();
    let mut h = SymmetricMatrix::zeros(basis.order());
    for i in 0..n {
        let level = (i as f64 + 0.5) * hw;
        let (a, b) = (basis.index(0, i), basis.index(1, i));
        h.set(a, a, level);
        h.set(b, b, params.e0() + level);
        h.set(a, b, params.j());
        if i + 1 < n {
            let t = ladder_coupling(params.delta(), i) * hw;
            h.set(a, basis.index(0, i + 1), -t);
            h.set(b, basis.index(1, i + 1), t);
        }
    }
    h
}

/// Same Hamiltonian in units of `hw`, with the two diabats interleaved
/// (`2 i + k`) so that it has half-bandwidth 2.
fn band_matrix(params: &ModelParams, n: usize) -> SymBand {
    let hw = params.hbar_omega();
    let (e0, j) = (params.e0() / hw, params.j() / hw);
    let mut h = SymBand::zeros(2 * n, 2);
    for i in 0..n {
        let level = i as f64 + 0.5;
        h.set(2 * i, 2 * i, level);
        h.set(2 * i + 1, 2 * i + 1, e0 + level);
        h.set(2 * i + 1, 2 * i, j);
        if i + 1 < n {
            let t = ladder_coupling(params.delta(), i);
            h.set(2 * i + 2, 2 * i, -t);
            h.set(2 * i + 3, 2 * i + 1, t);
        }
    }
    h
}

/// Lowest vibronic eigenstates of a truncated basis.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VibronicSolution {
    /// Ascending energies, measured from the diabatic potential zero.
    pub energies: Vec<f64>,
    /// `energies.len()` rows of `2 n_used` coefficients, row-major.
    pub coefficients: Vec<f64>,
    pub n_used: usize,
    /// Set by [`auto_solve`] when the basis-size test passed; plain
    /// [`solve`] never claims convergence.
    pub converged: bool,
    /// `E1 - E0`, when at least two states were computed.
    pub gap_01: Option<f64>,
}

impl VibronicSolution {
    pub fn state_count(&self) -> usize {
        self.energies.len()
    }

    /// Coefficient row of state `s`.
    pub fn state(&self, s: usize) -> &[f64] {
        let len = 2 * self.n_used;
        &self.coefficients[s * len..(s + 1) * len]
    }

    /// Keeps the lowest `m` states.
    pub fn truncated(mut self, m: usize) -> Self {
        let m = m.min(self.state_count());
        self.energies.truncate(m);
        self.coefficients.truncate(m * 2 * self.n_used);
        self.gap_01 = gap(&self.energies);
        self
    }

    fn state_mut(&mut self, s: usize) -> &mut [f64] {
        let len = 2 * self.n_used;
        &mut self.coefficients[s * len..(s + 1) * len]
    }
}

fn gap(energies: &[f64]) -> Option<f64> {
    (energies.len() >= 2).then(|| energies[1] - energies[0])
}

/// Lowest `m` eigenpairs in the given basis. Degenerate clusters are
/// resolved by [`localize_degenerate`]; the last state may belong to a
/// cluster whose partner was not requested, so ask for one extra state when
/// its vector matters.
pub fn solve(params: &ModelParams, basis: BasisSpec, m: usize) -> Result<VibronicSolution> {
    let n = basis.n();
    if m > basis.order() {
        return Err(Error::StateCount {
            requested: m,
            available: basis.order(),
        });
    }
    let band = band_matrix(params, n);
    let pairs = eigen::lowest_eigenpairs(&band, m)?;
    let hw = params.hbar_omega();
    let shift = params.lambda() / 4.0;
    let energies: Vec<f64> = pairs.values.iter().map(|e| e * hw + shift).collect();
    let mut coefficients = vec![0.0; m * 2 * n];
    for (s, v) in pairs.vectors.iter().enumerate() {
        let row = &mut coefficients[s * 2 * n..(s + 1) * 2 * n];
        for i in 0..n {
            row[i] = v[2 * i];
            row[n + i] = v[2 * i + 1];
        }
        // sign convention in the block layout
        eigen::fix_sign(row);
    }
    let sol = VibronicSolution {
        gap_01: gap(&energies),
        energies,
        coefficients,
        n_used: n,
        converged: false,
    };
    Ok(localize_degenerate(&sol, params, DEFAULT_GAP_TOL))
}

/// Runs of adjacent states closer than `threshold`, as `start..end` with at
/// least two members.
fn degenerate_clusters(energies: &[f64], threshold: f64) -> Vec<core::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for s in 1..=energies.len() {
        if s == energies.len() || energies[s] - energies[s - 1] >= threshold {
            if s - start >= 2 {
                out.push(start..s);
            }
            start = s;
        }
    }
    out
}

/// Within every cluster of states closer than `gap_tol * hw`, replaces the
/// vectors by eigenvectors of the diabat-2 population, most diabat-1-like
/// first.
///
/// Numerically degenerate levels leave any rotation of their vectors
/// equally valid. This fixes one: at `J = 0` it gives block-pure states,
/// and at the exact crossings that occur for `E0` a multiple of `hw` it
/// gives the well-localized states that are the limits from either side.
/// [`parity_project`] overrides it when `E0 = 0` and `J != 0`.
pub fn localize_degenerate(
    solution: &VibronicSolution,
    params: &ModelParams,
    gap_tol: f64,
) -> VibronicSolution {
    let mut out = solution.clone();
    let n = solution.n_used;
    for cluster in degenerate_clusters(&solution.energies, gap_tol * params.hbar_omega()) {
        let k = cluster.len();
        let rows: Vec<&[f64]> = cluster.clone().map(|s| solution.state(s)).collect();
        let mut pop = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                pop[a * k + b] = dot(&rows[a][n..], &rows[b][n..]);
            }
        }
        let (values, vectors) = eigen::jacobi_eigen(&pop, k);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
        for (slot, &col) in order.iter().enumerate() {
            let mut v = vec![0.0; 2 * n];
            for (a, row) in rows.iter().enumerate() {
                let w = vectors[a * k + col];
                v.iter_mut().zip(row.iter()).for_each(|(x, r)| *x += w * r);
            }
            let norm = sqrt(dot(&v, &v));
            v.iter_mut().for_each(|x| *x /= norm);
            eigen::fix_sign(&mut v);
            out.state_mut(cluster.start + slot).copy_from_slice(&v);
        }
    }
    out
}

/// Basis-size control for [`auto_solve_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceOptions {
    /// Entropy tolerance (bits); energies must also agree to `tol * hw`.
    pub tol: f64,
    pub n_start: usize,
    pub n_max: usize,
    pub gap_tol: f64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            n_start: DEFAULT_N_START,
            n_max: DEFAULT_N_MAX,
            gap_tol: DEFAULT_GAP_TOL,
        }
    }
}

impl ConvergenceOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Solves with doubling basis sizes until energies and entropies of all `m`
/// states stop changing. See [`auto_solve_with`].
pub fn auto_solve(params: &ModelParams, m: usize, tol: f64) -> Result<VibronicSolution> {
    auto_solve_with(params, m, &ConvergenceOptions::with_tol(tol))
}

/// Doubles `n` from `n_start` until `|S(2n) - S(n)| < tol` for every state and
/// every energy moves by less than `tol * hw`, returning the smaller basis.
/// If `n_max` is reached first the `n_max` result comes back with
/// `converged = false`.
///
/// When `E0 = 0` and `J != 0` near-degenerate pairs are resolved with
/// [`parity_project`] before entropies are compared.
pub fn auto_solve_with(
    params: &ModelParams,
    m: usize,
    options: &ConvergenceOptions,
) -> Result<VibronicSolution> {
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "must be positive",
        });
    }
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "need at least one state",
        });
    }
    let n_start = options.n_start.max(2);
    let n_max = options.n_max.max(n_start);
    if m > 2 * n_start {
        return Err(Error::StateCount {
            requested: m,
            available: 2 * n_start,
        });
    }
    let project = params.e0() == 0.0 && params.j() != 0.0;
    let run = |n: usize| -> Result<(VibronicSolution, Vec<f64>)> {
        // one extra state so that a degenerate partner is never cut off
        let extra = (m + 1).min(2 * n);
        let mut sol = solve(params, BasisSpec::new(n)?, extra)?;
        if project {
            sol = parity_project(&sol, params, options.gap_tol);
        }
        let sol = sol.truncated(m);
        let entropies = (0..m)
            .map(|s| entanglement::analyze(sol.state(s), n).map(|r| r.entropy))
            .collect::<Result<Vec<_>>>()?;
        Ok((sol, entropies))
    };

    let hw = params.hbar_omega();
    let mut n = n_start;
    let (mut prev, mut prev_s) = run(n)?;
    while 2 * n <= n_max {
        let (next, next_s) = run(2 * n)?;
        let entropies_ok = prev_s.iter().zip(&next_s).all(|(a, b)| (a - b).abs() < options.tol);
        let energies_ok = prev
            .energies
            .iter()
            .zip(&next.energies)
            .all(|(a, b)| (a - b).abs() < options.tol * hw);
        if entropies_ok && energies_ok {
            prev.converged = true;
            return Ok(prev);
        }
        prev = next;
        prev_s = next_s;
        n *= 2;
    }
    prev.converged = false;
    Ok(prev)
}

/// Applies the well-swap parity `c_{1,i} <-> (-1)^i c_{2,i}` to a row.
pub fn apply_parity(row: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        out[i] = sign * row[n + i];
        out[n + i] = sign * row[i];
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Replaces every adjacent pair closer than `gap_tol * hw` by parity
/// eigenvectors, the symmetric combination first when `J < 0` and the
/// antisymmetric one first when `J > 0`. A no-op unless `E0 = 0` and
/// `J != 0`; at `J = 0` the diabats are decoupled and the block-pure
/// vectors are kept.
pub fn parity_project(
    solution: &VibronicSolution,
    params: &ModelParams,
    gap_tol: f64,
) -> VibronicSolution {
    let mut out = solution.clone();
    if params.e0() != 0.0 || params.j() == 0.0 {
        return out;
    }
    let n = solution.n_used;
    let threshold = gap_tol * params.hbar_omega();
    let m = solution.state_count();
    let mut s = 0;
    while s + 1 < m {
        if solution.energies[s + 1] - solution.energies[s] >= threshold {
            s += 1;
            continue;
        }
        let u = solution.state(s);
        let v = solution.state(s + 1);
        let pu = apply_parity(u, n);
        let pv = apply_parity(v, n);
        let a = dot(u, &pu);
        let b = 0.5 * (dot(u, &pv) + dot(v, &pu));
        let c = dot(v, &pv);
        // eigenvector of [[a, b], [b, c]] with the larger (+1) eigenvalue
        let phi = 0.5 * atan2(2.0 * b, a - c);
        let (cs, sn) = (cos(phi), sin(phi));
        let mut even: Vec<f64> = u.iter().zip(v).map(|(x, y)| cs * x + sn * y).collect();
        let mut odd: Vec<f64> = u.iter().zip(v).map(|(x, y)| -sn * x + cs * y).collect();
        eigen::fix_sign(&mut even);
        eigen::fix_sign(&mut odd);
        let (first, second) = if params.j() < 0.0 { (even, odd) } else { (odd, even) };
        out.state_mut(s).copy_from_slice(&first);
        out.state_mut(s + 1).copy_from_slice(&second);
        s += 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(e0: f64, hw: f64, j: f64, delta: f64) -> ModelParams {
        ModelParams::with_signed_coupling(e0, hw, j, delta, "x").unwrap()
    }

    #[test]
    fn clusters() {
        let e = [0.0, 1.0, 1.0 + 1e-12, 2.0, 3.0, 3.0, 3.0, 4.0];
        assert_eq!(degenerate_clusters(&e, 1e-8), [1..3, 4..7]);
        assert!(degenerate_clusters(&[0.0, 1.0], 1e-8).is_empty());
    }

    #[test]
    fn decoupled_degenerate_pairs_stay_block_pure() {
        let p = params(0.0, 1.0, 0.0, 2.2);
        let n = 48;
        let sol = solve(&p, BasisSpec::new(n).unwrap(), 6).unwrap();
        for s in 0..6 {
            let row = sol.state(s);
            let w1: f64 = row[..n].iter().map(|c| c * c).sum();
            assert!(!(1e-12..=1.0 - 1e-12).contains(&w1), "state {s} weight {w1}");
            assert!(s % 2 == 1 || w1 > 0.5);
        }
    }

    #[test]
    fn crossing_at_integer_asymmetry_is_localized() {
        // E0 = hw: lower-well level 1 and upper-well level 0 cross exactly
        let lambda = 100.0 / libm::hypot(1.0, 0.01);
        let p = ModelParams::from_lambda(1.0, 1.0, -0.005 * lambda, lambda, "").unwrap();
        for n in [128, 256] {
            let sol = solve(&p, BasisSpec::new(n).unwrap(), 3).unwrap();
            assert!((sol.energies[2] - sol.energies[1]).abs() < 1e-9);
            for s in 1..3 {
                let e = entanglement::analyze(sol.state(s), n).unwrap().entropy;
                assert!(e < 1e-3, "n={n} state {s}: {e}");
            }
        }
    }

    #[test]
    fn basis_needs_two_functions() {
        assert!(BasisSpec::new(1).is_err());
        let b = BasisSpec::new(5).unwrap();
        assert_eq!(b.index(0, 3), 3);
        assert_eq!(b.index(1, 3), 8);
    }

    #[test]
    fn matrix_elements() {
        let p = params(0.4, 2.0, -0.3, 1.5);
        let b = BasisSpec::new(6).unwrap();
        let h = build_matrix(&p, b);
        assert!(h.is_symmetric());
        assert_relative_eq!(h.get(0, 1), -1.5 * 2.0 * libm::sqrt(0.5), max_relative = 1e-15);
        assert_relative_eq!(h.get(6, 7), 1.5 * 2.0 * libm::sqrt(0.5), max_relative = 1e-15);
        assert_relative_eq!(h.get(8, 9), 1.5 * 2.0 * libm::sqrt(1.5), max_relative = 1e-15);
        assert_eq!(h.get(3, 3), 7.0);
        assert_eq!(h.get(9, 9), 0.4 + 7.0);
        assert_eq!(h.get(2, 8), -0.3);
        assert_eq!(h.get(2, 9), 0.0);
        assert_eq!(h.get(0, 2), 0.0);
    }

    #[test]
    fn undisplaced_matrix_is_diagonal_plus_coupling() {
        let p = params(0.7, 1.0, -0.25, 0.0);
        let b = BasisSpec::new(5).unwrap();
        let h = build_matrix(&p, b);
        for r in 0..10 {
            for c in 0..10 {
                let want = if r == c {
                    (r % 5) as f64 + 0.5 + if r >= 5 { 0.7 } else { 0.0 }
                } else if r + 5 == c || c + 5 == r {
                    -0.25
                } else {
                    0.0
                };
                assert_eq!(h.get(r, c), want);
            }
        }
    }

    #[test]
    fn band_and_dense_agree() {
        let p = params(0.3, 1.7, 0.8, 1.1);
        let n = 7;
        let dense = build_matrix(&p, BasisSpec::new(n).unwrap());
        let band = band_matrix(&p, n);
        for k in 0..2 {
            for i in 0..n {
                for l in 0..2 {
                    for j in 0..n {
                        let d = dense.get(k * n + i, l * n + j);
                        let b = band.get(2 * i + k, 2 * j + l) * 1.7;
                        assert_relative_eq!(d, b, max_relative = 1e-14, epsilon = 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn rows_are_normalized_and_energies_sorted() {
        let p = params(0.2, 1.0, -0.4, 2.0);
        let sol = solve(&p, BasisSpec::new(64).unwrap(), 6).unwrap();
        assert!(!sol.converged);
        for s in 0..6 {
            let norm: f64 = sol.state(s).iter().map(|c| c * c).sum();
            assert!((norm.sqrt() - 1.0).abs() < 1e-10);
        }
        assert!(sol.energies.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(sol.gap_01, Some(sol.energies[1] - sol.energies[0]));
    }

    #[test]
    fn too_many_states_rejected() {
        let p = params(0.0, 1.0, -0.4, 1.0);
        assert!(matches!(
            solve(&p, BasisSpec::new(3).unwrap(), 7),
            Err(Error::StateCount { .. })
        ));
    }

    #[test]
    fn projection_leaves_nondegenerate_states_alone() {
        let p = params(0.0, 1.0, -0.5, 1.0);
        let sol = solve(&p, BasisSpec::new(40).unwrap(), 4).unwrap();
        assert!(sol.energies.windows(2).all(|w| w[1] - w[0] > 1e-8));
        assert_eq!(parity_project(&sol, &p, DEFAULT_GAP_TOL), sol);
    }

    #[test]
    fn projection_is_idempotent_and_yields_parity_states() {
        // deep wells: tunnelling splitting far below 1e-8
        let p = ModelParams::from_lambda(0.0, 1.0, -0.5, 100.0, "x").unwrap();
        let sol = solve(&p, BasisSpec::new(128).unwrap(), 4).unwrap();
        assert!(sol.energies[1] - sol.energies[0] < 1e-8);
        let once = parity_project(&sol, &p, DEFAULT_GAP_TOL);
        let twice = parity_project(&once, &p, DEFAULT_GAP_TOL);
        for (a, b) in once.coefficients.iter().zip(&twice.coefficients) {
            assert!((a - b).abs() < 1e-12);
        }
        let n = once.n_used;
        for (s, sign) in [(0, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)] {
            let row = once.state(s);
            let pr = apply_parity(row, n);
            assert!(dot(row, &pr) * sign > 1.0 - 1e-10, "state {s}");
        }
    }

    #[test]
    fn positive_coupling_puts_antisymmetric_first() {
        let p = params(0.0, 1.0, 0.5, libm::sqrt(50.0));
        let sol = solve(&p, BasisSpec::new(128).unwrap(), 2).unwrap();
        let proj = parity_project(&sol, &p, DEFAULT_GAP_TOL);
        let pr = apply_parity(proj.state(0), 128);
        assert!(dot(proj.state(0), &pr) < -1.0 + 1e-10);
    }

    #[test]
    fn auto_solve_undisplaced_converges_immediately() {
        let p = params(0.3, 1.0, -0.2, 0.0);
        let sol = auto_solve(&p, 2, 1e-6).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.n_used, DEFAULT_N_START);
    }

    #[test]
    fn auto_solve_rejects_bad_tolerance() {
        let p = params(0.3, 1.0, -0.2, 0.0);
        assert!(auto_solve(&p, 2, 0.0).is_err());
        assert!(auto_solve(&p, 0, 1e-6).is_err());
    }

    #[test]
    fn unconverged_result_is_flagged() {
        let p = params(0.0, 1.0, -0.1, 6.0);
        let opts = ConvergenceOptions {
            n_start: 4,
            n_max: 8,
            ..ConvergenceOptions::default()
        };
        let sol = auto_solve_with(&p, 2, &opts).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.n_used, 8);
    }
}
