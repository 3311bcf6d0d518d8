//! Lowest eigenpairs of a real symmetric band matrix.
//!
//! The matrix is reduced to tridiagonal form with Givens rotations and
//! bulge chasing (Schwarz), the requested eigenvalues are isolated by Sturm
//! bisection, and eigenvectors come from inverse iteration with a banded LU
//! factorization of the original matrix. Work is O(N^2 b) for the reduction
//! and O(N b^2 m) for the vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{atan2, cos, hypot, sin, sqrt};
use crate::{Error, Result};

/// Symmetric band matrix in lower storage: `data[i * (width + 1) + d]` holds
/// `A[i, i - d]`.
#[derive(Debug, Clone)]
pub(crate) struct SymBand {
    order: usize,
    width: usize,
    data: Vec<f64>,
}

impl SymBand {
    pub(crate) fn zeros(order: usize, width: usize) -> Self {
        Self {
            order,
            width,
            data: vec![0.0; order * (width + 1)],
        }
    }

    pub(crate) fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        if d > self.width {
            0.0
        } else {
            self.data[i * (self.width + 1) + d]
        }
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        if d > self.width {
            debug_assert!(v == 0.0, "fill outside band at ({i}, {j}): {v}");
            return;
        }
        self.data[i * (self.width + 1) + d] = v;
    }

    /// Copy with room for `extra` more off-diagonals.
    fn widened(&self, extra: usize) -> Self {
        let mut out = Self::zeros(self.order, self.width + extra);
        for i in 0..self.order {
            for d in 0..=self.width.min(i) {
                out.set(i, i - d, self.get(i, i - d));
            }
        }
        out
    }

    pub(crate) fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.order;
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.width);
            let hi = (i + self.width + 1).min(n);
            *yi = (lo..hi).map(|j| self.get(i, j) * x[j]).sum();
        }
    }

    /// Infinity norm (max absolute row sum).
    pub(crate) fn norm_inf(&self) -> f64 {
        let n = self.order;
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(self.width);
                let hi = (i + self.width + 1).min(n);
                (lo..hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `A <- G A G^T` for the rotation `[[c, s], [-s, c]]` acting on rows and
    /// columns `p, p + 1`.
    fn rotate(&mut self, p: usize, c: f64, s: f64) {
        let q = p + 1;
        let lo = p.saturating_sub(self.width);
        let hi = (q + self.width + 1).min(self.order);
        for i in lo..hi {
            if i == p || i == q {
                continue;
            }
            let a = self.get(i, p);
            let b = self.get(i, q);
            self.set(i, p, c * a + s * b);
            self.set(i, q, -s * a + c * b);
        }
        let app = self.get(p, p);
        let aqq = self.get(q, q);
        let apq = self.get(p, q);
        self.set(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
        self.set(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
        self.set(p, q, c * s * (aqq - app) + (c * c - s * s) * apq);
    }
}

/// Orthogonal reduction to tridiagonal form; returns (diagonal, subdiagonal).
fn tridiagonalize(band: &SymBand) -> (Vec<f64>, Vec<f64>) {
    let n = band.order;
    let b = band.width;
    if b > 1 {
        let mut a = band.widened(1);
        for k in 0..n.saturating_sub(2) {
            for d in (2..=b).rev() {
                let mut row = k + d;
                let mut col = k;
                while row < n {
                    let x = a.get(row - 1, col);
                    let y = a.get(row, col);
                    if y == 0.0 {
                        break;
                    }
                    let r = hypot(x, y);
                    a.rotate(row - 1, x / r, y / r);
                    a.set(row, col, 0.0);
                    // bulge at (row + b, row - 1)
                    col = row - 1;
                    row += b;
                }
            }
        }
        let diag = (0..n).map(|i| a.get(i, i)).collect();
        let off = (1..n).map(|i| a.get(i, i - 1)).collect();
        (diag, off)
    } else {
        let diag = (0..n).map(|i| band.get(i, i)).collect();
        let off = (1..n).map(|i| band.get(i, i - 1)).collect();
        (diag, off)
    }
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `m` smallest eigenvalues, ascending, by bisection.
fn lowest_eigenvalues(diag: &[f64], off: &[f64], m: usize) -> Vec<f64> {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut max_off2: f64 = 0.0;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
        if i + 1 < n {
            max_off2 = max_off2.max(off[i] * off[i]);
        }
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pad = 2.0 * f64::EPSILON * scale * n as f64 + f64::MIN_POSITIVE;
    lo -= pad;
    hi += pad;
    let pivmin = f64::MIN_POSITIVE * max_off2.max(1.0);
    let abs_tol = f64::EPSILON * scale;

    let mut values = Vec::with_capacity(m);
    let mut floor = lo;
    for k in 0..m {
        let mut a = floor;
        let mut b = hi;
        for _ in 0..256 {
            let mid = 0.5 * (a + b);
            if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) + abs_tol || mid == a || mid == b {
                break;
            }
            if sturm_count(diag, off, mid, pivmin) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        let value = 0.5 * (a + b);
        values.push(value);
        floor = a;
    }
    values
}

/// Banded LU with partial pivoting of `A - shift I`.
struct BandLu {
    order: usize,
    kl: usize,
    ku: usize,
    // row i stores columns i - kl ..= i + ku + kl
    rows: Vec<f64>,
    mult: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn stride(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.rows[i * self.stride() + (j + self.kl - i)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let s = self.stride();
        &mut self.rows[i * s + (j + self.kl - i)]
    }

    fn factor(band: &SymBand, shift: f64, tiny: f64) -> Self {
        let n = band.order();
        let kl = band.width;
        let ku = band.width;
        let mut lu = Self {
            order: n,
            kl,
            ku,
            rows: vec![0.0; n * (2 * kl + ku + 1)],
            mult: vec![0.0; n * kl],
            piv: vec![0; n],
        };
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku + 1).min(n);
            for j in lo..hi {
                let v = band.get(i, j) - if i == j { shift } else { 0.0 };
                *lu.at_mut(i, j) = v;
            }
        }
        let reach = kl + ku;
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = lu.at(j, j).abs();
            for r in (j + 1)..=last {
                let v = lu.at(r, j).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            lu.piv[j] = p;
            let cmax = (j + reach).min(n - 1);
            if p != j {
                for c in j..=cmax {
                    let a = lu.at(j, c);
                    let b = if c <= p + reach { lu.at(p, c) } else { 0.0 };
                    *lu.at_mut(j, c) = b;
                    if c <= p + reach {
                        *lu.at_mut(p, c) = a;
                    }
                }
            }
            if lu.at(j, j).abs() < tiny {
                *lu.at_mut(j, j) = tiny;
            }
            let pivot = lu.at(j, j);
            for r in (j + 1)..=last {
                let f = lu.at(r, j) / pivot;
                lu.mult[j * kl + (r - j - 1)] = f;
                *lu.at_mut(r, j) = 0.0;
                if f != 0.0 {
                    for c in (j + 1)..=cmax {
                        let u = lu.at(j, c);
                        *lu.at_mut(r, c) -= f * u;
                    }
                }
            }
        }
        lu
    }

    fn solve(&self, x: &mut [f64]) {
        let n = self.order;
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                x.swap(j, p);
            }
            let last = (j + self.kl).min(n - 1);
            for r in (j + 1)..=last {
                x[r] -= self.mult[j * self.kl + (r - j - 1)] * x[j];
            }
        }
        let reach = self.kl + self.ku;
        for i in (0..n).rev() {
            let hi = (i + reach).min(n - 1);
            let mut s = x[i];
            for (c, xc) in x.iter().enumerate().take(hi + 1).skip(i + 1) {
                s -= self.at(i, c) * xc;
            }
            x[i] = s / self.at(i, i);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = sqrt(dot(x, x));
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Flips `v` so that its leading large component is positive. The first
/// component within a relative 1e-8 of the largest magnitude decides, which
/// keeps the choice stable when mirror-image components tie.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(lead) = v.iter().find(|x| x.abs() >= (1.0 - 1e-8) * max) {
        if *lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Cyclic Jacobi for a small dense symmetric matrix (row-major, order `k`).
/// Returns eigenvalues and the eigenvectors as columns of a row-major `k x k`
/// matrix, in no particular order.
pub(crate) fn jacobi_eigen(a: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = a.to_vec();
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = 1.0;
    }
    let scale = sqrt(a.iter().map(|x| x * x).sum::<f64>());
    for _ in 0..64 {
        let off: f64 = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * k + j] * a[i * k + j])
            .sum();
        if sqrt(off) <= f64::EPSILON * scale {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let phi = 0.5 * atan2(2.0 * apq, a[q * k + q] - a[p * k + p]);
                let (c, s) = (cos(phi), sin(phi));
                for r in 0..k {
                    let (x, y) = (a[r * k + p], a[r * k + q]);
                    a[r * k + p] = c * x - s * y;
                    a[r * k + q] = s * x + c * y;
                }
                for r in 0..k {
                    let (x, y) = (a[p * k + r], a[q * k + r]);
                    a[p * k + r] = c * x - s * y;
                    a[q * k + r] = s * x + c * y;
                }
                for r in 0..k {
                    let (x, y) = (v[r * k + p], v[r * k + q]);
                    v[r * k + p] = c * x - s * y;
                    v[r * k + q] = s * x + c * y;
                }
            }
        }
    }
    ((0..k).map(|i| a[i * k + i]).collect(), v)
}

fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    // splitmix64
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x2545_F491_4F6C_DD1D);
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
        .collect()
}

#[derive(Debug, Clone)]
pub(crate) struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

const MAX_ITERATIONS: usize = 12;

/// The `m` lowest eigenpairs of `band`, ascending, each vector of unit norm
/// with a deterministic sign.
pub(crate) fn lowest_eigenpairs(band: &SymBand, m: usize) -> Result<Eigenpairs> {
    let n = band.order();
    if m > n {
        return Err(Error::StateCount {
            requested: m,
            available: n,
        });
    }
    if m == 0 {
        return Ok(Eigenpairs {
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let norm = band.norm_inf().max(f64::MIN_POSITIVE);
    let (diag, off) = tridiagonalize(band);
    let estimates = lowest_eigenvalues(&diag, &off, m);

    let tiny = f64::EPSILON * norm;
    let target = 1e-12 * norm;
    let accept = 1e-9 * norm;
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(m);
    let mut work = vec![0.0; n];
    for (k, &shift) in estimates.iter().enumerate() {
        let lu = BandLu::factor(band, shift, tiny);
        let mut x = start_vector(n, k as u64 + 1);
        normalize(&mut x);
        let mut best: Option<(f64, f64, Vec<f64>)> = None;
        for _ in 0..MAX_ITERATIONS {
            lu.solve(&mut x);
            for _ in 0..2 {
                for (_, prev) in &pairs {
                    let overlap = dot(&x, prev);
                    x.iter_mut().zip(prev).for_each(|(xi, pi)| *xi -= overlap * pi);
                }
            }
            if normalize(&mut x) == 0.0 || x.iter().any(|v| !v.is_finite()) {
                x = start_vector(n, 1000 + k as u64);
                normalize(&mut x);
                continue;
            }
            band.matvec(&x, &mut work);
            let theta = dot(&x, &work);
            let residual = sqrt(
                work.iter()
                    .zip(&x)
                    .map(|(w, xi)| (w - theta * xi) * (w - theta * xi))
                    .sum::<f64>(),
            );
            if best.as_ref().is_none_or(|b| residual < b.1) {
                best = Some((theta, residual, x.clone()));
            }
            if residual <= target {
                break;
            }
        }
        match best {
            Some((theta, residual, mut v)) if residual <= accept => {
                fix_sign(&mut v);
                pairs.push((theta, v));
            }
            _ => {
                return Err(Error::EigenSolver {
                    order: n,
                    reason: "inverse iteration did not converge",
                })
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(Eigenpairs { values, vectors })
}
