use approx::assert_relative_eq;
use nalgebra::DMatrix;
use vibronic_core::density::{ho_wavefunction, trapezoid, uniform_grid};
use vibronic_core::diabatization::rotated_matrix;
use vibronic_core::hamiltonian::{build_matrix, solve};
use vibronic_core::perturbation::franck_condon_overlap;
use vibronic_core::{BasisSpec, ModelParams, SymmetricMatrix};

fn dense_spectrum(m: &SymmetricMatrix) -> Vec<f64> {
    let k = m.order();
    let d = DMatrix::from_row_slice(k, k, m.as_slice());
    let mut ev: Vec<f64> = d.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[test]
fn decoupled_spectrum_is_two_ladders() {
    let hw = 1.7;
    let n = 64;
    let params = ModelParams::new(0.3 * hw, hw, 0.0, 1.0, "").unwrap();
    let sol = solve(&params, BasisSpec::new(n).unwrap(), n).unwrap();
    let mut ladder: Vec<f64> = (0..n)
        .flat_map(|i| {
            let e = (i as f64 + 0.5) * hw;
            [e, e + 0.3 * hw]
        })
        .collect();
    ladder.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // every level with i <= n/2 on either ladder
    let cutoff = (n as f64 / 2.0 + 0.5) * hw;
    let mut checked = 0;
    for (e, want) in sol.energies.iter().zip(&ladder) {
        if *want > cutoff {
            break;
        }
        assert!((e - want).abs() <= 1e-9 * hw, "{e} vs {want}");
        checked += 1;
    }
    assert!(checked >= n / 2);
}

#[test]
fn overlap_matches_quadrature() {
    for &delta in &[0.0, 0.3, 1.0, 1.7, 2.5] {
        let params = ModelParams::new(0.0, 1.0, -0.4, delta, "").unwrap();
        let q = uniform_grid(-20.0, 20.0, 40001);
        let y: Vec<f64> = q
            .iter()
            .map(|&x| ho_wavefunction(0, x - delta) * ho_wavefunction(0, x + delta))
            .collect();
        let quad = trapezoid(&q, &y);
        assert!((quad - franck_condon_overlap(&params)).abs() <= 1e-8, "delta {delta}");
    }
}

#[test]
fn adiabatic_curvature_at_origin() {
    let h = 3e-5;
    for &(hw, j, lambda) in &[(1.0, -0.3, 1.0), (2.0, -1.5, 0.4), (0.7, -0.05, 3.0), (1.3, 0.8, 0.8)] {
        let p = ModelParams::from_lambda(0.0, hw, j, lambda, "").unwrap();
        let (g0, e0) = p.bo_energies(0.0);
        let (gp, ep) = p.bo_energies(h);
        let (gm, em) = p.bo_energies(-h);
        let x = lambda / (2.0 * f64::abs(j));
        assert_relative_eq!((gp - 2.0 * g0 + gm) / (h * h), hw * (1.0 - x), max_relative = 1e-6);
        assert_relative_eq!((ep - 2.0 * e0 + em) / (h * h), hw * (1.0 + x), max_relative = 1e-6);
    }
}

#[test]
fn solver_agrees_with_dense_reference() {
    for &(e0, hw, j, delta) in &[(0.0, 1.0, -0.5, 1.2), (0.37, 1.0, -0.1, 2.0), (2.0, 0.5, -1.3, 0.4)] {
        let params = ModelParams::new(e0, hw, j, delta, "").unwrap();
        let basis = BasisSpec::new(48).unwrap();
        let h = build_matrix(&params, basis);
        let reference = dense_spectrum(&h);
        let m = 12;
        let sol = solve(&params, basis, m).unwrap();
        let shift = params.lambda() / 4.0;
        for s in 0..m {
            let e = sol.energies[s] - shift;
            assert!((e - reference[s]).abs() <= 1e-9 * hw);
            let v = sol.state(s);
            let hv = h.matvec(v);
            let res: f64 = hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
            assert!(res <= 1e-9 * h.norm(), "residual {res}");
            let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn energies_do_not_rise_with_basis_size() {
    let params = ModelParams::new(0.2, 1.0, -0.6, 1.8, "").unwrap();
    let m = 6;
    let mut last = vec![f64::INFINITY; m];
    for n in [8, 16, 32, 64, 128, 256] {
        let sol = solve(&params, BasisSpec::new(n).unwrap(), m).unwrap();
        for s in 0..m {
            assert!(sol.energies[s] <= last[s] + 1e-12, "n={n} state {s}");
            last[s] = sol.energies[s];
        }
    }
}

#[test]
fn rotated_basis_keeps_spectrum() {
    let params = ModelParams::new(0.4, 1.0, -0.7, 1.1, "").unwrap();
    let basis = BasisSpec::new(40).unwrap();
    let reference = dense_spectrum(&build_matrix(&params, basis));
    for &theta in &[0.0, 12.5, 30.0, 45.0, 77.0, 90.0] {
        let rotated = dense_spectrum(&rotated_matrix(&params, basis, theta));
        for (a, b) in rotated.iter().zip(&reference) {
            assert!((a - b).abs() <= 1e-9, "theta {theta}");
        }
    }
}

#[test]
fn oscillator_functions_normalized_and_finite() {
    let q = uniform_grid(-12.0, 12.0, 24001);
    let y: Vec<f64> = q.iter().map(|&x| ho_wavefunction(3, x).powi(2)).collect();
    assert!((trapezoid(&q, &y) - 1.0).abs() <= 1e-8);
    for i in [0, 1, 17, 511, 2048, 4096] {
        for x in [-20.0, -7.3, 0.0, 0.5, 13.0, 20.0] {
            assert!(ho_wavefunction(i, x).is_finite(), "i={i} q={x}");
        }
    }
    assert_relative_eq!(ho_wavefunction(0, 0.0), 0.751126, epsilon = 1e-6);
    assert_eq!(ho_wavefunction(1, 0.0), 0.0);
}
