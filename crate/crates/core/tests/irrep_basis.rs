use supercoherent::basis::{
    basis_matrix, build_basis_state, count_paths, enumerate_paths, full_labeled_basis, irrep_table,
    SpinPath, EIGEN_RESIDUAL_TOL,
};
use supercoherent::operators::total_spin_squared;
use supercoherent::{Axis, HalfInt, C64};

use nalgebra::DMatrix;

/// Every ±½ step sequence from ½ that stays non-negative, ending at `twice_j`.
fn brute_force_paths(n: usize, twice_j: i32) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    for mask in 0..(1u32 << (n - 1)) {
        let mut path = vec![1];
        for k in 0..n - 1 {
            let step = if mask >> (n - 2 - k) & 1 == 1 { 1 } else { -1 };
            path.push(path[k] + step);
        }
        if path.iter().all(|&t| t >= 0) && path[n - 1] == twice_j {
            out.push(path);
        }
    }
    out.sort();
    out
}

fn catalan(k: usize) -> usize {
    (0..k).fold(1usize, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

#[test]
fn enumeration_matches_brute_force() {
    for n in 1..=10 {
        for twice_j in (n as i32 % 2..=n as i32).step_by(2) {
            let listed: Vec<Vec<i32>> = enumerate_paths(n, HalfInt::from_twice(twice_j))
                .iter()
                .map(|p| p.steps().iter().map(|s| s.twice()).collect())
                .collect();
            assert_eq!(
                listed,
                brute_force_paths(n, twice_j),
                "n = {n}, 2J = {twice_j}"
            );
            assert_eq!(count_paths(n, HalfInt::from_twice(twice_j)), listed.len());
        }
    }
}

#[test]
fn singlet_counts_are_catalan() {
    assert_eq!(enumerate_paths(4, HalfInt::ZERO).len(), 2);
    assert_eq!(enumerate_paths(6, HalfInt::ZERO).len(), 5);
    assert_eq!(enumerate_paths(8, HalfInt::ZERO).len(), 14);
    for n in (2..=10).step_by(2) {
        assert_eq!(count_paths(n, HalfInt::ZERO), catalan(n / 2));
    }
}

#[test]
fn multiplicities_match_diagonalization() {
    for n in 1..=8 {
        let ev = total_spin_squared(n, n).unwrap().eigenvalues().unwrap();
        for row in irrep_table(n).unwrap().rows {
            let c = row.j.casimir();
            let count = ev.iter().filter(|e| (*e - c).abs() < 1e-8).count();
            assert_eq!(
                count,
                row.multiplicity * row.dimension,
                "n = {n}, J = {}",
                row.j
            );
        }
    }
}

#[test]
fn basis_is_unitary_for_every_axis() {
    for n in 1..=6 {
        for axis in Axis::ALL {
            let states = full_labeled_basis(n, axis).unwrap();
            assert_eq!(states.len(), 1 << n);
            let v = basis_matrix(&states);
            let gram = v.adjoint() * &v;
            let dev = (gram - DMatrix::<C64>::identity(1 << n, 1 << n)).camax();
            assert!(dev < 1e-10, "n = {n}, axis {axis}: {dev}");
        }
    }
}

#[test]
fn four_qubit_basis_orthonormal_and_labeled() {
    let states = full_labeled_basis(4, Axis::Z).unwrap();
    let v = basis_matrix(&states);
    assert!((v.adjoint() * &v - DMatrix::<C64>::identity(16, 16)).camax() < 1e-12);
    assert_eq!(
        states
            .iter()
            .filter(|s| s.final_spin() == HalfInt::ZERO)
            .count(),
        2
    );
    for s in &states {
        assert!(s.label_residual().unwrap() < EIGEN_RESIDUAL_TOL);
        assert!(s.m.twice().abs() <= s.final_spin().twice());
    }
}

#[test]
fn axis_change_commutes_with_partial_spins() {
    let n = 4;
    let vz = basis_matrix(&full_labeled_basis(n, Axis::Z).unwrap());
    for axis in [Axis::X, Axis::Y] {
        let va = basis_matrix(&full_labeled_basis(n, axis).unwrap());
        let w = &va * vz.adjoint();
        assert!((w.adjoint() * &w - DMatrix::<C64>::identity(16, 16)).camax() < 1e-10);
        for k in 1..=n {
            let s2 = total_spin_squared(k, n).unwrap();
            let comm = &w * s2.matrix() - s2.matrix() * &w;
            assert!(comm.camax() < 1e-10, "axis {axis}, k = {k}");
        }
    }
}

#[test]
fn build_state_agrees_with_full_basis() {
    let p = SpinPath::parse("1/2,1,3/2,1,1/2").unwrap();
    let s = build_basis_state(&p, -HalfInt::HALF, Axis::Y).unwrap();
    let all = full_labeled_basis(5, Axis::Y).unwrap();
    let same = all
        .iter()
        .find(|t| t.path == p && t.m == -HalfInt::HALF)
        .unwrap();
    assert!((same.vector.clone() - s.vector).norm() < 1e-14);
}

#[test]
fn ten_qubit_basis_builds() {
    let table = irrep_table(10).unwrap();
    assert_eq!(table.total_dimension(), 1024);
    assert_eq!(table.multiplicity(HalfInt::ZERO), 42);
    let states = full_labeled_basis(10, Axis::Z).unwrap();
    assert_eq!(states.len(), 1024);
}
