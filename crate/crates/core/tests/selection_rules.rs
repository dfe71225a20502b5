use nalgebra::DMatrix;
use supercoherent::basis::{basis_matrix, full_labeled_basis};
use supercoherent::operators::{exchange_operator, single_spin_operator, total_spin_squared};
use supercoherent::selection::{
    exchange_conjugation_check, selection_rule_scan, verify_final_step_identity, FORBIDDEN_TOL,
    IDENTITY_TOL,
};
use supercoherent::{Axis, HalfInt, C64};

fn ground_projector() -> DMatrix<C64> {
    let states = full_labeled_basis(4, Axis::Z).unwrap();
    let ground: Vec<_> = states
        .into_iter()
        .filter(|s| s.final_spin() == HalfInt::ZERO)
        .collect();
    let v = basis_matrix(&ground);
    &v * v.adjoint()
}

#[test]
fn final_step_identity_holds_for_small_systems_all_axes() {
    for n in 2..=4 {
        for axis in Axis::ALL {
            let r = verify_final_step_identity(n, axis).unwrap();
            assert!(r < IDENTITY_TOL, "n = {n}, axis {axis}: {r:e}");
        }
    }
    assert!(verify_final_step_identity(2, Axis::Z).unwrap() < 1e-12);
}

#[test]
fn selection_rules_hold_for_every_qubit() {
    for n in 2..=5 {
        for i in 1..=n {
            for axis in Axis::ALL {
                let r = selection_rule_scan(n, i, axis).unwrap();
                assert!(r.delta_j_rule_holds, "n = {n} i = {i} {axis}");
                assert!(r.ground_block_vanishes);
                if n % 2 == 0 {
                    assert!(r.ground_connects_only_to_j1);
                }
            }
        }
    }
}

#[test]
fn projected_single_qubit_errors_vanish() {
    let p0 = ground_projector();
    for i in 1..=4 {
        for axis in Axis::ALL {
            let s = single_spin_operator(axis, i, 4).unwrap();
            let block = &p0 * s.matrix() * &p0;
            assert!(
                block.iter().all(|z| z.norm() < FORBIDDEN_TOL),
                "qubit {i} axis {axis}"
            );
        }
    }
}

#[test]
fn exchanges_act_unitarily_on_ground_block() {
    let p0 = ground_projector();
    let s2 = total_spin_squared(4, 4).unwrap();
    let words: Vec<_> = full_labeled_basis(4, Axis::Z)
        .unwrap()
        .into_iter()
        .filter(|s| s.final_spin() == HalfInt::ZERO)
        .collect();
    let w = basis_matrix(&words);
    for i in 1..=4 {
        for j in i + 1..=4 {
            let e = exchange_operator(i, j, 4).unwrap();
            assert!(e.commutator(&s2).max_abs() < 1e-12);
            let leak = (DMatrix::<C64>::identity(16, 16) - &p0) * e.matrix() * &p0;
            assert!(leak.iter().all(|z| z.norm() < 1e-12));
            let block = w.adjoint() * e.matrix() * &w;
            let dev = (block.adjoint() * &block - DMatrix::<C64>::identity(2, 2))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-12);
        }
    }
}

#[test]
fn exchange_conjugation_everywhere() {
    for n in 2..=5 {
        for i in 1..n {
            for axis in Axis::ALL {
                assert!(exchange_conjugation_check(i, n, axis).unwrap() < 1e-12);
            }
        }
    }
    // conjugating twice is the identity map
    let e = exchange_operator(2, 4, 4).unwrap();
    let s = single_spin_operator(Axis::Y, 4, 4).unwrap();
    let twice = &(&e * &(&(&e * &s) * &e)) * &e;
    assert!(twice.max_abs_diff(&s) < 1e-12);
}
