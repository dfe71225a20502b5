use proptest::prelude::*;
use supercoherent::operators::{
    collective_hamiltonian, exchange_operator, o_n_operator, partial_collective_spin,
    single_spin_operator, total_spin_squared, OPERATOR_TOL,
};
use supercoherent::{Axis, DenseOperator, HamiltonianForm, SystemSpec, C64};

fn axis_strategy() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
}

fn third_axis(a: Axis, b: Axis) -> Axis {
    Axis::ALL.into_iter().find(|&c| c != a && c != b).unwrap()
}

/// Counts eigenvalues near each target value.
fn multiplicities(values: &[f64], targets: &[f64]) -> Vec<usize> {
    targets
        .iter()
        .map(|t| values.iter().filter(|v| (*v - t).abs() < 1e-8).count())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutation_relations(n in 1usize..=6, j in 1usize..=6, k in 1usize..=6, a in axis_strategy(), b in axis_strategy()) {
        let (j, k) = (1 + (j - 1) % n, 1 + (k - 1) % n);
        let sa = single_spin_operator(a, j, n).unwrap();
        let sb = single_spin_operator(b, k, n).unwrap();
        let comm = sa.commutator(&sb);
        let expected = if j == k && a != b {
            let c = third_axis(a, b);
            single_spin_operator(c, j, n).unwrap().scale_complex(C64::new(0.0, Axis::levi_civita(a, b, c)))
        } else {
            DenseOperator::zeros(n).unwrap()
        };
        prop_assert!(comm.max_abs_diff(&expected) < OPERATOR_TOL);

        // {s_a^j, s_b^k} = ½δ_jk δ_ab 𝐈 + 2(1 − δ_jk) s_a^j s_b^k
        let anti = sa.anticommutator(&sb);
        let expected = if j == k {
            if a == b { DenseOperator::identity(n).unwrap().scale(0.5) } else { DenseOperator::zeros(n).unwrap() }
        } else {
            (&sa * &sb).scale(2.0)
        };
        prop_assert!(anti.max_abs_diff(&expected) < OPERATOR_TOL);
    }
}

#[test]
fn collective_spins_form_su2() {
    for n in 1..=5 {
        let sx = partial_collective_spin(Axis::X, n, n).unwrap();
        let sy = partial_collective_spin(Axis::Y, n, n).unwrap();
        let sz = partial_collective_spin(Axis::Z, n, n).unwrap();
        let i = C64::new(0.0, 1.0);
        assert!(sx.commutator(&sy).max_abs_diff(&sz.scale_complex(i)) < OPERATOR_TOL);
        assert!(sy.commutator(&sz).max_abs_diff(&sx.scale_complex(i)) < OPERATOR_TOL);
        assert!(sz.commutator(&sx).max_abs_diff(&sy.scale_complex(i)) < OPERATOR_TOL);
    }
}

#[test]
fn two_qubit_spectra() {
    let sz = partial_collective_spin(Axis::Z, 2, 2).unwrap();
    let ev = sz.eigenvalues().unwrap();
    for (a, b) in ev.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let s2 = total_spin_squared(2, 2).unwrap();
    assert_eq!(
        multiplicities(&s2.eigenvalues().unwrap(), &[0.0, 2.0]),
        vec![1, 3]
    );
}

#[test]
fn four_qubit_spin_squared_multiplicities() {
    let s2 = total_spin_squared(4, 4).unwrap();
    assert_eq!(
        multiplicities(&s2.eigenvalues().unwrap(), &[0.0, 2.0, 6.0]),
        vec![2, 9, 5]
    );
}

#[test]
fn hamiltonian_forms_agree() {
    for n in [1, 2, 3, 4, 5, 8] {
        let spec = SystemSpec::new(n, 0.7).unwrap();
        let a = collective_hamiltonian(&spec, HamiltonianForm::SpinSquared).unwrap();
        let b = collective_hamiltonian(&spec, HamiltonianForm::PairwiseHeisenberg).unwrap();
        assert!(a.max_abs_diff(&b) < OPERATOR_TOL, "n = {n}");
    }
}

#[test]
fn four_qubit_hamiltonian_spectrum() {
    let spec = SystemSpec::new(4, 1.0).unwrap();
    let h = collective_hamiltonian(&spec, HamiltonianForm::SpinSquared).unwrap();
    assert_eq!(
        multiplicities(&h.eigenvalues().unwrap(), &[0.0, 1.0, 3.0]),
        vec![2, 9, 5]
    );
}

#[test]
fn even_ground_energy_is_zero() {
    for n in [2, 4, 6] {
        let h = collective_hamiltonian(
            &SystemSpec::new(n, 2.5).unwrap(),
            HamiltonianForm::PairwiseHeisenberg,
        )
        .unwrap();
        assert!(h.eigenvalues().unwrap()[0].abs() < 1e-10);
    }
}

#[test]
fn hamiltonian_commutes_with_labeling_set() {
    for n in 2..=5 {
        let h = collective_hamiltonian(
            &SystemSpec::new(n, 1.0).unwrap(),
            HamiltonianForm::PairwiseHeisenberg,
        )
        .unwrap();
        for axis in Axis::ALL {
            assert!(
                h.commutator(&partial_collective_spin(axis, n, n).unwrap())
                    .max_abs()
                    < OPERATOR_TOL
            );
        }
        for k in 1..=n {
            assert!(h.commutator(&total_spin_squared(k, n).unwrap()).max_abs() < OPERATOR_TOL);
        }
    }
}

#[test]
fn exchange_preserves_total_spin() {
    let n = 4;
    let s2 = total_spin_squared(n, n).unwrap();
    for i in 1..=n {
        for j in i + 1..=n {
            let e = exchange_operator(i, j, n).unwrap();
            assert!(e.commutator(&s2).max_abs() < OPERATOR_TOL);
            assert!((&e * &e).max_abs_diff(&DenseOperator::identity(n).unwrap()) < OPERATOR_TOL);
        }
    }
}

/// Binomial coefficient as f64.
fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn trace_matches_irrep_sum() {
    // n_J = C(n, n/2−J) − C(n, n/2−J−1), independent of path enumeration
    for n in 1..=6usize {
        let spec = SystemSpec::new(n, 1.3).unwrap();
        let h = collective_hamiltonian(&spec, HamiltonianForm::SpinSquared).unwrap();
        let mut expected = 0.0;
        for twice_j in (n % 2..=n).step_by(2) {
            let j = twice_j as f64 / 2.0;
            let k = (n - twice_j) / 2;
            let mult = binom(n, k) - if k > 0 { binom(n, k - 1) } else { 0.0 };
            expected += mult * (2.0 * j + 1.0) * j * (j + 1.0);
        }
        expected *= 1.3 / 2.0;
        assert!((h.trace().re - expected).abs() < 1e-9, "n = {n}");
        let diag: f64 = h.eigenvalues().unwrap().iter().sum();
        assert!((diag - expected).abs() < 1e-9);
    }
}

#[test]
fn final_step_operator_properties() {
    for n in 2..=4 {
        let o = o_n_operator(n).unwrap();
        let anti = o.anticommutator(&single_spin_operator(Axis::Z, n, n).unwrap());
        assert!(anti.max_abs_diff(&partial_collective_spin(Axis::Z, n, n).unwrap()) < OPERATOR_TOL);
        for k in 1..n {
            assert!(o.commutator(&total_spin_squared(k, n).unwrap()).max_abs() < OPERATOR_TOL);
        }
    }
}
