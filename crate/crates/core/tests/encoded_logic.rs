use nalgebra::{DMatrix, Matrix2};
use supercoherent::logic::{
    axis_states, decode, encode, gate_fidelity, gate_under_noise, grid_argmax, h8_ground_space,
    optimal_delta, EncodedGateSpec,
};
use supercoherent::open_system::{build_model, evolve_with, Couplings, EvolveOptions};
use supercoherent::{SystemSpec, C64};

fn spec() -> SystemSpec {
    SystemSpec::new(4, 1.0).unwrap()
}

fn gate(delta: f64, duration: f64) -> EncodedGateSpec {
    EncodedGateSpec {
        couplings: vec![((1, 2), delta), ((2, 3), 0.5 * delta)],
        duration,
    }
}

#[test]
fn closed_gate_matches_ideal_unitary() {
    let model = build_model(spec(), 1.0, Couplings::uniform(0.1), None)
        .unwrap()
        .without_dissipators();
    for duration in [0.5, 10.0, std::f64::consts::PI / 0.05] {
        let out = gate_under_noise(&gate(0.05, duration), &model).unwrap();
        assert!(
            out.unitary_error < 1e-6,
            "t = {duration}: {}",
            out.unitary_error
        );
        assert!((out.average_fidelity - 1.0).abs() < 1e-6);
        assert!(out.warnings.is_empty());
    }
}

#[test]
fn no_coupling_is_identity() {
    let model = build_model(spec(), 1.0, Couplings::uniform(0.1), None)
        .unwrap()
        .without_dissipators();
    let out = gate_under_noise(&gate(0.0, 5.0), &model).unwrap();
    assert!((out.achieved - Matrix2::identity())
        .iter()
        .all(|z| z.norm() < 1e-8));
}

#[test]
fn colder_bath_gives_better_gates() {
    let deficit = |beta: f64| {
        let model = build_model(spec(), beta, Couplings::uniform(0.1), None).unwrap();
        1.0 - gate_under_noise(&gate(0.05, 20.0), &model)
            .unwrap()
            .average_fidelity
    };
    let (warm, cold) = (deficit(2.0), deficit(4.0));
    assert!(cold > 0.0 && cold < warm, "cold {cold} warm {warm}");
}

#[test]
fn strong_couplings_are_flagged() {
    let model = build_model(spec(), 1.0, Couplings::uniform(0.1), None)
        .unwrap()
        .without_dissipators();
    let out = gate_under_noise(&gate(0.3, 1.0), &model).unwrap();
    assert_eq!(out.warnings.len(), 2);
    let bad = EncodedGateSpec {
        couplings: vec![((3, 1), 0.1)],
        duration: 1.0,
    };
    assert!(gate_under_noise(&bad, &model).is_err());
}

#[test]
fn closed_control_never_leaks() {
    let g = gate(0.08, 0.0);
    let model = build_model(spec(), 1.0, Couplings::uniform(0.1), None)
        .unwrap()
        .without_dissipators()
        .with_hamiltonian_term(&g.control_hamiltonian().unwrap())
        .unwrap();
    let psi = encode(C64::from(0.6), C64::new(0.0, 0.8)).unwrap().vector;
    let mut rho0 = &psi * psi.adjoint() * C64::from(0.5);
    // population in the excited sectors too
    rho0 += DMatrix::<C64>::identity(16, 16) * C64::from(0.5 / 16.0);
    let traj = evolve_with(
        &model,
        &rho0,
        &EvolveOptions {
            t_final: 20.0,
            dt: 0.01,
            record_every: 100,
        },
    )
    .unwrap();
    let first = &traj.sector_populations[0];
    for pops in &traj.sector_populations {
        for (a, b) in pops.iter().zip(first) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn decode_inverts_encode_on_axis_states() {
    for (a, b) in axis_states() {
        let s = encode(a, b).unwrap();
        let d = decode(&(&s.vector * s.vector.adjoint())).unwrap();
        let target = nalgebra::Vector2::new(a, b);
        let fidelity = target.dotc(&(d.logical * target)).re;
        assert!((fidelity - 1.0).abs() < 1e-12);
        assert!(d.leakage.abs() < 1e-12);
    }
}

#[test]
fn fidelity_optimum() {
    for beta in [1.0, 2.0, 5.0] {
        let step = 1e-3;
        let (best, f) = grid_argmax(1.0, beta, step, 1.0).unwrap();
        let analytic = optimal_delta(beta).unwrap();
        assert!(
            (best - analytic).abs() <= step + 1e-12,
            "beta {beta}: {best}"
        );
        let at_opt = gate_fidelity(analytic, 1.0, beta).unwrap().value;
        assert!((at_opt - (beta - 1.0).exp() / beta).abs() < 1e-9);
        assert!(f <= at_opt + 1e-12);
    }
}

#[test]
fn eight_qubit_ground_space() {
    let gs = h8_ground_space().unwrap();
    assert_eq!(gs.dimension, 14);
    assert!(gs.product_residuals.iter().all(|r| *r < 1e-10));
    assert_eq!(gs.exchange_residuals.len(), 28);
    assert!(gs.exchange_residuals.iter().all(|(_, r)| *r < 1e-10));
}
