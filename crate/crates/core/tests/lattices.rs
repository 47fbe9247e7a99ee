use mqc_lab::lattices::gates::{
    bridge_cz, bridge_cz_unitary, cnot15, cnot_unitary, euler_angles, euler_rotation, to_dense,
};
use mqc_lab::lattices::{
    conversion_patch, generate_lattice, hex_to_triangular, overhead_series, run_conversion_chain,
    ChainOptions, LatticeKind, LatticeSpec, OutcomeSource, Outcomes,
};
use mqc_lab::{GraphState, PureState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_su2(rng: &mut ChaCha8Rng) -> [[Complex64; 2]; 2] {
    // Haar-random via a normalized quaternion
    let q: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (
        Complex64::new(q[0] / n, q[1] / n),
        Complex64::new(q[2] / n, q[3] / n),
    );
    [[a, -b.conj()], [b, a.conj()]]
}

#[test]
fn conversion_chain_on_small_windows() {
    let opts = ChainOptions::default();
    for (d1, d2) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let r = run_conversion_chain(d1, d2, &opts).unwrap();
        assert!(r.passed, "{d1}x{d2}: {r:#?}");
        assert_eq!(r.overhead.output_qubits, d1 * d2);
    }
}

#[test]
fn every_stage_of_the_unit_window_is_checked_on_all_branches() {
    let r = run_conversion_chain(1, 1, &ChainOptions::default()).unwrap();
    let sizes: Vec<(usize, usize)> = r
        .stages
        .iter()
        .map(|s| (s.qubits_before, s.qubits_after))
        .collect();
    assert_eq!(sizes, vec![(12, 7), (7, 6), (6, 1)]);
    for s in &r.stages {
        let c = s.check.as_ref().unwrap();
        assert!(c.exhaustive && c.deterministic, "{}", s.stage);
        assert_eq!(c.statevec_branches, 1 << c.measured);
        assert!(
            c.min_fidelity.unwrap() >= 1.0 - 1e-9,
            "{}: {:?}",
            s.stage,
            c.min_fidelity
        );
    }
}

#[test]
fn larger_windows_are_sampled_and_replayed_where_small() {
    let r = run_conversion_chain(1, 2, &ChainOptions::default()).unwrap();
    assert!(r.passed);
    // the hexagonal patch is too large for the dense replay, the later stages are not
    let replayed: Vec<bool> = r
        .stages
        .iter()
        .map(|s| s.check.as_ref().unwrap().statevec_branches > 0)
        .collect();
    assert_eq!(replayed, vec![false, true, true]);
    let last = r.stages[2].check.as_ref().unwrap();
    assert!(!last.exhaustive && last.measured > 8 && last.branches == 16);
}

#[test]
fn chain_output_is_the_generated_grid() {
    let patch = conversion_patch(3, 3).unwrap();
    let mut o = Outcomes::seeded(4, 0);
    let s1 = hex_to_triangular(&GraphState::new(patch.graph().clone()), &patch, &mut o).unwrap();
    let s2 = mqc_lab::lattices::triangular_to_kagome(&s1.state, &s1.lattice, &mut o).unwrap();
    let s3 = mqc_lab::lattices::kagome_to_square(&s2.state, &s2.lattice, (3, 3), &mut o).unwrap();
    let grid = generate_lattice(&LatticeSpec::new(LatticeKind::Square, 3, 3)).unwrap();
    let relabelled = s3
        .state
        .graph()
        .relabel(|l| grid.label_of(s3.lattice.site_of(l).unwrap()).unwrap())
        .unwrap();
    assert!(grid.matches(&relabelled));
    // intermediate patches keep the bulk degrees of their lattices
    for (lat, kind) in [
        (&s1.lattice, LatticeKind::Triangular),
        (&s2.lattice, LatticeKind::Kagome),
    ] {
        let bulk = lat.bulk();
        assert!(!bulk.is_empty());
        assert!(bulk
            .iter()
            .all(|&v| lat.graph().degree(v).unwrap() == kind.bulk_degree()));
    }
}

#[test]
fn overhead_trends_to_eight_hexagons_per_qubit() {
    let extents: Vec<(usize, usize)> = (2..=8).map(|d| (d, d)).collect();
    let fit = overhead_series(&extents).unwrap();
    assert!(
        (fit.hexagon_asymptote.unwrap() - 8.0).abs() < 1e-6,
        "{fit:?}"
    );
    assert!((fit.qubit_asymptote.unwrap() - 16.0).abs() < 1e-6);
    let ratios: Vec<f64> = fit.points.iter().map(|p| p.hexagon_ratio).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]) && ratios.iter().all(|&r| r < 8.0));
}

#[test]
fn euler_chain_reproduces_random_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let u = random_su2(&mut rng);
        let (a, b, c) = euler_angles(&u);
        let fixture = euler_rotation(a, b, c);
        let input = PureState::random(1, &mut rng);
        let input = PureState::from_amplitudes(vec![1], input.amplitudes().to_vec()).unwrap();
        let check = fixture
            .verify(&input, &to_dense(&u), &OutcomeSource::Exhaustive)
            .unwrap();
        assert_eq!(check.branches, 16);
        assert!(check.passed(1e-9), "{check:?}");
        assert!((check.total_probability - 1.0).abs() < 1e-9);
    }
}

#[test]
fn bridge_measurement_gives_controlled_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let fixture = bridge_cz();
    for _ in 0..10 {
        let input = PureState::random(2, &mut rng);
        let input = PureState::from_amplitudes(vec![1, 4], input.amplitudes().to_vec()).unwrap();
        let check = fixture
            .verify(&input, &bridge_cz_unitary(), &OutcomeSource::Exhaustive)
            .unwrap();
        assert_eq!(check.branches, 8);
        assert!(check.passed(1e-9), "{check:?}");
    }
}

#[test]
fn fifteen_qubit_cnot() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let fixture = cnot15();
    let input = PureState::random(2, &mut rng);
    let input = PureState::from_amplitudes(vec![1, 9], input.amplitudes().to_vec()).unwrap();
    let check = fixture
        .verify(&input, &cnot_unitary(), &OutcomeSource::Exhaustive)
        .unwrap();
    assert_eq!(check.branches, 1 << 13);
    assert!(check.passed(1e-9), "{check:?}");
    for seed in 0..3 {
        let input = PureState::random(2, &mut rng);
        let input = PureState::from_amplitudes(vec![1, 9], input.amplitudes().to_vec()).unwrap();
        let sampled = fixture
            .verify(
                &input,
                &cnot_unitary(),
                &OutcomeSource::Sampled { seed, runs: 32 },
            )
            .unwrap();
        assert!(sampled.passed(1e-9));
    }
}
