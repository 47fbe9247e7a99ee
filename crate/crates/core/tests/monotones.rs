use mqc_lab::graphstate::{Graph, GraphState, Pauli};
use mqc_lab::monotones::{
    bell_localization_pattern, geometric_measure, n_le, run_on_graph, schmidt_measure_bounds,
    verify_bell_pattern, w_state_geometric_measure, GeometricOptions, SchmidtOptions,
};
use mqc_lab::statevec::PureState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LIMIT: usize = mqc_lab::DEFAULT_STATEVEC_LIMIT;

#[test]
fn w_state_geometric_measure_matches_closed_form() {
    let opts = GeometricOptions {
        restarts: 40,
        ..GeometricOptions::default()
    };
    let mut previous = 0.0;
    for n in 2..=6 {
        let r = geometric_measure(&PureState::w(n), &opts).unwrap();
        let expect = w_state_geometric_measure(n);
        assert!(
            (r.value - expect).abs() < 1e-6,
            "N = {n}: {} vs {expect}",
            r.value
        );
        assert!(r.value > previous && r.value < 1.0 / std::f64::consts::LN_2);
        previous = r.value;
    }
    // the closed form approaches 1/ln 2 from below
    assert!((w_state_geometric_measure(10_000) - 1.0 / std::f64::consts::LN_2).abs() < 1e-4);
}

#[test]
fn ghz4_geometric_measure_is_one() {
    let opts = GeometricOptions {
        restarts: 50,
        ..GeometricOptions::default()
    };
    let r = geometric_measure(&PureState::ghz(4), &opts).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9);
    let witness = PureState::product(vec![0, 1, 2, 3], &r.witness).unwrap();
    let f = witness.fidelity(&PureState::ghz(4)).unwrap();
    assert!((f - r.overlap).abs() < 1e-10, "{f} vs {}", r.overlap);
}

#[test]
fn geometric_measure_ignores_appended_zero_qubit() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = GeometricOptions {
        restarts: 30,
        ..GeometricOptions::default()
    };
    for _ in 0..5 {
        let s = PureState::random(rng.gen_range(2..=4), &mut rng);
        let a = geometric_measure(&s, &opts).unwrap().value;
        let b = geometric_measure(&s.with_zero_qubit(50).unwrap(), &opts)
            .unwrap()
            .value;
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn schmidt_bounds_are_ordered() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = SchmidtOptions {
        max_terms: 4,
        restarts: 8,
        ..SchmidtOptions::default()
    };
    for _ in 0..8 {
        let s = PureState::random(rng.gen_range(2..=3), &mut rng);
        let b = schmidt_measure_bounds(&s, &opts).unwrap();
        if let Some(u) = b.upper {
            assert!(b.lower <= u + 1e-12);
        }
        if b.exact {
            assert_eq!(Some(b.lower), b.upper);
            assert_eq!(2f64.powf(b.lower).fract(), 0.0);
        }
    }
    // appending |0> leaves both bounds unchanged
    let w = PureState::w(3);
    let a = schmidt_measure_bounds(&w, &opts).unwrap();
    let b = schmidt_measure_bounds(&w.with_zero_qubit(9).unwrap(), &opts).unwrap();
    assert_eq!((a.lower, a.upper), (b.lower, b.upper));
}

#[test]
fn bell_pairs_on_the_three_by_three_cluster() {
    let g = Graph::grid(3, 3);
    let mut pairs = 0;
    for a in 0..9u32 {
        for b in a + 1..9 {
            let p = bell_localization_pattern(&g, a, b).unwrap();
            let v = verify_bell_pattern(&g, &p, LIMIT).unwrap();
            assert_eq!(v.branches, 1 << 7);
            assert!(v.passed(1e-9), "pair ({a}, {b}): {v:?}");
            pairs += 1;
        }
    }
    assert_eq!(pairs, 36);
}

#[test]
fn chain_endpoints_use_interior_y() {
    let g = Graph::path(4);
    let p = bell_localization_pattern(&g, 0, 3).unwrap();
    assert!(p.steps.iter().all(|s| s.basis == Pauli::Y));
    let v = verify_bell_pattern(&g, &p, LIMIT).unwrap();
    assert!((v.min_entropy - 1.0).abs() < 1e-9 && (v.max_entropy - 1.0).abs() < 1e-9);
}

#[test]
fn graph_level_run_agrees_for_random_outcomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let n = rng.gen_range(3..=9);
        let mut g = Graph::path(n);
        for _ in 0..n {
            let (u, v) = (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32));
            if u != v {
                g.set_edge(u, v, true).unwrap();
            }
        }
        let (a, b) = (0, n as u32 - 1);
        let p = bell_localization_pattern(&g, a, b).unwrap();
        let outcomes: Vec<u8> = (0..p.steps.len()).map(|_| rng.gen_range(0..2)).collect();
        let out = run_on_graph(&g, &p, &outcomes).unwrap();
        assert!(out.has_trivial_frame());
        assert_eq!(out.graph().edges(), vec![(a.min(b), a.max(b))]);
        assert!(verify_bell_pattern(&g, &p, LIMIT).unwrap().passed(1e-9));
    }
}

#[test]
fn n_le_of_connected_graphs_is_their_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 2..=9 {
        let mut g = Graph::empty(n);
        for v in 1..n as u32 {
            g.add_edge(v, rng.gen_range(0..v)).unwrap();
        }
        let r = n_le(&g).unwrap();
        assert_eq!(r.value, n);
        assert_eq!(r.certified_pairs, n * (n - 1) / 2);
    }
    let ring = GraphState::new(Graph::cycle(7));
    assert_eq!(n_le(ring.graph()).unwrap().value, 7);
}
