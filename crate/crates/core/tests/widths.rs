use mqc_lab::graphstate::{Graph, GraphState, Pauli};
use mqc_lab::statevec::PureState;
use mqc_lab::widths::{
    entanglement_width, enumerate_subcubic_trees, optimize, rank_width, schmidt_rank_width,
    CutFunction, Strategy, WidthOptions,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

const LIMIT: usize = mqc_lab::DEFAULT_STATEVEC_LIMIT;

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n as u32 {
        for j in 0..i {
            if rng.gen_bool(p) {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

fn random_tree_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut g = Graph::empty(n);
    for v in 1..n as u32 {
        g.add_edge(v, rng.gen_range(0..v)).unwrap();
    }
    g
}

fn exact() -> WidthOptions {
    WidthOptions::default()
}

fn enumerate() -> WidthOptions {
    WidthOptions::with_strategy(Strategy::Enumerate)
}

/// Arbitrary symmetric set function given by a table over masks without party 0.
struct TableCut {
    p: usize,
    table: Vec<f64>,
}

impl CutFunction for TableCut {
    fn parties(&self) -> usize {
        self.p
    }

    fn value(&self, mask: u64) -> f64 {
        let m = if mask & 1 == 1 {
            !mask & ((1 << self.p) - 1)
        } else {
            mask
        };
        self.table[(m >> 1) as usize]
    }
}

/// Brute force over the explicit tree list, independent of both engines' internals.
fn brute_force(cut: &TableCut) -> f64 {
    let labels: Vec<u32> = (0..cut.p as u32).collect();
    enumerate_subcubic_trees(labels)
        .map(|t| {
            t.edge_masks()
                .iter()
                .map(|&m| cut.value(m))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn six_leaf_enumeration_has_105_distinct_trees() {
    let trees: Vec<_> = enumerate_subcubic_trees((0..6).collect()).collect();
    assert_eq!(trees.len(), 105);
    let distinct: HashSet<Vec<u64>> = trees.iter().map(|t| t.canonical()).collect();
    assert_eq!(distinct.len(), 105);
    assert_eq!(enumerate_subcubic_trees((0..3).collect()).count(), 1);
    assert_eq!(enumerate_subcubic_trees((0..4).collect()).count(), 3);
}

#[test]
fn grid_rank_widths() {
    let g3 = Graph::grid(3, 3);
    assert_eq!(rank_width(&g3, &enumerate()).unwrap().integer(), 2);
    assert_eq!(rank_width(&g3, &exact()).unwrap().integer(), 2);
    let g4 = Graph::grid(4, 4);
    let r = rank_width(&g4, &exact()).unwrap();
    assert!(r.exact);
    assert_eq!(r.integer(), 3);
}

#[test]
fn tree_graphs_have_rank_width_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=9 {
        for _ in 0..4 {
            let g = random_tree_graph(&mut rng, n);
            assert_eq!(rank_width(&g, &enumerate()).unwrap().integer(), 1);
        }
    }
}

#[test]
fn cluster_chain_entanglement_width_is_one() {
    for n in 2..=9 {
        let s = GraphState::new(Graph::path(n))
            .to_statevector(LIMIT)
            .unwrap();
        let r = entanglement_width(&s, &enumerate()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "n = {n}: {}", r.value);
    }
}

#[test]
fn graph_state_entanglement_width_equals_rank_width() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..220 {
        let n = rng.gen_range(2..=8);
        let g = random_graph(&mut rng, n, [0.25, 0.5, 0.75][i % 3]);
        let s = GraphState::new(g.clone()).to_statevector(LIMIT).unwrap();
        let ew = entanglement_width(&s, &exact()).unwrap().value;
        let rw = rank_width(&g, &exact()).unwrap().integer();
        assert!(
            (ew - rw as f64).abs() < 1e-9,
            "graph {:?}: {ew} vs {rw}",
            g.edges()
        );
    }
}

#[test]
fn schmidt_rank_width_dominates_entanglement_width() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let n = rng.gen_range(2..=7);
        let s = PureState::random(n, &mut rng);
        let chi = schmidt_rank_width(&s, &exact()).unwrap().value;
        let e = entanglement_width(&s, &exact()).unwrap().value;
        assert!(chi >= e - 1e-9);
    }
}

#[test]
fn appending_a_zero_qubit_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..15 {
        let n = rng.gen_range(2..=6);
        let s = PureState::random(n, &mut rng);
        let t = s.with_zero_qubit(100).unwrap();
        let (a, b) = (
            entanglement_width(&s, &exact()).unwrap(),
            entanglement_width(&t, &exact()).unwrap(),
        );
        assert!((a.value - b.value).abs() < 1e-9);
        let (a, b) = (
            schmidt_rank_width(&s, &exact()).unwrap(),
            schmidt_rank_width(&t, &exact()).unwrap(),
        );
        assert!((a.value - b.value).abs() < 1e-9);
    }
}

#[test]
fn pauli_measurements_never_increase_rank_width() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..60 {
        let n = rng.gen_range(2..=8);
        let gs = GraphState::new(random_graph(&mut rng, n, 0.5));
        let before = rank_width(gs.graph(), &exact()).unwrap().integer();
        for &q in gs.graph().labels() {
            for basis in [Pauli::Y, Pauli::Z] {
                let after = gs.measure_pauli(q, basis, 0).unwrap();
                if after.n() == 0 {
                    continue;
                }
                assert!(rank_width(after.graph(), &exact()).unwrap().integer() <= before);
            }
        }
    }
}

#[test]
fn dp_matches_enumeration_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let n = rng.gen_range(3..=6);
        let s = PureState::random(n, &mut rng);
        let a = entanglement_width(&s, &exact()).unwrap().value;
        let b = entanglement_width(&s, &enumerate()).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engines_agree_on_arbitrary_cut_functions(p in 1usize..=7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = (0..1usize << (p - 1)).map(|_| rng.gen_range(0..5) as f64).collect();
        let cut = TableCut { p, table };
        let labels: Vec<u32> = (0..p as u32).collect();
        let dp = optimize(&cut, &labels, &exact()).unwrap();
        let en = optimize(&cut, &labels, &enumerate()).unwrap();
        let expect = if p == 1 { 0.0 } else { brute_force(&cut) };
        prop_assert_eq!(dp.value, expect);
        prop_assert_eq!(en.value, expect);
        // the witness tree really achieves the value
        let witness = dp.tree.edge_masks().iter().map(|&m| cut.value(m)).fold(0.0, f64::max);
        prop_assert_eq!(witness, expect);
    }
}
