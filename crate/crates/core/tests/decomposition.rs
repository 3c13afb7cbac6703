use proptest::prelude::*;

use tdcount_core::cnf::parse_dimacs;
use tdcount_core::corpus::{complete_graph, instance_rng, random_graph, random_program, random_tree, ProgramShape};
use tdcount_core::graph::{incidence_graph, primal_graph, primal_graph_cnf, Graph};
use tdcount_core::oracle::brute_treewidth;
use tdcount_core::td::{
    elimination_ordering, make_nice, read_td, td_from_ordering, validate_td, write_td, Heuristic, NiceKind,
    TreeDecomposition, Violation, Width,
};

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0..0.6f64, any::<u64>()).prop_map(|(n, p, seed)| random_graph(&mut instance_rng(seed, 0), n, p))
}

#[test]
fn cnf_primal_examples() {
    let g = primal_graph_cnf(&parse_dimacs("p cnf 3 1\n1 2 -3 0").unwrap());
    assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
    let g = primal_graph_cnf(&parse_dimacs("p cnf 4 0").unwrap());
    assert_eq!((g.num_vertices(), g.num_edges()), (4, 0));
    let g = primal_graph_cnf(&parse_dimacs("p cnf 3 2\n1 2 0\n2 3 0").unwrap());
    assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
}

#[test]
fn widths_of_small_graphs() {
    let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
    assert_eq!(brute_treewidth(&c4).unwrap(), 2);
    for h in Heuristic::ALL {
        assert_eq!(td_from_ordering(&c4, &elimination_ordering(&c4, h, 0)).width(), Width(2));
        let k5 = complete_graph(5);
        assert_eq!(td_from_ordering(&k5, &elimination_ordering(&k5, h, 9)).width(), Width(4));
    }
}

#[test]
fn violations_are_reported() {
    let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
    let missing_edge = TreeDecomposition::new(3, vec![vec![0, 1], vec![2]], &[(0, 1)], 0).unwrap();
    assert_eq!(validate_td(&path, &missing_edge), Err(Violation::EdgeNotCovered(1, 2)));
    let disconnected =
        TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2], vec![0]], &[(0, 1), (1, 2)], 0).unwrap();
    assert_eq!(validate_td(&path, &disconnected), Err(Violation::ConnectednessBroken(0)));
}

#[test]
fn pace_round_trip() {
    let g = random_graph(&mut instance_rng(5, 5), 20, 0.2);
    let td = td_from_ordering(&g, &elimination_ordering(&g, Heuristic::MinFill, 1));
    let back = read_td(&write_td(&td)).unwrap();
    assert_eq!(back.width(), td.width());
    assert!(validate_td(&g, &back).is_ok());
    assert_eq!(Graph::from_pace(&g.to_pace()).unwrap().edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn primal_graph_has_rule_cliques(seed in any::<u64>()) {
        let p = random_program(&mut instance_rng(seed, 0), &ProgramShape::default());
        let g = primal_graph(&p);
        for r in p.rules() {
            let atoms = r.atoms();
            for (i, &u) in atoms.iter().enumerate() {
                for &v in &atoms[i + 1..] {
                    prop_assert!(g.has_edge(u, v));
                }
            }
        }
        let bound: usize = p.rules().iter().map(|r| r.atoms().len().pow(2)).sum::<usize>() / 2;
        prop_assert!(g.num_edges() <= bound);
    }

    #[test]
    fn incidence_graph_is_bipartite(seed in any::<u64>()) {
        let p = random_program(&mut instance_rng(seed, 1), &ProgramShape::default());
        let g = incidence_graph(&p);
        let n = p.num_atoms();
        prop_assert!(g.edges().all(|(u, v)| (u < n) != (v < n)));
    }

    #[test]
    fn heuristic_decompositions_are_valid_and_nice_preserves_width(g in arb_graph(40), seed in any::<u64>()) {
        for h in Heuristic::ALL {
            let td = td_from_ordering(&g, &elimination_ordering(&g, h, seed));
            prop_assert_eq!(validate_td(&g, &td), Ok(()));
            let nice = make_nice(&td);
            prop_assert_eq!(nice.width(), td.width());
            prop_assert!(nice.check_structure().is_ok());
            prop_assert!(nice.node(nice.root()).bag.is_empty());
            prop_assert_eq!(validate_td(&g, &nice.to_td()), Ok(()));
            let mut forgotten = vec![0; g.num_vertices()];
            for node in nice.nodes() {
                if let NiceKind::Forget(v) = node.kind {
                    forgotten[v] += 1;
                }
                if node.kind == NiceKind::Join {
                    prop_assert_eq!(node.children.len(), 2);
                }
            }
            prop_assert!(forgotten.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn heuristics_bound_exact_treewidth(g in arb_graph(9), seed in any::<u64>()) {
        let tw = brute_treewidth(&g).unwrap();
        for h in Heuristic::ALL {
            prop_assert!(td_from_ordering(&g, &elimination_ordering(&g, h, seed)).width().0 >= tw);
        }
    }

    #[test]
    fn trees_have_width_one(n in 2usize..60, seed in any::<u64>()) {
        let t = random_tree(&mut instance_rng(seed, 2), n);
        if n <= 11 {
            prop_assert_eq!(brute_treewidth(&t).unwrap(), 1);
        }
        for h in Heuristic::ALL {
            prop_assert_eq!(td_from_ordering(&t, &elimination_ordering(&t, h, seed)).width(), Width(1));
        }
    }
}
