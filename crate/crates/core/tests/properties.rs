use std::collections::BTreeMap;

use graphlin::eval::{exact_accuracy, is_correct, parse_answer, EvalRecord, ParsedAnswer};
use graphlin::linearize::{linearize_with_emission_order, parse_edge_list, render_edge_list};
use graphlin::{
    core_numbers, degree_centrality, pagerank, rank_nodes, Answer, EdgeOrdering, Graph, Labeling, LinearizationSpec,
    Measure, Method, NodeId, PageRankParams, Shots, TaskKind,
};
use proptest::prelude::*;

fn graph() -> impl Strategy<Value = Graph> {
    (1usize..=14).prop_flat_map(|n| {
        let pair = (0..n as NodeId, 0..n as NodeId);
        proptest::collection::vec(pair, 0..=n * 3).prop_map(move |pairs| {
            Graph::from_edges(n, pairs.into_iter().filter(|(a, b)| a != b)).unwrap()
        })
    })
}

fn all_methods() -> Vec<Method> {
    let mut m = Method::structured();
    m.push(Method::new(EdgeOrdering::Random, false));
    m.push(Method::new(EdgeOrdering::DefaultOrder, false));
    m
}

fn lin(g: &Graph, method: Method, labeling: Labeling, seed: u64) -> graphlin::LinearizedGraph {
    let order: Vec<(NodeId, NodeId)> = g.edges().iter().rev().map(|e| (e.v(), e.u())).collect();
    let spec = LinearizationSpec::new(method, labeling, seed);
    linearize_with_emission_order(g, Some(&order), &spec).unwrap()
}

/// Nodes of the k-core by repeated removal of nodes with degree below k.
fn k_core(g: &Graph, k: usize) -> Vec<bool> {
    let n = g.node_count();
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for v in 0..n {
            if alive[v] && g.neighbor_indices(v).iter().filter(|&&u| alive[u]).count() < k {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn handshake(g in graph()) {
        prop_assert_eq!(degree_centrality(&g).iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn linegraph_sizes(g in graph()) {
        prop_assume!(g.edge_count() > 0);
        let lg = g.linegraph().unwrap();
        prop_assert_eq!(lg.graph.node_count(), g.edge_count());
        let want: usize = degree_centrality(&g).iter().map(|d| d * d.saturating_sub(1) / 2).sum();
        prop_assert_eq!(lg.graph.edge_count(), want);
    }

    #[test]
    fn distances_symmetric_and_triangular(g in graph(), picks in proptest::collection::vec((0usize..100, 0usize..100, 0usize..100), 8)) {
        let n = g.node_count();
        for (a, b, c) in picks {
            let (a, b, c) = (g.id_at(a % n), g.id_at(b % n), g.id_at(c % n));
            let ab = g.shortest_path_len(a, b).unwrap();
            prop_assert_eq!(ab, g.shortest_path_len(b, a).unwrap());
            if let (Some(ab), Some(bc)) = (ab, g.shortest_path_len(b, c).unwrap()) {
                let ac = g.shortest_path_len(a, c).unwrap().expect("same component");
                prop_assert!(ac <= ab + bc);
            }
        }
    }

    #[test]
    fn pagerank_conserves_mass(g in graph()) {
        let pr = pagerank(&g, &PageRankParams::default());
        prop_assert!((pr.iter().sum::<f64>() - 1.0).abs() <= 1e-6);
        prop_assert!(pr.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn core_numbers_are_sound(g in graph()) {
        let core = core_numbers(&g);
        for (v, &k) in core.iter().enumerate() {
            prop_assert!(k_core(&g, k)[v]);
            prop_assert!(!k_core(&g, k + 1)[v]);
        }
    }

    #[test]
    fn rankings_are_bijective_and_monotone(g in graph(), seed in any::<u64>()) {
        for m in Measure::ALL {
            let r = rank_nodes(&g, m, seed);
            let mut sorted = r.order.clone();
            sorted.sort_unstable();
            prop_assert_eq!(&sorted, &g.nodes().to_vec());
            let scores: Vec<f64> = r.order.iter().map(|&id| r.scores[g.index_of(id).unwrap()]).collect();
            prop_assert!(scores.windows(2).all(|w| w[0] >= w[1]));
        }
        let deg = degree_centrality(&g);
        let pos = rank_nodes(&g, Measure::Degree, seed).positions(&g);
        for u in 0..g.node_count() {
            for v in 0..g.node_count() {
                if deg[u] > deg[v] {
                    prop_assert!(pos[u] < pos[v]);
                }
            }
        }
    }

    #[test]
    fn linearizations_are_sound(g in graph(), seed in any::<u64>()) {
        let mut want: Vec<(NodeId, NodeId)> = g.edges().iter().map(|e| (e.u(), e.v())).collect();
        want.sort_unstable();
        for method in all_methods() {
            let mut emitted = None;
            for labeling in Labeling::ALL {
                let l = lin(&g, method, labeling, seed);
                prop_assert!(l.check_against(&g).is_ok());

                let mut back: Vec<(NodeId, NodeId)> =
                    l.original_edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
                back.sort_unstable();
                prop_assert_eq!(&back, &want);

                let mut labels = l.labels.clone();
                labels.sort_unstable();
                prop_assert_eq!(labels, (0..g.node_count() as u32).collect::<Vec<_>>());

                if labeling == Labeling::NodeRelabeling {
                    if let Some(&(a, b)) = l.edges.first() {
                        prop_assert!(a == 0 || b == 0);
                    }
                }

                prop_assert_eq!(l.render(), lin(&g, method, labeling, seed).render());

                // the labeling never changes which edges come in which order
                let order = l.original_edges();
                match &emitted {
                    None => emitted = Some(order),
                    Some(prev) => prop_assert_eq!(prev, &order),
                }
            }
        }
    }

    #[test]
    fn node_walk_follows_the_ranking(g in graph(), seed in any::<u64>()) {
        for m in Measure::ALL {
            let l = lin(&g, Method::new(m.into(), false), Labeling::NodeRelabeling, seed);
            let ranking = l.ranking.clone().unwrap();
            let pos = ranking.positions(&g);
            let p = |id: NodeId| pos[g.index_of(id).unwrap()];
            let mut last = 0;
            for (a, b) in l.original_edges() {
                prop_assert!(p(a) < p(b), "lead endpoint ranks first");
                prop_assert!(p(a) >= last, "leads appear in rank order");
                last = p(a);
            }
            for (i, &id) in l.nodes.iter().enumerate() {
                prop_assert_eq!(l.labels[i] as usize, p(id));
            }
            // a unique top scorer leads the first edge
            let top = ranking.scores.iter().cloned().fold(f64::MIN, f64::max);
            let tops: Vec<usize> = (0..g.node_count()).filter(|&i| ranking.scores[i] == top).collect();
            if tops.len() == 1 && g.degree_at(tops[0]) > 0 {
                prop_assert_eq!(l.original_edges()[0].0, g.id_at(tops[0]));
            }
        }
    }

    #[test]
    fn edge_list_text_round_trips(edges in proptest::collection::vec((0u32..1000, 0u32..1000), 0..40)) {
        prop_assert_eq!(parse_edge_list(&render_edge_list(&edges)).unwrap(), edges);
    }

    #[test]
    fn graph_json_and_hash_are_canonical(g in graph(), seed in any::<u64>()) {
        let json = serde_json::to_string(&g).unwrap();
        let back: Graph = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.canonical_hash(), g.canonical_hash());
        let mut edges: Vec<(NodeId, NodeId)> = g.edges().iter().map(|e| (e.v(), e.u())).collect();
        let k = edges.len().max(1);
        edges.rotate_left(seed as usize % k);
        let shuffled = Graph::new(g.nodes().iter().rev().copied(), edges).unwrap();
        prop_assert_eq!(shuffled.canonical_hash(), g.canonical_hash());
    }

    #[test]
    fn parsing_is_total(raw in ".{0,60}") {
        for kind in TaskKind::ALL {
            let parsed = parse_answer(kind, &raw);
            let ok = match (&parsed, kind) {
                (ParsedAnswer::Unparseable, _) => true,
                (ParsedAnswer::Count(_), k) => k.is_numeric(),
                (ParsedAnswer::YesNo(_), k) => k.is_existence(),
                (ParsedAnswer::Shape(_), k) => k == TaskKind::MotifShape,
            };
            prop_assert!(ok);
            prop_assert!(!is_correct(&Answer::Count(0), &ParsedAnswer::Unparseable));
        }
    }

    #[test]
    fn accuracy_is_a_fraction(flags in proptest::collection::vec(any::<bool>(), 1..50)) {
        let spec = LinearizationSpec::new(Method::new(EdgeOrdering::Random, false), Labeling::RandomLabels, 0);
        let recs: Vec<EvalRecord> = flags
            .iter()
            .map(|&c| EvalRecord {
                record_id: "r".into(),
                task: TaskKind::Diameter,
                spec,
                shots: Shots::Zero,
                raw: String::new(),
                parsed: ParsedAnswer::Unparseable,
                correct: c,
                multi_mention: false,
            })
            .collect();
        let acc = exact_accuracy(&recs).unwrap();
        prop_assert!((0.0..=1.0).contains(&acc));
        let hits = flags.iter().filter(|&&c| c).count();
        prop_assert_eq!(acc, hits as f64 / flags.len() as f64);
    }
}

#[test]
fn random_labels_differ_across_seeds() {
    let g = Graph::from_edges(12, (0..11).map(|i| (i, i + 1))).unwrap();
    let m = Method::new(Measure::Degree.into(), false);
    let renders: BTreeMap<String, u64> = (0..8).map(|s| (lin(&g, m, Labeling::RandomLabels, s).render(), s)).collect();
    assert!(renders.len() > 1);
}
