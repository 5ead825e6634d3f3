//! Graph measures checked against slow, independent reimplementations.

mod common;

use graphlin::{core_numbers, degree_centrality, pagerank, Graph, PageRankParams};

/// Core number of v = largest min-induced-degree over all node subsets containing v.
fn brute_force_cores(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    assert!(n <= 16);
    let adj: Vec<u32> = common::dense(g)
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &x)| x).fold(0, |m, (j, _)| m | 1 << j))
        .collect();
    let mut core = vec![0; n];
    for set in 1u32..1 << n {
        let min_deg = (0..n)
            .filter(|&v| set >> v & 1 == 1)
            .map(|v| (adj[v] & set).count_ones() as usize)
            .min()
            .unwrap();
        for v in (0..n).filter(|&v| set >> v & 1 == 1) {
            core[v] = core[v].max(min_deg);
        }
    }
    core
}

/// Power iteration on the dense Google matrix, run to 1e-14.
fn dense_pagerank(g: &Graph, alpha: f64) -> Vec<f64> {
    let n = g.node_count();
    let a = common::dense(g);
    let nf = n as f64;
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        let d = a[j].iter().filter(|&&x| x).count();
        for i in 0..n {
            m[i][j] = if d == 0 {
                1.0 / nf
            } else if a[j][i] {
                1.0 / d as f64
            } else {
                0.0
            };
        }
    }
    let mut x = vec![1.0 / nf; n];
    for _ in 0..100_000 {
        let y: Vec<f64> = (0..n)
            .map(|i| (1.0 - alpha) / nf + alpha * (0..n).map(|j| m[i][j] * x[j]).sum::<f64>())
            .collect();
        let diff: f64 = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).sum();
        x = y;
        if diff < 1e-14 {
            break;
        }
    }
    x
}

/// Floyd-Warshall hop distances; `usize::MAX` when unreachable.
fn all_pairs(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let a = common::dense(g);
    let mut d = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if a[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != usize::MAX && d[k][j] != usize::MAX && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

#[test]
fn core_numbers_match_subset_enumeration() {
    let mut r = common::rng(1);
    for _ in 0..200 {
        let g = common::random_graph(&mut r, 1, 12);
        assert_eq!(core_numbers(&g), brute_force_cores(&g), "{:?}", g.edges());
    }
}

#[test]
fn pagerank_matches_dense_iteration() {
    let mut r = common::rng(2);
    for _ in 0..200 {
        let g = common::random_graph(&mut r, 1, 50);
        let got = pagerank(&g, &PageRankParams::default());
        let want = dense_pagerank(&g, 0.85);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
        }
        assert!((got.iter().sum::<f64>() - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn distances_match_floyd_warshall() {
    let mut r = common::rng(3);
    for _ in 0..200 {
        let g = common::random_graph(&mut r, 1, 25);
        let d = all_pairs(&g);
        let ecc_max = d.iter().flatten().filter(|&&x| x != usize::MAX).max().copied().unwrap_or(0);
        assert_eq!(g.diameter(), ecc_max);
        for (i, row) in d.iter().enumerate() {
            for (j, &dij) in row.iter().enumerate() {
                let got = g.shortest_path_len(g.id_at(i), g.id_at(j)).unwrap();
                assert_eq!(got, (dij != usize::MAX).then_some(dij));
            }
        }
    }
}

#[test]
fn degrees_match_edge_incidence() {
    let mut r = common::rng(4);
    for _ in 0..100 {
        let g = common::random_graph(&mut r, 1, 30);
        let mut want = vec![0; g.node_count()];
        for e in g.edges() {
            want[g.index_of(e.u()).unwrap()] += 1;
            want[g.index_of(e.v()).unwrap()] += 1;
        }
        assert_eq!(degree_centrality(&g), want);
    }
}

#[test]
fn linegraph_counts_and_adjacency() {
    let mut r = common::rng(5);
    for _ in 0..500 {
        let g = common::random_graph(&mut r, 2, 20);
        let m = g.edge_count();
        if m == 0 {
            continue;
        }
        let lg = g.linegraph().unwrap();
        assert_eq!(lg.graph.node_count(), m);
        let pairs: usize = degree_centrality(&g).iter().map(|d| d * d.saturating_sub(1) / 2).sum();
        assert_eq!(lg.graph.edge_count(), pairs);
        for (i, a) in lg.edge_of.iter().enumerate() {
            for (j, b) in lg.edge_of.iter().enumerate().skip(i + 1) {
                let adjacent = lg.graph.has_edge(lg.graph.id_at(i), lg.graph.id_at(j)).unwrap();
                assert_eq!(adjacent, a.shares_endpoint(b));
            }
        }
    }
}
