//! Node importance: degree centrality, PageRank and core numbers, plus the
//! total node order derived from them.
//!
//! All per-node results are `Vec`s aligned with [`Graph::nodes`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeId};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    CoreNumber,
    Degree,
    PageRank,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::CoreNumber, Measure::Degree, Measure::PageRank];

    pub fn tag(&self) -> &'static str {
        match self {
            Measure::CoreNumber => "core-number",
            Measure::Degree => "degree",
            Measure::PageRank => "pagerank",
        }
    }

    /// Display name used in result tables.
    pub fn title(&self) -> &'static str {
        match self {
            Measure::CoreNumber => "CoreNumber",
            Measure::Degree => "Degree",
            Measure::PageRank => "PageRank",
        }
    }

    pub fn scores(&self, g: &Graph) -> Vec<f64> {
        match self {
            Measure::CoreNumber => core_numbers(g).into_iter().map(|c| c as f64).collect(),
            Measure::Degree => degree_centrality(g).into_iter().map(|d| d as f64).collect(),
            Measure::PageRank => pagerank(g, &PageRankParams::default()),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "core-number" | "corenumber" | "core" => Ok(Measure::CoreNumber),
            "degree" => Ok(Measure::Degree),
            "pagerank" | "page-rank" => Ok(Measure::PageRank),
            other => Err(format!("unknown measure `{other}`")),
        }
    }
}

pub fn degree_centrality(g: &Graph) -> Vec<usize> {
    (0..g.node_count()).map(|i| g.degree_at(i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    pub damping: f64,
    /// Stop once the L1 change between sweeps is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-8,
            max_iterations: 100,
        }
    }
}

/// PageRank with every edge walked in both directions.
///
/// The mass held by degree-0 nodes is spread uniformly over all nodes on
/// each sweep, so scores always sum to one.
pub fn pagerank(g: &Graph, p: &PageRankParams) -> Vec<f64> {
    assert!(p.damping > 0.0 && p.damping < 1.0, "damping must lie in (0, 1)");
    assert!(p.tolerance > 0.0, "tolerance must be positive");
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let alpha = p.damping;
    let degree = degree_centrality(g);
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];

    for _ in 0..p.max_iterations {
        let dangling: f64 = (0..n).filter(|&i| degree[i] == 0).map(|i| rank[i]).sum();
        let base = (1.0 - alpha) / nf + alpha * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g
                .neighbor_indices(v)
                .iter()
                .map(|&u| rank[u] / degree[u] as f64)
                .sum();
            *slot = base + alpha * inflow;
        }
        let change: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if change <= p.tolerance {
            break;
        }
    }
    rank
}

/// Core number of every node, by bucket-sorted minimum-degree peeling.
pub fn core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut deg = degree_centrality(g);
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // bin[d]: first position of degree-d nodes in `vert`; pos[v]: position of v
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbor_indices(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// Nodes ordered by descending score, ties broken by a seeded shuffle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRanking {
    pub measure: Measure,
    /// Scores aligned with `Graph::nodes`.
    pub scores: Vec<f64>,
    /// Node ids, most important first.
    pub order: Vec<NodeId>,
    pub seed: u64,
}

impl NodeRanking {
    /// Position of every node index in `order`.
    pub fn positions(&self, g: &Graph) -> Vec<usize> {
        let mut pos = vec![0; g.node_count()];
        for (p, id) in self.order.iter().enumerate() {
            pos[g.index_of(*id).expect("ranking node belongs to graph")] = p;
        }
        pos
    }
}

// PageRank values of structurally equivalent nodes may differ in the last
// bits; snapping to this grid lets them tie.
const SCORE_GRID: f64 = 1e12;

fn snap(x: f64) -> f64 {
    (x * SCORE_GRID).round() / SCORE_GRID
}

pub fn rank_nodes(g: &Graph, measure: Measure, seed: u64) -> NodeRanking {
    let scores: Vec<f64> = measure.scores(g).into_iter().map(snap).collect();
    let mut tie_rng = rng::stream(seed, g.canonical_hash(), &format!("ties/{}", measure.tag()));
    let keys: Vec<u64> = (0..g.node_count()).map(|_| tie_rng.gen()).collect();
    let mut idx: Vec<usize> = (0..g.node_count()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then(keys[a].cmp(&keys[b]))
            .then(a.cmp(&b))
    });
    NodeRanking {
        measure,
        scores,
        order: idx.into_iter().map(|i| g.id_at(i)).collect(),
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: u32) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Graph::from_edges(n as usize, e).unwrap()
    }

    fn star() -> Graph {
        Graph::new([0, 1, 2, 3], [(1, 0), (2, 1), (1, 3)]).unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(degree_centrality(&star()), vec![1, 3, 1, 1]);
        assert_eq!(degree_centrality(&Graph::new([4], []).unwrap()), vec![0]);
        assert_eq!(degree_centrality(&complete(4)), vec![3; 4]);
    }

    #[test]
    fn pagerank_symmetric_graphs_are_uniform() {
        for (n, want) in [(3, 1.0 / 3.0), (4, 0.25)] {
            for x in pagerank(&complete(n), &PageRankParams::default()) {
                assert!((x - want).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn pagerank_isolated_nodes_keep_mass() {
        let g = Graph::from_edges(4, [(0, 1)]).unwrap();
        let pr = pagerank(&g, &PageRankParams::default());
        assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(pr[0] > pr[2]);
        assert!((pr[2] - pr[3]).abs() < 1e-15);
    }

    #[test]
    fn core_numbers_known_graphs() {
        assert_eq!(core_numbers(&complete(4)), vec![3; 4]);
        let p = Graph::from_edges(5, (1..5).map(|i| (i - 1, i))).unwrap();
        assert_eq!(core_numbers(&p), vec![1; 5]);
        // K5 on 0..5 plus pendant 5 hanging off node 0
        let mut e: Vec<_> = complete(5).edges().iter().map(|e| (e.u(), e.v())).collect();
        e.push((0, 5));
        let g = Graph::from_edges(6, e).unwrap();
        assert_eq!(core_numbers(&g), vec![4, 4, 4, 4, 4, 1]);
        assert_eq!(core_numbers(&Graph::new([], []).unwrap()), Vec::<usize>::new());
        assert_eq!(core_numbers(&Graph::new([0, 1], []).unwrap()), vec![0, 0]);
    }

    #[test]
    fn ranking_center_first_and_deterministic() {
        let r = rank_nodes(&star(), Measure::Degree, 3);
        assert_eq!(r.order[0], 1);
        assert_eq!(r, rank_nodes(&star(), Measure::Degree, 3));

        let k4 = complete(4);
        let orders: std::collections::BTreeSet<_> =
            (0..32).map(|s| rank_nodes(&k4, Measure::PageRank, s).order).collect();
        assert!(orders.len() > 1, "ties should be permuted by the seed");
    }

    #[test]
    fn measure_parsing() {
        assert_eq!("core-number".parse::<Measure>(), Ok(Measure::CoreNumber));
        assert_eq!("PageRank".parse::<Measure>(), Ok(Measure::PageRank));
        assert!("closeness".parse::<Measure>().is_err());
    }
}
