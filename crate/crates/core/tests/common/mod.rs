#![allow(dead_code)]

use graphlin::{Graph, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p) with n in `min_n..=max_n` and p uniform in [0.05, 0.7].
pub fn random_graph(r: &mut ChaCha8Rng, min_n: usize, max_n: usize) -> Graph {
    let n = r.gen_range(min_n..=max_n);
    let p = r.gen_range(0.05..0.7);
    let mut edges = Vec::new();
    for i in 0..n as NodeId {
        for j in i + 1..n as NodeId {
            if r.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Adjacency matrix over node indices.
pub fn dense(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for e in g.edges() {
        let (a, b) = (g.index_of(e.u()).unwrap(), g.index_of(e.v()).unwrap());
        m[a][b] = true;
        m[b][a] = true;
    }
    m
}
