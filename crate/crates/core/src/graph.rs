//! Immutable undirected simple graphs.
//!
//! Node ids are arbitrary non-negative integers. Internally every node is
//! addressed by its *index*, the position of its id in the sorted id list,
//! and most algorithms in this crate return `Vec`s aligned with
//! [`Graph::nodes`].

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::GraphError;

pub type NodeId = u32;

/// An undirected edge stored canonically with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgePair {
    u: NodeId,
    v: NodeId,
}

impl EdgePair {
    pub fn new(a: NodeId, b: NodeId) -> Result<Self, GraphError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Self { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Self { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(GraphError::SelfLoop(a)),
        }
    }

    pub fn u(&self) -> NodeId {
        self.u
    }

    pub fn v(&self) -> NodeId {
        self.v
    }

    pub fn contains(&self, x: NodeId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite to `x`, if `x` is an endpoint.
    pub fn other(&self, x: NodeId) -> Option<NodeId> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }

    pub fn shares_endpoint(&self, other: &EdgePair) -> bool {
        self.contains(other.u) || self.contains(other.v)
    }
}

impl fmt::Display for EdgePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    edges: Vec<EdgePair>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from a node list and an edge list.
    ///
    /// Duplicate ids and duplicate or reversed pairs are merged. Self-loops
    /// and pairs naming an unlisted node are rejected.
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        let nodes: Vec<NodeId> = nodes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &id)| (id, i)).collect();

        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for x in [a, b] {
                if !index.contains_key(&x) {
                    return Err(GraphError::UnknownEndpoint(x));
                }
            }
            set.insert(EdgePair::new(a, b)?);
        }
        let edges: Vec<EdgePair> = set.into_iter().collect();

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in &edges {
            let (iu, iv) = (index[&e.u], index[&e.v]);
            adjacency[iu].push(iv);
            adjacency[iv].push(iu);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }

        Ok(Self {
            nodes,
            index,
            edges,
            adjacency,
        })
    }

    /// Graph on nodes `0..n` with the given edges.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self, GraphError> {
        Self::new(0..n as NodeId, edges)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted node ids.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Edges in canonical (lexicographic) order.
    pub fn edges(&self) -> &[EdgePair] {
        &self.edges
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn id_at(&self, index: usize) -> NodeId {
        self.nodes[index]
    }

    /// Neighbor indices of the node at `index`, ascending.
    pub fn neighbor_indices(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn neighbors(&self, id: NodeId) -> Result<Vec<NodeId>, GraphError> {
        let i = self.require(id)?;
        Ok(self.adjacency[i].iter().map(|&j| self.nodes[j]).collect())
    }

    pub fn degree(&self, id: NodeId) -> Result<usize, GraphError> {
        Ok(self.adjacency[self.require(id)?].len())
    }

    pub fn degree_at(&self, index: usize) -> usize {
        self.adjacency[index].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> Result<bool, GraphError> {
        let ia = self.require(a)?;
        let ib = self.require(b)?;
        Ok(self.adjacency[ia].binary_search(&ib).is_ok())
    }

    fn require(&self, id: NodeId) -> Result<usize, GraphError> {
        self.index_of(id).ok_or(GraphError::UnknownNode(id))
    }

    /// Hop distances from the node at `source` index; `None` marks unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap_or(0) + 1;
            for &y in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Length of a shortest `s`–`t` path, or `None` when `t` is unreachable.
    pub fn shortest_path_len(&self, s: NodeId, t: NodeId) -> Result<Option<usize>, GraphError> {
        let is = self.require(s)?;
        let it = self.require(t)?;
        if is == it {
            return Ok(Some(0));
        }
        Ok(self.bfs_distances(is)[it])
    }

    /// Largest finite shortest-path length over all node pairs.
    ///
    /// Unreachable pairs are ignored, so a disconnected graph reports the
    /// largest diameter among its components.
    pub fn diameter(&self) -> usize {
        (0..self.node_count())
            .map(|i| self.bfs_distances(i).into_iter().flatten().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Component id per node index, numbered in order of first node.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.node_count()];
        let mut next = 0;
        for start in 0..self.node_count() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(x) = stack.pop() {
                for &y in &self.adjacency[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Stable 64-bit digest of the canonical serialization.
    pub fn canonical_hash(&self) -> u64 {
        let mut hasher = Sha256::new();
        hasher.update(b"graph/v1");
        hasher.update((self.nodes.len() as u64).to_le_bytes());
        for id in &self.nodes {
            hasher.update(id.to_le_bytes());
        }
        hasher.update((self.edges.len() as u64).to_le_bytes());
        for e in &self.edges {
            hasher.update(e.u.to_le_bytes());
            hasher.update(e.v.to_le_bytes());
        }
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("sha256 digest is 32 bytes"))
    }

    /// The line graph together with the edge each of its nodes stands for.
    pub fn linegraph(&self) -> Result<LineGraph, GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        // incident[i] = positions (in self.edges) of edges touching node index i
        let mut incident = vec![Vec::new(); self.node_count()];
        for (k, e) in self.edges.iter().enumerate() {
            incident[self.index[&e.u]].push(k as NodeId);
            incident[self.index[&e.v]].push(k as NodeId);
        }
        let mut pairs = Vec::new();
        for inc in &incident {
            for (a, &x) in inc.iter().enumerate() {
                for &y in &inc[a + 1..] {
                    pairs.push((x, y));
                }
            }
        }
        // two distinct simple edges share at most one endpoint, so `pairs` has no duplicates
        let graph = Graph::from_edges(self.edges.len(), pairs)?;
        Ok(LineGraph {
            graph,
            edge_of: self.edges.clone(),
        })
    }
}

/// `L(G)`: node `k` of `graph` represents `edge_of[k]` of the source graph.
#[derive(Debug, Clone)]
pub struct LineGraph {
    pub graph: Graph,
    pub edge_of: Vec<EdgePair>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    nodes: Vec<NodeId>,
    edges: Vec<[NodeId; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphJson {
            nodes: self.nodes.clone(),
            edges: self.edges.iter().map(|e| [e.u, e.v]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(deserializer)?;
        Graph::new(raw.nodes, raw.edges.into_iter().map(|[u, v]| (u, v))).map_err(serde::de::Error::custom)
    }
}

impl Serialize for EdgePair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.u, self.v].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EdgePair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [a, b] = <[NodeId; 2]>::deserialize(deserializer)?;
        EdgePair::new(a, b).map_err(serde::de::Error::custom)
    }
}
