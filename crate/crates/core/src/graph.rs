//! Undirected weighted temporal graph.
//!
//! Nodes are dense `u32` ids handed out in creation order. Edge multiplicity
//! is kept as an integer weight (number of interactions that contained both
//! endpoints) so the simple graph never has parallel edges.

use std::io::{BufRead, Write};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// One growth step: a proactive node plus the three participant roles.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interaction {
    pub t: u64,
    pub proactive: NodeId,
    pub neighbors: Vec<NodeId>,
    pub newbies: Vec<NodeId>,
    pub new_connections: Vec<NodeId>,
}

impl Interaction {
    /// Number of participants, `1 + b + n + e`.
    pub fn size(&self) -> usize {
        1 + self.neighbors.len() + self.newbies.len() + self.new_connections.len()
    }

    pub fn participants(&self) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::once(self.proactive)
            .chain(self.neighbors.iter().copied())
            .chain(self.newbies.iter().copied())
            .chain(self.new_connections.iter().copied())
    }
}

/// Outcome of applying an interaction: pairs that became edges vs pairs
/// whose existing edge got its weight bumped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDelta {
    pub new_edges: usize,
    pub reinforced_edges: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TemporalGraph {
    adj: Vec<Vec<NodeId>>,
    weights: FxHashMap<(NodeId, NodeId), u32>,
    node_interactions: Vec<u32>,
    created_at: Vec<u64>,
}

#[inline]
fn key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl TemporalGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    fn check(&self, v: NodeId) -> Result<usize> {
        let i = v as usize;
        if i < self.adj.len() {
            Ok(i)
        } else {
            Err(Error::invalid(format!(
                "node {v} out of range (graph has {} nodes)",
                self.adj.len()
            )))
        }
    }

    pub fn degree(&self, v: NodeId) -> Result<usize> {
        Ok(self.adj[self.check(v)?].len())
    }

    /// Neighbours in insertion order.
    pub fn neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        Ok(&self.adj[self.check(v)?])
    }

    /// Nodes that are neither `v` nor adjacent to it.
    pub fn non_neighbors_count(&self, v: NodeId) -> Result<usize> {
        let d = self.degree(v)?;
        Ok(self.node_count() - 1 - d)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.weights.contains_key(&key(u, v))
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<u32> {
        self.weights.get(&key(u, v)).copied()
    }

    pub fn node_interactions(&self, v: NodeId) -> Result<u32> {
        Ok(self.node_interactions[self.check(v)?])
    }

    pub fn created_at(&self, v: NodeId) -> Result<u64> {
        Ok(self.created_at[self.check(v)?])
    }

    pub fn interaction_counts(&self) -> &[u32] {
        &self.node_interactions
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.values().map(|&w| w as u64).sum()
    }

    /// Edges as `(src, dst, weight)` with `src < dst`, ascending by `(src, dst)`.
    pub fn edges(&self) -> Vec<(NodeId, NodeId, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        let mut buf = Vec::new();
        for (u, nbrs) in self.adj.iter().enumerate() {
            let u = u as NodeId;
            buf.clear();
            buf.extend(nbrs.iter().copied().filter(|&v| v > u));
            buf.sort_unstable();
            out.extend(buf.iter().map(|&v| (u, v, self.weights[&(u, v)])));
        }
        out
    }

    pub fn add_node(&mut self, created_at: u64) -> NodeId {
        let id = self.adj.len() as NodeId;
        self.adj.push(Vec::new());
        self.node_interactions.push(0);
        self.created_at.push(created_at);
        id
    }

    /// Turns `members` into a clique, bumping every pair weight and every
    /// member's interaction counter. Members must be distinct and present.
    pub(crate) fn add_clique(&mut self, members: &[NodeId]) -> EdgeDelta {
        let mut delta = EdgeDelta::default();
        for (i, &u) in members.iter().enumerate() {
            self.node_interactions[u as usize] += 1;
            for &v in &members[i + 1..] {
                let w = self.weights.entry(key(u, v)).or_insert(0);
                if *w == 0 {
                    self.adj[u as usize].push(v);
                    self.adj[v as usize].push(u);
                    delta.new_edges += 1;
                } else {
                    delta.reinforced_edges += 1;
                }
                *w += 1;
            }
        }
        delta
    }

    /// Applies one interaction. Newbies must carry the next fresh ids in
    /// order; on an empty graph the proactive node itself may be fresh
    /// (this is how the genesis clique enters the log).
    pub fn apply_interaction(&mut self, it: &Interaction) -> Result<EdgeDelta> {
        self.validate(it)?;
        if self.adj.is_empty() {
            self.add_node(it.t);
        }
        for _ in &it.newbies {
            self.add_node(it.t);
        }
        let members: Vec<NodeId> = it.participants().collect();
        Ok(self.add_clique(&members))
    }

    fn validate(&self, it: &Interaction) -> Result<()> {
        let n = self.node_count() as NodeId;
        let mut next_fresh = n;
        if n == 0 {
            if it.proactive != 0 {
                return Err(Error::structural(format!(
                    "first interaction must have proactive node 0, got {}",
                    it.proactive
                )));
            }
            if !it.neighbors.is_empty() || !it.new_connections.is_empty() {
                return Err(Error::structural(
                    "first interaction can only contain newbies besides the proactive node",
                ));
            }
            next_fresh = 1;
        } else if it.proactive >= n {
            return Err(Error::structural(format!("unknown proactive node {}", it.proactive)));
        }
        for &v in &it.newbies {
            if v != next_fresh {
                return Err(Error::structural(format!(
                    "newbie id {v} collides with or skips the next fresh id {next_fresh}"
                )));
            }
            next_fresh += 1;
        }
        for &v in &it.neighbors {
            if v >= n {
                return Err(Error::structural(format!("unknown neighbor node {v}")));
            }
            if !self.has_edge(it.proactive, v) {
                return Err(Error::structural(format!(
                    "node {v} listed as neighbor but is not adjacent to {}",
                    it.proactive
                )));
            }
        }
        for &v in &it.new_connections {
            if v >= n {
                return Err(Error::structural(format!("unknown new-connection node {v}")));
            }
            if self.has_edge(it.proactive, v) {
                return Err(Error::structural(format!(
                    "node {v} listed as new connection but is already adjacent to {}",
                    it.proactive
                )));
            }
        }
        let mut all: Vec<NodeId> = it.participants().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::structural("interaction role sets overlap"));
        }
        Ok(())
    }

    /// Rebuilds a graph from an ordered interaction log.
    pub fn replay<'a>(log: impl IntoIterator<Item = &'a Interaction>) -> Result<Self> {
        let mut g = Self::new();
        for it in log {
            g.apply_interaction(it)?;
        }
        Ok(g)
    }

    /// Builds a graph from weighted edges. Node count is `max id + 1`
    /// (or `min_nodes` if larger); interaction counters stay at zero since
    /// an edge list carries no temporal information.
    pub fn from_weighted_edges(
        edges: impl IntoIterator<Item = (NodeId, NodeId, u32)>,
        min_nodes: usize,
    ) -> Result<Self> {
        let mut g = Self::new();
        for _ in 0..min_nodes {
            g.add_node(0);
        }
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::structural(format!("self-loop on node {u}")));
            }
            if w == 0 {
                return Err(Error::structural(format!("edge ({u},{v}) has zero weight")));
            }
            while g.node_count() <= u.max(v) as usize {
                g.add_node(0);
            }
            if g.weights.insert(key(u, v), w).is_some() {
                return Err(Error::structural(format!("duplicate edge ({u},{v})")));
            }
            g.adj[u as usize].push(v);
            g.adj[v as usize].push(u);
        }
        Ok(g)
    }

    /// Connected-component label per node (labels in order of first node).
    pub fn component_labels(&self) -> (Vec<u32>, usize) {
        let n = self.node_count();
        let mut label = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s as NodeId);
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u as usize] {
                    if label[v as usize] == u32::MAX {
                        label[v as usize] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().1
    }

    /// Compressed sparse adjacency with sorted neighbour lists.
    pub fn to_csr(&self) -> Csr {
        let mut offsets = Vec::with_capacity(self.node_count() + 1);
        let mut targets = Vec::with_capacity(2 * self.edge_count());
        offsets.push(0);
        for nbrs in &self.adj {
            let start = targets.len();
            targets.extend_from_slice(nbrs);
            targets[start..].sort_unstable();
            offsets.push(targets.len());
        }
        Csr { offsets, targets }
    }

    /// Subgraph induced by `keep` (ascending ids), relabelled densely.
    pub fn induced(&self, keep: &[NodeId]) -> TemporalGraph {
        let mut map = vec![u32::MAX; self.node_count()];
        let mut g = TemporalGraph::new();
        for (new, &old) in keep.iter().enumerate() {
            map[old as usize] = new as NodeId;
            g.add_node(self.created_at[old as usize]);
            g.node_interactions[new] = self.node_interactions[old as usize];
        }
        for &old in keep {
            let u = map[old as usize];
            for &ov in &self.adj[old as usize] {
                let v = map[ov as usize];
                if v != u32::MAX {
                    g.adj[u as usize].push(v);
                    if u < v {
                        g.weights.insert((u, v), self.weights[&key(old, ov)]);
                    }
                }
            }
        }
        g
    }
}

/// Read-only compressed adjacency used by the metric kernels.
#[derive(Clone, Debug)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Csr {
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[NodeId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }
}

/// Writes `src,dst,weight` rows with `src < dst`, LF line endings.
pub fn write_edge_list<W: Write>(g: &TemporalGraph, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["src", "dst", "weight"])?;
    for (u, v, wt) in g.edges() {
        w.serialize((u, v, wt))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct EdgeRow {
    src: NodeId,
    dst: NodeId,
    weight: u32,
}

pub fn read_edge_list<R: std::io::Read>(input: R) -> Result<TemporalGraph> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["src", "dst", "weight"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header src,dst,weight, found {:?}", headers.iter().collect::<Vec<_>>()),
        });
    }
    let mut edges = Vec::new();
    for row in rdr.deserialize::<EdgeRow>() {
        let row = row.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        edges.push((row.src, row.dst, row.weight));
    }
    TemporalGraph::from_weighted_edges(edges, 0)
}

pub fn write_log<W: Write>(log: &[Interaction], mut out: W) -> Result<()> {
    for it in log {
        serde_json::to_writer(&mut out, it)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads an interaction log; `t` must be ascending.
pub fn read_log<R: BufRead>(input: R) -> Result<Vec<Interaction>> {
    let mut log: Vec<Interaction> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i as u64 + 1;
        let it: Interaction = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if let Some(prev) = log.last() {
            if it.t <= prev.t {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("interaction index {} does not follow {}", it.t, prev.t),
                });
            }
        }
        log.push(it);
    }
    Ok(log)
}
