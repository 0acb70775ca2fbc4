//! Louvain community detection and modularity.
//!
//! The input graph is treated as unweighted; level-0 edges all weigh 1 no
//! matter how many interactions produced them. Coarser levels carry the
//! summed weights of the edges they absorbed.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::TemporalGraph;
use crate::metrics::histogram;
use crate::rng::RngState;

/// Dense community labels `0..community_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<u32>,
    community_count: usize,
}

impl Partition {
    /// Relabels arbitrary labels densely in order of first appearance.
    pub fn from_labels(labels: &[u32]) -> Self {
        let mut map = rustc_hash::FxHashMap::default();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = map.len() as u32;
                *map.entry(l).or_insert(next)
            })
            .collect();
        Self {
            assignment,
            community_count: map.len(),
        }
    }

    /// Checks that `assignment` already uses every label in `0..c`.
    pub fn new(assignment: Vec<u32>) -> Result<Self> {
        let c = assignment.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; c];
        for &l in &assignment {
            seen[l as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("partition labels are not dense"));
        }
        Ok(Self {
            assignment,
            community_count: c,
        })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n as u32).collect(),
            community_count: n,
        }
    }

    pub fn whole(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            community_count: usize::from(n > 0),
        }
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn community_of(&self, v: u32) -> u32 {
        self.assignment[v as usize]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.community_count];
        for &c in &self.assignment {
            s[c as usize] += 1;
        }
        s
    }

    /// `node,community` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "node,community")?;
        for (v, c) in self.assignment.iter().enumerate() {
            writeln!(out, "{v},{c}")?;
        }
        Ok(())
    }

    /// `size,count` CSV of the community-size distribution.
    pub fn write_size_distribution<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "size,count")?;
        for (size, count) in histogram(self.sizes()) {
            writeln!(out, "{size},{count}")?;
        }
        Ok(())
    }
}

/// Newman modularity of `p` on the unweighted simple graph.
pub fn modularity(g: &TemporalGraph, p: &Partition) -> Result<f64> {
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::Empty("modularity of a graph without edges".into()));
    }
    if p.assignment.len() != g.node_count() {
        return Err(Error::invalid(format!(
            "partition covers {} nodes, graph has {}",
            p.assignment.len(),
            g.node_count()
        )));
    }
    let c = p.community_count;
    let mut inner = vec![0u64; c];
    let mut degree = vec![0u64; c];
    for (u, v, _) in g.edges() {
        let (cu, cv) = (p.assignment[u as usize], p.assignment[v as usize]);
        degree[cu as usize] += 1;
        degree[cv as usize] += 1;
        if cu == cv {
            inner[cu as usize] += 1;
        }
    }
    let m = m as f64;
    Ok(inner
        .iter()
        .zip(&degree)
        .map(|(&e, &d)| e as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum())
}

const GAIN_EPS: f64 = 1e-10;

/// Weighted graph for one Louvain level. Self-loops are not stored: they
/// never affect a move's gain, only the node strength.
struct Level {
    adj: Vec<Vec<(u32, f64)>>,
    strength: Vec<f64>,
}

impl Level {
    fn from_graph(g: &TemporalGraph) -> Self {
        let csr = g.to_csr();
        let adj: Vec<Vec<(u32, f64)>> = (0..csr.node_count())
            .map(|v| csr.neighbors(v).iter().map(|&u| (u, 1.0)).collect())
            .collect();
        let strength = adj.iter().map(|a| a.len() as f64).collect();
        Self { adj, strength }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Local moving until a full pass makes no move. Returns whether any
    /// node changed community.
    fn local_moves(&self, comm: &mut [u32], two_m: f64, rng: &mut RngState) -> bool {
        let n = self.len();
        let mut total: Vec<f64> = self.strength.clone();
        let mut link = vec![0.0f64; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut any = false;
        loop {
            rng.shuffle(&mut order);
            let mut moved = false;
            for &i in &order {
                let i = i as usize;
                let own = comm[i];
                let k = self.strength[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j as usize];
                    if link[c as usize] == 0.0 {
                        touched.push(c);
                    }
                    link[c as usize] += w;
                }
                total[own as usize] -= k;

                let gain = |c: u32| link[c as usize] - total[c as usize] * k / two_m;
                let mut best = own;
                let mut best_gain = gain(own);
                touched.sort_unstable();
                for &c in &touched {
                    let g = gain(c);
                    if g > best_gain + GAIN_EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best as usize] += k;
                if best != own {
                    comm[i] = best;
                    moved = true;
                }
                for &c in &touched {
                    link[c as usize] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                return any;
            }
            any = true;
        }
    }

    /// Collapses communities into nodes. `comm` must be dense.
    fn aggregate(&self, comm: &[u32], count: usize) -> Self {
        let mut strength = vec![0.0; count];
        let mut edges: Vec<Vec<(u32, f64)>> = vec![Vec::new(); count];
        for (i, nbrs) in self.adj.iter().enumerate() {
            let ci = comm[i];
            strength[ci as usize] += self.strength[i];
            for &(j, w) in nbrs {
                let cj = comm[j as usize];
                if ci != cj {
                    edges[ci as usize].push((cj, w));
                }
            }
        }
        let adj = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable_by_key(|&(c, _)| c);
                let mut merged: Vec<(u32, f64)> = Vec::with_capacity(e.len());
                for (c, w) in e {
                    match merged.last_mut() {
                        Some(last) if last.0 == c => last.1 += w,
                        _ => merged.push((c, w)),
                    }
                }
                merged
            })
            .collect();
        Self { adj, strength }
    }
}

/// Multi-level Louvain at resolution 1. Node order is reshuffled from the
/// seeded stream on every pass; among equal-gain targets the lowest label
/// wins and a node only leaves its community for a strictly better one.
pub fn louvain(g: &TemporalGraph, seed: u64) -> Partition {
    let n = g.node_count();
    let two_m = 2.0 * g.edge_count() as f64;
    if two_m == 0.0 {
        return Partition::singletons(n);
    }
    let mut rng = RngState::new(seed);
    let mut level = Level::from_graph(g);
    let mut node_comm: Vec<u32> = (0..n as u32).collect();
    loop {
        let mut comm: Vec<u32> = (0..level.len() as u32).collect();
        if !level.local_moves(&mut comm, two_m, &mut rng) {
            break;
        }
        let dense = Partition::from_labels(&comm);
        for c in node_comm.iter_mut() {
            *c = dense.assignment[*c as usize];
        }
        if dense.community_count == level.len() {
            break;
        }
        level = level.aggregate(&dense.assignment, dense.community_count);
    }
    Partition::from_labels(&node_comm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_edges(edges: &[(u32, u32)]) -> TemporalGraph {
        TemporalGraph::from_weighted_edges(edges.iter().map(|&(u, v)| (u, v, 1)), 0).unwrap()
    }

    fn complete_edges(offset: u32, n: u32) -> Vec<(u32, u32)> {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((offset + u, offset + v));
            }
        }
        e
    }

    #[test]
    fn whole_graph_has_zero_modularity() {
        let g = from_edges(&complete_edges(0, 5));
        assert!(modularity(&g, &Partition::whole(5)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn two_triangles() {
        let mut e = complete_edges(0, 3);
        e.extend(complete_edges(3, 3));
        let g = from_edges(&e);
        let p = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        assert!((modularity(&g, &p).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_is_one_community() {
        for seed in 0..5 {
            let g = from_edges(&complete_edges(0, 7));
            assert_eq!(louvain(&g, seed).community_count(), 1);
        }
    }

    #[test]
    fn bridged_cliques_split() {
        let mut e = complete_edges(0, 4);
        e.extend(complete_edges(4, 4));
        e.push((3, 4));
        let g = from_edges(&e);
        for seed in 0..10 {
            let p = louvain(&g, seed);
            assert_eq!(p.community_count(), 2);
            assert!((0..4).all(|v| p.community_of(v) == p.community_of(0)));
            assert!((4..8).all(|v| p.community_of(v) == p.community_of(4)));
        }
    }

    #[test]
    fn partition_validation_and_export() {
        assert!(Partition::new(vec![0, 2]).is_err());
        let p = Partition::from_labels(&[7, 7, 3, 9]);
        assert_eq!(p.assignment(), &[0, 0, 1, 2]);
        assert_eq!(p.sizes(), vec![2, 1, 1]);
        let mut buf = Vec::new();
        p.write_size_distribution(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "size,count\n1,2\n2,1\n");
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("node,community\n0,0\n1,0\n2,1\n"));
    }

    #[test]
    fn edgeless_graph() {
        let g = TemporalGraph::from_weighted_edges([], 3).unwrap();
        assert!(modularity(&g, &Partition::singletons(3)).is_err());
        assert_eq!(louvain(&g, 1).community_count(), 3);
    }
}
