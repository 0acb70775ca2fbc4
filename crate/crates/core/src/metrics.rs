//! Global structural properties.
//!
//! All kernels work on the unweighted simple graph. Per-node and per-source
//! work is spread over rayon; reductions are either integer sums or
//! sequential sums over a collected vector, so results do not depend on
//! the number of worker threads.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Csr, Interaction, TemporalGraph};
use crate::rng::RngState;

/// Node count above which [`PathMode::auto`] switches to sampling.
pub const EXACT_PATH_LIMIT: usize = 20_000;
pub const DEFAULT_SAMPLE_SOURCES: usize = 1000;

/// `degree -> number of nodes`.
pub fn degree_distribution(g: &TemporalGraph) -> BTreeMap<usize, usize> {
    histogram(g.degrees())
}

pub fn histogram(values: impl IntoIterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

/// Two-column `value,count` CSV.
pub fn write_distribution<W: Write>(
    h: &BTreeMap<usize, usize>,
    header: (&str, &str),
    mut out: W,
) -> Result<()> {
    writeln!(out, "{},{}", header.0, header.1)?;
    for (k, c) in h {
        writeln!(out, "{k},{c}")?;
    }
    Ok(())
}

/// Triangles through each node (edges among its neighbours).
pub fn triangles_per_node(csr: &Csr) -> Vec<u64> {
    let n = csr.node_count();
    (0..n)
        .into_par_iter()
        .map_init(
            || vec![u32::MAX; n],
            |mark, v| {
                let nbrs = csr.neighbors(v);
                if nbrs.len() < 2 {
                    return 0;
                }
                for &u in nbrs {
                    mark[u as usize] = v as u32;
                }
                let mut t = 0u64;
                for &u in nbrs {
                    let nu = csr.neighbors(u as usize);
                    let start = nu.partition_point(|&w| w <= u);
                    t += nu[start..].iter().filter(|&&w| mark[w as usize] == v as u32).count() as u64;
                }
                // reset so stale marks from earlier nodes cannot collide
                for &u in nbrs {
                    mark[u as usize] = u32::MAX;
                }
                t
            },
        )
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub global: f64,
    pub mean_local: f64,
}

pub fn clustering(g: &TemporalGraph) -> Clustering {
    clustering_csr(&g.to_csr())
}

pub fn clustering_csr(csr: &Csr) -> Clustering {
    let n = csr.node_count();
    if n == 0 {
        return Clustering { global: 0.0, mean_local: 0.0 };
    }
    let tri = triangles_per_node(csr);
    let mut closed = 0u64;
    let mut triples = 0u64;
    let mut local_sum = 0.0;
    for (v, &t) in tri.iter().enumerate() {
        let d = csr.degree(v) as u64;
        let pairs = d * d.saturating_sub(1) / 2;
        closed += t;
        triples += pairs;
        if pairs > 0 {
            local_sum += t as f64 / pairs as f64;
        }
    }
    Clustering {
        global: if triples == 0 { 0.0 } else { closed as f64 / triples as f64 },
        mean_local: local_sum / n as f64,
    }
}

/// `3 * triangles / connected triples`; 0 when there are no triples.
pub fn global_clustering(g: &TemporalGraph) -> f64 {
    clustering(g).global
}

/// Mean local clustering over all nodes; degree < 2 contributes 0.
pub fn mean_local_clustering(g: &TemporalGraph) -> f64 {
    clustering(g).mean_local
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PathMode {
    Exact,
    /// BFS from `sources` random nodes. The diameter is then a lower bound.
    Sampled { sources: usize, seed: u64 },
}

impl PathMode {
    pub fn auto(n: usize, seed: u64) -> Self {
        if n <= EXACT_PATH_LIMIT {
            PathMode::Exact
        } else {
            PathMode::Sampled {
                sources: DEFAULT_SAMPLE_SOURCES,
                seed,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    /// Mean distance over unordered pairs (or the sampled estimate).
    pub mean: f64,
    pub diameter: u32,
    pub exact: bool,
    pub sources: usize,
}

fn bfs_sum_max(csr: &Csr, src: usize, dist: &mut [u32], queue: &mut Vec<u32>) -> (u64, u32, usize) {
    dist.fill(u32::MAX);
    queue.clear();
    dist[src] = 0;
    queue.push(src as u32);
    let mut head = 0;
    let mut sum = 0u64;
    let mut max = 0u32;
    while head < queue.len() {
        let u = queue[head] as usize;
        head += 1;
        let du = dist[u];
        sum += du as u64;
        max = max.max(du);
        for &v in csr.neighbors(u) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = du + 1;
                queue.push(v);
            }
        }
    }
    (sum, max, queue.len())
}

/// Mean shortest path and diameter of a connected graph.
pub fn shortest_path_stats(g: &TemporalGraph, mode: PathMode) -> Result<PathStats> {
    let components = g.component_count();
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    Ok(path_stats_connected(&g.to_csr(), mode))
}

fn path_stats_connected(csr: &Csr, mode: PathMode) -> PathStats {
    let n = csr.node_count();
    let (sources, exact): (Vec<usize>, bool) = match mode {
        PathMode::Sampled { sources, seed } if sources < n => {
            let mut rng = RngState::new(seed);
            let mut s = rng.sample_indices(n, sources);
            s.sort_unstable();
            (s, false)
        }
        _ => ((0..n).collect(), true),
    };
    if n < 2 {
        return PathStats { mean: 0.0, diameter: 0, exact, sources: sources.len() };
    }
    let (sum, max) = sources
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], Vec::with_capacity(n)),
            |(dist, queue), &s| {
                let (sum, max, _) = bfs_sum_max(csr, s, dist, queue);
                (sum, max)
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    PathStats {
        mean: sum as f64 / (sources.len() as f64 * (n - 1) as f64),
        diameter: max,
        exact,
        sources: sources.len(),
    }
}

/// Degree assortativity: Pearson correlation of endpoint degrees over the
/// symmetrised edge list. `Ok(None)` when the degree variance is zero.
pub fn degree_assortativity(g: &TemporalGraph) -> Result<Option<f64>> {
    assortativity_csr(&g.to_csr())
}

pub fn assortativity_csr(csr: &Csr) -> Result<Option<f64>> {
    let m = csr.edge_count();
    if m == 0 {
        return Err(Error::Empty("assortativity needs at least one edge".into()));
    }
    // With both orientations, x and y share one marginal:
    //   sum x = sum_v d^2, sum x^2 = sum_v d^3, sum xy = 2 sum_edges d_u d_v
    let (mut sx, mut sxx, mut sxy) = (0i128, 0i128, 0i128);
    for u in 0..csr.node_count() {
        let du = csr.degree(u) as i128;
        sx += du * du;
        sxx += du * du * du;
        for &v in csr.neighbors(u) {
            sxy += du * csr.degree(v as usize) as i128;
        }
    }
    let count = 2 * m as i128;
    let num = count * sxy - sx * sx;
    let den = count * sxx - sx * sx;
    if den == 0 {
        return Ok(None);
    }
    Ok(Some(num as f64 / den as f64))
}

/// Temporal statistics of an interaction log (genesis at index 0).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionStats {
    /// Growth interactions (genesis excluded).
    pub interactions: usize,
    /// Mean interactions per node, genesis included.
    pub mean_node_interactions: f64,
    /// Mean participants per growth interaction.
    pub mean_size: Option<f64>,
}

pub fn interaction_stats(log: &[Interaction]) -> Result<InteractionStats> {
    if log.is_empty() {
        return Err(Error::Empty("interaction log".into()));
    }
    let node_count = log
        .iter()
        .flat_map(|it| it.participants())
        .max()
        .map_or(0, |m| m as usize + 1);
    let participations: usize = log.iter().map(Interaction::size).sum();
    let growth = &log[1..];
    let mean_size = if growth.is_empty() {
        None
    } else {
        Some(growth.iter().map(Interaction::size).sum::<usize>() as f64 / growth.len() as f64)
    };
    Ok(InteractionStats {
        interactions: growth.len(),
        mean_node_interactions: participations as f64 / node_count as f64,
        mean_size,
    })
}

/// Flat summary of a graph's global properties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub m: usize,
    pub mean_degree: f64,
    pub mean_shortest_path: Option<f64>,
    pub diameter: Option<u32>,
    pub global_cc: f64,
    pub mean_local_cc: f64,
    pub assortativity: Option<f64>,
    pub density: f64,
    pub component_count: usize,
    pub mean_edge_weight: f64,
    /// `true` when paths were computed from every node.
    pub paths_exact: bool,
    /// `true` when the graph was disconnected and paths cover only its
    /// largest component.
    pub paths_largest_component: bool,
}

impl MetricsReport {
    /// `paths = None` skips the all-pairs BFS.
    pub fn compute(g: &TemporalGraph, paths: Option<PathMode>) -> MetricsReport {
        let n = g.node_count();
        let m = g.edge_count();
        let csr = g.to_csr();
        let cc = clustering_csr(&csr);
        let (labels, components) = g.component_labels();

        let mut largest = false;
        let path = match paths {
            None => None,
            Some(_) if n < 2 => None,
            Some(mode) if components == 1 => Some(path_stats_connected(&csr, mode)),
            Some(mode) => {
                let mut sizes = vec![0usize; components];
                for &l in &labels {
                    sizes[l as usize] += 1;
                }
                // ties go to the component holding the lowest node id
                let best = (0..components).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap_or(0);
                let keep: Vec<u32> = (0..n as u32).filter(|&v| labels[v as usize] == best as u32).collect();
                largest = true;
                let sub = g.induced(&keep);
                (keep.len() >= 2).then(|| path_stats_connected(&sub.to_csr(), mode))
            }
        };

        MetricsReport {
            n,
            m,
            mean_degree: if n == 0 { 0.0 } else { 2.0 * m as f64 / n as f64 },
            mean_shortest_path: path.map(|p| p.mean),
            diameter: path.map(|p| p.diameter),
            global_cc: cc.global,
            mean_local_cc: cc.mean_local,
            assortativity: assortativity_csr(&csr).ok().flatten(),
            density: if n < 2 { 0.0 } else { 2.0 * m as f64 / (n as f64 * (n - 1) as f64) },
            component_count: components,
            mean_edge_weight: if m == 0 { 0.0 } else { g.total_weight() as f64 / m as f64 },
            paths_exact: path.is_some_and(|p| p.exact),
            paths_largest_component: largest,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_edges(edges: &[(u32, u32)]) -> TemporalGraph {
        TemporalGraph::from_weighted_edges(edges.iter().map(|&(u, v)| (u, v, 1)), 0).unwrap()
    }

    fn complete(n: u32) -> TemporalGraph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        from_edges(&e)
    }

    fn star(leaves: u32) -> TemporalGraph {
        from_edges(&(1..=leaves).map(|v| (0, v)).collect::<Vec<_>>())
    }

    #[test]
    fn degree_distributions() {
        assert_eq!(degree_distribution(&complete(3)), BTreeMap::from([(2, 3)]));
        assert_eq!(degree_distribution(&star(4)), BTreeMap::from([(1, 4), (4, 1)]));
        let p4 = from_edges(&[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(degree_distribution(&p4), BTreeMap::from([(1, 2), (2, 2)]));
        let mut buf = Vec::new();
        write_distribution(&degree_distribution(&p4), ("value", "count"), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "value,count\n1,2\n2,2\n");
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(global_clustering(&complete(3)), 1.0);
        assert_eq!(mean_local_clustering(&complete(3)), 1.0);
        let p3 = from_edges(&[(0, 1), (1, 2)]);
        assert_eq!(global_clustering(&p3), 0.0);
        assert_eq!(mean_local_clustering(&star(4)), 0.0);
        // K4 minus edge (2,3): two triangles, eight connected triples
        let k4e = from_edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!((global_clustering(&k4e) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn path_examples() {
        let s = shortest_path_stats(&complete(6), PathMode::Exact).unwrap();
        assert_eq!((s.mean, s.diameter), (1.0, 1));
        let p3 = from_edges(&[(0, 1), (1, 2)]);
        let s = shortest_path_stats(&p3, PathMode::Exact).unwrap();
        assert!((s.mean - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.diameter, 2);
        let split = from_edges(&[(0, 1), (2, 3)]);
        assert!(matches!(
            shortest_path_stats(&split, PathMode::Exact),
            Err(Error::Disconnected { components: 2 })
        ));
    }

    #[test]
    fn sampled_with_all_sources_is_exact() {
        let p = from_edges(&[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let a = shortest_path_stats(&p, PathMode::Exact).unwrap();
        let b = shortest_path_stats(&p, PathMode::Sampled { sources: 99, seed: 1 }).unwrap();
        assert_eq!(a, b);
        let c = shortest_path_stats(&p, PathMode::Sampled { sources: 2, seed: 1 }).unwrap();
        assert!(!c.exact);
        assert!(c.diameter <= a.diameter);
    }

    #[test]
    fn assortativity_examples() {
        let c5 = from_edges(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(degree_assortativity(&c5).unwrap(), None);
        let r = degree_assortativity(&star(3)).unwrap().unwrap();
        assert!((r + 1.0).abs() < 1e-12);
        assert!(degree_assortativity(&TemporalGraph::from_weighted_edges([], 3).unwrap()).is_err());
    }

    #[test]
    fn interaction_stats_genesis_only() {
        let log = vec![Interaction { t: 0, proactive: 0, newbies: vec![1], ..Default::default() }];
        let s = interaction_stats(&log).unwrap();
        assert_eq!(s.interactions, 0);
        assert_eq!(s.mean_node_interactions, 1.0);
        assert_eq!(s.mean_size, None);
        assert!(interaction_stats(&[]).is_err());
    }

    #[test]
    fn report_on_disconnected_uses_largest_component() {
        let g = from_edges(&[(0, 1), (2, 3), (3, 4)]);
        let r = MetricsReport::compute(&g, Some(PathMode::Exact));
        assert!(r.paths_largest_component);
        assert_eq!(r.component_count, 2);
        assert_eq!(r.diameter, Some(2));
        assert!((r.mean_shortest_path.unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.mean_degree * r.n as f64, 2.0 * r.m as f64);
    }
}
