//! Brute-force reference implementations shared by the oracle and
//! acceptance tests. Everything here works on a dense adjacency matrix and
//! avoids the library's own graph algorithms.

#![allow(dead_code, clippy::needless_range_loop)]

use lambda3::rng::RngState;
use lambda3::TemporalGraph;

pub struct Dense {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
}

impl Dense {
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            adj[u as usize][v as usize] = true;
            adj[v as usize][u as usize] = true;
        }
        Self { n, adj }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&x| x).count()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }
}

/// Erdos-Renyi edges over `n` nodes with edge probability `p`.
pub fn random_edges(rng: &mut RngState, n: usize, p: f64) -> Vec<(u32, u32)> {
    let mut e = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.uniform() < p {
                e.push((u, v));
            }
        }
    }
    e
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_edges(rng: &mut RngState, n: usize, p: f64) -> Vec<(u32, u32)> {
    let mut e = Vec::new();
    let mut present = vec![vec![false; n]; n];
    for v in 1..n {
        let u = rng.below(v);
        e.push((u as u32, v as u32));
        present[u][v] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u][v] && rng.uniform() < p {
                e.push((u as u32, v as u32));
            }
        }
    }
    e
}

pub fn graph_of(n: usize, edges: &[(u32, u32)]) -> TemporalGraph {
    TemporalGraph::from_weighted_edges(edges.iter().map(|&(u, v)| (u, v, 1)), n).unwrap()
}

/// (global, mean local) clustering by enumerating every node triple.
pub fn clustering_oracle(d: &Dense) -> (f64, f64) {
    let n = d.n;
    let mut closed = 0u64;
    let mut triples = 0u64;
    let mut local = vec![(0u64, 0u64); n];
    for c in 0..n {
        for a in 0..n {
            for b in a + 1..n {
                if a == c || b == c || !d.adj[c][a] || !d.adj[c][b] {
                    continue;
                }
                triples += 1;
                local[c].1 += 1;
                if d.adj[a][b] {
                    closed += 1;
                    local[c].0 += 1;
                }
            }
        }
    }
    let global = if triples == 0 { 0.0 } else { closed as f64 / triples as f64 };
    let mean_local = if n == 0 {
        0.0
    } else {
        local
            .iter()
            .map(|&(c, t)| if t == 0 { 0.0 } else { c as f64 / t as f64 })
            .sum::<f64>()
            / n as f64
    };
    (global, mean_local)
}

/// (mean over unordered pairs, diameter) from Floyd-Warshall, or `None`
/// when some pair is unreachable.
pub fn floyd_warshall(d: &Dense) -> Option<(f64, u32)> {
    const INF: u32 = u32::MAX / 2;
    let n = d.n;
    let mut dist = vec![vec![INF; n]; n];
    for u in 0..n {
        dist[u][u] = 0;
        for v in 0..n {
            if d.adj[u][v] {
                dist[u][v] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    let (mut sum, mut pairs, mut diam) = (0u64, 0u64, 0u32);
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] >= INF {
                return None;
            }
            sum += dist[i][j] as u64;
            pairs += 1;
            diam = diam.max(dist[i][j]);
        }
    }
    Some((if pairs == 0 { 0.0 } else { sum as f64 / pairs as f64 }, diam))
}

/// Degree assortativity as the Pearson correlation of the two endpoint
/// degrees over both orientations of every edge.
pub fn assortativity_oracle(d: &Dense) -> Option<f64> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for u in 0..d.n {
        for v in 0..d.n {
            if d.adj[u][v] {
                x.push(d.degree(u) as f64);
                y.push(d.degree(v) as f64);
            }
        }
    }
    if x.len() < 2 {
        return None;
    }
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Modularity from the pairwise double sum over the adjacency matrix.
pub fn modularity_oracle(d: &Dense, labels: &[u32]) -> f64 {
    let two_m = 2.0 * d.edge_count() as f64;
    let mut q = 0.0;
    for i in 0..d.n {
        for j in 0..d.n {
            if labels[i] == labels[j] {
                let a = if d.adj[i][j] { 1.0 } else { 0.0 };
                q += a - (d.degree(i) * d.degree(j)) as f64 / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<u32>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<u32>, max: u32, out: &mut Vec<Vec<u32>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for l in 0..=max + 1 {
            cur.push(l);
            rec(i + 1, n, cur, max.max(l), out);
            cur.pop();
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    rec(1, n, &mut cur, 0, &mut out);
    out
}

/// Best modularity over every partition, with a maximizing labelling.
pub fn best_partition(d: &Dense) -> (f64, Vec<u32>) {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for p in set_partitions(d.n) {
        let q = modularity_oracle(d, &p);
        if q > best.0 + 1e-12 {
            best = (q, p);
        }
    }
    best
}

/// Counts the pairs of participants that were not yet adjacent before
/// the interaction, by explicit enumeration.
pub fn realized_new_edges(g: &TemporalGraph, participants: &[u32]) -> usize {
    let mut c = 0;
    for (i, &u) in participants.iter().enumerate() {
        for &v in &participants[i + 1..] {
            if !g.has_edge(u, v) {
                c += 1;
            }
        }
    }
    c
}

pub fn bridged_k4s() -> Vec<(u32, u32)> {
    let mut e = Vec::new();
    for off in [0u32, 4] {
        for u in 0..4 {
            for v in u + 1..4 {
                e.push((off + u, off + v));
            }
        }
    }
    e.push((3, 4));
    e
}
