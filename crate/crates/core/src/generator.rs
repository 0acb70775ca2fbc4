//! The three-lambda growth process.
//!
//! The network starts as a complete graph on `round(1 + λ1 + λ2 + λ3)`
//! nodes. Each growth step picks a proactive node uniformly at random and
//! draws three Poisson counts: `b` of its neighbours (capped at its degree),
//! `n` brand-new nodes, and `e` existing nodes it is not yet adjacent to
//! (capped at what is available). All participants end up pairwise
//! connected. Growth stops once the node count reaches the target; the last
//! step may overshoot by its newbie count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Interaction, NodeId, TemporalGraph};
use crate::rng::RngState;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_target: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(n_target: usize, lambdas: (f64, f64, f64), seed: u64) -> Self {
        Self {
            n_target,
            lambda1: lambdas.0,
            lambda2: lambdas.1,
            lambda3: lambdas.2,
            seed,
        }
    }

    /// Size of the genesis clique, `1 + λ1 + λ2 + λ3` rounded half-up.
    pub fn genesis_size(&self) -> usize {
        (1.0 + self.lambda1 + self.lambda2 + self.lambda3 + 0.5).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        for (name, l) in [("lambda1", self.lambda1), ("lambda3", self.lambda3)] {
            if !l.is_finite() || l < 0.0 {
                return Err(Error::invalid(format!("{name} must be finite and >= 0, got {l}")));
            }
        }
        if !self.lambda2.is_finite() || self.lambda2 <= 0.0 {
            return Err(Error::invalid(format!(
                "lambda2 must be finite and > 0, got {}",
                self.lambda2
            )));
        }
        let s0 = self.genesis_size();
        if self.n_target < s0 {
            return Err(Error::invalid(format!(
                "target node count {} is below the genesis clique size {s0}",
                self.n_target
            )));
        }
        if self.n_target > NodeId::MAX as usize / 2 {
            return Err(Error::invalid("target node count too large"));
        }
        Ok(())
    }
}

/// Role counts of one interaction after clamping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleDraw {
    pub b: usize,
    pub n: usize,
    pub e: usize,
}

impl RoleDraw {
    pub fn of(it: &Interaction) -> Self {
        Self {
            b: it.neighbors.len(),
            n: it.newbies.len(),
            e: it.new_connections.len(),
        }
    }
}

pub fn interaction_size(b: usize, n: usize, e: usize) -> usize {
    1 + b + n + e
}

/// Fewest and most edges an interaction with these role counts can create.
///
/// Newbie pairs and pairs touching the proactive node (other than its
/// neighbours) are always new; neighbour/neighbour, neighbour/new-connection
/// and new-connection/new-connection pairs may already exist.
pub fn edge_bounds(b: usize, n: usize, e: usize) -> (usize, usize) {
    let min = n + e + b * n + e * n + n * n.saturating_sub(1) / 2;
    let max = min + e * b + b * b.saturating_sub(1) / 2 + e * e.saturating_sub(1) / 2;
    (min, max)
}

/// Step-wise generator. Holds the live graph and log so callers can pause
/// between interactions without touching the variate stream.
#[derive(Clone, Debug)]
pub struct Generator {
    cfg: GeneratorConfig,
    rng: RngState,
    graph: TemporalGraph,
    log: Vec<Interaction>,
    scratch: Vec<NodeId>,
}

impl Generator {
    pub fn new(cfg: GeneratorConfig) -> Result<Self> {
        cfg.validate()?;
        let s0 = cfg.genesis_size() as NodeId;
        let genesis = Interaction {
            t: 0,
            proactive: 0,
            newbies: (1..s0).collect(),
            ..Default::default()
        };
        let mut graph = TemporalGraph::new();
        graph.apply_interaction(&genesis)?;
        Ok(Self {
            cfg,
            rng: RngState::new(cfg.seed),
            graph,
            log: vec![genesis],
            scratch: Vec::new(),
        })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.cfg
    }

    pub fn graph(&self) -> &TemporalGraph {
        &self.graph
    }

    pub fn log(&self) -> &[Interaction] {
        &self.log
    }

    pub fn is_done(&self) -> bool {
        self.graph.node_count() >= self.cfg.n_target
    }

    /// Performs one growth interaction regardless of the target.
    pub fn step(&mut self) -> Result<&Interaction> {
        let rng = &mut self.rng;
        let g = &self.graph;
        let existing = g.node_count();
        let proactive = rng.below(existing) as NodeId;
        let b_raw = rng.poisson(self.cfg.lambda1)? as usize;
        let n = rng.poisson(self.cfg.lambda2)? as usize;
        let e_raw = rng.poisson(self.cfg.lambda3)? as usize;

        let adj = g.neighbors(proactive)?;
        let b = b_raw.min(adj.len());
        let neighbors = rng.choose_without_replacement(adj, b)?;

        let available = existing - 1 - adj.len();
        let e = e_raw.min(available);
        let mut new_connections = Vec::with_capacity(e);
        if e == available {
            new_connections.extend(
                (0..existing as NodeId).filter(|&v| v != proactive && !g.has_edge(proactive, v)),
            );
        } else if e > 0 {
            if 2 * available >= existing {
                // dense pool: rejection sampling is cheap and stays uniform
                while new_connections.len() < e {
                    let v = rng.below(existing) as NodeId;
                    if v != proactive && !g.has_edge(proactive, v) && !new_connections.contains(&v) {
                        new_connections.push(v);
                    }
                }
            } else {
                self.scratch.clear();
                self.scratch.extend(
                    (0..existing as NodeId).filter(|&v| v != proactive && !g.has_edge(proactive, v)),
                );
                new_connections = rng.choose_without_replacement(&self.scratch, e)?;
            }
        }

        let first_new = existing as NodeId;
        let it = Interaction {
            t: self.log.len() as u64,
            proactive,
            neighbors,
            newbies: (first_new..first_new + n as NodeId).collect(),
            new_connections,
        };
        self.graph.apply_interaction(&it)?;
        self.log.push(it);
        Ok(self.log.last().expect("just pushed"))
    }

    pub fn run(&mut self) -> Result<()> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<Generated> {
        self.run()?;
        Ok(Generated {
            config: self.cfg,
            graph: self.graph,
            log: self.log,
        })
    }
}

/// A finished network and the ordered log that produced it (genesis at t=0).
#[derive(Clone, Debug)]
pub struct Generated {
    pub config: GeneratorConfig,
    pub graph: TemporalGraph,
    pub log: Vec<Interaction>,
}

impl Generated {
    /// Growth interactions, i.e. everything after genesis.
    pub fn growth(&self) -> &[Interaction] {
        &self.log[1..]
    }
}

pub fn generate(cfg: GeneratorConfig) -> Result<Generated> {
    Generator::new(cfg)?.finish()
}
