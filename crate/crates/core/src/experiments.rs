//! Experiment drivers: seeded ensembles, growth snapshots and the
//! creation-order correlation study.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::{louvain, modularity};
use crate::error::{Error, Result};
use crate::generator::{generate, Generator, GeneratorConfig};
use crate::graph::TemporalGraph;
use crate::metrics::{interaction_stats, InteractionStats, MetricsReport, PathMode};
use crate::stats::{mean_sd, pearson, MeanSd};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingPreset {
    pub name: &'static str,
    pub lambdas: (f64, f64, f64),
}

/// Neighbour-dominated triads.
pub const SETTING_1: SettingPreset = SettingPreset { name: "setting1", lambdas: (1.6, 0.35, 0.05) };
/// Large interactions dominated by newcomers.
pub const SETTING_2: SettingPreset = SettingPreset { name: "setting2", lambdas: (3.0, 6.0, 1.0) };
/// Dyads.
pub const SETTING_3: SettingPreset = SettingPreset { name: "setting3", lambdas: (0.45, 0.45, 0.1) };

pub const PRESETS: [SettingPreset; 3] = [SETTING_1, SETTING_2, SETTING_3];

impl SettingPreset {
    /// Accepts `setting1`, `setting_1`, `Setting_1` or `1`.
    pub fn by_name(name: &str) -> Option<Self> {
        let key: String = name.to_ascii_lowercase().chars().filter(|c| *c != '_').collect();
        PRESETS
            .into_iter()
            .find(|p| p.name == key || p.name.trim_start_matches("setting") == key)
    }

    pub fn config(&self, n_target: usize, seed: u64) -> GeneratorConfig {
        GeneratorConfig::new(n_target, self.lambdas, seed)
    }
}

pub const DEFAULT_RUNS: usize = 20;
pub const DEFAULT_SCHEDULE: [usize; 10] = [10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000];

/// Everything measured on one generated network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub metrics: MetricsReport,
    pub interactions: InteractionStats,
    pub communities: usize,
    pub modularity: Option<f64>,
}

fn measure(g: &TemporalGraph, log: &[crate::graph::Interaction], seed: u64, paths: Option<PathMode>) -> Result<RunRecord> {
    let metrics = MetricsReport::compute(g, paths);
    let interactions = interaction_stats(log)?;
    let p = louvain(g, seed);
    Ok(RunRecord {
        seed,
        metrics,
        interactions,
        communities: p.community_count(),
        modularity: modularity(g, &p).ok(),
    })
}

fn one_run(preset: &SettingPreset, n_target: usize, seed: u64, paths: Option<PathMode>) -> Result<RunRecord> {
    let out = generate(preset.config(n_target, seed))?;
    let mode = paths.unwrap_or_else(|| PathMode::auto(out.graph.node_count(), seed));
    measure(&out.graph, &out.log, seed, Some(mode))
}

/// Column-wise mean and sample sd over an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n: MeanSd,
    pub m: MeanSd,
    pub mean_degree: MeanSd,
    pub mean_shortest_path: MeanSd,
    pub diameter: MeanSd,
    pub cc: MeanSd,
    pub global_cc: MeanSd,
    pub r: MeanSd,
    pub com_l: MeanSd,
    pub q_l: MeanSd,
    pub interactions: MeanSd,
    pub mean_node_interactions: MeanSd,
    pub mean_size: MeanSd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub setting: String,
    pub lambdas: (f64, f64, f64),
    pub n_target: usize,
    pub runs: usize,
    pub seeds: Vec<u64>,
    pub stats: EnsembleStats,
    pub per_run: Vec<RunRecord>,
}

fn col(runs: &[RunRecord], f: impl Fn(&RunRecord) -> f64) -> MeanSd {
    mean_sd(&runs.iter().map(f).collect::<Vec<_>>())
}

impl EnsembleStats {
    pub fn from_runs(runs: &[RunRecord]) -> Self {
        let opt = |v: Option<f64>| v.unwrap_or(f64::NAN);
        Self {
            n: col(runs, |r| r.metrics.n as f64),
            m: col(runs, |r| r.metrics.m as f64),
            mean_degree: col(runs, |r| r.metrics.mean_degree),
            mean_shortest_path: col(runs, |r| opt(r.metrics.mean_shortest_path)),
            diameter: col(runs, |r| opt(r.metrics.diameter.map(f64::from))),
            cc: col(runs, |r| r.metrics.mean_local_cc),
            global_cc: col(runs, |r| r.metrics.global_cc),
            r: col(runs, |r| opt(r.metrics.assortativity)),
            com_l: col(runs, |r| r.communities as f64),
            q_l: col(runs, |r| opt(r.modularity)),
            interactions: col(runs, |r| r.interactions.interactions as f64),
            mean_node_interactions: col(runs, |r| r.interactions.mean_node_interactions),
            mean_size: col(runs, |r| opt(r.interactions.mean_size)),
        }
    }
}

/// Generates `runs` networks with seeds `base_seed + i` and aggregates
/// their metrics. Runs execute in parallel; aggregation is in seed order.
/// `paths = None` picks exact or sampled BFS by network size.
pub fn run_ensemble(
    preset: &SettingPreset,
    n_target: usize,
    runs: usize,
    base_seed: u64,
    paths: Option<PathMode>,
) -> Result<EnsembleReport> {
    if runs < 2 {
        return Err(Error::invalid(format!("an ensemble needs at least 2 runs, got {runs}")));
    }
    let seeds: Vec<u64> = (0..runs as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let per_run = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| {
            one_run(preset, n_target, seed, paths).map_err(|e| Error::Run { run: i, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleReport {
        setting: preset.name.to_string(),
        lambdas: preset.lambdas,
        n_target,
        runs,
        seeds,
        stats: EnsembleStats::from_runs(&per_run),
        per_run,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

impl EnsembleReport {
    pub const CSV_HEADER: &'static str = "setting,stat,n,m,mean_degree,mean_shortest_path,diameter,cc,global_cc,r,com_im,com_l,q_im,q_l,interactions,mean_node_interactions,mean_size";

    /// Two rows (mean, sd) in the global-properties + interactions layout.
    /// Infomap columns are reported as `n/a`.
    pub fn write_csv<W: Write>(&self, mut out: W, header: bool) -> Result<()> {
        if header {
            writeln!(out, "{}", Self::CSV_HEADER)?;
        }
        let s = &self.stats;
        let cols = [
            s.n, s.m, s.mean_degree, s.mean_shortest_path, s.diameter, s.cc, s.global_cc, s.r,
        ];
        let tail = [s.com_l, s.q_l, s.interactions, s.mean_node_interactions, s.mean_size];
        for (label, pick) in [("mean", 0), ("sd", 1)] {
            let v = |m: &MeanSd| if pick == 0 { m.mean } else { m.sd }.to_string();
            let head: Vec<String> = cols.iter().map(v).collect();
            let t: Vec<String> = tail.iter().map(v).collect();
            writeln!(
                out,
                "{},{label},{},n/a,{},n/a,{},{},{},{}",
                self.setting,
                head.join(","),
                t[0],
                t[1],
                t[2],
                t[3],
                t[4]
            )?;
        }
        Ok(())
    }
}

/// Strictly increasing node-count thresholds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotSchedule(Vec<usize>);

impl SnapshotSchedule {
    pub fn new(thresholds: Vec<usize>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::invalid("snapshot schedule is empty"));
        }
        if let Some(w) = thresholds.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "snapshot schedule must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self(thresholds))
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.0
    }

    pub fn last(&self) -> usize {
        *self.0.last().expect("non-empty")
    }
}

impl Default for SnapshotSchedule {
    fn default() -> Self {
        Self(DEFAULT_SCHEDULE.to_vec())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub threshold: usize,
    /// Index of the last interaction applied before measuring.
    pub t: u64,
    pub record: RunRecord,
}

/// One growth run, measured the first time the node count reaches each
/// threshold. Measuring only borrows the paused generator, so the variate
/// stream is the same as an uninterrupted run.
pub fn run_evolution(preset: &SettingPreset, schedule: &SnapshotSchedule, seed: u64) -> Result<Vec<Snapshot>> {
    let mut gen = Generator::new(preset.config(schedule.last(), seed))?;
    let mut out = Vec::with_capacity(schedule.thresholds().len());
    for &threshold in schedule.thresholds() {
        while gen.graph().node_count() < threshold {
            gen.step()?;
        }
        let g = gen.graph();
        let mode = PathMode::auto(g.node_count(), seed);
        out.push(Snapshot {
            threshold,
            t: gen.log().last().map_or(0, |it| it.t),
            record: measure(g, gen.log(), seed, Some(mode))?,
        });
    }
    Ok(out)
}

pub fn write_evolution_csv<W: Write>(snapshots: &[Snapshot], mut out: W) -> Result<()> {
    writeln!(
        out,
        "threshold,t,n,m,mean_degree,mean_shortest_path,diameter,cc,global_cc,r,com_im,com_l,q_im,q_l"
    )?;
    for s in snapshots {
        let m = &s.record.metrics;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},n/a,{},n/a,{}",
            s.threshold,
            s.t,
            m.n,
            m.m,
            m.mean_degree,
            fmt_opt(m.mean_shortest_path),
            m.diameter.map_or_else(|| "n/a".to_string(), |d| d.to_string()),
            m.mean_local_cc,
            m.global_cc,
            fmt_opt(m.assortativity),
            s.record.communities,
            fmt_opt(s.record.modularity),
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    pub setting: String,
    pub n: usize,
    pub seed: u64,
    pub rho_id_k: Option<f64>,
    pub rho_id_i: Option<f64>,
    pub rho_k_i: Option<f64>,
}

impl Correlations {
    pub const CSV_HEADER: &'static str = "setting,n,seed,rho_id_k,rho_id_i,rho_k_i";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            self.setting,
            self.n,
            self.seed,
            fmt_opt(self.rho_id_k),
            fmt_opt(self.rho_id_i),
            fmt_opt(self.rho_k_i)
        )?;
        Ok(())
    }
}

/// Pearson correlations between creation id, degree and interaction count
/// over all nodes of `g`.
pub fn node_correlations(g: &TemporalGraph) -> (Option<f64>, Option<f64>, Option<f64>) {
    let ids: Vec<f64> = (0..g.node_count()).map(|v| v as f64).collect();
    let k: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let i: Vec<f64> = g.interaction_counts().iter().map(|&c| c as f64).collect();
    (pearson(&ids, &k), pearson(&ids, &i), pearson(&k, &i))
}

pub fn run_correlations(preset: &SettingPreset, n_target: usize, seed: u64) -> Result<Correlations> {
    if n_target < 1000 {
        return Err(Error::invalid(format!(
            "correlation study needs at least 1000 nodes, got {n_target}"
        )));
    }
    let out = generate(preset.config(n_target, seed))?;
    let (rho_id_k, rho_id_i, rho_k_i) = node_correlations(&out.graph);
    Ok(Correlations {
        setting: preset.name.to_string(),
        n: out.graph.node_count(),
        seed,
        rho_id_k,
        rho_id_i,
        rho_k_i,
    })
}
