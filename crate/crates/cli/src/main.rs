use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lambda3::community::{louvain, modularity};
use lambda3::experiments::{
    run_correlations, run_ensemble, run_evolution, write_evolution_csv, SettingPreset, SnapshotSchedule,
    DEFAULT_RUNS, DEFAULT_SCHEDULE,
};
use lambda3::generator::{generate, GeneratorConfig};
use lambda3::graph::{read_edge_list, write_edge_list, write_log};
use lambda3::ingest::{
    assign_months, build_coauthorship_network, classify_stream, coauthor_histogram, poisson_fit_report,
    read_publications, sort_by_time, top_main_authors, write_classified,
};
use lambda3::metrics::{degree_distribution, interaction_stats, write_distribution, MetricsReport, PathMode};
use lambda3::{Error, Result};

const DEFAULT_SEED: u64 = 12345;

#[derive(Parser)]
#[command(name = "lambda3", version, about = "Three-lambda collaborative network model")]
struct Cli {
    /// Worker threads for the parallel metric kernels (default: all cores).
    #[arg(long, global = true, env = "LAMBDA3_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a network; writes edges.csv, interactions.jsonl and summary.json.
    Generate(GenerateArgs),
    /// Global properties of an edge list.
    Metrics(MetricsArgs),
    /// Louvain communities of an edge list.
    Communities(CommunitiesArgs),
    /// Analyse a year,month,authors publication stream.
    Ingest(IngestArgs),
    /// Mean/sd of network properties over seeded runs.
    Ensemble(EnsembleArgs),
    /// Properties measured at node-count thresholds during one run.
    Evolve(EvolveArgs),
    /// Correlations between node creation order, degree and interactions.
    Correlate(CorrelateArgs),
}

#[derive(Args, Clone)]
struct SettingArgs {
    /// setting1, setting2 or setting3.
    #[arg(long)]
    preset: Option<String>,
    /// Mean number of neighbours per interaction.
    #[arg(long)]
    l1: Option<f64>,
    /// Mean number of newbies per interaction (must be > 0).
    #[arg(long)]
    l2: Option<f64>,
    /// Mean number of new connections per interaction.
    #[arg(long)]
    l3: Option<f64>,
}

impl SettingArgs {
    fn resolve(&self) -> Result<SettingPreset> {
        let base = match &self.preset {
            Some(name) => SettingPreset::by_name(name)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown preset {name:?}")))?,
            None => SettingPreset {
                name: "custom",
                lambdas: (0.0, self.l2.ok_or_else(|| Error::InvalidParameter("--l2 or --preset is required".into()))?, 0.0),
            },
        };
        let (a, b, c) = base.lambdas;
        let lambdas = (self.l1.unwrap_or(a), self.l2.unwrap_or(b), self.l3.unwrap_or(c));
        Ok(SettingPreset {
            name: if lambdas == base.lambdas { base.name } else { "custom" },
            lambdas,
        })
    }
}

#[derive(Args, Clone, Copy)]
struct PathArgs {
    /// All-pairs BFS regardless of size.
    #[arg(long, conflicts_with = "sampled")]
    exact: bool,
    /// BFS from this many random sources.
    #[arg(long, value_name = "SOURCES")]
    sampled: Option<usize>,
}

impl PathArgs {
    fn mode(&self, n: usize, seed: u64) -> PathMode {
        match (self.exact, self.sampled) {
            (true, _) => PathMode::Exact,
            (_, Some(sources)) => PathMode::Sampled { sources, seed },
            _ => PathMode::auto(n, seed),
        }
    }

    fn explicit(&self, seed: u64) -> Option<PathMode> {
        match (self.exact, self.sampled) {
            (true, _) => Some(PathMode::Exact),
            (_, Some(sources)) => Some(PathMode::Sampled { sources, seed }),
            _ => None,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Target node count.
    #[arg(short = 'N', long = "nodes")]
    nodes: usize,
    #[command(flatten)]
    setting: GenerateSetting,
    /// Random seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    paths: PathArgs,
}

#[derive(Args)]
struct GenerateSetting {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    l1: Option<f64>,
    #[arg(long, required_unless_present = "preset")]
    l2: Option<f64>,
    #[arg(long)]
    l3: Option<f64>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Edge list CSV (src,dst,weight).
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    paths: PathArgs,
    /// Seed for source sampling.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Directory for metrics.json and degree_distribution.csv.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CommunitiesArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Directory for partition.csv, community_sizes.csv and communities.json.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// Publication CSV (year,month,authors with `|`-separated authors).
    #[arg(short, long)]
    input: PathBuf,
    /// Seed for filling in missing months.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of most frequent main authors to report.
    #[arg(long, default_value_t = 15)]
    top: usize,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct EnsembleArgs {
    #[command(flatten)]
    setting: SettingArgs,
    #[arg(short = 'N', long = "nodes", default_value_t = 10_000)]
    nodes: usize,
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    /// Seed of the first run; run i uses seed + i.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    paths: PathArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    setting: SettingArgs,
    /// Comma-separated, strictly increasing node counts.
    #[arg(long, value_delimiter = ',')]
    thresholds: Option<Vec<usize>>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct CorrelateArgs {
    #[command(flatten)]
    setting: SettingArgs,
    #[arg(short = 'N', long = "nodes", default_value_t = 100_000)]
    nodes: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Serialize)]
struct GenerateSummary<'a> {
    config: &'a GeneratorConfig,
    genesis_size: usize,
    interactions: lambda3::InteractionStats,
    metrics: MetricsReport,
}

#[derive(Serialize)]
struct CommunitySummary {
    seed: u64,
    communities: usize,
    modularity: Option<f64>,
}

#[derive(Serialize)]
struct IngestSummary {
    publications: usize,
    retained: usize,
    dropped: usize,
    authors: usize,
    lambda_hat: f64,
    chi_square: lambda3::stats::ChiSquareFit,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let setting = SettingArgs {
        preset: a.setting.preset,
        l1: a.setting.l1,
        l2: a.setting.l2,
        l3: a.setting.l3,
    }
    .resolve()?;
    let cfg = setting.config(a.nodes, a.seed);
    let out = generate(cfg)?;

    let mut w = create(&a.out, "edges.csv")?;
    write_edge_list(&out.graph, &mut w)?;
    w.flush()?;
    write_log(&out.log, create(&a.out, "interactions.jsonl")?)?;

    let summary = GenerateSummary {
        config: &cfg,
        genesis_size: cfg.genesis_size(),
        interactions: interaction_stats(&out.log)?,
        metrics: MetricsReport::compute(&out.graph, Some(a.paths.mode(out.graph.node_count(), a.seed))),
    };
    write_json(&a.out, "summary.json", &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_metrics(a: MetricsArgs) -> Result<()> {
    let g = read_edge_list(open(&a.input)?)?;
    let report = MetricsReport::compute(&g, Some(a.paths.mode(g.node_count(), a.seed)));
    if let Some(dir) = &a.out {
        write_json(dir, "metrics.json", &report)?;
        let mut w = create(dir, "degree_distribution.csv")?;
        write_distribution(&degree_distribution(&g), ("value", "count"), &mut w)?;
        w.flush()?;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_communities(a: CommunitiesArgs) -> Result<()> {
    let g = read_edge_list(open(&a.input)?)?;
    let p = louvain(&g, a.seed);
    let summary = CommunitySummary {
        seed: a.seed,
        communities: p.community_count(),
        modularity: modularity(&g, &p).ok(),
    };
    if let Some(dir) = &a.out {
        let mut w = create(dir, "partition.csv")?;
        p.write_csv(&mut w)?;
        w.flush()?;
        let mut w = create(dir, "community_sizes.csv")?;
        p.write_size_distribution(&mut w)?;
        w.flush()?;
        write_json(dir, "communities.json", &summary)?;
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_ingest(a: IngestArgs) -> Result<()> {
    let raw = read_publications(open(&a.input)?)?;
    let mut records = assign_months(&raw, a.seed)?;
    sort_by_time(&mut records);
    let classified = classify_stream(&records)?;
    let hist = coauthor_histogram(&classified.publications)?;
    let fit = poisson_fit_report(&hist, hist.lambda_hat);
    let (graph, names) = build_coauthorship_network(&records);

    let mut w = create(&a.out, "classified.csv")?;
    write_classified(&classified, &mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "histogram.csv")?;
    hist.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "fit.csv")?;
    fit.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "top_authors.csv")?;
    writeln!(w, "rank,author,publications,coauthors,count")?;
    for (rank, (name, h)) in top_main_authors(&classified.publications, a.top).iter().enumerate() {
        for (k, c) in &h.counts {
            writeln!(w, "{},{},{},{k},{c}", rank + 1, name, h.publications)?;
        }
    }
    w.flush()?;
    let mut w = create(&a.out, "edges.csv")?;
    write_edge_list(&graph, &mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "authors.csv")?;
    writeln!(w, "node,author")?;
    for (i, n) in names.iter().enumerate() {
        writeln!(w, "{i},{n}")?;
    }
    w.flush()?;

    let summary = IngestSummary {
        publications: records.len(),
        retained: classified.publications.len(),
        dropped: classified.dropped,
        authors: names.len(),
        lambda_hat: hist.lambda_hat,
        chi_square: fit.chi_square,
    };
    write_json(&a.out, "summary.json", &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn emit<T: Serialize>(
    format: Format,
    out: &Path,
    value: &T,
    csv: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<()> {
    match format {
        Format::Json => {
            write_json(out, "report.json", value)?;
            println!("{}", serde_json::to_string_pretty(value)?);
        }
        Format::Csv => {
            let mut buf = Vec::new();
            csv(&mut buf)?;
            let mut w = create(out, "report.csv")?;
            w.write_all(&buf)?;
            w.flush()?;
            print!("{}", String::from_utf8_lossy(&buf));
        }
    }
    Ok(())
}

fn cmd_ensemble(a: EnsembleArgs) -> Result<()> {
    let setting = a.setting.resolve()?;
    let report = run_ensemble(&setting, a.nodes, a.runs, a.seed, a.paths.explicit(a.seed))?;
    emit(a.format, &a.out, &report, |b| report.write_csv(b, true))
}

fn cmd_evolve(a: EvolveArgs) -> Result<()> {
    let setting = a.setting.resolve()?;
    let schedule = SnapshotSchedule::new(a.thresholds.unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec()))?;
    let snaps = run_evolution(&setting, &schedule, a.seed)?;
    emit(a.format, &a.out, &snaps, |b| write_evolution_csv(&snaps, b))
}

fn cmd_correlate(a: CorrelateArgs) -> Result<()> {
    let setting = a.setting.resolve()?;
    let c = run_correlations(&setting, a.nodes, a.seed)?;
    emit(a.format, &a.out, &c, |b| c.write_csv(b))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Communities(a) => cmd_communities(a),
        Command::Ingest(a) => cmd_ingest(a),
        Command::Ensemble(a) => cmd_ensemble(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Correlate(a) => cmd_correlate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
