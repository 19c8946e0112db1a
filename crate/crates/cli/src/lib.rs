//! Config-driven runs of the conclique sampler: coloring, simulation,
//! timing grids and Monte Carlo goodness of fit.
//!
//! Each command writes its human-readable report to the supplied writer
//! and returns a summary, so the binary and the tests share one code path.

pub mod config;
pub mod statistic;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use conclique::diagnostics::gof_pvalue;
use conclique::io::{self, BinarySampleWriter, CsvSampleWriter, TimingSidecar};
use conclique::sampler::{init_field, run_chain};
use conclique::{
    ChainConfig, ConcliqueCover, ConcliqueSampler, GibbsSweep, ModelSpec, NeighborhoodGraph,
    SingleSiteSampler,
};

pub use config::{CoverConfig, RunConfig, SampleFormat, SamplerChoice, TopologyConfig};
pub use statistic::{builtin_statistic, EdgePair, Statistic};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] conclique::Error),
    #[error("cannot write report: {0}")]
    Report(#[from] std::io::Error),
}

impl CliError {
    /// 3 for numerical failures during a run, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(conclique::Error::Numerical(_)) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone)]
pub struct Options {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl Options {
    pub fn new(config: impl Into<PathBuf>) -> Self {
        Self {
            config: config.into(),
            seed: None,
            threads: 1,
            output: None,
        }
    }
}

fn build_cover(cfg: &RunConfig, graph: &NeighborhoodGraph) -> Result<ConcliqueCover> {
    let cover = match &cfg.cover {
        CoverConfig::Analytic => match &cfg.topology {
            TopologyConfig::Lattice {
                rows,
                cols,
                neighborhood,
            } => conclique::analytic_lattice_cover(*rows, *cols, *neighborhood)?,
            TopologyConfig::Incidence { vertices } => conclique::round_robin_edge_cover(*vertices)?,
            _ => {
                return Err(CliError::Config(
                    "analytic cover requires a lattice or incidence topology".into(),
                ))
            }
        },
        CoverConfig::Dsatur => conclique::dsatur(graph),
        CoverConfig::WelshPowell => conclique::greedy_welsh_powell(graph),
        CoverConfig::File { path } => {
            let p = cfg.resolve(path);
            if !p.is_file() {
                return Err(CliError::Config(format!(
                    "cover file not found: {}",
                    p.display()
                )));
            }
            io::read_cover_json(&p)?
        }
    };
    conclique::ensure_valid_cover(graph, &cover)?;
    Ok(cover)
}

#[derive(Debug, Clone)]
pub struct ColorSummary {
    pub q: usize,
    pub delta_n: usize,
    pub seconds: f64,
    pub cover_path: PathBuf,
}

pub fn cmd_color(opts: &Options, out: &mut dyn Write) -> Result<ColorSummary> {
    let cfg = RunConfig::load(&opts.config)?;
    let graph = cfg.build_graph()?;
    let t0 = Instant::now();
    let cover = build_cover(&cfg, &graph)?;
    let seconds = t0.elapsed().as_secs_f64();
    let delta_n = conclique::delta_n_bound(&graph);

    let dir = cfg.output_dir(opts.output.as_deref());
    std::fs::create_dir_all(&dir).map_err(conclique::Error::from)?;
    let cover_path = dir.join(&cfg.output.cover);
    io::write_cover_json(&cover_path, &cover)?;

    writeln!(out, "Q={}", cover.q())?;
    writeln!(out, "Delta_n={delta_n}")?;
    writeln!(out, "coloring_seconds={seconds:.6}")?;
    writeln!(out, "cover={}", cover_path.display())?;
    Ok(ColorSummary {
        q: cover.q(),
        delta_n,
        seconds,
        cover_path,
    })
}

#[derive(Debug, Clone)]
pub struct SimulateSummary {
    pub seed: u64,
    pub retained: u64,
    pub timing: TimingSidecar,
    pub samples_path: PathBuf,
    pub timing_path: PathBuf,
}

fn chain_config(cfg: &RunConfig, opts: &Options) -> Result<ChainConfig> {
    let section = cfg
        .chain
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no chain section".into()))?;
    let iterations = section
        .iterations
        .ok_or_else(|| CliError::Config("chain.iterations is required".into()))?;
    let config = ChainConfig::new(iterations, opts.seed.unwrap_or(section.seed))
        .burn_in(section.burn_in)
        .thinning(section.thinning)
        .init(section.init.clone())
        .order(section.order)
        .threads(opts.threads);
    config.validate()?;
    Ok(config)
}

fn model_for(cfg: &RunConfig, graph: &NeighborhoodGraph) -> Result<ModelSpec> {
    let spec = cfg.model(graph.n())?;
    spec.validate(graph)?;
    Ok(spec)
}

enum SampleSink {
    Csv(Box<CsvSampleWriter<std::io::BufWriter<std::fs::File>>>),
    Binary(BinarySampleWriter<std::io::BufWriter<std::fs::File>>),
}

impl SampleSink {
    fn write(&mut self, values: &[f64]) -> conclique::Result<()> {
        match self {
            SampleSink::Csv(w) => w.write(values),
            SampleSink::Binary(w) => w.write(values),
        }
    }

    fn finish(self) -> conclique::Result<()> {
        match self {
            SampleSink::Csv(w) => w.finish(),
            SampleSink::Binary(w) => w.finish().map(drop),
        }
    }
}

/// Streams every retained field to `sink`, returning the sampling summary.
/// The first write error stops recording and is reported after the run.
fn stream<S: GibbsSweep>(
    sampler: &mut S,
    state: &mut [f64],
    config: &ChainConfig,
    sink: &mut SampleSink,
) -> Result<conclique::RunSummary> {
    let mut failed = None;
    let summary = run_chain(sampler, state, config, |_, y| {
        if failed.is_none() {
            failed = sink.write(y).err();
        }
    })?;
    match failed {
        Some(e) => Err(e.into()),
        None => Ok(summary),
    }
}

pub fn cmd_simulate(opts: &Options, out: &mut dyn Write) -> Result<SimulateSummary> {
    let setup = Instant::now();
    let cfg = RunConfig::load(&opts.config)?;
    let chain = chain_config(&cfg, opts)?;
    let graph = cfg.build_graph()?;
    let spec = model_for(&cfg, &graph)?;
    let mut state = init_field(&graph, &spec, &chain.init, chain.seed)?.into_inner();

    enum Kind {
        Cgs(Box<ConcliqueSampler>),
        Single(Box<SingleSiteSampler>),
    }
    let (kind, q) = match cfg.sampler {
        SamplerChoice::Cgs => {
            let cover = build_cover(&cfg, &graph)?;
            let q = cover.q();
            let s = ConcliqueSampler::new(&spec, &graph, &cover, chain.seed)?
                .with_order(chain.order)
                .with_threads(chain.threads)?;
            (Kind::Cgs(Box::new(s)), q)
        }
        // Every site is its own block.
        SamplerChoice::SingleSite => (
            Kind::Single(Box::new(SingleSiteSampler::new(&spec, &graph, chain.seed)?)),
            graph.n(),
        ),
    };
    let overhead_seconds = setup.elapsed().as_secs_f64();

    let dir = cfg.output_dir(opts.output.as_deref());
    std::fs::create_dir_all(&dir).map_err(conclique::Error::from)?;
    let samples_path = dir.join(&cfg.output.samples);
    let file = io::create(&samples_path)?;
    let mut sink = match cfg.output.format {
        SampleFormat::Csv => SampleSink::Csv(Box::new(CsvSampleWriter::new(file, graph.n())?)),
        SampleFormat::Binary => {
            SampleSink::Binary(BinarySampleWriter::new(file, graph.n(), chain.retained())?)
        }
    };
    let summary = match kind {
        Kind::Cgs(mut s) => stream(s.as_mut(), &mut state, &chain, &mut sink)?,
        Kind::Single(mut s) => stream(s.as_mut(), &mut state, &chain, &mut sink)?,
    };
    sink.finish()?;

    let timing = TimingSidecar {
        seconds_total: summary.seconds_total,
        seconds_per_iteration: summary.seconds_per_iteration,
        overhead_seconds,
        q,
        n: graph.n(),
        m: chain.iterations,
        seed: chain.seed,
    };
    let timing_path = dir.join(&cfg.output.timing);
    let json = serde_json::to_string_pretty(&timing).map_err(conclique::Error::from)?;
    std::fs::write(&timing_path, json + "\n").map_err(conclique::Error::from)?;

    writeln!(out, "seed={}", chain.seed)?;
    writeln!(
        out,
        "sampler={} n={} Q={q} M={} retained={}",
        cfg.sampler.name(),
        graph.n(),
        chain.iterations,
        summary.retained
    )?;
    writeln!(out, "seconds_total={:.6}", timing.seconds_total)?;
    writeln!(out, "overhead_seconds={overhead_seconds:.6}")?;
    writeln!(out, "samples={}", samples_path.display())?;
    writeln!(out, "timing={}", timing_path.display())?;
    Ok(SimulateSummary {
        seed: chain.seed,
        retained: summary.retained,
        timing,
        samples_path,
        timing_path,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub sampler: SamplerChoice,
    /// Site count for lattices, vertex count for incidence graphs.
    pub size: usize,
    pub iterations: u64,
    pub replicate: usize,
    pub seconds: f64,
}

fn time_sampler<S: GibbsSweep>(
    sampler: &mut S,
    graph: &NeighborhoodGraph,
    spec: &ModelSpec,
    config: &ChainConfig,
) -> Result<f64> {
    let mut state = init_field(graph, spec, &config.init, config.seed)?.into_inner();
    Ok(run_chain(sampler, &mut state, config, |_, _| {})?.seconds_total)
}

/// Sampling seconds (construction excluded) over the size × M × replicate
/// grid. Lattice sizes are side lengths of square lattices of the configured
/// neighborhood; incidence sizes are vertex counts.
pub fn cmd_benchmark(opts: &Options, out: &mut dyn Write) -> Result<Vec<BenchmarkRow>> {
    let cfg = RunConfig::load(&opts.config)?;
    let grid = cfg
        .benchmark
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no benchmark section".into()))?;
    if grid.sizes.is_empty() || grid.iterations.is_empty() || grid.replicates == 0 {
        return Err(CliError::Config(
            "benchmark grid is empty: sizes, iterations and replicates must be non-empty".into(),
        ));
    }
    if grid.samplers.is_empty() {
        return Err(CliError::Config("benchmark lists no samplers".into()));
    }
    if matches!(cfg.cover, CoverConfig::File { .. }) {
        return Err(CliError::Config(
            "benchmark builds its own graphs; a cover file cannot be reused".into(),
        ));
    }
    let section = cfg.chain.clone().unwrap_or_default();
    let base_seed = opts.seed.unwrap_or(section.seed);
    let (size_column, incidence) = match &cfg.topology {
        TopologyConfig::Lattice { .. } => ("n", false),
        TopologyConfig::Incidence { .. } => ("V", true),
        _ => {
            return Err(CliError::Config(
                "benchmark needs a lattice or incidence topology".into(),
            ))
        }
    };

    let mut rows = Vec::new();
    for &size in &grid.sizes {
        let sized = resized(&cfg, size);
        let graph = sized.build_graph()?;
        let spec = model_for(&sized, &graph)?;
        let cover = build_cover(&sized, &graph)?;
        for &iterations in &grid.iterations {
            for replicate in 1..=grid.replicates {
                let seed = base_seed.wrapping_add(replicate as u64 - 1);
                let config = ChainConfig::new(iterations, seed)
                    .init(section.init.clone())
                    .order(section.order)
                    .threads(opts.threads);
                config.validate()?;
                for &sampler in &grid.samplers {
                    let seconds = match sampler {
                        SamplerChoice::Cgs => {
                            let mut s = ConcliqueSampler::new(&spec, &graph, &cover, seed)?
                                .with_order(section.order)
                                .with_threads(opts.threads)?;
                            time_sampler(&mut s, &graph, &spec, &config)?
                        }
                        SamplerChoice::SingleSite => {
                            let mut s = SingleSiteSampler::new(&spec, &graph, seed)?;
                            time_sampler(&mut s, &graph, &spec, &config)?
                        }
                    };
                    rows.push(BenchmarkRow {
                        sampler,
                        size: if incidence { size } else { graph.n() },
                        iterations,
                        replicate,
                        seconds,
                    });
                }
            }
        }
    }

    let dir = cfg.output_dir(opts.output.as_deref());
    std::fs::create_dir_all(&dir).map_err(conclique::Error::from)?;
    let path = dir.join(&cfg.output.benchmark);
    let mut w = io::create(&path)?;
    writeln!(w, "sampler,{size_column},M,replicate,seconds").map_err(conclique::Error::from)?;
    for r in &rows {
        writeln!(
            w,
            "{},{},{},{},{:.9}",
            r.sampler.name(),
            r.size,
            r.iterations,
            r.replicate,
            r.seconds
        )
        .map_err(conclique::Error::from)?;
    }
    w.flush().map_err(conclique::Error::from)?;

    writeln!(out, "rows={}", rows.len())?;
    writeln!(out, "benchmark={}", path.display())?;
    Ok(rows)
}

fn resized(cfg: &RunConfig, size: usize) -> RunConfig {
    let mut sized = cfg.clone();
    sized.topology = match &cfg.topology {
        TopologyConfig::Lattice { neighborhood, .. } => TopologyConfig::Lattice {
            rows: size,
            cols: size,
            neighborhood: *neighborhood,
        },
        TopologyConfig::Incidence { .. } => TopologyConfig::Incidence { vertices: size },
        other => other.clone(),
    };
    sized
}

#[derive(Debug, Clone)]
pub struct GofSummary {
    pub t_observed: f64,
    pub t_simulated: Vec<f64>,
    pub p_value: f64,
}

/// Monte Carlo p-value of `observed` under `spec`: one CGS chain of
/// `burn_in + simulations · thinning` sweeps supplies the reference fields.
/// `chain.iterations` is ignored.
pub fn monte_carlo_gof(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    cover: &ConcliqueCover,
    statistic: &dyn Statistic,
    observed: &[f64],
    simulations: u64,
    chain: &ChainConfig,
) -> Result<GofSummary> {
    if simulations == 0 {
        return Err(CliError::Config(
            "number of Monte Carlo simulations must be at least 1".into(),
        ));
    }
    if observed.len() != graph.n() {
        return Err(conclique::Error::LengthMismatch {
            expected: graph.n(),
            actual: observed.len(),
        }
        .into());
    }
    if statistic.requires_binary() && !spec.is_binary() {
        return Err(CliError::Config(format!(
            "statistic {} needs binary data but the model is {}",
            statistic.name(),
            spec.family_name()
        )));
    }
    let t_observed = statistic.compute(graph, observed)?;

    let config = ChainConfig::new(chain.burn_in + simulations * chain.thinning, chain.seed)
        .burn_in(chain.burn_in)
        .thinning(chain.thinning)
        .init(chain.init.clone())
        .order(chain.order)
        .threads(chain.threads);
    let mut sampler = ConcliqueSampler::new(spec, graph, cover, config.seed)?
        .with_order(config.order)
        .with_threads(config.threads)?;
    let mut state = init_field(graph, spec, &config.init, config.seed)?.into_inner();
    let mut t_simulated = Vec::with_capacity(simulations as usize);
    let mut failed = None;
    run_chain(&mut sampler, &mut state, &config, |_, y| {
        match statistic.compute(graph, y) {
            Ok(t) => t_simulated.push(t),
            Err(e) => {
                failed.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = failed {
        return Err(e.into());
    }
    let p_value = gof_pvalue(t_observed, &t_simulated)?;
    Ok(GofSummary {
        t_observed,
        t_simulated,
        p_value,
    })
}

/// `p_M` as printed by `gof`.
pub fn format_pvalue(p: f64) -> String {
    if p == 0.0 {
        "0.0000 (< 1/M resolution)".into()
    } else {
        format!("{p:.4}")
    }
}

fn read_observed(path: &Path) -> Result<Vec<f64>> {
    if !path.is_file() {
        return Err(CliError::Config(format!(
            "observed data not found: {}",
            path.display()
        )));
    }
    let rows = io::read_samples_csv(io::open(path)?)?;
    rows.into_iter()
        .next()
        .map(conclique::Field::into_inner)
        .ok_or_else(|| CliError::Config(format!("{} holds no data row", path.display())))
}

pub fn cmd_gof(opts: &Options, out: &mut dyn Write) -> Result<GofSummary> {
    let cfg = RunConfig::load(&opts.config)?;
    let section = cfg
        .gof
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no gof section".into()))?;
    let statistic = builtin_statistic(&section.statistic)
        .ok_or_else(|| CliError::Config(format!("unknown statistic `{}`", section.statistic)))?;
    if section.simulations == 0 {
        return Err(CliError::Config(
            "gof.simulations must be at least 1".into(),
        ));
    }
    let graph = cfg.build_graph()?;
    let spec = model_for(&cfg, &graph)?;
    let cover = build_cover(&cfg, &graph)?;
    let observed = read_observed(&cfg.resolve(&section.observed))?;

    let chain = cfg.chain.clone().unwrap_or_default();
    let config = ChainConfig::new(1, opts.seed.unwrap_or(chain.seed))
        .burn_in(chain.burn_in)
        .thinning(chain.thinning)
        .init(chain.init)
        .order(chain.order)
        .threads(opts.threads);
    let summary = monte_carlo_gof(
        &spec,
        &graph,
        &cover,
        statistic.as_ref(),
        &observed,
        section.simulations,
        &config,
    )?;

    writeln!(out, "seed={}", config.seed)?;
    writeln!(out, "statistic={}", statistic.name())?;
    writeln!(out, "T_obs={}", summary.t_observed)?;
    writeln!(out, "M={}", section.simulations)?;
    writeln!(out, "p_M={}", format_pvalue(summary.p_value))?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pvalue_formatting() {
        assert_eq!(format_pvalue(0.0), "0.0000 (< 1/M resolution)");
        assert_eq!(format_pvalue(0.0024), "0.0024");
        assert_eq!(format_pvalue(1.0), "1.0000");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::Core(conclique::Error::Numerical("x".into())).exit_code(),
            3
        );
        assert_eq!(
            CliError::Core(conclique::Error::Incompatible("x".into())).exit_code(),
            2
        );
    }
}
