//! Conclique-based and single-site Gibbs samplers.
//!
//! Both samplers draw each site by inverse CDF from a uniform keyed by
//! `(seed, iteration, site)`. A chain is therefore a deterministic function
//! of its configuration, independent of the number of worker threads.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concliques::{ensure_valid_cover, ConcliqueCover};
use crate::error::{Error, Result};
use crate::kernel::CompiledModel;
use crate::models::{centered_law, sample_conditional, ModelSpec};
use crate::rng::{permutation, CounterRng, Stream};
use crate::topology::NeighborhoodGraph;

/// Classes smaller than this are updated serially even when a thread pool
/// is available.
const PARALLEL_MIN_CLASS: usize = 4096;
const PARALLEL_CHUNK: usize = 1024;

/// Site values indexed by site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Field(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field(v)
    }
}

impl AsRef<[f64]> for Field {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitPolicy {
    Constant(f64),
    Vector(Vec<f64>),
    /// Independent draws from each site's law with all neighbor terms at
    /// their centering constants.
    RandomFromMarginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderPolicy {
    /// Classes visited in cover order every iteration.
    #[default]
    Fixed,
    /// A fresh random class order each iteration.
    RandomPermutation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    /// Total iterations run, burn-in included.
    pub iterations: u64,
    pub burn_in: u64,
    pub thinning: u64,
    pub seed: u64,
    pub init: InitPolicy,
    pub order: OrderPolicy,
    /// Worker threads for within-conclique updates; 1 runs serially.
    pub threads: usize,
}

impl ChainConfig {
    pub fn new(iterations: u64, seed: u64) -> Self {
        Self {
            iterations,
            burn_in: 0,
            thinning: 1,
            seed,
            init: InitPolicy::Constant(0.0),
            order: OrderPolicy::Fixed,
            threads: 1,
        }
    }

    pub fn burn_in(mut self, burn_in: u64) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn thinning(mut self, thinning: u64) -> Self {
        self.thinning = thinning;
        self
    }

    pub fn init(mut self, init: InitPolicy) -> Self {
        self.init = init;
        self
    }

    pub fn order(mut self, order: OrderPolicy) -> Self {
        self.order = order;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be positive".into()));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning must be at least 1".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidConfig(format!(
                "burn-in {} must be smaller than the {} iterations run",
                self.burn_in, self.iterations
            )));
        }
        if self.threads == 0 {
            return Err(Error::InvalidConfig("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of retained samples, `⌊(iterations − burn_in) / thinning⌋`.
    pub fn retained(&self) -> u64 {
        (self.iterations - self.burn_in) / self.thinning
    }

    fn keeps(&self, m: u64) -> bool {
        m > self.burn_in && (m - self.burn_in).is_multiple_of(self.thinning)
    }
}

/// Work counters accumulated by a sampler.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerStats {
    /// Individual conditional draws.
    pub conditional_draws: u64,
    /// Passes computing conditional parameters for a batch of sites: one per
    /// conclique for CGS, one per site for single-site Gibbs.
    pub precompute_passes: u64,
    pub iterations: u64,
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    pub samples: Vec<Field>,
    pub iterations_run: u64,
    /// Sampling time only; model compilation and cover checks excluded.
    pub seconds_total: f64,
    pub seconds_per_iteration: f64,
    pub stats: SamplerStats,
}

/// Timing and counters of a streamed run.
#[derive(Debug, Clone, Copy)]
pub struct RunSummary {
    pub iterations_run: u64,
    pub retained: u64,
    pub seconds_total: f64,
    pub seconds_per_iteration: f64,
    pub stats: SamplerStats,
}

/// One complete Gibbs scan over all sites.
pub trait GibbsSweep {
    fn n(&self) -> usize;

    /// Performs iteration `iteration` (1-based) in place.
    fn sweep(&mut self, state: &mut [f64], iteration: u64);

    fn stats(&self) -> SamplerStats;
}

/// Conclique-based Gibbs sampler.
pub struct ConcliqueSampler {
    model: CompiledModel,
    cover: ConcliqueCover,
    rng: CounterRng,
    order: OrderPolicy,
    buffer: Vec<f64>,
    pool: Option<rayon::ThreadPool>,
    stats: SamplerStats,
}

fn build_pool(threads: usize) -> Result<Option<rayon::ThreadPool>> {
    if threads <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

impl ConcliqueSampler {
    pub fn new(
        spec: &ModelSpec,
        graph: &NeighborhoodGraph,
        cover: &ConcliqueCover,
        seed: u64,
    ) -> Result<Self> {
        ensure_valid_cover(graph, cover)?;
        let model = CompiledModel::compile(spec, graph)?;
        Ok(Self {
            model,
            cover: cover.clone(),
            rng: CounterRng::new(seed),
            order: OrderPolicy::Fixed,
            buffer: Vec::new(),
            pool: None,
            stats: SamplerStats::default(),
        })
    }

    pub fn with_order(mut self, order: OrderPolicy) -> Self {
        self.order = order;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        self.pool = build_pool(threads)?;
        Ok(self)
    }

    pub fn cover(&self) -> &ConcliqueCover {
        &self.cover
    }

    fn update_class(&mut self, class_index: usize, state: &mut [f64], iteration: u64) {
        let class = &self.cover.classes()[class_index];
        let model = &self.model;
        let rng = &self.rng;
        let buffer = &mut self.buffer;
        match &self.pool {
            Some(pool) if class.len() >= PARALLEL_MIN_CLASS => {
                buffer.clear();
                buffer.resize(class.len(), 0.0);
                let snapshot: &[f64] = state;
                pool.install(|| {
                    buffer
                        .par_chunks_mut(PARALLEL_CHUNK)
                        .zip(class.par_chunks(PARALLEL_CHUNK))
                        .for_each(|(out, sites)| {
                            for (slot, &i) in out.iter_mut().zip(sites) {
                                let u = rng.uniform(Stream::Update, iteration, i as u64);
                                *slot = model.draw(model.predictor(i, snapshot), u);
                            }
                        });
                });
                for (&i, &y) in class.iter().zip(buffer.iter()) {
                    state[i] = y;
                }
            }
            _ => {
                // No site of a conclique neighbors another, so writing in
                // place reads exactly the snapshot values.
                for &i in class {
                    let u = rng.uniform(Stream::Update, iteration, i as u64);
                    state[i] = model.draw(model.predictor(i, state), u);
                }
            }
        }
        self.stats.precompute_passes += 1;
        self.stats.conditional_draws += class.len() as u64;
    }
}

impl GibbsSweep for ConcliqueSampler {
    fn n(&self) -> usize {
        self.model.n()
    }

    fn sweep(&mut self, state: &mut [f64], iteration: u64) {
        match self.order {
            OrderPolicy::Fixed => {
                for c in 0..self.cover.q() {
                    self.update_class(c, state, iteration);
                }
            }
            OrderPolicy::RandomPermutation => {
                let order = permutation(&self.rng, Stream::Order, iteration, self.cover.q());
                for c in order {
                    self.update_class(c, state, iteration);
                }
            }
        }
        self.stats.iterations += 1;
    }

    fn stats(&self) -> SamplerStats {
        self.stats
    }
}

/// Sequential single-site Gibbs sampler sweeping sites `0..n` in order.
pub struct SingleSiteSampler {
    model: CompiledModel,
    rng: CounterRng,
    stats: SamplerStats,
}

impl SingleSiteSampler {
    pub fn new(spec: &ModelSpec, graph: &NeighborhoodGraph, seed: u64) -> Result<Self> {
        Ok(Self {
            model: CompiledModel::compile(spec, graph)?,
            rng: CounterRng::new(seed),
            stats: SamplerStats::default(),
        })
    }
}

impl GibbsSweep for SingleSiteSampler {
    fn n(&self) -> usize {
        self.model.n()
    }

    fn sweep(&mut self, state: &mut [f64], iteration: u64) {
        for i in 0..state.len() {
            let u = self.rng.uniform(Stream::Update, iteration, i as u64);
            state[i] = self.model.draw(self.model.predictor(i, state), u);
        }
        let n = state.len() as u64;
        self.stats.precompute_passes += n;
        self.stats.conditional_draws += n;
        self.stats.iterations += 1;
    }

    fn stats(&self) -> SamplerStats {
        self.stats
    }
}

/// Initial field according to `init`.
pub fn init_field(
    graph: &NeighborhoodGraph,
    spec: &ModelSpec,
    init: &InitPolicy,
    seed: u64,
) -> Result<Field> {
    let n = graph.n();
    let values = match init {
        InitPolicy::Constant(c) => {
            if !c.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "initial value {c} is not finite"
                )));
            }
            vec![*c; n]
        }
        InitPolicy::Vector(v) => {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: v.len(),
                });
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::MissingValue(i));
            }
            v.clone()
        }
        InitPolicy::RandomFromMarginal => {
            spec.validate(graph)?;
            let rng = CounterRng::new(seed);
            (0..n)
                .map(|i| {
                    let u = rng.uniform(Stream::Init, 0, i as u64);
                    sample_conditional(&centered_law(spec, graph, i), u)
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(Field(values))
}

/// Drives `sampler` for `config.iterations` sweeps starting from `state`,
/// handing every retained state to `observer`.
pub fn run_chain<S, F>(
    sampler: &mut S,
    state: &mut [f64],
    config: &ChainConfig,
    mut observer: F,
) -> Result<RunSummary>
where
    S: GibbsSweep,
    F: FnMut(u64, &[f64]),
{
    config.validate()?;
    if state.len() != sampler.n() {
        return Err(Error::LengthMismatch {
            expected: sampler.n(),
            actual: state.len(),
        });
    }
    let before = sampler.stats();
    let mut sampling = 0.0;
    let mut retained = 0;
    for m in 1..=config.iterations {
        let t0 = Instant::now();
        sampler.sweep(state, m);
        sampling += t0.elapsed().as_secs_f64();
        if config.keeps(m) {
            observer(m, state);
            retained += 1;
        }
    }
    let after = sampler.stats();
    Ok(RunSummary {
        iterations_run: config.iterations,
        retained,
        seconds_total: sampling,
        seconds_per_iteration: sampling / config.iterations as f64,
        stats: SamplerStats {
            conditional_draws: after.conditional_draws - before.conditional_draws,
            precompute_passes: after.precompute_passes - before.precompute_passes,
            iterations: after.iterations - before.iterations,
        },
    })
}

fn collect<S: GibbsSweep>(
    sampler: &mut S,
    graph: &NeighborhoodGraph,
    spec: &ModelSpec,
    config: &ChainConfig,
) -> Result<ChainResult> {
    config.validate()?;
    let mut state = init_field(graph, spec, &config.init, config.seed)?.into_inner();
    let mut samples = Vec::with_capacity(config.retained() as usize);
    let summary = run_chain(sampler, &mut state, config, |_, s| {
        samples.push(Field(s.to_vec()))
    })?;
    Ok(ChainResult {
        samples,
        iterations_run: summary.iterations_run,
        seconds_total: summary.seconds_total,
        seconds_per_iteration: summary.seconds_per_iteration,
        stats: summary.stats,
    })
}

/// Runs the conclique-based Gibbs sampler and keeps every retained field.
pub fn run_cgs(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    cover: &ConcliqueCover,
    config: &ChainConfig,
) -> Result<ChainResult> {
    let mut sampler = ConcliqueSampler::new(spec, graph, cover, config.seed)?
        .with_order(config.order)
        .with_threads(config.threads)?;
    collect(&mut sampler, graph, spec, config)
}

/// Runs the single-site Gibbs sampler and keeps every retained field.
pub fn run_single_site(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    config: &ChainConfig,
) -> Result<ChainResult> {
    let mut sampler = SingleSiteSampler::new(spec, graph, config.seed)?;
    collect(&mut sampler, graph, spec, config)
}

/// A single CGS iteration `iteration` from `field`.
pub fn cgs_iteration(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    cover: &ConcliqueCover,
    field: &Field,
    iteration: u64,
    seed: u64,
) -> Result<Field> {
    if field.len() != graph.n() {
        return Err(Error::LengthMismatch {
            expected: graph.n(),
            actual: field.len(),
        });
    }
    if let Some(i) = field.values().iter().position(|x| !x.is_finite()) {
        return Err(Error::MissingValue(i));
    }
    let mut sampler = ConcliqueSampler::new(spec, graph, cover, seed)?;
    let mut state = field.values().to_vec();
    sampler.sweep(&mut state, iteration);
    Ok(Field(state))
}
