use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concliques::ConcliqueCover;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::sampler::{
    init_field, ConcliqueSampler, Field, GibbsSweep, InitPolicy, SingleSiteSampler,
};
use crate::topology::NeighborhoodGraph;

/// Fewest retained iterations accepted by [`alg_metric`].
pub const MIN_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Cgs,
    SingleSite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    /// Minimum over sites of the inverse integrated autocorrelation time,
    /// clamped to at most 1.
    pub alg: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comp_seconds_per_iteration: Option<f64>,
    /// Integrated autocorrelation time per site; `null` in JSON (infinite)
    /// for constant site chains.
    pub per_site_iact: Vec<f64>,
    pub zero_variance_sites: Vec<usize>,
}

/// Integrated autocorrelation time `1 + 2 Σ_k ρ(k)` of one chain, with the
/// sum truncated by Geyer's initial positive sequence rule. `None` for a
/// constant chain.
pub fn iact(chain: &[f64]) -> Option<f64> {
    let n = chain.len();
    if n < 2 {
        return None;
    }
    let mean = chain.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = chain.iter().map(|x| x - mean).collect();
    let autocov = |k: usize| -> f64 {
        centered[..n - k]
            .iter()
            .zip(&centered[k..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let gamma0 = autocov(0);
    if gamma0 <= 0.0 {
        return None;
    }
    let mut sum = 0.0;
    let mut k = 0;
    while k + 1 < n {
        let pair = if k == 0 { gamma0 } else { autocov(k) } + autocov(k + 1);
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        k += 2;
    }
    Some((2.0 * sum - gamma0) / gamma0)
}

/// Mixing efficiency of one chain given its retained fields in iteration
/// order.
pub fn alg_metric(chain: &[Field]) -> Result<EfficiencyReport> {
    if chain.len() < MIN_ITERATIONS {
        return Err(Error::InvalidArgument(format!(
            "alg needs at least {MIN_ITERATIONS} iterations, got {}",
            chain.len()
        )));
    }
    let n = chain[0].len();
    if let Some(f) = chain.iter().find(|f| f.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: f.len(),
        });
    }
    let per_site: Vec<Option<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let series: Vec<f64> = chain.iter().map(|f| f.values()[i]).collect();
            iact(&series)
        })
        .collect();
    let zero_variance_sites: Vec<usize> = per_site
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.is_none().then_some(i))
        .collect();
    let per_site_iact: Vec<f64> = per_site
        .iter()
        .map(|t| t.unwrap_or(f64::INFINITY))
        .collect();
    let alg = if zero_variance_sites.is_empty() {
        let worst = per_site_iact.iter().cloned().fold(0.0, f64::max);
        (1.0 / worst).min(1.0)
    } else {
        log::warn!(
            "{} site chain(s) never changed value; alg reported as 0",
            zero_variance_sites.len()
        );
        0.0
    };
    Ok(EfficiencyReport {
        alg,
        comp_seconds_per_iteration: None,
        per_site_iact,
        zero_variance_sites,
    })
}

/// Mean `alg` over independently seeded chains.
pub fn mean_alg(reports: &[EfficiencyReport]) -> Result<f64> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("no chains".into()));
    }
    Ok(reports.iter().map(|r| r.alg).sum::<f64>() / reports.len() as f64)
}

/// Mean wall-clock seconds of one full sampler iteration over `trials`
/// iterations. Model compilation, cover checks and initialization are
/// excluded.
pub fn comp_metric(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    cover: Option<&ConcliqueCover>,
    kind: SamplerKind,
    trials: usize,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let seed = 0x5eed;
    let mut state = init_field(graph, spec, &InitPolicy::RandomFromMarginal, seed)?.into_inner();
    let mut sampler: Box<dyn GibbsSweep> = match (kind, cover) {
        (SamplerKind::Cgs, Some(c)) => Box::new(ConcliqueSampler::new(spec, graph, c, seed)?),
        (SamplerKind::Cgs, None) => {
            return Err(Error::InvalidArgument("CGS timing needs a cover".into()))
        }
        (SamplerKind::SingleSite, _) => Box::new(SingleSiteSampler::new(spec, graph, seed)?),
    };
    let t0 = Instant::now();
    for m in 1..=trials as u64 {
        sampler.sweep(&mut state, m);
    }
    let secs = t0.elapsed().as_secs_f64() / trials as f64;
    // Guard against clocks too coarse for tiny graphs.
    Ok(secs.max(f64::MIN_POSITIVE))
}
