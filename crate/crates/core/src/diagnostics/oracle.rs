use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{natural_parameter, ModelSpec};
use crate::sampler::Field;
use crate::topology::NeighborhoodGraph;

/// Largest field enumerated by [`exact_binary_joint`].
pub const MAX_EXACT_SITES: usize = 20;

/// Exact joint of a binary model over all `2^n` states. State `s` has
/// `y_i = (s >> i) & 1`.
pub fn exact_binary_joint(spec: &ModelSpec, graph: &NeighborhoodGraph) -> Result<Vec<f64>> {
    let order: Vec<usize> = (0..graph.n()).collect();
    exact_binary_joint_with_order(spec, graph, &order)
}

/// As [`exact_binary_joint`], telescoping sites in `order`.
///
/// With the all-zeros state as reference,
/// `log P(y)/P(0) = Σ_k y_{σ_k} A_{σ_k}(y_{σ_1..σ_{k−1}}, 0, …, 0)`.
pub fn exact_binary_joint_with_order(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    order: &[usize],
) -> Result<Vec<f64>> {
    if !spec.is_binary() {
        return Err(Error::InvalidArgument(format!(
            "exact joint enumeration needs a binary family, got {}",
            spec.family_name()
        )));
    }
    let n = graph.n();
    if n > MAX_EXACT_SITES {
        return Err(Error::InvalidArgument(format!(
            "exact joint limited to {MAX_EXACT_SITES} sites, graph has {n}"
        )));
    }
    let mut seen = vec![false; n];
    if order.len() != n
        || order
            .iter()
            .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
    {
        return Err(Error::InvalidArgument(
            "order is not a permutation of the sites".into(),
        ));
    }
    spec.validate(graph)?;

    let log_weights: Vec<f64> = (0u32..1 << n)
        .into_par_iter()
        .map(|state| -> Result<f64> {
            let mut z = vec![0.0; n];
            let mut lw = 0.0;
            for &i in order {
                if (state >> i) & 1 == 1 {
                    lw += natural_parameter(spec, graph, i, &z)?;
                    z[i] = 1.0;
                }
            }
            Ok(lw)
        })
        .collect::<Result<_>>()?;
    let max = log_weights
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

/// Empirical distribution of binary fields over `2^n` states.
pub fn empirical_binary_joint(samples: &[Field], n: usize) -> Result<Vec<f64>> {
    if n > MAX_EXACT_SITES {
        return Err(Error::InvalidArgument(format!(
            "state enumeration limited to {MAX_EXACT_SITES} sites"
        )));
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let mut counts = vec![0u64; 1 << n];
    for f in samples {
        counts[binary_state(f.values(), n)?] += 1;
    }
    let m = samples.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / m).collect())
}

pub(crate) fn binary_state(values: &[f64], n: usize) -> Result<usize> {
    if values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: values.len(),
        });
    }
    let mut s = 0;
    for (i, &y) in values.iter().enumerate() {
        if y == 1.0 {
            s |= 1 << i;
        } else if y != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "non-binary value {y} at site {i}"
            )));
        }
    }
    Ok(s)
}

/// Total variation distance `½ Σ |p − q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Writes `state_bitmask,probability` rows.
pub fn write_joint_csv<W: Write>(writer: W, probs: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["state", "probability"])?;
    for (s, p) in probs.iter().enumerate() {
        w.write_record([s.to_string(), format!("{p:e}")])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMoments {
    pub mean: Vec<f64>,
    /// Row-major `n × n` covariance.
    pub covariance: Vec<f64>,
    n: usize,
}

impl GaussianMoments {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.covariance[i * self.n + j]
    }
}

/// Mean `α𝟙` and covariance `τ²(I − ηA)⁻¹` of the Gaussian conditional
/// model.
pub fn exact_gaussian_moments(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
) -> Result<GaussianMoments> {
    let ModelSpec::Gaussian { alpha, eta, tau2 } = *spec else {
        return Err(Error::InvalidArgument(format!(
            "Gaussian moments requested for {}",
            spec.family_name()
        )));
    };
    spec.validate(graph)?;
    let n = graph.n();
    let mut precision = DMatrix::<f64>::identity(n, n);
    for (i, j) in graph.edges() {
        precision[(i, j)] = -eta;
        precision[(j, i)] = -eta;
    }
    let chol = precision.cholesky().ok_or_else(|| {
        Error::Numerical(format!("I − ηA is not positive definite for η = {eta}"))
    })?;
    let cov = chol.inverse() * tau2;
    let mut covariance = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            covariance.push(cov[(i, j)]);
        }
    }
    Ok(GaussianMoments {
        mean: vec![alpha; n],
        covariance,
        n,
    })
}
