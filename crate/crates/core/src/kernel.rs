//! Precompiled conditional evaluator.
//!
//! Every supported family has a linear predictor of the form
//!
//! ```text
//! η_i(y) = offset_i + Σ_{j ∈ N_i} w_ij y_j + c_i Σ_{(j,k) ∈ T_i} y_j y_k
//! ```
//!
//! with the centering constants folded into `offset_i`. For Gaussian models
//! the predictor is the conditional mean, for binary ones the natural
//! parameter.

use crate::error::{Error, Result};
use crate::models::{direction, Direction, ModelSpec};
use crate::special::{logistic, logit, normal_quantile};
use crate::topology::{triangle_pairs, NeighborhoodGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawKind {
    Gaussian { sd: f64 },
    Bernoulli,
}

#[derive(Debug, Clone)]
struct TriangleTerms {
    starts: Vec<usize>,
    pairs: Vec<(u32, u32)>,
    coef: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CompiledModel {
    law: LawKind,
    offset: Vec<f64>,
    starts: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<f64>,
    triangles: Option<TriangleTerms>,
}

impl CompiledModel {
    /// Validates `spec` against `graph` and lays out per-site coefficients.
    pub fn compile(spec: &ModelSpec, graph: &NeighborhoodGraph) -> Result<Self> {
        spec.validate(graph)?;
        let n = graph.n();
        if n > u32::MAX as usize {
            return Err(Error::InvalidGraph("more than 2^32 sites".into()));
        }
        let mut offset = Vec::with_capacity(n);
        let mut starts = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * graph.edge_count());
        let mut weights = Vec::with_capacity(2 * graph.edge_count());
        starts.push(0);
        for i in 0..n {
            let nbrs = graph.neighbors(i);
            // Per-neighbor weight and centering constant.
            let mut centered = 0.0;
            for &j in nbrs {
                let (w, c) = match spec {
                    ModelSpec::Gaussian { alpha, eta, .. } => (*eta, *alpha),
                    ModelSpec::AutologisticIso { kappa, eta } => (*eta, *kappa),
                    ModelSpec::AutologisticAniso {
                        kappa,
                        eta_u,
                        eta_v,
                    } => match direction(graph, i, j)? {
                        Direction::Horizontal => (*eta_u, *kappa),
                        Direction::Vertical => (*eta_v, *kappa),
                    },
                    ModelSpec::AutologisticRegress { eta_u, eta_v, .. } => {
                        let kappa_i = logistic(spec.logit_kappa(graph, i).unwrap_or(0.0));
                        match direction(graph, i, j)? {
                            Direction::Horizontal => (*eta_u, kappa_i),
                            Direction::Vertical => (*eta_v, kappa_i),
                        }
                    }
                    ModelSpec::AutologisticUncentered { eta } => (*eta, 0.0),
                    ModelSpec::Triad { kappa, eta1, .. } => (eta1 / nbrs.len() as f64, *kappa),
                    ModelSpec::Lsgm(lsgm) => {
                        let d = lsgm.weights.get(i, j).unwrap_or(0.0);
                        (lsgm.eta * d, logistic(lsgm.logit_kappa(j)))
                    }
                };
                neighbors.push(j as u32);
                weights.push(w);
                centered += w * c;
            }
            let base = match spec {
                ModelSpec::Gaussian { alpha, .. } => *alpha,
                ModelSpec::AutologisticUncentered { .. } => 0.0,
                ModelSpec::AutologisticIso { kappa, .. }
                | ModelSpec::AutologisticAniso { kappa, .. }
                | ModelSpec::Triad { kappa, .. } => logit(*kappa),
                _ => spec.logit_kappa(graph, i).unwrap_or(0.0),
            };
            offset.push(base - centered);
            starts.push(neighbors.len());
        }

        let triangles = match spec {
            ModelSpec::Triad { kappa, eta2, .. } => {
                let mut t = TriangleTerms {
                    starts: Vec::with_capacity(n + 1),
                    pairs: Vec::new(),
                    coef: Vec::with_capacity(n),
                };
                t.starts.push(0);
                for (i, off) in offset.iter_mut().enumerate() {
                    let pairs = triangle_pairs(graph, i)?;
                    if pairs.is_empty() {
                        t.coef.push(0.0);
                    } else {
                        // Mean of (y_j y_k − κ²) over the triangle pairs.
                        let c = eta2 / pairs.len() as f64;
                        t.coef.push(c);
                        *off -= eta2 * kappa * kappa;
                    }
                    t.pairs
                        .extend(pairs.iter().map(|&(j, k)| (j as u32, k as u32)));
                    t.starts.push(t.pairs.len());
                }
                Some(t)
            }
            _ => None,
        };

        let law = match spec {
            ModelSpec::Gaussian { tau2, .. } => LawKind::Gaussian { sd: tau2.sqrt() },
            _ => LawKind::Bernoulli,
        };
        Ok(Self {
            law,
            offset,
            starts,
            neighbors,
            weights,
            triangles,
        })
    }

    pub fn n(&self) -> usize {
        self.offset.len()
    }

    pub fn law(&self) -> LawKind {
        self.law
    }

    /// Conditional mean (Gaussian) or natural parameter (binary) at `i`.
    #[inline]
    pub fn predictor(&self, i: usize, state: &[f64]) -> f64 {
        let lo = self.starts[i];
        let hi = self.starts[i + 1];
        let mut acc = self.offset[i];
        for (&j, &w) in self.neighbors[lo..hi].iter().zip(&self.weights[lo..hi]) {
            acc += w * state[j as usize];
        }
        if let Some(t) = &self.triangles {
            let mut s = 0.0;
            for &(j, k) in &t.pairs[t.starts[i]..t.starts[i + 1]] {
                s += state[j as usize] * state[k as usize];
            }
            acc += t.coef[i] * s;
        }
        acc
    }

    /// Inverse-CDF draw given the predictor and a uniform in (0, 1).
    #[inline]
    pub fn draw(&self, predictor: f64, u: f64) -> f64 {
        match self.law {
            LawKind::Gaussian { sd } => predictor + sd * normal_quantile(u),
            LawKind::Bernoulli => {
                if u > 1.0 - logistic(predictor) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}
