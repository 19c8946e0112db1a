//! Conditional-distribution families.
//!
//! Each [`ModelSpec`] describes, for every site, the law of the site value
//! given its neighbors. Binary families are Bernoulli with success
//! probability `logistic(A_i)`, where `A_i` is the natural parameter. The
//! mass function is the standard `exp(y A) / (1 + exp(A))`; the
//! `exp(y A) / (1 + exp(y A))` form sometimes printed for centered
//! autologistic models does not normalize at `y = 0` and is not used.
//!
//! The functions here evaluate the defining formulas literally, site by site.
//! Samplers use the precompiled [`crate::kernel::CompiledModel`] instead,
//! which is checked against these.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{logistic, logit, normal_cdf, normal_quantile};
use crate::topology::{triangle_pairs, LatticeKind, NeighborhoodGraph, SiteLabels};

/// Per-pair weights `d_ij` of the local structure graph model.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(
    from = "Option<Vec<(usize, usize, f64)>>",
    into = "Option<Vec<(usize, usize, f64)>>"
)]
pub enum EdgeWeights {
    /// `d_ij = 1` for every adjacent pair (threshold-indicator weights).
    #[default]
    Indicator,
    /// Explicit weight for each unordered adjacent pair, keyed `(min, max)`.
    Explicit(BTreeMap<(usize, usize), f64>),
}

impl EdgeWeights {
    pub fn explicit(triples: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        EdgeWeights::Explicit(
            triples
                .into_iter()
                .map(|(i, j, d)| ((i.min(j), i.max(j)), d))
                .collect(),
        )
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        match self {
            EdgeWeights::Indicator => Some(1.0),
            EdgeWeights::Explicit(map) => map.get(&(i.min(j), i.max(j))).copied(),
        }
    }
}

impl From<Option<Vec<(usize, usize, f64)>>> for EdgeWeights {
    fn from(v: Option<Vec<(usize, usize, f64)>>) -> Self {
        match v {
            None => EdgeWeights::Indicator,
            Some(triples) => EdgeWeights::explicit(triples),
        }
    }
}

impl From<EdgeWeights> for Option<Vec<(usize, usize, f64)>> {
    fn from(w: EdgeWeights) -> Self {
        match w {
            EdgeWeights::Indicator => None,
            EdgeWeights::Explicit(map) => {
                Some(map.into_iter().map(|((i, j), d)| (i, j, d)).collect())
            }
        }
    }
}

/// Local structure graph model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsgmSpec {
    /// `(β0, β1, β2, β3)` of `logit(κ_i) = β0 + β1 x1 + β2 x2 + β3 x3`.
    pub beta: [f64; 4],
    pub eta: f64,
    /// Per-site covariates `(x1, x2, x3)`.
    pub covariates: Vec<[f64; 3]>,
    #[serde(default)]
    pub weights: EdgeWeights,
}

impl LsgmSpec {
    pub fn logit_kappa(&self, i: usize) -> f64 {
        let x = self.covariates[i];
        self.beta[0] + self.beta[1] * x[0] + self.beta[2] * x[1] + self.beta[3] * x[2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Conditional Gaussian: mean `α + η Σ (y_j − α)`, variance `τ²`.
    Gaussian { alpha: f64, eta: f64, tau2: f64 },
    /// Centered isotropic autologistic.
    AutologisticIso { kappa: f64, eta: f64 },
    /// Centered anisotropic autologistic with separate horizontal and
    /// vertical dependence.
    AutologisticAniso { kappa: f64, eta_u: f64, eta_v: f64 },
    /// Anisotropic autologistic with `logit(κ_i) = β0 + β1 u_i`, `u_i` the
    /// 1-based column index.
    AutologisticRegress {
        beta0: f64,
        beta1: f64,
        eta_u: f64,
        eta_v: f64,
    },
    /// Uncentered autologistic `A_i = η Σ y_j`.
    AutologisticUncentered { eta: f64 },
    /// Centered triad model on an incidence graph.
    Triad { kappa: f64, eta1: f64, eta2: f64 },
    /// Local structure graph model.
    Lsgm(LsgmSpec),
}

/// Law of one site value given its neighbors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionalLaw {
    Gaussian { mean: f64, var: f64 },
    Bernoulli { p: f64 },
}

impl ConditionalLaw {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ConditionalLaw::Gaussian { mean, var } => normal_cdf((x - mean) / var.sqrt()),
            ConditionalLaw::Bernoulli { p } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
        }
    }

    /// Left limit `F(x⁻)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match *self {
            ConditionalLaw::Gaussian { .. } => self.cdf(x),
            ConditionalLaw::Bernoulli { p } => {
                if x <= 0.0 {
                    0.0
                } else if x <= 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, ConditionalLaw::Bernoulli { .. })
    }
}

/// Horizontal (`u`) or vertical (`v`) lattice direction of a neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Horizontal,
    Vertical,
}

pub(crate) fn direction(graph: &NeighborhoodGraph, i: usize, j: usize) -> Result<Direction> {
    let (Some((ui, vi)), Some((uj, vj))) = (graph.coords(i), graph.coords(j)) else {
        return Err(Error::Incompatible(
            "anisotropic models need lattice coordinates".into(),
        ));
    };
    if vi == vj && ui != uj {
        Ok(Direction::Horizontal)
    } else if ui == uj && vi != vj {
        Ok(Direction::Vertical)
    } else {
        Err(Error::Incompatible(format!(
            "neighbors {i} and {j} are neither horizontal nor vertical"
        )))
    }
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "{name} must lie in (0, 1), got {x}"
        )))
    }
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "{name} must be finite, got {x}"
        )))
    }
}

impl ModelSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            ModelSpec::Gaussian { .. } => "gaussian",
            ModelSpec::AutologisticIso { .. } => "autologistic_iso",
            ModelSpec::AutologisticAniso { .. } => "autologistic_aniso",
            ModelSpec::AutologisticRegress { .. } => "autologistic_regress",
            ModelSpec::AutologisticUncentered { .. } => "autologistic_uncentered",
            ModelSpec::Triad { .. } => "triad",
            ModelSpec::Lsgm(_) => "lsgm",
        }
    }

    pub fn is_binary(&self) -> bool {
        !matches!(self, ModelSpec::Gaussian { .. })
    }

    /// Checks parameter ranges and that the graph carries whatever the
    /// family needs (coordinates, vertex pairs, covariates, weights).
    pub fn validate(&self, graph: &NeighborhoodGraph) -> Result<()> {
        match self {
            ModelSpec::Gaussian { alpha, eta, tau2 } => {
                check_finite("alpha", *alpha)?;
                check_finite("eta", *eta)?;
                if !(tau2.is_finite() && *tau2 > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "tau2 must be positive, got {tau2}"
                    )));
                }
                if let Some(shape) = graph.lattice() {
                    if shape.kind == LatticeKind::Four && eta.abs() >= 0.25 {
                        log::warn!(
                            "|eta| = {} >= 0.25: Gaussian conditionals on a four-nearest \
                             lattice may not define a valid joint",
                            eta.abs()
                        );
                    }
                }
            }
            ModelSpec::AutologisticIso { kappa, eta } => {
                check_unit_interval("kappa", *kappa)?;
                check_finite("eta", *eta)?;
            }
            ModelSpec::AutologisticAniso {
                kappa,
                eta_u,
                eta_v,
            } => {
                check_unit_interval("kappa", *kappa)?;
                check_finite("eta_u", *eta_u)?;
                check_finite("eta_v", *eta_v)?;
                check_directions(graph)?;
            }
            ModelSpec::AutologisticRegress {
                beta0,
                beta1,
                eta_u,
                eta_v,
            } => {
                for (name, x) in [
                    ("beta0", beta0),
                    ("beta1", beta1),
                    ("eta_u", eta_u),
                    ("eta_v", eta_v),
                ] {
                    check_finite(name, *x)?;
                }
                check_directions(graph)?;
            }
            ModelSpec::AutologisticUncentered { eta } => check_finite("eta", *eta)?,
            ModelSpec::Triad { kappa, eta1, eta2 } => {
                check_unit_interval("kappa", *kappa)?;
                check_finite("eta1", *eta1)?;
                check_finite("eta2", *eta2)?;
                if !matches!(graph.labels(), SiteLabels::VertexPairs(_)) {
                    return Err(Error::Incompatible(
                        "the triad model needs an incidence (edge-marker) graph".into(),
                    ));
                }
            }
            ModelSpec::Lsgm(lsgm) => {
                for (k, b) in lsgm.beta.iter().enumerate() {
                    check_finite(&format!("beta{k}"), *b)?;
                }
                check_finite("eta", lsgm.eta)?;
                if lsgm.covariates.len() != graph.n() {
                    return Err(Error::LengthMismatch {
                        expected: graph.n(),
                        actual: lsgm.covariates.len(),
                    });
                }
                if lsgm.covariates.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidModel("non-finite covariate".into()));
                }
                if let EdgeWeights::Explicit(map) = &lsgm.weights {
                    for (&(i, j), d) in map {
                        if i >= graph.n() || j >= graph.n() || !graph.is_adjacent(i, j) {
                            return Err(Error::InvalidModel(format!(
                                "weight given for non-adjacent pair ({i}, {j})"
                            )));
                        }
                        check_finite("d", *d)?;
                    }
                    if let Some((i, j)) = graph.edges().find(|&(i, j)| !map.contains_key(&(i, j))) {
                        return Err(Error::InvalidModel(format!(
                            "no weight for adjacent pair ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `logit(κ_i)` for centered binary families.
    pub(crate) fn logit_kappa(&self, graph: &NeighborhoodGraph, i: usize) -> Option<f64> {
        match self {
            ModelSpec::AutologisticIso { kappa, .. }
            | ModelSpec::AutologisticAniso { kappa, .. }
            | ModelSpec::Triad { kappa, .. } => Some(logit(*kappa)),
            ModelSpec::AutologisticRegress { beta0, beta1, .. } => {
                let u = graph.coords(i).map(|(u, _)| u + 1.0)?;
                Some(beta0 + beta1 * u)
            }
            ModelSpec::Lsgm(lsgm) => Some(lsgm.logit_kappa(i)),
            ModelSpec::AutologisticUncentered { .. } | ModelSpec::Gaussian { .. } => None,
        }
    }
}

fn check_directions(graph: &NeighborhoodGraph) -> Result<()> {
    for (i, j) in graph.edges() {
        direction(graph, i, j)?;
    }
    if graph.n() > 0 && graph.coords(0).is_none() {
        return Err(Error::Incompatible(
            "anisotropic models need lattice coordinates".into(),
        ));
    }
    Ok(())
}

fn neighbor_value(field: &[f64], j: usize) -> Result<f64> {
    let y = field[j];
    if y.is_nan() {
        Err(Error::MissingValue(j))
    } else {
        Ok(y)
    }
}

fn check_field(graph: &NeighborhoodGraph, site: usize, field: &[f64]) -> Result<()> {
    if field.len() != graph.n() {
        return Err(Error::LengthMismatch {
            expected: graph.n(),
            actual: field.len(),
        });
    }
    if site >= graph.n() {
        return Err(Error::InvalidArgument(format!(
            "site {site} outside 0..{}",
            graph.n()
        )));
    }
    Ok(())
}

/// Natural parameter `A_i` of a binary family at `site`, given the field
/// values at its neighbors. Values at non-neighbors are ignored; `NaN`
/// marks a missing value.
pub fn natural_parameter(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    site: usize,
    field: &[f64],
) -> Result<f64> {
    check_field(graph, site, field)?;
    let nbrs = graph.neighbors(site);
    match spec {
        ModelSpec::Gaussian { .. } => Err(Error::InvalidArgument(
            "the Gaussian family has no scalar natural parameter".into(),
        )),
        ModelSpec::AutologisticIso { kappa, eta } => {
            let mut s = 0.0;
            for &j in nbrs {
                s += neighbor_value(field, j)? - kappa;
            }
            Ok(logit(*kappa) + eta * s)
        }
        ModelSpec::AutologisticAniso {
            kappa,
            eta_u,
            eta_v,
        } => {
            let (su, sv) = directional_sums(graph, site, field, *kappa)?;
            Ok(logit(*kappa) + eta_u * su + eta_v * sv)
        }
        ModelSpec::AutologisticRegress { eta_u, eta_v, .. } => {
            let lk = spec
                .logit_kappa(graph, site)
                .ok_or_else(|| Error::Incompatible("model (c) needs lattice coordinates".into()))?;
            let kappa_i = logistic(lk);
            let (su, sv) = directional_sums(graph, site, field, kappa_i)?;
            Ok(lk + eta_u * su + eta_v * sv)
        }
        ModelSpec::AutologisticUncentered { eta } => {
            let mut s = 0.0;
            for &j in nbrs {
                s += neighbor_value(field, j)?;
            }
            Ok(eta * s)
        }
        ModelSpec::Triad { kappa, eta1, eta2 } => {
            let mut a = logit(*kappa);
            if !nbrs.is_empty() {
                let mut s = 0.0;
                for &j in nbrs {
                    s += neighbor_value(field, j)? - kappa;
                }
                a += eta1 / nbrs.len() as f64 * s;
            }
            let triangles = triangle_pairs(graph, site)?;
            if !triangles.is_empty() {
                // Every unordered pair appears twice among the 2(V − 2)
                // ordered pairs, so the normalized sum is the mean over
                // unordered pairs.
                let mut t = 0.0;
                for &(j, k) in &triangles {
                    t += 2.0
                        * (neighbor_value(field, j)? * neighbor_value(field, k)? - kappa * kappa);
                }
                a += eta2 / (2 * triangles.len()) as f64 * t;
            }
            Ok(a)
        }
        ModelSpec::Lsgm(lsgm) => {
            let mut s = 0.0;
            for &j in nbrs {
                let d = lsgm.weights.get(site, j).ok_or_else(|| {
                    Error::InvalidModel(format!("no weight for pair ({site}, {j})"))
                })?;
                let kappa_j = logistic(lsgm.logit_kappa(j));
                s += d * (neighbor_value(field, j)? - kappa_j);
            }
            Ok(lsgm.logit_kappa(site) + lsgm.eta * s)
        }
    }
}

fn directional_sums(
    graph: &NeighborhoodGraph,
    site: usize,
    field: &[f64],
    center: f64,
) -> Result<(f64, f64)> {
    let (mut su, mut sv) = (0.0, 0.0);
    for &j in graph.neighbors(site) {
        let d = neighbor_value(field, j)? - center;
        match direction(graph, site, j)? {
            Direction::Horizontal => su += d,
            Direction::Vertical => sv += d,
        }
    }
    Ok((su, sv))
}

/// Conditional law of the value at `site` given its neighbors.
pub fn conditional_law(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    site: usize,
    field: &[f64],
) -> Result<ConditionalLaw> {
    match spec {
        ModelSpec::Gaussian { alpha, eta, tau2 } => {
            check_field(graph, site, field)?;
            let mut s = 0.0;
            for &j in graph.neighbors(site) {
                s += neighbor_value(field, j)? - alpha;
            }
            Ok(ConditionalLaw::Gaussian {
                mean: alpha + eta * s,
                var: *tau2,
            })
        }
        _ => Ok(ConditionalLaw::Bernoulli {
            p: logistic(natural_parameter(spec, graph, site, field)?),
        }),
    }
}

/// Law at `site` with every neighbor term at its centering constant.
/// Used for random initialization.
pub fn centered_law(spec: &ModelSpec, graph: &NeighborhoodGraph, site: usize) -> ConditionalLaw {
    match spec {
        ModelSpec::Gaussian { alpha, tau2, .. } => ConditionalLaw::Gaussian {
            mean: *alpha,
            var: *tau2,
        },
        ModelSpec::AutologisticUncentered { .. } => ConditionalLaw::Bernoulli { p: 0.5 },
        _ => ConditionalLaw::Bernoulli {
            p: logistic(spec.logit_kappa(graph, site).unwrap_or(0.0)),
        },
    }
}

/// Inverse-CDF draw `F⁻¹(u)`. The Bernoulli generalized inverse returns 1
/// exactly when `u > 1 − p`.
#[inline]
pub fn sample_conditional(law: &ConditionalLaw, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidArgument(format!("u = {u} outside (0, 1)")));
    }
    Ok(match *law {
        ConditionalLaw::Gaussian { mean, var } => mean + var.sqrt() * normal_quantile(u),
        ConditionalLaw::Bernoulli { p } => {
            if u > 1.0 - p {
                1.0
            } else {
                0.0
            }
        }
    })
}

/// Conditional CDF of `value` at `site`. For discrete families the
/// randomized transform `F(v⁻) + r (F(v) − F(v⁻))` is returned, which is
/// Uniform(0, 1) under the model; `u_rand = r` is then required.
pub fn conditional_cdf(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    site: usize,
    value: f64,
    field: &[f64],
    u_rand: Option<f64>,
) -> Result<f64> {
    let law = conditional_law(spec, graph, site, field)?;
    pit(&law, value, u_rand)
}

/// Randomized probability integral transform of `value` under `law`.
pub fn pit(law: &ConditionalLaw, value: f64, u_rand: Option<f64>) -> Result<f64> {
    if !law.is_discrete() {
        return Ok(law.cdf(value));
    }
    if value != 0.0 && value != 1.0 {
        return Err(Error::InvalidArgument(format!(
            "binary family observed value {value}"
        )));
    }
    let r = u_rand.ok_or_else(|| {
        Error::InvalidArgument("discrete residuals need a randomization uniform".into())
    })?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "u_rand = {r} outside [0, 1]"
        )));
    }
    let lo = law.cdf_left(value);
    let hi = law.cdf(value);
    Ok(lo + r * (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_incidence, build_lattice};

    fn lattice4(m: usize) -> NeighborhoodGraph {
        build_lattice(m, m, LatticeKind::Four).unwrap()
    }

    #[test]
    fn iso_centered_sum_cancels() {
        let g = lattice4(3);
        let spec = ModelSpec::AutologisticIso {
            kappa: 0.5,
            eta: 1.7,
        };
        let mut field = vec![0.0; 9];
        // Site 4's neighbors are 1, 3, 5, 7.
        field[1] = 1.0;
        field[5] = 1.0;
        assert_eq!(natural_parameter(&spec, &g, 4, &field).unwrap(), 0.0);
    }

    #[test]
    fn iso_fitted_values() {
        let g = lattice4(3);
        let spec = ModelSpec::AutologisticIso {
            kappa: 0.123,
            eta: 0.816,
        };
        let a = natural_parameter(&spec, &g, 4, &[0.0; 9]).unwrap();
        // ln(0.123/0.877) − 4·0.816·0.123, evaluated at 30 digits.
        assert!((a - (-2.365_794_636_999_765_5)).abs() < 1e-12, "{a}");
    }

    #[test]
    fn triad_zero_dependence() {
        let g = build_incidence(5).unwrap();
        let spec = ModelSpec::Triad {
            kappa: 0.3,
            eta1: 0.0,
            eta2: 0.0,
        };
        let field: Vec<f64> = (0..g.n()).map(|i| (i % 2) as f64).collect();
        for i in 0..g.n() {
            let a = natural_parameter(&spec, &g, i, &field).unwrap();
            assert!((a - logit(0.3)).abs() < 1e-15);
        }
    }

    #[test]
    fn triad_law_all_zero() {
        let g = build_incidence(6).unwrap();
        let spec = ModelSpec::Triad {
            kappa: 0.2,
            eta1: 0.5,
            eta2: 0.5,
        };
        let law = conditional_law(&spec, &g, 0, &[0.0; 15]).unwrap();
        // logistic(logit(0.2) − 0.1 − 0.02) = 0.2 e^{−0.12} / (0.8 + 0.2 e^{−0.12}).
        let expected = 0.181_488_618_078_045_9;
        match law {
            ConditionalLaw::Bernoulli { p } => assert!((p - expected).abs() < 1e-12, "{p}"),
            _ => panic!(),
        }
    }

    #[test]
    fn gaussian_laws() {
        let g = lattice4(3);
        let spec = ModelSpec::Gaussian {
            alpha: 2.0,
            eta: 0.0,
            tau2: 3.0,
        };
        let field: Vec<f64> = (0..9).map(|i| i as f64).collect();
        assert_eq!(
            conditional_law(&spec, &g, 4, &field).unwrap(),
            ConditionalLaw::Gaussian {
                mean: 2.0,
                var: 3.0
            }
        );
        let spec = ModelSpec::Gaussian {
            alpha: 0.0,
            eta: 0.2,
            tau2: 1.0,
        };
        let mut field = vec![0.0; 9];
        field[1] = 1.0;
        field[3] = -1.0;
        field[5] = 2.0;
        field[7] = 0.0;
        match conditional_law(&spec, &g, 4, &field).unwrap() {
            ConditionalLaw::Gaussian { mean, var } => {
                assert!((mean - 0.4).abs() < 1e-15);
                assert_eq!(var, 1.0);
            }
            _ => panic!(),
        }
        assert!(natural_parameter(&spec, &g, 4, &field).is_err());
    }

    #[test]
    fn missing_neighbor_detected() {
        let g = lattice4(3);
        let spec = ModelSpec::AutologisticIso {
            kappa: 0.5,
            eta: 1.0,
        };
        let mut field = vec![0.0; 9];
        field[7] = f64::NAN;
        assert!(matches!(
            natural_parameter(&spec, &g, 4, &field),
            Err(Error::MissingValue(7))
        ));
        // Non-neighbors may be missing.
        assert!(natural_parameter(&spec, &g, 0, &field).is_ok());
        assert!(natural_parameter(&spec, &g, 0, &field[..3]).is_err());
    }

    #[test]
    fn inverse_cdf_draws() {
        let one = ConditionalLaw::Bernoulli { p: 1.0 };
        for u in [1e-9, 0.3, 0.999] {
            assert_eq!(sample_conditional(&one, u).unwrap(), 1.0);
        }
        let g = ConditionalLaw::Gaussian {
            mean: 1.5,
            var: 4.0,
        };
        assert_eq!(sample_conditional(&g, 0.5).unwrap(), 1.5);
        let b = ConditionalLaw::Bernoulli { p: 0.2 };
        assert_eq!(sample_conditional(&b, 0.9).unwrap(), 1.0);
        assert_eq!(sample_conditional(&b, 0.5).unwrap(), 0.0);
        assert!(sample_conditional(&b, 0.0).is_err());
        assert!(sample_conditional(&b, 1.0).is_err());
        assert!(sample_conditional(&b, f64::NAN).is_err());
    }

    #[test]
    fn cdf_examples() {
        let g = lattice4(2);
        let gauss = ModelSpec::Gaussian {
            alpha: 1.0,
            eta: 0.1,
            tau2: 2.0,
        };
        let field = [0.5, -0.3, 2.0, 1.0];
        let ConditionalLaw::Gaussian { mean, .. } = conditional_law(&gauss, &g, 0, &field).unwrap()
        else {
            panic!()
        };
        let c = conditional_cdf(&gauss, &g, 0, mean, &field, None).unwrap();
        assert!((c - 0.5).abs() < 1e-15);

        let b = ConditionalLaw::Bernoulli { p: 0.3 };
        let r = 0.37;
        assert!((pit(&b, 0.0, Some(r)).unwrap() - r * 0.7).abs() < 1e-15);
        assert!((pit(&b, 1.0, Some(r)).unwrap() - (0.7 + r * 0.3)).abs() < 1e-15);
        assert!(pit(&b, 1.0, None).is_err());
        assert!(pit(&b, 0.5, Some(r)).is_err());
    }

    #[test]
    fn aniso_requires_coordinates() {
        let g = build_incidence(4).unwrap();
        let spec = ModelSpec::AutologisticAniso {
            kappa: 0.4,
            eta_u: 0.1,
            eta_v: 0.2,
        };
        assert!(matches!(spec.validate(&g), Err(Error::Incompatible(_))));
        let regress = ModelSpec::AutologisticRegress {
            beta0: 0.0,
            beta1: 0.1,
            eta_u: 0.0,
            eta_v: 0.0,
        };
        assert!(regress.validate(&g).is_err());
        let eight = build_lattice(3, 3, LatticeKind::Eight).unwrap();
        assert!(spec.validate(&eight).is_err());
        assert!(spec.validate(&lattice4(3)).is_ok());
    }

    #[test]
    fn parameter_ranges() {
        let g = lattice4(2);
        for bad in [
            ModelSpec::Gaussian {
                alpha: 0.0,
                eta: 0.1,
                tau2: 0.0,
            },
            ModelSpec::AutologisticIso {
                kappa: 1.0,
                eta: 0.1,
            },
            ModelSpec::AutologisticIso {
                kappa: 0.5,
                eta: f64::NAN,
            },
        ] {
            assert!(bad.validate(&g).is_err(), "{bad:?}");
        }
        let triad = ModelSpec::Triad {
            kappa: 0.2,
            eta1: 0.5,
            eta2: 0.5,
        };
        assert!(triad.validate(&g).is_err());
        assert!(triad.validate(&build_incidence(4).unwrap()).is_ok());
    }

    #[test]
    fn lsgm_weights_validation() {
        let g = NeighborhoodGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut spec = LsgmSpec {
            beta: [0.1, 0.2, 0.3, 0.4],
            eta: 0.5,
            covariates: vec![[1.0, 0.0, 1.0]; 3],
            weights: EdgeWeights::explicit([(0, 1, 2.0), (2, 1, 0.5)]),
        };
        assert!(ModelSpec::Lsgm(spec.clone()).validate(&g).is_ok());
        spec.weights = EdgeWeights::explicit([(0, 1, 2.0)]);
        assert!(ModelSpec::Lsgm(spec.clone()).validate(&g).is_err());
        spec.weights = EdgeWeights::explicit([(0, 1, 2.0), (1, 2, 1.0), (0, 2, 1.0)]);
        assert!(ModelSpec::Lsgm(spec.clone()).validate(&g).is_err());
        spec.covariates.pop();
        spec.weights = EdgeWeights::Indicator;
        assert!(ModelSpec::Lsgm(spec).validate(&g).is_err());
    }

    #[test]
    fn lsgm_natural_parameter() {
        let g = NeighborhoodGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let spec = LsgmSpec {
            beta: [0.1, 0.2, 0.3, 0.4],
            eta: 0.5,
            covariates: vec![[1.0, 0.0, 1.0], [0.0, 2.0, 0.0], [1.0, 1.0, 1.0]],
            weights: EdgeWeights::explicit([(0, 1, 2.0), (1, 2, 0.5)]),
        };
        let field = [1.0, 0.0, 1.0];
        let a = natural_parameter(&ModelSpec::Lsgm(spec.clone()), &g, 1, &field).unwrap();
        let k0 = logistic(0.1 + 0.2 + 0.4);
        let k2 = logistic(0.1 + 0.2 + 0.3 + 0.4);
        let expected = (0.1 + 0.6) + 0.5 * (2.0 * (1.0 - k0) + 0.5 * (1.0 - k2));
        assert!((a - expected).abs() < 1e-14);
    }

    #[test]
    fn serde_family_tag() {
        let spec: ModelSpec =
            serde_json::from_str(r#"{"family": "autologistic_iso", "kappa": 0.5, "eta": 0.4}"#)
                .unwrap();
        assert_eq!(
            spec,
            ModelSpec::AutologisticIso {
                kappa: 0.5,
                eta: 0.4
            }
        );
        let lsgm = ModelSpec::Lsgm(LsgmSpec {
            beta: [0.0; 4],
            eta: 1.0,
            covariates: vec![[0.0; 3]; 2],
            weights: EdgeWeights::explicit([(0, 1, 3.5)]),
        });
        let text = serde_json::to_string(&lsgm).unwrap();
        assert!(text.contains(r#""family":"lsgm""#));
        assert_eq!(serde_json::from_str::<ModelSpec>(&text).unwrap(), lsgm);
        let indicator: ModelSpec = serde_json::from_str(
            r#"{"family":"lsgm","beta":[0,0,0,0],"eta":1,"covariates":[[0,0,0]]}"#,
        )
        .unwrap();
        let ModelSpec::Lsgm(l) = indicator else {
            panic!()
        };
        assert_eq!(l.weights, EdgeWeights::Indicator);
    }
}
