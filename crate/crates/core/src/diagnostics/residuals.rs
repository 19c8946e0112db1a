use serde::{Deserialize, Serialize};

use crate::concliques::{ensure_valid_cover, ConcliqueCover};
use crate::error::{Error, Result};
use crate::models::{conditional_cdf, ModelSpec};
use crate::rng::{CounterRng, Stream};
use crate::sampler::Field;
use crate::topology::NeighborhoodGraph;

/// PIT residuals grouped by conclique; `values[c][k]` belongs to site
/// `sites[c][k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSet {
    pub sites: Vec<Vec<usize>>,
    pub values: Vec<Vec<f64>>,
}

impl ResidualSet {
    pub fn q(&self) -> usize {
        self.values.len()
    }

    pub fn class(&self, c: usize) -> &[f64] {
        &self.values[c]
    }
}

/// Conditional CDF residual at every site, randomized for discrete
/// families with uniforms keyed by `seed`.
pub fn conclique_residuals(
    spec: &ModelSpec,
    graph: &NeighborhoodGraph,
    cover: &ConcliqueCover,
    field: &Field,
    seed: u64,
) -> Result<ResidualSet> {
    ensure_valid_cover(graph, cover)?;
    spec.validate(graph)?;
    if field.len() != graph.n() {
        return Err(Error::LengthMismatch {
            expected: graph.n(),
            actual: field.len(),
        });
    }
    let rng = CounterRng::new(seed);
    let y = field.values();
    let discrete = spec.is_binary();
    let mut values = Vec::with_capacity(cover.q());
    for class in cover.classes() {
        let mut out = Vec::with_capacity(class.len());
        for &i in class {
            let r = discrete.then(|| rng.uniform(Stream::Residual, 0, i as u64));
            out.push(conditional_cdf(spec, graph, i, y[i], y, r)?);
        }
        values.push(out);
    }
    Ok(ResidualSet {
        sites: cover.classes().to_vec(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Upper tail `P(K > λ)` of the Kolmogorov distribution.
pub fn kolmogorov_pvalue(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form converges fast for small λ.
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            s += (-j * j * c).exp();
        }
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let mut s = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            s += if k % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// One-sample Kolmogorov–Smirnov test against Uniform(0, 1) with the
/// asymptotic p-value (Stephens' finite-sample scaling).
pub fn ks_uniformity(values: &[f64]) -> Result<KsResult> {
    const MIN: usize = 5;
    if values.len() < MIN {
        return Err(Error::InvalidArgument(format!(
            "KS test needs at least {MIN} values, got {}",
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidArgument(format!("value {v} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        d = d.max((i + 1) as f64 / n - x).max(x - i as f64 / n);
    }
    let sn = n.sqrt();
    let p = kolmogorov_pvalue((sn + 0.12 + 0.11 / sn) * d);
    Ok(KsResult {
        statistic: d,
        p_value: p,
        n: sorted.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_lattice, LatticeKind};

    #[test]
    fn ks_examples() {
        let even: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let r = ks_uniformity(&even).unwrap();
        assert!((r.statistic - 0.1).abs() < 1e-12);
        assert!(r.p_value > 0.5);

        let r = ks_uniformity(&[0.5; 100]).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-12);
        assert!(r.p_value < 1e-10);

        assert!(ks_uniformity(&[]).is_err());
        assert!(ks_uniformity(&[0.1, 0.2, 0.3, 0.4]).is_err());
        assert!(ks_uniformity(&[0.1, 0.2, 0.3, 0.4, 1.5]).is_err());
    }

    #[test]
    fn kolmogorov_tail_reference_points() {
        // Classical critical values of the limiting distribution.
        assert!((kolmogorov_pvalue(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_pvalue(1.6276) - 0.01).abs() < 1e-4);
        assert!((kolmogorov_pvalue(1.2238) - 0.10).abs() < 1e-4);
        // The two series agree where they switch.
        let a = kolmogorov_pvalue(1.18 - 1e-12);
        let b = kolmogorov_pvalue(1.18);
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn certain_bernoulli_residuals_are_the_randomizer() {
        // κ → 1 numerically: p = 1 at every site.
        let g = build_lattice(4, 4, LatticeKind::Four).unwrap();
        let cover = crate::concliques::analytic_lattice_cover(4, 4, LatticeKind::Four).unwrap();
        let spec = ModelSpec::AutologisticUncentered { eta: 1e6 };
        let field = Field::new(vec![1.0; 16]);
        let res = conclique_residuals(&spec, &g, &cover, &field, 11).unwrap();
        let rng = CounterRng::new(11);
        for (sites, vals) in res.sites.iter().zip(&res.values) {
            for (&i, &v) in sites.iter().zip(vals) {
                assert_eq!(v, rng.uniform(Stream::Residual, 0, i as u64));
            }
        }
    }

    #[test]
    fn invalid_cover_rejected() {
        let g = build_lattice(2, 2, LatticeKind::Four).unwrap();
        let cover = ConcliqueCover::from_assignment(&[0; 4]);
        let spec = ModelSpec::Gaussian {
            alpha: 0.0,
            eta: 0.1,
            tau2: 1.0,
        };
        assert!(conclique_residuals(&spec, &g, &cover, &Field::new(vec![0.0; 4]), 0).is_err());
    }
}
