use crate::error::{Error, Result};
use crate::topology::NeighborhoodGraph;

/// Monte Carlo p-value: the fraction of simulated statistics at least as
/// large as the observed one.
pub fn gof_pvalue(t_observed: f64, t_simulated: &[f64]) -> Result<f64> {
    if t_simulated.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one simulated statistic is required".into(),
        ));
    }
    if t_observed.is_nan() || t_simulated.iter().any(|t| t.is_nan()) {
        return Err(Error::InvalidArgument("statistic is NaN".into()));
    }
    let hits = t_simulated.iter().filter(|&&t| t >= t_observed).count();
    Ok(hits as f64 / t_simulated.len() as f64)
}

/// Proportion of adjacent pairs of `graph` at which both values are 1.
pub fn edge_pair_statistic(graph: &NeighborhoodGraph, field: &[f64]) -> Result<f64> {
    if field.len() != graph.n() {
        return Err(Error::LengthMismatch {
            expected: graph.n(),
            actual: field.len(),
        });
    }
    if let Some(i) = field.iter().position(|&y| y != 0.0 && y != 1.0) {
        return Err(Error::InvalidArgument(format!(
            "edge-pair statistic needs binary data; site {i} has {}",
            field[i]
        )));
    }
    let pairs = graph.edge_count();
    if pairs == 0 {
        return Err(Error::InvalidArgument("graph has no adjacent pairs".into()));
    }
    let both = graph
        .edges()
        .filter(|&(i, j)| field[i] == 1.0 && field[j] == 1.0)
        .count();
    Ok(both as f64 / pairs as f64)
}
