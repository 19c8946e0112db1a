//! Test statistics for Monte Carlo goodness of fit. Implement [`Statistic`]
//! to add one; `builtin_statistic` resolves the names accepted in configs.

use conclique::diagnostics::edge_pair_statistic;
use conclique::NeighborhoodGraph;

pub trait Statistic: Sync {
    fn name(&self) -> &str;

    fn compute(&self, graph: &NeighborhoodGraph, field: &[f64]) -> conclique::Result<f64>;

    /// Whether the statistic is only defined for 0/1 fields.
    fn requires_binary(&self) -> bool {
        false
    }
}

/// Proportion of edges whose endpoints are both 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct EdgePair;

impl Statistic for EdgePair {
    fn name(&self) -> &str {
        "edge_pair"
    }

    fn compute(&self, graph: &NeighborhoodGraph, field: &[f64]) -> conclique::Result<f64> {
        edge_pair_statistic(graph, field)
    }

    fn requires_binary(&self) -> bool {
        true
    }
}

pub fn builtin_statistic(name: &str) -> Option<Box<dyn Statistic>> {
    match name {
        "edge_pair" => Some(Box::new(EdgePair)),
        _ => None,
    }
}
