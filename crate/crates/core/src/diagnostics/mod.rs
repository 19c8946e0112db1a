//! Mixing and cost metrics, residual checks, Monte Carlo goodness of fit,
//! and exact oracles for small instances.

mod efficiency;
mod gof;
mod oracle;
mod residuals;

pub use efficiency::{alg_metric, comp_metric, iact, mean_alg, EfficiencyReport, SamplerKind};
pub use gof::{edge_pair_statistic, gof_pvalue};
pub use oracle::{
    empirical_binary_joint, exact_binary_joint, exact_binary_joint_with_order,
    exact_gaussian_moments, total_variation, write_joint_csv, GaussianMoments, MAX_EXACT_SITES,
};
pub use residuals::{conclique_residuals, kolmogorov_pvalue, ks_uniformity, KsResult, ResidualSet};
