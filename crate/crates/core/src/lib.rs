//! Conclique-based Gibbs sampling for spatial Markov random fields.
//!
//! A conclique is a set of sites no two of which are neighbors. Given a
//! cover of the sites by concliques, all sites in one conclique can be
//! drawn simultaneously from their full conditionals, so a Gibbs scan needs
//! one batch per conclique instead of one step per site.
//!
//! ```
//! use conclique::{analytic_lattice_cover, build_lattice, run_cgs, ChainConfig, LatticeKind, ModelSpec};
//!
//! let graph = build_lattice(10, 10, LatticeKind::Four).unwrap();
//! let cover = analytic_lattice_cover(10, 10, LatticeKind::Four).unwrap();
//! let model = ModelSpec::AutologisticIso { kappa: 0.5, eta: 0.4 };
//! let chain = run_cgs(&model, &graph, &cover, &ChainConfig::new(200, 7).burn_in(50)).unwrap();
//! assert_eq!(chain.samples.len(), 150);
//! ```

pub mod concliques;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod kernel;
pub mod models;
pub mod rng;
pub mod sampler;
pub mod special;
pub mod topology;

pub use concliques::{
    analytic_lattice_cover, delta_n_bound, dsatur, ensure_valid_cover, greedy_welsh_powell,
    round_robin_edge_cover, verify_cover, ConcliqueCover, CoverCheck,
};
pub use error::{Error, Result};
pub use kernel::CompiledModel;
pub use models::{
    conditional_cdf, conditional_law, natural_parameter, pit, sample_conditional, ConditionalLaw,
    EdgeWeights, LsgmSpec, ModelSpec,
};
pub use rng::{CounterRng, Stream};
pub use sampler::{
    cgs_iteration, init_field, run_cgs, run_chain, run_single_site, ChainConfig, ChainResult,
    ConcliqueSampler, Field, GibbsSweep, InitPolicy, OrderPolicy, RunSummary, SamplerStats,
    SingleSiteSampler,
};
pub use topology::{
    build_incidence, build_lattice, build_threshold_graph, incidence_index, triangle_pairs,
    LatticeKind, LatticeShape, NeighborhoodGraph, Site, SiteLabels,
};
