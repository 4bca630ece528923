//! Structural metrics on directed snapshot graphs and degree/size
//! distribution fits.

mod distfit;
mod graph;
mod metrics;

pub use distfit::{
    erfc, hurwitz_zeta, lognormal_fit, normal_cdf, powerlaw_fit, KMin, LogNormalFit, PowerLawFit, MIN_TAIL,
};
pub use graph::{GraphSummary, NodeId, SnapshotGraph};
pub use metrics::{
    avg_shortest_path, clustering_coefficient, degree_entropy, degrees, density, distance_histogram,
    effective_diameter, entropy_reference_curve, mean_degree, normalized_structural_entropy, sample_sources,
    Direction, DistanceHistogram,
};
