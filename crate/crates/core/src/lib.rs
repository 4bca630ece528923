//! Knowledge-growth modelling toolkit.
//!
//! Fits and forecasts growth laws (logarithmic integral and relatives),
//! computes structural metrics of knowledge graphs, generates
//! Barabási–Albert baselines, analyses category hierarchies and computes
//! disruption indices over citation graphs.

pub mod ba_sim;
pub mod calendar;
pub mod disruption;
pub mod error;
pub mod graph_metrics;
pub mod growth_models;
pub mod ingest_store;

pub use calendar::Month;
pub use error::{Error, Result};
pub use growth_models::{Family, GrowthModel};
pub mod model_fit;
pub mod taxonomy;
