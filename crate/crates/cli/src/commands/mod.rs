pub mod citation;
pub mod graph;
pub mod series;
pub mod taxonomy;
