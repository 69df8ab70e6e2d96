pub mod analysis;
pub mod classify;
pub mod cli;
pub mod embed;
pub mod eval;
pub mod fixtures;
pub mod graph;
pub mod kg;
pub mod report;
pub mod symbolic;
pub mod text;
