//! Empirical verification layer: synthetic input corpus, experiment
//! drivers, acceptance checks with pinned tolerances, and CSV reporting.

pub mod acceptance;
pub mod corpus;
pub mod experiments;
pub mod report;
pub mod suite;
