//! Command-line experiments over variable polynomial families: text formats,
//! configuration files, CSV reports and parallel evaluation on top of
//! [`ergopet_core`].

pub mod cli;
pub mod config;
pub mod dsl;
pub mod experiment;
pub mod parallel;
pub mod report;
pub mod specs;
