//! Driver library behind the `gridramsey` binary.

pub mod colouring;
pub mod config;
pub mod experiment;
pub mod hostgen;
pub mod patterns;
pub mod run;
