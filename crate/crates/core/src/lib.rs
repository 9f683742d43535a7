//! Exact-arithmetic tooling for the Baire class one characterisation game.

pub mod error;
pub mod functions;
pub mod metric;
pub mod scalar;
pub mod scheme;
pub mod oscillation;
pub mod game;
pub mod strategies;
