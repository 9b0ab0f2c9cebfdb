//! Solvers for the multi-vehicle dial-a-ride problem built around
//! hierarchical request grouping and spanning-forest routing.

pub mod bench;
pub mod data;
pub mod error;
pub mod group_walk;
pub mod grouping;
pub mod io;
pub mod matching;
pub mod model;
pub mod oracles;
pub mod routing;
pub mod spanning;

pub use error::{Error, Result};
