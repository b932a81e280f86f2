//! Multiple-source detection on a single infection snapshot.
//!
//! The pipeline clusters the edges of the infected subnetwork, seeds a label
//! matrix with prominence/exoneration node ages, propagates labels over the
//! extended infected network to their fixed point and reports the top-scoring
//! infected node of every community as a source.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the experiment
//! harness and the command line live in the companion `msd` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod clustering;
pub mod diffusion;
pub mod error;
pub mod eval;
pub mod generators;
pub mod graph;
pub mod msd;
pub mod rng;

pub use error::{Error, Result, Stage};
pub use graph::{Graph, NodeId};
