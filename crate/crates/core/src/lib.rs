//! Buckley–Osthus preferential-attachment graphs and the statistics used to
//! recover their initial-attractiveness parameter.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: edge-list multigraphs, simplification, text/binary persistence.
//! - [`pa`]: the Buckley–Osthus chain `H(a,1,mn)` and the m-block merge.
//! - [`baseline`]: configuration model on a power-law sequence and Holme–Kim.
//! - [`stats`]: `#(d)`, `X(d1,d2)`, the cumulative surfaces and `d_nn`.
//! - [`theory`]: closed-form expectations and numerical checks.
//! - [`fitting`]: the two square-root least-squares estimators of `a`.
//! - [`bootstrap`]: resampling error estimates for both estimators.

pub mod baseline;
pub mod bootstrap;
pub mod error;
pub mod fitting;
pub mod graph;
pub mod pa;
pub mod rng;
pub mod stats;
pub mod theory;
pub mod tsv;

pub use error::{Error, Result};
pub use graph::{Graph, MultiplicityReport, SimpleGraph, VertexId};
