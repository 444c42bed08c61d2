//! Reassembling images cut into square pieces.
//!
//! The pipeline: cut an image into a [`PuzzleBundle`] ([`dataset`]), score
//! every edge pair into a [`CompatibilityTensor`] ([`compat`]), normalize and
//! symmetrize it ([`postprocess`]), solve with the genetic algorithm ([`ga`]),
//! and grade the result ([`metrics`]). Tensors travel between tools as CMX
//! files ([`cmx`]).

pub mod cmx;
pub mod compat;
pub mod dataset;
pub mod error;
pub mod ga;
pub mod metrics;
pub mod model;
pub mod postprocess;

pub use compat::MeasureKind;
pub use error::{Error, Result};
pub use ga::{evolve, GaConfig, SolverReport};
pub use model::{
    Adjacency, Arrangement, CompatibilityTensor, Edge, GroundTruth, Piece, Placement, PuzzleBundle,
    PuzzleType, Raster, Relation, Rotation,
};
