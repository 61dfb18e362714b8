//! Maximum disjoint paths with a structured demand graph.
//!
//! An instance is a supply graph `G`, a terminal set `T`, a demand graph `H`
//! on `T` and a target `k`. A valid path joins two demand-adjacent
//! terminals. The crate provides exact desk-scale oracles, the cover-or-pack
//! dichotomy for demand graphs without large induced matchings, the exact
//! FPT pipeline built on irrelevant-terminal reductions, and generators for
//! the two grid-tiling hardness constructions.

pub mod ep_cover;
pub mod error;
pub mod fpt_pipeline;
pub mod graph_core;
pub mod hardness_gen;
pub mod io;
pub mod pattern_ramsey;
pub mod rep_sets;
pub mod separators;

pub use error::{DpathError, Result};
pub use graph_core::{Graph, Instance, PathSet, PatternWitness, Separation, WitnessKind};
