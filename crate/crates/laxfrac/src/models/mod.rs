//! Bundled finite 2-category models and their file formats.
//!
//! Two families ship with the crate:
//! - [`PosModel`]: a finite fragment of the 2-category of posets, monotone
//!   maps and pointwise order cells, with Σ = embeddings and Σ-squares the
//!   strictly commuting squares satisfying the elementwise lifting condition.
//! - [`TrivialModel`]: a finite 1-category with only identity 2-cells,
//!   loaded from a JSON description together with a chosen class Σ of
//!   morphisms; squares are commuting squares with Σ top and bottom.

pub mod fincat;
pub mod files;
pub mod pos_model;
pub mod poset;

pub use fincat::{FiniteCategorySpec, SpecError, TrivialModel};
pub use files::{
    parse_map_file, parse_model_file, parse_poset_file, LoadedModel, NamedMap, NamedPoset,
};
pub use pos_model::{PosModel, PosTwo};
pub use poset::{MonotoneMap, Poset};
