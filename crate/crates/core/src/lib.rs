//! Persistent cohomology enriched with cup products, transferred
//! A∞-operations and mod-2 Steenrod squares, with certified bounds for the
//! structure-aware interleaving distances built on top of them.

pub mod ainfty;
pub mod barcode;
pub mod bottleneck;
pub mod bounds;
pub mod chain;
pub mod complex;
pub mod contraction;
pub mod dense;
pub mod dga;
pub mod error;
pub mod field;
pub mod ledger;
pub mod samples;
pub mod steenrod;
pub mod transfer;
pub mod sparse;

pub use error::{Error, Result};
pub use field::Field;
