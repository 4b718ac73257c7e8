//! Repeater-graph-state toolkit: GF(2) algebra, stabilizer simulation, the
//! trellis/tree-code constructions, rate analytics, an LDPC variant and
//! emitter-resource estimates.

pub mod error;
pub mod gf2;
pub mod stabsim;
pub mod trellis;
pub mod treecode;
pub mod analytics;
pub mod protocol;
pub mod ldpc;
pub mod emitters;
pub mod checks;

pub use error::{Error, Result};
