//! Bilinear-form invariants of Hurwitz equivalence classes, specialized to
//! Lefschetz fibrations over the 2-sphere via mapping-class-group
//! representations, over exact coefficient rings.

pub mod error;
pub mod fuzz;
pub mod hurwitz;
pub mod invariant;
pub mod io;
pub mod linalg;
pub mod meyer;
pub mod reps;
pub mod ring;

pub use error::{Error, Result};
pub use ring::{RingDescriptor, RingElement};
