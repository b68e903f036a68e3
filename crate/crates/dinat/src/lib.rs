//! Symbolic calculus for composing dinatural transformations.
//!
//! Transformations are described by cospan types and drawn as conflict-free
//! Petri nets. Vertical composition glues nets along their shared boundary,
//! horizontal composition substitutes one transformation into a variable of
//! another, and a variable of a composite is guaranteed dinatural when its
//! connected component is acyclic and every constituent is dinatural there.

pub mod cli;
pub mod dinat;
pub mod finset_oracle;
pub mod graphcat;
pub mod petri;
pub mod signature;
