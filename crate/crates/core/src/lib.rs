//! Finite categories, truncated simplicial sets, squiggles, and the
//! algebras of a monad computed as a limit of a tower of simplicial sets.

pub mod algebras;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod fincat;
pub mod limits;
pub mod monad;
pub mod ordinal;
pub mod squiggle;
pub mod sset;

pub use error::{Error, Result};
