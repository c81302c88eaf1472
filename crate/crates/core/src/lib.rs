//! Succinct fully indexable dictionaries over sorted integer sets.

pub mod batch;
pub mod binom;
pub mod bits;
pub mod bitvec;
pub mod bridge;
pub mod dataset;
pub mod eliasfano;
pub mod error;
pub mod multirank;
pub mod probe;
pub mod recfid;
pub mod reforacle;
pub mod sbtree;
pub mod serial;
pub mod traits;
pub mod verify;

pub use error::{Error, Result};
