//! Clustered-cyclic quantum LDPC codes: construction, clustered logical
//! bases, distance estimation, parallel product surgery, and verification
//! of the Clifford gadgets of the [[24,8,3]] code.

pub mod cli;
pub mod clifford;
pub mod codes;
pub mod distance;
pub mod error;
pub mod gadget;
pub mod gf2;
pub mod logical;
pub mod ring;
pub mod surgery;

pub use error::{Error, Result};
