#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod funm;
pub mod harness;
pub mod hiprec;
pub mod interp;
pub mod la;
pub mod partition;
pub mod polyeval;
pub mod scalarfun;
pub mod schur;

pub use error::{Error, Result};
