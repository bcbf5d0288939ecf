//! Robust estimation of Mallows ranking models from adversarially corrupted samples.
//!
//! The crate is `no_std` and only needs `alloc`. Randomness is always supplied
//! by the caller as an explicit [`rand::Rng`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod contamination;
pub mod error;
pub mod estimator;
pub mod mallows;
pub mod oracle;
pub mod perm;
pub mod robust_mean;
pub mod seed;

pub use error::{Error, Result};
pub use mallows::MallowsModel;
pub use perm::{Permutation, PositionVector};
