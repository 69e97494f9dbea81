pub mod atomic;
pub mod cli;
pub mod douglas;
pub mod duality;
pub mod error;
pub mod frame_file;
pub mod gframe;
pub mod numerics;
pub mod verifier;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
