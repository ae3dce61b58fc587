//! Numerical core for the postselected gravitational kick protocol.
//!
//! A source mass is split over two interferometer arms `A` and `B`. Each arm
//! imparts its own momentum kick on a probe wavepacket. Postselecting the
//! source on a state nearly orthogonal to its preparation makes the probe's
//! conditional mean momentum point *away* from the source, something no
//! classical mixture of attractive kicks can produce.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the threaded drivers live in the `gravkick` crate.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod feasibility;
mod fft;
pub mod montecarlo;
pub mod protocol;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
