//! Secrecy-capacity fields of a two-node link in which the receiver runs a
//! full-duplex radio and jams eavesdroppers while it listens.
//!
//! Everything lives in the normalized model: Alice sits at `(-0.5, 0)`, Bob at
//! `(0.5, 0)`, the Alice-Bob gain and every noise variance are one, and an
//! eavesdropper (Eve) at `(x, y)` sees large-scale gains `a = d_A^-alpha` from
//! Alice and `b = d_B^-alpha` from Bob.
//!
//! The crate is `no_std` (it needs `alloc` only for sample buffers and
//! quadrature nodes). IO, the command line and thread pools live in the
//! `fdjam` companion crate.
//!
//! Modules:
//!
//! * [`geometry`]: normalization, gains, the four regions and the `b = rho a` disk.
//! * [`colluding`]: one-way secrecy `S_AB`, positivity, optimal jamming power.
//! * [`colluding_fading`]: zero-secrecy probabilities of `S_AB` under Rayleigh fading.
//! * [`pairwise`]: the dual-phase secrecy `S = (S_AB + S_BA) / 2` without fading.
//! * [`pairwise_fading`]: its zero-secrecy probabilities and jamming policies.
//! * [`montecarlo`]: seeded, chunk-deterministic exponential sampling and estimates.
//! * [`quadrature`]: Gauss-Legendre rules and exponential expectations.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod colluding;
pub mod colluding_fading;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod pairwise;
pub mod pairwise_fading;
pub mod quadrature;

mod math;

pub use error::{Error, Result};
pub use geometry::{EveLocation, LinkGains, Region, SystemParams};
pub use montecarlo::{Estimate, McConfig};

/// Converts a power ratio in dB to linear scale.
pub fn from_db(db: f64) -> f64 {
    math::powf(10.0, db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn to_db(linear: f64) -> f64 {
    10.0 * math::log10(linear)
}
