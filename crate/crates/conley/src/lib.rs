//! Set-oriented computation of chain recurrent sets, local attractors and
//! their basins for cocycles over a noise flow on compact 1-D phase spaces.
//!
//! The pipeline discretizes the phase space into a uniform cell grid, builds
//! ε-fattened pullback transition graphs at sampled noise fibers, extracts
//! chain-recurrent cells from strongly connected components, grows candidate
//! pre-attractors from every cell, takes their pullback omega-limits and
//! basins, and checks the resulting decomposition of the complement of the
//! chain recurrent set against the union of basin-minus-attractor sets at
//! grid resolution.

pub mod error;
pub mod geometry;
pub mod noise;
pub mod systems;

pub use error::{ConleyError, Result};
