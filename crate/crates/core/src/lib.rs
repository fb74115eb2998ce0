//! Zero-energy modes of Dirac-Weyl operators in compactly supported magnetic fields.
//!
//! The crate is organised bottom-up:
//!
//! - [`profiles`]: compact field profiles `B(x)` / `B(r)` and their flux.
//! - [`potential`]: the scalar potential `λ` from Green-function convolution,
//!   the Landau-gauge vector potential and the phase that removes `A_x`.
//! - [`zeromodes`]: the `e^{±λ_k}` family on the line, admissible `k` windows,
//!   and the `z^j e^{-λ}` family in the plane.
//! - [`spectral`]: a finite-difference Dirac operator per `k_y` channel with a
//!   banded symmetric eigensolver, used as an independent numerical oracle.
//! - [`reduction`]: Born-von Karman channel bookkeeping and degeneracy counts.
//! - [`report`] / [`config`] / [`cli`]: the `zml` command-line surface.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod potential;
pub mod profiles;
pub mod quadrature;
pub mod reduction;
pub mod report;
pub mod spectral;
pub mod zeromodes;

pub use error::{Error, Result};
pub use grid::Grid1D;
pub use profiles::{Dimension, FieldProfile, Flux, FluxMethod, Shape};
