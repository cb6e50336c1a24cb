//! Mechanisms that reward strategic agents for genuine improvement when only
//! a projection of their features is visible.
//!
//! The crate covers the agent model ([`model`]), population sampling and
//! smoothing ([`distributions`]), welfare functionals ([`metrics`]), the
//! optimal linear mechanism ([`linear`]), threshold mechanism design
//! ([`threshold`]), sample-based design ([`learning`]) and file formats plus
//! the command-line driver ([`io`], [`cli`]).

pub mod cli;
pub mod distributions;
pub mod error;
pub mod io;
pub mod learning;
pub mod linear;
pub mod metrics;
pub mod model;
pub mod numeric;
pub mod par;
pub mod threshold;

pub use error::{Error, Result};
