//! Interval probabilistic timed automata with timing parameters.
//!
//! The crate builds symbolic zone graphs of parametric models, decides whether
//! an interval model admits an implementation, and synthesises the parameter
//! valuations for which it does. Models are written in a small text format
//! (see [`cli::parse_model`]); the `pipta` binary exposes every analysis.

pub mod bundled;
pub mod cli;
pub mod consistency;
pub mod geometry;
pub mod model;
pub mod rational;
pub mod synthesis;
pub mod zonegraph;

pub use model::{ClockId, LocId, ParamId, Pipta};
pub use rational::Rational;
