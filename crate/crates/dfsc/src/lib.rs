//! Distributed multi-sensor control for multi-target tracking.
//!
//! Each simulated sensor node runs a particle labeled multi-Bernoulli filter,
//! fuses posteriors with its neighbors, and selects its next movement by
//! flooding-based distributed control (DF-SC), benchmarked against
//! independent selection (I-SC) and multi-start distributed coordinate
//! descent (DCD-SC). The `sim` module ties the pieces into a deterministic
//! scenario harness with OSPA metrics and a Monte Carlo campaign runner.

pub mod exec;
pub mod geometry;
pub mod lmb;

pub use lmb::{LabeledTrack, LmbDensity, TargetState, TrackLabel};
