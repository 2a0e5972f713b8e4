//! Particle labeled multi-Bernoulli (LMB) filter.
//!
//! The filter state is a set of labeled tracks. Each track carries an
//! existence probability and a weighted particle cloud over the kinematic
//! state (position, velocity, turn rate). Prediction propagates particles
//! through the motion model and appends birth tracks; the update runs a
//! GLMB-style measurement association and marginalizes back to LMB form.

pub mod density;
pub mod estimate;
pub mod motion;
pub mod predict;
pub mod resample;
pub mod update;

use serde::{Deserialize, Serialize};
use std::fmt;

/// Track label: (birth step, minting sensor, per-step index).
///
/// Including the sensor id keeps labels minted at distinct nodes from ever
/// colliding. Total order is lexicographic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrackLabel {
    /// Filtering step at which the track was born
    pub birth_time: u32,
    /// Sensor node that minted the label
    pub sensor_id: u32,
    /// Index among the births minted by that sensor at that step
    pub birth_index: u32,
}

impl TrackLabel {
    pub fn new(birth_time: u32, sensor_id: u32, birth_index: u32) -> Self {
        Self {
            birth_time,
            sensor_id,
            birth_index,
        }
    }
}

impl fmt::Display for TrackLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.birth_time, self.sensor_id, self.birth_index)
    }
}

/// Kinematic single-object state. The turn rate is carried along even under
/// the constant-velocity model, where it stays zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    pub px: f64,
    pub py: f64,
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

impl TargetState {
    pub fn new(px: f64, py: f64, vx: f64, vy: f64, omega: f64) -> Self {
        Self { px, py, vx, vy, omega }
    }

    pub fn position(&self) -> [f64; 2] {
        [self.px, self.py]
    }

    pub fn component(&self, axis: usize) -> f64 {
        match axis {
            0 => self.px,
            1 => self.py,
            2 => self.vx,
            3 => self.vy,
            4 => self.omega,
            _ => panic!("state has 5 components"),
        }
    }

    pub const DIM: usize = 5;
}

/// One labeled Bernoulli component: existence probability plus particle cloud.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabeledTrack {
    pub label: TrackLabel,
    /// Existence probability, in [0, 1]
    pub r: f64,
    pub states: Vec<TargetState>,
    /// Non-negative, sums to 1
    pub weights: Vec<f64>,
}

impl LabeledTrack {
    pub fn new(label: TrackLabel, r: f64, states: Vec<TargetState>, weights: Vec<f64>) -> Self {
        debug_assert_eq!(states.len(), weights.len());
        debug_assert!(!states.is_empty());
        Self {
            label,
            r,
            states,
            weights,
        }
    }

    /// Uniform-weight cloud.
    pub fn from_states(label: TrackLabel, r: f64, states: Vec<TargetState>) -> Self {
        let n = states.len();
        let w = 1.0 / n as f64;
        Self::new(label, r, states, vec![w; n])
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// A labeled multi-Bernoulli density: tracks keyed by unique label,
/// kept sorted by label for deterministic iteration.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct LmbDensity {
    tracks: Vec<LabeledTrack>,
}

impl LmbDensity {
    pub fn new() -> Self {
        Self { tracks: Vec::new() }
    }

    pub fn from_tracks(mut tracks: Vec<LabeledTrack>) -> Self {
        tracks.sort_by_key(|t| t.label);
        let d = Self { tracks };
        debug_assert!(d.labels_unique());
        d
    }

    fn labels_unique(&self) -> bool {
        self.tracks.windows(2).all(|w| w[0].label != w[1].label)
    }

    pub fn push(&mut self, track: LabeledTrack) {
        match self.tracks.binary_search_by_key(&track.label, |t| t.label) {
            Ok(_) => panic!("duplicate label {}", track.label),
            Err(pos) => self.tracks.insert(pos, track),
        }
    }

    pub fn tracks(&self) -> &[LabeledTrack] {
        &self.tracks
    }

    pub fn tracks_mut(&mut self) -> &mut [LabeledTrack] {
        &mut self.tracks
    }

    pub fn into_tracks(self) -> Vec<LabeledTrack> {
        self.tracks
    }

    pub fn get(&self, label: &TrackLabel) -> Option<&LabeledTrack> {
        self.tracks
            .binary_search_by_key(label, |t| t.label)
            .ok()
            .map(|i| &self.tracks[i])
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = TrackLabel> + '_ {
        self.tracks.iter().map(|t| t.label)
    }

    /// Drops tracks failing the predicate, preserving order.
    pub fn retain<F: FnMut(&LabeledTrack) -> bool>(&mut self, f: F) {
        self.tracks.retain(f);
    }
}

/// Filter tuning constants. Defaults are the reference configuration;
/// scenario files may override.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    /// Particle budget per track after resampling
    pub particles_per_track: usize,
    /// Existence pruning threshold
    pub r_min: f64,
    /// Existence threshold for state extraction
    pub estimate_threshold: f64,
    /// Existence probability assigned to birth tracks
    pub birth_r: f64,
    /// Birth cloud position std dev (meters)
    pub birth_pos_sigma: f64,
    /// Birth cloud velocity std dev (meters/second)
    pub birth_vel_sigma: f64,
    /// Birth cloud turn-rate std dev (radians/second)
    pub birth_omega_sigma: f64,
    /// Measurements with association weight below this fraction spawn births
    pub birth_coverage_threshold: f64,
    /// Cap on births per sensor per scan
    pub max_births_per_scan: usize,
    /// Gibbs sweep budget for large association problems
    pub gibbs_iterations: usize,
    /// Exhaustive association enumeration bound (tracks and measurements)
    pub exhaustive_max: usize,
    /// EAP distance below which fused duplicate tracks merge (meters)
    pub merge_dist: f64,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            particles_per_track: 500,
            r_min: 1e-3,
            estimate_threshold: 0.9,
            birth_r: 0.03,
            birth_pos_sigma: 10.0,
            birth_vel_sigma: 15.0,
            birth_omega_sigma: 0.05,
            birth_coverage_threshold: 0.05,
            max_births_per_scan: 5,
            gibbs_iterations: 1000,
            exhaustive_max: 6,
            merge_dist: 10.0,
        }
    }
}
