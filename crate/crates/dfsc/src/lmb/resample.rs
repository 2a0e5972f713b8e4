//! Track pruning and systematic particle resampling.

use super::{LabeledTrack, LmbDensity};
use rand::Rng;

/// Systematic resampling of one weighted cloud down to `target` equal-weight
/// particles. A single uniform draw positions the comb, so the output is a
/// low-variance resample of the input mixture.
pub fn systematic_resample<R: Rng>(track: &LabeledTrack, target: usize, rng: &mut R) -> LabeledTrack {
    debug_assert!(target >= 1);
    let n = track.len();
    let total: f64 = track.weight_sum();
    debug_assert!(total > 0.0);
    let start: f64 = rng.gen::<f64>() / target as f64;
    let step = 1.0 / target as f64;
    let mut states = Vec::with_capacity(target);
    let mut cum = track.weights[0] / total;
    let mut idx = 0usize;
    for i in 0..target {
        let u = start + i as f64 * step;
        while u > cum && idx + 1 < n {
            idx += 1;
            cum += track.weights[idx] / total;
        }
        states.push(track.states[idx]);
    }
    LabeledTrack::from_states(track.label, track.r, states)
}

/// Removes tracks with existence below `r_min` and resamples every survivor
/// to exactly `target_particles` equal-weight particles.
pub fn prune_resample<R: Rng>(
    density: &LmbDensity,
    r_min: f64,
    target_particles: usize,
    rng: &mut R,
) -> LmbDensity {
    let tracks = density
        .tracks()
        .iter()
        .filter(|t| t.r >= r_min)
        .map(|t| systematic_resample(t, target_particles, rng))
        .collect();
    LmbDensity::from_tracks(tracks)
}
