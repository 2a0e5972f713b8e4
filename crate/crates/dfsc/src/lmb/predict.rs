//! LMB prediction: particle propagation, survival scaling, track births.

use super::motion::{step_noisy, MotionKind, MotionModel};
use super::{FilterParams, LabeledTrack, LmbDensity, TargetState, TrackLabel};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// One adaptive birth location with its pre-minted label.
#[derive(Clone, Debug)]
pub struct BirthSite {
    pub label: TrackLabel,
    pub position: [f64; 2],
}

fn sample_or_zero<R: Rng>(sigma: f64, rng: &mut R) -> f64 {
    if sigma > 0.0 {
        Normal::new(0.0, sigma).expect("valid sigma").sample(rng)
    } else {
        0.0
    }
}

/// Draws the particle cloud for one birth site: Gaussian position around the
/// inverse-measurement location and a broad zero-mean velocity prior.
pub fn birth_track<R: Rng>(
    site: &BirthSite,
    model: &MotionModel,
    params: &FilterParams,
    rng: &mut R,
) -> LabeledTrack {
    let n = params.particles_per_track;
    let mut states = Vec::with_capacity(n);
    for _ in 0..n {
        let omega = if model.kind == MotionKind::ConstantTurn {
            sample_or_zero(params.birth_omega_sigma, rng)
        } else {
            0.0
        };
        states.push(TargetState::new(
            site.position[0] + sample_or_zero(params.birth_pos_sigma, rng),
            site.position[1] + sample_or_zero(params.birth_pos_sigma, rng),
            sample_or_zero(params.birth_vel_sigma, rng),
            sample_or_zero(params.birth_vel_sigma, rng),
            omega,
        ));
    }
    LabeledTrack::from_states(site.label, params.birth_r, states)
}

/// LMB prediction step: every particle moves through the motion model with
/// sampled process noise, existence scales by the survival probability, and
/// birth tracks are appended under their fresh labels.
pub fn predict<R: Rng>(
    density: &LmbDensity,
    model: &MotionModel,
    births: &[BirthSite],
    params: &FilterParams,
    rng: &mut R,
) -> LmbDensity {
    let mut tracks: Vec<LabeledTrack> = Vec::with_capacity(density.len() + births.len());
    for track in density.tracks() {
        let states: Vec<TargetState> = track
            .states
            .iter()
            .map(|s| step_noisy(s, model.kind, model.dt, model.sigma_accel, model.sigma_turn, rng))
            .collect();
        tracks.push(LabeledTrack::new(
            track.label,
            track.r * model.survival_prob,
            states,
            track.weights.clone(),
        ));
    }
    for site in births {
        tracks.push(birth_track(site, model, params, rng));
    }
    LmbDensity::from_tracks(tracks)
}
