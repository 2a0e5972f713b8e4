//! Expected-a-posteriori estimation from an LMB density.

use super::{LabeledTrack, LmbDensity, TargetState, TrackLabel};

/// EAP cardinality estimate: the sum of all existence probabilities.
pub fn eap_cardinality(density: &LmbDensity) -> f64 {
    density.tracks().iter().map(|t| t.r).sum()
}

/// EAP state estimate of one track: the weighted particle mean.
pub fn eap_state(track: &LabeledTrack) -> TargetState {
    let mut acc = [0.0f64; TargetState::DIM];
    for (s, &w) in track.states.iter().zip(&track.weights) {
        acc[0] += w * s.px;
        acc[1] += w * s.py;
        acc[2] += w * s.vx;
        acc[3] += w * s.vy;
        acc[4] += w * s.omega;
    }
    TargetState::new(acc[0], acc[1], acc[2], acc[3], acc[4])
}

/// Confident-track extraction: tracks with existence at or above the
/// threshold, reported as (label, EAP state), additionally capped at the
/// rounded EAP cardinality (half-up). Ties on existence break toward the
/// smaller label so extraction is deterministic.
pub fn extract_estimates(
    density: &LmbDensity,
    r_threshold: f64,
) -> Vec<(TrackLabel, TargetState)> {
    let cap = eap_cardinality(density).round() as usize;
    let mut selected: Vec<&LabeledTrack> = density
        .tracks()
        .iter()
        .filter(|t| t.r >= r_threshold)
        .collect();
    selected.sort_by(|a, b| {
        b.r.partial_cmp(&a.r)
            .unwrap()
            .then_with(|| a.label.cmp(&b.label))
    });
    selected.truncate(cap);
    let mut out: Vec<(TrackLabel, TargetState)> = selected
        .into_iter()
        .map(|t| (t.label, eap_state(t)))
        .collect();
    out.sort_by_key(|(l, _)| *l);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn track(r: f64, idx: u32, states: Vec<TargetState>, weights: Vec<f64>) -> LabeledTrack {
        LabeledTrack::new(TrackLabel::new(0, 0, idx), r, states, weights)
    }

    #[test]
    fn cardinality_is_sum_of_existence() {
        assert_eq!(eap_cardinality(&LmbDensity::new()), 0.0);
        let s = vec![TargetState::new(0.0, 0.0, 0.0, 0.0, 0.0)];
        let d = LmbDensity::from_tracks(vec![
            track(0.9, 0, s.clone(), vec![1.0]),
            track(0.4, 1, s, vec![1.0]),
        ]);
        assert_relative_eq!(eap_cardinality(&d), 1.3, epsilon = 1e-15);
    }

    #[test]
    fn state_is_weighted_mean() {
        let x0 = TargetState::new(3.0, -1.0, 2.0, 0.5, 0.0);
        let t = track(1.0, 0, vec![x0; 4], vec![0.25; 4]);
        assert_eq!(eap_state(&t), x0);

        let a = TargetState::new(0.0, 0.0, 0.0, 0.0, 0.0);
        let b = TargetState::new(10.0, 0.0, 0.0, 0.0, 0.0);
        let t = track(1.0, 0, vec![a, b], vec![0.5, 0.5]);
        assert_relative_eq!(eap_state(&t).px, 5.0, epsilon = 1e-15);

        let t = track(1.0, 0, vec![a, b], vec![1.0, 0.0]);
        assert_eq!(eap_state(&t), a);
    }

    #[test]
    fn extraction_applies_threshold_and_cardinality_cap() {
        let s = vec![TargetState::new(0.0, 0.0, 0.0, 0.0, 0.0)];
        let d = LmbDensity::from_tracks(vec![
            track(0.95, 0, s.clone(), vec![1.0]),
            track(0.92, 1, s.clone(), vec![1.0]),
            track(0.3, 2, s.clone(), vec![1.0]),
        ]);
        // sum r = 2.17 rounds to 2; both high-r tracks pass the threshold
        let est = extract_estimates(&d, 0.9);
        assert_eq!(est.len(), 2);
        assert_eq!(est[0].0, TrackLabel::new(0, 0, 0));
        assert_eq!(est[1].0, TrackLabel::new(0, 0, 1));

        // everything below threshold
        assert!(extract_estimates(&d, 0.99).is_empty());

        // boundary inclusive at threshold 1.0
        let d = LmbDensity::from_tracks(vec![track(1.0, 0, s, vec![1.0])]);
        assert_eq!(extract_estimates(&d, 1.0).len(), 1);
    }
}
