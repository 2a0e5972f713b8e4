//! Multi-object density evaluation: label-set weights and kernel density
//! estimates over particle clouds.

use super::{LabeledTrack, LmbDensity, TargetState, TrackLabel};
use std::collections::HashSet;

/// Numerically stable log(sum(exp(xs))).
pub fn logsumexp(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Gaussian-product kernel density over a weighted particle cloud.
///
/// Bandwidths follow Silverman's rule per axis over the axes that actually
/// vary; constant axes are treated as matched point masses and contribute
/// factor one, which keeps constant-velocity clouds (turn rate pinned at
/// zero) comparable.
pub struct KernelDensity<'a> {
    states: &'a [TargetState],
    weights: &'a [f64],
    active: Vec<usize>,
    bandwidth: Vec<f64>,
}

impl<'a> KernelDensity<'a> {
    pub fn from_track(track: &'a LabeledTrack) -> Self {
        Self::new(&track.states, &track.weights)
    }

    pub fn new(states: &'a [TargetState], weights: &'a [f64]) -> Self {
        debug_assert_eq!(states.len(), weights.len());
        let w_sum: f64 = weights.iter().sum();
        let w2_sum: f64 = weights.iter().map(|w| w * w).sum();
        let n_eff = if w2_sum > 0.0 { w_sum * w_sum / w2_sum } else { 1.0 };
        let mut active = Vec::new();
        let mut sigma = Vec::new();
        for axis in 0..TargetState::DIM {
            let mean: f64 = states
                .iter()
                .zip(weights)
                .map(|(s, w)| w * s.component(axis))
                .sum::<f64>()
                / w_sum;
            let var: f64 = states
                .iter()
                .zip(weights)
                .map(|(s, w)| {
                    let d = s.component(axis) - mean;
                    w * d * d
                })
                .sum::<f64>()
                / w_sum;
            if var > 1e-18 {
                active.push(axis);
                sigma.push(var.sqrt());
            }
        }
        let d = active.len().max(1) as f64;
        let factor = (4.0 / ((d + 2.0) * n_eff)).powf(1.0 / (d + 4.0));
        let bandwidth = sigma.iter().map(|s| s * factor).collect();
        Self {
            states,
            weights,
            active,
            bandwidth,
        }
    }

    fn log_kernel(&self, center: &TargetState, x: &TargetState) -> f64 {
        let mut acc = 0.0;
        for (k, &axis) in self.active.iter().enumerate() {
            let h = self.bandwidth[k];
            let d = (x.component(axis) - center.component(axis)) / h;
            acc += -0.5 * d * d - h.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
        }
        acc
    }

    pub fn log_pdf(&self, x: &TargetState) -> f64 {
        let w_sum: f64 = self.weights.iter().sum();
        logsumexp(
            self.states
                .iter()
                .zip(self.weights)
                .filter(|(_, &w)| w > 0.0)
                .map(|(s, &w)| (w / w_sum).ln() + self.log_kernel(s, x)),
        )
    }

    pub fn pdf(&self, x: &TargetState) -> f64 {
        self.log_pdf(x).exp()
    }

    /// Leave-one-out log density at the cloud's own particle `skip`.
    /// Used by Kullback-Leibler estimation to avoid the self-kernel bias.
    pub fn log_pdf_loo(&self, x: &TargetState, skip: usize) -> f64 {
        let w_sum: f64 = self
            .weights
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .map(|(_, w)| w)
            .sum();
        if w_sum <= 0.0 {
            return f64::NEG_INFINITY;
        }
        logsumexp(
            self.states
                .iter()
                .zip(self.weights)
                .enumerate()
                .filter(|&(j, (_, &w))| j != skip && w > 0.0)
                .map(|(_, (s, &w))| (w / w_sum).ln() + self.log_kernel(s, x)),
        )
    }
}

/// Joint-existence weight of one label subset: product of r over members
/// and (1 - r) over the rest of the density's label space. Zero if the
/// subset mentions a label the density does not carry.
pub fn label_subset_weight(density: &LmbDensity, subset: &[TrackLabel]) -> f64 {
    let chosen: HashSet<TrackLabel> = subset.iter().copied().collect();
    if chosen.len() != subset.len() {
        return 0.0;
    }
    for l in subset {
        if density.get(l).is_none() {
            return 0.0;
        }
    }
    density
        .tracks()
        .iter()
        .map(|t| if chosen.contains(&t.label) { t.r } else { 1.0 - t.r })
        .product()
}

/// Evaluates the LMB multi-object density at one labeled state set:
/// the label-set weight times the product of per-track spatial densities
/// (kernel estimates over the particle clouds). Repeated labels and labels
/// outside the density's label space give zero.
pub fn lmb_density_eval(density: &LmbDensity, x_set: &[(TrackLabel, TargetState)]) -> f64 {
    let labels: Vec<TrackLabel> = x_set.iter().map(|(l, _)| *l).collect();
    let w = label_subset_weight(density, &labels);
    if w == 0.0 {
        return 0.0;
    }
    let mut value = w;
    for (label, state) in x_set {
        let track = density.get(label).expect("checked by subset weight");
        value *= KernelDensity::from_track(track).pdf(state);
    }
    value
}
