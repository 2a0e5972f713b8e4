//! LMB measurement update via GLMB association and marginalization.
//!
//! The predicted LMB is lifted to association hypotheses (each track is
//! nonexistent, misdetected, or matched to one measurement; measurements are
//! matched injectively), hypotheses are weighted, and the posterior is
//! marginalized back to LMB form. Small problems are enumerated exhaustively;
//! larger ones are truncated by Gibbs sampling with a caller-supplied seeded
//! generator. Zero clutter intensity (the pseudo-update case) forces every
//! measurement to be explained by a track and is handled by a deterministic
//! grouped enumeration.

use super::{FilterParams, LabeledTrack, LmbDensity, TargetState};
use crate::geometry::{
    detection_probability, from_sensor_frame, measurement_likelihood, DetectionProfile,
    Measurement, SensorPose,
};
use rand::Rng;
use std::collections::BTreeMap;

/// Update failure: every association hypothesis carries zero weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegenerateUpdate;

impl std::fmt::Display for DegenerateUpdate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "all association hypotheses have zero weight")
    }
}

impl std::error::Error for DegenerateUpdate {}

/// Measurement-update context.
#[derive(Clone, Copy, Debug)]
pub struct UpdateContext<'a> {
    pub pose: &'a SensorPose,
    pub profile: &'a DetectionProfile,
    /// Clutter density over the measurement space; zero means every
    /// measurement must be explained by a track (pseudo-update).
    pub clutter_intensity: f64,
    pub noise_sigma: f64,
}

/// Posterior plus the per-measurement association mass, used by the adaptive
/// birth logic to find poorly explained measurements.
#[derive(Clone, Debug)]
pub struct UpdateOutcome {
    pub posterior: LmbDensity,
    /// Per measurement: posterior probability it is assigned to some track
    pub coverage: Vec<f64>,
}

/// Per-track association statistics against one measurement set.
struct TrackLik {
    /// Detection probability per particle
    pd: Vec<f64>,
    /// Misdetection mass: sum_j w_j (1 - pd_j)
    eta0: f64,
    /// Detection mass per measurement: sum_j w_j pd_j g(z_i | x_j)
    eta: Vec<f64>,
    /// Likelihood matrix, g[i * n_particles + j]
    g: Vec<f64>,
}

fn compute_likelihoods(density: &LmbDensity, z: &[Measurement], ctx: &UpdateContext) -> Vec<TrackLik> {
    density
        .tracks()
        .iter()
        .map(|track| {
            let n = track.len();
            let pd: Vec<f64> = track
                .states
                .iter()
                .map(|s| detection_probability(ctx.profile, ctx.pose, s.position()))
                .collect();
            let eta0 = track
                .weights
                .iter()
                .zip(&pd)
                .map(|(w, p)| w * (1.0 - p))
                .sum();
            let mut g = vec![0.0; z.len() * n];
            let mut eta = vec![0.0; z.len()];
            for (i, zi) in z.iter().enumerate() {
                let mut acc = 0.0;
                for j in 0..n {
                    let lik = if pd[j] > 0.0 {
                        pd[j]
                            * measurement_likelihood(
                                ctx.pose,
                                track.states[j].position(),
                                zi,
                                ctx.noise_sigma,
                            )
                    } else {
                        0.0
                    };
                    g[i * n + j] = lik;
                    acc += track.weights[j] * lik;
                }
                eta[i] = acc;
            }
            TrackLik { pd, eta0, eta, g }
        })
        .collect()
}

/// Marginal association probabilities. Indices: track-local within the
/// problem being solved.
#[derive(Clone, Debug, Default)]
struct Marginals {
    nonexist: Vec<f64>,
    miss: Vec<f64>,
    /// detect[t][i]
    detect: Vec<Vec<f64>>,
}

impl Marginals {
    fn zeros(n_tracks: usize, n_meas: usize) -> Self {
        Self {
            nonexist: vec![0.0; n_tracks],
            miss: vec![0.0; n_tracks],
            detect: vec![vec![0.0; n_meas]; n_tracks],
        }
    }

    fn add_map(&mut self, assignment: &[i32], weight: f64) {
        for (t, &a) in assignment.iter().enumerate() {
            match a {
                -1 => self.nonexist[t] += weight,
                0 => self.miss[t] += weight,
                i => self.detect[t][(i - 1) as usize] += weight,
            }
        }
    }

    fn normalize(&mut self, total: f64) {
        for v in self
            .nonexist
            .iter_mut()
            .chain(self.miss.iter_mut())
            .chain(self.detect.iter_mut().flatten())
        {
            *v /= total;
        }
    }
}

/// Option weights for one track: psi(-1) = 1-r, psi(0) = r*eta0,
/// psi(i) = r*eta_i / kappa (or r*eta_i raw when kappa = 0, in which case
/// unassigned measurements annihilate the hypothesis).
struct OptionWeights {
    nonexist: f64,
    miss: f64,
    detect: Vec<f64>,
}

fn option_weights(r: f64, lik: &TrackLik, clutter: f64) -> OptionWeights {
    let detect = lik
        .eta
        .iter()
        .map(|&e| {
            if clutter > 0.0 {
                r * e / clutter
            } else {
                r * e
            }
        })
        .collect();
    OptionWeights {
        nonexist: 1.0 - r,
        miss: r * lik.eta0,
        detect,
    }
}

/// Exhaustive DFS over injective association maps. With `require_cover`
/// (zero clutter), hypotheses leaving any measurement unassigned are skipped.
fn enumerate_exhaustive(
    options: &[OptionWeights],
    n_meas: usize,
    require_cover: bool,
) -> (Marginals, f64) {
    let n = options.len();
    let mut marg = Marginals::zeros(n, n_meas);
    let mut total = 0.0;
    let mut assignment = vec![0i32; n];
    let mut used = vec![false; n_meas];

    fn dfs(
        t: usize,
        n: usize,
        n_meas: usize,
        assigned: usize,
        weight: f64,
        require_cover: bool,
        options: &[OptionWeights],
        assignment: &mut Vec<i32>,
        used: &mut Vec<bool>,
        marg: &mut Marginals,
        total: &mut f64,
    ) {
        if weight == 0.0 {
            return;
        }
        if require_cover && n_meas - assigned > n - t {
            return; // not enough tracks left to cover the measurements
        }
        if t == n {
            if require_cover && assigned < n_meas {
                return;
            }
            *total += weight;
            marg.add_map(assignment, weight);
            return;
        }
        let opt = &options[t];
        for (choice, w) in [(-1i32, opt.nonexist), (0, opt.miss)] {
            assignment[t] = choice;
            dfs(
                t + 1,
                n,
                n_meas,
                assigned,
                weight * w,
                require_cover,
                options,
                assignment,
                used,
                marg,
                total,
            );
        }
        for i in 0..n_meas {
            if used[i] || opt.detect[i] == 0.0 {
                continue;
            }
            used[i] = true;
            assignment[t] = (i + 1) as i32;
            dfs(
                t + 1,
                n,
                n_meas,
                assigned + 1,
                weight * opt.detect[i],
                require_cover,
                options,
                assignment,
                used,
                marg,
                total,
            );
            used[i] = false;
        }
        assignment[t] = 0;
    }

    dfs(
        0,
        n,
        n_meas,
        0,
        1.0,
        require_cover,
        options,
        &mut assignment,
        &mut used,
        &mut marg,
        &mut total,
    );
    (marg, total)
}

/// Gibbs-sampled truncation: sweeps over tracks resampling each track's
/// association conditioned on the others, collecting unique maps. Marginals
/// are computed over the collected set with exact weights.
fn enumerate_gibbs<R: Rng>(
    options: &[OptionWeights],
    n_meas: usize,
    sweeps: usize,
    rng: &mut R,
) -> (Marginals, f64) {
    let n = options.len();
    let map_weight = |a: &[i32]| -> f64 {
        a.iter()
            .enumerate()
            .map(|(t, &c)| match c {
                -1 => options[t].nonexist,
                0 => options[t].miss,
                i => options[t].detect[(i - 1) as usize],
            })
            .product()
    };

    let mut current = vec![0i32; n];
    let mut used = vec![false; n_meas];
    let mut unique: BTreeMap<Vec<i32>, f64> = BTreeMap::new();
    unique.insert(current.clone(), map_weight(&current));

    let mut weights_buf: Vec<(i32, f64)> = Vec::with_capacity(n_meas + 2);
    for _ in 0..sweeps {
        for t in 0..n {
            // release this track's current measurement
            if current[t] > 0 {
                used[(current[t] - 1) as usize] = false;
            }
            weights_buf.clear();
            weights_buf.push((-1, options[t].nonexist));
            weights_buf.push((0, options[t].miss));
            for i in 0..n_meas {
                if !used[i] && options[t].detect[i] > 0.0 {
                    weights_buf.push(((i + 1) as i32, options[t].detect[i]));
                }
            }
            let sum: f64 = weights_buf.iter().map(|(_, w)| w).sum();
            let choice = if sum <= 0.0 {
                -1
            } else {
                let mut u = rng.gen::<f64>() * sum;
                let mut picked = weights_buf[weights_buf.len() - 1].0;
                for &(c, w) in &weights_buf {
                    if u < w {
                        picked = c;
                        break;
                    }
                    u -= w;
                }
                picked
            };
            current[t] = choice;
            if choice > 0 {
                used[(choice - 1) as usize] = true;
            }
        }
        unique.entry(current.clone()).or_insert_with(|| map_weight(&current));
    }

    let mut marg = Marginals::zeros(n, n_meas);
    let mut total = 0.0;
    for (a, &w) in &unique {
        total += w;
        marg.add_map(a, w);
    }
    (marg, total)
}

/// Splits the association problem into independent groups: connected
/// components of tracks and measurements linked by strictly positive
/// detection mass. Exact, since zero cross-likelihood factorizes the joint.
fn gated_groups(liks: &[TrackLik], n_meas: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = liks.len();
    // union-find over n tracks + n_meas measurements
    let mut parent: Vec<usize> = (0..n + n_meas).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for (t, lik) in liks.iter().enumerate() {
        for (i, &e) in lik.eta.iter().enumerate() {
            if e > 0.0 {
                let a = find(&mut parent, t);
                let b = find(&mut parent, n + i);
                parent[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for t in 0..n {
        let root = find(&mut parent, t);
        groups.entry(root).or_default().0.push(t);
    }
    for i in 0..n_meas {
        let root = find(&mut parent, n + i);
        groups.entry(root).or_default().1.push(i);
    }
    groups.into_values().collect()
}

/// Runs the LMB measurement update.
///
/// Association strategy: plain exhaustive enumeration when both the track
/// and measurement counts are at most `params.exhaustive_max`; otherwise
/// Gibbs truncation with `params.gibbs_iterations` sweeps, except that with
/// zero clutter intensity the problem is split into gated groups and each
/// group is enumerated exactly, keeping the pseudo-update deterministic.
pub fn update<R: Rng>(
    density: &LmbDensity,
    z: &[Measurement],
    ctx: &UpdateContext,
    params: &FilterParams,
    rng: &mut R,
) -> Result<UpdateOutcome, DegenerateUpdate> {
    let n = density.len();
    let m = z.len();
    if n == 0 {
        return Ok(UpdateOutcome {
            posterior: LmbDensity::new(),
            coverage: vec![0.0; m],
        });
    }

    let liks = compute_likelihoods(density, z, ctx);
    let require_cover = ctx.clutter_intensity <= 0.0;

    let all_options: Vec<OptionWeights> = density
        .tracks()
        .iter()
        .zip(&liks)
        .map(|(t, lik)| option_weights(t.r, lik, ctx.clutter_intensity))
        .collect();

    // Solve association, per group when covering is required.
    let mut marg = Marginals::zeros(n, m);
    if require_cover {
        for (tracks, meas) in gated_groups(&liks, m) {
            let g_options: Vec<OptionWeights> = tracks
                .iter()
                .map(|&t| OptionWeights {
                    nonexist: all_options[t].nonexist,
                    miss: all_options[t].miss,
                    detect: meas.iter().map(|&i| all_options[t].detect[i]).collect(),
                })
                .collect();
            let (g_marg, g_total) = enumerate_exhaustive(&g_options, meas.len(), true);
            if g_total <= 0.0 {
                return Err(DegenerateUpdate);
            }
            let mut g_marg = g_marg;
            g_marg.normalize(g_total);
            for (local_t, &t) in tracks.iter().enumerate() {
                marg.nonexist[t] = g_marg.nonexist[local_t];
                marg.miss[t] = g_marg.miss[local_t];
                for (local_i, &i) in meas.iter().enumerate() {
                    marg.detect[t][i] = g_marg.detect[local_t][local_i];
                }
            }
        }
    } else {
        let (mut solved, total) = if n <= params.exhaustive_max && m <= params.exhaustive_max {
            enumerate_exhaustive(&all_options, m, false)
        } else {
            enumerate_gibbs(&all_options, m, params.gibbs_iterations, rng)
        };
        if total <= 0.0 {
            return Err(DegenerateUpdate);
        }
        solved.normalize(total);
        marg = solved;
    }

    // Marginalize back to LMB form.
    let mut tracks = Vec::with_capacity(n);
    let mut coverage = vec![0.0; m];
    for (t, track) in density.tracks().iter().enumerate() {
        let lik = &liks[t];
        let r_post = (marg.miss[t] + marg.detect[t].iter().sum::<f64>()).clamp(0.0, 1.0);
        let n_p = track.len();
        let mut weights = vec![0.0; n_p];
        if marg.miss[t] > 0.0 && lik.eta0 > 0.0 {
            let scale = marg.miss[t] / lik.eta0;
            for j in 0..n_p {
                weights[j] += scale * track.weights[j] * (1.0 - lik.pd[j]);
            }
        }
        for (i, &beta) in marg.detect[t].iter().enumerate() {
            coverage[i] += beta;
            if beta > 0.0 && lik.eta[i] > 0.0 {
                let scale = beta / lik.eta[i];
                for j in 0..n_p {
                    weights[j] += scale * track.weights[j] * lik.g[i * n_p + j];
                }
            }
        }
        let w_sum: f64 = weights.iter().sum();
        let (r_out, w_out) = if w_sum > 0.0 {
            for w in &mut weights {
                *w /= w_sum;
            }
            (r_post, weights)
        } else {
            // no posterior mass assigned existence; keep the prior cloud,
            // the track will carry (near-)zero existence
            (r_post, track.weights.clone())
        };
        tracks.push(LabeledTrack::new(
            track.label,
            r_out,
            track.states.clone(),
            w_out,
        ));
    }

    Ok(UpdateOutcome {
        posterior: LmbDensity::from_tracks(tracks),
        coverage,
    })
}

/// Misdetection-only fallback used when the full update degenerates: every
/// track takes the empty-measurement Bayes update.
pub fn misdetection_update(density: &LmbDensity, ctx: &UpdateContext) -> LmbDensity {
    let mut rng = NoRng;
    update(density, &[], ctx, &FilterParams::default(), &mut rng)
        .expect("empty-measurement update cannot degenerate")
        .posterior
}

/// The empty-measurement update never samples; this guard makes that explicit.
struct NoRng;

impl rand::RngCore for NoRng {
    fn next_u32(&mut self) -> u32 {
        unreachable!("update with Z = [] must not draw randomness")
    }
    fn next_u64(&mut self) -> u64 {
        unreachable!("update with Z = [] must not draw randomness")
    }
    fn fill_bytes(&mut self, _dest: &mut [u8]) {
        unreachable!("update with Z = [] must not draw randomness")
    }
    fn try_fill_bytes(&mut self, _dest: &mut [u8]) -> Result<(), rand::Error> {
        unreachable!("update with Z = [] must not draw randomness")
    }
}

/// Positions of measurements that no track explains well, worst-covered
/// first, capped by the birth budget. These seed the next prediction's
/// birth sites.
pub fn birth_candidate_positions(
    z: &[Measurement],
    coverage: &[f64],
    pose: &SensorPose,
    params: &FilterParams,
) -> Vec<[f64; 2]> {
    let mut poorly: Vec<(usize, f64)> = coverage
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, c)| c < params.birth_coverage_threshold)
        .collect();
    poorly.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    poorly.truncate(params.max_births_per_scan);
    poorly.sort_by_key(|&(i, _)| i);
    poorly
        .into_iter()
        .map(|(i, _)| from_sensor_frame(pose, &z[i]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::to_sensor_frame;
    use crate::lmb::estimate::eap_state;
    use crate::lmb::TrackLabel;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wide_profile() -> DetectionProfile {
        DetectionProfile {
            pd_max: 0.98,
            rho_min: 0.0,
            rho_max: 600.0,
            lambda_taper: 65.0,
            theta_max: std::f64::consts::PI,
        }
    }

    fn ctx<'a>(pose: &'a SensorPose, profile: &'a DetectionProfile, kappa: f64) -> UpdateContext<'a> {
        UpdateContext {
            pose,
            profile,
            clutter_intensity: kappa,
            noise_sigma: 5.0,
        }
    }

    fn cloud_around(x: f64, y: f64, n: usize, spread: f64) -> Vec<TargetState> {
        // deterministic ring of particles, no rng needed
        (0..n)
            .map(|j| {
                let ang = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                TargetState::new(x + spread * ang.cos(), y + spread * ang.sin(), 0.0, 0.0, 0.0)
            })
            .collect()
    }

    #[test]
    fn empty_measurement_set_matches_bayes_formula() {
        let pose = SensorPose::new(0.0, 0.0, 0.0);
        let profile = wide_profile();
        let states = cloud_around(200.0, 0.0, 64, 8.0);
        let track = LabeledTrack::from_states(TrackLabel::new(0, 0, 0), 0.8, states);
        // brute-force oracle: particle-weighted pd, then the scalar formula
        let pd_bar: f64 = track
            .states
            .iter()
            .zip(&track.weights)
            .map(|(s, w)| w * detection_probability(&profile, &pose, s.position()))
            .sum();
        let want = 0.8 * (1.0 - pd_bar) / (1.0 - 0.8 * pd_bar);

        let d = LmbDensity::from_tracks(vec![track]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = update(&d, &[], &ctx(&pose, &profile, 1e-5), &FilterParams::default(), &mut rng)
            .unwrap();
        assert_relative_eq!(out.posterior.tracks()[0].r, want, epsilon = 1e-12);
        assert_relative_eq!(out.posterior.tracks()[0].weight_sum(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn out_of_fov_track_is_untouched() {
        let pose = SensorPose::new(0.0, 0.0, 0.0);
        let profile = DetectionProfile {
            theta_max: std::f64::consts::FRAC_PI_4,
            ..wide_profile()
        };
        // directly behind the sensor
        let states = cloud_around(-300.0, 0.0, 32, 5.0);
        let track = LabeledTrack::from_states(TrackLabel::new(0, 0, 0), 0.7, states);
        let d = LmbDensity::from_tracks(vec![track.clone()]);
        let z = vec![Measurement { zx: 100.0, zy: 0.0 }];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = update(&d, &z, &ctx(&pose, &profile, 1e-5), &FilterParams::default(), &mut rng)
            .unwrap();
        let post = &out.posterior.tracks()[0];
        assert_relative_eq!(post.r, 0.7, epsilon = 1e-12);
        for (a, b) in post.weights.iter().zip(&track.weights) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_track_single_measurement_matches_two_hypothesis_oracle() {
        let pose = SensorPose::new(0.0, 0.0, 0.0);
        let profile = wide_profile();
        let states = cloud_around(250.0, 40.0, 48, 6.0);
        let track = LabeledTrack::from_states(TrackLabel::new(0, 0, 0), 0.5, states.clone());
        let z = to_sensor_frame(&pose, [250.0, 40.0]);
        let kappa = 1e-5;

        // oracle: enumerate the three hypotheses directly
        let pd: Vec<f64> = states
            .iter()
            .map(|s| detection_probability(&profile, &pose, s.position()))
            .collect();
        let w0 = 1.0 / states.len() as f64;
        let eta0: f64 = pd.iter().map(|p| w0 * (1.0 - p)).sum();
        let eta1: f64 = states
            .iter()
            .zip(&pd)
            .map(|(s, p)| w0 * p * measurement_likelihood(&pose, s.position(), &z, 5.0))
            .sum();
        let (h_non, h_miss, h_det) = (0.5, 0.5 * eta0, 0.5 * eta1 / kappa);
        let total = h_non + h_miss + h_det;
        let want_r = (h_miss + h_det) / total;

        let d = LmbDensity::from_tracks(vec![track]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = update(
            &d,
            &[z],
            &ctx(&pose, &profile, kappa),
            &FilterParams::default(),
            &mut rng,
        )
        .unwrap();
        let post = &out.posterior.tracks()[0];
        assert_relative_eq!(post.r, want_r, epsilon = 1e-12);
        assert!(post.r > 0.5, "existence should rise toward 1");
        // EAP should move toward the (noise-free) measurement location
        let prior_eap = [250.0, 40.0];
        let post_eap = eap_state(post);
        assert!((post_eap.px - prior_eap[0]).abs() < 6.0);
        // coverage: the single measurement is mostly explained by the track
        assert_relative_eq!(out.coverage[0], h_det / total, epsilon = 1e-12);
    }

    #[test]
    fn zero_clutter_forces_association() {
        let pose = SensorPose::new(0.0, 0.0, 0.0);
        let profile = wide_profile();
        let track = LabeledTrack::from_states(
            TrackLabel::new(0, 0, 0),
            0.5,
            cloud_around(250.0, 40.0, 48, 6.0),
        );
        let z = to_sensor_frame(&pose, [250.0, 40.0]);
        let d = LmbDensity::from_tracks(vec![track]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = update(&d, &[z], &ctx(&pose, &profile, 0.0), &FilterParams::default(), &mut rng)
            .unwrap();
        assert_relative_eq!(out.posterior.tracks()[0].r, 1.0, epsilon = 1e-12);
        assert_relative_eq!(out.coverage[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_clutter_unexplainable_measurement_degenerates() {
        let pose = SensorPose::new(0.0, 0.0, 0.0);
        let profile = wide_profile();
        let track = LabeledTrack::from_states(
            TrackLabel::new(0, 0, 0),
            0.5,
            cloud_around(250.0, 40.0, 16, 3.0),
        );
        let d = LmbDensity::from_tracks(vec![track]);
        // z far from every particle: likelihood underflows to exactly zero
        let z = Measurement { zx: -400.0, zy: -400.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = update(&d, &[z], &ctx(&pose, &profile, 0.0), &FilterParams::default(), &mut rng);
        assert_eq!(err.unwrap_err(), DegenerateUpdate);
    }

    #[test]
    fn gibbs_agrees_with_exhaustive_on_small_problem() {
        let pose = SensorPose::new(0.0, 0.0, 0.0);
        let profile = wide_profile();
        let tracks = vec![
            LabeledTrack::from_states(TrackLabel::new(0, 0, 0), 0.6, cloud_around(200.0, 0.0, 32, 6.0)),
            LabeledTrack::from_states(TrackLabel::new(0, 0, 1), 0.4, cloud_around(200.0, 120.0, 32, 6.0)),
            LabeledTrack::from_states(TrackLabel::new(0, 0, 2), 0.9, cloud_around(-150.0, -80.0, 32, 6.0)),
        ];
        let d = LmbDensity::from_tracks(tracks);
        let z = vec![
            to_sensor_frame(&pose, [202.0, 2.0]),
            to_sensor_frame(&pose, [198.0, 118.0]),
            Measurement { zx: 350.0, zy: -200.0 },
        ];
        let kappa = 1e-5;
        let c = ctx(&pose, &profile, kappa);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let exact = update(&d, &z, &c, &FilterParams::default(), &mut rng).unwrap();
        // force the Gibbs path
        let params = FilterParams {
            exhaustive_max: 0,
            gibbs_iterations: 4000,
            ..FilterParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let gibbs = update(&d, &z, &c, &params, &mut rng).unwrap();
        for (a, b) in exact.posterior.tracks().iter().zip(gibbs.posterior.tracks()) {
            assert_relative_eq!(a.r, b.r, epsilon = 2e-3);
        }
        for (a, b) in exact.coverage.iter().zip(&gibbs.coverage) {
            assert_relative_eq!(a, b, epsilon = 2e-3);
        }
    }

    #[test]
    fn posterior_invariants_hold() {
        let pose = SensorPose::new(0.0, 0.0, 0.0);
        let profile = wide_profile();
        let tracks = vec![
            LabeledTrack::from_states(TrackLabel::new(0, 0, 0), 0.6, cloud_around(100.0, 0.0, 40, 10.0)),
            LabeledTrack::from_states(TrackLabel::new(0, 1, 0), 0.95, cloud_around(120.0, 15.0, 40, 10.0)),
        ];
        let d = LmbDensity::from_tracks(tracks);
        let z = vec![
            to_sensor_frame(&pose, [105.0, 3.0]),
            to_sensor_frame(&pose, [118.0, 14.0]),
            Measurement { zx: 90.0, zy: -50.0 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = update(
            &d,
            &z,
            &ctx(&pose, &profile, 1.77e-5),
            &FilterParams::default(),
            &mut rng,
        )
        .unwrap();
        for t in out.posterior.tracks() {
            assert!((0.0..=1.0).contains(&t.r));
            assert_relative_eq!(t.weight_sum(), 1.0, epsilon = 1e-9);
        }
        for &c in &out.coverage {
            assert!((0.0..=1.0 + 1e-12).contains(&c));
        }
    }

    #[test]
    fn birth_candidates_pick_uncovered_measurements() {
        let pose = SensorPose::new(0.0, 0.0, 0.0);
        let z = vec![
            Measurement { zx: 100.0, zy: 0.0 },
            Measurement { zx: 200.0, zy: 50.0 },
            Measurement { zx: 300.0, zy: -50.0 },
        ];
        let coverage = vec![0.9, 0.01, 0.04];
        let params = FilterParams::default();
        let got = birth_candidate_positions(&z, &coverage, &pose, &params);
        assert_eq!(got.len(), 2);
        assert_eq!(got[0], [200.0, 50.0]);
        assert_eq!(got[1], [300.0, -50.0]);
    }
}
