//! Sensor kinematics, field-of-view detection model, and measurement generation.
//!
//! A sensor sits at a planar position with an orientation angle. Its field of
//! view is a range-limited angular sector centered on the orientation axis;
//! detection probability tapers off with range following a tanh profile.
//! Measurements are relative displacements expressed in the sensor frame.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Normalizes an angle into the half-open interval (-pi, pi].
pub fn normalize_angle(angle: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut a = angle.rem_euclid(two_pi);
    if a > std::f64::consts::PI {
        a -= two_pi;
    }
    a
}

/// Sensor position and orientation in the global frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorPose {
    /// Position x (meters)
    pub px: f64,
    /// Position y (meters)
    pub py: f64,
    /// Orientation angle (radians), normalized to (-pi, pi]
    pub theta: f64,
}

impl SensorPose {
    pub fn new(px: f64, py: f64, theta: f64) -> Self {
        Self {
            px,
            py,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> [f64; 2] {
        [self.px, self.py]
    }
}

/// One movement option from a sensor's finite action catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlCommand {
    /// Translation x (meters)
    pub dx: f64,
    /// Translation y (meters)
    pub dy: f64,
    /// Rotation (radians)
    pub dtheta: f64,
    /// Index into the action catalogue; unique within one catalogue
    pub id: usize,
}

impl ControlCommand {
    pub fn stay(id: usize) -> Self {
        Self {
            dx: 0.0,
            dy: 0.0,
            dtheta: 0.0,
            id,
        }
    }

    pub fn is_stay(&self) -> bool {
        self.dx == 0.0 && self.dy == 0.0 && self.dtheta == 0.0
    }
}

/// Applies a control command to a pose: translate, rotate, renormalize.
pub fn apply_command(pose: &SensorPose, cmd: &ControlCommand) -> SensorPose {
    SensorPose::new(pose.px + cmd.dx, pose.py + cmd.dy, pose.theta + cmd.dtheta)
}

/// Range/angle limits and taper of the detection probability profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionProfile {
    /// Plateau detection probability, in (0, 1]
    pub pd_max: f64,
    /// Minimum detection range (meters)
    pub rho_min: f64,
    /// Maximum detection range (meters)
    pub rho_max: f64,
    /// Range taper length scale (meters)
    pub lambda_taper: f64,
    /// Angular half-width of the field of view (radians), in (0, pi]
    pub theta_max: f64,
}

impl DetectionProfile {
    /// Checks the structural constraints on the profile parameters.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.pd_max > 0.0 && self.pd_max <= 1.0) {
            return Err(format!("pd_max must be in (0, 1], got {}", self.pd_max));
        }
        if !(self.rho_min >= 0.0 && self.rho_min < self.rho_max) {
            return Err(format!(
                "need 0 <= rho_min < rho_max, got rho_min={} rho_max={}",
                self.rho_min, self.rho_max
            ));
        }
        if !(self.lambda_taper > 0.0) {
            return Err(format!(
                "lambda_taper must be positive, got {}",
                self.lambda_taper
            ));
        }
        if !(self.theta_max > 0.0 && self.theta_max <= std::f64::consts::PI) {
            return Err(format!(
                "theta_max must be in (0, pi], got {}",
                self.theta_max
            ));
        }
        Ok(())
    }

    /// Area of the field-of-view sector (meters squared).
    pub fn fov_area(&self) -> f64 {
        self.theta_max * (self.rho_max * self.rho_max - self.rho_min * self.rho_min)
    }
}

/// Relative displacement of a target expressed in the sensor frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Displacement along the sensor orientation axis (meters)
    pub zx: f64,
    /// Displacement across the sensor orientation axis (meters)
    pub zy: f64,
}

/// Rotates a target's global displacement into the sensor frame.
///
/// The sensor-frame x axis points along the sensor orientation, so a target
/// dead ahead at range r maps to (r, 0).
pub fn to_sensor_frame(pose: &SensorPose, target_xy: [f64; 2]) -> Measurement {
    let dx = target_xy[0] - pose.px;
    let dy = target_xy[1] - pose.py;
    let (sin_t, cos_t) = pose.theta.sin_cos();
    Measurement {
        zx: cos_t * dx + sin_t * dy,
        zy: -sin_t * dx + cos_t * dy,
    }
}

/// Inverse of [`to_sensor_frame`]: recovers the global position.
pub fn from_sensor_frame(pose: &SensorPose, z: &Measurement) -> [f64; 2] {
    let (sin_t, cos_t) = pose.theta.sin_cos();
    [
        pose.px + cos_t * z.zx - sin_t * z.zy,
        pose.py + sin_t * z.zx + cos_t * z.zy,
    ]
}

/// Detection probability of a target, tanh-tapered in range and hard-limited
/// in bearing. Zero on and outside the field-of-view boundary.
pub fn detection_probability(
    profile: &DetectionProfile,
    pose: &SensorPose,
    target_xy: [f64; 2],
) -> f64 {
    let z = to_sensor_frame(pose, target_xy);
    let rho = (z.zx * z.zx + z.zy * z.zy).sqrt();
    let theta = z.zy.atan2(z.zx);
    if theta.abs() > profile.theta_max || rho > profile.rho_max || rho < profile.rho_min {
        return 0.0;
    }
    let num = ((profile.rho_max - rho) / profile.lambda_taper).tanh();
    let den = ((profile.rho_max - profile.rho_min) / profile.lambda_taper).tanh();
    profile.pd_max * num / den
}

/// Gaussian measurement likelihood with diagonal covariance sigma^2 * I.
pub fn measurement_likelihood(
    pose: &SensorPose,
    target_xy: [f64; 2],
    z: &Measurement,
    noise_sigma: f64,
) -> f64 {
    debug_assert!(noise_sigma > 0.0);
    let pred = to_sensor_frame(pose, target_xy);
    let dx = z.zx - pred.zx;
    let dy = z.zy - pred.zy;
    let var = noise_sigma * noise_sigma;
    (-(dx * dx + dy * dy) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var)
}

/// Draws a Poisson-distributed count (Knuth's method; fine for small means).
pub fn sample_poisson<R: Rng>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let limit = (-mean).exp();
    let mut count = 0usize;
    let mut p = 1.0;
    loop {
        p *= rng.gen::<f64>();
        if p <= limit {
            return count;
        }
        count += 1;
    }
}

/// Simulates one scan: independent detections of each target plus Poisson
/// clutter uniform over the field-of-view sector, in shuffled order.
pub fn generate_detections<R: Rng>(
    pose: &SensorPose,
    profile: &DetectionProfile,
    targets: &[[f64; 2]],
    noise_sigma: f64,
    clutter_rate: f64,
    rng: &mut R,
) -> Vec<Measurement> {
    let mut out = Vec::new();
    let noise = if noise_sigma > 0.0 {
        Some(Normal::new(0.0, noise_sigma).expect("valid sigma"))
    } else {
        None
    };
    for &t in targets {
        let pd = detection_probability(profile, pose, t);
        if pd > 0.0 && rng.gen::<f64>() < pd {
            let mut z = to_sensor_frame(pose, t);
            if let Some(n) = &noise {
                z.zx += n.sample(rng);
                z.zy += n.sample(rng);
            }
            out.push(z);
        }
    }
    let n_clutter = sample_poisson(clutter_rate, rng);
    for _ in 0..n_clutter {
        let theta = rng.gen_range(-profile.theta_max..=profile.theta_max);
        let r2 = rng.gen_range(profile.rho_min * profile.rho_min..=profile.rho_max * profile.rho_max);
        let rho = r2.sqrt();
        out.push(Measurement {
            zx: rho * theta.cos(),
            zy: rho * theta.sin(),
        });
    }
    // Fisher-Yates; detections must not arrive target-sorted.
    for i in (1..out.len()).rev() {
        let j = rng.gen_range(0..=i);
        out.swap(i, j);
    }
    out
}
