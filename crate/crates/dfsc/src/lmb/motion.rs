//! Target motion models shared by the filter and the ground-truth simulator.

use super::TargetState;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MotionKind {
    ConstantVelocity,
    ConstantTurn,
}

/// Motion model used by the filter's prediction step.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MotionModel {
    pub kind: MotionKind,
    /// Step length (seconds)
    pub dt: f64,
    /// White acceleration noise std dev (meters/second^2)
    pub sigma_accel: f64,
    /// Turn-rate random-walk std dev (radians/second per sqrt-second)
    pub sigma_turn: f64,
    /// Per-step survival probability
    pub survival_prob: f64,
}

impl Default for MotionModel {
    fn default() -> Self {
        Self {
            kind: MotionKind::ConstantVelocity,
            dt: 1.0,
            sigma_accel: 1.0,
            sigma_turn: 0.02,
            survival_prob: 0.99,
        }
    }
}

/// Deterministic part of the transition. With |omega| below 1e-9 the
/// constant-turn equations are replaced by their constant-velocity limit,
/// so omega = 0 reproduces CV exactly.
pub fn transition(state: &TargetState, kind: MotionKind, dt: f64) -> TargetState {
    match kind {
        MotionKind::ConstantVelocity => TargetState {
            px: state.px + state.vx * dt,
            py: state.py + state.vy * dt,
            vx: state.vx,
            vy: state.vy,
            omega: state.omega,
        },
        MotionKind::ConstantTurn => {
            let w = state.omega;
            if w.abs() < 1e-9 {
                return transition(state, MotionKind::ConstantVelocity, dt);
            }
            let (sin_wt, cos_wt) = (w * dt).sin_cos();
            TargetState {
                px: state.px + (state.vx * sin_wt - state.vy * (1.0 - cos_wt)) / w,
                py: state.py + (state.vx * (1.0 - cos_wt) + state.vy * sin_wt) / w,
                vx: state.vx * cos_wt - state.vy * sin_wt,
                vy: state.vx * sin_wt + state.vy * cos_wt,
                omega: w,
            }
        }
    }
}

/// One noisy transition draw: deterministic motion plus discretized white
/// acceleration (position gets a*dt^2/2, velocity a*dt) and, for the
/// constant-turn model, a turn-rate random walk.
pub fn step_noisy<R: Rng>(
    state: &TargetState,
    kind: MotionKind,
    dt: f64,
    sigma_accel: f64,
    sigma_turn: f64,
    rng: &mut R,
) -> TargetState {
    let mut next = transition(state, kind, dt);
    if sigma_accel > 0.0 {
        let accel = Normal::new(0.0, sigma_accel).expect("valid sigma");
        let ax = accel.sample(rng);
        let ay = accel.sample(rng);
        next.px += 0.5 * ax * dt * dt;
        next.py += 0.5 * ay * dt * dt;
        next.vx += ax * dt;
        next.vy += ay * dt;
    }
    if kind == MotionKind::ConstantTurn && sigma_turn > 0.0 {
        let turn = Normal::new(0.0, sigma_turn * dt.sqrt()).expect("valid sigma");
        next.omega += turn.sample(rng);
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cv_step_advances_position() {
        let s = TargetState::new(0.0, 0.0, 10.0, 0.0, 0.0);
        let n = transition(&s, MotionKind::ConstantVelocity, 1.0);
        assert_eq!(n, TargetState::new(10.0, 0.0, 10.0, 0.0, 0.0));
    }

    #[test]
    fn ct_with_zero_turn_rate_equals_cv() {
        let s = TargetState::new(5.0, -3.0, 8.0, 2.0, 0.0);
        let ct = transition(&s, MotionKind::ConstantTurn, 1.0);
        let cv = transition(&s, MotionKind::ConstantVelocity, 1.0);
        assert_eq!(ct, cv);
    }

    #[test]
    fn ct_turn_preserves_speed() {
        let s = TargetState::new(0.0, 0.0, 10.0, 0.0, 0.1);
        let n = transition(&s, MotionKind::ConstantTurn, 1.0);
        let speed = (n.vx * n.vx + n.vy * n.vy).sqrt();
        assert_relative_eq!(speed, 10.0, epsilon = 1e-12);
        // quarter-period check: after pi/(2*0.1) seconds velocity rotates 90 degrees
        let mut state = s;
        let steps = 100;
        let dt = std::f64::consts::FRAC_PI_2 / 0.1 / steps as f64;
        for _ in 0..steps {
            state = transition(&state, MotionKind::ConstantTurn, dt);
        }
        assert_relative_eq!(state.vx, 0.0, epsilon = 1e-9);
        assert_relative_eq!(state.vy, 10.0, epsilon = 1e-9);
    }
}
