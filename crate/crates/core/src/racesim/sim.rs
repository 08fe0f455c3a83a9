use serde::{Deserialize, Serialize};

use super::car::CarParams;
use super::track::Track;
use crate::policy::Policy;

/// Seconds of standing still without throttle before a lap is abandoned.
pub const STALL_SECONDS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureReason {
    None,
    FrictionViolation,
    Timeout,
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// Normalised track position.
    pub x: f64,
    pub a: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub completed: bool,
    /// Lap time in seconds; time of failure for incomplete laps.
    pub lap_time: f64,
    /// Average speed `L / T` for a completed lap, else 0.
    pub reward: f64,
    /// Arc length covered, in metres.
    pub distance: f64,
    pub failure_reason: FailureReason,
    /// One sample per step when tracing was requested.
    pub trace: Vec<TracePoint>,
}

/// Anything that picks an action from the normalised position and speed.
pub trait Controller {
    fn action(&mut self, x: f64, v: f64, dt: f64) -> f64;
}

impl Controller for &Policy {
    #[inline]
    fn action(&mut self, x: f64, _v: f64, _dt: f64) -> f64 {
        self.action_unchecked(x)
    }
}

/// Simulates one flying-start-free lap from rest.
pub fn simulate_lap(track: &Track, params: &CarParams, policy: &Policy) -> EpisodeResult {
    run_lap(track, params, &mut { policy }, false)
}

/// As [`simulate_lap`], also recording `(x, a, v)` at every step.
pub fn simulate_lap_traced(track: &Track, params: &CarParams, policy: &Policy) -> EpisodeResult {
    run_lap(track, params, &mut { policy }, true)
}

fn finish(
    completed: bool,
    lap_time: f64,
    distance: f64,
    reward: f64,
    failure_reason: FailureReason,
    trace: Vec<TracePoint>,
) -> EpisodeResult {
    EpisodeResult {
        completed,
        lap_time,
        reward,
        distance,
        failure_reason,
        trace,
    }
}

/// Fixed-step integration of the longitudinal dynamics under `controller`.
///
/// Each step queries the action at the current position, checks the
/// friction circle there, then advances speed by explicit Euler and position
/// by the trapezoid rule.
pub fn run_lap(track: &Track, params: &CarParams, controller: &mut dyn Controller, record: bool) -> EpisodeResult {
    let dt = params.timestep;
    let length = track.total_length();
    let grip2 = params.mu_g * params.mu_g;
    let stall_limit = (STALL_SECONDS / dt).round() as u64;
    let max_steps = (params.timeout / dt).floor() as u64;

    let mut trace = Vec::new();
    let mut s = 0.0f64;
    let mut v = 0.0f64;
    let mut seg = 0usize;
    let mut seg_end = track.segment_end(0);
    let mut curvature = track.segments()[0].curvature.abs();
    let mut stalled_steps = 0u64;

    for step in 0..max_steps {
        while s >= seg_end && seg + 1 < track.segments().len() {
            seg += 1;
            seg_end = track.segment_end(seg);
            curvature = track.segments()[seg].curvature.abs();
        }
        let x = (s / length).min(1.0);
        let a = controller.action(x, v, dt).clamp(-1.0, 1.0);
        if record {
            trace.push(TracePoint { x, a, v });
        }
        let t = step as f64 * dt;

        let force = if a >= 0.0 {
            if v < params.v_max_engine {
                a * params.max_drive_force
            } else {
                0.0
            }
        } else {
            a * params.max_brake_force
        };
        let mut acc = (force - params.drag_coeff * v * v) / params.mass;
        if v <= 0.0 && acc < 0.0 {
            acc = 0.0;
        }
        let lateral = v * v * curvature;
        if lateral * lateral + acc * acc > grip2 {
            return finish(false, t, s, 0.0, FailureReason::FrictionViolation, trace);
        }

        let v_new = (v + acc * dt).clamp(0.0, params.v_max_engine);
        let ds = 0.5 * (v + v_new) * dt;
        if s + ds >= length {
            let lap_time = (step as f64 + (length - s) / ds) * dt;
            if lap_time > params.timeout {
                return finish(false, params.timeout, s, 0.0, FailureReason::Timeout, trace);
            }
            return finish(true, lap_time, length, length / lap_time, FailureReason::None, trace);
        }
        s += ds;
        v = v_new;

        if v <= 0.0 && a <= 0.0 {
            stalled_steps += 1;
            if stalled_steps >= stall_limit {
                return finish(false, (step + 1) as f64 * dt, s, 0.0, FailureReason::Stalled, trace);
            }
        } else {
            stalled_steps = 0;
        }
    }
    finish(false, params.timeout, s, 0.0, FailureReason::Timeout, trace)
}
