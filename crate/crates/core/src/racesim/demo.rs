//! Constant-speed PI demonstration driver.

use super::car::{curvature_speed_limit, CarParams};
use super::sim::{run_lap, Controller, EpisodeResult, FailureReason};
use super::track::Track;
use crate::error::{Error, Result};
use crate::policy::Demonstration;

pub const DEFAULT_KP: f64 = 0.5;
pub const DEFAULT_KI: f64 = 0.05;

/// Speed-hold PI law `a = clamp(kp e + ki * integral(e), -1, 1)` with the
/// error integral clamped to `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct SpeedHold {
    pub target: f64,
    pub kp: f64,
    pub ki: f64,
    integral: f64,
}

impl SpeedHold {
    pub fn new(target: f64) -> Self {
        Self {
            target,
            kp: DEFAULT_KP,
            ki: DEFAULT_KI,
            integral: 0.0,
        }
    }
}

impl Controller for SpeedHold {
    fn action(&mut self, _x: f64, v: f64, dt: f64) -> f64 {
        let e = self.target - v;
        self.integral = (self.integral + e * dt).clamp(-1.0, 1.0);
        (self.kp * e + self.ki * self.integral).clamp(-1.0, 1.0)
    }
}

/// Drives one lap at `v_target` and returns the recorded demonstration and
/// the lap result.
pub fn demo_lap(track: &Track, params: &CarParams, v_target: f64) -> Result<(Demonstration, EpisodeResult)> {
    params.validate()?;
    if !(v_target > 0.0 && v_target.is_finite()) {
        return Err(Error::InfeasibleDemonstration(format!(
            "target speed must be positive, got {v_target}"
        )));
    }
    for (i, seg) in track.segments().iter().enumerate() {
        let limit = curvature_speed_limit(params, seg.curvature);
        if v_target >= limit {
            return Err(Error::InfeasibleDemonstration(format!(
                "target {v_target} m/s is not below the {limit:.3} m/s limit of segment {}",
                i + 1
            )));
        }
    }
    let mut pi = SpeedHold::new(v_target);
    let result = run_lap(track, params, &mut pi, true);
    if !result.completed {
        return Err(Error::InfeasibleDemonstration(format!(
            "speed-hold lap failed ({:?}) after {:.1} m",
            result.failure_reason, result.distance
        )));
    }
    debug_assert_eq!(result.failure_reason, FailureReason::None);
    let positions = result.trace.iter().map(|t| t.x).collect();
    let actions = result.trace.iter().map(|t| t.a).collect();
    let demo = Demonstration::from_recording(positions, actions)?;
    Ok((demo, result))
}

pub fn demo_controller(track: &Track, params: &CarParams, v_target: f64) -> Result<Demonstration> {
    demo_lap(track, params, v_target).map(|(d, _)| d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::racesim::track::Segment;

    fn straight() -> Track {
        Track::new(
            vec![Segment {
                length: 1000.0,
                curvature: 0.0,
            }],
            None,
        )
        .unwrap()
    }

    #[test]
    fn holds_speed_on_straight() {
        let p = CarParams::default();
        let (demo, lap) = demo_lap(&straight(), &p, 15.0).unwrap();
        // an ideal launch at full drive force still loses v / (2 F / m) seconds
        let launch = 15.0 / (2.0 * p.max_drive_force / p.mass);
        let ideal = 1000.0 / (1000.0 / 15.0 + launch);
        assert!((ideal - lap.reward).abs() / ideal < 0.005, "{} vs {ideal}", lap.reward);
        assert!((lap.reward - 15.0).abs() / 15.0 < 0.025);
        let n = demo.len();
        let tail = &demo.actions()[n / 2..];
        let balance = p.drag_coeff * 15.0 * 15.0 / p.max_drive_force;
        for a in tail {
            assert!((a - balance).abs() < 1e-3, "{a} vs {balance}");
        }
    }

    #[test]
    fn positions_advance() {
        let demo = demo_controller(&Track::bundled("oval-500").unwrap(), &CarParams::default(), 15.0).unwrap();
        let x = demo.positions();
        assert_eq!(x[0], 0.0);
        assert!(*x.last().unwrap() > 0.99);
        // non-decreasing, and strictly increasing once the car is moving
        assert!(x.windows(2).all(|w| w[1] >= w[0]));
        assert!(x[1..].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_target_above_corner_limit() {
        let t = Track::bundled("oval-500").unwrap();
        let p = CarParams::default();
        assert!(matches!(demo_controller(&t, &p, 30.0), Err(Error::InfeasibleDemonstration(_))));
        assert!(demo_controller(&t, &p, 0.0).is_err());
    }
}
