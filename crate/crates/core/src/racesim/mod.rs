//! Longitudinal point-mass lap simulator on a curvature-annotated track.
//!
//! The policy sees only the normalised arc position. Each corner imposes a
//! lateral acceleration `v^2 * kappa` that shares the tyre budget `mu_g`
//! with the longitudinal acceleration; leaving that friction circle ends the
//! lap with zero reward.

pub mod car;
pub mod demo;
pub mod sim;
pub mod track;

pub use car::{curvature_speed_limit, CarParams};
pub use demo::{demo_controller, demo_lap, SpeedHold};
pub use sim::{run_lap, simulate_lap, simulate_lap_traced, Controller, EpisodeResult, FailureReason, TracePoint};
pub use track::{Segment, Track, BUNDLED};
