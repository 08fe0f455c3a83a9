use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point-mass car with a shared lateral/longitudinal grip budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarParams {
    /// kg
    pub mass: f64,
    /// N at full throttle
    pub max_drive_force: f64,
    /// N at full brake
    pub max_brake_force: f64,
    /// N s^2 / m^2
    pub drag_coeff: f64,
    /// Friction coefficient times gravity, m/s^2.
    pub mu_g: f64,
    /// m/s
    pub v_max_engine: f64,
    /// s
    pub timestep: f64,
    /// s
    pub timeout: f64,
}

impl Default for CarParams {
    fn default() -> Self {
        Self {
            mass: 1150.0,
            max_drive_force: 6000.0,
            max_brake_force: 9000.0,
            drag_coeff: 0.75,
            mu_g: 12.0,
            v_max_engine: 80.0,
            timestep: 0.01,
            timeout: 900.0,
        }
    }
}

impl CarParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mass", self.mass),
            ("max_drive_force", self.max_drive_force),
            ("max_brake_force", self.max_brake_force),
            ("drag_coeff", self.drag_coeff),
            ("mu_g", self.mu_g),
            ("v_max_engine", self.v_max_engine),
            ("timestep", self.timestep),
            ("timeout", self.timeout),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.timestep > 0.05 {
            return Err(Error::invalid(format!("timestep {} exceeds 0.05 s", self.timestep)));
        }
        Ok(())
    }
}

/// Highest steady speed through a bend of curvature `curvature` (sign ignored).
pub fn curvature_speed_limit(params: &CarParams, curvature: f64) -> f64 {
    let k = curvature.abs();
    if k == 0.0 {
        params.v_max_engine
    } else {
        (params.mu_g / k).sqrt().min(params.v_max_engine)
    }
}
