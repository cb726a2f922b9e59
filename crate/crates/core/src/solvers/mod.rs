//! Reconstruction of a spectral cube from one coded measurement.
//!
//! Both solvers target `½‖I − Hf‖² + τ·TV(f)` with TV applied to each
//! spectral band independently.

mod gaptv;
mod tv;
mod twist;

use serde::{Deserialize, Serialize};

pub use gaptv::{default_tv_weight, gaptv_solve, GapTvConfig};
pub use tv::{tv_denoise, tv_norm, tv_norm_cube};
pub use twist::{default_tau, twist_solve, TwistConfig};

use crate::cube::{Measurement, SpectralCube};
use crate::error::Result;
use crate::optics::SystemOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIters,
    Tolerance,
    /// A non-finite value appeared; the last finite iterate is returned.
    Diverged,
    /// `HHᵀ` is identically zero, so the measurement carries no information.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Regularization weight the objective was evaluated with.
    pub tau: f64,
    /// Objective of the starting point.
    pub initial_objective: f64,
    /// Objective after each iteration.
    pub objective_trace: Vec<f64>,
    /// `‖I − Hf‖` after each iteration.
    pub residual_trace: Vec<f64>,
    pub iterations_run: usize,
    pub stop_reason: StopReason,
    pub wall_time_s: f64,
}

/// `½‖I − Hf‖² + tau·TV(f)`.
pub fn objective(op: &SystemOperator, meas: &Measurement, f: &SpectralCube, tau: f64) -> Result<f64> {
    op.check_cube(f)?;
    op.check_measurement(meas)?;
    let mut hf = vec![0.0; op.detector_len()];
    op.forward_into(f.data(), &mut hf);
    Ok(objective_from_parts(meas.data(), &hf, f.data(), op.nx(), op.ny(), tau))
}

pub(crate) fn objective_from_parts(meas: &[f64], hf: &[f64], f: &[f64], nx: usize, ny: usize, tau: f64) -> f64 {
    let fidelity = 0.5 * sq_dist(meas, hf);
    let reg = if tau > 0.0 { tau * tv_norm_cube(f, nx, ny) } else { 0.0 };
    fidelity + reg
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
