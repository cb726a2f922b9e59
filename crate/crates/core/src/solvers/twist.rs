//! Two-step iterative shrinkage/thresholding.
//!
//! With `Γ(f) = Ψ(f + s·Hᵀ(I − Hf))`:
//!
//! ```text
//! f₀ = Hᵀ I
//! f₁ = Γ(f₀)
//! f_{t+1} = (1 − α) f_{t−1} + (α − β) f_t + β Γ(f_t)
//! ```
//!
//! `Ψ` is per-band TV denoising with weight `s·τ`. The step `s = 1/‖H‖²` is
//! the inverse of the largest diagonal entry of `HHᵀ`, which is exactly
//! `‖H‖²` because `HHᵀ` is diagonal for this operator; for a unit-norm `H`
//! it is 1.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::tv::tv_denoise_cube;
use super::{objective_from_parts, sq_dist, SolveReport, StopReason};
use crate::cube::{Measurement, SpectralCube};
use crate::error::{Error, Result};
use crate::optics::SystemOperator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistConfig {
    /// Regularization weight; `None` selects [`default_tau`].
    pub tau: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub max_iters: usize,
    pub rel_obj_tol: f64,
    pub tv_inner_iters: usize,
}

impl Default for TwistConfig {
    fn default() -> Self {
        Self { tau: None, alpha: 1.9, beta: 1.0, max_iters: 200, rel_obj_tol: 1e-5, tv_inner_iters: 10 }
    }
}

impl TwistConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(tau) = self.tau {
            if !(tau >= 0.0) || !tau.is_finite() {
                return Err(Error::InvalidParameter(format!("tau {tau} must be finite and >= 0")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::InvalidParameter(format!("alpha {} must lie in (0, 2)", self.alpha)));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta {} must be > 0", self.beta)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.rel_obj_tol >= 0.0) {
            return Err(Error::InvalidParameter("rel_obj_tol must be >= 0".into()));
        }
        Ok(())
    }
}

/// `0.01 · max |Hᵀ I|`.
pub fn default_tau(op: &SystemOperator, meas: &Measurement) -> Result<f64> {
    let back = op.adjoint(meas)?;
    Ok(0.01 * back.data().iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

struct Twist<'a> {
    op: &'a SystemOperator,
    meas: &'a [f64],
    step: f64,
    tau: f64,
    inner: usize,
    scratch: Vec<f64>,
}

impl Twist<'_> {
    /// `Γ(f)` given `hf = H f`.
    fn gamma(&mut self, f: &[f64], hf: &[f64], out: &mut [f64]) {
        for ((r, m), h) in self.scratch.iter_mut().zip(self.meas).zip(hf) {
            *r = m - h;
        }
        self.op.adjoint_into(&self.scratch, out);
        for (o, v) in out.iter_mut().zip(f) {
            *o = v + self.step * *o;
        }
        tv_denoise_cube(out, self.op.nx(), self.op.ny(), self.step * self.tau, self.inner);
    }

    fn objective(&self, f: &[f64], hf: &[f64]) -> f64 {
        objective_from_parts(self.meas, hf, f, self.op.nx(), self.op.ny(), self.tau)
    }
}

pub fn twist_solve(op: &SystemOperator, meas: &Measurement, cfg: &TwistConfig) -> Result<(SpectralCube, SolveReport)> {
    cfg.validate()?;
    op.check_measurement(meas)?;
    let start = Instant::now();
    let tau = match cfg.tau {
        Some(t) => t,
        None => default_tau(op, meas)?,
    };
    let (nx, ny) = (op.nx(), op.ny());
    let n = op.cube_len();
    let norm_sq = op.diag_hht().into_iter().fold(0.0f64, f64::max);

    let mut prev = vec![0.0; n];
    op.adjoint_into(meas.data(), &mut prev);
    let mut hf = vec![0.0; op.detector_len()];
    op.forward_into(&prev, &mut hf);

    let mut state = Twist {
        op,
        meas: meas.data(),
        step: if norm_sq > 0.0 { 1.0 / norm_sq } else { 0.0 },
        tau,
        inner: cfg.tv_inner_iters,
        scratch: vec![0.0; op.detector_len()],
    };
    let initial_objective = state.objective(&prev, &hf);
    let mut report = SolveReport {
        tau,
        initial_objective,
        objective_trace: Vec::with_capacity(cfg.max_iters),
        residual_trace: Vec::with_capacity(cfg.max_iters),
        iterations_run: 0,
        stop_reason: StopReason::MaxIters,
        wall_time_s: 0.0,
    };
    if norm_sq == 0.0 {
        report.stop_reason = StopReason::Degenerate;
        report.wall_time_s = start.elapsed().as_secs_f64();
        return Ok((SpectralCube::from_parts(nx, ny, op.grid().clone(), prev), report));
    }

    let (alpha, beta) = (cfg.alpha, cfg.beta);
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    state.gamma(&prev, &hf, &mut cur);
    let mut last_obj = initial_objective;
    let mut finished = false;
    for t in 1..=cfg.max_iters {
        if t > 1 {
            state.gamma(&cur, &hf, &mut next);
            for ((nv, &p), &c) in next.iter_mut().zip(&prev).zip(&cur) {
                *nv = (1.0 - alpha) * p + (alpha - beta) * c + beta * *nv;
            }
            if next.iter().any(|v| !v.is_finite()) {
                report.stop_reason = StopReason::Diverged;
                finished = true;
            } else {
                std::mem::swap(&mut prev, &mut cur);
                std::mem::swap(&mut cur, &mut next);
            }
        } else if cur.iter().any(|v| !v.is_finite()) {
            cur.copy_from_slice(&prev);
            report.stop_reason = StopReason::Diverged;
            finished = true;
        }
        if finished {
            break;
        }
        op.forward_into(&cur, &mut hf);
        let obj = state.objective(&cur, &hf);
        report.objective_trace.push(obj);
        report.residual_trace.push(sq_dist(meas.data(), &hf).sqrt());
        report.iterations_run = t;
        if !obj.is_finite() {
            report.stop_reason = StopReason::Diverged;
            break;
        }
        let change = (obj - last_obj).abs();
        if change == 0.0 || (last_obj > 0.0 && change / last_obj < cfg.rel_obj_tol) {
            report.stop_reason = StopReason::Tolerance;
            break;
        }
        last_obj = obj;
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok((SpectralCube::from_parts(nx, ny, op.grid().clone(), cur), report))
}
