//! Brute-force PDE solvers used to validate the evaluator, and the error
//! functionals comparing the interface model and the linearized equation
//! against full KdV.
//!
//! These solvers work in `f64` only.

mod banded;
mod mol;
mod split_step;

use rayon::prelude::*;

pub use mol::{mol_interface_solve, mol_solve, MolOptions, MolProblem, MolProfile};
pub use split_step::{kdv_split_step, kdv_split_step_with, SplitStepOptions, SplitStepProfile, RESOLUTION_LIMIT};

use crate::closed_forms::lkdv_step;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::utm::{evaluate, EvalRequest};

/// Uniform grid on `[x_min, x_max)` with `n` cells or nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    /// Power of two, at least 256.
    pub n: usize,
    /// Largest allowed time step.
    pub dt: f64,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n: usize, dt: f64) -> Result<Self> {
        let g = Self { x_min, x_max, n, dt };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min < 0.0 && self.x_max > 0.0 && self.x_min.is_finite() && self.x_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "need x_min < 0 < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.n < 256 || !self.n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n must be a power of two ≥ 256, got {}", self.n)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    /// Grid used for the full-KdV reference: `[−400, 400)` with `2^16`
    /// nodes and `dt ≤ 10⁻⁴`.
    pub fn kdv_reference() -> Self {
        Self {
            x_min: -400.0,
            x_max: 400.0,
            n: 1 << 16,
            dt: 1e-4,
        }
    }

    /// Method-of-lines grid for `params`: `[−60, 60]` and `dt = 8·10⁻³`
    /// in canonical units, with `8192` cells on the coarsest level.
    pub fn mol_reference(params: &ModelParams<f64>) -> Self {
        let sc = params.c().sqrt();
        Self {
            x_min: -60.0 / sc,
            x_max: 60.0 / sc,
            n: 8192,
            dt: 8e-3 / (sc * sc * sc),
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            n: self.n * 2,
            dt: self.dt / 2.0,
            ..*self
        }
    }
}

/// Interior window on which the error curves are reported.
pub const ERROR_WINDOW: (f64, f64) = (-10.0, 10.0);

/// Split-step tanh width used by [`error_curves`].
pub const SPLIT_STEP_WIDTH: f64 = 0.05;

/// Largest accepted difference between the split-step runs on `grid` and
/// on its refinement, relative to `a`.
pub const SPLIT_STEP_REFINEMENT_TOL: f64 = 1e-4;

/// Pointwise errors of the interface model and of the linearized equation
/// against full KdV, both divided by `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurves {
    pub grid: GridSpec,
    pub x: Vec<f64>,
    pub e_model: Vec<f64>,
    pub e_lkdv: Vec<f64>,
    pub t: f64,
    pub a: f64,
    /// Largest change of the split-step profile under refinement.
    pub refinement_difference: f64,
}

impl ErrorCurves {
    pub fn max_model(&self) -> f64 {
        self.e_model.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_lkdv(&self) -> f64 {
        self.e_lkdv.iter().copied().fold(0.0, f64::max)
    }
}

/// Errors at the lab-frame grid points in [`ERROR_WINDOW`]. The interface
/// model uses `c = 4a`; the KdV reference is certified by comparing `grid`
/// with its refinement.
pub fn error_curves(a: f64, t: f64, grid: &GridSpec) -> Result<ErrorCurves> {
    error_curves_in(a, t, grid, ERROR_WINDOW)
}

/// [`error_curves`] on an arbitrary lab-frame window.
pub fn error_curves_in(a: f64, t: f64, grid: &GridSpec, window: (f64, f64)) -> Result<ErrorCurves> {
    let (lo, hi) = window;
    if !(lo < hi && lo > grid.x_min && hi < grid.x_max) {
        return Err(Error::InvalidGrid(format!(
            "window [{lo}, {hi}] must lie inside [{}, {}]",
            grid.x_min, grid.x_max
        )));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::ParameterDomain(format!("amplitude must be positive, got {a}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::ParameterDomain(format!("t must be positive, got {t}")));
    }
    let fine_grid = grid.refined();
    let (coarse, fine) = rayon::join(
        || kdv_split_step(a, grid, t, SPLIT_STEP_WIDTH),
        || kdv_split_step(a, &fine_grid, t, SPLIT_STEP_WIDTH),
    );
    let (x, u_kdv) = coarse?.window(lo, hi);
    let (xf, uf) = fine?.window(lo, hi);
    // coarse nodes are the even fine nodes
    let refinement_difference = x
        .iter()
        .zip(&u_kdv)
        .map(|(x, u)| {
            let j = xf.iter().position(|y| (y - x).abs() < 1e-9).expect("nested grids");
            (u - uf[j]).abs()
        })
        .fold(0.0, f64::max);
    let tol = SPLIT_STEP_REFINEMENT_TOL * a;
    if !(refinement_difference <= tol) {
        return Err(Error::OracleUnconverged {
            estimate: refinement_difference,
            tolerance: tol,
        });
    }

    let params = ModelParams::new(a, 4.0 * a)?;
    let model: Vec<f64> = x
        .par_iter()
        .map(|&x| {
            // u(x, t) = q(x − ct, t)
            let req = EvalRequest::new(x - params.c() * t, t, params);
            evaluate(&req).map(|e| e.value)
        })
        .collect::<Result<_>>()?;
    let e_model = u_kdv.iter().zip(&model).map(|(k, m)| (k - m).abs() / a).collect();
    let e_lkdv = x
        .iter()
        .zip(&u_kdv)
        .map(|(&x, k)| (k - lkdv_step(x, t, a)).abs() / a)
        .collect();
    Ok(ErrorCurves {
        grid: *grid,
        x,
        e_model,
        e_lkdv,
        t,
        a,
        refinement_difference,
    })
}
