//! Time integration on surfaces: theta-method heat stepping, IMEX-BDF2 for
//! the reaction-diffusion system, and error/order measurement for
//! manufactured-solution studies.

mod heat;
mod manufactured;
mod rds;

pub use heat::{run_heat, theta_step, HeatRun, HeatRunOptions, ThetaScheme};
pub use manufactured::{laplace_beltrami_analytic, ProductSineField};
pub use rds::{bdf2_run, reaction_point, reaction_terms, RdsForcing, RdsParams, RdsRun, RdsRunOptions};

use crate::sparse::{l2_norm, SolveError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(
        "explicit part violates the stability bound: tau (1-theta) |L| = {value:.3e} > 2"
    )]
    ExplicitlyUnstable { value: f64 },
    #[error("time step must be positive (got {0})")]
    NonPositiveStep(f64),
    #[error("theta must lie in [0, 1] (got {0})")]
    ThetaOutOfRange(f64),
    #[error("solution diverged (non-finite values) at step {step}")]
    Diverged { step: usize },
    #[error("state vectors have length {got}, operator dimension is {dim}")]
    StateLength { dim: usize, got: usize },
    #[error("reaction parameter beta must be nonzero")]
    ZeroBeta,
    #[error("diffusion coefficients must be positive (got delta_u={du}, delta_v={dv})")]
    NonPositiveDiffusion { du: f64, dv: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("relative error is undefined for an identically zero exact solution")]
    ZeroReference,
    #[error("order estimation needs at least two points (got {0})")]
    TooFewPoints(usize),
    #[error("order estimation needs positive errors and spacings")]
    NonPositiveData,
}

/// One time level of a simulation.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub step: usize,
    pub u: Vec<f64>,
    /// Second species; absent for heat runs.
    pub v: Option<Vec<f64>>,
}

/// Relative l2 error `|numeric - exact|_2 / |exact|_2`.
pub fn relative_l2_error(numeric: &[f64], exact: &[f64]) -> Result<f64, MeasureError> {
    assert_eq!(numeric.len(), exact.len(), "error inputs must have equal shape");
    let denom = l2_norm(exact);
    if denom == 0.0 {
        return Err(MeasureError::ZeroReference);
    }
    let diff: Vec<f64> = numeric.iter().zip(exact).map(|(a, b)| a - b).collect();
    Ok(l2_norm(&diff) / denom)
}

/// Combined error for the two-species system: the root-sum-square of the
/// per-species relative errors divided by the number of equations.
pub fn combined_rds_error(err_u: f64, err_v: f64) -> f64 {
    (err_u * err_u + err_v * err_v).sqrt() / 2.0
}

/// Least-squares slope of `log(error)` against `log(spacing)`.
pub fn estimate_order(errors: &[f64], spacings: &[f64]) -> Result<f64, MeasureError> {
    assert_eq!(errors.len(), spacings.len(), "order inputs must have equal shape");
    if errors.len() < 2 {
        return Err(MeasureError::TooFewPoints(errors.len()));
    }
    if errors.iter().chain(spacings).any(|&v| !(v > 0.0)) {
        return Err(MeasureError::NonPositiveData);
    }
    let lx: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_agreement_has_zero_error() {
        let v = vec![1.0, -2.0, 3.0];
        assert_eq!(relative_l2_error(&v, &v).unwrap(), 0.0);
    }

    #[test]
    fn proportional_perturbation_error() {
        let exact = vec![1.0, -2.0, 0.5, 4.0];
        let numeric: Vec<f64> = exact.iter().map(|v| 1.01 * v).collect();
        let e = relative_l2_error(&numeric, &exact).unwrap();
        assert!((e - 0.01).abs() < 1e-14, "error {e}");
    }

    #[test]
    fn error_matches_norm_ratio_oracle() {
        let exact = vec![0.3, -1.7, 2.2, 0.9];
        let numeric = vec![0.31, -1.65, 2.4, 0.7];
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for (a, b) in numeric.iter().zip(&exact) {
            num += (a - b) * (a - b);
            den += b * b;
        }
        let oracle = (num / den).sqrt();
        let e = relative_l2_error(&numeric, &exact).unwrap();
        assert!((e - oracle).abs() <= 1e-15);
    }

    #[test]
    fn zero_reference_is_rejected() {
        assert_eq!(
            relative_l2_error(&[1.0], &[0.0]),
            Err(MeasureError::ZeroReference)
        );
    }

    #[test]
    fn exact_power_laws_recover_orders() {
        let o2 = estimate_order(&[1e-2, 2.5e-3], &[0.1, 0.05]).unwrap();
        assert!((o2 - 2.0).abs() < 1e-12, "order {o2}");
        let o1 = estimate_order(&[1e-1, 5e-2], &[0.1, 0.05]).unwrap();
        assert!((o1 - 1.0).abs() < 1e-12, "order {o1}");
    }

    #[test]
    fn noisy_power_law_stays_near_two() {
        // exact order-2 data with +-5% deterministic perturbation
        let hs = [0.2, 0.1, 0.05, 0.025, 0.0125];
        let noise = [1.05, 0.95, 1.04, 0.97, 1.02];
        let errs: Vec<f64> = hs.iter().zip(noise).map(|(h, w)| 3.0 * h * h * w).collect();
        let order = estimate_order(&errs, &hs).unwrap();
        assert!((1.8..=2.2).contains(&order), "order {order}");
    }

    #[test]
    fn too_few_points_is_rejected() {
        assert_eq!(estimate_order(&[1.0], &[0.1]), Err(MeasureError::TooFewPoints(1)));
    }

    #[test]
    fn combined_error_uses_two_equations() {
        assert_eq!(combined_rds_error(0.0, 0.0), 0.0);
        let e = combined_rds_error(3e-3, 4e-3);
        assert!((e - 2.5e-3).abs() < 1e-18);
    }
}
