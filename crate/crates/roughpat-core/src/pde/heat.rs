//! Theta-method time stepping for the surface heat equation.
//!
//! One step solves
//!
//! ```text
//! (I - tau theta L) u' = u + tau theta h' + tau (1-theta) (L u + h)
//! ```
//!
//! The system matrix is factored once per scheme and reused across steps.

use super::{PdeError, SimState};
use crate::sparse::{max_norm, CsrMatrix, FactorizedMatrix};

/// A theta-method stepper with a cached factorization.
pub struct ThetaScheme<'a> {
    lb: &'a CsrMatrix,
    theta: f64,
    tau: f64,
    system: Option<FactorizedMatrix>,
}

impl<'a> ThetaScheme<'a> {
    pub fn new(lb: &'a CsrMatrix, theta: f64, tau: f64) -> Result<Self, PdeError> {
        if !(tau > 0.0) {
            return Err(PdeError::NonPositiveStep(tau));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(PdeError::ThetaOutOfRange(theta));
        }
        if theta < 1.0 {
            // spectral radius bounded by the infinity norm
            let value = tau * (1.0 - theta) * lb.norm_inf();
            if value > 2.0 {
                return Err(PdeError::ExplicitlyUnstable { value });
            }
        }
        let system = if theta > 0.0 {
            Some(FactorizedMatrix::new(lb.scaled_add_identity(-tau * theta, 1.0))?)
        } else {
            None
        };
        Ok(ThetaScheme { lb, theta, tau, system })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Advances one step. `source_now` and `source_next` are the nodal source
    /// at the current and next time level (`None` meaning zero).
    pub fn step(
        &self,
        u: &[f64],
        source_now: Option<&[f64]>,
        source_next: Option<&[f64]>,
    ) -> Result<Vec<f64>, PdeError> {
        let dim = self.lb.rows();
        if u.len() != dim {
            return Err(PdeError::StateLength { dim, got: u.len() });
        }
        let mut rhs = u.to_vec();
        if self.theta < 1.0 {
            let w = self.tau * (1.0 - self.theta);
            let lu = self.lb.apply(u);
            for (r, l) in rhs.iter_mut().zip(&lu) {
                *r += w * l;
            }
            if let Some(h) = source_now {
                for (r, s) in rhs.iter_mut().zip(h) {
                    *r += w * s;
                }
            }
        }
        if self.theta > 0.0 {
            if let Some(h) = source_next {
                let w = self.tau * self.theta;
                for (r, s) in rhs.iter_mut().zip(h) {
                    *r += w * s;
                }
            }
        }
        match &self.system {
            Some(fact) => Ok(fact.solve(&rhs)?),
            None => Ok(rhs),
        }
    }
}

/// Single theta step against a freshly assembled system.
pub fn theta_step(
    lb: &CsrMatrix,
    u: &[f64],
    theta: f64,
    tau: f64,
    source_now: Option<&[f64]>,
    source_next: Option<&[f64]>,
) -> Result<Vec<f64>, PdeError> {
    ThetaScheme::new(lb, theta, tau)?.step(u, source_now, source_next)
}

#[derive(Debug, Clone, Default)]
pub struct HeatRunOptions {
    /// Record a snapshot every this many steps.
    pub snapshot_every: Option<usize>,
}

#[derive(Debug)]
pub struct HeatRun {
    pub state: SimState,
    pub steps: usize,
    pub t_final: f64,
    /// Max norm of the state after every step, starting from the initial
    /// condition.
    pub max_norms: Vec<f64>,
    /// Whether the max norm was non-increasing across all steps.
    pub max_norm_monotone: bool,
    pub snapshots: Vec<SimState>,
}

/// Integrates the heat equation to `t_end` (rounded to a whole number of
/// steps). `source(t)` returns the nodal source at time `t`.
pub fn run_heat(
    lb: &CsrMatrix,
    initial: &[f64],
    theta: f64,
    tau: f64,
    t_end: f64,
    source: Option<&dyn Fn(f64) -> Vec<f64>>,
    opts: &HeatRunOptions,
) -> Result<HeatRun, PdeError> {
    let scheme = ThetaScheme::new(lb, theta, tau)?;
    let steps = (t_end / tau).round().max(0.0) as usize;
    let mut u = initial.to_vec();
    let mut max_norms = vec![max_norm(&u)];
    let mut monotone = true;
    let mut snapshots = Vec::new();
    let mut source_now = source.map(|f| f(0.0));
    for j in 0..steps {
        let t_next = (j + 1) as f64 * tau;
        let source_next = source.map(|f| f(t_next));
        u = scheme.step(&u, source_now.as_deref(), source_next.as_deref())?;
        if u.iter().any(|v| !v.is_finite()) {
            return Err(PdeError::Diverged { step: j + 1 });
        }
        let norm = max_norm(&u);
        if norm > *max_norms.last().unwrap() {
            monotone = false;
        }
        max_norms.push(norm);
        source_now = source_next;
        if let Some(every) = opts.snapshot_every {
            if every > 0 && (j + 1) % every == 0 {
                snapshots.push(SimState { t: t_next, step: j + 1, u: u.clone(), v: None });
            }
        }
    }
    let t_final = steps as f64 * tau;
    Ok(HeatRun {
        state: SimState { t: t_final, step: steps, u, v: None },
        steps,
        t_final,
        max_norms,
        max_norm_monotone: monotone,
        snapshots,
    })
}
