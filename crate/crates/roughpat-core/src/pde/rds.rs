//! IMEX-BDF2 integration of the two-species reaction-diffusion system.
//!
//! Diffusion is implicit, reaction explicit via extrapolation:
//!
//! ```text
//! 3U' - 2 tau du L U' = 4 tau f_u(U, V) - 2 tau f_u(U-, V-) + 4U - U-
//! 3V' - 2 tau dv L V' = 4 tau f_v(U, V) - 2 tau f_v(U-, V-) + 4V - V-
//! ```
//!
//! The two systems share no unknowns and their matrices are constant in
//! time, so each is factored once and reused for every step. The first step
//! is bootstrapped with one IMEX backward-Euler step.

use super::{PdeError, SimState};
use crate::sparse::{l2_norm, CsrMatrix, FactorizedMatrix};

/// Constants of the reaction-diffusion model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdsParams {
    pub delta_u: f64,
    pub delta_v: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub xi1: f64,
    pub xi2: f64,
}

impl RdsParams {
    pub fn new(
        delta_u: f64,
        delta_v: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        xi1: f64,
        xi2: f64,
    ) -> Result<Self, PdeError> {
        if beta == 0.0 {
            return Err(PdeError::ZeroBeta);
        }
        if !(delta_u > 0.0 && delta_v > 0.0) {
            return Err(PdeError::NonPositiveDiffusion { du: delta_u, dv: delta_v });
        }
        Ok(RdsParams { delta_u, delta_v, alpha, beta, gamma, xi1, xi2 })
    }

    /// Spot-forming parameter set.
    pub fn spots() -> Self {
        RdsParams {
            delta_v: 1e-3,
            delta_u: 0.516 * 1e-3,
            alpha: 0.899,
            beta: -0.91,
            gamma: -0.899,
            xi1: 0.02,
            xi2: 0.2,
        }
    }

    /// Stripe-forming parameter set.
    pub fn stripes() -> Self {
        RdsParams { xi1: 3.5, xi2: 0.0, ..Self::spots() }
    }
}

/// Reaction terms at a single point.
#[inline]
pub fn reaction_point(u: f64, v: f64, p: &RdsParams) -> (f64, f64) {
    let fu = p.alpha * u * (1.0 - p.xi1 * v * v) + v * (1.0 - p.xi2 * u);
    let fv = p.beta * v * (1.0 + p.alpha * p.xi1 / p.beta * u * v) + u * (p.gamma + p.xi2 * v);
    (fu, fv)
}

/// Elementwise reaction terms for nodal vectors.
pub fn reaction_terms(u: &[f64], v: &[f64], p: &RdsParams) -> Result<(Vec<f64>, Vec<f64>), PdeError> {
    if p.beta == 0.0 {
        return Err(PdeError::ZeroBeta);
    }
    assert_eq!(u.len(), v.len(), "species vectors must have equal length");
    let mut fu = Vec::with_capacity(u.len());
    let mut fv = Vec::with_capacity(u.len());
    for (&a, &b) in u.iter().zip(v) {
        let (x, y) = reaction_point(a, b, p);
        fu.push(x);
        fv.push(y);
    }
    Ok((fu, fv))
}

/// Known nodal forcing for manufactured runs, evaluated at a time level.
pub struct RdsForcing<'a> {
    pub force_u: &'a dyn Fn(f64) -> Vec<f64>,
    pub force_v: &'a dyn Fn(f64) -> Vec<f64>,
}

pub struct RdsRunOptions<'a> {
    /// Stop when the relative step change of U falls below this value.
    pub steady_tol: Option<f64>,
    pub snapshot_every: Option<usize>,
    pub forcing: Option<RdsForcing<'a>>,
    /// Refactor the system matrices at every step instead of reusing the
    /// cached factorization (diagnostic switch, same trajectories).
    pub refactor_each_step: bool,
}

impl Default for RdsRunOptions<'_> {
    fn default() -> Self {
        RdsRunOptions {
            steady_tol: Some(1e-5),
            snapshot_every: None,
            forcing: None,
            refactor_each_step: false,
        }
    }
}

#[derive(Debug)]
pub struct RdsRun {
    pub state: SimState,
    pub steps: usize,
    pub t_final: f64,
    pub steady_reached: bool,
    /// Relative step change of U at the last completed step.
    pub last_rel_change: f64,
    pub snapshots: Vec<SimState>,
}

impl RdsRun {
    pub fn u(&self) -> &[f64] {
        &self.state.u
    }

    pub fn v(&self) -> &[f64] {
        self.state.v.as_deref().expect("RDS state always carries v")
    }
}

struct Species {
    system: FactorizedMatrix,
    bootstrap: FactorizedMatrix,
    matrix: CsrMatrix,
    boot_matrix: CsrMatrix,
}

impl Species {
    fn build(lb: &CsrMatrix, tau: f64, diffusion: f64) -> Result<Self, PdeError> {
        let matrix = lb.scaled_add_identity(-2.0 * tau * diffusion, 3.0);
        let boot_matrix = lb.scaled_add_identity(-tau * diffusion, 1.0);
        Ok(Species {
            system: FactorizedMatrix::new(matrix.clone())?,
            bootstrap: FactorizedMatrix::new(boot_matrix.clone())?,
            matrix,
            boot_matrix,
        })
    }
}

/// Runs IMEX-BDF2 to `t_end` (rounded to a whole number of steps).
pub fn bdf2_run(
    lb: &CsrMatrix,
    params: &RdsParams,
    u0: &[f64],
    v0: &[f64],
    tau: f64,
    t_end: f64,
    opts: &RdsRunOptions,
) -> Result<RdsRun, PdeError> {
    if !(tau > 0.0) {
        return Err(PdeError::NonPositiveStep(tau));
    }
    if params.beta == 0.0 {
        return Err(PdeError::ZeroBeta);
    }
    let dim = lb.rows();
    if u0.len() != dim || v0.len() != dim {
        return Err(PdeError::StateLength { dim, got: u0.len() });
    }
    let species_u = Species::build(lb, tau, params.delta_u)?;
    let species_v = Species::build(lb, tau, params.delta_v)?;
    let steps = (t_end / tau).round().max(0.0) as usize;

    let forcing_at = |t: f64| -> Option<(Vec<f64>, Vec<f64>)> {
        opts.forcing
            .as_ref()
            .map(|f| ((f.force_u)(t), (f.force_v)(t)))
    };
    // reaction plus forcing at a time level
    let effective = |u: &[f64], v: &[f64], t: f64| -> Result<(Vec<f64>, Vec<f64>), PdeError> {
        let (mut fu, mut fv) = reaction_terms(u, v, params)?;
        if let Some((gu, gv)) = forcing_at(t) {
            for (a, b) in fu.iter_mut().zip(gu) {
                *a += b;
            }
            for (a, b) in fv.iter_mut().zip(gv) {
                *a += b;
            }
        }
        Ok((fu, fv))
    };
    let solve = |cached: &FactorizedMatrix, matrix: &CsrMatrix, rhs: &[f64]| -> Result<Vec<f64>, PdeError> {
        if opts.refactor_each_step {
            Ok(FactorizedMatrix::new(matrix.clone())?.solve(rhs)?)
        } else {
            Ok(cached.solve(rhs)?)
        }
    };

    let mut u_prev = u0.to_vec();
    let mut v_prev = v0.to_vec();
    let mut u_cur = u_prev.clone();
    let mut v_cur = v_prev.clone();
    let mut f_prev = effective(&u_prev, &v_prev, 0.0)?;
    let mut snapshots = Vec::new();
    let mut steady = false;
    let mut rel_change = f64::INFINITY;
    let mut completed = 0usize;

    for j in 0..steps {
        let (u_next, v_next) = if j == 0 {
            // IMEX backward-Euler bootstrap: implicit diffusion, explicit
            // reaction at step 0
            let rhs_u: Vec<f64> = u_cur.iter().zip(&f_prev.0).map(|(u, f)| u + tau * f).collect();
            let rhs_v: Vec<f64> = v_cur.iter().zip(&f_prev.1).map(|(v, f)| v + tau * f).collect();
            let un = solve(&species_u.bootstrap, &species_u.boot_matrix, &rhs_u)?;
            let vn = solve(&species_v.bootstrap, &species_v.boot_matrix, &rhs_v)?;
            (un, vn)
        } else {
            let t_cur = j as f64 * tau;
            let f_cur = effective(&u_cur, &v_cur, t_cur)?;
            let rhs_u: Vec<f64> = (0..dim)
                .map(|k| 4.0 * tau * f_cur.0[k] - 2.0 * tau * f_prev.0[k] + 4.0 * u_cur[k] - u_prev[k])
                .collect();
            let rhs_v: Vec<f64> = (0..dim)
                .map(|k| 4.0 * tau * f_cur.1[k] - 2.0 * tau * f_prev.1[k] + 4.0 * v_cur[k] - v_prev[k])
                .collect();
            let un = solve(&species_u.system, &species_u.matrix, &rhs_u)?;
            let vn = solve(&species_v.system, &species_v.matrix, &rhs_v)?;
            f_prev = f_cur;
            (un, vn)
        };
        if u_next.iter().chain(&v_next).any(|x| !x.is_finite()) {
            return Err(PdeError::Diverged { step: j + 1 });
        }
        let diff: Vec<f64> = u_next.iter().zip(&u_cur).map(|(a, b)| a - b).collect();
        let denom = l2_norm(&u_cur);
        rel_change = if denom > 0.0 {
            l2_norm(&diff) / denom
        } else if l2_norm(&diff) == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        u_prev = std::mem::replace(&mut u_cur, u_next);
        v_prev = std::mem::replace(&mut v_cur, v_next);
        completed = j + 1;
        if let Some(every) = opts.snapshot_every {
            if every > 0 && completed % every == 0 {
                snapshots.push(SimState {
                    t: completed as f64 * tau,
                    step: completed,
                    u: u_cur.clone(),
                    v: Some(v_cur.clone()),
                });
            }
        }
        if let Some(tol) = opts.steady_tol {
            if rel_change < tol {
                steady = true;
                break;
            }
        }
    }

    let t_final = completed as f64 * tau;
    Ok(RdsRun {
        state: SimState { t: t_final, step: completed, u: u_cur, v: Some(v_cur) },
        steps: completed,
        t_final,
        steady_reached: steady,
        last_rel_change: rel_change,
        snapshots,
    })
}
