use serde::Serialize;

use super::field::ScalarField;
use super::operator::WideStencil;
use super::solve::{DirichletSolver, SolverConfig};
use crate::error::{param, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenConfig {
    pub solver: SolverConfig,
    /// Stop once successive estimates differ by less than `tolerance * mu`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Number of trailing estimates averaged into `mu_h`.
    pub window: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            tolerance: 1e-10,
            max_iterations: 300,
            window: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenEstimate {
    pub mu_h: f64,
    pub iterations: usize,
    /// Sup-norm change of the normalised iterate per step.
    pub residual_history: Vec<f64>,
    pub mu_history: Vec<f64>,
    /// Principal eigenfield with sup norm 1.
    pub eigenfield: ScalarField,
    pub factorizations: usize,
}

/// Inverse power iteration on the monotone, positively 1-homogeneous map
/// `u -> w` with `F(w) = -u / |u|_sup`, started from the constant 1.
pub fn eigen_inverse_power(op: &WideStencil, cfg: EigenConfig) -> Result<EigenEstimate> {
    eigen_inverse_power_from(op, &vec![1.0; op.len()], cfg)
}

/// Same iteration from a positive interior starting vector.
pub fn eigen_inverse_power_from(
    op: &WideStencil,
    start: &[f64],
    cfg: EigenConfig,
) -> Result<EigenEstimate> {
    if start.len() != op.len() {
        return Err(param("starting field does not match the grid"));
    }
    if start.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(param("starting field must be positive at interior nodes"));
    }
    if cfg.window == 0 || cfg.max_iterations < cfg.window {
        return Err(param(
            "averaging window must be positive and below max_iterations",
        ));
    }
    let mut solver = DirichletSolver::new(op, cfg.solver)?;
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let s0 = sup(start);
    let mut u: Vec<f64> = start.iter().map(|v| v / s0).collect();
    let mut mu_history = Vec::new();
    let mut residual_history = Vec::new();
    let mut factorizations = 0;
    for it in 1..=cfg.max_iterations {
        let rhs: Vec<f64> = u.iter().map(|v| -v).collect();
        let sol = solver.solve_from(&rhs, Some(&u))?;
        factorizations += sol.factorizations;
        let w = sol.field.interior_values(op.grid());
        let norm = sup(&w);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Divergence(format!(
                "iterate norm {norm} at step {it}"
            )));
        }
        let next: Vec<f64> = w.iter().map(|v| v / norm).collect();
        let change = next
            .iter()
            .zip(&u)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        residual_history.push(change);
        mu_history.push(1.0 / norm);
        u = next;
        let k = mu_history.len();
        if k >= cfg.window.max(2) {
            let (a, b) = (mu_history[k - 1], mu_history[k - 2]);
            if (a - b).abs() < cfg.tolerance * a {
                let tail = &mu_history[k - cfg.window..];
                let mu_h = tail.iter().sum::<f64>() / tail.len() as f64;
                if u.iter().any(|v| *v <= 0.0) {
                    return Err(Error::Invariant("eigenfield lost positivity".into()));
                }
                return Ok(EigenEstimate {
                    mu_h,
                    iterations: it,
                    residual_history,
                    mu_history,
                    eigenfield: ScalarField::from_interior(op.grid(), &u),
                    factorizations,
                });
            }
        }
    }
    Err(Error::IterationLimit {
        iterations: cfg.max_iterations,
        last: mu_history.last().copied().unwrap_or(f64::NAN),
        history: mu_history,
    })
}

/// Discrete witness for the supremum characterisation: true iff
/// `F(phi) + mu phi <= tolerance` at every interior node.
pub fn bnv_certify_lower_bound(
    op: &WideStencil,
    mu: f64,
    phi: &ScalarField,
    tolerance: f64,
) -> Result<bool> {
    if !phi.matches(op.grid()) {
        return Err(param("field does not belong to this grid"));
    }
    if !mu.is_finite() {
        return Err(param("mu must be finite"));
    }
    let v = phi.interior_values(op.grid());
    if v.iter().any(|x| !(*x > 0.0)) {
        return Err(param("phi must be positive at interior nodes"));
    }
    let fv = op.apply(&v);
    Ok(fv.iter().zip(&v).all(|(a, b)| a + mu * b <= tolerance))
}
