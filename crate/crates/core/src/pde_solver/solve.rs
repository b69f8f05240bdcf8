use rayon::prelude::*;
use serde::Serialize;

use super::banded::{BandLu, BandMatrix};
use super::field::ScalarField;
use super::operator::{WideStencil, BOUNDARY};
use crate::error::{param, Error, Result};

/// How the discrete Dirichlet problem is iterated to a fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Policy iteration: freeze the maximising direction per node, solve the
    /// resulting linear M-matrix system exactly, repeat until the policy is stable.
    Howard,
    /// Explicit damped fixed point `u <- u + tau_i (F(u) - f)`.
    DampedJacobi,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub method: SolveMethod,
    /// Fraction of the local stability limit used as step size (Jacobi only).
    pub damping: f64,
    /// Stopping threshold on the sup-norm update (Jacobi) or on the relative
    /// policy-improvement gain (Howard).
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolveMethod::Howard,
            damping: 0.9,
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

impl SolverConfig {
    pub fn jacobi(tolerance: f64, max_iterations: usize) -> Self {
        Self {
            method: SolveMethod::DampedJacobi,
            damping: 0.9,
            tolerance,
            max_iterations,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(param("damping must lie in (0, 1]"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(param("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(param("max_iterations must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirichletSolution {
    pub field: ScalarField,
    pub iterations: usize,
    /// `max_x |F(u) - f|` after each iteration.
    pub residual_history: Vec<f64>,
    /// Linear factorisations performed (Howard only).
    pub factorizations: usize,
}

/// Reusable solver for `P+_1(D^2u) = f`, `u = 0` on the boundary. Keeps the
/// last policy and its factorisation, so repeated solves with similar
/// right-hand sides are cheap.
#[derive(Debug)]
pub struct DirichletSolver<'a> {
    op: &'a WideStencil,
    cfg: SolverConfig,
    bandwidth: usize,
    center_max: f64,
    policy: Vec<u16>,
    lu: Option<BandLu>,
}

impl<'a> DirichletSolver<'a> {
    pub fn new(op: &'a WideStencil, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if op.is_empty() {
            return Err(Error::Domain("grid has no interior nodes".into()));
        }
        if op.directions().len() > u16::MAX as usize {
            return Err(param("too many stencil directions"));
        }
        let nd = op.directions().len();
        let bandwidth = (0..op.len())
            .flat_map(|i| (0..nd).map(move |d| (i, d)))
            .map(|(i, d)| {
                let a = op.arm(i, d);
                [a.plus, a.minus]
                    .into_iter()
                    .filter(|&s| s != BOUNDARY)
                    .map(|s| (s as usize).abs_diff(i))
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0);
        let center_max = (0..op.len()).fold(0.0f64, |m, i| m.max(op.center_bound(i)));
        Ok(Self {
            op,
            cfg,
            bandwidth,
            center_max,
            policy: vec![0; op.len()],
            lu: None,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn solve(&mut self, f: &[f64]) -> Result<DirichletSolution> {
        self.solve_from(f, None)
    }

    /// Solves with `f` given at interior nodes; `start` seeds the Jacobi
    /// iteration (ignored by Howard).
    pub fn solve_from(&mut self, f: &[f64], start: Option<&[f64]>) -> Result<DirichletSolution> {
        if f.len() != self.op.len() {
            return Err(param("right-hand side does not match the grid"));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(param("right-hand side must be finite"));
        }
        let (u, iterations, residual_history, factorizations) = match self.cfg.method {
            SolveMethod::Howard => self.howard(f)?,
            SolveMethod::DampedJacobi => self.jacobi(f, start)?,
        };
        Ok(DirichletSolution {
            field: ScalarField::from_interior(self.op.grid(), &u),
            iterations,
            residual_history,
            factorizations,
        })
    }

    fn factor_policy(&self) -> Result<BandLu> {
        let n = self.op.len();
        let mut m = BandMatrix::zeros(n, self.bandwidth);
        for i in 0..n {
            let a = self.op.arm(i, self.policy[i] as usize);
            m.add(i, i, a.c_center);
            if a.plus != BOUNDARY {
                m.add(i, a.plus as usize, -a.c_plus);
            }
            if a.minus != BOUNDARY {
                m.add(i, a.minus as usize, -a.c_minus);
            }
        }
        m.factor()
            .ok_or_else(|| Error::Divergence("policy matrix is singular".into()))
    }

    fn residual(&self, u: &[f64], f: &[f64]) -> f64 {
        let fu = self.op.apply(u);
        fu.iter().zip(f).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    fn howard(&mut self, f: &[f64]) -> Result<(Vec<f64>, usize, Vec<f64>, usize)> {
        let scale = f
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut history = Vec::new();
        let mut factorizations = 0;
        for it in 1..=self.cfg.max_iterations {
            if self.lu.is_none() {
                self.lu = Some(self.factor_policy()?);
                factorizations += 1;
            }
            let neg: Vec<f64> = f.iter().map(|v| -v).collect();
            let u = self.lu.as_ref().expect("factored above").solve(&neg);
            if u.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence(
                    "linear solve produced non-finite values".into(),
                ));
            }
            // Improve the policy only where another direction is better by more
            // than the rounding level of the difference quotients.
            let usup = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let threshold = self.cfg.tolerance * (scale + self.center_max * usup);
            let op = self.op;
            let updates: Vec<(f64, Option<u16>)> = self
                .policy
                .par_iter()
                .enumerate()
                .map(|(i, &p)| {
                    let current = op.directional(&u, i, p as usize);
                    let (best, arg) = op.node_max(&u, i);
                    let change = (best - current > threshold).then_some(arg as u16);
                    ((best - f[i]).abs(), change)
                })
                .collect();
            let residual = updates.iter().fold(0.0f64, |m, (r, _)| m.max(*r));
            history.push(residual);
            let mut changed = false;
            for (p, (_, c)) in self.policy.iter_mut().zip(&updates) {
                if let Some(c) = c {
                    *p = *c;
                    changed = true;
                }
            }
            if !changed {
                return Ok((u, it, history, factorizations));
            }
            self.lu = None;
        }
        Err(Error::IterationLimit {
            iterations: self.cfg.max_iterations,
            last: history.last().copied().unwrap_or(f64::NAN),
            history,
        })
    }

    fn jacobi(
        &self,
        f: &[f64],
        start: Option<&[f64]>,
    ) -> Result<(Vec<f64>, usize, Vec<f64>, usize)> {
        let n = self.op.len();
        let mut u = match start {
            Some(s) if s.len() == n => s.to_vec(),
            Some(_) => return Err(param("starting field does not match the grid")),
            None => vec![0.0; n],
        };
        let tau: Vec<f64> = (0..n)
            .map(|i| self.cfg.damping / self.op.center_bound(i))
            .collect();
        let mut history = Vec::new();
        for it in 1..=self.cfg.max_iterations {
            let fu = self.op.apply(&u);
            let (next, step): (Vec<f64>, Vec<f64>) = (0..n)
                .into_par_iter()
                .map(|i| {
                    let d = tau[i] * (fu[i] - f[i]);
                    (u[i] + d, d.abs())
                })
                .unzip();
            let update = step.iter().fold(0.0f64, |m, v| m.max(*v));
            if !update.is_finite() {
                return Err(Error::Divergence(
                    "damped iteration produced non-finite values".into(),
                ));
            }
            u = next;
            let residual = fu
                .iter()
                .zip(f)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            history.push(residual);
            if update < self.cfg.tolerance {
                let last = self.residual(&u, f);
                *history.last_mut().expect("pushed above") = last;
                return Ok((u, it, history, 0));
            }
        }
        Err(Error::IterationLimit {
            iterations: self.cfg.max_iterations,
            last: history.last().copied().unwrap_or(f64::NAN),
            history,
        })
    }
}

/// One-shot solve with `f` sampled on the grid of `op`.
pub fn solve_dirichlet(
    op: &WideStencil,
    f: &ScalarField,
    cfg: SolverConfig,
) -> Result<DirichletSolution> {
    if !f.matches(op.grid()) {
        return Err(param("right-hand side does not belong to this grid"));
    }
    DirichletSolver::new(op, cfg)?.solve(&f.interior_values(op.grid()))
}
