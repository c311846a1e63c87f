use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::Point;
use crate::optim::{run_rgd, OptConfig};
use crate::problems::{Problem, Rayleigh};

/// Largest admissible gradient norm at a witness.
pub const WITNESS_GRAD_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Eigendecomposition,
    Presolve,
    Analytic,
}

/// A minimiser `x*` with its value, obtained independently of the method
/// under test.
#[derive(Clone, Debug)]
pub struct OptimumWitness {
    pub x_star: Point,
    pub f_star: f64,
    pub provenance: Provenance,
    pub grad_norm: f64,
}

impl OptimumWitness {
    /// Fails unless `‖grad f(x_star)‖ ≤ 1e-10`.
    pub fn new(problem: &dyn Problem, x_star: Point, provenance: Provenance) -> Result<Self> {
        let (f_star, g) = problem.value_and_grad(&x_star)?;
        let grad_norm = g.norm();
        if !(grad_norm <= WITNESS_GRAD_TOL) {
            return Err(Error::Invalid(format!(
                "witness gradient norm {grad_norm:e} exceeds {WITNESS_GRAD_TOL:e}"
            )));
        }
        Ok(Self {
            x_star,
            f_star,
            provenance,
            grad_norm,
        })
    }

    /// Dominant unit eigenvector, sign-matched to `near`.
    pub fn rayleigh(p: &Rayleigh, near: Option<&Point>) -> Result<Self> {
        let x = p.dominant_eigenvector(near);
        let mut w = Self::new(p, x, Provenance::Eigendecomposition)?;
        // the eigenvalue is more accurate than the quotient evaluated at x
        w.f_star = p.optimum_value();
        Ok(w)
    }

    /// Gradient descent with step `1/L` until `‖grad‖ ≤ tol`, for at most
    /// `max_iters` steps.
    pub fn presolve(
        problem: &dyn Problem,
        x0: &Point,
        cfg: &OptConfig,
        max_iters: usize,
        tol: f64,
    ) -> Result<Self> {
        let mut c = cfg.clone();
        c.max_iters = max_iters;
        c.grad_tol = tol;
        c.keep_points = false;
        let t = run_rgd(problem, x0, &c)?;
        Self::new(problem, t.last.x, Provenance::Presolve)
    }
}
