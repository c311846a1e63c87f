//! Objective functions on manifolds.

mod capacity;
mod generate;
mod karcher;
mod quadratic;
mod rayleigh;

pub use capacity::{ds_residual, gurvits_step, Capacity, GurvitsState};
pub use generate::{
    gen_rayleigh, gen_scaling, gen_spd_set, random_orthogonal, rayleigh_start, spd_with_spectrum,
};
pub use karcher::Karcher;
pub use quadratic::Quadratic;
pub use rayleigh::Rayleigh;

use crate::error::Result;
use crate::manifold::{Manifold, Point, Tangent};

/// A smooth objective with a Riemannian gradient oracle.
pub trait Problem: Send + Sync {
    fn manifold(&self) -> Manifold;

    fn value(&self, x: &Point) -> Result<f64>;

    /// Riemannian gradient at `x`.
    fn grad(&self, x: &Point) -> Result<Tangent>;

    fn value_and_grad(&self, x: &Point) -> Result<(f64, Tangent)> {
        Ok((self.value(x)?, self.grad(x)?))
    }

    /// Smoothness constant suggested by the instance, if any.
    fn lipschitz_hint(&self) -> Option<f64> {
        None
    }

    /// Strong-convexity modulus suggested by the instance, if any.
    fn mu_hint(&self) -> Option<f64> {
        None
    }
}

/// Central difference `(f(exp_x(hu)) − f(exp_x(−hu))) / 2h`.
pub fn fd_directional(problem: &dyn Problem, x: &Point, u: &Tangent, h: f64) -> Result<f64> {
    let fp = problem.value(&x.exp(&(u * h))?)?;
    let fm = problem.value(&x.exp(&(u * (-h)))?)?;
    Ok((fp - fm) / (2.0 * h))
}

/// Largest gradient-check violation over `dirs`, measured as
/// `|⟨grad, u⟩ − fd| / (1 + |⟨grad, u⟩|)`.
pub fn gradient_check(problem: &dyn Problem, x: &Point, dirs: &[Tangent], h: f64) -> Result<f64> {
    let g = problem.grad(x)?;
    let mut worst = 0.0_f64;
    for u in dirs {
        let exact = x.inner(&g, u);
        let fd = fd_directional(problem, x, u, h)?;
        worst = worst.max((exact - fd).abs() / (1.0 + exact.abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
