use nalgebra::DMatrix;

use super::Problem;
use crate::error::Result;
use crate::linalg::{self, EigDecomp, SymMatrix};
use crate::manifold::{Manifold, Point, Tangent};

/// `f(x) = −½ xᵀAx` on the unit sphere; minimised by the dominant
/// eigenvector of `A`.
#[derive(Clone, Debug)]
pub struct Rayleigh {
    a: SymMatrix,
    eig: EigDecomp,
    /// `λ_max(A)`.
    pub lipschitz: f64,
    /// `λ_min(A)`.
    pub mu_hint: f64,
}

impl Rayleigh {
    pub fn new(a: SymMatrix) -> Result<Self> {
        let eig = linalg::sym_eig(&a)?;
        Ok(Self {
            lipschitz: eig.max_eigenvalue(),
            mu_hint: eig.min_eigenvalue(),
            a,
            eig,
        })
    }

    /// Same problem with `A + γI`.
    pub fn shifted(&self, gamma: f64) -> Result<Self> {
        let n = self.a.dim();
        let m = self.a.as_matrix() + DMatrix::<f64>::identity(n, n) * gamma;
        Self::new(SymMatrix::symmetrize(m)?)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.a
    }

    pub fn eig(&self) -> &EigDecomp {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `−½ λ_max(A)`.
    pub fn optimum_value(&self) -> f64 {
        -0.5 * self.eig.max_eigenvalue()
    }

    /// Unit dominant eigenvector, signed to lie in the open hemisphere
    /// around `near` (ties keep the solver's sign).
    pub fn dominant_eigenvector(&self, near: Option<&Point>) -> Point {
        let n = self.a.dim();
        let mut u = self.eig.eigenvectors.column(n - 1).into_owned();
        u /= u.norm();
        if let Some(p) = near {
            if p.coords().column(0).dot(&u) < 0.0 {
                u = -u;
            }
        }
        Manifold::Sphere(n)
            .point(DMatrix::from_column_slice(n, 1, u.as_slice()))
            .expect("normalised eigenvector")
    }
}

impl Problem for Rayleigh {
    fn manifold(&self) -> Manifold {
        Manifold::Sphere(self.a.dim())
    }

    fn value(&self, x: &Point) -> Result<f64> {
        let x = x.coords();
        Ok(-0.5 * x.dot(&(self.a.as_matrix() * x)))
    }

    fn grad(&self, x: &Point) -> Result<Tangent> {
        let ax = self.a.as_matrix() * x.coords();
        Ok(x.project_tangent(&(-ax)))
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn mu_hint(&self) -> Option<f64> {
        Some(self.mu_hint)
    }
}
