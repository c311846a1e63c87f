use nalgebra::DMatrix;

use super::Problem;
use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix};
use crate::manifold::{Manifold, Point, Tangent};

/// `f(x) = ½ (x − c)ᵀ H (x − c)` on Euclidean space.
#[derive(Clone, Debug)]
pub struct Quadratic {
    h: SymMatrix,
    center: DMatrix<f64>,
    lipschitz: f64,
    mu: f64,
}

impl Quadratic {
    pub fn new(h: SymMatrix, center: &[f64]) -> Result<Self> {
        if center.len() != h.dim() {
            return Err(Error::Dimension(format!(
                "center has {} entries for a {}x{} Hessian",
                center.len(),
                h.dim(),
                h.dim()
            )));
        }
        let eig = linalg::sym_eig(&h)?;
        if eig.min_eigenvalue() < 0.0 {
            return Err(Error::Invalid("quadratic Hessian must be positive semidefinite".into()));
        }
        Ok(Self {
            lipschitz: eig.max_eigenvalue(),
            mu: eig.min_eigenvalue(),
            center: DMatrix::from_column_slice(center.len(), 1, center),
            h,
        })
    }

    /// `scale/2 · ‖x‖²`.
    pub fn isotropic(n: usize, scale: f64) -> Self {
        Self {
            h: SymMatrix::from_diagonal(&vec![scale; n]),
            center: DMatrix::zeros(n, 1),
            lipschitz: scale,
            mu: scale,
        }
    }

    pub fn hessian(&self) -> &SymMatrix {
        &self.h
    }

    pub fn minimizer(&self) -> Point {
        Manifold::Euclidean(self.h.dim())
            .point(self.center.clone())
            .expect("finite center")
    }
}

impl Problem for Quadratic {
    fn manifold(&self) -> Manifold {
        Manifold::Euclidean(self.h.dim())
    }

    fn value(&self, x: &Point) -> Result<f64> {
        let r = x.coords() - &self.center;
        Ok(0.5 * r.dot(&(self.h.as_matrix() * &r)))
    }

    fn grad(&self, x: &Point) -> Result<Tangent> {
        let r = x.coords() - &self.center;
        Ok(x.project_tangent(&(self.h.as_matrix() * r)))
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn mu_hint(&self) -> Option<f64> {
        Some(self.mu)
    }
}
