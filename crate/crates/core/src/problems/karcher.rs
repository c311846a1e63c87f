use nalgebra::DMatrix;

use super::Problem;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::manifold::{Manifold, Point, Tangent};

/// Default smoothness estimate for the Karcher objective.
pub const KARCHER_L: f64 = 5.0;

/// `f(X) = (1/2m) Σ d(A_i, X)²` on SPD(d).
#[derive(Clone, Debug)]
pub struct Karcher {
    mats: Vec<Point>,
    dim: usize,
}

impl Karcher {
    pub fn new(mats: &[SymMatrix]) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::Invalid("Karcher mean needs at least one matrix".into()))?;
        let dim = first.dim();
        let m = Manifold::Spd(dim);
        let mats = mats.iter().map(|a| m.spd_point(a)).collect::<Result<Vec<_>>>()?;
        Ok(Self { mats, dim })
    }

    pub fn matrices(&self) -> &[Point] {
        &self.mats
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }
}

impl Problem for Karcher {
    fn manifold(&self) -> Manifold {
        Manifold::Spd(self.dim)
    }

    fn value(&self, x: &Point) -> Result<f64> {
        let mut s = 0.0;
        for a in &self.mats {
            s += x.dist(a)?.powi(2);
        }
        Ok(s / (2.0 * self.mats.len() as f64))
    }

    fn grad(&self, x: &Point) -> Result<Tangent> {
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        for a in &self.mats {
            acc += x.log(a)?.coords();
        }
        acc *= -1.0 / self.mats.len() as f64;
        x.tangent(acc)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(KARCHER_L)
    }

    fn mu_hint(&self) -> Option<f64> {
        Some(1.0)
    }
}
