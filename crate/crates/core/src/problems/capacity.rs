use nalgebra::{Cholesky, DMatrix};

use super::Problem;
use crate::error::{Error, Result};
use crate::linalg::{self, MatrixFunction, SymMatrix};
use crate::manifold::{Manifold, Point, Tangent};

/// Log-capacity `f(X) = log det T(X) − log det X` of the completely
/// positive map `T(X) = Σ A_i X A_iᵀ`, on SPD(d).
#[derive(Clone, Debug)]
pub struct Capacity {
    ops: Vec<DMatrix<f64>>,
    dim: usize,
}

impl Capacity {
    pub fn new(ops: Vec<DMatrix<f64>>) -> Result<Self> {
        let dim = ops
            .first()
            .ok_or_else(|| Error::Invalid("operator needs at least one matrix".into()))?
            .nrows();
        for a in &ops {
            if a.shape() != (dim, dim) {
                return Err(Error::Dimension(format!(
                    "operator matrices must all be {dim}x{dim}, got {:?}",
                    a.shape()
                )));
            }
            if a.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("operator matrix"));
            }
        }
        let c = Self { ops, dim };
        // T(I) must be SPD
        let t = c.t_map(&DMatrix::identity(dim, dim));
        logdet(&t, "T(I)")?;
        Ok(c)
    }

    pub fn ops(&self) -> &[DMatrix<f64>] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `T(X) = Σ A_i X A_iᵀ`.
    pub fn t_map(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for a in &self.ops {
            out += a * x * a.transpose();
        }
        linalg::symmetric_part(out)
    }

    /// `T*(Y) = Σ A_iᵀ Y A_i`.
    pub fn t_adjoint(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for a in &self.ops {
            out += a.transpose() * y * a;
        }
        linalg::symmetric_part(out)
    }

    /// Residual of the tuple scaled as `Y^{-1/2} A_i X^{1/2}`:
    /// `‖T̂(I) − I‖_F² + ‖T̂*(I) − I‖_F²`.
    pub fn ds_distance(&self, x: &Point, y: &Point) -> Result<f64> {
        let xs = &x.spd_factors()?.sqrt;
        let yis = &y.spd_factors()?.inv_sqrt;
        let scaled: Vec<DMatrix<f64>> = self.ops.iter().map(|a| yis * a * xs).collect();
        Ok(ds_residual(&scaled))
    }

    /// [`Capacity::ds_distance`] with the left scaling that is optimal for
    /// `X`, namely `Y = T(X)`.
    pub fn ds_distance_at(&self, x: &Point) -> Result<f64> {
        let y = Manifold::Spd(self.dim).point(self.t_map(x.coords()))?;
        self.ds_distance(x, &y)
    }
}

/// `‖Σ A_i A_iᵀ − I‖_F² + ‖Σ A_iᵀ A_i − I‖_F²`.
pub fn ds_residual(ops: &[DMatrix<f64>]) -> f64 {
    let d = ops.first().map_or(0, |a| a.nrows());
    let mut left = -DMatrix::<f64>::identity(d, d);
    let mut right = -DMatrix::<f64>::identity(d, d);
    for a in ops {
        left += a * a.transpose();
        right += a.transpose() * a;
    }
    left.norm_squared() + right.norm_squared()
}

fn logdet(m: &DMatrix<f64>, what: &'static str) -> Result<f64> {
    match Cholesky::new(m.clone()) {
        Some(c) => Ok(2.0 * c.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>()),
        None => {
            let e = linalg::sym_eig(&SymMatrix::symmetrize(m.clone())?)?;
            Err(Error::Domain {
                op: what,
                eigenvalue: e.min_eigenvalue(),
            })
        }
    }
}

impl Problem for Capacity {
    fn manifold(&self) -> Manifold {
        Manifold::Spd(self.dim)
    }

    fn value(&self, x: &Point) -> Result<f64> {
        let t = self.t_map(x.coords());
        Ok(logdet(&t, "T(X)")? - logdet(x.coords(), "X")?)
    }

    fn grad(&self, x: &Point) -> Result<Tangent> {
        let t = SymMatrix::symmetrize(self.t_map(x.coords()))?;
        let t_inv = linalg::spd_apply(&t, MatrixFunction::Inv)?;
        let w = self.t_adjoint(t_inv.as_matrix()) - &x.spd_factors()?.inv;
        Ok(x.project_tangent(&w))
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Alternating normalisation of an operator tuple.
#[derive(Clone, Debug)]
pub struct GurvitsState {
    pub ops: Vec<DMatrix<f64>>,
    pub steps: usize,
}

impl GurvitsState {
    pub fn new(c: &Capacity) -> Self {
        Self {
            ops: c.ops.clone(),
            steps: 0,
        }
    }

    pub fn residual(&self) -> f64 {
        ds_residual(&self.ops)
    }

    /// One right half-step followed by one left half-step.
    pub fn step(&mut self) -> Result<()> {
        self.ops = gurvits_step(&self.ops)?;
        self.steps += 1;
        Ok(())
    }
}

/// `A_i ← A_i (Σ A_jᵀA_j)^{-1/2}`, then `A_i ← (Σ A_jA_jᵀ)^{-1/2} A_i`.
pub fn gurvits_step(ops: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>> {
    let right = right_half(ops)?;
    left_half(&right)
}

pub(crate) fn right_half(ops: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>> {
    let d = ops.first().map_or(0, |a| a.nrows());
    let mut g = DMatrix::zeros(d, d);
    for a in ops {
        g += a.transpose() * a;
    }
    let s = normaliser(g)?;
    Ok(ops.iter().map(|a| a * &s).collect())
}

pub(crate) fn left_half(ops: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>> {
    let d = ops.first().map_or(0, |a| a.nrows());
    let mut g = DMatrix::zeros(d, d);
    for a in ops {
        g += a * a.transpose();
    }
    let s = normaliser(g)?;
    Ok(ops.iter().map(|a| &s * a).collect())
}

fn normaliser(gram: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let g = SymMatrix::symmetrize(gram)?;
    linalg::spd_apply(&g, MatrixFunction::InvSqrt)
        .map(SymMatrix::into_inner)
        .map_err(|e| match e {
            Error::Domain { eigenvalue, .. } => Error::Domain {
                op: "Gurvits normalisation (operator not scalable)",
                eigenvalue,
            },
            other => other,
        })
}
