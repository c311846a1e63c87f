//! Dense symmetric linear algebra.
//!
//! Everything the manifolds and problems need reduces to a symmetric
//! eigendecomposition followed by a scalar map on the spectrum:
//! `f(M) = V diag(f(λ)) Vᵀ`. Results are re-symmetrised as `(M + Mᵀ)/2`
//! so round-off never accumulates into an asymmetric part.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative asymmetry accepted by [`SymMatrix::new`].
const SYMMETRY_TOL: f64 = 1e-12;

/// A dense, finite, symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Validates squareness, finiteness and symmetry.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square_finite(&m)?;
        let scale = m.amax().max(1.0);
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::Invalid(format!(
                        "matrix is not symmetric at ({i},{j}): {} vs {}",
                        m[(i, j)],
                        m[(j, i)]
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    /// Takes the symmetric part `(m + mᵀ)/2` of a square finite matrix.
    pub fn symmetrize(m: DMatrix<f64>) -> Result<Self> {
        check_square_finite(&m)?;
        Ok(Self(symmetric_part(m)))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Row-major constructor; convenient in tests.
    pub fn from_rows(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }
}

impl AsRef<DMatrix<f64>> for SymMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

fn check_square_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("symmetric matrix input"));
    }
    Ok(())
}

/// `(m + mᵀ)/2`.
pub fn symmetric_part(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// Spectral decomposition `M = V diag(λ) Vᵀ` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct EigDecomp {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigDecomp {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V diag(f(λ)) Vᵀ`, symmetrised. No domain check.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, lambda) in self.eigenvalues.iter().enumerate() {
            let s = f(*lambda);
            scaled.column_mut(j).scale_mut(s);
        }
        SymMatrix(symmetric_part(&scaled * v.transpose()))
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map(|l| l)
    }
}

/// Symmetric eigendecomposition, eigenvalues sorted ascending.
pub fn sym_eig(m: &SymMatrix) -> Result<EigDecomp> {
    if m.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sym_eig input"));
    }
    let n = m.dim();
    if n == 0 {
        return Ok(EigDecomp {
            eigenvalues: DVector::zeros(0),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(m.0.clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigDecomp {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral matrix functions used by the SPD geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFunction {
    Exp,
    Log,
    Sqrt,
    InvSqrt,
    Inv,
}

impl MatrixFunction {
    fn name(self) -> &'static str {
        match self {
            MatrixFunction::Exp => "expm",
            MatrixFunction::Log => "logm",
            MatrixFunction::Sqrt => "sqrtm",
            MatrixFunction::InvSqrt => "invsqrtm",
            MatrixFunction::Inv => "inv",
        }
    }

    fn needs_positive(self) -> bool {
        !matches!(self, MatrixFunction::Exp)
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            MatrixFunction::Exp => x.exp(),
            MatrixFunction::Log => x.ln(),
            MatrixFunction::Sqrt => x.sqrt(),
            MatrixFunction::InvSqrt => 1.0 / x.sqrt(),
            MatrixFunction::Inv => 1.0 / x,
        }
    }
}

/// Applies `f` to an already decomposed matrix, checking the domain.
pub fn eig_apply(e: &EigDecomp, f: MatrixFunction) -> Result<SymMatrix> {
    if f.needs_positive() {
        if let Some(&bad) = e.eigenvalues.iter().find(|&&l| l <= 0.0) {
            return Err(Error::Domain {
                op: f.name(),
                eigenvalue: bad,
            });
        }
    }
    let out = e.map(|l| f.eval(l));
    if out.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(f.name()));
    }
    Ok(out)
}

/// `V diag(f(λ)) Vᵀ` for one of the supported spectral functions.
pub fn spd_apply(m: &SymMatrix, f: MatrixFunction) -> Result<SymMatrix> {
    eig_apply(&sym_eig(m)?, f)
}

pub fn expm(m: &SymMatrix) -> Result<SymMatrix> {
    spd_apply(m, MatrixFunction::Exp)
}

pub fn logm(m: &SymMatrix) -> Result<SymMatrix> {
    spd_apply(m, MatrixFunction::Log)
}

pub fn sqrtm(m: &SymMatrix) -> Result<SymMatrix> {
    spd_apply(m, MatrixFunction::Sqrt)
}

pub fn invsqrtm(m: &SymMatrix) -> Result<SymMatrix> {
    spd_apply(m, MatrixFunction::InvSqrt)
}

/// Relative Frobenius distance `‖a − b‖ / max(‖b‖, 1e-300)`.
pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
