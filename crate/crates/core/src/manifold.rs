//! Riemannian geometry kernels.
//!
//! Three manifolds share one representation: a point is a dense matrix of
//! ambient coordinates (an `n×1` column for the sphere and Euclidean space,
//! an `n×n` symmetric matrix for SPD) and a tangent vector carries its base
//! point. The SPD geometry uses the affine-invariant metric
//! `⟨U, V⟩_X = tr(X⁻¹ U X⁻¹ V)`.
//!
//! | op | Sphere | SPD | Euclidean |
//! |----|--------|-----|-----------|
//! | `exp_x(v)` | `cos‖v‖ x + sin‖v‖ v/‖v‖` | `X^½ expm(X^-½ V X^-½) X^½` | `x + v` |
//! | `log_x(y)` | `θ (y − ⟨x,y⟩x)/‖y − ⟨x,y⟩x‖` | `X^½ logm(X^-½ Y X^-½) X^½` | `y − x` |
//! | `Γ_x^y v` | rotation in span{x, log_x y} | `E V Eᵀ`, `E = (Y X⁻¹)^½` | `v` |

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureBounds;
use crate::error::{Error, Result};
use crate::linalg::{self, EigDecomp, MatrixFunction, SymMatrix};
use crate::rng;

/// Sphere points must have unit norm to this tolerance.
pub const SPHERE_NORM_TOL: f64 = 1e-10;
/// Sphere log is refused within this angle of the antipode.
pub const ANTIPODAL_GUARD: f64 = 1e-6;
/// Below this norm, sphere `exp` and `transport` short-circuit.
pub const SMALL_NORM: f64 = 1e-12;

/// Lower sectional-curvature bound of SPD(n) under the trace metric.
pub const SPD_K_MIN: f64 = -0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "dim")]
pub enum Manifold {
    /// Unit sphere `S^{n-1}` embedded in `R^n`.
    Sphere(usize),
    /// Symmetric positive definite `n×n` matrices.
    Spd(usize),
    Euclidean(usize),
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::Sphere(n) => write!(f, "Sphere({n})"),
            Manifold::Spd(n) => write!(f, "SPD({n})"),
            Manifold::Euclidean(n) => write!(f, "Euclidean({n})"),
        }
    }
}

impl Manifold {
    pub fn ambient_dim(&self) -> usize {
        match *self {
            Manifold::Sphere(n) | Manifold::Spd(n) | Manifold::Euclidean(n) => n,
        }
    }

    pub fn tangent_dim(&self) -> usize {
        match *self {
            Manifold::Sphere(n) => n.saturating_sub(1),
            Manifold::Spd(n) => n * (n + 1) / 2,
            Manifold::Euclidean(n) => n,
        }
    }

    /// `(K_min, K_max)` of the sectional curvature.
    pub fn sectional_range(&self) -> (f64, f64) {
        match self {
            Manifold::Sphere(_) => (1.0, 1.0),
            Manifold::Spd(_) => (SPD_K_MIN, 0.0),
            Manifold::Euclidean(_) => (0.0, 0.0),
        }
    }

    pub fn curvature_bounds(&self, diameter: f64) -> CurvatureBounds {
        let (k_min, k_max) = self.sectional_range();
        CurvatureBounds {
            k_min,
            k_max,
            diameter,
        }
    }

    fn coord_shape(&self) -> (usize, usize) {
        match *self {
            Manifold::Sphere(n) | Manifold::Euclidean(n) => (n, 1),
            Manifold::Spd(n) => (n, n),
        }
    }

    /// Validated point from ambient coordinates.
    pub fn point(&self, coords: DMatrix<f64>) -> Result<Point> {
        if coords.shape() != self.coord_shape() {
            return Err(Error::Dimension(format!(
                "{self} expects coordinates of shape {:?}, got {:?}",
                self.coord_shape(),
                coords.shape()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        match self {
            Manifold::Sphere(_) => {
                let n = coords.norm();
                if (n - 1.0).abs() > SPHERE_NORM_TOL {
                    return Err(Error::Invalid(format!("sphere point has norm {n}")));
                }
                Ok(Point::raw(*self, coords))
            }
            Manifold::Spd(_) => {
                let sym = SymMatrix::new(coords)?;
                let p = Point::raw(*self, sym.into_inner());
                p.spd_factors()?;
                Ok(p)
            }
            Manifold::Euclidean(_) => Ok(Point::raw(*self, coords)),
        }
    }

    /// Point from a flat slice (vector manifolds) or row-major entries (SPD).
    pub fn point_from_slice(&self, data: &[f64]) -> Result<Point> {
        let (r, c) = self.coord_shape();
        if data.len() != r * c {
            return Err(Error::Dimension(format!(
                "{self} expects {} coordinates, got {}",
                r * c,
                data.len()
            )));
        }
        self.point(DMatrix::from_row_slice(r, c, data))
    }

    /// Sphere convenience: normalises before validating.
    pub fn unit_point(&self, data: &[f64]) -> Result<Point> {
        let mut m = DMatrix::from_column_slice(data.len(), 1, data);
        let n = m.norm();
        if n == 0.0 {
            return Err(Error::Invalid("zero vector has no direction".into()));
        }
        m /= n;
        self.point(m)
    }

    pub fn spd_point(&self, m: &SymMatrix) -> Result<Point> {
        self.point(m.as_matrix().clone())
    }

    /// The canonical origin: `e1`, `I` or `0`.
    pub fn origin(&self) -> Point {
        let (r, c) = self.coord_shape();
        let coords = match self {
            Manifold::Sphere(_) => {
                let mut m = DMatrix::zeros(r, c);
                m[(0, 0)] = 1.0;
                m
            }
            Manifold::Spd(n) => DMatrix::identity(*n, *n),
            Manifold::Euclidean(_) => DMatrix::zeros(r, c),
        };
        Point::raw(*self, coords)
    }

    /// A random point: uniform on the sphere, `expm(spread·G)` on SPD with
    /// `G` a standard symmetric Gaussian scaled to unit expected Frobenius
    /// norm, `spread·g` in Euclidean space.
    pub fn random_point(&self, rng: &mut impl Rng, spread: f64) -> Point {
        match *self {
            Manifold::Sphere(n) => loop {
                let g = rng::gaussian_vec(rng, n);
                if let Ok(p) = self.unit_point(&g) {
                    return p;
                }
            },
            Manifold::Spd(n) => {
                let g = random_symmetric(rng, n);
                let e = linalg::expm(&SymMatrix::symmetrize(g * spread).expect("finite"))
                    .expect("expm of a finite symmetric matrix");
                Point::raw(*self, e.into_inner())
            }
            Manifold::Euclidean(n) => {
                let g = DMatrix::from_vec(n, 1, rng::gaussian_vec(rng, n));
                Point::raw(*self, g * spread)
            }
        }
    }

    /// Random tangent vector at `x` with unit Riemannian norm.
    pub fn random_unit_tangent(&self, x: &Point, rng: &mut impl Rng) -> Tangent {
        loop {
            let (r, c) = self.coord_shape();
            let t = match self {
                // X^½ G X^½ is isotropic in the metric at X
                Manifold::Spd(n) => {
                    let f = x.spd_factors().expect("valid SPD point");
                    Tangent::raw(x.clone(), f.color(&random_symmetric(rng, *n)))
                }
                _ => x.project_tangent(&DMatrix::from_vec(r, c, rng::gaussian_vec(rng, r * c))),
            };
            let n = t.norm();
            if n > 1e-8 {
                return t * (1.0 / n);
            }
        }
    }
}

fn random_symmetric(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_vec(n, n, rng::gaussian_vec(rng, n * n));
    linalg::symmetric_part(g) * (1.0 / (n as f64).sqrt())
}

/// Cached square roots and inverse of an SPD point.
#[derive(Clone, Debug)]
pub struct SpdFactors {
    pub eig: EigDecomp,
    pub sqrt: DMatrix<f64>,
    pub inv_sqrt: DMatrix<f64>,
    pub inv: DMatrix<f64>,
}

impl SpdFactors {
    fn new(coords: &DMatrix<f64>) -> Result<Self> {
        let sym = SymMatrix::symmetrize(coords.clone())?;
        let eig = linalg::sym_eig(&sym)?;
        let sqrt = linalg::eig_apply(&eig, MatrixFunction::Sqrt)?.into_inner();
        let inv_sqrt = linalg::eig_apply(&eig, MatrixFunction::InvSqrt)?.into_inner();
        let inv = linalg::eig_apply(&eig, MatrixFunction::Inv)?.into_inner();
        Ok(Self {
            eig,
            sqrt,
            inv_sqrt,
            inv,
        })
    }

    /// `X^{-1/2} Y X^{-1/2}`, symmetrised.
    fn whiten(&self, y: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::symmetrize(&self.inv_sqrt * y * &self.inv_sqrt).expect("finite congruence")
    }

    /// `X^{1/2} M X^{1/2}`, symmetrised.
    fn color(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        linalg::symmetric_part(&self.sqrt * m * &self.sqrt)
    }
}

struct PointData {
    manifold: Manifold,
    coords: DMatrix<f64>,
    spd: OnceLock<Result<SpdFactors>>,
}

/// A point on a [`Manifold`]. Cloning is cheap (shared storage).
#[derive(Clone)]
pub struct Point(Arc<PointData>);

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Point")
            .field("manifold", &self.0.manifold)
            .field("coords", &self.0.coords.as_slice())
            .finish()
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.manifold == other.0.manifold && self.0.coords == other.0.coords)
    }
}

impl Point {
    fn raw(manifold: Manifold, coords: DMatrix<f64>) -> Self {
        Point(Arc::new(PointData {
            manifold,
            coords,
            spd: OnceLock::new(),
        }))
    }

    pub fn manifold(&self) -> Manifold {
        self.0.manifold
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.0.coords
    }

    /// SPD factors, computed on first use.
    pub fn spd_factors(&self) -> Result<&SpdFactors> {
        debug_assert!(matches!(self.0.manifold, Manifold::Spd(_)));
        let cached = self.0.spd.get_or_init(|| {
            let f = SpdFactors::new(&self.0.coords)?;
            match f.eig.eigenvalues.iter().find(|&&l| l <= 0.0) {
                Some(&bad) => Err(Error::Domain {
                    op: "SPD point",
                    eigenvalue: bad,
                }),
                None => Ok(f),
            }
        });
        cached.as_ref().map_err(Clone::clone)
    }

    pub fn zero_tangent(&self) -> Tangent {
        let c = DMatrix::zeros(self.0.coords.nrows(), self.0.coords.ncols());
        Tangent::raw(self.clone(), c)
    }

    /// Tangent vector at this point from ambient coordinates, checked for
    /// tangency (sphere) or symmetry (SPD).
    pub fn tangent(&self, coords: DMatrix<f64>) -> Result<Tangent> {
        if coords.shape() != self.0.coords.shape() {
            return Err(Error::Dimension(format!(
                "tangent shape {:?} does not match point shape {:?}",
                coords.shape(),
                self.0.coords.shape()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tangent coordinates"));
        }
        match self.0.manifold {
            Manifold::Sphere(_) => {
                let radial = self.0.coords.dot(&coords);
                if radial.abs() > SPHERE_NORM_TOL * coords.norm().max(1.0) {
                    return Err(Error::Invalid(format!(
                        "vector is not tangent to the sphere: <x, v> = {radial}"
                    )));
                }
            }
            Manifold::Spd(_) => {
                SymMatrix::new(coords.clone())?;
            }
            Manifold::Euclidean(_) => {}
        }
        Ok(Tangent::raw(self.clone(), coords))
    }

    pub fn tangent_from_slice(&self, data: &[f64]) -> Result<Tangent> {
        let (r, c) = self.0.coords.shape();
        if data.len() != r * c {
            return Err(Error::Dimension(format!("expected {} entries", r * c)));
        }
        self.tangent(DMatrix::from_row_slice(r, c, data))
    }

    /// Riemannian inner product at this point.
    pub fn inner(&self, u: &Tangent, v: &Tangent) -> f64 {
        assert_based_at(u, self);
        assert_based_at(v, self);
        match self.0.manifold {
            Manifold::Sphere(_) | Manifold::Euclidean(_) => u.coords.dot(&v.coords),
            Manifold::Spd(_) => {
                let f = self.spd_factors().expect("tangent based at an invalid SPD point");
                let uu = &f.inv_sqrt * &u.coords * &f.inv_sqrt;
                let vv = &f.inv_sqrt * &v.coords * &f.inv_sqrt;
                uu.dot(&vv)
            }
        }
    }

    pub fn norm(&self, v: &Tangent) -> f64 {
        match self.0.manifold {
            Manifold::Sphere(_) | Manifold::Euclidean(_) => {
                assert_based_at(v, self);
                v.coords.norm()
            }
            Manifold::Spd(_) => {
                assert_based_at(v, self);
                let f = self.spd_factors().expect("tangent based at an invalid SPD point");
                (&f.inv_sqrt * &v.coords * &f.inv_sqrt).norm()
            }
        }
    }

    /// Exponential map `exp_x(v)`.
    pub fn exp(&self, v: &Tangent) -> Result<Point> {
        assert_based_at(v, self);
        if v.coords.iter().all(|c| *c == 0.0) {
            return Ok(self.clone());
        }
        let m = self.0.manifold;
        match m {
            Manifold::Euclidean(_) => Ok(Point::raw(m, &self.0.coords + &v.coords)),
            Manifold::Sphere(_) => {
                let n = v.coords.norm();
                if n < SMALL_NORM {
                    return Ok(self.clone());
                }
                let mut y = &self.0.coords * n.cos() + &v.coords * (n.sin() / n);
                let yn = y.norm();
                y /= yn;
                Ok(Point::raw(m, y))
            }
            Manifold::Spd(_) => {
                let f = self.spd_factors()?;
                let inner = f.whiten(&v.coords);
                let e = linalg::expm(&inner)?;
                Ok(Point::raw(m, f.color(e.as_matrix())))
            }
        }
    }

    /// Logarithm map `log_x(y)`; the inverse of [`Point::exp`].
    pub fn log(&self, y: &Point) -> Result<Tangent> {
        check_same_manifold(self, y)?;
        if self == y {
            return Ok(self.zero_tangent());
        }
        let coords = match self.0.manifold {
            Manifold::Euclidean(_) => &y.0.coords - &self.0.coords,
            Manifold::Sphere(_) => {
                let x = &self.0.coords;
                let c = x.dot(&y.0.coords);
                let mut w = &y.0.coords - x * c;
                // re-orthogonalise against x
                let r = x.dot(&w);
                w -= x * r;
                let s = w.norm();
                let theta = s.atan2(c);
                if theta >= std::f64::consts::PI - ANTIPODAL_GUARD {
                    return Err(Error::Antipodal { distance: theta });
                }
                if s == 0.0 {
                    w
                } else {
                    w * (theta / s)
                }
            }
            Manifold::Spd(_) => {
                let f = self.spd_factors()?;
                let l = linalg::logm(&f.whiten(&y.0.coords))?;
                f.color(l.as_matrix())
            }
        };
        Ok(Tangent::raw(self.clone(), coords))
    }

    /// Geodesic distance.
    pub fn dist(&self, y: &Point) -> Result<f64> {
        check_same_manifold(self, y)?;
        if self == y {
            return Ok(0.0);
        }
        match self.0.manifold {
            Manifold::Euclidean(_) => Ok((&y.0.coords - &self.0.coords).norm()),
            Manifold::Sphere(_) => {
                let x = &self.0.coords;
                let c = x.dot(&y.0.coords);
                let s = (&y.0.coords - x * c).norm();
                let theta = s.atan2(c);
                if theta >= std::f64::consts::PI - ANTIPODAL_GUARD {
                    return Err(Error::Antipodal { distance: theta });
                }
                Ok(theta)
            }
            Manifold::Spd(_) => {
                let f = self.spd_factors()?;
                let e = linalg::sym_eig(&f.whiten(&y.0.coords))?;
                if let Some(&bad) = e.eigenvalues.iter().find(|&&l| l <= 0.0) {
                    return Err(Error::Domain {
                        op: "SPD distance",
                        eigenvalue: bad,
                    });
                }
                Ok(e.eigenvalues.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
            }
        }
    }

    /// Parallel transport `Γ_x^y v` along the connecting geodesic.
    pub fn transport(&self, y: &Point, v: &Tangent) -> Result<Tangent> {
        assert_based_at(v, self);
        check_same_manifold(self, y)?;
        if self == y {
            return Ok(Tangent::raw(y.clone(), v.coords.clone()));
        }
        let coords = match self.0.manifold {
            Manifold::Euclidean(_) => v.coords.clone(),
            Manifold::Sphere(_) => {
                let u = self.log(y)?;
                let theta = u.coords.norm();
                if theta < SMALL_NORM {
                    v.coords.clone()
                } else {
                    let dir = &u.coords / theta;
                    let along = dir.dot(&v.coords);
                    let mut out = &v.coords + &dir * ((theta.cos() - 1.0) * along)
                        - &self.0.coords * (theta.sin() * along);
                    // numerical tangency at y
                    let r = y.0.coords.dot(&out);
                    out -= &y.0.coords * r;
                    out
                }
            }
            Manifold::Spd(_) => {
                let f = self.spd_factors()?;
                let mid = linalg::sqrtm(&f.whiten(&y.0.coords))?;
                let e = &f.sqrt * mid.as_matrix() * &f.inv_sqrt;
                linalg::symmetric_part(&e * &v.coords * e.transpose())
            }
        };
        Ok(Tangent::raw(y.clone(), coords))
    }

    /// Orthogonal projection of an ambient vector onto the tangent space,
    /// composed with the metric conversion on SPD: `X sym(W) X`.
    pub fn project_tangent(&self, w: &DMatrix<f64>) -> Tangent {
        let x = &self.0.coords;
        let coords = match self.0.manifold {
            Manifold::Euclidean(_) => w.clone(),
            Manifold::Sphere(_) => w - x * x.dot(w),
            Manifold::Spd(_) => linalg::symmetric_part(x * linalg::symmetric_part(w.clone()) * x),
        };
        Tangent::raw(self.clone(), coords)
    }

    /// Orthonormal basis of the tangent space.
    pub fn tangent_basis(&self) -> Vec<Tangent> {
        match self.0.manifold {
            Manifold::Euclidean(n) => (0..n)
                .map(|i| {
                    let mut c = DMatrix::zeros(n, 1);
                    c[(i, 0)] = 1.0;
                    Tangent::raw(self.clone(), c)
                })
                .collect(),
            Manifold::Sphere(n) => {
                let mut basis: Vec<DMatrix<f64>> = vec![self.0.coords.clone()];
                for i in 0..n {
                    let mut e = DMatrix::zeros(n, 1);
                    e[(i, 0)] = 1.0;
                    for _ in 0..2 {
                        for b in &basis {
                            let p = b.dot(&e);
                            e -= b * p;
                        }
                    }
                    let en = e.norm();
                    if en > 1e-6 {
                        basis.push(e / en);
                    }
                    if basis.len() == n {
                        break;
                    }
                }
                basis
                    .into_iter()
                    .skip(1)
                    .map(|c| Tangent::raw(self.clone(), c))
                    .collect()
            }
            Manifold::Spd(n) => {
                let f = self.spd_factors().expect("valid SPD point");
                let mut out = Vec::with_capacity(n * (n + 1) / 2);
                for i in 0..n {
                    for j in i..n {
                        let mut e = DMatrix::zeros(n, n);
                        if i == j {
                            e[(i, i)] = 1.0;
                        } else {
                            let s = std::f64::consts::FRAC_1_SQRT_2;
                            e[(i, j)] = s;
                            e[(j, i)] = s;
                        }
                        out.push(Tangent::raw(self.clone(), f.color(&e)));
                    }
                }
                out
            }
        }
    }
}

fn check_same_manifold(x: &Point, y: &Point) -> Result<()> {
    if x.0.manifold != y.0.manifold {
        return Err(Error::Dimension(format!(
            "points live on different manifolds: {} vs {}",
            x.0.manifold, y.0.manifold
        )));
    }
    Ok(())
}

fn assert_based_at(v: &Tangent, x: &Point) {
    assert!(
        v.base == *x,
        "contract violation: tangent vector is not based at the given point"
    );
}

/// A tangent vector together with its base point.
#[derive(Clone, Debug)]
pub struct Tangent {
    base: Point,
    coords: DMatrix<f64>,
}

impl Tangent {
    fn raw(base: Point, coords: DMatrix<f64>) -> Self {
        Self { base, coords }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.base.norm(self)
    }

    pub fn inner(&self, other: &Tangent) -> f64 {
        self.base.inner(self, other)
    }
}

impl Mul<f64> for &Tangent {
    type Output = Tangent;
    fn mul(self, a: f64) -> Tangent {
        Tangent::raw(self.base.clone(), &self.coords * a)
    }
}

impl Mul<f64> for Tangent {
    type Output = Tangent;
    fn mul(mut self, a: f64) -> Tangent {
        self.coords *= a;
        self
    }
}

impl Neg for &Tangent {
    type Output = Tangent;
    fn neg(self) -> Tangent {
        self * -1.0
    }
}

impl Add for &Tangent {
    type Output = Tangent;
    fn add(self, rhs: &Tangent) -> Tangent {
        assert_based_at(rhs, &self.base);
        Tangent::raw(self.base.clone(), &self.coords + &rhs.coords)
    }
}

impl Sub for &Tangent {
    type Output = Tangent;
    fn sub(self, rhs: &Tangent) -> Tangent {
        assert_based_at(rhs, &self.base);
        Tangent::raw(self.base.clone(), &self.coords - &rhs.coords)
    }
}

/// Free-function forms of the point methods.
pub fn inner(x: &Point, u: &Tangent, v: &Tangent) -> f64 {
    x.inner(u, v)
}

pub fn exp(x: &Point, v: &Tangent) -> Result<Point> {
    x.exp(v)
}

pub fn log(x: &Point, y: &Point) -> Result<Tangent> {
    x.log(y)
}

pub fn transport(x: &Point, y: &Point, v: &Tangent) -> Result<Tangent> {
    x.transport(y, v)
}

pub fn dist(x: &Point, y: &Point) -> Result<f64> {
    x.dist(y)
}

pub fn project_tangent(x: &Point, w: &DMatrix<f64>) -> Tangent {
    x.project_tangent(w)
}
