//! Seeded instance generators. Every generator draws from the instance
//! stream of the seed only, so the same `(parameters, seed)` always gives
//! the same matrices.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{Capacity, Karcher, Rayleigh};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::manifold::{Manifold, Point};
use crate::rng::{self, Stream};

fn gaussian_matrix(rng: &mut impl Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_vec(r, c, rng::gaussian_vec(rng, r * c))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `diag(R)` folded into `Q`.
pub fn random_orthogonal(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, d, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `Q diag(λ) Qᵀ`, symmetrised.
pub fn spd_with_spectrum(q: &DMatrix<f64>, eigenvalues: &[f64]) -> Result<SymMatrix> {
    let l = DMatrix::from_diagonal(&DVector::from_column_slice(eigenvalues));
    SymMatrix::symmetrize(q * l * q.transpose())
}

/// `A = (1/d) B Bᵀ` with `B ∈ R^{d×n}` standard Gaussian.
pub fn gen_rayleigh(d: usize, n: usize, seed: u64) -> Result<Rayleigh> {
    if d < 2 || n < 1 {
        return Err(Error::Invalid(format!("rayleigh needs d >= 2 and n >= 1, got d={d}, n={n}")));
    }
    let mut r = rng::stream(seed, Stream::Instance);
    let b = gaussian_matrix(&mut r, d, n);
    let a = (&b * b.transpose()) / d as f64;
    Rayleigh::new(SymMatrix::symmetrize(a)?)
}

/// Uniform random unit vector from the init stream, re-drawn until it lies
/// in the open hemisphere around the dominant eigenvector.
pub fn rayleigh_start(inst: &Rayleigh, seed: u64) -> Point {
    let m = Manifold::Sphere(inst.dim());
    let u = inst.dominant_eigenvector(None);
    let mut r = rng::stream(seed, Stream::Init);
    loop {
        let x = m.random_point(&mut r, 1.0);
        if x.coords().dot(u.coords()) > 0.0 {
            return x;
        }
    }
}

/// `m` SPD matrices of size `d`, each with condition number exactly
/// `cond`: eigenvalues log-uniform on `[1, cond]` with both endpoints
/// present, conjugated by an independent random rotation.
pub fn gen_spd_set(m: usize, d: usize, cond: f64, seed: u64) -> Result<Karcher> {
    if m < 1 || d < 1 {
        return Err(Error::Invalid(format!("spd set needs m, d >= 1, got m={m}, d={d}")));
    }
    if !(cond >= 1.0) || !cond.is_finite() {
        return Err(Error::Invalid(format!("condition number must be >= 1, got {cond}")));
    }
    let mut r = rng::stream(seed, Stream::Instance);
    let log_c = cond.ln();
    let mut mats = Vec::with_capacity(m);
    for _ in 0..m {
        let mut eig = Vec::with_capacity(d);
        eig.push(1.0);
        if d > 1 {
            for _ in 1..d - 1 {
                eig.push((r.random::<f64>() * log_c).exp());
            }
            eig.push(cond);
        }
        let q = random_orthogonal(&mut r, d);
        mats.push(spd_with_spectrum(&q, &eig)?);
    }
    Karcher::new(&mats)
}

/// `m` standard Gaussian `d×d` matrices.
pub fn gen_scaling(m: usize, d: usize, seed: u64) -> Result<Capacity> {
    if m < 1 || d < 1 {
        return Err(Error::Invalid(format!("scaling needs m, d >= 1, got m={m}, d={d}")));
    }
    let mut r = rng::stream(seed, Stream::Instance);
    let ops = (0..m).map(|_| gaussian_matrix(&mut r, d, d)).collect();
    Capacity::new(ops)
}
