//! Checks on the geometry alone: the trigonometric distance bound in
//! geodesic triangles and the spectrum of the Hessian of `½d(·, x*)²`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::checks::Margin;
use crate::curvature::{delta_at, zeta_at};
use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix};
use crate::manifold::Point;

/// Finite-difference step of the Hessian probe.
pub const PROBE_STEP: f64 = 1e-5;
/// Slack on the eigenvalue bounds.
pub const PROBE_SLACK: f64 = 1e-3;
/// Probes whose finite-difference operator is further than this (relative
/// Frobenius) from self-adjoint are discarded.
pub const PROBE_ASYMMETRY_LIMIT: f64 = 1e-4;

/// In the triangle `(v, w, x)`:
///
/// ```text
/// ½‖log_w x‖² − (ζ/2)‖log_v w‖²  ≤  ½‖log_v x‖² − ⟨log_v w, log_v x⟩
/// ```
///
/// valid for any `ζ ≥ ζ(K_min, d(v, x))`.
pub fn trig_margin(k: usize, v: &Point, w: &Point, x: &Point, zeta: f64) -> Result<Margin> {
    let vw = v.log(w)?;
    let vx = v.log(x)?;
    let a = w.dist(x)?;
    let (b, c) = (vw.norm(), vx.norm());
    let cross = v.inner(&vw, &vx);
    let lhs = 0.5 * a * a - 0.5 * zeta * b * b;
    let rhs = 0.5 * c * c - cross;
    let scale = (0.5 * a * a + 0.5 * zeta * b * b).max(0.5 * c * c + b * c);
    Ok(Margin::new(k, lhs, rhs, scale))
}

/// A point at distance `r` from `center` in a uniformly random direction.
pub fn point_at_distance(center: &Point, r: f64, rng: &mut impl Rng) -> Result<Point> {
    let u = center.manifold().random_unit_tangent(center, rng);
    center.exp(&(u * r))
}

/// `samples` random triangles with vertices within `radius` of `center`,
/// so every side is at most `2·radius`.
pub fn check_trig_bound(
    center: &Point,
    radius: f64,
    zeta: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Margin>> {
    let mut out = Vec::with_capacity(samples);
    for k in 0..samples {
        let mut pick = || -> Result<Point> {
            let r = radius * rng.random::<f64>();
            point_at_distance(center, r, rng)
        };
        let (v, w, x) = (pick()?, pick()?, pick()?);
        out.push(trig_margin(k, &v, &w, &x, zeta)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub distance: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub delta_bound: f64,
    pub zeta_bound: f64,
    pub asymmetry: f64,
}

impl ProbeResult {
    pub fn within_bounds(&self) -> bool {
        self.lambda_min >= self.delta_bound - PROBE_SLACK && self.lambda_max <= self.zeta_bound + PROBE_SLACK
    }
}

/// Matrix of `u ↦ −d/dh|₀ Γ_{exp_p(hu)→p} log_{exp_p(hu)} x*` in an
/// orthonormal basis at `p`, by central differences.
pub fn hessian_operator(p: &Point, x_star: &Point, h: f64) -> Result<DMatrix<f64>> {
    let basis = p.tangent_basis();
    let n = basis.len();
    let mut m = DMatrix::zeros(n, n);
    for (j, e) in basis.iter().enumerate() {
        let pull = |s: f64| -> Result<_> {
            let q = p.exp(&(e * s))?;
            q.transport(p, &q.log(x_star)?)
        };
        let col = &(&pull(h)? - &pull(-h)?) * (-0.5 / h);
        for (i, b) in basis.iter().enumerate() {
            m[(i, j)] = p.inner(b, &col);
        }
    }
    Ok(m)
}

/// Spectrum of the probe operator at `p`, checked against `[δ(r), ζ(r)]`
/// with `r = d(p, x*)`.
pub fn hessian_probe_at(p: &Point, x_star: &Point) -> Result<ProbeResult> {
    let r = p.dist(x_star)?;
    let m = hessian_operator(p, x_star, PROBE_STEP)?;
    let norm = m.norm();
    let asymmetry = if norm > 0.0 { (&m - m.transpose()).norm() / norm } else { 0.0 };
    if !(asymmetry <= PROBE_ASYMMETRY_LIMIT) {
        return Err(Error::Invalid(format!(
            "probe at distance {r}: finite-difference operator asymmetry {asymmetry:e}"
        )));
    }
    let eig = linalg::sym_eig(&SymMatrix::symmetrize(m)?)?;
    let (k_min, k_max) = p.manifold().sectional_range();
    Ok(ProbeResult {
        distance: r,
        lambda_min: eig.min_eigenvalue(),
        lambda_max: eig.max_eigenvalue(),
        delta_bound: delta_at(k_max, r)?,
        zeta_bound: zeta_at(k_min, r),
        asymmetry,
    })
}

/// One probe per requested distance, each in a random direction from `x*`.
/// Probes that break down are reported as errors.
pub fn hessian_eig_probe(x_star: &Point, distances: &[f64], rng: &mut impl Rng) -> Vec<Result<ProbeResult>> {
    distances
        .iter()
        .map(|&r| hessian_probe_at(&point_at_distance(x_star, r, rng)?, x_star))
        .collect()
}
