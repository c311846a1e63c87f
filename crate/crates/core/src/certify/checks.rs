//! Per-iteration inequalities along a full-point RAGDsDR trace.
//!
//! With `g = grad f(y_k)` and `a = a_{k+1}`:
//!
//! ```text
//! ψ*_{k+1} = ψ*_k + a·f(y_k) − (ζa²/2)‖g‖²,  ψ*_0 = 0
//! ψ_k(x)   = ψ*_k + ½‖log_{v_k} x‖²
//! E_k(x)   = ⟨g, log_{y_k} x − Γ_{v_k→y_k} log_{v_k} x⟩
//!
//! C1:      A_k f(x_k) ≤ ψ*_k
//! C2:      ψ_{k+1}(x*) ≤ ψ_k(x*) + a(f(y_k) + ⟨g, log_{y_k} x*⟩ − E_k(x*))
//! error:   −E_k(x*) ≤ ‖g‖·max(ζ−1, 1−δ)·D + ε̃
//! rate:    f(x_k) − f* ≤ 2ζL·d(x_0,x*)²/k² + 4·max(ζ−1, 1−δ)·ζLD²/k + ε̃
//! ```

use serde::Serialize;

use super::OptimumWitness;
use crate::error::{Error, Result};
use crate::manifold::Point;
use crate::optim::Trace;

/// One inequality instance `lhs ≤ rhs`. `scale` is the magnitude of the
/// larger side, measured as the sum of absolute values of the terms that
/// make it up, so that cancellation inside a side does not shrink the
/// tolerance below the rounding error of its parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Margin {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub scale: f64,
}

impl Margin {
    pub fn new(k: usize, lhs: f64, rhs: f64, scale: f64) -> Self {
        Self { k, lhs, rhs, scale }
    }

    pub fn value(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self, tol_rel: f64) -> bool {
        self.value() >= -tol_rel * self.scale
    }
}

/// Quantities of step `k` evaluated at the witness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepGeometry {
    pub k: usize,
    /// `E_k(x*)`.
    pub e_k: f64,
    /// `E_k(x*) − ⟨g, log_{y_k} v_k⟩`: the part of the error due to curvature.
    pub eta_k: f64,
    /// `‖g‖·(‖log_{y_k} x*‖ + ‖log_{v_k} x*‖)`, the size of the terms in `E_k`.
    pub e_scale: f64,
    /// `½‖log_{v_k} x*‖²`.
    pub half_sq_v: f64,
    /// `⟨g, log_{y_k} x*⟩`.
    pub g_dot_y: f64,
    pub grad_norm: f64,
    pub dist_y_xstar: f64,
    pub dist_v_xstar: f64,
    pub dist_x_xstar: f64,
    pub dist_y_v: f64,
}

/// `v_{k+1}` for every row: the next row's `v`, or the final state.
pub(crate) fn next_vs(trace: &Trace) -> Vec<&Point> {
    let n = trace.points.len();
    (0..n)
        .map(|k| {
            if k + 1 < n {
                &trace.points[k + 1].v
            } else {
                &trace.last.v
            }
        })
        .collect()
}

pub(crate) fn require_points(trace: &Trace) -> Result<()> {
    if trace.points.len() != trace.records.len() {
        return Err(Error::Invalid(
            "certification needs a full-point trace (run with keep_points / --certify)".into(),
        ));
    }
    if !trace.restarts.is_empty() {
        return Err(Error::Invalid(
            "estimate-sequence checks apply to unrestarted runs; check restart segments instead".into(),
        ));
    }
    Ok(())
}

/// `E_k(x*)` and related distances for each step. A step whose logarithm
/// at `x*` is undefined yields `None`.
pub fn step_geometry(trace: &Trace, witness: &OptimumWitness) -> Vec<Option<StepGeometry>> {
    let xs = &witness.x_star;
    trace
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let eval = || -> Result<StepGeometry> {
                let g = &p.grad_y;
                let log_y = p.y.log(xs)?;
                let log_v = p.v.log(xs)?;
                let moved = p.v.transport(&p.y, &log_v)?;
                let e_k = p.y.inner(g, &(&log_y - &moved));
                let to_v = p.y.log(&p.v)?;
                let cond2 = p.y.inner(g, &to_v);
                let grad_norm = g.norm();
                let nv = log_v.norm();
                Ok(StepGeometry {
                    k,
                    e_k,
                    eta_k: e_k - cond2,
                    e_scale: grad_norm * (log_y.norm() + nv),
                    half_sq_v: 0.5 * nv * nv,
                    g_dot_y: p.y.inner(g, &log_y),
                    grad_norm,
                    dist_y_xstar: log_y.norm(),
                    dist_v_xstar: nv,
                    dist_x_xstar: p.x.dist(xs)?,
                    dist_y_v: to_v.norm(),
                })
            };
            eval().ok()
        })
        .collect()
}

/// `ψ*_0, …, ψ*_n` from the scalar columns of the trace.
pub fn psi_star_sequence(trace: &Trace, zeta: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(trace.len() + 1);
    let mut psi = 0.0;
    out.push(psi);
    for r in &trace.records {
        psi += r.a_next * r.f_y - 0.5 * zeta * r.a_next * r.a_next * r.grad_norm_y * r.grad_norm_y;
        out.push(psi);
    }
    out
}

/// `ψ*_k − A_k f(x_k)` for `k = 0..=n`.
pub fn check_c1(trace: &Trace, psi_stars: &[f64]) -> Vec<Margin> {
    let values = trace.values();
    let scales = psi_scales(trace, psi_stars);
    let mut big_a = 0.0;
    let mut out = Vec::with_capacity(values.len());
    for (k, (&psi, &f)) in psi_stars.iter().zip(&values).enumerate() {
        if k > 0 {
            big_a = trace.records[k - 1].big_a;
        }
        let lhs = big_a * f;
        out.push(Margin::new(k, lhs, psi, lhs.abs().max(scales[k])));
    }
    out
}

/// Sum of absolute values of the increments that built each `ψ*_k`.
fn psi_scales(trace: &Trace, psi_stars: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = vec![0.0];
    for r in &trace.records {
        acc += (r.a_next * r.f_y).abs() + (r.a_next * r.grad_norm_y).powi(2);
        out.push(acc);
    }
    out.iter().zip(psi_stars).map(|(s, p)| s.max(p.abs())).collect()
}

/// C2 at `x*` for `k = 0..n−1`; `None` where `log_{v_{k+1}} x*` or the step
/// geometry is undefined.
pub fn check_c2_at(
    trace: &Trace,
    witness: &OptimumWitness,
    geom: &[Option<StepGeometry>],
    psi_stars: &[f64],
) -> Vec<Option<Margin>> {
    let nexts = next_vs(trace);
    let scales = psi_scales(trace, psi_stars);
    geom.iter()
        .enumerate()
        .map(|(k, g)| {
            let g = g.as_ref()?;
            let r = &trace.records[k];
            let d_next = nexts[k].dist(&witness.x_star).ok()?;
            let half_next = 0.5 * d_next * d_next;
            let lhs = psi_stars[k + 1] + half_next;
            let rhs = psi_stars[k] + g.half_sq_v + r.a_next * (r.f_y + g.g_dot_y - g.e_k);
            let lhs_scale = scales[k + 1] + half_next;
            let rhs_scale = scales[k]
                + g.half_sq_v
                + r.a_next * (r.f_y.abs() + g.g_dot_y.abs() + g.e_scale);
            Some(Margin::new(k, lhs, rhs, lhs_scale.max(rhs_scale)))
        })
        .collect()
}

/// `−E_k(x*) ≤ ‖g‖·excess·D + ε̃`.
pub fn check_lemma1(geom: &[Option<StepGeometry>], excess: f64, diameter: f64, eps_tilde: f64) -> Vec<Option<Margin>> {
    geom.iter()
        .map(|g| {
            let g = g.as_ref()?;
            let rhs = g.grad_norm * excess * diameter + eps_tilde;
            Some(Margin::new(g.k, -g.e_k, rhs, g.e_scale.max(rhs)))
        })
        .collect()
}

/// Suboptimality bound for `k = 1..=n`. `zeta` and `lipschitz` are the
/// algorithm's parameters; `excess` and `diameter` describe the domain.
pub fn check_theorem1(
    trace: &Trace,
    witness: &OptimumWitness,
    zeta: f64,
    lipschitz: f64,
    excess: f64,
    diameter: f64,
    eps_tilde: f64,
) -> Result<Vec<Margin>> {
    let d0 = trace.x0.dist(&witness.x_star)?;
    let values = trace.values();
    Ok((1..values.len())
        .map(|k| {
            let kf = k as f64;
            let rhs = 2.0 * zeta * lipschitz * d0 * d0 / (kf * kf)
                + 4.0 * excess * zeta * lipschitz * diameter * diameter / kf
                + eps_tilde;
            let lhs = values[k] - witness.f_star;
            Margin::new(k, lhs, rhs, (values[k].abs() + witness.f_star.abs()).max(rhs))
        })
        .collect())
}

/// `k ≥ 1` at which `2ζLd0²/k² = 4·excess·ζLD²/k`; equals `2/d(M)` when
/// `d0 = D`.
pub fn bound_crossover(d0: f64, diameter: f64, excess: f64) -> f64 {
    if excess == 0.0 {
        f64::INFINITY
    } else {
        d0 * d0 / (2.0 * excess * diameter * diameter)
    }
}

/// Achieved search inexactness: `max(0, −min_k ⟨grad f(y_k), log_{y_k} v_k⟩)`.
pub fn observed_eps_tilde(trace: &Trace) -> f64 {
    trace
        .records
        .iter()
        .map(|r| -r.cond2_margin)
        .fold(0.0, f64::max)
        .abs()
}

/// Largest distance the proofs rely on: `d(y_k, v_k)`, `d(v_k, v_{k+1})`
/// and the distance of every `x_k, v_k, y_k` to `x*`.
pub fn observed_diameter(trace: &Trace, geom: &[Option<StepGeometry>], witness: &OptimumWitness) -> Result<f64> {
    let nexts = next_vs(trace);
    let mut d = trace.last.x.dist(&witness.x_star)?.max(trace.last.v.dist(&witness.x_star)?);
    for (k, g) in geom.iter().enumerate() {
        let g = g.as_ref().ok_or(Error::Invalid(format!("step {k}: logarithm at x* undefined")))?;
        let dv = trace.points[k].v.dist(nexts[k])?;
        d = d
            .max(g.dist_y_xstar)
            .max(g.dist_v_xstar)
            .max(g.dist_x_xstar)
            .max(g.dist_y_v)
            .max(dv);
    }
    Ok(d)
}
