//! Geodesic search: choose the coupling point `y_k` on the geodesic from
//! `v_k` to `x_k` by minimising `β ↦ f(exp_{v_k}(β·log_{v_k}(x_k)))` over
//! `[0, 1]`.
//!
//! The search is plain golden-section, except that both endpoints are
//! always evaluated and eligible. Returning `β = 1` whenever nothing beats
//! `f(x_k)` is what makes `f(y_k) ≤ f(x_k)` hold exactly; returning an
//! endpoint or an approximate stationary point is what makes
//! `⟨grad f(y_k), log_{y_k}(v_k)⟩ ≥ −ε̃` hold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::Point;
use crate::problems::Problem;

/// Inverse golden ratio, `(√5 − 1)/2`.
pub const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Golden-section shrink steps.
    pub max_iters: usize,
    /// Stop once the bracket on β is this narrow.
    pub bracket_tol: f64,
    /// Tolerated violation of the second search condition.
    pub eps_tilde: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_iters: 10,
            bracket_tol: 1e-6,
            eps_tilde: 0.0,
        }
    }
}

impl SearchConfig {
    pub fn with_iters(max_iters: usize) -> Self {
        Self {
            max_iters,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Invalid("geodesic search needs max_iters >= 1".into()));
        }
        if !(self.bracket_tol >= 0.0) || !(self.eps_tilde >= 0.0) {
            return Err(Error::Invalid(
                "bracket_tol and eps_tilde must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldenResult {
    pub beta: f64,
    pub value: f64,
    pub evals: usize,
}

/// Golden-section minimisation of `phi` on `[0, 1]`.
///
/// Evaluates `phi(1)`, `phi(0)`, the two interior seeds, then one new point
/// per shrink (the last shrink needs none), so `evals ≤ max_iters + 3`. The
/// returned β is the best of everything evaluated; ties keep the earliest,
/// so a flat `phi` returns `β = 1`.
pub fn golden_section(
    mut phi: impl FnMut(f64) -> Result<f64>,
    cfg: &SearchConfig,
) -> Result<GoldenResult> {
    cfg.validate()?;
    let mut evals = 0usize;
    let mut eval = |beta: f64, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = phi(beta)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("geodesic search objective"))
        }
    };

    let mut best = GoldenResult {
        beta: 1.0,
        value: eval(1.0, &mut evals)?,
        evals: 0,
    };
    let consider = |beta: f64, value: f64, best: &mut GoldenResult| {
        if value < best.value {
            best.beta = beta;
            best.value = value;
        }
    };
    let f0 = eval(0.0, &mut evals)?;
    consider(0.0, f0, &mut best);

    let (mut a, mut b) = (0.0_f64, 1.0_f64);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evals)?;
    consider(c, fc, &mut best);
    let mut fd = eval(d, &mut evals)?;
    consider(d, fd, &mut best);

    for it in 0..cfg.max_iters {
        let left = fc < fd;
        if left {
            b = d;
        } else {
            a = c;
        }
        if it + 1 == cfg.max_iters || b - a <= cfg.bracket_tol {
            break;
        }
        if left {
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evals)?;
            consider(c, fc, &mut best);
        } else {
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evals)?;
            consider(d, fd, &mut best);
        }
    }
    best.evals = evals;
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub beta: f64,
    pub y: Point,
    pub f_y: f64,
    pub evals: usize,
}

/// The point `exp_v(β·log_v(x))`, with the endpoints returned exactly.
pub fn point_on_geodesic(v: &Point, x: &Point, beta: f64) -> Result<Point> {
    if beta == 0.0 {
        Ok(v.clone())
    } else if beta == 1.0 {
        Ok(x.clone())
    } else {
        v.exp(&(v.log(x)? * beta))
    }
}

/// Minimises `f` along the geodesic from `v` to `x`.
pub fn search_geodesic(
    problem: &dyn Problem,
    v: &Point,
    x: &Point,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    if v == x {
        return Ok(SearchResult {
            beta: 1.0,
            y: x.clone(),
            f_y: problem.value(x)?,
            evals: 1,
        });
    }
    let dir = v.log(x)?;
    let at = |beta: f64| -> Result<Point> {
        if beta == 0.0 {
            Ok(v.clone())
        } else if beta == 1.0 {
            Ok(x.clone())
        } else {
            v.exp(&(&dir * beta))
        }
    };
    let g = golden_section(|beta| problem.value(&at(beta)?), cfg)?;
    Ok(SearchResult {
        beta: g.beta,
        y: at(g.beta)?,
        f_y: g.value,
        evals: g.evals,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConditions {
    /// `f(y) ≤ f(x_k)` (relative slack 1e-12).
    pub cond1: bool,
    /// `⟨grad f(y), log_y(v_k)⟩`.
    pub cond2_margin: f64,
    /// `cond2_margin ≥ −ε̃`.
    pub cond2: bool,
}

pub fn verify_conditions(
    problem: &dyn Problem,
    y: &Point,
    x_k: &Point,
    v_k: &Point,
    eps_tilde: f64,
) -> Result<SearchConditions> {
    let f_y = problem.value(y)?;
    let f_x = problem.value(x_k)?;
    let grad = problem.grad(y)?;
    Ok(conditions_from_parts(f_y, f_x, &grad, y, v_k, eps_tilde)?)
}

/// Same as [`verify_conditions`] with `f(y)`, `f(x_k)` and `grad f(y)`
/// already at hand.
pub fn conditions_from_parts(
    f_y: f64,
    f_x: f64,
    grad_y: &crate::manifold::Tangent,
    y: &Point,
    v_k: &Point,
    eps_tilde: f64,
) -> Result<SearchConditions> {
    let cond1 = f_y <= f_x + 1e-12 * f_x.abs();
    let cond2_margin = if y == v_k {
        0.0
    } else {
        y.inner(grad_y, &y.log(v_k)?)
    };
    Ok(SearchConditions {
        cond1,
        cond2_margin,
        cond2: cond2_margin >= -eps_tilde,
    })
}
