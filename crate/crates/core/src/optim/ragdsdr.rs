use super::{a_next, BetaRule, IterRecord, OptConfig, OptState, OptimizerKind, StepPoints, Trace};
use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::manifold::Point;
use crate::problems::Problem;
use crate::search::{conditions_from_parts, point_on_geodesic, search_geodesic};

#[derive(Clone, Debug)]
pub struct StepOutput {
    pub state: OptState,
    /// `dist_x0` and `wall_ns` are left at zero for the driver to fill.
    pub record: IterRecord,
    pub points: StepPoints,
}

/// One RAGDsDR iteration from `(x_k, v_k, A_k)`.
pub fn ragdsdr_step(state: &OptState, problem: &dyn Problem, cfg: &OptConfig) -> Result<StepOutput> {
    step_unindexed(state, problem, cfg).map_err(|e| e.at(state.k))
}

pub(crate) fn step_unindexed(state: &OptState, problem: &dyn Problem, cfg: &OptConfig) -> Result<StepOutput> {
    let (x, v) = (&state.x, &state.v);
    let (beta, y, f_y) = match cfg.beta_rule {
        BetaRule::Search => {
            let r = search_geodesic(problem, v, x, &cfg.search)?;
            (r.beta, r.y, r.f_y)
        }
        BetaRule::Nesterov => {
            let k = state.k as f64;
            let beta = k / (k + 2.0);
            let y = point_on_geodesic(v, x, beta)?;
            let f_y = problem.value(&y)?;
            (beta, y, f_y)
        }
    };

    let g = problem.grad(&y)?;
    let grad_norm_y = g.norm();
    let x_next = y.exp(&(&g * (-1.0 / cfg.lipschitz)))?;

    let a = a_next(state.big_a, cfg.curvature.zeta, cfg.lipschitz);
    let big_a = state.big_a + a;
    let g_at_v = y.transport(v, &g)?;
    let v_next = v.exp(&(&g_at_v * (-a)))?;

    let cond = conditions_from_parts(f_y, state.f_x, &g, &y, v, cfg.search.eps_tilde)?;
    let f_next = problem.value(&x_next)?;
    if !f_next.is_finite() || !grad_norm_y.is_finite() {
        return Err(Error::NonFinite("objective at new iterate"));
    }

    Ok(StepOutput {
        record: IterRecord {
            k: state.k,
            f_x: f_next,
            f_y,
            grad_norm_y,
            beta,
            a_next: a,
            big_a,
            cond2_margin: cond.cond2_margin,
            dist_x0: 0.0,
            wall_ns: 0,
        },
        points: StepPoints {
            x: x.clone(),
            v: v.clone(),
            y,
            grad_y: g,
        },
        state: OptState {
            x: x_next,
            v: v_next,
            big_a,
            k: state.k + 1,
            f_x: f_next,
        },
    })
}

/// Runs RAGDsDR from `x0 = v0` until `‖grad f(y_k)‖ ≤ grad_tol` or
/// `max_iters` steps.
pub fn run_ragdsdr(problem: &dyn Problem, x0: &Point, cfg: &OptConfig) -> Result<Trace> {
    cfg.validate()?;
    let clock = Stopwatch::start();
    let kind = match cfg.beta_rule {
        BetaRule::Search => OptimizerKind::Ragdsdr,
        BetaRule::Nesterov => OptimizerKind::LinearCoupling,
    };
    let f0 = problem.value(x0)?;
    let mut trace = Trace::new(kind, x0.clone(), f0);
    let mut state = OptState::start(x0.clone(), f0);
    for _ in 0..cfg.max_iters {
        let k = state.k;
        let mut out = ragdsdr_step(&state, problem, cfg)?;
        out.record.dist_x0 = x0.dist(&out.state.x).map_err(|e| e.at(k))?;
        out.record.wall_ns = clock.elapsed_ns();
        let done = out.record.grad_norm_y <= cfg.grad_tol;
        trace.records.push(out.record);
        if cfg.keep_points {
            trace.points.push(out.points);
        }
        state = out.state;
        if done {
            break;
        }
    }
    trace.last = state;
    Ok(trace)
}
