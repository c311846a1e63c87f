//! Runtime certification of recorded trajectories.
//!
//! Certification is a pure pass over an immutable full-point trace. Each
//! inequality yields a [`Margin`] per step; a run is certified when every
//! margin is at least `−tol_rel·scale`.

mod checks;
mod probe;
mod witness;

pub use checks::{
    bound_crossover, check_c1, check_c2_at, check_lemma1, check_theorem1, observed_diameter,
    observed_eps_tilde, psi_star_sequence, step_geometry, Margin, StepGeometry,
};
pub use probe::{
    check_trig_bound, hessian_eig_probe, hessian_operator, hessian_probe_at, point_at_distance,
    trig_margin, ProbeResult, PROBE_ASYMMETRY_LIMIT, PROBE_SLACK, PROBE_STEP,
};
pub use witness::{OptimumWitness, Provenance, WITNESS_GRAD_TOL};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::{segment_bound, segments, OptConfig, RestartConfig, Trace};
use crate::rng::{self, Stream};

pub const DEFAULT_TOL_REL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiameterMode {
    /// The a-priori bound from the run configuration.
    Configured,
    /// The largest distance the checks actually depend on.
    Observed,
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub tol_rel: f64,
    pub diameter_mode: DiameterMode,
    /// Random triangles for the trigonometric bound, on top of the
    /// trajectory triangles `(v_k, v_{k+1}, x*)`.
    pub trig_samples: usize,
    /// Number of Hessian probes around `x*`.
    pub hessian_probes: usize,
    /// Largest probe distance; capped by the diameter in use.
    pub probe_radius: f64,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            tol_rel: DEFAULT_TOL_REL,
            diameter_mode: DiameterMode::Configured,
            trig_samples: 200,
            hessian_probes: 3,
            probe_radius: 1.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginSummary {
    pub min_margin: f64,
    /// Smallest `margin / scale` (raw margin where the scale is zero).
    pub min_relative: f64,
    pub worst_k: Option<usize>,
    pub checked: usize,
    pub skipped: usize,
    pub violations: usize,
    pub passed: bool,
}

impl MarginSummary {
    pub fn from_margins<'a>(items: impl IntoIterator<Item = Option<&'a Margin>>, tol_rel: f64) -> Self {
        let mut s = Self {
            min_margin: f64::INFINITY,
            min_relative: f64::INFINITY,
            worst_k: None,
            checked: 0,
            skipped: 0,
            violations: 0,
            passed: true,
        };
        for m in items {
            let Some(m) = m else {
                s.skipped += 1;
                continue;
            };
            s.checked += 1;
            let v = m.value();
            let rel = if m.scale > 0.0 { v / m.scale } else { v };
            if v < s.min_margin || v.is_nan() {
                s.min_margin = v;
                s.worst_k = Some(m.k);
            }
            s.min_relative = s.min_relative.min(rel);
            if !m.holds(tol_rel) {
                s.violations += 1;
            }
        }
        if s.checked == 0 {
            s.min_margin = 0.0;
            s.min_relative = 0.0;
        }
        s.passed = s.violations == 0 && !s.min_margin.is_nan();
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HessianReport {
    pub lambda_min_obs: f64,
    pub lambda_max_obs: f64,
    pub delta_bound: f64,
    pub zeta_bound: f64,
    pub probes: Vec<ProbeResult>,
    pub discarded: Vec<String>,
    pub passed: bool,
}

impl HessianReport {
    pub fn from_probes(results: Vec<Result<ProbeResult>>) -> Self {
        let mut probes = Vec::new();
        let mut discarded = Vec::new();
        for r in results {
            match r {
                Ok(p) => probes.push(p),
                Err(e) => discarded.push(e.to_string()),
            }
        }
        let fold = |f: fn(&ProbeResult) -> f64, init: f64, op: fn(f64, f64) -> f64| {
            probes.iter().map(f).fold(init, op)
        };
        Self {
            lambda_min_obs: fold(|p| p.lambda_min, f64::INFINITY, f64::min),
            lambda_max_obs: fold(|p| p.lambda_max, f64::NEG_INFINITY, f64::max),
            delta_bound: fold(|p| p.delta_bound, f64::INFINITY, f64::min),
            zeta_bound: fold(|p| p.zeta_bound, f64::NEG_INFINITY, f64::max),
            passed: !probes.is_empty() && probes.iter().all(ProbeResult::within_bounds),
            probes,
            discarded,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Per-step margins (`None` where skipped).
#[derive(Clone, Debug, Default, Serialize)]
pub struct StepMargins {
    pub k: usize,
    pub psi_star: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub lemma1: Option<f64>,
    pub thm1: Option<f64>,
    pub trig: Option<f64>,
    pub eta: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub c1: MarginSummary,
    pub c2: MarginSummary,
    pub lemma1: MarginSummary,
    pub theorem1: MarginSummary,
    pub trig: MarginSummary,
    pub hessian: HessianReport,
    pub eps_tilde: f64,
    pub diameter: f64,
    pub diameter_mode: DiameterMode,
    pub excess: f64,
    pub f_star: f64,
    pub witness: Provenance,
    pub verdict: Verdict,
    #[serde(skip)]
    pub steps: Vec<StepMargins>,
}

impl Certificate {
    /// JSON report without the per-step rows.
    pub fn report_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serialises")
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Runs every check on a full-point RAGDsDR trace.
pub fn certify(trace: &Trace, cfg: &OptConfig, witness: &OptimumWitness, opts: &CertifyOptions) -> Result<Certificate> {
    checks::require_points(trace)?;
    let manifold = trace.x0.manifold();
    let zeta = cfg.curvature.zeta;
    let eps_tilde = observed_eps_tilde(trace);
    let geom = step_geometry(trace, witness);

    let diameter = match opts.diameter_mode {
        DiameterMode::Configured => cfg.diameter,
        DiameterMode::Observed => observed_diameter(trace, &geom, witness)?,
    };
    let domain = manifold.curvature_bounds(diameter).constants()?;
    let excess = domain.excess();

    let psi = psi_star_sequence(trace, zeta);
    let c1 = check_c1(trace, &psi);
    let c2 = check_c2_at(trace, witness, &geom, &psi);
    let lemma1 = check_lemma1(&geom, excess, diameter, eps_tilde);
    let thm1 = check_theorem1(trace, witness, zeta, cfg.lipschitz, excess, diameter, eps_tilde)?;

    // trajectory triangles use the algorithm's ζ, the only value C2 needs
    let nexts = checks::next_vs(trace);
    let mut trig: Vec<Option<Margin>> = trace
        .points
        .iter()
        .zip(&nexts)
        .enumerate()
        .map(|(k, (p, vn))| trig_margin(k, &p.v, vn, &witness.x_star, zeta).ok())
        .collect();
    let mut rng = rng::stream(opts.seed, Stream::Sampling);
    let radius = diameter / 2.0;
    let sample_zeta = domain.zeta;
    trig.extend(
        check_trig_bound(&witness.x_star, radius, sample_zeta, opts.trig_samples, &mut rng)?
            .into_iter()
            .map(Some),
    );

    let probe_r = opts.probe_radius.min(diameter);
    let distances: Vec<f64> = (1..=opts.hessian_probes)
        .map(|i| probe_r * i as f64 / opts.hessian_probes as f64)
        .collect();
    let hessian = HessianReport::from_probes(hessian_eig_probe(&witness.x_star, &distances, &mut rng));

    let tol = opts.tol_rel;
    let summary = |v: &[Option<Margin>]| MarginSummary::from_margins(v.iter().map(Option::as_ref), tol);
    let c1_s = MarginSummary::from_margins(c1.iter().map(Some), tol);
    let thm1_s = MarginSummary::from_margins(thm1.iter().map(Some), tol);
    let c2_s = summary(&c2);
    let lemma1_s = summary(&lemma1);
    let trig_s = summary(&trig);

    let steps = (0..=trace.len())
        .map(|k| {
            let at = |v: &[Option<Margin>]| v.get(k).and_then(|m| m.map(|m| m.value()));
            StepMargins {
                k,
                psi_star: psi[k],
                c1: Some(c1[k].value()),
                c2: at(&c2),
                lemma1: at(&lemma1),
                thm1: if k == 0 { None } else { Some(thm1[k - 1].value()) },
                trig: at(&trig[..trace.len()]),
                eta: geom.get(k).and_then(|g| g.map(|g| g.eta_k)),
            }
        })
        .collect();

    let all = [&c1_s, &c2_s, &lemma1_s, &thm1_s, &trig_s];
    let verdict = if all.iter().all(|s| s.passed && s.skipped == 0) && hessian.passed {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Certificate {
        c1: c1_s,
        c2: c2_s,
        lemma1: lemma1_s,
        theorem1: thm1_s,
        trig: trig_s,
        hessian,
        eps_tilde,
        diameter,
        diameter_mode: opts.diameter_mode,
        excess,
        f_star: witness.f_star,
        witness: witness.provenance,
        verdict,
        steps,
    })
}

/// Restart segment of a restarted run, checked against its step bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentCheck {
    pub start: usize,
    pub len: usize,
    /// Suboptimality at the start of the segment.
    pub eps_start: f64,
    /// Suboptimality after the segment's last step.
    pub eps_end: f64,
    /// Search error measured over the segment's own steps.
    pub eps_tilde: f64,
    pub bound: Option<usize>,
    /// The segment ended with a restart.
    pub restarted: bool,
    /// `eps_end ≤ (1 − α/c)·eps_start` for restarted segments.
    pub contraction_ok: bool,
    pub within_bound: bool,
}

/// Checks every segment of a restarted trace: each recorded restart met the
/// contraction test, and no segment ran longer than its bound computed from
/// the measured suboptimality at its start and the search error of its own
/// steps. Each segment is a fresh unrestarted run, so its bound involves
/// only the steps it contains.
pub fn check_restart_segments(trace: &Trace, cfg: &OptConfig, rc: &RestartConfig) -> Result<Vec<SegmentCheck>> {
    rc.validate()?;
    let values = trace.values();
    let restarted: std::collections::HashSet<usize> = trace.restarts.iter().copied().collect();
    segments(trace, rc.f_star)
        .into_iter()
        .map(|(start, len, eps_start)| {
            let end = start + len;
            let eps_end = *values
                .get(end)
                .ok_or_else(|| Error::Invalid("segment runs past the trace".into()))?
                - rc.f_star;
            let did_restart = restarted.contains(&(end - 1));
            let eps_tilde = trace.records[start..end]
                .iter()
                .map(|r| -r.cond2_margin)
                .fold(0.0, f64::max)
                .abs();
            let bound = segment_bound(eps_start, rc, eps_tilde, cfg);
            Ok(SegmentCheck {
                start,
                len,
                eps_start,
                eps_end,
                eps_tilde,
                bound,
                restarted: did_restart,
                contraction_ok: !did_restart || eps_end <= rc.contraction() * eps_start,
                within_bound: bound.is_some_and(|b| len <= b),
            })
        })
        .collect()
}
