//! Browser bindings. Every export returns a JSON string; failures come back
//! as `{"error": "..."}` so the page never has to catch exceptions.

use rmom_core::curvature::{rgd_dominance_check, CurvatureBounds, CurvatureConstants};
use rmom_core::experiment::{Experiment, ExperimentConfig};
use rmom_core::instance::ProblemKind;
use rmom_core::optim::OptimizerKind;
use rmom_core::problems::{gen_rayleigh, rayleigh_start, Problem};
use rmom_core::rng::{self, Stream};
use rmom_core::search::{golden_section, point_on_geodesic, SearchConfig};
use rmom_core::Manifold;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest dimension the page may request; keeps a race under a second.
pub const MAX_DIM: usize = 200;

fn respond(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(null)
    }
}

fn check_dim(d: usize) -> Result<(), String> {
    if (2..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(format!("d must be in 2..={MAX_DIM}, got {d}"))
    }
}

pub fn curvature_value(k_min: f64, k_max: f64, diameter: f64) -> Result<Value, String> {
    let b = CurvatureBounds::new(k_min, k_max, diameter).map_err(|e| e.to_string())?;
    let c = CurvatureConstants::from_bounds(&b).map_err(|e| e.to_string())?;
    Ok(json!({
        "zeta": c.zeta,
        "delta": c.delta,
        "discrepancy": c.discrepancy,
        "horizon": finite(c.horizon),
        "beats_rgd": rgd_dominance_check(&b).map_err(|e| e.to_string())?,
    }))
}

/// ζ, δ, the discrepancy and the acceleration horizon for the given
/// curvature range and diameter. An infinite horizon is reported as null.
#[wasm_bindgen]
pub fn curvature(k_min: f64, k_max: f64, diameter: f64) -> String {
    respond(curvature_value(k_min, k_max, diameter))
}

pub fn race_value(d: usize, seed: u64, iters: usize) -> Result<Value, String> {
    check_dim(d)?;
    if !(1..=2000).contains(&iters) {
        return Err(format!("iters must be in 1..=2000, got {iters}"));
    }
    let mut runs = serde_json::Map::new();
    let mut f_star = None;
    for opt in [OptimizerKind::Ragdsdr, OptimizerKind::Rgd] {
        let mut cfg = ExperimentConfig::new(ProblemKind::Rayleigh, opt);
        cfg.d = Some(d);
        cfg.seed = seed;
        cfg.iters = iters;
        cfg.wall_clock = false;
        let e = Experiment::prepare(&cfg, None).map_err(|e| e.to_string())?;
        let out = e.run().map_err(|e| e.to_string())?;
        f_star = out.summary.f_star;
        let series: Vec<f64> = out.metric.iter().map(|&(_, v, _)| v).collect();
        runs.insert(
            opt.as_str().into(),
            json!({
                "suboptimality": series,
                "iterations_to_threshold": out.summary.iterations_to_threshold,
            }),
        );
    }
    Ok(json!({
        "d": d,
        "seed": seed,
        "f_star": f_star,
        "threshold": ExperimentConfig::default_threshold(ProblemKind::Rayleigh),
        "runs": runs,
    }))
}

/// Suboptimality per iteration of RAGDsDR and plain gradient descent on the
/// same random Rayleigh instance.
#[wasm_bindgen]
pub fn rayleigh_race(d: usize, seed: u64, iters: usize) -> String {
    respond(race_value(d, seed, iters))
}

pub fn search_value(d: usize, seed: u64, gs_iters: usize, samples: usize) -> Result<Value, String> {
    check_dim(d)?;
    if !(2..=1000).contains(&samples) {
        return Err(format!("samples must be in 2..=1000, got {samples}"));
    }
    let p = gen_rayleigh(d, d, seed).map_err(|e| e.to_string())?;
    let x = rayleigh_start(&p, seed);
    let v = Manifold::Sphere(d).random_point(&mut rng::stream(seed, Stream::Sampling), 1.0);
    let f_at = |beta: f64| -> rmom_core::Result<f64> { p.value(&point_on_geodesic(&v, &x, beta)?) };

    let mut profile = Vec::with_capacity(samples);
    for i in 0..samples {
        let beta = i as f64 / (samples - 1) as f64;
        profile.push([beta, f_at(beta).map_err(|e| e.to_string())?]);
    }
    let mut probes = Vec::new();
    let found = golden_section(
        |beta| {
            let f = f_at(beta)?;
            probes.push([beta, f]);
            Ok(f)
        },
        &SearchConfig::with_iters(gs_iters),
    )
    .map_err(|e| e.to_string())?;
    Ok(json!({
        "profile": profile,
        "probes": probes,
        "beta": found.beta,
        "value": found.value,
        "evals": found.evals,
        "f_star": p.optimum_value(),
    }))
}

/// `f` along the geodesic from a random `v` to the start point `x` of a
/// Rayleigh instance, with the points golden-section search evaluated.
#[wasm_bindgen]
pub fn geodesic_search(d: usize, seed: u64, gs_iters: usize, samples: usize) -> String {
    respond(search_value(d, seed, gs_iters, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_constants() {
        let v: Value = serde_json::from_str(&curvature(1.0, 1.0, std::f64::consts::FRAC_PI_2)).unwrap();
        assert_eq!(v["zeta"], json!(1.0));
        assert!((v["discrepancy"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn flat_horizon_is_null() {
        let v: Value = serde_json::from_str(&curvature(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(v["horizon"], Value::Null);
        assert_eq!(v["beats_rgd"], json!(true));
    }

    #[test]
    fn bad_input_is_an_error_object() {
        let v: Value = serde_json::from_str(&curvature(1.0, -1.0, 1.0)).unwrap();
        assert!(v["error"].is_string());
        let v: Value = serde_json::from_str(&rayleigh_race(1, 0, 10)).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn race_has_both_series() {
        let v: Value = serde_json::from_str(&rayleigh_race(20, 3, 50)).unwrap();
        for opt in ["ragdsdr", "rgd"] {
            let s = v["runs"][opt]["suboptimality"].as_array().unwrap();
            assert!(!s.is_empty() && s.len() <= 51);
            assert!(s.iter().all(|x| x.as_f64().unwrap() >= -1e-12));
        }
    }

    #[test]
    fn search_beats_both_endpoints() {
        let v: Value = serde_json::from_str(&geodesic_search(10, 1, 10, 21)).unwrap();
        let prof = v["profile"].as_array().unwrap();
        assert_eq!(prof.len(), 21);
        let value = v["value"].as_f64().unwrap();
        for end in [&prof[0], &prof[20]] {
            assert!(value <= end[1].as_f64().unwrap());
        }
        assert_eq!(v["probes"].as_array().unwrap().len(), v["evals"].as_u64().unwrap() as usize);
    }
}
