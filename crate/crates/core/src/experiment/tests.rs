use super::*;

fn small_rayleigh(opt: OptimizerKind) -> ExperimentConfig {
    ExperimentConfig {
        d: Some(30),
        n: Some(32),
        iters: 60,
        seed: 3,
        ..ExperimentConfig::new(ProblemKind::Rayleigh, opt)
    }
}

#[test]
fn rayleigh_defaults() {
    let cfg = ExperimentConfig::new(ProblemKind::Rayleigh, OptimizerKind::Ragdsdr);
    let spec = cfg.instance_spec();
    assert_eq!((spec.d, spec.n), (200, Some(210)));
    assert_eq!(cfg.gs_iters, 10);
    let e = Experiment::prepare(&small_rayleigh(OptimizerKind::Ragdsdr), None).unwrap();
    let Instance::Rayleigh(p) = &e.instance else { panic!() };
    assert_eq!(e.opt.lipschitz, p.lipschitz);
    assert_eq!(e.opt.search.max_iters, 10);
    assert_eq!(e.opt.diameter, FRAC_PI_2);
    assert!(!e.is_paper_scale());
}

#[test]
fn paper_scale_flag() {
    let cfg = ExperimentConfig {
        d: Some(2000),
        n: Some(2100),
        ..ExperimentConfig::default()
    };
    let spec = cfg.instance_spec();
    spec.validate().unwrap();
    assert!(is_paper_scale(&spec));
    assert!(!is_paper_scale(&ExperimentConfig::default().instance_spec()));
}

#[test]
fn incompatible_combinations_are_rejected() {
    let ragd = ExperimentConfig::new(ProblemKind::Scaling, OptimizerKind::Ragd);
    let msg = Experiment::prepare(&ragd, None).unwrap_err().to_string();
    assert!(msg.contains("RAGD is not applicable"), "{msg}");
    let gurvits = ExperimentConfig::new(ProblemKind::Karcher, OptimizerKind::Gurvits);
    assert!(Experiment::prepare(&gurvits, None).is_err());
    let cond = ExperimentConfig {
        cond: Some(0.5),
        ..ExperimentConfig::new(ProblemKind::Karcher, OptimizerKind::Rgd)
    };
    assert!(Experiment::prepare(&cond, None).unwrap_err().to_string().contains("cond >= 1"));
    let cert = ExperimentConfig {
        certify: true,
        ..small_rayleigh(OptimizerKind::Rgd)
    };
    assert!(Experiment::prepare(&cert, None).is_err());
    let shift = ExperimentConfig {
        shift: Some(1.0),
        ..ExperimentConfig::new(ProblemKind::Karcher, OptimizerKind::Rgd)
    };
    assert!(Experiment::prepare(&shift, None).is_err());
}

#[test]
fn unknown_keys_are_rejected() {
    assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus": 1}"#).is_err());
    let c: ExperimentConfig = serde_json::from_str(r#"{"problem": "karcher", "L": 5.0, "gs-iters": 8}"#).unwrap();
    assert_eq!(c.problem, ProblemKind::Karcher);
    assert_eq!(c.lipschitz, Some(5.0));
    assert_eq!(c.gs_iters, 8);
    assert_eq!(c.iters, 300);
}

#[test]
fn runs_are_reproducible_without_wall_clock() {
    let cfg = ExperimentConfig {
        wall_clock: false,
        ..small_rayleigh(OptimizerKind::Ragdsdr)
    };
    let e = Experiment::prepare(&cfg, None).unwrap();
    let a = e.run().unwrap();
    let b = Experiment::prepare(&cfg, None).unwrap().run().unwrap();
    assert_eq!(a.records, b.records);
    assert!(a.records.iter().all(|r| r.wall_ns == 0));
    // monotone f_x with the geodesic search
    assert!(a.records.windows(2).all(|w| w[1].f_x <= w[0].f_x));
    assert!(a.summary.final_suboptimality.unwrap() >= -1e-12);
}

#[test]
fn shift_moves_optimum_and_lipschitz() {
    let base = Experiment::prepare(&small_rayleigh(OptimizerKind::Rgd), None).unwrap();
    let cfg = ExperimentConfig {
        shift: Some(2.0),
        ..small_rayleigh(OptimizerKind::Rgd)
    };
    let sh = Experiment::prepare(&cfg, None).unwrap();
    assert_close!(sh.opt.lipschitz, base.opt.lipschitz + 2.0, 1e-10);
    let (w0, w1) = (base.witness().unwrap(), sh.witness().unwrap());
    assert_close!(w1.f_star, w0.f_star - 1.0, 1e-10);
}

#[test]
fn certified_rayleigh_run_passes() {
    let cfg = ExperimentConfig {
        certify: true,
        ..small_rayleigh(OptimizerKind::Ragdsdr)
    };
    let out = Experiment::prepare(&cfg, None).unwrap().run().unwrap();
    assert_eq!(out.certified(), Some(true));
    let restart = ExperimentConfig {
        certify: true,
        ..small_rayleigh(OptimizerKind::RagdsdrRestart)
    };
    let out = Experiment::prepare(&restart, None).unwrap().run().unwrap();
    assert_eq!(out.certified(), Some(true));
}

#[test]
fn compare_scaling_uses_ds_distance() {
    let base = ExperimentConfig {
        iters: 40,
        seed: 1,
        ..ExperimentConfig::new(ProblemKind::Scaling, OptimizerKind::Gurvits)
    };
    let rd = ExperimentConfig {
        optimizer: OptimizerKind::Ragdsdr,
        ..base.clone()
    };
    let cmp = compare(&[base.clone(), rd], None).unwrap();
    assert_eq!(cmp.runs.len(), 2);
    let gurvits = &cmp.runs[0].metric;
    assert!(gurvits.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12)));
    for (opt, it) in cmp.iterations_to_threshold() {
        assert!(it.is_some(), "{opt} did not reach the threshold");
    }
    assert_eq!(cmp.long_rows().len(), cmp.runs.iter().map(|r| r.metric.len()).sum::<usize>());
}

#[test]
fn compare_rejects_mismatched_configs() {
    let a = small_rayleigh(OptimizerKind::Rgd);
    let b = ExperimentConfig {
        seed: 4,
        ..small_rayleigh(OptimizerKind::Ragdsdr)
    };
    assert!(compare(&[a.clone(), b], None).is_err());
    assert!(compare(&[a.clone(), a], None).is_err());
    assert!(compare(&[], None).is_err());
}
