mod args;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rmom_core::error::Error;
use rmom_core::experiment::{self, Experiment, ExperimentConfig, RunOutput};
use rmom_core::instance::{Instance, InstanceFile, InstanceSpec};
use rmom_core::io;
use serde_json::json;

use args::{Cli, Command, Flags};
use output::{sibling, write_atomic, write_json};

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
enum Failure {
    Io(String),
    Config(String),
    Certification(String),
    Numerical(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Io(_) => 1,
            Self::Config(_) => 2,
            Self::Certification(_) => 3,
            Self::Numerical(_) => 4,
        }
    }

    fn report(&self) {
        match self {
            Self::Io(m) => eprintln!("error: {m}"),
            Self::Config(m) => eprintln!("config error: {m}"),
            Self::Certification(m) => eprintln!("certification failed: {m}"),
            Self::Numerical(Error::AtIteration { k, source }) => {
                eprintln!("numerical abort at iteration {k}: {source}")
            }
            Self::Numerical(e) => eprintln!("numerical abort: {e}"),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(flags) => gen(&flags),
        Command::Run(flags) => run(&flags, false),
        Command::Certify(flags) => run(&flags, true),
        Command::Compare { optimizers, flags } => compare(&flags, &optimizers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            ExitCode::from(f.code())
        }
    }
}

/// Defaults, then the `--config` file, then flags. A `.json` config is read
/// as a run manifest and its `config` echo is used.
fn load_config(flags: &Flags) -> Outcome<ExperimentConfig> {
    let mut cfg = match &flags.config {
        None => ExperimentConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            if path.extension().is_some_and(|e| e == "json") {
                let v: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
                let echo = v
                    .get("config")
                    .cloned()
                    .ok_or_else(|| Failure::Config(format!("{}: no config echo", path.display())))?;
                serde_json::from_value(echo).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
            } else {
                toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
            }
        }
    };
    flags.apply(&mut cfg);
    Ok(cfg)
}

fn load_instance(cfg: &mut ExperimentConfig, flags: &Flags) -> Outcome<Option<(InstanceSpec, Instance)>> {
    let Some(path) = cfg.instance.clone() else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Config(format!("{path}: {e}")))?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{path}: {e}")))?;
    if flags.problem.is_none() {
        cfg.problem = file.spec.kind;
    }
    let inst = Instance::from_file(&file).map_err(config_err)?;
    Ok(Some((file.spec, inst)))
}

fn prepare(flags: &Flags) -> Outcome<Experiment> {
    let mut cfg = load_config(flags)?;
    let loaded = load_instance(&mut cfg, flags)?;
    Experiment::prepare(&cfg, loaded).map_err(config_err)
}

fn gen(flags: &Flags) -> Outcome<()> {
    let cfg = load_config(flags)?;
    let spec = cfg.instance_spec();
    let inst = Instance::generate(&spec).map_err(config_err)?;
    let out = cfg
        .out
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(format!("{}-s{}.instance.json", spec.kind, spec.seed)));
    write_json(&out, &inst.to_file(&spec))?;
    println!("instance={}", out.display());
    println!("hash={}", inst.hash());
    Ok(())
}

fn default_out(e: &Experiment, ext: &str) -> PathBuf {
    PathBuf::from(format!(
        "{}-{}-s{}.{ext}",
        e.config.problem, e.config.optimizer, e.config.seed
    ))
}

fn manifest(e: &Experiment, run: &RunOutput, files: serde_json::Value, wall_ns: u128) -> serde_json::Value {
    json!({
        "config": e.config,
        "resolved": {
            "instance": e.spec,
            "L": e.opt.lipschitz,
            "D": e.opt.diameter,
            "mu": e.mu,
            "beta-rule": e.opt.beta_rule,
            "gs-iters": e.opt.search.max_iters,
            "threshold": e.threshold,
            "curvature": e.opt.curvature,
        },
        "git_describe": env!("RMOM_GIT_DESCRIBE"),
        "instance_hash": e.instance.hash(),
        "scale": if e.is_paper_scale() { "paper" } else { "desk" },
        "wall_time_ns": wall_ns as u64,
        "witness": run.witness.as_ref().map(|w| json!({
            "provenance": w.provenance,
            "f_star": w.f_star,
            "grad_norm": w.grad_norm,
        })),
        "summary": run.summary,
        "certified": run.certified(),
        "files": files,
    })
}

fn certificate_json(run: &RunOutput) -> Option<serde_json::Value> {
    if let Some(c) = &run.certificate {
        return Some(c.report_json());
    }
    run.segments.as_ref().map(|s| {
        let ok = s.iter().all(|s| s.contraction_ok && s.within_bound);
        json!({ "segments": s, "verdict": if ok { "pass" } else { "fail" } })
    })
}

fn run(flags: &Flags, certify_only: bool) -> Outcome<()> {
    let mut flags = flags.clone();
    if certify_only {
        flags.certify = true;
    }
    let e = prepare(&flags)?;
    let clock = std::time::Instant::now();
    let out = e.run().map_err(Failure::Numerical)?;
    let wall = clock.elapsed().as_nanos();

    print!("{}", e.opt.curvature.key_values());
    let s = &out.summary;
    println!("final_f={}", s.final_f);
    if let Some(sub) = s.final_suboptimality {
        println!("suboptimality={sub:e}");
    }
    println!("iterations={} restarts={}", s.iterations, s.restarts);

    let (trace_path, cert_path) = if certify_only {
        let cert = e.config.out.as_ref().map(PathBuf::from).unwrap_or_else(|| default_out(&e, "certificate.json"));
        (sibling(&cert, "trace.csv"), cert)
    } else {
        let trace = e.config.out.as_ref().map(PathBuf::from).unwrap_or_else(|| default_out(&e, "csv"));
        let cert = sibling(&trace, "certificate.json");
        (trace, cert)
    };
    let sidecar_path = sibling(&trace_path, "restarts.json");
    let manifest_path = sibling(&trace_path, "manifest.json");

    let mut csv = Vec::new();
    io::write_records(&mut csv, &out.records).map_err(|e| Failure::Io(e.to_string()))?;
    write_atomic(&trace_path, &csv)?;
    write_json(&sidecar_path, &io::RestartSidecar { restarts: out.restarts.clone() })?;

    let cert = certificate_json(&out);
    let mut files = json!({
        "trace": trace_path.display().to_string(),
        "restarts": sidecar_path.display().to_string(),
    });
    if let Some(c) = &cert {
        write_json(&cert_path, c)?;
        files["certificate"] = json!(cert_path.display().to_string());
    }
    write_json(&manifest_path, &manifest(&e, &out, files, wall))?;
    println!("trace={}", trace_path.display());
    println!("manifest={}", manifest_path.display());

    if let Some(c) = &cert {
        println!("certificate={}", cert_path.display());
        println!("verdict={}", c["verdict"].as_str().unwrap_or("fail"));
        if out.certified() == Some(false) {
            return Err(Failure::Certification(failed_checks(c)));
        }
    }
    Ok(())
}

fn failed_checks(cert: &serde_json::Value) -> String {
    let names = ["c1", "c2", "lemma1", "theorem1", "trig", "hessian"];
    let failed: Vec<&str> = names
        .into_iter()
        .filter(|n| cert[*n]["passed"] == json!(false))
        .collect();
    if failed.is_empty() {
        "see certificate".into()
    } else {
        format!("checks {} failed", failed.join(", "))
    }
}

fn compare(flags: &Flags, optimizers: &[rmom_core::optim::OptimizerKind]) -> Outcome<()> {
    let mut base = load_config(flags)?;
    if base.certify {
        return Err(Failure::Config("compare does not certify; use run --certify".into()));
    }
    let loaded = load_instance(&mut base, flags)?;
    let list = if optimizers.is_empty() { vec![base.optimizer] } else { optimizers.to_vec() };
    let configs: Vec<ExperimentConfig> = list
        .iter()
        .map(|&o| ExperimentConfig {
            optimizer: o,
            ..base.clone()
        })
        .collect();
    let clock = std::time::Instant::now();
    let cmp = experiment::compare(&configs, loaded).map_err(|e| match e {
        Error::Invalid(_) | Error::Unavailable(_) | Error::Dimension(_) => config_err(e),
        other => Failure::Numerical(other),
    })?;
    let wall = clock.elapsed().as_nanos();

    let out = base.out.as_ref().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(format!("{}-s{}.compare.csv", base.problem, base.seed))
    });
    let mut text = String::from("optimizer,k,suboptimality,wall_ns\n");
    for (opt, k, v, ns) in cmp.long_rows() {
        writeln!(text, "{opt},{k},{v:e},{ns}").expect("writing to a String");
    }
    write_atomic(&out, text.as_bytes())?;

    println!("threshold={:e}", cmp.threshold);
    for (opt, it) in cmp.iterations_to_threshold() {
        match it {
            Some(k) => println!("{opt}: iterations_to_threshold={k}"),
            None => println!("{opt}: iterations_to_threshold=none"),
        }
    }
    let summaries: Vec<_> = cmp.runs.iter().map(|r| &r.summary).collect();
    let m = json!({
        "config": base,
        "optimizers": list,
        "git_describe": env!("RMOM_GIT_DESCRIBE"),
        "instance_hash": cmp.instance_hash,
        "wall_time_ns": wall as u64,
        "threshold": cmp.threshold,
        "summaries": summaries,
        "files": { "comparison": out.display().to_string() },
    });
    write_json(&sibling(&out, "manifest.json"), &m)?;
    println!("comparison={}", out.display());
    Ok(())
}
