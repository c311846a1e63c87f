use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rmom(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmom"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn rmom")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: [&str; 8] = ["--problem", "rayleigh", "--d", "30", "--n", "32", "--iters", "80"];

#[test]
fn trace_is_byte_reproducible_and_manifest_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let mut a = vec!["run"];
    a.extend(SMALL);
    a.extend(["--no-wall-clock", "--out", "a.csv"]);
    assert_eq!(code(&rmom(p, &a)), 0);
    let mut b = vec!["run"];
    b.extend(SMALL);
    b.extend(["--no-wall-clock", "--out", "b.csv"]);
    assert_eq!(code(&rmom(p, &b)), 0);
    let ta = fs::read(p.join("a.csv")).unwrap();
    assert_eq!(ta, fs::read(p.join("b.csv")).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("k,f_x,f_y,grad_norm_y,beta,a_next,big_a,cond2_margin,dist_x0,wall_ns\n"));

    // f_x is monotone under the geodesic search
    let fx: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(fx.windows(2).all(|w| w[1] <= w[0]));

    assert_eq!(code(&rmom(p, &["run", "--config", "a.manifest.json", "--out", "c.csv"])), 0);
    assert_eq!(fs::read(p.join("a.csv")).unwrap(), fs::read(p.join("c.csv")).unwrap());

    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("a.manifest.json")).unwrap()).unwrap();
    for key in ["config", "git_describe", "instance_hash", "wall_time_ns", "summary"] {
        assert!(m.get(key).is_some(), "manifest lacks {key}");
    }
    for key in ["final_f", "final_grad_norm", "iterations", "restarts"] {
        assert!(m["summary"].get(key).is_some(), "summary lacks {key}");
    }
    assert_eq!(m["scale"], "desk");
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("a.restarts.json")).unwrap()).unwrap();
    assert_eq!(side, serde_json::json!({"restarts": []}));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = rmom(p, &["run", "--problem", "scaling", "--optimizer", "ragd"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("RAGD is not applicable"));
    assert_eq!(code(&rmom(p, &["run", "--problem", "rayleigh", "--optimizer", "gurvits"])), 2);
    assert_eq!(code(&rmom(p, &["run", "--problem", "karcher", "--cond", "0.5"])), 2);
    fs::write(p.join("bad.toml"), "problem = \"karcher\"\nbogus = 1\n").unwrap();
    assert_eq!(code(&rmom(p, &["run", "--config", "bad.toml"])), 2);
    assert_eq!(code(&rmom(p, &["run", "--optimizer", "nonsense"])), 2);
}

#[test]
fn toml_config_is_applied_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("cfg.toml"),
        "problem = \"rayleigh\"\noptimizer = \"rgd\"\nd = 20\nn = 22\niters = 15\nseed = 4\n",
    )
    .unwrap();
    assert_eq!(code(&rmom(p, &["run", "--config", "cfg.toml", "--iters", "7", "--out", "t.csv"])), 0);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("t.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["optimizer"], "rgd");
    assert_eq!(m["config"]["iters"], 7);
    assert_eq!(m["resolved"]["instance"]["d"], 20);
    assert_eq!(m["summary"]["iterations"], 7);
}

#[test]
fn karcher_desk_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = rmom(p, &["run", "--problem", "karcher", "--certify", "--out", "k.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    for key in ["zeta=", "delta=", "discrepancy=", "horizon="] {
        assert!(out.lines().any(|l| l.starts_with(key)), "missing {key}");
    }
    let c: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("k.certificate.json")).unwrap()).unwrap();
    assert_eq!(c["verdict"], "pass");
    for key in ["c1", "c2", "lemma1", "theorem1", "trig"] {
        assert!(c[key]["min_margin"].is_number(), "{key}");
    }
    for key in ["lambda_min_obs", "lambda_max_obs", "delta_bound", "zeta_bound"] {
        assert!(c["hessian"][key].is_number(), "{key}");
    }
}

#[test]
fn certification_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // a diameter far below the distances travelled makes zeta too small
    let o = rmom(
        dir.path(),
        &["certify", "--problem", "karcher", "--d", "5", "--m", "4", "--iters", "50", "--D", "0.01", "--out", "c.json"],
    );
    assert_eq!(code(&o), 3);
    let c: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(c["verdict"], "fail");
}

#[test]
fn numerical_abort_exits_4_with_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmom(dir.path(), &["run", "--problem", "karcher", "--d", "5", "--m", "4", "--iters", "20", "--L", "1e-6"]);
    assert_eq!(code(&o), 4);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("numerical abort at iteration 0"), "{err}");
}

#[test]
fn gen_then_run_on_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = rmom(p, &["gen", "--problem", "scaling", "--seed", "2", "--out", "inst.json"]);
    assert_eq!(code(&o), 0);
    let hash = stdout(&o).lines().find_map(|l| l.strip_prefix("hash=")).unwrap().to_string();
    let inst: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("inst.json")).unwrap()).unwrap();
    assert_eq!(inst["kind"], "scaling");
    assert_eq!(inst["matrices"].as_array().unwrap().len(), 3);
    assert_eq!(code(&rmom(p, &["run", "--instance", "inst.json", "--optimizer", "gurvits", "--out", "g.csv"])), 0);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("g.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["instance_hash"], hash.as_str());
    // the file holds a scaling instance
    assert_eq!(code(&rmom(p, &["run", "--instance", "inst.json", "--problem", "karcher"])), 2);
}

#[test]
fn compare_scaling_writes_long_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = rmom(
        p,
        &["compare", "--problem", "scaling", "--optimizers", "gurvits,ragdsdr", "--iters", "60", "--out", "s.csv"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(p.join("s.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("optimizer,k,suboptimality,wall_ns"));
    let names: std::collections::BTreeSet<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names.into_iter().collect::<Vec<_>>(), ["gurvits", "ragdsdr"]);
    let out = stdout(&o);
    assert!(out.contains("gurvits: iterations_to_threshold="));
    assert!(out.contains("ragdsdr: iterations_to_threshold="));
}

#[test]
fn compare_single_and_rejects_instance_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let mut one = vec!["compare"];
    one.extend(SMALL);
    one.extend(["--optimizers", "rgd", "--out", "one.csv"]);
    assert_eq!(code(&rmom(p, &one)), 0);
    assert_eq!(code(&rmom(p, &["gen", "--problem", "karcher", "--d", "4", "--m", "3", "--out", "k.json"])), 0);
    let o = rmom(p, &["compare", "--instance", "k.json", "--problem", "rayleigh", "--optimizers", "rgd,ragdsdr"]);
    assert_eq!(code(&o), 2);
}
