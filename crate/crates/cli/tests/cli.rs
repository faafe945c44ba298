use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_perclab"));
    c.env_remove("PERCLAB_THREADS");
    c
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).args(extra).output().unwrap()
}

fn summary(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn percolate_config(dir: &Path, replicas: u32, seed: u64) -> PathBuf {
    let csv = dir.join("perc.csv");
    write(
        dir,
        "perc.toml",
        &format!(
            "[experiment]\nname = \"percolate\"\nseed = {seed}\ncsv = \"{}\"\n\n[spec]\nkind = \"lattice\"\nd = 2\n\n[params]\nr = 6\np = 0.55\nreplicas = {replicas}\n",
            csv.display()
        ),
    )
}

#[test]
fn green_reports_three_dimensional_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", "[experiment]\nname = \"green\"\nseed = 1\n[params]\nd = 3\n");
    let out = run(&cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    let v = s["results"]["value"].as_f64().unwrap();
    assert!((v - 1.51639).abs() < 1e-4, "{v}");
    assert_eq!(s["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(s["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn unknown_key_exits_two_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", "[experiment]\nname = \"green\"\n[params]\nd = 3\ndd = 3\n");
    let out = run(&cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dd"));
    let ok = write(dir.path(), "ok.toml", "[experiment]\nname = \"green\"\n[params]\nd = 3\n");
    let out = run(&ok, &["--set", "params.dd=3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.dd"));
}

#[test]
fn divergence_and_non_convergence_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.toml", "[experiment]\nname = \"green\"\n[params]\nd = 2\n");
    assert_eq!(run(&g, &[]).status.code(), Some(3));
    let t = write(dir.path(), "t.toml", "[experiment]\nname = \"transience-series\"\n[params]\nd = 3\nt_max = 100\n");
    let out = run(&t, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(summary(&out)["status"], "not-converged");
}

#[test]
fn population_cap_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "b.toml",
        "[experiment]\nname = \"brw\"\nseed = 4\n[spec]\nkind = \"tree-with-lattice-insertions\"\nd = 5\nn0 = 1\nproduct = true\n[params]\np = 0.6\nmax_t = 40\npopulation_cap = 200\n",
    );
    let out = run(&cfg, &[]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(summary(&out)["status"], "cap-abort");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = percolate_config(dir.path(), 64, 17);
    let csv = dir.path().join("perc.csv");
    let mut outputs = Vec::new();
    for threads in ["1", "8", "1"] {
        let out = bin().arg("run").arg(&cfg).env("PERCLAB_THREADS", threads).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        outputs.push((out.stdout, fs::read(&csv).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].1.clone()).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# perclab version="));
    assert_eq!(lines.next().unwrap(), "replica,clusters,largest,open_edges,origin_cluster");
}

#[test]
fn replay_check_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = percolate_config(dir.path(), 40, 3);
    let out = run(&cfg, &[]);
    let path = write(dir.path(), "s.json", &String::from_utf8(out.stdout).unwrap());
    let check = |summary: &Path| bin().arg("replay-check").arg(summary).arg(&cfg).output().unwrap();

    assert_eq!(check(&path).status.code(), Some(0));

    let mut edited: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    edited["seed"] = Value::from(4u64);
    let seed_path = write(dir.path(), "seed.json", &edited.to_string());
    let out = check(&seed_path);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed differs"));

    let other = tempfile::tempdir().unwrap();
    let cfg80 = percolate_config(other.path(), 80, 3);
    let out80 = run(&cfg80, &[]);
    let p80 = write(dir.path(), "r80.json", &String::from_utf8(out80.stdout).unwrap());
    let out = check(&p80);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("replica count differs"));

    edited["seed"] = Value::from(3u64);
    edited["version"] = Value::from("0.0.1");
    let v_path = write(dir.path(), "v.json", &edited.to_string());
    let out = check(&v_path);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version mismatch"));
}

#[test]
fn describe_lists_every_experiment() {
    let out = bin().arg("describe").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in perclab_cli::registry::names() {
        assert!(text.contains(name), "{name}");
    }
    let out = bin().args(["describe", "remco"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("d,g0,g2,dhat2,csBound,finalBound,sqrtD_times_bound"));
    assert_eq!(bin().args(["describe", "nope"]).output().unwrap().status.code(), Some(2));
}

/// Minimal structural check against the shipped schema: required keys,
/// no extra top-level keys, enums and the hash pattern.
fn conforms(schema: &Value, s: &Value) -> Result<(), String> {
    let obj = s.as_object().ok_or("not an object")?;
    let props = schema["properties"].as_object().unwrap();
    for k in schema["required"].as_array().unwrap() {
        if !obj.contains_key(k.as_str().unwrap()) {
            return Err(format!("missing {k}"));
        }
    }
    for k in obj.keys() {
        if !props.contains_key(k) {
            return Err(format!("unexpected key {k}"));
        }
    }
    for key in ["experiment", "status"] {
        if !props[key]["enum"].as_array().unwrap().contains(&s[key]) {
            return Err(format!("{key} = {} not in enum", s[key]));
        }
    }
    let hash = s["config_hash"].as_str().ok_or("hash not a string")?;
    if hash.len() != 64 || !hash.chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase()) {
        return Err("bad hash".into());
    }
    if s["artifact"] != schema["properties"]["artifact"]["const"] {
        return Err("artifact".into());
    }
    if !s["seed"].is_u64() || !s["params"].is_object() || !s["results"].is_object() {
        return Err("types".into());
    }
    if !(s["spec"].is_string() || s["spec"].is_null()) {
        return Err("spec type".into());
    }
    Ok(())
}

#[test]
fn shipped_configs_validate_against_schema_and_stay_in_their_paths() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let schema: Value =
        serde_json::from_str(&fs::read_to_string(root.join("schema/summary.schema.json")).unwrap()).unwrap();
    let configs = root.join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&configs).unwrap() {
        let path = entry.unwrap().path();
        let dir = tempfile::tempdir().unwrap();
        // light parameters keep the suite fast; the experiment and keys are the shipped ones
        let mut extra: Vec<&str> = Vec::new();
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        match name.as_str() {
            "growth" => extra.extend(["--set", "params.r_max=20"]),
            "pc-estimate" => extra.extend(["--set", "params.L=8", "--set", "params.replicas=100"]),
            "trichotomy" => extra.extend(["--set", "params.replicas=50"]),
            "remco" => extra.extend(["--set", "params.d_max=8"]),
            _ => {}
        }
        let out = Command::new(env!("CARGO_BIN_EXE_perclab"))
            .current_dir(dir.path())
            .arg("run")
            .arg(&path)
            .args(&extra)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let s = summary(&out);
        conforms(&schema, &s).unwrap_or_else(|e| panic!("{name}: {e}"));
        let written: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        let expected: Vec<String> = s["outputs"]["csv"].as_str().map(|c| vec![c.to_string()]).unwrap_or_default();
        assert_eq!(written, expected, "{name} wrote outside its configured outputs");
        seen += 1;
    }
    assert_eq!(seen, perclab_cli::registry::EXPERIMENTS.len());
}
