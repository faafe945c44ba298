//! Strict parsing of experiment configs: `[experiment]`, `[spec]` and
//! `[params]` sections of `key = value` lines. Unknown keys are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use perclab_core::{GraphSpec, VertexId};
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::CliError;
use crate::registry::{self, ExperimentDef, ParamKind};

pub const THREADS_ENV: &str = "PERCLAB_THREADS";

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub def: &'static ExperimentDef,
    pub seed: u64,
    /// Worker count; an execution detail, excluded from the config hash.
    pub threads: Option<usize>,
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub spec: Option<GraphSpec>,
    /// Validated parameters with defaults filled in.
    pub params: BTreeMap<String, Value>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses `section.key=value`; the value is read as a TOML literal and falls
/// back to a bare string.
fn apply_override(table: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| bad(format!("override `{assignment}` is not section.key=value")))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| bad(format!("override key `{}` is not section.key", path.trim())))?;
    let raw = raw.trim();
    let value = toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    match entry {
        Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => Err(bad(format!("`{section}` is not a section"))),
    }
}

pub fn load(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, overrides)
}

pub fn parse(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut table: Table = toml::from_str(text).map_err(|e| bad(format!("malformed config: {e}")))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let mut sections = BTreeMap::new();
    for (k, v) in table {
        match (k.as_str(), v) {
            ("experiment" | "spec" | "params", Value::Table(t)) => {
                sections.insert(k, t);
            }
            ("experiment" | "spec" | "params", _) => return Err(bad(format!("`{k}` must be a section"))),
            _ => return Err(bad(format!("unknown key `{k}`"))),
        }
    }
    let experiment = sections.remove("experiment").ok_or_else(|| bad("missing [experiment] section"))?;
    let mut name = None;
    let mut seed = 0u64;
    let mut threads = None;
    let mut csv = None;
    let mut summary = None;
    for (k, v) in experiment {
        let key = format!("experiment.{k}");
        match k.as_str() {
            "name" => name = Some(as_str(&key, &v)?),
            "seed" => seed = as_seed(&key, &v)?,
            "threads" => threads = Some(as_uint(&key, &v)?.max(1) as usize),
            "csv" => csv = Some(PathBuf::from(as_str(&key, &v)?)),
            "summary" => summary = Some(PathBuf::from(as_str(&key, &v)?)),
            _ => return Err(bad(format!("unknown key `{key}`"))),
        }
    }
    let name = name.ok_or_else(|| bad("missing key `experiment.name`"))?;
    let def = registry::find(&name).ok_or_else(|| {
        bad(format!(
            "unknown experiment `{name}` (expected one of: {})",
            registry::names().join(", ")
        ))
    })?;
    let spec = match (def.needs_spec, sections.remove("spec")) {
        (true, Some(t)) => Some(parse_spec(&t)?),
        (true, None) => return Err(bad(format!("experiment `{name}` requires a [spec] section"))),
        (false, Some(_)) => return Err(bad(format!("experiment `{name}` takes no [spec] section"))),
        (false, None) => None,
    };
    let params = validate_params(def, sections.remove("params").unwrap_or_default())?;
    if csv.is_some() && def.csv_header.is_none() {
        return Err(bad(format!("experiment `{name}` writes no CSV; remove `experiment.csv`")));
    }
    Ok(ExperimentConfig {
        def,
        seed,
        threads,
        csv,
        summary,
        spec,
        params,
    })
}

fn parse_spec(t: &Table) -> Result<GraphSpec, CliError> {
    let mut pairs = Vec::new();
    for (k, v) in t {
        let s = match v {
            Value::String(s) => s.clone(),
            Value::Integer(i) => i.to_string(),
            Value::Boolean(b) => b.to_string(),
            _ => return Err(bad(format!("`spec.{k}` must be a string, integer or boolean"))),
        };
        pairs.push((k.clone(), s));
    }
    GraphSpec::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
        .map_err(|e| bad(format!("[spec]: {e}")))
}

fn as_str(key: &str, v: &Value) -> Result<String, CliError> {
    v.as_str().map(str::to_string).ok_or_else(|| bad(format!("`{key}` must be a string")))
}

fn as_uint(key: &str, v: &Value) -> Result<u64, CliError> {
    match v.as_integer() {
        Some(i) if i >= 0 => Ok(i as u64),
        _ => Err(bad(format!("`{key}` must be a non-negative integer"))),
    }
}

/// Seeds use the full 64-bit range, so values above i64::MAX may be quoted.
fn as_seed(key: &str, v: &Value) -> Result<u64, CliError> {
    match v {
        Value::String(s) => s.parse().map_err(|_| bad(format!("`{key}` must be a 64-bit unsigned integer"))),
        _ => as_uint(key, v),
    }
}

fn as_float(key: &str, v: &Value) -> Result<f64, CliError> {
    match v {
        Value::Float(f) if f.is_finite() => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(format!("`{key}` must be a finite real"))),
    }
}

fn as_vertex(key: &str, v: &Value) -> Result<VertexId, CliError> {
    as_str(key, v)?
        .parse()
        .map_err(|e| bad(format!("`{key}`: {e}")))
}

/// Checks types and normalises numbers so equal configs hash equally.
fn normalise(kind: ParamKind, key: &str, v: &Value) -> Result<Value, CliError> {
    let list = |v: &Value| -> Result<Vec<Value>, CliError> {
        v.as_array().cloned().ok_or_else(|| bad(format!("`{key}` must be a list")))
    };
    Ok(match kind {
        ParamKind::UInt => Value::Integer(as_uint(key, v)? as i64),
        ParamKind::Float => Value::Float(as_float(key, v)?),
        ParamKind::Floats => match v {
            Value::Array(xs) => Value::Array(
                xs.iter()
                    .map(|x| as_float(key, x).map(Value::Float))
                    .collect::<Result<_, _>>()?,
            ),
            _ => Value::Array(vec![Value::Float(as_float(key, v)?)]),
        },
        ParamKind::UIntList => Value::Array(
            list(v)?
                .iter()
                .map(|x| as_uint(key, x).map(|u| Value::Integer(u as i64)))
                .collect::<Result<_, _>>()?,
        ),
        ParamKind::Str => Value::String(as_str(key, v)?),
        ParamKind::Vertex => Value::String(as_vertex(key, v)?.to_string()),
        ParamKind::Vertices => Value::Array(
            list(v)?
                .iter()
                .map(|x| as_vertex(key, x).map(|u| Value::String(u.to_string())))
                .collect::<Result<_, _>>()?,
        ),
    })
}

fn validate_params(def: &ExperimentDef, given: Table) -> Result<BTreeMap<String, Value>, CliError> {
    let mut out = BTreeMap::new();
    for (k, v) in &given {
        let p = def.params.iter().find(|p| p.name == k).ok_or_else(|| {
            let known: Vec<_> = def.params.iter().map(|p| p.name).collect();
            bad(format!(
                "unknown key `params.{k}` for experiment `{}` (known: {})",
                def.name,
                known.join(", ")
            ))
        })?;
        out.insert(k.clone(), normalise(p.kind, &format!("params.{k}"), v)?);
    }
    for p in def.params {
        if out.contains_key(p.name) {
            continue;
        }
        if p.required {
            return Err(bad(format!("missing required key `params.{}` for experiment `{}`", p.name, def.name)));
        }
        if let Some(lit) = p.default {
            let v = toml::from_str::<Table>(&format!("v = {lit}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .expect("registry defaults are valid literals");
            out.insert(p.name.to_string(), normalise(p.kind, p.name, &v)?);
        }
    }
    Ok(out)
}

pub fn to_json(v: &Value) -> Json {
    match v {
        Value::String(s) => json!(s),
        Value::Integer(i) => json!(i),
        Value::Float(f) => json!(f),
        Value::Boolean(b) => json!(b),
        Value::Array(xs) => Json::Array(xs.iter().map(to_json).collect()),
        Value::Table(t) => Json::Object(t.iter().map(|(k, v)| (k.clone(), to_json(v))).collect()),
        Value::Datetime(d) => json!(d.to_string()),
    }
}

impl ExperimentConfig {
    /// Everything that determines the results, in canonical JSON form.
    pub fn canonical(&self) -> Json {
        json!({
            "experiment": self.def.name,
            "seed": self.seed.to_string(),
            "spec": self.spec.as_ref().map(|s| s.to_block()),
            "params": self.params_json(),
        })
    }

    pub fn params_json(&self) -> Json {
        Json::Object(self.params.iter().map(|(k, v)| (k.clone(), to_json(v))).collect())
    }

    /// SHA-256 of the canonical form; threads and output paths excluded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Worker count from the config, else the environment, else all cores.
    pub fn thread_count(&self) -> Result<usize, CliError> {
        if let Some(t) = self.threads {
            return Ok(t);
        }
        match std::env::var(THREADS_ENV) {
            Ok(s) => s
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| bad(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
            Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
        }
    }

    pub fn spec(&self) -> &GraphSpec {
        self.spec.as_ref().expect("experiments that read the spec require it")
    }

    fn get(&self, name: &str) -> Option<&Value> {
        self.params.get(name)
    }

    pub fn uint(&self, name: &str) -> u64 {
        self.get(name).and_then(Value::as_integer).expect("validated") as u64
    }

    pub fn uint32(&self, name: &str) -> Result<u32, CliError> {
        u32::try_from(self.uint(name)).map_err(|_| bad(format!("`params.{name}` is too large")))
    }

    pub fn float(&self, name: &str) -> f64 {
        self.get(name).and_then(Value::as_float).expect("validated")
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        self.get(name)
            .and_then(Value::as_array)
            .expect("validated")
            .iter()
            .map(|v| v.as_float().expect("validated"))
            .collect()
    }

    pub fn uint_list(&self, name: &str) -> Vec<u64> {
        self.get(name)
            .and_then(Value::as_array)
            .expect("validated")
            .iter()
            .map(|v| v.as_integer().expect("validated") as u64)
            .collect()
    }

    pub fn string(&self, name: &str) -> String {
        self.get(name).and_then(Value::as_str).expect("validated").to_string()
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.get(name)
            .and_then(Value::as_str)
            .map(|s| s.parse().expect("validated"))
    }

    pub fn vertices(&self, name: &str) -> Option<Vec<VertexId>> {
        self.get(name).and_then(Value::as_array).map(|xs| {
            xs.iter()
                .map(|v| v.as_str().expect("validated").parse().expect("validated"))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GREEN: &str = "[experiment]\nname = \"green\"\nseed = 1\n\n[params]\nd = 3\n";

    #[test]
    fn parses_and_fills_defaults() {
        let c = parse(GREEN, &[]).unwrap();
        assert_eq!(c.def.name, "green");
        assert_eq!(c.string("kind"), "g0");
        assert_eq!(c.uint("d"), 3);
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = parse("[experiment]\nname = \"green\"\n[params]\nd = 3\ndd = 3\n", &[]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("params.dd"), "{e}");
        let e = parse("[experiment]\nname = \"green\"\nsed = 2\n[params]\nd = 3\n", &[]).unwrap_err();
        assert!(e.to_string().contains("experiment.sed"));
        let e = parse("[experiment]\nname = \"growth\"\n[spec]\nkind = \"lattice\"\ndim = 2\n[params]\nr_max = 3\n", &[])
            .unwrap_err();
        assert!(e.to_string().contains("dim"), "{e}");
        let e = parse("[experimnt]\nname = \"green\"\n", &[]).unwrap_err();
        assert!(e.to_string().contains("experimnt"));
    }

    #[test]
    fn missing_and_mistyped() {
        assert!(parse("[experiment]\nname = \"green\"\n", &[]).is_err());
        assert!(parse("[experiment]\nname = \"green\"\n[params]\nd = -3\n", &[]).is_err());
        assert!(parse("[experiment]\nname = \"nope\"\n", &[]).is_err());
        assert!(parse("[experiment]\nname = \"green\"\ncsv = \"x.csv\"\n[params]\nd = 3\n", &[]).is_err());
    }

    #[test]
    fn overrides_apply_and_are_checked() {
        let c = parse(GREEN, &["params.d=7".into(), "experiment.seed=9".into()]).unwrap();
        assert_eq!((c.uint("d"), c.seed), (7, 9));
        let c = parse(GREEN, &["params.kind=g2".into()]).unwrap();
        assert_eq!(c.string("kind"), "g2");
        assert!(parse(GREEN, &["params.dd=7".into()]).unwrap_err().to_string().contains("params.dd"));
    }

    #[test]
    fn hash_ignores_execution_details() {
        let a = parse(GREEN, &[]).unwrap();
        let b = parse(GREEN, &["experiment.threads=8".into(), "experiment.summary=\"s.json\"".into()]).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = parse(GREEN, &["experiment.seed=2".into()]).unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn numbers_normalise() {
        let base = "[experiment]\nname = \"percolate\"\n[spec]\nkind = \"lattice\"\nd = 2\n[params]\nr = 3\n";
        let a = parse(&format!("{base}p = 1\n"), &[]).unwrap();
        let b = parse(&format!("{base}p = 1.0\n"), &[]).unwrap();
        assert_eq!(a.hash(), b.hash());
    }
}
