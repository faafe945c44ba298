//! One runner per experiment. Each returns plain statistics; provenance is
//! attached by the caller.

use perclab_core::analytics::{
    cheeger_profile, green0, green2, profile_csv, remco_bound, remco_sweep_csv, volume_growth_profile,
};
use perclab_core::branching::{expected_returns_series, offspring_simulation, simulate_brw, BrwConfig};
use perclab_core::clusters::{boundary_cluster_count, find_bounded_cutset};
use perclab_core::graphs::ball;
use perclab_core::percolation::{clusters, estimate_pc_within, sample_bonds, sweep_csv, two_point_estimate};
use perclab_core::rng::hash_words;
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Some run stopped at the population cap; the outputs are partial.
    CapAbort,
    /// The computed quantity did not converge.
    NotConverged,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::CapAbort => "cap-abort",
            Status::NotConverged => "not-converged",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotConverged => 3,
            Status::CapAbort => 4,
        }
    }
}

pub struct Outcome {
    pub results: Json,
    /// CSV body including its header line.
    pub csv: Option<String>,
    pub status: Status,
}

fn ok(results: Json, csv: Option<String>) -> Result<Outcome, CliError> {
    Ok(Outcome {
        results,
        csv,
        status: Status::Ok,
    })
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match cfg.def.name {
        "growth" => growth(cfg),
        "cheeger" => cheeger(cfg),
        "percolate" => percolate(cfg),
        "trichotomy" => trichotomy(cfg),
        "twopoint" => twopoint(cfg),
        "brw" => brw(cfg),
        "offspring" => offspring(cfg),
        "transience-series" => transience(cfg),
        "green" => green(cfg),
        "remco" => remco(cfg),
        "cutset" => cutset(cfg),
        "pc-estimate" => pc_estimate(cfg),
        other => unreachable!("registry and runners disagree on `{other}`"),
    }
}

fn growth(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let prof = volume_growth_profile(cfg.spec(), cfg.uint32("r_max")?)?;
    let last = prof.volumes.len() - 1;
    let results = json!({
        "method": format!("{:?}", prof.method),
        "truncated": prof.truncated,
        "radius_reached": last,
        "volume": prof.volumes[last].to_string(),
        "log_volume": prof.log_volume[last],
        "growth_rate": prof.per_radius().last().map(|x| x.1),
        "normalized_growth": prof.normalized().last().map(|x| x.1),
    });
    Ok(Outcome {
        results,
        csv: Some(prof.to_csv()),
        status: if prof.truncated { Status::CapAbort } else { Status::Ok },
    })
}

fn cheeger(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let radii = cfg
        .uint_list("radii")
        .into_iter()
        .map(|r| u32::try_from(r).map_err(|_| bad("radius too large")))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = cheeger_profile(cfg.spec(), &radii)?;
    let results = json!({
        "ratios": rows.iter().map(|&(r, v)| json!({"r": r, "value": v})).collect::<Vec<_>>(),
        "smallest": rows.iter().map(|x| x.1).fold(f64::INFINITY, f64::min),
    });
    ok(results, Some(profile_csv(&rows)))
}

fn percolate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.spec();
    let origin = spec.origin();
    let window = ball(spec, &origin, cfg.uint32("r")?)?;
    let p = cfg.float("p");
    let o = window.index_of(&origin)?;
    // validate p once before fanning out
    sample_bonds(&window, p, cfg.seed, 0)?;
    let rows: Vec<(usize, usize, usize, usize)> = (0..cfg.uint("replicas"))
        .into_par_iter()
        .map(|rep| {
            let s = sample_bonds(&window, p, cfg.seed, rep).expect("probability checked");
            let c = clusters(&s);
            (c.cluster_count(), c.largest(), s.open_count(), c.size_of(o))
        })
        .collect();
    let mut csv = String::from("replica,clusters,largest,open_edges,origin_cluster\n");
    for (i, r) in rows.iter().enumerate() {
        csv.push_str(&format!("{i},{},{},{},{}\n", r.0, r.1, r.2, r.3));
    }
    let col = |f: fn(&(usize, usize, usize, usize)) -> usize| -> Vec<f64> { rows.iter().map(|r| f(r) as f64).collect() };
    let (mc, mc_se) = mean_stderr(&col(|r| r.0));
    let (ml, ml_se) = mean_stderr(&col(|r| r.1));
    let (mo, mo_se) = mean_stderr(&col(|r| r.3));
    let edges = window.edge_count().max(1) as f64;
    let (mf, _) = mean_stderr(&col(|r| r.2));
    let results = json!({
        "vertices": window.vertex_count(),
        "edges": window.edge_count(),
        "mean_clusters": mc, "mean_clusters_stderr": mc_se,
        "mean_largest": ml, "mean_largest_stderr": ml_se,
        "mean_origin_cluster": mo, "mean_origin_cluster_stderr": mo_se,
        "mean_open_fraction": mf / edges,
    });
    ok(results, Some(csv))
}

fn trichotomy(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let rep = boundary_cluster_count(
        cfg.spec(),
        cfg.uint32("r")?,
        cfg.uint32("R")?,
        cfg.float("p"),
        cfg.uint("replicas"),
        cfg.seed,
    )?;
    let results = json!({
        "mean": rep.mean,
        "stderr": rep.stderr,
        "frequency_of_one": rep.frequency(1),
        "histogram": rep.histogram.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
    });
    ok(results, Some(rep.histogram_csv()))
}

fn twopoint(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.spec();
    let x = cfg.vertex("x").unwrap_or_else(|| spec.origin());
    let y = cfg.vertex("y").expect("required");
    let mut rows = Vec::new();
    for p in cfg.floats("p") {
        let est = two_point_estimate(spec, &x, &y, p, cfg.uint32("R")?, cfg.uint("replicas"), cfg.seed)?;
        rows.push((p, est));
    }
    let results = json!({
        "x": x.to_string(),
        "y": y.to_string(),
        "estimates": rows.iter().map(|(p, e)| json!({"p": p, "estimate": e.estimate, "stderr": e.stderr})).collect::<Vec<_>>(),
    });
    ok(results, Some(sweep_csv(&rows)))
}

fn brw(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.spec();
    let start = cfg.vertex("start").unwrap_or_else(|| spec.origin());
    let config = BrwConfig {
        max_t: cfg.uint32("max_t")?,
        population_cap: cfg.uint("population_cap"),
        copy_window: cfg.uint32("copy_window")?,
    };
    let p = cfg.float("p");
    let runs = (0..cfg.uint("replicas"))
        .into_par_iter()
        .map(|r| simulate_brw(spec, &start, p, &config, hash_words(&[cfg.seed, r])))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("replica,returns,visited,final_population,generations,aborted\n");
    for (i, r) in runs.iter().enumerate() {
        csv.push_str(&format!(
            "{i},{},{},{},{},{}\n",
            r.returns,
            r.visited.len(),
            r.final_population,
            r.generations,
            r.aborted
        ));
    }
    let returns: Vec<f64> = runs.iter().map(|r| r.returns as f64).collect();
    let (mean, stderr) = mean_stderr(&returns);
    let aborted = runs.iter().filter(|r| r.aborted).count();
    let results = json!({
        "start": start.to_string(),
        "mean_returns": mean,
        "mean_returns_stderr": stderr,
        "aborted_runs": aborted,
        "copy_window_hits": runs.iter().map(|r| r.copy_window_hits).sum::<u64>(),
        "extinct_runs": runs.iter().filter(|r| r.final_population == 0).count(),
    });
    Ok(Outcome {
        results,
        csv: Some(csv),
        status: if aborted > 0 { Status::CapAbort } else { Status::Ok },
    })
}

fn offspring(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let rep = offspring_simulation(
        cfg.uint32("d")?,
        cfg.uint32("n")?,
        cfg.float("p"),
        cfg.uint("replicas"),
        cfg.seed,
        cfg.uint32("window")?,
    )?;
    let mut csv = String::from("count,frequency\n");
    for (k, v) in &rep.histogram {
        csv.push_str(&format!("{k},{}\n", *v as f64 / rep.replicas.max(1) as f64));
    }
    let results = json!({
        "level_size": rep.level_size,
        "mean": rep.mean,
        "stderr": rep.stderr,
        "lower_bound_only": rep.lower_bound_only,
    });
    ok(results, Some(csv))
}

fn transience(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = expected_returns_series(cfg.uint32("d")?, cfg.uint32("t_max")?)?;
    let results = json!({
        "converged": s.converged,
        "ratio": s.ratio,
        "final_partial_sum": s.partial_sums.last(),
        "tail_bound": if s.tail_bound.is_finite() { json!(s.tail_bound) } else { json!("inf") },
    });
    Ok(Outcome {
        results,
        csv: Some(s.to_csv()),
        status: if s.converged { Status::Ok } else { Status::NotConverged },
    })
}

fn green(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let d = cfg.uint32("d")?;
    let q = match cfg.string("kind").as_str() {
        "g0" => green0(d)?,
        "g2" => green2(d)?,
        other => return Err(bad(format!("`params.kind` must be g0 or g2, got `{other}`"))),
    };
    let results = json!({
        "value": q.value,
        "abs_error_estimate": q.abs_error_estimate,
        "t_cut": q.t_cut,
        "panels": q.panels,
    });
    ok(results, None)
}

fn remco(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (lo, hi) = (cfg.uint32("d_min")?, cfg.uint32("d_max")?);
    if lo < 6 || hi < lo {
        return Err(bad(format!("need 6 <= d_min <= d_max, got {lo}..{hi}")));
    }
    let reports = (lo..=hi)
        .into_par_iter()
        .map(|d| remco_bound(d, cfg.float("o_beta")))
        .collect::<Result<Vec<_>, _>>()?;
    let first = reports[0].sqrt_d_times_bound;
    let results = json!({
        "o_beta_constant": cfg.float("o_beta"),
        "all_cs_hold": reports.iter().all(|r| r.cs_holds),
        "sqrt_d_bound_at_most_first": reports.iter().all(|r| r.sqrt_d_times_bound <= first),
        "max_sqrt_d_times_bound": reports.iter().map(|r| r.sqrt_d_times_bound).fold(f64::MIN, f64::max),
    });
    ok(results, Some(remco_sweep_csv(&reports)))
}

fn cutset(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.spec();
    let target = cfg.vertices("target").unwrap_or_else(|| vec![spec.origin()]);
    let k = cfg.uint("k") as usize;
    let search = find_bounded_cutset(spec, &target, k, cfg.uint32("radius")?)?;
    let certificate = search.certificate.as_ref().map(|c| {
        json!({
            "k": c.k,
            "verify_radius": c.verify_radius,
            "cut_edges": c.cut_edges.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect::<Vec<_>>(),
        })
    });
    let results = json!({
        "target": target.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "min_cut": search.min_cut,
        "search_radius": search.search_radius,
        "certificate": certificate,
    });
    ok(results, None)
}

fn pc_estimate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let est = estimate_pc_within(
        cfg.spec(),
        cfg.uint("L") as usize,
        (cfg.float("lo"), cfg.float("hi")),
        cfg.float("tolerance"),
        cfg.uint("replicas"),
        cfg.seed,
    )?;
    let mut csv = String::from("p,frequency\n");
    for (p, f) in &est.probes {
        csv.push_str(&format!("{p},{f}\n"));
    }
    let results = json!({
        "p": est.p,
        "lo": est.lo,
        "hi": est.hi,
        "box_side": est.box_side,
        "probes": est.probes.len(),
    });
    ok(results, Some(csv))
}
