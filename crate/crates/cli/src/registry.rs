//! Static description of every experiment: parameters, defaults and CSV columns.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    UInt,
    Float,
    /// A float or a list of floats.
    Floats,
    UIntList,
    Str,
    /// A vertex in the compact text form, e.g. `t[0,1]`, `p(0,0)`, `t[]@3`.
    Vertex,
    Vertices,
}

impl ParamKind {
    pub fn describe(self) -> &'static str {
        match self {
            ParamKind::UInt => "non-negative integer",
            ParamKind::Float => "real",
            ParamKind::Floats => "real or list of reals",
            ParamKind::UIntList => "list of non-negative integers",
            ParamKind::Str => "string",
            ParamKind::Vertex => "vertex",
            ParamKind::Vertices => "list of vertices",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParamDef {
    pub name: &'static str,
    pub kind: ParamKind,
    /// TOML literal used when the key is absent; `None` with `required =
    /// false` means the experiment picks a spec-dependent default.
    pub default: Option<&'static str>,
    pub required: bool,
    pub help: &'static str,
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentDef {
    pub name: &'static str,
    pub about: &'static str,
    pub needs_spec: bool,
    pub params: &'static [ParamDef],
    /// Header of the CSV data file, when the experiment writes one.
    pub csv_header: Option<&'static str>,
    pub csv_about: &'static str,
}

const fn req(name: &'static str, kind: ParamKind, help: &'static str) -> ParamDef {
    ParamDef { name, kind, default: None, required: true, help }
}

const fn opt(name: &'static str, kind: ParamKind, default: &'static str, help: &'static str) -> ParamDef {
    ParamDef { name, kind, default: Some(default), required: false, help }
}

const fn auto(name: &'static str, kind: ParamKind, help: &'static str) -> ParamDef {
    ParamDef { name, kind, default: None, required: false, help }
}

pub const EXPERIMENTS: &[ExperimentDef] = &[
    ExperimentDef {
        name: "growth",
        about: "Exact ball volumes |B(r)| around the origin with g(r) = ln|B(r)|.",
        needs_spec: true,
        params: &[req("r_max", ParamKind::UInt, "largest radius")],
        csv_header: Some("r,value"),
        csv_about: "value = |B(r)| (exact integer).",
    },
    ExperimentDef {
        name: "cheeger",
        about: "Edge boundary over volume of balls around the origin (an upper witness for the Cheeger constant).",
        needs_spec: true,
        params: &[req("radii", ParamKind::UIntList, "ball radii")],
        csv_header: Some("r,value"),
        csv_about: "value = |edge boundary of B(r)| / |B(r)|.",
    },
    ExperimentDef {
        name: "percolate",
        about: "Bond percolation on the ball of radius r around the origin: cluster statistics per replica.",
        needs_spec: true,
        params: &[
            req("r", ParamKind::UInt, "window radius"),
            req("p", ParamKind::Float, "edge-open probability"),
            opt("replicas", ParamKind::UInt, "100", "independent samples"),
        ],
        csv_header: Some("replica,clusters,largest,open_edges,origin_cluster"),
        csv_about: "one row per replica; origin_cluster is the size of the origin's open cluster.",
    },
    ExperimentDef {
        name: "trichotomy",
        about: "Law of the number of open clusters joining ball(r) to the boundary of ball(R).",
        needs_spec: true,
        params: &[
            req("r", ParamKind::UInt, "inner radius"),
            req("R", ParamKind::UInt, "outer radius"),
            req("p", ParamKind::Float, "edge-open probability"),
            opt("replicas", ParamKind::UInt, "1000", "independent samples"),
        ],
        csv_header: Some("count,frequency"),
        csv_about: "empirical law of the boundary-cluster count.",
    },
    ExperimentDef {
        name: "twopoint",
        about: "Monte Carlo estimate of P(x <-> y) inside ball({x, y}, R).",
        needs_spec: true,
        params: &[
            auto("x", ParamKind::Vertex, "first vertex (default: origin)"),
            req("y", ParamKind::Vertex, "second vertex"),
            req("p", ParamKind::Floats, "edge-open probability or a sweep of them"),
            req("R", ParamKind::UInt, "window radius around {x, y}"),
            opt("replicas", ParamKind::UInt, "1000", "samples per probability"),
        ],
        csv_header: Some("p,estimate,stderr"),
        csv_about: "one row per probability.",
    },
    ExperimentDef {
        name: "brw",
        about: "Modified branching random walk on a tree with lattice insertions; counts returns to the start.",
        needs_spec: true,
        params: &[
            req("p", ParamKind::Float, "edge-open probability"),
            req("max_t", ParamKind::UInt, "number of generations"),
            opt("replicas", ParamKind::UInt, "1", "independent runs"),
            opt("population_cap", ParamKind::UInt, "1000000", "abort a run above this many particles"),
            opt("copy_window", ParamKind::UInt, "8", "l1 radius for sampling lattice-copy clusters"),
            auto("start", ParamKind::Vertex, "start vertex (default: origin)"),
        ],
        csv_header: Some("replica,returns,visited,final_population,generations,aborted"),
        csv_about: "one row per run.",
    },
    ExperimentDef {
        name: "offspring",
        about: "Law of the number of level-l_n tree vertices reached from one level-l_(n-1) vertex inside a slab of the product graph.",
        needs_spec: false,
        params: &[
            req("d", ParamKind::UInt, "lattice dimension of the insertions"),
            req("n", ParamKind::UInt, "insertion index (>= 2)"),
            req("p", ParamKind::Float, "edge-open probability"),
            opt("replicas", ParamKind::UInt, "200", "independent samples"),
            opt("window", ParamKind::UInt, "2", "slab padding around each lattice copy"),
        ],
        csv_header: Some("count,frequency"),
        csv_about: "empirical offspring law.",
    },
    ExperimentDef {
        name: "transience-series",
        about: "Partial sums of the expected-returns series of the dominating walk; converges iff d > 4.",
        needs_spec: false,
        params: &[
            req("d", ParamKind::UInt, "dimension"),
            opt("t_max", ParamKind::UInt, "2000", "number of terms"),
        ],
        csv_header: Some("t,partialSum"),
        csv_about: "partial sum after t terms.",
    },
    ExperimentDef {
        name: "green",
        about: "Lattice Green's function integrals through the Bessel representation.",
        needs_spec: false,
        params: &[
            req("d", ParamKind::UInt, "dimension"),
            opt("kind", ParamKind::Str, "\"g0\"", "g0 = int 1/(1-Dhat), g2 = int 1/(1-Dhat)^2"),
        ],
        csv_header: None,
        csv_about: "no CSV; the value is in the summary.",
    },
    ExperimentDef {
        name: "remco",
        about: "The axis-sum bound chain swept over dimensions.",
        needs_spec: false,
        params: &[
            opt("d_min", ParamKind::UInt, "6", "first dimension (>= 6)"),
            opt("d_max", ParamKind::UInt, "24", "last dimension"),
            opt("o_beta", ParamKind::Float, "1.0", "constant standing for the 1 + O(beta) factor"),
        ],
        csv_header: Some("d,g0,g2,dhat2,csBound,finalBound,sqrtD_times_bound"),
        csv_about: "one row per dimension.",
    },
    ExperimentDef {
        name: "cutset",
        about: "Minimum edge cut separating a target set from the outside of a ball; certificate when at most k edges.",
        needs_spec: true,
        params: &[
            auto("target", ParamKind::Vertices, "target vertices (default: [origin])"),
            req("k", ParamKind::UInt, "certificate size bound"),
            req("radius", ParamKind::UInt, "search radius"),
        ],
        csv_header: None,
        csv_about: "no CSV; the cut is in the summary.",
    },
    ExperimentDef {
        name: "pc-estimate",
        about: "Bisection for the crossing threshold of a self-dual box on a lattice.",
        needs_spec: true,
        params: &[
            req("L", ParamKind::UInt, "box side"),
            opt("tolerance", ParamKind::Float, "0.001", "bracket width at which bisection stops"),
            opt("replicas", ParamKind::UInt, "1000", "boxes per probe"),
            opt("lo", ParamKind::Float, "0.0", "lower end of the initial bracket"),
            opt("hi", ParamKind::Float, "1.0", "upper end of the initial bracket"),
        ],
        csv_header: Some("p,frequency"),
        csv_about: "crossing frequency at every probe, in probe order.",
    },
];

pub fn find(name: &str) -> Option<&'static ExperimentDef> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    EXPERIMENTS.iter().map(|e| e.name).collect()
}

/// Text printed by `describe`.
pub fn describe(def: &ExperimentDef) -> String {
    let mut out = format!("{}\n  {}\n\n", def.name, def.about);
    if def.needs_spec {
        out.push_str("[spec] required: kind = regular-tree | lattice | tree-with-lattice-insertions |\n");
        out.push_str("  stretched-tree | tree-plus-ray | lattice-join-tree; d, n0, degree as the kind needs;\n");
        out.push_str("  product = true for the product with Z.\n\n");
    } else {
        out.push_str("[spec] not used.\n\n");
    }
    out.push_str("[params]\n");
    for p in def.params {
        let status = match (p.required, p.default) {
            (true, _) => "required".to_string(),
            (false, Some(d)) => format!("default {d}"),
            (false, None) => "optional".to_string(),
        };
        out.push_str(&format!("  {} ({}, {}): {}\n", p.name, p.kind.describe(), status, p.help));
    }
    out.push('\n');
    match def.csv_header {
        Some(h) => out.push_str(&format!("CSV columns: {h}\n  {}\n", def.csv_about)),
        None => out.push_str(&format!("CSV: none; {}\n", def.csv_about)),
    }
    out
}
