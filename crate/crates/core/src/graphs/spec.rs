use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GraphError;

/// Declarative description of one of the infinite graph families.
///
/// Tree kinds are rooted: the root sits at level 0 and levels count edges
/// from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphSpec {
    /// Rooted regular tree: the root has `degree` children, every other
    /// vertex has `degree - 1`.
    RegularTree { degree: u32 },
    /// The hypercubic lattice Z^dim.
    Lattice { dim: u32 },
    /// A tree of degree 4d whose edges between levels l_n - 1 and l_n
    /// (n >= n0) are replaced by private copies of Z^d.
    TreeWithLatticeInsertions { d: u32, n0: u32 },
    /// The same 4d tree with each replaced edge subdivided into a path of
    /// three edges instead of a lattice copy.
    StretchedTree { d: u32, n0: u32 },
    /// A regular tree of the given degree in which the root's last neighbour
    /// is the start of an infinite ray.
    TreePlusRay { degree: u32 },
    /// Z^lattice_dim with its origin joined by one edge to the root of a
    /// `tree_degree`-regular tree.
    LatticeJoinTree { lattice_dim: u32, tree_degree: u32 },
    /// base x Z.
    Product(Box<GraphSpec>),
}

pub const DEFAULT_JOIN_LATTICE_DIM: u32 = 99;
pub const DEFAULT_JOIN_TREE_DEGREE: u32 = 10;

impl GraphSpec {
    pub fn product(base: GraphSpec) -> GraphSpec {
        GraphSpec::Product(Box::new(base))
    }

    /// Checks the parameter ranges and the product nesting depth.
    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidSpec(msg));
        match self {
            GraphSpec::RegularTree { degree } | GraphSpec::TreePlusRay { degree } => {
                if *degree < 3 {
                    return bad(format!("tree degree must be at least 3, got {degree}"));
                }
            }
            GraphSpec::Lattice { dim } => {
                if *dim < 1 {
                    return bad("lattice dimension must be at least 1".into());
                }
            }
            GraphSpec::TreeWithLatticeInsertions { d, n0 } | GraphSpec::StretchedTree { d, n0 } => {
                if *d < 1 {
                    return bad("d must be at least 1".into());
                }
                if *n0 < 1 {
                    return bad("n0 must be at least 1".into());
                }
            }
            GraphSpec::LatticeJoinTree {
                lattice_dim,
                tree_degree,
            } => {
                if *lattice_dim < 1 {
                    return bad("lattice dimension must be at least 1".into());
                }
                if *tree_degree < 3 {
                    return bad(format!("tree degree must be at least 3, got {tree_degree}"));
                }
            }
            GraphSpec::Product(base) => {
                if matches!(**base, GraphSpec::Product(_)) {
                    return bad("products nest at most once".into());
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    pub fn is_product(&self) -> bool {
        matches!(self, GraphSpec::Product(_))
    }

    /// The base graph of a product, or the spec itself.
    pub fn base(&self) -> &GraphSpec {
        match self {
            GraphSpec::Product(b) => b,
            other => other,
        }
    }

    /// Degree of the underlying regular tree, for tree-based kinds.
    pub fn tree_degree(&self) -> Option<u32> {
        match self {
            GraphSpec::RegularTree { degree } | GraphSpec::TreePlusRay { degree } => Some(*degree),
            GraphSpec::TreeWithLatticeInsertions { d, .. } | GraphSpec::StretchedTree { d, .. } => {
                Some(4 * d)
            }
            GraphSpec::LatticeJoinTree { tree_degree, .. } => Some(*tree_degree),
            GraphSpec::Lattice { .. } => None,
            GraphSpec::Product(b) => b.tree_degree(),
        }
    }

    /// Upper bound on vertex degree.
    pub fn max_degree(&self) -> usize {
        match self {
            GraphSpec::RegularTree { degree } | GraphSpec::TreePlusRay { degree } => *degree as usize,
            GraphSpec::Lattice { dim } => 2 * *dim as usize,
            GraphSpec::TreeWithLatticeInsertions { d, .. } => 4 * *d as usize,
            GraphSpec::StretchedTree { d, .. } => 4 * *d as usize,
            GraphSpec::LatticeJoinTree {
                lattice_dim,
                tree_degree,
            } => (2 * *lattice_dim as usize).max(*tree_degree as usize) + 1,
            GraphSpec::Product(b) => b.max_degree() + 2,
        }
    }

    /// Parses the line-oriented `key=value` block used in configuration files.
    ///
    /// Recognised keys: `kind`, `d`, `n0`, `degree`, `product`. Blank lines
    /// and `#` comments are skipped; unknown keys are rejected.
    pub fn from_block(text: &str) -> Result<GraphSpec, GraphError> {
        let mut pairs = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| GraphError::InvalidSpec(format!("expected key=value, got `{line}`")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        GraphSpec::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    pub fn from_pairs<'a>(
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<GraphSpec, GraphError> {
        let mut kind = None;
        let mut d = None;
        let mut n0 = None;
        let mut degree = None;
        let mut product = false;
        let num = |k: &str, v: &str| {
            v.parse::<u32>()
                .map_err(|_| GraphError::InvalidSpec(format!("`{k}` must be a non-negative integer, got `{v}`")))
        };
        for (k, v) in pairs {
            match k {
                "kind" => kind = Some(v.to_string()),
                "d" => d = Some(num(k, v)?),
                "n0" => n0 = Some(num(k, v)?),
                "degree" => degree = Some(num(k, v)?),
                "product" => {
                    product = match v {
                        "true" => true,
                        "false" => false,
                        _ => {
                            return Err(GraphError::InvalidSpec(format!(
                                "`product` must be true or false, got `{v}`"
                            )))
                        }
                    }
                }
                other => return Err(GraphError::InvalidSpec(format!("unknown spec key `{other}`"))),
            }
        }
        let kind = kind.ok_or_else(|| GraphError::InvalidSpec("missing `kind`".into()))?;
        let need = |name: &str, v: Option<u32>| {
            v.ok_or_else(|| GraphError::InvalidSpec(format!("kind `{kind}` requires `{name}`")))
        };
        let base = match kind.as_str() {
            "regular-tree" => GraphSpec::RegularTree {
                degree: need("degree", degree)?,
            },
            "lattice" => GraphSpec::Lattice {
                dim: need("d", d)?,
            },
            "tree-with-lattice-insertions" => GraphSpec::TreeWithLatticeInsertions {
                d: need("d", d)?,
                n0: need("n0", n0)?,
            },
            "stretched-tree" => GraphSpec::StretchedTree {
                d: need("d", d)?,
                n0: need("n0", n0)?,
            },
            "tree-plus-ray" => GraphSpec::TreePlusRay {
                degree: need("degree", degree)?,
            },
            "lattice-join-tree" => GraphSpec::LatticeJoinTree {
                lattice_dim: d.unwrap_or(DEFAULT_JOIN_LATTICE_DIM),
                tree_degree: degree.unwrap_or(DEFAULT_JOIN_TREE_DEGREE),
            },
            other => return Err(GraphError::InvalidSpec(format!("unknown graph kind `{other}`"))),
        };
        let spec = if product { GraphSpec::product(base) } else { base };
        spec.validate()?;
        Ok(spec)
    }

    /// Inverse of [`GraphSpec::from_block`].
    pub fn to_block(&self) -> String {
        let (base, product) = match self {
            GraphSpec::Product(b) => (&**b, true),
            other => (other, false),
        };
        let mut out = String::new();
        match base {
            GraphSpec::RegularTree { degree } => {
                out.push_str(&format!("kind=regular-tree\ndegree={degree}\n"))
            }
            GraphSpec::Lattice { dim } => out.push_str(&format!("kind=lattice\nd={dim}\n")),
            GraphSpec::TreeWithLatticeInsertions { d, n0 } => {
                out.push_str(&format!("kind=tree-with-lattice-insertions\nd={d}\nn0={n0}\n"))
            }
            GraphSpec::StretchedTree { d, n0 } => {
                out.push_str(&format!("kind=stretched-tree\nd={d}\nn0={n0}\n"))
            }
            GraphSpec::TreePlusRay { degree } => {
                out.push_str(&format!("kind=tree-plus-ray\ndegree={degree}\n"))
            }
            GraphSpec::LatticeJoinTree {
                lattice_dim,
                tree_degree,
            } => out.push_str(&format!(
                "kind=lattice-join-tree\nd={lattice_dim}\ndegree={tree_degree}\n"
            )),
            GraphSpec::Product(_) => unreachable!("validated specs nest products once"),
        }
        out.push_str(&format!("product={product}\n"));
        out
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::RegularTree { degree } => write!(f, "regular-tree(degree={degree})"),
            GraphSpec::Lattice { dim } => write!(f, "lattice(d={dim})"),
            GraphSpec::TreeWithLatticeInsertions { d, n0 } => {
                write!(f, "tree-with-lattice-insertions(d={d},n0={n0})")
            }
            GraphSpec::StretchedTree { d, n0 } => write!(f, "stretched-tree(d={d},n0={n0})"),
            GraphSpec::TreePlusRay { degree } => write!(f, "tree-plus-ray(degree={degree})"),
            GraphSpec::LatticeJoinTree {
                lattice_dim,
                tree_degree,
            } => write!(f, "lattice-join-tree(d={lattice_dim},degree={tree_degree})"),
            GraphSpec::Product(b) => write!(f, "{b}xZ"),
        }
    }
}

impl FromStr for GraphSpec {
    type Err = GraphError;

    /// Parses the compact form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(base) = s.strip_suffix("xZ") {
            let base: GraphSpec = base.parse()?;
            let spec = GraphSpec::product(base);
            spec.validate()?;
            return Ok(spec);
        }
        let err = || GraphError::InvalidSpec(format!("cannot parse spec `{s}`"));
        let (kind, rest) = s.split_once('(').ok_or_else(err)?;
        let args = rest.strip_suffix(')').ok_or_else(err)?;
        let mut pairs = vec![("kind", kind)];
        for a in args.split(',').filter(|a| !a.is_empty()) {
            let (k, v) = a.split_once('=').ok_or_else(err)?;
            pairs.push((k, v));
        }
        GraphSpec::from_pairs(pairs)
    }
}
