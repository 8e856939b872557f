use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use super::{Graph, GraphError, VertexId};

/// Input families used by experiments and tests.
///
/// The text form is `name(arg, ...)`, e.g. `gnm(100,400)` or
/// `random_forest(100,100000)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFamily {
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Star {
        n: usize,
    },
    BalancedBinaryTree {
        n: usize,
    },
    /// `trees` trees with `n` vertices in total.
    RandomForest {
        trees: usize,
        n: usize,
    },
    DisjointCycles {
        count: usize,
        len: usize,
    },
    Gnm {
        n: usize,
        m: usize,
    },
}

impl GraphFamily {
    pub fn is_forest(&self) -> bool {
        matches!(
            self,
            GraphFamily::Path { .. }
                | GraphFamily::Star { .. }
                | GraphFamily::BalancedBinaryTree { .. }
                | GraphFamily::RandomForest { .. }
        )
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphFamily::Path { n } => write!(f, "path({n})"),
            GraphFamily::Cycle { n } => write!(f, "cycle({n})"),
            GraphFamily::Star { n } => write!(f, "star({n})"),
            GraphFamily::BalancedBinaryTree { n } => write!(f, "balanced_binary_tree({n})"),
            GraphFamily::RandomForest { trees, n } => write!(f, "random_forest({trees},{n})"),
            GraphFamily::DisjointCycles { count, len } => write!(f, "disjoint_cycles({count},{len})"),
            GraphFamily::Gnm { n, m } => write!(f, "gnm({n},{m})"),
        }
    }
}

impl FromStr for GraphFamily {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || GraphError::Parse(format!("unrecognized graph family `{s}`"));
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = s[..open].trim();
        let args: Vec<usize> = s[open + 1..s.len() - 1]
            .split(',')
            .map(|a| {
                let a = a.trim().replace('_', "");
                // accept 1e5 style sizes
                a.parse::<usize>().or_else(|_| {
                    a.parse::<f64>()
                        .ok()
                        .filter(|x| x.fract() == 0.0 && *x >= 0.0)
                        .map(|x| x as usize)
                        .ok_or_else(bad)
                })
            })
            .collect::<Result<_, _>>()?;
        let family = match (name, args.as_slice()) {
            ("path", &[n]) => GraphFamily::Path { n },
            ("cycle", &[n]) => GraphFamily::Cycle { n },
            ("star", &[n]) => GraphFamily::Star { n },
            ("balanced_binary_tree", &[n]) => GraphFamily::BalancedBinaryTree { n },
            ("random_forest", &[trees, n]) => GraphFamily::RandomForest { trees, n },
            ("disjoint_cycles", &[count, len]) => GraphFamily::DisjointCycles { count, len },
            ("gnm", &[n, m]) => GraphFamily::Gnm { n, m },
            _ => return Err(bad()),
        };
        Ok(family)
    }
}

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidParams(msg.into())
}

/// Generates a simple graph of the requested shape; deterministic per seed.
pub fn gen_graph(family: &GraphFamily, seed: u64) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *family {
        GraphFamily::Path { n } => {
            if n == 0 {
                return Err(invalid("path needs at least one vertex"));
            }
            Graph::new(n, (1..n as VertexId).map(|v| (v - 1, v)))
        }
        GraphFamily::Cycle { n } => {
            if n < 3 {
                return Err(invalid("cycle needs at least three vertices"));
            }
            Graph::new(n, (0..n as VertexId).map(|v| (v, (v + 1) % n as VertexId)))
        }
        GraphFamily::Star { n } => {
            if n == 0 {
                return Err(invalid("star needs at least one vertex"));
            }
            Graph::new(n, (1..n as VertexId).map(|v| (0, v)))
        }
        GraphFamily::BalancedBinaryTree { n } => {
            if n == 0 {
                return Err(invalid("tree needs at least one vertex"));
            }
            Graph::new(n, (1..n as VertexId).map(|v| ((v - 1) / 2, v)))
        }
        GraphFamily::RandomForest { trees, n } => {
            if trees == 0 || trees > n {
                return Err(invalid("random_forest needs 1 <= trees <= n"));
            }
            let mut edges = Vec::with_capacity(n - trees);
            let mut start = 0usize;
            for t in 0..trees {
                let size = n / trees + usize::from(t < n % trees);
                for i in 1..size {
                    let parent = rng.gen_range(0..i);
                    edges.push(((start + parent) as VertexId, (start + i) as VertexId));
                }
                start += size;
            }
            // hide the tree layout behind random ids
            let mut perm: Vec<VertexId> = (0..n as VertexId).collect();
            perm.shuffle(&mut rng);
            Graph::new(n, edges.into_iter().map(|(u, v)| (perm[u as usize], perm[v as usize])))
        }
        GraphFamily::DisjointCycles { count, len } => {
            if count == 0 || len < 3 {
                return Err(invalid("disjoint_cycles needs count >= 1 and len >= 3"));
            }
            let n = count * len;
            Graph::new(
                n,
                (0..count).flat_map(|c| {
                    (0..len).map(move |i| ((c * len + i) as VertexId, (c * len + (i + 1) % len) as VertexId))
                }),
            )
        }
        GraphFamily::Gnm { n, m } => {
            if n == 0 {
                return Err(invalid("gnm needs at least one vertex"));
            }
            let max = n as u128 * (n as u128 - 1) / 2;
            if m as u128 > max {
                return Err(invalid(format!("gnm({n},{m}) exceeds n(n-1)/2 edges")));
            }
            let pair = |rng: &mut ChaCha8Rng| {
                let u = rng.gen_range(0..n as VertexId);
                let v = rng.gen_range(0..n as VertexId);
                (u.min(v), u.max(v))
            };
            if (m as u128) * 2 <= max {
                let mut chosen: FxHashSet<(VertexId, VertexId)> = FxHashSet::default();
                let mut edges = Vec::with_capacity(m);
                while edges.len() < m {
                    let e = pair(&mut rng);
                    if e.0 != e.1 && chosen.insert(e) {
                        edges.push(e);
                    }
                }
                Graph::new(n, edges)
            } else {
                // dense request: pick the complement instead
                let mut dropped: FxHashSet<(VertexId, VertexId)> = FxHashSet::default();
                let drop = (max - m as u128) as usize;
                while dropped.len() < drop {
                    let e = pair(&mut rng);
                    if e.0 != e.1 {
                        dropped.insert(e);
                    }
                }
                let all = (0..n as VertexId).flat_map(|u| (u + 1..n as VertexId).map(move |v| (u, v)));
                Graph::new(n, all.filter(|e| !dropped.contains(e)))
            }
        }
    }
}
