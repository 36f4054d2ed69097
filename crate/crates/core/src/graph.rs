//! Undirected simple graphs on vertices `0..n-1`, the generators used by the
//! experiments, and the edge-list text format.
//!
//! Graphs are immutable once built: constructors validate, sort and dedup,
//! after which values can be shared freely across threads.

use crate::rng::{child_seed, SplitMix64};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("probability {0} outside [0,1]")]
    InvalidProbability(f64),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {v} out of range for n={n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("cycle length {0} below 3")]
    CycleTooShort(usize),
    #[error("path with zero vertices")]
    EmptyPath,
    #[error("relabeling is not a permutation of 0..{0}")]
    BadPermutation(usize),
    #[error("cannot pad graph on {have} vertices down to {want}")]
    PadShrinks { have: usize, want: usize },
}

/// Edge-list parse failure, with the 1-based line it occurred on.
#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseErrorKind {
    #[error("malformed header, expected \"n m\"")]
    MalformedHeader,
    #[error("malformed edge line, expected \"u v\"")]
    MalformedEdge,
    #[error("self-loop {0} {0}")]
    SelfLoop(usize),
    #[error("vertex {v} out of range for n={n}")]
    OutOfRange { v: usize, n: usize },
    #[error("edge {u} {v} reversed: require u < v")]
    Reversed { u: usize, v: usize },
    #[error("duplicate edge {u} {v}")]
    Duplicate { u: usize, v: usize },
    #[error("header promised {expected} edges, found {found}")]
    WrongEdgeCount { expected: usize, found: usize },
}

/// Immutable undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        Graph { n, m: 0, adj: vec![Vec::new(); n] }
    }

    pub fn complete(n: usize) -> Graph {
        let adj = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).collect())
            .collect();
        Graph { n, m: n * n.saturating_sub(1) / 2, adj }
    }

    /// Builds from an edge list; duplicates collapse, self-loops and
    /// out-of-range endpoints are errors.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { v: w, n });
                }
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        Ok(Graph { n, m: m / 2, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as (u, v) with u < v, lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Applies a vertex permutation: vertex v becomes perm[v].
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::BadPermutation(self.n));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(GraphError::BadPermutation(self.n));
            }
            seen[p] = true;
        }
        Graph::from_edges(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Same edges on a vertex set grown to `n` (new vertices isolated).
    pub fn padded_to(&self, n: usize) -> Result<Graph, GraphError> {
        if n < self.n {
            return Err(GraphError::PadShrinks { have: self.n, want: n });
        }
        Graph::from_edges(n, self.edges())
    }

    /// Full structural scan: symmetry, sortedness, no loops, edge count.
    pub fn validate(&self) -> bool {
        let mut half_sum = 0;
        for (u, list) in self.adj.iter().enumerate() {
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return false;
            }
            for &v in list {
                if v == u || v >= self.n || !self.adj[v].binary_search(&u).is_ok() {
                    return false;
                }
            }
            half_sum += list.len();
        }
        half_sum == 2 * self.m
    }
}

/// Disjoint paths and cycles given by their vertex counts; describes a
/// maximum-degree-2 graph. Paths of one vertex are isolated vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degree2Spec {
    pub paths: Vec<usize>,
    pub cycles: Vec<usize>,
}

impl Degree2Spec {
    pub fn total_vertices(&self) -> usize {
        self.paths.iter().sum::<usize>() + self.cycles.iter().sum::<usize>()
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.paths.contains(&0) {
            return Err(GraphError::EmptyPath);
        }
        if let Some(&len) = self.cycles.iter().find(|&&len| len < 3) {
            return Err(GraphError::CycleTooShort(len));
        }
        Ok(())
    }
}

/// G(n,p): every unordered pair is an edge independently with probability p.
///
/// Pairs are visited in lexicographic order, one SplitMix64 variate per pair
/// (stream label "gnp"), so the edge set is a pure function of (n, p, seed)
/// on every platform. O(n^2); meant for n up to ~10^4.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut rng = SplitMix64::new(child_seed(seed, "gnp"));
    let mut adj = vec![Vec::new(); n];
    let mut m = 0;
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.next_f64() < p {
                adj[u].push(v);
                adj[v].push(u);
                m += 1;
            }
        }
    }
    // u-rows are pushed in order; v-rows collect earlier u's in order too.
    Ok(Graph { n, m, adj })
}

/// Disjoint union of the specified paths and cycles, vertices numbered
/// consecutively component by component, paths first.
pub fn gen_degree2(spec: &Degree2Spec) -> Result<Graph, GraphError> {
    spec.validate()?;
    let n = spec.total_vertices();
    let mut edges = Vec::new();
    let mut next = 0;
    for &len in &spec.paths {
        for i in 0..len - 1 {
            edges.push((next + i, next + i + 1));
        }
        next += len;
    }
    for &len in &spec.cycles {
        for i in 0..len - 1 {
            edges.push((next + i, next + i + 1));
        }
        edges.push((next, next + len - 1));
        next += len;
    }
    Graph::from_edges(n, edges)
}

/// Random member of the degree-at-most-2 family on exactly `n` vertices.
///
/// Drawing (stream label "pattern"): while vertices remain, pick a component
/// kind uniformly among those feasible (isolated vertex; path, needs >= 2;
/// cycle, needs >= 3), then its length uniformly from the feasible range up
/// to everything remaining. Vertex labels are a uniform random permutation,
/// so component membership is not correlated with index order. Not exactly
/// uniform over the family; deterministic given the seed.
pub fn gen_random_degree2(n: usize, seed: u64) -> Graph {
    let mut rng = SplitMix64::new(child_seed(seed, "pattern"));
    let mut spec = Degree2Spec { paths: Vec::new(), cycles: Vec::new() };
    let mut rem = n;
    while rem > 0 {
        let kind = match rem {
            1 => 0,
            2 => rng.index(2),
            _ => rng.index(3),
        };
        match kind {
            0 => {
                spec.paths.push(1);
                rem -= 1;
            }
            1 => {
                let len = 2 + rng.index(rem - 1);
                spec.paths.push(len);
                rem -= len;
            }
            _ => {
                let len = 3 + rng.index(rem - 2);
                spec.cycles.push(len);
                rem -= len;
            }
        }
    }
    let base = gen_degree2(&spec).expect("generated spec is valid");
    let mut perm: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut perm);
    base.relabeled(&perm).expect("shuffled identity is a permutation")
}

/// Edge-set union on max(n1, n2) vertices; duplicates collapse. Callers
/// wanting a different overlap relabel one side first.
pub fn graph_union(a: &Graph, b: &Graph) -> Graph {
    let n = a.n().max(b.n());
    Graph::from_edges(n, a.edges().chain(b.edges())).expect("unions of valid graphs are valid")
}

/// Parses the edge-list text format: header "n m", then exactly m lines
/// "u v" with u < v; '#' lines are comments.
pub fn read_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut n = 0;
    let mut expected = 0;
    let mut header_seen = false;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        if raw.starts_with('#') {
            continue;
        }
        let mut fields = raw.split(' ');
        if !header_seen {
            let (a, b) = (fields.next(), fields.next());
            match (a.and_then(|s| s.parse().ok()), b.and_then(|s| s.parse().ok()), fields.next()) {
                (Some(nn), Some(mm), None) => {
                    n = nn;
                    expected = mm;
                    header_seen = true;
                }
                _ => return Err(ParseError { line, kind: ParseErrorKind::MalformedHeader }),
            }
            continue;
        }
        let (a, b) = (fields.next(), fields.next());
        let (u, v): (usize, usize) =
            match (a.and_then(|s| s.parse().ok()), b.and_then(|s| s.parse().ok()), fields.next()) {
                (Some(u), Some(v), None) => (u, v),
                _ => return Err(ParseError { line, kind: ParseErrorKind::MalformedEdge }),
            };
        if u == v {
            return Err(ParseError { line, kind: ParseErrorKind::SelfLoop(u) });
        }
        if u > v {
            return Err(ParseError { line, kind: ParseErrorKind::Reversed { u, v } });
        }
        if v >= n {
            return Err(ParseError { line, kind: ParseErrorKind::OutOfRange { v, n } });
        }
        if !seen.insert((u, v)) {
            return Err(ParseError { line, kind: ParseErrorKind::Duplicate { u, v } });
        }
        edges.push((u, v));
    }
    if !header_seen {
        return Err(ParseError { line: last_line + 1, kind: ParseErrorKind::MalformedHeader });
    }
    if edges.len() != expected {
        return Err(ParseError {
            line: last_line,
            kind: ParseErrorKind::WrongEdgeCount { expected, found: edges.len() },
        });
    }
    Ok(Graph::from_edges(n, edges).expect("parser already validated edges"))
}

/// Canonical edge-list text: "n m", then edges in lexicographic order,
/// LF line endings. `read_edge_list(write_edge_list(g)) == g`.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + 12 * g.m());
    out.push_str(&format!("{} {}\n", g.n(), g.m()));
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
