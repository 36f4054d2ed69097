//! Pattern-side preparation: maximalizing a degree-at-most-2 graph and
//! splitting its vertex set into the seven classes the staged embedding
//! consumes.
//!
//! Class `6` is a 3-independent set of degree-2 vertices, class `0` is the
//! union of their neighbor pairs, and classes `1..=5` are 2-independent.
//! Being 2-independent is what lets a whole class be embedded in one
//! bipartite-matching round: no two of its vertices share a neighbor, so
//! their host candidates never interact.

use crate::eps_unit;
use crate::graph::{Degree2Spec, gen_degree2, Graph, GraphError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("vertex {v} has degree {degree} > 2")]
    DegreeTooHigh { v: usize, degree: usize },
    #[error("pattern is not maximal: edge {u}-{v} is still addable")]
    NotMaximal { u: usize, v: usize },
    #[error("no 3-independent set of size {target}: found only {found}")]
    InsufficientIndependentSet { target: usize, found: usize },
    #[error("partition infeasible: {0}")]
    PartitionInfeasible(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Seven-class labeling of a pattern's vertex set, plus the pairing of each
/// class-6 vertex with its two class-0 neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternPartition {
    classes: Vec<u8>,
    class_sizes: [usize; 7],
    /// (w, a, b) with {a, b} the neighbors of w, a < b; one triple per
    /// class-6 vertex, in pick order.
    w6_pairs: Vec<(usize, usize, usize)>,
}

impl PatternPartition {
    pub fn n(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, v: usize) -> u8 {
        self.classes[v]
    }

    pub fn classes(&self) -> &[u8] {
        &self.classes
    }

    pub fn class_sizes(&self) -> [usize; 7] {
        self.class_sizes
    }

    pub fn w6_pairs(&self) -> &[(usize, usize, usize)] {
        &self.w6_pairs
    }

    /// Vertices of one class, ascending.
    pub fn class_vertices(&self, class: u8) -> Vec<usize> {
        (0..self.classes.len()).filter(|&v| self.classes[v] == class).collect()
    }

    /// Text form: one "v label" line per vertex, then one "w a b" line per
    /// class-6 triple.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, c) in self.classes.iter().enumerate() {
            out.push_str(&format!("{v} {c}\n"));
        }
        for &(w, a, b) in &self.w6_pairs {
            out.push_str(&format!("{w} {a} {b}\n"));
        }
        out
    }
}

/// Assembles a partition from explicit labels; sizes are recomputed and
/// nothing is verified. For in-crate tests.
#[cfg(test)]
pub(crate) fn pattern_partition_from_parts(
    classes: Vec<u8>,
    w6_pairs: Vec<(usize, usize, usize)>,
) -> PatternPartition {
    let mut class_sizes = [0usize; 7];
    for &c in &classes {
        class_sizes[c as usize] += 1;
    }
    PatternPartition { classes, class_sizes, w6_pairs }
}

fn check_max_degree_2(h: &Graph) -> Result<(), PatternError> {
    for v in 0..h.n() {
        if h.degree(v) > 2 {
            return Err(PatternError::DegreeTooHigh { v, degree: h.degree(v) });
        }
    }
    Ok(())
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Adds edges until no more can be added without exceeding degree 2.
///
/// A pair is addable iff its endpoints are distinct, non-adjacent and both
/// of degree < 2. Additions prefer endpoints in distinct components (so
/// paths are chained before being closed into a cycle), smallest index pair
/// first. The result is a disjoint union of cycles with at most one path
/// component left over; its endpoints are the (at most two) vertices that
/// remain deficient. `deficient_vertices` reads them off.
pub fn maximalize(h: &Graph) -> Result<Graph, PatternError> {
    check_max_degree_2(h)?;
    let n = h.n();
    let mut adj: Vec<Vec<usize>> = (0..n).map(|v| h.neighbors(v).to_vec()).collect();
    let mut dsu = Dsu::new(n);
    for (u, v) in h.edges() {
        dsu.union(u, v);
    }
    loop {
        let candidates: Vec<usize> = (0..n).filter(|&v| adj[v].len() < 2).collect();
        let mut cross: Option<(usize, usize)> = None;
        let mut same: Option<(usize, usize)> = None;
        'scan: for (i, &u) in candidates.iter().enumerate() {
            for &v in &candidates[i + 1..] {
                if adj[u].contains(&v) {
                    continue;
                }
                if dsu.find(u) != dsu.find(v) {
                    cross = Some((u, v));
                    break 'scan;
                }
                if same.is_none() {
                    same = Some((u, v));
                }
            }
        }
        match cross.or(same) {
            Some((u, v)) => {
                adj[u].push(v);
                adj[v].push(u);
                dsu.union(u, v);
            }
            None => break,
        }
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)).collect::<Vec<_>>())
        .collect();
    Ok(Graph::from_edges(n, edges)?)
}

/// Vertices of degree < 2. A maximal pattern has at most two (two only in
/// the corner where they form a lone edge component).
pub fn deficient_vertices(h: &Graph) -> Vec<usize> {
    (0..h.n()).filter(|&v| h.degree(v) < 2).collect()
}

/// Graph with an edge for every pair at distance 1 or 2.
pub fn square(h: &Graph) -> Graph {
    let mut edges = Vec::new();
    for u in 0..h.n() {
        for &v in h.neighbors(u) {
            if v > u {
                edges.push((u, v));
            }
            for &w in h.neighbors(v) {
                if w > u {
                    edges.push((u, w));
                }
            }
        }
    }
    Graph::from_edges(h.n(), edges).expect("square preserves vertex range")
}

/// Vertices within distance <= `radius` of `start` (excluding nothing).
fn ball(h: &Graph, start: usize, radius: usize) -> Vec<usize> {
    let mut frontier = vec![start];
    let mut seen = vec![start];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in h.neighbors(u) {
                if !seen.contains(&v) {
                    seen.push(v);
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Picks exactly `target` degree-2 vertices pairwise at distance > 3, by
/// ascending index scan; each pick excludes everything within distance 3.
pub fn greedy_3independent(h: &Graph, target: usize) -> Result<Vec<usize>, PatternError> {
    check_max_degree_2(h)?;
    let mut excluded = vec![false; h.n()];
    let mut picks = Vec::with_capacity(target);
    for v in 0..h.n() {
        if picks.len() == target {
            break;
        }
        if excluded[v] || h.degree(v) != 2 {
            continue;
        }
        picks.push(v);
        for u in ball(h, v, 3) {
            excluded[u] = true;
        }
    }
    if picks.len() < target {
        return Err(PatternError::InsufficientIndependentSet { target, found: picks.len() });
    }
    Ok(picks)
}

/// Walk order of one component: for a path, from its smaller endpoint; for
/// a cycle, from its smallest vertex toward that vertex's smaller neighbor.
/// `start` is the smallest unvisited vertex of the component.
fn component_walk(h: &Graph, start: usize, visited: &mut [bool]) -> (Vec<usize>, bool) {
    let mut members = vec![start];
    visited[start] = true;
    let mut i = 0;
    while i < members.len() {
        for &v in h.neighbors(members[i]) {
            if !visited[v] {
                visited[v] = true;
                members.push(v);
            }
        }
        i += 1;
    }
    let endpoint = members.iter().copied().filter(|&v| h.degree(v) <= 1).min();
    let is_cycle = endpoint.is_none();
    // BFS from the smallest vertex visits in ascending index order within
    // each layer, so min(members) = start.
    let first = endpoint.unwrap_or(start);
    let mut order = Vec::with_capacity(members.len());
    order.push(first);
    let mut prev = usize::MAX;
    let mut current = first;
    while order.len() < members.len() {
        let next = h
            .neighbors(current)
            .iter()
            .copied()
            .find(|&v| v != prev && v != first)
            .expect("walkable degree<=2 component");
        order.push(next);
        prev = current;
        current = next;
    }
    (order, is_cycle)
}

/// Distance-2 coloring with 5 colors, sequential per component, choosing the
/// least-loaded permitted color (lowest index on ties). On cycles the
/// wrap-around neighbors of the first two vertices are part of the
/// constraint set, so the closing vertices stay conflict-free; with maximum
/// degree 2 at most 4 colors are ever forbidden.
fn distance2_coloring(h: &Graph) -> Vec<u8> {
    let n = h.n();
    let mut color = vec![u8::MAX; n];
    let mut load = [0usize; 5];
    let mut visited = vec![false; n];
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let (order, is_cycle) = component_walk(h, start, &mut visited);
        let k = order.len();
        for j in 0..k {
            let mut forbidden = [false; 5];
            let mut mark = |v: usize| {
                if color[v] != u8::MAX {
                    forbidden[color[v] as usize] = true;
                }
            };
            if is_cycle && k > 2 {
                for d in [k - 2, k - 1, 1, 2] {
                    let v = order[(j + d) % k];
                    if v != order[j] {
                        mark(v);
                    }
                }
            } else {
                if j >= 1 {
                    mark(order[j - 1]);
                }
                if j >= 2 {
                    mark(order[j - 2]);
                }
            }
            let pick = (0..5)
                .filter(|&c| !forbidden[c])
                .min_by_key(|&c| (load[c], c))
                .expect("at most 4 of 5 colors forbidden");
            color[order[j]] = pick as u8;
            load[pick] += 1;
        }
    }
    color
}

/// Re-verifies every structural invariant of a finished partition.
fn verify_partition(h: &Graph, pp: &PatternPartition, unit: usize) -> Result<(), PatternError> {
    let fail = |msg: String| Err(PatternError::PartitionInfeasible(msg));
    let n = h.n();
    let mut sizes = [0usize; 7];
    for v in 0..n {
        sizes[pp.classes[v] as usize] += 1;
    }
    if sizes != pp.class_sizes {
        return fail("class size bookkeeping mismatch".into());
    }
    if sizes.iter().sum::<usize>() != n {
        return fail("classes do not cover the vertex set".into());
    }
    if sizes[6] != 2 * unit || sizes[0] != 4 * unit {
        return fail(format!("|W6|={} |W0|={} but unit={unit}", sizes[6], sizes[0]));
    }
    for i in 1..=5 {
        if sizes[i] < 2 * unit {
            return fail(format!("|W{i}|={} below 2*unit={}", sizes[i], 2 * unit));
        }
    }
    // Independence: distance > 3 within class 6, distance > 2 within 1..=5.
    for v in 0..n {
        let c = pp.classes[v];
        let radius = match c {
            6 => 3,
            1..=5 => 2,
            _ => continue,
        };
        for u in ball(h, v, radius) {
            if u != v && pp.classes[u] == c {
                return fail(format!("class {c} vertices {v} and {u} within distance {radius}"));
            }
        }
    }
    // Class 6 degree and the neighbor pairing.
    let mut w0_seen = vec![false; n];
    for &(w, a, b) in &pp.w6_pairs {
        if pp.classes[w] != 6 || h.degree(w) != 2 {
            return fail(format!("triple head {w} is not a degree-2 class-6 vertex"));
        }
        if h.neighbors(w) != [a, b] {
            return fail(format!("triple ({w},{a},{b}) does not match its neighborhood"));
        }
        for x in [a, b] {
            if pp.classes[x] != 0 || std::mem::replace(&mut w0_seen[x], true) {
                return fail(format!("neighbor {x} not a fresh class-0 vertex"));
            }
        }
    }
    if pp.w6_pairs.len() != sizes[6] || w0_seen.iter().filter(|&&s| s).count() != sizes[0] {
        return fail("class 0 is not exactly the union of the neighbor pairs".into());
    }
    Ok(())
}

/// Splits a maximal pattern into the seven classes.
///
/// Class 6 comes from the greedy 3-independent scan (size `2*ceil(eps*n)`),
/// class 0 is the union of its neighbor pairs, and the rest of the labeling
/// is the distance-2 coloring with classes 0 and 6 carved out afterwards.
/// All invariants are re-verified before returning.
pub fn partition_pattern(h: &Graph, eps: f64) -> Result<PatternPartition, PatternError> {
    let n = h.n();
    if !(eps > 0.0) || eps > 1.0 {
        return Err(PatternError::PartitionInfeasible(format!("eps={eps} outside (0,1]")));
    }
    if 2.0 * eps * (n as f64) < 1.0 - 1e-9 {
        return Err(PatternError::PartitionInfeasible(format!(
            "2*eps*n = {} < 1: n too small for eps={eps}",
            2.0 * eps * (n as f64)
        )));
    }
    check_max_degree_2(h)?;
    let deficient = deficient_vertices(h);
    if deficient.len() > 2 {
        let (u, v) = (deficient[0], deficient[1]);
        return Err(PatternError::NotMaximal { u, v });
    }
    if let [u, v] = deficient[..] {
        if !h.has_edge(u, v) {
            return Err(PatternError::NotMaximal { u, v });
        }
    }
    let unit = eps_unit(n, eps);
    let w6 = greedy_3independent(h, 2 * unit).map_err(|e| match e {
        PatternError::InsufficientIndependentSet { target, found } => {
            PatternError::PartitionInfeasible(format!(
                "only {found} of {target} 3-independent degree-2 vertices available"
            ))
        }
        other => other,
    })?;

    let mut classes = distance2_coloring(h).iter().map(|&c| c + 1).collect::<Vec<u8>>();
    let mut w6_pairs = Vec::with_capacity(w6.len());
    for &w in &w6 {
        let nb = h.neighbors(w);
        debug_assert_eq!(nb.len(), 2);
        w6_pairs.push((w, nb[0], nb[1]));
        classes[w] = 6;
        classes[nb[0]] = 0;
        classes[nb[1]] = 0;
    }
    let mut class_sizes = [0usize; 7];
    for &c in &classes {
        class_sizes[c as usize] += 1;
    }
    for i in 1..=5 {
        if class_sizes[i] < 2 * unit {
            return Err(PatternError::PartitionInfeasible(format!(
                "|W{i}| = {} below 2*ceil(eps*n) = {}",
                class_sizes[i],
                2 * unit
            )));
        }
    }
    let pp = PatternPartition { classes, class_sizes, w6_pairs };
    verify_partition(h, &pp, unit)?;
    Ok(pp)
}

/// Convenience for building test patterns: one cycle on n vertices.
pub fn cycle(n: usize) -> Graph {
    gen_degree2(&Degree2Spec { paths: vec![], cycles: vec![n] }).expect("cycle length >= 3")
}
