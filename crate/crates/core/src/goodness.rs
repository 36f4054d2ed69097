//! Host-side structures and property checkers.
//!
//! The host vertex set is split into a large class 0 and six reserve classes
//! of size `ceil(eps*n)` each, and a matching of `2*ceil(eps*n)` edges is
//! reserved inside class 0. The two properties a host should satisfy are
//! checked statistically: (P1) every small vertex set U outside the matching
//! "cones over" proportionally many matching edges, and (P2) the cone
//! bipartite graphs B(S,U) — left side k-sets L, right side vertices u,
//! edges where L is contained in N(u) — expand for small S and are never
//! empty for large S and U.
//!
//! Quantifying over all subsets is exponential, so the checkers certify
//! nothing: they enumerate exhaustively only for n <= 16 and otherwise
//! sample with seeded streams, reporting violation rates next to the
//! Chernoff-bound predictions for the same samples. Sizes the defining
//! formulas put below 1 are clamped up to 1 and flagged: such samples fall
//! in the definition's unconstrained middle band and are diagnostics, not
//! violations in regime.

use crate::eps_unit;
use crate::graph::Graph;
use crate::matching::{BipartiteInstance, Matching};
use crate::rng::{child_seed, child_seed_indexed, SplitMix64};
use std::fmt;
use thiserror::Error;

/// Exhaustive checker mode is automatic up to this vertex count.
pub const EXHAUSTIVE_MAX_N: usize = 16;

/// Ceiling on enumerated cases before an exhaustive pass falls back to
/// sampling (only reachable with unusual parameter choices).
const ENUMERATION_BUDGET: usize = 2_000_000;

/// Clause-(b) witnesses carry whole vertex sets, so only this many are
/// stored; counts are always exact. Small (P1)/(P2a) witnesses are kept in
/// full.
const MAX_STORED_B: usize = 256;

#[derive(Debug, Error, PartialEq)]
pub enum GoodnessError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("site partition infeasible: {0}")]
    SizeInfeasible(String),
    #[error("matching deficient: found {achieved} of {target} required edges inside class 0")]
    MatchingDeficient { achieved: usize, target: usize },
    #[error("k-set {index} has {size} elements, at most 2 supported")]
    KSetTooLarge { index: usize, size: usize },
    #[error("k-sets {a} and {b} overlap")]
    OverlappingSets { a: usize, b: usize },
    #[error("k-set {set_index} intersects the right side at vertex {vertex}")]
    SetMeetsRight { set_index: usize, vertex: usize },
    #[error("vertex {v} out of range for n={n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("U intersects the matching at vertex {0}")]
    UMeetsMatching(usize),
    #[error("site partition has no matching yet")]
    MatchingMissing,
    #[error("chernoff bound: mean {0} negative")]
    NegativeMean(f64),
    #[error("chernoff bound: lambda {0} outside (0,1)")]
    BadLambda(f64),
    #[error("k must be 1 or 2, got {0}")]
    BadK(usize),
}

/// Threshold constant, class-size fraction and slack fraction driving every
/// bound. `eps` controls the partition (six classes of `ceil(eps*n)`),
/// `delta` the tolerances, `c` relates edge probability to
/// `sqrt(log n / n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodnessParams {
    pub c: f64,
    pub eps: f64,
    pub delta: f64,
}

impl GoodnessParams {
    /// The strict constants eps = 0.001, delta = 0.01. Needs n >= 500
    /// before the pattern partition becomes feasible.
    pub fn strict(c: f64) -> GoodnessParams {
        GoodnessParams { c, eps: 0.001, delta: 0.01 }
    }

    /// Desk-scale preset: eps = 0.02 keeps the reserve classes non-trivial
    /// from n ~ 50 up.
    pub fn desk(c: f64) -> GoodnessParams {
        GoodnessParams { c, eps: 0.02, delta: 0.01 }
    }

    pub fn validate(&self) -> Result<(), GoodnessError> {
        if !(self.c > 0.0) {
            return Err(GoodnessError::InvalidParams(format!("c = {} must be > 0", self.c)));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0 / 24.0) {
            return Err(GoodnessError::InvalidParams(format!(
                "eps = {} outside (0, 1/24]",
                self.eps
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(GoodnessError::InvalidParams(format!(
                "delta = {} outside (0, 1)",
                self.delta
            )));
        }
        Ok(())
    }
}

/// p = c * sqrt(log n / n), natural log; 0 for n < 2.
pub fn induced_p(n: usize, c: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    c * ((n as f64).ln() / n as f64).sqrt()
}

/// The c that would have induced this p at this n.
pub fn implied_c(n: usize, p: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    p / ((n as f64).ln() / n as f64).sqrt()
}

/// 2 exp(-lambda^2 mean / 3): two-sided Chernoff mass for deviation
/// `lambda * mean`. Can exceed 1; reports clamp it.
pub fn chernoff_bound(mean: f64, lambda: f64) -> Result<f64, GoodnessError> {
    if !(mean >= 0.0) {
        return Err(GoodnessError::NegativeMean(mean));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(GoodnessError::BadLambda(lambda));
    }
    Ok(2.0 * (-lambda * lambda * mean / 3.0).exp())
}

/// Host-side partition: class 0 of size n - 6*ceil(eps*n), classes 1..=6 of
/// size ceil(eps*n), plus (once found) the reserved matching inside class 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SitePartition {
    labels: Vec<u8>,
    sizes: [usize; 7],
    class_vertices: Vec<Vec<usize>>,
    unit: usize,
    matching_m: Option<Matching>,
    in_vm: Vec<bool>,
}

impl SitePartition {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label_of(&self, v: usize) -> u8 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn sizes(&self) -> [usize; 7] {
        self.sizes
    }

    /// ceil(eps*n), the common size unit.
    pub fn unit(&self) -> usize {
        self.unit
    }

    /// Vertices of one class, ascending.
    pub fn class_vertices(&self, class: u8) -> &[usize] {
        &self.class_vertices[class as usize]
    }

    pub fn matching(&self) -> Option<&Matching> {
        self.matching_m.as_ref()
    }

    pub fn in_matched_set(&self, v: usize) -> bool {
        self.matching_m.is_some() && self.in_vm[v]
    }

    /// Vertices not covered by the matching, ascending.
    pub fn outside_matching(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| !self.in_vm[v]).collect()
    }
}

/// Assembles a partition from explicit labels; sizes and caches are
/// recomputed. For in-crate tests that need full control of the classes.
#[cfg(test)]
pub(crate) fn site_partition_from_parts(
    labels: Vec<u8>,
    matching_m: Option<Matching>,
) -> SitePartition {
    let n = labels.len();
    let mut class_vertices: Vec<Vec<usize>> = vec![Vec::new(); 7];
    for (v, &c) in labels.iter().enumerate() {
        class_vertices[c as usize].push(v);
    }
    let mut sizes = [0usize; 7];
    for (c, list) in class_vertices.iter().enumerate() {
        sizes[c] = list.len();
    }
    let mut in_vm = vec![false; n];
    if let Some(m) = &matching_m {
        for &(a, b) in &m.pairs {
            in_vm[a] = true;
            in_vm[b] = true;
        }
    }
    SitePartition { labels, sizes, class_vertices, unit: sizes[1], matching_m, in_vm }
}

/// Uniformly random (seeded) class assignment with the exact sizes; the
/// matching is found separately by [`find_matching_m`].
pub fn partition_sites(
    n: usize,
    params: &GoodnessParams,
    seed: u64,
) -> Result<SitePartition, GoodnessError> {
    // Only eps matters here; c and delta belong to the checkers.
    if !(params.eps > 0.0) || params.eps > 1.0 {
        return Err(GoodnessError::SizeInfeasible(format!("eps = {} outside (0,1]", params.eps)));
    }
    // eps <= 1/24 keeps class 0 at three quarters of the vertices (up to
    // ceiling effects); larger eps starves it.
    if params.eps > 1.0 / 24.0 + 1e-12 {
        return Err(GoodnessError::SizeInfeasible(format!(
            "eps = {} above 1/24: class 0 would drop below 3n/4",
            params.eps
        )));
    }
    // ceil(eps*n) keeps the reserve classes nonempty for any eps > 0.
    let unit = eps_unit(n, params.eps);
    if unit == 0 {
        return Err(GoodnessError::SizeInfeasible(format!("eps*n = {} rounds to 0", params.eps * n as f64)));
    }
    // The reserved matching covers 4*unit vertices of class 0.
    if n < 10 * unit {
        return Err(GoodnessError::SizeInfeasible(format!(
            "n = {n} below 10*ceil(eps*n) = {}: no room for the class-0 matching",
            10 * unit
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    SplitMix64::new(child_seed(seed, "sites")).shuffle(&mut order);
    let mut labels = vec![0u8; n];
    let v0_size = n - 6 * unit;
    for (pos, &v) in order.iter().enumerate() {
        if pos >= v0_size {
            labels[v] = (1 + (pos - v0_size) / unit) as u8;
        }
    }
    let mut class_vertices: Vec<Vec<usize>> = vec![Vec::new(); 7];
    for (v, &c) in labels.iter().enumerate() {
        class_vertices[c as usize].push(v);
    }
    let mut sizes = [0usize; 7];
    for (c, list) in class_vertices.iter().enumerate() {
        sizes[c] = list.len();
    }
    Ok(SitePartition {
        labels,
        sizes,
        class_vertices,
        unit,
        matching_m: None,
        in_vm: vec![false; n],
    })
}

/// Reserves a matching of exactly `2*ceil(eps*n)` edges inside the class-0
/// induced subgraph: greedy over ascending indices first, then simple
/// alternating-path augmentation (no blossom handling; enough for the tiny
/// target sizes this needs). Fails with the achieved size if even that
/// cannot reach the target.
pub fn find_matching_m(g: &Graph, sp: SitePartition) -> Result<SitePartition, GoodnessError> {
    const NONE: usize = usize::MAX;
    let n = g.n();
    let target = 2 * sp.unit;
    let in_v0: Vec<bool> = (0..n).map(|v| sp.labels[v] == 0).collect();
    let mut mate = vec![NONE; n];
    let mut size = 0;
    'greedy: for &a in sp.class_vertices(0) {
        if size == target {
            break;
        }
        if mate[a] != NONE {
            continue;
        }
        for &b in g.neighbors(a) {
            if in_v0[b] && mate[b] == NONE {
                mate[a] = b;
                mate[b] = a;
                size += 1;
                continue 'greedy;
            }
        }
    }

    fn try_augment(
        g: &Graph,
        in_v0: &[bool],
        mate: &mut [usize],
        visited: &mut [bool],
        u: usize,
    ) -> bool {
        for &x in g.neighbors(u) {
            if !in_v0[x] || visited[x] {
                continue;
            }
            visited[x] = true;
            if mate[x] == NONE {
                mate[x] = u;
                mate[u] = x;
                return true;
            }
            let w = mate[x];
            if try_augment(g, in_v0, mate, visited, w) {
                mate[x] = u;
                mate[u] = x;
                return true;
            }
        }
        false
    }

    if size < target {
        for &u in sp.class_vertices(0) {
            if size == target {
                break;
            }
            if mate[u] != NONE {
                continue;
            }
            let mut visited = vec![false; n];
            visited[u] = true;
            if try_augment(g, &in_v0, &mut mate, &mut visited, u) {
                size += 1;
            }
        }
    }
    if size < target {
        return Err(GoodnessError::MatchingDeficient { achieved: size, target });
    }
    let mut pairs = Vec::with_capacity(target);
    let mut in_vm = vec![false; n];
    for &a in sp.class_vertices(0) {
        if mate[a] != NONE && a < mate[a] && pairs.len() < target {
            pairs.push((a, mate[a]));
            in_vm[a] = true;
            in_vm[mate[a]] = true;
        }
    }
    debug_assert_eq!(pairs.len(), target);
    Ok(SitePartition { matching_m: Some(Matching { pairs }), in_vm, ..sp })
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Cone bipartite graph B(S, U): left side the k-sets of `sets` (sizes 0, 1
/// or 2), right side `right`, with an edge where the whole set lies in the
/// host neighborhood of the right vertex. An empty set is adjacent to every
/// right vertex. Left labels are set indices, right labels host vertices.
pub fn build_cone_bipartite(
    g: &Graph,
    sets: &[Vec<usize>],
    right: &[usize],
) -> Result<BipartiteInstance, GoodnessError> {
    let n = g.n();
    let mut right_sorted = right.to_vec();
    right_sorted.sort_unstable();
    right_sorted.dedup();
    if let Some(&v) = right_sorted.last() {
        if v >= n {
            return Err(GoodnessError::VertexOutOfRange { v, n });
        }
    }
    let mut right_index = vec![usize::MAX; n];
    for (idx, &v) in right_sorted.iter().enumerate() {
        right_index[v] = idx;
    }
    let mut owner = vec![usize::MAX; n];
    for (i, set) in sets.iter().enumerate() {
        if set.len() > 2 {
            return Err(GoodnessError::KSetTooLarge { index: i, size: set.len() });
        }
        for &x in set {
            if x >= n {
                return Err(GoodnessError::VertexOutOfRange { v: x, n });
            }
            if right_index[x] != usize::MAX {
                return Err(GoodnessError::SetMeetsRight { set_index: i, vertex: x });
            }
            if owner[x] != usize::MAX {
                return Err(GoodnessError::OverlappingSets { a: owner[x], b: i });
            }
            owner[x] = i;
        }
    }
    let adj: Vec<Vec<usize>> = sets
        .iter()
        .map(|set| {
            let hosts: Vec<usize> = match set.len() {
                0 => return (0..right_sorted.len()).collect(),
                1 => g.neighbors(set[0]).to_vec(),
                _ => intersect_sorted(g.neighbors(set[0]), g.neighbors(set[1])),
            };
            hosts
                .into_iter()
                .filter(|&v| right_index[v] != usize::MAX)
                .map(|v| right_index[v])
                .collect()
        })
        .collect();
    Ok(BipartiteInstance::new((0..sets.len()).collect(), right_sorted, adj)
        .expect("cone adjacency is in range"))
}

/// Number of right vertices covered by at least one left vertex.
pub fn right_cover_count(b: &BipartiteInstance) -> usize {
    let mut covered = vec![false; b.right_size()];
    for l in 0..b.left_size() {
        for &r in b.adj(l) {
            covered[r] = true;
        }
    }
    covered.iter().filter(|&&c| c).count()
}

/// Number of matching edges {a,b} such that some u in `u_set` is adjacent
/// to both endpoints. `u_set` must avoid the matched vertices.
pub fn p1_statistic(g: &Graph, m: &Matching, u_set: &[usize]) -> Result<usize, GoodnessError> {
    let n = g.n();
    let mut in_u = vec![false; n];
    let mut in_m = vec![false; n];
    for &(a, b) in &m.pairs {
        for v in [a, b] {
            if v >= n {
                return Err(GoodnessError::VertexOutOfRange { v, n });
            }
            in_m[v] = true;
        }
    }
    for &v in u_set {
        if v >= n {
            return Err(GoodnessError::VertexOutOfRange { v, n });
        }
        if in_m[v] {
            return Err(GoodnessError::UMeetsMatching(v));
        }
        in_u[v] = true;
    }
    Ok(m
        .pairs
        .iter()
        .filter(|&&(a, b)| {
            intersect_sorted(g.neighbors(a), g.neighbors(b))
                .iter()
                .any(|&u| in_u[u])
        })
        .count())
}

/// One tested U that fell below the required cone count.
#[derive(Debug, Clone, PartialEq)]
pub struct P1Violation {
    pub witness: Vec<usize>,
    pub statistic: usize,
    pub required: f64,
    /// Whether |U| actually satisfied the defining size bound; clamped
    /// samples are diagnostics only.
    pub in_regime: bool,
}

/// Outcome of a (P1) check.
#[derive(Debug, Clone, PartialEq)]
pub struct P1Report {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub exhaustive: bool,
    pub samples: usize,
    /// delta*n / (c^2 log n), before clamping.
    pub raw_size_bound: f64,
    pub size_cap: usize,
    pub clamped: bool,
    pub violation_count: usize,
    pub violations: Vec<P1Violation>,
    pub in_regime_samples: usize,
    pub in_regime_violations: usize,
    /// Sum over in-regime samples of min(1, chernoff_bound(p^2|M||U|/8, 1/2)).
    pub chernoff_sum: f64,
    /// Sum over in-regime samples of min(1, 2 n^{-3|U|}), the simplified
    /// asymptotic form of the same bound.
    pub asymptotic_sum: f64,
}

impl P1Report {
    pub fn violation_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.violation_count as f64 / self.samples as f64
        }
    }
}

impl fmt::Display for P1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "P1: {} samples ({}), |U| <= {}{}, violations {} (rate {:.4})",
            self.samples,
            if self.exhaustive { "exhaustive" } else { "sampled" },
            self.size_cap,
            if self.clamped { " [clamped]" } else { "" },
            self.violation_count,
            self.violation_rate()
        )?;
        write!(
            f,
            "    in-regime: {} samples, {} violations, chernoff sum {:.3e}, asymptotic-form sum {:.3e}",
            self.in_regime_samples, self.in_regime_violations, self.chernoff_sum, self.asymptotic_sum
        )
    }
}

struct P1Accumulator<'a> {
    g: &'a Graph,
    m: &'a Matching,
    n: usize,
    p: f64,
    bound_factor: f64,
    raw_size_bound: f64,
    report: P1Report,
}

impl<'a> P1Accumulator<'a> {
    fn push(&mut self, u: Vec<usize>) -> Result<(), GoodnessError> {
        let stat = p1_statistic(self.g, self.m, &u)?;
        let required = self.bound_factor * self.m.len() as f64 * u.len() as f64;
        let in_regime = u.len() as f64 <= self.raw_size_bound + 1e-9;
        self.report.samples += 1;
        if in_regime {
            self.report.in_regime_samples += 1;
            let mean = self.p * self.p * self.m.len() as f64 * u.len() as f64 / 8.0;
            self.report.chernoff_sum += chernoff_bound(mean, 0.5)?.min(1.0);
            self.report.asymptotic_sum +=
                (2.0 * (-3.0 * u.len() as f64 * (self.n as f64).ln()).exp()).min(1.0);
        }
        if (stat as f64) < required {
            self.report.violation_count += 1;
            if in_regime {
                self.report.in_regime_violations += 1;
            }
            self.report.violations.push(P1Violation {
                witness: u,
                statistic: stat,
                required,
                in_regime,
            });
        }
        Ok(())
    }
}

fn p1_accumulator<'a>(
    g: &'a Graph,
    sp: &'a SitePartition,
    params: &GoodnessParams,
    exhaustive: bool,
) -> Result<(P1Accumulator<'a>, Vec<usize>), GoodnessError> {
    params.validate()?;
    let m = sp.matching_m.as_ref().ok_or(GoodnessError::MatchingMissing)?;
    let n = g.n();
    let candidates = sp.outside_matching();
    let logn = (n.max(2) as f64).ln();
    let raw = params.delta * n as f64 / (params.c * params.c * logn);
    let size_cap = ((raw + 1e-9).floor() as usize).clamp(1, candidates.len().max(1));
    let p = induced_p(n, params.c);
    let report = P1Report {
        n,
        c: params.c,
        p,
        exhaustive,
        samples: 0,
        raw_size_bound: raw,
        size_cap,
        clamped: raw < 1.0 || raw > candidates.len() as f64,
        violation_count: 0,
        violations: Vec::new(),
        in_regime_samples: 0,
        in_regime_violations: 0,
        chernoff_sum: 0.0,
        asymptotic_sum: 0.0,
    };
    let acc = P1Accumulator {
        g,
        m,
        n,
        p,
        bound_factor: params.c * params.c * logn / (16.0 * n as f64),
        raw_size_bound: raw,
        report,
    };
    Ok((acc, candidates))
}

/// Samples `budget` sets U outside the matched vertices, sizes uniform in
/// [1, cap], and tests each against the (P1) bound. Per-sample streams
/// derive from (seed, sample index).
pub fn check_p1_sampled(
    g: &Graph,
    sp: &SitePartition,
    params: &GoodnessParams,
    budget: usize,
    seed: u64,
) -> Result<P1Report, GoodnessError> {
    let (mut acc, candidates) = p1_accumulator(g, sp, params, false)?;
    if candidates.is_empty() {
        return Ok(acc.report);
    }
    for i in 0..budget {
        let mut rng = SplitMix64::new(child_seed_indexed(seed, "p1-sample", i as u64));
        let size = 1 + rng.index(acc.report.size_cap);
        let mut pool = candidates.clone();
        rng.partial_shuffle(&mut pool, size);
        let mut u = pool[..size].to_vec();
        u.sort_unstable();
        acc.push(u)?;
    }
    Ok(acc.report)
}

/// Enumerates every nonempty U outside the matched vertices with
/// |U| <= cap. Exponential; callers gate on n <= [`EXHAUSTIVE_MAX_N`].
pub fn check_p1_exhaustive(
    g: &Graph,
    sp: &SitePartition,
    params: &GoodnessParams,
) -> Result<P1Report, GoodnessError> {
    let (mut acc, candidates) = p1_accumulator(g, sp, params, true)?;
    let len = candidates.len();
    assert!(len <= 24, "exhaustive P1 check on {len} candidates");
    for mask in 1u32..(1u32 << len) {
        if (mask.count_ones() as usize) > acc.report.size_cap {
            continue;
        }
        let u: Vec<usize> = (0..len).filter(|&i| mask & (1 << i) != 0).map(|i| candidates[i]).collect();
        acc.push(u)?;
    }
    Ok(acc.report)
}

/// (P1) checker: exhaustive for n <= 16, sampled otherwise.
pub fn check_p1(
    g: &Graph,
    sp: &SitePartition,
    params: &GoodnessParams,
    budget: usize,
    seed: u64,
) -> Result<P1Report, GoodnessError> {
    if g.n() <= EXHAUSTIVE_MAX_N {
        check_p1_exhaustive(g, sp, params)
    } else {
        check_p1_sampled(g, sp, params, budget, seed)
    }
}

/// One tested (S, V_i) pair that fell below the required neighborhood size.
#[derive(Debug, Clone, PartialEq)]
pub struct P2aViolation {
    pub sets: Vec<Vec<usize>>,
    pub class_index: u8,
    pub neighborhood_size: usize,
    pub required: f64,
    pub in_regime: bool,
}

/// One tested (S, U) pair whose cone bipartite graph had no edge at all.
#[derive(Debug, Clone, PartialEq)]
pub struct P2bViolation {
    pub sets: Vec<Vec<usize>>,
    pub others: Vec<usize>,
}

/// Outcome of a (P2) check for one k.
#[derive(Debug, Clone, PartialEq)]
pub struct P2Report {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub k: usize,
    pub exhaustive: bool,
    /// (delta/c^k)(n/log n)^{k/2}: the size up to which clause (a) binds.
    pub a_threshold: f64,
    pub a_size_cap: usize,
    pub a_clamped: bool,
    pub a_samples: usize,
    pub a_violation_count: usize,
    pub a_violations: Vec<P2aViolation>,
    pub a_in_regime_samples: usize,
    pub a_in_regime_violations: usize,
    pub a_chernoff_sum: f64,
    /// Sum over in-regime (a) samples of min(1, 2 n^{-3|S|}).
    pub a_asymptotic_sum: f64,
    /// (log n/c^{k-1})(n/log n)^{k/2}: the size from which clause (b) binds.
    pub b_threshold: f64,
    pub b_size: usize,
    pub b_feasible: bool,
    pub b_samples: usize,
    pub b_violation_count: usize,
    pub b_violations: Vec<P2bViolation>,
    pub notes: Vec<String>,
}

impl P2Report {
    pub fn a_rate(&self) -> f64 {
        if self.a_samples == 0 {
            0.0
        } else {
            self.a_violation_count as f64 / self.a_samples as f64
        }
    }

    pub fn b_rate(&self) -> f64 {
        if self.b_samples == 0 {
            0.0
        } else {
            self.b_violation_count as f64 / self.b_samples as f64
        }
    }
}

impl fmt::Display for P2Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "P2 k={}: (a) {} samples ({}), |S| <= {}{}, violations {} (rate {:.4})",
            self.k,
            self.a_samples,
            if self.exhaustive { "exhaustive" } else { "sampled" },
            self.a_size_cap,
            if self.a_clamped { " [clamped]" } else { "" },
            self.a_violation_count,
            self.a_rate()
        )?;
        writeln!(
            f,
            "    in-regime: {} samples, {} violations, chernoff sum {:.3e}, asymptotic-form sum {:.3e}",
            self.a_in_regime_samples,
            self.a_in_regime_violations,
            self.a_chernoff_sum,
            self.a_asymptotic_sum
        )?;
        write!(
            f,
            "    (b) |S|=|U|={}{}: {} samples, violations {} (rate {:.4})",
            self.b_size,
            if self.b_feasible { "" } else { " [infeasible, skipped]" },
            self.b_samples,
            self.b_violation_count,
            self.b_rate()
        )?;
        for note in &self.notes {
            write!(f, "\n    note: {note}")?;
        }
        Ok(())
    }
}

/// True iff B(S, U) has at least one edge; early exit on the first hit.
/// Same containment semantics as [`build_cone_bipartite`].
fn cone_has_edge(g: &Graph, sets: &[Vec<usize>], others: &[usize]) -> bool {
    others
        .iter()
        .any(|&u| sets.iter().any(|set| set.iter().all(|&x| g.has_edge(x, u))))
}

struct P2Accumulator<'a> {
    g: &'a Graph,
    params: GoodnessParams,
    report: P2Report,
}

impl<'a> P2Accumulator<'a> {
    fn push_a(&mut self, sets: Vec<Vec<usize>>, class_index: u8, vi: &[usize]) -> Result<(), GoodnessError> {
        let b = build_cone_bipartite(self.g, &sets, vi)?;
        let lhs = right_cover_count(&b);
        let pk = self.report.p.powi(self.report.k as i32);
        let required =
            (1.0 - self.params.delta) * pk * sets.len() as f64 * vi.len() as f64;
        let in_regime = sets.len() as f64 <= self.report.a_threshold + 1e-9;
        self.report.a_samples += 1;
        if in_regime {
            self.report.a_in_regime_samples += 1;
            let mean = vi.len() as f64 * (1.0 - (1.0 - pk).powi(sets.len() as i32));
            self.report.a_chernoff_sum += chernoff_bound(mean, self.params.delta / 2.0)?.min(1.0);
            self.report.a_asymptotic_sum +=
                (2.0 * (-3.0 * sets.len() as f64 * (self.report.n as f64).ln()).exp()).min(1.0);
        }
        if (lhs as f64) < required {
            self.report.a_violation_count += 1;
            if in_regime {
                self.report.a_in_regime_violations += 1;
            }
            self.report.a_violations.push(P2aViolation {
                sets,
                class_index,
                neighborhood_size: lhs,
                required,
                in_regime,
            });
        }
        Ok(())
    }

    fn push_b(&mut self, sets: Vec<Vec<usize>>, others: Vec<usize>) {
        self.report.b_samples += 1;
        if !cone_has_edge(self.g, &sets, &others) {
            self.report.b_violation_count += 1;
            if self.report.b_violations.len() < MAX_STORED_B {
                self.report.b_violations.push(P2bViolation { sets, others });
            }
        }
    }
}

fn p2_accumulator<'a>(
    g: &'a Graph,
    sp: &SitePartition,
    params: &GoodnessParams,
    k: usize,
    exhaustive: bool,
) -> Result<P2Accumulator<'a>, GoodnessError> {
    params.validate()?;
    if k != 1 && k != 2 {
        return Err(GoodnessError::BadK(k));
    }
    let n = g.n();
    let logn = (n.max(2) as f64).ln();
    let ratio = (n as f64 / logn).powf(k as f64 / 2.0);
    let a_threshold = params.delta / params.c.powi(k as i32) * ratio;
    let b_threshold = logn / params.c.powi(k as i32 - 1) * ratio;
    // Largest |S| drawable: k-set elements must avoid one reserve class.
    let max_feasible = (n - sp.unit()) / k;
    let a_size_cap = ((a_threshold + 1e-9).floor() as usize).clamp(1, max_feasible.max(1));
    let b_size = (b_threshold - 1e-9).ceil().max(1.0) as usize;
    let b_feasible = b_size.checked_mul(k + 1).is_some_and(|need| need <= n) && b_size >= 1;
    let p = induced_p(n, params.c);
    Ok(P2Accumulator {
        g,
        params: *params,
        report: P2Report {
            n,
            c: params.c,
            p,
            k,
            exhaustive,
            a_threshold,
            a_size_cap,
            a_clamped: a_threshold < 1.0 || a_threshold > max_feasible as f64,
            a_samples: 0,
            a_violation_count: 0,
            a_violations: Vec::new(),
            a_in_regime_samples: 0,
            a_in_regime_violations: 0,
            a_chernoff_sum: 0.0,
            a_asymptotic_sum: 0.0,
            b_threshold,
            b_size,
            b_feasible,
            b_samples: 0,
            b_violation_count: 0,
            b_violations: Vec::new(),
            notes: Vec::new(),
        },
    })
}

/// Samples clause (a) — random disjoint k-sets against a random reserve
/// class — and clause (b) — large random (S, U) pairs tested for edge
/// existence. Sizes outside the defining ranges are clamped and noted.
pub fn check_p2_sampled(
    g: &Graph,
    sp: &SitePartition,
    params: &GoodnessParams,
    k: usize,
    budget: usize,
    seed: u64,
) -> Result<P2Report, GoodnessError> {
    let mut acc = p2_accumulator(g, sp, params, k, false)?;
    let n = g.n();
    if acc.report.a_clamped {
        acc.report.notes.push(format!(
            "clause (a) size cap clamped to {} (threshold {:.4})",
            acc.report.a_size_cap, acc.report.a_threshold
        ));
    }
    for i in 0..budget {
        let mut rng = SplitMix64::new(child_seed_indexed(seed, "p2a-sample", i as u64));
        let class_index = 1 + rng.index(6) as u8;
        let vi = sp.class_vertices(class_index);
        let mut pool: Vec<usize> = (0..n).filter(|&v| sp.label_of(v) != class_index).collect();
        let size = 1 + rng.index(acc.report.a_size_cap);
        if size * k > pool.len() {
            continue;
        }
        rng.partial_shuffle(&mut pool, size * k);
        let sets: Vec<Vec<usize>> = pool[..size * k]
            .chunks(k)
            .map(|chunk| {
                let mut set = chunk.to_vec();
                set.sort_unstable();
                set
            })
            .collect();
        acc.push_a(sets, class_index, vi)?;
    }
    if acc.report.b_feasible {
        for i in 0..budget {
            let mut rng = SplitMix64::new(child_seed_indexed(seed, "p2b-sample", i as u64));
            let mut pool: Vec<usize> = (0..n).collect();
            let b_size = acc.report.b_size;
            rng.partial_shuffle(&mut pool, (k + 1) * b_size);
            let sets: Vec<Vec<usize>> = pool[..k * b_size]
                .chunks(k)
                .map(|chunk| {
                    let mut set = chunk.to_vec();
                    set.sort_unstable();
                    set
                })
                .collect();
            let mut others = pool[k * b_size..(k + 1) * b_size].to_vec();
            others.sort_unstable();
            acc.push_b(sets, others);
        }
    } else {
        acc.report.notes.push(format!(
            "clause (b) skipped: |S|=|U|={} needs {} vertices, have {n}",
            acc.report.b_size,
            (k + 1) * acc.report.b_size
        ));
    }
    Ok(acc.report)
}

type CollectionVisitor<'v> = dyn FnMut(&[Vec<usize>]) -> Result<(), GoodnessError> + 'v;

/// Enumerates disjoint k-set collections over `pool` (ascending, each set
/// sorted, sets in lexicographic order), invoking `f` on every collection
/// with size in [1, max_size]. Returns false if the budget ran out.
fn enumerate_collections(
    pool: &[usize],
    k: usize,
    max_size: usize,
    budget: &mut usize,
    current: &mut Vec<Vec<usize>>,
    start: usize,
    f: &mut CollectionVisitor,
) -> Result<bool, GoodnessError> {
    if current.len() == max_size {
        return Ok(true);
    }
    // Choose the next set with elements from pool[start..], first element
    // strictly increasing across sets to avoid duplicates.
    let mut idx = Vec::new();
    let mut i = start;
    'outer: loop {
        if i >= pool.len() {
            break 'outer;
        }
        idx.clear();
        idx.push(i);
        if k == 2 {
            for j in (i + 1)..pool.len() {
                idx.truncate(1);
                idx.push(j);
                if *budget == 0 {
                    return Ok(false);
                }
                *budget -= 1;
                let set: Vec<usize> = idx.iter().map(|&t| pool[t]).collect();
                if current.iter().any(|s| s.iter().any(|x| set.contains(x))) {
                    continue;
                }
                current.push(set);
                f(current)?;
                if !enumerate_collections(pool, k, max_size, budget, current, i + 1, f)? {
                    current.pop();
                    return Ok(false);
                }
                current.pop();
            }
        } else {
            if *budget == 0 {
                return Ok(false);
            }
            *budget -= 1;
            let set = vec![pool[i]];
            if !current.iter().any(|s| s.contains(&pool[i])) {
                current.push(set);
                f(current)?;
                if !enumerate_collections(pool, k, max_size, budget, current, i + 1, f)? {
                    current.pop();
                    return Ok(false);
                }
                current.pop();
            }
        }
        i += 1;
    }
    Ok(true)
}

/// Exhaustive (P2): clause (a) enumerates every disjoint k-set collection of
/// size up to the cap against every reserve class; clause (b) enumerates all
/// (S, U) at exactly the threshold size, which decides the clause for all
/// larger sizes by monotonicity (a sub-collection's edge is an edge).
/// Falls back to sampling with a note if the enumeration budget runs out.
pub fn check_p2_exhaustive(
    g: &Graph,
    sp: &SitePartition,
    params: &GoodnessParams,
    k: usize,
    fallback_budget: usize,
    seed: u64,
) -> Result<P2Report, GoodnessError> {
    let mut acc = p2_accumulator(g, sp, params, k, true)?;
    let n = g.n();
    let mut budget = ENUMERATION_BUDGET;

    for class_index in 1..=6u8 {
        let vi = sp.class_vertices(class_index).to_vec();
        let pool: Vec<usize> = (0..n).filter(|&v| sp.label_of(v) != class_index).collect();
        let cap = acc.report.a_size_cap;
        let mut current = Vec::new();
        let acc_ref = &mut acc;
        let complete = enumerate_collections(
            &pool,
            k,
            cap,
            &mut budget,
            &mut current,
            0,
            &mut |sets| acc_ref.push_a(sets.to_vec(), class_index, &vi),
        )?;
        if !complete {
            let mut rep = check_p2_sampled(g, sp, params, k, fallback_budget, seed)?;
            rep.notes
                .push("exhaustive clause (a) enumeration over budget; fell back to sampling".into());
            return Ok(rep);
        }
    }

    if acc.report.b_feasible {
        let b_size = acc.report.b_size;
        let mut s_collections: Vec<Vec<Vec<usize>>> = Vec::new();
        {
            let mut current = Vec::new();
            let complete = enumerate_collections(
                &(0..n).collect::<Vec<usize>>(),
                k,
                b_size,
                &mut budget,
                &mut current,
                0,
                &mut |sets| {
                    if sets.len() == b_size {
                        s_collections.push(sets.to_vec());
                    }
                    Ok(())
                },
            )?;
            if !complete || s_collections.len().saturating_mul(1 << b_size.min(30)) > ENUMERATION_BUDGET {
                let mut rep = check_p2_sampled(g, sp, params, k, fallback_budget, seed)?;
                rep.notes
                    .push("exhaustive clause (b) enumeration over budget; fell back to sampling".into());
                return Ok(rep);
            }
        }
        for sets in s_collections {
            let mut used = vec![false; n];
            for set in &sets {
                for &x in set {
                    used[x] = true;
                }
            }
            let rest: Vec<usize> = (0..n).filter(|&v| !used[v]).collect();
            if rest.len() < b_size {
                continue;
            }
            // All U of exactly b_size from the rest.
            let mut pick = vec![0usize; b_size];
            enumerate_subsets(&rest, b_size, 0, 0, &mut pick, &mut |u| {
                acc.push_b(sets.clone(), u.to_vec());
            });
        }
    } else {
        acc.report.notes.push(format!(
            "clause (b) skipped: |S|=|U|={} needs {} vertices, have {n}",
            acc.report.b_size,
            (k + 1) * acc.report.b_size
        ));
    }
    Ok(acc.report)
}

fn enumerate_subsets(
    pool: &[usize],
    size: usize,
    depth: usize,
    start: usize,
    pick: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if depth == size {
        f(pick);
        return;
    }
    for i in start..pool.len() {
        if pool.len() - i < size - depth {
            break;
        }
        pick[depth] = pool[i];
        enumerate_subsets(pool, size, depth + 1, i + 1, pick, f);
    }
}

/// (P2) checker for one k: exhaustive for n <= 16, sampled otherwise.
pub fn check_p2(
    g: &Graph,
    sp: &SitePartition,
    params: &GoodnessParams,
    k: usize,
    budget: usize,
    seed: u64,
) -> Result<P2Report, GoodnessError> {
    if g.n() <= EXHAUSTIVE_MAX_N {
        check_p2_exhaustive(g, sp, params, k, budget, seed)
    } else {
        check_p2_sampled(g, sp, params, k, budget, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_gnp, Graph};

    fn k_n(n: usize) -> Graph {
        Graph::complete(n)
    }

    #[test]
    fn site_partition_sizes() {
        let sp = partition_sites(1000, &GoodnessParams::strict(1.0), 7).unwrap();
        assert_eq!(sp.sizes(), [994, 1, 1, 1, 1, 1, 1]);
        let sp = partition_sites(1000, &GoodnessParams::desk(1.0), 7).unwrap();
        assert_eq!(sp.sizes()[0], 880);
        assert!(sp.sizes()[1..].iter().all(|&s| s == 20));
        assert!(sp.sizes()[0] >= 750);
    }

    #[test]
    fn site_partition_infeasible_eps() {
        // 6*50 = 300 > 250 = n/4.
        let params = GoodnessParams { c: 1.0, eps: 0.05, delta: 0.01 };
        assert!(matches!(
            partition_sites(1000, &params, 7),
            Err(GoodnessError::SizeInfeasible(_))
        ));
        // eps in range but n too small to host the class-0 matching.
        let params = GoodnessParams { c: 1.0, eps: 1.0 / 24.0, delta: 0.01 };
        assert!(matches!(
            partition_sites(9, &params, 7),
            Err(GoodnessError::SizeInfeasible(_))
        ));
        // Tiny eps at small n still yields nonempty unit classes.
        let params = GoodnessParams { c: 1.0, eps: 0.001, delta: 0.01 };
        let sp = partition_sites(100, &params, 7).unwrap();
        assert_eq!(sp.sizes(), [94, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn site_partition_deterministic_and_total() {
        let params = GoodnessParams::desk(1.0);
        let a = partition_sites(500, &params, 3).unwrap();
        let b = partition_sites(500, &params, 3).unwrap();
        assert_eq!(a, b);
        let c = partition_sites(500, &params, 4).unwrap();
        assert_ne!(a.labels(), c.labels());
        let mut counts = [0usize; 7];
        for &l in a.labels() {
            counts[l as usize] += 1;
        }
        assert_eq!(counts, a.sizes());
    }

    #[test]
    fn matching_on_complete_graph() {
        let params = GoodnessParams::desk(1.0);
        let sp = partition_sites(1000, &params, 5).unwrap();
        let sp = find_matching_m(&k_n(1000), sp).unwrap();
        let m = sp.matching().unwrap();
        assert_eq!(m.len(), 40);
        let mut seen = vec![false; 1000];
        for &(a, b) in &m.pairs {
            assert_eq!(sp.label_of(a), 0);
            assert_eq!(sp.label_of(b), 0);
            assert!(!std::mem::replace(&mut seen[a], true));
            assert!(!std::mem::replace(&mut seen[b], true));
        }
    }

    #[test]
    fn matching_deficient_on_empty_graph() {
        let params = GoodnessParams::desk(1.0);
        let sp = partition_sites(200, &params, 5).unwrap();
        assert_eq!(
            find_matching_m(&Graph::empty(200), sp),
            Err(GoodnessError::MatchingDeficient { achieved: 0, target: 8 })
        );
    }

    #[test]
    fn matching_on_random_graph() {
        let params = GoodnessParams::desk(1.0);
        let g = gen_gnp(1000, 0.3, 11).unwrap();
        let sp = partition_sites(1000, &params, 5).unwrap();
        let sp = find_matching_m(&g, sp).unwrap();
        let m = sp.matching().unwrap();
        assert_eq!(m.len(), 40);
        for &(a, b) in &m.pairs {
            assert!(g.has_edge(a, b));
            assert_eq!(sp.label_of(a), 0);
            assert_eq!(sp.label_of(b), 0);
        }
    }

    /// Hand-built partition putting exactly {0,1,2,3} in class 0.
    fn fixed_v0_partition() -> SitePartition {
        let mut labels = vec![0u8; 10];
        for (i, l) in labels.iter_mut().enumerate().skip(4) {
            *l = (i - 3) as u8;
        }
        let class_vertices: Vec<Vec<usize>> =
            std::iter::once(vec![0, 1, 2, 3]).chain((4..10).map(|v| vec![v])).collect();
        SitePartition {
            labels,
            sizes: [4, 1, 1, 1, 1, 1, 1],
            class_vertices,
            unit: 1,
            matching_m: None,
            in_vm: vec![false; 10],
        }
    }

    #[test]
    fn augmentation_rescues_greedy() {
        // Greedy matches 0-2, stranding 1 and 3; the alternating path
        // 1-2-0-3 rematches to {1-2, 0-3}.
        let g = Graph::from_edges(10, [(0, 2), (1, 2), (0, 3)]).unwrap();
        let sp = find_matching_m(&g, fixed_v0_partition()).unwrap();
        let mut pairs = sp.matching().unwrap().pairs.clone();
        pairs.sort_unstable();
        assert_eq!(pairs, vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn matching_reports_achieved_size() {
        // Only one edge available inside class 0.
        let g = Graph::from_edges(10, [(0, 1)]).unwrap();
        assert_eq!(
            find_matching_m(&g, fixed_v0_partition()),
            Err(GoodnessError::MatchingDeficient { achieved: 1, target: 2 })
        );
    }

    #[test]
    fn cone_bipartite_singleton_is_full_row() {
        let g = gen_gnp(30, 0.4, 2).unwrap();
        let a = 5;
        let right: Vec<usize> = g.neighbors(a).to_vec();
        let b = build_cone_bipartite(&g, &[vec![a]], &right).unwrap();
        assert_eq!(b.edge_count(), right.len());
    }

    #[test]
    fn cone_bipartite_pair_needs_both() {
        // u adjacent to a only.
        let g = Graph::from_edges(4, [(0, 3)]).unwrap();
        let b = build_cone_bipartite(&g, &[vec![0, 1]], &[3]).unwrap();
        assert_eq!(b.edge_count(), 0);
    }

    #[test]
    fn cone_bipartite_empty_set_adjacent_to_all() {
        let g = Graph::empty(5);
        let b = build_cone_bipartite(&g, &[vec![]], &[0, 1, 2]).unwrap();
        assert_eq!(b.edge_count(), 3);
    }

    #[test]
    fn cone_bipartite_matches_brute_force() {
        let mut rng = crate::rng::SplitMix64::new(31);
        for trial in 0..1000 {
            let g = gen_gnp(30, 0.3, trial).unwrap();
            // Two disjoint pairs and a singleton, right side random.
            let mut pool: Vec<usize> = (0..30).collect();
            rng.partial_shuffle(&mut pool, 13);
            let sets = vec![
                vec![pool[0].min(pool[1]), pool[0].max(pool[1])],
                vec![pool[2].min(pool[3]), pool[2].max(pool[3])],
                vec![pool[4]],
            ];
            let mut right = pool[5..13].to_vec();
            right.sort_unstable();
            let b = build_cone_bipartite(&g, &sets, &right).unwrap();
            for (l, set) in sets.iter().enumerate() {
                for (r, &u) in right.iter().enumerate() {
                    let expected = set.iter().all(|&x| g.has_edge(x, u));
                    assert_eq!(b.adj(l).binary_search(&r).is_ok(), expected);
                }
            }
        }
    }

    #[test]
    fn cone_bipartite_rejects_overlap() {
        let g = Graph::empty(5);
        assert_eq!(
            build_cone_bipartite(&g, &[vec![0, 1], vec![1, 2]], &[4]),
            Err(GoodnessError::OverlappingSets { a: 0, b: 1 })
        );
        assert_eq!(
            build_cone_bipartite(&g, &[vec![0, 4]], &[4]),
            Err(GoodnessError::SetMeetsRight { set_index: 0, vertex: 4 })
        );
    }

    #[test]
    fn p1_statistic_examples() {
        let g = Graph::from_edges(3, [(0, 2), (1, 2)]).unwrap();
        let m = Matching { pairs: vec![(0, 1)] };
        assert_eq!(p1_statistic(&g, &m, &[2]).unwrap(), 1);
        assert_eq!(p1_statistic(&g, &m, &[]).unwrap(), 0);
        assert_eq!(
            p1_statistic(&g, &m, &[0]),
            Err(GoodnessError::UMeetsMatching(0))
        );
    }

    #[test]
    fn p1_statistic_matches_brute_force() {
        for seed in 0..100 {
            let g = gen_gnp(24, 0.3, seed).unwrap();
            let m = Matching { pairs: vec![(0, 1), (2, 3), (4, 5)] };
            let u: Vec<usize> = (6..24).filter(|v| v % 3 == (seed as usize) % 3).collect();
            let fast = p1_statistic(&g, &m, &u).unwrap();
            let slow = m
                .pairs
                .iter()
                .filter(|&&(a, b)| u.iter().any(|&x| g.has_edge(a, x) && g.has_edge(b, x)))
                .count();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn p1_statistic_monotone_in_u_and_edges() {
        let g = gen_gnp(30, 0.25, 4).unwrap();
        let m = Matching { pairs: vec![(0, 1), (2, 3)] };
        let u1: Vec<usize> = vec![10, 11, 12];
        let u2: Vec<usize> = vec![13, 14];
        let both: Vec<usize> = (10..15).collect();
        let s1 = p1_statistic(&g, &m, &u1).unwrap();
        let s2 = p1_statistic(&g, &m, &u2).unwrap();
        let s = p1_statistic(&g, &m, &both).unwrap();
        assert!(s >= s1.max(s2));
        // Adding an edge never decreases the statistic.
        let mut edges: Vec<(usize, usize)> = g.edges().collect();
        edges.push((0, 10));
        edges.push((1, 10));
        let g2 = Graph::from_edges(30, edges).unwrap();
        assert!(p1_statistic(&g2, &m, &both).unwrap() >= s);
    }

    #[test]
    fn chernoff_values() {
        assert_eq!(chernoff_bound(0.0, 0.5).unwrap(), 2.0);
        let b = chernoff_bound(100.0, 0.5).unwrap();
        assert!((b - 2.0 * (-100.0 / 12.0f64).exp()).abs() < 1e-15);
        assert!((b - 4.83e-4).abs() < 1e-5);
        assert!(chernoff_bound(-1.0, 0.5).is_err());
        assert!(chernoff_bound(1.0, 0.0).is_err());
        assert!(chernoff_bound(1.0, 1.0).is_err());
        // Monotone: larger mean, smaller bound.
        assert!(chernoff_bound(50.0, 0.5).unwrap() >= chernoff_bound(60.0, 0.5).unwrap());
    }

    #[test]
    fn p1_zero_budget_empty_report() {
        let params = GoodnessParams::desk(1.0);
        let g = gen_gnp(200, 0.4, 9).unwrap();
        let sp = find_matching_m(&g, partition_sites(200, &params, 9).unwrap()).unwrap();
        let rep = check_p1_sampled(&g, &sp, &params, 0, 1).unwrap();
        assert_eq!((rep.samples, rep.violation_count), (0, 0));
    }

    #[test]
    fn p1_complete_host_no_violations() {
        let params = GoodnessParams::desk(1.0);
        let g = k_n(300);
        let sp = find_matching_m(&g, partition_sites(300, &params, 2).unwrap()).unwrap();
        let rep = check_p1_sampled(&g, &sp, &params, 50, 3).unwrap();
        assert_eq!(rep.violation_count, 0, "violations: {:?}", rep.violations);
        assert_eq!(rep.samples, 50);
    }

    #[test]
    fn p1_exhaustive_matches_heavy_sampling() {
        // n=12: exhaustive candidate subsets vs 2^12 samples find the same
        // violating sets (deduped).
        let params = GoodnessParams { c: 0.6, eps: 0.02, delta: 0.01 };
        let g = gen_gnp(12, 0.5, 5).unwrap();
        let sp = find_matching_m(&g, partition_sites(12, &params, 5).unwrap()).unwrap();
        let ex = check_p1_exhaustive(&g, &sp, &params).unwrap();
        let sa = check_p1_sampled(&g, &sp, &params, 1 << 12, 99).unwrap();
        let mut ex_set: Vec<Vec<usize>> = ex.violations.iter().map(|v| v.witness.clone()).collect();
        let mut sa_set: Vec<Vec<usize>> = sa.violations.iter().map(|v| v.witness.clone()).collect();
        ex_set.sort();
        ex_set.dedup();
        sa_set.sort();
        sa_set.dedup();
        assert_eq!(ex_set, sa_set);
        // Replay: every reported witness still violates when recomputed.
        for v in &ex.violations {
            let stat = p1_statistic(&g, sp.matching().unwrap(), &v.witness).unwrap();
            assert_eq!(stat, v.statistic);
            assert!((stat as f64) < v.required);
        }
    }

    #[test]
    fn p2_complete_host_no_a_violations() {
        let params = GoodnessParams::desk(1.0);
        let g = k_n(300);
        let sp = find_matching_m(&g, partition_sites(300, &params, 2).unwrap()).unwrap();
        for k in [1, 2] {
            let rep = check_p2_sampled(&g, &sp, &params, k, 40, 3).unwrap();
            assert_eq!(rep.a_violation_count, 0);
            assert_eq!(rep.b_violation_count, 0);
            assert!(rep.a_samples == 40);
        }
    }

    #[test]
    fn p2_empty_host_all_a_violations() {
        // (P2) does not involve the matching, so no M is needed here.
        let params = GoodnessParams::desk(1.0);
        let g = Graph::empty(300);
        let sp = partition_sites(300, &params, 2).unwrap();
        let rep = check_p2_sampled(&g, &sp, &params, 1, 40, 3).unwrap();
        assert_eq!(rep.a_violation_count, rep.a_samples);
        assert!((rep.a_rate() - 1.0).abs() < 1e-12);
        // Clause (b), when feasible, also violates everywhere on the empty
        // graph.
        if rep.b_feasible {
            assert_eq!(rep.b_violation_count, rep.b_samples);
        }
    }

    #[test]
    fn p2_exhaustive_small_matches_brute_force_counting() {
        let params = GoodnessParams { c: 1.2, eps: 0.02, delta: 0.01 };
        let g = gen_gnp(14, 0.5, 8).unwrap();
        let sp = find_matching_m(&g, partition_sites(14, &params, 8).unwrap()).unwrap();
        let rep = check_p2_exhaustive(&g, &sp, &params, 1, 64, 9).unwrap();
        assert!(rep.exhaustive);
        // Independent recount of clause (a) for singleton S values.
        let mut violations = 0;
        for class_index in 1..=6u8 {
            let vi = sp.class_vertices(class_index);
            for v in 0..14 {
                if sp.label_of(v) == class_index {
                    continue;
                }
                let lhs = vi.iter().filter(|&&u| g.has_edge(v, u)).count();
                let required = (1.0 - params.delta) * rep.p * vi.len() as f64;
                if (lhs as f64) < required {
                    violations += 1;
                }
            }
        }
        assert_eq!(rep.a_violation_count, violations);
    }
}
