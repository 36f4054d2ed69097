//! The staged embedding pipeline.
//!
//! Stage 0 seeds the class-0 pattern vertices onto the reserved host
//! matching: the i-th class-6 neighbor pair lands on the i-th matching edge.
//! Stages 1 through 6 then place one pattern class each: stage i builds the
//! auxiliary bipartite graph between the class and the still-free host
//! vertices of classes 0..=i — a pattern vertex is compatible with a host
//! vertex exactly when the images of its already-embedded neighbors are all
//! host-adjacent to it — and extends the embedding along a matching that
//! covers the whole class. No Hall condition is assumed anywhere: a stage
//! that cannot saturate returns the deficiency witness instead.

use crate::goodness::{
    build_cone_bipartite, find_matching_m, partition_sites, GoodnessError, GoodnessParams,
    SitePartition,
};
use crate::graph::Graph;
use crate::matching::{
    saturating_or_witness, BipartiteInstance, DeficiencyWitness, HallOutcome, Matching,
};
use crate::pattern::{maximalize, partition_pattern, PatternError, PatternPartition};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("host has {host} vertices, pattern {pattern}; they must agree")]
    SizeMismatch { host: usize, pattern: usize },
    #[error("matching has {matching} edges but there are {pairs} class-6 pairs")]
    SeedSizeMismatch { matching: usize, pairs: usize },
    #[error("stage {found} embedding where stage {expected} was required")]
    StageMismatch { expected: usize, found: usize },
    #[error("matching covers {covered} of {left} left vertices; cannot extend")]
    NonSaturating { covered: usize, left: usize },
    #[error("pattern vertex {w} already embedded")]
    AlreadyEmbedded { w: usize },
    #[error("host vertex {v} already used")]
    HostInUse { v: usize },
    #[error("a finished embedding failed verification: {0}")]
    VerificationFailed(VerifyError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Goodness(#[from] GoodnessError),
}

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("map has {got} entries for {expected} pattern vertices")]
    WrongLength { expected: usize, got: usize },
    #[error("map is not a bijection at pattern vertex {w} (host {v})")]
    NotBijective { w: usize, v: usize },
    #[error("pattern edge {u}-{v} maps to non-edge {fu}-{fv}")]
    EdgeNotPreserved { u: usize, v: usize, fu: usize, fv: usize },
}

/// Injective partial map from pattern vertices to host vertices, staged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialEmbedding {
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    stage: usize,
    embedded: usize,
}

impl PartialEmbedding {
    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// Last completed stage index.
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn get(&self, w: usize) -> Option<usize> {
        self.map[w]
    }

    pub fn image_contains(&self, v: usize) -> bool {
        self.used[v]
    }

    pub fn domain_size(&self) -> usize {
        self.embedded
    }

    fn insert(&mut self, w: usize, v: usize) -> Result<(), EmbedError> {
        if self.map[w].is_some() {
            return Err(EmbedError::AlreadyEmbedded { w });
        }
        if self.used[v] {
            return Err(EmbedError::HostInUse { v });
        }
        self.map[w] = Some(v);
        self.used[v] = true;
        self.embedded += 1;
        Ok(())
    }
}

/// Completed embedding: `map[w]` is the host vertex of pattern vertex `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub map: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// A stage's bipartite graph has no matching covering its class.
    MatchingDeficient,
    /// Pattern or site partition cannot be built at these sizes.
    PartitionInfeasible,
    /// The class-0 host matching could not reach its required size.
    MDeficient,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::MatchingDeficient => "matching-deficient",
            FailureReason::PartitionInfeasible => "partition-infeasible",
            FailureReason::MDeficient => "M-deficient",
        })
    }
}

/// Result of an embedding attempt: the bijection, or the stage that failed
/// with a replayable reason.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbedOutcome {
    Success(Embedding),
    Failure {
        stage: usize,
        reason: FailureReason,
        witness: Option<DeficiencyWitness>,
        detail: String,
    },
}

impl EmbedOutcome {
    fn failure(stage: usize, reason: FailureReason, witness: Option<DeficiencyWitness>, detail: String) -> EmbedOutcome {
        EmbedOutcome::Failure { stage, reason, witness, detail }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, EmbedOutcome::Success(_))
    }

    pub fn witness_size(&self) -> usize {
        match self {
            EmbedOutcome::Failure { witness: Some(w), .. } => w.left_subset.len(),
            _ => 0,
        }
    }

    pub fn failing_stage(&self) -> Option<usize> {
        match self {
            EmbedOutcome::Failure { stage, .. } => Some(*stage),
            EmbedOutcome::Success(_) => None,
        }
    }

    /// Wire form: "SUCCESS" plus one "w v" line per pattern vertex, or a
    /// single "FAILURE stage=<i> reason=<r> witness_size=<k>" line.
    pub fn to_text(&self) -> String {
        match self {
            EmbedOutcome::Success(e) => {
                let mut out = String::from("SUCCESS\n");
                for (w, &v) in e.map.iter().enumerate() {
                    out.push_str(&format!("{w} {v}\n"));
                }
                out
            }
            EmbedOutcome::Failure { stage, reason, .. } => {
                format!("FAILURE stage={stage} reason={reason} witness_size={}\n", self.witness_size())
            }
        }
    }
}

/// Parse of the wire form; failure witnesses are reduced to their size.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedOutcome {
    Success(Vec<usize>),
    Failure { stage: usize, reason: String, witness_size: usize },
}

pub fn parse_outcome_text(text: &str) -> Result<ParsedOutcome, String> {
    let mut lines = text.lines();
    let head = lines.next().ok_or("empty outcome text")?;
    if head == "SUCCESS" {
        let mut pairs = Vec::new();
        for (idx, line) in lines.enumerate() {
            let mut it = line.split(' ');
            let (w, v) = (it.next(), it.next());
            match (
                w.and_then(|s| s.parse::<usize>().ok()),
                v.and_then(|s| s.parse::<usize>().ok()),
                it.next(),
            ) {
                (Some(w), Some(v), None) => {
                    if w != idx {
                        return Err(format!("expected vertex {idx}, found {w}"));
                    }
                    pairs.push(v);
                }
                _ => return Err(format!("malformed map line {}", idx + 2)),
            }
        }
        Ok(ParsedOutcome::Success(pairs))
    } else if let Some(rest) = head.strip_prefix("FAILURE ") {
        let mut stage = None;
        let mut reason = None;
        let mut witness = None;
        for field in rest.split(' ') {
            match field.split_once('=') {
                Some(("stage", v)) => stage = v.parse().ok(),
                Some(("reason", v)) => reason = Some(v.to_string()),
                Some(("witness_size", v)) => witness = v.parse().ok(),
                _ => return Err(format!("unknown failure field {field}")),
            }
        }
        match (stage, reason, witness) {
            (Some(stage), Some(reason), Some(witness_size)) => {
                Ok(ParsedOutcome::Failure { stage, reason, witness_size })
            }
            _ => Err("incomplete FAILURE line".into()),
        }
    } else {
        Err(format!("unrecognized outcome header: {head}"))
    }
}

/// Stage 0: maps the i-th class-6 neighbor pair (a, b), a < b, onto the
/// i-th matching edge (x, y), x < y, as a -> x, b -> y.
pub fn embed_w0(sp: &SitePartition, pp: &PatternPartition) -> Result<PartialEmbedding, EmbedError> {
    let m = sp.matching().ok_or(GoodnessError::MatchingMissing)?;
    if m.len() != pp.w6_pairs().len() {
        return Err(EmbedError::SeedSizeMismatch { matching: m.len(), pairs: pp.w6_pairs().len() });
    }
    let n = sp.n();
    let mut f = PartialEmbedding { map: vec![None; n], used: vec![false; n], stage: 0, embedded: 0 };
    for (&(_, a, b), &(x, y)) in pp.w6_pairs().iter().zip(&m.pairs) {
        debug_assert!(a < b && x < y);
        f.insert(a, x)?;
        f.insert(b, y)?;
    }
    Ok(f)
}

/// Builds the stage-i bipartite graph: left side the class-i pattern
/// vertices, right side the free host vertices of classes 0..=i, adjacency
/// by containment of the embedded-neighbor images in the host neighborhood.
/// A pattern vertex with no embedded neighbors gets a full row.
pub fn build_bi(
    g: &Graph,
    h: &Graph,
    pp: &PatternPartition,
    sp: &SitePartition,
    f: &PartialEmbedding,
    i: usize,
) -> Result<BipartiteInstance, EmbedError> {
    if !(1..=6).contains(&i) || f.stage() != i - 1 {
        return Err(EmbedError::StageMismatch { expected: i - 1, found: f.stage() });
    }
    let wi = pp.class_vertices(i as u8);
    let vi_star: Vec<usize> = (0..g.n())
        .filter(|&v| sp.label_of(v) <= i as u8 && !f.image_contains(v))
        .collect();
    let sets: Vec<Vec<usize>> = wi
        .iter()
        .map(|&w| {
            let mut set: Vec<usize> = h
                .neighbors(w)
                .iter()
                .filter(|&&x| (pp.class_of(x) as usize) < i)
                .map(|&x| f.get(x).expect("classes below the current stage are embedded"))
                .collect();
            set.sort_unstable();
            set
        })
        .collect();
    let b = build_cone_bipartite(g, &sets, &vi_star)?;
    Ok(b.with_left_labels(wi).expect("one label per class vertex"))
}

/// Extends the embedding along a matching that covers the whole left side;
/// bumps the stage.
pub fn extend(
    mut f: PartialEmbedding,
    b: &BipartiteInstance,
    m: &Matching,
) -> Result<PartialEmbedding, EmbedError> {
    if m.len() != b.left_size() {
        return Err(EmbedError::NonSaturating { covered: m.len(), left: b.left_size() });
    }
    for &(l, r) in &m.pairs {
        f.insert(b.left_label(l), b.right_label(r))?;
    }
    f.stage += 1;
    Ok(f)
}

/// Checks that `map` is a bijection carrying every pattern edge to a host
/// edge; reports the first violation.
pub fn verify_embedding(g: &Graph, h: &Graph, map: &[usize]) -> Result<(), VerifyError> {
    if map.len() != h.n() {
        return Err(VerifyError::WrongLength { expected: h.n(), got: map.len() });
    }
    let mut seen = vec![false; g.n().max(1)];
    for (w, &v) in map.iter().enumerate() {
        if v >= g.n() || seen[v] {
            return Err(VerifyError::NotBijective { w, v });
        }
        seen[v] = true;
    }
    for (u, v) in h.edges() {
        if !g.has_edge(map[u], map[v]) {
            return Err(VerifyError::EdgeNotPreserved { u, v, fu: map[u], fv: map[v] });
        }
    }
    Ok(())
}

/// Hall diagnostic for one bipartite instance: None when a saturating
/// matching exists, otherwise the deficiency witness.
pub fn hall_diagnostic(b: &BipartiteInstance) -> Option<DeficiencyWitness> {
    match saturating_or_witness(b) {
        HallOutcome::Saturating(_) => None,
        HallOutcome::Deficient(w) => Some(w),
    }
}

/// Runs the whole pipeline: maximalize the pattern, partition both sides,
/// reserve the host matching, seed stage 0, then extend through stages 1-6.
/// Structural impossibilities and Hall failures come back as
/// [`EmbedOutcome::Failure`] with the stage and witness; hard usage errors
/// (size mismatch, degree > 2) are `Err`. A returned success has already
/// been verified against the original pattern.
pub fn embed(
    g: &Graph,
    h: &Graph,
    params: &GoodnessParams,
    seed: u64,
) -> Result<EmbedOutcome, EmbedError> {
    if g.n() != h.n() {
        return Err(EmbedError::SizeMismatch { host: g.n(), pattern: h.n() });
    }
    let hm = maximalize(h)?;
    let pp = match partition_pattern(&hm, params.eps) {
        Ok(pp) => pp,
        Err(PatternError::PartitionInfeasible(msg)) => {
            return Ok(EmbedOutcome::failure(0, FailureReason::PartitionInfeasible, None, msg));
        }
        Err(e) => return Err(e.into()),
    };
    let sp = match partition_sites(g.n(), params, seed) {
        Ok(sp) => sp,
        Err(GoodnessError::SizeInfeasible(msg)) => {
            return Ok(EmbedOutcome::failure(0, FailureReason::PartitionInfeasible, None, msg));
        }
        Err(e) => return Err(e.into()),
    };
    let sp = match find_matching_m(g, sp) {
        Ok(sp) => sp,
        Err(GoodnessError::MatchingDeficient { achieved, target }) => {
            return Ok(EmbedOutcome::failure(
                0,
                FailureReason::MDeficient,
                None,
                format!("matching reached {achieved} of {target}"),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    let mut f = embed_w0(&sp, &pp)?;
    for i in 1..=6 {
        let b = build_bi(g, &hm, &pp, &sp, &f, i)?;
        match saturating_or_witness(&b) {
            HallOutcome::Saturating(m) => {
                f = extend(f, &b, &m)?;
            }
            HallOutcome::Deficient(w) => {
                let detail = format!(
                    "stage {i}: |U|={} |N(U)|={} in a {}x{} instance",
                    w.left_subset.len(),
                    w.neighborhood.len(),
                    b.left_size(),
                    b.right_size()
                );
                return Ok(EmbedOutcome::failure(i, FailureReason::MatchingDeficient, Some(w), detail));
            }
        }
    }
    let map: Vec<usize> = (0..h.n())
        .map(|w| f.get(w).expect("all seven classes embedded"))
        .collect();
    verify_embedding(g, h, &map).map_err(EmbedError::VerificationFailed)?;
    Ok(EmbedOutcome::Success(Embedding { map }))
}
