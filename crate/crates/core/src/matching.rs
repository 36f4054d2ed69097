//! Maximum bipartite matching (Hopcroft-Karp) and Hall deficiency
//! witnesses.
//!
//! Every stage of the embedding needs either a matching covering its whole
//! left side or a certificate that none exists; [`saturating_or_witness`]
//! provides exactly that dichotomy. All scan orders are fixed, so results
//! are deterministic functions of the instance.

use std::collections::VecDeque;
use thiserror::Error;

const UNMATCHED: usize = usize::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum MatchingError {
    #[error("right index {r} out of range for right_size={right_size}")]
    RightOutOfRange { r: usize, right_size: usize },
    #[error("left labels: expected {expected}, got {got}")]
    LeftLabelCount { expected: usize, got: usize },
}

/// Bipartite instance: adjacency from left vertices to right vertices, plus
/// opaque labels mapping each side back to whatever the caller is matching
/// (pattern vertices, host vertices, k-set indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteInstance {
    left_labels: Vec<usize>,
    right_labels: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl BipartiteInstance {
    /// Adjacency lists are sorted and deduped here; out-of-range right
    /// indices are rejected.
    pub fn new(
        left_labels: Vec<usize>,
        right_labels: Vec<usize>,
        mut adj: Vec<Vec<usize>>,
    ) -> Result<BipartiteInstance, MatchingError> {
        if adj.len() != left_labels.len() {
            return Err(MatchingError::LeftLabelCount {
                expected: left_labels.len(),
                got: adj.len(),
            });
        }
        let right_size = right_labels.len();
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            if let Some(&r) = list.last() {
                if r >= right_size {
                    return Err(MatchingError::RightOutOfRange { r, right_size });
                }
            }
        }
        Ok(BipartiteInstance { left_labels, right_labels, adj })
    }

    /// Instance with identity labels on both sides.
    pub fn unlabeled(
        left_size: usize,
        right_size: usize,
        adj: Vec<Vec<usize>>,
    ) -> Result<BipartiteInstance, MatchingError> {
        BipartiteInstance::new(
            (0..left_size).collect(),
            (0..right_size).collect(),
            adj,
        )
    }

    /// Replaces the left labels (e.g. set indices with pattern vertices).
    pub fn with_left_labels(mut self, labels: Vec<usize>) -> Result<BipartiteInstance, MatchingError> {
        if labels.len() != self.adj.len() {
            return Err(MatchingError::LeftLabelCount { expected: self.adj.len(), got: labels.len() });
        }
        self.left_labels = labels;
        Ok(self)
    }

    pub fn left_size(&self) -> usize {
        self.left_labels.len()
    }

    pub fn right_size(&self) -> usize {
        self.right_labels.len()
    }

    pub fn adj(&self, l: usize) -> &[usize] {
        &self.adj[l]
    }

    pub fn left_label(&self, l: usize) -> usize {
        self.left_labels[l]
    }

    pub fn right_label(&self, r: usize) -> usize {
        self.right_labels[r]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }
}

/// A matching as (left, right) index pairs. Also reused for matchings inside
/// a host graph, where both entries are host vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Valid for the instance: every pair an edge, no endpoint repeated.
    pub fn is_valid_for(&self, b: &BipartiteInstance) -> bool {
        let mut left_used = vec![false; b.left_size()];
        let mut right_used = vec![false; b.right_size()];
        self.pairs.iter().all(|&(l, r)| {
            l < b.left_size()
                && r < b.right_size()
                && b.adj(l).binary_search(&r).is_ok()
                && !std::mem::replace(&mut left_used[l], true)
                && !std::mem::replace(&mut right_used[r], true)
        })
    }
}

/// Left subset whose neighborhood is smaller than itself: the Hall-condition
/// certificate that no saturating matching exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeficiencyWitness {
    pub left_subset: Vec<usize>,
    pub neighborhood: Vec<usize>,
}

impl DeficiencyWitness {
    /// Recomputes N(left_subset) from the instance and checks it is smaller
    /// than the subset.
    pub fn verify(&self, b: &BipartiteInstance) -> bool {
        let mut nb = vec![false; b.right_size()];
        for &l in &self.left_subset {
            for &r in b.adj(l) {
                nb[r] = true;
            }
        }
        let recomputed: Vec<usize> =
            (0..b.right_size()).filter(|&r| nb[r]).collect();
        recomputed == self.neighborhood && self.neighborhood.len() < self.left_subset.len()
    }
}

/// Either a matching covering every left vertex, or a deficiency witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HallOutcome {
    Saturating(Matching),
    Deficient(DeficiencyWitness),
}

struct HopcroftKarp<'a> {
    b: &'a BipartiteInstance,
    match_l: Vec<usize>,
    match_r: Vec<usize>,
    dist: Vec<usize>,
}

impl<'a> HopcroftKarp<'a> {
    fn new(b: &'a BipartiteInstance) -> Self {
        HopcroftKarp {
            b,
            match_l: vec![UNMATCHED; b.left_size()],
            match_r: vec![UNMATCHED; b.right_size()],
            dist: vec![UNMATCHED; b.left_size()],
        }
    }

    /// BFS layering from free left vertices; true if a free right vertex is
    /// reachable.
    fn layer(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for l in 0..self.b.left_size() {
            if self.match_l[l] == UNMATCHED {
                self.dist[l] = 0;
                queue.push_back(l);
            } else {
                self.dist[l] = UNMATCHED;
            }
        }
        let mut reachable_free = false;
        while let Some(l) = queue.pop_front() {
            for &r in self.b.adj(l) {
                match self.match_r[r] {
                    UNMATCHED => reachable_free = true,
                    l2 if self.dist[l2] == UNMATCHED => {
                        self.dist[l2] = self.dist[l] + 1;
                        queue.push_back(l2);
                    }
                    _ => {}
                }
            }
        }
        reachable_free
    }

    fn augment(&mut self, l: usize) -> bool {
        for i in 0..self.b.adj(l).len() {
            let r = self.b.adj(l)[i];
            let l2 = self.match_r[r];
            if l2 == UNMATCHED || (self.dist[l2] == self.dist[l] + 1 && self.augment(l2)) {
                self.match_l[l] = r;
                self.match_r[r] = l;
                return true;
            }
        }
        self.dist[l] = UNMATCHED;
        false
    }

    fn run(&mut self) {
        while self.layer() {
            for l in 0..self.b.left_size() {
                if self.match_l[l] == UNMATCHED && self.dist[l] == 0 {
                    self.augment(l);
                }
            }
        }
    }

    fn matching(&self) -> Matching {
        Matching {
            pairs: (0..self.b.left_size())
                .filter(|&l| self.match_l[l] != UNMATCHED)
                .map(|l| (l, self.match_l[l]))
                .collect(),
        }
    }

    /// Konig witness after a failed run: free left vertices plus everything
    /// reachable from them by alternating paths.
    fn witness(&self) -> DeficiencyWitness {
        let mut in_u = vec![false; self.b.left_size()];
        let mut in_n = vec![false; self.b.right_size()];
        let mut queue: VecDeque<usize> = (0..self.b.left_size())
            .filter(|&l| self.match_l[l] == UNMATCHED)
            .collect();
        for &l in &queue {
            in_u[l] = true;
        }
        while let Some(l) = queue.pop_front() {
            for &r in self.b.adj(l) {
                if !in_n[r] {
                    in_n[r] = true;
                    let l2 = self.match_r[r];
                    if l2 != UNMATCHED && !in_u[l2] {
                        in_u[l2] = true;
                        queue.push_back(l2);
                    }
                }
            }
        }
        DeficiencyWitness {
            left_subset: (0..self.b.left_size()).filter(|&l| in_u[l]).collect(),
            neighborhood: (0..self.b.right_size()).filter(|&r| in_n[r]).collect(),
        }
    }
}

/// Maximum-cardinality matching, O(E sqrt(V)). Deterministic: BFS takes left
/// vertices in ascending order, DFS follows sorted adjacency.
pub fn max_matching(b: &BipartiteInstance) -> Matching {
    let mut hk = HopcroftKarp::new(b);
    hk.run();
    hk.matching()
}

/// Saturating matching of the left side, or a verified deficiency witness.
pub fn saturating_or_witness(b: &BipartiteInstance) -> HallOutcome {
    let mut hk = HopcroftKarp::new(b);
    hk.run();
    let m = hk.matching();
    if m.len() == b.left_size() {
        return HallOutcome::Saturating(m);
    }
    let w = hk.witness();
    assert!(w.verify(b), "Konig witness failed recomputation");
    HallOutcome::Deficient(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_instance(rng: &mut SplitMix64, max_left: usize, max_right: usize) -> BipartiteInstance {
        let nl = rng.index(max_left + 1);
        let nr = rng.index(max_right + 1);
        let density = rng.next_f64();
        let adj = (0..nl)
            .map(|_| (0..nr).filter(|_| rng.next_f64() < density).collect())
            .collect();
        BipartiteInstance::unlabeled(nl, nr, adj).unwrap()
    }

    /// Independent oracle: Kuhn's O(V*E) augmenting-path matcher.
    fn kuhn_size(b: &BipartiteInstance) -> usize {
        fn try_kuhn(
            b: &BipartiteInstance,
            l: usize,
            seen: &mut [bool],
            match_r: &mut [usize],
        ) -> bool {
            for &r in b.adj(l) {
                if !seen[r] {
                    seen[r] = true;
                    if match_r[r] == UNMATCHED || try_kuhn(b, match_r[r], seen, match_r) {
                        match_r[r] = l;
                        return true;
                    }
                }
            }
            false
        }
        let mut match_r = vec![UNMATCHED; b.right_size()];
        let mut size = 0;
        for l in 0..b.left_size() {
            let mut seen = vec![false; b.right_size()];
            if try_kuhn(b, l, &mut seen, &mut match_r) {
                size += 1;
            }
        }
        size
    }

    /// Exhaustive Hall check over all left subsets (small instances only).
    fn hall_violation_exists(b: &BipartiteInstance) -> bool {
        let nl = b.left_size();
        for mask in 1u32..(1 << nl) {
            let mut nb = vec![false; b.right_size()];
            let mut size = 0;
            for l in 0..nl {
                if mask & (1 << l) != 0 {
                    size += 1;
                    for &r in b.adj(l) {
                        nb[r] = true;
                    }
                }
            }
            if nb.iter().filter(|&&x| x).count() < size {
                return true;
            }
        }
        false
    }

    #[test]
    fn complete_3x3_has_perfect_matching() {
        let b = BipartiteInstance::unlabeled(3, 3, vec![vec![0, 1, 2]; 3]).unwrap();
        let m = max_matching(&b);
        assert_eq!(m.len(), 3);
        assert!(m.is_valid_for(&b));
    }

    #[test]
    fn pigeonhole_two_into_one() {
        let b = BipartiteInstance::unlabeled(2, 1, vec![vec![0], vec![0]]).unwrap();
        assert_eq!(max_matching(&b).len(), 1);
        match saturating_or_witness(&b) {
            HallOutcome::Deficient(w) => {
                assert_eq!(w.left_subset, vec![0, 1]);
                assert_eq!(w.neighborhood, vec![0]);
            }
            HallOutcome::Saturating(_) => panic!("expected deficiency"),
        }
    }

    #[test]
    fn single_edge_saturates() {
        let b = BipartiteInstance::unlabeled(1, 1, vec![vec![0]]).unwrap();
        match saturating_or_witness(&b) {
            HallOutcome::Saturating(m) => assert_eq!(m.pairs, vec![(0, 0)]),
            HallOutcome::Deficient(_) => panic!("expected matching"),
        }
    }

    #[test]
    fn empty_left_side_saturates_trivially() {
        let b = BipartiteInstance::unlabeled(0, 3, vec![]).unwrap();
        assert!(matches!(saturating_or_witness(&b), HallOutcome::Saturating(m) if m.is_empty()));
    }

    #[test]
    fn matches_kuhn_oracle_on_random_instances() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..500 {
            let b = random_instance(&mut rng, 12, 12);
            let m = max_matching(&b);
            assert!(m.is_valid_for(&b));
            assert_eq!(m.len(), kuhn_size(&b));
        }
    }

    #[test]
    fn agrees_with_exhaustive_hall_on_small_instances() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..2000 {
            let b = random_instance(&mut rng, 4, 4);
            match saturating_or_witness(&b) {
                HallOutcome::Saturating(m) => {
                    assert_eq!(m.len(), b.left_size());
                    assert!(m.is_valid_for(&b));
                    assert!(!hall_violation_exists(&b));
                }
                HallOutcome::Deficient(w) => {
                    assert!(w.verify(&b));
                    assert!(hall_violation_exists(&b));
                }
            }
        }
    }

    #[test]
    fn deterministic_output() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..50 {
            let b = random_instance(&mut rng, 10, 10);
            assert_eq!(max_matching(&b), max_matching(&b));
        }
    }

    #[test]
    fn rejects_out_of_range_adjacency() {
        assert!(BipartiteInstance::unlabeled(1, 1, vec![vec![1]]).is_err());
    }
}
