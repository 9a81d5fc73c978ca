//! Subsets of a sorted cost vector in nondecreasing order of their sums.
//!
//! Each subset is a set of rank positions into `costs`. From a popped subset
//! whose highest rank is `i`, two successors enter the queue: *extend*
//! (add `i + 1`) and *swap* (replace `i` by `i + 1`). Starting from the
//! empty set this reaches every subset exactly once, and with nonnegative
//! ascending costs no successor is cheaper than its parent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const NONE: u32 = u32::MAX;

/// Handle to a subset emitted by [`CandidateGenerator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CandidateId(u32);

impl CandidateId {
    pub const EMPTY: CandidateId = CandidateId(NONE);

    pub fn is_empty(self) -> bool {
        self.0 == NONE
    }
}

#[derive(Clone, Copy)]
struct Node {
    last: u32,
    prev: u32,
    sum: f64,
}

#[derive(Clone, Copy)]
struct Entry {
    sum: f64,
    seq: u64,
    node: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed: BinaryHeap is a max-heap and we want the smallest sum,
    // earliest insertion first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .sum
            .total_cmp(&self.sum)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Lazy enumeration of rank subsets by ascending cost sum.
#[derive(Default)]
pub struct CandidateGenerator {
    costs: Vec<f64>,
    nodes: Vec<Node>,
    heap: BinaryHeap<Entry>,
    seq: u64,
}

impl CandidateGenerator {
    /// `costs` must be sorted ascending and nonnegative.
    pub fn new(costs: Vec<f64>) -> Self {
        let mut gen = CandidateGenerator::default();
        gen.reset(costs);
        gen
    }

    /// Restarts from the empty set, keeping allocations.
    pub fn reset(&mut self, costs: Vec<f64>) {
        debug_assert!(costs.windows(2).all(|w| w[0] <= w[1]), "costs must be sorted");
        self.costs = costs;
        self.nodes.clear();
        self.heap.clear();
        self.seq = 0;
        self.push(NONE, 0.0);
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    fn push(&mut self, node: u32, sum: f64) {
        self.heap.push(Entry {
            sum,
            seq: self.seq,
            node,
        });
        self.seq += 1;
    }

    fn add_node(&mut self, last: usize, prev: u32) -> u32 {
        let base = if prev == NONE { 0.0 } else { self.nodes[prev as usize].sum };
        let sum = base + self.costs[last];
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            last: last as u32,
            prev,
            sum,
        });
        self.push(id, sum);
        id
    }

    /// Next subset and its cost sum; `None` once all `2^len` subsets are out.
    pub fn next_candidate(&mut self) -> Option<(CandidateId, f64)> {
        let Entry { sum, node, .. } = self.heap.pop()?;
        let (next_rank, prev) = if node == NONE {
            (0, None)
        } else {
            let n = self.nodes[node as usize];
            (n.last as usize + 1, Some(n.prev))
        };
        if next_rank < self.costs.len() {
            self.add_node(next_rank, node);
            if let Some(prev) = prev {
                self.add_node(next_rank, prev);
            }
        }
        Some((CandidateId(node), sum))
    }

    /// Ranks in the subset, highest first.
    pub fn ranks(&self, id: CandidateId) -> RankIter<'_> {
        RankIter {
            nodes: &self.nodes,
            cur: id.0,
        }
    }

    pub fn queued(&self) -> usize {
        self.heap.len()
    }
}

pub struct RankIter<'a> {
    nodes: &'a [Node],
    cur: u32,
}

impl Iterator for RankIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cur == NONE {
            return None;
        }
        let n = self.nodes[self.cur as usize];
        self.cur = n.prev;
        Some(n.last as usize)
    }
}

/// A materialized candidate: ascending ranks and cost sum.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub ranks: Vec<usize>,
    pub sum: f64,
}

impl Iterator for CandidateGenerator {
    type Item = Candidate;

    fn next(&mut self) -> Option<Candidate> {
        let (id, sum) = self.next_candidate()?;
        let mut ranks: Vec<usize> = self.ranks(id).collect();
        ranks.reverse();
        Some(Candidate { ranks, sum })
    }
}

/// Ordered stream of candidate subsets for ascending costs.
pub fn next_candidates(sorted_costs: Vec<f64>) -> CandidateGenerator {
    CandidateGenerator::new(sorted_costs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set_first() {
        let mut g = CandidateGenerator::new(vec![0.5, 1.0]);
        let first = g.next().unwrap();
        assert!(first.ranks.is_empty());
        assert_eq!(first.sum, 0.0);
    }

    #[test]
    fn exhausts_after_all_subsets() {
        let g = CandidateGenerator::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(g.count(), 8);
    }

    #[test]
    fn no_costs_yields_only_empty_set() {
        let g = CandidateGenerator::new(Vec::new());
        assert_eq!(g.count(), 1);
    }
}
