//! The deterministic round-based activation process.
//!
//! A vertex `u` outside the active set joins at round `l` when at least
//! `t(u) - s(u)` of its neighbors were active at round `l - 1`. Seeding a
//! target set `S` is the special case `s(v) = t(v)` on `S` and zero elsewhere.
//!
//! Each diffusion touches every edge at most twice, so a full run is
//! `O(n + m)`.

use crate::graph::{Graph, Vertex};
use crate::thresholds::{CostMap, ThresholdMap};

/// A set of seeded vertices, kept sorted and duplicate-free.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TargetSet {
    members: Vec<Vertex>,
}

impl TargetSet {
    pub fn new(mut members: Vec<Vertex>) -> Self {
        members.sort_unstable();
        members.dedup();
        TargetSet { members }
    }

    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Total purchase cost `sum c(v)` over members.
    pub fn cost(&self, c: &CostMap) -> u64 {
        self.members.iter().map(|&v| c.get(v) as u64).sum()
    }

    /// The equivalent incentive vector: `s(v) = t(v)` on members, zero elsewhere.
    pub fn as_incentives(&self, t: &ThresholdMap) -> IncentiveVector {
        let mut s = vec![0; t.len()];
        for &v in &self.members {
            s[v] = t.get(v);
        }
        IncentiveVector(s)
    }
}

impl FromIterator<Vertex> for TargetSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        TargetSet::new(iter.into_iter().collect())
    }
}

/// Per-vertex partial incentives `s(v) >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncentiveVector(Vec<u32>);

impl IncentiveVector {
    pub fn new(values: Vec<u32>) -> Self {
        IncentiveVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        IncentiveVector(vec![0; n])
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> u32 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum s(v)`.
    pub fn cost(&self) -> u64 {
        self.0.iter().map(|&s| s as u64).sum()
    }

    /// Vertices with a nonzero incentive, with their amounts.
    pub fn support(&self) -> impl Iterator<Item = (Vertex, u32)> + '_ {
        self.0.iter().enumerate().filter(|(_, &s)| s > 0).map(|(v, &s)| (v, s))
    }
}

/// Round-by-round record of one activation process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffusionTrace {
    /// `rounds[l]` holds the vertices that became active at round `l`,
    /// sorted; `rounds[0]` is the initially active set. Only round 0 may be
    /// empty.
    pub rounds: Vec<Vec<Vertex>>,
    active: Vec<bool>,
    active_count: usize,
}

impl DiffusionTrace {
    /// Index of the last round that activated anything; the process is at a
    /// fixpoint from this round on.
    pub fn converged_round(&self) -> usize {
        self.rounds.len() - 1
    }

    pub fn is_active(&self, v: Vertex) -> bool {
        self.active[v]
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn active_set(&self) -> Vec<Vertex> {
        (0..self.active.len()).filter(|&v| self.active[v]).collect()
    }

    /// Whether every vertex ended up active.
    pub fn is_complete(&self) -> bool {
        self.active_count == self.active.len()
    }

    /// Percentage of active vertices, 100 for the empty graph.
    pub fn coverage_percent(&self) -> f64 {
        if self.active.is_empty() {
            100.0
        } else {
            100.0 * self.active_count as f64 / self.active.len() as f64
        }
    }
}

/// Runs the process from explicit per-vertex residual requirements
/// `need(v) = max(t(v) - s(v), 0)`; vertices with need 0 start active.
fn run(g: &Graph, need: &[u32]) -> DiffusionTrace {
    let n = g.n();
    debug_assert_eq!(need.len(), n);
    let mut active = vec![false; n];
    let mut hits = vec![0u32; n];
    let mut frontier: Vec<Vertex> = (0..n).filter(|&v| need[v] == 0).collect();
    for &v in &frontier {
        active[v] = true;
    }
    let mut active_count = frontier.len();
    let mut rounds = vec![frontier.clone()];
    let mut next = Vec::new();
    while !frontier.is_empty() {
        for &v in &frontier {
            for &w in g.neighbors(v) {
                if active[w] {
                    continue;
                }
                hits[w] += 1;
                // counted from vertices active before this round, so w joins
                // exactly one round after its count first reaches need(w)
                if hits[w] == need[w] {
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        for &w in &next {
            active[w] = true;
        }
        active_count += next.len();
        next.sort_unstable();
        rounds.push(next.clone());
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
    DiffusionTrace { rounds, active, active_count }
}

/// Activation process started by seeding every vertex of `seeds`.
pub fn diffuse_set(g: &Graph, t: &ThresholdMap, seeds: &TargetSet) -> DiffusionTrace {
    let mut need: Vec<u32> = t.as_slice().to_vec();
    for &v in seeds.members() {
        need[v] = 0;
    }
    run(g, &need)
}

/// Activation process started with partial incentives `s`.
pub fn diffuse_incentives(g: &Graph, t: &ThresholdMap, s: &IncentiveVector) -> DiffusionTrace {
    let need: Vec<u32> = t.as_slice().iter().zip(s.as_slice()).map(|(&tv, &sv)| tv.saturating_sub(sv)).collect();
    run(g, &need)
}

pub fn is_target_set(g: &Graph, t: &ThresholdMap, seeds: &TargetSet) -> bool {
    diffuse_set(g, t, seeds).is_complete()
}

pub fn is_target_vector(g: &Graph, t: &ThresholdMap, s: &IncentiveVector) -> bool {
    diffuse_incentives(g, t, s).is_complete()
}
