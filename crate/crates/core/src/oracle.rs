//! Exact solvers for small instances, the closed-form tree optimum, and the
//! gadget reduction from minimum target sets to partial incentives.
//!
//! All solvers work on bitmask adjacency and enforce hard size limits; they
//! exist to check the heuristics, not to scale.
//!
//! Two independent exact routes exist for incentives:
//!
//! * [`brute_force_tpi`] minimizes over activation orders with a subset DP.
//!   Any target vector activates vertices in some order in which each `v`
//!   has `s(v) >= t(v) - #earlier neighbors`; conversely every order yields
//!   the target vector `s(v) = max(0, t(v) - #earlier neighbors)`.
//! * [`enumerate_tpi`] tries every vector with `0 <= s(v) <= t(v)` in order
//!   of increasing total and replays the diffusion on each.

use thiserror::Error;

use crate::diffusion::{IncentiveVector, TargetSet};
use crate::graph::{Graph, Vertex};
use crate::thresholds::{CostMap, ThresholdMap, ValueError};

/// Vertex limit of the subset-based solvers.
pub const MAX_SUBSET_VERTICES: usize = 20;
/// Vertex limit of [`enumerate_tpi`].
pub const MAX_ENUMERATION_VERTICES: usize = 64;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {got} vertices; this solver accepts at most {limit}")]
    TooLarge { limit: usize, got: usize },
    #[error("graph is not a tree")]
    NotATree,
    #[error("vertex {vertex}: threshold {threshold} outside 1..={degree}")]
    ThresholdOutOfRange { vertex: Vertex, threshold: u32, degree: usize },
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// Small graph as one neighbor bitmask per vertex.
struct Bits {
    adj: Vec<u64>,
    full: u64,
}

impl Bits {
    fn new(g: &Graph, limit: usize) -> Result<Self, OracleError> {
        if g.n() > limit {
            return Err(OracleError::TooLarge { limit, got: g.n() });
        }
        let adj = g.vertices().map(|v| g.neighbors(v).iter().fold(0u64, |acc, &w| acc | 1 << w)).collect();
        let full = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
        Ok(Bits { adj, full })
    }

    /// Final active set when vertex `v` needs `need[v]` active neighbors and
    /// `start` is active initially.
    fn closure(&self, start: u64, need: &[u32]) -> u64 {
        let mut active = start;
        loop {
            let mut grown = active;
            let mut rest = self.full & !active;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if (self.adj[v] & active).count_ones() >= need[v] {
                    grown |= 1 << v;
                }
            }
            if grown == active {
                return active;
            }
            active = grown;
        }
    }

    fn activates_all(&self, start: u64, need: &[u32]) -> bool {
        self.closure(start, need) == self.full
    }
}

fn members(mask: u64) -> TargetSet {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Minimum-cost target set by exhaustive subset search (`n <= 20`).
pub fn brute_force_wtss(g: &Graph, t: &ThresholdMap, c: &CostMap) -> Result<(u64, TargetSet), OracleError> {
    t.check_size(g)?;
    c.check_size(g)?;
    let bits = Bits::new(g, MAX_SUBSET_VERTICES)?;
    let n = g.n();
    let (mut best, mut best_mask) = (c.sum(), bits.full);
    for mask in 0..(1u64 << n) {
        let mut cost = 0u64;
        let mut rest = mask;
        while rest != 0 && cost < best {
            cost += c.get(rest.trailing_zeros() as usize) as u64;
            rest &= rest - 1;
        }
        if cost < best && bits.activates_all(mask, t.as_slice()) {
            best = cost;
            best_mask = mask;
        }
    }
    Ok((best, members(best_mask)))
}

/// Minimum-size target set, searching sizes in increasing order (`n <= 20`).
pub fn brute_force_tss(g: &Graph, t: &ThresholdMap) -> Result<(usize, TargetSet), OracleError> {
    t.check_size(g)?;
    let bits = Bits::new(g, MAX_SUBSET_VERTICES)?;
    let n = g.n();
    for k in 0..=n {
        if k == 0 {
            if bits.activates_all(0, t.as_slice()) {
                return Ok((0, TargetSet::default()));
            }
            continue;
        }
        // Gosper's hack over k-subsets
        let mut mask: u64 = (1 << k) - 1;
        while mask <= bits.full {
            if bits.activates_all(mask, t.as_slice()) {
                return Ok((k, members(mask)));
            }
            let low = mask & mask.wrapping_neg();
            let ripple = mask + low;
            mask = (((ripple ^ mask) >> 2) / low) | ripple;
        }
    }
    unreachable!("the full vertex set is always a target set")
}

/// Minimum total incentive via the activation-order DP (`n <= 20`).
pub fn brute_force_tpi(g: &Graph, t: &ThresholdMap) -> Result<(u64, IncentiveVector), OracleError> {
    t.check_size(g)?;
    let bits = Bits::new(g, MAX_SUBSET_VERTICES)?;
    let n = g.n();
    let size = 1usize << n;
    let mut best = vec![u64::MAX; size];
    let mut last = vec![u8::MAX; size];
    best[0] = 0;
    for mask in 0..size {
        let here = best[mask];
        if here == u64::MAX {
            continue;
        }
        for v in 0..n {
            if mask >> v & 1 == 1 {
                continue;
            }
            let earlier = (bits.adj[v] & mask as u64).count_ones();
            let next = mask | 1 << v;
            let cost = here + t.get(v).saturating_sub(earlier) as u64;
            if cost < best[next] {
                best[next] = cost;
                last[next] = v as u8;
            }
        }
    }
    let mut s = vec![0u32; n];
    let mut mask = size - 1;
    while mask != 0 {
        let v = last[mask] as usize;
        mask &= !(1 << v);
        let earlier = (bits.adj[v] & mask as u64).count_ones();
        s[v] = t.get(v).saturating_sub(earlier);
    }
    Ok((best[size - 1], IncentiveVector::new(s)))
}

/// Minimum total incentive by trying every vector `0 <= s <= t` in order of
/// increasing total, stopping after totals above `budget` (`n <= 64`).
/// Returns `None` when nothing within the budget works.
pub fn enumerate_tpi(g: &Graph, t: &ThresholdMap, budget: u64) -> Result<Option<(u64, IncentiveVector)>, OracleError> {
    t.check_size(g)?;
    let bits = Bits::new(g, MAX_ENUMERATION_VERTICES)?;
    let mut need = t.as_slice().to_vec();
    for total in 0..=budget.min(t.sum()) {
        if let Some(s) = compositions(&bits, t.as_slice(), &mut need, 0, total as u32, 0) {
            let s = t.as_slice().iter().zip(&s).map(|(&tv, &nv)| tv - nv).collect();
            return Ok(Some((total, IncentiveVector::new(s))));
        }
    }
    Ok(None)
}

/// Distributes exactly `left` units over vertices `v..`, lowering `need`.
/// `start` caches vertices whose need already hit zero.
fn compositions(bits: &Bits, t: &[u32], need: &mut Vec<u32>, v: usize, left: u32, start: u64) -> Option<Vec<u32>> {
    if left == 0 {
        return bits.activates_all(start, need).then(|| need.clone());
    }
    if v == t.len() {
        return None;
    }
    let cap = left.min(t[v]);
    for give in (0..=cap).rev() {
        need[v] = t[v] - give;
        let start = if need[v] == 0 { start | 1 << v } else { start };
        if let Some(found) = compositions(bits, t, need, v + 1, left - give, start) {
            return Some(found);
        }
    }
    need[v] = t[v];
    None
}

/// Optimal total incentive on a tree: `n - 1 - sum (d(v) - t(v))`.
pub fn tree_optimal_cost(g: &Graph, t: &ThresholdMap) -> Result<u64, OracleError> {
    t.check_size(g)?;
    if !g.is_tree() {
        return Err(OracleError::NotATree);
    }
    let slack: i64 = g.vertices().map(|v| g.degree(v) as i64 - t.get(v) as i64).sum();
    Ok((g.n() as i64 - 1 - slack) as u64)
}

/// Vertex ids of the gadget replacing one original vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    /// Stands in for the original vertex; carries its threshold and its
    /// cross edges.
    pub head: Vertex,
    /// Far end of the parallel two-edge paths.
    pub tail: Vertex,
    /// Middle vertices of the `d(v)` paths `head - middle - tail`.
    pub middles: std::ops::Range<Vertex>,
}

impl Gadget {
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        [self.head, self.tail].into_iter().chain(self.middles.clone())
    }
}

/// Result of replacing every vertex by its gadget.
#[derive(Debug, Clone)]
pub struct GadgetGraph {
    pub graph: Graph,
    pub thresholds: ThresholdMap,
    /// Indexed by original vertex.
    pub gadgets: Vec<Gadget>,
}

impl GadgetGraph {
    /// Incentive vector giving one unit to the tail of every seeded gadget.
    pub fn lift_target_set(&self, seeds: &TargetSet) -> IncentiveVector {
        let mut s = vec![0; self.graph.n()];
        for &v in seeds.members() {
            s[self.gadgets[v].tail] = 1;
        }
        IncentiveVector::new(s)
    }

    /// Original vertices whose gadget received any incentive.
    pub fn project_vector(&self, s: &IncentiveVector) -> TargetSet {
        self.gadgets
            .iter()
            .enumerate()
            .filter(|(_, gadget)| gadget.vertices().any(|u| s.get(u) > 0))
            .map(|(v, _)| v)
            .collect()
    }
}

/// Replaces each vertex `v` by `d(v) + 2` vertices: a head (threshold
/// `t(v)`) and a tail joined by `d(v)` disjoint two-edge paths, all
/// non-head thresholds 1. Heads are adjacent exactly when the original
/// vertices are. Requires `1 <= t(v) <= d(v)`.
pub fn build_gadget(g: &Graph, t: &ThresholdMap) -> Result<GadgetGraph, OracleError> {
    t.check_size(g)?;
    for v in g.vertices() {
        let (threshold, degree) = (t.get(v), g.degree(v));
        if threshold == 0 || threshold as usize > degree {
            return Err(OracleError::ThresholdOutOfRange { vertex: v, threshold, degree });
        }
    }
    let mut gadgets = Vec::with_capacity(g.n());
    let mut next = 0;
    for v in g.vertices() {
        let d = g.degree(v);
        gadgets.push(Gadget { head: next, tail: next + 1, middles: next + 2..next + 2 + d });
        next += d + 2;
    }
    let mut edges = Vec::with_capacity(g.m() + 2 * next);
    let mut thresholds = vec![1u32; next];
    for (v, gadget) in gadgets.iter().enumerate() {
        thresholds[gadget.head] = t.get(v);
        for mid in gadget.middles.clone() {
            edges.push((gadget.head, mid));
            edges.push((mid, gadget.tail));
        }
    }
    edges.extend(g.edges().map(|(u, v)| (gadgets[u].head, gadgets[v].head)));
    let graph = Graph::new(next, &edges).expect("gadget edges are in range and loop-free");
    Ok(GadgetGraph { graph, thresholds: ThresholdMap::new(thresholds)?, gadgets })
}

/// One representative of every isomorphism class of connected graphs on
/// `n` vertices (`n <= 7`).
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=7).contains(&n), "enumeration supports 1..=7 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for bits in 0u64..(1 << pairs.len()) {
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &e)| e).collect();
        let g = Graph::new(n, &edges).unwrap();
        if !g.is_connected() {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut adj = vec![0u8; n];
                for &(u, v) in &edges {
                    adj[p[u]] |= 1 << p[v];
                    adj[p[v]] |= 1 << p[u];
                }
                adj
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(g);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every threshold map with `1 <= t(v) <= max(1, d(v))`.
pub fn all_threshold_maps(g: &Graph) -> Vec<ThresholdMap> {
    let caps: Vec<u32> = g.vertices().map(|v| g.degree(v).max(1) as u32).collect();
    let mut out = Vec::new();
    let mut cur = vec![1u32; g.n()];
    loop {
        out.push(ThresholdMap::new(cur.clone()).unwrap());
        let mut i = 0;
        while i < cur.len() && cur[i] == caps[i] {
            cur[i] = 1;
            i += 1;
        }
        if i == cur.len() {
            return out;
        }
        cur[i] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{is_target_set, is_target_vector};
    use crate::thresholds::costs_equal_thresholds;

    fn t(values: &[u32]) -> ThresholdMap {
        ThresholdMap::new(values.to_vec()).unwrap()
    }

    #[test]
    fn wtss_two_hub_clique_of_five() {
        let g = Graph::complete(5);
        let th = t(&[1, 1, 1, 4, 4]);
        let c = costs_equal_thresholds(&th);
        let (cost, s) = brute_force_wtss(&g, &th, &c).unwrap();
        assert_eq!(cost, 4);
        assert!(s == TargetSet::new(vec![3]) || s == TargetSet::new(vec![4]));
    }

    #[test]
    fn wtss_small_cases() {
        let single = Graph::new(1, &[]).unwrap();
        assert_eq!(brute_force_wtss(&single, &t(&[1]), &CostMap::new(vec![9])).unwrap().0, 9);
        let p3 = Graph::path(3);
        let th = t(&[1, 2, 1]);
        let (cost, s) = brute_force_wtss(&p3, &th, &costs_equal_thresholds(&th)).unwrap();
        assert_eq!(cost, 2);
        assert!(is_target_set(&p3, &th, &s));
    }

    #[test]
    fn tpi_small_cases() {
        assert_eq!(brute_force_tpi(&Graph::complete(5), &t(&[1, 1, 1, 4, 4])).unwrap().0, 2);
        assert_eq!(brute_force_tpi(&Graph::new(1, &[]).unwrap(), &t(&[3])).unwrap().0, 3);
        assert_eq!(brute_force_tpi(&Graph::path(3), &t(&[1, 2, 1])).unwrap().0, 2);
    }

    #[test]
    fn tss_small_cases() {
        let k3 = Graph::complete(3);
        assert_eq!(brute_force_tss(&k3, &t(&[1, 1, 1])).unwrap().0, 1);
        assert_eq!(brute_force_tss(&k3, &t(&[2, 2, 2])).unwrap().0, 2);
        let (k, s) = brute_force_tss(&Graph::path(3), &t(&[1, 2, 1])).unwrap();
        assert_eq!(k, 1);
        assert_eq!(s.members(), &[1]);
    }

    #[test]
    fn size_limits_are_errors() {
        let g = Graph::path(21);
        let th = ThresholdMap::uniform(21, 1);
        assert!(matches!(brute_force_tpi(&g, &th), Err(OracleError::TooLarge { limit: 20, got: 21 })));
        assert!(matches!(brute_force_tss(&g, &th), Err(OracleError::TooLarge { .. })));
        let c = CostMap::uniform(21, 1);
        assert!(matches!(brute_force_wtss(&g, &th, &c), Err(OracleError::TooLarge { .. })));
        let big = Graph::path(65);
        assert!(enumerate_tpi(&big, &ThresholdMap::uniform(65, 1), 1).is_err());
    }

    #[test]
    fn tree_formula_cases() {
        let single = Graph::new(1, &[]).unwrap();
        assert_eq!(tree_optimal_cost(&single, &t(&[5])).unwrap(), 5);
        assert_eq!(tree_optimal_cost(&Graph::path(2), &t(&[1, 1])).unwrap(), 1);
        let star = Graph::star(3);
        let th = t(&[3, 1, 1, 1]);
        assert_eq!(tree_optimal_cost(&star, &th).unwrap(), 3);
        assert_eq!(brute_force_tpi(&star, &th).unwrap().0, 3);
        assert!(matches!(tree_optimal_cost(&Graph::complete(3), &t(&[1, 1, 1])), Err(OracleError::NotATree)));
    }

    #[test]
    fn gadget_sizes() {
        let g = build_gadget(&Graph::path(2), &t(&[1, 1])).unwrap();
        assert_eq!(g.graph.n(), 6);
        assert!(g.gadgets.iter().all(|x| x.vertices().count() == 3));
        let g = build_gadget(&Graph::complete(3), &t(&[1, 1, 1])).unwrap();
        assert_eq!(g.graph.n(), 12);
        let g = build_gadget(&Graph::complete(4), &t(&[2, 2, 2, 2])).unwrap();
        assert_eq!(g.graph.n(), 20);
        assert!(g.gadgets.iter().all(|x| g.thresholds.get(x.head) == 2));
        assert_eq!(g.thresholds.sum(), 4 * 2 + 16);
    }

    #[test]
    fn gadget_structure() {
        let base = Graph::new(4, &[(0, 1), (1, 2), (1, 3), (2, 3)]).unwrap();
        let th = t(&[1, 2, 2, 1]);
        let gg = build_gadget(&base, &th).unwrap();
        let n_expected: usize = base.vertices().map(|v| base.degree(v) + 2).sum();
        assert_eq!(gg.graph.n(), n_expected);
        for (v, gadget) in gg.gadgets.iter().enumerate() {
            assert_eq!(gg.graph.degree(gadget.tail), base.degree(v));
            for mid in gadget.middles.clone() {
                assert_eq!(gg.graph.neighbors(mid), &[gadget.head, gadget.tail]);
                assert_eq!(gg.thresholds.get(mid), 1);
            }
            assert_eq!(gg.thresholds.get(gadget.tail), 1);
            assert_eq!(gg.graph.degree(gadget.head), 2 * base.degree(v));
        }
        for u in base.vertices() {
            for w in base.vertices() {
                assert_eq!(gg.graph.has_edge(gg.gadgets[u].head, gg.gadgets[w].head), base.has_edge(u, w));
            }
        }
    }

    #[test]
    fn gadget_rejects_out_of_range_thresholds() {
        let err = build_gadget(&Graph::path(2), &t(&[2, 1])).unwrap_err();
        assert!(matches!(err, OracleError::ThresholdOutOfRange { vertex: 0, threshold: 2, degree: 1 }));
    }

    #[test]
    fn gadget_lift_and_project() {
        let base = Graph::path(3);
        let th = t(&[1, 2, 1]);
        let gg = build_gadget(&base, &th).unwrap();
        let seeds = TargetSet::new(vec![1]);
        let lifted = gg.lift_target_set(&seeds);
        assert_eq!(lifted.cost(), 1);
        assert!(is_target_vector(&gg.graph, &gg.thresholds, &lifted));
        assert_eq!(gg.project_vector(&lifted), seeds);
    }

    #[test]
    fn routes_agree_on_small_graphs() {
        for n in 1..=4 {
            for g in connected_graphs(n) {
                for th in all_threshold_maps(&g) {
                    let (dp, s) = brute_force_tpi(&g, &th).unwrap();
                    assert!(is_target_vector(&g, &th, &s));
                    assert_eq!(s.cost(), dp);
                    let (en, s2) = enumerate_tpi(&g, &th, u64::MAX).unwrap().unwrap();
                    assert!(is_target_vector(&g, &th, &s2));
                    assert_eq!(dp, en, "{g:?} {th:?}");
                }
            }
        }
    }

    #[test]
    fn enumerate_respects_budget() {
        let g = Graph::complete(5);
        let th = t(&[1, 1, 1, 4, 4]);
        assert_eq!(enumerate_tpi(&g, &th, 1).unwrap(), None);
        assert_eq!(enumerate_tpi(&g, &th, 2).unwrap().unwrap().0, 2);
    }

    #[test]
    fn connected_graph_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21]);
    }

    #[test]
    fn threshold_map_enumeration() {
        let maps = all_threshold_maps(&Graph::star(3));
        assert_eq!(maps.len(), 3);
        assert!(maps.iter().all(|m| m.get(1) == 1));
    }
}
