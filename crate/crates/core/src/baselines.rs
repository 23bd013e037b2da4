//! Degree-based competitor heuristics and the minimal-budget search.
//!
//! The four heuristics are budgeted: given a spend cap `beta` they return a
//! target set (integral variants) or an incentive vector (fractional
//! variants) without any guarantee of full activation. [`min_budget`] turns
//! each of them into a full-activation minimizer by searching for the
//! smallest `beta` at which its output activates the whole graph.

use std::cmp::Reverse;

use thiserror::Error;

use crate::diffusion::{diffuse_incentives, diffuse_set, DiffusionTrace, IncentiveVector, TargetSet};
use crate::graph::{Graph, Vertex};
use crate::heap::IndexedMaxHeap;
use crate::thresholds::{CostMap, ThresholdMap, ValueError};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("degree-proportional allocation needs at least one edge")]
    NoEdges,
    #[error("{heuristic} cannot activate the whole graph at any budget")]
    Infeasible { heuristic: Baseline },
    #[error(transparent)]
    Value(#[from] ValueError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Baseline {
    DegreeInt,
    DiscountInt,
    DegreeFrac,
    DiscountFrac,
}

impl Baseline {
    pub const ALL: [Baseline; 4] =
        [Baseline::DegreeInt, Baseline::DiscountInt, Baseline::DegreeFrac, Baseline::DiscountFrac];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::DegreeInt => "DegreeInt",
            Baseline::DiscountInt => "DiscountInt",
            Baseline::DegreeFrac => "DegreeFrac",
            Baseline::DiscountFrac => "DiscountFrac",
        }
    }

    pub fn is_fractional(self) -> bool {
        matches!(self, Baseline::DegreeFrac | Baseline::DiscountFrac)
    }
}

impl std::fmt::Display for Baseline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Output of a heuristic: a set for the integral variants, a vector for the
/// fractional ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Seeding {
    Set(TargetSet),
    Vector(IncentiveVector),
}

impl Seeding {
    pub fn diffuse(&self, g: &Graph, t: &ThresholdMap) -> DiffusionTrace {
        match self {
            Seeding::Set(s) => diffuse_set(g, t, s),
            Seeding::Vector(s) => diffuse_incentives(g, t, s),
        }
    }

    /// Purchase cost for a set, total incentive for a vector.
    pub fn cost(&self, c: &CostMap) -> u64 {
        match self {
            Seeding::Set(s) => s.cost(c),
            Seeding::Vector(s) => s.cost(),
        }
    }
}

fn by_degree(g: &Graph) -> Vec<Vertex> {
    let mut order: Vec<Vertex> = g.vertices().collect();
    order.sort_by_key(|&v| (Reverse(g.degree(v)), v));
    order
}

/// Takes vertices by descending degree while their cost fits in the budget;
/// a vertex that does not fit is skipped.
pub fn degree_int(g: &Graph, c: &CostMap, beta: u64) -> TargetSet {
    let mut remaining = beta;
    let mut chosen = Vec::new();
    for v in by_degree(g) {
        let cost = c.get(v) as u64;
        if cost <= remaining {
            remaining -= cost;
            chosen.push(v);
        }
    }
    TargetSet::new(chosen)
}

/// Like [`degree_int`], but every selection lowers its neighbors' working
/// degree by one.
pub fn discount_int(g: &Graph, c: &CostMap, beta: u64) -> TargetSet {
    let mut remaining = beta;
    let mut chosen = Vec::new();
    let mut heap = IndexedMaxHeap::from_keys(g.vertices().map(|v| g.degree(v) as i64).collect());
    let mut working: Vec<i64> = g.vertices().map(|v| g.degree(v) as i64).collect();
    while let Some((v, _)) = heap.pop() {
        let cost = c.get(v) as u64;
        if cost > remaining {
            continue;
        }
        remaining -= cost;
        chosen.push(v);
        for &u in g.neighbors(v) {
            if heap.contains(u) {
                working[u] -= 1;
                heap.update(u, working[u]);
            }
        }
    }
    TargetSet::new(chosen)
}

/// `s(v) = floor(d(v) beta / 2m)`; the leftover goes one unit at a time to
/// vertices in descending degree order.
pub fn degree_frac(g: &Graph, beta: u64) -> Result<IncentiveVector, BaselineError> {
    let twice_m = 2 * g.m() as u128;
    if twice_m == 0 {
        return Err(BaselineError::NoEdges);
    }
    let mut s: Vec<u32> = g
        .vertices()
        .map(|v| {
            let share = g.degree(v) as u128 * beta as u128 / twice_m;
            u32::try_from(share).unwrap_or(u32::MAX)
        })
        .collect();
    let spent: u64 = s.iter().map(|&x| x as u64).sum();
    let mut leftover = beta.saturating_sub(spent);
    // the floors lose less than one unit per positive-degree vertex, so one
    // pass over the order normally suffices
    let order = by_degree(g);
    'outer: while leftover > 0 {
        for &v in &order {
            if leftover == 0 {
                break 'outer;
            }
            s[v] += 1;
            leftover -= 1;
        }
    }
    Ok(IncentiveVector::new(s))
}

/// Repeatedly takes the unselected vertex of highest working degree and gives
/// it `max(0, t(v) - #selected neighbors)`, the least amount that activates it
/// once its selected neighbors are active; neighbors' working degrees then
/// drop by one. If the budget cannot cover the next vertex, the remainder is
/// given to it and the allocation stops.
pub fn discount_frac(g: &Graph, t: &ThresholdMap, beta: u64) -> IncentiveVector {
    let n = g.n();
    let mut s = vec![0u32; n];
    let mut remaining = beta;
    let mut selected_neighbors = vec![0u32; n];
    let mut working: Vec<i64> = g.vertices().map(|v| g.degree(v) as i64).collect();
    let mut heap = IndexedMaxHeap::from_keys(working.clone());
    while let Some((v, _)) = heap.pop() {
        let need = t.get(v).saturating_sub(selected_neighbors[v]) as u64;
        if need > remaining {
            s[v] = remaining as u32;
            break;
        }
        s[v] = need as u32;
        remaining -= need;
        for &u in g.neighbors(v) {
            selected_neighbors[u] += 1;
            if heap.contains(u) {
                working[u] -= 1;
                heap.update(u, working[u]);
            }
        }
    }
    IncentiveVector::new(s)
}

/// Runs one heuristic at a fixed budget.
pub fn run_baseline(
    heuristic: Baseline,
    g: &Graph,
    t: &ThresholdMap,
    c: &CostMap,
    beta: u64,
) -> Result<Seeding, BaselineError> {
    t.check_size(g)?;
    c.check_size(g)?;
    Ok(match heuristic {
        Baseline::DegreeInt => Seeding::Set(degree_int(g, c, beta)),
        Baseline::DiscountInt => Seeding::Set(discount_int(g, c, beta)),
        Baseline::DegreeFrac => Seeding::Vector(degree_frac(g, beta)?),
        Baseline::DiscountFrac => Seeding::Vector(discount_frac(g, t, beta)),
    })
}

/// Smallest budget found for a heuristic, with its solution.
#[derive(Debug, Clone)]
pub struct MinBudget {
    pub beta: u64,
    pub solution: Seeding,
    /// Number of budgets evaluated.
    pub probes: usize,
}

/// A budget at which the heuristic is known to succeed, or `None` if no
/// budget can work.
fn feasible_ceiling(heuristic: Baseline, g: &Graph, t: &ThresholdMap, c: &CostMap) -> Option<u64> {
    match heuristic {
        // every vertex fits
        Baseline::DegreeInt | Baseline::DiscountInt => Some(c.sum()),
        // every vertex gets its full requirement in selection order
        Baseline::DiscountFrac => Some(t.sum()),
        // floors reach t(v) once beta >= 2m * ceil(t(v) / d(v)); isolated
        // vertices never receive anything
        Baseline::DegreeFrac => {
            let mut ratio = 0u64;
            for v in g.vertices() {
                let d = g.degree(v) as u64;
                if d == 0 {
                    return None;
                }
                ratio = ratio.max((t.get(v) as u64).div_ceil(d));
            }
            Some(t.sum().max(2 * g.m() as u64 * ratio))
        }
    }
}

/// Smallest budget at which `heuristic` activates the whole graph.
///
/// Binary search over `[0, ceiling]` followed by a downward scan that keeps
/// lowering the budget while activation stays complete, since the heuristics
/// are not guaranteed to be monotone in the budget. `c` is ignored by the
/// fractional heuristics.
pub fn min_budget(heuristic: Baseline, g: &Graph, t: &ThresholdMap, c: &CostMap) -> Result<MinBudget, BaselineError> {
    t.check_size(g)?;
    c.check_size(g)?;
    let mut probes = 0;
    let mut attempt = |beta: u64| -> Result<Option<Seeding>, BaselineError> {
        probes += 1;
        let sol = run_baseline(heuristic, g, t, c, beta)?;
        Ok(sol.diffuse(g, t).is_complete().then_some(sol))
    };

    let infeasible = BaselineError::Infeasible { heuristic };
    let ceiling = feasible_ceiling(heuristic, g, t, c).ok_or(BaselineError::Infeasible { heuristic })?;
    let mut best = attempt(ceiling)?.ok_or(infeasible)?;
    let (mut lo, mut hi) = (0u64, ceiling);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match attempt(mid)? {
            Some(sol) => {
                hi = mid;
                best = sol;
            }
            None => lo = mid + 1,
        }
    }
    let mut beta = hi;
    while beta > 0 {
        match attempt(beta - 1)? {
            Some(sol) => {
                beta -= 1;
                best = sol;
            }
            None => break,
        }
    }
    Ok(MinBudget { beta, solution: best, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thresholds::costs_equal_thresholds;

    fn k7() -> (Graph, ThresholdMap, CostMap) {
        let t = ThresholdMap::new(vec![1, 1, 1, 1, 1, 6, 6]).unwrap();
        let c = costs_equal_thresholds(&t);
        (Graph::complete(7), t, c)
    }

    /// Vertex 0 (degree 5) is adjacent to vertex 5 (degree 4); vertex 9
    /// (degree 4) is elsewhere.
    fn two_stars() -> Graph {
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (5, 6), (5, 7), (5, 8)];
        edges.extend([(9, 10), (9, 11), (9, 12), (9, 13)]);
        Graph::new(14, &edges).unwrap()
    }

    #[test]
    fn zero_budget_selects_nothing() {
        let (g, t, c) = k7();
        assert!(degree_int(&g, &c, 0).is_empty());
        assert!(discount_int(&g, &c, 0).is_empty());
        assert_eq!(degree_frac(&g, 0).unwrap().cost(), 0);
        assert_eq!(discount_frac(&g, &t, 0).cost(), 0);
    }

    #[test]
    fn degree_int_skips_unaffordable() {
        let (g, _, c) = k7();
        assert_eq!(degree_int(&g, &c, 6).members(), &[0, 1, 2, 3, 4]);
        let star = Graph::star(3);
        assert_eq!(degree_int(&star, &CostMap::uniform(4, 1), 1).members(), &[0]);
    }

    #[test]
    fn discount_steers_to_other_center() {
        let g = two_stars();
        let c = CostMap::uniform(g.n(), 1);
        assert_eq!(degree_int(&g, &c, 2).members(), &[0, 5]);
        assert_eq!(discount_int(&g, &c, 2).members(), &[0, 9]);
    }

    #[test]
    fn discount_int_single_vertex() {
        let g = Graph::new(1, &[]).unwrap();
        let c = CostMap::uniform(1, 3);
        assert!(discount_int(&g, &c, 2).is_empty());
        assert_eq!(discount_int(&g, &c, 3).members(), &[0]);
    }

    #[test]
    fn degree_frac_exact_division() {
        let g = two_stars();
        let beta = 2 * g.m() as u64;
        let s = degree_frac(&g, beta).unwrap();
        assert!(g.vertices().all(|v| s.get(v) as usize == g.degree(v)));
    }

    #[test]
    fn degree_frac_remainder_goes_by_degree() {
        let (g, _, _) = k7();
        let s = degree_frac(&g, 1).unwrap();
        assert_eq!(s.as_slice(), &[1, 0, 0, 0, 0, 0, 0]);
        let s = degree_frac(&g, 45).unwrap();
        // floors are 6 * 45 / 42 = 6 each, 3 units left over
        assert_eq!(s.as_slice(), &[7, 7, 7, 6, 6, 6, 6]);
        assert_eq!(s.cost(), 45);
    }

    #[test]
    fn degree_frac_needs_edges() {
        let g = Graph::new(2, &[]).unwrap();
        assert!(matches!(degree_frac(&g, 3), Err(BaselineError::NoEdges)));
    }

    #[test]
    fn discount_frac_full_budget_validates() {
        let (g, t, _) = k7();
        let s = discount_frac(&g, &t, t.sum());
        assert!(crate::is_target_vector(&g, &t, &s));
        assert!(s.cost() <= t.sum());
    }

    #[test]
    fn discount_frac_partial_budget() {
        let (g, t, _) = k7();
        // first pick is vertex 0 (all degrees tie) with requirement 1; the
        // second pick needs 0 because vertex 0 is a selected neighbor
        let s = discount_frac(&g, &t, 2);
        assert_eq!(s.get(0), 1);
        assert_eq!(s.cost(), 2);
        // vertex 5 needs 6 - 5 = 1 after five selections
        assert_eq!(s.get(5), 1);
        let s = discount_frac(&g, &t, 1);
        assert_eq!(s.as_slice(), &[1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn min_budget_is_feasible_and_minimal_among_scanned() {
        let (g, t, c) = k7();
        for h in Baseline::ALL {
            let res = min_budget(h, &g, &t, &c).unwrap();
            assert!(res.solution.diffuse(&g, &t).is_complete(), "{h}");
            assert!(res.solution.cost(&c) <= res.beta, "{h}");
            // optimal incentive cost on this clique is 2
            assert!(res.beta >= 2, "{h}: {}", res.beta);
            if res.beta > 0 {
                let below = run_baseline(h, &g, &t, &c, res.beta - 1).unwrap();
                assert!(!below.diffuse(&g, &t).is_complete(), "{h}");
            }
        }
        assert!(min_budget(Baseline::DiscountFrac, &g, &t, &c).unwrap().beta <= t.sum());
    }

    #[test]
    fn degree_frac_with_isolated_vertex_is_infeasible() {
        let g = Graph::new(3, &[(0, 1)]).unwrap();
        let t = ThresholdMap::uniform(3, 1);
        let c = CostMap::uniform(3, 1);
        assert!(matches!(
            min_budget(Baseline::DegreeFrac, &g, &t, &c),
            Err(BaselineError::Infeasible { heuristic: Baseline::DegreeFrac })
        ));
        assert!(min_budget(Baseline::DiscountFrac, &g, &t, &c).is_ok());
    }
}
