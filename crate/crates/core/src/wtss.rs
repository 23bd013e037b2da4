//! Weighted target set selection by iterative peeling.
//!
//! Every iteration removes one vertex from the surviving subgraph `U`:
//!
//! 1. a vertex whose residual threshold reached zero is removed for free
//!    (it will be activated by already-processed vertices) and each surviving
//!    neighbor's residual threshold drops by one, floored at zero;
//! 2. otherwise, a vertex with fewer surviving neighbors than its residual
//!    threshold is bought into the target set, and its surviving neighbors'
//!    residual thresholds drop by one;
//! 3. otherwise, the vertex maximizing `c(u) k(u) / (delta(u) (delta(u) + 1))`
//!    is removed, deferring its activation to its surviving neighbors.
//!
//! Ties are resolved towards the smallest vertex id in every case. The result
//! always activates the whole graph and costs at most
//! `sum c(v) t(v) / (d(v) + 1)`; on complete graphs whose costs are ordered
//! like the thresholds it is optimal. The ratio is compared exactly by
//! 128-bit cross-multiplication. Runs in `O(m log n)`.

use std::collections::BTreeSet;

use crate::diffusion::TargetSet;
use crate::graph::{Graph, Vertex};
use crate::heap::{IndexedMaxHeap, Ratio};
use crate::thresholds::{CostMap, ThresholdMap, ValueError};

/// Which rule removed a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WtssCase {
    /// Residual threshold zero: activated by earlier choices.
    Activated,
    /// Too few surviving neighbors: bought into the target set.
    Selected,
    /// Ratio argmax: left for its surviving neighbors to activate.
    Deferred,
}

impl WtssCase {
    pub fn number(self) -> u8 {
        match self {
            WtssCase::Activated => 1,
            WtssCase::Selected => 2,
            WtssCase::Deferred => 3,
        }
    }
}

/// One removal of the peeling loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WtssStep {
    pub vertex: Vertex,
    pub case: WtssCase,
}

pub fn wtss(g: &Graph, t: &ThresholdMap, c: &CostMap) -> Result<TargetSet, ValueError> {
    wtss_trace(g, t, c).map(|(s, _)| s)
}

/// Like [`wtss`], also returning the removal log (one entry per vertex).
pub fn wtss_trace(g: &Graph, t: &ThresholdMap, c: &CostMap) -> Result<(TargetSet, Vec<WtssStep>), ValueError> {
    t.check_size(g)?;
    c.check_size(g)?;
    let mut peel = Peel::new(g, t, c);
    let mut log = Vec::with_capacity(g.n());
    for _ in 0..g.n() {
        log.push(peel.step());
    }
    debug_assert!(peel.heap.is_empty());
    Ok((TargetSet::new(peel.selected), log))
}

struct Peel<'a> {
    g: &'a Graph,
    c: &'a CostMap,
    alive: Vec<bool>,
    delta: Vec<usize>,
    k: Vec<u32>,
    zero_k: BTreeSet<Vertex>,
    short: BTreeSet<Vertex>,
    heap: IndexedMaxHeap<Ratio>,
    selected: Vec<Vertex>,
}

impl<'a> Peel<'a> {
    fn new(g: &'a Graph, t: &ThresholdMap, c: &'a CostMap) -> Self {
        let n = g.n();
        let delta: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
        let k = t.as_slice().to_vec();
        let keys = (0..n).map(|v| key(c.get(v), k[v], delta[v])).collect();
        let short = (0..n).filter(|&v| delta[v] < k[v] as usize).collect();
        Peel {
            g,
            c,
            alive: vec![true; n],
            delta,
            k,
            zero_k: BTreeSet::new(),
            short,
            heap: IndexedMaxHeap::from_keys(keys),
            selected: Vec::new(),
        }
    }

    fn step(&mut self) -> WtssStep {
        let (vertex, case) = if let Some(&v) = self.zero_k.first() {
            (v, WtssCase::Activated)
        } else if let Some(&v) = self.short.first() {
            (v, WtssCase::Selected)
        } else {
            let (v, _) = self.heap.peek().expect("surviving vertices remain");
            (v, WtssCase::Deferred)
        };
        if case == WtssCase::Selected {
            self.selected.push(vertex);
        }
        self.remove(vertex, case);
        WtssStep { vertex, case }
    }

    fn remove(&mut self, v: Vertex, case: WtssCase) {
        self.alive[v] = false;
        self.heap.remove(v);
        self.zero_k.remove(&v);
        self.short.remove(&v);
        let g = self.g;
        for &u in g.neighbors(v) {
            if !self.alive[u] {
                continue;
            }
            match case {
                WtssCase::Activated => self.k[u] = self.k[u].saturating_sub(1),
                WtssCase::Selected => {
                    // rule 1 has priority, so no surviving vertex has k = 0 here
                    debug_assert!(self.k[u] > 0);
                    self.k[u] -= 1;
                }
                WtssCase::Deferred => {}
            }
            self.delta[u] -= 1;
            self.refresh(u);
        }
    }

    fn refresh(&mut self, u: Vertex) {
        let (k, d) = (self.k[u], self.delta[u]);
        if k == 0 {
            self.zero_k.insert(u);
            self.short.remove(&u);
        } else if d < k as usize {
            self.short.insert(u);
        }
        self.heap.update(u, key(self.c.get(u), k, d));
    }
}

fn key(c: u32, k: u32, delta: usize) -> Ratio {
    let d = delta as u64;
    Ratio::new(c as u64 * k as u64, d * (d + 1))
}

/// `sum c(v) t(v) / (d(v) + 1)`, the guaranteed cost ceiling.
pub fn cost_bound(g: &Graph, t: &ThresholdMap, c: &CostMap) -> f64 {
    g.vertices().map(|v| c.get(v) as f64 * t.get(v) as f64 / (g.degree(v) + 1) as f64).sum()
}
