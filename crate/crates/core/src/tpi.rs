//! Targeting with partial incentives by iterative peeling.
//!
//! Each iteration either
//!
//! 1. picks a surviving vertex with more residual threshold than surviving
//!    neighbors and raises its incentive by the difference, clamping the
//!    residual threshold to its residual degree (the vertex is removed once
//!    both reach zero), or
//! 2. removes the surviving vertex maximizing
//!    `k(u) (k(u) + 1) / (delta(u) (delta(u) + 1))`, leaving the residual
//!    thresholds of its neighbors unchanged.
//!
//! A vertex may receive several increments before it is removed. When the
//! input satisfies `t(v) <= max(1, d(v))` every increment is exactly one
//! unit, so the total cost equals the number of increments. The output is a
//! target vector of cost at most `sum t(v) (t(v) + 1) / (2 (d(v) + 1))`, and
//! it is optimal on trees and complete graphs.

use std::collections::BTreeSet;

use crate::diffusion::IncentiveVector;
use crate::graph::{Graph, Vertex};
use crate::heap::{IndexedMaxHeap, Ratio};
use crate::thresholds::{ThresholdMap, ValueError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TpiCase {
    /// Incentive raised by `k - delta`.
    Incentive,
    /// Ratio argmax removed.
    Pruned,
}

impl TpiCase {
    pub fn number(self) -> u8 {
        match self {
            TpiCase::Incentive => 1,
            TpiCase::Pruned => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TpiStep {
    pub vertex: Vertex,
    pub case: TpiCase,
    /// Incentive added in this iteration.
    pub sigma: u32,
}

pub fn tpi(g: &Graph, t: &ThresholdMap) -> Result<IncentiveVector, ValueError> {
    tpi_trace(g, t).map(|(s, _)| s)
}

pub fn tpi_trace(g: &Graph, t: &ThresholdMap) -> Result<(IncentiveVector, Vec<TpiStep>), ValueError> {
    t.check_size(g)?;
    let n = g.n();
    let unit_steps = t.within_degree(g);
    let mut delta: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
    let mut k = t.as_slice().to_vec();
    let mut s = vec![0u32; n];
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut over: BTreeSet<Vertex> = (0..n).filter(|&v| k[v] as usize > delta[v]).collect();
    let mut heap = IndexedMaxHeap::from_keys((0..n).map(|v| key(k[v], delta[v])).collect());
    let mut log = Vec::with_capacity(2 * n);

    while remaining > 0 {
        if let Some(v) = over.pop_first() {
            let sigma = k[v] - delta[v] as u32;
            debug_assert!(!unit_steps || sigma == 1, "increment {sigma} at vertex {v}");
            s[v] += sigma;
            k[v] = delta[v] as u32;
            if k[v] == 0 {
                alive[v] = false;
                heap.remove(v);
                remaining -= 1;
            } else {
                heap.update(v, key(k[v], delta[v]));
            }
            log.push(TpiStep { vertex: v, case: TpiCase::Incentive, sigma });
        } else {
            let (v, _) = heap.pop().expect("surviving vertices remain");
            // with no rule-1 candidate, every survivor has 1 <= k <= delta
            debug_assert!(k[v] >= 1 && (k[v] as usize) <= delta[v]);
            alive[v] = false;
            remaining -= 1;
            for &u in g.neighbors(v) {
                if !alive[u] {
                    continue;
                }
                delta[u] -= 1;
                if k[u] as usize > delta[u] {
                    over.insert(u);
                }
                heap.update(u, key(k[u], delta[u]));
            }
            log.push(TpiStep { vertex: v, case: TpiCase::Pruned, sigma: 0 });
        }
    }
    Ok((IncentiveVector::new(s), log))
}

fn key(k: u32, delta: usize) -> Ratio {
    let (k, d) = (k as u64, delta as u64);
    Ratio::new(k * (k + 1), d * (d + 1))
}

/// `sum t(v) (t(v) + 1) / (2 (d(v) + 1))`, the guaranteed cost ceiling.
pub fn cost_bound(g: &Graph, t: &ThresholdMap) -> f64 {
    g.vertices()
        .map(|v| {
            let tv = t.get(v) as f64;
            tv * (tv + 1.0) / (2.0 * (g.degree(v) + 1) as f64)
        })
        .sum()
}
