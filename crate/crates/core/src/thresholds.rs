//! Per-vertex thresholds and costs, and the three generator regimes used in
//! experiments (random, constant, proportional).
//!
//! Random draws use ChaCha8 seeded from a `u64`, so a given seed produces
//! the same map on every platform.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Error)]
pub enum ValueError {
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("vertex {0} has threshold 0; thresholds must be at least 1")]
    ZeroThreshold(Vertex),
    #[error("line {line}: malformed entry {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: vertex {label} is not in the graph")]
    UnknownVertex { line: usize, label: u64 },
    #[error("line {line}: duplicate entry for vertex {label}")]
    Duplicate { line: usize, label: u64 },
    #[error("no value given for vertex {0}")]
    Missing(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Influence thresholds `t(v) >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThresholdMap(Vec<u32>);

impl ThresholdMap {
    pub fn new(values: Vec<u32>) -> Result<Self, ValueError> {
        if let Some(v) = values.iter().position(|&t| t == 0) {
            return Err(ValueError::ZeroThreshold(v));
        }
        Ok(ThresholdMap(values))
    }

    /// Same threshold on `n` vertices.
    pub fn uniform(n: usize, t: u32) -> Self {
        Self::new(vec![t; n]).expect("uniform threshold must be positive")
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

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&t| t as u64).sum()
    }

    /// Whether `t(v) <= max(1, d(v))` for every vertex.
    pub fn within_degree(&self, g: &Graph) -> bool {
        g.vertices().all(|v| self.0[v] as usize <= g.degree(v).max(1))
    }

    pub fn check_size(&self, g: &Graph) -> Result<(), ValueError> {
        check_len(g.n(), self.0.len())
    }
}

/// Purchase costs `c(v) >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CostMap(Vec<u32>);

impl CostMap {
    pub fn new(values: Vec<u32>) -> Self {
        CostMap(values)
    }

    pub fn uniform(n: usize, c: u32) -> Self {
        CostMap(vec![c; n])
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

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// True when `t(u) <= t(v)` implies `c(u) <= c(v)` for all pairs.
    pub fn ordered_by(&self, t: &ThresholdMap) -> bool {
        let mut pairs: Vec<(u32, u32)> = t.0.iter().copied().zip(self.0.iter().copied()).collect();
        pairs.sort_unstable();
        // after sorting by (t, c), the condition fails iff some c exceeds a
        // later c whose t is greater or equal
        let mut suffix_min = u32::MAX;
        let mut i = pairs.len();
        while i > 0 {
            // group of equal thresholds [j, i)
            let t_here = pairs[i - 1].0;
            let mut j = i;
            while j > 0 && pairs[j - 1].0 == t_here {
                j -= 1;
            }
            let group_max = pairs[i - 1].1;
            let group_min = pairs[j].1;
            // equal thresholds need equal costs
            if group_min != group_max || group_max > suffix_min {
                return false;
            }
            suffix_min = suffix_min.min(group_min);
            i = j;
        }
        true
    }

    pub fn check_size(&self, g: &Graph) -> Result<(), ValueError> {
        check_len(g.n(), self.0.len())
    }
}

fn check_len(expected: usize, got: usize) -> Result<(), ValueError> {
    if expected == got {
        Ok(())
    } else {
        Err(ValueError::Length { expected, got })
    }
}

/// `t(v)` uniform on `{1, ..., d(v)}`; vertices of degree at most one get 1.
pub fn random_thresholds(g: &Graph, seed: u64) -> ThresholdMap {
    random_thresholds_with(g, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_thresholds_with<R: Rng>(g: &Graph, rng: &mut R) -> ThresholdMap {
    let t = g
        .vertices()
        .map(|v| {
            let d = g.degree(v) as u32;
            if d <= 1 {
                1
            } else {
                rng.gen_range(1..=d)
            }
        })
        .collect();
    ThresholdMap(t)
}

/// `t(v) = min(t, d(v))`, floored at 1.
pub fn constant_thresholds(g: &Graph, t: u32) -> ThresholdMap {
    assert!(t >= 1, "constant threshold must be positive");
    ThresholdMap(g.vertices().map(|v| t.min(g.degree(v) as u32).max(1)).collect())
}

/// `t(v) = max(1, round_half_up(alpha * d(v)))`.
pub fn proportional_thresholds(g: &Graph, alpha: f64) -> ThresholdMap {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    ThresholdMap(g.vertices().map(|v| proportional(g.degree(v), alpha)).collect())
}

fn proportional(d: usize, alpha: f64) -> u32 {
    // the epsilon absorbs representation error in decimal alphas such as 0.7
    let scaled = alpha * d as f64 + 0.5 + 1e-9;
    (scaled.floor() as u32).max(1)
}

pub fn costs_equal_thresholds(t: &ThresholdMap) -> CostMap {
    CostMap(t.0.clone())
}

fn parse_value_file<R: BufRead>(reader: R, g: &Graph) -> Result<Vec<u32>, ValueError> {
    let index = g.label_index();
    let mut values: Vec<Option<u32>> = vec![None; g.n()];
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let malformed = || ValueError::Malformed { line: lineno, text: body.to_string() };
        let mut tokens = body.split_ascii_whitespace();
        let label: u64 = tokens.next().and_then(|s| s.parse().ok()).ok_or_else(malformed)?;
        let value: u32 = tokens.next().and_then(|s| s.parse().ok()).ok_or_else(malformed)?;
        if tokens.next().is_some() {
            return Err(malformed());
        }
        let v = *index.get(&label).ok_or(ValueError::UnknownVertex { line: lineno, label })?;
        if values[v].replace(value).is_some() {
            return Err(ValueError::Duplicate { line: lineno, label });
        }
    }
    values.into_iter().enumerate().map(|(v, x)| x.ok_or(ValueError::Missing(g.label(v)))).collect()
}

/// Reads `label value` lines; every vertex must appear exactly once.
pub fn load_thresholds<R: BufRead>(reader: R, g: &Graph) -> Result<ThresholdMap, ValueError> {
    let values = parse_value_file(reader, g)?;
    if let Some(v) = values.iter().position(|&t| t == 0) {
        return Err(ValueError::ZeroThreshold(v));
    }
    Ok(ThresholdMap(values))
}

pub fn load_costs<R: BufRead>(reader: R, g: &Graph) -> Result<CostMap, ValueError> {
    parse_value_file(reader, g).map(CostMap)
}

/// Emits `label value` lines in vertex order.
pub fn write_values<W: Write>(g: &Graph, values: &[u32], mut out: W) -> std::io::Result<()> {
    for v in g.vertices() {
        writeln!(out, "{} {}", g.label(v), values[v])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    #[test]
    fn random_star_center_is_uniform() {
        // chi-square with 3 dof; 16.27 is the 0.001 critical value
        let g = Graph::star(4);
        let mut counts = [0u32; 4];
        let draws = 10_000;
        for seed in 0..draws {
            let t = random_thresholds(&g, seed);
            counts[(t.get(0) - 1) as usize] += 1;
            assert!((1..=4).contains(&t.get(0)));
            assert!((1..=4).all(|leaf| t.get(leaf) == 1));
        }
        let expected = draws as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 16.27, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn random_is_deterministic() {
        let g = Graph::complete(9);
        assert_eq!(random_thresholds(&g, 42), random_thresholds(&g, 42));
        assert!(random_thresholds(&g, 42).within_degree(&g));
    }

    #[test]
    fn constant_caps_by_degree() {
        let k7 = Graph::complete(7);
        assert!(constant_thresholds(&k7, 6).as_slice().iter().all(|&t| t == 6));
        let p = Graph::path(4);
        assert_eq!(constant_thresholds(&p, 5).as_slice(), &[1, 2, 2, 1]);
        let iso = Graph::new(2, &[]).unwrap();
        assert_eq!(constant_thresholds(&iso, 3).as_slice(), &[1, 1]);
    }

    #[test]
    fn proportional_rounds_half_up() {
        assert_eq!(proportional(10, 0.5), 5);
        assert_eq!(proportional(1, 0.1), 1);
        assert_eq!(proportional(7, 0.5), 4);
        assert_eq!(proportional(5, 0.7), 4);
        assert_eq!(proportional(5, 0.1), 1);
        assert_eq!(proportional(0, 0.9), 1);
        assert_eq!(proportional(20, 0.9), 18);
    }

    #[test]
    fn costs_copy_thresholds() {
        let t = ThresholdMap::new(vec![1, 4, 2]).unwrap();
        assert_eq!(costs_equal_thresholds(&t).as_slice(), t.as_slice());
        assert!(costs_equal_thresholds(&t).ordered_by(&t));
    }

    #[test]
    fn ordered_costs() {
        let t = ThresholdMap::new(vec![1, 2, 2, 3]).unwrap();
        assert!(CostMap::new(vec![1, 5, 5, 9]).ordered_by(&t));
        assert!(!CostMap::new(vec![1, 5, 4, 9]).ordered_by(&t));
        assert!(!CostMap::new(vec![6, 5, 5, 9]).ordered_by(&t));
        assert!(CostMap::new(vec![0, 0, 0, 0]).ordered_by(&t));
    }

    #[test]
    fn zero_threshold_rejected() {
        assert!(matches!(ThresholdMap::new(vec![1, 0]), Err(ValueError::ZeroThreshold(1))));
    }

    #[test]
    fn value_file_errors() {
        let g = load_edge_list("10 20\n20 30\n".as_bytes()).unwrap();
        let missing = load_thresholds("10 1\n20 2\n".as_bytes(), &g).unwrap_err();
        assert!(matches!(missing, ValueError::Missing(30)));
        let dup = load_thresholds("10 1\n20 2\n20 1\n30 1\n".as_bytes(), &g).unwrap_err();
        assert!(matches!(dup, ValueError::Duplicate { line: 3, label: 20 }));
        let zero = load_thresholds("10 1\n20 0\n30 1\n".as_bytes(), &g).unwrap_err();
        assert!(matches!(zero, ValueError::ZeroThreshold(1)));
        let unknown = load_costs("11 1\n".as_bytes(), &g).unwrap_err();
        assert!(matches!(unknown, ValueError::UnknownVertex { line: 1, label: 11 }));
        // costs may be zero
        assert!(load_costs("10 0\n20 0\n30 0\n".as_bytes(), &g).is_ok());
    }

    #[test]
    fn value_file_round_trips() {
        let g = load_edge_list("10 20\n20 30\n".as_bytes()).unwrap();
        let t = ThresholdMap::new(vec![1, 2, 1]).unwrap();
        let mut buf = Vec::new();
        write_values(&g, t.as_slice(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "10 1\n20 2\n30 1\n");
        assert_eq!(load_thresholds(buf.as_slice(), &g).unwrap(), t);
    }
}
