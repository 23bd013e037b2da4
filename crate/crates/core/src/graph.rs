//! Immutable undirected simple graphs and SNAP-style edge-list ingestion.
//!
//! Vertices are dense ids `0..n`. Every graph carries a label table mapping
//! each dense id back to the identifier it had in the source file, so that
//! solutions can be reported in the caller's id space.

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

/// Dense vertex id.
pub type Vertex = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("line {line}: cannot parse {token:?} as a vertex id")]
    Parse { line: usize, token: String },
    #[error("line {line}: expected two vertex ids")]
    MissingEndpoint { line: usize },
    #[error("edge list contains no edges")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Undirected simple graph in compressed adjacency form.
///
/// Neighbor lists are sorted and free of duplicates and self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
    labels: Vec<u64>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Repeated edges (in either orientation)
    /// collapse into one.
    pub fn new(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
        }
        Ok(Self::from_checked_edges(n, edges.iter().copied(), (0..n as u64).collect()))
    }

    fn from_checked_edges(n: usize, edges: impl Iterator<Item = (Vertex, Vertex)> + Clone, labels: Vec<u64>) -> Self {
        let mut degree = vec![0usize; n];
        for (u, v) in edges.clone() {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0; offsets[n]];
        for (u, v) in edges {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }

        // sort and dedup each row, then compact
        let mut compact = Vec::with_capacity(targets.len());
        let mut new_offsets = Vec::with_capacity(n + 1);
        new_offsets.push(0);
        for v in 0..n {
            let row = &mut targets[offsets[v]..offsets[v + 1]];
            row.sort_unstable();
            let start = compact.len();
            for &w in row.iter() {
                if compact.len() == start || *compact.last().unwrap() != w {
                    compact.push(w);
                }
            }
            new_offsets.push(compact.len());
        }
        compact.shrink_to_fit();
        Graph { offsets: new_offsets, targets: compact, labels }
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::new(n, &edges).expect("complete graph edges are valid")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::new(n, &edges).expect("path edges are valid")
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::new(leaves + 1, &edges).expect("star edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of undirected edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.n()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Original identifier of a dense vertex id.
    pub fn label(&self, v: Vertex) -> u64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Reverse of [`Graph::label`].
    pub fn label_index(&self) -> HashMap<u64, Vertex> {
        self.labels.iter().enumerate().map(|(v, &l)| (l, v)).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub fn is_tree(&self) -> bool {
        self.n() > 0 && self.m() + 1 == self.n() && self.is_connected()
    }

    /// Whether every pair of distinct vertices is adjacent.
    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.vertices().all(|v| self.degree(v) + 1 == n)
    }

    /// Writes the graph as an edge list in label space, one `u v` line per edge.
    pub fn write_edge_list<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.labels[u], self.labels[v])?;
        }
        Ok(())
    }
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` and blank lines are skipped. Tokens beyond the
/// first two on a line are ignored. Vertex identifiers are remapped to dense
/// ids in first-appearance order; self-loops are dropped (the endpoint still
/// becomes a vertex).
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
    let mut index: HashMap<u64, Vertex> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |label: u64| -> Vertex {
        *index.entry(label).or_insert_with(|| {
            labels.push(label);
            labels.len() - 1
        })
    };

    let mut saw_edge_line = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut tokens = body.split_ascii_whitespace();
        let mut endpoint = || -> Result<u64, GraphError> {
            let tok = tokens.next().ok_or(GraphError::MissingEndpoint { line: lineno })?;
            tok.parse::<u64>().map_err(|_| GraphError::Parse { line: lineno, token: tok.to_string() })
        };
        let (a, b) = (endpoint()?, endpoint()?);
        saw_edge_line = true;
        let (u, v) = (intern(a), intern(b));
        if u != v {
            edges.push((u, v));
        }
    }
    if !saw_edge_line {
        return Err(GraphError::Empty);
    }
    let n = labels.len();
    Ok(Graph::from_checked_edges(n, edges.iter().copied(), labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn complete_seven() {
        let g = Graph::complete(7);
        assert_eq!(g.m(), 21);
        assert!(g.vertices().all(|v| g.degree(v) == 6));
        assert!(g.is_complete());
    }

    #[test]
    fn duplicates_collapse() {
        let g = Graph::new(3, &[(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.degree(2), 0);
        assert!(g.neighbors(2).is_empty());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(Graph::new(2, &[(0, 2)]), Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })));
        assert!(matches!(Graph::new(2, &[(1, 1)]), Err(GraphError::SelfLoop(1))));
    }

    #[test]
    fn path_degrees() {
        let g = Graph::path(3);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.degree(0), 1);
        assert!(g.is_tree());
    }

    #[test]
    fn loads_commented_path() {
        let g = load_edge_list("# c\n0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.degree(1), 2);
    }

    #[test]
    fn remaps_and_merges_orientations() {
        let g = load_edge_list("5 9\n9 5\n".as_bytes()).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(g.labels(), &[5, 9]);
    }

    #[test]
    fn accepts_tabs_and_crlf() {
        let g = load_edge_list("1\t2\r\n2   3\r\n\r\n".as_bytes()).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
    }

    #[test]
    fn parse_error_reports_line() {
        let err = load_edge_list("0 1\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }), "{err}");
        let err = load_edge_list("0 1\n7\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::MissingEndpoint { line: 2 }));
    }

    #[test]
    fn empty_input_is_error() {
        assert!(matches!(load_edge_list("# nothing\n\n".as_bytes()), Err(GraphError::Empty)));
    }

    #[test]
    fn write_then_reload_is_identity() {
        let g = load_edge_list("0 1\n0 2\n2 3\n1 3\n".as_bytes()).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let h = load_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g, h);
    }
}
