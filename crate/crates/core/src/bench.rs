//! Experiment harness: synthetic graphs, threshold regimes, seeded trials
//! and CSV output.
//!
//! A run evaluates every algorithm on every `(parameter, trial)` cell. All
//! algorithms in a cell see the same threshold draw. Each solution is
//! replayed through the diffusion before its cost is recorded.

use std::fmt;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::baselines::{min_budget, Baseline, BaselineError, Seeding};
use crate::graph::{load_edge_list, Graph, GraphError};
use crate::thresholds::{
    constant_thresholds, costs_equal_thresholds, load_costs, proportional_thresholds, random_thresholds_with, CostMap,
    ThresholdMap, ValueError,
};
use crate::{tpi, wtss};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid graph spec `{0}`")]
    GraphSpec(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("no algorithms selected")]
    NoAlgorithms,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("{path}: {source}")]
    Graph { path: PathBuf, source: GraphError },
    #[error("{path}: {source}")]
    Values { path: PathBuf, source: ValueError },
    #[error("{algorithm} output fails to activate the graph ({active} of {n} active, {parameter}, trial {trial})")]
    Verification { algorithm: Algorithm, parameter: String, trial: usize, active: usize, n: usize },
    #[error("{algorithm} costs {cost} but {competitor} costs {other} on an instance {algorithm} solves optimally ({parameter}, trial {trial})")]
    NotOptimal { algorithm: Algorithm, competitor: Algorithm, cost: u64, other: u64, parameter: String, trial: usize },
    #[error("malformed record on line {line}: {message}")]
    Record { line: usize, message: String },
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Synthetic graph families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    Clique(usize),
    Path(usize),
    /// Center 0 plus the given number of leaves.
    Star(usize),
    /// Uniformly random labeled tree.
    Tree(usize),
    Gnp(usize, f64),
}

impl FromStr for GraphKind {
    type Err = BenchError;

    /// `clique:7`, `path:3`, `star:4`, `tree:10`, `gnp:2000:0.005`.
    fn from_str(s: &str) -> Result<Self, BenchError> {
        let bad = || BenchError::GraphSpec(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let size = |i: usize| parts.get(i).and_then(|p| p.parse::<usize>().ok()).ok_or_else(bad);
        let kind = match (parts[0], parts.len()) {
            ("clique", 2) => GraphKind::Clique(size(1)?),
            ("path", 2) => GraphKind::Path(size(1)?),
            ("star", 2) => GraphKind::Star(size(1)?),
            ("tree", 2) => GraphKind::Tree(size(1)?),
            ("gnp", 3) => {
                let p: f64 = parts[2].parse().map_err(|_| bad())?;
                GraphKind::Gnp(size(1)?, p)
            }
            _ => return Err(bad()),
        };
        match kind {
            GraphKind::Gnp(_, p) if !(0.0..=1.0).contains(&p) => Err(bad()),
            GraphKind::Clique(0) | GraphKind::Path(0) | GraphKind::Tree(0) | GraphKind::Gnp(0, _) => Err(bad()),
            _ => Ok(kind),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Clique(n) => write!(f, "clique:{n}"),
            GraphKind::Path(n) => write!(f, "path:{n}"),
            GraphKind::Star(n) => write!(f, "star:{n}"),
            GraphKind::Tree(n) => write!(f, "tree:{n}"),
            GraphKind::Gnp(n, p) => write!(f, "gnp:{n}:{p}"),
        }
    }
}

/// Builds a synthetic graph; `seed` only matters for the random families.
pub fn synth_graph(kind: GraphKind, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GraphKind::Clique(n) => Graph::complete(n),
        GraphKind::Path(n) => Graph::path(n),
        GraphKind::Star(leaves) => Graph::star(leaves),
        GraphKind::Tree(n) => random_tree(n, &mut rng),
        GraphKind::Gnp(n, p) => gnp(n, p, &mut rng),
    }
}

/// Decodes a uniformly random Pruefer sequence.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    if n <= 2 {
        return Graph::path(n);
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &code {
        degree[v] += 1;
    }
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(std::cmp::Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &code {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("a leaf always exists");
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(std::cmp::Reverse(v));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    Graph::new(n, &edges).expect("tree edges are valid")
}

/// Erdos-Renyi `G(n, p)`, skipping over absent pairs with geometric jumps
/// so the cost is proportional to the number of edges drawn.
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    if p <= 0.0 || n < 2 {
        return Graph::new(n, &[]).unwrap();
    }
    if p >= 1.0 {
        return Graph::complete(n);
    }
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = 1.0 - rng.gen::<f64>();
        w += 1 + (r.ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((v, w as usize));
        }
    }
    Graph::new(n, &edges).unwrap()
}

/// The six compared algorithms, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Tpi,
    DiscountFrac,
    DegreeFrac,
    Wtss,
    DiscountInt,
    DegreeInt,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Tpi,
        Algorithm::DiscountFrac,
        Algorithm::DegreeFrac,
        Algorithm::Wtss,
        Algorithm::DiscountInt,
        Algorithm::DegreeInt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Tpi => "tpi",
            Algorithm::Wtss => "wtss",
            Algorithm::DiscountFrac => "discount-frac",
            Algorithm::DegreeFrac => "degree-frac",
            Algorithm::DiscountInt => "discount-int",
            Algorithm::DegreeInt => "degree-int",
        }
    }

    pub fn is_fractional(self) -> bool {
        matches!(self, Algorithm::Tpi | Algorithm::DiscountFrac | Algorithm::DegreeFrac)
    }

    /// TPI for fractional algorithms, WTSS for integral ones.
    pub fn reference(self) -> Algorithm {
        if self.is_fractional() {
            Algorithm::Tpi
        } else {
            Algorithm::Wtss
        }
    }

    pub fn baseline(self) -> Option<Baseline> {
        match self {
            Algorithm::Tpi | Algorithm::Wtss => None,
            Algorithm::DiscountFrac => Some(Baseline::DiscountFrac),
            Algorithm::DegreeFrac => Some(Baseline::DegreeFrac),
            Algorithm::DiscountInt => Some(Baseline::DiscountInt),
            Algorithm::DegreeInt => Some(Baseline::DegreeInt),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected one of tpi, wtss, degree-int, discount-int, degree-frac, discount-frac)"))
    }
}

/// Verified result of one algorithm on one instance.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub algorithm: Algorithm,
    /// Solution cost; for the heuristics, the smallest sufficient budget.
    /// `None` when the heuristic cannot activate the graph at any budget.
    pub cost: Option<u64>,
    pub solution: Option<Seeding>,
    /// Rounds until the diffusion from the solution stabilizes.
    pub rounds: Option<usize>,
    /// Time spent in the algorithm, excluding verification.
    pub elapsed: Duration,
}

/// Runs one algorithm and replays its output. Returns the number of active
/// vertices as the error payload when the replay does not reach everyone.
pub fn solve(
    algorithm: Algorithm,
    g: &Graph,
    t: &ThresholdMap,
    c: &CostMap,
) -> Result<Result<Outcome, usize>, BenchError> {
    let start = Instant::now();
    let (cost, solution) = match algorithm {
        Algorithm::Tpi => {
            let s = tpi(g, t)?;
            (s.cost(), Seeding::Vector(s))
        }
        Algorithm::Wtss => {
            let s = wtss(g, t, c)?;
            (s.cost(c), Seeding::Set(s))
        }
        other => match min_budget(other.baseline().unwrap(), g, t, c) {
            Ok(found) => (found.beta, found.solution),
            Err(BaselineError::Infeasible { .. }) => {
                let elapsed = start.elapsed();
                return Ok(Ok(Outcome { algorithm, cost: None, solution: None, rounds: None, elapsed }));
            }
            Err(e) => return Err(e.into()),
        },
    };
    let elapsed = start.elapsed();
    let trace = solution.diffuse(g, t);
    if !trace.is_complete() {
        return Ok(Err(trace.active_count()));
    }
    Ok(Ok(Outcome {
        algorithm,
        cost: Some(cost),
        rounds: Some(trace.converged_round()),
        solution: Some(solution),
        elapsed,
    }))
}

/// Threshold regime with its parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Regime {
    /// One fresh uniform draw per seed and trial.
    Random {
        seeds: Vec<u64>,
    },
    Constant {
        values: Vec<u32>,
    },
    Proportional {
        alphas: Vec<f64>,
    },
}

impl Regime {
    pub fn constant_grid() -> Regime {
        Regime::Constant { values: (2..=10).collect() }
    }

    pub fn proportional_grid() -> Regime {
        Regime::Proportional { alphas: (1..=9).map(|i| i as f64 / 10.0).collect() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Random { .. } => "random",
            Regime::Constant { .. } => "constant",
            Regime::Proportional { .. } => "proportional",
        }
    }

    fn len(&self) -> usize {
        match self {
            Regime::Random { seeds } => seeds.len(),
            Regime::Constant { values } => values.len(),
            Regime::Proportional { alphas } => alphas.len(),
        }
    }

    /// Parameter label, seed (random regime only) and thresholds of one cell.
    fn draw(&self, g: &Graph, index: usize, trial: usize) -> (String, Option<u64>, ThresholdMap) {
        match self {
            Regime::Random { seeds } => {
                let seed = seeds[index];
                (seed.to_string(), Some(seed), trial_thresholds(g, seed, trial))
            }
            Regime::Constant { values } => (values[index].to_string(), None, constant_thresholds(g, values[index])),
            Regime::Proportional { alphas } => {
                (alphas[index].to_string(), None, proportional_thresholds(g, alphas[index]))
            }
        }
    }
}

/// Random thresholds for `(seed, trial)`; trial 0 equals
/// [`random_thresholds`](crate::thresholds::random_thresholds)`(g, seed)`.
pub fn trial_thresholds(g: &Graph, seed: u64, trial: usize) -> ThresholdMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    random_thresholds_with(g, &mut rng)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Synthetic { kind: GraphKind, seed: u64 },
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph, BenchError> {
        match self {
            GraphSource::File(path) => {
                let file = std::fs::File::open(path)
                    .map_err(|e| BenchError::Graph { path: path.clone(), source: GraphError::Io(e) })?;
                load_edge_list(BufReader::new(file)).map_err(|source| BenchError::Graph { path: path.clone(), source })
            }
            GraphSource::Synthetic { kind, seed } => Ok(synth_graph(*kind, *seed)),
        }
    }

    fn default_name(&self) -> String {
        match self {
            GraphSource::File(path) => {
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "graph".into())
            }
            GraphSource::Synthetic { kind, .. } => kind.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostRule {
    /// `c = t`.
    Thresholds,
    /// Value file keyed by original vertex labels.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    /// Label written to the `network` column.
    pub network: String,
    pub regime: Regime,
    pub costs: CostRule,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    pub output: Option<PathBuf>,
    /// Record wall times; when off, the time column is zero and output is
    /// reproducible byte for byte.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(graph: GraphSource, regime: Regime) -> Self {
        ExperimentConfig {
            network: graph.default_name(),
            graph,
            regime,
            costs: CostRule::Thresholds,
            algorithms: Algorithm::ALL.to_vec(),
            trials: 1,
            output: None,
            timing: true,
        }
    }

    /// Parses flat `key = value` text. Keys: `graph` (a path, or
    /// `synth:<kind>`), `graph_seed`, `network`, `regime`
    /// (`random|constant|proportional`), `seeds`/`params` (comma lists),
    /// `costs` (`t` or `file:<path>`), `algorithms`, `trials`, `output`,
    /// `timing`. Lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut map = std::collections::BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| BenchError::Config {
                line: i + 1,
                message: format!("expected key=value, got `{line}`"),
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(BenchError::Config { line: i + 1, message: format!("unknown key `{key}`") });
            }
            map.insert(key.to_string(), (i + 1, value.trim().to_string()));
        }
        let get = |k: &str| map.get(k).map(|(l, v)| (*l, v.as_str()));
        let err = |line: usize, message: String| BenchError::Config { line, message };

        let (line, graph) = get("graph").ok_or_else(|| err(0, "missing key `graph`".into()))?;
        let graph_seed = match get("graph_seed") {
            Some((l, v)) => v.parse().map_err(|_| err(l, format!("bad graph_seed `{v}`")))?,
            None => 0,
        };
        let graph = match graph.strip_prefix("synth:") {
            Some(kind) => GraphSource::Synthetic {
                kind: kind.parse().map_err(|e: BenchError| err(line, e.to_string()))?,
                seed: graph_seed,
            },
            None => GraphSource::File(PathBuf::from(graph)),
        };

        let regime_name = get("regime").map_or("random", |(_, v)| v);
        let grid = get("params").or(get("seeds"));
        let regime = match regime_name {
            "random" => {
                let (l, seeds) = get("seeds").ok_or_else(|| err(0, "random regime requires `seeds`".into()))?;
                Regime::Random { seeds: parse_list(seeds).map_err(|m| err(l, m))? }
            }
            "constant" => match grid {
                Some((l, v)) => Regime::Constant { values: parse_list(v).map_err(|m| err(l, m))? },
                None => Regime::constant_grid(),
            },
            "proportional" => match grid {
                Some((l, v)) => Regime::Proportional { alphas: parse_list(v).map_err(|m| err(l, m))? },
                None => Regime::proportional_grid(),
            },
            other => return Err(err(get("regime").unwrap().0, format!("unknown regime `{other}`"))),
        };

        let mut config = ExperimentConfig::new(graph, regime);
        if let Some((_, v)) = get("network") {
            config.network = v.to_string();
        }
        if let Some((l, v)) = get("costs") {
            config.costs = parse_cost_rule(v).map_err(|m| err(l, m))?;
        }
        if let Some((l, v)) = get("algorithms") {
            config.algorithms =
                if v == "all" { Algorithm::ALL.to_vec() } else { parse_list(v).map_err(|m| err(l, m))? };
        }
        if let Some((l, v)) = get("trials") {
            config.trials = v.parse().map_err(|_| err(l, format!("bad trials `{v}`")))?;
        }
        if let Some((_, v)) = get("output") {
            config.output = Some(PathBuf::from(v));
        }
        if let Some((l, v)) = get("timing") {
            config.timing = v.parse().map_err(|_| err(l, format!("bad timing `{v}`")))?;
        }
        config.check()?;
        Ok(config)
    }

    pub fn check(&self) -> Result<(), BenchError> {
        if self.algorithms.is_empty() {
            return Err(BenchError::NoAlgorithms);
        }
        if self.trials == 0 {
            return Err(BenchError::NoTrials);
        }
        Ok(())
    }
}

const KEYS: [&str; 11] = [
    "graph",
    "graph_seed",
    "network",
    "regime",
    "seeds",
    "params",
    "costs",
    "algorithms",
    "trials",
    "output",
    "timing",
];

/// Comma-separated list of values.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("bad list item `{s}`")))
        .collect()
}

/// `t` or `file:<path>`.
pub fn parse_cost_rule(text: &str) -> Result<CostRule, String> {
    match text {
        "t" => Ok(CostRule::Thresholds),
        _ => text
            .strip_prefix("file:")
            .map(|p| CostRule::File(PathBuf::from(p)))
            .ok_or_else(|| format!("bad cost rule `{text}` (expected `t` or `file:<path>`)")),
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub network: String,
    pub algorithm: Algorithm,
    pub regime: String,
    pub parameter: String,
    pub seed: Option<u64>,
    pub trial: usize,
    pub cost: Option<u64>,
    pub rounds: Option<usize>,
    pub time_ms: f64,
    /// `(cost / reference - 1) * 100`; absent when either cost is missing
    /// or the reference cost is zero.
    pub overhead: Option<f64>,
}

/// Runs every `(parameter, trial)` cell of the configuration in parallel.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, BenchError> {
    config.check()?;
    let g = config.graph.load()?;
    let costs = match &config.costs {
        CostRule::Thresholds => None,
        CostRule::File(path) => {
            let file = std::fs::File::open(path)
                .map_err(|e| BenchError::Values { path: path.clone(), source: ValueError::Io(e) })?;
            Some(
                load_costs(BufReader::new(file), &g)
                    .map_err(|source| BenchError::Values { path: path.clone(), source })?,
            )
        }
    };
    let mut algorithms = config.algorithms.clone();
    algorithms.sort();
    algorithms.dedup();

    let cells: Vec<(usize, usize)> =
        (0..config.regime.len()).flat_map(|i| (0..config.trials).map(move |trial| (i, trial))).collect();
    let rows: Vec<Vec<ExperimentRecord>> = cells
        .par_iter()
        .map(|&(index, trial)| run_cell(config, &g, costs.as_ref(), &algorithms, index, trial))
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn run_cell(
    config: &ExperimentConfig,
    g: &Graph,
    costs: Option<&CostMap>,
    algorithms: &[Algorithm],
    index: usize,
    trial: usize,
) -> Result<Vec<ExperimentRecord>, BenchError> {
    let (parameter, seed, t) = config.regime.draw(g, index, trial);
    let c = costs.cloned().unwrap_or_else(|| costs_equal_thresholds(&t));
    let mut outcomes = Vec::with_capacity(algorithms.len());
    for &algorithm in algorithms {
        match solve(algorithm, g, &t, &c)? {
            Ok(outcome) => outcomes.push(outcome),
            Err(active) => {
                return Err(BenchError::Verification { algorithm, parameter, trial, active, n: g.n() });
            }
        }
    }
    check_optimality(g, &t, &c, &outcomes, &parameter, trial)?;

    let cost_of = |a: Algorithm| outcomes.iter().find(|o| o.algorithm == a).and_then(|o| o.cost);
    Ok(outcomes
        .iter()
        .map(|o| {
            let overhead = match (o.cost, cost_of(o.algorithm.reference())) {
                (Some(cost), Some(reference)) if reference > 0 => Some((cost as f64 / reference as f64 - 1.0) * 100.0),
                _ => None,
            };
            ExperimentRecord {
                network: config.network.clone(),
                algorithm: o.algorithm,
                regime: config.regime.name().to_string(),
                parameter: parameter.clone(),
                seed,
                trial,
                cost: o.cost,
                rounds: o.rounds,
                time_ms: if config.timing { o.elapsed.as_secs_f64() * 1e3 } else { 0.0 },
                overhead,
            }
        })
        .collect())
}

/// TPI is optimal on trees, WTSS on cliques whose costs follow the
/// thresholds; each must not lose to a competitor of its own kind there.
fn check_optimality(
    g: &Graph,
    t: &ThresholdMap,
    c: &CostMap,
    outcomes: &[Outcome],
    parameter: &str,
    trial: usize,
) -> Result<(), BenchError> {
    let mut proven = Vec::new();
    if g.is_tree() && t.within_degree(g) {
        proven.push(Algorithm::Tpi);
    }
    if g.is_complete() && c.ordered_by(t) {
        proven.push(Algorithm::Wtss);
    }
    for algorithm in proven {
        let Some(cost) = outcomes.iter().find(|o| o.algorithm == algorithm).and_then(|o| o.cost) else {
            continue;
        };
        for other in outcomes
            .iter()
            .filter(|o| o.algorithm != algorithm && o.algorithm.is_fractional() == algorithm.is_fractional())
        {
            if let Some(other_cost) = other.cost {
                if other_cost < cost {
                    return Err(BenchError::NotOptimal {
                        algorithm,
                        competitor: other.algorithm,
                        cost,
                        other: other_cost,
                        parameter: parameter.to_string(),
                        trial,
                    });
                }
            }
        }
    }
    Ok(())
}

const HEADER: [&str; 10] =
    ["network", "algorithm", "regime", "parameter", "seed", "trial", "cost", "rounds", "time_ms", "overhead_pct"];

struct Counting<W> {
    inner: W,
    written: usize,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.written += n;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes a header and one row per record; returns the byte count.
pub fn emit_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<usize, BenchError> {
    let mut w = csv::Writer::from_writer(Counting { inner: out, written: 0 });
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            r.network.clone(),
            r.algorithm.to_string(),
            r.regime.clone(),
            r.parameter.clone(),
            opt(r.seed),
            r.trial.to_string(),
            opt(r.cost),
            opt(r.rounds),
            format!("{:.3}", r.time_ms),
            opt(r.overhead.map(|o| format!("{o:.2}"))),
        ])?;
    }
    w.flush()?;
    let counting = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
    Ok(counting.written)
}

/// Parses the output of [`emit_csv`].
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<ExperimentRecord>, BenchError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |field: &str| BenchError::Record { line, message: format!("bad {field}") };
        let field = |j: usize| row.get(j).unwrap_or("");
        fn maybe<T: FromStr>(s: &str) -> Result<Option<T>, ()> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| ())
            }
        }
        records.push(ExperimentRecord {
            network: field(0).to_string(),
            algorithm: field(1).parse().map_err(|_| bad("algorithm"))?,
            regime: field(2).to_string(),
            parameter: field(3).to_string(),
            seed: maybe(field(4)).map_err(|_| bad("seed"))?,
            trial: field(5).parse().map_err(|_| bad("trial"))?,
            cost: maybe(field(6)).map_err(|_| bad("cost"))?,
            rounds: maybe(field(7)).map_err(|_| bad("rounds"))?,
            time_ms: field(8).parse().map_err(|_| bad("time_ms"))?,
            overhead: maybe(field(9)).map_err(|_| bad("overhead_pct"))?,
        });
    }
    Ok(records)
}

/// Mean cost over trials for one `(network, algorithm, regime, parameter)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub network: String,
    pub algorithm: Algorithm,
    pub regime: String,
    pub parameter: String,
    pub trials: usize,
    /// Trials with a finite cost.
    pub solved: usize,
    pub mean_cost: Option<f64>,
    pub mean_overhead: Option<f64>,
}

/// Averages records over trials, keeping first-appearance order.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<Summary> {
    let mut out: Vec<(Summary, f64, f64, usize)> = Vec::new();
    for r in records {
        let pos = out.iter().position(|(s, ..)| {
            s.network == r.network && s.algorithm == r.algorithm && s.regime == r.regime && s.parameter == r.parameter
        });
        let i = pos.unwrap_or_else(|| {
            out.push((
                Summary {
                    network: r.network.clone(),
                    algorithm: r.algorithm,
                    regime: r.regime.clone(),
                    parameter: r.parameter.clone(),
                    trials: 0,
                    solved: 0,
                    mean_cost: None,
                    mean_overhead: None,
                },
                0.0,
                0.0,
                0,
            ));
            out.len() - 1
        });
        let (s, cost_sum, over_sum, over_n) = &mut out[i];
        s.trials += 1;
        if let Some(c) = r.cost {
            s.solved += 1;
            *cost_sum += c as f64;
        }
        if let Some(o) = r.overhead {
            *over_n += 1;
            *over_sum += o;
        }
    }
    out.into_iter()
        .map(|(mut s, cost_sum, over_sum, over_n)| {
            s.mean_cost = (s.solved > 0).then(|| cost_sum / s.solved as f64);
            s.mean_overhead = (over_n > 0).then(|| over_sum / over_n as f64);
            s
        })
        .collect()
}

pub fn emit_summary_csv<W: Write>(summaries: &[Summary], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "network",
        "algorithm",
        "regime",
        "parameter",
        "trials",
        "solved",
        "mean_cost",
        "mean_overhead_pct",
    ])?;
    for s in summaries {
        w.write_record([
            s.network.clone(),
            s.algorithm.to_string(),
            s.regime.clone(),
            s.parameter.clone(),
            s.trials.to_string(),
            s.solved.to_string(),
            opt(s.mean_cost.map(|c| format!("{c:.3}"))),
            opt(s.mean_overhead.map(|o| format!("{o:.2}"))),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Path of the summary written next to a per-trial CSV.
pub fn summary_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}_summary.csv"))
}
