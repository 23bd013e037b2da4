use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use incentive::baselines::{min_budget, run_baseline, Seeding};
use incentive::bench::{
    emit_csv, emit_summary_csv, parse_cost_rule, run_experiment, solve, summarize, summary_path, Algorithm, CostRule,
    ExperimentConfig, GraphSource, Regime,
};
use incentive::oracle::{brute_force_tpi, brute_force_tss, brute_force_wtss, build_gadget};
use incentive::thresholds::{
    constant_thresholds, costs_equal_thresholds, load_costs, load_thresholds, proportional_thresholds,
    random_thresholds, write_values,
};
use incentive::tpi::tpi_trace;
use incentive::wtss::wtss_trace;
use incentive::{
    diffuse_incentives, diffuse_set, CostMap, DiffusionTrace, Graph, IncentiveVector, TargetSet, ThresholdMap,
};

#[derive(Parser)]
#[command(name = "incentive", version, about = "Target sets and partial incentives for threshold diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm and print its solution.
    Run(RunArgs),
    /// Run all six algorithms on one instance.
    Compare(CompareArgs),
    /// Sweep a threshold regime and write per-trial and summary CSVs.
    Sweep(SweepArgs),
    /// Check that a solution file activates the whole graph.
    Validate(ValidateArgs),
    /// Solve a small instance exactly.
    Oracle(OracleArgs),
    /// Write the gadget graph and its thresholds.
    Gadget(GadgetArgs),
}

#[derive(Args)]
struct Instance {
    /// Edge-list file, or `synth:<kind>` such as `synth:gnp:100:0.05`.
    #[arg(long)]
    graph: String,
    /// Seed for synthetic random graphs.
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
    /// `random[:<seed>]`, `const:<t>`, `prop:<alpha>` or `file:<path>`.
    #[arg(long)]
    thresholds: String,
    /// Seed for `--thresholds random`.
    #[arg(long)]
    seed: Option<u64>,
    /// `t` (costs equal thresholds) or `file:<path>`.
    #[arg(long, default_value = "t")]
    costs: String,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long)]
    algo: Algorithm,
    /// Fixed budget for a heuristic instead of searching for the smallest.
    #[arg(long)]
    beta: Option<u64>,
    /// Write the iteration log of tpi or wtss as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Leave the time column at zero.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    graph_seed: Option<u64>,
    #[arg(long)]
    network: Option<String>,
    #[arg(long)]
    regime: Option<RegimeArg>,
    /// Comma-separated seeds for the random regime.
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated grid for the constant or proportional regime.
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    costs: Option<String>,
    /// Comma-separated algorithm names, or `all`.
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Per-trial CSV; the summary goes next to it as `<stem>_summary.csv`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Random,
    Constant,
    Proportional,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    instance: Instance,
    /// `label` lines (target set) or `label value` lines (incentives).
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Tss,
    Wtss,
    Tpi,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long)]
    problem: Problem,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GadgetArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long)]
    output_graph: PathBuf,
    #[arg(long)]
    output_thresholds: PathBuf,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Compare(args) => compare(args),
        Command::Sweep(args) => sweep(args),
        Command::Validate(args) => validate(args),
        Command::Oracle(args) => oracle(args),
        Command::Gadget(args) => gadget(args),
    }
    .map(|pass| if pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn graph_source(spec: &str, seed: u64) -> Result<GraphSource> {
    Ok(match spec.strip_prefix("synth:") {
        Some(kind) => GraphSource::Synthetic { kind: kind.parse()?, seed },
        None => GraphSource::File(PathBuf::from(spec)),
    })
}

impl Instance {
    fn load(&self) -> Result<(Graph, ThresholdMap, CostMap)> {
        let g = graph_source(&self.graph, self.graph_seed)?.load()?;
        let t = self.thresholds(&g)?;
        let c = match parse_cost_rule(&self.costs).map_err(|e| anyhow!(e))? {
            CostRule::Thresholds => costs_equal_thresholds(&t),
            CostRule::File(path) => load_costs(open(&path)?, &g).with_context(|| path.display().to_string())?,
        };
        Ok((g, t, c))
    }

    fn thresholds(&self, g: &Graph) -> Result<ThresholdMap> {
        let spec = self.thresholds.as_str();
        let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
        Ok(match kind {
            "random" => {
                let seed = match (arg, self.seed) {
                    ("", Some(seed)) => seed,
                    ("", None) => bail!("random thresholds need a seed (`random:<seed>` or --seed)"),
                    (s, _) => s.parse().with_context(|| format!("bad seed in `{spec}`"))?,
                };
                random_thresholds(g, seed)
            }
            "const" => {
                let t: u32 = arg.parse().with_context(|| format!("bad constant in `{spec}`"))?;
                if t == 0 {
                    bail!("constant threshold must be positive");
                }
                constant_thresholds(g, t)
            }
            "prop" => {
                let alpha: f64 = arg.parse().with_context(|| format!("bad fraction in `{spec}`"))?;
                if !(alpha > 0.0 && alpha < 1.0) {
                    bail!("proportional fraction must lie strictly between 0 and 1");
                }
                proportional_thresholds(g, alpha)
            }
            "file" => load_thresholds(open(Path::new(arg))?, g).with_context(|| arg.to_string())?,
            _ => bail!("bad threshold spec `{spec}`"),
        })
    }
}

fn write_set(g: &Graph, s: &TargetSet, out: &mut dyn Write) -> io::Result<()> {
    for &v in s.members() {
        writeln!(out, "{}", g.label(v))?;
    }
    Ok(())
}

fn write_vector(g: &Graph, s: &IncentiveVector, out: &mut dyn Write) -> io::Result<()> {
    for (v, x) in s.support() {
        writeln!(out, "{} {}", g.label(v), x)?;
    }
    Ok(())
}

fn write_seeding(g: &Graph, s: &Seeding, out: &mut dyn Write) -> io::Result<()> {
    match s {
        Seeding::Set(set) => write_set(g, set, out),
        Seeding::Vector(vec) => write_vector(g, vec, out),
    }
}

fn write_summary(out: &mut dyn Write, name: &str, cost: u64, trace: &DiffusionTrace, n: usize) -> io::Result<()> {
    writeln!(out, "# algorithm {name}")?;
    writeln!(out, "# cost {cost}")?;
    writeln!(out, "# activated {}/{n}", trace.active_count())?;
    writeln!(out, "# rounds {}", trace.converged_round())
}

fn run(args: RunArgs) -> Result<bool> {
    let (g, t, c) = args.instance.load()?;
    let mut out = sink(args.output.as_deref())?;
    let seeding = match args.algo {
        Algorithm::Tpi | Algorithm::Wtss => {
            if args.beta.is_some() {
                bail!("--beta applies only to the baseline heuristics");
            }
            let mut trace_out = args.trace.as_deref().map(|p| sink(Some(p))).transpose()?;
            if args.algo == Algorithm::Tpi {
                let (s, log) = tpi_trace(&g, &t)?;
                if let Some(w) = trace_out.as_mut() {
                    writeln!(w, "iter,vertex,case,sigma")?;
                    for (i, step) in log.iter().enumerate() {
                        writeln!(w, "{},{},{},{}", i + 1, g.label(step.vertex), step.case.number(), step.sigma)?;
                    }
                }
                Seeding::Vector(s)
            } else {
                let (s, log) = wtss_trace(&g, &t, &c)?;
                if let Some(w) = trace_out.as_mut() {
                    writeln!(w, "iter,vertex,case")?;
                    for (i, step) in log.iter().enumerate() {
                        writeln!(w, "{},{},{}", i + 1, g.label(step.vertex), step.case.number())?;
                    }
                }
                Seeding::Set(s)
            }
        }
        heuristic => {
            if args.trace.is_some() {
                bail!("--trace applies only to tpi and wtss");
            }
            let baseline = heuristic.baseline().unwrap();
            match args.beta {
                Some(beta) => {
                    writeln!(out, "# budget {beta}")?;
                    run_baseline(baseline, &g, &t, &c, beta)?
                }
                None => {
                    let found = min_budget(baseline, &g, &t, &c)?;
                    writeln!(out, "# min budget {} ({} probes)", found.beta, found.probes)?;
                    found.solution
                }
            }
        }
    };
    let trace = seeding.diffuse(&g, &t);
    write_seeding(&g, &seeding, &mut out)?;
    write_summary(&mut out, args.algo.name(), seeding.cost(&c), &trace, g.n())?;
    out.flush()?;
    Ok(true)
}

fn compare(args: CompareArgs) -> Result<bool> {
    let (g, t, c) = args.instance.load()?;
    let mut outcomes = Vec::new();
    for algorithm in Algorithm::ALL {
        let outcome = solve(algorithm, &g, &t, &c)?
            .map_err(|active| anyhow!("{algorithm} output activates only {active} of {} vertices", g.n()))?;
        outcomes.push(outcome);
    }
    let cost_of = |a: Algorithm| outcomes.iter().find(|o| o.algorithm == a).and_then(|o| o.cost);
    let mut w = csv::Writer::from_writer(sink(args.output.as_deref())?);
    w.write_record(["algorithm", "cost", "rounds", "time_ms", "overhead_pct"])?;
    let opt = |x: Option<String>| x.unwrap_or_default();
    for o in &outcomes {
        let overhead = match (o.cost, cost_of(o.algorithm.reference())) {
            (Some(cost), Some(r)) if r > 0 => Some(format!("{:.2}", (cost as f64 / r as f64 - 1.0) * 100.0)),
            _ => None,
        };
        let ms = if args.no_timing { 0.0 } else { o.elapsed.as_secs_f64() * 1e3 };
        w.write_record([
            o.algorithm.name().to_string(),
            opt(o.cost.map(|x| x.to_string())),
            opt(o.rounds.map(|x| x.to_string())),
            format!("{ms:.3}"),
            opt(overhead),
        ])?;
    }
    w.flush()?;
    Ok(true)
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let mut text = match &args.config {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?,
        None => String::new(),
    };
    // flags are appended as config lines so both routes share one parser
    let mut set = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            text.push_str(&format!("\n{key}={v}"));
        }
    };
    set("graph", args.graph.clone());
    set("graph_seed", args.graph_seed.map(|s| s.to_string()));
    set("network", args.network.clone());
    set(
        "regime",
        args.regime.map(|r| match r {
            RegimeArg::Random => "random".to_string(),
            RegimeArg::Constant => "constant".to_string(),
            RegimeArg::Proportional => "proportional".to_string(),
        }),
    );
    set("seeds", args.seed.clone());
    set("params", args.params.clone());
    set("costs", args.costs.clone());
    set("algorithms", args.algo.clone());
    set("trials", args.trials.map(|t| t.to_string()));
    set("output", args.output.as_ref().map(|p| p.display().to_string()));
    if args.no_timing {
        set("timing", Some("false".into()));
    }
    let config = ExperimentConfig::parse(&text)?;
    if let Regime::Random { seeds } = &config.regime {
        if seeds.is_empty() {
            bail!("the random regime needs --seed");
        }
    }
    let records = run_experiment(&config)?;
    emit_csv(&records, sink(config.output.as_deref())?)?;
    if let Some(output) = &config.output {
        let path = summary_path(output);
        emit_summary_csv(&summarize(&records), sink(Some(&path))?)?;
    }
    Ok(true)
}

enum Solution {
    Set(TargetSet),
    Vector(IncentiveVector),
}

/// One label per line means a target set, `label value` an incentive
/// vector; vertices missing from a vector file get zero.
fn read_solution<R: BufRead>(reader: R, g: &Graph) -> Result<Solution> {
    let index = g.label_index();
    let mut set = Vec::new();
    let mut vector = vec![0u32; g.n()];
    let mut pairs = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = body.split_ascii_whitespace().collect();
        let is_pair = match tokens.len() {
            1 => false,
            2 => true,
            _ => bail!("solution line {}: expected `label` or `label value`", i + 1),
        };
        if *pairs.get_or_insert(is_pair) != is_pair {
            bail!("solution line {}: mixes set and vector lines", i + 1);
        }
        let label: u64 = tokens[0].parse().with_context(|| format!("solution line {}: bad label", i + 1))?;
        let v = *index.get(&label).ok_or_else(|| anyhow!("solution line {}: unknown vertex {label}", i + 1))?;
        if is_pair {
            vector[v] = tokens[1].parse().with_context(|| format!("solution line {}: bad value", i + 1))?;
        } else {
            set.push(v);
        }
    }
    Ok(if pairs == Some(true) {
        Solution::Vector(IncentiveVector::new(vector))
    } else {
        Solution::Set(TargetSet::new(set))
    })
}

fn validate(args: ValidateArgs) -> Result<bool> {
    let (g, t, _) = args.instance.load()?;
    let trace = match read_solution(open(&args.solution)?, &g)? {
        Solution::Set(s) => diffuse_set(&g, &t, &s),
        Solution::Vector(s) => diffuse_incentives(&g, &t, &s),
    };
    let pass = trace.is_complete();
    println!("activated {:.2}% ({}/{})", trace.coverage_percent(), trace.active_count(), g.n());
    println!("rounds {}", trace.converged_round());
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

fn oracle(args: OracleArgs) -> Result<bool> {
    let (g, t, c) = args.instance.load()?;
    let mut out = sink(args.output.as_deref())?;
    let (name, cost, trace) = match args.problem {
        Problem::Tss => {
            let (k, s) = brute_force_tss(&g, &t)?;
            write_set(&g, &s, &mut out)?;
            ("tss", k as u64, diffuse_set(&g, &t, &s))
        }
        Problem::Wtss => {
            let (cost, s) = brute_force_wtss(&g, &t, &c)?;
            write_set(&g, &s, &mut out)?;
            ("wtss", cost, diffuse_set(&g, &t, &s))
        }
        Problem::Tpi => {
            let (cost, s) = brute_force_tpi(&g, &t)?;
            write_vector(&g, &s, &mut out)?;
            ("tpi", cost, diffuse_incentives(&g, &t, &s))
        }
    };
    write_summary(&mut out, &format!("exact-{name}"), cost, &trace, g.n())?;
    out.flush()?;
    Ok(true)
}

fn gadget(args: GadgetArgs) -> Result<bool> {
    let (g, t, _) = args.instance.load()?;
    let gg = build_gadget(&g, &t)?;
    let mut edges = sink(Some(&args.output_graph))?;
    writeln!(edges, "# gadget graph: {} vertices, {} edges", gg.graph.n(), gg.graph.m())?;
    for (v, gadget) in gg.gadgets.iter().enumerate() {
        writeln!(edges, "# vertex {} -> head {} tail {}", g.label(v), gadget.head, gadget.tail)?;
    }
    gg.graph.write_edge_list(&mut edges)?;
    edges.flush()?;
    let mut values = sink(Some(&args.output_thresholds))?;
    write_values(&gg.graph, gg.thresholds.as_slice(), &mut values)?;
    values.flush()?;
    Ok(true)
}
