use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use dpath_core::ep_cover::{default_growth_cap, ep_cover_top, fpt_approx, grow_hitting_bound, EpConfig, EpOutcome};
use dpath_core::fpt_pipeline::{sm_bound, smsep_bound, solve_fpt, type_count_bound, FptConfig, SolveOutcome};
use dpath_core::graph_core::DEFAULT_BUDGET;
use dpath_core::hardness_gen::{gen_grid_tiling, gen_random_instance, reduce_matching, reduce_skew};
use dpath_core::io::{instance_from_dimacs, InstanceFile, WitnessFile};
use dpath_core::pattern_ramsey::{brute_find_pattern_on, matching_threshold, ramsey_threshold, staircase_threshold};
use dpath_core::rep_sets::rep_vector_bound;
use dpath_core::{DpathError, Instance, WitnessKind};

const EXIT_PATHS: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_WITNESS: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(name = "dpath", version, about = "Maximum disjoint paths with structured demand graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact answer for k, or a demand pattern that blocks the pipeline.
    Solve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
        /// Search-node budget for the exact stages.
        #[arg(long, env = "DPATH_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Override the per-side terminal threshold of the separation rule.
        #[arg(long)]
        smsep: Option<u128>,
        /// Override the terminal count the reduction loop shrinks to.
        #[arg(long)]
        sm: Option<u128>,
    },
    /// k disjoint valid paths, a hitting set, or an induced matching.
    Cover {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Largest packing found by doubling k.
    Approx {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write a generated instance.
    Gen {
        kind: GenKind,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        planted: bool,
        /// Write `<PREFIX>.json` (and `<PREFIX>.witness.json` when planted);
        /// without it the instance goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a witness or a run report against an instance.
    Verify {
        #[command(flatten)]
        input: Input,
        witness: PathBuf,
    },
    /// Exhaustive search for an induced matching, skew biclique or clique of
    /// size r among the terminals.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    /// Instance JSON, or a DIMACS edge list with `--demand`.
    file: PathBuf,
    /// Demand JSON `{terminals, demand_edges, k}` for a DIMACS supply graph.
    #[arg(long)]
    demand: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Target; defaults to the file's `k`.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Growth iterations per level of the cover-or-pack loop.
    #[arg(long)]
    growth_cap: Option<u64>,
    /// Also write the report here.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write a Graphviz description of the instance and witness here.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Add the formula constants for this k and r to the report.
    #[arg(long)]
    show_constants: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    MatchingHard,
    SkewHard,
    GridTiling,
    Random,
}

#[derive(Debug, Serialize, Deserialize)]
struct RunReport {
    command: String,
    outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessFile>,
    stats: Stats,
    config: ConfigEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constants: Option<BTreeMap<String, u128>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Stats {
    wall_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    removal_events: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hitting_set_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct ConfigEcho {
    k: usize,
    r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    growth_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    smsep: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sm: Option<u128>,
    overridden: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dpath: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Solve {
            input,
            run,
            budget,
            smsep,
            sm,
        } => cmd_solve(&input, &run, budget, smsep, sm),
        Cmd::Cover { input, run } => cmd_cover(&input, &run),
        Cmd::Approx { input, run } => cmd_approx(&input, &run),
        Cmd::Gen {
            kind,
            k,
            n,
            seed,
            planted,
            out,
        } => cmd_gen(kind, k, n, seed, planted, out.as_deref()),
        Cmd::Verify { input, witness } => cmd_verify(&input, &witness),
        Cmd::Analyze { input, r, output } => cmd_analyze(&input, r, output.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(input: &Input) -> Result<Instance, String> {
    let text = read(&input.file)?;
    let file = match &input.demand {
        Some(d) => instance_from_dimacs(&text, &read(d)?),
        None => InstanceFile::from_json(&text),
    }
    .map_err(|e| format!("{}: {e}", input.file.display()))?;
    file.to_instance().map_err(|e| e.to_string())
}

fn emit(report: &RunReport, output: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())? + "\n";
    print!("{text}");
    match output {
        Some(p) => write(p, &text),
        None => Ok(()),
    }
}

fn constants(k: usize, r: usize, z: Option<usize>) -> BTreeMap<String, u128> {
    let mut c = BTreeMap::new();
    c.insert("growth_cap".into(), default_growth_cap(k, r) as u128);
    c.insert("grow_hitting_bound_2k".into(), grow_hitting_bound(2 * k) as u128);
    c.insert("matching_threshold".into(), matching_threshold(r));
    c.insert("staircase_threshold".into(), staircase_threshold(r));
    for cc in [2, 4, 5] {
        c.insert(format!("ramsey_threshold_c{cc}"), ramsey_threshold(cc, r));
    }
    c.insert("clique_reduction_size".into(), (10 * k * k) as u128);
    c.insert("r_star".into(), r.max(10 * k * k) as u128);
    c.insert("rep_vector_bound".into(), rep_vector_bound(k, r));
    c.insert("matching_reduction_k_prime".into(), (4 * k * k + 2 * k * k.saturating_sub(1)) as u128);
    c.insert("skew_reduction_k_prime".into(), (4 * k * (k + 1) + 6 * k * k) as u128);
    if let Some(z) = z {
        c.insert("hitting_set_size".into(), z as u128);
        c.insert("type_count_bound".into(), type_count_bound(z));
        c.insert("smsep_bound".into(), smsep_bound(k, r, z));
        c.insert("sm_bound".into(), sm_bound(k, r, z));
    }
    c
}

fn dot(inst: &Instance, witness: Option<&WitnessFile>) -> String {
    let mut used = BTreeSet::new();
    let mut marked = BTreeSet::new();
    match witness {
        Some(WitnessFile::Paths { paths, .. }) => {
            for p in paths {
                used.extend(p.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))));
            }
        }
        Some(WitnessFile::HittingSet { vertices }) => marked.extend(vertices.iter().copied()),
        Some(WitnessFile::Pattern { pattern }) => marked.extend(pattern.vertices.iter().copied()),
        None => {}
    }
    let mut s = String::from("graph dpath {\n");
    for v in 0..inst.n() {
        let shape = if inst.is_terminal(v) { "box" } else { "ellipse" };
        let fill = if marked.contains(&v) { ", style=filled, fillcolor=gold" } else { "" };
        let _ = writeln!(s, "  {v} [shape={shape}{fill}];");
    }
    for (u, v) in inst.graph().edges() {
        let color = if used.contains(&(u, v)) { " [color=red, penwidth=2]" } else { "" };
        let _ = writeln!(s, "  {u} -- {v}{color};");
    }
    for (u, v) in inst.demand_edges() {
        let _ = writeln!(s, "  {u} -- {v} [style=dashed, color=blue, constraint=false];");
    }
    s.push_str("}\n");
    s
}

fn finish_run(inst: &Instance, run: &RunArgs, report: &RunReport) -> Result<(), String> {
    if let Some(p) = &run.dot {
        write(p, &dot(inst, report.witness.as_ref()))?;
    }
    emit(report, run.output.as_deref())
}

fn elapsed(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn cmd_solve(input: &Input, run: &RunArgs, budget: u64, smsep: Option<u128>, sm: Option<u128>) -> Result<u8, String> {
    let inst = load(input)?;
    let k = run.k.unwrap_or(inst.k());
    let inst = inst.with_k(k);
    let cfg = FptConfig {
        smsep,
        sm,
        budget,
        ep: EpConfig { growth_cap: run.growth_cap },
    };
    let config = ConfigEcho {
        k,
        r: run.r,
        budget: Some(budget),
        growth_cap: run.growth_cap,
        smsep,
        sm,
        overridden: cfg.overridden(),
    };
    let start = Instant::now();
    let (outcome, witness, code, stats) = match solve_fpt(&inst, run.r, &cfg) {
        Ok(rep) => {
            let mut events = BTreeMap::new();
            for e in &rep.trace {
                *events.entry(format!("{:?}", e.rule).to_lowercase()).or_insert(0) += 1;
            }
            let stats = Stats {
                wall_ms: elapsed(start),
                removal_events: Some(events),
                hitting_set_size: rep.hitting_set.as_ref().map(BTreeSet::len),
                error: None,
            };
            let label = rep.outcome.label().to_string();
            let (witness, code) = match rep.outcome {
                SolveOutcome::Paths(p) => (Some(WitnessFile::Paths { k, paths: p.paths }), EXIT_PATHS),
                SolveOutcome::No => (None, EXIT_NO),
                SolveOutcome::MatchingWitness(w) | SolveOutcome::SkewWitness(w) => (Some(WitnessFile::Pattern { pattern: w }), EXIT_WITNESS),
            };
            (label, witness, code, stats)
        }
        Err(e @ DpathError::BudgetExhausted { .. }) => {
            let stats = Stats {
                wall_ms: elapsed(start),
                error: Some(e.to_string()),
                ..Stats::default()
            };
            ("budget_exhausted".to_string(), None, EXIT_BUDGET, stats)
        }
        Err(e) => return Err(e.to_string()),
    };
    let z = stats.hitting_set_size;
    let report = RunReport {
        command: "solve".into(),
        outcome,
        witness,
        stats,
        config,
        constants: run.show_constants.then(|| constants(k, run.r, z)),
    };
    finish_run(&inst, run, &report)?;
    Ok(code)
}

fn cmd_cover(input: &Input, run: &RunArgs) -> Result<u8, String> {
    let inst = load(input)?;
    let k = run.k.unwrap_or(inst.k());
    let inst = inst.with_k(k);
    let cfg = EpConfig { growth_cap: run.growth_cap };
    let start = Instant::now();
    let out = ep_cover_top(&inst, k, run.r, &cfg).map_err(|e| e.to_string())?;
    let outcome = out.label().replace('-', "_");
    let (witness, code, z) = match out {
        EpOutcome::Paths(p) => (WitnessFile::Paths { k, paths: p.paths }, EXIT_PATHS, None),
        EpOutcome::HittingSet(z) => {
            let n = z.len();
            (WitnessFile::HittingSet { vertices: z }, EXIT_NO, Some(n))
        }
        EpOutcome::MatchingWitness(w) => (WitnessFile::Pattern { pattern: w }, EXIT_WITNESS, None),
    };
    let report = RunReport {
        command: "cover".into(),
        outcome,
        witness: Some(witness),
        stats: Stats {
            wall_ms: elapsed(start),
            hitting_set_size: z,
            ..Stats::default()
        },
        config: ConfigEcho {
            k,
            r: run.r,
            growth_cap: run.growth_cap,
            ..ConfigEcho::default()
        },
        constants: run.show_constants.then(|| constants(k, run.r, z)),
    };
    finish_run(&inst, run, &report)?;
    Ok(code)
}

fn cmd_approx(input: &Input, run: &RunArgs) -> Result<u8, String> {
    let inst = load(input)?;
    let cfg = EpConfig { growth_cap: run.growth_cap };
    let start = Instant::now();
    let res = fpt_approx(&inst, run.r, &cfg).map_err(|e| e.to_string())?;
    let found = res.paths.len();
    let (outcome, witness, code) = match res.witness {
        Some(w) => ("matching_witness", WitnessFile::Pattern { pattern: w }, EXIT_WITNESS),
        None => (
            "paths",
            WitnessFile::Paths {
                k: found,
                paths: res.paths.paths,
            },
            EXIT_PATHS,
        ),
    };
    let report = RunReport {
        command: "approx".into(),
        outcome: outcome.into(),
        witness: Some(witness),
        stats: Stats {
            wall_ms: elapsed(start),
            ..Stats::default()
        },
        config: ConfigEcho {
            k: found,
            r: run.r,
            growth_cap: run.growth_cap,
            ..ConfigEcho::default()
        },
        constants: run.show_constants.then(|| constants(res.last_k, run.r, None)),
    };
    finish_run(&inst, run, &report)?;
    Ok(code)
}

fn cmd_gen(kind: GenKind, k: usize, n: usize, seed: u64, planted: bool, out: Option<&Path>) -> Result<u8, String> {
    if k == 0 || n == 0 {
        return Err("--k and --n must be at least 1".into());
    }
    let (main, witness): (String, Option<WitnessFile>) = match kind {
        GenKind::GridTiling => {
            let gt = gen_grid_tiling(k, n, seed, planted);
            (serde_json::to_string_pretty(&gt).map_err(|e| e.to_string())? + "\n", None)
        }
        GenKind::MatchingHard => {
            let red = reduce_matching(&gen_grid_tiling(k, n, seed, planted)).map_err(|e| e.to_string())?;
            let w = red.witness.map(|p| WitnessFile::Paths { k: red.k_prime, paths: p.paths });
            (InstanceFile::from_instance(&red.instance).to_json(), w)
        }
        GenKind::SkewHard => {
            let red = reduce_skew(&gen_grid_tiling(k, n, seed, planted)).map_err(|e| e.to_string())?;
            let w = red.witness.map(|p| WitnessFile::Paths { k: red.k_prime, paths: p.paths });
            (InstanceFile::from_labeled(&red.labeled, red.k_prime).map_err(|e| e.to_string())?.to_json(), w)
        }
        GenKind::Random => (InstanceFile::from_instance(&gen_random_instance(n, k, seed)).to_json(), None),
    };
    match out {
        None => print!("{main}"),
        Some(prefix) => {
            let base = prefix.to_string_lossy();
            write(Path::new(&format!("{base}.json")), &main)?;
            if let Some(w) = witness {
                write(Path::new(&format!("{base}.witness.json")), &(serde_json::to_string_pretty(&w).map_err(|e| e.to_string())? + "\n"))?;
            }
        }
    }
    Ok(0)
}

/// Accepts a bare witness or a run report carrying one.
fn parse_witness(text: &str) -> Result<WitnessFile, String> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let w = match v.get("stats") {
        Some(_) => v.get("witness").cloned().ok_or("report carries no witness")?,
        None => v,
    };
    serde_json::from_value(w).map_err(|e| e.to_string())
}

fn cmd_verify(input: &Input, witness: &Path) -> Result<u8, String> {
    let inst = load(input)?;
    let w = parse_witness(&read(witness)?).map_err(|e| format!("{}: {e}", witness.display()))?;
    if w.verify(&inst) {
        println!("valid");
        Ok(0)
    } else {
        println!("invalid");
        Ok(1)
    }
}

fn cmd_analyze(input: &Input, r: usize, output: Option<&Path>) -> Result<u8, String> {
    let inst = load(input)?;
    let start = Instant::now();
    let h = inst.demand();
    let ts = inst.terminals();
    let find = |kind| brute_find_pattern_on(h, ts, kind, r).map_err(|e| e.to_string());
    let matching = find(WitnessKind::InducedMatching)?;
    let skew = find(WitnessKind::SkewBiclique)?;
    let (outcome, witness) = match (matching, skew) {
        (Some(w), _) => ("matching", Some(w)),
        (None, Some(w)) => ("skew", Some(w)),
        (None, None) => ("neither", None),
    };
    let report = RunReport {
        command: "analyze".into(),
        outcome: outcome.into(),
        witness: witness.map(|w| WitnessFile::Pattern { pattern: w }),
        stats: Stats {
            wall_ms: elapsed(start),
            ..Stats::default()
        },
        config: ConfigEcho {
            k: inst.k(),
            r,
            ..ConfigEcho::default()
        },
        constants: None,
    };
    emit(&report, output)?;
    Ok(if report.witness.is_some() { EXIT_WITNESS } else { 0 })
}
