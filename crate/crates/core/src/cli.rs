//! The `hannerlab` command line.
//!
//! Exit status: 0 when every requested check passes, 1 when a check fails,
//! 2 on bad input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde_json::{json, Value};

use crate::faces::{enumerate_faces, FaceLattice, Fault};
use crate::flags::{volume_function, FlagSet};
use crate::hanner::{facet_normals, graph_of, hanner_of_graph, parse_expr, vertex_vectors, Graph, HannerExpr};
use crate::linalg::{fmt_rat, parse_rat, rat, Rat, Vector};
use crate::verify::{face_text, run_suites, Samples, Suite};
use crate::witness::{default_ladder, local_min_experiment, run_ladder, ExperimentReport, HannerContext};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hannerlab", version, about = "Exact computations on Hanner polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Vertices, polar vertices and counts of one polytope, as JSON.
    Build(Input),
    /// Proper faces with dimensions, centroids and frame dimensions.
    Faces(Guarded),
    /// Flag count and the simplices C_F.
    Flags(Guarded),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Perturb, normalize and measure P(K) - P(H).
    Experiment(ExperimentArgs),
    /// The graph of a tree, or the tree of a P4-free graph.
    Graph(Input),
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Tree such as "((I1 +1 I2) +inf I3)".
    #[arg(long)]
    pub expr: Option<String>,
    /// JSON file {"n": int, "edges": [[i, j], ...]} with 1-based vertices.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Guarded {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 6)]
    pub max_dim: usize,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct VerifyInput {
    #[arg(long)]
    pub expr: Option<String>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Every canonical tree of this dimension.
    #[arg(long)]
    pub trees: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Abc,
    EqualVolumes,
    Derivative,
    Cl,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Abc => vec![Suite::Abc],
            SuiteArg::EqualVolumes => vec![Suite::EqualVolumes],
            SuiteArg::Derivative => vec![Suite::Derivative],
            SuiteArg::Cl => vec![Suite::Cl],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BugArg {
    /// Move the centroid of one edge.
    Centroid,
    /// Swap the weights of the ℓ1 frame rule.
    Weight,
}

impl From<BugArg> for Fault {
    fn from(b: BugArg) -> Fault {
        match b {
            BugArg::Centroid => Fault::PerturbedCentroid,
            BugArg::Weight => Fault::WrongL1Weight,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: VerifyInput,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Seed for the random directions of the derivative suite.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Negative control: verify a deliberately broken lattice.
    #[arg(long, value_enum)]
    pub inject_bug: Option<BugArg>,
    #[arg(long, default_value_t = 6)]
    pub max_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub input: Input,
    /// Hausdorff size of the perturbation, "p/q", at most 1/8.
    #[arg(long)]
    pub delta: String,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also run delta/2 and delta/4 with matched directions.
    #[arg(long)]
    pub ladder: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, default_value_t = 4)]
    pub max_dim: usize,
}

/// Bad input: reported on stderr with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Usage> {
    match cmd {
        Command::Build(input) => build(&load(&input.expr, &input.graph)?, out),
        Command::Faces(g) => faces(&guard(load(&g.input.expr, &g.input.graph)?, g.max_dim)?, out),
        Command::Flags(g) => flags(&guard(load(&g.input.expr, &g.input.graph)?, g.max_dim)?, out),
        Command::Verify(v) => verify(&v, out),
        Command::Experiment(e) => experiment(&e, out),
        Command::Graph(input) => graph(&input, out),
    }
}

fn load(expr: &Option<String>, graph: &Option<PathBuf>) -> Result<HannerExpr, Usage> {
    match (expr, graph) {
        (Some(e), _) => Ok(parse_expr(e)?),
        (None, Some(p)) => Ok(hanner_of_graph(&read_graph(p)?)?),
        (None, None) => Err(Usage("one of --expr or --graph is required".into())),
    }
}

fn read_graph(p: &Path) -> Result<Graph, Usage> {
    let text = fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
    Ok(Graph::from_json(&text)?)
}

fn guard(h: HannerExpr, max_dim: usize) -> Result<HannerExpr, Usage> {
    if h.n() > max_dim {
        return Err(Usage(format!(
            "dimension {} exceeds the guard {max_dim}; pass --max-dim to override",
            h.n()
        )));
    }
    Ok(h)
}

fn vec_json(v: &Vector) -> Value {
    Value::Array(v.iter().map(|x| Value::String(fmt_rat(x))).collect())
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), Usage> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn flag_count(n: usize) -> usize {
    (1usize << n) * (1..=n).product::<usize>()
}

fn build(h: &HannerExpr, out: &mut dyn Write) -> Result<i32, Usage> {
    let n = h.n();
    let vs = vertex_vectors(h);
    let ps = facet_normals(h);
    let bundle = json!({
        "tree": h.to_string(),
        "n": n,
        "graph": graph_of(h).to_json(),
        "vertices": vs.iter().map(vec_json).collect::<Vec<_>>(),
        "polar_vertices": ps.iter().map(vec_json).collect::<Vec<_>>(),
        "counts": {
            "vertices": vs.len(),
            "facets": ps.len(),
            "proper_faces": enumerate_faces(h).len(),
            "flags": flag_count(n),
        },
    });
    emit(out, &bundle)?;
    Ok(EXIT_OK)
}

fn faces(h: &HannerExpr, out: &mut dyn Write) -> Result<i32, Usage> {
    let lat = FaceLattice::new(h);
    let rows: Vec<Value> = (0..lat.len())
        .map(|i| {
            let fr = lat.frame(i);
            json!({
                "face": face_text(lat.face(i)),
                "dim": lat.dim(i),
                "centroid": vec_json(&fr.c),
                "frame_dim": fr.dirs.len(),
            })
        })
        .collect();
    emit(
        out,
        &json!({"tree": h.to_string(), "f_vector": lat.f_vector(), "faces": rows}),
    )?;
    Ok(EXIT_OK)
}

fn flags(h: &HannerExpr, out: &mut dyn Write) -> Result<i32, Usage> {
    let lat = FaceLattice::new(h);
    let fs = FlagSet::new(&lat);
    let dual = FaceLattice::new(&h.dual());
    let dual_fs = FlagSet::new(&dual);
    let r = crate::flags::equal_volumes_check(&lat.centroids(), &fs);
    let v = volume_function(&lat.centroids(), &fs);
    let v_star = volume_function(&dual.centroids(), &dual_fs);
    emit(
        out,
        &json!({
            "tree": h.to_string(),
            "flags": fs.len(),
            "expected_flags": flag_count(h.n()),
            "simplex_volume": r.common.as_ref().map(fmt_rat),
            "volume": fmt_rat(&v),
            "polar_volume": fmt_rat(&v_star),
            "volume_product": fmt_rat(&(&v * &v_star)),
        }),
    )?;
    Ok(if r.offending.is_none() && fs.len() == flag_count(h.n()) { EXIT_OK } else { EXIT_FAIL })
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let i = &args.input;
    let trees = match i.trees {
        Some(n) => {
            if n == 0 {
                return Err(Usage("--trees needs a positive dimension".into()));
            }
            crate::hanner::canonical_trees(n)
        }
        None => vec![load(&i.expr, &i.graph)?],
    };
    for h in &trees {
        guard(h.clone(), args.max_dim)?;
    }
    let samples = Samples {
        seed: args.seed,
        ..Samples::default()
    };
    let fault = args.inject_bug.map(Fault::from);
    if let Some(f) = fault {
        writeln!(out, "injected fault: {f:?}")?;
    }
    let mut all = true;
    for h in &trees {
        for r in run_suites(h, &args.suite.suites(), fault, samples) {
            all &= r.passed;
            let tag = if r.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{tag} {h} {}: {}", r.suite, r.detail)?;
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_FAIL })
}

fn experiment(args: &ExperimentArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let h = guard(load(&args.input.expr, &args.input.graph)?, args.max_dim)?;
    let delta = parse_rat(&args.delta)?;
    if delta.is_negative() || delta > rat(1, 8) {
        return Err(Usage(format!("delta must lie in [0, 1/8], got {}", fmt_rat(&delta))));
    }
    if args.trials == 0 {
        return Err(Usage("--trials must be at least 1".into()));
    }
    fs::create_dir_all(&args.out).map_err(|e| Usage(format!("{}: {e}", args.out.display())))?;
    let ctx = HannerContext::new(&h);
    let reports = if args.ladder {
        let lad = run_ladder(&ctx, &default_ladder(&delta), args.trials, args.seed);
        let table = lad.table();
        fs::write(args.out.join("ladder.txt"), &table)?;
        write!(out, "{table}")?;
        lad.reports
    } else {
        vec![local_min_experiment(&ctx, &delta, args.trials, args.seed)]
    };
    for (k, r) in reports.iter().enumerate() {
        let stem = if args.ladder { format!("experiment_{k}") } else { "experiment".into() };
        write_report(r, &args.out, &stem, args.format)?;
    }
    let min_gap: Option<Rat> = reports.iter().filter_map(|r| r.min_gap()).min();
    let gap_ok = min_gap.as_ref().is_some_and(|g| !g.is_negative());
    let santalo = reports.iter().all(|r| r.all_santalo());
    let pairings = reports.iter().all(|r| r.all_pairings());
    let sandwiched = reports.iter().all(|r| r.all_sandwiched());
    let bound = reports.iter().flat_map(|r| &r.rows).filter(|x| x.normalization_bound_ok()).count();
    let completed: usize = reports.iter().map(|r| r.rows.len()).sum();
    let failed: usize = reports.iter().map(|r| r.failures.len()).sum();
    let rejected: usize = reports.iter().map(|r| r.rejected()).sum();
    writeln!(out, "tree {h}: {completed} trials completed, {failed} failed, {rejected} resampled")?;
    for r in &reports {
        for f in &r.failures {
            writeln!(out, "trial {} (seed {}) failed: {}", f.trial, f.seed, f.error)?;
        }
    }
    writeln!(
        out,
        "min_gap = {}",
        min_gap.as_ref().map(fmt_rat).unwrap_or_else(|| "-".into())
    )?;
    writeln!(out, "min_gap ≥ 0: {gap_ok}")?;
    writeln!(out, "V(Y)V(Y*) ≥ |H||H°| in all trials: {santalo}")?;
    writeln!(out, "pairings exact in all trials: {pairings}")?;
    writeln!(out, "B_1 ⊆ K' ⊆ B_∞ in all trials: {sandwiched}")?;
    writeln!(out, "d_H(K',H)^2 ≤ 9 d_H(K,H)^2 in {bound}/{completed} trials")?;
    Ok(if gap_ok && santalo && pairings && sandwiched && failed == 0 { EXIT_OK } else { EXIT_FAIL })
}

fn write_report(r: &ExperimentReport, dir: &Path, stem: &str, format: Format) -> Result<(), Usage> {
    match format {
        Format::Csv => {
            let f = fs::File::create(dir.join(format!("{stem}.csv")))?;
            r.write_csv(std::io::BufWriter::new(f))?;
        }
        Format::Json => {
            let text = serde_json::to_string_pretty(&r.to_json())?;
            fs::write(dir.join(format!("{stem}.json")), text + "\n")?;
        }
    }
    Ok(())
}

fn graph(input: &Input, out: &mut dyn Write) -> Result<i32, Usage> {
    let (g, tree) = match (&input.expr, &input.graph) {
        (Some(e), _) => {
            let h = parse_expr(e)?;
            (graph_of(&h), Ok(h))
        }
        (None, Some(p)) => {
            let g = read_graph(p)?;
            let t = hanner_of_graph(&g);
            (g, t)
        }
        (None, None) => return Err(Usage("one of --expr or --graph is required".into())),
    };
    let one_based = |sets: Vec<Vec<usize>>| -> Vec<Vec<usize>> {
        sets.into_iter().map(|s| s.into_iter().map(|i| i + 1).collect()).collect()
    };
    let mut v = json!({
        "graph": g.to_json(),
        "p4_free": tree.is_ok(),
        "maximal_independent_sets": one_based(g.maximal_independent_sets()),
        "maximal_cliques": one_based(g.maximal_cliques()),
    });
    let code = match &tree {
        Ok(h) => {
            v["tree"] = Value::String(h.to_string());
            EXIT_OK
        }
        Err(e) => {
            v["error"] = Value::String(e.to_string());
            EXIT_FAIL
        }
    };
    emit(out, &v)?;
    Ok(code)
}
