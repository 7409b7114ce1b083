//! Command-line driver: every analysis reads declarative JSON files and
//! writes a deterministic JSON report to standard output.
//!
//! Exit codes: 0 on success, 2 on validation problems (including recipe
//! mismatches), 3 when an enumeration or search cap is exceeded.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use causal_affects_core::affects::{AffectsBounds, AffectsSet, Engine, Relation};
use causal_affects_core::embedding::{
    check_embedding, search_embeddings, CompatMode, Embedding, EmbeddingError, SearchRequire,
};
use causal_affects_core::independence::{compatibility_report, d_separated, CompatCheck};
use causal_affects_core::infer::infer_causes;
use causal_affects_core::loops::{
    build_loop_graph, build_potential_cause_graph, detect_acl, find_affects_chains_and_classify,
    AclMode, LoopError,
};
use causal_affects_core::model::{Assignment, Model, ModelError};
use causal_affects_core::poset::{minkowski_grid, Poset};
use causal_affects_core::rules::verify_rules_on_model;
use causal_affects_core::{catalog, rational};

/// Exit status carriers: validation failures exit 2, exceeded caps exit 3.
enum CliError {
    Validation(String),
    CapExceeded(String),
}

type CliResult<T = ()> = Result<T, CliError>;

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::CapExceeded(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::CapExceeded(m) => m,
        }
    }
}

fn validation(err: impl Display) -> CliError {
    CliError::Validation(err.to_string())
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> CliError {
        CliError::Validation(e.to_string())
    }
}

impl From<LoopError> for CliError {
    fn from(e: LoopError) -> CliError {
        match e {
            LoopError::CapExceeded { .. } => CliError::CapExceeded(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<EmbeddingError> for CliError {
    fn from(e: EmbeddingError) -> CliError {
        match e {
            EmbeddingError::CapExceeded { .. } => CliError::CapExceeded(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "causal-affects",
    about = "Affects relations, causal loops, and poset embeddings for finite causal models"
)]
struct Cli {
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve or intervene on a structural model.
    #[command(subcommand)]
    Model(ModelCmd),
    /// d-separation and distribution compatibility.
    #[command(subcommand)]
    Indep(IndepCmd),
    /// Decide, enumerate and classify affects relations.
    #[command(subcommand)]
    Affects(AffectsCmd),
    /// Infer causes and verify transformation rules.
    #[command(subcommand)]
    Infer(InferCmd),
    /// Potential cause graphs and loop graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Causal-loop detection and classification.
    #[command(subcommand)]
    Acl(AclCmd),
    /// Poset validation, classification and grids.
    #[command(subcommand)]
    Poset(PosetCmd),
    /// Embedding checks and searches.
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// Bundled end-to-end examples with frozen expectations.
    #[command(subcommand)]
    Recipe(RecipeCmd),
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Print the observed joint distribution.
    Solve(ModelArgs),
    /// Print the joint distribution after forcing nodes.
    Intervene(InterveneArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Structural model JSON file.
    #[arg(long)]
    model: String,
}

#[derive(Args)]
struct InterveneArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Forced assignment, e.g. `K=1,M=0`.
    #[arg(long = "do")]
    fix: String,
}

#[derive(Subcommand)]
enum IndepCmd {
    /// Decide d-separation of two node sets given a third.
    Dsep(DsepArgs),
    /// Check compatibility (or faithfulness) of the solved distribution.
    Compat(CompatArgs),
}

#[derive(Args)]
struct DsepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// First node set (comma separated).
    #[arg(long)]
    x: String,
    /// Second node set.
    #[arg(long)]
    y: String,
    /// Separating set (may be empty).
    #[arg(long, default_value = "")]
    z: String,
}

#[derive(Args)]
struct CompatArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// `compatible` or `faithful`.
    #[arg(long, default_value = "compatible")]
    mode: String,
}

#[derive(Subcommand)]
enum AffectsCmd {
    /// Enumerate the complete bounded affects set with flags.
    Enumerate(EnumerateArgs),
    /// Decide and classify one relation.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Uniform bound on the four block sizes.
    #[arg(long, default_value_t = 2)]
    max: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Antecedent block.
    #[arg(long)]
    x: String,
    /// Affected block.
    #[arg(long)]
    y: String,
    /// Do-block.
    #[arg(long, default_value = "")]
    z: String,
    /// Conditioning block.
    #[arg(long, default_value = "")]
    w: String,
}

#[derive(Subcommand)]
enum InferCmd {
    /// Infer disjunctive causes from a classified affects set.
    Causes(AffectsFileArgs),
    /// Verify every transformation rule against a model's ground truth.
    Verify(EnumerateArgs),
}

#[derive(Args)]
struct AffectsFileArgs {
    /// Affects set JSON file.
    #[arg(long)]
    affects: String,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    affects: AffectsFileArgs,
    /// Also add arrows from undroppable do-block elements.
    #[arg(long)]
    extended: bool,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Build the potential cause graph.
    PotCause(GraphArgs),
    /// Build the pruned loop graph.
    Loop(GraphArgs),
}

#[derive(Subcommand)]
enum AclCmd {
    /// Decide whether the set implies a causal loop.
    Detect(AclDetectArgs),
    /// Enumerate affects chains and match loop classes.
    Classify(AffectsFileArgs),
}

#[derive(Args)]
struct AclDetectArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// `loop-graph`, `oracle`, or `both`.
    #[arg(long, default_value = "both")]
    mode: String,
    /// Cap on oracle resolutions.
    #[arg(long, default_value_t = 1_000_000)]
    cap: u128,
}

#[derive(Subcommand)]
enum PosetCmd {
    /// Validate a poset file and print its closure and Hasse diagram.
    Validate(PosetArgs),
    /// Structural classification with a set-size bound.
    Classify(PosetClassifyArgs),
    /// Generate an integer light-cone grid poset.
    Grid(GridArgs),
}

#[derive(Args)]
struct PosetArgs {
    /// Poset JSON file.
    #[arg(long)]
    poset: String,
}

#[derive(Args)]
struct PosetClassifyArgs {
    #[command(flatten)]
    poset: PosetArgs,
    /// Bound on quantified subset sizes.
    #[arg(long, default_value_t = 3)]
    max: usize,
}

#[derive(Args)]
struct GridArgs {
    /// Spatial dimensions (1 or 2).
    #[arg(long, default_value_t = 1)]
    spatial: usize,
    /// Coordinate extent.
    #[arg(long, default_value_t = 1)]
    extent: i64,
}

#[derive(Subcommand)]
enum EmbedCmd {
    /// Check one embedding file against a set and poset.
    Check(EmbedCheckArgs),
    /// Search all embeddings meeting the requirements.
    Search(EmbedSearchArgs),
}

#[derive(Args)]
struct EmbedCheckArgs {
    #[command(flatten)]
    affects: AffectsFileArgs,
    #[command(flatten)]
    poset: PosetArgs,
    /// Embedding JSON file.
    #[arg(long)]
    embedding: String,
}

#[derive(Args)]
struct EmbedSearchArgs {
    #[command(flatten)]
    affects: AffectsFileArgs,
    #[command(flatten)]
    poset: PosetArgs,
    /// Compatibility tier: `irreducible`, `strong-indecreasable`, or
    /// `indecreasable`.
    #[arg(long, default_value = "irreducible")]
    mode: String,
    /// Extra requirements (comma separated): `support-stable`,
    /// `minimum-stable`, `non-degenerate`, `non-trivial`.
    #[arg(long, default_value = "")]
    require: String,
    /// Cap on the raw search-space size.
    #[arg(long, default_value_t = 10_000_000)]
    cap: u128,
}

#[derive(Subcommand)]
enum RecipeCmd {
    /// Run a bundled recipe and diff against its frozen expectation.
    Run(RecipeArgs),
}

#[derive(Args)]
struct RecipeArgs {
    /// Recipe id: otp, jamming, ex-iv4, ex-iv7, hcl, noacl, acl3, acl5,
    /// acl6a, acl7, acl11, acl12.
    name: String,
}

fn read_file(path: &str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{path}: {e}")))
}

fn load_model(args: &ModelArgs) -> CliResult<Model> {
    Model::from_json_str(&read_file(&args.model)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.model)))
}

fn load_affects(args: &AffectsFileArgs) -> CliResult<AffectsSet> {
    AffectsSet::from_json_str(&read_file(&args.affects)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.affects)))
}

fn load_poset(args: &PosetArgs) -> CliResult<Poset> {
    Poset::from_json_str(&read_file(&args.poset)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.poset)))
}

fn names(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn node_indices(model: &Model, list: &str) -> CliResult<Vec<usize>> {
    names(list)
        .iter()
        .map(|n| model.node_index(n).map_err(CliError::from))
        .collect()
}

fn parse_assignment(model: &Model, text: &str) -> CliResult<Assignment> {
    let mut fix = Assignment::new();
    for part in names(text) {
        let (node, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("bad assignment {part:?}")))?;
        let idx = model.node_index(node.trim())?;
        let v: usize = value
            .trim()
            .parse()
            .map_err(|e| CliError::Validation(format!("bad value in {part:?}: {e}")))?;
        fix.insert(idx, v);
    }
    Ok(fix)
}

fn relation_from_flags(x: &str, y: &str, z: &str, w: &str) -> CliResult<Relation> {
    let block = |s: &str| -> BTreeSet<String> { names(s).into_iter().collect() };
    let rel = Relation {
        x: block(x),
        y: block(y),
        z: block(z),
        w: block(w),
    };
    rel.check_well_formed().map_err(validation)?;
    Ok(rel)
}

/// Writes one line to stdout; a closed pipe (e.g. `| head`) ends the
/// process quietly instead of panicking.
fn print_line(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}

fn print_json(value: &Value) {
    print_line(&serde_json::to_string_pretty(value).expect("serializable report"));
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Model(ModelCmd::Solve(a)) => {
            let model = load_model(&a)?;
            let joint = model.solve_observed()?;
            print_json(&model.joint_to_json(&joint));
        }
        Command::Model(ModelCmd::Intervene(a)) => {
            let model = load_model(&a.model)?;
            let fix = parse_assignment(&model, &a.fix)?;
            let joint = model.post_intervention(&fix)?;
            print_json(&model.joint_to_json(&joint));
        }
        Command::Indep(IndepCmd::Dsep(a)) => {
            let model = load_model(&a.model)?;
            let x = node_indices(&model, &a.x)?;
            let y = node_indices(&model, &a.y)?;
            let z = node_indices(&model, &a.z)?;
            let sep = d_separated(&model, &x, &y, &z)?;
            print_json(&json!({"x": names(&a.x), "y": names(&a.y), "z": names(&a.z),
                               "d_separated": sep}));
        }
        Command::Indep(IndepCmd::Compat(a)) => {
            let model = load_model(&a.model)?;
            let check = match a.mode.as_str() {
                "compatible" => CompatCheck::Compatible,
                "faithful" => CompatCheck::Faithful,
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown compatibility mode {other:?}"
                    )))
                }
            };
            let report = compatibility_report(&model, check)?;
            print_json(&to_value(&report));
        }
        Command::Affects(AffectsCmd::Enumerate(a)) => {
            let model = load_model(&a.model)?;
            let engine = Engine::new(&model);
            let set = engine.enumerate(AffectsBounds::uniform(a.max))?;
            print_json(&to_value(&set));
        }
        Command::Affects(AffectsCmd::Classify(a)) => {
            let model = load_model(&a.model)?;
            let engine = Engine::new(&model);
            let rel = relation_from_flags(&a.x, &a.y, &a.z, &a.w)?;
            let holds = engine.affects_holds(&rel)?;
            let mut report = json!({"relation": to_value(&rel), "holds": holds});
            if holds {
                let flags = engine.classify_relation(&rel)?;
                report["irreducible"] = json!(flags.irreducible);
                report["indecreasable"] = json!(flags.indecreasable);
                report["strong"] = json!(flags.strong);
            }
            print_json(&report);
        }
        Command::Infer(InferCmd::Causes(a)) => {
            let set = load_affects(&a)?;
            print_json(&to_value(&infer_causes(&set)));
        }
        Command::Infer(InferCmd::Verify(a)) => {
            let model = load_model(&a.model)?;
            let report = verify_rules_on_model(&model, AffectsBounds::uniform(a.max))?;
            print_json(&to_value(&report));
        }
        Command::Graph(GraphCmd::PotCause(a)) => {
            let set = load_affects(&a.affects)?;
            let (graph, warnings) = build_potential_cause_graph(&set, a.extended);
            let mut v = to_value(&graph);
            v["warnings"] = json!(warnings);
            v["dot"] = json!(graph.to_dot());
            print_json(&v);
        }
        Command::Graph(GraphCmd::Loop(a)) => {
            let set = load_affects(&a.affects)?;
            let (pot, warnings) = build_potential_cause_graph(&set, a.extended);
            let graph = build_loop_graph(&pot);
            let mut v = to_value(&graph);
            v["warnings"] = json!(warnings);
            v["dot"] = json!(graph.to_dot());
            print_json(&v);
        }
        Command::Acl(AclCmd::Detect(a)) => {
            let set = load_affects(&a.graph.affects)?;
            let mode = match a.mode.as_str() {
                "loop-graph" => AclMode::LoopGraph,
                "oracle" => AclMode::Oracle,
                "both" => AclMode::Both,
                other => {
                    return Err(CliError::Validation(format!("unknown detection mode {other:?}")))
                }
            };
            let report = detect_acl(&set, mode, a.graph.extended, a.cap)?;
            print_json(&to_value(&report));
        }
        Command::Acl(AclCmd::Classify(a)) => {
            let set = load_affects(&a)?;
            print_json(&to_value(&find_affects_chains_and_classify(&set)));
        }
        Command::Poset(PosetCmd::Validate(a)) => {
            let poset = load_poset(&a)?;
            let mut v = poset.to_json();
            v["dot"] = json!(poset.hasse_dot());
            print_json(&v);
        }
        Command::Poset(PosetCmd::Classify(a)) => {
            let poset = load_poset(&a.poset)?;
            let class = poset.classify(a.max).map_err(validation)?;
            print_json(&to_value(&class));
        }
        Command::Poset(PosetCmd::Grid(a)) => {
            let grid = minkowski_grid(a.spatial, a.extent).map_err(validation)?;
            print_json(&grid.to_json());
        }
        Command::Embed(EmbedCmd::Check(a)) => {
            let set = load_affects(&a.affects)?;
            let poset = load_poset(&a.poset)?;
            let emb = Embedding::from_json_str(&read_file(&a.embedding)?)
                .map_err(|e| CliError::Validation(format!("{}: {e}", a.embedding)))?;
            let report = check_embedding(&set, &poset, &emb)?;
            print_json(&to_value(&report));
        }
        Command::Embed(EmbedCmd::Search(a)) => {
            let set = load_affects(&a.affects)?;
            let poset = load_poset(&a.poset)?;
            let mut require = SearchRequire {
                mode: CompatMode::parse(&a.mode)?,
                ..SearchRequire::default()
            };
            for req in names(&a.require) {
                match req.as_str() {
                    "support-stable" => require.support_stable = true,
                    "minimum-stable" => require.minimum_stable = true,
                    "non-degenerate" => require.non_degenerate = true,
                    "non-trivial" => require.non_trivial = true,
                    other => {
                        return Err(CliError::Validation(format!(
                            "unknown requirement {other:?}"
                        )))
                    }
                }
            }
            let found = search_embeddings(&set, &poset, require, a.cap)?;
            for emb in &found {
                print_line(&serde_json::to_string(emb).expect("serializable embedding"));
            }
            print_json(&json!({"found": found.len()}));
        }
        Command::Recipe(RecipeCmd::Run(a)) => {
            let mismatches = run_recipe(&a.name)?;
            let ok = mismatches.is_empty();
            print_json(&json!({"recipe": a.name, "ok": ok, "mismatches": mismatches}));
            if !ok {
                return Err(CliError::Validation(format!(
                    "recipe {} diverged from its frozen expectation",
                    a.name
                )));
            }
        }
    }
    Ok(())
}

/// Runs a bundled example pipeline; returns the list of divergences from
/// the frozen expectation.
fn run_recipe(name: &str) -> CliResult<Vec<String>> {
    let mut out = Vec::new();
    let mut diff = |label: &str, ok: bool| {
        if !ok {
            out.push(label.to_string());
        }
    };
    match name {
        "otp" => {
            let model = catalog::otp_model();
            let engine = Engine::new(&model);
            let set = engine.enumerate(AffectsBounds::uniform(2))?;
            let present: Vec<Relation> = set.present.iter().map(|f| f.rel.clone()).collect();
            diff("present set", present == catalog::otp_expected_present());
            for rel in catalog::otp_expected_absent() {
                diff(&format!("absence of {rel}"), set.absent.contains(&rel));
            }
        }
        "jamming" => {
            let model = catalog::jamming_model();
            let engine = Engine::new(&model);
            let set = engine.enumerate(AffectsBounds::uniform(3))?;
            let present: Vec<Relation> = set.present.iter().map(|f| f.rel.clone()).collect();
            diff("present set", present == catalog::jamming_expected_present());
        }
        "ex-iv4" => {
            let model = catalog::chain_parity_model();
            let engine = Engine::new(&model);
            let rel = |x: &[&str], y: &[&str], z: &[&str]| Relation::new(x, y, z, &[]);
            diff("C affects D", engine.affects_holds(&rel(&["C"], &["D"], &[]))?);
            diff(
                "B C jointly do not affect D",
                !engine.affects_holds(&rel(&["B", "C"], &["D"], &[]))?,
            );
            let ho = rel(&["B"], &["D"], &["C"]);
            diff("B affects D under do(C)", engine.affects_holds(&ho)?);
            let flags = engine.classify_relation(&ho)?;
            diff("strongly indecreasable", flags.indecreasable && flags.strong);
            let set = engine.enumerate(AffectsBounds::uniform(2))?;
            let causes = infer_causes(&set);
            diff(
                "C is inferred to cause D",
                causes
                    .causes
                    .iter()
                    .any(|c| c.source == "C" && c.targets.contains("D")),
            );
        }
        "ex-iv7" => {
            let model = catalog::jamming_parity_model();
            let engine = Engine::new(&model);
            let rel = |x: &[&str], y: &[&str]| Relation::new(x, y, &[], &[]);
            diff("B affects D", engine.affects_holds(&rel(&["B"], &["D"]))?);
            diff("A C affect D", engine.affects_holds(&rel(&["A", "C"], &["D"]))?);
            for (s, t) in [("A", "D"), ("C", "D"), ("B", "A"), ("B", "C")] {
                diff(
                    &format!("{s} does not affect {t}"),
                    !engine.affects_holds(&rel(&[s], &[t]))?,
                );
            }
        }
        "hcl" => {
            let model = catalog::two_cycle_model();
            let joint = model.solve_observed()?;
            let quarter = rational::rat(1, 4);
            diff(
                "uniform pair distribution",
                (0..2).all(|x| (0..2).all(|y| joint.probs.get(&vec![x, y]) == Some(&quarter))),
            );
            let engine = Engine::new(&model);
            diff(
                "X does not affect Y",
                !engine.affects_holds(&Relation::new(&["X"], &["Y"], &[], &[]))?,
            );
            diff(
                "Y does not affect X",
                !engine.affects_holds(&Relation::new(&["Y"], &["X"], &[], &[]))?,
            );
            diff(
                "contradictory cycle is inconsistent",
                matches!(
                    catalog::two_cycle_inconsistent_model().solve_observed(),
                    Err(ModelError::Inconsistent { .. })
                ),
            );
        }
        "noacl" => {
            let (pot, _) = build_potential_cause_graph(&catalog::noacl_set(), false);
            diff("empty loop graph", build_loop_graph(&pot).is_empty());
        }
        "acl3" => {
            let (pot, _) = build_potential_cause_graph(&catalog::acl3_set(), false);
            diff(
                "loop graph is the two-cycle",
                build_loop_graph(&pot) == catalog::acl3_expected_loop_graph(),
            );
        }
        "acl5" => {
            let report = check_embedding(
                &catalog::acl5_set(),
                &catalog::acl5_witness_poset(),
                &catalog::acl5_witness_embedding(),
            )?;
            diff(
                "witness embedding is compatible and non-degenerate",
                report.compat_irreducible && !report.degenerate,
            );
            diff("witness embedding is not support-stable", !report.support_stable);
            let require = SearchRequire {
                support_stable: true,
                ..SearchRequire::default()
            };
            let mut none = true;
            for n in 1..=5usize {
                for p in causal_affects_core::poset::all_posets(n) {
                    if !search_embeddings(&catalog::acl5_set(), &p, require, 1 << 40)?.is_empty() {
                        none = false;
                    }
                }
            }
            diff("no support-stable embedding on any poset up to five elements", none);
        }
        "acl6a" => {
            let (pot, _) = build_potential_cause_graph(&catalog::acl6a_set(), false);
            let lg = build_loop_graph(&pot);
            diff("nonempty loop graph", !lg.is_empty());
            diff("loop graph matches expectation", lg == catalog::acl6a_expected_loop_graph());
        }
        "acl7" => {
            let report = check_embedding(
                &catalog::acl7_set(),
                &catalog::acl7_poset(),
                &catalog::acl7_embedding(),
            )?;
            diff("compatible", report.compat_indecreasable);
            diff("support-stable", report.support_stable);
            diff("minimum-stable", report.minimum_stable);
        }
        "acl11" => {
            let (pot, _) = build_potential_cause_graph(&catalog::acl11_set(), false);
            diff(
                "loop graph matches expectation",
                build_loop_graph(&pot) == catalog::acl11_expected_loop_graph(),
            );
        }
        "acl12" => {
            let report = check_embedding(
                &catalog::acl12_set(),
                &catalog::acl12_poset(),
                &catalog::acl12_embedding(),
            )?;
            diff("compatible", report.compat_indecreasable);
            diff("support-stable", report.support_stable);
            diff("minimum-stable", report.minimum_stable);
        }
        other => {
            return Err(CliError::Validation(format!("unknown recipe {other:?}")));
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: could not configure {jobs} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
