//! The `newsgraph` pipeline: generate a graph, train a model on it,
//! evaluate the model, check gradients, print graph statistics.
//!
//! Every command that writes files also writes `<out>/<command>.manifest`.

pub mod config;
pub mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use newsgraph::encoders::ModelKind;
use newsgraph::eval::{evaluate, format_rank_dump, format_reports, split_edges, MetricsReport};
use newsgraph::features::FeatureProvider;
use newsgraph::fixtures::check_model_gradients;
use newsgraph::graph::{load_graph, write_attributes, write_edge_list, Direction, GraphSchema, Triple, TypedGraph};
use newsgraph::numerics::{load_snapshot_into, write_snapshot, INDEX_FILE};
use newsgraph::numerics::GradCheckReport;
use newsgraph::scoring::{format_trace, train, Model};
use newsgraph::synth::generate;
use newsgraph::{Error, ErrorCategory, Result};

pub use config::{ConfigFile, RunConfig};
pub use manifest::{digest, file_digest, write_atomic, RunManifest};

/// Gradient checks pass below this relative error.
pub const GRADCHECK_TOLERANCE: f64 = 1e-4;

pub const EDGES_FILE: &str = "edges.tsv";
pub const ATTRIBUTES_FILE: &str = "attributes.tsv";
pub const SNAPSHOT_DIR: &str = "snapshot";
pub const MODEL_META_FILE: &str = "model.meta";
pub const TRACE_FILE: &str = "loss_trace.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const RANKS_FILE: &str = "ranks.csv";

pub fn exit_code(e: &Error) -> i32 {
    match e.category() {
        ErrorCategory::Config => 2,
        ErrorCategory::Data => 3,
        ErrorCategory::Numeric => 4,
    }
}

/// What a command read and wrote, for the manifest.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<(String, u64)>,
    /// Text for standard output.
    pub report: String,
}

/// Runs `body` and writes `<out>/<command>.manifest` after it succeeds.
pub fn with_manifest(
    command: &str,
    cfg: &RunConfig,
    out: &Path,
    body: impl FnOnce() -> Result<Outcome>,
) -> Result<Outcome> {
    let start = Instant::now();
    fs::create_dir_all(out)?;
    let outcome = body()?;
    let mut m = RunManifest::new(command, cfg.to_config_string());
    for p in &outcome.inputs {
        m.add_input(p)?;
    }
    m.seeds = outcome.seeds.clone();
    m.outputs = outcome.outputs.clone();
    m.duration = start.elapsed();
    m.write(&out.join(format!("{command}.manifest")))?;
    Ok(outcome)
}

fn graph_inputs(cfg: &RunConfig) -> Result<(PathBuf, Option<PathBuf>)> {
    let edges = cfg.graph.edges.clone().ok_or_else(|| Error::InvalidConfig {
        key: "graph.edges".into(),
        msg: "no edge file configured".into(),
    })?;
    Ok((edges, cfg.graph.attributes.clone()))
}

/// Loads the configured graph; returns it with the files read.
pub fn load_configured_graph(cfg: &RunConfig) -> Result<(TypedGraph, Vec<PathBuf>)> {
    let (edges, attrs) = graph_inputs(cfg)?;
    let g = load_graph(&edges, attrs.as_deref(), GraphSchema::scientific_news())?;
    let mut files = vec![edges];
    files.extend(attrs);
    Ok((g, files))
}

/// Training graph and test triples. Without a holdout both are the full graph.
pub fn split(cfg: &RunConfig, g: &TypedGraph) -> Result<(TypedGraph, Vec<Triple>)> {
    if cfg.split.holdout {
        split_edges(g, &cfg.split.spec)
    } else {
        Ok((g.clone(), g.triples().to_vec()))
    }
}

fn build_model(cfg: &RunConfig, train_aug: &TypedGraph) -> Result<Model> {
    let features = FeatureProvider::new(train_aug, cfg.features.clone());
    Model::new(train_aug, &cfg.train, features)
}

pub fn cmd_generate(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let g = generate(&cfg.synth)?;
    fs::create_dir_all(out)?;
    let (edges, attrs) = (out.join(EDGES_FILE), out.join(ATTRIBUTES_FILE));
    let mut buf = Vec::new();
    write_edge_list(&g, &mut buf)?;
    write_atomic(&edges, &buf)?;
    buf.clear();
    write_attributes(&g, &mut buf)?;
    write_atomic(&attrs, &buf)?;
    Ok(Outcome {
        report: format_stats(&g),
        outputs: vec![edges, attrs],
        seeds: vec![("synth".into(), cfg.synth.seed)],
        ..Outcome::default()
    })
}

/// Node and edge totals, per-type and per-relation counts, then degree
/// summaries as tab-separated rows.
pub fn format_stats(g: &TypedGraph) -> String {
    let s = g.schema();
    let mut o = format!("nodes\t{}\nedges\t{}\n", g.total_nodes(), g.num_triples());
    for (t, name) in s.node_types().iter().enumerate() {
        o.push_str(&format!("nodes.{name}\t{}\n", g.node_count(t)));
    }
    for (r, name) in s.relation_types().iter().enumerate() {
        o.push_str(&format!("edges.{name}\t{}\n", g.relation_count(r)));
    }
    o.push_str("# degree\tnode_type\trelation\tdirection\tmin\tmax\tmean\n");
    for d in g.degree_stats() {
        let dir = match d.direction {
            Direction::Forward => "out",
            Direction::Inverse => "in",
        };
        o.push_str(&format!(
            "degree\t{}\t{}\t{dir}\t{}\t{}\t{:.4}\n",
            s.node_types()[d.node_type],
            s.relation_types()[d.relation],
            d.min,
            d.max,
            d.mean
        ));
    }
    o
}

pub fn cmd_stats(cfg: &RunConfig) -> Result<Outcome> {
    let (g, inputs) = load_configured_graph(cfg)?;
    Ok(Outcome {
        report: format_stats(&g),
        inputs,
        ..Outcome::default()
    })
}

fn model_meta(cfg: &RunConfig) -> String {
    format!(
        "model = {}\ndim = {}\nfeatures = {}\n",
        cfg.train.model_kind,
        cfg.train.dim,
        cfg.features.mode.as_str()
    )
}

pub fn cmd_train(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let (g, inputs) = load_configured_graph(cfg)?;
    let (train_g, _) = split(cfg, &g)?;
    let train_aug = train_g.augment_with_inverses()?;
    let features = FeatureProvider::new(&train_aug, cfg.features.clone());
    let (_, store, trace) = train(&train_aug, &cfg.train, features)?;
    let snapshot = out.join(SNAPSHOT_DIR);
    write_snapshot(&store, &snapshot)?;
    write_atomic(&snapshot.join(MODEL_META_FILE), model_meta(cfg).as_bytes())?;
    let trace_file = out.join(TRACE_FILE);
    write_atomic(&trace_file, format_trace(&trace).as_bytes())?;
    let report = match (trace.first(), trace.last()) {
        (Some(a), Some(b)) => format!("epochs {} first_loss {:.6} final_loss {:.6}\n", trace.len(), a.loss, b.loss),
        _ => "epochs 0\n".to_string(),
    };
    Ok(Outcome {
        inputs,
        outputs: vec![snapshot, trace_file],
        seeds: vec![("train".into(), cfg.train.seed), ("split".into(), cfg.split.spec.seed)],
        report,
    })
}

fn check_meta(cfg: &RunConfig, snapshot: &Path) -> Result<()> {
    let found = fs::read_to_string(snapshot.join(MODEL_META_FILE))
        .map_err(|e| Error::Snapshot(format!("{}: {e}", snapshot.join(MODEL_META_FILE).display())))?;
    let expected = model_meta(cfg);
    for (want, got) in expected.lines().zip(found.lines()) {
        if want != got {
            let key = match want.split(" =").next() {
                Some("model") => "train.model",
                Some("dim") => "train.dim",
                _ => "features.mode",
            };
            return Err(Error::InvalidConfig {
                key: key.into(),
                msg: format!("snapshot was trained with `{got}`, config has `{want}`"),
            });
        }
    }
    Ok(())
}

/// Scores the held-out triples with a trained snapshot.
pub fn evaluate_snapshot(cfg: &RunConfig, snapshot: &Path) -> Result<(Vec<MetricsReport>, TypedGraph, Vec<PathBuf>)> {
    check_meta(cfg, snapshot)?;
    let (g, mut inputs) = load_configured_graph(cfg)?;
    let (train_g, test) = split(cfg, &g)?;
    let train_aug = train_g.augment_with_inverses()?;
    let model = build_model(cfg, &train_aug)?;
    let mut store = model.init_params(&train_aug);
    load_snapshot_into(&mut store, snapshot)?;
    let scorer = model.scorer(&store, &train_aug)?;
    let reports = cfg
        .eval
        .use_cases
        .iter()
        .map(|&uc| evaluate(&g, &test, &scorer, uc, cfg.eval.directions, cfg.train.model_kind.as_str()))
        .collect::<Result<Vec<_>>>()?;
    inputs.push(snapshot.join(INDEX_FILE));
    Ok((reports, g, inputs))
}

pub fn cmd_eval(cfg: &RunConfig, snapshot: &Path, out: &Path) -> Result<Outcome> {
    let (reports, g, inputs) = evaluate_snapshot(cfg, snapshot)?;
    fs::create_dir_all(out)?;
    let text = format_reports(&reports);
    let (metrics, ranks) = (out.join(METRICS_FILE), out.join(RANKS_FILE));
    write_atomic(&metrics, text.as_bytes())?;
    write_atomic(&ranks, format_rank_dump(&g, &reports).as_bytes())?;
    Ok(Outcome {
        inputs,
        outputs: vec![metrics, ranks],
        seeds: vec![("train".into(), cfg.train.seed), ("split".into(), cfg.split.spec.seed)],
        report: text,
    })
}

pub fn cmd_gradcheck(kind: ModelKind, dim: usize, seed: u64) -> Result<GradCheckReport> {
    check_model_gradients(kind, dim, seed)
}
