//! Initial node representations.
//!
//! Three providers are supported: a learned embedding table per node type, a
//! title embedder (deterministic hashed token vectors combined by a learned
//! attention vector), and a hybrid that concatenates both and projects back to
//! the model width. Published dates are turned into sinusoidal offsets by
//! [`TemporalEncoding`].

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::graph::{NodeRef, TypedGraph};
use crate::numerics::rng::{derive_seed, fnv1a64, mix64, stream_rng};
use crate::numerics::{softmax_rows, Dense2D, ParameterStore, Tape, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    LearnedTable,
    TitleText,
    Hybrid,
}

impl FeatureMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "learned-table" | "learned" => Some(FeatureMode::LearnedTable),
            "title-text" | "title" => Some(FeatureMode::TitleText),
            "hybrid" => Some(FeatureMode::Hybrid),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureMode::LearnedTable => "learned-table",
            FeatureMode::TitleText => "title-text",
            FeatureMode::Hybrid => "hybrid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub mode: FeatureMode,
    pub dim: usize,
    pub token_seed: u64,
    /// Days since epoch; temporal offsets are measured from here.
    pub reference_date: i64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            mode: FeatureMode::LearnedTable,
            dim: 128,
            token_seed: 17,
            // 2020-08-01
            reference_date: 18_475,
        }
    }
}

/// Half-width of the scaled-uniform initializer.
pub fn init_bound(dim: usize) -> f64 {
    (6.0 / dim as f64).sqrt()
}

/// One `count × dim` table per node type, uniform in `±sqrt(6/dim)`.
pub fn init_embedding_table(node_counts: &[usize], dim: usize, seed: u64) -> Vec<Dense2D> {
    assert!(dim > 0, "embedding width must be positive");
    let a = init_bound(dim);
    let dist = Uniform::new_inclusive(-a, a);
    node_counts
        .iter()
        .enumerate()
        .map(|(t, &n)| {
            let mut rng = stream_rng(seed, t as u64);
            let data = (0..n * dim).map(|_| dist.sample(&mut rng)).collect();
            Dense2D::from_vec(n, dim, data).expect("consistent shape")
        })
        .collect()
}

/// Lowercased alphanumeric runs.
pub fn tokenize(title: &str) -> Vec<String> {
    title
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TitleEmbedder {
    pub dim: usize,
    pub token_seed: u64,
    pub attention_weights: Vec<f64>,
}

impl TitleEmbedder {
    pub fn new(dim: usize, token_seed: u64) -> Self {
        TitleEmbedder {
            dim,
            token_seed,
            attention_weights: vec![0.0; dim],
        }
    }

    /// Pseudo-random unit vector determined by `(token_seed, token)`.
    pub fn token_vector(&self, token: &str) -> Vec<f64> {
        token_vector(self.dim, self.token_seed, token)
    }

    /// Attention-weighted average of the title's token vectors; zero for a
    /// title without tokens.
    pub fn embed(&self, title: &str) -> Vec<f64> {
        let tokens = tokenize(title);
        if tokens.is_empty() {
            return vec![0.0; self.dim];
        }
        let vecs: Vec<Vec<f64>> = tokens.iter().map(|t| self.token_vector(t)).collect();
        let logits: Vec<f64> = vecs
            .iter()
            .map(|v| v.iter().zip(&self.attention_weights).map(|(a, b)| a * b).sum())
            .collect();
        let w = softmax_rows(&Dense2D::row_vector(&logits));
        let mut out = vec![0.0; self.dim];
        for (v, &wi) in vecs.iter().zip(w.data()) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += wi * x;
            }
        }
        out
    }
}

fn token_vector(dim: usize, token_seed: u64, token: &str) -> Vec<f64> {
    let key = mix64(token_seed ^ fnv1a64(token.as_bytes()));
    let mut rng = stream_rng(key, 0);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalEncoding {
    dim: usize,
    reference_date: i64,
    scale_base: f64,
}

impl TemporalEncoding {
    pub fn new(dim: usize, reference_date: i64) -> Result<Self> {
        Self::with_base(dim, reference_date, 10_000.0)
    }

    pub fn with_base(dim: usize, reference_date: i64, scale_base: f64) -> Result<Self> {
        if dim % 2 != 0 {
            return Err(Error::OddDim(dim));
        }
        Ok(TemporalEncoding {
            dim,
            reference_date,
            scale_base,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reference_date(&self) -> i64 {
        self.reference_date
    }

    /// Pair `k` holds `(sin(Δ / base^(2k/dim)), cos(Δ / base^(2k/dim)))`
    /// with `Δ = date − reference_date`.
    pub fn encode(&self, date: i64) -> Vec<f64> {
        let delta = (date - self.reference_date) as f64;
        let mut out = Vec::with_capacity(self.dim);
        for k in 0..self.dim / 2 {
            let freq = self.scale_base.powf(2.0 * k as f64 / self.dim as f64);
            let angle = delta / freq;
            out.push(angle.sin());
            out.push(angle.cos());
        }
        out
    }

    /// Encoding for every node of a type that carries dates; zero rows for
    /// undated types. Dated-type nodes without a date sit at the reference.
    pub fn node_matrix(&self, g: &TypedGraph) -> Dense2D {
        let n = g.total_nodes();
        let mut out = Dense2D::zeros(n, self.dim);
        for t in 0..g.schema().num_node_types() {
            let count = g.node_count(t);
            let dated = (0..count).any(|i| g.attributes(NodeRef::new(t, i)).published_date.is_some());
            if !dated {
                continue;
            }
            for i in 0..count {
                let node = NodeRef::new(t, i);
                let date = g.attributes(node).published_date.unwrap_or(self.reference_date);
                out.row_mut(g.global_id(node)).copy_from_slice(&self.encode(date));
            }
        }
        out
    }
}

/// Resolves every node of a graph to one vector of width `dim`, and
/// registers the parameters that requires.
#[derive(Debug, Clone)]
pub struct FeatureProvider {
    cfg: FeatureConfig,
    table_names: Vec<String>,
    total_nodes: usize,
    /// Global ids of nodes whose title has at least one token.
    titled: Vec<usize>,
    /// One row per token occurrence across all titles.
    token_matrix: Dense2D,
    /// For each token row, its index into `titled`.
    token_owner: Vec<usize>,
}

pub const TITLE_ATTENTION: &str = "title.attention";
pub const HYBRID_PROJECTION: &str = "features.proj";

/// Node attributes laid out as a short sequence, for recurrent content
/// encoders.
#[derive(Debug, Clone)]
pub struct AttributeSequence {
    pub first: Var,
    /// Second element and the global rows that have one.
    pub second: Option<(Var, Vec<usize>)>,
}

impl FeatureProvider {
    pub fn new(g: &TypedGraph, cfg: FeatureConfig) -> Self {
        let table_names = g
            .schema()
            .node_types()
            .iter()
            .map(|t| format!("emb.{t}"))
            .collect();
        let mut titled = Vec::new();
        let mut rows = Vec::new();
        let mut owner = Vec::new();
        for gid in 0..g.total_nodes() {
            let Some(title) = &g.attributes(g.node_at(gid)).title else { continue };
            let tokens = tokenize(title);
            if tokens.is_empty() {
                continue;
            }
            for tok in &tokens {
                rows.extend(token_vector(cfg.dim, cfg.token_seed, tok));
                owner.push(titled.len());
            }
            titled.push(gid);
        }
        let token_matrix = Dense2D::from_vec(owner.len(), cfg.dim, rows).expect("consistent shape");
        FeatureProvider {
            cfg,
            table_names,
            total_nodes: g.total_nodes(),
            titled,
            token_matrix,
            token_owner: owner,
        }
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.cfg
    }

    pub fn dim(&self) -> usize {
        self.cfg.dim
    }

    pub fn mode(&self) -> FeatureMode {
        self.cfg.mode
    }

    pub fn titled_nodes(&self) -> &[usize] {
        &self.titled
    }

    pub fn register_params(&self, g: &TypedGraph, store: &mut ParameterStore, seed: u64) {
        let dim = self.cfg.dim;
        let tables = init_embedding_table(&g.node_counts(), dim, derive_seed(seed, "embedding"));
        for (name, table) in self.table_names.iter().zip(tables) {
            store.insert(name, table);
        }
        if self.cfg.mode != FeatureMode::LearnedTable {
            let a = init_bound(dim);
            let mut rng = stream_rng(derive_seed(seed, "title-attention"), 0);
            let data = (0..dim).map(|_| rng.gen_range(-a..=a)).collect();
            store.insert(TITLE_ATTENTION, Dense2D::from_vec(dim, 1, data).expect("shape"));
        }
        if self.cfg.mode == FeatureMode::Hybrid {
            store.insert(
                HYBRID_PROJECTION,
                glorot(2 * dim, dim, derive_seed(seed, "hybrid-projection")),
            );
        }
    }

    /// All learned table rows stacked in global node order.
    pub fn learned(&self, tape: &mut Tape, store: &ParameterStore) -> Var {
        let parts: Vec<Var> = self
            .table_names
            .iter()
            .map(|name| tape.param(store, name))
            .collect();
        tape.concat_rows(&parts)
    }

    /// One attention-pooled title vector per titled node (`titled × dim`).
    fn pooled_titles(&self, tape: &mut Tape, store: &ParameterStore) -> Var {
        let tokens = tape.constant(self.token_matrix.clone());
        let attention = tape.param(store, TITLE_ATTENTION);
        let logits = tape.matmul(tokens, attention);
        let weights = tape.segment_softmax(logits, &self.token_owner, self.titled.len());
        let weighted = tape.scale_blocks(tokens, weights);
        tape.scatter_add_rows(weighted, &self.token_owner, self.titled.len())
    }

    /// Title vectors in global order; zero rows for nodes without a title.
    pub fn title_vectors(&self, tape: &mut Tape, store: &ParameterStore) -> Var {
        let pooled = self.pooled_titles(tape, store);
        tape.scatter_add_rows(pooled, &self.titled, self.total_nodes)
    }

    /// Title vector where one exists, learned row otherwise.
    fn title_or_learned(&self, tape: &mut Tape, store: &ParameterStore) -> Var {
        let learned = self.learned(tape, store);
        if self.titled.is_empty() {
            return learned;
        }
        let pooled = self.pooled_titles(tape, store);
        tape.overwrite_rows(learned, &self.titled, pooled)
    }

    /// One vector per node (`total_nodes × dim`).
    pub fn vectors(&self, tape: &mut Tape, store: &ParameterStore) -> Var {
        match self.cfg.mode {
            FeatureMode::LearnedTable => self.learned(tape, store),
            FeatureMode::TitleText => self.title_or_learned(tape, store),
            FeatureMode::Hybrid => {
                let titles = self.title_vectors(tape, store);
                let learned = self.learned(tape, store);
                let both = tape.concat_cols(&[titles, learned]);
                let proj = tape.param(store, HYBRID_PROJECTION);
                tape.matmul(both, proj)
            }
        }
    }

    /// Attribute sequence per node: (title, learned) for titled nodes in
    /// hybrid mode, otherwise a single element.
    pub fn sequence(&self, tape: &mut Tape, store: &ParameterStore) -> AttributeSequence {
        match self.cfg.mode {
            FeatureMode::LearnedTable => AttributeSequence {
                first: self.learned(tape, store),
                second: None,
            },
            FeatureMode::TitleText => AttributeSequence {
                first: self.title_or_learned(tape, store),
                second: None,
            },
            FeatureMode::Hybrid => {
                let first = self.title_or_learned(tape, store);
                let learned = self.learned(tape, store);
                let second = (!self.titled.is_empty()).then(|| (learned, self.titled.clone()));
                AttributeSequence { first, second }
            }
        }
    }
}

/// Uniform in `±sqrt(6 / (fan_in + fan_out))`.
pub fn glorot(rows: usize, cols: usize, seed: u64) -> Dense2D {
    let a = (6.0 / (rows + cols) as f64).sqrt();
    let mut rng = stream_rng(seed, 0);
    let data = (0..rows * cols).map(|_| rng.gen_range(-a..=a)).collect();
    Dense2D::from_vec(rows, cols, data).expect("consistent shape")
}
