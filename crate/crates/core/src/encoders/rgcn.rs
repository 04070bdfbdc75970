//! Single-layer relational graph convolution:
//! `h_i = ReLU( Σ_r Σ_{j ∈ N_i^r} W_r x_j / c_{i,r} + W_0 x_i )`.
//!
//! In training mode edges are dropped before `c_{i,r}` is counted, so the
//! normalization reflects only retained edges.

use super::{DropoutKey, Mode};
use crate::error::{Error, Result};
use crate::features::glorot;
use crate::graph::TypedGraph;
use crate::numerics::rng::derive_seed;
use crate::numerics::{dropout_mask, Dense2D, ParameterStore, Tape, Var};

pub const SELF_LOOP: &str = "rgcn.w0";

#[derive(Debug, Clone, PartialEq)]
pub struct RgcnParams {
    pub dim: usize,
    pub dropout_rate: f64,
    relation_weights: Vec<String>,
}

impl RgcnParams {
    pub fn new(g: &TypedGraph, dim: usize, dropout_rate: f64) -> Result<Self> {
        if !g.schema().is_augmented() {
            return Err(Error::NotAugmented);
        }
        if !(0.0..1.0).contains(&dropout_rate) {
            return Err(Error::BadRate(dropout_rate));
        }
        let relation_weights = g
            .schema()
            .relation_types()
            .iter()
            .map(|r| format!("rgcn.w.{r}"))
            .collect();
        Ok(RgcnParams {
            dim,
            dropout_rate,
            relation_weights,
        })
    }

    pub fn relation_weight(&self, relation: usize) -> &str {
        &self.relation_weights[relation]
    }

    pub fn register(&self, store: &mut ParameterStore, seed: u64) {
        for name in &self.relation_weights {
            store.insert(name, glorot(self.dim, self.dim, derive_seed(seed, name)));
        }
        store.insert(SELF_LOOP, glorot(self.dim, self.dim, derive_seed(seed, SELF_LOOP)));
    }
}

/// Retained `(source, target)` global ids per relation.
pub(crate) fn retained_edges(
    g: &TypedGraph,
    rate: f64,
    mode: Mode,
    key: DropoutKey,
) -> Result<Vec<Vec<(usize, usize)>>> {
    let keep = match mode {
        Mode::Training if rate > 0.0 => dropout_mask(g.num_triples(), rate, key.seed, key.epoch)?,
        _ => vec![true; g.num_triples()],
    };
    let mut per_relation = vec![Vec::new(); g.schema().num_relations()];
    for (t, kept) in g.triples().iter().zip(keep) {
        if kept {
            per_relation[t.relation].push((g.global_id(t.head), g.global_id(t.tail)));
        }
    }
    Ok(per_relation)
}

pub fn rgcn_forward(
    tape: &mut Tape,
    store: &ParameterStore,
    g: &TypedGraph,
    x: Var,
    p: &RgcnParams,
    mode: Mode,
    key: DropoutKey,
) -> Result<Var> {
    if !g.schema().is_augmented() {
        return Err(Error::NotAugmented);
    }
    let n = g.total_nodes();
    if tape.shape(x) != (n, p.dim) {
        return Err(Error::ShapeMismatch {
            op: "rgcn_forward",
            left: tape.shape(x),
            right: (n, p.dim),
        });
    }
    let edges = retained_edges(g, p.dropout_rate, mode, key)?;
    let w0 = tape.param(store, SELF_LOOP);
    let mut total = tape.matmul(x, w0);
    for (r, rel_edges) in edges.iter().enumerate() {
        if rel_edges.is_empty() {
            continue;
        }
        let mut in_degree = vec![0usize; n];
        for &(_, dst) in rel_edges {
            in_degree[dst] += 1;
        }
        let targets: Vec<usize> = (0..n).filter(|&i| in_degree[i] > 0).collect();
        let mut compact = vec![usize::MAX; n];
        for (k, &i) in targets.iter().enumerate() {
            compact[i] = k;
        }
        let src: Vec<usize> = rel_edges.iter().map(|e| e.0).collect();
        let dst: Vec<usize> = rel_edges.iter().map(|e| compact[e.1]).collect();
        let norm: Vec<f64> = rel_edges.iter().map(|e| 1.0 / in_degree[e.1] as f64).collect();

        let messages = tape.gather_rows(x, &src);
        let norm = tape.constant(Dense2D::from_vec(norm.len(), 1, norm).expect("column"));
        let scaled = tape.scale_blocks(messages, norm);
        let aggregated = tape.scatter_add_rows(scaled, &dst, targets.len());
        let w = tape.param(store, p.relation_weight(r));
        let projected = tape.matmul(aggregated, w);
        let spread = tape.scatter_add_rows(projected, &targets, n);
        total = tape.add(total, spread);
    }
    Ok(tape.relu(total))
}
