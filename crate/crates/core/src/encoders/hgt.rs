//! One typed-attention transformer layer with residual connection.
//!
//! For an edge `(j, r, i)` and head `h`:
//! `logit = <(K_τ(j) s_j · W_att_r)_h, (Q_τ(i) x_i)_h> · μ_r / sqrt(head_width)`
//! where `s_j = x_j + temporal(date_j)` for dated node types. Attention is
//! normalized per head over all incoming edges of `i`; messages are
//! `(V_τ(j) s_j · W_msg_r)_h`; the output is `A_τ(i) · concat_h(Σ att·msg) + x_i`.

use super::rgcn::retained_edges;
use super::{DropoutKey, Mode};
use crate::error::{Error, Result};
use crate::features::{glorot, FeatureProvider, TemporalEncoding};
use crate::graph::TypedGraph;
use crate::numerics::rng::derive_seed;
use crate::numerics::{Dense2D, ParameterStore, Tape, Var};

const PROJECTIONS: [&str; 4] = ["k", "q", "v", "a"];

#[derive(Debug, Clone, PartialEq)]
pub struct HgtParams {
    pub dim: usize,
    pub heads: usize,
    pub dropout_rate: f64,
    pub temporal: TemporalEncoding,
    node_types: Vec<String>,
    relations: Vec<String>,
}

impl HgtParams {
    pub fn new(
        g: &TypedGraph,
        dim: usize,
        heads: usize,
        dropout_rate: f64,
        temporal: TemporalEncoding,
    ) -> Result<Self> {
        if !g.schema().is_augmented() {
            return Err(Error::NotAugmented);
        }
        if heads == 0 || dim % heads != 0 {
            return Err(Error::HeadWidth { dim, heads });
        }
        if temporal.dim() != dim {
            return Err(Error::ShapeMismatch {
                op: "hgt temporal width",
                left: (1, temporal.dim()),
                right: (1, dim),
            });
        }
        if !(0.0..1.0).contains(&dropout_rate) {
            return Err(Error::BadRate(dropout_rate));
        }
        Ok(HgtParams {
            dim,
            heads,
            dropout_rate,
            temporal,
            node_types: g.schema().node_types().to_vec(),
            relations: g.schema().relation_types().to_vec(),
        })
    }

    pub fn head_width(&self) -> usize {
        self.dim / self.heads
    }

    fn projection(&self, kind: &str, node_type: usize) -> String {
        format!("hgt.{kind}.{}", self.node_types[node_type])
    }

    fn relation_param(&self, kind: &str, relation: usize) -> String {
        format!("hgt.{kind}.{}", self.relations[relation])
    }

    pub fn register(&self, store: &mut ParameterStore, seed: u64) {
        for kind in PROJECTIONS {
            for t in 0..self.node_types.len() {
                let name = self.projection(kind, t);
                store.insert(&name, glorot(self.dim, self.dim, derive_seed(seed, &name)));
            }
        }
        for r in 0..self.relations.len() {
            for kind in ["att", "msg"] {
                let name = self.relation_param(kind, r);
                store.insert(&name, glorot(self.dim, self.dim, derive_seed(seed, &name)));
            }
            store.insert(&self.relation_param("mu", r), Dense2D::filled(1, 1, 1.0));
        }
    }
}

#[derive(Debug, Clone)]
pub struct HgtTrace {
    pub output: Var,
    /// `edges × heads` attention weights, `None` when the graph has no
    /// retained edges.
    pub attention: Option<Var>,
    pub edge_target: Vec<usize>,
}

/// Per-node-type projection of a `total_nodes × dim` matrix.
fn typed_linear(tape: &mut Tape, store: &ParameterStore, g: &TypedGraph, p: &HgtParams, x: Var, kind: &str) -> Var {
    let mut parts = Vec::new();
    for t in 0..p.node_types.len() {
        let count = g.node_count(t);
        if count == 0 {
            continue;
        }
        let rows = tape.slice_rows(x, g.offset(t), count);
        let w = tape.param(store, &p.projection(kind, t));
        parts.push(tape.matmul(rows, w));
    }
    tape.concat_rows(&parts)
}

/// Per-relation right multiplication of edge rows grouped contiguously by
/// relation.
fn relation_linear(
    tape: &mut Tape,
    store: &ParameterStore,
    p: &HgtParams,
    rows: Var,
    groups: &[(usize, usize, usize)],
    kind: &str,
) -> Var {
    let parts: Vec<Var> = groups
        .iter()
        .map(|&(r, start, len)| {
            let slice = tape.slice_rows(rows, start, len);
            let w = tape.param(store, &p.relation_param(kind, r));
            tape.matmul(slice, w)
        })
        .collect();
    tape.concat_rows(&parts)
}

pub fn hgt_forward(
    tape: &mut Tape,
    store: &ParameterStore,
    g: &TypedGraph,
    features: &FeatureProvider,
    p: &HgtParams,
    mode: Mode,
    key: DropoutKey,
) -> Result<Var> {
    let x = features.vectors(tape, store);
    Ok(hgt_layer(tape, store, g, x, p, mode, key)?.output)
}

/// The layer applied to precomputed node inputs `x`.
pub fn hgt_layer(
    tape: &mut Tape,
    store: &ParameterStore,
    g: &TypedGraph,
    x: Var,
    p: &HgtParams,
    mode: Mode,
    key: DropoutKey,
) -> Result<HgtTrace> {
    if !g.schema().is_augmented() {
        return Err(Error::NotAugmented);
    }
    if p.heads == 0 || p.dim % p.heads != 0 {
        return Err(Error::HeadWidth {
            dim: p.dim,
            heads: p.heads,
        });
    }
    let n = g.total_nodes();
    if tape.shape(x) != (n, p.dim) {
        return Err(Error::ShapeMismatch {
            op: "hgt_forward",
            left: tape.shape(x),
            right: (n, p.dim),
        });
    }
    let edges = retained_edges(g, p.dropout_rate, mode, key)?;
    let mut src = Vec::new();
    let mut dst = Vec::new();
    let mut rel = Vec::new();
    let mut groups = Vec::new();
    for (r, list) in edges.iter().enumerate() {
        if list.is_empty() {
            continue;
        }
        groups.push((r, src.len(), list.len()));
        for &(s, d) in list {
            src.push(s);
            dst.push(d);
            rel.push(r);
        }
    }
    if src.is_empty() {
        return Ok(HgtTrace {
            output: x,
            attention: None,
            edge_target: dst,
        });
    }

    let temporal = tape.constant(p.temporal.node_matrix(g));
    let source = tape.add(x, temporal);
    let keys = typed_linear(tape, store, g, p, source, "k");
    let queries = typed_linear(tape, store, g, p, x, "q");
    let values = typed_linear(tape, store, g, p, source, "v");

    let edge_keys = tape.gather_rows(keys, &src);
    let edge_keys = relation_linear(tape, store, p, edge_keys, &groups, "att");
    let edge_queries = tape.gather_rows(queries, &dst);
    let logits = tape.block_dot(edge_keys, edge_queries, p.heads);

    let mu_parts: Vec<Var> = (0..p.relations.len())
        .map(|r| tape.param(store, &p.relation_param("mu", r)))
        .collect();
    let mu_all = tape.concat_rows(&mu_parts);
    let mu = tape.gather_rows(mu_all, &rel);
    let logits = tape.scale_blocks(logits, mu);
    let logits = tape.affine(logits, 1.0 / (p.head_width() as f64).sqrt(), 0.0);
    let attention = tape.segment_softmax(logits, &dst, n);

    let edge_values = tape.gather_rows(values, &src);
    let messages = relation_linear(tape, store, p, edge_values, &groups, "msg");
    let weighted = tape.scale_blocks(messages, attention);
    let aggregated = tape.scatter_add_rows(weighted, &dst, n);
    let projected = typed_linear(tape, store, g, p, aggregated, "a");
    let output = tape.add(projected, x);
    Ok(HgtTrace {
        output,
        attention: Some(attention),
        edge_target: dst,
    })
}
