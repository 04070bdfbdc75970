//! Content-aware typed-neighbor aggregation.
//!
//! 1. A gated recurrent pass over each node's attribute sequence gives its
//!    content embedding `c_v`.
//! 2. For every node type, neighbors sampled by random walk with restart are
//!    fed (ascending local id) through that type's recurrent cell; the final
//!    state is `f_t(v)`.
//! 3. `out_v = α_self·c_v + Σ_t α_t·f_t(v)` with
//!    `α ∝ exp(LeakyReLU(u · [c_v ‖ f]))` over `{self}` and the types present.

use rand::Rng;

use super::gru;
use crate::error::{Error, Result};
use crate::features::{glorot, FeatureProvider};
use crate::graph::TypedGraph;
use crate::numerics::rng::{derive_seed, stream_rng};
use crate::numerics::{Dense2D, ParameterStore, Tape, Var};

pub const CONTENT_CELL: &str = "hetgnn.content";
pub const TYPE_ATTENTION: &str = "hetgnn.u";
const LEAKY_SLOPE: f64 = 0.2;

/// Sampled neighbors: `sets[t][v]` lists global ids of type `t` for global
/// node `v`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborSets {
    sets: Vec<Vec<Vec<usize>>>,
}

impl NeighborSets {
    pub fn from_sets(sets: Vec<Vec<Vec<usize>>>) -> Self {
        NeighborSets { sets }
    }

    pub fn of(&self, node_type: usize, node: usize) -> &[usize] {
        &self.sets[node_type][node]
    }

    pub fn num_types(&self) -> usize {
        self.sets.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.sets.first().map_or(0, Vec::len)
    }

    /// Relabels through `perm` (old global id → new global id).
    pub fn permuted(&self, perm: &[usize]) -> NeighborSets {
        let sets = self
            .sets
            .iter()
            .map(|per_node| {
                let mut out = vec![Vec::new(); per_node.len()];
                for (old, list) in per_node.iter().enumerate() {
                    let mut mapped: Vec<usize> = list.iter().map(|&u| perm[u]).collect();
                    mapped.sort_unstable();
                    out[perm[old]] = mapped;
                }
                out
            })
            .collect();
        NeighborSets { sets }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwrConfig {
    pub restart: f64,
    pub walk_length: usize,
    /// Per-type neighbor budget.
    pub samples: usize,
}

impl Default for RwrConfig {
    fn default() -> Self {
        RwrConfig {
            restart: 0.5,
            walk_length: 20,
            samples: 10,
        }
    }
}

/// Random walk with restart from every node over the undirected view of
/// `g`; keeps the `samples` most visited nodes of each type (ties to the
/// lower id).
pub fn sample_rwr_neighbors(g: &TypedGraph, cfg: &RwrConfig, seed: u64) -> NeighborSets {
    let n = g.total_nodes();
    let types = g.global_types();
    let mut adj = vec![Vec::new(); n];
    for t in g.triples() {
        let (h, tl) = (g.global_id(t.head), g.global_id(t.tail));
        adj[h].push(tl);
        adj[tl].push(h);
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let num_types = g.schema().num_node_types();
    let mut sets = vec![vec![Vec::new(); n]; num_types];
    let mut counts = vec![0usize; n];
    let mut touched = Vec::new();
    for v in 0..n {
        let mut rng = stream_rng(seed, v as u64);
        let mut cur = v;
        for _ in 0..cfg.walk_length {
            if adj[cur].is_empty() || rng.gen::<f64>() < cfg.restart {
                cur = v;
                if adj[v].is_empty() {
                    break;
                }
                continue;
            }
            cur = adj[cur][rng.gen_range(0..adj[cur].len())];
            if cur != v {
                if counts[cur] == 0 {
                    touched.push(cur);
                }
                counts[cur] += 1;
            }
        }
        touched.sort_unstable_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
        for &u in &touched {
            let list = &mut sets[types[u]][v];
            if list.len() < cfg.samples {
                list.push(u);
            }
        }
        for t in 0..num_types {
            sets[t][v].sort_unstable();
        }
        for &u in &touched {
            counts[u] = 0;
        }
        touched.clear();
    }
    NeighborSets { sets }
}

/// Exhaustive one-hop neighbor sets (budget permitting), used where sampling
/// must be deterministic in structure.
pub fn one_hop_neighbors(g: &TypedGraph, samples: usize) -> NeighborSets {
    let n = g.total_nodes();
    let types = g.global_types();
    let num_types = g.schema().num_node_types();
    let mut sets = vec![vec![Vec::new(); n]; num_types];
    for t in g.triples() {
        let (h, tl) = (g.global_id(t.head), g.global_id(t.tail));
        sets[types[tl]][h].push(tl);
        sets[types[h]][tl].push(h);
    }
    for per_node in sets.iter_mut() {
        for list in per_node.iter_mut() {
            list.sort_unstable();
            list.dedup();
            list.truncate(samples);
        }
    }
    NeighborSets { sets }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HetGnnParams {
    pub dim: usize,
    pub rwr: RwrConfig,
    pub neighbors: NeighborSets,
    type_cells: Vec<String>,
}

impl HetGnnParams {
    pub fn new(g: &TypedGraph, dim: usize, rwr: RwrConfig, seed: u64) -> Self {
        let neighbors = sample_rwr_neighbors(g, &rwr, derive_seed(seed, "rwr"));
        Self::with_neighbors(g, dim, rwr, neighbors)
    }

    pub fn with_neighbors(g: &TypedGraph, dim: usize, rwr: RwrConfig, neighbors: NeighborSets) -> Self {
        let type_cells = g
            .schema()
            .node_types()
            .iter()
            .map(|t| format!("hetgnn.nbr.{t}"))
            .collect();
        HetGnnParams {
            dim,
            rwr,
            neighbors,
            type_cells,
        }
    }

    pub fn register(&self, store: &mut ParameterStore, seed: u64) {
        gru::register(store, CONTENT_CELL, self.dim, seed);
        for cell in &self.type_cells {
            gru::register(store, cell, self.dim, seed);
        }
        store.insert(
            TYPE_ATTENTION,
            glorot(2 * self.dim, 1, derive_seed(seed, TYPE_ATTENTION)),
        );
    }
}

/// Embeddings plus the type-attention weights that produced them.
#[derive(Debug, Clone)]
pub struct HetGnnTrace {
    pub output: Var,
    /// `entries × 1` attention weights.
    pub attention: Var,
    /// Owning node of each attention entry.
    pub entry_node: Vec<usize>,
}

pub fn hetgnn_forward(
    tape: &mut Tape,
    store: &ParameterStore,
    g: &TypedGraph,
    features: &FeatureProvider,
    p: &HetGnnParams,
) -> Result<Var> {
    Ok(hetgnn_forward_traced(tape, store, g, features, p)?.output)
}

pub fn hetgnn_forward_traced(
    tape: &mut Tape,
    store: &ParameterStore,
    g: &TypedGraph,
    features: &FeatureProvider,
    p: &HetGnnParams,
) -> Result<HetGnnTrace> {
    let n = g.total_nodes();
    if features.dim() != p.dim || p.neighbors.num_nodes() != n {
        return Err(Error::ShapeMismatch {
            op: "hetgnn_forward",
            left: (p.neighbors.num_nodes(), p.dim),
            right: (n, features.dim()),
        });
    }
    let d = p.dim;

    // content embeddings
    let seq = features.sequence(tape, store);
    let h0 = tape.constant(Dense2D::zeros(n, d));
    let mut content = gru::step(tape, store, CONTENT_CELL, seq.first, h0);
    if let Some((second, rows)) = seq.second {
        let prev = tape.gather_rows(content, &rows);
        let input = tape.gather_rows(second, &rows);
        let next = gru::step(tape, store, CONTENT_CELL, input, prev);
        content = tape.overwrite_rows(content, &rows, next);
    }

    // per-type neighbor aggregation; `stacked` rows: content, then each
    // type's states for the nodes that have neighbors of that type
    let mut stacked_parts = vec![content];
    let mut stacked_rows = n;
    // (node, row in stacked) per type
    let mut type_entries: Vec<Vec<(usize, usize)>> = Vec::new();
    for (t, cell) in p.type_cells.iter().enumerate() {
        let owners: Vec<usize> = (0..n).filter(|&v| !p.neighbors.of(t, v).is_empty()).collect();
        if owners.is_empty() {
            type_entries.push(Vec::new());
            continue;
        }
        let max_len = owners.iter().map(|&v| p.neighbors.of(t, v).len()).max().unwrap_or(0);
        let mut state = tape.constant(Dense2D::zeros(owners.len(), d));
        for s in 0..max_len {
            let active: Vec<usize> = (0..owners.len())
                .filter(|&k| p.neighbors.of(t, owners[k]).len() > s)
                .collect();
            let inputs: Vec<usize> = active.iter().map(|&k| p.neighbors.of(t, owners[k])[s]).collect();
            let x = tape.gather_rows(content, &inputs);
            let h = tape.gather_rows(state, &active);
            let next = gru::step(tape, store, cell, x, h);
            state = tape.overwrite_rows(state, &active, next);
        }
        type_entries.push(
            owners
                .iter()
                .enumerate()
                .map(|(k, &v)| (v, stacked_rows + k))
                .collect(),
        );
        stacked_rows += owners.len();
        stacked_parts.push(state);
    }
    let stacked = tape.concat_rows(&stacked_parts);

    // attention entries grouped by node: self first, then types in order
    let mut per_node: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for entries in &type_entries {
        for &(v, row) in entries {
            per_node[v].push(row);
        }
    }
    let mut entry_node = Vec::new();
    let mut entry_row = Vec::new();
    for (v, rows) in per_node.iter().enumerate() {
        for &row in rows {
            entry_node.push(v);
            entry_row.push(row);
        }
    }
    let left = tape.gather_rows(content, &entry_node);
    let right = tape.gather_rows(stacked, &entry_row);
    let pair = tape.concat_cols(&[left, right]);
    let u = tape.param(store, TYPE_ATTENTION);
    let logits = tape.matmul(pair, u);
    let logits = tape.leaky_relu(logits, LEAKY_SLOPE);
    let attention = tape.segment_softmax(logits, &entry_node, n);
    let weighted = tape.scale_blocks(right, attention);
    let output = tape.scatter_add_rows(weighted, &entry_node, n);
    Ok(HetGnnTrace {
        output,
        attention,
        entry_node,
    })
}
