//! Node encoders: relational convolution, content-aware typed-neighbor
//! aggregation, and typed attention.

mod gru;
pub mod hetgnn;
pub mod hgt;
pub mod rgcn;

use std::fmt;

use crate::error::{Error, Result};
use crate::features::FeatureProvider;
use crate::graph::TypedGraph;
use crate::numerics::{ParameterStore, Tape, Var};

pub use hetgnn::{
    hetgnn_forward, hetgnn_forward_traced, one_hop_neighbors, sample_rwr_neighbors, HetGnnParams,
    HetGnnTrace, NeighborSets, RwrConfig,
};
pub use hgt::{hgt_forward, hgt_layer, HgtParams, HgtTrace};
pub use rgcn::{rgcn_forward, RgcnParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Rgcn,
    HetGnn,
    Hgt,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Rgcn, ModelKind::HetGnn, ModelKind::Hgt];

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rgcn" | "r-gcn" => Some(ModelKind::Rgcn),
            "hetgnn" => Some(ModelKind::HetGnn),
            "hgt" => Some(ModelKind::Hgt),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Rgcn => "rgcn",
            ModelKind::HetGnn => "hetgnn",
            ModelKind::Hgt => "hgt",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Training,
    Inference,
}

/// Identifies one draw of edge dropout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DropoutKey {
    pub seed: u64,
    pub epoch: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EncoderParams {
    Rgcn(RgcnParams),
    HetGnn(HetGnnParams),
    Hgt(HgtParams),
}

impl EncoderParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            EncoderParams::Rgcn(_) => ModelKind::Rgcn,
            EncoderParams::HetGnn(_) => ModelKind::HetGnn,
            EncoderParams::Hgt(_) => ModelKind::Hgt,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            EncoderParams::Rgcn(p) => p.dim,
            EncoderParams::HetGnn(p) => p.dim,
            EncoderParams::Hgt(p) => p.dim,
        }
    }

    pub fn register(&self, store: &mut ParameterStore, seed: u64) {
        match self {
            EncoderParams::Rgcn(p) => p.register(store, seed),
            EncoderParams::HetGnn(p) => p.register(store, seed),
            EncoderParams::Hgt(p) => p.register(store, seed),
        }
    }
}

/// Runs the encoder selected by `kind`; `params` must be of the same kind.
#[allow(clippy::too_many_arguments)]
pub fn encode(
    tape: &mut Tape,
    store: &ParameterStore,
    kind: ModelKind,
    g: &TypedGraph,
    features: &FeatureProvider,
    params: &EncoderParams,
    mode: Mode,
    key: DropoutKey,
) -> Result<Var> {
    if params.kind() != kind {
        return Err(Error::KindMismatch {
            expected: kind.as_str(),
            found: params.kind().as_str(),
        });
    }
    match params {
        EncoderParams::Rgcn(p) => {
            let x = features.vectors(tape, store);
            rgcn_forward(tape, store, g, x, p, mode, key)
        }
        EncoderParams::HetGnn(p) => hetgnn_forward(tape, store, g, features, p),
        EncoderParams::Hgt(p) => hgt_forward(tape, store, g, features, p, mode, key),
    }
}
