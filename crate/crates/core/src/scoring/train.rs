use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::distmult::{loss_on_tape, DistMultParams, Scorer};
use super::negatives::sample_negatives;
use crate::encoders::{
    encode, DropoutKey, EncoderParams, HetGnnParams, HgtParams, Mode, ModelKind, RgcnParams,
    RwrConfig,
};
use crate::error::{Error, Result};
use crate::features::{FeatureProvider, TemporalEncoding};
use crate::graph::{Triple, TypedGraph};
use crate::numerics::rng::{derive_seed, stream_rng};
use crate::numerics::{adam_step, AdamConfig, Dense2D, ParameterStore, Tape, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchMode {
    FullBatch,
    MiniBatch,
}

impl BatchMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full-batch" | "full" => Some(BatchMode::FullBatch),
            "mini-batch" | "mini" => Some(BatchMode::MiniBatch),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BatchMode::FullBatch => "full-batch",
            BatchMode::MiniBatch => "mini-batch",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub model_kind: ModelKind,
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Edge dropout; applies to the encoders that pass messages over edges.
    pub dropout_rate: f64,
    pub negatives_per_positive: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub batch_mode: BatchMode,
    pub heads: usize,
    pub rwr: RwrConfig,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl TrainConfig {
    /// Defaults for `kind`: full-batch R-GCN (400 epochs, lr 0.01, edge
    /// dropout 0.4) or mini-batch content-aware models (50 epochs, lr 0.001,
    /// no dropout).
    pub fn for_model(kind: ModelKind) -> Self {
        let full = kind == ModelKind::Rgcn;
        TrainConfig {
            model_kind: kind,
            dim: 128,
            epochs: if full { 400 } else { 50 },
            learning_rate: if full { 0.01 } else { 0.001 },
            dropout_rate: if full { 0.4 } else { 0.0 },
            negatives_per_positive: 10,
            batch_size: 256,
            seed: 42,
            batch_mode: if full {
                BatchMode::FullBatch
            } else {
                BatchMode::MiniBatch
            },
            heads: 4,
            rwr: RwrConfig::default(),
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |key: &str, msg: String| {
            Err(Error::InvalidConfig {
                key: key.to_string(),
                msg,
            })
        };
        let full = self.batch_mode == BatchMode::FullBatch;
        if full != (self.model_kind == ModelKind::Rgcn) {
            return invalid(
                "train.mode",
                format!(
                    "{} requires {}",
                    self.model_kind,
                    if self.model_kind == ModelKind::Rgcn { "full-batch" } else { "mini-batch" }
                ),
            );
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return invalid("train.dropout_rate", format!("{} outside [0, 1)", self.dropout_rate));
        }
        if self.dim == 0 {
            return invalid("train.dim", "must be positive".into());
        }
        if self.model_kind == ModelKind::Hgt && (self.heads == 0 || self.dim % self.heads != 0) {
            return invalid("train.heads", format!("{} does not divide dim {}", self.heads, self.dim));
        }
        if self.negatives_per_positive == 0 {
            return invalid("train.negatives", "must be at least 1".into());
        }
        if self.batch_size == 0 {
            return invalid("train.batch_size", "must be positive".into());
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return invalid("train.learning_rate", format!("{} is not a finite non-negative rate", self.learning_rate));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub epoch: usize,
    pub loss: f64,
    pub positive_mean_score: f64,
    pub negative_mean_score: f64,
}

/// Trace as CSV: `epoch,loss,pos_mean,neg_mean`.
pub fn format_trace(trace: &[LossReport]) -> String {
    let mut out = String::from("epoch,loss,pos_mean,neg_mean\n");
    for r in trace {
        out.push_str(&format!(
            "{},{:.10},{:.10},{:.10}\n",
            r.epoch, r.loss, r.positive_mean_score, r.negative_mean_score
        ));
    }
    out
}

/// Architecture of a link-prediction model: feature provider, encoder and
/// decoder. Values live in a separate [`ParameterStore`].
#[derive(Debug, Clone)]
pub struct Model {
    pub kind: ModelKind,
    pub features: FeatureProvider,
    pub encoder: EncoderParams,
    pub decoder: DistMultParams,
    pub seed: u64,
}

impl Model {
    /// `g` is the inverse-augmented training graph.
    pub fn new(g: &TypedGraph, cfg: &TrainConfig, features: FeatureProvider) -> Result<Self> {
        cfg.validate()?;
        if features.dim() != cfg.dim {
            return Err(Error::InvalidConfig {
                key: "features.dim".into(),
                msg: format!("{} differs from train.dim {}", features.dim(), cfg.dim),
            });
        }
        let encoder = match cfg.model_kind {
            ModelKind::Rgcn => EncoderParams::Rgcn(RgcnParams::new(g, cfg.dim, cfg.dropout_rate)?),
            ModelKind::HetGnn => {
                if !g.schema().is_augmented() {
                    return Err(Error::NotAugmented);
                }
                EncoderParams::HetGnn(HetGnnParams::new(g, cfg.dim, cfg.rwr, cfg.seed))
            }
            ModelKind::Hgt => {
                let temporal = TemporalEncoding::new(cfg.dim, features.config().reference_date)?;
                EncoderParams::Hgt(HgtParams::new(g, cfg.dim, cfg.heads, cfg.dropout_rate, temporal)?)
            }
        };
        Ok(Model {
            kind: cfg.model_kind,
            decoder: DistMultParams::new(g.schema(), cfg.dim),
            features,
            encoder,
            seed: cfg.seed,
        })
    }

    pub fn init_params(&self, g: &TypedGraph) -> ParameterStore {
        let mut store = ParameterStore::new(self.seed);
        self.features
            .register_params(g, &mut store, derive_seed(self.seed, "features"));
        self.encoder.register(&mut store, derive_seed(self.seed, "encoder"));
        self.decoder.register(&mut store, derive_seed(self.seed, "decoder"));
        store
    }

    pub fn forward(
        &self,
        tape: &mut Tape,
        store: &ParameterStore,
        g: &TypedGraph,
        mode: Mode,
        key: DropoutKey,
    ) -> Result<Var> {
        encode(tape, store, self.kind, g, &self.features, &self.encoder, mode, key)
    }

    /// Node embeddings in inference mode.
    pub fn embed(&self, store: &ParameterStore, g: &TypedGraph) -> Result<Dense2D> {
        let mut tape = Tape::new();
        let out = self.forward(&mut tape, store, g, Mode::Inference, DropoutKey::default())?;
        Ok(tape.value(out).clone())
    }

    pub fn scorer(&self, store: &ParameterStore, g: &TypedGraph) -> Result<Scorer> {
        Scorer::from_store(self.embed(store, g)?, &self.decoder, store)
    }

    /// Loss of one batch; gradients are added into `store`'s accumulators.
    /// Returns `(loss, positive mean score, negative mean score)`.
    pub fn batch_loss(
        &self,
        store: &mut ParameterStore,
        g: &TypedGraph,
        positives: &[Triple],
        negatives: &[Triple],
        mode: Mode,
        key: DropoutKey,
    ) -> Result<(f64, f64, f64)> {
        let mut tape = Tape::new();
        let emb = self.forward(&mut tape, store, g, mode, key)?;
        let pos = self.decoder.score_on_tape(&mut tape, store, g, emb, positives);
        let neg = self.decoder.score_on_tape(&mut tape, store, g, emb, negatives);
        let loss = loss_on_tape(&mut tape, pos, neg);
        let value = tape.value(loss).get(0, 0);
        let pos_mean = tape.value(pos).sum() / positives.len().max(1) as f64;
        let neg_mean = tape.value(neg).sum() / negatives.len().max(1) as f64;
        if value.is_finite() {
            let grads = tape.backward(loss);
            tape.accumulate_param_grads(&grads, store);
        }
        Ok((value, pos_mean, neg_mean))
    }
}

/// Negatives for `positives[i]`, drawn with nonce `epoch · len + i`.
pub fn epoch_negatives(
    g: &TypedGraph,
    positives: &[Triple],
    per_positive: usize,
    seed: u64,
    epoch: u64,
) -> Result<Vec<Triple>> {
    let base = epoch * positives.len() as u64;
    let per: Vec<Vec<Triple>> = positives
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            sample_negatives(g, p, per_positive, seed, base + i as u64)
                .map(|v| v.into_iter().map(|n| n.triple).collect())
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Builds the model for `cfg`, initializes it and trains on the original
/// triples of the augmented graph `g`.
pub fn train(
    g: &TypedGraph,
    cfg: &TrainConfig,
    features: FeatureProvider,
) -> Result<(Model, ParameterStore, Vec<LossReport>)> {
    let model = Model::new(g, cfg, features)?;
    let mut store = model.init_params(g);
    let trace = train_model(&model, &mut store, g, cfg)?;
    Ok((model, store, trace))
}

pub fn train_model(
    model: &Model,
    store: &mut ParameterStore,
    g: &TypedGraph,
    cfg: &TrainConfig,
) -> Result<Vec<LossReport>> {
    cfg.validate()?;
    if !g.schema().is_augmented() {
        return Err(Error::NotAugmented);
    }
    let positives: Vec<Triple> = g.original_triples().copied().collect();
    if positives.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let adam = cfg.adam();
    let neg_seed = derive_seed(cfg.seed, "negatives");
    let drop_seed = derive_seed(cfg.seed, "dropout");
    let shuffle_seed = derive_seed(cfg.seed, "shuffle");
    let mut trace = Vec::with_capacity(cfg.epochs);
    let mut step: u64 = 0;
    for epoch in 0..cfg.epochs {
        let mut order = positives.clone();
        let batch = match cfg.batch_mode {
            BatchMode::FullBatch => order.len(),
            BatchMode::MiniBatch => {
                order.shuffle(&mut stream_rng(shuffle_seed, epoch as u64));
                cfg.batch_size
            }
        };
        let negatives = epoch_negatives(g, &order, cfg.negatives_per_positive, neg_seed, epoch as u64)?;
        let (mut loss_sum, mut pos_sum, mut neg_sum, mut batches) = (0.0, 0.0, 0.0, 0usize);
        for (pos, neg) in order
            .chunks(batch)
            .zip(negatives.chunks(batch * cfg.negatives_per_positive))
        {
            let key = DropoutKey {
                seed: drop_seed,
                epoch: step,
            };
            step += 1;
            store.zero_grads();
            let (loss, p, n) = model.batch_loss(store, g, pos, neg, Mode::Training, key)?;
            if !loss.is_finite() {
                return Err(Error::DivergedLoss { epoch: epoch + 1 });
            }
            adam_step(store, &adam)?;
            loss_sum += loss;
            pos_sum += p;
            neg_sum += n;
            batches += 1;
        }
        let b = batches as f64;
        let report = LossReport {
            epoch: epoch + 1,
            loss: loss_sum / b,
            positive_mean_score: pos_sum / b,
            negative_mean_score: neg_sum / b,
        };
        log::debug!("epoch {} loss {:.6}", report.epoch, report.loss);
        trace.push(report);
    }
    store.zero_grads();
    Ok(trace)
}
