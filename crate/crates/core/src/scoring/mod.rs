//! DistMult decoding, negative sampling, the logistic objective and the
//! training loops.

mod distmult;
mod negatives;
mod train;

pub use distmult::{distmult_score, loss, loss_on_tape, DistMultParams, Scorer};
pub use negatives::{sample_negatives, Negative};
pub use train::{
    epoch_negatives, format_trace, train, train_model, BatchMode, LossReport, Model, TrainConfig,
};
