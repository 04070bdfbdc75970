//! Dense kernels, the gradient tape, Adam, dropout and gradient checking.

mod dense;
mod dropout;
mod gradcheck;
mod params;
pub mod rng;
mod snapshot;
mod tape;

pub use dense::{softmax_rows, Dense2D};
pub use dropout::{dropout_edges, dropout_mask};
pub use gradcheck::{finite_diff_check, finite_diff_check_steps, relative_error, GradCheckReport};
pub use params::{adam_step, AdamConfig, Parameter, ParameterStore};
pub use snapshot::{load_snapshot_into, read_snapshot, write_snapshot, INDEX_FILE};
pub use tape::{segment_softmax, sigmoid, softplus, Gradients, Tape, Var};
