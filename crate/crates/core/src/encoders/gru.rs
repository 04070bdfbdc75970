//! Gated recurrent cell on the tape.

use crate::features::glorot;
use crate::numerics::rng::derive_seed;
use crate::numerics::{Dense2D, ParameterStore, Tape, Var};

/// Registers `{prefix}.{wz,wr,wn}` (`2·dim × dim`) and `{prefix}.{bz,br,bn}`
/// (`1 × dim`).
pub(crate) fn register(store: &mut ParameterStore, prefix: &str, dim: usize, seed: u64) {
    for gate in ["wz", "wr", "wn"] {
        let name = format!("{prefix}.{gate}");
        store.insert(&name, glorot(2 * dim, dim, derive_seed(seed, &name)));
    }
    for gate in ["bz", "br", "bn"] {
        store.insert(&format!("{prefix}.{gate}"), Dense2D::zeros(1, dim));
    }
}

/// `h' = (1 − z)·h + z·n` with
/// `z = σ([x‖h]Wz + bz)`, `r = σ([x‖h]Wr + br)`, `n = tanh([x‖r·h]Wn + bn)`.
pub(crate) fn step(tape: &mut Tape, store: &ParameterStore, prefix: &str, x: Var, h: Var) -> Var {
    let p = |tape: &mut Tape, gate: &str| tape.param(store, &format!("{prefix}.{gate}"));
    let (wz, wr, wn) = (p(tape, "wz"), p(tape, "wr"), p(tape, "wn"));
    let (bz, br, bn) = (p(tape, "bz"), p(tape, "br"), p(tape, "bn"));
    let xh = tape.concat_cols(&[x, h]);
    let z = tape.matmul(xh, wz);
    let z = tape.add_row(z, bz);
    let z = tape.sigmoid(z);
    let r = tape.matmul(xh, wr);
    let r = tape.add_row(r, br);
    let r = tape.sigmoid(r);
    let rh = tape.mul(r, h);
    let xrh = tape.concat_cols(&[x, rh]);
    let n = tape.matmul(xrh, wn);
    let n = tape.add_row(n, bn);
    let n = tape.tanh(n);
    let delta = tape.sub(n, h);
    let gated = tape.mul(z, delta);
    tape.add(h, gated)
}
