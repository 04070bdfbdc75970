use newsgraph::numerics::{finite_diff_check, Dense2D, ParameterStore, Tape, Var};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-4;

fn random(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Dense2D {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Dense2D::from_vec(rows, cols, data).unwrap()
}

/// Values with |x| >= 0.2 so a small step never crosses a kink at zero.
fn away_from_zero(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Dense2D {
    random(rng, rows, cols).map(|v| if v < 0.0 { v - 0.2 } else { v + 0.2 })
}

/// Registers `inputs` as parameters `x0, x1, ...`, reduces `op`'s output
/// against a fixed random weighting and returns the worst relative error.
fn check<F>(seed: u64, inputs: Vec<Dense2D>, op: F) -> f64
where
    F: Fn(&mut Tape, &[Var]) -> Var,
{
    let mut store = ParameterStore::new(seed);
    let names: Vec<String> = (0..inputs.len()).map(|i| format!("x{i}")).collect();
    for (name, value) in names.iter().zip(inputs) {
        store.insert(name, value);
    }
    let weights = {
        let mut tape = Tape::new();
        let vars: Vec<Var> = names.iter().map(|n| tape.param(&store, n)).collect();
        let out = op(&mut tape, &vars);
        let (r, c) = tape.shape(out);
        random(&mut ChaCha8Rng::seed_from_u64(seed ^ 0xabc), r, c)
    };
    let report = finite_diff_check(&mut store, 1e-5, usize::MAX, seed, |s| {
        let mut tape = Tape::new();
        let vars: Vec<Var> = names.iter().map(|n| tape.param(s, n)).collect();
        let out = op(&mut tape, &vars);
        let w = tape.constant(weights.clone());
        let weighted = tape.mul(out, w);
        let loss = tape.sum(weighted);
        let grads = tape.backward(loss);
        tape.accumulate_param_grads(&grads, s);
        tape.value(loss).get(0, 0)
    });
    assert!(report.checked > 0);
    report.max_rel_error
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matmul(seed in any::<u64>(), n in 1usize..7, k in 1usize..9, m in 1usize..7) {
        let mut r = rng(seed);
        let inputs = vec![random(&mut r, n, k), random(&mut r, k, m)];
        prop_assert!(check(seed, inputs, |t, v| t.matmul(v[0], v[1])) < TOL);
    }

    #[test]
    fn elementwise_binary(seed in any::<u64>(), n in 1usize..6, d in 1usize..9) {
        let mut r = rng(seed);
        let inputs = vec![random(&mut r, n, d), random(&mut r, n, d)];
        prop_assert!(check(seed, inputs.clone(), |t, v| t.add(v[0], v[1])) < TOL);
        prop_assert!(check(seed, inputs.clone(), |t, v| t.sub(v[0], v[1])) < TOL);
        prop_assert!(check(seed, inputs, |t, v| t.mul(v[0], v[1])) < TOL);
    }

    #[test]
    fn mul_with_shared_operand(seed in any::<u64>(), d in 1usize..9) {
        let inputs = vec![random(&mut rng(seed), 3, d)];
        prop_assert!(check(seed, inputs, |t, v| t.mul(v[0], v[0])) < TOL);
    }

    #[test]
    fn add_row_broadcast(seed in any::<u64>(), n in 1usize..6, d in 1usize..9) {
        let mut r = rng(seed);
        let inputs = vec![random(&mut r, n, d), random(&mut r, 1, d)];
        prop_assert!(check(seed, inputs, |t, v| t.add_row(v[0], v[1])) < TOL);
    }

    #[test]
    fn pointwise_activations(seed in any::<u64>(), n in 1usize..6, d in 1usize..9) {
        let smooth = vec![random(&mut rng(seed), n, d).map(|v| 3.0 * v)];
        prop_assert!(check(seed, smooth.clone(), |t, v| t.affine(v[0], -1.7, 0.3)) < TOL);
        prop_assert!(check(seed, smooth.clone(), |t, v| t.sigmoid(v[0])) < TOL);
        prop_assert!(check(seed, smooth.clone(), |t, v| t.tanh(v[0])) < TOL);
        prop_assert!(check(seed, smooth, |t, v| t.softplus(v[0])) < TOL);
        let kinked = vec![away_from_zero(&mut rng(seed), n, d)];
        prop_assert!(check(seed, kinked.clone(), |t, v| t.relu(v[0])) < TOL);
        prop_assert!(check(seed, kinked, |t, v| t.leaky_relu(v[0], 0.2)) < TOL);
    }

    #[test]
    fn row_indexing(seed in any::<u64>(), n in 1usize..6, d in 1usize..6, picks in proptest::collection::vec(0usize..6, 1..10)) {
        let idx: Vec<usize> = picks.iter().map(|&p| p % n).collect();
        let inputs = vec![random(&mut rng(seed), n, d)];
        prop_assert!(check(seed, inputs.clone(), |t, v| t.gather_rows(v[0], &idx)) < TOL);

        let src = vec![random(&mut rng(seed), idx.len(), d)];
        prop_assert!(check(seed, src, |t, v| t.scatter_add_rows(v[0], &idx, n)) < TOL);

        // distinct targets for overwrite
        let mut targets: Vec<usize> = idx.clone();
        targets.sort_unstable();
        targets.dedup();
        let mut r = rng(seed);
        let inputs = vec![random(&mut r, n, d), random(&mut r, targets.len(), d)];
        prop_assert!(check(seed, inputs, |t, v| t.overwrite_rows(v[0], &targets, v[1])) < TOL);
    }

    #[test]
    fn blockwise_ops(seed in any::<u64>(), n in 1usize..6, blocks in 1usize..5, width in 1usize..4) {
        let d = blocks * width;
        let mut r = rng(seed);
        let inputs = vec![random(&mut r, n, d), random(&mut r, n, blocks)];
        prop_assert!(check(seed, inputs, |t, v| t.scale_blocks(v[0], v[1])) < TOL);
        let inputs = vec![random(&mut r, n, d), random(&mut r, n, d)];
        prop_assert!(check(seed, inputs, move |t, v| t.block_dot(v[0], v[1], blocks)) < TOL);
    }

    #[test]
    fn softmaxes(seed in any::<u64>(), n in 1usize..8, d in 1usize..5, segs in proptest::collection::vec(0usize..3, 8)) {
        let segments: Vec<usize> = segs[..n].to_vec();
        let inputs = vec![random(&mut rng(seed), n, d).map(|v| 2.5 * v)];
        prop_assert!(check(seed, inputs.clone(), |t, v| t.softmax_rows(v[0])) < TOL);
        prop_assert!(check(seed, inputs, |t, v| t.segment_softmax(v[0], &segments, 3)) < TOL);
    }

    #[test]
    fn shape_ops(seed in any::<u64>(), n in 1usize..5, a in 1usize..5, b in 1usize..5) {
        let mut r = rng(seed);
        let inputs = vec![random(&mut r, n, a), random(&mut r, n, b)];
        prop_assert!(check(seed, inputs, |t, v| t.concat_cols(&[v[0], v[1], v[0]])) < TOL);
        let inputs = vec![random(&mut r, a, n), random(&mut r, b, n)];
        prop_assert!(check(seed, inputs, |t, v| t.concat_rows(&[v[1], v[0]])) < TOL);
        let inputs = vec![random(&mut r, a + b, a + b)];
        prop_assert!(check(seed, inputs.clone(), move |t, v| t.slice_rows(v[0], a, b)) < TOL);
        prop_assert!(check(seed, inputs, move |t, v| t.slice_cols(v[0], b, a)) < TOL);
    }

    #[test]
    fn reductions(seed in any::<u64>(), n in 1usize..6, d in 1usize..6) {
        let inputs = vec![random(&mut rng(seed), n, d)];
        prop_assert!(check(seed, inputs.clone(), |t, v| t.sum(v[0])) < TOL);
        prop_assert!(check(seed, inputs, |t, v| t.mean(v[0])) < TOL);
    }

    #[test]
    fn composed_chain(seed in any::<u64>(), d in 2usize..9) {
        // a small two-layer block with every kind of node reuse
        let mut r = rng(seed);
        let inputs = vec![random(&mut r, 4, d), random(&mut r, d, d), random(&mut r, 1, d)];
        let err = check(seed, inputs, |t, v| {
            let h = t.matmul(v[0], v[1]);
            let h = t.add_row(h, v[2]);
            let h = t.tanh(h);
            let g = t.gather_rows(h, &[0, 2, 2, 3]);
            let s = t.softmax_rows(g);
            t.mul(s, g)
        });
        prop_assert!(err < TOL);
    }
}
