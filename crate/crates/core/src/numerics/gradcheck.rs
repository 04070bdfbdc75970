use rand::seq::index::sample;

use super::params::ParameterStore;
use super::rng::stream_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub checked: usize,
    /// (parameter, flat index, analytic, numeric) at the worst coordinate.
    pub worst: Option<(String, usize, f64, f64)>,
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares analytic gradients with central differences
/// `(f(x+ε) − f(x−ε)) / 2ε` on `sample` coordinates drawn without
/// replacement (all coordinates when `sample` covers them).
///
/// `loss_fn` must return the loss and accumulate its gradients into the
/// store; it is called with zeroed gradients each time.
pub fn finite_diff_check<F>(
    store: &mut ParameterStore,
    epsilon: f64,
    sample_size: usize,
    seed: u64,
    loss_fn: F,
) -> GradCheckReport
where
    F: FnMut(&mut ParameterStore) -> f64,
{
    finite_diff_check_steps(store, &[epsilon], sample_size, seed, loss_fn)
}

/// [`finite_diff_check`] over a ladder of step sizes: each coordinate keeps
/// its best agreement across `epsilons`. Large steps beat round-off on
/// gradients far below the loss scale; small steps avoid straddling
/// ReLU-style kinks. A wrong backward pass disagrees at every step.
pub fn finite_diff_check_steps<F>(
    store: &mut ParameterStore,
    epsilons: &[f64],
    sample_size: usize,
    seed: u64,
    mut loss_fn: F,
) -> GradCheckReport
where
    F: FnMut(&mut ParameterStore) -> f64,
{
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        checked: 0,
        worst: None,
    };
    let total = store.total_elements();
    if total == 0 || sample_size == 0 || epsilons.is_empty() {
        return report;
    }
    store.zero_grads();
    loss_fn(store);
    let analytic: Vec<(String, Vec<f64>)> = store
        .iter()
        .map(|p| (p.name.clone(), p.grad.data().to_vec()))
        .collect();

    let coords: Vec<usize> = if sample_size >= total {
        (0..total).collect()
    } else {
        let mut picked = sample(&mut stream_rng(seed, 0), total, sample_size).into_vec();
        picked.sort_unstable();
        picked
    };

    let mut starts = Vec::with_capacity(analytic.len());
    let mut acc = 0;
    for (_, g) in &analytic {
        starts.push(acc);
        acc += g.len();
    }

    for flat in coords {
        let p = starts.partition_point(|&s| s <= flat) - 1;
        let (name, grads) = &analytic[p];
        let i = flat - starts[p];
        let original = store.value(name).expect("known").data()[i];

        let mut best = (f64::INFINITY, f64::NAN);
        for &epsilon in epsilons {
            store.value_mut(name).expect("known").data_mut()[i] = original + epsilon;
            store.zero_grads();
            let plus = loss_fn(store);
            store.value_mut(name).expect("known").data_mut()[i] = original - epsilon;
            store.zero_grads();
            let minus = loss_fn(store);
            store.value_mut(name).expect("known").data_mut()[i] = original;

            let numeric = (plus - minus) / (2.0 * epsilon);
            let err = relative_error(grads[i], numeric);
            if err < best.0 {
                best = (err, numeric);
            }
            if err == 0.0 {
                break;
            }
        }
        // every step produced NaN
        let (err, numeric) = if best.0.is_finite() { best } else { (f64::NAN, f64::NAN) };
        report.checked += 1;
        if report.worst.is_none() || err.is_nan() || err > report.max_rel_error {
            report.max_rel_error = err;
            report.worst = Some((name.clone(), i, grads[i], numeric));
        }
    }
    store.zero_grads();
    report
}
