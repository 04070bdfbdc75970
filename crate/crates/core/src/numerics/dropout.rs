use rand::Rng;

use super::rng::stream_rng;
use crate::error::{Error, Result};

/// Keep-mask for `n` edges: edge `i` is kept with probability `1 - rate`,
/// decided by the `i`-th draw of the `(seed, epoch)` stream.
pub fn dropout_mask(n: usize, rate: f64, seed: u64, epoch: u64) -> Result<Vec<bool>> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::BadRate(rate));
    }
    if rate == 0.0 {
        return Ok(vec![true; n]);
    }
    let mut rng = stream_rng(seed, epoch);
    Ok((0..n).map(|_| rng.gen::<f64>() >= rate).collect())
}

/// Retained edges, in input order. Messages on retained edges are not
/// rescaled.
pub fn dropout_edges<T: Clone>(edges: &[T], rate: f64, seed: u64, epoch: u64) -> Result<Vec<T>> {
    let mask = dropout_mask(edges.len(), rate, seed, epoch)?;
    Ok(edges
        .iter()
        .zip(mask)
        .filter_map(|(e, keep)| keep.then(|| e.clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_keeps_everything() {
        let edges: Vec<usize> = (0..50).collect();
        assert_eq!(dropout_edges(&edges, 0.0, 1, 0).unwrap(), edges);
    }

    #[test]
    fn retained_count_is_binomial() {
        let edges: Vec<usize> = (0..10_000).collect();
        let kept = dropout_edges(&edges, 0.4, 7, 0).unwrap().len() as f64;
        // Binomial(10000, 0.6): mean 6000, sd sqrt(10000 * 0.6 * 0.4) ≈ 48.99
        let sd = (10_000.0f64 * 0.6 * 0.4).sqrt();
        assert!((kept - 6000.0).abs() <= 3.0 * sd, "kept {kept}");
    }

    #[test]
    fn same_key_same_set() {
        let edges: Vec<usize> = (0..1000).collect();
        let a = dropout_edges(&edges, 0.4, 3, 11).unwrap();
        let b = dropout_edges(&edges, 0.4, 3, 11).unwrap();
        let c = dropout_edges(&edges, 0.4, 3, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bad_rate() {
        assert!(matches!(dropout_mask(3, 1.0, 0, 0), Err(Error::BadRate(_))));
        assert!(matches!(dropout_mask(3, -0.1, 0, 0), Err(Error::BadRate(_))));
    }
}
