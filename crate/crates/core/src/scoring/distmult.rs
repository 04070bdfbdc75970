use rand::Rng;

use crate::error::{Error, Result};
use crate::features::init_bound;
use crate::graph::{GraphSchema, Triple, TypedGraph};
use crate::numerics::rng::{derive_seed, stream_rng};
use crate::numerics::{softplus, Dense2D, ParameterStore, Tape, Var};

/// `Σ_k h[k]·r[k]·t[k]`, evaluated as `r[k]·(h[k]·t[k])` so swapping head
/// and tail gives the bit-identical result.
pub fn distmult_score(head: &[f64], relation: &[f64], tail: &[f64]) -> Result<f64> {
    if head.len() != relation.len() || tail.len() != relation.len() {
        return Err(Error::ShapeMismatch {
            op: "distmult_score",
            left: (1, head.len()),
            right: (1, tail.len().max(relation.len())),
        });
    }
    Ok(head
        .iter()
        .zip(relation)
        .zip(tail)
        .map(|((h, r), t)| r * (h * t))
        .sum())
}

/// Logistic loss with labels 1 for positives and 0 for negatives:
/// `mean softplus(−pos) + mean softplus(neg)`.
pub fn loss(positive: &[f64], negative: &[f64]) -> f64 {
    let mean = |xs: &[f64], sign: f64| xs.iter().map(|&s| softplus(sign * s)).sum::<f64>() / xs.len().max(1) as f64;
    mean(positive, -1.0) + mean(negative, 1.0)
}

/// Diagonal relation vectors for the original (non-inverse) relations.
#[derive(Debug, Clone, PartialEq)]
pub struct DistMultParams {
    pub dim: usize,
    names: Vec<String>,
}

impl DistMultParams {
    pub fn new(schema: &GraphSchema, dim: usize) -> Self {
        let names = schema
            .original_relations()
            .map(|r| format!("distmult.{}", schema.relation_types()[r]))
            .collect();
        DistMultParams { dim, names }
    }

    pub fn num_relations(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, relation: usize) -> &str {
        &self.names[relation]
    }

    pub fn register(&self, store: &mut ParameterStore, seed: u64) {
        let a = init_bound(self.dim);
        for name in &self.names {
            let mut rng = stream_rng(derive_seed(seed, name), 0);
            let data = (0..self.dim).map(|_| rng.gen_range(-a..=a)).collect();
            store.insert(name, Dense2D::from_vec(1, self.dim, data).expect("row"));
        }
    }

    /// Relation vectors stacked as a `relations × dim` matrix on the tape.
    pub fn stacked(&self, tape: &mut Tape, store: &ParameterStore) -> Var {
        let parts: Vec<Var> = self.names.iter().map(|n| tape.param(store, n)).collect();
        tape.concat_rows(&parts)
    }

    /// Scores `triples` against `embeddings` (`total_nodes × dim`), giving a
    /// `len × 1` column.
    pub fn score_on_tape(
        &self,
        tape: &mut Tape,
        store: &ParameterStore,
        g: &TypedGraph,
        embeddings: Var,
        triples: &[Triple],
    ) -> Var {
        let heads: Vec<usize> = triples.iter().map(|t| g.global_id(t.head)).collect();
        let tails: Vec<usize> = triples.iter().map(|t| g.global_id(t.tail)).collect();
        let rels: Vec<usize> = triples.iter().map(|t| t.relation).collect();
        let relations = self.stacked(tape, store);
        let h = tape.gather_rows(embeddings, &heads);
        let t = tape.gather_rows(embeddings, &tails);
        let r = tape.gather_rows(relations, &rels);
        let ht = tape.mul(h, t);
        let hrt = tape.mul(ht, r);
        let ones = tape.constant(Dense2D::filled(self.dim, 1, 1.0));
        tape.matmul(hrt, ones)
    }
}

/// The loss on the tape, from `len × 1` score columns.
pub fn loss_on_tape(tape: &mut Tape, positive: Var, negative: Var) -> Var {
    let flipped = tape.affine(positive, -1.0, 0.0);
    let pos = tape.softplus(flipped);
    let pos = tape.mean(pos);
    let neg = tape.softplus(negative);
    let neg = tape.mean(neg);
    tape.add(pos, neg)
}

/// Frozen embeddings plus relation vectors, for ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct Scorer {
    embeddings: Dense2D,
    relations: Vec<Vec<f64>>,
}

impl Scorer {
    pub fn new(embeddings: Dense2D, relations: Vec<Vec<f64>>) -> Result<Self> {
        let d = embeddings.shape().1;
        if let Some(r) = relations.iter().find(|r| r.len() != d) {
            return Err(Error::ShapeMismatch {
                op: "scorer",
                left: (1, r.len()),
                right: (1, d),
            });
        }
        Ok(Scorer {
            embeddings,
            relations,
        })
    }

    pub fn from_store(embeddings: Dense2D, dm: &DistMultParams, store: &ParameterStore) -> Result<Self> {
        let relations = (0..dm.num_relations())
            .map(|r| {
                store
                    .value(dm.name(r))
                    .map(|v| v.data().to_vec())
                    .ok_or_else(|| Error::Snapshot(format!("missing parameter `{}`", dm.name(r))))
            })
            .collect::<Result<_>>()?;
        Scorer::new(embeddings, relations)
    }

    pub fn embeddings(&self) -> &Dense2D {
        &self.embeddings
    }

    /// Score of global ids `head`, `tail` under original relation `relation`.
    pub fn score(&self, head: usize, relation: usize, tail: usize) -> f64 {
        let (h, r, t) = (
            self.embeddings.row(head),
            &self.relations[relation],
            self.embeddings.row(tail),
        );
        h.iter().zip(r).zip(t).map(|((h, r), t)| r * (h * t)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_computed_score() {
        assert_eq!(distmult_score(&[1.0, 2.0], &[1.0, 0.5], &[2.0, 1.0]).unwrap(), 3.0);
        assert_eq!(distmult_score(&[0.0, 0.0], &[1.0, 0.5], &[2.0, 1.0]).unwrap(), 0.0);
        assert!(distmult_score(&[1.0], &[1.0, 0.5], &[2.0, 1.0]).is_err());
    }

    #[test]
    fn loss_reference_values() {
        let ln2 = std::f64::consts::LN_2;
        assert!((loss(&[0.0, 0.0], &[0.0; 5]) - 2.0 * ln2).abs() < 1e-15);
        assert!(loss(&[800.0], &[-800.0]) < 1e-300);
        assert!((loss(&[1.5], &[1.5]) - (softplus(-1.5) + softplus(1.5))).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn score_is_symmetric(v in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3, -1e3f64..1e3), 1..16)) {
            let h: Vec<f64> = v.iter().map(|x| x.0).collect();
            let r: Vec<f64> = v.iter().map(|x| x.1).collect();
            let t: Vec<f64> = v.iter().map(|x| x.2).collect();
            prop_assert_eq!(distmult_score(&h, &r, &t).unwrap(), distmult_score(&t, &r, &h).unwrap());
        }

        #[test]
        fn loss_is_non_negative_and_minimal_at_zero(s in -50.0f64..50.0) {
            let l = loss(&[s], &[s]);
            prop_assert!(l >= 0.0);
            prop_assert!(l >= 2.0 * std::f64::consts::LN_2 - 1e-12);
        }
    }
}
