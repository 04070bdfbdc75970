use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeRef, Triple, TypedGraph};
use crate::numerics::rng::stream_rng;

const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Negative {
    pub triple: Triple,
    /// Set when every attempt hit a true triple and the last draw was kept.
    pub exhausted: bool,
}

/// `n` corruptions of `positive`, each replacing the head or the tail (fair
/// coin) with a uniformly drawn node of the same type. Draws equal to a
/// triple of `g` are redrawn up to 100 times. An endpoint whose type has a
/// single node cannot be corrupted, so the other one always is; when both
/// are stuck the result is `TypeExhausted`.
pub fn sample_negatives(
    g: &TypedGraph,
    positive: &Triple,
    n: usize,
    seed: u64,
    nonce: u64,
) -> Result<Vec<Negative>> {
    let head_pool = g.node_count(positive.head.node_type);
    let tail_pool = g.node_count(positive.tail.node_type);
    if head_pool <= 1 && tail_pool <= 1 {
        return Err(Error::TypeExhausted {
            head_type: g.schema().node_types()[positive.head.node_type].clone(),
            tail_type: g.schema().node_types()[positive.tail.node_type].clone(),
        });
    }
    let mut rng = stream_rng(seed, nonce);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut candidate = *positive;
        let mut exhausted = true;
        for _ in 0..MAX_ATTEMPTS {
            let coin: bool = rng.gen();
            let corrupt_tail = if head_pool <= 1 {
                true
            } else if tail_pool <= 1 {
                false
            } else {
                coin
            };
            candidate = *positive;
            if corrupt_tail {
                let id = rng.gen_range(0..tail_pool);
                candidate.tail = NodeRef::new(positive.tail.node_type, id);
            } else {
                let id = rng.gen_range(0..head_pool);
                candidate.head = NodeRef::new(positive.head.node_type, id);
            }
            if !g.contains(&candidate) {
                exhausted = false;
                break;
            }
        }
        out.push(Negative {
            triple: candidate,
            exhausted,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::schema::{ARTICLE, CITES, HAS_TOPIC, PAPER, TOPIC};
    use crate::graph::{GraphBuilder, GraphSchema};

    fn graph(articles: usize, topics: usize) -> TypedGraph {
        let mut b = GraphBuilder::new(GraphSchema::scientific_news());
        let a: Vec<_> = (0..articles).map(|i| b.node(ARTICLE, &format!("a{i}"))).collect();
        let t: Vec<_> = (0..topics).map(|i| b.node(TOPIC, &format!("t{i}"))).collect();
        let p0 = b.node(PAPER, "p0");
        b.add_triple(Triple::new(a[0], HAS_TOPIC, t[0]));
        b.add_triple(Triple::new(a[0], CITES, p0));
        b.build()
    }

    #[test]
    fn corruptions_keep_endpoint_types() {
        let g = graph(5, 7);
        let pos = g.triples().iter().find(|t| t.relation == HAS_TOPIC).copied().unwrap();
        let negs = sample_negatives(&g, &pos, 50, 3, 0).unwrap();
        assert_eq!(negs.len(), 50);
        for n in &negs {
            assert_eq!(n.triple.head.node_type, ARTICLE);
            assert_eq!(n.triple.tail.node_type, TOPIC);
            assert!(!n.exhausted);
            assert!(!g.contains(&n.triple));
        }
    }

    #[test]
    fn deterministic_in_seed_and_nonce() {
        let g = graph(5, 7);
        let pos = g.triples()[0];
        assert_eq!(
            sample_negatives(&g, &pos, 10, 9, 4).unwrap(),
            sample_negatives(&g, &pos, 10, 9, 4).unwrap()
        );
        assert_ne!(
            sample_negatives(&g, &pos, 10, 9, 4).unwrap(),
            sample_negatives(&g, &pos, 10, 9, 5).unwrap()
        );
    }

    #[test]
    fn single_node_types_are_exhausted() {
        let g = graph(1, 1);
        let pos = g.triples().iter().find(|t| t.relation == HAS_TOPIC).copied().unwrap();
        assert!(matches!(
            sample_negatives(&g, &pos, 1, 0, 0),
            Err(Error::TypeExhausted { .. })
        ));
    }

    #[test]
    fn single_node_side_is_never_corrupted() {
        let g = graph(4, 1);
        let pos = g.triples().iter().find(|t| t.relation == HAS_TOPIC).copied().unwrap();
        for n in sample_negatives(&g, &pos, 20, 1, 0).unwrap() {
            assert_eq!(n.triple.tail, pos.tail);
            assert_ne!(n.triple.head, pos.head);
        }
    }

    #[test]
    fn saturated_pool_is_flagged() {
        // every (article, topic) pair is true
        let mut b = GraphBuilder::new(GraphSchema::scientific_news());
        let a: Vec<_> = (0..2).map(|i| b.node(ARTICLE, &format!("a{i}"))).collect();
        let t: Vec<_> = (0..2).map(|i| b.node(TOPIC, &format!("t{i}"))).collect();
        for &x in &a {
            for &y in &t {
                b.add_triple(Triple::new(x, HAS_TOPIC, y));
            }
        }
        let g = b.build();
        let negs = sample_negatives(&g, &g.triples()[0], 3, 0, 0).unwrap();
        assert!(negs.iter().all(|n| n.exhausted));
    }
}
