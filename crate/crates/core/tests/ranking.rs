use std::collections::HashSet;

use newsgraph::eval::{
    evaluate, filtered_rank, rank_metrics, raw_rank, Directions, RankDirection, UseCase,
};
use newsgraph::graph::{GraphBuilder, GraphSchema, NodeRef, Triple, TypedGraph};
use newsgraph::numerics::Dense2D;
use newsgraph::scoring::Scorer;
use newsgraph::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random graph with at most 50 nodes; every type has at least one node.
fn random_graph(rng: &mut ChaCha8Rng) -> TypedGraph {
    let schema = GraphSchema::scientific_news();
    let mut b = GraphBuilder::new(schema.clone());
    for t in 0..schema.num_node_types() {
        for i in 0..rng.gen_range(1..=10) {
            b.node(t, &format!("n{t}_{i}"));
        }
    }
    for r in schema.original_relations() {
        let meta = schema.meta(r).clone();
        let (nh, nt) = (b.node_count(meta.head_type), b.node_count(meta.tail_type));
        for _ in 0..rng.gen_range(1..=2 * nh * nt) {
            let h = NodeRef::new(meta.head_type, rng.gen_range(0..nh));
            let t = NodeRef::new(meta.tail_type, rng.gen_range(0..nt));
            b.add_triple(Triple::new(h, r, t));
        }
    }
    b.build()
}

/// Small integer entries, so many candidates share a score.
fn tie_heavy_scorer(g: &TypedGraph, rng: &mut ChaCha8Rng, dim: usize) -> Scorer {
    let n = g.total_nodes();
    let data = (0..n * dim).map(|_| rng.gen_range(-1..=1) as f64).collect();
    let relations = (0..g.schema().num_relations())
        .map(|_| (0..dim).map(|_| rng.gen_range(1..=2) as f64).collect())
        .collect();
    Scorer::new(Dense2D::from_vec(n, dim, data).unwrap(), relations).unwrap()
}

/// Materialize every candidate triple, drop known triples other than the
/// query, sort by score and read the rank off the sorted list.
/// Returns the rank and how many other candidates share the true score.
fn brute_force_rank(g: &TypedGraph, scorer: &Scorer, triple: &Triple, dir: RankDirection) -> (usize, usize) {
    let known: HashSet<Triple> = g.triples().iter().copied().collect();
    let moving_type = match dir {
        RankDirection::Tail => triple.tail.node_type,
        RankDirection::Head => triple.head.node_type,
    };
    let mut scored: Vec<(f64, bool)> = (0..g.node_count(moving_type))
        .map(|id| {
            let c = NodeRef::new(moving_type, id);
            match dir {
                RankDirection::Tail => Triple::new(triple.head, triple.relation, c),
                RankDirection::Head => Triple::new(c, triple.relation, triple.tail),
            }
        })
        .filter(|cand| cand == triple || !known.contains(cand))
        .map(|cand| {
            let s = scorer.score(g.global_id(cand.head), cand.relation, g.global_id(cand.tail));
            (s, cand == *triple)
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let truth = scored.iter().find(|(_, t)| *t).unwrap().0;
    let first = scored.iter().position(|(s, _)| *s == truth).unwrap();
    let last = scored.iter().rposition(|(s, _)| *s == truth).unwrap();
    let greater = first as f64;
    let equal = (last - first) as f64;
    ((1.0 + greater + equal / 2.0 + 0.5).floor() as usize, last - first)
}

#[test]
fn filtered_rank_matches_brute_force_on_200_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut compared = 0;
    let mut ties = 0;
    for _ in 0..200 {
        let g = random_graph(&mut rng);
        assert!(g.total_nodes() <= 50);
        let scorer = tie_heavy_scorer(&g, &mut rng, 3);
        for t in g.triples() {
            for dir in [RankDirection::Tail, RankDirection::Head] {
                let got = filtered_rank(&g, &scorer, t, dir);
                let (expected, tied) = brute_force_rank(&g, &scorer, t, dir);
                assert_eq!(got.filtered_rank, expected, "{t:?} {dir:?}");
                assert!(got.filtered_rank >= 1 && got.filtered_rank <= got.candidate_count);
                let raw = raw_rank(&g, &scorer, t, dir);
                assert!(got.filtered_rank <= raw.filtered_rank);
                compared += 1;
                if tied > 0 {
                    ties += 1;
                }
            }
        }
    }
    assert!(compared > 1000);
    assert!(ties > compared / 10, "{ties} tie cases of {compared}");
}

#[test]
fn positive_rescaling_keeps_ranks() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let g = random_graph(&mut rng);
        let n = g.total_nodes();
        let emb = Dense2D::from_vec(n, 4, (0..n * 4).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let rel: Vec<Vec<f64>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let scaled: Vec<Vec<f64>> = rel.iter().map(|r| r.iter().map(|x| 3.5 * x).collect()).collect();
        let a = Scorer::new(emb.clone(), rel).unwrap();
        let b = Scorer::new(emb, scaled).unwrap();
        for t in g.triples() {
            assert_eq!(
                filtered_rank(&g, &a, t, RankDirection::Tail).filtered_rank,
                filtered_rank(&g, &b, t, RankDirection::Tail).filtered_rank
            );
        }
    }
}

#[test]
fn tie_example_from_rule() {
    // one head, four tails scoring 0.5 (true), 0.9, 0.5, 0.1
    let schema = GraphSchema::scientific_news();
    let mut b = GraphBuilder::new(schema);
    let a = b.node(1, "a");
    let topics: Vec<_> = (0..4).map(|i| b.node(0, &format!("t{i}"))).collect();
    b.add_triple(Triple::new(a, 1, topics[0]));
    let g = b.build();
    let mut emb = Dense2D::zeros(g.total_nodes(), 1);
    emb.set(g.global_id(a), 0, 1.0);
    for (t, s) in topics.iter().zip([0.5, 0.9, 0.5, 0.1]) {
        emb.set(g.global_id(*t), 0, s);
    }
    let scorer = Scorer::new(emb, vec![vec![1.0]; 4]).unwrap();
    let r = filtered_rank(&g, &scorer, &Triple::new(a, 1, topics[0]), RankDirection::Tail);
    assert_eq!(r.filtered_rank, 3);
    assert_eq!(r.candidate_count, 4);
}

#[test]
fn evaluate_reports_in_test_order_and_rejects_empty() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = random_graph(&mut rng);
    let scorer = tie_heavy_scorer(&g, &mut rng, 4);
    let test: Vec<Triple> = g.triples().to_vec();
    let report = evaluate(&g, &test, &scorer, UseCase::B, Directions::Both, "m").unwrap();
    let expected: Vec<(Triple, RankDirection)> = test
        .iter()
        .filter(|t| t.relation == UseCase::B.relation())
        .flat_map(|t| [(*t, RankDirection::Tail), (*t, RankDirection::Head)])
        .collect();
    let got: Vec<(Triple, RankDirection)> = report.per_triple.iter().map(|r| (r.triple, r.direction)).collect();
    assert_eq!(got, expected);
    let ranks: Vec<usize> = report.per_triple.iter().map(|r| r.filtered_rank).collect();
    assert_eq!(rank_metrics(&ranks).0, report.mrr);

    let only_cites: Vec<Triple> = test.iter().filter(|t| t.relation == 0).copied().collect();
    assert!(matches!(
        evaluate(&g, &only_cites, &scorer, UseCase::B, Directions::TailOnly, "m"),
        Err(Error::EmptyTestSet(_))
    ));
}
