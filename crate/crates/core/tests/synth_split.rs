use std::collections::HashSet;

use newsgraph::eval::{split_edges, test_share, SplitSpec};
use newsgraph::graph::schema::{ARTICLE, CITES, HAS_TOPIC, PAPER, TOPIC};
use newsgraph::graph::{write_attributes, write_edge_list, GraphBuilder, GraphSchema, NodeRef, Triple, TypedGraph};
use newsgraph::synth::{generate, SynthConfig, WINDOW_END, WINDOW_START};
use newsgraph::Error;

fn files(g: &TypedGraph) -> (Vec<u8>, Vec<u8>) {
    let (mut e, mut a) = (Vec::new(), Vec::new());
    write_edge_list(g, &mut e).unwrap();
    write_attributes(g, &mut a).unwrap();
    (e, a)
}

#[test]
fn default_config_reproduces_table_counts() {
    let g = generate(&SynthConfig::default()).unwrap();
    assert_eq!(g.node_counts(), vec![23, 472, 1_242, 3_464, 368]);
    assert_eq!(g.total_nodes(), 5_569);
    assert_eq!(
        (0..4).map(|r| g.relation_count(r)).collect::<Vec<_>>(),
        vec![1_421, 1_086, 3_576, 3_464]
    );
    assert_eq!(g.num_triples(), 9_547);
    for a in 0..472 {
        let node = NodeRef::new(ARTICLE, a);
        assert!(g.triples().iter().any(|t| t.head == node && t.relation == CITES));
        assert!(g.triples().iter().any(|t| t.head == node && t.relation == HAS_TOPIC));
        let date = g.attributes(node).published_date.unwrap();
        assert!((WINDOW_START..=WINDOW_END).contains(&date));
    }
}

#[test]
fn same_seed_same_files() {
    let cfg = SynthConfig::planted(2, 20, 200, 400, 0.1, 42);
    let a = files(&generate(&cfg).unwrap());
    let b = files(&generate(&cfg).unwrap());
    assert_eq!(a, b);
    let other = files(&generate(&SynthConfig { seed: 43, ..cfg }).unwrap());
    assert_ne!(a.0, other.0);
}

#[test]
fn pigeonhole_is_infeasible() {
    let cfg = SynthConfig {
        topics: 1,
        articles: 2,
        papers: 2,
        authors: 2,
        institutes: 1,
        cites: 5,
        has_topic: 2,
        is_author_of: 2,
        is_affiliated_with: 2,
        ..SynthConfig::default()
    };
    assert!(matches!(generate(&cfg), Err(Error::InfeasibleCounts { .. })));
}

#[test]
fn noiseless_planting_is_block_diagonal() {
    let cfg = SynthConfig::planted(2, 20, 200, 400, 0.0, 7);
    let g = generate(&cfg).unwrap();
    let block = |i: usize, n: usize| i * 2 / n;
    let mut seen_blocks = HashSet::new();
    for t in g.triples().iter().filter(|t| t.relation == HAS_TOPIC) {
        assert_eq!(t.tail.node_type, TOPIC);
        let (ab, tb) = (block(t.head.local_id, 200), block(t.tail.local_id, 20));
        assert_eq!(ab, tb, "{t:?}");
        seen_blocks.insert(ab);
    }
    assert_eq!(seen_blocks.len(), 2);
    for t in g.triples().iter().filter(|t| t.relation == CITES) {
        assert_eq!(block(t.head.local_id, 200), block(t.tail.local_id, 400));
    }
}

#[test]
fn planted_titles_stay_in_block_vocabulary() {
    let cfg = SynthConfig::planted(2, 20, 200, 400, 0.1, 3);
    let g = generate(&cfg).unwrap();
    for a in 0..200 {
        let title = g.attributes(NodeRef::new(ARTICLE, a)).title.clone().unwrap();
        let tokens: Vec<usize> = title.split(' ').map(|w| w[1..].parse().unwrap()).collect();
        assert!((5..=10).contains(&tokens.len()));
        let b = a * 2 / 200;
        assert!(tokens.iter().all(|&k| k * 2 / cfg.title_vocab_size == b));
    }
}

#[test]
fn invalid_planting_is_rejected() {
    let mut cfg = SynthConfig::planted(11, 20, 200, 400, 0.1, 1);
    assert!(matches!(generate(&cfg), Err(Error::InvalidConfig { .. })));
    cfg.planted_blocks = Some(2);
    cfg.planted_noise = 1.5;
    assert!(matches!(generate(&cfg), Err(Error::InvalidConfig { .. })));
}

#[test]
fn default_split_arithmetic() {
    let g = generate(&SynthConfig::default()).unwrap();
    let (train, test) = split_edges(&g, &SplitSpec::default()).unwrap();
    let count = |ts: &[Triple], r: usize| ts.iter().filter(|t| t.relation == r).count();
    assert_eq!(count(&test, CITES), 236);
    assert_eq!(count(&test, HAS_TOPIC), 181);
    assert_eq!(train.relation_count(CITES), 1_185);
    assert_eq!(train.relation_count(HAS_TOPIC), 905);
    for r in 0..4 {
        assert_eq!(count(&test, r), test_share(g.relation_count(r)));
        let mut union: Vec<Triple> = train.triples().iter().filter(|t| t.relation == r).copied().collect();
        union.extend(test.iter().filter(|t| t.relation == r));
        let all: HashSet<Triple> = g.triples().iter().filter(|t| t.relation == r).copied().collect();
        assert_eq!(union.len(), all.len());
        assert_eq!(union.into_iter().collect::<HashSet<_>>(), all);
    }
    assert!(test.iter().all(|t| !train.contains(t)));
    assert_eq!(train.total_nodes(), g.total_nodes());
    assert_eq!(split_edges(&g, &SplitSpec::default()).unwrap().1, test);
}

#[test]
fn small_relation_cannot_be_stratified() {
    let mut b = GraphBuilder::new(GraphSchema::scientific_news());
    let a = b.node(ARTICLE, "a");
    for i in 0..5 {
        let t = b.node(TOPIC, &format!("t{i}"));
        b.add_triple(Triple::new(a, HAS_TOPIC, t));
    }
    for i in 0..6 {
        let p = b.node(PAPER, &format!("p{i}"));
        b.add_triple(Triple::new(a, CITES, p));
    }
    let g = b.build();
    match split_edges(&g, &SplitSpec::default()) {
        Err(Error::RelationTooSmall { relation, count }) => assert_eq!((relation.as_str(), count), ("has_topic", 5)),
        other => panic!("{other:?}"),
    }
    let (_, test) = split_edges(&g, &SplitSpec { seed: 1, stratified: false }).unwrap();
    assert_eq!(test.len(), 1);
}
