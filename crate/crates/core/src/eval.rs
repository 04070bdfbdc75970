//! Edge split, filtered ranking and MRR / Hits@k.

use std::fmt;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::schema::{CITES, HAS_TOPIC};
use crate::graph::{NodeRef, Triple, TypedGraph};
use crate::numerics::rng::stream_rng;
use crate::scoring::Scorer;

/// 5:1 train/test split, per relation when `stratified`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            seed: 42,
            stratified: true,
        }
    }
}

/// Number of test triples drawn from `count`.
pub fn test_share(count: usize) -> usize {
    count / 6
}

/// Returns the training graph (same nodes, test triples removed) and the
/// test triples in their original order.
pub fn split_edges(g: &TypedGraph, spec: &SplitSpec) -> Result<(TypedGraph, Vec<Triple>)> {
    let triples = g.triples();
    let mut is_test = vec![false; triples.len()];
    let originals: Vec<usize> = g.schema().original_relations().collect();
    // (stream, triple indices)
    let groups: Vec<(u64, Vec<usize>)> = if spec.stratified {
        originals
            .iter()
            .map(|&r| (r as u64, (0..triples.len()).filter(|&i| triples[i].relation == r).collect()))
            .collect()
    } else {
        let all = (0..triples.len()).filter(|&i| originals.contains(&triples[i].relation));
        vec![(u64::MAX, all.collect())]
    };
    for (stream, mut group) in groups {
        if spec.stratified && group.len() < 6 {
            return Err(Error::RelationTooSmall {
                relation: g.schema().relation_types()[stream as usize].clone(),
                count: group.len(),
            });
        }
        group.shuffle(&mut stream_rng(spec.seed, stream));
        for &i in group.iter().take(test_share(group.len())) {
            is_test[i] = true;
        }
    }
    let test: Vec<Triple> = triples
        .iter()
        .zip(&is_test)
        .filter(|(_, &t)| t)
        .map(|(t, _)| *t)
        .collect();
    let train: Vec<Triple> = triples
        .iter()
        .zip(&is_test)
        .filter(|(_, &t)| !t)
        .map(|(t, _)| *t)
        .collect();
    Ok((g.with_triples(train), test))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankDirection {
    Tail,
    Head,
}

impl RankDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            RankDirection::Tail => "tail",
            RankDirection::Head => "head",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directions {
    TailOnly,
    Both,
}

impl Directions {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tail" | "tail-only" => Some(Directions::TailOnly),
            "both" => Some(Directions::Both),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Directions::TailOnly => "tail",
            Directions::Both => "both",
        }
    }

    fn list(&self) -> &'static [RankDirection] {
        match self {
            Directions::TailOnly => &[RankDirection::Tail],
            Directions::Both => &[RankDirection::Tail, RankDirection::Head],
        }
    }
}

/// A: article→paper citations; B: article→topic edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UseCase {
    A,
    B,
}

impl UseCase {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "A" | "a" => Some(UseCase::A),
            "B" | "b" => Some(UseCase::B),
            _ => None,
        }
    }

    pub fn relation(&self) -> usize {
        match self {
            UseCase::A => CITES,
            UseCase::B => HAS_TOPIC,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            UseCase::A => "A",
            UseCase::B => "B",
        }
    }
}

impl fmt::Display for UseCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankedResult {
    pub triple: Triple,
    pub direction: RankDirection,
    pub filtered_rank: usize,
    /// Candidates left after filtering, the true endpoint included.
    pub candidate_count: usize,
}

/// `1 + greater + round_half_up(equal / 2)`.
pub fn tie_rank(greater: usize, equal: usize) -> usize {
    1 + greater + (equal + 1) / 2
}

fn rank_impl(
    g_full: &TypedGraph,
    scorer: &Scorer,
    triple: &Triple,
    direction: RankDirection,
    filtered: bool,
) -> RankedResult {
    let (fixed, moving) = match direction {
        RankDirection::Tail => (triple.head, triple.tail),
        RankDirection::Head => (triple.tail, triple.head),
    };
    let build = |id: usize| {
        let c = NodeRef::new(moving.node_type, id);
        match direction {
            RankDirection::Tail => Triple::new(fixed, triple.relation, c),
            RankDirection::Head => Triple::new(c, triple.relation, fixed),
        }
    };
    let score = |t: &Triple| scorer.score(g_full.global_id(t.head), t.relation, g_full.global_id(t.tail));
    let truth = score(triple);
    let (mut greater, mut equal, mut kept) = (0, 0, 1);
    for id in 0..g_full.node_count(moving.node_type) {
        if id == moving.local_id {
            continue;
        }
        let cand = build(id);
        if filtered && g_full.contains(&cand) {
            continue;
        }
        kept += 1;
        let s = score(&cand);
        if s > truth {
            greater += 1;
        } else if s == truth {
            equal += 1;
        }
    }
    RankedResult {
        triple: *triple,
        direction,
        filtered_rank: tie_rank(greater, equal),
        candidate_count: kept,
    }
}

/// Rank of the true endpoint among all nodes of its type, after removing
/// candidates that form another known triple of `g_full`.
pub fn filtered_rank(g_full: &TypedGraph, scorer: &Scorer, triple: &Triple, direction: RankDirection) -> RankedResult {
    rank_impl(g_full, scorer, triple, direction, true)
}

/// Same ranking without filtering.
pub fn raw_rank(g_full: &TypedGraph, scorer: &Scorer, triple: &Triple, direction: RankDirection) -> RankedResult {
    rank_impl(g_full, scorer, triple, direction, false)
}

/// `(mrr, hits@1, hits@3, hits@10)`; zeros for an empty list.
pub fn rank_metrics(ranks: &[usize]) -> (f64, f64, f64, f64) {
    if ranks.is_empty() {
        return (0.0, 0.0, 0.0, 0.0);
    }
    let n = ranks.len() as f64;
    let mrr = ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / n;
    let hits = |k: usize| ranks.iter().filter(|&&r| r <= k).count() as f64 / n;
    (mrr, hits(1), hits(3), hits(10))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub use_case: UseCase,
    pub model: String,
    pub mrr: f64,
    pub hits1: f64,
    pub hits3: f64,
    pub hits10: f64,
    pub per_triple: Vec<RankedResult>,
}

impl MetricsReport {
    pub fn hits(&self, k: usize) -> Option<f64> {
        match k {
            1 => Some(self.hits1),
            3 => Some(self.hits3),
            10 => Some(self.hits10),
            _ => None,
        }
    }
}

/// Ranks the use-case test triples (in test-list order, tail before head).
pub fn evaluate(
    g_full: &TypedGraph,
    test: &[Triple],
    scorer: &Scorer,
    use_case: UseCase,
    directions: Directions,
    model: &str,
) -> Result<MetricsReport> {
    let relation = use_case.relation();
    let jobs: Vec<(Triple, RankDirection)> = test
        .iter()
        .filter(|t| t.relation == relation)
        .flat_map(|t| directions.list().iter().map(move |&d| (*t, d)))
        .collect();
    if jobs.is_empty() {
        return Err(Error::EmptyTestSet(use_case.as_str()));
    }
    let per_triple: Vec<RankedResult> = jobs
        .par_iter()
        .map(|(t, d)| filtered_rank(g_full, scorer, t, *d))
        .collect();
    let ranks: Vec<usize> = per_triple.iter().map(|r| r.filtered_rank).collect();
    let (mrr, hits1, hits3, hits10) = rank_metrics(&ranks);
    Ok(MetricsReport {
        use_case,
        model: model.to_string(),
        mrr,
        hits1,
        hits3,
        hits10,
        per_triple,
    })
}

pub const REPORT_HEADER: &str = "use_case,model,mrr,hits1,hits3,hits10";

/// Header line plus one row per report.
pub fn format_reports(reports: &[MetricsReport]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:.6}\n",
            r.use_case, r.model, r.mrr, r.hits1, r.hits3, r.hits10
        ));
    }
    out
}

/// Per-triple dump: `head,relation,tail,direction,rank,candidates`, with
/// endpoints written as `type:label`.
pub fn format_rank_dump(g: &TypedGraph, reports: &[MetricsReport]) -> String {
    let mut out = String::from("head,relation,tail,direction,rank,candidates\n");
    let node = |n: NodeRef| format!("{}:{}", g.schema().node_types()[n.node_type], g.label(n));
    for r in reports {
        for x in &r.per_triple {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                node(x.triple.head),
                g.schema().relation_types()[x.triple.relation],
                node(x.triple.tail),
                x.direction.as_str(),
                x.filtered_rank,
                x.candidate_count
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Dense2D;
    use proptest::prelude::*;

    #[test]
    fn tie_rule_examples() {
        // true 0.5 vs 0.9, 0.5, 0.1
        assert_eq!(tie_rank(1, 1), 3);
        assert_eq!(tie_rank(0, 0), 1);
        assert_eq!(tie_rank(2, 2), 4);
        assert_eq!(tie_rank(0, 3), 3);
    }

    #[test]
    fn reference_rank_vector() {
        let (mrr, h1, h3, h10) = rank_metrics(&[1, 2, 4]);
        assert!((mrr - 1.75 / 3.0).abs() < 1e-12);
        assert!((h1 - 1.0 / 3.0).abs() < 1e-12);
        assert!((h3 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(h10, 1.0);
        assert_eq!(rank_metrics(&[1, 1, 1]), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn scorer_rejects_width_mismatch() {
        assert!(Scorer::new(Dense2D::zeros(3, 2), vec![vec![1.0; 3]]).is_err());
    }

    proptest! {
        #[test]
        fn metric_orderings(ranks in proptest::collection::vec(1usize..100, 1..50)) {
            let (mrr, h1, h3, h10) = rank_metrics(&ranks);
            prop_assert!(h1 <= h3 && h3 <= h10);
            prop_assert!(mrr > 0.0 && mrr <= 1.0);
            prop_assert!(mrr >= h1);
        }
    }
}
