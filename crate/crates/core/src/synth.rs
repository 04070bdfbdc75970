//! Synthetic scientific-news graphs.
//!
//! Without planting, endpoints are uniform. With `planted_blocks = B`,
//! topics, articles and papers are split into B contiguous blocks; every
//! article and paper gets a home topic inside its block (Zipf-skewed
//! popularity), article/paper titles draw most tokens from their home
//! topic's slice of the block vocabulary, and article→topic / article→paper
//! edges stay inside the block with probability `1 − planted_noise`.
//! In-block draws go to the home topic (or papers sharing it) with
//! probability `planted_affinity`; otherwise to a topic chosen by
//! popularity times `planted_locality^d`, where `d` is the distance from the
//! home topic on a ring over the block's topics. Author and institute edges
//! are never blocked.
//!
//! Every node ends up with at least one edge (the edge-list format cannot
//! represent isolated nodes); articles always get at least one citation
//! and one topic.

use std::collections::HashSet;

use rand::distributions::WeightedIndex;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::schema::{ARTICLE, CITES, HAS_TOPIC, IS_AFFILIATED_WITH, IS_AUTHOR_OF, PAPER};
use crate::graph::{GraphBuilder, GraphSchema, NodeRef, Triple, TypedGraph};
use crate::numerics::rng::{derive_seed, stream_rng};

/// First day of the collection window, 2020-08-01.
pub const WINDOW_START: i64 = 18_475;
/// Last day of the collection window, 2020-11-30.
pub const WINDOW_END: i64 = 18_596;

const HOME_TOKEN_SHARE: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub topics: usize,
    pub articles: usize,
    pub papers: usize,
    pub authors: usize,
    pub institutes: usize,
    pub cites: usize,
    pub has_topic: usize,
    pub is_author_of: usize,
    pub is_affiliated_with: usize,
    pub seed: u64,
    pub planted_blocks: Option<usize>,
    pub planted_noise: f64,
    /// Probability that an in-block draw goes to the home topic.
    pub planted_affinity: f64,
    /// Zipf exponent of topic popularity inside a block.
    pub planted_skew: f64,
    /// Decay per ring step away from the home topic; 1 disables locality.
    pub planted_locality: f64,
    pub title_vocab_size: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            topics: 23,
            articles: 472,
            papers: 1_242,
            authors: 3_464,
            institutes: 368,
            cites: 1_421,
            has_topic: 1_086,
            is_author_of: 3_576,
            is_affiliated_with: 3_464,
            seed: 42,
            planted_blocks: None,
            planted_noise: 0.1,
            planted_affinity: 0.8,
            planted_skew: 1.0,
            planted_locality: 0.1,
            title_vocab_size: 500,
        }
    }
}

impl SynthConfig {
    /// A planted graph with the given core sizes: 1.2 topics and 5 citations
    /// per article, one author per paper on average, and authors sharing
    /// `papers / 20` institutes.
    pub fn planted(blocks: usize, topics: usize, articles: usize, papers: usize, noise: f64, seed: u64) -> Self {
        let authors = (papers / 2).max(1);
        SynthConfig {
            topics,
            articles,
            papers,
            authors,
            institutes: (papers / 20).max(1),
            cites: (articles * 5).max(papers.min(articles * papers)),
            has_topic: (articles * 6).div_ceil(5),
            is_author_of: papers.max(authors),
            is_affiliated_with: authors,
            seed,
            planted_blocks: Some(blocks),
            planted_noise: noise,
            ..SynthConfig::default()
        }
    }

    /// In schema order: topic, article, paper, author, institute.
    pub fn node_counts(&self) -> [usize; 5] {
        [self.topics, self.articles, self.papers, self.authors, self.institutes]
    }

    /// In schema order: cites, has_topic, is_author_of, is_affiliated_with.
    pub fn edge_counts(&self) -> [usize; 4] {
        [self.cites, self.has_topic, self.is_author_of, self.is_affiliated_with]
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |key: &str, msg: String| {
            Err(Error::InvalidConfig {
                key: key.into(),
                msg,
            })
        };
        if !(0.0..=1.0).contains(&self.planted_noise) {
            return invalid("synth.planted_noise", format!("{} outside [0, 1]", self.planted_noise));
        }
        if !(0.0..=1.0).contains(&self.planted_affinity) {
            return invalid("synth.planted_affinity", format!("{} outside [0, 1]", self.planted_affinity));
        }
        if !(self.planted_skew >= 0.0 && self.planted_skew.is_finite()) {
            return invalid("synth.planted_skew", format!("{} is not a finite non-negative exponent", self.planted_skew));
        }
        if !(0.0..=1.0).contains(&self.planted_locality) {
            return invalid("synth.planted_locality", format!("{} outside [0, 1]", self.planted_locality));
        }
        if self.title_vocab_size == 0 {
            return invalid("synth.title_vocab_size", "must be positive".into());
        }
        if let Some(b) = self.planted_blocks {
            let cap = self.topics.min(10);
            if b == 0 || b > cap {
                return invalid("synth.planted_blocks", format!("{b} outside 1..={cap}"));
            }
            if b > self.articles || b > self.papers {
                return invalid("synth.planted_blocks", format!("{b} blocks exceed article or paper count"));
            }
            if b > self.title_vocab_size {
                return invalid("synth.title_vocab_size", format!("smaller than {b} blocks"));
            }
        }
        Ok(())
    }
}

fn block_of(i: usize, count: usize, blocks: usize) -> usize {
    i * blocks / count
}

/// Planted latent structure shared by all relation generators.
struct Layout {
    blocks: usize,
    noise: f64,
    affinity: f64,
    topic_block: Vec<usize>,
    article_block: Vec<usize>,
    paper_block: Vec<usize>,
    topics_in: Vec<Vec<usize>>,
    articles_in: Vec<Vec<usize>>,
    papers_in: Vec<Vec<usize>>,
    /// Per home topic, sampler over its block's topics (popularity × locality).
    near_pick: Vec<Option<WeightedIndex<f64>>>,
    article_home: Vec<usize>,
    paper_home: Vec<usize>,
    articles_by_home: Vec<Vec<usize>>,
    papers_by_home: Vec<Vec<usize>>,
}

fn members(assign: &[usize], blocks: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); blocks];
    for (i, &b) in assign.iter().enumerate() {
        out[b].push(i);
    }
    out
}

impl Layout {
    fn new(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Layout {
        let (blocks, noise, affinity, skew, locality) = match cfg.planted_blocks {
            Some(b) => (b, cfg.planted_noise, cfg.planted_affinity, cfg.planted_skew, cfg.planted_locality),
            None => (1, 0.0, 0.0, 0.0, 1.0),
        };
        let assign = |count: usize| (0..count).map(|i| block_of(i, count, blocks)).collect::<Vec<_>>();
        let topic_block = if cfg.topics == 0 { Vec::new() } else { assign(cfg.topics) };
        let article_block = if cfg.articles == 0 { Vec::new() } else { assign(cfg.articles) };
        let paper_block = if cfg.papers == 0 { Vec::new() } else { assign(cfg.papers) };
        let topics_in = members(&topic_block, blocks);
        let articles_in = members(&article_block, blocks);
        let papers_in = members(&paper_block, blocks);
        let topic_pick: Vec<Option<WeightedIndex<f64>>> = topics_in
            .iter()
            .map(|ts| {
                let w: Vec<f64> = (0..ts.len()).map(|k| 1.0 / ((k + 1) as f64).powf(skew)).collect();
                WeightedIndex::new(w).ok()
            })
            .collect();
        let mut near_pick = Vec::with_capacity(cfg.topics);
        for ts in &topics_in {
            let m = ts.len();
            for h in 0..m {
                let w: Vec<f64> = (0..m)
                    .map(|k| {
                        let d = (k + m - h) % m;
                        let ring = d.min(m - d) as i32;
                        locality.powi(ring) / ((k + 1) as f64).powf(skew)
                    })
                    .collect();
                near_pick.push(WeightedIndex::new(w).ok());
            }
        }
        let mut home = |own_block: &[usize]| -> Vec<usize> {
            own_block
                .iter()
                .map(|&b| match &topic_pick[b] {
                    Some(pick) => topics_in[b][rng.sample(pick)],
                    // no topic in this block: any topic (or 0 when none exist)
                    None => {
                        if cfg.topics == 0 {
                            0
                        } else {
                            rng.gen_range(0..cfg.topics)
                        }
                    }
                })
                .collect()
        };
        let article_home = home(&article_block);
        let paper_home = home(&paper_block);
        let by_home = |homes: &[usize]| {
            let mut out = vec![Vec::new(); cfg.topics.max(1)];
            for (i, &t) in homes.iter().enumerate() {
                out[t].push(i);
            }
            out
        };
        Layout {
            blocks,
            noise,
            affinity,
            articles_by_home: by_home(&article_home),
            papers_by_home: by_home(&paper_home),
            topic_block,
            article_block,
            paper_block,
            topics_in,
            articles_in,
            papers_in,
            near_pick,
            article_home,
            paper_home,
        }
    }

    /// Uniform draw outside block `b` from `groups`, or `None` when the
    /// other blocks are empty.
    fn cross_block(groups: &[Vec<usize>], b: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
        let total: usize = groups.iter().enumerate().filter(|(k, _)| *k != b).map(|(_, g)| g.len()).sum();
        if total == 0 {
            return None;
        }
        let mut k = rng.gen_range(0..total);
        for (i, g) in groups.iter().enumerate() {
            if i == b {
                continue;
            }
            if k < g.len() {
                return Some(g[k]);
            }
            k -= g.len();
        }
        None
    }

    fn uniform(list: &[usize], rng: &mut ChaCha8Rng) -> Option<usize> {
        list.choose(rng).copied()
    }

    fn noisy(&self, rng: &mut ChaCha8Rng) -> bool {
        self.blocks > 1 && rng.gen::<f64>() < self.noise
    }

    fn topic_for_article(&self, a: usize, rng: &mut ChaCha8Rng) -> usize {
        let b = self.article_block[a];
        if self.noisy(rng) {
            if let Some(t) = Self::cross_block(&self.topics_in, b, rng) {
                return t;
            }
        }
        if rng.gen::<f64>() < self.affinity {
            return self.article_home[a];
        }
        self.near_topic(self.article_home[a], rng)
    }

    /// A topic of `home`'s block, by popularity and ring distance.
    fn near_topic(&self, home: usize, rng: &mut ChaCha8Rng) -> usize {
        match self.near_pick.get(home).and_then(Option::as_ref) {
            Some(pick) => self.topics_in[self.topic_block[home]][rng.sample(pick)],
            None => home,
        }
    }

    fn paper_for_article(&self, a: usize, rng: &mut ChaCha8Rng) -> usize {
        let b = self.article_block[a];
        if self.noisy(rng) {
            if let Some(p) = Self::cross_block(&self.papers_in, b, rng) {
                return p;
            }
        }
        let home = self.article_home[a];
        let topic = if rng.gen::<f64>() < self.affinity { home } else { self.near_topic(home, rng) };
        if let Some(p) = Self::uniform(&self.papers_by_home[topic], rng) {
            return p;
        }
        Self::uniform(&self.papers_in[b], rng).unwrap_or_else(|| rng.gen_range(0..self.paper_block.len()))
    }

    fn article_for_topic(&self, t: usize, rng: &mut ChaCha8Rng) -> usize {
        let b = self.topic_block[t];
        self.article_near(b, t, rng)
    }

    fn article_for_paper(&self, p: usize, rng: &mut ChaCha8Rng) -> usize {
        let b = self.paper_block[p];
        self.article_near(b, self.paper_home[p], rng)
    }

    fn article_near(&self, b: usize, home: usize, rng: &mut ChaCha8Rng) -> usize {
        if self.noisy(rng) {
            if let Some(a) = Self::cross_block(&self.articles_in, b, rng) {
                return a;
            }
        }
        let topic = if rng.gen::<f64>() < self.affinity { home } else { self.near_topic(home, rng) };
        if let Some(a) = Self::uniform(&self.articles_by_home[topic], rng) {
            return a;
        }
        Self::uniform(&self.articles_in[b], rng).unwrap_or_else(|| rng.gen_range(0..self.article_block.len()))
    }
}

/// Endpoint draws for one relation.
struct RelationPlan<'a> {
    name: &'a str,
    count: usize,
    heads: usize,
    tails: usize,
    /// Block of each head / tail, for block-respecting pairing.
    head_block: Vec<usize>,
    tail_block: Vec<usize>,
    blocks: usize,
    tail_for_head: &'a dyn Fn(usize, &mut ChaCha8Rng) -> usize,
    head_for_tail: &'a dyn Fn(usize, &mut ChaCha8Rng) -> usize,
}

fn infeasible(relation: &str, detail: String) -> Error {
    Error::InfeasibleCounts {
        relation: relation.to_string(),
        detail,
    }
}

/// Distinct `(head, tail)` pairs covering both sides where the budget allows.
fn relation_edges(plan: &RelationPlan, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    let (h, t, count) = (plan.heads, plan.tails, plan.count);
    let pairs = h.saturating_mul(t);
    if count > pairs {
        return Err(infeasible(
            plan.name,
            format!("{count} edges requested but only {pairs} distinct pairs exist"),
        ));
    }
    let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(count);
    let mut edges = Vec::with_capacity(count);
    let push = |e: (usize, usize), seen: &mut HashSet<(usize, usize)>, edges: &mut Vec<(usize, usize)>| {
        if edges.len() < count && seen.insert(e) {
            edges.push(e);
        }
    };

    if count >= h + t {
        // cover heads, then the still uncovered tails, with structured draws
        for head in 0..h {
            let tail = (plan.tail_for_head)(head, rng);
            push((head, tail), &mut seen, &mut edges);
        }
        let mut covered = vec![false; t];
        for &(_, tail) in &edges {
            covered[tail] = true;
        }
        for tail in (0..t).filter(|&x| !covered[x]) {
            let head = (plan.head_for_tail)(tail, rng);
            push((head, tail), &mut seen, &mut edges);
        }
    } else {
        // pair the two sides cyclically inside each block
        for b in 0..plan.blocks {
            let mut hs: Vec<usize> = (0..h).filter(|&x| plan.head_block[x] == b).collect();
            let mut ts: Vec<usize> = (0..t).filter(|&x| plan.tail_block[x] == b).collect();
            if hs.is_empty() || ts.is_empty() {
                continue;
            }
            hs.shuffle(rng);
            ts.shuffle(rng);
            for k in 0..hs.len().max(ts.len()) {
                push((hs[k % hs.len()], ts[k % ts.len()]), &mut seen, &mut edges);
            }
        }
    }

    // fill the remaining budget
    let dense = count * 2 > pairs;
    let mut attempts = 0usize;
    let max_attempts = 50 * count + 1_000;
    while edges.len() < count && !dense && attempts < max_attempts {
        attempts += 1;
        let head = rng.gen_range(0..h);
        let tail = (plan.tail_for_head)(head, rng);
        push((head, tail), &mut seen, &mut edges);
    }
    if edges.len() < count {
        let mut rest: Vec<(usize, usize)> = (0..h)
            .flat_map(|a| (0..t).map(move |b| (a, b)))
            .filter(|e| !seen.contains(e))
            .collect();
        rest.shuffle(rng);
        for e in rest {
            push(e, &mut seen, &mut edges);
        }
    }
    Ok(edges)
}

/// `len` tokens, each from the home slice with probability 0.7 and from the
/// whole block vocabulary otherwise.
fn title(len: usize, home: &[usize], block: &[usize], rng: &mut ChaCha8Rng) -> String {
    (0..len)
        .map(|_| {
            let pool = if !home.is_empty() && rng.gen::<f64>() < HOME_TOKEN_SHARE {
                home
            } else {
                block
            };
            format!("w{}", pool[rng.gen_range(0..pool.len())])
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Builds a graph for `cfg`.
pub fn generate(cfg: &SynthConfig) -> Result<TypedGraph> {
    cfg.validate()?;
    let seed = cfg.seed;
    if cfg.cites < cfg.articles {
        return Err(infeasible("cites", format!("{} articles need at least one citation each, only {} edges", cfg.articles, cfg.cites)));
    }
    if cfg.has_topic < cfg.articles {
        return Err(infeasible("has_topic", format!("{} articles need at least one topic each, only {} edges", cfg.articles, cfg.has_topic)));
    }
    let layout = Layout::new(cfg, &mut stream_rng(derive_seed(seed, "layout"), 0));
    let uniform_block = |n: usize| vec![0usize; n];

    let topic_for_article = |a: usize, r: &mut ChaCha8Rng| layout.topic_for_article(a, r);
    let article_for_topic = |t: usize, r: &mut ChaCha8Rng| layout.article_for_topic(t, r);
    let paper_for_article = |a: usize, r: &mut ChaCha8Rng| layout.paper_for_article(a, r);
    let article_for_paper = |p: usize, r: &mut ChaCha8Rng| layout.article_for_paper(p, r);
    let paper_any = |_: usize, r: &mut ChaCha8Rng| r.gen_range(0..cfg.papers);
    let author_any = |_: usize, r: &mut ChaCha8Rng| r.gen_range(0..cfg.authors);
    let institute_any = |_: usize, r: &mut ChaCha8Rng| r.gen_range(0..cfg.institutes);

    let plans = [
        (
            CITES,
            RelationPlan {
                name: "cites",
                count: cfg.cites,
                heads: cfg.articles,
                tails: cfg.papers,
                head_block: layout.article_block.clone(),
                tail_block: layout.paper_block.clone(),
                blocks: layout.blocks,
                tail_for_head: &paper_for_article,
                head_for_tail: &article_for_paper,
            },
        ),
        (
            HAS_TOPIC,
            RelationPlan {
                name: "has_topic",
                count: cfg.has_topic,
                heads: cfg.articles,
                tails: cfg.topics,
                head_block: layout.article_block.clone(),
                tail_block: layout.topic_block.clone(),
                blocks: layout.blocks,
                tail_for_head: &topic_for_article,
                head_for_tail: &article_for_topic,
            },
        ),
        (
            IS_AUTHOR_OF,
            RelationPlan {
                name: "is_author_of",
                count: cfg.is_author_of,
                heads: cfg.authors,
                tails: cfg.papers,
                head_block: uniform_block(cfg.authors),
                tail_block: uniform_block(cfg.papers),
                blocks: 1,
                tail_for_head: &paper_any,
                head_for_tail: &author_any,
            },
        ),
        (
            IS_AFFILIATED_WITH,
            RelationPlan {
                name: "is_affiliated_with",
                count: cfg.is_affiliated_with,
                heads: cfg.authors,
                tails: cfg.institutes,
                head_block: uniform_block(cfg.authors),
                tail_block: uniform_block(cfg.institutes),
                blocks: 1,
                tail_for_head: &institute_any,
                head_for_tail: &author_any,
            },
        ),
    ];

    let schema = GraphSchema::scientific_news();
    let mut b = GraphBuilder::new(schema.clone());
    let prefixes = ["t", "a", "p", "au", "i"];
    for (ty, &n) in cfg.node_counts().iter().enumerate() {
        for i in 0..n {
            b.node(ty, &format!("{}{i}", prefixes[ty]));
        }
    }
    let mut degree: Vec<Vec<usize>> = cfg.node_counts().iter().map(|&n| vec![0; n]).collect();
    for (relation, plan) in &plans {
        let mut rng = stream_rng(derive_seed(seed, plan.name), 0);
        let meta = schema.meta(*relation).clone();
        for (h, t) in relation_edges(plan, &mut rng)? {
            degree[meta.head_type][h] += 1;
            degree[meta.tail_type][t] += 1;
            b.add_triple(Triple::new(
                NodeRef::new(meta.head_type, h),
                *relation,
                NodeRef::new(meta.tail_type, t),
            ));
        }
    }
    for (ty, degs) in degree.iter().enumerate() {
        if let Some(i) = degs.iter().position(|&d| d == 0) {
            return Err(infeasible(
                schema.node_types()[ty].as_str(),
                format!("edge counts leave {}{i} without any edge", prefixes[ty]),
            ));
        }
    }

    // titles and dates
    let vocab = cfg.title_vocab_size;
    let blocks = layout.blocks;
    let block_tokens: Vec<Vec<usize>> = (0..blocks)
        .map(|k| (k * vocab / blocks..(k + 1) * vocab / blocks).collect())
        .collect();
    let mut topic_tokens: Vec<Vec<usize>> = vec![Vec::new(); cfg.topics];
    for (k, ts) in layout.topics_in.iter().enumerate() {
        let pool = &block_tokens[k];
        for (j, &t) in ts.iter().enumerate() {
            let lo = j * pool.len() / ts.len();
            let hi = (j + 1) * pool.len() / ts.len();
            topic_tokens[t] = pool[lo..hi].to_vec();
        }
    }
    let mut rng = stream_rng(derive_seed(seed, "titles"), 0);
    let no_tokens: Vec<usize> = Vec::new();
    for (ty, homes, blocks_of) in [
        (ARTICLE, &layout.article_home, &layout.article_block),
        (PAPER, &layout.paper_home, &layout.paper_block),
    ] {
        for i in 0..cfg.node_counts()[ty] {
            let len = rng.gen_range(5..=10);
            let home = topic_tokens.get(homes[i]).unwrap_or(&no_tokens);
            let text = title(len, home, &block_tokens[blocks_of[i]], &mut rng);
            b.attributes_mut(NodeRef::new(ty, i)).title = Some(text);
        }
    }
    let mut rng = stream_rng(derive_seed(seed, "dates"), 0);
    for i in 0..cfg.articles {
        b.attributes_mut(NodeRef::new(ARTICLE, i)).published_date = Some(rng.gen_range(WINDOW_START..=WINDOW_END));
    }
    Ok(b.build())
}
