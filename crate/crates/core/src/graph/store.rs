use std::collections::{HashMap, HashSet};

use super::schema::GraphSchema;
use crate::error::{Error, Result};

/// A node addressed by its type and its dense id within that type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    pub node_type: usize,
    pub local_id: usize,
}

impl NodeRef {
    pub fn new(node_type: usize, local_id: usize) -> Self {
        NodeRef {
            node_type,
            local_id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub head: NodeRef,
    pub relation: usize,
    pub tail: NodeRef,
}

impl Triple {
    pub fn new(head: NodeRef, relation: usize, tail: NodeRef) -> Self {
        Triple {
            head,
            relation,
            tail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeAttributes {
    pub title: Option<String>,
    /// Days since 1970-01-01.
    pub published_date: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSummary {
    pub node_type: usize,
    pub relation: usize,
    pub direction: Direction,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

/// Immutable typed node/edge store with per-relation forward and inverse
/// adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedGraph {
    schema: GraphSchema,
    labels: Vec<Vec<String>>,
    label_index: Vec<HashMap<String, usize>>,
    offsets: Vec<usize>,
    triples: Vec<Triple>,
    forward: Vec<Vec<Vec<usize>>>,
    inverse: Vec<Vec<Vec<usize>>>,
    attributes: Vec<Vec<NodeAttributes>>,
    duplicates_dropped: usize,
}

/// Incremental construction of a [`TypedGraph`]: nodes are numbered densely
/// per type in first-appearance order of their external label.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    schema: GraphSchema,
    labels: Vec<Vec<String>>,
    label_index: Vec<HashMap<String, usize>>,
    triples: Vec<Triple>,
    seen: HashSet<Triple>,
    attributes: Vec<Vec<NodeAttributes>>,
    duplicates_dropped: usize,
}

impl GraphBuilder {
    pub fn new(schema: GraphSchema) -> Self {
        let n = schema.num_node_types();
        GraphBuilder {
            schema,
            labels: vec![Vec::new(); n],
            label_index: vec![HashMap::new(); n],
            triples: Vec::new(),
            seen: HashSet::new(),
            attributes: vec![Vec::new(); n],
            duplicates_dropped: 0,
        }
    }

    pub fn schema(&self) -> &GraphSchema {
        &self.schema
    }

    /// Returns the node for `label`, creating it on first sight.
    pub fn node(&mut self, node_type: usize, label: &str) -> NodeRef {
        if let Some(&id) = self.label_index[node_type].get(label) {
            return NodeRef::new(node_type, id);
        }
        let id = self.labels[node_type].len();
        self.labels[node_type].push(label.to_string());
        self.label_index[node_type].insert(label.to_string(), id);
        self.attributes[node_type].push(NodeAttributes::default());
        NodeRef::new(node_type, id)
    }

    pub fn lookup(&self, node_type: usize, label: &str) -> Option<NodeRef> {
        self.label_index[node_type]
            .get(label)
            .map(|&id| NodeRef::new(node_type, id))
    }

    /// Adds a triple; returns false (and counts a duplicate) when already present.
    ///
    /// Panics if the endpoint types contradict the relation's meta relation.
    pub fn add_triple(&mut self, triple: Triple) -> bool {
        let meta = self.schema.meta(triple.relation);
        assert!(
            meta.head_type == triple.head.node_type && meta.tail_type == triple.tail.node_type,
            "triple {triple:?} violates schema"
        );
        if !self.seen.insert(triple) {
            self.duplicates_dropped += 1;
            return false;
        }
        self.triples.push(triple);
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.seen.contains(triple)
    }

    pub fn num_triples(&self) -> usize {
        self.triples.len()
    }

    pub fn node_count(&self, node_type: usize) -> usize {
        self.labels[node_type].len()
    }

    pub fn attributes_mut(&mut self, node: NodeRef) -> &mut NodeAttributes {
        &mut self.attributes[node.node_type][node.local_id]
    }

    pub fn build(self) -> TypedGraph {
        TypedGraph::assemble(
            self.schema,
            self.labels,
            self.label_index,
            self.triples,
            self.attributes,
            self.duplicates_dropped,
        )
    }
}

impl TypedGraph {
    fn assemble(
        schema: GraphSchema,
        labels: Vec<Vec<String>>,
        label_index: Vec<HashMap<String, usize>>,
        triples: Vec<Triple>,
        attributes: Vec<Vec<NodeAttributes>>,
        duplicates_dropped: usize,
    ) -> TypedGraph {
        let counts: Vec<usize> = labels.iter().map(Vec::len).collect();
        let mut offsets = Vec::with_capacity(counts.len() + 1);
        let mut acc = 0;
        for c in &counts {
            offsets.push(acc);
            acc += c;
        }
        offsets.push(acc);

        let mut forward = Vec::with_capacity(schema.num_relations());
        let mut inverse = Vec::with_capacity(schema.num_relations());
        for meta in schema.meta_relations() {
            forward.push(vec![Vec::new(); counts[meta.head_type]]);
            inverse.push(vec![Vec::new(); counts[meta.tail_type]]);
        }
        for t in &triples {
            forward[t.relation][t.head.local_id].push(t.tail.local_id);
            inverse[t.relation][t.tail.local_id].push(t.head.local_id);
        }
        for lists in forward.iter_mut().chain(inverse.iter_mut()) {
            for l in lists.iter_mut() {
                l.sort_unstable();
            }
        }
        TypedGraph {
            schema,
            labels,
            label_index,
            offsets,
            triples,
            forward,
            inverse,
            attributes,
            duplicates_dropped,
        }
    }

    pub fn schema(&self) -> &GraphSchema {
        &self.schema
    }

    pub fn node_count(&self, node_type: usize) -> usize {
        self.labels[node_type].len()
    }

    pub fn node_counts(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn total_nodes(&self) -> usize {
        self.offsets[self.offsets.len() - 1]
    }

    /// Start of `node_type`'s block in the global node numbering.
    pub fn offset(&self, node_type: usize) -> usize {
        self.offsets[node_type]
    }

    pub fn global_id(&self, node: NodeRef) -> usize {
        self.offsets[node.node_type] + node.local_id
    }

    pub fn node_at(&self, global: usize) -> NodeRef {
        let t = self.offsets.partition_point(|&o| o <= global) - 1;
        NodeRef::new(t, global - self.offsets[t])
    }

    /// Node type of every node, in global order.
    pub fn global_types(&self) -> Vec<usize> {
        (0..self.schema.num_node_types())
            .flat_map(|t| std::iter::repeat(t).take(self.node_count(t)))
            .collect()
    }

    pub fn label(&self, node: NodeRef) -> &str {
        &self.labels[node.node_type][node.local_id]
    }

    pub fn labels(&self, node_type: usize) -> &[String] {
        &self.labels[node_type]
    }

    pub fn lookup(&self, node_type: usize, label: &str) -> Option<NodeRef> {
        self.label_index[node_type]
            .get(label)
            .map(|&id| NodeRef::new(node_type, id))
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn num_triples(&self) -> usize {
        self.triples.len()
    }

    pub fn relation_count(&self, relation: usize) -> usize {
        self.forward[relation].iter().map(Vec::len).sum()
    }

    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.forward
            .get(t.relation)
            .and_then(|heads| heads.get(t.head.local_id))
            .is_some_and(|tails| tails.binary_search(&t.tail.local_id).is_ok())
    }

    pub fn attributes(&self, node: NodeRef) -> &NodeAttributes {
        &self.attributes[node.node_type][node.local_id]
    }

    /// Local ids adjacent to `node` under `relation`, ascending.
    pub fn neighbor_ids(&self, node: NodeRef, relation: usize, direction: Direction) -> &[usize] {
        let meta = self.schema.meta(relation);
        let (table, expected) = match direction {
            Direction::Forward => (&self.forward[relation], meta.head_type),
            Direction::Inverse => (&self.inverse[relation], meta.tail_type),
        };
        if node.node_type != expected {
            return &[];
        }
        &table[node.local_id]
    }

    pub fn neighbors(&self, node: NodeRef, relation: usize, direction: Direction) -> Vec<NodeRef> {
        let meta = self.schema.meta(relation);
        let other = match direction {
            Direction::Forward => meta.tail_type,
            Direction::Inverse => meta.head_type,
        };
        self.neighbor_ids(node, relation, direction)
            .iter()
            .map(|&id| NodeRef::new(other, id))
            .collect()
    }

    /// Min, max and mean degree per (node type, relation, direction).
    pub fn degree_stats(&self) -> Vec<DegreeSummary> {
        let mut out = Vec::new();
        for (r, meta) in self.schema.meta_relations().iter().enumerate() {
            for (direction, node_type, table) in [
                (Direction::Forward, meta.head_type, &self.forward[r]),
                (Direction::Inverse, meta.tail_type, &self.inverse[r]),
            ] {
                let degrees = table.iter().map(Vec::len);
                let n = table.len();
                let total: usize = degrees.clone().sum();
                out.push(DegreeSummary {
                    node_type,
                    relation: r,
                    direction,
                    min: degrees.clone().min().unwrap_or(0),
                    max: degrees.max().unwrap_or(0),
                    mean: if n == 0 { 0.0 } else { total as f64 / n as f64 },
                });
            }
        }
        out
    }

    /// Adds `r_inv` with transposed triples for every relation `r`.
    pub fn augment_with_inverses(&self) -> Result<TypedGraph> {
        if self.schema.is_augmented() {
            return Err(Error::AlreadyAugmented);
        }
        let n = self.schema.num_relations();
        let schema = self.schema.with_inverses();
        let mut triples = self.triples.clone();
        triples.extend(
            self.triples
                .iter()
                .map(|t| Triple::new(t.tail, t.relation + n, t.head)),
        );
        Ok(TypedGraph::assemble(
            schema,
            self.labels.clone(),
            self.label_index.clone(),
            triples,
            self.attributes.clone(),
            self.duplicates_dropped,
        ))
    }

    /// Same nodes, labels and attributes with a different triple set.
    pub fn with_triples(&self, triples: Vec<Triple>) -> TypedGraph {
        let mut seen = HashSet::with_capacity(triples.len());
        let mut kept = Vec::with_capacity(triples.len());
        for t in triples {
            if seen.insert(t) {
                kept.push(t);
            }
        }
        TypedGraph::assemble(
            self.schema.clone(),
            self.labels.clone(),
            self.label_index.clone(),
            kept,
            self.attributes.clone(),
            0,
        )
    }

    /// Triples of original (non-inverse) relations.
    pub fn original_triples(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples
            .iter()
            .filter(|t| !self.schema.is_inverse(t.relation))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::schema::*;

    fn small() -> TypedGraph {
        let mut b = GraphBuilder::new(GraphSchema::scientific_news());
        let a0 = b.node(ARTICLE, "a0");
        let p0 = b.node(PAPER, "p0");
        let p1 = b.node(PAPER, "p1");
        let _lonely = b.node(PAPER, "p2");
        b.add_triple(Triple::new(a0, CITES, p1));
        b.add_triple(Triple::new(a0, CITES, p0));
        assert!(!b.add_triple(Triple::new(a0, CITES, p0)));
        b.build()
    }

    #[test]
    fn neighbors_sorted_and_transposed() {
        let g = small();
        let a0 = g.lookup(ARTICLE, "a0").unwrap();
        let p0 = g.lookup(PAPER, "p0").unwrap();
        let p1 = g.lookup(PAPER, "p1").unwrap();
        assert_eq!(g.neighbors(a0, CITES, Direction::Forward), vec![p0, p1]);
        assert_eq!(g.neighbors(p0, CITES, Direction::Inverse), vec![a0]);
        let p2 = g.lookup(PAPER, "p2").unwrap();
        assert!(g.neighbors(p2, CITES, Direction::Inverse).is_empty());
        assert_eq!(g.duplicates_dropped(), 1);
        assert_eq!(g.num_triples(), 2);
    }

    #[test]
    fn global_ids_round_trip() {
        let g = small();
        for gid in 0..g.total_nodes() {
            assert_eq!(g.global_id(g.node_at(gid)), gid);
        }
        assert_eq!(g.global_types(), vec![ARTICLE, PAPER, PAPER, PAPER]);
    }

    #[test]
    fn single_triple_degree_stats() {
        let mut b = GraphBuilder::new(GraphSchema::scientific_news());
        let a = b.node(ARTICLE, "a");
        let t = b.node(TOPIC, "t");
        b.add_triple(Triple::new(a, HAS_TOPIC, t));
        let g = b.build();
        let s = g
            .degree_stats()
            .into_iter()
            .find(|s| s.relation == HAS_TOPIC && s.direction == Direction::Forward)
            .unwrap();
        assert_eq!((s.min, s.max, s.mean), (1, 1, 1.0));
    }

    #[test]
    fn augmentation_doubles_and_refuses_twice() {
        let g = small();
        let aug = g.augment_with_inverses().unwrap();
        assert_eq!(aug.schema().num_relations(), 8);
        assert_eq!(aug.num_triples(), 4);
        let a0 = aug.lookup(ARTICLE, "a0").unwrap();
        let p0 = aug.lookup(PAPER, "p0").unwrap();
        assert!(aug.contains(&Triple::new(p0, CITES + 4, a0)));
        assert!(matches!(
            aug.augment_with_inverses(),
            Err(Error::AlreadyAugmented)
        ));
    }
}
