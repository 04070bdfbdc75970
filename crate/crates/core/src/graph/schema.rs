//! Node types, relation types and the meta relations connecting them.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinality {
    OneToMany,
    ManyToMany,
}

/// A schema-level `(head_type, relation, tail_type)` triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MetaRelation {
    pub head_type: usize,
    pub relation: usize,
    pub tail_type: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSchema {
    node_types: Vec<String>,
    relation_types: Vec<String>,
    meta_relations: Vec<MetaRelation>,
    cardinality: Vec<Cardinality>,
    /// For an inverse relation, the original it transposes.
    inverse_of: Vec<Option<usize>>,
}

pub const TOPIC: usize = 0;
pub const ARTICLE: usize = 1;
pub const PAPER: usize = 2;
pub const AUTHOR: usize = 3;
pub const INSTITUTE: usize = 4;

pub const CITES: usize = 0;
pub const HAS_TOPIC: usize = 1;
pub const IS_AUTHOR_OF: usize = 2;
pub const IS_AFFILIATED_WITH: usize = 3;

impl GraphSchema {
    /// Builds a schema from `(head_type, relation, tail_type, cardinality)` rows.
    ///
    /// Relations are numbered in row order; each relation appears in exactly
    /// one meta relation. Panics on unknown node type names.
    pub fn new(node_types: &[&str], relations: &[(&str, &str, &str, Cardinality)]) -> Self {
        let node_types: Vec<String> = node_types.iter().map(|s| s.to_string()).collect();
        let lookup = |name: &str| {
            node_types
                .iter()
                .position(|t| t == name)
                .unwrap_or_else(|| panic!("node type `{name}` not declared"))
        };
        let mut relation_types = Vec::with_capacity(relations.len());
        let mut meta_relations = Vec::with_capacity(relations.len());
        let mut cardinality = Vec::with_capacity(relations.len());
        for (idx, (head, rel, tail, card)) in relations.iter().enumerate() {
            assert!(
                !relation_types.iter().any(|r: &String| r == rel),
                "relation `{rel}` declared twice"
            );
            relation_types.push(rel.to_string());
            meta_relations.push(MetaRelation {
                head_type: lookup(head),
                relation: idx,
                tail_type: lookup(tail),
            });
            cardinality.push(*card);
        }
        let inverse_of = vec![None; relation_types.len()];
        GraphSchema {
            node_types,
            relation_types,
            meta_relations,
            cardinality,
            inverse_of,
        }
    }

    /// The five-type, four-relation scientific news schema.
    pub fn scientific_news() -> Self {
        use Cardinality::*;
        GraphSchema::new(
            &["topic", "article", "paper", "author", "institute"],
            &[
                ("article", "cites", "paper", ManyToMany),
                ("article", "has_topic", "topic", ManyToMany),
                ("author", "is_author_of", "paper", ManyToMany),
                ("author", "is_affiliated_with", "institute", OneToMany),
            ],
        )
    }

    pub fn node_types(&self) -> &[String] {
        &self.node_types
    }

    pub fn relation_types(&self) -> &[String] {
        &self.relation_types
    }

    pub fn meta_relations(&self) -> &[MetaRelation] {
        &self.meta_relations
    }

    pub fn num_node_types(&self) -> usize {
        self.node_types.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relation_types.len()
    }

    pub fn node_type_index(&self, name: &str) -> Option<usize> {
        self.node_types.iter().position(|t| t == name)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relation_types.iter().position(|r| r == name)
    }

    pub fn meta(&self, relation: usize) -> &MetaRelation {
        &self.meta_relations[relation]
    }

    pub fn cardinality(&self, relation: usize) -> Cardinality {
        self.cardinality[relation]
    }

    pub fn inverse_of(&self, relation: usize) -> Option<usize> {
        self.inverse_of[relation]
    }

    pub fn is_inverse(&self, relation: usize) -> bool {
        self.inverse_of[relation].is_some()
    }

    pub fn is_augmented(&self) -> bool {
        self.inverse_of.iter().any(Option::is_some)
    }

    /// Relations that are not inverses, in declaration order.
    pub fn original_relations(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_relations()).filter(|&r| !self.is_inverse(r))
    }

    /// Appends `<name>_inv` for every relation, with head and tail swapped.
    pub(crate) fn with_inverses(&self) -> GraphSchema {
        let mut out = self.clone();
        let n = self.num_relations();
        for r in 0..n {
            let meta = &self.meta_relations[r];
            out.relation_types.push(format!("{}_inv", self.relation_types[r]));
            out.meta_relations.push(MetaRelation {
                head_type: meta.tail_type,
                relation: n + r,
                tail_type: meta.head_type,
            });
            out.cardinality.push(self.cardinality[r]);
            out.inverse_of.push(Some(r));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schema_shape() {
        let s = GraphSchema::scientific_news();
        assert_eq!(s.num_node_types(), 5);
        assert_eq!(s.num_relations(), 4);
        assert_eq!(s.cardinality(HAS_TOPIC), Cardinality::ManyToMany);
        assert_eq!(s.node_type_index("article"), Some(ARTICLE));
        assert_eq!(s.relation_index("is_affiliated_with"), Some(IS_AFFILIATED_WITH));
        for (r, meta) in s.meta_relations().iter().enumerate() {
            assert_eq!(meta.relation, r);
        }
        assert_eq!(s.meta(CITES).head_type, ARTICLE);
        assert_eq!(s.meta(CITES).tail_type, PAPER);
        assert_eq!(s.meta(IS_AUTHOR_OF).head_type, AUTHOR);
        assert_eq!(s.meta(IS_AFFILIATED_WITH).tail_type, INSTITUTE);
        assert_eq!(s.meta(HAS_TOPIC).tail_type, TOPIC);
    }

    #[test]
    fn inverses_transpose_meta_relations() {
        let s = GraphSchema::scientific_news().with_inverses();
        assert_eq!(s.num_relations(), 8);
        assert_eq!(s.relation_types()[4], "cites_inv");
        assert_eq!(s.meta(4).head_type, PAPER);
        assert_eq!(s.meta(4).tail_type, ARTICLE);
        assert_eq!(s.inverse_of(4), Some(CITES));
        assert_eq!(s.original_relations().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }
}
