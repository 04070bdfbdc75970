//! Tab-separated edge-list and attribute files.
//!
//! Edge rows: `head_type  head_id  relation  tail_type  tail_id`.
//! Attribute rows: `node_type  node_id  key  value` with keys `title` and
//! `published_date` (ISO-8601 date). Lines starting with `#` are skipped.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;

use super::schema::GraphSchema;
use super::store::{GraphBuilder, Triple, TypedGraph};
use crate::error::{Error, Result};

pub fn load_graph(
    edge_file: &Path,
    attribute_file: Option<&Path>,
    schema: GraphSchema,
) -> Result<TypedGraph> {
    let edges = fs::read_to_string(edge_file)?;
    let attrs = match attribute_file {
        Some(p) => Some(fs::read_to_string(p)?),
        None => None,
    };
    parse_graph(&edges, attrs.as_deref(), schema)
}

fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').collect()))
        }
    })
}

pub fn parse_graph(edges: &str, attributes: Option<&str>, schema: GraphSchema) -> Result<TypedGraph> {
    let mut b = GraphBuilder::new(schema);
    for (line, cols) in rows(edges) {
        if cols.len() != 5 {
            return Err(Error::MalformedRow {
                line,
                expected: 5,
                found: cols.len(),
            });
        }
        let s = b.schema();
        let unknown = |name: &str| Error::UnknownType {
            line,
            name: name.to_string(),
        };
        let head_type = s.node_type_index(cols[0]).ok_or_else(|| unknown(cols[0]))?;
        let relation = s.relation_index(cols[2]).ok_or_else(|| unknown(cols[2]))?;
        let tail_type = s.node_type_index(cols[3]).ok_or_else(|| unknown(cols[3]))?;
        let meta = s.meta(relation);
        if meta.head_type != head_type || meta.tail_type != tail_type {
            return Err(Error::SchemaViolation {
                line,
                detail: format!(
                    "relation `{}` connects {} -> {}, row has {} -> {}",
                    cols[2],
                    s.node_types()[meta.head_type],
                    s.node_types()[meta.tail_type],
                    cols[0],
                    cols[3]
                ),
            });
        }
        let head = b.node(head_type, cols[1]);
        let tail = b.node(tail_type, cols[4]);
        b.add_triple(Triple::new(head, relation, tail));
    }
    if b.num_triples() == 0 {
        return Err(Error::EmptyGraph);
    }
    if let Some(text) = attributes {
        for (line, cols) in rows(text) {
            if cols.len() != 4 {
                return Err(Error::MalformedRow {
                    line,
                    expected: 4,
                    found: cols.len(),
                });
            }
            let node_type = b
                .schema()
                .node_type_index(cols[0])
                .ok_or_else(|| Error::UnknownType {
                    line,
                    name: cols[0].to_string(),
                })?;
            let node = b.lookup(node_type, cols[1]).ok_or_else(|| Error::UnknownNode {
                line,
                node: format!("{}:{}", cols[0], cols[1]),
            })?;
            match cols[2] {
                "title" => b.attributes_mut(node).title = Some(cols[3].to_string()),
                "published_date" => {
                    let days = parse_date(cols[3]).ok_or_else(|| Error::BadDate {
                        line,
                        value: cols[3].to_string(),
                    })?;
                    b.attributes_mut(node).published_date = Some(days);
                }
                other => {
                    return Err(Error::SchemaViolation {
                        line,
                        detail: format!("unknown attribute key `{other}`"),
                    })
                }
            }
        }
    }
    let g = b.build();
    if g.duplicates_dropped() > 0 {
        log::warn!("dropped {} duplicate triples", g.duplicates_dropped());
    }
    Ok(g)
}

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date")
}

/// Days since 1970-01-01 for an ISO-8601 calendar date.
pub fn parse_date(s: &str) -> Option<i64> {
    let d = NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()?;
    Some((d - epoch()).num_days())
}

pub fn format_date(days: i64) -> String {
    (epoch() + chrono::Duration::days(days))
        .format("%Y-%m-%d")
        .to_string()
}

pub fn write_edge_list<W: Write>(g: &TypedGraph, mut out: W) -> std::io::Result<()> {
    let s = g.schema();
    for t in g.original_triples() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            s.node_types()[t.head.node_type],
            g.label(t.head),
            s.relation_types()[t.relation],
            s.node_types()[t.tail.node_type],
            g.label(t.tail)
        )?;
    }
    Ok(())
}

pub fn write_attributes<W: Write>(g: &TypedGraph, mut out: W) -> std::io::Result<()> {
    let s = g.schema();
    for (t, type_name) in s.node_types().iter().enumerate() {
        for (id, label) in g.labels(t).iter().enumerate() {
            let attrs = g.attributes(super::NodeRef::new(t, id));
            if let Some(title) = &attrs.title {
                let clean: String = title
                    .chars()
                    .map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c })
                    .collect();
                writeln!(out, "{type_name}\t{label}\ttitle\t{clean}")?;
            }
            if let Some(days) = attrs.published_date {
                writeln!(out, "{type_name}\t{label}\tpublished_date\t{}", format_date(days))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::schema::*;
    use crate::graph::NodeRef;

    const FIXTURE: &str = "\
# nine rows, all four relations
article\ta0\tcites\tpaper\tp0
article\ta0\tcites\tpaper\tp1
article\ta1\tcites\tpaper\tp1
article\ta0\thas_topic\ttopic\tt0
article\ta1\thas_topic\ttopic\tt1
author\tu0\tis_author_of\tpaper\tp0
author\tu1\tis_author_of\tpaper\tp1
author\tu0\tis_affiliated_with\tinstitute\ti0
author\tu1\tis_affiliated_with\tinstitute\ti0
";

    #[test]
    fn loads_fixture() {
        let g = parse_graph(FIXTURE, None, GraphSchema::scientific_news()).unwrap();
        assert_eq!(g.node_counts(), vec![2, 2, 2, 2, 1]);
        assert_eq!(g.total_nodes(), 9);
        assert_eq!(g.num_triples(), 9);
        // first-appearance numbering
        assert_eq!(g.lookup(PAPER, "p1"), Some(NodeRef::new(PAPER, 1)));
    }

    #[test]
    fn empty_file_is_an_error() {
        let err = parse_graph("# nothing\n\n", None, GraphSchema::scientific_news()).unwrap_err();
        assert!(matches!(err, Error::EmptyGraph));
    }

    #[test]
    fn schema_violation_reported() {
        let err = parse_graph(
            "topic\tt0\tcites\tpaper\tp0\n",
            None,
            GraphSchema::scientific_news(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::SchemaViolation { line: 1, .. }));
    }

    #[test]
    fn unknown_and_malformed_rows() {
        let s = GraphSchema::scientific_news;
        assert!(matches!(
            parse_graph("article\ta\tmentions\tpaper\tp\n", None, s()),
            Err(Error::UnknownType { .. })
        ));
        assert!(matches!(
            parse_graph("article\ta\tcites\tpaper\n", None, s()),
            Err(Error::MalformedRow { found: 4, .. })
        ));
    }

    #[test]
    fn attributes_parse_and_reject_bad_dates() {
        let attrs = "article\ta0\ttitle\tVaccine trial results\narticle\ta0\tpublished_date\t2020-08-01\n";
        let g = parse_graph(FIXTURE, Some(attrs), GraphSchema::scientific_news()).unwrap();
        let a0 = g.lookup(ARTICLE, "a0").unwrap();
        assert_eq!(g.attributes(a0).title.as_deref(), Some("Vaccine trial results"));
        assert_eq!(g.attributes(a0).published_date, parse_date("2020-08-01"));
        assert_eq!(format_date(parse_date("2020-11-30").unwrap()), "2020-11-30");

        let bad = "article\ta0\tpublished_date\t2020-11-31\n";
        assert!(matches!(
            parse_graph(FIXTURE, Some(bad), GraphSchema::scientific_news()),
            Err(Error::BadDate { line: 1, .. })
        ));
        let ghost = "article\tzz\ttitle\tx\n";
        assert!(matches!(
            parse_graph(FIXTURE, Some(ghost), GraphSchema::scientific_news()),
            Err(Error::UnknownNode { .. })
        ));
    }

    #[test]
    fn write_then_reload_is_identical() {
        let attrs = "article\ta1\ttitle\tSpace probe\narticle\ta1\tpublished_date\t2020-09-12\n";
        let g = parse_graph(FIXTURE, Some(attrs), GraphSchema::scientific_news()).unwrap();
        let mut e = Vec::new();
        let mut a = Vec::new();
        write_edge_list(&g, &mut e).unwrap();
        write_attributes(&g, &mut a).unwrap();
        let g2 = parse_graph(
            std::str::from_utf8(&e).unwrap(),
            Some(std::str::from_utf8(&a).unwrap()),
            GraphSchema::scientific_news(),
        )
        .unwrap();
        assert_eq!(g, g2);
    }
}
