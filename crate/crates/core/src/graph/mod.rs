//! Typed heterogeneous graph storage, loading and indexing.

mod io;
pub mod schema;
mod store;

pub use io::{format_date, load_graph, parse_date, parse_graph, write_attributes, write_edge_list};
pub use schema::{Cardinality, GraphSchema, MetaRelation};
pub use store::{
    DegreeSummary, Direction, GraphBuilder, NodeAttributes, NodeRef, Triple, TypedGraph,
};
