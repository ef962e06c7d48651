//! CSV export: `order,chromatic,clique,edges,adj_hex`, where `adj_hex` is the
//! packed upper triangle of the binary format, hex encoded.

use std::fmt::Write as _;

use super::format::pack_adjacency;
use super::Dataset;

pub const CSV_HEADER: &str = "order,chromatic,clique,edges,adj_hex";

pub fn to_csv(ds: &Dataset) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &ds.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.graph.order(),
            r.chromatic,
            r.clique,
            r.edges,
            hex::encode(pack_adjacency(&r.graph))
        );
    }
    out
}
