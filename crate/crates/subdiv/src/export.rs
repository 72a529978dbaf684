//! Table serialization: CSV with columns n,sg and a versioned JSON document.

use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::{GameSpec, SgTable};

pub const SCHEMA: u32 = 1;

#[derive(Serialize)]
struct TableDoc<'a> {
    schema: u32,
    spec: &'a GameSpec,
    n_max: u64,
    values: &'a [u8],
}

pub fn to_csv(table: &SgTable) -> String {
    let mut s = String::with_capacity(table.values().len() * 8 + 8);
    s.push_str("n,sg\n");
    for (i, v) in table.values().iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, v);
    }
    s
}

pub fn to_json(table: &SgTable) -> String {
    let doc = TableDoc { schema: SCHEMA, spec: table.spec(), n_max: table.n_max(), values: table.values() };
    serde_json::to_string(&doc).expect("table serializes")
}

/// Values separated by commas on one line.
pub fn to_list(table: &SgTable) -> String {
    let mut s = String::with_capacity(table.values().len() * 2 + 1);
    for (i, v) in table.values().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{v}");
    }
    s.push('\n');
    s
}
