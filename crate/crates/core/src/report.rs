//! Deterministic renderings of functional graphs and verification reports:
//! plain-digraph DOT, versioned JSON summaries, and CSV statistics rows.
//!
//! Identical inputs produce byte-identical output: vertices are emitted in
//! id order and edges in source order, so files diff cleanly.

use serde::Serialize;
use serde_json::json;

use crate::graphs::{FunctionalGraph, GraphStatsRecord, StructureReport};

/// Schema version stamped on every JSON document.
pub const JSON_SCHEMA: u32 = 1;

/// Vertex highlighting for DOT output: `mask[v]` marks vertex v with the
/// given fill color.
#[derive(Debug, Clone)]
pub struct Highlight {
    pub mask: Vec<bool>,
    pub color: String,
}

/// Plain-digraph DOT: one node line per vertex (in id order), one
/// `"a" -> "b"` line per edge (in source order).
pub fn to_dot(g: &FunctionalGraph, name: &str, highlight: Option<&Highlight>) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph {name} {{\n"));
    for v in 0..g.n() {
        let marked = highlight.map(|h| h.mask[v]).unwrap_or(false);
        if marked {
            let color = &highlight.unwrap().color;
            out.push_str(&format!(
                "  \"{}\" [style=filled, fillcolor={}];\n",
                g.label(v),
                color
            ));
        } else {
            out.push_str(&format!("  \"{}\";\n", g.label(v)));
        }
    }
    for v in 0..g.n() {
        out.push_str(&format!("  \"{}\" -> \"{}\";\n", g.label(v), g.label(g.succ(v))));
    }
    out.push_str("}\n");
    out
}

/// JSON summary of a graph's component decomposition.
pub fn components_json(g: &FunctionalGraph, q: u128, map: &str) -> String {
    let dec = g.decompose();
    let components: Vec<_> = dec
        .components
        .iter()
        .map(|c| {
            json!({
                "cycle": c.cycle.iter().map(|&v| g.label(v)).collect::<Vec<_>>(),
                "cycle_length": c.cycle.len(),
                "size": c.size,
                "tree_sizes": c.tree_sizes,
                "leaf_depths": c.leaf_depths,
                "indegree_histogram": c.indegree_histogram,
            })
        })
        .collect();
    let doc = json!({
        "schema": JSON_SCHEMA,
        "q": q.to_string(),
        "map": map,
        "n_vertices": g.n(),
        "n_components": dec.components.len(),
        "periodic_count": dec.periodic_count(),
        "components": components,
    });
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

/// JSON document for a batch of verification reports.
pub fn reports_json(reports: &[StructureReport]) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        passed: bool,
        results: &'a [StructureReport],
    }
    let doc = Doc {
        schema: JSON_SCHEMA,
        passed: reports.iter().all(|r| r.passed()),
        results: reports,
    };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

pub const STATS_CSV_HEADER: &str =
    "q,map,n_vertices,n_components,cycle_length_multiset,max_tree_depth,n_leaves,n_self_loops,periodic_count";

/// One CSV row; the cycle-length multiset is encoded as
/// `len:count` pairs joined by semicolons.
pub fn stats_csv_row(s: &GraphStatsRecord) -> String {
    let multiset = s
        .cycle_lengths
        .iter()
        .map(|(l, c)| format!("{l}:{c}"))
        .collect::<Vec<_>>()
        .join(";");
    format!(
        "{},{},{},{},{},{},{},{},{}",
        s.q,
        s.map,
        s.n_vertices,
        s.n_components,
        multiset,
        s.max_tree_depth,
        s.n_leaves,
        s.n_self_loops,
        s.periodic_count
    )
}
