use std::fmt::Write;

use super::{canonical_order, PointedState};

/// Graphviz rendering of a pointed state.
///
/// Nodes are numbered by [`canonical_order`], so bisimilar inputs that are
/// already contracted render identically. Each node is labeled with its true
/// fluents; the designated world is double-circled. There is one edge per
/// relation pair, labeled with the agent name.
pub fn to_dot(state: &PointedState) -> String {
    let m = state.structure();
    let sig = m.signature();
    let order = canonical_order(state);
    let mut position = vec![0; order.len()];
    for (p, &w) in order.iter().enumerate() {
        position[w] = p;
    }

    let mut out = String::new();
    out.push_str("digraph state {\n");
    out.push_str("  node [shape=circle];\n");
    for (p, &w) in order.iter().enumerate() {
        let fluents: Vec<&str> = sig
            .fluents()
            .iter()
            .enumerate()
            .filter(|(i, _)| m.valuation(w).holds(*i))
            .map(|(_, f)| f.as_str())
            .collect();
        let label = if fluents.is_empty() {
            "{}".to_string()
        } else {
            fluents.join("\\n")
        };
        let shape = if w == state.designated() {
            ", shape=doublecircle"
        } else {
            ""
        };
        let _ = writeln!(out, "  w{p} [label=\"{label}\"{shape}];");
    }
    for &w in &order {
        for (i, agent) in sig.agents().iter().enumerate() {
            let mut targets: Vec<usize> = m.successors(i, w).iter().map(|&v| position[v]).collect();
            targets.sort_unstable();
            for t in targets {
                let _ = writeln!(out, "  w{} -> w{t} [label=\"{agent}\"];", position[w]);
            }
        }
    }
    out.push_str("}\n");
    out
}
