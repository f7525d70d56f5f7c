//! Graphviz export of a functional graph with the preperiodic partition
//! encoded in node shapes: periodic points are double circles, stratum `n`
//! cycles through a fixed shape list keyed by `n`.

use strata_core::dynamo::{FunctionTable, OrbitClassification};

use crate::AppError;

/// Rendering cap; one node and one edge per element.
pub const DOT_NODE_LIMIT: u64 = 5000;

const STRATUM_SHAPES: [&str; 5] = ["box", "triangle", "diamond", "star", "octagon"];

pub fn stratum_shape(n: u32) -> &'static str {
    STRATUM_SHAPES[(n as usize) % STRATUM_SHAPES.len()]
}

pub fn emit_dot(
    table: &FunctionTable,
    classification: &OrbitClassification,
    title: &str,
) -> Result<String, AppError> {
    let q = table.q();
    if q > DOT_NODE_LIMIT {
        return Err(AppError::Domain(format!(
            "domain size {q} exceeds the DOT rendering limit {DOT_NODE_LIMIT}"
        )));
    }
    assert_eq!(classification.len(), q);
    let mut out = String::new();
    out.push_str("digraph functional_graph {\n");
    out.push_str(&format!("  label=\"{title}\";\n"));
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontsize=10];\n");
    out.push_str("  // periodic: doublecircle; stratum n: shape keyed by n\n");
    for n in 0..STRATUM_SHAPES.len() as u32 {
        out.push_str(&format!("  // stratum {n} (mod 5): {}\n", stratum_shape(n)));
    }
    for code in 0..q {
        let shape = match classification.stratum(code) {
            None => "doublecircle",
            Some(n) => stratum_shape(n),
        };
        out.push_str(&format!("  n{code} [label=\"{code}\", shape={shape}];\n"));
    }
    for code in 0..q {
        out.push_str(&format!("  n{code} -> n{};\n", table.apply(code)));
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use strata_core::TableLimit;

    #[test]
    fn dot_for_x2_plus_1_over_f5() {
        let t = FunctionTable::from_next(vec![1, 2, 0, 0, 2], TableLimit::default()).unwrap();
        let c = t.tail_depths();
        let dot = emit_dot(&t, &c, "x^2 + 1 over F_5").unwrap();
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), 5);
        // cycle 0 -> 1 -> 2 -> 0 periodic, 3 and 4 in stratum 0
        for periodic in [0, 1, 2] {
            assert!(dot.contains(&format!("n{periodic} [label=\"{periodic}\", shape=doublecircle]")));
        }
        for tail in [3, 4] {
            assert!(dot.contains(&format!("n{tail} [label=\"{tail}\", shape=box]")));
        }
    }

    #[test]
    fn dot_identity_is_all_self_loops() {
        let t = FunctionTable::build(3, TableLimit::default(), |x| x).unwrap();
        let dot = emit_dot(&t, &t.tail_depths(), "identity").unwrap();
        for code in 0..3 {
            assert!(dot.contains(&format!("n{code} -> n{code};")));
            assert!(dot.contains("shape=doublecircle"));
        }
    }

    #[test]
    fn dot_constant_is_a_star() {
        let t = FunctionTable::build(4, TableLimit::default(), |_| 2).unwrap();
        let dot = emit_dot(&t, &t.tail_depths(), "constant").unwrap();
        assert_eq!(dot.matches("-> n2;").count(), 4);
        assert_eq!(dot.matches("shape=doublecircle").count(), 1);
        assert_eq!(dot.matches("shape=box").count(), 3);
    }

    #[test]
    fn dot_respects_the_node_limit() {
        let t = FunctionTable::build(6000, TableLimit::default(), |_| 0).unwrap();
        assert!(emit_dot(&t, &t.tail_depths(), "too big").is_err());
    }
}
