//! Analysis artifacts: per-method control-flow graphs and the application
//! call graph, rendered as DOT.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::dex::MethodRef;
use crate::ir::{build_cfg, emit_text, Body, CfgError, EdgeKind, Statement, StmtId};

/// Declared-target call graph: one edge per invoke statement; external
/// callees appear as leaves.
#[derive(Debug, Clone)]
pub struct CallGraph {
    pub nodes: Vec<MethodRef>,
    pub edges: Vec<CallEdge>,
}

#[derive(Debug, Clone)]
pub struct CallEdge {
    pub caller: MethodRef,
    pub site: StmtId,
    pub callee: MethodRef,
    pub kind: crate::ir::InvokeKind,
}

/// Renders a method's CFG as a DOT digraph. Node labels are the emitted
/// statement text; edges are labelled fall-through/branch/case/exceptional.
pub fn cfg_to_dot(body: &Body, with_exceptional_edges: bool) -> Result<String, CfgError> {
    let cfg = build_cfg(body, with_exceptional_edges)?;
    // Statement text comes from the canonical emitter so graph nodes and
    // listings always agree.
    let text = emit_text(body);
    let stmt_lines: Vec<String> = text
        .lines()
        .filter(|l| l.starts_with("  L"))
        .map(|l| l.trim_start().to_string())
        .collect();

    let mut out = String::new();
    let name = sanitize(&format!("{}_{}", body.signature.owner, body.signature.name));
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
    for id in &cfg.nodes {
        let pos = body.position(*id).unwrap();
        let label = escape(&stmt_lines[pos]);
        let _ = writeln!(out, "  n{pos} [label=\"{label}\"];");
    }
    for e in &cfg.edges {
        let from = body.position(e.from).unwrap();
        let to = body.position(e.to).unwrap();
        let label = match e.kind {
            EdgeKind::Fallthrough => "fall-through".to_string(),
            EdgeKind::Branch => "branch".to_string(),
            EdgeKind::Case(k) => format!("case {k}"),
            EdgeKind::Default => "default".to_string(),
            EdgeKind::Exceptional => "exceptional".to_string(),
        };
        let _ = writeln!(out, "  n{from} -> n{to} [label=\"{label}\"];");
    }
    out.push_str("}\n");
    Ok(out)
}

/// Builds the call graph over all lifted bodies.
pub fn build_call_graph(bodies: &[Body]) -> CallGraph {
    let mut nodes: BTreeSet<String> = BTreeSet::new();
    let mut by_key: Vec<(String, MethodRef)> = Vec::new();
    let intern = |m: &MethodRef, nodes: &mut BTreeSet<String>, by_key: &mut Vec<(String, MethodRef)>| {
        let key = m.to_string();
        if nodes.insert(key.clone()) {
            by_key.push((key, m.clone()));
        }
    };

    let mut edges = Vec::new();
    for body in bodies {
        intern(&body.signature, &mut nodes, &mut by_key);
        for (id, st) in body.iter() {
            if let Statement::Invoke { kind, method, .. } = st {
                intern(method, &mut nodes, &mut by_key);
                edges.push(CallEdge {
                    caller: body.signature.clone(),
                    site: id,
                    callee: method.clone(),
                    kind: *kind,
                });
            }
        }
    }

    by_key.sort_by(|a, b| a.0.cmp(&b.0));
    CallGraph {
        nodes: by_key.into_iter().map(|(_, m)| m).collect(),
        edges,
    }
}

/// Deterministic DOT rendering of a call graph.
pub fn callgraph_to_dot(cg: &CallGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph callgraph {{");
    let _ = writeln!(out, "  node [shape=box];");
    let index_of = |m: &MethodRef| cg.nodes.iter().position(|n| n == m).unwrap();
    for (i, m) in cg.nodes.iter().enumerate() {
        let _ = writeln!(out, "  n{i} [label=\"{}\"];", escape(&m.to_string()));
    }
    let mut rendered: Vec<(usize, usize, &'static str)> = cg
        .edges
        .iter()
        .map(|e| (index_of(&e.caller), index_of(&e.callee), e.kind.keyword()))
        .collect();
    rendered.sort();
    for (from, to, kind) in rendered {
        let _ = writeln!(out, "  n{from} -> n{to} [label=\"{kind}\"];");
    }
    out.push_str("}\n");
    out
}

/// File-name stem for a method's artifacts: `<class>_<method>`.
pub fn artifact_stem(m: &MethodRef) -> String {
    format!("{}_{}", sanitize_class(&m.owner), sanitize(&m.name))
}

pub fn sanitize_class(descriptor: &str) -> String {
    sanitize(descriptor.trim_start_matches('L').trim_end_matches(';'))
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dex::Proto;
    use crate::ir::{IrType, Place, Value};

    fn sig(name: &str) -> MethodRef {
        MethodRef {
            owner: "LApp;".into(),
            name: name.into(),
            proto: Proto {
                return_type: "V".into(),
                params: vec![],
            },
        }
    }

    #[test]
    fn straight_line_dot_counts() {
        let mut b = Body::new(sig("m"), true);
        let v0 = b.add_local("v0", IrType::Int);
        b.push(Statement::Assign {
            place: Place::Local(v0),
            value: Value::Int(1),
        });
        b.push(Statement::Assign {
            place: Place::Local(v0),
            value: Value::Int(2),
        });
        b.push(Statement::ReturnVoid);
        let dot = cfg_to_dot(&b, false).unwrap();
        let node_lines = dot
            .lines()
            .filter(|l| l.contains("[label=") && !l.contains("->"))
            .count();
        assert_eq!(node_lines, 3);
        assert_eq!(dot.matches(" -> ").count(), 2);
        assert!(dot.starts_with("digraph "));
    }

    #[test]
    fn call_graph_shape() {
        let mut main = Body::new(sig("main"), true);
        main.push(Statement::Invoke {
            kind: crate::ir::InvokeKind::Static,
            method: sig("helper"),
            args: vec![],
            result: None,
        });
        main.push(Statement::ReturnVoid);
        let mut helper = Body::new(sig("helper"), true);
        helper.push(Statement::ReturnVoid);

        let cg = build_call_graph(&[main, helper]);
        assert_eq!(cg.nodes.len(), 2);
        assert_eq!(cg.edges.len(), 1);
        assert_eq!(cg.edges[0].callee.name, "helper");

        let dot = callgraph_to_dot(&cg);
        assert_eq!(dot.matches(" -> ").count(), 1);
    }

    #[test]
    fn no_invokes_means_leaf_node() {
        let mut b = Body::new(sig("leaf"), true);
        b.push(Statement::ReturnVoid);
        let cg = build_call_graph(&[b]);
        assert_eq!(cg.nodes.len(), 1);
        assert!(cg.edges.is_empty());
    }

    #[test]
    fn dot_output_is_deterministic() {
        let mut b = Body::new(sig("m"), true);
        b.push(Statement::ReturnVoid);
        assert_eq!(cfg_to_dot(&b, false).unwrap(), cfg_to_dot(&b, false).unwrap());
    }
}
