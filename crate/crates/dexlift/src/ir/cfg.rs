//! Control-flow over statements: intra-procedural successors and full graph
//! construction with optional exceptional edges into trap handlers.

use super::{Body, Statement, StmtId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Fallthrough,
    Branch,
    /// Switch case edge carrying its key.
    Case(i32),
    /// Switch default edge.
    Default,
    Exceptional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: StmtId,
    pub to: StmtId,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone)]
pub struct Cfg {
    pub nodes: Vec<StmtId>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CfgError {
    #[error("statement at position {from} targets a statement not present in the body")]
    DanglingTarget { from: usize },
}

/// Non-exceptional successors of `s`, fall-through first.
pub fn successors(body: &Body, id: StmtId) -> Vec<StmtId> {
    let next = body.next_in_order(id);
    match body.stmt(id) {
        Statement::Goto { target } => vec![*target],
        Statement::If { target, .. } => {
            let mut out = Vec::with_capacity(2);
            if let Some(n) = next {
                out.push(n);
            }
            out.push(*target);
            out
        }
        Statement::TableSwitch {
            targets, default, ..
        } => {
            let mut out = targets.clone();
            out.push(*default);
            dedup_preserving(out)
        }
        Statement::LookupSwitch { cases, default, .. } => {
            let mut out: Vec<StmtId> = cases.iter().map(|(_, t)| *t).collect();
            out.push(*default);
            dedup_preserving(out)
        }
        Statement::Return(_) | Statement::ReturnVoid | Statement::Throw(_) => Vec::new(),
        Statement::Nop
        | Statement::Identity { .. }
        | Statement::Assign { .. }
        | Statement::Invoke { .. }
        | Statement::MonitorEnter(_)
        | Statement::MonitorExit(_)
        | Statement::Breakpoint => next.into_iter().collect(),
    }
}

fn dedup_preserving(ids: Vec<StmtId>) -> Vec<StmtId> {
    let mut seen = std::collections::HashSet::new();
    ids.into_iter().filter(|id| seen.insert(*id)).collect()
}

/// Builds the statement-level CFG. With `with_exceptional_edges`, every
/// statement inside a trap range gets an edge to the trap handler.
pub fn build_cfg(body: &Body, with_exceptional_edges: bool) -> Result<Cfg, CfgError> {
    let nodes: Vec<StmtId> = body.order().to_vec();
    let mut edges = Vec::new();

    for (pos, &id) in nodes.iter().enumerate() {
        let next = body.next_in_order(id);
        let check = |t: StmtId| -> Result<StmtId, CfgError> {
            if body.contains(t) {
                Ok(t)
            } else {
                Err(CfgError::DanglingTarget { from: pos })
            }
        };
        match body.stmt(id) {
            Statement::Goto { target } => edges.push(Edge {
                from: id,
                to: check(*target)?,
                kind: EdgeKind::Branch,
            }),
            Statement::If { target, .. } => {
                if let Some(n) = next {
                    edges.push(Edge {
                        from: id,
                        to: n,
                        kind: EdgeKind::Fallthrough,
                    });
                }
                edges.push(Edge {
                    from: id,
                    to: check(*target)?,
                    kind: EdgeKind::Branch,
                });
            }
            Statement::TableSwitch {
                first_key,
                targets,
                default,
                ..
            } => {
                for (i, t) in targets.iter().enumerate() {
                    edges.push(Edge {
                        from: id,
                        to: check(*t)?,
                        kind: EdgeKind::Case(first_key + i as i32),
                    });
                }
                edges.push(Edge {
                    from: id,
                    to: check(*default)?,
                    kind: EdgeKind::Default,
                });
            }
            Statement::LookupSwitch { cases, default, .. } => {
                for (k, t) in cases {
                    edges.push(Edge {
                        from: id,
                        to: check(*t)?,
                        kind: EdgeKind::Case(*k),
                    });
                }
                edges.push(Edge {
                    from: id,
                    to: check(*default)?,
                    kind: EdgeKind::Default,
                });
            }
            Statement::Return(_) | Statement::ReturnVoid | Statement::Throw(_) => {}
            Statement::Nop
            | Statement::Identity { .. }
            | Statement::Assign { .. }
            | Statement::Invoke { .. }
            | Statement::MonitorEnter(_)
            | Statement::MonitorExit(_)
            | Statement::Breakpoint => {
                if let Some(n) = next {
                    edges.push(Edge {
                        from: id,
                        to: n,
                        kind: EdgeKind::Fallthrough,
                    });
                }
            }
        }
    }

    if with_exceptional_edges {
        for trap in &body.traps {
            let (Some(first), Some(last), Some(_)) = (
                body.position(trap.first),
                body.position(trap.last),
                body.position(trap.handler),
            ) else {
                continue;
            };
            for &id in &nodes[first..=last] {
                edges.push(Edge {
                    from: id,
                    to: trap.handler,
                    kind: EdgeKind::Exceptional,
                });
            }
        }
    }

    Ok(Cfg { nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dex::{MethodRef, Proto};
    use crate::ir::{RelOp, Value};

    fn sig() -> MethodRef {
        MethodRef {
            owner: "LT;".into(),
            name: "m".into(),
            proto: Proto {
                return_type: "V".into(),
                params: vec![],
            },
        }
    }

    #[test]
    fn straight_line_path_graph() {
        let mut b = Body::new(sig(), true);
        b.push(Statement::Nop);
        b.push(Statement::Nop);
        b.push(Statement::ReturnVoid);
        let cfg = build_cfg(&b, false).unwrap();
        assert_eq!(cfg.nodes.len(), 3);
        assert_eq!(cfg.edges.len(), 2);
    }

    #[test]
    fn successors_per_kind() {
        let mut b = Body::new(sig(), true);
        let n0 = b.push(Statement::Nop);
        let g = b.push(Statement::Goto { target: n0 });
        let i = b.push(Statement::If {
            op: RelOp::Eq,
            lhs: Value::Int(0),
            rhs: Value::Int(0),
            target: n0,
        });
        let r = b.push(Statement::ReturnVoid);
        assert_eq!(successors(&b, g), vec![n0]);
        assert_eq!(successors(&b, i), vec![r, n0]);
        assert_eq!(successors(&b, r), Vec::new());
    }

    #[test]
    fn dangling_target_reported() {
        let mut b = Body::new(sig(), true);
        b.push(Statement::Goto { target: StmtId(99) });
        assert_eq!(
            build_cfg(&b, false).unwrap_err(),
            CfgError::DanglingTarget { from: 0 }
        );
    }

    #[test]
    fn exceptional_edge_to_handler() {
        let mut b = Body::new(sig(), true);
        let t = b.push(Statement::Throw(Value::Null));
        let r = b.push(Statement::ReturnVoid);
        b.traps.push(crate::ir::Trap {
            first: t,
            last: t,
            handler: r,
            exception: None,
        });
        let off = build_cfg(&b, false).unwrap();
        assert!(off.edges.iter().all(|e| e.kind != EdgeKind::Exceptional));
        let on = build_cfg(&b, true).unwrap();
        assert!(on
            .edges
            .iter()
            .any(|e| e.from == t && e.to == r && e.kind == EdgeKind::Exceptional));
    }
}
