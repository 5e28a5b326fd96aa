//! Post-typing cleanup passes and the pipeline driver that sequences
//! inference, constant resolution, comparison fixup and cleanup.

use std::collections::{HashMap, HashSet};

use crate::ir::{validate, Body, LocalId, Place, Statement, StmtId, ValidateOpts, Value};
use crate::typing::{fix_zero_comparisons, infer_local_types, TypingError};

#[derive(Debug, Clone, Copy)]
pub struct PassOptions {
    /// Run the cleanup passes after typing; off retains the entry nop.
    pub optimize: bool,
}

impl Default for PassOptions {
    fn default() -> Self {
        PassOptions { optimize: true }
    }
}

/// Removes every nop statement. Jumps, traps and address-map entries that
/// referenced a nop are retargeted to its next surviving statement first.
pub fn eliminate_nops(body: &mut Body) {
    let order: Vec<StmtId> = body.order().to_vec();
    let nops: HashSet<StmtId> = order
        .iter()
        .copied()
        .filter(|id| matches!(body.stmt(*id), Statement::Nop))
        .collect();
    if nops.is_empty() {
        return;
    }

    // Next non-nop at or after each nop, and previous non-nop before it
    // (trap range ends shrink backward).
    let mut forward: HashMap<StmtId, StmtId> = HashMap::new();
    let mut next: Option<StmtId> = None;
    for &id in order.iter().rev() {
        if nops.contains(&id) {
            if let Some(n) = next {
                forward.insert(id, n);
            }
        } else {
            next = Some(id);
        }
    }
    let mut backward: HashMap<StmtId, StmtId> = HashMap::new();
    let mut prev: Option<StmtId> = None;
    for &id in order.iter() {
        if nops.contains(&id) {
            if let Some(p) = prev {
                backward.insert(id, p);
            }
        } else {
            prev = Some(id);
        }
    }

    body.retarget_all(|t| forward.get(&t).copied().unwrap_or(t));
    for trap in &mut body.traps {
        if let Some(f) = forward.get(&trap.first) {
            trap.first = *f;
        }
        if let Some(h) = forward.get(&trap.handler) {
            trap.handler = *h;
        }
        if let Some(l) = backward.get(&trap.last) {
            trap.last = *l;
        }
    }
    for target in body.addr_map.values_mut() {
        if let Some(n) = forward.get(target) {
            *target = *n;
        }
    }

    body.retain_statements(|id| !nops.contains(&id));

    // Ranges that covered only nops collapse; drop them.
    let positions: HashMap<StmtId, usize> = body
        .order()
        .iter()
        .enumerate()
        .map(|(p, id)| (*id, p))
        .collect();
    body.traps.retain(|t| {
        matches!(
            (positions.get(&t.first), positions.get(&t.last), positions.get(&t.handler)),
            (Some(f), Some(l), Some(_)) if f <= l
        )
    });
}

/// Drops locals no surviving statement mentions; statements are untouched.
pub fn remove_unused_locals(body: &mut Body) {
    let mut used = vec![false; body.local_count()];
    for (_, st) in body.iter() {
        for local in stmt_local_ids(st) {
            used[local.0 as usize] = true;
        }
    }
    let dead: Vec<LocalId> = body
        .live_locals()
        .map(|(id, _)| id)
        .filter(|id| !used[id.0 as usize])
        .collect();
    for id in dead {
        body.kill_local(id);
    }
}

fn stmt_local_ids(st: &Statement) -> Vec<LocalId> {
    let mut out = Vec::new();
    let value = |v: &Value, out: &mut Vec<LocalId>| collect_value_locals(v, out);
    match st {
        Statement::Nop | Statement::Breakpoint | Statement::ReturnVoid | Statement::Goto { .. } => {}
        Statement::Identity { local, .. } => out.push(*local),
        Statement::Assign { place, value: v } => {
            match place {
                Place::Local(id) => out.push(*id),
                Place::StaticField(_) => {}
                Place::InstanceField { base, .. } => out.push(*base),
                Place::ArrayElem { base, index } => {
                    out.push(*base);
                    collect_value_locals(index, &mut out);
                }
            }
            collect_value_locals(v, &mut out);
        }
        Statement::If { lhs, rhs, .. } => {
            value(lhs, &mut out);
            value(rhs, &mut out);
        }
        Statement::TableSwitch { key, .. } | Statement::LookupSwitch { key, .. } => {
            value(key, &mut out)
        }
        Statement::Invoke { args, result, .. } => {
            for a in args {
                collect_value_locals(a, &mut out);
            }
            if let Some(r) = result {
                out.push(*r);
            }
        }
        Statement::Return(v)
        | Statement::Throw(v)
        | Statement::MonitorEnter(v)
        | Statement::MonitorExit(v) => value(v, &mut out),
    }
    out
}

fn collect_value_locals(v: &Value, out: &mut Vec<LocalId>) {
    match v {
        Value::Local(id) => out.push(*id),
        Value::InstanceField { base, .. } => out.push(*base),
        Value::ArrayElem { base, index } => {
            out.push(*base);
            collect_value_locals(index, out);
        }
        Value::Binary { lhs, rhs, .. } | Value::Compare { lhs, rhs, .. } => {
            collect_value_locals(lhs, out);
            collect_value_locals(rhs, out);
        }
        Value::Unary { operand, .. }
        | Value::Cast { operand, .. }
        | Value::InstanceOf { operand, .. } => collect_value_locals(operand, out),
        Value::NewArray { size, .. } => collect_value_locals(size, out),
        Value::ArrayLength(inner) => collect_value_locals(inner, out),
        Value::Int(_)
        | Value::Long(_)
        | Value::Float(_)
        | Value::Double(_)
        | Value::Null
        | Value::Str(_)
        | Value::Class(_)
        | Value::StaticField(_)
        | Value::New(_) => {}
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Typing(#[from] TypingError),
    #[error("body failed validation after {stage}: {first}")]
    Validation { stage: &'static str, first: String },
}

/// Runs typing and cleanup in order: infer, resolve ambiguities, rewrite
/// constants, fix comparisons, eliminate nops, drop unused locals. On error
/// the body is left exactly as passed in.
pub fn run_pipeline(body: &mut Body, opts: &PassOptions) -> Result<(), PipelineError> {
    let mut work = body.clone();

    infer_local_types(&mut work)?;
    check(&work, "typing", ValidateOpts { typed: true, optimized: false })?;

    fix_zero_comparisons(&mut work);
    check(&work, "comparison fixup", ValidateOpts { typed: true, optimized: false })?;

    if opts.optimize {
        eliminate_nops(&mut work);
        check(&work, "nop elimination", ValidateOpts { typed: true, optimized: true })?;
        remove_unused_locals(&mut work);
        check(&work, "local cleanup", ValidateOpts { typed: true, optimized: true })?;
    }

    *body = work;
    Ok(())
}

fn check(body: &Body, stage: &'static str, opts: ValidateOpts) -> Result<(), PipelineError> {
    let violations = validate(body, opts);
    match violations.first() {
        None => Ok(()),
        Some(v) => Err(PipelineError::Validation {
            stage,
            first: v.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dex::{MethodRef, Proto};
    use crate::ir::IrType;

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
    fn nop_then_return_collapses() {
        let mut b = Body::new(sig(), true);
        b.push(Statement::Nop);
        b.push(Statement::ReturnVoid);
        eliminate_nops(&mut b);
        assert_eq!(b.len(), 1);
        assert!(matches!(b.stmt(b.order()[0]), Statement::ReturnVoid));
    }

    #[test]
    fn goto_into_nop_retargets_to_successor() {
        let mut b = Body::new(sig(), true);
        let nop = b.push(Statement::Nop);
        let ret = b.push(Statement::ReturnVoid);
        let g = b.push(Statement::Goto { target: nop });
        eliminate_nops(&mut b);
        assert!(matches!(b.stmt(g), Statement::Goto { target } if *target == ret));
    }

    #[test]
    fn nop_free_body_unchanged() {
        let mut b = Body::new(sig(), true);
        let r = b.push(Statement::ReturnVoid);
        let before = b.clone();
        eliminate_nops(&mut b);
        assert_eq!(before.order(), b.order());
        assert!(b.contains(r));
    }

    #[test]
    fn unused_local_removed_used_kept() {
        let mut b = Body::new(sig(), true);
        let v0 = b.add_local("v0", IrType::Int);
        let v1 = b.add_local("v1", IrType::Int);
        b.push(Statement::Assign {
            place: Place::Local(v0),
            value: Value::Int(1),
        });
        b.push(Statement::ReturnVoid);
        remove_unused_locals(&mut b);
        assert!(b.is_local_live(v0));
        assert!(!b.is_local_live(v1));

        let empty_before: Vec<LocalId> = Vec::new();
        let mut e = Body::new(sig(), true);
        remove_unused_locals(&mut e);
        assert_eq!(e.live_locals().map(|(i, _)| i).collect::<Vec<_>>(), empty_before);
    }
}
