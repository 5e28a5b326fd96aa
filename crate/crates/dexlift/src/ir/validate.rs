//! Body well-formedness checks, run after lifting and between passes.

use super::{Body, IdentitySource, IrType, Place, Statement, Value};

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOpts {
    /// Require every local typed and assignments category-consistent.
    pub typed: bool,
    /// Require no integer zero in reference positions (holds only after
    /// comparison fixup, which runs once typing has finished).
    pub zero_free: bool,
    /// Require the Nop placeholder gone (post-optimization state).
    pub optimized: bool,
}

impl ValidateOpts {
    pub fn full() -> ValidateOpts {
        ValidateOpts {
            typed: true,
            zero_free: true,
            optimized: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn validate(body: &Body, opts: ValidateOpts) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut fail = |msg: String| out.push(Violation(msg));

    // Branch-target containment.
    for (id, st) in body.iter() {
        for target in st.targets() {
            if !body.contains(target) {
                fail(format!(
                    "statement {:?} ({}) targets {:?} which is not in the body",
                    id,
                    st.kind_name(),
                    target
                ));
            }
        }
    }

    // Identity prefix: this/param identities occur only before the first
    // non-identity statement (ignoring leading nops); caught-exception
    // identities sit at handler entries and may appear anywhere.
    let mut prefix_done = false;
    for (_, st) in body.iter() {
        match st {
            Statement::Nop if !prefix_done => {}
            Statement::Identity { source, .. } => match source {
                IdentitySource::CaughtException { .. } => {}
                _ if prefix_done => {
                    fail("this/param identity statement outside the body prefix".into())
                }
                _ => {}
            },
            _ => prefix_done = true,
        }
    }

    // Trap sanity.
    for (i, trap) in body.traps.iter().enumerate() {
        let first = body.position(trap.first);
        let last = body.position(trap.last);
        let handler = body.position(trap.handler);
        match (first, last, handler) {
            (Some(f), Some(l), Some(_)) => {
                if f > l {
                    fail(format!("trap {i} has an empty range ({f} > {l})"));
                }
            }
            _ => fail(format!("trap {i} references statements not in the body")),
        }
    }

    // Locals referenced by statements must be live.
    for (id, st) in body.iter() {
        for local in stmt_locals(st) {
            if local.0 as usize >= body.local_count() {
                fail(format!("statement {id:?} references unknown local {local:?}"));
            } else if !body.is_local_live(local) {
                fail(format!(
                    "statement {id:?} references removed local {}",
                    body.local(local).name
                ));
            }
        }
    }

    if opts.typed {
        for (_, local) in body.live_locals() {
            if local.ty == IrType::Unknown {
                fail(format!("local {} is still untyped", local.name));
            }
        }
        check_assignment_consistency(body, &mut fail);
    }

    if opts.zero_free {
        check_zero_free(body, &mut fail);
    }

    if opts.optimized {
        for (id, st) in body.iter() {
            if matches!(st, Statement::Nop) {
                fail(format!("nop statement {id:?} survived optimization"));
            }
        }
    }

    out
}

/// Post-typing consistency: assignment categories must agree, and no integer
/// zero may sit in a reference-typed position.
fn check_typed_consistency(body: &Body, fail: &mut impl FnMut(String)) {
    for (id, st) in body.iter() {
        match st {
            Statement::Assign { place, value } => {
                let target_ty = place_type(body, place);
                if let Some(vt) = value_type(body, value) {
                    if let Some(tt) = target_ty {
                        if tt.join(&vt).is_none() {
                            fail(format!(
                                "assignment {id:?} mixes categories: {tt} = {vt}"
                            ));
                        }
                        if tt.is_reference() && is_int_zero(value) {
                            fail(format!(
                                "assignment {id:?} stores integer 0 into reference-typed place"
                            ));
                        }
                    }
                }
            }
            Statement::If { lhs, rhs, .. } => {
                let l = value_type(body, lhs);
                let r = value_type(body, rhs);
                if let (Some(l), Some(r)) = (&l, &r) {
                    if l.is_reference() && is_int_zero(rhs) || r.is_reference() && is_int_zero(lhs)
                    {
                        fail(format!(
                            "comparison {id:?} checks a reference against integer 0"
                        ));
                    }
                }
            }
            Statement::Invoke { args, method, .. } => {
                let implicit = usize::from(!matches!(
                    body.stmt(id),
                    Statement::Invoke {
                        kind: super::InvokeKind::Static,
                        ..
                    }
                ));
                for (i, arg) in args.iter().enumerate().skip(implicit) {
                    let desc = &method.proto.params[i - implicit];
                    if let Some(want) = IrType::from_descriptor(desc) {
                        if want.is_reference() && is_int_zero(arg) {
                            fail(format!(
                                "invoke {id:?} passes integer 0 for reference parameter {i}"
                            ));
                        }
                    }
                }
            }
            _ => {}
        }
    }
}

fn is_int_zero(v: &Value) -> bool {
    matches!(v, Value::Int(0))
}

fn place_type(body: &Body, place: &Place) -> Option<IrType> {
    match place {
        Place::Local(id) => Some(body.local(*id).ty.clone()),
        Place::StaticField(f) => IrType::from_descriptor(&f.descriptor),
        Place::InstanceField { field, .. } => IrType::from_descriptor(&field.descriptor),
        Place::ArrayElem { base, .. } => match &body.local(*base).ty {
            IrType::Array(e) => Some((**e).clone()),
            _ => None,
        },
    }
}

/// Static type of a value, where determinable without inference.
pub(crate) fn value_type(body: &Body, value: &Value) -> Option<IrType> {
    match value {
        Value::Local(id) => Some(body.local(*id).ty.clone()),
        Value::Int(_) => Some(IrType::Int),
        Value::Long(_) => Some(IrType::Long),
        Value::Float(_) => Some(IrType::Float),
        Value::Double(_) => Some(IrType::Double),
        Value::Null => Some(IrType::Null),
        Value::Str(_) => Some(IrType::Ref("Ljava/lang/String;".into())),
        Value::Class(_) => Some(IrType::Ref("Ljava/lang/Class;".into())),
        Value::StaticField(f) => IrType::from_descriptor(&f.descriptor),
        Value::InstanceField { field, .. } => IrType::from_descriptor(&field.descriptor),
        Value::ArrayElem { base, .. } => match &body.local(*base).ty {
            IrType::Array(e) => Some((**e).clone()),
            _ => None,
        },
        Value::Binary { ty, .. } => Some(ty.clone()),
        Value::Unary { ty, .. } => Some(ty.clone()),
        Value::Cast { to, .. } => Some(to.clone()),
        Value::InstanceOf { .. } => Some(IrType::Boolean),
        Value::New(d) => Some(IrType::Ref(d.clone())),
        Value::NewArray { elem, .. } => Some(IrType::Array(Box::new(elem.clone()))),
        Value::ArrayLength(_) => Some(IrType::Int),
        Value::Compare { .. } => Some(IrType::Int),
    }
}

fn stmt_locals(st: &Statement) -> Vec<super::LocalId> {
    let mut out = Vec::new();
    let mut add_value = |v: &Value| collect_value_locals(v, &mut out);
    match st {
        Statement::Nop | Statement::Breakpoint | Statement::ReturnVoid => {}
        Statement::Identity { local, .. } => out.push(*local),
        Statement::Assign { place, value } => {
            match place {
                Place::Local(id) => out.push(*id),
                Place::StaticField(_) => {}
                Place::InstanceField { base, .. } => out.push(*base),
                Place::ArrayElem { base, index } => {
                    out.push(*base);
                    collect_value_locals(index, &mut out);
                }
            }
            collect_value_locals(value, &mut out);
        }
        Statement::If { lhs, rhs, .. } => {
            add_value(lhs);
            add_value(rhs);
        }
        Statement::Goto { .. } => {}
        Statement::TableSwitch { key, .. } | Statement::LookupSwitch { key, .. } => add_value(key),
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
        | Statement::MonitorExit(v) => add_value(v),
    }
    out
}

pub(crate) fn collect_value_locals(v: &Value, out: &mut Vec<super::LocalId>) {
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
        Value::ArrayLength(v) => collect_value_locals(v, out),
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dex::{MethodRef, Proto};
    use crate::ir::StmtId;

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
    fn dangling_target_is_a_violation() {
        let mut b = Body::new(sig(), true);
        b.push(Statement::Goto { target: StmtId(42) });
        let v = validate(&b, ValidateOpts::default());
        assert_eq!(v.len(), 1);
        assert!(v[0].0.contains("targets"));
    }

    #[test]
    fn untyped_local_flagged_only_in_typed_mode() {
        let mut b = Body::new(sig(), true);
        let v0 = b.add_local("v0", IrType::Unknown);
        b.push(Statement::Assign {
            place: Place::Local(v0),
            value: Value::Int(1),
        });
        b.push(Statement::ReturnVoid);
        assert!(validate(&b, ValidateOpts::default()).is_empty());
        assert!(!validate(
            &b,
            ValidateOpts {
                typed: true,
                ..Default::default()
            }
        )
        .is_empty());
    }

    #[test]
    fn zero_against_reference_flagged() {
        let mut b = Body::new(sig(), true);
        let v0 = b.add_local("v0", IrType::Ref("LFoo;".into()));
        let r = b.push(Statement::ReturnVoid);
        b.push(Statement::If {
            op: crate::ir::RelOp::Eq,
            lhs: Value::Local(v0),
            rhs: Value::Int(0),
            target: r,
        });
        let v = validate(
            &b,
            ValidateOpts {
                typed: true,
                ..Default::default()
            },
        );
        assert!(v.iter().any(|x| x.0.contains("reference against integer 0")));
    }

    #[test]
    fn nop_flagged_after_optimization() {
        let mut b = Body::new(sig(), true);
        b.push(Statement::Nop);
        b.push(Statement::ReturnVoid);
        let v = validate(
            &b,
            ValidateOpts {
                optimized: true,
                ..Default::default()
            },
        );
        assert!(v.iter().any(|x| x.0.contains("nop")));
    }
}
