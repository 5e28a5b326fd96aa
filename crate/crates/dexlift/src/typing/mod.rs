//! Local type inference. A worklist fixpoint propagates type facts through
//! moves and typed operations; constant declarations the fixpoint cannot
//! force are resolved by a depth-first search over the statement CFG for the
//! first use exposing a type, then rewritten in place (int bits to float
//! bits, zero to null) with forward effects on dependent declarations.

use std::collections::HashSet;

use crate::ir::{
    successors, Body, InvokeKind, IrType, LocalId, Place, RelOp, Statement, StmtId, TypeCat,
    UnOp, Value,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypingError {
    #[error("local {local}: irreconcilable type evidence {a} vs {b}")]
    TypeConflict { local: String, a: IrType, b: IrType },
    #[error("local {local} has no type evidence and is not an ambiguous constant")]
    Untypable { local: String },
    #[error(
        "local {local} (declared at 0x{decl_address:04x}): paths imply incompatible types: {}",
        render_evidence(.evidence)
    )]
    ConflictingEvidence {
        local: String,
        decl_address: u32,
        candidates: Vec<IrType>,
        evidence: Vec<TypeEvidence>,
    },
    #[error("constant {literal:#x} resolved to a reference type but only zero conflates with null")]
    NonZeroNull { literal: i64 },
    #[error("resolved type {ty} is outside the candidate set of the declaration")]
    NotACandidate { ty: IrType },
}

fn render_evidence(ev: &[TypeEvidence]) -> String {
    ev.iter()
        .map(|e| format!("{:?}={} ({:?})", e.source, e.implied, e.kind))
        .collect::<Vec<_>>()
        .join(", ")
}

/// A use that exposes the type of a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeEvidence {
    pub source: StmtId,
    pub kind: EvidenceKind,
    pub implied: IrType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvidenceKind {
    ComparisonWithKnownType,
    TypeSpecificOp,
    NonVoidReturn,
    InvocationArgument,
    FieldStore,
    ArrayStore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstWidth {
    Bits32,
    Bits64,
}

/// A constant-defining statement whose result type is underdetermined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguousDeclaration {
    pub stmt: StmtId,
    pub local: LocalId,
    pub width: ConstWidth,
    pub bits: i64,
    pub candidates: Vec<IrType>,
}

impl AmbiguousDeclaration {
    fn from_stmt(id: StmtId, st: &Statement) -> Option<AmbiguousDeclaration> {
        let Statement::Assign {
            place: Place::Local(dv),
            value,
        } = st
        else {
            return None;
        };
        match value {
            Value::Int(c) => Some(AmbiguousDeclaration {
                stmt: id,
                local: *dv,
                width: ConstWidth::Bits32,
                bits: *c as i64,
                candidates: if *c == 0 {
                    vec![IrType::Int, IrType::Float, IrType::Null]
                } else {
                    vec![IrType::Int, IrType::Float]
                },
            }),
            Value::Long(c) => Some(AmbiguousDeclaration {
                stmt: id,
                local: *dv,
                width: ConstWidth::Bits64,
                bits: *c,
                candidates: vec![IrType::Long, IrType::Double],
            }),
            _ => None,
        }
    }

    fn admits(&self, ty: &IrType) -> bool {
        match self.width {
            ConstWidth::Bits32 => matches!(
                ty.category(),
                TypeCat::Int32 | TypeCat::Float | TypeCat::Reference
            ),
            ConstWidth::Bits64 => matches!(ty.category(), TypeCat::Long | TypeCat::Double),
        }
    }
}

/// Full typing entry point: after this every live local is concretely typed,
/// ambiguous constants are resolved and rewritten, assignments are
/// category-consistent. Comparison rewriting is a separate pass
/// ([`fix_zero_comparisons`]) since comparisons never feed inference.
pub fn infer_local_types(body: &mut Body) -> Result<(), TypingError> {
    let mut types = seed_types(body);
    let constraints = collect_constraints(body);
    propagate(body, &constraints, &mut types)?;
    resolve_all_ambiguous(body, &constraints, &mut types)?;
    rewrite_all_constants(body, &types)?;

    for (id, local) in body.live_locals() {
        if types[id.0 as usize] == IrType::Unknown {
            return Err(TypingError::Untypable {
                local: local.name.clone(),
            });
        }
    }
    for (i, t) in types.iter().enumerate() {
        if body.is_local_live(LocalId(i as u32)) {
            body.local_mut(LocalId(i as u32)).ty = t.clone();
        }
    }
    Ok(())
}

/// Const-family declarations the inference fixpoint leaves untyped.
pub fn find_ambiguous_declarations(body: &Body) -> Result<Vec<AmbiguousDeclaration>, TypingError> {
    let mut types = seed_types(body);
    let constraints = collect_constraints(body);
    propagate(body, &constraints, &mut types)?;
    Ok(body
        .iter()
        .filter_map(|(id, st)| AmbiguousDeclaration::from_stmt(id, st))
        .filter(|d| types[d.local.0 as usize] == IrType::Unknown)
        .collect())
}

/// Resolves one ambiguous declaration by depth-first search for the first
/// type-exposing use; `Ok(None)` means no path carries evidence.
pub fn resolve_ambiguous(
    body: &Body,
    decl: &AmbiguousDeclaration,
) -> Result<Option<IrType>, TypingError> {
    let mut types = seed_types(body);
    let constraints = collect_constraints(body);
    propagate(body, &constraints, &mut types)?;
    dfs_resolve(body, &types, decl)
}

/// Rewrites the declaring assignment to the resolved type, preserving the
/// literal's bit pattern exactly.
pub fn rewrite_constant(
    body: &mut Body,
    decl: &AmbiguousDeclaration,
    ty: &IrType,
) -> Result<(), TypingError> {
    if !decl.admits(ty) {
        return Err(TypingError::NotACandidate { ty: ty.clone() });
    }
    let new_value = match (decl.width, ty.category()) {
        (ConstWidth::Bits32, TypeCat::Float) => Value::Float(decl.bits as i32 as u32),
        (ConstWidth::Bits32, TypeCat::Reference) => {
            if decl.bits != 0 {
                return Err(TypingError::NonZeroNull { literal: decl.bits });
            }
            Value::Null
        }
        (ConstWidth::Bits32, _) => Value::Int(decl.bits as i32),
        (ConstWidth::Bits64, TypeCat::Double) => Value::Double(decl.bits as u64),
        (ConstWidth::Bits64, _) => Value::Long(decl.bits),
    };
    if let Statement::Assign { value, .. } = body.stmt_mut(decl.stmt) {
        *value = new_value;
    }
    Ok(())
}

/// Post-typing rewrite: a reference compared against integer zero compares
/// against null instead. Pure statement surgery; never feeds inference.
pub fn fix_zero_comparisons(body: &mut Body) {
    let ids: Vec<StmtId> = body.order().to_vec();
    for id in ids {
        let Statement::If { op, lhs, rhs, .. } = body.stmt(id) else {
            continue;
        };
        if !matches!(op, RelOp::Eq | RelOp::Ne) {
            continue;
        }
        let lhs_ref = value_is_reference(body, lhs);
        let rhs_ref = value_is_reference(body, rhs);
        let lhs_zero = matches!(lhs, Value::Int(0));
        let rhs_zero = matches!(rhs, Value::Int(0));
        if let Statement::If { lhs, rhs, .. } = body.stmt_mut(id) {
            if lhs_ref && rhs_zero {
                *rhs = Value::Null;
            } else if rhs_ref && lhs_zero {
                *lhs = Value::Null;
            }
        }
    }
}

fn value_is_reference(body: &Body, v: &Value) -> bool {
    match v {
        Value::Local(id) => body.local(*id).ty.is_reference(),
        Value::Null | Value::Str(_) | Value::Class(_) | Value::New(_) => true,
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// constraint collection and fixpoint propagation

#[derive(Debug, Clone)]
enum Constraint {
    /// The local carries at least this type.
    Fact(LocalId, IrType),
    /// A register move; both ends carry the same type.
    Link(LocalId, LocalId),
    /// `value` carries the element type of `base`'s array type.
    Elem { base: LocalId, value: LocalId },
}

fn seed_types(body: &Body) -> Vec<IrType> {
    (0..body.local_count())
        .map(|i| body.local(LocalId(i as u32)).ty.clone())
        .collect()
}

fn soft_ref() -> IrType {
    // Bottom of the reference family: joins with any concrete reference
    // without disturbing it.
    IrType::Null
}

fn soft_array() -> IrType {
    IrType::Array(Box::new(IrType::Unknown))
}

fn collect_constraints(body: &Body) -> Vec<Constraint> {
    let mut out = Vec::new();
    for (_, st) in body.iter() {
        collect_stmt(body, st, &mut out);
    }
    out
}

fn collect_stmt(body: &Body, st: &Statement, out: &mut Vec<Constraint>) {
    use Constraint::*;
    match st {
        Statement::Nop | Statement::Goto { .. } | Statement::ReturnVoid | Statement::Breakpoint => {}
        Statement::Identity { local, source } => {
            let desc = match source {
                crate::ir::IdentitySource::This { descriptor }
                | crate::ir::IdentitySource::Param { descriptor, .. }
                | crate::ir::IdentitySource::CaughtException { descriptor } => descriptor,
            };
            if let Some(t) = IrType::from_descriptor(desc) {
                out.push(Fact(*local, t));
            }
        }
        Statement::Assign { place, value } => {
            collect_value_uses(value, out);
            match place {
                Place::Local(x) => match value {
                    Value::Local(y) => out.push(Link(*x, *y)),
                    Value::Int(_) | Value::Long(_) => {} // ambiguous until resolved
                    other => {
                        if let Some(t) = shallow_type(other) {
                            out.push(Fact(*x, t));
                        }
                    }
                },
                Place::StaticField(f) => {
                    if let (Value::Local(y), Some(t)) =
                        (value, IrType::from_descriptor(&f.descriptor))
                    {
                        out.push(Fact(*y, t));
                    }
                }
                Place::InstanceField { base, field } => {
                    out.push(Fact(*base, IrType::Ref(field.owner.clone())));
                    if let (Value::Local(y), Some(t)) =
                        (value, IrType::from_descriptor(&field.descriptor))
                    {
                        out.push(Fact(*y, t));
                    }
                }
                Place::ArrayElem { base, index } => {
                    out.push(Fact(*base, soft_array()));
                    if let Value::Local(i) = index {
                        out.push(Fact(*i, IrType::Int));
                    }
                    if let Value::Local(y) = value {
                        out.push(Elem {
                            base: *base,
                            value: *y,
                        });
                    }
                    // Constant element stores are reconciled after types
                    // settle; see rewrite_all_constants.
                }
            }
        }
        // Comparisons do not influence the type inference; they are only
        // evidence for the ambiguity search.
        Statement::If { .. } => {}
        Statement::TableSwitch { key, .. } | Statement::LookupSwitch { key, .. } => {
            if let Value::Local(k) = key {
                out.push(Fact(*k, IrType::Int));
            }
        }
        Statement::Invoke {
            kind,
            method,
            args,
            result,
        } => {
            let mut it = args.iter();
            if *kind != InvokeKind::Static {
                if let Some(Value::Local(recv)) = it.next() {
                    out.push(Fact(*recv, IrType::Ref(method.owner.clone())));
                }
            }
            for (arg, desc) in it.zip(method.proto.params.iter()) {
                if let (Value::Local(a), Some(t)) = (arg, IrType::from_descriptor(desc)) {
                    out.push(Fact(*a, t));
                }
            }
            if let Some(r) = result {
                if let Some(t) = IrType::from_descriptor(&method.proto.return_type) {
                    out.push(Fact(*r, t));
                }
            }
        }
        Statement::Return(v) => {
            if let Value::Local(l) = v {
                if let Some(t) = IrType::from_descriptor(&body.signature.proto.return_type) {
                    out.push(Fact(*l, t));
                }
            }
        }
        Statement::Throw(v) | Statement::MonitorEnter(v) | Statement::MonitorExit(v) => {
            if let Value::Local(l) = v {
                out.push(Fact(*l, soft_ref()));
            }
        }
    }
}

/// Type facts about locals used inside a value expression.
fn collect_value_uses(value: &Value, out: &mut Vec<Constraint>) {
    use Constraint::Fact;
    match value {
        Value::Binary { op, ty, lhs, rhs } => {
            if let Value::Local(l) = &**lhs {
                out.push(Fact(*l, ty.clone()));
            }
            if let Value::Local(r) = &**rhs {
                let shift = matches!(op, crate::ir::BinOp::Shl | crate::ir::BinOp::Shr | crate::ir::BinOp::Ushr);
                out.push(Fact(*r, if shift { IrType::Int } else { ty.clone() }));
            }
            collect_value_uses(lhs, out);
            collect_value_uses(rhs, out);
        }
        Value::Unary { ty, operand, .. } => {
            if let Value::Local(l) = &**operand {
                out.push(Fact(*l, ty.clone()));
            }
        }
        Value::Cast { from, operand, .. } => {
            if let Value::Local(l) = &**operand {
                out.push(Fact(*l, from.clone()));
            }
        }
        Value::InstanceOf { operand, .. } => {
            if let Value::Local(l) = &**operand {
                out.push(Fact(*l, soft_ref()));
            }
        }
        Value::ArrayElem { base, index } => {
            out.push(Fact(*base, soft_array()));
            if let Value::Local(i) = &**index {
                out.push(Fact(*i, IrType::Int));
            }
        }
        Value::InstanceField { base, field } => {
            out.push(Fact(*base, IrType::Ref(field.owner.clone())));
        }
        Value::NewArray { size, .. } => {
            if let Value::Local(s) = &**size {
                out.push(Fact(*s, IrType::Int));
            }
        }
        Value::ArrayLength(v) => {
            if let Value::Local(l) = &**v {
                out.push(Fact(*l, soft_array()));
            }
        }
        Value::Compare { kind, lhs, rhs } => {
            for side in [lhs, rhs] {
                if let Value::Local(l) = &**side {
                    out.push(Fact(*l, kind.operand_type()));
                }
            }
        }
        _ => {}
    }
}

/// Result type of a non-move, non-constant value.
fn shallow_type(value: &Value) -> Option<IrType> {
    match value {
        Value::Local(_) | Value::Int(_) | Value::Long(_) => None,
        Value::Float(_) => Some(IrType::Float),
        Value::Double(_) => Some(IrType::Double),
        Value::Null => Some(IrType::Null),
        Value::Str(_) => Some(IrType::Ref("Ljava/lang/String;".into())),
        Value::Class(_) => Some(IrType::Ref("Ljava/lang/Class;".into())),
        Value::StaticField(f) => IrType::from_descriptor(&f.descriptor),
        Value::InstanceField { field, .. } => IrType::from_descriptor(&field.descriptor),
        Value::ArrayElem { .. } => None, // via Elem constraint
        Value::Binary { ty, .. } | Value::Unary { ty, .. } => Some(ty.clone()),
        Value::Cast { to, .. } => Some(to.clone()),
        Value::InstanceOf { .. } => Some(IrType::Boolean),
        Value::New(d) => Some(IrType::Ref(d.clone())),
        Value::NewArray { elem, .. } => Some(IrType::Array(Box::new(elem.clone()))),
        Value::ArrayLength(_) => Some(IrType::Int),
        Value::Compare { .. } => Some(IrType::Int),
    }
}

fn merge(
    body: &Body,
    types: &mut [IrType],
    local: LocalId,
    t: &IrType,
) -> Result<bool, TypingError> {
    let cur = &types[local.0 as usize];
    let joined = cur.join(t).ok_or_else(|| TypingError::TypeConflict {
        local: body.local(local).name.clone(),
        a: cur.clone(),
        b: t.clone(),
    })?;
    if joined != types[local.0 as usize] {
        types[local.0 as usize] = joined;
        return Ok(true);
    }
    Ok(false)
}

fn propagate(
    body: &Body,
    constraints: &[Constraint],
    types: &mut [IrType],
) -> Result<(), TypingError> {
    loop {
        let mut changed = false;
        for c in constraints {
            match c {
                Constraint::Fact(l, t) => changed |= merge(body, types, *l, t)?,
                Constraint::Link(a, b) => {
                    let tb = types[b.0 as usize].clone();
                    changed |= merge(body, types, *a, &tb)?;
                    let ta = types[a.0 as usize].clone();
                    changed |= merge(body, types, *b, &ta)?;
                }
                Constraint::Elem { base, value } => {
                    if let IrType::Array(elem) = &types[base.0 as usize] {
                        let elem = (**elem).clone();
                        if elem != IrType::Unknown {
                            changed |= merge(body, types, *value, &elem)?;
                        }
                    }
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

// ---------------------------------------------------------------------------
// ambiguity resolution

fn resolve_all_ambiguous(
    body: &Body,
    constraints: &[Constraint],
    types: &mut Vec<IrType>,
) -> Result<(), TypingError> {
    let decls: Vec<AmbiguousDeclaration> = body
        .iter()
        .filter_map(|(id, st)| AmbiguousDeclaration::from_stmt(id, st))
        .collect();
    let mut unresolved: Vec<&AmbiguousDeclaration> = decls
        .iter()
        .filter(|d| types[d.local.0 as usize] == IrType::Unknown)
        .collect();

    // Joins where both operands are ambiguous yield no evidence in early
    // rounds; resolutions cascade through the fixpoint, so retry until
    // nothing moves, capped at one round per declaration plus one.
    for _round in 0..=decls.len() {
        if unresolved.is_empty() {
            break;
        }
        let mut progress = false;
        let mut still = Vec::new();
        for decl in unresolved {
            if types[decl.local.0 as usize] != IrType::Unknown {
                progress = true;
                continue; // resolved transitively
            }
            match dfs_resolve(body, types, decl)? {
                Some(t) => {
                    merge(body, types, decl.local, &t)?;
                    propagate(body, constraints, types)?;
                    progress = true;
                }
                None => still.push(decl),
            }
        }
        unresolved = still;
        if !progress {
            break;
        }
    }

    // Evidence-free survivors default per width; unused values cannot
    // affect semantics.
    for decl in unresolved {
        if types[decl.local.0 as usize] == IrType::Unknown {
            let default = match decl.width {
                ConstWidth::Bits32 => IrType::Int,
                ConstWidth::Bits64 => IrType::Long,
            };
            merge(body, types, decl.local, &default)?;
            propagate(body, constraints, types)?;
        }
    }
    Ok(())
}

/// Depth-first search from the declaration for the first statement exposing
/// the declared local's type; a branch ends where the local is redefined or
/// control leaves the method.
fn dfs_resolve(
    body: &Body,
    types: &[IrType],
    decl: &AmbiguousDeclaration,
) -> Result<Option<IrType>, TypingError> {
    let dv = decl.local;
    let mut visited: HashSet<StmtId> = HashSet::new();
    let mut found: Vec<TypeEvidence> = Vec::new();
    let mut stack: Vec<StmtId> = successors(body, decl.stmt);
    stack.reverse();

    while let Some(id) = stack.pop() {
        if !visited.insert(id) {
            continue;
        }
        let st = body.stmt(id);
        if let Some(ev) = evidence_for(body, types, id, st, dv) {
            found.push(ev);
            continue; // first evidence ends this path
        }
        if defines(st, dv) {
            continue; // new declaration ends this path
        }
        let mut succ = successors(body, id);
        succ.reverse();
        stack.extend(succ);
    }

    if found.is_empty() {
        return Ok(None);
    }
    // All first-evidences must agree in category and fit the candidate set;
    // otherwise the bytecode breaks the same-type comparison assumption.
    let first = found[0].implied.clone();
    let compatible = found.iter().all(|e| {
        decl.admits(&e.implied) && first.join(&e.implied).is_some()
    });
    if !compatible {
        return Err(TypingError::ConflictingEvidence {
            local: body.local(dv).name.clone(),
            decl_address: addr_of(body, decl.stmt),
            candidates: decl.candidates.clone(),
            evidence: found,
        });
    }
    Ok(Some(first))
}

fn addr_of(body: &Body, stmt: StmtId) -> u32 {
    body.addr_map
        .iter()
        .find(|(_, s)| **s == stmt)
        .map(|(a, _)| *a)
        .unwrap_or(0)
}

fn defines(st: &Statement, dv: LocalId) -> bool {
    match st {
        Statement::Assign {
            place: Place::Local(x),
            ..
        } => *x == dv,
        Statement::Identity { local, .. } => *local == dv,
        Statement::Invoke {
            result: Some(r), ..
        } => *r == dv,
        _ => false,
    }
}

/// First type evidence `st` provides about uses of `dv`.
fn evidence_for(
    body: &Body,
    types: &[IrType],
    id: StmtId,
    st: &Statement,
    dv: LocalId,
) -> Option<TypeEvidence> {
    let ev = |kind: EvidenceKind, implied: IrType| {
        Some(TypeEvidence {
            source: id,
            kind,
            implied,
        })
    };
    let known = |v: &Value| -> Option<IrType> {
        match v {
            Value::Local(o) => {
                let t = &types[o.0 as usize];
                (*t != IrType::Unknown).then(|| t.clone())
            }
            Value::Float(_) => Some(IrType::Float),
            Value::Double(_) => Some(IrType::Double),
            Value::Long(_) => Some(IrType::Long),
            Value::Null => Some(IrType::Null),
            Value::Str(_) => Some(IrType::Ref("Ljava/lang/String;".into())),
            Value::Int(_) => None, // the ambiguous case itself
            _ => None,
        }
    };
    let is_dv = |v: &Value| matches!(v, Value::Local(l) if *l == dv);

    match st {
        Statement::If { lhs, rhs, .. } => {
            if is_dv(lhs) {
                if let Some(t) = known(rhs) {
                    return ev(EvidenceKind::ComparisonWithKnownType, t);
                }
            }
            if is_dv(rhs) {
                if let Some(t) = known(lhs) {
                    return ev(EvidenceKind::ComparisonWithKnownType, t);
                }
            }
            None
        }
        Statement::Return(v) if is_dv(v) => ev(
            EvidenceKind::NonVoidReturn,
            IrType::from_descriptor(&body.signature.proto.return_type)?,
        ),
        Statement::Throw(v) | Statement::MonitorEnter(v) | Statement::MonitorExit(v)
            if is_dv(v) =>
        {
            ev(EvidenceKind::TypeSpecificOp, IrType::Null)
        }
        Statement::TableSwitch { key, .. } | Statement::LookupSwitch { key, .. } if is_dv(key) => {
            ev(EvidenceKind::TypeSpecificOp, IrType::Int)
        }
        Statement::Invoke {
            kind,
            method,
            args,
            ..
        } => {
            let mut it = args.iter();
            if *kind != InvokeKind::Static {
                if let Some(recv) = it.next() {
                    if is_dv(recv) {
                        return ev(
                            EvidenceKind::InvocationArgument,
                            IrType::Ref(method.owner.clone()),
                        );
                    }
                }
            }
            for (arg, desc) in it.zip(method.proto.params.iter()) {
                if is_dv(arg) {
                    return ev(EvidenceKind::InvocationArgument, IrType::from_descriptor(desc)?);
                }
            }
            None
        }
        Statement::Assign { place, value } => {
            // Stores of dv into typed places.
            match place {
                Place::StaticField(f) if is_dv(value) => {
                    return ev(EvidenceKind::FieldStore, IrType::from_descriptor(&f.descriptor)?);
                }
                Place::InstanceField { base, field } => {
                    if *base == dv {
                        return ev(EvidenceKind::TypeSpecificOp, IrType::Ref(field.owner.clone()));
                    }
                    if is_dv(value) {
                        return ev(
                            EvidenceKind::FieldStore,
                            IrType::from_descriptor(&field.descriptor)?,
                        );
                    }
                }
                Place::ArrayElem { base, index } => {
                    if *base == dv {
                        return ev(EvidenceKind::TypeSpecificOp, soft_array());
                    }
                    if is_dv(index) {
                        return ev(EvidenceKind::TypeSpecificOp, IrType::Int);
                    }
                    if is_dv(value) {
                        if let IrType::Array(elem) = &types[base.0 as usize] {
                            if **elem != IrType::Unknown {
                                return ev(EvidenceKind::ArrayStore, (**elem).clone());
                            }
                        }
                        return None;
                    }
                }
                Place::Local(_) => {}
                Place::StaticField(_) => {}
            }
            value_evidence(types, id, value, dv)
        }
        _ => None,
    }
}

fn value_evidence(
    types: &[IrType],
    id: StmtId,
    value: &Value,
    dv: LocalId,
) -> Option<TypeEvidence> {
    let ev = |implied: IrType| {
        Some(TypeEvidence {
            source: id,
            kind: EvidenceKind::TypeSpecificOp,
            implied,
        })
    };
    let is_dv = |v: &Value| matches!(v, Value::Local(l) if *l == dv);
    match value {
        Value::Binary { op, ty, lhs, rhs } => {
            if is_dv(lhs) {
                return ev(ty.clone());
            }
            if is_dv(rhs) {
                let shift = matches!(
                    op,
                    crate::ir::BinOp::Shl | crate::ir::BinOp::Shr | crate::ir::BinOp::Ushr
                );
                return ev(if shift { IrType::Int } else { ty.clone() });
            }
            None
        }
        Value::Unary { op, ty, operand } => {
            let _ = matches!(op, UnOp::Neg);
            is_dv(operand).then(|| ()).and_then(|_| ev(ty.clone()))
        }
        Value::Cast { from, operand, .. } => {
            is_dv(operand).then(|| ()).and_then(|_| ev(from.clone()))
        }
        Value::InstanceOf { operand, .. } => {
            is_dv(operand).then(|| ()).and_then(|_| ev(IrType::Null))
        }
        Value::ArrayElem { base, index } => {
            if *base == dv {
                return ev(soft_array());
            }
            if is_dv(index) {
                return ev(IrType::Int);
            }
            None
        }
        Value::InstanceField { base, field } => {
            (*base == dv).then(|| ()).and_then(|_| ev(IrType::Ref(field.owner.clone())))
        }
        Value::NewArray { size, .. } => is_dv(size).then(|| ()).and_then(|_| ev(IrType::Int)),
        Value::ArrayLength(v) => is_dv(v).then(|| ()).and_then(|_| ev(soft_array())),
        Value::Compare { kind, lhs, rhs } => {
            if is_dv(lhs) || is_dv(rhs) {
                return ev(kind.operand_type());
            }
            None
        }
        _ => {
            let _ = types;
            None
        }
    }
}

// ---------------------------------------------------------------------------
// constant rewriting

/// Rewrites every provisional constant to its local's settled type and
/// reconciles raw constants stored into typed array elements.
fn rewrite_all_constants(body: &mut Body, types: &[IrType]) -> Result<(), TypingError> {
    let decls: Vec<AmbiguousDeclaration> = body
        .iter()
        .filter_map(|(id, st)| AmbiguousDeclaration::from_stmt(id, st))
        .collect();
    for decl in &decls {
        let ty = types[decl.local.0 as usize].clone();
        if ty == IrType::Unknown {
            continue; // caught by the Untypable check afterwards
        }
        rewrite_constant(body, decl, &ty)?;
    }

    // Unrolled array initializations store raw integer bit patterns; adopt
    // the element type of the (now typed) receiving array.
    let ids: Vec<StmtId> = body.order().to_vec();
    for id in ids {
        let Statement::Assign {
            place: Place::ArrayElem { base, .. },
            value,
        } = body.stmt(id)
        else {
            continue;
        };
        let elem = match &types[base.0 as usize] {
            IrType::Array(e) => (**e).clone(),
            _ => continue,
        };
        let rewritten = match (&value, elem.category()) {
            (Value::Int(c), TypeCat::Float) => Some(Value::Float(*c as u32)),
            (Value::Int(0), TypeCat::Reference) => Some(Value::Null),
            (Value::Int(c), TypeCat::Reference) => {
                return Err(TypingError::NonZeroNull { literal: *c as i64 })
            }
            (Value::Long(c), TypeCat::Double) => Some(Value::Double(*c as u64)),
            _ => None,
        };
        if let Some(v) = rewritten {
            if let Statement::Assign { value, .. } = body.stmt_mut(id) {
                *value = v;
            }
        }
    }
    Ok(())
}
