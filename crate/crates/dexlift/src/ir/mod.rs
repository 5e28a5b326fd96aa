//! The stack-less three-address IR: type lattice, statements, method bodies,
//! and control-flow graph construction.

mod cfg;
mod emit;
mod types;
mod validate;

pub use cfg::{build_cfg, successors, Cfg, CfgError, Edge, EdgeKind};
pub use emit::emit_text;
pub use types::{IrType, TypeCat};
pub use validate::{validate, ValidateOpts, Violation};

use std::collections::BTreeMap;
use std::collections::HashMap;

use crate::dex::{FieldRef, MethodRef};

/// Stable handle to a statement within one [`Body`]. Handles survive
/// reordering and removal of other statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StmtId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Local {
    pub name: String,
    pub ty: IrType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvokeKind {
    Virtual,
    Super,
    Direct,
    Static,
    Interface,
}

impl InvokeKind {
    pub fn keyword(self) -> &'static str {
        match self {
            InvokeKind::Virtual => "virtual",
            InvokeKind::Super => "super",
            InvokeKind::Direct => "direct",
            InvokeKind::Static => "static",
            InvokeKind::Interface => "interface",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    And,
    Or,
    Xor,
    Shl,
    Shr,
    Ushr,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Xor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Ushr => ">>>",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

/// Comparison flavour for the value-producing `cmp*` family; the kind pins
/// the operand type and the NaN bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpKind {
    Long,
    LtFloat,
    GtFloat,
    LtDouble,
    GtDouble,
}

impl CmpKind {
    pub fn keyword(self) -> &'static str {
        match self {
            CmpKind::Long => "cmp-long",
            CmpKind::LtFloat => "cmpl-float",
            CmpKind::GtFloat => "cmpg-float",
            CmpKind::LtDouble => "cmpl-double",
            CmpKind::GtDouble => "cmpg-double",
        }
    }

    pub fn operand_type(self) -> IrType {
        match self {
            CmpKind::Long => IrType::Long,
            CmpKind::LtFloat | CmpKind::GtFloat => IrType::Float,
            CmpKind::LtDouble | CmpKind::GtDouble => IrType::Double,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentitySource {
    This { descriptor: String },
    Param { index: usize, descriptor: String },
    CaughtException { descriptor: String },
}

/// Assignment targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Local(LocalId),
    StaticField(FieldRef),
    InstanceField { base: LocalId, field: FieldRef },
    ArrayElem { base: LocalId, index: Value },
}

/// Expression values. Float and double constants are raw bit patterns so
/// reinterpretation of ambiguous constants is lossless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Local(LocalId),
    Int(i32),
    Long(i64),
    Float(u32),
    Double(u64),
    Null,
    Str(String),
    Class(String),
    StaticField(FieldRef),
    InstanceField {
        base: LocalId,
        field: FieldRef,
    },
    ArrayElem {
        base: LocalId,
        index: Box<Value>,
    },
    Binary {
        op: BinOp,
        ty: IrType,
        lhs: Box<Value>,
        rhs: Box<Value>,
    },
    Unary {
        op: UnOp,
        ty: IrType,
        operand: Box<Value>,
    },
    /// Both reference casts and primitive conversions; `from` records the
    /// operand type the opcode implies.
    Cast {
        from: IrType,
        to: IrType,
        operand: Box<Value>,
    },
    InstanceOf {
        ty: IrType,
        operand: Box<Value>,
    },
    New(String),
    NewArray {
        elem: IrType,
        size: Box<Value>,
    },
    ArrayLength(Box<Value>),
    Compare {
        kind: CmpKind,
        lhs: Box<Value>,
        rhs: Box<Value>,
    },
}

impl Value {
    pub fn local(id: LocalId) -> Value {
        Value::Local(id)
    }
}

/// The closed statement inventory of the IR.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Nop,
    Identity {
        local: LocalId,
        source: IdentitySource,
    },
    Assign {
        place: Place,
        value: Value,
    },
    If {
        op: RelOp,
        lhs: Value,
        rhs: Value,
        target: StmtId,
    },
    Goto {
        target: StmtId,
    },
    TableSwitch {
        key: Value,
        first_key: i32,
        targets: Vec<StmtId>,
        default: StmtId,
    },
    LookupSwitch {
        key: Value,
        cases: Vec<(i32, StmtId)>,
        default: StmtId,
    },
    Invoke {
        kind: InvokeKind,
        method: MethodRef,
        args: Vec<Value>,
        result: Option<LocalId>,
    },
    Return(Value),
    ReturnVoid,
    Throw(Value),
    MonitorEnter(Value),
    MonitorExit(Value),
    Breakpoint,
}

impl Statement {
    /// Statement kinds are a closed set; the validator and emitter rely on
    /// exhaustive matches, this is for diagnostics.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Statement::Nop => "nop",
            Statement::Identity { .. } => "identity",
            Statement::Assign { .. } => "assign",
            Statement::If { .. } => "if",
            Statement::Goto { .. } => "goto",
            Statement::TableSwitch { .. } => "tableswitch",
            Statement::LookupSwitch { .. } => "lookupswitch",
            Statement::Invoke { .. } => "invoke",
            Statement::Return(_) => "return",
            Statement::ReturnVoid => "return-void",
            Statement::Throw(_) => "throw",
            Statement::MonitorEnter(_) => "monitorenter",
            Statement::MonitorExit(_) => "monitorexit",
            Statement::Breakpoint => "breakpoint",
        }
    }

    /// Branch targets referenced by this statement.
    pub fn targets(&self) -> Vec<StmtId> {
        match self {
            Statement::If { target, .. } | Statement::Goto { target } => vec![*target],
            Statement::TableSwitch {
                targets, default, ..
            } => {
                let mut t = targets.clone();
                t.push(*default);
                t
            }
            Statement::LookupSwitch { cases, default, .. } => {
                let mut t: Vec<StmtId> = cases.iter().map(|(_, s)| *s).collect();
                t.push(*default);
                t
            }
            _ => Vec::new(),
        }
    }

    pub fn retarget(&mut self, f: impl Fn(StmtId) -> StmtId) {
        match self {
            Statement::If { target, .. } | Statement::Goto { target } => *target = f(*target),
            Statement::TableSwitch {
                targets, default, ..
            } => {
                for t in targets.iter_mut() {
                    *t = f(*t);
                }
                *default = f(*default);
            }
            Statement::LookupSwitch { cases, default, .. } => {
                for (_, t) in cases.iter_mut() {
                    *t = f(*t);
                }
                *default = f(*default);
            }
            _ => {}
        }
    }

    /// True for statements with no intra-procedural fall-through successor.
    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            Statement::Return(_) | Statement::ReturnVoid | Statement::Throw(_) | Statement::Goto { .. }
        )
    }
}

/// An exception-handler table entry over statement handles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trap {
    pub first: StmtId,
    pub last: StmtId,
    pub handler: StmtId,
    /// Caught exception descriptor; `None` is the catch-all entry.
    pub exception: Option<String>,
}

/// One method's IR: locals, ordered statements, traps, and the mapping from
/// original code-unit addresses to statements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Body {
    pub signature: MethodRef,
    pub is_static: bool,
    locals: Vec<Local>,
    local_live: Vec<bool>,
    stmts: Vec<Statement>,
    order: Vec<StmtId>,
    positions: HashMap<StmtId, usize>,
    pub traps: Vec<Trap>,
    pub addr_map: BTreeMap<u32, StmtId>,
}

impl Body {
    pub fn new(signature: MethodRef, is_static: bool) -> Body {
        Body {
            signature,
            is_static,
            locals: Vec::new(),
            local_live: Vec::new(),
            stmts: Vec::new(),
            order: Vec::new(),
            positions: HashMap::new(),
            traps: Vec::new(),
            addr_map: BTreeMap::new(),
        }
    }

    pub fn add_local(&mut self, name: impl Into<String>, ty: IrType) -> LocalId {
        let id = LocalId(self.locals.len() as u32);
        self.locals.push(Local {
            name: name.into(),
            ty,
        });
        self.local_live.push(true);
        id
    }

    pub fn local(&self, id: LocalId) -> &Local {
        &self.locals[id.0 as usize]
    }

    pub fn local_mut(&mut self, id: LocalId) -> &mut Local {
        &mut self.locals[id.0 as usize]
    }

    pub fn local_count(&self) -> usize {
        self.locals.len()
    }

    pub fn is_local_live(&self, id: LocalId) -> bool {
        self.local_live[id.0 as usize]
    }

    pub fn kill_local(&mut self, id: LocalId) {
        self.local_live[id.0 as usize] = false;
    }

    /// Live locals in declaration order.
    pub fn live_locals(&self) -> impl Iterator<Item = (LocalId, &Local)> {
        self.locals
            .iter()
            .enumerate()
            .filter(|(i, _)| self.local_live[*i])
            .map(|(i, l)| (LocalId(i as u32), l))
    }

    /// Appends a statement at the end of the body.
    pub fn push(&mut self, st: Statement) -> StmtId {
        let id = StmtId(self.stmts.len() as u32);
        self.stmts.push(st);
        self.positions.insert(id, self.order.len());
        self.order.push(id);
        id
    }

    pub fn stmt(&self, id: StmtId) -> &Statement {
        &self.stmts[id.0 as usize]
    }

    pub fn stmt_mut(&mut self, id: StmtId) -> &mut Statement {
        &mut self.stmts[id.0 as usize]
    }

    pub fn order(&self) -> &[StmtId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Position of a statement in the current order, if it is still present.
    pub fn position(&self, id: StmtId) -> Option<usize> {
        self.positions.get(&id).copied()
    }

    pub fn contains(&self, id: StmtId) -> bool {
        self.positions.contains_key(&id)
    }

    /// Statement following `id` in order.
    pub fn next_in_order(&self, id: StmtId) -> Option<StmtId> {
        let pos = self.position(id)?;
        self.order.get(pos + 1).copied()
    }

    /// Removes statements for which the predicate returns false, keeping
    /// handles of the survivors stable.
    pub fn retain_statements(&mut self, mut keep: impl FnMut(StmtId) -> bool) {
        self.order.retain(|id| keep(*id));
        self.positions = self
            .order
            .iter()
            .enumerate()
            .map(|(pos, id)| (*id, pos))
            .collect();
    }

    /// Applies `f` to every statement-target reference in the body
    /// (branches, switches; trap bounds are handled by the caller).
    pub fn retarget_all(&mut self, f: impl Fn(StmtId) -> StmtId + Copy) {
        let ids: Vec<StmtId> = self.order.clone();
        for id in ids {
            self.stmts[id.0 as usize].retarget(f);
        }
    }

    /// Iterates (id, statement) in order.
    pub fn iter(&self) -> impl Iterator<Item = (StmtId, &Statement)> {
        self.order.iter().map(move |id| (*id, self.stmt(*id)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dex::Proto;

    pub(crate) fn test_sig() -> MethodRef {
        MethodRef {
            owner: "LTest;".into(),
            name: "run".into(),
            proto: Proto {
                return_type: "V".into(),
                params: vec![],
            },
        }
    }

    #[test]
    fn push_and_position() {
        let mut b = Body::new(test_sig(), true);
        let a = b.push(Statement::Nop);
        let r = b.push(Statement::ReturnVoid);
        assert_eq!(b.position(a), Some(0));
        assert_eq!(b.position(r), Some(1));
        assert_eq!(b.next_in_order(a), Some(r));
        assert_eq!(b.next_in_order(r), None);
    }

    #[test]
    fn retain_keeps_handles_stable() {
        let mut b = Body::new(test_sig(), true);
        let n = b.push(Statement::Nop);
        let g = b.push(Statement::Goto { target: n });
        let r = b.push(Statement::ReturnVoid);
        b.retain_statements(|id| id != n);
        assert_eq!(b.position(n), None);
        assert_eq!(b.position(g), Some(0));
        assert_eq!(b.position(r), Some(1));
        assert!(!b.contains(n));
    }

    #[test]
    fn statement_targets_and_retarget() {
        let t1 = StmtId(10);
        let t2 = StmtId(20);
        let mut s = Statement::LookupSwitch {
            key: Value::Int(0),
            cases: vec![(1, t1)],
            default: t2,
        };
        assert_eq!(s.targets(), vec![t1, t2]);
        s.retarget(|_| StmtId(3));
        assert_eq!(s.targets(), vec![StmtId(3), StmtId(3)]);
    }
}
