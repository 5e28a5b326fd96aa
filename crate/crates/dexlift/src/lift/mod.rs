//! Maps decoded instructions onto IR statements: binds registers to split
//! locals, pairs invokes with their `move-result`, and resolves branch
//! targets through the address map with an entry nop standing in for
//! forward targets until the whole method has been processed.

mod table;
mod webs;

pub use table::{lift_kind, BinForm, LiftKind, PrimTy, Slot};
pub use webs::{invoke_arg_slots, ParamBinding, RegisterMap};

use std::collections::HashMap;

use crate::dex::{CodeItem, DexFile, MethodDef, PoolKind};
use crate::ir::{
    Body, IdentitySource, InvokeKind, IrType, LocalId, Place, Statement, StmtId, Trap, Value,
};
use crate::isa::{decode_stream, Instruction, IsaError, Payload};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error(transparent)]
    Isa(#[from] IsaError),
    #[error("register v{register} out of frame (registers_size {registers_size}) at 0x{address:04x}")]
    BadRegister {
        register: u16,
        registers_size: u16,
        address: u32,
    },
    #[error("branch at 0x{address:04x} targets 0x{target:04x}, which is not an instruction start")]
    DanglingTarget { address: u32, target: u32 },
    #[error("move-result at 0x{address:04x} has no preceding invoke or filled-new-array")]
    OrphanMoveResult { address: u32 },
    #[error("invoke at 0x{address:04x} names {found} argument registers, callee needs {expected}")]
    BadInvokeArity {
        address: u32,
        expected: usize,
        found: usize,
    },
    #[error("{pool} index {index} out of range at 0x{address:04x}")]
    BadPoolIndex {
        pool: PoolKind,
        index: u32,
        address: u32,
    },
    #[error("opcode 0x{opcode:02x} at 0x{address:04x} has no lifting rule")]
    NotLiftable { opcode: u8, address: u32 },
    #[error("exception table entry covers no statements (units 0x{start:04x}..0x{end:04x})")]
    BadTrap { start: u32, end: u32 },
}

/// A jump recorded against a not-yet-lifted target address; provisionally
/// aimed at the entry nop and corrected once the whole method is processed.
#[derive(Debug, Clone)]
pub struct PendingJump {
    pub stmt: StmtId,
    pub slot: JumpSlot,
    pub target_addr: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpSlot {
    Primary,
    Case(usize),
    Default,
}

/// Lifts one method to an untyped body: entry nop, identity prefix, one
/// statement group per instruction, branches resolved, traps mapped.
pub fn lift_method(dex: &DexFile, method: &MethodDef, code: &CodeItem) -> Result<Body, LiftError> {
    let instrs = decode_stream(&code.insns)?;
    let regmap = webs::compute(dex, method, code, &instrs)?;

    let mut ctx = Lifter {
        dex,
        body: Body::new(method.method.clone(), method.is_static()),
        regmap: &regmap,
        instrs: &instrs,
        locals: HashMap::new(),
        name_counts: HashMap::new(),
        entry_nop: StmtId(0),
        pending_addrs: Vec::new(),
        pending_jumps: Vec::new(),
        jump_sites: HashMap::new(),
        spans: HashMap::new(),
        code,
    };

    ctx.entry_nop = ctx.body.push(Statement::Nop);
    ctx.emit_identity_prefix();
    ctx.lift_all()?;
    ctx.resolve_branches()?;
    ctx.map_traps()?;
    Ok(ctx.body)
}

struct Lifter<'a> {
    dex: &'a DexFile,
    body: Body,
    regmap: &'a RegisterMap,
    instrs: &'a [Instruction],
    /// Version class root -> materialized local.
    locals: HashMap<u32, LocalId>,
    /// Splits seen per register, for `v3`, `v3_2`, ... naming.
    name_counts: HashMap<u16, u32>,
    entry_nop: StmtId,
    /// Addresses of zero-statement instructions awaiting the next statement.
    pending_addrs: Vec<u32>,
    pending_jumps: Vec<PendingJump>,
    /// Jump statement -> address it was lifted from, for diagnostics.
    jump_sites: HashMap<StmtId, u32>,
    /// Per address: first and last statement lifted from that instruction.
    spans: HashMap<u32, (StmtId, StmtId)>,
    code: &'a CodeItem,
}

impl<'a> Lifter<'a> {
    fn local_for(&mut self, version: webs::Version) -> LocalId {
        let root = self.regmap.root(version);
        if let Some(id) = self.locals.get(&root) {
            return *id;
        }
        let (reg, _) = self.regmap.class_info(root);
        let n = self.name_counts.entry(reg).or_insert(0);
        *n += 1;
        let name = if *n == 1 {
            format!("v{reg}")
        } else {
            format!("v{reg}_{n}")
        };
        let id = self.body.add_local(name, IrType::Unknown);
        self.locals.insert(root, id);
        id
    }

    fn use_local(&mut self, idx: usize, reg: u16) -> LocalId {
        self.local_for(self.regmap.use_version(idx, reg))
    }

    fn def_local(&mut self, idx: usize) -> LocalId {
        let v = self
            .regmap
            .def_version(idx)
            .expect("instruction defines a register");
        self.local_for(v)
    }

    fn emit_identity_prefix(&mut self) {
        let params: Vec<ParamBinding> = self.regmap.params.clone();
        for p in params {
            let local = self.local_for(p.version);
            let source = match p.param_index {
                None => IdentitySource::This {
                    descriptor: p.descriptor.clone(),
                },
                Some(index) => IdentitySource::Param {
                    index,
                    descriptor: p.descriptor.clone(),
                },
            };
            self.body.local_mut(local).ty =
                IrType::from_descriptor(&p.descriptor).unwrap_or(IrType::Unknown);
            self.body.push(Statement::Identity { local, source });
        }
    }

    fn lift_all(&mut self) -> Result<(), LiftError> {
        for idx in 0..self.instrs.len() {
            let ins = &self.instrs[idx];
            if ins.is_payload_table() {
                continue;
            }
            let before = self.body.len();
            self.map_instruction(idx)?;
            let after = self.body.len();
            if after > before {
                let first = self.body.order()[before];
                let last = self.body.order()[after - 1];
                self.spans.insert(ins.address, (first, last));
                self.body.addr_map.insert(ins.address, first);
                for addr in self.pending_addrs.drain(..) {
                    self.body.addr_map.insert(addr, first);
                    self.spans.insert(addr, (first, first));
                }
            } else {
                self.pending_addrs.push(ins.address);
            }
        }
        Ok(())
    }

    /// Emits the statement group for instruction `idx`.
    fn map_instruction(&mut self, idx: usize) -> Result<(), LiftError> {
        let ins = &self.instrs[idx];
        let kind = lift_kind(ins.opcode).ok_or(LiftError::NotLiftable {
            opcode: ins.opcode,
            address: ins.address,
        })?;
        let r = |i: usize| ins.registers[i];

        match kind {
            LiftKind::Nop => {}
            LiftKind::Move(_) => {
                let src = self.use_local(idx, r(1));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Local(src),
                });
            }
            LiftKind::MoveResult(_) => {
                // Consumed by the preceding invoke / filled-new-array; emits
                // nothing on its own.
                if !self.has_result_producer(idx) {
                    return Err(LiftError::OrphanMoveResult {
                        address: ins.address,
                    });
                }
            }
            LiftKind::MoveException => {
                let local = self.def_local(idx);
                let descriptor = self.exception_descriptor_at(ins.address);
                self.push(Statement::Identity {
                    local,
                    source: IdentitySource::CaughtException { descriptor },
                });
            }
            LiftKind::ReturnVoid => {
                self.push(Statement::ReturnVoid);
            }
            LiftKind::Return(_) => {
                let v = self.use_local(idx, r(0));
                self.push(Statement::Return(Value::Local(v)));
            }
            LiftKind::Const32 => {
                // Provisionally an int constant; typing may reinterpret the
                // bits as float or rewrite zero to null.
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Int(ins.literal.unwrap() as i32),
                });
            }
            LiftKind::Const64 => {
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Long(ins.literal.unwrap()),
                });
            }
            LiftKind::ConstString => {
                let s = self.resolve_string(ins)?;
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Str(s),
                });
            }
            LiftKind::ConstClass => {
                let d = self.resolve_type(ins)?;
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Class(d),
                });
            }
            LiftKind::MonitorEnter => {
                let v = self.use_local(idx, r(0));
                self.push(Statement::MonitorEnter(Value::Local(v)));
            }
            LiftKind::MonitorExit => {
                let v = self.use_local(idx, r(0));
                self.push(Statement::MonitorExit(Value::Local(v)));
            }
            LiftKind::CheckCast => {
                let to = IrType::from_descriptor(&self.resolve_type(ins)?).unwrap_or(IrType::Unknown);
                let src = self.use_local(idx, r(0));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Cast {
                        from: to.clone(),
                        to,
                        operand: Box::new(Value::Local(src)),
                    },
                });
            }
            LiftKind::InstanceOf => {
                let ty = IrType::from_descriptor(&self.resolve_type(ins)?).unwrap_or(IrType::Unknown);
                let src = self.use_local(idx, r(1));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::InstanceOf {
                        ty,
                        operand: Box::new(Value::Local(src)),
                    },
                });
            }
            LiftKind::ArrayLength => {
                let src = self.use_local(idx, r(1));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::ArrayLength(Box::new(Value::Local(src))),
                });
            }
            LiftKind::NewInstance => {
                let d = self.resolve_type(ins)?;
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::New(d),
                });
            }
            LiftKind::NewArray => {
                let d = self.resolve_type(ins)?;
                let elem = match IrType::from_descriptor(&d) {
                    Some(IrType::Array(e)) => *e,
                    _ => IrType::Unknown,
                };
                let size = self.use_local(idx, r(1));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::NewArray {
                        elem,
                        size: Box::new(Value::Local(size)),
                    },
                });
            }
            LiftKind::FilledNewArray => self.lift_filled_new_array(idx)?,
            LiftKind::FillArrayData => self.lift_fill_array_data(idx)?,
            LiftKind::Throw => {
                let v = self.use_local(idx, r(0));
                self.push(Statement::Throw(Value::Local(v)));
            }
            LiftKind::Goto => {
                let target = ins.address.wrapping_add_signed(ins.branch_offset.unwrap());
                let entry = self.entry_nop;
                let id = self.push(Statement::Goto { target: entry });
                self.jump_sites.insert(id, ins.address);
                self.jump_to(id, JumpSlot::Primary, target);
            }
            LiftKind::PackedSwitch => {
                let Some(Payload::PackedSwitch { first_key, targets }) = ins.payload.clone() else {
                    unreachable!("decode attaches switch payloads");
                };
                let key = self.use_local(idx, r(0));
                let fallthrough = ins.address + ins.width;
                let entry = self.entry_nop;
                let id = self.push(Statement::TableSwitch {
                    key: Value::Local(key),
                    first_key,
                    targets: vec![entry; targets.len()],
                    default: entry,
                });
                self.jump_sites.insert(id, ins.address);
                for (i, t) in targets.iter().enumerate() {
                    self.jump_to(id, JumpSlot::Case(i), *t);
                }
                self.jump_to(id, JumpSlot::Default, fallthrough);
            }
            LiftKind::SparseSwitch => {
                let Some(Payload::SparseSwitch { cases }) = ins.payload.clone() else {
                    unreachable!("decode attaches switch payloads");
                };
                let key = self.use_local(idx, r(0));
                let fallthrough = ins.address + ins.width;
                let entry = self.entry_nop;
                let id = self.push(Statement::LookupSwitch {
                    key: Value::Local(key),
                    cases: cases.iter().map(|(k, _)| (*k, entry)).collect(),
                    default: entry,
                });
                self.jump_sites.insert(id, ins.address);
                for (i, (_, t)) in cases.iter().enumerate() {
                    self.jump_to(id, JumpSlot::Case(i), *t);
                }
                self.jump_to(id, JumpSlot::Default, fallthrough);
            }
            LiftKind::Cmp(kind) => {
                let lhs = self.use_local(idx, r(1));
                let rhs = self.use_local(idx, r(2));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Compare {
                        kind,
                        lhs: Box::new(Value::Local(lhs)),
                        rhs: Box::new(Value::Local(rhs)),
                    },
                });
            }
            LiftKind::If(op) => {
                let lhs = self.use_local(idx, r(0));
                let rhs = self.use_local(idx, r(1));
                let target = ins.address.wrapping_add_signed(ins.branch_offset.unwrap());
                let entry = self.entry_nop;
                let id = self.push(Statement::If {
                    op,
                    lhs: Value::Local(lhs),
                    rhs: Value::Local(rhs),
                    target: entry,
                });
                self.jump_sites.insert(id, ins.address);
                self.jump_to(id, JumpSlot::Primary, target);
            }
            LiftKind::IfZ(op) => {
                let lhs = self.use_local(idx, r(0));
                let target = ins.address.wrapping_add_signed(ins.branch_offset.unwrap());
                let entry = self.entry_nop;
                let id = self.push(Statement::If {
                    op,
                    lhs: Value::Local(lhs),
                    rhs: Value::Int(0),
                    target: entry,
                });
                self.jump_sites.insert(id, ins.address);
                self.jump_to(id, JumpSlot::Primary, target);
            }
            LiftKind::ArrayGet(_) => {
                let base = self.use_local(idx, r(1));
                let index = self.use_local(idx, r(2));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::ArrayElem {
                        base,
                        index: Box::new(Value::Local(index)),
                    },
                });
            }
            LiftKind::ArrayPut(_) => {
                let src = self.use_local(idx, r(0));
                let base = self.use_local(idx, r(1));
                let index = self.use_local(idx, r(2));
                self.push(Statement::Assign {
                    place: Place::ArrayElem {
                        base,
                        index: Value::Local(index),
                    },
                    value: Value::Local(src),
                });
            }
            LiftKind::InstanceGet(_) => {
                let field = self.resolve_field(ins)?;
                let base = self.use_local(idx, r(1));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::InstanceField { base, field },
                });
            }
            LiftKind::InstancePut(_) => {
                let field = self.resolve_field(ins)?;
                let src = self.use_local(idx, r(0));
                let base = self.use_local(idx, r(1));
                self.push(Statement::Assign {
                    place: Place::InstanceField { base, field },
                    value: Value::Local(src),
                });
            }
            LiftKind::StaticGet(_) => {
                let field = self.resolve_field(ins)?;
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::StaticField(field),
                });
            }
            LiftKind::StaticPut(_) => {
                let field = self.resolve_field(ins)?;
                let src = self.use_local(idx, r(0));
                self.push(Statement::Assign {
                    place: Place::StaticField(field),
                    value: Value::Local(src),
                });
            }
            LiftKind::Invoke(kind) => self.lift_invoke(idx, kind)?,
            LiftKind::Unary { op, ty } => {
                let src = self.use_local(idx, r(1));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Unary {
                        op,
                        ty: ty.ir(),
                        operand: Box::new(Value::Local(src)),
                    },
                });
            }
            LiftKind::Convert { from, to } => {
                let src = self.use_local(idx, r(1));
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Cast {
                        from: from.ir(),
                        to: to.ir(),
                        operand: Box::new(Value::Local(src)),
                    },
                });
            }
            LiftKind::Binop {
                op,
                reversed,
                ty,
                form,
            } => {
                let (lhs, rhs) = match form {
                    BinForm::Reg => (
                        Value::Local(self.use_local(idx, r(1))),
                        Value::Local(self.use_local(idx, r(2))),
                    ),
                    BinForm::TwoAddr => (
                        Value::Local(self.use_local(idx, r(0))),
                        Value::Local(self.use_local(idx, r(1))),
                    ),
                    BinForm::Lit => (
                        Value::Local(self.use_local(idx, r(1))),
                        Value::Int(ins.literal.unwrap() as i32),
                    ),
                };
                // rsub computes literal - register.
                let (lhs, rhs) = if reversed { (rhs, lhs) } else { (lhs, rhs) };
                let dst = self.def_local(idx);
                self.push(Statement::Assign {
                    place: Place::Local(dst),
                    value: Value::Binary {
                        op,
                        ty: ty.ir(),
                        lhs: Box::new(lhs),
                        rhs: Box::new(rhs),
                    },
                });
            }
        }
        Ok(())
    }

    fn lift_invoke(&mut self, idx: usize, kind: InvokeKind) -> Result<(), LiftError> {
        let ins = &self.instrs[idx];
        let (_, pool_idx) = ins.pool_index.unwrap();
        let method = self
            .dex
            .resolve_method(pool_idx)
            .map_err(|_| LiftError::BadPoolIndex {
                pool: PoolKind::Method,
                index: pool_idx,
                address: ins.address,
            })?
            .clone();
        let slots = invoke_arg_slots(self.dex, ins)?;
        let args: Vec<Value> = slots
            .iter()
            .map(|&(reg, _)| Value::Local(self.use_local(idx, reg)))
            .collect();
        if method.proto.return_type == "V" {
            // A following move-result against a void callee is malformed.
            if let Some(j) = self.following_move_result(idx) {
                return Err(LiftError::OrphanMoveResult {
                    address: self.instrs[j].address,
                });
            }
        }
        let result = if method.proto.return_type == "V" {
            None
        } else {
            self.pending_result_local(idx)
        };
        self.push(Statement::Invoke {
            kind,
            method,
            args,
            result,
        });
        Ok(())
    }

    fn lift_filled_new_array(&mut self, idx: usize) -> Result<(), LiftError> {
        let ins = &self.instrs[idx];
        let descriptor = self.resolve_type(ins)?;
        let elem = match IrType::from_descriptor(&descriptor) {
            Some(IrType::Array(e)) => *e,
            _ => IrType::Unknown,
        };
        let element_locals: Vec<LocalId> = ins
            .registers
            .clone()
            .iter()
            .map(|&reg| self.use_local(idx, reg))
            .collect();
        let dst = match self.pending_result_local(idx) {
            Some(l) => l,
            // Result discarded: keep the allocation and element stores
            // against a synthesized local.
            None => self
                .body
                .add_local(format!("tmp_{:x}", ins.address), IrType::Unknown),
        };
        self.push(Statement::Assign {
            place: Place::Local(dst),
            value: Value::NewArray {
                elem,
                size: Box::new(Value::Int(element_locals.len() as i32)),
            },
        });
        for (i, src) in element_locals.iter().enumerate() {
            self.push(Statement::Assign {
                place: Place::ArrayElem {
                    base: dst,
                    index: Value::Int(i as i32),
                },
                value: Value::Local(*src),
            });
        }
        Ok(())
    }

    fn lift_fill_array_data(&mut self, idx: usize) -> Result<(), LiftError> {
        let ins = &self.instrs[idx];
        let Some(Payload::FillArray {
            element_width,
            data,
        }) = ins.payload.clone()
        else {
            unreachable!("decode attaches fill-array payloads");
        };
        let base = self.use_local(idx, ins.registers[0]);
        let w = element_width as usize;
        for (i, chunk) in data.chunks(w).enumerate() {
            // Raw element bits, sign-extended into the provisional constant
            // width; reinterpreted later if the array holds floats/doubles.
            let value = match w {
                1 => Value::Int(chunk[0] as i8 as i32),
                2 => Value::Int(i16::from_le_bytes([chunk[0], chunk[1]]) as i32),
                4 => Value::Int(i32::from_le_bytes(chunk.try_into().unwrap())),
                _ => Value::Long(i64::from_le_bytes(chunk.try_into().unwrap())),
            };
            self.push(Statement::Assign {
                place: Place::ArrayElem {
                    base,
                    index: Value::Int(i as i32),
                },
                value,
            });
        }
        Ok(())
    }

    /// Index of the move-result* instruction consuming `idx`'s result, if
    /// the immediately following instruction (ignoring nops) is one.
    fn following_move_result(&self, idx: usize) -> Option<usize> {
        let mut j = idx + 1;
        while j < self.instrs.len() {
            let ins = &self.instrs[j];
            if ins.is_payload_table() || ins.opcode == 0x00 {
                j += 1;
                continue;
            }
            return matches!(ins.opcode, 0x0a..=0x0c).then_some(j);
        }
        None
    }

    fn pending_result_local(&mut self, idx: usize) -> Option<LocalId> {
        let j = self.following_move_result(idx)?;
        Some(self.def_local(j))
    }

    /// True when a move-result at `idx` has an invoke or filled-new-array
    /// immediately before it (ignoring nops).
    fn has_result_producer(&self, idx: usize) -> bool {
        let mut j = idx;
        while j > 0 {
            j -= 1;
            let ins = &self.instrs[j];
            if ins.is_payload_table() || ins.opcode == 0x00 {
                continue;
            }
            return matches!(ins.opcode, 0x24 | 0x25 | 0x6e..=0x72 | 0x74..=0x78);
        }
        false
    }

    /// Caught-exception descriptor for a handler entry at `addr`: the single
    /// descriptor when one applies, Throwable when several (or a catch-all)
    /// share the handler.
    fn exception_descriptor_at(&self, addr: u32) -> String {
        let mut found: Option<String> = None;
        for t in &self.code.tries {
            for h in &t.handlers {
                if h.target != addr {
                    continue;
                }
                match (&found, &h.exception) {
                    (None, Some(d)) => found = Some(d.clone()),
                    (None, None) => found = Some("Ljava/lang/Throwable;".into()),
                    (Some(prev), Some(d)) if prev == d => {}
                    _ => return "Ljava/lang/Throwable;".into(),
                }
            }
        }
        found.unwrap_or_else(|| "Ljava/lang/Throwable;".into())
    }

    fn push(&mut self, st: Statement) -> StmtId {
        self.body.push(st)
    }

    /// Retargets immediately when the target address is already mapped,
    /// otherwise records a pending jump against the entry nop.
    fn jump_to(&mut self, stmt: StmtId, slot: JumpSlot, target_addr: u32) {
        if let Some(&t) = self.body.addr_map.get(&target_addr) {
            patch(self.body.stmt_mut(stmt), slot, t);
        } else {
            self.pending_jumps.push(PendingJump {
                stmt,
                slot,
                target_addr,
            });
        }
    }

    fn resolve_branches(&mut self) -> Result<(), LiftError> {
        for pj in std::mem::take(&mut self.pending_jumps) {
            let target = *self.body.addr_map.get(&pj.target_addr).ok_or_else(|| {
                LiftError::DanglingTarget {
                    address: self.jump_sites.get(&pj.stmt).copied().unwrap_or(0),
                    target: pj.target_addr,
                }
            })?;
            patch(self.body.stmt_mut(pj.stmt), pj.slot, target);
        }
        Ok(())
    }

    fn map_traps(&mut self) -> Result<(), LiftError> {
        for t in &self.code.tries {
            let end = t.start_unit + t.unit_count as u32;
            let mut first: Option<StmtId> = None;
            let mut last: Option<StmtId> = None;
            for (addr, (f, l)) in &self.spans {
                if *addr >= t.start_unit && *addr < end {
                    let fp = self.body.position(*f).unwrap();
                    if first.map_or(true, |c| fp < self.body.position(c).unwrap()) {
                        first = Some(*f);
                    }
                    let lp = self.body.position(*l).unwrap();
                    if last.map_or(true, |c| lp > self.body.position(c).unwrap()) {
                        last = Some(*l);
                    }
                }
            }
            let (Some(first), Some(last)) = (first, last) else {
                return Err(LiftError::BadTrap {
                    start: t.start_unit,
                    end,
                });
            };
            for h in &t.handlers {
                let handler =
                    *self
                        .body
                        .addr_map
                        .get(&h.target)
                        .ok_or(LiftError::DanglingTarget {
                            address: t.start_unit,
                            target: h.target,
                        })?;
                self.body.traps.push(Trap {
                    first,
                    last,
                    handler,
                    exception: h.exception.clone(),
                });
            }
        }
        Ok(())
    }

    fn resolve_string(&self, ins: &Instruction) -> Result<String, LiftError> {
        let (_, idx) = ins.pool_index.unwrap();
        self.dex
            .resolve_string(idx)
            .map(str::to_string)
            .map_err(|_| LiftError::BadPoolIndex {
                pool: PoolKind::String,
                index: idx,
                address: ins.address,
            })
    }

    fn resolve_type(&self, ins: &Instruction) -> Result<String, LiftError> {
        let (_, idx) = ins.pool_index.unwrap();
        self.dex
            .resolve_type(idx)
            .map(str::to_string)
            .map_err(|_| LiftError::BadPoolIndex {
                pool: PoolKind::Type,
                index: idx,
                address: ins.address,
            })
    }

    fn resolve_field(&self, ins: &Instruction) -> Result<crate::dex::FieldRef, LiftError> {
        let (_, idx) = ins.pool_index.unwrap();
        self.dex
            .resolve_field(idx)
            .cloned()
            .map_err(|_| LiftError::BadPoolIndex {
                pool: PoolKind::Field,
                index: idx,
                address: ins.address,
            })
    }
}

fn patch(st: &mut Statement, slot: JumpSlot, target: StmtId) {
    match (st, slot) {
        (Statement::Goto { target: t }, JumpSlot::Primary) => *t = target,
        (Statement::If { target: t, .. }, JumpSlot::Primary) => *t = target,
        (Statement::TableSwitch { targets, .. }, JumpSlot::Case(i)) => targets[i] = target,
        (Statement::TableSwitch { default, .. }, JumpSlot::Default) => *default = target,
        (Statement::LookupSwitch { cases, .. }, JumpSlot::Case(i)) => cases[i].1 = target,
        (Statement::LookupSwitch { default, .. }, JumpSlot::Default) => *default = target,
        (st, slot) => unreachable!("jump slot {slot:?} does not fit {}", st.kind_name()),
    }
}
