//! Register-to-local assignment with definition-site splitting.
//!
//! Each definition of a register starts a fresh value version; versions that
//! reach a common control-flow join for the same register are merged
//! (union-find), so no phi nodes are needed. A wide value occupies a
//! register pair under a single version keyed by the low register. The
//! resulting version classes become the body's locals, named `v<reg>`,
//! `v<reg>_2`, ... per register in first-appearance order.

use std::collections::HashMap;

use super::table::{lift_kind, BinForm, LiftKind};
use super::LiftError;
use crate::dex::{CodeItem, DexFile, MethodDef, PoolKind};
use crate::isa::Instruction;

#[derive(Debug, Clone, Copy)]
struct VersionInfo {
    reg: u16,
    wide: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Version(u32);

/// Where a parameter register binds.
#[derive(Debug, Clone)]
pub struct ParamBinding {
    pub reg: u16,
    pub version: Version,
    pub descriptor: String,
    /// `None` marks the implicit `this` binding.
    pub param_index: Option<usize>,
}

/// Registers resolved to split locals: per instruction, the version each
/// used register carries on entry and the version each definition creates.
pub struct RegisterMap {
    parents: Vec<u32>,
    infos: Vec<VersionInfo>,
    use_versions: Vec<HashMap<u16, Version>>,
    def_versions: Vec<Option<Version>>,
    pub params: Vec<ParamBinding>,
}

struct Effects {
    uses: Vec<(u16, bool)>,
    def: Option<(u16, bool)>,
}

impl RegisterMap {
    /// Version a register use resolves to at instruction `idx`.
    pub fn use_version(&self, idx: usize, reg: u16) -> Version {
        self.use_versions[idx][&reg]
    }

    pub fn def_version(&self, idx: usize) -> Option<Version> {
        self.def_versions[idx]
    }

    /// Canonical class of a version after all joins.
    pub fn root(&self, v: Version) -> u32 {
        let mut v = v.0;
        while self.parents[v as usize] != v {
            v = self.parents[v as usize];
        }
        v
    }

    /// Register and wideness of a class, keyed by its root.
    pub fn class_info(&self, root: u32) -> (u16, bool) {
        let info = self.infos[root as usize];
        (info.reg, info.wide)
    }
}

struct Builder {
    parents: Vec<u32>,
    infos: Vec<VersionInfo>,
}

impl Builder {
    fn fresh(&mut self, reg: u16, wide: bool) -> Version {
        let id = self.parents.len() as u32;
        self.parents.push(id);
        self.infos.push(VersionInfo { reg, wide });
        Version(id)
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut v = v;
        while self.parents[v as usize] != v {
            let p = self.parents[v as usize];
            self.parents[v as usize] = self.parents[p as usize];
            v = p;
        }
        v
    }

    /// Union keeping the older version as root, so parameter versions keep
    /// their register-derived names.
    fn union(&mut self, a: Version, b: Version) {
        let ra = self.find(a.0);
        let rb = self.find(b.0);
        if ra == rb {
            return;
        }
        let (root, child) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parents[child as usize] = root;
    }
}

/// Computes the register map for one method body.
pub fn compute(
    dex: &DexFile,
    method: &MethodDef,
    code: &CodeItem,
    instrs: &[Instruction],
) -> Result<RegisterMap, LiftError> {
    let regs_total = code.registers_size as usize;
    let mut b = Builder {
        parents: Vec::new(),
        infos: Vec::new(),
    };

    // Parameter layout: the last ins_size registers bind `this` (instance
    // methods) then the declared parameters, wide ones spanning two slots.
    let mut params = Vec::new();
    let mut entry: Vec<Option<Version>> = vec![None; regs_total];
    {
        let mut reg = code.registers_size - code.ins_size;
        if !method.is_static() {
            let v = b.fresh(reg, false);
            entry[reg as usize] = Some(v);
            params.push(ParamBinding {
                reg,
                version: v,
                descriptor: method.method.owner.clone(),
                param_index: None,
            });
            reg += 1;
        }
        for (i, p) in method.method.proto.params.iter().enumerate() {
            let wide = p == "J" || p == "D";
            let v = b.fresh(reg, wide);
            entry[reg as usize] = Some(v);
            if wide {
                entry[reg as usize + 1] = Some(v);
            }
            params.push(ParamBinding {
                reg,
                version: v,
                descriptor: p.clone(),
                param_index: Some(i),
            });
            reg += if wide { 2 } else { 1 };
        }
    }

    let addr_to_idx: HashMap<u32, usize> =
        instrs.iter().enumerate().map(|(i, ins)| (ins.address, i)).collect();

    // Per-instruction effect lists and fixed definition versions.
    let mut effects = Vec::with_capacity(instrs.len());
    let mut def_versions: Vec<Option<Version>> = Vec::with_capacity(instrs.len());
    for ins in instrs {
        let eff = instruction_effects(dex, ins)?;
        for &(reg, wide) in eff.uses.iter().chain(eff.def.iter()) {
            let top = reg as usize + usize::from(wide);
            if top >= regs_total {
                return Err(LiftError::BadRegister {
                    register: reg,
                    registers_size: code.registers_size,
                    address: ins.address,
                });
            }
        }
        def_versions.push(eff.def.map(|(reg, wide)| b.fresh(reg, wide)));
        effects.push(eff);
    }

    let (succs, exc_succs) = successor_indices(code, instrs, &addr_to_idx)?;
    let live_in = liveness(&effects, &succs, &exc_succs, regs_total);

    // One orphan version per register for uses that no definition reaches.
    let mut orphans: HashMap<u16, Version> = HashMap::new();

    // Worklist dataflow. Joining states unions per-register versions, which
    // only merges classes, so a node needs revisiting only when a register
    // slot goes from unset to set. Registers dead at the join are dropped so
    // unrelated reuses of a register do not end up in one web.
    let mut in_states: Vec<Option<Vec<Option<Version>>>> = vec![None; instrs.len()];
    let mut work: Vec<usize> = Vec::new();
    if !instrs.is_empty() {
        let mut seed = entry.clone();
        filter_dead(&mut seed, &live_in[0]);
        in_states[0] = Some(seed);
        work.push(0);
    }
    while let Some(i) = work.pop() {
        let pre = in_states[i].clone().unwrap();
        let mut state = pre.clone();
        apply(&mut b, &effects[i], def_versions[i], &mut state, &mut orphans);
        // Handlers observe the state before the faulting instruction's
        // definition lands.
        let edges = succs[i]
            .iter()
            .map(|&s| (s, &state))
            .chain(exc_succs[i].iter().map(|&s| (s, &pre)));
        for (s, src) in edges {
            let mut incoming = src.clone();
            filter_dead(&mut incoming, &live_in[s]);
            match &mut in_states[s] {
                slot @ None => {
                    *slot = Some(incoming);
                    work.push(s);
                }
                Some(existing) => {
                    let mut grew = false;
                    for (e, n) in existing.iter_mut().zip(incoming.iter()) {
                        match (e.as_ref(), n) {
                            (None, Some(v)) => {
                                *e = Some(*v);
                                grew = true;
                            }
                            (Some(a), Some(bv)) => b.union(*a, *bv),
                            _ => {}
                        }
                    }
                    if grew {
                        work.push(s);
                    }
                }
            }
        }
    }

    // Final deterministic pass recording the version each operand resolves
    // to. Unreachable instructions run against an empty state and bind
    // orphan versions.
    let mut use_versions: Vec<HashMap<u16, Version>> = Vec::with_capacity(instrs.len());
    for i in 0..instrs.len() {
        let mut state = in_states[i].clone().unwrap_or_else(|| vec![None; regs_total]);
        let mut used = HashMap::new();
        for &(reg, wide) in &effects[i].uses {
            let v = resolve_use(&mut b, &mut state, &mut orphans, reg, wide);
            used.insert(reg, v);
        }
        if let (Some((reg, wide)), Some(v)) = (effects[i].def, def_versions[i]) {
            state[reg as usize] = Some(v);
            if wide {
                state[reg as usize + 1] = Some(v);
            }
        }
        use_versions.push(used);
    }

    Ok(RegisterMap {
        parents: b.parents,
        infos: b.infos,
        use_versions,
        def_versions,
        params,
    })
}

fn filter_dead(state: &mut [Option<Version>], live: &[bool]) {
    for (slot, alive) in state.iter_mut().zip(live.iter()) {
        if !alive {
            *slot = None;
        }
    }
}

/// Backward register liveness over the instruction flow graph; wide
/// operands cover both halves of the pair. Exceptional successors bypass
/// the definition kill, since a throw precedes the def.
fn liveness(
    effects: &[Effects],
    succs: &[Vec<usize>],
    exc_succs: &[Vec<usize>],
    regs_total: usize,
) -> Vec<Vec<bool>> {
    let n = effects.len();
    let mut live_in: Vec<Vec<bool>> = vec![vec![false; regs_total]; n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in (0..n).rev() {
            let mut out = vec![false; regs_total];
            for &s in &succs[i] {
                for (o, l) in out.iter_mut().zip(live_in[s].iter()) {
                    *o |= *l;
                }
            }
            if let Some((reg, wide)) = effects[i].def {
                out[reg as usize] = false;
                if wide {
                    out[reg as usize + 1] = false;
                }
            }
            for &s in &exc_succs[i] {
                for (o, l) in out.iter_mut().zip(live_in[s].iter()) {
                    *o |= *l;
                }
            }
            for &(reg, wide) in &effects[i].uses {
                out[reg as usize] = true;
                if wide {
                    out[reg as usize + 1] = true;
                }
            }
            if out != live_in[i] {
                live_in[i] = out;
                changed = true;
            }
        }
    }
    live_in
}

fn apply(
    b: &mut Builder,
    eff: &Effects,
    def: Option<Version>,
    state: &mut Vec<Option<Version>>,
    orphans: &mut HashMap<u16, Version>,
) {
    for &(reg, wide) in &eff.uses {
        resolve_use(b, state, orphans, reg, wide);
    }
    if let (Some((reg, wide)), Some(v)) = (eff.def, def) {
        state[reg as usize] = Some(v);
        if wide {
            state[reg as usize + 1] = Some(v);
        }
    }
}

fn resolve_use(
    b: &mut Builder,
    state: &mut [Option<Version>],
    orphans: &mut HashMap<u16, Version>,
    reg: u16,
    wide: bool,
) -> Version {
    let v = match state[reg as usize] {
        Some(v) => v,
        None => {
            let v = *orphans.entry(reg).or_insert_with(|| b.fresh(reg, wide));
            state[reg as usize] = Some(v);
            v
        }
    };
    if wide {
        match state[reg as usize + 1] {
            Some(hi) => b.union(v, hi),
            None => state[reg as usize + 1] = Some(v),
        }
    }
    v
}

#[allow(clippy::type_complexity)]
fn successor_indices(
    code: &CodeItem,
    instrs: &[Instruction],
    addr_to_idx: &HashMap<u32, usize>,
) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>), LiftError> {
    let mut succs = vec![Vec::new(); instrs.len()];
    let mut exc_succs = vec![Vec::new(); instrs.len()];
    let lookup = |addr: u32, from: u32| -> Result<usize, LiftError> {
        addr_to_idx
            .get(&addr)
            .copied()
            .filter(|&i| !instrs[i].is_payload_table())
            .ok_or(LiftError::DanglingTarget {
                address: from,
                target: addr,
            })
    };
    for (i, ins) in instrs.iter().enumerate() {
        if ins.is_payload_table() {
            continue;
        }
        let mut out = Vec::new();
        let fallthrough = !matches!(ins.opcode, 0x0e..=0x11 | 0x27 | 0x28 | 0x29 | 0x2a);
        if fallthrough && i + 1 < instrs.len() {
            out.push(i + 1);
        }
        match ins.opcode {
            0x28 | 0x29 | 0x2a => {
                let t = ins.address.wrapping_add_signed(ins.branch_offset.unwrap());
                out.push(lookup(t, ins.address)?);
            }
            0x32..=0x3d => {
                let t = ins.address.wrapping_add_signed(ins.branch_offset.unwrap());
                out.push(lookup(t, ins.address)?);
            }
            0x2b | 0x2c => {
                let targets: Vec<u32> = match &ins.payload {
                    Some(crate::isa::Payload::PackedSwitch { targets, .. }) => targets.clone(),
                    Some(crate::isa::Payload::SparseSwitch { cases }) => {
                        cases.iter().map(|(_, t)| *t).collect()
                    }
                    _ => Vec::new(),
                };
                for t in targets {
                    out.push(lookup(t, ins.address)?);
                }
            }
            _ => {}
        }
        succs[i] = out;
    }
    // Exceptional flow: every instruction in a protected range may transfer
    // to the handlers with its pre-instruction state.
    for t in &code.tries {
        let end = t.start_unit + t.unit_count as u32;
        for h in &t.handlers {
            let hidx = lookup(h.target, t.start_unit)?;
            for (i, ins) in instrs.iter().enumerate() {
                if ins.address >= t.start_unit && ins.address < end && !ins.is_payload_table() {
                    exc_succs[i].push(hidx);
                }
            }
        }
    }
    Ok((succs, exc_succs))
}

/// Registers read and written by one instruction, with wide flags, derived
/// from its mapping template.
fn instruction_effects(dex: &DexFile, ins: &Instruction) -> Result<Effects, LiftError> {
    let none = Effects {
        uses: vec![],
        def: None,
    };
    if ins.is_payload_table() {
        return Ok(none);
    }
    let kind = lift_kind(ins.opcode).ok_or(LiftError::NotLiftable {
        opcode: ins.opcode,
        address: ins.address,
    })?;
    let r = |i: usize| ins.registers[i];
    let eff = match kind {
        LiftKind::Nop | LiftKind::ReturnVoid | LiftKind::Goto => none,
        LiftKind::Move(s) => Effects {
            uses: vec![(r(1), s.is_wide())],
            def: Some((r(0), s.is_wide())),
        },
        LiftKind::MoveResult(s) => Effects {
            uses: vec![],
            def: Some((r(0), s.is_wide())),
        },
        LiftKind::MoveException => Effects {
            uses: vec![],
            def: Some((r(0), false)),
        },
        LiftKind::Return(s) => Effects {
            uses: vec![(r(0), s.is_wide())],
            def: None,
        },
        LiftKind::Const32 | LiftKind::ConstString | LiftKind::ConstClass => Effects {
            uses: vec![],
            def: Some((r(0), false)),
        },
        LiftKind::Const64 => Effects {
            uses: vec![],
            def: Some((r(0), true)),
        },
        LiftKind::MonitorEnter | LiftKind::MonitorExit | LiftKind::Throw => Effects {
            uses: vec![(r(0), false)],
            def: None,
        },
        LiftKind::CheckCast => Effects {
            uses: vec![(r(0), false)],
            def: Some((r(0), false)),
        },
        LiftKind::InstanceOf | LiftKind::ArrayLength => Effects {
            uses: vec![(r(1), false)],
            def: Some((r(0), false)),
        },
        LiftKind::NewInstance => Effects {
            uses: vec![],
            def: Some((r(0), false)),
        },
        LiftKind::NewArray => Effects {
            uses: vec![(r(1), false)],
            def: Some((r(0), false)),
        },
        LiftKind::FilledNewArray => Effects {
            uses: ins.registers.iter().map(|&reg| (reg, false)).collect(),
            def: None,
        },
        LiftKind::FillArrayData | LiftKind::PackedSwitch | LiftKind::SparseSwitch => Effects {
            uses: vec![(r(0), false)],
            def: None,
        },
        LiftKind::Cmp(kind) => {
            let wide = kind.operand_type().is_wide();
            Effects {
                uses: vec![(r(1), wide), (r(2), wide)],
                def: Some((r(0), false)),
            }
        }
        LiftKind::If(_) => Effects {
            uses: vec![(r(0), false), (r(1), false)],
            def: None,
        },
        LiftKind::IfZ(_) => Effects {
            uses: vec![(r(0), false)],
            def: None,
        },
        LiftKind::ArrayGet(s) => Effects {
            uses: vec![(r(1), false), (r(2), false)],
            def: Some((r(0), s.is_wide())),
        },
        LiftKind::ArrayPut(s) => Effects {
            uses: vec![(r(0), s.is_wide()), (r(1), false), (r(2), false)],
            def: None,
        },
        LiftKind::InstanceGet(s) => Effects {
            uses: vec![(r(1), false)],
            def: Some((r(0), s.is_wide())),
        },
        LiftKind::InstancePut(s) => Effects {
            uses: vec![(r(0), s.is_wide()), (r(1), false)],
            def: None,
        },
        LiftKind::StaticGet(s) => Effects {
            uses: vec![],
            def: Some((r(0), s.is_wide())),
        },
        LiftKind::StaticPut(s) => Effects {
            uses: vec![(r(0), s.is_wide())],
            def: None,
        },
        LiftKind::Invoke(_) => Effects {
            uses: invoke_arg_slots(dex, ins)?,
            def: None,
        },
        LiftKind::Unary { ty, .. } => Effects {
            uses: vec![(r(1), ty.is_wide())],
            def: Some((r(0), ty.is_wide())),
        },
        LiftKind::Convert { from, to } => Effects {
            uses: vec![(r(1), from.is_wide())],
            def: Some((r(0), to.is_wide())),
        },
        LiftKind::Binop { op, ty, form, .. } => {
            let wide = ty.is_wide();
            // Long shifts take a narrow int shift distance.
            let shift = matches!(op, crate::ir::BinOp::Shl | crate::ir::BinOp::Shr | crate::ir::BinOp::Ushr);
            match form {
                BinForm::Reg => Effects {
                    uses: vec![(r(1), wide), (r(2), wide && !shift)],
                    def: Some((r(0), wide)),
                },
                BinForm::TwoAddr => Effects {
                    uses: vec![(r(0), wide), (r(1), wide && !shift)],
                    def: Some((r(0), wide)),
                },
                BinForm::Lit => Effects {
                    uses: vec![(r(1), false)],
                    def: Some((r(0), false)),
                },
            }
        }
    };
    Ok(eff)
}

/// Argument registers of an invoke, paired per the callee's proto (wide
/// parameters consume two registers under one use).
pub fn invoke_arg_slots(dex: &DexFile, ins: &Instruction) -> Result<Vec<(u16, bool)>, LiftError> {
    let (_, idx) = ins.pool_index.expect("invoke carries a method index");
    let mref = dex
        .resolve_method(idx)
        .map_err(|_| LiftError::BadPoolIndex {
            pool: PoolKind::Method,
            index: idx,
            address: ins.address,
        })?;
    let is_static = matches!(ins.opcode, 0x71 | 0x77);
    let mut slots = Vec::new();
    let mut cursor = 0usize;
    if !is_static {
        slots.push((
            *ins.registers.get(cursor).ok_or(LiftError::BadInvokeArity {
                address: ins.address,
                expected: 1 + mref.proto.param_units() as usize,
                found: ins.registers.len(),
            })?,
            false,
        ));
        cursor += 1;
    }
    for p in &mref.proto.params {
        let wide = p == "J" || p == "D";
        let reg = *ins.registers.get(cursor).ok_or(LiftError::BadInvokeArity {
            address: ins.address,
            expected: usize::from(!is_static) + mref.proto.param_units() as usize,
            found: ins.registers.len(),
        })?;
        if wide && ins.registers.get(cursor + 1) != Some(&(reg + 1)) {
            return Err(LiftError::BadInvokeArity {
                address: ins.address,
                expected: usize::from(!is_static) + mref.proto.param_units() as usize,
                found: ins.registers.len(),
            });
        }
        slots.push((reg, wide));
        cursor += if wide { 2 } else { 1 };
    }
    if cursor != ins.registers.len() {
        return Err(LiftError::BadInvokeArity {
            address: ins.address,
            expected: cursor,
            found: ins.registers.len(),
        });
    }
    Ok(slots)
}
