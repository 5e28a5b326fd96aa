//! Reference interpreter over decoded register-machine instructions.

use std::collections::HashMap;

use super::*;
use crate::dex::{CodeItem, DexFile};
use crate::isa::{decode_stream, Instruction, Payload};

/// Executes one method's bytecode against scripted stubs. `args` follow the
/// call convention: `this` first for instance methods, then parameters.
/// `ret_descriptor` shapes the canonical returned value.
pub fn exec_dalvik(
    dex: &DexFile,
    code: &CodeItem,
    ret_descriptor: &str,
    args: &[RtValue],
    env: &StubEnv,
) -> Result<RunResult, OracleError> {
    let instrs = decode_stream(&code.insns)?;
    let index_of: HashMap<u32, usize> = instrs
        .iter()
        .enumerate()
        .map(|(i, ins)| (ins.address, i))
        .collect();

    let mut m = Machine {
        dex,
        code,
        env,
        regs: vec![0u32; code.registers_size as usize],
        heap: Heap::default(),
        statics: env.initial_statics.clone(),
        calls: Vec::new(),
        pending_result: None,
        pending_exception: 0,
    };

    // Bind arguments into the tail of the frame.
    let mut reg = (code.registers_size - code.ins_size) as usize;
    for a in args {
        match a {
            RtValue::Int(v) => m.regs[reg] = *v as u32,
            RtValue::Float(v) => m.regs[reg] = *v,
            RtValue::Ref(h) => m.regs[reg] = *h,
            RtValue::Long(v) => {
                m.regs[reg] = *v as u32;
                m.regs[reg + 1] = (*v as u64 >> 32) as u32;
            }
            RtValue::Double(v) => {
                m.regs[reg] = *v as u32;
                m.regs[reg + 1] = (*v >> 32) as u32;
            }
        }
        reg += if a.is_wide() { 2 } else { 1 };
    }

    let mut idx = 0usize;
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > STEP_LIMIT {
            return Err(OracleError::StepLimit);
        }
        let Some(ins) = instrs.get(idx) else {
            return Err(OracleError::Malformed {
                what: "execution ran off the end of the method".into(),
            });
        };
        match m.step(ins)? {
            Flow::Next => idx += 1,
            Flow::Jump(addr) => {
                idx = *index_of.get(&addr).ok_or(OracleError::Malformed {
                    what: format!("jump to non-instruction address 0x{addr:04x}"),
                })?;
            }
            Flow::Return(v) => {
                let outcome = Outcome::Returned(v.map(|rv| canon(&m.heap, rv, 8)));
                return Ok(RunResult {
                    outcome,
                    calls: m.calls,
                });
            }
            Flow::Throw(handle) => {
                match m.dispatch_exception(ins.address, handle) {
                    Some(target) => {
                        idx = *index_of.get(&target).ok_or(OracleError::Malformed {
                            what: format!("handler at non-instruction address 0x{target:04x}"),
                        })?;
                    }
                    None => {
                        let class = m
                            .heap
                            .class_of(handle)
                            .unwrap_or_else(|| "Ljava/lang/Throwable;".into());
                        return Ok(RunResult {
                            outcome: Outcome::Threw(class),
                            calls: m.calls,
                        });
                    }
                }
            }
        }
        let _ = ret_descriptor;
    }
}

enum Flow {
    Next,
    Jump(u32),
    Return(Option<RtValue>),
    Throw(u32),
}

struct Machine<'a> {
    dex: &'a DexFile,
    code: &'a CodeItem,
    env: &'a StubEnv,
    regs: Vec<u32>,
    heap: Heap,
    statics: HashMap<String, u64>,
    calls: Vec<String>,
    pending_result: Option<(u64, bool)>,
    pending_exception: u32,
}

impl<'a> Machine<'a> {
    fn r32(&self, reg: u16) -> u32 {
        self.regs[reg as usize]
    }

    fn set32(&mut self, reg: u16, v: u32) {
        self.regs[reg as usize] = v;
    }

    fn r64(&self, reg: u16) -> u64 {
        self.regs[reg as usize] as u64 | ((self.regs[reg as usize + 1] as u64) << 32)
    }

    fn set64(&mut self, reg: u16, v: u64) {
        self.regs[reg as usize] = v as u32;
        self.regs[reg as usize + 1] = (v >> 32) as u32;
    }

    fn throw_new(&mut self, class: &str) -> Flow {
        let h = self.heap.alloc(HeapObj::Object {
            class: class.to_string(),
            fields: HashMap::new(),
        });
        Flow::Throw(h)
    }

    /// Finds the handler for an exception raised at `addr`; returns its
    /// target address and parks the exception for move-exception.
    fn dispatch_exception(&mut self, addr: u32, handle: u32) -> Option<u32> {
        let class = self.heap.class_of(handle)?;
        for t in &self.code.tries {
            let end = t.start_unit + t.unit_count as u32;
            if addr < t.start_unit || addr >= end {
                continue;
            }
            for h in &t.handlers {
                let matches = match &h.exception {
                    None => true,
                    Some(want) => self.env.is_subtype(&class, want),
                };
                if matches {
                    self.pending_exception = handle;
                    return Some(h.target);
                }
            }
        }
        None
    }

    fn step(&mut self, ins: &Instruction) -> Result<Flow, OracleError> {
        use Flow::*;
        let op = ins.opcode;
        let r = |i: usize| ins.registers[i];
        let target = || {
            ins.address
                .wrapping_add_signed(ins.branch_offset.unwrap_or(0))
        };

        if ins.is_payload_table() {
            // Data, not code; reaching one by fall-through is malformed.
            return Err(OracleError::Malformed {
                what: format!("fell through into payload table at 0x{:04x}", ins.address),
            });
        }

        let flow = match op {
            0x00 => Next,
            // moves
            0x01 | 0x02 | 0x03 | 0x07 | 0x08 | 0x09 => {
                let v = self.r32(r(1));
                self.set32(r(0), v);
                Next
            }
            0x04 | 0x05 | 0x06 => {
                let v = self.r64(r(1));
                self.set64(r(0), v);
                Next
            }
            0x0a | 0x0c => {
                let (v, _) = self.pending_result.take().ok_or(OracleError::Malformed {
                    what: "move-result without pending result".into(),
                })?;
                self.set32(r(0), v as u32);
                Next
            }
            0x0b => {
                let (v, _) = self.pending_result.take().ok_or(OracleError::Malformed {
                    what: "move-result-wide without pending result".into(),
                })?;
                self.set64(r(0), v);
                Next
            }
            0x0d => {
                self.set32(r(0), self.pending_exception);
                self.pending_exception = 0;
                Next
            }
            // returns
            0x0e => Return(None),
            0x0f => Return(Some(RtValue::Int(self.r32(r(0)) as i32))),
            0x10 => Return(Some(RtValue::Long(self.r64(r(0)) as i64))),
            0x11 => Return(Some(RtValue::Ref(self.r32(r(0))))),
            // constants
            0x12 | 0x13 | 0x14 | 0x15 => {
                self.set32(r(0), ins.literal.unwrap() as i32 as u32);
                Next
            }
            0x16 | 0x17 | 0x18 | 0x19 => {
                self.set64(r(0), ins.literal.unwrap() as u64);
                Next
            }
            0x1a | 0x1b => {
                let (_, idx) = ins.pool_index.unwrap();
                let s = self.dex.resolve_string(idx).map_err(|e| OracleError::Malformed {
                    what: e.to_string(),
                })?;
                let h = self.heap.alloc(HeapObj::Str(s.to_string()));
                self.set32(r(0), h);
                Next
            }
            0x1c => {
                return Err(OracleError::Unsupported {
                    what: "const-class".into(),
                })
            }
            // monitors: no-op besides the null check
            0x1d | 0x1e => {
                if self.r32(r(0)) == 0 {
                    self.throw_new(NULL_POINTER_EXCEPTION)
                } else {
                    Next
                }
            }
            0x1f => {
                let h = self.r32(r(0));
                if h == 0 {
                    Next
                } else {
                    let class = self.heap.class_of(h).unwrap();
                    let want = self.type_at(ins)?;
                    if self.env.is_subtype(&class, &want) {
                        Next
                    } else {
                        self.throw_new(CLASS_CAST_EXCEPTION)
                    }
                }
            }
            0x20 => {
                let h = self.r32(r(1));
                let want = self.type_at(ins)?;
                let res = h != 0 && self.env.is_subtype(&self.heap.class_of(h).unwrap(), &want);
                self.set32(r(0), res as u32);
                Next
            }
            0x21 => {
                let h = self.r32(r(1));
                match self.heap.get(h) {
                    None => self.throw_new(NULL_POINTER_EXCEPTION),
                    Some(HeapObj::Array { data, .. }) => {
                        let n = data.len() as u32;
                        self.set32(r(0), n);
                        Next
                    }
                    Some(_) => {
                        return Err(OracleError::Malformed {
                            what: "array-length on non-array".into(),
                        })
                    }
                }
            }
            0x22 => {
                let class = self.type_at(ins)?;
                let h = self.heap.alloc(HeapObj::Object {
                    class,
                    fields: HashMap::new(),
                });
                self.set32(r(0), h);
                Next
            }
            0x23 => {
                let len = self.r32(r(1)) as i32;
                if len < 0 {
                    self.throw_new(NEG_ARRAY_SIZE_EXCEPTION)
                } else {
                    let desc = self.type_at(ins)?;
                    let elem = desc[1..].to_string();
                    let h = self.heap.alloc(HeapObj::Array {
                        elem,
                        data: vec![0; len as usize],
                    });
                    self.set32(r(0), h);
                    Next
                }
            }
            0x24 | 0x25 => {
                let desc = self.type_at(ins)?;
                let elem = desc[1..].to_string();
                let data: Vec<u64> = ins
                    .registers
                    .iter()
                    .map(|&reg| self.r32(reg) as u64)
                    .collect();
                let h = self.heap.alloc(HeapObj::Array { elem, data });
                self.pending_result = Some((h as u64, false));
                Next
            }
            0x26 => {
                let h = self.r32(r(0));
                let Some(Payload::FillArray {
                    element_width,
                    data,
                }) = &ins.payload
                else {
                    return Err(OracleError::Malformed {
                        what: "fill-array-data without payload".into(),
                    });
                };
                if h == 0 {
                    self.throw_new(NULL_POINTER_EXCEPTION)
                } else {
                    let w = *element_width as usize;
                    let cells: Vec<u64> = data
                        .chunks(w)
                        .map(|c| {
                            let mut raw = 0u64;
                            for (i, b) in c.iter().enumerate() {
                                raw |= (*b as u64) << (8 * i);
                            }
                            raw
                        })
                        .collect();
                    match self.heap.get_mut(h) {
                        Some(HeapObj::Array { data, .. }) => {
                            for (slot, v) in data.iter_mut().zip(cells) {
                                *slot = v;
                            }
                            Next
                        }
                        _ => {
                            return Err(OracleError::Malformed {
                                what: "fill-array-data on non-array".into(),
                            })
                        }
                    }
                }
            }
            0x27 => {
                let h = self.r32(r(0));
                if h == 0 {
                    self.throw_new(NULL_POINTER_EXCEPTION)
                } else {
                    Flow::Throw(h)
                }
            }
            0x28 | 0x29 | 0x2a => Jump(target()),
            0x2b => {
                let key = self.r32(r(0)) as i32;
                let Some(Payload::PackedSwitch { first_key, targets }) = &ins.payload else {
                    return Err(OracleError::Malformed {
                        what: "packed-switch without payload".into(),
                    });
                };
                let idx = key.wrapping_sub(*first_key);
                if idx >= 0 && (idx as usize) < targets.len() {
                    Jump(targets[idx as usize])
                } else {
                    Jump(ins.address + ins.width)
                }
            }
            0x2c => {
                let key = self.r32(r(0)) as i32;
                let Some(Payload::SparseSwitch { cases }) = &ins.payload else {
                    return Err(OracleError::Malformed {
                        what: "sparse-switch without payload".into(),
                    });
                };
                match cases.iter().find(|(k, _)| *k == key) {
                    Some((_, t)) => Jump(*t),
                    None => Jump(ins.address + ins.width),
                }
            }
            // comparisons producing -1/0/1
            0x2d | 0x2e => {
                let a = f32::from_bits(self.r32(r(1)));
                let b = f32::from_bits(self.r32(r(2)));
                let v = fp_cmp(a.partial_cmp(&b), op == 0x2e);
                self.set32(r(0), v as u32);
                Next
            }
            0x2f | 0x30 => {
                let a = f64::from_bits(self.r64(r(1)));
                let b = f64::from_bits(self.r64(r(2)));
                let v = fp_cmp(a.partial_cmp(&b), op == 0x30);
                self.set32(r(0), v as u32);
                Next
            }
            0x31 => {
                let a = self.r64(r(1)) as i64;
                let b = self.r64(r(2)) as i64;
                self.set32(r(0), (a.cmp(&b) as i32) as u32);
                Next
            }
            // branches
            0x32..=0x37 => {
                let a = self.r32(r(0)) as i32;
                let b = self.r32(r(1)) as i32;
                if int_rel(op - 0x32, a, b) {
                    Jump(target())
                } else {
                    Next
                }
            }
            0x38..=0x3d => {
                let a = self.r32(r(0)) as i32;
                if int_rel(op - 0x38, a, 0) {
                    Jump(target())
                } else {
                    Next
                }
            }
            // array accesses
            0x44..=0x4a => self.aget(op, r(0), r(1), r(2))?,
            0x4b..=0x51 => self.aput(op, r(0), r(1), r(2))?,
            // field accesses
            0x52..=0x58 => {
                let obj = self.r32(r(1));
                let f = self.field_at(ins)?;
                if obj == 0 {
                    self.throw_new(NULL_POINTER_EXCEPTION)
                } else {
                    let key = format!("{}:{}", f.name, f.descriptor);
                    let raw = match self.heap.get(obj) {
                        Some(HeapObj::Object { fields, .. }) => {
                            fields.get(&key).copied().unwrap_or(0)
                        }
                        _ => 0,
                    };
                    if f.descriptor == "J" || f.descriptor == "D" {
                        self.set64(r(0), raw);
                    } else {
                        self.set32(r(0), raw_to_u32(raw, &f.descriptor));
                    }
                    Next
                }
            }
            0x59..=0x5f => {
                let obj = self.r32(r(1));
                let f = self.field_at(ins)?;
                if obj == 0 {
                    self.throw_new(NULL_POINTER_EXCEPTION)
                } else {
                    let raw = if f.descriptor == "J" || f.descriptor == "D" {
                        self.r64(r(0))
                    } else {
                        value_to_raw(raw_to_value(self.r32(r(0)) as u64, &f.descriptor), &f.descriptor)
                    };
                    let key = format!("{}:{}", f.name, f.descriptor);
                    match self.heap.get_mut(obj) {
                        Some(HeapObj::Object { fields, .. }) => {
                            fields.insert(key, raw);
                            Next
                        }
                        _ => {
                            return Err(OracleError::Malformed {
                                what: "iput on non-object".into(),
                            })
                        }
                    }
                }
            }
            0x60..=0x66 => {
                let f = self.field_at(ins)?;
                let raw = self.statics.get(&f.to_string()).copied().unwrap_or(0);
                if f.descriptor == "J" || f.descriptor == "D" {
                    self.set64(r(0), raw);
                } else {
                    self.set32(r(0), raw_to_u32(raw, &f.descriptor));
                }
                Next
            }
            0x67..=0x6d => {
                let f = self.field_at(ins)?;
                let raw = if f.descriptor == "J" || f.descriptor == "D" {
                    self.r64(r(0))
                } else {
                    value_to_raw(raw_to_value(self.r32(r(0)) as u64, &f.descriptor), &f.descriptor)
                };
                self.statics.insert(f.to_string(), raw);
                Next
            }
            // invokes
            0x6e..=0x72 | 0x74..=0x78 => self.invoke(ins)?,
            // unary / conversions
            0x7b => self.un32(ins, |v| (v as i32).wrapping_neg() as u32),
            0x7c => self.un32(ins, |v| !v),
            0x7d => self.un64(ins, |v| (v as i64).wrapping_neg() as u64),
            0x7e => self.un64(ins, |v| !v),
            0x7f => self.un32(ins, |v| (-f32::from_bits(v)).to_bits()),
            0x80 => self.un64(ins, |v| (-f64::from_bits(v)).to_bits()),
            0x81 => self.widen(ins, |v| (v as i32 as i64) as u64),
            0x82 => self.un32(ins, |v| (v as i32 as f32).to_bits()),
            0x83 => self.widen(ins, |v| (v as i32 as f64).to_bits()),
            0x84 => self.narrow(ins, |v| v as i64 as i32 as u32),
            0x85 => self.narrow(ins, |v| (v as i64 as f32).to_bits()),
            0x86 => self.un64(ins, |v| (v as i64 as f64).to_bits()),
            0x87 => self.un32(ins, |v| (f32::from_bits(v) as i32) as u32),
            0x88 => self.widen(ins, |v| (f32::from_bits(v) as i64) as u64),
            0x89 => self.widen(ins, |v| (f32::from_bits(v) as f64).to_bits()),
            0x8a => self.narrow(ins, |v| (f64::from_bits(v) as i32) as u32),
            0x8b => self.un64(ins, |v| (f64::from_bits(v) as i64) as u64),
            0x8c => self.narrow(ins, |v| (f64::from_bits(v) as f32).to_bits()),
            0x8d => self.un32(ins, |v| (v as i32 as i8 as i32) as u32),
            0x8e => self.un32(ins, |v| (v as i32 as u16 as i32) as u32),
            0x8f => self.un32(ins, |v| (v as i32 as i16 as i32) as u32),
            // binary arithmetic
            0x90..=0xaf => self.bin_reg(ins)?,
            0xb0..=0xcf => self.bin_2addr(ins)?,
            0xd0..=0xe2 => self.bin_lit(ins)?,
            other => {
                return Err(OracleError::Unsupported {
                    what: format!("opcode 0x{other:02x}"),
                })
            }
        };
        Ok(flow)
    }

    fn type_at(&self, ins: &Instruction) -> Result<String, OracleError> {
        let (_, idx) = ins.pool_index.unwrap();
        self.dex
            .resolve_type(idx)
            .map(str::to_string)
            .map_err(|e| OracleError::Malformed {
                what: e.to_string(),
            })
    }

    fn field_at(&self, ins: &Instruction) -> Result<crate::dex::FieldRef, OracleError> {
        let (_, idx) = ins.pool_index.unwrap();
        self.dex
            .resolve_field(idx)
            .cloned()
            .map_err(|e| OracleError::Malformed {
                what: e.to_string(),
            })
    }

    fn aget(&mut self, op: u8, dst: u16, arr: u16, idx: u16) -> Result<Flow, OracleError> {
        let h = self.r32(arr);
        if h == 0 {
            return Ok(self.throw_new(NULL_POINTER_EXCEPTION));
        }
        let i = self.r32(idx) as i32;
        let Some(HeapObj::Array { data, .. }) = self.heap.get(h) else {
            return Err(OracleError::Malformed {
                what: "aget on non-array".into(),
            });
        };
        if i < 0 || i as usize >= data.len() {
            return Ok(self.throw_new(INDEX_OOB_EXCEPTION));
        }
        let raw = data[i as usize];
        match op {
            0x44 | 0x46 => self.set32(dst, raw as u32),
            0x45 => self.set64(dst, raw),
            0x47 => self.set32(dst, (raw & 1) as u32),
            0x48 => self.set32(dst, raw as u8 as i8 as i32 as u32),
            0x49 => self.set32(dst, raw as u16 as u32),
            _ => self.set32(dst, raw as u16 as i16 as i32 as u32),
        }
        Ok(Flow::Next)
    }

    fn aput(&mut self, op: u8, src: u16, arr: u16, idx: u16) -> Result<Flow, OracleError> {
        let h = self.r32(arr);
        if h == 0 {
            return Ok(self.throw_new(NULL_POINTER_EXCEPTION));
        }
        let i = self.r32(idx) as i32;
        let raw = match op {
            0x4c => self.r64(src),
            0x4e => (self.r32(src) & 1) as u64,
            0x4f => self.r32(src) as i32 as i8 as u8 as u64,
            0x50 => self.r32(src) as u16 as u64,
            0x51 => self.r32(src) as i32 as i16 as u16 as u64,
            _ => self.r32(src) as u64,
        };
        let Some(HeapObj::Array { data, .. }) = self.heap.get_mut(h) else {
            return Err(OracleError::Malformed {
                what: "aput on non-array".into(),
            });
        };
        if i < 0 || i as usize >= data.len() {
            return Ok(self.throw_new(INDEX_OOB_EXCEPTION));
        }
        data[i as usize] = raw;
        Ok(Flow::Next)
    }

    fn invoke(&mut self, ins: &Instruction) -> Result<Flow, OracleError> {
        let (_, idx) = ins.pool_index.unwrap();
        let mref = self
            .dex
            .resolve_method(idx)
            .map_err(|e| OracleError::Malformed {
                what: e.to_string(),
            })?
            .clone();
        let key = mref.to_string();
        let is_static = matches!(ins.opcode, 0x71 | 0x77);

        let mut args: Vec<RtValue> = Vec::new();
        let mut cursor = 0usize;
        if !is_static {
            args.push(RtValue::Ref(self.r32(ins.registers[cursor])));
            cursor += 1;
        }
        for p in &mref.proto.params {
            let reg = ins.registers[cursor];
            let v = match p.as_bytes()[0] {
                b'J' => RtValue::Long(self.r64(reg) as i64),
                b'D' => RtValue::Double(self.r64(reg)),
                b'F' => RtValue::Float(self.r32(reg)),
                b'L' | b'[' => RtValue::Ref(self.r32(reg)),
                _ => RtValue::Int(self.r32(reg) as i32),
            };
            cursor += if v.is_wide() { 2 } else { 1 };
            args.push(v);
        }

        let stub = self
            .env
            .lookup(&key)
            .ok_or(OracleError::Unsupported {
                what: format!("no stub for {key}"),
            })?
            .clone();
        self.calls.push(render_call(&self.heap, &key, &args));
        match stub(&mut self.heap, &args) {
            Ok(ret) => {
                self.pending_result = ret.map(|v| match v {
                    RtValue::Int(i) => (i as u32 as u64, false),
                    RtValue::Float(f) => (f as u64, false),
                    RtValue::Ref(h) => (h as u64, false),
                    RtValue::Long(j) => (j as u64, true),
                    RtValue::Double(d) => (d, true),
                });
                Ok(Flow::Next)
            }
            Err(desc) => Ok(self.throw_new(&desc)),
        }
    }

    fn un32(&mut self, ins: &Instruction, f: impl Fn(u32) -> u32) -> Flow {
        let v = f(self.r32(ins.registers[1]));
        self.set32(ins.registers[0], v);
        Flow::Next
    }

    fn un64(&mut self, ins: &Instruction, f: impl Fn(u64) -> u64) -> Flow {
        let v = f(self.r64(ins.registers[1]));
        self.set64(ins.registers[0], v);
        Flow::Next
    }

    fn widen(&mut self, ins: &Instruction, f: impl Fn(u32) -> u64) -> Flow {
        let v = f(self.r32(ins.registers[1]));
        self.set64(ins.registers[0], v);
        Flow::Next
    }

    fn narrow(&mut self, ins: &Instruction, f: impl Fn(u64) -> u32) -> Flow {
        let v = f(self.r64(ins.registers[1]));
        self.set32(ins.registers[0], v);
        Flow::Next
    }

    fn bin_reg(&mut self, ins: &Instruction) -> Result<Flow, OracleError> {
        let op = ins.opcode;
        let (d, a, b) = (ins.registers[0], ins.registers[1], ins.registers[2]);
        self.binary(op - 0x90, d, a, b)
    }

    fn bin_2addr(&mut self, ins: &Instruction) -> Result<Flow, OracleError> {
        let op = ins.opcode;
        let (d, b) = (ins.registers[0], ins.registers[1]);
        self.binary(op - 0xb0, d, d, b)
    }

    fn bin_lit(&mut self, ins: &Instruction) -> Result<Flow, OracleError> {
        let op = ins.opcode;
        let (d, a) = (ins.registers[0], ins.registers[1]);
        let lit = ins.literal.unwrap() as i32;
        let x = self.r32(a) as i32;
        // lit16: add, rsub, mul, div, rem, and, or, xor
        // lit8 adds the shifts; rsub swaps operands.
        let sub_op = match op {
            0xd0 => 0u8,
            0xd1 => 1,
            0xd2..=0xd7 => op - 0xd0,
            0xd8 => 0,
            0xd9 => 1,
            _ => op - 0xd8,
        };
        let (lhs, rhs) = if sub_op == 1 { (lit, x) } else { (x, lit) };
        let v = match int_binop(sub_op_to_kind(sub_op), lhs, rhs) {
            Ok(v) => v,
            Err(()) => return Ok(self.throw_new(ARITHMETIC_EXCEPTION)),
        };
        self.set32(d, v as u32);
        Ok(Flow::Next)
    }

    /// Shared implementation for the 0x90-0xaf family layout, also reused by
    /// 2addr: `rel` is the offset within the family.
    fn binary(&mut self, rel: u8, d: u16, a: u16, b: u16) -> Result<Flow, OracleError> {
        let flow = match rel {
            // int
            0x00..=0x0a => {
                let x = self.r32(a) as i32;
                let y = self.r32(b) as i32;
                match int_binop(rel, x, y) {
                    Ok(v) => {
                        self.set32(d, v as u32);
                        Flow::Next
                    }
                    Err(()) => self.throw_new(ARITHMETIC_EXCEPTION),
                }
            }
            // long
            0x0b..=0x15 => {
                let x = self.r64(a) as i64;
                let y_wide = self.r64(b) as i64;
                let shift = (0x13..=0x15).contains(&rel);
                let y_int = self.r32(b) as i32;
                let res: Result<i64, ()> = match rel - 0x0b {
                    0 => Ok(x.wrapping_add(y_wide)),
                    1 => Ok(x.wrapping_sub(y_wide)),
                    2 => Ok(x.wrapping_mul(y_wide)),
                    3 => {
                        if y_wide == 0 {
                            Err(())
                        } else {
                            Ok(x.wrapping_div(y_wide))
                        }
                    }
                    4 => {
                        if y_wide == 0 {
                            Err(())
                        } else {
                            Ok(x.wrapping_rem(y_wide))
                        }
                    }
                    5 => Ok(x & y_wide),
                    6 => Ok(x | y_wide),
                    7 => Ok(x ^ y_wide),
                    8 => Ok(x.wrapping_shl(y_int as u32)),
                    9 => Ok(x.wrapping_shr(y_int as u32)),
                    _ => Ok(((x as u64).wrapping_shr(y_int as u32 & 63)) as i64),
                };
                let _ = shift;
                match res {
                    Ok(v) => {
                        self.set64(d, v as u64);
                        Flow::Next
                    }
                    Err(()) => self.throw_new(ARITHMETIC_EXCEPTION),
                }
            }
            // float
            0x16..=0x1a => {
                let x = f32::from_bits(self.r32(a));
                let y = f32::from_bits(self.r32(b));
                let v = match rel - 0x16 {
                    0 => x + y,
                    1 => x - y,
                    2 => x * y,
                    3 => x / y,
                    _ => x % y,
                };
                self.set32(d, v.to_bits());
                Flow::Next
            }
            // double
            _ => {
                let x = f64::from_bits(self.r64(a));
                let y = f64::from_bits(self.r64(b));
                let v = match rel - 0x1b {
                    0 => x + y,
                    1 => x - y,
                    2 => x * y,
                    3 => x / y,
                    _ => x % y,
                };
                self.set64(d, v.to_bits());
                Flow::Next
            }
        };
        Ok(flow)
    }
}

fn sub_op_to_kind(sub_op: u8) -> u8 {
    // lit family order: add, rsub(=sub), mul, div, rem, and, or, xor, shl,
    // shr, ushr maps onto the int binop kinds.
    match sub_op {
        0 => 0,
        1 => 1,
        v => v,
    }
}

/// Int binop by family offset: add sub mul div rem and or xor shl shr ushr.
fn int_binop(kind: u8, x: i32, y: i32) -> Result<i32, ()> {
    Ok(match kind {
        0 => x.wrapping_add(y),
        1 => x.wrapping_sub(y),
        2 => x.wrapping_mul(y),
        3 => {
            if y == 0 {
                return Err(());
            }
            x.wrapping_div(y)
        }
        4 => {
            if y == 0 {
                return Err(());
            }
            x.wrapping_rem(y)
        }
        5 => x & y,
        6 => x | y,
        7 => x ^ y,
        8 => x.wrapping_shl(y as u32),
        9 => x.wrapping_shr(y as u32),
        _ => ((x as u32).wrapping_shr(y as u32 & 31)) as i32,
    })
}

fn int_rel(kind: u8, a: i32, b: i32) -> bool {
    match kind {
        0 => a == b,
        1 => a != b,
        2 => a < b,
        3 => a >= b,
        4 => a > b,
        _ => a <= b,
    }
}

fn fp_cmp(ord: Option<std::cmp::Ordering>, gt_bias: bool) -> i32 {
    match ord {
        Some(o) => o as i32,
        None => {
            if gt_bias {
                1
            } else {
                -1
            }
        }
    }
}

fn raw_to_u32(raw: u64, descriptor: &str) -> u32 {
    match raw_to_value(raw, descriptor) {
        RtValue::Int(i) => i as u32,
        RtValue::Float(f) => f,
        RtValue::Ref(h) => h,
        RtValue::Long(j) => j as u32,
        RtValue::Double(d) => d as u32,
    }
}
