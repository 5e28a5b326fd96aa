//! Reference interpreter over the typed IR; the differential counterpart of
//! the bytecode interpreter.

use std::collections::HashMap;

use super::*;
use crate::ir::{
    BinOp, Body, CmpKind, IdentitySource, IrType, LocalId, Place, RelOp, Statement, StmtId,
    TypeCat, UnOp, Value,
};

/// Executes a lifted (typed or untyped) body against the same scripted
/// environment as the bytecode interpreter.
pub fn exec_ir(body: &Body, args: &[RtValue], env: &StubEnv) -> Result<RunResult, OracleError> {
    let mut m = IrMachine {
        body,
        env,
        locals: vec![None; body.local_count()],
        heap: Heap::default(),
        statics: env.initial_statics.clone(),
        calls: Vec::new(),
        pending_exception: 0,
    };

    let order = body.order();
    let mut pos = 0usize;
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > STEP_LIMIT {
            return Err(OracleError::StepLimit);
        }
        let Some(&id) = order.get(pos) else {
            return Err(OracleError::Malformed {
                what: "execution ran off the end of the body".into(),
            });
        };
        match m.step(id, args)? {
            IrFlow::Next => pos += 1,
            IrFlow::Jump(target) => {
                pos = body.position(target).ok_or(OracleError::Malformed {
                    what: "jump to removed statement".into(),
                })?;
            }
            IrFlow::Return(v) => {
                return Ok(RunResult {
                    outcome: Outcome::Returned(v.map(|rv| canon(&m.heap, rv, 8))),
                    calls: m.calls,
                })
            }
            IrFlow::Throw(handle) => match m.dispatch_exception(pos, handle) {
                Some(next) => pos = next,
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
            },
        }
    }
}

enum IrFlow {
    Next,
    Jump(StmtId),
    Return(Option<RtValue>),
    Throw(u32),
}

/// Evaluation aborts either with a thrown exception (dispatched against the
/// trap table) or a hard oracle error.
enum EvalAbort {
    Throw(String),
    Oracle(OracleError),
}

impl From<OracleError> for EvalAbort {
    fn from(e: OracleError) -> Self {
        EvalAbort::Oracle(e)
    }
}

type Eval<T> = Result<T, EvalAbort>;

struct IrMachine<'a> {
    body: &'a Body,
    env: &'a StubEnv,
    locals: Vec<Option<RtValue>>,
    heap: Heap,
    statics: HashMap<String, u64>,
    calls: Vec<String>,
    pending_exception: u32,
}

impl<'a> IrMachine<'a> {
    fn local(&self, id: LocalId) -> Eval<RtValue> {
        self.locals[id.0 as usize].ok_or_else(|| {
            EvalAbort::Oracle(OracleError::Malformed {
                what: format!("read of undefined local {}", self.body.local(id).name),
            })
        })
    }

    fn set_local(&mut self, id: LocalId, v: RtValue) {
        self.locals[id.0 as usize] = Some(v);
    }

    fn step(&mut self, id: StmtId, args: &[RtValue]) -> Result<IrFlow, OracleError> {
        match self.try_step(id, args) {
            Ok(flow) => Ok(flow),
            Err(EvalAbort::Oracle(e)) => Err(e),
            Err(EvalAbort::Throw(desc)) => {
                let h = self.heap.alloc(HeapObj::Object {
                    class: desc,
                    fields: HashMap::new(),
                });
                Ok(IrFlow::Throw(h))
            }
        }
    }

    fn try_step(&mut self, id: StmtId, args: &[RtValue]) -> Eval<IrFlow> {
        let st = self.body.stmt(id);
        let flow = match st {
            Statement::Nop | Statement::Breakpoint => IrFlow::Next,
            Statement::Identity { local, source } => {
                let v = match source {
                    IdentitySource::This { .. } => *args.first().ok_or_else(|| {
                        EvalAbort::Oracle(OracleError::Malformed {
                            what: "missing `this` argument".into(),
                        })
                    })?,
                    IdentitySource::Param { index, .. } => {
                        let base = usize::from(!self.body.is_static);
                        *args.get(base + index).ok_or_else(|| {
                            EvalAbort::Oracle(OracleError::Malformed {
                                what: format!("missing argument {index}"),
                            })
                        })?
                    }
                    IdentitySource::CaughtException { .. } => {
                        let h = self.pending_exception;
                        self.pending_exception = 0;
                        RtValue::Ref(h)
                    }
                };
                self.set_local(*local, v);
                IrFlow::Next
            }
            Statement::Assign { place, value } => {
                let v = self.eval(value)?;
                self.store(place, v)?;
                IrFlow::Next
            }
            Statement::If { op, lhs, rhs, target } => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                if compare(*op, a, b)? {
                    IrFlow::Jump(*target)
                } else {
                    IrFlow::Next
                }
            }
            Statement::Goto { target } => IrFlow::Jump(*target),
            Statement::TableSwitch {
                key,
                first_key,
                targets,
                default,
            } => {
                let k = self.eval_int(key)?;
                let idx = k.wrapping_sub(*first_key);
                if idx >= 0 && (idx as usize) < targets.len() {
                    IrFlow::Jump(targets[idx as usize])
                } else {
                    IrFlow::Jump(*default)
                }
            }
            Statement::LookupSwitch { key, cases, default } => {
                let k = self.eval_int(key)?;
                match cases.iter().find(|(c, _)| *c == k) {
                    Some((_, t)) => IrFlow::Jump(*t),
                    None => IrFlow::Jump(*default),
                }
            }
            Statement::Invoke {
                method,
                args: call_args,
                result,
                ..
            } => {
                let mut values = Vec::with_capacity(call_args.len());
                for a in call_args {
                    values.push(self.eval(a)?);
                }
                let key = method.to_string();
                let stub = self
                    .env
                    .lookup(&key)
                    .ok_or_else(|| {
                        EvalAbort::Oracle(OracleError::Unsupported {
                            what: format!("no stub for {key}"),
                        })
                    })?
                    .clone();
                self.calls.push(render_call(&self.heap, &key, &values));
                match stub(&mut self.heap, &values) {
                    Ok(ret) => {
                        if let (Some(local), Some(v)) = (result, ret) {
                            self.set_local(*local, v);
                        }
                        IrFlow::Next
                    }
                    Err(desc) => return Err(EvalAbort::Throw(desc)),
                }
            }
            Statement::Return(v) => {
                let rv = self.eval(v)?;
                IrFlow::Return(Some(coerce_return(rv, &self.body.signature.proto.return_type)))
            }
            Statement::ReturnVoid => IrFlow::Return(None),
            Statement::Throw(v) => {
                let rv = self.eval(v)?;
                match rv {
                    RtValue::Ref(0) => return Err(EvalAbort::Throw(NULL_POINTER_EXCEPTION.into())),
                    RtValue::Ref(h) => IrFlow::Throw(h),
                    _ => {
                        return Err(EvalAbort::Oracle(OracleError::Malformed {
                            what: "throw of non-reference".into(),
                        }))
                    }
                }
            }
            Statement::MonitorEnter(v) | Statement::MonitorExit(v) => {
                match self.eval(v)? {
                    RtValue::Ref(0) => return Err(EvalAbort::Throw(NULL_POINTER_EXCEPTION.into())),
                    RtValue::Ref(_) => IrFlow::Next,
                    _ => {
                        return Err(EvalAbort::Oracle(OracleError::Malformed {
                            what: "monitor on non-reference".into(),
                        }))
                    }
                }
            }
        };
        Ok(flow)
    }

    fn dispatch_exception(&mut self, pos: usize, handle: u32) -> Option<usize> {
        let class = self.heap.class_of(handle)?;
        for trap in &self.body.traps {
            let first = self.body.position(trap.first)?;
            let last = self.body.position(trap.last)?;
            if pos < first || pos > last {
                continue;
            }
            let matches = match &trap.exception {
                None => true,
                Some(want) => self.env.is_subtype(&class, want),
            };
            if matches {
                self.pending_exception = handle;
                return self.body.position(trap.handler);
            }
        }
        None
    }

    fn store(&mut self, place: &Place, v: RtValue) -> Eval<()> {
        match place {
            Place::Local(id) => {
                self.set_local(*id, v);
                Ok(())
            }
            Place::StaticField(f) => {
                self.statics.insert(f.to_string(), value_to_raw(v, &f.descriptor));
                Ok(())
            }
            Place::InstanceField { base, field } => {
                let h = self.ref_local(*base)?;
                if h == 0 {
                    return Err(EvalAbort::Throw(NULL_POINTER_EXCEPTION.into()));
                }
                let key = format!("{}:{}", field.name, field.descriptor);
                match self.heap.get_mut(h) {
                    Some(HeapObj::Object { fields, .. }) => {
                        fields.insert(key, value_to_raw(v, &field.descriptor));
                        Ok(())
                    }
                    _ => Err(EvalAbort::Oracle(OracleError::Malformed {
                        what: "field store on non-object".into(),
                    })),
                }
            }
            Place::ArrayElem { base, index } => {
                let h = self.ref_local(*base)?;
                if h == 0 {
                    return Err(EvalAbort::Throw(NULL_POINTER_EXCEPTION.into()));
                }
                let i = self.eval_int(index)?;
                let Some(HeapObj::Array { elem, data }) = self.heap.get(h) else {
                    return Err(EvalAbort::Oracle(OracleError::Malformed {
                        what: "array store on non-array".into(),
                    }));
                };
                if i < 0 || i as usize >= data.len() {
                    return Err(EvalAbort::Throw(INDEX_OOB_EXCEPTION.into()));
                }
                let raw = value_to_raw(v, &elem.clone());
                if let Some(HeapObj::Array { data, .. }) = self.heap.get_mut(h) {
                    data[i as usize] = raw;
                }
                Ok(())
            }
        }
    }

    fn ref_local(&self, id: LocalId) -> Eval<u32> {
        match self.local(id)? {
            RtValue::Ref(h) => Ok(h),
            other => Err(EvalAbort::Oracle(OracleError::Malformed {
                what: format!("expected reference, found {other:?}"),
            })),
        }
    }

    fn eval_int(&mut self, v: &Value) -> Eval<i32> {
        match self.eval(v)? {
            RtValue::Int(i) => Ok(i),
            other => Err(EvalAbort::Oracle(OracleError::Malformed {
                what: format!("expected int, found {other:?}"),
            })),
        }
    }

    fn eval(&mut self, value: &Value) -> Eval<RtValue> {
        let v = match value {
            Value::Local(id) => self.local(*id)?,
            Value::Int(i) => RtValue::Int(*i),
            Value::Long(j) => RtValue::Long(*j),
            Value::Float(f) => RtValue::Float(*f),
            Value::Double(d) => RtValue::Double(*d),
            Value::Null => RtValue::null(),
            Value::Str(s) => RtValue::Ref(self.heap.alloc(HeapObj::Str(s.clone()))),
            Value::Class(_) => {
                return Err(EvalAbort::Oracle(OracleError::Unsupported {
                    what: "class constant".into(),
                }))
            }
            Value::StaticField(f) => {
                let raw = self.statics.get(&f.to_string()).copied().unwrap_or(0);
                raw_to_value(raw, &f.descriptor)
            }
            Value::InstanceField { base, field } => {
                let h = self.ref_local(*base)?;
                if h == 0 {
                    return Err(EvalAbort::Throw(NULL_POINTER_EXCEPTION.into()));
                }
                let key = format!("{}:{}", field.name, field.descriptor);
                match self.heap.get(h) {
                    Some(HeapObj::Object { fields, .. }) => {
                        raw_to_value(fields.get(&key).copied().unwrap_or(0), &field.descriptor)
                    }
                    _ => {
                        return Err(EvalAbort::Oracle(OracleError::Malformed {
                            what: "field load on non-object".into(),
                        }))
                    }
                }
            }
            Value::ArrayElem { base, index } => {
                let h = self.ref_local(*base)?;
                if h == 0 {
                    return Err(EvalAbort::Throw(NULL_POINTER_EXCEPTION.into()));
                }
                let i = self.eval_int(index)?;
                let Some(HeapObj::Array { elem, data }) = self.heap.get(h) else {
                    return Err(EvalAbort::Oracle(OracleError::Malformed {
                        what: "array load on non-array".into(),
                    }));
                };
                if i < 0 || i as usize >= data.len() {
                    return Err(EvalAbort::Throw(INDEX_OOB_EXCEPTION.into()));
                }
                raw_to_value(data[i as usize], elem)
            }
            Value::Binary { op, ty, lhs, rhs } => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                binary(*op, ty, a, b)?
            }
            Value::Unary { op, ty, operand } => {
                let v = self.eval(operand)?;
                unary(*op, ty, v)?
            }
            Value::Cast { to, operand, .. } => {
                let v = self.eval(operand)?;
                self.cast(to, v)?
            }
            Value::InstanceOf { ty, operand } => {
                let v = self.eval(operand)?;
                let res = match (v, ty) {
                    (RtValue::Ref(0), _) => 0,
                    (RtValue::Ref(h), t) => {
                        let class = self.heap.class_of(h).unwrap_or_default();
                        self.env.is_subtype(&class, &type_descriptor(t)) as i32
                    }
                    _ => {
                        return Err(EvalAbort::Oracle(OracleError::Malformed {
                            what: "instanceof on non-reference".into(),
                        }))
                    }
                };
                RtValue::Int(res)
            }
            Value::New(class) => RtValue::Ref(self.heap.alloc(HeapObj::Object {
                class: class.clone(),
                fields: HashMap::new(),
            })),
            Value::NewArray { elem, size } => {
                let n = self.eval_int(size)?;
                if n < 0 {
                    return Err(EvalAbort::Throw(NEG_ARRAY_SIZE_EXCEPTION.into()));
                }
                RtValue::Ref(self.heap.alloc(HeapObj::Array {
                    elem: type_descriptor(elem),
                    data: vec![0; n as usize],
                }))
            }
            Value::ArrayLength(v) => {
                let rv = self.eval(v)?;
                match rv {
                    RtValue::Ref(0) => return Err(EvalAbort::Throw(NULL_POINTER_EXCEPTION.into())),
                    RtValue::Ref(h) => match self.heap.get(h) {
                        Some(HeapObj::Array { data, .. }) => RtValue::Int(data.len() as i32),
                        _ => {
                            return Err(EvalAbort::Oracle(OracleError::Malformed {
                                what: "lengthof on non-array".into(),
                            }))
                        }
                    },
                    _ => {
                        return Err(EvalAbort::Oracle(OracleError::Malformed {
                            what: "lengthof on non-reference".into(),
                        }))
                    }
                }
            }
            Value::Compare { kind, lhs, rhs } => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                RtValue::Int(compare_value(*kind, a, b)?)
            }
        };
        Ok(v)
    }

    fn cast(&mut self, to: &IrType, v: RtValue) -> Eval<RtValue> {
        // Reference casts check the heap class; primitive casts convert.
        match to.category() {
            TypeCat::Reference => match v {
                RtValue::Ref(0) => Ok(v),
                RtValue::Ref(h) => {
                    let class = self.heap.class_of(h).unwrap_or_default();
                    if self.env.is_subtype(&class, &type_descriptor(to)) {
                        Ok(v)
                    } else {
                        Err(EvalAbort::Throw(CLASS_CAST_EXCEPTION.into()))
                    }
                }
                _ => Err(EvalAbort::Oracle(OracleError::Malformed {
                    what: "reference cast on non-reference".into(),
                })),
            },
            _ => convert(to, v).map_err(EvalAbort::Oracle),
        }
    }
}

fn type_descriptor(t: &IrType) -> String {
    match t {
        IrType::Ref(d) => d.clone(),
        IrType::Array(e) => format!("[{}", prim_descriptor(e)),
        other => prim_descriptor(other),
    }
}

fn prim_descriptor(t: &IrType) -> String {
    match t {
        IrType::Boolean => "Z".into(),
        IrType::Byte => "B".into(),
        IrType::Char => "C".into(),
        IrType::Short => "S".into(),
        IrType::Int => "I".into(),
        IrType::Float => "F".into(),
        IrType::Long => "J".into(),
        IrType::Double => "D".into(),
        IrType::Ref(d) => d.clone(),
        IrType::Array(e) => format!("[{}", prim_descriptor(e)),
        IrType::Null => "Ljava/lang/Object;".into(),
        IrType::Unknown => "I".into(),
    }
}

fn coerce_return(v: RtValue, ret: &str) -> RtValue {
    match (v, ret.as_bytes()[0]) {
        (RtValue::Int(i), b'F') => RtValue::Float(i as u32),
        (RtValue::Int(0), b'L') | (RtValue::Int(0), b'[') => RtValue::null(),
        (RtValue::Long(j), b'D') => RtValue::Double(j as u64),
        (v, _) => v,
    }
}

fn compare(op: RelOp, a: RtValue, b: RtValue) -> Eval<bool> {
    let cmp = |x: i32, y: i32| match op {
        RelOp::Eq => x == y,
        RelOp::Ne => x != y,
        RelOp::Lt => x < y,
        RelOp::Le => x <= y,
        RelOp::Gt => x > y,
        RelOp::Ge => x >= y,
    };
    match (a, b) {
        (RtValue::Int(x), RtValue::Int(y)) => Ok(cmp(x, y)),
        (RtValue::Ref(x), RtValue::Ref(y)) => match op {
            RelOp::Eq => Ok(x == y),
            RelOp::Ne => Ok(x != y),
            _ => Err(EvalAbort::Oracle(OracleError::Malformed {
                what: "ordered comparison of references".into(),
            })),
        },
        _ => Err(EvalAbort::Oracle(OracleError::Malformed {
            what: format!("comparison of mismatched values {a:?} vs {b:?}"),
        })),
    }
}

fn compare_value(kind: CmpKind, a: RtValue, b: RtValue) -> Eval<i32> {
    let nan = |gt_bias: bool| if gt_bias { 1 } else { -1 };
    let v = match (kind, a, b) {
        (CmpKind::Long, RtValue::Long(x), RtValue::Long(y)) => x.cmp(&y) as i32,
        (CmpKind::LtFloat, RtValue::Float(x), RtValue::Float(y))
        | (CmpKind::GtFloat, RtValue::Float(x), RtValue::Float(y)) => {
            match f32::from_bits(x).partial_cmp(&f32::from_bits(y)) {
                Some(o) => o as i32,
                None => nan(kind == CmpKind::GtFloat),
            }
        }
        (CmpKind::LtDouble, RtValue::Double(x), RtValue::Double(y))
        | (CmpKind::GtDouble, RtValue::Double(x), RtValue::Double(y)) => {
            match f64::from_bits(x).partial_cmp(&f64::from_bits(y)) {
                Some(o) => o as i32,
                None => nan(kind == CmpKind::GtDouble),
            }
        }
        _ => {
            return Err(EvalAbort::Oracle(OracleError::Malformed {
                what: "cmp on mismatched operand kinds".into(),
            }))
        }
    };
    Ok(v)
}

fn binary(op: BinOp, ty: &IrType, a: RtValue, b: RtValue) -> Eval<RtValue> {
    match ty.category() {
        TypeCat::Int32 => {
            let (RtValue::Int(x), RtValue::Int(y)) = (a, b) else {
                return Err(mismatch("int", a, b));
            };
            let v = match op {
                BinOp::Add => x.wrapping_add(y),
                BinOp::Sub => x.wrapping_sub(y),
                BinOp::Mul => x.wrapping_mul(y),
                BinOp::Div => {
                    if y == 0 {
                        return Err(EvalAbort::Throw(ARITHMETIC_EXCEPTION.into()));
                    }
                    x.wrapping_div(y)
                }
                BinOp::Rem => {
                    if y == 0 {
                        return Err(EvalAbort::Throw(ARITHMETIC_EXCEPTION.into()));
                    }
                    x.wrapping_rem(y)
                }
                BinOp::And => x & y,
                BinOp::Or => x | y,
                BinOp::Xor => x ^ y,
                BinOp::Shl => x.wrapping_shl(y as u32),
                BinOp::Shr => x.wrapping_shr(y as u32),
                BinOp::Ushr => ((x as u32).wrapping_shr(y as u32 & 31)) as i32,
            };
            Ok(RtValue::Int(v))
        }
        TypeCat::Long => {
            let RtValue::Long(x) = a else {
                return Err(mismatch("long", a, b));
            };
            // Shift distances stay int.
            let v = match op {
                BinOp::Shl | BinOp::Shr | BinOp::Ushr => {
                    let RtValue::Int(y) = b else {
                        return Err(mismatch("shift", a, b));
                    };
                    match op {
                        BinOp::Shl => x.wrapping_shl(y as u32),
                        BinOp::Shr => x.wrapping_shr(y as u32),
                        _ => ((x as u64).wrapping_shr(y as u32 & 63)) as i64,
                    }
                }
                _ => {
                    let RtValue::Long(y) = b else {
                        return Err(mismatch("long", a, b));
                    };
                    match op {
                        BinOp::Add => x.wrapping_add(y),
                        BinOp::Sub => x.wrapping_sub(y),
                        BinOp::Mul => x.wrapping_mul(y),
                        BinOp::Div => {
                            if y == 0 {
                                return Err(EvalAbort::Throw(ARITHMETIC_EXCEPTION.into()));
                            }
                            x.wrapping_div(y)
                        }
                        BinOp::Rem => {
                            if y == 0 {
                                return Err(EvalAbort::Throw(ARITHMETIC_EXCEPTION.into()));
                            }
                            x.wrapping_rem(y)
                        }
                        BinOp::And => x & y,
                        BinOp::Or => x | y,
                        BinOp::Xor => x ^ y,
                        _ => unreachable!(),
                    }
                }
            };
            Ok(RtValue::Long(v))
        }
        TypeCat::Float => {
            let (RtValue::Float(xb), RtValue::Float(yb)) = (a, b) else {
                return Err(mismatch("float", a, b));
            };
            let (x, y) = (f32::from_bits(xb), f32::from_bits(yb));
            let v = match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
                BinOp::Rem => x % y,
                _ => return Err(mismatch("float bitop", a, b)),
            };
            Ok(RtValue::Float(v.to_bits()))
        }
        TypeCat::Double => {
            let (RtValue::Double(xb), RtValue::Double(yb)) = (a, b) else {
                return Err(mismatch("double", a, b));
            };
            let (x, y) = (f64::from_bits(xb), f64::from_bits(yb));
            let v = match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
                BinOp::Rem => x % y,
                _ => return Err(mismatch("double bitop", a, b)),
            };
            Ok(RtValue::Double(v.to_bits()))
        }
        _ => Err(mismatch("binary", a, b)),
    }
}

fn unary(op: UnOp, ty: &IrType, v: RtValue) -> Eval<RtValue> {
    let out = match (op, ty.category(), v) {
        (UnOp::Neg, TypeCat::Int32, RtValue::Int(x)) => RtValue::Int(x.wrapping_neg()),
        (UnOp::Not, TypeCat::Int32, RtValue::Int(x)) => RtValue::Int(!x),
        (UnOp::Neg, TypeCat::Long, RtValue::Long(x)) => RtValue::Long(x.wrapping_neg()),
        (UnOp::Not, TypeCat::Long, RtValue::Long(x)) => RtValue::Long(!x),
        (UnOp::Neg, TypeCat::Float, RtValue::Float(x)) => {
            RtValue::Float((-f32::from_bits(x)).to_bits())
        }
        (UnOp::Neg, TypeCat::Double, RtValue::Double(x)) => {
            RtValue::Double((-f64::from_bits(x)).to_bits())
        }
        _ => {
            return Err(EvalAbort::Oracle(OracleError::Malformed {
                what: format!("unary {op:?} on {v:?}"),
            }))
        }
    };
    Ok(out)
}

fn convert(to: &IrType, v: RtValue) -> Result<RtValue, OracleError> {
    let bad = || OracleError::Malformed {
        what: format!("conversion to {to} from {v:?}"),
    };
    let out = match (to, v) {
        (IrType::Long, RtValue::Int(x)) => RtValue::Long(x as i64),
        (IrType::Float, RtValue::Int(x)) => RtValue::Float((x as f32).to_bits()),
        (IrType::Double, RtValue::Int(x)) => RtValue::Double((x as f64).to_bits()),
        (IrType::Int, RtValue::Long(x)) => RtValue::Int(x as i32),
        (IrType::Float, RtValue::Long(x)) => RtValue::Float((x as f32).to_bits()),
        (IrType::Double, RtValue::Long(x)) => RtValue::Double((x as f64).to_bits()),
        (IrType::Int, RtValue::Float(x)) => RtValue::Int(f32::from_bits(x) as i32),
        (IrType::Long, RtValue::Float(x)) => RtValue::Long(f32::from_bits(x) as i64),
        (IrType::Double, RtValue::Float(x)) => RtValue::Double((f32::from_bits(x) as f64).to_bits()),
        (IrType::Int, RtValue::Double(x)) => RtValue::Int(f64::from_bits(x) as i32),
        (IrType::Long, RtValue::Double(x)) => RtValue::Long(f64::from_bits(x) as i64),
        (IrType::Float, RtValue::Double(x)) => RtValue::Float((f64::from_bits(x) as f32).to_bits()),
        (IrType::Byte, RtValue::Int(x)) => RtValue::Int(x as i8 as i32),
        (IrType::Char, RtValue::Int(x)) => RtValue::Int(x as u16 as i32),
        (IrType::Short, RtValue::Int(x)) => RtValue::Int(x as i16 as i32),
        _ => return Err(bad()),
    };
    Ok(out)
}

fn mismatch(what: &str, a: RtValue, b: RtValue) -> EvalAbort {
    EvalAbort::Oracle(OracleError::Malformed {
        what: format!("{what} operands {a:?} / {b:?}"),
    })
}
