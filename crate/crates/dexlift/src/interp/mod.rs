//! Desk-scale reference interpreters used as differential oracles: one
//! executes decoded register-machine instructions, the other the typed IR.
//! Both share the heap model, the stub method table and the trace format,
//! so semantic divergence introduced by lifting or typing shows up as a
//! mismatch in outcome or call trace.

mod dalvik;
mod ir_exec;

pub use dalvik::exec_dalvik;
pub use ir_exec::exec_ir;

use std::collections::HashMap;
use std::rc::Rc;

use crate::isa::IsaError;

/// A runtime value crossing an interpreter boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtValue {
    Int(i32),
    Long(i64),
    /// Raw IEEE-754 bits.
    Float(u32),
    Double(u64),
    /// Heap handle; 0 is null.
    Ref(u32),
}

impl RtValue {
    pub fn null() -> RtValue {
        RtValue::Ref(0)
    }

    fn is_wide(&self) -> bool {
        matches!(self, RtValue::Long(_) | RtValue::Double(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeapObj {
    Object {
        class: String,
        fields: HashMap<String, u64>,
    },
    Array {
        /// Element descriptor, e.g. `I`, `J`, `Ljava/lang/String;`.
        elem: String,
        data: Vec<u64>,
    },
    Str(String),
}

#[derive(Debug, Default, Clone)]
pub struct Heap {
    objs: Vec<HeapObj>,
}

impl Heap {
    pub fn alloc(&mut self, obj: HeapObj) -> u32 {
        self.objs.push(obj);
        self.objs.len() as u32
    }

    pub fn get(&self, handle: u32) -> Option<&HeapObj> {
        handle.checked_sub(1).and_then(|i| self.objs.get(i as usize))
    }

    pub fn get_mut(&mut self, handle: u32) -> Option<&mut HeapObj> {
        handle
            .checked_sub(1)
            .and_then(|i| self.objs.get_mut(i as usize))
    }

    pub fn class_of(&self, handle: u32) -> Option<String> {
        match self.get(handle)? {
            HeapObj::Object { class, .. } => Some(class.clone()),
            HeapObj::Array { elem, .. } => Some(format!("[{elem}")),
            HeapObj::Str(_) => Some("Ljava/lang/String;".into()),
        }
    }
}

/// Stubbed behavior of one callee: receives the heap and canonical argument
/// values, returns a value or a thrown exception descriptor.
pub type StubFn = Rc<dyn Fn(&mut Heap, &[RtValue]) -> Result<Option<RtValue>, String>>;

/// Scripted environment: stub method table and the subtype facts needed by
/// cast, instance-of and catch dispatch.
#[derive(Default, Clone)]
pub struct StubEnv {
    stubs: HashMap<String, StubFn>,
    subtypes: Vec<(String, String)>,
    pub initial_statics: HashMap<String, u64>,
}

impl StubEnv {
    pub fn new() -> StubEnv {
        StubEnv::default()
    }

    /// Registers a stub under the canonical `Lowner;.name:(args)ret` key.
    pub fn stub(
        &mut self,
        key: &str,
        f: impl Fn(&mut Heap, &[RtValue]) -> Result<Option<RtValue>, String> + 'static,
    ) -> &mut Self {
        self.stubs.insert(key.to_string(), Rc::new(f));
        self
    }

    pub fn subtype(&mut self, sub: &str, sup: &str) -> &mut Self {
        self.subtypes.push((sub.to_string(), sup.to_string()));
        self
    }

    pub fn lookup(&self, key: &str) -> Option<&StubFn> {
        self.stubs.get(key)
    }

    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sub == sup || sup == "Ljava/lang/Object;" {
            return true;
        }
        // Walk declared edges transitively; tables are tiny.
        let mut frontier = vec![sub.to_string()];
        let mut seen = vec![];
        while let Some(cur) = frontier.pop() {
            if seen.contains(&cur) {
                continue;
            }
            for (a, b) in &self.subtypes {
                if *a == cur {
                    if b == sup {
                        return true;
                    }
                    frontier.push(b.clone());
                }
            }
            seen.push(cur);
        }
        false
    }
}

/// Structural value for outcome comparison, independent of heap handles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonValue {
    Int(i32),
    Long(i64),
    Float(u32),
    Double(u64),
    Null,
    Str(String),
    Object {
        class: String,
        fields: Vec<(String, u64)>,
    },
    Array {
        elem: String,
        values: Vec<CanonValue>,
    },
    /// Cycle or depth cap marker.
    Opaque(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Returned(Option<CanonValue>),
    Threw(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: Outcome,
    /// Rendered stub invocations, in order.
    pub calls: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("outside the oracle subset: {what}")]
    Unsupported { what: String },
    #[error("step limit exceeded (runaway loop?)")]
    StepLimit,
    #[error("malformed program state: {what}")]
    Malformed { what: String },
    #[error(transparent)]
    Decode(#[from] IsaError),
}

pub(crate) const STEP_LIMIT: usize = 2_000_000;

pub(crate) fn canon(heap: &Heap, v: RtValue, depth: usize) -> CanonValue {
    match v {
        RtValue::Int(i) => CanonValue::Int(i),
        RtValue::Long(j) => CanonValue::Long(j),
        RtValue::Float(f) => CanonValue::Float(f),
        RtValue::Double(d) => CanonValue::Double(d),
        RtValue::Ref(0) => CanonValue::Null,
        RtValue::Ref(h) => {
            if depth == 0 {
                return CanonValue::Opaque(heap.class_of(h).unwrap_or_default());
            }
            match heap.get(h) {
                None => CanonValue::Opaque("dangling".into()),
                Some(HeapObj::Str(s)) => CanonValue::Str(s.clone()),
                Some(HeapObj::Object { class, fields }) => {
                    let mut fs: Vec<(String, u64)> =
                        fields.iter().map(|(k, v)| (k.clone(), *v)).collect();
                    fs.sort();
                    CanonValue::Object {
                        class: class.clone(),
                        fields: fs,
                    }
                }
                Some(HeapObj::Array { elem, data }) => {
                    let values = data
                        .iter()
                        .map(|&raw| {
                            let rv = raw_to_value(raw, elem);
                            canon(heap, rv, depth - 1)
                        })
                        .collect();
                    CanonValue::Array {
                        elem: elem.clone(),
                        values,
                    }
                }
            }
        }
    }
}

/// Reinterprets a raw 64-bit cell per an element/field descriptor.
pub(crate) fn raw_to_value(raw: u64, descriptor: &str) -> RtValue {
    match descriptor.as_bytes()[0] {
        b'J' => RtValue::Long(raw as i64),
        b'D' => RtValue::Double(raw),
        b'F' => RtValue::Float(raw as u32),
        b'L' | b'[' => RtValue::Ref(raw as u32),
        b'Z' => RtValue::Int((raw & 1) as i32),
        b'B' => RtValue::Int(raw as u8 as i8 as i32),
        b'C' => RtValue::Int(raw as u16 as i32),
        b'S' => RtValue::Int(raw as u16 as i16 as i32),
        _ => RtValue::Int(raw as u32 as i32),
    }
}

pub(crate) fn value_to_raw(v: RtValue, descriptor: &str) -> u64 {
    match (v, descriptor.as_bytes()[0]) {
        (RtValue::Long(j), _) => j as u64,
        (RtValue::Double(d), _) => d,
        (RtValue::Float(f), _) => f as u64,
        (RtValue::Ref(h), _) => h as u64,
        (RtValue::Int(i), b'Z') => (i as u64) & 1,
        (RtValue::Int(i), b'B') => i as i8 as u8 as u64,
        (RtValue::Int(i), b'C') => i as u16 as u64,
        (RtValue::Int(i), b'S') => i as i16 as u16 as u64,
        (RtValue::Int(i), _) => i as u32 as u64,
    }
}

/// One trace line for a stub call; both interpreters use this exact format.
pub(crate) fn render_call(heap: &Heap, key: &str, args: &[RtValue]) -> String {
    let rendered: Vec<String> = args
        .iter()
        .map(|a| match a {
            RtValue::Int(i) => format!("{i}"),
            RtValue::Long(j) => format!("{j}L"),
            RtValue::Float(f) => format!("f{f:08x}"),
            RtValue::Double(d) => format!("d{d:016x}"),
            RtValue::Ref(0) => "null".into(),
            RtValue::Ref(h) => match heap.get(*h) {
                Some(HeapObj::Str(s)) => format!("{s:?}"),
                _ => heap.class_of(*h).unwrap_or_else(|| "?".into()),
            },
        })
        .collect();
    format!("{key}({})", rendered.join(", "))
}

pub(crate) const ARITHMETIC_EXCEPTION: &str = "Ljava/lang/ArithmeticException;";
pub(crate) const NULL_POINTER_EXCEPTION: &str = "Ljava/lang/NullPointerException;";
pub(crate) const CLASS_CAST_EXCEPTION: &str = "Ljava/lang/ClassCastException;";
pub(crate) const INDEX_OOB_EXCEPTION: &str = "Ljava/lang/ArrayIndexOutOfBoundsException;";
pub(crate) const NEG_ARRAY_SIZE_EXCEPTION: &str = "Ljava/lang/NegativeArraySizeException;";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subtype_closure() {
        let mut env = StubEnv::new();
        env.subtype("LA;", "LB;").subtype("LB;", "LC;");
        assert!(env.is_subtype("LA;", "LC;"));
        assert!(env.is_subtype("LA;", "Ljava/lang/Object;"));
        assert!(!env.is_subtype("LC;", "LA;"));
    }

    #[test]
    fn raw_cell_reinterpretation() {
        assert_eq!(raw_to_value(0xFF, "B"), RtValue::Int(-1));
        assert_eq!(raw_to_value(0xFFFF, "S"), RtValue::Int(-1));
        assert_eq!(raw_to_value(0xFFFF, "C"), RtValue::Int(0xFFFF));
        assert_eq!(raw_to_value(3, "Z"), RtValue::Int(1));
        assert_eq!(value_to_raw(RtValue::Int(-1), "B"), 0xFF);
    }
}
