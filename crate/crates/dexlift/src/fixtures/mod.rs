//! Shared test fixtures: container images built with the encoder, the
//! null/zero loop program, a small multi-method app, and the differential
//! corpus with its scripted environment.

pub mod asm;


use crate::dex::builder::{CodeSpec, DexBuilder, PoolIndex, TrySpec};
use crate::dex::{PoolKind, ACC_STATIC};
use crate::interp::{Heap, HeapObj, RtValue, StubEnv};
use crate::isa::Instruction;
use asm::Asm;

pub const ACC_PUBLIC: u32 = 0x1;
pub const ACC_CONSTRUCTOR: u32 = 0x1_0000;

/// One empty class; the smallest interesting container.
pub fn minimal_dex() -> Vec<u8> {
    let mut b = DexBuilder::new();
    b.class("LMinimal;", "Ljava/lang/Object;", ACC_PUBLIC);
    b.build()
}

/// The null-initialization loop program: a conditional over a zero constant
/// that only a later constructor call disambiguates, a loop back-edge, and a
/// second null test — followed by a wide constant consumed as a double.
///
/// ```text
/// 00: const/4 v1, #int 1
/// 01: const/4 v0, #int 0
/// 02: if-eqz v0, 000a
/// 04: new-instance v0, LCoordinate;
/// 06: invoke-direct {v0, v1, v1}, LCoordinate;.<init>:(II)V
/// 09: goto 0002
/// 0a: if-nez v0, 0013
/// 0c: const-wide v2, #double 1.5
/// 11: add-double/2addr v2, v2
/// 12: nop
/// 13: return-void
/// ```
pub fn null_loop_units(idx: &PoolIndex) -> Vec<u16> {
    let coord_init = idx.method("LCoordinate;", "<init>", "(II)V");
    let coord_ty = idx.type_idx("LCoordinate;");
    let mut instrs = vec![
        Instruction::f11n(0x12, 1, 1),
        Instruction::f11n(0x12, 0, 0),
        Instruction::f21t(0x38, 0, 8),
        Instruction::f21c(0x22, 0, PoolKind::Type, coord_ty),
        Instruction::f35c(0x70, vec![0, 1, 1], PoolKind::Method, coord_init),
        Instruction::f10t(0x28, -7),
        Instruction::f21t(0x39, 0, 9),
        Instruction::f51l(0x18, 2, f64::to_bits(1.5) as i64),
        Instruction::f12x(0xcb, 2, 2),
        Instruction::f10x(0x00),
        Instruction::f10x(0x0e),
    ];
    crate::isa::normalize_addresses(&mut instrs);
    crate::isa::encode(&instrs).unwrap()
}

/// Dex containing the null-loop program as `LSnakeLike;.run:()V`.
pub fn null_loop_dex() -> Vec<u8> {
    let mut b = DexBuilder::new();
    b.class("LSnakeLike;", "Ljava/lang/Object;", ACC_PUBLIC);
    b.method("run", "()V", ACC_PUBLIC | ACC_STATIC, true);
    b.extern_method("LCoordinate;", "<init>", "(II)V");
    let idx = b.freeze();
    b.attach_code(
        "LSnakeLike;",
        "run",
        "()V",
        CodeSpec {
            registers_size: 4,
            ins_size: 0,
            outs_size: 3,
            insns: null_loop_units(&idx),
            tries: vec![],
        },
    );
    b.build()
}

/// Five-method app for call-graph and CFG fixtures:
/// main -> addRandomApple, main -> helperA, helperA -> helperB (twice),
/// addRandomApple -> LCoordinate;.<init> (external), unused() is a leaf.
pub fn app_dex() -> Vec<u8> {
    let mut b = DexBuilder::new();
    b.class("LSnakeLike;", "Ljava/lang/Object;", ACC_PUBLIC);
    b.method("addRandomApple", "()V", ACC_PUBLIC | ACC_STATIC, true);
    b.method("helperA", "()I", ACC_PUBLIC | ACC_STATIC, true);
    b.method("helperB", "(II)I", ACC_PUBLIC | ACC_STATIC, true);
    b.method("main", "()V", ACC_PUBLIC | ACC_STATIC, true);
    b.method("unused", "()V", ACC_PUBLIC | ACC_STATIC, true);
    b.extern_method("LCoordinate;", "<init>", "(II)V");
    let idx = b.freeze();

    b.attach_code(
        "LSnakeLike;",
        "addRandomApple",
        "()V",
        CodeSpec {
            registers_size: 4,
            ins_size: 0,
            outs_size: 3,
            insns: null_loop_units(&idx),
            tries: vec![],
        },
    );

    let helper_b = idx.method("LSnakeLike;", "helperB", "(II)I");
    let mut a = Asm::new();
    a.i(Instruction::f11n(0x12, 0, 3))
        .i(Instruction::f11n(0x12, 1, 4))
        .i(Instruction::f35c(0x71, vec![0, 1], PoolKind::Method, helper_b))
        .i(Instruction::f11x(0x0a, 0))
        .i(Instruction::f35c(0x71, vec![0, 0], PoolKind::Method, helper_b))
        .i(Instruction::f11x(0x0a, 0))
        .i(Instruction::f11x(0x0f, 0));
    let (units, _) = a.assemble();
    b.attach_code(
        "LSnakeLike;",
        "helperA",
        "()I",
        CodeSpec {
            registers_size: 2,
            ins_size: 0,
            outs_size: 2,
            insns: units,
            tries: vec![],
        },
    );

    let mut a = Asm::new();
    a.i(Instruction::f23x(0x90, 0, 1, 2)).i(Instruction::f11x(0x0f, 0));
    let (units, _) = a.assemble();
    b.attach_code(
        "LSnakeLike;",
        "helperB",
        "(II)I",
        CodeSpec {
            registers_size: 3,
            ins_size: 2,
            outs_size: 0,
            insns: units,
            tries: vec![],
        },
    );

    let apple = idx.method("LSnakeLike;", "addRandomApple", "()V");
    let helper_a = idx.method("LSnakeLike;", "helperA", "()I");
    let mut a = Asm::new();
    a.i(Instruction::f35c(0x71, vec![], PoolKind::Method, apple))
        .i(Instruction::f35c(0x71, vec![], PoolKind::Method, helper_a))
        .i(Instruction::f11x(0x0a, 0))
        .i(Instruction::f10x(0x0e));
    let (units, _) = a.assemble();
    b.attach_code(
        "LSnakeLike;",
        "main",
        "()V",
        CodeSpec {
            registers_size: 1,
            ins_size: 0,
            outs_size: 0,
            insns: units,
            tries: vec![],
        },
    );

    b.attach_code(
        "LSnakeLike;",
        "unused",
        "()V",
        CodeSpec {
            registers_size: 0,
            ins_size: 0,
            outs_size: 0,
            insns: vec![0x000e],
            tries: vec![],
        },
    );

    b.build()
}

/// One differential test case: a corpus method plus its argument vectors.
pub struct Case {
    pub label: &'static str,
    pub method: &'static str,
    pub proto: &'static str,
    pub args: Vec<Vec<RtValue>>,
}

pub struct Corpus {
    pub bytes: Vec<u8>,
    pub cases: Vec<Case>,
}

pub const CORPUS_CLASS: &str = "LCases;";

fn i(v: i32) -> RtValue {
    RtValue::Int(v)
}

fn j(v: i64) -> RtValue {
    RtValue::Long(v)
}

fn f(v: f32) -> RtValue {
    RtValue::Float(v.to_bits())
}

fn d(v: f64) -> RtValue {
    RtValue::Double(v.to_bits())
}

/// Scripted environment shared by every corpus case.
pub fn corpus_env() -> StubEnv {
    let mut env = StubEnv::new();
    env.subtype("LSub;", "LObj;");
    env.subtype("LBoom;", "Ljava/lang/RuntimeException;");
    env.subtype("Ljava/lang/RuntimeException;", "Ljava/lang/Exception;");
    env.subtype("Ljava/lang/ArithmeticException;", "Ljava/lang/RuntimeException;");
    env.subtype(
        "Ljava/lang/ArrayIndexOutOfBoundsException;",
        "Ljava/lang/RuntimeException;",
    );
    env.subtype("Ljava/lang/Exception;", "Ljava/lang/Throwable;");

    env.stub("LH;.add:(II)I", |_, a| {
        let (RtValue::Int(x), RtValue::Int(y)) = (a[0], a[1]) else {
            return Err("Ljava/lang/InternalError;".into());
        };
        Ok(Some(RtValue::Int(x.wrapping_add(y))))
    });
    env.stub("LH;.mul:(II)I", |_, a| {
        let (RtValue::Int(x), RtValue::Int(y)) = (a[0], a[1]) else {
            return Err("Ljava/lang/InternalError;".into());
        };
        Ok(Some(RtValue::Int(x.wrapping_mul(y))))
    });
    env.stub("LH;.sum6:(IIIIII)I", |_, a| {
        let mut s = 0i32;
        for v in a {
            let RtValue::Int(x) = v else {
                return Err("Ljava/lang/InternalError;".into());
            };
            s = s.wrapping_add(*x);
        }
        Ok(Some(RtValue::Int(s)))
    });
    env.stub("LH;.wide:(JD)J", |_, a| {
        let (RtValue::Long(x), RtValue::Double(y)) = (a[0], a[1]) else {
            return Err("Ljava/lang/InternalError;".into());
        };
        Ok(Some(RtValue::Long(x.wrapping_add(f64::from_bits(y) as i64))))
    });
    env.stub("LObj;.<init>:(I)V", |heap, a| {
        let (RtValue::Ref(h), RtValue::Int(x)) = (a[0], a[1]) else {
            return Err("Ljava/lang/InternalError;".into());
        };
        set_field(heap, h, "x:I", x as u32 as u64);
        Ok(None)
    });
    env.stub("LObj;.<init>:()V", |heap, a| {
        let RtValue::Ref(h) = a[0] else {
            return Err("Ljava/lang/InternalError;".into());
        };
        set_field(heap, h, "x:I", 41);
        Ok(None)
    });
    env.stub("LSub;.<init>:()V", |heap, a| {
        let RtValue::Ref(h) = a[0] else {
            return Err("Ljava/lang/InternalError;".into());
        };
        set_field(heap, h, "x:I", 52);
        Ok(None)
    });
    env.stub("LObj;.get:()I", |heap, a| {
        let RtValue::Ref(h) = a[0] else {
            return Err("Ljava/lang/InternalError;".into());
        };
        if h == 0 {
            return Err("Ljava/lang/NullPointerException;".into());
        }
        Ok(Some(RtValue::Int(get_field(heap, h, "x:I") as i32)))
    });
    env.stub("LBoom;.<init>:()V", |_, _| Ok(None));
    env.stub("Ljava/lang/String;.length:()I", |heap, a| {
        let RtValue::Ref(h) = a[0] else {
            return Err("Ljava/lang/InternalError;".into());
        };
        match heap.get(h) {
            Some(HeapObj::Str(s)) => Ok(Some(RtValue::Int(s.encode_utf16().count() as i32))),
            _ => Err("Ljava/lang/NullPointerException;".into()),
        }
    });
    env.stub(
        "Ljava/lang/String;.concat:(Ljava/lang/String;)Ljava/lang/String;",
        |heap, a| {
            let (RtValue::Ref(x), RtValue::Ref(y)) = (a[0], a[1]) else {
                return Err("Ljava/lang/InternalError;".into());
            };
            let (Some(HeapObj::Str(sx)), Some(HeapObj::Str(sy))) = (heap.get(x), heap.get(y))
            else {
                return Err("Ljava/lang/NullPointerException;".into());
            };
            let joined = format!("{sx}{sy}");
            let h = heap.alloc(HeapObj::Str(joined));
            Ok(Some(RtValue::Ref(h)))
        },
    );
    env.stub("Ljava/lang/String;.charAt:(I)C", |heap, a| {
        let (RtValue::Ref(h), RtValue::Int(idx)) = (a[0], a[1]) else {
            return Err("Ljava/lang/InternalError;".into());
        };
        match heap.get(h) {
            Some(HeapObj::Str(s)) => {
                let units: Vec<u16> = s.encode_utf16().collect();
                if idx < 0 || idx as usize >= units.len() {
                    Err("Ljava/lang/StringIndexOutOfBoundsException;".into())
                } else {
                    Ok(Some(RtValue::Int(units[idx as usize] as i32)))
                }
            }
            _ => Err("Ljava/lang/NullPointerException;".into()),
        }
    });
    env
}

fn set_field(heap: &mut Heap, handle: u32, key: &str, value: u64) {
    if let Some(HeapObj::Object { fields, .. }) = heap.get_mut(handle) {
        fields.insert(key.to_string(), value);
    }
}

fn get_field(heap: &Heap, handle: u32, key: &str) -> u64 {
    match heap.get(handle) {
        Some(HeapObj::Object { fields, .. }) => fields.get(key).copied().unwrap_or(0),
        _ => 0,
    }
}

/// Builds the differential corpus: one class whose methods cover arithmetic,
/// branches, calls, arrays, strings, null/zero, exceptions and casts.
pub fn corpus() -> Corpus {
    let mut b = DexBuilder::new();
    b.class(CORPUS_CLASS, "Ljava/lang/Object;", ACC_PUBLIC);
    let s = ACC_PUBLIC | ACC_STATIC;
    b.method("arithInt", "(II)I", s, true);
    b.method("arithLong", "(JJ)J", s, true);
    b.method("arithFloat", "(FF)F", s, true);
    b.method("arithDouble", "(DD)D", s, true);
    b.method("conversions", "(I)J", s, true);
    b.method("branches", "(II)I", s, true);
    b.method("switches", "(I)I", s, true);
    b.method("calls", "(II)I", s, true);
    b.method("arrays", "(I)I", s, true);
    b.method("strings", "(I)I", s, true);
    b.method("nullZero", "(I)I", s, true);
    b.method("exceptions", "(I)I", s, true);
    b.method("casts", "(I)I", s, true);
    b.field("counter", "I", s, true);
    b.field("slot", "J", s, true);

    b.extern_method("LH;", "add", "(II)I");
    b.extern_method("LH;", "mul", "(II)I");
    b.extern_method("LH;", "sum6", "(IIIIII)I");
    b.extern_method("LH;", "wide", "(JD)J");
    b.extern_method("LObj;", "<init>", "(I)V");
    b.extern_method("LObj;", "<init>", "()V");
    b.extern_method("LObj;", "get", "()I");
    b.extern_method("LSub;", "<init>", "()V");
    b.extern_method("LBoom;", "<init>", "()V");
    b.extern_method("Ljava/lang/String;", "length", "()I");
    b.extern_method("Ljava/lang/String;", "concat", "(Ljava/lang/String;)Ljava/lang/String;");
    b.extern_method("Ljava/lang/String;", "charAt", "(I)C");
    b.extern_type("LSub;");
    b.extern_type("[I");
    b.extern_type("[J");
    b.extern_type("[F");
    b.extern_type("[B");
    b.extern_type("Ljava/lang/ArithmeticException;");
    b.extern_type("Ljava/lang/ArrayIndexOutOfBoundsException;");
    b.extern_type("Ljava/lang/ClassCastException;");
    b.intern_string("ab");
    b.intern_string("xyz");

    let idx = b.freeze();
    let attach = |b: &mut DexBuilder, name: &str, proto: &str, regs: u16, ins: u16, outs: u16, units: Vec<u16>, tries: Vec<TrySpec>| {
        b.attach_code(
            CORPUS_CLASS,
            name,
            proto,
            CodeSpec {
                registers_size: regs,
                ins_size: ins,
                outs_size: outs,
                insns: units,
                tries,
            },
        );
    };

    attach(&mut b, "arithInt", "(II)I", 6, 2, 0, arith_int_units(), vec![]);
    attach(&mut b, "arithLong", "(JJ)J", 12, 4, 0, arith_long_units(), vec![]);
    attach(&mut b, "arithFloat", "(FF)F", 6, 2, 0, arith_float_units(), vec![]);
    attach(&mut b, "arithDouble", "(DD)D", 12, 4, 0, arith_double_units(), vec![]);
    attach(&mut b, "conversions", "(I)J", 12, 1, 0, conversions_units(), vec![]);
    attach(&mut b, "branches", "(II)I", 4, 2, 0, branches_units(), vec![]);
    attach(&mut b, "switches", "(I)I", 2, 1, 0, switches_units(), vec![]);
    attach(&mut b, "calls", "(II)I", 12, 2, 6, calls_units(&idx), vec![]);
    attach(&mut b, "arrays", "(I)I", 12, 1, 0, arrays_units(&idx), vec![]);
    attach(&mut b, "strings", "(I)I", 6, 1, 2, strings_units(&idx), vec![]);
    attach(&mut b, "nullZero", "(I)I", 4, 1, 2, null_zero_units(&idx), vec![]);
    let (exc_units, exc_tries) = exceptions_units(&idx);
    attach(&mut b, "exceptions", "(I)I", 5, 1, 1, exc_units, exc_tries);
    let (cast_units, cast_tries) = casts_units(&idx);
    attach(&mut b, "casts", "(I)I", 6, 1, 1, cast_units, cast_tries);

    let bytes = b.build();

    let int_vectors: Vec<Vec<RtValue>> = vec![
        vec![i(0), i(0)],
        vec![i(1), i(2)],
        vec![i(7), i(3)],
        vec![i(-5), i(9)],
        vec![i(100), i(-3)],
        vec![i(i32::MAX), i(1)],
        vec![i(i32::MIN), i(-1)],
        vec![i(255), i(8)],
        vec![i(-1), i(31)],
        vec![i(12345), i(0)], // divide by zero path
        vec![i(6), i(6)],
    ];
    let one_int: Vec<Vec<RtValue>> = (-3..8).map(|v| vec![i(v)]).collect();

    let cases = vec![
        Case {
            label: "arithmetic-int",
            method: "arithInt",
            proto: "(II)I",
            args: int_vectors.clone(),
        },
        Case {
            label: "arithmetic-long",
            method: "arithLong",
            proto: "(JJ)J",
            args: vec![
                vec![j(0), j(0)],
                vec![j(1), j(2)],
                vec![j(-9), j(5)],
                vec![j(1 << 40), j(3)],
                vec![j(i64::MAX), j(1)],
                vec![j(i64::MIN), j(-1)],
                vec![j(42), j(0)], // divide by zero path
                vec![j(-1), j(63)],
                vec![j(123456789), j(-987)],
                vec![j(7), j(7)],
            ],
        },
        Case {
            label: "arithmetic-float",
            method: "arithFloat",
            proto: "(FF)F",
            args: vec![
                vec![f(0.0), f(0.0)],
                vec![f(1.5), f(2.5)],
                vec![f(-3.25), f(0.5)],
                vec![f(f32::NAN), f(1.0)],
                vec![f(f32::INFINITY), f(2.0)],
                vec![f(1.0), f(0.0)], // IEEE divide by zero
                vec![f(-0.0), f(0.0)],
                vec![f(3.14159), f(-2.71828)],
                vec![f(1e30), f(1e-30)],
                vec![f(100.0), f(7.0)],
            ],
        },
        Case {
            label: "arithmetic-double",
            method: "arithDouble",
            proto: "(DD)D",
            args: vec![
                vec![d(0.0), d(0.0)],
                vec![d(1.5), d(2.5)],
                vec![d(-3.25), d(0.5)],
                vec![d(f64::NAN), d(1.0)],
                vec![d(f64::INFINITY), d(2.0)],
                vec![d(1.0), d(0.0)],
                vec![d(-0.0), d(0.0)],
                vec![d(3.141592653589793), d(-2.718281828459045)],
                vec![d(1e300), d(1e-300)],
                vec![d(100.0), d(7.0)],
            ],
        },
        Case {
            label: "arithmetic-conversions",
            method: "conversions",
            proto: "(I)J",
            args: vec![
                vec![i(0)],
                vec![i(1)],
                vec![i(-1)],
                vec![i(127)],
                vec![i(128)],
                vec![i(-129)],
                vec![i(65535)],
                vec![i(65536)],
                vec![i(i32::MAX)],
                vec![i(i32::MIN)],
            ],
        },
        Case {
            label: "branches",
            method: "branches",
            proto: "(II)I",
            args: int_vectors.clone(),
        },
        Case {
            label: "branches-switches",
            method: "switches",
            proto: "(I)I",
            args: vec![
                vec![i(4)],
                vec![i(5)],
                vec![i(6)],
                vec![i(7)],
                vec![i(8)],
                vec![i(10)],
                vec![i(99)],
                vec![i(-1)],
                vec![i(0)],
                vec![i(1000)],
            ],
        },
        Case {
            label: "method-calls",
            method: "calls",
            proto: "(II)I",
            args: int_vectors.clone(),
        },
        Case {
            label: "array-initialization",
            method: "arrays",
            proto: "(I)I",
            args: one_int.clone(),
        },
        Case {
            label: "string-manipulation",
            method: "strings",
            proto: "(I)I",
            args: one_int.clone(),
        },
        Case {
            label: "null-and-zero",
            method: "nullZero",
            proto: "(I)I",
            args: one_int.clone(),
        },
        Case {
            label: "exceptions",
            method: "exceptions",
            proto: "(I)I",
            args: (0..11).map(|v| vec![i(v)]).collect(),
        },
        Case {
            label: "casts",
            method: "casts",
            proto: "(I)I",
            args: vec![
                vec![i(0)],
                vec![i(1)],
                vec![i(2)],
                vec![i(-1)],
                vec![i(127)],
                vec![i(128)],
                vec![i(255)],
                vec![i(-32769)],
                vec![i(70000)],
                vec![i(i32::MIN)],
            ],
        },
    ];

    Corpus { bytes, cases }
}

fn arith_int_units() -> Vec<u16> {
    // p0 = v4, p1 = v5
    let mut a = Asm::new();
    a.i(Instruction::f23x(0x90, 0, 4, 5)) // add-int v0, p0, p1
        .i(Instruction::f12x(0xb1, 0, 5)) // sub-int/2addr v0, p1
        .i(Instruction::f22b(0xda, 0, 0, 3)) // mul-int/lit8 v0, v0, #3
        .i(Instruction::f23x(0x93, 1, 4, 5)) // div-int v1, p0, p1
        .i(Instruction::f22s(0xd4, 1, 1, 7)) // rem-int/lit16 v1, v1, #7
        .i(Instruction::f12x(0xb5, 1, 4)) // and-int/2addr v1, p0
        .i(Instruction::f23x(0x96, 2, 0, 1)) // or-int v2, v0, v1
        .i(Instruction::f22b(0xdf, 2, 2, 0x5A)) // xor-int/lit8
        .i(Instruction::f22b(0xe0, 3, 2, 3)) // shl-int/lit8 v3, v2, #3
        .i(Instruction::f12x(0xb9, 3, 4)) // shr-int/2addr v3, p0
        .i(Instruction::f22b(0xe2, 3, 3, 1)) // ushr-int/lit8 v3, v3, #1
        .i(Instruction::f22s(0xd1, 0, 4, 100)) // rsub-int v0, p0, #100
        .i(Instruction::f22b(0xd9, 1, 5, 7)) // rsub-int/lit8 v1, p1, #7
        .i(Instruction::f12x(0x7b, 2, 2)) // neg-int
        .i(Instruction::f12x(0x7c, 0, 0)) // not-int
        .i(Instruction::f23x(0x90, 0, 0, 1))
        .i(Instruction::f23x(0x90, 0, 0, 2))
        .i(Instruction::f23x(0x90, 0, 0, 3))
        .i(Instruction::f23x(0x92, 1, 4, 5)) // mul-int v1, p0, p1
        .i(Instruction::f23x(0x95, 2, 4, 5)) // and-int
        .i(Instruction::f23x(0x97, 3, 4, 5)) // xor-int
        .i(Instruction::f23x(0x90, 0, 0, 1))
        .i(Instruction::f23x(0x90, 0, 0, 2))
        .i(Instruction::f23x(0x90, 0, 0, 3))
        .i(Instruction::f23x(0x98, 1, 4, 5)) // shl-int v1, p0, p1
        .i(Instruction::f23x(0x99, 2, 4, 5)) // shr-int
        .i(Instruction::f23x(0x9a, 3, 4, 5)) // ushr-int
        .i(Instruction::f23x(0x90, 0, 0, 1))
        .i(Instruction::f23x(0x90, 0, 0, 2))
        .i(Instruction::f23x(0x90, 0, 0, 3))
        .i(Instruction::f22s(0xd0, 1, 4, -12)) // add-int/lit16
        .i(Instruction::f22s(0xd2, 2, 4, 9)) // mul-int/lit16
        .i(Instruction::f22s(0xd3, 3, 4, 5)) // div-int/lit16 (by 5, safe)
        .i(Instruction::f23x(0x90, 0, 0, 1))
        .i(Instruction::f23x(0x90, 0, 0, 2))
        .i(Instruction::f23x(0x90, 0, 0, 3))
        .i(Instruction::f22s(0xd5, 1, 5, 0x3F)) // and-int/lit16
        .i(Instruction::f22s(0xd6, 2, 5, 0x40)) // or-int/lit16
        .i(Instruction::f22s(0xd7, 3, 5, 0x15)) // xor-int/lit16
        .i(Instruction::f22b(0xd8, 1, 1, 1)) // add-int/lit8
        .i(Instruction::f22b(0xdb, 2, 2, 3)) // div-int/lit8 (by 3)
        .i(Instruction::f22b(0xdc, 3, 3, 5)) // rem-int/lit8
        .i(Instruction::f22b(0xdd, 1, 1, 0x71)) // and-int/lit8
        .i(Instruction::f22b(0xde, 2, 2, 0x0F)) // or-int/lit8
        .i(Instruction::f22b(0xe1, 3, 3, 2)) // shr-int/lit8
        .i(Instruction::f23x(0x90, 0, 0, 1))
        .i(Instruction::f23x(0x90, 0, 0, 2))
        .i(Instruction::f23x(0x90, 0, 0, 3))
        .i(Instruction::f12x(0xb0, 0, 4)) // add-int/2addr
        .i(Instruction::f12x(0xb2, 0, 5)) // mul-int/2addr
        .i(Instruction::f12x(0xb6, 0, 4)) // or-int/2addr
        .i(Instruction::f12x(0xb7, 0, 5)) // xor-int/2addr
        .i(Instruction::f12x(0xb8, 0, 5)) // shl-int/2addr
        .i(Instruction::f12x(0xba, 0, 5)) // ushr-int/2addr
        .i(Instruction::f11x(0x0f, 0)); // return v0
    a.assemble().0
}

fn arith_long_units() -> Vec<u16> {
    // regs 12, ins 4: p0 = v8:v9, p1 = v10:v11
    let mut a = Asm::new();
    a.i(Instruction::f23x(0x9b, 0, 8, 10))
        .i(Instruction::f12x(0xbc, 0, 10))
        .i(Instruction::f12x(0x84, 4, 10))
        .i(Instruction::f23x(0x9d, 2, 0, 8))
        .i(Instruction::f23x(0xa3, 0, 2, 4))
        .i(Instruction::f23x(0xa4, 2, 0, 4))
        .i(Instruction::f23x(0xa5, 0, 2, 4))
        .i(Instruction::f23x(0xa0, 2, 0, 8))
        .i(Instruction::f23x(0xa1, 0, 2, 10))
        .i(Instruction::f23x(0xa2, 2, 0, 8))
        .i(Instruction::f23x(0x9c, 0, 2, 10)) // sub-long v0, v2, p1
        .i(Instruction::f12x(0x7d, 0, 0)) // neg-long
        .i(Instruction::f12x(0x7e, 2, 0)) // not-long
        .i(Instruction::f23x(0x9e, 0, 2, 10)) // div-long (0 divisor -> throw)
        .i(Instruction::f23x(0x9f, 2, 0, 8)) // rem-long
        .i(Instruction::f12x(0xbb, 2, 8))
        .i(Instruction::f12x(0xbd, 2, 10))
        .i(Instruction::f12x(0xc0, 2, 8))
        .i(Instruction::f12x(0xc1, 2, 10))
        .i(Instruction::f12x(0xc2, 2, 8))
        .i(Instruction::f12x(0xc3, 2, 4))
        .i(Instruction::f12x(0xc4, 2, 4))
        .i(Instruction::f12x(0xc5, 2, 4))
        .i(Instruction::f12x(0xbe, 2, 8)) // div-long/2addr v2, p0
        .i(Instruction::f12x(0xbf, 2, 10)) // rem-long/2addr v2, p1
        .i(Instruction::f23x(0x31, 4, 2, 8)) // cmp-long v4, v2, p0
        .i(Instruction::f12x(0x81, 0, 4)) // int-to-long v0, v4
        .i(Instruction::f12x(0xbb, 0, 2)) // add-long/2addr v0, v2
        .i(Instruction::f11x(0x10, 0)); // return-wide v0
    a.assemble().0
}

fn arith_float_units() -> Vec<u16> {
    // p0 = v4, p1 = v5
    let mut a = Asm::new();
    a.i(Instruction::f23x(0xa6, 0, 4, 5)) // add-float v0, p0, p1
        .i(Instruction::f12x(0xc7, 0, 5)) // sub-float/2addr v0, p1
        .i(Instruction::f23x(0xa8, 1, 0, 4)) // mul-float v1, v0, p0
        .i(Instruction::f23x(0xa9, 1, 1, 5)) // div-float v1, v1, p1
        .i(Instruction::f12x(0xca, 1, 4)) // rem-float/2addr v1, p0
        .i(Instruction::f12x(0x7f, 2, 1)) // neg-float v2, v1
        .i(Instruction::f31i(0x14, 3, 0x3F80_0000)) // const v3, #1.0f bits
        .i(Instruction::f12x(0xc6, 2, 3)) // add-float/2addr v2, v3
        .i(Instruction::f23x(0x2d, 3, 2, 4)) // cmpl-float v3, v2, p0
        .i(Instruction::f12x(0x82, 3, 3)) // int-to-float v3, v3
        .i(Instruction::f23x(0xa7, 0, 2, 3)) // sub-float v0, v2, v3
        .i(Instruction::f23x(0x2e, 1, 0, 5)) // cmpg-float v1, v0, p1
        .i(Instruction::f12x(0x82, 1, 1)) // int-to-float
        .i(Instruction::f12x(0xc6, 0, 1)) // add-float/2addr v0, v1
        .i(Instruction::f12x(0xc8, 0, 4)) // mul-float/2addr v0, p0
        .i(Instruction::f12x(0xc9, 0, 5)) // div-float/2addr v0, p1
        .i(Instruction::f11x(0x0f, 0)); // return v0
    a.assemble().0
}

fn arith_double_units() -> Vec<u16> {
    // regs 12 ins 4: p0 = v8:v9, p1 = v10:v11
    let mut a = Asm::new();
    a.i(Instruction::f23x(0xab, 0, 8, 10)) // add-double v0, p0, p1
        .i(Instruction::f12x(0xcc, 0, 10)) // sub-double/2addr v0, p1
        .i(Instruction::f23x(0xad, 2, 0, 8)) // mul-double v2, v0, p0
        .i(Instruction::f23x(0xae, 2, 2, 10)) // div-double v2, v2, p1
        .i(Instruction::f12x(0xcf, 2, 8)) // rem-double/2addr v2, p0
        .i(Instruction::f12x(0x80, 4, 2)) // neg-double v4, v2
        .i(Instruction::f51l(0x18, 6, f64::to_bits(1.5) as i64)) // const-wide v6, #1.5
        .i(Instruction::f12x(0xcb, 4, 6)) // add-double/2addr v4, v6
        .i(Instruction::f23x(0x2f, 6, 4, 8)) // cmpl-double v6, v4, p0
        .i(Instruction::f12x(0x83, 6, 6)) // int-to-double v6, v6
        .i(Instruction::f23x(0xac, 0, 4, 6)) // sub-double v0, v4, v6
        .i(Instruction::f23x(0x30, 6, 0, 10)) // cmpg-double v6, v0, p1
        .i(Instruction::f12x(0x83, 6, 6)) // int-to-double
        .i(Instruction::f12x(0xcb, 0, 6)) // add-double/2addr v0, v6
        .i(Instruction::f12x(0xcd, 0, 8)) // mul-double/2addr
        .i(Instruction::f12x(0xce, 0, 10)) // div-double/2addr
        .i(Instruction::f11x(0x10, 0)); // return-wide v0
    a.assemble().0
}

fn conversions_units() -> Vec<u16> {
    // regs 12 ins 1: p0 = v11
    let mut a = Asm::new();
    a.i(Instruction::f12x(0x81, 0, 11)) // int-to-long v0, p0
        .i(Instruction::f12x(0x82, 2, 11)) // int-to-float v2, p0
        .i(Instruction::f12x(0x83, 3, 11)) // int-to-double v3:v4, p0
        .i(Instruction::f12x(0x84, 5, 0)) // long-to-int v5, v0
        .i(Instruction::f12x(0x85, 6, 0)) // long-to-float v6, v0
        .i(Instruction::f12x(0x86, 7, 0)) // long-to-double v7:v8, v0
        .i(Instruction::f12x(0x87, 9, 2)) // float-to-int v9, v2
        .i(Instruction::f12x(0x8d, 10, 11)) // int-to-byte v10, p0
        .i(Instruction::f23x(0x90, 5, 5, 9)) // add-int v5, v5, v9
        .i(Instruction::f23x(0x90, 5, 5, 10)) // add v10 (byte)
        .i(Instruction::f12x(0x8e, 9, 11)) // int-to-char v9, p0
        .i(Instruction::f23x(0x90, 5, 5, 9))
        .i(Instruction::f12x(0x8f, 9, 11)) // int-to-short v9, p0
        .i(Instruction::f23x(0x90, 5, 5, 9))
        .i(Instruction::f12x(0x88, 9, 2)) // float-to-long v9:v10, v2
        .i(Instruction::f12x(0x89, 2, 2)) // float-to-double v2:v3 -- overlaps v3! use v2:v3 after freeing
        .i(Instruction::f12x(0x8a, 4, 2)) // double-to-int v4, v2
        .i(Instruction::f12x(0x8b, 2, 2)) // double-to-long v2:v3
        .i(Instruction::f12x(0x8c, 4, 7)) // double-to-float v4, v7  (clobbers int v4; fine, fresh split)
        .i(Instruction::f12x(0x87, 4, 4)) // float-to-int v4, v4
        .i(Instruction::f12x(0x81, 6, 5)) // int-to-long v6, v5
        .i(Instruction::f12x(0xbb, 0, 6)) // add-long/2addr v0, v6
        .i(Instruction::f12x(0xbb, 0, 2)) // add-long/2addr v0, v2 (d2l result)
        .i(Instruction::f12x(0xbb, 0, 9)) // add-long/2addr v0, v9 (f2l result)
        .i(Instruction::f12x(0x81, 6, 4)) // int-to-long v6, v4
        .i(Instruction::f12x(0xbb, 0, 6))
        .i(Instruction::f11x(0x10, 0)); // return-wide v0
    a.assemble().0
}

fn branches_units() -> Vec<u16> {
    // p0 = v2, p1 = v3
    let mut a = Asm::new();
    a.i(Instruction::f11n(0x12, 0, 0)); // const/4 v0, #0
    a.branch(0x34, &[2, 3], "less"); // if-lt
    a.branch(0x32, &[2, 3], "eq"); // if-eq
    a.i(Instruction::f21s(0x13, 0, 300)); // greater
    a.goto("join");
    a.label("less");
    a.i(Instruction::f21s(0x13, 0, 100));
    a.goto("join");
    a.label("eq");
    a.i(Instruction::f21s(0x13, 0, 200));
    a.goto("join");
    a.label("join");
    a.i(Instruction::f22b(0xdd, 1, 3, 7)); // and-int/lit8 v1, p1, #7
    a.label("loop");
    a.branch(0x3d, &[1], "out"); // if-lez v1
    a.i(Instruction::f22b(0xd8, 0, 0, 2)); // v0 += 2
    a.i(Instruction::f22b(0xd8, 1, 1, -1)); // v1 -= 1
    a.goto("loop");
    a.label("out");
    a.branch(0x33, &[2, 3], "a"); // if-ne
    a.i(Instruction::f22b(0xd8, 0, 0, 1));
    a.label("a");
    a.branch(0x35, &[2, 3], "b"); // if-ge
    a.i(Instruction::f22b(0xd8, 0, 0, 2));
    a.label("b");
    a.branch(0x36, &[2, 3], "c"); // if-gt
    a.i(Instruction::f22b(0xd8, 0, 0, 4));
    a.label("c");
    a.branch(0x37, &[2, 3], "d"); // if-le
    a.i(Instruction::f22b(0xd8, 0, 0, 8));
    a.label("d");
    a.branch(0x38, &[2], "e"); // if-eqz
    a.i(Instruction::f22b(0xd8, 0, 0, 16));
    a.label("e");
    a.branch(0x39, &[2], "f"); // if-nez
    a.i(Instruction::f22b(0xd8, 0, 0, 32));
    a.label("f");
    a.branch(0x3a, &[2], "g"); // if-ltz
    a.i(Instruction::f22b(0xd8, 0, 0, 64));
    a.label("g");
    a.branch(0x3b, &[2], "h"); // if-gez
    a.i(Instruction::f22b(0xd8, 0, 0, 127));
    a.label("h");
    a.branch(0x3c, &[2], "k"); // if-gtz
    a.i(Instruction::f22b(0xd8, 0, 0, 3));
    a.label("k");
    a.branch(0x3d, &[2], "end"); // if-lez
    a.i(Instruction::f22b(0xd8, 0, 0, 5));
    a.label("end");
    a.i(Instruction::f11x(0x0f, 0));
    a.assemble().0
}

fn switches_units() -> Vec<u16> {
    // p0 = v1
    let mut a = Asm::new();
    a.packed_switch(1, "ptable");
    a.i(Instruction::f21s(0x13, 0, -1)); // default: fall-through
    a.goto("sw2");
    a.label("pc0");
    a.i(Instruction::f21s(0x13, 0, 10));
    a.goto("sw2");
    a.label("pc1");
    a.i(Instruction::f21s(0x13, 0, 11));
    a.goto("sw2");
    a.label("pc2");
    a.i(Instruction::f21s(0x13, 0, 12));
    a.goto("sw2");
    a.label("sw2");
    a.sparse_switch(1, "stable");
    a.i(Instruction::f22b(0xd8, 0, 0, 1)); // default
    a.goto("ret");
    a.label("sc10");
    a.i(Instruction::f22b(0xd8, 0, 0, 10));
    a.goto("ret");
    a.label("sc99");
    a.i(Instruction::f22b(0xd8, 0, 0, 99));
    a.goto("ret");
    a.label("ret");
    a.i(Instruction::f11x(0x0f, 0));
    a.packed_table("ptable", 5, &["pc0", "pc1", "pc2"]);
    a.sparse_table("stable", &[(10, "sc10"), (99, "sc99")]);
    a.assemble().0
}

fn calls_units(idx: &PoolIndex) -> Vec<u16> {
    // regs 12 ins 2: p0 = v10, p1 = v11
    let add = idx.method("LH;", "add", "(II)I");
    let mul = idx.method("LH;", "mul", "(II)I");
    let sum6 = idx.method("LH;", "sum6", "(IIIIII)I");
    let wide = idx.method("LH;", "wide", "(JD)J");
    let obj_init = idx.method("LObj;", "<init>", "(I)V");
    let obj_get = idx.method("LObj;", "get", "()I");
    let obj_ty = idx.type_idx("LObj;");

    let mut a = Asm::new();
    a.i(Instruction::f35c(0x71, vec![10, 11], PoolKind::Method, add))
        .i(Instruction::f11x(0x0a, 0)) // move-result v0
        .i(Instruction::f35c(0x71, vec![0, 11], PoolKind::Method, mul))
        .i(Instruction::f11x(0x0a, 0))
        .i(Instruction::f21c(0x22, 1, PoolKind::Type, obj_ty)) // new-instance v1, LObj;
        .i(Instruction::f21s(0x13, 2, 5))
        .i(Instruction::f35c(0x70, vec![1, 2], PoolKind::Method, obj_init)) // invoke-direct
        .i(Instruction::f35c(0x6e, vec![1], PoolKind::Method, obj_get)) // invoke-virtual
        .i(Instruction::f11x(0x0a, 2))
        .i(Instruction::f12x(0xb0, 0, 2)) // v0 += v2
        .i(Instruction::f11n(0x12, 4, 1))
        .i(Instruction::f11n(0x12, 5, 2))
        .i(Instruction::f11n(0x12, 6, 3))
        .i(Instruction::f11n(0x12, 7, 4))
        .i(Instruction::f11n(0x12, 8, 5))
        .i(Instruction::f11n(0x12, 9, 6))
        .i(Instruction::f3rc(0x77, 4, 6, PoolKind::Method, sum6)) // invoke-static/range
        .i(Instruction::f11x(0x0a, 3))
        .i(Instruction::f12x(0xb0, 0, 3)) // v0 += v3
        .i(Instruction::f12x(0x81, 4, 10)) // int-to-long v4:v5, p0
        .i(Instruction::f12x(0x83, 6, 11)) // int-to-double v6:v7, p1
        .i(Instruction::f35c(0x71, vec![4, 5, 6, 7], PoolKind::Method, wide))
        .i(Instruction::f11x(0x0b, 4)) // move-result-wide v4
        .i(Instruction::f12x(0x84, 6, 4)) // long-to-int v6, v4
        .i(Instruction::f12x(0xb0, 0, 6))
        .i(Instruction::f11x(0x0f, 0));
    a.assemble().0
}

fn arrays_units(idx: &PoolIndex) -> Vec<u16> {
    // regs 12 ins 1: p0 = v11
    let int_arr = idx.type_idx("[I");
    let long_arr = idx.type_idx("[J");
    let float_arr = idx.type_idx("[F");
    let byte_arr = idx.type_idx("[B");

    let mut a = Asm::new();
    a.i(Instruction::f11n(0x12, 0, 5)) // const/4 v0, #5
        .i(Instruction::f22c(0x23, 1, 0, PoolKind::Type, int_arr)); // new-array v1, v0, [I
    a.fill_array(1, "ints"); // 1,4,9,16,25
    a.i(Instruction::f11n(0x12, 2, 0)) // sum
        .i(Instruction::f11n(0x12, 3, 0)); // i
    a.label("loop");
    a.i(Instruction::f12x(0x21, 4, 1)); // array-length v4, v1
    a.branch(0x35, &[3, 4], "out"); // if-ge i, len
    a.i(Instruction::f23x(0x44, 4, 1, 3)) // aget v4, v1, v3
        .i(Instruction::f12x(0xb0, 2, 4)) // sum += v4
        .i(Instruction::f22b(0xd8, 3, 3, 1)); // i++
    a.goto("loop");
    a.label("out");
    a.i(Instruction::f11n(0x12, 3, 0))
        .i(Instruction::f23x(0x4b, 2, 1, 3)) // aput sum, v1, 0
        .i(Instruction::f23x(0x44, 4, 1, 3)); // aget back
    // long array
    a.i(Instruction::f11n(0x12, 3, 2))
        .i(Instruction::f22c(0x23, 5, 3, PoolKind::Type, long_arr)) // new-array v5, #2, [J
        .i(Instruction::f12x(0x81, 6, 4)) // int-to-long v6:v7, v4
        .i(Instruction::f11n(0x12, 3, 1))
        .i(Instruction::f23x(0x4c, 6, 5, 3)) // aput-wide v6, v5, 1
        .i(Instruction::f11n(0x12, 3, 1))
        .i(Instruction::f23x(0x45, 8, 5, 3)) // aget-wide v8:v9, v5, 1
        .i(Instruction::f12x(0x84, 4, 8)); // long-to-int v4, v8
    // float array via fill-array-data (bit patterns)
    a.i(Instruction::f11n(0x12, 3, 2))
        .i(Instruction::f22c(0x23, 6, 3, PoolKind::Type, float_arr)); // new-array v6, #2, [F
    a.fill_array(6, "floats");
    a.i(Instruction::f11n(0x12, 3, 0))
        .i(Instruction::f23x(0x44, 7, 6, 3)) // aget v7, v6, 0 (float!)
        .i(Instruction::f11n(0x12, 3, 1))
        .i(Instruction::f23x(0x44, 8, 6, 3)) // aget v8, v6, 1
        .i(Instruction::f23x(0xa6, 7, 7, 8)) // add-float v7, v7, v8
        .i(Instruction::f12x(0x87, 7, 7)) // float-to-int v7
        .i(Instruction::f12x(0xb0, 4, 7)); // v4 += v7
    // byte array truncation behavior
    a.i(Instruction::f11n(0x12, 3, 2))
        .i(Instruction::f22c(0x23, 6, 3, PoolKind::Type, byte_arr))
        .i(Instruction::f21s(0x13, 7, 300)) // const/16 v7, #300
        .i(Instruction::f11n(0x12, 3, 0))
        .i(Instruction::f23x(0x4f, 7, 6, 3)) // aput-byte 300 -> truncates to 44
        .i(Instruction::f23x(0x48, 8, 6, 3)) // aget-byte v8
        .i(Instruction::f12x(0xb0, 4, 8));
    // filled-new-array {p0, v4, v2}
    a.i(Instruction::f35c(0x24, vec![11, 4, 2], PoolKind::Type, int_arr))
        .i(Instruction::f11x(0x0c, 6)) // move-result-object v6
        .i(Instruction::f11n(0x12, 3, 2))
        .i(Instruction::f23x(0x44, 7, 6, 3)) // aget v7, v6, 2
        .i(Instruction::f12x(0xb0, 2, 7)) // sum += v7
        .i(Instruction::f12x(0xb0, 2, 4)) // sum += v4
        .i(Instruction::f11x(0x0f, 2)); // return sum
    a.fill_table(
        "ints",
        4,
        &[
            1i32.to_le_bytes(),
            4i32.to_le_bytes(),
            9i32.to_le_bytes(),
            16i32.to_le_bytes(),
            25i32.to_le_bytes(),
        ]
        .concat(),
    );
    a.fill_table(
        "floats",
        4,
        &[1.5f32.to_bits().to_le_bytes(), 2.25f32.to_bits().to_le_bytes()].concat(),
    );
    a.assemble().0
}

fn strings_units(idx: &PoolIndex) -> Vec<u16> {
    // regs 6 ins 1: p0 = v5
    let s_ab = idx.string("ab");
    let s_xyz = idx.string("xyz");
    let length = idx.method("Ljava/lang/String;", "length", "()I");
    let concat = idx.method("Ljava/lang/String;", "concat", "(Ljava/lang/String;)Ljava/lang/String;");
    let char_at = idx.method("Ljava/lang/String;", "charAt", "(I)C");

    let mut a = Asm::new();
    a.i(Instruction::f21c(0x1a, 0, PoolKind::String, s_ab))
        .i(Instruction::f35c(0x6e, vec![0], PoolKind::Method, length))
        .i(Instruction::f11x(0x0a, 1))
        .i(Instruction::f31c(0x1b, 2, PoolKind::String, s_xyz)) // const-string/jumbo
        .i(Instruction::f35c(0x6e, vec![0, 2], PoolKind::Method, concat))
        .i(Instruction::f11x(0x0c, 3)) // move-result-object v3
        .i(Instruction::f35c(0x6e, vec![3], PoolKind::Method, length))
        .i(Instruction::f11x(0x0a, 4))
        .i(Instruction::f12x(0xb0, 1, 4))
        .i(Instruction::f22b(0xdc, 4, 5, 5)) // rem-int/lit8 v4, p0, #5
        .i(Instruction::f35c(0x6e, vec![3, 4], PoolKind::Method, char_at))
        .i(Instruction::f11x(0x0a, 4))
        .i(Instruction::f12x(0xb0, 1, 4))
        .i(Instruction::f11x(0x0f, 1));
    a.assemble().0
}

fn null_zero_units(idx: &PoolIndex) -> Vec<u16> {
    // regs 4 ins 1: p0 = v3
    let obj_ty = idx.type_idx("LObj;");
    let obj_init = idx.method("LObj;", "<init>", "(I)V");
    let obj_get = idx.method("LObj;", "get", "()I");

    let mut a = Asm::new();
    a.i(Instruction::f11n(0x12, 0, 0)); // Object o = null (ambiguous zero)
    a.branch(0x39, &[3], "mk"); // if p0 != 0
    a.goto("chk");
    a.label("mk");
    a.i(Instruction::f21c(0x22, 0, PoolKind::Type, obj_ty))
        .i(Instruction::f35c(0x70, vec![0, 3], PoolKind::Method, obj_init));
    a.label("chk");
    a.i(Instruction::f11n(0x12, 1, 0)); // int result = 0 (zero as int)
    a.branch(0x38, &[0], "ret0"); // if (o == null)
    a.i(Instruction::f35c(0x6e, vec![0], PoolKind::Method, obj_get))
        .i(Instruction::f11x(0x0a, 1));
    a.label("ret0");
    a.i(Instruction::f11n(0x12, 2, 0)); // int z = 0
    a.branch(0x39, &[2], "skip"); // if (z != 0) -- int zero comparison
    a.i(Instruction::f22b(0xd8, 1, 1, 1)); // result += 1
    a.label("skip");
    a.i(Instruction::f11x(0x0f, 1));
    a.assemble().0
}

fn exceptions_units(idx: &PoolIndex) -> (Vec<u16>, Vec<TrySpec>) {
    // regs 5 ins 1: p0 = v4
    let boom_ty = idx.type_idx("LBoom;");
    let boom_init = idx.method("LBoom;", "<init>", "()V");
    let int_arr = idx.type_idx("[I");

    let mut a = Asm::new();
    a.i(Instruction::f11n(0x12, 0, 0)); // v0 = 0
    a.label("t1s");
    a.i(Instruction::f21s(0x13, 1, 100))
        .i(Instruction::f23x(0x93, 1, 1, 4)) // div-int v1, #100, p0
        .i(Instruction::f12x(0xb0, 0, 1)); // v0 += v1
    a.i(Instruction::f11n(0x12, 2, 1));
    a.branch(0x33, &[4, 2], "t1e"); // if p0 != 1 skip throw
    a.i(Instruction::f21c(0x22, 3, PoolKind::Type, boom_ty))
        .i(Instruction::f35c(0x70, vec![3], PoolKind::Method, boom_init))
        .i(Instruction::f11x(0x27, 3)); // throw v3
    a.label("t1e");
    a.goto("after");
    a.label("h_arith");
    a.i(Instruction::f11x(0x0d, 1)) // move-exception v1
        .i(Instruction::f21s(0x13, 0, 1000));
    a.goto("after");
    a.label("h_any");
    a.i(Instruction::f11x(0x0d, 1))
        .i(Instruction::f21s(0x13, 0, 2000));
    a.goto("after");
    a.label("after");
    a.i(Instruction::f11n(0x12, 1, 1))
        .i(Instruction::f22c(0x23, 2, 1, PoolKind::Type, int_arr)); // new-array v2, #1, [I
    a.label("t2s");
    a.i(Instruction::f23x(0x44, 3, 2, 4)) // aget v3, v2, p0 (OOB when p0 >= 1)
        .i(Instruction::f12x(0xb0, 0, 3));
    a.label("t2e");
    a.goto("done");
    a.label("h_oob");
    a.i(Instruction::f11x(0x0d, 3))
        .i(Instruction::f22b(0xd8, 0, 0, 77));
    a.label("done");
    a.i(Instruction::f11n(0x12, 1, 5));
    a.branch(0x33, &[4, 1], "ret"); // if p0 != 5 skip uncaught throw
    a.i(Instruction::f21c(0x22, 3, PoolKind::Type, boom_ty))
        .i(Instruction::f35c(0x70, vec![3], PoolKind::Method, boom_init))
        .i(Instruction::f11x(0x27, 3)); // uncaught
    a.label("ret");
    a.i(Instruction::f11x(0x0f, 0));
    let (units, labels) = a.assemble();

    let tries = vec![
        TrySpec {
            start_unit: labels["t1s"],
            unit_count: (labels["t1e"] - labels["t1s"]) as u16,
            handlers: vec![
                (
                    Some("Ljava/lang/ArithmeticException;".to_string()),
                    labels["h_arith"],
                ),
                (None, labels["h_any"]),
            ],
        },
        TrySpec {
            start_unit: labels["t2s"],
            unit_count: (labels["t2e"] - labels["t2s"]) as u16,
            handlers: vec![(
                Some("Ljava/lang/ArrayIndexOutOfBoundsException;".to_string()),
                labels["h_oob"],
            )],
        },
    ];
    (units, tries)
}

fn casts_units(idx: &PoolIndex) -> (Vec<u16>, Vec<TrySpec>) {
    // regs 6 ins 1: p0 = v5
    let obj_ty = idx.type_idx("LObj;");
    let sub_ty = idx.type_idx("LSub;");
    let obj_init0 = idx.method("LObj;", "<init>", "()V");
    let sub_init = idx.method("LSub;", "<init>", "()V");

    let mut a = Asm::new();
    a.branch(0x39, &[5], "sub"); // if p0 != 0 make Sub
    a.i(Instruction::f21c(0x22, 0, PoolKind::Type, obj_ty))
        .i(Instruction::f35c(0x70, vec![0], PoolKind::Method, obj_init0));
    a.goto("have");
    a.label("sub");
    a.i(Instruction::f21c(0x22, 0, PoolKind::Type, sub_ty))
        .i(Instruction::f35c(0x70, vec![0], PoolKind::Method, sub_init));
    a.label("have");
    a.i(Instruction::f22c(0x20, 1, 0, PoolKind::Type, sub_ty)); // instance-of v1, v0, LSub;
    a.label("ts");
    a.i(Instruction::f21c(0x1f, 0, PoolKind::Type, sub_ty)) // check-cast v0, LSub;
        .i(Instruction::f22b(0xd8, 1, 1, 10));
    a.label("te");
    a.goto("prim");
    a.label("hcce");
    a.i(Instruction::f11x(0x0d, 2)) // move-exception v2
        .i(Instruction::f22b(0xd8, 1, 1, 100));
    a.label("prim");
    a.i(Instruction::f12x(0x83, 2, 5)) // int-to-double v2:v3, p0
        .i(Instruction::f12x(0x8a, 4, 2)) // double-to-int v4
        .i(Instruction::f12x(0xb0, 1, 4))
        .i(Instruction::f12x(0x8d, 4, 5)) // int-to-byte
        .i(Instruction::f12x(0xb0, 1, 4))
        .i(Instruction::f12x(0x8e, 4, 5)) // int-to-char
        .i(Instruction::f12x(0xb0, 1, 4))
        .i(Instruction::f12x(0x8f, 4, 5)) // int-to-short
        .i(Instruction::f12x(0xb0, 1, 4))
        .i(Instruction::f31i(0x14, 4, 0x7FC0_0000)) // const v4, #NaN bits
        .i(Instruction::f12x(0x87, 4, 4)) // float-to-int (NaN -> 0)
        .i(Instruction::f12x(0xb0, 1, 4))
        .i(Instruction::f11x(0x0f, 1));
    let (units, labels) = a.assemble();

    let tries = vec![TrySpec {
        start_unit: labels["ts"],
        unit_count: (labels["te"] - labels["ts"]) as u16,
        handlers: vec![(
            Some("Ljava/lang/ClassCastException;".to_string()),
            labels["hcce"],
        )],
    }];
    (units, tries)
}
