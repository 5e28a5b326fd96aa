//! Lifting and typing end-to-end on the fixture programs.

use dexlift::dex::parse_dex;
use dexlift::fixtures;
use dexlift::ir::{
    emit_text, validate, Body, IrType, Place, Statement, StmtId, ValidateOpts, Value,
};
use dexlift::lift::lift_method;
use dexlift::passes::{run_pipeline, PassOptions};

fn lift_named(bytes: &[u8], name: &str) -> Body {
    let dex = parse_dex(bytes).unwrap();
    let (method, code) = dex
        .classes
        .iter()
        .flat_map(|c| c.methods())
        .find(|m| m.method.name == name)
        .map(|m| (m, m.code.as_ref().unwrap()))
        .unwrap();
    lift_method(&dex, method, code).unwrap()
}

fn stmt_at<'b>(body: &'b Body, addr: u32) -> (&'b Statement, StmtId) {
    let id = body.addr_map[&addr];
    (body.stmt(id), id)
}

#[test]
fn null_loop_untyped_shape() {
    let body = lift_named(&fixtures::null_loop_dex(), "run");

    // Entry placeholder first; static method, so no identity prefix.
    assert!(matches!(body.stmt(body.order()[0]), Statement::Nop));

    // One statement group per instruction; the trailing nop lifts to none.
    // Instructions: 2 consts, if, new, invoke, goto, if, const-wide, add,
    // nop, return-void -> 10 statements after the entry nop.
    assert_eq!(body.len(), 11);
    assert_eq!(body.addr_map.len(), 11); // every instruction address mapped

    let (goto, _) = stmt_at(&body, 0x09);
    let Statement::Goto { target } = goto else {
        panic!("0x09 should lift to goto");
    };
    assert_eq!(*target, body.addr_map[&0x02], "loop jumps to the 0x02 statement");

    let (if1, _) = stmt_at(&body, 0x02);
    assert!(matches!(if1, Statement::If { rhs: Value::Int(0), .. }));
    let (new_stmt, _) = stmt_at(&body, 0x04);
    assert!(
        matches!(new_stmt, Statement::Assign { value: Value::New(d), .. } if d == "LCoordinate;")
    );
    let (invoke, _) = stmt_at(&body, 0x06);
    match invoke {
        Statement::Invoke { method, args, result, .. } => {
            assert_eq!(method.to_string(), "LCoordinate;.<init>:(II)V");
            assert_eq!(args.len(), 3);
            assert!(result.is_none());
        }
        other => panic!("0x06 lifted to {other:?}"),
    }

    // The nop at 0x12 produced no statement; its address maps to the next
    // statement (the return at 0x13).
    assert_eq!(body.addr_map[&0x12], body.addr_map[&0x13]);

    assert!(validate(&body, ValidateOpts::default()).is_empty());
}

#[test]
fn null_loop_types_and_rewrites() {
    let mut body = lift_named(&fixtures::null_loop_dex(), "run");
    run_pipeline(&mut body, &PassOptions::default()).unwrap();

    // No unknowns anywhere.
    assert!(body.live_locals().all(|(_, l)| l.ty != IrType::Unknown));
    assert!(validate(&body, ValidateOpts { typed: true, optimized: true }).is_empty());

    // The declaration lifted from 0x01 became a null assignment.
    let (decl, _) = stmt_at(&body, 0x01);
    match decl {
        Statement::Assign { place: Place::Local(v0), value } => {
            assert_eq!(*value, Value::Null);
            assert_eq!(body.local(*v0).ty, IrType::Ref("LCoordinate;".into()));
            assert_eq!(body.local(*v0).name, "v0");
        }
        other => panic!("0x01 is {other:?}"),
    }

    // Both comparisons now test against null.
    for addr in [0x02u32, 0x0a] {
        let (cmp, _) = stmt_at(&body, addr);
        assert!(
            matches!(cmp, Statement::If { rhs: Value::Null, .. }),
            "comparison at 0x{addr:02x} is {cmp:?}"
        );
    }

    // The wide constant consumed by a double addition was reinterpreted
    // bit-for-bit.
    let (wide, _) = stmt_at(&body, 0x0c);
    match wide {
        Statement::Assign { place: Place::Local(v2), value } => {
            assert_eq!(*value, Value::Double(f64::to_bits(1.5)));
            assert_eq!(body.local(*v2).ty, IrType::Double);
        }
        other => panic!("0x0c is {other:?}"),
    }

    // Nops are gone after optimization.
    assert!(body.iter().all(|(_, s)| !matches!(s, Statement::Nop)));

    let text = emit_text(&body);
    assert!(text.contains("v0 = null"), "{text}");
    assert!(text.contains("if v0 == null goto "), "{text}");
    assert!(text.contains("if v0 != null goto "), "{text}");
}

#[test]
fn no_opt_retains_entry_nop() {
    let mut body = lift_named(&fixtures::null_loop_dex(), "run");
    run_pipeline(&mut body, &PassOptions { optimize: false }).unwrap();
    assert!(matches!(body.stmt(body.order()[0]), Statement::Nop));
    assert!(body.live_locals().all(|(_, l)| l.ty != IrType::Unknown));
}

#[test]
fn lifting_is_deterministic() {
    let a = lift_named(&fixtures::null_loop_dex(), "run");
    let b = lift_named(&fixtures::null_loop_dex(), "run");
    assert_eq!(emit_text(&a), emit_text(&b));
}

#[test]
fn return_void_only_method() {
    let body = lift_named(&fixtures::app_dex(), "unused");
    let kinds: Vec<&str> = body.iter().map(|(_, s)| s.kind_name()).collect();
    assert_eq!(kinds, vec!["nop", "return-void"]);
}

#[test]
fn instance_identity_prefix_binds_this_and_params() {
    use dexlift::dex::builder::{CodeSpec, DexBuilder};
    use dexlift::isa::Instruction;

    let mut b = DexBuilder::new();
    b.class("LPoint;", "Ljava/lang/Object;", 1);
    b.method("sum", "(IJ)I", 1, false); // virtual instance method
    b.freeze();
    // this=v0? No: regs 5, ins 4 -> this=v1, p0(I)=v2, p1(J)=v3:v4.
    let mut instrs = vec![
        Instruction::f12x(0x84, 0, 3), // long-to-int v0, v3
        Instruction::f23x(0x90, 0, 0, 2), // add-int v0, v0, v2
        Instruction::f11x(0x0f, 0),
    ];
    dexlift::isa::normalize_addresses(&mut instrs);
    b.attach_code(
        "LPoint;",
        "sum",
        "(IJ)I",
        CodeSpec {
            registers_size: 5,
            ins_size: 4,
            outs_size: 0,
            insns: dexlift::isa::encode(&instrs).unwrap(),
            tries: vec![],
        },
    );
    let bytes = b.build();
    let mut body = lift_named(&bytes, "sum");

    let text = emit_text(&body);
    assert!(text.contains("v1 := @this LPoint;"), "{text}");
    assert!(text.contains("v2 := @param0 I"), "{text}");
    assert!(text.contains("v3 := @param1 J"), "{text}");

    run_pipeline(&mut body, &PassOptions::default()).unwrap();
    let found: Vec<(String, IrType)> = body
        .live_locals()
        .map(|(_, l)| (l.name.clone(), l.ty.clone()))
        .collect();
    assert!(found.contains(&("v1".into(), IrType::Ref("LPoint;".into()))));
    assert!(found.contains(&("v3".into(), IrType::Long)));
}

#[test]
fn whole_corpus_lifts_types_and_validates() {
    let corpus = fixtures::corpus();
    let dex = parse_dex(&corpus.bytes).unwrap();
    let report = dexlift::process_dex(&dex, &dexlift::ProcessOptions::default());
    let failures: Vec<String> = report
        .failures()
        .map(|(m, e)| format!("{m}: {e}"))
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
    assert_eq!(report.bodies().count(), 13);
    for body in report.bodies() {
        assert!(
            validate(body, ValidateOpts { typed: true, optimized: true }).is_empty(),
            "{} failed validation",
            body.signature
        );
    }
}
