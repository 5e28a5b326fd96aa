//! Container parsing against encoder-built images.

use dexlift::dex::{parse_dex, DexError};
use dexlift::fixtures;

#[test]
fn minimal_image_parses() {
    let bytes = fixtures::minimal_dex();
    let dex = parse_dex(&bytes).unwrap();
    assert_eq!(dex.classes.len(), 1);
    assert_eq!(dex.classes[0].descriptor, "LMinimal;");
    assert_eq!(dex.classes[0].superclass.as_deref(), Some("Ljava/lang/Object;"));
    assert_eq!(dex.classes[0].methods().count(), 0);
}

#[test]
fn minimal_matches_checked_in_fixture() {
    // The checked-in fixture file is the builder's output, pinned.
    let built = fixtures::minimal_dex();
    let on_disk = include_bytes!("fixtures/minimal.dex");
    assert_eq!(built.as_slice(), on_disk.as_slice());
}

#[test]
fn string_pool_is_sorted_and_indexable() {
    let bytes = fixtures::minimal_dex();
    let dex = parse_dex(&bytes).unwrap();
    // Sorted by UTF-16 code units: ASCII 'M' < 'j'.
    assert_eq!(dex.resolve_string(0).unwrap(), "LMinimal;");
    assert_eq!(dex.resolve_string(1).unwrap(), "Ljava/lang/Object;");
    let sorted = dex
        .strings
        .windows(2)
        .all(|w| w[0].encode_utf16().cmp(w[1].encode_utf16()).is_lt());
    assert!(sorted);
}

#[test]
fn truncated_and_bad_magic_inputs() {
    assert!(matches!(
        parse_dex(&[0u8; 8]),
        Err(DexError::BadMagic { .. }) | Err(DexError::Truncated { .. })
    ));
    let mut bytes = fixtures::minimal_dex();
    bytes[4..8].copy_from_slice(b"036\0");
    assert!(matches!(parse_dex(&bytes), Err(DexError::BadMagic { .. })));
    let bytes = fixtures::minimal_dex();
    assert!(matches!(
        parse_dex(&bytes[..bytes.len() - 40]),
        Err(DexError::Malformed { .. }) | Err(DexError::Truncated { .. })
    ));
}

#[test]
fn coordinate_constructor_resolves() {
    let bytes = fixtures::null_loop_dex();
    let dex = parse_dex(&bytes).unwrap();
    let m = dex
        .methods
        .iter()
        .find(|m| m.owner == "LCoordinate;")
        .unwrap();
    assert_eq!(m.name, "<init>");
    assert_eq!(m.proto.descriptor(), "(II)V");

    let run = dex.classes[0]
        .methods()
        .find(|m| m.method.name == "run")
        .unwrap();
    let code = dex.method_code(run).unwrap();
    assert!(code.registers_size >= code.ins_size);
    assert_eq!(code.ins_size, 0);
    assert_eq!(code.insns.len(), 20);
}

#[test]
fn full_model_walk_resolves_everything() {
    for bytes in [
        fixtures::minimal_dex(),
        fixtures::null_loop_dex(),
        fixtures::app_dex(),
        fixtures::corpus().bytes,
    ] {
        let dex = parse_dex(&bytes).unwrap();
        // Parsing validates eagerly; the walk just confirms the resolved
        // model is internally complete.
        assert!(dex.walk_all_refs() > 0 || dex.classes.is_empty());
        for i in 0..dex.strings.len() as u32 {
            dex.resolve_string(i).unwrap();
        }
        for i in 0..dex.types.len() as u32 {
            dex.resolve_type(i).unwrap();
        }
        for i in 0..dex.fields.len() as u32 {
            dex.resolve_field(i).unwrap();
        }
        for i in 0..dex.methods.len() as u32 {
            dex.resolve_method(i).unwrap();
        }
    }
}

#[test]
fn roundtrip_reparse_is_identical() {
    // parse(bytes) == parse(bytes) and a second build is byte-identical.
    let a = fixtures::corpus().bytes;
    let b = fixtures::corpus().bytes;
    assert_eq!(a, b);
    let d1 = parse_dex(&a).unwrap();
    let d2 = parse_dex(&b).unwrap();
    assert_eq!(d1, d2);
}

#[test]
fn abstract_method_has_no_code() {
    use dexlift::dex::builder::DexBuilder;
    let mut b = DexBuilder::new();
    b.class("LIface;", "Ljava/lang/Object;", 0x200 | 0x400);
    b.method("doIt", "()V", 0x400 | 0x1, false); // abstract
    let dex = parse_dex(&b.build()).unwrap();
    let m = dex.classes[0].methods().next().unwrap();
    assert!(dex.method_code(m).is_none());
}
