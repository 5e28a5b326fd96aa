//! The opcode metadata table covering the full 0x00–0xFF value space.

use std::sync::LazyLock;

use super::{group_of, Format, Group, OpKind, OpcodeInfo};
use crate::dex::PoolKind;

use Format::*;
use PoolKind::{Field as PF, Method as PM, String as PS, Type as PT};

/// Normal opcodes: (value, mnemonic, format, pool).
#[rustfmt::skip]
const NORMAL: &[(u8, &str, Format, Option<PoolKind>)] = &[
    (0x00, "nop", F10x, None),
    (0x01, "move", F12x, None),
    (0x02, "move/from16", F22x, None),
    (0x03, "move/16", F32x, None),
    (0x04, "move-wide", F12x, None),
    (0x05, "move-wide/from16", F22x, None),
    (0x06, "move-wide/16", F32x, None),
    (0x07, "move-object", F12x, None),
    (0x08, "move-object/from16", F22x, None),
    (0x09, "move-object/16", F32x, None),
    (0x0a, "move-result", F11x, None),
    (0x0b, "move-result-wide", F11x, None),
    (0x0c, "move-result-object", F11x, None),
    (0x0d, "move-exception", F11x, None),
    (0x0e, "return-void", F10x, None),
    (0x0f, "return", F11x, None),
    (0x10, "return-wide", F11x, None),
    (0x11, "return-object", F11x, None),
    (0x12, "const/4", F11n, None),
    (0x13, "const/16", F21s, None),
    (0x14, "const", F31i, None),
    (0x15, "const/high16", F21h, None),
    (0x16, "const-wide/16", F21s, None),
    (0x17, "const-wide/32", F31i, None),
    (0x18, "const-wide", F51l, None),
    (0x19, "const-wide/high16", F21h, None),
    (0x1a, "const-string", F21c, Some(PS)),
    (0x1b, "const-string/jumbo", F31c, Some(PS)),
    (0x1c, "const-class", F21c, Some(PT)),
    (0x1d, "monitor-enter", F11x, None),
    (0x1e, "monitor-exit", F11x, None),
    (0x1f, "check-cast", F21c, Some(PT)),
    (0x20, "instance-of", F22c, Some(PT)),
    (0x21, "array-length", F12x, None),
    (0x22, "new-instance", F21c, Some(PT)),
    (0x23, "new-array", F22c, Some(PT)),
    (0x24, "filled-new-array", F35c, Some(PT)),
    (0x25, "filled-new-array/range", F3rc, Some(PT)),
    (0x26, "fill-array-data", F31t, None),
    (0x27, "throw", F11x, None),
    (0x28, "goto", F10t, None),
    (0x29, "goto/16", F20t, None),
    (0x2a, "goto/32", F30t, None),
    (0x2b, "packed-switch", F31t, None),
    (0x2c, "sparse-switch", F31t, None),
    (0x2d, "cmpl-float", F23x, None),
    (0x2e, "cmpg-float", F23x, None),
    (0x2f, "cmpl-double", F23x, None),
    (0x30, "cmpg-double", F23x, None),
    (0x31, "cmp-long", F23x, None),
    (0x32, "if-eq", F22t, None),
    (0x33, "if-ne", F22t, None),
    (0x34, "if-lt", F22t, None),
    (0x35, "if-ge", F22t, None),
    (0x36, "if-gt", F22t, None),
    (0x37, "if-le", F22t, None),
    (0x38, "if-eqz", F21t, None),
    (0x39, "if-nez", F21t, None),
    (0x3a, "if-ltz", F21t, None),
    (0x3b, "if-gez", F21t, None),
    (0x3c, "if-gtz", F21t, None),
    (0x3d, "if-lez", F21t, None),
    (0x44, "aget", F23x, None),
    (0x45, "aget-wide", F23x, None),
    (0x46, "aget-object", F23x, None),
    (0x47, "aget-boolean", F23x, None),
    (0x48, "aget-byte", F23x, None),
    (0x49, "aget-char", F23x, None),
    (0x4a, "aget-short", F23x, None),
    (0x4b, "aput", F23x, None),
    (0x4c, "aput-wide", F23x, None),
    (0x4d, "aput-object", F23x, None),
    (0x4e, "aput-boolean", F23x, None),
    (0x4f, "aput-byte", F23x, None),
    (0x50, "aput-char", F23x, None),
    (0x51, "aput-short", F23x, None),
    (0x52, "iget", F22c, Some(PF)),
    (0x53, "iget-wide", F22c, Some(PF)),
    (0x54, "iget-object", F22c, Some(PF)),
    (0x55, "iget-boolean", F22c, Some(PF)),
    (0x56, "iget-byte", F22c, Some(PF)),
    (0x57, "iget-char", F22c, Some(PF)),
    (0x58, "iget-short", F22c, Some(PF)),
    (0x59, "iput", F22c, Some(PF)),
    (0x5a, "iput-wide", F22c, Some(PF)),
    (0x5b, "iput-object", F22c, Some(PF)),
    (0x5c, "iput-boolean", F22c, Some(PF)),
    (0x5d, "iput-byte", F22c, Some(PF)),
    (0x5e, "iput-char", F22c, Some(PF)),
    (0x5f, "iput-short", F22c, Some(PF)),
    (0x60, "sget", F21c, Some(PF)),
    (0x61, "sget-wide", F21c, Some(PF)),
    (0x62, "sget-object", F21c, Some(PF)),
    (0x63, "sget-boolean", F21c, Some(PF)),
    (0x64, "sget-byte", F21c, Some(PF)),
    (0x65, "sget-char", F21c, Some(PF)),
    (0x66, "sget-short", F21c, Some(PF)),
    (0x67, "sput", F21c, Some(PF)),
    (0x68, "sput-wide", F21c, Some(PF)),
    (0x69, "sput-object", F21c, Some(PF)),
    (0x6a, "sput-boolean", F21c, Some(PF)),
    (0x6b, "sput-byte", F21c, Some(PF)),
    (0x6c, "sput-char", F21c, Some(PF)),
    (0x6d, "sput-short", F21c, Some(PF)),
    (0x6e, "invoke-virtual", F35c, Some(PM)),
    (0x6f, "invoke-super", F35c, Some(PM)),
    (0x70, "invoke-direct", F35c, Some(PM)),
    (0x71, "invoke-static", F35c, Some(PM)),
    (0x72, "invoke-interface", F35c, Some(PM)),
    (0x74, "invoke-virtual/range", F3rc, Some(PM)),
    (0x75, "invoke-super/range", F3rc, Some(PM)),
    (0x76, "invoke-direct/range", F3rc, Some(PM)),
    (0x77, "invoke-static/range", F3rc, Some(PM)),
    (0x78, "invoke-interface/range", F3rc, Some(PM)),
    (0x7b, "neg-int", F12x, None),
    (0x7c, "not-int", F12x, None),
    (0x7d, "neg-long", F12x, None),
    (0x7e, "not-long", F12x, None),
    (0x7f, "neg-float", F12x, None),
    (0x80, "neg-double", F12x, None),
    (0x81, "int-to-long", F12x, None),
    (0x82, "int-to-float", F12x, None),
    (0x83, "int-to-double", F12x, None),
    (0x84, "long-to-int", F12x, None),
    (0x85, "long-to-float", F12x, None),
    (0x86, "long-to-double", F12x, None),
    (0x87, "float-to-int", F12x, None),
    (0x88, "float-to-long", F12x, None),
    (0x89, "float-to-double", F12x, None),
    (0x8a, "double-to-int", F12x, None),
    (0x8b, "double-to-long", F12x, None),
    (0x8c, "double-to-float", F12x, None),
    (0x8d, "int-to-byte", F12x, None),
    (0x8e, "int-to-char", F12x, None),
    (0x8f, "int-to-short", F12x, None),
    (0x90, "add-int", F23x, None),
    (0x91, "sub-int", F23x, None),
    (0x92, "mul-int", F23x, None),
    (0x93, "div-int", F23x, None),
    (0x94, "rem-int", F23x, None),
    (0x95, "and-int", F23x, None),
    (0x96, "or-int", F23x, None),
    (0x97, "xor-int", F23x, None),
    (0x98, "shl-int", F23x, None),
    (0x99, "shr-int", F23x, None),
    (0x9a, "ushr-int", F23x, None),
    (0x9b, "add-long", F23x, None),
    (0x9c, "sub-long", F23x, None),
    (0x9d, "mul-long", F23x, None),
    (0x9e, "div-long", F23x, None),
    (0x9f, "rem-long", F23x, None),
    (0xa0, "and-long", F23x, None),
    (0xa1, "or-long", F23x, None),
    (0xa2, "xor-long", F23x, None),
    (0xa3, "shl-long", F23x, None),
    (0xa4, "shr-long", F23x, None),
    (0xa5, "ushr-long", F23x, None),
    (0xa6, "add-float", F23x, None),
    (0xa7, "sub-float", F23x, None),
    (0xa8, "mul-float", F23x, None),
    (0xa9, "div-float", F23x, None),
    (0xaa, "rem-float", F23x, None),
    (0xab, "add-double", F23x, None),
    (0xac, "sub-double", F23x, None),
    (0xad, "mul-double", F23x, None),
    (0xae, "div-double", F23x, None),
    (0xaf, "rem-double", F23x, None),
    (0xb0, "add-int/2addr", F12x, None),
    (0xb1, "sub-int/2addr", F12x, None),
    (0xb2, "mul-int/2addr", F12x, None),
    (0xb3, "div-int/2addr", F12x, None),
    (0xb4, "rem-int/2addr", F12x, None),
    (0xb5, "and-int/2addr", F12x, None),
    (0xb6, "or-int/2addr", F12x, None),
    (0xb7, "xor-int/2addr", F12x, None),
    (0xb8, "shl-int/2addr", F12x, None),
    (0xb9, "shr-int/2addr", F12x, None),
    (0xba, "ushr-int/2addr", F12x, None),
    (0xbb, "add-long/2addr", F12x, None),
    (0xbc, "sub-long/2addr", F12x, None),
    (0xbd, "mul-long/2addr", F12x, None),
    (0xbe, "div-long/2addr", F12x, None),
    (0xbf, "rem-long/2addr", F12x, None),
    (0xc0, "and-long/2addr", F12x, None),
    (0xc1, "or-long/2addr", F12x, None),
    (0xc2, "xor-long/2addr", F12x, None),
    (0xc3, "shl-long/2addr", F12x, None),
    (0xc4, "shr-long/2addr", F12x, None),
    (0xc5, "ushr-long/2addr", F12x, None),
    (0xc6, "add-float/2addr", F12x, None),
    (0xc7, "sub-float/2addr", F12x, None),
    (0xc8, "mul-float/2addr", F12x, None),
    (0xc9, "div-float/2addr", F12x, None),
    (0xca, "rem-float/2addr", F12x, None),
    (0xcb, "add-double/2addr", F12x, None),
    (0xcc, "sub-double/2addr", F12x, None),
    (0xcd, "mul-double/2addr", F12x, None),
    (0xce, "div-double/2addr", F12x, None),
    (0xcf, "rem-double/2addr", F12x, None),
    (0xd0, "add-int/lit16", F22s, None),
    (0xd1, "rsub-int", F22s, None),
    (0xd2, "mul-int/lit16", F22s, None),
    (0xd3, "div-int/lit16", F22s, None),
    (0xd4, "rem-int/lit16", F22s, None),
    (0xd5, "and-int/lit16", F22s, None),
    (0xd6, "or-int/lit16", F22s, None),
    (0xd7, "xor-int/lit16", F22s, None),
    (0xd8, "add-int/lit8", F22b, None),
    (0xd9, "rsub-int/lit8", F22b, None),
    (0xda, "mul-int/lit8", F22b, None),
    (0xdb, "div-int/lit8", F22b, None),
    (0xdc, "rem-int/lit8", F22b, None),
    (0xdd, "and-int/lit8", F22b, None),
    (0xde, "or-int/lit8", F22b, None),
    (0xdf, "xor-int/lit8", F22b, None),
    (0xe0, "shl-int/lit8", F22b, None),
    (0xe1, "shr-int/lit8", F22b, None),
    (0xe2, "ushr-int/lit8", F22b, None),
];

/// The twelve runtime-optimized opcodes that never appear in distributed
/// application bytecode.
#[rustfmt::skip]
const ODEX: &[(u8, &str)] = &[
    (0xee, "execute-inline"),
    (0xf0, "invoke-direct-empty"),
    (0xf2, "iget-quick"),
    (0xf3, "iget-wide-quick"),
    (0xf4, "iget-object-quick"),
    (0xf5, "iput-quick"),
    (0xf6, "iput-wide-quick"),
    (0xf7, "iput-object-quick"),
    (0xf8, "invoke-virtual-quick"),
    (0xf9, "invoke-virtual-quick/range"),
    (0xfa, "invoke-super-quick"),
    (0xfb, "invoke-super-quick/range"),
];

static TABLE: LazyLock<[OpcodeInfo; 256]> = LazyLock::new(|| {
    let mut table = [OpcodeInfo {
        value: 0,
        mnemonic: "unused",
        format: Format::F00x,
        group: Group::Other,
        kind: OpKind::Unused,
        pool: None,
    }; 256];
    for (i, slot) in table.iter_mut().enumerate() {
        slot.value = i as u8;
        slot.group = group_of(i as u8);
    }
    for &(value, mnemonic, format, pool) in NORMAL {
        let slot = &mut table[value as usize];
        slot.mnemonic = mnemonic;
        slot.format = format;
        slot.kind = OpKind::Normal;
        slot.pool = pool;
    }
    for &(value, mnemonic) in ODEX {
        let slot = &mut table[value as usize];
        slot.mnemonic = mnemonic;
        slot.kind = OpKind::Odex;
    }
    table
});

/// Metadata for any opcode byte; total over 0x00–0xFF.
pub fn opcode_info(value: u8) -> &'static OpcodeInfo {
    &TABLE[value as usize]
}

/// Looks an opcode up by its conventional mnemonic spelling.
pub fn opcode_by_mnemonic(mnemonic: &str) -> Option<&'static OpcodeInfo> {
    TABLE
        .iter()
        .find(|o| o.kind == OpKind::Normal && o.mnemonic == mnemonic)
}
