//! The Dalvik instruction set: opcode metadata, structured instructions, and
//! the stream decoder/encoder. A single declarative format table drives both
//! directions.

mod decode;
mod encode;
mod table;
mod text;

pub use decode::decode_stream;
pub use encode::{encode, fill_array_table, packed_switch_table, sparse_switch_table};
pub use table::{opcode_by_mnemonic, opcode_info};
pub use text::render;

use crate::dex::PoolKind;

/// The standard encoded-instruction formats. `F00x` marks table entries that
/// never appear in an instruction stream (unused and odex values).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    F00x,
    F10x,
    F12x,
    F11n,
    F11x,
    F10t,
    F20t,
    F22x,
    F21t,
    F21s,
    F21h,
    F21c,
    F23x,
    F22b,
    F22t,
    F22s,
    F22c,
    F30t,
    F32x,
    F31i,
    F31t,
    F31c,
    F35c,
    F3rc,
    F51l,
}

impl Format {
    /// Fixed instruction width in 16-bit code units.
    pub fn width(self) -> u32 {
        use Format::*;
        match self {
            F00x => 0,
            F10x | F12x | F11n | F11x | F10t => 1,
            F20t | F22x | F21t | F21s | F21h | F21c | F23x | F22b | F22t | F22s | F22c => 2,
            F30t | F32x | F31i | F31t | F31c | F35c | F3rc => 3,
            F51l => 5,
        }
    }
}

/// Instruction group, assigned by opcode value range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Move,
    Branch,
    FieldAccess,
    Invoke,
    ArithLogic,
    Other,
}

pub fn group_of(value: u8) -> Group {
    match value {
        0x01..=0x1C => Group::Move,
        0x27..=0x3D => Group::Branch,
        0x44..=0x6D => Group::FieldAccess,
        0x6E..=0x78 => Group::Invoke,
        0x7B..=0xE2 => Group::ArithLogic,
        _ => Group::Other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Normal,
    /// Runtime-optimized opcode; never present in distributed applications
    /// and rejected by the decoder.
    Odex,
    Unused,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpcodeInfo {
    pub value: u8,
    pub mnemonic: &'static str,
    pub format: Format,
    pub group: Group,
    pub kind: OpKind,
    /// Which pool the instruction's index operand points into, if any.
    pub pool: Option<PoolKind>,
}

/// Data table attached to `packed-switch`, `sparse-switch` and
/// `fill-array-data` instructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    /// Structured copy attached to the owning switch; targets are absolute
    /// method-relative code-unit addresses.
    PackedSwitch { first_key: i32, targets: Vec<u32> },
    /// Keys are strictly increasing; targets absolute as above.
    SparseSwitch { cases: Vec<(i32, u32)> },
    FillArray { element_width: u16, data: Vec<u8> },
    /// A payload table as it stands in the instruction stream (raw units
    /// including the signature word); kept verbatim so encoding round-trips.
    RawTable(Vec<u16>),
}

pub const PACKED_SWITCH_SIGNATURE: u16 = 0x0100;
pub const SPARSE_SWITCH_SIGNATURE: u16 = 0x0200;
pub const FILL_ARRAY_SIGNATURE: u16 = 0x0300;

/// One decoded register-machine instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub opcode: u8,
    /// Register operands in mnemonic order; range forms are expanded.
    pub registers: Vec<u16>,
    pub literal: Option<i64>,
    /// Signed code-unit offset relative to this instruction's address.
    pub branch_offset: Option<i32>,
    pub pool_index: Option<(PoolKind, u32)>,
    /// Code-unit offset of this instruction within its method.
    pub address: u32,
    /// Code units consumed (for payload pseudo-instructions, the table size).
    pub width: u32,
    pub payload: Option<Payload>,
}

impl Instruction {
    pub fn info(&self) -> &'static OpcodeInfo {
        opcode_info(self.opcode)
    }

    pub fn mnemonic(&self) -> &'static str {
        self.info().mnemonic
    }

    /// True for a payload table standing in the stream (not its owner).
    pub fn is_payload_table(&self) -> bool {
        matches!(self.payload, Some(Payload::RawTable(_)))
    }

    pub fn width_units(&self) -> u32 {
        match &self.payload {
            Some(Payload::RawTable(units)) => units.len() as u32,
            _ => self.info().format.width(),
        }
    }

    fn bare(opcode: u8) -> Instruction {
        Instruction {
            opcode,
            registers: Vec::new(),
            literal: None,
            branch_offset: None,
            pool_index: None,
            address: 0,
            width: opcode_info(opcode).format.width(),
            payload: None,
        }
    }

    pub fn f10x(opcode: u8) -> Instruction {
        Instruction::bare(opcode)
    }

    pub fn f12x(opcode: u8, dest: u16, src: u16) -> Instruction {
        Instruction {
            registers: vec![dest, src],
            ..Instruction::bare(opcode)
        }
    }

    pub fn f11n(opcode: u8, dest: u16, literal: i64) -> Instruction {
        Instruction {
            registers: vec![dest],
            literal: Some(literal),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f11x(opcode: u8, reg: u16) -> Instruction {
        Instruction {
            registers: vec![reg],
            ..Instruction::bare(opcode)
        }
    }

    pub fn f10t(opcode: u8, offset: i32) -> Instruction {
        Instruction {
            branch_offset: Some(offset),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f20t(opcode: u8, offset: i32) -> Instruction {
        Instruction {
            branch_offset: Some(offset),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f30t(opcode: u8, offset: i32) -> Instruction {
        Instruction {
            branch_offset: Some(offset),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f22x(opcode: u8, dest: u16, src: u16) -> Instruction {
        Instruction {
            registers: vec![dest, src],
            ..Instruction::bare(opcode)
        }
    }

    pub fn f32x(opcode: u8, dest: u16, src: u16) -> Instruction {
        Instruction {
            registers: vec![dest, src],
            ..Instruction::bare(opcode)
        }
    }

    pub fn f21t(opcode: u8, reg: u16, offset: i32) -> Instruction {
        Instruction {
            registers: vec![reg],
            branch_offset: Some(offset),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f21s(opcode: u8, dest: u16, literal: i64) -> Instruction {
        Instruction {
            registers: vec![dest],
            literal: Some(literal),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f21h(opcode: u8, dest: u16, literal: i64) -> Instruction {
        Instruction {
            registers: vec![dest],
            literal: Some(literal),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f21c(opcode: u8, dest: u16, pool: PoolKind, index: u32) -> Instruction {
        Instruction {
            registers: vec![dest],
            pool_index: Some((pool, index)),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f31c(opcode: u8, dest: u16, pool: PoolKind, index: u32) -> Instruction {
        Instruction {
            registers: vec![dest],
            pool_index: Some((pool, index)),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f23x(opcode: u8, dest: u16, src1: u16, src2: u16) -> Instruction {
        Instruction {
            registers: vec![dest, src1, src2],
            ..Instruction::bare(opcode)
        }
    }

    pub fn f22b(opcode: u8, dest: u16, src: u16, literal: i64) -> Instruction {
        Instruction {
            registers: vec![dest, src],
            literal: Some(literal),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f22t(opcode: u8, reg_a: u16, reg_b: u16, offset: i32) -> Instruction {
        Instruction {
            registers: vec![reg_a, reg_b],
            branch_offset: Some(offset),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f22s(opcode: u8, dest: u16, src: u16, literal: i64) -> Instruction {
        Instruction {
            registers: vec![dest, src],
            literal: Some(literal),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f22c(opcode: u8, reg_a: u16, reg_b: u16, pool: PoolKind, index: u32) -> Instruction {
        Instruction {
            registers: vec![reg_a, reg_b],
            pool_index: Some((pool, index)),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f31i(opcode: u8, dest: u16, literal: i64) -> Instruction {
        Instruction {
            registers: vec![dest],
            literal: Some(literal),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f31t(opcode: u8, reg: u16, offset: i32) -> Instruction {
        Instruction {
            registers: vec![reg],
            branch_offset: Some(offset),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f35c(opcode: u8, regs: Vec<u16>, pool: PoolKind, index: u32) -> Instruction {
        Instruction {
            registers: regs,
            pool_index: Some((pool, index)),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f3rc(opcode: u8, first: u16, count: u16, pool: PoolKind, index: u32) -> Instruction {
        Instruction {
            registers: (first..first + count).collect(),
            pool_index: Some((pool, index)),
            ..Instruction::bare(opcode)
        }
    }

    pub fn f51l(opcode: u8, dest: u16, literal: i64) -> Instruction {
        Instruction {
            registers: vec![dest],
            literal: Some(literal),
            ..Instruction::bare(opcode)
        }
    }

    pub fn raw_table(units: Vec<u16>) -> Instruction {
        Instruction {
            opcode: 0x00,
            registers: Vec::new(),
            literal: None,
            branch_offset: None,
            pool_index: None,
            address: 0,
            width: units.len() as u32,
            payload: Some(Payload::RawTable(units)),
        }
    }
}

/// Recomputes `address` and `width` so consecutive instructions chain
/// correctly; fixture generators call this before encoding.
pub fn normalize_addresses(instrs: &mut [Instruction]) {
    let mut addr = 0u32;
    for ins in instrs.iter_mut() {
        ins.width = ins.width_units();
        ins.address = addr;
        addr += ins.width;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IsaError {
    #[error("optimized (odex) opcode 0x{opcode:02x} `{mnemonic}` at address 0x{address:04x} is not supported")]
    UnsupportedOpcode {
        opcode: u8,
        mnemonic: &'static str,
        address: u32,
    },
    #[error("unknown opcode 0x{opcode:02x} at address 0x{address:04x}")]
    UnknownOpcode { opcode: u8, address: u32 },
    #[error("instruction at address 0x{address:04x} is truncated")]
    TruncatedInstruction { address: u32 },
    #[error("malformed payload table at address 0x{address:04x}: {reason}")]
    MalformedPayload { address: u32, reason: &'static str },
    #[error("`{mnemonic}` {field} value {value} does not fit its encoding field")]
    FieldOverflow {
        mnemonic: &'static str,
        field: &'static str,
        value: i64,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opcode_info_examples() {
        let c4 = opcode_info(0x12);
        assert_eq!(c4.mnemonic, "const/4");
        assert_eq!(c4.group, Group::Move);
        assert_eq!(c4.kind, OpKind::Normal);
        assert_eq!(c4.format, Format::F11n);

        let ifeqz = opcode_info(0x38);
        assert_eq!(ifeqz.mnemonic, "if-eqz");
        assert_eq!(ifeqz.group, Group::Branch);

        // The optimized field-access/invoke range.
        assert_eq!(opcode_info(0xF2).kind, OpKind::Odex);
        assert_eq!(opcode_info(0xF2).mnemonic, "iget-quick");
        assert_eq!(opcode_info(0xF8).kind, OpKind::Odex);
        assert_eq!(opcode_info(0x3E).kind, OpKind::Unused);
        assert_eq!(opcode_info(0xFF).kind, OpKind::Unused);
    }

    #[test]
    fn opcode_table_census() {
        let mut normal = 0;
        let mut odex = 0;
        let mut unused_low = 0;
        for v in 0..=0xFFu16 {
            let info = opcode_info(v as u8);
            assert_eq!(info.value, v as u8);
            match info.kind {
                OpKind::Normal => normal += 1,
                OpKind::Odex => odex += 1,
                OpKind::Unused => {
                    if v <= 0xE2 {
                        unused_low += 1;
                    }
                }
            }
        }
        // All twelve runtime-optimized opcodes, and no normal opcode above
        // the arithmetic group's end.
        assert_eq!(odex, 12);
        assert_eq!(normal, 218);
        assert_eq!(unused_low, 9);
        for v in 0xE3..=0xFFu16 {
            assert_ne!(opcode_info(v as u8).kind, OpKind::Normal);
        }
    }

    #[test]
    fn groups_follow_value_ranges() {
        assert_eq!(group_of(0x01), Group::Move);
        assert_eq!(group_of(0x1C), Group::Move);
        assert_eq!(group_of(0x27), Group::Branch);
        assert_eq!(group_of(0x3D), Group::Branch);
        assert_eq!(group_of(0x44), Group::FieldAccess);
        assert_eq!(group_of(0x6D), Group::FieldAccess);
        assert_eq!(group_of(0x6E), Group::Invoke);
        assert_eq!(group_of(0x78), Group::Invoke);
        assert_eq!(group_of(0x7B), Group::ArithLogic);
        assert_eq!(group_of(0xE2), Group::ArithLogic);
        assert_eq!(group_of(0x00), Group::Other);
        assert_eq!(group_of(0x26), Group::Other);
    }
}
