//! Parser for the opcode-to-statement mapping table (`mapping.tsv`), the
//! single source of truth for how each normal opcode lowers to IR.

use std::sync::LazyLock;

use crate::ir::{BinOp, CmpKind, InvokeKind, IrType, RelOp, UnOp};
use crate::isa::{opcode_info, OpKind};

/// Register width of an access, as spelled in the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Narrow,
    Wide,
    Object,
    Boolean,
    Byte,
    Char,
    Short,
}

impl Slot {
    pub fn is_wide(self) -> bool {
        matches!(self, Slot::Wide)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinForm {
    Reg,
    TwoAddr,
    Lit,
}

/// How one opcode lowers; templates are parametric over registers and pool
/// operands supplied by the concrete instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftKind {
    Nop,
    Move(Slot),
    MoveResult(Slot),
    MoveException,
    ReturnVoid,
    Return(Slot),
    Const32,
    Const64,
    ConstString,
    ConstClass,
    MonitorEnter,
    MonitorExit,
    CheckCast,
    InstanceOf,
    ArrayLength,
    NewInstance,
    NewArray,
    FilledNewArray,
    FillArrayData,
    Throw,
    Goto,
    PackedSwitch,
    SparseSwitch,
    Cmp(CmpKind),
    If(RelOp),
    IfZ(RelOp),
    ArrayGet(Slot),
    ArrayPut(Slot),
    InstanceGet(Slot),
    InstancePut(Slot),
    StaticGet(Slot),
    StaticPut(Slot),
    Invoke(InvokeKind),
    Unary { op: UnOp, ty: PrimTy },
    Convert { from: PrimTy, to: PrimTy },
    Binop { op: BinOp, reversed: bool, ty: PrimTy, form: BinForm },
}

/// Primitive type tokens usable in templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimTy {
    Int,
    Long,
    Float,
    Double,
    Byte,
    Char,
    Short,
}

impl PrimTy {
    pub fn ir(self) -> IrType {
        match self {
            PrimTy::Int => IrType::Int,
            PrimTy::Long => IrType::Long,
            PrimTy::Float => IrType::Float,
            PrimTy::Double => IrType::Double,
            PrimTy::Byte => IrType::Byte,
            PrimTy::Char => IrType::Char,
            PrimTy::Short => IrType::Short,
        }
    }

    pub fn is_wide(self) -> bool {
        matches!(self, PrimTy::Long | PrimTy::Double)
    }
}

const MAPPING: &str = include_str!("mapping.tsv");

static TABLE: LazyLock<[Option<(&'static str, LiftKind)>; 256]> = LazyLock::new(|| {
    let mut table: [Option<(&'static str, LiftKind)>; 256] = [None; 256];
    for (lineno, line) in MAPPING.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        let err = |what: &str| -> ! {
            panic!("mapping.tsv line {}: {what}", lineno + 1);
        };
        let Some(value_s) = cols.next() else { err("missing value") };
        let Some(mnemonic) = cols.next() else { err("missing mnemonic") };
        let Some(template) = cols.next() else { err("missing template") };
        let value = u8::from_str_radix(value_s.trim_start_matches("0x"), 16)
            .unwrap_or_else(|_| err("bad opcode value"));
        let kind = parse_template(template)
            .unwrap_or_else(|| panic!("mapping.tsv line {}: bad template {template:?}", lineno + 1));
        if table[value as usize].is_some() {
            err("duplicate opcode row");
        }
        // The mnemonic column is redundant documentation; it must agree with
        // the opcode metadata table.
        let info = opcode_info(value);
        if info.kind != OpKind::Normal || info.mnemonic != mnemonic {
            panic!(
                "mapping.tsv line {}: mnemonic {mnemonic:?} does not match opcode 0x{value:02x} ({})",
                lineno + 1,
                info.mnemonic
            );
        }
        table[value as usize] = Some((info.mnemonic, kind));
    }
    table
});

/// Lowering template for an opcode; `None` for odex/unused values.
pub fn lift_kind(opcode: u8) -> Option<LiftKind> {
    TABLE[opcode as usize].map(|(_, k)| k)
}

fn parse_template(template: &str) -> Option<LiftKind> {
    let mut toks = template.split_whitespace();
    let head = toks.next()?;
    let kind = match head {
        "nop" => LiftKind::Nop,
        "move" => LiftKind::Move(slot(toks.next()?)?),
        "move-result" => LiftKind::MoveResult(slot(toks.next()?)?),
        "move-exception" => LiftKind::MoveException,
        "return-void" => LiftKind::ReturnVoid,
        "return" => LiftKind::Return(slot(toks.next()?)?),
        "const32" => LiftKind::Const32,
        "const64" => LiftKind::Const64,
        "const-string" => LiftKind::ConstString,
        "const-class" => LiftKind::ConstClass,
        "monitor" => match toks.next()? {
            "enter" => LiftKind::MonitorEnter,
            "exit" => LiftKind::MonitorExit,
            _ => return None,
        },
        "check-cast" => LiftKind::CheckCast,
        "instance-of" => LiftKind::InstanceOf,
        "array-length" => LiftKind::ArrayLength,
        "new-instance" => LiftKind::NewInstance,
        "new-array" => LiftKind::NewArray,
        "filled-new-array" => LiftKind::FilledNewArray,
        "fill-array-data" => LiftKind::FillArrayData,
        "throw" => LiftKind::Throw,
        "goto" => LiftKind::Goto,
        "packed-switch" => LiftKind::PackedSwitch,
        "sparse-switch" => LiftKind::SparseSwitch,
        "cmp" => LiftKind::Cmp(match toks.next()? {
            "long" => CmpKind::Long,
            "lfloat" => CmpKind::LtFloat,
            "gfloat" => CmpKind::GtFloat,
            "ldouble" => CmpKind::LtDouble,
            "gdouble" => CmpKind::GtDouble,
            _ => return None,
        }),
        "if" => LiftKind::If(rel(toks.next()?)?),
        "ifz" => LiftKind::IfZ(rel(toks.next()?)?),
        "aget" => LiftKind::ArrayGet(slot(toks.next()?)?),
        "aput" => LiftKind::ArrayPut(slot(toks.next()?)?),
        "iget" => LiftKind::InstanceGet(slot(toks.next()?)?),
        "iput" => LiftKind::InstancePut(slot(toks.next()?)?),
        "sget" => LiftKind::StaticGet(slot(toks.next()?)?),
        "sput" => LiftKind::StaticPut(slot(toks.next()?)?),
        "invoke" => LiftKind::Invoke(match toks.next()? {
            "virtual" => InvokeKind::Virtual,
            "super" => InvokeKind::Super,
            "direct" => InvokeKind::Direct,
            "static" => InvokeKind::Static,
            "interface" => InvokeKind::Interface,
            _ => return None,
        }),
        "unary" => {
            let op = match toks.next()? {
                "neg" => UnOp::Neg,
                "not" => UnOp::Not,
                _ => return None,
            };
            LiftKind::Unary {
                op,
                ty: prim(toks.next()?)?,
            }
        }
        "convert" => LiftKind::Convert {
            from: prim(toks.next()?)?,
            to: prim(toks.next()?)?,
        },
        "binop" => {
            let (op, reversed) = match toks.next()? {
                "add" => (BinOp::Add, false),
                "sub" => (BinOp::Sub, false),
                "rsub" => (BinOp::Sub, true),
                "mul" => (BinOp::Mul, false),
                "div" => (BinOp::Div, false),
                "rem" => (BinOp::Rem, false),
                "and" => (BinOp::And, false),
                "or" => (BinOp::Or, false),
                "xor" => (BinOp::Xor, false),
                "shl" => (BinOp::Shl, false),
                "shr" => (BinOp::Shr, false),
                "ushr" => (BinOp::Ushr, false),
                _ => return None,
            };
            let ty = prim(toks.next()?)?;
            let form = match toks.next()? {
                "reg" => BinForm::Reg,
                "2addr" => BinForm::TwoAddr,
                "lit" => BinForm::Lit,
                _ => return None,
            };
            LiftKind::Binop {
                op,
                reversed,
                ty,
                form,
            }
        }
        _ => return None,
    };
    if toks.next().is_some() {
        return None;
    }
    Some(kind)
}

fn slot(tok: &str) -> Option<Slot> {
    Some(match tok {
        "n" => Slot::Narrow,
        "w" => Slot::Wide,
        "o" => Slot::Object,
        "z" => Slot::Boolean,
        "b" => Slot::Byte,
        "c" => Slot::Char,
        "s" => Slot::Short,
        _ => return None,
    })
}

fn rel(tok: &str) -> Option<RelOp> {
    Some(match tok {
        "eq" => RelOp::Eq,
        "ne" => RelOp::Ne,
        "lt" => RelOp::Lt,
        "ge" => RelOp::Ge,
        "gt" => RelOp::Gt,
        "le" => RelOp::Le,
        _ => return None,
    })
}

fn prim(tok: &str) -> Option<PrimTy> {
    Some(match tok {
        "int" => PrimTy::Int,
        "long" => PrimTy::Long,
        "float" => PrimTy::Float,
        "double" => PrimTy::Double,
        "byte" => PrimTy::Byte,
        "char" => PrimTy::Char,
        "short" => PrimTy::Short,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isa::opcode_info;

    #[test]
    fn every_normal_opcode_has_a_mapping() {
        for v in 0..=0xFFu16 {
            let info = opcode_info(v as u8);
            match info.kind {
                OpKind::Normal => assert!(
                    lift_kind(v as u8).is_some(),
                    "normal opcode 0x{v:02x} ({}) has no mapping row",
                    info.mnemonic
                ),
                _ => assert!(
                    lift_kind(v as u8).is_none(),
                    "non-normal opcode 0x{v:02x} must not be mapped"
                ),
            }
        }
    }

    #[test]
    fn spot_check_templates() {
        assert_eq!(lift_kind(0x12), Some(LiftKind::Const32));
        assert_eq!(lift_kind(0x38), Some(LiftKind::IfZ(RelOp::Eq)));
        assert_eq!(
            lift_kind(0x9c),
            Some(LiftKind::Binop {
                op: BinOp::Sub,
                reversed: false,
                ty: PrimTy::Long,
                form: BinForm::Reg
            })
        );
        assert_eq!(
            lift_kind(0xd9),
            Some(LiftKind::Binop {
                op: BinOp::Sub,
                reversed: true,
                ty: PrimTy::Int,
                form: BinForm::Lit
            })
        );
        assert_eq!(lift_kind(0x70), Some(LiftKind::Invoke(InvokeKind::Direct)));
        assert_eq!(lift_kind(0x45), Some(LiftKind::ArrayGet(Slot::Wide)));
    }

    #[test]
    fn group_membership_agrees_with_templates() {
        use crate::isa::{group_of, Group};
        for v in 0..=0xE2u16 {
            let Some(kind) = lift_kind(v as u8) else { continue };
            match group_of(v as u8) {
                Group::Invoke => assert!(matches!(kind, LiftKind::Invoke(_))),
                Group::ArithLogic => assert!(matches!(
                    kind,
                    LiftKind::Unary { .. } | LiftKind::Convert { .. } | LiftKind::Binop { .. }
                )),
                Group::FieldAccess => assert!(matches!(
                    kind,
                    LiftKind::ArrayGet(_)
                        | LiftKind::ArrayPut(_)
                        | LiftKind::InstanceGet(_)
                        | LiftKind::InstancePut(_)
                        | LiftKind::StaticGet(_)
                        | LiftKind::StaticPut(_)
                )),
                _ => {}
            }
        }
    }
}
