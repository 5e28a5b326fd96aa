//! Textual rendering of decoded instructions in the conventional
//! `addr: mnemonic args` listing style.

use std::fmt::Write;

use super::{Instruction, Payload};
use crate::dex::{DexFile, PoolKind};

/// Renders one instruction line (without the address prefix).
pub fn render(ins: &Instruction, dex: &DexFile) -> String {
    let mut s = String::new();
    if let Some(Payload::RawTable(units)) = &ins.payload {
        let kind = match units[0] {
            super::PACKED_SWITCH_SIGNATURE => "packed-switch-payload",
            super::SPARSE_SWITCH_SIGNATURE => "sparse-switch-payload",
            _ => "array-data-payload",
        };
        write!(s, "{kind} ({} units)", units.len()).unwrap();
        return s;
    }

    s.push_str(ins.mnemonic());
    let mut sep = " ";

    match ins.registers.len() {
        0 => {}
        n if is_invoke_style(ins.opcode) => {
            let regs: Vec<String> = ins.registers.iter().map(|r| format!("v{r}")).collect();
            let _ = n;
            write!(s, " {{{}}}", regs.join(", ")).unwrap();
            sep = ", ";
        }
        _ => {
            let regs: Vec<String> = ins.registers.iter().map(|r| format!("v{r}")).collect();
            write!(s, " {}", regs.join(", ")).unwrap();
            sep = ", ";
        }
    }

    if let Some(lit) = ins.literal {
        let tag = if is_wide_const(ins.opcode) { "long" } else { "int" };
        write!(s, "{sep}#{tag} {lit}").unwrap();
        sep = ", ";
    }

    if let Some(off) = ins.branch_offset {
        let target = ins.address.wrapping_add_signed(off);
        write!(s, "{sep}{target:04x}").unwrap();
        sep = ", ";
    }

    if let Some((kind, idx)) = ins.pool_index {
        let text = match kind {
            PoolKind::String => dex
                .resolve_string(idx)
                .map(|v| format!("\"{}\"", escape(v)))
                .unwrap_or_else(|_| format!("string@{idx}")),
            PoolKind::Type => dex
                .resolve_type(idx)
                .map(str::to_string)
                .unwrap_or_else(|_| format!("type@{idx}")),
            PoolKind::Field => dex
                .resolve_field(idx)
                .map(|f| f.to_string())
                .unwrap_or_else(|_| format!("field@{idx}")),
            PoolKind::Method => dex
                .resolve_method(idx)
                .map(|m| m.to_string())
                .unwrap_or_else(|_| format!("method@{idx}")),
            PoolKind::Proto => format!("proto@{idx}"),
        };
        write!(s, "{sep}{text}").unwrap();
    }
    s
}

fn is_invoke_style(opcode: u8) -> bool {
    matches!(opcode, 0x24 | 0x25 | 0x6e..=0x78)
}

fn is_wide_const(opcode: u8) -> bool {
    matches!(opcode, 0x16..=0x19)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}
