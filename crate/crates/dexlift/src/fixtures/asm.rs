//! A tiny label-resolving assembler for building test method bodies.
//! Branch widths are fixed (label gotos always use goto/16) so a single
//! addressing pass suffices; payload tables are auto-aligned with nops.

use std::collections::HashMap;

use crate::isa::{encode, opcode_info, Format, Instruction};

#[derive(Clone)]
enum Item {
    Fixed(Instruction),
    /// Branch to a label; format from the opcode (10t/20t/30t/21t/22t).
    Branch { op: u8, regs: Vec<u16>, label: String },
    /// 31t instruction referencing a payload table label.
    TableRef { op: u8, reg: u16, label: String },
    PackedTable { first_key: i32, targets: Vec<String> },
    SparseTable { cases: Vec<(i32, String)> },
    FillTable { width: u16, data: Vec<u8> },
    Label(String),
}

impl Item {
    fn width(&self) -> u32 {
        match self {
            Item::Label(_) => 0,
            Item::Fixed(ins) => ins.width_units(),
            Item::Branch { op, .. } | Item::TableRef { op, .. } => {
                opcode_info(*op).format.width()
            }
            Item::PackedTable { targets, .. } => 4 + targets.len() as u32 * 2,
            Item::SparseTable { cases } => 2 + cases.len() as u32 * 4,
            Item::FillTable { data, .. } => 4 + (data.len() as u32).div_ceil(2),
        }
    }

    fn is_table(&self) -> bool {
        matches!(
            self,
            Item::PackedTable { .. } | Item::SparseTable { .. } | Item::FillTable { .. }
        )
    }
}

#[derive(Default)]
pub struct Asm {
    items: Vec<Item>,
}

impl Asm {
    pub fn new() -> Asm {
        Asm::default()
    }

    pub fn i(&mut self, ins: Instruction) -> &mut Asm {
        self.items.push(Item::Fixed(ins));
        self
    }

    pub fn label(&mut self, name: &str) -> &mut Asm {
        self.items.push(Item::Label(name.to_string()));
        self
    }

    /// Unconditional jump (encoded as goto/16 for a fixed width).
    pub fn goto(&mut self, label: &str) -> &mut Asm {
        self.items.push(Item::Branch {
            op: 0x29,
            regs: vec![],
            label: label.to_string(),
        });
        self
    }

    /// Conditional branch: 21t (one register) or 22t (two).
    pub fn branch(&mut self, op: u8, regs: &[u16], label: &str) -> &mut Asm {
        self.items.push(Item::Branch {
            op,
            regs: regs.to_vec(),
            label: label.to_string(),
        });
        self
    }

    pub fn packed_switch(&mut self, reg: u16, table: &str) -> &mut Asm {
        self.items.push(Item::TableRef {
            op: 0x2b,
            reg,
            label: table.to_string(),
        });
        self
    }

    pub fn sparse_switch(&mut self, reg: u16, table: &str) -> &mut Asm {
        self.items.push(Item::TableRef {
            op: 0x2c,
            reg,
            label: table.to_string(),
        });
        self
    }

    pub fn fill_array(&mut self, reg: u16, table: &str) -> &mut Asm {
        self.items.push(Item::TableRef {
            op: 0x26,
            reg,
            label: table.to_string(),
        });
        self
    }

    pub fn packed_table(&mut self, self_label: &str, first_key: i32, targets: &[&str]) -> &mut Asm {
        self.label(self_label);
        self.items.push(Item::PackedTable {
            first_key,
            targets: targets.iter().map(|s| s.to_string()).collect(),
        });
        self
    }

    pub fn sparse_table(&mut self, self_label: &str, cases: &[(i32, &str)]) -> &mut Asm {
        self.label(self_label);
        self.items.push(Item::SparseTable {
            cases: cases.iter().map(|(k, s)| (*k, s.to_string())).collect(),
        });
        self
    }

    pub fn fill_table(&mut self, self_label: &str, width: u16, data: &[u8]) -> &mut Asm {
        self.label(self_label);
        self.items.push(Item::FillTable {
            width,
            data: data.to_vec(),
        });
        self
    }

    /// Encodes to code units plus the resolved label addresses.
    pub fn assemble(&self) -> (Vec<u16>, HashMap<String, u32>) {
        // Pass 1: addresses, inserting an alignment nop before any table at
        // an odd address. Labels stick to the item that follows them.
        let mut labels: HashMap<String, u32> = HashMap::new();
        let mut padded: Vec<bool> = vec![false; self.items.len()];
        let mut addrs: Vec<u32> = vec![0; self.items.len()];
        let mut pending_labels: Vec<&str> = Vec::new();
        let mut addr = 0u32;
        for (i, item) in self.items.iter().enumerate() {
            if let Item::Label(name) = item {
                pending_labels.push(name);
                continue;
            }
            if item.is_table() && addr % 2 == 1 {
                padded[i] = true;
                addr += 1;
            }
            for name in pending_labels.drain(..) {
                labels.insert(name.to_string(), addr);
            }
            addrs[i] = addr;
            addr += item.width();
        }
        for name in pending_labels {
            labels.insert(name.to_string(), addr);
        }

        // Table address -> owning instruction address, for relative targets.
        let mut owner_of: HashMap<u32, u32> = HashMap::new();
        for (i, item) in self.items.iter().enumerate() {
            if let Item::TableRef { label, .. } = item {
                owner_of.insert(labels[label.as_str()], addrs[i]);
            }
        }

        // Pass 2: build instructions with resolved offsets.
        let mut instrs: Vec<Instruction> = Vec::new();
        for (i, item) in self.items.iter().enumerate() {
            if matches!(item, Item::Label(_)) {
                continue;
            }
            if padded[i] {
                instrs.push(Instruction::f10x(0x00));
            }
            let here = addrs[i];
            let off = |label: &str| -> i32 {
                let t = *labels
                    .get(label)
                    .unwrap_or_else(|| panic!("undefined label {label:?}"));
                t as i32 - here as i32
            };
            let ins = match item {
                Item::Label(_) => unreachable!(),
                Item::Fixed(ins) => ins.clone(),
                Item::Branch { op, regs, label } => match opcode_info(*op).format {
                    Format::F10t => Instruction::f10t(*op, off(label)),
                    Format::F20t => Instruction::f20t(*op, off(label)),
                    Format::F30t => Instruction::f30t(*op, off(label)),
                    Format::F21t => Instruction::f21t(*op, regs[0], off(label)),
                    Format::F22t => Instruction::f22t(*op, regs[0], regs[1], off(label)),
                    f => panic!("branch helper used with non-branch format {f:?}"),
                },
                Item::TableRef { op, reg, label } => Instruction::f31t(*op, *reg, off(label)),
                Item::PackedTable { first_key, targets } => {
                    let owner = owner_of[&here];
                    let rel: Vec<i32> = targets
                        .iter()
                        .map(|t| labels[t.as_str()] as i32 - owner as i32)
                        .collect();
                    Instruction::raw_table(crate::isa::packed_switch_table(*first_key, &rel))
                }
                Item::SparseTable { cases } => {
                    let owner = owner_of[&here];
                    let rel: Vec<(i32, i32)> = cases
                        .iter()
                        .map(|(k, t)| (*k, labels[t.as_str()] as i32 - owner as i32))
                        .collect();
                    Instruction::raw_table(crate::isa::sparse_switch_table(&rel))
                }
                Item::FillTable { width, data } => {
                    Instruction::raw_table(crate::isa::fill_array_table(*width, data))
                }
            };
            instrs.push(ins);
        }

        crate::isa::normalize_addresses(&mut instrs);
        let units = encode(&instrs).expect("fixture instructions encode cleanly");
        (units, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_and_backward_labels_resolve() {
        let mut a = Asm::new();
        a.i(Instruction::f11n(0x12, 0, 0)); // const/4 v0, #0
        a.label("loop");
        a.i(Instruction::f22b(0xd8, 0, 0, 1)); // add-int/lit8 v0, v0, #1
        a.branch(0x3d, &[0], "out"); // if-lez v0, :out
        a.goto("loop");
        a.label("out");
        a.i(Instruction::f11x(0x0f, 0)); // return v0
        let (units, labels) = a.assemble();
        assert_eq!(labels["loop"], 1);
        // const(1) + add(2) + if(2) + goto/16(2) => out at 7
        assert_eq!(labels["out"], 7);
        let decoded = crate::isa::decode_stream(&units).unwrap();
        assert_eq!(decoded.last().unwrap().address, 7);
    }

    #[test]
    fn tables_align_and_attach() {
        let mut a = Asm::new();
        a.packed_switch(0, "table"); // 3 units
        a.i(Instruction::f10x(0x0e)); // return-void at 3 (odd -> table pads)
        a.label("c0");
        a.i(Instruction::f10x(0x0e));
        a.packed_table("table", 7, &["c0"]);
        let (units, labels) = a.assemble();
        assert_eq!(labels["table"] % 2, 0);
        let decoded = crate::isa::decode_stream(&units).unwrap();
        match &decoded[0].payload {
            Some(crate::isa::Payload::PackedSwitch { first_key, targets }) => {
                assert_eq!(*first_key, 7);
                assert_eq!(targets, &vec![labels["c0"]]);
            }
            other => panic!("expected attached packed payload, got {other:?}"),
        }
    }
}
