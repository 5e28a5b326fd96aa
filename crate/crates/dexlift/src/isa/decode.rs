//! Instruction-stream decoder. A first pass walks the unit array producing
//! one structured instruction per opcode (payload tables become pseudo
//! instructions); a second pass attaches each table to its owning
//! `fill-array-data` / `packed-switch` / `sparse-switch` instruction with
//! targets converted to absolute code-unit addresses.

use std::collections::HashMap;

use super::*;

struct Units<'a> {
    units: &'a [u16],
    pos: usize,
    start: u32,
}

impl<'a> Units<'a> {
    fn next(&mut self) -> Result<u16, IsaError> {
        let u = *self
            .units
            .get(self.pos)
            .ok_or(IsaError::TruncatedInstruction { address: self.start })?;
        self.pos += 1;
        Ok(u)
    }

    fn next_i32(&mut self) -> Result<i32, IsaError> {
        let lo = self.next()? as u32;
        let hi = self.next()? as u32;
        Ok((lo | (hi << 16)) as i32)
    }
}

pub fn decode_stream(units: &[u16]) -> Result<Vec<Instruction>, IsaError> {
    let mut out = Vec::new();
    let mut cursor = Units {
        units,
        pos: 0,
        start: 0,
    };

    while cursor.pos < units.len() {
        let address = cursor.pos as u32;
        cursor.start = address;
        let unit0 = cursor.next()?;
        let opcode = (unit0 & 0xFF) as u8;

        if opcode == 0x00 && unit0 != 0x0000 {
            let table = decode_raw_table(unit0, &mut cursor, address)?;
            let mut ins = Instruction::raw_table(table);
            ins.address = address;
            out.push(ins);
            continue;
        }

        let info = opcode_info(opcode);
        match info.kind {
            OpKind::Odex => {
                return Err(IsaError::UnsupportedOpcode {
                    opcode,
                    mnemonic: info.mnemonic,
                    address,
                })
            }
            OpKind::Unused => return Err(IsaError::UnknownOpcode { opcode, address }),
            OpKind::Normal => {}
        }

        let ins = decode_one(info, unit0, &mut cursor, address)?;
        out.push(ins);
    }

    attach_payloads(&mut out)?;
    Ok(out)
}

fn decode_one(
    info: &'static OpcodeInfo,
    unit0: u16,
    cursor: &mut Units<'_>,
    address: u32,
) -> Result<Instruction, IsaError> {
    let hi = unit0 >> 8; // AA or B|A depending on format
    let a4 = hi & 0x0F;
    let b4 = hi >> 4;

    let mut ins = Instruction {
        opcode: info.value,
        registers: Vec::new(),
        literal: None,
        branch_offset: None,
        pool_index: None,
        address,
        width: info.format.width(),
        payload: None,
    };

    match info.format {
        Format::F00x => unreachable!("F00x never reaches decode_one"),
        Format::F10x => {}
        Format::F12x => ins.registers = vec![a4, b4],
        Format::F11n => {
            ins.registers = vec![a4];
            // sign-extend the 4-bit literal
            ins.literal = Some((((b4 << 4) as u8 as i8) >> 4) as i64);
        }
        Format::F11x => ins.registers = vec![hi],
        Format::F10t => ins.branch_offset = Some((hi as u8 as i8) as i32),
        Format::F20t => ins.branch_offset = Some(cursor.next()? as i16 as i32),
        Format::F22x => {
            let b = cursor.next()?;
            ins.registers = vec![hi, b];
        }
        Format::F21t => {
            ins.registers = vec![hi];
            ins.branch_offset = Some(cursor.next()? as i16 as i32);
        }
        Format::F21s => {
            ins.registers = vec![hi];
            ins.literal = Some(cursor.next()? as i16 as i64);
        }
        Format::F21h => {
            ins.registers = vec![hi];
            let b = cursor.next()? as u64;
            // Widened to the full bit pattern at decode time: const/high16
            // shifts into the upper half of 32 bits, const-wide/high16 into
            // the upper half of 64.
            let widened = if info.value == 0x15 {
                ((b << 16) as u32) as i32 as i64
            } else {
                (b << 48) as i64
            };
            ins.literal = Some(widened);
        }
        Format::F21c => {
            ins.registers = vec![hi];
            ins.pool_index = Some((info.pool.unwrap(), cursor.next()? as u32));
        }
        Format::F23x => {
            let unit1 = cursor.next()?;
            ins.registers = vec![hi, unit1 & 0xFF, unit1 >> 8];
        }
        Format::F22b => {
            let unit1 = cursor.next()?;
            ins.registers = vec![hi, unit1 & 0xFF];
            ins.literal = Some(((unit1 >> 8) as u8 as i8) as i64);
        }
        Format::F22t => {
            ins.registers = vec![a4, b4];
            ins.branch_offset = Some(cursor.next()? as i16 as i32);
        }
        Format::F22s => {
            ins.registers = vec![a4, b4];
            ins.literal = Some(cursor.next()? as i16 as i64);
        }
        Format::F22c => {
            ins.registers = vec![a4, b4];
            ins.pool_index = Some((info.pool.unwrap(), cursor.next()? as u32));
        }
        Format::F30t => ins.branch_offset = Some(cursor.next_i32()?),
        Format::F32x => {
            let a = cursor.next()?;
            let b = cursor.next()?;
            ins.registers = vec![a, b];
        }
        Format::F31i => {
            ins.registers = vec![hi];
            ins.literal = Some(cursor.next_i32()? as i64);
        }
        Format::F31t => {
            ins.registers = vec![hi];
            ins.branch_offset = Some(cursor.next_i32()?);
        }
        Format::F31c => {
            ins.registers = vec![hi];
            ins.pool_index = Some((info.pool.unwrap(), cursor.next_i32()? as u32));
        }
        Format::F35c => {
            let count = b4 as usize;
            let g = a4;
            if count > 5 {
                return Err(IsaError::MalformedPayload {
                    address,
                    reason: "35c argument count exceeds 5",
                });
            }
            let index = cursor.next()? as u32;
            let unit2 = cursor.next()?;
            let cdef = [
                unit2 & 0xF,
                (unit2 >> 4) & 0xF,
                (unit2 >> 8) & 0xF,
                (unit2 >> 12) & 0xF,
                g,
            ];
            ins.registers = cdef[..count].to_vec();
            ins.pool_index = Some((info.pool.unwrap(), index));
        }
        Format::F3rc => {
            let count = hi as u32;
            let index = cursor.next()? as u32;
            let first = cursor.next()? as u32;
            if first + count > 0x1_0000 {
                return Err(IsaError::MalformedPayload {
                    address,
                    reason: "register range runs past v65535",
                });
            }
            ins.registers = (first..first + count).map(|r| r as u16).collect();
            ins.pool_index = Some((info.pool.unwrap(), index));
        }
        Format::F51l => {
            ins.registers = vec![hi];
            let mut v = 0u64;
            for i in 0..4 {
                v |= (cursor.next()? as u64) << (16 * i);
            }
            ins.literal = Some(v as i64);
        }
    }
    Ok(ins)
}

fn decode_raw_table(unit0: u16, cursor: &mut Units<'_>, address: u32) -> Result<Vec<u16>, IsaError> {
    let mut table = vec![unit0];
    let body_units = match unit0 {
        PACKED_SWITCH_SIGNATURE => {
            let size = cursor.next()?;
            table.push(size);
            2 + size as usize * 2 // first_key + targets
        }
        SPARSE_SWITCH_SIGNATURE => {
            let size = cursor.next()?;
            table.push(size);
            size as usize * 4 // keys + targets
        }
        FILL_ARRAY_SIGNATURE => {
            let width = cursor.next()?;
            table.push(width);
            let lo = cursor.next()?;
            let hi = cursor.next()?;
            table.push(lo);
            table.push(hi);
            let count = lo as u32 | ((hi as u32) << 16);
            if !matches!(width, 1 | 2 | 4 | 8) {
                return Err(IsaError::MalformedPayload {
                    address,
                    reason: "fill-array element width must be 1, 2, 4 or 8",
                });
            }
            ((count as u64 * width as u64).div_ceil(2)) as usize
        }
        _ => {
            return Err(IsaError::UnknownOpcode {
                opcode: 0x00,
                address,
            })
        }
    };
    for _ in 0..body_units {
        let u = cursor.next()?;
        table.push(u);
    }
    Ok(table)
}

/// Parses a raw payload table into its structured form, with branch targets
/// made absolute against the owning instruction's address.
fn structure_table(
    table: &[u16],
    owner_address: u32,
    table_address: u32,
) -> Result<Payload, IsaError> {
    let abs = |rel: i32| -> u32 { owner_address.wrapping_add_signed(rel) };
    let read_i32 = |i: usize| -> i32 { (table[i] as u32 | ((table[i + 1] as u32) << 16)) as i32 };
    match table[0] {
        PACKED_SWITCH_SIGNATURE => {
            let size = table[1] as usize;
            let first_key = read_i32(2);
            let mut targets = Vec::with_capacity(size);
            for i in 0..size {
                targets.push(abs(read_i32(4 + i * 2)));
            }
            Ok(Payload::PackedSwitch { first_key, targets })
        }
        SPARSE_SWITCH_SIGNATURE => {
            let size = table[1] as usize;
            let mut cases = Vec::with_capacity(size);
            for i in 0..size {
                let key = read_i32(2 + i * 2);
                let target = abs(read_i32(2 + size * 2 + i * 2));
                cases.push((key, target));
            }
            if cases.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(IsaError::MalformedPayload {
                    address: table_address,
                    reason: "sparse-switch keys are not strictly increasing",
                });
            }
            Ok(Payload::SparseSwitch { cases })
        }
        FILL_ARRAY_SIGNATURE => {
            let element_width = table[1];
            let count = table[2] as u32 | ((table[3] as u32) << 16);
            let byte_len = (count as usize) * element_width as usize;
            let mut data = Vec::with_capacity(byte_len);
            for i in 0..byte_len {
                let unit = table[4 + i / 2];
                data.push(if i % 2 == 0 { unit as u8 } else { (unit >> 8) as u8 });
            }
            Ok(Payload::FillArray {
                element_width,
                data,
            })
        }
        _ => unreachable!("raw tables always start with a payload signature"),
    }
}

fn attach_payloads(instrs: &mut [Instruction]) -> Result<(), IsaError> {
    let mut tables: HashMap<u32, (usize, u16)> = HashMap::new();
    for (i, ins) in instrs.iter().enumerate() {
        if let Some(Payload::RawTable(units)) = &ins.payload {
            tables.insert(ins.address, (i, units[0]));
        }
    }

    let mut attach: Vec<(usize, Payload)> = Vec::new();
    for (i, ins) in instrs.iter().enumerate() {
        let wanted = match ins.opcode {
            0x26 => FILL_ARRAY_SIGNATURE,
            0x2b => PACKED_SWITCH_SIGNATURE,
            0x2c => SPARSE_SWITCH_SIGNATURE,
            _ => continue,
        };
        let target = ins
            .address
            .wrapping_add_signed(ins.branch_offset.expect("31t carries an offset"));
        let (ti, signature) = *tables.get(&target).ok_or(IsaError::MalformedPayload {
            address: ins.address,
            reason: "payload offset does not point at a payload table",
        })?;
        if signature != wanted {
            return Err(IsaError::MalformedPayload {
                address: ins.address,
                reason: "payload table kind does not match its owner",
            });
        }
        let Some(Payload::RawTable(units)) = &instrs[ti].payload else {
            unreachable!()
        };
        attach.push((i, structure_table(units, ins.address, target)?));
    }
    for (i, payload) in attach {
        instrs[i].payload = Some(payload);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn const4_decodes_to_move_group() {
        // const/4 v0, #0 encodes as a single 0x0012 unit.
        let instrs = decode_stream(&[0x0012]).unwrap();
        assert_eq!(instrs.len(), 1);
        let i = &instrs[0];
        assert_eq!(i.mnemonic(), "const/4");
        assert_eq!(i.registers, vec![0]);
        assert_eq!(i.literal, Some(0));
        assert_eq!(i.address, 0);
        assert_eq!(i.width, 1);
    }

    #[test]
    fn if_eqz_offset_is_signed_units() {
        let instrs = decode_stream(&[0x0038, 0x0008]).unwrap();
        assert_eq!(instrs[0].mnemonic(), "if-eqz");
        assert_eq!(instrs[0].registers, vec![0]);
        assert_eq!(instrs[0].branch_offset, Some(8));
    }

    #[test]
    fn return_void_single_unit() {
        let instrs = decode_stream(&[0x000E]).unwrap();
        assert_eq!(instrs[0].mnemonic(), "return-void");
        assert_eq!(instrs[0].width, 1);
    }

    #[test]
    fn odex_opcode_is_structured_error() {
        // iget-quick at the second instruction slot.
        let err = decode_stream(&[0x000E, 0x00F2, 0x0000]).unwrap_err();
        assert_eq!(
            err,
            IsaError::UnsupportedOpcode {
                opcode: 0xF2,
                mnemonic: "iget-quick",
                address: 1
            }
        );
    }

    #[test]
    fn unused_opcode_is_unknown() {
        let err = decode_stream(&[0x003E]).unwrap_err();
        assert_eq!(
            err,
            IsaError::UnknownOpcode {
                opcode: 0x3E,
                address: 0
            }
        );
    }

    #[test]
    fn truncated_wide_instruction() {
        // `const` (31i) needs three units.
        let err = decode_stream(&[0x0014, 0x1234]).unwrap_err();
        assert!(matches!(err, IsaError::TruncatedInstruction { address: 0 }));
    }

    #[test]
    fn addresses_chain_by_width() {
        // const/16 v0, #5 (2 units); nop (1); goto +1 (1)
        let instrs = decode_stream(&[0x0013, 5, 0x0000, 0x0128]).unwrap();
        let addrs: Vec<u32> = instrs.iter().map(|i| i.address).collect();
        assert_eq!(addrs, vec![0, 2, 3]);
    }

    #[test]
    fn packed_switch_payload_attaches_absolute_targets() {
        // 0000: packed-switch v0, +4  (3 units)
        // 0003: return-void
        // 0004: payload: size=2, first_key=7, targets +8, +16 (relative)
        let units = vec![
            0x002b, 0x0004, 0x0000, // packed-switch v0, payload at 0x0004
            0x000e, // return-void
            0x0100, 0x0002, 0x0007, 0x0000, // signature, size, first_key
            0x0008, 0x0000, 0x0010, 0x0000, // targets
        ];
        let instrs = decode_stream(&units).unwrap();
        assert_eq!(instrs.len(), 3);
        match &instrs[0].payload {
            Some(Payload::PackedSwitch { first_key, targets }) => {
                assert_eq!(*first_key, 7);
                assert_eq!(targets, &vec![8, 16]);
            }
            other => panic!("expected packed switch payload, got {other:?}"),
        }
        assert!(instrs[2].is_payload_table());
        assert_eq!(instrs[2].width, 8);
    }

    #[test]
    fn sparse_keys_must_increase() {
        let units = vec![
            0x002c, 0x0003, 0x0000, // sparse-switch v0, payload at 3
            0x0200, 0x0002, // signature, size
            0x0005, 0x0000, 0x0001, 0x0000, // keys 5, 1 (out of order)
            0x0008, 0x0000, 0x0010, 0x0000, // targets
        ];
        let err = decode_stream(&units).unwrap_err();
        assert!(matches!(err, IsaError::MalformedPayload { .. }));
    }
}
