//! Instruction encoder, the decoder's exact inverse. Exists as test support
//! for fixture generation; every field is range-checked so malformed
//! instructions fail loudly instead of producing corrupt streams.

use super::*;

pub fn encode(instrs: &[Instruction]) -> Result<Vec<u16>, IsaError> {
    let mut out = Vec::new();
    for ins in instrs {
        encode_one(ins, &mut out)?;
    }
    Ok(out)
}

fn encode_one(ins: &Instruction, out: &mut Vec<u16>) -> Result<(), IsaError> {
    if let Some(Payload::RawTable(units)) = &ins.payload {
        out.extend_from_slice(units);
        return Ok(());
    }

    let info = ins.info();
    let m = info.mnemonic;

    let overflow = |field: &'static str, value: i64| IsaError::FieldOverflow {
        mnemonic: m,
        field,
        value,
    };

    let reg = |i: usize| -> u16 { ins.registers.get(i).copied().unwrap_or(0) };
    let reg4 = |i: usize| -> Result<u16, IsaError> {
        let r = reg(i);
        if r > 0x0F {
            return Err(overflow("register", r as i64));
        }
        Ok(r)
    };
    let reg8 = |i: usize| -> Result<u16, IsaError> {
        let r = reg(i);
        if r > 0xFF {
            return Err(overflow("register", r as i64));
        }
        Ok(r)
    };
    let lit = || ins.literal.unwrap_or(0);
    let off = || ins.branch_offset.unwrap_or(0) as i64;
    let pool = |field: &'static str| -> Result<u32, IsaError> {
        ins.pool_index
            .map(|(_, i)| i)
            .ok_or(overflow(field, -1))
    };

    let op = info.value as u16;
    match info.format {
        Format::F00x => {
            return Err(IsaError::UnknownOpcode {
                opcode: info.value,
                address: ins.address,
            })
        }
        Format::F10x => out.push(op),
        Format::F12x => out.push(op | (reg4(0)? << 8) | (reg4(1)? << 12)),
        Format::F11n => {
            let v = lit();
            if !(-8..=7).contains(&v) {
                return Err(overflow("literal", v));
            }
            out.push(op | (reg4(0)? << 8) | (((v as u16) & 0xF) << 12));
        }
        Format::F11x => out.push(op | (reg8(0)? << 8)),
        Format::F10t => {
            let v = off();
            if !(i8::MIN as i64..=i8::MAX as i64).contains(&v) {
                return Err(overflow("offset", v));
            }
            out.push(op | (((v as u8) as u16) << 8));
        }
        Format::F20t => {
            let v = off();
            if !(i16::MIN as i64..=i16::MAX as i64).contains(&v) {
                return Err(overflow("offset", v));
            }
            out.push(op);
            out.push(v as i16 as u16);
        }
        Format::F22x => {
            out.push(op | (reg8(0)? << 8));
            out.push(reg(1));
        }
        Format::F21t => {
            let v = off();
            if !(i16::MIN as i64..=i16::MAX as i64).contains(&v) {
                return Err(overflow("offset", v));
            }
            out.push(op | (reg8(0)? << 8));
            out.push(v as i16 as u16);
        }
        Format::F21s => {
            let v = lit();
            if !(i16::MIN as i64..=i16::MAX as i64).contains(&v) {
                return Err(overflow("literal", v));
            }
            out.push(op | (reg8(0)? << 8));
            out.push(v as i16 as u16);
        }
        Format::F21h => {
            let v = lit();
            let b = if info.value == 0x15 {
                if v as i32 as i64 != v || v & 0xFFFF != 0 {
                    return Err(overflow("literal", v));
                }
                ((v as u32) >> 16) as u16
            } else {
                if v & 0x0000_FFFF_FFFF_FFFF != 0 {
                    return Err(overflow("literal", v));
                }
                ((v as u64) >> 48) as u16
            };
            out.push(op | (reg8(0)? << 8));
            out.push(b);
        }
        Format::F21c => {
            let idx = pool("pool index")?;
            if idx > 0xFFFF {
                return Err(overflow("pool index", idx as i64));
            }
            out.push(op | (reg8(0)? << 8));
            out.push(idx as u16);
        }
        Format::F23x => {
            out.push(op | (reg8(0)? << 8));
            out.push(reg8(1)? | (reg8(2)? << 8));
        }
        Format::F22b => {
            let v = lit();
            if !(i8::MIN as i64..=i8::MAX as i64).contains(&v) {
                return Err(overflow("literal", v));
            }
            out.push(op | (reg8(0)? << 8));
            out.push(reg8(1)? | (((v as u8) as u16) << 8));
        }
        Format::F22t => {
            let v = off();
            if !(i16::MIN as i64..=i16::MAX as i64).contains(&v) {
                return Err(overflow("offset", v));
            }
            out.push(op | (reg4(0)? << 8) | (reg4(1)? << 12));
            out.push(v as i16 as u16);
        }
        Format::F22s => {
            let v = lit();
            if !(i16::MIN as i64..=i16::MAX as i64).contains(&v) {
                return Err(overflow("literal", v));
            }
            out.push(op | (reg4(0)? << 8) | (reg4(1)? << 12));
            out.push(v as i16 as u16);
        }
        Format::F22c => {
            let idx = pool("pool index")?;
            if idx > 0xFFFF {
                return Err(overflow("pool index", idx as i64));
            }
            out.push(op | (reg4(0)? << 8) | (reg4(1)? << 12));
            out.push(idx as u16);
        }
        Format::F30t => {
            let v = off() as i32 as u32;
            out.push(op);
            out.push(v as u16);
            out.push((v >> 16) as u16);
        }
        Format::F32x => {
            out.push(op);
            out.push(reg(0));
            out.push(reg(1));
        }
        Format::F31i => {
            let v = lit();
            if v as i32 as i64 != v {
                return Err(overflow("literal", v));
            }
            let u = v as i32 as u32;
            out.push(op | (reg8(0)? << 8));
            out.push(u as u16);
            out.push((u >> 16) as u16);
        }
        Format::F31t => {
            let v = off() as i32 as u32;
            out.push(op | (reg8(0)? << 8));
            out.push(v as u16);
            out.push((v >> 16) as u16);
        }
        Format::F31c => {
            let idx = pool("pool index")?;
            out.push(op | (reg8(0)? << 8));
            out.push(idx as u16);
            out.push((idx >> 16) as u16);
        }
        Format::F35c => {
            let count = ins.registers.len();
            if count > 5 {
                return Err(overflow("argument count", count as i64));
            }
            let idx = pool("pool index")?;
            if idx > 0xFFFF {
                return Err(overflow("pool index", idx as i64));
            }
            let mut nib = [0u16; 5];
            for (i, slot) in nib.iter_mut().enumerate().take(count) {
                *slot = reg4(i)?;
            }
            let g = nib[4];
            out.push(op | (g << 8) | ((count as u16) << 12));
            out.push(idx as u16);
            out.push(nib[0] | (nib[1] << 4) | (nib[2] << 8) | (nib[3] << 12));
        }
        Format::F3rc => {
            let count = ins.registers.len();
            if count > 0xFF {
                return Err(overflow("argument count", count as i64));
            }
            let idx = pool("pool index")?;
            if idx > 0xFFFF {
                return Err(overflow("pool index", idx as i64));
            }
            let first = reg(0);
            for (i, r) in ins.registers.iter().enumerate() {
                if *r as u32 != first as u32 + i as u32 {
                    return Err(overflow("register range", *r as i64));
                }
            }
            out.push(op | ((count as u16) << 8));
            out.push(idx as u16);
            out.push(first);
        }
        Format::F51l => {
            let v = lit() as u64;
            out.push(op | (reg8(0)? << 8));
            for i in 0..4 {
                out.push((v >> (16 * i)) as u16);
            }
        }
    }
    Ok(())
}

/// Builds a raw packed-switch table; `rel_targets` are relative to the
/// owning instruction's address.
pub fn packed_switch_table(first_key: i32, rel_targets: &[i32]) -> Vec<u16> {
    let mut t = vec![PACKED_SWITCH_SIGNATURE, rel_targets.len() as u16];
    push_i32(&mut t, first_key);
    for &r in rel_targets {
        push_i32(&mut t, r);
    }
    t
}

pub fn sparse_switch_table(cases: &[(i32, i32)]) -> Vec<u16> {
    let mut t = vec![SPARSE_SWITCH_SIGNATURE, cases.len() as u16];
    for &(k, _) in cases {
        push_i32(&mut t, k);
    }
    for &(_, r) in cases {
        push_i32(&mut t, r);
    }
    t
}

pub fn fill_array_table(element_width: u16, data: &[u8]) -> Vec<u16> {
    assert_eq!(data.len() % element_width as usize, 0);
    let count = (data.len() / element_width as usize) as u32;
    let mut t = vec![FILL_ARRAY_SIGNATURE, element_width];
    t.push(count as u16);
    t.push((count >> 16) as u16);
    let mut it = data.chunks(2);
    for chunk in &mut it {
        let lo = chunk[0] as u16;
        let hi = chunk.get(1).copied().unwrap_or(0) as u16;
        t.push(lo | (hi << 8));
    }
    t
}

fn push_i32(out: &mut Vec<u16>, v: i32) {
    out.push(v as u32 as u16);
    out.push(((v as u32) >> 16) as u16);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn const4_encodes_to_single_unit() {
        let units = encode(&[Instruction::f11n(0x12, 0, 0)]).unwrap();
        assert_eq!(units, vec![0x0012]);
    }

    #[test]
    fn const4_register_overflow() {
        let err = encode(&[Instruction::f11n(0x12, 16, 0)]).unwrap_err();
        assert!(matches!(err, IsaError::FieldOverflow { field: "register", .. }));
    }

    #[test]
    fn empty_roundtrip() {
        assert_eq!(encode(&[]).unwrap(), Vec::<u16>::new());
        assert_eq!(decode_stream(&[]).unwrap(), Vec::new());
    }

    #[test]
    fn high16_literal_must_have_clear_low_bits() {
        let ok = encode(&[Instruction::f21h(0x15, 0, 0x3F80_0000u32 as i32 as i64)]).unwrap();
        assert_eq!(ok, vec![0x0015, 0x3F80]);
        let err = encode(&[Instruction::f21h(0x15, 0, 0x3F80_0001u32 as i32 as i64)]);
        assert!(err.is_err());
    }

    #[test]
    fn range_registers_must_be_consecutive() {
        let mut ins = Instruction::f3rc(0x74, 4, 3, crate::dex::PoolKind::Method, 0);
        ins.registers = vec![4, 5, 7];
        assert!(encode(&[ins]).is_err());
    }
}
