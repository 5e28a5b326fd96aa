use super::*;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> Reader<'a> {
    fn at(bytes: &'a [u8], offset: u32, what: &'static str) -> Self {
        Reader {
            bytes,
            pos: offset as usize,
            what,
        }
    }

    fn err(&self) -> DexError {
        DexError::Truncated {
            what: self.what,
            offset: self.pos as u32,
        }
    }

    fn u8(&mut self) -> Result<u8, DexError> {
        let b = *self.bytes.get(self.pos).ok_or_else(|| self.err())?;
        self.pos += 1;
        Ok(b)
    }

    fn u16(&mut self) -> Result<u16, DexError> {
        Ok(self.u8()? as u16 | (self.u8()? as u16) << 8)
    }

    fn u32(&mut self) -> Result<u32, DexError> {
        Ok(self.u16()? as u32 | (self.u16()? as u32) << 16)
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8], DexError> {
        let end = self.pos.checked_add(n).ok_or_else(|| self.err())?;
        let s = self.bytes.get(self.pos..end).ok_or_else(|| self.err())?;
        self.pos = end;
        Ok(s)
    }

    fn uleb128(&mut self) -> Result<u32, DexError> {
        let mut value = 0u32;
        for shift in (0..).step_by(7) {
            if shift >= 35 {
                return Err(DexError::Malformed {
                    what: "uleb128",
                    offset: self.pos as u32,
                });
            }
            let b = self.u8()?;
            value |= ((b & 0x7F) as u32) << shift;
            if b & 0x80 == 0 {
                break;
            }
        }
        Ok(value)
    }

    fn sleb128(&mut self) -> Result<i32, DexError> {
        let mut value = 0i32;
        let mut shift = 0;
        loop {
            if shift >= 35 {
                return Err(DexError::Malformed {
                    what: "sleb128",
                    offset: self.pos as u32,
                });
            }
            let b = self.u8()?;
            value |= ((b & 0x7F) as i32) << shift;
            shift += 7;
            if b & 0x80 == 0 {
                if shift < 32 && b & 0x40 != 0 {
                    value |= -1i32 << shift;
                }
                break;
            }
        }
        Ok(value)
    }
}

fn check_range(file_size: u32, offset: u32, len: u64, what: &'static str) -> Result<(), DexError> {
    if offset as u64 + len > file_size as u64 {
        return Err(DexError::Truncated { what, offset });
    }
    Ok(())
}

pub(super) fn parse(bytes: &[u8]) -> Result<DexFile, DexError> {
    let header = parse_header(bytes)?;

    let strings = parse_strings(bytes, &header)?;
    let types = parse_types(bytes, &header, &strings)?;
    let protos = parse_protos(bytes, &header, &strings, &types)?;
    let fields = parse_fields(bytes, &header, &strings, &types)?;
    let methods = parse_methods(bytes, &header, &strings, &types, &protos)?;
    let classes = parse_classes(bytes, &header, &strings, &types, &fields, &methods)?;

    Ok(DexFile {
        header,
        strings,
        types,
        protos,
        fields,
        methods,
        classes,
    })
}

fn parse_header(bytes: &[u8]) -> Result<DexHeader, DexError> {
    if bytes.len() < HEADER_SIZE as usize {
        // Too short even to read the magic reliably.
        if bytes.len() < 8 {
            return Err(DexError::Truncated {
                what: "header",
                offset: bytes.len() as u32,
            });
        }
        let mut found = [0u8; 8];
        found.copy_from_slice(&bytes[..8]);
        if found != DEX_MAGIC_035 {
            return Err(DexError::BadMagic { found });
        }
        return Err(DexError::Truncated {
            what: "header",
            offset: bytes.len() as u32,
        });
    }

    let mut r = Reader::at(bytes, 0, "header");
    let mut magic = [0u8; 8];
    magic.copy_from_slice(r.bytes(8)?);
    if magic != DEX_MAGIC_035 {
        return Err(DexError::BadMagic { found: magic });
    }
    let checksum = r.u32()?;
    let mut signature = [0u8; 20];
    signature.copy_from_slice(r.bytes(20)?);
    let file_size = r.u32()?;
    let header_size = r.u32()?;
    let endian_tag = r.u32()?;
    if endian_tag != ENDIAN_CONSTANT {
        return Err(DexError::BadEndianTag(endian_tag));
    }
    if header_size != HEADER_SIZE {
        return Err(DexError::Malformed {
            what: "header_size",
            offset: 36,
        });
    }
    if file_size as usize != bytes.len() {
        return Err(DexError::Malformed {
            what: "file_size",
            offset: 32,
        });
    }
    let link_size = r.u32()?;
    let link_off = r.u32()?;
    let map_off = r.u32()?;
    let mut section = |what| -> Result<Section, DexError> {
        let count = r.u32()?;
        let offset = r.u32()?;
        let _ = what;
        Ok(Section { count, offset })
    };
    let string_ids = section("string_ids")?;
    let type_ids = section("type_ids")?;
    let proto_ids = section("proto_ids")?;
    let field_ids = section("field_ids")?;
    let method_ids = section("method_ids")?;
    let class_defs = section("class_defs")?;
    let data = section("data")?;

    check_range(file_size, string_ids.offset, string_ids.count as u64 * 4, "string_ids")?;
    check_range(file_size, type_ids.offset, type_ids.count as u64 * 4, "type_ids")?;
    check_range(file_size, proto_ids.offset, proto_ids.count as u64 * 12, "proto_ids")?;
    check_range(file_size, field_ids.offset, field_ids.count as u64 * 8, "field_ids")?;
    check_range(file_size, method_ids.offset, method_ids.count as u64 * 8, "method_ids")?;
    check_range(file_size, class_defs.offset, class_defs.count as u64 * 32, "class_defs")?;
    check_range(file_size, data.offset, data.count as u64, "data")?;

    Ok(DexHeader {
        magic,
        checksum,
        signature,
        file_size,
        header_size,
        endian_tag,
        link_size,
        link_off,
        map_off,
        string_ids,
        type_ids,
        proto_ids,
        field_ids,
        method_ids,
        class_defs,
        data,
    })
}

fn parse_strings(bytes: &[u8], h: &DexHeader) -> Result<Vec<String>, DexError> {
    let mut out = Vec::with_capacity(h.string_ids.count as usize);
    for i in 0..h.string_ids.count {
        let mut r = Reader::at(bytes, h.string_ids.offset + i * 4, "string_id");
        let data_off = r.u32()?;
        check_range(h.file_size, data_off, 1, "string_data")?;
        let mut d = Reader::at(bytes, data_off, "string_data");
        let utf16_len = d.uleb128()?;
        let (s, _) = mutf8::decode(&bytes[d.pos..], utf16_len).map_err(|source| {
            DexError::BadString {
                offset: d.pos as u32,
                source,
            }
        })?;
        out.push(s);
    }
    Ok(out)
}

fn string_at(strings: &[String], idx: u32) -> Result<String, DexError> {
    strings
        .get(idx as usize)
        .cloned()
        .ok_or(DexError::BadIndex {
            pool: PoolKind::String,
            index: idx,
            len: strings.len() as u32,
        })
}

fn type_at(types: &[String], idx: u32) -> Result<String, DexError> {
    types.get(idx as usize).cloned().ok_or(DexError::BadIndex {
        pool: PoolKind::Type,
        index: idx,
        len: types.len() as u32,
    })
}

fn parse_types(bytes: &[u8], h: &DexHeader, strings: &[String]) -> Result<Vec<String>, DexError> {
    let mut out = Vec::with_capacity(h.type_ids.count as usize);
    for i in 0..h.type_ids.count {
        let mut r = Reader::at(bytes, h.type_ids.offset + i * 4, "type_id");
        out.push(string_at(strings, r.u32()?)?);
    }
    Ok(out)
}

fn parse_type_list(bytes: &[u8], h: &DexHeader, types: &[String], off: u32) -> Result<Vec<String>, DexError> {
    if off == 0 {
        return Ok(Vec::new());
    }
    check_range(h.file_size, off, 4, "type_list")?;
    let mut r = Reader::at(bytes, off, "type_list");
    let size = r.u32()?;
    check_range(h.file_size, off + 4, size as u64 * 2, "type_list")?;
    let mut out = Vec::with_capacity(size as usize);
    for _ in 0..size {
        out.push(type_at(types, r.u16()? as u32)?);
    }
    Ok(out)
}

fn parse_protos(
    bytes: &[u8],
    h: &DexHeader,
    strings: &[String],
    types: &[String],
) -> Result<Vec<Proto>, DexError> {
    let mut out = Vec::with_capacity(h.proto_ids.count as usize);
    for i in 0..h.proto_ids.count {
        let mut r = Reader::at(bytes, h.proto_ids.offset + i * 12, "proto_id");
        let shorty_idx = r.u32()?;
        let return_type_idx = r.u32()?;
        let parameters_off = r.u32()?;
        string_at(strings, shorty_idx)?;
        out.push(Proto {
            return_type: type_at(types, return_type_idx)?,
            params: parse_type_list(bytes, h, types, parameters_off)?,
        });
    }
    Ok(out)
}

fn parse_fields(
    bytes: &[u8],
    h: &DexHeader,
    strings: &[String],
    types: &[String],
) -> Result<Vec<FieldRef>, DexError> {
    let mut out = Vec::with_capacity(h.field_ids.count as usize);
    for i in 0..h.field_ids.count {
        let mut r = Reader::at(bytes, h.field_ids.offset + i * 8, "field_id");
        let class_idx = r.u16()? as u32;
        let type_idx = r.u16()? as u32;
        let name_idx = r.u32()?;
        out.push(FieldRef {
            owner: type_at(types, class_idx)?,
            name: string_at(strings, name_idx)?,
            descriptor: type_at(types, type_idx)?,
        });
    }
    Ok(out)
}

fn parse_methods(
    bytes: &[u8],
    h: &DexHeader,
    strings: &[String],
    types: &[String],
    protos: &[Proto],
) -> Result<Vec<MethodRef>, DexError> {
    let mut out = Vec::with_capacity(h.method_ids.count as usize);
    for i in 0..h.method_ids.count {
        let mut r = Reader::at(bytes, h.method_ids.offset + i * 8, "method_id");
        let class_idx = r.u16()? as u32;
        let proto_idx = r.u16()? as u32;
        let name_idx = r.u32()?;
        let proto = protos
            .get(proto_idx as usize)
            .cloned()
            .ok_or(DexError::BadIndex {
                pool: PoolKind::Proto,
                index: proto_idx,
                len: protos.len() as u32,
            })?;
        out.push(MethodRef {
            owner: type_at(types, class_idx)?,
            name: string_at(strings, name_idx)?,
            proto,
        });
    }
    Ok(out)
}

fn parse_classes(
    bytes: &[u8],
    h: &DexHeader,
    strings: &[String],
    types: &[String],
    fields: &[FieldRef],
    methods: &[MethodRef],
) -> Result<Vec<ClassDef>, DexError> {
    let mut out = Vec::with_capacity(h.class_defs.count as usize);
    for i in 0..h.class_defs.count {
        let mut r = Reader::at(bytes, h.class_defs.offset + i * 32, "class_def");
        let class_idx = r.u32()?;
        let access_flags = r.u32()?;
        let superclass_idx = r.u32()?;
        let interfaces_off = r.u32()?;
        let source_file_idx = r.u32()?;
        let annotations_off = r.u32()?;
        let class_data_off = r.u32()?;
        let static_values_off = r.u32()?;

        let descriptor = type_at(types, class_idx)?;
        let superclass = if superclass_idx == NO_INDEX {
            None
        } else {
            Some(type_at(types, superclass_idx)?)
        };
        let interfaces = parse_type_list(bytes, h, types, interfaces_off)?;
        let source_file = if source_file_idx == NO_INDEX {
            None
        } else {
            Some(string_at(strings, source_file_idx)?)
        };

        let mut class = ClassDef {
            descriptor,
            access_flags,
            superclass,
            interfaces,
            source_file,
            annotations_off: (annotations_off != 0).then_some(annotations_off),
            static_values_off: (static_values_off != 0).then_some(static_values_off),
            static_fields: Vec::new(),
            instance_fields: Vec::new(),
            direct_methods: Vec::new(),
            virtual_methods: Vec::new(),
        };

        if class_data_off != 0 {
            check_range(h.file_size, class_data_off, 4, "class_data")?;
            let mut d = Reader::at(bytes, class_data_off, "class_data");
            let static_fields_size = d.uleb128()?;
            let instance_fields_size = d.uleb128()?;
            let direct_methods_size = d.uleb128()?;
            let virtual_methods_size = d.uleb128()?;
            class.static_fields = parse_encoded_fields(&mut d, fields, static_fields_size)?;
            class.instance_fields = parse_encoded_fields(&mut d, fields, instance_fields_size)?;
            class.direct_methods =
                parse_encoded_methods(bytes, h, &mut d, types, methods, direct_methods_size)?;
            class.virtual_methods =
                parse_encoded_methods(bytes, h, &mut d, types, methods, virtual_methods_size)?;
        }
        out.push(class);
    }
    Ok(out)
}

fn parse_encoded_fields(
    d: &mut Reader<'_>,
    fields: &[FieldRef],
    count: u32,
) -> Result<Vec<FieldDef>, DexError> {
    let mut out = Vec::with_capacity(count as usize);
    let mut field_idx = 0u32;
    for i in 0..count {
        let diff = d.uleb128()?;
        field_idx = if i == 0 { diff } else { field_idx + diff };
        let access_flags = d.uleb128()?;
        let field = fields
            .get(field_idx as usize)
            .cloned()
            .ok_or(DexError::BadIndex {
                pool: PoolKind::Field,
                index: field_idx,
                len: fields.len() as u32,
            })?;
        out.push(FieldDef {
            field_idx,
            field,
            access_flags,
        });
    }
    Ok(out)
}

fn parse_encoded_methods(
    bytes: &[u8],
    h: &DexHeader,
    d: &mut Reader<'_>,
    types: &[String],
    methods: &[MethodRef],
    count: u32,
) -> Result<Vec<MethodDef>, DexError> {
    let mut out = Vec::with_capacity(count as usize);
    let mut method_idx = 0u32;
    for i in 0..count {
        let diff = d.uleb128()?;
        method_idx = if i == 0 { diff } else { method_idx + diff };
        let access_flags = d.uleb128()?;
        let code_off = d.uleb128()?;
        let method = methods
            .get(method_idx as usize)
            .cloned()
            .ok_or(DexError::BadIndex {
                pool: PoolKind::Method,
                index: method_idx,
                len: methods.len() as u32,
            })?;
        let code = if code_off == 0 {
            None
        } else {
            Some(parse_code_item(bytes, h, types, code_off)?)
        };
        out.push(MethodDef {
            method_idx,
            method,
            access_flags,
            code,
        });
    }
    Ok(out)
}

fn parse_code_item(
    bytes: &[u8],
    h: &DexHeader,
    types: &[String],
    off: u32,
) -> Result<CodeItem, DexError> {
    check_range(h.file_size, off, 16, "code_item")?;
    let mut r = Reader::at(bytes, off, "code_item");
    let registers_size = r.u16()?;
    let ins_size = r.u16()?;
    let outs_size = r.u16()?;
    let tries_size = r.u16()?;
    let debug_info_off = r.u32()?;
    let insns_size = r.u32()?;
    check_range(h.file_size, r.pos as u32, insns_size as u64 * 2, "insns")?;
    if ins_size > registers_size {
        return Err(DexError::Malformed {
            what: "ins_size exceeds registers_size",
            offset: off,
        });
    }
    let mut insns = Vec::with_capacity(insns_size as usize);
    for _ in 0..insns_size {
        insns.push(r.u16()?);
    }
    if tries_size > 0 && insns_size % 2 == 1 {
        r.u16()?; // alignment padding before try_items
    }

    let mut raw_tries = Vec::with_capacity(tries_size as usize);
    for _ in 0..tries_size {
        let start_addr = r.u32()?;
        let insn_count = r.u16()?;
        let handler_off = r.u16()?;
        if start_addr as u64 + insn_count as u64 > insns_size as u64 {
            return Err(DexError::Malformed {
                what: "try range outside insns",
                offset: off,
            });
        }
        raw_tries.push((start_addr, insn_count, handler_off));
    }

    let mut tries = Vec::with_capacity(raw_tries.len());
    if tries_size > 0 {
        let list_start = r.pos;
        let list_size = r.uleb128()?;
        // Handlers are addressed by byte offset from the start of the
        // encoded_catch_handler_list; parse them all, recording offsets.
        let mut by_off = std::collections::HashMap::new();
        for _ in 0..list_size {
            let this_off = (r.pos - list_start) as u16;
            let size = r.sleb128()?;
            let pair_count = size.unsigned_abs() as usize;
            let mut handlers = Vec::with_capacity(pair_count + 1);
            for _ in 0..pair_count {
                let type_idx = r.uleb128()?;
                let addr = r.uleb128()?;
                let exception = type_at(types, type_idx)?;
                if addr >= insns_size {
                    return Err(DexError::Malformed {
                        what: "handler address outside insns",
                        offset: off,
                    });
                }
                handlers.push(Handler {
                    exception: Some(exception),
                    target: addr,
                });
            }
            if size <= 0 {
                let addr = r.uleb128()?;
                if addr >= insns_size {
                    return Err(DexError::Malformed {
                        what: "catch-all address outside insns",
                        offset: off,
                    });
                }
                handlers.push(Handler {
                    exception: None,
                    target: addr,
                });
            }
            by_off.insert(this_off, handlers);
        }
        for (start_addr, insn_count, handler_off) in raw_tries {
            let handlers = by_off.get(&handler_off).cloned().ok_or(DexError::Malformed {
                what: "try references unknown handler",
                offset: off,
            })?;
            tries.push(TryBlock {
                start_unit: start_addr,
                unit_count: insn_count,
                handlers,
            });
        }
    }

    Ok(CodeItem {
        registers_size,
        ins_size,
        outs_size,
        insns,
        tries,
        debug_info_off: (debug_info_off != 0).then_some(debug_info_off),
    })
}

