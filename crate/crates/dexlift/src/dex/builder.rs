//! Test-support writer that assembles a valid dex-035 image from a symbolic
//! class/method description. Production output is a non-goal; this exists so
//! the test suites can generate fixtures and round-trip them through the
//! parser.
//!
//! Pools are emitted in the container's canonical sort order (strings by
//! UTF-16 code units, types by descriptor, protos by return-then-params,
//! fields and methods by owner/name/type), so code must be attached after
//! [`DexBuilder::freeze`] has pinned the indices.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{FieldRef, MethodRef, Proto, ENDIAN_CONSTANT, HEADER_SIZE, NO_INDEX};

#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub registers_size: u16,
    pub ins_size: u16,
    pub outs_size: u16,
    pub insns: Vec<u16>,
    pub tries: Vec<TrySpec>,
}

#[derive(Debug, Clone)]
pub struct TrySpec {
    pub start_unit: u32,
    pub unit_count: u16,
    /// (exception descriptor, handler address); `None` descriptor = catch-all.
    pub handlers: Vec<(Option<String>, u32)>,
}

#[derive(Debug, Clone)]
struct MethodSpec {
    name: String,
    proto: Proto,
    access_flags: u32,
    code: Option<CodeSpec>,
}

#[derive(Debug, Clone)]
struct FieldSpec {
    name: String,
    descriptor: String,
    access_flags: u32,
}

#[derive(Debug, Clone)]
struct ClassSpec {
    descriptor: String,
    superclass: Option<String>,
    access_flags: u32,
    static_fields: Vec<FieldSpec>,
    instance_fields: Vec<FieldSpec>,
    direct_methods: Vec<MethodSpec>,
    virtual_methods: Vec<MethodSpec>,
}

#[derive(Debug, Default)]
pub struct DexBuilder {
    classes: Vec<ClassSpec>,
    extra_strings: Vec<String>,
    // Pool entries referenced from code but not defined in any class here
    // (library methods, external fields).
    extern_methods: Vec<MethodRef>,
    extern_fields: Vec<FieldRef>,
    extern_types: Vec<String>,
    frozen: Option<PoolIndex>,
}

/// Sorted pools with lookups, pinned by [`DexBuilder::freeze`].
#[derive(Debug, Clone, Default)]
pub struct PoolIndex {
    strings: Vec<String>,
    types: Vec<String>,
    protos: Vec<Proto>,
    fields: Vec<FieldRef>,
    methods: Vec<MethodRef>,
}

impl PoolIndex {
    pub fn string(&self, s: &str) -> u32 {
        lookup(&self.strings, &s.to_string(), "string")
    }
    pub fn type_idx(&self, descriptor: &str) -> u32 {
        lookup(&self.types, &descriptor.to_string(), "type")
    }
    pub fn field(&self, owner: &str, name: &str, descriptor: &str) -> u32 {
        let key = FieldRef {
            owner: owner.into(),
            name: name.into(),
            descriptor: descriptor.into(),
        };
        lookup(&self.fields, &key, "field")
    }
    pub fn method(&self, owner: &str, name: &str, proto: &str) -> u32 {
        let key = MethodRef {
            owner: owner.into(),
            name: name.into(),
            proto: parse_proto(proto),
        };
        lookup(&self.methods, &key, "method")
    }
}

fn lookup<T: PartialEq + std::fmt::Debug>(pool: &[T], key: &T, what: &str) -> u32 {
    pool.iter()
        .position(|e| e == key)
        .unwrap_or_else(|| panic!("{what} {key:?} was not declared before freeze"))
        as u32
}

/// Parses a dex-style method descriptor like `(ILjava/lang/String;)V`.
pub fn parse_proto(desc: &str) -> Proto {
    let inner = desc
        .strip_prefix('(')
        .and_then(|d| d.split_once(')'))
        .unwrap_or_else(|| panic!("bad method descriptor {desc:?}"));
    let (params_s, return_type) = inner;
    let mut params = Vec::new();
    let mut rest = params_s;
    while !rest.is_empty() {
        let (one, tail) = split_descriptor(rest);
        params.push(one.to_string());
        rest = tail;
    }
    Proto {
        return_type: return_type.to_string(),
        params,
    }
}

fn split_descriptor(s: &str) -> (&str, &str) {
    let mut idx = 0;
    let b = s.as_bytes();
    while b[idx] == b'[' {
        idx += 1;
    }
    match b[idx] {
        b'L' => {
            let end = s[idx..].find(';').expect("unterminated class descriptor") + idx;
            (&s[..=end], &s[end + 1..])
        }
        _ => (&s[..=idx], &s[idx + 1..]),
    }
}

impl DexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn class(&mut self, descriptor: &str, superclass: &str, access_flags: u32) -> &mut Self {
        assert!(self.frozen.is_none(), "cannot declare after freeze");
        self.classes.push(ClassSpec {
            descriptor: descriptor.into(),
            superclass: Some(superclass.into()),
            access_flags,
            static_fields: Vec::new(),
            instance_fields: Vec::new(),
            direct_methods: Vec::new(),
            virtual_methods: Vec::new(),
        });
        self
    }

    /// Declares a method on the most recently added class. Direct = private,
    /// static or constructor; everything else goes in the virtual list.
    pub fn method(&mut self, name: &str, proto: &str, access_flags: u32, direct: bool) -> &mut Self {
        assert!(self.frozen.is_none(), "cannot declare after freeze");
        let class = self.classes.last_mut().expect("declare a class first");
        let spec = MethodSpec {
            name: name.into(),
            proto: parse_proto(proto),
            access_flags,
            code: None,
        };
        if direct {
            class.direct_methods.push(spec);
        } else {
            class.virtual_methods.push(spec);
        }
        self
    }

    pub fn field(&mut self, name: &str, descriptor: &str, access_flags: u32, is_static: bool) -> &mut Self {
        assert!(self.frozen.is_none(), "cannot declare after freeze");
        let class = self.classes.last_mut().expect("declare a class first");
        let spec = FieldSpec {
            name: name.into(),
            descriptor: descriptor.into(),
            access_flags,
        };
        if is_static {
            class.static_fields.push(spec);
        } else {
            class.instance_fields.push(spec);
        }
        self
    }

    /// Records a method that lives outside this file but is referenced by
    /// instructions (library calls, stubbed constructors).
    pub fn extern_method(&mut self, owner: &str, name: &str, proto: &str) -> &mut Self {
        assert!(self.frozen.is_none(), "cannot declare after freeze");
        self.extern_methods.push(MethodRef {
            owner: owner.into(),
            name: name.into(),
            proto: parse_proto(proto),
        });
        self
    }

    pub fn extern_field(&mut self, owner: &str, name: &str, descriptor: &str) -> &mut Self {
        assert!(self.frozen.is_none(), "cannot declare after freeze");
        self.extern_fields.push(FieldRef {
            owner: owner.into(),
            name: name.into(),
            descriptor: descriptor.into(),
        });
        self
    }

    pub fn extern_type(&mut self, descriptor: &str) -> &mut Self {
        assert!(self.frozen.is_none(), "cannot declare after freeze");
        self.extern_types.push(descriptor.into());
        self
    }

    pub fn intern_string(&mut self, s: &str) -> &mut Self {
        assert!(self.frozen.is_none(), "cannot declare after freeze");
        self.extra_strings.push(s.into());
        self
    }

    /// Computes the sorted pools; after this, declarations are rejected and
    /// pool lookups are stable.
    pub fn freeze(&mut self) -> PoolIndex {
        let mut strings: Vec<String> = Vec::new();
        let mut types: Vec<String> = Vec::new();
        let mut protos: Vec<Proto> = Vec::new();
        let mut fields: Vec<FieldRef> = Vec::new();
        let mut methods: Vec<MethodRef> = Vec::new();

        let add_type = |types: &mut Vec<String>, strings: &mut Vec<String>, d: &str| {
            push_unique(strings, d.to_string());
            push_unique(types, d.to_string());
        };

        for c in &self.classes {
            add_type(&mut types, &mut strings, &c.descriptor);
            if let Some(s) = &c.superclass {
                add_type(&mut types, &mut strings, s);
            }
            for f in c.static_fields.iter().chain(c.instance_fields.iter()) {
                push_unique(&mut strings, f.name.clone());
                add_type(&mut types, &mut strings, &f.descriptor);
                push_unique(
                    &mut fields,
                    FieldRef {
                        owner: c.descriptor.clone(),
                        name: f.name.clone(),
                        descriptor: f.descriptor.clone(),
                    },
                );
            }
            for m in c.direct_methods.iter().chain(c.virtual_methods.iter()) {
                push_unique(&mut strings, m.name.clone());
                push_unique(&mut strings, shorty(&m.proto));
                add_type(&mut types, &mut strings, &m.proto.return_type);
                for p in &m.proto.params {
                    add_type(&mut types, &mut strings, p);
                }
                push_unique(&mut protos, m.proto.clone());
                push_unique(
                    &mut methods,
                    MethodRef {
                        owner: c.descriptor.clone(),
                        name: m.name.clone(),
                        proto: m.proto.clone(),
                    },
                );
            }
        }
        for m in &self.extern_methods {
            add_type(&mut types, &mut strings, &m.owner);
            push_unique(&mut strings, m.name.clone());
            push_unique(&mut strings, shorty(&m.proto));
            add_type(&mut types, &mut strings, &m.proto.return_type);
            for p in &m.proto.params {
                add_type(&mut types, &mut strings, p);
            }
            push_unique(&mut protos, m.proto.clone());
            push_unique(&mut methods, m.clone());
        }
        for f in &self.extern_fields {
            add_type(&mut types, &mut strings, &f.owner);
            push_unique(&mut strings, f.name.clone());
            add_type(&mut types, &mut strings, &f.descriptor);
            push_unique(&mut fields, f.clone());
        }
        for t in &self.extern_types {
            add_type(&mut types, &mut strings, t);
        }
        for s in &self.extra_strings {
            push_unique(&mut strings, s.clone());
        }

        strings.sort_by(|a, b| utf16_cmp(a, b));
        types.sort_by(|a, b| utf16_cmp(a, b));
        protos.sort_by(|a, b| proto_cmp(a, b));
        fields.sort_by(|a, b| {
            (utf16_cmp(&a.owner, &b.owner))
                .then_with(|| utf16_cmp(&a.name, &b.name))
                .then_with(|| utf16_cmp(&a.descriptor, &b.descriptor))
        });
        methods.sort_by(|a, b| {
            (utf16_cmp(&a.owner, &b.owner))
                .then_with(|| utf16_cmp(&a.name, &b.name))
                .then_with(|| proto_cmp(&a.proto, &b.proto))
        });

        let idx = PoolIndex {
            strings,
            types,
            protos,
            fields,
            methods,
        };
        // class_data lists must ascend by pool index.
        for c in &mut self.classes {
            let owner = c.descriptor.clone();
            for list in [&mut c.static_fields, &mut c.instance_fields] {
                list.sort_by_key(|f| idx.field(&owner, &f.name, &f.descriptor));
            }
            for list in [&mut c.direct_methods, &mut c.virtual_methods] {
                list.sort_by_key(|m| idx.method(&owner, &m.name, &m.proto.descriptor()));
            }
        }
        self.frozen = Some(idx.clone());
        idx
    }

    /// Attaches a code item to a previously declared method.
    pub fn attach_code(&mut self, owner: &str, name: &str, proto: &str, code: CodeSpec) {
        let want = parse_proto(proto);
        for c in &mut self.classes {
            if c.descriptor != owner {
                continue;
            }
            for m in c.direct_methods.iter_mut().chain(c.virtual_methods.iter_mut()) {
                if m.name == name && m.proto == want {
                    m.code = Some(code);
                    return;
                }
            }
        }
        panic!("attach_code: {owner}.{name}:{proto} was never declared");
    }

    /// Serializes the whole container, patching sizes, signature and checksum.
    pub fn build(&mut self) -> Vec<u8> {
        let idx = match &self.frozen {
            Some(i) => i.clone(),
            None => self.freeze(),
        };

        let mut out = vec![0u8; HEADER_SIZE as usize];
        let mut map: Vec<(u16, u32, u32)> = vec![(0x0000, 1, 0)]; // header_item

        // --- id tables ---------------------------------------------------
        let string_ids_off = out.len() as u32;
        map.push((0x0001, idx.strings.len() as u32, string_ids_off));
        let string_id_pos = out.len();
        out.resize(out.len() + idx.strings.len() * 4, 0);

        let type_ids_off = out.len() as u32;
        map.push((0x0002, idx.types.len() as u32, type_ids_off));
        for t in &idx.types {
            push_u32(&mut out, idx.string(t));
        }

        let proto_ids_off = out.len() as u32;
        map.push((0x0003, idx.protos.len() as u32, proto_ids_off));
        let proto_id_pos = out.len();
        out.resize(out.len() + idx.protos.len() * 12, 0);

        let field_ids_off = out.len() as u32;
        if !idx.fields.is_empty() {
            map.push((0x0004, idx.fields.len() as u32, field_ids_off));
        }
        for f in &idx.fields {
            push_u16(&mut out, idx.type_idx(&f.owner) as u16);
            push_u16(&mut out, idx.type_idx(&f.descriptor) as u16);
            push_u32(&mut out, idx.string(&f.name));
        }

        let method_ids_off = out.len() as u32;
        if !idx.methods.is_empty() {
            map.push((0x0005, idx.methods.len() as u32, method_ids_off));
        }
        for m in &idx.methods {
            push_u16(&mut out, idx.type_idx(&m.owner) as u16);
            push_u16(
                &mut out,
                idx.protos.iter().position(|p| *p == m.proto).unwrap() as u16,
            );
            push_u32(&mut out, idx.string(&m.name));
        }

        let class_defs_off = out.len() as u32;
        if !self.classes.is_empty() {
            map.push((0x0006, self.classes.len() as u32, class_defs_off));
        }
        let class_def_pos = out.len();
        out.resize(out.len() + self.classes.len() * 32, 0);

        // --- data section -------------------------------------------------
        let data_off = out.len() as u32;

        // string_data
        let mut string_data_offs = Vec::with_capacity(idx.strings.len());
        if !idx.strings.is_empty() {
            map.push((0x2002, idx.strings.len() as u32, out.len() as u32));
        }
        for s in &idx.strings {
            string_data_offs.push(out.len() as u32);
            let mut data = Vec::new();
            let units = super::mutf8::encode(s, &mut data);
            push_uleb(&mut out, units);
            out.extend_from_slice(&data);
        }
        for (i, off) in string_data_offs.iter().enumerate() {
            patch_u32(&mut out, string_id_pos + i * 4, *off);
        }

        // type_lists for proto parameters
        align4(&mut out);
        let mut type_list_offs: BTreeMap<Vec<String>, u32> = BTreeMap::new();
        let mut type_list_count = 0u32;
        let type_lists_off = out.len() as u32;
        for p in &idx.protos {
            if p.params.is_empty() || type_list_offs.contains_key(&p.params) {
                continue;
            }
            align4(&mut out);
            type_list_offs.insert(p.params.clone(), out.len() as u32);
            type_list_count += 1;
            push_u32(&mut out, p.params.len() as u32);
            for t in &p.params {
                push_u16(&mut out, idx.type_idx(t) as u16);
            }
        }
        if type_list_count > 0 {
            map.push((0x1001, type_list_count, type_lists_off));
        }
        for (i, p) in idx.protos.iter().enumerate() {
            let base = proto_id_pos + i * 12;
            patch_u32(&mut out, base, idx.string(&shorty(p)));
            patch_u32(&mut out, base + 4, idx.type_idx(&p.return_type));
            let off = p.params.is_empty().then_some(0).unwrap_or_else(|| type_list_offs[&p.params]);
            patch_u32(&mut out, base + 8, off);
        }

        // code items
        let mut code_offs: Vec<Vec<Option<u32>>> = Vec::new();
        let mut code_count = 0u32;
        align4(&mut out);
        let code_items_off = out.len() as u32;
        for c in &self.classes {
            let mut per_class = Vec::new();
            for m in c.direct_methods.iter().chain(c.virtual_methods.iter()) {
                per_class.push(match &m.code {
                    None => None,
                    Some(code) => {
                        align4(&mut out);
                        let off = out.len() as u32;
                        code_count += 1;
                        write_code_item(&mut out, &idx, code);
                        Some(off)
                    }
                });
            }
            code_offs.push(per_class);
        }
        if code_count > 0 {
            map.push((0x2001, code_count, code_items_off));
        }

        // class_data
        let mut class_data_offs = Vec::new();
        let class_data_off = out.len() as u32;
        let mut class_data_count = 0u32;
        for (ci, c) in self.classes.iter().enumerate() {
            if c.static_fields.is_empty()
                && c.instance_fields.is_empty()
                && c.direct_methods.is_empty()
                && c.virtual_methods.is_empty()
            {
                class_data_offs.push(0u32);
                continue;
            }
            class_data_offs.push(out.len() as u32);
            class_data_count += 1;
            push_uleb(&mut out, c.static_fields.len() as u32);
            push_uleb(&mut out, c.instance_fields.len() as u32);
            push_uleb(&mut out, c.direct_methods.len() as u32);
            push_uleb(&mut out, c.virtual_methods.len() as u32);
            for list in [&c.static_fields, &c.instance_fields] {
                let mut prev = 0u32;
                for (i, f) in list.iter().enumerate() {
                    let fi = idx.field(&c.descriptor, &f.name, &f.descriptor);
                    push_uleb(&mut out, if i == 0 { fi } else { fi - prev });
                    prev = fi;
                    push_uleb(&mut out, f.access_flags);
                }
            }
            let mut code_iter = code_offs[ci].iter();
            for list in [&c.direct_methods, &c.virtual_methods] {
                let mut prev = 0u32;
                for (i, m) in list.iter().enumerate() {
                    let mi = idx.method(&c.descriptor, &m.name, &m.proto.descriptor());
                    push_uleb(&mut out, if i == 0 { mi } else { mi - prev });
                    prev = mi;
                    push_uleb(&mut out, m.access_flags);
                    push_uleb(&mut out, code_iter.next().unwrap().unwrap_or(0));
                }
            }
        }
        if class_data_count > 0 {
            map.push((0x2000, class_data_count, class_data_off));
        }

        for (ci, c) in self.classes.iter().enumerate() {
            let base = class_def_pos + ci * 32;
            patch_u32(&mut out, base, idx.type_idx(&c.descriptor));
            patch_u32(&mut out, base + 4, c.access_flags);
            patch_u32(
                &mut out,
                base + 8,
                c.superclass.as_ref().map_or(NO_INDEX, |s| idx.type_idx(s)),
            );
            patch_u32(&mut out, base + 12, 0); // interfaces_off
            patch_u32(&mut out, base + 16, NO_INDEX); // source_file_idx
            patch_u32(&mut out, base + 20, 0); // annotations_off
            patch_u32(&mut out, base + 24, class_data_offs[ci]);
            patch_u32(&mut out, base + 28, 0); // static_values_off
        }

        // map_list
        align4(&mut out);
        let map_off = out.len() as u32;
        map.push((0x1000, 1, map_off));
        map.sort_by_key(|e| e.2);
        push_u32(&mut out, map.len() as u32);
        for (ty, count, off) in &map {
            push_u16(&mut out, *ty);
            push_u16(&mut out, 0);
            push_u32(&mut out, *count);
            push_u32(&mut out, *off);
        }

        let file_size = out.len() as u32;
        let data_size = file_size - data_off;

        // header
        out[..8].copy_from_slice(&super::DEX_MAGIC_035);
        patch_u32(&mut out, 32, file_size);
        patch_u32(&mut out, 36, HEADER_SIZE);
        patch_u32(&mut out, 40, ENDIAN_CONSTANT);
        patch_u32(&mut out, 44, 0); // link_size
        patch_u32(&mut out, 48, 0); // link_off
        patch_u32(&mut out, 52, map_off);
        let mut pos = 56;
        for (count, off) in [
            (idx.strings.len() as u32, string_ids_off),
            (idx.types.len() as u32, type_ids_off),
            (idx.protos.len() as u32, proto_ids_off),
            (idx.fields.len() as u32, if idx.fields.is_empty() { 0 } else { field_ids_off }),
            (idx.methods.len() as u32, if idx.methods.is_empty() { 0 } else { method_ids_off }),
            (self.classes.len() as u32, if self.classes.is_empty() { 0 } else { class_defs_off }),
            (data_size, data_off),
        ] {
            patch_u32(&mut out, pos, count);
            patch_u32(&mut out, pos + 4, off);
            pos += 8;
        }

        let sig = sha1(&out[32..]);
        out[12..32].copy_from_slice(&sig);
        let sum = adler32(&out[12..]);
        patch_u32(&mut out, 8, sum);
        out
    }
}

fn write_code_item(out: &mut Vec<u8>, idx: &PoolIndex, code: &CodeSpec) {
    push_u16(out, code.registers_size);
    push_u16(out, code.ins_size);
    push_u16(out, code.outs_size);
    push_u16(out, code.tries.len() as u16);
    push_u32(out, 0); // debug_info_off
    push_u32(out, code.insns.len() as u32);
    for u in &code.insns {
        push_u16(out, *u);
    }
    if code.tries.is_empty() {
        return;
    }
    if code.insns.len() % 2 == 1 {
        push_u16(out, 0);
    }
    let try_pos = out.len();
    out.resize(out.len() + code.tries.len() * 8, 0);
    let list_start = out.len();
    push_uleb(out, code.tries.len() as u32);
    for (i, t) in code.tries.iter().enumerate() {
        let handler_off = (out.len() - list_start) as u16;
        let base = try_pos + i * 8;
        patch_u32(out, base, t.start_unit);
        patch_u16(out, base + 4, t.unit_count);
        patch_u16(out, base + 6, handler_off);
        let catch_all = t.handlers.iter().any(|(d, _)| d.is_none());
        let typed: Vec<_> = t.handlers.iter().filter(|(d, _)| d.is_some()).collect();
        let size = if catch_all {
            -(typed.len() as i32)
        } else {
            typed.len() as i32
        };
        push_sleb(out, size);
        for (d, addr) in &typed {
            push_uleb(out, idx.type_idx(d.as_ref().unwrap()));
            push_uleb(out, *addr);
        }
        if catch_all {
            let (_, addr) = t.handlers.iter().find(|(d, _)| d.is_none()).unwrap();
            push_uleb(out, *addr);
        }
    }
}

fn shorty(p: &Proto) -> String {
    let mut s = String::new();
    s.push(shorty_char(&p.return_type));
    for t in &p.params {
        s.push(shorty_char(t));
    }
    s
}

fn shorty_char(descriptor: &str) -> char {
    match descriptor.as_bytes()[0] {
        b'[' | b'L' => 'L',
        c => c as char,
    }
}

fn utf16_cmp(a: &str, b: &str) -> Ordering {
    a.encode_utf16().cmp(b.encode_utf16())
}

fn proto_cmp(a: &Proto, b: &Proto) -> Ordering {
    utf16_cmp(&a.return_type, &b.return_type).then_with(|| {
        for (x, y) in a.params.iter().zip(b.params.iter()) {
            let o = utf16_cmp(x, y);
            if o != Ordering::Equal {
                return o;
            }
        }
        a.params.len().cmp(&b.params.len())
    })
}

fn push_unique<T: PartialEq>(v: &mut Vec<T>, item: T) {
    if !v.contains(&item) {
        v.push(item);
    }
}

fn push_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn patch_u16(out: &mut [u8], pos: usize, v: u16) {
    out[pos..pos + 2].copy_from_slice(&v.to_le_bytes());
}

fn patch_u32(out: &mut [u8], pos: usize, v: u32) {
    out[pos..pos + 4].copy_from_slice(&v.to_le_bytes());
}

fn push_uleb(out: &mut Vec<u8>, mut v: u32) {
    loop {
        let b = (v & 0x7F) as u8;
        v >>= 7;
        if v == 0 {
            out.push(b);
            break;
        }
        out.push(b | 0x80);
    }
}

fn push_sleb(out: &mut Vec<u8>, mut v: i32) {
    loop {
        let b = (v & 0x7F) as u8;
        v >>= 7;
        let done = (v == 0 && b & 0x40 == 0) || (v == -1 && b & 0x40 != 0);
        if done {
            out.push(b);
            break;
        }
        out.push(b | 0x80);
    }
}

fn align4(out: &mut Vec<u8>) {
    while out.len() % 4 != 0 {
        out.push(0);
    }
}

fn adler32(bytes: &[u8]) -> u32 {
    const MOD: u32 = 65521;
    let (mut a, mut b) = (1u32, 0u32);
    for chunk in bytes.chunks(5552) {
        for &byte in chunk {
            a += byte as u32;
            b += a;
        }
        a %= MOD;
        b %= MOD;
    }
    (b << 16) | a
}

fn sha1(bytes: &[u8]) -> [u8; 20] {
    let mut h: [u32; 5] = [0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476, 0xC3D2E1F0];
    let ml = (bytes.len() as u64) * 8;
    let mut msg = bytes.to_vec();
    msg.push(0x80);
    while msg.len() % 64 != 56 {
        msg.push(0);
    }
    msg.extend_from_slice(&ml.to_be_bytes());

    let mut w = [0u32; 80];
    for chunk in msg.chunks(64) {
        for (i, word) in w.iter_mut().take(16).enumerate() {
            *word = u32::from_be_bytes(chunk[i * 4..i * 4 + 4].try_into().unwrap());
        }
        for i in 16..80 {
            w[i] = (w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16]).rotate_left(1);
        }
        let (mut a, mut b, mut c, mut d, mut e) = (h[0], h[1], h[2], h[3], h[4]);
        for (i, &wi) in w.iter().enumerate() {
            let (f, k) = match i {
                0..=19 => ((b & c) | (!b & d), 0x5A827999),
                20..=39 => (b ^ c ^ d, 0x6ED9EBA1),
                40..=59 => ((b & c) | (b & d) | (c & d), 0x8F1BBCDC),
                _ => (b ^ c ^ d, 0xCA62C1D6),
            };
            let tmp = a
                .rotate_left(5)
                .wrapping_add(f)
                .wrapping_add(e)
                .wrapping_add(k)
                .wrapping_add(wi);
            e = d;
            d = c;
            c = b.rotate_left(30);
            b = a;
            a = tmp;
        }
        h[0] = h[0].wrapping_add(a);
        h[1] = h[1].wrapping_add(b);
        h[2] = h[2].wrapping_add(c);
        h[3] = h[3].wrapping_add(d);
        h[4] = h[4].wrapping_add(e);
    }
    let mut out = [0u8; 20];
    for (i, word) in h.iter().enumerate() {
        out[i * 4..i * 4 + 4].copy_from_slice(&word.to_be_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // Digest vectors computed with an independent implementation
    // (python3 hashlib / zlib).
    #[test]
    fn sha1_matches_reference_vectors() {
        assert_eq!(
            sha1(b"abc"),
            [
                0xa9, 0x99, 0x3e, 0x36, 0x47, 0x06, 0x81, 0x6a, 0xba, 0x3e, 0x25, 0x71, 0x78,
                0x50, 0xc2, 0x6c, 0x9c, 0xd0, 0xd8, 0x9d
            ]
        );
        assert_eq!(
            sha1(b""),
            [
                0xda, 0x39, 0xa3, 0xee, 0x5e, 0x6b, 0x4b, 0x0d, 0x32, 0x55, 0xbf, 0xef, 0x95,
                0x60, 0x18, 0x90, 0xaf, 0xd8, 0x07, 0x09
            ]
        );
    }

    #[test]
    fn adler32_matches_reference_vectors() {
        assert_eq!(adler32(b"abc"), 38600999);
        assert_eq!(adler32(b""), 1);
        assert_eq!(adler32(b"Wikipedia"), 0x11E60398);
    }

    #[test]
    fn proto_parsing() {
        let p = parse_proto("(I[JLjava/lang/String;)V");
        assert_eq!(p.params, vec!["I", "[J", "Ljava/lang/String;"]);
        assert_eq!(p.return_type, "V");
    }
}
