//! Parsing of the `.dex` binary container (version 035, little-endian) into
//! an immutable in-memory model with eagerly validated constant-pool
//! references.

pub mod builder;
pub mod mutf8;
mod parse;

use std::fmt;

pub const DEX_MAGIC_035: [u8; 8] = *b"dex\n035\0";
pub const ENDIAN_CONSTANT: u32 = 0x12345678;
pub const HEADER_SIZE: u32 = 0x70;
pub const NO_INDEX: u32 = 0xffff_ffff;

pub const ACC_STATIC: u32 = 0x0008;
pub const ACC_NATIVE: u32 = 0x0100;
pub const ACC_ABSTRACT: u32 = 0x0400;

/// Which of the homogeneous constant pools an index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolKind {
    String,
    Type,
    Proto,
    Field,
    Method,
}

impl fmt::Display for PoolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PoolKind::String => "string",
            PoolKind::Type => "type",
            PoolKind::Proto => "proto",
            PoolKind::Field => "field",
            PoolKind::Method => "method",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DexError {
    #[error("bad magic {found:02x?}: only dex version 035 is supported")]
    BadMagic { found: [u8; 8] },
    #[error("unsupported endian tag 0x{0:08x}: only little-endian files are supported")]
    BadEndianTag(u32),
    #[error("{what} at offset 0x{offset:x} extends past the end of the file")]
    Truncated { what: &'static str, offset: u32 },
    #[error("{pool} index {index} out of range (pool has {len} entries)")]
    BadIndex { pool: PoolKind, index: u32, len: u32 },
    #[error("malformed {what} at offset 0x{offset:x}")]
    Malformed { what: &'static str, offset: u32 },
    #[error("bad string data at offset 0x{offset:x}: {source}")]
    BadString {
        offset: u32,
        source: mutf8::Mutf8Error,
    },
}

/// Entry count and byte offset of one fixed-size header section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Section {
    pub count: u32,
    pub offset: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DexHeader {
    pub magic: [u8; 8],
    pub checksum: u32,
    pub signature: [u8; 20],
    pub file_size: u32,
    pub header_size: u32,
    pub endian_tag: u32,
    pub link_size: u32,
    pub link_off: u32,
    pub map_off: u32,
    pub string_ids: Section,
    pub type_ids: Section,
    pub proto_ids: Section,
    pub field_ids: Section,
    pub method_ids: Section,
    pub class_defs: Section,
    /// `count` is the data section size in bytes, not an entry count.
    pub data: Section,
}

/// Method signature shape: return type descriptor plus parameter descriptors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proto {
    pub return_type: String,
    pub params: Vec<String>,
}

impl Proto {
    /// Renders the dex-style shorthand, e.g. `(II)V`.
    pub fn descriptor(&self) -> String {
        let mut s = String::from("(");
        for p in &self.params {
            s.push_str(p);
        }
        s.push(')');
        s.push_str(&self.return_type);
        s
    }

    /// Register slots consumed by the parameters alone (wide types take two).
    pub fn param_units(&self) -> u16 {
        self.params
            .iter()
            .map(|p| if p == "J" || p == "D" { 2u16 } else { 1 })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldRef {
    pub owner: String,
    pub name: String,
    pub descriptor: String,
}

impl fmt::Display for FieldRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}:{}", self.owner, self.name, self.descriptor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodRef {
    pub owner: String,
    pub name: String,
    pub proto: Proto,
}

impl fmt::Display for MethodRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}:{}", self.owner, self.name, self.proto.descriptor())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDef {
    pub field_idx: u32,
    pub field: FieldRef,
    pub access_flags: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDef {
    pub method_idx: u32,
    pub method: MethodRef,
    pub access_flags: u32,
    pub code: Option<CodeItem>,
}

impl MethodDef {
    pub fn is_static(&self) -> bool {
        self.access_flags & ACC_STATIC != 0
    }
}

/// One catch handler: the caught exception descriptor (`None` for the
/// catch-all entry) and the handler's code-unit address.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Handler {
    pub exception: Option<String>,
    pub target: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TryBlock {
    pub start_unit: u32,
    pub unit_count: u16,
    pub handlers: Vec<Handler>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeItem {
    pub registers_size: u16,
    pub ins_size: u16,
    pub outs_size: u16,
    pub insns: Vec<u16>,
    pub tries: Vec<TryBlock>,
    /// Offset of the debug_info_item, retained opaquely.
    pub debug_info_off: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDef {
    pub descriptor: String,
    pub access_flags: u32,
    pub superclass: Option<String>,
    pub interfaces: Vec<String>,
    pub source_file: Option<String>,
    /// Annotation directory offset, retained opaquely.
    pub annotations_off: Option<u32>,
    /// Static-value initializer array offset, retained opaquely.
    pub static_values_off: Option<u32>,
    pub static_fields: Vec<FieldDef>,
    pub instance_fields: Vec<FieldDef>,
    pub direct_methods: Vec<MethodDef>,
    pub virtual_methods: Vec<MethodDef>,
}

impl ClassDef {
    pub fn methods(&self) -> impl Iterator<Item = &MethodDef> {
        self.direct_methods.iter().chain(self.virtual_methods.iter())
    }
}

/// Fully parsed and validated container. Immutable after parsing; safe to
/// share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DexFile {
    pub header: DexHeader,
    pub strings: Vec<String>,
    pub types: Vec<String>,
    pub protos: Vec<Proto>,
    pub fields: Vec<FieldRef>,
    pub methods: Vec<MethodRef>,
    pub classes: Vec<ClassDef>,
}

/// Parses a complete `.dex` file image, validating every cross-pool index
/// eagerly so downstream resolution cannot fail.
pub fn parse_dex(bytes: &[u8]) -> Result<DexFile, DexError> {
    parse::parse(bytes)
}

impl DexFile {
    pub fn resolve_string(&self, idx: u32) -> Result<&str, DexError> {
        self.strings
            .get(idx as usize)
            .map(String::as_str)
            .ok_or(DexError::BadIndex {
                pool: PoolKind::String,
                index: idx,
                len: self.strings.len() as u32,
            })
    }

    pub fn resolve_type(&self, idx: u32) -> Result<&str, DexError> {
        self.types
            .get(idx as usize)
            .map(String::as_str)
            .ok_or(DexError::BadIndex {
                pool: PoolKind::Type,
                index: idx,
                len: self.types.len() as u32,
            })
    }

    pub fn resolve_proto(&self, idx: u32) -> Result<&Proto, DexError> {
        self.protos.get(idx as usize).ok_or(DexError::BadIndex {
            pool: PoolKind::Proto,
            index: idx,
            len: self.protos.len() as u32,
        })
    }

    pub fn resolve_field(&self, idx: u32) -> Result<&FieldRef, DexError> {
        self.fields.get(idx as usize).ok_or(DexError::BadIndex {
            pool: PoolKind::Field,
            index: idx,
            len: self.fields.len() as u32,
        })
    }

    pub fn resolve_method(&self, idx: u32) -> Result<&MethodRef, DexError> {
        self.methods.get(idx as usize).ok_or(DexError::BadIndex {
            pool: PoolKind::Method,
            index: idx,
            len: self.methods.len() as u32,
        })
    }

    /// The method's code, absent for abstract and native methods.
    pub fn method_code<'a>(&self, m: &'a MethodDef) -> Option<&'a CodeItem> {
        m.code.as_ref()
    }

    /// Walks every stored index-like reference in the model; used by tests to
    /// confirm the eager-validation postcondition.
    pub fn walk_all_refs(&self) -> usize {
        let mut touched = 0usize;
        for c in &self.classes {
            touched += 1 + c.interfaces.len();
            for f in c.static_fields.iter().chain(c.instance_fields.iter()) {
                let _ = &f.field;
                touched += 1;
            }
            for m in c.methods() {
                let _ = &m.method;
                touched += 1;
                if let Some(code) = &m.code {
                    for t in &code.tries {
                        touched += t.handlers.len();
                    }
                }
            }
        }
        touched
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_string_examples() {
        let mut dex = empty_dex();
        dex.strings = vec!["a".into(), "bc".into()];
        assert_eq!(dex.resolve_string(1).unwrap(), "bc");
        assert_eq!(
            dex.resolve_string(2),
            Err(DexError::BadIndex {
                pool: PoolKind::String,
                index: 2,
                len: 2
            })
        );
    }

    #[test]
    fn resolve_type_primitive() {
        let mut dex = empty_dex();
        dex.types = vec!["I".into()];
        assert_eq!(dex.resolve_type(0).unwrap(), "I");
    }

    #[test]
    fn short_input_is_truncated() {
        assert!(matches!(
            parse_dex(&[0u8; 8]),
            Err(DexError::BadMagic { .. }) | Err(DexError::Truncated { .. })
        ));
    }

    #[test]
    fn wrong_version_is_bad_magic() {
        let mut bytes = vec![0u8; HEADER_SIZE as usize];
        bytes[..8].copy_from_slice(b"dex\n036\0");
        assert_eq!(
            parse_dex(&bytes),
            Err(DexError::BadMagic { found: *b"dex\n036\0" })
        );
    }

    #[test]
    fn proto_descriptor_rendering() {
        let p = Proto {
            return_type: "V".into(),
            params: vec!["I".into(), "I".into()],
        };
        assert_eq!(p.descriptor(), "(II)V");
        assert_eq!(p.param_units(), 2);
        let q = Proto {
            return_type: "J".into(),
            params: vec!["J".into(), "I".into()],
        };
        assert_eq!(q.param_units(), 3);
    }

    fn empty_dex() -> DexFile {
        DexFile {
            header: DexHeader {
                magic: DEX_MAGIC_035,
                checksum: 0,
                signature: [0; 20],
                file_size: 0,
                header_size: HEADER_SIZE,
                endian_tag: ENDIAN_CONSTANT,
                link_size: 0,
                link_off: 0,
                map_off: 0,
                string_ids: Section::default(),
                type_ids: Section::default(),
                proto_ids: Section::default(),
                field_ids: Section::default(),
                method_ids: Section::default(),
                class_defs: Section::default(),
                data: Section::default(),
            },
            strings: vec![],
            types: vec![],
            protos: vec![],
            fields: vec![],
            methods: vec![],
            classes: vec![],
        }
    }
}
