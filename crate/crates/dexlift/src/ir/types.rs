//! The local-variable type lattice.

use std::fmt;

/// Types a local can carry. `Unknown` is the pre-inference state and never
/// survives a completed typing pipeline; `Null` is the type of a proven null
/// reference whose concrete class never surfaced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IrType {
    Unknown,
    Boolean,
    Byte,
    Char,
    Short,
    Int,
    Float,
    Long,
    Double,
    Null,
    Ref(String),
    Array(Box<IrType>),
}

/// Register categories used for consistency checking: everything in the same
/// category shares a 32-bit register interpretation (or is reference-like).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeCat {
    Unknown,
    Int32,
    Float,
    Long,
    Double,
    Reference,
}

pub const JAVA_LANG_OBJECT: &str = "Ljava/lang/Object;";

impl IrType {
    pub fn from_descriptor(desc: &str) -> Option<IrType> {
        let mut chars = desc.chars();
        let t = match chars.next()? {
            'Z' => IrType::Boolean,
            'B' => IrType::Byte,
            'C' => IrType::Char,
            'S' => IrType::Short,
            'I' => IrType::Int,
            'F' => IrType::Float,
            'J' => IrType::Long,
            'D' => IrType::Double,
            'L' => {
                if !desc.ends_with(';') {
                    return None;
                }
                IrType::Ref(desc.to_string())
            }
            '[' => IrType::Array(Box::new(IrType::from_descriptor(&desc[1..])?)),
            _ => return None,
        };
        // Primitive descriptors are single characters.
        if matches!(desc.as_bytes()[0], b'Z' | b'B' | b'C' | b'S' | b'I' | b'F' | b'J' | b'D')
            && desc.len() != 1
        {
            return None;
        }
        Some(t)
    }

    pub fn category(&self) -> TypeCat {
        match self {
            IrType::Unknown => TypeCat::Unknown,
            IrType::Boolean | IrType::Byte | IrType::Char | IrType::Short | IrType::Int => {
                TypeCat::Int32
            }
            IrType::Float => TypeCat::Float,
            IrType::Long => TypeCat::Long,
            IrType::Double => TypeCat::Double,
            IrType::Null | IrType::Ref(_) | IrType::Array(_) => TypeCat::Reference,
        }
    }

    pub fn is_wide(&self) -> bool {
        matches!(self.category(), TypeCat::Long | TypeCat::Double)
    }

    pub fn is_reference(&self) -> bool {
        self.category() == TypeCat::Reference
    }

    /// Rank within the 32-bit integral family; joining picks the wider.
    fn int_rank(&self) -> u8 {
        match self {
            IrType::Boolean => 0,
            IrType::Byte => 1,
            IrType::Short => 2,
            IrType::Char => 3,
            IrType::Int => 4,
            _ => 0,
        }
    }

    /// Joins two types. Integral 32-bit types widen toward `Int`; `Null` is
    /// below every reference type; distinct concrete reference types join to
    /// `java.lang.Object` (no class hierarchy is consulted). Returns `None`
    /// when the categories are irreconcilable.
    pub fn join(&self, other: &IrType) -> Option<IrType> {
        use IrType::*;
        if self == other {
            return Some(self.clone());
        }
        match (self, other) {
            (Unknown, t) | (t, Unknown) => Some(t.clone()),
            (a, b) if a.category() == TypeCat::Int32 && b.category() == TypeCat::Int32 => {
                Some(if a.int_rank() >= b.int_rank() {
                    a.clone()
                } else {
                    b.clone()
                })
            }
            (Null, t) | (t, Null) if t.is_reference() => Some(t.clone()),
            (Array(a), Array(b)) => match a.join(b) {
                Some(e) if a.category() == b.category() || **a == Unknown || **b == Unknown => {
                    Some(Array(Box::new(e)))
                }
                _ => Some(Ref(JAVA_LANG_OBJECT.to_string())),
            },
            (a, b) if a.is_reference() && b.is_reference() => {
                Some(Ref(JAVA_LANG_OBJECT.to_string()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for IrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrType::Unknown => f.write_str("unknown"),
            IrType::Boolean => f.write_str("boolean"),
            IrType::Byte => f.write_str("byte"),
            IrType::Char => f.write_str("char"),
            IrType::Short => f.write_str("short"),
            IrType::Int => f.write_str("int"),
            IrType::Float => f.write_str("float"),
            IrType::Long => f.write_str("long"),
            IrType::Double => f.write_str("double"),
            IrType::Null => f.write_str("null"),
            IrType::Ref(d) => f.write_str(d),
            IrType::Array(e) => write!(f, "[{}", descriptor_ish(e)),
        }
    }
}

fn descriptor_ish(t: &IrType) -> String {
    match t {
        IrType::Boolean => "Z".into(),
        IrType::Byte => "B".into(),
        IrType::Char => "C".into(),
        IrType::Short => "S".into(),
        IrType::Int => "I".into(),
        IrType::Float => "F".into(),
        IrType::Long => "J".into(),
        IrType::Double => "D".into(),
        IrType::Ref(d) => d.clone(),
        IrType::Array(e) => format!("[{}", descriptor_ish(e)),
        IrType::Null => "null".into(),
        IrType::Unknown => "unknown".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_parsing() {
        assert_eq!(IrType::from_descriptor("I"), Some(IrType::Int));
        assert_eq!(
            IrType::from_descriptor("Lfoo/Bar;"),
            Some(IrType::Ref("Lfoo/Bar;".into()))
        );
        assert_eq!(
            IrType::from_descriptor("[J"),
            Some(IrType::Array(Box::new(IrType::Long)))
        );
        assert_eq!(IrType::from_descriptor("Lunterminated"), None);
        assert_eq!(IrType::from_descriptor("II"), None);
    }

    #[test]
    fn null_joins_below_references() {
        let coord = IrType::Ref("LCoordinate;".into());
        assert_eq!(IrType::Null.join(&coord), Some(coord.clone()));
        assert_eq!(coord.join(&IrType::Null), Some(coord));
        assert_eq!(IrType::Null.join(&IrType::Int), None);
    }

    #[test]
    fn integral_widening() {
        assert_eq!(IrType::Boolean.join(&IrType::Int), Some(IrType::Int));
        assert_eq!(IrType::Byte.join(&IrType::Short), Some(IrType::Short));
        assert_eq!(IrType::Int.join(&IrType::Float), None);
        assert_eq!(IrType::Long.join(&IrType::Double), None);
    }

    #[test]
    fn distinct_refs_join_to_object() {
        let a = IrType::Ref("LA;".into());
        let b = IrType::Ref("LB;".into());
        assert_eq!(a.join(&b), Some(IrType::Ref(JAVA_LANG_OBJECT.into())));
        let arr = IrType::Array(Box::new(IrType::Int));
        assert_eq!(
            arr.join(&IrType::Array(Box::new(IrType::Unknown))),
            Some(IrType::Array(Box::new(IrType::Int)))
        );
    }
}
