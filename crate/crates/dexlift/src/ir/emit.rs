//! Deterministic line-oriented text listing of a method body.
//!
//! Grammar, one statement per line:
//! ```text
//! method <ret-descriptor> <owner>.<name>(<param-descriptors>) {
//!   local <name>: <type>
//!   L<k>: <statement>
//! }
//! ```
//! Branch targets are rendered as `L<k>` position labels. Float and double
//! constants carry their exact bit pattern next to the decimal rendering.

use std::fmt::Write;

use super::{Body, IdentitySource, Place, Statement, StmtId, Value};

pub fn emit_text(body: &Body) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "method {} {}.{}({}) {{",
        body.signature.proto.return_type,
        body.signature.owner,
        body.signature.name,
        body.signature
            .proto
            .params
            .iter()
            .map(String::as_str)
            .collect::<String>(),
    );
    for (_, local) in body.live_locals() {
        let _ = writeln!(out, "  local {}: {}", local.name, local.ty);
    }
    for (id, st) in body.iter() {
        let label = label_of(body, id);
        let _ = writeln!(out, "  {label}: {}", render_stmt(body, st));
    }
    for trap in &body.traps {
        let _ = writeln!(
            out,
            "  catch {} from {} to {} using {}",
            trap.exception.as_deref().unwrap_or("any"),
            label_of(body, trap.first),
            label_of(body, trap.last),
            label_of(body, trap.handler),
        );
    }
    out.push_str("}\n");
    out
}

fn label_of(body: &Body, id: StmtId) -> String {
    match body.position(id) {
        Some(pos) => format!("L{pos}"),
        None => "L?".to_string(),
    }
}

fn render_stmt(body: &Body, st: &Statement) -> String {
    match st {
        Statement::Nop => "nop".into(),
        Statement::Identity { local, source } => {
            let name = &body.local(*local).name;
            match source {
                IdentitySource::This { descriptor } => format!("{name} := @this {descriptor}"),
                IdentitySource::Param { index, descriptor } => {
                    format!("{name} := @param{index} {descriptor}")
                }
                IdentitySource::CaughtException { descriptor } => {
                    format!("{name} := @caughtexception {descriptor}")
                }
            }
        }
        Statement::Assign { place, value } => {
            format!("{} = {}", render_place(body, place), render_value(body, value))
        }
        Statement::If {
            op,
            lhs,
            rhs,
            target,
        } => format!(
            "if {} {} {} goto {}",
            render_value(body, lhs),
            op.symbol(),
            render_value(body, rhs),
            label_of(body, *target)
        ),
        Statement::Goto { target } => format!("goto {}", label_of(body, *target)),
        Statement::TableSwitch {
            key,
            first_key,
            targets,
            default,
        } => {
            let ts: Vec<String> = targets.iter().map(|t| label_of(body, *t)).collect();
            format!(
                "tableswitch({}) from {} [{}] default {}",
                render_value(body, key),
                first_key,
                ts.join(", "),
                label_of(body, *default)
            )
        }
        Statement::LookupSwitch { key, cases, default } => {
            let cs: Vec<String> = cases
                .iter()
                .map(|(k, t)| format!("{k}: {}", label_of(body, *t)))
                .collect();
            format!(
                "lookupswitch({}) [{}] default {}",
                render_value(body, key),
                cs.join(", "),
                label_of(body, *default)
            )
        }
        Statement::Invoke {
            kind,
            method,
            args,
            result,
        } => {
            let rendered: Vec<String> = args.iter().map(|a| render_value(body, a)).collect();
            let call = format!(
                "invoke {} {}({})",
                kind.keyword(),
                method,
                rendered.join(", ")
            );
            match result {
                Some(local) => format!("{} = {call}", body.local(*local).name),
                None => call,
            }
        }
        Statement::Return(v) => format!("return {}", render_value(body, v)),
        Statement::ReturnVoid => "return".into(),
        Statement::Throw(v) => format!("throw {}", render_value(body, v)),
        Statement::MonitorEnter(v) => format!("monitorenter {}", render_value(body, v)),
        Statement::MonitorExit(v) => format!("monitorexit {}", render_value(body, v)),
        Statement::Breakpoint => "breakpoint".into(),
    }
}

fn render_place(body: &Body, place: &Place) -> String {
    match place {
        Place::Local(id) => body.local(*id).name.clone(),
        Place::StaticField(f) => format!("static {f}"),
        Place::InstanceField { base, field } => {
            format!("{}.<{field}>", body.local(*base).name)
        }
        Place::ArrayElem { base, index } => {
            format!("{}[{}]", body.local(*base).name, render_value(body, index))
        }
    }
}

fn render_value(body: &Body, value: &Value) -> String {
    match value {
        Value::Local(id) => body.local(*id).name.clone(),
        Value::Int(v) => format!("{v}"),
        Value::Long(v) => format!("{v}L"),
        Value::Float(bits) => format!("{}F[0x{bits:08X}]", f32::from_bits(*bits)),
        Value::Double(bits) => format!("{}D[0x{bits:016X}]", f64::from_bits(*bits)),
        Value::Null => "null".into(),
        Value::Str(s) => format!("\"{}\"", escape(s)),
        Value::Class(d) => format!("class {d}"),
        Value::StaticField(f) => format!("static {f}"),
        Value::InstanceField { base, field } => {
            format!("{}.<{field}>", body.local(*base).name)
        }
        Value::ArrayElem { base, index } => {
            format!("{}[{}]", body.local(*base).name, render_value(body, index))
        }
        Value::Binary { op, lhs, rhs, .. } => format!(
            "{} {} {}",
            render_value(body, lhs),
            op.symbol(),
            render_value(body, rhs)
        ),
        Value::Unary { op, operand, .. } => {
            let sym = match op {
                super::UnOp::Neg => "-",
                super::UnOp::Not => "~",
            };
            format!("{sym}{}", render_value(body, operand))
        }
        Value::Cast { to, operand, .. } => format!("({to}) {}", render_value(body, operand)),
        Value::InstanceOf { ty, operand } => {
            format!("{} instanceof {ty}", render_value(body, operand))
        }
        Value::New(d) => format!("new {d}"),
        Value::NewArray { elem, size } => {
            format!("newarray({elem}, {})", render_value(body, size))
        }
        Value::ArrayLength(v) => format!("lengthof {}", render_value(body, v)),
        Value::Compare { kind, lhs, rhs } => format!(
            "{}({}, {})",
            kind.keyword(),
            render_value(body, lhs),
            render_value(body, rhs)
        ),
    }
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
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dex::{MethodRef, Proto};
    use crate::ir::{IrType, RelOp};

    fn sig() -> MethodRef {
        MethodRef {
            owner: "LT;".into(),
            name: "m".into(),
            proto: Proto {
                return_type: "V".into(),
                params: vec![],
            },
        }
    }

    #[test]
    fn emission_is_deterministic() {
        let mut b = Body::new(sig(), true);
        let v0 = b.add_local("v0", IrType::Ref("LCoordinate;".into()));
        let nop = b.push(Statement::Nop);
        b.push(Statement::Assign {
            place: Place::Local(v0),
            value: Value::Null,
        });
        b.push(Statement::If {
            op: RelOp::Eq,
            lhs: Value::Local(v0),
            rhs: Value::Null,
            target: nop,
        });
        b.push(Statement::ReturnVoid);
        let a = emit_text(&b);
        let b2 = emit_text(&b);
        assert_eq!(a, b2);
        assert!(a.contains("v0 = null"));
        assert!(a.contains("if v0 == null goto L0"));
    }

    #[test]
    fn float_constants_carry_bit_patterns() {
        let mut b = Body::new(sig(), true);
        let v0 = b.add_local("v0", IrType::Float);
        b.push(Statement::Assign {
            place: Place::Local(v0),
            value: Value::Float(0x3F80_0000),
        });
        b.push(Statement::ReturnVoid);
        let text = emit_text(&b);
        assert!(text.contains("1F[0x3F800000]"), "{text}");
    }

    #[test]
    fn empty_void_method() {
        let mut b = Body::new(sig(), true);
        b.push(Statement::ReturnVoid);
        let text = emit_text(&b);
        assert_eq!(text, "method V LT;.m() {\n  L0: return\n}\n");
    }
}
