//! Deterministic JSON writer.
//!
//! Object fields keep insertion order and floats are printed with 17
//! significant digits, so identical runs produce byte-identical artifacts.

use std::fmt;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum JVal {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Arr(Vec<JVal>),
    Obj(Vec<(String, JVal)>),
}

impl JVal {
    pub fn str(s: &str) -> JVal {
        JVal::Str(s.to_string())
    }

    pub fn obj(fields: Vec<(&str, JVal)>) -> JVal {
        JVal::Obj(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn ints(vals: &[i64]) -> JVal {
        JVal::Arr(vals.iter().map(|&v| JVal::Int(v)).collect())
    }

    pub fn floats(vals: &[f64]) -> JVal {
        JVal::Arr(vals.iter().map(|&v| JVal::Float(v)).collect())
    }

    pub fn usizes(vals: &[usize]) -> JVal {
        JVal::Arr(vals.iter().map(|&v| JVal::Int(v as i64)).collect())
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            JVal::Null => out.push_str("null"),
            JVal::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            JVal::Int(v) => {
                let _ = write!(out, "{v}");
            }
            JVal::Float(v) => {
                let _ = write!(out, "{}", fmt_f64(*v));
            }
            JVal::Str(s) => write_escaped(out, s),
            JVal::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out, indent);
                }
                out.push(']');
            }
            JVal::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_escaped(out, k);
                    out.push(':');
                    v.write(out, indent);
                }
                out.push('}');
            }
        }
    }
}

impl fmt::Display for JVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, 0);
        f.write_str(&s)
    }
}

/// 17 significant digits; round-trips every finite f64.
pub fn fmt_f64(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        // integral values print exactly without an exponent
        format!("{:.1}", v)
    } else {
        format!("{:.16e}", v)
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}
