//! Certificate tree and its two encodings.
//!
//! Field order is the insertion order. Floats are written with 17
//! significant digits (`{:.16e}`), which round-trips every `f64`; infinities
//! are the strings `"inf"` and `"-inf"`.

use renyivar::ExtReal;

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Null,
    Bool(bool),
    Int(u64),
    Num(f64),
    Str(String),
    List(Vec<Node>),
    Map(Vec<(String, Node)>),
}

impl Node {
    /// Build a map from `(key, value)` pairs.
    pub fn map<K: Into<String>>(fields: Vec<(K, Node)>) -> Node {
        Node::Map(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn nums(xs: &[f64]) -> Node {
        Node::List(xs.iter().map(|&x| Node::Num(x)).collect())
    }

    pub fn matrix(rows: &[Vec<f64>]) -> Node {
        Node::List(rows.iter().map(|r| Node::nums(r)).collect())
    }

    pub fn ints(xs: &[usize]) -> Node {
        Node::List(xs.iter().map(|&x| Node::Int(x as u64)).collect())
    }

    pub fn opt(x: Option<Node>) -> Node {
        x.unwrap_or(Node::Null)
    }

    /// Look up `key` in a map.
    pub fn get(&self, key: &str) -> Option<&Node> {
        match self {
            Node::Map(fields) => fields.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Node::List(_) | Node::Map(_))
    }

    fn scalar_text(&self) -> String {
        match self {
            Node::Null => String::new(),
            Node::Bool(b) => b.to_string(),
            Node::Int(i) => i.to_string(),
            Node::Num(x) => format_float(*x),
            Node::Str(s) => s.clone(),
            Node::List(_) | Node::Map(_) => unreachable!("not a scalar"),
        }
    }
}

impl From<ExtReal> for Node {
    fn from(x: ExtReal) -> Node {
        Node::Num(x.to_f64())
    }
}

impl From<f64> for Node {
    fn from(x: f64) -> Node {
        Node::Num(x)
    }
}

impl From<bool> for Node {
    fn from(b: bool) -> Node {
        Node::Bool(b)
    }
}

impl From<&str> for Node {
    fn from(s: &str) -> Node {
        Node::Str(s.to_string())
    }
}

impl From<usize> for Node {
    fn from(i: usize) -> Node {
        Node::Int(i as u64)
    }
}

/// `{:.16e}` for finite values, `"inf"`/`"-inf"` otherwise. Negative zero prints as zero.
pub fn format_float(x: f64) -> String {
    assert!(!x.is_nan(), "certificates never carry NaN");
    if x == 0.0 {
        "0.0000000000000000e0".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn json_scalar(node: &Node) -> String {
    match node {
        Node::Null => "null".into(),
        Node::Num(x) if x.is_infinite() => quote(&format_float(*x)),
        Node::Str(s) => quote(s),
        other => other.scalar_text(),
    }
}

fn write_json(node: &Node, indent: usize, out: &mut String) {
    let pad = |n: usize| " ".repeat(n);
    match node {
        Node::List(items) if items.iter().all(Node::is_scalar) => {
            out.push('[');
            out.push_str(&items.iter().map(json_scalar).collect::<Vec<_>>().join(", "));
            out.push(']');
        }
        Node::List(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 2));
                write_json(item, indent + 2, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Node::Map(fields) if fields.is_empty() => out.push_str("{}"),
        Node::Map(fields) => {
            out.push_str("{\n");
            for (k, (key, value)) in fields.iter().enumerate() {
                out.push_str(&pad(indent + 2));
                out.push_str(&quote(key));
                out.push_str(": ");
                write_json(value, indent + 2, out);
                out.push_str(if k + 1 < fields.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&json_scalar(scalar)),
    }
}

/// Indented JSON with a trailing newline.
pub fn to_json(node: &Node) -> String {
    let mut out = String::new();
    write_json(node, 0, &mut out);
    out.push('\n');
    out
}

fn flatten(node: &Node, path: &str, rows: &mut Vec<(String, String)>) {
    let join = |key: &str| if path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
    match node {
        Node::List(items) => {
            for (k, item) in items.iter().enumerate() {
                flatten(item, &join(&k.to_string()), rows);
            }
        }
        Node::Map(fields) => {
            for (key, value) in fields {
                flatten(value, &join(key), rows);
            }
        }
        scalar => rows.push((path.to_string(), scalar.scalar_text())),
    }
}

/// Two-column CSV (`field,value`) with dotted paths; list entries are indexed from 0.
pub fn to_csv(node: &Node) -> Result<String> {
    let mut rows = Vec::new();
    flatten(node, "", &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(["field", "value"]).map_err(io)?;
    for (field, value) in &rows {
        w.write_record([field, value]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Node {
        Node::map(vec![
            ("value", ExtReal::PosInf.into()),
            ("low", ExtReal::NegInf.into()),
            ("x", Node::nums(&[0.1, 1.0 / 3.0])),
            ("rows", Node::matrix(&[vec![0.5, 0.0], vec![0.0, 0.5]])),
            ("none", Node::Null),
            ("name", "a \"b\"".into()),
            ("pass", true.into()),
        ])
    }

    #[test]
    fn json_is_valid_and_round_trips_floats() {
        let text = to_json(&sample());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["value"], "inf");
        assert_eq!(v["low"], "-inf");
        assert_eq!(v["x"][1].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["x"][0].as_f64().unwrap(), 0.1);
        assert_eq!(v["rows"][1][1].as_f64().unwrap(), 0.5);
        assert!(v["none"].is_null());
        assert_eq!(v["name"], "a \"b\"");
    }

    #[test]
    fn csv_flattens_paths() {
        let text = to_csv(&sample()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "field,value");
        assert_eq!(lines[1], "value,inf");
        assert!(lines.contains(&"rows.1.1,5.0000000000000000e-1"));
        assert!(lines.contains(&"name,\"a \"\"b\"\"\""));
    }

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
        assert_eq!(format_float(-0.0), "0.0000000000000000e0");
        for x in [std::f64::consts::PI, 1e-300, 123456.789, -7.25e10, f64::MIN_POSITIVE] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
