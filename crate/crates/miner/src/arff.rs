//! ARFF reading and writing for [`Dataset`]s.
//!
//! The writer emits the dialect downstream tools expect: numerics at three
//! decimals, nominal domains as `{A, B}`, and nominal cells right-padded to
//! the widest value in their domain so columns line up when eyeballed:
//!
//! ```text
//! 0.358,Late ,0.000,Raise,0.000,0.008
//! ```
//!
//! The reader accepts what the writer produces (padding is trimmed) plus `%`
//! comments and case-insensitive directives. Quoted names, sparse rows and
//! missing values are out of scope and rejected with a line number.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::data::{Attr, AttrKind, DataError, Dataset, Value};

#[derive(Debug, Error)]
pub enum ArffError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> ArffError {
    ArffError::Syntax { line, message: message.into() }
}

pub fn write_arff<W: Write>(w: &mut W, ds: &Dataset) -> io::Result<()> {
    writeln!(w, "@relation {}", ds.relation)?;
    writeln!(w)?;
    for attr in &ds.attrs {
        match &attr.kind {
            AttrKind::Numeric => writeln!(w, "@attribute {} numeric", attr.name)?,
            AttrKind::Nominal(domain) => {
                writeln!(w, "@attribute {} {{{}}}", attr.name, domain.join(", "))?
            }
        }
    }
    writeln!(w)?;
    writeln!(w, "@data")?;
    // Pad nominal cells to the widest value in each domain.
    let widths: Vec<usize> = ds
        .attrs
        .iter()
        .map(|a| match &a.kind {
            AttrKind::Numeric => 0,
            AttrKind::Nominal(domain) => domain.iter().map(|v| v.len()).max().unwrap_or(0),
        })
        .collect();
    let mut line = String::new();
    for row in &ds.rows {
        line.clear();
        for (j, value) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            match (value, &ds.attrs[j].kind) {
                (Value::Num(x), _) => line.push_str(&format!("{x:.3}")),
                (Value::Sym(i), AttrKind::Nominal(domain)) => {
                    line.push_str(&format!("{:<width$}", domain[*i], width = widths[j]))
                }
                (Value::Sym(_), AttrKind::Numeric) => unreachable!("validated dataset"),
            }
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_arff_to_string(ds: &Dataset) -> String {
    let mut buf = Vec::new();
    write_arff(&mut buf, ds).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("ARFF output is UTF-8")
}

fn parse_attribute(line_no: usize, rest: &str) -> Result<Attr, ArffError> {
    let rest = rest.trim();
    let (name, spec) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| syntax(line_no, "@attribute needs a name and a type"))?;
    let spec = spec.trim();
    let kind = if let Some(body) = spec.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| syntax(line_no, "unterminated nominal domain"))?;
        let values: Vec<String> = body.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(|v| v.is_empty()) {
            return Err(syntax(line_no, "empty value in nominal domain"));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(syntax(line_no, format!("duplicate nominal value {v:?}")));
            }
        }
        AttrKind::Nominal(values)
    } else {
        match spec.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => AttrKind::Numeric,
            other => return Err(syntax(line_no, format!("unsupported attribute type {other:?}"))),
        }
    };
    Ok(Attr { name: name.to_string(), kind })
}

pub fn read_arff<R: BufRead>(r: R) -> Result<Dataset, ArffError> {
    let mut relation: Option<String> = None;
    let mut attrs: Vec<Attr> = Vec::new();
    let mut ds: Option<Dataset> = None;

    for (idx, line) in r.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }

        if let Some(ds) = ds.as_mut() {
            let fields: Vec<&str> = trimmed.split(',').collect();
            let mut row = Vec::with_capacity(fields.len());
            if fields.len() != ds.attrs.len() {
                return Err(syntax(
                    line_no,
                    format!("expected {} fields, got {}", ds.attrs.len(), fields.len()),
                ));
            }
            for (field, attr) in fields.iter().zip(&ds.attrs) {
                let field = field.trim();
                match &attr.kind {
                    AttrKind::Numeric => {
                        let x: f64 = field.parse().map_err(|_| {
                            syntax(line_no, format!("bad numeric value {field:?}"))
                        })?;
                        row.push(Value::Num(x));
                    }
                    AttrKind::Nominal(domain) => {
                        let i = domain.iter().position(|v| v == field).ok_or_else(|| {
                            syntax(
                                line_no,
                                format!("value {field:?} not in domain of {:?}", attr.name),
                            )
                        })?;
                        row.push(Value::Sym(i));
                    }
                }
            }
            ds.push_row(row).map_err(|e: DataError| syntax(line_no, e.to_string()))?;
            continue;
        }

        let lowered = trimmed.to_ascii_lowercase();
        if let Some(rest) = lowered.strip_prefix("@relation") {
            if relation.is_some() {
                return Err(syntax(line_no, "duplicate @relation"));
            }
            if rest.trim().is_empty() {
                return Err(syntax(line_no, "@relation needs a name"));
            }
            relation = Some(trimmed["@relation".len()..].trim().to_string());
        } else if lowered.starts_with("@attribute") {
            if relation.is_none() {
                return Err(syntax(line_no, "@attribute before @relation"));
            }
            attrs.push(parse_attribute(line_no, &trimmed["@attribute".len()..])?);
        } else if lowered == "@data" {
            if attrs.is_empty() {
                return Err(syntax(line_no, "@data with no attributes"));
            }
            let d = Dataset::new(relation.clone().unwrap(), std::mem::take(&mut attrs))
                .map_err(|e| syntax(line_no, e.to_string()))?;
            ds = Some(d);
        } else {
            return Err(syntax(line_no, format!("unrecognized directive {trimmed:?}")));
        }
    }

    ds.ok_or_else(|| syntax(0, "no @data section"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn play_schema() -> Vec<Attr> {
        vec![
            Attr::numeric("win_prob"),
            Attr::nominal("position", &["Early", "Late"]),
            Attr::numeric("possible_earnings"),
            Attr::nominal("action", &["Call", "Raise"]),
            Attr::numeric("min_bet"),
            Attr::numeric("betted_money"),
        ]
    }

    fn sample() -> Dataset {
        let mut ds = Dataset::new("poker_plays", play_schema()).unwrap();
        ds.push_row(vec![
            Value::Num(0.358),
            Value::Sym(1),
            Value::Num(0.0),
            Value::Sym(1),
            Value::Num(0.0),
            Value::Num(0.008),
        ])
        .unwrap();
        ds.push_row(vec![
            Value::Num(0.62),
            Value::Sym(0),
            Value::Num(0.125),
            Value::Sym(0),
            Value::Num(0.031),
            Value::Num(0.05),
        ])
        .unwrap();
        ds
    }

    #[test]
    fn writes_the_expected_layout() {
        let text = write_arff_to_string(&sample());
        let expected = "\
@relation poker_plays

@attribute win_prob numeric
@attribute position {Early, Late}
@attribute possible_earnings numeric
@attribute action {Call, Raise}
@attribute min_bet numeric
@attribute betted_money numeric

@data
0.358,Late ,0.000,Raise,0.000,0.008
0.620,Early,0.125,Call ,0.031,0.050
";
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trips_byte_for_byte() {
        let ds = sample();
        let text = write_arff_to_string(&ds);
        let back = read_arff(Cursor::new(text.as_bytes())).unwrap();
        assert_eq!(back, ds);
        assert_eq!(write_arff_to_string(&back), text);
    }

    #[test]
    fn accepts_comments_and_case() {
        let text = "\
% produced elsewhere
@RELATION poker_plays
@ATTRIBUTE win_prob REAL
@attribute action {Call, Raise}
@DATA
0.5, Raise
";
        let ds = read_arff(Cursor::new(text.as_bytes())).unwrap();
        assert_eq!(ds.relation, "poker_plays");
        assert_eq!(ds.rows, vec![vec![Value::Num(0.5), Value::Sym(1)]]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases: Vec<(&str, usize, &str)> = vec![
            ("@relation r\n@attribute a numeric\n@data\nnope\n", 4, "bad numeric"),
            ("@relation r\n@attribute a {X, Y}\n@data\nZ\n", 4, "not in domain"),
            ("@relation r\n@attribute a numeric\n@data\n1.0,2.0\n", 4, "expected 1 fields"),
            ("@relation r\n@attribute a {X, X}\n@data\nX\n", 2, "duplicate nominal"),
            ("@relation r\n@attribute a {X\n@data\nX\n", 2, "unterminated"),
            ("@relation r\nbogus\n", 2, "unrecognized"),
            ("@attribute a numeric\n", 1, "before @relation"),
        ];
        for (text, want_line, want_msg) in cases {
            match read_arff(Cursor::new(text.as_bytes())) {
                Err(ArffError::Syntax { line, message }) => {
                    assert_eq!(line, want_line, "{text:?}");
                    assert!(message.contains(want_msg), "{message:?} vs {want_msg:?}");
                }
                other => panic!("expected syntax error for {text:?}, got {other:?}"),
            }
        }
        assert!(matches!(
            read_arff(Cursor::new(b"@relation r\n".as_slice())),
            Err(ArffError::Syntax { line: 0, .. })
        ));
    }
}
