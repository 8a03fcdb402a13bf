//! Text formats: coefficient lists, exponent lists and cycle files.
//!
//! A cycle file holds one vector per line as comma-separated F_q digits in
//! ascending coefficient order. Lines starting with `#` are comments; comment
//! tokens of the form `key=value` (keys `q`, `n`, `poly`, `r`) form the header.
//!
//! ```text
//! # q=2 n=5 poly=1,0,1,0,0,1 r=5
//! 1,0,0,0,0
//! 0,0,0,1,0
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::field::Exponent;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("cannot parse {what} from {input:?}")]
    Value { what: &'static str, input: String },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &'static str) -> Result<Vec<T>, FormatError> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Err(FormatError::Value { what, input: s.to_string() });
    }
    inner
        .split(',')
        .map(|t| t.trim().parse::<T>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| FormatError::Value { what, input: s.to_string() })
}

/// `1,0,1,0,0,1` or `[1,0,1,0,0,1]`, constant term first.
pub fn parse_poly(s: &str) -> Result<Vec<u64>, FormatError> {
    parse_list(s, "polynomial")
}

/// `3,4,8,16,1`; entries may also be written `a^3`.
pub fn parse_exponents(s: &str) -> Result<Vec<Exponent>, FormatError> {
    let cleaned: String = s
        .split(',')
        .map(|t| {
            let t = t.trim().trim_start_matches('[').trim_end_matches(']');
            t.strip_prefix("a^").or_else(|| t.strip_prefix("α^")).unwrap_or(t).to_string()
        })
        .collect::<Vec<_>>()
        .join(",");
    parse_list(&cleaned, "exponent list").map_err(|_| FormatError::Value {
        what: "exponent list",
        input: s.to_string(),
    })
}

pub fn format_list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SequenceHeader {
    pub q: Option<u32>,
    pub n: Option<usize>,
    pub poly: Option<Vec<u64>>,
    pub r: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceFile {
    pub header: SequenceHeader,
    pub vectors: Vec<Vec<u32>>,
}

pub fn parse_sequence_file(text: &str) -> Result<SequenceFile, FormatError> {
    let mut header = SequenceHeader::default();
    let mut vectors: Vec<Vec<u32>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| FormatError::Line { line, message };
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(comment) = t.strip_prefix('#') {
            for token in comment.split_whitespace() {
                let Some((key, value)) = token.split_once('=') else { continue };
                let bad = || err(format!("bad header value {token:?}"));
                match key {
                    "q" => header.q = Some(value.parse().map_err(|_| bad())?),
                    "n" => header.n = Some(value.parse().map_err(|_| bad())?),
                    "r" => header.r = Some(value.parse().map_err(|_| bad())?),
                    "poly" => header.poly = Some(parse_poly(value).map_err(|_| bad())?),
                    _ => {}
                }
            }
            continue;
        }
        let body = t.split('#').next().unwrap_or("").trim();
        let v: Vec<u32> = parse_list(body, "vector").map_err(|_| err(format!("bad vector {t:?}")))?;
        if let Some(first) = vectors.first().filter(|f| f.len() != v.len()) {
            return Err(err(format!("expected {} coordinates, found {}", first.len(), v.len())));
        }
        vectors.push(v);
    }
    Ok(SequenceFile { header, vectors })
}

pub fn format_sequence_file(file: &SequenceFile) -> String {
    let mut out = String::new();
    let h = &file.header;
    let mut tokens = Vec::new();
    if let Some(q) = h.q {
        tokens.push(format!("q={q}"));
    }
    if let Some(n) = h.n {
        tokens.push(format!("n={n}"));
    }
    if let Some(p) = &h.poly {
        tokens.push(format!("poly={}", format_list(p)));
    }
    if let Some(r) = h.r {
        tokens.push(format!("r={r}"));
    }
    if !tokens.is_empty() {
        let _ = writeln!(out, "# {}", tokens.join(" "));
    }
    for v in &file.vectors {
        let _ = writeln!(out, "{}", format_list(v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polys_and_exponents() {
        assert_eq!(parse_poly("1,0,1,0,0,1").unwrap(), vec![1, 0, 1, 0, 0, 1]);
        assert_eq!(parse_poly("[1, 2, 0, 0, 0, 1]").unwrap(), vec![1, 2, 0, 0, 0, 1]);
        assert!(parse_poly("1,x").is_err());
        assert!(parse_poly("").is_err());
        assert_eq!(parse_exponents("3,4,8,16,1").unwrap(), vec![3, 4, 8, 16, 1]);
        assert_eq!(parse_exponents("a^3, a^4,8").unwrap(), vec![3, 4, 8]);
        assert!(parse_exponents("b^3").is_err());
    }

    #[test]
    fn sequence_file_roundtrip() {
        let text = "# generated\n# q=3 n=3 poly=1,2,0,1 r=4\n1,0,0\n\n0,2,1  # trailing\n";
        let f = parse_sequence_file(text).unwrap();
        assert_eq!(f.header.q, Some(3));
        assert_eq!(f.header.n, Some(3));
        assert_eq!(f.header.poly, Some(vec![1, 2, 0, 1]));
        assert_eq!(f.header.r, Some(4));
        assert_eq!(f.vectors, vec![vec![1, 0, 0], vec![0, 2, 1]]);
        assert_eq!(parse_sequence_file(&format_sequence_file(&f)).unwrap(), f);
    }

    #[test]
    fn sequence_file_errors() {
        assert!(matches!(
            parse_sequence_file("1,0\n1,0,0\n"),
            Err(FormatError::Line { line: 2, .. })
        ));
        assert!(matches!(parse_sequence_file("# q=x\n"), Err(FormatError::Line { line: 1, .. })));
        assert!(matches!(parse_sequence_file("1,a\n"), Err(FormatError::Line { line: 1, .. })));
    }
}
