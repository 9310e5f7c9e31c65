//! Polynomial document schema and CSV curve emission.

use std::path::Path;

use rif_core::poly::{MultiIndex, MultiPoly};
use rif_core::Complex64;
use serde::{Deserialize, Serialize};

/// One monomial of the input document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDoc {
    pub exp: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// The polynomial document: `{"vars": n, "terms": [{"exp", "re", "im"}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    pub vars: usize,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug)]
pub enum ParseError {
    Malformed(String),
    NoVariables,
    EmptyTerms,
    WrongExponentLength { term: usize, expected: usize, got: usize },
    DuplicateExponent { term: usize },
    NonFiniteCoefficient { term: usize },
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::Malformed(e) => write!(f, "malformed polynomial document: {e}"),
            ParseError::NoVariables => write!(f, "polynomial must have vars >= 1"),
            ParseError::EmptyTerms => write!(f, "polynomial must have at least one term"),
            ParseError::WrongExponentLength { term, expected, got } => write!(
                f,
                "term {term}: exponent tuple has length {got}, expected {expected}"
            ),
            ParseError::DuplicateExponent { term } => {
                write!(f, "term {term}: duplicate exponent tuple")
            }
            ParseError::NonFiniteCoefficient { term } => {
                write!(f, "term {term}: coefficient must be finite")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Parses and validates a polynomial document into a sparse polynomial.
pub fn parse_poly(text: &str) -> Result<MultiPoly, ParseError> {
    let doc: PolyDoc =
        serde_json::from_str(text).map_err(|e| ParseError::Malformed(e.to_string()))?;
    poly_from_doc(&doc)
}

pub fn poly_from_doc(doc: &PolyDoc) -> Result<MultiPoly, ParseError> {
    if doc.vars == 0 {
        return Err(ParseError::NoVariables);
    }
    if doc.terms.is_empty() {
        return Err(ParseError::EmptyTerms);
    }
    let mut seen = std::collections::HashSet::new();
    let mut terms = Vec::with_capacity(doc.terms.len());
    for (i, t) in doc.terms.iter().enumerate() {
        if t.exp.len() != doc.vars {
            return Err(ParseError::WrongExponentLength {
                term: i,
                expected: doc.vars,
                got: t.exp.len(),
            });
        }
        if !seen.insert(t.exp.clone()) {
            return Err(ParseError::DuplicateExponent { term: i });
        }
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(ParseError::NonFiniteCoefficient { term: i });
        }
        terms.push((MultiIndex::new(t.exp.clone()), Complex64::new(t.re, t.im)));
    }
    MultiPoly::from_terms(doc.vars, terms)
        .map_err(|e| ParseError::Malformed(e.to_string()))
}

/// Renders a polynomial back to the document schema with sorted terms.
pub fn poly_to_doc(p: &MultiPoly) -> PolyDoc {
    PolyDoc {
        vars: p.vars(),
        terms: p
            .sorted_terms()
            .into_iter()
            .map(|(idx, c)| TermDoc {
                exp: idx.as_slice().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect(),
    }
}

/// Writes a two-or-more-column CSV curve.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_reference_document() {
        let text = r#"{"vars":2,"terms":[{"exp":[0,0],"re":2,"im":0},{"exp":[1,0],"re":-1,"im":0},{"exp":[0,1],"re":-1,"im":0}]}"#;
        let p = parse_poly(text).unwrap();
        assert_eq!(p.vars(), 2);
        assert_eq!(p.num_terms(), 3);
        assert_eq!(
            p.coefficient(&MultiIndex::zeros(2)),
            Complex64::new(2.0, 0.0)
        );
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            parse_poly(r#"{"vars":2,"terms":[]}"#),
            Err(ParseError::EmptyTerms)
        ));
        assert!(matches!(
            parse_poly(
                r#"{"vars":2,"terms":[{"exp":[1,0],"re":1,"im":0},{"exp":[1,0],"re":2,"im":0}]}"#
            ),
            Err(ParseError::DuplicateExponent { term: 1 })
        ));
        assert!(matches!(
            parse_poly(r#"{"vars":2,"terms":[{"exp":[1],"re":1,"im":0}]}"#),
            Err(ParseError::WrongExponentLength { .. })
        ));
        assert!(matches!(
            parse_poly(r#"{"vars":0,"terms":[{"exp":[],"re":1,"im":0}]}"#),
            Err(ParseError::NoVariables)
        ));
        assert!(parse_poly("not json").is_err());
        // Negative exponents are rejected by the schema type.
        assert!(matches!(
            parse_poly(r#"{"vars":1,"terms":[{"exp":[-1],"re":1,"im":0}]}"#),
            Err(ParseError::Malformed(_))
        ));
    }

    #[test]
    fn round_trips_sorted() {
        let text = r#"{"vars":2,"terms":[{"exp":[1,0],"re":-1,"im":0},{"exp":[0,0],"re":2,"im":0}]}"#;
        let p = parse_poly(text).unwrap();
        let doc = poly_to_doc(&p);
        assert_eq!(doc.terms[0].exp, vec![0, 0]);
        assert_eq!(doc.terms[1].exp, vec![1, 0]);
    }
}
