//! The monad file format: a JSON document with the ambient dimension, the
//! field, the twists of every term by position, and each differential as a
//! matrix of sparse forms.
//!
//! ```json
//! {
//!   "n": 3,
//!   "field": "fp:101",
//!   "middle": 0,
//!   "terms": [
//!     {"position": -1, "twists": [-1]},
//!     {"position": 0, "twists": [0,0,0,0]}
//!   ],
//!   "differentials": [
//!     {
//!       "from": -1,
//!       "entries": [
//!         [[["1",[1,0,0,0]]]],
//!         ...
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! `entries[i][j]` is the map from summand j of the source to summand i of
//! the target, listed as (coefficient, exponent vector) pairs in graded-lex
//! order.

use serde::{Deserialize, Serialize};

use crate::complex::{self, form_matrix, MonadSpec};
use crate::field::{Field, FieldSpec, PrimeField, Rationals};
use crate::graded;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonadFile {
    pub n: usize,
    pub field: String,
    pub middle: i64,
    pub terms: Vec<TermEntry>,
    pub differentials: Vec<DiffEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub position: i64,
    pub twists: Vec<i64>,
}

pub type SparseForm = Vec<(String, Vec<u32>)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffEntry {
    pub from: i64,
    pub entries: Vec<Vec<SparseForm>>,
}

impl MonadFile {
    pub fn from_monad<F: Field>(m: &MonadSpec<F>) -> Self {
        let f = &m.field;
        let terms = m
            .terms
            .iter()
            .enumerate()
            .map(|(k, t)| TermEntry { position: m.start + k as i64, twists: t.clone() })
            .collect();
        let differentials = m
            .diffs
            .iter()
            .enumerate()
            .map(|(k, d)| DiffEntry {
                from: m.start + k as i64,
                entries: (0..d.rows())
                    .map(|i| {
                        (0..d.cols())
                            .map(|j| {
                                graded::terms(f, d.get(i, j))
                                    .into_iter()
                                    .map(|(c, e)| (f.format(&c), e))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        MonadFile { n: m.n, field: f.spec().to_string(), middle: m.middle, terms, differentials }
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("monad file: {e}")))
    }

    /// One term per line and one matrix row per line.
    pub fn to_json(&self) -> String {
        let mut s = format!("{{\n  \"n\": {},\n  \"field\": {},\n  \"middle\": {},\n  \"terms\": [", self.n, compact(&self.field), self.middle);
        for (k, t) in self.terms.iter().enumerate() {
            s.push_str(if k == 0 { "\n" } else { ",\n" });
            s.push_str(&format!("    {{\"position\": {}, \"twists\": {}}}", t.position, compact(&t.twists)));
        }
        s.push_str(if self.terms.is_empty() { "],\n  \"differentials\": [" } else { "\n  ],\n  \"differentials\": [" });
        for (k, d) in self.differentials.iter().enumerate() {
            s.push_str(if k == 0 { "\n" } else { ",\n" });
            s.push_str(&format!("    {{\n      \"from\": {},\n      \"entries\": [", d.from));
            for (i, row) in d.entries.iter().enumerate() {
                s.push_str(if i == 0 { "\n" } else { ",\n" });
                s.push_str(&format!("        {}", compact(row)));
            }
            s.push_str("\n      ]\n    }");
        }
        s.push_str(if self.differentials.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        s
    }

    pub fn field_spec(&self) -> Result<FieldSpec, Error> {
        FieldSpec::parse(&self.field)
    }

    /// Builds the complex over `f`, which may differ from the declared
    /// field (coefficients are read in f's syntax). Fails unless the
    /// differentials compose to zero.
    pub fn to_monad<F: Field>(&self, f: &F) -> Result<MonadSpec<F>, Error> {
        let mut terms = self.terms.clone();
        terms.sort_by_key(|t| t.position);
        let start = terms.first().ok_or_else(|| Error::Parse("no terms".into()))?.position;
        for (k, t) in terms.iter().enumerate() {
            if t.position != start + k as i64 {
                return Err(Error::Parse(format!("term positions are not consecutive at {}", t.position)));
            }
        }
        let nvars = self.n + 1;
        let mut diffs = Vec::new();
        for k in 0..terms.len().saturating_sub(1) {
            let from = start + k as i64;
            let d = self
                .differentials
                .iter()
                .find(|d| d.from == from)
                .ok_or_else(|| Error::Parse(format!("missing differential leaving position {from}")))?;
            let (src, tgt) = (&terms[k].twists, &terms[k + 1].twists);
            if d.entries.len() != tgt.len() || d.entries.iter().any(|r| r.len() != src.len()) {
                return Err(Error::Shape(format!(
                    "differential from {from} must be {}x{}",
                    tgt.len(),
                    src.len()
                )));
            }
            let mut forms = Vec::with_capacity(tgt.len() * src.len());
            for (i, row) in d.entries.iter().enumerate() {
                for (j, entry) in row.iter().enumerate() {
                    let deg = tgt[i] - src[j];
                    let mut parsed = Vec::with_capacity(entry.len());
                    for (c, e) in entry {
                        if e.len() != nvars || e.iter().map(|&x| x as i64).sum::<i64>() != deg {
                            return Err(Error::Parse(format!(
                                "differential from {from}, entry ({i},{j}): exponent {e:?} does not have degree {deg} in {nvars} variables"
                            )));
                        }
                        parsed.push((f.parse(c)?, e.clone()));
                    }
                    forms.push(if deg < 0 {
                        graded::zero_form(f, nvars, deg)
                    } else {
                        graded::from_terms(f, nvars, deg, &parsed)
                    });
                }
            }
            diffs.push(form_matrix(f, nvars, src, tgt, forms)?);
        }
        if self.differentials.len() != diffs.len() {
            return Err(Error::Parse("differential positions do not match the terms".into()));
        }
        let twists = terms.into_iter().map(|t| t.twists).collect();
        let m = MonadSpec::new(f.clone(), self.n, start, twists, diffs, self.middle)?;
        if !complex::compose_check(&m)? {
            return Err(Error::Inconsistent("consecutive differentials do not compose to zero".into()));
        }
        Ok(m)
    }
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

pub fn write_monad<F: Field>(m: &MonadSpec<F>) -> String {
    MonadFile::from_monad(m).to_json()
}

/// A complex over whichever field its file (or an override) names.
#[derive(Clone, Debug)]
pub enum AnyMonad {
    Rationals(MonadSpec<Rationals>),
    Prime(MonadSpec<PrimeField>),
}

pub fn read_monad(text: &str, field: Option<FieldSpec>) -> Result<AnyMonad, Error> {
    let file = MonadFile::parse(text)?;
    let spec = match field {
        Some(s) => s,
        None => file.field_spec()?,
    };
    Ok(match spec {
        FieldSpec::Rationals => AnyMonad::Rationals(file.to_monad(&Rationals)?),
        FieldSpec::PrimeField(p) => AnyMonad::Prime(file.to_monad(&PrimeField::new(p)?)?),
    })
}

/// Runs a generic body on the complex inside an [`AnyMonad`].
#[macro_export]
macro_rules! with_monad {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            $crate::io::AnyMonad::Rationals($m) => $body,
            $crate::io::AnyMonad::Prime($m) => $body,
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_degree() {
        let text = r#"{"n":1,"field":"q","middle":0,
            "terms":[{"position":0,"twists":[0]},{"position":1,"twists":[1]}],
            "differentials":[{"from":0,"entries":[[[["1",[2,0]]]]]}]}"#;
        let err = MonadFile::parse(text).unwrap().to_monad(&Rationals).unwrap_err();
        assert!(matches!(err, Error::Parse(_)), "{err}");
    }

    #[test]
    fn text_is_stable_under_reparsing() {
        let text = r#"{"n":1,"field":"fp:7","middle":0,
            "terms":[{"position":0,"twists":[0]},{"position":1,"twists":[1, 1]}],
            "differentials":[{"from":0,"entries":[[[["1",[1,0]]]],[[["3",[0,1]],["1",[1,0]]]]]}]}"#;
        let f = PrimeField::new(7).unwrap();
        let once = write_monad(&MonadFile::parse(text).unwrap().to_monad(&f).unwrap());
        let twice = write_monad(&MonadFile::parse(&once).unwrap().to_monad(&f).unwrap());
        assert_eq!(once, twice);
        assert!(once.contains("\"twists\": [1,1]"), "{once}");
    }

    #[test]
    fn single_term_round_trip() {
        let m = MonadSpec::line_bundles(Rationals, 3, vec![0, -1]);
        let text = write_monad(&m);
        assert_eq!(MonadFile::parse(&text).unwrap().to_monad(&Rationals).unwrap(), m);
    }
}
