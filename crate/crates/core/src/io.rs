//! Lattice files and runtime dispatch over the two field models.
//!
//! ```json
//! {"field": {"type": "p-adic", "p": 3}, "matrix": [["1", "0"], ["3", "9"]]}
//! {"field": {"type": "puiseux"},
//!  "matrix": [[{"num": [{"c": "1", "e": "1/2"}]}, "0"], ["0", "1"]]}
//! ```
//!
//! p-adic entries are rational strings. Puiseux entries are either rational
//! strings (constants) or `{num: [terms], den: [terms]}` with
//! `term = {c, e}`; `den` defaults to `1`.

use std::path::Path;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::field::{parse_rational, FieldDescriptor, PAdic, Puiseux, PuiseuxField, Term, ValuedField};
use crate::lattice::Lattice;
use crate::matrix::Matrix;

/// Largest dimension accepted from a file.
pub const MAX_FILE_DIM: usize = 12;

/// Reading and writing matrix entries of one field model.
pub trait EntryCodec: ValuedField {
    fn parse_entry(&self, v: &Value) -> Result<Self::Elem>;
    fn entry_json(&self, x: &Self::Elem) -> Value;
}

fn rational_value(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::MalformedRational(other.to_string())),
    }
}

impl EntryCodec for PAdic {
    fn parse_entry(&self, v: &Value) -> Result<BigRational> {
        rational_value(v)
    }

    fn entry_json(&self, x: &BigRational) -> Value {
        Value::String(x.to_string())
    }
}

fn parse_terms(v: &Value) -> Result<Vec<Term>> {
    let arr = v.as_array().ok_or_else(|| Error::MalformedTerm(format!("expected a list of terms, got {v}")))?;
    arr.iter()
        .map(|t| {
            let obj = t.as_object().ok_or_else(|| Error::MalformedTerm(format!("expected {{c, e}}, got {t}")))?;
            if let Some(k) = obj.keys().find(|k| *k != "c" && *k != "e") {
                return Err(Error::MalformedTerm(format!("unknown key {k:?} in {t}")));
            }
            let get = |k: &str| obj.get(k).ok_or_else(|| Error::MalformedTerm(format!("term {t} lacks {k:?}")));
            Ok(Term { c: rational_value(get("c")?)?, e: rational_value(get("e")?)? })
        })
        .collect()
}

fn terms_json(terms: &[Term]) -> Value {
    Value::Array(terms.iter().map(|t| json!({"c": t.c.to_string(), "e": t.e.to_string()})).collect())
}

impl EntryCodec for PuiseuxField {
    fn parse_entry(&self, v: &Value) -> Result<Puiseux> {
        match v {
            Value::Object(obj) => {
                if let Some(k) = obj.keys().find(|k| *k != "num" && *k != "den") {
                    return Err(Error::MalformedTerm(format!("unknown key {k:?} in entry {v}")));
                }
                let num = parse_terms(obj.get("num").ok_or_else(|| Error::MalformedTerm(format!("entry {v} lacks \"num\"")))?)?;
                let den = match obj.get("den") {
                    Some(d) => parse_terms(d)?,
                    None => vec![Term { c: BigRational::from_integer(1.into()), e: BigRational::from_integer(0.into()) }],
                };
                Puiseux::from_fraction(&num, &den).map_err(|_| Error::MalformedTerm(format!("zero denominator in {v}")))
            }
            other => Ok(Puiseux::constant(rational_value(other)?)),
        }
    }

    fn entry_json(&self, x: &Puiseux) -> Value {
        let (num, den) = x.to_terms();
        let trivial = den.len() == 1 && den[0].e == BigRational::from_integer(0.into()) && den[0].c == BigRational::from_integer(1.into());
        let mut m = Map::new();
        m.insert("num".into(), terms_json(&num));
        if !trivial {
            m.insert("den".into(), terms_json(&den));
        }
        Value::Object(m)
    }
}

pub fn matrix_to_json<F: EntryCodec>(field: &F, m: &Matrix<F::Elem>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| field.entry_json(x)).collect())).collect())
}

/// `{"field": ..., "matrix": ...}`, re-readable by [`parse_lattice_str`].
pub fn lattice_file_json<F: EntryCodec>(field: &F, m: &Matrix<F::Elem>) -> Value {
    let mut out = Map::new();
    out.insert("field".into(), serde_json::to_value(field.descriptor()).expect("descriptor serializes"));
    out.insert("matrix".into(), matrix_to_json(field, m));
    Value::Object(out)
}

fn parse_matrix<F: EntryCodec>(field: &F, v: &Value) -> Result<Matrix<F::Elem>> {
    let rows = v.as_array().ok_or_else(|| Error::MalformedFile("\"matrix\" must be a list of rows".into()))?;
    let d = rows.len();
    if d == 0 {
        return Err(Error::MalformedFile("empty matrix".into()));
    }
    if d > MAX_FILE_DIM {
        return Err(Error::Dimension(format!("d = {d} exceeds the maximum {MAX_FILE_DIM}")));
    }
    let parsed = rows
        .iter()
        .map(|r| {
            let r = r.as_array().ok_or_else(|| Error::MalformedFile("each row must be a list".into()))?;
            if r.len() != d {
                return Err(Error::MalformedFile(format!("matrix must be square: row of length {} in a {d}-row matrix", r.len())));
            }
            r.iter().map(|x| field.parse_entry(x)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(parsed)
}

/// A lattice over whichever field the file names.
#[derive(Clone, Debug)]
pub enum DynLattice {
    PAdic(Lattice<PAdic>),
    Puiseux(Lattice<PuiseuxField>),
}

impl DynLattice {
    pub fn descriptor(&self) -> FieldDescriptor {
        match self {
            DynLattice::PAdic(l) => l.field().descriptor(),
            DynLattice::Puiseux(l) => l.field().descriptor(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DynLattice::PAdic(l) => l.dim(),
            DynLattice::Puiseux(l) => l.dim(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            DynLattice::PAdic(l) => lattice_file_json(l.field(), l.basis()),
            DynLattice::Puiseux(l) => lattice_file_json(l.field(), l.basis()),
        }
    }

    pub fn as_padic(&self) -> Result<&Lattice<PAdic>> {
        match self {
            DynLattice::PAdic(l) => Ok(l),
            DynLattice::Puiseux(_) => Err(Error::RequiresPAdic),
        }
    }
}

pub fn parse_lattice_value(v: &Value) -> Result<DynLattice> {
    let obj = v.as_object().ok_or_else(|| Error::MalformedFile("top level must be an object".into()))?;
    let field = obj.get("field").ok_or_else(|| Error::MalformedFile("missing \"field\"".into()))?;
    let desc: FieldDescriptor =
        serde_json::from_value(field.clone()).map_err(|e| Error::MalformedFile(format!("bad field descriptor: {e}")))?;
    let matrix = obj.get("matrix").ok_or_else(|| Error::MalformedFile("missing \"matrix\"".into()))?;
    match desc {
        FieldDescriptor::PAdic { p } => {
            let f = PAdic::new(p)?;
            let m = parse_matrix(&f, matrix)?;
            Ok(DynLattice::PAdic(Lattice::new(f, m)?))
        }
        FieldDescriptor::Puiseux => {
            let m = parse_matrix(&PuiseuxField, matrix)?;
            Ok(DynLattice::Puiseux(Lattice::new(PuiseuxField, m)?))
        }
    }
}

pub fn parse_lattice_str(s: &str) -> Result<DynLattice> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::MalformedFile(format!("invalid JSON: {e}")))?;
    parse_lattice_value(&v)
}

pub fn parse_lattice_file(path: &Path) -> Result<DynLattice> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedFile(format!("cannot read {}: {e}", path.display())))?;
    parse_lattice_str(&text)
}
