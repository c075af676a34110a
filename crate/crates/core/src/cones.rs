//! The supermodular cone, conditional independence faces, and the
//! three-dimensional picture: projection onto the complement `W` of the
//! modular functions, the cone `C` and the fan `P` inside it. Also the
//! explicit two-dimensional preimage construction.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::entropy::EntropyVector;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{parse_rational, Puiseux, PuiseuxField};
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::subset::{Subset, MAX_DIM};

/// A point `(x_I)` of `R^{2^d}` with `x_empty = 0`, indexed by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunctionVector {
    d: usize,
    values: Vec<BigRational>,
}

impl SetFunctionVector {
    pub fn from_values(d: usize, values: Vec<BigRational>) -> Result<Self> {
        if d > MAX_DIM || values.len() != 1 << d {
            return Err(Error::Dimension(format!("expected 2^{d} values, got {}", values.len())));
        }
        if !values[0].is_zero() {
            return Err(Error::InvalidArgument("value at the empty set must be 0".into()));
        }
        Ok(SetFunctionVector { d, values })
    }

    /// From `(subset, value)` pairs; every subset must appear. A missing
    /// empty set defaults to 0.
    pub fn from_pairs(d: usize, pairs: impl IntoIterator<Item = (Subset, BigRational)>) -> Result<Self> {
        let mut values = vec![None; 1 << d];
        values[0] = Some(BigRational::zero());
        for (s, x) in pairs {
            if !s.is_subset_of(Subset::full(d)) {
                return Err(Error::InvalidArgument(format!("subset {s} outside dimension {d}")));
            }
            values[s.bits() as usize] = Some(x);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(b, x)| x.ok_or_else(|| Error::InvalidArgument(format!("missing subset {{{}}}", Subset::from_bits(b as u32)))))
            .collect::<Result<Vec<_>>>()?;
        SetFunctionVector::from_values(d, values)
    }

    /// JSON object keyed by 1-based comma lists; values as strings or numbers.
    pub fn from_json(d: usize, value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::MalformedFile("set function must be a JSON object".into()))?;
        let pairs = obj
            .iter()
            .map(|(k, v)| {
                let x = match v {
                    Value::String(s) => parse_rational(s)?,
                    Value::Number(n) => parse_rational(&n.to_string())?,
                    _ => return Err(Error::MalformedFile(format!("bad value for {k:?}"))),
                };
                Ok((Subset::parse(k, d)?, x))
            })
            .collect::<Result<Vec<_>>>()?;
        SetFunctionVector::from_pairs(d, pairs)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, s: Subset) -> &BigRational {
        &self.values[s.bits() as usize]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// The modular function `x_I = sum_{i in I} c_i`.
    pub fn modular(c: &[BigRational]) -> Self {
        SetFunctionVector { d: c.len(), values: EntropyVector::additive(c).values().to_vec() }
    }

    pub fn add(&self, other: &SetFunctionVector) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::Dimension("set functions of different dimension".into()));
        }
        Ok(SetFunctionVector { d: self.d, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }
}

impl From<&EntropyVector> for SetFunctionVector {
    fn from(h: &EntropyVector) -> Self {
        SetFunctionVector { d: h.d(), values: h.values().to_vec() }
    }
}

/// The face `x_{Ii} + x_{Ij} <= x_I + x_{Iij}`, with `i < j` and `i, j` not in `I`
/// (0-based internally, 1-based in JSON and display).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacetTriple {
    pub subset: Subset,
    pub i: usize,
    pub j: usize,
}

impl FacetTriple {
    pub fn to_json(&self) -> Value {
        json!({ "I": self.subset.one_based(), "i": self.i + 1, "j": self.j + 1 })
    }

    /// `x_I + x_{Iij} - x_{Ii} - x_{Ij}`; nonnegative inside the cone.
    pub fn slack(&self, x: &SetFunctionVector) -> BigRational {
        let s = self.subset;
        x.get(s) + x.get(s.with(self.i).with(self.j)) - x.get(s.with(self.i)) - x.get(s.with(self.j))
    }
}

/// All facet triples of the supermodular cone, ordered by `I` (cardinality,
/// then lexicographic), then `(i, j)`.
pub fn facet_triples(d: usize) -> Vec<FacetTriple> {
    let mut out = Vec::new();
    for s in Subset::by_cardinality(d) {
        for i in 0..d {
            for j in i + 1..d {
                if !s.contains(i) && !s.contains(j) {
                    out.push(FacetTriple { subset: s, i, j });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupermodularReport {
    pub inside: bool,
    pub checked: usize,
    pub violated: Vec<FacetTriple>,
    pub tight: Vec<FacetTriple>,
}

impl SupermodularReport {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("inside".into(), Value::Bool(self.inside));
        m.insert("checked".into(), json!(self.checked));
        m.insert("violated".into(), Value::Array(self.violated.iter().map(FacetTriple::to_json).collect()));
        m.insert("tight".into(), Value::Array(self.tight.iter().map(FacetTriple::to_json).collect()));
        Value::Object(m)
    }
}

pub fn supermodular_membership(x: &SetFunctionVector) -> Result<SupermodularReport> {
    supermodular_membership_with(x, Exec::default())
}

pub fn supermodular_membership_with(x: &SetFunctionVector, exec: Exec) -> Result<SupermodularReport> {
    if x.d < 2 {
        return Err(Error::Dimension("the supermodular cone needs d >= 2".into()));
    }
    let triples = facet_triples(x.d);
    let slacks = exec.map_slice(&triples, |t| t.slack(x));
    let mut report = SupermodularReport { inside: true, checked: triples.len(), violated: vec![], tight: vec![] };
    for (t, s) in triples.into_iter().zip(slacks) {
        if s.is_zero() {
            report.tight.push(t);
        } else if s < BigRational::zero() {
            report.violated.push(t);
        }
    }
    report.inside = report.violated.is_empty();
    Ok(report)
}

/// `X_i` and `X_j` are independent given `X_I` exactly when the face
/// equality `h_{Ii} + h_{Ij} = h_I + h_{Iij}` holds. Indices are 0-based.
pub fn ci_statement(h: &EntropyVector, i: usize, j: usize, given: Subset) -> Result<bool> {
    let d = h.d();
    if i == j || i >= d || j >= d || given.contains(i) || given.contains(j) || !given.is_subset_of(Subset::full(d)) {
        return Err(Error::InvalidArgument("need distinct i, j outside the conditioning set".into()));
    }
    let (i, j) = (i.min(j), i.max(j));
    Ok(FacetTriple { subset: given, i, j }.slack(&SetFunctionVector::from(h)).is_zero())
}

/// Coordinates `(x_2, x_3, x_13, x_23)` of a normalized three-dimensional set
/// function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WPoint {
    pub w: BigRational,
    pub x: BigRational,
    pub y: BigRational,
    pub z: BigRational,
}

impl WPoint {
    pub fn new(w: BigRational, x: BigRational, y: BigRational, z: BigRational) -> Self {
        WPoint { w, x, y, z }
    }

    pub fn to_json(&self) -> Value {
        json!({ "w": self.w.to_string(), "x": self.x.to_string(), "y": self.y.to_string(), "z": self.z.to_string() })
    }
}

/// Subtracts the modular function agreeing with `v` on `1`, `12` and `123`.
pub fn project_to_w(v: &SetFunctionVector) -> Result<WPoint> {
    if v.d != 3 {
        return Err(Error::Dimension(format!("projection to W needs d = 3, got {}", v.d)));
    }
    let at = |key: &str| v.get(Subset::parse(key, 3).expect("valid key")).clone();
    let c1 = at("1");
    let c2 = at("1,2") - &c1;
    let c3 = at("1,2,3") - at("1,2");
    Ok(WPoint {
        w: at("2") - &c2,
        x: at("3") - &c3,
        y: at("1,3") - &c1 - &c3,
        z: at("2,3") - &c2 - &c3,
    })
}

/// The six inequalities cutting out `C`.
pub fn cone_c_membership(p: &WPoint) -> bool {
    let zero = BigRational::zero();
    p.w <= zero
        && p.x <= p.y
        && &p.w + &p.x <= p.z
        && p.y <= zero
        && p.z <= p.w
        && &p.y + &p.z <= p.x
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanReport {
    pub member: bool,
    /// Which of the three describing systems hold (1-based).
    pub systems: Vec<u8>,
}

impl FanReport {
    pub fn to_json(&self) -> Value {
        json!({ "member": self.member, "systems": self.systems })
    }
}

pub fn fan_p_membership(p: &WPoint) -> FanReport {
    let zero = BigRational::zero();
    let WPoint { w, x, y, z } = p;
    let s1 = *w <= zero && *x <= w + y && *y <= zero && z == x;
    let s2 = *w <= zero && x <= y && *y <= zero && y + w <= *x && *z == y + w;
    let s3 = *w <= zero && *y <= zero && *x == y + w && z <= w && x <= z;
    let systems: Vec<u8> = [s1, s2, s3].iter().zip(1u8..).filter(|(ok, _)| **ok).map(|(_, k)| k).collect();
    FanReport { member: !systems.is_empty(), systems }
}

/// A Puiseux lattice with entropy vector `(0; x1, x2; x12)`, for any point
/// of the two-dimensional supermodular cone.
pub fn s2_preimage(x1: &BigRational, x2: &BigRational, x12: &BigRational) -> Result<Lattice<PuiseuxField>> {
    if x1 + x2 > *x12 {
        return Err(Error::OutsideCone);
    }
    let t = |e: BigRational| Puiseux::monomial(BigRational::one(), e);
    let basis = Matrix::from_rows(vec![
        vec![t(x1.clone()), Puiseux::zero()],
        vec![t(x2.clone()), t(x12 - x1)],
    ])?;
    Lattice::new(PuiseuxField, basis)
}
