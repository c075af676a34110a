//! Exact valued fields.
//!
//! Two concrete models are provided, both dense subfields of a complete
//! non-archimedean field:
//!
//! * [`PAdic`]: the rationals with the `p`-adic valuation (value group `Z`,
//!   uniformizer `p`, residue field of size `p`);
//! * [`PuiseuxField`]: rational functions in `t^(1/N)` over `Q` with the
//!   order-at-zero valuation (value group `Q`, uniformizer `t`).
//!
//! Matrix and lattice code is generic over [`ValuedField`]. The enum layer
//! ([`FieldDescriptor`], [`FieldElement`]) is the runtime surface used for
//! file formats and the command line.

mod padic;
mod poly;
mod puiseux;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use padic::PAdic;
pub use puiseux::{Puiseux, PuiseuxField, Term};

/// Arithmetic on field elements. All operations are exact.
pub trait Scalar: Clone + PartialEq + Eq + Zero + One + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn inv(&self) -> Result<Self>;

    fn div_ref(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.inv()?))
    }
}

/// A field with an additive non-archimedean valuation.
pub trait ValuedField: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Scalar;

    fn descriptor(&self) -> FieldDescriptor;

    fn valuation(&self, x: &Self::Elem) -> Valuation;

    /// `pi^e`. Fails when `e` is not in the value group.
    fn uniformizer_pow(&self, e: &BigRational) -> Result<Self::Elem>;

    /// Canonical representative of the class of `x` modulo `pi^gamma O`.
    ///
    /// Defined for every `x`, including non-integral ones. Either the result
    /// is zero or its valuation is below `gamma`.
    fn reduce_mod(&self, x: &Self::Elem, gamma: &BigRational) -> Self::Elem;

    #[allow(clippy::wrong_self_convention)]
    fn from_rational(&self, r: BigRational) -> Self::Elem;

    /// Size of the residue field when it is finite.
    fn residue_cardinality(&self) -> Option<u64>;

    /// True when the value group is `Z`.
    fn is_discrete(&self) -> bool;

    fn random_integral<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// Residue reduction restricted to the valuation ring: `x` must be
    /// integral and `gamma` nonnegative.
    fn residue_reduce(&self, x: &Self::Elem, gamma: &Valuation) -> Result<Self::Elem> {
        let v = self.valuation(x);
        if v < Valuation::zero() {
            return Err(Error::NotIntegral(v.to_string()));
        }
        match gamma {
            Valuation::Infinite => Ok(x.clone()),
            Valuation::Finite(g) if g.is_negative() => Err(Error::InvalidArgument(format!(
                "residue precision must be nonnegative, got {g}"
            ))),
            Valuation::Finite(g) => Ok(self.reduce_mod(x, g)),
        }
    }

    /// `x / pi^val(x)`, a unit of the valuation ring.
    fn unit_part(&self, x: &Self::Elem) -> Result<Self::Elem> {
        match self.valuation(x) {
            Valuation::Infinite => Err(Error::DivisionByZero),
            Valuation::Finite(v) => x.div_ref(&self.uniformizer_pow(&v)?),
        }
    }
}

/// A valuation: an exact rational or `+inf` (the valuation of zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(BigRational),
    Infinite,
}

impl Valuation {
    pub fn zero() -> Self {
        Valuation::Finite(BigRational::zero())
    }

    pub fn from_int(v: i64) -> Self {
        Valuation::Finite(BigRational::from_integer(v.into()))
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// The finite value, or an error naming `what`.
    pub fn expect_finite(self, what: &str) -> Result<BigRational> {
        match self {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::InvalidArgument(format!("{what} has infinite valuation"))),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Runtime description of the field a lattice lives over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum FieldDescriptor {
    #[serde(rename = "p-adic")]
    PAdic { p: u64 },
    #[serde(rename = "puiseux")]
    Puiseux,
}

impl FieldDescriptor {
    /// Residue cardinality used as the probability base.
    pub fn q(&self) -> Option<u64> {
        match self {
            FieldDescriptor::PAdic { p } => Some(*p),
            FieldDescriptor::Puiseux => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FieldDescriptor::PAdic { p } => PAdic::new(*p).map(|_| ()),
            FieldDescriptor::Puiseux => Ok(()),
        }
    }
}

/// A field element tagged with its model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldElement {
    PAdic(BigRational),
    Puiseux(Puiseux),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Exact arithmetic on tagged elements; mixing models is an error.
pub fn field_arith(op: ArithOp, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
    fn apply<S: Scalar>(op: ArithOp, x: &S, y: &S) -> Result<S> {
        Ok(match op {
            ArithOp::Add => x.add_ref(y),
            ArithOp::Sub => x.sub_ref(y),
            ArithOp::Mul => x.mul_ref(y),
            ArithOp::Div => x.div_ref(y)?,
        })
    }
    match (x, y) {
        (FieldElement::PAdic(a), FieldElement::PAdic(b)) => apply(op, a, b).map(FieldElement::PAdic),
        (FieldElement::Puiseux(a), FieldElement::Puiseux(b)) => apply(op, a, b).map(FieldElement::Puiseux),
        _ => Err(Error::FieldMismatch("p-adic and puiseux operands".into())),
    }
}

/// Valuation of a tagged element in the field described by `field`.
pub fn valuation(field: &FieldDescriptor, x: &FieldElement) -> Result<Valuation> {
    match (field, x) {
        (FieldDescriptor::PAdic { p }, FieldElement::PAdic(a)) => Ok(PAdic::new(*p)?.valuation(a)),
        (FieldDescriptor::Puiseux, FieldElement::Puiseux(a)) => Ok(PuiseuxField.valuation(a)),
        _ => Err(Error::FieldMismatch("element does not belong to the described field".into())),
    }
}

/// Residue reduction on tagged elements.
pub fn residue_reduce(field: &FieldDescriptor, x: &FieldElement, gamma: &Valuation) -> Result<FieldElement> {
    match (field, x) {
        (FieldDescriptor::PAdic { p }, FieldElement::PAdic(a)) => {
            PAdic::new(*p)?.residue_reduce(a, gamma).map(FieldElement::PAdic)
        }
        (FieldDescriptor::Puiseux, FieldElement::Puiseux(a)) => {
            PuiseuxField.residue_reduce(a, gamma).map(FieldElement::Puiseux)
        }
        _ => Err(Error::FieldMismatch("element does not belong to the described field".into())),
    }
}

impl Scalar for BigRational {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
}

/// Parses `"a"` or `"a/b"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::MalformedRational(s.to_string());
    match t.split_once('/') {
        None => t.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[cfg(test)]
pub(crate) fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_order_and_sum() {
        assert!(Valuation::from_int(5) < Valuation::Infinite);
        assert!(Valuation::from_int(-2) < Valuation::from_int(1));
        assert_eq!(Valuation::from_int(3) + Valuation::Infinite, Valuation::Infinite);
        assert_eq!(Valuation::from_int(3) + Valuation::from_int(-1), Valuation::from_int(2));
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("7/5").unwrap(), rat(7, 5));
        assert_eq!(parse_rational(" -3 ").unwrap(), int(-3));
        assert_eq!(parse_rational("4/-6").unwrap(), rat(-2, 3));
        for bad in ["", "1/0", "x", "1/2/3", "1.5"] {
            assert!(matches!(parse_rational(bad), Err(Error::MalformedRational(_))), "{bad}");
        }
    }

    #[test]
    fn tagged_arithmetic() {
        let half = FieldElement::PAdic(rat(1, 2));
        assert_eq!(field_arith(ArithOp::Add, &half, &half).unwrap(), FieldElement::PAdic(int(1)));
        let three = FieldElement::PAdic(int(3));
        let ninth = FieldElement::PAdic(rat(1, 9));
        let prod = field_arith(ArithOp::Mul, &three, &ninth).unwrap();
        assert_eq!(prod, FieldElement::PAdic(rat(1, 3)));
        let field = FieldDescriptor::PAdic { p: 3 };
        assert_eq!(valuation(&field, &prod).unwrap(), Valuation::from_int(-1));

        let zero = FieldElement::PAdic(int(0));
        assert_eq!(field_arith(ArithOp::Div, &three, &zero), Err(Error::DivisionByZero));

        let t = FieldElement::Puiseux(Puiseux::monomial(int(1), int(1)));
        assert!(matches!(field_arith(ArithOp::Add, &three, &t), Err(Error::FieldMismatch(_))));
        assert!(valuation(&field, &t).is_err());
    }

    #[test]
    fn descriptor_json() {
        let d: FieldDescriptor = serde_json::from_str(r#"{"type":"p-adic","p":3}"#).unwrap();
        assert_eq!(d, FieldDescriptor::PAdic { p: 3 });
        let d: FieldDescriptor = serde_json::from_str(r#"{"type":"puiseux"}"#).unwrap();
        assert_eq!(d, FieldDescriptor::Puiseux);
        assert_eq!(serde_json::to_string(&FieldDescriptor::PAdic { p: 5 }).unwrap(), r#"{"type":"p-adic","p":5}"#);
        assert!(FieldDescriptor::PAdic { p: 9 }.validate().is_err());
    }
}
