use std::fmt;
use std::ops::{Add, Mul};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::poly::{self, Poly};
use super::{FieldDescriptor, Scalar, Valuation, ValuedField};
use crate::error::{Error, Result};

/// A ramified rational function `s^shift * num(s) / den(s)` with `s = t^(1/ram)`.
///
/// Canonical form: `num(0) != 0`, `den(0) == 1`, `gcd(num, den) == 1`, and
/// `ram` is minimal (no common divisor of `ram`, `shift` and the occupied
/// exponents). Zero is `num = []`, `den = [1]`, `shift = 0`, `ram = 1`.
/// Structural equality is therefore field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Puiseux {
    num: Poly,
    den: Poly,
    shift: i64,
    ram: u64,
}

/// A monomial `c * t^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub c: BigRational,
    pub e: BigRational,
}

fn lowest_nonzero(p: &[BigRational]) -> usize {
    p.iter().position(|c| !c.is_zero()).unwrap_or(0)
}

impl Puiseux {
    fn normalize(mut num: Poly, mut den: Poly, mut shift: i64, mut ram: u64) -> Puiseux {
        poly::trim(&mut num);
        poly::trim(&mut den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return Puiseux::zero();
        }
        let kn = lowest_nonzero(&num);
        let kd = lowest_nonzero(&den);
        num.drain(..kn);
        den.drain(..kd);
        shift += kn as i64 - kd as i64;

        // a constant or monomial side shares no factor with the other
        let g = if num.len() == 1 || den.len() == 1 { vec![BigRational::one()] } else { poly::gcd(&num, &den) };
        if g.len() > 1 {
            num = poly::divrem(&num, &g).0;
            den = poly::divrem(&den, &g).0;
        }
        let c = den[0].clone();
        if !c.is_one() {
            let inv = BigRational::one() / c;
            num = poly::scale(&num, &inv);
            den = poly::scale(&den, &inv);
        }

        let mut g = ram.gcd(&shift.unsigned_abs());
        for (i, _) in num.iter().enumerate().chain(den.iter().enumerate()).filter(|(_, c)| !c.is_zero()) {
            g = g.gcd(&(i as u64));
        }
        // `g` divides ram; g == 0 cannot happen since ram >= 1
        if g > 1 {
            let k = g as usize;
            num = num.iter().step_by(k).cloned().collect();
            den = den.iter().step_by(k).cloned().collect();
            shift /= g as i64;
            ram /= g;
        }
        Puiseux { num, den, shift, ram }
    }

    /// `c * t^e`.
    pub fn monomial(c: BigRational, e: BigRational) -> Puiseux {
        if c.is_zero() {
            return Puiseux::zero();
        }
        let ram = e.denom().to_u64().expect("ramification index out of range");
        let shift = e.numer().to_i64().expect("exponent out of range");
        Puiseux::normalize(vec![c], vec![BigRational::one()], shift, ram)
    }

    pub fn constant(c: BigRational) -> Puiseux {
        Puiseux::monomial(c, BigRational::zero())
    }

    pub fn from_terms(terms: &[Term]) -> Puiseux {
        terms
            .iter()
            .fold(Puiseux::zero(), |acc, t| acc.add_ref(&Puiseux::monomial(t.c.clone(), t.e.clone())))
    }

    /// `(sum of num terms) / (sum of den terms)`.
    pub fn from_fraction(num: &[Term], den: &[Term]) -> Result<Puiseux> {
        Puiseux::from_terms(num).div_ref(&Puiseux::from_terms(den))
    }

    pub fn ramification(&self) -> u64 {
        self.ram
    }

    /// Order in `t`; `None` for zero.
    pub fn order(&self) -> Option<BigRational> {
        if self.is_zero() {
            None
        } else {
            Some(BigRational::new(self.shift.into(), (self.ram as i64).into()))
        }
    }

    fn lift(&self, ram: u64) -> (Poly, Poly, i64) {
        let k = ram / self.ram;
        debug_assert_eq!(k * self.ram, ram);
        let k_us = k as usize;
        (poly::spread(&self.num, k_us), poly::spread(&self.den, k_us), self.shift * k as i64)
    }

    /// Numerator and denominator as term lists in `t`. The denominator is
    /// `[1]` for polynomial elements.
    pub fn to_terms(&self) -> (Vec<Term>, Vec<Term>) {
        let ram = self.ram as i64;
        let terms = |p: &Poly, offset: i64| -> Vec<Term> {
            p.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| Term { c: c.clone(), e: BigRational::new((i as i64 + offset).into(), ram.into()) })
                .collect()
        };
        let (n_off, d_off) = if self.shift >= 0 { (self.shift, 0) } else { (0, -self.shift) };
        (terms(&self.num, n_off), terms(&self.den, d_off))
    }

    /// Power-series coefficients of `num/den` (which has `den(0) = 1`), the
    /// first `count` of them.
    fn series(&self, count: usize) -> Vec<BigRational> {
        let mut c: Vec<BigRational> = Vec::with_capacity(count);
        for k in 0..count {
            let mut acc = self.num.get(k).cloned().unwrap_or_else(BigRational::zero);
            for j in 1..=k.min(self.den.len().saturating_sub(1)) {
                acc -= &self.den[j] * &c[k - j];
            }
            c.push(acc);
        }
        c
    }
}

impl Zero for Puiseux {
    fn zero() -> Self {
        Puiseux { num: vec![], den: vec![BigRational::one()], shift: 0, ram: 1 }
    }

    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
}

impl One for Puiseux {
    fn one() -> Self {
        Puiseux { num: vec![BigRational::one()], den: vec![BigRational::one()], shift: 0, ram: 1 }
    }
}

impl Add for Puiseux {
    type Output = Puiseux;

    fn add(self, rhs: Puiseux) -> Puiseux {
        self.add_ref(&rhs)
    }
}

impl Mul for Puiseux {
    type Output = Puiseux;

    fn mul(self, rhs: Puiseux) -> Puiseux {
        self.mul_ref(&rhs)
    }
}

impl Scalar for Puiseux {
    fn add_ref(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let ram = self.ram.lcm(&other.ram);
        let (n1, d1, s1) = self.lift(ram);
        let (n2, d2, s2) = other.lift(ram);
        let m = s1.min(s2);
        if d1 == d2 {
            let a = poly::shift_up(&n1, (s1 - m) as usize);
            let b = poly::shift_up(&n2, (s2 - m) as usize);
            return Puiseux::normalize(poly::add(&a, &b), d1, m, ram);
        }
        let a = poly::shift_up(&poly::mul(&n1, &d2), (s1 - m) as usize);
        let b = poly::shift_up(&poly::mul(&n2, &d1), (s2 - m) as usize);
        Puiseux::normalize(poly::add(&a, &b), poly::mul(&d1, &d2), m, ram)
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Puiseux::zero();
        }
        let ram = self.ram.lcm(&other.ram);
        let (n1, d1, s1) = self.lift(ram);
        let (n2, d2, s2) = other.lift(ram);
        Puiseux::normalize(poly::mul(&n1, &n2), poly::mul(&d1, &d2), s1 + s2, ram)
    }

    fn neg_ref(&self) -> Self {
        Puiseux { num: poly::neg(&self.num), ..self.clone() }
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Puiseux::normalize(self.den.clone(), self.num.clone(), -self.shift, self.ram))
    }
}

fn fmt_terms(f: &mut fmt::Formatter<'_>, terms: &[Term]) -> fmt::Result {
    for (k, t) in terms.iter().enumerate() {
        let c = if k > 0 {
            if t.c.is_negative() {
                f.write_str(" - ")?;
                -t.c.clone()
            } else {
                f.write_str(" + ")?;
                t.c.clone()
            }
        } else {
            t.c.clone()
        };
        if t.e.is_zero() {
            write!(f, "{c}")?;
        } else {
            if !c.is_one() {
                write!(f, "{c}*")?;
            }
            if t.e.is_one() {
                f.write_str("t")?;
            } else if t.e.is_integer() && t.e.is_positive() {
                write!(f, "t^{}", t.e)?;
            } else {
                write!(f, "t^({})", t.e)?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for Puiseux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let (n, d) = self.to_terms();
        let trivial_den = d.len() == 1 && d[0].c.is_one() && d[0].e.is_zero();
        if trivial_den {
            return fmt_terms(f, &n);
        }
        f.write_str("(")?;
        fmt_terms(f, &n)?;
        f.write_str(")/(")?;
        fmt_terms(f, &d)?;
        f.write_str(")")
    }
}

/// `Q(t^(1/N))` for all `N`, valued by order at `t = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PuiseuxField;

impl ValuedField for PuiseuxField {
    type Elem = Puiseux;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Puiseux
    }

    fn valuation(&self, x: &Puiseux) -> Valuation {
        match x.order() {
            None => Valuation::Infinite,
            Some(v) => Valuation::Finite(v),
        }
    }

    fn uniformizer_pow(&self, e: &BigRational) -> Result<Puiseux> {
        Ok(Puiseux::monomial(BigRational::one(), e.clone()))
    }

    /// Truncation of the expansion of `x` below `t^gamma`.
    fn reduce_mod(&self, x: &Puiseux, gamma: &BigRational) -> Puiseux {
        if x.is_zero() {
            return Puiseux::zero();
        }
        // coefficient k sits at exponent (shift + k) / ram; keep those < gamma
        let bound = gamma * BigRational::from_integer((x.ram as i64).into()) - BigRational::from_integer(x.shift.into());
        let count = bound.ceil().to_integer().to_i64().unwrap_or(0).max(0) as usize;
        if count == 0 {
            return Puiseux::zero();
        }
        let coeffs = x.series(count);
        Puiseux::normalize(coeffs, vec![BigRational::one()], x.shift, x.ram)
    }

    fn from_rational(&self, r: BigRational) -> Puiseux {
        Puiseux::constant(r)
    }

    fn residue_cardinality(&self) -> Option<u64> {
        None
    }

    fn is_discrete(&self) -> bool {
        false
    }

    fn random_integral<R: Rng + ?Sized>(&self, rng: &mut R) -> Puiseux {
        let ram: i64 = [1, 2, 3][rng.gen_range(0..3)];
        let terms: Vec<Term> = (0..rng.gen_range(1..=3))
            .map(|_| Term {
                c: BigRational::from_integer(rng.gen_range(-4i64..=4).into()),
                e: BigRational::new(rng.gen_range(0i64..=2 * ram).into(), ram.into()),
            })
            .collect();
        let x = Puiseux::from_terms(&terms);
        if rng.gen_bool(0.2) {
            let c: i64 = rng.gen_range(1..=3);
            let den = Puiseux::from_terms(&[
                Term { c: BigRational::one(), e: BigRational::zero() },
                Term { c: BigRational::from_integer(c.into()), e: BigRational::one() },
            ]);
            x.div_ref(&den).expect("1 + c t is nonzero")
        } else {
            x
        }
    }

    fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Puiseux {
        let c = loop {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                break c;
            }
        };
        let tail = self.random_integral(rng).mul_ref(&Puiseux::monomial(BigRational::one(), BigRational::new(1.into(), 2.into())));
        Puiseux::constant(BigRational::from_integer(c.into())).add_ref(&tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rat};
    use proptest::prelude::*;

    fn t(e: BigRational) -> Puiseux {
        Puiseux::monomial(int(1), e)
    }

    fn term(c: i64, e: BigRational) -> Term {
        Term { c: int(c), e }
    }

    #[test]
    fn valuation_examples() {
        let f = PuiseuxField;
        // t^(3/2) + t^2
        let x = t(rat(3, 2)).add_ref(&t(int(2)));
        assert_eq!(x.ramification(), 2);
        assert_eq!(f.valuation(&x), Valuation::Finite(rat(3, 2)));
        assert_eq!(f.valuation(&Puiseux::zero()), Valuation::Infinite);
    }

    #[test]
    fn division_subtracts_exponents() {
        let q = t(int(1)).div_ref(&t(rat(1, 2))).unwrap();
        assert_eq!(q, t(rat(1, 2)));
        assert_eq!(q.ramification(), 2);
        assert_eq!(t(int(1)).div_ref(&Puiseux::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn canonical_form() {
        // (t - t^2)/(t - t^3) = 1/(1 + t)
        let a = Puiseux::from_fraction(&[term(1, int(1)), term(-1, int(2))], &[term(1, int(1)), term(-1, int(3))]).unwrap();
        let b = Puiseux::from_fraction(&[term(1, int(0))], &[term(1, int(0)), term(1, int(1))]).unwrap();
        assert_eq!(a, b);
        // t^(2/4) reduces to ramification 2
        assert_eq!(Puiseux::monomial(int(3), rat(2, 4)).ramification(), 2);
        let x = t(rat(1, 3)).mul_ref(&t(rat(2, 3)));
        assert_eq!(x, t(int(1)));
        assert_eq!(x.ramification(), 1);
        assert_eq!(t(rat(1, 2)).sub_ref(&t(rat(1, 2))), Puiseux::zero());
    }

    #[test]
    fn residue_of_geometric_series() {
        let f = PuiseuxField;
        let x = Puiseux::from_fraction(&[term(1, int(0))], &[term(1, int(0)), term(-1, int(1))]).unwrap();
        let r = f.residue_reduce(&x, &Valuation::from_int(2)).unwrap();
        assert_eq!(r, Puiseux::from_terms(&[term(1, int(0)), term(1, int(1))]));
        // remainder t^2/(1 - t)
        assert_eq!(f.valuation(&x.sub_ref(&r)), Valuation::from_int(2));
        let bad = t(rat(-1, 2));
        assert!(matches!(f.residue_reduce(&bad, &Valuation::from_int(1)), Err(Error::NotIntegral(_))));
    }

    #[test]
    fn reduce_mod_truncates_laurent_part() {
        let f = PuiseuxField;
        // t^(-1) + 1 + t^(1/2) modulo t^(1/2) O is t^(-1) + 1
        let x = Puiseux::from_terms(&[term(1, int(-1)), term(1, int(0)), term(1, rat(1, 2))]);
        let r = f.reduce_mod(&x, &rat(1, 2));
        assert_eq!(r, Puiseux::from_terms(&[term(1, int(-1)), term(1, int(0))]));
        assert_eq!(f.reduce_mod(&x, &int(-1)), Puiseux::zero());
    }

    #[test]
    fn terms_round_trip_and_display() {
        let x = Puiseux::from_fraction(&[term(2, rat(-1, 2)), term(-1, int(1))], &[term(1, int(0)), term(3, rat(1, 3))]).unwrap();
        let (n, d) = x.to_terms();
        assert_eq!(Puiseux::from_fraction(&n, &d).unwrap(), x);
        assert_eq!(t(rat(3, 2)).add_ref(&t(int(2))).to_string(), "t^(3/2) + t^2");
    }

    fn arb_puiseux() -> impl Strategy<Value = Puiseux> {
        let term = (-3i64..=3, -4i64..=6, prop::sample::select(vec![1i64, 2, 3]))
            .prop_map(|(c, n, d)| Term { c: int(c), e: rat(n, d) });
        (prop::collection::vec(term.clone(), 1..4), prop::collection::vec(term, 0..2)).prop_map(|(n, d)| {
            let mut den = d;
            den.push(Term { c: int(1), e: int(0) });
            Puiseux::from_fraction(&n, &den).unwrap_or_else(|_| Puiseux::from_terms(&n))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ultrametric_and_multiplicative(x in arb_puiseux(), y in arb_puiseux()) {
            let f = PuiseuxField;
            let (vx, vy) = (f.valuation(&x), f.valuation(&y));
            let vs = f.valuation(&x.add_ref(&y));
            prop_assert!(vs >= vx.clone().min(vy.clone()));
            if vx != vy {
                prop_assert_eq!(vs, vx.clone().min(vy.clone()));
            }
            prop_assert_eq!(f.valuation(&x.mul_ref(&y)), vx.clone() + vy);
            if !x.is_zero() {
                prop_assert_eq!(x.mul_ref(&x.inv().unwrap()), Puiseux::one());
                prop_assert_eq!(f.valuation(&x.inv().unwrap()) + vx, Valuation::zero());
            }
        }

        #[test]
        fn field_axioms(x in arb_puiseux(), y in arb_puiseux(), z in arb_puiseux()) {
            prop_assert_eq!(x.add_ref(&y).mul_ref(&z), x.mul_ref(&z).add_ref(&y.mul_ref(&z)));
            prop_assert_eq!(x.add_ref(&y).sub_ref(&y), x.clone());
        }

        #[test]
        fn residue_idempotent_and_canonical(x in arb_puiseux(), u in arb_puiseux(), g in 0i64..4, gd in 1i64..3) {
            let f = PuiseuxField;
            prop_assume!(f.valuation(&x) >= Valuation::zero());
            prop_assume!(f.valuation(&u) >= Valuation::zero());
            let gamma = Valuation::Finite(rat(g, gd));
            let r = f.residue_reduce(&x, &gamma).unwrap();
            prop_assert_eq!(f.residue_reduce(&r, &gamma).unwrap(), r.clone());
            prop_assert!(r.is_zero() || f.valuation(&r) < gamma);
            prop_assert!(f.valuation(&x.sub_ref(&r)) >= gamma);
            let y = x.add_ref(&t(rat(g, gd)).mul_ref(&u));
            prop_assert_eq!(f.residue_reduce(&y, &gamma).unwrap(), r);
        }
    }
}
