use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::{FieldDescriptor, Valuation, ValuedField};
use crate::error::{Error, Result};

/// The rationals with the `p`-adic valuation, a dense subfield of `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdic {
    p: u64,
    p_big: BigInt,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

impl PAdic {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::CompositeModulus(p));
        }
        Ok(PAdic { p, p_big: BigInt::from(p) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_big(&self) -> &BigInt {
        &self.p_big
    }

    /// `v_p(n)` for a nonzero integer.
    pub fn int_valuation(&self, n: &BigInt) -> i64 {
        debug_assert!(!n.is_zero());
        let mut v = 0;
        let mut m = n.clone();
        loop {
            let (q, r) = m.div_rem(&self.p_big);
            if !r.is_zero() {
                return v;
            }
            m = q;
            v += 1;
        }
    }

    pub fn pow(&self, e: u32) -> BigInt {
        num_traits::pow(self.p_big.clone(), e as usize)
    }

    /// `x mod p^k` as an integer in `[0, p^k)`, for `x` with `v_p(x) >= 0`.
    pub fn integral_residue(&self, x: &BigRational, k: u32) -> BigInt {
        let modulus = self.pow(k);
        let den_inv = mod_inverse(x.denom(), &modulus);
        (x.numer() * den_inv).mod_floor(&modulus)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "denominator not invertible modulo p^k");
    e.x.mod_floor(m)
}

impl ValuedField for PAdic {
    type Elem = BigRational;

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::PAdic { p: self.p }
    }

    fn valuation(&self, x: &BigRational) -> Valuation {
        if x.is_zero() {
            return Valuation::Infinite;
        }
        Valuation::from_int(self.int_valuation(x.numer()) - self.int_valuation(x.denom()))
    }

    fn uniformizer_pow(&self, e: &BigRational) -> Result<BigRational> {
        if !e.is_integer() {
            return Err(Error::InvalidArgument(format!("p^{e} is not in Q (value group is Z)")));
        }
        let k = e
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::InvalidArgument(format!("exponent {e} out of range")))?;
        let pk = BigRational::from_integer(self.pow(k.unsigned_abs() as u32));
        Ok(if k >= 0 { pk } else { pk.recip() })
    }

    fn reduce_mod(&self, x: &BigRational, gamma: &BigRational) -> BigRational {
        let g = gamma.ceil().to_integer().to_i64().expect("precision out of range");
        let v = match self.valuation(x) {
            Valuation::Infinite => return BigRational::zero(),
            Valuation::Finite(v) => v.to_integer().to_i64().unwrap(),
        };
        if v >= g {
            return BigRational::zero();
        }
        // shift into the valuation ring, reduce, shift back
        let m = (-v).max(0);
        let scale = BigRational::from_integer(self.pow(m as u32));
        let y = x * &scale;
        let r = self.integral_residue(&y, (g + m) as u32);
        BigRational::from_integer(r) / scale
    }

    fn from_rational(&self, r: BigRational) -> BigRational {
        r
    }

    fn residue_cardinality(&self) -> Option<u64> {
        Some(self.p)
    }

    fn is_discrete(&self) -> bool {
        true
    }

    fn random_integral<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let num: i64 = rng.gen_range(-12..=12);
        let den = loop {
            let d: u64 = rng.gen_range(1..=7);
            if !d.is_multiple_of(self.p) {
                break d;
            }
        };
        BigRational::new(num.into(), (den as i64).into())
    }

    fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        loop {
            let x = self.random_integral(rng);
            if !x.is_zero() && !(x.numer() % &self.p_big).is_zero() {
                return x;
            }
        }
    }
}
