//! Dense univariate polynomials over `Q`, coefficient `i` of `s^i`.
//! The zero polynomial is the empty vector; no trailing zeros otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub(crate) type Poly = Vec<BigRational>;

pub(crate) fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn add(a: &[BigRational], b: &[BigRational]) -> Poly {
    let mut out: Poly = (0..a.len().max(b.len()))
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn neg(a: &[BigRational]) -> Poly {
    a.iter().map(|c| -c).collect()
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn scale(a: &[BigRational], c: &BigRational) -> Poly {
    let mut out: Poly = a.iter().map(|x| x * c).collect();
    trim(&mut out);
    out
}

/// Multiply by `s^k`.
pub(crate) fn shift_up(a: &[BigRational], k: usize) -> Poly {
    if a.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); k];
    out.extend_from_slice(a);
    out
}

/// Substitute `s -> s^k`.
pub(crate) fn spread(a: &[BigRational], k: usize) -> Poly {
    if k == 1 || a.is_empty() {
        return a.to_vec();
    }
    let mut out = vec![BigRational::zero(); (a.len() - 1) * k + 1];
    for (i, c) in a.iter().enumerate() {
        out[i * k] = c.clone();
    }
    out
}

/// Euclidean division; `b` must be nonzero.
pub(crate) fn divrem(a: &[BigRational], b: &[BigRational]) -> (Poly, Poly) {
    let lead = b.last().expect("division by zero polynomial");
    let mut rem = a.to_vec();
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let k = rem.len() - b.len();
        let c = rem.last().unwrap() / lead;
        for (i, bc) in b.iter().enumerate() {
            rem[k + i] -= &c * bc;
        }
        quot[k] = c;
        rem.pop();
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

fn residue(c: &BigRational) -> Option<u64> {
    let p = BigInt::from(PRIME);
    let n = c.numer().mod_floor(&p).to_u64()?;
    let d = c.denom().mod_floor(&p).to_u64()?;
    (d != 0).then(|| mul_mod(n, inv_mod(d)))
}

fn reduce(a: &[BigRational]) -> Option<Vec<u64>> {
    let r: Vec<u64> = a.iter().map(residue).collect::<Option<_>>()?;
    // the leading coefficient must survive so degrees are preserved
    (*r.last()? != 0).then_some(r)
}

/// Monic `gcd(a, b)` over `F_p`. Its degree bounds the degree over `Q`.
fn gcd_mod_p(mut x: Vec<u64>, mut y: Vec<u64>) -> Vec<u64> {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    while !y.is_empty() {
        let inv = inv_mod(*y.last().unwrap());
        while x.len() >= y.len() && !x.is_empty() {
            let k = x.len() - y.len();
            let c = mul_mod(*x.last().unwrap(), inv);
            for (i, &yc) in y.iter().enumerate() {
                x[k + i] = (x[k + i] + PRIME - mul_mod(c, yc)) % PRIME;
            }
            trim(&mut x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    let inv = inv_mod(*x.last().expect("nonzero inputs"));
    x.iter().map(|&c| mul_mod(c, inv)).collect()
}

/// The fraction `n/d` with `|n|, |d| < sqrt(p/2)` congruent to `u`, if any.
fn reconstruct(u: u64) -> Option<BigRational> {
    let bound: i128 = 1 << 30;
    let (mut r0, mut r1) = (PRIME as i128, u as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 >= bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() >= bound {
        return None;
    }
    Some(BigRational::new(r1.into(), t1.into()))
}

/// Modular candidate for the monic gcd, checked by exact division. `None`
/// when the prime is unlucky or a coefficient does not reconstruct.
fn gcd_modular(a: &[BigRational], b: &[BigRational]) -> Option<Poly> {
    let g = gcd_mod_p(reduce(a)?, reduce(b)?);
    if g.len() == 1 {
        return Some(vec![BigRational::one()]);
    }
    let candidate: Poly = g.iter().map(|&c| reconstruct(c)).collect::<Option<_>>()?;
    let divides = |p: &[BigRational]| divrem(p, &candidate).1.is_empty();
    (divides(a) && divides(b)).then_some(candidate)
}

/// Monic greatest common divisor.
pub(crate) fn gcd(a: &[BigRational], b: &[BigRational]) -> Poly {
    if !a.is_empty() && !b.is_empty() {
        // a common divisor of full modular degree is the gcd
        if let Some(g) = gcd_modular(a, b) {
            return g;
        }
    }
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        // monic remainders keep coefficient growth in check
        y = match r.last() {
            Some(l) => scale(&r, &(BigRational::one() / l)),
            None => r,
        };
    }
    match x.last() {
        None => vec![],
        Some(l) => {
            let inv = BigRational::one() / l;
            scale(&x, &inv)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rat};

    fn p(cs: &[i64]) -> Poly {
        let mut v: Poly = cs.iter().map(|&c| int(c)).collect();
        trim(&mut v);
        v
    }

    #[test]
    fn divrem_reconstructs() {
        let a = p(&[-1, 0, 0, 1]); // s^3 - 1
        let b = p(&[-1, 1]); // s - 1
        let (q, r) = divrem(&a, &b);
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(r.is_empty());
        let (q, r) = divrem(&p(&[3, 2, 1]), &p(&[1, 1]));
        assert_eq!(add(&mul(&q, &p(&[1, 1])), &r), p(&[3, 2, 1]));
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let a = mul(&p(&[1, 1]), &p(&[2, 0, 1]));
        let b = mul(&p(&[1, 1]), &p(&[-3, 2]));
        assert_eq!(gcd(&a, &b), p(&[1, 1]));
        assert_eq!(gcd(&p(&[2]), &p(&[0, 5])), p(&[1]));
        let coprime = gcd(&p(&[1, 2, 3]), &p(&[5, 0, 7, 1]));
        assert_eq!(coprime, p(&[1]));
        let f = vec![rat(-2, 3), int(1)];
        let a = mul(&f, &p(&[3, 0, 1]));
        let b = mul(&mul(&f, &f), &p(&[2, 1]));
        assert_eq!(gcd_modular(&a, &b), Some(f.clone()));
        assert_eq!(gcd(&a, &b), f);
        // coefficients too large to reconstruct fall back to Euclid
        let big = vec![BigRational::new(BigInt::from(10).pow(30), 7.into()), int(1)];
        assert_eq!(gcd_modular(&mul(&big, &p(&[1, 1])), &mul(&big, &p(&[2, 1]))), None);
        assert_eq!(gcd(&mul(&big, &p(&[1, 1])), &mul(&big, &p(&[2, 1]))), big);
    }

    #[test]
    fn spread_and_shift() {
        assert_eq!(spread(&p(&[1, 2]), 3), p(&[1, 0, 0, 2]));
        assert_eq!(shift_up(&p(&[1, 2]), 2), p(&[0, 0, 1, 2]));
    }
}
