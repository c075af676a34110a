//! The tropical polynomial `phi(v) = max_I (v_I - h_I)` attached to an entropy
//! vector, its tail probabilities `Q(v) = q^-phi(v)`, and the point masses
//! obtained from the tail by inclusion-exclusion.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::entropy::{entropy_total, entropy_vector, EntropyMethod, EntropyVector};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::ValuedField;
use crate::lattice::{DiagonalLattice, Lattice};
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalPolynomial {
    coefficients: EntropyVector,
    q: Option<u64>,
}

impl TropicalPolynomial {
    /// `q` is the residue field size; `None` means no probabilistic reading.
    pub fn new(coefficients: EntropyVector, q: Option<u64>) -> Self {
        TropicalPolynomial { coefficients, q }
    }

    pub fn from_lattice<F: ValuedField>(l: &Lattice<F>, exec: Exec) -> Self {
        let h = entropy_vector(l, EntropyMethod::Hnf, exec);
        TropicalPolynomial { coefficients: h, q: l.field().residue_cardinality() }
    }

    pub fn coefficients(&self) -> &EntropyVector {
        &self.coefficients
    }

    pub fn d(&self) -> usize {
        self.coefficients.d()
    }

    pub fn q(&self) -> Option<u64> {
        self.q
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.d() {
            return Err(Error::Dimension(format!("point of length {n} for d = {}", self.d())));
        }
        Ok(())
    }

    /// `max_I (v_I - h_I)`. With a finite residue field the point must be
    /// integral.
    pub fn phi_eval(&self, v: &[BigRational]) -> Result<BigRational> {
        self.check_len(v.len())?;
        if self.q.is_some() && !v.iter().all(BigRational::is_integer) {
            return Err(Error::InvalidArgument("evaluation point must be integral for a discrete valuation".into()));
        }
        Ok(self.phi_unchecked(v))
    }

    fn phi_unchecked(&self, v: &[BigRational]) -> BigRational {
        Subset::all(self.d())
            .map(|s| s.indices().iter().map(|&i| &v[i]).sum::<BigRational>() - self.coefficients.get(s))
            .max()
            .expect("empty set term")
    }

    /// Integer-point evaluation.
    pub fn phi_at(&self, v: &[i64]) -> Result<BigRational> {
        self.check_len(v.len())?;
        Ok(self.phi_unchecked(&ints(v)))
    }

    fn require_q(&self) -> Result<u64> {
        self.q.ok_or(Error::RequiresPAdic)
    }

    /// `Q(v) = q^-phi(v)`, the probability that every `val(X_i) >= v_i`.
    pub fn tail_prob(&self, v: &[i64]) -> Result<BigRational> {
        let q = self.require_q()?;
        Ok(q_pow_neg(q, &self.phi_at(v)?))
    }

    /// `P(V = v)` by inclusion-exclusion over the corners of the unit cube at `v`.
    pub fn pmf_at(&self, v: &[i64]) -> Result<BigRational> {
        let q = self.require_q()?;
        self.check_len(v.len())?;
        let mut total = BigRational::zero();
        for s in Subset::all(self.d()) {
            let w: Vec<i64> = v.iter().enumerate().map(|(i, &x)| x + s.contains(i) as i64).collect();
            let t = q_pow_neg(q, &self.phi_unchecked(&ints(&w)));
            if s.len() % 2 == 0 {
                total += t;
            } else {
                total -= t;
            }
        }
        Ok(total)
    }

    /// Point masses on every integer point of `[lo, hi]`, in lexicographic order.
    pub fn pmf_box(&self, lo: &[i64], hi: &[i64], exec: Exec) -> Result<Vec<(Vec<i64>, BigRational)>> {
        let q = self.require_q()?;
        self.check_len(lo.len())?;
        self.check_len(hi.len())?;
        if lo.iter().zip(hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidArgument("box lower corner exceeds upper corner".into()));
        }
        let d = self.d();
        // tail on the box extended by one step in every direction
        let ext_hi: Vec<i64> = hi.iter().map(|x| x + 1).collect();
        let ext = grid(lo, &ext_hi);
        let tails = exec.map_slice(&ext, |v| q_pow_neg(q, &self.phi_unchecked(&ints(v))));
        let extents: Vec<usize> = lo.iter().zip(&ext_hi).map(|(a, b)| (b - a + 1) as usize).collect();
        let index = |v: &[i64]| v.iter().zip(lo).zip(&extents).fold(0usize, |acc, ((x, l), n)| acc * n + (x - l) as usize);
        let points = grid(lo, hi);
        let masses = exec.map_slice(&points, |v| {
            let mut total = BigRational::zero();
            let mut w = v.clone();
            for s in Subset::all(d) {
                for (i, x) in w.iter_mut().enumerate() {
                    *x = v[i] + s.contains(i) as i64;
                }
                let t = &tails[index(&w)];
                if s.len() % 2 == 0 {
                    total += t;
                } else {
                    total -= t;
                }
            }
            total
        });
        Ok(points.into_iter().zip(masses).collect())
    }

    /// One line per subset: `I:<1-based list> e:<indicator> h:<value>`.
    pub fn export_text(&self) -> String {
        let d = self.d();
        let mut out = String::new();
        for (s, h) in self.coefficients.entries() {
            let e: Vec<&str> = (0..d).map(|i| if s.contains(i) { "1" } else { "0" }).collect();
            writeln!(out, "I:{} e:{} h:{}", s.key(), e.join(","), h).expect("write to string");
        }
        out
    }
}

/// `h(L cap pi^v) - h(L)`, an evaluation of `phi` that never looks at the
/// entropy vector.
pub fn phi_oracle_intersection<F: ValuedField>(l: &Lattice<F>, v: &[BigRational]) -> Result<BigRational> {
    if v.len() != l.dim() {
        return Err(Error::Dimension(format!("point of length {} for d = {}", v.len(), l.dim())));
    }
    let diag = DiagonalLattice::new(v.to_vec()).to_lattice(l.field())?;
    Ok(entropy_total(&l.intersect(&diag)?) - entropy_total(l))
}

/// `q^-e` for an integer `e`.
pub fn q_pow_neg(q: u64, e: &BigRational) -> BigRational {
    debug_assert!(e.is_integer());
    let k: i64 = e.to_integer().try_into().expect("exponent in range");
    let base = BigInt::from(q);
    let mag = BigRational::from_integer(num_traits::pow(base, k.unsigned_abs() as usize));
    if k >= 0 {
        BigRational::one() / mag
    } else {
        mag
    }
}

/// Integer points of `[lo, hi]`, last coordinate varying fastest.
pub fn grid(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(lo.len())];
    for (a, b) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|p| {
                (*a..=*b).map(move |x| {
                    let mut p = p.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

pub(crate) fn ints(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}
