//! Entropy vectors `H(L) = (h_I(L))_I`: the valuation of the covolume of each
//! coordinate projection.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{parse_rational, ValuedField};
use crate::lattice::{hermite_normal_form, Lattice};
use crate::subset::{Subset, MAX_DIM};

/// `h_I` for every subset `I` of `[d]`, indexed by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyVector {
    d: usize,
    values: Vec<BigRational>,
}

impl EntropyVector {
    /// Builds from values in bitmask order. `values[0]` (the empty set) must be 0.
    pub fn from_values(d: usize, values: Vec<BigRational>) -> Result<Self> {
        if d > MAX_DIM || values.len() != 1 << d {
            return Err(Error::Dimension(format!("expected 2^{d} entropy values, got {}", values.len())));
        }
        if !values[0].is_zero() {
            return Err(Error::InvalidArgument("entropy of the empty set must be 0".into()));
        }
        Ok(EntropyVector { d, values })
    }

    /// `h_I = sum_{i in I} a_i`, the entropy vector of a diagonal lattice.
    pub fn additive(a: &[BigRational]) -> Self {
        let values = Subset::all(a.len()).map(|s| s.indices().iter().map(|&i| &a[i]).sum()).collect();
        EntropyVector { d: a.len(), values }
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

    /// `h_[d]`, the entropy of the whole lattice.
    pub fn total(&self) -> &BigRational {
        self.values.last().expect("at least the empty set")
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(BigRational::is_integer)
    }

    /// `(I, h_I)` ordered by cardinality, then lexicographically.
    pub fn entries(&self) -> Vec<(Subset, &BigRational)> {
        Subset::by_cardinality(self.d).into_iter().map(|s| (s, self.get(s))).collect()
    }

    /// JSON object keyed `""`, `"1"`, `"1,2"`, ... with rational strings.
    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> =
            self.entries().into_iter().map(|(s, h)| (s.key(), Value::String(h.to_string()))).collect();
        Value::Object(map)
    }

    pub fn from_json(d: usize, value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::MalformedFile("entropy vector must be an object".into()))?;
        let mut values = vec![None; 1 << d];
        for (k, v) in obj {
            let s = Subset::parse(k, d)?;
            let h = match v {
                Value::String(t) => parse_rational(t)?,
                Value::Number(n) => parse_rational(&n.to_string())?,
                _ => return Err(Error::MalformedFile(format!("bad entropy value for {k:?}"))),
            };
            values[s.bits() as usize] = Some(h);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::MalformedFile(format!("missing subset {}", Subset::from_bits(i as u32)))))
            .collect::<Result<Vec<_>>>()?;
        EntropyVector::from_values(d, values)
    }
}

impl fmt::Display for EntropyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().iter().map(|(s, h)| format!("{{{s}}}:{h}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EntropyMethod {
    Minors,
    #[default]
    Hnf,
    Iterative,
}

impl EntropyMethod {
    pub const ALL: [EntropyMethod; 3] = [EntropyMethod::Minors, EntropyMethod::Hnf, EntropyMethod::Iterative];
}

impl FromStr for EntropyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minors" => Ok(EntropyMethod::Minors),
            "hnf" => Ok(EntropyMethod::Hnf),
            "iterative" => Ok(EntropyMethod::Iterative),
            _ => Err(Error::InvalidArgument(format!("unknown entropy method {s:?}"))),
        }
    }
}

impl fmt::Display for EntropyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntropyMethod::Minors => "minors",
            EntropyMethod::Hnf => "hnf",
            EntropyMethod::Iterative => "iterative",
        })
    }
}

fn finite<F: ValuedField>(field: &F, x: &F::Elem) -> BigRational {
    field.valuation(x).expect_finite("entropy").expect("nonzero determinant")
}

/// `h(L) = val(det A)`.
pub fn entropy_total<F: ValuedField>(l: &Lattice<F>) -> BigRational {
    finite(l.field(), &l.basis().det().expect("square"))
}

/// `min_J val det A_{I x J}` over column sets of size `|I|`.
pub fn entropy_subset_minors<F: ValuedField>(l: &Lattice<F>, subset: Subset) -> BigRational {
    if subset.is_empty() {
        return BigRational::zero();
    }
    let rows = subset.indices();
    Subset::of_size(l.dim(), rows.len())
        .map(|cols| l.field().valuation(&l.basis().submatrix(&rows, &cols.indices()).det().expect("square")))
        .min()
        .expect("some column set")
        .expect_finite("minor")
        .expect("rows of an invertible matrix have a nonzero maximal minor")
}

/// Entropy of the projection, read off the diagonal of its Hermite form.
pub fn entropy_subset_hnf<F: ValuedField>(l: &Lattice<F>, subset: Subset) -> BigRational {
    if subset.is_empty() {
        return BigRational::zero();
    }
    let h = hermite_normal_form(l.field(), &l.basis().select_rows(&subset.indices())).expect("full row rank");
    (0..h.rows()).map(|i| finite(l.field(), &h[(i, i)])).sum()
}

/// Last coordinate of the inner diagonal envelope of the projection onto
/// `subset`, coordinates kept in increasing order.
fn last_inner_exponent<F: ValuedField>(l: &Lattice<F>, subset: Subset) -> BigRational {
    let projected = l.project(subset).expect("nonempty subset");
    let (a, _) = projected.diagonal_envelopes();
    a.last().expect("nonempty").clone()
}

pub fn entropy_vector<F: ValuedField>(l: &Lattice<F>, method: EntropyMethod, exec: Exec) -> EntropyVector {
    let d = l.dim();
    assert!(d <= MAX_DIM, "dimension {d} too large for an entropy vector");
    let n = 1usize << d;
    let values = match method {
        EntropyMethod::Minors => exec.map_range(n, |b| entropy_subset_minors(l, Subset::from_bits(b as u32))),
        EntropyMethod::Hnf => exec.map_range(n, |b| entropy_subset_hnf(l, Subset::from_bits(b as u32))),
        EntropyMethod::Iterative => {
            // increments are independent of each other; accumulate in bitmask
            // order, where I \ {max I} always precedes I
            let inc = exec.map_range(n, |b| {
                let s = Subset::from_bits(b as u32);
                if s.is_empty() {
                    BigRational::zero()
                } else {
                    last_inner_exponent(l, s)
                }
            });
            let mut h = vec![BigRational::zero(); n];
            for b in 1..n {
                let s = Subset::from_bits(b as u32);
                let prev = s.without(s.max().expect("nonempty"));
                h[b] = &h[prev.bits() as usize] + &inc[b];
            }
            h
        }
    };
    EntropyVector { d, values }
}

/// `min over |I| = |J| = ell of val det A_{I x J} + sum_{i not in I} v_i`.
pub fn ell_distance<F: ValuedField>(l: &Lattice<F>, v: &[BigRational], ell: usize) -> Result<BigRational> {
    let d = l.dim();
    if v.len() != d {
        return Err(Error::Dimension(format!("vector of length {} for dimension {d}", v.len())));
    }
    if ell > d {
        return Err(Error::InvalidArgument(format!("ell = {ell} exceeds d = {d}")));
    }
    let total: BigRational = v.iter().sum();
    let best = Subset::of_size(d, ell)
        .flat_map(|rows| Subset::of_size(d, ell).map(move |cols| (rows, cols)))
        .filter_map(|(rows, cols)| {
            let minor = if ell == 0 {
                F::Elem::one()
            } else {
                l.basis().submatrix(&rows.indices(), &cols.indices()).det().expect("square")
            };
            let val = l.field().valuation(&minor).finite()?.clone();
            let inside: BigRational = rows.indices().iter().map(|&i| &v[i]).sum();
            Some(val + &total - inside)
        })
        .min()
        .expect("rows of an invertible matrix have a nonzero minor of every size");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, PAdic, PuiseuxField};
    use crate::lattice::{random_lattice, random_unimodular, DiagonalLattice};
    use crate::matrix::Matrix;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lat(p: i64, rows: &[&[i64]]) -> Lattice<PAdic> {
        let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap();
        Lattice::new(PAdic::new(p as u64).unwrap(), m).unwrap()
    }

    fn ex2(p: i64) -> Lattice<PAdic> {
        lat(p, &[&[1, 0], &[p, p * p]])
    }

    fn ex3(p: i64) -> Lattice<PAdic> {
        lat(p, &[&[1, 0, 0], &[1, p * p, 0], &[1, p, p * p]])
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn keyed(h: &EntropyVector) -> Vec<(String, BigRational)> {
        h.entries().into_iter().map(|(s, v)| (s.key(), v.clone())).collect()
    }

    #[test]
    fn totals() {
        assert_eq!(entropy_total(&Lattice::standard(PAdic::new(2).unwrap(), 3)), int(0));
        assert_eq!(entropy_total(&ex2(3)), int(2));
        let f = PAdic::new(5).unwrap();
        assert_eq!(entropy_total(&DiagonalLattice::from_ints(&[2, -1, 4]).to_lattice(&f).unwrap()), int(5));
    }

    #[test]
    fn subset_examples() {
        let l = ex3(3);
        assert_eq!(entropy_subset_minors(&l, Subset::parse("1,2", 3).unwrap()), int(2));
        assert_eq!(entropy_subset_minors(&l, Subset::parse("1,3", 3).unwrap()), int(1));
        assert_eq!(entropy_subset_minors(&l, Subset::EMPTY), int(0));
        assert_eq!(entropy_subset_hnf(&ex2(3), Subset::parse("2", 2).unwrap()), int(1));
        assert_eq!(entropy_subset_hnf(&l, Subset::parse("2,3", 3).unwrap()), int(1));
    }

    #[test]
    fn vectors_of_examples() {
        for p in [2, 3, 5] {
            for m in EntropyMethod::ALL {
                let h = entropy_vector(&ex2(p), m, Exec::Sequential);
                assert_eq!(keyed(&h).into_iter().map(|x| x.1).collect::<Vec<_>>(), ints(&[0, 0, 1, 2]), "{m}");
                let h = entropy_vector(&ex3(p), m, Exec::default());
                assert_eq!(
                    keyed(&h).into_iter().map(|x| x.1).collect::<Vec<_>>(),
                    ints(&[0, 0, 0, 0, 2, 1, 1, 4]),
                    "{m}"
                );
            }
        }
    }

    #[test]
    fn diagonal_vector() {
        let f = PAdic::new(3).unwrap();
        let a = ints(&[1, -2, 3]);
        let l = DiagonalLattice::new(a.clone()).to_lattice(&f).unwrap();
        for m in EntropyMethod::ALL {
            assert_eq!(entropy_vector(&l, m, Exec::Sequential), EntropyVector::additive(&a));
        }
    }

    #[test]
    fn json_round_trip() {
        let h = entropy_vector(&ex3(3), EntropyMethod::Hnf, Exec::Sequential);
        let j = h.to_json();
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            r#"{"":"0","1":"0","2":"0","3":"0","1,2":"2","1,3":"1","2,3":"1","1,2,3":"4"}"#
        );
        assert_eq!(EntropyVector::from_json(3, &j).unwrap(), h);
        assert!(EntropyVector::from_json(2, &j).is_err());
    }

    #[test]
    fn ell_distance_examples() {
        let l = ex3(3);
        let v = ints(&[2, -1, 5]);
        assert_eq!(ell_distance(&l, &v, 0).unwrap(), int(6));
        assert_eq!(ell_distance(&l, &v, 3).unwrap(), entropy_total(&l));
        assert_eq!(ell_distance(&ex2(3), &ints(&[0, 0]), 1).unwrap(), int(0));
        assert!(ell_distance(&l, &v, 4).is_err());
    }

    /// `max_I (v_I - h_I) = -min_ell (ell_distance - sum v)`.
    #[test]
    fn bridge_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = PAdic::new(2).unwrap();
        for _ in 0..10 {
            let l = random_lattice(&f, 3, -1, 3, &mut rng);
            let h = entropy_vector(&l, EntropyMethod::Hnf, Exec::Sequential);
            for x in -2..4 {
                for y in -2..4 {
                    let v = ints(&[x, y, 1 - x]);
                    let sum: BigRational = v.iter().sum();
                    let lhs = Subset::all(3)
                        .map(|s| s.indices().iter().map(|&i| &v[i]).sum::<BigRational>() - h.get(s))
                        .max()
                        .unwrap();
                    let rhs = (0..=3).map(|e| ell_distance(&l, &v, e).unwrap() - &sum).min().unwrap();
                    assert_eq!(lhs, -rhs);
                }
            }
        }
    }

    #[test]
    fn puiseux_methods_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..6 {
            let l = random_lattice(&PuiseuxField, 3, -1, 2, &mut rng);
            let h = entropy_vector(&l, EntropyMethod::Hnf, Exec::Sequential);
            assert_eq!(h, entropy_vector(&l, EntropyMethod::Minors, Exec::Sequential));
            assert_eq!(h, entropy_vector(&l, EntropyMethod::Iterative, Exec::Sequential));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn methods_agree_and_covariance(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = PAdic::new(p).unwrap();
            let d = 2 + (seed % 3) as usize;
            let l = random_lattice(&f, d, -2, 3, &mut rng);
            let h = entropy_vector(&l, EntropyMethod::Minors, Exec::Sequential);
            prop_assert!(h.is_integral());
            prop_assert_eq!(&h, &entropy_vector(&l, EntropyMethod::Hnf, Exec::Parallel));
            prop_assert_eq!(&h, &entropy_vector(&l, EntropyMethod::Iterative, Exec::Sequential));

            // representative independence
            let u = random_unimodular(&f, d, seed ^ 0x5a5a);
            prop_assert_eq!(&h, &entropy_vector(&l.with_basis_change(&u).unwrap(), EntropyMethod::Hnf, Exec::Sequential));

            // diagonal scaling
            let shifts: Vec<i64> = (0..d).map(|i| (seed >> (8 * i)) as i64 % 5 - 2).collect();
            let diag: Vec<BigRational> = shifts.iter().map(|&k| f.uniformizer_pow(&int(k)).unwrap() * int(1 + p as i64)).collect();
            let scaled = entropy_vector(&l.scale_rows(&diag).unwrap(), EntropyMethod::Hnf, Exec::Sequential);
            for s in Subset::all(d) {
                let extra: i64 = s.indices().iter().map(|&i| shifts[i]).sum();
                prop_assert_eq!(scaled.get(s), &(h.get(s) + int(extra)));
            }

            // permutation
            let mut sigma: Vec<usize> = (0..d).collect();
            sigma.rotate_left((seed % d as u64) as usize);
            let permuted = entropy_vector(&l.permute(&sigma).unwrap(), EntropyMethod::Hnf, Exec::Sequential);
            for s in Subset::all(d) {
                prop_assert_eq!(permuted.get(s), h.get(s.map(&sigma)));
            }

            // top-level recursion through the inner envelope
            let (a, _) = l.diagonal_envelopes();
            let top = Subset::full(d);
            prop_assert_eq!(h.get(top), &(h.get(top.without(d - 1)) + &a[d - 1]));
        }
    }
}
