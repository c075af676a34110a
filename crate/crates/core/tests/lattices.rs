use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use valtrop::field::{PAdic, PuiseuxField, Scalar, Valuation, ValuedField};
use valtrop::lattice::random_lattice;
use valtrop::{entropy_vector, sample_valuations, EntropyMethod, Exec, Lattice, Matrix, Subset};

/// Leibniz determinant, independent of the elimination code.
fn leibniz<E: Scalar>(m: &Matrix<E>) -> E {
    let n = m.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = E::zero();
    permutations(&mut perm, 0, &mut |p| {
        let mut sign = 1;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    sign = -sign;
                }
            }
        }
        let term = (0..n).fold(E::one(), |acc, i| acc.mul_ref(&m[(i, p[i])]));
        total = if sign > 0 { total.add_ref(&term) } else { total.sub_ref(&term) };
    });
    total
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect()
}

/// `min over k x k minors` of the rows `rows`.
fn minor_valuation<F: ValuedField>(f: &F, a: &Matrix<F::Elem>, rows: &[usize]) -> Valuation {
    combinations(a.cols(), rows.len())
        .into_iter()
        .map(|cols| f.valuation(&leibniz(&a.submatrix(rows, &cols))))
        .min()
        .unwrap()
}

fn val_det<F: ValuedField>(l: &Lattice<F>) -> BigRational {
    l.field().valuation(&leibniz(l.basis())).finite().unwrap().clone()
}

fn padic_lattice(seed: u64, d: usize, p: u64) -> Lattice<PAdic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_lattice(&PAdic::new(p).unwrap(), d, -2, 3, &mut rng)
}

fn puiseux_lattice(seed: u64, d: usize) -> Lattice<PuiseuxField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_lattice(&PuiseuxField, d, -2, 2, &mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_minimal_minor_valuation(seed in any::<u64>(), d in 1usize..=4, p in prop::sample::select(vec![2u64, 3, 5])) {
        let l = padic_lattice(seed, d, p);
        let h = entropy_vector(&l, EntropyMethod::Hnf, Exec::Sequential);
        for s in Subset::all(d).filter(|s| !s.is_empty()) {
            let v = minor_valuation(l.field(), l.basis(), &s.indices());
            prop_assert_eq!(Valuation::Finite(h.get(s).clone()), v);
        }
    }

    #[test]
    fn puiseux_entropy_is_minimal_minor_valuation(seed in any::<u64>(), d in 1usize..=3) {
        let l = puiseux_lattice(seed, d);
        let h = entropy_vector(&l, EntropyMethod::Iterative, Exec::Sequential);
        for s in Subset::all(d).filter(|s| !s.is_empty()) {
            let v = minor_valuation(l.field(), l.basis(), &s.indices());
            prop_assert_eq!(Valuation::Finite(h.get(s).clone()), v);
        }
    }

    #[test]
    fn smith_matches_determinantal_divisors(seed in any::<u64>(), d in 1usize..=4, p in prop::sample::select(vec![2u64, 3])) {
        let l = padic_lattice(seed, d, p);
        let f = l.field();
        let s = l.smith();
        prop_assert!(s.u.is_unimodular(f));
        prop_assert!(s.v.is_unimodular(f));
        prop_assert_eq!(&s.u.mul(&s.d).unwrap().mul(&s.v).unwrap(), l.basis());
        let exps: Vec<BigRational> = (0..d).map(|i| f.valuation(&s.d[(i, i)]).finite().unwrap().clone()).collect();
        for (i, e) in exps.iter().enumerate() {
            for j in (0..d).filter(|&j| j != i) {
                prop_assert!(s.d[(i, j)].is_zero());
            }
            prop_assert_eq!(&s.d[(i, i)], &f.uniformizer_pow(e).unwrap());
        }
        // the k-th determinantal divisor is the sum of the first k exponents
        let mut partial = BigRational::zero();
        for k in 1..=d {
            partial += &exps[k - 1];
            let dk = combinations(d, k)
                .into_iter()
                .map(|rows| minor_valuation(f, l.basis(), &rows))
                .min()
                .unwrap();
            prop_assert_eq!(dk, Valuation::Finite(partial.clone()));
        }
    }

    #[test]
    fn hnf_is_canonical_and_spans(seed in any::<u64>(), d in 1usize..=4, p in prop::sample::select(vec![2u64, 3, 5])) {
        let l = padic_lattice(seed, d, p);
        let f = l.field();
        let h = l.hermite_normal_form();
        let same = Lattice::new(f.clone(), h.clone()).unwrap();
        prop_assert!(same.equals(&l));
        for i in 0..d {
            for j in i + 1..d {
                prop_assert!(h[(i, j)].is_zero());
            }
            let a = f.valuation(&h[(i, i)]).finite().unwrap().clone();
            prop_assert_eq!(&h[(i, i)], &f.uniformizer_pow(&a).unwrap());
            for j in 0..i {
                prop_assert_eq!(&f.reduce_mod(&h[(i, j)], &a), &h[(i, j)]);
            }
        }
        prop_assert_eq!(same.hermite_normal_form(), h);
    }

    #[test]
    fn sum_and_intersection_satisfy_the_index_identity(s1 in any::<u64>(), s2 in any::<u64>(), d in 1usize..=3, p in prop::sample::select(vec![2u64, 3])) {
        let a = padic_lattice(s1, d, p);
        let b = padic_lattice(s2, d, p);
        let sum = a.sum(&b).unwrap();
        let meet = a.intersect(&b).unwrap();
        prop_assert!(a.is_sublattice_of(&sum) && b.is_sublattice_of(&sum));
        prop_assert!(meet.is_sublattice_of(&a) && meet.is_sublattice_of(&b));
        // [A + B : A] = [B : A cap B]
        prop_assert_eq!(val_det(&sum) + val_det(&meet), val_det(&a) + val_det(&b));
        for j in 0..d {
            prop_assert!(sum.contains(&a.basis().col(j)).unwrap());
            prop_assert!(sum.contains(&b.basis().col(j)).unwrap());
        }
    }

    #[test]
    fn dual_pairs_integrally(seed in any::<u64>(), d in 1usize..=4, p in prop::sample::select(vec![2u64, 3])) {
        let l = padic_lattice(seed, d, p);
        let dual = l.dual();
        let pairing = l.basis().transpose().mul(dual.basis()).unwrap();
        prop_assert!(pairing.is_unimodular(l.field()));
        prop_assert_eq!(val_det(&dual), -val_det(&l));
        prop_assert!(dual.dual().equals(&l));
    }

    #[test]
    fn sampling_is_policy_independent(seed in any::<u64>()) {
        let l = padic_lattice(seed, 2, 3);
        let a = sample_valuations(&l, 5000, 25, seed, Exec::Sequential).unwrap();
        let b = sample_valuations(&l, 5000, 25, seed, Exec::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn samples_lie_in_the_lattice_support() {
    let l = padic_lattice(99, 3, 2);
    let (_, b) = l.diagonal_envelopes();
    let batch = sample_valuations(&l, 20_000, 30, 4, Exec::default()).unwrap();
    for v in &batch.valuations {
        for (x, lo) in v.iter().zip(&b) {
            assert!(BigRational::from_integer((*x).into()) >= *lo);
        }
    }
    assert!(batch.usable());
    assert!(batch.censored_fraction() < 0.01);
}
