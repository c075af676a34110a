//! Lattices `A O^d` over a valued field, their Hermite and Smith forms, and
//! lattice algebra (projection, duality, sum, intersection, diagonal
//! envelopes).
//!
//! Hermite normal form convention: lower triangular, diagonal entries are
//! exact uniformizer powers `pi^a_i`, and every entry below the diagonal in
//! row `i` is either zero or the canonical representative of its class
//! modulo `pi^a_i O` (so its valuation is below `a_i`). This form is unique
//! per lattice.

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;



use crate::error::{Error, Result};
use crate::field::{Scalar, Valuation, ValuedField};
use crate::matrix::Matrix;
use crate::subset::Subset;

/// Hermite normal form of the lattice generated by the columns of `gens`
/// (a `d x n` matrix of rank `d`, `n >= d`). Returns a `d x d` matrix.
pub fn hermite_normal_form<F: ValuedField>(field: &F, gens: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>> {
    let (d, n) = (gens.rows(), gens.cols());
    if n < d {
        return Err(Error::Singular);
    }
    let mut m = gens.clone();
    let mut exps = Vec::with_capacity(d);
    for i in 0..d {
        // min-valuation pivot, lowest column index on ties
        let (j, v) = (i..n)
            .map(|j| (j, field.valuation(&m[(i, j)])))
            .min_by(|a, b| a.1.cmp(&b.1))
            .expect("nonempty column range");
        let Valuation::Finite(v) = v else {
            return Err(Error::Singular);
        };
        m.swap_cols(i, j);
        let unit = field.unit_part(&m[(i, i)])?;
        m.scale_col(i, &unit.inv()?);
        let pivot = m[(i, i)].clone();
        for j in i + 1..n {
            if !m[(i, j)].is_zero() {
                let c = m[(i, j)].div_ref(&pivot)?.neg_ref();
                m.add_col_multiple(j, i, &c);
            }
        }
        exps.push(v);
    }
    let cols: Vec<usize> = (0..d).collect();
    let mut h = m.select_cols(&cols);
    for j in (0..d).rev() {
        for i in j + 1..d {
            let x = h[(i, j)].clone();
            if x.is_zero() {
                continue;
            }
            let r = field.reduce_mod(&x, &exps[i]);
            if r != x {
                let q = x.sub_ref(&r).div_ref(&h[(i, i)])?;
                h.add_col_multiple(j, i, &q.neg_ref());
            }
        }
    }
    Ok(h)
}

/// `A = U D V` with `U, V` in `GL_d(O)` and `D` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith<E> {
    pub u: Matrix<E>,
    pub d: Matrix<E>,
    pub v: Matrix<E>,
}

/// Non-archimedean singular value decomposition. The diagonal of `D` holds
/// exact uniformizer powers with nondecreasing valuations.
pub fn smith_decomposition<F: ValuedField>(field: &F, a: &Matrix<F::Elem>) -> Result<Smith<F::Elem>> {
    if !a.is_square() {
        return Err(Error::Dimension("smith decomposition needs a square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut left = Matrix::identity(n);
    let mut right = Matrix::identity(n);
    for k in 0..n {
        let (p, q, v) = (k..n)
            .flat_map(|i| (k..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, field.valuation(&m[(i, j)])))
            .min_by(|x, y| x.2.cmp(&y.2))
            .expect("nonempty block");
        if !v.is_finite() {
            return Err(Error::Singular);
        }
        m.swap_rows(k, p);
        left.swap_rows(k, p);
        m.swap_cols(k, q);
        right.swap_cols(k, q);
        let unit_inv = field.unit_part(&m[(k, k)])?.inv()?;
        m.scale_row(k, &unit_inv);
        left.scale_row(k, &unit_inv);
        let pivot = m[(k, k)].clone();
        for i in k + 1..n {
            if !m[(i, k)].is_zero() {
                let c = m[(i, k)].div_ref(&pivot)?.neg_ref();
                m.add_row_multiple(i, k, &c);
                left.add_row_multiple(i, k, &c);
            }
        }
        for j in k + 1..n {
            if !m[(k, j)].is_zero() {
                let c = m[(k, j)].div_ref(&pivot)?.neg_ref();
                m.add_col_multiple(j, k, &c);
                right.add_col_multiple(j, k, &c);
            }
        }
    }
    Ok(Smith { u: left.inverse()?, d: m, v: right.inverse()? })
}

/// A full-rank lattice `A O^d`, stored through a representative `A`.
///
/// Equality is lattice equality (same coset `A GL_d(O)`), not entrywise
/// equality of representatives.
#[derive(Clone, Debug)]
pub struct Lattice<F: ValuedField> {
    field: F,
    basis: Matrix<F::Elem>,
}

impl<F: ValuedField> PartialEq for Lattice<F> {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl<F: ValuedField> Lattice<F> {
    pub fn new(field: F, basis: Matrix<F::Elem>) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::Dimension(format!(
                "representative must be square, got {}x{}",
                basis.rows(),
                basis.cols()
            )));
        }
        if basis.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Lattice { field, basis })
    }

    /// The lattice spanned by the columns of a `d x n` generating matrix.
    pub fn from_generators(field: F, gens: &Matrix<F::Elem>) -> Result<Self> {
        let basis = hermite_normal_form(&field, gens)?;
        Ok(Lattice { field, basis })
    }

    /// `O^d`.
    pub fn standard(field: F, d: usize) -> Self {
        Lattice { field, basis: Matrix::identity(d) }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn basis(&self) -> &Matrix<F::Elem> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn hermite_normal_form(&self) -> Matrix<F::Elem> {
        hermite_normal_form(&self.field, &self.basis).expect("lattice representative is invertible")
    }

    pub fn smith(&self) -> Smith<F::Elem> {
        smith_decomposition(&self.field, &self.basis).expect("lattice representative is invertible")
    }

    /// Membership test: `A^-1 x` is integral.
    pub fn contains(&self, x: &[F::Elem]) -> Result<bool> {
        let y = self.basis.inverse()?.mul_vec(x)?;
        Ok(y.iter().all(|c| self.field.valuation(c) >= Valuation::zero()))
    }

    /// Same lattice: `A1^-1 A2` and `A2^-1 A1` are both integral.
    pub fn equals(&self, other: &Self) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let check = |a: &Matrix<F::Elem>, b: &Matrix<F::Elem>| {
            a.inverse().and_then(|ai| ai.mul(b)).is_ok_and(|m| m.is_integral(&self.field))
        };
        check(&self.basis, &other.basis) && check(&other.basis, &self.basis)
    }

    /// Contained in `other`.
    pub fn is_sublattice_of(&self, other: &Self) -> bool {
        other.basis.inverse().and_then(|inv| inv.mul(&self.basis)).is_ok_and(|m| m.is_integral(&self.field))
    }

    /// Image under the coordinate projection onto `subset`.
    pub fn project(&self, subset: Subset) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::InvalidArgument("projection onto the empty set".into()));
        }
        let rows = subset.indices();
        if rows.iter().any(|&r| r >= self.dim()) {
            return Err(Error::InvalidArgument(format!("subset {subset} outside dimension {}", self.dim())));
        }
        Lattice::from_generators(self.field.clone(), &self.basis.select_rows(&rows))
    }

    /// Dual lattice, represented by `A^-T`.
    pub fn dual(&self) -> Self {
        let basis = self.basis.inverse().expect("invertible").transpose();
        Lattice { field: self.field.clone(), basis }
    }

    /// Smallest lattice containing both.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Lattice::from_generators(self.field.clone(), &self.basis.hcat(&other.basis)?)
    }

    /// Largest lattice contained in both, computed as the dual of the sum of
    /// the duals.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        Ok(self.dual().sum(&other.dual())?.dual())
    }

    /// `(a, b)` with `pi^a` the largest diagonal lattice inside and `pi^b`
    /// the smallest diagonal lattice containing this one.
    pub fn diagonal_envelopes(&self) -> (Vec<BigRational>, Vec<BigRational>) {
        let d = self.dim();
        let inv = self.basis.inverse().expect("invertible");
        let a = (0..d)
            .map(|i| {
                let v = (0..d).map(|j| self.field.valuation(&inv[(j, i)])).min().expect("d >= 1");
                -v.expect_finite("column of the inverse").expect("invertible matrix has no zero column")
            })
            .collect();
        let b = (0..d)
            .map(|i| {
                let v = self.basis.row(i).iter().map(|x| self.field.valuation(x)).min().expect("d >= 1");
                v.expect_finite("row of the representative").expect("invertible matrix has no zero row")
            })
            .collect();
        (a, b)
    }

    /// `D Lambda` for the diagonal matrix with the given entries.
    pub fn scale_rows(&self, diag: &[F::Elem]) -> Result<Self> {
        if diag.len() != self.dim() {
            return Err(Error::Dimension("diagonal length".into()));
        }
        let mut basis = self.basis.clone();
        for (i, c) in diag.iter().enumerate() {
            basis.scale_row(i, c);
        }
        Lattice::new(self.field.clone(), basis)
    }

    /// `P^sigma Lambda`, where row `i` of the result is row `sigma[i]`.
    pub fn permute(&self, sigma: &[usize]) -> Result<Self> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if sigma.len() != d || sigma.iter().any(|&s| s >= d || std::mem::replace(&mut seen[s], true)) {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        Ok(Lattice { field: self.field.clone(), basis: self.basis.select_rows(sigma) })
    }

    /// Same lattice with representative `A U`.
    pub fn with_basis_change(&self, u: &Matrix<F::Elem>) -> Result<Self> {
        if !u.is_unimodular(&self.field) {
            return Err(Error::InvalidArgument("basis change must lie in GL_d(O)".into()));
        }
        Lattice::new(self.field.clone(), self.basis.mul(u)?)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("dimensions {} and {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

/// The diagonal lattice `pi^v = (+) pi^v_i O e_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalLattice {
    pub exponents: Vec<BigRational>,
}

impl DiagonalLattice {
    pub fn new(exponents: Vec<BigRational>) -> Self {
        DiagonalLattice { exponents }
    }

    pub fn from_ints(exponents: &[i64]) -> Self {
        DiagonalLattice { exponents: exponents.iter().map(|&e| BigRational::from_integer(e.into())).collect() }
    }

    pub fn to_lattice<F: ValuedField>(&self, field: &F) -> Result<Lattice<F>> {
        let diag = self.exponents.iter().map(|e| field.uniformizer_pow(e)).collect::<Result<Vec<_>>>()?;
        Lattice::new(field.clone(), Matrix::diagonal(diag))
    }
}

/// Random element of `GL_d(O)`: a product of elementary column operations
/// with integral multipliers, unit scalings and transpositions. Deterministic
/// in `seed`.
pub fn random_unimodular<F: ValuedField>(field: &F, d: usize, seed: u64) -> Matrix<F::Elem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unimodular_with(field, d, &mut rng)
}

pub fn random_unimodular_with<F: ValuedField, R: Rng + ?Sized>(field: &F, d: usize, rng: &mut R) -> Matrix<F::Elem> {
    let mut u = Matrix::identity(d);
    if d == 0 {
        return u;
    }
    for _ in 0..3 * d {
        match rng.gen_range(0..4) {
            0 | 1 if d > 1 => {
                let i = rng.gen_range(0..d);
                let j = (i + rng.gen_range(1..d)) % d;
                u.add_col_multiple(i, j, &field.random_integral(rng));
            }
            2 => {
                let i = rng.gen_range(0..d);
                u.scale_col(i, &field.random_unit(rng));
            }
            _ => {
                let i = rng.gen_range(0..d);
                let j = rng.gen_range(0..d);
                u.swap_cols(i, j);
            }
        }
    }
    u
}

/// Random invertible `d x d` representative whose nonzero entries are units
/// times `pi^k` with `k` drawn from `lo..=hi` (and, in fields with a dense
/// value group, fractional offsets in thirds and halves).
pub fn random_lattice<F: ValuedField, R: Rng + ?Sized>(field: &F, d: usize, lo: i64, hi: i64, rng: &mut R) -> Lattice<F> {
    loop {
        let entries = (0..d * d)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    return F::Elem::zero();
                }
                let k = rng.gen_range(lo..=hi);
                let e = if field.is_discrete() {
                    BigRational::from_integer(k.into())
                } else {
                    let den = [1i64, 2, 3][rng.gen_range(0..3)];
                    BigRational::new((k * den + rng.gen_range(0..den)).into(), den.into())
                };
                field.uniformizer_pow(&e).expect("exponent in value group").mul_ref(&field.random_unit(rng))
            })
            .collect();
        let basis = Matrix::new(d, d, entries).expect("shape");
        if let Ok(l) = Lattice::new(field.clone(), basis) {
            return l;
        }
    }
}
