//! Independent checks of the tail formula: Monte-Carlo sampling of the
//! uniform measure on a p-adic lattice, and a brute-force index count in a
//! finite quotient `(Z/p^M)^d`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{PAdic, ValuedField};
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::tropical::{grid, TropicalPolynomial};

/// Trust margin below the working precision.
pub const DEFAULT_GUARD: i64 = 10;
/// Largest acceptable censored fraction.
pub const CENSOR_LIMIT: f64 = 0.01;
/// `log2` of the largest quotient group enumerated by the index oracle.
pub const DEFAULT_BUDGET_BITS: f64 = 24.0;

const BLOCK: usize = 4096;

/// Valuation vectors of `n` uniform samples from a lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBatch {
    pub n: usize,
    pub precision: u32,
    pub seed: u64,
    pub guard: i64,
    /// Per coordinate, the level at and above which valuations are censored.
    pub thresholds: Vec<i64>,
    /// One vector per sample; censored coordinates hold their threshold.
    pub valuations: Vec<Vec<i64>>,
    /// Samples with at least one censored coordinate.
    pub censored: usize,
}

impl SampleBatch {
    pub fn censored_fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.censored as f64 / self.n as f64
        }
    }

    pub fn usable(&self) -> bool {
        self.censored_fraction() < CENSOR_LIMIT
    }

    /// Samples with `V >= v` coordinatewise. Exact whenever every `v_i` is at
    /// most its threshold.
    pub fn count_at_least(&self, v: &[i64]) -> usize {
        self.valuations.iter().filter(|x| x.iter().zip(v).all(|(a, b)| a >= b)).count()
    }
}

/// Uniform integer in `[0, p^k)`, assembled from exactly uniform chunks.
fn uniform_digits<R: Rng + ?Sized>(p: u64, k: u32, rng: &mut R) -> BigInt {
    // largest power of p that fits comfortably in a u64 draw
    let mut chunk = 1u32;
    while (p as u128).pow(chunk + 1) < (1u128 << 63) {
        chunk += 1;
    }
    let mut out = BigInt::zero();
    let mut scale = BigInt::one();
    let mut left = k;
    while left > 0 {
        let c = left.min(chunk);
        let m = p.pow(c);
        out += &scale * BigInt::from(rng.gen_range(0..m));
        scale *= BigInt::from(m);
        left -= c;
    }
    out
}

fn valuation_capped(p: &BigInt, x: &BigInt, cap: i64) -> i64 {
    if x.is_zero() {
        return cap;
    }
    let mut v = 0;
    let mut m = x.clone();
    while v < cap {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    v
}

/// Samples `X = A Z` with `Z` uniform on `(Z/p^N)^d` and records `val(X)`.
///
/// Coordinate `i` is censored when its valuation reaches
/// `N + min(0, b_i) - guard`, where `b` is the outer envelope; below that
/// level the truncation of `Z` cannot change the valuation.
pub fn sample_valuations(l: &Lattice<PAdic>, n: usize, precision: u32, seed: u64, exec: Exec) -> Result<SampleBatch> {
    sample_valuations_guarded(l, n, precision, seed, DEFAULT_GUARD, exec)
}

pub fn sample_valuations_guarded(
    l: &Lattice<PAdic>,
    n: usize,
    precision: u32,
    seed: u64,
    guard: i64,
    exec: Exec,
) -> Result<SampleBatch> {
    if precision == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    let field = l.field();
    let p = field.p();
    let d = l.dim();
    let (_, b) = l.diagonal_envelopes();
    let thresholds: Vec<i64> =
        b.iter().map(|bi| precision as i64 + bi.to_integer().to_i64().expect("small").min(0) - guard).collect();
    // integer rows r_i and denominators D_i with A_i = r_i / D_i
    let rows: Vec<(Vec<BigInt>, i64)> = (0..d)
        .map(|i| {
            let row = l.basis().row(i);
            let den = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let ints = row.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
            (ints, field.int_valuation(&den))
        })
        .collect();
    let blocks = n.div_ceil(BLOCK);
    let per_block = exec.map_range(blocks, |blk| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(blk as u64);
        let count = BLOCK.min(n - blk * BLOCK);
        let mut vals = Vec::with_capacity(count);
        let mut censored = 0usize;
        for _ in 0..count {
            let z: Vec<BigInt> = (0..d).map(|_| uniform_digits(p, precision, &mut rng)).collect();
            let mut hit = false;
            let v: Vec<i64> = rows
                .iter()
                .zip(&thresholds)
                .map(|((r, dv), &t)| {
                    let x: BigInt = r.iter().zip(&z).map(|(a, b)| a * b).sum();
                    let cap = (t + dv).max(0);
                    let val = valuation_capped(field.p_big(), &x, cap) - dv;
                    if val >= t {
                        hit = true;
                        t
                    } else {
                        val
                    }
                })
                .collect();
            censored += hit as usize;
            vals.push(v);
        }
        (vals, censored)
    });
    let mut valuations = Vec::with_capacity(n);
    let mut censored = 0;
    for (v, c) in per_block {
        valuations.extend(v);
        censored += c;
    }
    Ok(SampleBatch { n, precision, seed, guard, thresholds, valuations, censored })
}

/// One cell of the empirical-versus-exact tail comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct TailRow {
    pub v: Vec<i64>,
    pub count: usize,
    pub n: usize,
    pub empirical: f64,
    pub exact: BigRational,
    /// `None` when the exact tail is 0 or 1.
    pub z: Option<f64>,
}

impl TailRow {
    pub fn to_json(&self) -> Value {
        json!({
            "v": self.v,
            "count": self.count,
            "n": self.n,
            "empirical": self.empirical,
            "exact": self.exact.to_string(),
            "z": self.z,
        })
    }
}

pub fn empirical_tail_report(
    batch: &SampleBatch,
    t: &TropicalPolynomial,
    lo: &[i64],
    hi: &[i64],
    exec: Exec,
) -> Result<Vec<TailRow>> {
    if lo.len() != t.d() || hi.len() != t.d() {
        return Err(Error::Dimension("box corners must have length d".into()));
    }
    if hi.iter().zip(&batch.thresholds).any(|(h, th)| h > th) {
        return Err(Error::InvalidArgument("box reaches the censoring level; raise the precision".into()));
    }
    let points = grid(lo, hi);
    let n = batch.n;
    let rows = exec.map_slice(&points, |v| -> Result<TailRow> {
        let exact = t.tail_prob(v)?;
        let count = batch.count_at_least(v);
        let empirical = count as f64 / n as f64;
        let e = exact.to_f64().expect("probability");
        let z = (!exact.is_zero() && !exact.is_one()).then(|| (empirical - e) / (e * (1.0 - e) / n as f64).sqrt());
        Ok(TailRow { v: v.clone(), count, n, empirical, exact, z })
    });
    rows.into_iter().collect()
}

pub fn tail_report_csv(rows: &[TailRow]) -> String {
    let mut out = String::new();
    let d = rows.first().map_or(0, |r| r.v.len());
    let header: Vec<String> = (1..=d).map(|i| format!("v{i}")).collect();
    writeln!(out, "{},count,n,empirical,exact,z", header.join(",")).expect("write to string");
    for r in rows {
        let v: Vec<String> = r.v.iter().map(i64::to_string).collect();
        let z = r.z.map_or(String::new(), |z| z.to_string());
        writeln!(out, "{},{},{},{},{},{}", v.join(","), r.count, r.n, r.empirical, r.exact, z).expect("write to string");
    }
    out
}

/// Fraction of `n` uniform samples of `O^d` that land in `l`, which must lie
/// inside `O^d`. Returns the hit count.
pub fn membership_hits(l: &Lattice<PAdic>, n: usize, seed: u64, exec: Exec) -> Result<usize> {
    let field = l.field();
    if !l.basis().is_integral(field) {
        return Err(Error::InvalidArgument("lattice must lie inside O^d".into()));
    }
    let (a, _) = l.diagonal_envelopes();
    // pi^a is inside the lattice, so membership depends on x mod p^max(a)
    let k = a.iter().map(|x| x.to_integer().to_u32().expect("nonnegative")).max().unwrap_or(0);
    let inv = l.basis().inverse()?;
    let p = field.p();
    let d = l.dim();
    let blocks = n.div_ceil(BLOCK);
    let counts = exec.map_range(blocks, |blk| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(blk as u64);
        let count = BLOCK.min(n - blk * BLOCK);
        (0..count)
            .filter(|_| {
                let x: Vec<BigRational> =
                    (0..d).map(|_| BigRational::from_integer(uniform_digits(p, k, &mut rng))).collect();
                let y = inv.mul_vec(&x).expect("shape");
                y.iter().all(|c| !field.valuation(c).finite().is_some_and(|v| v < &BigRational::zero()))
            })
            .count()
    });
    Ok(counts.into_iter().sum())
}

/// Brute-force `[L : L cap pi^v]` in a finite quotient.
///
/// The lattice is first scaled row by row into `O^d` (shifting `v` by the
/// same amounts, which preserves the index). The image `G` of the columns in
/// `(Z/p^M)^d` is enumerated by closure under addition, and the index is
/// `|G| / |G cap {x_i = 0 mod p^v_i}|`. Both `M` and `M + 1` are computed and
/// must agree.
pub struct IndexOracle {
    p: u64,
    d: usize,
    shift: Vec<i64>,
    generators: Vec<Vec<BigRational>>,
    budget_bits: f64,
    groups: HashMap<u32, Vec<u32>>,
}

impl IndexOracle {
    pub fn new(l: &Lattice<PAdic>) -> Self {
        IndexOracle::with_budget(l, DEFAULT_BUDGET_BITS)
    }

    pub fn with_budget(l: &Lattice<PAdic>, budget_bits: f64) -> Self {
        let field = l.field();
        let d = l.dim();
        let (_, b) = l.diagonal_envelopes();
        let shift: Vec<i64> = b.iter().map(|x| (-x.to_integer().to_i64().expect("small")).max(0)).collect();
        let mut scaled: Matrix<BigRational> = l.basis().clone();
        for (i, &c) in shift.iter().enumerate() {
            scaled.scale_row(i, &field.uniformizer_pow(&BigRational::from_integer(c.into())).expect("integer"));
        }
        let generators = (0..d).map(|j| scaled.col(j)).collect();
        IndexOracle { p: field.p(), d, shift, generators, budget_bits, groups: HashMap::new() }
    }

    /// `v + c`, the exponent vector after scaling into `O^d`.
    pub fn shifted(&self, v: &[i64]) -> Vec<i64> {
        v.iter().zip(&self.shift).map(|(a, b)| a + b).collect()
    }

    /// Default modulus exponent: large enough that the quotient sees `v`.
    pub fn default_modexp(&self, v: &[i64]) -> u32 {
        self.shifted(v).into_iter().max().unwrap_or(0).max(1) as u32
    }

    fn bits(&self, m: u32) -> f64 {
        self.d as f64 * m as f64 * (self.p as f64).log2()
    }

    /// Whether `M` and `M + 1` both fit the budget.
    pub fn within_budget(&self, m: u32) -> bool {
        self.bits(m + 1) <= self.budget_bits
    }

    fn group(&mut self, m: u32) -> &Vec<u32> {
        let (p, d) = (self.p, self.d);
        let generators = &self.generators;
        self.groups.entry(m).or_insert_with(|| {
            let f = PAdic::new(p).expect("prime");
            let pm = p.pow(m);
            let gens: Vec<Vec<u64>> = generators
                .iter()
                .map(|g| g.iter().map(|x| f.integral_residue(x, m).to_u64().expect("residue below p^M")).collect())
                .collect();
            let size = (pm as usize).pow(d as u32);
            let mut seen = vec![false; size];
            let encode = |x: &[u64]| x.iter().fold(0usize, |acc, &c| acc * pm as usize + c as usize);
            let mut stack = vec![vec![0u64; d]];
            seen[0] = true;
            let mut elems = vec![0u32];
            while let Some(x) = stack.pop() {
                for g in &gens {
                    let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % pm).collect();
                    let code = encode(&y);
                    if !seen[code] {
                        seen[code] = true;
                        elems.push(code as u32);
                        stack.push(y);
                    }
                }
            }
            elems
        })
    }

    fn ratio(&mut self, vs: &[i64], m: u32) -> u64 {
        let (p, d) = (self.p, self.d);
        let pm = p.pow(m) as usize;
        let moduli: Vec<usize> = vs.iter().map(|&v| p.pow((v as u32).min(m)) as usize).collect();
        let g = self.group(m);
        let inside = g
            .iter()
            .filter(|&&code| {
                let mut c = code as usize;
                (0..d).rev().all(|i| {
                    let coord = c % pm;
                    c /= pm;
                    coord.is_multiple_of(moduli[i])
                })
            })
            .count();
        let total = g.len();
        debug_assert_eq!(total % inside, 0);
        (total / inside) as u64
    }

    /// `[L : L cap pi^v]` at modulus exponent `m`, cross-checked at `m + 1`.
    pub fn index(&mut self, v: &[i64], m: u32) -> Result<u64> {
        if v.len() != self.d {
            return Err(Error::Dimension(format!("point of length {} for d = {}", v.len(), self.d)));
        }
        if v.iter().any(|&x| x < 0) {
            return Err(Error::InvalidArgument("brute-force index needs v >= 0".into()));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("modulus exponent must be at least 1".into()));
        }
        if !self.within_budget(m) {
            return Err(Error::BudgetExceeded(format!(
                "d*(M+1)*log2(p) = {:.1} exceeds {}",
                self.bits(m + 1),
                self.budget_bits
            )));
        }
        let vs = self.shifted(v);
        let r0 = self.ratio(&vs, m);
        let r1 = self.ratio(&vs, m + 1);
        if r0 != r1 {
            return Err(Error::NotStabilized(r0, r1));
        }
        Ok(r0)
    }
}

/// One-shot brute-force index; see [`IndexOracle`].
pub fn brute_force_index(l: &Lattice<PAdic>, v: &[i64], modexp: Option<u32>) -> Result<u64> {
    let mut oracle = IndexOracle::new(l);
    let m = match modexp {
        Some(m) => m,
        None => oracle.default_modexp(v),
    };
    oracle.index(v, m)
}
