//! Confluent Vandermonde systems on the function family `n^d λ^n`.
//!
//! For bases `λ_1, …, λ_w` (nonzero, pairwise distinct) with multiplicities
//! `s_1, …, s_w` and a row offset `r`, the matrix samples the functions
//! `f(n) = n^d λ_j^n` (`0 ≤ d < s_j`) at `n = r, r+1, …, r+Σs_j−1`. Its
//! determinant has the closed form
//!
//! ```text
//! ∏_j sf(s_j − 1) λ_j^{s_j (s_j + 2r − 1)/2} ∏_{i<j} (λ_j − λ_i)^{s_i s_j}
//! ```
//!
//! where `sf` is the iterated factorial `s! (s−1)! ⋯ 1!`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::rational::{big_to_rat, pow_i, superfactorial, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfluentSpec {
    pub bases: Vec<Rational>,
    pub mults: Vec<u32>,
    /// Row offset `r`: sampling starts at `n = r`.
    pub offset: u64,
}

impl ConfluentSpec {
    pub fn new(bases: Vec<Rational>, mults: Vec<u32>, offset: u64) -> Result<Self> {
        if bases.len() != mults.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} bases vs {} multiplicities",
                bases.len(),
                mults.len()
            )));
        }
        if bases.is_empty() {
            return Err(Error::DimensionMismatch("empty base list".into()));
        }
        for (i, b) in bases.iter().enumerate() {
            if b.is_zero() {
                return Err(Error::ZeroParameter("base"));
            }
            for (j, b2) in bases.iter().enumerate().skip(i + 1) {
                if b == b2 {
                    return Err(Error::DuplicateBase(i, j));
                }
            }
        }
        if mults.iter().any(|&m| m == 0) {
            return Err(Error::DimensionMismatch("zero multiplicity".into()));
        }
        Ok(ConfluentSpec { bases, mults, offset })
    }

    pub fn size(&self) -> usize {
        self.mults.iter().map(|&m| m as usize).sum()
    }

    /// Column labels in matrix order: `(base index, power d)`.
    pub fn columns(&self) -> Vec<(usize, u32)> {
        let mut cols = Vec::with_capacity(self.size());
        for (j, &s) in self.mults.iter().enumerate() {
            for d in 0..s {
                cols.push((j, d));
            }
        }
        cols
    }
}

/// Sample value `n^d λ^n` with the convention `0^0 = 1`.
fn sample(base: &Rational, n: u64, d: u32) -> Rational {
    let mut v = pow_i(base, n as i64).expect("nonnegative power");
    let nd = big_to_rat(num_bigint::BigInt::from(n));
    for _ in 0..d {
        v *= &nd;
    }
    if n == 0 && d == 0 {
        // n^0 = 1 even at n = 0; pow handles λ^0 = 1, nothing extra needed.
    }
    v
}

/// Builds the sample matrix: rows are `n = offset … offset+size−1`, columns
/// follow [`ConfluentSpec::columns`].
pub fn confluent_matrix(spec: &ConfluentSpec) -> DenseMatrix {
    let size = spec.size();
    let cols = spec.columns();
    let mut m = DenseMatrix::new(size, size);
    for (ri, n) in (spec.offset..spec.offset + size as u64).enumerate() {
        for (ci, (j, d)) in cols.iter().enumerate() {
            m.set(ri, ci, sample(&spec.bases[*j], n, *d));
        }
    }
    m
}

/// The closed-form determinant of [`confluent_matrix`].
pub fn confluent_det_formula(spec: &ConfluentSpec) -> Rational {
    let r = spec.offset as i64;
    let mut det = Rational::from_integer(1.into());
    for (j, &s) in spec.mults.iter().enumerate() {
        let s = s as i64;
        det *= big_to_rat(superfactorial((s - 1) as u64));
        let exp = s * (s + 2 * r - 1) / 2;
        det *= pow_i(&spec.bases[j], exp).expect("nonzero base");
    }
    for i in 0..spec.bases.len() {
        for j in (i + 1)..spec.bases.len() {
            let diff = &spec.bases[j] - &spec.bases[i];
            let e = (spec.mults[i] as i64) * (spec.mults[j] as i64);
            det *= pow_i(&diff, e).expect("distinct bases");
        }
    }
    det
}
