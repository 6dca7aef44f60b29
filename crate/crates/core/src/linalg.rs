//! Exact linear algebra over the rationals.
//!
//! Two layers: a sparse incremental span tracker keyed by arbitrary ordered
//! column labels (used for rank computations over module monomials), and a
//! small dense solver with a kernel witness on singular input.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type SparseRow<K> = BTreeMap<K, Rational>;

/// Incrementally row-reduced basis of a span. Each stored row is normalized
/// so its pivot (smallest key with nonzero coefficient) has coefficient 1,
/// and rows are indexed by pivot key.
#[derive(Debug, Clone, Default)]
pub struct SpanBuilder<K: Ord + Clone> {
    rows: BTreeMap<K, SparseRow<K>>,
}

impl<K: Ord + Clone> SpanBuilder<K> {
    pub fn new() -> Self {
        SpanBuilder { rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the current basis; returns the residue.
    fn reduce(&self, mut row: SparseRow<K>) -> SparseRow<K> {
        loop {
            let pivot = match row.keys().next() {
                Some(k) => k.clone(),
                None => return row,
            };
            match self.rows.get(&pivot) {
                None => return row,
                Some(basis_row) => {
                    let c = row.get(&pivot).cloned().expect("pivot present");
                    for (k, v) in basis_row {
                        let delta = &c * v;
                        match row.entry(k.clone()) {
                            std::collections::btree_map::Entry::Vacant(e) => {
                                if !delta.is_zero() {
                                    e.insert(-delta);
                                }
                            }
                            std::collections::btree_map::Entry::Occupied(mut e) => {
                                *e.get_mut() -= delta;
                                if e.get().is_zero() {
                                    e.remove();
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// Adds a vector to the span. Returns `true` if the rank grew.
    pub fn insert(&mut self, row: SparseRow<K>) -> bool {
        let mut residue = self.reduce(row);
        let pivot = match residue.keys().next() {
            Some(k) => k.clone(),
            None => return false,
        };
        let lead = residue.get(&pivot).cloned().expect("pivot present");
        let inv = lead.recip();
        for v in residue.values_mut() {
            *v *= &inv;
        }
        self.rows.insert(pivot, residue);
        true
    }

    /// Membership test: does `row` lie in the current span?
    pub fn contains(&self, row: &SparseRow<K>) -> bool {
        self.reduce(row.clone()).is_empty()
    }
}

/// Rank of a list of sparse vectors sharing a column-label space.
pub fn exact_rank<K: Ord + Clone>(rows: &[SparseRow<K>]) -> usize {
    let mut span = SpanBuilder::new();
    for row in rows {
        span.insert(row.clone());
    }
    span.rank()
}

/// Dense column-major-agnostic matrix: `data[r * ncols + c]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<Rational>,
}

impl DenseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        DenseMatrix { nrows, ncols, data: vec![Rational::zero(); nrows * ncols] }
    }

    pub fn at(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.ncols + c] = v;
    }
}

/// Determinant by fraction-wise Gaussian elimination.
pub fn determinant(m: &DenseMatrix) -> Result<Rational> {
    if m.nrows != m.ncols {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.nrows, m.ncols)));
    }
    let n = m.nrows;
    let mut a = m.data.clone();
    let mut det = Rational::from_integer(1.into());
    for col in 0..n {
        let pivot_row = match (col..n).find(|&r| !a[r * n + col].is_zero()) {
            Some(r) => r,
            None => return Ok(Rational::zero()),
        };
        if pivot_row != col {
            for c in 0..n {
                a.swap(pivot_row * n + c, col * n + c);
            }
            det = -det;
        }
        let pv = a[col * n + col].clone();
        det *= &pv;
        for r in (col + 1)..n {
            if a[r * n + col].is_zero() {
                continue;
            }
            let f = &a[r * n + col] / &pv;
            for c in col..n {
                let sub = &f * &a[col * n + c];
                a[r * n + c] -= sub;
            }
        }
    }
    Ok(det)
}

/// Solves `A x = b` for each right-hand side in `rhs` (square `A`).
///
/// On a singular matrix the error carries a kernel witness: a nonzero `v`
/// with `A v = 0`.
pub fn solve_square(a: &DenseMatrix, rhs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    if a.nrows != a.ncols {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", a.nrows, a.ncols)));
    }
    let n = a.nrows;
    for (i, b) in rhs.iter().enumerate() {
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("rhs {i} has length {} != {n}", b.len())));
        }
    }
    // Reduced row echelon form on [A | rhs...], tracking pivot columns.
    let width = n + rhs.len();
    let mut m: Vec<Rational> = Vec::with_capacity(n * width);
    for r in 0..n {
        for c in 0..n {
            m.push(a.at(r, c).clone());
        }
        for b in rhs {
            m.push(b[r].clone());
        }
    }
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0usize;
    for col in 0..n {
        let pr = match (row..n).find(|&r| !m[r * width + col].is_zero()) {
            Some(r) => r,
            None => continue,
        };
        for c in 0..width {
            m.swap(pr * width + c, row * width + c);
        }
        let pv = m[row * width + col].clone();
        for c in col..width {
            m[row * width + c] = &m[row * width + c] / &pv;
        }
        for r in 0..n {
            if r != row && !m[r * width + col].is_zero() {
                let f = m[r * width + col].clone();
                for c in col..width {
                    let sub = &f * &m[row * width + c];
                    m[r * width + c] -= sub;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == n {
            break;
        }
    }
    if row < n {
        // Singular: build a kernel vector from the first free column.
        let free = pivot_of_col.iter().position(|p| p.is_none()).expect("free column exists");
        let mut kernel = vec![Rational::zero(); n];
        kernel[free] = Rational::from_integer(1.into());
        for (col, p) in pivot_of_col.iter().enumerate() {
            if let Some(pr) = p {
                kernel[col] = -m[pr * width + free].clone();
            }
        }
        return Err(Error::SingularSystem { kernel });
    }
    let mut out = Vec::with_capacity(rhs.len());
    for (j, _) in rhs.iter().enumerate() {
        let mut x = vec![Rational::zero(); n];
        for col in 0..n {
            let pr = pivot_of_col[col].expect("full rank");
            x[col] = m[pr * width + n + j].clone();
        }
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn row(pairs: &[(&str, i64)]) -> SparseRow<String> {
        pairs.iter().map(|(k, v)| (k.to_string(), rat(*v))).collect()
    }

    #[test]
    fn sparse_rank_counts_independent_rows() {
        let rows = vec![
            row(&[("a", 1), ("b", 2)]),
            row(&[("a", 2), ("b", 4)]),
            row(&[("b", 1)]),
            row(&[]),
        ];
        assert_eq!(exact_rank(&rows), 2);
    }

    #[test]
    fn span_membership() {
        let mut span = SpanBuilder::new();
        span.insert(row(&[("a", 1), ("b", 1)]));
        span.insert(row(&[("b", 3)]));
        assert!(span.contains(&row(&[("a", 5), ("b", -2)])));
        assert!(!span.contains(&row(&[("c", 1)])));
        assert_eq!(span.rank(), 2);
    }

    #[test]
    fn dense_determinant_matches_cofactor_oracle() {
        // Fixed 3x3 with known determinant.
        let mut m = DenseMatrix::new(3, 3);
        let vals = [[2i64, 1, -1], [0, 3, 4], [5, -2, 1]];
        for r in 0..3 {
            for c in 0..3 {
                m.set(r, c, rat(vals[r][c]));
            }
        }
        // cofactor expansion oracle
        fn cof(v: &[Vec<Rational>]) -> Rational {
            let n = v.len();
            if n == 1 {
                return v[0][0].clone();
            }
            let mut acc = Rational::zero();
            for c in 0..n {
                if v[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Rational>> = v[1..]
                    .iter()
                    .map(|r| {
                        r.iter().enumerate().filter(|(i, _)| *i != c).map(|(_, x)| x.clone()).collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { rat(1) } else { rat(-1) };
                acc += sign * &v[0][c] * cof(&minor);
            }
            acc
        }
        let as_vecs: Vec<Vec<Rational>> =
            (0..3).map(|r| (0..3).map(|c| m.at(r, c).clone()).collect()).collect();
        assert_eq!(determinant(&m).unwrap(), cof(&as_vecs));
    }

    #[test]
    fn solve_square_solves_and_reports_kernel() {
        let mut a = DenseMatrix::new(2, 2);
        a.set(0, 0, rat(1));
        a.set(0, 1, rat(2));
        a.set(1, 0, rat(3));
        a.set(1, 1, rat(4));
        let sol = solve_square(&a, &[vec![rat(5), rat(11)]]).unwrap();
        assert_eq!(sol[0], vec![rat(1), rat(2)]);

        // singular [[1,1],[2,2]] -> kernel spanned by (1, -1)
        let mut s = DenseMatrix::new(2, 2);
        s.set(0, 0, rat(1));
        s.set(0, 1, rat(1));
        s.set(1, 0, rat(2));
        s.set(1, 1, rat(2));
        match solve_square(&s, &[vec![rat(0), rat(0)]]) {
            Err(Error::SingularSystem { kernel }) => {
                // verify A * kernel = 0 and kernel != 0
                assert!(kernel.iter().any(|x| !x.is_zero()));
                for r in 0..2 {
                    let dot: Rational =
                        (0..2).map(|c| s.at(r, c) * &kernel[c]).fold(Rational::zero(), |x, y| x + y);
                    assert!(dot.is_zero());
                }
                assert_eq!(kernel, vec![rat(-1), rat(1)]);
            }
            other => panic!("expected singular system, got {other:?}"),
        }
    }

    #[test]
    fn solve_square_multiple_rhs() {
        let mut a = DenseMatrix::new(2, 2);
        a.set(0, 0, ratio(1, 2));
        a.set(0, 1, rat(0));
        a.set(1, 0, rat(1));
        a.set(1, 1, rat(3));
        let sols = solve_square(&a, &[vec![rat(1), rat(2)], vec![rat(0), rat(6)]]).unwrap();
        assert_eq!(sols[0], vec![rat(2), rat(0)]);
        assert_eq!(sols[1], vec![rat(0), rat(2)]);
    }
}
