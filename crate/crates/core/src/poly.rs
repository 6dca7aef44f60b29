//! Sparse multivariate polynomials over the rationals.
//!
//! A polynomial carries a variable table; exponent vectors are dense and
//! fixed-width per table, terms are sparse. Operations between polynomials
//! over different tables are rejected rather than silently reinterpreted.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new(names: &[&str]) -> Arc<VarTable> {
        Arc::new(VarTable { names: names.iter().map(|s| s.to_string()).collect() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn describe(&self) -> String {
        self.names.join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<VarTable>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Arc<VarTable>, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Self::constant(vars, rat(1))
    }

    /// The monomial `x_i` with coefficient 1.
    pub fn var(vars: &Arc<VarTable>, idx: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        Self::monomial(vars, exps, rat(1))
    }

    pub fn monomial(vars: &Arc<VarTable>, exps: Vec<u32>, coeff: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(exps, coeff);
        p
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    /// Adds `coeff * x^exps`, dropping the term if the sum cancels.
    pub fn add_term(&mut self, exps: Vec<u32>, coeff: Rational) {
        assert_eq!(exps.len(), self.vars.len(), "exponent vector width mismatch");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn check_same_table(&self, other: &MultiPoly) -> Result<()> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VarTableMismatch(self.vars.describe(), other.vars.describe()))
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_same_table(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        let mut out = Self::zero(&self.vars);
        for (e, k) in &self.terms {
            out.terms.insert(e.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_same_table(other)?;
        let mut out = Self::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut out = Self::one(&self.vars);
        for _ in 0..e {
            out = out.mul(self).expect("same table");
        }
        out
    }

    /// `(x_idx - shift)^e`, expanded by the binomial theorem.
    pub fn linear_power(vars: &Arc<VarTable>, idx: usize, shift: &Rational, e: u32) -> MultiPoly {
        let base = Self::var(vars, idx).sub(&Self::constant(vars, shift.clone())).expect("same table");
        base.pow(e)
    }

    /// Partial derivative with respect to `x_idx`.
    pub fn derivative(&self, idx: usize) -> MultiPoly {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[idx] -= 1;
            out.add_term(exps, c * rat(e[idx] as i64));
        }
        out
    }

    /// Exact division by `(x_idx - a)`; the input must vanish at `x_idx = a`.
    ///
    /// Runs synthetic division per coefficient-in-the-other-variables; a
    /// nonzero remainder is an error.
    pub fn div_linear(&self, idx: usize, a: &Rational) -> Result<MultiPoly> {
        // Group terms by the exponents of the other variables.
        let mut groups: BTreeMap<Vec<u32>, BTreeMap<u32, Rational>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let d = rest[idx];
            rest[idx] = 0;
            groups.entry(rest).or_default().insert(d, c.clone());
        }
        let mut out = Self::zero(&self.vars);
        for (rest, coeffs) in groups {
            let deg = *coeffs.keys().next_back().unwrap();
            // Synthetic division of sum c_d x^d by (x - a), highest power first.
            let mut carry = Rational::zero();
            for d in (0..=deg).rev() {
                let cur = coeffs.get(&d).cloned().unwrap_or_else(Rational::zero) + &carry * a;
                if d == 0 {
                    if !cur.is_zero() {
                        return Err(Error::NonzeroRemainder(cur));
                    }
                } else {
                    if !cur.is_zero() {
                        let mut exps = rest.clone();
                        exps[idx] = d - 1;
                        out.add_term(exps, cur.clone());
                    }
                    carry = cur;
                }
            }
        }
        Ok(out)
    }

    /// Substitutes `replacement` for `x_idx`; every other variable of this
    /// table must exist (by name) in the replacement's table. The result
    /// lives over the replacement's table.
    pub fn substitute(&self, idx: usize, replacement: &MultiPoly) -> Result<MultiPoly> {
        let target = replacement.vars.clone();
        // Map each remaining variable by name into the target table.
        let mut var_map: Vec<Option<usize>> = Vec::with_capacity(self.vars.len());
        for i in 0..self.vars.len() {
            if i == idx {
                var_map.push(None);
            } else {
                let name = self.vars.name(i);
                let j = target
                    .index_of(name)
                    .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
                var_map.push(Some(j));
            }
        }
        let mut out = Self::zero(&target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(&target, c.clone());
            let mut exps = vec![0u32; target.len()];
            for (i, &d) in e.iter().enumerate() {
                if let Some(j) = var_map[i] {
                    exps[j] += d;
                }
            }
            term = term.mul(&Self::monomial(&target, exps, rat(1)))?;
            if e[idx] > 0 {
                term = term.mul(&replacement.pow(e[idx]))?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Evaluates at a full point, one value per variable.
    pub fn eval(&self, values: &[Rational]) -> Rational {
        assert_eq!(values.len(), self.vars.len(), "value vector width mismatch");
        let mut out = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &d) in e.iter().enumerate() {
                for _ in 0..d {
                    t *= &values[i];
                }
            }
            out += t;
        }
        out
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, idx: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[idx]).max()
    }

    /// Maximum exponent over all variables and terms; `None` for zero.
    pub fn max_exponent(&self) -> Option<u32> {
        self.terms.keys().filter_map(|e| e.iter().copied().max()).max()
    }

    /// The coefficient of `x_idx^d` as a polynomial in the remaining
    /// variables (same table, `x_idx` degree zero).
    pub fn coeff_of_power(&self, idx: usize, d: u32) -> MultiPoly {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[idx] == d {
                let mut exps = e.clone();
                exps[idx] = 0;
                out.add_term(exps, c.clone());
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let mut atoms: Vec<String> = Vec::new();
            for (i, &d) in e.iter().enumerate() {
                if d == 1 {
                    atoms.push(self.vars.name(i).to_string());
                } else if d > 1 {
                    atoms.push(format!("{}^{}", self.vars.name(i), d));
                }
            }
            let coeff = format_rational(c);
            let body = if atoms.is_empty() {
                coeff
            } else if c.is_one() {
                atoms.join("*")
            } else if (-c.clone()).is_one() {
                format!("-{}", atoms.join("*"))
            } else {
                format!("{}*{}", coeff, atoms.join("*"))
            };
            if first {
                write!(f, "{body}")?;
                first = false;
            } else if let Some(stripped) = body.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}
