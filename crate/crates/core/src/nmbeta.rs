//! Modules `N(M,β) = M ⊗ C[t,t^{-1}]` built from a module `M` over the
//! truncated non-negative part (generators d̄_0..d̄_k) and a non-constant
//! Laurent polynomial β. These carry the action
//!
//! `d_m(w⊗t^q) = (q + Σ_{i=0}^k m^{i+1}/(i+1)!·d̄_i) w ⊗ t^{q+m} + w ⊗ β·t^{m+q}`
//!
//! and are the testbed for the ω-operator comparison identities.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::enveloping::{check_conditions_ab, NAction};
use crate::error::{Error, Result};
use crate::rational::{big_to_rat, binomial, factorial, rat, Rational};

/// `Σ_r c_r t^r` with integer exponents of both signs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    pub coeffs: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn new(coeffs: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        let mut out = LaurentPoly::default();
        for (r, c) in coeffs {
            out.add(r, c);
        }
        out
    }

    pub fn add(&mut self, exp: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&r| r == 0)
    }
}

/// Elements of `M ⊗ C[t,t^{-1}]`: finitely many `(basis index, t-exponent)`
/// pairs with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NmElement {
    pub terms: BTreeMap<(u32, i64), Rational>,
}

impl NmElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(j: u32, q: i64) -> Self {
        Self::term(j, q, rat(1))
    }

    pub fn term(j: u32, q: i64, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(j, q, c);
        e
    }

    pub fn add_term(&mut self, j: u32, q: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((j, q)).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(j, q));
        }
    }

    pub fn add_scaled(&mut self, other: &NmElement, c: &Rational) {
        for (&(j, q), v) in &other.terms {
            self.add_term(j, q, v * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> NmElement {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }
}

#[derive(Debug, Clone)]
pub struct NmBeta {
    pub m_data: NAction,
    pub beta: LaurentPoly,
}

impl NmBeta {
    /// Validates that β is non-constant and that the d̄ table satisfies the
    /// truncated bracket `[d̄_i,d̄_j] = (j−i)d̄_{i+j}` on the first
    /// `truncation` basis vectors.
    pub fn new(m_data: NAction, beta: LaurentPoly, truncation: u32) -> Result<Self> {
        if beta.is_constant() {
            return Err(Error::BadModuleData(
                "β must be a non-constant Laurent polynomial".into(),
            ));
        }
        let check = check_conditions_ab(&m_data, truncation)?;
        if !check.bracket_ok {
            let (i, j, b) = check.bracket_violation.unwrap_or((0, 0, 0));
            return Err(Error::BadModuleData(format!(
                "d̄ table violates [d̄_{i},d̄_{j}] = ({j}−{i})d̄_{} on basis vector {b}",
                i + j
            )));
        }
        Ok(NmBeta { m_data, beta })
    }

    pub fn k(&self) -> u32 {
        self.m_data.k
    }

    pub fn act(&self, m: i64, f: &NmElement) -> Result<NmElement> {
        let mut out = NmElement::zero();
        for (&(j, q), c) in &f.terms {
            out.add_term(j, q + m, c * rat(q));
            for i in 0..=self.k() {
                // m^{i+1}/(i+1)!
                let coeff = crate::rational::pow_i(&rat(m), i as i64 + 1)?
                    / big_to_rat(factorial(i as u64 + 1));
                if coeff.is_zero() {
                    continue;
                }
                for (c2, j2) in self.m_data.apply(i, j)? {
                    out.add_term(j2, q + m, c * &coeff * c2);
                }
            }
            for (&r, br) in &self.beta.coeffs {
                out.add_term(j, r + m + q, c * br);
            }
        }
        Ok(out)
    }

    /// `ω^{(s)}_{l,m} f = Σ_{i=0}^s C(s,i)(−1)^{s−i} d_{l−m−i}(d_{m+i} f)`.
    pub fn omega(&self, s: u32, l: i64, m: i64, f: &NmElement) -> Result<NmElement> {
        let mut out = NmElement::zero();
        for i in 0..=s as i64 {
            let mut coeff = big_to_rat(binomial(s as i64, i));
            if (s as i64 - i) % 2 != 0 {
                coeff = -coeff;
            }
            let inner = self.act(m + i, f)?;
            let outer = self.act(l - m - i, &inner)?;
            out.add_scaled(&outer, &coeff);
        }
        Ok(out)
    }

    /// `d̄_k²` applied to a basis vector of `M`, tensored with `t^q`.
    pub fn top_square(&self, j: u32, q: i64) -> Result<NmElement> {
        let k = self.k();
        let mut out = NmElement::zero();
        for (c1, j1) in self.m_data.apply(k, j)? {
            for (c2, j2) in self.m_data.apply(k, j1)? {
                out.add_term(j2, q, &c1 * c2);
            }
        }
        Ok(out)
    }
}

/// The bundled `k=1` module: d̄_0 the weighted diagonal `b_j ↦ (a+j)b_j`,
/// d̄_1 the injective shift `b_j ↦ b_{j+1}`, satisfying `[d̄_0,d̄_1] = d̄_1`.
pub fn bundled_nm_beta(offset: Rational, beta: LaurentPoly) -> Result<NmBeta> {
    NmBeta::new(crate::enveloping::bundled_shift_naction(offset), beta, 6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enveloping::{BasisKind, GenAction};
    use crate::rational::ratio;

    fn beta_example() -> LaurentPoly {
        // β = t − 3t^{-1}
        LaurentPoly::new([(1, rat(1)), (-1, rat(-3))])
    }

    fn bundled() -> NmBeta {
        bundled_nm_beta(rat(2), beta_example()).unwrap()
    }

    #[test]
    fn action_matches_displayed_formula() {
        // d_2(b_0⊗t) with a=2: q-term 1·b_0⊗t³, d̄_0-term (2/1!)·2·b_0⊗t³,
        // d̄_1-term (4/2!)·b_1⊗t³, β-terms b_0⊗t⁴ − 3b_0⊗t².
        let nm = bundled();
        let got = nm.act(2, &NmElement::basis(0, 1)).unwrap();
        let mut expect = NmElement::zero();
        expect.add_term(0, 3, rat(5));
        expect.add_term(1, 3, rat(2));
        expect.add_term(0, 4, rat(1));
        expect.add_term(0, 2, rat(-3));
        assert_eq!(got, expect);
    }

    #[test]
    fn m_zero_action_has_no_generator_terms() {
        // d_0(w⊗t^q) = q·w⊗t^q + w⊗βt^q
        let nm = bundled();
        for (j, q) in [(0u32, 4i64), (2, -1), (1, 0)] {
            let got = nm.act(0, &NmElement::basis(j, q)).unwrap();
            let mut expect = NmElement::term(j, q, rat(q));
            expect.add_term(j, q + 1, rat(1));
            expect.add_term(j, q - 1, rat(-3));
            assert_eq!(got, expect, "j={j} q={q}");
        }
    }

    #[test]
    fn centerless_bracket_relation() {
        let nm = bundled();
        let f = {
            let mut f = NmElement::basis(0, 2);
            f.add_term(1, -1, ratio(1, 2));
            f
        };
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                let mut defect = nm.act(a, &nm.act(b, &f).unwrap()).unwrap();
                defect.add_scaled(&nm.act(b, &nm.act(a, &f).unwrap()).unwrap(), &rat(-1));
                defect.add_scaled(&nm.act(a + b, &f).unwrap(), &rat(a - b));
                assert!(defect.is_zero(), "defect at ({a},{b}): {defect:?}");
            }
        }
    }

    #[test]
    fn omega_vanishes_above_top_degree() {
        let nm = bundled(); // k=1, top degree 2k+2 = 4
        for s in 5u32..=7 {
            for (l, m) in [(0i64, 0i64), (3, -2), (-1, 4)] {
                let got = nm.omega(s, l, m, &NmElement::basis(1, 2)).unwrap();
                assert!(got.is_zero(), "s={s} l={l} m={m}: {got:?}");
            }
        }
    }

    #[test]
    fn omega_top_for_shift_module() {
        // k=1: ω^{(4)}_{l,m}(b_j⊗t^q) = 6·(d̄_1²b_j)⊗t^{q+l} = 6·b_{j+2}⊗t^{q+l}
        let nm = bundled();
        for (l, m) in [(0i64, 0i64), (2, 1), (-3, 5), (7, -2)] {
            for (j, q) in [(0u32, 0i64), (1, 3), (2, -2)] {
                let got = nm.omega(4, l, m, &NmElement::basis(j, q)).unwrap();
                let expect = NmElement::term(j + 2, q + l, rat(6));
                assert_eq!(got, expect, "l={l} m={m} j={j} q={q}");
                assert_eq!(nm.top_square(j, q + l).unwrap().scale(&rat(6)), expect);
            }
        }
    }

    #[test]
    fn omega_top_for_diagonal_module_carries_linear_correction() {
        // At k=0 the cross term (m+i)·P(m+i) reaches i-degree 2k+2, so the
        // top operator is 2d̄_0 − 2d̄_0², not a pure square: on an eigenvector
        // with d̄_0-eigenvalue e, ω^{(2)}_{l,m}(b_j⊗t^q) = 2e(1−e)·b_j⊗t^{q+l}.
        let mut gens = BTreeMap::new();
        gens.insert(0u32, GenAction::Diagonal { offset: rat(2), step: rat(1) });
        let m_data = NAction::new(0, BasisKind::Infinite, gens).unwrap();
        let nm = NmBeta::new(m_data, beta_example(), 6).unwrap();
        for (l, m) in [(0i64, 0i64), (3, 1), (-2, 2)] {
            for (j, q) in [(0u32, 0i64), (3, -1)] {
                let got = nm.omega(2, l, m, &NmElement::basis(j, q)).unwrap();
                let eig = rat(2 + j as i64);
                let expect = NmElement::term(j, q + l, rat(2) * &eig * (rat(1) - &eig));
                assert_eq!(got, expect, "l={l} m={m} j={j} q={q}");
                // vanishing above the top degree still holds
                assert!(nm.omega(3, l, m, &NmElement::basis(j, q)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        // constant β
        let err = bundled_nm_beta(rat(2), LaurentPoly::new([(0, rat(4))])).unwrap_err();
        assert!(matches!(err, Error::BadModuleData(_)));
        // broken bracket: step-2 diagonal gives [d̄_0,d̄_1] = 2d̄_1
        let mut gens = BTreeMap::new();
        gens.insert(0u32, GenAction::Diagonal { offset: rat(0), step: rat(2) });
        gens.insert(1u32, GenAction::Shift { by: 1, scale: rat(1) });
        let m_data = NAction::new(1, BasisKind::Infinite, gens).unwrap();
        let err = NmBeta::new(m_data, beta_example(), 4).unwrap_err();
        assert!(matches!(err, Error::BadModuleData(_)));
    }
}
