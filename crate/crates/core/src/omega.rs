//! The two Omega module families.
//!
//! `OmegaDT` is the action of the Witt/Virasoro generators `d_m` on
//! `C[∂, t]` attached to parameters `(λ, α, h)` with `λ ≠ 0`, `h ∈ C[t]`:
//!
//! ```text
//! d_m (∂^i f) = λ^m (∂ − m)^i ( ∂·f + m·G(f) − m²·α·F(f) ),   c ↦ 0
//! F(f) = ((h(t) − h(α)) / (t − α))·f − f′
//! G(f) = h(α)·f + t·F(f)
//! ```
//!
//! `OmegaD` is the action on `C[∂]` attached to `(μ, β)` with `μ ≠ 0`:
//!
//! ```text
//! d_k ∂^n = μ^k (∂ − k)^n (∂ − βk),   c ↦ 0
//! ```
//!
//! Simplicity: `OmegaDT` is simple iff `deg h = 1` and `α ≠ 0`; `OmegaD` is
//! simple iff `β ≠ 1`.

use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{MultiPoly, VarTable};
use crate::rational::{pow_i, rat, Rational};

/// Variable table for `C[∂, t]` slots (`d` is the ∂ variable).
pub fn dt_vars() -> Arc<VarTable> {
    static T: OnceLock<Arc<VarTable>> = OnceLock::new();
    T.get_or_init(|| VarTable::new(&["d", "t"])).clone()
}

/// Variable table for `C[∂]` slots.
pub fn d_vars() -> Arc<VarTable> {
    static T: OnceLock<Arc<VarTable>> = OnceLock::new();
    T.get_or_init(|| VarTable::new(&["d"])).clone()
}

/// Variable table for plain `C[t]` (the `h` parameter and F/G inputs).
pub fn t_vars() -> Arc<VarTable> {
    static T: OnceLock<Arc<VarTable>> = OnceLock::new();
    T.get_or_init(|| VarTable::new(&["t"])).clone()
}

/// `h(t) = ξ·t + η` over the `t` table.
pub fn h_linear(xi: &Rational, eta: &Rational) -> MultiPoly {
    let v = t_vars();
    let mut h = MultiPoly::zero(&v);
    h.add_term(vec![1], xi.clone());
    h.add_term(vec![0], eta.clone());
    h
}

/// Lift a `C[t]` polynomial into the `C[∂,t]` table.
fn lift_t(p: &MultiPoly) -> MultiPoly {
    let v = dt_vars();
    let mut out = MultiPoly::zero(&v);
    for (e, c) in p.terms() {
        out.add_term(vec![0, e[0]], c.clone());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaDT {
    pub lambda: Rational,
    pub alpha: Rational,
    /// `h ∈ C[t]` over the [`t_vars`] table.
    pub h: MultiPoly,
}

impl OmegaDT {
    pub fn new(lambda: Rational, alpha: Rational, h: MultiPoly) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::ZeroParameter("lambda"));
        }
        if h.vars() != &t_vars() {
            return Err(Error::VarTableMismatch("t".into(), "h parameter table".into()));
        }
        Ok(OmegaDT { lambda, alpha, h })
    }

    /// Convenience constructor for linear `h = ξ t + η`.
    pub fn with_linear_h(lambda: Rational, alpha: Rational, xi: Rational, eta: Rational) -> Result<Self> {
        Self::new(lambda, alpha, h_linear(&xi, &eta))
    }

    pub fn h_at_alpha(&self) -> Rational {
        self.h.eval(&[self.alpha.clone()])
    }

    /// The exact quotient `(h(t) − h(α)) / (t − α)` in `C[t]`.
    pub fn f_quotient(&self) -> MultiPoly {
        let v = t_vars();
        let shifted = self
            .h
            .sub(&MultiPoly::constant(&v, self.h_at_alpha()))
            .expect("same table");
        shifted.div_linear(0, &self.alpha).expect("vanishes at alpha by construction")
    }

    /// `F(f) = ((h(t) − h(α))/(t − α))·f − f′` on `C[t]`.
    pub fn f_op(&self, f: &MultiPoly) -> Result<MultiPoly> {
        if f.vars() != &t_vars() {
            return Err(Error::VarTableMismatch("t".into(), "F operand table".into()));
        }
        self.f_quotient().mul(f)?.sub(&f.derivative(0))
    }

    /// `G(f) = h(α)·f + t·F(f)` on `C[t]`.
    pub fn g_op(&self, f: &MultiPoly) -> Result<MultiPoly> {
        let v = t_vars();
        let t = MultiPoly::var(&v, 0);
        f.scale(&self.h_at_alpha()).add(&t.mul(&self.f_op(f)?)?)
    }

    /// Action of `d_k` on an element of `C[∂, t]` (over [`dt_vars`]).
    pub fn act(&self, k: i64, elem: &MultiPoly) -> Result<MultiPoly> {
        if elem.vars() != &dt_vars() {
            return Err(Error::VarTableMismatch("d,t".into(), "element table".into()));
        }
        let v = dt_vars();
        let tv = t_vars();
        let lam_k = pow_i(&self.lambda, k)?;
        let kq = rat(k);
        let mut out = MultiPoly::zero(&v);
        for (e, c) in elem.terms() {
            let (i, p) = (e[0], e[1]);
            let tp = MultiPoly::monomial(&tv, vec![p], rat(1));
            // ∂·f + k·G(f) − k²·α·F(f), with f = t^p
            let mut inner = MultiPoly::monomial(&v, vec![1, p], rat(1));
            inner = inner.add(&lift_t(&self.g_op(&tp)?).scale(&kq))?;
            let k2a = &kq * &kq * &self.alpha;
            inner = inner.sub(&lift_t(&self.f_op(&tp)?).scale(&k2a))?;
            let shifted = MultiPoly::linear_power(&v, 0, &kq, i).mul(&inner)?;
            out = out.add(&shifted.scale(&(c * &lam_k)))?;
        }
        Ok(out)
    }

    /// Simple iff `deg h = 1` and `α ≠ 0`.
    pub fn is_simple(&self) -> bool {
        self.h.degree_in(0) == Some(1) && !self.alpha.is_zero()
    }

    /// Leading coefficient `ξ` of `h` when `h` is linear.
    pub fn xi(&self) -> Option<Rational> {
        if self.h.degree_in(0) == Some(1) {
            let c = self.h.coeff_of_power(0, 1);
            let lead = c.terms().next().map(|(_, v)| v.clone());
            lead
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaD {
    pub mu: Rational,
    pub beta: Rational,
}

impl OmegaD {
    pub fn new(mu: Rational, beta: Rational) -> Result<Self> {
        if mu.is_zero() {
            return Err(Error::ZeroParameter("mu"));
        }
        Ok(OmegaD { mu, beta })
    }

    /// Action of `d_k` on an element of `C[∂]` (over [`d_vars`]).
    pub fn act(&self, k: i64, elem: &MultiPoly) -> Result<MultiPoly> {
        if elem.vars() != &d_vars() {
            return Err(Error::VarTableMismatch("d".into(), "element table".into()));
        }
        let v = d_vars();
        let mu_k = pow_i(&self.mu, k)?;
        let kq = rat(k);
        let mut out = MultiPoly::zero(&v);
        // ∂ − βk
        let mut tail = MultiPoly::var(&v, 0);
        tail.add_term(vec![0], -(&self.beta * &kq));
        for (e, c) in elem.terms() {
            let n = e[0];
            let term = MultiPoly::linear_power(&v, 0, &kq, n).mul(&tail)?;
            out = out.add(&term.scale(&(c * &mu_k)))?;
        }
        Ok(out)
    }

    /// Simple iff `β ≠ 1`.
    pub fn is_simple(&self) -> bool {
        !self.beta.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn dt_mono(i: u32, p: u32, c: i64) -> MultiPoly {
        MultiPoly::monomial(&dt_vars(), vec![i, p], rat(c))
    }

    #[test]
    fn f_and_g_closed_forms_for_linear_h() {
        // h = ξ t + η: F(t^p) = ξ t^p − p t^{p−1}, G(t^p) = (h(α) − p) t^p + ξ t^{p+1}
        let xi = ratio(3, 2);
        let eta = rat(-1);
        let alpha = rat(2);
        let m = OmegaDT::with_linear_h(rat(2), alpha.clone(), xi.clone(), eta.clone()).unwrap();
        let h_alpha = &xi * &alpha + &eta; // h(α) = 2
        assert_eq!(m.h_at_alpha(), h_alpha);
        for p in 0u32..5 {
            let tp = MultiPoly::monomial(&t_vars(), vec![p], rat(1));
            let mut f_expect = MultiPoly::zero(&t_vars());
            f_expect.add_term(vec![p], xi.clone());
            if p > 0 {
                f_expect.add_term(vec![p - 1], rat(-(p as i64)));
            }
            assert_eq!(m.f_op(&tp).unwrap(), f_expect);
            let mut g_expect = MultiPoly::zero(&t_vars());
            g_expect.add_term(vec![p], &h_alpha - rat(p as i64));
            g_expect.add_term(vec![p + 1], xi.clone());
            assert_eq!(m.g_op(&tp).unwrap(), g_expect);
        }
    }

    #[test]
    fn f_for_constant_and_quadratic_h() {
        // constant h: quotient is 0, so F(f) = −f′
        let m = OmegaDT::new(rat(1), rat(3), MultiPoly::constant(&t_vars(), rat(5))).unwrap();
        let t2 = MultiPoly::monomial(&t_vars(), vec![2], rat(1));
        let mut expect = MultiPoly::zero(&t_vars());
        expect.add_term(vec![1], rat(-2));
        assert_eq!(m.f_op(&t2).unwrap(), expect);

        // h = t^2: (t² − α²)/(t − α) = t + α, so F(t^p) = (t + α) t^p − p t^{p−1}
        let h = MultiPoly::monomial(&t_vars(), vec![2], rat(1));
        let alpha = ratio(1, 3);
        let m = OmegaDT::new(rat(1), alpha.clone(), h).unwrap();
        let mut q_expect = MultiPoly::zero(&t_vars());
        q_expect.add_term(vec![1], rat(1));
        q_expect.add_term(vec![0], alpha.clone());
        assert_eq!(m.f_quotient(), q_expect);
        let t1 = MultiPoly::monomial(&t_vars(), vec![1], rat(1));
        let mut f_expect = MultiPoly::zero(&t_vars());
        f_expect.add_term(vec![2], rat(1));
        f_expect.add_term(vec![1], alpha.clone());
        f_expect.add_term(vec![0], rat(-1));
        assert_eq!(m.f_op(&t1).unwrap(), f_expect);
    }

    #[test]
    fn dt_action_frozen_values() {
        // λ=2, α=1, h=t: F(1) = 1, G(1) = 1 + t
        let m = OmegaDT::with_linear_h(rat(2), rat(1), rat(1), rat(0)).unwrap();
        // d_1(1) = 2(∂ + (1 + t) − 1) = 2∂ + 2t
        let got = m.act(1, &dt_mono(0, 0, 1)).unwrap();
        let mut expect = MultiPoly::zero(&dt_vars());
        expect.add_term(vec![1, 0], rat(2));
        expect.add_term(vec![0, 1], rat(2));
        assert_eq!(got, expect);
        // d_{-1}(1) = (1/2)(∂ − (1 + t) − 1) = ∂/2 − t/2 − 1
        let got = m.act(-1, &dt_mono(0, 0, 1)).unwrap();
        let mut expect = MultiPoly::zero(&dt_vars());
        expect.add_term(vec![1, 0], ratio(1, 2));
        expect.add_term(vec![0, 1], ratio(-1, 2));
        expect.add_term(vec![0, 0], rat(-1));
        assert_eq!(got, expect);
        // d_2(∂) = 4(∂ − 2)(∂ + 2(1 + t) − 4·1) = 4(∂ − 2)(∂ + 2t − 2)
        let got = m.act(2, &dt_mono(1, 0, 1)).unwrap();
        let d = MultiPoly::var(&dt_vars(), 0);
        let t = MultiPoly::var(&dt_vars(), 1);
        let lhs = d.sub(&MultiPoly::constant(&dt_vars(), rat(2))).unwrap();
        let rhs = d
            .add(&t.scale(&rat(2)))
            .unwrap()
            .sub(&MultiPoly::constant(&dt_vars(), rat(2)))
            .unwrap();
        assert_eq!(got, lhs.mul(&rhs).unwrap().scale(&rat(4)));
    }

    #[test]
    fn d_action_frozen_values() {
        // μ=3, β=2: d_2(∂) = 9(∂ − 2)(∂ − 4) = 9∂² − 54∂ + 72
        let m = OmegaD::new(rat(3), rat(2)).unwrap();
        let elem = MultiPoly::var(&d_vars(), 0);
        let got = m.act(2, &elem).unwrap();
        let mut expect = MultiPoly::zero(&d_vars());
        expect.add_term(vec![2], rat(9));
        expect.add_term(vec![1], rat(-54));
        expect.add_term(vec![0], rat(72));
        assert_eq!(got, expect);
        // negative index: d_{-1}(1) = (1/3)(∂ + 2)
        let got = m.act(-1, &MultiPoly::one(&d_vars())).unwrap();
        let mut expect = MultiPoly::zero(&d_vars());
        expect.add_term(vec![1], ratio(1, 3));
        expect.add_term(vec![0], ratio(2, 3));
        assert_eq!(got, expect);
    }

    #[test]
    fn simplicity_predicates() {
        let simple = OmegaDT::with_linear_h(rat(2), rat(1), rat(1), rat(0)).unwrap();
        assert!(simple.is_simple());
        let alpha_zero = OmegaDT::with_linear_h(rat(2), rat(0), rat(1), rat(0)).unwrap();
        assert!(!alpha_zero.is_simple());
        let h_quadratic =
            OmegaDT::new(rat(2), rat(1), MultiPoly::monomial(&t_vars(), vec![2], rat(1))).unwrap();
        assert!(!h_quadratic.is_simple());
        let h_constant = OmegaDT::new(rat(2), rat(1), MultiPoly::constant(&t_vars(), rat(4))).unwrap();
        assert!(!h_constant.is_simple());

        assert!(OmegaD::new(rat(3), rat(2)).unwrap().is_simple());
        assert!(!OmegaD::new(rat(3), rat(1)).unwrap().is_simple());
        assert!(OmegaD::new(rat(3), rat(0)).unwrap().is_simple());
    }

    #[test]
    fn zero_lambda_mu_rejected() {
        assert!(matches!(
            OmegaDT::with_linear_h(rat(0), rat(1), rat(1), rat(0)),
            Err(Error::ZeroParameter("lambda"))
        ));
        assert!(matches!(OmegaD::new(rat(0), rat(1)), Err(Error::ZeroParameter("mu"))));
    }

    #[test]
    fn dt_action_is_linear() {
        let m = OmegaDT::with_linear_h(ratio(5, 2), rat(-1), rat(2), rat(3)).unwrap();
        let a = dt_mono(2, 1, 3);
        let b = dt_mono(0, 2, -7);
        let sum = a.add(&b).unwrap();
        let lhs = m.act(-3, &sum).unwrap();
        let rhs = m.act(-3, &a).unwrap().add(&m.act(-3, &b).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    proptest::proptest! {
        #[test]
        fn virasoro_bracket_holds_for_random_parameters(
            lam in 1i64..6, al in -3i64..4,
            c0 in -3i64..4, c1 in -3i64..4, c2 in -2i64..3,
            mu in 1i64..6, beta in -3i64..4,
            i in -3i64..4, j in -3i64..4,
            de in 0u32..3, te in 0u32..3, dn in 0u32..4,
        ) {
            use proptest::prelude::prop_assert_eq;
            // [d_i, d_j] = (j − i) d_{i+j}, with c acting as zero on both kinds
            let mut h = MultiPoly::zero(&t_vars());
            for (deg, c) in [(0u32, c0), (1, c1), (2, c2)] {
                if c != 0 {
                    h.add_term(vec![deg], rat(c));
                }
            }
            let m = OmegaDT::new(rat(lam), rat(al), h).unwrap();
            let f = dt_mono(de, te, 1);
            let lhs = m
                .act(i, &m.act(j, &f).unwrap()).unwrap()
                .sub(&m.act(j, &m.act(i, &f).unwrap()).unwrap())
                .unwrap();
            prop_assert_eq!(lhs, m.act(i + j, &f).unwrap().scale(&rat(j - i)));

            let m = OmegaD::new(rat(mu), rat(beta)).unwrap();
            let g = MultiPoly::monomial(&d_vars(), vec![dn], rat(1));
            let lhs = m
                .act(i, &m.act(j, &g).unwrap()).unwrap()
                .sub(&m.act(j, &m.act(i, &g).unwrap()).unwrap())
                .unwrap();
            prop_assert_eq!(lhs, m.act(i + j, &g).unwrap().scale(&rat(j - i)));
        }
    }
}
