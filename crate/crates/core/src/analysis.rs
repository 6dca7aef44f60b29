//! Structural verdicts: the rank invariant `R_f`, parameter canonicalization
//! and the isomorphism classifier, the `d_0`-structure distinction against
//! pure ∂-polynomial tensors, non-local-finiteness witnesses, and the
//! alternating binomial sums underpinning the ω-operator identities.

use num_traits::Zero;

use crate::enveloping::VSpec;
use crate::error::{Error, Result};
use crate::linalg::exact_rank;
use crate::rational::{big_to_rat, binomial, pow_i, rat, Rational};
use crate::tensor::{act, local_bound, TensorElement, TensorSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub value: usize,
    /// (window start K, number of samples).
    pub window: (i64, usize),
    /// The rank was unchanged when recomputed over the shifted window
    /// starting at K+1, confirming K-independence.
    pub stabilized: bool,
}

fn sample_budget(spec: &TensorSpec, f: &TensorElement) -> usize {
    (0..spec.slots())
        .map(|slot| {
            let maxr = f.max_slot_exponent(slot).unwrap_or(0) as usize;
            if slot < spec.m() {
                maxr + 3
            } else {
                maxr + 2
            }
        })
        .sum()
}

fn require_distinct(spec: &TensorSpec) -> Result<()> {
    let b = spec.bases();
    for i in 0..b.len() {
        for j in (i + 1)..b.len() {
            if b[i] == b[j] {
                return Err(Error::DuplicateBase(i, j));
            }
        }
    }
    Ok(())
}

/// `R_f = rank{d_k f : k > K}` computed over the window `K+1..K+B`, where
/// `B` is the number of extraction unknowns — enough samples to exhaust the
/// span of the components, making the result window-independent.
pub fn rank_invariant(spec: &TensorSpec, f: &TensorElement) -> Result<RankReport> {
    if f.is_zero() {
        return Err(Error::ZeroElement);
    }
    require_distinct(spec)?;
    let k0 = local_bound(spec, f);
    let budget = sample_budget(spec, f);
    let rank_from = |start: i64| -> Result<usize> {
        let rows = (0..budget)
            .map(|r| Ok(act(spec, start + r as i64, f)?.to_sparse_row()))
            .collect::<Result<Vec<_>>>()?;
        Ok(exact_rank(&rows))
    };
    let value = rank_from(k0 + 1)?;
    let shifted = rank_from(k0 + 2)?;
    Ok(RankReport { value, window: (k0, budget), stabilized: value == shifted })
}

/// Isomorphism-invariant data of a spec: `(λ_i, a_i)` with `a_i = α_iξ_i`
/// as a multiset, `(μ_j, β_j)` as a multiset, and the V-factor descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalSpec {
    pub dt_part: Vec<(Rational, Rational)>,
    pub d_part: Vec<(Rational, Rational)>,
    pub v_part: Option<VSpec>,
}

pub fn canonicalize(spec: &TensorSpec) -> Result<CanonicalSpec> {
    let mut dt_part = Vec::with_capacity(spec.m());
    for fac in &spec.dt {
        let xi = fac.xi().ok_or_else(|| {
            Error::Hypothesis("canonicalization needs deg h = 1 in every Ω(λ,α,h) factor".into())
        })?;
        dt_part.push((fac.lambda.clone(), &fac.alpha * xi));
    }
    dt_part.sort();
    let mut d_part: Vec<(Rational, Rational)> =
        spec.d.iter().map(|fac| (fac.mu.clone(), fac.beta.clone())).collect();
    d_part.sort();
    Ok(CanonicalSpec { dt_part, d_part, v_part: spec.v.clone() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoVerdict {
    /// `dt_perm[i]` / `d_perm[j]` give the index in `b` matching factor
    /// `i` / `j` of `a`.
    Isomorphic { dt_perm: Vec<usize>, d_perm: Vec<usize> },
    Distinct { reason: String },
    /// Both V factors are induced but presented differently; equality of the
    /// underlying modules is beyond the classifier.
    Unknown { reason: String },
}

impl IsoVerdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic { .. })
    }
}

fn match_multiset(
    a: &[(Rational, Rational)],
    b: &[(Rational, Rational)],
) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut perm = Vec::with_capacity(a.len());
    'outer: for pa in a {
        for (j, pb) in b.iter().enumerate() {
            if !used[j] && pa == pb {
                used[j] = true;
                perm.push(j);
                continue 'outer;
            }
        }
        return None;
    }
    Some(perm)
}

/// Decides `≅` for two tensor specs: factor counts, the canonical pair
/// multisets, and the V descriptors must all agree. The permutation realizing
/// the multiset match is returned as the witness.
pub fn specs_isomorphic(a: &TensorSpec, b: &TensorSpec) -> Result<IsoVerdict> {
    if a.m() != b.m() || a.n() != b.n() {
        return Ok(IsoVerdict::Distinct {
            reason: format!(
                "factor counts differ: ({},{}) vs ({},{})",
                a.m(),
                a.n(),
                b.m(),
                b.n()
            ),
        });
    }
    let ca = canonical_pairs(a)?;
    let cb = canonical_pairs(b)?;
    let dt_perm = match match_multiset(&ca.0, &cb.0) {
        Some(p) => p,
        None => {
            return Ok(IsoVerdict::Distinct {
                reason: "the (λ, αξ) multisets differ".into(),
            })
        }
    };
    let d_perm = match match_multiset(&ca.1, &cb.1) {
        Some(p) => p,
        None => {
            return Ok(IsoVerdict::Distinct {
                reason: "the (μ, β) multisets differ".into(),
            })
        }
    };
    match (&a.v, &b.v) {
        (None, None) => {}
        (None, Some(_)) | (Some(_), None) => {
            return Ok(IsoVerdict::Distinct {
                reason: "one spec carries a highest-weight factor, the other does not".into(),
            })
        }
        (Some(VSpec::Verma { theta: t1, h: h1 }), Some(VSpec::Verma { theta: t2, h: h2 })) => {
            if t1 != t2 || h1 != h2 {
                return Ok(IsoVerdict::Distinct {
                    reason: "highest-weight data (θ, h) differ".into(),
                });
            }
        }
        (Some(va @ VSpec::Induced { .. }), Some(vb @ VSpec::Induced { .. })) => {
            if va != vb {
                return Ok(IsoVerdict::Unknown {
                    reason: "induced V factors have different presentations".into(),
                });
            }
        }
        (Some(_), Some(_)) => {
            return Ok(IsoVerdict::Unknown {
                reason: "V factors presented as different kinds (Verma vs induced)".into(),
            })
        }
    }
    Ok(IsoVerdict::Isomorphic { dt_perm, d_perm })
}

/// Per-factor canonical pairs in original slot order (unsorted), for
/// permutation matching.
fn canonical_pairs(
    spec: &TensorSpec,
) -> Result<(Vec<(Rational, Rational)>, Vec<(Rational, Rational)>)> {
    let mut dt = Vec::with_capacity(spec.m());
    for fac in &spec.dt {
        let xi = fac.xi().ok_or_else(|| {
            Error::Hypothesis("classification needs deg h = 1 in every Ω(λ,α,h) factor".into())
        })?;
        dt.push((fac.lambda.clone(), &fac.alpha * xi));
    }
    let d = spec.d.iter().map(|fac| (fac.mu.clone(), fac.beta.clone())).collect();
    Ok((dt, d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureOmegaDistinction {
    pub distinguishable: bool,
    pub witness: String,
}

/// A spec with at least one Ω(λ,α,h) factor is never isomorphic to a pure
/// `⊗Ω(μ,β)` spec, already as a module over the polynomial algebra in `d_0`:
/// the t-variables make the former infinitely generated in each ∂-degree.
pub fn distinguish_pure_omega(
    a: &TensorSpec,
    b: &TensorSpec,
) -> Result<PureOmegaDistinction> {
    if a.m() == 0 {
        return Err(Error::Hypothesis(
            "the distinction requires at least one Ω(λ,α,h) factor on the left".into(),
        ));
    }
    if b.m() != 0 || b.v.is_some() {
        return Err(Error::Hypothesis(
            "the right-hand spec must be a pure ⊗Ω(μ,β) tensor".into(),
        ));
    }
    Ok(PureOmegaDistinction {
        distinguishable: true,
        witness: format!(
            "as C[d_0]-modules: the left spec carries {} t-variable(s), so its d_0-structure \
             has unbounded free rank in every fixed ∂-multidegree, while the pure side is the \
             polynomial ring in {} ∂-variable(s), of free rank 1 over C[d_0] in each; \
             no C[d_0]-isomorphism can exist",
            a.m(),
            b.n()
        ),
    })
}

/// The iterates `d_{n+1}^j(vacuum)`, `j = 1..count`, guaranteed linearly
/// independent: `d_{n+1}` generates an infinite-dimensional space from the
/// vacuum, so the positive part above `n` does not act locally finitely.
pub fn non_local_finiteness_witness(
    spec: &TensorSpec,
    n: i64,
    count: usize,
) -> Result<Vec<TensorElement>> {
    if n < 1 || count < 1 {
        return Err(Error::Hypothesis("need n ≥ 1 and count ≥ 1".into()));
    }
    let mut iterates = Vec::with_capacity(count);
    let mut current = TensorElement::vacuum(spec);
    for _ in 0..count {
        current = act(spec, n + 1, &current)?;
        iterates.push(current.clone());
    }
    let rows: Vec<_> = iterates.iter().map(TensorElement::to_sparse_row).collect();
    let rank = exact_rank(&rows);
    if rank != count {
        return Err(Error::CertificationFailed(format!(
            "d_{}^j iterates of the vacuum have rank {rank} < {count}",
            n + 1
        )));
    }
    Ok(iterates)
}

/// `Σ_{i=0}^r (−1)^{r−i} C(r,i) i^j`, with `i^0 = 1` throughout; zero
/// exactly when `j < r`, and `r!`-positive at `j = r`.
pub fn binomial_vanishing(r: u32, j: u32) -> Rational {
    let mut sum = Rational::zero();
    for i in 0..=r as i64 {
        let mut term = big_to_rat(binomial(r as i64, i));
        if (r as i64 - i) % 2 != 0 {
            term = -term;
        }
        let power = pow_i(&rat(i), j as i64).expect("nonnegative exponent");
        sum += term * power;
    }
    sum
}
