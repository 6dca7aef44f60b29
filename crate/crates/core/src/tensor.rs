//! Tensor modules `(⊗_i Ω(λ_i,α_i,h_i)) ⊗ (⊗_j Ω(μ_j,β_j)) ⊗ V`: the Leibniz
//! action, the degree order on exponent data, coefficient extraction against
//! the confluent Vandermonde system, the named moves, ω operators, and the
//! `W_m` submodule/quotient machinery for two factors sharing a base.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::enveloping::{local_bound_monomial, straighten_apply, PBWMonomial, PBWVector, Tail, VSpec};
use crate::error::{Error, Result};
use crate::linalg::{solve_square, SparseRow};
use crate::omega::{d_vars, dt_vars, t_vars, OmegaD, OmegaDT};
use crate::poly::MultiPoly;
use crate::rational::{big_to_rat, binomial, pow_i, rat, Rational};
use crate::vandermonde::{confluent_matrix, ConfluentSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub dt: Vec<OmegaDT>,
    pub d: Vec<OmegaD>,
    pub v: Option<VSpec>,
}

impl TensorSpec {
    pub fn new(dt: Vec<OmegaDT>, d: Vec<OmegaD>, v: Option<VSpec>) -> Result<Self> {
        if dt.is_empty() && d.is_empty() {
            return Err(Error::BadModuleData("at least one Ω factor is required".into()));
        }
        Ok(TensorSpec { dt, d, v })
    }

    pub fn m(&self) -> usize {
        self.dt.len()
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn slots(&self) -> usize {
        self.m() + self.n()
    }

    /// Bases in slot order: λ_1..λ_m, μ_1..μ_n.
    pub fn bases(&self) -> Vec<Rational> {
        self.dt
            .iter()
            .map(|f| f.lambda.clone())
            .chain(self.d.iter().map(|f| f.mu.clone()))
            .collect()
    }

    /// Pairwise distinctness of all λ_i, μ_j (extraction hypothesis).
    pub fn distinct(&self) -> bool {
        let b = self.bases();
        for i in 0..b.len() {
            for j in (i + 1)..b.len() {
                if b[i] == b[j] {
                    return false;
                }
            }
        }
        true
    }

    pub fn all_simple(&self) -> bool {
        self.dt.iter().all(|f| f.is_simple()) && self.d.iter().all(|f| f.is_simple())
    }

    /// Scalar by which the central element acts: θ with a V factor, 0 without.
    pub fn central_charge(&self) -> Rational {
        match &self.v {
            Some(vs) => vs.theta().clone(),
            None => rat(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorMonomial {
    /// Per dt-slot (∂-exponent r_i, t-exponent p_i).
    pub dt: Vec<(u32, u32)>,
    /// Per d-slot ∂-exponent r_{m+j}.
    pub d: Vec<u32>,
    pub v: Option<PBWMonomial>,
}

impl TensorMonomial {
    pub fn ones(spec: &TensorSpec) -> Self {
        TensorMonomial {
            dt: vec![(0, 0); spec.m()],
            d: vec![0; spec.n()],
            v: spec.v.as_ref().map(|vs| match vs {
                VSpec::Verma { .. } => PBWMonomial::hw(),
                VSpec::Induced { .. } => PBWMonomial::tail_only(Tail::Basis(0)),
            }),
        }
    }

    fn matches_shape(&self, spec: &TensorSpec) -> bool {
        self.dt.len() == spec.m()
            && self.d.len() == spec.n()
            && match (&self.v, &spec.v) {
                (None, None) => true,
                (Some(pm), Some(VSpec::Verma { .. })) => matches!(pm.tail, Tail::Hw),
                (Some(pm), Some(VSpec::Induced { .. })) => matches!(pm.tail, Tail::Basis(_)),
                _ => false,
            }
    }

    pub fn v_level(&self) -> u64 {
        self.v.as_ref().map(|pm| pm.level()).unwrap_or(0)
    }
}

/// The degree order of the exponent data: lexicographic on the ∂-exponent
/// block (r_1..r_m), then the t-exponent block (p_1..p_m), then the pure
/// ∂-block (r_{m+1}..r_{m+n}); the V part does not participate.
pub fn compare_exponents(a: &TensorMonomial, b: &TensorMonomial) -> Ordering {
    let ra = a.dt.iter().map(|(r, _)| *r);
    let rb = b.dt.iter().map(|(r, _)| *r);
    ra.cmp(rb)
        .then_with(|| {
            let pa = a.dt.iter().map(|(_, p)| *p);
            let pb = b.dt.iter().map(|(_, p)| *p);
            pa.cmp(pb)
        })
        .then_with(|| a.d.cmp(&b.d))
}

impl PartialOrd for TensorMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TensorMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_exponents(self, other).then_with(|| self.v.cmp(&other.v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorElement {
    pub terms: BTreeMap<TensorMonomial, Rational>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_monomial(m: TensorMonomial, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    /// The vacuum vector 1⊗⋯⊗1⊗v.
    pub fn vacuum(spec: &TensorSpec) -> Self {
        Self::from_monomial(TensorMonomial::ones(spec), rat(1))
    }

    /// `add_term` without taking ownership of the key: clones it only when
    /// the monomial is not already present.
    fn upsert(&mut self, m: &TensorMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        if let Some(cur) = self.terms.get_mut(m) {
            *cur += c;
            if cur.is_zero() {
                self.terms.remove(m);
            }
        } else {
            self.terms.insert(m.clone(), c);
        }
    }

    pub fn add_term(&mut self, m: TensorMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TensorElement, c: &Rational) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> TensorElement {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn matches_shape(&self, spec: &TensorSpec) -> bool {
        self.terms.keys().all(|m| m.matches_shape(spec))
    }

    /// Max ∂-exponent appearing in the given slot (global index; dt slots
    /// first), or None on the zero element.
    pub fn max_slot_exponent(&self, slot: usize) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| {
                if slot < m.dt.len() {
                    m.dt[slot].0
                } else {
                    m.d[slot - m.dt.len()]
                }
            })
            .max()
    }

    pub fn max_v_level(&self) -> u64 {
        self.terms.keys().map(|m| m.v_level()).max().unwrap_or(0)
    }

    /// Sparse-row view for rank computations and span membership.
    pub fn to_sparse_row(&self) -> SparseRow<TensorMonomial> {
        self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect()
    }
}

/// Exponent data of the maximal term under the degree order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degree {
    pub dt: Vec<(u32, u32)>,
    pub d: Vec<u32>,
}

pub fn degree(f: &TensorElement) -> Result<Degree> {
    let top = f
        .terms
        .keys()
        .max_by(|a, b| compare_exponents(a, b))
        .ok_or(Error::ZeroElement)?;
    Ok(Degree { dt: top.dt.clone(), d: top.d.clone() })
}

/// `K` such that `d_k f` has no V-factor contribution for every `k > K`.
pub fn local_bound(spec: &TensorSpec, f: &TensorElement) -> i64 {
    match &spec.v {
        None => 0,
        Some(vs) => f
            .terms
            .keys()
            .filter_map(|m| m.v.as_ref())
            .map(|pm| local_bound_monomial(pm, vs))
            .max()
            .unwrap_or(0),
    }
}

/// Action of `d_k` by the Leibniz rule across all slots and the V factor.
pub fn act(spec: &TensorSpec, k: i64, f: &TensorElement) -> Result<TensorElement> {
    let mut out = TensorElement::zero();
    for (mono, c) in &f.terms {
        debug_assert!(mono.matches_shape(spec));
        for (i, fac) in spec.dt.iter().enumerate() {
            let (r, p) = mono.dt[i];
            let slot_in = MultiPoly::monomial(&dt_vars(), vec![r, p], rat(1));
            let acted = fac.act(k, &slot_in)?;
            for (exps, c2) in acted.terms() {
                let mut m2 = mono.clone();
                m2.dt[i] = (exps[0], exps[1]);
                out.add_term(m2, c * c2);
            }
        }
        for (j, fac) in spec.d.iter().enumerate() {
            let q = mono.d[j];
            let slot_in = MultiPoly::monomial(&d_vars(), vec![q], rat(1));
            let acted = fac.act(k, &slot_in)?;
            for (exps, c2) in acted.terms() {
                let mut m2 = mono.clone();
                m2.d[j] = exps[0];
                out.add_term(m2, c * c2);
            }
        }
        if let Some(vs) = &spec.v {
            let pm = mono.v.as_ref().expect("shape checked");
            let acted = straighten_apply(k, &PBWVector::from_monomial(pm.clone(), rat(1)), vs)?;
            for (pm2, c2) in &acted.terms {
                let mut m2 = mono.clone();
                m2.v = Some(pm2.clone());
                out.add_term(m2, c * c2);
            }
        }
    }
    Ok(out)
}

/// Memoizes per-slot `d_k` images so sweeps that apply many operators over a
/// box of basis vectors pay for each slot computation once.  The cache is
/// filled by the same per-factor action code as [`act`] and produces
/// identical elements; only the slot-level recomputation is skipped.
pub struct ActCache<'a> {
    spec: &'a TensorSpec,
    dt: Vec<BTreeMap<(i64, (u32, u32)), Vec<((u32, u32), Rational)>>>,
    d: Vec<BTreeMap<(i64, u32), Vec<(u32, Rational)>>>,
    v: BTreeMap<(i64, PBWMonomial), PBWVector>,
}

impl<'a> ActCache<'a> {
    pub fn new(spec: &'a TensorSpec) -> Self {
        ActCache {
            spec,
            dt: vec![BTreeMap::new(); spec.m()],
            d: vec![BTreeMap::new(); spec.n()],
            v: BTreeMap::new(),
        }
    }

    pub fn act(&mut self, k: i64, f: &TensorElement) -> Result<TensorElement> {
        let mut out = TensorElement::zero();
        self.act_scaled_into(k, f, &rat(1), &mut out)?;
        Ok(out)
    }

    /// Accumulates `scale · d_k(f)` into `out`; lets sweeps fuse several
    /// applications into one term map instead of merging intermediates.
    pub fn act_scaled_into(
        &mut self,
        k: i64,
        f: &TensorElement,
        scale: &Rational,
        out: &mut TensorElement,
    ) -> Result<()> {
        let spec = self.spec;
        let negate = (-scale).is_one();
        let plain = scale.is_one() || negate;
        for (mono, c) in &f.terms {
            debug_assert!(mono.matches_shape(spec));
            let emit = |coeff: Rational| {
                if plain {
                    if negate {
                        -coeff
                    } else {
                        coeff
                    }
                } else {
                    coeff * scale
                }
            };
            let mut m2 = mono.clone();
            for (i, fac) in spec.dt.iter().enumerate() {
                let key = (k, mono.dt[i]);
                if !self.dt[i].contains_key(&key) {
                    let slot_in = MultiPoly::monomial(&dt_vars(), vec![key.1 .0, key.1 .1], rat(1));
                    let entries = fac
                        .act(k, &slot_in)?
                        .terms()
                        .map(|(e, c2)| ((e[0], e[1]), c2.clone()))
                        .collect();
                    self.dt[i].insert(key, entries);
                }
                for ((r2, p2), c2) in &self.dt[i][&key] {
                    m2.dt[i] = (*r2, *p2);
                    out.upsert(&m2, emit(c * c2));
                }
                m2.dt[i] = mono.dt[i];
            }
            for (j, fac) in spec.d.iter().enumerate() {
                let key = (k, mono.d[j]);
                if !self.d[j].contains_key(&key) {
                    let slot_in = MultiPoly::monomial(&d_vars(), vec![key.1], rat(1));
                    let entries = fac
                        .act(k, &slot_in)?
                        .terms()
                        .map(|(e, c2)| (e[0], c2.clone()))
                        .collect();
                    self.d[j].insert(key, entries);
                }
                for (q2, c2) in &self.d[j][&key] {
                    m2.d[j] = *q2;
                    out.upsert(&m2, emit(c * c2));
                }
                m2.d[j] = mono.d[j];
            }
            if let Some(vs) = &spec.v {
                let pm = mono.v.as_ref().expect("shape checked");
                let key = (k, pm.clone());
                if !self.v.contains_key(&key) {
                    let acted =
                        straighten_apply(k, &PBWVector::from_monomial(pm.clone(), rat(1)), vs)?;
                    self.v.insert(key.clone(), acted);
                }
                for (pm2, c2) in &self.v[&key].terms {
                    m2.v = Some(pm2.clone());
                    out.upsert(&m2, emit(c * c2));
                }
            }
        }
        Ok(())
    }
}

/// `[d_i,d_j]f − (j−i)d_{i+j}f − δ_{i,−j}((i³−i)/12)·c·f`; zero iff the
/// defining relation holds on `f`.
pub fn bracket_defect(spec: &TensorSpec, i: i64, j: i64, f: &TensorElement) -> Result<TensorElement> {
    let mut out = act(spec, i, &act(spec, j, f)?)?;
    out.add_scaled(&act(spec, j, &act(spec, i, f)?)?, &rat(-1));
    out.add_scaled(&act(spec, i + j, f)?, &rat(i - j));
    if i == -j {
        let central = crate::rational::ratio(i * i * i - i, 12) * spec.central_charge();
        out.add_scaled(f, &-central);
    }
    Ok(out)
}

/// `ω^{(s)}_{l,m} f = Σ_{i=0}^s C(s,i)(−1)^{s−i} d_{l−m−i}(d_{m+i} f)`.
pub fn omega_op(spec: &TensorSpec, s: u32, l: i64, m: i64, f: &TensorElement) -> Result<TensorElement> {
    let mut out = TensorElement::zero();
    for i in 0..=s as i64 {
        let mut coeff = big_to_rat(binomial(s as i64, i));
        if (s as i64 - i) % 2 != 0 {
            coeff = -coeff;
        }
        let inner = act(spec, m + i, f)?;
        let outer = act(spec, l - m - i, &inner)?;
        out.add_scaled(&outer, &coeff);
    }
    Ok(out)
}

/// The decomposition `d_k f = Σ_{slot,power} k^power · base_slot^k ·
/// component` valid for every `k > bound`, solved exactly from the confluent
/// Vandermonde system on the sampling window `bound+1 .. bound+size`.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub bound: i64,
    pub bases: Vec<Rational>,
    pub mults: Vec<u32>,
    /// Nonzero components keyed by (global slot index, k-power).
    pub components: BTreeMap<(usize, u32), TensorElement>,
}

impl Extraction {
    pub fn window(&self) -> (i64, usize) {
        (self.bound, self.mults.iter().map(|&m| m as usize).sum())
    }

    pub fn component(&self, slot: usize, power: u32) -> TensorElement {
        self.components.get(&(slot, power)).cloned().unwrap_or_default()
    }

    /// Re-sums the decomposition at a concrete `k`; equals `act(k, f)`
    /// whenever `k > bound`.
    pub fn evaluate(&self, k: i64) -> Result<TensorElement> {
        let mut out = TensorElement::zero();
        for ((slot, power), comp) in &self.components {
            let scale = pow_i(&self.bases[*slot], k)? * pow_i(&rat(k), *power as i64)?;
            out.add_scaled(comp, &scale);
        }
        Ok(out)
    }
}

pub fn extract_components(spec: &TensorSpec, f: &TensorElement) -> Result<Extraction> {
    if f.is_zero() {
        return Err(Error::ZeroElement);
    }
    let bases = spec.bases();
    let mut mults = Vec::with_capacity(spec.slots());
    for slot in 0..spec.slots() {
        let maxr = f.max_slot_exponent(slot).unwrap_or(0);
        // dt slots reach k-degree r+2 (the −k²αF term), d slots r+1.
        mults.push(if slot < spec.m() { maxr + 3 } else { maxr + 2 });
    }
    let bound = local_bound(spec, f);
    let cspec = ConfluentSpec::new(bases.clone(), mults.clone(), (bound + 1) as u64)?;
    let size = cspec.size();
    let matrix = confluent_matrix(&cspec);

    // Right-hand sides: one column per monomial in the union support of the
    // sampled actions.
    let mut samples = Vec::with_capacity(size);
    let mut support: BTreeMap<TensorMonomial, usize> = BTreeMap::new();
    for row in 0..size {
        let k = bound + 1 + row as i64;
        let acted = act(spec, k, f)?;
        for m in acted.terms.keys() {
            let next = support.len();
            support.entry(m.clone()).or_insert(next);
        }
        samples.push(acted);
    }
    let monos: Vec<&TensorMonomial> = {
        let mut v = vec![None; support.len()];
        for (m, &idx) in &support {
            v[idx] = Some(m);
        }
        v.into_iter().map(|o| o.expect("dense index")).collect()
    };
    let rhs: Vec<Vec<Rational>> = monos
        .iter()
        .map(|m| {
            samples
                .iter()
                .map(|s| s.terms.get(*m).cloned().unwrap_or_else(Rational::zero))
                .collect()
        })
        .collect();
    let solutions = solve_square(&matrix, &rhs)?;

    let mut components: BTreeMap<(usize, u32), TensorElement> = BTreeMap::new();
    for (mi, sol) in solutions.iter().enumerate() {
        for (ci, (slot, power)) in cspec.columns().iter().enumerate() {
            if !sol[ci].is_zero() {
                components
                    .entry((*slot, *power))
                    .or_default()
                    .add_term(monos[mi].clone(), sol[ci].clone());
            }
        }
    }
    components.retain(|_, e| !e.is_zero());
    Ok(Extraction { bound, bases, mults, components })
}

/// The named operations of the extraction calculus. Slot indices are local
/// to their block: `RaiseDt/AlphaF/G` index dt-factors, `RaiseD/Beta` index
/// d-factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    RaiseDt(usize),
    RaiseD(usize),
    AlphaF(usize),
    G(usize),
    Beta(usize),
}

fn check_dt_slot(spec: &TensorSpec, i: usize) -> Result<()> {
    if i >= spec.m() {
        return Err(Error::SlotOutOfRange { got: i, valid: format!("dt slots 0..{}", spec.m()) });
    }
    Ok(())
}

fn check_d_slot(spec: &TensorSpec, j: usize) -> Result<()> {
    if j >= spec.n() {
        return Err(Error::SlotOutOfRange { got: j, valid: format!("d slots 0..{}", spec.n()) });
    }
    Ok(())
}

/// The common ∂-exponent of a slot, or an error when terms disagree.
fn homogeneous_exponent(f: &TensorElement, spec: &TensorSpec, slot: usize) -> Result<u32> {
    let mut seen: Option<u32> = None;
    for m in f.terms.keys() {
        let e = if slot < spec.m() { m.dt[slot].0 } else { m.d[slot - spec.m()] };
        match seen {
            None => seen = Some(e),
            Some(prev) if prev != e => return Err(Error::MixedSlotExponent { slot }),
            _ => {}
        }
    }
    seen.ok_or(Error::ZeroElement)
}

fn signed(power_parity: u32, e: TensorElement) -> TensorElement {
    if power_parity % 2 == 0 {
        e
    } else {
        e.scale(&rat(-1))
    }
}

/// Applies a move to a slot-homogeneous element via coefficient extraction.
///
/// On a term `∂_i^r t_i^p ⊗ rest` (dt slot) the moves produce exactly:
/// `RaiseDt: ∂_i^{r+1} t_i^p ⊗ rest`; `AlphaF: α_i F_i(t_i^p) ⊗ rest` with
/// the ∂_i-exponent dropped to 0; `G: G_i(t_i^p) ⊗ rest` likewise. On a
/// d-slot term `∂_{m+j}^r ⊗ rest`: `RaiseD: ∂_{m+j}^{r+1} ⊗ rest`;
/// `Beta: β_j ⊗ rest` with the exponent dropped to 0.
pub fn apply_move(spec: &TensorSpec, mv: Move, f: &TensorElement) -> Result<TensorElement> {
    if f.is_zero() {
        return Err(Error::ZeroElement);
    }
    match mv {
        Move::RaiseDt(i) => {
            check_dt_slot(spec, i)?;
            let ex = extract_components(spec, f)?;
            Ok(ex.component(i, 0))
        }
        Move::RaiseD(j) => {
            check_d_slot(spec, j)?;
            let ex = extract_components(spec, f)?;
            Ok(ex.component(spec.m() + j, 0))
        }
        Move::AlphaF(i) => {
            check_dt_slot(spec, i)?;
            let r = homogeneous_exponent(f, spec, i)?;
            let ex = extract_components(spec, f)?;
            Ok(signed(r + 1, ex.component(i, r + 2)))
        }
        Move::Beta(j) => {
            check_d_slot(spec, j)?;
            let slot = spec.m() + j;
            let r = homogeneous_exponent(f, spec, slot)?;
            let ex = extract_components(spec, f)?;
            Ok(signed(r + 1, ex.component(slot, r + 1)))
        }
        Move::G(i) => {
            check_dt_slot(spec, i)?;
            let r = homogeneous_exponent(f, spec, i)?;
            let ex = extract_components(spec, f)?;
            let mut out = signed(r, ex.component(i, r + 1));
            if r > 0 {
                // the k^{r+1} coefficient mixes G with r·∂_i·α_iF_i; subtract
                // the correction rebuilt from the other two moves
                let alpha_f = apply_move(spec, Move::AlphaF(i), f)?;
                let raised = apply_move(spec, Move::RaiseDt(i), &alpha_f)?;
                out.add_scaled(&raised, &rat(-(r as i64)));
            }
            Ok(out)
        }
    }
}

/// [`apply_move`] extended to arbitrary elements by splitting into
/// slot-homogeneous components first and summing the results.
pub fn apply_move_split(spec: &TensorSpec, mv: Move, f: &TensorElement) -> Result<TensorElement> {
    let slot = match mv {
        Move::RaiseDt(i) | Move::AlphaF(i) | Move::G(i) => {
            check_dt_slot(spec, i)?;
            i
        }
        Move::RaiseD(j) | Move::Beta(j) => {
            check_d_slot(spec, j)?;
            spec.m() + j
        }
    };
    let mut parts: BTreeMap<u32, TensorElement> = BTreeMap::new();
    for (m, c) in &f.terms {
        let e = if slot < spec.m() { m.dt[slot].0 } else { m.d[slot - spec.m()] };
        parts.entry(e).or_default().add_term(m.clone(), c.clone());
    }
    let mut out = TensorElement::zero();
    for part in parts.values() {
        out.add_scaled(&apply_move(spec, mv, part)?, &rat(1));
    }
    Ok(out)
}

/// Which factor's ∂ is the capped variable `∂_1` of the `W_m` chain in
/// `Ω(λ,α,h) ⊗ Ω(λ,β)`: the factor carrying `t`, or the pure-∂ factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WmCase {
    CapDt,
    CapD,
}

fn wm_shape(spec: &TensorSpec) -> Result<()> {
    if spec.m() != 1 || spec.n() != 1 || spec.v.is_some() {
        return Err(Error::Hypothesis(
            "W_m analysis needs exactly Ω(λ,α,h) ⊗ Ω(μ,β) with no V factor".into(),
        ));
    }
    Ok(())
}

fn wm_same_base(spec: &TensorSpec) -> Result<()> {
    wm_shape(spec)?;
    if spec.dt[0].lambda != spec.d[0].mu {
        return Err(Error::Hypothesis("W_m requires the two factors to share λ".into()));
    }
    Ok(())
}

pub fn wm_vars() -> std::sync::Arc<crate::poly::VarTable> {
    use std::sync::OnceLock;
    static VARS: OnceLock<std::sync::Arc<crate::poly::VarTable>> = OnceLock::new();
    VARS.get_or_init(|| crate::poly::VarTable::new(&["x", "u", "t"])).clone()
}

/// Rewrites a two-factor element in the variables (x, u, t) with
/// `x = ∂_1` (the capped variable per `case`) and `u = ∂_1 + ∂_2`.
pub fn to_u_basis(spec: &TensorSpec, f: &TensorElement, case: WmCase) -> Result<MultiPoly> {
    wm_shape(spec)?;
    let vars = wm_vars();
    let x = MultiPoly::var(&vars, 0);
    let u = MultiPoly::var(&vars, 1);
    let other = u.sub(&x)?; // ∂_2 = u − x
    let mut out = MultiPoly::zero(&vars);
    for (mono, c) in &f.terms {
        let (r_dt, p) = mono.dt[0];
        let q = mono.d[0];
        let (x_exp, other_exp) = match case {
            WmCase::CapDt => (r_dt, q),
            WmCase::CapD => (q, r_dt),
        };
        let mut term = MultiPoly::monomial(&vars, vec![x_exp, 0, p], c.clone());
        term = term.mul(&other.pow(other_exp))?;
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Inverse of [`to_u_basis`]: a polynomial in (x, u, t) back to tensor form.
pub fn from_u_basis(spec: &TensorSpec, poly: &MultiPoly, case: WmCase) -> Result<TensorElement> {
    wm_shape(spec)?;
    let mut out = TensorElement::zero();
    for (exps, c) in poly.terms() {
        let (a, b, p) = (exps[0], exps[1], exps[2]);
        // x^a u^b t^p = Σ_c C(b,c) ∂_1^{a+c} ∂_2^{b−c} t^p
        for s in 0..=b {
            let coeff = c * big_to_rat(binomial(b as i64, s as i64));
            let (e1, e2) = (a + s, b - s);
            let (r_dt, q) = match case {
                WmCase::CapDt => (e1, e2),
                WmCase::CapD => (e2, e1),
            };
            out.add_term(TensorMonomial { dt: vec![(r_dt, p)], d: vec![q], v: None }, coeff);
        }
    }
    Ok(out)
}

/// True iff every term of `f` in the u-basis has x-exponent ≤ m.
pub fn wm_member(spec: &TensorSpec, f: &TensorElement, m: u32, case: WmCase) -> Result<bool> {
    wm_same_base(spec)?;
    let p = to_u_basis(spec, f, case)?;
    let ok = p.terms().all(|(exps, _)| exps[0] <= m);
    Ok(ok)
}

/// The induced map `W_m/W_{m−1} → Ω(λ, α, h−m−β)`: drop terms with
/// x-exponent < m, send `x^m u^n t^p ↦ ∂^n t^p`. Returns the target module
/// and the image.
pub fn quotient_phi(
    spec: &TensorSpec,
    f: &TensorElement,
    m: u32,
    case: WmCase,
) -> Result<(OmegaDT, MultiPoly)> {
    wm_same_base(spec)?;
    if !wm_member(spec, f, m, case)? {
        return Err(Error::NotInSubmodule(format!("element has x-degree above {m}")));
    }
    let src = &spec.dt[0];
    let shift = MultiPoly::constant(
        &t_vars(),
        -(rat(m as i64) + &spec.d[0].beta),
    );
    let target = OmegaDT::new(src.lambda.clone(), src.alpha.clone(), src.h.add(&shift)?)?;
    let p = to_u_basis(spec, f, case)?;
    let mut image = MultiPoly::zero(&dt_vars());
    for (exps, c) in p.terms() {
        if exps[0] == m {
            image.add_term(vec![exps[1], exps[2]], c.clone());
        }
    }
    Ok((target, image))
}

/// All monomials with every slot exponent ≤ `d_bound` and V-level ≤
/// `v_level`; induced tails range over basis indices `0..tail_indices`.
pub fn enumerate_box(
    spec: &TensorSpec,
    d_bound: u32,
    v_level: u32,
    tail_indices: u32,
) -> Vec<TensorMonomial> {
    let mut dt_choices: Vec<Vec<(u32, u32)>> = vec![Vec::new()];
    for _ in 0..spec.m() {
        let mut next = Vec::new();
        for prefix in &dt_choices {
            for r in 0..=d_bound {
                for p in 0..=d_bound {
                    let mut v = prefix.clone();
                    v.push((r, p));
                    next.push(v);
                }
            }
        }
        dt_choices = next;
    }
    let mut d_choices: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..spec.n() {
        let mut next = Vec::new();
        for prefix in &d_choices {
            for q in 0..=d_bound {
                let mut v = prefix.clone();
                v.push(q);
                next.push(v);
            }
        }
        d_choices = next;
    }
    let v_choices: Vec<Option<PBWMonomial>> = match &spec.v {
        None => vec![None],
        Some(vs) => {
            let mut words = Vec::new();
            for level in 0..=v_level {
                words.extend(crate::enveloping::verma_basis(level));
            }
            match vs {
                VSpec::Verma { .. } => words.into_iter().map(Some).collect(),
                VSpec::Induced { .. } => {
                    let mut out = Vec::new();
                    for w in words {
                        for b in 0..tail_indices.max(1) {
                            out.push(Some(PBWMonomial { exps: w.exps.clone(), tail: Tail::Basis(b) }));
                        }
                    }
                    out
                }
            }
        }
    };
    let mut out = Vec::new();
    for dt in &dt_choices {
        for d in &d_choices {
            for v in &v_choices {
                out.push(TensorMonomial { dt: dt.clone(), d: d.clone(), v: v.clone() });
            }
        }
    }
    out
}
