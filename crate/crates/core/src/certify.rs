//! Irreducibility certification. A certificate has two halves: a trace
//! driving an arbitrary nonzero element down to the vacuum vector through
//! module operations (actions, extraction components, moves, linear
//! combinations), and a generation trace regenerating every basis monomial
//! inside a degree/level box from the vacuum. Both halves replay step by
//! step with exact equality, so a certificate is independently checkable.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::enveloping::{straighten_apply, verma_basis, verma_generic_ok, PBWMonomial, PBWVector, VSpec};
use crate::error::{Error, Result};
use crate::linalg::SpanBuilder;
use crate::rational::{pow_i, rat, Rational};
use crate::tensor::{
    act, apply_move, enumerate_box, extract_components, local_bound, Move, TensorElement,
    TensorMonomial, TensorSpec,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertStep {
    /// Element 0 of a trace: the trace input.
    Start,
    /// `act(k, elems[src])`.
    Act { src: usize, k: i64 },
    /// `extract_components(elems[src]).component(slot, power)`.
    Component { src: usize, slot: usize, power: u32 },
    /// `apply_move(mv, elems[src])` (strict variant).
    ApplyMove { src: usize, mv: Move },
    /// `Σ coeff · elems[idx]`.
    Combine { parts: Vec<(usize, Rational)> },
}

/// A replayable computation: step `i` produces `outputs[i]`, and every step
/// only references earlier indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub steps: Vec<CertStep>,
    pub outputs: Vec<TensorElement>,
}

impl Trace {
    fn push(&mut self, step: CertStep, output: TensorElement) -> usize {
        self.steps.push(step);
        self.outputs.push(output);
        self.outputs.len() - 1
    }

    fn last_output(&self) -> &TensorElement {
        self.outputs.last().expect("trace is never empty")
    }

    /// Recomputes every step from scratch and compares with the recorded
    /// outputs. `start` is the element the trace claims to begin from.
    pub fn replay(&self, spec: &TensorSpec, start: &TensorElement) -> Result<()> {
        if self.steps.is_empty() || self.steps[0] != CertStep::Start {
            return Err(Error::CertificationFailed("trace must open with its input".into()));
        }
        let mut elems: Vec<TensorElement> = Vec::with_capacity(self.steps.len());
        for (idx, step) in self.steps.iter().enumerate() {
            let recomputed = match step {
                CertStep::Start => start.clone(),
                CertStep::Act { src, k } => {
                    act(spec, *k, elems.get(*src).ok_or_else(|| bad_ref(idx, *src))?)?
                }
                CertStep::Component { src, slot, power } => {
                    let source = elems.get(*src).ok_or_else(|| bad_ref(idx, *src))?;
                    extract_components(spec, source)?.component(*slot, *power)
                }
                CertStep::ApplyMove { src, mv } => {
                    apply_move(spec, *mv, elems.get(*src).ok_or_else(|| bad_ref(idx, *src))?)?
                }
                CertStep::Combine { parts } => {
                    let mut sum = TensorElement::zero();
                    for (src, coeff) in parts {
                        sum.add_scaled(elems.get(*src).ok_or_else(|| bad_ref(idx, *src))?, coeff);
                    }
                    sum
                }
            };
            if recomputed != self.outputs[idx] {
                return Err(Error::CertificationFailed(format!(
                    "step {idx} does not reproduce its recorded output"
                )));
            }
            elems.push(recomputed);
        }
        Ok(())
    }
}

fn bad_ref(step: usize, src: usize) -> Error {
    Error::CertificationFailed(format!("step {step} references later or missing element {src}"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreducibilityCertificate {
    /// Degree bound D of the regenerated box.
    pub bound: u32,
    /// V-level bound L of the regenerated box.
    pub level_bound: u32,
    /// From the certified element down to the vacuum (last output).
    pub trace: Trace,
    /// From the vacuum outward; the span of all outputs covers the box.
    pub generation: Trace,
    /// The covered box: every monomial with slot exponents ≤ D and V-level ≤ L.
    pub spanning: Vec<TensorMonomial>,
}

/// Theorem-level preconditions: distinct nonzero bases, simple factors with
/// all parameters nonzero, and a highest-weight V factor with no singular
/// vectors up to the working level.
pub fn check_hypotheses(spec: &TensorSpec, max_level: u32) -> Result<()> {
    if !spec.distinct() {
        let b = spec.bases();
        for i in 0..b.len() {
            for j in (i + 1)..b.len() {
                if b[i] == b[j] {
                    return Err(Error::DuplicateBase(i, j));
                }
            }
        }
    }
    for fac in &spec.dt {
        if !fac.is_simple() {
            return Err(Error::Hypothesis(
                "every Ω(λ,α,h) factor must be simple: deg h = 1 and α ≠ 0".into(),
            ));
        }
    }
    for fac in &spec.d {
        if !fac.is_simple() || fac.beta.is_zero() {
            return Err(Error::Hypothesis(
                "every Ω(μ,β) factor must be simple with β ∉ {0, 1}".into(),
            ));
        }
    }
    match &spec.v {
        None => Err(Error::Hypothesis(
            "certification requires a highest-weight factor".into(),
        )),
        Some(VSpec::Induced { .. }) => Err(Error::Hypothesis(
            "certification covers highest-weight (Verma-presented) factors only".into(),
        )),
        Some(VSpec::Verma { theta, h }) => {
            if !verma_generic_ok(theta, h, max_level.max(1)) {
                return Err(Error::Hypothesis(format!(
                    "Verma factor has a singular vector at level ≤ {}; the reduction \
                     argument needs (θ,h) generic up to the working level",
                    max_level.max(1)
                )));
            }
            Ok(())
        }
    }
}

/// The exponent bound used by stage-B generators at V-level `level`:
/// deeper levels spend actions that can raise slot exponents by one each,
/// so lower levels are generated out to a wider margin.
fn stage_bound(d_bound: u32, level_bound: u32, level: u32) -> u32 {
    d_bound + (level_bound - level)
}

struct Reducer<'a> {
    spec: &'a TensorSpec,
    trace: Trace,
    current: usize,
}

impl<'a> Reducer<'a> {
    fn new(spec: &'a TensorSpec, f: &TensorElement) -> Self {
        let mut trace = Trace::default();
        trace.push(CertStep::Start, f.clone());
        Reducer { spec, trace, current: 0 }
    }

    fn element(&self) -> &TensorElement {
        &self.trace.outputs[self.current]
    }

    fn fail(&self, what: &str) -> Error {
        Error::CertificationFailed(format!(
            "{what}; stuck element: {:?}",
            self.element()
        ))
    }

    /// Isolates the top ∂-layer of `slot` via the highest extraction power
    /// and lands it with that slot's exponent cleared.
    fn strip_slot(&mut self, slot: usize) -> Result<()> {
        let r = self.element().max_slot_exponent(slot).expect("nonzero");
        let power = if slot < self.spec.m() { r + 2 } else { r + 1 };
        let comp = extract_components(self.spec, self.element())?.component(slot, power);
        if comp.is_zero() {
            return Err(self.fail("∂-strip produced zero"));
        }
        self.current = self.trace.push(CertStep::Component { src: self.current, slot, power }, comp);
        Ok(())
    }

    /// One t-degree reduction on dt slot `i` for an all-∂-zero element:
    /// `ξ_i·f + comp_{(λ_i,2)}(f)/α_i` acts as d/dt_i term by term.
    fn lower_t(&mut self, i: usize) -> Result<()> {
        let xi = self.spec.dt[i].xi().expect("simple factor");
        let alpha = self.spec.dt[i].alpha.clone();
        let comp = extract_components(self.spec, self.element())?.component(i, 2);
        let comp_idx = self.trace.push(
            CertStep::Component { src: self.current, slot: i, power: 2 },
            comp,
        );
        let mut combined = self.trace.outputs[self.current].scale(&xi);
        combined.add_scaled(&self.trace.outputs[comp_idx], &(rat(1) / &alpha));
        if combined.is_zero() {
            return Err(self.fail("t-degree reduction produced zero"));
        }
        self.current = self.trace.push(
            CertStep::Combine {
                parts: vec![(self.current, xi), (comp_idx, rat(1) / &alpha)],
            },
            combined,
        );
        Ok(())
    }

    /// For an all-exponent-zero element `1⊗⋯⊗1⊗W`, computes
    /// `1⊗⋯⊗1⊗(d_k W)` by subtracting every Ω-slot contribution of `d_k`
    /// (each expressible through moves on the element itself).
    fn lower_v(&mut self, k: i64) -> Result<usize> {
        let src = self.current;
        let act_idx = self.trace.push(
            CertStep::Act { src, k },
            act(self.spec, k, &self.trace.outputs[src].clone())?,
        );
        let mut parts: Vec<(usize, Rational)> = vec![(act_idx, rat(1))];
        let mut id_coeff = Rational::zero();
        for (i, fac) in self.spec.dt.iter().enumerate() {
            let lk = pow_i(&fac.lambda, k)?;
            let raise = apply_move(self.spec, Move::RaiseDt(i), &self.trace.outputs[src])?;
            let raise_idx =
                self.trace.push(CertStep::ApplyMove { src, mv: Move::RaiseDt(i) }, raise);
            parts.push((raise_idx, -lk.clone()));
            let g = apply_move(self.spec, Move::G(i), &self.trace.outputs[src])?;
            let g_idx = self.trace.push(CertStep::ApplyMove { src, mv: Move::G(i) }, g);
            parts.push((g_idx, -(&lk * rat(k))));
            let xi = fac.xi().expect("simple factor");
            id_coeff += lk * rat(k * k) * &fac.alpha * xi;
        }
        for (j, fac) in self.spec.d.iter().enumerate() {
            let mk = pow_i(&fac.mu, k)?;
            let raise = apply_move(self.spec, Move::RaiseD(j), &self.trace.outputs[src])?;
            let raise_idx =
                self.trace.push(CertStep::ApplyMove { src, mv: Move::RaiseD(j) }, raise);
            parts.push((raise_idx, -mk.clone()));
            id_coeff += mk * rat(k) * &fac.beta;
        }
        if !id_coeff.is_zero() {
            parts.push((src, id_coeff));
        }
        let mut combined = TensorElement::zero();
        for (idx, coeff) in &parts {
            combined.add_scaled(&self.trace.outputs[*idx], coeff);
        }
        Ok(self.trace.push(CertStep::Combine { parts }, combined))
    }
}

/// Verifies that `f` generates the whole module within the window
/// `(d_bound, level_bound)`: stage A reduces `f` to the vacuum through
/// module operations; stage B regenerates the full monomial box from the
/// vacuum. Returns the replayable certificate.
pub fn certify_irreducible(
    spec: &TensorSpec,
    f: &TensorElement,
    d_bound: u32,
    level_bound: u32,
) -> Result<IrreducibilityCertificate> {
    if f.is_zero() {
        return Err(Error::ZeroElement);
    }
    if !f.matches_shape(spec) {
        return Err(Error::BadModuleData("element does not match the spec shape".into()));
    }
    let work_level = level_bound.max(f.max_v_level() as u32);
    check_hypotheses(spec, work_level)?;

    // Stage A: strip ∂-exponents slot by slot via top-layer extraction.
    let mut red = Reducer::new(spec, f);
    loop {
        let worst = (0..spec.slots())
            .filter_map(|s| red.element().max_slot_exponent(s).map(|e| (e, s)))
            .filter(|(e, _)| *e > 0)
            .max_by_key(|(e, s)| (*e, usize::MAX - *s));
        match worst {
            Some((_, slot)) => red.strip_slot(slot)?,
            None => break,
        }
    }
    // Reduce every t-exponent to zero by repeated formal differentiation.
    for i in 0..spec.m() {
        while red
            .element()
            .terms
            .keys()
            .map(|m| m.dt[i].1)
            .max()
            .unwrap_or(0)
            > 0
        {
            red.lower_t(i)?;
        }
    }
    // Drive the highest-weight part down to the highest-weight vector.
    let vspec = spec.v.as_ref().expect("hypothesis gate");
    loop {
        let max_level = red.element().max_v_level();
        if max_level == 0 {
            break;
        }
        let mut advanced = false;
        for k in 1..=max_level as i64 {
            // predict d_k on the V-part; skip k that annihilate it
            let mut v_part = PBWVector::zero();
            for (mono, c) in &red.element().terms {
                v_part.add_term(mono.v.clone().expect("V factor present"), c.clone());
            }
            let lowered = straighten_apply(k, &v_part, vspec)?;
            if lowered.is_zero() {
                continue;
            }
            let idx = red.lower_v(k)?;
            red.current = idx;
            advanced = true;
            break;
        }
        if !advanced {
            return Err(red.fail(
                "no positive mode lowers the highest-weight part (singular vector reached)",
            ));
        }
    }
    // Normalize the surviving vacuum multiple to the vacuum itself.
    let vacuum = TensorElement::vacuum(spec);
    let last = red.element().clone();
    let coeff = match (last.terms.len(), last.terms.get(&TensorMonomial::ones(spec))) {
        (1, Some(c)) => c.clone(),
        _ => return Err(red.fail("reduction did not end on a vacuum multiple")),
    };
    if !coeff.is_one() {
        let inv = rat(1) / &coeff;
        let parts = vec![(red.current, inv)];
        let mut out = TensorElement::zero();
        out.add_scaled(&last, &(rat(1) / &coeff));
        red.current = red.trace.push(CertStep::Combine { parts }, out);
    }
    debug_assert_eq!(red.element(), &vacuum);
    let trace = red.trace;

    // Stage B: regenerate the box from the vacuum.
    let (generation, spanning) = generate_box(spec, d_bound, level_bound)?;

    Ok(IrreducibilityCertificate { bound: d_bound, level_bound, trace, generation, spanning })
}

/// Exponent grids `{0..=bound}^(2m+n)` in graded order.
fn exponent_grid(spec: &TensorSpec, bound: u32) -> Vec<(Vec<(u32, u32)>, Vec<u32>)> {
    let m = spec.m();
    let n = spec.n();
    let width = 2 * m + n;
    let mut flat: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..width {
        let mut next = Vec::new();
        for prefix in &flat {
            for e in 0..=bound {
                let mut v = prefix.clone();
                v.push(e);
                next.push(v);
            }
        }
        flat = next;
    }
    flat.sort_by_key(|v| (v.iter().sum::<u32>(), v.clone()));
    flat.into_iter()
        .map(|v| {
            let dt: Vec<(u32, u32)> = (0..m).map(|i| (v[2 * i], v[2 * i + 1])).collect();
            let d: Vec<u32> = (0..n).map(|j| v[2 * m + j]).collect();
            (dt, d)
        })
        .collect()
}

fn generate_box(
    spec: &TensorSpec,
    d_bound: u32,
    level_bound: u32,
) -> Result<(Trace, Vec<TensorMonomial>)> {
    let vacuum = TensorElement::vacuum(spec);
    let mut trace = Trace::default();
    let mut span: SpanBuilder<TensorMonomial> = SpanBuilder::new();
    let start = trace.push(CertStep::Start, vacuum.clone());
    span.insert(vacuum.to_sparse_row());

    // (exponents, word) → trace index of a generator whose top term is that
    // monomial. Words are keyed by their exponent maps.
    let mut made: BTreeMap<(Vec<(u32, u32)>, Vec<u32>, Vec<(u32, u32)>), usize> = BTreeMap::new();
    let word_key = |pm: &PBWMonomial| -> Vec<(u32, u32)> {
        pm.exps.iter().map(|(&g, &e)| (g, e)).collect()
    };
    let hw_word = word_key(&PBWMonomial::hw());
    made.insert((vec![(0, 0); spec.m()], vec![0; spec.n()], hw_word.clone()), start);

    // Level 0: t-degrees by G moves, then ∂-degrees by Raise moves; each
    // target monomial appears as the top of its generator.
    let b0 = stage_bound(d_bound, level_bound, 0);
    for (dt, d) in exponent_grid(spec, b0) {
        if dt.iter().all(|e| *e == (0, 0)) && d.iter().all(|e| *e == 0) {
            continue;
        }
        // peel one exponent: prefer ∂ (applied after t-moves)
        let (step_src, mv) = if let Some(i) = (0..spec.m()).find(|&i| dt[i].0 > 0) {
            let mut prev_dt = dt.clone();
            prev_dt[i].0 -= 1;
            (made[&(prev_dt, d.clone(), hw_word.clone())], Move::RaiseDt(i))
        } else if let Some(j) = (0..spec.n()).find(|&j| d[j] > 0) {
            let mut prev_d = d.clone();
            prev_d[j] -= 1;
            (made[&(dt.clone(), prev_d, hw_word.clone())], Move::RaiseD(j))
        } else {
            let i = (0..spec.m()).find(|&i| dt[i].1 > 0).expect("nonzero grid point");
            let mut prev_dt = dt.clone();
            prev_dt[i].1 -= 1;
            (made[&(prev_dt, d.clone(), hw_word.clone())], Move::G(i))
        };
        let out = apply_move(spec, mv, &trace.outputs[step_src])?;
        if out.is_zero() {
            return Err(Error::CertificationFailed(format!(
                "generation move {mv:?} vanished while building the box"
            )));
        }
        let idx = trace.push(CertStep::ApplyMove { src: step_src, mv }, out);
        span.insert(trace.outputs[idx].to_sparse_row());
        made.insert((dt, d, hw_word.clone()), idx);
    }

    // Higher levels: append the smallest letter of each word by acting with
    // the corresponding negative mode on the one-level-lower generator.
    for level in 1..=level_bound {
        let bl = stage_bound(d_bound, level_bound, level);
        for word in verma_basis(level) {
            let j = *word.exps.keys().next().expect("positive level");
            let mut prev = word.clone();
            {
                let e = prev.exps.get_mut(&j).expect("letter present");
                *e -= 1;
                if *e == 0 {
                    prev.exps.remove(&j);
                }
            }
            let prev_key = word_key(&prev);
            let this_key = word_key(&word);
            for (dt, d) in exponent_grid(spec, bl) {
                let src = made[&(dt.clone(), d.clone(), prev_key.clone())];
                let out = act(spec, -(j as i64), &trace.outputs[src])?;
                let idx = trace.push(CertStep::Act { src, k: -(j as i64) }, out);
                span.insert(trace.outputs[idx].to_sparse_row());
                made.insert((dt, d, this_key.clone()), idx);
            }
        }
    }

    // Coverage check, with a bounded widening fallback if the directed
    // family leaves gaps.
    let spanning = enumerate_box(spec, d_bound, level_bound, 1);
    let missing = |span: &SpanBuilder<TensorMonomial>| -> Option<TensorMonomial> {
        spanning
            .iter()
            .find(|m| {
                let row = TensorElement::from_monomial((*m).clone(), rat(1)).to_sparse_row();
                !span.contains(&row)
            })
            .cloned()
    };
    if missing(&span).is_some() {
        for _round in 0..4 {
            let snapshot = trace.outputs.len();
            for src in 0..snapshot {
                let bound = local_bound(spec, &trace.outputs[src]) + 2;
                for k in -(level_bound as i64 + 2)..=bound {
                    let out = act(spec, k, &trace.outputs[src])?;
                    if !out.is_zero() && span.insert(out.to_sparse_row()) {
                        trace.push(CertStep::Act { src, k }, out);
                    }
                }
            }
            if missing(&span).is_none() || trace.outputs.len() == snapshot {
                break;
            }
        }
    }
    if let Some(m) = missing(&span) {
        return Err(Error::CertificationFailed(format!(
            "box monomial not regenerated from the vacuum: {m:?}"
        )));
    }
    Ok((trace, spanning))
}

/// Full certificate verification: both traces replay exactly, the reduction
/// ends on the vacuum, the claimed box matches the bounds, and the span of
/// the generation outputs contains every box monomial.
pub fn replay(
    spec: &TensorSpec,
    cert: &IrreducibilityCertificate,
    f: &TensorElement,
) -> Result<()> {
    cert.trace.replay(spec, f)?;
    let vacuum = TensorElement::vacuum(spec);
    if cert.trace.last_output() != &vacuum {
        return Err(Error::CertificationFailed(
            "reduction trace does not end on the vacuum vector".into(),
        ));
    }
    cert.generation.replay(spec, &vacuum)?;
    let expected_box = enumerate_box(spec, cert.bound, cert.level_bound, 1);
    if cert.spanning != expected_box {
        return Err(Error::CertificationFailed(
            "spanning list does not enumerate the claimed box".into(),
        ));
    }
    let mut span: SpanBuilder<TensorMonomial> = SpanBuilder::new();
    for out in &cert.generation.outputs {
        span.insert(out.to_sparse_row());
    }
    for m in &cert.spanning {
        let row = TensorElement::from_monomial(m.clone(), rat(1)).to_sparse_row();
        if !span.contains(&row) {
            return Err(Error::CertificationFailed(format!(
                "replayed span misses box monomial {m:?}"
            )));
        }
    }
    Ok(())
}
