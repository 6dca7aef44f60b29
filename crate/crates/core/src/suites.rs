//! Named verification suites behind the `check` command.
//!
//! Each suite sweeps one family of invariants over the given spec at the
//! given bounds and appends one report entry per checked instance. All
//! randomness comes from a ChaCha stream seeded from the report seed, so a
//! report is reproducible from its own header.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::analysis::{
    binomial_vanishing, rank_invariant, specs_isomorphic, IsoVerdict,
};
use crate::certify;
use crate::element::format_element;
use crate::enveloping::{verma_basis, BasisKind, PBWMonomial, Tail, VSpec};
use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::nmbeta::{bundled_nm_beta, LaurentPoly, NmElement};
use crate::omega::{OmegaD, OmegaDT};
use crate::poly::MultiPoly;
use crate::rational::{format_rational, rat, ratio, Rational};
use crate::report::Report;
use crate::tensor::{
    act, bracket_defect, enumerate_box, extract_components, from_u_basis, omega_op, quotient_phi,
    wm_member, wm_vars, TensorElement, TensorMonomial, TensorSpec, WmCase,
};
use crate::vandermonde::{confluent_det_formula, confluent_matrix, ConfluentSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// Bracket indices and W_m sweeps run over `[-max_index, max_index]`.
    pub max_index: i64,
    /// Per-slot exponent cap for enumerated and sampled monomials.
    pub max_exp: u32,
    /// V-level cap for enumerated and sampled monomials.
    pub max_level: u32,
    /// Number of random samples per sampled check.
    pub samples: u32,
    /// Degree bound D handed to the irreducibility certifier.
    pub degree: u32,
    /// Level bound L handed to the irreducibility certifier.
    pub level: u32,
    /// Total confluent-Vandermonde size for the determinant suite.
    pub det_size: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_index: 3,
            max_exp: 2,
            max_level: 2,
            samples: 20,
            degree: 2,
            level: 1,
            det_size: 4,
        }
    }
}

impl Bounds {
    pub fn text(&self) -> String {
        format!(
            "max_index={} max_exp={} max_level={} samples={} degree={} level={} det_size={}",
            self.max_index,
            self.max_exp,
            self.max_level,
            self.samples,
            self.degree,
            self.level,
            self.det_size
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bracket,
    Determinant,
    Submodule,
    Quotient,
    Extraction,
    Rank,
    Irreducible,
    Omega,
    ClassifySelf,
    All,
}

impl Suite {
    const BASIC: [Suite; 9] = [
        Suite::Bracket,
        Suite::Determinant,
        Suite::Submodule,
        Suite::Quotient,
        Suite::Extraction,
        Suite::Rank,
        Suite::Irreducible,
        Suite::Omega,
        Suite::ClassifySelf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bracket => "bracket",
            Suite::Determinant => "determinant",
            Suite::Submodule => "submodule",
            Suite::Quotient => "quotient",
            Suite::Extraction => "extraction",
            Suite::Rank => "rank",
            Suite::Irreducible => "irreducible",
            Suite::Omega => "omega",
            Suite::ClassifySelf => "classify-self",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "bracket" => Ok(Suite::Bracket),
            "determinant" => Ok(Suite::Determinant),
            "submodule" => Ok(Suite::Submodule),
            "quotient" => Ok(Suite::Quotient),
            "extraction" => Ok(Suite::Extraction),
            "rank" => Ok(Suite::Rank),
            "irreducible" => Ok(Suite::Irreducible),
            "omega" => Ok(Suite::Omega),
            "classify-self" => Ok(Suite::ClassifySelf),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse {
                pos: 0,
                msg: format!(
                    "unknown suite `{other}`; expected bracket, determinant, submodule, \
                     quotient, extraction, rank, irreducible, omega, classify-self, or all"
                ),
            }),
        }
    }
}

pub fn run_suite(spec: &TensorSpec, suite: Suite, seed: u64, bounds: &Bounds) -> Report {
    let mut report = Report::new(suite.name(), seed, bounds.text());
    match suite {
        Suite::All => {
            for s in Suite::BASIC {
                run_into(spec, s, seed, bounds, &mut report);
            }
        }
        s => run_into(spec, s, seed, bounds, &mut report),
    }
    report
}

fn run_into(spec: &TensorSpec, suite: Suite, seed: u64, bounds: &Bounds, report: &mut Report) {
    match suite {
        Suite::Bracket => suite_bracket(spec, bounds, report),
        Suite::Determinant => suite_determinant(seed, bounds, report),
        Suite::Submodule => suite_wm(spec, bounds, report, false),
        Suite::Quotient => suite_wm(spec, bounds, report, true),
        Suite::Extraction => suite_extraction(spec, seed, bounds, report),
        Suite::Rank => suite_rank(spec, seed, bounds, report),
        Suite::Irreducible => suite_irreducible(spec, seed, bounds, report),
        Suite::Omega => suite_omega(spec, report),
        Suite::ClassifySelf => suite_classify(spec, report),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn rand_nonzero_small(rng: &mut ChaCha20Rng, den_max: i64) -> Rational {
    let num = loop {
        let v = rng.gen_range(-5i64..=5);
        if v != 0 {
            break v;
        }
    };
    ratio(num, rng.gen_range(1..=den_max))
}

fn tail_count(spec: &TensorSpec, max_level: u32) -> u32 {
    match &spec.v {
        Some(VSpec::Induced { n, .. }) => match n.basis {
            BasisKind::Finite(s) => s.max(1).min(max_level + 2),
            BasisKind::Infinite => max_level + 2,
        },
        _ => 1,
    }
}

fn random_tail(spec: &TensorSpec, rng: &mut ChaCha20Rng, max_level: u32) -> Tail {
    match &spec.v {
        Some(VSpec::Induced { .. }) => {
            Tail::Basis(rng.gen_range(0..tail_count(spec, max_level)))
        }
        _ => Tail::Hw,
    }
}

fn random_monomial(
    spec: &TensorSpec,
    rng: &mut ChaCha20Rng,
    max_exp: u32,
    max_level: u32,
) -> TensorMonomial {
    let mut mono = TensorMonomial::ones(spec);
    for slot in mono.dt.iter_mut() {
        slot.0 = rng.gen_range(0..=max_exp);
        slot.1 = rng.gen_range(0..=max_exp);
    }
    for q in mono.d.iter_mut() {
        *q = rng.gen_range(0..=max_exp);
    }
    if spec.v.is_some() {
        let level = rng.gen_range(0..=max_level);
        let words = verma_basis(level);
        let pick = rng.gen_range(0..words.len() as u32) as usize;
        mono.v = Some(PBWMonomial {
            exps: words[pick].exps.clone(),
            tail: random_tail(spec, rng, max_level),
        });
    }
    mono
}

/// Monomial with total slot degree at most `total_degree`.
fn random_bounded_monomial(
    spec: &TensorSpec,
    rng: &mut ChaCha20Rng,
    total_degree: u32,
    max_level: u32,
) -> TensorMonomial {
    let mut budget = total_degree;
    let mut mono = TensorMonomial::ones(spec);
    for slot in mono.dt.iter_mut() {
        slot.0 = rng.gen_range(0..=budget);
        budget -= slot.0;
        slot.1 = rng.gen_range(0..=budget);
        budget -= slot.1;
    }
    for q in mono.d.iter_mut() {
        *q = rng.gen_range(0..=budget);
        budget -= *q;
    }
    if spec.v.is_some() {
        let level = rng.gen_range(0..=max_level);
        let words = verma_basis(level);
        let pick = rng.gen_range(0..words.len() as u32) as usize;
        mono.v = Some(PBWMonomial {
            exps: words[pick].exps.clone(),
            tail: random_tail(spec, rng, max_level),
        });
    }
    mono
}

fn random_element(
    spec: &TensorSpec,
    rng: &mut ChaCha20Rng,
    max_exp: u32,
    max_level: u32,
) -> TensorElement {
    loop {
        let mut f = TensorElement::zero();
        for _ in 0..rng.gen_range(1..=3u32) {
            f.add_term(random_monomial(spec, rng, max_exp, max_level), rand_nonzero_small(rng, 3));
        }
        if !f.is_zero() {
            return f;
        }
    }
}

// --- bracket ---------------------------------------------------------------

fn suite_bracket(spec: &TensorSpec, bounds: &Bounds, report: &mut Report) {
    let monos = enumerate_box(
        spec,
        bounds.max_exp,
        bounds.max_level,
        tail_count(spec, bounds.max_level),
    );
    let b = bounds.max_index;
    for i in -b..=b {
        for j in (i + 1)..=b {
            let mut witness = None;
            for mono in &monos {
                let f = TensorElement::from_monomial(mono.clone(), rat(1));
                match bracket_defect(spec, i, j, &f) {
                    Ok(defect) if defect.is_zero() => {}
                    Ok(defect) => {
                        witness = Some(format!(
                            "f = {}; defect = {}",
                            format_element(&f, spec),
                            format_element(&defect, spec)
                        ));
                        break;
                    }
                    Err(e) => {
                        witness = Some(format!("f = {}; error: {e}", format_element(&f, spec)));
                        break;
                    }
                }
            }
            let instance = format!("i={i} j={j} basis={}", monos.len());
            match witness {
                None => report.pass("bracket-relation", instance),
                Some(w) => report.fail("bracket-relation", instance, w),
            }
        }
    }
}

// --- determinant -----------------------------------------------------------

fn suite_determinant(seed: u64, bounds: &Bounds, report: &mut Report) {
    let mut rng = rng_for(seed, 1);
    for idx in 0..bounds.samples {
        let mut bases: Vec<Rational> = Vec::new();
        let mut mults: Vec<u32> = Vec::new();
        let mut total = 0u32;
        let groups = rng.gen_range(1..=3u32);
        for _ in 0..groups {
            let mult = rng.gen_range(1..=4u32);
            if total + mult > bounds.det_size {
                break;
            }
            let base = loop {
                let b = rand_nonzero_small(&mut rng, 2);
                if !bases.contains(&b) {
                    break b;
                }
            };
            bases.push(base);
            mults.push(mult);
            total += mult;
        }
        if bases.is_empty() {
            bases.push(rand_nonzero_small(&mut rng, 2));
            mults.push(1);
        }
        let offset = rng.gen_range(0u64..=4);
        let instance = format!(
            "sample={idx} bases=[{}] mults={:?} offset={offset}",
            bases.iter().map(format_rational).collect::<Vec<_>>().join(","),
            mults
        );
        let cs = match ConfluentSpec::new(bases, mults, offset) {
            Ok(cs) => cs,
            Err(e) => {
                report.fail("determinant-oracle", instance, format!("construction: {e}"));
                continue;
            }
        };
        let formula = confluent_det_formula(&cs);
        match determinant(&confluent_matrix(&cs)) {
            Ok(brute) if brute == formula => report.pass("determinant-oracle", instance),
            Ok(brute) => report.fail(
                "determinant-oracle",
                instance,
                format!("formula {} vs cofactor {}", format_rational(&formula), format_rational(&brute)),
            ),
            Err(e) => report.fail("determinant-oracle", instance, format!("cofactor: {e}")),
        }
    }
}

// --- W_m: submodule invariance and quotient intertwining --------------------

/// The shared-base two-factor module the W_m chain lives in, derived from the
/// spec's first Ω(λ,α,h) factor and first β (defaults when absent).
fn wm_context(spec: &TensorSpec) -> (TensorSpec, String) {
    let dt = spec
        .dt
        .first()
        .cloned()
        .unwrap_or_else(|| OmegaDT::with_linear_h(rat(2), rat(1), rat(3), rat(1)).expect("valid"));
    let beta = spec.d.first().map(|f| f.beta.clone()).unwrap_or_else(|| rat(5));
    let shared = TensorSpec::new(
        vec![dt.clone()],
        vec![OmegaD::new(dt.lambda.clone(), beta.clone()).expect("lambda nonzero")],
        None,
    )
    .expect("two factors");
    let desc = format!(
        "lambda={} alpha={} beta={}",
        format_rational(&dt.lambda),
        format_rational(&dt.alpha),
        format_rational(&beta)
    );
    (shared, desc)
}

fn suite_wm(spec: &TensorSpec, bounds: &Bounds, report: &mut Report, intertwining: bool) {
    let (wm, desc) = wm_context(spec);
    let vars = wm_vars();
    let check = if intertwining { "quotient-intertwining" } else { "wm-invariance" };
    for case in [WmCase::CapDt, WmCase::CapD] {
        for m in 0..=2u32 {
            let mut witness = None;
            // the l < m layers matter too: φ kills them, so intertwining
            // there says d_k φ(f) must also vanish
            'sweep: for l in 0..=m {
                for n_exp in 0..=bounds.max_exp {
                    for p in 0..=bounds.max_exp {
                        let gen = MultiPoly::monomial(&vars, vec![l, n_exp, p], rat(1));
                        let f = match from_u_basis(&wm, &gen, case) {
                            Ok(f) => f,
                            Err(e) => {
                                witness = Some(format!("x^{l}u^{n_exp}t^{p}: {e}"));
                                break 'sweep;
                            }
                        };
                        for k in -bounds.max_index..=bounds.max_index {
                            let step = (|| -> Result<Option<String>> {
                                let acted = act(&wm, k, &f)?;
                                if intertwining {
                                    let (_, lhs) = quotient_phi(&wm, &acted, m, case)?;
                                    let (target, phi) = quotient_phi(&wm, &f, m, case)?;
                                    let rhs = target.act(k, &phi)?;
                                    if lhs != rhs {
                                        return Ok(Some(format!(
                                            "x^{l}u^{n_exp}t^{p}, k={k}: φ(d_k f) = {lhs} but d_k φ(f) = {rhs}"
                                        )));
                                    }
                                } else if !wm_member(&wm, &acted, m, case)? {
                                    return Ok(Some(format!(
                                        "d_{k}(x^{l}u^{n_exp}t^{p}) leaves W_{m}"
                                    )));
                                }
                                Ok(None)
                            })();
                            match step {
                                Ok(None) => {}
                                Ok(Some(w)) => {
                                    witness = Some(w);
                                    break 'sweep;
                                }
                                Err(e) => {
                                    witness = Some(format!("x^{l}u^{n_exp}t^{p}, k={k}: {e}"));
                                    break 'sweep;
                                }
                            }
                        }
                    }
                }
            }
            let instance = format!("case={case:?} m={m} {desc}");
            match witness {
                None => report.pass(check, instance),
                Some(w) => report.fail(check, instance, w),
            }
        }
    }
}

// --- extraction --------------------------------------------------------------

fn suite_extraction(spec: &TensorSpec, seed: u64, bounds: &Bounds, report: &mut Report) {
    if !spec.distinct() {
        report.unknown(
            "extraction-reconstruction",
            "spec",
            "component extraction needs pairwise distinct base parameters".into(),
        );
        return;
    }
    let mut rng = rng_for(seed, 2);
    for idx in 0..bounds.samples {
        let f = random_element(spec, &mut rng, bounds.max_exp, bounds.max_level);
        let instance = format!("sample={idx} f = {}", format_element(&f, spec));
        let outcome = (|| -> Result<Option<String>> {
            let ex = extract_components(spec, &f)?;
            let (start, len) = ex.window();
            for k in (start + len as i64)..(start + len as i64 + 5) {
                let rebuilt = ex.evaluate(k)?;
                let direct = act(spec, k, &f)?;
                if rebuilt != direct {
                    return Ok(Some(format!("k={k}: reconstruction disagrees with d_k")));
                }
            }
            Ok(None)
        })();
        match outcome {
            Ok(None) => report.pass("extraction-reconstruction", instance),
            Ok(Some(w)) => report.fail("extraction-reconstruction", instance, w),
            Err(e) => report.fail("extraction-reconstruction", instance, e.to_string()),
        }
    }
}

// --- rank ---------------------------------------------------------------------

fn suite_rank(spec: &TensorSpec, seed: u64, bounds: &Bounds, report: &mut Report) {
    if !spec.distinct() {
        report.unknown(
            "vacuum-rank",
            "spec",
            "the rank invariant needs pairwise distinct base parameters".into(),
        );
        return;
    }
    let expected = 2 * spec.m() + spec.n() + 1;
    let vac = TensorElement::vacuum(spec);
    match rank_invariant(spec, &vac) {
        Ok(rr) if rr.value == expected && rr.stabilized => {
            report.pass("vacuum-rank", format!("expected={expected}"))
        }
        Ok(rr) => report.fail(
            "vacuum-rank",
            format!("expected={expected}"),
            format!("rank={} stabilized={}", rr.value, rr.stabilized),
        ),
        Err(e) => report.fail("vacuum-rank", format!("expected={expected}"), e.to_string()),
    }
    // The strict "non-vacuum ⇒ rank > 2m+n+1" claim carries the hypothesis
    // m > 1; it also holds with a single simple dt factor alongside at least
    // one other factor, which covers the shapes the vacuum characterization is
    // tested on.  Outside that regime the bound can be attained off the vacuum
    // (a single Ω(λ,α,h) gives rank exactly 3 on t^p ⊗ w), so we measure and
    // report without asserting.
    let strict_regime =
        spec.m() >= 1 && spec.m() + spec.n() >= 2 && spec.dt.iter().all(|f| f.is_simple());
    let mut rng = rng_for(seed, 3);
    for idx in 0..bounds.samples {
        // "non-vacuum" means some slot exponent is positive: every element of
        // 1⊗⋯⊗1⊗V has the vacuum rank, because large-k actions kill its V part
        let mono = loop {
            let m = random_monomial(spec, &mut rng, bounds.max_exp, bounds.max_level);
            if m.dt.iter().any(|(r, p)| *r > 0 || *p > 0) || m.d.iter().any(|q| *q > 0) {
                break m;
            }
        };
        let f = TensorElement::from_monomial(mono, rand_nonzero_small(&mut rng, 3));
        let instance = format!("sample={idx} f = {}", format_element(&f, spec));
        match rank_invariant(spec, &f) {
            Ok(rr) if !strict_regime => report.unknown(
                "non-vacuum-rank",
                instance,
                format!(
                    "measured rank={} stabilized={} (vacuum bound {expected}); strict excess not asserted for this shape",
                    rr.value, rr.stabilized
                ),
            ),
            Ok(rr) if rr.value > expected && rr.stabilized => report.pass("non-vacuum-rank", instance),
            Ok(rr) => report.fail(
                "non-vacuum-rank",
                instance,
                format!("rank={} stabilized={} (vacuum bound {expected})", rr.value, rr.stabilized),
            ),
            Err(e) => report.fail("non-vacuum-rank", instance, e.to_string()),
        }
    }
}

// --- irreducibility certificates ------------------------------------------------

fn suite_irreducible(spec: &TensorSpec, seed: u64, bounds: &Bounds, report: &mut Report) {
    if let Err(e) = certify::check_hypotheses(spec, bounds.level.max(bounds.max_level)) {
        report.unknown("certify-replay", "hypotheses", e.to_string());
        return;
    }
    let mut rng = rng_for(seed, 5);
    for idx in 0..bounds.samples {
        let f = loop {
            let mut f = TensorElement::zero();
            for _ in 0..rng.gen_range(1..=2u32) {
                f.add_term(
                    random_bounded_monomial(spec, &mut rng, bounds.degree, bounds.level),
                    rand_nonzero_small(&mut rng, 3),
                );
            }
            if !f.is_zero() {
                break f;
            }
        };
        let instance = format!("sample={idx} f = {}", format_element(&f, spec));
        match certify::certify_irreducible(spec, &f, bounds.degree, bounds.level) {
            Ok(cert) => match certify::replay(spec, &cert, &f) {
                Ok(()) => report.pass("certify-replay", instance),
                Err(e) => report.fail("certify-replay", instance, format!("replay: {e}")),
            },
            Err(e) => report.fail("certify-replay", instance, e.to_string()),
        }
    }
}

// --- omega: vanishing identities and the N(M,β) band ---------------------------

fn suite_omega(spec: &TensorSpec, report: &mut Report) {
    let mut worst = None;
    for r in 1..=10u32 {
        for j in 0..r {
            if !num_traits::Zero::is_zero(&binomial_vanishing(r, j)) {
                worst = Some(format!("r={r} j={j}: nonzero"));
            }
        }
        if num_traits::Zero::is_zero(&binomial_vanishing(r, r)) {
            worst = Some(format!("r={r} j={r}: zero"));
        }
    }
    match worst {
        None => report.pass("binomial-vanishing", "r<=10"),
        Some(w) => report.fail("binomial-vanishing", "r<=10", w),
    }

    // ω^{(s)}_{l,−(s+2)} kills the vacuum of each single Ω factor for s > 4.
    // (Only per factor: with two factors of distinct bases the cross-slot
    // terms carry (λ_a/λ_b)^i and survive the s-th finite difference.)
    let mut singles: Vec<(String, TensorSpec)> = Vec::new();
    for (i, f) in spec.dt.iter().enumerate() {
        singles.push((
            format!("dt[{i}]"),
            TensorSpec::new(vec![f.clone()], vec![], None).expect("one factor"),
        ));
    }
    for (j, f) in spec.d.iter().enumerate() {
        singles.push((
            format!("d[{j}]"),
            TensorSpec::new(vec![], vec![f.clone()], None).expect("one factor"),
        ));
    }
    for (label, single) in &singles {
        let vac = TensorElement::vacuum(single);
        for s in [5u32, 6] {
            for l in [7i64, 8] {
                let instance = format!("factor={label} s={s} l={l} m={}", -(s as i64 + 2));
                match omega_op(single, s, l, -(s as i64 + 2), &vac) {
                    Ok(got) if got.is_zero() => report.pass("omega-vacuum-vanishing", instance),
                    Ok(got) => report.fail(
                        "omega-vacuum-vanishing",
                        instance,
                        format!("got {}", format_element(&got, single)),
                    ),
                    Err(e) => report.fail("omega-vacuum-vanishing", instance, e.to_string()),
                }
            }
        }
    }

    // …and acts nontrivially once a highest-weight factor is attached.
    if let Some(v) = &spec.v {
        let (dt, d) = if spec.m() >= 1 {
            (vec![spec.dt[0].clone()], vec![])
        } else {
            (vec![], vec![spec.d[0].clone()])
        };
        let with_v = TensorSpec::new(dt, d, Some(v.clone())).expect("one factor plus V");
        let vac = TensorElement::vacuum(&with_v);
        for l in [8i64, 9] {
            let instance = format!("s=5 l={l} m=-7");
            match omega_op(&with_v, 5, l, -7, &vac) {
                Ok(got) if !got.is_zero() => report.pass("omega-highest-weight-nonzero", instance),
                Ok(_) => report.fail(
                    "omega-highest-weight-nonzero",
                    instance,
                    "vanished on 1⊗v".into(),
                ),
                Err(e) => report.fail("omega-highest-weight-nonzero", instance, e.to_string()),
            }
        }
    }

    // The bundled N(M,β) plumbing: ω^{(s)} vanishes above degree 2k+2 = 4 and
    // the top band collapses to 6·d̄_1² at k = 1.
    let beta = LaurentPoly::new([(1, rat(1)), (-1, rat(-3))]);
    match bundled_nm_beta(rat(2), beta) {
        Err(e) => report.fail("nm-beta-band", "bundled", e.to_string()),
        Ok(nm) => {
            let mut witness = None;
            'v: for s in 5u32..=7 {
                for (l, m) in [(0i64, 0i64), (3, -2), (-1, 4)] {
                    match nm.omega(s, l, m, &NmElement::basis(1, 2)) {
                        Ok(got) if got.is_zero() => {}
                        Ok(_) => {
                            witness = Some(format!("s={s} l={l} m={m}: nonzero above the band"));
                            break 'v;
                        }
                        Err(e) => {
                            witness = Some(format!("s={s} l={l} m={m}: {e}"));
                            break 'v;
                        }
                    }
                }
            }
            match witness {
                None => report.pass("nm-beta-vanishing", "s=5..7"),
                Some(w) => report.fail("nm-beta-vanishing", "s=5..7", w),
            }
            let mut witness = None;
            's: for (l, m) in [(0i64, 0i64), (2, 1), (-3, 5)] {
                for (j, q) in [(0u32, 0i64), (1, 3), (2, -2)] {
                    let step = (|| -> Result<bool> {
                        let got = nm.omega(4, l, m, &NmElement::basis(j, q))?;
                        let expect = nm.top_square(j, q + l)?.scale(&rat(6));
                        Ok(got == expect)
                    })();
                    match step {
                        Ok(true) => {}
                        Ok(false) => {
                            witness = Some(format!("l={l} m={m} j={j} q={q}: not 6·d̄₁²"));
                            break 's;
                        }
                        Err(e) => {
                            witness = Some(format!("l={l} m={m} j={j} q={q}: {e}"));
                            break 's;
                        }
                    }
                }
            }
            match witness {
                None => report.pass("nm-beta-top-square", "k=1"),
                Some(w) => report.fail("nm-beta-top-square", "k=1", w),
            }
        }
    }
}

// --- classifier self-consistency -------------------------------------------------

fn fresh_base(existing: &[Rational]) -> Rational {
    let mut candidate = 2i64;
    loop {
        let c = rat(candidate);
        if !existing.contains(&c) {
            return c;
        }
        candidate += 1;
    }
}

fn verdict_entry(
    report: &mut Report,
    check: &str,
    instance: String,
    verdict: Result<IsoVerdict>,
    expect_isomorphic: bool,
) {
    match verdict {
        Ok(v) => {
            let ok = v.is_isomorphic() == expect_isomorphic;
            if ok {
                report.pass(check, instance);
            } else {
                report.fail(check, instance, format!("verdict {v:?}"));
            }
        }
        Err(Error::Hypothesis(msg)) => report.unknown(check, instance, msg),
        Err(e) => report.fail(check, instance, e.to_string()),
    }
}

fn suite_classify(spec: &TensorSpec, report: &mut Report) {
    verdict_entry(
        report,
        "classify-self",
        "identity".into(),
        specs_isomorphic(spec, spec),
        true,
    );

    // factor order must not matter
    let mut permuted = spec.clone();
    permuted.dt.reverse();
    permuted.d.reverse();
    verdict_entry(
        report,
        "classify-permuted",
        "reversed factors".into(),
        specs_isomorphic(spec, &permuted),
        true,
    );

    // h-canonicalization: (α, ξt+η) ↦ (2α, ξ/2·t+η+1) keeps αξ
    if !spec.dt.is_empty() && spec.dt.iter().all(|f| f.xi().is_some()) {
        let scaled = TensorSpec::new(
            spec.dt
                .iter()
                .map(|f| {
                    let xi = f.xi().expect("linear h");
                    let eta = f.h_at_alpha() - &xi * &f.alpha;
                    OmegaDT::with_linear_h(
                        f.lambda.clone(),
                        &f.alpha * rat(2),
                        xi / rat(2),
                        eta + rat(1),
                    )
                    .expect("lambda unchanged")
                })
                .collect(),
            spec.d.clone(),
            spec.v.clone(),
        )
        .expect("same shape");
        verdict_entry(
            report,
            "classify-h-canonical",
            "alpha*2, xi/2, eta+1".into(),
            specs_isomorphic(spec, &scaled),
            true,
        );
    }

    // single-parameter perturbations must all be detected
    if let Some(f0) = spec.dt.first() {
        let mut dt = spec.dt.clone();
        let mut lam = &f0.lambda + rat(1);
        if num_traits::Zero::is_zero(&lam) {
            lam = &f0.lambda + rat(2);
        }
        dt[0] = OmegaDT::new(lam, f0.alpha.clone(), f0.h.clone()).expect("nonzero");
        verdict_entry(
            report,
            "classify-perturb-lambda",
            "first dt factor".into(),
            specs_isomorphic(
                spec,
                &TensorSpec::new(dt, spec.d.clone(), spec.v.clone()).expect("same shape"),
            ),
            false,
        );

        if let Some(xi) = f0.xi() {
            // change αξ: bump α when ξ ≠ 0, else turn the product on
            let (alpha, xi) = if !num_traits::Zero::is_zero(&xi) {
                (&f0.alpha + rat(1), xi)
            } else {
                (&f0.alpha + rat(1), xi + rat(1))
            };
            let mut dt = spec.dt.clone();
            let eta = f0.h_at_alpha() - f0.xi().unwrap() * &f0.alpha;
            dt[0] = OmegaDT::with_linear_h(f0.lambda.clone(), alpha, xi, eta).expect("nonzero");
            verdict_entry(
                report,
                "classify-perturb-alpha-xi",
                "first dt factor".into(),
                specs_isomorphic(
                    spec,
                    &TensorSpec::new(dt, spec.d.clone(), spec.v.clone()).expect("same shape"),
                ),
                false,
            );
        }
    }

    if let Some(g0) = spec.d.first() {
        let mut d = spec.d.clone();
        let mut mu = &g0.mu + rat(1);
        if num_traits::Zero::is_zero(&mu) {
            mu = &g0.mu + rat(2);
        }
        d[0] = OmegaD::new(mu, g0.beta.clone()).expect("nonzero");
        verdict_entry(
            report,
            "classify-perturb-mu",
            "first d factor".into(),
            specs_isomorphic(
                spec,
                &TensorSpec::new(spec.dt.clone(), d, spec.v.clone()).expect("same shape"),
            ),
            false,
        );
        let mut d = spec.d.clone();
        d[0] = OmegaD::new(g0.mu.clone(), &g0.beta + rat(1)).expect("nonzero");
        verdict_entry(
            report,
            "classify-perturb-beta",
            "first d factor".into(),
            specs_isomorphic(
                spec,
                &TensorSpec::new(spec.dt.clone(), d, spec.v.clone()).expect("same shape"),
            ),
            false,
        );
    }

    // shape perturbations: one extra factor of either kind
    let bases = spec.bases();
    let extra = fresh_base(&bases);
    let mut dt = spec.dt.clone();
    dt.push(OmegaDT::with_linear_h(extra.clone(), rat(1), rat(1), rat(0)).expect("nonzero"));
    verdict_entry(
        report,
        "classify-perturb-m",
        "extra dt factor".into(),
        specs_isomorphic(
            spec,
            &TensorSpec::new(dt, spec.d.clone(), spec.v.clone()).expect("bigger shape"),
        ),
        false,
    );
    let mut d = spec.d.clone();
    d.push(OmegaD::new(extra, rat(2)).expect("nonzero"));
    verdict_entry(
        report,
        "classify-perturb-n",
        "extra d factor".into(),
        specs_isomorphic(
            spec,
            &TensorSpec::new(spec.dt.clone(), d, spec.v.clone()).expect("bigger shape"),
        ),
        false,
    );

    // highest-weight data
    match &spec.v {
        Some(VSpec::Verma { theta, h }) => {
            let bumped = VSpec::Verma { theta: theta + rat(1), h: h.clone() };
            verdict_entry(
                report,
                "classify-perturb-theta",
                "verma".into(),
                specs_isomorphic(
                    spec,
                    &TensorSpec::new(spec.dt.clone(), spec.d.clone(), Some(bumped))
                        .expect("same shape"),
                ),
                false,
            );
            let dropped = TensorSpec::new(spec.dt.clone(), spec.d.clone(), None).expect("m+n >= 1");
            verdict_entry(
                report,
                "classify-perturb-v-presence",
                "verma removed".into(),
                specs_isomorphic(spec, &dropped),
                false,
            );
        }
        Some(VSpec::Induced { .. }) => {
            let dropped = TensorSpec::new(spec.dt.clone(), spec.d.clone(), None).expect("m+n >= 1");
            verdict_entry(
                report,
                "classify-perturb-v-presence",
                "induced removed".into(),
                specs_isomorphic(spec, &dropped),
                false,
            );
        }
        None => {
            let added = TensorSpec::new(
                spec.dt.clone(),
                spec.d.clone(),
                Some(VSpec::Verma { theta: ratio(1, 2), h: ratio(1, 3) }),
            )
            .expect("same shape");
            verdict_entry(
                report,
                "classify-perturb-v-presence",
                "verma attached".into(),
                specs_isomorphic(spec, &added),
                false,
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    fn generic_spec() -> TensorSpec {
        TensorSpec::new(
            vec![OmegaDT::with_linear_h(rat(2), rat(1), rat(1), rat(0)).unwrap()],
            vec![OmegaD::new(rat(3), rat(2)).unwrap()],
            Some(VSpec::Verma { theta: ratio(1, 2), h: ratio(1, 3) }),
        )
        .unwrap()
    }

    fn small_bounds() -> Bounds {
        Bounds { max_index: 2, max_exp: 1, max_level: 1, samples: 3, degree: 2, level: 1, det_size: 4 }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::BASIC.into_iter().chain([Suite::All]) {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
        }
        assert!(matches!(Suite::parse("nope"), Err(Error::Parse { .. })));
    }

    #[test]
    fn all_suites_pass_on_the_generic_spec() {
        let spec = generic_spec();
        let report = run_suite(&spec, Suite::All, 7, &small_bounds());
        assert_eq!(report.status, Status::Pass, "{}", report.render_text());
    }

    #[test]
    fn reports_are_deterministic() {
        let spec = generic_spec();
        let a = run_suite(&spec, Suite::Extraction, 99, &small_bounds());
        let b = run_suite(&spec, Suite::Extraction, 99, &small_bounds());
        assert_eq!(a.to_json(), b.to_json());
        let c = run_suite(&spec, Suite::Extraction, 100, &small_bounds());
        assert_ne!(a.to_json(), c.to_json(), "different seed, different samples");
    }

    #[test]
    fn certification_suite_reports_unknown_without_a_verma_factor() {
        let pure = TensorSpec::new(
            vec![OmegaDT::with_linear_h(rat(2), rat(1), rat(1), rat(0)).unwrap()],
            vec![],
            None,
        )
        .unwrap();
        let report = run_suite(&pure, Suite::Irreducible, 7, &small_bounds());
        assert_eq!(report.status, Status::Unknown);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn bracket_suite_flags_a_broken_action() {
        // β = 1 keeps Ω(μ,β) a module (bracket holds), so instead check that
        // the report sees a failure when we corrupt an element comparison:
        // feed a spec whose h is nonlinear — the bracket still holds there,
        // so this exercises the pass path; the fail path is covered by the
        // report unit tests. Here we only pin that nonlinear h stays green.
        let spec = TensorSpec::new(
            vec![OmegaDT::new(
                rat(2),
                rat(1),
                {
                    let vars = crate::omega::t_vars();
                    let mut h = MultiPoly::zero(&vars);
                    h.add_term(vec![2], rat(1)); // h = t²
                    h
                },
            )
            .unwrap()],
            vec![],
            None,
        )
        .unwrap();
        let report = run_suite(&spec, Suite::Bracket, 7, &small_bounds());
        assert_eq!(report.status, Status::Pass, "{}", report.render_text());
    }
}
