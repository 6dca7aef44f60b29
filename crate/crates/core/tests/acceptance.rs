//! End-to-end acceptance checks, one test per criterion.  Every comparison is
//! at exact equality; random sampling is seeded and deterministic.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use virtensor::analysis::{
    binomial_vanishing, non_local_finiteness_witness, rank_invariant, specs_isomorphic, IsoVerdict,
};
use virtensor::certify::{certify_irreducible, replay};
use virtensor::element::format_element;
use virtensor::enveloping::{
    bundled_shift_naction, straighten_apply, verma_basis, PBWMonomial, PBWVector, Tail, VSpec,
};
use virtensor::linalg::determinant;
use virtensor::nmbeta::{bundled_nm_beta, LaurentPoly, NmElement};
use virtensor::omega::{t_vars, OmegaD, OmegaDT};
use virtensor::poly::MultiPoly;
use virtensor::rational::{factorial, rat, ratio, Rational};
use virtensor::sweep::bracket_box_check;
use virtensor::tensor::{
    act, apply_move, bracket_defect, enumerate_box, extract_components, from_u_basis, omega_op,
    quotient_phi, wm_member, wm_vars, Move, TensorElement, TensorMonomial, TensorSpec, WmCase,
};
use virtensor::vandermonde::{confluent_det_formula, confluent_matrix, ConfluentSpec};

fn dt_factor(lambda: i64, alpha: i64, xi: i64, eta: i64) -> OmegaDT {
    OmegaDT::with_linear_h(rat(lambda), rat(alpha), rat(xi), rat(eta)).unwrap()
}

fn verma() -> Option<VSpec> {
    Some(VSpec::Verma { theta: ratio(1, 2), h: ratio(1, 3) })
}

fn spec_10() -> TensorSpec {
    TensorSpec::new(vec![dt_factor(2, 1, 1, 0)], vec![], verma()).unwrap()
}

fn spec_01() -> TensorSpec {
    TensorSpec::new(vec![], vec![OmegaD::new(rat(3), rat(2)).unwrap()], verma()).unwrap()
}

fn spec_11() -> TensorSpec {
    TensorSpec::new(
        vec![dt_factor(2, 1, 1, 0)],
        vec![OmegaD::new(rat(3), rat(2)).unwrap()],
        verma(),
    )
    .unwrap()
}

fn spec_21() -> TensorSpec {
    TensorSpec::new(
        vec![dt_factor(2, 1, 1, 0), dt_factor(5, -1, 2, 3)],
        vec![OmegaD::new(rat(3), rat(2)).unwrap()],
        verma(),
    )
    .unwrap()
}

fn spec_12() -> TensorSpec {
    TensorSpec::new(
        vec![dt_factor(2, 1, 1, 0)],
        vec![OmegaD::new(rat(3), rat(2)).unwrap(), OmegaD::new(rat(5), rat(-1)).unwrap()],
        verma(),
    )
    .unwrap()
}

fn rng(salt: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(0x5eed_0000 + salt)
}

fn small_nonzero(rng: &mut ChaCha20Rng) -> Rational {
    loop {
        let num = rng.gen_range(-6i64..=6);
        let den = rng.gen_range(1i64..=4);
        let r = ratio(num, den);
        if !num_traits::Zero::is_zero(&r) {
            return r;
        }
    }
}

fn random_element(
    rng: &mut ChaCha20Rng,
    box_monos: &[TensorMonomial],
    max_terms: usize,
) -> TensorElement {
    loop {
        let mut f = TensorElement::zero();
        for _ in 0..rng.gen_range(1..=max_terms) {
            let mono = box_monos[rng.gen_range(0..box_monos.len())].clone();
            f.add_term(mono, small_nonzero(rng));
        }
        if !f.is_zero() {
            return f;
        }
    }
}

/// Criterion 1: the defining relation `[d_i,d_j] = (j−i)d_{i+j} +
/// δ_{i,−j}((i³−i)/12)c` holds exactly on every family, every basis vector
/// with exponents ≤ 3 and V-level ≤ 3, every pair in [−4,4], within 60 s.
#[test]
fn criterion_1_defining_relations() {
    let t0 = Instant::now();

    // Standalone highest-weight modules: the PBW straightening is the action.
    let vermas = VSpec::Verma { theta: ratio(1, 2), h: ratio(1, 3) };
    let induced = VSpec::Induced { theta: rat(1), n: bundled_shift_naction(rat(2)) };
    for vs in [&vermas, &induced] {
        let mut words: Vec<PBWMonomial> = Vec::new();
        for level in 0..=3 {
            for w in verma_basis(level) {
                match vs {
                    VSpec::Verma { .. } => words.push(w),
                    VSpec::Induced { .. } => {
                        for b in 0..3 {
                            words.push(PBWMonomial { exps: w.exps.clone(), tail: Tail::Basis(b) });
                        }
                    }
                }
            }
        }
        for w in &words {
            let f = PBWVector::from_monomial(w.clone(), rat(1));
            for i in -4i64..=4 {
                for j in (i + 1)..=4 {
                    let mut defect = straighten_apply(i, &straighten_apply(j, &f, vs).unwrap(), vs).unwrap();
                    defect.add_scaled(&straighten_apply(j, &straighten_apply(i, &f, vs).unwrap(), vs).unwrap(), &rat(-1));
                    defect.add_scaled(&straighten_apply(i + j, &f, vs).unwrap(), &rat(i - j));
                    if i == -j {
                        defect.add_scaled(&f, &(-ratio(i * i * i - i, 12) * vs.theta()));
                    }
                    assert!(defect.terms.is_empty(), "defect at ({i},{j}) on {w:?}");
                }
            }
        }
    }

    // Ω families and full tensors, including one Ω(λ,α,h) with quadratic h
    // and one induced highest-weight attachment.
    let quad_h = {
        let mut h = MultiPoly::monomial(&t_vars(), vec![2], rat(1));
        h.add_term(vec![0], rat(-3));
        OmegaDT::new(rat(2), rat(1), h).unwrap()
    };
    let families: Vec<(&str, TensorSpec)> = vec![
        (
            "Ω(λ,α,h) alone",
            TensorSpec::new(vec![dt_factor(2, 1, 1, 0)], vec![], None).unwrap(),
        ),
        (
            "Ω(λ,α,h) alone, deg h = 2",
            TensorSpec::new(vec![quad_h], vec![], None).unwrap(),
        ),
        (
            "Ω(μ,β) alone",
            TensorSpec::new(vec![], vec![OmegaD::new(rat(3), rat(2)).unwrap()], None).unwrap(),
        ),
        ("(1,0) ⊗ Verma", spec_10()),
        ("(0,1) ⊗ Verma", spec_01()),
        ("(1,1) ⊗ Verma", spec_11()),
        (
            "(1,1) ⊗ induced",
            TensorSpec::new(
                vec![dt_factor(2, 1, 1, 0)],
                vec![OmegaD::new(rat(3), rat(2)).unwrap()],
                Some(VSpec::Induced { theta: rat(1), n: bundled_shift_naction(rat(2)) }),
            )
            .unwrap(),
        ),
        ("(2,1) ⊗ Verma", spec_21()),
    ];
    let mut total_vectors = 0usize;
    for (name, spec) in &families {
        let basis = enumerate_box(spec, 3, 3, 3);
        total_vectors += basis.len();
        let outcome = bracket_box_check(spec, &basis, 4).unwrap();
        assert!(
            outcome.is_none(),
            "{name}: defect at ({}, {}) on {}",
            outcome.as_ref().unwrap().i,
            outcome.as_ref().unwrap().j,
            format_element(
                &TensorElement::from_monomial(outcome.as_ref().unwrap().monomial.clone(), rat(1)),
                spec
            ),
        );
    }

    // The packed sweep and the generic composite path must agree; spot-check
    // the same claim through `bracket_defect` on a stride sample.
    let spec = spec_21();
    let basis = enumerate_box(&spec, 3, 3, 1);
    for mono in basis.iter().step_by(389) {
        let f = TensorElement::from_monomial(mono.clone(), rat(1));
        for (i, j) in [(-4, 4), (-3, 1), (2, 3)] {
            assert!(
                bracket_defect(&spec, i, j, &f).unwrap().is_zero(),
                "generic-path defect at ({i},{j}) on {}",
                format_element(&f, &spec)
            );
        }
    }

    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 60, "relation sweep took {elapsed:?}, budget 60 s");
    println!(
        "criterion 1 (defining relations): PASS — {} families, {total_vectors} basis vectors, window [-4,4], {:.1}s",
        families.len() + 2,
        elapsed.as_secs_f64()
    );
}

/// Criterion 2: the closed determinant formula equals the brute-force
/// determinant of the confluent Vandermonde matrix on ≥ 200 random specs
/// with multiplicities ≤ 6 and offsets ≤ 4.
#[test]
fn criterion_2_determinant_oracle() {
    let mut rng = rng(2);
    let mut checked = 0usize;
    while checked < 200 {
        let q = rng.gen_range(1..=4usize);
        let mut bases: Vec<Rational> = Vec::new();
        while bases.len() < q {
            let b = small_nonzero(&mut rng);
            if !bases.contains(&b) {
                bases.push(b);
            }
        }
        let mults: Vec<u32> = (0..q).map(|_| rng.gen_range(1..=6u32)).collect();
        if mults.iter().sum::<u32>() > 14 {
            continue; // keep the brute-force side at desk scale
        }
        let offset = rng.gen_range(0..=4u64);
        let cspec = ConfluentSpec::new(bases, mults, offset).unwrap();
        let formula = confluent_det_formula(&cspec);
        let brute = determinant(&confluent_matrix(&cspec)).unwrap();
        assert_eq!(formula, brute, "determinant mismatch on {cspec:?}");
        checked += 1;
    }
    println!("criterion 2 (determinant formula vs brute force): PASS — {checked} random specs");
}

/// Criterion 3: extraction reconstructs the action at out-of-window indices,
/// and each named move matches its closed form on monomials.
#[test]
fn criterion_3_extraction_and_moves() {
    let shapes: Vec<(&str, TensorSpec)> = vec![
        ("(1,0)", TensorSpec::new(vec![dt_factor(2, 1, 1, 0)], vec![], None).unwrap()),
        ("(0,1)", TensorSpec::new(vec![], vec![OmegaD::new(rat(3), rat(2)).unwrap()], None).unwrap()),
        ("(1,1)+V", spec_11()),
        ("(2,1)+V", spec_21()),
    ];
    let mut rng = rng(3);
    for (name, spec) in &shapes {
        let box_monos = enumerate_box(spec, 2, 1, 1);
        for sample in 0..50 {
            let f = random_element(&mut rng, &box_monos, 3);
            let ex = extract_components(spec, &f).unwrap();
            let (bound, size) = ex.window();
            for off in 1..=5 {
                let k = bound + size as i64 + off;
                assert_eq!(
                    ex.evaluate(k).unwrap(),
                    act(spec, k, &f).unwrap(),
                    "{name} sample {sample}: reconstruction differs at k={k} for {}",
                    format_element(&f, spec)
                );
            }
        }
    }

    // Closed forms on monomials ∂^r t^p ⊗ ∂^q ⊗ v in (1,1)+V, h = ξt+η:
    //   raise-dt: ∂^{r+1} t^p        raise-d: ∂^{q+1}
    //   αF:       α(ξ t^p − p t^{p−1}), ∂-exponent dropped
    //   G:        ξ t^{p+1} + (ξα+η−p) t^p, ∂-exponent dropped
    //   β:        β·(∂-exponent dropped)
    let spec = spec_11();
    let fac = &spec.dt[0];
    let (alpha, xi, eta) = (fac.alpha.clone(), rat(1), rat(0));
    let beta = spec.d[0].beta.clone();
    for r in 0..=3u32 {
        for p in 0..=3u32 {
            for q in 0..=3u32 {
                let mono = TensorMonomial { dt: vec![(r, p)], d: vec![q], v: Some(PBWMonomial::hw()) };
                let f = TensorElement::from_monomial(mono.clone(), rat(1));
                let term = |dt: (u32, u32), d: u32, c: Rational| {
                    TensorElement::from_monomial(
                        TensorMonomial { dt: vec![dt], d: vec![d], v: Some(PBWMonomial::hw()) },
                        c,
                    )
                };

                let got = apply_move(&spec, Move::RaiseDt(0), &f).unwrap();
                assert_eq!(got, term((r + 1, p), q, rat(1)), "raise-dt at r={r} p={p} q={q}");

                let got = apply_move(&spec, Move::RaiseD(0), &f).unwrap();
                assert_eq!(got, term((r, p), q + 1, rat(1)), "raise-d at r={r} p={p} q={q}");

                let got = apply_move(&spec, Move::AlphaF(0), &f).unwrap();
                let mut want = term((0, p), q, &alpha * &xi);
                if p > 0 {
                    want.add_scaled(&term((0, p - 1), q, rat(1)), &(-&alpha * rat(p as i64)));
                }
                assert_eq!(got, want, "αF move at r={r} p={p} q={q}");

                let got = apply_move(&spec, Move::G(0), &f).unwrap();
                let mut want = term((0, p + 1), q, xi.clone());
                want.add_scaled(
                    &term((0, p), q, rat(1)),
                    &(&xi * &alpha + &eta - rat(p as i64)),
                );
                assert_eq!(got, want, "G move at r={r} p={p} q={q}");

                let got = apply_move(&spec, Move::Beta(0), &f).unwrap();
                assert_eq!(got, term((r, p), 0, beta.clone()), "β move at r={r} p={p} q={q}");
            }
        }
    }
    println!("criterion 3 (extraction + moves): PASS — 4 shapes × 50 elements × 5 indices; 5 moves on 64 monomials");
}

/// Criterion 4: `W_m` is `d_k`-invariant for k ∈ [−4,4], m ≤ 2, in both case
/// assignments, and the quotient map intertwines the actions against
/// Ω(λ, α, h−m−β).
#[test]
fn criterion_4_wm_invariance_and_quotient() {
    // Both factors share λ = 2: Ω(2, 1, t) ⊗ Ω(2, 3).
    let spec = TensorSpec::new(
        vec![dt_factor(2, 1, 1, 0)],
        vec![OmegaD::new(rat(2), rat(3)).unwrap()],
        None,
    )
    .unwrap();
    let vars = wm_vars();
    let mut checked = 0usize;
    for case in [WmCase::CapDt, WmCase::CapD] {
        for m in 0..=2u32 {
            for a in 0..=m {
                for b in 0..=3u32 {
                    for p in 0..=3u32 {
                        let poly = MultiPoly::monomial(&vars, vec![a, b, p], rat(1));
                        let f = from_u_basis(&spec, &poly, case).unwrap();
                        assert!(wm_member(&spec, &f, m, case).unwrap());
                        let (target, image) = quotient_phi(&spec, &f, m, case).unwrap();
                        for k in -4i64..=4 {
                            let df = act(&spec, k, &f).unwrap();
                            assert!(
                                wm_member(&spec, &df, m, case).unwrap(),
                                "d_{k} leaves W_{m} (case {case:?}) on x^{a} u^{b} t^{p}"
                            );
                            // φ(d_k f) = d_k(φ f) in the target module.
                            let lhs = quotient_phi(&spec, &df, m, case).unwrap().1;
                            let rhs = target.act(k, &image).unwrap();
                            assert_eq!(
                                lhs, rhs,
                                "quotient map does not intertwine d_{k} at m={m}, case {case:?}, x^{a} u^{b} t^{p}"
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    // The intertwining target really is the stated parameter shift.
    let (target, _) = quotient_phi(
        &spec,
        &from_u_basis(&spec, &MultiPoly::monomial(&vars, vec![2, 0, 0], rat(1)), WmCase::CapDt).unwrap(),
        2,
        WmCase::CapDt,
    )
    .unwrap();
    let shifted = {
        let mut h = spec.dt[0].h.clone();
        let c = MultiPoly::constant(&t_vars(), -(rat(2) + &spec.d[0].beta));
        h = h.add(&c).unwrap();
        OmegaDT::new(rat(2), rat(1), h).unwrap()
    };
    assert_eq!(target, shifted);
    println!("criterion 4 (W_m invariance + quotient): PASS — {checked} (k, m, case, monomial) checks");
}

/// Criterion 5: irreducibility certificates for the bundled generic spec from
/// ≥ 10 random elements, with exact replay.
#[test]
fn criterion_5_irreducibility_certificates() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs/generic.json");
    let spec = virtensor::specfile::load_spec(&path).unwrap();
    let box_monos = enumerate_box(&spec, 2, 1, 1);
    let mut rng = rng(5);
    for sample in 0..10 {
        let f = random_element(&mut rng, &box_monos, 2);
        let cert = certify_irreducible(&spec, &f, 2, 1).unwrap_or_else(|e| {
            panic!("sample {sample}: certification failed on {}: {e}", format_element(&f, &spec))
        });
        replay(&spec, &cert, &f).unwrap_or_else(|e| {
            panic!("sample {sample}: replay failed on {}: {e}", format_element(&f, &spec))
        });
    }
    println!("criterion 5 (irreducibility certificates): PASS — 10 random elements certified and replayed, D=2, L=1");
}

/// Criterion 6: the vacuum rank is exactly 2m+n+1 for shapes (1,1), (2,1),
/// (1,2); every sampled monomial with a positive slot exponent exceeds it;
/// the window-shift recomputation is stable.
#[test]
fn criterion_6_rank_invariant() {
    let shapes: Vec<(&str, TensorSpec)> =
        vec![("(1,1)", spec_11()), ("(2,1)", spec_21()), ("(1,2)", spec_12())];
    let mut rng = rng(6);
    for (name, spec) in &shapes {
        let expected = 2 * spec.m() + spec.n() + 1;
        let vac = TensorElement::vacuum(spec);
        let rr = rank_invariant(spec, &vac).unwrap();
        assert_eq!(rr.value, expected, "{name}: vacuum rank");
        assert!(rr.stabilized, "{name}: vacuum rank not window-stable");

        let box_monos = enumerate_box(spec, 3, 3, 1);
        let slot_positive: Vec<&TensorMonomial> = box_monos
            .iter()
            .filter(|m| m.dt.iter().any(|&(r, p)| r > 0 || p > 0) || m.d.iter().any(|&q| q > 0))
            .collect();
        for sample in 0..20 {
            let mono = slot_positive[rng.gen_range(0..slot_positive.len())];
            let f = TensorElement::from_monomial((*mono).clone(), rat(1));
            let rr = rank_invariant(spec, &f).unwrap();
            assert!(
                rr.value > expected && rr.stabilized,
                "{name} sample {sample}: rank {} (stabilized {}) not above {expected} on {}",
                rr.value,
                rr.stabilized,
                format_element(&f, spec)
            );
        }
    }
    println!("criterion 6 (rank invariant): PASS — 3 shapes, vacuum = 2m+n+1, 20 slot-positive samples each above the bound, windows stable");
}

/// Criterion 7: the classifier accepts permutation / h-canonicalization
/// variants and rejects every single-parameter perturbation, on ≥ 100
/// generated pairs.
#[test]
fn criterion_7_classifier() {
    let mut rng = rng(7);
    let mut positives = 0usize;
    let mut negatives = 0usize;

    let random_spec = |rng: &mut ChaCha20Rng| -> TensorSpec {
        let m = rng.gen_range(1..=3usize);
        let n = rng.gen_range(0..=2usize);
        let mut bases: Vec<Rational> = Vec::new();
        while bases.len() < m + n {
            let b = small_nonzero(rng);
            if !bases.contains(&b) {
                bases.push(b);
            }
        }
        let dt = (0..m)
            .map(|i| {
                OmegaDT::with_linear_h(
                    bases[i].clone(),
                    small_nonzero(rng),
                    small_nonzero(rng),
                    ratio(rng.gen_range(-4i64..=4), 1),
                )
                .unwrap()
            })
            .collect();
        let d = (0..n)
            .map(|j| OmegaD::new(bases[m + j].clone(), small_nonzero(rng)).unwrap())
            .collect();
        let v = match rng.gen_range(0..3u32) {
            0 => None,
            _ => Some(VSpec::Verma { theta: small_nonzero(rng), h: small_nonzero(rng) }),
        };
        TensorSpec::new(dt, d, v).unwrap()
    };

    for round in 0..120 {
        let a = random_spec(&mut rng);
        if round % 2 == 0 {
            // Positive pair: permute factors and rescale (α, ξ, η) keeping αξ.
            let mut dt = a.dt.clone();
            let mut d = a.d.clone();
            if dt.len() > 1 {
                dt.rotate_left(1);
            }
            if d.len() > 1 {
                d.rotate_left(1);
            }
            let dt = dt
                .into_iter()
                .map(|fac| {
                    let c = small_nonzero(&mut rng);
                    let xi = fac.xi().unwrap();
                    OmegaDT::new(
                        fac.lambda.clone(),
                        &fac.alpha * &c,
                        virtensor::omega::h_linear(&(xi / &c), &small_nonzero(&mut rng)),
                    )
                    .unwrap()
                })
                .collect();
            let b = TensorSpec::new(dt, d, a.v.clone()).unwrap();
            let verdict = specs_isomorphic(&a, &b).unwrap();
            assert!(
                verdict.is_isomorphic(),
                "round {round}: equivalent presentations rejected: {verdict:?}"
            );
            positives += 1;
        } else {
            // Negative pair: perturb exactly one parameter.
            let mut dt = a.dt.clone();
            let mut d = a.d.clone();
            let mut v = a.v.clone();
            let delta = loop {
                let x = small_nonzero(&mut rng);
                if x != rat(0) {
                    break x;
                }
            };
            let kind = rng.gen_range(0..7u32);
            match kind {
                0 => {
                    // λ of one dt factor (kept distinct from the others)
                    let i = rng.gen_range(0..dt.len());
                    let mut lam = &dt[i].lambda + &delta;
                    while num_traits::Zero::is_zero(&lam)
                        || dt.iter().any(|f| f.lambda == lam)
                        || d.iter().any(|f| f.mu == lam)
                    {
                        lam = lam + rat(1);
                    }
                    dt[i] = OmegaDT::new(lam, dt[i].alpha.clone(), dt[i].h.clone()).unwrap();
                }
                1 => {
                    // αξ of one dt factor, via ξ alone (α ≠ 0 by construction;
                    // keep the new ξ nonzero so h stays linear)
                    let i = rng.gen_range(0..dt.len());
                    let xi = dt[i].xi().unwrap();
                    let mut xi2 = &xi + &delta;
                    if num_traits::Zero::is_zero(&xi2) {
                        xi2 = xi + rat(1);
                    }
                    dt[i] = OmegaDT::new(
                        dt[i].lambda.clone(),
                        dt[i].alpha.clone(),
                        virtensor::omega::h_linear(&xi2, &rat(0)),
                    )
                    .unwrap();
                }
                2 if !d.is_empty() => {
                    let j = rng.gen_range(0..d.len());
                    let mut mu = &d[j].mu + &delta;
                    while num_traits::Zero::is_zero(&mu)
                        || d.iter().any(|f| f.mu == mu)
                        || dt.iter().any(|f| f.lambda == mu)
                    {
                        mu = mu + rat(1);
                    }
                    d[j] = OmegaD::new(mu, d[j].beta.clone()).unwrap();
                }
                3 if !d.is_empty() => {
                    let j = rng.gen_range(0..d.len());
                    d[j] = OmegaD::new(d[j].mu.clone(), &d[j].beta + &delta).unwrap();
                }
                4 => {
                    // m changes: append a dt factor with a fresh base
                    let mut lam = rat(7);
                    while dt.iter().any(|f| f.lambda == lam) || d.iter().any(|f| f.mu == lam) {
                        lam = lam + rat(1);
                    }
                    dt.push(OmegaDT::with_linear_h(lam, rat(1), rat(1), rat(0)).unwrap());
                }
                5 => {
                    // n changes: append a d factor with a fresh base
                    let mut mu = rat(11);
                    while dt.iter().any(|f| f.lambda == mu) || d.iter().any(|f| f.mu == mu) {
                        mu = mu + rat(1);
                    }
                    d.push(OmegaD::new(mu, rat(1)).unwrap());
                }
                _ => {
                    // (θ, h) of the highest-weight factor
                    v = match v {
                        Some(VSpec::Verma { theta, h }) => {
                            Some(VSpec::Verma { theta: &theta + &delta, h })
                        }
                        Some(other) => Some(other),
                        None => Some(VSpec::Verma { theta: rat(1), h: rat(0) }),
                    };
                }
            }
            let b = TensorSpec::new(dt, d, v).unwrap();
            let verdict = specs_isomorphic(&a, &b).unwrap();
            assert!(
                matches!(verdict, IsoVerdict::Distinct { .. }),
                "round {round} (kind {kind}): perturbed pair not rejected: {verdict:?}"
            );
            negatives += 1;
        }
    }
    assert!(positives + negatives >= 100);
    println!("criterion 7 (classifier): PASS — {positives} equivalent pairs accepted, {negatives} perturbed pairs rejected");
}

/// Criterion 8: the binomial alternating sums, the ω-operator vanishing and
/// non-vanishing at s = 5, the non-local-finiteness witness ranks, and the
/// N(M,β) ω identities at k = 1.
#[test]
fn criterion_8_identities() {
    // Alternating binomial sums: zero strictly below the diagonal, r! on it.
    for r in 1..=10u32 {
        for j in 0..r {
            assert_eq!(binomial_vanishing(r, j), rat(0), "Σ(−1)^{{r−i}}C(r,i)i^j at r={r}, j={j}");
        }
        assert_ne!(binomial_vanishing(r, r), rat(0), "diagonal value at r={r}");
    }

    // ω^{(5)}_{l,−7} kills pure-Ω vacua but not 1 ⊗ v_h.
    for l in [8i64, 9] {
        for spec in [
            TensorSpec::new(vec![dt_factor(2, 1, 1, 0)], vec![], None).unwrap(),
            TensorSpec::new(vec![], vec![OmegaD::new(rat(3), rat(2)).unwrap()], None).unwrap(),
        ] {
            let vac = TensorElement::vacuum(&spec);
            assert!(
                omega_op(&spec, 5, l, -7, &vac).unwrap().is_zero(),
                "ω^(5)_{{{l},−7}} on the pure-Ω vacuum"
            );
        }
        let spec = spec_10();
        let vac = TensorElement::vacuum(&spec);
        assert!(
            !omega_op(&spec, 5, l, -7, &vac).unwrap().is_zero(),
            "ω^(5)_{{{l},−7}} must not kill 1 ⊗ v_h"
        );
    }

    // Witness families: d_{n+1}^j(vacuum), j = 1..count, of full rank.
    let spec = spec_11();
    for n in [1i64, 2] {
        for count in 1..=5usize {
            let w = non_local_finiteness_witness(&spec, n, count).unwrap();
            assert_eq!(w.len(), count);
        }
    }

    // N(M,β) with k = 1: ω^{(s)} vanishes for s > 2k+2 = 4, and at s = 4 the
    // operator is the top square times (2k+2)!/((k+1)!)² = 6.
    let nm = bundled_nm_beta(rat(2), LaurentPoly::new([(1, rat(1)), (-1, rat(-3))])).unwrap();
    let top_const = {
        let k = 1u64;
        let num = factorial(2 * k + 2);
        let den = &factorial(k + 1) * &factorial(k + 1);
        virtensor::rational::big_to_rat(num) / virtensor::rational::big_to_rat(den)
    };
    assert_eq!(top_const, rat(6));
    for (l, m) in [(0i64, 0i64), (3, -2), (-1, 4), (7, 1)] {
        for (j, q) in [(0u32, 0i64), (1, 3), (2, -2)] {
            let f = NmElement::basis(j, q);
            for s in 5..=8u32 {
                assert!(nm.omega(s, l, m, &f).unwrap().is_zero(), "ω^({s}) at l={l}, m={m}");
            }
            let got = nm.omega(4, l, m, &f).unwrap();
            let want = nm.top_square(j, q + l).unwrap().scale(&top_const);
            assert_eq!(got, want, "top ω at l={l}, m={m}, j={j}, q={q}");
        }
    }
    println!("criterion 8 (operator identities): PASS — binomial sums r ≤ 10, ω^(5) at l ∈ {{8,9}}, witness ranks ≤ 5, N(M,β) k=1");
}
