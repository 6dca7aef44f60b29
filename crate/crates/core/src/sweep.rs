//! Exhaustive verification of the defining relation over exponent boxes.
//!
//! [`bracket_box_check`] confirms `[d_i,d_j] = (j−i)d_{i+j} + δ_{i,−j}((i³−i)/12)c`
//! on every monomial of a basis list, for every pair in an index window.  The
//! per-slot images are produced by the same factor-level action code as
//! [`crate::tensor::act`]; what differs is the bookkeeping.  Monomials are
//! packed into `u64` keys (slot exponents bit-packed, PBW words interned),
//! per-slot images are tabulated once per operator index, and each defect
//! accumulates in a hash map keyed by the packed form.  Arithmetic stays
//! exact throughout; nothing here is approximate or probabilistic.
//!
//! The packing bounds the reachable exponents: each dt-slot exponent and each
//! ∂-slot exponent must stay below 32 across a double application, and the
//! slot count must satisfy `10·m + 5·n ≤ 48` (the top 16 bits hold the
//! interned PBW word).  Boxes far beyond these bounds should fall back to
//! [`crate::tensor::bracket_defect`].

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::rc::Rc;

use num_traits::Zero;

use crate::enveloping::{straighten_apply, PBWMonomial, PBWVector};
use crate::error::{Error, Result};
use crate::omega::{d_vars, dt_vars};
use crate::poly::MultiPoly;
use crate::rational::{rat, ratio, Rational};
use crate::tensor::{TensorMonomial, TensorSpec};

/// Witness for a failed relation check: the pair and the basis monomial.
#[derive(Debug, Clone)]
pub struct BracketCounterexample {
    pub i: i64,
    pub j: i64,
    pub monomial: TensorMonomial,
}

/// Verifies the defining relation on every element of `basis` for all pairs
/// `i < j` in `[−window, window]`.  Pairs with `i = j` hold identically (the
/// commutator of an operator with itself is zero, `(j−i)` vanishes, and the
/// central term needs `i = −j`, which at `i = j` forces `i = 0` where
/// `(i³−i)/12 = 0`), and swapping `i` and `j` negates the defect, so the
/// strict upper triangle decides the full grid.
///
/// Returns the first counterexample found, or `None` when the relation holds
/// everywhere.
pub fn bracket_box_check(
    spec: &TensorSpec,
    basis: &[TensorMonomial],
    window: i64,
) -> Result<Option<BracketCounterexample>> {
    let mut eng = Engine::new(spec, window)?;
    for mono in basis {
        let key = eng.pack(mono)?;
        if let Some((i, j)) = eng.check_monomial(key, window)? {
            return Ok(Some(BracketCounterexample { i, j, monomial: eng.unpack(key) }));
        }
    }
    Ok(None)
}

const DT_BITS: u32 = 10;
const D_BITS: u32 = 5;
const EXP_BITS: u32 = 5;
const EXP_CAP: u32 = 1 << EXP_BITS;
const VID_SHIFT: u32 = 48;

type Row = Rc<[(u32, Rational)]>;

/// Multiplicative mixer for packed keys; the default SipHash dominates the
/// accumulation loop, and the keys are already well-spread bit fields.
#[derive(Default)]
struct KeyMix(u64);

impl Hasher for KeyMix {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01b3);
        }
    }

    fn write_u64(&mut self, x: u64) {
        let h = (x ^ (x >> 29)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        self.0 = h ^ (h >> 32);
    }
}

struct Engine<'a> {
    spec: &'a TensorSpec,
    window: i64,
    /// Bit offset of each slot field; dt slots first, then ∂-slots.
    shifts: Vec<u32>,
    masks: Vec<u64>,
    /// Per dt-slot: rows indexed by `k_index · 2^10 + (r | p << 5)`.
    dt_rows: Vec<Vec<Option<Row>>>,
    /// Per ∂-slot: rows indexed by `k_index · 2^5 + q`.
    d_rows: Vec<Vec<Option<Row>>>,
    /// Rows indexed by `k_index`, then interned PBW id.
    v_rows: Vec<Vec<Option<Row>>>,
    vids: Vec<PBWMonomial>,
    vid_of: BTreeMap<PBWMonomial, u16>,
    acc: HashMap<u64, Rational, BuildHasherDefault<KeyMix>>,
}

impl<'a> Engine<'a> {
    fn new(spec: &'a TensorSpec, window: i64) -> Result<Self> {
        if window < 1 {
            return Err(Error::Hypothesis("sweep window must be ≥ 1".into()));
        }
        let m = spec.m() as u32;
        let n = spec.n() as u32;
        if DT_BITS * m + D_BITS * n > VID_SHIFT {
            return Err(Error::Hypothesis(format!(
                "cannot pack {m} dt-slots and {n} ∂-slots into one key (need 10·m+5·n ≤ 48)"
            )));
        }
        let mut shifts = Vec::new();
        let mut masks = Vec::new();
        for i in 0..m {
            shifts.push(DT_BITS * i);
            masks.push(((1u64 << DT_BITS) - 1) << (DT_BITS * i));
        }
        for j in 0..n {
            shifts.push(DT_BITS * m + D_BITS * j);
            masks.push(((1u64 << D_BITS) - 1) << (DT_BITS * m + D_BITS * j));
        }
        let kcount = (4 * window + 1) as usize;
        Ok(Engine {
            spec,
            window,
            shifts,
            masks,
            dt_rows: vec![vec![None; kcount << DT_BITS]; m as usize],
            d_rows: vec![vec![None; kcount << D_BITS]; n as usize],
            v_rows: vec![Vec::new(); kcount],
            vids: Vec::new(),
            vid_of: BTreeMap::new(),
            acc: HashMap::default(),
        })
    }

    fn slots(&self) -> usize {
        self.spec.slots() + usize::from(self.spec.v.is_some())
    }

    fn intern(&mut self, pm: &PBWMonomial) -> Result<u16> {
        if let Some(&id) = self.vid_of.get(pm) {
            return Ok(id);
        }
        let id = u16::try_from(self.vids.len())
            .map_err(|_| Error::Hypothesis("more than 65535 distinct PBW words in one sweep".into()))?;
        self.vids.push(pm.clone());
        self.vid_of.insert(pm.clone(), id);
        Ok(id)
    }

    fn pack(&mut self, mono: &TensorMonomial) -> Result<u64> {
        let mut key = 0u64;
        for (i, &(r, p)) in mono.dt.iter().enumerate() {
            if r.max(p) >= EXP_CAP {
                return Err(Error::Hypothesis(format!("exponent {} exceeds packed capacity 31", r.max(p))));
            }
            key |= u64::from(r | (p << EXP_BITS)) << self.shifts[i];
        }
        for (j, &q) in mono.d.iter().enumerate() {
            if q >= EXP_CAP {
                return Err(Error::Hypothesis(format!("exponent {q} exceeds packed capacity 31")));
            }
            key |= u64::from(q) << self.shifts[mono.dt.len() + j];
        }
        if let Some(pm) = &mono.v {
            key |= u64::from(self.intern(pm)?) << VID_SHIFT;
        }
        Ok(key)
    }

    fn unpack(&self, key: u64) -> TensorMonomial {
        let m = self.spec.m();
        let dt = (0..m)
            .map(|i| {
                let v = ((key & self.masks[i]) >> self.shifts[i]) as u32;
                (v & (EXP_CAP - 1), v >> EXP_BITS)
            })
            .collect();
        let d = (0..self.spec.n())
            .map(|j| ((key & self.masks[m + j]) >> self.shifts[m + j]) as u32)
            .collect();
        let v = self.spec.v.as_ref().map(|_| self.vids[(key >> VID_SHIFT) as usize].clone());
        TensorMonomial { dt, d, v }
    }

    fn field(&self, key: u64, slot: usize) -> u32 {
        if slot < self.spec.slots() {
            ((key & self.masks[slot]) >> self.shifts[slot]) as u32
        } else {
            (key >> VID_SHIFT) as u32
        }
    }

    fn replace(&self, key: u64, slot: usize, val: u32) -> u64 {
        if slot < self.spec.slots() {
            (key & !self.masks[slot]) | (u64::from(val) << self.shifts[slot])
        } else {
            (key & ((1u64 << VID_SHIFT) - 1)) | (u64::from(val) << VID_SHIFT)
        }
    }

    fn k_index(&self, k: i64) -> usize {
        (k + 2 * self.window) as usize
    }

    /// The `d_k` image of one slot value, built on first use by the same
    /// factor code as the generic action.
    fn row(&mut self, slot: usize, k: i64, val: u32) -> Result<Row> {
        let ki = self.k_index(k);
        let m = self.spec.m();
        let n = self.spec.n();
        if slot < m {
            let idx = (ki << DT_BITS) + val as usize;
            if let Some(row) = &self.dt_rows[slot][idx] {
                return Ok(Rc::clone(row));
            }
            let (r, p) = (val & (EXP_CAP - 1), val >> EXP_BITS);
            let image = self.spec.dt[slot].act(k, &MultiPoly::monomial(&dt_vars(), vec![r, p], rat(1)))?;
            let mut entries = Vec::new();
            for (e, c) in image.terms() {
                if e[0].max(e[1]) >= EXP_CAP {
                    return Err(Error::Hypothesis(format!(
                        "image exponent {} exceeds packed capacity 31",
                        e[0].max(e[1])
                    )));
                }
                entries.push((e[0] | (e[1] << EXP_BITS), c.clone()));
            }
            let row: Row = Rc::from(entries);
            self.dt_rows[slot][idx] = Some(Rc::clone(&row));
            Ok(row)
        } else if slot < m + n {
            let idx = (ki << D_BITS) + val as usize;
            if let Some(row) = &self.d_rows[slot - m][idx] {
                return Ok(Rc::clone(row));
            }
            let image = self.spec.d[slot - m].act(k, &MultiPoly::monomial(&d_vars(), vec![val], rat(1)))?;
            let mut entries = Vec::new();
            for (e, c) in image.terms() {
                if e[0] >= EXP_CAP {
                    return Err(Error::Hypothesis(format!(
                        "image exponent {} exceeds packed capacity 31",
                        e[0]
                    )));
                }
                entries.push((e[0], c.clone()));
            }
            let row: Row = Rc::from(entries);
            self.d_rows[slot - m][idx] = Some(Rc::clone(&row));
            Ok(row)
        } else {
            if let Some(Some(row)) = self.v_rows[ki].get(val as usize) {
                return Ok(Rc::clone(row));
            }
            let vs = self.spec.v.as_ref().expect("V slot enumerated only when present");
            let pm = self.vids[val as usize].clone();
            let image = straighten_apply(k, &PBWVector::from_monomial(pm, rat(1)), vs)?;
            let mut entries = Vec::new();
            for (pm2, c) in &image.terms {
                entries.push((u32::from(self.intern(pm2)?), c.clone()));
            }
            let row: Row = Rc::from(entries);
            if self.v_rows[ki].len() <= val as usize {
                self.v_rows[ki].resize(val as usize + 1, None);
            }
            self.v_rows[ki][val as usize] = Some(Rc::clone(&row));
            Ok(row)
        }
    }

    fn upsert(&mut self, key: u64, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.acc.entry(key) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Accumulates `±d_outer(d_inner(key))` term by term: every slot image of
    /// the inner operator, then every slot image of the outer one on each
    /// intermediate key.
    fn emit_double(&mut self, outer: i64, inner: i64, negate: bool, key: u64) -> Result<()> {
        for s1 in 0..self.slots() {
            let row1 = self.row(s1, inner, self.field(key, s1))?;
            for (v1, c1) in row1.iter() {
                let key1 = self.replace(key, s1, *v1);
                for s2 in 0..self.slots() {
                    let row2 = self.row(s2, outer, self.field(key1, s2))?;
                    for (v2, c2) in row2.iter() {
                        let c = c1 * c2;
                        self.upsert(self.replace(key1, s2, *v2), if negate { -c } else { c });
                    }
                }
            }
        }
        Ok(())
    }

    fn emit_single(&mut self, k: i64, key: u64, scale: &Rational) -> Result<()> {
        for s in 0..self.slots() {
            let row = self.row(s, k, self.field(key, s))?;
            for (v, c) in row.iter() {
                self.upsert(self.replace(key, s, *v), c * scale);
            }
        }
        Ok(())
    }

    /// First pair `i < j` in the window whose defect on `key` is nonzero.
    fn check_monomial(&mut self, key: u64, window: i64) -> Result<Option<(i64, i64)>> {
        for i in -window..=window {
            for j in (i + 1)..=window {
                self.acc.clear();
                self.emit_double(i, j, false, key)?;
                self.emit_double(j, i, true, key)?;
                self.emit_single(i + j, key, &rat(i - j))?;
                if i == -j {
                    let central = ratio(i * i * i - i, 12) * self.spec.central_charge();
                    self.upsert(key, -central);
                }
                if !self.acc.is_empty() {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enveloping::{bundled_shift_naction, VSpec};
    use crate::omega::{OmegaD, OmegaDT};
    use crate::tensor::{bracket_defect, enumerate_box, TensorElement};

    fn spec_11v() -> TensorSpec {
        TensorSpec::new(
            vec![OmegaDT::with_linear_h(rat(2), rat(1), rat(1), rat(0)).unwrap()],
            vec![OmegaD::new(rat(3), rat(2)).unwrap()],
            Some(VSpec::Verma { theta: ratio(1, 2), h: ratio(1, 3) }),
        )
        .unwrap()
    }

    fn spec_induced() -> TensorSpec {
        TensorSpec::new(
            vec![OmegaDT::with_linear_h(rat(2), rat(1), rat(1), rat(0)).unwrap()],
            vec![],
            Some(VSpec::Induced { theta: rat(1), n: bundled_shift_naction(rat(2)) }),
        )
        .unwrap()
    }

    #[test]
    fn relation_holds_on_small_boxes() {
        let spec = spec_11v();
        let basis = enumerate_box(&spec, 2, 2, 1);
        assert!(bracket_box_check(&spec, &basis, 2).unwrap().is_none());

        let pure = TensorSpec::new(
            vec![
                OmegaDT::with_linear_h(rat(2), rat(1), rat(1), rat(0)).unwrap(),
                OmegaDT::with_linear_h(rat(5), rat(-1), rat(2), rat(3)).unwrap(),
            ],
            vec![OmegaD::new(rat(3), rat(-2)).unwrap()],
            None,
        )
        .unwrap();
        let basis = enumerate_box(&pure, 1, 0, 1);
        assert!(bracket_box_check(&pure, &basis, 2).unwrap().is_none());
    }

    #[test]
    fn relation_holds_with_induced_tails() {
        let spec = spec_induced();
        let basis = enumerate_box(&spec, 1, 1, 3);
        assert!(bracket_box_check(&spec, &basis, 2).unwrap().is_none());
    }

    /// The packed accumulation must reproduce the generic composite path: the
    /// defect map built here and [`bracket_defect`] agree term by term once a
    /// synthetic term is injected to keep both nonzero.
    #[test]
    fn accumulator_matches_generic_defect() {
        let spec = spec_11v();
        let basis = enumerate_box(&spec, 1, 1, 1);
        let mut eng = Engine::new(&spec, 2).unwrap();
        for mono in &basis {
            let key = eng.pack(mono).unwrap();
            for (i, j) in [(-2, 1), (1, 2), (-1, 1)] {
                eng.acc.clear();
                eng.emit_double(i, j, false, key).unwrap();
                // Leave out the subtracted terms: the remainder is d_i(d_j f),
                // directly comparable against the generic path.
                let f = TensorElement::from_monomial(mono.clone(), rat(1));
                let generic = crate::tensor::act(&spec, i, &crate::tensor::act(&spec, j, &f).unwrap()).unwrap();
                assert_eq!(eng.acc.len(), generic.terms.len());
                for (m2, c2) in &generic.terms {
                    let k2 = eng.pack(m2).unwrap();
                    assert_eq!(eng.acc.get(&k2), Some(c2), "coefficient mismatch at {m2:?}");
                }
            }
        }
    }

    /// The zero check has to fire: corrupt one tabulated row and the sweep
    /// must report the pair that touches it.
    #[test]
    fn tampered_row_is_detected() {
        let spec = spec_11v();
        let mono = TensorMonomial::ones(&spec);
        let mut eng = Engine::new(&spec, 2).unwrap();
        let key = eng.pack(&mono).unwrap();
        assert!(eng.check_monomial(key, 2).unwrap().is_none());
        let ki = eng.k_index(1);
        let idx = ki << DT_BITS;
        let mut entries: Vec<(u32, Rational)> =
            eng.dt_rows[0][idx].as_ref().unwrap().iter().cloned().collect();
        entries[0].1 += rat(1);
        eng.dt_rows[0][idx] = Some(Rc::from(entries));
        let hit = eng.check_monomial(key, 2).unwrap();
        assert!(hit.is_some(), "corrupted table row slipped through");
    }

    #[test]
    fn unpack_inverts_pack() {
        let spec = spec_11v();
        let mut eng = Engine::new(&spec, 1).unwrap();
        for mono in enumerate_box(&spec, 3, 3, 1) {
            let key = eng.pack(&mono).unwrap();
            assert_eq!(eng.unpack(key), mono);
        }
    }

    #[test]
    fn counterexample_reports_location() {
        // A sanity run that the witness type carries usable data; built from
        // the tampering path above via the public entry point is not possible
        // without a broken spec, so this just checks packing bounds errors.
        let spec = spec_11v();
        let mut mono = TensorMonomial::ones(&spec);
        mono.dt[0] = (40, 0);
        let err = bracket_box_check(&spec, &[mono], 1).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }

    #[test]
    fn defect_agreement_on_bracket_defect_samples() {
        let spec = spec_induced();
        let basis = enumerate_box(&spec, 1, 1, 2);
        for mono in basis.iter().step_by(3) {
            let f = TensorElement::from_monomial(mono.clone(), rat(1));
            for (i, j) in [(-2, 2), (0, 1), (-1, 2)] {
                assert!(bracket_defect(&spec, i, j, &f).unwrap().is_zero());
            }
        }
        assert!(bracket_box_check(&spec, &basis, 2).unwrap().is_none());
    }
}
