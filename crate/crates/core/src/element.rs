//! The element expression grammar and its canonical printer.
//!
//! ```text
//! element := ["-"] term (("+"|"-") term)*
//! term    := coeff ["*" factors] [":" vpart]
//!          | factors [":" vpart]
//! factors := atom ("*" atom)*
//! atom    := ("D"|"T") index ["^" exponent]
//! vpart   := "V[" [exp ("," exp)*] [";" tail] "]"
//! coeff   := ["("] integer ["/" positive-integer] [")"]
//! ```
//!
//! `D1..D(m+n)` are the ∂ variables in global slot order, `T1..Tm` the t
//! variables of the first block. `V[k1,k2,…]` denotes `d_{-1}^{k1}d_{-2}^{k2}…`
//! applied to the highest-weight vector; for induced factors an optional
//! `;b` picks the tail basis vector (default `b_0`). Whitespace is free.
//! The printer emits one canonical form per element: terms in monomial
//! order joined by ` + `, coefficients suppressed when 1, exponents
//! suppressed when 1, and the V part always explicit when the spec has one.

use num_traits::One;

use crate::enveloping::{PBWMonomial, Tail, VSpec};
use crate::error::{Error, Result};
use crate::rational::{format_rational, rat, Rational};
use crate::tensor::{TensorElement, TensorMonomial, TensorSpec};

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    spec: &'a TensorSpec,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn expect(&mut self, wanted: u8) -> Result<()> {
        match self.bump() {
            Some(b) if b == wanted => Ok(()),
            Some(b) => Err(err(
                self.pos - 1,
                format!("expected '{}', found '{}'", wanted as char, b as char),
            )),
            None => Err(err(self.pos, format!("expected '{}', found end of input", wanted as char))),
        }
    }

    fn integer(&mut self, what: &str) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            if self.bytes.get(self.pos) == Some(&b'-') {
                return Err(err(self.pos, format!("negative {what} not allowed")));
            }
            return Err(err(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| err(start, format!("{what} out of range")))
    }

    /// `coeff` with an optional leading sign and optional parentheses.
    fn coefficient(&mut self, mut sign: i32) -> Result<Rational> {
        let parens = self.peek() == Some(b'(');
        if parens {
            self.bump();
            if self.peek() == Some(b'-') {
                self.bump();
                sign = -sign;
            }
        }
        let start = self.pos;
        let numer = self.integer("integer coefficient")? as i64;
        let mut value = rat(numer);
        if self.peek() == Some(b'/') {
            self.bump();
            let denom = self.integer("positive denominator")? as i64;
            if denom == 0 {
                return Err(err(start, "zero denominator"));
            }
            value = value / rat(denom);
        }
        if parens {
            self.expect(b')')?;
        }
        if sign < 0 {
            value = -value;
        }
        Ok(value)
    }

    /// One `D`/`T` atom; accumulates into the exponent vectors.
    fn atom(&mut self, dt: &mut [(u32, u32)], d: &mut [u32]) -> Result<()> {
        let kind_pos = self.pos;
        let kind = self.bump().ok_or_else(|| err(kind_pos, "expected 'D' or 'T'"))?;
        let index_pos = self.pos;
        let index = self.integer("slot index")? as usize;
        let exp = if self.peek() == Some(b'^') {
            self.bump();
            let exp_pos = self.pos;
            let e = self.integer("exponent")?;
            u32::try_from(e).map_err(|_| err(exp_pos, "exponent out of range"))?
        } else {
            1
        };
        let m = self.spec.m();
        let n = self.spec.n();
        match kind {
            b'D' => {
                if index >= 1 && index <= m {
                    dt[index - 1].0 += exp;
                } else if index > m && index <= m + n {
                    d[index - m - 1] += exp;
                } else {
                    return Err(err(
                        index_pos,
                        format!("slot D{index} out of range; valid: D1..D{}", m + n),
                    ));
                }
            }
            b'T' => {
                if index >= 1 && index <= m {
                    dt[index - 1].1 += exp;
                } else {
                    return Err(err(
                        index_pos,
                        format!("slot T{index} out of range; valid: T1..T{m}"),
                    ));
                }
            }
            other => {
                return Err(err(kind_pos, format!("expected 'D' or 'T', found '{}'", other as char)))
            }
        }
        Ok(())
    }

    fn vpart(&mut self) -> Result<PBWMonomial> {
        let v_pos = self.pos;
        self.expect(b'V')?;
        self.expect(b'[')?;
        let mut exps: Vec<u32> = Vec::new();
        if self.peek() != Some(b']') && self.peek() != Some(b';') {
            loop {
                let e_pos = self.pos;
                let e = self.integer("generator exponent")?;
                exps.push(u32::try_from(e).map_err(|_| err(e_pos, "exponent out of range"))?);
                if self.peek() == Some(b',') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let tail = if self.peek() == Some(b';') {
            self.bump();
            let t_pos = self.pos;
            let b = self.integer("tail index")?;
            match &self.spec.v {
                Some(VSpec::Induced { .. }) => {
                    Tail::Basis(u32::try_from(b).map_err(|_| err(t_pos, "tail index out of range"))?)
                }
                _ => {
                    return Err(err(
                        t_pos,
                        "tail index is only meaningful for induced highest-weight factors",
                    ))
                }
            }
        } else {
            match &self.spec.v {
                Some(VSpec::Induced { .. }) => Tail::Basis(0),
                _ => Tail::Hw,
            }
        };
        self.expect(b']')?;
        if self.spec.v.is_none() {
            return Err(err(v_pos, "spec has no highest-weight factor; V[…] is invalid"));
        }
        Ok(PBWMonomial::from_exponents(&exps, tail))
    }

    fn term(&mut self, sign: i32, out: &mut TensorElement) -> Result<()> {
        let mut coeff = rat(sign as i64);
        let mut have_anything = false;
        match self.peek() {
            Some(b) if b.is_ascii_digit() || b == b'(' => {
                coeff = self.coefficient(sign)?;
                have_anything = true;
                if self.peek() == Some(b'*') {
                    self.bump();
                    self.skip_ws();
                    if !matches!(self.peek(), Some(b'D') | Some(b'T')) {
                        return Err(err(self.pos, "expected an atom after '*'"));
                    }
                }
            }
            _ => {}
        }
        let mut dt = vec![(0u32, 0u32); self.spec.m()];
        let mut d = vec![0u32; self.spec.n()];
        while matches!(self.peek(), Some(b'D') | Some(b'T')) {
            self.atom(&mut dt, &mut d)?;
            have_anything = true;
            if self.peek() == Some(b'*') {
                self.bump();
                self.skip_ws();
                if !matches!(self.peek(), Some(b'D') | Some(b'T')) {
                    return Err(err(self.pos, "expected an atom after '*'"));
                }
            } else {
                break;
            }
        }
        let v = if self.peek() == Some(b':') {
            self.bump();
            have_anything = true;
            Some(self.vpart()?)
        } else {
            match &self.spec.v {
                Some(VSpec::Induced { .. }) => Some(PBWMonomial::tail_only(Tail::Basis(0))),
                Some(_) => Some(PBWMonomial::hw()),
                None => None,
            }
        };
        if !have_anything {
            return Err(err(self.pos, "expected a term"));
        }
        out.add_term(TensorMonomial { dt, d, v }, coeff);
        Ok(())
    }
}

pub fn parse_element(text: &str, spec: &TensorSpec) -> Result<TensorElement> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, spec };
    let mut out = TensorElement::zero();
    let mut sign = 1;
    if p.peek() == Some(b'-') {
        p.bump();
        sign = -1;
    }
    p.term(sign, &mut out)?;
    loop {
        match p.peek() {
            None => break,
            Some(b'+') => {
                p.bump();
                let mut sign = 1;
                if p.peek() == Some(b'-') {
                    p.bump();
                    sign = -1;
                }
                p.term(sign, &mut out)?;
            }
            Some(b'-') => {
                p.bump();
                p.term(-1, &mut out)?;
            }
            Some(b) => {
                return Err(err(p.pos, format!("unexpected '{}' after term", b as char)))
            }
        }
    }
    Ok(out)
}

fn format_vpart(pm: &PBWMonomial, spec: &TensorSpec) -> String {
    let max_gen = pm.exps.keys().max().copied().unwrap_or(0);
    let exps: Vec<String> = (1..=max_gen)
        .map(|g| pm.exps.get(&g).copied().unwrap_or(0).to_string())
        .collect();
    let tail = match (&spec.v, pm.tail) {
        (Some(VSpec::Induced { .. }), Tail::Basis(b)) => format!(";{b}"),
        _ => String::new(),
    };
    format!("V[{}{}]", exps.join(","), tail)
}

pub fn format_element(f: &TensorElement, spec: &TensorSpec) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut terms = Vec::with_capacity(f.terms.len());
    for (mono, coeff) in &f.terms {
        let mut atoms: Vec<String> = Vec::new();
        for (i, (r, p)) in mono.dt.iter().enumerate() {
            if *r > 0 {
                atoms.push(if *r == 1 { format!("D{}", i + 1) } else { format!("D{}^{r}", i + 1) });
            }
            if *p > 0 {
                atoms.push(if *p == 1 { format!("T{}", i + 1) } else { format!("T{}^{p}", i + 1) });
            }
        }
        for (j, q) in mono.d.iter().enumerate() {
            let idx = spec.m() + j + 1;
            if *q > 0 {
                atoms.push(if *q == 1 { format!("D{idx}") } else { format!("D{idx}^{q}") });
            }
        }
        let mut text = String::new();
        if atoms.is_empty() {
            text.push_str(&format_rational(coeff));
        } else {
            if !coeff.is_one() {
                text.push_str(&format_rational(coeff));
                text.push('*');
            }
            text.push_str(&atoms.join("*"));
        }
        if let Some(pm) = &mono.v {
            text.push_str(" : ");
            text.push_str(&format_vpart(pm, spec));
        }
        terms.push(text);
    }
    terms.join(" + ")
}
