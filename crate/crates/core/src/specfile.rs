//! JSON spec files describing a tensor-product module.
//!
//! ```json
//! {
//!   "m": 1, "n": 1,
//!   "dt_factors": [{"lambda": "2", "alpha": "1", "xi": "1", "eta": "0"}],
//!   "d_factors":  [{"mu": "3", "beta": "2"}],
//!   "v": {"type": "verma", "theta": "1/2", "h": "1/3"}
//! }
//! ```
//!
//! Every rational is a string, `"p"` or `"p/q"`, so nothing is rounded. A
//! `dt_factors` entry gives `h` either as `xi`/`eta` (h = ξt + η) or as
//! `h_coeffs`, the coefficient list of h in ascending powers of t. The `v`
//! field may be absent (no highest-weight factor), a Verma description, or an
//! induced description carrying the action table of `d_0..d_k` on the basis
//! of N:
//!
//! ```json
//! {
//!   "type": "induced", "theta": "1", "k": 1,
//!   "basis_size_or_rule": "infinite",
//!   "action": [
//!     {"i": 0, "diagonal": {"offset": "2", "step": "1"}},
//!     {"i": 1, "shift": {"by": 1, "scale": "1"}}
//!   ]
//! }
//! ```
//!
//! Finite tables use `{"i": 0, "entries": [{"from": 0, "to": 1, "coeff": "3"}]}`
//! and `basis_size_or_rule` set to the basis size.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::enveloping::{BasisKind, GenAction, NAction, VSpec};
use crate::error::{Error, Result};
use crate::omega::{t_vars, OmegaD, OmegaDT};
use crate::poly::MultiPoly;
use crate::rational::{format_rational, parse_rational, rat, Rational};
use crate::tensor::TensorSpec;

#[derive(Serialize, Deserialize)]
struct RawSpecFile {
    m: u32,
    n: u32,
    dt_factors: Vec<RawDtFactor>,
    d_factors: Vec<RawDFactor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<RawV>,
}

#[derive(Serialize, Deserialize)]
struct RawDtFactor {
    lambda: String,
    alpha: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h_coeffs: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RawDFactor {
    mu: String,
    beta: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawV {
    Verma {
        theta: String,
        h: String,
    },
    Induced {
        theta: String,
        k: u32,
        basis_size_or_rule: BasisSizeOrRule,
        action: Vec<RawGen>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BasisSizeOrRule {
    Size(u32),
    Rule(String),
}

#[derive(Serialize, Deserialize)]
struct RawGen {
    i: u32,
    #[serde(flatten)]
    rule: RawRule,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawRule {
    Diagonal { offset: String, step: String },
    Shift { by: u32, scale: String },
    Entries(Vec<RawEntry>),
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    from: u32,
    to: u32,
    coeff: String,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadModuleData(msg.into())
}

fn dt_factor(raw: &RawDtFactor) -> Result<OmegaDT> {
    let lambda = parse_rational(&raw.lambda)?;
    let alpha = parse_rational(&raw.alpha)?;
    match (&raw.xi, &raw.eta, &raw.h_coeffs) {
        (Some(xi), Some(eta), None) => {
            OmegaDT::with_linear_h(lambda, alpha, parse_rational(xi)?, parse_rational(eta)?)
        }
        (None, None, Some(coeffs)) => {
            let vars = t_vars();
            let mut h = MultiPoly::zero(&vars);
            for (p, c) in coeffs.iter().enumerate() {
                h.add_term(vec![p as u32], parse_rational(c)?);
            }
            OmegaDT::new(lambda, alpha, h)
        }
        (None, None, None) => Err(bad("dt factor needs either xi/eta or h_coeffs")),
        _ => Err(bad("dt factor must use xi/eta or h_coeffs, not a mixture")),
    }
}

fn v_spec(raw: &RawV) -> Result<VSpec> {
    match raw {
        RawV::Verma { theta, h } => Ok(VSpec::Verma {
            theta: parse_rational(theta)?,
            h: parse_rational(h)?,
        }),
        RawV::Induced { theta, k, basis_size_or_rule, action } => {
            let basis = match basis_size_or_rule {
                BasisSizeOrRule::Size(s) => BasisKind::Finite(*s),
                BasisSizeOrRule::Rule(r) if r == "infinite" => BasisKind::Infinite,
                BasisSizeOrRule::Rule(r) => {
                    return Err(bad(format!(
                        "basis_size_or_rule must be a size or \"infinite\", got \"{r}\""
                    )))
                }
            };
            let mut gens: BTreeMap<u32, GenAction> = BTreeMap::new();
            for g in action {
                let rule = match &g.rule {
                    RawRule::Diagonal { offset, step } => GenAction::Diagonal {
                        offset: parse_rational(offset)?,
                        step: parse_rational(step)?,
                    },
                    RawRule::Shift { by, scale } => GenAction::Shift {
                        by: *by,
                        scale: parse_rational(scale)?,
                    },
                    RawRule::Entries(list) => {
                        let mut rows: BTreeMap<u32, Vec<(Rational, u32)>> = BTreeMap::new();
                        for e in list {
                            rows.entry(e.from).or_default().push((parse_rational(&e.coeff)?, e.to));
                        }
                        GenAction::Entries(rows)
                    }
                };
                if gens.insert(g.i, rule).is_some() {
                    return Err(bad(format!("generator d_{} has two action rules", g.i)));
                }
            }
            Ok(VSpec::Induced {
                theta: parse_rational(theta)?,
                n: NAction::new(*k, basis, gens)?,
            })
        }
    }
}

pub fn spec_from_json(text: &str) -> Result<TensorSpec> {
    let raw: RawSpecFile = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    if raw.m as usize != raw.dt_factors.len() {
        return Err(bad(format!(
            "m = {} but dt_factors has {} entries",
            raw.m,
            raw.dt_factors.len()
        )));
    }
    if raw.n as usize != raw.d_factors.len() {
        return Err(bad(format!(
            "n = {} but d_factors has {} entries",
            raw.n,
            raw.d_factors.len()
        )));
    }
    let dt = raw.dt_factors.iter().map(dt_factor).collect::<Result<Vec<_>>>()?;
    let d = raw
        .d_factors
        .iter()
        .map(|f| OmegaD::new(parse_rational(&f.mu)?, parse_rational(&f.beta)?))
        .collect::<Result<Vec<_>>>()?;
    let v = raw.v.as_ref().map(v_spec).transpose()?;
    TensorSpec::new(dt, d, v)
}

pub fn load_spec(path: &std::path::Path) -> Result<TensorSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    spec_from_json(&text)
}

fn raw_dt(f: &OmegaDT) -> RawDtFactor {
    let mut base = RawDtFactor {
        lambda: format_rational(&f.lambda),
        alpha: format_rational(&f.alpha),
        xi: None,
        eta: None,
        h_coeffs: None,
    };
    let coeff = |p: u32| f.h.coeff_of_power(0, p).eval(&[rat(0)]);
    let deg = f.h.degree_in(0).unwrap_or(0);
    if deg <= 1 {
        base.xi = Some(format_rational(&coeff(1)));
        base.eta = Some(format_rational(&coeff(0)));
    } else {
        base.h_coeffs = Some((0..=deg).map(|p| format_rational(&coeff(p))).collect());
    }
    base
}

fn raw_v(v: &VSpec) -> RawV {
    match v {
        VSpec::Verma { theta, h } => RawV::Verma {
            theta: format_rational(theta),
            h: format_rational(h),
        },
        VSpec::Induced { theta, n } => RawV::Induced {
            theta: format_rational(theta),
            k: n.k,
            basis_size_or_rule: match n.basis {
                BasisKind::Finite(s) => BasisSizeOrRule::Size(s),
                BasisKind::Infinite => BasisSizeOrRule::Rule("infinite".into()),
            },
            action: n
                .gens
                .iter()
                .map(|(&i, rule)| RawGen {
                    i,
                    rule: match rule {
                        GenAction::Diagonal { offset, step } => RawRule::Diagonal {
                            offset: format_rational(offset),
                            step: format_rational(step),
                        },
                        GenAction::Shift { by, scale } => RawRule::Shift {
                            by: *by,
                            scale: format_rational(scale),
                        },
                        GenAction::Entries(rows) => RawRule::Entries(
                            rows.iter()
                                .flat_map(|(&from, cols)| {
                                    cols.iter().map(move |(c, to)| RawEntry {
                                        from,
                                        to: *to,
                                        coeff: format_rational(c),
                                    })
                                })
                                .collect(),
                        ),
                    },
                })
                .collect(),
        },
    }
}

pub fn spec_to_json(spec: &TensorSpec) -> String {
    let raw = RawSpecFile {
        m: spec.m() as u32,
        n: spec.n() as u32,
        dt_factors: spec.dt.iter().map(raw_dt).collect(),
        d_factors: spec
            .d
            .iter()
            .map(|f| RawDFactor {
                mu: format_rational(&f.mu),
                beta: format_rational(&f.beta),
            })
            .collect(),
        v: spec.v.as_ref().map(raw_v),
    };
    serde_json::to_string_pretty(&raw).expect("spec serialization cannot fail")
}
