//! Line-oriented `.mod` and `.ses` formats.
//!
//! ```text
//! p 2
//! algebra A(2)
//! gen g0 0
//! rel Sq1 g0
//! rel Sq2 g0
//! ```
//! A relation body is a signed sum of `<expr> <gen>` terms; an empty
//! expression stands for the unit, so `rel Sq1 g + g'` is valid.
//!
//! ```text
//! sub  C.mod
//! mid  M.mod
//! quot Q.mod
//! inj  c0 = g0
//! surj g0 = 0
//! surj g7 = q7
//! ```

use super::FpModError;
use crate::steenrod::{parse_expr, parse_token, MilnorElement, Profile};

/// A finite presentation: generators and relations over a profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub profile: Profile,
    pub name: String,
    pub gens: Vec<(String, i32)>,
    pub rels: Vec<FreeElement>,
}

/// A free-module element: Σ (a_k, g_k).
pub type FreeElement = Vec<(MilnorElement, usize)>;

/// Line-level parse failure.
fn perr(line: usize, msg: impl Into<String>) -> FpModError {
    FpModError::Parse { line, msg: msg.into() }
}

pub(crate) fn valid_gen_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else { return false };
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && parse_token(name).is_none()
        && name != "0"
}

/// Parses a relation body / element expression over the given generators.
pub fn parse_free_element(
    text: &str,
    gens: &[(String, i32)],
    profile: &Profile,
) -> Result<(Option<i32>, FreeElement), String> {
    let p = profile.p;
    let mut terms: Vec<(u32, String, usize)> = Vec::new();
    let mut current = String::new();
    let mut sign = 1u32;
    let mut saw_zero = false;
    for chunk in text.split_whitespace() {
        let mut chunk = chunk;
        while let Some(c) = chunk.chars().next().filter(|c| *c == '+' || *c == '-') {
            if !current.trim().is_empty() {
                return Err(format!("expression {:?} is not followed by a generator", current.trim()));
            }
            if c == '-' {
                sign = p - sign;
            }
            chunk = &chunk[1..];
        }
        if chunk.is_empty() {
            continue;
        }
        if let Some(k) = gens.iter().position(|(n, _)| n == chunk) {
            terms.push((sign, std::mem::take(&mut current), k));
            sign = 1;
        } else if chunk == "0" && current.trim().is_empty() && terms.is_empty() {
            saw_zero = true;
        } else {
            current.push(' ');
            current.push_str(chunk);
        }
    }
    if !current.trim().is_empty() {
        return Err(format!("expression {:?} is not followed by a generator", current.trim()));
    }
    if terms.is_empty() && !saw_zero {
        return Err("empty element".into());
    }
    if saw_zero && !terms.is_empty() {
        return Err("'0' cannot be combined with other terms".into());
    }
    let mut out = Vec::new();
    let mut degree: Option<i32> = None;
    for (sign, expr, k) in terms {
        let mut e = if expr.trim().is_empty() {
            MilnorElement::unit(p)
        } else {
            parse_expr(&expr, profile).map_err(|e| format!("{e} in {:?}", expr.trim()))?
        };
        e.scale(sign);
        if e.is_zero() {
            continue;
        }
        let d = e.degree().ok_or_else(|| format!("{:?} is not homogeneous", expr.trim()))? as i32 + gens[k].1;
        if degree.is_some_and(|x| x != d) {
            return Err(format!("terms of degrees {} and {d} in one element", degree.unwrap()));
        }
        degree = Some(d);
        out.push((e, k));
    }
    Ok((degree, out))
}

/// Parses a `.mod` document.
pub fn parse_mod(text: &str) -> Result<Presentation, FpModError> {
    let mut p: Option<u32> = None;
    let mut profile: Option<Profile> = None;
    let mut name = String::new();
    let mut gens: Vec<(String, i32)> = Vec::new();
    let mut rel_lines: Vec<(usize, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "p" => {
                let v: u32 = rest.parse().map_err(|_| perr(line_no, format!("bad prime {rest:?}")))?;
                if !crate::fplin::is_supported_prime(v) {
                    return Err(perr(line_no, format!("unsupported prime {v}")));
                }
                p = Some(v);
            }
            "algebra" => {
                let pv = p.ok_or_else(|| perr(line_no, "'algebra' before 'p'"))?;
                let prof = Profile::named(pv, rest).map_err(|e| perr(line_no, e.to_string()))?;
                if prof.unbounded {
                    return Err(perr(line_no, "modules need a finite algebra"));
                }
                profile = Some(prof);
            }
            "name" => name = rest.to_string(),
            "gen" => {
                let mut it = rest.split_whitespace();
                let (Some(g), Some(d), None) = (it.next(), it.next(), it.next()) else {
                    return Err(perr(line_no, "expected 'gen <name> <degree>'"));
                };
                if !valid_gen_name(g) {
                    return Err(perr(line_no, format!("invalid generator name {g:?}")));
                }
                if gens.iter().any(|(x, _)| x == g) {
                    return Err(perr(line_no, format!("duplicate generator {g:?}")));
                }
                let d: i32 = d.parse().map_err(|_| perr(line_no, format!("bad degree {d:?}")))?;
                if d.abs() > 10_000 {
                    return Err(perr(line_no, "degree out of range"));
                }
                gens.push((g.to_string(), d));
            }
            "rel" => rel_lines.push((line_no, rest.to_string())),
            _ => return Err(perr(line_no, format!("unknown directive {key:?}"))),
        }
    }
    let profile = profile.ok_or_else(|| perr(0, "missing 'algebra' line"))?;
    if gens.is_empty() {
        return Err(perr(0, "no generators"));
    }
    let mut rels = Vec::new();
    for (line_no, body) in rel_lines {
        let (_, elt) = parse_free_element(&body, &gens, &profile).map_err(|m| perr(line_no, m))?;
        if !elt.is_empty() {
            rels.push(elt);
        }
    }
    Ok(Presentation { profile, name, gens, rels })
}

/// The parts of a `.ses` document before the referenced modules are loaded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SesSpec {
    pub sub: String,
    pub mid: String,
    pub quot: String,
    pub inj: Vec<(String, String)>,
    pub surj: Vec<(String, String)>,
}

pub fn parse_ses(text: &str) -> Result<SesSpec, FpModError> {
    let (mut sub, mut mid, mut quot) = (None, None, None);
    let (mut inj, mut surj) = (Vec::new(), Vec::new());
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "sub" | "mid" | "quot" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(perr(line_no, format!("expected '{key} <file>'")));
                }
                let slot = match key {
                    "sub" => &mut sub,
                    "mid" => &mut mid,
                    _ => &mut quot,
                };
                if slot.replace(rest.to_string()).is_some() {
                    return Err(perr(line_no, format!("duplicate '{key}'")));
                }
            }
            "inj" | "surj" => {
                let (g, e) = rest.split_once('=').ok_or_else(|| perr(line_no, "expected '<gen> = <element>'"))?;
                let g = g.trim();
                if !valid_gen_name(g) {
                    return Err(perr(line_no, format!("invalid generator name {g:?}")));
                }
                let list = if key == "inj" { &mut inj } else { &mut surj };
                list.push((g.to_string(), e.trim().to_string()));
            }
            _ => return Err(perr(line_no, format!("unknown directive {key:?}"))),
        }
    }
    let missing = |k: &str| perr(0, format!("missing '{k}'"));
    Ok(SesSpec {
        sub: sub.ok_or_else(|| missing("sub"))?,
        mid: mid.ok_or_else(|| missing("mid"))?,
        quot: quot.ok_or_else(|| missing("quot"))?,
        inj,
        surj,
    })
}
