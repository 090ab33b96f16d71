//! The dossier text format: everything needed to assemble a pairing matrix.
//!
//! ```text
//! [curve]
//! a = 0, 1, 0, 30, 225
//! s = (0, 15)
//! t = ([-90,0,0,...], [...])
//!
//! [isogeny]
//! case = z3
//! n = 802
//! t = 1
//! dim_s_phi = 0
//!
//! [selmer]
//! generators = 2, 3, 5
//!
//! [lift 1]
//! xi = [1, 0, 0, 0, 0, 0]
//!
//! [local 3]
//! theta = padic(3, 0, 25, 3)
//! point.1 = (-5/2, padic(3, 1, 17, 8))
//! ```
//!
//! Generators are numbered from 1. Comments start with `#`.

use crate::descent::{solve_norm, DescentConfig, NormInstance};
use crate::error::{Error, Result};
use crate::factor::FactorConfig;
use crate::lift::{check_h, lift_mu3, lift_z3, search_norm_mu3, CaseTag, Curve, HPair, TangentData, TowerPoint};
use crate::padic::PadicNumber;
use crate::pairing::{Generator, LocalData, PairingInput};
use crate::points::{refine_point, LocalPoint, SearchBudget};
use crate::tower::{parse_element, parse_rational, TowerElement};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct LiftSpec {
    pub xi: Option<TowerElement>,
    pub b: Option<TowerElement>,
}

#[derive(Debug, Clone)]
pub struct Dossier {
    pub curve: Curve,
    pub case: CaseTag,
    pub n: BigInt,
    pub t: usize,
    pub dim_s_phi: usize,
    pub selmer_dim: Option<usize>,
    pub s: TowerPoint,
    pub t_point: TowerPoint,
    pub generators: Vec<TowerElement>,
    pub lifts: BTreeMap<usize, LiftSpec>,
    pub locals: BTreeMap<BigInt, LocalData>,
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

struct Section {
    line: usize,
    name: String,
    arg: Option<String>,
    entries: Vec<Entry>,
}

fn sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap().trim();
        if s.is_empty() {
            continue;
        }
        if let Some(h) = s.strip_prefix('[').and_then(|h| h.strip_suffix(']')) {
            // section headers never start with a digit, tower elements always do
            if h.trim_start().starts_with(|c: char| c.is_ascii_alphabetic()) {
                let mut it = h.split_whitespace();
                let name = it.next().unwrap().to_ascii_lowercase();
                let arg = it.next().map(str::to_string);
                if it.next().is_some() {
                    return Err(Error::parse(line, "malformed section header"));
                }
                out.push(Section { line, name, arg, entries: Vec::new() });
                continue;
            }
        }
        let (k, v) = s.split_once('=').ok_or_else(|| Error::parse(line, "expected `key = value`"))?;
        let sec = out.last_mut().ok_or_else(|| Error::parse(line, "entry outside a section"))?;
        sec.entries.push(Entry { line, key: k.trim().to_ascii_lowercase(), value: v.trim().to_string() });
    }
    Ok(out)
}

/// Splits on commas that are not nested inside brackets or parentheses.
pub fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn get<'a>(sec: &'a Section, key: &str) -> Option<&'a Entry> {
    sec.entries.iter().find(|e| e.key == key)
}

fn parse_int(s: &str, line: usize) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|_| Error::parse(line, format!("bad integer `{s}`")))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.trim().parse::<usize>().map_err(|_| Error::parse(line, format!("bad count `{s}`")))
}

/// A rational or a bracketed tower element.
pub fn parse_value(s: &str, n: &BigInt, line: usize) -> Result<TowerElement> {
    let s = s.trim();
    if s.starts_with('[') {
        return parse_element(s, n).map_err(|m| Error::parse(line, m));
    }
    parse_rational(s).map(|q| TowerElement::rational(n, q)).ok_or_else(|| Error::parse(line, format!("bad value `{s}`")))
}

fn parse_pair(s: &str, line: usize) -> Result<(String, String)> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .ok_or_else(|| Error::parse(line, "expected `(x, y)`"))?;
    let parts = split_top(inner);
    if parts.len() != 2 {
        return Err(Error::parse(line, "expected two coordinates"));
    }
    Ok((parts[0].clone(), parts[1].clone()))
}

/// `padic(p, v, u, k)`: p^v·u known modulo p^k.
pub fn parse_padic(s: &str, line: usize) -> Result<PadicNumber> {
    let inner = s
        .trim()
        .strip_prefix("padic(")
        .and_then(|x| x.strip_suffix(')'))
        .ok_or_else(|| Error::parse(line, format!("bad p-adic literal `{s}`")))?;
    let parts = split_top(inner);
    if parts.len() != 4 {
        return Err(Error::parse(line, "padic(p, v, u, k) takes four arguments"));
    }
    let p = parse_int(&parts[0], line)?;
    let v: i64 = parts[1].parse().map_err(|_| Error::parse(line, "bad valuation"))?;
    let u = parse_int(&parts[2], line)?;
    let k: i64 = parts[3].parse().map_err(|_| Error::parse(line, "bad precision"))?;
    if k <= v {
        return Err(Error::parse(line, "precision must exceed the valuation"));
    }
    Ok(PadicNumber::new(&p, v, u, (k - v) as u32))
}

/// A p-adic literal or a rational, as an element of Q_p.
fn parse_local_coord(s: &str, p: &BigInt, line: usize) -> Result<PadicNumber> {
    if s.trim().starts_with("padic(") {
        let x = parse_padic(s, line)?;
        if &x.p != p {
            return Err(Error::parse(line, "p-adic literal for the wrong prime"));
        }
        return Ok(x);
    }
    let q = parse_rational(s).ok_or_else(|| Error::parse(line, format!("bad coordinate `{s}`")))?;
    Ok(PadicNumber::from_rational(&q, p, crate::points::POINT_PREC))
}

impl Dossier {
    pub fn parse(text: &str) -> Result<Self> {
        let secs = sections(text)?;
        let find = |name: &str| secs.iter().find(|s| s.name == name);
        let iso = find("isogeny").ok_or_else(|| Error::parse(1, "missing [isogeny] section"))?;

        let e = get(iso, "n").ok_or_else(|| Error::parse(iso.line, "missing n"))?;
        let n = parse_int(&e.value, e.line)?;
        let e = get(iso, "case").ok_or_else(|| Error::parse(iso.line, "missing case"))?;
        let case: CaseTag = e.value.parse().map_err(|m: String| Error::parse(e.line, m))?;
        let t = get(iso, "t").map(|e| parse_usize(&e.value, e.line)).transpose()?.unwrap_or(0);
        if t > 2 {
            return Err(Error::parse(get(iso, "t").unwrap().line, "t must be 0, 1 or 2"));
        }
        let dim_s_phi = get(iso, "dim_s_phi").map(|e| parse_usize(&e.value, e.line)).transpose()?.unwrap_or(0);
        let selmer_dim = get(iso, "selmer_dim").map(|e| parse_usize(&e.value, e.line)).transpose()?;

        let cs = find("curve").ok_or_else(|| Error::parse(1, "missing [curve] section"))?;
        let e = get(cs, "a").ok_or_else(|| Error::parse(cs.line, "missing a"))?;
        let coeffs = split_top(&e.value);
        if coeffs.len() != 5 {
            return Err(Error::parse(e.line, "a needs five coefficients a1, a2, a3, a4, a6"));
        }
        let mut a: Vec<BigRational> = Vec::new();
        for c in &coeffs {
            a.push(parse_rational(c).ok_or_else(|| Error::parse(e.line, format!("bad coefficient `{c}`")))?);
        }
        let curve = Curve::new([a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone(), a[4].clone()]);
        let point = |key: &str| -> Result<TowerPoint> {
            let e = get(cs, key).ok_or_else(|| Error::parse(cs.line, format!("missing {key}")))?;
            let (x, y) = parse_pair(&e.value, e.line)?;
            let pt = TowerPoint { x: parse_value(&x, &n, e.line)?, y: parse_value(&y, &n, e.line)? };
            if !curve.contains(&pt) {
                return Err(Error::parse(e.line, format!("{key} is not on the curve")));
            }
            Ok(pt)
        };
        let s = point("s")?;
        let t_point = point("t")?;

        let mut generators = Vec::new();
        if let Some(sel) = find("selmer") {
            if let Some(e) = get(sel, "generators") {
                for g in split_top(&e.value) {
                    generators.push(parse_value(&g, &n, e.line)?);
                }
            }
        }
        let index = |arg: &Option<String>, line: usize| -> Result<usize> {
            let i = parse_usize(arg.as_deref().ok_or_else(|| Error::parse(line, "missing index"))?, line)?;
            if i == 0 || i > generators.len() {
                return Err(Error::parse(line, format!("generator {i} does not exist")));
            }
            Ok(i - 1)
        };

        let mut lifts = BTreeMap::new();
        let mut locals = BTreeMap::new();
        for sec in &secs {
            match sec.name.as_str() {
                "curve" | "isogeny" | "selmer" => {
                    let known: &[&str] = match sec.name.as_str() {
                        "curve" => &["a", "s", "t"],
                        "isogeny" => &["case", "n", "t", "dim_s_phi", "selmer_dim"],
                        _ => &["generators"],
                    };
                    if let Some(e) = sec.entries.iter().find(|e| !known.contains(&e.key.as_str())) {
                        return Err(Error::parse(e.line, format!("unknown key `{}`", e.key)));
                    }
                }
                "lift" => {
                    let i = index(&sec.arg, sec.line)?;
                    let mut spec = LiftSpec::default();
                    for e in &sec.entries {
                        match e.key.as_str() {
                            "xi" => spec.xi = Some(parse_value(&e.value, &n, e.line)?),
                            "b" => spec.b = Some(parse_value(&e.value, &n, e.line)?),
                            k => return Err(Error::parse(e.line, format!("unknown key `{k}`"))),
                        }
                    }
                    lifts.insert(i, spec);
                }
                "local" => {
                    let p = parse_int(sec.arg.as_deref().ok_or_else(|| Error::parse(sec.line, "missing prime"))?, sec.line)?;
                    let mut data = LocalData::default();
                    for e in &sec.entries {
                        if let Some(idx) = e.key.strip_prefix("point.") {
                            let i = index(&Some(idx.to_string()), e.line)?;
                            let (x, y) = parse_pair(&e.value, e.line)?;
                            let pt = match (parse_rational(&x), parse_rational(&y)) {
                                (Some(xr), Some(yr)) => LocalPoint::rational(&curve, &p, &xr, &yr).map_err(|err| Error::parse(e.line, err.to_string()))?,
                                _ => {
                                    let xp = parse_local_coord(&x, &p, e.line)?;
                                    let yp = parse_local_coord(&y, &p, e.line)?;
                                    refine_point(&curve, &p, &xp, &yp).map_err(|err| Error::parse(e.line, err.to_string()))?
                                }
                            };
                            data.points.insert(i, pt);
                            continue;
                        }
                        match e.key.as_str() {
                            "zeta3" => data.zeta3 = Some(parse_int(&e.value, e.line)?),
                            "theta" => data.theta = Some(parse_local_coord(&e.value, &p, e.line)?),
                            k => return Err(Error::parse(e.line, format!("unknown key `{k}`"))),
                        }
                    }
                    locals.insert(p, data);
                }
                other => return Err(Error::parse(sec.line, format!("unknown section `{other}`"))),
            }
        }
        Ok(Dossier { curve, case, n, t, dim_s_phi, selmer_dim, s, t_point, generators, lifts, locals })
    }

    pub fn selmer_dim(&self) -> usize {
        self.selmer_dim.unwrap_or(self.generators.len())
    }

    /// Lift for generator i: a supplied b (checked), a supplied ξ, or a norm
    /// solution found here.
    pub fn lift(&self, i: usize, factor: &FactorConfig) -> Result<Generator> {
        let a = &self.generators[i];
        let spec = self.lifts.get(&i).cloned().unwrap_or_default();
        let lifted = if let Some(b) = spec.b {
            Generator { pair: HPair { case: self.case, a: a.clone(), b }, xi: spec.xi }
        } else {
            let xi = match spec.xi {
                Some(xi) => xi,
                None => self.solve_xi(a, factor)?,
            };
            let pair = match self.case {
                CaseTag::Mu3Nonsplit => lift_mu3(a, &xi)?,
                CaseTag::Z3Nonsplit => {
                    let q = a.to_rational().ok_or_else(|| Error::Precondition("Z/3Z generators must be rational".into()))?;
                    lift_z3(&q, &xi)?
                }
            };
            Generator { pair, xi: Some(xi) }
        };
        if !check_h(&lifted.pair)? {
            return Err(Error::InvalidTower(format!("lift of generator {} fails the H-conditions", i + 1)));
        }
        Ok(lifted)
    }

    fn solve_xi(&self, a: &TowerElement, factor: &FactorConfig) -> Result<TowerElement> {
        match self.case {
            CaseTag::Z3Nonsplit => {
                let q = a.to_rational().ok_or_else(|| Error::Precondition("Z/3Z generators must be rational".into()))?;
                if !q.is_integer() {
                    return Err(Error::Precondition("generator must be an integer to run the descent".into()));
                }
                let cfg = DescentConfig { factor: factor.clone(), ..DescentConfig::default() };
                let (_, xi) = solve_norm(&NormInstance::new(self.n.clone(), q.to_integer()), &cfg)?;
                Ok(TowerElement::from_l2(&xi))
            }
            CaseTag::Mu3Nonsplit => {
                let (xi, nm) = search_norm_mu3(a, 1).ok_or_else(|| Error::Precondition("no small norm solution; supply xi or b in the dossier".into()))?;
                // N(ξ) = a·c³: divide ξ by c to make the norm exact
                let c3 = nm.div(a)?;
                let c = match crate::tower::cube_class_test_in(&c3, crate::tower::Subfield::L1) {
                    crate::tower::CubeTest::Cube(c) => c,
                    _ => return Err(Error::CubeTestInconclusive),
                };
                xi.div(&c)
            }
        }
    }

    pub fn pairing_input(&self, factor: &FactorConfig, search: SearchBudget) -> Result<PairingInput> {
        let tangents = TangentData::new(self.curve.clone(), self.s.clone(), self.t_point.clone())?;
        let generators = (0..self.generators.len()).map(|i| self.lift(i, factor)).collect::<Result<Vec<_>>>()?;
        Ok(PairingInput {
            case: self.case,
            n: self.n.clone(),
            tangents,
            generators,
            locals: self.locals.clone(),
            factor: factor.clone(),
            search,
            precision: None,
            jobs: 1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_respects_nesting() {
        assert_eq!(split_top("1, [2, 3], (4, padic(5,0,1,2))"), vec!["1", "[2, 3]", "(4, padic(5,0,1,2))"]);
    }

    #[test]
    fn padic_literal() {
        let x = parse_padic("padic(3, 1, 17, 8)", 1).unwrap();
        assert_eq!(x.valuation(), Some(1));
        assert_eq!(x.abs_prec(), 8);
        assert_eq!(x.to_integer_mod(4), Some(BigInt::from(51)));
        assert!(parse_padic("padic(3, 1, 17)", 1).is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "[isogeny]\ncase = z3\nn = 802\n[curve]\na = 0, 1, 0, 30\n";
        match Dossier::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        let text = "[isogeny]\ncase = z3\nn = 802\n[curve]\na = 0, 1, 0, 30, 225\ns = (0, 15)\nt = (0, 16)\n";
        match Dossier::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
    }
}
