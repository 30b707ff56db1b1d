//! Jacobi-Lie bialgebras, their defining identities, and the parametric catalog.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::Multivector;
use crate::lie_core::{LieAlgebra, Side};
use crate::linalg::Matrix;
use crate::scalar::{self, Scalar};
use crate::symexpr::{parse, Context, Expr};

/// `((g, phi0), (g*, X0))` with `X0 = alpha^i X_i`, `phi0 = beta_i X~^i`.
/// `g_dual.f(j, k, i)` is `f~^jk_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiLieBialgebra {
    pub label: String,
    pub g: LieAlgebra,
    pub g_dual: LieAlgebra,
    pub alpha: Vec<Scalar>,
    pub beta: Vec<Scalar>,
}

impl JacobiLieBialgebra {
    pub fn new(label: impl Into<String>, g: LieAlgebra, g_dual: LieAlgebra, alpha: Vec<Scalar>, beta: Vec<Scalar>) -> Result<Self> {
        let d = g.dim();
        if g_dual.dim() != d || alpha.len() != d || beta.len() != d {
            return Err(Error::Structural("inconsistent bialgebra dimensions".into()));
        }
        Ok(JacobiLieBialgebra { label: label.into(), g, g_dual, alpha, beta })
    }

    /// An ordinary Lie algebra as a degenerate bialgebra.
    pub fn trivial(g: LieAlgebra) -> Self {
        let d = g.dim();
        JacobiLieBialgebra {
            label: format!("(({},0),(I,0))", g.name()),
            g_dual: LieAlgebra::abelian("abelian", d),
            g,
            alpha: vec![Scalar::zero(); d],
            beta: vec![Scalar::zero(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn x0(&self) -> Multivector {
        Multivector::vector(Side::Primal, &self.alpha)
    }

    pub fn phi0(&self) -> Multivector {
        Multivector::vector(Side::Dual, &self.beta)
    }

    /// Exchanges the roles of `g` and `g*` (and of `alpha` and `beta`).
    pub fn swapped(&self) -> Self {
        JacobiLieBialgebra {
            label: self.label.clone(),
            g: self.g_dual.clone(),
            g_dual: self.g.clone(),
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
        }
    }

    /// The bialgebra as seen from `side`: the dual side is the swapped one.
    pub fn oriented(&self, side: Side) -> Self {
        match side {
            Side::Primal => self.clone(),
            Side::Dual => self.swapped(),
        }
    }
}

/// Maximum absolute residual of each mixed-cocycle identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualReport {
    pub mixed_cocycle: Scalar,
    pub pairing: Scalar,
    pub compat: Scalar,
    pub x0_cocycle: Scalar,
    pub phi0_cocycle: Scalar,
}

impl ResidualReport {
    pub fn is_valid(&self) -> bool {
        self.all().iter().all(|v| v.is_zero())
    }

    fn all(&self) -> [&Scalar; 5] {
        [&self.mixed_cocycle, &self.pairing, &self.compat, &self.x0_cocycle, &self.phi0_cocycle]
    }

    pub fn max(&self) -> Scalar {
        scalar::max_abs(self.all())
    }
}

impl Serialize for ResidualReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<&str, String> = [
            ("mixed_cocycle", &self.mixed_cocycle),
            ("pairing", &self.pairing),
            ("compat", &self.compat),
            ("x0_cocycle", &self.x0_cocycle),
            ("phi0_cocycle", &self.phi0_cocycle),
        ]
        .into_iter()
        .map(|(k, v)| (k, scalar::fmt(v)))
        .collect();
        m.serialize(s)
    }
}

fn upd(worst: &mut Scalar, v: Scalar) {
    let a = v.abs();
    if a > *worst {
        *worst = a;
    }
}

/// Evaluates the five structure-constant identities of a Jacobi-Lie bialgebra.
pub fn verify_bialgebra_conditions(b: &JacobiLieBialgebra) -> ResidualReport {
    let d = b.dim();
    let f = |i, j, k| b.g.f(i, j, k);
    let ft = |i, j, k| b.g_dual.f(i, j, k);
    let (al, be) = (&b.alpha, &b.beta);
    let delta = |i: usize, j: usize| i == j;
    // A_i^m = alpha^k f_ik^m
    let a = |i: usize, m: usize| -> Scalar { (0..d).map(|k| &al[k] * f(i, k, m)).sum() };
    let mut mixed = Scalar::zero();
    for i in 0..d {
        for j in 0..d {
            for m in 0..d {
                for n in 0..d {
                    let mut e = Scalar::zero();
                    for k in 0..d {
                        e += f(i, j, k) * ft(m, n, k) - f(i, k, m) * ft(k, n, j) - f(i, k, n) * ft(m, k, j)
                            - f(k, j, m) * ft(k, n, i)
                            - f(k, j, n) * ft(m, k, i);
                    }
                    e += &be[i] * ft(m, n, j) - &be[j] * ft(m, n, i) + &al[m] * f(i, j, n) - &al[n] * f(i, j, m);
                    if delta(j, n) {
                        e += a(i, m) - &al[m] * &be[i];
                    }
                    if delta(i, n) {
                        e -= a(j, m) - &al[m] * &be[j];
                    }
                    if delta(j, m) {
                        e -= a(i, n) - &al[n] * &be[i];
                    }
                    if delta(i, m) {
                        e += a(j, n) - &al[n] * &be[j];
                    }
                    upd(&mut mixed, e);
                }
            }
        }
    }
    let pairing: Scalar = (0..d).map(|i| &al[i] * &be[i]).sum::<Scalar>().abs();
    let mut compat = Scalar::zero();
    for i in 0..d {
        for m in 0..d {
            upd(&mut compat, (0..d).map(|n| &al[n] * f(n, i, m) - &be[n] * ft(n, m, i)).sum());
        }
    }
    let (mut c30, mut c31) = (Scalar::zero(), Scalar::zero());
    for m in 0..d {
        for n in 0..d {
            upd(&mut c30, (0..d).map(|i| &al[i] * ft(m, n, i)).sum());
            upd(&mut c31, (0..d).map(|i| &be[i] * f(m, n, i)).sum());
        }
    }
    ResidualReport { mixed_cocycle: mixed, pairing, compat, x0_cocycle: c30, phi0_cocycle: c31 }
}

/// A constraint on a realization parameter, e.g. `a>0` or `a!=1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Gt(Scalar),
    Ge(Scalar),
    Lt(Scalar),
    Le(Scalar),
    Ne(Scalar),
}

impl Constraint {
    fn parse(src: &str, sym: &str) -> Result<Constraint> {
        let s = src.trim();
        let rest = s
            .strip_prefix(sym)
            .ok_or_else(|| Error::Parse { col: 0, msg: format!("constraint `{s}` does not mention `{sym}`") })?;
        for (op, mk) in [
            ("!=", Constraint::Ne as fn(Scalar) -> Constraint),
            (">=", Constraint::Ge),
            ("<=", Constraint::Le),
            (">", Constraint::Gt),
            ("<", Constraint::Lt),
        ] {
            if let Some(v) = rest.strip_prefix(op) {
                return Ok(mk(scalar::parse_rational(v)?));
            }
        }
        Err(Error::Parse { col: 0, msg: format!("bad constraint `{s}`") })
    }

    /// Holds with at least `margin` to spare.
    pub fn holds(&self, v: &Scalar, margin: &Scalar) -> bool {
        match self {
            Constraint::Gt(c) => v - c >= *margin,
            Constraint::Ge(c) => v >= c,
            Constraint::Lt(c) => c - v >= *margin,
            Constraint::Le(c) => v <= c,
            Constraint::Ne(c) => (v - c).abs() >= *margin,
        }
    }
}

/// A catalog algebra, possibly depending on one realization parameter.
#[derive(Clone, Debug)]
pub struct AlgebraTemplate {
    pub name: String,
    pub dim: usize,
    pub param: Option<String>,
    pub constraints: Vec<Constraint>,
    entries: Vec<(usize, usize, usize, Expr)>,
}

impl AlgebraTemplate {
    pub fn instantiate(&self, value: Option<&Scalar>) -> Result<LieAlgebra> {
        let env = |n: &str| -> Option<Scalar> {
            match (&self.param, value) {
                (Some(p), Some(v)) if p == n => Some(v.clone()),
                _ => None,
            }
        };
        let mut ents = Vec::new();
        for (i, j, k, e) in &self.entries {
            let v = e.eval_rational(&env, None).map_err(|err| err.context(format!("algebra {}", self.name)))?;
            ents.push((*i, *j, *k, v));
        }
        LieAlgebra::from_brackets(self.name.clone(), self.dim, &ents)
    }
}

#[derive(Clone, Debug, Default)]
pub struct AlgebraCatalog {
    pub algebras: Vec<AlgebraTemplate>,
}

impl AlgebraCatalog {
    pub fn get(&self, name: &str) -> Option<&AlgebraTemplate> {
        self.algebras.iter().find(|a| a.name == name)
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn line_err(n: usize, e: Error) -> Error {
    e.context(format!("line {}", n + 1))
}

pub fn load_algebras(text: &str) -> Result<AlgebraCatalog> {
    let mut cat = AlgebraCatalog::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "algebra" => {
                let (Some(name), Some(dim)) = (toks.get(1), toks.get(2).and_then(|s| s.strip_prefix("dim="))) else {
                    return Err(line_err(ln, Error::Parse { col: 0, msg: "expected `algebra <name> dim=<d>`".into() }));
                };
                let dim = dim.parse().map_err(|_| line_err(ln, Error::Parse { col: 0, msg: "bad dim".into() }))?;
                cat.algebras.push(AlgebraTemplate { name: name.to_string(), dim, param: None, constraints: vec![], entries: vec![] });
            }
            "param" | "f" => {
                let cur = cat
                    .algebras
                    .last_mut()
                    .ok_or_else(|| line_err(ln, Error::Parse { col: 0, msg: "entry before any algebra".into() }))?;
                if toks[0] == "param" {
                    let sym = toks.get(1).ok_or_else(|| line_err(ln, Error::Parse { col: 0, msg: "missing symbol".into() }))?;
                    cur.param = Some(sym.to_string());
                    if let Some(c) = toks.get(2).and_then(|s| s.strip_prefix("constraint=")) {
                        for part in c.split(',').filter(|p| !p.trim().is_empty()) {
                            cur.constraints.push(Constraint::parse(part, sym).map_err(|e| line_err(ln, e))?);
                        }
                    }
                } else {
                    if toks.len() < 5 {
                        return Err(line_err(ln, Error::Parse { col: 0, msg: "expected `f i j k value`".into() }));
                    }
                    let ix = |s: &str| -> Result<usize> {
                        let v: usize = s.parse().map_err(|_| Error::Parse { col: 0, msg: format!("bad index `{s}`") })?;
                        if v == 0 || v > cur.dim {
                            return Err(Error::Parse { col: 0, msg: format!("index {v} out of range") });
                        }
                        Ok(v - 1)
                    };
                    let (i, j, k) = (ix(toks[1]).map_err(|e| line_err(ln, e))?, ix(toks[2]).map_err(|e| line_err(ln, e))?, ix(toks[3]).map_err(|e| line_err(ln, e))?);
                    let params: Vec<String> = cur.param.iter().cloned().collect();
                    let ctx = Context { vars: vec![], params };
                    let e = parse(&toks[4..].join(" "), &ctx).map_err(|e| line_err(ln, e))?;
                    cur.entries.push((i, j, k, e));
                }
            }
            other => return Err(line_err(ln, Error::Parse { col: 0, msg: format!("unknown record `{other}`") })),
        }
    }
    Ok(cat)
}

/// `Name` or `Name(sym)`: an algebra with its parameter bound to a row symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraRef {
    pub name: String,
    pub arg: Option<String>,
}

impl AlgebraRef {
    fn parse(s: &str) -> Result<AlgebraRef> {
        match s.split_once('(') {
            Some((n, rest)) => {
                let arg = rest.strip_suffix(')').ok_or_else(|| Error::Parse { col: 0, msg: format!("bad algebra reference `{s}`") })?;
                Ok(AlgebraRef { name: n.to_string(), arg: Some(arg.to_string()) })
            }
            None => Ok(AlgebraRef { name: s.to_string(), arg: None }),
        }
    }
}

/// `coef i j [k]` terms of a multivector template (1-based indices in the file).
pub type MonomialList = Vec<(Expr, Vec<usize>)>;

/// One catalog row with unbound parameters.
#[derive(Clone, Debug)]
pub struct ParametricEntry {
    pub label: String,
    pub family: String,
    pub primal: AlgebraRef,
    pub dual: AlgebraRef,
    pub params: Vec<String>,
    /// Free parameters of the printed r-matrix families.
    pub free: Vec<String>,
    pub alpha: Vec<Expr>,
    pub beta: Vec<Expr>,
    pub r: Option<MonomialList>,
    pub r_dual: Option<MonomialList>,
    pub residue: Option<MonomialList>,
    pub residue_dual: Option<MonomialList>,
    pub excluded: Vec<(String, Scalar)>,
    pub constraints: Vec<(String, Constraint)>,
}

/// A catalog row at concrete parameter values.
#[derive(Clone, Debug)]
pub struct Instance {
    pub bialg: JacobiLieBialgebra,
    pub bindings: BTreeMap<String, Scalar>,
    pub r: Option<Matrix>,
    pub r_dual: Option<Matrix>,
    pub residue: Option<Multivector>,
    pub residue_dual: Option<Multivector>,
}

impl Instance {
    pub fn r_on(&self, side: Side) -> Option<&Matrix> {
        match side {
            Side::Primal => self.r.as_ref(),
            Side::Dual => self.r_dual.as_ref(),
        }
    }

    pub fn residue_on(&self, side: Side) -> Option<&Multivector> {
        match side {
            Side::Primal => self.residue.as_ref(),
            Side::Dual => self.residue_dual.as_ref(),
        }
    }
}

/// Keeps sampled values and denominators at least this far from singular values.
pub fn default_margin() -> Scalar {
    scalar::q(1, 8)
}

impl ParametricEntry {
    pub fn context(&self) -> Context {
        Context { vars: vec![], params: self.params.iter().chain(&self.free).cloned().collect() }
    }

    pub fn r_template(&self, side: Side) -> Option<&MonomialList> {
        match side {
            Side::Primal => self.r.as_ref(),
            Side::Dual => self.r_dual.as_ref(),
        }
    }

    /// Whether `bindings` satisfies all constraints and exclusions with `margin` to spare.
    pub fn admissible(&self, bindings: &BTreeMap<String, Scalar>, margin: &Scalar) -> bool {
        self.constraints.iter().all(|(s, c)| bindings.get(s).is_none_or(|v| c.holds(v, margin)))
            && self.excluded.iter().all(|(s, x)| bindings.get(s).is_none_or(|v| (v - x).abs() >= *margin))
    }

    /// Binds parameters (free parameters default to 0). Denominators smaller than `margin` are rejected.
    pub fn instantiate(&self, cat: &AlgebraCatalog, bindings: &BTreeMap<String, Scalar>, margin: Option<&Scalar>) -> Result<Instance> {
        let mut b = bindings.clone();
        for f in &self.free {
            b.entry(f.clone()).or_insert_with(Scalar::zero);
        }
        for p in &self.params {
            if !b.contains_key(p) {
                return Err(Error::Structural(format!("parameter `{p}` of {} is unbound", self.label)));
            }
        }
        let env = |n: &str| b.get(n).cloned();
        let ev = |e: &Expr| e.eval_rational(&env, margin).map_err(|err| err.context(self.label.clone()));
        let resolve = |r: &AlgebraRef| -> Result<LieAlgebra> {
            let t = cat.get(&r.name).ok_or_else(|| Error::UnknownName(r.name.clone()))?;
            let v = match (&t.param, &r.arg) {
                (None, None) => None,
                (Some(_), Some(a)) => Some(b.get(a).ok_or_else(|| Error::UnknownName(a.clone()))?),
                _ => return Err(Error::Structural(format!("parameter mismatch for algebra reference {}", r.name))),
            };
            t.instantiate(v)
        };
        let g = resolve(&self.primal)?;
        let gd = resolve(&self.dual)?;
        let d = g.dim();
        let alpha = self.alpha.iter().map(ev).collect::<Result<Vec<_>>>()?;
        let beta = self.beta.iter().map(ev).collect::<Result<Vec<_>>>()?;
        let bialg = JacobiLieBialgebra::new(self.label.clone(), g, gd, alpha, beta)?;
        let mat = |ml: &MonomialList| -> Result<Matrix> {
            let mut m = Matrix::zeros(d, d);
            for (c, ij) in ml {
                let v = ev(c)?;
                let (i, j) = (ij[0], ij[1]);
                let a = m.get(i, j) + &v;
                m.set(i, j, a.clone());
                m.set(j, i, -a);
            }
            Ok(m)
        };
        let mv = |ml: &MonomialList, side: Side| -> Result<Multivector> {
            let deg = ml.first().map_or(3, |t| t.1.len());
            let mut m = Multivector::zero(d, side, deg);
            for (c, idx) in ml {
                m.add_term(idx, ev(c)?);
            }
            Ok(m)
        };
        Ok(Instance {
            r: self.r.as_ref().map(mat).transpose()?,
            r_dual: self.r_dual.as_ref().map(mat).transpose()?,
            residue: self.residue.as_ref().map(|m| mv(m, Side::Primal)).transpose()?,
            residue_dual: self.residue_dual.as_ref().map(|m| mv(m, Side::Dual)).transpose()?,
            bialg,
            bindings: b,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    pub algebras: AlgebraCatalog,
    pub entries: Vec<ParametricEntry>,
}

impl Catalog {
    pub fn builtin() -> Result<Catalog> {
        let algebras = load_algebras(crate::data::ALGEBRAS)?;
        let entries = load_catalog(crate::data::BIALGEBRAS, &algebras)?;
        Ok(Catalog { algebras, entries })
    }

    pub fn entry(&self, label: &str) -> Result<&ParametricEntry> {
        self.entries.iter().find(|e| e.label == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

fn parse_monomials(src: &str, ctx: &Context, dim: usize) -> Result<MonomialList> {
    let s = src.trim();
    if s == "0" || s.is_empty() {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    for part in s.split(';') {
        let toks: Vec<&str> = part.split_whitespace().collect();
        let nidx = toks.iter().rev().take_while(|t| t.chars().all(|c| c.is_ascii_digit())).count().min(toks.len() - 1);
        if nidx == 0 {
            return Err(Error::Parse { col: 0, msg: format!("monomial `{part}` has no indices") });
        }
        let mut idx = Vec::new();
        for t in &toks[toks.len() - nidx..] {
            let v: usize = t.parse().unwrap();
            if v == 0 || v > dim {
                return Err(Error::Parse { col: 0, msg: format!("index {v} out of range in `{part}`") });
            }
            idx.push(v - 1);
        }
        let coef = parse(&toks[..toks.len() - nidx].join(" "), ctx)?;
        out.push((coef, idx));
    }
    Ok(out)
}

/// Parses bialgebra records, cross-referencing algebra names.
pub fn load_catalog(text: &str, algebras: &AlgebraCatalog) -> Result<Vec<ParametricEntry>> {
    let mut recs: Vec<(usize, String, BTreeMap<String, String>)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(label) = line.strip_prefix("bialgebra ") {
            recs.push((ln, label.trim().to_string(), BTreeMap::new()));
            continue;
        }
        let cur = recs.last_mut().ok_or_else(|| line_err(ln, Error::Parse { col: 0, msg: "key before any record".into() }))?;
        let kvs: Vec<&str> = if line.starts_with("primal=") { line.split_whitespace().collect() } else { vec![line] };
        for kv in kvs {
            let (k, v) = kv.split_once('=').ok_or_else(|| line_err(ln, Error::Parse { col: 0, msg: format!("expected key=value, got `{kv}`") }))?;
            cur.2.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let mut out = Vec::new();
    for (ln, label, kv) in recs {
        let wrap = |e: Error| e.context(format!("record `{label}` (line {})", ln + 1));
        let get = |k: &str| kv.get(k).map(String::as_str);
        let need = |k: &str| get(k).ok_or_else(|| wrap(Error::Parse { col: 0, msg: format!("missing `{k}`") }));
        let list = |k: &str| -> Vec<String> {
            get(k).map(|s| s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()).unwrap_or_default()
        };
        let primal = AlgebraRef::parse(need("primal")?).map_err(wrap)?;
        let dual = AlgebraRef::parse(need("dual")?).map_err(wrap)?;
        let params = list("params");
        let free = list("free");
        let mut constraints = Vec::new();
        let mut dim = None;
        for r in [&primal, &dual] {
            let t = algebras.get(&r.name).ok_or_else(|| wrap(Error::UnknownName(r.name.clone())))?;
            if *dim.get_or_insert(t.dim) != t.dim {
                return Err(wrap(Error::Structural("primal and dual dimensions differ".into())));
            }
            match (&t.param, &r.arg) {
                (Some(_), Some(a)) => {
                    if !params.contains(a) {
                        return Err(wrap(Error::UnknownName(a.clone())));
                    }
                    constraints.extend(t.constraints.iter().map(|c| (a.clone(), c.clone())));
                }
                (None, None) => {}
                _ => return Err(wrap(Error::Structural(format!("parameter mismatch for {}", r.name)))),
            }
        }
        let dim = dim.unwrap();
        let ctx = Context { vars: vec![], params: params.iter().chain(&free).cloned().collect() };
        let vec_of = |k: &str| -> Result<Vec<Expr>> {
            let v = list(k);
            if v.len() != dim {
                return Err(wrap(Error::Parse { col: 0, msg: format!("`{k}` needs {dim} entries") }));
            }
            v.iter().map(|s| parse(s, &ctx).map_err(wrap)).collect()
        };
        let mono = |k: &str, deg: usize| -> Result<Option<MonomialList>> {
            let Some(s) = get(k) else { return Ok(None) };
            let m = parse_monomials(s, &ctx, dim).map_err(wrap)?;
            if m.iter().any(|t| t.1.len() != deg) {
                return Err(wrap(Error::Parse { col: 0, msg: format!("`{k}` terms must have {deg} indices") }));
            }
            Ok(Some(m))
        };
        let mut excluded = Vec::new();
        for item in list("excluded") {
            let (s, v) = item.split_once('=').ok_or_else(|| wrap(Error::Parse { col: 0, msg: format!("bad exclusion `{item}`") }))?;
            if !params.iter().any(|p| p == s.trim()) {
                return Err(wrap(Error::UnknownName(s.trim().to_string())));
            }
            excluded.push((s.trim().to_string(), scalar::parse_rational(v).map_err(wrap)?));
        }
        out.push(ParametricEntry {
            family: get("family").unwrap_or("").to_string(),
            alpha: vec_of("alpha")?,
            beta: vec_of("beta")?,
            r: mono("r", 2)?,
            r_dual: mono("rdual", 2)?,
            residue: mono("residue", 3)?,
            residue_dual: mono("residue_dual", 3)?,
            label,
            primal,
            dual,
            params,
            free,
            excluded,
            constraints,
        });
    }
    Ok(out)
}

fn sample_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let den: i64 = rng.gen_range(1..=12);
    let num: i64 = rng.gen_range(-3 * den..=3 * den);
    scalar::q(num, den)
}

/// Deterministic admissible bindings (table and free parameters) and their instances.
pub fn sample_parameters(e: &ParametricEntry, cat: &AlgebraCatalog, count: usize, seed: u64) -> Result<Vec<Instance>> {
    if count == 0 {
        return Err(Error::Structural("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = default_margin();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 20_000 {
            return Err(Error::EmptyAdmissible(e.label.clone()));
        }
        let mut b = BTreeMap::new();
        for p in e.params.iter().chain(&e.free) {
            b.insert(p.clone(), sample_rational(&mut rng));
        }
        if !e.admissible(&b, &margin) {
            continue;
        }
        match e.instantiate(cat, &b, Some(&margin)) {
            Ok(inst) => out.push(inst),
            Err(err) if is_singular(&err) => continue,
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}

fn is_singular(e: &Error) -> bool {
    match e {
        Error::DivisionByZero(_) => true,
        Error::Context { source, .. } => is_singular(source),
        _ => false,
    }
}
