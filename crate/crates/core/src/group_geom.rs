//! Group charts `g = exp(x X1) exp(y X2) [exp(z X3)]`, their invariant vector fields
//! and the multiplicative function `sigma`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expoly::{self, ExpPoly};
use crate::lie_core::LieAlgebra;
use crate::numeric::{rel_err, Point};
use crate::scalar::{self, Scalar};
use crate::symexpr::{parse, Context, Expr};

/// Components `V^mu` of a vector field on a chart.
pub type VectorField = Vec<Expr>;

#[derive(Clone, Debug, PartialEq)]
pub struct GroupChart {
    pub name: String,
    pub coords: Vec<String>,
    pub params: Vec<String>,
    /// `xl[i][mu] = X_i^{L,mu}`.
    pub xl: Vec<VectorField>,
    pub xr: Vec<VectorField>,
}

impl GroupChart {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn context(&self) -> Context {
        Context { vars: self.coords.clone(), params: self.params.clone() }
    }

    /// Substitutes exact parameter values into every field component.
    pub fn bind_params(&self, values: &BTreeMap<String, Scalar>) -> GroupChart {
        let b = |fs: &Vec<VectorField>| fs.iter().map(|v| v.iter().map(|e| e.bind_params(values)).collect()).collect();
        GroupChart {
            name: self.name.clone(),
            coords: self.coords.clone(),
            params: self.params.iter().filter(|p| !values.contains_key(*p)).cloned().collect(),
            xl: b(&self.xl),
            xr: b(&self.xr),
        }
    }
}

pub fn load_charts(text: &str) -> Result<Vec<GroupChart>> {
    let mut out: Vec<GroupChart> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let wrap = |e: Error| e.context(format!("charts line {}", ln + 1));
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "chart" => {
                let name = toks.get(1).ok_or_else(|| wrap(Error::Parse { col: 0, msg: "missing chart name".into() }))?;
                let mut coords = Vec::new();
                let mut params = Vec::new();
                for t in &toks[2..] {
                    if let Some(c) = t.strip_prefix("coords=") {
                        coords = c.split(',').map(str::to_string).collect();
                    } else if let Some(p) = t.strip_prefix("params=") {
                        params = p.split(['|', ',']).map(str::to_string).collect();
                    } else {
                        return Err(wrap(Error::Parse { col: 0, msg: format!("unknown chart attribute `{t}`") }));
                    }
                }
                if coords.is_empty() {
                    return Err(wrap(Error::Parse { col: 0, msg: "chart without coords".into() }));
                }
                let d = coords.len();
                out.push(GroupChart { name: name.to_string(), coords, params, xl: vec![vec![]; d], xr: vec![vec![]; d] });
            }
            "XL" | "XR" => {
                let cur = out.last_mut().ok_or_else(|| wrap(Error::Parse { col: 0, msg: "field before chart".into() }))?;
                let i: usize = toks
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .filter(|&i| i >= 1 && i <= cur.coords.len())
                    .ok_or_else(|| wrap(Error::Parse { col: 0, msg: "bad basis index".into() }))?;
                let rest = line.splitn(3, char::is_whitespace).nth(2).unwrap_or("");
                let ctx = cur.context();
                let comps: Vec<Expr> = rest
                    .split(';')
                    .map(|s| parse(s, &ctx).map_err(|e| wrap(e.context(format!("{} {} {i}", cur.name, toks[0])))))
                    .collect::<Result<_>>()?;
                if comps.len() != cur.coords.len() {
                    return Err(wrap(Error::Parse { col: 0, msg: "wrong number of components".into() }));
                }
                if toks[0] == "XL" {
                    cur.xl[i - 1] = comps;
                } else {
                    cur.xr[i - 1] = comps;
                }
            }
            other => return Err(wrap(Error::Parse { col: 0, msg: format!("unknown record `{other}`") })),
        }
    }
    for c in &out {
        if c.xl.iter().chain(&c.xr).any(|v| v.is_empty()) {
            return Err(Error::Parse { col: 0, msg: format!("chart {} is missing fields", c.name) });
        }
    }
    Ok(out)
}

pub fn builtin_charts() -> Result<Vec<GroupChart>> {
    load_charts(crate::data::CHARTS)
}

/// `[A,B]^mu = A^nu d_nu B^mu - B^nu d_nu A^mu`.
pub fn vf_commutator(chart: &GroupChart, a: &[Expr], b: &[Expr]) -> VectorField {
    (0..chart.dim())
        .map(|mu| {
            let mut terms = Vec::new();
            for (nu, x) in chart.coords.iter().enumerate() {
                terms.push(a[nu].clone() * b[mu].diff(x));
                terms.push(-(b[nu].clone() * a[mu].diff(x)));
            }
            Expr::add(terms)
        })
        .collect()
}

fn eval_at(e: &Expr, p: &Point) -> Result<f64> {
    e.eval_with(&|n| p.get(n).copied())
}

/// Maximum deviation of `XL_i(0)`, `XR_i(0)` from `e_i` (parameters must be bound).
pub fn identity_defect(chart: &GroupChart) -> Result<f64> {
    let origin: Point = chart.coords.iter().map(|c| (c.clone(), 0.0)).collect();
    let mut worst = 0.0f64;
    for fields in [&chart.xl, &chart.xr] {
        for (i, v) in fields.iter().enumerate() {
            for (mu, e) in v.iter().enumerate() {
                let want = if i == mu { 1.0 } else { 0.0 };
                worst = worst.max((eval_at(e, &origin)? - want).abs());
            }
        }
    }
    Ok(worst)
}

/// Maximum relative violation of `[XL_i,XL_j] = f_ij^k XL_k` and `[XR_i,XR_j] = -f_ij^k XR_k`.
pub fn closure_defect(chart: &GroupChart, g: &LieAlgebra, points: &[Point]) -> Result<f64> {
    let d = chart.dim();
    if g.dim() != d {
        return Err(Error::Structural("chart and algebra dimensions differ".into()));
    }
    let mut worst = 0.0f64;
    for (fields, sign) in [(&chart.xl, 1i64), (&chart.xr, -1)] {
        for i in 0..d {
            for j in i + 1..d {
                let lhs = vf_commutator(chart, &fields[i], &fields[j]);
                let rhs: VectorField = (0..d)
                    .map(|mu| {
                        Expr::add(
                            (0..d)
                                .filter(|&k| !g.f(i, j, k).is_zero())
                                .map(|k| Expr::Num(g.f(i, j, k) * scalar::int(sign)) * fields[k][mu].clone())
                                .collect(),
                        )
                    })
                    .collect();
                for p in points {
                    for mu in 0..d {
                        worst = worst.max(rel_err(eval_at(&lhs[mu], p)?, eval_at(&rhs[mu], p)?));
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// `sigma = x^mu int_0^1 c_i L^i_mu(t x) dt`, with `L = (XL^t)^{-1}` the left-invariant forms
/// and `c` the cocycle covector. Parameters must already be bound.
pub fn sigma_function(chart: &GroupChart, covector: &[Scalar]) -> Result<Expr> {
    let d = chart.dim();
    if covector.len() != d {
        return Err(Error::Structural("covector length differs from chart dimension".into()));
    }
    let wrap = |e: Error| e.context(format!("sigma on chart {}", chart.name));
    // m[mu][i] = XL_i^mu, i.e. XL^t; its inverse has entries L^i_mu at [i][mu].
    let mt: Vec<Vec<ExpPoly>> = (0..d)
        .map(|mu| (0..d).map(|i| ExpPoly::from_expr(&chart.xl[i][mu], &chart.coords)).collect::<Result<_>>())
        .collect::<Result<_>>()
        .map_err(wrap)?;
    let l = expoly::invert(&mt).map_err(wrap)?;
    let mut total = ExpPoly::zero(d);
    for mu in 0..d {
        let mut g = ExpPoly::zero(d);
        for (i, c) in covector.iter().enumerate() {
            if !c.is_zero() {
                g = g.add(&l[i][mu].scale(&num_complex::Complex::new(c.clone(), Scalar::zero())));
            }
        }
        let integral = g.integrate_scaled().map_err(|e| wrap(Error::Unsupported(format!("{e}"))))?;
        total = total.add(&integral.mul(&ExpPoly::coordinate(d, mu)));
    }
    total.to_expr(&chart.coords).map_err(wrap)
}

/// Closed forms of `exp(s X_i)` in the adjoint representation, in the variable `s`,
/// for a few representative algebras. Row `j` holds the coefficients of `X_k`.
pub fn closed_exponentials(name: &str) -> Option<Vec<Vec<Vec<Expr>>>> {
    let rows: Vec<Vec<&str>> = match name {
        "A2" => vec![vec!["1", "0", "-s", "1"], vec!["exp(s)", "0", "0", "1"]],
        "II" => vec![
            vec!["1", "0", "0", "0", "1", "0", "0", "0", "1"],
            vec!["1", "0", "0", "0", "1", "0", "-s", "0", "1"],
            vec!["1", "0", "0", "s", "1", "0", "0", "0", "1"],
        ],
        "V" => vec![
            vec!["1", "0", "0", "0", "exp(s)", "0", "0", "0", "exp(s)"],
            vec!["1", "-s", "0", "0", "1", "0", "0", "0", "1"],
            vec!["1", "0", "-s", "0", "1", "0", "0", "0", "1"],
        ],
        "VI_0" => vec![
            vec!["1", "0", "0", "0", "1", "0", "0", "-s", "1"],
            vec!["1", "0", "0", "0", "1", "0", "-s", "0", "1"],
            vec!["cosh(s)", "sinh(s)", "0", "sinh(s)", "cosh(s)", "0", "0", "0", "1"],
        ],
        "VI_a" => vec![
            vec!["1", "0", "0", "0", "exp(a*s)*cosh(s)", "exp(a*s)*sinh(s)", "0", "exp(a*s)*sinh(s)", "exp(a*s)*cosh(s)"],
            vec!["1", "-a*s", "-s", "0", "1", "0", "0", "0", "1"],
            vec!["1", "-s", "-a*s", "0", "1", "0", "0", "0", "1"],
        ],
        _ => return None,
    };
    let ctx = Context::new(&["s"], &["a"]);
    let d = if rows[0].len() == 4 { 2 } else { 3 };
    Some(
        rows.into_iter()
            .map(|m| (0..d).map(|j| (0..d).map(|k| parse(m[j * d + k], &ctx).expect("static exponential")).collect()).collect())
            .collect(),
    )
}

/// Maximum deviation of `d/ds exp(s X_i)|_0` from the adjoint matrices (parameters bound).
pub fn exponential_defect(g: &LieAlgebra, exps: &[Vec<Vec<Expr>>]) -> Result<f64> {
    let ad = g.adjoint();
    let mut worst = 0.0f64;
    for (i, m) in exps.iter().enumerate() {
        for (j, row) in m.iter().enumerate() {
            for (k, e) in row.iter().enumerate() {
                let v = e.diff("s").eval_with(&|n| (n == "s").then_some(0.0))?;
                worst = worst.max((v - scalar::to_f64(ad.x[i].get(j, k))).abs());
                let v0 = e.eval_with(&|n| (n == "s").then_some(0.0))?;
                worst = worst.max((v0 - if j == k { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    Ok(worst)
}

/// Rebuilds the invariant fields from closed exponentials `exp(s X_i)` (parameters bound):
/// left forms `g^-1 dg`, right forms `dg g^-1`, each inverted exactly.
pub fn fields_from_exponentials(g: &LieAlgebra, exps: &[Vec<Vec<Expr>>], coords: &[String]) -> Result<GroupChart> {
    let d = g.dim();
    if exps.len() != d || coords.len() != d {
        return Err(Error::Structural("one exponential and one coordinate per generator required".into()));
    }
    if exponential_defect(g, exps)? > 1e-12 {
        return Err(Error::Structural("supplied exponentials do not match the adjoint matrices".into()));
    }
    let at = |i: usize, sign: i64| -> Result<Vec<Vec<ExpPoly>>> {
        let by = Expr::int(sign) * Expr::var(&coords[i]);
        exps[i].iter().map(|row| row.iter().map(|e| ExpPoly::from_expr(&e.subst_var("s", &by), coords)).collect()).collect()
    };
    let matmul = |a: &Vec<ExpPoly>, m: &Vec<Vec<ExpPoly>>| -> Vec<ExpPoly> {
        (0..d).map(|k| (0..d).fold(ExpPoly::zero(d), |acc, j| acc.add(&a[j].mul(&m[j][k])))).collect()
    };
    let unit = |mu: usize| -> Vec<ExpPoly> {
        (0..d).map(|k| ExpPoly::constant(d, if k == mu { Scalar::from_integer(1.into()) } else { Scalar::zero() })).collect()
    };
    // Left: row mu is e_mu A_{mu+1}(x_{mu+1}) ... A_d(x_d).
    let mut left = Vec::new();
    let mut right = Vec::new();
    for mu in 0..d {
        let mut v = unit(mu);
        for i in mu + 1..d {
            v = matmul(&v, &at(i, 1)?);
        }
        left.push(v);
        let mut w = unit(mu);
        for i in (0..mu).rev() {
            w = matmul(&w, &at(i, -1)?);
        }
        right.push(w);
    }
    let to_fields = |forms: Vec<Vec<ExpPoly>>| -> Result<Vec<VectorField>> {
        let inv = expoly::invert(&forms)?;
        inv.iter().map(|row| row.iter().map(|p| p.to_expr(coords)).collect()).collect()
    };
    Ok(GroupChart {
        name: g.name().to_string(),
        coords: coords.to_vec(),
        params: vec![],
        xl: to_fields(left)?,
        xr: to_fields(right)?,
    })
}

/// Maximum relative disagreement between the fields of two charts over `points`.
pub fn chart_distance(a: &GroupChart, b: &GroupChart, points: &[Point]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (fa, fb) in [(&a.xl, &b.xl), (&a.xr, &b.xr)] {
        for (va, vb) in fa.iter().zip(fb) {
            for (ea, eb) in va.iter().zip(vb) {
                for p in points {
                    worst = worst.max(rel_err(eval_at(ea, p)?, eval_at(eb, p)?));
                }
            }
        }
    }
    Ok(worst)
}
