//! The Jacobi structure `(Lambda, E)` induced on a group chart by an r-matrix,
//! its bracket on functions, axiom checks and comparison with reference tables.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::bialgebra_catalog::{sample_parameters, AlgebraCatalog, Catalog, JacobiLieBialgebra, ParametricEntry};
use crate::error::{Error, Result};
use crate::exterior::{ce_differential, CeMode, Multivector};
use crate::group_geom::{sigma_function, GroupChart};
use crate::lie_core::Side;
use crate::linalg::Matrix;
use crate::numeric::{rel_err, Point};
use crate::rmatrix_solver::RMatrix;
use crate::scalar::{self, Scalar};
use crate::symexpr::{parse, Context, Expr};

#[derive(Clone, Debug)]
pub struct JacobiStructure {
    pub coords: Vec<String>,
    /// `lambda[mu][nu] = Lambda^{mu nu}`.
    pub lambda: Vec<Vec<Expr>>,
    pub e: Vec<Expr>,
    pub sigma: Expr,
}

/// `Lambda^{mu nu} = sum_{i<j} r^ij (XR_i^mu XR_j^nu - XR_j^mu XR_i^nu - e^-sigma (XL_i^mu XL_j^nu - XL_j^mu XL_i^nu))`,
/// `E = -alpha^i XR_i`. The chart must have its parameters bound.
pub fn build_jacobi_structure(chart: &GroupChart, r: &RMatrix, alpha: &[Scalar], sigma: &Expr) -> Result<JacobiStructure> {
    build(chart, &r.m, alpha, sigma, true)
}

/// Same as [`build_jacobi_structure`] but without the `e^-sigma` factor; not a Jacobi
/// structure in general, used to show the axiom checks are sensitive.
pub fn build_without_conformal_factor(chart: &GroupChart, r: &RMatrix, alpha: &[Scalar]) -> Result<JacobiStructure> {
    build(chart, &r.m, alpha, &Expr::zero(), false)
}

fn build(chart: &GroupChart, r: &Matrix, alpha: &[Scalar], sigma: &Expr, conformal: bool) -> Result<JacobiStructure> {
    let d = chart.dim();
    if r.rows() != d || alpha.len() != d {
        return Err(Error::Structural("r-matrix, alpha and chart dimensions differ".into()));
    }
    let factor = if conformal { Expr::exp(-sigma.clone()) } else { Expr::one() };
    let mut lambda = vec![vec![Expr::zero(); d]; d];
    for mu in 0..d {
        for nu in mu + 1..d {
            let mut terms = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    let c = r.get(i, j);
                    if c.is_zero() {
                        continue;
                    }
                    let (xr, xl) = (&chart.xr, &chart.xl);
                    let right = xr[i][mu].clone() * xr[j][nu].clone() - xr[j][mu].clone() * xr[i][nu].clone();
                    let left = xl[i][mu].clone() * xl[j][nu].clone() - xl[j][mu].clone() * xl[i][nu].clone();
                    terms.push(Expr::Num(c.clone()) * (right - factor.clone() * left));
                }
            }
            let v = Expr::add(terms);
            lambda[nu][mu] = -v.clone();
            lambda[mu][nu] = v;
        }
    }
    let e = (0..d)
        .map(|mu| Expr::add((0..d).filter(|&i| !alpha[i].is_zero()).map(|i| Expr::Num(-alpha[i].clone()) * chart.xr[i][mu].clone()).collect()))
        .collect();
    Ok(JacobiStructure { coords: chart.coords.clone(), lambda, e, sigma: sigma.clone() })
}

impl JacobiStructure {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `E(f) = E^mu d_mu f`.
    pub fn apply_e(&self, f: &Expr) -> Expr {
        Expr::add(self.coords.iter().zip(&self.e).map(|(c, e)| e.clone() * f.diff(c)).collect())
    }
}

/// `{f,h} = Lambda(df,dh) + f E(h) - h E(f)`.
pub fn jacobi_bracket(js: &JacobiStructure, f: &Expr, h: &Expr) -> Expr {
    let df: Vec<Expr> = js.coords.iter().map(|c| f.diff(c)).collect();
    let dh: Vec<Expr> = js.coords.iter().map(|c| h.diff(c)).collect();
    let mut terms = Vec::new();
    for mu in 0..js.dim() {
        for nu in 0..js.dim() {
            if !js.lambda[mu][nu].is_zero() {
                terms.push(js.lambda[mu][nu].clone() * df[mu].clone() * dh[nu].clone());
            }
        }
    }
    terms.push(f.clone() * js.apply_e(h));
    terms.push(-(h.clone() * js.apply_e(f)));
    Expr::add(terms)
}

fn eval(e: &Expr, p: &Point) -> Result<f64> {
    e.eval_with(&|n| p.get(n).copied())
}

/// Sum of floating terms, with the residual scaled by `max(1, sum |term|)` so that
/// cancellation between large exponentials is not mistaken for a violation.
#[derive(Default)]
struct Acc {
    sum: f64,
    mag: f64,
}

impl Acc {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.mag += v.abs();
    }

    fn residual(&self) -> f64 {
        if self.sum.is_nan() || self.mag.is_infinite() {
            return f64::INFINITY;
        }
        self.sum.abs() / self.mag.max(1.0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct AxiomReport {
    /// `max |[Lambda,Lambda] - 2 E ^ Lambda|`.
    pub lambda_lambda: f64,
    /// `max |[E,Lambda]|`.
    pub e_lambda: f64,
}

impl AxiomReport {
    pub fn max(&self) -> f64 {
        self.lambda_lambda.max(self.e_lambda)
    }
}

/// Evaluates both Jacobi-structure residuals at `points`, each relative to the size of its terms. Uses
/// `[Lambda,Lambda]^{mu nu rho} = 2 cyc(Lambda^{s mu} d_s Lambda^{nu rho})` and
/// `[E,Lambda]^{mu nu} = E^s d_s Lambda^{mu nu} - Lambda^{s nu} d_s E^mu - Lambda^{mu s} d_s E^nu`.
pub fn verify_structure_axioms(js: &JacobiStructure, points: &[Point]) -> Result<AxiomReport> {
    let d = js.dim();
    let dl: Vec<Vec<Vec<Expr>>> =
        (0..d).map(|s| (0..d).map(|a| (0..d).map(|b| js.lambda[a][b].diff(&js.coords[s])).collect()).collect()).collect();
    let de: Vec<Vec<Expr>> = (0..d).map(|s| (0..d).map(|a| js.e[a].diff(&js.coords[s])).collect()).collect();
    let mut rep = AxiomReport::default();
    for p in points {
        let lam: Vec<Vec<f64>> = js.lambda.iter().map(|row| row.iter().map(|e| eval(e, p)).collect::<Result<_>>()).collect::<Result<_>>()?;
        let ev: Vec<f64> = js.e.iter().map(|e| eval(e, p)).collect::<Result<_>>()?;
        let dlv: Vec<Vec<Vec<f64>>> = dl
            .iter()
            .map(|m| m.iter().map(|row| row.iter().map(|e| eval(e, p)).collect::<Result<_>>()).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let dev: Vec<Vec<f64>> = de.iter().map(|row| row.iter().map(|e| eval(e, p)).collect::<Result<_>>()).collect::<Result<_>>()?;
        for mu in 0..d {
            for nu in mu + 1..d {
                for rho in nu + 1..d {
                    let mut acc = Acc::default();
                    for (a, b, c) in [(mu, nu, rho), (nu, rho, mu), (rho, mu, nu)] {
                        for s in 0..d {
                            acc.push(2.0 * lam[s][a] * dlv[s][b][c]);
                        }
                        acc.push(-2.0 * ev[a] * lam[b][c]);
                    }
                    rep.lambda_lambda = rep.lambda_lambda.max(acc.residual());
                }
                let mut acc = Acc::default();
                for s in 0..d {
                    acc.push(ev[s] * dlv[s][mu][nu]);
                    acc.push(-lam[s][nu] * dev[s][mu]);
                    acc.push(-lam[mu][s] * dev[s][nu]);
                }
                rep.e_lambda = rep.e_lambda.max(acc.residual());
            }
        }
    }
    Ok(rep)
}

/// `max |d_nu sigma Lambda^{nu mu} - (alpha^i XR_i^mu - e^-sigma alpha^i XL_i^mu)|`: the sharp map of
/// `Lambda` sends `d sigma` to the difference of the right and left extensions of `X0`.
pub fn sigma_anchor_defect(js: &JacobiStructure, chart: &GroupChart, alpha: &[Scalar], points: &[Point]) -> Result<f64> {
    let d = js.dim();
    let ds: Vec<Expr> = js.coords.iter().map(|c| js.sigma.diff(c)).collect();
    let mut worst = 0.0f64;
    for p in points {
        let s = eval(&js.sigma, p)?;
        for mu in 0..d {
            let mut lhs = 0.0;
            for nu in 0..d {
                lhs += eval(&ds[nu], p)? * eval(&js.lambda[nu][mu], p)?;
            }
            let mut rhs = 0.0;
            for (i, a) in alpha.iter().enumerate() {
                let a = scalar::to_f64(a);
                rhs += a * (eval(&chart.xr[i][mu], p)? - (-s).exp() * eval(&chart.xl[i][mu], p)?);
            }
            worst = worst.max(rel_err(lhs, rhs));
        }
    }
    Ok(worst)
}

/// `max |d_rho Lambda^{mu nu}(e) + (d_{*X0} X_rho)^{mu nu}|`: the linearization of `Lambda` at the
/// identity is minus the twisted dual differential.
pub fn linearization_defect(js: &JacobiStructure, b: &JacobiLieBialgebra) -> Result<f64> {
    let d = js.dim();
    let origin: Point = js.coords.iter().map(|c| (c.clone(), 0.0)).collect();
    let mut worst = 0.0f64;
    for rho in 0..d {
        let target = ce_differential(&Multivector::basis(d, Side::Primal, rho), CeMode::DStarX0, b)?;
        for mu in 0..d {
            for nu in mu + 1..d {
                let v = eval(&js.lambda[mu][nu].diff(&js.coords[rho]), &origin)?;
                worst = worst.max((v + scalar::to_f64(&target.coeff(&[mu, nu]))).abs());
            }
        }
    }
    Ok(worst)
}

/// One reference row: `sigma` and the coordinate brackets `{c_a, c_b}` (indices `a < b`).
#[derive(Clone, Debug)]
pub struct GoldenRow {
    pub label: String,
    pub side: Side,
    pub sigma: Expr,
    pub pairs: Vec<(usize, usize, Expr)>,
}

pub fn load_golden(text: &str, catalog: &Catalog) -> Result<Vec<GoldenRow>> {
    let mut out: Vec<GoldenRow> = Vec::new();
    let mut ctx = Context::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let wrap = |e: Error| e.context(format!("golden line {}", ln + 1));
        if let Some(rest) = line.strip_prefix("brackets ") {
            let (label, side) = rest.rsplit_once(" side=").ok_or_else(|| wrap(Error::Parse { col: 0, msg: "missing side".into() }))?;
            let side = match side {
                "primal" => Side::Primal,
                "dual" => Side::Dual,
                s => return Err(wrap(Error::Parse { col: 0, msg: format!("bad side `{s}`") })),
            };
            let entry = catalog.entry(label.trim()).map_err(wrap)?;
            let d = entry.alpha.len();
            ctx = Context { vars: ["x", "y", "z"][..d].iter().map(|s| s.to_string()).collect(), params: entry.context().params };
            out.push(GoldenRow { label: label.trim().to_string(), side, sigma: Expr::zero(), pairs: vec![] });
        } else if let Some(s) = line.strip_prefix("sigma=") {
            let row = out.last_mut().ok_or_else(|| wrap(Error::Parse { col: 0, msg: "sigma before brackets".into() }))?;
            row.sigma = parse(s, &ctx).map_err(wrap)?;
        } else if let Some(s) = line.strip_prefix("pair ") {
            let row = out.last_mut().ok_or_else(|| wrap(Error::Parse { col: 0, msg: "pair before brackets".into() }))?;
            let (lhs, rhs) = s.split_once('=').ok_or_else(|| wrap(Error::Parse { col: 0, msg: "pair without `=`".into() }))?;
            let names: Vec<&str> = lhs.split_whitespace().collect();
            let idx = |n: &str| ctx.vars.iter().position(|v| v == n);
            let (a, b) = match names.as_slice() {
                [a, b] => (idx(a), idx(b)),
                _ => (None, None),
            };
            let (a, b) = a.zip(b).filter(|(a, b)| a < b).ok_or_else(|| wrap(Error::Parse { col: 0, msg: format!("bad pair `{lhs}`") }))?;
            row.pairs.push((a, b, parse(rhs, &ctx).map_err(wrap)?));
        } else {
            return Err(wrap(Error::Parse { col: 0, msg: format!("unknown record `{line}`") }));
        }
    }
    Ok(out)
}

pub fn builtin_golden(catalog: &Catalog) -> Result<Vec<GoldenRow>> {
    load_golden(crate::data::GOLDEN, catalog)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct PairError {
    pub pair: (String, String),
    pub max_rel_err: f64,
}

/// Per coordinate pair, the maximum relative deviation of the computed bracket from
/// the reference expression (parameters already bound in `golden`).
pub fn compare_with_table(js: &JacobiStructure, golden: &[(usize, usize, Expr)], points: &[Point]) -> Result<Vec<PairError>> {
    let d = js.dim();
    let mut out = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let want = golden
                .iter()
                .find(|(i, j, _)| *i == a && *j == b)
                .map(|t| &t.2)
                .ok_or_else(|| Error::Structural(format!("reference lacks pair {{{}, {}}}", js.coords[a], js.coords[b])))?;
            let got = jacobi_bracket(js, &Expr::var(&js.coords[a]), &Expr::var(&js.coords[b]));
            let mut worst = 0.0f64;
            for p in points {
                worst = worst.max(rel_err(eval(&got, p)?, eval(want, p)?));
            }
            out.push(PairError { pair: (js.coords[a].clone(), js.coords[b].clone()), max_rel_err: worst });
        }
    }
    Ok(out)
}

/// A catalog row realized on one side: the oriented bialgebra, its chart with
/// parameters bound, the r-matrix and the Jacobi structure.
#[derive(Clone, Debug)]
pub struct RealizedRow {
    pub label: String,
    pub side: Side,
    pub bindings: BTreeMap<String, Scalar>,
    pub bialg: JacobiLieBialgebra,
    pub chart: GroupChart,
    pub r: RMatrix,
    pub structure: JacobiStructure,
}

/// Deterministic admissible bindings for `entry` with free r-parameters set to 0.
pub fn row_bindings(entry: &ParametricEntry, cat: &AlgebraCatalog, seed: u64) -> Result<BTreeMap<String, Scalar>> {
    let mut b = sample_parameters(entry, cat, 1, seed)?.remove(0).bindings;
    for f in &entry.free {
        b.insert(f.clone(), Scalar::zero());
    }
    Ok(b)
}

/// Builds the Jacobi structure of `label` on `side` at `bindings` using the chart of
/// the algebra on that side.
pub fn realize_row(catalog: &Catalog, charts: &[GroupChart], label: &str, side: Side, bindings: &BTreeMap<String, Scalar>) -> Result<RealizedRow> {
    let entry = catalog.entry(label)?;
    let wrap = |e: Error| e.context(format!("{label} ({side})"));
    let inst = entry.instantiate(&catalog.algebras, bindings, None).map_err(wrap)?;
    let aref = match side {
        Side::Primal => &entry.primal,
        Side::Dual => &entry.dual,
    };
    let chart = charts.iter().find(|c| c.name == aref.name).ok_or_else(|| wrap(Error::UnknownName(format!("chart {}", aref.name))))?;
    let mut values = BTreeMap::new();
    if let (Some(p), Some(a)) = (chart.params.first(), &aref.arg) {
        values.insert(p.clone(), inst.bindings[a].clone());
    }
    let chart = chart.bind_params(&values);
    let r = inst.r_on(side).cloned().ok_or_else(|| wrap(Error::Structural("no r-matrix on this side".into())))?;
    let bialg = inst.bialg.oriented(side);
    let sigma = sigma_function(&chart, &bialg.beta).map_err(wrap)?;
    let r = RMatrix::new(Side::Primal, r)?;
    let structure = build_jacobi_structure(&chart, &r, &bialg.alpha, &sigma)?;
    Ok(RealizedRow { label: label.to_string(), side, bindings: inst.bindings, bialg, chart, r: RMatrix { side, m: r.m }, structure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_geom::builtin_charts;
    use crate::numeric::sample_points;

    #[test]
    fn a1_row_structure() {
        let cat = Catalog::builtin().unwrap();
        let charts = builtin_charts().unwrap();
        let row = realize_row(&cat, &charts, "((A1,X~1),(A1,X2))", Side::Primal, &BTreeMap::new()).unwrap();
        let js = &row.structure;
        assert_eq!(js.sigma.render(), "x");
        let pts = sample_points(&js.coords, 20, 2.0, 1);
        for p in &pts {
            let want = 1.0 - (-p["x"]).exp();
            assert!(rel_err(eval(&js.lambda[0][1], p).unwrap(), want) < 1e-12);
        }
        assert_eq!(js.e[1].render(), "-1");
        assert!(verify_structure_axioms(js, &pts).unwrap().max() < 1e-12);
        let g = jacobi_bracket(js, &Expr::var("x"), &Expr::var("y"));
        let want = parse("1-x-exp(-x)", &Context::new(&["x", "y"], &[] as &[&str])).unwrap();
        assert!(compare_with_table(js, &[(0, 1, want)], &pts).unwrap()[0].max_rel_err < 1e-12);
        assert!(!g.is_zero());
    }

    #[test]
    fn zero_structure() {
        let charts = builtin_charts().unwrap();
        let c = charts.iter().find(|c| c.name == "II").unwrap();
        let js = build_jacobi_structure(c, &RMatrix::zero(Side::Primal, 3), &[Scalar::zero(), Scalar::zero(), Scalar::zero()], &Expr::zero()).unwrap();
        assert!(js.lambda.iter().flatten().all(Expr::is_zero));
        let pts = sample_points(&js.coords, 3, 2.0, 1);
        assert_eq!(verify_structure_axioms(&js, &pts).unwrap().max(), 0.0);
    }
}
