//! Integrable systems from coboundary Jacobi-Lie bialgebras: phase-space brackets,
//! dynamical variables `S_i`, the matrix `Q`, its traces and the generalized CYBE.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::bialgebra_catalog::{Catalog, JacobiLieBialgebra};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::numeric::Point;
use crate::scalar::{self, Scalar};
use crate::symexpr::{parse, Context, Expr};

/// Exact polynomial with rational coefficients in a fixed list of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly { nvars, terms: BTreeMap::from([(e, Scalar::one())]) }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.terms.iter()
    }

    fn insert(&mut self, e: Vec<u32>, c: Scalar) {
        let slot = self.terms.entry(e).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                out.insert(ea.iter().zip(eb).map(|(a, b)| a + b).collect(), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::constant(self.nvars, Scalar::one()), |acc, _| acc.mul(self))
    }

    pub fn diff(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.insert(e2, c * scalar::int(e[i] as i64));
            }
        }
        out
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| scalar::to_f64(c) * e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Converts a polynomial expression; names resolve against `vars` (coordinates or parameters).
    pub fn from_expr(e: &Expr, vars: &[String]) -> Result<Poly> {
        let n = vars.len();
        let lookup = |name: &str| {
            vars.iter().position(|v| v == name).map(|i| Poly::var(n, i)).ok_or_else(|| Error::UnknownName(name.to_string()))
        };
        Ok(match e {
            Expr::Num(c) => Poly::constant(n, c.clone()),
            Expr::Var(v) | Expr::Param(v) => lookup(v)?,
            Expr::Add(ts) => ts.iter().try_fold(Poly::zero(n), |acc, t| Ok::<_, Error>(acc.add(&Poly::from_expr(t, vars)?)))?,
            Expr::Mul(ts) => {
                ts.iter().try_fold(Poly::constant(n, Scalar::one()), |acc, t| Ok::<_, Error>(acc.mul(&Poly::from_expr(t, vars)?)))?
            }
            Expr::Pow(b, k) if *k >= 0 => Poly::from_expr(b, vars)?.pow(*k as u32),
            Expr::Pow(b, k) => match b.as_ref() {
                Expr::Num(c) if !c.is_zero() => Poly::constant(n, num_traits::pow::Pow::pow(c, *k)),
                _ => return Err(Error::Unsupported(format!("negative power in polynomial: {e}"))),
            },
            Expr::Neg(b) => Poly::from_expr(b, vars)?.scale(&-Scalar::one()),
            Expr::Func(f, _) => return Err(Error::Unsupported(format!("{} in polynomial", f.name()))),
        })
    }

    pub fn to_expr(&self, vars: &[String]) -> Expr {
        Expr::add(
            self.terms
                .iter()
                .map(|(e, c)| {
                    let mut fs = vec![Expr::Num(c.clone())];
                    for (i, &k) in e.iter().enumerate() {
                        if k > 0 {
                            fs.push(Expr::pow(Expr::var(&vars[i]), k as i32));
                        }
                    }
                    Expr::mul(fs)
                })
                .collect(),
        )
    }
}

/// Phase space `R^n` with constant Poisson tensor `omega^{mu nu}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpace {
    pub coords: Vec<String>,
    pub omega: Matrix,
}

impl PhaseSpace {
    pub fn new(coords: Vec<String>, omega: Matrix) -> Result<Self> {
        if omega.rows() != coords.len() || omega.cols() != coords.len() || !omega.is_antisymmetric() {
            return Err(Error::Structural("omega must be an antisymmetric n x n matrix".into()));
        }
        if omega.inverse().is_none() {
            return Err(Error::Singular("omega is degenerate".into()));
        }
        Ok(PhaseSpace { coords, omega })
    }

    /// Canonical pairs `{q_i, p_i} = 1` with coordinates ordered `q_1..q_k, p_1..p_k`.
    pub fn canonical(coords: Vec<String>) -> Result<Self> {
        let n = coords.len();
        if n % 2 != 0 {
            return Err(Error::Structural("canonical phase space needs an even dimension".into()));
        }
        let h = n / 2;
        let omega = Matrix::from_fn(n, n, |i, j| {
            if j == i + h {
                scalar::one()
            } else if i == j + h {
                -scalar::one()
            } else {
                scalar::zero()
            }
        });
        PhaseSpace::new(coords, omega)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// `{f,g} = omega^{mu nu} d_mu f d_nu g` on expressions.
pub fn poisson_bracket(ps: &PhaseSpace, f: &Expr, g: &Expr) -> Expr {
    let mut terms = Vec::new();
    for (mu, a) in ps.coords.iter().enumerate() {
        for (nu, b) in ps.coords.iter().enumerate() {
            let w = ps.omega.get(mu, nu);
            if !w.is_zero() {
                terms.push(Expr::Num(w.clone()) * f.diff(a) * g.diff(b));
            }
        }
    }
    Expr::add(terms)
}

/// Exact bracket of polynomials whose first `ps.dim()` variables are the phase coordinates.
pub fn poisson_bracket_poly(ps: &PhaseSpace, f: &Poly, g: &Poly) -> Poly {
    let mut out = Poly::zero(f.nvars());
    for mu in 0..ps.dim() {
        let df = f.diff(mu);
        if df.is_zero() {
            continue;
        }
        for nu in 0..ps.dim() {
            let w = ps.omega.get(mu, nu);
            if !w.is_zero() {
                out = out.add(&df.mul(&g.diff(nu)).scale(w));
            }
        }
    }
    out
}

/// `S_i` over a phase space, tied to a coboundary bialgebra and an r-matrix whose
/// free parameters stay symbolic (extra polynomial variables after the coordinates).
#[derive(Clone, Debug)]
pub struct DynamicalSystem {
    pub label: String,
    pub phase: PhaseSpace,
    /// Phase coordinates followed by symbolic parameters.
    pub vars: Vec<String>,
    pub bialg: JacobiLieBialgebra,
    pub r: Vec<Vec<Poly>>,
    pub s: Vec<Poly>,
    /// Matrices representing `X_i`.
    pub rep: Vec<Matrix>,
}

type PolyMatrix = Vec<Vec<Poly>>;

impl DynamicalSystem {
    pub fn dim(&self) -> usize {
        self.bialg.dim()
    }

    fn n(&self) -> usize {
        self.vars.len()
    }

    fn konst(&self, c: &Scalar) -> Poly {
        Poly::constant(self.n(), c.clone())
    }

    /// `Q^j = S_i r^ij - alpha^j`.
    pub fn q_components(&self) -> Vec<Poly> {
        let d = self.dim();
        (0..d)
            .map(|j| {
                (0..d)
                    .fold(Poly::zero(self.n()), |acc, i| acc.add(&self.s[i].mul(&self.r[i][j])))
                    .sub(&self.konst(&self.bialg.alpha[j]))
            })
            .collect()
    }

    /// Numeric point for all variables: phase coordinates from `p`, parameters from `params` (default 0).
    pub fn point(&self, p: &Point, params: &BTreeMap<String, f64>) -> Vec<f64> {
        self.vars.iter().map(|v| p.get(v).or_else(|| params.get(v)).copied().unwrap_or(0.0)).collect()
    }
}

/// `sum_k c_k M_k` for polynomial coefficients and constant matrices.
fn combine(coeffs: &[Poly], mats: &[Matrix], n: usize) -> PolyMatrix {
    let (r, c) = (mats[0].rows(), mats[0].cols());
    let mut out = vec![vec![Poly::zero(n); c]; r];
    for (p, m) in coeffs.iter().zip(mats) {
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                if !m.get(i, j).is_zero() {
                    *slot = slot.add(&p.scale(m.get(i, j)));
                }
            }
        }
    }
    out
}

fn pm_mul(a: &PolyMatrix, b: &PolyMatrix, n: usize) -> PolyMatrix {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    (0..r).map(|i| (0..c).map(|j| (0..k).fold(Poly::zero(n), |acc, l| acc.add(&a[i][l].mul(&b[l][j])))).collect()).collect()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    Matrix::from_fn(ra * rb, ca * cb, |i, j| a.get(i / rb, j / cb) * b.get(i % rb, j % cb))
}

/// `Q = Q^j X_j` in the chosen representation.
pub fn build_q(sys: &DynamicalSystem) -> PolyMatrix {
    combine(&sys.q_components(), &sys.rep, sys.n())
}

/// `I_k = tr Q^k` for `k = 1..=k_max`.
pub fn constants_of_motion(sys: &DynamicalSystem, k_max: usize) -> Result<Vec<Poly>> {
    if k_max == 0 {
        return Err(Error::Structural("k_max must be at least 1".into()));
    }
    let q = build_q(sys);
    let mut power = q.clone();
    let mut out = Vec::new();
    for k in 1..=k_max {
        if k > 1 {
            power = pm_mul(&power, &q, sys.n());
        }
        out.push((0..power.len()).fold(Poly::zero(sys.n()), |acc, i| acc.add(&power[i][i])));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SRelationReport {
    /// `{S_i,S_j} - f_ij^k S_k - beta_i S_j + beta_j S_i` vanishes identically.
    pub relations_exact: bool,
    pub max_numeric: f64,
    /// `max |beta_i f_jk^m + beta_j f_ki^m + beta_k f_ij^m|`.
    pub beta_cycle_defect: String,
}

impl SRelationReport {
    pub fn holds(&self) -> bool {
        self.relations_exact && self.beta_cycle_defect == "0"
    }
}

pub fn beta_cycle_defect(b: &JacobiLieBialgebra) -> Scalar {
    let d = b.dim();
    let (g, beta) = (&b.g, &b.beta);
    let mut vals = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for m in 0..d {
                    vals.push(&beta[i] * g.f(j, k, m) + &beta[j] * g.f(k, i, m) + &beta[k] * g.f(i, j, m));
                }
            }
        }
    }
    scalar::max_abs(&vals)
}

pub fn s_relation_residuals(sys: &DynamicalSystem) -> Vec<Poly> {
    let d = sys.dim();
    let (g, beta) = (&sys.bialg.g, &sys.bialg.beta);
    let mut out = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let mut res = poisson_bracket_poly(&sys.phase, &sys.s[i], &sys.s[j]);
            for k in 0..d {
                res = res.sub(&sys.s[k].scale(g.f(i, j, k)));
            }
            res = res.sub(&sys.s[j].scale(&beta[i])).add(&sys.s[i].scale(&beta[j]));
            out.push(res);
        }
    }
    out
}

pub fn check_s_relations(sys: &DynamicalSystem, points: &[Point]) -> SRelationReport {
    let res = s_relation_residuals(sys);
    let mut worst = 0.0f64;
    for p in points {
        let x = sys.point(p, &BTreeMap::new());
        for r in &res {
            worst = worst.max(r.eval(&x).abs());
        }
    }
    SRelationReport {
        relations_exact: res.iter().all(Poly::is_zero),
        max_numeric: worst,
        beta_cycle_defect: scalar::fmt(&beta_cycle_defect(&sys.bialg)),
    }
}

/// Maximum `|{I_n, I_m}|` over all pairs at `points` (parameters default to 0 unless in `params`).
pub fn check_involution(ps: &PhaseSpace, vars: &[String], invariants: &[Poly], points: &[Point], params: &BTreeMap<String, f64>) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..invariants.len() {
        for b in a + 1..invariants.len() {
            let br = poisson_bracket_poly(ps, &invariants[a], &invariants[b]);
            for p in points {
                let x: Vec<f64> = vars.iter().map(|v| p.get(v).or_else(|| params.get(v)).copied().unwrap_or(0.0)).collect();
                worst = worst.max(br.eval(&x).abs());
            }
        }
    }
    worst
}

/// Sign of the `phi0(Q) r` term in the generalized CYBE.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phi0Sign {
    /// `{Q (x), Q} + [Q(x)I + I(x)Q, r] - phi0(Q) r`.
    Minus,
    Plus,
}

/// `{Q (x), Q} + [Q (x) I + I (x) Q, r] -/+ phi0(Q) r` with `r = r^ij X_i (x) X_j` and
/// `{Q (x), Q} = {Q^j,Q^k} X_j (x) X_k`, all as Kronecker products in the representation.
pub fn gcybe_residual_with(sys: &DynamicalSystem, sign: Phi0Sign) -> PolyMatrix {
    let d = sys.dim();
    let n = sys.n();
    let q = sys.q_components();
    let m = sys.rep[0].rows();
    let id = Matrix::identity(m);
    let mut coeffs = Vec::new();
    let mut mats = Vec::new();
    for j in 0..d {
        for k in 0..d {
            coeffs.push(poisson_bracket_poly(&sys.phase, &q[j], &q[k]));
            mats.push(kron(&sys.rep[j], &sys.rep[k]));
        }
    }
    let mut t = combine(&coeffs, &mats, n);
    let rr = combine(&sys.r.iter().flatten().cloned().collect::<Vec<_>>(), &mats, n);
    let qm: Vec<Matrix> = sys.rep.iter().map(|x| kron(x, &id)).collect();
    let iq: Vec<Matrix> = sys.rep.iter().map(|x| kron(&id, x)).collect();
    let a = combine(&q, &qm, n);
    let a2 = combine(&q, &iq, n);
    let a: PolyMatrix = a.iter().zip(&a2).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.add(v)).collect()).collect();
    let ar = pm_mul(&a, &rr, n);
    let ra = pm_mul(&rr, &a, n);
    let phi = (0..d).fold(Poly::zero(n), |acc, j| acc.add(&q[j].scale(&sys.bialg.beta[j])));
    let s = match sign {
        Phi0Sign::Minus => -scalar::one(),
        Phi0Sign::Plus => scalar::one(),
    };
    for i in 0..t.len() {
        for j in 0..t.len() {
            t[i][j] = t[i][j].add(&ar[i][j]).sub(&ra[i][j]).add(&phi.mul(&rr[i][j]).scale(&s));
        }
    }
    t
}

/// The generalized CYBE in its stated form (`- phi0(Q) r`).
pub fn gcybe_residual(sys: &DynamicalSystem) -> PolyMatrix {
    gcybe_residual_with(sys, Phi0Sign::Minus)
}

/// Maximum absolute entry of a polynomial matrix over `points`.
pub fn max_violation(sys: &DynamicalSystem, m: &PolyMatrix, points: &[Point], params: &BTreeMap<String, f64>) -> f64 {
    let mut worst = 0.0f64;
    for p in points {
        let x = sys.point(p, params);
        for e in m.iter().flatten() {
            worst = worst.max(e.eval(&x).abs());
        }
    }
    worst
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr(&(0..self.nvars).map(|i| format!("v{}", i + 1)).collect::<Vec<_>>()))
    }
}

/// Parses a system file:
///
/// ```text
/// system <catalog label>
/// coords x,y,p_x,p_y
/// poisson 1 3 1; 2 4 1        # omega^{13} = 1, omega^{24} = 1 (antisymmetrized)
/// S -3*x*p_x; -y*p_x; -p_x
/// adjoint 1 0 0 0; 0 1 0; 0 0 1   # optional, one line per generator, rows ';'-separated
/// ```
///
/// Catalog parameters of the row are bound from `bindings`; free r-parameters stay symbolic.
pub fn load_system(text: &str, catalog: &Catalog, bindings: &BTreeMap<String, Scalar>) -> Result<DynamicalSystem> {
    let mut label = None;
    let mut coords: Vec<String> = vec![];
    let mut omega_entries = vec![];
    let mut s_src = None;
    let mut adj_src = vec![];
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let wrap = |e: Error| e.context(format!("system line {}", ln + 1));
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "system" => label = Some(rest.to_string()),
            "coords" => coords = rest.split(',').map(|s| s.trim().to_string()).collect(),
            "poisson" => {
                for part in rest.split(';') {
                    let t: Vec<&str> = part.split_whitespace().collect();
                    let bad = || wrap(Error::Parse { col: 0, msg: format!("bad poisson entry `{part}`") });
                    if t.len() != 3 {
                        return Err(bad());
                    }
                    let i: usize = t[0].parse().map_err(|_| bad())?;
                    let j: usize = t[1].parse().map_err(|_| bad())?;
                    omega_entries.push((i, j, scalar::parse_rational(t[2]).map_err(wrap)?));
                }
            }
            "S" => s_src = Some(rest.to_string()),
            "adjoint" => adj_src.push(rest.to_string()),
            k => return Err(wrap(Error::Parse { col: 0, msg: format!("unknown key `{k}`") })),
        }
    }
    let missing = |k: &str| Error::Parse { col: 0, msg: format!("system file lacks `{k}`") };
    let label = label.ok_or_else(|| missing("system"))?;
    let s_src = s_src.ok_or_else(|| missing("S"))?;
    if coords.is_empty() {
        return Err(missing("coords"));
    }
    let n = coords.len();
    let mut omega = Matrix::zeros(n, n);
    for (i, j, v) in omega_entries {
        if i == 0 || j == 0 || i > n || j > n || i == j {
            return Err(Error::Parse { col: 0, msg: format!("poisson index ({i},{j}) out of range") });
        }
        omega.set(i - 1, j - 1, v.clone());
        omega.set(j - 1, i - 1, -v);
    }
    let phase = PhaseSpace::new(coords.clone(), omega)?;
    let entry = catalog.entry(&label)?;
    let mut b = bindings.clone();
    for f in &entry.free {
        b.remove(f);
    }
    let mut full = b.clone();
    for f in &entry.free {
        full.insert(f.clone(), Scalar::zero());
    }
    let inst = entry.instantiate(&catalog.algebras, &full, None)?;
    let bialg = inst.bialg;
    let d = bialg.dim();
    let r_tpl = entry.r.as_ref().ok_or_else(|| Error::Structural(format!("{label} has no primal r-matrix")))?;
    let mut vars = coords.clone();
    vars.extend(entry.free.iter().filter(|f| r_tpl.iter().any(|(c, _)| c.free_params().contains(*f))).cloned());
    let nv = vars.len();
    let mut r = vec![vec![Poly::zero(nv); d]; d];
    for (c, ij) in r_tpl {
        let p = Poly::from_expr(&c.bind_params(&b), &vars)?;
        let (i, j) = (ij[0], ij[1]);
        r[i][j] = r[i][j].add(&p);
        r[j][i] = r[j][i].sub(&p);
    }
    let ctx = Context::new(&coords, &[] as &[String]);
    let s: Vec<Poly> = s_src.split(';').map(|e| Poly::from_expr(&parse(e, &ctx)?, &vars)).collect::<Result<_>>()?;
    if s.len() != d {
        return Err(Error::Structural(format!("expected {d} S-variables, found {}", s.len())));
    }
    let rep = if adj_src.is_empty() {
        bialg.g.adjoint().x
    } else {
        let mats: Vec<Matrix> = adj_src
            .iter()
            .map(|src| {
                let rows: Vec<Vec<Scalar>> = src
                    .split(';')
                    .map(|row| row.split_whitespace().map(scalar::parse_rational).collect::<Result<_>>())
                    .collect::<Result<_>>()?;
                if rows.iter().any(|r| r.len() != rows.len()) {
                    return Err(Error::Parse { col: 0, msg: "adjoint matrix must be square".into() });
                }
                Ok(Matrix::from_rows(rows))
            })
            .collect::<Result<_>>()?;
        if mats.len() != d || mats.iter().any(|m| m.rows() != mats[0].rows()) {
            return Err(Error::Structural("one representation matrix of common size per generator required".into()));
        }
        for i in 0..d {
            for j in 0..d {
                let lhs = mats[i].commutator(&mats[j]);
                let rhs = (0..d).fold(Matrix::zeros(lhs.rows(), lhs.cols()), |acc, k| acc.add(&mats[k].scale(bialg.g.f(i, j, k))));
                if lhs != rhs {
                    return Err(Error::Structural("supplied matrices do not represent the algebra".into()));
                }
            }
        }
        mats
    };
    Ok(DynamicalSystem { label, phase, vars, bialg, r, s, rep })
}

pub fn builtin_example(catalog: &Catalog) -> Result<DynamicalSystem> {
    load_system(crate::data::EXAMPLE_SYSTEM, catalog, &BTreeMap::new())
}
