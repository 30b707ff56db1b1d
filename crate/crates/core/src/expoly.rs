//! Exact normal form for sums of `c * x^k * exp(l . x)` with complex rational `c` and `l`.
//! Covers polynomials, exponentials, hyperbolic and trigonometric functions of linear forms.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symexpr::{Expr, Func};

type C = Complex<Scalar>;
type Form = Vec<(Scalar, Scalar)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpPoly {
    n: usize,
    terms: BTreeMap<(Vec<u32>, Form), C>,
}

fn czero() -> C {
    Complex::new(Scalar::zero(), Scalar::zero())
}

fn creal(v: Scalar) -> C {
    Complex::new(v, Scalar::zero())
}

fn cinv(c: &C) -> C {
    let d = &c.re * &c.re + &c.im * &c.im;
    Complex::new(&c.re / &d, -&c.im / &d)
}

impl ExpPoly {
    pub fn zero(n: usize) -> Self {
        ExpPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut p = Self::zero(n);
        p.push(vec![0; n], vec![(Scalar::zero(), Scalar::zero()); n], creal(c));
        p
    }

    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut k = vec![0; n];
        k[i] = 1;
        let mut p = Self::zero(n);
        p.push(k, vec![(Scalar::zero(), Scalar::zero()); n], creal(Scalar::one()));
        p
    }

    fn push(&mut self, k: Vec<u32>, form: Form, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (k, form);
        let e = self.terms.entry(key.clone()).or_insert_with(czero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &ExpPoly) -> ExpPoly {
        let mut p = self.clone();
        for ((k, f), c) in &o.terms {
            p.push(k.clone(), f.clone(), c.clone());
        }
        p
    }

    pub fn scale(&self, s: &C) -> ExpPoly {
        let mut p = Self::zero(self.n);
        for ((k, f), c) in &self.terms {
            p.push(k.clone(), f.clone(), c.clone() * s.clone());
        }
        p
    }

    pub fn neg(&self) -> ExpPoly {
        self.scale(&creal(-Scalar::one()))
    }

    pub fn sub(&self, o: &ExpPoly) -> ExpPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &ExpPoly) -> ExpPoly {
        let mut p = Self::zero(self.n);
        for ((k1, f1), c1) in &self.terms {
            for ((k2, f2), c2) in &o.terms {
                let k = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                let f = f1.iter().zip(f2).map(|(a, b)| (&a.0 + &b.0, &a.1 + &b.1)).collect();
                p.push(k, f, c1.clone() * c2.clone());
            }
        }
        p
    }

    /// Reciprocal of a single monomial-free term `c exp(l.x)`.
    pub fn recip(&self) -> Result<ExpPoly> {
        if self.terms.len() != 1 {
            return Err(Error::Unsupported("reciprocal of a sum".into()));
        }
        let ((k, f), c) = self.terms.iter().next().unwrap();
        if k.iter().any(|&e| e != 0) {
            return Err(Error::Unsupported("reciprocal of a polynomial factor".into()));
        }
        let mut p = Self::zero(self.n);
        p.push(k.clone(), f.iter().map(|(a, b)| (-a.clone(), -b.clone())).collect(), cinv(c));
        Ok(p)
    }

    /// Linear form of a homogeneous degree-1, exponential-free polynomial.
    fn as_linear(&self) -> Result<Form> {
        let mut l = vec![(Scalar::zero(), Scalar::zero()); self.n];
        for ((k, f), c) in &self.terms {
            let deg: u32 = k.iter().sum();
            if deg != 1 || f.iter().any(|(a, b)| !a.is_zero() || !b.is_zero()) {
                return Err(Error::Unsupported("function argument is not a linear form".into()));
            }
            let i = k.iter().position(|&e| e == 1).unwrap();
            l[i] = (c.re.clone(), c.im.clone());
        }
        Ok(l)
    }

    fn exp_of(n: usize, l: Form, c: C) -> ExpPoly {
        let mut p = Self::zero(n);
        p.push(vec![0; n], l, c);
        p
    }

    pub fn from_expr(e: &Expr, coords: &[String]) -> Result<ExpPoly> {
        let n = coords.len();
        Ok(match e {
            Expr::Num(v) => Self::constant(n, v.clone()),
            Expr::Var(v) => {
                let i = coords.iter().position(|c| c == v).ok_or_else(|| Error::UnknownName(v.clone()))?;
                Self::coordinate(n, i)
            }
            Expr::Param(p) => return Err(Error::Unsupported(format!("unbound parameter `{p}`"))),
            Expr::Add(ts) => {
                let mut acc = Self::zero(n);
                for t in ts {
                    acc = acc.add(&Self::from_expr(t, coords)?);
                }
                acc
            }
            Expr::Mul(fs) => {
                let mut acc = Self::constant(n, Scalar::one());
                for f in fs {
                    acc = acc.mul(&Self::from_expr(f, coords)?);
                }
                acc
            }
            Expr::Neg(b) => Self::from_expr(b, coords)?.neg(),
            Expr::Pow(b, k) => {
                let mut base = Self::from_expr(b, coords)?;
                if *k < 0 {
                    base = base.recip()?;
                }
                let mut acc = Self::constant(n, Scalar::one());
                for _ in 0..k.unsigned_abs() {
                    acc = acc.mul(&base);
                }
                acc
            }
            Expr::Func(f, a) => {
                let l = Self::from_expr(a, coords)?.as_linear()?;
                let neg: Form = l.iter().map(|(a, b)| (-a.clone(), -b.clone())).collect();
                let il: Form = l.iter().map(|(a, b)| (-b.clone(), a.clone())).collect();
                let nil: Form = il.iter().map(|(a, b)| (-a.clone(), -b.clone())).collect();
                let half = Scalar::new(1.into(), 2.into());
                let h = creal(half.clone());
                let ih = Complex::new(Scalar::zero(), half);
                match f {
                    Func::Exp => Self::exp_of(n, l, creal(Scalar::one())),
                    Func::Cosh => Self::exp_of(n, l, h.clone()).add(&Self::exp_of(n, neg, h)),
                    Func::Sinh => Self::exp_of(n, l, h.clone()).sub(&Self::exp_of(n, neg, h)),
                    Func::Cos => Self::exp_of(n, il, h.clone()).add(&Self::exp_of(n, nil, h)),
                    // sin u = (e^{iu} - e^{-iu}) / 2i
                    Func::Sin => Self::exp_of(n, il, -ih.clone()).add(&Self::exp_of(n, nil, ih)),
                }
            }
        })
    }

    fn conj(&self) -> ExpPoly {
        let mut p = Self::zero(self.n);
        for ((k, f), c) in &self.terms {
            p.push(k.clone(), f.iter().map(|(a, b)| (a.clone(), -b.clone())).collect(), c.conj());
        }
        p
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// `int_0^1 P(t x) dt`; only exponential-free integrands are supported.
    pub fn integrate_scaled(&self) -> Result<ExpPoly> {
        let mut p = Self::zero(self.n);
        for ((k, f), c) in &self.terms {
            if f.iter().any(|(a, b)| !a.is_zero() || !b.is_zero()) {
                return Err(Error::Unsupported("integrand has an exponential factor".into()));
            }
            let deg: u32 = k.iter().sum();
            let w = Scalar::new(1.into(), (deg as i64 + 1).into());
            p.push(k.clone(), f.clone(), c.clone() * creal(w));
        }
        Ok(p)
    }

    /// Back to an expression; conjugate pairs fold into `cos`/`sin`.
    pub fn to_expr(&self, coords: &[String]) -> Result<Expr> {
        if !self.is_real() {
            return Err(Error::Unsupported("complex-valued result".into()));
        }
        let lin = |v: Vec<Scalar>| -> Expr {
            Expr::add(v.into_iter().zip(coords).map(|(c, x)| Expr::Num(c) * Expr::var(x)).collect())
        };
        let mut out = Vec::new();
        for ((k, f), c) in &self.terms {
            let im: Vec<Scalar> = f.iter().map(|p| p.1.clone()).collect();
            let sign = im.iter().find(|v| !v.is_zero()).map(|v| v.is_positive());
            if sign == Some(false) {
                continue;
            }
            let mut fs: Vec<Expr> = k.iter().zip(coords).map(|(&e, x)| Expr::pow(Expr::var(x), e as i32)).collect();
            fs.push(Expr::exp(lin(f.iter().map(|p| p.0.clone()).collect())));
            if sign.is_none() {
                fs.push(Expr::Num(c.re.clone()));
                out.push(Expr::mul(fs));
            } else {
                let two = Scalar::from_integer(2.into());
                let v = lin(im);
                let trig = Expr::Num(&c.re * &two) * Expr::func(Func::Cos, v.clone()) - Expr::Num(&c.im * &two) * Expr::func(Func::Sin, v);
                fs.push(trig);
                out.push(Expr::mul(fs));
            }
        }
        Ok(Expr::add(out))
    }
}

pub fn det(m: &[Vec<ExpPoly>]) -> ExpPoly {
    let n = m.len();
    let nv = m[0][0].n;
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = ExpPoly::zero(nv);
    for j in 0..n {
        let minor: Vec<Vec<ExpPoly>> = m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect()).collect();
        let t = m[0][j].mul(&det(&minor));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

/// Inverse by adjugate; the determinant must be a single exponential term.
pub fn invert(m: &[Vec<ExpPoly>]) -> Result<Vec<Vec<ExpPoly>>> {
    let n = m.len();
    let dinv = det(m).recip().map_err(|e| Error::Singular(format!("determinant not invertible in closed form: {e}")))?;
    if n == 1 {
        return Ok(vec![vec![dinv]]);
    }
    let mut out = vec![vec![ExpPoly::zero(m[0][0].n); n]; n];
    for (i, row) in m.iter().enumerate() {
        for j in 0..n {
            let _ = row;
            let minor: Vec<Vec<ExpPoly>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let cof = det(&minor).mul(&dinv);
            out[j][i] = if (i + j) % 2 == 0 { cof } else { cof.neg() };
        }
    }
    Ok(out)
}
