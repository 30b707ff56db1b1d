//! Symbolic scalar expressions over chart coordinates and parameters.
//!
//! Grammar:
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' int)?
//! base   := num | name | func '(' expr ')' | '(' expr ')'
//! ```
//! Division and negative powers are only allowed on coordinate-free denominators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Sinh,
    Cosh,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Scalar),
    Var(String),
    Param(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Func(Func, Box<Expr>),
}

/// Names an expression may mention.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    pub vars: Vec<String>,
    pub params: Vec<String>,
}

impl Context {
    pub fn new<S: AsRef<str>>(vars: &[S], params: &[S]) -> Self {
        Context {
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
            params: params.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }
}

impl Expr {
    pub fn num(v: Scalar) -> Expr {
        Expr::Num(v)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(scalar::int(n))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    pub fn as_num(&self) -> Option<&Scalar> {
        match self {
            Expr::Num(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if v.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(v) if v.is_one())
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut c = Scalar::zero();
        let mut out = Vec::new();
        for t in terms {
            match t {
                Expr::Num(v) => c += v,
                Expr::Add(inner) => {
                    for u in inner {
                        match u {
                            Expr::Num(v) => c += v,
                            u => out.push(u),
                        }
                    }
                }
                t => out.push(t),
            }
        }
        if !c.is_zero() {
            out.push(Expr::Num(c));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut c = Scalar::one();
        let mut out = Vec::new();
        let mut stack: Vec<Expr> = factors.into_iter().rev().collect();
        while let Some(f) = stack.pop() {
            match f {
                Expr::Num(v) => {
                    if v.is_zero() {
                        return Expr::zero();
                    }
                    c *= v;
                }
                Expr::Neg(inner) => {
                    c = -c;
                    stack.push(*inner);
                }
                Expr::Mul(inner) => stack.extend(inner.into_iter().rev()),
                f => out.push(f),
            }
        }
        if out.is_empty() {
            return Expr::Num(c);
        }
        if !c.is_one() {
            out.insert(0, Expr::Num(c));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Expr::Mul(out)
        }
    }

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Num(v) => Expr::Num(-v),
            Expr::Neg(inner) => *inner,
            Expr::Mul(mut fs) => {
                if let Some(Expr::Num(v)) = fs.first_mut() {
                    *v = -v.clone();
                    if v.is_one() {
                        fs.remove(0);
                    }
                    return Expr::mul(fs);
                }
                Expr::Neg(Box::new(Expr::Mul(fs)))
            }
            Expr::Add(ts) => Expr::add(ts.into_iter().map(Expr::neg).collect()),
            e => Expr::Neg(Box::new(e)),
        }
    }

    pub fn pow(b: Expr, n: i32) -> Expr {
        match (b, n) {
            (_, 0) => Expr::one(),
            (b, 1) => b,
            (Expr::Num(v), n) if !(v.is_zero() && n < 0) => Expr::Num(num_traits::pow::Pow::pow(&v, n)),
            (Expr::Pow(inner, m), n) => Expr::pow(*inner, m * n),
            (b, n) => Expr::Pow(Box::new(b), n),
        }
    }

    pub fn func(f: Func, a: Expr) -> Expr {
        if a.is_zero() {
            return match f {
                Func::Exp | Func::Cosh | Func::Cos => Expr::one(),
                Func::Sinh | Func::Sin => Expr::zero(),
            };
        }
        Expr::Func(f, Box::new(a))
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::func(Func::Exp, a)
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Num(_) | Expr::Param(_) => false,
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(|e| e.contains_var()),
            Expr::Pow(b, _) | Expr::Neg(b) | Expr::Func(_, b) => b.contains_var(),
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        match self {
            Expr::Var(v) => v == var,
            Expr::Num(_) | Expr::Param(_) => false,
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(|e| e.depends_on(var)),
            Expr::Pow(b, _) | Expr::Neg(b) | Expr::Func(_, b) => b.depends_on(var),
        }
    }

    fn collect(&self, vars: &mut BTreeSet<String>, params: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                vars.insert(v.clone());
            }
            Expr::Param(p) => {
                params.insert(p.clone());
            }
            Expr::Num(_) => {}
            Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|e| e.collect(vars, params)),
            Expr::Pow(b, _) | Expr::Neg(b) | Expr::Func(_, b) => b.collect(vars, params),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let (mut v, mut p) = (BTreeSet::new(), BTreeSet::new());
        self.collect(&mut v, &mut p);
        v
    }

    pub fn free_params(&self) -> BTreeSet<String> {
        let (mut v, mut p) = (BTreeSet::new(), BTreeSet::new());
        self.collect(&mut v, &mut p);
        p
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Param(_) => 1,
            Expr::Add(v) | Expr::Mul(v) => 1 + v.iter().map(|e| e.size()).sum::<usize>(),
            Expr::Pow(b, _) | Expr::Neg(b) | Expr::Func(_, b) => 1 + b.size(),
        }
    }

    /// Rebuilds the tree bottom-up, replacing leaves via `leaf` (returning `None` keeps the leaf).
    pub fn map_leaves(&self, leaf: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Param(_) => leaf(self).unwrap_or_else(|| self.clone()),
            Expr::Add(v) => Expr::add(v.iter().map(|e| e.map_leaves(leaf)).collect()),
            Expr::Mul(v) => Expr::mul(v.iter().map(|e| e.map_leaves(leaf)).collect()),
            Expr::Pow(b, n) => Expr::pow(b.map_leaves(leaf), *n),
            Expr::Neg(b) => Expr::neg(b.map_leaves(leaf)),
            Expr::Func(f, b) => Expr::func(*f, b.map_leaves(leaf)),
        }
    }

    pub fn subst_var(&self, name: &str, by: &Expr) -> Expr {
        self.map_leaves(&|e| matches!(e, Expr::Var(v) if v == name).then(|| by.clone()))
    }

    pub fn subst_param(&self, name: &str, by: &Expr) -> Expr {
        self.map_leaves(&|e| matches!(e, Expr::Param(v) if v == name).then(|| by.clone()))
    }

    /// Replaces parameters by exact values; unknown parameters are left alone.
    pub fn bind_params(&self, values: &BTreeMap<String, Scalar>) -> Expr {
        self.map_leaves(&|e| match e {
            Expr::Param(p) => values.get(p).map(|v| Expr::Num(v.clone())),
            _ => None,
        })
    }

    /// Exact symbolic derivative.
    pub fn diff(&self, var: &str) -> Expr {
        if !self.depends_on(var) {
            return Expr::zero();
        }
        match self {
            Expr::Var(_) => Expr::one(),
            Expr::Num(_) | Expr::Param(_) => Expr::zero(),
            Expr::Add(v) => Expr::add(v.iter().map(|e| e.diff(var)).collect()),
            Expr::Mul(v) => {
                let mut terms = Vec::new();
                for (i, f) in v.iter().enumerate() {
                    let df = f.diff(var);
                    if df.is_zero() {
                        continue;
                    }
                    let mut fs: Vec<Expr> = v.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, e)| e.clone()).collect();
                    fs.push(df);
                    terms.push(Expr::mul(fs));
                }
                Expr::add(terms)
            }
            Expr::Pow(b, n) => Expr::mul(vec![Expr::int(*n as i64), Expr::pow((**b).clone(), n - 1), b.diff(var)]),
            Expr::Neg(b) => Expr::neg(b.diff(var)),
            Expr::Func(f, a) => {
                let da = a.diff(var);
                let a = (**a).clone();
                let outer = match f {
                    Func::Exp => Expr::func(Func::Exp, a),
                    Func::Sinh => Expr::func(Func::Cosh, a),
                    Func::Cosh => Expr::func(Func::Sinh, a),
                    Func::Sin => Expr::func(Func::Cos, a),
                    Func::Cos => Expr::neg(Expr::func(Func::Sin, a)),
                };
                Expr::mul(vec![outer, da])
            }
        }
    }

    /// Floating-point evaluation with names resolved by `env`.
    pub fn eval_with(&self, env: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => scalar::to_f64(v),
            Expr::Var(n) | Expr::Param(n) => env(n).ok_or_else(|| Error::UnknownName(n.clone()))?,
            Expr::Add(v) => {
                let mut s = 0.0;
                for e in v {
                    s += e.eval_with(env)?;
                }
                s
            }
            Expr::Mul(v) => {
                let mut s = 1.0;
                for e in v {
                    s *= e.eval_with(env)?;
                }
                s
            }
            Expr::Pow(b, n) => b.eval_with(env)?.powi(*n),
            Expr::Neg(b) => -b.eval_with(env)?,
            Expr::Func(f, a) => f.apply(a.eval_with(env)?),
        })
    }

    /// Exact evaluation of a coordinate-free, function-free expression.
    /// With `margin`, any denominator of absolute value below it is rejected.
    pub fn eval_rational(&self, params: &dyn Fn(&str) -> Option<Scalar>, margin: Option<&Scalar>) -> Result<Scalar> {
        Ok(match self {
            Expr::Num(v) => v.clone(),
            Expr::Param(n) => params(n).ok_or_else(|| Error::UnknownName(n.clone()))?,
            Expr::Var(n) => return Err(Error::Unsupported(format!("coordinate `{n}` in an exact constant"))),
            Expr::Add(v) => {
                let mut s = Scalar::zero();
                for e in v {
                    s += e.eval_rational(params, margin)?;
                }
                s
            }
            Expr::Mul(v) => {
                let mut s = Scalar::one();
                for e in v {
                    s *= e.eval_rational(params, margin)?;
                }
                s
            }
            Expr::Pow(b, n) => {
                let v = b.eval_rational(params, margin)?;
                if *n < 0 {
                    let small = match margin {
                        Some(m) => &v.abs() < m,
                        None => v.is_zero(),
                    };
                    if small {
                        return Err(Error::DivisionByZero(format!("denominator {} = {}", b, scalar::fmt(&v))));
                    }
                }
                num_traits::pow::Pow::pow(&v, *n)
            }
            Expr::Neg(b) => -b.eval_rational(params, margin)?,
            Expr::Func(f, _) => return Err(Error::Unsupported(format!("{} in an exact constant", f.name()))),
        })
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        render(self, 0, &mut s);
        s
    }
}

/// Evaluates at a coordinate point with exact parameter values.
pub fn evaluate(e: &Expr, point: &BTreeMap<String, f64>, params: &BTreeMap<String, Scalar>) -> Result<f64> {
    let v = e.eval_with(&|n| point.get(n).copied().or_else(|| params.get(n).map(scalar::to_f64)))?;
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("{v} from {e}")));
    }
    Ok(v)
}

pub fn differentiate(e: &Expr, var: &str) -> Expr {
    e.diff(var)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::add(vec![self, o])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::add(vec![self, Expr::neg(o)])
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::mul(vec![self, o])
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

// Precedences: 1 sum, 2 product, 3 unary minus, 4 power, 5 atom.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Num(v) if v.is_negative() => 3,
        Expr::Num(v) if !v.is_integer() => 2,
        Expr::Num(_) | Expr::Var(_) | Expr::Param(_) | Expr::Func(..) => 5,
        Expr::Add(_) => 1,
        Expr::Mul(_) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(_, n) if *n < 0 => 2,
        Expr::Pow(..) => 4,
    }
}

fn render(e: &Expr, min: u8, out: &mut String) {
    let paren = prec(e) < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Num(v) => out.push_str(&scalar::fmt(v)),
        Expr::Var(n) | Expr::Param(n) => out.push_str(n),
        Expr::Add(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let negative = match t {
                    Expr::Neg(_) => true,
                    Expr::Num(v) => v.is_negative(),
                    Expr::Mul(fs) => matches!(fs.first(), Some(Expr::Num(v)) if v.is_negative()),
                    _ => false,
                };
                if i > 0 && negative {
                    out.push_str(" - ");
                    render(&Expr::neg(t.clone()), 2, out);
                } else {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    render(t, 2, out);
                }
            }
        }
        Expr::Mul(fs) => {
            let (num, den): (Vec<&Expr>, Vec<&Expr>) = fs.iter().partition(|f| !matches!(f, Expr::Pow(_, n) if *n < 0));
            if num.is_empty() {
                out.push('1');
            }
            for (i, f) in num.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                // A leading sign is fine; later factors need grouping.
                render(f, if i == 0 { 2 } else { 4 }, out);
            }
            for d in den {
                out.push('/');
                if let Expr::Pow(b, n) = d {
                    render(&Expr::pow((**b).clone(), -n), 5, out);
                }
            }
        }
        Expr::Pow(b, n) if *n < 0 => {
            out.push_str("1/");
            render(&Expr::pow((**b).clone(), -n), 5, out);
        }
        Expr::Pow(b, n) => {
            render(b, 5, out);
            out.push_str(&format!("^{n}"));
        }
        Expr::Neg(b) => {
            out.push('-');
            render(b, 4, out);
        }
        Expr::Func(f, a) => {
            out.push_str(f.name());
            out.push('(');
            render(a, 0, out);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Name(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push((Tok::Num(chars[start..i].iter().collect()), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(Error::Parse { col, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    ctx: &'a Context,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { col: self.col(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(Expr::neg(self.term()?));
            } else {
                return Ok(Expr::add(terms));
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut fs = vec![self.factor()?];
        loop {
            if self.eat('*') {
                fs.push(self.factor()?);
            } else if self.peek() == Some(&Tok::Sym('/')) {
                self.pos += 1;
                let col = self.col();
                let d = self.factor()?;
                if d.contains_var() {
                    return Err(Error::Parse { col, msg: "denominator depends on a coordinate".into() });
                }
                if d.is_zero() {
                    return Err(Error::Parse { col, msg: "zero denominator".into() });
                }
                fs.push(Expr::pow(d, -1));
            } else {
                return Ok(Expr::mul(fs));
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::neg(self.factor()?));
        }
        if self.eat('+') {
            return self.factor();
        }
        let col = self.col();
        let b = self.base()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let n: i32 = match self.peek() {
                Some(Tok::Num(s)) if !s.contains('.') => match s.parse() {
                    Ok(n) => n,
                    Err(_) => return self.err("exponent too large"),
                },
                _ => return self.err("expected integer exponent"),
            };
            self.pos += 1;
            let n = if neg { -n } else { n };
            if n < 0 && b.contains_var() {
                return Err(Error::Parse { col, msg: "negative power of a coordinate expression".into() });
            }
            if n < 0 && b.is_zero() {
                return Err(Error::Parse { col, msg: "zero denominator".into() });
            }
            return Ok(Expr::pow(b, n));
        }
        Ok(b)
    }

    fn base(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                scalar::parse_rational(&s).map(Expr::Num).map_err(|_| Error::Parse { col, msg: format!("bad number `{s}`") })
            }
            Some(Tok::Name(n)) => {
                self.pos += 1;
                if let Some(f) = Func::from_name(&n) {
                    if !self.eat('(') {
                        return self.err(format!("expected `(` after {n}"));
                    }
                    let a = self.expr()?;
                    if !self.eat(')') {
                        return self.err("expected `)`");
                    }
                    return Ok(Expr::func(f, a));
                }
                if self.ctx.vars.contains(&n) {
                    Ok(Expr::Var(n))
                } else if self.ctx.params.contains(&n) {
                    Ok(Expr::Param(n))
                } else {
                    Err(Error::Parse { col, msg: format!("undeclared name `{n}`") })
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse(src: &str, ctx: &Context) -> Result<Expr> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, end: src.chars().count() + 1, ctx };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}
