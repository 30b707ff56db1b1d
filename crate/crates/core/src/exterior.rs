//! Multivectors over a Lie algebra basis (or its dual), Schouten brackets and
//! Chevalley-Eilenberg differentials.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bialgebra_catalog::JacobiLieBialgebra;
use crate::error::{Error, Result};
use crate::lie_core::{LieAlgebra, Side};
use crate::linalg::Matrix;
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multivector {
    dim: usize,
    side: Side,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Scalar>,
}

/// Sorts `idx` in place; returns the permutation sign, or `None` on a repeated index.
fn sort_sign(idx: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl Multivector {
    pub fn zero(dim: usize, side: Side, degree: usize) -> Self {
        Multivector { dim, side, degree, comps: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, side: Side, c: Scalar) -> Self {
        let mut m = Self::zero(dim, side, 0);
        m.add_term(&[], c);
        m
    }

    pub fn basis(dim: usize, side: Side, i: usize) -> Self {
        let mut m = Self::zero(dim, side, 1);
        m.add_term(&[i], Scalar::one());
        m
    }

    pub fn vector(side: Side, coeffs: &[Scalar]) -> Self {
        let mut m = Self::zero(coeffs.len(), side, 1);
        for (i, c) in coeffs.iter().enumerate() {
            m.add_term(&[i], c.clone());
        }
        m
    }

    /// `1/2 r^ij X_i ^ X_j` from an antisymmetric matrix.
    pub fn from_bivector_matrix(side: Side, r: &Matrix) -> Self {
        let d = r.rows();
        let mut m = Self::zero(d, side, 2);
        for i in 0..d {
            for j in i + 1..d {
                m.add_term(&[i, j], r.get(i, j).clone());
            }
        }
        m
    }

    pub fn to_bivector_matrix(&self) -> Matrix {
        assert_eq!(self.degree, 2);
        let mut r = Matrix::zeros(self.dim, self.dim);
        for (k, v) in &self.comps {
            r.set(k[0], k[1], v.clone());
            r.set(k[1], k[0], -v.clone());
        }
        r
    }

    /// Adds `c` times the wedge of the listed basis elements (any order).
    pub fn add_term(&mut self, idx: &[usize], c: Scalar) {
        assert_eq!(idx.len(), self.degree, "term degree mismatch");
        assert!(idx.iter().all(|&i| i < self.dim), "basis index out of range");
        if c.is_zero() {
            return;
        }
        let mut key = idx.to_vec();
        let Some(sign) = sort_sign(&mut key) else { return };
        let c = if sign < 0 { -c } else { c };
        let e = self.comps.entry(key.clone()).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.comps.remove(&key);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, idx: &[usize]) -> Scalar {
        let mut key = idx.to_vec();
        match sort_sign(&mut key) {
            None => Scalar::zero(),
            Some(s) => {
                let v = self.comps.get(&key).cloned().unwrap_or_else(Scalar::zero);
                if s < 0 {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Same components, reinterpreted on `side`.
    pub fn with_side(&self, side: Side) -> Multivector {
        Multivector { side, ..self.clone() }
    }

    fn same_space(&self, o: &Multivector) -> Result<()> {
        if self.dim != o.dim || self.side != o.side {
            return Err(Error::Structural(format!(
                "mixed spaces: {}-dim {} vs {}-dim {}",
                self.dim, self.side, o.dim, o.side
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Multivector) -> Result<Multivector> {
        self.same_space(o)?;
        if self.degree != o.degree {
            return Err(Error::Structural("adding multivectors of different degree".into()));
        }
        let mut m = self.clone();
        for (k, v) in &o.comps {
            m.add_term(k, v.clone());
        }
        Ok(m)
    }

    pub fn sub(&self, o: &Multivector) -> Result<Multivector> {
        self.add(&o.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Multivector {
        let mut m = Self::zero(self.dim, self.side, self.degree);
        for (k, v) in &self.comps {
            m.add_term(k, v * c);
        }
        m
    }

    /// Renders as `2 X1^X2 - 1/3 X2^X3`; dual basis elements print as `X~i`.
    pub fn render(&self) -> String {
        if self.comps.is_empty() {
            return "0".into();
        }
        let sym = if self.side == Side::Primal { "X" } else { "X~" };
        let mut out = String::new();
        for (n, (k, v)) in self.comps.iter().enumerate() {
            let neg = v < &Scalar::zero();
            let a = if neg { -v.clone() } else { v.clone() };
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = k.iter().map(|i| format!("{sym}{}", i + 1)).collect::<Vec<_>>().join("^");
            if k.is_empty() {
                out.push_str(&scalar::fmt(&a));
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{} {}", scalar::fmt(&a), mono));
            }
        }
        out
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for Multivector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

pub fn wedge(p: &Multivector, q: &Multivector) -> Result<Multivector> {
    p.same_space(q)?;
    let mut m = Multivector::zero(p.dim, p.side, p.degree + q.degree);
    if m.degree > m.dim {
        return Ok(m);
    }
    for (a, x) in &p.comps {
        for (b, y) in &q.comps {
            let mut k = a.clone();
            k.extend_from_slice(b);
            m.add_term(&k, x * y);
        }
    }
    Ok(m)
}

/// Interior product `i_phi P`; `phi` is a degree-1 element of the opposite side.
pub fn contract(phi: &Multivector, p: &Multivector) -> Result<Multivector> {
    if phi.degree != 1 || phi.side == p.side || phi.dim != p.dim {
        return Err(Error::Structural("contraction needs a degree-1 element of the opposite side".into()));
    }
    if p.degree == 0 {
        return Err(Error::Structural("cannot contract a degree-0 multivector".into()));
    }
    let mut m = Multivector::zero(p.dim, p.side, p.degree - 1);
    for (k, v) in &p.comps {
        for (pos, &i) in k.iter().enumerate() {
            let c = phi.coeff(&[i]);
            if c.is_zero() {
                continue;
            }
            let rest: Vec<usize> = k.iter().enumerate().filter(|&(j, _)| j != pos).map(|(_, &x)| x).collect();
            let c = if pos % 2 == 0 { v * c } else { -(v * c) };
            m.add_term(&rest, c);
        }
    }
    Ok(m)
}

/// Natural pairing of a degree-1 element with a degree-1 element of the opposite side.
pub fn pairing(phi: &Multivector, x: &Multivector) -> Result<Scalar> {
    Ok(contract(phi, x)?.coeff(&[]))
}

/// Schouten-Nijenhuis bracket of constant multivectors.
///
/// On decomposables `[X_1^..^X_k, Y_1^..^Y_l] = (-1)^(k-1) sum_ij (-1)^(i+j) [X_i,Y_j]^..`,
/// which gives `[P,Q] = (-1)^(kl) [Q,P]` and the matching Leibniz and Jacobi rules,
/// and reduces to the Lie bracket on vectors.
pub fn schouten(g: &LieAlgebra, p: &Multivector, q: &Multivector) -> Result<Multivector> {
    p.same_space(q)?;
    if g.dim() != p.dim {
        return Err(Error::Structural("algebra dimension mismatch".into()));
    }
    let (k, l) = (p.degree, q.degree);
    let deg = (k + l).saturating_sub(1);
    let mut m = Multivector::zero(p.dim, p.side, deg);
    if k == 0 || l == 0 || deg > p.dim {
        return Ok(m);
    }
    let overall = if (k - 1) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
    for (a, x) in &p.comps {
        for (b, y) in &q.comps {
            let xy = x * y * &overall;
            for (i, &ai) in a.iter().enumerate() {
                for (j, &bj) in b.iter().enumerate() {
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    let mut rest: Vec<usize> = Vec::with_capacity(deg);
                    rest.push(0);
                    rest.extend(a.iter().enumerate().filter(|&(t, _)| t != i).map(|(_, &v)| v));
                    rest.extend(b.iter().enumerate().filter(|&(t, _)| t != j).map(|(_, &v)| v));
                    for c in 0..p.dim {
                        let f = g.f(ai, bj, c);
                        if f.is_zero() {
                            continue;
                        }
                        rest[0] = c;
                        let v = &xy * f;
                        m.add_term(&rest, if sign > 0 { v } else { -v });
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Cocycle-modified brackets.
///
/// Primal (`cocycle = phi0`, a covector): `[P,Q] - phi0(P) Q` for a vector `P`.
/// Dual (`cocycle = X0`, a vector):
/// `[Q,Q'] + (-1)^(k+1) (k-1) Q ^ i_X0 Q' - (k'-1) i_X0 Q ^ Q'`.
pub fn schouten_modified(
    g: &LieAlgebra,
    p: &Multivector,
    q: &Multivector,
    cocycle: &Multivector,
    side: Side,
) -> Result<Multivector> {
    if p.side != side || cocycle.side == side || cocycle.degree != 1 {
        return Err(Error::Structural("cocycle must be a degree-1 element of the opposite side".into()));
    }
    let base = schouten(g, p, q)?;
    match side {
        Side::Primal => {
            if p.degree != 1 {
                return Err(Error::Structural("primal modified bracket takes a vector first argument".into()));
            }
            let c = pairing(cocycle, p)?;
            base.sub(&q.scale(&c))
        }
        Side::Dual => {
            let (k, kp) = (p.degree as i64, q.degree as i64);
            let mut out = base;
            if k >= 1 && kp >= 1 && k - 1 != 0 {
                let t = wedge(p, &contract(cocycle, q)?)?;
                let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
                out = out.add(&t.scale(&scalar::int(sign * (k - 1))))?;
            }
            if k >= 1 && kp - 1 != 0 {
                let t = wedge(&contract(cocycle, p)?, q)?;
                out = out.sub(&t.scale(&scalar::int(kp - 1)))?;
            }
            Ok(out)
        }
    }
}

/// Graded derivation extending `e_i -> -1/2 c_jk^i e_j ^ e_k` with `c` the given constants.
pub fn ce_derivation(c: &LieAlgebra, v: &Multivector) -> Result<Multivector> {
    if c.dim() != v.dim {
        return Err(Error::Structural("dimension mismatch".into()));
    }
    let d = v.dim;
    let mut out = Multivector::zero(d, v.side, v.degree + 1);
    if v.degree + 1 > d {
        return Ok(out);
    }
    for (key, coef) in &v.comps {
        for (pos, &i) in key.iter().enumerate() {
            let sign = if pos % 2 == 0 { coef.clone() } else { -coef.clone() };
            for j in 0..d {
                for k in j + 1..d {
                    let f = c.f(j, k, i);
                    if f.is_zero() {
                        continue;
                    }
                    let mut idx = key[..pos].to_vec();
                    idx.push(j);
                    idx.push(k);
                    idx.extend_from_slice(&key[pos + 1..]);
                    out.add_term(&idx, -(&sign * f));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CeMode {
    /// `d_*` on the primal side, from the dual constants.
    DStar,
    /// `d` on the dual side, from the primal constants.
    D,
    /// `d_* + X0 ^`.
    DStarX0,
    /// `d + phi0 ^`.
    DPhi0,
}

pub fn ce_differential(v: &Multivector, mode: CeMode, b: &JacobiLieBialgebra) -> Result<Multivector> {
    let want = match mode {
        CeMode::DStar | CeMode::DStarX0 => Side::Primal,
        CeMode::D | CeMode::DPhi0 => Side::Dual,
    };
    if v.side != want {
        return Err(Error::Structural(format!("{mode:?} acts on the {want} side")));
    }
    match mode {
        CeMode::DStar => ce_derivation(&b.g_dual, v),
        CeMode::D => ce_derivation(&b.g, v),
        CeMode::DStarX0 => ce_derivation(&b.g_dual, v)?.add(&wedge(&b.x0(), v)?),
        CeMode::DPhi0 => ce_derivation(&b.g, v)?.add(&wedge(&b.phi0(), v)?),
    }
}
