//! Lie algebras given by structure constants `f_ij^k`.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::bialgebra_catalog::JacobiLieBialgebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    f: Vec<Scalar>,
}

/// A failed structural constraint, 0-based internally, 1-based when displayed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    Antisymmetry { i: usize, j: usize, k: usize },
    Jacobi { i: usize, j: usize, k: usize, l: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Antisymmetry { i, j, k } => write!(fm, "antisymmetry at ({},{},{})", i + 1, j + 1, k + 1),
            Violation::Jacobi { i, j, k, l } => write!(fm, "jacobi at ({},{},{},{})", i + 1, j + 1, k + 1, l + 1),
        }
    }
}

fn idx(dim: usize, i: usize, j: usize, k: usize) -> usize {
    (i * dim + j) * dim + k
}

/// Checks antisymmetry and the Jacobi identity of a flat `dim^3` array.
pub fn validate_structure_constants(dim: usize, f: &[Scalar]) -> Result<Vec<Violation>> {
    if f.len() != dim * dim * dim {
        return Err(Error::Structural(format!("expected {} constants for dim {dim}, got {}", dim.pow(3), f.len())));
    }
    let at = |i, j, k| &f[idx(dim, i, j, k)];
    let mut out = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                if !(at(i, j, k) + at(j, i, k)).is_zero() {
                    out.push(Violation::Antisymmetry { i, j, k });
                }
            }
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let mut s = Scalar::zero();
                    for m in 0..dim {
                        s += at(i, j, m) * at(m, k, l) + at(j, k, m) * at(m, i, l) + at(k, i, m) * at(m, j, l);
                    }
                    if !s.is_zero() {
                        out.push(Violation::Jacobi { i, j, k, l });
                    }
                }
            }
        }
    }
    Ok(out)
}

impl LieAlgebra {
    pub fn abelian(name: impl Into<String>, dim: usize) -> Self {
        LieAlgebra { name: name.into(), dim, f: vec![Scalar::zero(); dim * dim * dim] }
    }

    /// Builds from `(i, j, k, value)` entries with `i < j`, 0-based; the `j,i` entries are completed.
    pub fn from_brackets(name: impl Into<String>, dim: usize, entries: &[(usize, usize, usize, Scalar)]) -> Result<Self> {
        let mut g = Self::abelian(name, dim);
        for (i, j, k, v) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim || i == j {
                return Err(Error::Structural(format!("bad bracket index ({},{},{})", i + 1, j + 1, k + 1)));
            }
            g.f[idx(dim, i, j, k)] = v.clone();
            g.f[idx(dim, j, i, k)] = -v.clone();
        }
        Ok(g)
    }

    /// Takes a full flat array as is; call [`LieAlgebra::validate`] to check it.
    pub fn from_constants(name: impl Into<String>, dim: usize, f: Vec<Scalar>) -> Result<Self> {
        if f.len() != dim * dim * dim {
            return Err(Error::Structural(format!("expected {} constants, got {}", dim.pow(3), f.len())));
        }
        Ok(LieAlgebra { name: name.into(), dim, f })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn f(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.f[idx(self.dim, i, j, k)]
    }

    pub fn constants(&self) -> &[Scalar] {
        &self.f
    }

    pub fn is_abelian(&self) -> bool {
        self.f.iter().all(|v| v.is_zero())
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_structure_constants(self.dim, &self.f).expect("shape checked at construction")
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// `Z^k = X^i Y^j f_ij^k`.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::Structural(format!("vector length mismatch for dim {}", self.dim)));
        }
        let mut z = vec![Scalar::zero(); self.dim];
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for (k, zk) in z.iter_mut().enumerate() {
                    let fk = self.f(i, j, k);
                    if !fk.is_zero() {
                        *zk += &c * fk;
                    }
                }
            }
        }
        Ok(z)
    }

    /// Adjoint matrices `(X_i)_j^k = -f_ij^k`.
    pub fn adjoint(&self) -> AdjointRep {
        let d = self.dim;
        AdjointRep {
            x: (0..d).map(|i| Matrix::from_fn(d, d, |j, k| -self.f(i, j, k).clone())).collect(),
            y: (0..d).map(|k| Matrix::from_fn(d, d, |i, j| -self.f(i, j, k).clone())).collect(),
        }
    }

    /// Maximum violation of `[X_i, X_j] = f_ij^k X_k` over the adjoint matrices.
    pub fn representation_defect(&self) -> Scalar {
        let ad = self.adjoint();
        let d = self.dim;
        let mut worst = Scalar::zero();
        for i in 0..d {
            for j in 0..d {
                let mut rhs = Matrix::zeros(d, d);
                for k in 0..d {
                    rhs = rhs.add(&ad.x[k].scale(self.f(i, j, k)));
                }
                let m = ad.x[i].commutator(&ad.x[j]).sub(&rhs).max_abs();
                if m > worst {
                    worst = m;
                }
            }
        }
        worst
    }

    /// Structure constants in the basis `X'_m = (C^{-1})_m^i X_i`, i.e. the `f'` with
    /// `f_ij^l = C_i^m f'_mn^k C_j^n (C^{-1})_k^l`.
    pub fn transformed(&self, c: &Matrix) -> Result<LieAlgebra> {
        let d = self.dim;
        let ci = c.inverse().ok_or_else(|| Error::Singular("automorphism matrix not invertible".into()))?;
        let mut f = vec![Scalar::zero(); d * d * d];
        for m in 0..d {
            for n in 0..d {
                for k in 0..d {
                    let mut s = Scalar::zero();
                    for i in 0..d {
                        if ci.get(m, i).is_zero() {
                            continue;
                        }
                        for j in 0..d {
                            if ci.get(n, j).is_zero() {
                                continue;
                            }
                            for l in 0..d {
                                let v = self.f(i, j, l);
                                if !v.is_zero() {
                                    s += ci.get(m, i) * ci.get(n, j) * v * c.get(l, k);
                                }
                            }
                        }
                    }
                    f[idx(d, m, n, k)] = s;
                }
            }
        }
        Ok(LieAlgebra { name: format!("{}'", self.name), dim: d, f })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Primal,
    Dual,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Primal => "primal",
            Side::Dual => "dual",
        })
    }
}

/// `x[i]` is the matrix `(X_i)_j^k = -f_ij^k`; `y[k]` is `(Y^k)_ij = -f_ij^k`.
/// Built from dual constants these are the tilde matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointRep {
    pub x: Vec<Matrix>,
    pub y: Vec<Matrix>,
}

pub fn adjoint_matrices(g: &LieAlgebra, side: Side, dual: Option<&LieAlgebra>) -> Result<AdjointRep> {
    let alg = match side {
        Side::Primal => g,
        Side::Dual => {
            let d = dual.ok_or_else(|| Error::Structural("dual constants required for the dual side".into()))?;
            if d.dim() != g.dim() {
                return Err(Error::Structural("dual dimension mismatch".into()));
            }
            d
        }
    };
    let v = alg.validate();
    if !v.is_empty() {
        return Err(Error::Structural(format!("{} is not a Lie algebra: {}", alg.name(), v[0])));
    }
    Ok(alg.adjoint())
}

/// Isomorphism `C: g -> g'`, `C X_i = C_i^j X'_j`, stored as `c[i][j] = C_i^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub source: LieAlgebra,
    pub target: LieAlgebra,
    pub c: Matrix,
}

impl Automorphism {
    /// Checks invertibility and `f_ij^l = C_i^m f'_mn^k C_j^n (C^{-1})_k^l`.
    pub fn new(source: LieAlgebra, target: LieAlgebra, c: Matrix) -> Result<Self> {
        let d = source.dim();
        if target.dim() != d || c.rows() != d || c.cols() != d {
            return Err(Error::Structural("dimension mismatch".into()));
        }
        let expect = target
            .transformed(&c.inverse().ok_or_else(|| Error::Singular("C not invertible".into()))?)?;
        if expect.constants() != source.constants() {
            return Err(Error::Structural(format!("C does not map {} onto {}", source.name(), target.name())));
        }
        Ok(Automorphism { source, target, c })
    }

    /// The unique source algebra making `c` an isomorphism onto `target`.
    pub fn onto(target: LieAlgebra, c: Matrix) -> Result<Self> {
        let ci = c.inverse().ok_or_else(|| Error::Singular("C not invertible".into()))?;
        let source = target.transformed(&ci)?.with_name(format!("{}^C", target.name()));
        Ok(Automorphism { source, target, c })
    }

    pub fn identity(g: &LieAlgebra) -> Self {
        Automorphism { source: g.clone(), target: g.clone(), c: Matrix::identity(g.dim()) }
    }

    pub fn inverse(&self) -> Result<Self> {
        let ci = self.c.inverse().ok_or_else(|| Error::Singular("C not invertible".into()))?;
        Ok(Automorphism { source: self.target.clone(), target: self.source.clone(), c: ci })
    }
}

/// Pulls a bialgebra on `C.target` back to `C.source`:
/// `f~^ij_n = (C^-t)^i_k f~'^kl_m (C^-t)^j_l (C^t)^m_n`, `alpha = C^-t alpha'`, `beta = C beta'`.
pub fn apply_automorphism(c: &Automorphism, b: &JacobiLieBialgebra) -> Result<JacobiLieBialgebra> {
    let d = b.g.dim();
    if b.g.constants() != c.target.constants() {
        return Err(Error::Structural(format!("bialgebra primal {} is not the target of C", b.g.name())));
    }
    let cm = &c.c;
    let ci = cm.inverse().ok_or_else(|| Error::Singular("C not invertible".into()))?;
    let mut fd = vec![Scalar::zero(); d * d * d];
    for i in 0..d {
        for j in 0..d {
            for n in 0..d {
                let mut s = Scalar::zero();
                for k in 0..d {
                    for l in 0..d {
                        let a = ci.get(k, i) * ci.get(l, j);
                        if a.is_zero() {
                            continue;
                        }
                        for m in 0..d {
                            let v = b.g_dual.f(k, l, m);
                            if !v.is_zero() {
                                s += &a * v * cm.get(n, m);
                            }
                        }
                    }
                }
                fd[idx(d, i, j, n)] = s;
            }
        }
    }
    let alpha = (0..d).map(|i| (0..d).map(|m| ci.get(m, i) * &b.alpha[m]).sum()).collect();
    let beta = (0..d).map(|i| (0..d).map(|m| cm.get(i, m) * &b.beta[m]).sum()).collect();
    Ok(JacobiLieBialgebra {
        label: b.label.clone(),
        g: c.source.clone(),
        g_dual: LieAlgebra::from_constants(b.g_dual.name(), d, fd)?,
        alpha,
        beta,
    })
}
