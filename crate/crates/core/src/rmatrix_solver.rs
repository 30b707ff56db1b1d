//! The coboundary equation for classical r-matrices: residuals, exact solving,
//! triangular/quasitriangular classification and equivalence witnesses.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bialgebra_catalog::JacobiLieBialgebra;
use crate::error::{Error, Result};
use crate::exterior::{contract, schouten, wedge, Multivector};
use crate::lie_core::{apply_automorphism, Automorphism, Side};
use crate::linalg::{solve_affine, Matrix};
use crate::scalar::{self, Scalar};

/// `r^ij` (primal) or `r~_ij` (dual) as an antisymmetric matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RMatrix {
    pub side: Side,
    pub m: Matrix,
}

impl RMatrix {
    pub fn new(side: Side, m: Matrix) -> Result<Self> {
        if !m.is_antisymmetric() {
            return Err(Error::Structural("r-matrix must be antisymmetric".into()));
        }
        Ok(RMatrix { side, m })
    }

    pub fn zero(side: Side, dim: usize) -> Self {
        RMatrix { side, m: Matrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn to_multivector(&self) -> Multivector {
        Multivector::from_bivector_matrix(self.side, &self.m)
    }

    /// Strictly upper entries in lexicographic `(i,j)` order.
    pub fn upper(&self) -> Vec<Scalar> {
        pairs(self.dim()).into_iter().map(|(i, j)| self.m.get(i, j).clone()).collect()
    }

    pub fn from_upper(side: Side, dim: usize, v: &[Scalar]) -> Self {
        let mut m = Matrix::zeros(dim, dim);
        for ((i, j), x) in pairs(dim).into_iter().zip(v) {
            m.set(i, j, x.clone());
            m.set(j, i, -x.clone());
        }
        RMatrix { side, m }
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_multivector().render())
    }
}

impl Serialize for RMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect()
}

/// `T_i^jk`, stored flat at `(i*d + j)*d + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub dim: usize,
    pub data: Vec<Scalar>,
}

impl Residual {
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn max_abs(&self) -> Scalar {
        scalar::max_abs(&self.data)
    }
}

/// `T_i^jk = f~^jk_i + r^mk f_im^j - r^mj f_im^k - beta_i r^jk - alpha^j delta_i^k + alpha^k delta_i^j`;
/// the dual side is the same expression on the swapped bialgebra.
pub fn coboundary_residual(b: &JacobiLieBialgebra, r: &RMatrix, side: Side) -> Result<Residual> {
    if r.side != side {
        return Err(Error::Structural(format!("r-matrix lives on the {} side, asked for {side}", r.side)));
    }
    if !r.m.is_antisymmetric() || r.dim() != b.dim() {
        return Err(Error::Structural("r-matrix must be an antisymmetric dim x dim matrix".into()));
    }
    let o = b.oriented(side);
    let d = o.dim();
    let r = &r.m;
    let mut data = Vec::with_capacity(d * d * d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut t = o.g_dual.f(j, k, i).clone();
                for m in 0..d {
                    t += r.get(m, k) * o.g.f(i, m, j) - r.get(m, j) * o.g.f(i, m, k);
                }
                t -= &o.beta[i] * r.get(j, k);
                if i == k {
                    t -= &o.alpha[j];
                }
                if i == j {
                    t += &o.alpha[k];
                }
                data.push(t);
            }
        }
    }
    Ok(Residual { dim: d, data })
}

/// Matrix form `R_i = Y~_i + X_i^t r + r X_i + beta_i r`, `(R_i)^jk + alpha^j delta_i^k - alpha^k delta_i^j = 0`,
/// flattened row-wise over `(i,j,k)` as `A u = c` in the strictly upper entries `u` of `r`.
pub fn build_linear_system(b: &JacobiLieBialgebra, side: Side) -> (Matrix, Vec<Scalar>) {
    let o = b.oriented(side);
    let d = o.dim();
    let ad = o.g.adjoint();
    let ady = o.g_dual.adjoint();
    let lhs = |r: &Matrix, with_const: bool| -> Vec<Scalar> {
        let mut out = Vec::with_capacity(d * d * d);
        for i in 0..d {
            let mut ri = ad.x[i].transpose().mul(r).add(&r.mul(&ad.x[i])).add(&r.scale(&o.beta[i]));
            if with_const {
                ri = ri.add(&ady.y[i]);
            }
            for j in 0..d {
                for k in 0..d {
                    let mut v = ri.get(j, k).clone();
                    if with_const {
                        if i == k {
                            v += &o.alpha[j];
                        }
                        if i == j {
                            v -= &o.alpha[k];
                        }
                    }
                    out.push(v);
                }
            }
        }
        out
    };
    let ps = pairs(d);
    let c: Vec<Scalar> = lhs(&Matrix::zeros(d, d), true).into_iter().map(|v| -v).collect();
    let cols: Vec<Vec<Scalar>> = ps
        .iter()
        .map(|&(i, j)| {
            let mut e = Matrix::zeros(d, d);
            e.set(i, j, Scalar::one());
            e.set(j, i, -Scalar::one());
            lhs(&e, false)
        })
        .collect();
    let a = Matrix::from_fn(c.len(), ps.len(), |row, col| cols[col][row].clone());
    (a, c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionSpace {
    pub particular: RMatrix,
    pub basis: Vec<RMatrix>,
    pub free_dim: usize,
}

impl SolutionSpace {
    /// Whether `r` is `particular + span(basis)`.
    pub fn contains(&self, r: &RMatrix) -> bool {
        if r.side != self.particular.side || r.dim() != self.particular.dim() {
            return false;
        }
        let diff: Vec<Scalar> = r.upper().iter().zip(self.particular.upper()).map(|(a, b)| a - b).collect();
        if diff.iter().all(|v| v.is_zero()) {
            return true;
        }
        if self.basis.is_empty() {
            return false;
        }
        let n = diff.len();
        let a = Matrix::from_fn(n, self.basis.len(), |row, col| self.basis[col].upper()[row].clone());
        solve_affine(&a, &diff).is_some()
    }
}

/// All r-matrices solving the coboundary equation on `side`, or `None` when there are none.
pub fn solve_r(b: &JacobiLieBialgebra, side: Side) -> Option<SolutionSpace> {
    let d = b.dim();
    let (a, c) = build_linear_system(b, side);
    let sol = solve_affine(&a, &c)?;
    let basis: Vec<RMatrix> = sol.basis.iter().map(|v| RMatrix::from_upper(side, d, v)).collect();
    Some(SolutionSpace { particular: RMatrix::from_upper(side, d, &sol.particular), free_dim: basis.len(), basis })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Triangular,
    Quasitriangular,
    NotCoboundaryConsistent,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Triangular => "triangular",
            Kind::Quasitriangular => "quasitriangular",
            Kind::NotCoboundaryConsistent => "not-coboundary-consistent",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: Kind,
    /// `[r,r] - 2 X0 ^ r` (dual side: `[r~,r~] - 2 phi0 ^ r~`).
    pub residue: Multivector,
    /// `[X0, r]`.
    pub jacobi_condition: Multivector,
    /// `w = i_phi0(r) - X0`.
    pub contraction_defect: Multivector,
}

pub fn classify_r(b: &JacobiLieBialgebra, r: &RMatrix) -> Result<Classification> {
    let side = r.side;
    let o = b.oriented(side);
    let rm = r.to_multivector().with_side(Side::Primal);
    let x0 = o.x0();
    let two = scalar::int(2);
    let residue = schouten(&o.g, &rm, &rm)?.sub(&wedge(&x0, &rm)?.scale(&two))?;
    let jac = schouten(&o.g, &x0, &rm)?;
    let w = contract(&o.phi0(), &rm)?.sub(&x0)?;
    let kind = if !jac.is_zero() {
        Kind::NotCoboundaryConsistent
    } else if residue.is_zero() {
        Kind::Triangular
    } else {
        Kind::Quasitriangular
    };
    Ok(Classification {
        kind,
        residue: residue.with_side(side),
        jacobi_condition: jac.with_side(side),
        contraction_defect: w.with_side(side),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Whether `C` carries the second bialgebra's data onto the first's.
    pub intertwines: bool,
    /// `Delta = C^t r1 C - r2`.
    pub witness: Matrix,
}

/// Checks `C` as an isomorphism witness between `(b1, r1)` and `(b2, r2)`.
pub fn check_equivalence(
    b1: &JacobiLieBialgebra,
    r1: &RMatrix,
    b2: &JacobiLieBialgebra,
    r2: &RMatrix,
    c: &Automorphism,
) -> Result<Equivalence> {
    let d = b1.dim();
    if b2.dim() != d || r1.dim() != d || r2.dim() != d || c.c.rows() != d {
        return Err(Error::Structural("dimension mismatch".into()));
    }
    if c.source.constants() != b1.g.constants() || c.target.constants() != b2.g.constants() {
        return Err(Error::Structural("C must map the first primal algebra onto the second".into()));
    }
    let pulled = apply_automorphism(c, b2)?;
    let intertwines = pulled.g_dual.constants() == b1.g_dual.constants() && pulled.alpha == b1.alpha && pulled.beta == b1.beta;
    let delta = c.c.transpose().mul(&r1.m).mul(&c.c).sub(&r2.m);
    let ad = b2.g.adjoint();
    let invariant = (0..d).all(|i| {
        ad.x[i].transpose().mul(&delta).add(&delta.mul(&ad.x[i])).add(&delta.scale(&b2.beta[i])).is_zero()
    });
    Ok(Equivalence { equivalent: intertwines && invariant, intertwines, witness: delta })
}
