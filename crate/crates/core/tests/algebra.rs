use std::collections::BTreeMap;

use jacobi_lie::bialgebra_catalog::{sample_parameters, verify_bialgebra_conditions, Catalog, JacobiLieBialgebra};
use jacobi_lie::exterior::{ce_differential, contract, schouten, schouten_modified, wedge, CeMode, Multivector};
use jacobi_lie::lie_core::{adjoint_matrices, apply_automorphism, validate_structure_constants, Automorphism, LieAlgebra, Side};
use jacobi_lie::linalg::Matrix;
use jacobi_lie::rmatrix_solver::{build_linear_system, check_equivalence, classify_r, coboundary_residual, solve_r, Kind, RMatrix};
use jacobi_lie::scalar::{int, q, Scalar};
use jacobi_lie::Error;

fn catalog() -> Catalog {
    Catalog::builtin().unwrap()
}

fn e(i: usize) -> Multivector {
    Multivector::basis(3, Side::Primal, i)
}

fn a1a1() -> JacobiLieBialgebra {
    let g = LieAlgebra::abelian("A1", 2);
    JacobiLieBialgebra::new("a1a1", g.clone(), g, vec![int(0), int(1)], vec![int(1), int(0)]).unwrap()
}

fn bindings(pairs: &[(&str, Scalar)]) -> BTreeMap<String, Scalar> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

#[test]
fn structure_constant_validation() {
    let mut f = vec![int(0); 8];
    f[(0 * 2 + 1) * 2] = int(1);
    f[(1 * 2) * 2] = int(1);
    let v = validate_structure_constants(2, &f).unwrap();
    assert_eq!(v[0].to_string(), "antisymmetry at (1,2,1)");
    assert!(validate_structure_constants(3, &vec![int(0); 27]).unwrap().is_empty());
    let bad = LieAlgebra::from_brackets("bad", 3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (0, 2, 0, int(1))]).unwrap();
    assert!(!bad.validate().is_empty());
}

#[test]
fn adjoint_and_brackets_of_small_algebras() {
    let a2 = LieAlgebra::from_brackets("A2", 2, &[(0, 1, 0, int(1))]).unwrap();
    let ad = adjoint_matrices(&a2, Side::Primal, None).unwrap();
    assert_eq!(ad.x[1].get(0, 0), &int(1));
    assert_eq!(ad.x[1].get(0, 1), &int(0));
    assert_eq!(a2.bracket(&[int(1), int(0)], &[int(0), int(1)]).unwrap(), vec![int(1), int(0)]);
    assert_eq!(a2.representation_defect(), int(0));
    let ii = LieAlgebra::from_brackets("II", 3, &[(1, 2, 0, int(1))]).unwrap();
    let ad = ii.adjoint();
    assert_eq!(ad.x[1].get(2, 0), &int(-1));
    assert_eq!(ad.x[2].get(1, 0), &int(1));
    assert!(LieAlgebra::abelian("I", 3).adjoint().x.iter().all(Matrix::is_zero));
}

#[test]
fn automorphism_examples() {
    let b = a1a1();
    let id = Automorphism::identity(&b.g);
    assert_eq!(apply_automorphism(&id, &b).unwrap(), b);
    let lam = int(3);
    let c = Matrix::from_rows(vec![vec![int(1), int(0)], vec![int(0), lam.clone()]]);
    let aut = Automorphism::new(b.g.clone(), b.g.clone(), c).unwrap();
    let t = apply_automorphism(&aut, &b).unwrap();
    assert_eq!(t.beta[0], b.beta[0]);
    assert_eq!(t.alpha[1], &b.alpha[1] / &lam);
    assert!(verify_bialgebra_conditions(&t).is_valid());
    let a2 = LieAlgebra::from_brackets("A2", 2, &[(0, 1, 0, int(1))]).unwrap();
    let swap = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
    assert!(Automorphism::new(a2.clone(), a2, swap).is_err());
}

#[test]
fn exterior_examples() {
    assert_eq!(wedge(&e(0), &e(1)).unwrap().coeff(&[0, 1]), int(1));
    assert!(wedge(&e(1), &e(1)).unwrap().is_zero());
    let b12 = wedge(&e(0), &e(1)).unwrap();
    assert_eq!(wedge(&b12, &e(2)).unwrap().render(), "X1^X2^X3");
    assert_eq!(contract(&Multivector::basis(3, Side::Dual, 0), &b12).unwrap(), e(1));
    assert!(contract(&Multivector::basis(3, Side::Dual, 2), &b12).unwrap().is_zero());

    let v = LieAlgebra::from_brackets("V", 3, &[(0, 1, 1, int(-1)), (0, 2, 2, int(-1))]).unwrap();
    assert_eq!(schouten(&v, &e(0), &e(1)).unwrap(), e(1).scale(&int(-1)));
    assert!(schouten(&v, &e(2), &e(2)).unwrap().is_zero());
}

#[test]
fn contraction_condition_on_bianchi_v_row() {
    let cat = catalog();
    let inst = cat.entry("((V,-2X~1),(V.i,-2X2-2X3))").unwrap().instantiate(&cat.algebras, &bindings(&[("rp1", q(5, 7))]), None).unwrap();
    let r = Multivector::from_bivector_matrix(Side::Primal, inst.r.as_ref().unwrap());
    let w = contract(&inst.bialg.phi0(), &r).unwrap().sub(&inst.bialg.x0()).unwrap();
    assert_eq!(contract(&inst.bialg.phi0(), &r).unwrap().render(), "-2 X2 - 2 X3");
    assert!(w.is_zero());
}

#[test]
fn modified_bracket_and_twisted_differential_agree() {
    let b = a1a1();
    let r = Multivector::from_bivector_matrix(Side::Primal, &Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(-1), int(0)]]));
    let x1 = Multivector::basis(2, Side::Primal, 0);
    let ad = schouten_modified(&b.g, &x1, &r, &b.phi0(), Side::Primal).unwrap();
    assert_eq!(ad.render(), "-X1^X2");
    let d = ce_differential(&x1, CeMode::DStarX0, &b).unwrap();
    assert_eq!(d, ad);
    assert!(ce_differential(&b.x0(), CeMode::DStar, &b).unwrap().is_zero());
    let zero_phi = Multivector::zero(2, Side::Dual, 1);
    assert_eq!(schouten_modified(&b.g, &x1, &r, &zero_phi, Side::Primal).unwrap(), schouten(&b.g, &x1, &r).unwrap());
    let dual_q = Multivector::from_bivector_matrix(Side::Dual, &Matrix::from_rows(vec![vec![int(0), int(2)], vec![int(-2), int(0)]]));
    let zero_x = Multivector::zero(2, Side::Primal, 1);
    assert_eq!(schouten_modified(&b.g_dual, &dual_q, &dual_q, &zero_x, Side::Dual).unwrap(), schouten(&b.g_dual, &dual_q, &dual_q).unwrap());
}

#[test]
fn residue_of_bianchi_ii_family() {
    let ii = LieAlgebra::from_brackets("II", 3, &[(1, 2, 0, int(1))]).unwrap();
    let (a, bb, b) = (q(2, 3), q(-1, 4), q(5, 2));
    let mut r = Multivector::zero(3, Side::Primal, 2);
    r.add_term(&[0, 1], a);
    r.add_term(&[0, 2], bb);
    r.add_term(&[1, 2], -(int(1) + &b));
    let x0 = e(0).scale(&b);
    let w = schouten(&ii, &r, &r).unwrap().sub(&wedge(&x0, &r).unwrap().scale(&int(2))).unwrap();
    assert_eq!(w.coeff(&[0, 1, 2]), -(int(2) * (&b + int(1))));
}

#[test]
fn catalog_rows_satisfy_bialgebra_conditions() {
    let cat = catalog();
    assert_eq!(cat.entries.len(), 76);
    for e in &cat.entries {
        for inst in sample_parameters(e, &cat.algebras, 5, 21).unwrap() {
            assert!(verify_bialgebra_conditions(&inst.bialg).is_valid(), "{} at {:?}", e.label, inst.bindings);
        }
    }
    let v = cat.entry("((VI_a,-(a+1)X~1),(VI_b.v,-X2-X3))").unwrap();
    assert_eq!(sample_parameters(v, &cat.algebras, 5, 1).unwrap().len(), 5);
}

#[test]
fn catalog_loading_examples() {
    let cat = catalog();
    let ii = cat.entry("((II,0),(V,bX1))").unwrap();
    assert_eq!(ii.params, vec!["b"]);
    assert_eq!(ii.r.as_ref().unwrap().len(), 3);
    let a = cat.entry("((A1,0),(A2,-X2))").unwrap();
    assert_eq!(a.r.as_ref().unwrap().len(), 1);
    assert!(matches!(cat.entry("nope"), Err(Error::UnknownLabel(_))));
    let s1 = sample_parameters(ii, &cat.algebras, 4, 9).unwrap();
    let s2 = sample_parameters(ii, &cat.algebras, 4, 9).unwrap();
    assert_eq!(s1.iter().map(|i| i.bindings.clone()).collect::<Vec<_>>(), s2.iter().map(|i| i.bindings.clone()).collect::<Vec<_>>());
    for inst in sample_parameters(ii, &cat.algebras, 50, 2).unwrap() {
        assert_ne!(inst.bindings["b"], int(-2));
    }
}

#[test]
fn printed_r_matrices_have_zero_residual_and_lie_in_solution_space() {
    let cat = catalog();
    for e in &cat.entries {
        for inst in sample_parameters(e, &cat.algebras, 5, 33).unwrap() {
            for side in [Side::Primal, Side::Dual] {
                let Some(m) = inst.r_on(side) else { continue };
                let r = RMatrix::new(side, m.clone()).unwrap();
                assert!(coboundary_residual(&inst.bialg, &r, side).unwrap().is_zero(), "{} {side}", e.label);
                let space = solve_r(&inst.bialg, side).expect("feasible");
                assert!(space.contains(&r), "{} {side}", e.label);
            }
        }
    }
}

#[test]
fn residual_examples() {
    let b = a1a1();
    let r = RMatrix::from_upper(Side::Primal, 2, &[int(1)]);
    assert!(coboundary_residual(&b, &r, Side::Primal).unwrap().is_zero());
    let trivial = JacobiLieBialgebra::trivial(LieAlgebra::from_brackets("V", 3, &[(0, 1, 1, int(-1)), (0, 2, 2, int(-1))]).unwrap());
    assert!(coboundary_residual(&trivial, &RMatrix::zero(Side::Primal, 3), Side::Primal).unwrap().is_zero());
    let cat = catalog();
    let inst = cat.entry("((II,0),(V,bX1))").unwrap().instantiate(&cat.algebras, &bindings(&[("b", q(3, 2))]), None).unwrap();
    let rd = RMatrix::from_upper(Side::Dual, 3, &[int(0), int(0), q(2, 7)]);
    assert!(coboundary_residual(&inst.bialg, &rd, Side::Dual).unwrap().is_zero());
}

#[test]
fn linear_system_matches_residual() {
    let cat = catalog();
    for e in cat.entries.iter().step_by(5) {
        let inst = sample_parameters(e, &cat.algebras, 1, 4).unwrap().remove(0);
        for side in [Side::Primal, Side::Dual] {
            let (a, c) = build_linear_system(&inst.bialg, side);
            let d = inst.bialg.dim();
            let u: Vec<Scalar> = (0..d * (d - 1) / 2).map(|i| q(i as i64 + 1, 3)).collect();
            let r = RMatrix::from_upper(side, d, &u);
            let res = coboundary_residual(&inst.bialg, &r, side).unwrap();
            for row in 0..a.rows() {
                let au: Scalar = (0..a.cols()).map(|k| a.get(row, k) * &u[k]).sum();
                assert_eq!(-(au - &c[row]), res.data[row], "{} {side}", e.label);
            }
        }
    }
}

#[test]
fn solver_examples() {
    let s = solve_r(&a1a1(), Side::Primal).unwrap();
    assert_eq!((s.free_dim, s.particular.to_string()), (0, "X1^X2".to_string()));
    let cat = catalog();
    let ii = cat.entry("((II,0),(I,X1))").unwrap().instantiate(&cat.algebras, &BTreeMap::new(), None).unwrap();
    let s = solve_r(&ii.bialg, Side::Primal).unwrap();
    assert_eq!(s.free_dim, 2);
    assert_eq!(s.particular.to_string(), "-X2^X3");
    let i3 = cat.entry("((I,0),(III,-2X1))").unwrap().instantiate(&cat.algebras, &BTreeMap::new(), None).unwrap();
    let s = solve_r(&i3.bialg, Side::Dual).unwrap();
    assert_eq!(s.free_dim, 2);
    let abelian = JacobiLieBialgebra::trivial(LieAlgebra::abelian("I", 3));
    let s = solve_r(&abelian, Side::Primal).unwrap();
    assert_eq!((s.free_dim, s.particular.m.is_zero()), (3, true));
    let bad = JacobiLieBialgebra::new("bad", LieAlgebra::abelian("A1", 2), LieAlgebra::abelian("A1", 2), vec![int(1), int(0)], vec![int(0), int(0)]).unwrap();
    assert!(solve_r(&bad, Side::Primal).is_none());
}

#[test]
fn classification_examples() {
    let cat = catalog();
    let v = cat.entry("((V,-2X~1),(V.i,-2X2-2X3))").unwrap().instantiate(&cat.algebras, &BTreeMap::new(), None).unwrap();
    let c = classify_r(&v.bialg, &RMatrix::new(Side::Primal, v.r.clone().unwrap()).unwrap()).unwrap();
    assert_eq!(c.kind, Kind::Triangular);
    let trivial = JacobiLieBialgebra::trivial(LieAlgebra::abelian("I", 3));
    let c = classify_r(&trivial, &RMatrix::zero(Side::Primal, 3)).unwrap();
    assert_eq!(c.kind, Kind::Triangular);
    assert!(c.contraction_defect.is_zero());
    let ii = cat.entry("((II,0),(V,bX1))").unwrap().instantiate(&cat.algebras, &bindings(&[("b", int(3))]), None).unwrap();
    let c = classify_r(&ii.bialg, &RMatrix::new(Side::Primal, ii.r.clone().unwrap()).unwrap()).unwrap();
    assert_eq!(c.kind, Kind::Quasitriangular);
    assert_eq!(num_traits::Signed::abs(&c.residue.coeff(&[0, 1, 2])), int(8));
}

#[test]
fn equivalence_examples() {
    let b = a1a1();
    let r1 = RMatrix::from_upper(Side::Primal, 2, &[int(1)]);
    let id = Automorphism::identity(&b.g);
    let same = check_equivalence(&b, &r1, &b, &r1, &id).unwrap();
    assert!(same.equivalent && same.witness.is_zero());
    let r2 = RMatrix::from_upper(Side::Primal, 2, &[int(2)]);
    let e = check_equivalence(&b, &r1, &b, &r2, &id).unwrap();
    assert!(!e.equivalent);
    assert_eq!(e.witness.get(0, 1), &int(-1));

    let cat = catalog();
    let inst = cat.entry("((II,0),(I,X1))").unwrap().instantiate(&cat.algebras, &BTreeMap::new(), None).unwrap();
    let r = RMatrix::new(Side::Primal, inst.r.clone().unwrap()).unwrap();
    let space = solve_r(&inst.bialg, Side::Primal).unwrap();
    let id = Automorphism::identity(&inst.bialg.g);
    let ad = inst.bialg.g.adjoint();
    for basis in &space.basis {
        let shifted = RMatrix { side: Side::Primal, m: r.m.add(&basis.m) };
        let invariant = (0..3).all(|i| {
            let dl = basis.m.scale(&int(-1));
            ad.x[i].transpose().mul(&dl).add(&dl.mul(&ad.x[i])).add(&dl.scale(&inst.bialg.beta[i])).is_zero()
        });
        assert_eq!(check_equivalence(&inst.bialg, &r, &inst.bialg, &shifted, &id).unwrap().equivalent, invariant);
    }
}

#[test]
fn equivalence_is_reflexive_and_symmetric_on_catalog() {
    let cat = catalog();
    for e in cat.entries.iter().filter(|e| e.r.is_some()) {
        let inst = sample_parameters(e, &cat.algebras, 1, 8).unwrap().remove(0);
        let r = RMatrix::new(Side::Primal, inst.r.clone().unwrap()).unwrap();
        let d = inst.bialg.dim();
        let c = Matrix::from_fn(d, d, |i, j| if i == j { int(2) } else if j == i + 1 { int(1) } else { int(0) });
        let Ok(aut) = Automorphism::onto(inst.bialg.g.clone(), c) else { continue };
        let b1 = apply_automorphism(&aut, &inst.bialg).unwrap();
        let r1 = RMatrix { side: Side::Primal, m: aut.c.inverse().unwrap().transpose().mul(&r.m).mul(&aut.c.inverse().unwrap()) };
        assert!(check_equivalence(&inst.bialg, &r, &inst.bialg, &r, &Automorphism::identity(&inst.bialg.g)).unwrap().equivalent);
        let fwd = check_equivalence(&b1, &r1, &inst.bialg, &r, &aut).unwrap();
        let back = check_equivalence(&inst.bialg, &r, &b1, &r1, &aut.inverse().unwrap()).unwrap();
        assert!(fwd.intertwines && back.intertwines, "{}", e.label);
        assert_eq!(fwd.equivalent, back.equivalent, "{}", e.label);
    }
}
