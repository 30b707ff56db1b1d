use std::collections::BTreeMap;
use std::sync::OnceLock;

use jacobi_lie::bialgebra_catalog::{load_algebras, sample_parameters, verify_bialgebra_conditions, Catalog};
use jacobi_lie::exterior::{ce_derivation, ce_differential, schouten, wedge, CeMode, Multivector};
use jacobi_lie::lie_core::{apply_automorphism, Automorphism, LieAlgebra, Side};
use jacobi_lie::linalg::Matrix;
use jacobi_lie::scalar::{int, q, Scalar};
use jacobi_lie::symexpr::{parse, Context, Expr, Func};
use proptest::prelude::*;

fn algebras3() -> &'static [LieAlgebra] {
    static ALGS: OnceLock<Vec<LieAlgebra>> = OnceLock::new();
    ALGS.get_or_init(|| {
        let cat = load_algebras(jacobi_lie::data::ALGEBRAS).unwrap();
        let v = q(1, 3);
        cat.algebras.iter().filter(|t| t.dim == 3).map(|t| t.instantiate(t.param.as_ref().map(|_| &v)).unwrap()).collect()
    })
}

fn multivector(dim: usize, degree: usize, coeffs: &[i64]) -> Multivector {
    let mut m = Multivector::zero(dim, Side::Primal, degree);
    let subsets: Vec<Vec<usize>> = (0u32..1 << dim)
        .filter(|s| s.count_ones() as usize == degree)
        .map(|s| (0..dim).filter(|i| s >> i & 1 == 1).collect())
        .collect();
    for (idx, c) in subsets.iter().zip(coeffs) {
        m.add_term(idx, int(*c));
    }
    m
}

fn sign(e: usize) -> Scalar {
    if e % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

fn mv_strategy() -> impl Strategy<Value = (usize, Vec<i64>)> {
    (1usize..=3, prop::collection::vec(-3i64..=3, 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn schouten_graded_symmetry((k, a) in mv_strategy(), (l, b) in mv_strategy()) {
        for g in algebras3() {
            let p = multivector(3, k, &a);
            let p2 = multivector(3, l, &b);
            let lhs = schouten(g, &p, &p2).unwrap();
            let rhs = schouten(g, &p2, &p).unwrap().scale(&sign(k * l));
            prop_assert_eq!(lhs, rhs, "{}", g.name());
        }
    }

    #[test]
    fn schouten_leibniz((k, a) in mv_strategy(), (l, b) in mv_strategy(), (m, c) in mv_strategy()) {
        for g in algebras3() {
            let (p, p1, p2) = (multivector(3, k, &a), multivector(3, l, &b), multivector(3, m, &c));
            let lhs = schouten(g, &p, &wedge(&p1, &p2).unwrap()).unwrap();
            let t1 = wedge(&schouten(g, &p, &p1).unwrap(), &p2).unwrap();
            let t2 = wedge(&p1, &schouten(g, &p, &p2).unwrap()).unwrap().scale(&sign(l * (k + 1)));
            prop_assert_eq!(lhs, t1.add(&t2).unwrap(), "{}", g.name());
        }
    }

    #[test]
    fn schouten_jacobi((k, a) in mv_strategy(), (l, b) in mv_strategy(), (m, c) in mv_strategy()) {
        for g in algebras3() {
            let (p, p1, p2) = (multivector(3, k, &a), multivector(3, l, &b), multivector(3, m, &c));
            let s = |x: &Multivector, y: &Multivector| schouten(g, x, y).unwrap();
            let total = s(&s(&p, &p1), &p2).scale(&sign(k * m))
                .add(&s(&s(&p2, &p), &p1).scale(&sign(l * m))).unwrap()
                .add(&s(&s(&p1, &p2), &p).scale(&sign(k * l))).unwrap();
            prop_assert!(total.is_zero(), "{}: {}", g.name(), total);
        }
    }

    #[test]
    fn automorphism_preserves_bialgebra_validity(row in 0usize..76, c in prop::collection::vec(-2i64..=2, 9)) {
        let cat = Catalog::builtin().unwrap();
        let e = &cat.entries[row % cat.entries.len()];
        let inst = sample_parameters(e, &cat.algebras, 1, 3).unwrap().remove(0);
        let d = inst.bialg.dim();
        let m = Matrix::from_fn(d, d, |i, j| int(c[i * 3 + j]) + if i == j { int(3) } else { int(0) });
        prop_assume!(m.inverse().is_some());
        let aut = Automorphism::onto(inst.bialg.g.clone(), m).unwrap();
        let pulled = apply_automorphism(&aut, &inst.bialg).unwrap();
        prop_assert!(pulled.g.is_valid() && pulled.g_dual.is_valid());
        prop_assert!(verify_bialgebra_conditions(&pulled).is_valid(), "{}", e.label);
    }

    #[test]
    fn render_parse_roundtrip(e in expr_strategy(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let ctx = Context::new(&["x", "y"], &["b"]);
        let back = parse(&e.render(), &ctx).unwrap();
        let env = |n: &str| match n { "x" => Some(x), "y" => Some(y), "b" => Some(0.75), _ => None };
        let (u, v) = (e.eval_with(&env).unwrap(), back.eval_with(&env).unwrap());
        prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0), "{} vs {}", e, back);
    }

    #[test]
    fn derivative_matches_finite_difference(e in expr_strategy(), x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let env = |xx: f64| move |n: &str| match n { "x" => Some(xx), "y" => Some(y), "b" => Some(0.75), _ => None };
        let h = 1e-6;
        let fd = (e.eval_with(&env(x + h)).unwrap() - e.eval_with(&env(x - h)).unwrap()) / (2.0 * h);
        let d = e.diff("x").eval_with(&env(x)).unwrap();
        let f = e.eval_with(&env(x)).unwrap();
        prop_assert!((fd - d).abs() <= 1e-5 * d.abs().max(f.abs()).max(1.0), "{}: {} vs {}", e, fd, d);
    }

    #[test]
    fn derivative_is_linear(a in expr_strategy(), b in expr_strategy(), x in -1.5f64..1.5) {
        let env = |n: &str| match n { "x" => Some(x), "y" => Some(0.5), "b" => Some(0.75), _ => None };
        let lhs = (Expr::int(2) * a.clone() + b.clone()).diff("x").eval_with(&env).unwrap();
        let rhs = 2.0 * a.diff("x").eval_with(&env).unwrap() + b.diff("x").eval_with(&env).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
        let prod = (a.clone() * b.clone()).diff("x").eval_with(&env).unwrap();
        let rule = a.diff("x").eval_with(&env).unwrap() * b.eval_with(&env).unwrap()
            + a.eval_with(&env).unwrap() * b.diff("x").eval_with(&env).unwrap();
        prop_assert!((prod - rule).abs() <= 1e-9 * prod.abs().max(1.0));
    }
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        Just(Expr::param("b")),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::add),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::mul),
            (inner.clone(), 0i32..3).prop_map(|(e, n)| Expr::pow(e, n)),
            inner.clone().prop_map(|e| -e),
            (prop_oneof![Just(Func::Exp), Just(Func::Sinh), Just(Func::Cosh), Just(Func::Sin), Just(Func::Cos)], inner)
                .prop_map(|(f, e)| Expr::func(f, Expr::mul(vec![Expr::num(q(1, 2)), e]))),
        ]
    })
}

#[test]
fn d_squared_vanishes_on_every_algebra() {
    let cat = load_algebras(jacobi_lie::data::ALGEBRAS).unwrap();
    for t in &cat.algebras {
        let v = q(2, 5);
        let g = t.instantiate(t.param.as_ref().map(|_| &v)).unwrap();
        let d = g.dim();
        for deg in 0..=d {
            for s in 0u32..1 << d {
                if s.count_ones() as usize != deg {
                    continue;
                }
                let mut v = Multivector::zero(d, Side::Primal, deg);
                v.add_term(&(0..d).filter(|i| s >> i & 1 == 1).collect::<Vec<_>>(), int(1));
                let dd = ce_derivation(&g, &ce_derivation(&g, &v).unwrap()).unwrap();
                assert!(dd.is_zero(), "{} on {}", g.name(), v);
            }
        }
    }
}

#[test]
fn twisted_differentials_square_to_zero_on_catalog() {
    let cat = Catalog::builtin().unwrap();
    for e in &cat.entries {
        for inst in sample_parameters(e, &cat.algebras, 2, 17).unwrap() {
            let b = &inst.bialg;
            let d = b.dim();
            for (mode, side) in [(CeMode::DStar, Side::Primal), (CeMode::DStarX0, Side::Primal), (CeMode::D, Side::Dual), (CeMode::DPhi0, Side::Dual)] {
                for i in 0..d {
                    let v = Multivector::basis(d, side, i);
                    let once = ce_differential(&v, mode, b).unwrap();
                    assert!(ce_differential(&once, mode, b).unwrap().is_zero(), "{} {mode:?}", e.label);
                }
                let s = Multivector::scalar(d, side, int(1));
                let once = ce_differential(&s, mode, b).unwrap();
                assert!(ce_differential(&once, mode, b).unwrap().is_zero(), "{} {mode:?} scalar", e.label);
            }
        }
    }
}

#[test]
fn chart_and_table_expressions_differentiate_consistently() {
    use jacobi_lie::group_geom::builtin_charts;
    use jacobi_lie::jacobi_bracket::builtin_golden;
    use jacobi_lie::numeric::sample_points;
    let cat = Catalog::builtin().unwrap();
    let mut exprs: Vec<(Vec<String>, Expr)> = Vec::new();
    for c in builtin_charts().unwrap() {
        for f in c.xl.iter().chain(&c.xr).flatten() {
            exprs.push((c.coords.clone(), f.clone()));
        }
    }
    for g in builtin_golden(&cat).unwrap() {
        let d = cat.entry(&g.label).unwrap().alpha.len();
        let coords: Vec<String> = ["x", "y", "z"][..d].iter().map(|s| s.to_string()).collect();
        exprs.push((coords.clone(), g.sigma.clone()));
        for (_, _, e) in &g.pairs {
            exprs.push((coords.clone(), e.clone()));
        }
    }
    let params: BTreeMap<String, Scalar> = [("a", q(1, 3)), ("b", q(2, 5))].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let h = 1e-6;
    for (coords, e) in &exprs {
        let e = e.bind_params(&params);
        for p in sample_points(coords, 10, 2.0, 5) {
            for c in coords {
                let at = |dx: f64| {
                    let mut p2 = p.clone();
                    *p2.get_mut(c).unwrap() += dx;
                    e.eval_with(&|n| p2.get(n).copied()).unwrap()
                };
                let fd = (at(h) - at(-h)) / (2.0 * h);
                let d = e.diff(c).eval_with(&|n| p.get(n).copied()).unwrap();
                assert!((fd - d).abs() <= 1e-5 * d.abs().max(1.0), "{e} d/d{c}: {fd} vs {d}");
            }
        }
    }
}
