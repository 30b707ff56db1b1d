//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::time::Instant;

use jacobi_lie::bialgebra_catalog::{load_algebras, sample_parameters, verify_bialgebra_conditions, Catalog};
use jacobi_lie::exterior::{ce_derivation, schouten, wedge, Multivector};
use jacobi_lie::group_geom::{builtin_charts, closure_defect, identity_defect, GroupChart};
use jacobi_lie::integrable::{
    builtin_example, check_involution, check_s_relations, constants_of_motion, gcybe_residual, max_violation, Poly,
};
use jacobi_lie::jacobi_bracket::{
    build_without_conformal_factor, builtin_golden, compare_with_table, realize_row, row_bindings, verify_structure_axioms, GoldenRow,
};
use jacobi_lie::lie_core::{LieAlgebra, Side};
use jacobi_lie::numeric::{rel_err, sample_points, DEFAULT_SEED};
use jacobi_lie::rmatrix_solver::{classify_r, coboundary_residual, solve_r, RMatrix};
use jacobi_lie::scalar::{self, int, q, Scalar};
use jacobi_lie::symexpr::{parse, Context, Expr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POINTS: usize = 100;
const HALF_WIDTH: f64 = 2.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct World {
    cat: Catalog,
    charts: Vec<GroupChart>,
    golden: Vec<GoldenRow>,
}

fn sides() -> [Side; 2] {
    [Side::Primal, Side::Dual]
}

fn catalog_validity(w: &World) -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for e in &w.cat.entries {
        let insts = sample_parameters(e, &w.cat.algebras, 5, DEFAULT_SEED).unwrap();
        for inst in insts {
            checked += 1;
            if !verify_bialgebra_conditions(&inst.bialg).is_valid() {
                bad.push(e.label.clone());
            }
        }
    }
    outcome(bad.is_empty() && checked >= 5 * w.cat.entries.len(), format!("{} rows, {checked} instances, failing {bad:?}", w.cat.entries.len()))
}

fn coboundary_reproduction(w: &World) -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for e in &w.cat.entries {
        for inst in sample_parameters(e, &w.cat.algebras, 5, DEFAULT_SEED).unwrap() {
            for side in sides() {
                let Some(m) = inst.r_on(side) else { continue };
                checked += 1;
                let r = RMatrix::new(side, m.clone()).unwrap();
                if !coboundary_residual(&inst.bialg, &r, side).unwrap().is_zero() {
                    bad.push(format!("{} {side}", e.label));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} printed matrices, failing {bad:?}"))
}

fn classification_reproduction(w: &World) -> Outcome {
    let mut checked = 0;
    let mut bad = BTreeMap::new();
    for e in &w.cat.entries {
        for inst in sample_parameters(e, &w.cat.algebras, 5, DEFAULT_SEED).unwrap() {
            for side in sides() {
                let (Some(m), Some(printed)) = (inst.r_on(side), inst.residue_on(side)) else { continue };
                checked += 1;
                let c = classify_r(&inst.bialg, &RMatrix::new(side, m.clone()).unwrap()).unwrap();
                if c.residue != *printed {
                    bad.entry(format!("{} {side}", e.label))
                        .or_insert_with(|| format!("at {}: computed {}, printed {}", show(&inst.bindings), c.residue, printed));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} residues, mismatches {bad:?}"))
}

fn show(b: &BTreeMap<String, Scalar>) -> String {
    b.iter().map(|(k, v)| format!("{k}={}", scalar::fmt(v))).collect::<Vec<_>>().join(",")
}

fn solver_completeness(w: &World) -> Outcome {
    let mut rows = 0;
    let mut bad = Vec::new();
    for e in &w.cat.entries {
        let inst = sample_parameters(e, &w.cat.algebras, 1, DEFAULT_SEED).unwrap().remove(0);
        for side in sides() {
            let Some(m) = inst.r_on(side) else { continue };
            let template = match side {
                Side::Primal => e.r.as_ref(),
                Side::Dual => e.r_dual.as_ref(),
            };
            let printed_free = e.free.iter().filter(|f| template.is_some_and(|t| t.iter().any(|(c, _)| c.free_params().contains(*f)))).count();
            rows += 1;
            let r = RMatrix::new(side, m.clone()).unwrap();
            match solve_r(&inst.bialg, side) {
                Some(s) if s.contains(&r) && s.free_dim == printed_free => {}
                Some(s) => bad.push(format!("{} {side}: free_dim {} vs {printed_free}, contains {}", e.label, s.free_dim, s.contains(&r))),
                None => bad.push(format!("{} {side}: infeasible", e.label)),
            }
        }
    }
    outcome(bad.is_empty() && rows >= 10, format!("{rows} rows, failing {bad:?}"))
}

fn at(e: &Expr, p: &BTreeMap<String, f64>) -> f64 {
    e.eval_with(&|n| p.get(n).copied()).unwrap_or(f64::NAN)
}

struct ReferenceSweep {
    sigma_bad: Vec<String>,
    bracket_bad: Vec<String>,
    rows: usize,
}

fn reference_sweep(w: &World) -> ReferenceSweep {
    let mut out = ReferenceSweep { sigma_bad: vec![], bracket_bad: vec![], rows: 0 };
    for g in &w.golden {
        let b = row_bindings(w.cat.entry(&g.label).unwrap(), &w.cat.algebras, DEFAULT_SEED).unwrap();
        let row = match realize_row(&w.cat, &w.charts, &g.label, g.side, &b) {
            Ok(r) => r,
            Err(e) => {
                out.sigma_bad.push(format!("{} {}: {e}", g.label, g.side));
                continue;
            }
        };
        out.rows += 1;
        let pts = sample_points(&row.structure.coords, POINTS, HALF_WIDTH, DEFAULT_SEED);
        let sigma = g.sigma.bind_params(&b);
        let worst = pts.iter().map(|p| rel_err(at(&row.structure.sigma, p), at(&sigma, p))).fold(0.0, f64::max);
        if !(worst <= 1e-9) {
            out.sigma_bad.push(format!("{} {}: {worst:.2e}", g.label, g.side));
        }
        let pairs: Vec<_> = g.pairs.iter().map(|(a, c, e)| (*a, *c, e.bind_params(&b))).collect();
        match compare_with_table(&row.structure, &pairs, &pts) {
            Ok(errs) => {
                for e in errs.iter().filter(|e| !(e.max_rel_err <= 1e-9)) {
                    out.bracket_bad.push(format!("{} {} {{{},{}}}: {:.2e}", g.label, g.side, e.pair.0, e.pair.1, e.max_rel_err));
                }
            }
            Err(e) => out.bracket_bad.push(format!("{} {}: {e}", g.label, g.side)),
        }
    }
    out
}

const MUTATION_ROWS: [(&str, Side); 6] = [
    ("((III,-bX~2+bX~3),(III.iv,bX1))", Side::Primal),
    ("((III,-bX~2+bX~3),(III.iv,bX1))", Side::Dual),
    ("((IV,-X~1),(III.vi,-X2-X3))", Side::Primal),
    ("((VI_0,X~3),(III.ix,-X1))", Side::Primal),
    ("((VI_a,-(a+1)X~1),(III.v,1/(a-1)(X2-aX3)))", Side::Primal),
    ("((VI_a,-(a-1)X~1),(III.v,1/(a+1)(X2-aX3)))", Side::Primal),
];

fn structure_axioms(w: &World) -> Outcome {
    let mut rows = 0;
    let mut bad = Vec::new();
    for g in &w.golden {
        let entry = w.cat.entry(&g.label).unwrap();
        let b = row_bindings(entry, &w.cat.algebras, DEFAULT_SEED).unwrap();
        let Ok(row) = realize_row(&w.cat, &w.charts, &g.label, g.side, &b) else { continue };
        let pts = sample_points(&row.structure.coords, POINTS, HALF_WIDTH, DEFAULT_SEED);
        let v = verify_structure_axioms(&row.structure, &pts).unwrap().max();
        rows += 1;
        if !(v < 1e-8) {
            bad.push(format!("{} {}: {v:.2e}", g.label, g.side));
        }
    }
    let mut weak = Vec::new();
    for (label, side) in MUTATION_ROWS {
        let b = row_bindings(w.cat.entry(label).unwrap(), &w.cat.algebras, DEFAULT_SEED).unwrap();
        let row = realize_row(&w.cat, &w.charts, label, side, &b).unwrap();
        let pts = sample_points(&row.structure.coords, POINTS, HALF_WIDTH, DEFAULT_SEED);
        let mutant = build_without_conformal_factor(&row.chart, &row.r, &row.bialg.alpha).unwrap();
        let v = verify_structure_axioms(&mutant, &pts).unwrap().max();
        if !(v > 1e-2) {
            weak.push(format!("{label} {side}: {v:.2e}"));
        }
    }
    outcome(
        bad.is_empty() && weak.is_empty() && rows >= 10,
        format!("{rows} reference rows, failing {bad:?}; {} mutants, undetected {weak:?}", MUTATION_ROWS.len()),
    )
}

fn integrable_example(w: &World) -> Outcome {
    let sys = builtin_example(&w.cat).unwrap();
    let ctx = Context::new(&sys.vars, &[] as &[String]);
    let is = constants_of_motion(&sys, 4).unwrap();
    let rp = sys.vars.iter().position(|v| v == "rp1").unwrap();
    let closed = is.iter().enumerate().all(|(k, i)| {
        let want = Poly::from_expr(&parse(&format!("2*((y+1)*p_x)^{}", k + 1), &ctx).unwrap(), &sys.vars).unwrap();
        *i == want && !i.depends_on(rp)
    });
    let pts = sample_points(&sys.phase.coords, POINTS, HALF_WIDTH, DEFAULT_SEED);
    let rel = check_s_relations(&sys, &pts);
    let params = BTreeMap::from([("rp1".to_string(), 0.7)]);
    let inv = check_involution(&sys.phase, &sys.vars, &is, &pts, &params);
    let gcybe = max_violation(&sys, &gcybe_residual(&sys), &pts, &params);
    let pass = closed && rel.holds() && inv < 1e-10 && gcybe < 1e-9;
    outcome(pass, format!("I_1..I_4 closed form {closed}, relations exact {}, involution {inv:.2e}, GCYBE residual {gcybe:.3e}", rel.holds()))
}

fn random_multivector(rng: &mut ChaCha8Rng) -> (usize, Multivector) {
    let k = rng.gen_range(1..=3usize);
    let mut m = Multivector::zero(3, Side::Primal, k);
    for s in (0u32..8).filter(|s| s.count_ones() as usize == k) {
        m.add_term(&(0..3).filter(|i| s >> i & 1 == 1).collect::<Vec<_>>(), int(rng.gen_range(-3..=3)));
    }
    (k, m)
}

fn sign(e: usize) -> Scalar {
    int(if e % 2 == 0 { 1 } else { -1 })
}

fn schouten_failures(g: &LieAlgebra, trials: usize, rng: &mut ChaCha8Rng) -> usize {
    let s = |x: &Multivector, y: &Multivector| schouten(g, x, y).unwrap();
    let mut fails = 0;
    for _ in 0..trials {
        let ((k, a), (l, b), (m, c)) = (random_multivector(rng), random_multivector(rng), random_multivector(rng));
        let symmetry = s(&a, &b) == s(&b, &a).scale(&sign(k * l));
        let leibniz = s(&a, &wedge(&b, &c).unwrap())
            == wedge(&s(&a, &b), &c).unwrap().add(&wedge(&b, &s(&a, &c)).unwrap().scale(&sign(l * (k + 1)))).unwrap();
        let jacobi = s(&s(&a, &b), &c)
            .scale(&sign(k * m))
            .add(&s(&s(&c, &a), &b).scale(&sign(l * m)))
            .unwrap()
            .add(&s(&s(&b, &c), &a).scale(&sign(k * l)))
            .unwrap()
            .is_zero();
        fails += usize::from(!(symmetry && leibniz && jacobi));
    }
    fails
}

fn property_suites(w: &World) -> Outcome {
    let algs = load_algebras(jacobi_lie::data::ALGEBRAS).unwrap();
    let v = q(1, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut schouten_bad = Vec::new();
    let mut dd_bad = Vec::new();
    for t in &algs.algebras {
        let g = t.instantiate(t.param.as_ref().map(|_| &v)).unwrap();
        if g.dim() == 3 && schouten_failures(&g, 100, &mut rng) > 0 {
            schouten_bad.push(g.name().to_string());
        }
        let d = g.dim();
        for s in 0u32..1 << d {
            let mut x = Multivector::zero(d, Side::Primal, s.count_ones() as usize);
            x.add_term(&(0..d).filter(|i| s >> i & 1 == 1).collect::<Vec<_>>(), int(1));
            if !ce_derivation(&g, &ce_derivation(&g, &x).unwrap()).unwrap().is_zero() {
                dd_bad.push(g.name().to_string());
            }
        }
    }
    let mut closure_bad = Vec::new();
    for c in &w.charts {
        let t = algs.get(&c.name).unwrap();
        let g = t.instantiate(t.param.as_ref().map(|_| &v)).unwrap();
        let bound = c.bind_params(&c.params.iter().map(|p| (p.clone(), v.clone())).collect());
        let pts = sample_points(&c.coords, POINTS, HALF_WIDTH, DEFAULT_SEED);
        let defect = closure_defect(&bound, &g, &pts).unwrap().max(identity_defect(&bound).unwrap());
        if !(defect < 1e-9) {
            closure_bad.push(format!("{}: {defect:.2e}", c.name));
        }
    }
    let params: BTreeMap<String, Scalar> = [("a", q(1, 3)), ("b", q(2, 5))].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let mut exprs: Vec<(Vec<String>, Expr)> = Vec::new();
    for c in &w.charts {
        exprs.extend(c.xl.iter().chain(&c.xr).flatten().map(|f| (c.coords.clone(), f.clone())));
    }
    for g in &w.golden {
        let d = w.cat.entry(&g.label).unwrap().alpha.len();
        let coords: Vec<String> = ["x", "y", "z"][..d].iter().map(|s| s.to_string()).collect();
        exprs.push((coords.clone(), g.sigma.clone()));
        exprs.extend(g.pairs.iter().map(|(_, _, e)| (coords.clone(), e.clone())));
    }
    let h = 1e-6;
    let mut fd_bad = 0;
    for (coords, e) in &exprs {
        let e = e.bind_params(&params);
        for p in sample_points(coords, 10, HALF_WIDTH, DEFAULT_SEED) {
            for c in coords {
                let shifted = |dx: f64| {
                    let mut p2 = p.clone();
                    *p2.get_mut(c).unwrap() += dx;
                    at(&e, &p2)
                };
                let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
                let d = at(&e.diff(c), &p);
                if !((fd - d).abs() <= 1e-5 * d.abs().max(1.0)) {
                    fd_bad += 1;
                }
            }
        }
    }
    let pass = schouten_bad.is_empty() && dd_bad.is_empty() && closure_bad.is_empty() && fd_bad == 0;
    outcome(
        pass,
        format!(
            "schouten failing {schouten_bad:?}, d^2 failing {dd_bad:?}, closure failing {closure_bad:?}, {} expressions with {fd_bad} derivative mismatches",
            exprs.len()
        ),
    )
}

fn main() {
    let world = World {
        cat: Catalog::builtin().unwrap(),
        charts: builtin_charts().unwrap(),
        golden: builtin_golden(&Catalog::builtin().unwrap()).unwrap(),
    };
    let sweep = std::cell::OnceCell::new();
    let lazy_sweep = |w: &World| -> &ReferenceSweep { sweep.get_or_init(|| reference_sweep(w)) };
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut run = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        results.push((n, name, o, t.elapsed().as_secs_f64()));
    };
    run(1, "catalog validity", &mut || catalog_validity(&world));
    run(2, "coboundary reproduction", &mut || coboundary_reproduction(&world));
    run(3, "classification reproduction", &mut || classification_reproduction(&world));
    run(4, "solver completeness", &mut || solver_completeness(&world));
    run(5, "sigma reproduction", &mut || {
        let s = lazy_sweep(&world);
        outcome(s.sigma_bad.is_empty(), format!("{} rows, failing {:?}", s.rows, s.sigma_bad))
    });
    run(6, "bracket reproduction", &mut || {
        let s = lazy_sweep(&world);
        outcome(s.bracket_bad.is_empty(), format!("{} rows, failing {:?}", s.rows, s.bracket_bad))
    });
    run(7, "jacobi structure axioms", &mut || structure_axioms(&world));
    run(8, "integrable example", &mut || integrable_example(&world));
    run(9, "property suites", &mut || property_suites(&world));

    let mut failed = 0;
    for (n, name, o, secs) in &results {
        println!("criterion {n} ({name}): {} [{secs:.1}s] {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
