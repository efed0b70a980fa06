use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::exprlang::random_polynomial;
use crate::geometry::{Chart, JetField, Kind, TensorField};
use crate::jacobi::corpus::{known_jacobi, standard_contact, su2, vector_field_only};
use crate::jacobi::{local_bracket, poissonize, JacobiStructure, VerifyOptions};

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn levi(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[test]
fn cotangent_of_symplectic_plane() {
    let c = Arc::new(Chart::euclidean(&["x", "y"]).unwrap());
    let p = JacobiStructure::parse(c.clone(), &[(&[0, 1], "1")], &[]).unwrap();
    let a = cotangent_algebroid(&p, opts()).unwrap();
    for x in c.sample(10, 1) {
        assert_eq!(a.anchor_at(&x).unwrap(), vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
        assert!(a.structure_at(&x).unwrap().iter().flatten().flatten().all(|v| *v == 0.0));
    }
}

#[test]
fn cotangent_of_su2_is_levi_civita() {
    let p = su2();
    let a = cotangent_algebroid(&p, opts()).unwrap();
    let c = p.chart().clone();
    for x in c.sample(20, 2) {
        let s = a.structure_at(&x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let b = local_bracket(&p, &crate::exprlang::Expr::var(c.coords(), i), &crate::exprlang::Expr::var(c.coords(), j))
                    .unwrap();
                let jet = b.jets(&x, 1).unwrap();
                for k in 0..3 {
                    assert!((s[i][j][k] - levi(i, j, k)).abs() < 1e-14);
                    assert!((s[i][j][k] - jet[0].d1(k)).abs() < 1e-12);
                }
            }
        }
    }
    let r = a.residuals(opts()).unwrap();
    assert!(r.anchor <= 1e-9 && r.jacobi <= 1e-9, "{r:?}");
}

#[test]
fn cotangent_rejects_non_poisson() {
    assert!(matches!(cotangent_algebroid(&standard_contact(), opts()), Err(crate::Error::NotPoisson { .. })));
}

#[test]
fn jacobi_algebroid_poisson_block() {
    let p = su2();
    let ja = jacobi_algebroid(&p, opts()).unwrap();
    let ca = cotangent_algebroid(&p, opts()).unwrap();
    for x in p.chart().sample(30, 3) {
        let (sj, sc) = (ja.structure_at(&x).unwrap(), ca.structure_at(&x).unwrap());
        let (aj, ac) = (ja.anchor_at(&x).unwrap(), ca.anchor_at(&x).unwrap());
        let lam = p.lambda().eval(&x).unwrap();
        for i in 0..3 {
            assert_eq!(aj[i], ac[i]);
            for j in 0..3 {
                for k in 0..3 {
                    assert!((sj[i][j][k] - sc[i][j][k]).abs() < 1e-14);
                }
                let l = if i == j { 0.0 } else { p.lambda().component(&x, &[i, j]).unwrap() };
                assert!((sj[i][j][3] + l).abs() < 1e-14);
            }
        }
        assert!(aj[3].iter().all(|v| *v == 0.0));
        let _ = lam;
    }
}

#[test]
fn jacobi_algebroid_reeb_component() {
    let j = vector_field_only();
    let a = jacobi_algebroid(&j, opts()).unwrap();
    for x in j.chart().sample(20, 4) {
        let s = a.structure_at(&x).unwrap();
        let jets = j.reeb().jets(&x, 1).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                // [(0,1), (dx^i,0)] = −L_R dx^i = −∂_k R^i dx^k
                assert!((s[3][i][k] + jets[i].d1(k)).abs() < 1e-13);
            }
            assert_eq!(s[3][i][3], 0.0);
        }
        let rho = a.anchor_at(&x).unwrap();
        let r = j.reeb().eval(&x).unwrap();
        for i in 0..3 {
            assert_eq!(rho[3][i], -r[i]);
        }
    }
}

#[test]
fn constructed_algebroids_validate() {
    for (name, j) in known_jacobi() {
        let a = jacobi_algebroid(&j, opts()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let r = a.residuals(opts()).unwrap();
        assert!(r.jacobi <= 1e-8 && r.anchor <= 1e-8, "{name}: {r:?}");
    }
    let a = jacobi_algebroid(&standard_contact(), opts()).unwrap();
    let r = a.residuals(opts()).unwrap();
    assert!(r.jacobi <= 1e-9 && r.anchor <= 1e-9);
}

#[test]
fn broken_structure_functions_are_rejected() {
    let c = Arc::new(Chart::euclidean(&["x", "y"]).unwrap());
    let e = |s: &str| c.parse(s).unwrap();
    // anchor e1 -> d/dx, e2 -> x d/dy, but [e1, e2] = 0 breaks the anchor morphism
    let r = AlgebroidStructure::from_exprs(c.clone(), vec![vec![e("1"), e("0")], vec![e("0"), e("x")]], &[], opts());
    assert!(matches!(r, Err(crate::Error::InvalidAlgebroid(_))));
    // [e1, e2] = e3 with ρ(e3) = ∂y restores the morphism
    let ok = AlgebroidStructure::from_exprs(
        c.clone(),
        vec![vec![e("1"), e("0")], vec![e("0"), e("x")], vec![e("0"), e("1")]],
        &[(0, 1, 2, e("1")), (1, 0, 2, e("-1"))],
        opts(),
    );
    assert!(ok.is_ok(), "{:?}", ok.err());
}

fn contact_extension() -> (JacobiStructure, AlgebroidStructure, AlgebroidStructure) {
    let j = standard_contact();
    let ja = jacobi_algebroid(&j, opts()).unwrap();
    let ext = action_extension(&ja, &reeb_cocycle(&j).unwrap(), opts()).unwrap();
    (j, ja, ext)
}

#[test]
fn action_extension_matches_symplectification() {
    let (j, _, ext) = contact_extension();
    let mut p = poissonize(&j).unwrap().as_poisson().unwrap();
    p.verify(VerifyOptions { samples: 40, ..opts() });
    let t = cotangent_algebroid(&p, opts()).unwrap();
    let n = 4;
    for x in ext.chart().sample(200, 5) {
        let es = x[3].exp();
        let at = t.anchor_at(&x).unwrap();
        let ct = t.structure_at(&x).unwrap();
        let ae = ext.anchor_at(&x).unwrap();
        let ce = ext.structure_at(&x).unwrap();
        // frame e^s dx^I of T*(M×ℝ) against the constant frame of the extension
        for i in 0..n {
            for l in 0..n {
                assert!((es * at[i][l] - ae[i][l]).abs() <= 1e-9, "anchor {i} {l}");
            }
            for jj in 0..n {
                for k in 0..n {
                    let mut v = es * ct[i][jj][k];
                    if k == jj {
                        v += es * at[i][3];
                    }
                    if k == i {
                        v -= es * at[jj][3];
                    }
                    assert!((v - ce[i][jj][k]).abs() <= 1e-9, "structure {i} {jj} {k}");
                }
            }
        }
    }
}

#[test]
fn action_extension_examples() {
    let (j, ja, ext) = contact_extension();
    for x in ext.chart().sample(20, 6) {
        let rho = ext.anchor_at(&x).unwrap();
        let r = j.reeb().eval(&x[..3]).unwrap();
        for i in 0..3 {
            assert_eq!(rho[3][i], -r[i]);
        }
        assert_eq!(rho[3][3], 0.0);
    }
    let zero = AlgebroidCochain::zero(ja.chart().clone(), 4, 1).unwrap();
    let prod = action_extension(&ja, &zero, opts()).unwrap();
    for x in prod.chart().sample(20, 7) {
        let rho = prod.anchor_at(&x).unwrap();
        let base = ja.anchor_at(&x[..3]).unwrap();
        for q in 0..4 {
            assert_eq!(&rho[q][..3], &base[q][..]);
            assert_eq!(rho[q][3], 0.0);
        }
    }
    let c = ja.chart().clone();
    let bad = AlgebroidCochain::from_exprs(c.clone(), 4, 1, ["x", "0", "0", "0"].iter().map(|s| c.parse(s).unwrap()).collect())
        .unwrap();
    assert!(matches!(action_extension(&ja, &bad, opts()), Err(crate::Error::NotCocycle { .. })));
}

#[test]
fn differential_examples() {
    let c = Arc::new(Chart::euclidean(&["x", "y", "z"]).unwrap());
    let tm = tangent_algebroid(c.clone()).unwrap();
    let f = random_polynomial(c.coords(), 3, 6, 9);
    let df = algebroid_differential(&tm, &AlgebroidCochain::function(c.clone(), 3, f.clone()).unwrap()).unwrap();
    let ff = TensorField::function(c.clone(), f).unwrap();
    for x in c.sample(30, 8) {
        let j = ff.jets(&x, 1).unwrap();
        let v = df.eval(&x).unwrap();
        for i in 0..3 {
            assert!((v[i] + j[0].d1(i)).abs() < 1e-12);
        }
    }

    let p = su2();
    let ca = cotangent_algebroid(&p, opts()).unwrap();
    let lam = AlgebroidCochain::from_multivector(p.lambda()).unwrap();
    let dl = algebroid_differential(&ca, &lam).unwrap();
    for x in p.chart().sample(200, 9) {
        assert!(dl.max_abs(&x).unwrap() <= 1e-12);
    }

    let h = Arc::new(Chart::euclidean(&["x", "y", "s"]).unwrap());
    let lt = TensorField::parse_sparse(h.clone(), Kind::Multivector, 2, &[(&[0, 1], "exp(-s)")]).unwrap();
    let mut hp = JacobiStructure::poisson(lt.clone()).unwrap();
    hp.verify(opts());
    let th = cotangent_algebroid(&hp, opts()).unwrap();
    let z = AlgebroidCochain::from_multivector(&TensorField::coordinate_vector(h.clone(), 2).unwrap()).unwrap();
    let dz = algebroid_differential(&th, &z).unwrap();
    let lc = AlgebroidCochain::from_multivector(&lt).unwrap();
    for x in h.sample(200, 10) {
        let a = dz.eval(&x).unwrap();
        let b = lc.eval(&x).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u + v).abs() <= 1e-9);
        }
    }
}

fn random_cochain(chart: &Arc<Chart>, rank: usize, degree: usize, seed: u64) -> AlgebroidCochain {
    let m = crate::geometry::combin::binomial(rank, degree);
    let e = (0..m as u64).map(|q| random_polynomial(chart.coords(), 3, 5, seed * 100 + q)).collect();
    AlgebroidCochain::from_exprs(chart.clone(), rank, degree, e).unwrap()
}

#[test]
fn differential_squares_to_zero() {
    let algs = [
        cotangent_algebroid(&su2(), opts()).unwrap(),
        jacobi_algebroid(&standard_contact(), opts()).unwrap(),
        jacobi_algebroid(&vector_field_only(), opts()).unwrap(),
    ];
    for (ai, a) in algs.iter().enumerate() {
        for p in 0..=2 {
            if p + 2 > a.rank() {
                continue;
            }
            let c = random_cochain(a.chart(), a.rank(), p, ai as u64 * 10 + p as u64);
            let dd = algebroid_differential(a, &algebroid_differential(a, &c).unwrap()).unwrap();
            for x in a.chart().sample(50, 11) {
                let scale = c.comps().jets(&x, 2).unwrap().iter().map(|t| t.max_abs()).fold(1.0, f64::max);
                assert!(dd.max_abs(&x).unwrap() <= 1e-9 * scale, "alg {ai} degree {p}");
            }
        }
    }
}

#[test]
fn cocycle_checks() {
    let j = standard_contact();
    let ja = jacobi_algebroid(&j, opts()).unwrap();
    assert!(check_cocycle(&ja, &reeb_cocycle(&j).unwrap(), opts()).passed());
    let ca = cotangent_algebroid(&su2(), opts()).unwrap();
    let c = ca.chart().clone();
    let e1 = AlgebroidCochain::from_exprs(c.clone(), 3, 1, ["1", "0", "0"].iter().map(|s| c.parse(s).unwrap()).collect())
        .unwrap();
    let rep = check_cocycle(&ca, &e1, opts());
    assert!(!rep.passed());
    // c_{23}^1 · 1 − 0 + 0 = 1 on the pair (dx2, dx3)
    assert!((rep.residual_value("cocycle").unwrap() - 1.0).abs() < 1e-12);
    let zero = AlgebroidCochain::zero(c, 3, 1).unwrap();
    assert!(check_cocycle(&ca, &zero, opts()).passed());
}

fn su2_alg() -> Arc<AlgebroidStructure> {
    Arc::new(cotangent_algebroid(&su2(), opts()).unwrap())
}

#[test]
fn apath_examples() {
    let a = su2_alg();
    let x0 = [0.3, -0.4, 0.5];
    let zero = apath_from_fn(a.clone(), |_| Ok(vec![0.0; 3]), &x0, 32).unwrap();
    assert!(zero.base().iter().all(|g| g == &x0));

    let c = Arc::new(Chart::euclidean(&["x", "y"]).unwrap());
    let tm = Arc::new(tangent_algebroid(c).unwrap());
    let line = apath_from_fn(tm, |_| Ok(vec![0.5, -2.0]), &[1.0, 1.0], 16).unwrap();
    for (k, g) in line.base().iter().enumerate() {
        let t = k as f64 / 16.0;
        assert!((g[0] - 1.0 - 0.5 * t).abs() < 1e-14 && (g[1] - 1.0 + 2.0 * t).abs() < 1e-14);
    }

    let t = crate::exprlang::parse("1", &["t"]).unwrap();
    let z = crate::exprlang::parse("0", &["t"]).unwrap();
    let p = apath_from_fiber(a, &[t, z.clone(), z], &x0, 256).unwrap();
    let r0 = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    for g in p.base() {
        let r = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((r - r0).abs() <= 1e-6);
    }
    assert!(matches!(apath_from_fn(su2_alg(), |_| Ok(vec![0.0; 3]), &x0, 8), Err(crate::Error::GridTooCoarse { .. })));
}

#[test]
fn apath_leaves_bounded_chart() {
    let c = Arc::new(Chart::new(&["x"], vec![(-1.0, 1.0)]).unwrap());
    let tm = Arc::new(tangent_algebroid(c).unwrap());
    match apath_from_fn(tm, |_| Ok(vec![4.0]), &[0.0], 64) {
        Err(crate::Error::LeftDomain { time }) => assert!((time - 0.25).abs() < 0.02, "{time}"),
        other => panic!("{other:?}"),
    }
}

fn wiggly(t: f64) -> Vec<f64> {
    vec![0.7 * (3.0 * t).sin(), 0.4 + t * t, -0.5 * (2.0 * t).cos()]
}

#[test]
fn invariant_converges_at_fourth_order() {
    let a = su2_alg();
    let r: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| apath_from_fn(a.clone(), |t| Ok(wiggly(t)), &[0.3, -0.4, 0.5], n).unwrap().invariant_residual().unwrap())
        .collect();
    let s1 = (r[0] / r[1]).log2();
    let s2 = (r[1] / r[2]).log2();
    assert!(s1 >= 3.5 && s2 >= 3.5, "{r:?} slopes {s1} {s2}");
}

#[test]
fn cocycle_integral_examples() {
    let j = standard_contact();
    let ja = Arc::new(jacobi_algebroid(&j, opts()).unwrap());
    let rc = reeb_cocycle(&j).unwrap();
    let x0 = [0.1, 0.2, -0.3];
    let z = APath::zero(ja.clone(), &x0, 32).unwrap();
    assert_eq!(cocycle_integral(&z, &rc).unwrap(), 0.0);
    let lam = apath_from_fn(ja.clone(), |_| Ok(vec![0.0, 0.0, 0.0, 0.7]), &x0, 64).unwrap();
    assert!(cocycle_integral(&lam, &rc).unwrap().abs() < 1e-15);

    let f = |t: f64| Ok(vec![0.3 * t, (2.0 * t).sin(), 1.0 + t * t, 0.2]);
    let coarse = apath_from_fn(ja.clone(), f, &x0, 64).unwrap();
    let fine = apath_from_fn(ja.clone(), f, &x0, 640).unwrap();
    let (rc1, rc2) = (cocycle_integral(&coarse, &rc).unwrap(), cocycle_integral(&fine, &rc).unwrap());
    assert!((rc1 - rc2).abs() <= 1e-8, "{rc1} {rc2}");
    // R = ∂z so −⟨R, a⟩ = −a_z and the integral is −∫(1 + t²) = −4/3
    assert!((rc2 + 4.0 / 3.0).abs() < 1e-12);
    assert!(matches!(cocycle_integral(&APath::zero(ja, &x0, 8).unwrap(), &rc), Err(crate::Error::GridTooCoarse { .. })));
}

#[test]
fn concatenation_properties() {
    let j = standard_contact();
    let ja = Arc::new(jacobi_algebroid(&j, opts()).unwrap());
    let rc = reeb_cocycle(&j).unwrap();
    let n = 256;
    let b = apath_from_fn(ja.clone(), |t| Ok(vec![0.3, (2.0 * t).sin(), 1.0 + 0.5 * t, -0.2 * t]), &[0.1, 0.2, -0.3], n).unwrap();
    let a = apath_from_fn(ja.clone(), |t| Ok(vec![t.cos(), -0.1, 0.4 * t, 0.5]), b.end(), n).unwrap();
    for cutoff in [false, true] {
        let ab = concatenate(&a, &b, cutoff).unwrap();
        let lhs = cocycle_integral(&ab, &rc).unwrap();
        let rhs = cocycle_integral(&a, &rc).unwrap() + cocycle_integral(&b, &rc).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8, "cutoff {cutoff}: {lhs} vs {rhs}");
        assert!(ab.invariant_residual().unwrap() < 1e-6);
    }
    assert!(matches!(concatenate(&b, &a, false), Err(crate::Error::EndpointMismatch { .. })));

    let z = APath::zero(ja.clone(), a.end(), n).unwrap();
    let za = concatenate(&z, &a, false).unwrap();
    for k in 0..=n {
        let (_, g) = za.interpolate(k as f64 / (2 * n) as f64).unwrap();
        for (u, v) in g.iter().zip(&a.base()[k]) {
            assert!((u - v).abs() <= 1e-8);
        }
    }

    let s = su2_alg();
    let p = apath_from_fn(s.clone(), |t| Ok(wiggly(t)), &[0.3, -0.4, 0.5], n).unwrap();
    let q = apath_from_fn(s, |t| Ok(vec![t, 1.0, 0.0]), p.end(), n).unwrap();
    let qp = concatenate(&q, &p, true).unwrap();
    for g in qp.base() {
        assert!((g.iter().map(|v| v * v).sum::<f64>().sqrt() - 0.5f64.sqrt()).abs() <= 1e-6);
    }
}

#[test]
fn reparametrization_keeps_integral() {
    let j = standard_contact();
    let ja = Arc::new(jacobi_algebroid(&j, opts()).unwrap());
    let rc = reeb_cocycle(&j).unwrap();
    let p = apath_from_fn(ja, |t| Ok(vec![0.3, (2.0 * t).sin(), 1.0 + 0.5 * t, -0.2 * t]), &[0.1, 0.2, -0.3], 256).unwrap();
    let r = cocycle_integral(&p, &rc).unwrap();
    let rt = cocycle_integral(&p.reparametrize().unwrap(), &rc).unwrap();
    assert!((r - rt).abs() <= 1e-8, "{r} {rt}");
}

/// Meridians from the north to the south pole at longitude `φ = span·ε`, radius `r`.
fn meridian_family(alg: Arc<AlgebroidStructure>, span: f64, r: f64, n: usize) -> HomotopyFamily {
    HomotopyFamily::from_fn(
        alg,
        n,
        n,
        move |e, t| {
            let (ph, th) = (span * e, PI * t);
            let g = vec![r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
            let gt = [PI * r * th.cos() * ph.cos(), PI * r * th.cos() * ph.sin(), -PI * r * th.sin()];
            let r2 = r * r;
            let a = vec![
                (gt[1] * g[2] - gt[2] * g[1]) / r2,
                (gt[2] * g[0] - gt[0] * g[2]) / r2,
                (gt[0] * g[1] - gt[1] * g[0]) / r2,
            ];
            Ok((g, a))
        },
        FamilyOptions::default(),
    )
    .unwrap()
}

/// `∫∫ ω_L(∂_tγ, ∂_εγ)` by the tensor trapezoid rule on a fine analytic grid.
fn direct_area(span: f64, r: f64, n: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        for k in 0..n {
            let (e, t) = ((i as f64 + 0.5) / n as f64, (k as f64 + 0.5) / n as f64);
            let (ph, th) = (span * e, PI * t);
            let x = [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
            let ge = [-span * r * th.sin() * ph.sin(), span * r * th.sin() * ph.cos(), 0.0];
            let gt = [PI * r * th.cos() * ph.cos(), PI * r * th.cos() * ph.sin(), -PI * r * th.sin()];
            let cr = [ge[1] * gt[2] - ge[2] * gt[1], ge[2] * gt[0] - ge[0] * gt[2], ge[0] * gt[1] - ge[1] * gt[0]];
            total -= (x[0] * cr[0] + x[1] * cr[1] + x[2] * cr[2]) / (r * r);
        }
    }
    total / (n * n) as f64
}

#[test]
fn transport_trivial_cases() {
    let s = su2_alg();
    let f = HomotopyFamily::from_fn(
        s.clone(),
        8,
        32,
        |_, t| {
            let a = wiggly(t);
            Ok((vec![0.0; 3], a.iter().map(|v| 0.0 * v).collect()))
        },
        FamilyOptions::default(),
    )
    .unwrap();
    let tr = homotopy_transport(&f, 1e-12).unwrap();
    assert!(tr.is_homotopy && tr.max_end == 0.0);

    let moving = HomotopyFamily::from_fn(
        s,
        8,
        32,
        |e, _| Ok((vec![0.0, 0.0, 1.0 + e], vec![0.0; 3])),
        FamilyOptions::default(),
    );
    assert!(matches!(moving, Err(crate::Error::EndpointMismatch { .. })));
}

#[test]
fn leaf_areas_by_transport() {
    let s = su2_alg();
    let ext = Arc::new(jacobi_algebroid(&su2(), opts()).unwrap());
    let full = meridian_family(s.clone(), 2.0 * PI, 1.0, 128);
    let area = leaf_area_via_transport(&full, ext.clone(), FamilyOptions::default()).unwrap();
    assert!((area - 4.0 * PI).abs() <= 1e-3 * 4.0 * PI, "{area}");
    let direct = direct_area(2.0 * PI, 1.0, 2000);
    assert!((area - direct).abs() <= 1e-4 * direct.abs(), "{area} vs {direct}");

    let half = meridian_family(s.clone(), PI, 1.0, 128);
    assert!(matches!(
        leaf_area_via_transport(&half, ext.clone(), FamilyOptions::default()),
        Err(crate::Error::NotClosedSweep(_))
    ));
    let h = swept_area_via_transport(&half, ext.clone(), FamilyOptions::default()).unwrap();
    assert!((h - 2.0 * PI).abs() <= 1e-3, "{h}");

    let constant = HomotopyFamily::from_fn(s, 16, 32, |_, _| Ok((vec![0.0, 0.0, 1.0], vec![0.0; 3])), FamilyOptions::default())
        .unwrap();
    assert_eq!(leaf_area_via_transport(&constant, ext, FamilyOptions::default()).unwrap(), 0.0);
}

#[test]
fn transport_end_values_carry_the_area() {
    let s = su2_alg();
    let ext = Arc::new(jacobi_algebroid(&su2(), opts()).unwrap());
    let fam = meridian_family(s, PI / 2.0, 1.0, 64).extend_fiber(ext, FamilyOptions::default()).unwrap();
    let tr = homotopy_transport(&fam, 1e-8).unwrap();
    let v: Vec<f64> = tr.end_values().iter().map(|b| b[3]).collect();
    let total = crate::numerics::simpson(&v, 1.0 / 64.0);
    assert!((total - direct_area(PI / 2.0, 1.0, 1000)).abs() < 1e-3, "{total}");
}

fn contact_correspondence() -> PathCorrespondence {
    PathCorrespondence::new(&standard_contact(), opts()).unwrap()
}

#[test]
fn translation_round_trip() {
    let pc = contact_correspondence();
    let rc = pc.reeb.clone();
    let s0 = 0.25;
    let tilde = apath_from_fn(
        pc.symplectic.clone(),
        |t| Ok(vec![0.2 * (3.0 * t).sin(), 0.5, 0.3 - t, 0.4 * t]),
        &[0.1, -0.2, 0.3, s0],
        256,
    )
    .unwrap();
    let (a, s) = pc.to_jacobi(&tilde).unwrap();
    assert_eq!(s, s0);
    assert!(a.invariant_residual().unwrap() < 1e-7);
    let back = pc.from_jacobi(&a, s).unwrap();
    assert!(back.invariant_residual().unwrap() < 1e-7);
    for (u, v) in back.fiber().iter().zip(tilde.fiber()) {
        for (x, y) in u.iter().zip(v) {
            assert!((x - y).abs() <= 1e-8);
        }
    }
    for (u, v) in back.base().iter().zip(tilde.base()) {
        for (x, y) in u.iter().zip(v) {
            assert!((x - y).abs() <= 1e-8);
        }
    }
    let dg = tilde.end()[3] - tilde.start()[3];
    assert!((dg + cocycle_integral(&a, &rc).unwrap()).abs() <= 1e-8);
}

#[test]
fn translation_special_cases() {
    let pc = contact_correspondence();
    let z = APath::zero(pc.symplectic.clone(), &[0.1, 0.2, 0.3, -0.5], 32).unwrap();
    let (a, s) = pc.to_jacobi(&z).unwrap();
    assert_eq!(s, -0.5);
    assert!(a.fiber().iter().all(|v| v.iter().all(|x| *x == 0.0)));
    assert!(a.base().iter().all(|g| g == &[0.1, 0.2, 0.3]));

    let c = Arc::new(Chart::euclidean(&["x", "y"]).unwrap());
    let p = JacobiStructure::parse(c, &[(&[0, 1], "1 + x^2")], &[]).unwrap();
    let pc = PathCorrespondence::new(&p, opts()).unwrap();
    let s0 = 0.7;
    let jp = apath_from_fn(pc.jacobi.clone(), |t| Ok(vec![t, 1.0 - t, 0.3]), &[0.2, 0.1], 64).unwrap();
    let tp = pc.from_jacobi(&jp, s0).unwrap();
    for (k, g) in tp.base().iter().enumerate() {
        assert_eq!(g[2], s0);
        for q in 0..3 {
            assert!((tp.fiber()[k][q] - s0.exp() * jp.fiber()[k][q]).abs() < 1e-14);
        }
    }
}

#[test]
fn csv_layout() {
    let s = su2_alg();
    let fam = meridian_family(s, PI, 1.0, 32);
    let rows = fam.csv_rows();
    assert_eq!(rows.len(), 33 * 33);
    assert_eq!(fam.csv_header(), ["eps", "t", "gamma_x1", "gamma_x2", "gamma_x3", "a0", "a1", "a2"]);
    assert_eq!(rows[33][0], 1.0 / 32.0);
    let _ = JetField::constant(fam.algebroid().chart().clone(), vec![]);
}
