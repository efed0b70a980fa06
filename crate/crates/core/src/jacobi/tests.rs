use std::sync::Arc;

use super::corpus::*;
use super::*;
use crate::geometry::{exterior_derivative, max_abs_over, max_diff_over, wedge};
use crate::numerics::det;

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

#[test]
fn canonical_bracket() {
    let c = Arc::new(Chart::euclidean(&["x", "y"]).unwrap());
    let j = JacobiStructure::parse(c.clone(), &[(&[0, 1], "1")], &[]).unwrap();
    let b = local_bracket(&j, &c.parse("x").unwrap(), &c.parse("y").unwrap()).unwrap();
    assert_eq!(b.eval(&[0.3, -2.0]).unwrap(), vec![1.0]);
}

#[test]
fn bracket_is_antisymmetric() {
    let j = standard_contact();
    let c = j.chart().clone();
    for s in 0..5 {
        let f = random_polynomial(c.coords(), 3, 5, s);
        let g = random_polynomial(c.coords(), 3, 5, s + 50);
        let ff = local_bracket(&j, &f, &f).unwrap();
        let fg = local_bracket(&j, &f, &g).unwrap();
        let gf = local_bracket(&j, &g, &f).unwrap();
        let pts = c.sample(30, s);
        assert!(max_abs_over(&ff, &pts).unwrap() < 1e-12);
        assert!(max_abs_over(&fg.add(&gf).unwrap(), &pts).unwrap() < 1e-12);
    }
}

#[test]
fn verify_examples() {
    let r = verify_jacobi(&standard_contact(), opts());
    assert!(r.passed(), "{}", r.to_json());
    assert!(r.residual_value("schouten_lambda_lambda").unwrap() <= 1e-10);

    let c = Arc::new(Chart::euclidean(&["x", "y"]).unwrap());
    let bad = JacobiStructure::parse(c.clone(), &[(&[0, 1], "1")], &["x", "0"]).unwrap();
    let r = verify_jacobi(&bad, opts());
    assert!(!r.passed());
    assert!(r.residual_value("schouten_lambda_reeb").unwrap() > 1e-3);

    let any = JacobiStructure::parse(c, &[(&[0, 1], "sin(x*y) + x^3 - 2*y")], &[]).unwrap();
    assert!(verify_jacobi(&any, opts()).passed());
}

#[test]
fn contact_dictionary() {
    let j = standard_contact();
    let c = j.chart().clone();
    let theta = standard_contact_form();
    let pts = c.sample(100, 3);
    for p in &pts {
        let r = j.reeb().eval(p).unwrap();
        assert!((r[0]).abs() < 1e-14 && r[1].abs() < 1e-14 && (r[2] - 1.0).abs() < 1e-14);
        let l = j.lambda().eval(p).unwrap();
        assert!((l[0] + 1.0).abs() < 1e-13, "{l:?}");
        assert!(l[1].abs() < 1e-13);
        assert!((l[2] - p[1]).abs() < 1e-13);
    }
    assert!(max_abs_over(&interior(&theta, j.lambda()).unwrap(), &pts).unwrap() <= 1e-12);
    let irt = interior(j.reeb(), &theta).unwrap();
    assert!(pts.iter().all(|p| (irt.eval(p).unwrap()[0] - 1.0).abs() < 1e-14));
    let ird = interior(j.reeb(), &exterior_derivative(&theta).unwrap()).unwrap();
    assert!(max_abs_over(&ird, &pts).unwrap() < 1e-13);
    let top = wedge(j.lambda(), j.reeb()).unwrap();
    assert!(pts.iter().all(|p| top.eval(p).unwrap()[0].abs() > 0.5));
    let mut jj = j.clone();
    assert!(jj.verify(opts()).passed());
    assert!(jj.is_verified());
}

#[test]
fn contact_rejects_closed_form() {
    let c = r3();
    let dz = TensorField::from_exprs(c.clone(), Kind::Form, 1, ["0", "0", "1"].iter().map(|s| c.parse(s).unwrap()).collect())
        .unwrap();
    assert!(matches!(contact_to_jacobi(&dz), Err(Error::NotContact { .. })));
}

#[test]
fn contact_nonlinear_form() {
    let c = r3();
    let th = TensorField::from_exprs(
        c.clone(),
        Kind::Form,
        1,
        ["-y*exp(0.2*z)", "0.1*x", "1 + 0.1*x^2"].iter().map(|s| c.parse(s).unwrap()).collect(),
    )
    .unwrap();
    let j = contact_to_jacobi(&th).unwrap();
    let pts = c.sample(40, 4);
    assert!(max_abs_over(&interior(&th, j.lambda()).unwrap(), &pts).unwrap() < 1e-12);
    assert!(verify_jacobi(&j, VerifyOptions { samples: 40, ..opts() }).passed());
}

#[test]
fn conformal_examples() {
    let j = su2();
    let c = j.chart().clone();
    let pts = c.sample(50, 5);
    let one = conformal_transform(&j, &c.parse("1").unwrap(), opts()).unwrap();
    assert!(max_diff_over(one.lambda(), j.lambda(), &pts).unwrap() == 0.0);
    assert!(max_diff_over(one.reeb(), j.reeb(), &pts).unwrap() == 0.0);

    let f = c.parse("2 + x1*x2 + x3^2").unwrap();
    let t = conformal_transform(&j, &f, opts()).unwrap();
    let ff = TensorField::function(c.clone(), f.clone()).unwrap();
    let xf = j.sharp(&exterior_derivative(&ff).unwrap()).unwrap();
    assert!(max_diff_over(t.reeb(), &xf.neg(), &pts).unwrap() < 1e-12);
    assert!(verify_jacobi(&t, opts()).passed());

    let t1 = c.parse("2 + sin(x1)").unwrap();
    let t2 = c.parse("exp(x2 - x3)").unwrap();
    let a = conformal_transform(&conformal_transform(&j, &t1, opts()).unwrap(), &t2, opts()).unwrap();
    let b = conformal_transform(&j, &t1.mul(&t2), opts()).unwrap();
    assert!(max_diff_over(a.lambda(), b.lambda(), &pts).unwrap() < 1e-10);
    assert!(max_diff_over(a.reeb(), b.reeb(), &pts).unwrap() < 1e-10);

    assert!(matches!(
        conformal_transform(&j, &c.parse("x1").unwrap(), VerifyOptions { tol: 0.5, ..opts() }),
        Err(Error::VanishingConformalFactor { .. })
    ));
}

#[test]
fn conformal_preserves_verified_flag() {
    let mut j = standard_contact();
    j.verify(opts());
    let t = conformal_transform(&j, &j.chart().parse("exp(x*y/4)").unwrap(), opts()).unwrap();
    assert!(t.is_verified());
}

#[test]
fn poissonize_examples() {
    let c = Arc::new(Chart::euclidean(&["x", "y"]).unwrap());
    let j = JacobiStructure::parse(c, &[(&[0, 1], "1")], &[]).unwrap();
    let h = poissonize(&j).unwrap();
    assert_eq!(h.chart().coords(), ["x", "y", "s"]);
    for p in h.chart().sample(20, 1) {
        let v = h.lambda_tilde.eval(&p).unwrap();
        assert!((v[0] - (-p[2]).exp()).abs() < 1e-14 && v[1] == 0.0 && v[2] == 0.0);
    }

    let h = poissonize(&standard_contact()).unwrap();
    for p in h.chart().sample(100, 2) {
        let mut m = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                m[i][k] = h.lambda_tilde.component(&p, &[i, k]).unwrap();
            }
        }
        assert!(det(&m).abs() > 1e-8);
    }

    let line = Arc::new(Chart::euclidean(&["x"]).unwrap());
    let j = JacobiStructure::parse(line, &[], &["1"]).unwrap();
    let h = poissonize(&j).unwrap();
    for p in h.chart().sample(10, 3) {
        let v = h.lambda_tilde.component(&p, &[0, 1]).unwrap();
        assert!((v - (-p[1]).exp()).abs() < 1e-14);
    }
    assert!(verify_jacobi(&h.as_poisson().unwrap(), opts()).passed());
}

#[test]
fn poissonization_is_homogeneous_poisson() {
    for (name, j) in known_jacobi() {
        let h = poissonize(&j).unwrap();
        let pts = h.chart().sample(200, 11);
        let scale = max_abs_over(&h.lambda_tilde, &pts).unwrap().max(1.0);
        let pr = h.poisson_residual(&pts).unwrap();
        let hr = h.homogeneity_residual(&pts).unwrap();
        assert!(pr <= 1e-9 * scale * scale, "{name}: poisson {pr}");
        assert!(hr <= 1e-9 * scale, "{name}: homogeneity {hr}");
    }
}

#[test]
fn depoissonize_examples() {
    for (name, j) in known_jacobi() {
        let h = poissonize(&j).unwrap();
        let back = depoissonize(&h, opts()).unwrap();
        let pts = j.chart().sample(200, 12);
        assert!(max_diff_over(back.lambda(), j.lambda(), &pts).unwrap() <= 1e-10, "{name}");
        assert!(max_diff_over(back.reeb(), j.reeb(), &pts).unwrap() <= 1e-10, "{name}");
    }

    let c = Arc::new(Chart::euclidean(&["x", "y", "s"]).unwrap());
    let lt = TensorField::parse_sparse(c.clone(), Kind::Multivector, 2, &[(&[0, 1], "exp(-s)")]).unwrap();
    let j = depoissonize(&HomogeneousPoisson::with_scaling_field(lt).unwrap(), opts()).unwrap();
    let p = [0.2, 0.4];
    assert_eq!(j.lambda().eval(&p).unwrap(), vec![1.0]);
    assert_eq!(j.reeb().eval(&p).unwrap(), vec![0.0, 0.0]);

    let lt = TensorField::parse_sparse(c, Kind::Multivector, 2, &[(&[0, 1], "1")]).unwrap();
    assert!(matches!(
        depoissonize(&HomogeneousPoisson::with_scaling_field(lt).unwrap(), opts()),
        Err(Error::NotHomogeneous { .. })
    ));
}

#[test]
fn symplectification_form() {
    let theta = standard_contact_form();
    let w = symplectify_form(&theta).unwrap();
    let c = w.chart().clone();
    let pts = c.sample(100, 6);
    for p in &pts {
        let es = p[3].exp();
        let mut m = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                m[i][k] = w.component(p, &[i, k]).unwrap();
            }
        }
        assert!(det(&m).abs() > 1e-6);
        assert!((w.component(p, &[0, 1]).unwrap() - es).abs() < 1e-12);
        assert!((w.component(p, &[3, 0]).unwrap() + es * p[1]).abs() < 1e-12);
        assert!((w.component(p, &[3, 2]).unwrap() - es).abs() < 1e-12);
    }
    let ds = TensorField::coordinate_vector(c.clone(), 3).unwrap();
    let ith = interior(&ds, &w).unwrap();
    let lifted = theta.embed(c.clone(), vec![0, 1, 2]).unwrap();
    let es = TensorField::function(c.clone(), c.parse("exp(s)").unwrap()).unwrap();
    assert!(max_diff_over(&ith, &lifted.mul_fn(&es).unwrap(), &pts).unwrap() < 1e-12);
    assert!(max_abs_over(&exterior_derivative(&w).unwrap(), &pts).unwrap() < 1e-12);
    let lw = crate::geometry::lie_derivative(&ds, &w).unwrap();
    assert!(max_diff_over(&lw, &w, &pts).unwrap() < 1e-12);
}

#[test]
fn criteria_agree_on_corpus() {
    for (name, j) in known_jacobi() {
        let r = verify_jacobi(&j, opts());
        assert!(r.passed(), "{name}: {}", r.to_json());
        assert_eq!(r.find("jacobi").unwrap().evidence["criteria_agree"], true, "{name}");
    }
    for (name, j) in perturbed() {
        let r = verify_jacobi(&j, opts());
        assert!(!r.passed(), "{name}: {}", r.to_json());
        assert_eq!(r.find("jacobi").unwrap().evidence["criteria_agree"], true, "{name}: {}", r.to_json());
    }
}
