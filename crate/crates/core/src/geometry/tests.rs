use std::sync::Arc;

use super::*;
use crate::error::Error;
use crate::exprlang::random_polynomial;

fn r(n: &[&str]) -> Arc<Chart> {
    Arc::new(Chart::euclidean(n).unwrap())
}

fn vf(c: &Arc<Chart>, comps: &[&str]) -> TensorField {
    let e = comps.iter().map(|s| c.parse(s).unwrap()).collect();
    TensorField::from_exprs(c.clone(), Kind::Multivector, 1, e).unwrap()
}

fn form1(c: &Arc<Chart>, comps: &[&str]) -> TensorField {
    let e = comps.iter().map(|s| c.parse(s).unwrap()).collect();
    TensorField::from_exprs(c.clone(), Kind::Form, 1, e).unwrap()
}

fn rand_field(c: &Arc<Chart>, kind: Kind, deg: usize, seed: u64) -> TensorField {
    let n = combin::binomial(c.dim(), deg);
    let e = (0..n).map(|i| random_polynomial(c.coords(), 3, 4, seed * 100 + i as u64)).collect();
    TensorField::from_exprs(c.clone(), kind, deg, e).unwrap()
}

fn contact_lambda(c: &Arc<Chart>) -> TensorField {
    TensorField::parse_sparse(c.clone(), Kind::Multivector, 2, &[(&[0, 1], "-1"), (&[1, 2], "y")]).unwrap()
}

#[test]
fn wedge_examples() {
    let c = r(&["x", "y"]);
    let dx = TensorField::coordinate_vector(c.clone(), 0).unwrap();
    let dy = TensorField::coordinate_vector(c.clone(), 1).unwrap();
    assert_eq!(wedge(&dx, &dy).unwrap().eval(&[0.3, 0.1]).unwrap(), vec![1.0]);
    assert_eq!(wedge(&dy, &dx).unwrap().eval(&[0.3, 0.1]).unwrap(), vec![-1.0]);

    let c3 = r(&["x", "y", "z"]);
    let rz = TensorField::coordinate_vector(c3.clone(), 2).unwrap();
    let l = TensorField::parse_sparse(c3.clone(), Kind::Multivector, 2, &[(&[0, 1], "1")]).unwrap();
    assert_eq!(wedge(&rz, &l).unwrap().eval(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0]);

    let fx = TensorField::coordinate_form(c.clone(), 0).unwrap();
    assert_eq!(wedge(&fx, &fx).unwrap().eval(&[0.5, 0.5]).unwrap(), vec![0.0]);
    assert!(matches!(wedge(&l, &l), Err(Error::DegreeOverflow(_))));
    assert!(matches!(wedge(&dx, &TensorField::coordinate_vector(c3, 0).unwrap()), Err(Error::ChartMismatch(_))));
}

#[test]
fn interior_examples() {
    let c = r(&["x", "y", "z"]);
    let theta = form1(&c, &["-y", "0", "1"]);
    let rz = TensorField::coordinate_vector(c.clone(), 2).unwrap();
    assert_eq!(interior(&rz, &theta).unwrap().eval(&[0.4, -1.2, 2.0]).unwrap(), vec![1.0]);
    let l = contact_lambda(&c);
    for p in c.sample(50, 1) {
        assert!(interior(&theta, &l).unwrap().max_abs(&p).unwrap() <= 1e-12);
    }
    let f = TensorField::function(c.clone(), c.parse("x*y").unwrap()).unwrap();
    assert!(matches!(interior(&rz, &f), Err(Error::DegreeUnderflow(_))));
}

#[test]
fn exterior_derivative_examples() {
    let c = r(&["x", "y"]);
    let w = form1(&c, &["0", "x"]);
    assert_eq!(exterior_derivative(&w).unwrap().eval(&[0.2, 0.9]).unwrap(), vec![1.0]);
    let c3 = r(&["x", "y", "z"]);
    let theta = form1(&c3, &["-y", "0", "1"]);
    let dt = exterior_derivative(&theta).unwrap();
    let v = dt.eval(&[0.1, 0.2, 0.3]).unwrap();
    assert_eq!(v, vec![1.0, 0.0, 0.0]);
    let top = wedge(&theta, &dt).unwrap();
    assert!(matches!(exterior_derivative(&top), Err(Error::DegreeOverflow(_))));
}

#[test]
fn d_squared_and_double_interior_vanish() {
    let c = r(&["a", "b", "c", "d"]);
    let pts = c.sample(200, 7);
    for deg in 0..3 {
        let w = rand_field(&c, Kind::Form, deg, deg as u64 + 1);
        let dd = exterior_derivative(&exterior_derivative(&w).unwrap()).unwrap();
        assert!(max_abs_over(&dd, &pts).unwrap() <= 1e-10, "deg {deg}");
    }
    let v = rand_field(&c, Kind::Multivector, 1, 9);
    let w = rand_field(&c, Kind::Form, 3, 10);
    let ii = interior(&v, &interior(&v, &w).unwrap()).unwrap();
    assert!(max_abs_over(&ii, &pts).unwrap() <= 1e-10);
    let a = rand_field(&c, Kind::Form, 1, 11);
    let p = rand_field(&c, Kind::Multivector, 3, 12);
    let ii = interior(&a, &interior(&a, &p).unwrap()).unwrap();
    assert!(max_abs_over(&ii, &pts).unwrap() <= 1e-10);
}

#[test]
fn lie_derivative_examples() {
    let c = r(&["x", "y", "s"]);
    let ds = TensorField::coordinate_vector(c.clone(), 2).unwrap();
    let l = TensorField::parse_sparse(c.clone(), Kind::Multivector, 2, &[(&[0, 1], "exp(-s)")]).unwrap();
    let ll = lie_derivative(&ds, &l).unwrap();
    for p in c.sample(20, 3) {
        let v = ll.eval(&p).unwrap();
        assert!((v[0] + (-p[2]).exp()).abs() < 1e-12);
        assert!(v[1].abs() < 1e-15 && v[2].abs() < 1e-15);
    }

    let c4 = r(&["x", "y", "z", "s"]);
    let es_theta = form1(&c4, &["-y*exp(s)", "0", "exp(s)", "0"]);
    let w = exterior_derivative(&es_theta).unwrap();
    let ds4 = TensorField::coordinate_vector(c4.clone(), 3).unwrap();
    let lw = lie_derivative(&ds4, &w).unwrap();
    assert!(max_diff_over(&lw, &w, &c4.sample(50, 4)).unwrap() < 1e-12);

    let x = vf(&c, &["y", "x*s", "1"]);
    let f = TensorField::function(c.clone(), c.parse("x*y + s^2").unwrap()).unwrap();
    let lf = lie_derivative(&x, &f).unwrap();
    let p = [0.5, -0.7, 1.1];
    let expect = p[1] * p[1] + p[0] * p[2] * p[0] + 2.0 * p[2];
    assert!((lf.eval(&p).unwrap()[0] - expect).abs() < 1e-12);
}

#[test]
fn cartan_formula_on_forms() {
    let c = r(&["a", "b", "c"]);
    let pts = c.sample(100, 5);
    let x = rand_field(&c, Kind::Multivector, 1, 21);
    for deg in 1..3 {
        let w = rand_field(&c, Kind::Form, deg, 22 + deg as u64);
        let lie = lie_derivative(&x, &w).unwrap();
        let cartan = interior(&x, &exterior_derivative(&w).unwrap())
            .unwrap()
            .add(&exterior_derivative(&interior(&x, &w).unwrap()).unwrap())
            .unwrap();
        assert!(max_diff_over(&lie, &cartan, &pts).unwrap() < 1e-10, "deg {deg}");
    }
    let top = rand_field(&c, Kind::Form, 3, 30);
    let lie = lie_derivative(&x, &top).unwrap();
    let cartan = exterior_derivative(&interior(&x, &top).unwrap()).unwrap();
    assert!(max_diff_over(&lie, &cartan, &pts).unwrap() < 1e-10);
}

#[test]
fn schouten_examples() {
    let c = r(&["x", "y"]);
    let b = schouten(&vf(&c, &["1", "0"]), &vf(&c, &["0", "x"])).unwrap();
    assert_eq!(b.eval(&[0.7, 0.2]).unwrap(), vec![0.0, 1.0]);

    let c4 = r(&["a", "b", "c", "d"]);
    let l = TensorField::parse_sparse(c4.clone(), Kind::Multivector, 2, &[(&[0, 1], "2"), (&[1, 3], "-0.5"), (&[2, 3], "3")])
        .unwrap();
    assert!(max_abs_over(&schouten(&l, &l).unwrap(), &c4.sample(20, 1)).unwrap() == 0.0);

    let c3 = r(&["x", "y", "z"]);
    let l = contact_lambda(&c3);
    let rz = TensorField::coordinate_vector(c3.clone(), 2).unwrap();
    let pts = c3.sample(50, 2);
    let e1 = schouten(&l, &l).unwrap().sub(&wedge(&rz, &l).unwrap().scale(2.0)).unwrap();
    assert!(max_abs_over(&e1, &pts).unwrap() <= 1e-10);
    assert!(max_abs_over(&schouten(&l, &rz).unwrap(), &pts).unwrap() <= 1e-10);
    assert!(matches!(schouten(&l, &schouten(&l, &l).unwrap()), Err(Error::DegreeOverflow(_))));
}

#[test]
fn schouten_is_lie_derivative_and_matches_coordinate_formula() {
    let c = r(&["x", "y", "z"]);
    let pts = c.sample(60, 8);
    let l = rand_field(&c, Kind::Multivector, 2, 41);
    let rv = rand_field(&c, Kind::Multivector, 1, 42);
    let lhs = schouten(&l, &rv).unwrap();
    let rhs = lie_derivative(&rv, &l).unwrap().neg();
    assert!(max_diff_over(&lhs, &rhs, &pts).unwrap() < 1e-10);

    let ll = schouten(&l, &l).unwrap();
    for p in &pts {
        let v = l.jets(p, 1).unwrap();
        let lam = |i: usize, j: usize| -> (f64, Vec<f64>) {
            let (s, k) = match (i, j) {
                (0, 1) => (1.0, 0),
                (1, 0) => (-1.0, 0),
                (0, 2) => (1.0, 1),
                (2, 0) => (-1.0, 1),
                (1, 2) => (1.0, 2),
                (2, 1) => (-1.0, 2),
                _ => return (0.0, vec![0.0; 3]),
            };
            (s * v[k].value(), (0..3).map(|d| s * v[k].d1(d)).collect())
        };
        let mut s = 0.0;
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            for m in 0..3 {
                s += lam(i, m).0 * lam(j, k).1[m];
            }
        }
        assert!((ll.eval(p).unwrap()[0] - 2.0 * s).abs() < 1e-10);
    }
}

#[test]
fn schouten_graded_symmetry() {
    let c = r(&["a", "b", "c", "d"]);
    let pts = c.sample(40, 9);
    for (da, db) in [(1, 1), (1, 2), (2, 2), (2, 3), (1, 3), (0, 2)] {
        let a = rand_field(&c, Kind::Multivector, da, 50 + da as u64);
        let b = rand_field(&c, Kind::Multivector, db, 60 + db as u64);
        let ab = schouten(&a, &b).unwrap();
        let ba = schouten(&b, &a).unwrap();
        let s = if (da as i64 - 1) * (db as i64 - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let res = ab.add(&ba.scale(s)).unwrap();
        assert!(max_abs_over(&res, &pts).unwrap() < 1e-10, "({da},{db})");
    }
}

#[test]
fn lie_poisson_su2_is_poisson() {
    let c = r(&["x1", "x2", "x3"]);
    let l = TensorField::parse_sparse(c.clone(), Kind::Multivector, 2, &[(&[1, 2], "x1"), (&[2, 0], "x2"), (&[0, 1], "x3")])
        .unwrap();
    assert!(max_abs_over(&schouten(&l, &l).unwrap(), &c.sample(100, 3)).unwrap() < 1e-12);
    let bad = TensorField::parse_sparse(c.clone(), Kind::Multivector, 2, &[(&[1, 2], "x2"), (&[2, 0], "x3"), (&[0, 1], "x1")])
        .unwrap();
    assert!(max_abs_over(&schouten(&bad, &bad).unwrap(), &c.sample(100, 3)).unwrap() > 1e-3);
}

#[test]
fn pullback_commutes_with_d() {
    let src = r(&["u", "v", "w"]);
    let tgt = r(&["x", "y"]);
    let f = SmoothMap::parse(src.clone(), tgt.clone(), &["u*v + sin(w)", "exp(u) - w^2"]).unwrap();
    let w = form1(&tgt, &["x*y", "cos(x)"]);
    let a = exterior_derivative(&f.pullback_form(&w).unwrap()).unwrap();
    let b = f.pullback_form(&exterior_derivative(&w).unwrap()).unwrap();
    assert!(max_diff_over(&a, &b, &src.sample(50, 2)).unwrap() < 1e-10);
}

#[test]
fn sampler_is_reproducible_and_inside() {
    let c = Chart::new(&["x", "y"], vec![(0.0, 1.0), (f64::NEG_INFINITY, f64::INFINITY)]).unwrap();
    let a = c.sample(100, 42);
    assert_eq!(a, c.sample(100, 42));
    assert_ne!(a, c.sample(100, 43));
    assert!(a.iter().all(|p| p[0] > 0.0 && p[0] < 1.0 && p[1].abs() < SAMPLING_CLIP));
    assert!(Chart::new(&["x", "x"], vec![(0.0, 1.0); 2]).is_err());
    assert!(Chart::new(&["x"], vec![(1.0, 1.0)]).is_err());
}
