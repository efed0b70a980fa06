//! Reference structures: known Jacobi manifolds and seeded perturbations of them.

use std::sync::Arc;

use super::{conformal_transform, contact_to_jacobi, JacobiStructure, VerifyOptions};
use crate::error::Result;
use crate::exprlang::random_polynomial;
use crate::geometry::{Chart, Kind, TensorField};

pub fn r3() -> Arc<Chart> {
    Arc::new(Chart::euclidean(&["x", "y", "z"]).expect("valid chart"))
}

/// `θ = dz − y dx` on ℝ³.
pub fn standard_contact_form() -> TensorField {
    let c = r3();
    let e = ["-y", "0", "1"].iter().map(|s| c.parse(s).unwrap()).collect();
    TensorField::from_exprs(c, Kind::Form, 1, e).unwrap()
}

pub fn standard_contact() -> JacobiStructure {
    contact_to_jacobi(&standard_contact_form()).expect("standard contact form")
}

/// Linear Poisson structure of su(2)*: `{x2,x3} = x1` and cyclic.
pub fn su2() -> JacobiStructure {
    let c = Arc::new(Chart::euclidean(&["x1", "x2", "x3"]).unwrap());
    JacobiStructure::parse(c, &[(&[1, 2], "x1"), (&[2, 0], "x2"), (&[0, 1], "x3")], &[]).unwrap()
}

/// `f ∂x∧∂y` on ℝ² with a seeded random polynomial `f`.
pub fn random_plane_bivector(seed: u64) -> JacobiStructure {
    let c = Arc::new(Chart::euclidean(&["x", "y"]).unwrap());
    let f = random_polynomial(c.coords(), 3, 6, seed);
    let l = TensorField::from_exprs(c, Kind::Multivector, 2, vec![f]).unwrap();
    JacobiStructure::poisson(l).unwrap()
}

/// `(fΛ, X_f)` for su(2)* and a positive `f`.
pub fn conformal_su2() -> JacobiStructure {
    let p = su2();
    let f = p.chart().parse("2 + sin(x1) + 0.5*x2^2").unwrap();
    conformal_transform(&p, &f, VerifyOptions { samples: 20, ..Default::default() }).unwrap()
}

/// `Λ = 0` with a nonvanishing vector field.
pub fn vector_field_only() -> JacobiStructure {
    JacobiStructure::parse(r3(), &[], &["y", "-x", "1 + z^2"]).unwrap()
}

/// Conformal rescaling of the standard contact structure.
pub fn conformal_contact() -> JacobiStructure {
    let j = standard_contact();
    let tau = j.chart().parse("exp(0.3*x - 0.2*z)").unwrap();
    conformal_transform(&j, &tau, VerifyOptions { samples: 20, ..Default::default() }).unwrap()
}

/// The `M_a` structure with `a = r e^r` restricted to the unit box.
pub fn ma_r_exp_r() -> JacobiStructure {
    let c = Arc::new(Chart::new(&["x1", "x2", "x3"], vec![(-1.0, 1.0); 3]).unwrap());
    let a = "(sqrt(x1^2+x2^2+x3^2)*exp(sqrt(x1^2+x2^2+x3^2)))";
    let s = |v: &str| format!("{a}*{v}");
    let (l1, l2, l3) = (s("x1"), s("x2"), s("x3"));
    JacobiStructure::parse(c, &[(&[1, 2], &l1), (&[2, 0], &l2), (&[0, 1], &l3)], &[]).unwrap()
}

pub fn known_jacobi() -> Vec<(&'static str, JacobiStructure)> {
    vec![
        ("standard_contact", standard_contact()),
        ("su2_dual", su2()),
        ("plane_bivector_1", random_plane_bivector(1)),
        ("plane_bivector_2", random_plane_bivector(2)),
        ("conformal_su2", conformal_su2()),
        ("vector_field_only", vector_field_only()),
        ("conformal_contact", conformal_contact()),
        ("ma_r_exp_r", ma_r_exp_r()),
    ]
}

fn with_lambda_delta(j: &JacobiStructure, entries: &[(&[usize], &str)]) -> Result<JacobiStructure> {
    let d = TensorField::parse_sparse(j.chart().clone(), Kind::Multivector, 2, entries)?;
    JacobiStructure::new(j.lambda().add(&d)?, j.reeb().clone())
}

pub fn perturbed() -> Vec<(&'static str, JacobiStructure)> {
    let c = standard_contact();
    let plane = Arc::new(Chart::euclidean(&["x", "y"]).unwrap());
    vec![
        ("contact_plus_x_dxdz", with_lambda_delta(&c, &[(&[0, 2], "0.1*x")]).unwrap()),
        ("contact_scaled_reeb", JacobiStructure::new(c.lambda().clone(), c.reeb().scale(1.1)).unwrap()),
        ("su2_quadratic", with_lambda_delta(&su2(), &[(&[0, 1], "0.2*x1^2")]).unwrap()),
        ("plane_euler_reeb", JacobiStructure::parse(plane, &[(&[0, 1], "1")], &["x", "0"]).unwrap()),
        ("vector_field_plus_const", with_lambda_delta(&vector_field_only(), &[(&[0, 1], "1")]).unwrap()),
        (
            "cyclic_curl",
            JacobiStructure::parse(r3(), &[(&[1, 2], "y"), (&[2, 0], "z"), (&[0, 1], "x")], &[]).unwrap(),
        ),
    ]
}
