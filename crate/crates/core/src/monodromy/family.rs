use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprlang::{parse, Expr};
use crate::geometry::{Chart, Kind, TensorField};
use crate::jacobi::{JacobiStructure, VerifyOptions};
use crate::numerics::gauss_legendre;

/// `a(r) > 0` on `(0, r_max]`, given as an expression in `r`.
#[derive(Debug, Clone)]
pub struct MaFamily {
    a: Expr,
    r_max: f64,
}

/// Radii at which positivity is checked.
const POSITIVITY_SAMPLES: usize = 400;

impl MaFamily {
    pub fn new(a: Expr, r_max: f64) -> Result<MaFamily> {
        if a.coords().len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: a.coords().len() });
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::Domain(format!("r_max = {r_max} must be positive")));
        }
        let f = MaFamily { a, r_max };
        // jets at the origin must exist; the value there may vanish
        let j = f.a.eval_taylor(&[0.0], 2)?;
        if !j.coeffs().iter().all(|c| c.is_finite()) {
            return Err(Error::Domain("a(r) is not smooth at r = 0".into()));
        }
        for k in 1..=POSITIVITY_SAMPLES {
            let r = r_max * k as f64 / POSITIVITY_SAMPLES as f64;
            for r in [r, r_max * 1e-6 * k as f64] {
                let v = f.a.eval(&[r])?;
                if !(v > 0.0) {
                    return Err(Error::NotPositive { r });
                }
            }
        }
        Ok(f)
    }

    pub fn parse(src: &str, r_max: f64) -> Result<MaFamily> {
        MaFamily::new(parse(src, &["r"])?, r_max)
    }

    pub fn a_expr(&self) -> &Expr {
        &self.a
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn a(&self, r: f64) -> Result<f64> {
        self.a.eval(&[r])
    }

    fn check(&self, r: f64) -> Result<()> {
        if r > 0.0 && r <= self.r_max {
            Ok(())
        } else {
            Err(Error::OutOfRange { r, r_max: self.r_max })
        }
    }

    /// `A(r) = 4πr/a(r)` with its derivative from the first jet of `a`.
    pub fn area_and_derivative(&self, r: f64) -> Result<(f64, f64)> {
        let j = self.a.eval_taylor(&[r], 1)?;
        let (a, da) = (j.value(), j.d1(0));
        Ok((4.0 * PI * r / a, 4.0 * PI * (a - r * da) / (a * a)))
    }

    /// Rows `r, A, A', A + A'` on `n` uniform radii in `(0, r_max]`.
    pub fn area_table(&self, n: usize) -> Result<Vec<[f64; 4]>> {
        (1..=n)
            .map(|k| {
                let r = self.r_max * k as f64 / n as f64;
                let (a, d) = self.area_and_derivative(r)?;
                Ok([r, a, d, a + d])
            })
            .collect()
    }
}

/// The linear-in-`x` bivector scaled by `a(|x|)` on `[−b, b]³`, `b = r_max/√3`.
pub fn ma_structure(f: &MaFamily) -> Result<JacobiStructure> {
    let b = f.r_max / 3f64.sqrt();
    let chart = Arc::new(Chart::new(&["x1", "x2", "x3"], vec![(-b, b); 3])?);
    let r = chart.parse("sqrt(x1^2 + x2^2 + x3^2)")?;
    let a = f.a.substitute(&[r]);
    let x = |i| Expr::var(chart.coords(), i);
    let entries = vec![(vec![1, 2], a.mul(&x(0))), (vec![0, 2], a.mul(&x(1)).neg()), (vec![0, 1], a.mul(&x(2)))];
    let lambda = TensorField::from_sparse(chart.clone(), Kind::Multivector, 2, entries)?;
    let mut j = JacobiStructure::poisson(lambda)?;
    j.verify(VerifyOptions::default());
    Ok(j)
}

/// Angles `(θ, φ) ∈ (0, π) × (0, 2π)`.
pub fn sphere_chart() -> Arc<Chart> {
    Arc::new(Chart::new(&["theta", "phi"], vec![(0.0, PI), (0.0, 2.0 * PI)]).expect("valid chart"))
}

/// `ω_r = 1/(a r²)(x¹dx²dx³ + x²dx³dx¹ + x³dx¹dx²)` pulled back to the angle chart: `(r/a) sinθ dθ∧dφ`.
pub fn leaf_form(f: &MaFamily, r: f64) -> Result<TensorField> {
    f.check(r)?;
    let c = sphere_chart();
    let e = c.parse("sin(theta)")?.scale(r / f.a(r)?);
    TensorField::from_sparse(c, Kind::Form, 2, vec![(vec![0, 1], e)])
}

/// `∫_{S_r} ω_r` by a product Gauss–Legendre grid in `(θ, φ)`, evaluating the ambient form on
/// the embedded tangent frame.
pub fn leaf_area_quadrature(f: &MaFamily, r: f64, nodes: usize) -> Result<f64> {
    f.check(r)?;
    let a = f.a(r)?;
    let (x, w) = gauss_legendre(nodes);
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let th = PI * (xi + 1.0) / 2.0;
        for (xj, wj) in x.iter().zip(&w) {
            let ph = PI * (xj + 1.0);
            let p = [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
            let et = [r * th.cos() * ph.cos(), r * th.cos() * ph.sin(), -r * th.sin()];
            let ep = [-r * th.sin() * ph.sin(), r * th.sin() * ph.cos(), 0.0];
            let cross = [et[1] * ep[2] - et[2] * ep[1], et[2] * ep[0] - et[0] * ep[2], et[0] * ep[1] - et[1] * ep[0]];
            let v = (p[0] * cross[0] + p[1] * cross[1] + p[2] * cross[2]) / (a * r * r);
            total += wi * wj * v;
        }
    }
    Ok(total * PI / 2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaReport {
    pub r: f64,
    pub closed_form: f64,
    pub quadrature: Option<f64>,
}

impl AreaReport {
    pub fn relative_error(&self) -> Option<f64> {
        self.quadrature.map(|q| (q - self.closed_form).abs() / self.closed_form.abs())
    }
}

/// `A(r) = 4πr/a(r)`; with `verify` also the sphere quadrature of the leaf form.
pub fn symplectic_area(f: &MaFamily, r: f64, verify: bool) -> Result<AreaReport> {
    f.check(r)?;
    let closed_form = f.area_and_derivative(r)?.0;
    let quadrature = if verify { Some(leaf_area_quadrature(f, r, 48)?) } else { None };
    Ok(AreaReport { r, closed_form, quadrature })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonodromyGenerators {
    pub poisson: f64,
    /// `(A'(r), A(r))`
    pub jacobi: (f64, f64),
}

/// Generator scales of the Poisson and Jacobi monodromy at radius `r`. The lattice constant `n`
/// in the Poisson expression is left symbolic.
pub fn ma_monodromy_generators(f: &MaFamily, r: f64) -> Result<MonodromyGenerators> {
    f.check(r)?;
    let (a, d) = f.area_and_derivative(r)?;
    Ok(MonodromyGenerators { poisson: d, jacobi: (d, a) })
}

/// `A' + A` away from the origin and `+∞` at `r = 0`.
pub fn gap_function(f: &MaFamily, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(f64::INFINITY);
    }
    f.check(r)?;
    let (a, d) = f.area_and_derivative(r)?;
    Ok(a + d)
}
