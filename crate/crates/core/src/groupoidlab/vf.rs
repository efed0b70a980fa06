use crate::error::{Error, Result};
use crate::geometry::TensorField;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn admissible(v: &[f64], l: &[f64]) -> Result<()> {
    let s = 1.0 + dot(l, v);
    if s > 0.0 {
        Ok(())
    } else {
        Err(Error::NotInGroup { value: s })
    }
}

/// Product in `G(v) = {λ : 1 + λ(v) > 0}`: `u ↦ λ(u) + η(u) + λ(v)η(u)`.
pub fn vf_group_product(v: &[f64], l: &[f64], eta: &[f64]) -> Result<Vec<f64>> {
    if l.len() != v.len() || eta.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: v.len(), got: l.len().max(eta.len()) });
    }
    admissible(v, l)?;
    admissible(v, eta)?;
    let lv = dot(l, v);
    Ok(l.iter().zip(eta).map(|(a, b)| a + b + lv * b).collect())
}

pub fn vf_group_inverse(v: &[f64], l: &[f64]) -> Result<Vec<f64>> {
    admissible(v, l)?;
    let s = 1.0 + dot(l, v);
    Ok(l.iter().map(|a| -a / s).collect())
}

/// `φ_λ = Id + v ⊗ λ`, acting by `u ↦ u + λ(u) v`.
pub fn vf_phi(v: &[f64], l: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 } + v[i] * l[j]).collect()).collect()
}

/// Arrow `(λ, x, t)` of `G(X) ⋊ D(X)`, from `φ_X^t(x)` into `x`, with `λ ∈ G(X_x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VfArrow {
    pub lambda: Vec<f64>,
    pub x: Vec<f64>,
    pub t: f64,
}

/// Composition engine of the contact groupoid of a vector field.
#[derive(Debug, Clone)]
pub struct VfContactGroupoid {
    field: TensorField,
    t_range: (f64, f64),
    steps_per_unit: usize,
}

/// Base-point match required for composition after flow integration.
pub const VF_COMPOSABLE_TOL: f64 = 1e-9;

pub fn vf_contact_groupoid(field: &TensorField, t_range: (f64, f64)) -> Result<VfContactGroupoid> {
    if field.degree() != 1 || field.kind() != crate::geometry::Kind::Multivector {
        return Err(Error::DegreeMismatch("expected a vector field".into()));
    }
    if !(t_range.0 <= 0.0 && 0.0 <= t_range.1) {
        return Err(Error::Domain(format!("time range {t_range:?} must contain 0")));
    }
    Ok(VfContactGroupoid { field: field.clone(), t_range, steps_per_unit: 400 })
}

impl VfContactGroupoid {
    pub fn field(&self) -> &TensorField {
        &self.field
    }

    pub fn x_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.field.eval(x)
    }

    /// `φ_X^t(x)` and `(dφ_X^t)_x`, integrated jointly with the variational equation.
    pub fn flow(&self, x: &[f64], t: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        if t < self.t_range.0 || t > self.t_range.1 {
            return Err(Error::LeftDomain { time: t });
        }
        let n = x.len();
        let steps = ((t.abs() * self.steps_per_unit as f64).ceil() as usize).max(1);
        let h = t / steps as f64;
        let mut y: Vec<f64> = x.to_vec();
        for i in 0..n {
            y.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
        }
        let rhs = |_: f64, y: &[f64]| -> Result<Vec<f64>> {
            let j = self.field.jets(&y[..n], 1)?;
            let mut out: Vec<f64> = j.iter().map(|t| t.value()).collect();
            // d/dt J = DX · J, J stored row-major
            for a in 0..n {
                for b in 0..n {
                    out.push((0..n).map(|c| j[a].d1(c) * y[n + c * n + b]).sum());
                }
            }
            Ok(out)
        };
        let chart = self.field.chart();
        for k in 0..steps {
            y = crate::numerics::rk4_step(&rhs, k as f64 * h, &y, h)?;
            if !chart.contains(&y[..n]) {
                return Err(Error::LeftDomain { time: (k + 1) as f64 * h });
            }
        }
        let j = (0..n).map(|a| y[n + a * n..n + (a + 1) * n].to_vec()).collect();
        Ok((y[..n].to_vec(), j))
    }

    /// Source point `φ_X^t(x)` of an arrow.
    pub fn source(&self, a: &VfArrow) -> Result<Vec<f64>> {
        Ok(self.flow(&a.x, a.t)?.0)
    }

    pub fn unit(&self, x: &[f64]) -> VfArrow {
        VfArrow { lambda: vec![0.0; x.len()], x: x.to_vec(), t: 0.0 }
    }

    /// `(λ, x, t)(λ', x', t') = (λ ⋆ φ_{x,t}(λ'), x, t + t')` for `x' = φ_X^t(x)`, where
    /// `φ_{x,t}(λ') = λ' ∘ (dφ_X^t)_x` and `⋆` is the product of `G(X_x)`.
    pub fn compose(&self, a: &VfArrow, b: &VfArrow) -> Result<VfArrow> {
        let (y, j) = self.flow(&a.x, a.t)?;
        let d = y.iter().zip(&b.x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        if d > VF_COMPOSABLE_TOL {
            return Err(Error::NotComposable { distance: d });
        }
        let n = a.x.len();
        let pulled: Vec<f64> = (0..n).map(|c| (0..n).map(|r| b.lambda[r] * j[r][c]).sum()).collect();
        let v = self.x_at(&a.x)?;
        admissible(&self.x_at(&b.x)?, &b.lambda)?;
        let lambda = vf_group_product(&v, &a.lambda, &pulled)?;
        Ok(VfArrow { lambda, x: a.x.clone(), t: a.t + b.t })
    }

    /// Smallest `t ∈ [t_min, t_max]` with `φ_X^t(x) = x`, by a distance scan refined with a
    /// golden-section search; `None` when no orbit closes within `tol`.
    pub fn return_time(&self, x: &[f64], t_min: f64, t_max: f64, tol: f64) -> Result<Option<f64>> {
        let n = 2000;
        let d2 = |t: f64| -> Result<f64> {
            let y = self.flow(x, t)?.0;
            Ok(y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum())
        };
        let ts: Vec<f64> = (0..=n).map(|i| t_min + (t_max - t_min) * i as f64 / n as f64).collect();
        // the scan advances node to node instead of integrating each time from 0
        let mut y = self.flow(x, t_min)?.0;
        let mut ds = Vec::with_capacity(n + 1);
        for i in 0..=n {
            if i > 0 {
                y = self.flow(&y, ts[i] - ts[i - 1])?.0;
            }
            ds.push(y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>());
        }
        for i in 1..n {
            if ds[i] <= ds[i - 1] && ds[i] <= ds[i + 1] {
                let (mut a, mut b) = (ts[i - 1], ts[i + 1]);
                let g = (5f64.sqrt() - 1.0) / 2.0;
                let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
                let (mut fc, mut fd) = (d2(c)?, d2(d)?);
                while b - a > 1e-11 {
                    if fc < fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - g * (b - a);
                        fc = d2(c)?;
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + g * (b - a);
                        fd = d2(d)?;
                    }
                }
                let t = 0.5 * (a + b);
                if d2(t)?.sqrt() <= tol {
                    return Ok(Some(t));
                }
            }
        }
        Ok(None)
    }
}
