use std::sync::Arc;

use super::{JacobiStructure, VerifyOptions};
use crate::error::{Error, Result};
use crate::exprlang::{Expr, Func, Taylor};
use crate::geometry::combin::Combos;
use crate::geometry::{lie_derivative, max_abs_over, schouten, wedge, Chart, JetField, Kind, TensorField};

/// A Poisson bivector `Λ̃` with a vector field `Z` such that `L_Z Λ̃ = −Λ̃`.
#[derive(Debug, Clone)]
pub struct HomogeneousPoisson {
    pub lambda_tilde: TensorField,
    pub z: TensorField,
}

impl HomogeneousPoisson {
    pub fn new(lambda_tilde: TensorField, z: TensorField) -> Result<HomogeneousPoisson> {
        crate::geometry::same_chart(lambda_tilde.chart(), z.chart())?;
        if lambda_tilde.degree() != 2 || z.degree() != 1 {
            return Err(Error::DegreeMismatch("need a bivector and a vector field".into()));
        }
        Ok(HomogeneousPoisson { lambda_tilde, z })
    }

    /// With `Z = ∂/∂s` for the last coordinate.
    pub fn with_scaling_field(lambda_tilde: TensorField) -> Result<HomogeneousPoisson> {
        let c = lambda_tilde.chart().clone();
        let z = TensorField::coordinate_vector(c.clone(), c.dim() - 1)?;
        HomogeneousPoisson::new(lambda_tilde, z)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.lambda_tilde.chart()
    }

    /// Max of `|L_Z Λ̃ + Λ̃|` at the points.
    pub fn homogeneity_residual(&self, pts: &[Vec<f64>]) -> Result<f64> {
        max_abs_over(&lie_derivative(&self.z, &self.lambda_tilde)?.add(&self.lambda_tilde)?, pts)
    }

    /// Max of `|[Λ̃, Λ̃]|` at the points.
    pub fn poisson_residual(&self, pts: &[Vec<f64>]) -> Result<f64> {
        if self.chart().dim() < 3 {
            return Ok(0.0);
        }
        max_abs_over(&schouten(&self.lambda_tilde, &self.lambda_tilde)?, pts)
    }

    pub fn as_poisson(&self) -> Result<JacobiStructure> {
        JacobiStructure::poisson(self.lambda_tilde.clone())
    }
}

/// `Λ̃ = e^{−s}(Λ + R ∧ ∂/∂s)` on `M × ℝ_s`, with `Z = ∂/∂s`.
pub fn poissonize(j: &JacobiStructure) -> Result<HomogeneousPoisson> {
    let n = j.chart().dim();
    let big = Arc::new(j.chart().extend("s", (f64::NEG_INFINITY, f64::INFINITY))?);
    let map: Vec<usize> = (0..n).collect();
    let l = j.lambda().embed(big.clone(), map.clone())?;
    let r = j.reeb().embed(big.clone(), map)?;
    let ds = TensorField::coordinate_vector(big.clone(), n)?;
    let e = TensorField::function(big.clone(), Expr::var(big.coords(), n).neg().apply(Func::Exp))?;
    let lt = l.add(&wedge(&r, &ds)?)?.mul_fn(&e)?;
    HomogeneousPoisson::new(lt, ds)
}

/// Inverse of [`poissonize`]: `Λ` and `R` are read off `e^s Λ̃` on the slice `s = 0`.
pub fn depoissonize(h: &HomogeneousPoisson, opts: VerifyOptions) -> Result<JacobiStructure> {
    let chart = h.chart().clone();
    let big_n = chart.dim();
    if big_n < 2 {
        return Err(Error::InvalidChart("need at least one base coordinate besides s".into()));
    }
    let n = big_n - 1;
    let pts = chart.sample(opts.samples.max(1), opts.seed);
    let ds = TensorField::coordinate_vector(chart.clone(), n)?;
    let zdev = max_abs_over(&h.z.sub(&ds)?, &pts)?;
    let hom = h.homogeneity_residual(&pts)?;
    let scale = max_abs_over(&h.lambda_tilde, &pts)?.max(1.0);
    if zdev > opts.tol || hom > opts.tol * scale {
        return Err(Error::NotHomogeneous { residual: zdev.max(hom) });
    }
    let es = TensorField::function(chart.clone(), Expr::var(chart.coords(), n).apply(Func::Exp))?;
    let p = h.lambda_tilde.mul_fn(&es)?;
    let mut worst: f64 = 0.0;
    for x in &pts {
        let a = p.eval(x)?;
        let mut x0 = x.clone();
        x0[n] = 0.0;
        let b = p.eval(&x0)?;
        for (u, v) in a.iter().zip(&b) {
            worst = worst.max((u - v).abs() / (1.0 + v.abs()));
        }
    }
    if worst > opts.tol {
        return Err(Error::NotProjectable { residual: worst });
    }
    let b = chart.bounds()[..n].to_vec();
    let base = Arc::new(Chart::new(&chart.coords()[..n], b)?);
    let big = Combos::get(big_n, 2);
    let small = Combos::get(n, 2);
    let keep: Vec<usize> = (0..n).collect();
    let sliced = {
        let p = p.comps().clone();
        let keep = keep.clone();
        move |x: &[f64], k: usize| -> Result<Vec<Taylor>> {
            let mut y = x.to_vec();
            y.push(0.0);
            Ok(p.jets(&y, k)?.iter().map(|t| t.restrict(&keep)).collect())
        }
    };
    let sliced = Arc::new(sliced);
    let s1 = sliced.clone();
    let lam_slots: Vec<usize> = small
        .masks()
        .iter()
        .map(|&m| big.index(m).unwrap())
        .collect();
    let lambda = JetField::new(base.clone(), small.len(), move |x, k| {
        let v = s1(x, k)?;
        Ok(lam_slots.iter().map(|&i| v[i].clone()).collect())
    });
    let reeb_slots: Vec<usize> = (0..n).map(|jj| big.index(1 << jj | 1 << n).unwrap()).collect();
    let reeb = JetField::new(base, n, move |x, k| {
        let v = sliced(x, k)?;
        Ok(reeb_slots.iter().map(|&i| v[i].clone()).collect())
    });
    JacobiStructure::new(
        TensorField::from_jets(Kind::Multivector, 2, lambda)?,
        TensorField::from_jets(Kind::Multivector, 1, reeb)?,
    )
}
