use std::sync::Arc;

use super::chart::Chart;
use super::combin::Combos;
use super::field::{JetField, TensorField};
use super::ops::grassmann_mul;
use crate::error::{Error, Result};
use crate::exprlang::{Expr, Scalar, Taylor};

/// A smooth map between charts given by one component per target coordinate.
#[derive(Clone, Debug)]
pub struct SmoothMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    comps: JetField,
}

impl SmoothMap {
    pub fn from_jets(source: Arc<Chart>, target: Arc<Chart>, comps: JetField) -> Result<SmoothMap> {
        if comps.len() != target.dim() {
            return Err(Error::DimensionMismatch { expected: target.dim(), got: comps.len() });
        }
        if comps.chart().as_ref() != source.as_ref() {
            return Err(Error::ChartMismatch("map components live on another chart".into()));
        }
        Ok(SmoothMap { source, target, comps })
    }

    pub fn from_exprs(source: Arc<Chart>, target: Arc<Chart>, exprs: Vec<Expr>) -> Result<SmoothMap> {
        let comps = JetField::from_exprs(source.clone(), exprs)?;
        SmoothMap::from_jets(source, target, comps)
    }

    pub fn parse(source: Arc<Chart>, target: Arc<Chart>, srcs: &[&str]) -> Result<SmoothMap> {
        let exprs = srcs.iter().map(|s| source.parse(s)).collect::<Result<Vec<_>>>()?;
        SmoothMap::from_exprs(source, target, exprs)
    }

    /// Coordinate projection picking source coordinates `idx` in order.
    pub fn projection(source: Arc<Chart>, target: Arc<Chart>, idx: &[usize]) -> Result<SmoothMap> {
        let exprs = idx.iter().map(|&i| Expr::var(source.coords(), i)).collect();
        SmoothMap::from_exprs(source, target, exprs)
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn comps(&self) -> &JetField {
        &self.comps
    }

    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.comps.values(p)
    }

    /// `f ∘ self` for a list of functions on the target.
    pub fn pullback_functions(&self, f: &JetField) -> Result<JetField> {
        if f.chart().as_ref() != self.target.as_ref() {
            return Err(Error::ChartMismatch("pullback of a field on another chart".into()));
        }
        let (me, g) = (self.comps.clone(), f.clone());
        Ok(JetField::new(self.source.clone(), f.len(), move |p, k| {
            let inner = me.jets(p, k)?;
            let y: Vec<f64> = inner.iter().map(|t| t.value()).collect();
            Ok(g.jets(&y, k)?.iter().map(|t| t.compose(&inner)).collect())
        }))
    }

    pub fn pullback_function(&self, f: &TensorField) -> Result<TensorField> {
        if f.degree() != 0 {
            return Err(Error::DegreeMismatch("expected a function".into()));
        }
        TensorField::function_jets(self.pullback_functions(f.comps())?)
    }

    /// Pullback of a differential form.
    pub fn pullback_form(&self, w: &TensorField) -> Result<TensorField> {
        if w.chart().as_ref() != self.target.as_ref() {
            return Err(Error::ChartMismatch("pullback of a form on another chart".into()));
        }
        if w.degree() == 0 {
            return self.pullback_function(w);
        }
        let (n, m, p) = (self.source.dim(), self.target.dim(), w.degree());
        let tc = Combos::get(m, p);
        let len = Combos::get(n, p).len();
        let (me, g) = (self.comps.clone(), w.comps().clone());
        let comps = JetField::new(self.source.clone(), len, move |pt, k| {
            let fj = me.jets(pt, k + 1)?;
            let y: Vec<f64> = fj.iter().map(|t| t.value()).collect();
            let inner: Vec<Taylor> = fj.iter().map(|t| t.truncate(k)).collect();
            let wj = g.jets(&y, k)?;
            let df: Vec<Vec<Taylor>> = fj.iter().map(|t| (0..n).map(|j| t.derivative(j)).collect()).collect();
            let mut out = vec![Taylor::constant(n, k, 0.0); len];
            for (ii, &mask) in tc.masks().iter().enumerate() {
                if wj[ii].max_abs() == 0.0 {
                    continue;
                }
                let coef = wj[ii].compose(&inner);
                let mut acc = vec![coef];
                let mut deg = 0;
                for i in 0..m {
                    if mask >> i & 1 == 1 {
                        let mut next = vec![Taylor::constant(n, k, 0.0); Combos::get(n, deg + 1).len()];
                        grassmann_mul(n, deg, &acc, 1, &df[i], &mut next);
                        acc = next;
                        deg += 1;
                    }
                }
                for (o, a) in out.iter_mut().zip(&acc) {
                    *o = o.plus(a);
                }
            }
            Ok(out)
        });
        TensorField::from_jets(w.kind(), p, comps)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SmoothMap) -> Result<SmoothMap> {
        let comps = self.pullback_functions(other.comps())?;
        SmoothMap::from_jets(self.source.clone(), other.target.clone(), comps)
    }

    /// Jacobian matrix `∂F^i/∂x^j` at a point.
    pub fn jacobian(&self, p: &[f64]) -> Result<Vec<Vec<f64>>> {
        let j = self.comps.jets(p, 1)?;
        Ok(j.iter().map(|t| (0..self.source.dim()).map(|c| t.d1(c)).collect()).collect())
    }
}
