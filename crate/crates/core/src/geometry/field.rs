use std::fmt;
use std::sync::Arc;

use super::chart::Chart;
use super::combin::{binomial, sort_tuple, Combos};
use crate::error::{Error, Result};
use crate::exprlang::{Expr, Scalar, Taylor};

/// Evaluator returning one Taylor jet per component at a point and order.
pub type JetFn = dyn Fn(&[f64], usize) -> Result<Vec<Taylor>> + Send + Sync;

/// A finite list of smooth functions on a chart, evaluated lazily as jets.
#[derive(Clone)]
pub struct JetField {
    chart: Arc<Chart>,
    len: usize,
    f: Arc<JetFn>,
}

impl fmt::Debug for JetField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetField({} components on {:?})", self.len, self.chart.coords())
    }
}

impl JetField {
    pub fn new<F>(chart: Arc<Chart>, len: usize, f: F) -> JetField
    where
        F: Fn(&[f64], usize) -> Result<Vec<Taylor>> + Send + Sync + 'static,
    {
        JetField { chart, len, f: Arc::new(f) }
    }

    /// Components given by expressions in the chart coordinates.
    pub fn from_exprs(chart: Arc<Chart>, exprs: Vec<Expr>) -> Result<JetField> {
        let exprs: Vec<Expr> = exprs
            .into_iter()
            .map(|e| {
                if e.coords() == chart.coords() {
                    return Ok(e);
                }
                for n in e.free_var_names() {
                    if chart.index_of(n).is_none() {
                        return Err(Error::ChartMismatch(format!("`{n}` is not a coordinate of the chart")));
                    }
                }
                if e.coords().is_empty() {
                    return Ok(e.rebase(chart.coords()));
                }
                Ok(e.substitute(
                    &e.coords()
                        .iter()
                        .map(|n| match chart.index_of(n) {
                            Some(i) => Expr::var(chart.coords(), i),
                            None => Expr::constant(chart.coords(), 0.0),
                        })
                        .collect::<Vec<_>>(),
                ))
            })
            .collect::<Result<_>>()?;
        let n = exprs.len();
        Ok(JetField::new(chart, n, move |p, k| {
            let seeds = Taylor::seed(p, k);
            let proto = Taylor::constant(p.len(), k, 0.0);
            exprs.iter().map(|e| e.eval_scalar(&seeds, &proto)).collect()
        }))
    }

    pub fn constant(chart: Arc<Chart>, vals: Vec<f64>) -> JetField {
        let n = vals.len();
        JetField::new(chart, n, move |p, k| Ok(vals.iter().map(|&v| Taylor::constant(p.len(), k, v)).collect()))
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn jets(&self, p: &[f64], order: usize) -> Result<Vec<Taylor>> {
        if p.len() != self.chart.dim() {
            return Err(Error::DimensionMismatch { expected: self.chart.dim(), got: p.len() });
        }
        let v = (self.f)(p, order)?;
        debug_assert_eq!(v.len(), self.len);
        Ok(v)
    }

    pub fn values(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jets(p, 0)?.iter().map(|t| t.value()).collect())
    }

    /// Componentwise map of jets.
    pub fn map<F>(&self, len: usize, f: F) -> JetField
    where
        F: Fn(Vec<Taylor>) -> Result<Vec<Taylor>> + Send + Sync + 'static,
    {
        let me = self.clone();
        JetField::new(self.chart.clone(), len, move |p, k| f(me.jets(p, k)?))
    }

    /// Re-expresses the field on `big`, reading coordinate `j` of this chart from `map[j]`.
    pub fn embed(&self, big: Arc<Chart>, map: Vec<usize>) -> JetField {
        assert_eq!(map.len(), self.chart.dim());
        let me = self.clone();
        let n = big.dim();
        JetField::new(big, self.len, move |p, k| {
            let small: Vec<f64> = map.iter().map(|&j| p[j]).collect();
            Ok(me.jets(&small, k)?.iter().map(|t| t.extend_vars(n, &map)).collect())
        })
    }

    pub fn concat(&self, other: &JetField) -> Result<JetField> {
        same_chart(&self.chart, &other.chart)?;
        let (a, b) = (self.clone(), other.clone());
        Ok(JetField::new(self.chart.clone(), self.len + other.len, move |p, k| {
            let mut v = a.jets(p, k)?;
            v.extend(b.jets(p, k)?);
            Ok(v)
        }))
    }

    pub fn select(&self, idx: Vec<usize>) -> JetField {
        self.map(idx.len(), move |v| Ok(idx.iter().map(|&i| v[i].clone()).collect()))
    }
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::ChartMismatch(format!("{:?} vs {:?}", a.coords(), b.coords())))
    }
}

/// Whether a field is a multivector or a differential form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Kind {
    Multivector,
    Form,
}

/// Antisymmetric field stored on strictly increasing index tuples in lexicographic order.
#[derive(Clone, Debug)]
pub struct TensorField {
    kind: Kind,
    degree: usize,
    comps: JetField,
}

impl TensorField {
    pub fn from_jets(kind: Kind, degree: usize, comps: JetField) -> Result<TensorField> {
        let n = comps.chart().dim();
        if comps.len() != binomial(n, degree) {
            return Err(Error::DimensionMismatch { expected: binomial(n, degree), got: comps.len() });
        }
        Ok(TensorField { kind, degree, comps })
    }

    /// Dense components in lexicographic tuple order.
    pub fn from_exprs(chart: Arc<Chart>, kind: Kind, degree: usize, exprs: Vec<Expr>) -> Result<TensorField> {
        TensorField::from_jets(kind, degree, JetField::from_exprs(chart, exprs)?)
    }

    /// Sparse components from source strings; tuples may be unsorted (the sign is applied).
    pub fn parse_sparse(chart: Arc<Chart>, kind: Kind, degree: usize, entries: &[(&[usize], &str)]) -> Result<TensorField> {
        let list: Vec<(Vec<usize>, Expr)> = entries
            .iter()
            .map(|(i, s)| Ok((i.to_vec(), chart.parse(s)?)))
            .collect::<Result<_>>()?;
        TensorField::from_sparse(chart, kind, degree, list)
    }

    pub fn from_sparse(chart: Arc<Chart>, kind: Kind, degree: usize, entries: Vec<(Vec<usize>, Expr)>) -> Result<TensorField> {
        let n = chart.dim();
        let combos = Combos::get(n, degree);
        let zero = Expr::constant(chart.coords(), 0.0);
        let mut exprs = vec![zero; combos.len()];
        for (idx, e) in entries {
            if idx.len() != degree || idx.iter().any(|&i| i >= n) {
                return Err(Error::DegreeMismatch(format!("index tuple {idx:?} for degree {degree}")));
            }
            let (mask, sign) = sort_tuple(&idx).ok_or_else(|| Error::DegreeMismatch(format!("repeated index in {idx:?}")))?;
            let slot = combos.index(mask).unwrap();
            let e = e.rebase(chart.coords());
            let e = if sign < 0.0 { e.neg() } else { e };
            exprs[slot] = exprs[slot].add(&e);
        }
        TensorField::from_exprs(chart, kind, degree, exprs)
    }

    /// A function, i.e. a degree-0 field.
    pub fn function(chart: Arc<Chart>, e: Expr) -> Result<TensorField> {
        TensorField::from_exprs(chart, Kind::Form, 0, vec![e])
    }

    pub fn function_jets(comps: JetField) -> Result<TensorField> {
        TensorField::from_jets(Kind::Form, 0, comps)
    }

    pub fn zero(chart: Arc<Chart>, kind: Kind, degree: usize) -> Result<TensorField> {
        let n = binomial(chart.dim(), degree);
        TensorField::from_jets(kind, degree, JetField::constant(chart, vec![0.0; n]))
    }

    /// Coordinate vector field `∂_i`.
    pub fn coordinate_vector(chart: Arc<Chart>, i: usize) -> Result<TensorField> {
        let mut v = vec![0.0; chart.dim()];
        v[i] = 1.0;
        TensorField::from_jets(Kind::Multivector, 1, JetField::constant(chart, v))
    }

    /// Coordinate differential `dx^i`.
    pub fn coordinate_form(chart: Arc<Chart>, i: usize) -> Result<TensorField> {
        let mut v = vec![0.0; chart.dim()];
        v[i] = 1.0;
        TensorField::from_jets(Kind::Form, 1, JetField::constant(chart, v))
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.comps.chart()
    }

    pub fn dim(&self) -> usize {
        self.chart().dim()
    }

    pub fn comps(&self) -> &JetField {
        &self.comps
    }

    pub fn combos(&self) -> Arc<Combos> {
        Combos::get(self.dim(), self.degree)
    }

    pub fn jets(&self, p: &[f64], order: usize) -> Result<Vec<Taylor>> {
        self.comps.jets(p, order)
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.comps.values(p)
    }

    /// Component for an index tuple in any order (antisymmetric extension).
    pub fn component(&self, p: &[f64], idx: &[usize]) -> Result<f64> {
        match sort_tuple(idx) {
            None => Ok(0.0),
            Some((m, s)) => {
                let i = self.combos().index(m).ok_or_else(|| Error::DegreeMismatch(format!("{idx:?}")))?;
                Ok(s * self.eval(p)?[i])
            }
        }
    }

    pub fn max_abs(&self, p: &[f64]) -> Result<f64> {
        Ok(self.eval(p)?.iter().fold(0.0, |m, x| m.max(x.abs())))
    }

    fn check_like(&self, o: &TensorField) -> Result<()> {
        same_chart(self.chart(), o.chart())?;
        if self.degree != o.degree || (self.kind != o.kind && self.degree > 0) {
            return Err(Error::DegreeMismatch(format!(
                "{:?} of degree {} vs {:?} of degree {}",
                self.kind, self.degree, o.kind, o.degree
            )));
        }
        Ok(())
    }

    fn zip(&self, o: &TensorField, f: fn(&Taylor, &Taylor) -> Taylor) -> Result<TensorField> {
        self.check_like(o)?;
        let (a, b) = (self.comps.clone(), o.comps.clone());
        let comps = JetField::new(self.chart().clone(), a.len(), move |p, k| {
            let (x, y) = (a.jets(p, k)?, b.jets(p, k)?);
            Ok(x.iter().zip(&y).map(|(u, v)| f(u, v)).collect())
        });
        Ok(TensorField { kind: self.kind, degree: self.degree, comps })
    }

    pub fn add(&self, o: &TensorField) -> Result<TensorField> {
        self.zip(o, |a, b| a.plus(b))
    }

    pub fn sub(&self, o: &TensorField) -> Result<TensorField> {
        self.zip(o, |a, b| a.minus(b))
    }

    pub fn scale(&self, c: f64) -> TensorField {
        let comps = self.comps.map(self.comps.len(), move |v| Ok(v.iter().map(|t| t.scale(c)).collect()));
        TensorField { kind: self.kind, degree: self.degree, comps }
    }

    pub fn neg(&self) -> TensorField {
        self.scale(-1.0)
    }

    /// Pointwise product with a function `f` (a degree-0 field).
    pub fn mul_fn(&self, f: &TensorField) -> Result<TensorField> {
        same_chart(self.chart(), f.chart())?;
        if f.degree != 0 {
            return Err(Error::DegreeMismatch("multiplier must be a function".into()));
        }
        let (a, g) = (self.comps.clone(), f.comps.clone());
        let comps = JetField::new(self.chart().clone(), a.len(), move |p, k| {
            let gv = g.jets(p, k)?;
            Ok(a.jets(p, k)?.iter().map(|t| t.times(&gv[0])).collect())
        });
        Ok(TensorField { kind: self.kind, degree: self.degree, comps })
    }

    /// Same components read as the other kind (used to pair vectors with covectors by index).
    pub fn with_kind(&self, kind: Kind) -> TensorField {
        TensorField { kind, degree: self.degree, comps: self.comps.clone() }
    }

    /// Re-expresses the field on a larger chart via a coordinate injection.
    pub fn embed(&self, big: Arc<Chart>, map: Vec<usize>) -> Result<TensorField> {
        let n = big.dim();
        let small = self.combos();
        let target = Combos::get(n, self.degree);
        let mut slot = Vec::with_capacity(small.len());
        for i in 0..small.len() {
            let idx: Vec<usize> = small.tuple(i).iter().map(|&j| map[j]).collect();
            let (m, s) = sort_tuple(&idx).ok_or_else(|| Error::InvalidChart("non-injective map".into()))?;
            slot.push((target.index(m).unwrap(), s));
        }
        let tl = target.len();
        let inner = self.comps.embed(big.clone(), map);
        let comps = JetField::new(big, tl, move |p, k| {
            let v = inner.jets(p, k)?;
            let mut out = vec![Taylor::constant(p.len(), k, 0.0); tl];
            for (t, &(j, s)) in v.iter().zip(&slot) {
                out[j] = t.scale(s);
            }
            Ok(out)
        });
        TensorField::from_jets(self.kind, self.degree, comps)
    }
}
