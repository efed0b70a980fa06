use std::sync::Arc;

use super::groupoid::{coordinates, tuple_chart, ExplicitGroupoid};
use crate::error::{Error, Result};
use crate::exprlang::Scalar;
use crate::geometry::{Chart, JetField, SmoothMap, TensorField};
use crate::jacobi::VerifyOptions;

/// A differentiable `p`-cochain: a function on the base (`p = 0`) or on the chart of
/// `p`-tuples of arrows, evaluated on composable tuples.
#[derive(Debug, Clone)]
pub struct GroupoidCochain {
    degree: usize,
    value: TensorField,
}

fn chart_for(g: &ExplicitGroupoid, p: usize) -> Result<Arc<Chart>> {
    if p == 0 {
        Ok(g.base().clone())
    } else {
        tuple_chart(g.arrows(), p)
    }
}

impl GroupoidCochain {
    pub fn new(g: &ExplicitGroupoid, degree: usize, value: TensorField) -> Result<GroupoidCochain> {
        let c = chart_for(g, degree)?;
        if value.degree() != 0 {
            return Err(Error::DegreeMismatch("cochain values are functions".into()));
        }
        if value.chart().as_ref() != c.as_ref() {
            return Err(Error::ChartMismatch(format!("degree-{degree} cochain must live on {:?}", c.coords())));
        }
        Ok(GroupoidCochain { degree, value })
    }

    /// Expression in the tuple-chart coordinates (slot `k ≥ 2` names carry the suffix `_k`).
    pub fn parse(g: &ExplicitGroupoid, degree: usize, src: &str) -> Result<GroupoidCochain> {
        let c = chart_for(g, degree)?;
        let e = c.parse(src)?;
        GroupoidCochain::new(g, degree, TensorField::function(c, e)?)
    }

    pub fn zero(g: &ExplicitGroupoid, degree: usize) -> Result<GroupoidCochain> {
        GroupoidCochain::parse(g, degree, "0")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn value(&self) -> &TensorField {
        &self.value
    }

    /// Value on a tuple of arrows (a base point for degree 0).
    pub fn eval(&self, tuple: &[Vec<f64>]) -> Result<f64> {
        Ok(self.value.eval(&tuple.concat())?[0])
    }

    /// Worst `|c|` on tuples containing a unit, at sampled composable `(p−1)`-tuples.
    pub fn normalization_defect(&self, g: &ExplicitGroupoid, opts: VerifyOptions) -> Result<f64> {
        let p = self.degree;
        if p == 0 {
            return Ok(0.0);
        }
        let mut worst = 0.0f64;
        let shorter: Vec<Vec<Vec<f64>>> = if p == 1 {
            g.base().sample(opts.samples, opts.seed).into_iter().map(|x| vec![x]).collect()
        } else {
            g.sample_tuples(p - 1, opts.samples, opts.seed)?
        };
        for t in shorter {
            for pos in 0..p {
                let tuple = if p == 1 {
                    vec![g.identity(&t[0])?]
                } else {
                    let x = if pos == 0 { g.beta(&t[0])? } else { g.alpha(&t[pos - 1])? };
                    let mut v = t.clone();
                    v.insert(pos, g.identity(&x)?);
                    v
                };
                worst = worst.max(self.eval(&tuple)?.abs());
            }
        }
        Ok(worst)
    }

    pub fn is_normalized(&self, g: &ExplicitGroupoid, opts: VerifyOptions) -> Result<bool> {
        Ok(self.normalization_defect(g, opts)? <= opts.tol)
    }

    /// Worst `|c|` on sampled composable tuples.
    pub fn max_on_composable(&self, g: &ExplicitGroupoid, opts: VerifyOptions) -> Result<f64> {
        let tuples: Vec<Vec<Vec<f64>>> = if self.degree == 0 {
            g.base().sample(opts.samples, opts.seed).into_iter().map(|x| vec![x]).collect()
        } else {
            g.sample_tuples(self.degree, opts.samples, opts.seed)?
        };
        let mut worst = 0.0f64;
        for t in tuples {
            worst = worst.max(self.eval(&t)?.abs());
        }
        Ok(worst)
    }
}

/// Face maps from `(p+1)`-tuples to `p`-tuples: drop the first slot, multiply neighbours
/// `i−1, i`, drop the last slot. For `p = 0` the faces are `α` and `β`.
fn faces(g: &ExplicitGroupoid, p: usize) -> Result<Vec<SmoothMap>> {
    if p == 0 {
        return Ok(vec![g.source().clone(), g.target().clone()]);
    }
    let na = g.arrows().dim();
    let big = tuple_chart(g.arrows(), p + 1)?;
    let small = tuple_chart(g.arrows(), p)?;
    let id = coordinates(&big);
    let slot = |i: usize| id.select((i * na..(i + 1) * na).collect());
    let product = |i: usize| -> Result<JetField> {
        let pair = SmoothMap::from_jets(big.clone(), g.pair_chart().clone(), slot(i - 1).concat(&slot(i))?)?;
        Ok(pair.then(g.multiply())?.comps().clone())
    };
    let mut out = Vec::new();
    for i in 0..=p + 1 {
        let mut parts: Vec<JetField> = Vec::new();
        for s in 0..=p {
            if i == 0 {
                if s >= 1 {
                    parts.push(slot(s));
                }
            } else if i == p + 1 {
                if s < p {
                    parts.push(slot(s));
                }
            } else if s + 1 == i {
                parts.push(product(i)?);
            } else if s + 1 != i + 1 {
                parts.push(slot(s));
            }
        }
        let mut comps = parts[0].clone();
        for q in &parts[1..] {
            comps = comps.concat(q)?;
        }
        out.push(SmoothMap::from_jets(big.clone(), small.clone(), comps)?);
    }
    Ok(out)
}

/// `(dc)(g₁, …, g_{p+1}) = c(g₂, …) + Σᵢ (−1)^i c(…, gᵢg_{i+1}, …) + (−1)^{p+1} c(g₁, …, g_p)`,
/// and `(df)(g) = f(α(g)) − f(β(g))` in degree 0.
pub fn groupoid_cochain_differential(g: &ExplicitGroupoid, c: &GroupoidCochain) -> Result<GroupoidCochain> {
    let p = c.degree;
    let fs = faces(g, p)?;
    let mut total: Option<JetField> = None;
    for (i, f) in fs.iter().enumerate() {
        let term = f.pullback_functions(c.value.comps())?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        total = Some(match total {
            None => term.map(1, move |v| Ok(vec![v[0].scale(sign)])),
            Some(acc) => acc.concat(&term)?.map(1, move |v| Ok(vec![v[0].plus(&v[1].scale(sign))])),
        });
    }
    let value = TensorField::function_jets(total.expect("at least two faces"))?;
    GroupoidCochain::new(g, p + 1, value)
}

/// `G ⋉_c ℝ` with `(g₁, λ₁)(g₂, λ₂) = (g₁g₂, λ₁ + λ₂ + c(g₁, g₂))` for a normalized 2-cocycle `c`.
pub fn twisted_product(g: &ExplicitGroupoid, c: &GroupoidCochain, opts: VerifyOptions) -> Result<ExplicitGroupoid> {
    if c.degree != 2 {
        return Err(Error::DegreeMismatch(format!("twisting needs a 2-cochain, got degree {}", c.degree)));
    }
    let nd = c.normalization_defect(g, opts)?;
    if nd > opts.tol {
        return Err(Error::NotNormalized { residual: nd });
    }
    let dc = groupoid_cochain_differential(g, c)?.max_on_composable(g, opts)?;
    if dc > opts.tol {
        return Err(Error::NotCocycle { residual: dc });
    }
    let na = g.arrows().dim();
    let line = (f64::NEG_INFINITY, f64::INFINITY);
    let arrows = Arc::new(g.arrows().extend("lambda", line)?);
    let base = g.base().clone();
    let id_a: Vec<usize> = (0..na).collect();
    let lam = |ch: &Arc<Chart>, i: usize| coordinates(ch).select(vec![i]);
    let source = SmoothMap::from_jets(arrows.clone(), base.clone(), g.source().comps().embed(arrows.clone(), id_a.clone()))?;
    let target = SmoothMap::from_jets(arrows.clone(), base.clone(), g.target().comps().embed(arrows.clone(), id_a.clone()))?;
    let zero = JetField::constant(base.clone(), vec![0.0]);
    let unit = SmoothMap::from_jets(base.clone(), arrows.clone(), g.unit().comps().concat(&zero)?)?;
    // inverse (g, λ) ↦ (g⁻¹, −λ − c(g, g⁻¹))
    let gi = g.inverse().comps().embed(arrows.clone(), id_a.clone());
    let gg = SmoothMap::from_jets(arrows.clone(), g.pair_chart().clone(), coordinates(&arrows).select(id_a.clone()).concat(&gi)?)?;
    let cgg = gg.pullback_functions(c.value.comps())?;
    let inv_l = lam(&arrows, na).concat(&cgg)?.map(1, |v| Ok(vec![v[0].plus(&v[1]).negate()]));
    let inverse = SmoothMap::from_jets(arrows.clone(), arrows.clone(), gi.concat(&inv_l)?)?;
    let pair = tuple_chart(&arrows, 2)?;
    let pm: Vec<usize> = (0..na).chain(na + 1..2 * na + 1).collect();
    let m = g.multiply().comps().embed(pair.clone(), pm.clone());
    let cv = c.value.comps().embed(pair.clone(), pm);
    let ml = lam(&pair, na).concat(&lam(&pair, 2 * na + 1))?.concat(&cv)?.map(1, |v| Ok(vec![v[0].plus(&v[1]).plus(&v[2])]));
    let multiply = SmoothMap::from_jets(pair.clone(), arrows.clone(), m.concat(&ml)?)?;
    let c0 = g.composable().source().clone();
    let comp = Arc::new(c0.extend("lambda", line)?.extend("lambda", line)?);
    let gh = g.composable().comps().embed(comp.clone(), (0..c0.dim()).collect());
    let comps = gh
        .select(id_a)
        .concat(&lam(&comp, c0.dim()))?
        .concat(&gh.select((na..2 * na).collect()))?
        .concat(&lam(&comp, c0.dim() + 1))?;
    let composable = SmoothMap::from_jets(comp, pair, comps)?;
    ExplicitGroupoid::new(format!("{} x_c R", g.name), source, target, unit, inverse, multiply, composable)
}
