use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exprlang::Taylor;
use crate::geometry::{Chart, JetField, SmoothMap};
use crate::jacobi::VerifyOptions;
use crate::report::{DiagnosisReport, Provenance};

/// Identity components of a chart.
pub(crate) fn coordinates(chart: &Arc<Chart>) -> JetField {
    JetField::new(chart.clone(), chart.dim(), |p, k| Ok(Taylor::seed(p, k)))
}

/// Slot suffixes of the tuple charts: `g`, `g_2`, `g_3`, …
pub(crate) fn slot_suffix(i: usize) -> String {
    if i == 0 {
        String::new()
    } else {
        format!("_{}", i + 1)
    }
}

/// `p` copies of `chart`, the copies' coordinates suffixed `_2`, `_3`, …
pub fn tuple_chart(chart: &Chart, p: usize) -> Result<Arc<Chart>> {
    let mut coords = Vec::new();
    let mut bounds = Vec::new();
    for i in 0..p {
        coords.extend(chart.coords().iter().map(|c| format!("{c}{}", slot_suffix(i))));
        bounds.extend(chart.bounds().iter().copied());
    }
    Ok(Arc::new(Chart::new(&coords, bounds)?))
}

/// A Lie groupoid on coordinate charts. `g·h` is defined when `α(g) = β(h)`.
///
/// `composable` parametrizes the composable pairs: its chart starts with the arrow coordinates of
/// `g`, the remaining coordinates select `h` in the `β`-fibre over `α(g)`.
#[derive(Debug, Clone)]
pub struct ExplicitGroupoid {
    pub name: String,
    arrows: Arc<Chart>,
    base: Arc<Chart>,
    pair: Arc<Chart>,
    source: SmoothMap,
    target: SmoothMap,
    unit: SmoothMap,
    inverse: SmoothMap,
    multiply: SmoothMap,
    composable: SmoothMap,
}

/// Maximum coordinate distance between `α(g)` and `β(h)` accepted for composition.
pub const COMPOSABLE_TOL: f64 = 1e-9;

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub(crate) fn scale_of(v: &[f64]) -> f64 {
    v.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

impl ExplicitGroupoid {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        source: SmoothMap,
        target: SmoothMap,
        unit: SmoothMap,
        inverse: SmoothMap,
        multiply: SmoothMap,
        composable: SmoothMap,
    ) -> Result<ExplicitGroupoid> {
        let arrows = source.source().clone();
        let base = source.target().clone();
        let pair = tuple_chart(&arrows, 2)?;
        let same = |a: &Arc<Chart>, b: &Arc<Chart>, what: &str| {
            if a.as_ref() == b.as_ref() {
                Ok(())
            } else {
                Err(Error::ChartMismatch(format!("{what}: {:?} vs {:?}", a.coords(), b.coords())))
            }
        };
        same(target.source(), &arrows, "target source")?;
        same(target.target(), &base, "target image")?;
        same(unit.source(), &base, "unit source")?;
        same(unit.target(), &arrows, "unit image")?;
        same(inverse.source(), &arrows, "inverse source")?;
        same(inverse.target(), &arrows, "inverse image")?;
        same(multiply.source(), &pair, "multiplication source")?;
        same(multiply.target(), &arrows, "multiplication image")?;
        same(composable.target(), &pair, "composable image")?;
        if composable.source().dim() < arrows.dim() {
            return Err(Error::DimensionMismatch { expected: arrows.dim(), got: composable.source().dim() });
        }
        Ok(ExplicitGroupoid { name: name.into(), arrows, base, pair, source, target, unit, inverse, multiply, composable })
    }

    pub fn arrows(&self) -> &Arc<Chart> {
        &self.arrows
    }

    pub fn base(&self) -> &Arc<Chart> {
        &self.base
    }

    /// Chart of arbitrary pairs `(g, h)`, on which `multiply` is defined.
    pub fn pair_chart(&self) -> &Arc<Chart> {
        &self.pair
    }

    pub fn source(&self) -> &SmoothMap {
        &self.source
    }

    pub fn target(&self) -> &SmoothMap {
        &self.target
    }

    pub fn unit(&self) -> &SmoothMap {
        &self.unit
    }

    pub fn inverse(&self) -> &SmoothMap {
        &self.inverse
    }

    pub fn multiply(&self) -> &SmoothMap {
        &self.multiply
    }

    pub fn composable(&self) -> &SmoothMap {
        &self.composable
    }

    /// Same groupoid data with another multiplication, e.g. a seeded mutation.
    pub fn with_multiply(&self, multiply: SmoothMap) -> Result<ExplicitGroupoid> {
        ExplicitGroupoid::new(
            self.name.clone(),
            self.source.clone(),
            self.target.clone(),
            self.unit.clone(),
            self.inverse.clone(),
            multiply,
            self.composable.clone(),
        )
    }

    pub fn alpha(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.source.apply(g)
    }

    pub fn beta(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.target.apply(g)
    }

    pub fn identity(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.unit.apply(x)
    }

    pub fn inv(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.inverse.apply(g)
    }

    /// `g·h`, rejecting pairs with `α(g) ≠ β(h)`.
    pub fn mul(&self, g: &[f64], h: &[f64]) -> Result<Vec<f64>> {
        let (a, b) = (self.alpha(g)?, self.beta(h)?);
        let d = dist(&a, &b);
        if d > COMPOSABLE_TOL * scale_of(&a) {
            return Err(Error::NotComposable { distance: d });
        }
        let mut p = g.to_vec();
        p.extend_from_slice(h);
        self.multiply.apply(&p)
    }

    /// Second arrow selected by the composable parametrization at `(g, u)`.
    pub fn next_arrow(&self, g: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let mut p = g.to_vec();
        p.extend_from_slice(u);
        let gh = self.composable.apply(&p)?;
        Ok(gh[self.arrows.dim()..].to_vec())
    }

    /// Reproducible composable `p`-tuples: `g₁` and the fibre parameters are sampled on the
    /// composable chart, later arrows chained through the parametrization.
    pub fn sample_tuples(&self, p: usize, n: usize, seed: u64) -> Result<Vec<Vec<Vec<f64>>>> {
        let na = self.arrows.dim();
        let c = self.composable.source().clone();
        let extra = c.dim() - na;
        let mut bx = c.sampling_box();
        for _ in 2..p.max(2) {
            bx.extend_from_slice(&c.sampling_box()[na..]);
        }
        let pts = crate::geometry::halton_box(&bx, n, seed);
        pts.into_iter()
            .map(|pt| {
                let mut tuple = vec![pt[..na].to_vec()];
                for i in 1..p {
                    let u = &pt[na + (i - 1) * extra..na + i * extra];
                    let next = self.next_arrow(&tuple[i - 1], u)?;
                    tuple.push(next);
                }
                Ok(tuple)
            })
            .collect()
    }

    /// Associativity, unit, inverse and source/target compatibility at sampled tuples, plus the
    /// submersion rank of `α` and `β`.
    pub fn check_axioms(&self, opts: VerifyOptions) -> Result<DiagnosisReport> {
        let mut rep = DiagnosisReport::new("groupoid-axioms", Provenance::new(opts.seed, opts.tol, opts.samples));
        let (mut assoc, mut units, mut inverses, mut st, mut rank) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
        for t in self.sample_tuples(3, opts.samples, opts.seed)? {
            let (g, h, k) = (&t[0], &t[1], &t[2]);
            let sc = scale_of(g).max(scale_of(h)).max(scale_of(k));
            let gh = self.mul(g, h)?;
            let hk = self.mul(h, k)?;
            // a broken product can leave (gh, k) or (g, hk) non-composable; the gap is the residual
            match (self.mul(&gh, k), self.mul(g, &hk)) {
                (Ok(l), Ok(r)) => assoc = assoc.max(dist(&l, &r) / sc),
                (Err(Error::NotComposable { distance }), _) | (_, Err(Error::NotComposable { distance })) => {
                    assoc = assoc.max(distance / sc)
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
            st = st.max(dist(&self.alpha(&gh)?, &self.alpha(h)?) / sc).max(dist(&self.beta(&gh)?, &self.beta(g)?) / sc);
            let (a, b) = (self.alpha(g)?, self.beta(g)?);
            let (ua, ub) = (self.identity(&a)?, self.identity(&b)?);
            units = units.max(dist(&self.mul(&ub, g)?, g) / sc).max(dist(&self.mul(g, &ua)?, g) / sc);
            units = units.max(dist(&self.alpha(&ua)?, &a) / sc).max(dist(&self.beta(&ua)?, &a) / sc);
            let gi = self.inv(g)?;
            inverses = inverses.max(dist(&self.mul(g, &gi)?, &ub) / sc).max(dist(&self.mul(&gi, g)?, &ua) / sc);
            for m in [&self.source, &self.target] {
                rank = rank.min(min_singular_proxy(&m.jacobian(g)?));
            }
        }
        rep.residual("associativity", assoc, opts.tol);
        rep.residual("units", units, opts.tol);
        rep.residual("inverses", inverses, opts.tol);
        rep.residual("source_target", st, opts.tol);
        rep.residual("submersion_deficit", if rank > 1e-10 { 0.0 } else { 1.0 }, 0.5);
        rep.note(format!("smallest Gram determinant of dα, dβ: {rank:e}"));
        rep.settle_by_residuals();
        Ok(rep)
    }
}

/// `det(J Jᵀ)`, positive iff `J` has full row rank.
fn min_singular_proxy(j: &[Vec<f64>]) -> f64 {
    let n = j.len();
    let gram: Vec<Vec<f64>> =
        (0..n).map(|a| (0..n).map(|b| j[a].iter().zip(&j[b]).map(|(x, y)| x * y).sum()).collect()).collect();
    crate::numerics::det(&gram)
}

/// Pair groupoid `M × M`; the arrow `(x, y)` goes from `y` to `x`, so `(x, y)(y, z) = (x, z)`.
/// Source-point coordinates carry the suffix `_s`.
pub fn pair_groupoid(m: Arc<Chart>) -> Result<ExplicitGroupoid> {
    let n = m.dim();
    let arrows = Arc::new(m.product(&m, "_s")?);
    let id: Vec<usize> = (0..n).collect();
    let src: Vec<usize> = (n..2 * n).collect();
    let source = SmoothMap::projection(arrows.clone(), m.clone(), &src)?;
    let target = SmoothMap::projection(arrows.clone(), m.clone(), &id)?;
    let unit = SmoothMap::projection(m.clone(), arrows.clone(), &[id.clone(), id.clone()].concat())?;
    let inverse = SmoothMap::projection(arrows.clone(), arrows.clone(), &[src.clone(), id.clone()].concat())?;
    let pair = tuple_chart(&arrows, 2)?;
    let multiply = SmoothMap::projection(pair.clone(), arrows.clone(), &[id.clone(), (3 * n..4 * n).collect()].concat())?;
    // (g, z) ↦ (g, (α(g), z))
    let comp = Arc::new(arrows.product(&m, "_n")?);
    let composable = SmoothMap::projection(comp, pair, &[(0..2 * n).collect::<Vec<_>>(), src, (2 * n..3 * n).collect()].concat())?;
    ExplicitGroupoid::new(format!("pair({})", m.coords().join(",")), source, target, unit, inverse, multiply, composable)
}
