use std::sync::Arc;

use super::structure::AlgebroidStructure;
use crate::error::{Error, Result};
use crate::exprlang::{Expr, Scalar, Taylor};
use crate::geometry::combin::{binomial, sort_tuple, Combos};
use crate::geometry::{Chart, JetField, TensorField};
use crate::jacobi::{JacobiStructure, VerifyOptions};
use crate::report::{DiagnosisReport, Provenance};

/// A section of `Λ^p A*`, stored by its values on increasing tuples of frame indices.
#[derive(Debug, Clone)]
pub struct AlgebroidCochain {
    rank: usize,
    degree: usize,
    comps: JetField,
}

impl AlgebroidCochain {
    pub fn from_jets(rank: usize, degree: usize, comps: JetField) -> Result<Self> {
        if degree > rank {
            return Err(Error::DegreeOverflow(format!("cochain degree {degree} above rank {rank}")));
        }
        if comps.len() != binomial(rank, degree) {
            return Err(Error::DimensionMismatch { expected: binomial(rank, degree), got: comps.len() });
        }
        Ok(AlgebroidCochain { rank, degree, comps })
    }

    pub fn from_exprs(chart: Arc<Chart>, rank: usize, degree: usize, exprs: Vec<Expr>) -> Result<Self> {
        Self::from_jets(rank, degree, JetField::from_exprs(chart, exprs)?)
    }

    pub fn zero(chart: Arc<Chart>, rank: usize, degree: usize) -> Result<Self> {
        Self::from_jets(rank, degree, JetField::constant(chart, vec![0.0; binomial(rank, degree)]))
    }

    pub fn function(chart: Arc<Chart>, rank: usize, f: Expr) -> Result<Self> {
        Self::from_exprs(chart, rank, 0, vec![f])
    }

    /// The components of a multivector field read as a cochain of `T*M` on the frame `dx^i`.
    pub fn from_multivector(t: &TensorField) -> Result<Self> {
        Self::from_jets(t.dim(), t.degree(), t.comps().clone())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.comps.chart()
    }

    pub fn comps(&self) -> &JetField {
        &self.comps
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.comps.values(p)
    }

    /// Value on `e_{idx_1}, …, e_{idx_p}` in any order.
    pub fn value(&self, p: &[f64], idx: &[usize]) -> Result<f64> {
        if idx.len() != self.degree {
            return Err(Error::DimensionMismatch { expected: self.degree, got: idx.len() });
        }
        match sort_tuple(idx) {
            None => Ok(0.0),
            Some((m, s)) => Ok(s * self.eval(p)?[Combos::get(self.rank, self.degree).index(m).unwrap()]),
        }
    }

    pub fn max_abs(&self, p: &[f64]) -> Result<f64> {
        Ok(self.eval(p)?.iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    pub fn sub(&self, o: &AlgebroidCochain) -> Result<AlgebroidCochain> {
        if o.rank != self.rank || o.degree != self.degree {
            return Err(Error::DegreeMismatch("cochains of different shape".into()));
        }
        crate::geometry::same_chart(self.chart(), o.chart())?;
        let (a, b) = (self.comps.clone(), o.comps.clone());
        let comps = JetField::new(self.chart().clone(), self.comps.len(), move |p, k| {
            Ok(a.jets(p, k)?.iter().zip(b.jets(p, k)?).map(|(x, y)| x.minus(&y)).collect())
        });
        Self::from_jets(self.rank, self.degree, comps)
    }

    pub fn scale(&self, c: f64) -> AlgebroidCochain {
        let comps = self.comps.map(self.comps.len(), move |v| Ok(v.iter().map(|t| t.scale(c)).collect()));
        AlgebroidCochain { rank: self.rank, degree: self.degree, comps }
    }
}

fn check_shape(a: &AlgebroidStructure, c: &AlgebroidCochain) -> Result<()> {
    crate::geometry::same_chart(a.chart(), c.chart())?;
    if c.rank != a.rank() {
        return Err(Error::DimensionMismatch { expected: a.rank(), got: c.rank });
    }
    Ok(())
}

/// Slot and sign of `c(e_idx)` among the increasing tuples.
fn slot(combos: &Combos, idx: &[usize]) -> Option<(usize, f64)> {
    sort_tuple(idx).map(|(m, s)| (combos.index(m).unwrap(), s))
}

/// `d_A c(X_1..X_{p+1}) = Σ_{i<j} (−1)^{i+j−1} c([X_i,X_j], …) + Σ_i (−1)^i ρ(X_i)(c(…X̂_i…))`
/// on the constant frame.
pub fn algebroid_differential(a: &AlgebroidStructure, c: &AlgebroidCochain) -> Result<AlgebroidCochain> {
    check_shape(a, c)?;
    let (r, p) = (a.rank(), c.degree);
    if p >= r {
        return Err(Error::DegreeOverflow(format!("differential of a degree {p} cochain at rank {r}")));
    }
    let n = a.dim();
    let src = Combos::get(r, p);
    let dst = Combos::get(r, p + 1);
    let (alg, cc) = (a.clone(), c.comps.clone());
    let len = dst.len();
    let comps = JetField::new(a.chart().clone(), len, move |x, k| {
        let cj = cc.jets(x, k + 1)?;
        let cl: Vec<Taylor> = cj.iter().map(|t| t.truncate(k)).collect();
        let st = alg.structure_field().jets(x, k)?;
        let an = alg.anchor_field().jets(x, k)?;
        let mut out = Vec::with_capacity(len);
        for o in 0..len {
            let t = dst.tuple(o);
            let mut acc = Taylor::constant(n, k, 0.0);
            for i in 0..=p {
                for j in i + 1..=p {
                    let sign = if (i + j) % 2 == 0 { -1.0 } else { 1.0 };
                    let rest: Vec<usize> = (0..=p).filter(|&q| q != i && q != j).map(|q| t[q]).collect();
                    for kk in 0..r {
                        let cijk = &st[(t[i] * r + t[j]) * r + kk];
                        let mut idx = vec![kk];
                        idx.extend(&rest);
                        if let Some((sl, s)) = slot(&src, &idx) {
                            acc = acc.plus(&cijk.times(&cl[sl]).scale(sign * s));
                        }
                    }
                }
                let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
                let rest: Vec<usize> = (0..=p).filter(|&q| q != i).map(|q| t[q]).collect();
                let (sl, s) = slot(&src, &rest).unwrap();
                for l in 0..n {
                    let term = an[t[i] * n + l].times(&cj[sl].derivative(l));
                    acc = acc.plus(&term.scale(sign * s));
                }
            }
            out.push(acc);
        }
        Ok(out)
    });
    AlgebroidCochain::from_jets(r, p + 1, comps)
}

/// Max over frame pairs and samples of `|c([e_a,e_b]) − ρ_a(c(e_b)) + ρ_b(c(e_a))|`.
pub fn check_cocycle(a: &AlgebroidStructure, rc: &AlgebroidCochain, opts: VerifyOptions) -> DiagnosisReport {
    let mut rep = DiagnosisReport::new("check-cocycle", Provenance::new(opts.seed, opts.tol, opts.samples));
    let res = (|| -> Result<f64> {
        check_shape(a, rc)?;
        if rc.degree != 1 {
            return Err(Error::DegreeMismatch(format!("cocycle check needs degree 1, got {}", rc.degree)));
        }
        cocycle_residual(a, rc, &a.chart().sample(opts.samples.max(1), opts.seed))
    })();
    match res {
        Ok(v) => {
            rep.residual("cocycle", v, opts.tol);
        }
        Err(e) => {
            rep.residual("cocycle", f64::NAN, opts.tol);
            rep.note(e.to_string());
        }
    }
    rep.settle_by_residuals();
    rep
}

pub(crate) fn cocycle_residual(a: &AlgebroidStructure, rc: &AlgebroidCochain, pts: &[Vec<f64>]) -> Result<f64> {
    let (r, n) = (a.rank(), a.dim());
    let mut worst: f64 = 0.0;
    for p in pts {
        let c = a.structure_field().values(p)?;
        let rho = a.anchor_field().values(p)?;
        let v = rc.comps.jets(p, 1)?;
        for i in 0..r {
            for j in i + 1..r {
                let mut s = 0.0;
                for k in 0..r {
                    s += c[(i * r + j) * r + k] * v[k].value();
                }
                for l in 0..n {
                    s -= rho[i * n + l] * v[j].d1(l) - rho[j * n + l] * v[i].d1(l);
                }
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

/// `A ×_R ℝ` over `M × ℝ_s`: anchor `ρ(α) − R(α)∂/∂s`, same structure functions on the constant frame.
pub fn action_extension(a: &AlgebroidStructure, rc: &AlgebroidCochain, opts: VerifyOptions) -> Result<AlgebroidStructure> {
    check_shape(a, rc)?;
    if rc.degree != 1 {
        return Err(Error::DegreeMismatch(format!("action needs a degree 1 cochain, got {}", rc.degree)));
    }
    let pts = a.chart().sample(opts.samples.max(1), opts.seed);
    let res = cocycle_residual(a, rc, &pts)?;
    if res > opts.tol {
        return Err(Error::NotCocycle { residual: res });
    }
    let (r, n) = (a.rank(), a.dim());
    let big = Arc::new(a.chart().extend("s", (f64::NEG_INFINITY, f64::INFINITY))?);
    let map: Vec<usize> = (0..n).collect();
    let anchor_small = a.anchor_field().concat(&rc.comps)?;
    let inner = anchor_small.embed(big.clone(), map.clone());
    let anchor = JetField::new(big.clone(), r * (n + 1), move |x, k| {
        let v = inner.jets(x, k)?;
        let mut out = Vec::with_capacity(r * (n + 1));
        for q in 0..r {
            out.extend(v[q * n..(q + 1) * n].iter().cloned());
            out.push(v[r * n + q].negate());
        }
        Ok(out)
    });
    let structure = a.structure_field().embed(big.clone(), map);
    AlgebroidStructure::new(big, r, anchor, structure, opts)
}

/// The cocycle `(ω, λ) ↦ −ω(R)` of `jacobi_algebroid(J)`.
///
/// With this sign, `action_extension` of the Jacobi algebroid is isomorphic to the cotangent
/// algebroid of `poissonize(J)` through `(v, s) ↦ (e^{−s}v, s)`.
pub fn reeb_cocycle(j: &JacobiStructure) -> Result<AlgebroidCochain> {
    let n = j.chart().dim();
    let reeb = j.reeb().comps().clone();
    let comps = JetField::new(j.chart().clone(), n + 1, move |x, k| {
        let mut v: Vec<Taylor> = reeb.jets(x, k)?.iter().map(|t| t.negate()).collect();
        v.push(Taylor::constant(x.len(), k, 0.0));
        Ok(v)
    });
    AlgebroidCochain::from_jets(n + 1, 1, comps)
}
