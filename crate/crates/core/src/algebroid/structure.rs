use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exprlang::{Expr, Scalar, Taylor};
use crate::geometry::combin::Combos;
use crate::geometry::{Chart, JetField};
use crate::jacobi::{verify_jacobi, JacobiStructure, VerifyOptions};

/// Anchor and structure functions of a Lie algebroid on the constant frame `e_a` of a trivial bundle.
///
/// `[e_a, e_b] = c_{ab}^k e_k` and `ρ(e_a) = ρ_a^i ∂_i`.
#[derive(Debug, Clone)]
pub struct AlgebroidStructure {
    chart: Arc<Chart>,
    rank: usize,
    anchor: JetField,
    structure: JetField,
}

/// Validator residuals at sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebroidResiduals {
    pub jacobi: f64,
    pub anchor: f64,
}

impl AlgebroidStructure {
    /// `anchor` holds `ρ_a^i` at `a·dim + i`; `structure` holds `c_{ab}^k` at `(a·rank + b)·rank + k`.
    /// Validates both identities at `opts.samples` points.
    pub fn new(chart: Arc<Chart>, rank: usize, anchor: JetField, structure: JetField, opts: VerifyOptions) -> Result<Self> {
        let a = Self::unchecked(chart, rank, anchor, structure)?;
        let r = a.residuals(opts)?;
        if r.jacobi > opts.tol || r.anchor > opts.tol {
            return Err(Error::InvalidAlgebroid(format!(
                "jacobi residual {:e}, anchor residual {:e}",
                r.jacobi, r.anchor
            )));
        }
        Ok(a)
    }

    pub(crate) fn unchecked(chart: Arc<Chart>, rank: usize, anchor: JetField, structure: JetField) -> Result<Self> {
        let n = chart.dim();
        if anchor.len() != rank * n {
            return Err(Error::DimensionMismatch { expected: rank * n, got: anchor.len() });
        }
        if structure.len() != rank * rank * rank {
            return Err(Error::DimensionMismatch { expected: rank * rank * rank, got: structure.len() });
        }
        crate::geometry::same_chart(&chart, anchor.chart())?;
        crate::geometry::same_chart(&chart, structure.chart())?;
        Ok(AlgebroidStructure { chart, rank, anchor, structure })
    }

    /// From expressions: the anchor matrix by rows and the entries `c_{ab}^k` for `a < b` (others zero).
    pub fn from_exprs(
        chart: Arc<Chart>,
        anchor: Vec<Vec<Expr>>,
        structure: &[(usize, usize, usize, Expr)],
        opts: VerifyOptions,
    ) -> Result<Self> {
        let rank = anchor.len();
        let n = chart.dim();
        let mut flat = Vec::with_capacity(rank * n);
        for row in anchor {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            flat.extend(row);
        }
        let zero = Expr::constant(chart.coords(), 0.0);
        let mut c = vec![zero; rank * rank * rank];
        for (a, b, k, e) in structure {
            let (a, b, k) = (*a, *b, *k);
            if a >= rank || b >= rank || k >= rank || a == b {
                return Err(Error::InvalidAlgebroid(format!("bad structure index ({a},{b},{k})")));
            }
            c[(a * rank + b) * rank + k] = e.clone();
            c[(b * rank + a) * rank + k] = e.neg();
        }
        let anchor = JetField::from_exprs(chart.clone(), flat)?;
        let structure = JetField::from_exprs(chart.clone(), c)?;
        Self::new(chart, rank, anchor, structure, opts)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn anchor_field(&self) -> &JetField {
        &self.anchor
    }

    pub fn structure_field(&self) -> &JetField {
        &self.structure
    }

    /// `ρ_a^i` as a `rank × dim` matrix.
    pub fn anchor_at(&self, p: &[f64]) -> Result<Vec<Vec<f64>>> {
        let v = self.anchor.values(p)?;
        Ok(v.chunks(self.dim()).map(|r| r.to_vec()).collect())
    }

    /// `c[a][b][k]`.
    pub fn structure_at(&self, p: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        let r = self.rank;
        let v = self.structure.values(p)?;
        Ok((0..r).map(|a| (0..r).map(|b| v[(a * r + b) * r..(a * r + b + 1) * r].to_vec()).collect()).collect())
    }

    /// `ρ(ξ)` at `p` for a fiber vector `ξ`.
    pub fn rho(&self, p: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        let v = self.anchor.values(p)?;
        let mut out = vec![0.0; n];
        for (a, x) in xi.iter().enumerate() {
            for i in 0..n {
                out[i] += x * v[a * n + i];
            }
        }
        Ok(out)
    }

    /// `c_{ab}^k ξ^a η^b`: the bracket of the constant extensions of `ξ, η`.
    pub fn bracket_at(&self, p: &[f64], xi: &[f64], eta: &[f64]) -> Result<Vec<f64>> {
        let r = self.rank;
        let v = self.structure.values(p)?;
        let mut out = vec![0.0; r];
        for a in 0..r {
            for b in 0..r {
                let w = xi[a] * eta[b];
                if w != 0.0 {
                    for k in 0..r {
                        out[k] += w * v[(a * r + b) * r + k];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Jacobi identity of the bracket on the frame and the anchor-morphism identity, as relative residuals.
    pub fn residuals_at(&self, p: &[f64]) -> Result<AlgebroidResiduals> {
        let (r, n) = (self.rank, self.dim());
        let rho = self.anchor.jets(p, 1)?;
        let c = self.structure.jets(p, 1)?;
        let cv = |a: usize, b: usize, k: usize| c[(a * r + b) * r + k].value();
        let cd = |a: usize, b: usize, k: usize, i: usize| c[(a * r + b) * r + k].d1(i);
        let rv = |a: usize, i: usize| rho[a * n + i].value();
        let rd = |a: usize, i: usize, j: usize| rho[a * n + i].d1(j);
        let mut jac: f64 = 0.0;
        for a in 0..r {
            for b in a + 1..r {
                for cc in b + 1..r {
                    for m in 0..r {
                        let (mut sum, mut mag) = (0.0, 0.0);
                        for (x, y, z) in [(a, b, cc), (b, cc, a), (cc, a, b)] {
                            for k in 0..r {
                                let t = cv(x, y, k) * cv(k, z, m);
                                sum += t;
                                mag += t.abs();
                            }
                            for i in 0..n {
                                let t = rv(z, i) * cd(x, y, m, i);
                                sum -= t;
                                mag += t.abs();
                            }
                        }
                        jac = jac.max(sum.abs() / mag.max(1.0));
                    }
                }
            }
        }
        let mut anc: f64 = 0.0;
        for a in 0..r {
            for b in a + 1..r {
                for i in 0..n {
                    let (mut sum, mut mag) = (0.0, 0.0);
                    for k in 0..r {
                        let t = cv(a, b, k) * rv(k, i);
                        sum += t;
                        mag += t.abs();
                    }
                    for j in 0..n {
                        let t = rv(a, j) * rd(b, i, j) - rv(b, j) * rd(a, i, j);
                        sum -= t;
                        mag += (rv(a, j) * rd(b, i, j)).abs() + (rv(b, j) * rd(a, i, j)).abs();
                    }
                    anc = anc.max(sum.abs() / mag.max(1.0));
                }
            }
        }
        Ok(AlgebroidResiduals { jacobi: jac, anchor: anc })
    }

    pub fn residuals(&self, opts: VerifyOptions) -> Result<AlgebroidResiduals> {
        let mut out = AlgebroidResiduals { jacobi: 0.0, anchor: 0.0 };
        for p in self.chart.sample(opts.samples.max(1), opts.seed) {
            let r = self.residuals_at(&p)?;
            out.jacobi = out.jacobi.max(r.jacobi);
            out.anchor = out.anchor.max(r.anchor);
        }
        Ok(out)
    }
}

/// Slot and sign of the bivector entry `(i, j)`.
fn pair_slot(combos: &Combos, i: usize, j: usize) -> Option<(usize, f64)> {
    if i == j {
        return None;
    }
    let idx = combos.index((1u32 << i) | (1u32 << j)).unwrap();
    Some((idx, if i < j { 1.0 } else { -1.0 }))
}

fn ensure_jacobi(j: &JacobiStructure, opts: VerifyOptions) -> Result<()> {
    if j.is_verified() {
        return Ok(());
    }
    let rep = verify_jacobi(j, opts);
    if rep.passed() {
        Ok(())
    } else {
        let res = rep.residuals.iter().map(|r| r.value).fold(0.0, f64::max);
        Err(Error::NotJacobi { residual: res })
    }
}

/// `T*P` of a Poisson structure on the frame `dx^i`: `ρ(dx^i) = Λ^{ij}∂_j`, `c_{ij}^k = ∂_kΛ^{ij}`.
pub fn cotangent_algebroid(p: &JacobiStructure, opts: VerifyOptions) -> Result<AlgebroidStructure> {
    let chart = p.chart().clone();
    let pts = chart.sample(opts.samples.max(1), opts.seed);
    let mut reeb: f64 = 0.0;
    for x in &pts {
        reeb = reeb.max(p.reeb().max_abs(x)?);
    }
    if reeb > opts.tol {
        return Err(Error::NotPoisson { residual: reeb });
    }
    ensure_jacobi(p, opts).map_err(|e| match e {
        Error::NotJacobi { residual } => Error::NotPoisson { residual },
        e => e,
    })?;
    let n = chart.dim();
    let combos = Combos::get(n, 2);
    let lam = p.lambda().clone();
    let (c1, l1) = (combos.clone(), lam.clone());
    let anchor = JetField::new(chart.clone(), n * n, move |x, k| {
        let v = l1.jets(x, k)?;
        let mut out = vec![Taylor::constant(n, k, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                if let Some((idx, s)) = pair_slot(&c1, i, j) {
                    out[i * n + j] = v[idx].scale(s);
                }
            }
        }
        Ok(out)
    });
    let structure = JetField::new(chart.clone(), n * n * n, move |x, k| {
        let v = lam.jets(x, k + 1)?;
        let mut out = vec![Taylor::constant(n, k, 0.0); n * n * n];
        for i in 0..n {
            for j in 0..n {
                if let Some((idx, s)) = pair_slot(&combos, i, j) {
                    for kk in 0..n {
                        out[(i * n + j) * n + kk] = v[idx].derivative(kk).scale(s);
                    }
                }
            }
        }
        Ok(out)
    });
    AlgebroidStructure::new(chart, n, anchor, structure, opts)
}

/// `T*M ⊕ ℝ` of a Jacobi structure on the frame `(dx^i, 0)`, `(0, 1)`.
///
/// `ρ(dx^i) = Λ^{ij}∂_j`, `ρ(0,1) = −R`;
/// `c_{ij}^k = ∂_kΛ^{ij} + R^iδ_j^k − R^jδ_i^k`, `c_{ij}^n = −Λ^{ij}`, `c_{in}^k = ∂_kR^i`.
pub fn jacobi_algebroid(j: &JacobiStructure, opts: VerifyOptions) -> Result<AlgebroidStructure> {
    ensure_jacobi(j, opts)?;
    let chart = j.chart().clone();
    let n = chart.dim();
    let r = n + 1;
    let combos = Combos::get(n, 2);
    let (lam, reeb) = (j.lambda().clone(), j.reeb().clone());
    let (c1, l1, r1) = (combos.clone(), lam.clone(), reeb.clone());
    let anchor = JetField::new(chart.clone(), r * n, move |x, k| {
        let v = l1.jets(x, k)?;
        let e = r1.jets(x, k)?;
        let mut out = vec![Taylor::constant(n, k, 0.0); r * n];
        for i in 0..n {
            for jj in 0..n {
                if let Some((idx, s)) = pair_slot(&c1, i, jj) {
                    out[i * n + jj] = v[idx].scale(s);
                }
            }
            out[n * n + i] = e[i].negate();
        }
        Ok(out)
    });
    let structure = JetField::new(chart.clone(), r * r * r, move |x, k| {
        let v = lam.jets(x, k + 1)?;
        let e = reeb.jets(x, k + 1)?;
        let mut out = vec![Taylor::constant(n, k, 0.0); r * r * r];
        let at = |a: usize, b: usize, c: usize| (a * r + b) * r + c;
        for i in 0..n {
            for jj in 0..n {
                if let Some((idx, s)) = pair_slot(&combos, i, jj) {
                    for kk in 0..n {
                        out[at(i, jj, kk)] = v[idx].derivative(kk).scale(s);
                    }
                    out[at(i, jj, n)] = v[idx].truncate(k).scale(-s);
                    out[at(i, jj, jj)] = out[at(i, jj, jj)].plus(&e[i].truncate(k));
                    out[at(i, jj, i)] = out[at(i, jj, i)].minus(&e[jj].truncate(k));
                }
            }
            for kk in 0..n {
                let d = e[i].derivative(kk);
                out[at(n, i, kk)] = d.negate();
                out[at(i, n, kk)] = d;
            }
        }
        Ok(out)
    });
    AlgebroidStructure::new(chart, r, anchor, structure, opts)
}

/// The tangent algebroid `TM` on the frame `∂_i`.
pub fn tangent_algebroid(chart: Arc<Chart>) -> Result<AlgebroidStructure> {
    let n = chart.dim();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = 1.0;
    }
    let anchor = JetField::constant(chart.clone(), a);
    let structure = JetField::constant(chart.clone(), vec![0.0; n * n * n]);
    AlgebroidStructure::unchecked(chart, n, anchor, structure)
}
