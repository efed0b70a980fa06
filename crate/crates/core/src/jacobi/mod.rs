//! Jacobi, Poisson and contact structures on a chart.

pub mod corpus;
pub(crate) mod contact;
mod poissonize;

use std::sync::Arc;

pub use contact::{contact_matrix_det, contact_to_jacobi, symplectify_form};
pub use poissonize::{depoissonize, poissonize, HomogeneousPoisson};

use crate::error::{Error, Result};
use crate::exprlang::{random_polynomial, Expr, Scalar, Taylor};
use crate::geometry::combin::Combos;
use crate::geometry::{interior, schouten, wedge, Chart, JetField, Kind, TensorField};
use crate::report::{num, Answer, DiagnosisReport, Provenance, Verdict};

/// Sampling and tolerance settings shared by the verifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 200, tol: 1e-8, seed: 0 }
    }
}

/// A bivector `Λ` and a vector field `R` on one chart. Poisson when `R ≡ 0`.
#[derive(Debug, Clone)]
pub struct JacobiStructure {
    lambda: TensorField,
    reeb: TensorField,
    verified: bool,
}

impl JacobiStructure {
    pub fn new(lambda: TensorField, reeb: TensorField) -> Result<JacobiStructure> {
        crate::geometry::same_chart(lambda.chart(), reeb.chart())?;
        if lambda.kind() != Kind::Multivector || lambda.degree() != 2 {
            return Err(Error::DegreeMismatch("Λ must be a bivector".into()));
        }
        if reeb.kind() != Kind::Multivector || reeb.degree() != 1 {
            return Err(Error::DegreeMismatch("R must be a vector field".into()));
        }
        Ok(JacobiStructure { lambda, reeb, verified: false })
    }

    pub fn poisson(lambda: TensorField) -> Result<JacobiStructure> {
        let reeb = TensorField::zero(lambda.chart().clone(), Kind::Multivector, 1)?;
        JacobiStructure::new(lambda, reeb)
    }

    /// Builds from source strings: sparse `Λ` entries and dense `R` components.
    pub fn parse(chart: Arc<Chart>, lambda: &[(&[usize], &str)], reeb: &[&str]) -> Result<JacobiStructure> {
        let l = TensorField::parse_sparse(chart.clone(), Kind::Multivector, 2, lambda)?;
        let r = if reeb.is_empty() {
            TensorField::zero(chart, Kind::Multivector, 1)?
        } else {
            let e = reeb.iter().map(|s| chart.parse(s)).collect::<Result<Vec<_>>>()?;
            TensorField::from_exprs(chart, Kind::Multivector, 1, e)?
        };
        JacobiStructure::new(l, r)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.lambda.chart()
    }

    pub fn lambda(&self) -> &TensorField {
        &self.lambda
    }

    pub fn reeb(&self) -> &TensorField {
        &self.reeb
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Runs [`verify_jacobi`] and sets the verified flag on success.
    pub fn verify(&mut self, opts: VerifyOptions) -> DiagnosisReport {
        let r = verify_jacobi(self, opts);
        self.verified = r.passed();
        r
    }

    /// `Λ^♯ α = α_i Λ^{ij} ∂_j`.
    pub fn sharp(&self, alpha: &TensorField) -> Result<TensorField> {
        interior(alpha, &self.lambda)
    }

    /// The bracket `{f, g}` of two functions as a lazy field.
    pub fn bracket_fields(&self, f: &TensorField, g: &TensorField) -> Result<TensorField> {
        for h in [f, g] {
            crate::geometry::same_chart(self.chart(), h.chart())?;
            if h.degree() != 0 {
                return Err(Error::DegreeMismatch("bracket of non-functions".into()));
            }
        }
        let (l, r, f, g) = (self.lambda.comps().clone(), self.reeb.comps().clone(), f.comps().clone(), g.comps().clone());
        let comps = JetField::new(self.chart().clone(), 1, move |p, k| {
            let (lj, rj) = (l.jets(p, k)?, r.jets(p, k)?);
            let (fj, gj) = (f.jets(p, k + 1)?, g.jets(p, k + 1)?);
            Ok(vec![bracket_jets(&lj, &rj, &fj[0], &gj[0], k)])
        });
        TensorField::function_jets(comps)
    }
}

/// `{f,g} = Λ(df,dg) + R(f) g − f R(g)` at order `k`; `f`, `g` need order `k + 1`.
pub(crate) fn bracket_jets(lam: &[Taylor], reeb: &[Taylor], f: &Taylor, g: &Taylor, k: usize) -> Taylor {
    let n = reeb.len();
    let df: Vec<Taylor> = (0..n).map(|i| f.derivative(i).truncate(k)).collect();
    let dg: Vec<Taylor> = (0..n).map(|i| g.derivative(i).truncate(k)).collect();
    let c = Combos::get(n, 2);
    let mut out = Taylor::constant(f.nvars(), k, 0.0);
    for (idx, &m) in c.masks().iter().enumerate() {
        let l = lam[idx].truncate(k);
        if l.max_abs() == 0.0 {
            continue;
        }
        let i = m.trailing_zeros() as usize;
        let j = 31 - m.leading_zeros() as usize;
        let t = df[i].times(&dg[j]).minus(&df[j].times(&dg[i]));
        out = out.plus(&l.times(&t));
    }
    let (f0, g0) = (f.truncate(k), g.truncate(k));
    let mut rf = Taylor::constant(f.nvars(), k, 0.0);
    let mut rg = rf.clone();
    for i in 0..n {
        let ri = reeb[i].truncate(k);
        rf = rf.plus(&ri.times(&df[i]));
        rg = rg.plus(&ri.times(&dg[i]));
    }
    out.plus(&rf.times(&g0)).minus(&f0.times(&rg))
}

/// The bracket `{f, g}` of two expressions as a lazy function on the chart.
pub fn local_bracket(j: &JacobiStructure, f: &Expr, g: &Expr) -> Result<TensorField> {
    let c = j.chart().clone();
    let f = TensorField::function(c.clone(), f.clone())?;
    let g = TensorField::function(c, g.clone())?;
    j.bracket_fields(&f, &g)
}

/// Test functions for the Jacobiator: the constant 1, the coordinates and ten seeded quadratics.
pub fn jacobiator_battery(chart: &Chart, seed: u64) -> (Vec<Expr>, Vec<[usize; 3]>) {
    let n = chart.dim();
    let mut fs = vec![Expr::constant(chart.coords(), 1.0)];
    fs.extend((0..n).map(|i| Expr::var(chart.coords(), i)));
    let nb = fs.len();
    let mut triples = Vec::new();
    for a in 0..nb {
        for b in a + 1..nb {
            for c in b + 1..nb {
                triples.push([a, b, c]);
            }
        }
    }
    for q in 0..10 {
        fs.push(random_polynomial(chart.coords(), 2, 6, seed.wrapping_mul(1000).wrapping_add(q)));
    }
    for q in 0..10 {
        triples.push([nb + q, nb + (q + 1) % 10, nb + (q + 2) % 10]);
        triples.push([nb + q, 1 + (q as usize) % n, nb + (q + 5) % 10]);
    }
    (fs, triples)
}

/// Largest normalized Jacobiator over the battery at one point.
fn jacobiator_at(j: &JacobiStructure, fs: &[Expr], triples: &[[usize; 3]], p: &[f64]) -> Result<(f64, f64)> {
    let lam = j.lambda.jets(p, 1)?;
    let reeb = j.reeb.jets(p, 1)?;
    let fj: Vec<Taylor> = fs.iter().map(|f| f.eval_taylor(p, 2)).collect::<Result<_>>()?;
    let (mut worst, mut worst_abs) = (0.0f64, 0.0f64);
    for t in triples {
        let [a, b, c] = *t;
        let br = |x: usize, y: usize| bracket_jets(&lam, &reeb, &fj[x], &fj[y], 1);
        let t1 = bracket_jets(&lam, &reeb, &br(a, b), &fj[c], 0).value();
        let t2 = bracket_jets(&lam, &reeb, &br(b, c), &fj[a], 0).value();
        let t3 = bracket_jets(&lam, &reeb, &br(c, a), &fj[b], 0).value();
        let s = (t1 + t2 + t3).abs();
        let rel = s / (1.0f64).max(t1.abs() + t2.abs() + t3.abs());
        worst = worst.max(rel);
        worst_abs = worst_abs.max(s);
    }
    Ok((worst, worst_abs))
}

/// Normalized residuals of `[Λ,Λ] − 2R∧Λ` and `[Λ,R]` at one point.
fn schouten_at(j: &JacobiStructure, e1: &Option<TensorField>, e2: &Option<TensorField>, p: &[f64]) -> Result<(f64, f64, f64, f64)> {
    let lam = j.lambda.jets(p, 1)?;
    let reeb = j.reeb.jets(p, 1)?;
    let n = p.len();
    let sup0 = |v: &[Taylor]| v.iter().fold(0.0f64, |m, t| m.max(t.value().abs()));
    let sup1 = |v: &[Taylor]| v.iter().fold(0.0f64, |m, t| (0..n).fold(m, |m, i| m.max(t.d1(i).abs())));
    let (l0, l1, r0, r1) = (sup0(&lam), sup1(&lam), sup0(&reeb), sup1(&reeb));
    let nf = n as f64;
    let a1 = match e1 {
        Some(f) => f.max_abs(p)?,
        None => 0.0,
    };
    let a2 = match e2 {
        Some(f) => f.max_abs(p)?,
        None => 0.0,
    };
    let s1 = 6.0 * nf * l0 * l1 + 2.0 * r0 * l0;
    let s2 = nf * (r0 * l1 + l0 * r1);
    Ok((a1 / s1.max(1.0), a2 / s2.max(1.0), a1, a2))
}

/// Compatibility residuals and the Jacobiator battery over seeded sample points.
pub fn verify_jacobi(j: &JacobiStructure, opts: VerifyOptions) -> DiagnosisReport {
    let mut rep = DiagnosisReport::new("verify-jacobi", Provenance::new(opts.seed, opts.tol, opts.samples));
    let pts = j.chart().sample(opts.samples.max(1), opts.seed);
    let run = || -> Result<[f64; 6]> {
        let e1 = if j.chart().dim() >= 3 {
            Some(schouten(&j.lambda, &j.lambda)?.sub(&wedge(&j.reeb, &j.lambda)?.scale(2.0))?)
        } else {
            None
        };
        let e2 = if j.chart().dim() >= 2 { Some(schouten(&j.lambda, &j.reeb)?) } else { None };
        let (fs, triples) = jacobiator_battery(j.chart(), opts.seed);
        let mut m = [0.0f64; 6];
        for p in &pts {
            let (a, b, c, d) = schouten_at(j, &e1, &e2, p)?;
            let (e, f) = jacobiator_at(j, &fs, &triples, p)?;
            for (slot, v) in m.iter_mut().zip([a, b, e, c, d, f]) {
                *slot = slot.max(v);
            }
        }
        Ok(m)
    };
    match run() {
        Ok(m) => {
            let s1 = rep.residual("schouten_lambda_lambda", m[0], opts.tol);
            let s2 = rep.residual("schouten_lambda_reeb", m[1], opts.tol);
            let jac = rep.residual("jacobiator", m[2], opts.tol);
            let schouten_pass = s1 && s2;
            rep.verdict(
                Verdict::new("jacobi", Answer::from_bool(schouten_pass && jac))
                    .with("schouten_pass", schouten_pass)
                    .with("jacobiator_pass", jac)
                    .with("criteria_agree", schouten_pass == jac)
                    .with("abs_schouten_lambda_lambda", num(m[3]))
                    .with("abs_schouten_lambda_reeb", num(m[4]))
                    .with("abs_jacobiator", num(m[5])),
            );
            rep.settle_by_residuals();
        }
        Err(e) => {
            rep.note(format!("evaluation failed: {e}"));
            rep.verdict(Verdict::new("jacobi", Answer::No).with("error", e.to_string()));
            rep.outcome = Answer::No;
        }
    }
    rep
}

/// `(τΛ, τR + Λ^♯ dτ)`; re-verifies when the input was verified.
pub fn conformal_transform(j: &JacobiStructure, tau: &Expr, opts: VerifyOptions) -> Result<JacobiStructure> {
    let c = j.chart().clone();
    let tf = TensorField::function(c.clone(), tau.clone())?;
    for p in c.sample(opts.samples.max(1), opts.seed) {
        if tf.eval(&p)?[0].abs() < opts.tol {
            return Err(Error::VanishingConformalFactor { point: p });
        }
    }
    let dtau = crate::geometry::exterior_derivative(&tf)?;
    let lambda = j.lambda.mul_fn(&tf)?;
    let reeb = j.reeb.mul_fn(&tf)?.sub(&j.sharp(&dtau)?)?;
    let mut out = JacobiStructure::new(lambda, reeb)?;
    if j.verified {
        out.verify(opts);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
