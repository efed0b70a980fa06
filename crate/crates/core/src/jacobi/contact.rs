use std::sync::Arc;

use super::{JacobiStructure, VerifyOptions};
use crate::error::{Error, Result};
use crate::exprlang::{Scalar, Taylor};
use crate::geometry::combin::Combos;
use crate::geometry::{exterior_derivative, Chart, JetField, Kind, TensorField};
use crate::numerics::{det, lu_solve};

fn check_one_form(theta: &TensorField) -> Result<()> {
    if theta.kind() != Kind::Form || theta.degree() != 1 {
        return Err(Error::DegreeMismatch("expected a 1-form".into()));
    }
    Ok(())
}

/// Matrix `M = dθ + θ ⊗ θ` from jets of `θ` of order `k + 1`; entries at order `k`.
fn contact_matrix(th: &[Taylor], k: usize) -> Vec<Vec<Taylor>> {
    let n = th.len();
    let t0: Vec<Taylor> = th.iter().map(|t| t.truncate(k)).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| th[j].derivative(i).minus(&th[i].derivative(j)).plus(&t0[i].times(&t0[j])))
                .collect()
        })
        .collect()
}

/// `det(dθ + θ⊗θ)` at a point; nonzero exactly where `θ ∧ (dθ)^n ≠ 0`.
pub fn contact_matrix_det(theta: &TensorField, p: &[f64]) -> Result<f64> {
    check_one_form(theta)?;
    let th = theta.jets(p, 1)?;
    let m = contact_matrix(&th, 0);
    let a: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|t| t.value()).collect()).collect();
    Ok(det(&a))
}

pub(crate) fn check_contact(theta: &TensorField, opts: VerifyOptions) -> Result<()> {
    check_one_form(theta)?;
    let n = theta.dim();
    if n % 2 == 0 {
        return Err(Error::NotContact { point: vec![] });
    }
    for p in theta.chart().sample(opts.samples.max(1), opts.seed) {
        let th = theta.jets(&p, 1)?;
        let m = contact_matrix(&th, 0);
        let a: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|t| t.value()).collect()).collect();
        let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs())).max(1.0);
        if det(&a).abs() <= 1e-10 * scale.powi(n as i32) {
            return Err(Error::NotContact { point: p });
        }
    }
    Ok(())
}

/// Reeb field and bivector of a contact form, solved pointwise in jet arithmetic.
///
/// With `M = dθ + θ⊗θ` and `♭(v)_j = v^i M_ij`: `R = (Mᵀ)⁻¹ θ` and `Λ = −Nᵀ dθ N`
/// for `N = (Mᵀ)⁻¹`. This gives `i_R θ = 1`, `i_R dθ = 0` and `i_θ Λ = 0`.
pub fn contact_to_jacobi(theta: &TensorField) -> Result<JacobiStructure> {
    check_contact(theta, VerifyOptions::default())?;
    let n = theta.dim();
    let chart = theta.chart().clone();
    let f = theta.comps().clone();
    let solve = move |p: &[f64], k: usize| -> Result<(Vec<Taylor>, Vec<Vec<Taylor>>)> {
        let th = f.jets(p, k + 1)?;
        let m = contact_matrix(&th, k);
        let mt: Vec<Vec<Taylor>> = (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect();
        let mut rhs: Vec<Vec<Taylor>> = (0..n)
            .map(|i| {
                let mut row: Vec<Taylor> = (0..n).map(|j| Taylor::constant(p.len(), k, if i == j { 1.0 } else { 0.0 })).collect();
                row.push(th[i].truncate(k));
                row
            })
            .collect();
        rhs = lu_solve(mt, rhs).map_err(|_| Error::NotContact { point: p.to_vec() })?;
        let r: Vec<Taylor> = rhs.iter().map(|row| row[n].clone()).collect();
        let nmat: Vec<Vec<Taylor>> = rhs.iter().map(|row| row[..n].to_vec()).collect();
        Ok((r, nmat))
    };
    let solve = Arc::new(solve);
    let s1 = solve.clone();
    let reeb = JetField::new(chart.clone(), n, move |p, k| Ok(s1(p, k)?.0));
    let f2 = theta.comps().clone();
    let combos = Combos::get(n, 2);
    let lambda = JetField::new(chart.clone(), combos.len(), move |p, k| {
        let (_, nm) = solve(p, k)?;
        let th = f2.jets(p, k + 1)?;
        let w: Vec<Vec<Taylor>> =
            (0..n).map(|a| (0..n).map(|b| th[b].derivative(a).minus(&th[a].derivative(b))).collect()).collect();
        let wn: Vec<Vec<Taylor>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|j| (0..n).fold(Taylor::constant(p.len(), k, 0.0), |s, b| s.plus(&w[a][b].times(&nm[b][j]))))
                    .collect()
            })
            .collect();
        Ok(combos
            .masks()
            .iter()
            .map(|&m| {
                let i = m.trailing_zeros() as usize;
                let j = 31 - m.leading_zeros() as usize;
                (0..n).fold(Taylor::constant(p.len(), k, 0.0), |s, a| s.minus(&nm[a][i].times(&wn[a][j])))
            })
            .collect())
    });
    JacobiStructure::new(
        TensorField::from_jets(Kind::Multivector, 2, lambda)?,
        TensorField::from_jets(Kind::Multivector, 1, reeb)?,
    )
}

/// `ω = d(e^s pr₁*θ)` on the chart extended by `s`.
pub fn symplectify_form(theta: &TensorField) -> Result<TensorField> {
    check_contact(theta, VerifyOptions::default())?;
    let n = theta.dim();
    let big: Arc<Chart> = Arc::new(theta.chart().extend("s", (f64::NEG_INFINITY, f64::INFINITY))?);
    let lifted = theta.embed(big.clone(), (0..n).collect())?;
    let es = TensorField::function(big.clone(), crate::exprlang::Expr::var(big.coords(), n).apply(crate::exprlang::Func::Exp))?;
    exterior_derivative(&lifted.mul_fn(&es)?)
}
