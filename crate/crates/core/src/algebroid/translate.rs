use std::sync::Arc;

use super::cochain::{reeb_cocycle, AlgebroidCochain};
use super::paths::APath;
use super::structure::{cotangent_algebroid, jacobi_algebroid, AlgebroidStructure};
use crate::error::{Error, Result};
use crate::jacobi::{poissonize, JacobiStructure, VerifyOptions};
use crate::numerics::cumulative_integral;

/// Paths of `T*(M × ℝ)` for the poissonization versus pairs (path of `T*M ⊕ ℝ`, real `s`).
#[derive(Debug, Clone)]
pub struct PathCorrespondence {
    pub jacobi: Arc<AlgebroidStructure>,
    pub symplectic: Arc<AlgebroidStructure>,
    pub reeb: AlgebroidCochain,
    /// Path-invariant tolerance for inputs.
    pub path_tol: f64,
}

impl PathCorrespondence {
    pub fn new(j: &JacobiStructure, opts: VerifyOptions) -> Result<Self> {
        let jacobi = Arc::new(jacobi_algebroid(j, opts)?);
        let h = poissonize(j)?;
        let p = h.as_poisson()?;
        let mut vo = opts;
        vo.samples = opts.samples.min(50);
        let mut p = p;
        p.verify(vo);
        let symplectic = Arc::new(cotangent_algebroid(&p, opts)?);
        Ok(PathCorrespondence { jacobi, symplectic, reeb: reeb_cocycle(j)?, path_tol: 1e-5 })
    }

    /// `a_i = e^{−γ_0} ã_i`, `s = γ_0(0)`, base path the `M`-part of `γ`.
    pub fn to_jacobi(&self, path: &APath) -> Result<(APath, f64)> {
        crate::geometry::same_chart(path.algebroid().chart(), self.symplectic.chart())?;
        path.validate(self.path_tol)?;
        let n = self.jacobi.dim();
        let mut a = Vec::with_capacity(path.fiber().len());
        let mut g = Vec::with_capacity(path.fiber().len());
        for (at, gt) in path.fiber().iter().zip(path.base()) {
            let w = (-gt[n]).exp();
            a.push(at.iter().map(|v| w * v).collect());
            g.push(gt[..n].to_vec());
        }
        let s = path.start()[n];
        Ok((APath::new(self.jacobi.clone(), a, g)?, s))
    }

    /// `γ_0(t) = s − ∫_0^t R(a)`, `ã = e^{γ_0} a`.
    pub fn from_jacobi(&self, path: &APath, s: f64) -> Result<APath> {
        crate::geometry::same_chart(path.algebroid().chart(), self.jacobi.chart())?;
        path.validate(self.path_tol)?;
        let mut ra = Vec::with_capacity(path.fiber().len());
        for (at, gt) in path.fiber().iter().zip(path.base()) {
            let r = self.reeb.eval(gt)?;
            ra.push(r.iter().zip(at).map(|(x, y)| x * y).sum::<f64>());
        }
        let cum = cumulative_integral(&ra, path.h());
        let mut a = Vec::with_capacity(ra.len());
        let mut g = Vec::with_capacity(ra.len());
        for (k, (at, gt)) in path.fiber().iter().zip(path.base()).enumerate() {
            let g0 = s - cum[k];
            a.push(at.iter().map(|v| g0.exp() * v).collect());
            let mut x = gt.clone();
            x.push(g0);
            g.push(x);
        }
        if !path.joints().is_empty() {
            return Err(Error::InvalidAPath { residual: f64::NAN });
        }
        APath::new(self.symplectic.clone(), a, g)
    }
}
