use std::sync::Arc;

use super::cochain::AlgebroidCochain;
use super::structure::AlgebroidStructure;
use crate::error::{Error, Result};
use crate::exprlang::Expr;
use crate::numerics::{rk4_step, simpson};

pub const MIN_GRID: usize = 16;

/// An algebroid path sampled on the uniform grid `t_k = k/N`.
///
/// `joints` lists grid indices where the path was glued; quadrature and difference stencils do not
/// straddle them. At a joint `a` holds the left limit and `joint_fiber` the right one.
#[derive(Debug, Clone)]
pub struct APath {
    algebroid: Arc<AlgebroidStructure>,
    a: Vec<Vec<f64>>,
    gamma: Vec<Vec<f64>>,
    joints: Vec<usize>,
    joint_fiber: Vec<Vec<f64>>,
}

impl APath {
    pub fn new(algebroid: Arc<AlgebroidStructure>, a: Vec<Vec<f64>>, gamma: Vec<Vec<f64>>) -> Result<APath> {
        Self::with_joints(algebroid, a, gamma, Vec::new(), Vec::new())
    }

    fn with_joints(
        algebroid: Arc<AlgebroidStructure>,
        a: Vec<Vec<f64>>,
        gamma: Vec<Vec<f64>>,
        joints: Vec<usize>,
        joint_fiber: Vec<Vec<f64>>,
    ) -> Result<APath> {
        if a.len() != gamma.len() || a.len() < 2 {
            return Err(Error::DimensionMismatch { expected: gamma.len().max(2), got: a.len() });
        }
        for (x, g) in a.iter().zip(&gamma) {
            if x.len() != algebroid.rank() {
                return Err(Error::DimensionMismatch { expected: algebroid.rank(), got: x.len() });
            }
            if g.len() != algebroid.dim() {
                return Err(Error::DimensionMismatch { expected: algebroid.dim(), got: g.len() });
            }
        }
        for (k, g) in gamma.iter().enumerate() {
            if !algebroid.chart().contains(g) {
                return Err(Error::LeftDomain { time: k as f64 / (gamma.len() - 1) as f64 });
            }
        }
        Ok(APath { algebroid, a, gamma, joints, joint_fiber })
    }

    /// The zero path at `x0`.
    pub fn zero(algebroid: Arc<AlgebroidStructure>, x0: &[f64], n: usize) -> Result<APath> {
        let r = algebroid.rank();
        Self::new(algebroid, vec![vec![0.0; r]; n + 1], vec![x0.to_vec(); n + 1])
    }

    pub fn algebroid(&self) -> &Arc<AlgebroidStructure> {
        &self.algebroid
    }

    pub fn intervals(&self) -> usize {
        self.a.len() - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.intervals();
        (0..=n).map(|k| k as f64 / n as f64).collect()
    }

    pub fn fiber(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn base(&self) -> &[Vec<f64>] {
        &self.gamma
    }

    pub fn joints(&self) -> &[usize] {
        &self.joints
    }

    pub fn start(&self) -> &[f64] {
        &self.gamma[0]
    }

    pub fn end(&self) -> &[f64] {
        self.gamma.last().unwrap()
    }

    /// Fiber value at node `k` seen from the segment starting at `lo`.
    fn fiber_in(&self, k: usize, lo: usize) -> &[f64] {
        if k == lo {
            if let Some(q) = self.joints.iter().position(|&j| j == lo) {
                return &self.joint_fiber[q];
            }
        }
        &self.a[k]
    }

    fn segments(&self) -> Vec<(usize, usize)> {
        let mut cuts = vec![0];
        cuts.extend(self.joints.iter().copied());
        cuts.push(self.intervals());
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Max of `|ρ(a(t_k)) − γ'(t_k)|` with five-point central differences inside each smooth segment.
    pub fn invariant_residual(&self) -> Result<f64> {
        let h = self.h();
        let mut worst: f64 = 0.0;
        for (lo, hi) in self.segments() {
            for k in lo + 2..hi.saturating_sub(1) {
                let rho = self.algebroid.rho(&self.gamma[k], &self.a[k])?;
                for (i, r) in rho.iter().enumerate() {
                    let g = |q: usize| self.gamma[q][i];
                    let d = (g(k - 2) - 8.0 * g(k - 1) + 8.0 * g(k + 1) - g(k + 2)) / (12.0 * h);
                    worst = worst.max((r - d).abs());
                }
            }
        }
        Ok(worst)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let r = self.invariant_residual()?;
        if r > tol {
            return Err(Error::InvalidAPath { residual: r });
        }
        Ok(())
    }

    /// `a^τ(t) = τ'(t) a(τ(t))` over `γ(τ(t))` for the cutoff `τ(t) = t²(3 − 2t)`.
    pub fn reparametrize(&self) -> Result<APath> {
        let n = self.intervals();
        let mut a = Vec::with_capacity(n + 1);
        let mut g = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = k as f64 / n as f64;
            let (tau, dtau) = (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t));
            let (ak, gk) = self.interpolate(tau)?;
            a.push(ak.iter().map(|v| v * dtau).collect());
            g.push(gk);
        }
        APath::new(self.algebroid.clone(), a, g)
    }

    /// Fiber value by cubic Lagrange and base point by cubic Hermite interpolation (with `γ' = ρ(a)`).
    pub fn interpolate(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.intervals();
        let h = self.h();
        let seg = self
            .segments()
            .into_iter()
            .find(|&(lo, hi)| t <= hi as f64 * h + 1e-15 && t >= lo as f64 * h - 1e-15)
            .unwrap_or((0, n));
        let (lo, hi) = seg;
        let k = ((t / h).floor() as usize).clamp(lo, hi - 1);
        let u = t / h - k as f64;
        let s = if hi - lo < 3 { k } else { k.saturating_sub(1).clamp(lo, hi - 3) };
        let nodes: Vec<usize> = (s..(s + 4).min(hi + 1)).collect();
        let x = t / h;
        let mut a = vec![0.0; self.algebroid.rank()];
        for &i in &nodes {
            let mut w = 1.0;
            for &j in &nodes {
                if j != i {
                    w *= (x - j as f64) / (i as f64 - j as f64);
                }
            }
            for (q, v) in a.iter_mut().enumerate() {
                *v += w * self.fiber_in(i, lo)[q];
            }
        }
        let d0 = self.algebroid.rho(&self.gamma[k], self.fiber_in(k, lo))?;
        let d1 = self.algebroid.rho(&self.gamma[k + 1], &self.a[k + 1])?;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u),
            u * (1.0 - u) * (1.0 - u),
            u * u * (3.0 - 2.0 * u),
            u * u * (u - 1.0),
        );
        let g = (0..self.algebroid.dim())
            .map(|i| h00 * self.gamma[k][i] + h10 * h * d0[i] + h01 * self.gamma[k + 1][i] + h11 * h * d1[i])
            .collect();
        Ok((a, g))
    }

    /// One row per grid node: `ε, t, γ…, a…`.
    pub fn csv_rows(&self, eps: f64) -> Vec<Vec<f64>> {
        let n = self.intervals();
        (0..=n)
            .map(|k| {
                let mut row = vec![eps, k as f64 / n as f64];
                row.extend(&self.gamma[k]);
                row.extend(&self.a[k]);
                row
            })
            .collect()
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["eps".to_string(), "t".to_string()];
        h.extend(self.algebroid.chart().coords().iter().map(|c| format!("gamma_{c}")));
        h.extend((0..self.algebroid.rank()).map(|i| format!("a{i}")));
        h
    }
}

/// Integrates `γ' = ρ(a(t), γ)` from `x0` with classical RK4 on `n` uniform steps.
pub fn apath_from_fn<F>(algebroid: Arc<AlgebroidStructure>, a: F, x0: &[f64], n: usize) -> Result<APath>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    if n < MIN_GRID {
        return Err(Error::GridTooCoarse { got: n, min: MIN_GRID });
    }
    if x0.len() != algebroid.dim() {
        return Err(Error::DimensionMismatch { expected: algebroid.dim(), got: x0.len() });
    }
    let h = 1.0 / n as f64;
    let rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> { algebroid.rho(y, &a(t)?) };
    let mut gamma = vec![x0.to_vec()];
    let mut av = vec![a(0.0)?];
    for k in 0..n {
        let t = k as f64 * h;
        let y = rk4_step(&rhs, t, &gamma[k], h)?;
        if !algebroid.chart().contains(&y) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::LeftDomain { time: t + h });
        }
        gamma.push(y);
        av.push(a(t + h)?);
    }
    APath::new(algebroid, av, gamma)
}

/// As [`apath_from_fn`] with fiber components given as expressions in `t`.
pub fn apath_from_fiber(algebroid: Arc<AlgebroidStructure>, a: &[Expr], x0: &[f64], n: usize) -> Result<APath> {
    if a.len() != algebroid.rank() {
        return Err(Error::DimensionMismatch { expected: algebroid.rank(), got: a.len() });
    }
    for e in a {
        if e.coords().len() > 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: e.coords().len() });
        }
    }
    apath_from_fn(
        algebroid,
        |t| {
            a.iter()
                .map(|e| if e.coords().is_empty() { e.eval(&[]) } else { e.eval(&[t]) })
                .collect()
        },
        x0,
        n,
    )
}

/// `∫_0^1 ⟨R(γ(t)), a(t)⟩ dt` by composite Simpson on each smooth segment.
pub fn cocycle_integral(path: &APath, rc: &AlgebroidCochain) -> Result<f64> {
    if path.intervals() < MIN_GRID {
        return Err(Error::GridTooCoarse { got: path.intervals(), min: MIN_GRID });
    }
    if rc.degree() != 1 || rc.rank() != path.algebroid.rank() {
        return Err(Error::DegreeMismatch("need a degree 1 cochain of the path's algebroid".into()));
    }
    crate::geometry::same_chart(rc.chart(), path.algebroid.chart())?;
    let pairing = |k: usize, lo: usize| -> Result<f64> {
        let r = rc.eval(&path.gamma[k])?;
        Ok(r.iter().zip(path.fiber_in(k, lo)).map(|(x, y)| x * y).sum::<f64>())
    };
    let mut f = Vec::with_capacity(path.a.len());
    for k in 0..path.a.len() {
        f.push(pairing(k, usize::MAX)?);
    }
    let h = path.h();
    let mut total = 0.0;
    for (lo, hi) in path.segments() {
        f[lo] = pairing(lo, lo)?;
        total += if hi - lo >= 2 {
            simpson(&f[lo..=hi], h)
        } else {
            0.5 * h * (f[lo] + f[hi])
        };
    }
    Ok(total)
}

/// `a ⊙ b`: `b` on `[0, 1/2]`, then `a`; with `cutoff` both are first reparametrized by `τ`.
pub fn concatenate(a: &APath, b: &APath, cutoff: bool) -> Result<APath> {
    if !Arc::ptr_eq(&a.algebroid, &b.algebroid) {
        crate::geometry::same_chart(a.algebroid.chart(), b.algebroid.chart())?;
        if a.algebroid.rank() != b.algebroid.rank() {
            return Err(Error::DimensionMismatch { expected: a.algebroid.rank(), got: b.algebroid.rank() });
        }
    }
    if a.intervals() != b.intervals() {
        return Err(Error::DimensionMismatch { expected: a.intervals(), got: b.intervals() });
    }
    let gap = a
        .start()
        .iter()
        .zip(b.end())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let scale = a.start().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if gap > 1e-8 * scale {
        return Err(Error::EndpointMismatch { distance: gap });
    }
    let (a, b) = if cutoff { (a.reparametrize()?, b.reparametrize()?) } else { (a.clone(), b.clone()) };
    let n = a.intervals();
    let mut fa = Vec::with_capacity(2 * n + 1);
    let mut ga = Vec::with_capacity(2 * n + 1);
    for k in 0..=n {
        fa.push(b.a[k].iter().map(|v| 2.0 * v).collect());
        ga.push(b.gamma[k].clone());
    }
    for k in 1..=n {
        fa.push(a.a[k].iter().map(|v| 2.0 * v).collect());
        ga.push(a.gamma[k].clone());
    }
    let double = |v: &[f64]| v.iter().map(|x| 2.0 * x).collect::<Vec<_>>();
    let mut joints: Vec<usize> = b.joints.clone();
    let mut jf: Vec<Vec<f64>> = b.joint_fiber.iter().map(|v| double(v)).collect();
    joints.push(n);
    jf.push(double(&a.a[0]));
    joints.extend(a.joints.iter().map(|j| j + n));
    jf.extend(a.joint_fiber.iter().map(|v| double(v)));
    APath::with_joints(a.algebroid.clone(), fa, ga, joints, jf)
}
