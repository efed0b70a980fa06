use std::sync::Arc;

use super::paths::{APath, MIN_GRID};
use super::structure::AlgebroidStructure;
use crate::error::{Error, Result};
use crate::numerics::simpson;

/// Grid data `a(ε_m, t_k)`, `γ(ε_m, t_k)` of a family of algebroid paths with fixed endpoints.
#[derive(Debug, Clone)]
pub struct HomotopyFamily {
    algebroid: Arc<AlgebroidStructure>,
    slices: Vec<APath>,
}

#[derive(Debug, Clone, Copy)]
pub struct FamilyOptions {
    /// Allowed motion of the endpoints across the family.
    pub endpoint_tol: f64,
    /// Allowed path-invariant residual of each slice.
    pub path_tol: f64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions { endpoint_tol: 1e-9, path_tol: 1e-4 }
    }
}

impl HomotopyFamily {
    pub fn new(algebroid: Arc<AlgebroidStructure>, slices: Vec<APath>, opts: FamilyOptions) -> Result<Self> {
        if slices.len() < 3 {
            return Err(Error::GridTooCoarse { got: slices.len().saturating_sub(1), min: 2 });
        }
        let n = slices[0].intervals();
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        for s in &slices {
            if s.intervals() != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.intervals() });
            }
            if !Arc::ptr_eq(s.algebroid(), &algebroid) {
                crate::geometry::same_chart(s.algebroid().chart(), algebroid.chart())?;
            }
            let d = dist(s.start(), slices[0].start()).max(dist(s.end(), slices[0].end()));
            if d > opts.endpoint_tol {
                return Err(Error::EndpointMismatch { distance: d });
            }
            s.validate(opts.path_tol)?;
        }
        Ok(HomotopyFamily { algebroid, slices })
    }

    /// Samples `f(ε, t) = (γ, a)` on `n_eps × n_t` intervals.
    pub fn from_fn<F>(algebroid: Arc<AlgebroidStructure>, n_eps: usize, n_t: usize, f: F, opts: FamilyOptions) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<(Vec<f64>, Vec<f64>)>,
    {
        let mut slices = Vec::with_capacity(n_eps + 1);
        for m in 0..=n_eps {
            let e = m as f64 / n_eps as f64;
            let mut g = Vec::with_capacity(n_t + 1);
            let mut a = Vec::with_capacity(n_t + 1);
            for k in 0..=n_t {
                let (gk, ak) = f(e, k as f64 / n_t as f64)?;
                g.push(gk);
                a.push(ak);
            }
            slices.push(APath::new(algebroid.clone(), a, g)?);
        }
        Self::new(algebroid, slices, opts)
    }

    pub fn algebroid(&self) -> &Arc<AlgebroidStructure> {
        &self.algebroid
    }

    pub fn slices(&self) -> &[APath] {
        &self.slices
    }

    pub fn eps_intervals(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn t_intervals(&self) -> usize {
        self.slices[0].intervals()
    }

    /// The same family over another algebroid on the same chart, with fiber vectors padded by zeros.
    pub fn extend_fiber(&self, target: Arc<AlgebroidStructure>, opts: FamilyOptions) -> Result<Self> {
        let extra = target
            .rank()
            .checked_sub(self.algebroid.rank())
            .ok_or(Error::DimensionMismatch { expected: self.algebroid.rank(), got: target.rank() })?;
        let slices = self
            .slices
            .iter()
            .map(|s| {
                let a = s
                    .fiber()
                    .iter()
                    .map(|v| {
                        let mut w = v.clone();
                        w.extend(std::iter::repeat(0.0).take(extra));
                        w
                    })
                    .collect();
                APath::new(target.clone(), a, s.base().to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(target, slices, opts)
    }

    /// One row per grid node: `ε, t, γ…, a…`.
    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        let m = self.eps_intervals();
        self.slices.iter().enumerate().flat_map(|(i, s)| s.csv_rows(i as f64 / m as f64)).collect()
    }

    pub fn csv_header(&self) -> Vec<String> {
        self.slices[0].csv_header()
    }
}

/// Solution of `∂_t b − ∂_ε a = c(γ)(a, b)`, `b(ε, 0) = 0`, on the even nodes of the `t` grid.
#[derive(Debug, Clone)]
pub struct Transport {
    /// `b[m][j]` at `t = 2j/N`.
    pub b: Vec<Vec<Vec<f64>>>,
    /// `|b(ε_m, 1)|`.
    pub end_norm: Vec<f64>,
    pub max_end: f64,
    pub is_homotopy: bool,
}

impl Transport {
    pub fn end_values(&self) -> Vec<Vec<f64>> {
        self.b.iter().map(|s| s.last().unwrap().clone()).collect()
    }
}

/// Transport with the flat connection of the constant frame, so the torsion is the frame bracket.
/// RK4 with step `2/N` uses the odd nodes as midpoints.
pub fn homotopy_transport(f: &HomotopyFamily, tol: f64) -> Result<Transport> {
    let n = f.t_intervals();
    let m = f.eps_intervals();
    if n < MIN_GRID || n % 2 == 1 {
        return Err(Error::GridTooCoarse { got: n, min: MIN_GRID });
    }
    if m < 2 {
        return Err(Error::GridTooCoarse { got: m, min: 2 });
    }
    let r = f.algebroid.rank();
    let de = 1.0 / m as f64;
    let fib = |i: usize, k: usize| &f.slices[i].fiber()[k];
    // fourth-order stencils in ε, second order when the ε grid is too short for them
    let da = |i: usize, k: usize| -> Vec<f64> {
        let g = |j: usize, q: usize| fib(j, k)[q];
        (0..r)
            .map(|q| {
                if m < 4 {
                    if i == 0 {
                        (-3.0 * g(0, q) + 4.0 * g(1, q) - g(2, q)) / (2.0 * de)
                    } else if i == m {
                        (3.0 * g(m, q) - 4.0 * g(m - 1, q) + g(m - 2, q)) / (2.0 * de)
                    } else {
                        (g(i + 1, q) - g(i - 1, q)) / (2.0 * de)
                    }
                } else if i == 0 {
                    (-25.0 * g(0, q) + 48.0 * g(1, q) - 36.0 * g(2, q) + 16.0 * g(3, q) - 3.0 * g(4, q)) / (12.0 * de)
                } else if i == 1 {
                    (-3.0 * g(0, q) - 10.0 * g(1, q) + 18.0 * g(2, q) - 6.0 * g(3, q) + g(4, q)) / (12.0 * de)
                } else if i == m {
                    (25.0 * g(m, q) - 48.0 * g(m - 1, q) + 36.0 * g(m - 2, q) - 16.0 * g(m - 3, q) + 3.0 * g(m - 4, q))
                        / (12.0 * de)
                } else if i == m - 1 {
                    (3.0 * g(m, q) + 10.0 * g(m - 1, q) - 18.0 * g(m - 2, q) + 6.0 * g(m - 3, q) - g(m - 4, q)) / (12.0 * de)
                } else {
                    (g(i - 2, q) - 8.0 * g(i - 1, q) + 8.0 * g(i + 1, q) - g(i + 2, q)) / (12.0 * de)
                }
            })
            .collect()
    };
    let h = 2.0 / n as f64;
    let mut all = Vec::with_capacity(m + 1);
    let mut end_norm = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let s = &f.slices[i];
        let rhs = |k: usize, b: &[f64]| -> Result<Vec<f64>> {
            let mut out = da(i, k);
            let br = f.algebroid.bracket_at(&s.base()[k], &s.fiber()[k], b)?;
            for q in 0..r {
                out[q] += br[q];
            }
            Ok(out)
        };
        let axpy = |y: &[f64], d: &[f64], c: f64| y.iter().zip(d).map(|(a, b)| a + c * b).collect::<Vec<_>>();
        let mut b = vec![vec![0.0; r]];
        for j in 0..n / 2 {
            let (k0, k1, k2) = (2 * j, 2 * j + 1, 2 * j + 2);
            let y = &b[j];
            let s1 = rhs(k0, y)?;
            let s2 = rhs(k1, &axpy(y, &s1, h / 2.0))?;
            let s3 = rhs(k1, &axpy(y, &s2, h / 2.0))?;
            let s4 = rhs(k2, &axpy(y, &s3, h))?;
            let next = (0..r).map(|q| y[q] + h / 6.0 * (s1[q] + 2.0 * s2[q] + 2.0 * s3[q] + s4[q])).collect();
            b.push(next);
        }
        end_norm.push(b.last().unwrap().iter().map(|v| v * v).sum::<f64>().sqrt());
        all.push(b);
    }
    let max_end = end_norm.iter().cloned().fold(0.0, f64::max);
    Ok(Transport { b: all, end_norm, max_end, is_homotopy: max_end <= tol })
}

fn transport_area(ext: &HomotopyFamily) -> Result<f64> {
    let tr = homotopy_transport(ext, f64::INFINITY)?;
    let r = ext.algebroid.rank();
    let v_end: Vec<f64> = tr.end_values().iter().map(|b| b[r - 1]).collect();
    let m = ext.eps_intervals();
    let de = 1.0 / m as f64;
    // u(ε, t) = −∫_0^ε v(ε', 1) dε' makes the ℝ-component of b vanish at t = 1.
    let u_end = -simpson(&v_end, de);
    Ok(-u_end)
}

/// `∫ ω_L = −∫_0^1 u(1, t) dt` for a closed sweep, where `u` is the ℝ-component that turns the
/// zero-padded family over `extended` (the Jacobi algebroid of the Poisson structure) into a homotopy.
pub fn leaf_area_via_transport(f: &HomotopyFamily, extended: Arc<AlgebroidStructure>, opts: FamilyOptions) -> Result<f64> {
    let first = &f.slices[0];
    let last = f.slices.last().unwrap();
    let mut gap: f64 = 0.0;
    for (x, y) in first.base().iter().zip(last.base()) {
        for (p, q) in x.iter().zip(y) {
            gap = gap.max((p - q).abs());
        }
    }
    if gap > opts.endpoint_tol.max(1e-9) {
        return Err(Error::NotClosedSweep(format!("first and last base paths differ by {gap:e}")));
    }
    swept_area_via_transport(f, extended, opts)
}

/// As [`leaf_area_via_transport`] without requiring the sweep to close up.
pub fn swept_area_via_transport(f: &HomotopyFamily, extended: Arc<AlgebroidStructure>, opts: FamilyOptions) -> Result<f64> {
    if extended.rank() != f.algebroid.rank() + 1 {
        return Err(Error::DimensionMismatch { expected: f.algebroid.rank() + 1, got: extended.rank() });
    }
    let ext = f.extend_fiber(extended, opts)?;
    transport_area(&ext)
}
