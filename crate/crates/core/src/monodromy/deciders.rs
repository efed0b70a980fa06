use serde_json::json;

use super::family::MaFamily;
use crate::error::Result;
use crate::numerics::richardson;
use crate::report::{num, Answer, Verdict};

#[derive(Debug, Clone, Copy)]
pub struct DeciderOptions {
    /// Radius grid points for the constancy and critical-point scans.
    pub grid: usize,
    pub r_min: f64,
    /// Richardson levels use `r = 2^{-k}` for `k_min..=k_max`.
    pub k_min: i32,
    pub k_max: i32,
    /// Relative tolerance for constancy of `A` and for flat zeros of `A'`.
    pub tol: f64,
    /// Compare against a run with doubled grid and depth and report flips as inconclusive.
    pub check_refinement: bool,
}

impl Default for DeciderOptions {
    fn default() -> Self {
        DeciderOptions { grid: 10_000, r_min: 1e-6, k_min: 4, k_max: 14, tol: 1e-10, check_refinement: true }
    }
}

impl DeciderOptions {
    fn refined(self) -> DeciderOptions {
        DeciderOptions {
            grid: 2 * self.grid,
            k_max: self.k_max + (self.k_max - self.k_min),
            check_refinement: false,
            ..self
        }
    }
}

/// A Richardson-extrapolated limit at `r → 0` with its significance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limit {
    pub value: f64,
    pub error: f64,
    pub scale: f64,
    pub converged: bool,
    pub nonzero: bool,
}

/// Below this fraction of the sample scale a limit counts as zero.
const ZERO_FLOOR: f64 = 1e-7;
/// An extrapolation error above this fraction of the sample scale means no convergence.
const CONVERGENCE: f64 = 1e-6;

pub fn limit_at_zero<F: Fn(f64) -> Result<f64>>(f: F, k_min: i32, k_max: i32) -> Result<Limit> {
    let samples = (k_min..=k_max).map(|k| f(2f64.powi(-k))).collect::<Result<Vec<_>>>()?;
    let (value, error) = richardson(&samples);
    let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let converged = error.is_finite() && error <= CONVERGENCE * scale;
    let nonzero = value.abs() > (10.0 * error).max(ZERO_FLOOR * scale);
    Ok(Limit { value, error, scale, converged, nonzero })
}

fn limit_verdict(name: &str, l: &Limit) -> Verdict {
    let ans = if !l.converged {
        Answer::Inconclusive
    } else {
        Answer::from_bool(l.nonzero)
    };
    Verdict::new(name, ans).with_num("limit", l.value).with_num("error_estimate", l.error).with_num("scale", l.scale)
}

/// Zeros of `A'` on the scan grid: sign changes refined by bisection, plus grid points where
/// `|A'|` is flat zero relative to the scale of `A'`.
fn critical_points(f: &MaFamily, o: &DeciderOptions) -> Result<(Vec<f64>, f64)> {
    let n = o.grid;
    let rs: Vec<f64> = (0..n).map(|i| o.r_min + (f.r_max() - o.r_min) * i as f64 / (n - 1) as f64).collect();
    let d = rs.iter().map(|&r| Ok(f.area_and_derivative(r)?.1)).collect::<Result<Vec<_>>>()?;
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let min_abs = d.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let mut out = Vec::new();
    for i in 0..n {
        if d[i].abs() <= o.tol * scale {
            out.push(rs[i]);
        } else if i + 1 < n && d[i] * d[i + 1] < 0.0 && d[i + 1].abs() > o.tol * scale {
            let (mut lo, mut hi, sl) = (rs[i], rs[i + 1], d[i].signum());
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if f.area_and_derivative(mid)?.1.signum() == sl {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    Ok((out, min_abs))
}

fn poisson_once(f: &MaFamily, o: &DeciderOptions) -> Result<Verdict> {
    let n = o.grid;
    let areas = (0..n)
        .map(|i| Ok(f.area_and_derivative(o.r_min + (f.r_max() - o.r_min) * i as f64 / (n - 1) as f64)?.0))
        .collect::<Result<Vec<_>>>()?;
    let amax = areas.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dev = areas.iter().map(|v| (v - areas[0]).abs()).fold(0.0, f64::max);
    let constant = dev <= o.tol * amax.max(1.0);
    let base = Verdict::new("poisson_integrable", Answer::Yes).with_num("area_deviation", dev).with("constant_area", constant);
    if constant {
        return Ok(base);
    }
    let (crit, min_abs) = critical_points(f, o)?;
    let lim = limit_at_zero(|r| Ok(f.area_and_derivative(r)?.1), o.k_min, o.k_max)?;
    let lv = limit_verdict("limit_dA", &lim);
    let answer = if !crit.is_empty() {
        Answer::No
    } else {
        lv.answer
    };
    let first: Vec<_> = crit.iter().take(8).map(|r| num(*r)).collect();
    Ok(Verdict { answer, ..base }
        .with("critical_points", crit.len())
        .with("first_critical_points", first)
        .with_num("min_abs_dA", min_abs)
        .with_num("limit_dA", lim.value)
        .with_num("limit_dA_error", lim.error)
        .with("limit_dA_converged", lim.converged))
}

fn jacobi_once(f: &MaFamily, o: &DeciderOptions) -> Result<Verdict> {
    let lim = limit_at_zero(
        |r| {
            let (a, d) = f.area_and_derivative(r)?;
            Ok(a + d)
        },
        o.k_min,
        o.k_max,
    )?;
    let v = limit_verdict("jacobi_integrable", &lim);
    Ok(v.with("limit_converged", lim.converged))
}

fn with_refinement<F>(f: &MaFamily, o: DeciderOptions, run: F) -> Result<Verdict>
where
    F: Fn(&MaFamily, &DeciderOptions) -> Result<Verdict>,
{
    let v = run(f, &o)?;
    if !o.check_refinement {
        return Ok(v);
    }
    let r = run(f, &o.refined())?;
    let stable = r.answer == v.answer;
    let answer = if stable { v.answer } else { Answer::Inconclusive };
    Ok(Verdict { answer, ..v }
        .with("refinement_stable", stable)
        .with("refined_answer", json!(r.answer)))
}

/// Integrable iff `A` is constant, or `A'` has no zeros on `(0, r_max]` and `lim_{r→0} A' ≠ 0`.
pub fn decide_poisson_integrable(f: &MaFamily, o: DeciderOptions) -> Result<Verdict> {
    with_refinement(f, o, poisson_once)
}

/// Integrable iff `lim_{r→0} (A' + A) ≠ 0`.
pub fn decide_jacobi_integrable(f: &MaFamily, o: DeciderOptions) -> Result<Verdict> {
    with_refinement(f, o, jacobi_once)
}
