use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::JacobiStructure;
use crate::numerics::gauss_legendre;
use crate::report::{num, Answer, Verdict};

/// Base points with finite generator lists of their period groups; an empty list is the trivial group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodData {
    pub points: Vec<Vec<f64>>,
    pub generators: Vec<Vec<f64>>,
}

impl PeriodData {
    /// Generators are stored as absolute values with zeros dropped.
    pub fn new(points: Vec<Vec<f64>>, generators: Vec<Vec<f64>>) -> Result<PeriodData> {
        if points.len() != generators.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: generators.len() });
        }
        let generators = generators.into_iter().map(|g| g.into_iter().map(f64::abs).filter(|g| *g > 0.0).collect()).collect();
        Ok(PeriodData { points, generators })
    }

    fn check(&self) -> Result<()> {
        if self.points.is_empty() {
            Err(Error::EmptyData)
        } else {
            Ok(())
        }
    }
}

const CF_DEPTH: usize = 40;
const CF_MAX_DENOMINATOR: f64 = 1e5;
const CF_RESIDUAL: f64 = 1e-12;

/// Denominator `q` with `x ≈ p/q`, when the continued fraction closes within the depth and
/// denominator limits.
fn rational_denominator(x: f64) -> Option<f64> {
    let (mut p0, mut q0, mut p1, mut q1) = (1.0, 0.0, x.floor(), 1.0);
    let mut frac = x - x.floor();
    for _ in 0..CF_DEPTH {
        if (x - p1 / q1).abs() <= CF_RESIDUAL * x.abs().max(1.0) {
            return Some(q1);
        }
        if q1 > CF_MAX_DENOMINATOR || frac == 0.0 {
            return None;
        }
        let y = 1.0 / frac;
        let a = y.floor();
        frac = y - a;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// Smallest positive element of `Σ gᵢℤ`: `+∞` for the trivial group, `0` when dense.
fn minimal_element(gens: &[f64]) -> f64 {
    let mut g = match gens.first() {
        Some(g) => *g,
        None => return f64::INFINITY,
    };
    for h in &gens[1..] {
        match rational_denominator(h / g) {
            Some(q) => g /= q,
            None => return 0.0,
        }
    }
    g
}

/// Smallest positive `n₁g₁ + n₂g₂` within `[0, W]` with `|n₂| ≤ m`.
fn enumerated_gap(g1: f64, g2: f64, m: i64) -> f64 {
    let mut best = g1.min(g2);
    for n2 in -m..=m {
        let v = (n2 as f64 * g2).rem_euclid(g1);
        for w in [v, g1 - v] {
            if w > 1e-14 * g1 && w < best {
                best = w;
            }
        }
    }
    best
}

/// Discreteness on the finite point set, consecutive points being neighbours.
pub fn discreteness_check(d: &PeriodData, tol: f64) -> Result<Verdict> {
    d.check()?;
    let minima: Vec<f64> = d.generators.iter().map(|g| minimal_element(g)).collect();
    let mut gap = f64::INFINITY;
    for i in 0..minima.len() {
        let next = if i + 1 < minima.len() { minima[i + 1] } else { minima[i] };
        gap = gap.min(minima[i].min(next));
    }
    let mut v = Verdict::new("locally_uniformly_discrete", Answer::from_bool(gap > tol))
        .with_num("gap", gap)
        .with("points", d.points.len())
        .with("note", "evaluated on the supplied point set");
    if let Some((i, g)) = d.generators.iter().enumerate().find(|(_, g)| g.len() >= 2) {
        let scan: Vec<_> = [10, 100, 1000, 10000].iter().map(|&m| num(enumerated_gap(g[0], g[1], m))).collect();
        v = v.with("enumerated_gap_point", i).with("enumerated_gaps", scan);
    }
    let per_point: Vec<_> = minima.iter().map(|m| num(*m)).collect();
    Ok(v.with("minimal_elements", per_point))
}

/// Every generator an integer within `tol`; flags `P = 0` when all groups are trivial.
pub fn prequantizable_check(d: &PeriodData, tol: f64) -> Result<Verdict> {
    d.check()?;
    let mut worst = (0.0f64, usize::MAX, f64::NAN);
    for (i, gens) in d.generators.iter().enumerate() {
        for g in gens {
            let dist = (g - g.round()).abs();
            if worst.1 == usize::MAX || dist > worst.0 {
                worst = (dist, i, *g);
            }
        }
    }
    let exact = d.generators.iter().all(|g| g.is_empty());
    let mut v = Verdict::new("prequantizable", Answer::from_bool(exact || worst.0 <= tol)).with("trivial_periods", exact);
    if !exact {
        v = v.with_num("worst_distance", worst.0).with("worst_point", worst.1).with_num("worst_generator", worst.2);
    }
    Ok(v)
}

/// Integration domain on the chart of a 2-dimensional Poisson structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LeafDomain {
    /// A contractible open leaf; the period group is trivial.
    Rectangle { bounds: [(f64, f64); 2] },
    /// The rectangle is an angle chart of a 2-sphere, e.g. `(0, π) × (0, 2π)`.
    Sphere { bounds: [(f64, f64); 2] },
}

const LEAF_NODES: usize = 48;

/// Period generators of closed leaves in dimension 2, where the leaf form is `(1/Λ^{12}) dx¹∧dx²`.
pub fn dim2_periods(p: &JacobiStructure, leaves: &[LeafDomain]) -> Result<PeriodData> {
    let c = p.chart();
    if c.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: c.dim() });
    }
    let reeb = c.sample(50, 3).iter().map(|x| p.reeb().max_abs(x)).collect::<Result<Vec<_>>>()?;
    let r = reeb.into_iter().fold(0.0, f64::max);
    if r > 0.0 {
        return Err(Error::NotPoisson { residual: r });
    }
    let (xs, ws) = gauss_legendre(LEAF_NODES);
    let mut points = Vec::new();
    let mut generators = Vec::new();
    for leaf in leaves {
        let (LeafDomain::Rectangle { bounds } | LeafDomain::Sphere { bounds }) = leaf;
        let half = [(bounds[0].1 - bounds[0].0) / 2.0, (bounds[1].1 - bounds[1].0) / 2.0];
        let mid = [(bounds[0].1 + bounds[0].0) / 2.0, (bounds[1].1 + bounds[1].0) / 2.0];
        let mut total = 0.0;
        let mut vanishing = 0;
        for (u, wu) in xs.iter().zip(&ws) {
            for (v, wv) in xs.iter().zip(&ws) {
                let x = [mid[0] + half[0] * u, mid[1] + half[1] * v];
                let l = p.lambda().component(&x, &[0, 1])?;
                if l.abs() <= 1e-14 {
                    vanishing += 1;
                } else {
                    total += wu * wv / l;
                }
            }
        }
        if vanishing == LEAF_NODES * LEAF_NODES {
            return Err(Error::DegenerateLeaf(format!("Λ vanishes on {bounds:?}")));
        }
        points.push(mid.to_vec());
        match leaf {
            LeafDomain::Rectangle { .. } => generators.push(vec![]),
            LeafDomain::Sphere { .. } => {
                if vanishing > 0 {
                    return Err(Error::DegenerateLeaf(format!("Λ vanishes at {vanishing} nodes of {bounds:?}")));
                }
                generators.push(vec![(total * half[0] * half[1]).abs()]);
            }
        }
    }
    PeriodData::new(points, generators)
}
