use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exprlang::{parse, Expr};

/// Half-width used in place of an infinite bound when sampling.
pub const SAMPLING_CLIP: f64 = 3.0;

/// Ordered coordinate names over an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    coords: Vec<String>,
    bounds: Vec<(f64, f64)>,
}

impl Chart {
    pub fn new(coords: &[impl AsRef<str>], bounds: Vec<(f64, f64)>) -> Result<Chart> {
        let coords: Vec<String> = coords.iter().map(|c| c.as_ref().to_string()).collect();
        if coords.len() != bounds.len() {
            return Err(Error::InvalidChart(format!("{} names but {} intervals", coords.len(), bounds.len())));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{c}`")));
            }
            let (lo, hi) = bounds[i];
            if lo.is_nan() || hi.is_nan() || !(lo < hi) {
                return Err(Error::InvalidChart(format!("degenerate interval for `{c}`")));
            }
        }
        parse("0", &coords)?;
        Ok(Chart { coords, bounds })
    }

    /// All of ℝⁿ.
    pub fn euclidean(coords: &[impl AsRef<str>]) -> Result<Chart> {
        Chart::new(coords, vec![(f64::NEG_INFINITY, f64::INFINITY); coords.len()])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.bounds).all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    pub fn parse(&self, src: &str) -> Result<Expr> {
        parse(src, &self.coords)
    }

    /// Appends one coordinate; the name gets primes appended until it is fresh.
    pub fn extend(&self, name: &str, bounds: (f64, f64)) -> Result<Chart> {
        let mut n = name.to_string();
        while self.coords.contains(&n) {
            n.push('_');
        }
        let mut coords = self.coords.clone();
        coords.push(n);
        let mut b = self.bounds.clone();
        b.push(bounds);
        Chart::new(&coords, b)
    }

    /// Cartesian product with coordinates of `other` renamed by `suffix`.
    pub fn product(&self, other: &Chart, suffix: &str) -> Result<Chart> {
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().map(|c| format!("{c}{suffix}")));
        let mut b = self.bounds.clone();
        b.extend(other.bounds.iter().copied());
        Chart::new(&coords, b)
    }

    /// Box actually sampled: infinite sides are clipped to `SAMPLING_CLIP`.
    pub fn sampling_box(&self) -> Vec<(f64, f64)> {
        self.bounds
            .iter()
            .map(|&(lo, hi)| match (lo.is_finite(), hi.is_finite()) {
                (true, true) => (lo, hi),
                (true, false) => (lo, lo + 2.0 * SAMPLING_CLIP),
                (false, true) => (hi - 2.0 * SAMPLING_CLIP, hi),
                (false, false) => (-SAMPLING_CLIP, SAMPLING_CLIP),
            })
            .collect()
    }

    /// `n` reproducible low-discrepancy points strictly inside the sampling box.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        halton_box(&self.sampling_box(), n, seed)
    }
}

const PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0 / b as f64;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f /= b as f64;
    }
    r
}

/// Halton points with a seeded Cranley–Patterson rotation, mapped into the central 96% of `bx`.
pub fn halton_box(bx: &[(f64, f64)], n: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(bx.len() <= PRIMES.len(), "too many dimensions for the Halton sampler");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = bx.iter().map(|_| rng.gen::<f64>()).collect();
    (0..n)
        .map(|k| {
            bx.iter()
                .enumerate()
                .map(|(d, &(lo, hi))| {
                    let u = (radical_inverse(k as u64 + 1, PRIMES[d]) + shift[d]).fract();
                    lo + (hi - lo) * (0.02 + 0.96 * u)
                })
                .collect()
        })
        .collect()
}
