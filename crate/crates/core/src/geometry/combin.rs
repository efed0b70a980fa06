//! Strictly increasing index tuples as bitmasks, and Grassmann signs.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Increasing `p`-subsets of `0..n` in lexicographic order.
#[derive(Debug)]
pub struct Combos {
    pub n: usize,
    pub p: usize,
    masks: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl Combos {
    pub fn get(n: usize, p: usize) -> Arc<Combos> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Combos>>>> = OnceLock::new();
        let c = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut g = c.lock().unwrap_or_else(|e| e.into_inner());
        g.entry((n, p))
            .or_insert_with(|| {
                assert!(n <= 31);
                let mut masks = Vec::new();
                let mut cur = Vec::new();
                fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<u32>) {
                    if cur.len() == p {
                        out.push(cur.iter().fold(0u32, |m, &i| m | 1 << i));
                        return;
                    }
                    for i in start..n {
                        cur.push(i);
                        rec(i + 1, n, p, cur, out);
                        cur.pop();
                    }
                }
                if p <= n {
                    rec(0, n, p, &mut cur, &mut masks);
                }
                let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
                Arc::new(Combos { n, p, masks, index })
            })
            .clone()
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn mask(&self, i: usize) -> u32 {
        self.masks[i]
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn index(&self, mask: u32) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    pub fn tuple(&self, i: usize) -> Vec<usize> {
        mask_to_tuple(self.masks[i])
    }
}

pub fn mask_to_tuple(m: u32) -> Vec<usize> {
    (0..32).filter(|i| m >> i & 1 == 1).collect()
}

/// Sign of `ζ_a ζ_b = ± ζ_{a∪b}`, or `None` when the sets overlap.
pub fn wedge_sign(a: u32, b: u32) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    let mut inv = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inv += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    Some(if inv % 2 == 0 { 1.0 } else { -1.0 })
}

/// Sign of the right derivative `∂/∂ζ_i` acting on `ζ_a` (moves `ζ_i` to the right end).
pub fn right_sign(a: u32, i: usize) -> f64 {
    if (a >> (i + 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the left derivative (moves the factor to the left end).
pub fn left_sign(a: u32, i: usize) -> f64 {
    if (a & ((1u32 << i) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sorts an index list; returns the mask and permutation sign, or `None` on repeats.
pub fn sort_tuple(idx: &[usize]) -> Option<(u32, f64)> {
    let mut m = 0u32;
    let mut sign = 1.0;
    for (k, &i) in idx.iter().enumerate() {
        if m >> i & 1 == 1 {
            return None;
        }
        m |= 1 << i;
        if idx[..k].iter().filter(|&&j| j > i).count() % 2 == 1 {
            sign = -sign;
        }
    }
    Some((m, sign))
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
