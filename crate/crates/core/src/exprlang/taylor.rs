//! Truncated multivariate Taylor polynomials of arbitrary order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::scalar::Scalar;

/// Monomials of total degree ≤ `order` in `nvars` variables, graded then lexicographic.
///
/// The ordering is independent of `order`, so a basis of lower order is a prefix of a higher one.
#[derive(Debug)]
pub struct MonomialBasis {
    pub nvars: usize,
    pub order: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    mul: Vec<(u32, u32, u32)>,
    parent: Vec<(u32, u32)>,
    factorial: Vec<f64>,
    degree_end: Vec<usize>,
}

fn monomials(n: usize, order: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u8);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for deg in 0..=order {
        rec(n, deg, &mut Vec::new(), &mut out);
    }
    out
}

impl MonomialBasis {
    fn build(nvars: usize, order: usize) -> MonomialBasis {
        let exps = monomials(nvars, order);
        let index: HashMap<Vec<u8>, usize> = exps.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let deg = |e: &Vec<u8>| e.iter().map(|&x| x as usize).sum::<usize>();
        let mut mul = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            let da = deg(a);
            for (j, b) in exps.iter().enumerate() {
                if da + deg(b) > order {
                    continue;
                }
                let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                mul.push((i as u32, j as u32, index[&s] as u32));
            }
        }
        let mut parent = vec![(0u32, 0u32); exps.len()];
        for (i, e) in exps.iter().enumerate().skip(1) {
            let v = e.iter().position(|&x| x > 0).unwrap();
            let mut p = e.clone();
            p[v] -= 1;
            parent[i] = (index[&p] as u32, v as u32);
        }
        let mut factorial = vec![1.0; order + 2];
        for k in 1..factorial.len() {
            factorial[k] = factorial[k - 1] * k as f64;
        }
        let mut degree_end = vec![0; order + 1];
        for (i, e) in exps.iter().enumerate() {
            degree_end[deg(e)] = i + 1;
        }
        MonomialBasis { nvars, order, exps, index, mul, parent, factorial, degree_end }
    }

    /// Shared basis for `(nvars, order)`.
    pub fn get(nvars: usize, order: usize) -> Arc<MonomialBasis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<MonomialBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut g = cache.lock().unwrap_or_else(|e| e.into_inner());
        g.entry((nvars, order)).or_insert_with(|| Arc::new(MonomialBasis::build(nvars, order))).clone()
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exps[i]
    }

    pub fn index_of(&self, e: &[u8]) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Number of monomials of degree ≤ `k`.
    pub fn len_to_degree(&self, k: usize) -> usize {
        self.degree_end[k.min(self.order)]
    }
}

/// Truncated Taylor expansion `Σ c_α h^α` about a point.
#[derive(Debug, Clone)]
pub struct Taylor {
    basis: Arc<MonomialBasis>,
    c: Vec<f64>,
}

impl PartialEq for Taylor {
    fn eq(&self, o: &Self) -> bool {
        self.basis.nvars == o.basis.nvars && self.basis.order == o.basis.order && self.c == o.c
    }
}

impl Taylor {
    pub fn constant(nvars: usize, order: usize, v: f64) -> Taylor {
        let basis = MonomialBasis::get(nvars, order);
        let mut c = vec![0.0; basis.len()];
        c[0] = v;
        Taylor { basis, c }
    }

    /// The coordinate function `x_i` expanded about `x0`.
    pub fn var(nvars: usize, order: usize, i: usize, x0: f64) -> Taylor {
        let mut t = Taylor::constant(nvars, order, x0);
        if order > 0 {
            let mut e = vec![0u8; nvars];
            e[i] = 1;
            let k = t.basis.index_of(&e).unwrap();
            t.c[k] = 1.0;
        }
        t
    }

    /// Seeds all coordinate functions at `point`.
    pub fn seed(point: &[f64], order: usize) -> Vec<Taylor> {
        (0..point.len()).map(|i| Taylor::var(point.len(), order, i, point[i])).collect()
    }

    pub fn from_coeffs(nvars: usize, order: usize, c: Vec<f64>) -> Taylor {
        let basis = MonomialBasis::get(nvars, order);
        assert_eq!(c.len(), basis.len());
        Taylor { basis, c }
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn nvars(&self) -> usize {
        self.basis.nvars
    }

    pub fn order(&self) -> usize {
        self.basis.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Partial derivative `∂^α` at the expansion point.
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        match self.basis.index_of(alpha) {
            Some(i) => {
                let f: f64 = alpha.iter().map(|&a| self.basis.factorial[a as usize]).product();
                self.c[i] * f
            }
            None => 0.0,
        }
    }

    /// First partial `∂_i` at the expansion point.
    pub fn d1(&self, i: usize) -> f64 {
        if self.order() == 0 {
            return 0.0;
        }
        let mut e = vec![0u8; self.nvars()];
        e[i] = 1;
        self.c[self.basis.index_of(&e).unwrap()]
    }

    /// Keeps terms of degree ≤ `k`.
    pub fn truncate(&self, k: usize) -> Taylor {
        if k >= self.order() {
            return self.clone();
        }
        let basis = MonomialBasis::get(self.nvars(), k);
        Taylor { c: self.c[..basis.len()].to_vec(), basis }
    }

    /// Jet of `∂_v f`, one order lower.
    pub fn derivative(&self, v: usize) -> Taylor {
        assert!(self.order() > 0, "derivative of an order-0 jet");
        let basis = MonomialBasis::get(self.nvars(), self.order() - 1);
        let mut c = vec![0.0; basis.len()];
        let mut e = vec![0u8; self.nvars()];
        for (i, ci) in c.iter_mut().enumerate() {
            e.copy_from_slice(basis.exponents(i));
            e[v] += 1;
            let k = e[v] as f64;
            *ci = k * self.c[self.basis.index_of(&e).unwrap()];
        }
        Taylor { basis, c }
    }

    /// `self ∘ (inner_1, …, inner_m)`; `self` must be expanded about the values of `inner`.
    pub fn compose(&self, inner: &[Taylor]) -> Taylor {
        assert_eq!(inner.len(), self.nvars(), "one inner jet per variable");
        assert!(!inner.is_empty() || self.nvars() == 0);
        let (n, k) = match inner.first() {
            Some(t) => (t.nvars(), t.order()),
            None => return self.clone(),
        };
        let hs: Vec<Taylor> = inner
            .iter()
            .map(|t| {
                let mut h = t.clone();
                h.c[0] = 0.0;
                h
            })
            .collect();
        let upto = self.basis.len_to_degree(k);
        let mut pows: Vec<Taylor> = Vec::with_capacity(upto);
        let mut out = Taylor::constant(n, k, 0.0);
        for a in 0..upto {
            let p = if a == 0 {
                Taylor::constant(n, k, 1.0)
            } else {
                let (par, v) = self.basis.parent[a];
                pows[par as usize].times(&hs[v as usize])
            };
            if self.c[a] != 0.0 {
                for (o, x) in out.c.iter_mut().zip(&p.c) {
                    *o += self.c[a] * x;
                }
            }
            pows.push(p);
        }
        out
    }

    /// Expansion in the first `nvars` variables of a larger variable set (e.g. adding a coordinate).
    pub fn extend_vars(&self, nvars: usize, map: &[usize]) -> Taylor {
        assert_eq!(map.len(), self.nvars());
        let basis = MonomialBasis::get(nvars, self.order());
        let mut c = vec![0.0; basis.len()];
        let mut e = vec![0u8; nvars];
        for (i, ci) in self.c.iter().enumerate() {
            e.iter_mut().for_each(|x| *x = 0);
            for (j, &x) in self.basis.exponents(i).iter().enumerate() {
                e[map[j]] += x;
            }
            c[basis.index_of(&e).unwrap()] += ci;
        }
        Taylor { basis, c }
    }

    /// Restriction to the slice where every variable outside `keep` stays at its expansion value.
    pub fn restrict(&self, keep: &[usize]) -> Taylor {
        let basis = MonomialBasis::get(keep.len(), self.order());
        let mut c = vec![0.0; basis.len()];
        let mut e = vec![0u8; self.nvars()];
        for (i, ci) in c.iter_mut().enumerate() {
            e.iter_mut().for_each(|x| *x = 0);
            for (j, &x) in basis.exponents(i).iter().enumerate() {
                e[keep[j]] = x;
            }
            *ci = self.c[self.basis.index_of(&e).unwrap()];
        }
        Taylor { basis, c }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn binop(&self, o: &Taylor, f: impl Fn(f64, f64) -> f64) -> Taylor {
        debug_assert_eq!(self.nvars(), o.nvars());
        if self.order() == o.order() {
            Taylor { basis: self.basis.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| f(*a, *b)).collect() }
        } else {
            let k = self.order().min(o.order());
            self.truncate(k).binop(&o.truncate(k), f)
        }
    }
}

impl Scalar for Taylor {
    fn re(&self) -> f64 {
        self.c[0]
    }
    fn constant_like(&self, v: f64) -> Self {
        let mut c = vec![0.0; self.c.len()];
        c[0] = v;
        Taylor { basis: self.basis.clone(), c }
    }
    fn plus(&self, o: &Self) -> Self {
        self.binop(o, |a, b| a + b)
    }
    fn minus(&self, o: &Self) -> Self {
        self.binop(o, |a, b| a - b)
    }
    fn times(&self, o: &Self) -> Self {
        if self.order() != o.order() {
            let k = self.order().min(o.order());
            return self.truncate(k).times(&o.truncate(k));
        }
        let mut c = vec![0.0; self.c.len()];
        for &(i, j, k) in &self.basis.mul {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Taylor { basis: self.basis.clone(), c }
    }
    fn negate(&self) -> Self {
        Taylor { basis: self.basis.clone(), c: self.c.iter().map(|a| -a).collect() }
    }
    fn scale(&self, s: f64) -> Self {
        Taylor { basis: self.basis.clone(), c: self.c.iter().map(|a| a * s).collect() }
    }
    fn lift(&self, d: &dyn Fn(usize, f64) -> f64, shift: usize) -> Self {
        let x0 = self.c[0];
        let k = self.order();
        let mut h = self.clone();
        h.c[0] = 0.0;
        let f = &self.basis.factorial;
        let mut r = self.constant_like(d(shift + k, x0) / f[k]);
        for m in (0..k).rev() {
            r = r.times(&h);
            r.c[0] += d(shift + m, x0) / f[m];
        }
        r
    }
    fn all_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }
}
