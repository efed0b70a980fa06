use super::combin::{left_sign, right_sign, wedge_sign, Combos};
use super::field::{same_chart, JetField, Kind, TensorField};
use crate::error::{Error, Result};
use crate::exprlang::{Scalar, Taylor};

/// Grassmann product of component arrays of degrees `pa` and `pb` in `n` generators.
pub(crate) fn grassmann_mul(n: usize, pa: usize, a: &[Taylor], pb: usize, b: &[Taylor], out: &mut [Taylor]) {
    let (ca, cb, cc) = (Combos::get(n, pa), Combos::get(n, pb), Combos::get(n, pa + pb));
    for (i, &ma) in ca.masks().iter().enumerate() {
        if a[i].max_abs() == 0.0 {
            continue;
        }
        for (j, &mb) in cb.masks().iter().enumerate() {
            if let Some(s) = wedge_sign(ma, mb) {
                let k = cc.index(ma | mb).unwrap();
                let t = a[i].times(&b[j]);
                out[k] = if s > 0.0 { out[k].plus(&t) } else { out[k].minus(&t) };
            }
        }
    }
}

fn zeros(n: usize, order: usize, len: usize) -> Vec<Taylor> {
    vec![Taylor::constant(n, order, 0.0); len]
}

/// `A ∧ B`. A degree-0 operand may be of either kind.
pub fn wedge(a: &TensorField, b: &TensorField) -> Result<TensorField> {
    same_chart(a.chart(), b.chart())?;
    if a.kind() != b.kind() && a.degree() > 0 && b.degree() > 0 {
        return Err(Error::DegreeMismatch("wedge of a multivector with a form".into()));
    }
    let n = a.dim();
    let (pa, pb) = (a.degree(), b.degree());
    if pa + pb > n {
        return Err(Error::DegreeOverflow(format!("{pa} + {pb} > {n}")));
    }
    let kind = if pa > 0 { a.kind() } else { b.kind() };
    let len = Combos::get(n, pa + pb).len();
    let (fa, fb) = (a.comps().clone(), b.comps().clone());
    let comps = JetField::new(a.chart().clone(), len, move |p, k| {
        let (x, y) = (fa.jets(p, k)?, fb.jets(p, k)?);
        let mut out = zeros(n, k, len);
        grassmann_mul(n, pa, &x, pb, &y, &mut out);
        Ok(out)
    });
    TensorField::from_jets(kind, pa + pb, comps)
}

/// Interior product: a vector into a form, or a 1-form into a multivector, contracting the first slot.
pub fn interior(v: &TensorField, a: &TensorField) -> Result<TensorField> {
    same_chart(v.chart(), a.chart())?;
    if v.degree() != 1 {
        return Err(Error::DegreeMismatch(format!("contracting field has degree {}", v.degree())));
    }
    if a.degree() == 0 {
        return Err(Error::DegreeUnderflow("interior product of a function".into()));
    }
    if v.kind() == a.kind() {
        return Err(Error::DegreeMismatch("interior product needs a vector and a form".into()));
    }
    let n = a.dim();
    let p = a.degree();
    let (src, dst) = (Combos::get(n, p), Combos::get(n, p - 1));
    let len = dst.len();
    let (fv, fa) = (v.comps().clone(), a.comps().clone());
    let comps = JetField::new(a.chart().clone(), len, move |pt, k| {
        let (x, y) = (fv.jets(pt, k)?, fa.jets(pt, k)?);
        let mut out = zeros(n, k, len);
        for (j, &m) in src.masks().iter().enumerate() {
            for i in 0..n {
                if m >> i & 1 == 1 {
                    let d = dst.index(m & !(1 << i)).unwrap();
                    let t = x[i].times(&y[j]).scale(left_sign(m, i));
                    out[d] = out[d].plus(&t);
                }
            }
        }
        Ok(out)
    });
    TensorField::from_jets(a.kind(), p - 1, comps)
}

/// Exterior derivative of a form.
pub fn exterior_derivative(w: &TensorField) -> Result<TensorField> {
    if w.kind() != Kind::Form && w.degree() > 0 {
        return Err(Error::DegreeMismatch("exterior derivative of a multivector".into()));
    }
    let n = w.dim();
    let p = w.degree();
    if p >= n {
        return Err(Error::DegreeOverflow(format!("d of a {p}-form on a {n}-dimensional chart")));
    }
    let (src, dst) = (Combos::get(n, p), Combos::get(n, p + 1));
    let len = dst.len();
    let f = w.comps().clone();
    let comps = JetField::new(w.chart().clone(), len, move |pt, k| {
        let y = f.jets(pt, k + 1)?;
        let mut out = zeros(n, k, len);
        for (j, &m) in src.masks().iter().enumerate() {
            for i in 0..n {
                if m >> i & 1 == 0 {
                    let d = dst.index(m | 1 << i).unwrap();
                    let t = y[j].derivative(i).scale(left_sign(m, i));
                    out[d] = out[d].plus(&t);
                }
            }
        }
        Ok(out)
    });
    TensorField::from_jets(Kind::Form, p + 1, comps)
}

/// Lie derivative along a vector field: Schouten bracket for multivectors, coordinate formula for forms.
pub fn lie_derivative(x: &TensorField, a: &TensorField) -> Result<TensorField> {
    same_chart(x.chart(), a.chart())?;
    if x.kind() != Kind::Multivector || x.degree() != 1 {
        return Err(Error::DegreeMismatch("Lie derivative needs a vector field".into()));
    }
    if a.kind() == Kind::Multivector && a.degree() > 0 {
        return schouten(x, a);
    }
    let n = a.dim();
    let p = a.degree();
    let c = Combos::get(n, p);
    let len = c.len();
    let (fx, fa) = (x.comps().clone(), a.comps().clone());
    let comps = JetField::new(a.chart().clone(), len, move |pt, k| {
        let xs = fx.jets(pt, k + 1)?;
        let ys = fa.jets(pt, k + 1)?;
        let xv: Vec<Taylor> = xs.iter().map(|t| t.truncate(k)).collect();
        let yv: Vec<Taylor> = ys.iter().map(|t| t.truncate(k)).collect();
        let mut out = zeros(n, k, len);
        for (j, &m) in c.masks().iter().enumerate() {
            for i in 0..n {
                out[j] = out[j].plus(&xv[i].times(&ys[j].derivative(i)));
            }
            if yv[j].max_abs() == 0.0 {
                continue;
            }
            for am in 0..n {
                if m >> am & 1 == 0 {
                    continue;
                }
                let rest = m & !(1 << am);
                for jj in 0..n {
                    if rest >> jj & 1 == 1 {
                        continue;
                    }
                    let (lo, hi) = if jj < am { (jj, am) } else { (am, jj) };
                    let between = if hi > lo + 1 { (rest >> (lo + 1)) & ((1u32 << (hi - lo - 1)) - 1) } else { 0 };
                    let s = if between.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    let d = c.index(rest | 1 << jj).unwrap();
                    let t = yv[j].times(&xs[am].derivative(jj)).scale(s);
                    out[d] = out[d].plus(&t);
                }
            }
        }
        Ok(out)
    });
    TensorField::from_jets(a.kind(), p, comps)
}

/// Schouten–Nijenhuis bracket in the superfunction form
/// `[P,Q] = Σ_i ∂_r P/∂ζ_i · ∂_i Q − (−1)^{(p−1)(q−1)} ∂_r Q/∂ζ_i · ∂_i P`.
pub fn schouten(a: &TensorField, b: &TensorField) -> Result<TensorField> {
    same_chart(a.chart(), b.chart())?;
    for f in [a, b] {
        if f.kind() != Kind::Multivector && f.degree() > 0 {
            return Err(Error::DegreeMismatch("Schouten bracket of a form".into()));
        }
    }
    let n = a.dim();
    let (p, q) = (a.degree(), b.degree());
    if p + q == 0 {
        return Err(Error::DegreeUnderflow("bracket of two functions".into()));
    }
    let r = p + q - 1;
    if r > n {
        return Err(Error::DegreeOverflow(format!("bracket degree {r} on a {n}-dimensional chart")));
    }
    let len = Combos::get(n, r).len();
    let sign = if (p as i64 - 1) * (q as i64 - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let (fa, fb) = (a.comps().clone(), b.comps().clone());
    let comps = JetField::new(a.chart().clone(), len, move |pt, k| {
        let (xa, xb) = (fa.jets(pt, k + 1)?, fb.jets(pt, k + 1)?);
        let mut out = zeros(n, k, len);
        half(n, p, &xa, q, &xb, k, 1.0, &mut out);
        half(n, q, &xb, p, &xa, k, -sign, &mut out);
        Ok(out)
    });
    TensorField::from_jets(Kind::Multivector, r, comps)
}

#[allow(clippy::too_many_arguments)]
fn half(n: usize, p: usize, xp: &[Taylor], q: usize, xq: &[Taylor], k: usize, s: f64, out: &mut [Taylor]) {
    if p == 0 {
        return;
    }
    let cp = Combos::get(n, p);
    let cdp = Combos::get(n, p - 1);
    let lp = cdp.len();
    let lq = Combos::get(n, q).len();
    for i in 0..n {
        let mut dp = zeros(n, k, lp);
        let mut any = false;
        for (j, &m) in cp.masks().iter().enumerate() {
            if m >> i & 1 == 1 && xp[j].max_abs() != 0.0 {
                let d = cdp.index(m & !(1 << i)).unwrap();
                dp[d] = xp[j].truncate(k).scale(right_sign(m, i));
                any = true;
            }
        }
        if !any {
            continue;
        }
        let dq: Vec<Taylor> = (0..lq).map(|j| xq[j].derivative(i)).collect();
        let mut tmp = zeros(n, k, out.len());
        grassmann_mul(n, p - 1, &dp, q, &dq, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o = o.plus(&t.scale(s));
        }
    }
}

/// `Λ(α, β) = Λ^{ij} α_i β_j` for a bivector and two 1-forms.
pub fn bivector_pair(l: &TensorField, a: &TensorField, b: &TensorField) -> Result<TensorField> {
    let t = interior(a, l)?;
    let s = interior(b, &t)?;
    Ok(s)
}

/// Largest absolute component over the given points.
pub fn max_abs_over(f: &TensorField, pts: &[Vec<f64>]) -> Result<f64> {
    let mut m: f64 = 0.0;
    for p in pts {
        m = m.max(f.max_abs(p)?);
    }
    Ok(m)
}

/// `A − B` measured at points, componentwise maximum.
pub fn max_diff_over(a: &TensorField, b: &TensorField, pts: &[Vec<f64>]) -> Result<f64> {
    max_abs_over(&a.sub(b)?, pts)
}
