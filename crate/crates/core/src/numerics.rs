//! Small numerical kernels: pivoted LU over any scalar, RK4, quadrature rules, Richardson.

use crate::error::{Error, Result};
use crate::exprlang::Scalar;

/// Solves `a x = b` for each column of `b` by LU with partial pivoting on the real parts.
pub fn lu_solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<Vec<S>>) -> Result<Vec<Vec<S>>> {
    let n = a.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.re().abs()));
    if scale == 0.0 {
        return Err(Error::Singular);
    }
    for col in 0..n {
        let (piv, pv) = (col..n)
            .map(|r| (r, a[r][col].re().abs()))
            .fold((col, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if pv <= 1e-13 * scale {
            return Err(Error::Singular);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for r in col + 1..n {
            let f = a[r][col].times(&inv);
            for c in col..n {
                let t = f.times(&a[col][c]);
                a[r][c] = a[r][c].minus(&t);
            }
            for c in 0..b[r].len() {
                let t = f.times(&b[col][c]);
                b[r][c] = b[r][c].minus(&t);
            }
        }
    }
    let m = b.first().map_or(0, |r| r.len());
    let mut x = b.clone();
    for r in (0..n).rev() {
        let inv = a[r][r].recip();
        for c in 0..m {
            let mut s = b[r][c].clone();
            for k in r + 1..n {
                s = s.minus(&a[r][k].times(&x[k][c]));
            }
            x[r][c] = s.times(&inv);
        }
    }
    Ok(x)
}

/// Determinant of a real square matrix.
pub fn det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    d
}

/// One classical fourth-order Runge–Kutta step of `y' = f(t, y)`.
pub fn rk4_step<F>(f: &F, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let axpy = |a: &[f64], k: &[f64], s: f64| a.iter().zip(k).map(|(x, d)| x + s * d).collect::<Vec<_>>();
    let k1 = f(t, y)?;
    let k2 = f(t + h / 2.0, &axpy(y, &k1, h / 2.0))?;
    let k3 = f(t + h / 2.0, &axpy(y, &k2, h / 2.0))?;
    let k4 = f(t + h, &axpy(y, &k3, h))?;
    Ok((0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}

/// Composite Simpson weights for `n` uniform intervals of width `h`; odd `n` closes with the 3/8 rule.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2);
    let mut w = vec![0.0; n + 1];
    let even = if n % 2 == 0 { n } else { n - 3 };
    for i in (0..even).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if n % 2 == 1 {
        let s = 3.0 * h / 8.0;
        w[even] += s;
        w[even + 1] += 3.0 * s;
        w[even + 2] += 3.0 * s;
        w[even + 3] += s;
    }
    w
}

pub fn simpson(values: &[f64], h: f64) -> f64 {
    let w = simpson_weights(values.len() - 1, h);
    values.iter().zip(&w).map(|(v, w)| v * w).sum()
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Richardson tableau for samples `f(h_k)` with `h_k = h_0 / 2^k`, assuming an error series in
/// integer powers of `h`. Returns the extrapolated value and an error estimate.
pub fn richardson(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    assert!(n >= 2);
    let mut t: Vec<Vec<f64>> = vec![samples.to_vec()];
    for j in 1..n {
        let prev = &t[j - 1];
        let f = 2f64.powi(j as i32);
        let row: Vec<f64> = (1..prev.len()).map(|i| (f * prev[i] - prev[i - 1]) / (f - 1.0)).collect();
        t.push(row);
    }
    let mut best = (samples[n - 1], (samples[n - 1] - samples[n - 2]).abs());
    for j in 1..n {
        let row = &t[j];
        let prev = &t[j - 1];
        let v = row[row.len() - 1];
        let e = (v - prev[prev.len() - 1]).abs().max(if row.len() > 1 { (v - row[row.len() - 2]).abs() } else { 0.0 });
        if e < best.1 {
            best = (v, e);
        }
    }
    best
}


/// Running integral `∫_0^{t_k} f` on a uniform grid with fourth-order local weights.
pub fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len() - 1;
    let mut out = vec![0.0; n + 1];
    if n < 3 {
        for k in 0..n {
            out[k + 1] = out[k] + 0.5 * h * (values[k] + values[k + 1]);
        }
        return out;
    }
    let f = values;
    for k in 0..n {
        let piece = if k == 0 {
            9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
        } else if k == n - 1 {
            f[n - 3] - 5.0 * f[n - 2] + 19.0 * f[n - 1] + 9.0 * f[n]
        } else {
            -f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]
        };
        out[k + 1] = out[k] + h * piece / 24.0;
    }
    out
}
