use super::ast::{Expr, Func, Node};
use super::scalar::{Dual, Scalar};
use super::taylor::Taylor;
use crate::error::{Error, Result};

/// Value, gradient and Hessian of an expression at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

const BUMP: [f64; 6] = [1.0, 0.0, 0.0, -10.0, 15.0, -6.0];

/// `m`-th derivative in `r` of the bump transition polynomial.
fn bump_derivative(m: usize, r: f64, r0: f64, r1: f64) -> f64 {
    let w = r1 - r0;
    if r <= r0 || r >= r1 {
        return if m == 0 && r <= r0 { 1.0 } else { 0.0 };
    }
    let t = (r - r0) / w;
    let mut s = 0.0;
    for (k, &a) in BUMP.iter().enumerate().skip(m) {
        let mut fall = 1.0;
        for j in 0..m {
            fall *= (k - j) as f64;
        }
        s += a * fall * t.powi((k - m) as i32);
    }
    s / w.powi(m as i32)
}

fn falling_pow(p: f64, m: usize, x: f64) -> f64 {
    let mut c = 1.0;
    for j in 0..m {
        c *= p - j as f64;
    }
    if c == 0.0 {
        0.0
    } else {
        c * x.powf(p - m as f64)
    }
}

fn powi<S: Scalar>(b: &S, n: i64) -> Result<S> {
    if n < 0 {
        if b.re() == 0.0 {
            return Err(Error::Domain("division by zero in negative power".into()));
        }
        return Ok(powi(b, -n)?.recip());
    }
    let mut acc = b.constant_like(1.0);
    let mut base = b.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.times(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.times(&base);
        }
    }
    Ok(acc)
}

fn eval_node<S: Scalar>(n: &Node, vars: &[S], proto: &S) -> Result<S> {
    Ok(match n {
        Node::Num(v) => proto.constant_like(*v),
        Node::Var(i) => vars[*i].clone(),
        Node::Neg(a) => eval_node(a, vars, proto)?.negate(),
        Node::Add(a, b) => eval_node(a, vars, proto)?.plus(&eval_node(b, vars, proto)?),
        Node::Sub(a, b) => eval_node(a, vars, proto)?.minus(&eval_node(b, vars, proto)?),
        Node::Mul(a, b) => eval_node(a, vars, proto)?.times(&eval_node(b, vars, proto)?),
        Node::Div(a, b) => {
            let d = eval_node(b, vars, proto)?;
            if d.re() == 0.0 {
                return Err(Error::Domain("division by zero".into()));
            }
            eval_node(a, vars, proto)?.over(&d)
        }
        Node::Pow(a, b) => {
            let base = eval_node(a, vars, proto)?;
            if let Some(p) = const_value(b) {
                if p.fract() == 0.0 && p.abs() <= 1024.0 {
                    return powi(&base, p as i64);
                }
                if base.re() < 0.0 {
                    return Err(Error::Domain(format!("non-integer power of negative base {}", base.re())));
                }
                base.lift(&move |m, x| falling_pow(p, m, x), 0)
            } else {
                let e = eval_node(b, vars, proto)?;
                if base.re() <= 0.0 {
                    return Err(Error::Domain(format!("variable power of non-positive base {}", base.re())));
                }
                e.times(&base.lift(&log_derivative, 0)).lift(&|_, x| x.exp(), 0)
            }
        }
        Node::Call(f, a) => {
            let x = eval_node(a, vars, proto)?;
            match f {
                Func::Sin => x.lift(&sin_derivative, 0),
                Func::Cos => x.lift(&cos_derivative, 0),
                Func::Tan => {
                    let c = x.lift(&cos_derivative, 0);
                    if c.re() == 0.0 {
                        return Err(Error::Domain("tan at a pole".into()));
                    }
                    x.lift(&sin_derivative, 0).over(&c)
                }
                Func::Exp => x.lift(&|_, v| v.exp(), 0),
                Func::Log => {
                    if x.re() <= 0.0 {
                        return Err(Error::Domain(format!("log of non-positive value {}", x.re())));
                    }
                    x.lift(&log_derivative, 0)
                }
                Func::Sqrt => {
                    if x.re() < 0.0 {
                        return Err(Error::Domain(format!("sqrt of negative value {}", x.re())));
                    }
                    x.lift(&|m, v| falling_pow(0.5, m, v), 0)
                }
                Func::Abs => {
                    if x.re() < 0.0 {
                        x.negate()
                    } else {
                        x
                    }
                }
            }
        }
        Node::Bump { arg, r0, r1 } => {
            let x = eval_node(arg, vars, proto)?;
            let (r0, r1) = (*r0, *r1);
            x.lift(&move |m, r| bump_derivative(m, r, r0, r1), 0)
        }
    })
}

fn const_value(n: &Node) -> Option<f64> {
    match n {
        Node::Num(v) => Some(*v),
        Node::Var(_) => None,
        _ => {
            let mut v = Vec::new();
            n.collect_vars(&mut v);
            if v.is_empty() {
                eval_node(n, &[], &0.0f64).ok()
            } else {
                None
            }
        }
    }
}

fn sin_derivative(m: usize, x: f64) -> f64 {
    match m % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

fn cos_derivative(m: usize, x: f64) -> f64 {
    sin_derivative(m + 1, x)
}

pub(crate) fn log_derivative(m: usize, x: f64) -> f64 {
    if m == 0 {
        return x.ln();
    }
    let mut c = if m % 2 == 1 { 1.0 } else { -1.0 };
    for k in 1..m {
        c *= k as f64;
    }
    c / x.powi(m as i32)
}

impl Expr {
    /// Evaluates over any [`Scalar`]; `proto` fixes the shape of constants.
    pub fn eval_scalar<S: Scalar>(&self, vars: &[S], proto: &S) -> Result<S> {
        if vars.len() != self.coords.len() {
            return Err(Error::DimensionMismatch { expected: self.coords.len(), got: vars.len() });
        }
        let v = eval_node(&self.root, vars, proto)?;
        if !v.all_finite() {
            return Err(Error::Domain("non-finite result".into()));
        }
        Ok(v)
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        self.eval_scalar(point, &0.0)
    }

    /// Taylor jet of order `order` at `point`.
    pub fn eval_taylor(&self, point: &[f64], order: usize) -> Result<Taylor> {
        let proto = Taylor::constant(point.len(), order, 0.0);
        self.eval_scalar(&Taylor::seed(point, order), &proto)
    }

    /// Evaluates with jets supplied by the caller (composition with an inner map).
    pub fn eval_with_jets(&self, vars: &[Taylor], proto: &Taylor) -> Result<Taylor> {
        self.eval_scalar(vars, proto)
    }
}

/// Value, all first and all second partials by nested forward-mode dual numbers.
pub fn eval_jet2(e: &Expr, point: &[f64]) -> Result<Jet2> {
    let n = e.coords.len();
    if point.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: point.len() });
    }
    let inner = |x: f64, i: Option<usize>| {
        let mut d = vec![0.0; n];
        if let Some(i) = i {
            d[i] = 1.0;
        }
        Dual::new(x, d)
    };
    let vars: Vec<Dual<Dual<f64>>> = (0..n)
        .map(|i| {
            let mut d = vec![inner(0.0, None); n];
            d[i] = inner(1.0, None);
            Dual::new(inner(point[i], Some(i)), d)
        })
        .collect();
    let proto = Dual::new(inner(0.0, None), vec![inner(0.0, None); n]);
    let r = e.eval_scalar(&vars, &proto)?;
    let grad = r.v.d.clone();
    let mut hess: Vec<Vec<f64>> = r.d.iter().map(|di| di.d.clone()).collect();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (hess[i][j] + hess[j][i]);
            hess[i][j] = s;
            hess[j][i] = s;
        }
    }
    Ok(Jet2 { value: r.v.v, grad, hess })
}
