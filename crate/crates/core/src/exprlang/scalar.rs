/// Arithmetic needed to evaluate an [`Expr`](super::Expr): f64 values, dual numbers and Taylor jets.
///
/// Smooth univariate functions enter through [`Scalar::lift`], which receives the derivative
/// table of the function. `d(m, x)` must return the `m`-th derivative at `x`.
pub trait Scalar: Clone {
    /// Real part (the value at the expansion point).
    fn re(&self) -> f64;
    /// A constant with the same shape as `self`.
    fn constant_like(&self, c: f64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn scale(&self, c: f64) -> Self;
    /// Applies the function whose `(m + shift)`-th derivative at `x` is `d(m + shift, x)`.
    fn lift(&self, d: &dyn Fn(usize, f64) -> f64, shift: usize) -> Self;
    fn all_finite(&self) -> bool;

    fn recip(&self) -> Self {
        self.lift(&recip_derivative, 0)
    }

    fn over(&self, o: &Self) -> Self {
        self.times(&o.recip())
    }
}

pub(crate) fn recip_derivative(m: usize, x: f64) -> f64 {
    let mut c = if m % 2 == 0 { 1.0 } else { -1.0 };
    for k in 1..=m {
        c *= k as f64;
    }
    c / x.powi(m as i32 + 1)
}

impl Scalar for f64 {
    fn re(&self) -> f64 {
        *self
    }
    fn constant_like(&self, c: f64) -> Self {
        c
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn lift(&self, d: &dyn Fn(usize, f64) -> f64, shift: usize) -> Self {
        d(shift, *self)
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
}

/// Forward-mode dual number with a vector of tangents over an inner scalar.
///
/// Nesting `Dual<Dual<f64>>` yields exact second derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: Vec<T>,
}

impl<T: Scalar> Dual<T> {
    pub fn new(v: T, d: Vec<T>) -> Self {
        Dual { v, d }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn constant_like(&self, c: f64) -> Self {
        let z = self.v.constant_like(0.0);
        Dual { v: self.v.constant_like(c), d: vec![z; self.d.len()] }
    }
    fn plus(&self, o: &Self) -> Self {
        Dual { v: self.v.plus(&o.v), d: self.d.iter().zip(&o.d).map(|(a, b)| a.plus(b)).collect() }
    }
    fn minus(&self, o: &Self) -> Self {
        Dual { v: self.v.minus(&o.v), d: self.d.iter().zip(&o.d).map(|(a, b)| a.minus(b)).collect() }
    }
    fn times(&self, o: &Self) -> Self {
        Dual {
            v: self.v.times(&o.v),
            d: self.d.iter().zip(&o.d).map(|(a, b)| a.times(&o.v).plus(&self.v.times(b))).collect(),
        }
    }
    fn negate(&self) -> Self {
        Dual { v: self.v.negate(), d: self.d.iter().map(|a| a.negate()).collect() }
    }
    fn scale(&self, c: f64) -> Self {
        Dual { v: self.v.scale(c), d: self.d.iter().map(|a| a.scale(c)).collect() }
    }
    fn lift(&self, d: &dyn Fn(usize, f64) -> f64, shift: usize) -> Self {
        let fp = self.v.lift(d, shift + 1);
        Dual { v: self.v.lift(d, shift), d: self.d.iter().map(|a| a.times(&fp)).collect() }
    }
    fn all_finite(&self) -> bool {
        self.v.all_finite() && self.d.iter().all(|a| a.all_finite())
    }
}
