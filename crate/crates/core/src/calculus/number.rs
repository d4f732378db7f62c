//! Forward-mode numbers: first-order duals and second-order jets over a
//! complex scalar, nestable for higher orders.
//!
//! Variables on holomorphic charts are seeded as independent `z` and `z̄`
//! (Wirtinger convention). `conj`, `re` and `im` act componentwise and are
//! only meaningful when every seed is real (real charts).

use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub type Scalar = Complex64;

pub const I: Scalar = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64) -> Scalar {
    Complex64::new(re, 0.0)
}

pub trait Number:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + Mul<Scalar, Output = Self>
{
    fn cst(c: Scalar) -> Self;
    fn value(&self) -> Scalar;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn recip(self) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn conj(self) -> Self;
    fn tanh(self) -> Self;

    #[inline]
    fn zero() -> Self {
        Self::cst(c(0.0))
    }
    #[inline]
    fn one() -> Self {
        Self::cst(c(1.0))
    }
    #[inline]
    fn re_(x: f64) -> Self {
        Self::cst(c(x))
    }
    #[inline]
    fn re(self) -> Self {
        (self + self.conj()) * 0.5
    }
    #[inline]
    fn im(self) -> Self {
        (self - self.conj()) * Scalar::new(0.0, -0.5)
    }
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut acc = Self::one();
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    }
    #[inline]
    fn sq(self) -> Self {
        self * self
    }
    /// `|z|²` for a real-seeded number.
    #[inline]
    fn norm_sqr(self) -> Self {
        self * self.conj()
    }
}

impl Number for Scalar {
    #[inline]
    fn cst(c: Scalar) -> Self {
        c
    }
    #[inline]
    fn value(&self) -> Scalar {
        *self
    }
    #[inline]
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    #[inline]
    fn recip(self) -> Self {
        Complex64::new(1.0, 0.0) / self
    }
    #[inline]
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    #[inline]
    fn powf(self, p: f64) -> Self {
        if self.im == 0.0 && self.re > 0.0 {
            c(self.re.powf(p))
        } else {
            Complex64::powf(self, p)
        }
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn tanh(self) -> Self {
        Complex64::tanh(self)
    }
}

/// First-order forward number with `N` independent directions.
#[derive(Clone, Copy, Debug)]
pub struct Dual<T, const N: usize> {
    pub v: T,
    pub d: [T; N],
}

impl<T: Number, const N: usize> Dual<T, N> {
    pub fn constant(v: T) -> Self {
        Dual { v, d: [T::zero(); N] }
    }
    pub fn var(v: T, i: usize) -> Self {
        let mut d = [T::zero(); N];
        d[i] = T::one();
        Dual { v, d }
    }
    /// Applies a unary function given its value and first derivative at `v`.
    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Dual { v: f, d: self.d.map(|x| x * df) }
    }
}

/// Seeds `x` as the `N` independent directions of a dual vector.
pub fn seed_dual<T: Number, const N: usize>(x: &[T; N]) -> [Dual<T, N>; N] {
    std::array::from_fn(|i| Dual::var(x[i], i))
}

impl<T: Number, const N: usize> Add for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual { v: self.v + o.v, d: std::array::from_fn(|i| self.d[i] + o.d[i]) }
    }
}
impl<T: Number, const N: usize> Sub for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual { v: self.v - o.v, d: std::array::from_fn(|i| self.d[i] - o.d[i]) }
    }
}
impl<T: Number, const N: usize> Mul for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual {
            v: self.v * o.v,
            d: std::array::from_fn(|i| self.d[i] * o.v + self.v * o.d[i]),
        }
    }
}
impl<T: Number, const N: usize> Div for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}
impl<T: Number, const N: usize> Neg for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual { v: -self.v, d: self.d.map(|x| -x) }
    }
}
impl<T: Number, const N: usize> Add<f64> for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: f64) -> Self {
        self.v = self.v + o;
        self
    }
}
impl<T: Number, const N: usize> Sub<f64> for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: f64) -> Self {
        self.v = self.v - o;
        self
    }
}
impl<T: Number, const N: usize> Mul<f64> for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        Dual { v: self.v * o, d: self.d.map(|x| x * o) }
    }
}
impl<T: Number, const N: usize> Div<f64> for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}
impl<T: Number, const N: usize> Mul<Scalar> for Dual<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Scalar) -> Self {
        Dual { v: self.v * o, d: self.d.map(|x| x * o) }
    }
}
impl<T: Number, const N: usize> AddAssign for Dual<T, N> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}
impl<T: Number, const N: usize> SubAssign for Dual<T, N> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}
impl<T: Number, const N: usize> MulAssign for Dual<T, N> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Number, const N: usize> Number for Dual<T, N> {
    #[inline]
    fn cst(c: Scalar) -> Self {
        Dual::constant(T::cst(c))
    }
    #[inline]
    fn value(&self) -> Scalar {
        self.v.value()
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), self.v.recip())
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        self.chain(r, -(r * r))
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, s.recip() * 0.5)
    }
    fn powf(self, p: f64) -> Self {
        let pm = self.v.powf(p - 1.0);
        self.chain(pm * self.v, pm * p)
    }
    fn conj(self) -> Self {
        Dual { v: self.v.conj(), d: self.d.map(|x| x.conj()) }
    }
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        self.chain(t, T::one() - t * t)
    }
}

/// Second-order forward number: value, gradient and full symmetric Hessian
/// with respect to `N` independent directions.
#[derive(Clone, Copy, Debug)]
pub struct Jet<T, const N: usize> {
    pub v: T,
    pub g: [T; N],
    pub h: [[T; N]; N],
}

impl<T: Number, const N: usize> Jet<T, N> {
    pub fn constant(v: T) -> Self {
        Jet { v, g: [T::zero(); N], h: [[T::zero(); N]; N] }
    }
    pub fn var(v: T, i: usize) -> Self {
        let mut j = Self::constant(v);
        j.g[i] = T::one();
        j
    }
    /// Applies a unary function given `f`, `f'`, `f''` at the value.
    #[inline]
    fn chain(self, f: T, df: T, ddf: T) -> Self {
        Jet {
            v: f,
            g: self.g.map(|x| x * df),
            h: std::array::from_fn(|i| {
                std::array::from_fn(|j| self.h[i][j] * df + self.g[i] * self.g[j] * ddf)
            }),
        }
    }
    fn map_lin(self, f: impl Fn(T) -> T) -> Self {
        Jet { v: f(self.v), g: self.g.map(&f), h: self.h.map(|r| r.map(&f)) }
    }
}

pub fn seed_jet<T: Number, const N: usize>(x: &[T; N]) -> [Jet<T, N>; N] {
    std::array::from_fn(|i| Jet::var(x[i], i))
}

impl<T: Number, const N: usize> Add for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Jet {
            v: self.v + o.v,
            g: std::array::from_fn(|i| self.g[i] + o.g[i]),
            h: std::array::from_fn(|i| std::array::from_fn(|j| self.h[i][j] + o.h[i][j])),
        }
    }
}
impl<T: Number, const N: usize> Sub for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Jet {
            v: self.v - o.v,
            g: std::array::from_fn(|i| self.g[i] - o.g[i]),
            h: std::array::from_fn(|i| std::array::from_fn(|j| self.h[i][j] - o.h[i][j])),
        }
    }
}
impl<T: Number, const N: usize> Mul for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Jet {
            v: self.v * o.v,
            g: std::array::from_fn(|i| self.g[i] * o.v + self.v * o.g[i]),
            h: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    self.h[i][j] * o.v
                        + self.v * o.h[i][j]
                        + self.g[i] * o.g[j]
                        + self.g[j] * o.g[i]
                })
            }),
        }
    }
}
impl<T: Number, const N: usize> Div for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}
impl<T: Number, const N: usize> Neg for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.map_lin(|x| -x)
    }
}
impl<T: Number, const N: usize> Add<f64> for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: f64) -> Self {
        self.v = self.v + o;
        self
    }
}
impl<T: Number, const N: usize> Sub<f64> for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: f64) -> Self {
        self.v = self.v - o;
        self
    }
}
impl<T: Number, const N: usize> Mul<f64> for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        self.map_lin(|x| x * o)
    }
}
impl<T: Number, const N: usize> Div<f64> for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}
impl<T: Number, const N: usize> Mul<Scalar> for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Scalar) -> Self {
        self.map_lin(|x| x * o)
    }
}
impl<T: Number, const N: usize> AddAssign for Jet<T, N> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}
impl<T: Number, const N: usize> SubAssign for Jet<T, N> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}
impl<T: Number, const N: usize> MulAssign for Jet<T, N> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Number, const N: usize> Number for Jet<T, N> {
    #[inline]
    fn cst(c: Scalar) -> Self {
        Jet::constant(T::cst(c))
    }
    #[inline]
    fn value(&self) -> Scalar {
        self.v.value()
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = self.v.recip();
        self.chain(self.v.ln(), r, -(r * r))
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        let r2 = r * r;
        self.chain(r, -r2, r2 * r * 2.0)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let ds = s.recip() * 0.5;
        self.chain(s, ds, -(ds / self.v) * 0.5)
    }
    fn powf(self, p: f64) -> Self {
        let pm2 = self.v.powf(p - 2.0);
        let pm1 = pm2 * self.v;
        self.chain(pm1 * self.v, pm1 * p, pm2 * (p * (p - 1.0)))
    }
    fn conj(self) -> Self {
        self.map_lin(|x| x.conj())
    }
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        let d = T::one() - t * t;
        self.chain(t, d, -(t * d) * 2.0)
    }
}

/// Dispatches a runtime dimension onto a const generic `N` in `1..=12`.
///
/// ```ignore
/// with_dim!(n, N => work::<N>(x), Err(GeoError::UnsupportedN(n)))
/// ```
#[macro_export]
macro_rules! with_dim {
    ($n:expr, $N:ident => $body:expr, $fallback:expr) => {
        match $n {
            1 => { const $N: usize = 1; $body }
            2 => { const $N: usize = 2; $body }
            3 => { const $N: usize = 3; $body }
            4 => { const $N: usize = 4; $body }
            5 => { const $N: usize = 5; $body }
            6 => { const $N: usize = 6; $body }
            8 => { const $N: usize = 8; $body }
            10 => { const $N: usize = 10; $body }
            11 => { const $N: usize = 11; $body }
            _ => $fallback,
        }
    };
}

/// Copies a slice into a fixed array, lifting scalars to `T`.
pub fn lift<T: Number, const N: usize>(x: &[Scalar]) -> [T; N] {
    std::array::from_fn(|i| T::cst(x[i]))
}
