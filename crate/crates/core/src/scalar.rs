//! Scalar abstraction and the handful of special-function recurrences the
//! rest of the crate leans on.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits as nt;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point types the laboratory can run on.
pub trait Real:
    nt::Float
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::NumAssign
    + Default
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    const HALF: Self;
    const TWO: Self;

    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;

    fn of(k: usize) -> Self {
        Self::lit(k as f64)
    }
}

macro_rules! impl_real {
    ($f:ty) => {
        impl Real for $f {
            const HALF: Self = 0.5;
            const TWO: Self = 2.0;

            #[inline]
            fn lit(x: f64) -> Self {
                x as $f
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Rising factorial `(x)_k = x (x+1) ... (x+k-1)`.
pub fn pochhammer<T: Real>(x: T, k: usize) -> T {
    let mut acc = T::one();
    for j in 0..k {
        acc *= x + T::of(j);
    }
    acc
}

pub fn factorial<T: Real>(k: usize) -> T {
    pochhammer(T::one(), k)
}

/// Normalizing constant of `(1-|z|^2)^beta dV_n`, i.e. `(beta+1)_n / n!`.
pub fn bergman_constant<T: Real>(n: usize, beta: T) -> T {
    pochhammer(beta + T::one(), n) / factorial::<T>(n)
}

/// `k! / (x)_k` accumulated as a product of ratios, stable for large `k`.
pub fn factorial_over_pochhammer<T: Real>(x: T, k: usize) -> T {
    let mut acc = T::one();
    for j in 0..k {
        acc *= T::of(j + 1) / (x + T::of(j));
    }
    acc
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed in `f64` by
/// Newton iteration on the three-term recurrence.
pub fn gauss_legendre<T: Real>(m: usize) -> (Vec<T>, Vec<T>) {
    assert!(m > 0, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0f64; m];
    let mut weights = vec![0.0f64; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (
        nodes.into_iter().map(T::lit).collect(),
        weights.into_iter().map(T::lit).collect(),
    )
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Pairwise summation, so results do not depend on how work was split.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        let mut acc = T::zero();
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len().min(ys.len());
    if m < 2 {
        return 0.0;
    }
    let mx = xs[..m].iter().sum::<f64>() / m as f64;
    let my = ys[..m].iter().sum::<f64>() / m as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for i in 0..m {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
