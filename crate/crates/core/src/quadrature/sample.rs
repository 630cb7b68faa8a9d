use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{QuadratureRule, RuleKind};
use crate::error::{invalid, Error, Result};
use crate::geometry::{norm_sq, Coords};
use crate::scalar::Real;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn direction(n: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    loop {
        let v: Vec<(f64, f64)> = (0..n).map(|_| (gaussian(rng), gaussian(rng))).collect();
        let r: f64 = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        if r > 1e-12 {
            return v.into_iter().map(|(a, b)| (a / r, b / r)).collect();
        }
    }
}

/// Uniform points on the unit sphere.
pub fn sample_sphere<T: Real>(n: usize, count: usize, seed: u64) -> Result<Vec<Coords<T>>> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            direction(n, &mut rng)
                .into_iter()
                .map(|(a, b)| Complex::new(T::lit(a), T::lit(b)))
                .collect()
        })
        .collect())
}

/// Points uniform for `dV_n` on the ball `|z| <= rmax`.
pub fn sample_ball<T: Real>(n: usize, count: usize, rmax: T, seed: u64) -> Result<Vec<Coords<T>>> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(rmax > T::zero() && rmax < T::one()) {
        return Err(invalid("sampling radius must lie in (0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rm = rmax.as_f64();
    Ok((0..count)
        .map(|_| {
            let d = direction(n, &mut rng);
            let u: f64 = rng.gen();
            let r = rm * u.powf(1.0 / (2.0 * n as f64));
            d.into_iter()
                .map(|(a, b)| Complex::new(T::lit(a * r), T::lit(b * r)))
                .collect()
        })
        .collect())
}

/// Equal-weight Monte Carlo rule for `(1-|z|^2)^alpha dV_n` on
/// `|z| <= 1 - eps`, for cases where product rules get too large.
pub fn monte_carlo_ball_rule<T: Real>(n: usize, alpha: T, count: usize, eps: T, seed: u64) -> Result<QuadratureRule<T>> {
    if count == 0 {
        return Err(invalid("sample count must be positive"));
    }
    let rmax = T::one() - eps;
    let nodes = sample_ball::<T>(n, count, rmax, seed)?;
    let vol = rmax.powi(2 * n as i32) / T::of(count);
    let weights = nodes
        .iter()
        .map(|z| vol * (T::one() - norm_sq(z)).powf(alpha))
        .collect();
    Ok(QuadratureRule {
        n,
        kind: RuleKind::Ball,
        nodes,
        weights,
        truncation: eps,
        weight_exponent: alpha,
    })
}
