use num_complex::Complex;

use super::{composite_gl, QuadratureRule, RuleKind};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Coords, Unitary};
use crate::scalar::{gauss_legendre, Real};

/// Uniform rule for the normalized surface measure.
///
/// n = 1 is the trapezoid rule with `resolution` nodes. n = 2 uses
/// `zeta = (sqrt(t) e^{i phi_1}, sqrt(1-t) e^{i phi_2})`, in which
/// `dsigma = dt dphi_1 dphi_2 / (4 pi^2)`: Gauss-Legendre in `t` and
/// trapezoid in both phases.
pub fn sphere_rule<T: Real>(n: usize, resolution: usize) -> Result<QuadratureRule<T>> {
    if resolution == 0 {
        return Err(invalid("sphere resolution must be positive"));
    }
    let tau = T::TAU();
    let (nodes, weights) = match n {
        1 => {
            let m = T::of(resolution);
            let nodes = (0..resolution)
                .map(|k| {
                    let mut c = Coords::new();
                    c.push(Complex::from_polar(T::one(), tau * T::of(k) / m));
                    c
                })
                .collect();
            (nodes, vec![T::one() / m; resolution])
        }
        2 => {
            let mt = (resolution / 2).max(2);
            let (x, w) = gauss_legendre::<T>(mt);
            let m = T::of(resolution);
            let mut nodes = Vec::with_capacity(mt * resolution * resolution);
            let mut weights = Vec::with_capacity(mt * resolution * resolution);
            for (xi, wi) in x.iter().zip(&w) {
                let t = (T::one() + *xi) * T::HALF;
                let wt = *wi * T::HALF;
                for j in 0..resolution {
                    let p1 = tau * T::of(j) / m;
                    for k in 0..resolution {
                        let p2 = tau * T::of(k) / m;
                        nodes.push(hopf(t, p1, p2));
                        weights.push(wt / (m * m));
                    }
                }
            }
            (nodes, weights)
        }
        n => return Err(Error::UnsupportedDimension(n)),
    };
    Ok(QuadratureRule {
        n,
        kind: RuleKind::Sphere,
        nodes,
        weights,
        truncation: T::zero(),
        weight_exponent: T::zero(),
    })
}

#[inline]
pub(crate) fn hopf<T: Real>(t: T, p1: T, p2: T) -> Coords<T> {
    let t = t.max(T::zero()).min(T::one());
    let mut c = Coords::new();
    c.push(Complex::from_polar(t.sqrt(), p1));
    c.push(Complex::from_polar((T::one() - t).sqrt(), p2));
    c
}

/// Breakpoints `c +- scale * 2^j` clipped to `[lo, hi]`.
pub(crate) fn graded_breaks<T: Real>(center: T, scale: T, lo: T, hi: T) -> Vec<T> {
    let mut out = vec![lo, hi];
    if center > lo && center < hi {
        out.push(center);
    }
    let mut h = scale;
    while h < hi - lo {
        for x in [center - h, center + h] {
            if x > lo && x < hi {
                out.push(x);
            }
        }
        h *= T::TWO;
    }
    out
}

pub(crate) fn panels_from_breaks<T: Real>(mut breaks: Vec<T>) -> Vec<(T, T)> {
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-14));
    breaks.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Circle rule with Gauss-Legendre panels graded toward several angles.
/// Each focus is `(angle, scale)`; panels around it have half-widths
/// `scale * 2^j`.
pub fn focused_circle_rule<T: Real>(foci: &[(T, T)], order: usize) -> Result<QuadratureRule<T>> {
    if order == 0 {
        return Err(invalid("panel order must be positive"));
    }
    let pi = T::PI();
    let tau = T::TAU();
    let mut breaks = vec![-pi, pi];
    for &(angle, scale) in foci {
        if !(scale > T::zero()) {
            return Err(invalid("focus scale must be positive"));
        }
        // wrap into [-pi, pi) and grade on the circle around it
        let c = angle - tau * ((angle + pi) / tau).floor();
        for b in graded_breaks(c, scale.min(pi), c - pi, c + pi) {
            let b = b - tau * ((b + pi) / tau).floor();
            breaks.push(b);
        }
    }
    let panels = panels_from_breaks(breaks);
    let nodes_w = composite_gl(&panels, order);
    let mut nodes = Vec::with_capacity(nodes_w.len());
    let mut weights = Vec::with_capacity(nodes_w.len());
    for (theta, w) in nodes_w {
        let mut c = Coords::new();
        c.push(Complex::from_polar(T::one(), theta));
        nodes.push(c);
        weights.push(w / tau);
    }
    Ok(QuadratureRule {
        n: 1,
        kind: RuleKind::Sphere,
        nodes,
        weights,
        truncation: T::zero(),
        weight_exponent: T::zero(),
    })
}

/// Sphere rule graded toward `focus` at angular scale `scale`, with Gauss
/// panels of the given order. For n = 2 the grading acts on `1 - t` and on
/// the first phase; the second phase uses `2 * order` trapezoid nodes.
pub fn focused_sphere_rule<T: Real>(focus: &[Complex<T>], scale: T, order: usize) -> Result<QuadratureRule<T>> {
    match focus.len() {
        1 => focused_circle_rule(&[(focus[0].arg(), scale)], order),
        2 => {
            if !(scale > T::zero()) || order == 0 {
                return Err(invalid("focus scale and order must be positive"));
            }
            let pi = T::PI();
            let tau = T::TAU();
            // 1 - t graded toward 0, phase graded toward 0
            let t_panels = panels_from_breaks(graded_breaks(T::zero(), scale.min(T::one()), T::zero(), T::one()));
            let p_panels = panels_from_breaks(graded_breaks(T::zero(), scale.min(pi), -pi, pi));
            let ts = composite_gl(&t_panels, order);
            let ps = composite_gl(&p_panels, order);
            let m2 = 2 * order;
            let m2f = T::of(m2);
            let mut nodes = Vec::with_capacity(ts.len() * ps.len() * m2);
            let mut weights = Vec::with_capacity(ts.len() * ps.len() * m2);
            for &(s, ws) in &ts {
                let t = T::one() - s;
                for &(p1, wp) in &ps {
                    for k in 0..m2 {
                        let p2 = tau * T::of(k) / m2f;
                        nodes.push(hopf(t, p1, p2));
                        weights.push(ws * wp / (tau * m2f));
                    }
                }
            }
            let u = Unitary::sending_e1_to(focus)?;
            Ok(QuadratureRule {
                n: 2,
                kind: RuleKind::Sphere,
                nodes: nodes.iter().map(|z| u.apply(z)).collect(),
                weights,
                truncation: T::zero(),
                weight_exponent: T::zero(),
            })
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}
