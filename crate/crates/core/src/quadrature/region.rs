use num_complex::Complex;

use super::{composite_gl, sphere_rule, QuadratureRule, RadialMesh, RuleKind, DEFAULT_GRADING, RADIAL_ORDER};
use crate::error::{invalid, Error, Result};
use crate::geometry::{approach_contains, norm_sq, Aperture, Coords, SpherePoint};
use crate::scalar::{gauss_legendre, pairwise_sum, Real};

/// A region with vertex (or center direction) `e_1`. Rotate the rule to
/// move it elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionShape<T: Real> {
    /// The approach region `Gamma_gamma(e_1)`.
    Approach(Aperture<T>),
    /// The tent `Q(u)` with `u = radius * e_1`.
    Tent { radius: T },
}

impl<T: Real> RegionShape<T> {
    /// Bound `K(r)` in `|1 - z_1| < K(r)` at `|z| = r`.
    fn bound(&self, r: T) -> T {
        match *self {
            RegionShape::Approach(g) => g.value() * T::HALF * (T::one() - r * r),
            RegionShape::Tent { radius } => T::one() - radius * radius,
        }
    }

    /// Radii where the cross-section changes shape: the arc closes into a
    /// full circle (`K = 1 + r`) or the phase range saturates (`K = 1`).
    fn kinks(&self) -> Vec<T> {
        match *self {
            RegionShape::Approach(g) => {
                let two_over = T::TWO / g.value();
                vec![T::one() - two_over, (T::one() - two_over).max(T::zero()).sqrt()]
            }
            RegionShape::Tent { .. } => Vec::new(),
        }
    }

    fn start(&self) -> T {
        match *self {
            RegionShape::Approach(g) => g.min_radius(),
            RegionShape::Tent { radius } => (radius * radius).max(T::zero()),
        }
    }

    pub fn contains(&self, z: &[Complex<T>]) -> bool {
        let r2 = norm_sq(z);
        let w = (Complex::new(T::one(), T::zero()) - z[0]).norm();
        match *self {
            RegionShape::Approach(g) => w < g.value() * T::HALF * (T::one() - r2),
            RegionShape::Tent { radius } => radius == T::zero() || w < T::one() - radius * radius,
        }
    }
}

/// Exact-boundary rule for a region template at `e_1`, truncated at
/// `|z| <= 1 - eps`. Radial Gauss panels are graded geometrically toward
/// the boundary; each sphere of radius `r` meets the region in an arc
/// (n = 1) or a disc-shaped cap in `z_1` (n = 2), integrated with
/// Gauss-Legendre rules of the given order.
pub fn region_rule<T: Real>(n: usize, shape: RegionShape<T>, eps: T, order: usize) -> Result<QuadratureRule<T>> {
    if order == 0 {
        return Err(invalid("region order must be positive"));
    }
    if n != 1 && n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if let RegionShape::Tent { radius } = shape {
        if radius == T::zero() {
            let mesh = RadialMesh::geometric(eps, T::lit(DEFAULT_GRADING))?;
            let mut rule = super::ball_rule_from_sphere(T::zero(), &mesh, &sphere_rule(n, 2 * order)?)?;
            rule.kind = RuleKind::Region;
            return Ok(rule);
        }
        if T::one() - radius * radius <= eps {
            return Err(Error::NodeStarvation(format!("tent at radius {radius} (truncation {eps})")));
        }
    }
    let start = shape.start();
    let mesh = RadialMesh::geometric_from(start, eps, T::lit(DEFAULT_GRADING))?;
    let mut panels = mesh.panels(start);
    for k in shape.kinks() {
        if let Some(i) = panels.iter().position(|&(a, b)| a < k && k < b) {
            let (a, b) = panels[i];
            panels[i] = (a, k);
            panels.insert(i + 1, (k, b));
        }
    }
    let radial = composite_gl(&panels, RADIAL_ORDER);
    let (gx, gw) = gauss_legendre::<T>(order);
    let pi = T::PI();
    let tau = T::TAU();
    let two_n = T::of(2 * n);
    let mut nodes: Vec<Coords<T>> = Vec::new();
    let mut weights: Vec<T> = Vec::new();
    for &(r, wr) in &radial {
        let k = shape.bound(r);
        let wr = wr * two_n * r.powi(2 * n as i32 - 1);
        if n == 1 {
            let c = (T::one() + r * r - k * k) / (T::TWO * r);
            if c >= T::one() {
                continue;
            }
            let tmax = if c <= -T::one() { pi } else { c.acos() };
            for (x, w) in gx.iter().zip(&gw) {
                let theta = tmax * *x;
                let mut z = Coords::new();
                z.push(Complex::from_polar(r, theta));
                nodes.push(z);
                weights.push(wr * tmax * *w / tau);
            }
        } else {
            let one_minus_k2 = T::one() - k * k;
            let pmax = if one_minus_k2 <= T::zero() { pi } else { one_minus_k2.sqrt().acos() };
            let m2 = 2 * order;
            let m2f = T::of(m2);
            for (xp, wp) in gx.iter().zip(&gw) {
                let phi = pmax * *xp;
                let wphi = pmax * *wp;
                let cphi = phi.cos();
                let disc = cphi * cphi - one_minus_k2;
                if disc <= T::zero() {
                    continue;
                }
                let sq = disc.sqrt();
                let lo = ((cphi - sq) / r).max(T::zero());
                let hi = ((cphi + sq) / r).min(T::one());
                if hi <= lo {
                    continue;
                }
                let half = (hi - lo) * T::HALF;
                let mid = (hi + lo) * T::HALF;
                for (xx, wx) in gx.iter().zip(&gw) {
                    let x = mid + half * *xx;
                    let wxx = half * *wx;
                    let z1 = Complex::from_polar(r * x, phi);
                    let rho2 = r * (T::one() - x * x).max(T::zero()).sqrt();
                    for j in 0..m2 {
                        let p2 = tau * T::of(j) / m2f;
                        let mut z = Coords::new();
                        z.push(z1);
                        z.push(Complex::from_polar(rho2, p2));
                        nodes.push(z);
                        weights.push(wr * T::TWO * x * wxx * wphi / (tau * m2f));
                    }
                }
            }
        }
    }
    if nodes.is_empty() {
        return Err(Error::NodeStarvation(format!("{shape:?}")));
    }
    Ok(QuadratureRule {
        n,
        kind: RuleKind::Region,
        nodes,
        weights,
        truncation: eps,
        weight_exponent: T::zero(),
    })
}

/// Disc version of [`region_rule`] whose arcs are split into Gauss panels
/// graded toward the given `(angle, scale)` foci, measured from `e_1`.
pub fn focused_region_rule<T: Real>(shape: RegionShape<T>, eps: T, order: usize, foci: &[(T, T)]) -> Result<QuadratureRule<T>> {
    if order == 0 {
        return Err(invalid("region order must be positive"));
    }
    let whole = matches!(shape, RegionShape::Tent { radius } if radius == T::zero());
    if let RegionShape::Tent { radius } = shape {
        if !whole && T::one() - radius * radius <= eps {
            return Err(Error::NodeStarvation(format!("tent at radius {radius} (truncation {eps})")));
        }
    }
    let start = if whole { T::zero() } else { shape.start() };
    let mesh = RadialMesh::geometric_from(start, eps, T::lit(DEFAULT_GRADING))?;
    let mut panels = mesh.panels(start);
    for k in shape.kinks() {
        if let Some(i) = panels.iter().position(|&(a, b)| a < k && k < b) {
            let (a, b) = panels[i];
            panels[i] = (a, k);
            panels.insert(i + 1, (k, b));
        }
    }
    let radial = composite_gl(&panels, RADIAL_ORDER);
    let pi = T::PI();
    let tau = T::TAU();
    let mut nodes: Vec<Coords<T>> = Vec::new();
    let mut weights: Vec<T> = Vec::new();
    for &(r, wr) in &radial {
        let wr = wr * T::TWO * r;
        let tmax = if whole {
            pi
        } else {
            let k = shape.bound(r);
            let c = (T::one() + r * r - k * k) / (T::TWO * r);
            if c >= T::one() {
                continue;
            }
            if c <= -T::one() {
                pi
            } else {
                c.acos()
            }
        };
        let mut breaks = vec![-tmax, tmax];
        for &(angle, scale) in foci {
            let a = angle - tau * ((angle + pi) / tau).floor();
            for b in super::sphere::graded_breaks(a, scale.max(T::lit(1e-12)), -tmax, tmax) {
                breaks.push(b);
            }
            // the nearest point of the arc also gets a fine panel
            let near = a.max(-tmax).min(tmax);
            for b in super::sphere::graded_breaks(near, scale.max(T::lit(1e-12)), -tmax, tmax) {
                breaks.push(b);
            }
        }
        let arc = composite_gl(&super::sphere::panels_from_breaks(breaks), order);
        for (theta, w) in arc {
            let mut z = Coords::new();
            z.push(Complex::from_polar(r, theta));
            nodes.push(z);
            weights.push(wr * w / tau);
        }
    }
    if nodes.is_empty() {
        return Err(Error::NodeStarvation(format!("{shape:?}")));
    }
    Ok(QuadratureRule {
        n: 1,
        kind: RuleKind::Region,
        nodes,
        weights,
        truncation: eps,
        weight_exponent: T::zero(),
    })
}

/// Value of a region integral and the number of contributing nodes.
#[derive(Clone, Copy, Debug)]
pub struct RegionIntegral<T> {
    pub value: T,
    pub nodes: usize,
}

/// Integral of `f (1-|z|^2)^alpha` over `Gamma_gamma(zeta)` by restricting a
/// ball rule to the nodes inside the region.
pub fn region_integral<T: Real, F>(
    f: F,
    zeta: &SpherePoint<T>,
    gamma: Aperture<T>,
    alpha: T,
    rule: &QuadratureRule<T>,
) -> Result<RegionIntegral<T>>
where
    F: Fn(&[Complex<T>]) -> T,
{
    if rule.kind != RuleKind::Ball {
        return Err(invalid("region_integral needs a ball rule"));
    }
    if rule.n != zeta.dim() {
        return Err(Error::DimensionMismatch(rule.n, zeta.dim()));
    }
    let shift = alpha - rule.weight_exponent;
    let mut terms = Vec::new();
    for (z, &w) in rule.nodes.iter().zip(&rule.weights) {
        if approach_contains(zeta.coords(), gamma.value(), z) {
            let mut t = w * f(z);
            if shift != T::zero() {
                t *= (T::one() - norm_sq(z)).powf(shift);
            }
            terms.push(t);
        }
    }
    if terms.is_empty() {
        return Err(Error::NodeStarvation(format!("approach region at {:?}", zeta.coords())));
    }
    Ok(RegionIntegral {
        value: pairwise_sum(&terms),
        nodes: terms.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::ball_rule;

    fn disc_area_oracle(shape: RegionShape<f64>, eps: f64) -> f64 {
        // brute-force polar integration of the indicator
        let nr = 4000;
        let nt = 4000;
        let rmax = 1.0 - eps;
        let mut acc = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64 * rmax;
            let mut hits = 0usize;
            for j in 0..nt {
                let t = -std::f64::consts::PI + (j as f64 + 0.5) / nt as f64 * std::f64::consts::TAU;
                let z = [Complex::from_polar(r, t)];
                if shape.contains(&z) {
                    hits += 1;
                }
            }
            acc += 2.0 * r * (rmax / nr as f64) * hits as f64 / nt as f64;
        }
        acc
    }

    #[test]
    fn approach_area_matches_brute_force() {
        for g in [1.5, 2.0, 3.0] {
            let shape = RegionShape::Approach(Aperture::new(g).unwrap());
            let rule = region_rule(1, shape, 1e-3, 16).unwrap();
            let oracle = disc_area_oracle(shape, 1e-3);
            assert!((rule.total_weight() - oracle).abs() < 2e-3 * oracle, "{g}: {} {oracle}", rule.total_weight());
        }
    }

    #[test]
    fn tent_area_matches_brute_force() {
        for rho in [0.3, 0.8] {
            let shape = RegionShape::Tent { radius: rho };
            let rule = region_rule(1, shape, 1e-3, 16).unwrap();
            let oracle = disc_area_oracle(shape, 1e-3);
            assert!((rule.total_weight() - oracle).abs() < 2e-3 * oracle);
        }
        assert!(region_rule(1, RegionShape::Tent { radius: 0.9999 }, 1e-3, 8).is_err());
    }

    #[test]
    fn focused_tent_matches_plain_tent() {
        let f = |z: &[Complex<f64>]| (Complex::new(1.0, 0.0) - z[0] * Complex::from_polar(0.9, -0.4)).norm_sqr().recip();
        // whole disc against the series sum_k 0.81^k r^(2k+2) / (k+1)
        let whole = focused_region_rule(RegionShape::Tent { radius: 0.0 }, 1e-3, 8, &[(0.4, 0.1)]).unwrap();
        let r2: f64 = 0.999f64 * 0.999;
        let series: f64 = (0..2000).map(|k| 0.81f64.powi(k) * r2.powi(k + 1) / (k as f64 + 1.0)).sum();
        assert!((whole.integrate(f) - series).abs() < 1e-8 * series);
        for rho in [0.3, 0.8] {
            let shape = RegionShape::Tent { radius: rho };
            let plain = region_rule(1, shape, 1e-3, 48).unwrap();
            let foc = focused_region_rule(shape, 1e-3, 8, &[(0.4, 0.1), (3.0, 0.01)]).unwrap();
            let (a, b) = (plain.integrate(f), foc.integrate(f));
            assert!((a - b).abs() < 1e-6 * a, "{rho}: {a} {b}");
            assert!(foc.nodes.iter().all(|z| shape.contains(z)));
        }
    }

    #[test]
    fn region_nodes_lie_inside() {
        for n in [1, 2] {
            for shape in [RegionShape::Approach(Aperture::new(2.5).unwrap()), RegionShape::Tent { radius: 0.5 }] {
                let rule = region_rule(n, shape, 1e-3, 6).unwrap();
                let inside = rule.nodes.iter().filter(|z| shape.contains(z)).count();
                assert_eq!(inside, rule.len(), "n={n} {shape:?}");
            }
        }
    }

    #[test]
    fn n2_region_agrees_with_indicator_restriction() {
        let shape = RegionShape::Approach(Aperture::new(3.0).unwrap());
        let exact: f64 = region_rule(2, shape, 1e-2, 10).unwrap().total_weight();
        let mesh = RadialMesh::geometric(1e-2, 0.5).unwrap();
        let ball = ball_rule(2, 0.0, &mesh, 40).unwrap();
        let ind = region_integral(|_| 1.0, &SpherePoint::e1(2), Aperture::new(3.0).unwrap(), 0.0, &ball).unwrap();
        assert!((exact - ind.value).abs() < 0.02 * exact, "{exact} vs {}", ind.value);
    }

    #[test]
    fn region_integral_basics() {
        let mesh = RadialMesh::geometric(1e-3, 0.5).unwrap();
        let ball = ball_rule(1, 0.0, &mesh, 256).unwrap();
        let zeta = SpherePoint::from_angle(0.7);
        let zero = region_integral(|_| 0.0, &zeta, Aperture::default(), 0.0, &ball).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(zero.nodes > 0);
        let small = region_integral(|_| 1.0, &zeta, Aperture::new(1.5).unwrap(), 0.0, &ball).unwrap();
        let big = region_integral(|_| 1.0, &zeta, Aperture::new(3.0).unwrap(), 0.0, &ball).unwrap();
        assert!(small.value <= big.value);
        let coarse = ball_rule(1, 0.0, &mesh, 2).unwrap();
        let miss = region_integral(|_| 1.0, &SpherePoint::from_angle(1.0), Aperture::new(1.01).unwrap(), 0.0, &coarse);
        assert!(matches!(miss, Err(Error::NodeStarvation(_))));
    }
}
