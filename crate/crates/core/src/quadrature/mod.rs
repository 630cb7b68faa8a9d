//! Quadrature on the sphere, the (weighted) ball and approach regions, plus
//! the multi-start sup search used for regional maxima.

mod region;
mod sample;
mod search;
mod sphere;

pub use region::{focused_region_rule, region_integral, region_rule, RegionIntegral, RegionShape};
pub use sample::{sample_ball, sample_sphere, monte_carlo_ball_rule};
pub use search::{sup_search, SearchDomain, SupResult, SupSearchOptions};
pub use sphere::{focused_circle_rule, focused_sphere_rule, sphere_rule};

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{norm_sq, Coords, Unitary};
use crate::scalar::{gauss_legendre, pairwise_sum, Real};

/// Gauss-Legendre order used on every radial panel.
pub const RADIAL_ORDER: usize = 8;

/// Default ratio between successive boundary gaps.
pub const DEFAULT_GRADING: f64 = 0.5;

/// Default truncation `1 - |z|` of ball rules.
pub const DEFAULT_TRUNCATION: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Sphere,
    Ball,
    Region,
}

/// Nodes and positive weights. Ball and region weights integrate against
/// `(1-|z|^2)^weight_exponent dV_n`; sphere weights against `dsigma`.
#[derive(Clone, Debug)]
pub struct QuadratureRule<T: Real> {
    pub n: usize,
    pub kind: RuleKind,
    pub nodes: Vec<Coords<T>>,
    pub weights: Vec<T>,
    /// `1 - max |z|` over the domain; zero for sphere rules.
    pub truncation: T,
    pub weight_exponent: T,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> T {
        pairwise_sum(&self.weights)
    }

    /// Integral of a real integrand. Deterministic for any thread count.
    pub fn integrate<F>(&self, f: F) -> T
    where
        F: Fn(&[Complex<T>]) -> T + Sync,
    {
        let terms: Vec<T> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(z, &w)| w * f(z))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn integrate_complex<F>(&self, f: F) -> Complex<T>
    where
        F: Fn(&[Complex<T>]) -> Complex<T> + Sync,
    {
        let terms: Vec<Complex<T>> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(z, &w)| f(z) * w)
            .collect();
        let re: Vec<T> = terms.iter().map(|c| c.re).collect();
        let im: Vec<T> = terms.iter().map(|c| c.im).collect();
        Complex::new(pairwise_sum(&re), pairwise_sum(&im))
    }

    /// Same weights, nodes mapped through `u`.
    pub fn rotated(&self, u: &Unitary<T>) -> Self {
        Self {
            nodes: self.nodes.iter().map(|z| u.apply(z)).collect(),
            ..self.clone()
        }
    }

    /// Re-weights a ball or region rule to `(1-|z|^2)^alpha dV_n`.
    pub fn reweighted(&self, alpha: T) -> Self {
        if self.kind == RuleKind::Sphere || alpha == self.weight_exponent {
            return self.clone();
        }
        let shift = alpha - self.weight_exponent;
        let weights = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, &w)| w * (T::one() - norm_sq(z)).powf(shift))
            .collect();
        Self {
            weights,
            weight_exponent: alpha,
            ..self.clone()
        }
    }

    /// Weights multiplied by `(1-|z|^2)^alpha`, without touching the rule.
    pub fn weights_with_exponent(&self, alpha: T) -> Vec<T> {
        if alpha == T::zero() || self.kind == RuleKind::Sphere {
            return self.weights.clone();
        }
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, &w)| w * (T::one() - norm_sq(z)).powf(alpha))
            .collect()
    }

    /// Keeps only nodes satisfying `keep`.
    pub fn restricted<P: Fn(&[Complex<T>]) -> bool>(&self, keep: P) -> Self {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (z, &w) in self.nodes.iter().zip(&self.weights) {
            if keep(z) {
                nodes.push(z.clone());
                weights.push(w);
            }
        }
        Self {
            nodes,
            weights,
            ..self.clone()
        }
    }
}

/// Radii `1 - lambda^j` accumulating at the truncation radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RadialMesh<T: Real> {
    pub radii: Vec<T>,
    pub grading: T,
}

impl<T: Real> RadialMesh<T> {
    /// Gaps `1 - rho_j = lambda^{j+1}` down to `eps`, with a final radius
    /// `1 - eps`.
    pub fn geometric(eps: T, grading: T) -> Result<Self> {
        Self::geometric_from(T::zero(), eps, grading)
    }

    /// Same as [`RadialMesh::geometric`] but with gaps measured from `start`.
    pub fn geometric_from(start: T, eps: T, grading: T) -> Result<Self> {
        if !(eps > T::zero() && eps <= T::lit(0.01)) {
            return Err(invalid(format!("truncation must lie in (0, 0.01], got {eps}")));
        }
        if !(grading > T::zero() && grading < T::one()) {
            return Err(invalid(format!("grading must lie in (0, 1), got {grading}")));
        }
        if !(start >= T::zero() && start < T::one() - eps) {
            return Err(Error::EmptyMesh);
        }
        let mut radii = Vec::new();
        let mut gap = (T::one() - start) * grading;
        while gap > eps * (T::one() + T::lit(1e-9)) {
            radii.push(T::one() - gap);
            gap *= grading;
        }
        radii.push(T::one() - eps);
        Ok(Self { radii, grading })
    }

    pub fn default_with(eps: T) -> Result<Self> {
        Self::geometric(eps, T::lit(DEFAULT_GRADING))
    }

    pub fn truncation(&self) -> T {
        self.radii.last().map(|&r| T::one() - r).unwrap_or(T::one())
    }

    /// Panel endpoints `[start, rho_0], [rho_0, rho_1], ...`, skipping radii
    /// below `start`.
    pub fn panels(&self, start: T) -> Vec<(T, T)> {
        let mut out = Vec::new();
        let mut lo = start;
        for &r in &self.radii {
            if r > lo {
                out.push((lo, r));
                lo = r;
            }
        }
        out
    }
}

/// Gauss-Legendre nodes for each panel, as `(x, w)` pairs.
pub(crate) fn composite_gl<T: Real>(panels: &[(T, T)], order: usize) -> Vec<(T, T)> {
    let (x, w) = gauss_legendre::<T>(order);
    let mut out = Vec::with_capacity(panels.len() * order);
    for &(a, b) in panels {
        let half = (b - a) * T::HALF;
        let mid = (a + b) * T::HALF;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((mid + half * *xi, half * *wi));
        }
    }
    out
}

/// Radial nodes with weights for `2n r^{2n-1} dr`, times `(1-r^2)^alpha`.
fn radial_nodes<T: Real>(n: usize, alpha: T, mesh: &RadialMesh<T>, order: usize) -> Vec<(T, T)> {
    let two_n = T::of(2 * n);
    composite_gl(&mesh.panels(T::zero()), order)
        .into_iter()
        .map(|(r, w)| {
            let mut wt = w * two_n * r.powi(2 * n as i32 - 1);
            if alpha != T::zero() {
                wt *= (T::one() - r * r).powf(alpha);
            }
            (r, wt)
        })
        .collect()
}

/// Product rule: geometric radial panels times a sphere rule.
pub fn ball_rule<T: Real>(n: usize, alpha: T, mesh: &RadialMesh<T>, sphere_res: usize) -> Result<QuadratureRule<T>> {
    let sphere = sphere_rule::<T>(n, sphere_res)?;
    ball_rule_from_sphere(alpha, mesh, &sphere)
}

/// Product of the radial mesh with an arbitrary (possibly focused) sphere rule.
pub fn ball_rule_from_sphere<T: Real>(alpha: T, mesh: &RadialMesh<T>, sphere: &QuadratureRule<T>) -> Result<QuadratureRule<T>> {
    if mesh.radii.is_empty() {
        return Err(Error::EmptyMesh);
    }
    if sphere.kind != RuleKind::Sphere {
        return Err(invalid("ball rules are built from a sphere rule"));
    }
    let n = sphere.n;
    let radial = radial_nodes(n, alpha, mesh, RADIAL_ORDER);
    let mut nodes = Vec::with_capacity(radial.len() * sphere.len());
    let mut weights = Vec::with_capacity(radial.len() * sphere.len());
    for &(r, wr) in &radial {
        for (zeta, &ws) in sphere.nodes.iter().zip(&sphere.weights) {
            nodes.push(zeta.iter().map(|c| c * r).collect());
            weights.push(wr * ws);
        }
    }
    Ok(QuadratureRule {
        n,
        kind: RuleKind::Ball,
        nodes,
        weights,
        truncation: mesh.truncation(),
        weight_exponent: alpha,
    })
}

/// Ball rule whose sphere rule is graded toward `focus` at angular scale
/// `scale`.
pub fn focused_ball_rule<T: Real>(
    alpha: T,
    mesh: &RadialMesh<T>,
    focus: &[Complex<T>],
    scale: T,
    order: usize,
) -> Result<QuadratureRule<T>> {
    let sphere = focused_sphere_rule(focus, scale, order)?;
    ball_rule_from_sphere(alpha, mesh, &sphere)
}

/// Disc rule (n = 1) with angular spacing proportional to `1 - r`, so the
/// resolution is uniform in the Bergman metric. `spacing` is the angular
/// step in units of `1 - r^2`.
pub fn hyperbolic_disc_rule<T: Real>(alpha: T, mesh: &RadialMesh<T>, spacing: T, min_nodes: usize) -> Result<QuadratureRule<T>> {
    if mesh.radii.is_empty() {
        return Err(Error::EmptyMesh);
    }
    if !(spacing > T::zero()) {
        return Err(invalid("angular spacing must be positive"));
    }
    let radial = radial_nodes(1, alpha, mesh, RADIAL_ORDER);
    let tau = T::TAU();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for &(r, wr) in &radial {
        let m = ((tau / (spacing * (T::one() - r * r))).ceil().as_f64() as usize).max(min_nodes);
        let offset = T::lit(0.5) * tau / T::of(m);
        for k in 0..m {
            let theta = offset + tau * T::of(k) / T::of(m);
            let mut z = Coords::new();
            z.push(Complex::from_polar(r, theta));
            nodes.push(z);
            weights.push(wr / T::of(m));
        }
    }
    Ok(QuadratureRule {
        n: 1,
        kind: RuleKind::Ball,
        nodes,
        weights,
        truncation: mesh.truncation(),
        weight_exponent: alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_is_geometric() {
        let mesh = RadialMesh::<f64>::geometric(1e-4, 0.5).unwrap();
        let gaps: Vec<f64> = mesh.radii.iter().map(|r| 1.0 - r).collect();
        for w in gaps[..gaps.len() - 1].windows(2) {
            assert!((w[1] / w[0] - 0.5).abs() < 1e-12);
        }
        assert!((mesh.truncation() - 1e-4).abs() < 1e-15);
        assert!(mesh.radii.windows(2).all(|w| w[0] < w[1]));
        assert!(RadialMesh::<f64>::geometric(0.1, 0.5).is_err());
        assert!(RadialMesh::<f64>::geometric(1e-3, 1.0).is_err());
    }

    #[test]
    fn ball_rule_volume_and_moments() {
        let eps = 1e-4;
        let mesh = RadialMesh::<f64>::geometric(eps, 0.5).unwrap();
        for n in [1usize, 2] {
            let rule = ball_rule(n, 0.0, &mesh, 8).unwrap();
            let vol = rule.total_weight();
            let rt = 1.0 - eps;
            assert!((vol - rt.powi(2 * n as i32)).abs() < 1e-12, "n={n}: {vol}");
            for k in 0..=6 {
                let got = rule.integrate(|z| norm_sq(z).powi(k));
                // n / (n + k) r_t^{2n+2k}
                let nf = n as f64;
                let expect = nf / (nf + k as f64) * rt.powi(2 * n as i32 + 2 * k);
                assert!((got - expect).abs() < 1e-10, "n={n} k={k}");
            }
            assert!(rule.nodes.iter().all(|z| norm_sq(z).sqrt() <= 1.0 - eps + 1e-15));
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            let m = rule.integrate_complex(|z| z[0]);
            assert!(m.norm() < 1e-14);
        }
    }

    #[test]
    fn weighted_radial_moment() {
        // 2 * int_0^1 (r^3 - r^5) dr = 1/6
        let mesh = RadialMesh::<f64>::geometric(1e-8, 0.5).unwrap();
        let rule = ball_rule(1, 1.0, &mesh, 8).unwrap();
        let got = rule.integrate(norm_sq);
        assert!((got - 1.0 / 6.0).abs() < 1e-12);
        let same = ball_rule(1, 0.0, &mesh, 8).unwrap().reweighted(1.0);
        assert!((same.integrate(norm_sq) - got).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_disc_rule_volume() {
        let mesh = RadialMesh::<f64>::geometric(1e-3, 0.5).unwrap();
        let rule = hyperbolic_disc_rule(0.0, &mesh, 0.5, 8).unwrap();
        assert!((rule.total_weight() - (1.0 - 1e-3f64).powi(2)).abs() < 1e-12);
        let m = rule.integrate_complex(|z| z[0] * z[0]);
        assert!(m.norm() < 1e-13);
    }

    #[test]
    fn restriction_and_rotation_keep_weights() {
        let mesh = RadialMesh::<f64>::geometric(1e-3, 0.5).unwrap();
        let rule = ball_rule(2, 0.0, &mesh, 6).unwrap();
        let zeta = [Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)];
        let u = Unitary::sending_e1_to(&zeta).unwrap();
        let rot = rule.rotated(&u);
        assert!((rot.integrate(norm_sq) - rule.integrate(norm_sq)).abs() < 1e-13);
        let half = rule.restricted(|z| norm_sq(z) < 0.25);
        assert!(half.len() < rule.len());
        assert!((half.total_weight() - 0.0625).abs() < 1e-2);
    }
}
