//! Points of the unit ball, the Bergman metric, ball automorphisms and the
//! region predicates (approach regions, tents, boundary slices).

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};
use crate::quadrature::QuadratureRule;
use crate::scalar::Real;

/// Coordinates of a point in `C^n`, inline for n <= 2.
pub type Coords<T> = SmallVec<[Complex<T>; 2]>;

#[inline]
pub(crate) fn dot<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (a, b) in z.iter().zip(w) {
        acc += a * b.conj();
    }
    acc
}

#[inline]
pub(crate) fn norm_sq<T: Real>(z: &[Complex<T>]) -> T {
    let mut acc = T::zero();
    for c in z {
        acc += c.norm_sqr();
    }
    acc
}

/// `<z, w> = sum z_j conj(w_j)`.
pub fn hermitian_inner<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> Result<Complex<T>> {
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch(z.len(), w.len()));
    }
    Ok(dot(z, w))
}

/// A point of the open unit ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    bound = "T: Real",
    try_from = "Vec<Complex<T>>",
    into = "Vec<Complex<T>>"
)]
pub struct BallPoint<T: Real> {
    coords: Coords<T>,
}

impl<T: Real> BallPoint<T> {
    pub fn new(coords: impl IntoIterator<Item = Complex<T>>) -> Result<Self> {
        let coords: Coords<T> = coords.into_iter().collect();
        if coords.is_empty() {
            return Err(invalid("a point needs at least one coordinate"));
        }
        let r2 = norm_sq(&coords);
        if !(r2 < T::one()) {
            return Err(Error::OutsideBall(r2.sqrt().as_f64()));
        }
        Ok(Self { coords })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coords: (0..n).map(|_| Complex::new(T::zero(), T::zero())).collect(),
        }
    }

    /// `r * zeta` for `0 <= r < 1`.
    pub fn radial(zeta: &SpherePoint<T>, r: T) -> Result<Self> {
        Self::new(zeta.coords().iter().map(|c| c * r))
    }

    /// `r * e_1` in dimension `n`.
    pub fn on_axis(n: usize, r: T) -> Result<Self> {
        Self::radial(&SpherePoint::e1(n), r)
    }

    pub(crate) fn from_coords_unchecked(coords: Coords<T>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[Complex<T>] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sq(&self) -> T {
        norm_sq(&self.coords)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// `1 - |z|^2`.
    pub fn depth(&self) -> T {
        T::one() - self.norm_sq()
    }

    /// Unit vector in the direction of `z`, if `z != 0`.
    pub fn direction(&self) -> Option<SpherePoint<T>> {
        SpherePoint::new(self.coords.iter().copied()).ok()
    }
}

impl<T: Real> TryFrom<Vec<Complex<T>>> for BallPoint<T> {
    type Error = Error;

    fn try_from(v: Vec<Complex<T>>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Real> From<BallPoint<T>> for Vec<Complex<T>> {
    fn from(p: BallPoint<T>) -> Self {
        p.coords.into_vec()
    }
}

/// A point of the unit sphere. Renormalized on construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    bound = "T: Real",
    try_from = "Vec<Complex<T>>",
    into = "Vec<Complex<T>>"
)]
pub struct SpherePoint<T: Real> {
    coords: Coords<T>,
}

impl<T: Real> SpherePoint<T> {
    pub fn new(coords: impl IntoIterator<Item = Complex<T>>) -> Result<Self> {
        let mut coords: Coords<T> = coords.into_iter().collect();
        let r = norm_sq(&coords).sqrt();
        if coords.is_empty() || !(r > T::zero()) || !r.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        for c in coords.iter_mut() {
            *c /= r;
        }
        Ok(Self { coords })
    }

    pub fn e1(n: usize) -> Self {
        let mut coords: Coords<T> = (0..n).map(|_| Complex::new(T::zero(), T::zero())).collect();
        coords[0] = Complex::new(T::one(), T::zero());
        Self { coords }
    }

    /// `e^{i theta}` on the unit circle.
    pub fn from_angle(theta: T) -> Self {
        let mut coords = Coords::new();
        coords.push(Complex::from_polar(T::one(), theta));
        Self { coords }
    }

    pub fn coords(&self) -> &[Complex<T>] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl<T: Real> TryFrom<Vec<Complex<T>>> for SpherePoint<T> {
    type Error = Error;

    fn try_from(v: Vec<Complex<T>>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Real> From<SpherePoint<T>> for Vec<Complex<T>> {
    fn from(p: SpherePoint<T>) -> Self {
        p.coords.into_vec()
    }
}

/// Aperture `gamma > 1` of the Koranyi approach regions.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "f64", into = "f64")]
pub struct Aperture<T: Real>(T);

impl<T: Real> Aperture<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if gamma > T::one() && gamma.is_finite() {
            Ok(Self(gamma))
        } else {
            Err(invalid(format!("aperture must exceed 1, got {gamma}")))
        }
    }

    pub fn value(self) -> T {
        self.0
    }

    /// Smallest radius at which `Gamma(zeta)` meets the sphere `|z| = r`.
    pub fn min_radius(self) -> T {
        (T::TWO / self.0 - T::one()).max(T::zero())
    }
}

impl<T: Real> Default for Aperture<T> {
    fn default() -> Self {
        Self(T::TWO)
    }
}

impl<T: Real> TryFrom<f64> for Aperture<T> {
    type Error = Error;

    fn try_from(g: f64) -> Result<Self> {
        Self::new(T::lit(g))
    }
}

impl<T: Real> From<Aperture<T>> for f64 {
    fn from(a: Aperture<T>) -> f64 {
        a.0.as_f64()
    }
}

#[inline]
pub(crate) fn approach_contains<T: Real>(zeta: &[Complex<T>], gamma: T, z: &[Complex<T>]) -> bool {
    let w = Complex::new(T::one(), T::zero()) - dot(z, zeta);
    w.norm() < gamma * T::HALF * (T::one() - norm_sq(z))
}

/// `|1 - <z, zeta>| < (gamma / 2)(1 - |z|^2)`.
pub fn in_approach_region<T: Real>(zeta: &SpherePoint<T>, gamma: Aperture<T>, z: &BallPoint<T>) -> bool {
    approach_contains(zeta.coords(), gamma.value(), z.coords())
}

#[inline]
pub(crate) fn tent_contains<T: Real>(u: &[Complex<T>], z: &[Complex<T>]) -> bool {
    let r2 = norm_sq(u);
    if r2 == T::zero() {
        return true;
    }
    let r = r2.sqrt();
    let w = Complex::new(T::one(), T::zero()) - dot(z, u) / r;
    w.norm() < T::one() - r2
}

/// Membership in the tent `Q(u)`; `Q(0)` is the whole ball.
pub fn in_tent<T: Real>(u: &BallPoint<T>, z: &BallPoint<T>) -> bool {
    tent_contains(u.coords(), z.coords())
}

/// The involutive automorphism exchanging `a` and `0`.
pub fn mobius<T: Real>(a: &BallPoint<T>, z: &BallPoint<T>) -> BallPoint<T> {
    BallPoint::from_coords_unchecked(mobius_coords(a.coords(), z.coords()))
}

pub(crate) fn mobius_coords<T: Real>(a: &[Complex<T>], z: &[Complex<T>]) -> Coords<T> {
    let a2 = norm_sq(a);
    if a2 == T::zero() {
        return z.iter().map(|c| -c).collect();
    }
    let za = dot(z, a);
    let s = (T::one() - a2).sqrt();
    let denom = Complex::new(T::one(), T::zero()) - za;
    a.iter()
        .zip(z)
        .map(|(&aj, &zj)| {
            let proj = aj * za / a2;
            (aj - proj - (zj - proj) * s) / denom
        })
        .collect()
}

/// `1 - |phi_z(w)|^2`, evaluated without cancellation.
#[inline]
pub(crate) fn pseudo_depth<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> T {
    let denom = (Complex::new(T::one(), T::zero()) - dot(w, z)).norm_sqr();
    (T::one() - norm_sq(z)) * (T::one() - norm_sq(w)) / denom
}

#[inline]
pub(crate) fn metric_from_depth<T: Real>(d: T) -> T {
    let d = d.min(T::one()).max(T::zero());
    let rho = (T::one() - d).sqrt();
    // atanh(rho) = ln(1 + rho) - ln(1 - rho^2) / 2
    (T::one() + rho).ln() - T::HALF * d.ln()
}

#[inline]
pub(crate) fn bergman_metric_coords<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> T {
    metric_from_depth(pseudo_depth(z, w))
}

/// Bergman metric `atanh |phi_z(w)|`.
pub fn bergman_metric<T: Real>(z: &BallPoint<T>, w: &BallPoint<T>) -> T {
    bergman_metric_coords(z.coords(), w.coords())
}

/// Bergman distance from the origin at Euclidean radius `r`.
pub fn hyperbolic_radius<T: Real>(r: T) -> T {
    r.atanh()
}

/// A unitary map of `C^n` (n <= 2) sending `e_1` to a chosen unit vector.
#[derive(Clone, Debug)]
pub struct Unitary<T: Real> {
    cols: [[Complex<T>; 2]; 2],
    n: usize,
}

impl<T: Real> Unitary<T> {
    pub fn sending_e1_to(zeta: &[Complex<T>]) -> Result<Self> {
        let zero = Complex::new(T::zero(), T::zero());
        match zeta.len() {
            1 => Ok(Self {
                cols: [[zeta[0], zero], [zero, zero]],
                n: 1,
            }),
            2 => Ok(Self {
                cols: [[zeta[0], zeta[1]], [-zeta[1].conj(), zeta[0].conj()]],
                n: 2,
            }),
            n => Err(Error::UnsupportedDimension(n)),
        }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::sending_e1_to(SpherePoint::<T>::e1(n).coords())
    }

    #[inline]
    pub fn apply(&self, z: &[Complex<T>]) -> Coords<T> {
        let mut out = Coords::new();
        if self.n == 1 {
            out.push(self.cols[0][0] * z[0]);
        } else {
            out.push(self.cols[0][0] * z[0] + self.cols[1][0] * z[1]);
            out.push(self.cols[0][1] * z[0] + self.cols[1][1] * z[1]);
        }
        out
    }

    #[inline]
    pub fn apply_inverse(&self, z: &[Complex<T>]) -> Coords<T> {
        let mut out = Coords::new();
        if self.n == 1 {
            out.push(self.cols[0][0].conj() * z[0]);
        } else {
            out.push(self.cols[0][0].conj() * z[0] + self.cols[0][1].conj() * z[1]);
            out.push(self.cols[1][0].conj() * z[0] + self.cols[1][1].conj() * z[1]);
        }
        out
    }
}

/// Result of a boundary slice measurement.
#[derive(Clone, Debug, Serialize)]
pub struct SliceMeasure<T: Real> {
    pub value: T,
    pub nodes_inside: usize,
    /// Fewer than 8 sphere nodes fell inside the slice.
    pub low_confidence: bool,
}

/// `sigma(I(z))`, the measure of the set of vertices whose approach region
/// contains `z`, integrated with a sphere rule.
pub fn boundary_slice_measure<T: Real>(
    z: &BallPoint<T>,
    gamma: Aperture<T>,
    rule: &QuadratureRule<T>,
) -> Result<SliceMeasure<T>> {
    if rule.n != z.dim() {
        return Err(Error::DimensionMismatch(rule.n, z.dim()));
    }
    if z.norm_sq() == T::zero() {
        return Ok(SliceMeasure {
            value: T::one(),
            nodes_inside: rule.len(),
            low_confidence: false,
        });
    }
    let mut inside = 0usize;
    let terms: Vec<T> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(zeta, &w)| {
            if approach_contains(zeta, gamma.value(), z.coords()) {
                inside += 1;
                w
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(SliceMeasure {
        value: crate::scalar::pairwise_sum(&terms),
        nodes_inside: inside,
        low_confidence: inside < 8,
    })
}
