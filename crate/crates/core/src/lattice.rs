//! Separated coverings of the ball in the Bergman metric, sequence tent
//! spaces over them, and atomic synthesis/analysis with Neumann-series
//! reconstruction.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcspace::{HoloFunction, KernelAtom};
use crate::geometry::{approach_contains, bergman_metric_coords, dot, norm_sq, Aperture, Coords};
use crate::norms::SpaceParams;
use crate::quadrature::{sample_ball, sample_sphere, QuadratureRule, RuleKind};
use crate::scalar::{bergman_constant, pairwise_sum, Real};

/// How lattice points are placed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeStrategy {
    /// Rings at hyperbolic radii `j * ring_step` with about
    /// `circumference / arc_step` points each, alternate rings offset by
    /// half a step (n = 1 only).
    HexPolar { ring_step: f64, arc_step: f64 },
    /// Greedy maximal `r/2`-separated subset of a candidate set ordered by
    /// radius then angle. n = 1 uses dense rings at spacing `r/4`; n = 2
    /// uses `candidates` seeded samples of the invariant measure.
    Greedy { candidates: usize, seed: u64 },
}

impl LatticeStrategy {
    /// HexPolar with steps `1.2 r` and `1.4 r` for n = 1, Greedy otherwise.
    pub fn default_for(n: usize, r: f64) -> Self {
        if n == 1 {
            LatticeStrategy::HexPolar {
                ring_step: 1.2 * r,
                arc_step: 1.4 * r,
            }
        } else {
            LatticeStrategy::Greedy { candidates: 60_000, seed: 0 }
        }
    }
}

/// Outcome of checking the lattice properties on independent samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCheck {
    pub samples: usize,
    /// Largest distance from a sample to its nearest lattice point.
    pub covering_radius: f64,
    pub min_separation: f64,
    pub covering_ok: bool,
    pub separation_ok: bool,
    pub multiplicity_ok: bool,
}

/// An r-lattice `{a_k}` in the Bergman metric on `|z| <= 1 - eps`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Lattice<T: Real> {
    pub n: usize,
    pub r: T,
    pub eps: T,
    pub points: Vec<Coords<T>>,
    /// Largest number of sets `D(a_k, 4r)` containing a sample point.
    #[serde(rename = "N_obs")]
    pub n_obs: usize,
    pub check: LatticeCheck,
    #[serde(skip)]
    index: RadialIndex<T>,
}

/// Points sorted by hyperbolic radius, for pruned neighbor searches.
#[derive(Clone, Debug, Default)]
struct RadialIndex<T> {
    order: Vec<usize>,
    radii: Vec<T>,
}

fn hyp_radius<T: Real>(z: &[Complex<T>]) -> T {
    let r = norm_sq(z).sqrt().min(T::one() - T::epsilon());
    r.atanh()
}

impl<T: Real> RadialIndex<T> {
    fn build(points: &[Coords<T>]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let rad: Vec<T> = points.iter().map(|p| hyp_radius(p)).collect();
        order.sort_by(|&a, &b| rad[a].partial_cmp(&rad[b]).unwrap().then(a.cmp(&b)));
        let radii = order.iter().map(|&i| rad[i]).collect();
        Self { order, radii }
    }

    /// Indices into `order` with `|R_k - R| < reach`.
    fn window(&self, rz: T, reach: T) -> std::ops::Range<usize> {
        let lo = self.radii.partition_point(|&x| x <= rz - reach);
        let hi = self.radii.partition_point(|&x| x < rz + reach);
        lo..hi
    }
}

impl<T: Real> Lattice<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Rebuilds the search index, e.g. after deserialization.
    pub fn reindex(&mut self) {
        self.index = RadialIndex::build(&self.points);
    }

    /// Builds a lattice from given points and checks it on `samples`
    /// seeded points.
    pub fn from_points(n: usize, r: T, eps: T, points: Vec<Coords<T>>, samples: usize, seed: u64) -> Result<Self> {
        if points.iter().any(|p| p.len() != n) {
            return Err(invalid("lattice point of the wrong dimension"));
        }
        let index = RadialIndex::build(&points);
        let mut lat = Self {
            n,
            r,
            eps,
            points,
            n_obs: 0,
            check: LatticeCheck {
                samples: 0,
                covering_radius: f64::INFINITY,
                min_separation: 0.0,
                covering_ok: false,
                separation_ok: false,
                multiplicity_ok: false,
            },
            index,
        };
        lat.verify(samples, seed)?;
        Ok(lat)
    }

    /// Nearest lattice point to `z` (ties to the lowest index) and its
    /// distance.
    pub fn nearest(&self, z: &[Complex<T>]) -> (usize, T) {
        let rz = hyp_radius(z);
        let m = self.index.order.len();
        let start = self.index.radii.partition_point(|&x| x < rz);
        let mut best = (usize::MAX, T::infinity());
        let consider = |pos: usize, best: &mut (usize, T)| {
            let k = self.index.order[pos];
            let d = bergman_metric_coords(z, &self.points[k]);
            if d < best.1 || (d == best.1 && k < best.0) {
                *best = (k, d);
            }
        };
        // walk outward in hyperbolic radius until the radial gap exceeds
        // the best distance found
        let (mut lo, mut hi) = (start, start);
        loop {
            let down = lo > 0 && rz - self.index.radii[lo - 1] <= best.1;
            let up = hi < m && self.index.radii[hi] - rz <= best.1;
            if !down && !up {
                break;
            }
            if up {
                consider(hi, &mut best);
                hi += 1;
            }
            if down {
                lo -= 1;
                consider(lo, &mut best);
            }
        }
        best
    }

    /// Indices `k` with `beta(z, a_k) < reach`.
    pub fn within(&self, z: &[Complex<T>], reach: T) -> Vec<usize> {
        let rz = hyp_radius(z);
        let mut out: Vec<usize> = self
            .index
            .window(rz, reach)
            .map(|pos| self.index.order[pos])
            .filter(|&k| bergman_metric_coords(z, &self.points[k]) < reach)
            .collect();
        out.sort_unstable();
        out
    }

    /// Checks covering, separation and bounded overlap; records `N_obs`.
    pub fn verify(&mut self, samples: usize, seed: u64) -> Result<&LatticeCheck> {
        let pts = check_samples(self.n, samples, self.eps, seed)?;
        let r = self.r;
        let stats: Vec<(T, usize)> = pts
            .par_iter()
            .map(|z| {
                let (_, d) = self.nearest(z);
                (d, self.within(z, T::lit(4.0) * r).len())
            })
            .collect();
        let covering = stats.iter().fold(T::zero(), |m, s| m.max(s.0));
        self.n_obs = stats.iter().map(|s| s.1).max().unwrap_or(0);
        let sep = self.min_separation();
        self.check = LatticeCheck {
            samples,
            covering_radius: covering.as_f64(),
            min_separation: sep.as_f64(),
            covering_ok: covering < r,
            separation_ok: sep >= r * T::HALF,
            multiplicity_ok: self.n_obs > 0,
        };
        Ok(&self.check)
    }

    /// Smallest pairwise Bergman distance.
    pub fn min_separation(&self) -> T {
        let m = self.points.len();
        let res: Vec<T> = (0..m)
            .into_par_iter()
            .map(|pos| {
                let k = self.index.order[pos];
                let rk = self.index.radii[pos];
                let mut best = T::infinity();
                for q in pos + 1..m {
                    if self.index.radii[q] - rk >= best {
                        break;
                    }
                    let d = bergman_metric_coords(&self.points[k], &self.points[self.index.order[q]]);
                    best = best.min(d);
                }
                best
            })
            .collect();
        res.into_iter().fold(T::infinity(), T::min)
    }

    /// Cell index of every node of `rule` (nearest lattice point).
    pub fn cells(&self, rule: &QuadratureRule<T>) -> Vec<usize> {
        rule.nodes.par_iter().map(|z| self.nearest(z).0).collect()
    }
}

/// Half uniform in `dV`, half uniform in the invariant measure, all in
/// `|z| <= 1 - eps`.
fn check_samples<T: Real>(n: usize, count: usize, eps: T, seed: u64) -> Result<Vec<Coords<T>>> {
    let half = count / 2;
    let mut pts = sample_ball::<T>(n, half, T::one() - eps, seed)?;
    pts.extend(sample_invariant::<T>(n, count - half, eps, seed.wrapping_add(1))?);
    Ok(pts)
}

/// Samples of `dV / (1-|z|^2)^{n+1}` restricted to `|z| <= 1 - eps`.
pub fn sample_invariant<T: Real>(n: usize, count: usize, eps: T, seed: u64) -> Result<Vec<Coords<T>>> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(invalid("truncation must lie in (0, 1)"));
    }
    // tabulate the radial law in u = -ln(1 - |z|^2): density s^{n-1} e^{n u}
    let rho = T::one() - eps;
    let umax = -(T::one() - rho * rho).ln().as_f64();
    let m = 4096;
    let du = umax / m as f64;
    let dens = |u: f64| {
        let s = 1.0 - (-u).exp();
        s.powi(n as i32 - 1) * (n as f64 * u).exp()
    };
    let mut cdf = vec![0.0f64; m + 1];
    for i in 0..m {
        let a = i as f64 * du;
        cdf[i + 1] = cdf[i] + 0.5 * du * (dens(a) + dens(a + du));
    }
    let total = cdf[m];
    let dirs = sample_sphere::<T>(n, count, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    Ok(dirs
        .into_iter()
        .map(|d| {
            let x: f64 = rng.gen::<f64>() * total;
            let i = cdf.partition_point(|&c| c < x).clamp(1, m);
            let frac = if cdf[i] > cdf[i - 1] { (x - cdf[i - 1]) / (cdf[i] - cdf[i - 1]) } else { 0.0 };
            let u = (i as f64 - 1.0 + frac) * du;
            let r = (1.0 - (-u).exp()).sqrt().min(rho.as_f64());
            d.iter().map(|c| c * T::lit(r)).collect()
        })
        .collect())
}

fn ring_points<T: Real>(ring_step: f64, arc_step: f64, rmax_hyp: f64) -> Vec<Coords<T>> {
    let mut pts = vec![Coords::from_elem(Complex::new(T::zero(), T::zero()), 1)];
    let mut j = 1usize;
    loop {
        let big_r = (j as f64 * ring_step).min(rmax_hyp);
        let circ = std::f64::consts::PI * (2.0 * big_r).sinh();
        let m = ((circ / arc_step).ceil() as usize).max(3);
        let offset = if j % 2 == 1 { 0.5 } else { 0.0 };
        let rad = big_r.tanh();
        for k in 0..m {
            let th = std::f64::consts::TAU * (k as f64 + offset) / m as f64;
            let mut c = Coords::new();
            c.push(Complex::from_polar(T::lit(rad), T::lit(th)));
            pts.push(c);
        }
        if big_r >= rmax_hyp {
            break;
        }
        j += 1;
    }
    pts
}

/// Keeps candidates at distance `>= sep` from everything kept so far, in
/// the given order.
fn greedy_filter<T: Real>(candidates: Vec<Coords<T>>, sep: T) -> Vec<Coords<T>> {
    let mut kept: Vec<Coords<T>> = Vec::new();
    let mut kept_r: Vec<T> = Vec::new();
    for z in candidates {
        let rz = hyp_radius(&z);
        // kept radii are nondecreasing when candidates come sorted by radius
        let mut ok = true;
        for i in (0..kept.len()).rev() {
            if rz - kept_r[i] >= sep {
                break;
            }
            if bergman_metric_coords(&z, &kept[i]) < sep {
                ok = false;
                break;
            }
        }
        if ok {
            kept.push(z);
            kept_r.push(rz);
        }
    }
    kept
}

fn angle_key<T: Real>(z: &[Complex<T>]) -> (f64, f64) {
    let a0 = z[0].arg().as_f64();
    let a1 = if z.len() > 1 { z[1].arg().as_f64() } else { 0.0 };
    (a0, a1)
}

fn sort_by_radius_then_angle<T: Real>(pts: &mut [Coords<T>]) {
    pts.sort_by(|a, b| {
        let ra = hyp_radius(a).as_f64();
        let rb = hyp_radius(b).as_f64();
        ra.partial_cmp(&rb)
            .unwrap()
            .then(angle_key(a).partial_cmp(&angle_key(b)).unwrap())
    });
}

/// Number of independent samples used to verify a fresh lattice.
pub const LATTICE_CHECK_SAMPLES: usize = 10_000;

/// An r-lattice on `|z| <= 1 - eps`; properties are verified on
/// [`LATTICE_CHECK_SAMPLES`] seeded samples and a covering failure is an
/// error.
pub fn generate_lattice<T: Real>(n: usize, r: T, eps: T, strategy: LatticeStrategy, seed: u64) -> Result<Lattice<T>> {
    if n != 1 && n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(r > T::zero() && r < T::one()) {
        return Err(invalid(format!("lattice radius must lie in (0, 1), got {r}")));
    }
    if !(eps > T::zero() && eps < T::one()) {
        return Err(invalid("truncation must lie in (0, 1)"));
    }
    let rmax_hyp = (T::one() - eps).atanh().as_f64();
    let rf = r.as_f64();
    let mut cands: Vec<Coords<T>> = match (strategy, n) {
        (LatticeStrategy::HexPolar { ring_step, arc_step }, 1) => {
            if !(ring_step > 0.0 && arc_step > 0.0) {
                return Err(invalid("ring and arc steps must be positive"));
            }
            ring_points(ring_step, arc_step, rmax_hyp)
        }
        (LatticeStrategy::HexPolar { .. }, _) => return Err(invalid("hex-polar lattices exist for n = 1 only")),
        (LatticeStrategy::Greedy { .. }, 1) => ring_points(rf / 4.0, rf / 4.0, rmax_hyp),
        (LatticeStrategy::Greedy { candidates, seed }, _) => {
            let mut c = vec![Coords::from_elem(Complex::new(T::zero(), T::zero()), n)];
            c.extend(sample_invariant::<T>(n, candidates, eps, seed)?);
            c
        }
    };
    sort_by_radius_then_angle(&mut cands);
    let points = greedy_filter(cands, r * T::HALF);
    let lat = Lattice::from_points(n, r, eps, points, LATTICE_CHECK_SAMPLES, seed)?;
    if !lat.check.covering_ok {
        return Err(Error::LatticeInvariant(format!(
            "covering radius {} is not below r = {r}; the candidate grid is too coarse",
            lat.check.covering_radius
        )));
    }
    Ok(lat)
}

/// A sequence indexed by lattice points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SeqTent<T: Real> {
    pub values: Vec<Complex<T>>,
}

impl<T: Real> SeqTent<T> {
    pub fn new(lattice: &Lattice<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::DimensionMismatch(values.len(), lattice.len()));
        }
        Ok(Self { values })
    }

    pub fn zeros(lattice: &Lattice<T>) -> Self {
        Self {
            values: vec![Complex::new(T::zero(), T::zero()); lattice.len()],
        }
    }

    /// The sequence with a single unit entry at `k`.
    pub fn unit(lattice: &Lattice<T>, k: usize) -> Self {
        let mut s = Self::zeros(lattice);
        s.values[k] = Complex::new(T::one(), T::zero());
        s
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

/// `( int_S ( sum_{a_k in Gamma(zeta)} |c_k|^q )^{p/q} dsigma )^{1/p}`, with
/// the `q = infinity` variant using the max over the region.
pub fn seq_tent_norm<T: Real>(c: &SeqTent<T>, lattice: &Lattice<T>, p: T, q: T, gamma: Aperture<T>, sphere: &QuadratureRule<T>) -> Result<T> {
    if c.values.len() != lattice.len() {
        return Err(Error::DimensionMismatch(c.values.len(), lattice.len()));
    }
    if sphere.kind != RuleKind::Sphere || sphere.n != lattice.n {
        return Err(invalid("expected a sphere rule of matching dimension"));
    }
    if !(p > T::zero() && q > T::zero()) {
        return Err(invalid("exponents must be positive"));
    }
    let active: Vec<usize> = (0..c.values.len()).filter(|&k| c.values[k].norm_sqr() > T::zero()).collect();
    let per_zeta: Vec<T> = sphere
        .nodes
        .par_iter()
        .map(|zeta| {
            let inside = active
                .iter()
                .filter(|&&k| approach_contains(zeta, gamma.value(), &lattice.points[k]))
                .map(|&k| c.values[k].norm());
            if q.is_infinite() {
                inside.fold(T::zero(), T::max)
            } else {
                let terms: Vec<T> = inside.map(|v| v.powf(q)).collect();
                pairwise_sum(&terms).powf(T::one() / q)
            }
        })
        .collect();
    if p.is_infinite() {
        return Ok(per_zeta.into_iter().fold(T::zero(), T::max));
    }
    let terms: Vec<T> = per_zeta.iter().zip(&sphere.weights).map(|(&v, &w)| w * v.powf(p)).collect();
    Ok(pairwise_sum(&terms).powf(T::one() / p))
}

/// `<c, d>_Z = sum_k c_k conj(d_k) (1-|a_k|^2)^n`.
pub fn seq_pairing<T: Real>(c: &SeqTent<T>, d: &SeqTent<T>, lattice: &Lattice<T>) -> Result<Complex<T>> {
    if c.values.len() != lattice.len() || d.values.len() != lattice.len() {
        return Err(Error::DimensionMismatch(c.values.len(), d.values.len()));
    }
    let terms: Vec<Complex<T>> = c
        .values
        .iter()
        .zip(&d.values)
        .zip(&lattice.points)
        .map(|((a, b), p)| a * b.conj() * (T::one() - norm_sq(p)).powi(lattice.n as i32))
        .collect();
    let re: Vec<T> = terms.iter().map(|t| t.re).collect();
    let im: Vec<T> = terms.iter().map(|t| t.im).collect();
    Ok(Complex::new(pairwise_sum(&re), pairwise_sum(&im)))
}

/// Smallest admissible `theta` is anything above
/// `n max(1, q/p, 1/p, 1/q)`.
pub fn theta_threshold<T: Real>(n: usize, p: T, q: T) -> T {
    let one = T::one();
    T::of(n) * one.max(q / p).max(one / p).max(one / q)
}

/// Exponent of the synthesis atoms, `theta + (n + 1 + alpha)/q`.
pub fn synthesis_exponent<T: Real>(sp: &SpaceParams<T>, theta: T) -> T {
    theta + (T::of(sp.n() + 1) + sp.alpha()) / sp.q()
}

fn check_theta<T: Real>(sp: &SpaceParams<T>, theta: T) -> Result<()> {
    let th = theta_threshold(sp.n(), sp.p(), sp.q());
    if !(theta > th) {
        return Err(Error::Hypothesis(format!("theta = {theta} must exceed n max(1, q/p, 1/p, 1/q) = {th}")));
    }
    Ok(())
}

/// `S c(z) = sum_k c_k (1-|a_k|^2)^theta / (1 - <z,a_k>)^{theta + (n+1+alpha)/q}`
/// as a sum of kernel atoms (zero entries are dropped).
pub fn atomic_synthesis<T: Real>(c: &SeqTent<T>, lattice: &Lattice<T>, theta: T, sp: &SpaceParams<T>) -> Result<HoloFunction<T>> {
    if c.values.len() != lattice.len() {
        return Err(Error::DimensionMismatch(c.values.len(), lattice.len()));
    }
    if sp.n() != lattice.n {
        return Err(Error::DimensionMismatch(sp.n(), lattice.n));
    }
    check_theta(sp, theta)?;
    let e = synthesis_exponent(sp, theta);
    let mut f = HoloFunction::zero(lattice.n);
    for (ck, a) in c.values.iter().zip(&lattice.points) {
        if ck.norm_sqr() == T::zero() {
            continue;
        }
        f.atoms.push(KernelAtom::new(a.iter().copied(), e, *ck)?.with_prefactor(theta));
    }
    Ok(f)
}

/// Direct evaluation of `S c(z)` without building atoms.
pub fn synthesis_value<T: Real>(c: &SeqTent<T>, lattice: &Lattice<T>, theta: T, sp: &SpaceParams<T>, z: &[Complex<T>]) -> Complex<T> {
    let e = synthesis_exponent(sp, theta);
    let one = Complex::new(T::one(), T::zero());
    let terms: Vec<Complex<T>> = c
        .values
        .iter()
        .zip(&lattice.points)
        .map(|(ck, a)| {
            if ck.norm_sqr() == T::zero() {
                return Complex::new(T::zero(), T::zero());
            }
            let w = one - dot(z, a);
            ck * (T::one() - norm_sq(a)).powf(theta) * crate::funcspace::cpow(w, -e)
        })
        .collect();
    let re: Vec<T> = terms.iter().map(|t| t.re).collect();
    let im: Vec<T> = terms.iter().map(|t| t.im).collect();
    Complex::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// `int_{D_k} (1-|z|^2)^{weight} dV` for every cell, from a ball rule;
/// cells that receive no node get a local rule. Returns the volumes and
/// the number of locally refined cells.
pub fn cell_volumes<T: Real>(lattice: &Lattice<T>, weight: T, rule: &QuadratureRule<T>) -> Result<(Vec<T>, usize)> {
    if rule.kind != RuleKind::Ball || rule.n != lattice.n {
        return Err(invalid("cell volumes need a ball rule of matching dimension"));
    }
    let w = rule.weights_with_exponent(weight - rule.weight_exponent);
    let cells = lattice.cells(rule);
    let mut per: Vec<Vec<T>> = vec![Vec::new(); lattice.len()];
    for (k, wi) in cells.into_iter().zip(w) {
        per[k].push(wi);
    }
    let mut refined = 0;
    let mut vols = Vec::with_capacity(lattice.len());
    for (k, terms) in per.into_iter().enumerate() {
        if terms.is_empty() {
            refined += 1;
            vols.push(local_cell_volume(lattice, k, weight)?);
        } else {
            vols.push(pairwise_sum(&terms));
        }
    }
    Ok((vols, refined))
}

/// Cell volume from the Möbius image of a small polar grid around `a_k`.
fn local_cell_volume<T: Real>(lattice: &Lattice<T>, k: usize, weight: T) -> Result<T> {
    let a = &lattice.points[k];
    let n = lattice.n;
    let rho = lattice.r.tanh();
    let one = Complex::new(T::one(), T::zero());
    let a2 = norm_sq(a);
    let radial = 24;
    let dirs = crate::quadrature::sphere_rule::<T>(n, 32)?;
    let mut terms = Vec::new();
    for i in 0..radial {
        let s = rho * (T::of(i) + T::HALF) / T::of(radial);
        let shell = T::of(2 * n) * s.powi(2 * n as i32 - 1) * rho / T::of(radial);
        for (d, &wd) in dirs.nodes.iter().zip(&dirs.weights) {
            let w: Coords<T> = d.iter().map(|c| c * s).collect();
            let z = crate::geometry::mobius_coords(a, &w);
            if lattice.nearest(&z).0 != k {
                continue;
            }
            let jac = ((T::one() - a2) / (one - dot(&w, a)).norm_sqr()).powi(n as i32 + 1);
            terms.push(shell * wd * jac * (T::one() - norm_sq(&z)).powf(weight));
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `c_k = int_{D_k} (1-|z|^2)^{theta+alpha} dV * f(a_k) (1-|a_k|^2)^{-theta}`.
/// Returns the sequence and the number of locally refined cells.
pub fn atomic_analysis<T: Real>(f: &HoloFunction<T>, lattice: &Lattice<T>, theta: T, alpha: T, rule: &QuadratureRule<T>) -> Result<(SeqTent<T>, usize)> {
    if f.dim() != lattice.n {
        return Err(Error::DimensionMismatch(f.dim(), lattice.n));
    }
    let (vols, refined) = cell_volumes(lattice, theta + alpha, rule)?;
    let values = lattice
        .points
        .iter()
        .zip(&vols)
        .map(|(a, &v)| f.evaluate(a) * (v * (T::one() - norm_sq(a)).powf(-theta)))
        .collect();
    Ok((SeqTent { values }, refined))
}

/// Result of the Neumann-series reconstruction.
#[derive(Clone, Debug)]
pub struct Reconstruction<T: Real> {
    pub approximation: HoloFunction<T>,
    /// Sampled sup-norm of `f - approximation` after each iteration.
    pub residuals: Vec<T>,
    /// Residuals stopped decreasing after the third iteration.
    pub diverged: bool,
    pub refined_cells: usize,
}

/// Evaluation points on `|z| <= radius`: a polar grid (n = 1) or radii
/// times a sphere rule (n = 2).
pub fn residual_grid<T: Real>(n: usize, radius: T) -> Result<Vec<Coords<T>>> {
    let levels = 10;
    let sphere = crate::quadrature::sphere_rule::<T>(n, if n == 1 { 64 } else { 12 })?;
    let mut out = vec![Coords::from_elem(Complex::new(T::zero(), T::zero()), n)];
    for i in 1..=levels {
        let r = radius * T::of(i) / T::of(levels);
        out.extend(sphere.nodes.iter().map(|d| d.iter().map(|c| c * r).collect::<Coords<T>>()));
    }
    Ok(out)
}

/// Inverts `c(n, theta+alpha) S T` by its Neumann series, where
/// `T f = (cell volume * f(a_k) (1-|a_k|^2)^{-theta})_k` and `S` is the
/// `q = 1` synthesis. Iterates `g_0 = f`, `g_{m+1} = g_m - c S T g_m` and
/// returns `sum_m c S T g_m`, tracking `sup |f - approx|` on
/// `|z| <= 0.9`.
pub fn neumann_reconstruct<T: Real>(
    f: &HoloFunction<T>,
    lattice: &Lattice<T>,
    theta: T,
    alpha: T,
    max_iter: usize,
    tol: T,
    rule: &QuadratureRule<T>,
) -> Result<Reconstruction<T>> {
    let n = lattice.n;
    if f.dim() != n {
        return Err(Error::DimensionMismatch(f.dim(), n));
    }
    let sp = SpaceParams::new(n, T::TWO, T::one(), alpha, Aperture::default())?;
    check_theta(&sp, theta)?;
    let e = synthesis_exponent(&sp, theta);
    let norm_c = bergman_constant(n, theta + alpha);
    let (vols, refined) = cell_volumes(lattice, theta + alpha, rule)?;
    let one = Complex::new(T::one(), T::zero());
    // S T g = sum_k norm_c vol_k g(a_k) K_k with K_k(z) = (1 - <z,a_k>)^{-e}
    let weights: Vec<T> = vols.iter().map(|&v| v * norm_c).collect();
    let kernel_row = |z: &[Complex<T>]| -> Vec<Complex<T>> {
        lattice.points.iter().map(|a| crate::funcspace::cpow(one - dot(z, a), -e)).collect()
    };
    let gram: Vec<Vec<Complex<T>>> = lattice.points.par_iter().map(|z| kernel_row(z)).collect();
    let grid = residual_grid(n, T::lit(0.9))?;
    let probe: Vec<Vec<Complex<T>>> = grid.par_iter().map(|z| kernel_row(z)).collect();
    let f_grid: Vec<Complex<T>> = grid.iter().map(|z| f.evaluate(z)).collect();
    let apply = |rows: &[Vec<Complex<T>>], coef: &[Complex<T>]| -> Vec<Complex<T>> {
        rows.par_iter()
            .map(|row| {
                let mut s = Complex::new(T::zero(), T::zero());
                for (k, c) in row.iter().zip(coef) {
                    s += k * c;
                }
                s
            })
            .collect()
    };
    let mut g: Vec<Complex<T>> = lattice.points.iter().map(|a| f.evaluate(a)).collect();
    let mut total = vec![Complex::new(T::zero(), T::zero()); lattice.len()];
    let mut residuals = Vec::new();
    let mut diverged = false;
    for it in 0..max_iter {
        let coef: Vec<Complex<T>> = g.iter().zip(&weights).map(|(v, &w)| v * w).collect();
        for (t, c) in total.iter_mut().zip(&coef) {
            *t += c;
        }
        let stg = apply(&gram, &coef);
        for (gi, s) in g.iter_mut().zip(&stg) {
            *gi -= s;
        }
        let approx = apply(&probe, &total);
        let res = f_grid
            .iter()
            .zip(&approx)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max);
        if it >= 3 && res >= *residuals.last().unwrap() {
            diverged = true;
            residuals.push(res);
            break;
        }
        residuals.push(res);
        if res < tol {
            break;
        }
    }
    let mut approximation = HoloFunction::zero(n);
    for (a, c) in lattice.points.iter().zip(&total) {
        if c.norm_sqr() > T::zero() {
            approximation.atoms.push(KernelAtom::new(a.iter().copied(), e, *c)?);
        }
    }
    Ok(Reconstruction {
        approximation,
        residuals,
        diverged,
        refined_cells: refined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{boundary_slice_measure, BallPoint};
    use crate::quadrature::{hyperbolic_disc_rule, sphere_rule, RadialMesh};

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn lattice(r: f64) -> Lattice<f64> {
        generate_lattice(1, r, 0.01, LatticeStrategy::default_for(1, r), 0).unwrap()
    }

    #[test]
    fn disc_lattice_invariants() {
        let lat = lattice(0.3);
        assert!(lat.check.covering_ok && lat.check.separation_ok);
        assert!(lat.n_obs <= 64, "N_obs = {}", lat.n_obs);
        assert!(lat.check.min_separation >= 0.15);
        assert!(lattice(0.2).len() > lattice(0.4).len());
    }

    #[test]
    fn greedy_strategy_is_separated() {
        let lat = generate_lattice(1, 0.4f64, 0.05, LatticeStrategy::Greedy { candidates: 0, seed: 0 }, 3).unwrap();
        assert!(lat.check.separation_ok && lat.check.covering_ok);
        assert!(generate_lattice(1, 1.5f64, 0.05, LatticeStrategy::default_for(1, 1.5), 0).is_err());
    }

    #[test]
    fn nearest_matches_brute_force() {
        let lat = lattice(0.3);
        let pts = sample_ball::<f64>(1, 300, 0.99, 5).unwrap();
        for z in &pts {
            let (k, d) = lat.nearest(z);
            let (bk, bd) = lat
                .points
                .iter()
                .enumerate()
                .map(|(i, a)| (i, bergman_metric_coords(z, a)))
                .fold((usize::MAX, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
            assert_eq!(k, bk);
            assert_eq!(d, bd);
        }
    }

    #[test]
    fn invariant_samples_reach_the_boundary() {
        let s = sample_invariant::<f64>(1, 2000, 0.01, 1).unwrap();
        let near = s.iter().filter(|z| norm_sq(z).sqrt() > 0.9).count();
        assert!(near > 1000);
        assert!(s.iter().all(|z| norm_sq(z).sqrt() <= 0.99 + 1e-12));
    }

    #[test]
    fn seq_norm_of_unit_entry_is_slice_measure() {
        let lat = lattice(0.3);
        let sphere = sphere_rule(1, 4096).unwrap();
        let gamma = Aperture::new(2.0).unwrap();
        let k = lat.len() / 2;
        let v = seq_tent_norm(&SeqTent::unit(&lat, k), &lat, 2.0, 1.0, gamma, &sphere).unwrap();
        let z = BallPoint::new(lat.points[k].iter().copied()).unwrap();
        let s = boundary_slice_measure(&z, gamma, &sphere).unwrap().value;
        assert!((v * v - s).abs() < 1e-12);
        assert_eq!(seq_tent_norm(&SeqTent::zeros(&lat), &lat, 2.0, 1.0, gamma, &sphere).unwrap(), 0.0);
    }

    #[test]
    fn synthesis_evaluates_consistently() {
        let lat = lattice(0.4);
        let sp = SpaceParams::new(1, 2.0, 1.0, 0.0, Aperture::default()).unwrap();
        let vals: Vec<C> = (0..lat.len()).map(|k| c((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
        let seq = SeqTent::new(&lat, vals).unwrap();
        let f = atomic_synthesis(&seq, &lat, 4.0, &sp).unwrap();
        for z in [c(0.1, 0.2), c(-0.7, 0.3)] {
            let a = f.evaluate(&[z]);
            let b = synthesis_value(&seq, &lat, 4.0, &sp, &[z]);
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
        assert!(atomic_synthesis(&seq, &lat, 0.5, &sp).is_err());
        let zero = atomic_synthesis(&SeqTent::zeros(&lat), &lat, 4.0, &sp).unwrap();
        assert!(zero.atoms.is_empty());
    }

    #[test]
    fn analysis_of_constant_is_positive() {
        let lat = lattice(0.4);
        let mesh = RadialMesh::geometric(0.01, 0.5).unwrap();
        let rule = hyperbolic_disc_rule(0.0, &mesh, 0.1, 16).unwrap();
        let (seq, _) = atomic_analysis(&HoloFunction::constant(1, c(1.0, 0.0)), &lat, 4.0, 0.0, &rule).unwrap();
        assert!(seq.values.iter().all(|v| v.re > 0.0 && v.im == 0.0));
        let (vols, refined) = cell_volumes(&lat, 0.0, &rule).unwrap();
        assert_eq!(refined, 0);
        // the cells partition the truncated disc
        assert!((vols.iter().sum::<f64>() - 0.99f64.powi(2)).abs() < 1e-9);
    }

    #[test]
    fn seq_pairing_symmetry() {
        let lat = lattice(0.4);
        let a = SeqTent::new(&lat, (0..lat.len()).map(|k| c(k as f64, 1.0)).collect()).unwrap();
        let b = SeqTent::new(&lat, (0..lat.len()).map(|k| c(1.0, -(k as f64))).collect()).unwrap();
        let ab = seq_pairing(&a, &b, &lat).unwrap();
        let ba = seq_pairing(&b, &a, &lat).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-9);
        assert_eq!(seq_pairing(&a, &SeqTent::zeros(&lat), &lat).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn lattice_json_has_expected_keys() {
        let lat = lattice(0.5);
        let v: serde_json::Value = serde_json::to_value(&lat).unwrap();
        assert!(v.get("N_obs").is_some() && v.get("points").is_some() && v.get("r").is_some());
    }
}
