//! Norms, quasinorms and pairings of holomorphic tent spaces and their
//! classical relatives, evaluated on [`HoloFunction`] inputs.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::funcspace::{HoloFunction, TaylorPoly};
use crate::geometry::{dot, norm_sq, Aperture, Coords, SpherePoint, Unitary};
use crate::operators::{apply_frac, FracMode, FracParams};
use crate::quadrature::{
    ball_rule_from_sphere, focused_circle_rule, focused_region_rule, focused_sphere_rule, region_rule, sphere_rule, sup_search, QuadratureRule, RadialMesh,
    RegionShape, RuleKind, SearchDomain, SupSearchOptions,
};
use crate::scalar::{bergman_constant, pairwise_sum, Real};

fn ser_exponent<T: Real, S: Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(x.as_f64())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Num(f64),
    Text(String),
}

fn de_exponent<'de, T: Real, D: Deserializer<'de>>(d: D) -> std::result::Result<T, D::Error> {
    match ExponentRepr::deserialize(d)? {
        ExponentRepr::Num(x) => Ok(T::lit(x)),
        ExponentRepr::Text(s) => match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(T::infinity()),
            other => other.parse::<f64>().map(T::lit).map_err(serde::de::Error::custom),
        },
    }
}

/// Indices of the tent space `T^p_{q,alpha}` with aperture `gamma`.
/// `p` and `q` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "RawSpaceParams<T>")]
pub struct SpaceParams<T: Real> {
    n: usize,
    #[serde(serialize_with = "ser_exponent")]
    p: T,
    #[serde(serialize_with = "ser_exponent")]
    q: T,
    alpha: T,
    gamma: Aperture<T>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Real")]
struct RawSpaceParams<T: Real> {
    n: usize,
    #[serde(deserialize_with = "de_exponent")]
    p: T,
    #[serde(deserialize_with = "de_exponent")]
    q: T,
    #[serde(default)]
    alpha: T,
    #[serde(default)]
    gamma: Aperture<T>,
}

impl<T: Real> TryFrom<RawSpaceParams<T>> for SpaceParams<T> {
    type Error = Error;

    fn try_from(r: RawSpaceParams<T>) -> Result<Self> {
        SpaceParams::new(r.n, r.p, r.q, r.alpha, r.gamma)
    }
}

impl<T: Real> SpaceParams<T> {
    pub fn new(n: usize, p: T, q: T, alpha: T, gamma: Aperture<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if !(p > T::zero()) || !(q > T::zero()) {
            return Err(invalid(format!("exponents must be positive, got p = {p}, q = {q}")));
        }
        let alpha = if q.is_infinite() { T::zero() } else { alpha };
        if !(alpha > -T::of(n + 1)) {
            return Err(invalid(format!("alpha must exceed -n-1, got {alpha}")));
        }
        Ok(Self { n, p, q, alpha, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn gamma(&self) -> Aperture<T> {
        self.gamma
    }

    pub fn with_gamma(mut self, gamma: Aperture<T>) -> Self {
        self.gamma = gamma;
        self
    }
}

/// A computed norm and how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct NormReport<T: Real> {
    pub value: T,
    pub eps_trunc: T,
    pub resolution: String,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl<T: Real> NormReport<T> {
    fn new(value: T, eps_trunc: T, resolution: String) -> Self {
        Self {
            value,
            eps_trunc,
            resolution,
            seed: None,
            notes: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// `alpha' = alpha + (1/q - 1)(n + 1 + alpha)`, the weight of the `q = 1`
/// space containing `HT^p_{q,alpha}`.
pub fn embed_exponent<T: Real>(n: usize, q: T, alpha: T) -> T {
    alpha + (T::one() / q - T::one()) * (T::of(n + 1) + alpha)
}

/// `(1/p - 1) n + (n + 1 + alpha)/q - 1`, the Bergman weight receiving
/// `HT^p_{q,alpha}` for `p <= 1`.
pub fn embed2_exponent<T: Real>(n: usize, p: T, q: T, alpha: T) -> T {
    (T::one() / p - T::one()) * T::of(n) + (T::of(n + 1) + alpha) / q - T::one()
}

/// Sphere rule graded toward the poles of the atoms of `f` (n = 1 handles
/// every pole; n = 2 focuses on the pole closest to the boundary).
pub fn adapted_sphere_rule<T: Real>(f: &HoloFunction<T>, order: usize) -> Result<QuadratureRule<T>> {
    let foci = atom_foci(f);
    adapted_sphere_rule_for(f.dim(), &foci, order)
}

/// Directions and scales `1 - |a|` of the atoms of `f`.
pub fn atom_foci<T: Real>(f: &HoloFunction<T>) -> Vec<(Coords<T>, T)> {
    f.atoms
        .iter()
        .filter_map(|a| {
            let r = norm_sq(&a.pole).sqrt();
            if r > T::lit(0.5) {
                let dir = a.pole.iter().map(|c| c / r).collect();
                Some((dir, (T::one() - r).max(T::lit(1e-9))))
            } else {
                None
            }
        })
        .collect()
}

pub(crate) fn adapted_sphere_rule_for<T: Real>(n: usize, foci: &[(Coords<T>, T)], order: usize) -> Result<QuadratureRule<T>> {
    match n {
        1 => {
            if foci.is_empty() {
                return sphere_rule(1, 4 * order);
            }
            let f: Vec<(T, T)> = foci.iter().map(|(d, s)| (d[0].arg(), *s)).collect();
            focused_circle_rule(&f, order)
        }
        2 => match foci.iter().min_by(|a, b| a.1.partial_cmp(&b.1).unwrap()) {
            Some((d, s)) => focused_sphere_rule(d, *s, order),
            None => sphere_rule(2, 2 * order),
        },
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// Exact-boundary rule for `Gamma_gamma(e_1)` on `|z| <= 1 - eps`.
pub fn approach_template<T: Real>(n: usize, gamma: Aperture<T>, eps: T, order: usize) -> Result<QuadratureRule<T>> {
    region_rule(n, RegionShape::Approach(gamma), eps, order)
}

fn resolution_text<T: Real>(region: &QuadratureRule<T>, sphere: &QuadratureRule<T>) -> String {
    format!("region nodes {}, sphere nodes {}", region.len(), sphere.len())
}

fn check_template<T: Real>(n: usize, region: &QuadratureRule<T>, sphere: &QuadratureRule<T>) -> Result<()> {
    if region.kind != RuleKind::Region {
        return Err(invalid("expected a region template rule"));
    }
    if sphere.kind != RuleKind::Sphere {
        return Err(invalid("expected a sphere rule"));
    }
    if region.n != n {
        return Err(Error::DimensionMismatch(region.n, n));
    }
    if sphere.n != n {
        return Err(Error::DimensionMismatch(sphere.n, n));
    }
    Ok(())
}

/// `int_{Gamma(zeta)} g (1-|z|^2)^alpha dV_n` for every sphere node,
/// using the template rotated to each vertex.
pub fn region_values<T: Real, G>(g: &G, alpha: T, region: &QuadratureRule<T>, sphere: &QuadratureRule<T>) -> Result<Vec<T>>
where
    G: Fn(&[Complex<T>]) -> T + Sync,
{
    let w = region.weights_with_exponent(alpha);
    sphere
        .nodes
        .par_iter()
        .map(|zeta| {
            let u = Unitary::sending_e1_to(zeta)?;
            let terms: Vec<T> = region.nodes.iter().zip(&w).map(|(z, &wi)| wi * g(&u.apply(z))).collect();
            Ok(pairwise_sum(&terms))
        })
        .collect()
}

fn lp_mean<T: Real>(vals: &[T], weights: &[T], p: T) -> T {
    let terms: Vec<T> = vals.iter().zip(weights).map(|(&v, &w)| w * v.powf(p)).collect();
    pairwise_sum(&terms).powf(T::one() / p)
}

/// Tent norm of a nonnegative function `g`, i.e.
/// `( int_S ( int_{Gamma(zeta)} g^q (1-|z|^2)^alpha dV )^{p/q} dsigma )^{1/p}`.
pub fn tent_norm_modulus<T: Real, G>(g: G, sp: &SpaceParams<T>, region: &QuadratureRule<T>, sphere: &QuadratureRule<T>) -> Result<NormReport<T>>
where
    G: Fn(&[Complex<T>]) -> T + Sync,
{
    if sp.q.is_infinite() {
        return Err(invalid("tent_norm needs finite q; use tent_inf_norm"));
    }
    check_template(sp.n, region, sphere)?;
    let q = sp.q;
    let inner = region_values(&|z: &[Complex<T>]| g(z).powf(q), sp.alpha, region, sphere)?;
    let per_zeta: Vec<T> = inner.iter().map(|v| v.powf(T::one() / q)).collect();
    let value = if sp.p.is_infinite() {
        per_zeta.iter().fold(T::zero(), |m, &v| m.max(v))
    } else {
        lp_mean(&per_zeta, &sphere.weights, sp.p)
    };
    let mut rep = NormReport::new(value, region.truncation, resolution_text(region, sphere));
    if sp.p < T::one() || q < T::one() {
        rep.notes.push("quasinorm".into());
    }
    Ok(rep)
}

/// `||f||_{T^p_{q,alpha}}` for finite `q`, with the region template for
/// `sp.gamma()` and a sphere rule.
pub fn tent_norm<T: Real>(f: &HoloFunction<T>, sp: &SpaceParams<T>, region: &QuadratureRule<T>, sphere: &QuadratureRule<T>) -> Result<NormReport<T>> {
    if f.dim() != sp.n {
        return Err(Error::DimensionMismatch(f.dim(), sp.n));
    }
    tent_norm_modulus(|z| f.evaluate(z).norm(), sp, region, sphere)
}

/// Resolution of the per-vertex suprema.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SupGrid<T: Real> {
    /// Truncation: the search stays in `|z| <= 1 - eps`.
    pub eps: T,
    /// Angular order of the seed template.
    pub seed_order: usize,
    pub search: SupSearchOptionsDef,
}

/// Serializable mirror of [`SupSearchOptions`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupSearchOptionsDef {
    pub starts: usize,
    pub sweeps: usize,
    pub golden_iters: usize,
}

impl From<SupSearchOptionsDef> for SupSearchOptions {
    fn from(d: SupSearchOptionsDef) -> Self {
        SupSearchOptions {
            starts: d.starts,
            sweeps: d.sweeps,
            golden_iters: d.golden_iters,
        }
    }
}

impl Default for SupSearchOptionsDef {
    fn default() -> Self {
        let d = SupSearchOptions::default();
        Self {
            starts: d.starts,
            sweeps: d.sweeps,
            golden_iters: d.golden_iters,
        }
    }
}

impl<T: Real> SupGrid<T> {
    pub fn new(eps: T) -> Self {
        Self {
            eps,
            seed_order: 4,
            search: SupSearchOptionsDef::default(),
        }
    }
}

/// Per-vertex suprema of `g` over `Gamma(zeta) ∩ {rmin < |z| <= 1 - eps}`.
pub fn region_sups<T: Real, G>(g: &G, n: usize, gamma: Aperture<T>, rmin: T, grid: &SupGrid<T>, sphere: &QuadratureRule<T>) -> Result<Vec<T>>
where
    G: Fn(&[Complex<T>]) -> T + Sync,
{
    let template = approach_template(n, gamma, grid.eps, grid.seed_order)?;
    let seeds_at_e1: Vec<Coords<T>> = template.nodes.into_iter().filter(|z| norm_sq(z).sqrt() > rmin).collect();
    let opts: SupSearchOptions = grid.search.into();
    sphere
        .nodes
        .par_iter()
        .map(|zeta| {
            let u = Unitary::sending_e1_to(zeta)?;
            let seeds: Vec<Coords<T>> = seeds_at_e1.iter().map(|z| u.apply(z)).collect();
            let domain = SearchDomain::Region {
                zeta: SpherePoint::new(zeta.iter().copied())?,
                gamma,
                eps: grid.eps,
                rmin,
            };
            let res = sup_search(g, &domain, &seeds, &opts);
            Ok(res.value.max(T::zero()))
        })
        .collect()
}

/// `T^p_infinity` norm of a nonnegative function: the `L^p(sigma)` mean of
/// its suprema over approach regions.
pub fn tent_inf_norm_modulus<T: Real, G>(g: G, sp: &SpaceParams<T>, grid: &SupGrid<T>, sphere: &QuadratureRule<T>) -> Result<NormReport<T>>
where
    G: Fn(&[Complex<T>]) -> T + Sync,
{
    tent_inf_norm_annulus(g, sp, T::zero(), grid, sphere)
}

fn tent_inf_norm_annulus<T: Real, G>(g: G, sp: &SpaceParams<T>, rmin: T, grid: &SupGrid<T>, sphere: &QuadratureRule<T>) -> Result<NormReport<T>>
where
    G: Fn(&[Complex<T>]) -> T + Sync,
{
    if sphere.kind != RuleKind::Sphere || sphere.n != sp.n {
        return Err(invalid("expected a sphere rule of matching dimension"));
    }
    let sups = region_sups(&g, sp.n, sp.gamma, rmin, grid, sphere)?;
    let value = if sp.p.is_infinite() {
        sups.iter().fold(T::zero(), |m, &v| m.max(v))
    } else {
        lp_mean(&sups, &sphere.weights, sp.p)
    };
    Ok(NormReport::new(
        value,
        grid.eps,
        format!("sphere nodes {}, seed order {}", sphere.len(), grid.seed_order),
    ))
}

/// `||f||_{T^p_infinity}`; `sp.q` is ignored.
pub fn tent_inf_norm<T: Real>(f: &HoloFunction<T>, sp: &SpaceParams<T>, grid: &SupGrid<T>, sphere: &QuadratureRule<T>) -> Result<NormReport<T>> {
    if f.dim() != sp.n {
        return Err(Error::DimensionMismatch(f.dim(), sp.n));
    }
    tent_inf_norm_modulus(|z| f.evaluate(z).norm(), sp, grid, sphere)
}

/// Grid of tent tops / kernel poles `u`: radii `1 - 2^{-j}` for
/// `j = 0..=levels` (`j = 0` is the origin) times sphere directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CarlesonGrid<T: Real> {
    pub levels: usize,
    /// Directions per level (n = 1) or sphere resolution (n = 2).
    pub directions: usize,
    pub eps: T,
    /// Gauss order of the region and sphere rules.
    pub order: usize,
    /// Local refinement rounds around the best grid point.
    pub refine: usize,
}

impl<T: Real> CarlesonGrid<T> {
    pub fn new(levels: usize, directions: usize, eps: T) -> Self {
        Self {
            levels,
            directions,
            eps,
            order: 12,
            refine: 4,
        }
    }
}

fn grid_directions<T: Real>(n: usize, count: usize, foci: &[(Coords<T>, T)]) -> Result<Vec<Coords<T>>> {
    let mut dirs: Vec<Coords<T>> = match n {
        1 => (0..count)
            .map(|k| {
                let mut c = Coords::new();
                c.push(Complex::from_polar(T::one(), T::TAU() * T::of(k) / T::of(count)));
                c
            })
            .collect(),
        2 => sphere_rule::<T>(2, count)?.nodes,
        n => return Err(Error::UnsupportedDimension(n)),
    };
    dirs.extend(foci.iter().map(|(d, _)| d.clone()));
    Ok(dirs)
}

fn level_radius<T: Real>(j: T) -> T {
    T::one() - T::TWO.powf(-j)
}

/// Rotation of `d` by the phase `e^{i theta}` in the first coordinate plane
/// spanned by `d` (n = 1: multiplication; n = 2: all coordinates).
fn twist<T: Real>(d: &[Complex<T>], theta: T) -> Coords<T> {
    let ph = Complex::from_polar(T::one(), theta);
    if d.len() == 1 {
        return d.iter().map(|c| c * ph).collect();
    }
    let mut out: Coords<T> = d.iter().copied().collect();
    out[0] *= ph;
    out
}

type GridSup<T> = (T, Vec<(T, T)>, usize);

/// Sup of `value(u)` over the grid, then coordinate refinement in
/// `(depth, angle)` around the best point. Returns the best value and the
/// number of grid points skipped.
fn grid_sup<T: Real, V>(n: usize, grid: &CarlesonGrid<T>, foci: &[(Coords<T>, T)], value: V) -> Result<GridSup<T>>
where
    V: Fn(T, &[Complex<T>]) -> Result<Option<T>> + Sync,
{
    let dirs = grid_directions(n, grid.directions, foci)?;
    let mut jobs: Vec<(T, usize)> = vec![(T::zero(), 0)];
    for j in 1..=grid.levels {
        for k in 0..dirs.len() {
            jobs.push((T::of(j), k));
        }
    }
    let vals: Vec<Result<Option<T>>> = jobs
        .par_iter()
        .map(|&(j, k)| value(level_radius(j), &dirs[k]))
        .collect();
    let mut profile = Vec::new();
    let mut skipped = 0;
    let mut best = (T::neg_infinity(), T::zero(), 0usize);
    for (&(j, k), v) in jobs.iter().zip(vals) {
        match v? {
            Some(v) => {
                profile.push((level_radius(j), v));
                if v > best.0 {
                    best = (v, j, k);
                }
            }
            None => skipped += 1,
        }
    }
    if best.0 == T::neg_infinity() {
        return Err(Error::NodeStarvation("every grid point was skipped".into()));
    }
    let (mut bv, mut bj, bk) = best;
    let mut dir: Coords<T> = dirs[bk].clone();
    let mut hj = T::HALF;
    let mut ht = T::PI() / T::of(grid.directions.max(1));
    for _ in 0..grid.refine {
        if bj == T::zero() {
            break;
        }
        let mut cands: Vec<(T, Coords<T>)> = Vec::new();
        for dj in [-hj, hj] {
            if bj + dj > T::zero() {
                cands.push((bj + dj, dir.clone()));
            }
        }
        for dt in [-ht, ht] {
            cands.push((bj, twist(&dir, dt)));
        }
        let cv: Vec<Result<Option<T>>> = cands.par_iter().map(|(j, d)| value(level_radius(*j), d)).collect();
        for ((j, d), v) in cands.into_iter().zip(cv) {
            if let Some(v) = v? {
                profile.push((level_radius(j), v));
                if v > bv {
                    bv = v;
                    bj = j;
                    dir = d;
                }
            }
        }
        hj *= T::HALF;
        ht *= T::HALF;
    }
    Ok((bv, profile, skipped))
}

/// `||f||_{T^infinity_{q,alpha}}`: sup over `u` of
/// `( (1-|u|^2)^{-n} int_{Q(u)} |f|^q (1-|z|^2)^{n+alpha} dV )^{1/q}`.
pub fn carleson_norm<T: Real>(f: &HoloFunction<T>, q: T, alpha: T, grid: &CarlesonGrid<T>) -> Result<NormReport<T>> {
    let n = f.dim();
    if !(q > T::zero() && q.is_finite()) {
        return Err(invalid("q must be positive and finite"));
    }
    let w = T::of(n) + alpha;
    if !(w > -T::one()) {
        return Err(invalid("alpha must exceed -n-1"));
    }
    let foci = atom_foci(f);
    let integrand = |z: &[Complex<T>]| f.evaluate(z).norm().powf(q);
    let templates: Vec<Option<QuadratureRule<T>>> = (0..=grid.levels)
        .map(|j| tent_template(n, level_radius(T::of(j)), grid).map(|r| r.map(|r| r.reweighted(w))))
        .collect::<Result<_>>()?;
    let value = |radius: T, dir: &[Complex<T>]| -> Result<Option<T>> {
        let level = (-(T::one() - radius).log2()).round();
        let owned;
        let rule = if n == 1 && !foci.is_empty() {
            let rel: Vec<(T, T)> = foci.iter().map(|(d, s)| (d[0].arg() - dir[0].arg(), *s)).collect();
            owned = match focused_region_rule(RegionShape::Tent { radius }, grid.eps, grid.order, &rel) {
                Ok(r) => Some(r.reweighted(w)),
                Err(Error::NodeStarvation(_)) => None,
                Err(e) => return Err(e),
            };
            owned.as_ref()
        } else if level_radius(level) == radius && level.as_f64() as usize <= grid.levels {
            templates[level.as_f64() as usize].as_ref()
        } else {
            owned = tent_template(n, radius, grid)?.map(|r| r.reweighted(w));
            owned.as_ref()
        };
        let Some(rule) = rule else { return Ok(None) };
        let u = Unitary::sending_e1_to(dir)?;
        let terms: Vec<T> = rule.nodes.iter().zip(&rule.weights).map(|(z, &wi)| wi * integrand(&u.apply(z))).collect();
        let scale = (T::one() - radius * radius).powi(n as i32);
        Ok(Some(pairwise_sum(&terms) / scale))
    };
    let (best, _, skipped) = grid_sup(n, grid, &foci, value)?;
    let mut rep = NormReport::new(best.max(T::zero()).powf(T::one() / q), grid.eps, grid_text(grid));
    if skipped > 0 {
        rep.notes.push(format!("{skipped} tents skipped for node starvation"));
    }
    Ok(rep)
}

fn grid_text<T: Real>(grid: &CarlesonGrid<T>) -> String {
    format!("levels {}, directions {}, order {}, refine {}", grid.levels, grid.directions, grid.order, grid.refine)
}

/// Tent rule at `radius * e_1`, or `None` when the tent is too thin for
/// the truncation.
fn tent_template<T: Real>(n: usize, radius: T, grid: &CarlesonGrid<T>) -> Result<Option<QuadratureRule<T>>> {
    match region_rule(n, RegionShape::Tent { radius }, grid.eps, grid.order) {
        Ok(r) => Ok(Some(r)),
        Err(Error::NodeStarvation(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Ball rule graded toward `a` and the atom poles of the integrand.
fn kernel_rule<T: Real>(n: usize, a: &[Complex<T>], weight: T, foci: &[(Coords<T>, T)], grid: &CarlesonGrid<T>) -> Result<QuadratureRule<T>> {
    let r = norm_sq(a).sqrt();
    let mesh = RadialMesh::default_with(grid.eps)?;
    let mut all: Vec<(Coords<T>, T)> = foci.to_vec();
    if r > T::zero() {
        all.push((a.iter().map(|c| c / r).collect(), (T::one() - r).max(grid.eps)));
    }
    let sphere = if n == 2 && r > T::zero() {
        focused_sphere_rule(&all.last().unwrap().0, all.last().unwrap().1, grid.order)?
    } else {
        adapted_sphere_rule_for(n, &all, grid.order)?
    };
    ball_rule_from_sphere(weight, &mesh, &sphere)
}

/// The Carleson-measure test of `|f|^q (1-|z|^2)^{n+alpha} dV` against
/// the kernels `(1-|a|^2)^T / |1 - <z,a>|^{n+T}` at every grid pole.
fn kernel_profile<T: Real>(f: &HoloFunction<T>, q: T, alpha: T, big_t: T, grid: &CarlesonGrid<T>) -> Result<(T, Vec<(T, T)>)> {
    let n = f.dim();
    if !(big_t > T::zero()) {
        return Err(Error::Hypothesis(format!("kernel exponent T must be positive, got {big_t}")));
    }
    if !(q > T::zero() && q.is_finite()) {
        return Err(invalid("q must be positive and finite"));
    }
    let w = T::of(n) + alpha;
    let foci = atom_foci(f);
    let value = |radius: T, dir: &[Complex<T>]| -> Result<Option<T>> {
        let a: Coords<T> = dir.iter().map(|c| c * radius).collect();
        let rule = kernel_rule(n, &a, w, &foci, grid)?;
        let e = T::of(n) + big_t;
        let terms: Vec<T> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(z, &wi)| {
                let k = (Complex::new(T::one(), T::zero()) - dot(z, &a)).norm().powf(-e);
                wi * k * f.evaluate(z).norm().powf(q)
            })
            .collect();
        Ok(Some(pairwise_sum(&terms) * (T::one() - radius * radius).powf(big_t)))
    };
    let (best, profile, _) = grid_sup(n, grid, &foci, value)?;
    Ok((best, profile))
}

/// `( sup_a (1-|a|^2)^T int |f|^q (1-|z|^2)^{n+alpha} / |1-<z,a>|^{n+T} dV )^{1/q}`.
pub fn carleson_kernel_norm<T: Real>(f: &HoloFunction<T>, q: T, alpha: T, big_t: T, grid: &CarlesonGrid<T>) -> Result<NormReport<T>> {
    let (best, _) = kernel_profile(f, q, alpha, big_t, grid)?;
    Ok(NormReport::new(best.max(T::zero()).powf(T::one() / q), grid.eps, grid_text(grid)))
}

/// `(R, sup over grid poles with |a| >= R)` for each grid level `R`.
pub fn vanishing_carleson_profile<T: Real>(f: &HoloFunction<T>, q: T, alpha: T, big_t: T, grid: &CarlesonGrid<T>) -> Result<Vec<(T, T)>> {
    let (_, profile) = kernel_profile(f, q, alpha, big_t, grid)?;
    let mut out = Vec::new();
    for j in 0..=grid.levels {
        let r = level_radius(T::of(j));
        let tail = profile
            .iter()
            .filter(|(ra, _)| *ra >= r - T::lit(1e-12))
            .fold(T::zero(), |m, (_, v)| m.max(*v));
        out.push((r, tail));
    }
    Ok(out)
}

/// `||f||_{H^p}` as the largest sphere mean over the mesh radii. A note is
/// attached when the means fail to increase with `r`.
pub fn hardy_norm<T: Real>(f: &HoloFunction<T>, p: T, sphere: &QuadratureRule<T>, radii: &RadialMesh<T>) -> Result<NormReport<T>> {
    if sphere.kind != RuleKind::Sphere || sphere.n != f.dim() {
        return Err(invalid("expected a sphere rule of matching dimension"));
    }
    if !(p > T::zero()) {
        return Err(invalid("p must be positive"));
    }
    let means = hardy_means(f, p, sphere, radii);
    let mut value = T::zero();
    let mut monotone = true;
    let mut prev = T::zero();
    for &(_, m) in &means {
        if m < prev * (T::one() - T::lit(1e-9)) {
            monotone = false;
        }
        prev = m;
        value = value.max(m);
    }
    let mut rep = NormReport::new(value, radii.truncation(), format!("sphere nodes {}, radii {}", sphere.len(), radii.radii.len()));
    if !monotone {
        rep.notes.push("sphere means not monotone in r".into());
    }
    Ok(rep)
}

/// `(r, (int |f(r zeta)|^p dsigma)^{1/p})` for `r = 0` and each mesh radius.
pub fn hardy_means<T: Real>(f: &HoloFunction<T>, p: T, sphere: &QuadratureRule<T>, radii: &RadialMesh<T>) -> Vec<(T, T)> {
    std::iter::once(T::zero())
        .chain(radii.radii.iter().copied())
        .map(|r| {
            let m = sphere.integrate(|zeta| {
                let z: Coords<T> = zeta.iter().map(|c| c * r).collect();
                f.evaluate(&z).norm().powf(p)
            });
            (r, m.powf(T::one() / p))
        })
        .collect()
}

/// `||z^m||^2` against the unnormalized `(1-|z|^2)^beta dV_n`.
fn monomial_weighted_norm_sq<T: Real>(n: usize, beta: T, m: &crate::funcspace::MultiIndex) -> T {
    crate::operators::monomial_norm_sq(n, beta, m) / bergman_constant(n, beta)
}

/// `||f||_{A^p_beta} = ( int |f|^p (1-|z|^2)^beta dV )^{1/p}`; exact for
/// polynomials when `p = 2`.
pub fn bergman_norm<T: Real>(f: &HoloFunction<T>, p: T, beta: T, rule: &QuadratureRule<T>) -> Result<NormReport<T>> {
    if !(beta > -T::one()) {
        return Err(invalid("beta must exceed -1"));
    }
    if p == T::TWO && f.is_polynomial() {
        let s: Vec<T> = f
            .poly
            .terms()
            .map(|(m, c)| c.norm_sqr() * monomial_weighted_norm_sq(f.dim(), beta, m))
            .collect();
        let mut rep = NormReport::new(pairwise_sum(&s).sqrt(), T::zero(), "exact coefficient sum".into());
        rep.notes.push("exact".into());
        return Ok(rep);
    }
    if rule.kind != RuleKind::Ball || rule.n != f.dim() {
        return Err(invalid("expected a ball rule of matching dimension"));
    }
    let v = rule.reweighted(beta).integrate(|z| f.evaluate(z).norm().powf(p));
    Ok(NormReport::new(v.powf(T::one() / p), rule.truncation, format!("ball nodes {}", rule.len())))
}

/// Seeds on radii `1 - 2^{-j}` times directions, plus the atom directions.
pub fn ball_seeds<T: Real>(n: usize, levels: usize, directions: usize, foci: &[(Coords<T>, T)]) -> Result<Vec<Coords<T>>> {
    let dirs = grid_directions(n, directions, foci)?;
    let mut out = vec![Coords::from_elem(Complex::new(T::zero(), T::zero()), n)];
    for j in 1..=levels {
        let r = level_radius(T::of(j));
        out.extend(dirs.iter().map(|d| d.iter().map(|c| c * r).collect::<Coords<T>>()));
    }
    for (d, s) in foci {
        let r = T::one() - *s;
        out.push(d.iter().map(|c| c * r).collect());
    }
    Ok(out)
}

/// `||f||_B = sup (1-|z|^2)|grad f(z)| + |f(0)|` over `|z| <= 1 - eps`.
pub fn bloch_norm<T: Real>(f: &HoloFunction<T>, eps: T, levels: usize, directions: usize) -> Result<NormReport<T>> {
    let n = f.dim();
    let seeds = ball_seeds(n, levels, directions, &atom_foci(f))?;
    let g = |z: &[Complex<T>]| {
        let gr = f.gradient(z);
        let m: T = gr.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        (T::one() - norm_sq(z)) * m
    };
    let res = sup_search(g, &SearchDomain::Ball { eps }, &seeds, &SupSearchOptions::default());
    let f0 = f.evaluate(&Coords::from_elem(Complex::new(T::zero(), T::zero()), n)).norm();
    Ok(NormReport::new(
        res.value.max(T::zero()) + f0,
        eps,
        format!("levels {levels}, directions {directions}"),
    ))
}

/// `|| (1-|z|^2)^t R^{s,t} f ||_{T^p_infinity}`.
pub fn bt_norm<T: Real>(
    f: &HoloFunction<T>,
    p: T,
    fp: &FracParams<T>,
    gamma: Aperture<T>,
    grid: &SupGrid<T>,
    sphere: &QuadratureRule<T>,
    degree: usize,
) -> Result<NormReport<T>> {
    bt_tail(f, p, fp, gamma, T::zero(), grid, sphere, degree)
}

/// [`bt_norm`] with the suprema restricted to the annulus `|z| > r`.
#[allow(clippy::too_many_arguments)]
pub fn bt_tail<T: Real>(
    f: &HoloFunction<T>,
    p: T,
    fp: &FracParams<T>,
    gamma: Aperture<T>,
    r: T,
    grid: &SupGrid<T>,
    sphere: &QuadratureRule<T>,
    degree: usize,
) -> Result<NormReport<T>> {
    if !(p > T::one()) {
        return Err(Error::Hypothesis(format!("p must exceed 1, got {p}")));
    }
    if !(fp.t() > T::zero()) {
        return Err(Error::Hypothesis(format!("t must be positive, got {}", fp.t())));
    }
    if !(r >= T::zero() && r < T::one()) {
        return Err(invalid("annulus radius must lie in [0, 1)"));
    }
    let d = apply_frac(fp, f, FracMode::Derivative, degree)?;
    let g = d.function;
    let t = fp.t();
    let sp = SpaceParams::new(f.dim(), p, T::infinity(), T::zero(), gamma)?;
    let mut rep = tent_inf_norm_annulus(|z| (T::one() - norm_sq(z)).powf(t) * g.evaluate(z).norm(), &sp, r, grid, sphere)?;
    if d.truncated_atoms > 0 {
        rep.notes
            .push(format!("{} atoms truncated, tail bound {}", d.truncated_atoms, d.tail_bound));
    }
    Ok(rep)
}

/// `<f, g>_{n+alpha} = int f conj(g) (1-|z|^2)^{n+alpha} dV` for
/// polynomials, by the coefficient formula.
pub fn pairing_exact<T: Real>(f: &TaylorPoly<T>, g: &TaylorPoly<T>, alpha: T) -> Result<Complex<T>> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let n = f.dim();
    let beta = T::of(n) + alpha;
    if !(beta > -T::one()) {
        return Err(invalid("alpha must exceed -n-1"));
    }
    let mut re = Vec::new();
    let mut im = Vec::new();
    for (m, a) in f.terms() {
        let b = g.coeff(m);
        if b.norm_sqr() == T::zero() {
            continue;
        }
        let v = a * b.conj() * monomial_weighted_norm_sq(n, beta, m);
        re.push(v.re);
        im.push(v.im);
    }
    Ok(Complex::new(pairwise_sum(&re), pairwise_sum(&im)))
}

/// `<f, g>_{n+alpha}` by quadrature.
pub fn pairing_numeric<T: Real>(f: &HoloFunction<T>, g: &HoloFunction<T>, alpha: T, rule: &QuadratureRule<T>) -> Result<Complex<T>> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    if rule.kind != RuleKind::Ball || rule.n != f.dim() {
        return Err(invalid("expected a ball rule of matching dimension"));
    }
    let beta = T::of(f.dim()) + alpha;
    Ok(rule.reweighted(beta).integrate_complex(|z| f.evaluate(z) * g.evaluate(z).conj()))
}

const SERIES_CAP: usize = 2_000_000;

/// `sum_k (e1)_k (e2)_k / (k! (c)_k) x^k`, summed until terms fall below
/// `1e-16` relative.
fn hypergeometric<T: Real>(e1: T, e2: T, c: T, x: Complex<T>) -> Result<Complex<T>> {
    if !(x.norm() < T::one()) {
        return Err(invalid("hypergeometric argument must lie in the unit disc"));
    }
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = term;
    let tol = T::lit(1e-16);
    for k in 0..SERIES_CAP {
        let kf = T::of(k);
        term = term * x * ((e1 + kf) * (e2 + kf) / ((kf + T::one()) * (c + kf)));
        sum += term;
        if k > 4 && term.norm() <= tol * sum.norm().max(T::lit(1e-300)) {
            return Ok(sum);
        }
    }
    Err(invalid("hypergeometric series did not converge"))
}

/// `<f, g>_{n+alpha}` in closed form for polynomial and atom parts.
pub fn pairing_closed_form<T: Real>(f: &HoloFunction<T>, g: &HoloFunction<T>, alpha: T) -> Result<Complex<T>> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let n = f.dim();
    let beta = T::of(n) + alpha;
    if !(beta > -T::one()) {
        return Err(invalid("alpha must exceed -n-1"));
    }
    let c = bergman_constant(n, beta);
    let b = T::of(n + 1) + beta;
    let mut total = pairing_exact(&f.poly, &g.poly, alpha)?;
    // poly against atom: the atom's z^m coefficient is (e)_{|m|}/m! conj(a)^m
    let poly_atom = |p: &TaylorPoly<T>, atom: &crate::funcspace::KernelAtom<T>| -> Complex<T> {
        let abar: Coords<T> = atom.pole.iter().map(|c| c.conj()).collect();
        let mut s = Complex::new(T::zero(), T::zero());
        for (m, coef) in p.terms() {
            let k = m.degree();
            let ak = m.monomial(&abar) * (crate::scalar::pochhammer(atom.exponent, k) / m.factorial::<T>());
            s += coef * (ak * atom.scale).conj() * monomial_weighted_norm_sq(n, beta, m);
        }
        s
    };
    for a in &g.atoms {
        total += poly_atom(&f.poly, a);
    }
    for a in &f.atoms {
        total += poly_atom(&g.poly, a).conj();
        for bb in &g.atoms {
            let x = dot(&bb.pole, &a.pole);
            let h = hypergeometric(a.exponent, bb.exponent, b, x)?;
            total += h * a.scale * bb.scale.conj() / c;
        }
    }
    Ok(total)
}

/// Outcome of a limit pairing.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct PairingLimit<T: Real> {
    pub value: Complex<T>,
    pub profile: Vec<(T, Complex<T>)>,
    pub converged: bool,
    /// Richardson extrapolation of the last two values, assuming a
    /// first-order error in `1 - r`.
    pub extrapolated: Complex<T>,
}

/// Successive values closer than this declare convergence.
pub const PAIRING_LIMIT_TOL: f64 = 1e-6;

/// Default dilation schedule `1 - 2^{-j}`, `j = 1..=40`.
pub fn default_schedule<T: Real>() -> Vec<T> {
    (1..=40).map(|j| level_radius(T::of(j))).collect()
}

/// `lim_{r -> 1} <f_r, g>_{n+alpha}` along `schedule`, each term in closed
/// form.
pub fn pairing_limit<T: Real>(f: &HoloFunction<T>, g: &HoloFunction<T>, alpha: T, schedule: &[T]) -> Result<PairingLimit<T>> {
    if schedule.is_empty() {
        return Err(invalid("empty dilation schedule"));
    }
    let tol = T::lit(PAIRING_LIMIT_TOL);
    let mut profile = Vec::with_capacity(schedule.len());
    let mut converged = false;
    for &r in schedule {
        let v = pairing_closed_form(&f.dilate(r)?, g, alpha)?;
        if let Some((_, prev)) = profile.last() {
            let d: Complex<T> = v - *prev;
            if d.norm() < tol {
                converged = true;
                profile.push((r, v));
                break;
            }
        }
        profile.push((r, v));
    }
    let (r1, v1) = profile[profile.len().saturating_sub(2)];
    let (r2, v2) = *profile.last().unwrap();
    let extrapolated = if r2 != r1 {
        let (h1, h2) = (T::one() - r1, T::one() - r2);
        (v2 * h1 - v1 * h2) / (h1 - h2)
    } else {
        v2
    };
    Ok(PairingLimit {
        value: v2,
        profile,
        converged,
        extrapolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{KernelAtom, MultiIndex};
    use crate::quadrature::ball_rule;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn z1(n: usize) -> HoloFunction<f64> {
        HoloFunction::monomial(MultiIndex::axis(n, 0, 1))
    }

    #[test]
    fn exponent_helpers() {
        assert_eq!(embed_exponent(1, 1.0f64, 0.3), 0.3);
        assert!((embed_exponent(1, 2.0f64, 0.0) - (-1.0)).abs() < 1e-15);
        assert!((embed2_exponent(1, 0.5f64, 2.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn space_params_json() {
        let sp: SpaceParams<f64> = serde_json::from_str(r#"{"n":1,"p":2,"q":"inf","alpha":3.0,"gamma":2.0}"#).unwrap();
        assert!(sp.q().is_infinite());
        assert_eq!(sp.alpha(), 0.0);
        let text = serde_json::to_string(&sp).unwrap();
        assert!(text.contains("\"inf\""));
        assert!(serde_json::from_str::<SpaceParams<f64>>(r#"{"n":1,"p":-1,"q":2}"#).is_err());
    }

    #[test]
    fn bergman_norm_closed_forms() {
        let rule = ball_rule(1, 0.0, &RadialMesh::geometric(1e-8, 0.5).unwrap(), 16).unwrap();
        let one = HoloFunction::constant(1, c(1.0, 0.0));
        assert!((bergman_norm(&one, 2.0, 0.0, &rule).unwrap().value - 1.0).abs() < 1e-14);
        assert!((bergman_norm(&one, 2.0, 1.0, &rule).unwrap().value.powi(2) - 0.5).abs() < 1e-14);
        assert!((bergman_norm(&z1(1), 2.0, 0.0, &rule).unwrap().value.powi(2) - 0.5).abs() < 1e-14);
        // p = 3 by quadrature: int |z|^3 dV_1 = 2/5
        let v = bergman_norm(&z1(1), 3.0, 0.0, &rule).unwrap().value.powi(3);
        assert!((v - 0.4).abs() < 1e-7);
    }

    #[test]
    fn hardy_norm_of_z() {
        let sphere = sphere_rule(1, 32).unwrap();
        let mesh = RadialMesh::geometric(1e-6, 0.5).unwrap();
        let rep = hardy_norm(&z1(1), 2.0, &sphere, &mesh).unwrap();
        assert!((rep.value - 1.0).abs() < 2e-6);
        assert!(rep.notes.is_empty());
    }

    #[test]
    fn bloch_norm_of_z() {
        let rep = bloch_norm(&z1(1), 1e-6, 8, 16).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-9);
        let k = bloch_norm(&HoloFunction::constant(1, c(0.0, 2.0)), 1e-6, 4, 8).unwrap();
        assert!((k.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pairing_spot_value_and_orthogonality() {
        let z = TaylorPoly::monomial(MultiIndex::new([1]), c(1.0, 0.0));
        let z2 = TaylorPoly::monomial(MultiIndex::new([2]), c(1.0, 0.0));
        assert!((pairing_exact(&z, &z, 0.0).unwrap() - c(1.0 / 6.0, 0.0)).norm() < 1e-15);
        assert_eq!(pairing_exact(&z, &z2, 0.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn closed_form_pairing_matches_quadrature() {
        let mesh = RadialMesh::geometric(1e-9, 0.5).unwrap();
        let rule = ball_rule(1, 1.0, &mesh, 96).unwrap();
        let a = KernelAtom::new([c(0.4, 0.3)], 2.5, c(1.0, -0.5)).unwrap();
        let b = KernelAtom::new([c(-0.2, 0.5)], 1.5, c(0.3, 0.0)).unwrap();
        let p = TaylorPoly::from_terms(1, [(MultiIndex::new([0]), c(1.0, 0.0)), (MultiIndex::new([2]), c(0.0, 2.0))]).unwrap();
        let f = HoloFunction::from_atom(a) + HoloFunction::from_poly(p.clone());
        let g = HoloFunction::from_atom(b) + HoloFunction::from_poly(p);
        let exact = pairing_closed_form(&f, &g, 0.0).unwrap();
        let num = pairing_numeric(&f, &g, 0.0, &rule).unwrap();
        assert!((exact - num).norm() < 1e-9, "{exact} vs {num}");
    }

    #[test]
    fn limit_pairing_converges_for_polynomials() {
        let p = HoloFunction::from_poly(TaylorPoly::monomial(MultiIndex::new([1]), c(1.0, 0.0)));
        let lim = pairing_limit(&p, &p, 0.0, &default_schedule()).unwrap();
        assert!(lim.converged);
        assert!((lim.value - c(1.0 / 6.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn tent_norms_of_constants() {
        let gamma = Aperture::new(2.0).unwrap();
        let sp = SpaceParams::new(1, 2.0, 2.0, 0.0, gamma).unwrap();
        let region = approach_template(1, gamma, 1e-8, 16).unwrap();
        let sphere = sphere_rule(1, 16).unwrap();
        let one = HoloFunction::constant(1, c(1.0, 0.0));
        // by rotation invariance the inner integral is the area of Gamma(1)
        let area = region.total_weight();
        let v = tent_norm(&one, &sp, &region, &sphere).unwrap().value;
        assert!((v - area.sqrt()).abs() < 1e-12);
        let three = tent_norm(&one.scaled(c(0.0, 3.0)), &sp, &region, &sphere).unwrap().value;
        assert!((three - 3.0 * v).abs() < 1e-12);
        let zero = tent_norm(&HoloFunction::zero(1), &sp, &region, &sphere).unwrap().value;
        assert_eq!(zero, 0.0);

        let spi = SpaceParams::new(1, 2.0, f64::INFINITY, 0.0, gamma).unwrap();
        let grid = SupGrid::new(1e-6);
        let k = tent_inf_norm(&one.scaled(c(0.6, 0.8)), &spi, &grid, &sphere).unwrap();
        assert!((k.value - 1.0).abs() < 1e-12);
        let zz = tent_inf_norm(&z1(1), &spi, &grid, &sphere).unwrap();
        assert!((zz.value - 1.0).abs() < 1e-5, "{}", zz.value);
    }

    #[test]
    fn carleson_routes_on_constant() {
        let one = HoloFunction::constant(1, c(1.0, 0.0));
        let grid = CarlesonGrid::new(4, 8, 1e-6);
        let a = carleson_norm(&one, 2.0, 0.0, &grid).unwrap().value;
        assert!(a.is_finite() && a > 0.0);
        let finer = CarlesonGrid::new(6, 16, 1e-6);
        let b = carleson_norm(&one, 2.0, 0.0, &finer).unwrap().value;
        assert!((a - b).abs() / b < 0.1);
        let k = carleson_kernel_norm(&one, 2.0, 0.0, 1.0, &grid).unwrap().value;
        assert!(k.is_finite() && k > 0.0);
        let zero = carleson_norm(&HoloFunction::zero(1), 2.0, 0.0, &grid).unwrap().value;
        assert_eq!(zero, 0.0);
    }
}
