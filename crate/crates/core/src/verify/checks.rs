use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::band::{band_result, one_sided_band, BandConfig, RatioBandResult};
use super::family::TestFamily;
use crate::error::{invalid, Error, Result};
use crate::funcspace::{HoloFunction, MixedPoly, MultiIndex, TaylorPoly};
use crate::geometry::{boundary_slice_measure, dot, norm_sq, Aperture, BallPoint, Coords};
use crate::lattice::{generate_lattice, neumann_reconstruct, LatticeStrategy};
use crate::norms::{
    adapted_sphere_rule, adapted_sphere_rule_for, approach_template, bergman_norm, bloch_norm, bt_norm, carleson_kernel_norm,
    carleson_norm, embed2_exponent, embed_exponent, hardy_norm, pairing_closed_form, pairing_exact, pairing_limit, pairing_numeric,
    tent_inf_norm, tent_inf_norm_modulus, tent_norm, tent_norm_modulus, CarlesonGrid, SpaceParams, SupGrid, default_schedule,
};
use crate::operators::{
    apply_frac, frac_multiplier, project_numeric, project_poly, project_unimodular_symbol, FracMode, FracParams, ProjParams,
};
use crate::quadrature::{
    ball_rule, ball_rule_from_sphere, focused_ball_rule, focused_circle_rule, focused_sphere_rule, hyperbolic_disc_rule, sample_ball,
    QuadratureRule, RadialMesh,
};
use crate::scalar::{factorial, ls_slope, pochhammer};

type C = Complex<f64>;

const ONE: C = Complex { re: 1.0, im: 0.0 };

/// Numerical resolution shared by the checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Resolution {
    /// Truncation of region templates and sphere means.
    pub eps: f64,
    pub region_order: usize,
    pub sphere_order: usize,
    /// Truncation of full-ball rules.
    pub ball_eps: f64,
    /// Panel order of focused ball rules.
    pub ball_order: usize,
    pub sup: SupGrid<f64>,
    pub carleson: CarlesonGrid<f64>,
    /// Truncation degree for atoms that must be expanded.
    pub degree: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            region_order: 16,
            sphere_order: 16,
            ball_eps: 1e-8,
            ball_order: 16,
            sup: SupGrid::new(1e-6),
            carleson: CarlesonGrid::new(10, 32, 1e-5),
            degree: 60,
        }
    }
}

impl Resolution {
    fn mesh(&self) -> Result<RadialMesh<f64>> {
        RadialMesh::geometric(self.ball_eps, 0.5)
    }

    fn focused_order(&self, n: usize) -> usize {
        if n == 1 {
            self.ball_order
        } else {
            (self.ball_order / 2).max(4)
        }
    }
}

fn hypothesis(msg: String) -> Error {
    Error::Hypothesis(msg)
}

fn axis_point(n: usize, r: f64) -> Coords<f64> {
    let mut z = Coords::from_elem(C::new(0.0, 0.0), n);
    z[0] = C::new(r, 0.0);
    z
}

fn check_gaps(gaps: &[f64], floor: f64) -> Result<()> {
    if gaps.is_empty() {
        return Err(invalid("empty boundary schedule"));
    }
    for &g in gaps {
        if !(g >= floor && g < 1.0) {
            return Err(invalid(format!("boundary gap {g} must lie in [{floor}, 1)")));
        }
    }
    Ok(())
}

/// `(1-|z|^2)^s int (1-|u|^2)^t |1 - <z,u>|^{-(n+1+t+s)} dV(u)` along
/// `z = (1 - gap) e_1`.
pub fn check_forelli_rudin(n: usize, t: f64, s: f64, gaps: &[f64], res: &Resolution, cfg: &BandConfig) -> Result<RatioBandResult> {
    if !(t > -1.0) {
        return Err(hypothesis(format!("t > -1 fails (t = {t})")));
    }
    if !(s > 0.0) {
        return Err(hypothesis(format!("s > 0 fails (s = {s})")));
    }
    check_gaps(gaps, 10.0 * res.ball_eps)?;
    let mesh = res.mesh()?;
    let e = (n + 1) as f64 + t + s;
    let focus = axis_point(n, 1.0);
    let mut ratios = Vec::with_capacity(gaps.len());
    for &g in gaps {
        let rho = 1.0 - g;
        let rule = focused_ball_rule(t, &mesh, &focus, g, res.focused_order(n))?;
        let v = rule.integrate(|u| (ONE - u[0] * rho).norm().powf(-e));
        ratios.push(v * (1.0 - rho * rho).powf(s));
    }
    Ok(band_result(ratios, gaps.to_vec(), cfg))
}

/// The two parameter regimes of the double-kernel estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrBranch {
    /// `s + n + 1 > max(r, t)` and `r + t - s > n + 1`; bound
    /// `|1 - <z,u>|^{-(r+t-s-n-1)}`.
    Fr1,
    /// `t > s + n + 1 > r` and `r + t > s + n + 1`; bound
    /// `|1 - <z,u>|^{-r} (1-|z|^2)^{-(t-s-n-1)}`.
    Fr2,
}

/// How the two poles move toward the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    Same,
    Different,
}

pub fn validate_fr(n: usize, s: f64, r: f64, t: f64, branch: FrBranch) -> Result<()> {
    let m = s + (n + 1) as f64;
    let req = |ok: bool, what: &str| if ok { Ok(()) } else { Err(hypothesis(format!("{what} fails (s = {s}, r = {r}, t = {t})"))) };
    req(s > -1.0, "s > -1")?;
    req(r > 0.0, "r > 0")?;
    req(t > 0.0, "t > 0")?;
    match branch {
        FrBranch::Fr1 => {
            req(m > r, "s + n + 1 > r")?;
            req(m > t, "s + n + 1 > t")?;
            req(r + t - s > (n + 1) as f64, "r + t - s > n + 1")
        }
        FrBranch::Fr2 => {
            req(t > m, "t > s + n + 1")?;
            req(m > r, "s + n + 1 > r")?;
            req(r + t > m, "r + t > s + n + 1")
        }
    }
}

/// Double-kernel integral over its claimed bound at one pair `(z, u)`.
#[allow(clippy::too_many_arguments)]
pub fn fr_ratio(n: usize, s: f64, r: f64, t: f64, branch: FrBranch, z: &[C], u: &[C], rule: &QuadratureRule<f64>) -> Result<f64> {
    validate_fr(n, s, r, t, branch)?;
    let v = rule
        .reweighted(s)
        .integrate(|w| (ONE - dot(u, w)).norm().powf(-r) * (ONE - dot(z, w)).norm().powf(-t));
    let d = (ONE - dot(z, u)).norm();
    let m = (n + 1) as f64 + s;
    let bound = match branch {
        FrBranch::Fr1 => d.powf(-(r + t - m)),
        FrBranch::Fr2 => d.powf(-r) * (1.0 - norm_sq(z)).powf(-(t - m)),
    };
    Ok(v / bound)
}

#[allow(clippy::too_many_arguments)]
pub fn check_fr_general(
    n: usize,
    s: f64,
    r: f64,
    t: f64,
    branch: FrBranch,
    approach: Approach,
    gaps: &[f64],
    res: &Resolution,
    cfg: &BandConfig,
) -> Result<RatioBandResult> {
    validate_fr(n, s, r, t, branch)?;
    check_gaps(gaps, 10.0 * res.ball_eps)?;
    let mesh = res.mesh()?;
    let mut ratios = Vec::with_capacity(gaps.len());
    for &g in gaps {
        let z = axis_point(n, 1.0 - g);
        let mut u = z.clone();
        match approach {
            Approach::Same => u[0] = C::from_polar(1.0 - g, g),
            Approach::Different => u[0] = -u[0],
        }
        let rule = match (n, approach) {
            (1, _) => {
                let sphere = focused_circle_rule(&[(z[0].arg(), g), (u[0].arg(), g)], res.ball_order)?;
                ball_rule_from_sphere(0.0, &mesh, &sphere)?
            }
            (_, Approach::Same) => focused_ball_rule(0.0, &mesh, &axis_point(n, 1.0), g, res.focused_order(n))?,
            (_, Approach::Different) => return Err(invalid("opposite poles are only resolved for n = 1")),
        };
        ratios.push(fr_ratio(n, s, r, t, branch, &z, &u, &rule)?);
    }
    Ok(band_result(ratios, gaps.to_vec(), cfg))
}

/// Measures tested against the approach-region bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ApproachMeasure {
    /// `delta_z` at `z = (1 - gap) e_1` for each gap.
    PointMasses { gaps: Vec<f64> },
    /// `(1-|z|^2)^b dV` for each weight `b`.
    Volume { weights: Vec<f64> },
}

/// Band of the two sides plus the elementary converse: on `Gamma(zeta)`
/// the ratio `(1-|z|^2)/|1-<z,zeta>|` is at least `2/gamma`, so the left
/// side dominates `(2/gamma)^{lambda s}` times the right side.
#[derive(Clone, Debug, Serialize)]
pub struct ApproachBoundResult {
    pub band: RatioBandResult,
    pub converse_bound: f64,
    pub converse_ok: bool,
    pub pass: bool,
}

pub fn check_approach_bound(
    n: usize,
    s: f64,
    lambda: f64,
    gamma: f64,
    measure: &ApproachMeasure,
    res: &Resolution,
    cfg: &BandConfig,
) -> Result<ApproachBoundResult> {
    if !(s > 0.0) {
        return Err(hypothesis(format!("s > 0 fails (s = {s})")));
    }
    let threshold = n as f64 * 1f64.max(1.0 / s);
    if !(lambda > threshold) {
        return Err(hypothesis(format!("lambda > n max(1, 1/s) = {threshold} fails (lambda = {lambda})")));
    }
    let ap = Aperture::new(gamma)?;
    let e1 = axis_point(n, 1.0);
    let (ratios, params) = match measure {
        ApproachMeasure::PointMasses { gaps } => {
            check_gaps(gaps, 1e-9)?;
            let mut ratios = Vec::with_capacity(gaps.len());
            for &g in gaps {
                let z = BallPoint::on_axis(n, 1.0 - g)?;
                let sphere = focused_sphere_rule(&e1, g, res.focused_order(n))?;
                let depth = 1.0 - z.norm_sq();
                let lhs = sphere.integrate(|zeta| (depth / (ONE - dot(z.coords(), zeta)).norm()).powf(lambda * s));
                let rhs = boundary_slice_measure(&z, ap, &sphere)?.value;
                ratios.push(lhs / rhs);
            }
            (ratios, gaps.clone())
        }
        ApproachMeasure::Volume { weights } => {
            let mesh = res.mesh()?;
            let template = approach_template(n, ap, res.eps, res.region_order)?;
            let mut ratios = Vec::with_capacity(weights.len());
            for &b in weights {
                if !(b > -1.0) {
                    return Err(invalid(format!("volume weight must exceed -1, got {b}")));
                }
                let rule = focused_ball_rule(b, &mesh, &e1, res.ball_eps, res.focused_order(n))?;
                let inner = rule.integrate(|z| ((1.0 - norm_sq(z)) / (ONE - z[0]).norm()).powf(lambda));
                let region: f64 = template.weights_with_exponent(b).iter().sum();
                ratios.push(inner.powf(s) / region.powf(s));
            }
            (ratios, vec![1.0; weights.len()])
        }
    };
    let converse_bound = (2.0 / gamma).powf(lambda * s);
    let converse_ok = ratios.iter().all(|&r| r >= converse_bound * (1.0 - 0.05));
    let band = band_result(ratios, params, cfg);
    let pass = band.pass && converse_ok;
    Ok(ApproachBoundResult {
        band,
        converse_bound,
        converse_ok,
        pass,
    })
}

/// Norm equivalences and inclusions that can be compared member by member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// `||f||_{T^p_{q,alpha}}` against `||(1-|z|^2)^t R^{s,t} f||_{T^p_{q,alpha}}`.
    HTchar,
    /// `bt_norm` with `(s, t)` against `bt_norm` with `(s2, t2)`.
    BTchar,
    /// `carleson_norm(f, q, alpha)` against `carleson_norm(R^{s,t} f, q, alpha + q t)`.
    CTchar,
    /// `||f||_{H^p}` against `||R^{s,t} f||_{T^p_{2, 2t-1-n}}`.
    #[serde(rename = "area")]
    Area,
    /// `||f||_{T^p_{1,alpha'}} <= C ||f||_{T^p_{q,alpha}}` for `q <= 1`.
    #[serde(rename = "embed")]
    Embed,
    /// `||f||_{A^1_beta} <= C ||f||_{T^p_{q,alpha}}` for `p < 1`.
    #[serde(rename = "embed2")]
    Embed2,
    /// `||f||_{T^p_infinity}` against `||f||_{H^p}`.
    #[serde(rename = "HTinf_is_Hardy")]
    HTinfIsHardy,
    /// `||f||_{T^p_{p,alpha}}` against `||f||_{A^p_{n+alpha}}`.
    #[serde(rename = "HTpp_is_Bergman")]
    HTppIsBergman,
}

impl Theorem {
    pub fn one_sided(self) -> bool {
        matches!(self, Theorem::Embed | Theorem::Embed2)
    }
}

fn default_gamma() -> f64 {
    2.0
}

/// Parameters of an equivalence check; unused fields are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub s2: f64,
    #[serde(default)]
    pub t2: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

/// Checks the hypotheses of `theorem`, naming the first one that fails.
pub fn validate_equivalence(theorem: Theorem, ep: &EquivalenceParams) -> Result<()> {
    let EquivalenceParams { n, p, q, alpha, t, t2, .. } = *ep;
    let nf = n as f64;
    let req = |ok: bool, what: String| if ok { Ok(()) } else { Err(hypothesis(what)) };
    let finite_pq = || req(p > 0.0 && p.is_finite() && q > 0.0 && q.is_finite(), format!("0 < p, q < infinity fails (p = {p}, q = {q})"));
    match theorem {
        Theorem::HTchar => {
            finite_pq()?;
            req(q * t + nf + 1.0 + alpha > 0.0, format!("q t + n + 1 + alpha > 0 fails ({})", q * t + nf + 1.0 + alpha))
        }
        Theorem::BTchar => {
            req(p > 1.0 && p.is_finite(), format!("1 < p < infinity fails (p = {p})"))?;
            req(t > 0.0 && t2 > 0.0, format!("t1, t2 > 0 fails (t1 = {t}, t2 = {t2})"))
        }
        Theorem::CTchar => {
            req(q > 1.0 && q.is_finite(), format!("1 < q < infinity fails (q = {q})"))?;
            req(q * t + nf + 1.0 + alpha > 0.0, format!("q t + n + 1 + alpha > 0 fails ({})", q * t + nf + 1.0 + alpha))
        }
        Theorem::Area => {
            req(p > 0.0 && p.is_finite(), format!("0 < p < infinity fails (p = {p})"))?;
            req(t > 0.0, format!("t > 0 fails (t = {t})"))
        }
        Theorem::Embed => {
            finite_pq()?;
            req(q <= 1.0, format!("q <= 1 fails (q = {q})"))
        }
        Theorem::Embed2 => {
            finite_pq()?;
            req(p < 1.0, format!("p < 1 fails (p = {p})"))
        }
        Theorem::HTinfIsHardy => req(p > 0.0 && p.is_finite(), format!("0 < p < infinity fails (p = {p})")),
        Theorem::HTppIsBergman => {
            req(p > 0.0 && p.is_finite(), format!("0 < p < infinity fails (p = {p})"))?;
            req(nf + alpha > -1.0, format!("n + alpha > -1 fails (alpha = {alpha})"))
        }
    }?;
    if alpha <= -nf - 1.0 {
        return Err(hypothesis(format!("alpha > -n - 1 fails (alpha = {alpha})")));
    }
    Ok(())
}

/// `(lhs, rhs)` of the comparison for one function.
pub fn equivalence_sides(theorem: Theorem, ep: &EquivalenceParams, f: &HoloFunction<f64>, res: &Resolution) -> Result<(f64, f64)> {
    validate_equivalence(theorem, ep)?;
    let n = ep.n;
    if f.dim() != n {
        return Err(Error::DimensionMismatch(f.dim(), n));
    }
    let gamma = Aperture::new(ep.gamma)?;
    let sphere = adapted_sphere_rule(f, res.sphere_order)?;
    let template = || approach_template(n, gamma, res.eps, res.region_order);
    let tent = |g: &HoloFunction<f64>, p: f64, q: f64, alpha: f64| -> Result<f64> {
        let sp = SpaceParams::new(n, p, q, alpha, gamma)?;
        Ok(tent_norm(g, &sp, &template()?, &sphere)?.value)
    };
    let deriv = |s: f64, t: f64| -> Result<HoloFunction<f64>> {
        let fp = FracParams::new(n, s, t)?;
        Ok(apply_frac(&fp, f, FracMode::Derivative, res.degree)?.function)
    };
    let ball = || -> Result<QuadratureRule<f64>> { ball_rule_from_sphere(0.0, &res.mesh()?, &sphere) };
    let hardy_mesh = || RadialMesh::geometric(res.eps, 0.5);
    match theorem {
        Theorem::HTchar => {
            let d = deriv(ep.s, ep.t)?;
            let sp = SpaceParams::new(n, ep.p, ep.q, ep.alpha, gamma)?;
            let lhs = tent(f, ep.p, ep.q, ep.alpha)?;
            let t = ep.t;
            let rhs = tent_norm_modulus(|z| (1.0 - norm_sq(z)).powf(t) * d.evaluate(z).norm(), &sp, &template()?, &sphere)?.value;
            Ok((lhs, rhs))
        }
        Theorem::BTchar => {
            let lhs = bt_norm(f, ep.p, &FracParams::new(n, ep.s, ep.t)?, gamma, &res.sup, &sphere, res.degree)?.value;
            let rhs = bt_norm(f, ep.p, &FracParams::new(n, ep.s2, ep.t2)?, gamma, &res.sup, &sphere, res.degree)?.value;
            Ok((lhs, rhs))
        }
        Theorem::CTchar => {
            let d = deriv(ep.s, ep.t)?;
            let lhs = carleson_norm(f, ep.q, ep.alpha, &res.carleson)?.value;
            let rhs = carleson_norm(&d, ep.q, ep.alpha + ep.q * ep.t, &res.carleson)?.value;
            Ok((lhs, rhs))
        }
        Theorem::Area => {
            let d = deriv(ep.s, ep.t)?;
            let lhs = hardy_norm(f, ep.p, &sphere, &hardy_mesh()?)?.value;
            let rhs = tent(&d, ep.p, 2.0, 2.0 * ep.t - 1.0 - n as f64)?;
            Ok((lhs, rhs))
        }
        Theorem::Embed => {
            let a1 = embed_exponent(n, ep.q, ep.alpha);
            Ok((tent(f, ep.p, 1.0, a1)?, tent(f, ep.p, ep.q, ep.alpha)?))
        }
        Theorem::Embed2 => {
            let beta = embed2_exponent(n, ep.p, ep.q, ep.alpha);
            let lhs = bergman_norm(f, 1.0, beta, &ball()?)?.value;
            Ok((lhs, tent(f, ep.p, ep.q, ep.alpha)?))
        }
        Theorem::HTinfIsHardy => {
            let sp = SpaceParams::new(n, ep.p, f64::INFINITY, 0.0, gamma)?;
            let lhs = tent_inf_norm(f, &sp, &res.sup, &sphere)?.value;
            let rhs = hardy_norm(f, ep.p, &sphere, &hardy_mesh()?)?.value;
            Ok((lhs, rhs))
        }
        Theorem::HTppIsBergman => {
            let lhs = tent(f, ep.p, ep.p, ep.alpha)?;
            let rhs = bergman_norm(f, ep.p, n as f64 + ep.alpha, &ball()?)?.value;
            Ok((lhs, rhs))
        }
    }
}

/// Ratio `lhs / rhs` over the family, banded two-sided for equivalences
/// and one-sided for inclusions.
pub fn check_equivalence(theorem: Theorem, ep: &EquivalenceParams, family: &TestFamily, res: &Resolution, cfg: &BandConfig) -> Result<RatioBandResult> {
    validate_equivalence(theorem, ep)?;
    let mut ratios = Vec::with_capacity(family.len());
    for f in &family.members {
        let (lhs, rhs) = equivalence_sides(theorem, ep, f, res)?;
        ratios.push(lhs / rhs);
    }
    let params = family.params.clone();
    Ok(if theorem.one_sided() {
        one_sided_band(ratios, params, cfg)
    } else {
        band_result(ratios, params, cfg)
    })
}

/// Largest observed `out_norm(op f) / in_norm(f)` and the per-member ratios.
#[derive(Clone, Debug, Serialize)]
pub struct OperatorEstimate {
    pub estimate: f64,
    pub ratios: Vec<f64>,
    pub params: Vec<f64>,
}

pub fn estimate_operator_norm<M, Op, In, Out>(members: &[M], params: &[f64], op: Op, in_norm: In, out_norm: Out) -> Result<OperatorEstimate>
where
    Op: Fn(&M) -> Result<HoloFunction<f64>>,
    In: Fn(&M) -> Result<f64>,
    Out: Fn(&M, &HoloFunction<f64>) -> Result<f64>,
{
    if members.len() != params.len() {
        return Err(invalid("one boundary parameter per member"));
    }
    let mut ratios = Vec::with_capacity(members.len());
    for m in members {
        let input = in_norm(m)?;
        if !(input > 0.0 && input.is_finite()) {
            return Err(invalid(format!("input norm must be positive and finite, got {input}")));
        }
        let out = op(m)?;
        ratios.push(out_norm(m, &out)? / input);
    }
    let estimate = ratios.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(OperatorEstimate {
        estimate,
        ratios,
        params: params.to_vec(),
    })
}

fn random_multi_index(n: usize, max_degree: usize, rng: &mut ChaCha8Rng) -> MultiIndex {
    let k = rng.gen_range(0..=max_degree);
    let all = MultiIndex::of_degree(n, k);
    all[rng.gen_range(0..all.len())].clone()
}

/// Seeded symbols `sum c_j z^{m_j} conj(z)^{l_j}` with three terms each.
pub fn random_mixed_symbols(n: usize, count: usize, max_degree: usize, seed: u64) -> Result<Vec<MixedPoly<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut sym = MixedPoly::new(n);
        for _ in 0..3 {
            let m = random_multi_index(n, max_degree, &mut rng);
            let l = random_multi_index(n, max_degree, &mut rng);
            let c = C::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
            sym = sym.with_term(m, l, c)?;
        }
        out.push(sym);
    }
    Ok(out)
}

/// `P_{n+alpha}` from `T^p_{q,alpha}` to `HT^p_{q,alpha}` on random mixed
/// symbols: banded ratios mean no sign of unboundedness.
#[allow(clippy::too_many_arguments)]
pub fn check_projection(
    n: usize,
    p: f64,
    q: f64,
    alpha: f64,
    count: usize,
    max_degree: usize,
    seed: u64,
    res: &Resolution,
    cfg: &BandConfig,
) -> Result<(OperatorEstimate, RatioBandResult)> {
    let sp = SpaceParams::new(n, p, q, alpha, Aperture::default())?;
    if !(q.is_finite() && p.is_finite()) {
        return Err(hypothesis("the projection check needs finite p and q".into()));
    }
    let pp = ProjParams::new(n, n as f64 + alpha)?;
    let symbols = random_mixed_symbols(n, count, max_degree, seed)?;
    let region = approach_template(n, sp.gamma(), res.eps, res.region_order)?;
    let sphere = adapted_sphere_rule_for(n, &[], res.sphere_order)?;
    let est = estimate_operator_norm(
        &symbols,
        &vec![1.0; symbols.len()],
        |sym| Ok(HoloFunction::from_poly(project_poly(&pp, sym)?)),
        |sym| Ok(tent_norm_modulus(|z| sym.evaluate(z).norm(), &sp, &region, &sphere)?.value),
        |_, g| Ok(tent_norm(g, &sp, &region, &sphere)?.value),
    )?;
    // the operator may annihilate a symbol, so only the upper side is banded
    let mut band = band_result(est.ratios.clone(), est.params.clone(), &cfg.without_slope());
    band.one_sided = true;
    band.pass = est.estimate < cfg.band;
    band.offending = None;
    Ok((est, band))
}

/// Growth of the `T^p_infinity` ratio of `P_{n+alpha}` on the unimodular
/// symbols `(conj(1 - <u,a>) / |1 - <u,a>|)^{1+2n+alpha}`, an artifact
/// construction rather than an extremal family.
#[derive(Clone, Debug, Serialize)]
pub struct UnboundednessResult {
    pub ratios: Vec<f64>,
    pub params: Vec<f64>,
    /// Last ratio over first ratio.
    pub growth: f64,
    /// Slope of `log ratio` against `log(1 / (1 - |a|))`.
    pub trend_slope: f64,
    pub required_growth: f64,
    pub pass: bool,
    pub label: String,
}

pub const UNBOUNDED_GROWTH: f64 = 3.0;

pub fn check_unbounded_projection(n: usize, p: f64, alpha: f64, gaps: &[f64], res: &Resolution) -> Result<UnboundednessResult> {
    check_gaps(gaps, res.sup.eps * 10.0)?;
    if gaps.len() < 2 {
        return Err(invalid("the growth check needs at least two members"));
    }
    let sp = SpaceParams::new(n, p, f64::INFINITY, 0.0, Aperture::default())?;
    let pp = ProjParams::new(n, n as f64 + alpha)?;
    let kappa = 1.0 + 2.0 * n as f64 + alpha;
    let dir = axis_point(n, 1.0);
    let sphere_for = |g: f64| adapted_sphere_rule_for(n, &[(dir.clone(), g)], (res.sphere_order / 2).max(4));
    let est = estimate_operator_norm(
        gaps,
        gaps,
        |&g| project_unimodular_symbol(&pp, &axis_point(n, 1.0 - g), kappa, 1e-10, 50_000),
        |&g| Ok(tent_inf_norm_modulus(|_| 1.0, &sp, &res.sup, &sphere_for(g)?)?.value),
        |&g, pf| Ok(tent_inf_norm(pf, &sp, &res.sup, &sphere_for(g)?)?.value),
    )?;
    let growth = est.ratios.last().unwrap() / est.ratios[0];
    let xs: Vec<f64> = gaps.iter().map(|g| -g.ln()).collect();
    let ys: Vec<f64> = est.ratios.iter().map(|r| r.ln()).collect();
    let trend_slope = ls_slope(&xs, &ys);
    Ok(UnboundednessResult {
        pass: growth >= UNBOUNDED_GROWTH && trend_slope > 0.0,
        ratios: est.ratios,
        params: est.params,
        growth,
        trend_slope,
        required_growth: UNBOUNDED_GROWTH,
        label: "unimodular symbols, an artifact construction rather than an extremal family".into(),
    })
}

/// Dilations `f_r` against `f` in `HT^p_{q,alpha}`.
#[derive(Clone, Debug, Serialize)]
pub struct DilationResult {
    pub radii: Vec<f64>,
    /// `||f_r|| / ||f||` per member and radius.
    pub ratios: Vec<Vec<f64>>,
    /// `||f_r - f||` per member and radius.
    pub distances: Vec<Vec<f64>>,
    pub max_ratio: f64,
    pub monotone: bool,
    pub c_max: f64,
    pub pass: bool,
}

pub fn check_dilation(family: &TestFamily, sp: &SpaceParams<f64>, radii: &[f64], c_max: f64, res: &Resolution) -> Result<DilationResult> {
    if radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("dilation radii must increase inside (0, 1)"));
    }
    let region = approach_template(sp.n(), sp.gamma(), res.eps, res.region_order)?;
    let mut ratios = Vec::new();
    let mut distances = Vec::new();
    for f in &family.members {
        let sphere = adapted_sphere_rule(f, res.sphere_order)?;
        let base = tent_norm(f, sp, &region, &sphere)?.value;
        let mut rs = Vec::new();
        let mut ds = Vec::new();
        for &r in radii {
            let fr = f.dilate(r)?;
            let diff = fr.clone() + f.clone() * C::new(-1.0, 0.0);
            rs.push(tent_norm(&fr, sp, &region, &sphere)?.value / base);
            ds.push(tent_norm(&diff, sp, &region, &sphere)?.value);
        }
        ratios.push(rs);
        distances.push(ds);
    }
    let max_ratio = ratios.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let monotone = distances.iter().all(|d| d.windows(2).all(|w| w[1] < w[0]));
    Ok(DilationResult {
        radii: radii.to_vec(),
        ratios,
        distances,
        max_ratio,
        monotone,
        c_max,
        pass: monotone && max_ratio < c_max,
    })
}

/// Which duality statement a pairing check follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualityVariant {
    /// `1 < p, q < infinity`: dual `HT^{p'}_{q',alpha}`, pairing `n + alpha`.
    Duality,
    /// `0 < q <= 1 < p < infinity`: dual `BT^{p'}`, limit pairing `n + alpha'`.
    Duality3,
    /// `0 < p < 1`: dual Bloch, limit pairing
    /// `(1/p - 1) n + (n + 1 + alpha)/q - 1`.
    Duality4,
}

/// `p' = p / (p - 1)` with `1' = infinity`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Weight exponent of the pairing, after checking the variant's range.
pub fn pairing_exponent(variant: DualityVariant, n: usize, p: f64, q: f64, alpha: f64) -> Result<f64> {
    let nf = n as f64;
    match variant {
        DualityVariant::Duality => {
            if !(p > 1.0 && p.is_finite() && q > 1.0 && q.is_finite()) {
                return Err(hypothesis(format!("1 < p, q < infinity fails (p = {p}, q = {q})")));
            }
            Ok(nf + alpha)
        }
        DualityVariant::Duality3 => {
            if !(q > 0.0 && q <= 1.0 && p > 1.0 && p.is_finite()) {
                return Err(hypothesis(format!("0 < q <= 1 < p < infinity fails (p = {p}, q = {q})")));
            }
            Ok(nf + embed_exponent(n, q, alpha))
        }
        DualityVariant::Duality4 => {
            if !(p > 0.0 && p < 1.0 && q > 0.0 && q.is_finite()) {
                return Err(hypothesis(format!("0 < p < 1 fails (p = {p})")));
            }
            Ok(embed2_exponent(n, p, q, alpha))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityResult {
    pub variant: DualityVariant,
    pub weight_exponent: f64,
    /// `|<f,g>| / (||f|| ||g||)` over non-orthogonal pairs.
    pub upper: RatioBandResult,
    /// `max_g |<f,g>| / (||f|| ||g||)` per `f`.
    pub lower: RatioBandResult,
    pub excluded_pairs: usize,
    pub pass: bool,
}

/// Pairs closer to orthogonal than this are left out of the statistics.
const ORTHOGONAL: f64 = 1e-12;

#[allow(clippy::too_many_arguments)]
pub fn check_duality_pairing(
    variant: DualityVariant,
    sp: &SpaceParams<f64>,
    family_f: &TestFamily,
    family_g: &TestFamily,
    dual_t: f64,
    res: &Resolution,
    cfg: &BandConfig,
) -> Result<DualityResult> {
    let n = sp.n();
    let (p, q, alpha) = (sp.p(), sp.q(), sp.alpha());
    let exponent = pairing_exponent(variant, n, p, q, alpha)?;
    if !(exponent > -1.0) {
        return Err(hypothesis(format!("pairing exponent {exponent} must exceed -1")));
    }
    let region = approach_template(n, sp.gamma(), res.eps, res.region_order)?;
    let primal = |f: &HoloFunction<f64>| -> Result<f64> { Ok(tent_norm(f, sp, &region, &adapted_sphere_rule(f, res.sphere_order)?)?.value) };
    let dual = |g: &HoloFunction<f64>| -> Result<f64> {
        let sphere = adapted_sphere_rule(g, res.sphere_order)?;
        match variant {
            DualityVariant::Duality => {
                let dsp = SpaceParams::new(n, conjugate(p), conjugate(q), alpha, sp.gamma())?;
                Ok(tent_norm(g, &dsp, &region, &sphere)?.value)
            }
            DualityVariant::Duality3 => {
                let fp = FracParams::new(n, exponent - n as f64, dual_t)?;
                Ok(bt_norm(g, conjugate(p), &fp, sp.gamma(), &res.sup, &sphere, res.degree)?.value)
            }
            DualityVariant::Duality4 => Ok(bloch_norm(g, res.sup.eps, 12, 32)?.value),
        }
    };
    let pair = |f: &HoloFunction<f64>, g: &HoloFunction<f64>| -> Result<f64> {
        let a = exponent - n as f64;
        Ok(match variant {
            DualityVariant::Duality => pairing_closed_form(f, g, a)?.norm(),
            _ => pairing_limit(f, g, a, &default_schedule())?.value.norm(),
        })
    };
    let fnorms = family_f.members.iter().map(&primal).collect::<Result<Vec<_>>>()?;
    let gnorms = family_g.members.iter().map(&dual).collect::<Result<Vec<_>>>()?;
    let mut upper = Vec::new();
    let mut upper_params = Vec::new();
    let mut lower = Vec::new();
    let mut excluded = 0;
    for (i, f) in family_f.members.iter().enumerate() {
        let mut best = 0.0f64;
        for (j, g) in family_g.members.iter().enumerate() {
            let c = pair(f, g)? / (fnorms[i] * gnorms[j]);
            if c <= ORTHOGONAL {
                excluded += 1;
                continue;
            }
            upper.push(c);
            upper_params.push(family_f.params[i].min(family_g.params[j]));
            best = best.max(c);
        }
        lower.push(best);
    }
    let upper = one_sided_band(upper, upper_params, cfg);
    let lower = band_result(lower, family_f.params.clone(), cfg);
    let pass = upper.pass && lower.pass;
    Ok(DualityResult {
        variant,
        weight_exponent: exponent,
        upper,
        lower,
        excluded_pairs: excluded,
        pass,
    })
}

/// One cell of the duality table: the dual space for `(p, q)`, the pairing
/// it uses, and a coefficient-level check of that pairing on polynomials.
#[derive(Clone, Debug, Serialize)]
pub struct TableCell {
    pub p: f64,
    pub q: f64,
    pub dual: String,
    pub weight_exponent: f64,
    pub limit_pairing: bool,
    /// Relative error of the pairing against the coefficient formula.
    pub pairing_error: f64,
    /// `<z_1, z_1^2>` in the same pairing.
    pub orthogonality: f64,
    pub pass: bool,
}

/// Dual space and pairing exponent for `HT^p_{q,alpha}`.
pub fn dual_description(n: usize, p: f64, q: f64, alpha: f64) -> Result<(String, f64, bool)> {
    if !(p > 0.0 && p.is_finite() && q > 0.0 && q.is_finite()) {
        return Err(invalid(format!("p and q must be positive and finite (p = {p}, q = {q})")));
    }
    let nf = n as f64;
    Ok(if p < 1.0 || (p == 1.0 && q <= 1.0) {
        ("B".into(), embed2_exponent(n, p, q, alpha), true)
    } else if p == 1.0 {
        (format!("CT_{{{},{}}}", conjugate(q), alpha), nf + alpha, true)
    } else if q <= 1.0 {
        (format!("BT^{}", conjugate(p)), nf + embed_exponent(n, q, alpha), true)
    } else {
        (format!("HT^{}_{{{},{}}}", conjugate(p), conjugate(q), alpha), nf + alpha, false)
    })
}

/// Machine-checked grid over `p in {1/2, 1, 2}`, `q in {1/2, 2}`.
pub fn duality_table(n: usize, alpha: f64) -> Result<Vec<TableCell>> {
    let mut out = Vec::new();
    let f = HoloFunction::from_poly(TaylorPoly::from_terms(
        n,
        [
            (MultiIndex::zeros(n), ONE),
            (MultiIndex::axis(n, 0, 1), C::new(0.5, -0.25)),
            (MultiIndex::axis(n, 0, 2), C::new(0.0, 0.3)),
        ],
    )?);
    let z1 = HoloFunction::monomial(MultiIndex::axis(n, 0, 1));
    let z1sq = HoloFunction::monomial(MultiIndex::axis(n, 0, 2));
    for p in [0.5, 1.0, 2.0] {
        for q in [0.5, 2.0] {
            let (dual, exponent, limit) = dual_description(n, p, q, alpha)?;
            let a = exponent - n as f64;
            let exact = pairing_exact(&f.poly, &f.poly, a)?;
            let got = if limit {
                pairing_limit(&f, &f, a, &default_schedule())?.extrapolated
            } else {
                pairing_closed_form(&f, &f, a)?
            };
            let pairing_error = (got - exact).norm() / exact.norm();
            let orthogonality = pairing_closed_form(&z1, &z1sq, a)?.norm();
            out.push(TableCell {
                p,
                q,
                dual,
                weight_exponent: exponent,
                limit_pairing: limit,
                pairing_error,
                orthogonality,
                pass: pairing_error < 1e-6 && orthogonality == 0.0,
            });
        }
    }
    Ok(out)
}

/// Ratio of the kernel-testing and tent-average Carleson norms for every
/// member and kernel exponent.
pub fn check_carleson_routes(family: &TestFamily, q: f64, alpha: f64, exponents: &[f64], res: &Resolution, cfg: &BandConfig) -> Result<RatioBandResult> {
    let mut ratios = Vec::new();
    let mut params = Vec::new();
    for (f, &param) in family.members.iter().zip(&family.params) {
        let base = carleson_norm(f, q, alpha, &res.carleson)?.value;
        for &t in exponents {
            ratios.push(carleson_kernel_norm(f, q, alpha, t, &res.carleson)?.value / base);
            params.push(param);
        }
    }
    Ok(band_result(ratios, params, cfg))
}

/// Quadrature pairing of monomials against the coefficient formula.
#[derive(Clone, Debug, Serialize)]
pub struct PairingIdentityResult {
    pub max_rel_error: f64,
    /// `<z, z>_{n+alpha}` for n = 1, alpha = 0, which should be `1/6`.
    pub spot_value: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn check_pairing_identity(dims: &[usize], alphas: &[f64], max_degree: usize, tol: f64, res: &Resolution) -> Result<PairingIdentityResult> {
    let mesh = res.mesh()?;
    let mut worst = 0.0f64;
    for &n in dims {
        let rule = ball_rule(n, 0.0, &mesh, 2 * max_degree + 4)?;
        for &alpha in alphas {
            for k in 0..=max_degree {
                for m in MultiIndex::of_degree(n, k) {
                    let f = HoloFunction::monomial(m);
                    let num = pairing_numeric(&f, &f, alpha, &rule)?;
                    let exact = pairing_exact(&f.poly, &f.poly, alpha)?;
                    worst = worst.max((num - exact).norm() / exact.norm());
                }
            }
        }
    }
    let z = HoloFunction::monomial(MultiIndex::axis(1, 0, 1));
    let spot_rule = ball_rule(1, 0.0, &mesh, 8)?;
    let spot_value = pairing_numeric(&z, &z, 0.0, &spot_rule)?.re;
    let pass = worst < tol && (spot_value - 1.0 / 6.0).abs() < tol / 6.0;
    Ok(PairingIdentityResult {
        max_rel_error: worst,
        spot_value,
        tol,
        pass,
    })
}

/// Multipliers against kernel coefficient ratios, and the round trip
/// `R_{s,t} R^{s,t} = Id`.
#[derive(Clone, Debug, Serialize)]
pub struct FracOracleResult {
    pub max_multiplier_error: f64,
    pub max_round_trip_error: f64,
    pub pass: bool,
}

pub fn check_frac_oracle(cases: &[(usize, f64, f64)], kmax: usize, degree: usize, trials: usize, seed: u64) -> Result<FracOracleResult> {
    let mut mult = 0.0f64;
    let mut trip = 0.0f64;
    for (ci, &(n, s, t)) in cases.iter().enumerate() {
        let fp = FracParams::new(n, s, t)?;
        let b = (n + 1) as f64 + s;
        for k in 0..=kmax {
            // k-th coefficients of (1-w)^{-(b+t)} and (1-w)^{-b}
            let oracle = (pochhammer(b + t, k) / factorial::<f64>(k)) / (pochhammer(b, k) / factorial::<f64>(k));
            mult = mult.max((frac_multiplier(&fp, k) - oracle).abs() / oracle.abs());
        }
        let fam = super::family::random_polynomials(n, trials, degree, seed.wrapping_add(ci as u64))?;
        for f in &fam.members {
            let d = apply_frac(&fp, f, FracMode::Derivative, 1)?.function;
            let back = apply_frac(&fp, &d, FracMode::Integral, 1)?.function;
            let scale = f.poly.terms().fold(0.0f64, |a, (_, c)| a.max(c.norm()));
            for (m, c) in f.poly.terms() {
                trip = trip.max((back.poly.coeff(m) - c).norm() / scale);
            }
        }
    }
    Ok(FracOracleResult {
        max_multiplier_error: mult,
        max_round_trip_error: trip,
        pass: mult < 1e-10 && trip < 1e-12,
    })
}

/// Exact reproduction of monomials and quadrature projection of mixed
/// symbols at interior points.
#[derive(Clone, Debug, Serialize)]
pub struct ReproducingResult {
    pub exact_error: f64,
    pub numeric_error: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn check_reproducing(dims: &[usize], betas: &[f64], points: usize, tol: f64, seed: u64, res: &Resolution) -> Result<ReproducingResult> {
    let mesh = res.mesh()?;
    let mut exact_error = 0.0f64;
    let mut numeric_error = 0.0f64;
    for &n in dims {
        let rule = ball_rule(n, 0.0, &mesh, if n == 1 { 64 } else { 24 })?;
        let zs = sample_ball::<f64>(n, points, 0.6, seed)?;
        for &beta in betas {
            let pp = ProjParams::new(n, beta)?;
            for k in 0..=6 {
                for m in MultiIndex::of_degree(n, k) {
                    let got = project_poly(&pp, &MixedPoly::from_poly(&TaylorPoly::monomial(m.clone(), ONE)))?;
                    let want = TaylorPoly::monomial(m, ONE);
                    let err = got.terms().chain(want.terms()).fold(0.0f64, |a, (mm, _)| a.max((got.coeff(mm) - want.coeff(mm)).norm()));
                    exact_error = exact_error.max(err);
                }
            }
            for sym in random_mixed_symbols(n, 3, 3, seed ^ 0x5eed)? {
                let exact = project_poly(&pp, &sym)?;
                for z in &zs {
                    let v = project_numeric(&pp, |u| sym.evaluate(u), z, &rule)?;
                    let w = exact.evaluate(z);
                    numeric_error = numeric_error.max((v - w).norm() / w.norm().max(1.0));
                }
            }
        }
    }
    Ok(ReproducingResult {
        exact_error,
        numeric_error,
        tol,
        pass: exact_error == 0.0 && numeric_error < tol,
    })
}

/// `sigma(I(z)) / (1-|z|^2)^n` along `z = (1 - gap) e_1`.
pub fn check_slice_measure(n: usize, gamma: f64, gaps: &[f64], res: &Resolution, cfg: &BandConfig) -> Result<RatioBandResult> {
    check_gaps(gaps, 1e-9)?;
    let ap = Aperture::new(gamma)?;
    let e1 = axis_point(n, 1.0);
    let mut ratios = Vec::with_capacity(gaps.len());
    for &g in gaps {
        let z = BallPoint::on_axis(n, 1.0 - g)?;
        let sphere = focused_sphere_rule(&e1, g, res.focused_order(n))?;
        let m = boundary_slice_measure(&z, ap, &sphere)?;
        ratios.push(m.value / (1.0 - z.norm_sq()).powi(n as i32));
    }
    Ok(band_result(ratios, gaps.to_vec(), cfg))
}

/// Covering, separation and multiplicity of a generated lattice, checked
/// again on independent samples.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeSummary {
    pub points: usize,
    pub n_obs: usize,
    pub max_obs: usize,
    pub covering_radius: f64,
    pub min_separation: f64,
    pub covering_ok: bool,
    pub separation_ok: bool,
    pub pass: bool,
}

pub fn check_lattice(n: usize, r: f64, eps: f64, samples: usize, max_obs: usize, seed: u64) -> Result<LatticeSummary> {
    let mut lat = generate_lattice(n, r, eps, LatticeStrategy::default_for(n, r), seed)?;
    let check = lat.verify(samples, seed.wrapping_add(1))?.clone();
    let sep = lat.min_separation();
    let separation_ok = sep >= r / 2.0;
    Ok(LatticeSummary {
        points: lat.len(),
        n_obs: lat.n_obs,
        max_obs,
        covering_radius: check.covering_radius,
        min_separation: sep,
        covering_ok: check.covering_ok,
        separation_ok,
        pass: check.covering_ok && separation_ok && check.multiplicity_ok && lat.n_obs <= max_obs,
    })
}

/// Residual history of the Neumann-series reconstruction.
#[derive(Clone, Debug, Serialize)]
pub struct NeumannSummary {
    pub residuals: Vec<f64>,
    /// Successive residual ratios up to the first one below `tol`.
    pub ratios: Vec<f64>,
    pub iterations: Option<usize>,
    pub tol: f64,
    pub max_ratio: f64,
    pub refined_cells: usize,
    pub pass: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn check_neumann(
    f: &HoloFunction<f64>,
    r: f64,
    lattice_eps: f64,
    theta: f64,
    alpha: f64,
    max_iter: usize,
    tol: f64,
    max_ratio: f64,
    seed: u64,
) -> Result<NeumannSummary> {
    let n = f.dim();
    let lat = generate_lattice(n, r, lattice_eps, LatticeStrategy::default_for(n, r), seed)?;
    let mesh = RadialMesh::geometric(0.005, 0.5)?;
    let rule = if n == 1 { hyperbolic_disc_rule(0.0, &mesh, 0.1, 16)? } else { ball_rule(n, 0.0, &mesh, 24)? };
    let rec = neumann_reconstruct(f, &lat, theta, alpha, max_iter, tol * 0.1, &rule)?;
    let residuals = rec.residuals;
    let iterations = residuals.iter().position(|&x| x < tol).map(|i| i + 1);
    let upto = iterations.unwrap_or(residuals.len());
    let ratios: Vec<f64> = residuals[..upto].windows(2).map(|w| w[1] / w[0]).collect();
    let worst = ratios.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(NeumannSummary {
        pass: iterations.is_some_and(|k| k <= max_iter) && worst < max_ratio,
        residuals,
        ratios,
        iterations,
        tol,
        max_ratio: worst,
        refined_cells: rec.refined_cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::family::{geometric_schedule, kernel_atoms, random_polynomials};

    fn coarse() -> Resolution {
        Resolution {
            eps: 1e-4,
            region_order: 8,
            sphere_order: 8,
            ball_eps: 1e-6,
            ball_order: 8,
            sup: SupGrid::new(1e-4),
            carleson: CarlesonGrid::new(6, 12, 1e-4),
            degree: 30,
        }
    }

    #[test]
    fn forelli_rudin_matches_series() {
        // n = 1, t = 0: the integral is sum_k c_k^2 rho^{2k} / (k + 1) with
        // c_k the coefficients of (1 - w)^{-(1 + s/2)}
        let s = 1.0;
        let gaps = [0.5, 0.1, 0.01];
        let res = Resolution::default();
        let out = check_forelli_rudin(1, 0.0, s, &gaps, &res, &BandConfig::default()).unwrap();
        for (g, r) in gaps.iter().zip(&out.ratios) {
            let rho2 = (1.0 - g) * (1.0 - g);
            let e = 1.0 + s / 2.0;
            let mut c = 1.0;
            let mut sum = 0.0;
            for k in 0..200_000 {
                sum += c * c * rho2.powi(k) / (k as f64 + 1.0);
                c *= (e + k as f64) / (k as f64 + 1.0);
            }
            let oracle = sum * (1.0 - rho2).powf(s);
            assert!((r - oracle).abs() < 1e-5 * oracle, "{g}: {r} vs {oracle}");
        }
        assert!(matches!(check_forelli_rudin(1, 0.0, -0.5, &gaps, &res, &BandConfig::default()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn fr_validation_names_the_inequality() {
        assert!(validate_fr(1, 0.0, 1.2, 1.5, FrBranch::Fr1).is_ok());
        let err = validate_fr(1, 0.0, 1.2, 0.5, FrBranch::Fr1).unwrap_err().to_string();
        assert!(err.contains("r + t - s > n + 1"), "{err}");
        assert!(validate_fr(1, 0.0, 1.0, 2.5, FrBranch::Fr2).is_ok());
        assert!(validate_fr(1, 0.0, 2.5, 2.5, FrBranch::Fr2).is_err());
    }

    #[test]
    fn fr_degenerate_origin_is_finite() {
        let rule = ball_rule(1, 0.0, &RadialMesh::geometric(1e-6, 0.5).unwrap(), 16).unwrap();
        let z = axis_point(1, 0.0);
        let v = fr_ratio(1, 0.0, 1.2, 1.5, FrBranch::Fr1, &z, &z, &rule).unwrap();
        // both kernels are 1 at the origin, so the ratio is the truncated volume
        assert!((v - 1.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn fr_bands_pass() {
        let gaps = geometric_schedule(0.5, 1e-3);
        let res = Resolution::default();
        for approach in [Approach::Same, Approach::Different] {
            let r = check_fr_general(1, 0.0, 1.2, 1.5, FrBranch::Fr1, approach, &gaps, &res, &BandConfig::default()).unwrap();
            assert!(r.pass, "{approach:?}: {r:?}");
        }
        let r = check_fr_general(1, 0.0, 1.0, 2.5, FrBranch::Fr2, Approach::Same, &gaps, &res, &BandConfig::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn approach_bound_point_masses_and_volumes() {
        let res = Resolution::default();
        let cfg = BandConfig::default();
        let gaps = geometric_schedule(0.5, 1e-3);
        let pm = check_approach_bound(1, 1.0, 2.0, 2.0, &ApproachMeasure::PointMasses { gaps }, &res, &cfg).unwrap();
        assert!(pm.pass, "{pm:?}");
        let vol = check_approach_bound(1, 2.0, 1.5, 2.0, &ApproachMeasure::Volume { weights: vec![0.0, 1.0, 2.0] }, &res, &cfg).unwrap();
        assert!(vol.pass, "{vol:?}");
        let low = check_approach_bound(1, 0.5, 1.5, 2.0, &ApproachMeasure::Volume { weights: vec![0.0] }, &res, &cfg);
        assert!(matches!(low, Err(Error::Hypothesis(_))));
    }

    #[test]
    fn htchar_identity_case_is_exact() {
        let fam = kernel_atoms(1, 2.0, &[0.5, 0.1], 3).unwrap();
        let ep = EquivalenceParams {
            n: 1,
            p: 2.0,
            q: 2.0,
            alpha: 0.0,
            s: 0.0,
            t: 0.0,
            s2: 0.0,
            t2: 0.0,
            gamma: 2.0,
        };
        let r = check_equivalence(Theorem::HTchar, &ep, &fam, &coarse(), &BandConfig::default()).unwrap();
        assert!(r.ratios.iter().all(|&x| (x - 1.0).abs() < 1e-12), "{:?}", r.ratios);
    }

    #[test]
    fn equivalence_guards() {
        let ep = EquivalenceParams {
            n: 1,
            p: 2.0,
            q: 2.0,
            alpha: -1.5,
            s: 0.0,
            t: -0.4,
            s2: 0.0,
            t2: 0.0,
            gamma: 2.0,
        };
        let err = validate_equivalence(Theorem::HTchar, &ep).unwrap_err().to_string();
        assert!(err.contains("q t + n + 1 + alpha > 0"), "{err}");
        assert!(validate_equivalence(Theorem::Embed, &EquivalenceParams { q: 2.0, alpha: 0.0, ..ep }).is_err());
        assert!(validate_equivalence(Theorem::BTchar, &EquivalenceParams { p: 2.0, t: 1.0, t2: 0.0, ..ep }).is_err());
    }

    #[test]
    fn hardy_and_bergman_identifications_on_polynomials() {
        let fam = random_polynomials(1, 3, 4, 9).unwrap();
        let ep = EquivalenceParams {
            n: 1,
            p: 2.0,
            q: 2.0,
            alpha: 0.0,
            s: 0.0,
            t: 1.0,
            s2: 0.0,
            t2: 0.0,
            gamma: 2.0,
        };
        let cfg = BandConfig::default();
        for th in [Theorem::HTinfIsHardy, Theorem::HTppIsBergman, Theorem::Area] {
            let r = check_equivalence(th, &ep, &fam, &coarse(), &cfg).unwrap();
            assert!(r.pass, "{th:?}: {r:?}");
        }
        let emb = check_equivalence(Theorem::Embed, &EquivalenceParams { q: 0.5, ..ep }, &fam, &coarse(), &cfg).unwrap();
        assert!(emb.one_sided && emb.pass, "{emb:?}");
    }

    #[test]
    fn operator_estimate_takes_the_maximum() {
        let est = estimate_operator_norm(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], |&x| Ok(HoloFunction::constant(1, C::new(x, 0.0))), |_| Ok(2.0), |&x, _| Ok(x * x)).unwrap();
        assert_eq!(est.estimate, 4.5);
        assert_eq!(est.ratios, vec![0.5, 2.0, 4.5]);
        assert!(estimate_operator_norm(&[1.0], &[1.0], |_| Ok(HoloFunction::zero(1)), |_| Ok(0.0), |_, _| Ok(1.0)).is_err());
    }

    #[test]
    fn projection_is_banded_on_mixed_symbols() {
        let (est, band) = check_projection(1, 2.0, 2.0, 0.0, 6, 4, 1, &coarse(), &BandConfig::default()).unwrap();
        assert!(band.pass, "{band:?}");
        assert!(est.estimate > 0.0);
    }

    #[test]
    fn dilation_of_polynomials() {
        let fam = random_polynomials(1, 3, 6, 2).unwrap();
        let sp = SpaceParams::new(1, 2.0, 1.0, 0.0, Aperture::default()).unwrap();
        let r = check_dilation(&fam, &sp, &[0.9, 0.99, 0.999], 5.0, &coarse()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(check_dilation(&fam, &sp, &[0.99, 0.9], 5.0, &coarse()).is_err());
    }

    #[test]
    fn duality_exponents_and_table() {
        assert_eq!(conjugate(2.0), 2.0);
        assert!(conjugate(1.0).is_infinite());
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        assert_eq!(pairing_exponent(DualityVariant::Duality, 1, 2.0, 2.0, 0.0).unwrap(), 1.0);
        assert!((pairing_exponent(DualityVariant::Duality4, 1, 0.5, 2.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(pairing_exponent(DualityVariant::Duality3, 1, 2.0, 2.0, 0.0).is_err());
        let table = duality_table(1, 0.0).unwrap();
        assert_eq!(table.len(), 6);
        assert!(table.iter().all(|c| c.pass), "{table:?}");
        assert_eq!(table[0].dual, "B");
        assert!(table[3].dual.starts_with("CT"));
        assert!(table[4].dual.starts_with("BT"));
        assert!(table[5].dual.starts_with("HT") && !table[5].limit_pairing);
    }

    #[test]
    fn duality_lower_constant_on_kernels() {
        let fam = crate::verify::family::bergman_kernels(1, 1.0, &[0.5, 0.2, 0.05], 0).unwrap();
        let sp = SpaceParams::new(1, 2.0, 2.0, 0.0, Aperture::default()).unwrap();
        let r = check_duality_pairing(DualityVariant::Duality, &sp, &fam, &fam, 1.0, &coarse(), &BandConfig::default()).unwrap();
        assert!(r.lower.pass, "{:?}", r.lower);
        assert_eq!(r.weight_exponent, 1.0);
    }

    #[test]
    fn pairing_identity_small() {
        let r = check_pairing_identity(&[1], &[0.0, 1.0], 3, 1e-6, &Resolution::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn frac_oracle_cases() {
        let r = check_frac_oracle(&[(1, 0.0, 1.0), (1, -0.5, 2.0)], 30, 10, 2, 0).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn slice_measure_band_n1() {
        let gaps = geometric_schedule(0.7, 1e-3);
        let r = check_slice_measure(1, 2.0, &gaps, &Resolution::default(), &BandConfig::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
