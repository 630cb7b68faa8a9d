//! Fractional derivatives and integrals as coefficient multipliers, and the
//! weighted Bergman projections (exact on polynomial symbols, by quadrature
//! otherwise).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcspace::{kernel_series_coeffs, truncate_atom, HoloFunction, KernelAtom, MixedPoly, MultiIndex, TaylorPoly};
use crate::geometry::{dot, norm_sq, Coords};
use crate::quadrature::{QuadratureRule, RuleKind};
use crate::scalar::{bergman_constant, factorial, Real};

/// Parameters `(s, t)` of the fractional derivative `R^{s,t}` on `B_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FracParams<T: Real> {
    n: usize,
    s: T,
    t: T,
}

fn is_negative_integer<T: Real>(x: T) -> bool {
    x < T::zero() && x == x.round()
}

impl<T: Real> FracParams<T> {
    /// Rejects parameters with `n + s` or `n + s + t` a negative integer.
    pub fn new(n: usize, s: T, t: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if !s.is_finite() || !t.is_finite() {
            return Err(invalid("s and t must be finite"));
        }
        let ns = T::of(n) + s;
        if is_negative_integer(ns) {
            return Err(Error::Hypothesis(format!("n + s = {ns} is a negative integer")));
        }
        if is_negative_integer(ns + t) {
            return Err(Error::Hypothesis(format!("n + s + t = {} is a negative integer", ns + t)));
        }
        Ok(Self { n, s, t })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// Exponent of the atoms `R^{s,t}` maps exactly.
    pub fn matched_exponent(&self) -> T {
        T::of(self.n + 1) + self.s
    }
}

/// `lambda_k`, the factor `R^{s,t}` applies to degree-`k` terms.
pub fn frac_multiplier<T: Real>(fp: &FracParams<T>, k: usize) -> T {
    let base = fp.matched_exponent();
    let mut lam = T::one();
    for j in 0..k {
        let j = T::of(j);
        lam = lam * (base + fp.t + j) / (base + j);
    }
    lam
}

/// `lambda_0 ..= lambda_kmax` in one pass.
pub fn frac_multipliers<T: Real>(fp: &FracParams<T>, kmax: usize) -> Vec<T> {
    let base = fp.matched_exponent();
    let mut out = Vec::with_capacity(kmax + 1);
    let mut lam = T::one();
    out.push(lam);
    for j in 0..kmax {
        let j = T::of(j);
        lam = lam * (base + fp.t + j) / (base + j);
        out.push(lam);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FracMode {
    Derivative,
    Integral,
}

/// Output of [`apply_frac`] with a record of atoms that had to be expanded.
#[derive(Clone, Debug)]
pub struct FracResult<T: Real> {
    pub function: HoloFunction<T>,
    /// Atoms whose exponent did not match and were truncated first.
    pub truncated_atoms: usize,
    /// Sum of the reported tail bounds of those truncations.
    pub tail_bound: T,
}

fn exponent_matches<T: Real>(e: T, target: T) -> bool {
    (e - target).abs() <= T::lit(1e-12) * (T::one() + target.abs())
}

/// `R^{s,t}` (derivative) or `R_{s,t}` (integral) on a holomorphic function.
/// Polynomials are handled exactly; atoms with the matched exponent get
/// their exponent shifted; any other atom is truncated to `degree` first.
pub fn apply_frac<T: Real>(fp: &FracParams<T>, f: &HoloFunction<T>, mode: FracMode, degree: usize) -> Result<FracResult<T>> {
    if f.dim() != fp.n {
        return Err(Error::DimensionMismatch(f.dim(), fp.n));
    }
    let (from, shift) = match mode {
        FracMode::Derivative => (fp.matched_exponent(), fp.t),
        FracMode::Integral => (fp.matched_exponent() + fp.t, -fp.t),
    };
    let mut poly = f.poly.clone();
    let mut atoms = Vec::with_capacity(f.atoms.len());
    let mut truncated = 0;
    let mut tail = T::zero();
    for a in &f.atoms {
        if exponent_matches(a.exponent, from) {
            atoms.push(KernelAtom {
                pole: a.pole.clone(),
                exponent: a.exponent + shift,
                scale: a.scale,
            });
        } else {
            let tr = truncate_atom(a, degree)?;
            poly = poly + tr.poly;
            tail += tr.tail_bound;
            truncated += 1;
        }
    }
    let kmax = poly.degree();
    let lam = frac_multipliers(fp, kmax);
    let poly = match mode {
        FracMode::Derivative => poly.map_by_degree(|k| lam[k]),
        FracMode::Integral => poly.map_by_degree(|k| T::one() / lam[k]),
    };
    Ok(FracResult {
        function: HoloFunction { poly, atoms },
        truncated_atoms: truncated,
        tail_bound: tail,
    })
}

/// Largest discrepancy, over `points`, between the multiplier route and the
/// integral representation of `R^{s,t}` (derivative mode, needs `s > -1`,
/// `t > 0`) or `R_{s,t}` (integral mode, needs `t > 0`, `s + t > -1`).
pub fn frac_integral_formula_check<T: Real>(
    fp: &FracParams<T>,
    mode: FracMode,
    f: &TaylorPoly<T>,
    rule: &QuadratureRule<T>,
    points: &[Coords<T>],
) -> Result<T> {
    let (s, t, n) = (fp.s, fp.t, fp.n);
    let (weight, exponent) = match mode {
        FracMode::Derivative => {
            if !(s > -T::one() && t > T::zero()) {
                return Err(Error::Hypothesis(format!("derivative formula needs s > -1 and t > 0 (s = {s}, t = {t})")));
            }
            (s, T::of(1 + n) + s + t)
        }
        FracMode::Integral => {
            if !(t > T::zero() && s + t > -T::one()) {
                return Err(Error::Hypothesis(format!("integral formula needs t > 0 and s + t > -1 (s = {s}, t = {t})")));
            }
            (s + t, T::of(1 + n) + s)
        }
    };
    if rule.kind != RuleKind::Ball || rule.n != n {
        return Err(invalid("the formula check needs a ball rule of matching dimension"));
    }
    let exact = apply_frac(fp, &HoloFunction::from_poly(f.clone()), mode, 1)?.function;
    let c = bergman_constant(n, weight);
    let weighted = rule.reweighted(weight);
    let mut worst = T::zero();
    for z in points {
        let via_integral = weighted.integrate_complex(|u| {
            let w = Complex::new(T::one(), T::zero()) - dot(z, u);
            f.evaluate(u) * w.powf(-exponent)
        }) * c;
        worst = worst.max((via_integral - exact.evaluate(z)).norm());
    }
    Ok(worst)
}

/// Parameters of the projection `P_beta` on `B_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProjParams<T: Real> {
    n: usize,
    beta: T,
}

impl<T: Real> ProjParams<T> {
    pub fn new(n: usize, beta: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if !(beta > -T::one()) {
            return Err(invalid(format!("projection weight must exceed -1, got {beta}")));
        }
        Ok(Self { n, beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// `c(n, beta) = Gamma(n + beta + 1) / (n! Gamma(beta + 1))`.
    pub fn constant(&self) -> T {
        bergman_constant(self.n, self.beta)
    }

    /// `n + 1 + beta`, the kernel exponent.
    pub fn kernel_exponent(&self) -> T {
        T::of(self.n + 1) + self.beta
    }
}

/// `||z^m||^2` in `L^2` of the probability measure `c(n,b)(1-|z|^2)^b dV`,
/// i.e. `m! / (n+1+b)_{|m|}`.
pub fn monomial_norm_sq<T: Real>(n: usize, beta: T, m: &MultiIndex) -> T {
    let a = T::of(n + 1) + beta;
    let mut acc = T::one();
    let mut j = 0usize;
    for &mi in m.entries() {
        for i in 1..=mi {
            acc *= T::lit(i as f64) / (a + T::of(j));
            j += 1;
        }
    }
    acc
}

/// Exact `P_beta` of a combination of `z^m conj(z)^l`:
/// `P(z^m conj(z)^l) = (m!/k!) (n+1+beta)_{|k|} / (n+1+beta)_{|m|} z^k` with
/// `k = m - l` when `m >= l`, and zero otherwise.
pub fn project_poly<T: Real>(pp: &ProjParams<T>, symbol: &MixedPoly<T>) -> Result<TaylorPoly<T>> {
    if symbol.n != pp.n {
        return Err(Error::DimensionMismatch(symbol.n, pp.n));
    }
    let a = pp.kernel_exponent();
    let mut out = TaylorPoly::zero(pp.n);
    for (m, l, c) in &symbol.terms {
        let Some(k) = m.checked_sub(l) else { continue };
        // product over the |l| removed factors, paired numerator/denominator
        let mut factor = T::one();
        let mut j = k.degree();
        for (&mi, &ki) in m.entries().iter().zip(k.entries()) {
            for i in (ki + 1)..=mi {
                factor *= T::lit(i as f64) / (a + T::of(j));
                j += 1;
            }
        }
        out.add_term(k, c * factor);
    }
    Ok(out)
}

fn check_pole_distance<T: Real>(z: &[Complex<T>], rule: &QuadratureRule<T>) -> Result<()> {
    if rule.kind != RuleKind::Ball {
        return Err(invalid("projection quadrature needs a ball rule"));
    }
    if z.len() != rule.n {
        return Err(Error::DimensionMismatch(z.len(), rule.n));
    }
    let r = norm_sq(z).sqrt();
    if !(T::one() - r >= rule.truncation) {
        return Err(Error::NodeStarvation(format!(
            "kernel pole at |z| = {r} is closer to the boundary than the truncation {}",
            rule.truncation
        )));
    }
    Ok(())
}

/// `P_beta F(z)` by quadrature of the kernel integral.
pub fn project_numeric<T: Real, F>(pp: &ProjParams<T>, f: F, z: &[Complex<T>], rule: &QuadratureRule<T>) -> Result<Complex<T>>
where
    F: Fn(&[Complex<T>]) -> Complex<T> + Sync,
{
    check_pole_distance(z, rule)?;
    let e = pp.kernel_exponent();
    let weighted = rule.reweighted(pp.beta);
    let v = weighted.integrate_complex(|u| {
        let w = Complex::new(T::one(), T::zero()) - dot(z, u);
        f(u) * crate::funcspace::cpow(w, -e)
    });
    Ok(v * pp.constant())
}

/// Modulus-kernel projection
/// `c(n,beta) int (1-|u|^2)^beta |F(u)| / |1 - <z,u>|^{n+1+beta+extra_t} dV(u)`.
pub fn project_maximal<T: Real, F>(pp: &ProjParams<T>, extra_t: T, f: F, z: &[Complex<T>], rule: &QuadratureRule<T>) -> Result<T>
where
    F: Fn(&[Complex<T>]) -> T + Sync,
{
    if !(extra_t >= T::zero()) {
        return Err(invalid("extra_t must be nonnegative"));
    }
    check_pole_distance(z, rule)?;
    let e = pp.kernel_exponent() + extra_t;
    let weighted = rule.reweighted(pp.beta);
    let v = weighted.integrate(|u| {
        let w = (Complex::new(T::one(), T::zero()) - dot(z, u)).norm();
        f(u) * w.powf(-e)
    });
    Ok(v * pp.constant())
}

/// Expands `sum_k g_k <z,a>^k` into monomials.
pub fn zonal_to_poly<T: Real>(coeffs: &[Complex<T>], a: &[Complex<T>]) -> TaylorPoly<T> {
    let n = a.len();
    let abar: Coords<T> = a.iter().map(|c| c.conj()).collect();
    let mut p = TaylorPoly::zero(n);
    for (k, g) in coeffs.iter().enumerate() {
        if g.norm_sqr() == T::zero() {
            continue;
        }
        if n == 1 {
            p.add_term(MultiIndex::new([k as u32]), g * abar[0].powu(k as u32));
            continue;
        }
        let kf = factorial::<T>(k);
        for m in MultiIndex::of_degree(n, k) {
            p.add_term(m.clone(), g * m.monomial(&abar) * (kf / m.factorial::<T>()));
        }
    }
    p
}

/// Exact `P_beta` of the unimodular symbol
/// `F(u) = (conj(1 - <u,a>) / |1 - <u,a>|)^kappa`, returned as
/// `sum_k G_k <z,a>^k` truncated once `|G_k| |a|^k < tol`.
///
/// Uses `F = conj(w)^{kappa/2} w^{-kappa/2}` with `w = 1 - <u,a>`, expands
/// both factors, and projects every `<u,a>^j conj(<u,a>)^l` with the
/// monomial rule (rotated so that `a` lies on the first axis).
pub fn project_unimodular_symbol<T: Real>(pp: &ProjParams<T>, a: &[Complex<T>], kappa: T, tol: T, max_degree: usize) -> Result<HoloFunction<T>> {
    if a.len() != pp.n {
        return Err(Error::DimensionMismatch(a.len(), pp.n));
    }
    let ra2 = norm_sq(a);
    if !(ra2 < T::one()) {
        return Err(Error::OutsideBall(ra2.sqrt().as_f64()));
    }
    let b = pp.kernel_exponent();
    let ra = ra2.sqrt();
    let half = kappa * T::HALF;
    // inner sums converge like |a|^{2l}; outer like |a|^k
    let lmax = ((tol.ln() / ra2.max(T::lit(1e-300)).ln()).abs().ceil().as_f64() as usize).clamp(8, 200_000);
    let big_a = kernel_series_coeffs(half, max_degree + lmax + 1);
    let big_b = kernel_series_coeffs(-half, lmax + 1);
    let mut g = Vec::new();
    for k in 0..=max_degree {
        let mut sum = T::zero();
        let mut ratio = T::one();
        let mut pw = T::one();
        for l in 0..=lmax {
            if l > 0 {
                ratio = ratio * T::of(k + l) / (b + T::of(k + l - 1));
                pw *= ra2;
            }
            let term = big_a[k + l] * big_b[l] * pw * ratio;
            sum += term;
            if l > 8 && term.abs() < tol * T::lit(1e-3) * sum.abs().max(T::lit(1e-300)) {
                break;
            }
        }
        g.push(Complex::new(sum, T::zero()));
        if k > 8 && (sum * ra.powi(k as i32)).abs() < tol {
            break;
        }
    }
    Ok(HoloFunction::from_poly(zonal_to_poly(&g, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{ball_rule, RadialMesh};

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    #[test]
    fn params_validation() {
        assert!(FracParams::new(1, -3.0f64, 0.5).is_err());
        assert!(FracParams::new(1, 0.0f64, -4.0).is_err());
        assert!(FracParams::new(2, -2.5f64, 1.0).is_ok());
        assert!(ProjParams::new(1, -1.0f64).is_err());
        assert!((ProjParams::new(2, 1.0f64).unwrap().constant() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn multiplier_examples() {
        let id = FracParams::new(2, 0.3f64, 0.0).unwrap();
        assert!((0..20).all(|k| frac_multiplier(&id, k) == 1.0));
        let fp = FracParams::new(1, 0.0f64, 1.0).unwrap();
        for k in 0..30 {
            // ratio of the k-th coefficients of (1-w)^{-3} and (1-w)^{-2}
            let oracle = ((k as f64 + 1.0) * (k as f64 + 2.0) / 2.0) / (k as f64 + 1.0);
            assert!((frac_multiplier(&fp, k) - oracle).abs() < 1e-12 * oracle);
        }
        let m = frac_multipliers(&fp, 5);
        assert_eq!(m.len(), 6);
        assert!((m[5] - frac_multiplier(&fp, 5)).abs() < 1e-15);
    }

    #[test]
    fn apply_frac_on_polynomial_and_atom() {
        let fp = FracParams::new(1, 0.0f64, 1.0).unwrap();
        let p = TaylorPoly::from_terms(1, [(MultiIndex::new([0]), c(1.0, 0.0)), (MultiIndex::new([1]), c(1.0, 0.0))]).unwrap();
        let r = apply_frac(&fp, &HoloFunction::from_poly(p), FracMode::Derivative, 10).unwrap();
        assert!((r.function.poly.coeff(&MultiIndex::new([1])) - c(1.5, 0.0)).norm() < 1e-15);
        assert!((r.function.poly.coeff(&MultiIndex::new([0])) - c(1.0, 0.0)).norm() < 1e-15);

        let atom = KernelAtom::new([c(0.5, 0.2)], 2.0, c(1.0, 0.0)).unwrap();
        let r = apply_frac(&fp, &HoloFunction::from_atom(atom), FracMode::Derivative, 10).unwrap();
        assert_eq!(r.truncated_atoms, 0);
        assert_eq!(r.function.atoms[0].exponent, 3.0);
        let back = apply_frac(&fp, &r.function, FracMode::Integral, 10).unwrap();
        assert_eq!(back.function.atoms[0].exponent, 2.0);

        let odd = KernelAtom::new([c(0.3, 0.0)], 1.3, c(1.0, 0.0)).unwrap();
        let r = apply_frac(&fp, &HoloFunction::from_atom(odd), FracMode::Derivative, 20).unwrap();
        assert_eq!(r.truncated_atoms, 1);
        assert!(r.function.atoms.is_empty());
    }

    #[test]
    fn projection_reproduces_polynomials() {
        let pp = ProjParams::new(2, 1.0f64).unwrap();
        let p = TaylorPoly::from_terms(2, [(MultiIndex::new([2, 1]), c(0.5, -1.0)), (MultiIndex::new([0, 0]), c(2.0, 0.0))]).unwrap();
        let q = project_poly(&pp, &MixedPoly::from_poly(&p)).unwrap();
        assert_eq!(p, q);
        let conj = MixedPoly::new(1)
            .with_term(MultiIndex::new([0]), MultiIndex::new([1]), c(1.0, 0.0))
            .unwrap();
        let pp1 = ProjParams::new(1, 0.7f64).unwrap();
        assert!(project_poly(&pp1, &conj).unwrap().is_zero());
    }

    #[test]
    fn projection_of_radial_symbol() {
        // P_0(|u|^2) = 1/2 for n = 1: (1!/0!) (2)_0 / (2)_1
        let pp = ProjParams::new(1, 0.0f64).unwrap();
        let sym = MixedPoly::new(1)
            .with_term(MultiIndex::new([1]), MultiIndex::new([1]), c(1.0, 0.0))
            .unwrap();
        let q = project_poly(&pp, &sym).unwrap();
        assert!((q.coeff(&MultiIndex::new([0])) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn numeric_projection_of_conjugate_vanishes() {
        let mesh = RadialMesh::geometric(1e-6, 0.5).unwrap();
        let rule = ball_rule(1, 0.0, &mesh, 64).unwrap();
        let pp = ProjParams::new(1, 1.0f64).unwrap();
        let v = project_numeric(&pp, |u| u[0].conj(), &[c(0.3, 0.2)], &rule).unwrap();
        assert!(v.norm() < 1e-10);
        let near = project_numeric(&pp, |_| c(1.0, 0.0), &[c(1.0 - 1e-7, 0.0)], &rule);
        assert!(matches!(near, Err(Error::NodeStarvation(_))));
    }

    #[test]
    fn maximal_projection_at_origin_is_one() {
        let mesh = RadialMesh::geometric(1e-8, 0.5).unwrap();
        let rule = ball_rule(1, 0.0, &mesh, 8).unwrap();
        let pp = ProjParams::new(1, 1.0f64).unwrap();
        let v = project_maximal(&pp, 0.0, |_| 1.0, &[c(0.0, 0.0)], &rule).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn formula_check_on_low_degree_monomials() {
        let mesh = RadialMesh::geometric(1e-9, 0.5).unwrap();
        let rule = ball_rule(1, 0.0, &mesh, 64).unwrap();
        let pts: Vec<Coords<f64>> = [c(0.0, 0.0), c(0.3, -0.2), c(-0.5, 0.1)].iter().map(|&z| Coords::from_slice(&[z])).collect();
        let fp = FracParams::new(1, 0.0f64, 1.0).unwrap();
        for k in 0..=6u32 {
            let f = TaylorPoly::monomial(MultiIndex::new([k]), c(1.0, 0.0));
            let d = frac_integral_formula_check(&fp, FracMode::Derivative, &f, &rule, &pts).unwrap();
            assert!(d < 1e-6, "derivative degree {k}: {d}");
        }
        let fi = FracParams::new(1, -0.5f64, 1.0).unwrap();
        let f = TaylorPoly::monomial(MultiIndex::new([3]), c(1.0, 0.0));
        let d = frac_integral_formula_check(&fi, FracMode::Integral, &f, &rule, &pts).unwrap();
        assert!(d < 1e-6, "integral: {d}");
        let bad = FracParams::new(1, -1.5f64, 1.0).unwrap();
        assert!(frac_integral_formula_check(&bad, FracMode::Derivative, &f, &rule, &pts).is_err());
    }

    #[test]
    fn numeric_projection_agrees_with_monomial_rule() {
        let mesh = RadialMesh::geometric(1e-9, 0.5).unwrap();
        let rule = ball_rule(1, 0.0, &mesh, 64).unwrap();
        let pp = ProjParams::new(1, 0.0f64).unwrap();
        let sym = MixedPoly::new(1)
            .with_term(MultiIndex::new([2]), MultiIndex::new([1]), c(1.0, 0.5))
            .unwrap();
        let exact = project_poly(&pp, &sym).unwrap();
        let z = [c(0.4, -0.3)];
        let v = project_numeric(&pp, |u| sym.evaluate(u), &z, &rule).unwrap();
        assert!((v - exact.evaluate(&z)).norm() < 1e-7);
    }

    #[test]
    fn unimodular_projection_agrees_with_quadrature() {
        let mesh = RadialMesh::geometric(1e-9, 0.5).unwrap();
        let rule = ball_rule(1, 1.0, &mesh, 128).unwrap();
        let pp = ProjParams::new(1, 1.0f64).unwrap();
        let a = [c(0.5, 0.2)];
        let kappa = 3.0;
        let pf = project_unimodular_symbol(&pp, &a, kappa, 1e-12, 400).unwrap();
        let symbol = |u: &[Complex<f64>]| {
            let w = Complex::new(1.0, 0.0) - dot(u, &a);
            (w.conj() / w.norm()).powf(kappa)
        };
        for z in [c(0.0, 0.0), c(0.3, 0.1), c(-0.2, 0.5)] {
            let num = project_numeric(&pp, symbol, &[z], &rule).unwrap();
            assert!((num - pf.evaluate(&[z])).norm() < 1e-6, "{num} vs {}", pf.evaluate(&[z]));
        }
    }

    #[test]
    fn zonal_expansion_matches_power() {
        let a = [c(0.3, 0.1), c(-0.2, 0.4)];
        let g = [c(1.0, 0.0), c(0.5, 0.0), c(0.25, -0.1)];
        let p = zonal_to_poly(&g, &a);
        let z = [c(0.1, -0.3), c(0.4, 0.2)];
        let w = dot(&z, &a);
        let direct = g[0] + g[1] * w + g[2] * w * w;
        assert!((p.evaluate(&z) - direct).norm() < 1e-15);
    }
}
