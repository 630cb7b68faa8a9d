//! Exact representations of holomorphic test functions: multi-index Taylor
//! polynomials plus finite sums of kernel atoms `c (1 - <z,a>)^{-e}`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, norm_sq, Coords};
use crate::scalar::{factorial, Real};

/// Largest degree [`truncate_atom`] accepts.
pub const MAX_TRUNCATION_DEGREE: usize = 60;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(SmallVec<[u32; 2]>);

impl MultiIndex {
    pub fn new(entries: impl IntoIterator<Item = u32>) -> Self {
        Self(entries.into_iter().collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(SmallVec::from_elem(0, n))
    }

    /// `k e_j` in dimension `n`.
    pub fn axis(n: usize, j: usize, k: u32) -> Self {
        let mut m = Self::zeros(n);
        m.0[j] = k;
        m
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|m|`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    /// `m!`.
    pub fn factorial<T: Real>(&self) -> T {
        self.0.iter().map(|&k| factorial::<T>(k as usize)).fold(T::one(), |a, b| a * b)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Self(out))
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `z^m`.
    pub fn monomial<T: Real>(&self, z: &[Complex<T>]) -> Complex<T> {
        let mut acc = Complex::new(T::one(), T::zero());
        for (c, &k) in z.iter().zip(&self.0) {
            if k > 0 {
                acc *= c.powu(k);
            }
        }
        acc
    }

    /// All multi-indices of dimension `n` and degree exactly `k`, in
    /// lexicographic order.
    pub fn of_degree(n: usize, k: usize) -> Vec<Self> {
        fn rec(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if n == 1 {
                prefix.push(k);
                out.push(MultiIndex::new(prefix.iter().copied()));
                prefix.pop();
                return;
            }
            for j in (0..=k).rev() {
                prefix.push(j);
                rec(n - 1, k - j, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, k as u32, &mut Vec::with_capacity(n), &mut out);
        }
        out
    }
}

/// Finite map from multi-indices to complex coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "PolyRepr<T>", into = "PolyRepr<T>")]
pub struct TaylorPoly<T: Real> {
    n: usize,
    coeffs: BTreeMap<MultiIndex, Complex<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct PolyRepr<T: Real> {
    n: usize,
    terms: Vec<(MultiIndex, Complex<T>)>,
}

impl<T: Real> TryFrom<PolyRepr<T>> for TaylorPoly<T> {
    type Error = Error;

    fn try_from(r: PolyRepr<T>) -> Result<Self> {
        let mut p = TaylorPoly::zero(r.n);
        for (m, c) in r.terms {
            if m.dim() != r.n {
                return Err(Error::DimensionMismatch(m.dim(), r.n));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }
}

impl<T: Real> From<TaylorPoly<T>> for PolyRepr<T> {
    fn from(p: TaylorPoly<T>) -> Self {
        PolyRepr {
            n: p.n,
            terms: p.coeffs.into_iter().collect(),
        }
    }
}

impl<T: Real> TaylorPoly<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex<T>) -> Self {
        let mut p = Self::zero(n);
        p.add_term(MultiIndex::zeros(n), c);
        p
    }

    pub fn monomial(m: MultiIndex, c: Complex<T>) -> Self {
        let mut p = Self::zero(m.dim());
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from `(index, coefficient)` pairs.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex<T>)>) -> Result<Self> {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            if m.dim() != n {
                return Err(Error::DimensionMismatch(m.dim(), n));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, m: MultiIndex, c: Complex<T>) {
        let e = self.coeffs.entry(m).or_insert_with(|| Complex::new(T::zero(), T::zero()));
        *e += c;
    }

    pub fn coeff(&self, m: &MultiIndex) -> Complex<T> {
        self.coeffs.get(m).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex<T>)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.norm_sqr() == T::zero())
    }

    /// Largest `|m|` with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, c)| c.norm_sqr() != T::zero())
            .map(|(m, _)| m.degree())
            .max()
            .unwrap_or(0)
    }

    /// Multiplies the degree-`k` homogeneous part by `mult(k)`.
    pub fn map_by_degree<F: Fn(usize) -> T>(&self, mult: F) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(m, c)| (m.clone(), c * mult(m.degree()))).collect(),
        }
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    fn power_table(&self, z: &[Complex<T>]) -> Vec<Vec<Complex<T>>> {
        let mut maxdeg = vec![0u32; self.n];
        for m in self.coeffs.keys() {
            for (d, &k) in maxdeg.iter_mut().zip(m.entries()) {
                *d = (*d).max(k);
            }
        }
        z.iter()
            .zip(&maxdeg)
            .map(|(&zj, &d)| {
                let mut row = Vec::with_capacity(d as usize + 1);
                let mut acc = Complex::new(T::one(), T::zero());
                row.push(acc);
                for _ in 0..d {
                    acc *= zj;
                    row.push(acc);
                }
                row
            })
            .collect()
    }

    pub fn evaluate(&self, z: &[Complex<T>]) -> Complex<T> {
        if self.coeffs.is_empty() {
            return Complex::new(T::zero(), T::zero());
        }
        let pw = self.power_table(z);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (m, c) in &self.coeffs {
            let mut t = *c;
            for (row, &k) in pw.iter().zip(m.entries()) {
                t *= row[k as usize];
            }
            acc += t;
        }
        acc
    }

    pub fn gradient(&self, z: &[Complex<T>]) -> Coords<T> {
        let mut g: Coords<T> = SmallVec::from_elem(Complex::new(T::zero(), T::zero()), self.n);
        if self.coeffs.is_empty() {
            return g;
        }
        let pw = self.power_table(z);
        for (m, c) in &self.coeffs {
            for j in 0..self.n {
                let kj = m.entries()[j];
                if kj == 0 {
                    continue;
                }
                let mut t = c * T::lit(kj as f64);
                for (i, (row, &k)) in pw.iter().zip(m.entries()).enumerate() {
                    let e = if i == j { k - 1 } else { k };
                    t *= row[e as usize];
                }
                g[j] += t;
            }
        }
        g
    }
}

impl<T: Real> Add for TaylorPoly<T> {
    type Output = TaylorPoly<T>;

    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.coeffs {
            self.add_term(m, c);
        }
        self
    }
}

/// `z |-> scale * (1 - <z, pole>)^{-exponent}` on the principal branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct KernelAtom<T: Real> {
    pub pole: Coords<T>,
    pub exponent: T,
    pub scale: Complex<T>,
}

impl<T: Real> KernelAtom<T> {
    /// Poles may sit on the closed ball; `|a| = 1` is allowed as a limit.
    pub fn new(pole: impl IntoIterator<Item = Complex<T>>, exponent: T, scale: Complex<T>) -> Result<Self> {
        let pole: Coords<T> = pole.into_iter().collect();
        if pole.is_empty() {
            return Err(invalid("atom pole needs at least one coordinate"));
        }
        let r2 = norm_sq(&pole);
        if r2 > T::one() + T::lit(1e-12) {
            return Err(Error::OutsideBall(r2.sqrt().as_f64()));
        }
        if !exponent.is_finite() {
            return Err(invalid("atom exponent must be finite"));
        }
        Ok(Self { pole, exponent, scale })
    }

    /// Folds `(1 - |a|^2)^g` into the scale.
    pub fn with_prefactor(mut self, g: T) -> Self {
        self.scale *= (T::one() - norm_sq(&self.pole)).powf(g);
        self
    }

    pub fn dim(&self) -> usize {
        self.pole.len()
    }

    #[inline]
    pub fn base(&self, z: &[Complex<T>]) -> Complex<T> {
        Complex::new(T::one(), T::zero()) - dot(z, &self.pole)
    }

    #[inline]
    pub fn evaluate(&self, z: &[Complex<T>]) -> Complex<T> {
        let w = self.base(z);
        self.scale * cpow(w, -self.exponent)
    }

    pub fn gradient(&self, z: &[Complex<T>]) -> Coords<T> {
        let w = self.base(z);
        let common = self.scale * self.exponent * cpow(w, -self.exponent - T::one());
        self.pole.iter().map(|a| common * a.conj()).collect()
    }
}

/// Principal-branch power, with integer exponents done by multiplication.
#[inline]
pub(crate) fn cpow<T: Real>(w: Complex<T>, e: T) -> Complex<T> {
    if e == e.round() && e.abs() <= T::lit(64.0) {
        let k = e.as_f64() as i32;
        w.powi(k)
    } else {
        w.powf(e)
    }
}

/// A Taylor polynomial plus a finite list of kernel atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "HoloRepr<T>", into = "HoloRepr<T>")]
pub struct HoloFunction<T: Real> {
    pub poly: TaylorPoly<T>,
    pub atoms: Vec<KernelAtom<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct HoloRepr<T: Real> {
    n: usize,
    #[serde(default)]
    poly: Vec<(MultiIndex, Complex<T>)>,
    #[serde(default)]
    atoms: Vec<KernelAtom<T>>,
}

impl<T: Real> TryFrom<HoloRepr<T>> for HoloFunction<T> {
    type Error = Error;

    fn try_from(r: HoloRepr<T>) -> Result<Self> {
        let poly = TaylorPoly::from_terms(r.n, r.poly)?;
        let mut atoms = Vec::with_capacity(r.atoms.len());
        for a in r.atoms {
            if a.dim() != r.n {
                return Err(Error::DimensionMismatch(a.dim(), r.n));
            }
            atoms.push(KernelAtom::new(a.pole, a.exponent, a.scale)?);
        }
        Ok(Self { poly, atoms })
    }
}

impl<T: Real> From<HoloFunction<T>> for HoloRepr<T> {
    fn from(f: HoloFunction<T>) -> Self {
        HoloRepr {
            n: f.poly.n,
            poly: f.poly.coeffs.into_iter().collect(),
            atoms: f.atoms,
        }
    }
}

impl<T: Real> HoloFunction<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            poly: TaylorPoly::zero(n),
            atoms: Vec::new(),
        }
    }

    pub fn from_poly(poly: TaylorPoly<T>) -> Self {
        Self { poly, atoms: Vec::new() }
    }

    pub fn from_atom(atom: KernelAtom<T>) -> Self {
        Self {
            poly: TaylorPoly::zero(atom.dim()),
            atoms: vec![atom],
        }
    }

    pub fn constant(n: usize, c: Complex<T>) -> Self {
        Self::from_poly(TaylorPoly::constant(n, c))
    }

    /// `z^m`.
    pub fn monomial(m: MultiIndex) -> Self {
        Self::from_poly(TaylorPoly::monomial(m, Complex::new(T::one(), T::zero())))
    }

    pub fn dim(&self) -> usize {
        self.poly.n
    }

    pub fn is_polynomial(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn evaluate(&self, z: &[Complex<T>]) -> Complex<T> {
        let mut acc = self.poly.evaluate(z);
        for a in &self.atoms {
            acc += a.evaluate(z);
        }
        acc
    }

    pub fn gradient(&self, z: &[Complex<T>]) -> Coords<T> {
        let mut g = self.poly.gradient(z);
        for a in &self.atoms {
            for (gj, aj) in g.iter_mut().zip(a.gradient(z)) {
                *gj += aj;
            }
        }
        g
    }

    /// `f_r(z) = f(r z)`, exact on the representation.
    pub fn dilate(&self, r: T) -> Result<Self> {
        if !(r > T::zero() && r < T::one()) {
            return Err(invalid(format!("dilation radius must lie in (0, 1), got {r}")));
        }
        Ok(self.dilate_unchecked(r))
    }

    pub(crate) fn dilate_unchecked(&self, r: T) -> Self {
        Self {
            poly: self.poly.map_by_degree(|k| r.powi(k as i32)),
            atoms: self
                .atoms
                .iter()
                .map(|a| KernelAtom {
                    pole: a.pole.iter().map(|c| c * r).collect(),
                    exponent: a.exponent,
                    scale: a.scale,
                })
                .collect(),
        }
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        Self {
            poly: self.poly.scaled(s),
            atoms: self
                .atoms
                .iter()
                .map(|a| KernelAtom {
                    scale: a.scale * s,
                    ..a.clone()
                })
                .collect(),
        }
    }

    /// Everything expanded into one polynomial of degree `<= degree`.
    pub fn to_poly(&self, degree: usize) -> Result<TaylorPoly<T>> {
        let mut p = self.poly.clone();
        for a in &self.atoms {
            p = p + truncate_atom(a, degree)?.poly;
        }
        Ok(p)
    }
}

impl<T: Real> Add for HoloFunction<T> {
    type Output = HoloFunction<T>;

    fn add(mut self, rhs: Self) -> Self {
        self.poly = self.poly + rhs.poly;
        self.atoms.extend(rhs.atoms);
        self
    }
}

impl<T: Real> Mul<Complex<T>> for HoloFunction<T> {
    type Output = HoloFunction<T>;

    fn mul(self, s: Complex<T>) -> Self {
        self.scaled(s)
    }
}

/// A truncated kernel expansion and a bound for the discarded tail on the
/// closed unit ball (infinite when the series does not converge there).
#[derive(Clone, Debug)]
pub struct TruncatedAtom<T: Real> {
    pub poly: TaylorPoly<T>,
    pub tail_bound: T,
}

/// Coefficients `(e)_k / k!` for `k = 0..=degree`.
pub fn kernel_series_coeffs<T: Real>(e: T, degree: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(degree + 1);
    let mut c = T::one();
    out.push(c);
    for k in 0..degree {
        c = c * (e + T::of(k)) / T::of(k + 1);
        out.push(c);
    }
    out
}

/// `(1 - <z,a>)^{-e} = sum_k (e)_k / k! <z,a>^k`, expanded by the
/// multinomial theorem and cut at total degree `degree`.
pub fn truncate_atom<T: Real>(atom: &KernelAtom<T>, degree: usize) -> Result<TruncatedAtom<T>> {
    if degree == 0 || degree > MAX_TRUNCATION_DEGREE {
        return Err(invalid(format!(
            "truncation degree must lie in 1..={MAX_TRUNCATION_DEGREE}, got {degree}"
        )));
    }
    let n = atom.dim();
    let coeffs = kernel_series_coeffs(atom.exponent, degree + 1);
    let abar: Coords<T> = atom.pole.iter().map(|c| c.conj()).collect();
    let mut poly = TaylorPoly::zero(n);
    for (k, &ck) in coeffs.iter().enumerate().take(degree + 1) {
        let kfact = factorial::<T>(k);
        for m in MultiIndex::of_degree(n, k) {
            // (e)_k / k! * k! / m! * conj(a)^m
            let c = atom.scale * m.monomial(&abar) * (ck * kfact / m.factorial::<T>());
            poly.add_term(m, c);
        }
    }
    let x = norm_sq(&atom.pole).sqrt();
    let first = atom.scale.norm() * coeffs[degree + 1].abs() * x.powi(degree as i32 + 1);
    let e = atom.exponent.abs();
    let ratio = x.max((e + T::of(degree + 1)) / T::of(degree + 2) * x);
    let tail_bound = if first == T::zero() {
        T::zero()
    } else if ratio < T::one() {
        first / (T::one() - ratio)
    } else {
        T::infinity()
    };
    Ok(TruncatedAtom { poly, tail_bound })
}

/// Finite combination of `z^m conj(z)^l`, the symbols the exact Bergman
/// projection accepts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MixedPoly<T: Real> {
    pub n: usize,
    pub terms: Vec<(MultiIndex, MultiIndex, Complex<T>)>,
}

impl<T: Real> MixedPoly<T> {
    pub fn new(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn with_term(mut self, m: MultiIndex, l: MultiIndex, c: Complex<T>) -> Result<Self> {
        if m.dim() != self.n || l.dim() != self.n {
            return Err(Error::DimensionMismatch(m.dim().max(l.dim()), self.n));
        }
        self.terms.push((m, l, c));
        Ok(self)
    }

    pub fn from_poly(p: &TaylorPoly<T>) -> Self {
        Self {
            n: p.dim(),
            terms: p.terms().map(|(m, c)| (m.clone(), MultiIndex::zeros(p.dim()), *c)).collect(),
        }
    }

    pub fn evaluate(&self, z: &[Complex<T>]) -> Complex<T> {
        let zbar: Coords<T> = z.iter().map(|c| c.conj()).collect();
        self.terms
            .iter()
            .map(|(m, l, c)| c * m.monomial(z) * l.monomial(&zbar))
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        let f = HoloFunction::<f64>::monomial(MultiIndex::new([2, 0]));
        assert!((f.evaluate(&[c(0.5, 0.0), c(0.0, 0.0)]) - c(0.25, 0.0)).norm() < 1e-15);
        let atom = KernelAtom::new([c(0.0, 0.0), c(0.0, 0.0)], 4.0, c(3.0, 0.0)).unwrap();
        assert_eq!(atom.evaluate(&[c(0.3, 0.1), c(-0.2, 0.0)]), c(3.0, 0.0));
        let sq = KernelAtom::new([c(1.0, 0.0)], 2.0, c(1.0, 0.0)).unwrap();
        assert!((sq.evaluate(&[c(0.5, 0.0)]) - c(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn gradient_examples() {
        let f = HoloFunction::<f64>::monomial(MultiIndex::new([1, 0]));
        let g = f.gradient(&[c(0.2, 0.3), c(0.1, 0.0)]);
        assert_eq!(g.as_slice(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let geo = KernelAtom::new([c(1.0, 0.0)], 1.0, c(1.0, 0.0)).unwrap();
        assert!((geo.gradient(&[c(0.0, 0.0)])[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dilation_examples() {
        let m = MultiIndex::new([2, 1]);
        let f = HoloFunction::<f64>::monomial(m.clone());
        let d = f.dilate(0.5).unwrap();
        assert!((d.poly.coeff(&m) - c(0.125, 0.0)).norm() < 1e-15);
        let atom = KernelAtom::new([c(0.4, 0.2)], 1.5, c(1.0, 0.0)).unwrap();
        let da = HoloFunction::from_atom(atom).dilate(0.5).unwrap();
        assert!((da.atoms[0].pole[0] - c(0.2, 0.1)).norm() < 1e-15);
        assert!(f.dilate(1.0).is_err());
    }

    #[test]
    fn truncation_examples() {
        let geo = KernelAtom::new([c(1.0, 0.0)], 1.0, c(1.0, 0.0)).unwrap();
        let t = truncate_atom(&geo, 10).unwrap();
        for k in 0..=10u32 {
            assert!((t.poly.coeff(&MultiIndex::new([k])) - c(1.0, 0.0)).norm() < 1e-14);
        }
        assert!(t.tail_bound.is_infinite());
        let a = c(0.3, -0.4);
        let sq = KernelAtom::new([a], 2.0, c(1.0, 0.0)).unwrap();
        let t = truncate_atom(&sq, 12).unwrap();
        for k in 0..=12u32 {
            let expect = a.conj().powu(k) * (k as f64 + 1.0);
            assert!((t.poly.coeff(&MultiIndex::new([k])) - expect).norm() < 1e-13);
        }
        assert!(truncate_atom(&sq, 61).is_err());
    }

    #[test]
    fn multi_index_enumeration() {
        let ms = MultiIndex::of_degree(2, 3);
        assert_eq!(ms.len(), 4);
        assert!(ms.iter().all(|m| m.degree() == 3));
        assert_eq!(MultiIndex::of_degree(1, 5), vec![MultiIndex::new([5])]);
        assert_eq!(MultiIndex::new([2, 3]).factorial::<f64>(), 12.0);
    }

    #[test]
    fn json_shape() {
        let f = HoloFunction::<f64>::from_poly(TaylorPoly::monomial(MultiIndex::new([1]), c(1.0, -2.0)))
            + HoloFunction::from_atom(KernelAtom::new([c(0.5, 0.0)], 2.0, c(1.0, 0.0)).unwrap());
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"n":1,"poly":[[[1],[1.0,-2.0]]],"atoms":[{"pole":[[0.5,0.0]],"exponent":2.0,"scale":[1.0,0.0]}]}"#
        );
        let back: HoloFunction<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"n":2,"poly":[[[1],[1.0,0.0]]]}"#;
        assert!(serde_json::from_str::<HoloFunction<f64>>(bad).is_err());
        let outside = r#"{"n":1,"atoms":[{"pole":[[1.5,0.0]],"exponent":1.0,"scale":[1.0,0.0]}]}"#;
        assert!(serde_json::from_str::<HoloFunction<f64>>(outside).is_err());
    }

    #[test]
    fn mixed_poly_evaluation() {
        let p = MixedPoly::<f64>::new(1)
            .with_term(MultiIndex::new([1]), MultiIndex::new([1]), c(1.0, 0.0))
            .unwrap();
        let z = [c(0.3, 0.4)];
        assert!((p.evaluate(&z) - c(0.25, 0.0)).norm() < 1e-15);
    }
}
