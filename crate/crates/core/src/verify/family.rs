use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::funcspace::{truncate_atom, HoloFunction, KernelAtom, MultiIndex, TaylorPoly};
use crate::geometry::Coords;
use crate::quadrature::sample_sphere;

type C = Complex<f64>;

/// A named list of test functions, each tagged with how close it sits to
/// the boundary.
#[derive(Clone, Debug, Serialize)]
pub struct TestFamily {
    pub name: String,
    pub members: Vec<HoloFunction<f64>>,
    /// Boundary parameter per member (`1 - |a|` for atoms, `1` otherwise).
    pub params: Vec<f64>,
    pub seed: u64,
}

impl TestFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Concatenation of several families.
    pub fn union(name: &str, parts: Vec<TestFamily>) -> Self {
        let seed = parts.first().map(|p| p.seed).unwrap_or(0);
        let mut out = TestFamily {
            name: name.into(),
            members: Vec::new(),
            params: Vec::new(),
            seed,
        };
        for p in parts {
            out.members.extend(p.members);
            out.params.extend(p.params);
        }
        out
    }
}

/// `start, start/2, start/4, ...` while above `min`, then `min` itself.
pub fn geometric_schedule(start: f64, min: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut g = start;
    while g > min * (1.0 + 1e-9) {
        out.push(g);
        g *= 0.5;
    }
    out.push(min);
    out
}

fn unit_disc(rng: &mut ChaCha8Rng) -> C {
    let r = rng.gen::<f64>().sqrt();
    let t = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex::from_polar(r, t)
}

fn direction(n: usize, seed: u64) -> Result<Coords<f64>> {
    Ok(sample_sphere::<f64>(n, 1, seed)?.remove(0))
}

/// Polynomials of degree at most `max_degree` whose
/// coefficients are uniform in the unit disc.
pub fn random_polynomials(n: usize, count: usize, max_degree: usize, seed: u64) -> Result<TestFamily> {
    if count == 0 {
        return Err(invalid("a family needs at least one member"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = Vec::with_capacity(count);
    for _ in 0..count {
        let degree = rng.gen_range(1..=max_degree.max(1));
        let mut p = TaylorPoly::zero(n);
        for k in 0..=degree {
            for m in MultiIndex::of_degree(n, k) {
                p.add_term(m, unit_disc(&mut rng));
            }
        }
        members.push(HoloFunction::from_poly(p));
    }
    Ok(TestFamily {
        name: format!("polynomials(n={n}, degree<={max_degree})"),
        params: vec![1.0; count],
        members,
        seed,
    })
}

/// `(1 - <z, a>)^{-exponent}` with `1 - |a|` running through
/// `gaps` along one seeded direction.
pub fn kernel_atoms(n: usize, exponent: f64, gaps: &[f64], seed: u64) -> Result<TestFamily> {
    let dir = direction(n, seed)?;
    let mut members = Vec::with_capacity(gaps.len());
    for &g in gaps {
        if !(g > 0.0 && g < 1.0) {
            return Err(invalid(format!("atom gap must lie in (0, 1), got {g}")));
        }
        let pole: Coords<f64> = dir.iter().map(|c| c * (1.0 - g)).collect();
        members.push(HoloFunction::from_atom(KernelAtom::new(pole, exponent, C::new(1.0, 0.0))?));
    }
    Ok(TestFamily {
        name: format!("atoms(n={n}, exponent={exponent})"),
        params: gaps.to_vec(),
        members,
        seed,
    })
}

/// Bergman kernels of `A^2_beta` normalized to unit norm,
/// `c^{1/2} (1-|a|^2)^{(n+1+beta)/2} (1 - <z,a>)^{-(n+1+beta)}`.
pub fn bergman_kernels(n: usize, beta: f64, gaps: &[f64], seed: u64) -> Result<TestFamily> {
    let e = n as f64 + 1.0 + beta;
    let c = crate::scalar::bergman_constant(n, beta);
    let mut fam = kernel_atoms(n, e, gaps, seed)?;
    for f in &mut fam.members {
        for a in &mut f.atoms {
            *a = a.clone().with_prefactor(e / 2.0);
            a.scale *= c.sqrt();
        }
    }
    fam.name = format!("bergman_kernels(n={n}, beta={beta})");
    Ok(fam)
}

/// `-log(1 - z_1)` cut at each degree in `degrees`.
pub fn truncated_logs(n: usize, degrees: &[usize]) -> Result<TestFamily> {
    let mut members = Vec::with_capacity(degrees.len());
    for &d in degrees {
        if d == 0 {
            return Err(invalid("log truncation degree must be positive"));
        }
        let mut p = TaylorPoly::zero(n);
        for k in 1..=d {
            p.add_term(MultiIndex::axis(n, 0, k as u32), C::new(1.0 / k as f64, 0.0));
        }
        members.push(HoloFunction::from_poly(p));
    }
    Ok(TestFamily {
        name: format!("truncated_logs(n={n})"),
        params: degrees.iter().map(|&d| 1.0 / d as f64).collect(),
        members,
        seed: 0,
    })
}

/// Kernel atoms expanded into polynomials of the given degree.
pub fn truncated_atoms(n: usize, exponent: f64, gaps: &[f64], degree: usize, seed: u64) -> Result<TestFamily> {
    let atoms = kernel_atoms(n, exponent, gaps, seed)?;
    let mut members = Vec::with_capacity(atoms.len());
    for f in &atoms.members {
        members.push(HoloFunction::from_poly(truncate_atom(&f.atoms[0], degree)?.poly));
    }
    Ok(TestFamily {
        name: format!("truncated_atoms(n={n}, exponent={exponent}, degree={degree})"),
        params: atoms.params,
        members,
        seed,
    })
}

/// Serializable description of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Polynomials {
        count: usize,
        #[serde(default = "default_degree")]
        max_degree: usize,
    },
    Atoms {
        exponent: f64,
        #[serde(default = "default_min_gap")]
        min_gap: f64,
    },
    BergmanKernels {
        beta: f64,
        #[serde(default = "default_min_gap")]
        min_gap: f64,
    },
    Logs {
        degrees: Vec<usize>,
    },
    TruncatedAtoms {
        exponent: f64,
        gaps: Vec<f64>,
        degree: usize,
    },
    Union {
        parts: Vec<FamilySpec>,
    },
}

fn default_degree() -> usize {
    8
}

fn default_min_gap() -> f64 {
    1e-3
}

impl FamilySpec {
    pub fn build(&self, n: usize, seed: u64) -> Result<TestFamily> {
        match self {
            FamilySpec::Polynomials { count, max_degree } => random_polynomials(n, *count, *max_degree, seed),
            FamilySpec::Atoms { exponent, min_gap } => kernel_atoms(n, *exponent, &geometric_schedule(0.5, *min_gap), seed),
            FamilySpec::BergmanKernels { beta, min_gap } => bergman_kernels(n, *beta, &geometric_schedule(0.5, *min_gap), seed),
            FamilySpec::Logs { degrees } => truncated_logs(n, degrees),
            FamilySpec::TruncatedAtoms { exponent, gaps, degree } => truncated_atoms(n, *exponent, gaps, *degree, seed),
            FamilySpec::Union { parts } => {
                let built = parts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p.build(n, seed.wrapping_add(i as u64)))
                    .collect::<Result<Vec<_>>>()?;
                let name = built.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join(" + ");
                Ok(TestFamily::union(&name, built))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::norm_sq;

    #[test]
    fn schedule_ends_at_min() {
        let s = geometric_schedule(0.5, 1e-3);
        assert_eq!(s[0], 0.5);
        assert_eq!(*s.last().unwrap(), 1e-3);
        assert!(s.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(s.len(), 10);
        assert_eq!(geometric_schedule(0.5, 0.5), vec![0.5]);
    }

    #[test]
    fn polynomial_family_is_seeded() {
        let a = random_polynomials(2, 4, 8, 11).unwrap();
        let b = random_polynomials(2, 4, 8, 11).unwrap();
        let c = random_polynomials(2, 4, 8, 12).unwrap();
        assert_eq!(a.members, b.members);
        assert_ne!(a.members, c.members);
        for f in &a.members {
            assert!(f.poly.degree() <= 8);
            assert!(f.poly.terms().all(|(_, c)| c.norm() <= 1.0));
        }
    }

    #[test]
    fn atom_family_follows_gaps() {
        let f = kernel_atoms(2, 3.0, &[0.5, 0.01], 4).unwrap();
        for (m, g) in f.members.iter().zip(&f.params) {
            assert!((norm_sq(&m.atoms[0].pole).sqrt() - (1.0 - g)).abs() < 1e-12);
        }
        assert!(kernel_atoms(1, 2.0, &[1.5], 0).is_err());
    }

    #[test]
    fn bergman_kernels_have_unit_norm() {
        // ||K_a||^2 = c(n,beta)^{-1} (1-|a|^2)^{n+1+beta} * c(n,beta) K(a,a)
        let fam = bergman_kernels(1, 0.0, &[0.3, 0.05], 0).unwrap();
        for (f, g) in fam.members.iter().zip(&fam.params) {
            let v = crate::norms::pairing_closed_form(f, f, -1.0).unwrap();
            assert!((v.re - 1.0).abs() < 1e-10, "{g}: {v}");
        }
    }

    #[test]
    fn union_concatenates() {
        let spec = FamilySpec::Union {
            parts: vec![
                FamilySpec::Polynomials { count: 2, max_degree: 3 },
                FamilySpec::Atoms { exponent: 2.0, min_gap: 0.1 },
            ],
        };
        let f = spec.build(1, 5).unwrap();
        assert_eq!(f.len(), 2 + 4);
        assert_eq!(f.params[..2], [1.0, 1.0]);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<FamilySpec>(&text).unwrap(), spec);
    }
}
