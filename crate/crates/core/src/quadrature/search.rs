use num_complex::Complex;
use rayon::prelude::*;

use crate::geometry::{approach_contains, norm_sq, Aperture, Coords, SpherePoint};
use crate::scalar::Real;

/// Where a sup search is allowed to look.
#[derive(Clone, Debug)]
pub enum SearchDomain<T: Real> {
    /// `|z| <= 1 - eps`.
    Ball { eps: T },
    /// `Gamma_gamma(zeta)` intersected with `rmin < |z| <= 1 - eps`.
    Region {
        zeta: SpherePoint<T>,
        gamma: Aperture<T>,
        eps: T,
        rmin: T,
    },
    /// The unit sphere.
    Sphere,
}

impl<T: Real> SearchDomain<T> {
    pub fn contains(&self, z: &[Complex<T>]) -> bool {
        match self {
            SearchDomain::Ball { eps } => norm_sq(z).sqrt() <= T::one() - *eps,
            SearchDomain::Region { zeta, gamma, eps, rmin } => {
                let r = norm_sq(z).sqrt();
                r <= T::one() - *eps && r > *rmin && approach_contains(zeta.coords(), gamma.value(), z)
            }
            SearchDomain::Sphere => true,
        }
    }

    fn on_sphere(&self) -> bool {
        matches!(self, SearchDomain::Sphere)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SupSearchOptions {
    /// Number of best seeds refined locally.
    pub starts: usize,
    /// Coordinate sweeps per start; brackets halve after a sweep without
    /// improvement.
    pub sweeps: usize,
    /// Golden-section iterations per coordinate.
    pub golden_iters: usize,
}

impl Default for SupSearchOptions {
    fn default() -> Self {
        Self {
            starts: 3,
            sweeps: 12,
            golden_iters: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SupResult<T: Real> {
    pub value: T,
    pub argmax: Coords<T>,
    /// Distinct local maxima reached by the refined starts.
    pub basins: usize,
}

/// Local coordinates: `u = -ln(1 - |z|)`, then phases (and the modulus
/// split `x = |z_1| / |z|` when n = 2). On the sphere `u` is dropped.
fn to_params<T: Real>(z: &[Complex<T>], sphere: bool) -> Vec<T> {
    let r = norm_sq(z).sqrt();
    let mut p = Vec::with_capacity(4);
    if !sphere {
        p.push(-(T::one() - r).ln());
    }
    if z.len() == 1 {
        p.push(z[0].arg());
    } else {
        let x = if r > T::zero() { z[0].norm() / r } else { T::one() };
        p.push(x);
        p.push(z[0].arg());
        p.push(z[1].arg());
    }
    p
}

fn from_params<T: Real>(p: &[T], n: usize, sphere: bool) -> Coords<T> {
    let (r, rest) = if sphere {
        (T::one(), p)
    } else {
        ((T::one() - (-p[0]).exp()).max(T::zero()), &p[1..])
    };
    let mut z = Coords::new();
    if n == 1 {
        z.push(Complex::from_polar(r, rest[0]));
    } else {
        let x = rest[0].max(T::zero()).min(T::one());
        z.push(Complex::from_polar(r * x, rest[1]));
        z.push(Complex::from_polar(r * (T::one() - x * x).sqrt(), rest[2]));
    }
    z
}

fn initial_steps<T: Real>(p: &[T], n: usize, sphere: bool) -> Vec<T> {
    let angular = if sphere {
        T::lit(0.5)
    } else {
        // angular features scale with the distance to the boundary
        ((-p[0]).exp() * T::lit(2.0)).min(T::lit(0.5))
    };
    let mut h = Vec::with_capacity(p.len());
    if !sphere {
        h.push(T::TWO);
    }
    if n == 1 {
        h.push(angular);
    } else {
        h.push(T::lit(0.2));
        h.push(angular);
        h.push(T::lit(0.5));
    }
    h
}

fn refine<T: Real, G>(g: &G, domain: &SearchDomain<T>, start: &[Complex<T>], start_val: T, opts: &SupSearchOptions) -> (T, Coords<T>)
where
    G: Fn(&[Complex<T>]) -> T,
{
    let n = start.len();
    let sphere = domain.on_sphere();
    let mut p = to_params(start, sphere);
    let mut best = start_val;
    let mut moved = false;
    let mut h = initial_steps(&p, n, sphere);
    let eval = |q: &[T]| -> T {
        let z = from_params(q, n, sphere);
        if domain.contains(&z) {
            let v = g(&z);
            if v.is_nan() {
                T::neg_infinity()
            } else {
                v
            }
        } else {
            T::neg_infinity()
        }
    };
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    for _ in 0..opts.sweeps {
        let before = best;
        for i in 0..p.len() {
            let mut a = p[i] - h[i];
            let mut b = p[i] + h[i];
            let mut q = p.clone();
            let mut c = b - (b - a) * inv_phi;
            let mut d = a + (b - a) * inv_phi;
            q[i] = c;
            let mut fc = eval(&q);
            q[i] = d;
            let mut fd = eval(&q);
            for _ in 0..opts.golden_iters {
                if fc >= fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - (b - a) * inv_phi;
                    q[i] = c;
                    fc = eval(&q);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + (b - a) * inv_phi;
                    q[i] = d;
                    fd = eval(&q);
                }
            }
            let (cand, val) = if fc >= fd { (c, fc) } else { (d, fd) };
            if val > best {
                best = val;
                p[i] = cand;
                moved = true;
            }
        }
        if best > before {
            // keep the radial bracket, rescale the rest to the new depth
            let fresh = initial_steps(&p, n, sphere);
            for (k, (hi, fi)) in h.iter_mut().zip(fresh).enumerate() {
                if k > 0 || sphere {
                    *hi = fi.min(*hi * T::TWO);
                }
            }
        } else {
            for hi in h.iter_mut() {
                *hi *= T::HALF;
            }
        }
    }
    if moved {
        (best, from_params(&p, n, sphere))
    } else {
        (best, start.iter().copied().collect())
    }
}

/// Multi-start maximization of `g` over `domain`: evaluates every seed,
/// then refines the best `opts.starts` seeds by coordinate-wise
/// golden-section search. Ties go to the earliest seed.
pub fn sup_search<T: Real, G>(g: G, domain: &SearchDomain<T>, seeds: &[Coords<T>], opts: &SupSearchOptions) -> SupResult<T>
where
    G: Fn(&[Complex<T>]) -> T + Sync,
{
    let vals: Vec<T> = seeds
        .par_iter()
        .map(|z| {
            if domain.contains(z) {
                let v = g(z);
                if v.is_nan() {
                    T::neg_infinity()
                } else {
                    v
                }
            } else {
                T::neg_infinity()
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..seeds.len()).filter(|&i| vals[i] > T::neg_infinity()).collect();
    if order.is_empty() {
        return SupResult {
            value: T::neg_infinity(),
            argmax: seeds.first().cloned().unwrap_or_default(),
            basins: 0,
        };
    }
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap().then(a.cmp(&b)));
    let starts: Vec<usize> = order.into_iter().take(opts.starts.max(1)).collect();
    let refined: Vec<(T, Coords<T>)> = starts
        .iter()
        .map(|&i| refine(&g, domain, &seeds[i], vals[i], opts))
        .collect();
    let mut best = 0;
    for (k, r) in refined.iter().enumerate() {
        if r.0 > refined[best].0 {
            best = k;
        }
    }
    let mut distinct: Vec<&Coords<T>> = Vec::new();
    for (_, z) in &refined {
        let far = distinct.iter().all(|w| {
            let d: T = z.iter().zip(w.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
            d.sqrt() > T::lit(1e-6)
        });
        if far {
            distinct.push(z);
        }
    }
    SupResult {
        value: refined[best].0,
        argmax: refined[best].1.clone(),
        basins: distinct.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::sample_ball;

    fn grid(n: usize) -> Vec<Coords<f64>> {
        let mut v = vec![Coords::from_elem(Complex::new(0.3, 0.0), n)];
        v.extend(sample_ball::<f64>(n, 200, 0.99, 1).unwrap());
        v
    }

    #[test]
    fn depth_is_maximal_at_origin() {
        let r = sup_search(|z| 1.0 - norm_sq(z), &SearchDomain::Ball { eps: 1e-4 }, &grid(1), &Default::default());
        assert!((r.value - 1.0).abs() < 1e-6);
        assert!(norm_sq(&r.argmax) < 1e-6);
    }

    #[test]
    fn ray_maximum_at_truncation() {
        // (1-|z|^2)/|1-z| = 1 + r on the ray to 1, maximized at r = 1 - eps
        let eps = 1e-3;
        let g = |z: &[Complex<f64>]| (1.0 - norm_sq(z)) / (Complex::new(1.0, 0.0) - z[0]).norm();
        let r = sup_search(g, &SearchDomain::Ball { eps }, &grid(1), &Default::default());
        assert!((r.value - (2.0 - eps)).abs() < 1e-3, "{}", r.value);
        assert!(r.argmax[0].arg().abs() < 1e-3);
    }

    #[test]
    fn constant_returns_first_seed() {
        let seeds = grid(2);
        let r = sup_search(|_| 4.0, &SearchDomain::Ball { eps: 1e-3 }, &seeds, &Default::default());
        assert_eq!(r.value, 4.0);
        assert_eq!(r.argmax, seeds[0]);
    }

    #[test]
    fn region_search_respects_domain() {
        let zeta = SpherePoint::from_angle(1.0);
        let domain = SearchDomain::Region {
            zeta: zeta.clone(),
            gamma: Aperture::default(),
            eps: 1e-3,
            rmin: 0.0,
        };
        let seeds = sample_ball::<f64>(1, 2000, 0.999, 5).unwrap();
        let r = sup_search(|z| z[0].re, &domain, &seeds, &Default::default());
        assert!(domain.contains(&r.argmax));
        assert!(r.value < 1.0);
    }
}
