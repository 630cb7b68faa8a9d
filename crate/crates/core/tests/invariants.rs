use holotent::funcspace::{HoloFunction, KernelAtom, MixedPoly, MultiIndex, TaylorPoly};
use holotent::geometry::Aperture;
use holotent::norms::{adapted_sphere_rule, approach_template, pairing_closed_form, pairing_exact, tent_norm, SpaceParams};
use holotent::operators::{apply_frac, project_poly, FracMode, FracParams, ProjParams};
use holotent::verify::random_polynomials;
use holotent::Complex64;
use proptest::prelude::*;

fn poly(n: usize, seed: u64, degree: usize) -> HoloFunction<f64> {
    random_polynomials(n, 1, degree, seed).unwrap().members.remove(0)
}

fn atom(angle: f64, gap: f64, exponent: f64) -> HoloFunction<f64> {
    let pole = [Complex64::from_polar(1.0 - gap, angle)];
    HoloFunction::from_atom(KernelAtom::new(pole, exponent, Complex64::new(1.0, 0.0)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frac_round_trip_is_identity(n in 1usize..=2, seed in 0u64..1000, s in -0.9f64..2.0, t in 0.1f64..3.0) {
        let f = poly(n, seed, 10);
        let fp = FracParams::new(n, s, t).unwrap();
        let d = apply_frac(&fp, &f, FracMode::Derivative, 1).unwrap().function;
        let back = apply_frac(&fp, &d, FracMode::Integral, 1).unwrap().function;
        for (m, c) in f.poly.terms() {
            prop_assert!((back.poly.coeff(m) - c).norm() < 1e-12);
        }
    }

    #[test]
    fn matched_atoms_shift_exactly(angle in 0.0f64..std::f64::consts::TAU, gap in 0.01f64..0.9, t in 0.1f64..2.0, x in -0.9f64..0.9) {
        // R^{0,t} (1 - z conj(a))^{-2} = (1 - z conj(a))^{-2-t} for n = 1
        let f = atom(angle, gap, 2.0);
        let fp = FracParams::new(1, 0.0, t).unwrap();
        let d = apply_frac(&fp, &f, FracMode::Derivative, 40).unwrap();
        prop_assert_eq!(d.truncated_atoms, 0);
        let z = [Complex64::new(x, 0.3 * x)];
        let want = atom(angle, gap, 2.0 + t).evaluate(&z);
        prop_assert!((d.function.evaluate(&z) - want).norm() < 1e-10 * want.norm());
    }

    #[test]
    fn pairing_is_hermitian(seed in 0u64..1000, angle in 0.0f64..std::f64::consts::TAU, gap in 0.05f64..0.9, alpha in -0.5f64..2.0) {
        let f = poly(1, seed, 6) + atom(angle, gap, 2.0);
        let g = poly(1, seed + 1, 6) + atom(angle + 1.0, gap, 1.5);
        let fg = pairing_closed_form(&f, &g, alpha).unwrap();
        let gf = pairing_closed_form(&g, &f, alpha).unwrap();
        prop_assert!((fg - gf.conj()).norm() < 1e-9 * fg.norm().max(1.0));
    }

    #[test]
    fn closed_form_pairing_agrees_with_coefficients(n in 1usize..=2, seed in 0u64..1000, alpha in -0.5f64..2.0) {
        let f = poly(n, seed, 6);
        let g = poly(n, seed + 7, 6);
        let a = pairing_closed_form(&f, &g, alpha).unwrap();
        let b = pairing_exact(&f.poly, &g.poly, alpha).unwrap();
        prop_assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
    }

    #[test]
    fn projection_fixes_holomorphic_polynomials(n in 1usize..=2, seed in 0u64..1000, beta in -0.5f64..3.0) {
        let f = poly(n, seed, 6);
        let pp = ProjParams::new(n, beta).unwrap();
        let p = project_poly(&pp, &MixedPoly::from_poly(&f.poly)).unwrap();
        prop_assert_eq!(p, f.poly);
    }

    #[test]
    fn dilation_rescales_the_argument(seed in 0u64..1000, r in 0.1f64..0.99, x in -0.7f64..0.7, y in -0.7f64..0.7) {
        let f = poly(1, seed, 6) + atom(1.0, 0.2, 1.5);
        let z = [Complex64::new(x, y)];
        let rz = [Complex64::new(r * x, r * y)];
        let got = f.dilate(r).unwrap().evaluate(&z);
        prop_assert!((got - f.evaluate(&rz)).norm() < 1e-10 * got.norm().max(1.0));
    }

    #[test]
    fn projecting_antiholomorphic_monomials_vanishes(k in 1u32..6, beta in -0.5f64..3.0) {
        let sym = MixedPoly::new(1).with_term(MultiIndex::zeros(1), MultiIndex::axis(1, 0, k), Complex64::new(1.0, 0.0)).unwrap();
        let p = project_poly(&ProjParams::new(1, beta).unwrap(), &sym).unwrap();
        prop_assert!(p.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn tent_norm_is_homogeneous(seed in 0u64..1000, c in 0.1f64..5.0, phase in 0.0f64..std::f64::consts::TAU, p in 1.0f64..4.0) {
        let f = poly(1, seed, 5);
        let sp = SpaceParams::new(1, p, 2.0, 0.0, Aperture::default()).unwrap();
        let region = approach_template(1, sp.gamma(), 1e-4, 8).unwrap();
        let sphere = adapted_sphere_rule(&f, 8).unwrap();
        let base = tent_norm(&f, &sp, &region, &sphere).unwrap().value;
        let scaled = tent_norm(&f.scaled(Complex64::from_polar(c, phase)), &sp, &region, &sphere).unwrap().value;
        prop_assert!((scaled - c * base).abs() < 1e-10 * c * base);
    }
}

#[test]
fn rotation_leaves_tent_norm_unchanged() {
    let base = TaylorPoly::from_terms(1, [(MultiIndex::axis(1, 0, 1), Complex64::new(1.0, 0.0)), (MultiIndex::axis(1, 0, 3), Complex64::new(0.5, 0.0))]).unwrap();
    let rotated = TaylorPoly::from_terms(
        1,
        [
            (MultiIndex::axis(1, 0, 1), Complex64::from_polar(1.0, 0.7)),
            (MultiIndex::axis(1, 0, 3), Complex64::from_polar(0.5, 2.1)),
        ],
    )
    .unwrap();
    let sp = SpaceParams::new(1, 2.0, 2.0, 0.0, Aperture::default()).unwrap();
    let region = approach_template(1, sp.gamma(), 1e-5, 12).unwrap();
    let norm = |p: TaylorPoly<f64>| {
        let f = HoloFunction::from_poly(p);
        tent_norm(&f, &sp, &region, &adapted_sphere_rule(&f, 12).unwrap()).unwrap().value
    };
    let (a, b) = (norm(base), norm(rotated));
    assert!((a - b).abs() < 1e-8 * a, "{a} vs {b}");
}
