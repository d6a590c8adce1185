use casimir_ema::dielectric::{
    DielectricModel, DrudeParams, ImaginaryFrequency, Oscillator, OscillatorParams,
};
use casimir_ema::lifshitz::{force_per_area, Slab, SlabSystem};
use casimir_ema::mixing::{
    bruggeman_ellipsoid, bruggeman_ellipsoid_residual, bruggeman_residual, bruggeman_sphere,
    hashin_shtrikman_bounds, looyenga, maxwell_garnett, wiener_bounds, CompositeSpec,
    FillingFraction, InclusionShape, MixingRule,
};
use casimir_ema::numerics::QuadratureSpec;
use proptest::prelude::*;

const SLACK: f64 = 1e-10;

fn permittivity() -> impl Strategy<Value = f64> {
    (0.0f64..4.0).prop_map(|x| 10f64.powf(x))
}

fn fill() -> impl Strategy<Value = FillingFraction> {
    (0.0f64..=1.0).prop_map(|f| FillingFraction::new(f).unwrap())
}

fn leq(a: f64, b: f64) -> bool {
    a <= b + SLACK * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rules_nest_inside_bounds(eps_i in permittivity(), eps_h in permittivity(), f in fill()) {
        let (wl, wu) = wiener_bounds(eps_i, eps_h, f);
        let (hl, hu) = hashin_shtrikman_bounds(eps_i, eps_h, f);
        prop_assert!(leq(wl, hl) && leq(hl, hu) && leq(hu, wu));
        for v in [
            maxwell_garnett(eps_i, eps_h, f),
            bruggeman_sphere(eps_i, eps_h, f).unwrap(),
            looyenga(eps_i, eps_h, f),
        ] {
            prop_assert!(leq(hl, v) && leq(v, hu), "{hl} <= {v} <= {hu}");
        }
    }

    #[test]
    fn bruggeman_solves_its_condition(eps_i in permittivity(), eps_h in permittivity(), f in fill()) {
        let e = bruggeman_sphere(eps_i, eps_h, f).unwrap();
        prop_assert!(bruggeman_residual(eps_i, eps_h, f, e).abs() <= SLACK);
    }

    #[test]
    fn ellipsoid_bruggeman_solves_its_condition(
        eps_i in permittivity(),
        eps_h in permittivity(),
        f in fill(),
        l in 0.01f64..0.99,
    ) {
        let e = bruggeman_ellipsoid(eps_i, eps_h, f, l).unwrap();
        prop_assert!(e > 0.0);
        prop_assert!(bruggeman_ellipsoid_residual(eps_i, eps_h, f, l, e).abs() <= SLACK);
    }

    #[test]
    fn rules_increase_with_metal_fraction(
        eps_i in 10f64..1e4,
        eps_h in 1f64..5.0,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let (lo, hi) = (a.min(b), a.max(b));
        let (flo, fhi) = (FillingFraction::new(lo).unwrap(), FillingFraction::new(hi).unwrap());
        prop_assert!(leq(maxwell_garnett(eps_i, eps_h, flo), maxwell_garnett(eps_i, eps_h, fhi)));
        prop_assert!(leq(
            bruggeman_sphere(eps_i, eps_h, flo).unwrap(),
            bruggeman_sphere(eps_i, eps_h, fhi).unwrap()
        ));
        prop_assert!(leq(looyenga(eps_i, eps_h, flo), looyenga(eps_i, eps_h, fhi)));
    }

    #[test]
    fn models_are_monotone_on_imaginary_axis(
        wp in 1f64..15.0,
        gamma in 0.001f64..1.0,
        c in 0.1f64..5.0,
        w0 in 0.05f64..20.0,
        z1 in 0.001f64..100.0,
        z2 in 0.001f64..100.0,
    ) {
        let (lo, hi) = (z1.min(z2), z1.max(z2));
        let models = [
            DielectricModel::Drude(DrudeParams::new(wp, gamma).unwrap()),
            DielectricModel::Oscillators(
                OscillatorParams::new(vec![Oscillator { strength: c, frequency_ev: w0 }]).unwrap(),
            ),
        ];
        for m in models {
            let a = m.eval(ImaginaryFrequency::new(lo).unwrap()).unwrap();
            let b = m.eval(ImaginaryFrequency::new(hi).unwrap()).unwrap();
            prop_assert!(b >= 1.0 && a >= b);
        }
    }
}

fn composite(f: f64, rule: MixingRule) -> Slab {
    let host = DielectricModel::Oscillators(
        OscillatorParams::new(vec![
            Oscillator {
                strength: 1.93,
                frequency_ev: 0.1378,
            },
            Oscillator {
                strength: 1.359,
                frequency_ev: 13.16,
            },
        ])
        .unwrap(),
    );
    let metal = DielectricModel::Drude(DrudeParams::new(9.0, 0.035).unwrap());
    Slab::composite(
        CompositeSpec::new(
            host,
            metal,
            FillingFraction::new(f).unwrap(),
            InclusionShape::Sphere,
            10.0,
        )
        .unwrap(),
        rule,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn swapping_slabs_leaves_force_unchanged(f1 in 0.0f64..0.5, f2 in 0.0f64..0.5, l in 50f64..400.0) {
        let sys = SlabSystem::new(
            composite(f1, MixingRule::Bruggeman),
            composite(f2, MixingRule::MaxwellGarnett),
            DielectricModel::Vacuum,
            l,
        )
        .unwrap();
        let q = QuadratureSpec::force();
        let a = force_per_area(&sys, &q).unwrap();
        let b = force_per_area(&sys.swapped(), &q).unwrap();
        prop_assert!((a.eta - b.eta).abs() <= 1e-12 * a.eta);
    }

    #[test]
    fn force_weakens_with_separation(f in 0.0f64..0.5, l in 50f64..400.0, dl in 5f64..100.0) {
        let sys = SlabSystem::new(
            composite(f, MixingRule::Bruggeman),
            composite(f, MixingRule::Bruggeman),
            DielectricModel::Vacuum,
            l,
        )
        .unwrap();
        let q = QuadratureSpec::force();
        let near = force_per_area(&sys, &q).unwrap();
        let far = force_per_area(&sys.with_separation(l + dl).unwrap(), &q).unwrap();
        prop_assert!(far.force_pa.abs() < near.force_pa.abs());
        prop_assert!(near.force_pa < 0.0);
    }
}
