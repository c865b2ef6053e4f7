//! Property tests for identities that hold across parameter ranges.

use std::f64::consts::{E, PI};

use num_complex::Complex64 as C;
use proptest::prelude::*;
use quadlab::maps::{MapSpec, Orientation};
use quadlab::numcheck::{default_tests, verify_quadrature_identity, weighted_area, AreaSide};
use quadlab::ratfun::{PoleExpansion, RationalFn};
use quadlab::schwarzdyn::{escape_grid, general_reflect, lambert_w0, teardrop, teardrop_reflect, Region};

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

fn disk(r: f64, w0: C) -> MapSpec {
    MapSpec::rational(RationalFn::new(vec![w0, C::new(r, 0.0)], vec![ONE]).unwrap(), Orientation::Interior).unwrap()
}

fn complex(re: f64, im: f64) -> C {
    C::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lambert_solves_w_exp_w(mag in -8.0f64..8.0, arg in -PI..PI) {
        let z = C::from_polar(10f64.powf(mag), arg);
        prop_assume!(!(z.re < -1.0 / E && z.im.abs() < 1e-9));
        let w = lambert_w0(z).unwrap();
        prop_assert!((w * w.exp() - z).norm() <= 1e-13 * (1.0 + z.norm()));
        prop_assert!(w.im.abs() < PI);
    }

    #[test]
    fn lambert_is_conjugate_symmetric(re in -5.0f64..5.0, im in 1e-6f64..5.0) {
        let z = complex(re, im);
        let a = lambert_w0(z).unwrap();
        let b = lambert_w0(z.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-13 * (1.0 + a.norm()));
    }

    #[test]
    fn teardrop_reflection_is_phi_of_inverted_preimage(rho in 1.0f64..3.0, th in -PI..PI) {
        let m = teardrop();
        let z = C::from_polar(rho, th);
        let w = m.eval(z);
        prop_assume!(w.norm() < 1e12);
        let want = m.eval(ONE / z.conj());
        prop_assume!(want.norm() < 1e12);
        let got = teardrop_reflect(w).unwrap();
        prop_assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()), "{got} vs {want}");
    }

    #[test]
    fn ellipse_reflection_fixes_the_boundary(cc in 0.3f64..3.0, ar in -0.6f64..0.6, ai in -0.6f64..0.6, th in -PI..PI) {
        let al = complex(ar, ai);
        prop_assume!(al.norm() < 0.9);
        let m = MapSpec::rational(
            RationalFn::new(vec![al.conj() * cc, ZERO, C::new(cc, 0.0)], vec![ZERO, ONE]).unwrap(),
            Orientation::Exterior,
        )
        .unwrap();
        let w = m.eval(C::from_polar(1.0, th));
        let s = general_reflect(&m, w).unwrap();
        prop_assert!((s - w).norm() <= 1e-9 * (1.0 + w.norm()));
    }

    #[test]
    fn partial_fractions_round_trip(
        p1 in (-2.0f64..2.0, -2.0f64..2.0),
        p2 in (-2.0f64..2.0, -2.0f64..2.0),
        c1 in (-1.0f64..1.0, -1.0f64..1.0),
        c2 in (-1.0f64..1.0, -1.0f64..1.0),
        c3 in (-1.0f64..1.0, -1.0f64..1.0),
        k in (-1.0f64..1.0, -1.0f64..1.0),
    ) {
        let (p1, p2) = (complex(p1.0, p1.1), complex(p2.0, p2.1));
        prop_assume!((p1 - p2).norm() > 0.2);
        let (c1, c2, c3) = (complex(c1.0, c1.1), complex(c2.0, c2.1), complex(c3.0, c3.1));
        prop_assume!(c1.norm() > 0.05 && c3.norm() > 0.05);
        let pe = PoleExpansion::single(p1, vec![c1])
            .add(&PoleExpansion::single(p2, vec![c2, c3]))
            .add(&PoleExpansion::constant(complex(k.0, k.1)));
        let back = pe.to_rational().partial_fractions().unwrap();
        prop_assert!(back.distance(&pe) < 1e-10, "distance {}", back.distance(&pe));
        for probe in [complex(3.0, 1.0), complex(-0.5, 2.5)] {
            prop_assert!((back.eval(probe) - pe.eval(probe)).norm() < 1e-10);
        }
    }

    #[test]
    fn disks_satisfy_the_mean_value_identity(r in 0.1f64..3.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let w0 = complex(x, y);
        let m = disk(r, w0);
        let h = RationalFn::pole_term(w0, 1, C::new(r * r, 0.0));
        let rep = verify_quadrature_identity(&m, 1.0, &h, &default_tests(&m).unwrap(), 256).unwrap();
        prop_assert!(rep.max_rel < 1e-10, "maxRel {}", rep.max_rel);
    }

    #[test]
    fn centred_disk_weighted_area(r in 0.1f64..3.0, a in 0.2f64..3.0) {
        let t = weighted_area(&disk(r, ZERO), a, AreaSide::Domain, 256).unwrap();
        let want = r.powf(2.0 * a) / a;
        prop_assert!((t - want).abs() <= 1e-12 * want.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn escape_grids_are_deterministic(x0 in -3.0f64..0.0, y0 in -3.0f64..0.0, w in 0.5f64..3.0) {
        let region = Region::new(x0, y0, x0 + w, y0 + w).unwrap();
        let m = teardrop();
        let a = escape_grid(&m, region, 23, 17, 40).unwrap();
        let b = escape_grid(&m, region, 23, 17, 40).unwrap();
        prop_assert_eq!(a.data, b.data);
    }
}
