//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

use std::f64::consts::{E, PI};
use std::time::Instant;

use num_complex::Complex64 as C;
use quadlab::classical::{
    c_star_closed_form, c_star_cubic_roots, classify_one_point, direct_expansion, one_point_critical,
    one_point_dphi_at_one, one_point_family,
};
use quadlab::conformal::{cusp_detect, univalence_check};
use quadlab::faber::transform_pe;
use quadlab::lqd::{
    inverse_problem_log, log_monomial, log_one_point_bounded, pqd_limit, LqdProblem,
};
use quadlab::maps::{MapSpec, Orientation};
use quadlab::numcheck::{
    complement_probes, default_tests, exterior_probes, faber_contour, verify_quadrature_identity, weighted_area,
    weighted_area_2d, AreaSide, TestFn,
};
use quadlab::pqd::{
    inverse_problem_power, monomial_critical_radius, monomial_family, polynomial_family, polynomial_family_candidates,
    PqdProblem,
};
use quadlab::ratfun::{PoleExpansion, RationalFn};
use quadlab::schwarzdyn::{antiholo_exp_julia, lambert_w0, schwarz_reflect, teardrop, escape_grid, Region};
use quadlab::solver::Normalization;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `sup_θ |m₁ − m₂|` on `n` circle samples.
fn circle_gap(m1: &MapSpec, m2: &MapSpec, n: usize) -> f64 {
    (0..n)
        .map(|j| {
            let z = C::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
            (m1.eval(z) - m2.eval(z)).norm()
        })
        .fold(0.0, f64::max)
}

fn min_modulus(m: &MapSpec, n: usize) -> f64 {
    (0..n).map(|j| m.eval(C::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).norm()).fold(f64::MAX, f64::min)
}

/// Bisect a predicate that holds at `lo` and fails at `hi`.
fn bisect<F: Fn(f64) -> bool>(good: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, String> {
    if !good(lo) || good(hi) {
        return Err(format!("no transition bracketed in [{lo}, {hi}]"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if good(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn rational_map(coeffs: &[C], den: &[C], o: Orientation) -> MapSpec {
    MapSpec::rational(RationalFn::new(coeffs.to_vec(), den.to_vec()).unwrap(), o).unwrap()
}

fn c01_disk_mvp() -> Outcome {
    let (r, w0) = (0.7, c(1.0, 1.0));
    let m = rational_map(&[w0, c(r, 0.0)], &[ONE], Orientation::Interior);
    let h = RationalFn::pole_term(w0, 1, c(r * r, 0.0));
    let rep = verify_quadrature_identity(&m, 1.0, &h, &default_tests(&m).map_err(err)?, 512).map_err(err)?;
    ensure(rep.max_rel < 1e-10, format!("maxRel {:e}", rep.max_rel))?;
    Ok(format!("maxRel {:.2e}", rep.max_rel))
}

fn c02_cardioid() -> Outcome {
    let m = rational_map(&[ZERO, ONE, c(0.5, 0.0)], &[ONE], Orientation::Interior);
    let h = direct_expansion(&m).map_err(err)?;
    let t = h.term_at(ZERO).ok_or("no pole at 0")?;
    let e = (t.coeffs[0] - c(1.5, 0.0)).norm().max((t.coeffs[1] - c(0.5, 0.0)).norm());
    ensure(e < 1e-12 && h.terms.len() == 1, format!("coefficient error {e:e}"))?;
    // Moment oracle: ∫_Ω w^j dA = (1/2πi)∮ w^j w̄ dw fixes the sign of both
    // coefficients, (3/2)/w + (1/2)/w² with plus signs.
    let hr = RationalFn::new(vec![c(0.5, 0.0), c(1.5, 0.0)], vec![ZERO, ZERO, ONE]).map_err(err)?;
    let rep = verify_quadrature_identity(&m, 1.0, &hr, &default_tests(&m).map_err(err)?, 512).map_err(err)?;
    ensure(rep.max_rel < 1e-9, format!("QI maxRel {:e}", rep.max_rel))?;
    let flipped = RationalFn::new(vec![c(0.5, 0.0), c(-1.5, 0.0)], vec![ZERO, ZERO, ONE]).map_err(err)?;
    let bad = verify_quadrature_identity(&m, 1.0, &flipped, &[TestFn::Monomial(0)], 512).map_err(err)?;
    ensure(bad.max_rel > 1e-2, "the sign-flipped quadrature function also passes")?;
    Ok(format!("coeff err {e:.1e}, QI maxRel {:.2e}", rep.max_rel))
}

fn c03_ellipse() -> Outcome {
    let pairs = [(1.0, c(0.3, 0.0)), (1.7, c(0.3, 0.2)), (0.5, c(-0.6, 0.1)), (2.5, c(0.0, 0.8)), (1.2, c(0.45, -0.45))];
    let mut worst: f64 = 0.0;
    let mut worst_qi: f64 = 0.0;
    for (cc, al) in pairs {
        let m = rational_map(&[al.conj() * cc, ZERO, c(cc, 0.0)], &[ZERO, ONE], Orientation::Exterior);
        let h = direct_expansion(&m).map_err(err)?;
        let want = PoleExpansion::polynomial(&[ZERO, al]);
        worst = worst.max(h.distance(&want));
        let hr = RationalFn::polynomial(&[ZERO, al]);
        let rep = verify_quadrature_identity(&m, 1.0, &hr, &[TestFn::Monomial(-2)], 1024).map_err(err)?;
        let lhs = rep.per_test[0].lhs;
        worst_qi = worst_qi.max((lhs + al).norm());
    }
    ensure(worst < 1e-10, format!("direct error {worst:e}"))?;
    ensure(worst_qi < 1e-9, format!("∫ w^-2 error {worst_qi:e}"))?;
    Ok(format!("direct {worst:.1e}, QI {worst_qi:.1e}"))
}

fn c04_one_point_classical() -> Outcome {
    let w0 = c(2.0, 0.0);
    let mut count = 0;
    for i in 0..20 {
        let th = 0.25 + (PI - 0.25) * i as f64 / 19.0;
        let rho_star = 2.0 / (1.0 - th.cos());
        for f in [0.4, 0.6, 0.8, 0.9, 0.97, 1.03, 1.1, 1.25, 1.5, 2.0] {
            let al = C::from_polar(rho_star * f, th);
            let margin = 4.0 + 2.0 * al.re - 2.0 * al.norm();
            if margin.abs() <= 1e-3 {
                return Err(format!("grid point {al} too close to the boundary"));
            }
            count += 1;
            let rep = classify_one_point(al, w0);
            ensure(rep.exists == (margin > 0.0), format!("α = {al}: exists {} margin {margin}", rep.exists))?;
            if rep.exists {
                let mem = one_point_family(al, w0, 0.1).map_err(err)?;
                let h = direct_expansion(&mem.map).map_err(err)?;
                let d = h.distance(&PoleExpansion::single(w0, vec![al]));
                ensure(mem.univalent && d < 1e-8, format!("α = {al}: member at c = 0.1 off by {d:e}"))?;
            }
        }
    }
    ensure(count == 200, format!("{count} grid points"))?;
    let rep = classify_one_point(ONE, w0);
    ensure(rep.t_star == Some(8.0), format!("t* = {:?}", rep.t_star))?;
    let mut worst: f64 = 0.0;
    for al in [1.0, -0.5] {
        let cs = classify_one_point(c(al, 0.0), w0).c_star.ok_or("no c*")?;
        for j in 1..=50 {
            let mem = one_point_family(c(al, 0.0), w0, cs * j as f64 / 50.0).map_err(err)?;
            worst = worst.max(mem.conserved);
        }
    }
    ensure(worst < 1e-9, format!("conserved residual {worst:e}"))?;
    let crit = one_point_critical(c(-0.5, 0.0), w0).map_err(err)?;
    let d1 = one_point_dphi_at_one(&crit.member, 2.0).norm();
    let cusps = cusp_detect(&crit.member.map);
    ensure(!cusps.is_empty() && d1 < 1e-8, format!("cusps {} |φ'(1)| {d1:e}", cusps.len()))?;
    Ok(format!("200 α classified, conserved {worst:.1e}, |φ'(1)| {d1:.1e} at c = {:.10}", crit.c))
}

fn c05_c_star() -> Outcome {
    let cf = c_star_closed_form(-0.5, 2.0).ok_or("no closed form")?;
    let mut roots = c_star_cubic_roots(-0.5, 2.0);
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ensure(roots.len() == 3, format!("{} real roots", roots.len()))?;
    let d = (cf - roots[1]).abs();
    ensure(d < 1e-10, format!("difference {d:e}"))?;
    Ok(format!("c* = {cf:.12}, diff {d:.1e}"))
}

fn c06_monomial_pqd() -> Outcome {
    let cr = monomial_critical_radius(0.4, c(25.0 / 12.0, 0.0), 1).ok_or("no critical radius")?;
    ensure((cr - 0.32768).abs() < 1e-9, format!("critical radius {cr}"))?;
    let numerically_univalent = |al: f64| {
        monomial_family(0.5, c(al, 0.0), 1, 1.0, false)
            .ok()
            .and_then(|m| univalence_check(&m.map, 2048).ok())
            .is_some_and(|r| r.is_univalent())
    };
    let flag = |al: f64| monomial_family(0.5, c(al, 0.0), 1, 1.0, false).is_ok_and(|m| m.univalent);
    let t_half = bisect(flag, 1.0, 3.0, 1e-9)?;
    ensure((t_half - 2.0).abs() < 1e-4, format!("a = 1/2 transition at |α| = {t_half}"))?;
    ensure(numerically_univalent(2.0 - 1e-3) && !numerically_univalent(2.0 + 1e-3), "boundary check disagrees near |α| = 2")?;
    let al = c(0.5, 0.0);
    let no_zero_univalent = |cc: f64| monomial_family(2.0, al, 1, cc, false).is_ok_and(|m| m.univalent);
    let ct = bisect(|cc| !no_zero_univalent(cc), 0.9, 1.1, 1e-12)?;
    let m = monomial_family(2.0, al, 1, ct, false).map_err(err)?;
    let mm = min_modulus(&m.map, 8192);
    ensure(mm < 1e-3, format!("min |w| = {mm:e} at c = {ct}"))?;
    Ok(format!("c_crit {cr:.11}, a=1/2 at |α| = {t_half:.6}, a=2 touches at c = {ct:.8} (min|w| {mm:.1e})"))
}

fn c07_cube_root_example() -> Outcome {
    let cc = 1.05;
    let m = monomial_family(3.0, c(1.0 / 9.0, 0.0), 3, cc, false).map_err(err)?.map;
    for j in 0..64 {
        let w = m.eval(C::from_polar(1.0, 2.0 * PI * j as f64 / 64.0));
        ensure(((w.powi(3) - ONE).norm() - cc.powi(3)).abs() < 1e-10, "boundary is not |w³ − 1| = c³")?;
    }
    let h = RationalFn::polynomial(&[ZERO, ZERO, c(1.0 / 3.0, 0.0)]);
    let rep = verify_quadrature_identity(&m, 3.0, &h, &[TestFn::Monomial(-3)], 1024).map_err(err)?;
    let lhs = rep.per_test[0].lhs;
    let d = (lhs + 1.0 / 3.0).norm();
    ensure(d < 1e-8, format!("∫ w^-3 |w|^4 = {lhs}"))?;
    Ok(format!("integral {:.12}, error {d:.1e}", lhs.re))
}

fn c08_bounded_one_point_a2() -> Outcome {
    let mut worst: f64 = 0.0;
    for al in [0.3f64, 1.0, 2.0] {
        let p = PqdProblem::new(2.0, RationalFn::pole_term(ONE, 1, c(al, 0.0)), true, false).map_err(err)?;
        let s = inverse_problem_power(&p, Normalization::W0(ONE)).map_err(err)?;
        let sq = RationalFn::polynomial(&[ONE, c(2.0 * al.sqrt(), 0.0)]);
        for j in 0..256 {
            let z = C::from_polar(0.999, 2.0 * PI * j as f64 / 256.0);
            worst = worst.max((s.map.eval(z).powi(2) - sq.eval(z)).norm());
        }
    }
    ensure(worst < 1e-10, format!("φ² error {worst:e}"))?;
    Ok(format!("φ² error {worst:.1e}"))
}

fn c09_linear_pqd() -> Outcome {
    let s2 = 2f64.sqrt();
    let disk = rational_map(&[c(s2, 0.0), c(s2, 0.0)], &[ONE], Orientation::Exterior);
    let h = RationalFn::polynomial(&[c(2.0 * s2, 0.0), ONE]);
    let rep = verify_quadrature_identity(&disk, 2.0, &h, &default_tests(&disk).map_err(err)?, 1024).map_err(err)?;
    ensure(rep.max_rel < 1e-9, format!("disk-complement QI maxRel {:e}", rep.max_rel))?;
    let fam = polynomial_family(2.0, &[c(2.0 * s2, 0.0), ONE], s2 + 1e-4).map_err(err)?;
    let gap = fam.iter().map(|m| circle_gap(&m.map, &disk, 4096)).fold(f64::MAX, f64::min);
    ensure(gap < 1e-3, format!("QI maxRel {:.1e}; family member at c = √2 + 1e-4 is {gap:.3e} from √2(z+1)", rep.max_rel))?;
    Ok(format!("QI maxRel {:.1e}, gap {gap:.1e}", rep.max_rel))
}

fn c10_quadratic_quartic() -> Outcome {
    let h = [ZERO, ZERO, ONE];
    for cc in [1.3, 2.5, 3.7] {
        let cand = polynomial_family_candidates(2.0, &h, cc).map_err(err)?;
        let mut want = vec![ZERO];
        let v = -64.0 * (cc * cc - 1.0).powi(3) / cc.powi(3);
        let r = v.abs().cbrt();
        for k in 0..3 {
            want.push(C::from_polar(r, (PI + 2.0 * PI * k as f64) / 3.0));
        }
        for w in &want {
            let d = cand.iter().map(|m| (m.coeffs[0] - w).norm()).fold(f64::MAX, f64::min);
            ensure(d < 1e-10 * (1.0 + r), format!("c = {cc}: root {w} missing ({d:e})"))?;
        }
        for m in polynomial_family(2.0, &h, cc).unwrap_or_default() {
            ensure(m.roundtrip < 1e-8, format!("c = {cc}: surviving root with round trip {:e}", m.roundtrip))?;
        }
    }
    let zero_branch_univalent = |cc: f64| {
        polynomial_family_candidates(2.0, &h, cc)
            .ok()
            .and_then(|v| v.into_iter().find(|m| m.coeffs[0].norm() < 1e-10))
            .is_some_and(|m| m.univalent)
    };
    let ct = bisect(&zero_branch_univalent, 2.5, 1.5, 1e-5).or_else(|_| {
        // Univalent above the transition: bisect the negated predicate.
        bisect(|cc| !zero_branch_univalent(cc), 1.5, 2.5, 1e-5)
    })?;
    ensure((ct - 2.0).abs() < 1e-3, format!("c₁ = 0 branch changes at c = {ct}"))?;
    Ok(format!("roots match, c₁ = 0 branch transition at c = {ct:.5}"))
}

fn c11_lqd_one_point_bounded() -> Outcome {
    let mut worst: f64 = 0.0;
    for (al, w0) in [(0.5, c(1.5, 0.0)), (2.0, c(1.0, 1.0)), (4.0, c(-2.0, 0.5))] {
        let p = LqdProblem::new(RationalFn::pole_term(w0, 1, c(al, 0.0)), true).map_err(err)?;
        let s = inverse_problem_log(&p, Normalization::W0(w0)).map_err(err)?;
        let rot = (w0.conj() / w0).sqrt();
        for j in 0..128 {
            let z = C::from_polar(1.0, 2.0 * PI * j as f64 / 128.0);
            let want = w0 * (rot * al.sqrt() * z).exp();
            worst = worst.max((s.map.eval(z) - want).norm() / w0.norm());
        }
    }
    ensure(worst < 1e-10, format!("map error {worst:e}"))?;
    let univalent = |al: f64| {
        log_one_point_bounded(al, c(1.5, 0.0))
            .ok()
            .and_then(|m| univalence_check(&m, 2048).ok())
            .is_some_and(|r| r.is_univalent())
    };
    let at = bisect(univalent, 8.0, 11.0, 1e-6)?;
    ensure((at - PI * PI).abs() < 1e-4, format!("transition at α = {at}"))?;
    Ok(format!("map error {worst:.1e}, transition at α = {at:.7} (π² = {:.7})", PI * PI))
}

fn c12_lqd_monomial() -> Outcome {
    let al = c(0.6, 0.3);
    let mut report = vec![];
    for k in [1usize, 2, 7] {
        let scale = al.norm() * (k * k) as f64;
        let univalent = |x: f64| {
            let cc = (x / scale).powf(1.0 / k as f64);
            log_monomial(al, k, cc)
                .ok()
                .and_then(|m| univalence_check(&m, 2048).ok())
                .is_some_and(|r| r.is_univalent())
        };
        let x = bisect(univalent, 0.5, 1.5, 1e-6)?;
        ensure((x - 1.0).abs() < 1e-4, format!("k = {k}: transition at |αk²c^k| = {x}"))?;
        report.push(format!("k={k}: {x:.6}"));
    }
    Ok(report.join(", "))
}

fn c13_null_lqd() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let m = rational_map(&[ZERO, c(r, 0.0)], &[ONE], Orientation::Exterior);
        let rep = verify_quadrature_identity(&m, 0.0, &RationalFn::constant(ZERO), &default_tests(&m).map_err(err)?, 512)
            .map_err(err)?;
        worst = worst.max(rep.max_rel);
    }
    ensure(worst < 1e-10, format!("QI maxRel {worst:e}"))?;
    let p = LqdProblem::new(RationalFn::constant(ZERO), false).map_err(err)?;
    let s = inverse_problem_log(&p, Normalization::C(1.0)).map_err(err)?;
    ensure(s.map.r.is_zero(), "inverse problem for h = 0 has r ≠ 0")?;
    Ok(format!("QI maxRel {worst:.1e}, r = 0"))
}

fn c14_limit() -> Outcome {
    let p = LqdProblem::new(RationalFn::constant(ONE), false).map_err(err)?;
    let r = pqd_limit(&p, Normalization::C(0.2), &[0.5, 0.1, 0.01, 0.001]).map_err(err)?;
    let ds: Vec<f64> = r.steps.iter().map(|s| s.distance).collect();
    let monotone = ds.windows(2).all(|w| w[1] < w[0]);
    ensure(monotone && r.monotone, format!("distances {ds:?}"))?;
    let last = *ds.last().ok_or("no steps")?;
    ensure(last < 1e-2, format!("distance at a = 1e-3 is {last:e}"))?;
    let want = log_monomial(ONE, 1, 0.2).map_err(err)?;
    ensure(circle_gap(&r.limit, &want, 256) < 1e-12, "limit map is not cz e^{c/z}")?;
    Ok(format!("distances {:?}", ds.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>()))
}

fn c15_dynamics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 1000 {
        let mag = 10f64.powf(rng.gen_range(-6.0..6.0));
        let z = C::from_polar(mag, rng.gen_range(-PI..PI));
        if z.im.abs() < 1e-9 && z.re < -1.0 / E {
            continue;
        }
        let w = lambert_w0(z).map_err(err)?;
        worst = worst.max((w * w.exp() - z).norm() / (1.0 + z.norm()));
        n += 1;
    }
    ensure(worst < 1e-13, format!("Lambert residual {worst:e}"))?;
    let m = teardrop();
    let mut fix: f64 = 0.0;
    for j in 0..512 {
        let w = m.eval(C::from_polar(1.0, 2.0 * PI * j as f64 / 512.0));
        fix = fix.max((schwarz_reflect(&m, w).map_err(err)? - w).norm());
    }
    ensure(fix < 1e-8, format!("boundary not fixed: {fix:e}"))?;
    let region = Region::new(-3.0, -3.0, 3.0, 3.0).map_err(err)?;
    let t = Instant::now();
    let t50 = escape_grid(&m, region, 800, 800, 50).map_err(err)?;
    let t100 = escape_grid(&m, region, 800, 800, 100).map_err(err)?;
    let j50 = antiholo_exp_julia(region, 800, 800, 50, 50.0).map_err(err)?;
    let j100 = antiholo_exp_julia(region, 800, 800, 100, 50.0).map_err(err)?;
    let secs = t.elapsed().as_secs_f64();
    let dt = (t50.escape_fraction() - t100.escape_fraction()).abs();
    let dj = (j50.escape_fraction() - j100.escape_fraction()).abs();
    let non_escaping = t100.data.len() - t100.escaped_count() - t100.fault_count();
    ensure(secs < 60.0, format!("grids took {secs:.1} s"))?;
    ensure(dt < 0.01 && dj < 0.01, format!("escape fraction drift {dt:e} / {dj:e}"))?;
    ensure(non_escaping > 0, "teardrop grid has no non-escaping pixels")?;
    Ok(format!(
        "Lambert {worst:.1e}, fixed {fix:.1e}, grids {secs:.1} s, fractions {:.4}/{:.4} and {:.4}/{:.4}",
        t50.escape_fraction(),
        t100.escape_fraction(),
        j50.escape_fraction(),
        j100.escape_fraction()
    ))
}

fn c16_oracle_integrity() -> Outcome {
    let cardioid = rational_map(&[ZERO, ONE, c(0.5, 0.0)], &[ONE], Orientation::Interior);
    let ellipse = rational_map(&[c(0.4, -0.2), ZERO, c(1.3, 0.0)], &[ZERO, ONE], Orientation::Exterior);
    let fixtures: [(&MapSpec, PoleExpansion); 4] = [
        (&cardioid, PoleExpansion::single(c(0.2, 0.1), vec![ONE, c(0.3, -0.1)])),
        (&cardioid, PoleExpansion::single(c(-0.4, 0.0), vec![c(0.0, 1.0)])),
        (&ellipse, PoleExpansion::single(c(1.8, 0.5), vec![c(0.7, 0.2), c(0.1, 0.0)])),
        (&ellipse, PoleExpansion::single(c(-2.0, -1.0), vec![ONE])),
    ];
    let mut worst: f64 = 0.0;
    let mut probes = 0;
    for (m, f) in &fixtures {
        let g = transform_pe(*m, f).map_err(err)?;
        let ws = if m.is_interior() { exterior_probes(m, 5) } else { complement_probes(m, 5) }.map_err(err)?;
        for w in ws {
            let a = faber_contour(m, f, w, 2048).map_err(err)?;
            let b = g.eval(w);
            worst = worst.max((a - b).norm() / (1.0 + b.norm()));
            probes += 1;
        }
    }
    ensure(probes == 20, format!("{probes} probes"))?;
    ensure(worst < 1e-8, format!("Faber contour vs residue {worst:e}"))?;
    let disks = [(0.8, ZERO, 1.0), (0.5, c(1.0, 0.5), 2.0), (1.2, c(-1.5, 0.2), 0.5)];
    let mut area: f64 = 0.0;
    let mut maps: Vec<(MapSpec, f64)> = disks
        .iter()
        .map(|&(r, w0, a)| (rational_map(&[w0, c(r, 0.0)], &[ONE], Orientation::Interior), a))
        .collect();
    maps.push((cardioid.clone(), 1.0));
    maps.push((rational_map(&[c(2.0, 0.0), ONE, c(0.3, 0.2)], &[ONE], Orientation::Interior), 1.5));
    for (m, a) in &maps {
        let t1 = weighted_area(m, *a, AreaSide::Domain, 1024).map_err(err)?;
        let t2 = weighted_area_2d(m, *a, 256).map_err(err)?;
        area = area.max((t1 - t2).abs() / t1.abs().max(1.0));
    }
    ensure(area < 1e-6, format!("weighted area disagreement {area:e}"))?;
    Ok(format!("Faber {worst:.1e} over 20 probes, areas {area:.1e} over 5 fixtures"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 16] = [
        ("disk mean value property", c01_disk_mvp),
        ("cardioid quadrature function", c02_cardioid),
        ("ellipse exterior", c03_ellipse),
        ("one-point classical family", c04_one_point_classical),
        ("c* closed form", c05_c_star),
        ("monomial power-weighted family", c06_monomial_pqd),
        ("|w³ − 1| > c³ with weight |w|⁴", c07_cube_root_example),
        ("bounded one-point, a = 2", c08_bounded_one_point_a2),
        ("linear power-weighted family", c09_linear_pqd),
        ("quadratic quartic", c10_quadratic_quartic),
        ("log-weighted one-point bounded", c11_lqd_one_point_bounded),
        ("log-weighted monomial", c12_lqd_monomial),
        ("null log-weighted domains", c13_null_lqd),
        ("power to log limit", c14_limit),
        ("Schwarz reflection dynamics", c15_dynamics),
        ("oracle integrity", c16_oracle_integrity),
    ];
    let mut failed = vec![];
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("PASS {:>2} {name} ({secs:.2} s): {msg}", i + 1),
            Err(msg) => {
                println!("FAIL {:>2} {name} ({secs:.2} s): {msg}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
