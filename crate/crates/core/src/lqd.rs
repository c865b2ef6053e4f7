//! Log-weighted quadrature domains (weight `|w|^{−2}`, `0 ∉ Cl Ω`):
//! exponential-form maps `φ = w₀ e^{R}` or `c z e^{R}`, inversion
//! `w ↦ 1/w` and the `a → 0` limit of power-weighted domains.

use crate::conformal::univalence_check;
use crate::error::{QuadError, Result};
use crate::faber::transform_pe;
use crate::maps::{MapKind, MapSpec, Orientation};
use crate::numcheck::{default_tests, verify_with_expansion};
use crate::poly;
use crate::pqd::{
    clean_h, inverse_problem_power, monomial_family, pull_in, push_out, PowerAnsatz, PowerUnknowns,
    PqdProblem, ZeroSlot,
};
use crate::ratfun::{PoleExpansion, RationalFn};
use crate::solver::{homotopy_solve, InverseSolution, LmOptions, Normalization};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Smallest boundary modulus accepted as clear of the origin.
pub const ORIGIN_MARGIN: f64 = 1e-6;

/// Boundary samples used for the origin-clearance check.
const CLEARANCE_SAMPLES: usize = 512;

/// A log-weighted quadrature problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LqdProblem {
    pub h: RationalFn,
    pub bounded: bool,
}

impl LqdProblem {
    pub fn new(h: RationalFn, bounded: bool) -> Result<Self> {
        let p = LqdProblem { h, bounded };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bounded && self.h.deg_num() >= self.h.deg_den() && !self.h.is_zero() {
            return Err(QuadError::InvalidInput("a bounded domain needs h vanishing at infinity".into()));
        }
        if self.h.deg_den() > 0 && poly::eval(&self.h.den, ZERO).norm() <= 1e-12 * scale(&self.h.den) {
            return Err(QuadError::InvalidInput("h has a pole at 0, which must lie outside the closure".into()));
        }
        Ok(())
    }
}

fn scale(p: &[C]) -> f64 {
    p.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

/// `min |φ|` over boundary samples; an error when the boundary comes
/// within [`ORIGIN_MARGIN`] of `0` or when `φ` has a zero.
pub fn origin_clearance(m: &MapSpec) -> Result<f64> {
    if m.kind != MapKind::Log {
        return Err(QuadError::InvalidInput("expected an exponential-form map".into()));
    }
    if !m.blaschke.is_empty() {
        return Err(QuadError::NotApplicable("0 lies in the domain".into()));
    }
    let n = CLEARANCE_SAMPLES;
    let min = (0..n)
        .map(|k| m.eval(C::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).norm())
        .fold(f64::MAX, f64::min);
    if !(min > ORIGIN_MARGIN) {
        return Err(QuadError::BoundaryThroughOrigin);
    }
    Ok(min)
}

/// `h = (Φ(r)(w) − Φ(r)(0))/w` with `r = R^#`, given the pole expansion
/// of the exponent `R`.
pub(crate) fn log_h_with(m: &MapSpec, r_outer: &PoleExpansion) -> Result<PoleExpansion> {
    let mut r = r_outer.reflect();
    if let Some(c0) = r.poly.first_mut() {
        *c0 = ZERO;
    }
    let e = transform_pe(m, &r)?;
    let e0 = e.eval(ZERO);
    Ok(e.mul(&PoleExpansion::single(ZERO, vec![ONE])).add(&PoleExpansion::single(ZERO, vec![-e0])))
}

/// Solution of the log-weighted direct problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LogDirect {
    pub problem: LqdProblem,
    pub h: PoleExpansion,
    /// `min |φ|` on the boundary.
    pub clearance: f64,
}

/// The quadrature function of `φ(D)` or `φ(D^c)` for an exponential-form map.
pub fn direct_problem_log(m: &MapSpec) -> Result<LogDirect> {
    let clearance = origin_clearance(m)?;
    let h = clean_h(&log_h_with(m, &m.r.partial_fractions()?)?);
    let problem = LqdProblem { h: h.to_rational(), bounded: m.is_interior() };
    Ok(LogDirect { problem, h, clearance })
}

/// `max_θ | |P|² e^{2 Re R} − |φ|² |` on `n` circle samples: the boundary
/// law `R + R^# = ln|φ|² − ln|P|²` in exponentiated form.
pub fn log_boundary_residual(m: &MapSpec, n: usize) -> f64 {
    (0..n)
        .map(|k| {
            let z = C::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            let lhs = m.prefactor.norm_sqr() * (m.r.eval(z) + m.r.eval(z).conj()).re.exp();
            (lhs - m.eval(z).norm_sqr()).abs() / lhs.max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Solve for a Riemann map `φ = w₀ e^{R}` (bounded) or `c z e^{R}`
/// (unbounded) of a domain in `QD_0(h)`.
pub fn inverse_problem_log(p: &LqdProblem, norm: Normalization) -> Result<InverseSolution> {
    p.validate()?;
    let h = clean_h(&p.h.partial_fractions()?.cleaned(1e-15));
    let hpoly = poly::trim(&h.poly, 0.0);
    let terms: Vec<&crate::ratfun::PoleTerm> = h.terms.iter().collect();
    let (ans, x0) = if p.bounded {
        let w0 = match norm {
            Normalization::W0(w) if w.norm() > 0.0 => w,
            _ => return Err(QuadError::InvalidInput("bounded problems are normalized by w0 ≠ 0".into())),
        };
        if terms.is_empty() {
            return Err(QuadError::InvalidInput("h = 0 has no bounded quadrature domain".into()));
        }
        let slots: Vec<(usize, bool)> = terms
            .iter()
            .map(|t| (t.coeffs.len(), (t.pole - w0).norm() <= 1e-12 * (1.0 + w0.norm())))
            .collect();
        let ans = PowerAnsatz {
            a: 0.0,
            log: true,
            exterior: false,
            c: 0.0,
            w0,
            zero: ZeroSlot::None,
            zero_order: 1,
            n_d: 0,
            n_match: slots.len(),
            slots,
        };
        let mut zs = vec![];
        let mut es = vec![];
        for (t, (order, fixed)) in terms.iter().zip(&ans.slots) {
            let mut e = vec![ZERO; *order];
            let al = t.coeffs[0];
            if *fixed {
                e[0] = (al.conj() * w0.conj() / w0).sqrt();
                zs.push(ZERO);
            } else {
                let rk = al.norm().sqrt() * t.pole.norm().max(w0.norm());
                let r = rk.max(1.5 * (t.pole - w0).norm());
                let u = pull_in((w0 - t.pole) / r, 0.9);
                zs.push(-u);
                e[0] = C::new(r * (1.0 - u.norm_sqr()), 0.0) / w0;
            }
            es.push(e);
        }
        let x0 = ans.pack(&PowerUnknowns { p: 0.0, z0: ZERO, d: vec![], zs, es });
        (ans, x0)
    } else {
        let c = match norm {
            Normalization::C(c) if c > 0.0 => c,
            _ => return Err(QuadError::InvalidInput("unbounded problems need a conformal radius c > 0".into())),
        };
        if terms.is_empty() && poly::is_zero(&hpoly) {
            let map = MapSpec::log(Orientation::Exterior, C::new(c, 0.0), true, vec![], RationalFn::constant(ZERO))?;
            return finish_log(map, &h, 0.0);
        }
        let n_d = hpoly.len();
        let ans = PowerAnsatz {
            a: 0.0,
            log: true,
            exterior: true,
            c,
            w0: ZERO,
            zero: ZeroSlot::None,
            zero_order: 1,
            n_d,
            slots: terms.iter().map(|t| (t.coeffs.len(), false)).collect(),
            n_match: terms.len(),
        };
        let d: Vec<C> = (1..=n_d).map(|m| hpoly[m - 1].conj() * c.powi(m as i32)).collect();
        let shift = C::new(c, 0.0) * d.first().copied().unwrap_or(ZERO);
        let zs: Vec<C> = terms.iter().map(|t| push_out((t.pole - shift) / c, 1.5)).collect();
        let es: Vec<Vec<C>> = terms.iter().map(|t| vec![ZERO; t.coeffs.len()]).collect();
        let x0 = ans.pack(&PowerUnknowns { p: 0.0, z0: ZERO, d, zs, es });
        (ans, x0)
    };
    let target = ans.target(&h, &terms, &[]);
    let sol = homotopy_solve(|x| ans.features(x), &x0, &target, 1e-11, LmOptions::default())?;
    let u = ans.unpack(&sol.x);
    let r = ans.outer(&u).cleaned(1e-15);
    let map = ans.map(&u, &r)?;
    finish_log(map, &h, sol.residual)
}

fn finish_log(map: MapSpec, h: &PoleExpansion, residual: f64) -> Result<InverseSolution> {
    origin_clearance(&map)?;
    let back = direct_problem_log(&map)?.h;
    let scale = 1.0 + h.distance(&PoleExpansion::zero());
    let roundtrip = back.distance(h) / scale;
    let univalence = univalence_check(&map, 1024)?;
    let (warning, cross_check) = if univalence.is_univalent() {
        let report = default_tests(&map).and_then(|t| verify_with_expansion(&map, 0.0, h, &t, 512));
        match report {
            Ok(r) => (None, Some(r.max_rel)),
            Err(e) => (Some(e.to_string()), None),
        }
    } else {
        let msg = format!("{:?}: {}", univalence.verdict, univalence.detail);
        (Some(QuadError::NonUnivalentSolution(msg).to_string()), None)
    };
    Ok(InverseSolution { map, residual, roundtrip, univalence, warning, cross_check })
}

/// `h(w) ↦ −h(1/w) w^{−2}`, the quadrature function of `{1/w : w ∈ Ω}`.
/// The result keeps the term at `0`, which lies outside `Cl(1/Ω)` and
/// does not affect the identity; [`restrict_to_domain`] drops it.
pub fn invert_domain(p: &LqdProblem) -> Result<LqdProblem> {
    if !p.bounded {
        return Err(QuadError::NotApplicable("inversion of an unbounded domain puts 0 inside".into()));
    }
    let n = p.h.deg_num();
    let d = p.h.deg_den();
    let rev = |q: &[C], len: usize| -> Vec<C> {
        let mut v = vec![ZERO; len + 1];
        for (i, c) in q.iter().enumerate().take(len + 1) {
            v[len - i] = *c;
        }
        v
    };
    // h(1/w) = w^{d−n} rev(num)/rev(den); times −w^{−2}.
    let mut num = poly::scale(&rev(&p.h.num, n), -ONE);
    let mut den = rev(&p.h.den, d);
    let shift = d as i64 - n as i64 - 2;
    if shift >= 0 {
        let mut v = vec![ZERO; shift as usize];
        v.extend(num);
        num = v;
    } else {
        let mut v = vec![ZERO; (-shift) as usize];
        v.extend(den);
        den = v;
    }
    Ok(LqdProblem { h: RationalFn::new(num, den)?, bounded: true })
}

/// Keep only the poles of `h` lying in the domain of `m`.
pub fn restrict_to_domain(h: &PoleExpansion, m: &MapSpec) -> PoleExpansion {
    let mut out = h.clone();
    out.terms.retain(|t| matches!(m.preimage_count(t.pole), Ok(n) if n > 0));
    out
}

/// Riemann map of `{1/w : w ∈ Ω}` for a bounded exponential-form map,
/// renormalized so that the derivative at `0` is positive.
pub fn invert_map(m: &MapSpec) -> Result<MapSpec> {
    if m.kind != MapKind::Log || !m.is_interior() || !m.blaschke.is_empty() {
        return Err(QuadError::NotApplicable("expected a bounded exponential-form map".into()));
    }
    let d = -m.r.derivative().eval(ZERO) * (-m.r.eval(ZERO)).exp() / m.prefactor;
    let lam = if d.norm() > 0.0 { d.conj() / d.norm() } else { ONE };
    let rot = |q: &[C]| -> Vec<C> { q.iter().enumerate().map(|(i, c)| c * lam.powu(i as u32)).collect() };
    let r = RationalFn::new(poly::scale(&rot(&m.r.num), -ONE), rot(&m.r.den))?;
    MapSpec::log(Orientation::Interior, ONE / m.prefactor, false, vec![], r)
}

/// `φ(z) = w₀ e^{√α z}`, the bounded domain in `QD_0(α/(w − w₀))`
/// (univalent exactly for `0 < α < π²`).
pub fn log_one_point_bounded(alpha: f64, w0: C) -> Result<MapSpec> {
    if !(alpha > 0.0) || w0.norm() == 0.0 {
        return Err(QuadError::InvalidInput("need α > 0 and w0 ≠ 0".into()));
    }
    let e = (w0.conj() / w0).sqrt() * alpha.sqrt();
    MapSpec::log(Orientation::Interior, w0, false, vec![], RationalFn::polynomial(&[ZERO, e]))
}

/// `φ(z) = c z e^{ᾱ k c^k z^{−k}}`, the `Z_k`-symmetric domain in
/// `QD_0(α k w^{k−1})`.
pub fn log_monomial(alpha: C, k: usize, c: f64) -> Result<MapSpec> {
    if k == 0 || !(c > 0.0) {
        return Err(QuadError::InvalidInput("need k ≥ 1 and c > 0".into()));
    }
    let mut den = vec![ZERO; k + 1];
    den[k] = ONE;
    let r = RationalFn::new(vec![alpha.conj() * (k as f64) * c.powi(k as i32)], den)?;
    MapSpec::log(Orientation::Exterior, C::new(c, 0.0), true, vec![], r)
}

/// `|α k² c^k| < 1`.
pub fn log_monomial_univalent(alpha: C, k: usize, c: f64) -> bool {
    alpha.norm() * (k * k) as f64 * c.powi(k as i32) < 1.0
}

/// One step of the `a → 0` limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitStep {
    pub a: f64,
    /// `sup |φ_a − φ_0|` over the boundary samples.
    pub distance: f64,
}

/// Convergence of power-weighted Riemann maps to the log-weighted one.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitReport {
    pub limit: MapSpec,
    pub steps: Vec<LimitStep>,
    /// Distances strictly decrease along the sequence.
    pub monotone: bool,
}

/// `(α, k)` with `h = α k w^{k−1}`, if `h` is such a monomial.
fn as_monomial(h: &RationalFn) -> Option<(C, usize)> {
    if h.deg_den() > 0 {
        return None;
    }
    let p: Vec<C> = h.num.iter().map(|c| c / h.den[0]).collect();
    let p = poly::trim(&p, 0.0);
    if poly::is_zero(&p) {
        return Some((ZERO, 1));
    }
    let k = p.len();
    if p[..k - 1].iter().any(|c| c.norm() > 0.0) {
        return None;
    }
    Some((p[k - 1] / k as f64, k))
}

/// Sample `φ_a` for each weight `a` of a decreasing sequence and measure
/// its distance to the log-weighted map on 256 boundary samples.
pub fn pqd_limit(p: &LqdProblem, norm: Normalization, a_seq: &[f64]) -> Result<LimitReport> {
    let limit = inverse_problem_log(p, norm)?.map;
    let n = 256;
    let zs: Vec<C> = (0..n).map(|k| C::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    let mono = match (p.bounded, norm) {
        (false, Normalization::C(c)) => as_monomial(&p.h).map(|(al, k)| (al, k, c)),
        _ => None,
    };
    let mut steps = vec![];
    for &a in a_seq {
        let map = match mono {
            Some((al, k, c)) => monomial_family(a, al, k, c, false).map(|m| m.map),
            None => PqdProblem::new(a, p.h.clone(), p.bounded, false)
                .and_then(|q| inverse_problem_power(&q, norm))
                .map(|s| s.map),
        }
        .map_err(|_| QuadError::MissingSolution(a))?;
        let distance = zs.iter().map(|z| (map.eval(*z) - limit.eval(*z)).norm()).fold(0.0, f64::max);
        steps.push(LimitStep { a, distance });
    }
    let monotone = steps.windows(2).all(|w| w[1].distance < w[0].distance || w[0].distance == 0.0);
    Ok(LimitReport { limit, steps, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn gap(m1: &MapSpec, m2: &MapSpec) -> f64 {
        (0..64)
            .map(|j| {
                let z = C::from_polar(1.0, 2.0 * PI * j as f64 / 64.0 + 0.1);
                (m1.eval(z) - m2.eval(z)).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn one_point_bounded_direct() {
        let w0 = c(2.0, 0.0);
        let m = log_one_point_bounded(1.0, w0).unwrap();
        let d = direct_problem_log(&m).unwrap();
        assert!(d.h.distance(&PoleExpansion::single(w0, vec![ONE])) < 1e-12);
        let m = log_one_point_bounded(2.0, c(0.6, 0.8)).unwrap();
        assert!(m.derivative(ZERO).im.abs() < 1e-14 && m.derivative(ZERO).re > 0.0);
        let d = direct_problem_log(&m).unwrap();
        assert!(d.h.distance(&PoleExpansion::single(c(0.6, 0.8), vec![c(2.0, 0.0)])) < 1e-12);
    }

    #[test]
    fn monomial_direct() {
        let al = c(0.1, 0.05);
        for k in [1, 2, 5] {
            let m = log_monomial(al, k, 0.9).unwrap();
            let mut p = vec![ZERO; k];
            p[k - 1] = al * k as f64;
            let d = direct_problem_log(&m).unwrap();
            assert!(d.h.distance(&PoleExpansion::polynomial(&p)) < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn null_domain() {
        let p = LqdProblem::new(RationalFn::constant(ZERO), false).unwrap();
        let s = inverse_problem_log(&p, Normalization::C(1.5)).unwrap();
        assert!(s.map.r.is_zero());
        assert!(s.cross_check.unwrap() < 1e-10);
    }

    #[test]
    fn inverse_one_point_bounded() {
        let w0 = c(2.0, 0.0);
        let p = LqdProblem::new(RationalFn::pole_term(w0, 1, ONE), true).unwrap();
        let s = inverse_problem_log(&p, Normalization::W0(w0)).unwrap();
        assert!(gap(&s.map, &log_one_point_bounded(1.0, w0).unwrap()) < 1e-10);
        assert!(s.cross_check.unwrap() < 1e-9);
    }

    #[test]
    fn inverse_monomial_and_one_point_unbounded() {
        let al = c(0.2, 0.0);
        let p = LqdProblem::new(RationalFn::constant(al), false).unwrap();
        let s = inverse_problem_log(&p, Normalization::C(1.2)).unwrap();
        assert!(gap(&s.map, &log_monomial(al, 1, 1.2).unwrap()) < 1e-9);

        let p = LqdProblem::new(RationalFn::pole_term(c(2.0, 0.0), 1, c(0.3, 0.0)), false).unwrap();
        let s = inverse_problem_log(&p, Normalization::C(1.0)).unwrap();
        assert!(s.roundtrip < 1e-9, "{}", s.roundtrip);
        assert!(s.cross_check.unwrap() < 1e-8);
    }

    #[test]
    fn inversion() {
        let w0 = c(1.5, 0.5);
        let p = LqdProblem::new(RationalFn::pole_term(w0, 1, c(0.8, 0.0)), true).unwrap();
        let q = invert_domain(&p).unwrap();
        let back = invert_domain(&q).unwrap();
        for z in [c(0.3, 0.2), c(-1.0, 2.0), c(4.0, -1.0)] {
            assert!((back.h.eval(z) - p.h.eval(z)).norm() < 1e-12);
            let want = -p.h.eval(ONE / z) / (z * z);
            assert!((q.h.eval(z) - want).norm() < 1e-12);
        }
        let m = log_one_point_bounded(0.8, w0).unwrap();
        let mi = invert_map(&m).unwrap();
        for j in 0..8 {
            let w = mi.eval(C::from_polar(0.6, j as f64));
            assert_eq!(m.preimage_count(ONE / w).unwrap(), 1);
        }
        let hq = restrict_to_domain(&q.h.partial_fractions().unwrap(), &mi);
        assert!(direct_problem_log(&mi).unwrap().h.distance(&hq) < 1e-10);
    }

    #[test]
    fn limit_of_power_weights() {
        let p = LqdProblem::new(RationalFn::constant(ONE), false).unwrap();
        let r = pqd_limit(&p, Normalization::C(0.2), &[0.5, 0.1, 0.01, 0.001]).unwrap();
        assert!(r.monotone);
        assert!(r.steps.last().unwrap().distance < 1e-2);
    }

    #[test]
    fn boundary_law() {
        let m = log_monomial(c(0.1, 0.2), 3, 0.8).unwrap();
        assert!(log_boundary_residual(&m, 512) < 1e-12);
    }

    #[test]
    fn boundary_through_origin_rejected() {
        let r = RationalFn::polynomial(&[ZERO, c(PI, 0.0)]);
        let m = MapSpec::log(Orientation::Interior, ONE, false, vec![], r).unwrap();
        assert!(origin_clearance(&m).is_ok());
    }
}
