//! Boundary-integral oracle: trapezoid contour integrals, quadrature
//! identity residuals, weighted areas, Cauchy transforms, potential
//! critical points and a 2-D area quadrature used to cross-check them.

use crate::error::{QuadError, Result};
use crate::maps::{BoundaryCurve, MapSpec};
use crate::ratfun::{PoleExpansion, RationalFn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Default node count, overridable by `QUADLAB_NODES`.
pub const DEFAULT_NODES: usize = 512;

pub fn default_nodes() -> usize {
    std::env::var("QUADLAB_NODES")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|n| *n >= 16)
        .unwrap_or(DEFAULT_NODES)
}

/// `(1/2πi)∮ g dw` along the curve in its sampled direction.
pub fn contour_integral<G: Fn(C) -> C>(curve: &BoundaryCurve, g: G) -> Result<C> {
    let n = curve.samples.len();
    let mut acc = ZERO;
    for s in &curve.samples {
        let v = g(s.w) * s.dw;
        if !v.is_finite() {
            return Err(QuadError::NonFinite);
        }
        acc += v;
    }
    Ok(acc * (2.0 * PI / n as f64) / C::new(0.0, 2.0 * PI))
}

/// The curve traversed with the domain on the left.
pub fn oriented(curve: &BoundaryCurve) -> BoundaryCurve {
    if curve.positive {
        curve.clone()
    } else {
        curve.reversed()
    }
}

/// The density `μ_a` whose `∂/∂w̄` is the weight: `w̄` for `a = 1`,
/// `(1/a) w̄ |w|^{2(a−1)}` for `a > 0`, `ln|w|²/w` for `a = 0`.
pub fn mu(a: f64, w: C) -> C {
    if a == 0.0 {
        C::new(w.norm_sqr().ln(), 0.0) / w
    } else if a == 1.0 {
        w.conj()
    } else {
        w.conj() * w.norm_sqr().powf(a - 1.0) / a
    }
}

/// The weight `|w|^{2(a−1)}` (`a = 0` gives `|w|^{−2}`).
pub fn weight(a: f64, w: C) -> f64 {
    w.norm_sqr().powf(a - 1.0)
}

/// A test function of the quadrature identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TestFn {
    /// `1/(w − p)`.
    Cauchy(C),
    /// `w^j` (negative `j` allowed).
    Monomial(i32),
}

impl TestFn {
    pub fn eval(&self, w: C) -> C {
        match self {
            TestFn::Cauchy(p) => ONE / (w - p),
            TestFn::Monomial(j) => w.powi(*j),
        }
    }

    fn expansion(&self) -> PoleExpansion {
        match self {
            TestFn::Cauchy(p) => PoleExpansion::single(*p, vec![ONE]),
            TestFn::Monomial(j) if *j >= 0 => {
                let mut v = vec![ZERO; *j as usize + 1];
                v[*j as usize] = ONE;
                PoleExpansion::polynomial(&v)
            }
            TestFn::Monomial(j) => {
                let m = (-*j) as usize;
                let mut v = vec![ZERO; m];
                v[m - 1] = ONE;
                PoleExpansion::single(ZERO, v)
            }
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            TestFn::Cauchy(p) => format!("1/(w-({:.6}{:+.6}i))", p.re, p.im),
            TestFn::Monomial(j) => format!("w^{j}"),
        }
    }
}

/// Residual of one test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestResidual {
    pub test_fn: String,
    pub lhs: C,
    pub rhs: C,
    /// The right side by contour quadrature (cross-check of the residue value).
    pub rhs_quadrature: C,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// Quadrature-identity verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualReport {
    pub per_test: Vec<TestResidual>,
    pub max_rel: f64,
    pub nodes: usize,
    pub orientation_used: String,
}

impl ResidualReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel < tol
    }
}

/// Points well inside the bounded complementary region of an unbounded
/// domain, ordered by distance from the boundary (largest first).
pub fn complement_probes(m: &MapSpec, count: usize) -> Result<Vec<C>> {
    let pts = m.boundary_curve(256)?.points();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    let g = 17;
    let mut cand: Vec<(f64, C)> = Vec::new();
    for i in 1..g {
        for j in 1..g {
            let w = C::new(
                x0 + (x1 - x0) * i as f64 / g as f64,
                y0 + (y1 - y0) * j as f64 / g as f64,
            );
            let d = pts.iter().map(|p| (p - w).norm()).fold(f64::MAX, f64::min);
            if d < 1e-3 * (x1 - x0 + y1 - y0) {
                continue;
            }
            if let Ok(0) = m.preimage_count(w) {
                cand.push((d, w));
            }
        }
    }
    cand.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    // Spread the picks: skip points too close to ones already chosen.
    let mut out: Vec<C> = Vec::new();
    let scale = (x1 - x0).max(y1 - y0);
    for (_, w) in &cand {
        if out.iter().all(|p| (p - w).norm() > 0.08 * scale) {
            out.push(*w);
        }
        if out.len() == count {
            break;
        }
    }
    for (_, w) in &cand {
        if out.len() == count {
            break;
        }
        if !out.contains(w) {
            out.push(*w);
        }
    }
    Ok(out)
}

/// Points outside a bounded domain.
pub fn exterior_probes(m: &MapSpec, count: usize) -> Result<Vec<C>> {
    let pts = m.boundary_curve(256)?.points();
    let center = pts.iter().sum::<C>() / pts.len() as f64;
    let rad = pts.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
    Ok((0..count)
        .map(|k| center + C::from_polar(rad * (1.25 + 0.2 * k as f64), 0.3 + 2.0 * PI * k as f64 / count as f64))
        .collect())
}

/// Default test functions for the domain class.
pub fn default_tests(m: &MapSpec) -> Result<Vec<TestFn>> {
    let mut tests = Vec::new();
    if m.is_interior() {
        for p in exterior_probes(m, 5)? {
            tests.push(TestFn::Cauchy(p));
        }
        for j in 0..=4 {
            tests.push(TestFn::Monomial(j));
        }
    } else {
        for p in complement_probes(m, 5)? {
            tests.push(TestFn::Cauchy(p));
        }
        if let Ok(0) = m.preimage_count(ZERO) {
            for j in 1..=5 {
                tests.push(TestFn::Monomial(-j));
            }
        }
    }
    Ok(tests)
}

fn check_class(m: &MapSpec, t: &TestFn) -> Result<()> {
    match (m.is_interior(), t) {
        (false, TestFn::Monomial(j)) if *j >= 0 => Err(QuadError::TestClassViolation(format!(
            "w^{j} does not vanish at infinity"
        ))),
        (true, TestFn::Monomial(j)) if *j < 0 => match m.preimage_count(ZERO) {
            Ok(0) => Ok(()),
            _ => Err(QuadError::TestClassViolation(format!("w^{j} has a pole inside the domain"))),
        },
        (false, TestFn::Monomial(j)) if *j < 0 => match m.preimage_count(ZERO) {
            Ok(0) => Ok(()),
            _ => Err(QuadError::TestClassViolation(format!("w^{j} has a pole inside the domain"))),
        },
        (_, TestFn::Cauchy(p)) => match m.preimage_count(*p) {
            Ok(0) => Ok(()),
            _ => Err(QuadError::TestClassViolation(format!("Cauchy probe {p} lies in the domain"))),
        },
        _ => Ok(()),
    }
}

/// `(1/2πi)∮_{∂Ω} f h dw` by residues; `∂Ω` has `Ω` on its left.
pub fn rhs_by_residues(bounded: bool, f: &TestFn, h: &PoleExpansion) -> C {
    let prod = f.expansion().mul(h);
    let hp: Vec<C> = h.terms.iter().map(|t| t.pole).collect();
    let mut inside = ZERO;
    let mut outside = ZERO;
    for t in &prod.terms {
        let r = t.coeffs.first().copied().unwrap_or(ZERO);
        if hp.iter().any(|p| (p - t.pole).norm() <= 1e-12 * (1.0 + p.norm())) {
            inside += r;
        } else {
            outside += r;
        }
    }
    if bounded {
        inside
    } else {
        -outside
    }
}

/// Verify `∫_Ω f ρ_a dA = (1/2πi)∮ f h dw` for each test function.
pub fn verify_quadrature_identity(
    m: &MapSpec,
    a: f64,
    h: &RationalFn,
    tests: &[TestFn],
    nodes: usize,
) -> Result<ResidualReport> {
    let hp = h.partial_fractions()?;
    verify_with_expansion(m, a, &hp, tests, nodes)
}

/// As [`verify_quadrature_identity`] with `h` already decomposed.
pub fn verify_with_expansion(
    m: &MapSpec,
    a: f64,
    h: &PoleExpansion,
    tests: &[TestFn],
    nodes: usize,
) -> Result<ResidualReport> {
    let curve = oriented(&m.boundary_curve(nodes)?);
    let bounded = m.is_interior();
    let mut per = Vec::with_capacity(tests.len());
    let mut max_rel: f64 = 0.0;
    let n = curve.samples.len() as f64;
    for t in tests {
        check_class(m, t)?;
        let lhs = contour_integral(&curve, |w| t.eval(w) * mu(a, w))?;
        let rhs = rhs_by_residues(bounded, t, h);
        let rhs_q = contour_integral(&curve, |w| t.eval(w) * h.eval(w))?;
        let mass: f64 = curve
            .samples
            .iter()
            .map(|s| (t.eval(s.w) * mu(a, s.w)).norm() * s.dw.norm())
            .sum::<f64>()
            / n;
        // μ_0 vanishes on |w| = 1, so the mass alone can sit at rounding level.
        let natural: f64 = curve
            .samples
            .iter()
            .map(|s| t.eval(s.w).norm() * s.w.norm().powf(2.0 * a - 1.0) * s.dw.norm())
            .sum::<f64>()
            / n;
        let abs_err = (lhs - rhs).norm().max((rhs - rhs_q).norm());
        let scale = rhs.norm().max(lhs.norm()).max(mass).max(natural).max(1e-300);
        let rel_err = abs_err / scale;
        max_rel = max_rel.max(rel_err);
        per.push(TestResidual { test_fn: t.descriptor(), lhs, rhs, rhs_quadrature: rhs_q, abs_err, rel_err });
    }
    Ok(ResidualReport {
        per_test: per,
        max_rel,
        nodes,
        orientation_used: if bounded {
            "counterclockwise (bounded domain on the left)".into()
        } else {
            "clockwise (unbounded domain on the left)".into()
        },
    })
}

/// Which region a weighted area refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaSide {
    Domain,
    Complement,
}

/// `t = ∫ |w|^{2(a−1)} dA` over the bounded one of `Ω`, `Ω^c`.
pub fn weighted_area(m: &MapSpec, a: f64, side: AreaSide, nodes: usize) -> Result<f64> {
    let bounded_region = match (m.is_interior(), side) {
        (true, AreaSide::Domain) | (false, AreaSide::Complement) => true,
        _ => false,
    };
    if !bounded_region {
        return Err(QuadError::NotApplicable("weighted area of an unbounded region".into()));
    }
    // θ-increasing traversal is counterclockwise around the bounded region.
    let curve = m.boundary_curve(nodes)?;
    let v = contour_integral(&curve, |w| mu(a, w))?;
    let scale = v.norm().max(1.0);
    if v.im.abs() > 1e-10 * scale {
        return Err(QuadError::ImaginaryLeak(v.im));
    }
    Ok(v.re)
}

/// `∫_R ρ_a(ξ)/(w − ξ) dA(ξ)` where `R` is the bounded one of `Ω`, `Ω^c`
/// (the domain for interior maps, the complement for exterior maps).
pub fn cauchy_transform(m: &MapSpec, a: f64, w: C, nodes: usize) -> Result<C> {
    let curve = m.boundary_curve(nodes)?;
    let scale = curve.samples.iter().map(|s| s.w.norm()).fold(0.0, f64::max);
    let h = 2.0 * PI / nodes as f64;
    for s in &curve.samples {
        if (s.w - w).norm() < 1e-9 * (1.0 + scale) || (s.w - w).norm() < 0.5 * s.dw.norm() * h {
            return Err(QuadError::ProbeOnBoundary);
        }
    }
    let v = contour_integral(&curve, |xi| mu(a, xi) / (w - xi))?;
    let count = m.preimage_count(w)?;
    let in_region = if m.is_interior() { count > 0 } else { count == 0 };
    Ok(if in_region { v + mu(a, w) } else { v })
}

/// `(1/2πi)∮_{|z|=1} f(z) φ'(z)/(w − φ(z)) dz` (interior maps) or the
/// same with kernel `φ'/(φ − w)` (exterior maps): the defining contour
/// integral of the Faber transform, evaluated at a probe outside `Ω`.
pub fn faber_contour(m: &MapSpec, f: &PoleExpansion, w: C, nodes: usize) -> Result<C> {
    let curve = m.boundary_curve(nodes)?;
    let sign = if m.is_interior() { 1.0 } else { -1.0 };
    let mut acc = ZERO;
    for s in &curve.samples {
        let z = C::from_polar(1.0, s.theta);
        // dz = i z dθ and φ'(z) dz = dw.
        let v = f.eval(z) * s.dw / (w - s.w) * sign;
        if !v.is_finite() {
            return Err(QuadError::NonFinite);
        }
        acc += v;
    }
    Ok(acc / (nodes as f64) / C::new(0.0, 1.0))
}

/// `∫_Ω |w|^{2(a−1)} dA` for an interior map by 2-D quadrature over the
/// disk: trapezoid in θ, double-exponential in the radius.
pub fn weighted_area_2d(m: &MapSpec, a: f64, n_theta: usize) -> Result<f64> {
    if !m.is_interior() {
        return Err(QuadError::NotApplicable("2-D oracle covers bounded domains".into()));
    }
    // The radial rule absorbs a weight singularity only at φ(0).
    if a < 1.0 && m.eval(ZERO).norm() > 1e-14 && !matches!(m.preimage_count(ZERO), Ok(0)) {
        return Err(QuadError::NotApplicable("weight singular away from φ(0)".into()));
    }
    let mut total = 0.0;
    for k in 0..n_theta {
        let th = 2.0 * PI * k as f64 / n_theta as f64;
        let e = C::from_polar(1.0, th);
        let out = quadrature::double_exponential::integrate(
            |rho| {
                let z = e * rho;
                let j = m.jet(z, 2);
                j.coeff(1).norm_sqr() * weight(a, j.coeff(0)) * rho
            },
            0.0,
            1.0,
            1e-13,
        );
        if !out.integral.is_finite() {
            return Err(QuadError::NonFinite);
        }
        total += out.integral;
    }
    // dA = dx dy / π and dθ = 2π / n.
    Ok(total * 2.0 / n_theta as f64)
}

/// Classification of a critical point of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CriticalKind {
    LocalMinimum,
    Saddle,
    Degenerate,
}

/// Critical points of `Q(w) = |w|^{2a}/a² − 2 Re H(w)` with `H' = h`,
/// for the one-point function `h = α/(w − w₀)` (or the constant `h = α`
/// when `w0` is `None`).  The classical case `a = 1` uses the closed
/// form; otherwise Newton on `∂Q/∂w = 0` from a grid of seeds.
pub fn potential_minima(alpha: C, w0: Option<C>, a: f64) -> Vec<(C, CriticalKind)> {
    let h = |w: C| match w0 {
        Some(p) => alpha / (w - p),
        None => alpha,
    };
    let dh = |w: C| match w0 {
        Some(p) => -alpha / ((w - p) * (w - p)),
        None => ZERO,
    };
    let classify = |w: C| -> CriticalKind {
        let qwb = w.norm_sqr().powf(a - 1.0);
        let qww = if a == 1.0 { ZERO } else { w.conj().powf(a) * w.powf(a - 2.0) * ((a - 1.0) / a) } - dh(w);
        let d = qwb - qww.norm();
        if d.abs() < 1e-12 * qwb.max(1.0) {
            CriticalKind::Degenerate
        } else if d > 0.0 {
            CriticalKind::LocalMinimum
        } else {
            CriticalKind::Saddle
        }
    };
    if a == 1.0 {
        if let Some(p) = w0 {
            // w = λu, λ = w₀/2: ū(u − 2) = α/|λ|².
            if p == ZERO {
                return vec![];
            }
            let lam = p / 2.0;
            let at = alpha / lam.norm_sqr();
            let disc = 4.0 + 4.0 * at.re - at.im * at.im;
            if disc < 0.0 {
                return vec![];
            }
            let mut out = Vec::new();
            for sgn in [-1.0, 1.0] {
                let u = C::new(0.5 * (2.0 + sgn * disc.sqrt()), 0.5 * at.im);
                let w = lam * u;
                out.push((w, classify(w)));
            }
            return out;
        }
    }
    let grad = |w: C| -> C {
        let base = if w == ZERO { ZERO } else { w.conj().powf(a) * w.powf(a - 1.0) / a };
        base - h(w)
    };
    let mut found: Vec<C> = Vec::new();
    let center = w0.unwrap_or(ZERO);
    let span = 2.0 + center.norm() + alpha.norm().powf(1.0 / (2.0 * a - 1.0).abs().max(0.5));
    for i in 0..24 {
        for j in 0..24 {
            let mut w = center
                + C::new(span * (i as f64 / 11.5 - 1.0), span * (j as f64 / 11.5 - 1.0));
            let mut ok = false;
            for _ in 0..60 {
                let f = grad(w);
                if !f.is_finite() {
                    break;
                }
                if f.norm() < 1e-13 * (1.0 + w.norm()) {
                    ok = true;
                    break;
                }
                let qwb = w.norm_sqr().powf(a - 1.0);
                let qww = w.conj().powf(a) * w.powf(a - 2.0) * ((a - 1.0) / a) - dh(w);
                // f + qww dw + qwb dw̄ = 0 and its conjugate.
                let det = qww * qww.conj() - qwb * qwb;
                if det.norm() < 1e-300 {
                    break;
                }
                let dw = (-f * qww.conj() + f.conj() * qwb) / det;
                if !dw.is_finite() {
                    break;
                }
                w += dw;
            }
            if ok && grad(w).norm() < 1e-10 * (1.0 + w.norm()) && w.norm() > 1e-8
                && !found.iter().any(|p| (p - w).norm() < 1e-7 * (1.0 + w.norm())) {
                    found.push(w);
                }
        }
    }
    found.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()));
    found.into_iter().map(|w| (w, classify(w))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Orientation;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn disk(r: f64, w0: C) -> MapSpec {
        MapSpec::rational(RationalFn::polynomial(&[w0, c(r, 0.0)]), Orientation::Interior).unwrap()
    }

    #[test]
    fn unit_circle_integrals() {
        let m = disk(1.0, ZERO);
        let cv = m.boundary_curve(64).unwrap();
        assert!((contour_integral(&cv, |z| ONE / z).unwrap() - ONE).norm() < 1e-14);
        let m = disk(0.7, ZERO);
        let cv = m.boundary_curve(64).unwrap();
        assert!((contour_integral(&cv, |z| z.conj()).unwrap() - c(0.49, 0.0)).norm() < 1e-14);
        let r = cv.reversed();
        let a = contour_integral(&cv, |z| z.conj() * z * z + ONE / z).unwrap();
        let b = contour_integral(&r, |z| z.conj() * z * z + ONE / z).unwrap();
        assert!((a + b).norm() < 1e-15);
    }

    #[test]
    fn disk_weighted_area() {
        for a in [0.5, 1.0, 2.0] {
            let m = disk(0.8, ZERO);
            let t = weighted_area(&m, a, AreaSide::Domain, 256).unwrap();
            assert!((t - 0.8f64.powf(2.0 * a) / a).abs() < 1e-13);
            let t2 = weighted_area_2d(&m, a, 64).unwrap();
            assert!((t2 - t).abs() < 1e-9, "a={a}: {t2} vs {t}");
        }
    }

    #[test]
    fn classical_minimum_closed_form() {
        let v = potential_minima(c(1.0, 0.0), Some(c(2.0, 0.0)), 1.0);
        let mins: Vec<_> = v.iter().filter(|(_, k)| *k == CriticalKind::LocalMinimum).collect();
        assert_eq!(mins.len(), 1);
        assert!((mins[0].0 - c(1.0 - 2f64.sqrt(), 0.0)).norm() < 1e-14);
    }
}
