//! Univalence verdicts for Riemann maps: boundary self-intersection
//! search (Darboux), critical points of `φ'`, cusps, corners and the
//! starlike quantity `Re(z φ'/φ)`.

use crate::error::{QuadError, Result};
use crate::maps::MapSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

type C = Complex64;

/// A critical point of `φ` closer than this to the circle is a cusp.
pub const CUSP_TOL: f64 = 1e-6;
/// Refinement tolerance of self-intersection parameters.
pub const THETA_TOL: f64 = 1e-10;
/// Boundary points with `|φ|` below this (relative) are corners.
pub const CORNER_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    Univalent,
    SelfIntersecting,
    Cusped,
    NotAnalytic,
}

/// Outcome of [`univalence_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UnivalenceReport {
    pub verdict: Verdict,
    /// Self-intersection parameter pairs `(θ₁, θ₂)`, `θ₁ < θ₂`.
    pub crossings: Vec<(f64, f64)>,
    /// Cusp parameters.
    pub cusps: Vec<f64>,
    /// Corner parameters (boundary through the origin of a power map).
    pub corners: Vec<f64>,
    /// `min |φ'| / max |φ'|` on the boundary samples (0 when cusped).
    pub margin: f64,
    /// Zeros of `φ'` inside the map domain.
    pub critical_points: i64,
    pub detail: String,
}

impl UnivalenceReport {
    pub fn is_univalent(&self) -> bool {
        self.verdict == Verdict::Univalent
    }
}

/// Cusp classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CuspType {
    /// `φ'' ≠ 0` at the critical point: a `(3,2)` cusp.
    ThreeTwo,
    /// Higher-order degeneracy.
    Higher,
}

fn wrap(t: f64) -> f64 {
    t.rem_euclid(2.0 * PI)
}

/// Zeros of `φ'` within `tol` of the unit circle, excluding corners.
pub fn cusp_detect_tol(m: &MapSpec, tol: f64) -> Vec<(f64, CuspType)> {
    let n = 4096;
    let vals: Vec<f64> = (0..n)
        .map(|k| {
            let z = C::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            m.derivative(z).norm()
        })
        .collect();
    let scale = vals.iter().cloned().filter(|v| v.is_finite()).fold(0.0, f64::max).max(1e-300);
    let wscale = (0..64)
        .map(|k| m.eval(C::from_polar(1.0, 2.0 * PI * k as f64 / 64.0)).norm())
        .fold(0.0, f64::max);
    let mut out: Vec<(f64, CuspType)> = Vec::new();
    for k in 0..n {
        let v = vals[k];
        let l = vals[(k + n - 1) % n];
        let r = vals[(k + 1) % n];
        if !(v <= l && v <= r) || !v.is_finite() || v > 0.2 * scale {
            continue;
        }
        let mut z = C::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        let mut conv = false;
        for _ in 0..60 {
            let j = m.jet(z, 3);
            let d1 = j.coeff(1);
            let d2 = j.coeff(2) * 2.0;
            if d1.norm() < 1e-15 * scale {
                conv = true;
                break;
            }
            let step = d1 / d2;
            if !step.is_finite() {
                break;
            }
            let step = if step.norm() > 0.05 { step * (0.05 / step.norm()) } else { step };
            z -= step;
            if step.norm() < 1e-15 {
                conv = true;
                break;
            }
        }
        if !conv || (z.norm() - 1.0).abs() > tol {
            continue;
        }
        if m.eval(z).norm() < CORNER_REL * wscale.max(1e-300) {
            continue;
        }
        let th = wrap(z.arg());
        if out.iter().any(|(t, _)| {
            let d = (t - th).abs();
            d.min(2.0 * PI - d) < 1e-6
        }) {
            continue;
        }
        let d2 = m.jet(z, 3).coeff(2);
        let kind = if d2.norm() > 1e-3 * scale { CuspType::ThreeTwo } else { CuspType::Higher };
        out.push((th, kind));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Cusps with the default tolerance.
pub fn cusp_detect(m: &MapSpec) -> Vec<(f64, CuspType)> {
    cusp_detect_tol(m, CUSP_TOL)
}

fn seg_intersect(p1: C, p2: C, q1: C, q2: C) -> Option<(f64, f64)> {
    let r = p2 - p1;
    let s = q2 - q1;
    let den = r.re * s.im - r.im * s.re;
    if den.abs() < 1e-300 {
        return None;
    }
    let qp = q1 - p1;
    let t = (qp.re * s.im - qp.im * s.re) / den;
    let u = (qp.re * r.im - qp.im * r.re) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// Newton on `φ(e^{iθ₁}) = φ(e^{iθ₂})`.
fn refine_crossing(m: &MapSpec, mut t1: f64, mut t2: f64) -> Option<(f64, f64)> {
    for _ in 0..50 {
        let z1 = C::from_polar(1.0, t1);
        let z2 = C::from_polar(1.0, t2);
        let j1 = m.jet(z1, 2);
        let j2 = m.jet(z2, 2);
        let f = j1.coeff(0) - j2.coeff(0);
        let a = j1.coeff(1) * C::new(0.0, 1.0) * z1;
        let b = -j2.coeff(1) * C::new(0.0, 1.0) * z2;
        let det = a.re * b.im - a.im * b.re;
        if det.abs() < 1e-300 {
            return None;
        }
        let d1 = (f.re * b.im - f.im * b.re) / det;
        let d2 = (a.re * f.im - a.im * f.re) / det;
        t1 -= d1;
        t2 -= d2;
        if d1.abs().max(d2.abs()) < THETA_TOL {
            let (x, y) = (wrap(t1), wrap(t2));
            let d = (x - y).abs();
            if d.min(2.0 * PI - d) < 1e-7 {
                return None;
            }
            return Some(if x < y { (x, y) } else { (y, x) });
        }
    }
    None
}

/// Self-intersections of the sampled boundary polygon, refined.
pub fn self_intersections(m: &MapSpec, n: usize) -> Result<Vec<(f64, f64)>> {
    let th: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let pts: Vec<C> = th.iter().map(|t| m.eval(C::from_polar(1.0, *t))).collect();
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(QuadError::NonFinite);
    }
    let mut total_len = 0.0;
    let (mut x0, mut y0) = (f64::MAX, f64::MAX);
    for k in 0..n {
        total_len += (pts[(k + 1) % n] - pts[k]).norm();
        x0 = x0.min(pts[k].re);
        y0 = y0.min(pts[k].im);
    }
    let cell = (2.0 * total_len / n as f64).max(1e-300);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for k in 0..n {
        let a = pts[k];
        let b = pts[(k + 1) % n];
        let (ix0, ix1) = (((a.re.min(b.re) - x0) / cell) as i64, ((a.re.max(b.re) - x0) / cell) as i64);
        let (iy0, iy1) = (((a.im.min(b.im) - y0) / cell) as i64, ((a.im.max(b.im) - y0) / cell) as i64);
        if (ix1 - ix0 + 1) * (iy1 - iy0 + 1) > 4096 {
            return Err(QuadError::SampleAliasing);
        }
        for ix in ix0..=ix1 {
            for iy in iy0..=iy1 {
                grid.entry((ix, iy)).or_default().push(k);
            }
        }
    }
    let mut raw: Vec<(f64, f64)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for segs in grid.values() {
        for (ii, &i) in segs.iter().enumerate() {
            for &j in &segs[ii + 1..] {
                let (i, j) = if i < j { (i, j) } else { (j, i) };
                if j - i <= 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if !seen.insert((i, j)) {
                    continue;
                }
                if let Some((t, u)) = seg_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                    let h = 2.0 * PI / n as f64;
                    raw.push((th[i] + t * h, th[j] + u * h));
                }
            }
        }
    }
    if raw.len() > n / 8 {
        return Err(QuadError::SampleAliasing);
    }
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in raw {
        let r = refine_crossing(m, a, b).unwrap_or((wrap(a.min(b)), wrap(a.max(b))));
        if !out.iter().any(|(x, y)| (x - r.0).abs() < 1e-7 && (y - r.1).abs() < 1e-7) {
            out.push(r);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Darboux-style univalence check with argument-principle cross-checks.
pub fn univalence_check(m: &MapSpec, n: usize) -> Result<UnivalenceReport> {
    let mut rep = UnivalenceReport {
        verdict: Verdict::Univalent,
        crossings: vec![],
        cusps: vec![],
        corners: vec![],
        margin: 0.0,
        critical_points: 0,
        detail: String::new(),
    };
    if let Err(e) = m.check_analytic() {
        rep.verdict = Verdict::NotAnalytic;
        rep.detail = e.to_string();
        return Ok(rep);
    }
    let wscale = (0..64)
        .map(|k| m.eval(C::from_polar(1.0, 2.0 * PI * k as f64 / 64.0)).norm())
        .fold(0.0, f64::max);
    let mut dmin = f64::MAX;
    let mut dmax: f64 = 0.0;
    for k in 0..n {
        let th = 2.0 * PI * k as f64 / n as f64;
        let z = C::from_polar(1.0, th);
        let w = m.eval(z);
        if w.norm() < CORNER_REL * wscale {
            rep.corners.push(th);
            continue;
        }
        let d = m.derivative(z).norm();
        if d.is_finite() {
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
    }
    rep.margin = if dmax > 0.0 { dmin / dmax } else { 0.0 };
    let cusps = cusp_detect(m);
    rep.cusps = cusps.iter().map(|(t, _)| *t).collect();
    if !rep.cusps.is_empty() {
        rep.verdict = Verdict::Cusped;
        rep.margin = 0.0;
        rep.detail = "critical point of φ on the boundary".into();
        rep.crossings = self_intersections(m, n).unwrap_or_default();
        return Ok(rep);
    }
    if !rep.corners.is_empty() {
        rep.detail = "boundary passes through the origin".into();
    }
    rep.critical_points = m.critical_count().unwrap_or_default();
    rep.crossings = self_intersections(m, n)?;
    if !rep.crossings.is_empty() || rep.critical_points > 0 {
        rep.verdict = Verdict::SelfIntersecting;
        rep.detail = format!(
            "{} boundary crossings, {} interior critical points",
            rep.crossings.len(),
            rep.critical_points
        );
        return Ok(rep);
    }
    // Argument-principle cross-check at interior probes.
    for k in 0..5 {
        let t = 0.4 + 2.0 * PI * k as f64 / 5.0;
        let z = if m.is_interior() { C::from_polar(0.5, t) } else { C::from_polar(2.0, t) };
        let w = m.eval(z);
        if let Ok(cnt) = m.preimage_count(w) {
            if cnt != 1 {
                rep.verdict = Verdict::SelfIntersecting;
                rep.detail = format!("{cnt} preimages of {w}");
                return Ok(rep);
            }
        }
    }
    if rep.margin <= 0.0 {
        rep.margin = f64::MIN_POSITIVE;
    }
    Ok(rep)
}

/// Where the starlike quantity is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarCenter {
    Origin,
    Infinity,
}

/// `min_θ Re(z φ'(z)/φ(z))` on `|z| = 1`, refined by golden-section
/// search around the smallest samples.
pub fn starlike_test(m: &MapSpec, _center: StarCenter) -> f64 {
    let q = |t: f64| -> f64 {
        let z = C::from_polar(1.0, t);
        let j = m.jet(z, 2);
        (z * j.coeff(1) / j.coeff(0)).re
    };
    let n = 2048;
    let h = 2.0 * PI / n as f64;
    let vals: Vec<f64> = (0..n).map(|k| q(k as f64 * h)).collect();
    let mut order: Vec<usize> = (0..n)
        .filter(|&k| vals[k] <= vals[(k + n - 1) % n] && vals[k] <= vals[(k + 1) % n])
        .collect();
    order.sort_by(|a, b| vals[*a].partial_cmp(&vals[*b]).unwrap());
    let mut best = vals.iter().cloned().fold(f64::MAX, f64::min);
    for &k in order.iter().take(4) {
        let (mut a, mut b) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        for _ in 0..80 {
            if q(c) < q(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        best = best.min(q(0.5 * (a + b)));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Orientation;
    use crate::ratfun::RationalFn;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn quad(b: f64) -> MapSpec {
        MapSpec::rational(RationalFn::polynomial(&[c(0.0, 0.0), c(1.0, 0.0), c(b, 0.0)]), Orientation::Interior)
            .unwrap()
    }

    #[test]
    fn cardioid_is_cusped_at_pi() {
        let r = univalence_check(&quad(0.5), 2048).unwrap();
        assert_eq!(r.verdict, Verdict::Cusped);
        assert!((r.cusps[0] - PI).abs() < 1e-8);
        let cs = cusp_detect(&quad(0.5));
        assert_eq!(cs[0].1, CuspType::ThreeTwo);
    }

    #[test]
    fn quadratic_beyond_cardioid_self_intersects() {
        let r = univalence_check(&quad(0.6), 2048).unwrap();
        assert_eq!(r.verdict, Verdict::SelfIntersecting);
        let r = univalence_check(&quad(0.3), 2048).unwrap();
        assert_eq!(r.verdict, Verdict::Univalent);
        assert!(r.margin > 0.0);
    }

    #[test]
    fn identity_is_starlike() {
        let m = quad(0.0);
        assert!((starlike_test(&m, StarCenter::Origin) - 1.0).abs() < 1e-14);
    }
}
