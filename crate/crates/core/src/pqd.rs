//! Power-weighted quadrature domains (weight `|w|^{2(a−1)}`): direct and
//! inverse problems for maps in product form `φ = φ_in · R^{1/a}`,
//! closed-form families and the rotational reduction `Ω ↦ Ω^k`.

use crate::conformal::univalence_check;
use crate::error::{QuadError, Result};
use crate::faber::transform_pe;
use crate::maps::{blaschke_rational, MapKind, MapSpec, Orientation};
use crate::numcheck::{default_nodes, weighted_area, AreaSide};
use crate::poly;
use crate::ratfun::{PoleExpansion, RationalFn, Side};
use crate::solver::{homotopy_solve, levenberg_marquardt, InverseSolution, LmOptions, Normalization};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Poles closer than this to the origin are treated as sitting at `0`.
const ORIGIN_TOL: f64 = 1e-12;

/// A power-weighted quadrature problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PqdProblem {
    pub a: f64,
    pub h: RationalFn,
    pub bounded: bool,
    pub contains_zero: bool,
    pub contains_infinity: bool,
}

impl PqdProblem {
    pub fn new(a: f64, h: RationalFn, bounded: bool, contains_zero: bool) -> Result<Self> {
        let p = PqdProblem { a, h, bounded, contains_zero, contains_infinity: !bounded };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(QuadError::InvalidInput(format!("power weight a = {} must be positive", self.a)));
        }
        if self.contains_infinity == self.bounded {
            return Err(QuadError::InvalidInput("containsInfinity must be the negation of bounded".into()));
        }
        if self.bounded && self.h.value_at_infinity().is_none_or(|v| v.norm() > 1e-14) {
            return Err(QuadError::InvalidInput("a bounded quadrature function must vanish at infinity".into()));
        }
        if !self.contains_zero && self.h.deg_den() > 0 && self.h.den[0].norm() <= ORIGIN_TOL * poly_scale(&self.h.den)
        {
            return Err(QuadError::InvalidInput("a pole of h at 0 requires 0 in the domain".into()));
        }
        Ok(())
    }
}

fn poly_scale(p: &[C]) -> f64 {
    p.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |r, i| r * (n - i) as f64 / (i + 1) as f64)
}

/// `z^{j−shift} / (1 − z̄_k z)^j` as a pole expansion (`z_k ≠ 0`).
fn reflected_term(zk: C, j: usize, shift: usize) -> PoleExpansion {
    let q = ONE / zk.conj();
    let k = (-zk.conj()).powi(-(j as i32));
    let e = j - shift;
    let mut coeffs = vec![ZERO; j];
    let mut cst = ZERO;
    // z^e = Σ_i binom(e, i) q^{e−i} (z − q)^i
    for i in 0..=e {
        let c = k * binom(e, i) * q.powi((e - i) as i32);
        if i < j {
            coeffs[j - i - 1] += c;
        } else {
            cst += c;
        }
    }
    PoleExpansion::single(q, coeffs).add(&PoleExpansion::constant(cst))
}

/// The pieces of the direct problem.
#[derive(Debug, Clone)]
pub struct PowerParts {
    /// `h` before cleaning.
    pub h: PoleExpansion,
    /// The weighted area fixed by the algebra (pole cancellation at `0`
    /// or the regularized value `G(z₀) − E(0)`).
    pub t_alg: C,
    /// `|P|^{2a} R R^#`, equal to `|φ|^{2a}` on the unit circle.
    pub g: PoleExpansion,
}

fn zero_preimage(m: &MapSpec) -> Result<Option<C>> {
    match m.blaschke.len() {
        0 => Ok(None),
        1 => Ok(Some(m.blaschke[0])),
        _ => Err(QuadError::NotApplicable("more than one zero of φ in the map domain".into())),
    }
}

/// `h` and the algebraic weighted area of a power map, given the pole
/// expansion of its outer part `R`.
pub fn power_parts_with(m: &MapSpec, r: &PoleExpansion) -> Result<PowerParts> {
    let a = match m.kind {
        MapKind::Power { a } => a,
        _ => return Err(QuadError::InvalidInput("expected a power map".into())),
    };
    let g = r.mul(&r.reflect()).scale(C::new(m.prefactor.norm().powf(2.0 * a), 0.0));
    let proj = if m.is_interior() { g.project(Side::Exterior)? } else { g.project(Side::Interior)? };
    let e = transform_pe(m, &proj)?;
    let k = match zero_preimage(m)? {
        None => -e.eval(ZERO),
        Some(z0) => regular_at_zero(m, &g, z0) - regular_value(&e, ZERO),
    };
    let h = e
        .mul(&PoleExpansion::single(ZERO, vec![ONE]))
        .add(&PoleExpansion::single(ZERO, vec![k]))
        .scale(C::new(1.0 / a, 0.0));
    let t_alg = if m.is_interior() { k / a } else { -k / a };
    Ok(PowerParts { h, t_alg, g })
}

/// As [`power_parts_with`], decomposing `R` first.
pub fn power_parts(m: &MapSpec) -> Result<PowerParts> {
    power_parts_with(m, &m.r.partial_fractions()?)
}

/// Value at `w` of `f` with any principal part at `w` removed.
fn regular_value(f: &PoleExpansion, w: C) -> C {
    f.taylor(w, 1).coeff(0)
}

/// Constant term at `w = 0` of `G ∘ ψ`, where `ψ(0) = z₀`.
fn regular_at_zero(m: &MapSpec, g: &PoleExpansion, z0: C) -> C {
    let mut v = regular_value(g, z0);
    if let Some(t) = g.term_at(z0) {
        let n = t.coeffs.len() + 2;
        let mut delta = m.jet(z0, n);
        delta.0[0] = ZERO;
        let q = delta.revert().shift_down(1).recip();
        for (jj, c) in t.coeffs.iter().enumerate() {
            let j = jj + 1;
            v += c * q.powi(j).coeff(j);
        }
    }
    v
}

/// Solution of the direct problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PowerDirect {
    pub problem: PqdProblem,
    pub h: PoleExpansion,
    /// Weighted area from the algebra.
    pub t_algebraic: f64,
    /// Weighted area from the boundary integral.
    pub t_quadrature: f64,
}

/// The quadrature function of `φ(D)` or `φ(D^c)` for a power map, with
/// the weighted area reconciled against the boundary integral.
pub fn direct_problem_power(m: &MapSpec) -> Result<PowerDirect> {
    let parts = power_parts(m)?;
    let a = m.power_a();
    let side = if m.is_interior() { AreaSide::Domain } else { AreaSide::Complement };
    let t_quad = weighted_area(m, a, side, default_nodes())?;
    let t_alg = parts.t_alg;
    let tol = 1e-6 * t_quad.abs().max(1.0);
    if (t_alg.re - t_quad).abs() > tol || t_alg.im.abs() > tol {
        return Err(QuadError::InconsistentT { cancel: t_alg.re, quad: t_quad });
    }
    let h = clean_h(&parts.h);
    let problem = PqdProblem {
        a,
        h: h.to_rational(),
        bounded: m.is_interior(),
        contains_zero: !m.blaschke.is_empty(),
        contains_infinity: !m.is_interior(),
    };
    Ok(PowerDirect { problem, h, t_algebraic: t_alg.re, t_quadrature: t_quad })
}

pub(crate) fn clean_h(h: &PoleExpansion) -> PoleExpansion {
    let mut out = h.cleaned(1e-12);
    for t in out.terms.iter_mut() {
        if t.pole.norm() <= ORIGIN_TOL {
            t.pole = ZERO;
        }
    }
    out
}

/// `φ^a` as a rational function when `a` is a positive integer.
fn phi_power_rational(m: &MapSpec, n: usize) -> RationalFn {
    let mut inner = RationalFn::constant(m.prefactor);
    if m.z_factor {
        inner = inner.mul(&RationalFn::polynomial(&[ZERO, ONE]));
    }
    for l in &m.blaschke {
        inner = inner.mul(&blaschke_rational(*l));
    }
    let mut out = m.r.clone();
    for _ in 0..n {
        out = out.mul(&inner);
    }
    out
}

/// Integer weights only: `h = [(1/a) w^{a−1} (φ^a)^# ∘ ψ]`, the
/// Mittag-Leffler form of the quadrature function, computed from the
/// principal parts of `(1/a) φ^{a−1} (φ^a)^#` on the map domain.
pub fn mittag_leffler_h(m: &MapSpec) -> Result<PoleExpansion> {
    let a = m.power_a();
    let n = a.round();
    if (a - n).abs() > 1e-12 || n < 1.0 {
        return Err(QuadError::NotApplicable(format!("a = {a} is not a positive integer")));
    }
    let n = n as usize;
    let x = phi_power_rational(m, n).partial_fractions()?.reflect();
    let mut f = PoleExpansion::zero();
    for t in &x.terms {
        if !m.in_domain(t.pole, -1e-12) {
            continue;
        }
        let ord = t.coeffs.len();
        let phi_pow = m.jet(t.pole, ord + 1).powi(n - 1);
        let mut coeffs = vec![ZERO; ord];
        for k in 1..=ord {
            for i in 0..=(ord - k) {
                coeffs[k - 1] += t.coeffs[k + i - 1] * phi_pow.coeff(i);
            }
        }
        f = f.add(&PoleExpansion::single(t.pole, coeffs));
    }
    if !m.is_interior() {
        // φ^{a−1}(1/t) = t^{−(a−1)} s(t)^{a−1}; X = Σ x_j z^j.
        let deg = x.poly.len();
        let len = n + deg + 2;
        let (val, s) = m.at_infinity(len)?;
        if val != -1 {
            return Err(QuadError::InvalidInput("exterior map without a simple pole at infinity".into()));
        }
        let sp = s.powi(n - 1);
        let (xp, xneg) = x.laurent_inf(len);
        let xj = |j: i64| -> C {
            if j >= 0 {
                xp.get(j as usize).copied().unwrap_or(ZERO)
            } else {
                xneg.get((-j - 1) as usize).copied().unwrap_or(ZERO)
            }
        };
        let top = (n - 1) + deg;
        let mut p = vec![ZERO; top + 1];
        for (d, pd) in p.iter_mut().enumerate() {
            for i in 0..len {
                *pd += sp.coeff(i) * xj(d as i64 - (n as i64 - 1) + i as i64);
            }
        }
        f = f.add(&PoleExpansion::polynomial(&p));
    }
    Ok(clean_h(&transform_pe(m, &f.scale(C::new(1.0 / a, 0.0)))?))
}

/// `max_θ | |P|^{2a} (R R^#)(e^{iθ}) − |φ(e^{iθ})|^{2a} |` over `n` samples.
pub fn schwarz_boundary_residual(m: &MapSpec, n: usize) -> Result<f64> {
    let g = power_parts(m)?.g;
    let a = m.power_a();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let z = C::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        worst = worst.max((g.eval(z) - m.eval(z).norm().powf(2.0 * a)).norm());
    }
    Ok(worst)
}

/// Where the zero of `φ` sits in the ansatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum ZeroSlot {
    None,
    /// Unknown Blaschke parameter.
    Free,
    /// Bounded domain with `w₀ = 0`: `φ = P z R^{1/a}`, `P > 0` unknown.
    Origin,
}

/// Unknown layout of the product-form inverse problem.
///
/// Unbounded: `R = 1 + Σ_{m≤n} d_m z^{−m} + Σ_k Σ_j e_kj z^{j−1}/(1 − z̄_k z)^j`,
/// `φ = c z [|z₀| b_{z₀}] R^{1/a}`.
/// Bounded: `R = 1 + Σ_k Σ_j e_kj z^j/(1 − z̄_k z)^j`,
/// `φ = P [b_{z₀}] R^{1/a}` with `P = w₀` or `w₀/|z₀|`.
pub(crate) struct PowerAnsatz {
    pub(crate) a: f64,
    /// Exponential outer part `e^R` (log weight) instead of `R^{1/a}`.
    pub(crate) log: bool,
    pub(crate) exterior: bool,
    pub(crate) c: f64,
    pub(crate) w0: C,
    pub(crate) zero: ZeroSlot,
    pub(crate) zero_order: usize,
    pub(crate) n_d: usize,
    pub(crate) slots: Vec<(usize, bool)>,
    /// Slots matched against nodes of `h` away from the origin; the rest
    /// only add polynomial terms for a higher-order node at `0`.
    pub(crate) n_match: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct PowerUnknowns {
    pub(crate) p: f64,
    pub(crate) z0: C,
    pub(crate) d: Vec<C>,
    pub(crate) zs: Vec<C>,
    pub(crate) es: Vec<Vec<C>>,
}

impl PowerAnsatz {
    pub(crate) fn unpack(&self, x: &[f64]) -> PowerUnknowns {
        let mut i = 0;
        let mut p = 0.0;
        if self.zero == ZeroSlot::Origin {
            p = x[0];
            i = 1;
        }
        let mut take = || {
            let v = C::new(x[i], x[i + 1]);
            i += 2;
            v
        };
        let z0 = match self.zero {
            ZeroSlot::Free => take(),
            _ => ZERO,
        };
        let d: Vec<C> = (0..self.n_d).map(|_| take()).collect();
        let mut zs = vec![];
        let mut es = vec![];
        for (order, fixed) in &self.slots {
            zs.push(if *fixed { ZERO } else { take() });
            es.push((0..*order).map(|_| take()).collect());
        }
        PowerUnknowns { p, z0, d, zs, es }
    }

    pub(crate) fn pack(&self, u: &PowerUnknowns) -> Vec<f64> {
        let mut x = vec![];
        if self.zero == ZeroSlot::Origin {
            x.push(u.p);
        }
        let mut put = |v: C| {
            x.push(v.re);
            x.push(v.im);
        };
        if self.zero == ZeroSlot::Free {
            put(u.z0);
        }
        for v in &u.d {
            put(*v);
        }
        for (k, (_, fixed)) in self.slots.iter().enumerate() {
            if !fixed {
                put(u.zs[k]);
            }
            for e in &u.es[k] {
                put(*e);
            }
        }
        x
    }

    pub(crate) fn outer(&self, u: &PowerUnknowns) -> PoleExpansion {
        let mut r = PoleExpansion::constant(if self.log { ZERO } else { ONE });
        if !u.d.is_empty() {
            r = r.add(&PoleExpansion::single(ZERO, u.d.clone()));
        }
        for (k, (order, fixed)) in self.slots.iter().enumerate() {
            for j in 1..=*order {
                let e = u.es[k][j - 1];
                let term = if *fixed {
                    let mut p = vec![ZERO; j + 1];
                    p[j] = ONE;
                    PoleExpansion::polynomial(&p)
                } else if self.exterior {
                    reflected_term(u.zs[k], j, 1)
                } else {
                    reflected_term(u.zs[k], j, 0)
                };
                r = r.add(&term.scale(e));
            }
        }
        r
    }

    pub(crate) fn map(&self, u: &PowerUnknowns, r: &PoleExpansion) -> Result<MapSpec> {
        let rr = r.to_rational();
        if self.log {
            let (pre, o) = if self.exterior { (C::new(self.c, 0.0), Orientation::Exterior) } else { (self.w0, Orientation::Interior) };
            return MapSpec::log(o, pre, self.exterior, vec![], rr);
        }
        if self.exterior {
            let (pre, bl) = match self.zero {
                ZeroSlot::Free => (C::new(self.c * u.z0.norm(), 0.0), vec![u.z0]),
                _ => (C::new(self.c, 0.0), vec![]),
            };
            MapSpec::power(self.a, Orientation::Exterior, pre, true, bl, rr)
        } else {
            let (pre, bl) = match self.zero {
                ZeroSlot::None => (self.w0, vec![]),
                ZeroSlot::Free => (self.w0 / u.z0.norm(), vec![u.z0]),
                ZeroSlot::Origin => (C::new(u.p, 0.0), vec![ZERO]),
            };
            MapSpec::power(self.a, Orientation::Interior, pre, false, bl, rr)
        }
    }

    fn admissible(&self, u: &PowerUnknowns) -> bool {
        let outside = |z: C| z.norm() > 1.0 + 1e-9;
        let inside = |z: C| z.norm() < 1.0 - 1e-9;
        match self.zero {
            ZeroSlot::Free if self.exterior && !outside(u.z0) => return false,
            ZeroSlot::Free if !self.exterior && !(inside(u.z0) && u.z0.norm() > 1e-9) => return false,
            ZeroSlot::Origin if !(u.p > 0.0) => return false,
            _ => {}
        }
        for (k, z) in u.zs.iter().enumerate() {
            if !z.is_finite() || self.slots[k].1 {
                continue;
            }
            if (self.exterior && !outside(*z)) || (!self.exterior && (!inside(*z) || z.norm() < 1e-9)) {
                return false;
            }
            if u.zs[..k].iter().any(|w| (z - w).norm() < 1e-8) {
                return false;
            }
        }
        true
    }

    pub(crate) fn features(&self, x: &[f64]) -> Option<Vec<f64>> {
        let u = self.unpack(x);
        if !self.admissible(&u) {
            return None;
        }
        let r = self.outer(&u);
        let map = self.map(&u, &r).ok()?;
        let h = if self.log { crate::lqd::log_h_with(&map, &r).ok()? } else { power_parts_with(&map, &r).ok()?.h };
        let mut out = vec![];
        let mut put = |v: C| {
            out.push(v.re);
            out.push(v.im);
        };
        for k in 0..self.n_d {
            put(h.poly.get(k).copied().unwrap_or(ZERO));
        }
        for (k, (order, fixed)) in self.slots.iter().enumerate().take(self.n_match) {
            let image = if *fixed { self.w0 } else { map.eval(u.zs[k]) };
            if !fixed {
                put(image);
            }
            let coeffs = nearest_coeffs(&h, image);
            for j in 0..*order {
                put(coeffs.get(j).copied().unwrap_or(ZERO));
            }
        }
        if self.zero != ZeroSlot::None {
            let coeffs = nearest_coeffs(&h, ZERO);
            for j in 0..self.zero_order {
                put(coeffs.get(j).copied().unwrap_or(ZERO));
            }
        }
        if !self.exterior && self.zero != ZeroSlot::Origin {
            out.push(map.derivative(ZERO).im);
        }
        out.iter().all(|v| v.is_finite()).then_some(out)
    }

    pub(crate) fn target(&self, h: &PoleExpansion, terms: &[&crate::ratfun::PoleTerm], at_zero: &[C]) -> Vec<f64> {
        let mut out = vec![];
        let mut put = |v: C| {
            out.push(v.re);
            out.push(v.im);
        };
        for k in 0..self.n_d {
            put(h.poly.get(k).copied().unwrap_or(ZERO));
        }
        for (t, (order, fixed)) in terms.iter().zip(&self.slots) {
            if !fixed {
                put(t.pole);
            }
            for j in 0..*order {
                put(t.coeffs.get(j).copied().unwrap_or(ZERO));
            }
        }
        if self.zero != ZeroSlot::None {
            for j in 0..self.zero_order {
                put(at_zero.get(j).copied().unwrap_or(ZERO));
            }
        }
        if !self.exterior && self.zero != ZeroSlot::Origin {
            out.push(0.0);
        }
        out
    }
}

pub(crate) fn nearest_coeffs(h: &PoleExpansion, p: C) -> Vec<C> {
    h.terms
        .iter()
        .find(|t| (t.pole - p).norm() <= 1e-9 * (1.0 + p.norm()))
        .map(|t| t.coeffs.clone())
        .unwrap_or_default()
}

pub(crate) fn push_out(z: C, r: f64) -> C {
    if z.norm() >= r {
        z
    } else if z.norm() > 1e-12 {
        z / z.norm() * r
    } else {
        C::new(r, 0.0)
    }
}

pub(crate) fn pull_in(z: C, r: f64) -> C {
    if z.norm() <= r {
        z
    } else {
        z / z.norm() * r
    }
}

/// Solve for a Riemann map `φ = φ_in · R^{1/a}` of a domain in
/// `QD_a(h)` by Newton continuation on the coefficient system of the
/// direct problem.
pub fn inverse_problem_power(p: &PqdProblem, norm: Normalization) -> Result<InverseSolution> {
    p.validate()?;
    let a = p.a;
    let h = clean_h(&p.h.partial_fractions()?.cleaned(1e-15));
    let hpoly = poly::trim(&h.poly, 0.0);
    let zero_term: Vec<C> = h.terms.iter().find(|t| t.pole.norm() <= ORIGIN_TOL).map(|t| t.coeffs.clone()).unwrap_or_default();
    let others: Vec<&crate::ratfun::PoleTerm> = h.terms.iter().filter(|t| t.pole.norm() > ORIGIN_TOL).collect();
    if !zero_term.is_empty() && !p.contains_zero {
        return Err(QuadError::InvalidInput("a pole of h at 0 requires 0 in the domain".into()));
    }
    let (ans, x0) = if p.bounded {
        let w0 = match norm {
            Normalization::W0(w) => w,
            Normalization::C(_) => return Err(QuadError::InvalidInput("bounded problems are normalized by w0".into())),
        };
        if h.terms.is_empty() {
            return Err(QuadError::InvalidInput("h = 0 has no bounded quadrature domain".into()));
        }
        let origin = w0.norm() <= ORIGIN_TOL;
        if origin && !p.contains_zero {
            return Err(QuadError::InvalidInput("w0 = 0 lies in the domain".into()));
        }
        let zero = if !p.contains_zero {
            ZeroSlot::None
        } else if origin {
            ZeroSlot::Origin
        } else {
            ZeroSlot::Free
        };
        let mut slots: Vec<(usize, bool)> = others
            .iter()
            .map(|t| (t.coeffs.len(), (t.pole - w0).norm() <= 1e-12 * (1.0 + w0.norm())))
            .collect();
        let zero_order = zero_term.len().max(1);
        if zero == ZeroSlot::Origin && zero_term.len() > 1 {
            // Higher-order node at the origin: polynomial terms of R.
            slots.push((zero_term.len() - 1, true));
        }
        let n_match = others.len();
        let ans = PowerAnsatz { a, log: false, exterior: false, c: 0.0, w0, zero, zero_order, n_d: 0, slots, n_match };
        let (p0, z0, scale) = match zero {
            ZeroSlot::Origin => {
                let res = zero_term.first().copied().unwrap_or(ONE).norm();
                let p0 = (a * res).powf(1.0 / (2.0 * a));
                (p0, ZERO, p0)
            }
            ZeroSlot::Free => {
                let rho = others.iter().map(|t| t.coeffs[0].norm().sqrt()).fold(1.5 * w0.norm(), f64::max);
                (0.0, pull_in(-w0 / rho, 0.9), rho)
            }
            ZeroSlot::None => (0.0, ZERO, w0.norm()),
        };
        let mut zs = vec![];
        let mut es = vec![];
        for (k, (order, fixed)) in ans.slots.iter().enumerate() {
            let mut e = vec![ZERO; *order];
            if k >= others.len() {
                zs.push(ZERO);
                es.push(e);
                continue;
            }
            let t = others[k];
            let pk = t.pole;
            let rk = t.coeffs[0].norm().sqrt() / pk.norm().max(w0.norm()).powf(a - 1.0);
            match zero {
                ZeroSlot::None if *fixed => {
                    e[0] = C::new(a * rk, 0.0) / w0;
                    zs.push(ZERO);
                }
                ZeroSlot::None => {
                    let r = rk.max(1.5 * (pk - w0).norm());
                    let u = (w0 - pk) / r;
                    zs.push(-u);
                    e[0] = C::new(a * r * (1.0 - u.norm_sqr()), 0.0) / w0;
                }
                _ if *fixed => zs.push(ZERO),
                _ => zs.push(pull_in((pk - w0) / scale.max(pk.norm()), 0.67)),
            }
            es.push(e);
        }
        let x0 = ans.pack(&PowerUnknowns { p: p0, z0, d: vec![], zs, es });
        (ans, x0)
    } else {
        let c = match norm {
            Normalization::C(c) if c > 0.0 => c,
            _ => return Err(QuadError::InvalidInput("unbounded problems need a conformal radius c > 0".into())),
        };
        let n_d = hpoly.len();
        let zero = if p.contains_zero { ZeroSlot::Free } else { ZeroSlot::None };
        let slots: Vec<(usize, bool)> = others.iter().map(|t| (t.coeffs.len(), false)).collect();
        let n_match = others.len();
        let ans = PowerAnsatz { a, log: false, exterior: true, c, w0: ZERO, zero, zero_order: zero_term.len().max(1), n_d, slots, n_match };
        let mut d: Vec<C> = (1..=n_d)
            .map(|m| (a * hpoly[m - 1] / c.powf(2.0 * a - m as f64)).conj())
            .collect();
        let mut z0 = ZERO;
        if zero == ZeroSlot::Free {
            let h0 = hpoly.first().copied().unwrap_or(ZERO);
            let gamma = -a * h0.conj() / c.powf(2.0 * a - 1.0);
            z0 = if gamma.norm() > 0.0 && (2.0 * a - 1.0).abs() > 1e-12 {
                C::from_polar(gamma.norm().powf(1.0 / (2.0 * a - 1.0)), gamma.arg())
            } else {
                C::new(1.5, 0.0)
            };
            z0 = push_out(z0, 1.2);
            if d.is_empty() {
                d.push(ZERO);
            }
        }
        let ans = PowerAnsatz { n_d: d.len(), ..ans };
        if zero == ZeroSlot::Free {
            d[0] = -ONE / z0.conj();
        }
        let shift = C::new(c, 0.0) * d.first().copied().unwrap_or(ZERO) / a;
        let zs: Vec<C> = others.iter().map(|t| push_out((t.pole - shift) / c, 1.5)).collect();
        let es: Vec<Vec<C>> = others.iter().map(|t| vec![ZERO; t.coeffs.len()]).collect();
        let x0 = ans.pack(&PowerUnknowns { p: 0.0, z0, d, zs, es });
        (ans, x0)
    };
    let target = ans.target(&h, &others, &zero_term);
    let sol = homotopy_solve(|x| ans.features(x), &x0, &target, 1e-11, LmOptions::default())?;
    let u = ans.unpack(&sol.x);
    let r = ans.outer(&u).cleaned(1e-15);
    let map = ans.map(&u, &r)?;
    finish_power(map, &h, sol.residual)
}

fn finish_power(map: MapSpec, h: &PoleExpansion, residual: f64) -> Result<InverseSolution> {
    let back = clean_h(&power_parts(&map)?.h);
    let scale = 1.0 + h.distance(&PoleExpansion::zero());
    let roundtrip = back.distance(h) / scale;
    let univalence = univalence_check(&map, 1024)?;
    let mut warning = if univalence.is_univalent() {
        None
    } else {
        Some(QuadError::NonUnivalentSolution(format!("{:?}: {}", univalence.verdict, univalence.detail)).to_string())
    };
    if univalence.is_univalent() {
        if let Err(e) = direct_problem_power(&map) {
            warning = Some(e.to_string());
        }
    }
    let cross_check = mittag_leffler_h(&map).ok().map(|ml| ml.distance(&back) / scale);
    Ok(InverseSolution { map, residual, roundtrip, univalence, warning, cross_check })
}

/// `γ_k = −a ᾱ k / c^{2a−k}`, the parameter of the monomial family
/// `φ(z) = c z (1 − γ_k/z^k)^{1/a}` for `h = α k w^{k−1}`.
pub fn monomial_gamma(a: f64, alpha: C, k: usize, c: f64) -> C {
    -alpha.conj() * (a * k as f64) / c.powf(2.0 * a - k as f64)
}

/// `min_{|z|=1} a + Re Σ_j z_j/(z − z_j)`, the starlike margin of
/// `z Π_j (1 − z_j/z)^{1/a}` with respect to infinity.
pub fn power_starlike_margin(a: f64, roots: &[C]) -> f64 {
    let q = |t: f64| -> f64 {
        let z = C::from_polar(1.0, t);
        a + roots.iter().map(|zj| (zj / (z - zj)).re).sum::<f64>()
    };
    let n = 4096;
    let h = 2.0 * PI / n as f64;
    let vals: Vec<f64> = (0..n).map(|k| q(k as f64 * h)).collect();
    let mut best = vals.iter().cloned().fold(f64::MAX, f64::min);
    let mut order: Vec<usize> = (0..n)
        .filter(|&k| vals[k] <= vals[(k + n - 1) % n] && vals[k] <= vals[(k + 1) % n])
        .collect();
    order.sort_by(|x, y| vals[*x].total_cmp(&vals[*y]));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for &k in order.iter().take(4) {
        let (mut lo, mut hi) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
        for _ in 0..100 {
            let c1 = hi - g * (hi - lo);
            let d1 = lo + g * (hi - lo);
            if q(c1) < q(d1) {
                hi = d1;
            } else {
                lo = c1;
            }
        }
        best = best.min(q(0.5 * (lo + hi)));
    }
    best
}

fn kth_roots(gamma: C, k: usize) -> Vec<C> {
    let r = gamma.norm().powf(1.0 / k as f64);
    (0..k)
        .map(|j| C::from_polar(r, (gamma.arg() + 2.0 * PI * j as f64) / k as f64))
        .collect()
}

/// Univalence of `c z (1 − γ/z^k)^{1/a}` by the trichotomy in `a` versus
/// `k/2`: for `k ≤ 2a` all roots of `z^k − γ` must lie in the closed
/// disk; for `k > 2a` the starlike margin must be positive.
pub fn monomial_univalent(a: f64, k: usize, gamma: C) -> bool {
    if gamma.norm() > 1.0 + 1e-14 {
        return false;
    }
    if k as f64 <= 2.0 * a {
        true
    } else {
        power_starlike_margin(a, &kth_roots(gamma, k)) > 0.0
    }
}

/// A member of the monomial family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MonomialMember {
    pub map: MapSpec,
    pub gamma: C,
    /// Zero of `φ` for the phase containing the origin.
    pub z0: Option<C>,
    /// Verdict of the univalence criterion.
    pub univalent: bool,
}

/// The domain in `QD_a(α k w^{k−1})` of conformal radius `c`.
pub fn monomial_family(a: f64, alpha: C, k: usize, c: f64, contains_zero: bool) -> Result<MonomialMember> {
    if !(a > 0.0) || k == 0 || !(c > 0.0) {
        return Err(QuadError::InvalidInput("need a > 0, k ≥ 1 and c > 0".into()));
    }
    let gamma = monomial_gamma(a, alpha, k, c);
    if !contains_zero {
        let mut num = vec![ZERO; k + 1];
        num[0] = -gamma;
        num[k] = ONE;
        let mut den = vec![ZERO; k + 1];
        den[k] = ONE;
        let map = MapSpec::power(a, Orientation::Exterior, C::new(c, 0.0), true, vec![], RationalFn::new(num, den)?)?;
        return Ok(MonomialMember { map, gamma, z0: None, univalent: monomial_univalent(a, k, gamma) });
    }
    if k > 1 {
        return Err(QuadError::NotApplicable(
            "the k-th root of the lifted map branches at the k preimages of the origin".into(),
        ));
    }
    let p = 2.0 * a - 1.0;
    if p.abs() < 1e-12 {
        return Err(QuadError::NotApplicable("a = 1/2 has no phase containing the origin".into()));
    }
    if gamma.norm() == 0.0 {
        return Err(QuadError::NotApplicable("α = 0".into()));
    }
    // Residue cancellation at the origin: z₀^{-1} |z₀|^{2a} = γ̄.
    let z0 = C::from_polar(gamma.norm().powf(1.0 / p), gamma.arg());
    if z0.norm() <= 1.0 {
        return Err(QuadError::NotApplicable(format!("zero of φ at {z0} lies inside the disk")));
    }
    let r = RationalFn::new(vec![-ONE / z0.conj(), ONE], vec![ZERO, ONE])?;
    let map = MapSpec::power(a, Orientation::Exterior, C::new(c * z0.norm(), 0.0), true, vec![z0], r)?;
    let univalent = univalence_check(&map, 1024)?.is_univalent();
    Ok(MonomialMember { map, gamma, z0: Some(z0), univalent })
}

/// Closed-form critical conformal radius of the monomial family without
/// the origin: `|γ_k| = 1` for `k < 2a`, `|γ_k| = a'/(1 − a')` with
/// `a' = a/k` for `k > 2a`, none for `k = 2a`.
pub fn monomial_c_star(a: f64, alpha: C, k: usize) -> Option<f64> {
    let kf = k as f64;
    let s = a * alpha.norm() * kf;
    if (kf - 2.0 * a).abs() < 1e-12 || s == 0.0 {
        return None;
    }
    if kf < 2.0 * a {
        Some(s.powf(1.0 / (2.0 * a - kf)))
    } else {
        let ap = a / kf;
        Some((ap / ((1.0 - ap) * s)).powf(1.0 / (kf - 2.0 * a)))
    }
}

/// Critical conformal radius located numerically: bisection on `|γ_k| − 1`
/// for `k < 2a`, on the starlike margin for `k > 2a`.
pub fn monomial_critical_radius(a: f64, alpha: C, k: usize) -> Option<f64> {
    let kf = k as f64;
    if (kf - 2.0 * a).abs() < 1e-12 || alpha.norm() == 0.0 {
        return None;
    }
    let f = |c: f64| -> f64 {
        let g = monomial_gamma(a, alpha, k, c);
        if kf < 2.0 * a {
            1.0 - g.norm()
        } else if g.norm() >= 1.0 {
            -1.0
        } else {
            power_starlike_margin(a, &kth_roots(g, k))
        }
    };
    // Univalent for large c when k < 2a, for small c when k > 2a.
    let good_large = kf < 2.0 * a;
    let (mut lo, mut hi) = (1e-6, 1.0);
    while (f(hi) > 0.0) != good_large && hi < 1e12 {
        hi *= 2.0;
    }
    while (f(lo) > 0.0) == good_large && lo > 1e-300 {
        lo /= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == good_large {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// A candidate of the polynomial family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PolyMember {
    pub map: MapSpec,
    /// Coefficients `c_m` of `R = 1 + Σ c̄_m z^{−m}`.
    pub coeffs: Vec<C>,
    pub roundtrip: f64,
    pub analytic: bool,
    pub univalent: bool,
    /// `min |φ|` on the boundary relative to the conformal radius.
    pub min_boundary_modulus: f64,
    pub touches_origin: bool,
}

fn poly_member(a: f64, c: f64, coeffs: Vec<C>, target: &PoleExpansion) -> Result<PolyMember> {
    let k = coeffs.len();
    let mut num = vec![ZERO; k + 1];
    num[k] = ONE;
    for (m, cm) in coeffs.iter().enumerate() {
        num[k - m - 1] = cm.conj();
    }
    let mut den = vec![ZERO; k + 1];
    den[k] = ONE;
    let map = MapSpec::power(a, Orientation::Exterior, C::new(c, 0.0), true, vec![], RationalFn::new(num, den)?)?;
    let scale = 1.0 + target.distance(&PoleExpansion::zero());
    let roundtrip = power_parts(&map)
        .map(|p| clean_h(&p.h).distance(target) / scale)
        .unwrap_or(f64::INFINITY);
    let analytic = map.check_analytic().is_ok();
    let univalent = analytic && univalence_check(&map, 1024).is_ok_and(|r| r.is_univalent());
    let n = 2048;
    let min_mod = (0..n)
        .map(|j| map.eval(C::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).norm())
        .fold(f64::MAX, f64::min)
        / c;
    Ok(PolyMember { map, coeffs, roundtrip, analytic, univalent, min_boundary_modulus: min_mod, touches_origin: min_mod < 1e-6 })
}

/// Every candidate of the closed-form polynomial family, unfiltered:
/// `h = α₀ + α₁ w` (any `a`) or `h = α₀ + α₁ w + w²` (`a = 2`).
pub fn polynomial_family_candidates(a: f64, h: &[C], c: f64) -> Result<Vec<PolyMember>> {
    if !(a > 0.0) || !(c > 0.0) {
        return Err(QuadError::InvalidInput("need a > 0 and c > 0".into()));
    }
    let h = poly::trim(h, 0.0);
    let target = PoleExpansion::polynomial(&h);
    let mut out = vec![];
    match h.len() {
        0 | 1 => {
            let alpha = h.first().copied().unwrap_or(ZERO);
            let g = monomial_gamma(a, alpha, 1, c);
            out.push(poly_member(a, c, vec![-g.conj()], &target)?);
        }
        2 => {
            let (a0, a1) = (h[0], h[1]);
            let c2 = a1 * a / c.powf(2.0 * a - 2.0);
            let big_a = c.powf(2.0 * a - 1.0) / a;
            let big_b = a1 * c * (a - 2.0) / a;
            let det = big_a * big_a - big_b.norm_sqr();
            if det.abs() < 1e-14 * big_a * big_a {
                return Err(QuadError::NotApplicable("degenerate linear system for c1".into()));
            }
            let first = (a0 * big_a - big_b * a0.conj()) / det;
            let swapped = (a0.conj() * big_a - big_b * a0) / det;
            out.push(poly_member(a, c, vec![first, c2], &target)?);
            if (first - swapped).norm() > 1e-12 * (1.0 + first.norm()) {
                out.push(poly_member(a, c, vec![swapped, c2], &target)?);
            }
        }
        3 => {
            if (a - 2.0).abs() > 1e-12 || (h[2] - ONE).norm() > 1e-12 {
                return Err(QuadError::NotApplicable(
                    "the quartic covers a = 2 with a monic quadratic h".into(),
                ));
            }
            let (a0, a1) = (h[0], h[1]);
            let s = a1 + a0.conj();
            let sb = a1.conj() + a0;
            let e = c * c - 1.0;
            let quartic = vec![
                s * s * 64.0 - sb * 128.0 * e * e,
                C::new(64.0 * c * e * e * e, 0.0),
                -s * 16.0 * c * c,
                ZERO,
                C::new(c.powi(4), 0.0),
            ];
            for c1 in poly::roots(&quartic) {
                let c2 = a1 * 2.0 / (c * c) + c1.conj() / c;
                out.push(poly_member(a, c, vec![c1, c2, C::new(2.0 / c, 0.0)], &target)?);
            }
        }
        _ => return Err(QuadError::NotApplicable("degree above 2: use inverse_problem_power".into())),
    }
    Ok(out)
}

/// Candidates passing the round trip (relative residual below `1e-7`)
/// and then the univalence check.
pub fn polynomial_family(a: f64, h: &[C], c: f64) -> Result<Vec<PolyMember>> {
    let out: Vec<PolyMember> = polynomial_family_candidates(a, h, c)?
        .into_iter()
        .filter(|m| m.roundtrip < 1e-7)
        .filter(|m| m.univalent)
        .collect();
    if out.is_empty() {
        Err(QuadError::EmptyAfterFilter)
    } else {
        Ok(out)
    }
}

/// Which closed form produced a one-point domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OnePointCase {
    /// Bounded, `0 ∉ Ω`: `φ = w₀ (1 + ρ z)^{1/a}`.
    RootOfDisk,
    /// Bounded, `w₀ = 0`: a centred disk.
    CentredDisk,
    /// Bounded, `0 ∈ Ω`, `w₀ ≠ 0`: `δ z (1 − z z̄₀)^{−1/a}` up to a disk automorphism.
    Starlike,
    /// Bounded, non-integer weight or complex `α`: numerical solution.
    Numerical,
    /// Unbounded, `0 ∉ Ω`.
    Unbounded,
    /// Unbounded, `0 ∈ Ω`.
    UnboundedWithZero,
}

/// A one-point power-weighted domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OnePointPower {
    pub map: MapSpec,
    pub case: OnePointCase,
    /// Largest coefficient error of the direct problem against `α/(w − w₀)`.
    pub relation_residual: f64,
    /// Preimage of `w₀` in the unbounded families.
    pub z0: Option<C>,
    /// Zero of `φ` in the unbounded family containing the origin.
    pub z1: Option<C>,
    /// `|1 − (|z₀|² − 1)(β^a − 1)| > |z₀|` for the unbounded family without the origin.
    pub side_condition: Option<bool>,
    /// Residual of the closed-form constant relation (unbounded families).
    pub alpha_relation_residual: Option<f64>,
}

fn one_point_target(alpha: C, w0: C) -> PoleExpansion {
    PoleExpansion::single(w0, vec![alpha])
}

fn relation_residual(m: &MapSpec, target: &PoleExpansion) -> f64 {
    power_parts(m).map_or(f64::INFINITY, |p| clean_h(&p.h).distance(target))
}

/// `α(z₀)` for the unbounded family without the origin.
pub fn unbounded_alpha_no_zero(a: f64, c: f64, w0: C, z0: C) -> C {
    let beta = w0 / (c * z0);
    let ba = beta.powf(a);
    let r2 = z0.norm_sqr();
    (ONE - ba.conj()) * (r2 * (ONE + ba * (a - 1.0)) - ba * a) * (c.powf(2.0 * a) / (a * a))
}

/// `α(z₀, z₁)` for the unbounded family containing the origin: the residue
/// at `w₀` of `(1/a) Ĝ(ψ(w))/w` with `Ĝ = c^{2a} |z₁|^{2a} R R^#` and
/// `R = (z − 1/z̄₁)/(z − 1/z̄₀)`.
pub fn unbounded_alpha_with_zero(a: f64, c: f64, z0: C, z1: C) -> C {
    let (p1, p0) = (ONE / z1.conj(), ONE / z0.conj());
    let r = (z0 - p1) / (z0 - p0);
    // φ'(z₀)/φ(z₀)
    let dlog = ONE / z0 + ONE / (z0 - z1) + z1.conj() / (ONE - z1.conj() * z0) + (ONE / (z0 - p1) - ONE / (z0 - p0)) / a;
    let res_sharp = z0 / z1 * (z0 - z1);
    r * res_sharp * dlog * (c.powf(2.0 * a) * z1.norm().powf(2.0 * a) / a)
}

fn unbounded_map_no_zero(a: f64, c: f64, w0: C, z0: C) -> Result<MapSpec> {
    let beta = w0 / (c * z0);
    let k = (beta.powf(a) - ONE) * (z0.norm_sqr() - 1.0);
    // R = 1 + k/(z̄₀ z − 1)
    let r = RationalFn::new(vec![k - ONE, z0.conj()], vec![-ONE, z0.conj()])?;
    MapSpec::power(a, Orientation::Exterior, C::new(c, 0.0), true, vec![], r)
}

/// One-point power-weighted domains `Ω ∈ QD_a(α/(w − w₀))`.
/// `c = None` selects the bounded class.
pub fn one_point_power(a: f64, alpha: C, w0: C, c: Option<f64>, contains_zero: bool) -> Result<OnePointPower> {
    if !(a > 0.0) {
        return Err(QuadError::InvalidInput(format!("power weight a = {a} must be positive")));
    }
    let target = one_point_target(alpha, w0);
    match c {
        None => one_point_bounded(a, alpha, w0, contains_zero, &target),
        Some(c) if c > 0.0 => {
            if w0.norm() == 0.0 {
                return Err(QuadError::InvalidInput("an unbounded one-point domain needs w0 ≠ 0".into()));
            }
            if contains_zero {
                one_point_unbounded_zero(a, alpha, w0, c, &target)
            } else {
                one_point_unbounded(a, alpha, w0, c, &target)
            }
        }
        Some(_) => Err(QuadError::InvalidInput("conformal radius must be positive".into())),
    }
}

fn one_point_bounded(a: f64, alpha: C, w0: C, contains_zero: bool, target: &PoleExpansion) -> Result<OnePointPower> {
    let integer = (a - a.round()).abs() < 1e-12 && a >= 1.0;
    let real_pos = alpha.im.abs() <= 1e-14 * alpha.norm() && alpha.re > 0.0;
    let done = |map: MapSpec, case| {
        let relation_residual = relation_residual(&map, target);
        OnePointPower { map, case, relation_residual, z0: None, z1: None, side_condition: None, alpha_relation_residual: None }
    };
    if !(integer && real_pos) {
        let h = target.to_rational();
        let p = PqdProblem::new(a, h, true, contains_zero)?;
        let sol = inverse_problem_power(&p, Normalization::W0(w0))?;
        return Ok(done(sol.map, OnePointCase::Numerical));
    }
    let al = alpha.re;
    let m0 = w0.norm();
    if m0 == 0.0 {
        if !contains_zero {
            return Err(QuadError::NoRoot("w0 = 0 forces 0 into the domain".into()));
        }
        let rad = (a * al).powf(1.0 / (2.0 * a));
        let map = MapSpec::power(a, Orientation::Interior, C::new(rad, 0.0), false, vec![ZERO], RationalFn::constant(ONE))?;
        return Ok(done(map, OnePointCase::CentredDisk));
    }
    if m0.powf(2.0 * a) >= a * a * al {
        if contains_zero {
            return Err(QuadError::NoRoot("|w0|^{2a} ≥ a²α: the domain does not contain 0".into()));
        }
        let rho = C::new(a * al.sqrt() / m0.powf(a - 1.0), 0.0) / w0;
        let map = MapSpec::power(a, Orientation::Interior, w0, false, vec![], RationalFn::polynomial(&[ONE, rho]))?;
        return Ok(done(map, OnePointCase::RootOfDisk));
    }
    if !contains_zero {
        return Err(QuadError::NoRoot("|w0|^{2a} < a²α: the domain contains 0".into()));
    }
    // α = (|w₀|^{2a}/a) (1 − s(1 − 1/a)) / s^a with s = |z₀|² ∈ (0, 1).
    let f = |s: f64| (1.0 - s * (1.0 - 1.0 / a)) / s.powf(a) - a * al / m0.powf(2.0 * a);
    let (mut lo, mut hi) = (1e-300_f64.max(f64::MIN_POSITIVE), 1.0);
    if f(hi) > 0.0 {
        return Err(QuadError::NoRoot("no |z0| in (0, 1) reproduces α".into()));
    }
    for _ in 0..2000 {
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    let s = 0.5 * (lo + hi);
    let r = s.sqrt();
    let delta = m0 * (1.0 - s).powf(1.0 / a) / r;
    let lam = C::from_polar(r, w0.arg());
    let pre = C::from_polar(delta * (1.0 - s).powf(-1.0 / a), w0.arg());
    let map = MapSpec::power(a, Orientation::Interior, pre, false, vec![-lam], RationalFn::polynomial(&[ONE, lam.conj()]))?;
    Ok(done(map, OnePointCase::Starlike))
}

fn one_point_unbounded(a: f64, alpha: C, w0: C, c: f64, target: &PoleExpansion) -> Result<OnePointPower> {
    let scale = 1.0 + alpha.norm();
    let f = |x: &[f64]| -> Option<Vec<f64>> {
        let z0 = C::new(x[0], x[1]);
        if z0.norm() <= 1.0 + 1e-9 {
            return None;
        }
        let d = unbounded_alpha_no_zero(a, c, w0, z0) - alpha;
        d.is_finite().then(|| vec![d.re, d.im])
    };
    let mut roots: Vec<C> = vec![];
    for &r in &[1.02, 1.1, 1.3, 1.6, 2.0, 3.0, 5.0, 8.0, 15.0] {
        for j in 0..16 {
            let z = C::from_polar(r, 2.0 * PI * j as f64 / 16.0 + 0.1);
            let Ok(sol) = levenberg_marquardt(f, &[z.re, z.im], scale, LmOptions::default()) else {
                continue;
            };
            let z0 = C::new(sol.x[0], sol.x[1]);
            if sol.residual <= 1e-11 * scale && !roots.iter().any(|q| (q - z0).norm() < 1e-7 * (1.0 + z0.norm())) {
                roots.push(z0);
            }
        }
    }
    if roots.is_empty() {
        return Err(QuadError::NoRoot("the constant relation has no solution with |z0| > 1".into()));
    }
    let mut best: Option<(OnePointPower, bool)> = None;
    for z0 in roots {
        let Ok(map) = unbounded_map_no_zero(a, c, w0, z0) else { continue };
        let rel = relation_residual(&map, target);
        if rel > 1e-8 * scale {
            continue;
        }
        let beta = w0 / (c * z0);
        let side = (ONE - (beta.powf(a) - ONE) * (z0.norm_sqr() - 1.0)).norm() > z0.norm();
        let univalent = univalence_check(&map, 1024).is_ok_and(|r| r.is_univalent());
        let cand = OnePointPower {
            map,
            case: OnePointCase::Unbounded,
            relation_residual: rel,
            z0: Some(z0),
            z1: None,
            side_condition: Some(side),
            alpha_relation_residual: Some((unbounded_alpha_no_zero(a, c, w0, z0) - alpha).norm()),
        };
        let good = side && univalent;
        if best.as_ref().is_none_or(|(_, g)| good && !g) {
            best = Some((cand, good));
        }
    }
    best.map(|(b, _)| b)
        .ok_or_else(|| QuadError::BranchViolation("no root of the constant relation reproduces h".into()))
}

fn one_point_unbounded_zero(a: f64, alpha: C, w0: C, c: f64, target: &PoleExpansion) -> Result<OnePointPower> {
    let p = PqdProblem::new(a, target.to_rational(), false, true)?;
    let sol = inverse_problem_power(&p, Normalization::C(c))?;
    let map = sol.map;
    let z1 = map.blaschke[0];
    let z0 = map.eval_inverse(w0, None)?;
    let rel = relation_residual(&map, target);
    Ok(OnePointPower {
        case: OnePointCase::UnboundedWithZero,
        relation_residual: rel,
        z0: Some(z0),
        z1: Some(z1),
        side_condition: None,
        alpha_relation_residual: Some((unbounded_alpha_with_zero(a, c, z0, z1) - alpha).norm()),
        map,
    })
}

/// `(lowest index, coefficients at multiples of k above it)`, or `None`
/// when some other coefficient is non-zero.
fn subsample(p: &[C], k: usize) -> Option<(usize, Vec<C>)> {
    let scale = poly_scale(p);
    let low = p.iter().position(|c| c.norm() > 1e-14 * scale)?;
    let mut out = vec![];
    for (i, c) in p.iter().enumerate().skip(low) {
        if (i - low) % k == 0 {
            out.push(*c);
        } else if c.norm() > 1e-12 * scale {
            return None;
        }
    }
    Some((low, out))
}

/// `q(u)` with `f(w) = q(w^k)` for a `Z_k`-invariant rational `f`.
fn invariant_quotient(f: &RationalFn, k: usize) -> Option<RationalFn> {
    let (ln, num) = subsample(&f.num, k)?;
    let (ld, den) = subsample(&f.den, k)?;
    if (ln as i64 - ld as i64).rem_euclid(k as i64) != 0 {
        return None;
    }
    let shift = (ln as i64 - ld as i64) / k as i64;
    let mut num = num;
    let mut den = den;
    if shift > 0 {
        let mut v = vec![ZERO; shift as usize];
        v.extend(num);
        num = v;
    } else if shift < 0 {
        let mut v = vec![ZERO; (-shift) as usize];
        v.extend(den);
        den = v;
    }
    RationalFn::new(num, den).ok()
}

fn upsample(p: &[C], k: usize) -> Vec<C> {
    let mut out = vec![ZERO; (p.len().max(1) - 1) * k + 1];
    for (i, c) in p.iter().enumerate() {
        out[i * k] = *c;
    }
    out
}

/// `QD_a(h)` with `Z_k`-covariant `h` ↦ `QD_{a/k}(h̃)` for `Ω ↦ Ω^k`,
/// `h̃(u) = (k/u) q(u)` where `w h(w) = q(w^k)`.
pub fn zk_reduce_h(a: f64, h: &RationalFn, k: usize) -> Result<(f64, RationalFn)> {
    if k == 0 {
        return Err(QuadError::InvalidInput("k must be positive".into()));
    }
    let wh = RationalFn::polynomial(&[ZERO, ONE]).mul(h);
    let q = invariant_quotient(&wh, k).ok_or(QuadError::NotSymmetric(k))?;
    let red = q.mul(&RationalFn::new(vec![C::new(k as f64, 0.0)], vec![ZERO, ONE])?);
    Ok((a / k as f64, red))
}

fn check_symmetry(m: &MapSpec, k: usize) -> Result<()> {
    let eps = C::from_polar(1.0, 2.0 * PI / k as f64);
    let mut scale: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for j in 0..64 {
        let z = C::from_polar(1.0, 2.0 * PI * j as f64 / 64.0 + 0.05);
        let w = m.eval(z);
        scale = scale.max(w.norm());
        worst = worst.max((m.eval(eps * z) - eps * w).norm());
    }
    if worst > 1e-9 * scale.max(1.0) {
        return Err(QuadError::NotSymmetric(k));
    }
    Ok(())
}

fn power_parts_of(m: &MapSpec) -> Result<(f64, bool)> {
    let a = match m.kind {
        MapKind::Power { a } => a,
        _ => return Err(QuadError::InvalidInput("expected a power map".into())),
    };
    let origin_factor = if m.is_interior() {
        m.blaschke.len() == 1 && m.blaschke[0] == ZERO
    } else {
        m.z_factor && m.blaschke.is_empty()
    };
    Ok((a, origin_factor))
}

/// `φ ↦ φ₁` with `φ₁(z^k) = φ(z)^k`, for `Z_k`-symmetric `φ = P z R^{1/a}`.
pub fn zk_reduce_map(m: &MapSpec, k: usize) -> Result<MapSpec> {
    let (a, origin_factor) = power_parts_of(m)?;
    if k == 1 {
        return Ok(m.clone());
    }
    check_symmetry(m, k)?;
    if !origin_factor {
        return Err(QuadError::NotSymmetric(k));
    }
    let r1 = invariant_quotient(&m.r, k).ok_or(QuadError::NotSymmetric(k))?;
    MapSpec::new(
        MapKind::Power { a: a / k as f64 },
        m.orientation,
        m.prefactor.powu(k as u32),
        m.z_factor,
        m.blaschke.clone(),
        r1,
    )
}

/// The `k`-th root lift `φ(z) = φ₁(z^k)^{1/k}` of `φ₁ = P z R₁^{1/a₁}`.
pub fn zk_lift_map(m: &MapSpec, k: usize) -> Result<MapSpec> {
    let (a, origin_factor) = power_parts_of(m)?;
    if !origin_factor {
        return Err(QuadError::NotApplicable("the lift needs φ₁ = P z R^{1/a}".into()));
    }
    let r = RationalFn::new(upsample(&m.r.num, k), upsample(&m.r.den, k))?;
    MapSpec::new(
        MapKind::Power { a: a * k as f64 },
        m.orientation,
        m.prefactor.powf(1.0 / k as f64),
        m.z_factor,
        m.blaschke.clone(),
        r,
    )
}
