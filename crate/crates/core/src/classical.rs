//! Classical quadrature domains: the direct problem `φ ↦ h`, the inverse
//! problem `h ↦ φ`, Schwarz functions, affine changes of variables and the
//! one-point family `h = α/(w − w₀)`.

use crate::conformal::univalence_check;
use crate::error::{QuadError, Result};
use crate::faber::{faber_polys, push_term, transform_pe, LocalMap, PeMap, Which};
use crate::maps::{MapKind, MapSpec, Orientation};
use crate::numcheck::{weighted_area, AreaSide};
use crate::poly;
use crate::ratfun::{PoleExpansion, RationalFn, Side};
use crate::solver::{homotopy_solve, InverseSolution, LmOptions, Normalization};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// A quadrature problem: weight parameter, quadrature function, class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QuadSpec {
    pub a: f64,
    pub h: RationalFn,
    pub bounded: bool,
}

impl QuadSpec {
    pub fn classical(h: RationalFn, bounded: bool) -> Self {
        QuadSpec { a: 1.0, h, bounded }
    }
}

/// `h` for a rational map held as a pole expansion:
/// `Φ(φ^# − conj φ(0))` (bounded) or `Φ([φ^#]_D)` (unbounded).
pub fn classical_h(map: &PeMap) -> Result<PoleExpansion> {
    let s = map.pe.reflect();
    let f = if map.exterior {
        s.project(Side::Interior)?
    } else {
        s.project(Side::Exterior)?
    };
    Ok(transform_pe(map, &f)?.cleaned(1e-14))
}

/// The quadrature function of the domain `φ(D)` or `φ(D^c)`.
pub fn direct_problem(m: &MapSpec) -> Result<QuadSpec> {
    let h = direct_expansion(m)?;
    Ok(QuadSpec::classical(h.to_rational(), m.is_interior()))
}

/// As [`direct_problem`], returning the pole expansion of `h`.
pub fn direct_expansion(m: &MapSpec) -> Result<PoleExpansion> {
    let phi = m.as_rational().ok_or(QuadError::NotRational)?;
    let pe = phi.partial_fractions()?;
    classical_h(&PeMap {
        pe,
        exterior: !m.is_interior(),
    })
}

/// Layout of the unknowns of the classical inverse problem. The map is
/// parametrized through its reflection `g = φ^#`:
/// bounded `g = conj w₀ + Σ_k Σ_j β_kj/(z − z_k)^j`,
/// unbounded `g = c/z + Σ_m e_m z^m + Σ_k Σ_j β_kj/(z − z_k)^j`.
struct Ansatz {
    exterior: bool,
    w0: C,
    c: f64,
    n_poly: usize,
    /// Pole order and whether the preimage is pinned at `z = 0`.
    slots: Vec<(usize, bool)>,
}

struct Unpacked {
    e: Vec<C>,
    zs: Vec<C>,
    betas: Vec<Vec<C>>,
}

impl Ansatz {
    fn unpack(&self, x: &[f64]) -> Unpacked {
        let mut i = 0;
        let mut take = || {
            let v = C::new(x[i], x[i + 1]);
            i += 2;
            v
        };
        let e: Vec<C> = (0..self.n_poly).map(|_| take()).collect();
        let mut zs = vec![];
        let mut betas = vec![];
        for (order, fixed) in &self.slots {
            zs.push(if *fixed { ZERO } else { take() });
            betas.push((0..*order).map(|_| take()).collect());
        }
        Unpacked { e, zs, betas }
    }

    fn pack(&self, u: &Unpacked) -> Vec<f64> {
        let mut x = vec![];
        let mut put = |v: C| {
            x.push(v.re);
            x.push(v.im);
        };
        for v in &u.e {
            put(*v);
        }
        for (k, (_, fixed)) in self.slots.iter().enumerate() {
            if !fixed {
                put(u.zs[k]);
            }
            for b in &u.betas[k] {
                put(*b);
            }
        }
        x
    }

    fn g(&self, u: &Unpacked) -> PoleExpansion {
        let mut g = if self.exterior {
            PoleExpansion::polynomial(&u.e).add(&PoleExpansion::single(ZERO, vec![C::new(self.c, 0.0)]))
        } else {
            PoleExpansion::constant(self.w0.conj())
        };
        for (z, b) in u.zs.iter().zip(&u.betas) {
            g = g.add(&PoleExpansion::single(*z, b.clone()));
        }
        g
    }

    fn map(&self, u: &Unpacked) -> PeMap {
        PeMap {
            pe: self.g(u).reflect(),
            exterior: self.exterior,
        }
    }

    fn admissible(&self, u: &Unpacked) -> bool {
        for (k, z) in u.zs.iter().enumerate() {
            if !z.is_finite() {
                return false;
            }
            if self.exterior && z.norm() <= 1.0 + 1e-9 {
                return false;
            }
            if !self.exterior && !self.slots[k].1 && z.norm() >= 1.0 - 1e-9 {
                return false;
            }
            for w in &u.zs[..k] {
                if (z - w).norm() < 1e-8 {
                    return false;
                }
            }
        }
        true
    }

    fn features(&self, x: &[f64]) -> Option<Vec<f64>> {
        let u = self.unpack(x);
        if !self.admissible(&u) {
            return None;
        }
        let map = self.map(&u);
        let mut out = vec![];
        let mut put = |v: C| {
            out.push(v.re);
            out.push(v.im);
        };
        if self.exterior {
            let table = faber_polys(&map, self.n_poly.saturating_sub(1), Which::Forward).ok()?;
            let mut hp = vec![ZERO; self.n_poly];
            for (m, em) in u.e.iter().enumerate() {
                for (k, c) in table[m].iter().enumerate() {
                    if k < hp.len() {
                        hp[k] += em * c;
                    }
                }
            }
            for v in hp {
                put(v);
            }
        }
        for (k, (order, fixed)) in self.slots.iter().enumerate() {
            let jet = map.jet(u.zs[k], order + 1);
            if !fixed {
                put(jet.coeff(0));
            }
            let mut pushed = push_term(&u.betas[k], &jet);
            pushed.resize(*order, ZERO);
            for v in pushed {
                put(v);
            }
        }
        if !self.exterior {
            out.push(map.jet(ZERO, 2).coeff(1).im);
        }
        if out.iter().all(|v| v.is_finite()) {
            Some(out)
        } else {
            None
        }
    }
}

fn target_features(h: &PoleExpansion, ans: &Ansatz) -> Vec<f64> {
    let mut out = vec![];
    let mut put = |v: C| {
        out.push(v.re);
        out.push(v.im);
    };
    if ans.exterior {
        for k in 0..ans.n_poly {
            put(h.poly.get(k).copied().unwrap_or(ZERO));
        }
    }
    for (t, (order, fixed)) in h.terms.iter().zip(&ans.slots) {
        if !fixed {
            put(t.pole);
        }
        for k in 0..*order {
            put(t.coeffs.get(k).copied().unwrap_or(ZERO));
        }
    }
    if !ans.exterior {
        out.push(0.0);
    }
    out
}

/// Solve `φ = φ(0) + Φ^{-1}(h)^#` (bounded) or `φ = cz + Φ^{-1}(h)^#`
/// (unbounded) for a rational Riemann map.
pub fn inverse_problem(q: &QuadSpec, norm: Normalization) -> Result<InverseSolution> {
    let h = q.h.partial_fractions()?.cleaned(1e-15);
    inverse_expansion(&h, q.bounded, norm)
}

/// As [`inverse_problem`] with `h` already decomposed.
pub fn inverse_expansion(h: &PoleExpansion, bounded: bool, norm: Normalization) -> Result<InverseSolution> {
    let hpoly = poly::trim(&h.poly, 0.0);
    let (ans, x0) = if bounded {
        let w0 = match norm {
            Normalization::W0(w) => w,
            Normalization::C(_) => {
                return Err(QuadError::InvalidInput("bounded problems are normalized by w0".into()))
            }
        };
        if !poly::is_zero(&hpoly) {
            return Err(QuadError::InvalidInput(
                "a bounded quadrature function must vanish at infinity".into(),
            ));
        }
        if h.terms.is_empty() {
            return Err(QuadError::InvalidInput("h = 0 has no bounded quadrature domain".into()));
        }
        let slots: Vec<(usize, bool)> = h
            .terms
            .iter()
            .map(|t| (t.coeffs.len(), (t.pole - w0).norm() <= 1e-12 * (1.0 + w0.norm())))
            .collect();
        let ans = Ansatz { exterior: false, w0, c: 0.0, n_poly: 0, slots };
        // Seed: a disk about each node, passing through w₀.
        let mut zs = vec![];
        let mut betas = vec![];
        for (t, (order, fixed)) in h.terms.iter().zip(&ans.slots) {
            let r = t.coeffs[0].norm().sqrt().max(1e-3);
            let mut b = vec![ZERO; *order];
            if *fixed {
                zs.push(ZERO);
                b[0] = C::new(r, 0.0);
            } else {
                let r = r.max(1.5 * (t.pole - w0).norm());
                let u = (w0 - t.pole) / r;
                zs.push(-u);
                b[0] = C::new(r * (1.0 - u.norm_sqr()), 0.0);
            }
            betas.push(b);
        }
        let x0 = ans.pack(&Unpacked { e: vec![], zs, betas });
        (ans, x0)
    } else {
        let c = match norm {
            Normalization::C(c) if c > 0.0 => c,
            _ => return Err(QuadError::InvalidInput("unbounded problems need a conformal radius c > 0".into())),
        };
        let n_poly = hpoly.len().max(1);
        let slots: Vec<(usize, bool)> = h.terms.iter().map(|t| (t.coeffs.len(), false)).collect();
        let ans = Ansatz { exterior: true, w0: ZERO, c, n_poly, slots };
        let e: Vec<C> = (0..n_poly)
            .map(|m| hpoly.get(m).copied().unwrap_or(ZERO) * c.powi(m as i32))
            .collect();
        let shift = e[0].conj();
        let mut zs = vec![];
        let mut betas = vec![];
        for t in &h.terms {
            let mut z = (t.pole - shift) / c;
            if z.norm() < 1.5 {
                z = if z.norm() > 1e-12 { z / z.norm() * 1.5 } else { C::new(1.5, 0.0) };
            }
            zs.push(z);
            betas.push(vec![ZERO; t.coeffs.len()]);
        }
        let x0 = ans.pack(&Unpacked { e, zs, betas });
        (ans, x0)
    };
    let target = target_features(h, &ans);
    let sol = homotopy_solve(|x| ans.features(x), &x0, &target, 1e-11, LmOptions::default())?;
    let u = ans.unpack(&sol.x);
    let pe = ans.map(&u).pe.cleaned(1e-15);
    let orientation = if bounded { Orientation::Interior } else { Orientation::Exterior };
    let map = MapSpec::rational(pe.to_rational(), orientation)?;
    finish(map, h, sol.residual)
}

fn finish(map: MapSpec, h: &PoleExpansion, residual: f64) -> Result<InverseSolution> {
    let back = direct_expansion(&map)?;
    let scale = 1.0 + h.distance(&PoleExpansion::zero());
    let roundtrip = back.distance(h) / scale;
    let univalence = univalence_check(&map, 1024)?;
    let warning = if univalence.is_univalent() {
        None
    } else {
        Some(QuadError::NonUnivalentSolution(format!("{:?}", univalence.verdict)).to_string())
    };
    Ok(InverseSolution { map, residual, roundtrip, univalence, warning, cross_check: None })
}

/// `S = φ^# ∘ ψ`, the Schwarz function of `φ(D)` or `φ(D^c)`.
#[derive(Debug, Clone)]
pub struct SchwarzFunction {
    pub map: MapSpec,
}

impl SchwarzFunction {
    pub fn eval(&self, w: C) -> Result<C> {
        let z = self.map.eval_inverse(w, None)?;
        Ok(self.map.reflect_eval(z))
    }

    /// `max |S(w) − w̄|` over `n` boundary samples.
    pub fn boundary_residual(&self, n: usize) -> Result<f64> {
        let curve = self.map.boundary_curve(n)?;
        let mut worst: f64 = 0.0;
        for s in &curve.samples {
            let z = C::from_polar(1.0, s.theta);
            worst = worst.max((self.map.reflect_eval(z) - s.w.conj()).norm());
        }
        Ok(worst)
    }
}

pub fn schwarz_function(m: &MapSpec) -> SchwarzFunction {
    SchwarzFunction { map: m.clone() }
}

/// `p(s w + t)` for a polynomial `p`.
fn compose_linear(p: &[C], s: C, t: C) -> Vec<C> {
    let shifted = poly::taylor_shift(p, t);
    let mut sk = ONE;
    shifted
        .iter()
        .map(|c| {
            let v = c * sk;
            sk *= s;
            v
        })
        .collect()
}

/// The quadrature function of `aΩ + b`.
pub fn change_of_variables(q: &QuadSpec, a: C, b: C) -> Result<QuadSpec> {
    if a.norm() == 0.0 {
        return Err(QuadError::InvalidInput("scale factor must be non-zero".into()));
    }
    let s = ONE / a;
    let t = -b / a;
    let num = compose_linear(&q.h.num, s, t);
    let den = compose_linear(&q.h.den, s, t);
    let mut h = RationalFn::new(num, den)?.scale(a.conj());
    if !q.bounded {
        h = h.add(&RationalFn::constant(b.conj()));
    }
    Ok(QuadSpec { a: q.a, h, bounded: q.bounded })
}

/// Sign class of the one-point constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Regime {
    PositiveAlpha,
    NegativeAlpha,
    ComplexAlpha,
    ZeroAlpha,
}

/// Existence data for unbounded domains with `h = α/(w − w₀)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExistenceReport {
    pub exists: bool,
    /// `|w₀|² + 2 Re α − 2|α|`.
    pub boundary_margin: f64,
    pub t_star: Option<f64>,
    pub c_star: Option<f64>,
    pub regime: Regime,
}

fn is_real(alpha: C) -> bool {
    alpha.im.abs() <= 1e-14 * (1.0 + alpha.re.abs())
}

/// Existence flag, boundary margin and regime, without critical parameters.
fn existence(alpha: C, w0: C) -> (bool, f64, Regime) {
    let margin = w0.norm_sqr() + 2.0 * alpha.re - 2.0 * alpha.norm();
    let regime = if alpha.norm() == 0.0 {
        Regime::ZeroAlpha
    } else if is_real(alpha) && alpha.re > 0.0 {
        Regime::PositiveAlpha
    } else if is_real(alpha) {
        Regime::NegativeAlpha
    } else {
        Regime::ComplexAlpha
    };
    let exists = match regime {
        Regime::ZeroAlpha | Regime::PositiveAlpha => true,
        _ => w0.norm() > 0.0 && margin > 0.0,
    };
    (exists, margin, regime)
}

/// Existence criterion and critical parameters of the one-point family.
pub fn classify_one_point(alpha: C, w0: C) -> ExistenceReport {
    let (exists, margin, regime) = existence(alpha, w0);
    let x0 = w0.norm();
    let mut rep = ExistenceReport { exists, boundary_margin: margin, t_star: None, c_star: None, regime };
    match regime {
        Regime::ZeroAlpha => {}
        Regime::PositiveAlpha => {
            if x0 > 0.0 {
                let s = alpha.re.sqrt();
                rep.t_star = Some(x0 * (x0 + 2.0 * s));
                rep.c_star = Some(x0 + s);
            }
        }
        Regime::NegativeAlpha | Regime::ComplexAlpha => {
            if rep.exists {
                if let Ok(crit) = one_point_critical(alpha, w0) {
                    rep.c_star = Some(crit.c);
                    rep.t_star = crit.t;
                }
                if regime == Regime::NegativeAlpha {
                    rep.c_star = c_star_closed_form(alpha.re, x0).or(rep.c_star);
                }
            }
        }
    }
    rep
}

/// `c_*` for `α < 0` by the trigonometric middle-root expression.
pub fn c_star_closed_form(alpha: f64, w0: f64) -> Option<f64> {
    if !(alpha < 0.0) || w0 <= 0.0 || w0 * w0 + 4.0 * alpha <= 0.0 {
        return None;
    }
    let beta = alpha * (8.0 / (3.0 * w0)).powi(2);
    let s = (1.0 - beta).sqrt();
    let arg = (3.0 / 32.0 * beta * beta - 3.0 * beta - 1.0) / (1.0 - beta).powf(1.5);
    if arg.abs() > 1.0 {
        return None;
    }
    Some(w0 / 8.0 * (5.0 - 6.0 * s * (arg.asin() / 3.0).sin()))
}

/// Real roots (sorted) of `8c³ − 15w₀c² + 6(w₀² + 4α)c + (w₀² − α)(w₀² + 4α)/w₀`.
pub fn c_star_cubic_roots(alpha: f64, w0: f64) -> Vec<f64> {
    let p = [
        C::new((w0 * w0 - alpha) * (w0 * w0 + 4.0 * alpha) / w0, 0.0),
        C::new(6.0 * (w0 * w0 + 4.0 * alpha), 0.0),
        C::new(-15.0 * w0, 0.0),
        C::new(8.0, 0.0),
    ];
    real_roots(&p)
}

fn real_roots(p: &[C]) -> Vec<f64> {
    let dp = poly::derivative(p);
    let mut out: Vec<f64> = poly::roots(p)
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..4 {
                let f = poly::eval(p, C::new(x, 0.0)).re;
                let d = poly::eval(&dp, C::new(x, 0.0)).re;
                if d == 0.0 {
                    break;
                }
                let nx = x - f / d;
                if !nx.is_finite() || (nx - x).abs() > 1e-6 * (1.0 + x.abs()) {
                    break;
                }
                x = nx;
            }
            x
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Residual of the `t`–`c` relation of the real one-point family.
pub fn t_c_residual(alpha: f64, w0: f64, t: f64, c: f64) -> f64 {
    let (a, w2, c2) = (alpha, w0 * w0, c * c);
    let c4 = c2 * c2;
    t.powi(4) + (2.0 * a - c2) * t.powi(3) + (a * a - 2.0 * a * c2 + 6.0 * c2 * w2) * t * t
        + (4.0 * a * c2 * w2 - 14.0 * c4 * w2 + c2 * w2 * w2) * t
        + 8.0 * c4 * c2 * w2
        - c4 * w2 * w2
        - 4.0 * a * c4 * w2
}

/// `α|z₀|² − (c z₀|z₀|² − w₀)(c z̄₀ − w₀)` for real `w₀ > 0`.
pub fn conserved_residual(alpha: C, w0: f64, c: f64, z0: C) -> C {
    let n = z0.norm_sqr();
    alpha * n - (c * z0 * n - w0) * (c * z0.conj() - w0)
}

/// A member of the one-point family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OnePointMember {
    pub map: MapSpec,
    pub c: f64,
    /// `ψ(w₀)` in the frame rotated so that `w₀ > 0`.
    pub z0: C,
    /// Area of the complement by boundary integral.
    pub t: Option<f64>,
    /// `w₀(2cz₀ − w₀)/z₀²` for real `z₀`.
    pub t_closed: Option<f64>,
    /// `||cz₀| − |cz₀ − w₀|| |z₀| − w₀`; positive iff univalent.
    pub margin: f64,
    pub univalent: bool,
    pub conserved: f64,
}

fn one_point_pieces(c: f64, w0: f64, z0: C) -> (C, C) {
    let n = z0.norm_sqr();
    let eps = w0 / c * (n - 1.0) / n;
    (z0 - eps, ONE / z0.conj())
}

fn phi_at_one(c: f64, w0: f64, z0: C) -> C {
    let (a, q) = one_point_pieces(c, w0, z0);
    c * (ONE - a) / (ONE - q)
}

fn dphi_at_one(c: f64, w0: f64, z0: C) -> C {
    let (a, q) = one_point_pieces(c, w0, z0);
    c * ((2.0 - a) * (ONE - q) - (ONE - a)) / ((ONE - q) * (ONE - q))
}

fn quartic(alpha: f64, w0: f64, c: f64) -> [C; 5] {
    [
        C::new(w0 * w0, 0.0),
        C::new(-c * w0, 0.0),
        C::new(-alpha, 0.0),
        C::new(-c * w0, 0.0),
        C::new(c * c, 0.0),
    ]
}

/// Real `z₀ ≥ 1` with `φ(1) < w₀`, largest such root.
fn real_z0(alpha: f64, w0: f64, c: f64) -> Result<f64> {
    // z₀ = 1 is the degenerate member at c = c_*, where the pole cancels.
    let roots: Vec<f64> =
        real_roots(&quartic(alpha, w0, c)).into_iter().filter(|z| *z >= 1.0 - 1e-9).map(|z| z.max(1.0)).collect();
    if roots.is_empty() {
        return Err(QuadError::NoRoot(format!("no real z0 > 1 at c = {c}")));
    }
    roots
        .iter()
        .rev()
        .copied()
        .find(|z| *z == 1.0 || phi_at_one(c, w0, C::new(*z, 0.0)).re < w0)
        .ok_or_else(|| QuadError::BranchViolation(format!("no root with phi(1) < w0 at c = {c}")))
}

fn complex_z0(alpha: C, w0: f64, c: f64) -> Result<C> {
    let start = real_z0(alpha.norm(), w0, c)?;
    let steps = 64;
    let arg = alpha.arg();
    let mut z = C::new(start, 0.0);
    for k in 1..=steps {
        let a = C::from_polar(alpha.norm(), arg * k as f64 / steps as f64);
        let scale = 1.0 + a.norm() * z.norm_sqr() + w0 * w0;
        let f = |x: &[f64]| {
            let z = C::new(x[0], x[1]);
            if z.norm() <= 1.0 {
                return None;
            }
            let r = conserved_residual(a, w0, c, z) / scale;
            Some(vec![r.re, r.im])
        };
        let sol = crate::solver::levenberg_marquardt(f, &[z.re, z.im], 1.0, LmOptions::default())?;
        if sol.residual > 1e-11 {
            return Err(QuadError::NoRoot(format!("continuation in arg(alpha) lost the root at c = {c}")));
        }
        z = C::new(sol.x[0], sol.x[1]);
    }
    Ok(z)
}

/// The map of the one-point family at conformal radius `c`.
pub fn one_point_family(alpha: C, w0: C, c: f64) -> Result<OnePointMember> {
    let (exists, _, regime) = existence(alpha, w0);
    if !exists {
        return Err(QuadError::NotApplicable(format!(
            "no unbounded domain for alpha = {alpha}, w0 = {w0}"
        )));
    }
    if !(c > 0.0) {
        return Err(QuadError::InvalidInput("conformal radius must be positive".into()));
    }
    if regime == Regime::ZeroAlpha {
        let map = MapSpec::rational(RationalFn::polynomial(&[ZERO, C::new(c, 0.0)]), Orientation::Exterior)?;
        return Ok(OnePointMember {
            map,
            c,
            z0: ZERO,
            t: Some(c * c),
            t_closed: Some(c * c),
            margin: f64::INFINITY,
            univalent: true,
            conserved: 0.0,
        });
    }
    let x0 = w0.norm();
    let rot = w0 / x0;
    let z0 = if is_real(alpha) {
        C::new(real_z0(alpha.re, x0, c)?, 0.0)
    } else {
        complex_z0(alpha, x0, c)?
    };
    member_at(alpha, x0, rot, c, z0)
}

fn member_at(alpha: C, x0: f64, rot: C, c: f64, z0: C) -> Result<OnePointMember> {
    let (a, q) = one_point_pieces(c, x0, z0);
    let num = vec![ZERO, -c * rot * a, C::new(c, 0.0)];
    let den = vec![-rot * q, ONE];
    let map = MapSpec::new(MapKind::Rational, Orientation::Exterior, ONE, false, vec![], RationalFn::new(num, den)?)?;
    let cz = c * z0;
    let margin = ((cz.norm() - (cz - x0).norm()).abs()) * z0.norm() - x0;
    let t = weighted_area(&map, 1.0, AreaSide::Complement, 1024).ok();
    let t_closed = if z0.im == 0.0 {
        Some(x0 * (2.0 * c * z0.re - x0) / (z0.re * z0.re))
    } else {
        None
    };
    Ok(OnePointMember {
        map,
        c,
        z0,
        t,
        t_closed,
        margin,
        univalent: margin > 0.0,
        conserved: conserved_residual(alpha, x0, c, z0).norm(),
    })
}

/// The critical member of the one-point family.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub c: f64,
    pub t: Option<f64>,
    pub member: OnePointMember,
}

/// Locate the largest `c` with a univalent family member. For real
/// `α < 0` the bracket is refined by Newton on the cusp condition
/// `φ'(1) = 0` jointly with the real quartic.
pub fn one_point_critical(alpha: C, w0: C) -> Result<CriticalPoint> {
    let x0 = w0.norm();
    if x0 == 0.0 {
        return Err(QuadError::NotApplicable("w0 = 0".into()));
    }
    let rot = w0 / x0;
    if is_real(alpha) && alpha.re > 0.0 {
        let c = x0 + alpha.re.sqrt();
        let member = one_point_family(alpha, w0, c)?;
        return Ok(CriticalPoint { c, t: member.t_closed, member });
    }
    let good = |c: f64| one_point_family(alpha, w0, c).map(|m| m.univalent).unwrap_or(false);
    let mut lo = 1e-3 * x0;
    if !good(lo) {
        return Err(QuadError::NoRoot("no univalent member at small c".into()));
    }
    let mut hi = lo;
    let mut step = 0.05 * x0;
    loop {
        hi += step;
        if !good(hi) {
            break;
        }
        lo = hi;
        if hi > 1e3 * (x0 + alpha.norm().sqrt()) {
            return Err(QuadError::NoConvergence { residual: f64::NAN, detail: "no critical radius found".into() });
        }
        step *= 1.2;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if good(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut c = lo;
    let mut member = one_point_family(alpha, w0, c)?;
    if is_real(alpha) {
        let a = alpha.re;
        let f = |x: &[f64]| {
            let (c, z) = (x[0], x[1]);
            if c <= 0.0 || z <= 1.0 {
                return None;
            }
            let qv = poly::eval(&quartic(a, x0, c), C::new(z, 0.0)).re;
            let d = dphi_at_one(c, x0, C::new(z, 0.0)).re;
            Some(vec![qv, d])
        };
        let sol = crate::solver::levenberg_marquardt(f, &[c, member.z0.re], 1.0, LmOptions::default())?;
        if sol.residual < 1e-12 && (sol.x[0] - c).abs() < 1e-3 * c {
            c = sol.x[0];
            member = member_at(alpha, x0, rot, c, C::new(sol.x[1], 0.0))?;
        }
    }
    let t = member.t_closed.or(member.t);
    Ok(CriticalPoint { c, t, member })
}

/// `φ'(1)` of a one-point family member, in the rotated frame.
pub fn one_point_dphi_at_one(member: &OnePointMember, w0: f64) -> C {
    dphi_at_one(member.c, w0, member.z0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn cardioid_direct() {
        let phi = RationalFn::polynomial(&[ZERO, ONE, c(0.5, 0.0)]);
        let m = MapSpec::rational(phi, Orientation::Interior).unwrap();
        let h = direct_expansion(&m).unwrap();
        let t = h.term_at(ZERO).unwrap();
        assert!((t.coeffs[0] - c(1.5, 0.0)).norm() < 1e-12);
        assert!((t.coeffs[1] - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ellipse_direct() {
        let al = c(0.3, 0.2);
        let cc = 1.7;
        let phi = RationalFn::new(vec![al.conj() * cc, ZERO, c(cc, 0.0)], vec![ZERO, ONE]).unwrap();
        let m = MapSpec::rational(phi, Orientation::Exterior).unwrap();
        let h = direct_expansion(&m).unwrap();
        assert!(h.terms.is_empty());
        assert!((h.poly[1] - al).norm() < 1e-12);
        assert!(h.poly[0].norm() < 1e-12);
    }

    #[test]
    fn cardioid_inverse() {
        let h = PoleExpansion::single(ZERO, vec![c(1.5, 0.0), c(0.5, 0.0)]);
        let s = inverse_expansion(&h, true, Normalization::W0(ZERO)).unwrap();
        let phi = s.map.as_rational().unwrap();
        // The cardioid is a double root of the coefficient system
        // (φ'(−1) = 0), so coefficients are accurate to about √ε.
        assert!((phi.eval(c(0.3, 0.1)) - (c(0.3, 0.1) + c(0.3, 0.1).powi(2) * 0.5)).norm() < 1e-6);
        assert!(s.roundtrip < 1e-9);
    }

    #[test]
    fn off_center_disk_inverse() {
        let h = PoleExpansion::single(c(1.0, 0.5), vec![c(0.49, 0.0)]);
        let s = inverse_expansion(&h, true, Normalization::W0(c(1.2, 0.4))).unwrap();
        let m = &s.map;
        for th in [0.0, 1.0, 2.5, 4.0] {
            let w = m.eval(C::from_polar(1.0, th));
            assert!(((w - c(1.0, 0.5)).norm() - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn unbounded_one_point_inverse_matches_family() {
        let h = PoleExpansion::single(c(2.0, 0.0), vec![ONE]);
        let s = inverse_expansion(&h, false, Normalization::C(1.0)).unwrap();
        assert!(s.roundtrip < 1e-9, "{}", s.roundtrip);
        let fam = one_point_family(ONE, c(2.0, 0.0), 1.0).unwrap();
        for th in [0.3, 1.7, 3.0] {
            let z = C::from_polar(1.0, th);
            assert!((s.map.eval(z) - fam.map.eval(z)).norm() < 1e-8);
        }
    }

    #[test]
    fn c_star_closed_form_matches_cubic() {
        let cf = c_star_closed_form(-0.5, 2.0).unwrap();
        let roots = c_star_cubic_roots(-0.5, 2.0);
        assert_eq!(roots.len(), 3);
        assert!((cf - roots[1]).abs() < 1e-10);
    }

    #[test]
    fn change_of_variables_rotation() {
        let w0 = c(1.0, 1.0);
        let q = QuadSpec::classical(RationalFn::new(vec![ONE], vec![-w0, ONE]).unwrap(), true);
        let r = change_of_variables(&q, w0.norm() / w0, ZERO).unwrap();
        let pe = r.h.partial_fractions().unwrap();
        assert!((pe.terms[0].pole - c(2f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!((pe.terms[0].coeffs[0] - ONE).norm() < 1e-12);
    }

    #[test]
    fn family_area_matches_closed_form() {
        let m = one_point_family(ONE, c(2.0, 0.0), 1.5).unwrap();
        assert!((m.t.unwrap() - m.t_closed.unwrap()).abs() < 1e-9);
        assert!(t_c_residual(1.0, 2.0, m.t.unwrap(), 1.5).abs() < 1e-7);
    }
}
