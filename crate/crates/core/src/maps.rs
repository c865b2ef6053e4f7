//! Riemann maps `φ = P · z^{0|1} · Π b_λ · G` where the outer part `G` is
//! a rational function `R`, a power `R^{1/a}` or an exponential `e^R`.
//! Evaluation, Taylor jets, inversion, boundary sampling and
//! argument-principle counts.

use crate::error::{QuadError, Result};
use crate::poly;
use crate::ratfun::RationalFn;
use crate::series::Series;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// `|R|` below this on a boundary sample is treated as a corner.
pub const CORNER_TOL: f64 = 1e-12;
/// Maximum Newton iterations for non-rational inverses.
pub const NEWTON_MAX_ITER: usize = 100;

/// Outer-part kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    Rational,
    Power { a: f64 },
    Log,
}

/// Which disk side parametrizes the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `φ: D → Ω`, bounded `Ω`, normalization `φ(0) = w₀`, `φ'(0) > 0`.
    Interior,
    /// `φ: D^c → Ω`, unbounded `Ω`, normalization `φ(z) = cz + O(1)`, `c > 0`.
    Exterior,
}

/// The Blaschke factor `b_λ(z) = (|λ|/λ)(λ − z)/(1 − λ̄ z)`; `b_0(z) = z`.
pub fn blaschke(lambda: C, z: C) -> C {
    if lambda == ZERO {
        return z;
    }
    (lambda.norm() / lambda) * (lambda - z) / (ONE - lambda.conj() * z)
}

/// `b_λ` as a rational function.
pub fn blaschke_rational(lambda: C) -> RationalFn {
    if lambda == ZERO {
        return RationalFn::polynomial(&[ZERO, ONE]);
    }
    let u = lambda.norm() / lambda;
    RationalFn::new(vec![u * lambda, -u], vec![ONE, -lambda.conj()]).expect("non-zero denominator")
}

#[derive(Debug, Clone, PartialEq)]
struct Factors {
    /// Zeros and poles of `R` with multiplicities.
    zeros: Vec<(C, usize)>,
    poles: Vec<(C, usize)>,
    /// `R(0)` (interior) or leading coefficient at infinity (exterior).
    base: C,
    /// `deg num − deg den` of `R`.
    shift: i64,
    /// `1/a` when it is a positive integer.
    int_power: Option<usize>,
}

/// A Riemann map in product form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct MapSpec {
    pub kind: MapKind,
    pub orientation: Orientation,
    pub z_factor: bool,
    pub blaschke: Vec<C>,
    pub prefactor: C,
    /// Outer rational part `R` (for the rational kind this is `φ / (P z Π b)`).
    pub r: RationalFn,
    factors: Factors,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawMap {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    orientation: Orientation,
    #[serde(default)]
    z_factor: bool,
    #[serde(default)]
    blaschke: Vec<C>,
    #[serde(default = "one")]
    prefactor: C,
    r: RationalFn,
}

fn one() -> C {
    ONE
}

impl TryFrom<RawMap> for MapSpec {
    type Error = QuadError;
    fn try_from(raw: RawMap) -> Result<Self> {
        let kind = match raw.kind.as_str() {
            "rational" => MapKind::Rational,
            "power" => MapKind::Power {
                a: raw.a.ok_or_else(|| QuadError::InvalidInput("power map needs \"a\"".into()))?,
            },
            "log" => MapKind::Log,
            other => return Err(QuadError::InvalidInput(format!("unknown map kind {other}"))),
        };
        MapSpec::new(kind, raw.orientation, raw.prefactor, raw.z_factor, raw.blaschke, raw.r)
    }
}

impl From<MapSpec> for RawMap {
    fn from(m: MapSpec) -> Self {
        let (kind, a) = match m.kind {
            MapKind::Rational => ("rational", None),
            MapKind::Power { a } => ("power", Some(a)),
            MapKind::Log => ("log", None),
        };
        RawMap {
            kind: kind.into(),
            a,
            orientation: m.orientation,
            z_factor: m.z_factor,
            blaschke: m.blaschke,
            prefactor: m.prefactor,
            r: m.r,
        }
    }
}

/// One boundary sample: parameter, point and `dw/dθ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub theta: f64,
    pub w: C,
    pub dw: C,
}

/// Equispaced samples of `φ(e^{iθ})`, `θ = 2πk/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub samples: Vec<BoundarySample>,
    /// True when increasing `θ` traverses `∂Ω` with `Ω` on the left.
    pub positive: bool,
}

impl BoundaryCurve {
    pub fn points(&self) -> Vec<C> {
        self.samples.iter().map(|s| s.w).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The same curve traversed in the opposite direction.
    pub fn reversed(&self) -> BoundaryCurve {
        let n = self.samples.len();
        let samples = (0..n)
            .map(|k| {
                let s = self.samples[(n - k) % n];
                BoundarySample { theta: 2.0 * PI - s.theta, w: s.w, dw: -s.dw }
            })
            .map(|mut s| {
                if s.theta >= 2.0 * PI {
                    s.theta -= 2.0 * PI;
                }
                s
            })
            .collect();
        BoundaryCurve { samples, positive: !self.positive }
    }
}

fn integer_of(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        Some(r as i64)
    } else {
        None
    }
}

impl MapSpec {
    pub fn new(
        kind: MapKind,
        orientation: Orientation,
        prefactor: C,
        z_factor: bool,
        blaschke: Vec<C>,
        r: RationalFn,
    ) -> Result<Self> {
        if let MapKind::Power { a } = kind {
            if !(a > 0.0) || !a.is_finite() {
                return Err(QuadError::InvalidInput(format!("power weight a = {a} must be positive")));
            }
        }
        if z_factor && orientation == Orientation::Interior {
            return Err(QuadError::InvalidInput("z factor is only used for exterior maps".into()));
        }
        for l in &blaschke {
            let ok = match orientation {
                Orientation::Interior => l.norm() < 1.0,
                Orientation::Exterior => l.norm() > 1.0,
            };
            if !ok {
                return Err(QuadError::InvalidInput(format!("Blaschke parameter {l} on the wrong side")));
            }
        }
        let factors = compute_factors(kind, orientation, &r)?;
        Ok(MapSpec { kind, orientation, z_factor, blaschke, prefactor, r, factors })
    }

    /// A rational Riemann map `φ`.
    pub fn rational(phi: RationalFn, orientation: Orientation) -> Result<Self> {
        Self::new(MapKind::Rational, orientation, ONE, false, vec![], phi)
    }

    /// `P · z^{zf} · Π b_λ · R^{1/a}`.
    pub fn power(
        a: f64,
        orientation: Orientation,
        prefactor: C,
        z_factor: bool,
        blaschke: Vec<C>,
        r: RationalFn,
    ) -> Result<Self> {
        Self::new(MapKind::Power { a }, orientation, prefactor, z_factor, blaschke, r)
    }

    /// `P · z^{zf} · Π b_λ · e^{R}`.
    pub fn log(
        orientation: Orientation,
        prefactor: C,
        z_factor: bool,
        blaschke: Vec<C>,
        r: RationalFn,
    ) -> Result<Self> {
        Self::new(MapKind::Log, orientation, prefactor, z_factor, blaschke, r)
    }

    pub fn is_interior(&self) -> bool {
        self.orientation == Orientation::Interior
    }

    /// True when `z` lies in the closed map domain (with slack `tol`).
    pub fn in_domain(&self, z: C, tol: f64) -> bool {
        match self.orientation {
            Orientation::Interior => z.norm() <= 1.0 + tol,
            Orientation::Exterior => z.norm() >= 1.0 - tol,
        }
    }

    /// The whole map as a single rational function when no fractional
    /// power or exponential is involved.
    pub fn as_rational(&self) -> Option<RationalFn> {
        let g = match self.kind {
            MapKind::Rational => self.r.clone(),
            MapKind::Power { .. } => {
                let k = self.factors.int_power?;
                let mut g = RationalFn::constant(ONE);
                for _ in 0..k {
                    g = g.mul(&self.r);
                }
                g
            }
            MapKind::Log => {
                if self.r.deg_num() == 0 && self.r.deg_den() == 0 {
                    RationalFn::constant(self.r.num[0].exp())
                } else {
                    return None;
                }
            }
        };
        let mut f = g.scale(self.prefactor);
        if self.z_factor {
            f = f.mul(&RationalFn::polynomial(&[ZERO, ONE]));
        }
        for l in &self.blaschke {
            f = f.mul(&blaschke_rational(*l));
        }
        Some(f)
    }

    /// Continuous logarithm of `R` from the normalization point.
    fn log_r(&self, z: C) -> C {
        let f = &self.factors;
        let mut acc = f.base.ln();
        match self.orientation {
            Orientation::Interior => {
                for (zj, m) in &f.zeros {
                    acc += (ONE - z / zj).ln() * *m as f64;
                }
                for (pj, m) in &f.poles {
                    acc -= (ONE - z / pj).ln() * *m as f64;
                }
            }
            Orientation::Exterior => {
                for (zj, m) in &f.zeros {
                    acc += (ONE - zj / z).ln() * *m as f64;
                }
                for (pj, m) in &f.poles {
                    acc -= (ONE - pj / z).ln() * *m as f64;
                }
                if f.shift != 0 {
                    acc += z.ln() * f.shift as f64;
                }
            }
        }
        acc
    }

    /// Value of the outer part `G` at `z`.
    pub fn outer(&self, z: C) -> C {
        match self.kind {
            MapKind::Rational => self.r.eval(z),
            MapKind::Log => self.r.eval(z).exp(),
            MapKind::Power { a } => {
                if let Some(k) = self.factors.int_power {
                    return self.r.eval(z).powu(k as u32);
                }
                let mut l = self.log_r(z) / a;
                if self.orientation == Orientation::Exterior && self.factors.shift != 0 {
                    // z^{shift/a} is single valued: remove the log z part.
                    let e = self.factors.shift as f64 / a;
                    l -= z.ln() * e;
                    return l.exp() * z.powi(e.round() as i32);
                }
                l.exp()
            }
        }
    }

    fn inner(&self, z: C) -> C {
        let mut v = self.prefactor;
        if self.z_factor {
            v *= z;
        }
        for l in &self.blaschke {
            v *= blaschke(*l, z);
        }
        v
    }

    /// `φ(z)`.
    pub fn eval(&self, z: C) -> C {
        self.inner(z) * self.outer(z)
    }

    /// `φ(z)` with the corner guard: errors when `R(z)` sits on the
    /// singular point of the fractional power.
    pub fn eval_checked(&self, z: C) -> Result<C> {
        if let MapKind::Power { .. } = self.kind {
            if self.factors.int_power.is_none() && self.r.eval(z).norm() < CORNER_TOL {
                return Err(QuadError::BranchAmbiguity(format!("{z}")));
            }
        }
        let v = self.eval(z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite)
        }
    }

    /// Taylor coefficients of `φ` about a finite point `z0`.
    pub fn jet(&self, z0: C, n: usize) -> Series {
        let mut s = Series::constant(self.prefactor, n);
        if self.z_factor {
            s = &s * &Series::variable(z0, n);
        }
        for l in &self.blaschke {
            s = &s * &blaschke_rational(*l).taylor(z0, n);
        }
        let rt = self.r.taylor(z0, n);
        let g = match self.kind {
            MapKind::Rational => rt,
            MapKind::Log => {
                let mut t = rt.clone();
                t.0[0] = ZERO;
                t.exp().scale(rt.coeff(0).exp())
            }
            MapKind::Power { a } => {
                if let Some(k) = self.factors.int_power {
                    rt.powi(k)
                } else {
                    rt.powf_with(1.0 / a, self.outer(z0))
                }
            }
        };
        &s * &g
    }

    /// `φ'(z)`.
    pub fn derivative(&self, z: C) -> C {
        self.jet(z, 2).coeff(1)
    }

    /// Expansion at infinity: `φ(1/t) = t^{val} Σ s_k t^k`.
    pub fn at_infinity(&self, n: usize) -> Result<(i64, Series)> {
        let mut val: i64 = 0;
        let mut s = Series::constant(self.prefactor, n);
        if self.z_factor {
            val -= 1;
        }
        for l in &self.blaschke {
            let (v, b) = blaschke_rational(*l).at_infinity(n);
            val += v;
            s = &s * &b;
        }
        let (rv, rs) = self.r.at_infinity(n);
        match self.kind {
            MapKind::Rational => {
                val += rv;
                s = &s * &rs;
            }
            MapKind::Log => {
                if rv < 0 {
                    return Err(QuadError::InvalidInput("exponential part has a pole at infinity".into()));
                }
                let t = rs.shift_up(rv as usize);
                let mut u = t.clone();
                u.0[0] = ZERO;
                s = &s * &u.exp().scale(t.coeff(0).exp());
            }
            MapKind::Power { a } => {
                if let Some(k) = self.factors.int_power {
                    val += rv * k as i64;
                    s = &s * &rs.powi(k);
                } else {
                    let e = integer_of(rv as f64 / a).ok_or_else(|| {
                        QuadError::BranchAmbiguity("non-integer order at infinity".into())
                    })?;
                    val += e;
                    let v0 = (rs.coeff(0).ln() / a).exp();
                    s = &s * &rs.powf_with(1.0 / a, v0);
                }
            }
        }
        Ok((val, s))
    }

    /// Conformal radius `c = lim φ(z)/z` of an exterior map.
    pub fn conformal_radius(&self) -> Result<C> {
        let (v, s) = self.at_infinity(2)?;
        if v != -1 {
            return Err(QuadError::InvalidInput("map does not have a simple pole at infinity".into()));
        }
        Ok(s.coeff(0))
    }

    /// Check that `φ` is analytic and finite on the closed map domain
    /// (apart from the simple pole at infinity of exterior maps).
    pub fn check_analytic(&self) -> Result<()> {
        let inside = |p: C| self.in_domain(p, 1e-12);
        let rpoles = poly::roots_with_multiplicity(&self.r.den);
        if self.r.deg_den() > 0 {
            for (p, _) in &rpoles {
                if inside(*p) {
                    return Err(QuadError::NotApplicable(format!("outer part has a pole at {p}")));
                }
            }
        }
        if let MapKind::Power { .. } = self.kind {
            if self.factors.int_power.is_none() {
                for (zj, m) in &self.factors.zeros {
                    let e = *m as f64 / self.power_a();
                    if inside(*zj) && integer_of(e).is_none() {
                        return Err(QuadError::BranchAmbiguity(format!("zero of R at {zj}")));
                    }
                }
            }
        }
        if self.orientation == Orientation::Exterior {
            let (v, _) = self.at_infinity(2)?;
            if v < -1 {
                return Err(QuadError::NotApplicable("pole of order > 1 at infinity".into()));
            }
        }
        Ok(())
    }

    pub fn power_a(&self) -> f64 {
        match self.kind {
            MapKind::Power { a } => a,
            MapKind::Rational => 1.0,
            MapKind::Log => 0.0,
        }
    }

    /// Boundary samples at `θ = 2πk/n` with the corner guard.
    pub fn boundary_curve(&self, n: usize) -> Result<BoundaryCurve> {
        if n < 4 {
            return Err(QuadError::InvalidInput("need at least 4 boundary samples".into()));
        }
        let mut samples = Vec::with_capacity(n);
        for k in 0..n {
            let theta = 2.0 * PI * k as f64 / n as f64;
            let z = C::from_polar(1.0, theta);
            if let MapKind::Power { .. } = self.kind {
                if self.factors.int_power.is_none() && self.r.eval(z).norm() < CORNER_TOL {
                    return Err(QuadError::BranchAmbiguity(format!("corner at θ = {theta}")));
                }
            }
            let j = self.jet(z, 2);
            let w = j.coeff(0);
            let dw = j.coeff(1) * C::new(0.0, 1.0) * z;
            if !w.is_finite() || !dw.is_finite() {
                return Err(QuadError::NonFinite);
            }
            samples.push(BoundarySample { theta, w, dw });
        }
        Ok(BoundaryCurve { samples, positive: self.is_interior() })
    }

    /// Number of solutions of `φ(z) = w` in the open map domain,
    /// by the argument principle on the unit circle.
    pub fn preimage_count(&self, w: C) -> Result<i64> {
        let wind = winding_number(|th| self.eval(C::from_polar(1.0, th)) - w, 256)?;
        Ok(match self.orientation {
            Orientation::Interior => wind,
            Orientation::Exterior => 1 - wind,
        })
    }

    /// Number of zeros of `φ'` in the open map domain.
    pub fn critical_count(&self) -> Result<i64> {
        let wind = winding_number(|th| self.derivative(C::from_polar(1.0, th)), 256)?;
        Ok(match self.orientation {
            Orientation::Interior => wind,
            Orientation::Exterior => -wind,
        })
    }

    /// Default seed for the inverse: the linear approximation at the
    /// normalization point.
    fn default_seed(&self, w: C) -> C {
        match self.orientation {
            Orientation::Interior => {
                let j = self.jet(ZERO, 2);
                let z = (w - j.coeff(0)) / j.coeff(1);
                if z.norm() > 0.95 {
                    z * (0.95 / z.norm())
                } else {
                    z
                }
            }
            Orientation::Exterior => {
                let (z, c) = match self.at_infinity(2) {
                    Ok((-1, s)) => (s.coeff(1), s.coeff(0)),
                    _ => (ZERO, ONE),
                };
                let z = (w - z) / c;
                if z.norm() < 1.05 {
                    if z == ZERO {
                        C::new(1.05, 0.0)
                    } else {
                        z * (1.05 / z.norm())
                    }
                } else {
                    z
                }
            }
        }
    }

    fn newton_inverse(&self, w: C, seed: C) -> Option<C> {
        let tol = 1e-11 * (1.0 + w.norm());
        let mut z = seed;
        let mut res = (self.eval(z) - w).norm();
        if !res.is_finite() {
            return None;
        }
        for _ in 0..NEWTON_MAX_ITER {
            if res < tol {
                return Some(z);
            }
            let j = self.jet(z, 2);
            let step = (j.coeff(0) - w) / j.coeff(1);
            if !step.is_finite() {
                return None;
            }
            let mut lam = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let zn = z - step * lam;
                if self.in_domain(zn, 1e-9) {
                    let rn = (self.eval(zn) - w).norm();
                    if rn.is_finite() && rn < res {
                        z = zn;
                        res = rn;
                        accepted = true;
                        break;
                    }
                }
                lam *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if res < tol {
            Some(z)
        } else {
            None
        }
    }

    /// `ψ(w) = φ^{-1}(w)`.
    pub fn eval_inverse(&self, w: C, seed: Option<C>) -> Result<C> {
        if let Some(f) = self.as_rational() {
            let eq = poly::sub(&f.num, &poly::scale(&f.den, w));
            let mut found: Vec<C> = poly::roots(&eq)
                .into_iter()
                .filter(|z| self.in_domain(*z, 1e-12) && poly::eval(&f.den, *z).norm() > 1e-300)
                .collect();
            found.dedup_by(|a, b| (*a - *b).norm() < 1e-9);
            return match found.len() {
                0 => Err(QuadError::NoPreimage(format!("{w}"))),
                1 => {
                    let mut z = found[0];
                    for _ in 0..3 {
                        let j = self.jet(z, 2);
                        let st = (j.coeff(0) - w) / j.coeff(1);
                        if st.is_finite() && st.norm() < 1e-6 {
                            z -= st;
                        }
                    }
                    Ok(z)
                }
                n => Err(QuadError::AmbiguousPreimage { w: format!("{w}"), count: n as i64 }),
            };
        }
        let s0 = seed.unwrap_or_else(|| self.default_seed(w));
        if let Some(z) = self.newton_inverse(w, s0) {
            return Ok(z);
        }
        // Seed scan on circles inside the domain.
        let radii: Vec<f64> = match self.orientation {
            Orientation::Interior => vec![0.0, 0.3, 0.6, 0.8, 0.9, 0.97],
            Orientation::Exterior => vec![1.03, 1.1, 1.3, 1.7, 2.5, 4.0, 8.0],
        };
        for r in radii {
            let m = if r == 0.0 { 1 } else { 16 };
            for k in 0..m {
                let s = C::from_polar(r, 2.0 * PI * k as f64 / m as f64);
                if let Some(z) = self.newton_inverse(w, s) {
                    return Ok(z);
                }
            }
        }
        match self.preimage_count(w) {
            Ok(0) => Err(QuadError::NoPreimage(format!("{w}"))),
            Ok(n) if n > 1 => Err(QuadError::AmbiguousPreimage { w: format!("{w}"), count: n }),
            _ => Err(QuadError::NewtonDivergence(format!("no convergence for w = {w}"))),
        }
    }

    /// `ψ'(w) = 1/φ'(ψ(w))`.
    pub fn inverse_derivative(&self, w: C, seed: Option<C>) -> Result<C> {
        let z = self.eval_inverse(w, seed)?;
        Ok(ONE / self.derivative(z))
    }

    /// Reflection `φ^#(z) = conj(φ(1/z̄))`.
    pub fn reflect_eval(&self, z: C) -> C {
        self.eval(ONE / z.conj()).conj()
    }
}

fn compute_factors(kind: MapKind, orientation: Orientation, r: &RationalFn) -> Result<Factors> {
    let shift = r.deg_num() as i64 - r.deg_den() as i64;
    let mut f = Factors { zeros: vec![], poles: vec![], base: ONE, shift, int_power: None };
    let a = match kind {
        MapKind::Power { a } => a,
        _ => return Ok(f),
    };
    let inv = 1.0 / a;
    if let Some(k) = integer_of(inv) {
        if k >= 1 {
            f.int_power = Some(k as usize);
            return Ok(f);
        }
    }
    if r.is_zero() {
        return Err(QuadError::InvalidInput("outer part is identically zero".into()));
    }
    f.zeros = if r.deg_num() > 0 { poly::roots_with_multiplicity(&r.num) } else { vec![] };
    f.poles = if r.deg_den() > 0 { poly::roots_with_multiplicity(&r.den) } else { vec![] };
    match orientation {
        Orientation::Interior => {
            let v = r.eval(ZERO);
            if v.norm() == 0.0 || !v.is_finite() {
                return Err(QuadError::BranchAmbiguity("R vanishes or blows up at 0".into()));
            }
            f.base = v;
            if f.zeros.iter().chain(f.poles.iter()).any(|(p, _)| p.norm() == 0.0) {
                return Err(QuadError::BranchAmbiguity("R has a zero or pole at 0".into()));
            }
        }
        Orientation::Exterior => {
            let dn = r.deg_num();
            let dd = r.deg_den();
            f.base = r.num[dn] / r.den[dd];
            if integer_of(shift as f64 / a).is_none() {
                return Err(QuadError::BranchAmbiguity("R^{1/a} is multivalued at infinity".into()));
            }
            // Zero roots give the trivial factor (1 − 0/z).
            f.zeros.retain(|(p, _)| p.norm() != 0.0);
            f.poles.retain(|(p, _)| p.norm() != 0.0);
        }
    }
    Ok(f)
}

/// Winding number of `θ ↦ f(θ)` over `[0, 2π]` about the origin, with
/// adaptive subdivision where the phase jumps by more than `π/2`.
pub fn winding_number<F: Fn(f64) -> C>(f: F, n0: usize) -> Result<i64> {
    let mut total = 0.0;
    let h = 2.0 * PI / n0 as f64;
    let mut prev = f(0.0);
    check_sample(prev)?;
    for k in 1..=n0 {
        let t1 = if k == n0 { 2.0 * PI } else { k as f64 * h };
        let t0 = (k - 1) as f64 * h;
        let next = if k == n0 { f(0.0) } else { f(t1) };
        check_sample(next)?;
        total += phase_increment(&f, t0, t1, prev, next, 0)?;
        prev = next;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

fn check_sample(v: C) -> Result<()> {
    if !v.is_finite() {
        return Err(QuadError::NonFinite);
    }
    if v.norm() < 1e-14 {
        return Err(QuadError::ProbeOnBoundary);
    }
    Ok(())
}

fn phase_increment<F: Fn(f64) -> C>(f: &F, t0: f64, t1: f64, v0: C, v1: C, depth: usize) -> Result<f64> {
    let d = (v1 / v0).arg();
    if d.abs() <= PI / 2.0 || depth >= 40 {
        return Ok(d);
    }
    let tm = 0.5 * (t0 + t1);
    let vm = f(tm);
    check_sample(vm)?;
    Ok(phase_increment(f, t0, tm, v0, vm, depth + 1)? + phase_increment(f, tm, t1, vm, v1, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn monomial(a: f64, cc: f64, gamma: C) -> MapSpec {
        // R = c^a (1 − γ/z) = c^a (z − γ)/z, φ = R^{1/a} z
        let r = RationalFn::new(vec![-gamma * cc.powf(a), c(cc.powf(a), 0.0)], vec![ZERO, ONE]).unwrap();
        MapSpec::power(a, Orientation::Exterior, ONE, true, vec![], r).unwrap()
    }

    #[test]
    fn power_monomial_value() {
        let m = monomial(2.0, 1.0, c(0.5, 0.0));
        let v = m.eval(c(2.0, 0.0));
        assert!((v - c(2.0 * 0.75f64.sqrt(), 0.0)).norm() < 1e-14);
        let h = 1e-6;
        let z = c(2.0, 0.0);
        let fd = (m.eval(z + h) - m.eval(z - h)) / (2.0 * h);
        assert!((fd - m.derivative(z)).norm() < 1e-6 * fd.norm());
    }

    #[test]
    fn rational_inverse_round_trip() {
        let phi = RationalFn::polynomial(&[ZERO, ONE, c(0.5, 0.0)]);
        let m = MapSpec::rational(phi, Orientation::Interior).unwrap();
        let z = m.eval_inverse(c(1.5, 0.0), None).unwrap();
        assert!((z - ONE).norm() < 1e-12);
    }

    #[test]
    fn log_map_values() {
        let m = MapSpec::log(
            Orientation::Exterior,
            c(0.2, 0.0),
            true,
            vec![],
            RationalFn::new(vec![c(0.2, 0.0)], vec![ZERO, ONE]).unwrap(),
        )
        .unwrap();
        assert!((m.eval(ONE) - c(0.2 * 0.2f64.exp(), 0.0)).norm() < 1e-14);
        let w = c(3.0, 1.0);
        let z = m.eval_inverse(w, None).unwrap();
        assert!((m.eval(z) - w).norm() < 1e-11 * 4.0);
        assert_eq!(m.preimage_count(w).unwrap(), 1);
    }

    #[test]
    fn at_infinity_gives_conformal_radius() {
        let m = monomial(2.0, 1.5, c(0.3, 0.1));
        assert!((m.conformal_radius().unwrap() - c(1.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn json_round_trip() {
        let m = monomial(0.4, 0.3, c(0.2, 0.0));
        let s = serde_json::to_string(&m).unwrap();
        let back: MapSpec = serde_json::from_str(&s).unwrap();
        assert!((back.eval(c(1.3, 0.4)) - m.eval(c(1.3, 0.4))).norm() < 1e-14);
    }
}
