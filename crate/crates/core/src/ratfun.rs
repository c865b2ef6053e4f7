//! Complex rational functions: canonical form, reflection `f^#`,
//! partial fractions, Cauchy projections onto the disk and its exterior,
//! and Laurent data at infinity.

use crate::error::{QuadError, Result};
use crate::poly;
use crate::series::Series;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Common roots of numerator and denominator closer than this are cancelled.
pub const CANCEL_TOL: f64 = 1e-9;
/// Leading denominator coefficient is normalized to one within this tolerance.
pub const MONIC_TOL: f64 = 1e-12;
/// Poles closer than this (relative) to the unit circle are rejected by projections.
pub const CIRCLE_TOL: f64 = 1e-9;
/// Two poles are identified when closer than this (relative).
pub const SAME_POLE_TOL: f64 = 1e-12;

/// A rational function `num / den` with ascending coefficient lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRational")]
pub struct RationalFn {
    pub num: Vec<C>,
    pub den: Vec<C>,
}

#[derive(Deserialize)]
struct RawRational {
    num: Vec<C>,
    #[serde(default = "unit_den")]
    den: Vec<C>,
}

fn unit_den() -> Vec<C> {
    vec![C::new(1.0, 0.0)]
}

impl TryFrom<RawRational> for RationalFn {
    type Error = QuadError;
    fn try_from(r: RawRational) -> Result<Self> {
        RationalFn::new(r.num, r.den)
    }
}

impl RationalFn {
    /// Build and canonicalize: trims, cancels common roots, makes `den` monic.
    pub fn new(num: Vec<C>, den: Vec<C>) -> Result<Self> {
        let den = poly::trim(&den, 0.0);
        if poly::is_zero(&den) {
            return Err(QuadError::InvalidInput("zero denominator".into()));
        }
        let num = if num.is_empty() { vec![ZERO] } else { num };
        let mut f = RationalFn { num, den };
        f.canonicalize();
        Ok(f)
    }

    pub fn polynomial(coeffs: &[C]) -> Self {
        let mut f = RationalFn { num: coeffs.to_vec(), den: vec![ONE] };
        f.canonicalize();
        f
    }

    pub fn constant(c: C) -> Self {
        Self::polynomial(&[c])
    }

    /// `1/(z - p)^j` times `c`.
    pub fn pole_term(p: C, j: usize, c: C) -> Self {
        RationalFn { num: vec![c], den: poly::linear_power(p, j) }
    }

    fn canonicalize(&mut self) {
        let nscale = self.num.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.num = poly::trim(&self.num, 1e-15);
        if nscale == 0.0 || poly::is_zero(&self.num) {
            self.num = vec![ZERO];
            self.den = vec![ONE];
            return;
        }
        self.den = poly::trim(&self.den, 1e-15);
        if poly::degree(&self.den) > 0 && poly::degree(&self.num) > 0 {
            let groups = poly::roots_with_multiplicity(&self.den);
            for (r, m) in groups {
                for _ in 0..m {
                    if poly::degree(&self.num) == 0 {
                        break;
                    }
                    let v = poly::eval(&self.num, r).norm();
                    let s: f64 = self
                        .num
                        .iter()
                        .enumerate()
                        .map(|(k, a)| a.norm() * r.norm().powi(k as i32))
                        .sum();
                    if v <= CANCEL_TOL * s.max(1e-300) {
                        self.num = poly::deflate(&self.num, r);
                        self.den = poly::deflate(&self.den, r);
                    } else {
                        break;
                    }
                }
            }
        }
        let lead = *self.den.last().unwrap();
        {
            let inv = ONE / lead;
            self.num = poly::scale(&self.num, inv);
            self.den = poly::scale(&self.den, inv);
            let n = self.den.len();
            self.den[n - 1] = ONE;
        }
    }

    pub fn deg_num(&self) -> usize {
        poly::degree(&self.num)
    }

    pub fn deg_den(&self) -> usize {
        poly::degree(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        poly::is_zero(&self.num)
    }

    pub fn eval(&self, z: C) -> C {
        poly::eval(&self.num, z) / poly::eval(&self.den, z)
    }

    /// Value at infinity (`None` if there is a pole there).
    pub fn value_at_infinity(&self) -> Option<C> {
        let dn = self.deg_num();
        let dd = self.deg_den();
        if dn > dd && !self.is_zero() {
            None
        } else if dn == dd {
            Some(self.num[dn] / self.den[dd])
        } else {
            Some(ZERO)
        }
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        let num = poly::add(&poly::mul(&self.num, &o.den), &poly::mul(&o.num, &self.den));
        let den = poly::mul(&self.den, &o.den);
        RationalFn::new(num, den).expect("non-zero denominator")
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.scale(-ONE))
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        RationalFn::new(poly::mul(&self.num, &o.num), poly::mul(&self.den, &o.den))
            .expect("non-zero denominator")
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn> {
        if o.is_zero() {
            return Err(QuadError::InvalidInput("division by zero function".into()));
        }
        RationalFn::new(poly::mul(&self.num, &o.den), poly::mul(&self.den, &o.num))
    }

    pub fn scale(&self, s: C) -> RationalFn {
        if s == ZERO {
            return RationalFn::constant(ZERO);
        }
        RationalFn { num: poly::scale(&self.num, s), den: self.den.clone() }
    }

    pub fn derivative(&self) -> RationalFn {
        let num = poly::sub(
            &poly::mul(&poly::derivative(&self.num), &self.den),
            &poly::mul(&self.num, &poly::derivative(&self.den)),
        );
        RationalFn::new(num, poly::mul(&self.den, &self.den)).expect("non-zero denominator")
    }

    /// Taylor coefficients about a regular point `z0`.
    pub fn taylor(&self, z0: C, n: usize) -> Series {
        let a = Series::from_coeffs(&poly::taylor_shift(&self.num, z0), n);
        let b = Series::from_coeffs(&poly::taylor_shift(&self.den, z0), n);
        a.div(&b)
    }

    /// Expansion at infinity in `t = 1/z`: `f(1/t) = t^shift * S(t)`.
    pub fn at_infinity(&self, n: usize) -> (i64, Series) {
        let dn = self.deg_num();
        let dd = self.deg_den();
        let rn: Vec<C> = self.num[..=dn].iter().rev().copied().collect();
        let rd: Vec<C> = self.den[..=dd].iter().rev().copied().collect();
        let s = Series::from_coeffs(&rn, n).div(&Series::from_coeffs(&rd, n));
        (dd as i64 - dn as i64, s)
    }

    /// Partial fraction decomposition.
    pub fn partial_fractions(&self) -> Result<PoleExpansion> {
        partial_fractions(self)
    }
}

/// Reflection `f^#(z) = conj(f(1/conj(z)))`.
pub fn reflect(f: &RationalFn) -> RationalFn {
    let n = f.deg_num();
    let m = f.deg_den();
    let rn: Vec<C> = f.num[..=n].iter().rev().map(|c| c.conj()).collect();
    let rd: Vec<C> = f.den[..=m].iter().rev().map(|c| c.conj()).collect();
    let (num, den) = if m >= n {
        (poly::mul(&rn, &poly::linear_power(ZERO, m - n)), rd)
    } else {
        (rn, poly::mul(&rd, &poly::linear_power(ZERO, n - m)))
    };
    RationalFn::new(num, den).expect("reflection keeps a non-zero denominator")
}

/// Coefficients of `z^k` for `k = deg, deg-1, ...` (`n_terms` of them),
/// where `deg = deg num - deg den`.
pub fn laurent_at_infinity(f: &RationalFn, n_terms: usize) -> Vec<C> {
    let (_, s) = f.at_infinity(n_terms);
    s.0
}

/// One principal-part term: `coeffs[j]` multiplies `(z - pole)^-(j+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub pole: C,
    pub coeffs: Vec<C>,
}

/// Polynomial part plus principal parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PoleExpansion {
    pub poly: Vec<C>,
    pub terms: Vec<PoleTerm>,
}

/// Which Cauchy projection to take on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Onto `A(D)`: polynomial part and poles outside the disk.
    Interior,
    /// Onto `A_0(D^c)`: principal parts at poles inside the disk.
    Exterior,
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn same_pole(a: C, b: C) -> bool {
    (a - b).norm() <= SAME_POLE_TOL * (1.0 + a.norm())
}

impl PoleExpansion {
    pub fn zero() -> Self {
        PoleExpansion { poly: vec![], terms: vec![] }
    }

    pub fn polynomial(p: &[C]) -> Self {
        PoleExpansion { poly: p.to_vec(), terms: vec![] }
    }

    pub fn constant(c: C) -> Self {
        Self::polynomial(&[c])
    }

    pub fn single(pole: C, coeffs: Vec<C>) -> Self {
        PoleExpansion { poly: vec![], terms: vec![PoleTerm { pole, coeffs }] }
    }

    pub fn eval(&self, z: C) -> C {
        let mut acc = poly::eval(&self.poly, z);
        for t in &self.terms {
            let u = ONE / (z - t.pole);
            let mut up = u;
            for c in &t.coeffs {
                acc += c * up;
                up *= u;
            }
        }
        acc
    }

    pub fn term_at(&self, p: C) -> Option<&PoleTerm> {
        self.terms.iter().find(|t| same_pole(t.pole, p))
    }

    pub fn scale(&self, s: C) -> Self {
        PoleExpansion {
            poly: poly::scale(&self.poly, s),
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm { pole: t.pole, coeffs: poly::scale(&t.coeffs, s) })
                .collect(),
        }
    }

    pub fn add(&self, o: &PoleExpansion) -> Self {
        let mut out = self.clone();
        out.poly = poly::add(&self.poly, &o.poly);
        for t in &o.terms {
            if let Some(e) = out.terms.iter_mut().find(|e| same_pole(e.pole, t.pole)) {
                e.coeffs = poly::add(&e.coeffs, &t.coeffs);
            } else {
                out.terms.push(t.clone());
            }
        }
        out
    }

    pub fn sub(&self, o: &PoleExpansion) -> Self {
        self.add(&o.scale(-ONE))
    }

    /// Order of the pole at infinity of the polynomial part (0 if constant or empty).
    pub fn poly_degree(&self) -> usize {
        let t = poly::trim(&self.poly, 0.0);
        poly::degree(&t)
    }

    /// Taylor coefficients of the part regular at `z0`, excluding any term
    /// whose pole coincides with `z0`.
    fn regular_taylor(&self, z0: C, n: usize) -> Series {
        let mut s = Series::from_coeffs(&poly::taylor_shift(&self.poly, z0), n);
        for t in &self.terms {
            if same_pole(t.pole, z0) {
                continue;
            }
            // c/(z - p)^j with z = z0 + s: c (d + s)^-j, d = z0 - p.
            let d = z0 - t.pole;
            let base = Series::variable(d, n);
            let inv = base.recip();
            let mut pw = inv.clone();
            for c in &t.coeffs {
                s = &s + &pw.scale(*c);
                pw = &pw * &inv;
            }
        }
        s
    }

    /// Taylor series at a regular point.
    pub fn taylor(&self, z0: C, n: usize) -> Series {
        self.regular_taylor(z0, n)
    }

    /// Local Laurent coefficients at `p`: index `i` holds the coefficient
    /// of `(z - p)^(i - m)` where `m` is the order of the pole at `p`.
    fn local(&self, p: C, n_pos: usize) -> (usize, Vec<C>) {
        let own = self.term_at(p).map(|t| t.coeffs.clone()).unwrap_or_default();
        let m = own.len();
        let reg = self.regular_taylor(p, n_pos);
        let mut v = vec![ZERO; m + n_pos];
        for (j, c) in own.iter().enumerate() {
            v[m - 1 - j] = *c;
        }
        for k in 0..n_pos {
            v[m + k] += reg.coeff(k);
        }
        (m, v)
    }

    /// Laurent expansion at infinity: ascending polynomial part and the
    /// coefficients of `z^-1, z^-2, ...` (`n_neg` of them).
    pub fn laurent_inf(&self, n_neg: usize) -> (Vec<C>, Vec<C>) {
        let mut neg = vec![ZERO; n_neg];
        for t in &self.terms {
            for (jj, c) in t.coeffs.iter().enumerate() {
                let j = jj + 1;
                // c z^-j (1 - p/z)^-j = c sum_i binom(j+i-1, i) p^i z^-(j+i)
                let mut pi = ONE;
                for i in 0.. {
                    let k = j + i;
                    if k > n_neg {
                        break;
                    }
                    neg[k - 1] += c * pi * binom(j + i - 1, i);
                    pi *= t.pole;
                }
            }
        }
        (self.poly.clone(), neg)
    }

    /// Product of two expansions (computed exactly from local data).
    pub fn mul(&self, o: &PoleExpansion) -> PoleExpansion {
        let mut out = PoleExpansion::zero();
        // Polynomial part.
        let da = self.poly.len();
        let db = o.poly.len();
        let (pa, na) = self.laurent_inf(db + 1);
        let (pb, nb) = o.laurent_inf(da + 1);
        let mut pp = poly::mul(&pa, &pb);
        if pa.is_empty() || pb.is_empty() {
            pp = vec![];
        }
        // P_a * N_b polynomial part: coefficient of z^d = sum_i Pa_i nb_{i-d-1}.
        let cross = |p: &[C], n: &[C]| -> Vec<C> {
            let mut r = vec![ZERO; p.len()];
            for d in 0..p.len() {
                for i in (d + 1)..p.len() {
                    if let Some(v) = n.get(i - d - 1) {
                        r[d] += p[i] * v;
                    }
                }
            }
            r
        };
        out.poly = poly::add(&poly::add(&pp, &cross(&pa, &nb)), &cross(&pb, &na));
        // Principal parts.
        let mut poles: Vec<C> = self.terms.iter().map(|t| t.pole).collect();
        for t in &o.terms {
            if !poles.iter().any(|p| same_pole(*p, t.pole)) {
                poles.push(t.pole);
            }
        }
        for p in poles {
            let mb0 = o.term_at(p).map_or(0, |t| t.coeffs.len());
            let (ma, va) = self.local(p, mb0.max(1));
            let (mb, vb) = o.local(p, ma.max(1));
            let m = ma + mb;
            let mut coeffs = vec![ZERO; m];
            // coefficient of s^-k, k = 1..m.
            for k in 1..=m {
                let mut acc = ZERO;
                for (i, a) in va.iter().enumerate() {
                    let pi = i as i64 - ma as i64;
                    let pj = -(k as i64) - pi;
                    let j = pj + mb as i64;
                    if j >= 0 && (j as usize) < vb.len() {
                        acc += a * vb[j as usize];
                    }
                }
                coeffs[k - 1] = acc;
            }
            while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
                coeffs.pop();
            }
            if coeffs.iter().any(|c| *c != ZERO) {
                out.terms.push(PoleTerm { pole: p, coeffs });
            }
        }
        out
    }

    /// `f^#(z) = conj f(1/z̄)` computed term by term.
    pub fn reflect(&self) -> PoleExpansion {
        let mut out = PoleExpansion::zero();
        if let Some(a0) = self.poly.first() {
            out.poly = vec![a0.conj()];
        }
        if self.poly.len() > 1 {
            let coeffs: Vec<C> = self.poly[1..].iter().map(|c| c.conj()).collect();
            out = out.add(&PoleExpansion::single(ZERO, coeffs));
        }
        for t in &self.terms {
            if t.pole == ZERO {
                let mut p = vec![ZERO];
                p.extend(t.coeffs.iter().map(|c| c.conj()));
                out = out.add(&PoleExpansion::polynomial(&p));
                continue;
            }
            // c/(z−p)^j ↦ c̄ z^j (1 − p̄z)^{-j} = c̄ (−p̄)^{-j} z^j (z − q)^{-j}, q = 1/p̄.
            let q = ONE / t.pole.conj();
            let mut pp = vec![ZERO; t.coeffs.len()];
            let mut cst = ZERO;
            for (jj, c) in t.coeffs.iter().enumerate() {
                let j = jj + 1;
                let k = c.conj() * (-t.pole.conj()).powi(-(j as i32));
                // z^j = Σ_i binom(j,i) q^{j−i} (z−q)^i
                for i in 0..j {
                    pp[j - i - 1] += k * binom(j, i) * q.powi((j - i) as i32);
                }
                cst += k;
            }
            out = out.add(&PoleExpansion::constant(cst));
            out = out.add(&PoleExpansion::single(q, pp));
        }
        out
    }

    /// Cauchy projection on the unit circle.
    pub fn project(&self, side: Side) -> Result<PoleExpansion> {
        let mut out = PoleExpansion::zero();
        if side == Side::Interior {
            out.poly = self.poly.clone();
        }
        for t in &self.terms {
            let r = t.pole.norm();
            if (r - 1.0).abs() <= CIRCLE_TOL {
                return Err(QuadError::PoleOnCircle(format!("{}", t.pole)));
            }
            let inside = r < 1.0;
            if (side == Side::Exterior) == inside {
                out.terms.push(t.clone());
            }
        }
        Ok(out)
    }

    /// Combine into a single quotient of polynomials.
    pub fn to_rational(&self) -> RationalFn {
        let mut den = vec![ONE];
        for t in &self.terms {
            den = poly::mul(&den, &poly::linear_power(t.pole, t.coeffs.len()));
        }
        let mut num = poly::mul(&self.poly, &den);
        if num.is_empty() {
            num = vec![ZERO];
        }
        for (i, t) in self.terms.iter().enumerate() {
            let mut others = vec![ONE];
            for (k, s) in self.terms.iter().enumerate() {
                if k != i {
                    others = poly::mul(&others, &poly::linear_power(s.pole, s.coeffs.len()));
                }
            }
            let m = t.coeffs.len();
            for (jj, c) in t.coeffs.iter().enumerate() {
                let j = jj + 1;
                let part = poly::mul(&others, &poly::linear_power(t.pole, m - j));
                num = poly::add(&num, &poly::scale(&part, *c));
            }
        }
        RationalFn::new(num, den).expect("product of linear factors is non-zero")
    }

    /// Remove numerically zero terms.
    pub fn cleaned(&self, tol: f64) -> PoleExpansion {
        let mut out = self.clone();
        let scale = self
            .terms
            .iter()
            .flat_map(|t| t.coeffs.iter())
            .chain(self.poly.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        out.poly = poly::trim(&self.poly, tol);
        if out.poly.len() == 1 && out.poly[0].norm() <= tol * scale {
            out.poly.clear();
        }
        for t in out.terms.iter_mut() {
            while t.coeffs.len() > 1 && t.coeffs.last().is_some_and(|c| c.norm() <= tol * scale) {
                t.coeffs.pop();
            }
        }
        out.terms.retain(|t| t.coeffs.iter().any(|c| c.norm() > tol * scale));
        out
    }

    /// Largest coefficient difference after aligning poles; poles that
    /// do not match contribute their full coefficients.
    pub fn distance(&self, o: &PoleExpansion) -> f64 {
        let mut d: f64 = 0.0;
        let n = self.poly.len().max(o.poly.len());
        for k in 0..n {
            let a = self.poly.get(k).copied().unwrap_or(ZERO);
            let b = o.poly.get(k).copied().unwrap_or(ZERO);
            d = d.max((a - b).norm());
        }
        for t in &self.terms {
            let other = o
                .terms
                .iter()
                .find(|s| (s.pole - t.pole).norm() <= 1e-8 * (1.0 + t.pole.norm()));
            let oc = other.map(|s| s.coeffs.clone()).unwrap_or_default();
            let m = t.coeffs.len().max(oc.len());
            for k in 0..m {
                let a = t.coeffs.get(k).copied().unwrap_or(ZERO);
                let b = oc.get(k).copied().unwrap_or(ZERO);
                d = d.max((a - b).norm());
            }
            if other.is_some() {
                d = d.max((other.unwrap().pole - t.pole).norm());
            }
        }
        for s in &o.terms {
            let matched = self
                .terms
                .iter()
                .any(|t| (s.pole - t.pole).norm() <= 1e-8 * (1.0 + t.pole.norm()));
            if !matched {
                for c in &s.coeffs {
                    d = d.max(c.norm());
                }
            }
        }
        d
    }
}

/// Partial fraction decomposition via the global root finder.
pub fn partial_fractions(f: &RationalFn) -> Result<PoleExpansion> {
    let (q, _r) = poly::divmod(&f.num, &f.den);
    let mut pe = PoleExpansion::zero();
    if f.deg_num() >= f.deg_den() {
        pe.poly = poly::trim(&q, 0.0);
    }
    if f.deg_den() == 0 {
        return Ok(pe);
    }
    let groups = poly::roots_with_multiplicity(&f.den);
    let lead = *f.den.last().unwrap();
    for (i, (p, m)) in groups.iter().enumerate() {
        let mut qd = vec![lead];
        for (k, (r, mk)) in groups.iter().enumerate() {
            if k != i {
                qd = poly::mul(&qd, &poly::linear_power(*r, *mk));
            }
        }
        let a = Series::from_coeffs(&poly::taylor_shift(&f.num, *p), *m);
        let b = Series::from_coeffs(&poly::taylor_shift(&qd, *p), *m);
        let t = a.div(&b);
        let coeffs: Vec<C> = (0..*m).map(|j| t.coeff(m - 1 - j)).collect();
        pe.terms.push(PoleTerm { pole: *p, coeffs });
    }
    // Reconstruction check at a few points away from the poles.
    let scale_r = 1.0 + groups.iter().map(|(p, _)| p.norm()).fold(0.0, f64::max);
    for k in 0..6 {
        let z = C::from_polar(scale_r * (1.3 + 0.17 * k as f64), 0.7 + 1.1 * k as f64);
        let a = f.eval(z);
        let b = pe.eval(z);
        if (a - b).norm() > 1e-7 * (1.0 + a.norm()) {
            return Err(QuadError::NearMultiplePole(format!(
                "reconstruction error {:e} at {z}",
                (a - b).norm()
            )));
        }
    }
    Ok(pe)
}

/// Cauchy projection of a rational function with no poles on the circle.
pub fn cauchy_project_circle(f: &RationalFn, side: Side) -> Result<RationalFn> {
    let pe = partial_fractions(f)?;
    Ok(pe.project(side)?.to_rational())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn expansion_reflection_matches_pointwise() {
        let f = PoleExpansion {
            poly: vec![C::new(0.5, 0.1), C::new(1.0, -0.3), C::new(0.2, 0.0)],
            terms: vec![
                PoleTerm { pole: C::new(0.3, 1.4), coeffs: vec![C::new(1.0, 0.5), C::new(-0.2, 0.7)] },
                PoleTerm { pole: ZERO, coeffs: vec![C::new(0.0, 1.0), C::new(0.4, 0.0)] },
            ],
        };
        let g = f.reflect();
        for z in [C::new(0.7, 0.2), C::new(-1.3, 0.9), C::new(2.0, -0.5)] {
            let want = f.eval(ONE / z.conj()).conj();
            assert!((g.eval(z) - want).norm() < 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn reflect_examples() {
        let z = RationalFn::polynomial(&[ZERO, ONE]);
        let r = reflect(&z);
        assert!((r.eval(c(2.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
        let f = RationalFn::new(vec![c(0.5, 0.2), c(1.0, 1.0), c(2.0, 0.0)], vec![ZERO, ONE]).unwrap();
        let g = reflect(&f);
        let z0 = c(0.3, 0.8);
        let expect = f.eval(ONE / z0.conj()).conj();
        assert!((g.eval(z0) - expect).norm() < 1e-13);
    }

    #[test]
    fn partial_fractions_symmetric() {
        let f = RationalFn::new(vec![ONE], vec![c(-1.0, 0.0), ZERO, ONE]).unwrap();
        let pe = partial_fractions(&f).unwrap();
        assert_eq!(pe.terms.len(), 2);
        for t in &pe.terms {
            let expect = if t.pole.re > 0.0 { 0.5 } else { -0.5 };
            assert!((t.coeffs[0] - c(expect, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn projection_of_inverse_z_is_zero_inside() {
        let f = RationalFn::new(vec![ONE], vec![ZERO, ONE]).unwrap();
        let p = cauchy_project_circle(&f, Side::Interior).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn projection_example_from_direct_problem() {
        let g = c(0.5, 0.0);
        // (1 - g/z)(1 - conj(g) z) = (z - g)(1 - conj(g) z)/z
        let num = poly::mul(&[-g, ONE], &[ONE, -g.conj()]);
        let f = RationalFn::new(num, vec![ZERO, ONE]).unwrap();
        let p = cauchy_project_circle(&f, Side::Interior).unwrap();
        let z0 = c(0.2, 0.3);
        let expect = ONE + g.norm_sqr() - g.conj() * z0;
        assert!((p.eval(z0) - expect).norm() < 1e-13);
    }

    #[test]
    fn laurent_examples() {
        let f = RationalFn::new(vec![ZERO, ZERO, ONE], vec![-ONE, ONE]).unwrap();
        let l = laurent_at_infinity(&f, 5);
        for v in l {
            assert!((v - ONE).norm() < 1e-14);
        }
    }

    #[test]
    fn pole_expansion_product() {
        let a = PoleExpansion { poly: vec![ONE, c(0.5, 0.0)], terms: vec![PoleTerm { pole: c(0.3, 0.1), coeffs: vec![c(1.0, 1.0), c(0.2, 0.0)] }] };
        let b = PoleExpansion { poly: vec![c(2.0, 0.0)], terms: vec![PoleTerm { pole: c(0.3, 0.1), coeffs: vec![c(0.5, 0.0)] }, PoleTerm { pole: c(-2.0, 0.0), coeffs: vec![ONE] }] };
        let p = a.mul(&b);
        for z in [c(1.1, 0.4), c(-0.7, 2.0), c(3.0, -1.0)] {
            let expect = a.eval(z) * b.eval(z);
            assert!((p.eval(z) - expect).norm() < 1e-12 * (1.0 + expect.norm()));
        }
    }
}
