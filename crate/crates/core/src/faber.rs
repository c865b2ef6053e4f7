//! Interior and exterior Faber transforms of rational functions by
//! residues, their inverses, and the Faber polynomials `F_n`, `W_n`.

use crate::error::{QuadError, Result};
use crate::maps::{MapSpec, Orientation};
use crate::poly;
use crate::ratfun::{PoleExpansion, PoleTerm, RationalFn};
use crate::series::Series;
use num_complex::Complex64;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Highest pole order handled by the residue formula.
pub const MAX_ORDER: usize = 8;
/// Highest Faber polynomial degree.
pub const MAX_DEGREE: usize = 16;

/// Transform direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Which Faber polynomial family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// `F_n`, the polynomial part of `ψ^n`.
    Forward,
    /// `W_n`, the polynomial part of `φ^n`.
    Inverse,
}

/// What the residue formulae need from a map: Taylor jets at finite
/// points, the expansion `t φ(1/t)` at infinity and the domain side.
pub trait LocalMap {
    fn jet(&self, z: C, n: usize) -> Series;
    fn exterior(&self) -> bool;
    fn in_domain(&self, z: C, tol: f64) -> bool;
    /// `g(t) = t φ(1/t)` for exterior maps.
    fn g_at_infinity(&self, n: usize) -> Result<Series>;
}

impl LocalMap for MapSpec {
    fn jet(&self, z: C, n: usize) -> Series {
        MapSpec::jet(self, z, n)
    }
    fn exterior(&self) -> bool {
        self.orientation == Orientation::Exterior
    }
    fn in_domain(&self, z: C, tol: f64) -> bool {
        MapSpec::in_domain(self, z, tol)
    }
    fn g_at_infinity(&self, n: usize) -> Result<Series> {
        exterior_g(self, n)
    }
}

/// A rational map held as a pole expansion.
#[derive(Debug, Clone)]
pub struct PeMap {
    pub pe: PoleExpansion,
    pub exterior: bool,
}

impl LocalMap for PeMap {
    fn jet(&self, z: C, n: usize) -> Series {
        self.pe.taylor(z, n)
    }
    fn exterior(&self) -> bool {
        self.exterior
    }
    fn in_domain(&self, z: C, tol: f64) -> bool {
        if self.exterior {
            z.norm() >= 1.0 - tol
        } else {
            z.norm() <= 1.0 + tol
        }
    }
    fn g_at_infinity(&self, n: usize) -> Result<Series> {
        if !self.exterior {
            return Err(QuadError::InteriorContextUnsupported);
        }
        let p = poly::trim(&self.pe.poly, 0.0);
        if p.len() != 2 {
            return Err(QuadError::InvalidInput("exterior map without a simple pole at infinity".into()));
        }
        let (_, neg) = self.pe.laurent_inf(n.saturating_sub(2));
        let mut v = vec![p[1], p[0]];
        v.extend(neg);
        Ok(Series::from_coeffs(&v, n))
    }
}

/// A map together with a transform direction.
#[derive(Debug, Clone)]
pub struct FaberContext {
    pub map: MapSpec,
    pub direction: Direction,
}

/// Push a principal part at `z0` through a local map with jet `jet`
/// (Taylor coefficients of the map at `z0`): the residue formula
/// `Σ_m [s^{j−1}](f'(z0+s) δ(s)^m) / (w − f(z0))^{m+1}`.
pub fn push_term(coeffs: &[C], jet: &Series) -> Vec<C> {
    let m = coeffs.len();
    let d = jet.derivative();
    let mut delta = jet.clone();
    delta.0[0] = ZERO;
    let mut out = vec![ZERO; m];
    // prod = φ'(z0+s) δ(s)^k
    let mut prod = d.clone();
    for k in 0..m {
        for (jj, c) in coeffs.iter().enumerate() {
            // term c/(z−z0)^{jj+1} contributes [s^jj](prod)
            if jj >= k {
                out[k] += c * prod.coeff(jj);
            }
        }
        prod = &prod * &delta;
    }
    while out.len() > 1 && out.last() == Some(&ZERO) {
        out.pop();
    }
    out
}

/// Forward transform of a pole expansion.
pub fn transform_pe<M: LocalMap + ?Sized>(map: &M, f: &PoleExpansion) -> Result<PoleExpansion> {
    let mut out = PoleExpansion::zero();
    let poly_part = poly::trim(&f.poly, 0.0);
    let has_poly = !poly::is_zero(&poly_part);
    if has_poly {
        match map.exterior() {
            false => {
                return Err(QuadError::PoleMisplaced(
                    "interior transform needs a function vanishing at infinity".into(),
                ))
            }
            true => {
                let deg = poly::degree(&poly_part);
                let table = faber_polys(map, deg, Which::Forward)?;
                let mut acc = vec![ZERO];
                for (n, a) in poly_part.iter().enumerate() {
                    acc = poly::add(&acc, &poly::scale(&table[n], *a));
                }
                out.poly = acc;
            }
        }
    }
    for t in &f.terms {
        if t.coeffs.len() > MAX_ORDER {
            return Err(QuadError::DerivativeOrderOverflow(t.coeffs.len()));
        }
        if !map.in_domain(t.pole, -1e-12) {
            return Err(QuadError::PoleMisplaced(format!("pole {} outside the map domain", t.pole)));
        }
        let jet = map.jet(t.pole, t.coeffs.len() + 1);
        let coeffs = push_term(&t.coeffs, &jet);
        let image = jet.coeff(0);
        out = out.add(&PoleExpansion::single(image, coeffs));
    }
    Ok(out)
}

/// Inverse transform given the preimages `zs[i] = ψ(g.terms[i].pole)`.
pub fn inverse_pe_with_preimages<M: LocalMap + ?Sized>(map: &M, g: &PoleExpansion, zs: &[C]) -> Result<PoleExpansion> {
    let mut out = PoleExpansion::zero();
    let poly_part = poly::trim(&g.poly, 0.0);
    if !poly::is_zero(&poly_part) {
        match map.exterior() {
            false => {
                return Err(QuadError::PoleMisplaced(
                    "interior inverse transform needs a function vanishing at infinity".into(),
                ))
            }
            true => {
                let deg = poly::degree(&poly_part);
                let table = faber_polys(map, deg, Which::Inverse)?;
                let mut acc = vec![ZERO];
                for (n, a) in poly_part.iter().enumerate() {
                    acc = poly::add(&acc, &poly::scale(&table[n], *a));
                }
                out.poly = acc;
            }
        }
    }
    for (t, z) in g.terms.iter().zip(zs.iter()) {
        if t.coeffs.len() > MAX_ORDER {
            return Err(QuadError::DerivativeOrderOverflow(t.coeffs.len()));
        }
        let n = t.coeffs.len() + 1;
        let jet = map.jet(*z, n);
        let mut delta = jet.clone();
        delta.0[0] = ZERO;
        let mut psi = delta.revert();
        psi.0[0] = *z;
        let coeffs = push_term(&t.coeffs, &psi);
        out = out.add(&PoleExpansion::single(*z, coeffs));
    }
    Ok(out)
}

/// Inverse transform; preimages computed with `eval_inverse`.
pub fn inverse_pe(map: &MapSpec, g: &PoleExpansion) -> Result<PoleExpansion> {
    let mut zs = Vec::with_capacity(g.terms.len());
    for t in &g.terms {
        zs.push(map.eval_inverse(t.pole, None)?);
    }
    inverse_pe_with_preimages(map, g, &zs)
}

/// `Φ_φ(f)` for a rational `f`.
pub fn faber_transform(ctx: &FaberContext, f: &RationalFn) -> Result<RationalFn> {
    let pe = f.partial_fractions()?;
    let r = match ctx.direction {
        Direction::Forward => transform_pe(&ctx.map, &pe)?,
        Direction::Inverse => inverse_pe(&ctx.map, &pe)?,
    };
    Ok(r.to_rational())
}

/// `Φ_φ^{-1}(g)` for a rational `g`.
pub fn inverse_faber_transform(ctx: &FaberContext, g: &RationalFn) -> Result<RationalFn> {
    let pe = g.partial_fractions()?;
    Ok(inverse_pe(&ctx.map, &pe)?.to_rational())
}

/// `g(t) = t φ(1/t)` for an exterior map.
fn exterior_g(map: &MapSpec, n: usize) -> Result<Series> {
    if map.orientation != Orientation::Exterior {
        return Err(QuadError::InteriorContextUnsupported);
    }
    let (val, s) = map.at_infinity(n)?;
    if val != -1 {
        return Err(QuadError::InvalidInput("exterior map without a simple pole at infinity".into()));
    }
    Ok(s)
}

/// Faber polynomials of degrees `0..=n` (ascending coefficients).
pub fn faber_polys<M: LocalMap + ?Sized>(map: &M, n: usize, which: Which) -> Result<Vec<Vec<C>>> {
    if n > MAX_DEGREE {
        return Err(QuadError::InvalidInput(format!("Faber degree {n} exceeds {MAX_DEGREE}")));
    }
    let one = C::new(1.0, 0.0);
    if n == 0 {
        return Ok(vec![vec![one]]);
    }
    let len = n + 2;
    let g = map.g_at_infinity(len)?;
    let base = match which {
        Which::Inverse => g,
        Which::Forward => {
            // s = t/g(t); T(s) its reversion; ψ^n = s^{-n} (T/s)^{-n}.
            let sig = g.recip().shift_up(1);
            let t = Series::from_coeffs(&sig.0, len + 1).revert();
            let ts = t.shift_down(1).truncate(len);
            ts.recip()
        }
    };
    let mut out = Vec::with_capacity(n + 1);
    let mut pw = Series::constant(one, len);
    for m in 0..=n {
        // coefficient of z^{m−k} is [t^k] base^m
        let mut p = vec![ZERO; m + 1];
        for k in 0..=m {
            p[m - k] = pw.coeff(k);
        }
        out.push(p);
        pw = &pw * &base;
    }
    Ok(out)
}

/// A single Faber polynomial.
pub fn faber_polynomial(ctx: &FaberContext, n: usize, which: Which) -> Result<RationalFn> {
    if ctx.map.orientation == Orientation::Interior {
        if n == 0 {
            return Ok(RationalFn::constant(C::new(1.0, 0.0)));
        }
        return Err(QuadError::InteriorContextUnsupported);
    }
    let t = faber_polys(&ctx.map, n, which)?;
    Ok(RationalFn::polynomial(&t[n]))
}

/// Principal parts of `f` pushed through the map, keeping the coefficient
/// layout (used by tests and solvers that need the raw term list).
pub fn pushed_terms<M: LocalMap + ?Sized>(map: &M, terms: &[PoleTerm]) -> Result<Vec<PoleTerm>> {
    let pe = transform_pe(map, &PoleExpansion { poly: vec![], terms: terms.to_vec() })?;
    Ok(pe.terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn cardioid() -> MapSpec {
        MapSpec::rational(RationalFn::polynomial(&[ZERO, c(1.0, 0.0), c(0.5, 0.0)]), Orientation::Interior)
            .unwrap()
    }

    #[test]
    fn simple_pole_image() {
        let m = cardioid();
        let z0 = c(0.2, 0.1);
        let f = PoleExpansion::single(z0, vec![c(1.0, 0.0)]);
        let g = transform_pe(&m, &f).unwrap();
        let w = c(3.0, 2.0);
        let expect = m.derivative(z0) / (w - m.eval(z0));
        assert!((g.eval(w) - expect).norm() < 1e-14);
    }

    #[test]
    fn double_pole_formula() {
        let m = cardioid();
        let z0 = c(0.2, 0.1);
        let f = PoleExpansion::single(z0, vec![ZERO, c(1.0, 0.0)]);
        let g = transform_pe(&m, &f).unwrap();
        let w = c(3.0, 2.0);
        let j = m.jet(z0, 3);
        let u = w - j.coeff(0);
        let expect = j.coeff(2) * 2.0 / u + j.coeff(1) * j.coeff(1) / (u * u);
        assert!((g.eval(w) - expect).norm() < 1e-13);
    }

    #[test]
    fn inverse_round_trip() {
        let m = cardioid();
        let f = PoleExpansion::single(c(0.3, -0.2), vec![c(1.0, 0.5), c(0.2, 0.0)]);
        let g = transform_pe(&m, &f).unwrap();
        let back = inverse_pe(&m, &g).unwrap();
        assert!(back.distance(&f) < 1e-10);
    }

    #[test]
    fn faber_polynomials_low_degree() {
        // φ = c z + f0 + f1/z
        let (cc, f0, f1) = (c(1.5, 0.0), c(0.3, 0.2), c(-0.4, 0.1));
        let phi = RationalFn::new(vec![f1, f0, cc], vec![ZERO, c(1.0, 0.0)]).unwrap();
        let m = MapSpec::rational(phi, Orientation::Exterior).unwrap();
        let w = faber_polys(&m, 2, Which::Inverse).unwrap();
        let w2 = [f0 * f0 + cc * f1 * 2.0, cc * f0 * 2.0, cc * cc];
        for k in 0..3 {
            assert!((w[2][k] - w2[k]).norm() < 1e-13);
        }
        let f = faber_polys(&m, 2, Which::Forward).unwrap();
        let f1e = [-f0 / cc, c(1.0, 0.0) / cc];
        for k in 0..2 {
            assert!((f[1][k] - f1e[k]).norm() < 1e-13);
        }
        let f2 = [(f0 * f0 - cc * f1 * 2.0) / (cc * cc), -f0 * 2.0 / (cc * cc), c(1.0, 0.0) / (cc * cc)];
        for k in 0..3 {
            assert!((f[2][k] - f2[k]).norm() < 1e-13);
        }
    }
}
