//! Schwarz reflection dynamics: the principal Lambert W, the reflection
//! `σ = conj(φ^# ∘ ψ)`, escape-time grids and image export.

use std::f64::consts::{E, PI};
use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::maps::{MapKind, MapSpec, Orientation};

const ONE: C = C { re: 1.0, im: 0.0 };
const ZERO: C = C { re: 0.0, im: 0.0 };

/// Distance below the cut `(−∞, −1/e)` treated as lying on it.
pub const CUT_TOL: f64 = 1e-12;
/// Largest exponent real part whose exponential stays finite.
const EXP_LIMIT: f64 = 709.0;
/// Default iteration cap for escape-time grids.
pub const DEFAULT_MAX_ITER: usize = 100;

/// Principal branch `W₀` of the Lambert W function.
///
/// Real arguments on the cut take the limit from the upper half-plane;
/// arguments strictly below the cut within [`CUT_TOL`] are rejected.
pub fn lambert_w0(z: C) -> Result<C> {
    if !z.is_finite() {
        return Err(QuadError::NonFinite);
    }
    if z == ZERO {
        return Ok(ZERO);
    }
    let bp = -1.0 / E;
    if z.re < bp - CUT_TOL && z.im < 0.0 && z.im > -CUT_TOL {
        return Err(QuadError::BranchCut);
    }
    if (z - bp).norm() < 1e-15 {
        return Ok(C::new(-1.0, 0.0));
    }
    let mut best: Option<(C, f64)> = None;
    for seed in seeds(z) {
        if let Some(w) = halley(z, seed) {
            if !is_principal(w) {
                continue;
            }
            let res = (w * w.exp() - z).norm();
            if best.is_none_or(|(_, r)| res < r) {
                best = Some((w, res));
            }
            if res <= 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
    }
    best.map(|(w, _)| w).ok_or_else(|| QuadError::NewtonDivergence(format!("Lambert W at {z}")))
}

fn seeds(z: C) -> Vec<C> {
    // On the cut itself the principal value is the upper limit.
    let zz = if z.im == 0.0 && z.re < -1.0 / E { C::new(z.re, 0.0) } else { z };
    let p = (2.0 * (E * zz + 1.0)).sqrt();
    let branch = C::new(-1.0, 0.0) + p - p * p / 3.0 + p * p * p * (11.0 / 72.0);
    let small = zz - zz * zz + zz * zz * zz * 1.5;
    let l1 = zz.ln();
    let l2 = l1.ln();
    let asym = l1 - l2 + l2 / l1;
    let mid = (ONE + zz).ln();
    let mut out = vec![];
    if (E * zz + 1.0).norm() < 0.5 {
        out.push(branch);
    }
    if zz.norm() < 0.3 {
        out.push(small);
    }
    if zz.norm() > 3.0 {
        out.push(asym);
    }
    out.extend([mid, branch, asym, C::new(0.5, 0.5 * zz.im.signum())]);
    out
}

fn halley(z: C, mut w: C) -> Option<C> {
    if !w.is_finite() {
        return None;
    }
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            return None;
        }
        w -= step;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + w.norm()) {
            return Some(w);
        }
    }
    w.is_finite().then_some(w)
}

/// `W₀` takes values with `|Im W| < π` to the right of `x = −y cot y`;
/// the upper boundary arc belongs to it.
fn is_principal(w: C) -> bool {
    let y = w.im;
    if y.abs() >= PI {
        return false;
    }
    if y.abs() < 1e-300 {
        return w.re >= -1.0 - 1e-12;
    }
    w.re >= -y / y.tan() - 1e-9 * (1.0 + w.norm())
}

/// `z e^{1/z}` on the exterior disk: the teardrop with `h = 1`
/// in the log-weighted class.
pub fn teardrop() -> MapSpec {
    let r = crate::ratfun::RationalFn::new(vec![ONE], vec![ZERO, ONE]).expect("non-zero denominator");
    MapSpec::log(Orientation::Exterior, ONE, true, vec![], r).expect("valid teardrop map")
}

fn is_teardrop(m: &MapSpec) -> bool {
    m.kind == MapKind::Log
        && m.orientation == Orientation::Exterior
        && m.z_factor
        && m.blaschke.is_empty()
        && (m.prefactor - ONE).norm() < 1e-15
        && [C::new(2.0, 0.5), C::new(-0.7, 3.0)].iter().all(|&z| (m.r.eval(z) - ONE / z).norm() < 1e-15)
}

/// Closed-form teardrop reflection
/// `σ(w) = w̄^{−1} e^{−W(−w̄^{−1}) − W(−w̄^{−1})^{−1}}`.
pub fn teardrop_reflect(w: C) -> Result<C> {
    if w == ZERO || !w.is_finite() {
        return Err(QuadError::OutsideClosure);
    }
    let u = -ONE / w.conj();
    let big_w = lambert_w0(u).map_err(|_| QuadError::BranchCut)?;
    if big_w.norm() > 1.0 + 1e-9 {
        return Err(QuadError::OutsideClosure);
    }
    let ex = -big_w - ONE / big_w;
    if ex.re > EXP_LIMIT {
        return Err(QuadError::NonFinite);
    }
    Ok(-u * ex.exp())
}

/// `w ∈ Cl(Ω)` for the teardrop: the principal `W(−1/w)` lies in the
/// closed unit disk.
fn teardrop_contains(w: C) -> bool {
    if w == ZERO || !w.is_finite() {
        return false;
    }
    match lambert_w0(-ONE / w) {
        Ok(v) => v.norm() <= 1.0,
        Err(_) => false,
    }
}

/// `σ(w) = conj(φ^#(ψ(w))) = φ(1/conj(ψ(w)))` on `Cl(Ω)`.
pub fn schwarz_reflect(m: &MapSpec, w: C) -> Result<C> {
    if is_teardrop(m) {
        return teardrop_reflect(w);
    }
    general_reflect(m, w)
}

/// The composition path `conj ∘ φ^# ∘ ψ`, valid for any map.
pub fn general_reflect(m: &MapSpec, w: C) -> Result<C> {
    let z = match m.eval_inverse(w, None) {
        Ok(z) => z,
        Err(QuadError::NoPreimage(_)) => return Err(QuadError::OutsideClosure),
        Err(e) => return Err(e),
    };
    let v = m.reflect_eval(z).conj();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::NonFinite)
    }
}

/// Membership in `Cl(Ω)`; the generic test counts preimages by the
/// argument principle, boundary points counting as members.
pub fn in_closure(m: &MapSpec, w: C) -> bool {
    if is_teardrop(m) {
        return teardrop_contains(w);
    }
    match m.preimage_count(w) {
        Ok(n) => n > 0,
        Err(_) => true,
    }
}

/// Rectangle in the `w`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: C,
    pub hi: C,
}

impl Region {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) {
            return Err(QuadError::InvalidInput("region corners must satisfy x0 < x1, y0 < y1".into()));
        }
        Ok(Region { lo: C::new(x0, y0), hi: C::new(x1, y1) })
    }

    /// Centre of pixel `(i, j)`, row `0` at the top.
    pub fn pixel(&self, i: usize, j: usize, nx: usize, ny: usize) -> C {
        let dx = (self.hi.re - self.lo.re) / nx as f64;
        let dy = (self.hi.im - self.lo.im) / ny as f64;
        C::new(self.lo.re + (i as f64 + 0.5) * dx, self.hi.im - (j as f64 + 0.5) * dy)
    }
}

/// Escape record of one pixel. For non-escaping pixels `iterations` is
/// the step at which the orbit was classified: `max_iter`, or earlier when
/// the orbit left the floating-point range inside `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pixel {
    pub escaped: bool,
    pub iterations: u32,
    /// The orbit hit an evaluation error such as the Lambert branch cut.
    pub fault: bool,
}

/// Row-major escape-time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeGrid {
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
    pub max_iter: usize,
    pub data: Vec<Pixel>,
}

impl EscapeGrid {
    fn build<F>(region: Region, nx: usize, ny: usize, max_iter: usize, f: F) -> Result<Self>
    where
        F: Fn(C) -> Pixel + Sync,
    {
        if nx == 0 || ny == 0 {
            return Err(QuadError::InvalidInput("resolution must be positive".into()));
        }
        let mut data = vec![Pixel { escaped: false, iterations: 0, fault: false }; nx * ny];
        data.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            for (i, px) in row.iter_mut().enumerate() {
                *px = f(region.pixel(i, j, nx, ny));
            }
        });
        Ok(EscapeGrid { region, nx, ny, max_iter, data })
    }

    pub fn get(&self, i: usize, j: usize) -> Pixel {
        self.data[j * self.nx + i]
    }

    pub fn escaped_count(&self) -> usize {
        self.data.iter().filter(|p| p.escaped).count()
    }

    pub fn fault_count(&self) -> usize {
        self.data.iter().filter(|p| p.fault).count()
    }

    pub fn escape_fraction(&self) -> f64 {
        self.escaped_count() as f64 / self.data.len() as f64
    }

    fn rgb(&self, p: Pixel) -> [u8; 3] {
        if p.fault {
            return [200, 30, 30];
        }
        if !p.escaped {
            return [0, 0, 0];
        }
        let s = (p.iterations as f64 + 1.0).ln() / (self.max_iter as f64 + 1.0).ln();
        let v = |x: f64| (255.0 * x.clamp(0.0, 1.0)) as u8;
        [v(1.0 - 0.6 * s), v(1.0 - 0.3 * s), v(1.0 - 0.05 * s)]
    }

    pub fn to_rgb(&self) -> Vec<u8> {
        self.data.iter().flat_map(|p| self.rgb(*p)).collect()
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        out.extend(self.to_rgb());
        out
    }

    pub fn write_ppm(&self, path: &Path) -> std::io::Result<()> {
        std::fs::File::create(path)?.write_all(&self.to_ppm())
    }

    pub fn write_png(&self, path: &Path) -> image::ImageResult<()> {
        image::save_buffer(path, &self.to_rgb(), self.nx as u32, self.ny as u32, image::ExtendedColorType::Rgb8)
    }
}

/// Iterate `σ` from each pixel until the orbit leaves `Cl(Ω)`.
pub fn escape_grid(m: &MapSpec, region: Region, nx: usize, ny: usize, max_iter: usize) -> Result<EscapeGrid> {
    let teardrop = is_teardrop(m);
    EscapeGrid::build(region, nx, ny, max_iter, |w0| {
        let contains = |w: C| if teardrop { teardrop_contains(w) } else { in_closure(m, w) };
        let reflect = |w: C| if teardrop { teardrop_reflect(w) } else { general_reflect(m, w) };
        let mut w = w0;
        for n in 0..max_iter {
            if !contains(w) {
                return Pixel { escaped: true, iterations: n as u32, fault: false };
            }
            match reflect(w) {
                Ok(v) if v.is_finite() => w = v,
                Ok(_) | Err(QuadError::NonFinite) => return Pixel { escaped: false, iterations: n as u32, fault: false },
                Err(_) => return Pixel { escaped: false, iterations: n as u32, fault: true },
            }
        }
        Pixel { escaped: false, iterations: max_iter as u32, fault: false }
    })
}

/// Escape-time grid of `w ↦ e^{w̄ − 1}`, escape meaning `Re w > escape_radius`.
pub fn antiholo_exp_julia(region: Region, nx: usize, ny: usize, max_iter: usize, escape_radius: f64) -> Result<EscapeGrid> {
    if !(escape_radius >= 50.0) {
        return Err(QuadError::InvalidInput("escape radius must be at least 50".into()));
    }
    EscapeGrid::build(region, nx, ny, max_iter, |w0| {
        let mut w = w0;
        for n in 0..max_iter {
            if w.re > escape_radius {
                return Pixel { escaped: true, iterations: n as u32, fault: false };
            }
            w = (w.conj() - 1.0).exp();
            if !w.is_finite() {
                return Pixel { escaped: true, iterations: n as u32 + 1, fault: false };
            }
        }
        Pixel { escaped: false, iterations: max_iter as u32, fault: false }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn lambert_reference_values() {
        // Reference values computed with mpmath at 30 digits.
        let cases = [
            (c(-1.0, 0.0), c(-0.31813150520476414, 1.3372357014306894)),
            (c(-0.3, 0.1), c(-0.3922929852484035, 0.255_452_841_971_163_9)),
            (c(2.0, 3.0), c(1.0900765344857908, 0.5301397207748388)),
            (c(-100.0, 1e-3), c(3.2053818273322684, 2.4825822951970578)),
            (c(1e5, -2e4), c(9.302_110_928_845_513, -0.178_236_986_104_375_3)),
            (c(-0.36, 0.001), c(-0.805_675_937_307_032_9, 0.011520797151639306)),
            (c(0.01, -0.02), c(0.010283706766601406, -0.019_597_619_796_202_63)),
            (c(-2.0, -1e-6), c(0.17281620319885742, -1.6736860541399617)),
        ];
        for (z, want) in cases {
            let w = lambert_w0(z).unwrap();
            assert!((w - want).norm() < 1e-13 * (1.0 + want.norm()), "{z}: {w} vs {want}");
        }
    }

    #[test]
    fn lambert_trivial_points() {
        assert_eq!(lambert_w0(ZERO).unwrap(), ZERO);
        assert!((lambert_w0(c(E, 0.0)).unwrap() - ONE).norm() < 1e-15);
        assert!((lambert_w0(c(-1.0 / E, 0.0)).unwrap() + ONE).norm() < 1e-7);
        assert_eq!(lambert_w0(c(-2.0, -1e-14)), Err(QuadError::BranchCut));
    }

    #[test]
    fn disk_exterior_reflection() {
        let r = 1.5;
        let m = MapSpec::rational(crate::ratfun::RationalFn::polynomial(&[ZERO, c(r, 0.0)]), Orientation::Exterior).unwrap();
        for w in [c(2.0, 0.0), c(-1.0, 3.0), c(0.3, -1.6)] {
            assert!((schwarz_reflect(&m, w).unwrap() - r * r / w.conj()).norm() < 1e-12);
        }
        assert_eq!(schwarz_reflect(&m, c(0.5, 0.0)), Err(QuadError::OutsideClosure));
        let g = escape_grid(&m, Region::new(-3.0, -3.0, 3.0, 3.0).unwrap(), 24, 24, 10).unwrap();
        for p in &g.data {
            assert!(p.escaped && p.iterations <= 1);
        }
    }

    #[test]
    fn teardrop_boundary_fixed_and_paths_agree() {
        let m = teardrop();
        for k in 1..64 {
            let z = C::from_polar(1.0, 2.0 * PI * k as f64 / 64.0);
            let w = m.eval(z);
            assert!((schwarz_reflect(&m, w).unwrap() - w).norm() < 1e-8);
        }
        // mpmath value of the closed form at w = 3.
        let s3 = schwarz_reflect(&m, c(3.0, 0.0)).unwrap();
        assert!((s3 - c(3.113_657_091_002_441, 0.0)).norm() < 1e-12);
        for w in [c(3.0, 0.0), c(-2.0, 1.0), c(0.5, 2.5)] {
            assert!((teardrop_reflect(w).unwrap() - general_reflect(&m, w).unwrap()).norm() < 1e-10);
        }
        assert!(!in_closure(&m, c(1.0, 0.0)));
        assert!(in_closure(&m, c(-2.0, 0.0)));
    }

    #[test]
    fn exp_julia_basics() {
        let g = antiholo_exp_julia(Region::new(0.99, -0.01, 1.01, 0.01).unwrap(), 1, 1, 50, 50.0).unwrap();
        assert!(!g.data[0].escaped);
        let g = antiholo_exp_julia(Region::new(99.0, -1.0, 101.0, 1.0).unwrap(), 1, 1, 50, 50.0).unwrap();
        assert!(g.data[0].escaped && g.data[0].iterations <= 2);
    }

    #[test]
    fn grids_are_deterministic_and_exported() {
        let m = teardrop();
        let reg = Region::new(-3.0, -3.0, 3.0, 3.0).unwrap();
        let a = escape_grid(&m, reg, 40, 31, 30).unwrap();
        let b = escape_grid(&m, reg, 40, 31, 30).unwrap();
        assert_eq!(a, b);
        // The centre row is the real axis, where orbits right of the cusp
        // run off to infinity inside the domain.
        assert!(!a.get(39, 15).escaped && !a.get(39, 15).fault);
        assert!(a.get(0, 0).escaped);
        let ppm = a.to_ppm();
        assert_eq!(ppm.len(), "P6\n40 31\n255\n".len() + 40 * 31 * 3);
    }
}
