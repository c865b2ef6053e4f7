//! Dense complex polynomials in ascending order and the Aberth–Ehrlich
//! simultaneous root finder.

use num_complex::Complex64;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Convergence tolerance of the Aberth iteration (relative step size).
pub const ABERTH_TOL: f64 = 1e-13;
/// Roots closer than this (relative) are merged into one multiple root.
pub const CLUSTER_RADIUS: f64 = 1e-7;

pub fn eval(p: &[C], z: C) -> C {
    let mut acc = ZERO;
    for c in p.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

pub fn degree(p: &[C]) -> usize {
    p.len().saturating_sub(1)
}

/// Drop leading coefficients that are negligible relative to the largest.
pub fn trim(p: &[C], rel: f64) -> Vec<C> {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut v = p.to_vec();
    while v.len() > 1 && v.last().is_some_and(|c| c.norm() <= rel * scale) {
        v.pop();
    }
    if v.is_empty() {
        v.push(ZERO);
    }
    v
}

pub fn is_zero(p: &[C]) -> bool {
    p.iter().all(|c| *c == ZERO)
}

pub fn add(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(ZERO) + b.get(k).copied().unwrap_or(ZERO))
        .collect()
}

pub fn sub(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(ZERO) - b.get(k).copied().unwrap_or(ZERO))
        .collect()
}

pub fn scale(a: &[C], s: C) -> Vec<C> {
    a.iter().map(|c| c * s).collect()
}

pub fn mul(a: &[C], b: &[C]) -> Vec<C> {
    if a.is_empty() || b.is_empty() {
        return vec![ZERO];
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn derivative(p: &[C]) -> Vec<C> {
    if p.len() <= 1 {
        return vec![ZERO];
    }
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

/// `(z - r)^m` expanded.
pub fn linear_power(r: C, m: usize) -> Vec<C> {
    let mut out = vec![ONE];
    for _ in 0..m {
        out = mul(&out, &[-r, ONE]);
    }
    out
}

pub fn from_roots(roots: &[C]) -> Vec<C> {
    let mut out = vec![ONE];
    for r in roots {
        out = mul(&out, &[-r, ONE]);
    }
    out
}

/// Taylor coefficients of `p` about `z0`: `p(z0 + s) = sum q_k s^k`.
pub fn taylor_shift(p: &[C], z0: C) -> Vec<C> {
    let mut q = p.to_vec();
    let n = q.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = q[j + 1] * z0;
            q[j] += t;
        }
    }
    q
}

/// Polynomial long division `a = q b + r`, `deg r < deg b`.
pub fn divmod(a: &[C], b: &[C]) -> (Vec<C>, Vec<C>) {
    let b = trim(b, 0.0);
    let db = degree(&b);
    let lead = b[db];
    if a.len() <= db {
        return (vec![ZERO], a.to_vec());
    }
    let mut r = a.to_vec();
    let mut q = vec![ZERO; a.len() - db];
    for k in (0..q.len()).rev() {
        let coef = r[k + db] / lead;
        q[k] = coef;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= coef * bj;
        }
    }
    r.truncate(db.max(1));
    if db == 0 {
        r = vec![ZERO];
    }
    (q, r)
}

/// Divide by `(z - root)`, discarding the remainder.
pub fn deflate(p: &[C], root: C) -> Vec<C> {
    let n = p.len();
    if n <= 1 {
        return vec![ZERO];
    }
    let mut q = vec![ZERO; n - 1];
    let mut acc = p[n - 1];
    for k in (0..n - 1).rev() {
        q[k] = acc;
        acc = p[k] + acc * root;
    }
    q
}

/// All complex roots by Aberth–Ehrlich iteration.  Exact zero roots are
/// split off first; the remaining roots are polished by Newton's method
/// where the derivative is well conditioned.
pub fn roots(p: &[C]) -> Vec<C> {
    let p = trim(p, 1e-15);
    let mut out = Vec::new();
    let mut start = 0;
    while start < p.len() - 1 && p[start] == ZERO {
        out.push(ZERO);
        start += 1;
    }
    let q: Vec<C> = p[start..].to_vec();
    let n = degree(&q);
    if n == 0 {
        return out;
    }
    if n == 1 {
        out.push(-q[0] / q[1]);
        return out;
    }
    let dq = derivative(&q);
    // Initial guesses on a circle sized by the Fujiwara-type bound.
    let lead = q[n].norm();
    let mut radius: f64 = 0.0;
    for k in 0..n {
        let r = (q[k].norm() / lead).powf(1.0 / (n - k) as f64);
        radius = radius.max(r);
    }
    let radius = radius.max(1e-3);
    let mut z: Vec<C> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            C::from_polar(radius * 0.5 + 0.5 * radius * (k as f64 / n as f64), th)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..800 {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let pv = eval(&q, z[i]);
            if pv == ZERO {
                done[i] = true;
                continue;
            }
            let ratio = pv / eval(&dq, z[i]);
            let mut s = ZERO;
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d != ZERO {
                        s += ONE / d;
                    }
                }
            }
            let step = ratio / (ONE - ratio * s);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= ABERTH_TOL * (1.0 + z[i].norm()) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = eval(&dq, *zi);
            if d.norm() < 1e-8 * lead * (1.0 + zi.norm()).powi(n as i32 - 1) {
                break;
            }
            let step = eval(&q, *zi) / d;
            if !step.is_finite() || step.norm() > 1e-6 * (1.0 + zi.norm()) {
                break;
            }
            *zi -= step;
        }
    }
    out.extend(z);
    out
}

/// Roots grouped by multiplicity: `(root, multiplicity)`.
///
/// Roots within `CLUSTER_RADIUS` (relative) are merged outright.  Wider
/// clusters are merged when their spread matches the perturbation size of
/// a multiple root under rounding, which is `(eps * scale)^(1/m)`.
pub fn roots_with_multiplicity(p: &[C]) -> Vec<(C, usize)> {
    let p = trim(p, 1e-15);
    let rs = roots(&p);
    let mut groups: Vec<Vec<C>> = Vec::new();
    for r in rs {
        let mut placed = false;
        for g in groups.iter_mut() {
            let c = mean(g);
            if (c - r).norm() <= CLUSTER_RADIUS * (1.0 + c.norm()) {
                g.push(r);
                placed = true;
                break;
            }
        }
        if !placed {
            groups.push(vec![r]);
        }
    }
    // Secondary merging for higher multiplicities.
    loop {
        let mut merged = false;
        'outer: for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let ci = mean(&groups[i]);
                let cj = mean(&groups[j]);
                let dist = (ci - cj).norm();
                if dist > 1e-3 * (1.0 + ci.norm()) {
                    continue;
                }
                let mut all = groups[i].clone();
                all.extend(groups[j].iter().copied());
                let m = all.len();
                let c = mean(&all);
                let spread = all.iter().map(|r| (r - c).norm()).fold(0.0, f64::max);
                let expected = multiplicity_radius(&p, c, m);
                if spread <= 20.0 * expected {
                    groups[i] = all;
                    groups.remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let m = g.len();
            (polish_multiple(&p, mean(&g), m), m)
        })
        .collect()
}

/// Newton on the `(m-1)`-th derivative, which has a simple root at an
/// `m`-fold root of `p`.
fn polish_multiple(p: &[C], z0: C, m: usize) -> C {
    if m == 1 {
        return z0;
    }
    let mut d = p.to_vec();
    for _ in 0..(m - 1) {
        d = derivative(&d);
    }
    let dd = derivative(&d);
    let mut z = z0;
    for _ in 0..5 {
        let den = eval(&dd, z);
        if den == ZERO {
            break;
        }
        let step = eval(&d, z) / den;
        if !step.is_finite() || step.norm() > 1e-4 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

fn mean(v: &[C]) -> C {
    v.iter().sum::<C>() / v.len() as f64
}

/// Expected spread of the computed roots of an exact `m`-fold root at `c`.
fn multiplicity_radius(p: &[C], c: C, m: usize) -> f64 {
    let t = taylor_shift(p, c);
    let am = t.get(m).copied().unwrap_or(ZERO).norm();
    if am == 0.0 {
        return 0.0;
    }
    let scale: f64 = p
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm() * (1.0 + c.norm()).powi(k as i32))
        .sum();
    (1e-15 * scale / am).powf(1.0 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_cubic() {
        let r = [C::new(1.0, 0.0), C::new(-2.0, 0.5), C::new(0.3, -0.7)];
        let p = from_roots(&r);
        let mut found = roots(&p);
        for x in r {
            let (k, d) = found
                .iter()
                .enumerate()
                .map(|(k, y)| (k, (y - x).norm()))
                .fold((0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a });
            assert!(d < 1e-12);
            found.remove(k);
        }
    }

    #[test]
    fn multiplicities_are_detected() {
        let p = mul(&linear_power(C::new(0.5, 0.0), 3), &linear_power(C::new(-2.0, 0.0), 1));
        let g = roots_with_multiplicity(&p);
        assert_eq!(g.len(), 2);
        let triple = g.iter().find(|(_, m)| *m == 3).unwrap();
        assert!((triple.0 - C::new(0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn taylor_shift_matches_eval() {
        let p = vec![C::new(1.0, 0.0), C::new(0.0, 2.0), C::new(-1.0, 0.5), C::new(3.0, 0.0)];
        let z0 = C::new(0.4, -0.3);
        let t = taylor_shift(&p, z0);
        let s = C::new(0.1, 0.2);
        assert!((eval(&t, s) - eval(&p, z0 + s)).norm() < 1e-14);
    }

    #[test]
    fn divmod_reconstructs() {
        let a = vec![C::new(1.0, 0.0), C::new(2.0, 0.0), C::new(0.0, 1.0), C::new(1.0, 0.0)];
        let b = vec![C::new(-1.0, 0.0), C::new(1.0, 0.0)];
        let (q, r) = divmod(&a, &b);
        let back = add(&mul(&q, &b), &r);
        for k in 0..a.len() {
            assert!((back[k] - a[k]).norm() < 1e-14);
        }
    }
}
