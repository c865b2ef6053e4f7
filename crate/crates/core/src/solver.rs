//! Damped least-squares (Levenberg–Marquardt) over real unknowns with a
//! finite-difference Jacobian, and a Newton homotopy driver on top of it.

use crate::conformal::UnivalenceReport;
use crate::error::{QuadError, Result};
use crate::maps::MapSpec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// How an inverse problem pins down the Riemann map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Normalization {
    /// Bounded domains: `φ(0) = w₀`, `φ'(0) > 0`.
    W0(Complex64),
    /// Unbounded domains: conformal radius `c = φ'(∞) > 0`.
    C(f64),
}

/// A solved inverse problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InverseSolution {
    pub map: MapSpec,
    /// Final residual of the coefficient-matching system.
    pub residual: f64,
    /// Largest coefficient difference between the direct problem of
    /// `map` and the requested quadrature function.
    pub roundtrip: f64,
    pub univalence: UnivalenceReport,
    /// Set when the solution fails the univalence check.
    pub warning: Option<String>,
    /// Relative disagreement with an independent second solution path,
    /// when one is available.
    pub cross_check: Option<f64>,
}

/// Solver controls.
#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop once the residual norm falls below `tol · scale`.
    pub tol: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iter: 200,
            tol: 1e-15,
            fd_step: 1e-7,
        }
    }
}

/// Result of a least-squares solve.
#[derive(Debug, Clone)]
pub struct LmResult {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn jacobian<F>(f: &F, x: &[f64], r0: &[f64], step: f64) -> Option<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let m = r0.len();
    let n = x.len();
    let mut j = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for k in 0..n {
        let h = step * (1.0 + x[k].abs());
        xp[k] = x[k] + h;
        let rp = f(&xp);
        xp[k] = x[k] - h;
        let rm = f(&xp);
        xp[k] = x[k];
        match (rp, rm) {
            (Some(rp), Some(rm)) => {
                for i in 0..m {
                    j[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
                }
            }
            (Some(rp), None) => {
                for i in 0..m {
                    j[(i, k)] = (rp[i] - r0[i]) / h;
                }
            }
            (None, Some(rm)) => {
                for i in 0..m {
                    j[(i, k)] = (r0[i] - rm[i]) / h;
                }
            }
            (None, None) => return None,
        }
    }
    Some(j)
}

/// Minimize `|f(x)|²`. `f` returns `None` where the model is undefined;
/// such trial points are rejected like any uphill step.
pub fn levenberg_marquardt<F>(f: F, x0: &[f64], scale: f64, opts: LmOptions) -> Result<LmResult>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x).ok_or_else(|| QuadError::InvalidInput("initial guess outside the model domain".into()))?;
    let mut rn = norm(&r);
    let target = opts.tol * scale.max(1.0);
    let mut lambda = 1e-6;
    let mut it = 0;
    let mut stalls = 0;
    while it < opts.max_iter && rn > target {
        it += 1;
        let Some(j) = jacobian(&f, &x, &r, opts.fd_step) else {
            break;
        };
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * DVector::from_column_slice(&r);
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..a.nrows() {
                let d = jtj[(k, k)];
                a[(k, k)] += lambda * (d + 1e-12);
            }
            let svd = a.svd(true, true);
            let Ok(delta) = svd.solve(&(-&g), 1e-15) else {
                lambda *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            if let Some(rn_vec) = f(&xn) {
                let nn = norm(&rn_vec);
                if nn.is_finite() && nn < rn {
                    let small = norm(delta.as_slice()) <= 1e-15 * (1.0 + norm(&x));
                    stalls = if rn - nn < 1e-3 * rn { stalls + 1 } else { 0 };
                    x = xn;
                    r = rn_vec;
                    rn = nn;
                    lambda = (lambda / 10.0).max(1e-15);
                    accepted = true;
                    if small {
                        stalls = usize::MAX / 2;
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                break;
            }
        }
        if !accepted || stalls > 20 {
            break;
        }
    }
    Ok(LmResult {
        x,
        residual: rn,
        iterations: it,
    })
}

/// Solve `f(x) = target` by continuation from `x0`, deforming the target
/// linearly from `f(x0)` to `target`. The full step is tried first; on
/// failure the path parameter is advanced with step halving.
pub fn homotopy_solve<F>(f: F, x0: &[f64], target: &[f64], accept: f64, opts: LmOptions) -> Result<LmResult>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let f0 = f(x0).ok_or_else(|| QuadError::InvalidInput("initial guess outside the model domain".into()))?;
    if f0.len() != target.len() {
        return Err(QuadError::InvalidInput("residual and target lengths differ".into()));
    }
    let scale = 1.0 + norm(target);
    let at = |s: f64| -> Vec<f64> { f0.iter().zip(target).map(|(a, b)| (1.0 - s) * a + s * b).collect() };
    let solve_at = |s: f64, x: &[f64], o: LmOptions| {
        let t = at(s);
        levenberg_marquardt(|y| f(y).map(|v| v.iter().zip(&t).map(|(a, b)| a - b).collect()), x, scale, o)
    };
    let direct = solve_at(1.0, x0, opts)?;
    if direct.residual <= accept * scale {
        return Ok(direct);
    }
    let mut x = x0.to_vec();
    let mut s: f64 = 0.0;
    let mut ds: f64 = 0.25;
    let mut last = direct.residual;
    let stage = LmOptions {
        max_iter: 60,
        tol: 1e-11,
        ..opts
    };
    while s < 1.0 {
        let sn = (s + ds).min(1.0);
        let r = solve_at(sn, &x, stage)?;
        if r.residual <= 1e-8 * scale {
            x = r.x;
            s = sn;
            ds = (ds * 1.5).min(0.5);
        } else {
            ds *= 0.5;
            if ds < 1e-4 {
                last = r.residual;
                break;
            }
        }
    }
    if s >= 1.0 {
        let r = solve_at(1.0, &x, opts)?;
        if r.residual <= accept * scale {
            return Ok(r);
        }
        last = r.residual;
    }
    Err(QuadError::NoConvergence {
        residual: last,
        detail: format!("homotopy stopped at s = {s:.4}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_minimum() {
        let f = |x: &[f64]| Some(vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]]);
        let r = levenberg_marquardt(f, &[-1.2, 1.0], 1.0, LmOptions::default()).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-10 && (r.x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn homotopy_reaches_target() {
        let f = |x: &[f64]| Some(vec![x[0].powi(3) + x[0], x[1].exp()]);
        let r = homotopy_solve(f, &[0.0, 0.0], &[10.0, 5.0], 1e-12, LmOptions::default()).unwrap();
        assert!((r.x[0] - 2.0).abs() < 1e-10);
        assert!((r.x[1] - 5f64.ln()).abs() < 1e-10);
    }
}
