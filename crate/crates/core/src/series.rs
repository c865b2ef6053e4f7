//! Truncated power series over the complex numbers.
//!
//! A `Series` of length `n` holds the Taylor coefficients `s[0..n]` and
//! represents the series modulo `x^n`.  These are the derivative towers
//! used by the residue formulae and by series reversion.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

type C = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Series(pub Vec<C>);

impl Series {
    pub fn zero(n: usize) -> Self {
        Series(vec![C::new(0.0, 0.0); n])
    }

    pub fn constant(c: C, n: usize) -> Self {
        let mut s = Self::zero(n);
        if n > 0 {
            s.0[0] = c;
        }
        s
    }

    /// The series `c0 + x`.
    pub fn variable(c0: C, n: usize) -> Self {
        let mut s = Self::constant(c0, n);
        if n > 1 {
            s.0[1] = C::new(1.0, 0.0);
        }
        s
    }

    pub fn from_coeffs(c: &[C], n: usize) -> Self {
        let mut s = Self::zero(n);
        for (k, v) in c.iter().take(n).enumerate() {
            s.0[k] = *v;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, k: usize) -> C {
        self.0.get(k).copied().unwrap_or_default()
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::from_coeffs(&self.0, n)
    }

    pub fn scale(&self, c: C) -> Self {
        Series(self.0.iter().map(|v| v * c).collect())
    }

    /// Multiply by `x^k`, keeping the length.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.len();
        let mut s = Self::zero(n);
        for i in k..n {
            s.0[i] = self.0[i - k];
        }
        s
    }

    /// Divide by `x^k`; the low coefficients must vanish.  The top `k`
    /// coefficients of the result are unknown and set to zero.
    pub fn shift_down(&self, k: usize) -> Self {
        let n = self.len();
        let mut s = Self::zero(n);
        for i in k..n {
            s.0[i - k] = self.0[i];
        }
        s
    }

    pub fn derivative(&self) -> Self {
        let n = self.len();
        let mut s = Self::zero(n);
        for k in 1..n {
            s.0[k - 1] = self.0[k] * k as f64;
        }
        s
    }

    /// Multiplicative inverse; requires a non-zero constant term.
    pub fn recip(&self) -> Self {
        let n = self.len();
        let mut out = Self::zero(n);
        if n == 0 {
            return out;
        }
        let inv0 = C::new(1.0, 0.0) / self.0[0];
        out.0[0] = inv0;
        for k in 1..n {
            let mut acc = C::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.0[j] * out.0[k - j];
            }
            out.0[k] = -acc * inv0;
        }
        out
    }

    pub fn div(&self, other: &Series) -> Self {
        self * &other.recip()
    }

    /// `exp` of the series.
    pub fn exp(&self) -> Self {
        let n = self.len();
        let mut out = Self::zero(n);
        if n == 0 {
            return out;
        }
        out.0[0] = self.0[0].exp();
        // f' = f g'
        for k in 1..n {
            let mut acc = C::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.0[j] * j as f64 * out.0[k - j];
            }
            out.0[k] = acc / k as f64;
        }
        out
    }

    /// `log` of the series with the constant term `log0` supplied by the
    /// caller (branch choice lives outside).
    pub fn log_with(&self, log0: C) -> Self {
        let n = self.len();
        let mut out = Self::zero(n);
        if n == 0 {
            return out;
        }
        out.0[0] = log0;
        let d = self.derivative().div(self);
        for k in 1..n {
            out.0[k] = d.0[k - 1] / k as f64;
        }
        out
    }

    /// `self^p` with the value of the constant term's power supplied.
    pub fn powf_with(&self, p: f64, value0: C) -> Self {
        let n = self.len();
        if n == 0 {
            return Self::zero(0);
        }
        let u = self.scale(C::new(1.0, 0.0) / self.0[0]);
        let mut l = u.log_with(C::new(0.0, 0.0));
        l = l.scale(C::new(p, 0.0));
        l.exp().scale(value0)
    }

    pub fn powi(&self, m: usize) -> Self {
        let n = self.len();
        let mut out = Self::constant(C::new(1.0, 0.0), n);
        for _ in 0..m {
            out = &out * self;
        }
        out
    }

    /// Composition `self(g(x))`; requires `g(0) = 0`.
    pub fn compose(&self, g: &Series) -> Self {
        let n = self.len().min(g.len());
        let mut out = Self::zero(n);
        // Horner in g.
        for k in (0..n).rev() {
            out = &out * &g.truncate(n);
            out.0[0] += self.0[k];
        }
        out
    }

    /// Compositional inverse of a series with `s(0) = 0`, `s'(0) != 0`.
    pub fn revert(&self) -> Self {
        let n = self.len();
        let mut out = Self::zero(n);
        if n < 2 {
            return out;
        }
        let a1 = self.0[1];
        out.0[1] = C::new(1.0, 0.0) / a1;
        // Newton-free iterative refinement: solve self(out(x)) = x order by order.
        for k in 2..n {
            let trial = self.compose(&out.truncate(k + 1));
            let err = trial.coeff(k);
            out.0[k] = -err / a1;
        }
        out
    }

    pub fn eval(&self, x: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

impl<'a> Mul<&'a Series> for &'a Series {
    type Output = Series;
    fn mul(self, rhs: &'a Series) -> Series {
        let n = self.len().min(rhs.len());
        let mut out = Series::zero(n);
        for i in 0..n {
            if self.0[i] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..(n - i) {
                out.0[i + j] += self.0[i] * rhs.0[j];
            }
        }
        out
    }
}

impl<'a> Add<&'a Series> for &'a Series {
    type Output = Series;
    fn add(self, rhs: &'a Series) -> Series {
        let n = self.len().min(rhs.len());
        Series((0..n).map(|k| self.0[k] + rhs.0[k]).collect())
    }
}

impl<'a> Sub<&'a Series> for &'a Series {
    type Output = Series;
    fn sub(self, rhs: &'a Series) -> Series {
        let n = self.len().min(rhs.len());
        Series((0..n).map(|k| self.0[k] - rhs.0[k]).collect())
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series(self.0.iter().map(|v| -v).collect())
    }
}
