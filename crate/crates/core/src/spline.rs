//! Not-a-knot cubic spline interpolation.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Cubic spline through `(x_k, y_k)` with not-a-knot end conditions.
///
/// Evaluation outside `[x_0, x_{n-1}]` returns `None`; callers decide how
/// out-of-range queries are reported.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

/// Coefficients of one spline panel in the local variable `s = t - x_k`:
/// `y = a + b s + c s^2 + d s^3` for `s` in `[0, h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub x0: f64,
    pub h: f64,
    pub coef: [f64; 4],
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::invalid("spline abscissae and ordinates differ in length"));
        }
        if n < 4 {
            return Err(Error::invalid("spline needs at least 4 points"));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("spline data must be finite"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("spline abscissae must be strictly increasing"));
        }
        let m = second_derivatives(&x, &y);
        Ok(CubicSpline { x, y, m })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn locate(&self, t: f64) -> Option<usize> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return None;
        }
        let k = self.x.partition_point(|&xk| xk <= t);
        Some(k.saturating_sub(1).min(self.x.len() - 2))
    }

    pub fn panel(&self, k: usize) -> Panel {
        let h = self.x[k + 1] - self.x[k];
        let (m0, m1) = (self.m[k], self.m[k + 1]);
        let b = (self.y[k + 1] - self.y[k]) / h - h * (2.0 * m0 + m1) / 6.0;
        Panel {
            x0: self.x[k],
            h,
            coef: [self.y[k], b, 0.5 * m0, (m1 - m0) / (6.0 * h)],
        }
    }

    pub fn panels(&self) -> impl Iterator<Item = Panel> + '_ {
        (0..self.x.len() - 1).map(move |k| self.panel(k))
    }

    pub fn eval(&self, t: f64) -> Option<f64> {
        let k = self.locate(t)?;
        let p = self.panel(k);
        let s = t - p.x0;
        let [a, b, c, d] = p.coef;
        Some(a + s * (b + s * (c + s * d)))
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        let k = self.locate(t)?;
        let p = self.panel(k);
        let s = t - p.x0;
        let [_, b, c, d] = p.coef;
        Some(b + s * (2.0 * c + 3.0 * s * d))
    }
}

// Second derivatives at the nodes. The two not-a-knot conditions are used to
// eliminate M_0 and M_{n-1}, leaving a tridiagonal system for M_1..M_{n-2}.
fn second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

    let size = n - 2;
    let mut sub = vec![0.0; size];
    let mut diag = vec![0.0; size];
    let mut sup = vec![0.0; size];
    let mut rhs = vec![0.0; size];
    for r in 0..size {
        let i = r + 1;
        sub[r] = h[i - 1];
        diag[r] = 2.0 * (h[i - 1] + h[i]);
        sup[r] = h[i];
        rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
    }
    // M_0 = ((h0 + h1) M_1 - h0 M_2) / h1
    let (h0, h1) = (h[0], h[1]);
    diag[0] += h0 * (h0 + h1) / h1;
    sup[0] -= h0 * h0 / h1;
    // M_{n-1} = ((ha + hb) M_{n-2} - hb M_{n-3}) / ha
    let (ha, hb) = (h[n - 3], h[n - 2]);
    diag[size - 1] += hb * (ha + hb) / ha;
    sub[size - 1] -= hb * hb / ha;

    let inner = if size == 1 {
        // n == 3 is rejected earlier; kept for completeness.
        vec![rhs[0] / diag[0]]
    } else if size == 2 {
        let det = diag[0] * diag[1] - sup[0] * sub[1];
        vec![
            (rhs[0] * diag[1] - sup[0] * rhs[1]) / det,
            (diag[0] * rhs[1] - sub[1] * rhs[0]) / det,
        ]
    } else {
        thomas(&sub, &diag, &sup, &rhs)
    };

    let mut m = vec![0.0; n];
    m[1..n - 1].copy_from_slice(&inner);
    m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
    m[n - 1] = ((ha + hb) * m[n - 2] - hb * m[n - 3]) / ha;
    m
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}
