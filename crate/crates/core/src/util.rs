//! Small numeric utilities shared across modules.

use crate::error::{Error, Result};

/// Compensated (Kahan–Neumaier) accumulator; protects the alternating and
/// log-series summations from cancellation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Plain bisection on a bracketing interval. `f(a)` and `f(b)` must have
/// opposite signs. Stops when the interval is below `tol * max(1, |mid|)`.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Search(format!(
            "no sign change on [{a}, {b}] (f = {fa}, {fb})"
        )));
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a).abs() <= tol * a.abs().max(b.abs()).max(1.0) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Cumulative trapezoid integral on a uniform grid.
pub fn cumulative_integral(h: f64, ys: &[f64]) -> Vec<f64> {
    let n = ys.len();
    let mut out = vec![0.0; n];
    let mut acc = KahanSum::default();
    for i in 1..n {
        acc.add(0.5 * h * (ys[i - 1] + ys[i]));
        out[i] = acc.value();
    }
    out
}

/// Natural cubic spline through (xs, ys); xs strictly increasing.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>, // second derivatives at the knots
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 3 || ys.len() != n {
            return Err(Error::Domain("spline needs at least 3 matched knots".into()));
        }
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Domain("spline knots must be strictly increasing".into()));
            }
        }
        // Thomas algorithm on the tridiagonal system for natural end conditions
        let mut sub = vec![0.0; n];
        let mut diag = vec![2.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let hl = xs[i] - xs[i - 1];
            let hr = xs[i + 1] - xs[i];
            sub[i] = hl / (hl + hr);
            sup[i] = hr / (hl + hr);
            rhs[i] = 6.0 / (hl + hr) * ((ys[i + 1] - ys[i]) / hr - (ys[i] - ys[i - 1]) / hl);
        }
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Ok(CubicSpline { xs, ys, m })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = self
            .xs
            .partition_point(|&k| k < x)
            .clamp(1, n - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * self.ys[i - 1]
            + b * self.ys[i]
            + ((a * a * a - a) * self.m[i - 1] + (b * b * b - b) * self.m[i]) * h * h / 6.0
    }
}

/// Five-point central first derivative on a uniform grid, one-sided at the
/// edges (fourth order throughout).
pub fn derivative_uniform(h: f64, ys: &[f64]) -> Vec<f64> {
    let n = ys.len();
    assert!(n >= 5, "need at least 5 samples");
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = if i < 2 {
            (-25.0 * ys[i] + 48.0 * ys[i + 1] - 36.0 * ys[i + 2] + 16.0 * ys[i + 3]
                - 3.0 * ys[i + 4])
                / (12.0 * h)
        } else if i >= n - 2 {
            (25.0 * ys[i] - 48.0 * ys[i - 1] + 36.0 * ys[i - 2] - 16.0 * ys[i - 3]
                + 3.0 * ys[i - 4])
                / (12.0 * h)
        } else {
            (ys[i - 2] - 8.0 * ys[i - 1] + 8.0 * ys[i + 1] - ys[i + 2]) / (12.0 * h)
        };
    }
    out
}

/// Least-squares slope of ys against xs.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cumulative_matches_antiderivative() {
        let n = 4097;
        let h = 2.0 / (n - 1) as f64;
        let ys: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let cum = cumulative_integral(h, &ys);
        for (i, c) in cum.iter().enumerate() {
            let x = i as f64 * h;
            assert_abs_diff_eq!(*c, 1.0 - x.cos(), epsilon = 1e-7);
        }
    }

    #[test]
    fn spline_reproduces_smooth_function() {
        // natural end conditions leave an O(h^2) boundary layer; interior
        // accuracy is what the transform grid relies on
        let n = 64;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 * x).exp()).collect();
        let sp = CubicSpline::new(xs.clone(), ys).unwrap();
        for i in 0..200 {
            let x = 0.05 + 0.9 * i as f64 / 199.0;
            assert_abs_diff_eq!(sp.eval(x), (2.0 * x).exp(), epsilon = 2e-5);
        }
    }

    #[test]
    fn derivative_fourth_order() {
        let n = 101;
        let h = 1.0 / (n - 1) as f64;
        let ys: Vec<f64> = (0..n).map(|i| (3.0 * i as f64 * h).sin()).collect();
        let d = derivative_uniform(h, &ys);
        for (i, v) in d.iter().enumerate() {
            let x = i as f64 * h;
            assert_abs_diff_eq!(*v, 3.0 * (3.0 * x).cos(), epsilon = 1e-6);
        }
    }

    #[test]
    fn slope_of_line() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert_abs_diff_eq!(ls_slope(&xs, &ys), 3.0, epsilon = 1e-12);
    }
}
