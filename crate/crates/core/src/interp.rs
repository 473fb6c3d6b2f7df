//! Local cubic interpolation on strictly increasing grids.

use num_complex::Complex64;

/// Sampled complex values with 4-point local cubic (Lagrange) interpolation.
/// Outside the grid the table evaluates to zero.
#[derive(Debug, Clone)]
pub struct CubicTable {
    xs: Vec<f64>,
    ys: Vec<Complex64>,
    /// Max |interpolated - direct| observed at cell midpoints during
    /// construction, when the builder monitored it.
    pub interp_err: f64,
}

impl CubicTable {
    pub fn new(xs: Vec<f64>, ys: Vec<Complex64>) -> Self {
        assert!(xs.len() == ys.len() && xs.len() >= 2, "need >= 2 samples");
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]), "grid must increase");
        CubicTable {
            xs,
            ys,
            interp_err: 0.0,
        }
    }

    /// Build from a function, then measure the interpolation error at the
    /// midpoints of a subsample of cells.
    pub fn from_fn(xs: Vec<f64>, f: impl Fn(f64) -> Complex64) -> Self {
        let ys: Vec<Complex64> = xs.iter().map(|&x| f(x)).collect();
        let mut table = CubicTable::new(xs, ys);
        let n = table.xs.len();
        let stride = (n / 64).max(1);
        let mut worst = 0.0f64;
        for i in (0..n - 1).step_by(stride) {
            let xm = 0.5 * (table.xs[i] + table.xs[i + 1]);
            let d = (table.eval(xm) - f(xm)).norm();
            worst = worst.max(d);
        }
        table.interp_err = worst;
        table
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn nodes(&self) -> (&[f64], &[Complex64]) {
        (&self.xs, &self.ys)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        // Cell index by binary search, then a centered 4-point stencil.
        let cell = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let lo = cell.saturating_sub(1).min(n - 4);
        let xs = &self.xs[lo..lo + 4];
        let ys = &self.ys[lo..lo + 4];
        let mut out = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            let mut w = 1.0;
            for j in 0..4 {
                if i != j {
                    w *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            out += ys[i] * w;
        }
        out
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(x).re
    }
}

/// Log-spaced grid with `per_decade` points per decade over [lo, hi].
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(2);
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

/// Uniform grid with n+1 points.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 1);
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_exactly() {
        let xs = linear_grid(0.0, 2.0, 40);
        let f = |x: f64| Complex64::new(1.0 + x + 0.5 * x * x - 0.25 * x * x * x, 2.0 * x);
        let t = CubicTable::from_fn(xs, f);
        for &x in &[0.013, 0.5, 1.111, 1.97] {
            assert!((t.eval(x) - f(x)).norm() < 1e-13);
        }
        assert!(t.interp_err < 1e-13);
    }

    #[test]
    fn zero_outside_domain() {
        let t = CubicTable::from_fn(linear_grid(1.0, 2.0, 8), |x| Complex64::new(x, 0.0));
        assert_eq!(t.eval(0.5).norm(), 0.0);
        assert_eq!(t.eval(2.5).norm(), 0.0);
    }

    #[test]
    fn smooth_function_error_small() {
        let xs = linear_grid(-3.0, 3.0, 300);
        let t = CubicTable::from_fn(xs, |x| Complex64::new((-x * x).exp() * (5.0 * x).cos(), 0.0));
        for &x in &[-2.7, -0.4, 0.0, 1.3, 2.9] {
            let exact = (-x * x as f64).exp() * (5.0 * x).cos();
            assert!((t.eval_real(x) - exact).abs() < 3e-6, "x={x}");
        }
    }
}
