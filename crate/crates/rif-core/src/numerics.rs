//! Small numerical kernels shared across the crate: compensated summation,
//! log-log line fits, and 1-D adaptive quadrature.

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Compensated sum of an iterator.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Ordinary least-squares line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the fitted slope (0 for a two-point fit).
    pub slope_stderr: f64,
    pub points: usize,
}

impl LineFit {
    /// A conservative confidence half-width for the slope (two standard errors).
    pub fn slope_half_width(&self) -> f64 {
        2.0 * self.slope_stderr
    }
}

/// Fits a line through `(x, y)` pairs. Panics if fewer than two points.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "line fit needs at least two points");
    let n = xs.len() as f64;
    let mx = kahan_sum(xs.iter().copied()) / n;
    let my = kahan_sum(ys.iter().copied()) / n;
    let sxx = kahan_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let sxy = kahan_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut stderr = 0.0;
    if xs.len() > 2 {
        let ss_res = kahan_sum(xs.iter().zip(ys).map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        }));
        stderr = (ss_res / ((n - 2.0) * sxx)).sqrt();
    }
    LineFit {
        slope,
        intercept,
        slope_stderr: stderr,
        points: xs.len(),
    }
}

/// Weighted least-squares line fit; weights are inverse variances.
pub fn fit_line_weighted(xs: &[f64], ys: &[f64], ws: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert_eq!(xs.len(), ws.len());
    assert!(xs.len() >= 2, "line fit needs at least two points");
    let wsum = kahan_sum(ws.iter().copied());
    let mx = kahan_sum(xs.iter().zip(ws).map(|(x, w)| x * w)) / wsum;
    let my = kahan_sum(ys.iter().zip(ws).map(|(y, w)| y * w)) / wsum;
    let sxx = kahan_sum(xs.iter().zip(ws).map(|(x, w)| w * (x - mx) * (x - mx)));
    let sxy = kahan_sum(
        xs.iter()
            .zip(ys)
            .zip(ws)
            .map(|((x, y), w)| w * (x - mx) * (y - my)),
    );
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // With inverse-variance weights the slope variance is 1/sxx.
    let stderr = (1.0 / sxx).sqrt();
    LineFit {
        slope,
        intercept,
        slope_stderr: stderr,
        points: xs.len(),
    }
}

/// Adaptive Simpson quadrature on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
