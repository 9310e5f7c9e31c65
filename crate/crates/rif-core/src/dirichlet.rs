//! Dirichlet-type norms: weighted coefficient sums, a three-way convergence
//! classifier for the norm series, the weighted area integral usable for
//! nonpositive weights, and the derivative-shift norm.
//!
//! The space with weight vector `alpha` consists of holomorphic functions
//! whose coefficients satisfy
//! `sum prod_i (1+k_i)^{alpha_i} |a(k)|^2 < infinity`;
//! weight 0 in every slot is the Hardy space of the polydisk, -1 the Bergman
//! space, +1 the Dirichlet space.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{fit_line, KahanSum};
use crate::poly::{MultiIndex, MultiPoly};
use crate::series::{expand_ratio, CoeffBox, ExpandConfig, SeriesError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DirichletError {
    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {vars} variables")]
    IndexOutOfRange { index: usize, vars: usize },
    #[error("integral norm requires nonpositive weights; alpha[{index}] = {alpha}")]
    PositiveWeight { index: usize, alpha: f64 },
    #[error("schedule needs at least {needed} strictly increasing orders, got {got}")]
    ScheduleTooShort { needed: usize, got: usize },
    #[error("schedule must be strictly increasing")]
    ScheduleNotIncreasing,
    #[error(
        "integral estimate grows without stabilizing (growth exponent {growth_exponent:.3} per refinement, last estimate {last_estimate:.6e})"
    )]
    IntegralDiverging {
        growth_exponent: f64,
        last_estimate: f64,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// One Dirichlet weight exponent per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(alphas: Vec<f64>) -> Self {
        assert!(alphas.iter().all(|a| a.is_finite()), "weights must be finite");
        WeightVector(alphas)
    }

    pub fn isotropic(n: usize, alpha: f64) -> Self {
        Self::new(vec![alpha; n])
    }

    /// Weight `p` in slot `k`, zero elsewhere (the anisotropic norm).
    pub fn anisotropic(n: usize, k: usize, p: f64) -> Self {
        let mut v = vec![0.0; n];
        v[k] = p;
        Self::new(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Per-variable lookup tables `(1+k)^{alpha_i}` for `k = 0..=N_i`.
fn weight_tables(orders: &MultiIndex, w: &WeightVector) -> Vec<Vec<f64>> {
    (0..orders.len())
        .map(|i| {
            (0..=orders.get(i))
                .map(|k| ((1 + k) as f64).powf(w.get(i)))
                .collect()
        })
        .collect()
}

/// The weighted coefficient sum `sum prod_i (1+k_i)^{alpha_i} |a(k)|^2`
/// over the whole box, with compensated accumulation.
pub fn weighted_partial_sum(cb: &CoeffBox, w: &WeightVector) -> Result<f64, DirichletError> {
    if w.len() != cb.vars() {
        return Err(DirichletError::DimensionMismatch {
            expected: cb.vars(),
            got: w.len(),
        });
    }
    let tables = weight_tables(cb.orders(), w);
    let mut acc = KahanSum::new();
    cb.for_each(|exps, c| {
        let mag = c.norm_sqr();
        if mag > 0.0 {
            let mut weight = 1.0;
            for (i, &e) in exps.iter().enumerate() {
                weight *= tables[i][e as usize];
            }
            acc.add(weight * mag);
        }
    });
    Ok(acc.value())
}

/// Weighted sum restricted to the sub-box `max_i k_i <= cut`.
fn weighted_sum_within(cb: &CoeffBox, tables: &[Vec<f64>], cut: u32) -> f64 {
    let mut acc = KahanSum::new();
    cb.for_each(|exps, c| {
        if exps.iter().all(|&e| e <= cut) {
            let mag = c.norm_sqr();
            if mag > 0.0 {
                let mut weight = 1.0;
                for (i, &e) in exps.iter().enumerate() {
                    weight *= tables[i][e as usize];
                }
                acc.add(weight * mag);
            }
        }
    });
    acc.value()
}

/// The weighted sum for `df/dz_i` under the shifted weight `w - 2 e_i`,
/// computed from the shifted coefficients `k_i a(k)` at `k - e_i`.
///
/// For a single term this reduces to the factor `k_i^{alpha_i}` replacing
/// `(1+k_i)^{alpha_i}` in the plain sum.
pub fn derivative_shift_norm(
    cb: &CoeffBox,
    i: usize,
    w: &WeightVector,
) -> Result<f64, DirichletError> {
    if w.len() != cb.vars() {
        return Err(DirichletError::DimensionMismatch {
            expected: cb.vars(),
            got: w.len(),
        });
    }
    if i >= cb.vars() {
        return Err(DirichletError::IndexOutOfRange {
            index: i,
            vars: cb.vars(),
        });
    }
    let mut tables = weight_tables(cb.orders(), w);
    // Slot i: coefficient k_i a(k) lands at k_i - 1, weight exponent alpha_i - 2.
    // Combined factor (k_i)^{alpha_i - 2} k_i^2 = k_i^{alpha_i}, and 0 at k_i = 0.
    tables[i] = (0..=cb.orders().get(i))
        .map(|k| (k as f64).powf(w.get(i)))
        .collect();
    let mut acc = KahanSum::new();
    cb.for_each(|exps, c| {
        if exps[i] == 0 {
            return;
        }
        let mag = c.norm_sqr();
        if mag > 0.0 {
            let mut weight = 1.0;
            for (j, &e) in exps.iter().enumerate() {
                weight *= tables[j][e as usize];
            }
            acc.add(weight * mag);
        }
    });
    Ok(acc.value())
}

/// Anything that can produce a coefficient box at requested orders.
pub trait SeriesSource {
    fn vars(&self) -> usize;
    fn coeff_box(&self, orders: &MultiIndex) -> Result<CoeffBox, SeriesError>;
}

/// A rational function `numerator / denominator` as a series source.
pub struct RationalSource<'a> {
    pub numerator: &'a MultiPoly,
    pub denominator: &'a MultiPoly,
    pub cfg: ExpandConfig,
}

impl SeriesSource for RationalSource<'_> {
    fn vars(&self) -> usize {
        self.denominator.vars()
    }

    fn coeff_box(&self, orders: &MultiIndex) -> Result<CoeffBox, SeriesError> {
        expand_ratio(self.numerator, self.denominator, orders, &self.cfg)
    }
}

/// A synthetic source with coefficients given by a closure; test scaffolding
/// for classifier calibration.
pub struct FnSource<F: Fn(&[u32]) -> Complex64 + Sync> {
    pub n: usize,
    pub f: F,
}

impl<F: Fn(&[u32]) -> Complex64 + Sync> SeriesSource for FnSource<F> {
    fn vars(&self) -> usize {
        self.n
    }

    fn coeff_box(&self, orders: &MultiIndex) -> Result<CoeffBox, SeriesError> {
        let mut entries: Vec<(MultiIndex, Complex64)> = Vec::new();
        let mut exps = vec![0u32; self.n];
        loop {
            let v = (self.f)(&exps);
            if v.norm() > 0.0 {
                entries.push((MultiIndex::new(exps.clone()), v));
            }
            let mut done = true;
            for i in (0..self.n).rev() {
                if exps[i] < orders.get(i) {
                    exps[i] += 1;
                    done = false;
                    break;
                }
                exps[i] = 0;
            }
            if done {
                break;
            }
        }
        let p = MultiPoly::from_terms(self.n, entries)?;
        CoeffBox::from_poly(&p, orders)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Convergent,
    Divergent,
    Inconclusive,
}

/// Outcome of the convergence classifier for a weighted norm series.
#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    pub status: Membership,
    /// `(order, partial sum)` per schedule entry; nondecreasing in value.
    pub partial_sums: Vec<(u32, f64)>,
    /// Fitted exponent of the shell density `dS/dN ~ N^t`; the series
    /// converges iff `t < -1` for power-law tails.
    pub tail_exponent: f64,
    pub tail_half_width: f64,
    /// Present only for convergent verdicts: top partial sum plus a
    /// geometric tail extrapolation.
    pub norm_estimate: Option<f64>,
    pub orders_used: MultiIndex,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig {
    /// Width of the band around the critical exponent -1 treated as
    /// divergent-or-inconclusive.
    pub margin: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { margin: 0.15 }
    }
}

/// Classifies convergence of the weighted norm series by fitting the
/// log shell-increment density against log order over a growing schedule.
///
/// Divergent when the fitted density exponent sits at or above `-1 + margin`;
/// convergent when it is clearly below the critical `-1` (or the tail is
/// identically zero); inconclusive inside `[-1, -1 + margin)`.
pub fn classify_membership(
    src: &impl SeriesSource,
    w: &WeightVector,
    schedule: &[u32],
    cfg: &ClassifyConfig,
) -> Result<MembershipVerdict, DirichletError> {
    if schedule.len() < 4 {
        return Err(DirichletError::ScheduleTooShort {
            needed: 4,
            got: schedule.len(),
        });
    }
    if schedule.windows(2).any(|p| p[0] >= p[1]) {
        return Err(DirichletError::ScheduleNotIncreasing);
    }
    let n = src.vars();
    if w.len() != n {
        return Err(DirichletError::DimensionMismatch {
            expected: n,
            got: w.len(),
        });
    }
    let top = *schedule.last().unwrap();
    let orders = MultiIndex::new(vec![top; n]);
    let cb = src.coeff_box(&orders)?;
    let tables = weight_tables(cb.orders(), w);
    let partial_sums: Vec<(u32, f64)> = schedule
        .iter()
        .map(|&cut| (cut, weighted_sum_within(&cb, &tables, cut)))
        .collect();

    // Log-log fit of increment densities between consecutive orders.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut last_positive = None;
    for j in 0..partial_sums.len() - 1 {
        let (n0, s0) = partial_sums[j];
        let (n1, s1) = partial_sums[j + 1];
        let increment = s1 - s0;
        let span = (n1 - n0) as f64;
        if increment > 0.0 && increment > 1e-300 {
            xs.push(0.5 * ((n0 as f64).ln() + (n1 as f64).ln()));
            ys.push((increment / span).ln());
            last_positive = Some((n0, n1, increment));
        }
    }

    let scale = partial_sums.last().unwrap().1;
    let tail_dead = match last_positive {
        // Trailing increments vanished (relative to the sum): finite tail.
        Some((_, n1, _)) => {
            n1 < *schedule.last().unwrap()
                || partial_sums[partial_sums.len() - 1].1 - partial_sums[partial_sums.len() - 2].1
                    <= 1e-14 * scale
        }
        None => true,
    };

    if tail_dead || xs.len() < 2 {
        // No usable power-law data. A dead tail is a convergent series (a
        // polynomial, say); otherwise we cannot say anything.
        let status = if tail_dead {
            Membership::Convergent
        } else {
            Membership::Inconclusive
        };
        return Ok(MembershipVerdict {
            status,
            norm_estimate: match status {
                Membership::Convergent => Some(scale),
                _ => None,
            },
            partial_sums,
            tail_exponent: f64::NEG_INFINITY,
            tail_half_width: 0.0,
            orders_used: orders,
        });
    }

    let fit = fit_line(&xs, &ys);
    let t = fit.slope;
    let status = if t >= -1.0 + cfg.margin {
        Membership::Divergent
    } else if t < -1.0 {
        Membership::Convergent
    } else {
        Membership::Inconclusive
    };

    let norm_estimate = if status == Membership::Convergent {
        let m = partial_sums.len();
        let (n_prev, s_prev) = partial_sums[m - 2];
        let (n_last, s_last) = partial_sums[m - 1];
        let growth = n_last as f64 / n_prev as f64;
        let ratio = growth.powf(t + 1.0);
        let tail = if ratio < 1.0 {
            (s_last - s_prev) * ratio / (1.0 - ratio)
        } else {
            0.0
        };
        Some(s_last + tail)
    } else {
        None
    };

    Ok(MembershipVerdict {
        status,
        partial_sums,
        tail_exponent: t,
        tail_half_width: fit.slope_half_width(),
        norm_estimate,
        orders_used: orders,
    })
}

/// Tensor-product quadrature configuration for the weighted area integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Gauss-Legendre points per radial panel.
    pub gauss_per_panel: usize,
    /// Initial number of geometric radial panels per variable.
    pub geometric_levels: usize,
    /// Initial equispaced angular nodes per variable.
    pub angular_nodes: usize,
    /// How many times to refine (panels + 2, angular x 2) before giving up.
    pub max_refinements: usize,
    /// Relative stabilization target between refinements.
    pub rtol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            gauss_per_panel: 8,
            geometric_levels: 6,
            angular_nodes: 32,
            max_refinements: 4,
            rtol: 1e-7,
        }
    }
}

/// Quadrature outcome with its stabilization diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Relative change produced by the last refinement.
    pub last_delta: f64,
    pub refinements: usize,
    pub converged: bool,
}

// 8-point Gauss-Legendre rule on [-1, 1].
const GAUSS_X: [f64; 8] = [
    -0.9602898564975363,
    -0.7966664774136267,
    -0.5255324099163290,
    -0.1834346424956498,
    0.1834346424956498,
    0.5255324099163290,
    0.7966664774136267,
    0.9602898564975363,
];
const GAUSS_W: [f64; 8] = [
    0.1012285362903763,
    0.2223810344533745,
    0.3137066458778873,
    0.3626837833783620,
    0.3626837833783620,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// Radial nodes `(r, weight)` for one variable so that
/// `sum_j wgt_j g(r_j)` approximates
/// `int_0^1 g(r) (1-r^2)^{-1-alpha} r dr` for `alpha <= 0`.
///
/// For `alpha < 0` the substitutions `x = r^2`, `v = 1-x`, `v = u^{1/|alpha|}`
/// fold the weight exactly; the `u` interval is covered by panels that refine
/// geometrically toward `u = 0` (that is, toward `r = 1`). For `alpha = 0`
/// the weight cannot be folded and is kept in the node weights; the
/// (logarithmically divergent) behavior then shows up as non-stabilizing
/// refinement, which the caller reports.
fn radial_rule(alpha: f64, levels: usize, gauss: usize) -> Vec<(f64, f64)> {
    let gauss = gauss.min(8).max(2);
    let mut nodes = Vec::with_capacity((levels + 1) * gauss);
    let panel = |a: f64, b: f64, out: &mut Vec<(f64, f64)>| {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for j in 0..gauss {
            out.push((mid + half * GAUSS_X[j], half * GAUSS_W[j]));
        }
    };
    // Geometric panel edges in the folded coordinate: 1, 1/2, ..., 2^-levels, 0.
    let mut edges = Vec::with_capacity(levels + 2);
    edges.push(1.0);
    for m in 1..=levels {
        edges.push(0.5f64.powi(m as i32));
    }
    edges.push(0.0);
    let mut grid = Vec::new();
    for e in edges.windows(2) {
        panel(e[1], e[0], &mut grid);
    }

    if alpha < 0.0 {
        let inv = 1.0 / (-alpha);
        for &(u, gw) in &grid {
            let v = u.powf(inv);
            let r = (1.0 - v).max(0.0).sqrt();
            // Prefactor 1/(2|alpha|) from the substitutions.
            nodes.push((r, gw * 0.5 * inv));
        }
    } else {
        // alpha == 0: integrate in v with the 1/v weight explicit.
        for &(v, gw) in &grid {
            if v <= 0.0 {
                continue;
            }
            let r = (1.0 - v).max(0.0).sqrt();
            nodes.push((r, gw * 0.5 / v));
        }
    }
    nodes
}

/// Weighted area integral `int_{D^n} |f(z)|^2 prod_i (1-|z_i|^2)^{-1-alpha_i} dA(z)`
/// for nonpositive weights, by tensor-product quadrature (folded radial rule,
/// trapezoidal angles), refined until the estimate stabilizes.
pub fn integral_norm_leq0<F>(
    f: &F,
    n: usize,
    w: &WeightVector,
    quad: &QuadConfig,
) -> Result<IntegralEstimate, DirichletError>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    if w.len() != n {
        return Err(DirichletError::DimensionMismatch {
            expected: n,
            got: w.len(),
        });
    }
    for i in 0..n {
        if w.get(i) > 0.0 {
            return Err(DirichletError::PositiveWeight {
                index: i,
                alpha: w.get(i),
            });
        }
    }

    let mut estimates: Vec<f64> = Vec::new();
    let mut levels = quad.geometric_levels;
    let mut angular = quad.angular_nodes;
    for refinement in 0..=quad.max_refinements {
        let value = tensor_integral(f, n, w, levels, angular, quad.gauss_per_panel);
        estimates.push(value);
        if estimates.len() >= 2 {
            let prev = estimates[estimates.len() - 2];
            let delta = (value - prev).abs() / value.abs().max(f64::MIN_POSITIVE);
            if delta <= quad.rtol {
                return Ok(IntegralEstimate {
                    value,
                    last_delta: delta,
                    refinements: refinement,
                    converged: true,
                });
            }
        }
        levels += 2;
        angular = (angular * 3) / 2;
    }

    // Did not stabilize: decide between divergence and slow convergence.
    let m = estimates.len();
    let last = estimates[m - 1];
    let prev = estimates[m - 2];
    let last_delta = (last - prev).abs() / last.abs().max(f64::MIN_POSITIVE);
    let increasing = estimates.windows(2).all(|p| p[1] > p[0]);
    let deltas: Vec<f64> = estimates.windows(2).map(|p| p[1] - p[0]).collect();
    let shrinking = deltas.windows(2).all(|d| d[1].abs() < d[0].abs());
    if increasing && !shrinking {
        let xs: Vec<f64> = (0..m).map(|i| i as f64).collect();
        let ys: Vec<f64> = estimates.iter().map(|e| e.abs().max(1e-300).ln()).collect();
        let fit = fit_line(&xs, &ys);
        return Err(DirichletError::IntegralDiverging {
            growth_exponent: fit.slope,
            last_estimate: last,
        });
    }
    Ok(IntegralEstimate {
        value: last,
        last_delta,
        refinements: m - 1,
        converged: false,
    })
}

fn tensor_integral<F>(
    f: &F,
    n: usize,
    w: &WeightVector,
    levels: usize,
    angular: usize,
    gauss: usize,
) -> f64
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    // Per-variable node list: point on the disk and combined weight.
    let per_var: Vec<Vec<(Complex64, f64)>> = (0..n)
        .map(|i| {
            let radial = radial_rule(w.get(i), levels, gauss);
            let dtheta = std::f64::consts::TAU / angular as f64;
            let mut nodes = Vec::with_capacity(radial.len() * angular);
            for &(r, rw) in &radial {
                for j in 0..angular {
                    let theta = dtheta * j as f64;
                    nodes.push((Complex64::from_polar(r, theta), rw * dtheta));
                }
            }
            nodes
        })
        .collect();

    // Parallel over the first variable, sequential odometer inside;
    // per-chunk results are combined in index order for determinism.
    let first = &per_var[0];
    let partials: Vec<f64> = first
        .par_iter()
        .map(|&(z0, w0)| {
            let mut acc = KahanSum::new();
            let mut z = vec![Complex64::new(0.0, 0.0); n];
            z[0] = z0;
            if n == 1 {
                let v = f(&z);
                acc.add(w0 * v.norm_sqr());
            } else {
                let mut idx = vec![0usize; n - 1];
                loop {
                    let mut weight = w0;
                    for d in 1..n {
                        let (zd, wd) = per_var[d][idx[d - 1]];
                        z[d] = zd;
                        weight *= wd;
                    }
                    let v = f(&z);
                    acc.add(weight * v.norm_sqr());
                    let mut done = true;
                    for d in (0..n - 1).rev() {
                        if idx[d] + 1 < per_var[d + 1].len() {
                            idx[d] += 1;
                            done = false;
                            break;
                        }
                        idx[d] = 0;
                    }
                    if done {
                        break;
                    }
                }
            }
            acc.value()
        })
        .collect();
    let mut total = KahanSum::new();
    for p in partials {
        total.add(p);
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiIndex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn poly_box(terms: &[(&[u32], Complex64)], n: usize, orders: &[u32]) -> CoeffBox {
        let p = MultiPoly::from_terms(
            n,
            terms.iter().map(|(e, v)| (mi(e), *v)),
        )
        .unwrap();
        CoeffBox::from_poly(&p, &mi(orders)).unwrap()
    }

    #[test]
    fn weighted_sum_examples() {
        // f = z1 z2 at weight (1,1): 2*2*1 = 4.
        let cb = poly_box(&[(&[1, 1], c(1.0, 0.0))], 2, &[2, 2]);
        let w = WeightVector::isotropic(2, 1.0);
        assert_eq!(weighted_partial_sum(&cb, &w).unwrap(), 4.0);

        // f = z1 + z2 at weight (2,0): 4 + 1 = 5.
        let cb = poly_box(&[(&[1, 0], c(1.0, 0.0)), (&[0, 1], c(1.0, 0.0))], 2, &[2, 2]);
        let w = WeightVector::new(vec![2.0, 0.0]);
        assert_eq!(weighted_partial_sum(&cb, &w).unwrap(), 5.0);
    }

    #[test]
    fn weighted_sum_zeta_limit() {
        // 1/(1 - z1 z2) truncated: sum (1+k)^{-2} -> pi^2/6.
        let one = MultiPoly::constant(2, c(1.0, 0.0));
        let p = MultiPoly::from_terms(
            2,
            [(mi(&[0, 0]), c(1.0, 0.0)), (mi(&[1, 1]), c(-1.0, 0.0))],
        )
        .unwrap();
        let cb = expand_ratio(&one, &p, &mi(&[600, 600]), &ExpandConfig::default()).unwrap();
        let w = WeightVector::isotropic(2, -1.0);
        let s = weighted_partial_sum(&cb, &w).unwrap();
        let target = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        assert!((s - target).abs() < 2e-3, "{s} vs {target}");
        assert!(s < target);
    }

    #[test]
    fn weighted_sum_dimension_mismatch() {
        let cb = poly_box(&[(&[1, 1], c(1.0, 0.0))], 2, &[1, 1]);
        let w = WeightVector::isotropic(3, 1.0);
        assert!(matches!(
            weighted_partial_sum(&cb, &w),
            Err(DirichletError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn monotone_in_orders_and_weights() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let one = MultiPoly::constant(2, c(1.0, 0.0));
        let p = MultiPoly::from_terms(
            2,
            [
                (mi(&[0, 0]), c(2.0, 0.0)),
                (mi(&[1, 0]), c(-1.0, 0.0)),
                (mi(&[0, 1]), c(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let big = expand_ratio(&one, &p, &mi(&[64, 64]), &ExpandConfig::default()).unwrap();
        for _ in 0..20 {
            let a1 = rng.gen_range(-1.5..1.5);
            let a2 = rng.gen_range(-1.5..1.5);
            let w = WeightVector::new(vec![a1, a2]);
            let tables = super::weight_tables(big.orders(), &w);
            let s32 = super::weighted_sum_within(&big, &tables, 32);
            let s64 = super::weighted_sum_within(&big, &tables, 64);
            assert!(s32 <= s64 * (1.0 + 1e-12));

            let wp = WeightVector::new(vec![a1 + rng.gen_range(0.0..1.0), a2]);
            let s_w = weighted_partial_sum(&big, &w).unwrap();
            let s_wp = weighted_partial_sum(&big, &wp).unwrap();
            assert!(s_w <= s_wp * (1.0 + 1e-12));
        }
    }

    #[test]
    fn derivative_shift_examples() {
        // f = z1 z2, i = 0, weight (1,1): shifted norm 2.
        let cb = poly_box(&[(&[1, 1], c(1.0, 0.0))], 2, &[2, 2]);
        let w = WeightVector::isotropic(2, 1.0);
        assert_eq!(derivative_shift_norm(&cb, 0, &w).unwrap(), 2.0);

        // f = z1^2 in one variable, weight (0): 4 * 2^{-2} = 1.
        let cb = poly_box(&[(&[2], c(1.0, 0.0))], 1, &[3]);
        let w = WeightVector::isotropic(1, 0.0);
        assert_eq!(derivative_shift_norm(&cb, 0, &w).unwrap(), 1.0);

        // Constants vanish.
        let cb = poly_box(&[(&[0, 0], c(3.0, 0.0))], 2, &[1, 1]);
        let w = WeightVector::isotropic(2, 1.0);
        assert_eq!(derivative_shift_norm(&cb, 0, &w).unwrap(), 0.0);
    }

    #[test]
    fn derivative_shift_monomial_ratio() {
        // For monomials the ratio shifted/plain equals (k_i/(1+k_i))^{alpha_i}.
        for k in 1..6u32 {
            for &alpha in &[-1.5, -0.5, 0.5, 1.5] {
                let cb = poly_box(&[(&[k, 2], c(0.7, -0.3))], 2, &[8, 8]);
                let w = WeightVector::new(vec![alpha, 0.25]);
                let plain = weighted_partial_sum(&cb, &w).unwrap();
                let shifted = derivative_shift_norm(&cb, 0, &w).unwrap();
                let expect = (k as f64 / (1.0 + k as f64)).powf(alpha);
                let ratio = shifted / plain;
                assert!((ratio - expect).abs() < 1e-12);
                let bound = 2.0f64.powf(alpha.abs());
                assert!(ratio <= bound && ratio >= 1.0 / bound);
            }
        }
    }

    #[test]
    fn classifier_synthetic_series() {
        // Coefficients (1+k)^{-s/2} make the weight-0 series sum (1+k)^{-s}.
        let schedule = [32, 64, 128, 256, 512, 1024];
        let cfg = ClassifyConfig::default();
        let w = WeightVector::isotropic(1, 0.0);

        let convergent = FnSource {
            n: 1,
            f: |e: &[u32]| c(((1 + e[0]) as f64).powf(-0.6), 0.0),
        };
        let v = classify_membership(&convergent, &w, &schedule, &cfg).unwrap();
        assert_eq!(v.status, Membership::Convergent, "s=1.2: {:?}", v.tail_exponent);
        assert!((v.tail_exponent + 1.2).abs() < 0.05);
        let est = v.norm_estimate.unwrap();
        // zeta(1.2) by direct sum plus an integral tail correction.
        let cut = 100_000u64;
        let exact: f64 = (1..=cut).map(|k| (k as f64).powf(-1.2)).sum::<f64>()
            + (cut as f64).powf(-0.2) / 0.2
            - 0.5 * (cut as f64).powf(-1.2);
        assert!((est - exact).abs() < 0.05 * exact, "{est} vs {exact}");

        let divergent = FnSource {
            n: 1,
            f: |e: &[u32]| c(((1 + e[0]) as f64).powf(-0.4), 0.0),
        };
        let v = classify_membership(&divergent, &w, &schedule, &cfg).unwrap();
        assert_eq!(v.status, Membership::Divergent);
        assert!((v.tail_exponent + 0.8).abs() < 0.05);
        assert!(v.norm_estimate.is_none());

        for pair in v.partial_sums.windows(2) {
            assert!(pair[0].1 <= pair[1].1);
        }
    }

    #[test]
    fn classifier_polynomial_is_convergent() {
        let q = MultiPoly::from_terms(2, [(mi(&[1, 1]), c(2.0, 0.0))]).unwrap();
        let one = MultiPoly::constant(2, c(1.0, 0.0));
        let src = RationalSource {
            numerator: &q,
            denominator: &one,
            cfg: ExpandConfig::default(),
        };
        let v = classify_membership(
            &src,
            &WeightVector::isotropic(2, 3.0),
            &[8, 16, 32, 64],
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert_eq!(v.status, Membership::Convergent);
        // Single coefficient 2 at (1,1): 2^3 * 2^3 * |2|^2.
        assert_eq!(v.norm_estimate, Some(256.0));
    }

    #[test]
    fn classifier_rejects_bad_schedules() {
        let one = MultiPoly::constant(1, c(1.0, 0.0));
        let src = RationalSource {
            numerator: &one,
            denominator: &one,
            cfg: ExpandConfig::default(),
        };
        let w = WeightVector::isotropic(1, 0.0);
        let cfg = ClassifyConfig::default();
        assert!(matches!(
            classify_membership(&src, &w, &[8, 16, 32], &cfg),
            Err(DirichletError::ScheduleTooShort { .. })
        ));
        assert!(matches!(
            classify_membership(&src, &w, &[8, 16, 16, 32], &cfg),
            Err(DirichletError::ScheduleNotIncreasing)
        ));
    }

    #[test]
    fn integral_unweighted_bidisk_area() {
        let f = |_: &[Complex64]| c(1.0, 0.0);
        let w = WeightVector::isotropic(2, -1.0);
        let est = integral_norm_leq0(&f, 2, &w, &QuadConfig::default()).unwrap();
        let target = std::f64::consts::PI * std::f64::consts::PI;
        assert!(est.converged);
        assert!((est.value - target).abs() < 1e-6 * target, "{}", est.value);
    }

    #[test]
    fn integral_alpha_minus_two_disk() {
        let f = |_: &[Complex64]| c(1.0, 0.0);
        let w = WeightVector::isotropic(1, -2.0);
        let est = integral_norm_leq0(&f, 1, &w, &QuadConfig::default()).unwrap();
        let target = std::f64::consts::FRAC_PI_2;
        assert!((est.value - target).abs() < 1e-9 * target, "{}", est.value);
    }

    #[test]
    fn integral_rejects_positive_weight() {
        let f = |_: &[Complex64]| c(1.0, 0.0);
        let w = WeightVector::new(vec![-1.0, 0.5]);
        assert!(matches!(
            integral_norm_leq0(&f, 2, &w, &QuadConfig::default()),
            Err(DirichletError::PositiveWeight { index: 1, .. })
        ));
    }

    #[test]
    fn integral_detects_log_divergence_at_zero_weight() {
        // alpha = 0 makes the plain weight (1-r^2)^{-1} non-integrable.
        let f = |_: &[Complex64]| c(1.0, 0.0);
        let w = WeightVector::isotropic(1, 0.0);
        match integral_norm_leq0(&f, 1, &w, &QuadConfig::default()) {
            Err(DirichletError::IntegralDiverging {
                growth_exponent, ..
            }) => {
                assert!(growth_exponent > 0.0);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn integral_rational_with_boundary_zero_is_stable() {
        // 1/(2 - z1 - z2) at weight (-1,-1): finite and stable under refinement.
        let p = MultiPoly::from_terms(
            2,
            [
                (mi(&[0, 0]), c(2.0, 0.0)),
                (mi(&[1, 0]), c(-1.0, 0.0)),
                (mi(&[0, 1]), c(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let f = move |z: &[Complex64]| p.eval(z).unwrap().inv();
        let w = WeightVector::isotropic(2, -1.0);
        let quad = QuadConfig {
            geometric_levels: 8,
            angular_nodes: 64,
            max_refinements: 2,
            rtol: 5e-3,
            ..QuadConfig::default()
        };
        let est = integral_norm_leq0(&f, 2, &w, &quad).unwrap();
        assert!(est.value.is_finite() && est.value > 0.0);
        assert!(est.converged, "delta {}", est.last_delta);

        // Cross-check against pi^2 times the coefficient norm.
        let one = MultiPoly::constant(2, c(1.0, 0.0));
        let p2 = MultiPoly::from_terms(
            2,
            [
                (mi(&[0, 0]), c(2.0, 0.0)),
                (mi(&[1, 0]), c(-1.0, 0.0)),
                (mi(&[0, 1]), c(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let cb = expand_ratio(&one, &p2, &mi(&[400, 400]), &ExpandConfig::default()).unwrap();
        let coeff = weighted_partial_sum(&cb, &w).unwrap();
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let ratio = est.value / (pi2 * coeff);
        assert!(ratio > 0.8 && ratio < 1.2, "ratio {ratio}");
    }
}
