//! `H^p` means of RIF partial derivatives on interior tori, the measure of
//! the near-singular slice-parameter sets, and per-variable integrability
//! thresholds combining both routes.
//!
//! The `H^p` quantity reported everywhere here is the p-th power mean
//! `(2 pi)^{-n} int |d phi / d z_k|^p` on `r T^n`, extrapolated `r -> 1`;
//! at `p = 1` this is the `H^1` norm itself.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{adaptive_simpson, fit_line, fit_line_weighted, KahanSum};
use crate::poly::PolyError;
use crate::rif::{uniform_torus, Rif, RifError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("variable index {index} out of range for {vars} variables")]
    IndexOutOfRange { index: usize, vars: usize },
    #[error("exponent must be positive, got {p}")]
    NonpositiveExponent { p: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("x grid must be >= 1, nonempty and strictly increasing")]
    BadGrid,
    #[error("radius schedule must be nonempty, strictly increasing, inside (0, 1)")]
    BadRadii,
    #[error("{count} of {total} slices were degenerate; the profile is unreliable")]
    DegenerateSlices { count: usize, total: usize },
    #[error("not enough resolved measure data to fit a tail exponent")]
    UnresolvedTail,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Rif(#[from] RifError),
}

/// Quadrature budget for one `H^p` estimate.
#[derive(Debug, Clone)]
pub struct HpConfig {
    /// Interior radii approaching 1 (default `1 - 2^-j`, j = 3..=10).
    pub radii: Vec<f64>,
    /// Minimum outer angular nodes per torus dimension.
    pub outer_base: usize,
    /// Outer nodes scale like `outer_factor / sqrt(1 - r)`.
    pub outer_factor: f64,
    /// Cap on outer nodes per dimension.
    pub outer_max: usize,
    /// Relative tolerance of the inner adaptive integration.
    pub inner_rtol: f64,
    pub inner_depth: u32,
    /// The radial sequence counts as stabilized when the ratio of successive
    /// increments drops to this value or below.
    pub ratio_cutoff: f64,
}

impl Default for HpConfig {
    fn default() -> Self {
        HpConfig {
            radii: (3..=10).map(|j| 1.0 - 0.5f64.powi(j)).collect(),
            outer_base: 64,
            outer_factor: 32.0,
            outer_max: 1024,
            inner_rtol: 1e-5,
            inner_depth: 28,
            ratio_cutoff: 0.97,
        }
    }
}

impl HpConfig {
    /// A cheaper budget for threshold bisection.
    pub fn coarse() -> Self {
        HpConfig {
            radii: (3..=9).map(|j| 1.0 - 0.5f64.powi(j)).collect(),
            outer_base: 64,
            outer_factor: 16.0,
            outer_max: 512,
            inner_rtol: 1e-4,
            inner_depth: 24,
            ratio_cutoff: 0.97,
        }
    }
}

/// Radial means of `|d phi / d z_k|^p` with their extrapolation.
#[derive(Debug, Clone)]
pub struct HpEstimate {
    /// `(radius, mean)` per scheduled radius.
    pub per_radius: Vec<(f64, f64)>,
    /// Aitken extrapolation of the radial means to `r = 1`; equals the last
    /// mean when the sequence has not stabilized.
    pub extrapolated: f64,
    /// Whether the radial sequence stabilized (fitted growth below tolerance).
    pub converged: bool,
    /// Fitted exponent g in `mean ~ (1-r)^{-g}` over the last radii.
    pub growth_exponent: f64,
    /// Radial means should not decrease; false flags a quadrature problem.
    pub monotone_in_r: bool,
}

/// Mean of `|d phi / d z_k|^p` over `r T^n` per radius, extrapolated to the
/// boundary. Non-stabilizing sequences are returned with `converged = false`
/// and their fitted growth exponent rather than as an error.
pub fn hp_norm_partial(f: &Rif, k: usize, p: f64, cfg: &HpConfig) -> Result<HpEstimate, HardyError> {
    let n = f.vars();
    if k >= n {
        return Err(HardyError::IndexOutOfRange { index: k, vars: n });
    }
    if p <= 0.0 {
        return Err(HardyError::NonpositiveExponent { p });
    }
    if cfg.radii.len() < 3
        || cfg.radii.windows(2).any(|w| w[0] >= w[1])
        || cfg.radii.iter().any(|&r| r <= 0.0 || r >= 1.0)
    {
        return Err(HardyError::BadRadii);
    }

    // Numerator of d phi / d z_k; the denominator is p^2.
    let dp = f.denominator().partial_derivative(k)?;
    let dq = f.numerator().partial_derivative(k)?;
    let deriv_num = &(&dq * f.denominator()) - &(f.numerator() * &dp);

    let mut per_radius = Vec::with_capacity(cfg.radii.len());
    for &r in &cfg.radii {
        let outer = ((cfg.outer_factor / (1.0 - r).sqrt()).ceil() as usize)
            .max(cfg.outer_base)
            .min(cfg.outer_max);
        let mean = radial_mean(f, &deriv_num, k, p, r, outer, cfg)?;
        per_radius.push((r, mean));
    }

    let values: Vec<f64> = per_radius.iter().map(|&(_, v)| v).collect();
    let monotone = values
        .windows(2)
        .all(|w| w[1] >= w[0] - 1e-6 * w[0].abs().max(1e-300));

    // Growth fit over the last few radii: ln(mean) against ln(1/(1-r)).
    // Diagnostic only; the convergence decision uses increment ratios.
    let m = values.len();
    let take = m.min(4);
    let xs: Vec<f64> = per_radius[m - take..]
        .iter()
        .map(|&(r, _)| -(1.0 - r).ln())
        .collect();
    let ys: Vec<f64> = values[m - take..]
        .iter()
        .map(|v| v.max(1e-300).ln())
        .collect();
    let growth = if take >= 2 { fit_line(&xs, &ys).slope } else { 0.0 };

    // Stabilized when the last increments are either negligible or decay
    // geometrically; a ratio at or above 1 means the mean keeps growing.
    let scale = values[m - 1].abs().max(1e-300);
    let d1 = values[m - 2] - values[m - 3];
    let d2 = values[m - 1] - values[m - 2];
    let flat = d2.abs() <= 1e-3 * scale && d1.abs() <= 2e-3 * scale;
    let rho = if d1.abs() > 0.0 { d2 / d1 } else { 0.0 };
    let geometric = d1 > 0.0 && d2 > 0.0 && rho <= cfg.ratio_cutoff;
    let converged = flat || geometric;

    let extrapolated = if geometric {
        values[m - 1] + d2 * rho / (1.0 - rho)
    } else {
        values[m - 1]
    };

    Ok(HpEstimate {
        per_radius,
        extrapolated,
        converged,
        growth_exponent: growth,
        monotone_in_r: monotone,
    })
}

/// Mean over `r T^n`: outer uniform grid over the torus parameters, inner
/// adaptive integration in the free variable.
fn radial_mean(
    f: &Rif,
    deriv_num: &crate::poly::MultiPoly,
    k: usize,
    p: f64,
    r: f64,
    outer: usize,
    cfg: &HpConfig,
) -> Result<f64, HardyError> {
    let n = f.vars();
    let tau = std::f64::consts::TAU;
    let denom = f.denominator();
    let is_p1 = (p - 1.0).abs() < 1e-15;

    // All outer angle tuples, row by row in the first angle for parallelism.
    let rows = if n == 1 { 1 } else { outer };
    let partials: Vec<f64> = (0..rows)
        .into_par_iter()
        .map(|row| {
            let mut acc = KahanSum::new();
            let mut zhat = vec![Complex64::new(0.0, 0.0); n - 1];
            let cols = if n <= 2 { 1 } else { outer.pow((n - 2) as u32) };
            let mut idx = vec![0usize; n.saturating_sub(2)];
            for _ in 0..cols {
                if n >= 2 {
                    zhat[0] = Complex64::from_polar(r, tau * row as f64 / outer as f64);
                    for (d, &i) in idx.iter().enumerate() {
                        zhat[d + 1] = Complex64::from_polar(r, tau * i as f64 / outer as f64);
                    }
                }
                let num_slice = deriv_num.slice(k, &zhat).expect("dims");
                let den_slice = denom.slice(k, &zhat).expect("dims");
                let g = |theta: f64| {
                    let z = Complex64::from_polar(r, theta);
                    let nm = num_slice.eval(z).norm_sqr();
                    let dm = den_slice.eval(z).norm_sqr();
                    if is_p1 {
                        nm.sqrt() / dm
                    } else {
                        nm.powf(0.5 * p) / dm.powf(p)
                    }
                };
                // Coarse scan sets the absolute tolerance scale.
                let mut coarse = 0.0f64;
                for j in 0..16 {
                    coarse += g(tau * (j as f64 + 0.5) / 16.0);
                }
                coarse = coarse * tau / 16.0;
                let tol = cfg.inner_rtol * coarse.max(1e-12);
                let integral = adaptive_simpson(&g, 0.0, tau, tol, cfg.inner_depth);
                acc.add(integral / tau);

                // Odometer over the remaining outer angles.
                let mut done = true;
                for d in (0..idx.len()).rev() {
                    if idx[d] + 1 < outer {
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
            acc.value()
        })
        .collect();

    let mut total = KahanSum::new();
    for v in partials {
        total.add(v);
    }
    let outer_count = if n == 1 {
        1.0
    } else {
        (outer as f64).powi((n - 1) as i32)
    };
    Ok(total.value() / outer_count)
}

/// Monte Carlo profile of the measure of `{zhat : delta(phi, zhat) < 1/x}`.
#[derive(Debug, Clone)]
pub struct OmegaProfile {
    pub xs: Vec<f64>,
    /// Normalized measure estimates (fractions of the torus), nonincreasing
    /// in x up to sampling error.
    pub measures: Vec<f64>,
    pub std_errs: Vec<f64>,
    /// Fitted exponent s in `measure ~ x^s` over the largest well-resolved
    /// decade; `-inf` when the measure vanishes at the tail.
    pub fitted_exponent: f64,
    pub fit_half_width: f64,
    pub fit_points: usize,
    /// True when the measure is exactly zero at the largest grid points
    /// (slice zeros stay away from the torus).
    pub tail_vanishes: bool,
    pub samples: usize,
    pub degenerate: usize,
}

/// Largest tolerated fraction of degenerate (identically zero) slices.
const DEGENERATE_CAP: f64 = 0.01;

/// Estimates the measure profile from `m` uniform slice parameters shared
/// across the whole x grid. Deterministic for a given seed: samples are
/// generated in fixed blocks regardless of thread count.
pub fn omega_measure(
    f: &Rif,
    k: usize,
    xs: &[f64],
    m: usize,
    seed: u64,
) -> Result<OmegaProfile, HardyError> {
    let n = f.vars();
    if k >= n {
        return Err(HardyError::IndexOutOfRange { index: k, vars: n });
    }
    if m < 1000 {
        return Err(HardyError::TooFewSamples {
            needed: 1000,
            got: m,
        });
    }
    if xs.is_empty() || xs.iter().any(|&x| x < 1.0) || xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HardyError::BadGrid);
    }

    const BLOCK: usize = 1024;
    let blocks = m.div_ceil(BLOCK);
    let deltas: Vec<Vec<Option<f64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(b as u64));
            let count = BLOCK.min(m - b * BLOCK);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let zhat = uniform_torus(&mut rng, n - 1);
                match f.slice_blaschke(k, &zhat) {
                    // No interior zero: this parameter is in no Omega_x.
                    Ok(s) => out.push(Some(s.delta.unwrap_or(f64::INFINITY))),
                    Err(RifError::SliceIdenticallyZero) => out.push(None),
                    Err(e) => panic!("slice probe failed: {e}"),
                }
            }
            out
        })
        .collect();

    let mut delta_values = Vec::with_capacity(m);
    let mut degenerate = 0usize;
    for block in deltas {
        for d in block {
            match d {
                Some(v) => delta_values.push(v),
                None => degenerate += 1,
            }
        }
    }
    if (degenerate as f64) > DEGENERATE_CAP * m as f64 {
        return Err(HardyError::DegenerateSlices {
            count: degenerate,
            total: m,
        });
    }
    let valid = delta_values.len();

    // Counting via a sort: measure(x) = #{delta < 1/x} / valid.
    delta_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut measures = Vec::with_capacity(xs.len());
    let mut std_errs = Vec::with_capacity(xs.len());
    for &x in xs {
        let cut = 1.0 / x;
        let count = delta_values.partition_point(|&d| d < cut);
        let mu = count as f64 / valid as f64;
        measures.push(mu);
        std_errs.push((mu * (1.0 - mu) / valid as f64).sqrt());
    }

    // Fit over the largest decade of x where the measure is resolved
    // (above five standard errors).
    let resolved: Vec<usize> = (0..xs.len())
        .filter(|&i| measures[i] > 0.0 && measures[i] > 5.0 * std_errs[i])
        .collect();
    let tail_vanishes = measures.last().is_some_and(|&mu| mu == 0.0);
    let (fitted_exponent, fit_half_width, fit_points) = match resolved.last() {
        Some(&hi) if !tail_vanishes || xs[hi] >= xs[xs.len() - 1] / 10.0 => {
            let x_hi = xs[hi];
            let window: Vec<usize> = resolved
                .iter()
                .copied()
                .filter(|&i| xs[i] >= x_hi / 10.0)
                .collect();
            if window.len() < 3 {
                if tail_vanishes {
                    (f64::NEG_INFINITY, 0.0, 0)
                } else {
                    return Err(HardyError::UnresolvedTail);
                }
            } else {
                let lx: Vec<f64> = window.iter().map(|&i| xs[i].ln()).collect();
                let ly: Vec<f64> = window.iter().map(|&i| measures[i].ln()).collect();
                let wts: Vec<f64> = window
                    .iter()
                    .map(|&i| (measures[i] / std_errs[i]).powi(2))
                    .collect();
                let fit = fit_line_weighted(&lx, &ly, &wts);
                (fit.slope, fit.slope_half_width(), window.len())
            }
        }
        _ => {
            if tail_vanishes {
                (f64::NEG_INFINITY, 0.0, 0)
            } else {
                return Err(HardyError::UnresolvedTail);
            }
        }
    };

    Ok(OmegaProfile {
        xs: xs.to_vec(),
        measures,
        std_errs,
        fitted_exponent,
        fit_half_width,
        fit_points,
        tail_vanishes,
        samples: m,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrabilityVerdict {
    Finite,
    Infinite,
    Inconclusive,
}

/// Level-set integral test: with `measure ~ x^s`, the integral
/// `int_1^inf measure(x) x^{p-2} dx` is finite iff `p < 1 - s`.
///
/// For `p < 1` membership is guaranteed (every RIF partial derivative has a
/// finite `H^1` mean), so the test returns `Finite` without consulting the
/// profile; the integral criterion itself is stated for `p >= 1`.
pub fn levelset_exponent_test(profile: &OmegaProfile, p: f64) -> IntegrabilityVerdict {
    if p < 1.0 {
        return IntegrabilityVerdict::Finite;
    }
    if profile.tail_vanishes && profile.fitted_exponent == f64::NEG_INFINITY {
        return IntegrabilityVerdict::Finite;
    }
    let s = profile.fitted_exponent;
    let band = profile.fit_half_width.max(0.02);
    let threshold = 1.0 - s;
    if p < threshold - band {
        IntegrabilityVerdict::Finite
    } else if p > threshold + band {
        IntegrabilityVerdict::Infinite
    } else {
        IntegrabilityVerdict::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Open,
    Closed,
}

/// One per-variable integrability threshold with its provenance.
#[derive(Debug, Clone)]
pub struct ThresholdEntry {
    pub variable: usize,
    /// Estimated supremum of p with a finite `H^p` mean; `f64::INFINITY`
    /// for bounded derivatives.
    pub threshold: f64,
    pub endpoint: Endpoint,
    pub half_width: f64,
    pub bounded_derivative: bool,
    pub levelset_threshold: Option<f64>,
    pub bisection_threshold: Option<f64>,
    /// False when the two routes disagree beyond tolerance; the levelset
    /// value is still reported as `threshold`.
    pub conclusive: bool,
}

/// Per-variable thresholds for all partial derivatives.
#[derive(Debug, Clone)]
pub struct IntegrabilityProfile {
    pub entries: Vec<ThresholdEntry>,
}

impl IntegrabilityProfile {
    /// Builds a profile from plain thresholds; `f64::INFINITY` marks a
    /// bounded derivative.
    pub fn from_thresholds(values: &[f64], endpoint: Endpoint) -> Self {
        IntegrabilityProfile {
            entries: values
                .iter()
                .enumerate()
                .map(|(variable, &threshold)| ThresholdEntry {
                    variable,
                    threshold,
                    endpoint,
                    half_width: 0.0,
                    bounded_derivative: !threshold.is_finite(),
                    levelset_threshold: None,
                    bisection_threshold: None,
                    conclusive: true,
                })
                .collect(),
        }
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.threshold).collect()
    }
}

/// Budget for `hp_threshold`.
#[derive(Debug, Clone)]
pub struct ThresholdConfig {
    pub xs: Vec<f64>,
    pub omega_samples: usize,
    pub seed: u64,
    /// Bisection range and step count for the direct route; `None` skips it.
    pub bisect: Option<(f64, f64, usize)>,
    pub hp: HpConfig,
    pub agreement_tol: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            xs: (2..=14).map(|j| 2f64.powi(j)).collect(),
            omega_samples: 50_000,
            seed: 11,
            bisect: Some((1.0, 3.0, 6)),
            hp: HpConfig::coarse(),
            agreement_tol: 0.15,
        }
    }
}

/// Estimates the `H^p` threshold for `d phi / d z_k` by the level-set route,
/// cross-checked by direct stability bisection of the radial means.
///
/// The reported threshold is the level-set value clamped from below by 1
/// (membership at 1 always holds); the endpoint is closed exactly when that
/// clamp binds.
pub fn hp_threshold(f: &Rif, k: usize, cfg: &ThresholdConfig) -> Result<ThresholdEntry, HardyError> {
    let profile = omega_measure(f, k, &cfg.xs, cfg.omega_samples, cfg.seed)?;
    let bounded = profile.tail_vanishes && profile.fitted_exponent == f64::NEG_INFINITY;
    let levelset = if bounded {
        f64::INFINITY
    } else {
        1.0 - profile.fitted_exponent
    };

    let bisection = match cfg.bisect {
        None => None,
        Some((lo, hi, steps)) => {
            let stable = |p: f64| -> Result<bool, HardyError> {
                Ok(hp_norm_partial(f, k, p, &cfg.hp)?.converged)
            };
            if stable(hi)? {
                Some(f64::INFINITY)
            } else if !stable(lo)? {
                Some(lo)
            } else {
                let (mut lo, mut hi) = (lo, hi);
                for _ in 0..steps {
                    let mid = 0.5 * (lo + hi);
                    if stable(mid)? {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(0.5 * (lo + hi))
            }
        }
    };

    let conclusive = match bisection {
        None => true,
        Some(b) => {
            if bounded || !levelset.is_finite() || !b.is_finite() {
                // Routes agree only if both point beyond the bisection range.
                !levelset.is_finite() == !b.is_finite()
            } else {
                (levelset - b).abs() <= cfg.agreement_tol
            }
        }
    };

    let clamped = levelset.max(1.0);
    Ok(ThresholdEntry {
        variable: k,
        threshold: clamped,
        endpoint: if levelset <= 1.0 {
            Endpoint::Closed
        } else {
            Endpoint::Open
        },
        half_width: profile.fit_half_width,
        bounded_derivative: bounded,
        levelset_threshold: Some(levelset),
        bisection_threshold: bisection,
        conclusive,
    })
}

/// Thresholds for every variable of the RIF.
pub fn integrability_profile(f: &Rif, cfg: &ThresholdConfig) -> Result<IntegrabilityProfile, HardyError> {
    let entries = (0..f.vars())
        .map(|k| hp_threshold(f, k, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntegrabilityProfile { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rif::{build_rif, ProbeConfig};
    use crate::samples;

    fn phi2() -> Rif {
        build_rif(samples::denominator_sum(2), &ProbeConfig::default()).unwrap()
    }

    #[test]
    fn h1_mean_equals_degree_two_var() {
        let f = phi2();
        for k in 0..2 {
            let est = hp_norm_partial(&f, k, 1.0, &HpConfig::default()).unwrap();
            assert!(est.converged, "growth {}", est.growth_exponent);
            assert!(est.monotone_in_r, "{:?}", est.per_radius);
            assert!(
                (est.extrapolated - 1.0).abs() < 0.01,
                "k={k}: {} ({:?})",
                est.extrapolated,
                est.per_radius
            );
        }
    }

    #[test]
    fn high_p_mean_is_unstable_for_phi2() {
        let f = phi2();
        let est = hp_norm_partial(&f, 0, 1.8, &HpConfig::default()).unwrap();
        assert!(!est.converged, "growth {}", est.growth_exponent);
        assert!(est.growth_exponent > 0.1);
    }

    #[test]
    fn bounded_derivative_direction_is_finite_at_large_p() {
        let f = build_rif(samples::denominator_mixed3(), &ProbeConfig::default()).unwrap();
        let cfg = HpConfig {
            radii: (3..=8).map(|j| 1.0 - 0.5f64.powi(j)).collect(),
            outer_max: 256,
            ..HpConfig::default()
        };
        let est = hp_norm_partial(&f, 2, 8.0, &cfg).unwrap();
        assert!(est.converged, "growth {}", est.growth_exponent);
        assert!(est.extrapolated.is_finite());
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = phi2();
        assert!(matches!(
            hp_norm_partial(&f, 5, 1.0, &HpConfig::default()),
            Err(HardyError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            hp_norm_partial(&f, 0, -1.0, &HpConfig::default()),
            Err(HardyError::NonpositiveExponent { .. })
        ));
        assert!(matches!(
            omega_measure(&f, 0, &[4.0, 2.0], 2000, 1),
            Err(HardyError::BadGrid)
        ));
        assert!(matches!(
            omega_measure(&f, 0, &[2.0, 4.0], 10, 1),
            Err(HardyError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn omega_exponent_for_phi2() {
        let f = phi2();
        let xs: Vec<f64> = (2..=14).map(|j| 2f64.powi(j)).collect();
        let profile = omega_measure(&f, 0, &xs, 100_000, 42).unwrap();
        assert!(
            (profile.fitted_exponent + 0.5).abs() < 0.1,
            "s = {}",
            profile.fitted_exponent
        );
        // Nonincreasing beyond two standard errors.
        for i in 1..profile.measures.len() {
            let slack = 2.0 * (profile.std_errs[i] + profile.std_errs[i - 1]);
            assert!(profile.measures[i] <= profile.measures[i - 1] + slack);
        }
        // Exact closed form: delta(theta) < 1/x iff cos(theta) exceeds
        // (5 - (1 - 1/x)^{-2}) / 4, so the measure is arccos(...) / pi.
        for (i, &x) in profile.xs.iter().enumerate() {
            if profile.measures[i] > 10.0 * profile.std_errs[i] {
                let cut = (5.0 - (1.0 - 1.0 / x).powi(-2)) / 4.0;
                assert!(cut.abs() < 1.0);
                let expect = cut.acos() / std::f64::consts::PI;
                let err = (profile.measures[i] - expect).abs();
                assert!(
                    err < 6.0 * profile.std_errs[i] + 1e-3 * expect,
                    "x={x}: {} vs {expect}",
                    profile.measures[i]
                );
            }
        }
    }

    #[test]
    fn omega_vanishes_without_torus_zeros() {
        use num_complex::Complex64;
        use crate::poly::{MultiIndex, MultiPoly};
        // 1 - z1 z2 / 2 has no boundary zeros; delta is bounded below.
        let p = MultiPoly::from_terms(
            2,
            [
                (MultiIndex::zeros(2), Complex64::new(1.0, 0.0)),
                (MultiIndex::new(vec![1, 1]), Complex64::new(-0.5, 0.0)),
            ],
        )
        .unwrap();
        let f = build_rif(p, &ProbeConfig::default()).unwrap();
        let xs = [2.0, 4.0, 8.0, 16.0, 32.0];
        let profile = omega_measure(&f, 0, &xs, 2000, 3).unwrap();
        // delta = 1 - 1/2 = 1/2 everywhere, so measure = 0 for x > 2.
        assert!(profile.tail_vanishes);
        assert_eq!(profile.measures.last(), Some(&0.0));
        assert_eq!(
            levelset_exponent_test(&profile, 5.0),
            IntegrabilityVerdict::Finite
        );
    }

    #[test]
    fn levelset_thresholds_from_exponents() {
        let mk = |s: f64| OmegaProfile {
            xs: vec![10.0, 100.0],
            measures: vec![0.1, 0.05],
            std_errs: vec![1e-4, 1e-4],
            fitted_exponent: s,
            fit_half_width: 0.01,
            fit_points: 4,
            tail_vanishes: false,
            samples: 10_000,
            degenerate: 0,
        };
        // s = -1/2: threshold 3/2.
        let p = mk(-0.5);
        assert_eq!(levelset_exponent_test(&p, 1.4), IntegrabilityVerdict::Finite);
        assert_eq!(levelset_exponent_test(&p, 1.6), IntegrabilityVerdict::Infinite);
        assert_eq!(
            levelset_exponent_test(&p, 1.505),
            IntegrabilityVerdict::Inconclusive
        );
        // s = -1: threshold 2.
        let p = mk(-1.0);
        assert_eq!(levelset_exponent_test(&p, 1.9), IntegrabilityVerdict::Finite);
        assert_eq!(levelset_exponent_test(&p, 2.1), IntegrabilityVerdict::Infinite);
        // s = 0 (measure bounded below): threshold 1.
        let p = mk(0.0);
        assert_eq!(levelset_exponent_test(&p, 1.2), IntegrabilityVerdict::Infinite);
        assert_eq!(levelset_exponent_test(&p, 0.9), IntegrabilityVerdict::Finite);
    }

    #[test]
    fn omega_exponent_for_three_var_sum() {
        // For 3 - z1 - z2 - z3 the singular parameter set is a point in T^2,
        // so the measure decays like 1/x and the threshold sits at 2.
        let f = build_rif(samples::denominator_sum(3), &ProbeConfig::default()).unwrap();
        let xs: Vec<f64> = (1..=11).map(|j| 2f64.powi(j)).collect();
        let profile = omega_measure(&f, 0, &xs, 200_000, 9).unwrap();
        assert!(
            (profile.fitted_exponent + 1.0).abs() < 0.2,
            "s = {}",
            profile.fitted_exponent
        );
        assert_eq!(
            levelset_exponent_test(&profile, 2.0 - 0.3),
            IntegrabilityVerdict::Finite
        );
        assert_eq!(
            levelset_exponent_test(&profile, 2.0 + 0.3),
            IntegrabilityVerdict::Infinite
        );
    }

    #[test]
    fn threshold_routes_agree_for_phi2() {
        let f = phi2();
        let entry = hp_threshold(&f, 0, &ThresholdConfig::default()).unwrap();
        assert!(entry.conclusive, "{entry:?}");
        assert!(
            (entry.threshold - 1.5).abs() < 0.1,
            "threshold {}",
            entry.threshold
        );
        assert_eq!(entry.endpoint, Endpoint::Open);
        let lv = entry.levelset_threshold.unwrap();
        let bi = entry.bisection_threshold.unwrap();
        assert!((lv - bi).abs() <= 0.15, "levelset {lv} vs bisection {bi}");
    }

    #[test]
    fn threshold_for_bounded_direction() {
        let f = build_rif(samples::denominator_mixed3(), &ProbeConfig::default()).unwrap();
        let cfg = ThresholdConfig {
            omega_samples: 5_000,
            bisect: Some((1.0, 3.0, 4)),
            hp: HpConfig {
                radii: (3..=7).map(|j| 1.0 - 0.5f64.powi(j)).collect(),
                outer_max: 128,
                ..HpConfig::coarse()
            },
            ..ThresholdConfig::default()
        };
        let entry = hp_threshold(&f, 2, &cfg).unwrap();
        assert!(entry.bounded_derivative);
        assert!(entry.threshold.is_infinite());
        assert!(entry.conclusive);
    }
}
