//! Numerical estimation of the decay exponent of `|p|` near an isolated
//! boundary zero, and the membership verdict it implies for the associated
//! RIF.
//!
//! The probe samples shrinking polydisk neighborhoods of the singular point
//! with the boundary-tangential parametrization `z_j = 1 - r_j e^{i v_j}`,
//! `|v_j| <= arccos(r_j / 2)`, minimizing `|p|` over angles per sampled
//! radial direction. The lower envelope of `log |p|` against `log dist`
//! yields the fitted exponent.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::fit_line;
use crate::poly::{MultiPoly, PolyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LojaError {
    #[error("point is not a zero of the polynomial (|p| = {modulus:.3e})")]
    NotAZero { modulus: f64 },
    #[error("point component {index} is off the torus (|z| = {modulus})")]
    PointNotOnTorus { index: usize, modulus: f64 },
    #[error(
        "|p| = {modulus:.3e} at a torus sample away from the declared zero; multi-zero denominators are unsupported"
    )]
    MultipleBoundaryZeros {
        point: Vec<Complex64>,
        modulus: f64,
    },
    #[error("|p| vanished at an interior probe point; denominator is unstable")]
    InteriorZeroEncountered { point: Vec<Complex64> },
    #[error("hypothesis requires alpha < 0, got {alpha}")]
    NonnegativeAlpha { alpha: f64 },
    #[error("need at least 4 probe scales")]
    TooFewScales,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Probe budget and tolerances.
#[derive(Debug, Clone)]
pub struct LojaConfig {
    /// Distance scales, decreasing, default geometric from 1e-1 to 1e-4.
    pub scales: Vec<f64>,
    /// Radial directions sampled per scale.
    pub directions_per_scale: usize,
    /// Coordinate-descent sweeps of the angle optimization.
    pub sweeps: usize,
    /// Golden-section iterations per coordinate.
    pub angle_iters: usize,
    /// Only scales within this many decades of the smallest enter the fit.
    pub fit_decades: f64,
    /// Torus grid budget for the single-zero screen.
    pub torus_check_samples: usize,
    /// Neighborhood of the declared zero excluded from the screen.
    pub exclusion_radius: f64,
    /// `|p(point)|` must be below this fraction of the coefficient scale.
    pub zero_tol: f64,
    pub seed: u64,
}

impl Default for LojaConfig {
    fn default() -> Self {
        LojaConfig {
            scales: (0..=24)
                .map(|k| 10f64.powf(-1.0 - 3.0 * k as f64 / 24.0))
                .collect(),
            directions_per_scale: 48,
            sweeps: 3,
            angle_iters: 24,
            fit_decades: 2.0,
            torus_check_samples: 4096,
            exclusion_radius: 0.3,
            zero_tol: 1e-8,
            seed: 13,
        }
    }
}

/// Fitted lower-envelope decay of `|p|` near the singular point.
#[derive(Debug, Clone)]
pub struct LojaEstimate {
    pub singular_point: Vec<Complex64>,
    /// Fitted exponent of `min |p| ~ C dist^q`.
    pub q_hat: f64,
    /// Fitted constant `C`.
    pub c_hat: f64,
    /// Confidence half-width of the fitted exponent.
    pub half_width: f64,
    pub samples: usize,
    /// `(log10 dist, log10 min |p|)` per probed scale.
    pub envelope: Vec<(f64, f64)>,
}

/// Estimates the restricted-approach decay exponent of `|p|` at a declared
/// boundary zero.
pub fn loja_probe(
    p: &MultiPoly,
    point: &[Complex64],
    cfg: &LojaConfig,
) -> Result<LojaEstimate, LojaError> {
    let n = p.vars();
    if point.len() != n {
        return Err(LojaError::Poly(PolyError::DimensionMismatch {
            expected: n,
            got: point.len(),
        }));
    }
    for (i, w) in point.iter().enumerate() {
        if (w.norm() - 1.0).abs() > 1e-8 {
            return Err(LojaError::PointNotOnTorus {
                index: i,
                modulus: w.norm(),
            });
        }
    }
    if cfg.scales.len() < 4 {
        return Err(LojaError::TooFewScales);
    }
    let scale = p.coeff_norm_l1().max(f64::MIN_POSITIVE);
    let at_point = p.eval(point)?.norm();
    if at_point > cfg.zero_tol * scale {
        return Err(LojaError::NotAZero { modulus: at_point });
    }

    // Rotate coordinates so the singular point sits at (1, ..., 1):
    // q(z) := p(w_1 z_1, ..., w_n z_n) multiplies each coefficient by w^a.
    let rotated = MultiPoly::from_terms(
        n,
        p.terms().map(|(idx, c)| {
            let mut factor = Complex64::new(1.0, 0.0);
            for i in 0..n {
                for _ in 0..idx.get(i) {
                    factor *= point[i];
                }
            }
            (idx.clone(), c * factor)
        }),
    )?;

    // Per-scale directed envelope minimization, parallel over scales with
    // per-scale substreams.
    // Fixed direction list: the symmetric direction, every two-coordinate
    // equal split (worst approaches often live on sparse supports, where the
    // remaining coordinates stay on the boundary), then random directions
    // over random supports.
    let base_directions: Vec<Vec<f64>> = {
        let mut dirs = vec![vec![(1.0 / n as f64).sqrt(); n]];
        for i in 0..n {
            for j in i + 1..n {
                let mut d = vec![0.0; n];
                d[i] = std::f64::consts::FRAC_1_SQRT_2;
                d[j] = std::f64::consts::FRAC_1_SQRT_2;
                dirs.push(d);
            }
        }
        dirs
    };

    let results: Vec<Result<(f64, f64), LojaError>> = cfg
        .scales
        .par_iter()
        .enumerate()
        .map(|(si, &s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(si as u64));
            let mut best = f64::INFINITY;
            for d in 0..cfg.directions_per_scale {
                let dir: Vec<f64> = if d < base_directions.len() {
                    base_directions[d].clone()
                } else {
                    // Random support of size >= 2, spherical inside it.
                    let support = rng.gen_range(2..=n.max(2)).min(n);
                    let mut slots: Vec<usize> = (0..n).collect();
                    for i in 0..support {
                        let j = rng.gen_range(i..n);
                        slots.swap(i, j);
                    }
                    let mut v = vec![0.0; n];
                    let mut norm = 0.0;
                    for &slot in &slots[..support] {
                        let u1: f64 = rng.gen_range(1e-12..1.0);
                        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                        let g = ((-2.0 * u1.ln()).sqrt() * u2.cos()).abs();
                        v[slot] = g;
                        norm += g * g;
                    }
                    let norm = norm.sqrt().max(1e-12);
                    v.iter_mut().for_each(|x| *x /= norm);
                    v
                };
                let radii: Vec<f64> = dir.iter().map(|&d| s * d).collect();
                let m = minimize_over_angles(&rotated, &radii, cfg);
                best = best.min(m);
            }
            if best < 10.0 * f64::EPSILON * scale && s >= 0.05 {
                // At large scales every plausible envelope stays far above
                // rounding noise; a machine-zero minimum there means a zero
                // strictly inside the probe region.
                return Err(LojaError::InteriorZeroEncountered {
                    point: point.to_vec(),
                });
            }
            Ok((s.log10(), best.log10()))
        })
        .collect();

    let mut envelope = Vec::with_capacity(results.len());
    for r in results {
        envelope.push(r?);
    }

    // Envelope values near the evaluation noise floor carry no slope
    // information; drop them, then fit over the smallest `fit_decades`
    // decades of the remaining distances.
    let noise_floor = (1e3 * f64::EPSILON * scale).log10();
    let usable: Vec<(f64, f64)> = envelope
        .iter()
        .copied()
        .filter(|&(_, y)| y >= noise_floor)
        .collect();
    if usable.len() < 4 {
        return Err(LojaError::TooFewScales);
    }
    let log_min = usable
        .iter()
        .map(|&(x, _)| x)
        .fold(f64::INFINITY, f64::min);
    let window: Vec<(f64, f64)> = usable
        .iter()
        .copied()
        .filter(|&(x, _)| x <= log_min + cfg.fit_decades)
        .collect();
    let xs: Vec<f64> = window.iter().map(|&(x, _)| x).collect();
    let ys: Vec<f64> = window.iter().map(|&(_, y)| y).collect();
    let fit = fit_line(&xs, &ys);
    let q_hat = fit.slope;
    let c_hat = 10f64.powf(fit.intercept);

    // Single-zero screen: away from the declared zero the fitted envelope
    // bounds |p| from below by roughly c_hat * dist^q_hat, so values far
    // beneath that on a torus grid witness an undeclared boundary zero.
    {
        let floor = 0.1 * c_hat * cfg.exclusion_radius.powf(q_hat.max(0.0));
        let per_dim = (cfg.torus_check_samples as f64)
            .powf(1.0 / n as f64)
            .round()
            .max(4.0) as usize;
        let tau = std::f64::consts::TAU;
        let mut idx = vec![0usize; n];
        loop {
            let z: Vec<Complex64> = idx
                .iter()
                .map(|&j| Complex64::from_polar(1.0, tau * j as f64 / per_dim as f64))
                .collect();
            let dist: f64 = z
                .iter()
                .zip(point)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if dist > cfg.exclusion_radius {
                let m = p.eval(&z)?.norm();
                if m < floor {
                    return Err(LojaError::MultipleBoundaryZeros { point: z, modulus: m });
                }
            }
            let mut done = true;
            for d in (0..n).rev() {
                if idx[d] + 1 < per_dim {
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

    Ok(LojaEstimate {
        singular_point: point.to_vec(),
        q_hat,
        c_hat,
        half_width: fit.slope_half_width(),
        samples: cfg.scales.len() * cfg.directions_per_scale,
        envelope,
    })
}

/// Minimizes `|p(1 - r_1 e^{i v_1}, ..., 1 - r_n e^{i v_n})|` over the
/// admissible angle box by multi-start coordinate descent with golden-section
/// line searches.
fn minimize_over_angles(p: &MultiPoly, radii: &[f64], cfg: &LojaConfig) -> f64 {
    let n = radii.len();
    let vmax: Vec<f64> = radii.iter().map(|&r| (r / 2.0).acos()).collect();
    let eval = |angles: &[f64]| -> f64 {
        let z: Vec<Complex64> = radii
            .iter()
            .zip(angles)
            .map(|(&r, &v)| Complex64::new(1.0, 0.0) - Complex64::from_polar(r, v))
            .collect();
        p.eval(&z).expect("dims").norm()
    };

    let golden = |angles: &mut Vec<f64>, coord: usize| {
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (-vmax[coord], vmax[coord]);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        angles[coord] = x1;
        let mut f1 = eval(angles);
        angles[coord] = x2;
        let mut f2 = eval(angles);
        for _ in 0..cfg.angle_iters {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                angles[coord] = x1;
                f1 = eval(angles);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                angles[coord] = x2;
                f2 = eval(angles);
            }
        }
        angles[coord] = 0.5 * (a + b);
    };

    let mut best = f64::INFINITY;
    // Starts: extreme-angle sign patterns and the radial approach.
    let starts: Vec<Vec<f64>> = vec![
        vmax.clone(),
        vmax.iter()
            .enumerate()
            .map(|(i, &v)| if i % 2 == 0 { v } else { -v })
            .collect(),
        vec![0.0; n],
    ];
    for start in starts {
        let mut angles = start;
        best = best.min(eval(&angles));
        for _ in 0..cfg.sweeps {
            for coord in 0..n {
                golden(&mut angles, coord);
            }
        }
        best = best.min(eval(&angles));
    }
    best
}

/// Best membership exponent claimable from a decay exponent `q` in `n`
/// variables: `min(0, 1 - 2q/n) + 2/n`, computed over the common
/// denominator so that integer inputs give exactly rounded fractions.
pub fn claimed_threshold(q: f64, n: usize) -> f64 {
    let nf = n as f64;
    ((nf - 2.0 * q).min(0.0) + 2.0) / nf
}

/// Outcome of the sufficient-decay test at a specific hypothesis weight.
#[derive(Debug, Clone)]
pub struct LojaVerdict {
    pub alpha: f64,
    pub n: usize,
    /// The strict bound `(1 - alpha) n / 2` the exponent must stay below.
    pub bound: f64,
    /// The fitted exponent inflated by its confidence half-width.
    pub q_used: f64,
    pub pass: bool,
    /// Claimed membership exponent `alpha + 2/n` when the test passes.
    pub claimed_exponent: Option<f64>,
}

/// Applies the decay criterion: the RIF built on `p` lies in the isotropic
/// space at `alpha + 2/n` provided `q < (1 - alpha) n / 2`, with the fit's
/// confidence margin held against the estimate.
pub fn loj_verdict(est: &LojaEstimate, n: usize, alpha: f64) -> Result<LojaVerdict, LojaError> {
    if alpha >= 0.0 {
        return Err(LojaError::NonnegativeAlpha { alpha });
    }
    let bound = (1.0 - alpha) * n as f64 / 2.0;
    let q_used = est.q_hat + est.half_width;
    let pass = q_used < bound;
    Ok(LojaVerdict {
        alpha,
        n,
        bound,
        q_used,
        pass,
        claimed_exponent: if pass {
            Some(alpha + 2.0 / n as f64)
        } else {
            None
        },
    })
}
