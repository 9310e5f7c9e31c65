//! Finite Blaschke products in one variable: Taylor coefficients, truncated
//! Dirichlet-type norms, and the epsilon-normalized norm ratio.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::KahanSum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlaschkeError {
    #[error("zero {index} has modulus {modulus}, not strictly inside the disk")]
    ZeroNotInDisk { index: usize, modulus: f64 },
    #[error("constant factor has modulus {modulus}, expected 1")]
    ConstantNotUnimodular { modulus: f64 },
    #[error("truncation order must be at least 1")]
    InvalidOrder,
    #[error(
        "truncation at order {order} leaves a tail bound {tail_bound:.3e} against value {value:.6e}; increase the order"
    )]
    TruncationInsufficient {
        order: usize,
        tail_bound: f64,
        value: f64,
    },
    #[error("exponent must be positive, got {p}")]
    NonpositiveExponent { p: f64 },
}

/// `c * prod_j (z - a_j) / (1 - conj(a_j) z)` with `|a_j| < 1` and `|c| = 1`.
#[derive(Debug, Clone)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    constant: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>, constant: Complex64) -> Result<Self, BlaschkeError> {
        for (i, a) in zeros.iter().enumerate() {
            if a.norm() >= 1.0 {
                return Err(BlaschkeError::ZeroNotInDisk {
                    index: i,
                    modulus: a.norm(),
                });
            }
        }
        if (constant.norm() - 1.0).abs() > 1e-12 {
            return Err(BlaschkeError::ConstantNotUnimodular {
                modulus: constant.norm(),
            });
        }
        Ok(BlaschkeProduct { zeros, constant })
    }

    pub fn from_zeros(zeros: Vec<Complex64>) -> Result<Self, BlaschkeError> {
        Self::new(zeros, Complex64::new(1.0, 0.0))
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Distance from the zero set to the circle, `min(1 - |a_j|)`; 1 for the
    /// empty product.
    pub fn epsilon(&self) -> f64 {
        self.zeros
            .iter()
            .map(|a| 1.0 - a.norm())
            .fold(1.0, f64::min)
    }

    /// Largest zero modulus; controls the coefficient decay rate.
    pub fn decay_rate(&self) -> f64 {
        self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.constant;
        for a in &self.zeros {
            acc *= (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z);
        }
        acc
    }

    /// Taylor coefficients through order `n`, by multiplying the truncated
    /// series factor by factor: multiply by `(z - a)`, then divide by
    /// `(1 - conj(a) z)` via the geometric recurrence. O(degree * n).
    pub fn taylor(&self, n: usize) -> Vec<Complex64> {
        let mut u = vec![Complex64::new(0.0, 0.0); n + 1];
        u[0] = self.constant;
        for a in &self.zeros {
            // w = u * (z - a), truncated.
            let mut w = vec![Complex64::new(0.0, 0.0); n + 1];
            for k in 0..=n {
                let prev = if k > 0 { u[k - 1] } else { Complex64::new(0.0, 0.0) };
                w[k] = prev - a * u[k];
            }
            // u = w / (1 - conj(a) z): u_k = w_k + conj(a) u_{k-1}.
            let ac = a.conj();
            u[0] = w[0];
            for k in 1..=n {
                u[k] = w[k] + ac * u[k - 1];
            }
        }
        u
    }

    /// Truncation order making the geometric coefficient tail negligible.
    pub fn auto_order(&self) -> usize {
        let eps = self.epsilon();
        64usize.max((10.0 / eps).ceil() as usize)
    }
}

/// A truncated norm value with its truncation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct NormOutcome {
    pub value: f64,
    pub order: usize,
    /// Upper bound for the weighted tail beyond the truncation order.
    pub tail_bound: f64,
}

/// Largest acceptable tail bound relative to the computed value.
const TAIL_RTOL: f64 = 1e-4;

/// The truncated Dirichlet-type norm `sum_{k<=N} (1+k)^p |b_k|^2` with a
/// geometric tail bound from `|b_k| <= C rho^{k - deg}`.
pub fn d_alpha_norm_1d(
    b: &BlaschkeProduct,
    p: f64,
    n: usize,
) -> Result<NormOutcome, BlaschkeError> {
    norm_from(b, p, n, 0)
}

/// Same weighted sum starting at coefficient `start` instead of 0.
fn norm_from(
    b: &BlaschkeProduct,
    p: f64,
    n: usize,
    start: usize,
) -> Result<NormOutcome, BlaschkeError> {
    if n < 1 {
        return Err(BlaschkeError::InvalidOrder);
    }
    let coeffs = b.taylor(n);
    let mut acc = KahanSum::new();
    for (k, c) in coeffs.iter().enumerate().skip(start) {
        acc.add(((1 + k) as f64).powf(p) * c.norm_sqr());
    }
    let value = acc.value();

    let rho = b.decay_rate();
    let tail_bound = if rho == 0.0 {
        0.0
    } else {
        // Estimate C from the last computed coefficients.
        let deg = b.degree();
        let window = coeffs.len().saturating_sub(8);
        let mut c_hat: f64 = 0.0;
        for k in window..coeffs.len() {
            let scale = rho.powi(k as i32 - deg as i32);
            if scale > 0.0 {
                c_hat = c_hat.max(coeffs[k].norm() / scale);
            }
        }
        // (1+k)^p <= (2+N)^p e^{p (k-N)/(1+N)} for p >= 0, and is decreasing
        // for p < 0, so the tail is geometric with ratio q.
        let q = rho * rho * (p.max(0.0) / (1.0 + n as f64)).exp();
        if q >= 1.0 {
            return Err(BlaschkeError::TruncationInsufficient {
                order: n,
                tail_bound: f64::INFINITY,
                value,
            });
        }
        let head = ((2 + n) as f64).powf(p);
        let start = rho.powi(2 * (n as i32 + 1 - deg as i32));
        c_hat * c_hat * head * start / (1.0 - q)
    };

    if tail_bound > TAIL_RTOL * value.max(f64::MIN_POSITIVE) {
        return Err(BlaschkeError::TruncationInsufficient {
            order: n,
            tail_bound,
            value,
        });
    }
    Ok(NormOutcome {
        value,
        order: n,
        tail_bound,
    })
}

/// The epsilon-normalized norm ratio
/// `(sum_{k>=1} (1+k)^p |b_k|^2) * epsilon(b)^{p-1}`,
/// bounded in `epsilon` for each fixed `p > 0` and degree.
///
/// The constant coefficient is excluded: the sum then tracks the derivative
/// seminorm. With the k = 0 term included the ratio would grow like
/// `epsilon^{p-1}` for p < 1, because the full norm of an inner function
/// never drops below its `H^2` norm 1.
pub fn onedim_ratio(b: &BlaschkeProduct, p: f64) -> Result<f64, BlaschkeError> {
    if p <= 0.0 {
        return Err(BlaschkeError::NonpositiveExponent { p });
    }
    let norm = norm_from(b, p, b.auto_order(), 1)?;
    Ok(norm.value * b.epsilon().powf(p - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            BlaschkeProduct::from_zeros(vec![c(1.0, 0.0)]),
            Err(BlaschkeError::ZeroNotInDisk { .. })
        ));
        assert!(matches!(
            BlaschkeProduct::new(vec![], c(2.0, 0.0)),
            Err(BlaschkeError::ConstantNotUnimodular { .. })
        ));
    }

    #[test]
    fn single_zero_at_origin() {
        // b = z: only coefficient at k = 1, norm 2^p.
        let b = BlaschkeProduct::from_zeros(vec![c(0.0, 0.0)]).unwrap();
        for &p in &[0.5, 1.0, 2.5] {
            let norm = d_alpha_norm_1d(&b, p, 16).unwrap();
            assert!((norm.value - 2.0f64.powf(p)).abs() < 1e-14);
            assert!((onedim_ratio(&b, p).unwrap() - 2.0f64.powf(p)).abs() < 1e-14);
        }
    }

    #[test]
    fn single_factor_closed_form() {
        let a = 0.9;
        let b = BlaschkeProduct::from_zeros(vec![c(a, 0.0)]).unwrap();
        let n = b.auto_order();
        let norm = d_alpha_norm_1d(&b, 1.0, n).unwrap();
        let mut expect = a * a;
        let w = (1.0 - a * a) * (1.0 - a * a);
        for k in 1..=n {
            expect += (1 + k) as f64 * w * a.powi(2 * (k as i32 - 1));
        }
        assert!((norm.value - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn h2_norm_of_inner_functions_is_one() {
        let b = BlaschkeProduct::from_zeros(vec![c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let norm = d_alpha_norm_1d(&b, 0.0, b.auto_order()).unwrap();
        assert!((norm.value - 1.0).abs() < 1e-10, "{}", norm.value);

        let b = BlaschkeProduct::from_zeros(vec![c(0.3, 0.4), c(0.0, -0.8), c(-0.35, 0.1)])
            .unwrap();
        let norm = d_alpha_norm_1d(&b, 0.0, b.auto_order()).unwrap();
        assert!((norm.value - 1.0).abs() < 1e-10, "{}", norm.value);
    }

    #[test]
    fn truncation_error_is_reported() {
        let b = BlaschkeProduct::from_zeros(vec![c(0.999, 0.0)]).unwrap();
        assert!(matches!(
            d_alpha_norm_1d(&b, 2.0, 32),
            Err(BlaschkeError::TruncationInsufficient { .. })
        ));
    }

    #[test]
    fn coefficients_match_evaluation_interpolation() {
        // Direct inverse DFT of samples on 2N roots of unity at radius 0.5.
        let b = BlaschkeProduct::from_zeros(vec![c(0.3, 0.4), c(-0.5, 0.2), c(0.1, -0.6)])
            .unwrap();
        let n = 32usize;
        let coeffs = b.taylor(n - 1);
        let m = 2 * n;
        let r = 0.5f64;
        let samples: Vec<Complex64> = (0..m)
            .map(|j| {
                let z = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / m as f64);
                b.eval(z)
            })
            .collect();
        for k in 0..n {
            let mut acc = c(0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                let w = Complex64::from_polar(
                    1.0,
                    -std::f64::consts::TAU * (j * k % m) as f64 / m as f64,
                );
                acc += s * w;
            }
            let rec = acc / (m as f64) / r.powi(k as i32);
            // DFT rounding is amplified by r^{-k} when unscaling, so compare
            // in the scaled metric that the interpolation actually controls.
            let err = (rec - coeffs[k]).norm() * r.powi(k as i32);
            assert!(err < 1e-10, "k={k}: {rec} vs {}", coeffs[k]);
            if k <= 12 {
                assert!((rec - coeffs[k]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn ratio_bounded_across_epsilon_sweep() {
        // Lemma-style boundedness witness: within each (p, degree) family the
        // ratio varies by less than a factor 20 across four decades.
        for degree in 1..=3usize {
            for &p in &[0.5, 1.5, 2.5] {
                let mut lo = f64::INFINITY;
                let mut hi = 0.0f64;
                for j in 1..=4 {
                    let eps = 10f64.powi(-j);
                    let zeros: Vec<Complex64> = (0..degree)
                        .map(|l| {
                            Complex64::from_polar(
                                1.0 - eps,
                                std::f64::consts::TAU * l as f64 / degree as f64,
                            )
                        })
                        .collect();
                    let b = BlaschkeProduct::from_zeros(zeros).unwrap();
                    let ratio = onedim_ratio(&b, p).unwrap();
                    lo = lo.min(ratio);
                    hi = hi.max(ratio);
                }
                assert!(
                    hi / lo < 20.0,
                    "p={p} degree={degree}: ratio spread {}",
                    hi / lo
                );
            }
        }
    }

    #[test]
    fn single_zero_family_at_p_one() {
        // At p = 1 the ratio is the plain D_1 norm; it stays bounded as the
        // zero approaches the circle.
        let mut values = Vec::new();
        for j in 1..=4 {
            let eps = 10f64.powi(-j);
            let b = BlaschkeProduct::from_zeros(vec![c(1.0 - eps, 0.0)]).unwrap();
            values.push(onedim_ratio(&b, 1.0).unwrap());
        }
        let hi = values.iter().cloned().fold(0.0, f64::max);
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 10.0, "{values:?}");
    }
}
