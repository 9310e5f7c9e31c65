//! Truncated power-series expansion of rational functions `q / p` on a box
//! of multi-indices, and diagonal coefficient extraction.

use num_complex::Complex64;
use thiserror::Error;

use crate::poly::{MultiIndex, MultiPoly, PolyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("denominator vanishes at the origin; no power series there")]
    DenominatorVanishesAtOrigin,
    #[error("requested box holds {requested} coefficients, above the cap {cap}")]
    BoxTooLarge { requested: usize, cap: usize },
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Expansion limits. The coefficient cap guards against accidentally huge
/// dense boxes.
#[derive(Debug, Clone, Copy)]
pub struct ExpandConfig {
    pub max_coeffs: usize,
}

impl Default for ExpandConfig {
    fn default() -> Self {
        ExpandConfig {
            max_coeffs: 1 << 22,
        }
    }
}

/// Dense tensor of Taylor coefficients on the box `[0, N_1] x ... x [0, N_n]`.
#[derive(Debug, Clone)]
pub struct CoeffBox {
    n: usize,
    orders: MultiIndex,
    strides: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl CoeffBox {
    fn empty(orders: &MultiIndex) -> Result<Self, SeriesError> {
        Self::empty_capped(orders, usize::MAX)
    }

    fn empty_capped(orders: &MultiIndex, cap: usize) -> Result<Self, SeriesError> {
        let n = orders.len();
        let mut strides = vec![1usize; n];
        let mut total = 1usize;
        for i in (0..n).rev() {
            strides[i] = total;
            total = total
                .checked_mul(orders.get(i) as usize + 1)
                .ok_or(SeriesError::BoxTooLarge {
                    requested: usize::MAX,
                    cap,
                })?;
        }
        if total > cap {
            return Err(SeriesError::BoxTooLarge {
                requested: total,
                cap,
            });
        }
        Ok(CoeffBox {
            n,
            orders: orders.clone(),
            strides,
            coeffs: vec![Complex64::new(0.0, 0.0); total],
        })
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn orders(&self) -> &MultiIndex {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[inline]
    fn flat(&self, exps: &[u32]) -> usize {
        debug_assert_eq!(exps.len(), self.n);
        exps.iter()
            .zip(&self.strides)
            .map(|(&e, &s)| e as usize * s)
            .sum()
    }

    /// Coefficient at the given exponents; panics if out of the box.
    pub fn get(&self, exps: &[u32]) -> Complex64 {
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= self.orders.get(i), "exponent outside the box");
        }
        self.coeffs[self.flat(exps)]
    }

    /// Visits every `(exponents, coefficient)` pair in row-major order.
    pub fn for_each(&self, mut f: impl FnMut(&[u32], Complex64)) {
        let mut exps = vec![0u32; self.n];
        for &c in self.coeffs.iter() {
            f(&exps, c);
            // Odometer increment, last variable fastest.
            for i in (0..self.n).rev() {
                if exps[i] < self.orders.get(i) {
                    exps[i] += 1;
                    break;
                }
                exps[i] = 0;
            }
        }
    }

    /// The coefficients of a polynomial, truncated to the box.
    pub fn from_poly(p: &MultiPoly, orders: &MultiIndex) -> Result<Self, SeriesError> {
        if orders.len() != p.vars() {
            return Err(SeriesError::DimensionMismatch {
                expected: p.vars(),
                got: orders.len(),
            });
        }
        let mut cb = CoeffBox::empty(orders)?;
        for (idx, c) in p.terms() {
            if orders.dominates(idx) {
                let flat = cb.flat(idx.as_slice());
                cb.coeffs[flat] = *c;
            }
        }
        Ok(cb)
    }

    /// The diagonal sequence `a(l, l, ..., l)` for `l = 0 ..= min(orders)`.
    pub fn diagonal(&self) -> Vec<Complex64> {
        let lmax = self.orders.min_entry();
        let diag_stride: usize = self.strides.iter().sum();
        (0..=lmax as usize)
            .map(|l| self.coeffs[l * diag_stride])
            .collect()
    }
}

/// Expands `q / p` to the given box by the convolution recurrence
/// `a(k) = (q_k - sum_{0 < j <= k} p_j a(k-j)) / p_0`, filled in graded
/// lexicographic order so that every predecessor is already computed.
pub fn expand_ratio(
    q: &MultiPoly,
    p: &MultiPoly,
    orders: &MultiIndex,
    cfg: &ExpandConfig,
) -> Result<CoeffBox, SeriesError> {
    let n = p.vars();
    if q.vars() != n {
        return Err(SeriesError::DimensionMismatch {
            expected: n,
            got: q.vars(),
        });
    }
    if orders.len() != n {
        return Err(SeriesError::DimensionMismatch {
            expected: n,
            got: orders.len(),
        });
    }
    let p0 = p.coefficient(&MultiIndex::zeros(n));
    if p0.norm() == 0.0 {
        return Err(SeriesError::DenominatorVanishesAtOrigin);
    }

    let mut cb = CoeffBox::empty_capped(orders, cfg.max_coeffs)?;
    // Seed with the numerator coefficients; the recurrence rewrites in place.
    for (idx, c) in q.terms() {
        if orders.dominates(idx) {
            let flat = cb.flat(idx.as_slice());
            cb.coeffs[flat] = *c;
        }
    }

    // Denominator terms other than the constant, with their flat offsets.
    // Terms reaching outside the box can never satisfy j <= k and are dropped.
    let p_terms: Vec<(Vec<u32>, usize, Complex64)> = p
        .terms()
        .filter(|(idx, _)| idx.total() > 0 && orders.dominates(idx))
        .map(|(idx, c)| {
            let exps = idx.as_slice().to_vec();
            let off = cb.flat(&exps);
            (exps, off, *c)
        })
        .collect();

    // Graded-lex visiting order.
    let mut order: Vec<(u32, u32)> = Vec::with_capacity(cb.coeffs.len());
    {
        let mut exps = vec![0u32; n];
        for flat in 0..cb.coeffs.len() {
            order.push((exps.iter().sum(), flat as u32));
            for i in (0..n).rev() {
                if exps[i] < orders.get(i) {
                    exps[i] += 1;
                    break;
                }
                exps[i] = 0;
            }
        }
        order.sort_unstable();
    }

    let inv_p0 = p0.inv();
    let mut exps = vec![0u32; n];
    for &(_, flat) in &order {
        let flat = flat as usize;
        decode(flat, &cb.strides, &mut exps);
        let mut acc = cb.coeffs[flat];
        for (jexps, joff, jc) in &p_terms {
            if jexps.iter().zip(&exps).all(|(j, k)| j <= k) {
                acc -= jc * cb.coeffs[flat - joff];
            }
        }
        cb.coeffs[flat] = acc * inv_p0;
    }
    Ok(cb)
}

#[inline]
fn decode(mut flat: usize, strides: &[usize], out: &mut [u32]) {
    for i in 0..strides.len() {
        out[i] = (flat / strides[i]) as u32;
        flat %= strides[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn two_minus_sum() -> MultiPoly {
        MultiPoly::from_terms(
            2,
            [
                (mi(&[0, 0]), c(2.0, 0.0)),
                (mi(&[1, 0]), c(-1.0, 0.0)),
                (mi(&[0, 1]), c(-1.0, 0.0)),
            ],
        )
        .unwrap()
    }

    fn phi2_numerator() -> MultiPoly {
        two_minus_sum().reflect(&mi(&[1, 1])).unwrap()
    }

    fn binomial(n: u64, k: u64) -> f64 {
        let k = k.min(n - k);
        let mut acc = 1.0f64;
        for i in 0..k {
            acc = acc * (n - i) as f64 / (i + 1) as f64;
        }
        acc
    }

    #[test]
    fn geometric_diagonal_series() {
        // 1 / (1 - z1 z2 / 2): coefficient 2^{-k} at (k, k), 0 elsewhere.
        let p = MultiPoly::from_terms(
            2,
            [(mi(&[0, 0]), c(1.0, 0.0)), (mi(&[1, 1]), c(-0.5, 0.0))],
        )
        .unwrap();
        let one = MultiPoly::constant(2, c(1.0, 0.0));
        let cb = expand_ratio(&one, &p, &mi(&[6, 6]), &ExpandConfig::default()).unwrap();
        for k1 in 0..=6u32 {
            for k2 in 0..=6u32 {
                let v = cb.get(&[k1, k2]);
                if k1 == k2 {
                    let expect = 0.5f64.powi(k1 as i32);
                    assert!((v - c(expect, 0.0)).norm() < 1e-14);
                } else {
                    assert_eq!(v, c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn multinomial_closed_form() {
        let one = MultiPoly::constant(2, c(1.0, 0.0));
        let cb = expand_ratio(
            &one,
            &two_minus_sum(),
            &mi(&[30, 30]),
            &ExpandConfig::default(),
        )
        .unwrap();
        for k1 in 0..=30u32 {
            for k2 in 0..=30u32 {
                if k1 + k2 > 30 {
                    continue;
                }
                let m = (k1 + k2) as u64;
                let expect = binomial(m, k1 as u64) * 0.5f64.powi(m as i32 + 1);
                let got = cb.get(&[k1, k2]);
                assert!(
                    (got.re - expect).abs() <= 1e-12 * expect && got.im == 0.0,
                    "({k1},{k2}): {} vs {expect}",
                    got.re
                );
            }
        }
    }

    #[test]
    fn rif_coefficients() {
        let cb = expand_ratio(
            &phi2_numerator(),
            &two_minus_sum(),
            &mi(&[8, 8]),
            &ExpandConfig::default(),
        )
        .unwrap();
        assert!((cb.get(&[1, 1]) - c(0.5, 0.0)).norm() < 1e-14);
        assert!((cb.get(&[2, 2]) - c(0.125, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn convolve_back_recovers_numerator() {
        let q = phi2_numerator();
        let p = two_minus_sum();
        let cb = expand_ratio(&q, &p, &mi(&[12, 12]), &ExpandConfig::default()).unwrap();
        for k1 in 0..=12u32 {
            for k2 in 0..=12u32 {
                let mut acc = c(0.0, 0.0);
                for (idx, pc) in p.terms() {
                    let (j1, j2) = (idx.get(0), idx.get(1));
                    if j1 <= k1 && j2 <= k2 {
                        acc += pc * cb.get(&[k1 - j1, k2 - j2]);
                    }
                }
                let expect = q.coefficient(&mi(&[k1, k2]));
                assert!(
                    (acc - expect).norm() <= 1e-10,
                    "({k1},{k2}): {acc} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn diagonal_values() {
        let cb = expand_ratio(
            &phi2_numerator(),
            &two_minus_sum(),
            &mi(&[210, 210]),
            &ExpandConfig::default(),
        )
        .unwrap();
        let diag = cb.diagonal();
        assert!((diag[2] - c(0.125, 0.0)).norm() < 1e-14);
        assert!((diag[3] - c(1.0 / 16.0, 0.0)).norm() < 1e-14);
        // Closed form a(l+1, l+1) = C(2l, l) / (2^{2l+1} (l+1)).
        for l in 0..40u64 {
            let expect = binomial(2 * l, l) / (2.0f64.powi(2 * l as i32 + 1) * (l + 1) as f64);
            let got = diag[(l + 1) as usize].re;
            assert!(
                (got - expect).abs() <= 1e-12 * expect,
                "l={l}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn diagonal_decay_exponent() {
        let cb = expand_ratio(
            &phi2_numerator(),
            &two_minus_sum(),
            &mi(&[200, 200]),
            &ExpandConfig::default(),
        )
        .unwrap();
        let diag = cb.diagonal();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for l in 20..=200usize {
            xs.push((l as f64).ln());
            ys.push(diag[l].norm().ln());
        }
        let fit = crate::numerics::fit_line(&xs, &ys);
        assert!(
            (fit.slope + 1.5).abs() < 0.05,
            "diagonal slope {}",
            fit.slope
        );
    }

    #[test]
    fn polynomial_diagonal_terminates() {
        let q = phi2_numerator();
        let cb = CoeffBox::from_poly(&q, &mi(&[5, 5])).unwrap();
        let diag = cb.diagonal();
        assert_eq!(diag[1], c(2.0, 0.0));
        for d in &diag[2..] {
            assert_eq!(*d, c(0.0, 0.0));
        }
    }

    #[test]
    fn rejects_zero_constant_term() {
        let p = MultiPoly::variable(2, 0);
        let one = MultiPoly::constant(2, c(1.0, 0.0));
        assert!(matches!(
            expand_ratio(&one, &p, &mi(&[3, 3]), &ExpandConfig::default()),
            Err(SeriesError::DenominatorVanishesAtOrigin)
        ));
    }

    #[test]
    fn respects_coefficient_cap() {
        let one = MultiPoly::constant(2, c(1.0, 0.0));
        let cfg = ExpandConfig { max_coeffs: 100 };
        assert!(matches!(
            expand_ratio(&one, &two_minus_sum(), &mi(&[100, 100]), &cfg),
            Err(SeriesError::BoxTooLarge { .. })
        ));
    }
}
