//! Sparse multivariate complex polynomials, their univariate slices, and
//! univariate root extraction.
//!
//! Polynomials are stored as a map from exponent tuples to nonzero complex
//! coefficients. Everything here is an immutable value; operations return new
//! polynomials.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Errors from polynomial construction and manipulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {vars} variables")]
    IndexOutOfRange { index: usize, vars: usize },
    #[error("reflection degree too small in variable {variable}: {requested} < {needed}")]
    ReflectionDegree {
        variable: usize,
        requested: u32,
        needed: u32,
    },
    #[error("root extraction needs degree >= 1")]
    DegreeTooLow,
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,
    #[error("a polynomial must have at least one variable")]
    NoVariables,
}

/// An exponent tuple `(k_1, ..., k_n)`, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The `i`-th standard basis index in `n` variables.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u32> {
        self.0.iter()
    }

    /// Sum of all entries (the total degree of the monomial).
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Smallest entry; used to bound diagonal extraction.
    pub fn min_entry(&self) -> u32 {
        self.0.iter().copied().min().unwrap_or(0)
    }

    /// True when `self >= other` in every component.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Componentwise difference, or `None` when any component would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !self.dominates(other) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    fn max_update(&mut self, other: &MultiIndex) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a = (*a).max(*b);
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A sparse multivariate polynomial with complex coefficients.
///
/// Invariants: no stored coefficient is zero, and `multidegree` is the
/// componentwise maximum of all stored exponents (all zeros for the zero
/// polynomial).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    n: usize,
    terms: HashMap<MultiIndex, Complex64>,
    multidegree: MultiIndex,
}

impl MultiPoly {
    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed and exact-zero coefficients dropped.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self, PolyError> {
        if n == 0 {
            return Err(PolyError::NoVariables);
        }
        let mut map: HashMap<MultiIndex, Complex64> = HashMap::new();
        for (idx, c) in terms {
            if idx.len() != n {
                return Err(PolyError::DimensionMismatch {
                    expected: n,
                    got: idx.len(),
                });
            }
            *map.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        let mut multidegree = MultiIndex::zeros(n);
        for idx in map.keys() {
            multidegree.max_update(idx);
        }
        Ok(MultiPoly {
            n,
            terms: map,
            multidegree,
        })
    }

    pub fn zero(n: usize) -> Self {
        MultiPoly {
            n,
            terms: HashMap::new(),
            multidegree: MultiIndex::zeros(n),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::from_terms(n, [(MultiIndex::zeros(n), c)]).expect("valid constant")
    }

    /// The monomial `z_i` in `n` variables.
    pub fn variable(n: usize, i: usize) -> Self {
        Self::from_terms(n, [(MultiIndex::unit(n, i), Complex64::new(1.0, 0.0))])
            .expect("valid monomial")
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    /// Terms sorted by exponent; use for deterministic output.
    pub fn sorted_terms(&self) -> Vec<(MultiIndex, Complex64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (k.clone(), *c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> Complex64 {
        self.terms
            .get(idx)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn multidegree(&self) -> &MultiIndex {
        &self.multidegree
    }

    /// Largest coefficient magnitude; zero for the zero polynomial.
    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes; a cheap bound for `|p|` on the closed polydisk.
    pub fn coeff_norm_l1(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Evaluates at `z` by accumulating running powers per variable.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, PolyError> {
        if z.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let mut total = 0usize;
        for i in 0..self.n {
            total += self.multidegree.get(i) as usize + 1;
        }
        // Stack buffer for the common small cases; heap otherwise.
        let mut stack = [Complex64::new(1.0, 0.0); 64];
        let mut heap;
        let powers: &mut [Complex64] = if total <= 64 {
            &mut stack[..total]
        } else {
            heap = vec![Complex64::new(1.0, 0.0); total];
            &mut heap
        };
        // Power tables z_i^0..z_i^{d_i}, built by running products.
        let mut base = 0usize;
        for i in 0..self.n {
            let d = self.multidegree.get(i) as usize;
            powers[base] = Complex64::new(1.0, 0.0);
            for k in 1..=d {
                powers[base + k] = powers[base + k - 1] * z[i];
            }
            base += d + 1;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in &self.terms {
            let mut m = *c;
            let mut off = 0usize;
            for i in 0..self.n {
                m *= powers[off + idx.get(i) as usize];
                off += self.multidegree.get(i) as usize + 1;
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Reflection at degree `d`: the term `c z^a` maps to `conj(c) z^{d-a}`.
    pub fn reflect(&self, d: &MultiIndex) -> Result<MultiPoly, PolyError> {
        if d.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: d.len(),
            });
        }
        for i in 0..self.n {
            if d.get(i) < self.multidegree.get(i) {
                return Err(PolyError::ReflectionDegree {
                    variable: i,
                    requested: d.get(i),
                    needed: self.multidegree.get(i),
                });
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(idx, c)| (d.checked_sub(idx).expect("checked above"), c.conj()));
        MultiPoly::from_terms(self.n, terms)
    }

    /// Formal partial derivative with respect to variable `i` (zero-based).
    pub fn partial_derivative(&self, i: usize) -> Result<MultiPoly, PolyError> {
        if i >= self.n {
            return Err(PolyError::IndexOutOfRange {
                index: i,
                vars: self.n,
            });
        }
        let terms = self.terms.iter().filter_map(|(idx, c)| {
            let k = idx.get(i);
            if k == 0 {
                return None;
            }
            let shifted = idx.checked_sub(&MultiIndex::unit(self.n, i)).unwrap();
            Some((shifted, c * k as f64))
        });
        MultiPoly::from_terms(self.n, terms)
    }

    /// Restricts all variables except `k` to the point `zhat` (length `n-1`),
    /// collecting a univariate polynomial in `z_k`. Trailing coefficients that
    /// vanish to rounding are trimmed, so the degree may drop.
    pub fn slice(&self, k: usize, zhat: &[Complex64]) -> Result<UniPoly, PolyError> {
        if k >= self.n {
            return Err(PolyError::IndexOutOfRange {
                index: k,
                vars: self.n,
            });
        }
        if zhat.len() + 1 != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n - 1,
                got: zhat.len(),
            });
        }
        let deg_k = self.multidegree.get(k) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); deg_k + 1];
        for (idx, c) in &self.terms {
            let mut m = *c;
            let mut pos = 0usize;
            for i in 0..self.n {
                if i == k {
                    continue;
                }
                let e = idx.get(i);
                for _ in 0..e {
                    m *= zhat[pos];
                }
                pos += 1;
            }
            coeffs[idx.get(k) as usize] += m;
        }
        Ok(UniPoly::from_coeffs_trimmed(coeffs))
    }

    pub fn scale(&self, c: Complex64) -> MultiPoly {
        MultiPoly::from_terms(self.n, self.terms.iter().map(|(k, v)| (k.clone(), v * c)))
            .expect("same dimension")
    }
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n, rhs.n, "polynomial dimension mismatch");
        let terms = self
            .terms
            .iter()
            .chain(rhs.terms.iter())
            .map(|(k, c)| (k.clone(), *c));
        MultiPoly::from_terms(self.n, terms).expect("same dimension")
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n, rhs.n, "polynomial dimension mismatch");
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), *c))
            .chain(rhs.terms.iter().map(|(k, c)| (k.clone(), -*c)));
        MultiPoly::from_terms(self.n, terms).expect("same dimension")
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n, rhs.n, "polynomial dimension mismatch");
        let mut terms: Vec<(MultiIndex, Complex64)> =
            Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let exps = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
                terms.push((MultiIndex::new(exps), ca * cb));
            }
        }
        MultiPoly::from_terms(self.n, terms).expect("same dimension")
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// A univariate complex polynomial, coefficients in ascending degree order.
/// The leading coefficient is nonzero unless the polynomial is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

/// Relative threshold below which trailing slice coefficients are treated as
/// rounding residue and trimmed.
const TRIM_REL: f64 = 1e-13;

impl UniPoly {
    /// Builds from coefficients, trimming exact trailing zeros.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while let Some(c) = coeffs.last() {
            if c.re == 0.0 && c.im == 0.0 {
                coeffs.pop();
            } else {
                break;
            }
        }
        UniPoly { coeffs }
    }

    /// Builds from coefficients, trimming trailing entries that are zero
    /// relative to the largest coefficient.
    pub fn from_coeffs_trimmed(coeffs: Vec<Complex64>) -> Self {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return UniPoly { coeffs: Vec::new() };
        }
        let mut coeffs = coeffs;
        while let Some(c) = coeffs.last() {
            if c.norm() <= TRIM_REL * scale {
                coeffs.pop();
            } else {
                break;
            }
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        UniPoly::new(coeffs)
    }

    /// All complex roots with multiplicity, via companion-matrix eigenvalues
    /// followed by a Newton polish step. Errors on degree < 1.
    pub fn roots(&self) -> Result<Vec<Complex64>, PolyError> {
        let deg = match self.degree() {
            None | Some(0) => return Err(PolyError::DegreeTooLow),
            Some(d) => d,
        };
        let lead = self.coeffs[deg];
        let mut raw = match deg {
            1 => vec![-self.coeffs[0] / lead],
            2 => {
                // Stable quadratic formula: the larger root first, then c/a
                // divided by it, to avoid cancellation.
                let a = self.coeffs[2];
                let b = self.coeffs[1];
                let c = self.coeffs[0];
                let disc = (b * b - 4.0 * a * c).sqrt();
                let q = if (b + disc).norm() >= (b - disc).norm() {
                    -0.5 * (b + disc)
                } else {
                    -0.5 * (b - disc)
                };
                if q.norm() == 0.0 {
                    vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
                } else {
                    vec![q / a, c / q]
                }
            }
            _ => companion_eigenvalues(&self.coeffs)?,
        };
        // One Newton step per root tightens the eigenvalue output; repeated
        // only while it still improves the residual.
        let deriv = self.derivative();
        let scale = 1.0 + self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for r in raw.iter_mut() {
            for _ in 0..3 {
                let f = self.eval(*r);
                if f.norm() <= 1e-14 * scale {
                    break;
                }
                let df = deriv.eval(*r);
                if df.norm() == 0.0 {
                    break;
                }
                let step = f / df;
                let candidate = *r - step;
                if self.eval(candidate).norm() < f.norm() {
                    *r = candidate;
                } else {
                    break;
                }
            }
        }
        Ok(raw)
    }
}

/// Eigenvalues of the companion matrix of a polynomial given by ascending
/// coefficients (degree >= 3; the leading coefficient must be nonzero).
fn companion_eigenvalues(coeffs: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-14, 0).ok_or(PolyError::EigenFailure)?;
    let eig = schur.eigenvalues().ok_or(PolyError::EigenFailure)?;
    Ok(eig.iter().copied().collect())
}
