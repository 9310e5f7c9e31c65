//! Hölder-type interpolation machinery for Dirichlet-type norms: the
//! anisotropic product inequality and its conjugate-weight bijection, the
//! general two-weight interpolation check, feasibility of membership targets
//! against per-variable integrability thresholds, and the special derivative
//! chain identities.

use thiserror::Error;

use crate::dirichlet::{weighted_partial_sum, DirichletError, Membership, WeightVector};
use crate::hardy::{Endpoint, IntegrabilityProfile};
use crate::series::CoeffBox;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("need at least two variables")]
    TooFewVariables,
    #[error("exponent {index} must exceed 1, got {value}")]
    InvalidHolderExponent { index: usize, value: f64 },
    #[error("conjugate weight {index} must be positive, got {value}")]
    NonpositiveConjugate { index: usize, value: f64 },
    #[error("conjugate weights must satisfy sum(1/c) = 1, got {sum}")]
    ConjugateBudget { sum: f64 },
    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("interpolation exponent must exceed 1, got {p}")]
    InvalidInterpolationExponent { p: f64 },
    #[error("hypothesis requires alpha < 0, got {alpha}")]
    NonnegativeAlpha { alpha: f64 },
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
}

/// Conjugate weights from Hölder exponents:
/// `c_l = p_l * prod_{j<l} p_j/(p_j - 1)` and
/// `c_n = prod_j p_j/(p_j - 1)`.
///
/// Products are accumulated as separate numerator/denominator so that
/// integer inputs telescope exactly.
pub fn cs_from_ps(ps: &[f64]) -> Result<Vec<f64>, EmbedError> {
    if ps.is_empty() {
        return Err(EmbedError::TooFewVariables);
    }
    for (i, &p) in ps.iter().enumerate() {
        if !(p > 1.0) {
            return Err(EmbedError::InvalidHolderExponent { index: i, value: p });
        }
    }
    let n = ps.len() + 1;
    let mut cs = Vec::with_capacity(n);
    let mut num = 1.0f64;
    let mut den = 1.0f64;
    for &p in ps {
        cs.push(p * num / den);
        num *= p;
        den *= p - 1.0;
    }
    cs.push(num / den);
    Ok(cs)
}

/// Inverse of [`cs_from_ps`]: solves the triangular system back to the
/// Hölder exponents. Input must be positive with `sum(1/c) = 1`.
pub fn ps_from_cs(cs: &[f64]) -> Result<Vec<f64>, EmbedError> {
    validate_cs(cs)?;
    let n = cs.len();
    let mut ps = Vec::with_capacity(n - 1);
    let mut num = 1.0f64;
    let mut den = 1.0f64;
    for (l, &c) in cs.iter().take(n - 1).enumerate() {
        let p = c * den / num;
        if !(p > 1.0) {
            return Err(EmbedError::InvalidHolderExponent { index: l, value: p });
        }
        ps.push(p);
        num *= p;
        den *= p - 1.0;
    }
    Ok(ps)
}

fn validate_cs(cs: &[f64]) -> Result<(), EmbedError> {
    if cs.len() < 2 {
        return Err(EmbedError::TooFewVariables);
    }
    let mut sum = 0.0;
    for (i, &c) in cs.iter().enumerate() {
        if !(c > 0.0) {
            return Err(EmbedError::NonpositiveConjugate { index: i, value: c });
        }
        sum += 1.0 / c;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(EmbedError::ConjugateBudget { sum });
    }
    Ok(())
}

/// A Hölder exponent tuple with its derived conjugate weights.
#[derive(Debug, Clone)]
pub struct HolderSplit {
    pub ps: Vec<f64>,
    pub cs: Vec<f64>,
}

impl HolderSplit {
    pub fn from_ps(ps: Vec<f64>) -> Result<Self, EmbedError> {
        let cs = cs_from_ps(&ps)?;
        Ok(HolderSplit { ps, cs })
    }

    pub fn from_cs(cs: Vec<f64>) -> Result<Self, EmbedError> {
        let ps = ps_from_cs(&cs)?;
        Ok(HolderSplit { ps, cs })
    }
}

/// Both sides of a proved inequality evaluated on concrete data.
#[derive(Debug, Clone, Copy)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

const INEQ_SLACK: f64 = 1e-9;

/// Checks `||f||^2_w <= prod_i (anisotropic sum at weight c_i w_i in slot i)^{1/c_i}`
/// on a coefficient box.
pub fn holder_check(
    cb: &CoeffBox,
    w: &WeightVector,
    cs: &[f64],
) -> Result<InequalityCheck, EmbedError> {
    let n = cb.vars();
    if w.len() != n {
        return Err(EmbedError::DimensionMismatch {
            expected: n,
            got: w.len(),
        });
    }
    if cs.len() != n {
        return Err(EmbedError::DimensionMismatch {
            expected: n,
            got: cs.len(),
        });
    }
    validate_cs(cs)?;
    let lhs = weighted_partial_sum(cb, w)?;
    let mut rhs = 1.0f64;
    for i in 0..n {
        let wi = WeightVector::anisotropic(n, i, cs[i] * w.get(i));
        let si = weighted_partial_sum(cb, &wi)?;
        rhs *= si.powf(1.0 / cs[i]);
    }
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + INEQ_SLACK),
    })
}

/// Checks the two-weight interpolation inequality
/// `||f||^2_{a+V} <= (sum at a-U+pV)^{1/p} (sum at a+(q-1)U)^{1/q}`
/// with `1/p + 1/q = 1`.
pub fn norm_interp_check(
    cb: &CoeffBox,
    alpha: &WeightVector,
    v: &[f64],
    u: &[f64],
    p: f64,
) -> Result<InequalityCheck, EmbedError> {
    let n = cb.vars();
    if alpha.len() != n || v.len() != n || u.len() != n {
        return Err(EmbedError::DimensionMismatch {
            expected: n,
            got: alpha.len().min(v.len()).min(u.len()),
        });
    }
    if !(p > 1.0) {
        return Err(EmbedError::InvalidInterpolationExponent { p });
    }
    let q = p / (p - 1.0);
    let shift = |f: &dyn Fn(usize) -> f64| {
        WeightVector::new((0..n).map(f).collect())
    };
    let w_lhs = shift(&|i| alpha.get(i) + v[i]);
    let w_a = shift(&|i| alpha.get(i) - u[i] + p * v[i]);
    let w_b = shift(&|i| alpha.get(i) + (q - 1.0) * u[i]);
    let lhs = weighted_partial_sum(cb, &w_lhs)?;
    let sa = weighted_partial_sum(cb, &w_a)?;
    let sb = weighted_partial_sum(cb, &w_b)?;
    let rhs = sa.powf(1.0 / p) * sb.powf(1.0 / q);
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + INEQ_SLACK),
    })
}

/// Feasibility of a membership target against per-variable thresholds.
#[derive(Debug, Clone)]
pub struct FeasibilityOutcome {
    pub feasible: bool,
    /// `sum_k max(alpha_k, 0) / t_k`; feasible strictly below 1.
    pub budget: f64,
    /// True when feasibility needed no endpoint memberships.
    pub strict: bool,
    /// Conjugate weights witnessing feasibility (entries may be infinite for
    /// variables contributing nothing to the budget).
    pub witness_cs: Option<Vec<f64>>,
    /// False when some required integrability index exceeds 2, outside the
    /// stated range of the product-inequality route.
    pub within_stated_range: bool,
}

/// Decides whether `phi in D_alpha` follows from the thresholds: feasible iff
/// `sum_k alpha_k / t_k < 1`, with equality allowed when every contributing
/// threshold is closed. Nonpositive targets and infinite thresholds
/// contribute zero.
pub fn hp_embed_feasible(
    alphas: &WeightVector,
    profile: &IntegrabilityProfile,
) -> Result<FeasibilityOutcome, EmbedError> {
    let n = profile.entries.len();
    if alphas.len() != n {
        return Err(EmbedError::DimensionMismatch {
            expected: n,
            got: alphas.len(),
        });
    }
    let mut budget = 0.0f64;
    let mut contributing = Vec::new();
    for (k, entry) in profile.entries.iter().enumerate() {
        let a = alphas.get(k).max(0.0);
        let contribution = if entry.threshold.is_infinite() {
            0.0
        } else {
            a / entry.threshold
        };
        if contribution > 0.0 {
            contributing.push(k);
        }
        budget += contribution;
    }
    let strict = budget < 1.0 - 1e-12;
    let at_closed_boundary = budget <= 1.0 + 1e-12
        && contributing
            .iter()
            .all(|&k| profile.entries[k].endpoint == Endpoint::Closed);
    let feasible = strict || at_closed_boundary;

    let witness_cs = if feasible {
        if budget <= 0.0 {
            Some(vec![n as f64; n])
        } else {
            Some(
                (0..n)
                    .map(|k| {
                        let a = alphas.get(k).max(0.0);
                        let t = profile.entries[k].threshold;
                        if a > 0.0 && t.is_finite() {
                            budget * t / a
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect(),
            )
        }
    } else {
        None
    };

    // Required index per contributing variable is budget * t_k; variables
    // with positive targets but infinite thresholds need arbitrarily high
    // integrability, which also exceeds the stated range.
    let mut within = true;
    for k in 0..n {
        let a = alphas.get(k);
        let t = profile.entries[k].threshold;
        if a > 0.0 {
            let required = if t.is_finite() {
                budget.max(f64::MIN_POSITIVE) * t
            } else {
                f64::INFINITY
            };
            if required > 2.0 + 1e-9 {
                within = false;
            }
        }
    }

    Ok(FeasibilityOutcome {
        feasible,
        budget,
        strict,
        witness_cs,
        within_stated_range: within,
    })
}

/// The special derivative chain behind the isotropic weight-drop lemma:
/// exponents `p_1 = n, p_{k+1} = p_k - 1`, target drop `c = 2 - 2/n`, and
/// the shift recursion `U_1 = 2*ones_less(0) - (cn, ..., cn)`,
/// `U_{k+1} = 2*ones_less(k+1) + U_k`, terminating at
/// `U_{n-1} = -2*ones_less(n-1)`.
#[derive(Debug, Clone)]
pub struct Lms112Chain {
    pub n: usize,
    /// Weight drop `2 - 2/n`.
    pub c: f64,
    pub p_schedule: Vec<f64>,
    /// Isotropic shift `(-c, ..., -c)`.
    pub v: Vec<f64>,
    pub us: Vec<Vec<f64>>,
    /// Intermediate targets `-2*ones_less(k)`.
    pub v_prime_targets: Vec<Vec<f64>>,
    /// Terminal shift `U_{n-1}`.
    pub v_prime: Vec<f64>,
    /// Terminal identity `v_prime == -2*ones_less(n-1)` holds exactly.
    pub terminal_ok: bool,
    /// The additive recursion agrees with the generic
    /// `U_{k+1} = -V'_{k+1} + (p_{k+1}/(p_k - 1)) U_k` route exactly.
    pub recursion_ok: bool,
}

/// All-ones vector with a zero in slot `k`.
fn ones_less(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![1.0; n];
    v[k] = 0.0;
    v
}

pub fn lms112_chain(n: usize) -> Result<Lms112Chain, EmbedError> {
    if n < 2 {
        return Err(EmbedError::TooFewVariables);
    }
    let nf = n as f64;
    let c = 2.0 - 2.0 / nf;
    let cn = 2.0 * (nf - 1.0); // n * c, exactly
    let p_schedule: Vec<f64> = (0..n - 1).map(|k| nf - k as f64).collect();
    let v = vec![-c; n];
    let v_prime_targets: Vec<Vec<f64>> = (0..n - 1)
        .map(|k| ones_less(n, k).iter().map(|e| -2.0 * e).collect())
        .collect();

    let mut us: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let u1: Vec<f64> = ones_less(n, 0).iter().map(|e| 2.0 * e - cn).collect();
    us.push(u1);
    for k in 1..n - 1 {
        let step = ones_less(n, k);
        let prev = us[k - 1].clone();
        us.push(
            prev.iter()
                .zip(&step)
                .map(|(u, e)| u + 2.0 * e)
                .collect(),
        );
    }

    // Cross-check against the generic recursion; the telescoping exponent
    // schedule makes every factor p_{k+1}/(p_k - 1) equal to 1.
    // U_1 = -V'_1 + p_1 V, where p_1 V = (-cn, ..., -cn) exactly.
    let mut recursion_ok = true;
    let generic_u1: Vec<f64> = v_prime_targets[0].iter().map(|vp| -vp - cn).collect();
    if us[0] != generic_u1 {
        recursion_ok = false;
    }
    for k in 1..n - 1 {
        let factor = p_schedule[k] / (p_schedule[k - 1] - 1.0);
        let generic: Vec<f64> = us[k - 1]
            .iter()
            .zip(&v_prime_targets[k])
            .map(|(u, vp)| -vp + factor * u)
            .collect();
        if us[k] != generic {
            recursion_ok = false;
        }
    }

    let v_prime = us[n - 2].clone();
    let terminal: Vec<f64> = ones_less(n, n - 1).iter().map(|e| -2.0 * e).collect();
    let terminal_ok = v_prime == terminal;

    Ok(Lms112Chain {
        n,
        c,
        p_schedule,
        v,
        us,
        v_prime_targets,
        v_prime,
        terminal_ok,
        recursion_ok,
    })
}

/// What supports a claimed membership of `1/p` in the hypothesis space.
#[derive(Debug, Clone)]
pub enum MembershipEvidence {
    /// Series classifier verdict for `1/p` at the hypothesis weight.
    SeriesClassifier {
        status: Membership,
        tail_exponent: f64,
    },
    /// Stabilized weighted area integral of `|1/p|^2`.
    Quadrature { value: f64, converged: bool },
    /// Boundary decay exponent satisfying the sufficient inequality.
    DecayBound { q_hat: f64, bound: f64 },
    /// Supplied by the caller without numerical backing.
    Asserted,
}

impl MembershipEvidence {
    pub fn supports(&self) -> bool {
        match self {
            MembershipEvidence::SeriesClassifier { status, .. } => {
                *status == Membership::Convergent
            }
            MembershipEvidence::Quadrature { converged, .. } => *converged,
            MembershipEvidence::DecayBound { q_hat, bound } => q_hat < bound,
            MembershipEvidence::Asserted => true,
        }
    }
}

/// The weight-improvement verdict: `1/p in D_alpha` for `alpha < 0` implies
/// the RIF lies in `D_{alpha + 2/n}`.
#[derive(Debug, Clone)]
pub struct Lms113Verdict {
    pub alpha: f64,
    pub n: usize,
    pub claimed_exponent: f64,
    pub evidence: MembershipEvidence,
    /// Whether the supplied evidence actually certifies the hypothesis.
    pub evidence_supports: bool,
}

pub fn lms113_verdict(
    alpha: f64,
    n: usize,
    evidence: MembershipEvidence,
) -> Result<Lms113Verdict, EmbedError> {
    if alpha >= 0.0 {
        return Err(EmbedError::NonnegativeAlpha { alpha });
    }
    let evidence_supports = evidence.supports();
    Ok(Lms113Verdict {
        alpha,
        n,
        claimed_exponent: alpha + 2.0 / n as f64,
        evidence,
        evidence_supports,
    })
}
