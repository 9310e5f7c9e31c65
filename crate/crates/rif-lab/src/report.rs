//! Report structures and stage runners. Every numeric claim carries a
//! method tag and the stage that produced its inputs, so a report documents
//! its own provenance.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use rif_core::dirichlet::{
    classify_membership, integral_norm_leq0, ClassifyConfig, Membership, QuadConfig,
    RationalSource, WeightVector,
};
use rif_core::embeddings::hp_embed_feasible;
use rif_core::hardy::{
    hp_norm_partial, integrability_profile, omega_measure, Endpoint, HpConfig,
    IntegrabilityProfile, OmegaProfile, ThresholdConfig,
};
use rif_core::loja::{claimed_threshold, loj_verdict, loja_probe, LojaConfig, LojaEstimate};
use rif_core::poly::{MultiIndex, MultiPoly};
use rif_core::rif::{build_rif, ProbeConfig, Rif};
use rif_core::series::{expand_ratio, ExpandConfig};
use rif_core::Complex64;

use crate::io::{poly_to_doc, PolyDoc, TermDoc};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct VersionInfo {
    pub tool: String,
    pub schema: u32,
}

impl VersionInfo {
    pub fn current() -> Self {
        VersionInfo {
            tool: format!("rif-lab {}", env!("CARGO_PKG_VERSION")),
            schema: SCHEMA_VERSION,
        }
    }
}

/// Effective options embedded in every report so runs are self-describing.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveOptions {
    pub seed: u64,
    pub max_coeffs: usize,
    pub schedule: Vec<u32>,
    pub classify_margin: f64,
    pub omega_samples: usize,
    pub bisect: bool,
}

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub polynomial: PolyDoc,
    pub options: EffectiveOptions,
}

#[derive(Debug, Default, Serialize)]
pub struct Stages {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reflect: Option<ReflectOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validate: Option<ValidateOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expand: Option<ExpandOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifyOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hardy: Option<HardyOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embed: Option<EmbedOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loja: Option<LojaOut>,
    /// Stage failures are embedded rather than aborting the whole report.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub errors: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub version: VersionInfo,
    pub input: InputRecord,
    pub stages: Stages,
    /// Milliseconds per executed stage.
    pub timings: BTreeMap<String, u64>,
}

#[derive(Debug, Serialize)]
pub struct ReflectOut {
    pub degree: Vec<u32>,
    pub numerator: Vec<TermDoc>,
}

#[derive(Debug, Serialize)]
pub struct ValidateOut {
    pub multidegree: Vec<u32>,
    pub interior_min_modulus: f64,
    pub interior_samples: usize,
    pub worst_slice_root_margin: f64,
    pub torus_min_modulus: f64,
    pub torus_excluded: usize,
    pub torus_samples: usize,
    pub max_unimodularity_defect: f64,
}

#[derive(Debug, Serialize)]
pub struct ExpandOut {
    pub orders: Vec<u32>,
    pub coefficient_count: usize,
    /// Emitted only when the box is small enough to be useful as text.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<TermDoc>>,
    /// First entries of the diagonal, as (re, im) pairs.
    pub diagonal_head: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct ClassifyOut {
    pub method: &'static str,
    pub alpha: Vec<f64>,
    pub status: &'static str,
    pub tail_exponent: f64,
    pub tail_half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_estimate: Option<f64>,
    pub orders_used: Vec<u32>,
    pub partial_sums: Vec<(u32, f64)>,
    pub margin: f64,
    /// Optional cross-check by the weighted area integral (nonpositive
    /// weights only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureOut>,
}

#[derive(Debug, Serialize)]
pub struct QuadratureOut {
    pub method: &'static str,
    pub value: f64,
    pub last_delta: f64,
    pub converged: bool,
    pub refinements: usize,
}

#[derive(Debug, Serialize)]
pub struct ThresholdOut {
    pub variable: usize,
    /// `null` encodes an unbounded threshold (bounded derivative).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub endpoint: &'static str,
    pub half_width: f64,
    pub bounded_derivative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levelset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bisection: Option<f64>,
    pub conclusive: bool,
}

#[derive(Debug, Serialize)]
pub struct HardyOut {
    pub method: &'static str,
    pub entries: Vec<ThresholdOut>,
}

#[derive(Debug, Serialize)]
pub struct HpOut {
    pub method: &'static str,
    pub variable: usize,
    pub p: f64,
    pub per_radius: Vec<(f64, f64)>,
    pub extrapolated: f64,
    pub converged: bool,
    pub growth_exponent: f64,
    pub monotone_in_r: bool,
}

#[derive(Debug, Serialize)]
pub struct OmegaOut {
    pub method: &'static str,
    pub variable: usize,
    pub xs: Vec<f64>,
    pub measures: Vec<f64>,
    pub std_errs: Vec<f64>,
    pub fitted_exponent: Option<f64>,
    pub fit_half_width: f64,
    pub tail_vanishes: bool,
    pub samples: usize,
    pub degenerate: usize,
}

#[derive(Debug, Serialize)]
pub struct EmbedOut {
    pub method: &'static str,
    pub provenance: &'static str,
    pub alpha: Vec<f64>,
    pub thresholds: Vec<Option<f64>>,
    pub feasible: bool,
    pub strict: bool,
    pub budget: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_cs: Option<Vec<Option<f64>>>,
    pub within_stated_range: bool,
}

#[derive(Debug, Serialize)]
pub struct LojaOut {
    pub estimate_method: &'static str,
    pub point: Vec<[f64; 2]>,
    pub q_hat: f64,
    pub c_hat: f64,
    pub half_width: f64,
    pub samples: usize,
    pub envelope: Vec<[f64; 2]>,
    /// Best claimable isotropic membership exponent from the fitted decay.
    pub best_threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<LojaVerdictOut>,
}

#[derive(Debug, Serialize)]
pub struct LojaVerdictOut {
    pub method: &'static str,
    pub alpha: f64,
    pub bound: f64,
    pub q_used: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_exponent: Option<f64>,
}

fn membership_str(m: Membership) -> &'static str {
    match m {
        Membership::Convergent => "convergent",
        Membership::Divergent => "divergent",
        Membership::Inconclusive => "inconclusive",
    }
}

fn endpoint_str(e: Endpoint) -> &'static str {
    match e {
        Endpoint::Open => "open",
        Endpoint::Closed => "closed",
    }
}

fn finite_or_none(v: f64) -> Option<f64> {
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

pub fn reflect_out(p: &MultiPoly, degree: &MultiIndex) -> Result<ReflectOut, String> {
    let r = p.reflect(degree).map_err(|e| e.to_string())?;
    Ok(ReflectOut {
        degree: degree.as_slice().to_vec(),
        numerator: poly_to_doc(&r).terms,
    })
}

pub fn validate_out(f: &Rif) -> ValidateOut {
    let c = f.certificate();
    ValidateOut {
        multidegree: f.multidegree().as_slice().to_vec(),
        interior_min_modulus: c.interior_min_modulus,
        interior_samples: c.interior_samples,
        worst_slice_root_margin: c.worst_root_margin,
        torus_min_modulus: c.torus_min_modulus,
        torus_excluded: c.torus_excluded,
        torus_samples: c.torus_samples,
        max_unimodularity_defect: c.max_unimodularity_defect,
    }
}

pub fn expand_out(
    num: &MultiPoly,
    den: &MultiPoly,
    orders: &MultiIndex,
    cfg: &ExpandConfig,
    emit_coefficients: bool,
) -> Result<ExpandOut, String> {
    let cb = expand_ratio(num, den, orders, cfg).map_err(|e| e.to_string())?;
    let coefficients = if emit_coefficients && cb.len() <= 16_384 {
        let mut terms = Vec::with_capacity(cb.len());
        cb.for_each(|exps, c| {
            terms.push(TermDoc {
                exp: exps.to_vec(),
                re: c.re,
                im: c.im,
            });
        });
        Some(terms)
    } else {
        None
    };
    let diagonal_head: Vec<[f64; 2]> = cb
        .diagonal()
        .into_iter()
        .take(16)
        .map(|c| [c.re, c.im])
        .collect();
    Ok(ExpandOut {
        orders: orders.as_slice().to_vec(),
        coefficient_count: cb.len(),
        coefficients,
        diagonal_head,
    })
}

pub struct ClassifyRequest<'a> {
    pub numerator: &'a MultiPoly,
    pub denominator: &'a MultiPoly,
    pub alpha: Vec<f64>,
    pub schedule: Vec<u32>,
    pub margin: f64,
    pub max_coeffs: usize,
    pub with_quadrature: bool,
}

pub fn classify_out(req: &ClassifyRequest) -> Result<ClassifyOut, String> {
    let src = RationalSource {
        numerator: req.numerator,
        denominator: req.denominator,
        cfg: ExpandConfig {
            max_coeffs: req.max_coeffs,
        },
    };
    let w = WeightVector::new(req.alpha.clone());
    let cfg = ClassifyConfig { margin: req.margin };
    let v = classify_membership(&src, &w, &req.schedule, &cfg).map_err(|e| e.to_string())?;

    let quadrature = if req.with_quadrature && req.alpha.iter().all(|&a| a <= 0.0) {
        let num = req.numerator.clone();
        let den = req.denominator.clone();
        let f = move |z: &[Complex64]| num.eval(z).unwrap() / den.eval(z).unwrap();
        match integral_norm_leq0(&f, req.denominator.vars(), &w, &QuadConfig::default()) {
            Ok(est) => Some(QuadratureOut {
                method: "quadrature",
                value: est.value,
                last_delta: est.last_delta,
                converged: est.converged,
                refinements: est.refinements,
            }),
            Err(e) => return Err(e.to_string()),
        }
    } else {
        None
    };

    Ok(ClassifyOut {
        method: "series-classifier",
        alpha: req.alpha.clone(),
        status: membership_str(v.status),
        tail_exponent: v.tail_exponent,
        tail_half_width: v.tail_half_width,
        norm_estimate: v.norm_estimate,
        orders_used: v.orders_used.as_slice().to_vec(),
        partial_sums: v.partial_sums,
        margin: req.margin,
        quadrature,
    })
}

pub fn hardy_out(f: &Rif, cfg: &ThresholdConfig) -> Result<(HardyOut, IntegrabilityProfile), String> {
    let profile = integrability_profile(f, cfg).map_err(|e| e.to_string())?;
    let entries = profile
        .entries
        .iter()
        .map(|e| ThresholdOut {
            variable: e.variable + 1,
            threshold: finite_or_none(e.threshold),
            endpoint: endpoint_str(e.endpoint),
            half_width: e.half_width,
            bounded_derivative: e.bounded_derivative,
            levelset: e.levelset_threshold.and_then(finite_or_none),
            bisection: e.bisection_threshold.and_then(finite_or_none),
            conclusive: e.conclusive,
        })
        .collect();
    Ok((
        HardyOut {
            method: "levelset",
            entries,
        },
        profile,
    ))
}

pub fn hp_out(f: &Rif, k: usize, p: f64, cfg: &HpConfig) -> Result<HpOut, String> {
    let est = hp_norm_partial(f, k, p, cfg).map_err(|e| e.to_string())?;
    Ok(HpOut {
        method: "levelset",
        variable: k + 1,
        p,
        per_radius: est.per_radius,
        extrapolated: est.extrapolated,
        converged: est.converged,
        growth_exponent: est.growth_exponent,
        monotone_in_r: est.monotone_in_r,
    })
}

pub fn omega_out(
    f: &Rif,
    k: usize,
    xs: &[f64],
    samples: usize,
    seed: u64,
) -> Result<(OmegaOut, OmegaProfile), String> {
    let profile = omega_measure(f, k, xs, samples, seed).map_err(|e| e.to_string())?;
    let out = OmegaOut {
        method: "levelset",
        variable: k + 1,
        xs: profile.xs.clone(),
        measures: profile.measures.clone(),
        std_errs: profile.std_errs.clone(),
        fitted_exponent: finite_or_none(profile.fitted_exponent),
        fit_half_width: profile.fit_half_width,
        tail_vanishes: profile.tail_vanishes,
        samples: profile.samples,
        degenerate: profile.degenerate,
    };
    Ok((out, profile))
}

pub fn embed_out(
    alpha: &[f64],
    profile: &IntegrabilityProfile,
    provenance: &'static str,
) -> Result<EmbedOut, String> {
    let w = WeightVector::new(alpha.to_vec());
    let out = hp_embed_feasible(&w, profile).map_err(|e| e.to_string())?;
    Ok(EmbedOut {
        method: "theorem-implication",
        provenance,
        alpha: alpha.to_vec(),
        thresholds: profile
            .entries
            .iter()
            .map(|e| finite_or_none(e.threshold))
            .collect(),
        feasible: out.feasible,
        strict: out.strict,
        budget: out.budget,
        witness_cs: out
            .witness_cs
            .map(|cs| cs.into_iter().map(finite_or_none).collect()),
        within_stated_range: out.within_stated_range,
    })
}

pub fn loja_out(
    p: &MultiPoly,
    point: &[Complex64],
    alpha: Option<f64>,
    cfg: &LojaConfig,
) -> Result<(LojaOut, LojaEstimate), String> {
    let est = loja_probe(p, point, cfg).map_err(|e| e.to_string())?;
    let n = p.vars();
    let verdict = match alpha {
        None => None,
        Some(a) => {
            let v = loj_verdict(&est, n, a).map_err(|e| e.to_string())?;
            Some(LojaVerdictOut {
                method: "theorem-implication",
                alpha: v.alpha,
                bound: v.bound,
                q_used: v.q_used,
                pass: v.pass,
                claimed_exponent: v.claimed_exponent,
            })
        }
    };
    let out = LojaOut {
        estimate_method: "decay-envelope",
        point: point.iter().map(|w| [w.re, w.im]).collect(),
        q_hat: est.q_hat,
        c_hat: est.c_hat,
        half_width: est.half_width,
        samples: est.samples,
        envelope: est.envelope.iter().map(|&(x, y)| [x, y]).collect(),
        best_threshold: claimed_threshold(est.q_hat, n),
        verdict,
    };
    Ok((out, est))
}

/// Which stages a `report` invocation runs.
#[derive(Debug, Clone)]
pub struct ReportPlan {
    pub poly: MultiPoly,
    pub doc: PolyDoc,
    pub alpha: Option<Vec<f64>>,
    pub point: Option<Vec<Complex64>>,
    pub options: EffectiveOptions,
    pub stages: Vec<String>,
}

/// Runs the selected stages in pipeline order, embedding per-stage errors
/// instead of aborting, and recording wall-clock timings.
pub fn run_report(plan: &ReportPlan) -> Report {
    let mut stages = Stages::default();
    let mut timings = BTreeMap::new();
    let enabled = |name: &str| plan.stages.iter().any(|s| s == name);
    let probe = ProbeConfig {
        seed: plan.options.seed,
        ..ProbeConfig::default()
    };

    let mut rif: Option<Rif> = None;
    let degree = plan.poly.multidegree().clone();

    if enabled("reflect") {
        let t = Instant::now();
        match reflect_out(&plan.poly, &degree) {
            Ok(out) => stages.reflect = Some(out),
            Err(e) => {
                stages.errors.insert("reflect".into(), e);
            }
        }
        timings.insert("reflect".into(), t.elapsed().as_millis() as u64);
    }

    if enabled("validate") || enabled("classify") || enabled("hardy") || enabled("embed") {
        let t = Instant::now();
        match build_rif(plan.poly.clone(), &probe) {
            Ok(f) => {
                stages.validate = Some(validate_out(&f));
                rif = Some(f);
            }
            Err(e) => {
                stages.errors.insert("validate".into(), e.to_string());
            }
        }
        timings.insert("validate".into(), t.elapsed().as_millis() as u64);
    }

    if enabled("expand") {
        let t = Instant::now();
        let num = match &rif {
            Some(f) => f.numerator().clone(),
            None => plan
                .poly
                .reflect(&degree)
                .unwrap_or_else(|_| MultiPoly::constant(plan.poly.vars(), Complex64::new(1.0, 0.0))),
        };
        let top = *plan.options.schedule.last().unwrap_or(&64);
        let orders = MultiIndex::new(vec![top.min(64); plan.poly.vars()]);
        match expand_out(
            &num,
            &plan.poly,
            &orders,
            &ExpandConfig {
                max_coeffs: plan.options.max_coeffs,
            },
            false,
        ) {
            Ok(out) => stages.expand = Some(out),
            Err(e) => {
                stages.errors.insert("expand".into(), e);
            }
        }
        timings.insert("expand".into(), t.elapsed().as_millis() as u64);
    }

    if enabled("classify") {
        let t = Instant::now();
        match (&rif, &plan.alpha) {
            (Some(f), Some(alpha)) => {
                let req = ClassifyRequest {
                    numerator: f.numerator(),
                    denominator: f.denominator(),
                    alpha: alpha.clone(),
                    schedule: plan.options.schedule.clone(),
                    margin: plan.options.classify_margin,
                    max_coeffs: plan.options.max_coeffs,
                    with_quadrature: false,
                };
                match classify_out(&req) {
                    Ok(out) => stages.classify = Some(out),
                    Err(e) => {
                        stages.errors.insert("classify".into(), e);
                    }
                }
            }
            (None, _) => {
                stages
                    .errors
                    .entry("classify".into())
                    .or_insert_with(|| "skipped: validation failed".into());
            }
            (_, None) => {
                stages
                    .errors
                    .insert("classify".into(), "skipped: no --alpha given".into());
            }
        }
        timings.insert("classify".into(), t.elapsed().as_millis() as u64);
    }

    let mut profile: Option<IntegrabilityProfile> = None;
    if enabled("hardy") {
        let t = Instant::now();
        match &rif {
            Some(f) => {
                let cfg = ThresholdConfig {
                    omega_samples: plan.options.omega_samples,
                    seed: plan.options.seed,
                    bisect: if plan.options.bisect {
                        Some((1.0, 3.0, 6))
                    } else {
                        None
                    },
                    ..ThresholdConfig::default()
                };
                match hardy_out(f, &cfg) {
                    Ok((out, prof)) => {
                        stages.hardy = Some(out);
                        profile = Some(prof);
                    }
                    Err(e) => {
                        stages.errors.insert("hardy".into(), e);
                    }
                }
            }
            None => {
                stages
                    .errors
                    .entry("hardy".into())
                    .or_insert_with(|| "skipped: validation failed".into());
            }
        }
        timings.insert("hardy".into(), t.elapsed().as_millis() as u64);
    }

    if enabled("embed") {
        let t = Instant::now();
        match (&profile, &plan.alpha) {
            (Some(prof), Some(alpha)) => match embed_out(alpha, prof, "stages.hardy") {
                Ok(out) => stages.embed = Some(out),
                Err(e) => {
                    stages.errors.insert("embed".into(), e);
                }
            },
            (None, _) => {
                stages
                    .errors
                    .entry("embed".into())
                    .or_insert_with(|| "skipped: no integrability profile".into());
            }
            (_, None) => {
                stages
                    .errors
                    .insert("embed".into(), "skipped: no --alpha given".into());
            }
        }
        timings.insert("embed".into(), t.elapsed().as_millis() as u64);
    }

    if enabled("loja") {
        let t = Instant::now();
        match &plan.point {
            Some(point) => {
                let cfg = LojaConfig {
                    seed: plan.options.seed,
                    ..LojaConfig::default()
                };
                let alpha = plan
                    .alpha
                    .as_ref()
                    .and_then(|a| a.first().copied())
                    .filter(|&a| a < 0.0);
                match loja_out(&plan.poly, point, alpha, &cfg) {
                    Ok((out, _)) => stages.loja = Some(out),
                    Err(e) => {
                        stages.errors.insert("loja".into(), e);
                    }
                }
            }
            None => {
                stages
                    .errors
                    .insert("loja".into(), "skipped: no --point given".into());
            }
        }
        timings.insert("loja".into(), t.elapsed().as_millis() as u64);
    }

    Report {
        version: VersionInfo::current(),
        input: InputRecord {
            polynomial: plan.doc.clone(),
            options: plan.options.clone(),
        },
        stages,
        timings,
    }
}
