//! Command-line front end: constructs rational inner functions from a
//! denominator document, runs the numerical analyses, and emits JSON reports
//! (optionally with CSV curve dumps).

mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rif_core::loja::LojaConfig;
use rif_core::poly::{MultiIndex, MultiPoly};
use rif_core::rif::{build_rif, ProbeConfig, Rif};
use rif_core::series::ExpandConfig;
use rif_core::Complex64;

use io::{parse_poly, poly_to_doc, write_csv};
use report::{EffectiveOptions, ReportPlan, VersionInfo};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "rif-lab",
    version,
    about = "Rational inner functions on the polydisk: construction, series, and Dirichlet-type membership"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// RNG seed for every sampled stage.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Cap on dense coefficient boxes.
    #[arg(long = "max-coeffs", global = true, default_value_t = 1 << 22)]
    max_coeffs: usize,
    /// Classifier margin around the critical tail exponent.
    #[arg(long, global = true, default_value_t = 0.15)]
    tol: f64,
    /// Box-order schedule for the classifier, comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "32,64,128,256,512")]
    schedule: Vec<u32>,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write curve data (partial sums, measures) as CSV here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Worker threads (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reflect the polynomial at its multidegree (or a given degree).
    Reflect {
        #[arg(long)]
        poly: PathBuf,
        /// Reflection degree, comma separated; default is the multidegree.
        #[arg(long, value_delimiter = ',')]
        degree: Option<Vec<u32>>,
    },
    /// Validate the denominator and report the stability certificate.
    Validate {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Expand numerator/denominator into a coefficient box.
    Expand {
        #[arg(long)]
        poly: PathBuf,
        /// Per-variable truncation orders, comma separated.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<u32>,
        /// Numerator document; default is the constant 1.
        #[arg(long)]
        num: Option<PathBuf>,
        /// Use the reflection as numerator (the RIF itself).
        #[arg(long, conflicts_with = "num")]
        rif: bool,
    },
    /// Classify membership of the RIF (or 1/p) at a weight vector.
    Classify {
        #[arg(long)]
        poly: PathBuf,
        /// Weight exponents, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<f64>,
        /// Classify 1/p instead of the RIF.
        #[arg(long)]
        inverse: bool,
        /// Cross-check with the weighted area integral (weights <= 0 only).
        #[arg(long)]
        quadrature: bool,
    },
    /// Radial means of |d phi / d z_k|^p with extrapolation.
    Hp {
        #[arg(long)]
        poly: PathBuf,
        /// Variable index, 1-based.
        #[arg(long)]
        var: usize,
        #[arg(long)]
        p: f64,
    },
    /// Monte Carlo profile of the near-singular slice parameter measure.
    Omega {
        #[arg(long)]
        poly: PathBuf,
        /// Variable index, 1-based.
        #[arg(long)]
        var: usize,
        #[arg(long, default_value_t = 50_000)]
        samples: usize,
    },
    /// Feasibility of a membership target against integrability thresholds.
    Embed {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<f64>,
        /// Thresholds per variable ("inf" allowed); estimated when absent.
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<String>>,
        /// Treat provided thresholds as attained (closed endpoints).
        #[arg(long)]
        closed: bool,
        /// Also run the direct bisection route when estimating thresholds.
        #[arg(long)]
        bisect: bool,
    },
    /// Boundary decay probe at a declared torus zero.
    Loja {
        #[arg(long)]
        poly: PathBuf,
        /// Singular point as re,im pairs, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
        /// Hypothesis weight (< 0) for the membership verdict.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
    /// Full pipeline report.
    Report {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Option<Vec<f64>>,
        /// Singular point for the decay stage, re,im pairs.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        /// Stages to run, comma separated; default runs everything feasible.
        #[arg(long, value_delimiter = ',')]
        stages: Option<Vec<String>>,
        /// Level-set sample count for the threshold stage.
        #[arg(long, default_value_t = 50_000)]
        omega_samples: usize,
        /// Enable the bisection cross-check in the threshold stage.
        #[arg(long)]
        bisect: bool,
    },
}

enum CliError {
    Usage(String),
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if cli.global.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = serde_json::json!({
                "error": e.message(),
                "exit_code": e.exit_code(),
            });
            eprintln!("{}", serde_json::to_string_pretty(&payload).unwrap());
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_poly(path: &PathBuf) -> Result<MultiPoly, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_poly(&text).map_err(|e| CliError::Validation(e.to_string()))
}

fn build_validated(p: MultiPoly, seed: u64) -> Result<Rif, CliError> {
    build_rif(
        p,
        &ProbeConfig {
            seed,
            ..ProbeConfig::default()
        },
    )
    .map_err(|e| CliError::Validation(e.to_string()))
}

fn parse_point(values: &[f64], n: usize) -> Result<Vec<Complex64>, CliError> {
    if values.len() != 2 * n {
        return Err(CliError::Usage(format!(
            "--point needs {} re,im values for {n} variables, got {}",
            2 * n,
            values.len()
        )));
    }
    Ok(values
        .chunks(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect())
}

fn emit<T: Serialize>(global: &GlobalOpts, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))?;
    match &global.json {
        Some(path) => std::fs::write(path, text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    version: VersionInfo,
    #[serde(flatten)]
    body: T,
}

fn wrap<T: Serialize>(body: T) -> Envelope<T> {
    Envelope {
        version: VersionInfo::current(),
        body,
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Reflect { poly, degree } => {
            let p = load_poly(poly)?;
            let d = match degree {
                Some(d) => MultiIndex::new(d.clone()),
                None => p.multidegree().clone(),
            };
            let out = report::reflect_out(&p, &d).map_err(CliError::Validation)?;
            emit(g, &wrap(out))
        }
        Cmd::Validate { poly } => {
            let p = load_poly(poly)?;
            let f = build_validated(p, g.seed)?;
            emit(g, &wrap(report::validate_out(&f)))
        }
        Cmd::Expand { poly, orders, num, rif } => {
            let p = load_poly(poly)?;
            if orders.len() != p.vars() {
                return Err(CliError::Usage(format!(
                    "--orders needs {} entries, got {}",
                    p.vars(),
                    orders.len()
                )));
            }
            let numerator = if *rif {
                p.reflect(p.multidegree())
                    .map_err(|e| CliError::Validation(e.to_string()))?
            } else if let Some(path) = num {
                let q = load_poly(path)?;
                if q.vars() != p.vars() {
                    return Err(CliError::Validation(
                        "numerator and denominator variable counts differ".into(),
                    ));
                }
                q
            } else {
                MultiPoly::constant(p.vars(), Complex64::new(1.0, 0.0))
            };
            let out = report::expand_out(
                &numerator,
                &p,
                &MultiIndex::new(orders.clone()),
                &ExpandConfig {
                    max_coeffs: g.max_coeffs,
                },
                true,
            )
            .map_err(CliError::Numerical)?;
            emit(g, &wrap(out))
        }
        Cmd::Classify {
            poly,
            alpha,
            inverse,
            quadrature,
        } => {
            let p = load_poly(poly)?;
            if alpha.len() != p.vars() {
                return Err(CliError::Usage(format!(
                    "--alpha needs {} entries, got {}",
                    p.vars(),
                    alpha.len()
                )));
            }
            let f = build_validated(p, g.seed)?;
            let one = MultiPoly::constant(f.vars(), Complex64::new(1.0, 0.0));
            let numerator = if *inverse { &one } else { f.numerator() };
            let req = report::ClassifyRequest {
                numerator,
                denominator: f.denominator(),
                alpha: alpha.clone(),
                schedule: g.schedule.clone(),
                margin: g.tol,
                max_coeffs: g.max_coeffs,
                with_quadrature: *quadrature,
            };
            let out = report::classify_out(&req).map_err(CliError::Numerical)?;
            if let Some(csv) = &g.csv {
                let rows: Vec<Vec<f64>> = out
                    .partial_sums
                    .iter()
                    .map(|&(n, s)| vec![n as f64, s])
                    .collect();
                write_csv(csv, "order,partial_sum", &rows)
                    .map_err(|e| CliError::Usage(format!("cannot write CSV: {e}")))?;
            }
            emit(g, &wrap(out))
        }
        Cmd::Hp { poly, var, p } => {
            let den = load_poly(poly)?;
            let k = check_var(*var, den.vars())?;
            let f = build_validated(den, g.seed)?;
            let out = report::hp_out(&f, k, *p, &Default::default())
                .map_err(CliError::Numerical)?;
            if let Some(csv) = &g.csv {
                let rows: Vec<Vec<f64>> = out
                    .per_radius
                    .iter()
                    .map(|&(r, v)| vec![r, v])
                    .collect();
                write_csv(csv, "radius,mean", &rows)
                    .map_err(|e| CliError::Usage(format!("cannot write CSV: {e}")))?;
            }
            emit(g, &wrap(out))
        }
        Cmd::Omega { poly, var, samples } => {
            let den = load_poly(poly)?;
            let k = check_var(*var, den.vars())?;
            let f = build_validated(den, g.seed)?;
            let xs: Vec<f64> = (2..=14).map(|j| 2f64.powi(j)).collect();
            let (out, _) = report::omega_out(&f, k, &xs, *samples, g.seed)
                .map_err(CliError::Numerical)?;
            if let Some(csv) = &g.csv {
                let rows: Vec<Vec<f64>> = out
                    .xs
                    .iter()
                    .zip(&out.measures)
                    .zip(&out.std_errs)
                    .map(|((&x, &m), &s)| vec![x, m, s])
                    .collect();
                write_csv(csv, "x,measure,std_err", &rows)
                    .map_err(|e| CliError::Usage(format!("cannot write CSV: {e}")))?;
            }
            emit(g, &wrap(out))
        }
        Cmd::Embed {
            poly,
            alpha,
            thresholds,
            closed,
            bisect,
        } => {
            let p = load_poly(poly)?;
            let n = p.vars();
            if alpha.len() != n {
                return Err(CliError::Usage(format!(
                    "--alpha needs {n} entries, got {}",
                    alpha.len()
                )));
            }
            use rif_core::hardy::{Endpoint, IntegrabilityProfile, ThresholdConfig};
            let (profile, provenance) = match thresholds {
                Some(raw) => {
                    if raw.len() != n {
                        return Err(CliError::Usage(format!(
                            "--thresholds needs {n} entries, got {}",
                            raw.len()
                        )));
                    }
                    let mut values = Vec::with_capacity(n);
                    for s in raw {
                        let v = if s == "inf" {
                            f64::INFINITY
                        } else {
                            s.parse::<f64>().map_err(|_| {
                                CliError::Usage(format!("bad threshold value: {s}"))
                            })?
                        };
                        values.push(v);
                    }
                    let endpoint = if *closed { Endpoint::Closed } else { Endpoint::Open };
                    (
                        IntegrabilityProfile::from_thresholds(&values, endpoint),
                        "cli.thresholds",
                    )
                }
                None => {
                    let f = build_validated(p.clone(), g.seed)?;
                    let cfg = ThresholdConfig {
                        seed: g.seed,
                        bisect: if *bisect { Some((1.0, 3.0, 6)) } else { None },
                        ..ThresholdConfig::default()
                    };
                    let (_, profile) =
                        report::hardy_out(&f, &cfg).map_err(CliError::Numerical)?;
                    (profile, "stages.hardy")
                }
            };
            let out = report::embed_out(alpha, &profile, provenance)
                .map_err(CliError::Numerical)?;
            emit(g, &wrap(out))
        }
        Cmd::Loja { poly, point, alpha } => {
            let p = load_poly(poly)?;
            let pt = parse_point(point, p.vars())?;
            if let Some(a) = alpha {
                if *a >= 0.0 {
                    return Err(CliError::Usage(format!(
                        "--alpha must be negative for the decay verdict, got {a}"
                    )));
                }
            }
            let cfg = LojaConfig {
                seed: g.seed,
                ..LojaConfig::default()
            };
            let (out, _) =
                report::loja_out(&p, &pt, *alpha, &cfg).map_err(CliError::Numerical)?;
            if let Some(csv) = &g.csv {
                let rows: Vec<Vec<f64>> = out
                    .envelope
                    .iter()
                    .map(|e| vec![e[0], e[1]])
                    .collect();
                write_csv(csv, "log10_dist,log10_min_abs_p", &rows)
                    .map_err(|e| CliError::Usage(format!("cannot write CSV: {e}")))?;
            }
            emit(g, &wrap(out))
        }
        Cmd::Report {
            poly,
            alpha,
            point,
            stages,
            omega_samples,
            bisect,
        } => {
            let p = load_poly(poly)?;
            let doc = poly_to_doc(&p);
            if let Some(a) = alpha {
                if a.len() != p.vars() {
                    return Err(CliError::Usage(format!(
                        "--alpha needs {} entries, got {}",
                        p.vars(),
                        a.len()
                    )));
                }
            }
            let pt = match point {
                Some(values) => Some(parse_point(values, p.vars())?),
                None => None,
            };
            let default_stages: Vec<String> = {
                let mut s = vec![
                    "reflect".to_string(),
                    "validate".to_string(),
                    "expand".to_string(),
                ];
                if alpha.is_some() {
                    s.push("classify".to_string());
                }
                s.push("hardy".to_string());
                if alpha.is_some() {
                    s.push("embed".to_string());
                }
                if pt.is_some() {
                    s.push("loja".to_string());
                }
                s
            };
            let plan = ReportPlan {
                poly: p,
                doc,
                alpha: alpha.clone(),
                point: pt,
                options: EffectiveOptions {
                    seed: g.seed,
                    max_coeffs: g.max_coeffs,
                    schedule: g.schedule.clone(),
                    classify_margin: g.tol,
                    omega_samples: *omega_samples,
                    bisect: *bisect,
                },
                stages: stages.clone().unwrap_or(default_stages),
            };
            let rep = report::run_report(&plan);
            if let Some(csv) = &g.csv {
                if let Some(classify) = &rep.stages.classify {
                    let rows: Vec<Vec<f64>> = classify
                        .partial_sums
                        .iter()
                        .map(|&(n, s)| vec![n as f64, s])
                        .collect();
                    write_csv(csv, "order,partial_sum", &rows)
                        .map_err(|e| CliError::Usage(format!("cannot write CSV: {e}")))?;
                }
            }
            // Validation failures surface in the exit status even though the
            // report itself is still emitted.
            let failed_validation = rep.stages.errors.contains_key("validate");
            emit(g, &rep)?;
            if failed_validation {
                return Err(CliError::Validation(
                    rep.stages.errors["validate"].clone(),
                ));
            }
            Ok(())
        }
    }
}

fn check_var(var: usize, n: usize) -> Result<usize, CliError> {
    if var == 0 || var > n {
        return Err(CliError::Usage(format!(
            "--var is 1-based and must be within 1..={n}, got {var}"
        )));
    }
    Ok(var - 1)
}
