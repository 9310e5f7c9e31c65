//! Construction and validation of rational inner functions `phi = ptilde / p`
//! from a stable denominator, and per-slice Blaschke data.
//!
//! Stability (no zeros of `p` in the open polydisk) is probed numerically,
//! not proved: a tensor grid in radius/angle, quasi-random interior samples,
//! and univariate root checks along sampled slices. A denominator passing the
//! probe ships with the sampled evidence in its certificate.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::poly::{MultiIndex, MultiPoly, PolyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RifError {
    #[error("denominator vanishes inside the polydisk near {point:?} (|p| = {modulus:.3e})")]
    InteriorZero { point: Vec<Complex64>, modulus: f64 },
    #[error("denominator is constant in variable {variable}")]
    DegenerateVariable { variable: usize },
    #[error("|ptilde/p| deviates from 1 by {defect:.3e} at a torus sample")]
    UnimodularityFailure { defect: f64 },
    #[error("slice parameter component {index} is not on the unit circle (|z| = {modulus})")]
    NotOnTorus { index: usize, modulus: f64 },
    #[error("numerator vanishes identically on the requested slice")]
    SliceIdenticallyZero,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Sampling budget and tolerances for the stability and inner-ness probes.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    /// Radii per variable for the interior tensor grid (geometric toward 1).
    pub grid_radii: usize,
    /// Angles per variable for the interior tensor grid.
    pub grid_angles: usize,
    /// Quasi-random (Weyl sequence) interior samples.
    pub weyl_samples: usize,
    /// Univariate root checks along random slices, per variable role.
    pub slice_probes_per_variable: usize,
    /// Random torus samples for the unimodularity check.
    pub torus_samples: usize,
    /// `|p|` below this (times the coefficient scale) counts as a zero.
    pub zero_tol: f64,
    /// Torus samples with `|p|` below this fraction of the coefficient scale
    /// are excluded from the unimodularity check as declared singular
    /// neighborhoods.
    pub exclusion_rel: f64,
    /// Maximum allowed `||phi| - 1|` at included torus samples.
    pub unimodularity_tol: f64,
    /// Slice roots with `1 - |root|` above this margin flag an interior zero.
    pub root_margin: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            grid_radii: 0, // auto by dimension
            grid_angles: 0,
            weyl_samples: 2048,
            slice_probes_per_variable: 128,
            torus_samples: 10_000,
            zero_tol: 1e-12,
            exclusion_rel: 1e-5,
            unimodularity_tol: 1e-9,
            root_margin: 1e-9,
            seed: 7,
        }
    }
}

impl ProbeConfig {
    fn grid_shape(&self, n: usize) -> (usize, usize) {
        if self.grid_radii > 0 && self.grid_angles > 0 {
            return (self.grid_radii, self.grid_angles);
        }
        match n {
            1 => (16, 24),
            2 => (6, 10),
            3 => (4, 7),
            4 => (3, 5),
            _ => (2, 4),
        }
    }
}

/// Evidence gathered by the probes that accepted a denominator.
#[derive(Debug, Clone)]
pub struct StabilityCertificate {
    /// Smallest sampled `|p|` over interior grid and quasi-random points.
    pub interior_min_modulus: f64,
    pub interior_samples: usize,
    /// Smallest `1 - |root|` margin seen among slice-root probes
    /// (negative values mean all roots stayed outside the open disk).
    pub worst_root_margin: f64,
    /// Smallest included `|p|` over torus samples.
    pub torus_min_modulus: f64,
    /// Torus samples excluded as declared singular neighborhoods.
    pub torus_excluded: usize,
    pub torus_samples: usize,
    /// Largest `||phi| - 1|` over included torus samples.
    pub max_unimodularity_defect: f64,
}

/// A rational inner function `ptilde / p` with its probe evidence.
#[derive(Debug, Clone)]
pub struct Rif {
    p: MultiPoly,
    ptilde: MultiPoly,
    multidegree: MultiIndex,
    certificate: StabilityCertificate,
}

impl Rif {
    pub fn denominator(&self) -> &MultiPoly {
        &self.p
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.ptilde
    }

    pub fn multidegree(&self) -> &MultiIndex {
        &self.multidegree
    }

    pub fn vars(&self) -> usize {
        self.p.vars()
    }

    pub fn certificate(&self) -> &StabilityCertificate {
        &self.certificate
    }

    /// Evaluates `phi(z)`; near denominator zeros this loses accuracy and
    /// on them it returns non-finite values.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, PolyError> {
        Ok(self.ptilde.eval(z)? / self.p.eval(z)?)
    }

    /// Zeros of the numerator slice in the open disk, the Blaschke degree
    /// defect, and the distance from the zero set to the circle.
    pub fn slice_blaschke(&self, k: usize, zhat: &[Complex64]) -> Result<BlaschkeSlice, RifError> {
        for (i, w) in zhat.iter().enumerate() {
            if (w.norm() - 1.0).abs() > 1e-8 {
                return Err(RifError::NotOnTorus {
                    index: i,
                    modulus: w.norm(),
                });
            }
        }
        let slice = self.ptilde.slice(k, zhat)?;
        if slice.is_zero() {
            return Err(RifError::SliceIdenticallyZero);
        }
        let dk = self.multidegree.get(k) as usize;
        let mut zeros = Vec::new();
        let mut boundary = 0usize;
        if slice.degree().unwrap_or(0) >= 1 {
            for root in slice.roots()? {
                let gap = 1.0 - root.norm();
                if gap >= BOUNDARY_GAP {
                    zeros.push(root);
                } else {
                    boundary += 1;
                }
            }
        }
        let delta = zeros
            .iter()
            .map(|z| 1.0 - z.norm())
            .min_by(|a, b| a.partial_cmp(b).unwrap());
        let delta_to_one = zeros
            .iter()
            .map(|z| (Complex64::new(1.0, 0.0) - z).norm())
            .min_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(BlaschkeSlice {
            degree_defect: dk.saturating_sub(zeros.len()),
            zeros,
            delta,
            delta_to_one,
            boundary_zeros: boundary,
        })
    }
}

/// Zeros of a slice below this distance from the circle count as boundary
/// zeros (cancel against the denominator) and are excluded from `delta`.
const BOUNDARY_GAP: f64 = 1e-12;

/// One-variable slice data of a RIF at a fixed torus parameter.
#[derive(Debug, Clone)]
pub struct BlaschkeSlice {
    /// Numerator-slice roots strictly inside the unit disk.
    pub zeros: Vec<Complex64>,
    /// Generic slice degree minus the count of interior zeros.
    pub degree_defect: usize,
    /// `min (1 - |zero|)`: distance from the zero set to the circle.
    /// `None` when there are no interior zeros (constant slice).
    pub delta: Option<f64>,
    /// `min |1 - zero|`: distance from the zero set to the point 1, kept
    /// alongside `delta` for diagnostics.
    pub delta_to_one: Option<f64>,
    /// Roots discarded as boundary zeros.
    pub boundary_zeros: usize,
}

/// Low-discrepancy point sequence: fractional parts of multiples of square
/// roots of primes.
pub(crate) struct WeylSequence {
    alphas: Vec<f64>,
    state: Vec<f64>,
}

impl WeylSequence {
    pub(crate) fn new(dim: usize, seed: u64) -> Self {
        const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
        let alphas: Vec<f64> = (0..dim)
            .map(|i| (PRIMES[i % PRIMES.len()] as f64).sqrt().fract())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        WeylSequence { alphas, state }
    }

    pub(crate) fn next_point(&mut self) -> Vec<f64> {
        for (s, a) in self.state.iter_mut().zip(&self.alphas) {
            *s = (*s + a).fract();
        }
        self.state.clone()
    }
}

/// Uniform random point on the torus.
pub fn uniform_torus(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// Validates a denominator and assembles the RIF `reflect(p) / p`.
///
/// Rejects denominators that are constant in some variable, vanish at a
/// probed interior point, have a sampled slice root inside the open disk, or
/// fail the unimodularity check on the torus.
pub fn build_rif(p: MultiPoly, probe: &ProbeConfig) -> Result<Rif, RifError> {
    let n = p.vars();
    for i in 0..n {
        if p.multidegree().get(i) == 0 {
            return Err(RifError::DegenerateVariable { variable: i });
        }
    }
    let scale = p.coeff_norm_l1().max(f64::MIN_POSITIVE);
    let zero_cut = probe.zero_tol * scale;

    // Origin first: a power series for 1/p needs p(0) != 0 anyway.
    let origin = vec![Complex64::new(0.0, 0.0); n];
    let at_origin = p.eval(&origin)?.norm();
    if at_origin < zero_cut {
        return Err(RifError::InteriorZero {
            point: origin,
            modulus: at_origin,
        });
    }

    // Interior min-modulus probe: tensor grid plus Weyl samples.
    let mut interior_min = at_origin;
    let mut interior_argmin = origin.clone();
    let mut interior_samples = 1usize;
    let (nr, na) = probe.grid_shape(n);
    let radii: Vec<f64> = (0..nr).map(|j| 1.0 - 0.5f64.powi(j as i32 + 1)).collect();
    let check = |z: &[Complex64],
                     interior_min: &mut f64,
                     interior_argmin: &mut Vec<Complex64>|
     -> Result<(), RifError> {
        let m = p.eval(z).expect("dimension checked").norm();
        if m < *interior_min {
            *interior_min = m;
            *interior_argmin = z.to_vec();
        }
        if m < zero_cut {
            return Err(RifError::InteriorZero {
                point: z.to_vec(),
                modulus: m,
            });
        }
        Ok(())
    };
    {
        // Odometer over the per-variable grid of radius/angle combinations.
        let per_dim: Vec<Complex64> = radii
            .iter()
            .flat_map(|&r| {
                (0..na).map(move |l| {
                    Complex64::from_polar(r, std::f64::consts::TAU * l as f64 / na as f64)
                })
            })
            .collect();
        let g = per_dim.len();
        let mut idx = vec![0usize; n];
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        'grid: loop {
            for d in 0..n {
                z[d] = per_dim[idx[d]];
            }
            check(&z, &mut interior_min, &mut interior_argmin)?;
            interior_samples += 1;
            for d in (0..n).rev() {
                if idx[d] + 1 < g {
                    idx[d] += 1;
                    continue 'grid;
                }
                idx[d] = 0;
                if d == 0 {
                    break 'grid;
                }
            }
        }
    }
    {
        let mut weyl = WeylSequence::new(2 * n, probe.seed ^ 0x5eed);
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for _ in 0..probe.weyl_samples {
            let u = weyl.next_point();
            for d in 0..n {
                // Area-uniform radius, then angle.
                let r = u[2 * d].sqrt();
                let th = std::f64::consts::TAU * u[2 * d + 1];
                z[d] = Complex64::from_polar(r, th);
            }
            check(&z, &mut interior_min, &mut interior_argmin)?;
            interior_samples += 1;
        }
    }

    // Slice-root probe: any denominator root strictly inside the disk along
    // a sampled slice witnesses an interior zero without having to land on it.
    let mut worst_root_margin = f64::NEG_INFINITY;
    {
        let mut rng = ChaCha8Rng::seed_from_u64(probe.seed ^ 0x700f5);
        for k in 0..n {
            if p.multidegree().get(k) == 0 {
                continue;
            }
            for j in 0..probe.slice_probes_per_variable {
                let mut zhat = Vec::with_capacity(n - 1);
                for _ in 0..n - 1 {
                    // Alternate torus and interior parameters.
                    let r = if j % 2 == 0 {
                        1.0
                    } else {
                        rng.gen_range(0.0f64..1.0).sqrt()
                    };
                    zhat.push(Complex64::from_polar(
                        r,
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    ));
                }
                let slice = p.slice(k, &zhat)?;
                if slice.degree().unwrap_or(0) < 1 {
                    continue;
                }
                for root in slice.roots()? {
                    let margin = 1.0 - root.norm();
                    worst_root_margin = worst_root_margin.max(margin);
                    if margin > probe.root_margin {
                        let mut point = Vec::with_capacity(n);
                        let mut pos = 0;
                        for d in 0..n {
                            if d == k {
                                point.push(root);
                            } else {
                                point.push(zhat[pos]);
                                pos += 1;
                            }
                        }
                        let modulus = p.eval(&point)?.norm();
                        return Err(RifError::InteriorZero { point, modulus });
                    }
                }
            }
        }
    }

    // Reflection and the unimodularity check on the torus.
    let multidegree = p.multidegree().clone();
    let ptilde = p.reflect(&multidegree)?;
    let exclusion = probe.exclusion_rel * scale;
    let samples: Vec<Vec<Complex64>> = {
        let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
        (0..probe.torus_samples)
            .map(|_| uniform_torus(&mut rng, n))
            .collect()
    };
    let stats: Vec<(f64, f64, bool)> = samples
        .par_iter()
        .map(|z| {
            let pm = p.eval(z).expect("dim").norm();
            if pm < exclusion {
                return (f64::INFINITY, 0.0, true);
            }
            let qm = ptilde.eval(z).expect("dim").norm();
            (pm, (qm / pm - 1.0).abs(), false)
        })
        .collect();
    let mut torus_min = f64::INFINITY;
    let mut torus_excluded = 0usize;
    let mut max_defect: f64 = 0.0;
    for (pm, defect, excluded) in stats {
        if excluded {
            torus_excluded += 1;
        } else {
            torus_min = torus_min.min(pm);
            max_defect = max_defect.max(defect);
        }
    }
    if max_defect >= probe.unimodularity_tol {
        return Err(RifError::UnimodularityFailure { defect: max_defect });
    }

    Ok(Rif {
        p,
        ptilde,
        multidegree,
        certificate: StabilityCertificate {
            interior_min_modulus: interior_min,
            interior_samples,
            worst_root_margin,
            torus_min_modulus: torus_min,
            torus_excluded,
            torus_samples: probe.torus_samples,
            max_unimodularity_defect: max_defect,
        },
    })
}
