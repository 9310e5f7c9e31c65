//! Numerical toolkit for rational inner functions (RIFs) on the polydisk.
//!
//! A RIF is a rational function `phi = ptilde / p` where `p` has no zeros in
//! the open polydisk and `ptilde` is its reflection; `|phi| = 1` almost
//! everywhere on the distinguished boundary (the torus). This crate builds
//! such functions from a stable denominator, expands them into truncated
//! power series, and estimates their membership in Dirichlet-type spaces
//! through several independent routes: weighted coefficient sums, weighted
//! area integrals, `H^p` means of partial derivatives, level-set measures of
//! slice zeros, Hölder-type norm interpolation, and a Łojasiewicz-type decay
//! probe near boundary singularities.
//!
//! All estimates are numerical and come with explicit diagnostics (fitted
//! exponents, confidence half-widths, stabilization deltas); nothing here is
//! a proof. Every routine is deterministic given its seed.

pub mod blaschke;
pub mod dirichlet;
pub mod embeddings;
pub mod hardy;
pub mod loja;
pub mod numerics;
pub mod poly;
pub mod rif;
pub mod samples;
pub mod series;

pub use num_complex::Complex64;

pub use poly::{MultiIndex, MultiPoly, UniPoly};
pub use rif::{build_rif, BlaschkeSlice, ProbeConfig, Rif};
pub use series::CoeffBox;
