//! Stable denominators used throughout the worked examples and tests.

use num_complex::Complex64;

use crate::poly::{MultiIndex, MultiPoly};

/// `n - (z_1 + ... + z_n)`: stable, with a single boundary zero at
/// `(1, ..., 1)`.
pub fn denominator_sum(n: usize) -> MultiPoly {
    let mut terms = vec![(MultiIndex::zeros(n), Complex64::new(n as f64, 0.0))];
    for i in 0..n {
        terms.push((MultiIndex::unit(n, i), Complex64::new(-1.0, 0.0)));
    }
    MultiPoly::from_terms(n, terms).expect("valid denominator")
}

/// `(2 - z1 - z2) + (z3/2)(2 z1 z2 - z1 - z2)`: stable on the tridisk with
/// singular set `{(1, 1, z3) : |z3| = 1}`; its RIF has a bounded derivative
/// in `z3` but not in `z1`, `z2`.
pub fn denominator_mixed3() -> MultiPoly {
    let mi = |e: &[u32]| MultiIndex::new(e.to_vec());
    let c = |re: f64| Complex64::new(re, 0.0);
    MultiPoly::from_terms(
        3,
        [
            (mi(&[0, 0, 0]), c(2.0)),
            (mi(&[1, 0, 0]), c(-1.0)),
            (mi(&[0, 1, 0]), c(-1.0)),
            (mi(&[1, 1, 1]), c(1.0)),
            (mi(&[1, 0, 1]), c(-0.5)),
            (mi(&[0, 1, 1]), c(-0.5)),
        ],
    )
    .expect("valid denominator")
}
