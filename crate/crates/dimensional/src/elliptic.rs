//! Complete elliptic integral of the first kind via the
//! arithmetic-geometric mean.
//!
//! K(k) = pi / (2 * AGM(1, sqrt(1 - k^2))), modulus convention (argument is
//! k, not m = k^2). Used by the finite-amplitude pendulum law.

use std::f64::consts::PI;

/// Complete elliptic integral of the first kind, modulus `k` with |k| < 1.
///
/// Returns `None` outside the domain.
pub fn elliptic_k(k: f64) -> Option<f64> {
    if !(k.abs() < 1.0) {
        return None;
    }
    Some(PI / (2.0 * agm(1.0, (1.0 - k * k).sqrt())))
}

/// Arithmetic-geometric mean of two positive reals.
pub fn agm(a0: f64, b0: f64) -> f64 {
    let (mut a, mut b) = (a0, b0);
    for _ in 0..64 {
        let (an, bn) = ((a + b) / 2.0, (a * b).sqrt());
        if (an - bn).abs() <= f64::EPSILON * an.abs() {
            return an;
        }
        a = an;
        b = bn;
    }
    (a + b) / 2.0
}
