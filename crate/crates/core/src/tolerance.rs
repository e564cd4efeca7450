//! Numerical tolerances used by tests, the verifier and the acceptance suite.

use crate::scalar::Scalar;

/// Absolute tolerance for exact algebraic identities in `f64`.
pub const ALGEBRAIC: f64 = 1e-12;

/// Statistical agreement threshold, in standard errors, between a Monte Carlo
/// correlation estimate and its analytic value.
pub const MC_SIGMA: f64 = 5.0;

/// Statistical agreement threshold, in standard errors, for singles rates and
/// post-selection fractions.
pub const RATE_SIGMA: f64 = 4.0;

/// Comparable identity tolerance for scalar type `T`.
///
/// For `f64` this is [`ALGEBRAIC`]; for `f32` it is scaled from machine epsilon.
pub fn identity<T: Scalar>() -> T {
    let eps = T::epsilon();
    let scaled = eps * T::lit(1e3);
    scaled.max(T::lit(ALGEBRAIC))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_identity_tolerance_is_algebraic() {
        assert_eq!(identity::<f64>(), ALGEBRAIC);
        assert!(identity::<f32>() > 1e-5 && identity::<f32>() < 1e-2);
    }
}
