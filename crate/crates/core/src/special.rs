//! Error-function family used by the closed-form diffraction solution.
//!
//! `erf` uses the all-positive-terms expansion
//! erf(z) = (2/sqrt(pi)) z e^{-z^2} sum_k (2z^2)^k / (1*3*...*(2k+1)),
//! which is cancellation-free for every argument, and `dawson` uses the
//! matching expansion of int_0^z e^{t^2} dt with an asymptotic tail for
//! large |z|. Relative accuracy is a few ulps over the ranges the optics
//! ever reaches (|z| < ~25).

use crate::scalar::Real;

/// Error function erf(z).
pub fn erf<R: Real>(z: R) -> R {
    let az = z.abs();
    if az == R::zero() {
        return R::zero();
    }
    // erf saturates to 1 within f64 eps beyond ~6.
    if az > R::of(7.0) {
        return R::one().copysign(z);
    }
    let two_z2 = R::of(2.0) * az * az;
    let mut term = az; // first term: z / 1!!
    let mut sum = term;
    let mut k = 1u32;
    loop {
        term = term * two_z2 / R::of((2 * k + 1) as f64);
        sum += term;
        if term <= sum * R::epsilon() || k > 500 {
            break;
        }
        k += 1;
    }
    let val = R::of(2.0) / R::PI().sqrt() * (-az * az).exp() * sum;
    val.copysign(z)
}

/// Dawson integral F(z) = e^{-z^2} int_0^z e^{t^2} dt.
pub fn dawson<R: Real>(z: R) -> R {
    let az = z.abs();
    if az == R::zero() {
        return R::zero();
    }
    if az > R::of(10.0) {
        // Asymptotic series 1/(2z) + 1/(4z^3) + 3/(8z^5) + ...
        let inv2 = (az * az).recip();
        let mut term = (R::of(2.0) * az).recip();
        let mut sum = term;
        for k in 1..12 {
            term = term * R::of((2 * k - 1) as f64) * inv2 / R::of(2.0);
            sum += term;
        }
        return sum.copysign(z);
    }
    // sum_k z^{2k+1} / (k! (2k+1)) = int_0^z e^{t^2} dt, all terms positive
    let z2 = az * az;
    let mut term = az;
    let mut sum = az;
    let mut k = 1u32;
    loop {
        term = term * z2 / R::of(k as f64);
        let contrib = term / R::of((2 * k + 1) as f64);
        sum += contrib;
        if contrib <= sum * R::epsilon() || k > 800 {
            break;
        }
        k += 1;
    }
    ((-z2).exp() * sum).copysign(z)
}

/// Scaled imaginary error function erfi(z) e^{-z^2} = (2/sqrt(pi)) F(z).
///
/// This is the combination the far-field solution actually needs; it stays
/// bounded where erfi itself overflows.
pub fn erfi_scaled<R: Real>(z: R) -> R {
    R::of(2.0) / R::PI().sqrt() * dawson(z)
}

/// Confluent hypergeometric value 1F1(1/2, 3/2, -z^2), evaluated through
/// the identity 1F1(1/2, 3/2, -z^2) = sqrt(pi) erf(z) / (2 z), with the
/// continuous limit 1 at z = 0.
pub fn hyp1f1_half<R: Real>(z: R) -> R {
    let az = z.abs();
    // Below this threshold the series 1 - z^2/3 + ... is more accurate
    // than the erf quotient.
    if az < R::of(1e-6) {
        return R::one() - az * az / R::of(3.0);
    }
    R::PI().sqrt() / (R::of(2.0) * az) * erf(az)
}
