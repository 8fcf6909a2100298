//! Two-level system algebra: pre/post-selection, weak values, and the
//! tilt-induced time delay between the two polarization components.
//!
//! The system is pre-selected at pi/4 and post-selected at 3pi/4 + beta;
//! the measured observable is the polarization difference |H><H| - |V><V|,
//! whose weak value in the zero-delay limit is -cot(beta).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Pre/post-selection angles of the two interferometer arms.
///
/// `beta_u`/`beta_d` are the post-selection offsets in radians; the
/// pre-selection angle is fixed at pi/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig<R> {
    pub beta_u: R,
    pub beta_d: R,
}

impl<R: Real> SelectionConfig<R> {
    pub fn new(beta_u: R, beta_d: R) -> Result<Self> {
        for (name, b) in [("beta_u", beta_u), ("beta_d", beta_d)] {
            if b == R::zero() {
                return Err(Error::DivergentWeakValue);
            }
            if b.abs() > R::FRAC_PI_2() {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {b} rad exceeds pi/2"
                )));
            }
        }
        Ok(Self { beta_u, beta_d })
    }

    /// Pre-selection angle, fixed by the interferometer layout.
    pub fn preselect_angle(&self) -> R {
        R::FRAC_PI_4()
    }

    pub fn weak_values(&self) -> Result<WeakValuePair<R>> {
        Ok(WeakValuePair {
            a_w_u: weak_value(self.beta_u)?,
            a_w_d: weak_value(self.beta_d)?,
        })
    }
}

/// Real weak values of the two arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValuePair<R> {
    pub a_w_u: R,
    pub a_w_d: R,
}

/// Tilt angle of the delay waveplate and the delay it induces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaySetting<R> {
    pub theta: R,
    pub n0: R,
    pub omega: R,
    pub tau: R,
}

impl<R: Real> DelaySetting<R> {
    pub fn from_tilt(theta: R, n0: R, lambda: R) -> Result<Self> {
        let tau = tilt_to_delay(theta, n0, lambda)?;
        Ok(Self {
            theta,
            n0,
            omega: angular_frequency(lambda),
            tau,
        })
    }
}

/// Angular frequency 2 pi c / lambda.
pub fn angular_frequency<R: Real>(lambda: R) -> R {
    R::of(2.0) * R::PI() * R::of(SPEED_OF_LIGHT) / lambda
}

/// Weak value of |H><H| - |V><V| in the zero-delay limit: -cot(beta).
pub fn weak_value<R: Real>(beta: R) -> Result<R> {
    if beta == R::zero() {
        return Err(Error::DivergentWeakValue);
    }
    if beta.abs() > R::FRAC_PI_2() {
        return Err(Error::InvalidArgument(format!(
            "post-selection angle {beta} rad exceeds pi/2"
        )));
    }
    Ok(-beta.tan().recip())
}

/// Delay from tilting the second waveplate by `theta` around the slow axis:
/// tau = pi theta^2 / (2 n0^2 omega) with omega = 2 pi c / lambda.
pub fn tilt_to_delay<R: Real>(theta: R, n0: R, lambda: R) -> Result<R> {
    if theta < R::zero() {
        return Err(Error::InvalidArgument(format!("tilt {theta} < 0")));
    }
    if lambda <= R::zero() {
        return Err(Error::InvalidArgument(format!("wavelength {lambda} <= 0")));
    }
    if n0 <= R::one() {
        return Err(Error::InvalidArgument(format!(
            "refractive index {n0} must exceed 1"
        )));
    }
    let omega = angular_frequency(lambda);
    Ok(R::PI() * theta * theta / (R::of(2.0) * n0 * n0 * omega))
}

/// Survival probability of the post-selection, |<psi_f(beta,tau)|psi_i>|^2.
///
/// At tau = 0 this reduces to sin^2(beta); the omega*tau phase enters the
/// inner product through the counter-rotating phases on the H/V components.
pub fn postselection_probability<R: Real>(beta: R, tau: R, omega: R) -> R {
    let a = (R::of(3.0) * R::FRAC_PI_4() + beta).sin() * R::FRAC_PI_4().sin();
    let b = (R::of(3.0) * R::FRAC_PI_4() + beta).cos() * R::FRAC_PI_4().cos();
    a * a + b * b + R::of(2.0) * a * b * (omega * tau).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex;
    use proptest::prelude::*;

    /// Direct complex 2-vector evaluation of <psi_f|A|psi_i>/<psi_f|psi_i>
    /// with the delay phases carried by the post-selection state. Kept
    /// independent of the analytic -cot(beta) path on purpose.
    fn weak_value_oracle(beta: f64, omega_tau: f64) -> Complex<f64> {
        let i = Complex::<f64>::i();
        let psi_i = [
            Complex::new((std::f64::consts::FRAC_PI_4).sin(), 0.0),
            Complex::new((std::f64::consts::FRAC_PI_4).cos(), 0.0),
        ];
        let pf = [
            (-i * omega_tau / 2.0).exp() * (3.0 * std::f64::consts::FRAC_PI_4 + beta).sin(),
            (i * omega_tau / 2.0).exp() * (3.0 * std::f64::consts::FRAC_PI_4 + beta).cos(),
        ];
        // A = diag(1, -1)
        let num = pf[0].conj() * psi_i[0] - pf[1].conj() * psi_i[1];
        let den = pf[0].conj() * psi_i[0] + pf[1].conj() * psi_i[1];
        num / den
    }

    #[test]
    fn weak_value_at_45_degrees() {
        let wv = weak_value(45f64.to_radians()).unwrap();
        assert_relative_eq!(wv, -1.0, max_relative = 1e-14);
        let wv = weak_value(-(45f64.to_radians())).unwrap();
        assert_relative_eq!(wv, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn weak_value_at_small_angle() {
        // -cot(1.6 deg) = -35.80 to four significant figures
        let wv = weak_value(1.6f64.to_radians()).unwrap();
        assert!((wv - (-35.80)).abs() < 0.005, "got {wv}");
        let oracle = weak_value_oracle(1.6f64.to_radians(), 0.0);
        assert_relative_eq!(wv, oracle.re, max_relative = 1e-12);
        assert!(oracle.im.abs() < 1e-12);
    }

    #[test]
    fn weak_value_rejects_zero_angle() {
        assert_eq!(weak_value(0.0f64), Err(Error::DivergentWeakValue));
    }

    #[test]
    fn weak_value_rejects_out_of_range() {
        assert!(matches!(
            weak_value(1.8f64),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn oracle_consistency_at_small_delay_phase() {
        // The finite-delay correction is (omega tau / 2)^2 cos(2 beta)/sin^2(beta);
        // at omega tau = 1e-3 it stays below 1e-4 relative for beta >= ~3.3 deg.
        for beta_deg in [3.3f64, 5.0, 10.0, 25.0, 45.0, 80.0] {
            let beta = beta_deg.to_radians();
            let analytic = weak_value(beta).unwrap();
            let oracle = weak_value_oracle(beta, 1e-3).re;
            assert!(
                ((oracle - analytic) / analytic).abs() < 1e-4,
                "beta={beta_deg} deg: {oracle} vs {analytic}"
            );
        }
        // At beta = 1.6 deg the same bound needs omega tau <= 1e-4.
        let beta = 1.6f64.to_radians();
        let analytic = weak_value(beta).unwrap();
        let oracle = weak_value_oracle(beta, 1e-4).re;
        assert!(((oracle - analytic) / analytic).abs() < 1e-5);
    }

    #[test]
    fn delay_reference_points() {
        // theta = 4/5/6 deg -> 1.08 / 1.69 / 2.43 as within 1 %
        let lambda = 632.992e-9;
        for (theta_deg, tau_as) in [(4.0f64, 1.08), (5.0, 1.69), (6.0, 2.43)] {
            let tau = tilt_to_delay(theta_deg.to_radians(), 1.54, lambda).unwrap();
            assert!(
                ((tau * 1e18 - tau_as) / tau_as).abs() < 0.01,
                "theta={theta_deg}: {} as",
                tau * 1e18
            );
        }
        assert_eq!(tilt_to_delay(0.0, 1.54, lambda).unwrap(), 0.0);
    }

    #[test]
    fn delay_rejects_bad_arguments() {
        assert!(tilt_to_delay(-0.1, 1.54, 632e-9).is_err());
        assert!(tilt_to_delay(0.1, 0.9, 632e-9).is_err());
        assert!(tilt_to_delay(0.1, 1.54, 0.0).is_err());
    }

    #[test]
    fn postselection_probability_points() {
        let p: f64 = postselection_probability(std::f64::consts::FRAC_PI_4, 0.0, 1.0);
        assert_relative_eq!(p, 0.5, max_relative = 1e-14);
        let p = postselection_probability(1.6f64.to_radians(), 0.0, 1.0);
        assert!((p - 7.80e-4).abs() < 5e-7, "got {p}");
        let p: f64 = postselection_probability(0.0, 0.0, 1.0);
        assert!(p.abs() < 1e-30);
    }

    #[test]
    fn postselection_probability_matches_complex_inner_product() {
        let omega = angular_frequency(632.992e-9);
        for beta_deg in [1.6f64, 10.0, 45.0, -20.0] {
            for tau_as in [0.0, 1.69, 100.0] {
                let beta = beta_deg.to_radians();
                let tau = tau_as * 1e-18;
                let i = Complex::<f64>::i();
                let pf = [
                    (-i * omega * tau / 2.0).exp()
                        * (3.0 * std::f64::consts::FRAC_PI_4 + beta).sin(),
                    (i * omega * tau / 2.0).exp()
                        * (3.0 * std::f64::consts::FRAC_PI_4 + beta).cos(),
                ];
                let s = std::f64::consts::FRAC_PI_4;
                let ip = pf[0].conj() * s.sin() + pf[1].conj() * s.cos();
                let expected = ip.norm_sqr();
                let got = postselection_probability(beta, tau, omega);
                assert_relative_eq!(got, expected, max_relative = 1e-10, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn selection_config_validation() {
        assert!(SelectionConfig::new(0.0f64, 0.1).is_err());
        assert!(SelectionConfig::new(0.1f64, 0.0).is_err());
        assert!(SelectionConfig::new(1.6f64, 0.1).is_err());
        let c = SelectionConfig::new(1.6f64.to_radians(), -(1.6f64.to_radians())).unwrap();
        let wv = c.weak_values().unwrap();
        assert_relative_eq!(wv.a_w_u, -wv.a_w_d, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn weak_value_is_antisymmetric(beta in 1e-4f64..std::f64::consts::FRAC_PI_2) {
            let plus = weak_value(beta).unwrap();
            let minus = weak_value(-beta).unwrap();
            prop_assert!(((plus + minus) / plus).abs() < 1e-12);
        }

        #[test]
        fn weak_value_amplifies_small_angles(beta in 1e-4f64..0.1f64) {
            // cot(beta) ~ 1/beta within 1 % on (0, 0.1 rad)
            let wv = weak_value(beta).unwrap();
            prop_assert!((wv * beta + 1.0).abs() < 0.01);
        }

        #[test]
        fn delay_is_quadratic_in_tilt(theta in 1e-4f64..0.3f64) {
            let one = tilt_to_delay(theta, 1.54, 632.992e-9).unwrap();
            let two = tilt_to_delay(2.0 * theta, 1.54, 632.992e-9).unwrap();
            prop_assert!((two / one - 4.0).abs() < 1e-12);
        }

        #[test]
        fn postselection_probability_in_unit_interval(
            beta in -1.5f64..1.5f64,
            tau_as in 0.0f64..10.0f64,
        ) {
            let omega = angular_frequency(632.992e-9);
            let p = postselection_probability(beta, tau_as * 1e-18, omega);
            prop_assert!((-1e-15..=1.0 + 1e-15).contains(&p));
        }
    }
}
