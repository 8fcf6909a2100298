//! Classical Fisher information of the detected row distribution and the
//! Cramer-Rao bound it implies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// CFI and its inverse for a delay estimate at fixed detected photon count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherResult<R> {
    /// Fisher information (per-tau-unit squared).
    pub cfi: R,
    /// Cramer-Rao bound 1/cfi; infinite when the profile carries no
    /// tau information.
    pub crb: R,
    pub n_r: f64,
    pub delta_tau: R,
    pub infinite_crb: bool,
}

const PROBABILITY_FLOOR: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-9;

/// F = N_r sum_m (d p_m / d tau)^2 / p_m with a central finite difference
/// of the normalized row distribution `profile`.
pub fn fisher_information<R: Real>(
    profile: impl Fn(R) -> Vec<R>,
    tau0: R,
    delta_tau: R,
    n_r: f64,
) -> Result<FisherResult<R>> {
    if delta_tau <= R::zero() {
        return Err(Error::InvalidArgument("delta_tau must be > 0".into()));
    }
    if n_r <= 0.0 {
        return Err(Error::InvalidArgument("n_r must be > 0".into()));
    }
    let p0 = checked(profile(tau0))?;
    let plus = checked(profile(tau0 + delta_tau))?;
    let minus = checked(profile(tau0 - delta_tau))?;
    if plus.len() != p0.len() || minus.len() != p0.len() {
        return Err(Error::Shape("profile length varies with tau".into()));
    }
    let floor = R::of(PROBABILITY_FLOOR);
    let two_dt = R::of(2.0) * delta_tau;
    let mut f = R::zero();
    for ((&p, &pp), &pm) in p0.iter().zip(plus.iter()).zip(minus.iter()) {
        if p < floor {
            continue;
        }
        let dp = (pp - pm) / two_dt;
        f += dp * dp / p;
    }
    let cfi = R::of(n_r) * f;
    let infinite = cfi == R::zero();
    Ok(FisherResult {
        cfi,
        crb: if infinite { R::infinity() } else { cfi.recip() },
        n_r,
        delta_tau,
        infinite_crb: infinite,
    })
}

/// `fisher_information` with the step-convergence check: the step is
/// halved and the two estimates must agree to `tol` relative.
pub fn fisher_information_checked<R: Real>(
    profile: impl Fn(R) -> Vec<R> + Copy,
    tau0: R,
    delta_tau: R,
    n_r: f64,
    tol: f64,
) -> Result<FisherResult<R>> {
    let coarse = fisher_information(profile, tau0, delta_tau, n_r)?;
    let fine = fisher_information(profile, tau0, delta_tau / R::of(2.0), n_r)?;
    if coarse.infinite_crb && fine.infinite_crb {
        return Ok(fine);
    }
    let rel = ((fine.cfi - coarse.cfi) / fine.cfi).abs().to64();
    if rel > tol {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step not converged: halving changes CFI by {rel:.2e}"
        )));
    }
    Ok(fine)
}

fn checked<R: Real>(p: Vec<R>) -> Result<Vec<R>> {
    let sum = p.iter().copied().sum::<R>().to64();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Normalization(sum - 1.0));
    }
    Ok(p)
}
