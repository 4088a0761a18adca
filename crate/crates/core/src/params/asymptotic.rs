//! Large-coalition expansion of the optimal parameters, with the `o(1)`
//! remainders dropped.

use serde::{Deserialize, Serialize};

use super::{check_c, check_eta};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(2 / (3 pi))^(2/3)`, the constant in front of every `c^(-1/3)` correction.
pub fn gamma<T: Real>() -> T {
    (T::lit(2.0) / (T::lit(3.0) * T::PI())).powf(T::lit(2.0) / T::lit(3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticParams<T> {
    pub d_ell: T,
    pub d_z: T,
    pub d_delta: T,
    pub g: T,
    pub r: T,
    pub s: T,
}

pub fn asymptotic_params<T: Real>(c: u64, eta: T) -> Result<AsymptoticParams<T>> {
    check_c(c)?;
    check_eta(eta)?;
    let gam = gamma::<T>();
    let cf = T::from_count(c);
    let ln_c = cf.ln();
    let t = cf.powf(-T::one() / T::lit(3.0));
    let q = eta / ln_c;
    let pi = T::PI();
    let lit = T::lit;

    let d_ell = pi * pi / lit(2.0) * (T::one() + (lit(3.0) * gam + lit(18.0) * gam * q) * t);
    let d_z = pi * (T::one() + (lit(2.5) * gam + lit(6.0) * gam * q) * t);
    let d_delta = lit(4.0) / gam * (T::one() - lit(3.0) * q) / t;
    let g = T::FRAC_2_PI() * (T::one() - (gam / lit(2.0) + lit(3.0) * gam * q) * t);
    let r = lit(0.5) * (T::one() + (lit(2.0) * gam - lit(6.0) * gam * q) * t);
    let s = (lit(24.0) / (pi * pi * gam) * q / t).ln();

    let not_asymptotic = |reason| Error::NotAsymptotic { c, eta: eta.as_f64(), reason };
    if !(d_delta > T::zero()) {
        return Err(not_asymptotic("d_delta is not positive"));
    }
    if !(s > T::zero()) {
        return Err(not_asymptotic("s is not positive"));
    }
    Ok(AsymptoticParams { d_ell, d_z, d_delta, g, r, s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_value() {
        assert!((gamma::<f64>() - 0.35577).abs() < 1e-5);
        let independent = (2.0f64 / (3.0 * std::f64::consts::PI)).cbrt().powi(2);
        assert!((gamma::<f64>() - independent).abs() < 1e-15);
    }

    #[test]
    fn large_c_approaches_limit() {
        let a = asymptotic_params(1_000_000_000_000u64, 1.0f64).unwrap();
        let limit = std::f64::consts::PI.powi(2) / 2.0;
        assert!((a.d_ell / limit - 1.0).abs() < 0.01, "{a:?}");
        assert!((a.g - std::f64::consts::FRAC_2_PI).abs() < 0.01);
        assert!((a.r - 0.5).abs() < 0.01);
        assert!((a.d_z - std::f64::consts::PI).abs() < 0.05);
    }

    #[test]
    fn thousand_colluders() {
        let a = asymptotic_params(1000u64, 1.0f64).unwrap();
        assert!((a.d_ell - 5.92).abs() < 0.01, "{a:?}");
    }

    #[test]
    fn rejects_small_regime() {
        // ln(24 eta c^(1/3) / (pi^2 gamma ln c)) <= 0 for tiny eta
        match asymptotic_params(10u64, 0.01f64) {
            Err(Error::NotAsymptotic { c: 10, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(asymptotic_params(1u64, 1.0f64).is_err());
        assert!(asymptotic_params(10u64, 0.0f64).is_err());
    }
}
