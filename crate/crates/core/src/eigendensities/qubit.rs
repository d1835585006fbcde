use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};

/// CDF of one (unordered) eigenvalue of a qubit under the superfidelity
/// measure:
/// `F(t) = (2/π)(√((1−t)t) − 2√((1−t)t³) + arcsin √t)`.
///
/// Evaluated in the equivalent centred form
/// `F(t) = 1/2 + (2/π)(√(t(1−t))(1−2t) + arcsin(2t−1)/2)`, which makes
/// `F(1/2) = 1/2` and `F(1−t) = 1 − F(t)` hold exactly.
pub fn cdf_g2(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain { value: t, domain: "[0, 1]" });
    }
    let v = 0.5 + FRAC_2_PI * ((t * (1.0 - t)).sqrt() * (1.0 - 2.0 * t) + 0.5 * (2.0 * t - 1.0).asin());
    Ok(v.clamp(0.0, 1.0))
}

/// Eigenvalue density `(2/π)(2t−1)²/√(t(1−t))`, the derivative of [`cdf_g2`].
pub fn pdf_g2_marginal(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain { value: t, domain: "(0, 1)" });
    }
    if t == 0.0 || t == 1.0 {
        return Err(Error::Singular(format!("eigenvalue density diverges at t = {t}")));
    }
    let d = 2.0 * t - 1.0;
    Ok(2.0 / PI * d * d / (t * (1.0 - t)).sqrt())
}
