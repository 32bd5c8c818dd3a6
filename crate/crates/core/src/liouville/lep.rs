use crate::error::{Error, Result};

use super::matrix::EffectiveLiouvillian;
use super::params::{CatBasisParams, SystemParams};
use super::spectrum::numeric_spectrum_with;

/// Δ_LEP2 = κ/p₂⁻ = κ(1 − e²)/(4e), e = e^{−2α²}, in rad/s.
pub fn lep_detuning(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    lep_detuning_for(params.alpha(), params.kappa)
}

/// [`lep_detuning`] from the cat amplitude and loss rate directly.
pub fn lep_detuning_for(alpha: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::NoExceptionalPoint(format!(
            "kappa = {kappa}: without loss the spectrum stays imaginary and no detuning makes eigenvalues coalesce"
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParams(vec![format!("alpha must be > 0 (got {alpha})")]));
    }
    Ok(kappa / CatBasisParams::from_alpha(alpha, 0.0).p2_minus)
}

/// Re((E₃ − E₄)²) from the numeric spectrum: positive on the overdamped
/// side, negative on the underdamped side, zero at the exceptional point.
pub fn numeric_discriminant(params: &SystemParams) -> Result<f64> {
    let s = numeric_spectrum_with(&EffectiveLiouvillian::new(params), false)?;
    let d = s.e3 - s.e4;
    Ok((d * d).re)
}

/// Positive detuning at which [`numeric_discriminant`] changes sign,
/// located by bracketing and bisection.
pub fn numeric_lep_detuning(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    if !(params.kappa > 0.0) {
        return lep_detuning_for(params.alpha(), params.kappa);
    }
    let f = |delta: f64| numeric_discriminant(&params.with_delta(delta));
    let mut lo = 0.0;
    if f(lo)? <= 0.0 {
        return Err(Error::NumericFailure("discriminant is not positive at zero detuning".into()));
    }
    let mut hi = params.kappa;
    let mut doublings = 0;
    while f(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return Err(Error::NumericFailure("could not bracket the exceptional point".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// (α, Δ_LEP2(α)) pairs for a fixed loss rate.
pub fn lep_curve(alphas: &[f64], kappa: f64) -> Result<Vec<(f64, f64)>> {
    alphas.iter().map(|&a| Ok((a, lep_detuning_for(a, kappa)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_loss_has_no_ep() {
        let params = SystemParams::reference().with_kappa(0.0);
        assert!(matches!(lep_detuning(&params), Err(Error::NoExceptionalPoint(_))));
    }

    #[test]
    fn closed_form_matches_bisection() {
        let params = SystemParams::reference();
        let closed = lep_detuning(&params).unwrap();
        let numeric = numeric_lep_detuning(&params).unwrap();
        assert!((closed - numeric).abs() <= 1e-9 * closed, "{closed} vs {numeric}");
    }

    #[test]
    fn independent_of_dephasing() {
        let params = SystemParams::reference();
        let base = lep_detuning(&params).unwrap();
        for kphi in [0.1 * params.kappa, params.kappa] {
            assert_eq!(lep_detuning(&params.with_kappa_phi(kphi)).unwrap(), base);
        }
    }
}
