//! The gamma parametrization of relativistic kinetic energy.
//!
//! A quantum state with Schroedinger kinetic expectation <K> defines an
//! effective Lorentz factor
//!
//!   gamma = sqrt(1 + 2 <K> / (m c^2)),
//!
//! and the corrected kinetic operator is the ordinary one rescaled by
//! 2/(1 + gamma). Because <K> itself depends on the state solved with that
//! rescaling, gamma is the fixed point of an outer iteration; this module
//! provides the algebra and the damped fixed-point driver, leaving the state
//! solve to the caller as a closure.

use crate::error::{ensure_positive, Error, Result};

/// gamma = sqrt(1 + 2 K / (m c^2)). K is a Schroedinger (uncorrected) kinetic
/// expectation and must be non-negative; gamma >= 1 follows.
pub fn gamma_from_kinetic(kinetic: f64, mass: f64, c: f64) -> Result<f64> {
    ensure_positive("mass", mass)?;
    ensure_positive("c", c)?;
    if !kinetic.is_finite() || kinetic < 0.0 {
        return Err(Error::NegativeKinetic(kinetic));
    }
    Ok((1.0 + 2.0 * kinetic / (mass * c * c)).sqrt())
}

/// The factor 2/(1 + gamma) that turns hbar^2/2m into hbar^2/((1+gamma)m).
/// Equals 1 in the non-relativistic limit and falls toward 0 as gamma grows.
pub fn gp_kinetic_scale(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 1.0 {
        return Err(Error::GammaBelowOne(gamma));
    }
    Ok(2.0 / (1.0 + gamma))
}

/// gamma of a state localized to length l: sqrt(1 + (lambda_C / l)^2).
pub fn gamma_localization(l: f64, lambda_c: f64) -> Result<f64> {
    ensure_positive("l", l)?;
    ensure_positive("lambda_c", lambda_c)?;
    let x = lambda_c / l;
    Ok((1.0 + x * x).sqrt())
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPointConfig {
    /// Absolute tolerance on the gamma update.
    pub tol: f64,
    pub max_iter: usize,
    /// 1.0 is the plain update; smaller values damp it.
    pub damping: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50, damping: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub gamma: f64,
    pub iterations: usize,
    /// |gamma_new - gamma_old| of the last update.
    pub residual: f64,
    pub converged: bool,
    /// gamma after every update, starting with the initial 1.0.
    pub history: Vec<f64>,
}

/// Damped fixed-point iteration for gamma, starting from gamma = 1.
///
/// `kinetic_of_gamma` must return the Schroedinger kinetic expectation of the
/// ground state solved with the kinetic operator rescaled by 2/(1+gamma).
/// A kinetic that does not depend on gamma converges in at most two
/// iterations (the second only confirms the residual).
pub fn gamma_fixed_point<F>(
    mut kinetic_of_gamma: F,
    mass: f64,
    c: f64,
    cfg: &FixedPointConfig,
) -> Result<FixedPointReport>
where
    F: FnMut(f64) -> Result<f64>,
{
    ensure_positive("mass", mass)?;
    ensure_positive("c", c)?;
    ensure_positive("tol", cfg.tol)?;
    if cfg.max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }
    if !(cfg.damping > 0.0 && cfg.damping <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "damping must lie in (0, 1], got {}",
            cfg.damping
        )));
    }

    let mut gamma = 1.0;
    let mut history = vec![gamma];
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..cfg.max_iter {
        iterations += 1;
        let kin = kinetic_of_gamma(gamma)?;
        let target = gamma_from_kinetic(kin, mass, c)?;
        let next = gamma + cfg.damping * (target - gamma);
        residual = (next - gamma).abs();
        gamma = next;
        history.push(gamma);
        if residual < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(FixedPointReport { gamma, iterations, residual, converged, history })
}

/// True when the tail of a gamma history alternates direction, the signature
/// of an undamped two-cycle. Looks at the last six updates.
pub fn oscillates(history: &[f64]) -> bool {
    if history.len() < 4 {
        return false;
    }
    let tail = &history[history.len().saturating_sub(7)..];
    let mut flips = 0;
    let mut steps = 0;
    for w in tail.windows(3) {
        let d1 = w[1] - w[0];
        let d2 = w[2] - w[1];
        if d1 != 0.0 && d2 != 0.0 {
            steps += 1;
            if d1.signum() != d2.signum() {
                flips += 1;
            }
        }
    }
    steps >= 2 && flips * 2 >= steps * 2 - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kinetic_gives_unit_gamma() {
        assert_eq!(gamma_from_kinetic(0.0, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn kinetic_three_halves_rest_energy_gives_gamma_two() {
        // 2K/(mc^2) = 3 => gamma = sqrt(4) = 2
        let g = gamma_from_kinetic(1.5, 1.0, 1.0).unwrap();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn one_ev_electron_is_barely_relativistic() {
        let m_e = 9.109_383_7015e-31;
        let k_ev = 1.602_176_634e-19;
        let g = gamma_from_kinetic(k_ev, m_e, crate::units::C_SI).unwrap();
        let excess = g - 1.0;
        assert!(
            (excess - 1.957e-6).abs() / 1.957e-6 < 1e-3,
            "gamma - 1 = {excess} for a 1 eV electron"
        );
    }

    #[test]
    fn negative_kinetic_is_rejected() {
        assert!(matches!(
            gamma_from_kinetic(-0.1, 1.0, 1.0),
            Err(Error::NegativeKinetic(_))
        ));
    }

    #[test]
    fn kinetic_scale_is_one_at_unit_gamma() {
        assert_eq!(gp_kinetic_scale(1.0).unwrap(), 1.0);
    }

    #[test]
    fn kinetic_scale_at_gamma_sqrt_two() {
        let s = gp_kinetic_scale(2.0_f64.sqrt()).unwrap();
        assert!((s - 0.828_427_124_746_190_3).abs() < 1e-15);
    }

    #[test]
    fn kinetic_scale_rejects_gamma_below_one() {
        assert!(matches!(gp_kinetic_scale(0.999), Err(Error::GammaBelowOne(_))));
    }

    #[test]
    fn localization_gamma_values() {
        let lam = 1.0;
        assert!((gamma_localization(1.0, lam).unwrap() - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((gamma_localization(10.0, lam).unwrap() - 1.01_f64.sqrt()).abs() < 1e-15);
        assert!((gamma_localization(0.1, lam).unwrap() - 101.0_f64.sqrt()).abs() < 1e-13);
        assert!(gamma_localization(0.0, lam).is_err());
        assert!(gamma_localization(1.0, -1.0).is_err());
    }

    #[test]
    fn constant_kinetic_fixes_gamma_in_two_iterations() {
        let cfg = FixedPointConfig::default();
        let report = gamma_fixed_point(|_| Ok(1.5), 1.0, 1.0, &cfg).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 2, "took {} iterations", report.iterations);
        assert!((report.gamma - 2.0).abs() < 1e-15);
        assert!(report.residual < cfg.tol);
    }

    #[test]
    fn zero_kinetic_fixes_gamma_immediately() {
        let report = gamma_fixed_point(|_| Ok(0.0), 1.0, 1.0, &FixedPointConfig::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.gamma, 1.0);
    }

    #[test]
    fn iteration_budget_of_one_reports_nonconvergence() {
        let cfg = FixedPointConfig { max_iter: 1, ..Default::default() };
        let report = gamma_fixed_point(|_| Ok(5.0), 1.0, 1.0, &cfg).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 1);
        assert!(report.residual > cfg.tol);
    }

    #[test]
    fn evaluator_errors_propagate() {
        let r = gamma_fixed_point(
            |_| Err(Error::InvalidInput("boom".into())),
            1.0,
            1.0,
            &FixedPointConfig::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn damping_outside_unit_interval_is_rejected() {
        let cfg = FixedPointConfig { damping: 0.0, ..Default::default() };
        assert!(gamma_fixed_point(|_| Ok(0.0), 1.0, 1.0, &cfg).is_err());
        let cfg = FixedPointConfig { damping: 1.5, ..Default::default() };
        assert!(gamma_fixed_point(|_| Ok(0.0), 1.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn oscillation_detector_sees_two_cycle() {
        let h = vec![1.0, 2.0, 1.1, 1.9, 1.2, 1.8, 1.3];
        assert!(oscillates(&h));
        let monotone = vec![1.0, 1.5, 1.75, 1.875, 1.9375];
        assert!(!oscillates(&monotone));
        assert!(!oscillates(&[1.0, 2.0]));
    }
}
