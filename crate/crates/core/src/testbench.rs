//! Neyman-Pearson decisions from a central-sequence evaluation, and the
//! closed-form power predicted for the local alternative.
//!
//! Two power readings are kept side by side: the limit of the statistic
//! under the alternative is N(tau^2, tau^2), whose standardization shifts
//! the threshold by tau, but the power statement that accompanies the test
//! writes the shift as tau^2. The experiments measure which one tracks the
//! Monte Carlo rejection rate instead of assuming it.

use crate::central::CentralEval;
use crate::error::{Error, Result};
use statrs::distribution::{ContinuousCDF, Normal};

/// How the evaluation parameter of a test was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// True parameter, known to the simulator.
    Oracle,
    /// Least squares on the test sample itself.
    Lse,
    /// Least squares on the extended sample.
    SEstimator,
}

impl Flavor {
    /// Stable token used in CSV output and configs.
    pub fn token(self) -> &'static str {
        match self {
            Flavor::Oracle => "oracle",
            Flavor::Lse => "lse",
            Flavor::SEstimator => "s-estimator",
        }
    }
}

/// Threshold-shift convention for the theoretical power curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerConvention {
    /// 1 - Phi(Z(alpha) - tau^2): the shift as written in the power statement.
    TauSquaredShift,
    /// 1 - Phi(Z(alpha) - tau): the shift obtained by standardizing the
    /// N(tau^2, tau^2) limit.
    TauShift,
}

impl PowerConvention {
    pub fn token(self) -> &'static str {
        match self {
            PowerConvention::TauSquaredShift => "tau2-shift",
            PowerConvention::TauShift => "tau-shift",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TestOutcome {
    /// Standardized statistic v / sqrt(tau2).
    pub statistic: f64,
    /// Standard normal (1 - alpha)-quantile.
    pub threshold: f64,
    pub reject: bool,
    pub level: f64,
    pub flavor: Flavor,
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal is well formed")
}

fn check_level(alpha: f64) -> Result<()> {
    if alpha.is_finite() && 0.0 < alpha && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("test level must be in (0, 1), got {alpha}")))
    }
}

/// Standard normal upper quantile Z(alpha).
pub fn z_quantile(alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    Ok(std_normal().inverse_cdf(1.0 - alpha))
}

/// One-sided test: reject iff v / sqrt(tau2) >= Z(alpha); the boundary
/// rejects.
pub fn np_decide(eval: &CentralEval, alpha: f64, flavor: Flavor) -> Result<TestOutcome> {
    check_level(alpha)?;
    if eval.tau2.is_nan() || eval.tau2 <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let statistic = eval.v / eval.tau2.sqrt();
    let threshold = z_quantile(alpha)?;
    Ok(TestOutcome {
        statistic,
        threshold,
        reject: statistic >= threshold,
        level: alpha,
        flavor,
    })
}

fn check_tau2(tau2: f64) -> Result<()> {
    if tau2.is_finite() && tau2 >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("tau^2 must be nonnegative, got {tau2}")))
    }
}

/// Closed-form power of the one-sided test under the local alternative.
pub fn theoretical_power(tau2: f64, alpha: f64, convention: PowerConvention) -> Result<f64> {
    check_tau2(tau2)?;
    let z = z_quantile(alpha)?;
    let shift = match convention {
        PowerConvention::TauSquaredShift => tau2,
        PowerConvention::TauShift => tau2.sqrt(),
    };
    Ok(1.0 - std_normal().cdf(z - shift))
}

/// Predicted limit law of the statistic under the local alternative:
/// mean tau^2, variance tau^2.
pub fn lecam_prediction(tau2: f64) -> Result<(f64, f64)> {
    check_tau2(tau2)?;
    Ok((tau2, tau2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn eval_with(v: f64, tau2: f64) -> CentralEval {
        CentralEval {
            v,
            grad: vec![1.0],
            tau2,
            tau2_clipped: false,
            eval_parameter: vec![0.6],
            n: 100,
        }
    }

    #[test]
    fn thresholds_match_normal_quantiles() {
        assert_abs_diff_eq!(z_quantile(0.05).unwrap(), 1.6448536269514722, epsilon = 1e-9);
        assert_abs_diff_eq!(z_quantile(0.01).unwrap(), 2.3263478740408408, epsilon = 1e-9);
    }

    #[test]
    fn boundary_statistic_rejects() {
        let z = z_quantile(0.05).unwrap();
        let out = np_decide(&eval_with(z, 1.0), 0.05, Flavor::Oracle).unwrap();
        assert_eq!(out.statistic, out.threshold);
        assert!(out.reject);
    }

    #[test]
    fn centered_statistic_accepts() {
        let out = np_decide(&eval_with(0.0, 0.5), 0.05, Flavor::Lse).unwrap();
        assert!(!out.reject);
        assert_eq!(out.flavor, Flavor::Lse);
        assert_eq!(out.level, 0.05);
    }

    #[test]
    fn statistic_is_standardized() {
        let out = np_decide(&eval_with(1.0, 4.0), 0.05, Flavor::SEstimator).unwrap();
        assert_abs_diff_eq!(out.statistic, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn zero_variance_is_rejected() {
        assert!(matches!(
            np_decide(&eval_with(0.3, 0.0), 0.05, Flavor::Oracle),
            Err(Error::DegenerateVariance)
        ));
        assert!(matches!(
            np_decide(&eval_with(0.3, f64::NAN), 0.05, Flavor::Oracle),
            Err(Error::DegenerateVariance)
        ));
    }

    #[test]
    fn bad_levels_are_domain_errors() {
        for alpha in [0.0, 1.0, -0.2, 2.0, f64::NAN] {
            assert!(np_decide(&eval_with(0.0, 1.0), alpha, Flavor::Oracle).is_err());
            assert!(theoretical_power(1.0, alpha, PowerConvention::TauShift).is_err());
        }
    }

    #[test]
    fn power_at_zero_shift_is_the_level() {
        for conv in [PowerConvention::TauSquaredShift, PowerConvention::TauShift] {
            assert_abs_diff_eq!(theoretical_power(0.0, 0.05, conv).unwrap(), 0.05, epsilon = 1e-9);
            assert_abs_diff_eq!(theoretical_power(0.0, 0.01, conv).unwrap(), 0.01, epsilon = 1e-9);
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn conventions_coincide_at_unit_variance() {
        let a = theoretical_power(1.0, 0.05, PowerConvention::TauSquaredShift).unwrap();
        let b = theoretical_power(1.0, 0.05, PowerConvention::TauShift).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        assert_abs_diff_eq!(a, 0.25951102284144423, epsilon = 1e-9);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn conventions_split_away_from_one() {
        let tau_shift = theoretical_power(0.25, 0.05, PowerConvention::TauShift).unwrap();
        let tau2_shift = theoretical_power(0.25, 0.05, PowerConvention::TauSquaredShift).unwrap();
        assert_abs_diff_eq!(tau_shift, 0.12613489819343038, epsilon = 1e-9);
        assert_abs_diff_eq!(tau2_shift, 0.081529991775118216, epsilon = 1e-9);
        assert!(tau_shift > tau2_shift);
    }

    #[test]
    fn power_is_monotone_in_the_shift() {
        for conv in [PowerConvention::TauSquaredShift, PowerConvention::TauShift] {
            let mut last = 0.0;
            let mut tau2 = 0.0;
            while tau2 <= 4.0 {
                let p = theoretical_power(tau2, 0.05, conv).unwrap();
                assert!(p >= last);
                last = p;
                tau2 += 0.1;
            }
        }
    }

    #[test]
    fn negative_tau2_is_a_domain_error() {
        assert!(theoretical_power(-0.1, 0.05, PowerConvention::TauShift).is_err());
        assert!(lecam_prediction(-0.1).is_err());
    }

    #[test]
    fn limit_prediction_is_mean_equals_variance() {
        assert_eq!(lecam_prediction(0.0).unwrap(), (0.0, 0.0));
        assert_eq!(lecam_prediction(0.3).unwrap(), (0.3, 0.3));
    }

    #[test]
    fn tokens_are_stable() {
        assert_eq!(Flavor::Oracle.token(), "oracle");
        assert_eq!(Flavor::Lse.token(), "lse");
        assert_eq!(Flavor::SEstimator.token(), "s-estimator");
        assert_eq!(PowerConvention::TauSquaredShift.token(), "tau2-shift");
        assert_eq!(PowerConvention::TauShift.token(), "tau-shift");
    }
}
