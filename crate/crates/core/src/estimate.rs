//! Least-squares fits for AR(1)/AR(m), confidence intervals, and the
//! accelerated estimator computed from an extended sample.
//!
//! The extended-sample estimator is the pivot of the whole workbench: an LSE
//! built from N = floor(1 + n^{S+1}) observations of the same process
//! converges fast enough that plugging it into a central sequence evaluated
//! at the true parameter leaves no estimation-error term in the limit.

use crate::dgp::{simulate, ModelConfig, Seed, SeriesPath};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Clone, Debug)]
pub struct FitResult {
    /// Estimated autoregressive coefficients, length m.
    pub theta: Vec<f64>,
    /// Residual root mean square with denominator n - m.
    pub sigma_hat: f64,
    /// Observed covariance of sqrt(n) (theta_hat - theta), m x m.
    pub sigma_tilde: DMatrix<f64>,
    /// Estimated innovations, n - m of them (the first m observations only
    /// serve as initial conditions).
    pub residuals: Vec<f64>,
    /// Number of observations the fit consumed.
    pub n: usize,
}

impl FitResult {
    pub fn order(&self) -> usize {
        self.theta.len()
    }

    pub fn csv_header(&self) -> String {
        let m = self.order();
        let mut cols = vec!["n".to_string(), "m".to_string()];
        cols.extend((1..=m).map(|j| format!("theta_hat_{j}")));
        cols.push("sigma_hat".into());
        cols.extend((1..=m).map(|j| format!("sigma_tilde_{j}{j}")));
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![self.n.to_string(), self.order().to_string()];
        cols.extend(self.theta.iter().map(|t| format!("{t:.17e}")));
        cols.push(format!("{:.17e}", self.sigma_hat));
        cols.extend((0..self.order()).map(|j| format!("{:.17e}", self.sigma_tilde[(j, j)])));
        cols.join(",")
    }
}

/// LSE for AR(1): theta_hat = sum Y_i Y_{i-1} / sum Y_{i-1}^2.
pub fn fit_ar1_lse(y: &[f64]) -> Result<FitResult> {
    let n = y.len();
    if n < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            available: n,
        });
    }
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 1..n {
        sxx += y[i - 1] * y[i - 1];
        sxy += y[i - 1] * y[i];
    }
    if sxx <= 0.0 {
        return Err(Error::DegenerateDesign(
            "lagged observations carry no energy".into(),
        ));
    }
    let theta = sxy / sxx;
    let residuals: Vec<f64> = (1..n).map(|i| y[i] - theta * y[i - 1]).collect();
    let dof = (n - 1) as f64;
    let sigma_hat = (residuals.iter().map(|e| e * e).sum::<f64>() / dof).sqrt();
    let sigma_tilde =
        DMatrix::from_element(1, 1, sigma_hat * sigma_hat * (n as f64) / sxx);
    Ok(FitResult {
        theta: vec![theta],
        sigma_hat,
        sigma_tilde,
        residuals,
        n,
    })
}

/// LSE for AR(m): solves the normal equations on the lag design matrix.
pub fn fit_arm_lse(y: &[f64], m: usize) -> Result<FitResult> {
    if m == 0 {
        return Err(Error::Domain("order must be positive".into()));
    }
    let n = y.len();
    if n <= 2 * m {
        return Err(Error::InsufficientData {
            needed: 2 * m + 1,
            available: n,
        });
    }
    let rows = n - m;
    // Accumulate X^T X and X^T y directly; X has rows (Y_{i-1},...,Y_{i-m}).
    let mut xtx = DMatrix::<f64>::zeros(m, m);
    let mut xty = DMatrix::<f64>::zeros(m, 1);
    for i in m..n {
        for j in 0..m {
            let xj = y[i - 1 - j];
            xty[(j, 0)] += xj * y[i];
            for k in j..m {
                xtx[(j, k)] += xj * y[i - 1 - k];
            }
        }
    }
    for j in 0..m {
        for k in 0..j {
            xtx[(j, k)] = xtx[(k, j)];
        }
    }
    let chol = xtx.clone().cholesky().ok_or_else(|| {
        Error::DegenerateDesign("lag design matrix is rank deficient".into())
    })?;
    let theta_vec = chol.solve(&xty);
    let theta: Vec<f64> = theta_vec.iter().copied().collect();
    let residuals: Vec<f64> = (m..n)
        .map(|i| {
            let mut pred = 0.0;
            for j in 0..m {
                pred += theta[j] * y[i - 1 - j];
            }
            y[i] - pred
        })
        .collect();
    let sigma_hat = (residuals.iter().map(|e| e * e).sum::<f64>() / rows as f64).sqrt();
    let inv = chol.inverse();
    let sigma_tilde = inv * (sigma_hat * sigma_hat * n as f64);
    Ok(FitResult {
        theta,
        sigma_hat,
        sigma_tilde,
        residuals,
        n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    /// Confidence level 1 - alpha.
    pub level: f64,
    pub center: f64,
    pub half_width: f64,
}

fn t_quantile(level: f64, df: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&level) || level <= 0.0 {
        return Err(Error::Domain(format!(
            "confidence level must be in (0, 1), got {level}"
        )));
    }
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::Numeric(format!("Student-t with {df} df: {e}")))?;
    Ok(dist.inverse_cdf(1.0 - 0.5 * (1.0 - level)))
}

/// Classical interval theta_hat +/- sigma_hat t_{alpha/2}(n-1) / sqrt(n).
pub fn ci_univariate(fit: &FitResult, level: f64) -> Result<Interval> {
    if fit.order() != 1 {
        return Err(Error::Domain(format!(
            "univariate interval needs a scalar fit, got order {}",
            fit.order()
        )));
    }
    if fit.n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            available: fit.n,
        });
    }
    let q = t_quantile(level, (fit.n - 1) as f64)?;
    let center = fit.theta[0];
    let half_width = fit.sigma_hat * q / (fit.n as f64).sqrt();
    Ok(Interval {
        lower: center - half_width,
        upper: center + half_width,
        level,
        center,
        half_width,
    })
}

/// Per-coordinate intervals theta_hat_j +/- sqrt(sigma_tilde_jj)
/// t_{alpha/2}(n-m) / sqrt(n), from studentizing each coordinate of the
/// normalized estimation error.
pub fn ci_simultaneous(fit: &FitResult, level: f64) -> Result<Vec<Interval>> {
    let m = fit.order();
    if fit.n <= m {
        return Err(Error::InsufficientData {
            needed: m + 1,
            available: fit.n,
        });
    }
    let q = t_quantile(level, (fit.n - m) as f64)?;
    let scale = q / (fit.n as f64).sqrt();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let var = fit.sigma_tilde[(j, j)];
        if !var.is_finite() || var < 0.0 {
            return Err(Error::Numeric(format!(
                "covariance diagonal entry {j} is {var}"
            )));
        }
        let center = fit.theta[j];
        let half_width = var.sqrt() * scale;
        out.push(Interval {
            lower: center - half_width,
            upper: center + half_width,
            level,
            center,
            half_width,
        });
    }
    Ok(out)
}

/// How the extended sample size N grows with the test sample size n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionRule {
    /// N = floor(1 + n^{S+1}), the definition used by the simulation
    /// protocol and the convergence-speed statement.
    SPlusOne,
    /// N = floor(1 + n^S), an alternative reading that appears once in the
    /// evaluation argument; kept as a knob for comparison runs.
    SOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SEstimatorConfig {
    /// Speed exponent S > 0.
    pub s: f64,
    pub rule: ExtensionRule,
}

impl SEstimatorConfig {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::Domain(format!(
                "speed exponent must be positive, got {s}"
            )));
        }
        Ok(SEstimatorConfig {
            s,
            rule: ExtensionRule::SPlusOne,
        })
    }

    pub fn with_rule(mut self, rule: ExtensionRule) -> Self {
        self.rule = rule;
        self
    }

    /// Extended sample size N for a test sample of size n. Errors when the
    /// rule would need more data than is sane to materialize, or would hand
    /// the estimator fewer observations than the test itself uses.
    pub fn extended_len(&self, n: usize) -> Result<usize> {
        let exponent = match self.rule {
            ExtensionRule::SPlusOne => self.s + 1.0,
            ExtensionRule::SOnly => self.s,
        };
        let raw = 1.0 + (n as f64).powf(exponent);
        if !raw.is_finite() || raw > 1e12 {
            return Err(Error::Domain(format!(
                "extended sample size {raw:.3e} is out of range for n = {n}, S = {}",
                self.s
            )));
        }
        let big_n = raw.floor() as usize;
        if big_n < n {
            return Err(Error::Domain(format!(
                "extension rule yields {big_n} < n = {n} observations"
            )));
        }
        Ok(big_n)
    }
}

/// Where the extended sample comes from.
#[derive(Clone, Copy, Debug)]
pub enum DataSource<'a> {
    /// Simulate as many observations as needed from this model.
    Simulator(&'a ModelConfig),
    /// A fixed observed series of the given autoregressive order.
    Series { y: &'a [f64], order: usize },
}

/// An LSE tagged with the extension bookkeeping that produced it.
#[derive(Clone, Debug)]
pub struct SFit {
    pub fit: FitResult,
    /// Test sample size the extension was derived from.
    pub n: usize,
    pub s: f64,
    /// Actual number of observations the fit used.
    pub extended_n: usize,
}

/// Computes the LSE on the first N = extended_len(n) observations the source
/// can provide.
pub fn s_estimate(
    source: DataSource<'_>,
    n: usize,
    cfg: SEstimatorConfig,
    seed: Seed,
) -> Result<SFit> {
    let big_n = cfg.extended_len(n)?;
    let (fit, order) = match source {
        DataSource::Simulator(model) => {
            let path: SeriesPath = simulate(model, big_n, seed)?;
            (fit_arm_lse(&path.y, model.order())?, model.order())
        }
        DataSource::Series { y, order } => {
            if y.len() < big_n {
                return Err(Error::InsufficientData {
                    needed: big_n,
                    available: y.len(),
                });
            }
            (fit_arm_lse(&y[..big_n], order)?, order)
        }
    };
    debug_assert_eq!(fit.order(), order);
    Ok(SFit {
        fit,
        n,
        s: cfg.s,
        extended_n: big_n,
    })
}
