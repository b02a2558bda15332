//! Data-generating processes: AR(1), its ARCH-perturbed variant, and AR(m),
//! each under the null or under a local alternative whose amplitude shrinks
//! like n^{-1/2}.
//!
//! Simulation is a pure function of (config, length, seed), so replicates are
//! reproducible and a long path shares its prefix bit-exactly with a shorter
//! run at the same seed. That prefix property is what lets an estimator built
//! from an extended sample see the same process as the test sample.

use crate::error::{Error, Result};
use crate::perturb::Perturbation;
use crate::score::ScoreFamily;
use nalgebra::DMatrix;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// 256-bit stream seed.
pub type Seed = [u8; 32];

pub const DEFAULT_BURN_IN: usize = 500;

/// Embeds a u64 into a full seed (little-endian, zero-padded).
pub fn seed_from_u64(x: u64) -> Seed {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&x.to_le_bytes());
    seed
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// Y_i = theta Y_{i-1} + alpha G(Y_{i-1}) + eps_i.
    Ar1Perturbed,
    /// Y_i = theta Y_{i-1} + alpha G(Y_{i-1}) + sqrt(1 + beta B(Y_{i-1})) eps_i.
    ArchPerturbed,
    /// Y_i = sum_j theta_j Y_{i-j} + alpha G(Y_{i-1}) + (1 + alpha L(Y_{i-1})) eps_i.
    Arm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Autoregressive coefficients; scalar (length 1) for AR(1)/ARCH.
    pub theta: Vec<f64>,
    /// Mean-perturbation amplitude: 0 under the null, n^{-1/2} under the
    /// local alternative. Also drives the scale direction L for `Arm`.
    pub alpha: f64,
    /// Variance-perturbation amplitude for `ArchPerturbed`.
    pub beta: f64,
    pub g: Perturbation,
    pub l: Perturbation,
    pub b: Perturbation,
    /// Lag window of the perturbation argument. Only 1 is supported: the
    /// named directions take a scalar, and nothing in the method pins down a
    /// vector-argument direction.
    pub s_lag: usize,
    pub family: ScoreFamily,
    /// Samples discarded before recording, to wash out initialization.
    pub burn_in: usize,
}

impl ModelConfig {
    pub fn ar1(theta: f64, family: ScoreFamily) -> Self {
        Self::new(ModelKind::Ar1Perturbed, vec![theta], family)
    }

    pub fn arch(theta: f64, family: ScoreFamily) -> Self {
        Self::new(ModelKind::ArchPerturbed, vec![theta], family)
    }

    pub fn arm(theta: Vec<f64>, family: ScoreFamily) -> Self {
        Self::new(ModelKind::Arm, theta, family)
    }

    fn new(kind: ModelKind, theta: Vec<f64>, family: ScoreFamily) -> Self {
        ModelConfig {
            kind,
            theta,
            alpha: 0.0,
            beta: 0.0,
            g: Perturbation::InvQuad,
            l: Perturbation::InvQuad,
            b: Perturbation::TwoInvQuad,
            s_lag: 1,
            family,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    /// Autoregressive order m.
    pub fn order(&self) -> usize {
        self.theta.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.is_empty() {
            return Err(Error::Domain("theta must be non-empty".into()));
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("theta must be finite".into()));
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::Domain("perturbation amplitudes must be finite".into()));
        }
        if self.s_lag != 1 {
            return Err(Error::Domain(format!(
                "lag window must be 1 (scalar perturbation argument), got {}",
                self.s_lag
            )));
        }
        match self.kind {
            ModelKind::Ar1Perturbed | ModelKind::ArchPerturbed => {
                if self.theta.len() != 1 {
                    return Err(Error::Domain(format!(
                        "scalar model takes one coefficient, got {}",
                        self.theta.len()
                    )));
                }
                if self.theta[0].abs() >= 1.0 {
                    return Err(Error::Stationarity(format!(
                        "|theta| must be < 1, got {}",
                        self.theta[0]
                    )));
                }
            }
            ModelKind::Arm => {
                let report = check_stationarity(&self.theta)?;
                if !report.stable {
                    return Err(Error::Stationarity(format!(
                        "characteristic roots must lie outside the unit disc; moduli {:?}",
                        report.moduli
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Root moduli of 1 - theta_1 z - ... - theta_m z^m.
#[derive(Clone, Debug)]
pub struct RootReport {
    /// True iff every root has modulus strictly greater than one.
    pub stable: bool,
    /// Moduli sorted ascending; empty when the polynomial is constant.
    pub moduli: Vec<f64>,
}

/// Checks that the AR polynomial has no root in the closed unit disc, via the
/// eigenvalues of the companion matrix of the recursion (reciprocal roots).
pub fn check_stationarity(theta: &[f64]) -> Result<RootReport> {
    if theta.is_empty() {
        return Err(Error::Domain("theta must be non-empty".into()));
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("theta must be finite".into()));
    }
    let degree = theta
        .iter()
        .rposition(|&t| t != 0.0)
        .map_or(0, |last| last + 1);
    if degree == 0 {
        return Ok(RootReport {
            stable: true,
            moduli: Vec::new(),
        });
    }
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for (j, &t) in theta[..degree].iter().enumerate() {
        companion[(0, j)] = t;
    }
    for j in 1..degree {
        companion[(j, j - 1)] = 1.0;
    }
    let mut moduli: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|lambda| {
            let r = lambda.norm();
            if r == 0.0 {
                f64::INFINITY
            } else {
                1.0 / r
            }
        })
        .collect();
    moduli.sort_by(|a, b| a.total_cmp(b));
    let stable = moduli.iter().all(|&m| m > 1.0);
    Ok(RootReport { stable, moduli })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPath {
    pub y: Vec<f64>,
    /// The innovations that generated `y`, retained so tests can compare true
    /// errors with estimated residuals.
    pub innovations: Vec<f64>,
    pub config: ModelConfig,
    pub seed: Seed,
}

impl SeriesPath {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// First `n` observations as a path of their own. Same config and seed:
    /// by construction this equals simulating at length `n` directly.
    pub fn prefix(&self, n: usize) -> Result<SeriesPath> {
        if n > self.len() {
            return Err(Error::InsufficientData {
                needed: n,
                available: self.len(),
            });
        }
        Ok(SeriesPath {
            y: self.y[..n].to_vec(),
            innovations: self.innovations[..n].to_vec(),
            config: self.config.clone(),
            seed: self.seed,
        })
    }

    pub fn to_csv(&self) -> String {
        export_series_csv(&self.y)
    }
}

/// Simulates whichever model the config names.
pub fn simulate(config: &ModelConfig, n: usize, seed: Seed) -> Result<SeriesPath> {
    config.validate()?;
    let m = config.order();
    let min_len = m.max(config.s_lag) + 1;
    if n < min_len {
        return Err(Error::InsufficientData {
            needed: min_len,
            available: n,
        });
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    // lags[j] holds Y_{i-1-j}; initialized from the innovation law and washed
    // out by the burn-in.
    let mut lags: Vec<f64> = (0..m).map(|_| config.family.sample(&mut rng)).collect();
    let mut y = Vec::with_capacity(n);
    let mut innovations = Vec::with_capacity(n);
    for step in 0..config.burn_in + n {
        let eps = config.family.sample(&mut rng);
        let prev = lags[0];
        let mean: f64 = config
            .theta
            .iter()
            .zip(lags.iter())
            .map(|(t, v)| t * v)
            .sum();
        let next = match config.kind {
            ModelKind::Ar1Perturbed => mean + config.alpha * config.g.eval(prev) + eps,
            ModelKind::ArchPerturbed => {
                let var = 1.0 + config.beta * config.b.eval(prev);
                if var <= 0.0 {
                    return Err(Error::Numeric(format!(
                        "conditional variance {var} is not positive at step {step}"
                    )));
                }
                mean + config.alpha * config.g.eval(prev) + var.sqrt() * eps
            }
            ModelKind::Arm => {
                mean + config.alpha * config.g.eval(prev)
                    + (1.0 + config.alpha * config.l.eval(prev)) * eps
            }
        };
        lags.rotate_right(1);
        lags[0] = next;
        if step >= config.burn_in {
            y.push(next);
            innovations.push(eps);
        }
    }
    Ok(SeriesPath {
        y,
        innovations,
        config: config.clone(),
        seed,
    })
}

pub fn simulate_ar1(config: &ModelConfig, n: usize, seed: Seed) -> Result<SeriesPath> {
    expect_kind(config, ModelKind::Ar1Perturbed)?;
    simulate(config, n, seed)
}

pub fn simulate_arch(config: &ModelConfig, n: usize, seed: Seed) -> Result<SeriesPath> {
    expect_kind(config, ModelKind::ArchPerturbed)?;
    simulate(config, n, seed)
}

pub fn simulate_arm(config: &ModelConfig, n: usize, seed: Seed) -> Result<SeriesPath> {
    expect_kind(config, ModelKind::Arm)?;
    simulate(config, n, seed)
}

fn expect_kind(config: &ModelConfig, kind: ModelKind) -> Result<()> {
    if config.kind == kind {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "config names {:?}, expected {kind:?}",
            config.kind
        )))
    }
}

/// Renders observations as `index,y` CSV with 17 significant digits, enough
/// to round-trip f64 exactly. Indices are 1-based.
pub fn export_series_csv(y: &[f64]) -> String {
    let mut out = String::with_capacity(16 + 26 * y.len());
    out.push_str("index,y\n");
    for (i, v) in y.iter().enumerate() {
        out.push_str(&format!("{},{:.16e}\n", i + 1, v));
    }
    out
}

/// Parses the `index,y` CSV format back into an observation vector. Strict:
/// the header must match, indices must run 1..k consecutively, and values
/// must be finite. Errors carry the 1-based line number.
pub fn import_series_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((idx, raw)) => {
                if raw.trim().is_empty() {
                    continue;
                }
                break (idx, raw);
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "missing header".into(),
                })
            }
        }
    };
    if header.1.trim() != "index,y" {
        return Err(Error::Parse {
            line: header.0 + 1,
            msg: format!("expected header 'index,y', got '{}'", header.1.trim()),
        });
    }
    let mut y = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let mut fields = row.split(',');
        let (index_str, value_str) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: "expected exactly two fields".into(),
                })
            }
        };
        let index: usize = index_str.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad index '{index_str}'"),
        })?;
        if index != y.len() + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("index {index} out of sequence, expected {}", y.len() + 1),
            });
        }
        let value: f64 = value_str.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad value '{value_str}'"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line,
                msg: format!("value '{value_str}' is not finite"),
            });
        }
        y.push(value);
    }
    Ok(y)
}
