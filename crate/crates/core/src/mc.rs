//! Monte Carlo harness: deterministic seed streams, replicate execution,
//! aggregation into power/size/coverage tables, and the numeric oracles
//! (normality check, finite-difference gradient check) the tests lean on.
//!
//! Everything is a pure function of its config, so a rerun reproduces every
//! table bit for bit. Within a replicate all estimator flavors see the same
//! simulated path (the test sample is the prefix of the extended one), which
//! compares flavors on common random numbers instead of independent noise.

use crate::central::{
    central_ar1, central_arch, central_arm, CentralEval, MomentSource,
};
use crate::dgp::{simulate, ModelConfig, ModelKind, Seed};
use crate::error::{Error, Result};
use crate::estimate::{fit_ar1_lse, fit_arm_lse, SEstimatorConfig};
use crate::perturb::Perturbation;
use crate::testbench::{np_decide, theoretical_power, Flavor, PowerConvention};
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, Normal};

/// Deterministic, collision-resistant seed for one (replicate, stream) pair.
pub fn derive_seed(master: u64, replicate: u64, stream: &str) -> Seed {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(replicate.to_le_bytes());
    hasher.update(stream.as_bytes());
    hasher.finalize().into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// Unperturbed model: both amplitudes zero.
    Null,
    /// Local alternative: amplitudes n^{-1/2}, tied to the test sample size.
    LocalAlternative,
}

impl Hypothesis {
    pub fn token(self) -> &'static str {
        match self {
            Hypothesis::Null => "null",
            Hypothesis::LocalAlternative => "local",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Base model; its amplitudes are overwritten per sample size according
    /// to `hypothesis`.
    pub model: ModelConfig,
    pub sizes: Vec<usize>,
    pub replicates: u64,
    /// Test level alpha.
    pub level: f64,
    pub s_config: SEstimatorConfig,
    pub flavors: Vec<Flavor>,
    pub master_seed: u64,
    pub hypothesis: Hypothesis,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Experiment("sample-size grid is empty".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Experiment("need at least one replicate".into()));
        }
        if self.flavors.is_empty() {
            return Err(Error::Experiment("no estimator flavors selected".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Experiment(format!(
                "test level must be in (0, 1), got {}",
                self.level
            )));
        }
        // The scale direction entering the statistic must be half the
        // variance direction entering the simulator, or the alternative the
        // test aims at is not the one being simulated.
        if self.model.kind == ModelKind::ArchPerturbed
            && self.hypothesis == Hypothesis::LocalAlternative
        {
            let consistent = matches!(
                (self.model.l, self.model.b),
                (Perturbation::InvQuad, Perturbation::TwoInvQuad)
                    | (Perturbation::Zero, Perturbation::Zero)
            );
            if !consistent {
                return Err(Error::Experiment(
                    "variance direction must be twice the scale direction (b = 2 l)".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Aggregated decision counts for one (n, flavor) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerPoint {
    pub n: usize,
    pub flavor: Flavor,
    pub rejections: u64,
    /// Replicates that produced a decision (attempted minus failed).
    pub replicates: u64,
    pub failures: u64,
    /// Empirical rejection rate.
    pub power: f64,
    /// Binomial standard error sqrt(p (1-p) / R).
    pub mc_se: f64,
    /// Mean plug-in variance across replicates.
    pub tau2_mean: f64,
    /// Closed-form power with the tau threshold shift (level under the null).
    pub theory_tau: f64,
    /// Closed-form power with the tau^2 threshold shift (level under the null).
    pub theory_tau2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailureRecord {
    pub n: usize,
    pub flavor: Flavor,
    pub replicate: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerCurve {
    pub points: Vec<PowerPoint>,
    pub failures: Vec<FailureRecord>,
    pub level: f64,
    pub hypothesis: Hypothesis,
    pub master_seed: u64,
}

/// Resolves the amplitude fields of a model under a hypothesis at sample
/// size n: zero under the null, n^{-1/2} under the local alternative (the
/// variance amplitude only for the conditionally heteroskedastic kind).
pub fn model_for(base: &ModelConfig, hypothesis: Hypothesis, n: usize) -> ModelConfig {
    let mut model = base.clone();
    match hypothesis {
        Hypothesis::Null => {
            model.alpha = 0.0;
            model.beta = 0.0;
        }
        Hypothesis::LocalAlternative => {
            let amp = (n as f64).powf(-0.5);
            model.alpha = amp;
            model.beta = if model.kind == ModelKind::ArchPerturbed {
                amp
            } else {
                0.0
            };
        }
    }
    model
}

/// Dispatches the central-sequence evaluation to the variant matching the
/// model kind, using its configured directions and score family.
pub fn central_for_model(
    model: &ModelConfig,
    y: &[f64],
    theta: &[f64],
    source: MomentSource,
) -> Result<CentralEval> {
    match model.kind {
        ModelKind::Ar1Perturbed => central_ar1(y, theta[0], model.g, &model.family, source),
        ModelKind::ArchPerturbed => {
            central_arch(y, theta[0], model.g, model.l, &model.family, source)
        }
        ModelKind::Arm => central_arm(y, theta, model.g, model.l, &model.family, source),
    }
}

fn fit_theta(y: &[f64], order: usize) -> Result<Vec<f64>> {
    if order == 1 {
        Ok(fit_ar1_lse(y)?.theta)
    } else {
        Ok(fit_arm_lse(y, order)?.theta)
    }
}

/// Runs the full (sizes x flavors x replicates) grid and aggregates
/// rejection counts. Per replicate, one path is simulated long enough for
/// the most demanding flavor; the test always sees its first n observations.
/// Failed replicates are recorded with reasons, and more than 1% of them in
/// any cell fails the experiment. The theory columns evaluate the power
/// formulas at the mean plug-in variance.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<PowerCurve> {
    cfg.validate()?;
    let needs_extension = cfg.flavors.contains(&Flavor::SEstimator);
    let order = cfg.model.order();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for &n in &cfg.sizes {
        let model = model_for(&cfg.model, cfg.hypothesis, n);
        model.validate()?;
        let sim_len = if needs_extension {
            cfg.s_config.extended_len(n)?
        } else {
            n
        };
        let stream = format!("path/n={n}");
        let mut cells: Vec<(Flavor, u64, u64, f64, u64)> = cfg
            .flavors
            .iter()
            .map(|&f| (f, 0u64, 0u64, 0.0f64, 0u64))
            .collect();
        for rep in 0..cfg.replicates {
            let seed = derive_seed(cfg.master_seed, rep, &stream);
            let path = match simulate(&model, sim_len, seed) {
                Ok(p) => p,
                Err(e) => {
                    for cell in &mut cells {
                        cell.4 += 1;
                    }
                    failures.push(FailureRecord {
                        n,
                        flavor: cfg.flavors[0],
                        replicate: rep,
                        reason: format!("simulation: {e}"),
                    });
                    continue;
                }
            };
            let test_y = &path.y[..n];
            for cell in &mut cells {
                let outcome = (|| {
                    let (theta, source) = match cell.0 {
                        Flavor::Oracle => (model.theta.clone(), MomentSource::Family),
                        Flavor::Lse => (fit_theta(test_y, order)?, MomentSource::Residuals),
                        Flavor::SEstimator => {
                            (fit_theta(&path.y, order)?, MomentSource::Residuals)
                        }
                    };
                    let eval = central_for_model(&model, test_y, &theta, source)?;
                    let decision = np_decide(&eval, cfg.level, cell.0)?;
                    Ok::<(bool, f64), Error>((decision.reject, eval.tau2))
                })();
                match outcome {
                    Ok((reject, tau2)) => {
                        cell.1 += reject as u64;
                        cell.2 += 1;
                        cell.3 += tau2;
                    }
                    Err(e) => {
                        cell.4 += 1;
                        failures.push(FailureRecord {
                            n,
                            flavor: cell.0,
                            replicate: rep,
                            reason: e.to_string(),
                        });
                    }
                }
            }
        }
        for (flavor, rejections, used, tau2_sum, failed) in cells {
            if failed * 100 > cfg.replicates {
                return Err(Error::Experiment(format!(
                    "{failed} of {} replicates failed for n = {n}, flavor {}; first reason: {}",
                    cfg.replicates,
                    flavor.token(),
                    failures
                        .iter()
                        .find(|f| f.n == n)
                        .map_or("unknown", |f| f.reason.as_str())
                )));
            }
            if used == 0 {
                return Err(Error::Experiment(format!(
                    "no replicate survived for n = {n}, flavor {}",
                    flavor.token()
                )));
            }
            let power = rejections as f64 / used as f64;
            let mc_se = (power * (1.0 - power) / used as f64).sqrt();
            let tau2_mean = tau2_sum / used as f64;
            let (theory_tau, theory_tau2) = match cfg.hypothesis {
                Hypothesis::Null => (cfg.level, cfg.level),
                Hypothesis::LocalAlternative => (
                    theoretical_power(tau2_mean, cfg.level, PowerConvention::TauShift)?,
                    theoretical_power(tau2_mean, cfg.level, PowerConvention::TauSquaredShift)?,
                ),
            };
            points.push(PowerPoint {
                n,
                flavor,
                rejections,
                replicates: used,
                failures: failed,
                power,
                mc_se,
                tau2_mean,
                theory_tau,
                theory_tau2,
            });
        }
    }
    Ok(PowerCurve {
        points,
        failures,
        level: cfg.level,
        hypothesis: cfg.hypothesis,
        master_seed: cfg.master_seed,
    })
}

/// Renders a power curve as CSV.
pub fn power_curve_to_csv(curve: &PowerCurve) -> String {
    let mut out =
        String::from("n,flavor,rejections,replicates,power,mc_se,tau2_mean,theory_tau,theory_tau2\n");
    for p in &curve.points {
        out.push_str(&format!(
            "{},{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            p.n,
            p.flavor.token(),
            p.rejections,
            p.replicates,
            p.power,
            p.mc_se,
            p.tau2_mean,
            p.theory_tau,
            p.theory_tau2
        ));
    }
    out
}

/// Confidence-interval coverage for one coordinate of the parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageEntry {
    pub coordinate: usize,
    pub covered: u64,
    pub replicates: u64,
    pub coverage: f64,
    pub mc_se: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub entries: Vec<CoverageEntry>,
    pub level: f64,
    pub n: usize,
    pub failures: u64,
}

/// Estimates interval coverage under the model as given (normally the null):
/// univariate intervals for scalar fits, per-coordinate simultaneous
/// intervals otherwise.
pub fn run_coverage(
    model: &ModelConfig,
    n: usize,
    replicates: u64,
    level: f64,
    master_seed: u64,
) -> Result<CoverageReport> {
    if replicates == 0 {
        return Err(Error::Experiment("need at least one replicate".into()));
    }
    model.validate()?;
    let order = model.order();
    let mut covered = vec![0u64; order];
    let mut used = 0u64;
    let mut failed = 0u64;
    for rep in 0..replicates {
        let seed = derive_seed(master_seed, rep, "coverage");
        let outcome = (|| {
            let path = simulate(model, n, seed)?;
            if order == 1 {
                let fit = fit_ar1_lse(&path.y)?;
                let ci = crate::estimate::ci_univariate(&fit, level)?;
                Ok::<Vec<bool>, Error>(vec![ci.lower <= model.theta[0] && model.theta[0] <= ci.upper])
            } else {
                let fit = fit_arm_lse(&path.y, order)?;
                let cis = crate::estimate::ci_simultaneous(&fit, level)?;
                Ok(cis
                    .iter()
                    .zip(&model.theta)
                    .map(|(ci, &t)| ci.lower <= t && t <= ci.upper)
                    .collect())
            }
        })();
        match outcome {
            Ok(hits) => {
                used += 1;
                for (slot, hit) in covered.iter_mut().zip(hits) {
                    *slot += hit as u64;
                }
            }
            Err(_) => failed += 1,
        }
    }
    if failed * 100 > replicates || used == 0 {
        return Err(Error::Experiment(format!(
            "{failed} of {replicates} coverage replicates failed"
        )));
    }
    let entries = covered
        .into_iter()
        .enumerate()
        .map(|(coordinate, c)| {
            let coverage = c as f64 / used as f64;
            CoverageEntry {
                coordinate,
                covered: c,
                replicates: used,
                coverage,
                mc_se: (coverage * (1.0 - coverage) / used as f64).sqrt(),
            }
        })
        .collect();
    Ok(CoverageReport {
        entries,
        level,
        n,
        failures: failed,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct KsReport {
    pub statistic: f64,
    pub critical: f64,
    pub pass: bool,
    pub n: usize,
    pub level: f64,
}

/// One-sample Kolmogorov-Smirnov check of already-standardized samples
/// against the standard normal, with the asymptotic critical value
/// c(level)/sqrt(n), c(level) = sqrt(-ln(level/2)/2).
pub fn ks_normality(samples: &[f64], level: f64) -> Result<KsReport> {
    let n = samples.len();
    if n < 100 {
        return Err(Error::Domain(format!(
            "normality check needs at least 100 samples, got {n}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("level must be in (0, 1), got {level}")));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let normal = Normal::new(0.0, 1.0).expect("standard normal is well formed");
    let nf = n as f64;
    let mut statistic: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = normal.cdf(x);
        let upper = (i + 1) as f64 / nf - cdf;
        let lower = cdf - i as f64 / nf;
        statistic = statistic.max(upper).max(lower);
    }
    let critical = (-(level / 2.0).ln() / 2.0).sqrt() / nf.sqrt();
    Ok(KsReport {
        statistic,
        critical,
        pass: statistic < critical,
        n,
        level,
    })
}

/// Largest relative disagreement between the analytic gradient of the
/// central sequence and central finite differences at `theta`. Relative
/// errors are floored at magnitude one.
pub fn grad_fd_check(model: &ModelConfig, y: &[f64], theta: &[f64], step: f64) -> Result<f64> {
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    let eval = central_for_model(model, y, theta, MomentSource::Family)?;
    let mut worst: f64 = 0.0;
    for k in 0..theta.len() {
        let mut up = theta.to_vec();
        let mut dn = theta.to_vec();
        up[k] += step;
        dn[k] -= step;
        let v_up = central_for_model(model, y, &up, MomentSource::Family)?.v;
        let v_dn = central_for_model(model, y, &dn, MomentSource::Family)?.v;
        let fd = (v_up - v_dn) / (2.0 * step);
        let scale = eval.grad[k].abs().max(fd.abs()).max(1.0);
        worst = worst.max(((eval.grad[k] - fd) / scale).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::seed_from_u64;
    use crate::score::ScoreFamily;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_distr::Distribution;
    use std::collections::HashSet;

    fn base_config() -> ExperimentConfig {
        ExperimentConfig {
            model: ModelConfig::ar1(0.6, ScoreFamily::gaussian()),
            sizes: vec![50],
            replicates: 30,
            level: 0.05,
            s_config: SEstimatorConfig::new(1.0).unwrap(),
            flavors: vec![Flavor::Oracle, Flavor::Lse, Flavor::SEstimator],
            master_seed: 1234,
            hypothesis: Hypothesis::Null,
        }
    }

    #[test]
    fn seed_derivation_is_deterministic_and_separated() {
        let a = derive_seed(7, 0, "path");
        assert_eq!(a, derive_seed(7, 0, "path"));
        assert_ne!(a, derive_seed(7, 0, "extended"));
        assert_ne!(a, derive_seed(7, 1, "path"));
        assert_ne!(a, derive_seed(8, 0, "path"));
    }

    #[test]
    fn seed_streams_do_not_collide() {
        let mut seen = HashSet::new();
        for rep in 0..100_000u64 {
            assert!(seen.insert(derive_seed(99, rep, "collision-scan")));
        }
    }

    #[test]
    fn experiments_reproduce_bit_exactly() {
        let cfg = base_config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shared_paths_leave_other_flavors_unchanged() {
        let mut cfg = base_config();
        cfg.flavors = vec![Flavor::Oracle];
        let alone = run_experiment(&cfg).unwrap();
        cfg.flavors = vec![Flavor::Oracle, Flavor::SEstimator];
        let paired = run_experiment(&cfg).unwrap();
        let oracle_alone = &alone.points[0];
        let oracle_paired = paired
            .points
            .iter()
            .find(|p| p.flavor == Flavor::Oracle)
            .unwrap();
        assert_eq!(oracle_alone, oracle_paired);
    }

    #[test]
    fn null_size_is_roughly_the_level() {
        let mut cfg = base_config();
        cfg.sizes = vec![500];
        cfg.replicates = 400;
        cfg.flavors = vec![Flavor::Oracle];
        let curve = run_experiment(&cfg).unwrap();
        let p = &curve.points[0];
        assert!(p.power > 0.01 && p.power < 0.10, "size {}", p.power);
        assert_eq!(p.theory_tau, 0.05);
        assert_eq!(p.theory_tau2, 0.05);
        assert_eq!(p.replicates + p.failures, 400);
    }

    #[test]
    fn degenerate_direction_fails_the_experiment_loudly() {
        let mut cfg = base_config();
        cfg.model.g = Perturbation::Zero;
        let err = run_experiment(&cfg).unwrap_err();
        match err {
            Error::Experiment(msg) => assert!(msg.contains("failed"), "{msg}"),
            other => panic!("expected experiment error, got {other:?}"),
        }
    }

    #[test]
    fn single_replicate_reports_degenerate_se() {
        let mut cfg = base_config();
        cfg.replicates = 1;
        cfg.flavors = vec![Flavor::Oracle];
        let curve = run_experiment(&cfg).unwrap();
        let p = &curve.points[0];
        assert!(p.power == 0.0 || p.power == 1.0);
        assert_eq!(p.mc_se, 0.0);
    }

    #[test]
    fn alternative_amplitudes_scale_with_n() {
        let model = ModelConfig::arch(0.6, ScoreFamily::gaussian());
        let alt = model_for(&model, Hypothesis::LocalAlternative, 400);
        assert_abs_diff_eq!(alt.alpha, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(alt.beta, 0.05, epsilon = 1e-15);
        let null = model_for(&model, Hypothesis::Null, 400);
        assert_eq!((null.alpha, null.beta), (0.0, 0.0));
        let ar1 = model_for(
            &ModelConfig::ar1(0.6, ScoreFamily::gaussian()),
            Hypothesis::LocalAlternative,
            400,
        );
        assert_eq!(ar1.beta, 0.0);
    }

    #[test]
    fn mismatched_arch_directions_are_rejected() {
        let mut cfg = base_config();
        cfg.model = ModelConfig::arch(0.6, ScoreFamily::gaussian());
        cfg.model.l = Perturbation::TwoInvQuad;
        cfg.hypothesis = Hypothesis::LocalAlternative;
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn csv_has_the_expected_shape() {
        let mut cfg = base_config();
        cfg.flavors = vec![Flavor::Oracle, Flavor::Lse];
        cfg.sizes = vec![40, 60];
        let curve = run_experiment(&cfg).unwrap();
        let csv = power_curve_to_csv(&curve);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,flavor,rejections,replicates,power,mc_se,tau2_mean,theory_tau,theory_tau2"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].starts_with("40,oracle,"));
        assert!(rows[1].starts_with("40,lse,"));
        for row in rows {
            assert_eq!(row.split(',').count(), 9);
            let power: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
            assert!((0.0..=1.0).contains(&power));
        }
    }

    #[test]
    fn coverage_matches_the_nominal_level_roughly() {
        let model = ModelConfig::ar1(0.6, ScoreFamily::gaussian());
        let report = run_coverage(&model, 200, 500, 0.95, 777).unwrap();
        assert_eq!(report.entries.len(), 1);
        let e = &report.entries[0];
        assert_eq!(e.replicates, 500);
        assert!(
            (e.coverage - 0.95).abs() < 0.04,
            "coverage {}",
            e.coverage
        );
    }

    #[test]
    fn multivariate_coverage_reports_each_coordinate() {
        let model = ModelConfig::arm(vec![0.5, 0.3], ScoreFamily::gaussian());
        let report = run_coverage(&model, 300, 200, 0.95, 778).unwrap();
        assert_eq!(report.entries.len(), 2);
        for e in &report.entries {
            assert!(e.coverage > 0.85, "coordinate {} at {}", e.coordinate, e.coverage);
        }
    }

    #[test]
    fn ks_accepts_true_normals_and_rejects_constants() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let normal = rand_distr::StandardNormal;
        let draws: Vec<f64> = (0..10_000).map(|_| normal.sample(&mut rng)).collect();
        let report = ks_normality(&draws, 0.01).unwrap();
        assert!(report.pass, "stat {} vs crit {}", report.statistic, report.critical);
        assert_abs_diff_eq!(report.critical * 100.0, 1.6276236307187293, epsilon = 1e-9);

        let flat = vec![0.3; 500];
        assert!(!ks_normality(&flat, 0.01).unwrap().pass);
    }

    #[test]
    fn ks_statistic_on_exact_quantiles_is_half_a_cell() {
        let n = 1000;
        let normal = Normal::new(0.0, 1.0).unwrap();
        let samples: Vec<f64> = (0..n)
            .map(|i| normal.inverse_cdf((i as f64 + 0.5) / n as f64))
            .collect();
        let report = ks_normality(&samples, 0.05).unwrap();
        assert_abs_diff_eq!(report.statistic, 0.5 / n as f64, epsilon = 1e-9);
    }

    #[test]
    fn ks_needs_enough_samples() {
        assert!(ks_normality(&[0.0; 99], 0.05).is_err());
    }

    #[test]
    fn gradient_check_is_tight_for_every_model() {
        let fam = ScoreFamily::gaussian();
        let ar1 = ModelConfig::ar1(0.6, fam.clone());
        let path = simulate(&ar1, 500, seed_from_u64(31)).unwrap();
        assert!(grad_fd_check(&ar1, &path.y, &[0.6], 1e-5).unwrap() < 1e-6);

        let arm = ModelConfig::arm(vec![0.4, 0.2, 0.1], fam.clone());
        let path3 = simulate(&arm, 500, seed_from_u64(32)).unwrap();
        assert!(grad_fd_check(&arm, &path3.y, &[0.37, 0.22, 0.08], 1e-5).unwrap() < 1e-6);
    }

    #[test]
    fn gradient_check_is_exactly_zero_without_directions() {
        let mut model = ModelConfig::ar1(0.6, ScoreFamily::gaussian());
        model.g = Perturbation::Zero;
        let path = simulate(&model, 200, seed_from_u64(33)).unwrap();
        assert_eq!(grad_fd_check(&model, &path.y, &[0.6], 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg = base_config();
        cfg.sizes.clear();
        assert!(run_experiment(&cfg).is_err());
        let mut cfg = base_config();
        cfg.replicates = 0;
        assert!(run_experiment(&cfg).is_err());
        let mut cfg = base_config();
        cfg.flavors.clear();
        assert!(run_experiment(&cfg).is_err());
        let mut cfg = base_config();
        cfg.level = 1.0;
        assert!(run_experiment(&cfg).is_err());
    }
}
