//! Subcommand execution. Every runner takes the parsed experiment config,
//! returns the stdout report as a string, and leaves any file artifacts in
//! the output directory.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use lancor::central::MomentSource;
use lancor::dgp::{export_series_csv, simulate, SeriesPath};
use lancor::estimate::{ci_simultaneous, ci_univariate, fit_ar1_lse, fit_arm_lse, FitResult};
use lancor::mc::{
    central_for_model, derive_seed, grad_fd_check, model_for, run_coverage, run_experiment,
    ExperimentConfig, Hypothesis,
};
use lancor::testbench::{np_decide, Flavor, TestOutcome};
use lancor::{Error, Result};

use crate::emit::{
    coverage_csv, emit_outputs, model_token, outcomes_csv, regularity_text, EmittedFiles,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Simulate,
    Estimate,
    Test,
    Power,
    Size,
    Coverage,
    CheckRegularity,
    GradCheck,
}

const FD_STEP: f64 = 1e-5;

fn fit(y: &[f64], order: usize) -> Result<FitResult> {
    if order == 1 {
        fit_ar1_lse(y)
    } else {
        fit_arm_lse(y, order)
    }
}

fn path_for(cfg: &ExperimentConfig, n: usize, stream: &str) -> Result<SeriesPath> {
    let model = model_for(&cfg.model, cfg.hypothesis, n);
    let seed = derive_seed(cfg.master_seed, 0, &format!("{stream}/n={n}"));
    simulate(&model, n, seed)
}

fn simulate_cmd(cfg: &ExperimentConfig, out_dir: &Path) -> Result<String> {
    fs::create_dir_all(out_dir)?;
    let stamp = unix_stamp()?;
    let token = model_token(cfg.model.kind);
    let mut report = String::new();
    for &n in &cfg.sizes {
        let path = path_for(cfg, n, "cli/simulate")?;
        let file = out_dir.join(format!("series_{token}_{n}_{stamp}.csv"));
        fs::write(&file, export_series_csv(&path.y))?;
        report.push_str(&format!("wrote {}\n", file.display()));
    }
    Ok(report)
}

fn estimate_cmd(cfg: &ExperimentConfig) -> Result<String> {
    let order = cfg.model.order();
    let mut fits = String::new();
    let mut intervals = String::from("n,coordinate,lower,upper\n");
    let ci_level = 1.0 - cfg.level;
    for (i, &n) in cfg.sizes.iter().enumerate() {
        let path = path_for(cfg, n, "cli/estimate")?;
        let fit = fit(&path.y, order)?;
        if i == 0 {
            fits.push_str(&fit.csv_header());
            fits.push('\n');
        }
        fits.push_str(&fit.csv_row());
        fits.push('\n');
        let cis = if order == 1 {
            vec![ci_univariate(&fit, ci_level)?]
        } else {
            ci_simultaneous(&fit, ci_level)?
        };
        for (j, ci) in cis.iter().enumerate() {
            intervals.push_str(&format!(
                "{n},{},{:.17e},{:.17e}\n",
                j + 1,
                ci.lower,
                ci.upper
            ));
        }
    }
    Ok(format!("{fits}\n{intervals}"))
}

fn test_cmd(cfg: &ExperimentConfig) -> Result<String> {
    let order = cfg.model.order();
    let mut rows: Vec<(usize, TestOutcome)> = Vec::new();
    for &n in &cfg.sizes {
        let sim_len = if cfg.flavors.contains(&Flavor::SEstimator) {
            cfg.s_config.extended_len(n)?
        } else {
            n
        };
        let model = model_for(&cfg.model, cfg.hypothesis, n);
        let seed = derive_seed(cfg.master_seed, 0, &format!("cli/test/n={n}"));
        let path = simulate(&model, sim_len, seed)?;
        let test_y = &path.y[..n];
        for &flavor in &cfg.flavors {
            let (theta, source) = match flavor {
                Flavor::Oracle => (cfg.model.theta.clone(), MomentSource::Family),
                Flavor::Lse => (fit(test_y, order)?.theta, MomentSource::Residuals),
                Flavor::SEstimator => (fit(&path.y, order)?.theta, MomentSource::Residuals),
            };
            let eval = central_for_model(&model, test_y, &theta, source)?;
            rows.push((n, np_decide(&eval, cfg.level, flavor)?));
        }
    }
    Ok(outcomes_csv(&rows))
}

fn curve_cmd(
    cfg: &ExperimentConfig,
    hypothesis: Hypothesis,
    out_dir: &Path,
) -> Result<String> {
    let mut cfg = cfg.clone();
    cfg.hypothesis = hypothesis;
    let curve = run_experiment(&cfg)?;
    let EmittedFiles { csv, svg } = emit_outputs(&curve, cfg.model.kind, out_dir)?;
    let mut report = format!("wrote {}\nwrote {}\n", csv.display(), svg.display());
    if !curve.failures.is_empty() {
        report.push_str(&format!(
            "{} replicate(s) failed and were excluded; see the failure counts in the CSV\n",
            curve.failures.len()
        ));
    }
    Ok(report)
}

fn coverage_cmd(cfg: &ExperimentConfig) -> Result<String> {
    let ci_level = 1.0 - cfg.level;
    let mut reports = Vec::new();
    for &n in &cfg.sizes {
        let report = run_coverage(&cfg.model, n, cfg.replicates, ci_level, cfg.master_seed)?;
        reports.push((n, report));
    }
    Ok(coverage_csv(&reports))
}

fn check_regularity_cmd(cfg: &ExperimentConfig) -> Result<String> {
    let report = cfg.model.family.check_regularity()?;
    let label = crate::config::family_label(&cfg.model.family);
    Ok(regularity_text(&label, &report))
}

fn grad_check_cmd(cfg: &ExperimentConfig) -> Result<String> {
    let mut out = String::from("n,max_rel_err\n");
    for &n in &cfg.sizes {
        let model = model_for(&cfg.model, cfg.hypothesis, n);
        let seed = derive_seed(cfg.master_seed, 0, &format!("cli/grad/n={n}"));
        let path = simulate(&model, n, seed)?;
        let worst = grad_fd_check(&model, &path.y, &cfg.model.theta, FD_STEP)?;
        out.push_str(&format!("{n},{worst:.3e}\n"));
    }
    Ok(out)
}

fn unix_stamp() -> Result<u64> {
    Ok(SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_err(|e| Error::Experiment(format!("system clock is before the epoch: {e}")))?
        .as_secs())
}

/// Runs one subcommand against a parsed config, returning the stdout
/// report. The power and size actions force their hypothesis; everything
/// else respects the configured one.
pub fn execute(action: Action, cfg: &ExperimentConfig, out_dir: &Path) -> Result<String> {
    match action {
        Action::Simulate => simulate_cmd(cfg, out_dir),
        Action::Estimate => estimate_cmd(cfg),
        Action::Test => test_cmd(cfg),
        Action::Power => curve_cmd(cfg, Hypothesis::LocalAlternative, out_dir),
        Action::Size => curve_cmd(cfg, Hypothesis::Null, out_dir),
        Action::Coverage => coverage_cmd(cfg),
        Action::CheckRegularity => check_regularity_cmd(cfg),
        Action::GradCheck => grad_check_cmd(cfg),
    }
}
