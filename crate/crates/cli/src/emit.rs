//! Output artifacts: the power-curve CSV, a self-contained SVG plot, and
//! the plain-text reports for the smaller subcommands. File contents carry
//! no timestamps; only filenames do, so reruns at the same master seed are
//! byte-identical.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use lancor::dgp::ModelKind;
use lancor::mc::{power_curve_to_csv, CoverageReport, PowerCurve, PowerPoint};
use lancor::score::RegularityReport;
use lancor::testbench::{Flavor, TestOutcome};
use lancor::{Error, Result};

pub fn model_token(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Ar1Perturbed => "ar1",
        ModelKind::ArchPerturbed => "arch",
        ModelKind::Arm => "arm",
    }
}

#[derive(Clone, Debug)]
pub struct EmittedFiles {
    pub csv: PathBuf,
    pub svg: PathBuf,
}

/// Writes the curve as `power_<model>_<timestamp>.csv` plus a matching
/// `.svg` plot into `out_dir`, creating the directory if needed. Curves
/// with empty cells are refused: a cell that decided nothing has no power
/// estimate to draw.
pub fn emit_outputs(
    curve: &PowerCurve,
    kind: ModelKind,
    out_dir: &Path,
) -> Result<EmittedFiles> {
    if curve.points.is_empty() {
        return Err(Error::Experiment(
            "refusing to emit an empty power curve".into(),
        ));
    }
    if let Some(p) = curve.points.iter().find(|p| p.replicates == 0) {
        return Err(Error::Experiment(format!(
            "refusing to emit: cell n={} flavor={} has zero deciding replicates",
            p.n,
            p.flavor.token()
        )));
    }
    fs::create_dir_all(out_dir)?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_err(|e| Error::Experiment(format!("system clock is before the epoch: {e}")))?
        .as_secs();
    let base = format!("power_{}_{stamp}", model_token(kind));
    let csv = out_dir.join(format!("{base}.csv"));
    let svg = out_dir.join(format!("{base}.svg"));
    fs::write(&csv, power_curve_to_csv(curve))?;
    fs::write(&svg, render_power_svg(curve))?;
    Ok(EmittedFiles { csv, svg })
}

const PLOT_LEFT: f64 = 70.0;
const PLOT_RIGHT: f64 = 700.0;
const PLOT_TOP: f64 = 50.0;
const PLOT_BOTTOM: f64 = 420.0;

fn flavor_color(flavor: Flavor) -> &'static str {
    match flavor {
        Flavor::Oracle => "#3468c0",
        Flavor::Lse => "#c03434",
        Flavor::SEstimator => "#2f8f4e",
    }
}

struct Scale {
    n_lo: f64,
    n_hi: f64,
}

impl Scale {
    fn x(&self, n: f64) -> f64 {
        PLOT_LEFT + (n - self.n_lo) / (self.n_hi - self.n_lo) * (PLOT_RIGHT - PLOT_LEFT)
    }

    fn y(&self, rate: f64) -> f64 {
        PLOT_BOTTOM - rate.clamp(0.0, 1.0) * (PLOT_BOTTOM - PLOT_TOP)
    }
}

fn polyline(points: &[(f64, f64)], style: &str) -> String {
    let coords = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect::<Vec<_>>()
        .join(" ");
    format!("<polyline fill=\"none\" {style} points=\"{coords}\"/>\n")
}

/// Renders the curve as a self-contained SVG: one series per flavor with
/// markers and 95% Monte Carlo error bars, both closed-form predictions as
/// dashed lines, and the nominal level as a reference rule.
pub fn render_power_svg(curve: &PowerCurve) -> String {
    let mut sizes: Vec<usize> = curve.points.iter().map(|p| p.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let (n_lo, n_hi) = match (sizes.first(), sizes.last()) {
        (Some(&lo), Some(&hi)) if lo < hi => (lo as f64, hi as f64),
        (Some(&lo), _) => (lo as f64 - 1.0, lo as f64 + 1.0),
        _ => (0.0, 1.0),
    };
    let scale = Scale { n_lo, n_hi };

    let mut flavors: Vec<Flavor> = Vec::new();
    for p in &curve.points {
        if !flavors.contains(&p.flavor) {
            flavors.push(p.flavor);
        }
    }

    let at = |n: usize, flavor: Flavor| -> Option<&PowerPoint> {
        curve.points.iter().find(|p| p.n == n && p.flavor == flavor)
    };
    // The prediction columns are shared across flavors up to the plug-in
    // variance used; prefer the oracle cells when they exist.
    let reference = |n: usize| -> &PowerPoint {
        at(n, Flavor::Oracle)
            .or_else(|| flavors.iter().find_map(|&f| at(n, f)))
            .expect("every listed size has at least one point")
    };

    let title = match curve.hypothesis.token() {
        "null" => "empirical size",
        _ => "empirical power",
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" \
         viewBox=\"0 0 720 480\" font-family=\"sans-serif\">\n\
         <rect width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n\
         <text x=\"385\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" fill=\"#222\">\
         {title} by sample size (level {})</text>\n",
        curve.level
    ));

    for k in 0..=4 {
        let rate = k as f64 * 0.25;
        let y = scale.y(rate);
        svg.push_str(&format!(
            "<line x1=\"{PLOT_LEFT}\" y1=\"{y:.2}\" x2=\"{PLOT_RIGHT}\" y2=\"{y:.2}\" \
             stroke=\"#dddddd\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"12\" \
             fill=\"#444\">{rate}</text>\n",
            PLOT_LEFT - 8.0,
            y + 4.0
        ));
    }
    let level_y = scale.y(curve.level);
    svg.push_str(&format!(
        "<line x1=\"{PLOT_LEFT}\" y1=\"{level_y:.2}\" x2=\"{PLOT_RIGHT}\" y2=\"{level_y:.2}\" \
         stroke=\"#999999\" stroke-dasharray=\"1,3\"/>\n"
    ));

    let stride = sizes.len().div_ceil(8).max(1);
    for (i, &n) in sizes.iter().enumerate() {
        if i % stride != 0 && i + 1 != sizes.len() {
            continue;
        }
        let x = scale.x(n as f64);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{PLOT_BOTTOM}\" x2=\"{x:.2}\" y2=\"{:.2}\" \
             stroke=\"#bbbbbb\"/>\n\
             <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\" \
             fill=\"#444\">{n}</text>\n",
            PLOT_BOTTOM + 6.0,
            PLOT_BOTTOM + 22.0
        ));
    }
    svg.push_str(&format!(
        "<line x1=\"{PLOT_LEFT}\" y1=\"{PLOT_TOP}\" x2=\"{PLOT_LEFT}\" y2=\"{PLOT_BOTTOM}\" \
         stroke=\"#222222\"/>\n\
         <line x1=\"{PLOT_LEFT}\" y1=\"{PLOT_BOTTOM}\" x2=\"{PLOT_RIGHT}\" y2=\"{PLOT_BOTTOM}\" \
         stroke=\"#222222\"/>\n\
         <text x=\"385\" y=\"462\" text-anchor=\"middle\" font-size=\"13\" fill=\"#222\">\
         sample size n</text>\n\
         <text x=\"20\" y=\"235\" text-anchor=\"middle\" font-size=\"13\" fill=\"#222\" \
         transform=\"rotate(-90 20 235)\">rejection rate</text>\n"
    ));

    let tau_line: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| (scale.x(n as f64), scale.y(reference(n).theory_tau)))
        .collect();
    let tau2_line: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| (scale.x(n as f64), scale.y(reference(n).theory_tau2)))
        .collect();
    svg.push_str(&polyline(
        &tau_line,
        "stroke=\"#666666\" stroke-dasharray=\"6,3\"",
    ));
    svg.push_str(&polyline(
        &tau2_line,
        "stroke=\"#aaaaaa\" stroke-dasharray=\"2,3\"",
    ));

    for &flavor in &flavors {
        let color = flavor_color(flavor);
        let series: Vec<&PowerPoint> = sizes.iter().filter_map(|&n| at(n, flavor)).collect();
        let line: Vec<(f64, f64)> = series
            .iter()
            .map(|p| (scale.x(p.n as f64), scale.y(p.power)))
            .collect();
        svg.push_str(&polyline(
            &line,
            &format!("stroke=\"{color}\" stroke-width=\"1.8\""),
        ));
        for p in series {
            let x = scale.x(p.n as f64);
            let half = 1.96 * p.mc_se;
            let y_lo = scale.y(p.power - half);
            let y_hi = scale.y(p.power + half);
            svg.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{y_lo:.2}\" x2=\"{x:.2}\" y2=\"{y_hi:.2}\" \
                 stroke=\"{color}\"/>\n\
                 <line x1=\"{:.2}\" y1=\"{y_lo:.2}\" x2=\"{:.2}\" y2=\"{y_lo:.2}\" \
                 stroke=\"{color}\"/>\n\
                 <line x1=\"{:.2}\" y1=\"{y_hi:.2}\" x2=\"{:.2}\" y2=\"{y_hi:.2}\" \
                 stroke=\"{color}\"/>\n\
                 <circle cx=\"{x:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{color}\"/>\n",
                x - 4.0,
                x + 4.0,
                x - 4.0,
                x + 4.0,
                scale.y(p.power)
            ));
        }
    }

    let legend_x = PLOT_LEFT + 16.0;
    let mut legend_y = PLOT_TOP + 18.0;
    for &flavor in &flavors {
        let color = flavor_color(flavor);
        svg.push_str(&format!(
            "<line x1=\"{legend_x}\" y1=\"{legend_y:.2}\" x2=\"{x_end:.2}\" \
             y2=\"{legend_y:.2}\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n\
             <circle cx=\"{x_mid:.2}\" cy=\"{legend_y:.2}\" r=\"3\" fill=\"{color}\"/>\n\
             <text x=\"{x_text:.2}\" y=\"{y_text:.2}\" font-size=\"12\" fill=\"#222\">\
             {label}</text>\n",
            x_end = legend_x + 28.0,
            x_mid = legend_x + 14.0,
            x_text = legend_x + 36.0,
            y_text = legend_y + 4.0,
            label = flavor.token(),
        ));
        legend_y += 18.0;
    }
    for (style, label) in [
        ("stroke=\"#666666\" stroke-dasharray=\"6,3\"", "tau-shift prediction"),
        ("stroke=\"#aaaaaa\" stroke-dasharray=\"2,3\"", "tau2-shift prediction"),
    ] {
        svg.push_str(&format!(
            "<line x1=\"{legend_x}\" y1=\"{legend_y:.2}\" x2=\"{:.2}\" y2=\"{legend_y:.2}\" \
             {style}/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#222\">{label}</text>\n",
            legend_x + 28.0,
            legend_x + 36.0,
            legend_y + 4.0
        ));
        legend_y += 18.0;
    }

    svg.push_str("</svg>\n");
    svg
}

/// One row per (sample size, coordinate) pair of a coverage sweep.
pub fn coverage_csv(reports: &[(usize, CoverageReport)]) -> String {
    let mut out = String::from("n,coordinate,covered,replicates,coverage,mc_se\n");
    for (n, report) in reports {
        for e in &report.entries {
            out.push_str(&format!(
                "{n},{},{},{},{:.17e},{:.17e}\n",
                e.coordinate + 1,
                e.covered,
                e.replicates,
                e.coverage,
                e.mc_se
            ));
        }
    }
    out
}

/// One row per single-path test decision.
pub fn outcomes_csv(rows: &[(usize, TestOutcome)]) -> String {
    let mut out = String::from("n,flavor,statistic,threshold,reject\n");
    for (n, o) in rows {
        out.push_str(&format!(
            "{n},{},{:.17e},{:.17e},{}\n",
            o.flavor.token(),
            o.statistic,
            o.threshold,
            o.reject
        ));
    }
    out
}

/// Human-readable regularity summary: the five moment identities the score
/// calculus relies on, their quadrature residuals, and the tail share of
/// the second score moment.
pub fn regularity_text(label: &str, report: &RegularityReport) -> String {
    let names = [
        "score-mean",
        "score-times-x",
        "curvature",
        "curvature-times-x",
        "curvature-times-x2",
    ];
    let mut out = format!("family {label}\nidentity,target,residual\n");
    for (k, name) in names.iter().enumerate() {
        out.push_str(&format!(
            "{name},{},{:.3e}\n",
            report.targets[k], report.residuals[k]
        ));
    }
    out.push_str(&format!(
        "tail mass of the second score moment beyond |x|=100: {:.3e} ({})\n",
        report.tail_mass,
        if report.heavy_tail_flag {
            "heavy-tailed"
        } else {
            "negligible"
        }
    ));
    out
}
