//! Flat key=value experiment configs: parsing, override application, and
//! canonical rendering. One pair per line, `#` starts a comment line, list
//! values are comma-separated. Unknown keys, bad values, and non-stationary
//! parameters are reported with the offending line number.

use std::collections::HashMap;

use lancor::dgp::{ModelConfig, ModelKind};
use lancor::estimate::{ExtensionRule, SEstimatorConfig};
use lancor::mc::{ExperimentConfig, Hypothesis};
use lancor::perturb::Perturbation;
use lancor::score::{FamilyKind, ScoreFamily};
use lancor::testbench::Flavor;
use lancor::{Error, Result};

/// Accepted keys, in canonical render order.
const KEYS: [&str; 15] = [
    "model",
    "theta",
    "n",
    "replicates",
    "level",
    "s",
    "rule",
    "family",
    "g",
    "l",
    "b",
    "burn-in",
    "flavors",
    "seed",
    "hypothesis",
];

const REQUIRED: [&str; 4] = ["model", "theta", "n", "replicates"];

/// Key reference for --help output.
pub const CONFIG_HELP: &str = "\
Config file grammar: one key=value per line, `#` starts a comment line,
list values are comma-separated. Keys:
  model       ar1 | arch | arm                              (required)
  theta       autoregressive coefficients, comma-separated  (required)
  n           test sample sizes, comma-separated            (required)
  replicates  Monte Carlo replicates per cell               (required)
  level       test level in (0,1)                           [0.05]
  s           extension speed exponent, > 0                 [1]
  rule        s-plus-one | s-only                           [s-plus-one]
  family      gaussian | t<nu> with nu >= 3, e.g. t5        [gaussian]
  g           mean direction: zero | inv-quad | two-inv-quad [inv-quad]
  l           scale direction: same tokens                  [inv-quad]
  b           variance direction (arch): same tokens        [two-inv-quad]
  burn-in     pre-sample steps discarded by the simulator   [500]
  flavors     subset of oracle,lse,s-estimator              [all three]
  seed        master seed, u64                              [1]
  hypothesis  null | local                                  [local]
Perturbation amplitudes are not configured: the hypothesis fixes them at 0
or n^{-1/2}. The coverage command reads the interval level as 1 - level.";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Key/value pairs with the line each key was set on. Overrides record
/// line 0 since they come from the command line, not the file.
struct Pairs {
    map: HashMap<String, (String, usize)>,
}

impl Pairs {
    fn from_text(text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(lineno, format!("expected key=value, got `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(parse_err(lineno, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(parse_err(lineno, format!("empty value for key `{key}`")));
            }
            if let Some((_, first)) = map.get(key) {
                return Err(parse_err(
                    lineno,
                    format!("duplicate key `{key}`, first set on line {first}"),
                ));
            }
            map.insert(key.to_string(), (value.to_string(), lineno));
        }
        Ok(Pairs { map })
    }

    fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| parse_err(0, format!("override `{spec}` is not key=value")))?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(parse_err(0, format!("override names unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(parse_err(0, format!("override `{spec}` has an empty value")));
        }
        self.map.insert(key.to_string(), (value.to_string(), 0));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.map.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn line_of(&self, key: &str) -> usize {
        self.map.get(key).map(|(_, l)| *l).unwrap_or(0)
    }
}

fn parse_f64(value: &str, line: usize, key: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{value}` for key `{key}`")))?;
    if !v.is_finite() {
        return Err(parse_err(
            line,
            format!("non-finite value `{value}` for key `{key}`"),
        ));
    }
    Ok(v)
}

fn parse_u64(value: &str, line: usize, key: &str) -> Result<u64> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("invalid integer `{value}` for key `{key}`")))
}

fn parse_usize(value: &str, line: usize, key: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("invalid integer `{value}` for key `{key}`")))
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_perturbation(value: &str, line: usize, key: &str) -> Result<Perturbation> {
    match value {
        "zero" => Ok(Perturbation::Zero),
        "inv-quad" => Ok(Perturbation::InvQuad),
        "two-inv-quad" => Ok(Perturbation::TwoInvQuad),
        other => Err(parse_err(
            line,
            format!("key `{key}` expects zero | inv-quad | two-inv-quad, got `{other}`"),
        )),
    }
}

fn perturbation_token(p: Perturbation) -> &'static str {
    match p {
        Perturbation::Zero => "zero",
        Perturbation::InvQuad => "inv-quad",
        Perturbation::TwoInvQuad => "two-inv-quad",
    }
}

fn parse_family(value: &str, line: usize) -> Result<ScoreFamily> {
    if value == "gaussian" {
        return Ok(ScoreFamily::gaussian());
    }
    if let Some(rest) = value.strip_prefix('t') {
        let nu = parse_f64(rest, line, "family")?;
        return ScoreFamily::student_t(nu)
            .map_err(|e| parse_err(line, format!("family `{value}`: {e}")));
    }
    Err(parse_err(
        line,
        format!("key `family` expects gaussian or t<nu>, got `{value}`"),
    ))
}

/// Short display token for a score family: `gaussian` or `t<nu>`.
pub fn family_label(family: &ScoreFamily) -> String {
    match family.kind() {
        FamilyKind::Gaussian => "gaussian".to_string(),
        FamilyKind::StudentT { nu } => format!("t{nu}"),
    }
}

fn build(pairs: &Pairs) -> Result<ExperimentConfig> {
    let missing: Vec<&str> = REQUIRED
        .iter()
        .copied()
        .filter(|k| pairs.get(k).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(parse_err(
            0,
            format!("missing required keys: {}", missing.join(", ")),
        ));
    }

    let (model_value, model_line) = pairs.get("model").unwrap();
    let kind = match model_value {
        "ar1" => ModelKind::Ar1Perturbed,
        "arch" => ModelKind::ArchPerturbed,
        "arm" => ModelKind::Arm,
        other => {
            return Err(parse_err(
                model_line,
                format!("key `model` expects ar1 | arch | arm, got `{other}`"),
            ))
        }
    };

    let (theta_value, theta_line) = pairs.get("theta").unwrap();
    let theta: Vec<f64> = split_list(theta_value)
        .map(|tok| parse_f64(tok, theta_line, "theta"))
        .collect::<Result<_>>()?;
    if theta.is_empty() {
        return Err(parse_err(theta_line, "key `theta` lists no coefficients"));
    }
    if kind != ModelKind::Arm && theta.len() != 1 {
        return Err(parse_err(
            theta_line,
            format!(
                "model `{model_value}` takes exactly one coefficient, got {}",
                theta.len()
            ),
        ));
    }

    let family = match pairs.get("family") {
        Some((v, l)) => parse_family(v, l)?,
        None => ScoreFamily::gaussian(),
    };

    let mut model = match kind {
        ModelKind::Ar1Perturbed => ModelConfig::ar1(theta[0], family),
        ModelKind::ArchPerturbed => ModelConfig::arch(theta[0], family),
        ModelKind::Arm => ModelConfig::arm(theta, family),
    };
    if let Some((v, l)) = pairs.get("g") {
        model.g = parse_perturbation(v, l, "g")?;
    }
    if let Some((v, l)) = pairs.get("l") {
        model.l = parse_perturbation(v, l, "l")?;
    }
    if let Some((v, l)) = pairs.get("b") {
        model.b = parse_perturbation(v, l, "b")?;
    }
    if let Some((v, l)) = pairs.get("burn-in") {
        model.burn_in = parse_usize(v, l, "burn-in")?;
    }
    model
        .validate()
        .map_err(|e| parse_err(pairs.line_of("theta"), e.to_string()))?;

    let (n_value, n_line) = pairs.get("n").unwrap();
    let sizes: Vec<usize> = split_list(n_value)
        .map(|tok| parse_usize(tok, n_line, "n"))
        .collect::<Result<_>>()?;
    if sizes.is_empty() {
        return Err(parse_err(n_line, "key `n` lists no sample sizes"));
    }
    if let Some(bad) = sizes.iter().find(|&&n| n < 3) {
        return Err(parse_err(
            n_line,
            format!("sample size {bad} is too small to fit anything"),
        ));
    }

    let (reps_value, reps_line) = pairs.get("replicates").unwrap();
    let replicates = parse_u64(reps_value, reps_line, "replicates")?;
    if replicates == 0 {
        return Err(parse_err(reps_line, "replicates must be at least 1"));
    }

    let level = match pairs.get("level") {
        Some((v, l)) => {
            let level = parse_f64(v, l, "level")?;
            if !(0.0 < level && level < 1.0) {
                return Err(parse_err(l, format!("level must lie in (0,1), got {v}")));
            }
            level
        }
        None => 0.05,
    };

    let s = match pairs.get("s") {
        Some((v, l)) => {
            let s = parse_f64(v, l, "s")?;
            SEstimatorConfig::new(s).map_err(|e| parse_err(l, e.to_string()))?
        }
        None => SEstimatorConfig::new(1.0).expect("default exponent is valid"),
    };
    let s_config = match pairs.get("rule") {
        Some(("s-plus-one", _)) => s.with_rule(ExtensionRule::SPlusOne),
        Some(("s-only", _)) => s.with_rule(ExtensionRule::SOnly),
        Some((other, l)) => {
            return Err(parse_err(
                l,
                format!("key `rule` expects s-plus-one | s-only, got `{other}`"),
            ))
        }
        None => s,
    };

    let flavors = match pairs.get("flavors") {
        Some((v, l)) => {
            let mut flavors = Vec::new();
            for tok in split_list(v) {
                let flavor = match tok {
                    "oracle" => Flavor::Oracle,
                    "lse" => Flavor::Lse,
                    "s-estimator" => Flavor::SEstimator,
                    other => {
                        return Err(parse_err(
                            l,
                            format!(
                                "key `flavors` expects oracle | lse | s-estimator, got `{other}`"
                            ),
                        ))
                    }
                };
                if flavors.contains(&flavor) {
                    return Err(parse_err(l, format!("flavor `{tok}` listed twice")));
                }
                flavors.push(flavor);
            }
            if flavors.is_empty() {
                return Err(parse_err(l, "key `flavors` lists no flavors"));
            }
            flavors
        }
        None => vec![Flavor::Oracle, Flavor::Lse, Flavor::SEstimator],
    };

    let master_seed = match pairs.get("seed") {
        Some((v, l)) => parse_u64(v, l, "seed")?,
        None => 1,
    };

    let hypothesis = match pairs.get("hypothesis") {
        Some(("null", _)) => Hypothesis::Null,
        Some(("local", _)) => Hypothesis::LocalAlternative,
        Some((other, l)) => {
            return Err(parse_err(
                l,
                format!("key `hypothesis` expects null | local, got `{other}`"),
            ))
        }
        None => Hypothesis::LocalAlternative,
    };

    Ok(ExperimentConfig {
        model,
        sizes,
        replicates,
        level,
        s_config,
        flavors,
        master_seed,
        hypothesis,
    })
}

/// Parses a config file body with defaults applied.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    build(&Pairs::from_text(text)?)
}

/// Parses a config file body, then applies `key=value` overrides in order
/// and finally the master-seed override when given.
pub fn parse_config_with(
    text: &str,
    overrides: &[String],
    seed: Option<u64>,
) -> Result<ExperimentConfig> {
    let mut pairs = Pairs::from_text(text)?;
    for spec in overrides {
        pairs.apply_override(spec)?;
    }
    let mut cfg = build(&pairs)?;
    if let Some(master) = seed {
        cfg.master_seed = master;
    }
    Ok(cfg)
}

/// Renders a config in canonical key order. `parse_config` of the output
/// reproduces the input config exactly; amplitudes are derived from the
/// hypothesis at run time, so they carry no keys.
pub fn render_config(cfg: &ExperimentConfig) -> String {
    let model_token = match cfg.model.kind {
        ModelKind::Ar1Perturbed => "ar1",
        ModelKind::ArchPerturbed => "arch",
        ModelKind::Arm => "arm",
    };
    let theta = cfg
        .model
        .theta
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let sizes = cfg
        .sizes
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let rule = match cfg.s_config.rule {
        ExtensionRule::SPlusOne => "s-plus-one",
        ExtensionRule::SOnly => "s-only",
    };
    let flavors = cfg
        .flavors
        .iter()
        .map(|f| f.token())
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "model={model_token}\n\
         theta={theta}\n\
         n={sizes}\n\
         replicates={}\n\
         level={}\n\
         s={}\n\
         rule={rule}\n\
         family={}\n\
         g={}\n\
         l={}\n\
         b={}\n\
         burn-in={}\n\
         flavors={flavors}\n\
         seed={}\n\
         hypothesis={}\n",
        cfg.replicates,
        cfg.level,
        cfg.s_config.s,
        family_label(&cfg.model.family),
        perturbation_token(cfg.model.g),
        perturbation_token(cfg.model.l),
        perturbation_token(cfg.model.b),
        cfg.model.burn_in,
        cfg.master_seed,
        cfg.hypothesis.token(),
    )
}
