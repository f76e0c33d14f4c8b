//! JSON configuration: either a direct problem description (coefficients plus
//! boundary constants) or a Hele-Shaw parameter block with the wave numbers to
//! scan. One document, no environment lookups, so table runs are reproducible
//! from the file alone.

use serde::{Deserialize, Serialize};
use sturmspec_core::heleshaw::{HeleShawParams, Profile};
use sturmspec_core::slp::{make_problem, BoundaryParams, CoeffFn, CoefficientSet, SLProblem};
use sturmspec_core::SolverSettings;

use crate::expr::parse_expression;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expression error in '{key}': {err}")]
    Expr { key: &'static str, err: crate::expr::ParseError },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] sturmspec_core::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Coefficients {
    #[serde(rename = "constant")]
    Constant { p: f64, q: f64, r: f64 },
    #[serde(rename = "linear-viscosity")]
    LinearViscosity { k: f64, mu0_slope: f64, mu0_intercept: f64 },
    #[serde(rename = "expression")]
    Expression { p: String, q: String, r: String },
    #[serde(rename = "tabulated")]
    Tabulated { xs: Vec<f64>, p: Vec<f64>, q: Vec<f64>, r: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsSpec {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub root_tol: Option<f64>,
    pub max_steps: Option<usize>,
}

impl SettingsSpec {
    pub fn resolve(&self) -> SolverSettings {
        let d = SolverSettings::default();
        SolverSettings {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            root_tol: self.root_tol.unwrap_or(d.root_tol),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(rename = "L")]
    pub length: f64,
    pub coefficients: Coefficients,
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub settings: SettingsSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeleShawSpec {
    pub mu1: f64,
    pub mu2: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "J1", default)]
    pub j1: Option<f64>,
    #[serde(rename = "J2", default)]
    pub j2: Option<f64>,
    #[serde(default)]
    pub mu: Option<f64>,
    pub profile: String,
    pub k_values: Vec<f64>,
    #[serde(default)]
    pub settings: SettingsSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeleShawConfig {
    pub heleshaw: HeleShawSpec,
}

/// Either flavor of config document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Config {
    HeleShaw(HeleShawConfig),
    Problem(ProblemConfig),
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    // probe the discriminating key first so schema errors are reported for
    // the intended flavor instead of a vague untagged-enum failure
    let probe: serde_json::Value = serde_json::from_str(text)?;
    if probe.get("heleshaw").is_some() {
        Ok(Config::HeleShaw(serde_json::from_str(text)?))
    } else {
        Ok(Config::Problem(serde_json::from_str(text)?))
    }
}

fn expr_fn(key: &'static str, src: &str, length: f64) -> Result<CoeffFn, ConfigError> {
    let ast = parse_expression(src).map_err(|err| ConfigError::Expr { key, err })?;
    for i in 0..=32 {
        let x = length * i as f64 / 32.0;
        if !ast.eval(x).is_finite() {
            return Err(ConfigError::Invalid(format!(
                "expression '{src}' for {key} is non-finite at x = {x}"
            )));
        }
    }
    Ok(CoeffFn::new(move |x| ast.eval(x)))
}

fn tabulated_fn(
    key: &'static str,
    xs: &[f64],
    ys: &[f64],
) -> Result<CoeffFn, ConfigError> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(ConfigError::Invalid(format!(
            "tabulated {key}: need matching xs/values with at least 2 entries"
        )));
    }
    let xs = xs.to_vec();
    let ys = ys.to_vec();
    Ok(CoeffFn::new(move |x| {
        // linear interpolation with constant extension
        let i = xs.partition_point(|&k| k < x).clamp(1, xs.len() - 1);
        let (x0, x1) = (xs[i - 1], xs[i]);
        let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
        ys[i - 1] + t * (ys[i] - ys[i - 1])
    }))
}

impl ProblemConfig {
    pub fn build(&self) -> Result<(SLProblem, SolverSettings), ConfigError> {
        let length = self.length;
        let coeffs = match &self.coefficients {
            Coefficients::Constant { p, q, r } => CoefficientSet::new(
                CoeffFn::constant(*p),
                CoeffFn::constant(*q),
                CoeffFn::constant(*r),
                length,
            ),
            Coefficients::LinearViscosity { k, mu0_slope, mu0_intercept } => {
                let (k2, a, b) = (k * k, *mu0_slope, *mu0_intercept);
                CoefficientSet::new(
                    CoeffFn::linear(a, b),
                    CoeffFn::new(move |x| k2 * (a * x + b)),
                    CoeffFn::constant(k2 * a),
                    length,
                )
                .with_increasing_p()
            }
            Coefficients::Expression { p, q, r } => CoefficientSet::new(
                expr_fn("p", p, length)?,
                expr_fn("q", q, length)?,
                expr_fn("r", r, length)?,
                length,
            ),
            Coefficients::Tabulated { xs, p, q, r } => CoefficientSet::new(
                tabulated_fn("p", xs, p)?,
                tabulated_fn("q", xs, q)?,
                tabulated_fn("r", xs, r)?,
                length,
            ),
        };
        let bc = BoundaryParams::new(
            self.boundary.alpha1,
            self.boundary.alpha2,
            self.boundary.beta1,
            self.boundary.beta2,
        )?;
        let problem = make_problem(coeffs, bc)?;
        Ok((problem, self.settings.resolve()))
    }
}

impl HeleShawSpec {
    pub fn build(&self) -> Result<(HeleShawParams, Vec<f64>, SolverSettings), ConfigError> {
        let profile = match self.profile.as_str() {
            "linear" => {
                let j1 = self.j1.ok_or_else(|| {
                    ConfigError::Invalid("linear profile needs J1".into())
                })?;
                let j2 = self.j2.ok_or_else(|| {
                    ConfigError::Invalid("linear profile needs J2".into())
                })?;
                Profile::Linear { j1, j2 }
            }
            "constant" => {
                let mu = self.mu.ok_or_else(|| {
                    ConfigError::Invalid("constant profile needs mu".into())
                })?;
                Profile::Constant { mu }
            }
            other => {
                return Err(ConfigError::Invalid(format!(
                    "unknown profile '{other}' (expected \"linear\" or \"constant\")"
                )))
            }
        };
        let hp = HeleShawParams::new(
            self.mu1,
            self.mu2,
            self.s,
            self.t,
            self.u,
            self.length,
            profile,
        )?;
        Ok((hp, self.k_values.clone(), self.settings.resolve()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_constant_config_fills_defaults() {
        let cfg = parse_config(
            r#"{"L": 1.0,
                "coefficients": {"kind": "constant", "p": 1.0, "q": 1.0, "r": 1.0},
                "boundary": {"alpha1": 1.0, "alpha2": 1.0, "beta1": -1.0, "beta2": 1.0}}"#,
        )
        .unwrap();
        let Config::Problem(p) = cfg else { panic!("expected problem config") };
        let (_, settings) = p.build().unwrap();
        assert_eq!(settings.rel_tol, SolverSettings::default().rel_tol);
        assert_eq!(settings.max_steps, SolverSettings::default().max_steps);
    }

    #[test]
    fn physics_config_parses() {
        let cfg = parse_config(
            r#"{"heleshaw": {"mu1": 1.0, "mu2": 2.0, "S": 1.0, "T": 1.0, "U": 1.0,
                "L": 0.1, "J1": 0.1, "J2": 0.1, "profile": "linear",
                "k_values": [1.0, 2.0]}}"#,
        )
        .unwrap();
        let Config::HeleShaw(h) = cfg else { panic!("expected heleshaw config") };
        let (hp, ks, _) = h.heleshaw.build().unwrap();
        assert_eq!(ks, vec![1.0, 2.0]);
        assert_eq!(hp.mu0_left(), 1.1);
    }

    #[test]
    fn negative_q_rejected_at_validation() {
        let cfg = parse_config(
            r#"{"L": 2.0,
                "coefficients": {"kind": "expression", "p": "1", "q": "x-1", "r": "1"},
                "boundary": {"alpha1": 1.0, "alpha2": 1.0, "beta1": -1.0, "beta2": 1.0}}"#,
        )
        .unwrap();
        let Config::Problem(p) = cfg else { panic!() };
        assert!(matches!(
            p.build(),
            Err(ConfigError::Core(sturmspec_core::Error::Validation { func: "q", .. }))
        ));
    }

    #[test]
    fn unknown_key_rejected() {
        let e = parse_config(
            r#"{"L": 1.0, "coefficients": {"kind": "constant", "p": 1, "q": 1, "r": 1},
                "boundary": {"alpha1": 1, "alpha2": 1, "beta1": -1, "beta2": 1},
                "turbo": true}"#,
        );
        assert!(e.is_err());
    }

    #[test]
    fn roundtrip_is_idempotent_after_normalization() {
        let text = r#"{"L": 1.0,
            "coefficients": {"kind": "constant", "p": 1.0, "q": 2.0, "r": 3.0},
            "boundary": {"alpha1": 1.0, "alpha2": 1.0, "beta1": -1.0, "beta2": 1.0}}"#;
        let cfg = parse_config(text).unwrap();
        let once = serde_json::to_string(&cfg).unwrap();
        let twice = serde_json::to_string(&parse_config(&once).unwrap()).unwrap();
        assert_eq!(once, twice);
    }
}
