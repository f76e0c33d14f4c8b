//! Command implementations. Each produces a string artifact (CSV or JSON)
//! written to --out or stdout.

use serde::Serialize;
use serde_json::json;

use sturmspec_core::heleshaw::{scan, HeleShawParams, Profile};
use sturmspec_core::slp::{eigenfunction_samples, SLProblem};
use sturmspec_core::specfun::{
    constant_profile_eta, constant_profile_h1, linear_profile_solution, second_solution_gate,
    LinearProfile, SeriesSettings,
};
use sturmspec_core::spectrum::{aux_spectrum, full_spectrum};
use sturmspec_core::transforms::verify_suite;
use sturmspec_core::{shoot, SolverSettings};

use crate::config::{Config, ConfigError};
use crate::output;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] sturmspec_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CommandError {
    /// Machine-readable form for --format json error reporting.
    pub fn to_json(&self) -> String {
        json!({ "error": self.to_string() }).to_string()
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization")
}

fn problem_from(config: &Config) -> Result<(SLProblem, SolverSettings), CommandError> {
    match config {
        Config::Problem(p) => Ok(p.build()?),
        Config::HeleShaw(h) => {
            let (hp, ks, settings) = h.heleshaw.build()?;
            let k = *ks.first().ok_or_else(|| {
                CommandError::Usage("heleshaw config has no k_values".into())
            })?;
            Ok((sturmspec_core::heleshaw::build_slp(&hp, k)?, settings))
        }
    }
}

fn override_tol(settings: &mut SolverSettings, tol: Option<f64>) {
    if let Some(t) = tol {
        settings.rel_tol = t;
        settings.abs_tol = t * 1e-2;
        settings.root_tol = t;
    }
}

pub fn run_aux_spectrum(
    config: &Config,
    n_max: usize,
    tol: Option<f64>,
    format: Format,
) -> Result<String, CommandError> {
    let (problem, mut settings) = problem_from(config)?;
    override_tol(&mut settings, tol);
    let aux = aux_spectrum(&problem, n_max, &settings)?;
    Ok(match format {
        Format::Csv => output::aux_csv(&aux),
        Format::Json => to_json(&aux),
    })
}

pub fn run_spectrum(
    config: &Config,
    n_max: usize,
    tol: Option<f64>,
    format: Format,
    oracle: bool,
) -> Result<String, CommandError> {
    let (problem, mut settings) = problem_from(config)?;
    override_tol(&mut settings, tol);
    let records = full_spectrum(&problem, n_max, &settings)?;
    if oracle {
        let oracle_report = oracle_checks(config, &settings)?;
        let combined = json!({
            "spectrum": records,
            "oracle": oracle_report,
        });
        return Ok(serde_json::to_string_pretty(&combined).unwrap());
    }
    Ok(match format {
        Format::Csv => output::spectrum_csv(&records),
        Format::Json => to_json(&records),
    })
}

pub fn run_scan(
    config: &Config,
    n_max: usize,
    tol: Option<f64>,
    format: Format,
    oracle: bool,
) -> Result<String, CommandError> {
    let Config::HeleShaw(h) = config else {
        return Err(CommandError::Usage(
            "the scan command needs a heleshaw config".into(),
        ));
    };
    let (hp, ks, mut settings) = h.heleshaw.build()?;
    override_tol(&mut settings, tol);
    let rows = scan(&hp, &ks, n_max, &settings);
    if oracle {
        let oracle_report = oracle_checks(config, &settings)?;
        let combined = json!({ "rows": rows, "oracle": oracle_report });
        return Ok(serde_json::to_string_pretty(&combined).unwrap());
    }
    Ok(match format {
        Format::Csv => output::scan_csv(&rows),
        Format::Json => to_json(&rows),
    })
}

/// Like scan but always in the fixed table layout (CSV).
pub fn run_table(
    config: &Config,
    tol: Option<f64>,
) -> Result<String, CommandError> {
    let Config::HeleShaw(h) = config else {
        return Err(CommandError::Usage(
            "the table command needs a heleshaw config".into(),
        ));
    };
    let (hp, ks, mut settings) = h.heleshaw.build()?;
    override_tol(&mut settings, tol);
    let rows = scan(&hp, &ks, 2, &settings);
    Ok(output::scan_csv(&rows))
}

pub fn run_eigenfunction(
    config: &Config,
    lambda: f64,
    points: usize,
    tol: Option<f64>,
    format: Format,
) -> Result<String, CommandError> {
    let (problem, mut settings) = problem_from(config)?;
    override_tol(&mut settings, tol);
    let n = points.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|i| problem.length() * i as f64 / (n - 1) as f64)
        .collect();
    let samples = eigenfunction_samples(&problem, lambda, &grid, &settings)?;
    Ok(match format {
        Format::Csv => output::samples_csv(&samples),
        Format::Json => to_json(&samples),
    })
}

pub fn run_verify(
    config: &Config,
    n_max: usize,
    tol: Option<f64>,
    format: Format,
) -> Result<String, CommandError> {
    let (problem, mut settings) = problem_from(config)?;
    override_tol(&mut settings, tol);
    let report = verify_suite(&problem, n_max, &settings)?;
    if format == Format::Json {
        return Ok(to_json(&report));
    }
    // human-readable pass/fail lines
    let mut out = String::new();
    let line = |ok: bool, what: &str| format!("{} {}\n", if ok { "PASS" } else { "FAIL" }, what);
    out.push_str(&line(report.interlacing.ok, "interlacing chain"));
    for m in &report.monotonicity {
        out.push_str(&line(
            m.strictly_decreasing,
            &format!("characteristic ratio strictly decreasing on branch {}", m.branch),
        ));
    }
    if let Some(sep) = &report.separation {
        out.push_str(&line(sep.ok, "zero separation between the two highest modes"));
    }
    if let Some(res) = report.crum_darboux_max_residual {
        out.push_str(&line(
            res < 1e-6,
            &format!("factorized eigenfunctions satisfy the regular problem (max residual {res:.3e})"),
        ));
    }
    for (le, orig, diff) in &report.regular_vs_original {
        out.push_str(&line(
            *diff < 1e-3,
            &format!("regular eigenvalue {le:.6} matches original {orig:.6} (rel {diff:.2e})"),
        ));
    }
    if let Some(dev) = report.inverse_map_deviation {
        out.push_str(&line(dev < 1e-5, &format!("inverse map recovery (max deviation {dev:.3e})")));
    }
    if let Some(t1) = report.liouville_t1 {
        out.push_str(&format!("INFO normal-form length t1 = {t1:.9}\n"));
    }
    if let Some(asym) = &report.asymptotic {
        out.push_str(&format!(
            "INFO mode asymptotic residuals: max {:.4}, trend slope {:.5}\n",
            asym.max_residual, asym.slope
        ));
    }
    out.push_str(&line(report.ok, "verification suite"));
    Ok(out)
}

/// Closed-form cross-checks for Hele-Shaw configs (--oracle).
fn oracle_checks(
    config: &Config,
    settings: &SolverSettings,
) -> Result<serde_json::Value, CommandError> {
    let Config::HeleShaw(h) = config else {
        return Ok(json!({"note": "oracle cross-checks apply to heleshaw configs"}));
    };
    let (hp, ks, _) = h.heleshaw.build()?;
    let k = *ks.first().ok_or_else(|| CommandError::Usage("no k_values".into()))?;
    let bc = sturmspec_core::heleshaw::physics_coefficients(&hp, k);
    let series = SeriesSettings::default();
    match hp.profile {
        Profile::Constant { mu } => {
            let report = constant_oracle(&hp, mu, k, &bc, settings)?;
            Ok(report)
        }
        Profile::Linear { .. } => {
            let (a, b) = hp.linear_coefficients().unwrap();
            let profile = LinearProfile::new(a, b)?;
            let problem = sturmspec_core::heleshaw::build_slp(&hp, k)?;
            let records = full_spectrum(&problem, 0, settings)?;
            let lam0 = records
                .iter()
                .find(|r| r.zero_count == 0 && r.lambda > 0.0)
                .map(|r| r.lambda)
                .unwrap_or(1.0);
            let alpha = (1.0 - lam0 * k) / 2.0;
            let z0 = 2.0 * k * b / a;
            let z1 = 2.0 * k * hp.length + z0;
            let zs: Vec<f64> = (0..24).map(|i| z0 + (z1 - z0) * i as f64 / 23.0).collect();
            let gate = second_solution_gate(alpha, &zs, 1e-7, &series)?;
            // agreement with the shot at x = L when the gate admits the path
            let agreement = if gate.u_usable {
                let (f_cf, _) = linear_profile_solution(&profile, k, lam0, &bc, hp.length, &series)?;
                let shot = shoot(&problem, lam0, settings)?;
                Some((f_cf - shot.f_end).abs() / shot.f_end.abs())
            } else {
                None
            };
            Ok(json!({
                "profile": "linear",
                "lambda0": lam0,
                "gate": gate,
                "terminal_agreement_rel": agreement,
            }))
        }
    }
}

fn constant_oracle(
    hp: &HeleShawParams,
    mu: f64,
    k: f64,
    bc: &sturmspec_core::slp::BoundaryParams,
    settings: &SolverSettings,
) -> Result<serde_json::Value, CommandError> {
    // numeric ratio vs closed form needs a problem with nonzero weight, which
    // the constant profile lacks; compare on a unit-coefficient surrogate
    // r = q/mu: here keep to the closed forms themselves
    let eta = if bc.alpha1 != 0.0 {
        Some(constant_profile_eta(mu, k, hp.length, bc.alpha1, bc.alpha2)?)
    } else {
        None
    };
    let mut grid = Vec::new();
    for i in 1..=20 {
        let lam = i as f64 * 2.5;
        grid.push((lam, constant_profile_h1(mu, k, hp.length, bc, lam)?));
    }
    let _ = settings;
    let _ = (kummer_phi, tricomi_psi, tricomi_u, kummer_ode_residual, char_lhs);
    Ok(json!({
        "profile": "constant",
        "eta": eta,
        "ratio_samples": grid,
    }))
}
