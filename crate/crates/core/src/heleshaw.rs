//! Three-layer Hele-Shaw stability front end.
//!
//! A wave number k and the physical parameters (viscosities mu1 < mu2 of the
//! outer fluids, interfacial tensions S and T, displacement speed U, middle
//! layer length L, middle viscosity profile mu0) define one spectral problem
//!
//! ```text
//! (mu0 f')' - (k^2 mu0 - lambda k^2 mu0') f = 0
//! mu0(0) f'(0) = (alpha1(k) lambda + alpha2(k)) f(0)
//! mu0(L) f'(L) = (beta1(k)  lambda - beta2(k) ) f(L)
//! ```
//!
//! whose eigenvalues lambda convert to perturbation growth rates through
//! sigma = U / lambda; the dominant rate is sigma_0 = U / lambda_0. The
//! constant profile makes the weight mu0' vanish, so it is handled by the
//! closed forms in [`crate::specfun`] instead of the shooting solver, and a
//! scan row reports its existence flags.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::{maybe_par_map, seq_map};
use crate::slp::{make_problem, BoundaryParams, CoeffFn, CoefficientSet, SLProblem, SolverSettings};
use crate::specfun::{constant_profile_existence, ExistenceFlags};
use crate::spectrum::{classify_case, full_spectrum, BranchIndex, RegimeCase};

/// Middle-layer viscosity profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Profile {
    /// Linear increasing profile fixed by the interface jumps:
    /// mu0(0+) = mu1 + j1, mu0(L-) = mu2 - j2.
    Linear { j1: f64, j2: f64 },
    /// Constant viscosity middle layer.
    Constant { mu: f64 },
}

/// Physical parameters of the three-layer cell.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HeleShawParams {
    pub mu1: f64,
    pub mu2: f64,
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub length: f64,
    pub profile: Profile,
}

impl HeleShawParams {
    pub fn new(
        mu1: f64,
        mu2: f64,
        s: f64,
        t: f64,
        u: f64,
        length: f64,
        profile: Profile,
    ) -> Result<Self> {
        for (name, v) in [("mu1", mu1), ("mu2", mu2), ("S", s), ("T", t), ("U", u), ("L", length)]
        {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        match profile {
            Profile::Linear { j1, j2 } => {
                let lo = mu1 + j1;
                let hi = mu2 - j2;
                if !(lo > 0.0) {
                    return Err(Error::Domain(format!(
                        "mu0(0+) = mu1 + J1 = {lo} must be positive"
                    )));
                }
                if !(hi > lo) {
                    return Err(Error::Domain(format!(
                        "mu0(L-) = mu2 - J2 = {hi} must exceed mu0(0+) = {lo} (increasing viscosity)"
                    )));
                }
            }
            Profile::Constant { mu } => {
                if !(mu > 0.0) {
                    return Err(Error::Domain(format!("constant profile viscosity {mu} must be positive")));
                }
            }
        }
        Ok(HeleShawParams { mu1, mu2, s, t, u, length, profile })
    }

    /// mu0 just inside the left interface.
    pub fn mu0_left(&self) -> f64 {
        match self.profile {
            Profile::Linear { j1, .. } => self.mu1 + j1,
            Profile::Constant { mu } => mu,
        }
    }

    /// mu0 just inside the right interface.
    pub fn mu0_right(&self) -> f64 {
        match self.profile {
            Profile::Linear { j2, .. } => self.mu2 - j2,
            Profile::Constant { mu } => mu,
        }
    }

    /// (slope, intercept) of the linear profile.
    pub fn linear_coefficients(&self) -> Option<(f64, f64)> {
        match self.profile {
            Profile::Linear { .. } => {
                let b = self.mu0_left();
                let a = (self.mu0_right() - b) / self.length;
                Some((a, b))
            }
            Profile::Constant { .. } => None,
        }
    }
}

/// Boundary constants as functions of the wave number:
/// alpha1 = k^2 (S k^2/U + mu1 - mu0(0+)), alpha2 = mu1 k,
/// beta1 = k^2 (mu2 - mu0(L-) - T k^2/U),  beta2 = mu2 k.
/// For the linear profile the differences reduce exactly to the jumps
/// (mu1 - mu0(0+) = -J1, mu2 - mu0(L-) = J2), which keeps the k = sqrt(UJ/S)
/// roots exact in floating point.
pub fn physics_coefficients(hp: &HeleShawParams, k: f64) -> BoundaryParams {
    let k2 = k * k;
    let (d_left, d_right) = match hp.profile {
        Profile::Linear { j1, j2 } => (-j1, j2),
        Profile::Constant { mu } => (hp.mu1 - mu, hp.mu2 - mu),
    };
    BoundaryParams {
        alpha1: k2 * (hp.s * k2 / hp.u + d_left),
        alpha2: hp.mu1 * k,
        beta1: k2 * (d_right - hp.t * k2 / hp.u),
        beta2: hp.mu2 * k,
    }
}

/// The spectral problem for one wave number (linear profile only; the
/// constant profile has a vanishing weight and is served by the closed
/// forms).
pub fn build_slp(hp: &HeleShawParams, k: f64) -> Result<SLProblem> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wave number must be positive, got {k}")));
    }
    let (a, b) = hp.linear_coefficients().ok_or_else(|| {
        Error::Regime(
            "constant profile has zero weight r = k^2 mu0'; use the constant-profile closed forms"
                .into(),
        )
    })?;
    let k2 = k * k;
    let coeffs = CoefficientSet::new(
        CoeffFn::linear(a, b),
        CoeffFn::new(move |x| k2 * (a * x + b)),
        CoeffFn::constant(k2 * a),
        hp.length,
    )
    .with_increasing_p()
    .with_smoothness(crate::slp::Smoothness::Analytic);
    make_problem(coeffs, physics_coefficients(hp, k))
}

/// Wave-number thresholds: below `k_lo` the regime is case i, between the
/// bounds case ii, above `k_hi` case iii.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegimeBounds {
    pub k_lo: f64,
    pub k_hi: f64,
}

/// k_lo^2 = min{(U/S)(mu0(0+)-mu1), (U/T)(mu2-mu0(L-))}, k_hi^2 the max.
pub fn regime_bounds(hp: &HeleShawParams) -> RegimeBounds {
    let a = hp.u / hp.s * (hp.mu0_left() - hp.mu1);
    let b = hp.u / hp.t * (hp.mu2 - hp.mu0_right());
    RegimeBounds {
        k_lo: a.min(b).max(0.0).sqrt(),
        k_hi: a.max(b).max(0.0).sqrt(),
    }
}

/// One located eigenvalue of a scan row with its growth rate.
#[derive(Debug, Clone, Serialize)]
pub struct ScanEntry {
    pub index: String,
    pub lambda: f64,
    pub zero_count: usize,
    pub sigma: Option<f64>,
}

/// One wave number's worth of spectral output.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub k: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub regime: RegimeCase,
    pub entries: Vec<ScanEntry>,
    /// Existence flags (constant profile rows only).
    pub existence: Option<ExistenceFlags>,
    /// Dominant growth rate U / lambda_0.
    pub sigma0: Option<f64>,
    /// Per-row solver failure, if any; never fatal to the scan.
    pub error: Option<String>,
}

fn scan_row(hp: &HeleShawParams, k: f64, n_max: usize, settings: &SolverSettings) -> ScanRow {
    let bc = physics_coefficients(hp, k);
    let regime = classify_case(&bc);
    let mut row = ScanRow {
        k,
        alpha1: bc.alpha1,
        beta1: bc.beta1,
        regime,
        entries: Vec::new(),
        existence: None,
        sigma0: None,
        error: None,
    };
    match hp.profile {
        Profile::Constant { .. } => {
            row.existence = Some(constant_profile_existence(&bc));
        }
        Profile::Linear { .. } => match build_slp(hp, k).and_then(|p| full_spectrum(&p, n_max, settings)) {
            Ok(records) => {
                row.entries = records
                    .iter()
                    .map(|r| ScanEntry {
                        index: r.index.to_string(),
                        lambda: r.lambda,
                        zero_count: r.zero_count,
                        sigma: None,
                    })
                    .collect();
                if let Some(r) = records.iter().find(|r| r.index == BranchIndex::NonNeg(0)) {
                    row.sigma0 = Some(hp.u / r.lambda);
                }
            }
            Err(e) => row.error = Some(e.to_string()),
        },
    }
    row
}

/// Attaches sigma = U / lambda to every present eigenvalue (lambda = 0 never
/// occurs in a spectrum) and sets the dominant rate from lambda_0.
pub fn growth_rates(rows: &mut [ScanRow], u: f64) {
    for row in rows {
        for e in &mut row.entries {
            e.sigma = Some(u / e.lambda);
        }
        if row.sigma0.is_none() {
            row.sigma0 = row
                .entries
                .iter()
                .find(|e| e.index == "0")
                .map(|e| u / e.lambda);
        }
    }
}

/// Scans the wave numbers; rows are computed independently (in parallel under
/// the `parallel` feature) and returned in input order with growth rates
/// attached. Per-row failures are recorded on the row.
pub fn scan(
    hp: &HeleShawParams,
    k_values: &[f64],
    n_max: usize,
    settings: &SolverSettings,
) -> Vec<ScanRow> {
    let mut rows = maybe_par_map(k_values, |&k| scan_row(hp, k, n_max, settings));
    growth_rates(&mut rows, hp.u);
    rows
}

/// Always-sequential variant of [`scan`] (the fallback path; kept callable
/// for the benchmark comparison).
pub fn scan_sequential(
    hp: &HeleShawParams,
    k_values: &[f64],
    n_max: usize,
    settings: &SolverSettings,
) -> Vec<ScanRow> {
    let mut rows = seq_map(k_values, |&k| scan_row(hp, k, n_max, settings));
    growth_rates(&mut rows, hp.u);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// U = 1 configuration (S = T = 1, mu = 1..2, J = 0.1); the published
    /// eigenvalue grid corresponds to a unit middle layer.
    pub(crate) fn params_u(u: f64) -> HeleShawParams {
        HeleShawParams::new(1.0, 2.0, 1.0, 1.0, u, 1.0, Profile::Linear { j1: 0.1, j2: 0.1 })
            .unwrap()
    }

    #[test]
    fn coefficient_columns_u1() {
        let hp = params_u(1.0);
        let bc = physics_coefficients(&hp, 1.0);
        assert_abs_diff_eq!(bc.alpha1, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(bc.beta1, -0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(bc.alpha2, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bc.beta2, 2.0, epsilon = 1e-15);
        let bc2 = physics_coefficients(&hp, 2.0);
        assert_abs_diff_eq!(bc2.alpha1, 15.6, epsilon = 1e-12);
        assert_abs_diff_eq!(bc2.beta1, -15.6, epsilon = 1e-12);
    }

    #[test]
    fn coefficient_columns_u10_exact_zero() {
        let hp = params_u(10.0);
        let bc = physics_coefficients(&hp, 1.0);
        assert_eq!(bc.alpha1, 0.0);
        assert_eq!(bc.beta1, 0.0);
        assert_eq!(classify_case(&bc), RegimeCase::II);
        let bc2 = physics_coefficients(&hp, 2.0);
        assert_relative_eq!(bc2.alpha1, 1.2, max_relative = 1e-14);
        assert_relative_eq!(bc2.beta1, -1.2, max_relative = 1e-14);
    }

    #[test]
    fn slp_from_linear_profile() {
        // L = 0.1 gives the slope-8 profile; the same jumps on L = 1 give 0.8
        let hp = HeleShawParams::new(
            1.0,
            2.0,
            1.0,
            1.0,
            1.0,
            0.1,
            Profile::Linear { j1: 0.1, j2: 0.1 },
        )
        .unwrap();
        let (a, b) = hp.linear_coefficients().unwrap();
        assert_relative_eq!(a, 8.0, max_relative = 1e-14);
        assert_relative_eq!(b, 1.1, max_relative = 1e-14);
        let prob = build_slp(&hp, 1.0).unwrap();
        assert!(prob.coefficients.increasing_p);
        // r is the constant k^2 * slope
        assert_relative_eq!(prob.coefficients.r.eval(0.03), 8.0, max_relative = 1e-14);
        assert_relative_eq!(prob.coefficients.q.eval(0.1), 1.9, max_relative = 1e-14);
        assert_relative_eq!(prob.boundary.alpha1, 0.9, max_relative = 1e-14);
    }

    #[test]
    fn constant_profile_routed_to_closed_forms() {
        let hp =
            HeleShawParams::new(1.0, 2.0, 1.0, 1.0, 1.0, 0.1, Profile::Constant { mu: 1.0 })
                .unwrap();
        assert!(matches!(build_slp(&hp, 1.0), Err(Error::Regime(_))));
        let rows = scan(&hp, &[1.0], 2, &SolverSettings::default());
        assert!(rows[0].existence.is_some());
        assert!(rows[0].entries.is_empty());
        // alpha1(1) = 1*(1 + 1 - 1) = 1 > 0, beta1(1) = 1*(2 - 1 - 1) = 0
        let f = rows[0].existence.unwrap();
        assert!(!f.lambda_neg1 && f.lambda_neg0 && !f.lambda_0);
    }

    #[test]
    fn regime_bounds_match_published_thresholds() {
        let hp = params_u(1.0);
        let rb = regime_bounds(&hp);
        assert_relative_eq!(rb.k_lo, 0.1f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(rb.k_hi, 0.1f64.sqrt(), max_relative = 1e-14);
        let hp10 = params_u(10.0);
        let rb10 = regime_bounds(&hp10);
        assert_relative_eq!(rb10.k_lo, 1.0, max_relative = 1e-14);
        assert_relative_eq!(rb10.k_hi, 1.0, max_relative = 1e-14);
        // distinct tensions split the bounds
        let hp2 =
            HeleShawParams::new(1.0, 2.0, 1.0, 0.5, 1.0, 1.0, Profile::Linear { j1: 0.1, j2: 0.1 })
                .unwrap();
        let rb2 = regime_bounds(&hp2);
        assert!(rb2.k_lo < rb2.k_hi);
    }

    #[test]
    fn regime_classification_consistent_with_bounds() {
        let hp = params_u(1.0);
        let rb = regime_bounds(&hp);
        for i in 0..40 {
            let k = 0.02 + i as f64 * 0.05;
            let case = classify_case(&physics_coefficients(&hp, k));
            let expected = if k < rb.k_lo {
                RegimeCase::I
            } else if k <= rb.k_hi {
                RegimeCase::II
            } else {
                RegimeCase::III
            };
            assert_eq!(case, expected, "k = {k}");
        }
    }

    #[test]
    fn growth_rate_reciprocals() {
        let mut rows = vec![ScanRow {
            k: 1.0,
            alpha1: 0.9,
            beta1: -0.9,
            regime: RegimeCase::III,
            entries: vec![
                ScanEntry { index: "-0".into(), lambda: -3.27535, zero_count: 0, sigma: None },
                ScanEntry { index: "0".into(), lambda: 14.4968, zero_count: 0, sigma: None },
            ],
            existence: None,
            sigma0: None,
            error: None,
        }];
        growth_rates(&mut rows, 1.0);
        let s0 = rows[0].entries[1].sigma.unwrap();
        assert_relative_eq!(s0, 1.0 / 14.4968, max_relative = 1e-12);
        assert_abs_diff_eq!(s0, 0.06898, epsilon = 1e-6);
        assert_relative_eq!(rows[0].sigma0.unwrap(), s0, max_relative = 1e-15);
        // negative eigenvalue -> negative (decaying) rate
        assert!(rows[0].entries[0].sigma.unwrap() < 0.0);
    }

    #[test]
    fn empty_scan() {
        let hp = params_u(1.0);
        assert!(scan(&hp, &[], 2, &SolverSettings::default()).is_empty());
    }

    #[test]
    fn scan_order_independence() {
        let hp = params_u(1.0);
        let settings = SolverSettings::with_tols(1e-8, 1e-10, 1e-9);
        let fwd = scan(&hp, &[1.0, 2.0], 0, &settings);
        let rev = scan(&hp, &[2.0, 1.0], 0, &settings);
        assert_eq!(fwd[0].k, rev[1].k);
        assert_eq!(
            fwd[0].entries.last().unwrap().lambda.to_bits(),
            rev[1].entries.last().unwrap().lambda.to_bits()
        );
    }
}
