//! Problem data model and the shooting solver for the initial value problem
//!
//! ```text
//! (p f')' - (q - lambda r) f = 0,   f(0) = 1,   p(0) f'(0) = alpha1*lambda + alpha2
//! ```
//!
//! integrated as a first-order system in (f, u) with u = p f' (so p is never
//! differentiated), plus a continuous Prüfer-type angle theta with
//! f = rho sin(theta), u = rho cos(theta). The angle increases through every
//! multiple of pi exactly at a zero of f (theta' = 1/p there), which makes the
//! interior zero count a winding number instead of a sign-sampling heuristic.

mod ode;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
pub use ode::Trajectory;
pub(crate) use ode::{integrate_sampled, integrate_with_init};

/// Number of points of the positivity validation grid used at construction.
const VALIDATION_GRID: usize = 257;

/// A real coefficient function of x, shareable across threads.
#[derive(Clone)]
pub struct CoeffFn(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl CoeffFn {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        CoeffFn(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        CoeffFn::new(move |_| c)
    }

    /// slope * x + intercept
    pub fn linear(slope: f64, intercept: f64) -> Self {
        CoeffFn::new(move |x| slope * x + intercept)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

impl fmt::Debug for CoeffFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CoeffFn(..)")
    }
}

/// Smoothness assumed of the coefficient functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Smoothness {
    C1,
    C2,
    Analytic,
}

/// The coefficient triple (p, q, r) on [0, L].
///
/// All three must be strictly positive on the domain; this is checked on a
/// grid of [`VALIDATION_GRID`] points at construction. `increasing_p`
/// additionally requests a monotonicity check of p on the same grid.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub p: CoeffFn,
    pub q: CoeffFn,
    pub r: CoeffFn,
    pub length: f64,
    pub smoothness: Smoothness,
    pub increasing_p: bool,
}

impl CoefficientSet {
    pub fn new(p: CoeffFn, q: CoeffFn, r: CoeffFn, length: f64) -> Self {
        CoefficientSet {
            p,
            q,
            r,
            length,
            smoothness: Smoothness::C1,
            increasing_p: false,
        }
    }

    pub fn with_increasing_p(mut self) -> Self {
        self.increasing_p = true;
        self
    }

    pub fn with_smoothness(mut self, s: Smoothness) -> Self {
        self.smoothness = s;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::Domain(format!(
                "domain length must be positive and finite, got {}",
                self.length
            )));
        }
        let n = VALIDATION_GRID;
        let mut prev_p = f64::NEG_INFINITY;
        for i in 0..n {
            let x = self.length * i as f64 / (n - 1) as f64;
            for (name, f) in [("p", &self.p), ("q", &self.q), ("r", &self.r)] {
                let v = f.eval(x);
                if !v.is_finite() {
                    return Err(Error::Evaluation { x });
                }
                if v <= 0.0 {
                    return Err(Error::Validation {
                        func: name,
                        x,
                        value: v,
                        requirement: "strict positivity on [0, L]",
                    });
                }
            }
            let pv = self.p.eval(x);
            if self.increasing_p && pv < prev_p {
                return Err(Error::Validation {
                    func: "p",
                    x,
                    value: pv,
                    requirement: "monotone non-decreasing (increasing-p flag)",
                });
            }
            prev_p = pv;
        }
        Ok(())
    }
}

/// The four boundary constants: p(0)f'(0) = (alpha1*lambda + alpha2) f(0),
/// p(L)f'(L) = (beta1*lambda - beta2) f(L). alpha2 and beta2 must be positive.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundaryParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl BoundaryParams {
    pub fn new(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        if !(alpha2 > 0.0) {
            return Err(Error::Domain(format!("alpha2 must be positive, got {alpha2}")));
        }
        if !(beta2 > 0.0) {
            return Err(Error::Domain(format!("beta2 must be positive, got {beta2}")));
        }
        for (name, v) in [("alpha1", alpha1), ("alpha2", alpha2), ("beta1", beta1), ("beta2", beta2)] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(BoundaryParams { alpha1, alpha2, beta1, beta2 })
    }
}

/// A validated problem instance: coefficients plus boundary constants.
#[derive(Debug, Clone)]
pub struct SLProblem {
    pub coefficients: CoefficientSet,
    pub boundary: BoundaryParams,
}

impl SLProblem {
    #[inline]
    pub fn length(&self) -> f64 {
        self.coefficients.length
    }
}

/// Validates coefficient positivity on the construction grid and assembles the
/// problem. Fails naming the offending function and abscissa.
pub fn make_problem(coeffs: CoefficientSet, bc: BoundaryParams) -> Result<SLProblem> {
    coeffs.validate()?;
    Ok(SLProblem {
        coefficients: coeffs,
        boundary: bc,
    })
}

/// Integration and root-refinement tolerances.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub root_tol: f64,
    pub max_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            root_tol: 1e-10,
            max_steps: 1_000_000,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.root_tol > 0.0) {
            return Err(Error::Domain("tolerances must be strictly positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Domain("max_steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_tols(rel: f64, abs: f64, root: f64) -> Self {
        SolverSettings {
            rel_tol: rel,
            abs_tol: abs,
            root_tol: root,
            ..Default::default()
        }
    }
}

/// Terminal data of one shot of the initial value problem.
///
/// `f_end` and `pfprime_end` carry a shared log-scale factor `log_scale`
/// (zero except when the state had to be rescaled to dodge overflow for very
/// negative lambda); the true values are `f_end * exp(log_scale)` etc. Signs
/// and the ratio `pfprime_end / f_end` are unaffected.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ShotResult {
    pub lambda: f64,
    pub f_end: f64,
    pub pfprime_end: f64,
    pub zero_count: usize,
    pub zeros: Vec<f64>,
    pub phase_end: f64,
    pub est_error: f64,
    pub log_scale: f64,
}

impl ShotResult {
    /// Terminal characteristic residual `u(L) - (beta1*lambda - beta2) f(L)`
    /// in the shot's internal scale.
    pub fn characteristic(&self, bc: &BoundaryParams) -> f64 {
        self.pfprime_end - (bc.beta1 * self.lambda - bc.beta2) * self.f_end
    }
}

/// Integrates the shooting system from 0 to L and reports terminal values,
/// all interior zeros (refined to `root_tol`), and the continuous phase.
pub fn shoot(problem: &SLProblem, lambda: f64, settings: &SolverSettings) -> Result<ShotResult> {
    ode::integrate(problem, lambda, settings, false).map(|(res, _)| res)
}

/// Like [`shoot`], additionally returning the dense trajectory for sampling.
pub fn shoot_trajectory(
    problem: &SLProblem,
    lambda: f64,
    settings: &SolverSettings,
) -> Result<(ShotResult, Trajectory)> {
    let (res, traj) = ode::integrate(problem, lambda, settings, true)?;
    Ok((res, traj.expect("trajectory requested")))
}

/// Samples (x, f, p f') of the normalized solution f(0) = 1 at the given
/// sorted grid abscissae. The integrator steps land on the nodes exactly, so
/// the sampled error field is smooth enough to difference.
pub fn eigenfunction_samples(
    problem: &SLProblem,
    lambda: f64,
    grid: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<(f64, f64, f64)>> {
    let length = problem.length();
    for w in grid.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Domain("sample grid must be sorted".into()));
        }
    }
    if let (Some(&first), Some(&last)) = (grid.first(), grid.last()) {
        if first < 0.0 || last > length {
            return Err(Error::Domain(format!(
                "sample grid must stay within [0, {length}]"
            )));
        }
    }
    let (_, samples) = integrate_sampled(problem, lambda, None, settings, grid)?;
    Ok(samples)
}

/// Number of interior zeros of f(.; lambda), from the continuous phase.
pub fn count_zeros(problem: &SLProblem, lambda: f64, settings: &SolverSettings) -> Result<usize> {
    shoot(problem, lambda, settings).map(|r| r.zero_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn unit_problem(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> SLProblem {
        let coeffs = CoefficientSet::new(
            CoeffFn::constant(1.0),
            CoeffFn::constant(1.0),
            CoeffFn::constant(1.0),
            1.0,
        );
        make_problem(coeffs, BoundaryParams::new(alpha1, alpha2, beta1, beta2).unwrap()).unwrap()
    }

    #[test]
    fn constant_coefficients_validate() {
        let p = unit_problem(1.0, 1.0, -1.0, 1.0);
        assert_eq!(p.boundary.alpha1, 1.0);
        assert_eq!(p.boundary.beta1, -1.0);
    }

    #[test]
    fn table1_row_k1_profile_is_valid() {
        // linear viscosity 8x + 1.1 on [0, 0.1] with the k = 1 boundary data
        let coeffs = CoefficientSet::new(
            CoeffFn::linear(8.0, 1.1),
            CoeffFn::new(|x| 8.0 * x + 1.1),
            CoeffFn::constant(8.0),
            0.1,
        )
        .with_increasing_p();
        let bc = BoundaryParams::new(0.9, 1.0, -0.9, 2.0).unwrap();
        let prob = make_problem(coeffs, bc).unwrap();
        assert_eq!(prob.boundary.alpha1, 0.9);
        assert_eq!(prob.boundary.beta1, -0.9);
    }

    #[test]
    fn sign_violation_is_reported_with_location() {
        let coeffs = CoefficientSet::new(
            CoeffFn::constant(1.0),
            CoeffFn::new(|x| x - 0.5),
            CoeffFn::constant(1.0),
            1.0,
        );
        let bc = BoundaryParams::new(1.0, 1.0, -1.0, 1.0).unwrap();
        match make_problem(coeffs, bc) {
            Err(Error::Validation { func, x, .. }) => {
                assert_eq!(func, "q");
                assert!(x < 0.5);
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn non_positive_length_rejected() {
        let coeffs = CoefficientSet::new(
            CoeffFn::constant(1.0),
            CoeffFn::constant(1.0),
            CoeffFn::constant(1.0),
            0.0,
        );
        let bc = BoundaryParams::new(1.0, 1.0, -1.0, 1.0).unwrap();
        assert!(matches!(make_problem(coeffs, bc), Err(Error::Domain(_))));
    }

    #[test]
    fn boundary_positivity_enforced() {
        assert!(BoundaryParams::new(1.0, 0.0, -1.0, 1.0).is_err());
        assert!(BoundaryParams::new(1.0, 1.0, -1.0, -2.0).is_err());
    }

    // q - lambda*r vanishes identically: (f')' = 0, so f = 1 + 2x.
    #[test]
    fn degenerate_linear_solution() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let res = shoot(&prob, 1.0, &SolverSettings::default()).unwrap();
        assert_relative_eq!(res.f_end, 3.0, max_relative = 1e-10);
        assert_relative_eq!(res.pfprime_end, 2.0, max_relative = 1e-10);
        assert_eq!(res.zero_count, 0);
        assert_eq!(res.log_scale, 0.0);
    }

    // lambda = 0: f'' = f with f(0) = 1, f'(0) = 1, i.e. f = exp(x).
    #[test]
    fn exponential_closed_form() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let res = shoot(&prob, 0.0, &SolverSettings::default()).unwrap();
        assert_relative_eq!(res.f_end, std::f64::consts::E, max_relative = 1e-10);
        assert_eq!(res.zero_count, 0);
    }

    #[test]
    fn samples_match_linear_solution() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let samples =
            eigenfunction_samples(&prob, 1.0, &grid, &SolverSettings::default()).unwrap();
        for (x, f, u) in samples {
            assert_abs_diff_eq!(f, 1.0 + 2.0 * x, epsilon = 1e-9);
            assert_abs_diff_eq!(u, 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn sample_at_origin_is_initial_condition() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let lambda = 3.7;
        let samples =
            eigenfunction_samples(&prob, lambda, &[0.0], &SolverSettings::default()).unwrap();
        assert_eq!(samples.len(), 1);
        assert_abs_diff_eq!(samples[0].1, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(samples[0].2, 1.0 * lambda + 1.0, epsilon = 1e-14);
    }

    // Oscillatory shot: f'' + (lambda - 1) f = 0 has closed form
    // cos(w x) + ((lambda+1)/w) sin(w x), w = sqrt(lambda - 1).
    #[test]
    fn oscillatory_zero_locations_match_closed_form() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let lambda = 200.0;
        let w = (lambda - 1.0f64).sqrt();
        let res = shoot(&prob, lambda, &SolverSettings::default()).unwrap();
        // zeros of A sin(w x + phi) with tan(phi) = w / (lambda + 1)
        let phi = (w / (lambda + 1.0)).atan();
        let mut expected = Vec::new();
        let mut k = 1;
        loop {
            let z = (k as f64 * std::f64::consts::PI - phi) / w;
            if z >= 1.0 {
                break;
            }
            expected.push(z);
            k += 1;
        }
        assert_eq!(res.zero_count, expected.len());
        for (z, e) in res.zeros.iter().zip(&expected) {
            assert_abs_diff_eq!(z, e, epsilon = 1e-8);
        }
        // closed-form terminal value
        let f_exact = w.mul_add(0.0, (w * 1.0).cos()) + (lambda + 1.0) / w * (w * 1.0).sin();
        assert_relative_eq!(res.f_end, f_exact, max_relative = 1e-8);
    }

    #[test]
    fn zeros_are_simple_and_sign_changing() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let settings = SolverSettings::default();
        let res = shoot(&prob, 500.0, &settings).unwrap();
        assert_eq!(res.zeros.len(), res.zero_count);
        let traj = shoot_trajectory(&prob, 500.0, &settings).unwrap().1;
        for &z in &res.zeros {
            assert!(z > 0.0 && z < 1.0);
            let (f, u) = traj.eval(z);
            // |f(z)| small relative to the local slope, and f' nonzero
            assert!(f.abs() <= 1e-6 * u.abs().max(1.0), "f({z}) = {f}");
            let (fl, _) = traj.eval(z - 1e-6);
            let (fr, _) = traj.eval(z + 1e-6);
            assert!(fl * fr < 0.0, "no sign change across {z}");
        }
    }

    #[test]
    fn zero_count_monotone_in_lambda() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let settings = SolverSettings::default();
        let mut prev = 0usize;
        // eta_0 for this problem sits near 9.1; start above it
        for i in 0..40 {
            let lambda = 15.0 + 60.0 * i as f64;
            let n = count_zeros(&prob, lambda, &settings).unwrap();
            assert!(n >= prev, "count dropped from {prev} to {n} at lambda = {lambda}");
            prev = n;
        }
    }

    #[test]
    fn first_zero_increases_below_eta_neg0() {
        // case iii constants problem: eta_{-0} = -(1/alpha1)(coth(L) + alpha2)
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let settings = SolverSettings::default();
        let eta_neg0 = -(1.0 / 1.0) * (1.0 / 1.0f64.tanh() + 1.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..12 {
            let lambda = eta_neg0 - 60.0 + 5.0 * i as f64;
            let res = shoot(&prob, lambda, &settings).unwrap();
            assert_eq!(res.zero_count, 1, "lambda = {lambda}");
            assert!(res.zeros[0] > prev, "z1 not increasing at lambda = {lambda}");
            prev = res.zeros[0];
        }
    }

    #[test]
    fn nth_zero_decreases_above_eta0() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let settings = SolverSettings::default();
        let mut prev = f64::INFINITY;
        for i in 0..10 {
            let lambda = 160.0 + 25.0 * i as f64;
            let res = shoot(&prob, lambda, &settings).unwrap();
            assert!(res.zero_count >= 3);
            let z3 = res.zeros[2];
            assert!(z3 < prev, "z3 not decreasing at lambda = {lambda}");
            prev = z3;
        }
    }

    #[test]
    fn tolerance_convergence() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let lambda = 137.0;
        let coarse = SolverSettings::with_tols(1e-8, 1e-10, 1e-10);
        let fine = SolverSettings::with_tols(5e-9, 1e-10, 1e-10);
        let a = shoot(&prob, lambda, &coarse).unwrap();
        let b = shoot(&prob, lambda, &fine).unwrap();
        assert!(
            (a.f_end - b.f_end).abs() < 10.0 * a.est_error.max(1e-14),
            "delta = {}, est = {}",
            (a.f_end - b.f_end).abs(),
            a.est_error
        );
    }

    #[test]
    fn deterministic_results() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let settings = SolverSettings::default();
        let a = shoot(&prob, 77.7, &settings).unwrap();
        let b = shoot(&prob, 77.7, &settings).unwrap();
        assert_eq!(a.f_end.to_bits(), b.f_end.to_bits());
        assert_eq!(a.pfprime_end.to_bits(), b.pfprime_end.to_bits());
        assert_eq!(a.zeros, b.zeros);
    }

    // Very negative lambda: the state is rescaled instead of overflowing.
    #[test]
    fn rescaling_keeps_ratio_finite() {
        let prob = unit_problem(1.0, 1.0, -1.0, 1.0);
        let res = shoot(&prob, -4.0e6, &SolverSettings::default()).unwrap();
        assert!(res.f_end.is_finite() && res.pfprime_end.is_finite());
        assert!(res.log_scale > 0.0);
        assert_eq!(res.zero_count, 1);
    }
}
