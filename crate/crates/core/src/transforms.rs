//! Factorization of the problem to an associated regular Sturm-Liouville
//! problem and the verifier suite built on it.
//!
//! With y0 the positive eigenfunction at the ground eigenvalue lambda0 > 0,
//! the map g = p f' - p f y0'/y0 sends solutions f(.; lambda) of the shot
//! system to solutions of the regular problem
//!
//! ```text
//! ((1/r) g')' - (q~ - lambda (1/p)) g = 0
//! g'(0) = -(r(0)/alpha1 + y0'(0)/y0(0)) g(0)
//! g'(L) = -(r(L)/beta1  + y0'(L)/y0(L)) g(L)
//! q~ = lambda0/p - (y0'/(r y0))' + (1/r)(y0'/y0)^2
//! ```
//!
//! whose lambda-free Robin rows make classical spectral theory applicable;
//! the inverse map w(x) = y0 (int_0^x g/(y0 p) + C) recovers eigenfunctions
//! of the original problem. Everything here is verified numerically: the
//! transformed functions are checked against the regular ODE by finite
//! differences on a sampling grid (an independent route, deliberately not the
//! algebraic identities used to build them).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::maybe_par_map;
use crate::slp::{
    self, eigenfunction_samples, BoundaryParams, CoeffFn, CoefficientSet, SLProblem,
    SolverSettings,
};
use crate::spectrum::{
    aux_spectrum, branches, char_lhs, full_spectrum, regular_robin_spectrum, verify_interlacing,
    Branch, BranchIndex, EigenvalueRecord, InterlacingReport, RegimeCase, RobinProblem,
};
use crate::util::{cumulative_integral, derivative_uniform, ls_slope, CubicSpline};

/// Sampling grid used by the transform layer (2^12 intervals).
pub const TRANSFORM_GRID: usize = 4097;

fn uniform_grid(length: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| length * i as f64 / (n - 1) as f64).collect()
}

/// Ground eigenpair data: lambda0 and the sampled positive eigenfunction.
#[derive(Debug, Clone)]
pub struct TransformContext {
    pub lambda0: f64,
    pub grid: Vec<f64>,
    pub y0: Vec<f64>,
    pub py0_prime: Vec<f64>,
}

impl TransformContext {
    /// Shoots at lambda0 and samples y0 on the uniform transform grid,
    /// checking strict positivity at every sample.
    pub fn new(problem: &SLProblem, lambda0: f64, settings: &SolverSettings) -> Result<Self> {
        let grid = uniform_grid(problem.length(), TRANSFORM_GRID);
        let samples = eigenfunction_samples(problem, lambda0, &grid, settings)?;
        let mut y0 = Vec::with_capacity(grid.len());
        let mut py0_prime = Vec::with_capacity(grid.len());
        for (x, f, u) in samples {
            if !(f > 0.0) {
                return Err(Error::Transform(format!(
                    "ground eigenfunction vanishes at x = {x} (y0 = {f})"
                )));
            }
            y0.push(f);
            py0_prime.push(u);
        }
        Ok(TransformContext { lambda0, grid, y0, py0_prime })
    }
}

/// Transformed function g and its first derivative on the shared grid.
#[derive(Debug, Clone)]
pub struct CrumDarboux {
    pub g: Vec<f64>,
    pub g_prime: Vec<f64>,
}

/// g = p f' - p f y0'/y0 on the context grid; the derivative comes from the
/// first-order identity g' = (lambda0 - lambda) r f - (y0'/y0) g.
pub fn crum_darboux(
    ctx: &TransformContext,
    problem: &SLProblem,
    lambda: f64,
    f_samples: &[(f64, f64, f64)],
) -> Result<CrumDarboux> {
    if f_samples.len() != ctx.grid.len() {
        return Err(Error::Domain(format!(
            "sample count {} does not match the transform grid {}",
            f_samples.len(),
            ctx.grid.len()
        )));
    }
    let n = ctx.grid.len();
    let mut g = Vec::with_capacity(n);
    let mut g_prime = Vec::with_capacity(n);
    for i in 0..n {
        let (x, f, u) = f_samples[i];
        if ctx.y0[i] <= 0.0 {
            return Err(Error::Transform(format!("y0 vanishes at sample x = {x}")));
        }
        let p = problem.coefficients.p.eval(x);
        let r = problem.coefficients.r.eval(x);
        let log_deriv = ctx.py0_prime[i] / (p * ctx.y0[i]); // y0'/y0
        let gi = u - f * ctx.py0_prime[i] / ctx.y0[i];
        g.push(gi);
        g_prime.push((ctx.lambda0 - lambda) * r * f - log_deriv * gi);
    }
    Ok(CrumDarboux { g, g_prime })
}

/// The associated regular problem: coefficients as evaluable functions (q~ is
/// a cubic spline through its grid samples; the outer derivative in q~ is the
/// only finite-difference ingredient) plus the lambda-free Robin constants.
#[derive(Debug, Clone)]
pub struct RegularSlp {
    pub p_t: CoeffFn,
    pub q_t: CoeffFn,
    pub r_t: CoeffFn,
    pub alpha_t: f64,
    pub beta_t: f64,
    pub length: f64,
    pub grid: Vec<f64>,
    pub q_samples: Vec<f64>,
}

pub fn build_regular_slp(ctx: &TransformContext, problem: &SLProblem) -> Result<RegularSlp> {
    let bc = &problem.boundary;
    if bc.alpha1 == 0.0 || bc.beta1 == 0.0 {
        return Err(Error::Regime(
            "the factorized regular problem needs alpha1 != 0 and beta1 != 0".into(),
        ));
    }
    let n = ctx.grid.len();
    let length = problem.length();
    let h = length / (n - 1) as f64;

    // w = y0'/(r y0); only its outer derivative is taken numerically
    let mut w = Vec::with_capacity(n);
    let mut log_deriv_sq_over_r = Vec::with_capacity(n);
    let mut lam0_over_p = Vec::with_capacity(n);
    for i in 0..n {
        let x = ctx.grid[i];
        let p = problem.coefficients.p.eval(x);
        let r = problem.coefficients.r.eval(x);
        let y0p = ctx.py0_prime[i] / p;
        w.push(y0p / (r * ctx.y0[i]));
        log_deriv_sq_over_r.push((y0p / ctx.y0[i]).powi(2) / r);
        lam0_over_p.push(ctx.lambda0 / p);
    }
    let w_prime = derivative_uniform(h, &w);
    let q_samples: Vec<f64> = (0..n)
        .map(|i| lam0_over_p[i] - w_prime[i] + log_deriv_sq_over_r[i])
        .collect();
    if q_samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Conditioning(
            "transformed potential has non-finite samples".into(),
        ));
    }
    let spline = CubicSpline::new(ctx.grid.clone(), q_samples.clone())?;
    let q_t = CoeffFn::new(move |x| spline.eval(x));
    let r_fn = problem.coefficients.r.clone();
    let p_fn = problem.coefficients.p.clone();
    let p_t = CoeffFn::new(move |x| 1.0 / r_fn.eval(x));
    let r_t = CoeffFn::new(move |x| 1.0 / p_fn.eval(x));

    let p0 = problem.coefficients.p.eval(0.0);
    let p_end = problem.coefficients.p.eval(length);
    let r0 = problem.coefficients.r.eval(0.0);
    let r_end = problem.coefficients.r.eval(length);
    let alpha_t = r0 / bc.alpha1 + ctx.py0_prime[0] / (p0 * ctx.y0[0]);
    let beta_t = r_end / bc.beta1 + ctx.py0_prime[n - 1] / (p_end * ctx.y0[n - 1]);
    Ok(RegularSlp {
        p_t,
        q_t,
        r_t,
        alpha_t,
        beta_t,
        length,
        grid: ctx.grid.clone(),
        q_samples,
    })
}

impl RegularSlp {
    fn coefficient_set(&self) -> CoefficientSet {
        CoefficientSet::new(
            self.p_t.clone(),
            self.q_t.clone(),
            self.r_t.clone(),
            self.length,
        )
    }

    fn as_slproblem(&self) -> SLProblem {
        // boundary slots unused by the explicit-init shots below
        SLProblem {
            coefficients: self.coefficient_set(),
            boundary: BoundaryParams { alpha1: 0.0, alpha2: 1.0, beta1: 0.0, beta2: 1.0 },
        }
    }
}

/// Eigenvalues of the regular problem by terminal-phase bisection.
pub fn regular_slp_spectrum(
    reg: &RegularSlp,
    n_max: usize,
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    let rp = RobinProblem {
        coefficients: reg.coefficient_set(),
        alpha: reg.alpha_t,
        beta: reg.beta_t,
    };
    regular_robin_spectrum(&rp, n_max, settings)
}

/// Samples of the regular problem's solution normalized g(0) = 1,
/// g'(0) = -alpha_t, on the transform grid: (g, p_t g').
pub fn regular_eigenfunction_samples(
    reg: &RegularSlp,
    lambda: f64,
    settings: &SolverSettings,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let problem = reg.as_slproblem();
    let p0 = reg.p_t.eval(0.0);
    let (_, samples) = slp::integrate_sampled(
        &problem,
        lambda,
        Some([1.0, -p0 * reg.alpha_t]),
        settings,
        &reg.grid,
    )?;
    let g = samples.iter().map(|s| s.1).collect();
    let v = samples.iter().map(|s| s.2).collect();
    Ok((g, v))
}

/// Pointwise residual of the regular ODE on sampled g, with both derivatives
/// taken by finite differences (the independent check route), normalized by
/// the sup of the equation's terms over the grid (a pointwise-local scale
/// degenerates to 0/0 at the zeros of g). Endpoint stencils are one-sided.
pub fn regular_residual(reg: &RegularSlp, lambda: f64, g: &[f64]) -> Result<Vec<f64>> {
    let n = reg.grid.len();
    if g.len() != n {
        return Err(Error::Domain("sample count does not match the transform grid".into()));
    }
    let h = reg.length / (n - 1) as f64;
    let g_prime = derivative_uniform(h, g);
    let flux: Vec<f64> = (0..n)
        .map(|i| reg.p_t.eval(reg.grid[i]) * g_prime[i])
        .collect();
    let flux_prime = derivative_uniform(h, &flux);
    let mut raw = Vec::with_capacity(n);
    let mut scale = f64::MIN_POSITIVE;
    for i in 0..n {
        let x = reg.grid[i];
        let t1 = flux_prime[i];
        let t2 = (reg.q_samples[i] - lambda * reg.r_t.eval(x)) * g[i];
        scale = scale.max(t1.abs()).max(t2.abs());
        raw.push(t1 - t2);
    }
    Ok(raw.into_iter().map(|r| r.abs() / scale).collect())
}

/// Liouville normal form of a regular problem: with P = (r~/p~)^(1/2),
/// G = (p~ r~)^(-1/4), t = int_0^x P, g = G z, the equation becomes
/// z'' + (lambda - Q(t)) z = 0 on [0, t1] with Q = q~/r~ - R.
#[derive(Debug, Clone, Serialize)]
pub struct LiouvilleForm {
    pub t1: f64,
    pub t_grid: Vec<f64>,
    pub potential: Vec<f64>,
    /// Robin constants of the normalized rows z'(0) = -a z(0), z'(t1) = -b z(t1).
    pub robin: (f64, f64),
}

pub fn liouville_normalize(reg: &RegularSlp) -> Result<LiouvilleForm> {
    let n = reg.grid.len();
    let h = reg.length / (n - 1) as f64;
    let mut p_vals = Vec::with_capacity(n);
    let mut r_vals = Vec::with_capacity(n);
    for &x in &reg.grid {
        let pv = reg.p_t.eval(x);
        let rv = reg.r_t.eval(x);
        if !(pv > 0.0 && rv > 0.0) {
            return Err(Error::Validation {
                func: "p~/r~",
                x,
                value: pv.min(rv),
                requirement: "positivity for the Liouville change of variable",
            });
        }
        p_vals.push(pv);
        r_vals.push(rv);
    }
    let integrand: Vec<f64> = (0..n).map(|i| (r_vals[i] / p_vals[i]).sqrt()).collect();
    let t_grid = cumulative_integral(h, &integrand);
    let t1 = *t_grid.last().unwrap();

    let g_fn: Vec<f64> = (0..n).map(|i| (p_vals[i] * r_vals[i]).powf(-0.25)).collect();
    let g_prime = derivative_uniform(h, &g_fn);
    let flux: Vec<f64> = (0..n).map(|i| p_vals[i] * g_prime[i]).collect();
    let flux_prime = derivative_uniform(h, &flux);
    let mut potential = Vec::with_capacity(n);
    for i in 0..n {
        let r_big = p_vals[i].powf(0.25) * r_vals[i].powf(-0.75) * flux_prime[i];
        let q = reg.q_samples[i] / r_vals[i] - r_big;
        if !q.is_finite() {
            return Err(Error::Conditioning(format!(
                "normal-form potential non-finite at x = {}",
                reg.grid[i]
            )));
        }
        potential.push(q);
    }
    let a = (reg.alpha_t + g_prime[0] / g_fn[0]) / integrand[0];
    let b = (reg.beta_t + g_prime[n - 1] / g_fn[n - 1]) / integrand[n - 1];
    Ok(LiouvilleForm { t1, t_grid, potential, robin: (a, b) })
}

/// Mode-indexed asymptotic residuals. The mode number of an eigenvalue is its
/// nodal-domain count (interior zeros + 1): the n-th mode of a problem with
/// Dirichlet-like large-lambda phases at both ends satisfies
/// sqrt(lambda) = n pi / L + O(1/n).
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub modes: Vec<usize>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub slope: f64,
}

pub fn asymptotic_check(
    records: &[EigenvalueRecord],
    length: f64,
    mode_lo: usize,
    mode_hi: usize,
) -> Result<AsymptoticReport> {
    let pi = std::f64::consts::PI;
    let mut modes = Vec::new();
    let mut residuals = Vec::new();
    for mode in mode_lo..=mode_hi {
        let rec = records
            .iter()
            .find(|r| matches!(r.index, BranchIndex::NonNeg(z) if z + 1 == mode))
            .ok_or_else(|| Error::Domain(format!("no eigenvalue with mode number {mode}")))?;
        if rec.lambda <= 0.0 {
            return Err(Error::Domain(format!(
                "asymptotic check needs positive eigenvalues, got {}",
                rec.lambda
            )));
        }
        let m = mode as f64;
        modes.push(mode);
        residuals.push(m * (rec.lambda.sqrt() - m * pi / length).abs());
    }
    let xs: Vec<f64> = modes.iter().map(|&m| m as f64).collect();
    let slope = if modes.len() >= 2 { ls_slope(&xs, &residuals) } else { 0.0 };
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(AsymptoticReport { modes, residuals, max_residual, slope })
}

/// Same residuals for an explicit (mode, lambda) ladder; used for synthetic
/// sanity inputs.
pub fn asymptotic_check_modes(modes: &[(usize, f64)], length: f64) -> AsymptoticReport {
    let pi = std::f64::consts::PI;
    let mut ms = Vec::new();
    let mut residuals = Vec::new();
    for &(mode, lambda) in modes {
        let m = mode as f64;
        ms.push(mode);
        residuals.push(m * (lambda.max(0.0).sqrt() - m * pi / length).abs());
    }
    let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let slope = if ms.len() >= 2 { ls_slope(&xs, &residuals) } else { 0.0 };
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    AsymptoticReport { modes: ms, residuals, max_residual, slope }
}

/// Zero-separation verdicts between the eigenfunctions at two consecutive
/// positive eigenvalues (zeros_lo from the lower one).
#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    /// each consecutive pair of lower-eigenfunction zeros encloses >= 1 upper zero
    pub enclosing: Vec<(f64, f64, usize, bool)>,
    /// each consecutive pair of upper-eigenfunction zeros encloses exactly one lower zero
    pub unique: Vec<(f64, f64, usize, bool)>,
    pub ok: bool,
}

pub fn separation_check(zeros_lo: &[f64], zeros_hi: &[f64], tol: f64) -> SeparationReport {
    let count_in = |zs: &[f64], a: f64, b: f64| {
        zs.iter().filter(|&&z| z > a - tol && z < b + tol).count()
    };
    let mut enclosing = Vec::new();
    let mut unique = Vec::new();
    let mut ok = true;
    for w in zeros_lo.windows(2) {
        let c = count_in(zeros_hi, w[0], w[1]);
        let pair_ok = c >= 1;
        ok &= pair_ok;
        enclosing.push((w[0], w[1], c, pair_ok));
    }
    for w in zeros_hi.windows(2) {
        // strict interior for uniqueness
        let c = zeros_lo
            .iter()
            .filter(|&&z| z > w[0] + tol && z < w[1] - tol)
            .count();
        let pair_ok = c == 1;
        ok &= pair_ok;
        unique.push((w[0], w[1], c, pair_ok));
    }
    SeparationReport { enclosing, unique, ok }
}

/// Inverse-map output with its boundary-row and ODE residual certificates.
#[derive(Debug, Clone, Serialize)]
pub struct InverseMapReport {
    pub lambda: f64,
    pub w: Vec<f64>,
    pub robin_left_residual: f64,
    pub robin_right_residual: f64,
    pub ode_max_residual: f64,
}

/// Reconstructs an eigenfunction of the original problem from a regular
/// eigenpair: w = y0 (int_0^x g/(y0 p) + C), with C fixed so that
/// (lambda0 - lambda) r(0) w(0) = g'(0) + (y0'(0)/y0(0)) g(0), where
/// g'(0) = -alpha_t g(0) by the regular Robin row.
pub fn inverse_map(
    reg: &RegularSlp,
    ctx: &TransformContext,
    problem: &SLProblem,
    lambda: f64,
    g: &[f64],
) -> Result<InverseMapReport> {
    let n = ctx.grid.len();
    if g.len() != n {
        return Err(Error::Domain("g sample count does not match the transform grid".into()));
    }
    if lambda == ctx.lambda0 {
        return Err(Error::Regime(
            "inverse map undefined at the ground eigenvalue (C-fixing divides by lambda0 - lambda)"
                .into(),
        ));
    }
    let coeffs = &problem.coefficients;
    let h = problem.length() / (n - 1) as f64;
    let integrand: Vec<f64> = (0..n)
        .map(|i| g[i] / (ctx.y0[i] * coeffs.p.eval(ctx.grid[i])))
        .collect();
    let cum = cumulative_integral(h, &integrand);

    let p0 = coeffs.p.eval(0.0);
    let r0 = coeffs.r.eval(0.0);
    let log_deriv0 = ctx.py0_prime[0] / (p0 * ctx.y0[0]);
    let g_prime0 = -reg.alpha_t * g[0];
    let w0 = (g_prime0 + log_deriv0 * g[0]) / (r0 * (ctx.lambda0 - lambda));
    let c = w0 / ctx.y0[0];
    let w: Vec<f64> = (0..n).map(|i| ctx.y0[i] * (cum[i] + c)).collect();

    // certificates: Robin rows and the FD residual of the original ODE
    // p w' = p y0' (cum + C) + g
    let pw_prime: Vec<f64> = (0..n)
        .map(|i| ctx.py0_prime[i] * (cum[i] + c) + g[i])
        .collect();
    let bc = &problem.boundary;
    let left = pw_prime[0] - (bc.alpha1 * lambda + bc.alpha2) * w[0];
    let right = pw_prime[n - 1] - (bc.beta1 * lambda - bc.beta2) * w[n - 1];
    let left_scale = pw_prime[0].abs().max(((bc.alpha1 * lambda + bc.alpha2) * w[0]).abs());
    let right_scale = pw_prime[n - 1]
        .abs()
        .max(((bc.beta1 * lambda - bc.beta2) * w[n - 1]).abs());

    let w_prime_fd = derivative_uniform(h, &w);
    let flux: Vec<f64> = (0..n)
        .map(|i| coeffs.p.eval(ctx.grid[i]) * w_prime_fd[i])
        .collect();
    let flux_prime = derivative_uniform(h, &flux);
    let mut raw = Vec::with_capacity(n);
    let mut scale = f64::MIN_POSITIVE;
    for i in 2..n - 2 {
        let x = ctx.grid[i];
        let t1 = flux_prime[i];
        let t2 = (coeffs.q.eval(x) - lambda * coeffs.r.eval(x)) * w[i];
        scale = scale.max(t1.abs()).max(t2.abs());
        raw.push(t1 - t2);
    }
    let ode_max = raw.iter().map(|r| r.abs() / scale).fold(0.0, f64::max);
    Ok(InverseMapReport {
        lambda,
        w,
        robin_left_residual: left.abs() / left_scale.max(f64::MIN_POSITIVE),
        robin_right_residual: right.abs() / right_scale.max(f64::MIN_POSITIVE),
        ode_max_residual: ode_max,
    })
}

/// Strict-decrease probe of the characteristic ratio on a bounded branch.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub branch: String,
    pub values: Vec<(f64, f64)>,
    pub strictly_decreasing: bool,
}

pub fn monotonicity_probe(
    problem: &SLProblem,
    branch: &Branch,
    n_probe: usize,
    settings: &SolverSettings,
) -> Result<MonotonicityReport> {
    if branch.lo == f64::NEG_INFINITY || !branch.lo.is_finite() {
        return Err(Error::Domain("monotonicity probe needs a bounded branch".into()));
    }
    if n_probe < 2 {
        return Err(Error::Domain("need at least two probe points".into()));
    }
    let width = branch.hi - branch.lo;
    let mut values = Vec::with_capacity(n_probe);
    for i in 0..n_probe {
        let lam = branch.lo + width * (i + 1) as f64 / (n_probe + 1) as f64;
        if lam == 0.0 {
            continue;
        }
        values.push((lam, char_lhs(problem, lam, settings)?));
    }
    let strictly_decreasing = values.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(MonotonicityReport {
        branch: branch.index.to_string(),
        values,
        strictly_decreasing,
    })
}

/// Aggregate verification report over one problem instance.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub regime: RegimeCase,
    pub spectrum: Vec<(String, f64, usize)>,
    pub interlacing: InterlacingReport,
    pub monotonicity: Vec<MonotonicityReport>,
    pub separation: Option<SeparationReport>,
    pub crum_darboux_max_residual: Option<f64>,
    pub regular_spectrum: Vec<f64>,
    /// (regular eigenvalue, matching original eigenvalue, relative difference)
    pub regular_vs_original: Vec<(f64, f64, f64)>,
    pub inverse_map_deviation: Option<f64>,
    pub inverse_map_robin_residuals: Option<(f64, f64)>,
    pub liouville_t1: Option<f64>,
    pub asymptotic: Option<AsymptoticReport>,
    pub ok: bool,
}

/// Runs the whole verifier suite: spectrum + interlacing, monotonicity probes,
/// zero separation, the factorization residual and spectrum relation, the
/// inverse map recovery, the Liouville length, and the mode asymptotics.
/// Thresholds: factorization residual 1e-6, inverse-map recovery 1e-5,
/// separation zero tolerance 1e-8, monotonicity zero violations.
pub fn verify_suite(
    problem: &SLProblem,
    n_max: usize,
    settings: &SolverSettings,
) -> Result<VerifyReport> {
    let regime = crate::spectrum::classify_case(&problem.boundary);
    let n_max = n_max.max(2);
    let aux = aux_spectrum(problem, n_max, settings)?;
    let records = full_spectrum(problem, n_max, settings)?;
    let interlacing = verify_interlacing(&records, &aux);
    let mut ok = interlacing.ok;

    let spectrum_list: Vec<(String, f64, usize)> = records
        .iter()
        .map(|r| (r.index.to_string(), r.lambda, r.zero_count))
        .collect();

    // monotonicity on every bounded branch up to index 1
    let probes: Vec<Branch> = branches(&aux, n_max.min(1))
        .into_iter()
        .filter(|b| b.lo.is_finite())
        .collect();
    let monotonicity: Vec<MonotonicityReport> = maybe_par_map(&probes, |b| {
        monotonicity_probe(problem, b, 50, settings)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    ok &= monotonicity.iter().all(|m| m.strictly_decreasing);

    // separation between the two highest positive modes available
    let pos: Vec<&EigenvalueRecord> = records
        .iter()
        .filter(|r| matches!(r.index, BranchIndex::NonNeg(_)))
        .collect();
    let separation = if pos.len() >= 2 {
        let lo = pos[pos.len() - 2];
        let hi = pos[pos.len() - 1];
        let z_lo = slp::shoot(problem, lo.lambda, settings)?.zeros;
        let z_hi = slp::shoot(problem, hi.lambda, settings)?.zeros;
        let rep = separation_check(&z_lo, &z_hi, 1e-8);
        ok &= rep.ok;
        Some(rep)
    } else {
        None
    };

    // factorization layer needs the ground eigenvalue and nonzero alpha1/beta1
    let ground = pos.iter().find(|r| r.zero_count == 0).map(|r| r.lambda);
    let mut crum_darboux_max_residual = None;
    let mut regular_spectrum = Vec::new();
    let mut regular_vs_original = Vec::new();
    let mut inverse_map_deviation = None;
    let mut inverse_map_robin_residuals = None;
    let mut liouville_t1 = None;
    if let Some(lambda0) = ground {
        if problem.boundary.alpha1 != 0.0 && problem.boundary.beta1 != 0.0 {
            let ctx = TransformContext::new(problem, lambda0, settings)?;
            let reg = build_regular_slp(&ctx, problem)?;

            // transformed eigenfunctions must satisfy the regular ODE
            let mut cd_max = 0.0f64;
            for rec in pos.iter().filter(|r| r.lambda != lambda0) {
                let samples =
                    eigenfunction_samples(problem, rec.lambda, &ctx.grid, settings)?;
                let cd = crum_darboux(&ctx, problem, rec.lambda, &samples)?;
                let res = regular_residual(&reg, rec.lambda, &cd.g)?;
                let interior_max = res[2..res.len() - 2].iter().cloned().fold(0.0, f64::max);
                cd_max = cd_max.max(interior_max);
            }
            crum_darboux_max_residual = Some(cd_max);
            ok &= cd_max < 1e-6;

            // almost-isospectrality: every regular eigenvalue is an original one
            let reg_eigs = regular_slp_spectrum(&reg, pos.len().saturating_sub(1), settings)?;
            for &le in &reg_eigs {
                let (best, diff) = records
                    .iter()
                    .map(|r| (r.lambda, (r.lambda - le).abs() / le.abs().max(1.0)))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                regular_vs_original.push((le, best, diff));
            }
            regular_spectrum = reg_eigs.clone();
            ok &= regular_vs_original.iter().all(|(_, _, d)| *d < 1e-3);

            // inverse map: recover the first excited eigenfunction
            if let Some(target) = pos.iter().find(|r| r.zero_count == 1) {
                if let Some(&lam_reg) = reg_eigs
                    .iter()
                    .find(|&&le| (le - target.lambda).abs() / target.lambda.abs() < 1e-3)
                {
                    let (g, _) = regular_eigenfunction_samples(&reg, lam_reg, settings)?;
                    let inv = inverse_map(&reg, &ctx, problem, lam_reg, &g)?;
                    let direct =
                        eigenfunction_samples(problem, target.lambda, &ctx.grid, settings)?;
                    // least-squares scale (pointwise ratios degenerate at the
                    // eigenfunction's zeros)
                    let num: f64 = inv.w.iter().zip(&direct).map(|(w, s)| w * s.1).sum();
                    let den: f64 = direct.iter().map(|s| s.1 * s.1).sum();
                    let scale = num / den;
                    let fmax = direct.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
                    let dev = inv
                        .w
                        .iter()
                        .zip(&direct)
                        .map(|(w, s)| (w - scale * s.1).abs())
                        .fold(0.0, f64::max)
                        / (scale.abs() * fmax);
                    inverse_map_deviation = Some(dev);
                    inverse_map_robin_residuals =
                        Some((inv.robin_left_residual, inv.robin_right_residual));
                    ok &= dev < 1e-5;
                }
            }

            let liouville = liouville_normalize(&reg)?;
            liouville_t1 = Some(liouville.t1);
        }
    }

    // asymptotics over whatever contiguous mode range is available
    let max_mode = pos.iter().map(|r| r.zero_count + 1).max().unwrap_or(0);
    let asymptotic = if max_mode >= 3 {
        Some(asymptotic_check(&records, problem.length(), 2, max_mode)?)
    } else {
        None
    };

    Ok(VerifyReport {
        regime,
        spectrum: spectrum_list,
        interlacing,
        monotonicity,
        separation,
        crum_darboux_max_residual,
        regular_spectrum,
        regular_vs_original,
        inverse_map_deviation,
        inverse_map_robin_residuals,
        liouville_t1,
        asymptotic,
        ok,
    })
}
