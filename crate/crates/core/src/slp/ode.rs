//! Dormand-Prince 5(4) with the classic 4th-order continuous extension,
//! specialized to the shooting system (f, u = p f', theta).
//!
//! theta is the continuous Prüfer-type angle of (f, u). It satisfies
//! theta' = (u^2/p - (q - lambda r) f^2) / (f^2 + u^2), which equals 1/p > 0
//! whenever f = 0, so theta crosses every multiple of pi upward exactly once
//! per zero of f. Zeros are detected as those crossings inside each accepted
//! step and refined by bisection on the dense output of f.
//!
//! The ODE is linear in (f, u); when the state grows past 1e150 (deep
//! non-oscillatory regime, lambda << 0) it is rescaled and the factor is
//! accumulated in log space.

use std::f64::consts::PI;

use super::{SLProblem, ShotResult, SolverSettings};
use crate::error::{Error, Result};

const N: usize = 3;

// Butcher tableau, Dormand & Prince 1980.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// b(5th) - b_hat(4th)
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// weights of the 5th-order dense-output correction term
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const RESCALE_LIMIT: f64 = 1e150;

/// One accepted step with its interpolation polynomial.
#[derive(Debug, Clone)]
struct DenseStep {
    x0: f64,
    h: f64,
    rcont: [[f64; N]; 5],
    log_scale: f64,
}

impl DenseStep {
    fn eval(&self, x: f64) -> [f64; N] {
        let s = ((x - self.x0) / self.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let mut y = [0.0; N];
        for i in 0..N {
            let r = &self.rcont;
            y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        y
    }
}

/// Dense trajectory of a shot; evaluable at any x in [0, L].
#[derive(Debug, Clone)]
pub struct Trajectory {
    steps: Vec<DenseStep>,
    length: f64,
}

impl Trajectory {
    /// (f, p f') at x, in true (descaled) units.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let step = self.locate(x);
        let y = step.eval(x);
        let s = step.log_scale.exp();
        (y[0] * s, y[1] * s)
    }

    /// Continuous phase at x.
    pub fn phase(&self, x: f64) -> f64 {
        self.locate(x).eval(x)[2]
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    fn locate(&self, x: f64) -> &DenseStep {
        let i = self
            .steps
            .partition_point(|s| s.x0 + s.h < x)
            .min(self.steps.len() - 1);
        &self.steps[i]
    }
}

struct Rhs<'a> {
    problem: &'a SLProblem,
    lambda: f64,
}

impl Rhs<'_> {
    #[inline]
    fn eval(&self, x: f64, y: &[f64; N]) -> Result<[f64; N]> {
        let p = self.problem.coefficients.p.eval(x);
        let q = self.problem.coefficients.q.eval(x);
        let r = self.problem.coefficients.r.eval(x);
        if !(p.is_finite() && q.is_finite() && r.is_finite()) || p == 0.0 {
            return Err(Error::Evaluation { x });
        }
        let (f, u) = (y[0], y[1]);
        let w = q - self.lambda * r;
        let n2 = f * f + u * u;
        let dtheta = if n2 > 0.0 { (u * u / p - w * f * f) / n2 } else { 0.0 };
        Ok([u / p, w * f, dtheta])
    }
}

fn err_norm(e: &[f64; N], y0: &[f64; N], y1: &[f64; N], settings: &SolverSettings) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sc = settings.abs_tol + settings.rel_tol * y0[i].abs().max(y1[i].abs());
        let q = e[i] / sc;
        s += q * q;
    }
    (s / N as f64).sqrt()
}

/// Initial step size, simplified from the usual starting-step estimate.
fn initial_step(rhs: &Rhs, y0: &[f64; N], settings: &SolverSettings, length: f64) -> Result<f64> {
    let f0 = rhs.eval(0.0, y0)?;
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..N {
        let sc = settings.abs_tol + settings.rel_tol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let (d0, d1) = (d0.sqrt(), d1.sqrt());
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * length
    } else {
        0.01 * d0 / d1
    };
    Ok(h0.min(length / 10.0).max(1e-12 * length))
}

pub(super) fn integrate(
    problem: &SLProblem,
    lambda: f64,
    settings: &SolverSettings,
    keep_trajectory: bool,
) -> Result<(ShotResult, Option<Trajectory>)> {
    settings.validate()?;
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be finite, got {lambda}")));
    }
    let length = problem.length();
    let bc = &problem.boundary;
    let rhs = Rhs { problem, lambda };

    let u0 = bc.alpha1 * lambda + bc.alpha2;
    let mut y = [1.0, u0, f64::atan2(1.0, u0)];
    integrate_from(rhs, &mut y, settings, length, keep_trajectory, lambda, &[])
        .map(|(res, traj, _)| (res, traj))
}

/// Shared driver; also used for alternative left boundary data (e.g. the
/// Dirichlet sub-auxiliary shot f(0) = 0, u(0) = 1).
pub(crate) fn integrate_with_init(
    problem: &SLProblem,
    lambda: f64,
    init: [f64; 2],
    settings: &SolverSettings,
    keep_trajectory: bool,
) -> Result<(ShotResult, Option<Trajectory>)> {
    settings.validate()?;
    let rhs = Rhs { problem, lambda };
    let theta0 = f64::atan2(init[0], init[1]);
    let mut y = [init[0], init[1], theta0];
    integrate_from(rhs, &mut y, settings, problem.length(), keep_trajectory, lambda, &[])
        .map(|(res, traj, _)| (res, traj))
}

/// Integration with forced steps onto the sorted sample abscissae, returning
/// (x, f, p f') at each. Landing on the nodes exactly (instead of evaluating
/// the dense interpolant between accepted steps) keeps the sampled error
/// field smooth, which matters when callers difference the samples.
pub(crate) fn integrate_sampled(
    problem: &SLProblem,
    lambda: f64,
    init: Option<[f64; 2]>,
    settings: &SolverSettings,
    sample_at: &[f64],
) -> Result<(ShotResult, Vec<(f64, f64, f64)>)> {
    settings.validate()?;
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be finite, got {lambda}")));
    }
    let bc = &problem.boundary;
    let init = init.unwrap_or([1.0, bc.alpha1 * lambda + bc.alpha2]);
    let rhs = Rhs { problem, lambda };
    let mut y = [init[0], init[1], f64::atan2(init[0], init[1])];
    let (res, _, samples) = integrate_from(
        rhs,
        &mut y,
        settings,
        problem.length(),
        false,
        lambda,
        sample_at,
    )?;
    Ok((res, samples))
}

#[allow(clippy::too_many_arguments)]
fn integrate_from(
    rhs: Rhs,
    y: &mut [f64; N],
    settings: &SolverSettings,
    length: f64,
    keep_trajectory: bool,
    lambda: f64,
    sample_at: &[f64],
) -> Result<(ShotResult, Option<Trajectory>, Vec<(f64, f64, f64)>)> {
    let mut x = 0.0;
    let mut log_scale = 0.0f64;
    let mut est_error = 0.0f64;
    let mut zeros: Vec<f64> = Vec::new();
    let mut steps: Vec<DenseStep> = Vec::new();
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(sample_at.len());
    let mut next_sample = 0usize;
    // targets at (or before) the start are served by the initial state
    while next_sample < sample_at.len() && sample_at[next_sample] <= x {
        samples.push((sample_at[next_sample], y[0], y[1]));
        next_sample += 1;
    }

    let mut k = [[0.0; N]; 7];
    k[0] = rhs.eval(x, y)?;
    let mut h_suggest = initial_step(&rhs, y, settings, length)?;
    let mut nsteps = 0usize;
    let mut last_rejected = false;

    while x < length {
        if nsteps >= settings.max_steps {
            return Err(Error::Integration { reached: x, max_steps: settings.max_steps });
        }
        nsteps += 1;
        let mut h = h_suggest;
        if x + h > length {
            h = length - x;
        }
        if next_sample < sample_at.len() {
            let t = sample_at[next_sample];
            if t > x && x + h > t {
                h = t - x;
            }
        }
        if h <= f64::EPSILON * length.max(x.abs()) {
            return Err(Error::Integration { reached: x, max_steps: settings.max_steps });
        }

        // stages
        let mut failed = false;
        for s in 1..7 {
            let mut ys = *y;
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ys[i] += h * acc;
            }
            match rhs.eval(x + C[s] * h, &ys) {
                Ok(v) => k[s] = v,
                Err(_) => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            h_suggest = 0.25 * h;
            continue;
        }
        // 5th-order solution is stage 7's argument (FSAL)
        let mut y1 = *y;
        for i in 0..N {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                acc += A[6][j] * kj[i];
            }
            y1[i] += h * acc;
        }
        let k7 = match rhs.eval(x + h, &y1) {
            Ok(v) => v,
            Err(_) => {
                h_suggest = 0.25 * h;
                continue;
            }
        };
        k[6] = k7;

        let mut e = [0.0; N];
        for i in 0..N {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += E[j] * kj[i];
            }
            e[i] = h * acc;
        }
        let err = err_norm(&e, y, &y1, settings);
        if !err.is_finite() {
            return Err(Error::Evaluation { x });
        }

        if err > 1.0 {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h_suggest = h * fac;
            last_rejected = true;
            continue;
        }

        // accepted: build the dense polynomial for this step
        let mut rcont = [[0.0; N]; 5];
        for i in 0..N {
            let dy = y1[i] - y[i];
            rcont[0][i] = y[i];
            rcont[1][i] = dy;
            rcont[2][i] = h * k[0][i] - dy;
            rcont[3][i] = dy - h * k7[i] - rcont[2][i];
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += D[j] * kj[i];
            }
            rcont[4][i] = h * acc;
        }
        let step = DenseStep { x0: x, h, rcont, log_scale };

        // zero events: theta crossing multiples of pi inside this step
        let (t0, t1) = (y[2], y1[2]);
        let k_lo = (t0 / PI).floor() as i64 + 1;
        let k_hi = (t1 / PI).floor() as i64;
        for kk in k_lo..=k_hi {
            let target = kk as f64 * PI;
            if let Some(z) = refine_zero(&step, target, settings) {
                if z > 0.0 && z < length {
                    zeros.push(z);
                }
            }
        }

        est_error += (e[0] * e[0] + e[1] * e[1]).sqrt();
        x += h;
        *y = y1;
        // re-anchor the angle to its exact branch to kill integration drift
        let atv = f64::atan2(y[0], y[1]);
        y[2] = atv + 2.0 * PI * ((y[2] - atv) / (2.0 * PI)).round();

        if keep_trajectory {
            steps.push(step);
        }

        // serve sample targets reached by this step
        while next_sample < sample_at.len()
            && sample_at[next_sample] <= x + f64::EPSILON * length
        {
            let sc = log_scale.exp();
            samples.push((sample_at[next_sample], y[0] * sc, y[1] * sc));
            next_sample += 1;
        }

        // rescale the linear part of the state if it grew too large
        let m = y[0].abs().max(y[1].abs());
        if m > RESCALE_LIMIT {
            y[0] /= m;
            y[1] /= m;
            k[6][0] /= m;
            k[6][1] /= m;
            log_scale += m.ln();
        }
        k[0] = k[6]; // FSAL

        if !last_rejected {
            let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h_suggest = h * fac;
        } else {
            h_suggest = h;
        }
        last_rejected = false;
    }

    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
    zeros.dedup_by(|a, b| (*a - *b).abs() < settings.root_tol);
    let result = ShotResult {
        lambda,
        f_end: y[0],
        pfprime_end: y[1],
        zero_count: zeros.len(),
        zeros,
        phase_end: y[2],
        est_error,
        log_scale,
    };
    let traj = keep_trajectory.then_some(Trajectory { steps, length });
    Ok((result, traj, samples))
}

/// Locates the zero of f inside `step` associated with the phase crossing
/// theta = target: first bisect the dense phase, then polish on the dense f.
fn refine_zero(step: &DenseStep, target: f64, settings: &SolverSettings) -> Option<f64> {
    let (mut a, mut b) = (step.x0, step.x0 + step.h);
    let ta = step.eval(a)[2] - target;
    let tb = step.eval(b)[2] - target;
    if ta > 0.0 || tb < 0.0 {
        // crossing sits on a step boundary within rounding; take the endpoint
        return Some(if ta > 0.0 { a } else { b });
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if step.eval(m)[2] - target <= 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a <= 0.25 * settings.root_tol {
            break;
        }
    }
    let z = 0.5 * (a + b);

    // polish on f itself: bracket a sign change around z
    let mut w = (b - a).max(step.h * 1e-6);
    for _ in 0..30 {
        let lo = (z - w).max(step.x0);
        let hi = (z + w).min(step.x0 + step.h);
        let flo = step.eval(lo)[0];
        let fhi = step.eval(hi)[0];
        if flo == 0.0 {
            return Some(lo);
        }
        if fhi == 0.0 {
            return Some(hi);
        }
        if flo.signum() != fhi.signum() {
            let (mut a, mut b, fa) = (lo, hi, flo);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let fm = step.eval(m)[0];
                if fm == 0.0 {
                    return Some(m);
                }
                if fm.signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
                if b - a <= settings.root_tol {
                    break;
                }
            }
            return Some(0.5 * (a + b));
        }
        if lo == step.x0 && hi == step.x0 + step.h {
            break;
        }
        w *= 4.0;
    }
    Some(z)
}
