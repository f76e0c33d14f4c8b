//! Eigenvalue location for the full problem.
//!
//! The domain of the characteristic ratio is delimited by the auxiliary
//! spectrum (same ODE and left condition, terminal condition f(L) = 0): its
//! eigenvalues eta split the real line into branches on which the ratio
//! `char_lhs` is strictly decreasing while `char_rhs` is strictly increasing,
//! so every branch carries at most one eigenvalue. Root finding never touches
//! the ratio's poles: it bisects the cleared characteristic
//! `G(lambda) = p(L) f'(L) - (beta1 lambda - beta2) f(L)`, which is smooth in
//! lambda and vanishes exactly at the eigenvalues.

use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::parallel::maybe_par_map;
use crate::slp::{self, BoundaryParams, CoefficientSet, SLProblem, ShotResult, SolverSettings};
use crate::util::bisect;

/// Signed eigenvalue index. The two negative labels are distinct from the
/// integer sequence: `NegZero` ("-0") is the negative eigenvalue whose
/// eigenfunction has no interior zero, `NegBeyond` ("-1") the one below the
/// negative auxiliary eigenvalue with exactly one zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchIndex {
    NegBeyond,
    NegZero,
    NonNeg(usize),
}

impl BranchIndex {
    /// |l|: the interior zero count the eigenfunction must carry.
    pub fn zero_count(&self) -> usize {
        match self {
            BranchIndex::NegBeyond => 1,
            BranchIndex::NegZero => 0,
            BranchIndex::NonNeg(n) => *n,
        }
    }
}

impl fmt::Display for BranchIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchIndex::NegBeyond => write!(f, "-1"),
            BranchIndex::NegZero => write!(f, "-0"),
            BranchIndex::NonNeg(n) => write!(f, "{n}"),
        }
    }
}

/// Open lambda interval on which the characteristic ratio is monotone.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Branch {
    pub index: BranchIndex,
    pub lo: f64,
    pub hi: f64,
}

/// Auxiliary spectrum (terminal Dirichlet condition), ordered.
///
/// `zero_counts[l]` is the certified interior zero count of the eigenfunction
/// at `etas[l]` (always l, asserted during bracketing). `residuals` holds the
/// relative terminal residual |f(L)| / scale of each refined root, for
/// `eta_neg0` first when present, then the `etas` in order.
#[derive(Debug, Clone, Serialize)]
pub struct AuxSpectrum {
    pub eta_neg0: Option<f64>,
    pub etas: Vec<f64>,
    pub zero_counts: Vec<usize>,
    pub residuals: Vec<f64>,
}

/// One located eigenvalue with its certificates.
#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueRecord {
    pub lambda: f64,
    pub index: BranchIndex,
    pub zero_count: usize,
    pub branch: Branch,
    /// |G(lambda)| relative to the magnitude of its two terms.
    pub char_residual: f64,
}

/// Sign regime of (alpha1, beta1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeCase {
    I,
    II,
    III,
}

/// Case I: alpha1 < 0 and beta1 > 0; case III: alpha1 > 0 and beta1 < 0;
/// everything else (alpha1*beta1 >= 0, including zeros) is case II.
pub fn classify_case(bc: &BoundaryParams) -> RegimeCase {
    if bc.alpha1 < 0.0 && bc.beta1 > 0.0 {
        RegimeCase::I
    } else if bc.alpha1 > 0.0 && bc.beta1 < 0.0 {
        RegimeCase::III
    } else {
        RegimeCase::II
    }
}

/// p(L) f'(L; lambda) / (lambda f(L; lambda)); defined off lambda = 0 and off
/// the auxiliary spectrum.
pub fn char_lhs(problem: &SLProblem, lambda: f64, settings: &SolverSettings) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::Pole("char_lhs at lambda = 0".into()));
    }
    let shot = slp::shoot(problem, lambda, settings)?;
    let scale = shot.f_end.abs() + shot.pfprime_end.abs();
    if shot.f_end.abs() <= 1e-12 * scale {
        return Err(Error::Pole(format!(
            "char_lhs at an auxiliary eigenvalue: f(L; {lambda}) ~ 0"
        )));
    }
    Ok(shot.pfprime_end / (lambda * shot.f_end))
}

/// beta1 - beta2 / lambda.
pub fn char_rhs(bc: &BoundaryParams, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::Pole("char_rhs at lambda = 0".into()));
    }
    Ok(bc.beta1 - bc.beta2 / lambda)
}

/// Cleared characteristic G(lambda) = p(L)f'(L) - (beta1 lambda - beta2) f(L),
/// smooth through lambda = 0 and through the auxiliary spectrum. Roots (for
/// lambda != 0) are exactly the eigenvalues; the value is reported in the
/// shot's internal scale, so only signs and relative magnitudes are meaningful
/// in the deep rescaled regime.
pub fn characteristic(problem: &SLProblem, lambda: f64, settings: &SolverSettings) -> Result<f64> {
    let shot = slp::shoot(problem, lambda, settings)?;
    Ok(shot.characteristic(&problem.boundary))
}

fn char_with_scale(
    problem: &SLProblem,
    lambda: f64,
    settings: &SolverSettings,
) -> Result<(f64, f64)> {
    let shot = slp::shoot(problem, lambda, settings)?;
    let bc = &problem.boundary;
    let g = shot.characteristic(bc);
    let scale = shot.pfprime_end.abs() + ((bc.beta1 * lambda - bc.beta2) * shot.f_end).abs();
    Ok((g, scale.max(f64::MIN_POSITIVE)))
}

/// How many expansion doublings bracket searches are allowed.
const EXPANSION_BUDGET: usize = 60;
const BISECT_ITERS: usize = 200;

/// Left boundary data of the shot used for terminal-root scans.
#[derive(Clone, Copy)]
enum LeftData {
    /// f(0) = 1, p(0)f'(0) = alpha1*lambda + alpha2 (the problem's own data).
    Eigenparam,
    /// f(0) = 0, p(0)f'(0) = 1 (the sub-auxiliary Dirichlet shot).
    Dirichlet,
}

fn left_shot(
    problem: &SLProblem,
    lambda: f64,
    settings: &SolverSettings,
    data: LeftData,
) -> Result<ShotResult> {
    match data {
        LeftData::Eigenparam => slp::shoot(problem, lambda, settings),
        LeftData::Dirichlet => {
            slp::integrate_with_init(problem, lambda, [0.0, 1.0], settings, false)
                .map(|(r, _)| r)
        }
    }
}

/// Locates the roots eta_0 < eta_1 < ... < eta_{n_max} of f(L; lambda) = 0 on
/// lambda > 0 using the interior zero count as the bracketing certificate
/// (the count equals n on ]eta_{n-1}, eta_n] and jumps by one across each
/// root). Returns (etas, counts, residuals).
fn positive_terminal_roots(
    problem: &SLProblem,
    n_max: usize,
    settings: &SolverSettings,
    data: LeftData,
) -> Result<(Vec<f64>, Vec<usize>, Vec<f64>)> {
    let shot = |lambda: f64| left_shot(problem, lambda, settings, data);

    // expand upward until the count exceeds n_max
    let mut hi = 1.0;
    let mut hi_shot = shot(hi)?;
    let mut guard = 0;
    while hi_shot.zero_count <= n_max {
        hi *= 4.0;
        guard += 1;
        if guard > EXPANSION_BUDGET {
            return Err(Error::Search(format!(
                "no bracket for auxiliary index {n_max} below lambda = {hi}"
            )));
        }
        hi_shot = shot(hi)?;
    }

    let mut etas = Vec::with_capacity(n_max + 1);
    let mut counts = Vec::with_capacity(n_max + 1);
    let mut residuals = Vec::with_capacity(n_max + 1);
    // left edge with a certified count of 0 (the shot has no zeros at lambda = 0)
    let mut lo = 0.0;
    for n in 0..=n_max {
        // predicate bisection: drive [a, b] to interior zero counts (n, n+1);
        // lo always sits within root tolerance of the previous root, so its
        // count is at most n
        let (mut a, mut b) = (lo, hi);
        let mut ca = if n == 0 { 0 } else { shot(a)?.zero_count };
        let mut cb = shot(b)?.zero_count;
        let mut iters = 0;
        while !(ca == n && cb == n + 1) {
            iters += 1;
            if iters > BISECT_ITERS {
                return Err(Error::Search(format!(
                    "auxiliary bracket for index {n} did not isolate: counts ({ca}, {cb})"
                )));
            }
            let m = 0.5 * (a + b);
            let c = shot(m)?.zero_count;
            if c <= n {
                a = m;
                ca = c;
            } else {
                b = m;
                cb = c;
            }
        }
        let eta = bisect(
            |lam| shot(lam).map(|s| s.f_end),
            a,
            b,
            settings.root_tol,
            BISECT_ITERS,
        )?;
        let end = shot(eta)?;
        let scale = end.pfprime_end.abs() * problem.length()
            / problem.coefficients.p.eval(problem.length());
        residuals.push(end.f_end.abs() / scale.max(f64::MIN_POSITIVE));
        etas.push(eta);
        counts.push(n);
        lo = eta + 4.0 * settings.root_tol * eta.abs().max(1.0);
    }
    Ok((etas, counts, residuals))
}

/// Negative auxiliary eigenvalue (present only when alpha1 > 0): the unique
/// root of f(L; .) on lambda < 0, below which the shot carries one zero.
fn negative_terminal_root(
    problem: &SLProblem,
    settings: &SolverSettings,
) -> Result<(f64, f64)> {
    let shot = |lambda: f64| slp::shoot(problem, lambda, settings);
    let bc = &problem.boundary;
    // f'(0) flips sign near -alpha2/alpha1; the root sits below that
    let scale = (bc.alpha2 / bc.alpha1).abs().max(1.0);
    let mut w = 1e-8 * scale;
    let mut guard = 0;
    while shot(-w)?.f_end > 0.0 {
        w *= 2.0;
        guard += 1;
        if guard > 2 * EXPANSION_BUDGET {
            return Err(Error::Search(
                "no sign change found while expanding toward -infinity for eta_-0".into(),
            ));
        }
    }
    let eta = bisect(
        |lam| shot(lam).map(|s| s.f_end),
        -w,
        -w / 2.0,
        settings.root_tol,
        BISECT_ITERS,
    )?;
    let end = shot(eta)?;
    let sc = end.pfprime_end.abs() * problem.length()
        / problem.coefficients.p.eval(problem.length());
    Ok((eta, end.f_end.abs() / sc.max(f64::MIN_POSITIVE)))
}

/// Auxiliary spectrum up to index `n_max`. For alpha1 > 0 the spectrum has a
/// single negative element eta_-0; for alpha1 <= 0 every auxiliary eigenvalue
/// is positive and `eta_neg0` is absent.
pub fn aux_spectrum(
    problem: &SLProblem,
    n_max: usize,
    settings: &SolverSettings,
) -> Result<AuxSpectrum> {
    let (etas, zero_counts, mut residuals) =
        positive_terminal_roots(problem, n_max, settings, LeftData::Eigenparam)?;
    let eta_neg0 = if problem.boundary.alpha1 > 0.0 {
        let (eta, res) = negative_terminal_root(problem, settings)?;
        residuals.insert(0, res);
        Some(eta)
    } else {
        None
    };
    Ok(AuxSpectrum {
        eta_neg0,
        etas,
        zero_counts,
        residuals,
    })
}

/// Spectrum of the sub-auxiliary Dirichlet-Dirichlet problem (f(0) = 0,
/// f(L) = 0), used as the inner scanning machinery; all its eigenvalues are
/// positive for positive coefficients.
pub fn dirichlet_spectrum(
    problem: &SLProblem,
    n_max: usize,
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    positive_terminal_roots(problem, n_max, settings, LeftData::Dirichlet).map(|(e, _, _)| e)
}

/// Branches delimited by the auxiliary spectrum: for alpha1 > 0 these are
/// ]-inf, eta_-0[, ]eta_-0, 0[, ]0, eta_0[, ]eta_{n-1}, eta_n[; for
/// alpha1 <= 0 the negative side is the single branch ]-inf, 0[.
pub fn branches(aux: &AuxSpectrum, n_max: usize) -> Vec<Branch> {
    let mut out = Vec::new();
    match aux.eta_neg0 {
        Some(e) => {
            out.push(Branch { index: BranchIndex::NegBeyond, lo: f64::NEG_INFINITY, hi: e });
            out.push(Branch { index: BranchIndex::NegZero, lo: e, hi: 0.0 });
        }
        None => {
            out.push(Branch { index: BranchIndex::NegZero, lo: f64::NEG_INFINITY, hi: 0.0 });
        }
    }
    if let Some(&eta0) = aux.etas.first() {
        out.push(Branch { index: BranchIndex::NonNeg(0), lo: 0.0, hi: eta0 });
    }
    for n in 1..=n_max.min(aux.etas.len().saturating_sub(1)) {
        out.push(Branch {
            index: BranchIndex::NonNeg(n),
            lo: aux.etas[n - 1],
            hi: aux.etas[n],
        });
    }
    out
}

fn make_record(
    problem: &SLProblem,
    branch: &Branch,
    lambda: f64,
    settings: &SolverSettings,
) -> Result<EigenvalueRecord> {
    let shot = slp::shoot(problem, lambda, settings)?;
    let bc = &problem.boundary;
    let g = shot.characteristic(bc);
    let scale = (shot.pfprime_end.abs()
        + ((bc.beta1 * lambda - bc.beta2) * shot.f_end).abs())
    .max(f64::MIN_POSITIVE);
    let zero_count = shot.zero_count;
    let expected = branch.index.zero_count();
    if zero_count != expected {
        return Err(Error::Search(format!(
            "zero-count certificate failed on branch {}: got {zero_count}, expected {expected} at lambda = {lambda}",
            branch.index
        )));
    }
    Ok(EigenvalueRecord {
        lambda,
        index: branch.index,
        zero_count,
        branch: *branch,
        char_residual: g.abs() / scale,
    })
}

/// Searches one branch for its (unique) eigenvalue.
///
/// Bounded branches always hold exactly one root (the cleared characteristic
/// changes sign across them); brackets are seeded a small inset from the
/// endpoints and pushed geometrically toward them if the root hides near one.
/// The two downward-unbounded searches exist only when char_rhs stays below
/// zero at -infinity, i.e. beta1 < 0; otherwise `None` is returned.
pub fn find_in_branch(
    problem: &SLProblem,
    branch: &Branch,
    settings: &SolverSettings,
) -> Result<Option<EigenvalueRecord>> {
    let g = |lam: f64| char_with_scale(problem, lam, settings).map(|(v, _)| v);
    let bc = &problem.boundary;

    if branch.lo == f64::NEG_INFINITY {
        if bc.beta1 >= 0.0 {
            return Ok(None);
        }
        // anchor just below the finite end; G < 0 there
        let hi = branch.hi;
        let anchor_scale = hi.abs().max(1.0);
        let mut inset = 1e-6 * anchor_scale;
        let mut b = hi - inset;
        let mut guard = 0;
        while g(b)? >= 0.0 {
            inset *= 0.5;
            b = hi - inset;
            guard += 1;
            if guard > EXPANSION_BUDGET {
                return Err(Error::Search(format!(
                    "no negative anchor for the downward search below {hi}"
                )));
            }
        }
        // expand downward until G turns positive
        let mut dist = anchor_scale;
        let mut a = hi - dist;
        guard = 0;
        loop {
            let ga = g(a)?;
            if !ga.is_finite() {
                return Err(Error::Search(format!(
                    "characteristic overflowed during downward expansion at lambda = {a}"
                )));
            }
            if ga > 0.0 {
                break;
            }
            dist *= 2.0;
            a = hi - dist;
            guard += 1;
            if guard > EXPANSION_BUDGET {
                return Err(Error::Search(format!(
                    "downward expansion exhausted at lambda = {a} without a sign change"
                )));
            }
        }
        let lambda = bisect(g, a, b, settings.root_tol, BISECT_ITERS)?;
        return make_record(problem, branch, lambda, settings).map(Some);
    }

    // bounded branch: exactly one sign change of G
    let width = branch.hi - branch.lo;
    let mut inset = 1e-6 * width;
    for _ in 0..EXPANSION_BUDGET {
        let a = branch.lo + inset;
        let b = branch.hi - inset;
        let (ga, gb) = (g(a)?, g(b)?);
        if ga == 0.0 {
            return make_record(problem, branch, a, settings).map(Some);
        }
        if gb == 0.0 {
            return make_record(problem, branch, b, settings).map(Some);
        }
        if ga.signum() != gb.signum() {
            let lambda = bisect(g, a, b, settings.root_tol, BISECT_ITERS)?;
            return make_record(problem, branch, lambda, settings).map(Some);
        }
        inset *= 0.5;
    }
    Err(Error::Search(format!(
        "no sign change found on branch {} = ]{}, {}[",
        branch.index, branch.lo, branch.hi
    )))
}

/// All eigenvalues with index in {-1, -0, 0, ..., n_max} that exist for the
/// problem's regime, strictly ordered, each carrying its verified zero count.
/// Branches are searched independently (in parallel under the `parallel`
/// feature).
pub fn full_spectrum(
    problem: &SLProblem,
    n_max: usize,
    settings: &SolverSettings,
) -> Result<Vec<EigenvalueRecord>> {
    let aux = aux_spectrum(problem, n_max, settings)?;
    let brs = branches(&aux, n_max);
    let found: Vec<Result<Option<EigenvalueRecord>>> =
        maybe_par_map(&brs, |b| find_in_branch(problem, b, settings));
    let mut records = Vec::new();
    for r in found {
        if let Some(rec) = r? {
            records.push(rec);
        }
    }
    records.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    for w in records.windows(2) {
        if w[1].lambda <= w[0].lambda {
            return Err(Error::Search(format!(
                "spectrum not strictly ordered: {} and {}",
                w[0].lambda, w[1].lambda
            )));
        }
    }
    Ok(records)
}

/// One adjacent pair of the interlacing chain.
#[derive(Debug, Clone, Serialize)]
pub struct InterlacePair {
    pub lo_label: String,
    pub hi_label: String,
    pub lo: f64,
    pub hi: f64,
    pub margin: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterlacingReport {
    pub pairs: Vec<InterlacePair>,
    pub ok: bool,
}

/// Checks the chain lambda_-1 < eta_-0 < lambda_-0 < 0 < lambda_0 < eta_0 <
/// lambda_1 < eta_1 < ... pairwise, skipping links whose entries are absent
/// for the regime (e.g. no lambda_-1 in case ii).
pub fn verify_interlacing(records: &[EigenvalueRecord], aux: &AuxSpectrum) -> InterlacingReport {
    let mut chain: Vec<(String, f64)> = Vec::new();
    let find = |idx: BranchIndex| records.iter().find(|r| r.index == idx);
    if let Some(r) = find(BranchIndex::NegBeyond) {
        chain.push(("lambda_-1".into(), r.lambda));
    }
    if let Some(e) = aux.eta_neg0 {
        chain.push(("eta_-0".into(), e));
    }
    if let Some(r) = find(BranchIndex::NegZero) {
        chain.push(("lambda_-0".into(), r.lambda));
    }
    chain.push(("0".into(), 0.0));
    let n_pos = records
        .iter()
        .filter_map(|r| match r.index {
            BranchIndex::NonNeg(n) => Some(n),
            _ => None,
        })
        .max();
    if let Some(n_pos) = n_pos {
        for n in 0..=n_pos {
            if let Some(r) = find(BranchIndex::NonNeg(n)) {
                chain.push((format!("lambda_{n}"), r.lambda));
            }
            if n < aux.etas.len() && n < n_pos {
                chain.push((format!("eta_{n}"), aux.etas[n]));
            }
        }
    }
    let mut pairs = Vec::new();
    let mut ok = true;
    for w in chain.windows(2) {
        let margin = w[1].1 - w[0].1;
        let pair_ok = margin > 0.0;
        ok &= pair_ok;
        pairs.push(InterlacePair {
            lo_label: w[0].0.clone(),
            hi_label: w[1].0.clone(),
            lo: w[0].1,
            hi: w[1].1,
            margin,
            ok: pair_ok,
        });
    }
    InterlacingReport { pairs, ok }
}

/// A regular Sturm-Liouville problem with lambda-free Robin rows
/// y'(0) = -alpha y(0), y'(L) = -beta y(L) (derivative rows unweighted).
#[derive(Debug, Clone)]
pub struct RobinProblem {
    pub coefficients: CoefficientSet,
    pub alpha: f64,
    pub beta: f64,
}

/// Eigenvalues of a regular Robin problem by terminal-phase bisection: the
/// n-th eigenvalue is the unique lambda where the Prüfer angle at L reaches
/// delta + n pi (delta the target angle of the right Robin row); the terminal
/// angle is strictly increasing in lambda.
pub fn regular_robin_spectrum(
    rp: &RobinProblem,
    n_max: usize,
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    let length = rp.coefficients.length;
    let p0 = rp.coefficients.p.eval(0.0);
    let p_end = rp.coefficients.p.eval(length);
    // boundary rows are satisfied by constructing a throwaway SLProblem with
    // the coefficients only; the shot uses explicit left data
    let problem = SLProblem {
        coefficients: rp.coefficients.clone(),
        boundary: BoundaryParams {
            alpha1: 0.0,
            alpha2: 1.0,
            beta1: 0.0,
            beta2: 1.0,
        },
    };
    let phase = |lam: f64| -> Result<f64> {
        slp::integrate_with_init(&problem, lam, [1.0, -p0 * rp.alpha], settings, false)
            .map(|(r, _)| r.phase_end)
    };
    let delta = f64::atan2(1.0, -p_end * rp.beta);

    let mut out = Vec::with_capacity(n_max + 1);
    let mut lo = -1.0;
    let mut guard = 0;
    while phase(lo)? >= delta {
        lo *= 4.0;
        guard += 1;
        if guard > EXPANSION_BUDGET {
            return Err(Error::Search("no lower phase bracket".into()));
        }
    }
    let mut hi = 1.0;
    for n in 0..=n_max {
        let target = delta + n as f64 * std::f64::consts::PI;
        guard = 0;
        while phase(hi)? <= target {
            hi *= 4.0;
            guard += 1;
            if guard > EXPANSION_BUDGET {
                return Err(Error::Search(format!("no upper phase bracket for index {n}")));
            }
        }
        let lam = bisect(
            |l| phase(l).map(|t| t - target),
            lo,
            hi,
            settings.root_tol,
            BISECT_ITERS,
        )?;
        out.push(lam);
        lo = lam;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::{make_problem, CoeffFn};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn constants_case_iii() -> SLProblem {
        let coeffs = CoefficientSet::new(
            CoeffFn::constant(1.0),
            CoeffFn::constant(1.0),
            CoeffFn::constant(1.0),
            1.0,
        );
        make_problem(coeffs, BoundaryParams::new(1.0, 1.0, -1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn classify_sign_table() {
        let b = |a1, b1| BoundaryParams::new(a1, 1.0, b1, 2.0).unwrap();
        assert_eq!(classify_case(&b(0.9, -0.9)), RegimeCase::III);
        assert_eq!(classify_case(&b(0.0, -1.2)), RegimeCase::II);
        assert_eq!(classify_case(&b(-1.0, 1.0)), RegimeCase::I);
        assert_eq!(classify_case(&b(2.0, 0.0)), RegimeCase::II);
        assert_eq!(classify_case(&b(2.0, 3.0)), RegimeCase::II);
    }

    #[test]
    fn char_rhs_values_and_limits() {
        let bc = BoundaryParams::new(0.9, 1.0, -0.9, 2.0).unwrap();
        assert_abs_diff_eq!(char_rhs(&bc, 2.0).unwrap(), -1.9, epsilon = 1e-15);
        assert_abs_diff_eq!(char_rhs(&bc, 1e12).unwrap(), -0.9, epsilon = 1e-9);
        assert!(char_rhs(&bc, 1e-12).unwrap() < -1e9);
        assert!(matches!(char_rhs(&bc, 0.0), Err(Error::Pole(_))));
    }

    // sub-auxiliary Dirichlet-Dirichlet machinery with p = q = r = 1, L = 1:
    // closed form 1 + ((n+1) pi)^2
    #[test]
    fn dirichlet_subauxiliary_closed_form() {
        let prob = constants_case_iii();
        let etas = dirichlet_spectrum(&prob, 1, &SolverSettings::default()).unwrap();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(etas[0], 1.0 + pi * pi, max_relative = 1e-8);
        assert_relative_eq!(etas[1], 1.0 + 4.0 * pi * pi, max_relative = 1e-8);
    }

    // aux spectrum of the constants problem: the terminal condition in closed
    // form is cosh(w) + ((eta+1)/w) sinh(w) = 0 with w = sqrt(1 - eta) for the
    // negative root, and cos(w) + ((eta+1)/w) sin(w) = 0, w = sqrt(eta - 1),
    // for the positive ones.
    #[test]
    fn aux_spectrum_constants() {
        let prob = constants_case_iii();
        let aux = aux_spectrum(&prob, 2, &SolverSettings::default()).unwrap();
        let eta_neg0 = aux.eta_neg0.unwrap();
        assert!(eta_neg0 < -1.0 / 1.0f64.tanh() - 1.0 + 1.0); // below -alpha2/alpha1 = -1
        let w = (1.0 - eta_neg0).sqrt();
        let resid = w.cosh() + (eta_neg0 + 1.0) / w * w.sinh();
        assert_abs_diff_eq!(resid, 0.0, epsilon = 1e-6 * w.cosh());
        assert_eq!(aux.zero_counts, vec![0, 1, 2]);
        // residual certificate
        for r in &aux.residuals {
            assert!(*r < 1e-6, "aux residual {r}");
        }
        // each positive eta satisfies the transcendental characteristic
        for &eta in &aux.etas {
            let w = (eta - 1.0f64).sqrt();
            let resid = w.cos() + (eta + 1.0) / w * w.sin();
            assert_abs_diff_eq!(resid, 0.0, epsilon = 1e-6 * (eta + 1.0) / w);
        }
    }

    #[test]
    fn branch_layout() {
        let aux = AuxSpectrum {
            eta_neg0: Some(-12.26),
            etas: vec![3.0, 10.0],
            zero_counts: vec![0, 1],
            residuals: vec![0.0, 0.0, 0.0],
        };
        let brs = branches(&aux, 1);
        assert_eq!(brs.len(), 4);
        assert_eq!(brs[0].index, BranchIndex::NegBeyond);
        assert_eq!(brs[0].hi, -12.26);
        assert_eq!((brs[1].lo, brs[1].hi), (-12.26, 0.0));
        assert_eq!((brs[2].lo, brs[2].hi), (0.0, 3.0));
        assert_eq!((brs[3].lo, brs[3].hi), (3.0, 10.0));
        // disjoint and ordered
        for w in brs.windows(2) {
            assert!(w[0].hi <= w[1].lo + 1e-300);
        }
        let brs0 = branches(&aux, 0);
        assert_eq!(brs0.len(), 3);
    }

    #[test]
    fn full_spectrum_constants_case_iii() {
        let prob = constants_case_iii();
        let settings = SolverSettings::default();
        let recs = full_spectrum(&prob, 2, &settings).unwrap();
        assert_eq!(recs.len(), 5); // -1, -0, 0, 1, 2
        assert_eq!(recs[0].index, BranchIndex::NegBeyond);
        assert_eq!(recs[1].index, BranchIndex::NegZero);
        assert!(recs[1].lambda < 0.0 && recs[2].lambda > 0.0);
        // the characteristic equation in closed form:
        // (lambda^2+lambda+2) sin w + 2 (lambda+1) w cos w = 0, w = sqrt(lambda-1)
        for r in &recs[2..] {
            let w = (r.lambda - 1.0f64).sqrt();
            let resid = (r.lambda * r.lambda + r.lambda + 2.0) * w.sin()
                + 2.0 * (r.lambda + 1.0) * w * w.cos();
            assert!(
                resid.abs() < 1e-5 * (r.lambda * r.lambda),
                "closed-form residual {resid} at {}",
                r.lambda
            );
            assert_eq!(r.zero_count, r.index.zero_count());
            assert!(r.char_residual < 1e-8);
        }
        // lambda = 0 never an eigenvalue; G(0) > 0
        assert!(characteristic(&prob, 0.0, &settings).unwrap() > 0.0);
    }

    #[test]
    fn case_i_has_no_negative_eigenvalues() {
        let coeffs = CoefficientSet::new(
            CoeffFn::constant(1.0),
            CoeffFn::constant(1.0),
            CoeffFn::constant(1.0),
            1.0,
        );
        let prob =
            make_problem(coeffs, BoundaryParams::new(-1.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        let settings = SolverSettings::default();
        let recs = full_spectrum(&prob, 1, &settings).unwrap();
        assert!(recs.iter().all(|r| r.lambda > 0.0));
        assert!(recs.iter().any(|r| r.index == BranchIndex::NonNeg(0)));
        // B_-1 does not even exist; the negative branch finds nothing
        let aux = aux_spectrum(&prob, 1, &settings).unwrap();
        assert!(aux.eta_neg0.is_none());
        let neg = branches(&aux, 1)
            .into_iter()
            .find(|b| b.index == BranchIndex::NegZero)
            .unwrap();
        assert!(find_in_branch(&prob, &neg, &settings).unwrap().is_none());
    }

    #[test]
    fn char_lhs_monotone_and_asymptotic() {
        let prob = constants_case_iii();
        let settings = SolverSettings::default();
        // strictly decreasing on a ladder inside B_0 = ]0, eta_0[
        let aux = aux_spectrum(&prob, 0, &settings).unwrap();
        let eta0 = aux.etas[0];
        let mut prev = f64::INFINITY;
        for i in 1..=20 {
            let lam = eta0 * i as f64 / 21.0;
            let v = char_lhs(&prob, lam, &settings).unwrap();
            assert!(v < prev, "char_lhs not decreasing at {lam}");
            prev = v;
        }
        // decay at -infinity: h1 * sqrt(-lambda) stays within the coefficient
        // bounds [-sqrt(max r max p), -sqrt(min r min p)] (here all 1)
        for &lam in &[-1e3, -1e4] {
            let v = char_lhs(&prob, lam, &settings).unwrap() * (-lam).sqrt();
            assert!((-1.5..=-0.5).contains(&v), "scaled decay {v} at {lam}");
        }
    }

    #[test]
    fn interlacing_chain_and_negative_control() {
        let prob = constants_case_iii();
        let settings = SolverSettings::default();
        let aux = aux_spectrum(&prob, 2, &settings).unwrap();
        let recs = full_spectrum(&prob, 2, &settings).unwrap();
        let rep = verify_interlacing(&recs, &aux);
        assert!(rep.ok, "{:#?}", rep.pairs);
        // swap two eigenvalues -> violation reported
        let mut bad = recs.clone();
        let tmp = bad[2].lambda;
        bad[2].lambda = bad[4].lambda;
        bad[4].lambda = tmp;
        let rep = verify_interlacing(&bad, &aux);
        assert!(!rep.ok);
        assert!(rep.pairs.iter().any(|p| !p.ok));
    }

    #[test]
    fn regular_robin_matches_closed_form() {
        // -y'' = lambda y on [0,1] with y'(0) = y'(1) = 0 (alpha = beta = 0):
        // lambda_n = (n pi)^2
        let coeffs = CoefficientSet::new(
            CoeffFn::constant(1.0),
            CoeffFn::constant(1e-12), // q must be positive for validation; negligible
            CoeffFn::constant(1.0),
            1.0,
        );
        let rp = RobinProblem { coefficients: coeffs, alpha: 0.0, beta: 0.0 };
        let eigs = regular_robin_spectrum(&rp, 3, &SolverSettings::default()).unwrap();
        let pi = std::f64::consts::PI;
        assert_abs_diff_eq!(eigs[0], 0.0, epsilon = 1e-7);
        for n in 1..=3 {
            assert_relative_eq!(eigs[n], (n as f64 * pi).powi(2), max_relative = 1e-7);
        }
    }
}
