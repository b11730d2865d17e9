//! Shooting solvers for the two-point boundary-value problems.
//!
//! Falkner-Skan has (for `m` in `[0,1]`) a unique skin friction `f''(0)`
//! pinned by the far-field condition `f'(inf) = 1`; [`solve_falkner_skan`]
//! brackets and bisects the miss function `f'(t_max; d) - 1`.
//!
//! The pseudo-similarity problem is different in kind: every initial slope
//! `d = theta'(0)` inside the basin of attraction yields a solution, so the
//! solver reports sets - per-probe classifications ([`sweep_d`]) and the
//! admissible interval around `d = 0` ([`admissible_interval`]).

use std::fmt;

use rayon::prelude::*;

use crate::integrate::{integrate, IntegratorConfig, StopReason, Trajectory};
use crate::model::{fs_rhs, pseudo_rhs, pseudo_rhs3, FalknerSkanParams, PhaseState, PseudoParams, ThirdOrderState};
use crate::{cast, Real};

/// Errors from the shooting solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum ShootError {
    /// The expanding search found no sign change of the miss function.
    BracketFailure { searched_up_to: f64 },
    /// No probe converged; expected whenever `tau <= 0`.
    NoConvergentProbe,
    /// `zeta` outside the domain of the requested bound.
    ZetaOutOfRange { zeta: f64 },
    /// Fewer probes than the interval scan needs.
    TooFewProbes { n: usize },
}

impl fmt::Display for ShootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShootError::BracketFailure { searched_up_to } => {
                write!(f, "no sign change of the miss function for |d| <= {searched_up_to}")
            }
            ShootError::NoConvergentProbe => write!(f, "no probe converged"),
            ShootError::ZetaOutOfRange { zeta } => write!(f, "zeta = {zeta} outside bound domain"),
            ShootError::TooFewProbes { n } => write!(f, "need at least 9 probes, got {n}"),
        }
    }
}

impl std::error::Error for ShootError {}

/// Terminal classification of a single shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotClass {
    Converged,
    Diverged,
    Horizon,
}

impl ShotClass {
    fn from_stop<R>(stop: &StopReason<R>) -> Self {
        match stop {
            StopReason::Converged { .. } => ShotClass::Converged,
            StopReason::Diverged { .. } => ShotClass::Diverged,
            StopReason::Horizon | StopReason::Event { .. } => ShotClass::Horizon,
        }
    }
}

/// Outcome of one shot of the pseudo-similarity system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootResult<R> {
    /// Initial slope `theta'(0)` that was shot.
    pub d: R,
    pub classification: ShotClass,
    /// `theta` at the final sample minus one.
    pub miss: R,
    /// Crossings of `theta = 1` before the stop.
    pub crossings: usize,
}

/// Empirical and analytic bounds on the convergent initial slopes.
///
/// The analytic interval is `+/- sqrt(4/3 + 2 zeta (1 - zeta^2/3))`, the open
/// slice of the basin of attraction at fixed `zeta`. Probes outside it may
/// still converge, so `lo`/`hi` can be wider; they are never asserted tighter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleInterval<R> {
    pub lo: R,
    pub hi: R,
    pub analytic_lo: R,
    pub analytic_hi: R,
}

/// Shoot the planar system from `(zeta, d)` and classify the outcome.
pub fn shoot_pseudo<R: Real>(
    params: &PseudoParams<R>,
    d: R,
    cfg: &IntegratorConfig<R>,
) -> ShootResult<R> {
    let tau = params.tau;
    let traj = integrate(
        move |y: &[R; 2]| pseudo_rhs(&PhaseState::new(R::zero(), y[0], y[1]), tau),
        [params.zeta, d],
        0,
        cfg,
    );
    ShootResult {
        d,
        classification: ShotClass::from_stop(&traj.stop),
        miss: traj.final_state()[0] - R::one(),
        crossings: traj.crossings.len(),
    }
}

/// Integrate the third-order pseudo-similarity system from `(f, f', f'') =
/// (0, zeta, d)`, keeping the shape function for reconstruction. The
/// normalization `f(0) = 0` puts all transpiration into the log term of the
/// stream function.
pub fn pseudo_profile<R: Real>(
    params: &PseudoParams<R>,
    d: R,
    cfg: &IntegratorConfig<R>,
) -> Trajectory<R, 3> {
    let tau = params.tau;
    integrate(
        move |y: &[R; 3]| pseudo_rhs3(&ThirdOrderState::new(R::zero(), y[0], y[1], y[2]), tau),
        [R::zero(), params.zeta, d],
        1,
        cfg,
    )
}

/// Integrate the Falkner-Skan system from `(0, 0, d)`.
pub fn fs_profile<R: Real>(
    params: &FalknerSkanParams<R>,
    d: R,
    cfg: &IntegratorConfig<R>,
) -> Trajectory<R, 3> {
    let p = *params;
    integrate(
        move |y: &[R; 3]| fs_rhs(&ThirdOrderState::new(R::zero(), y[0], y[1], y[2]), &p),
        [R::zero(), R::zero(), d],
        1,
        cfg,
    )
}

/// Miss function for Falkner-Skan shooting, `f' - 1` at the first decisive
/// event. The raw horizon value is useless near `m = 1`: every off-solution
/// trajectory eventually swings to `f' -> +inf` whichever side of the root it
/// started, so the sign comes from the first exit instead:
///
/// - `f'` crosses 1 while still accelerating (`f'' >= 0`): overshoot, positive;
/// - `f''` reaches 0 while `f' < 1`: the profile tops out short, negative;
/// - neither by `t_max`: `f'(t_max) - 1`.
///
/// For `m` in `[0, 1]` the sign switches exactly once, at the root.
fn fs_miss<R: Real>(params: &FalknerSkanParams<R>, d: R, cfg: &IntegratorConfig<R>) -> R {
    let p = *params;
    let rhs = move |y: &[R; 3]| fs_rhs(&ThirdOrderState::new(R::zero(), y[0], y[1], y[2]), &p);
    let mut y = [R::zero(), R::zero(), d];
    let mut step: u64 = 0;
    loop {
        if y[1] > R::one() && y[2] >= R::zero() {
            return y[1] - R::one();
        }
        if y[2] <= R::zero() && y[1] < R::one() {
            return y[1] - R::one();
        }
        let t = R::from_u64(step).expect("step count representable") * cfg.h;
        if t >= cfg.t_max {
            return y[1] - R::one();
        }
        let h = cfg.h.min(cfg.t_max - t);
        y = crate::integrate::rk4_step(rhs, &y, h);
        step += 1;
        if y.iter().any(|v| !v.is_finite()) {
            // a blowup this fast only happens far from the root, long after
            // one of the exits above would normally fire; keep the sign
            return y[1].signum() * cast::<R>(1e3);
        }
    }
}

/// Solve for the skin friction `f''(0)` with `f(0) = f'(0) = 0`,
/// `f'(inf) = 1`, expanding the default bracket `[0, 0.5]` then bisecting to
/// `|delta d| < 1e-10`.
///
/// Bisection rather than a secant update: the miss function is flat far from
/// the root, and robustness matters more than iteration count here.
pub fn solve_falkner_skan<R: Real>(
    params: &FalknerSkanParams<R>,
    cfg: &IntegratorConfig<R>,
) -> Result<R, ShootError> {
    solve_falkner_skan_with_bracket(params, cfg, R::zero(), cast(0.5))
}

/// [`solve_falkner_skan`] with an explicit starting bracket; the result moves
/// by less than 1e-8 under bracket perturbations.
pub fn solve_falkner_skan_with_bracket<R: Real>(
    params: &FalknerSkanParams<R>,
    cfg: &IntegratorConfig<R>,
    lo0: R,
    hi0: R,
) -> Result<R, ShootError> {
    let limit = cast::<R>(10.0);
    let miss = |d: R| fs_miss(params, d, cfg);

    // Expand by doubling from the seed bracket, in both directions.
    let mut endpoints = vec![lo0, hi0];
    let mut hi = hi0;
    while hi.abs() < limit {
        hi = hi * cast::<R>(2.0);
        endpoints.push(hi.abs().min(limit) * hi.signum());
    }
    let mut lo = -hi0;
    endpoints.push(lo);
    while lo.abs() < limit {
        lo = lo * cast::<R>(2.0);
        endpoints.push(lo.abs().min(limit) * lo.signum());
    }
    endpoints.sort_by(|a, b| a.partial_cmp(b).expect("finite endpoints"));
    endpoints.dedup();

    let values: Vec<R> = endpoints.iter().map(|&d| miss(d)).collect();
    if let Some(i) = values.iter().position(|v| *v == R::zero()) {
        return Ok(endpoints[i]);
    }
    let bracket = endpoints
        .windows(2)
        .zip(values.windows(2))
        .find(|(_, mv)| (mv[0] > R::zero()) != (mv[1] > R::zero()));
    let (mut lo, mut hi, mut miss_lo) = match bracket {
        Some((dw, mv)) => (dw[0], dw[1], mv[0]),
        None => {
            return Err(ShootError::BracketFailure {
                searched_up_to: limit.to_f64().unwrap_or(10.0),
            })
        }
    };

    let tol = cast::<R>(1e-10);
    while hi - lo > tol {
        let mid = (lo + hi) / cast::<R>(2.0);
        if mid <= lo || mid >= hi {
            break; // scalar resolution exhausted (f32)
        }
        let m = miss(mid);
        if m == R::zero() {
            return Ok(mid);
        }
        if (m > R::zero()) == (miss_lo > R::zero()) {
            lo = mid;
            miss_lo = m;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / cast::<R>(2.0))
}

/// `sqrt(2 zeta (1 - zeta^2/3))` for `zeta` in `[0, sqrt(3)]`: every initial
/// slope with `|d|` at or below this converges to `theta = 1` when `tau > 0`.
pub fn theorem31_bound<R: Real>(zeta: R) -> Result<R, ShootError> {
    if !(zeta >= R::zero() && zeta <= cast::<R>(3.0).sqrt()) {
        return Err(ShootError::ZetaOutOfRange { zeta: zeta.to_f64().unwrap_or(f64::NAN) });
    }
    let inner = cast::<R>(2.0) * zeta * (R::one() - zeta * zeta / cast::<R>(3.0));
    Ok(inner.max(R::zero()).sqrt())
}

/// Half-width of the analytic admissible interval,
/// `sqrt(4/3 + 2 zeta (1 - zeta^2/3))`.
pub fn analytic_half_width<R: Real>(zeta: R) -> R {
    let inner = cast::<R>(4.0) / cast::<R>(3.0)
        + cast::<R>(2.0) * zeta * (R::one() - zeta * zeta / cast::<R>(3.0));
    inner.max(R::zero()).sqrt()
}

/// Shoot `n` evenly spaced probes over `[d_min, d_max]`; results come back in
/// `d` order regardless of `jobs`.
pub fn sweep_d<R: Real>(
    params: &PseudoParams<R>,
    d_min: R,
    d_max: R,
    n: usize,
    cfg: &IntegratorConfig<R>,
    jobs: usize,
) -> Vec<ShootResult<R>> {
    assert!(n >= 2, "need at least two probes");
    let span = d_max - d_min;
    let denom = R::from_usize(n - 1).expect("probe count representable");
    let ds: Vec<R> = (0..n)
        .map(|i| d_min + span * R::from_usize(i).expect("index representable") / denom)
        .collect();
    if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| ds.par_iter().map(|&d| shoot_pseudo(params, d, cfg)).collect())
    } else {
        ds.iter().map(|&d| shoot_pseudo(params, d, cfg)).collect()
    }
}

/// Probe `n_probe` slopes across the analytic interval widened by one on each
/// side, and report the contiguous convergent span containing `d = 0`.
pub fn admissible_interval<R: Real>(
    params: &PseudoParams<R>,
    cfg: &IntegratorConfig<R>,
    n_probe: usize,
) -> Result<AdmissibleInterval<R>, ShootError> {
    if n_probe < 9 {
        return Err(ShootError::TooFewProbes { n: n_probe });
    }
    if !params.zeta_in_analysis_range() {
        return Err(ShootError::ZetaOutOfRange {
            zeta: params.zeta.to_f64().unwrap_or(f64::NAN),
        });
    }
    let half = analytic_half_width(params.zeta);
    let lo = -half - R::one();
    let hi = half + R::one();
    let probes = sweep_d(params, lo, hi, n_probe, cfg, 1);

    // nearest probe to d = 0 anchors the span
    let anchor = probes
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.d.abs().partial_cmp(&b.d.abs()).expect("finite d"))
        .map(|(i, _)| i)
        .expect("at least one probe");
    if probes[anchor].classification != ShotClass::Converged {
        return Err(ShootError::NoConvergentProbe);
    }
    let mut left = anchor;
    while left > 0 && probes[left - 1].classification == ShotClass::Converged {
        left -= 1;
    }
    let mut right = anchor;
    while right + 1 < probes.len() && probes[right + 1].classification == ShotClass::Converged {
        right += 1;
    }
    Ok(AdmissibleInterval {
        lo: probes[left].d,
        hi: probes[right].d,
        analytic_lo: -half,
        analytic_hi: half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IntegratorConfig<f64> {
        IntegratorConfig::default()
    }

    #[test]
    fn equilibrium_start_is_trivially_converged() {
        let r = shoot_pseudo(&PseudoParams::new(1.0, 1.0), 0.0, &cfg());
        assert_eq!(r.classification, ShotClass::Converged);
        assert_eq!(r.miss, 0.0);
        assert_eq!(r.crossings, 0);
    }

    #[test]
    fn monotone_and_oscillatory_regimes() {
        let fast = shoot_pseudo(&PseudoParams::new(2.83, 0.2), 0.0, &cfg());
        assert_eq!(fast.classification, ShotClass::Converged);
        assert!(fast.crossings <= 1, "crossings {}", fast.crossings);

        let slow = shoot_pseudo(&PseudoParams::new(0.5, 0.2), 0.0, &cfg());
        assert_eq!(slow.classification, ShotClass::Converged);
        assert!(slow.crossings >= 3, "crossings {}", slow.crossings);
    }

    #[test]
    fn theorem_bound_values() {
        assert_eq!(theorem31_bound(0.0_f64).unwrap(), 0.0);
        assert!((theorem31_bound(1.0_f64).unwrap() - (4.0_f64 / 3.0).sqrt()).abs() < 1e-15);
        let b = theorem31_bound(0.2_f64).unwrap();
        assert!((b - (0.4_f64 * (1.0 - 0.04 / 3.0)).sqrt()).abs() < 1e-15);
        assert!((b - 0.628225).abs() < 1e-6);
        assert!(theorem31_bound(-0.1_f64).is_err());
        assert!(theorem31_bound(1.8_f64).is_err());
        // boundary of the domain collapses the bound
        assert!(theorem31_bound(3.0_f64.sqrt()).unwrap() < 1e-7);
    }

    #[test]
    fn analytic_interval_values() {
        // zeta = 0 and zeta = sqrt(3) both give sqrt(4/3): the cubic term
        // cancels the linear one at the right endpoint.
        let w0 = analytic_half_width(0.0_f64);
        assert!((w0 - 1.154700538379252).abs() < 1e-12);
        let w3 = analytic_half_width(3.0_f64.sqrt());
        assert!((w3 - w0).abs() < 1e-12);
        let w02 = analytic_half_width(0.2_f64);
        assert!((w02 - 1.728_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn interval_scan_brackets_the_theorem_disk() {
        let params = PseudoParams::new(1.0, 0.2);
        let iv = admissible_interval(&params, &cfg(), 41).unwrap();
        assert!(iv.lo <= iv.hi);
        assert_eq!(iv.analytic_lo, -iv.analytic_hi);
        let tb = theorem31_bound(0.2_f64).unwrap();
        assert!(iv.lo <= -tb && tb <= iv.hi);
        // at tau = 1 the empirical span is at least the analytic slice
        assert!(iv.lo <= iv.analytic_lo && iv.analytic_hi <= iv.hi);
    }

    #[test]
    fn negative_tau_has_no_convergent_probe() {
        let params = PseudoParams::new(-1.0, 0.2);
        assert_eq!(admissible_interval(&params, &cfg(), 9), Err(ShootError::NoConvergentProbe));
    }

    #[test]
    fn probe_count_and_zeta_are_validated() {
        let params = PseudoParams::new(1.0, 0.2);
        assert_eq!(admissible_interval(&params, &cfg(), 8), Err(ShootError::TooFewProbes { n: 8 }));
        let bad = PseudoParams::new(1.0, -1.0);
        assert!(matches!(admissible_interval(&bad, &cfg(), 9), Err(ShootError::ZetaOutOfRange { .. })));
    }

    #[test]
    fn sweep_results_are_ordered_and_parallel_agrees() {
        let params = PseudoParams::new(1.0, 0.2);
        let serial = sweep_d(&params, -2.0, 2.0, 11, &cfg(), 1);
        let parallel = sweep_d(&params, -2.0, 2.0, 11, &cfg(), 4);
        assert_eq!(serial.len(), 11);
        for w in serial.windows(2) {
            assert!(w[0].d < w[1].d);
        }
        assert_eq!(serial, parallel);
    }

    #[test]
    fn bracket_failure_is_reported() {
        // a horizon this short leaves f' far below 1 for every candidate d
        let tight = IntegratorConfig { t_max: 0.05, ..IntegratorConfig::default() };
        let err = solve_falkner_skan(&FalknerSkanParams::new(0.0_f64), &tight);
        assert!(matches!(err, Err(ShootError::BracketFailure { .. })), "{err:?}");
    }

    #[test]
    fn blasius_solution_is_bracket_independent() {
        let params = FalknerSkanParams::new(0.0_f64);
        let c = IntegratorConfig { t_max: 20.0, ..IntegratorConfig::default() };
        let a = solve_falkner_skan(&params, &c).unwrap();
        let b = solve_falkner_skan_with_bracket(&params, &c, 0.1, 0.7).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}
