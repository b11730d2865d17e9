//! Physical-plane reconstruction and verification.
//!
//! A converged profile `(f, f', f'')` turns back into a stream function
//!
//! ```text
//! psi(x, y) = a f(b y / x) + a tau log x,      a = sqrt(nu U_inf), b = sqrt(U_inf/nu)
//! ```
//!
//! for the pseudo-similarity case, or `psi = a x^alpha f(b y x^{-beta})` for
//! Falkner-Skan. All psi derivatives are evaluated analytically through the
//! chain rule on the similarity form; [`ResidualMethod::FiniteDifference`] is
//! the independent cross-check path that differences `psi` itself.
//!
//! Profiles are interpolated with cubic Hermite pieces: `f` from the stored
//! `(f, f')` pairs, `f'` (and its derivatives) from `(f', f'')`. Using the
//! derivative samples the integrator already has keeps `f'''` second-order
//! accurate, which the PDE residual needs.

use std::fmt;

use crate::integrate::Trajectory;
use crate::model::{FalknerSkanParams, FlowConstants};
use crate::{cast, Real};

/// Errors from reconstruction, interpolation and fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldError {
    /// Requested similarity variable outside the profile's sampled range.
    OutOfRange { t: f64, t_min: f64, t_max: f64 },
    /// The similarity form is singular at `x = 0`.
    NonPositiveX { x: f64 },
    /// A profile needs at least two samples.
    ProfileTooShort { n: usize },
    /// The velocity fit needs at least four samples.
    InsufficientSamples { n: usize },
    /// All abscissae equal, or all velocities zero: nothing to fit.
    DegenerateFit,
    /// Non-finite, non-positive `x`, or negative `U_e` in the fit input.
    InvalidSample { index: usize },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::OutOfRange { t, t_min, t_max } => {
                write!(f, "t = {t} outside profile range [{t_min}, {t_max}]")
            }
            FieldError::NonPositiveX { x } => write!(f, "x must be positive, got {x}"),
            FieldError::ProfileTooShort { n } => write!(f, "profile needs >= 2 samples, got {n}"),
            FieldError::InsufficientSamples { n } => write!(f, "fit needs >= 4 samples, got {n}"),
            FieldError::DegenerateFit => write!(f, "degenerate fit input"),
            FieldError::InvalidSample { index } => write!(f, "invalid fit sample at row {index}"),
        }
    }
}

impl std::error::Error for FieldError {}

/// Piecewise-cubic view of an integrated `(f, f', f'')` trajectory.
#[derive(Debug, Clone)]
pub struct Profile<R> {
    ts: Vec<R>,
    f: Vec<R>,
    fp: Vec<R>,
    fpp: Vec<R>,
}

impl<R: Real> Profile<R> {
    pub fn from_trajectory(traj: &Trajectory<R, 3>) -> Result<Self, FieldError> {
        if traj.len() < 2 {
            return Err(FieldError::ProfileTooShort { n: traj.len() });
        }
        Ok(Profile {
            ts: traj.times.clone(),
            f: traj.states.iter().map(|y| y[0]).collect(),
            fp: traj.states.iter().map(|y| y[1]).collect(),
            fpp: traj.states.iter().map(|y| y[2]).collect(),
        })
    }

    pub fn t_min(&self) -> R {
        self.ts[0]
    }

    pub fn t_max(&self) -> R {
        *self.ts.last().expect("nonempty")
    }

    /// Negative-control helper: the same profile with `f'` offset by `delta`,
    /// which should make any PDE residual check fail loudly.
    pub fn with_fp_offset(&self, delta: R) -> Self {
        let mut p = self.clone();
        for v in &mut p.fp {
            *v = *v + delta;
        }
        p
    }

    fn locate(&self, t: R) -> Result<(usize, R, R), FieldError> {
        if !(t >= self.t_min() && t <= self.t_max()) {
            return Err(FieldError::OutOfRange {
                t: t.to_f64().unwrap_or(f64::NAN),
                t_min: self.t_min().to_f64().unwrap_or(f64::NAN),
                t_max: self.t_max().to_f64().unwrap_or(f64::NAN),
            });
        }
        let i = self.ts.partition_point(|&x| x <= t).saturating_sub(1).min(self.ts.len() - 2);
        let h = self.ts[i + 1] - self.ts[i];
        let s = (t - self.ts[i]) / h;
        Ok((i, s, h))
    }

    fn hermite(ys: &[R], dys: &[R], i: usize, s: R, h: R, deriv: u8) -> R {
        let (y0, y1, d0, d1) = (ys[i], ys[i + 1], dys[i], dys[i + 1]);
        let two = cast::<R>(2.0);
        let three = cast::<R>(3.0);
        let s2 = s * s;
        match deriv {
            0 => {
                let s3 = s2 * s;
                (two * s3 - three * s2 + R::one()) * y0
                    + (s3 - two * s2 + s) * h * d0
                    + (-two * s3 + three * s2) * y1
                    + (s3 - s2) * h * d1
            }
            1 => {
                let six = cast::<R>(6.0);
                ((six * s2 - six * s) * y0
                    + (three * s2 - cast::<R>(4.0) * s + R::one()) * h * d0
                    + (-six * s2 + six * s) * y1
                    + (three * s2 - two * s) * h * d1)
                    / h
            }
            _ => {
                let six = cast::<R>(6.0);
                let twelve = cast::<R>(12.0);
                ((twelve * s - six) * y0
                    + (six * s - cast::<R>(4.0)) * h * d0
                    + (-twelve * s + six) * y1
                    + (six * s - two) * h * d1)
                    / (h * h)
            }
        }
    }

    /// Shape function `f(t)`, Hermite on the `(f, f')` samples.
    pub fn eval_f(&self, t: R) -> Result<R, FieldError> {
        let (i, s, h) = self.locate(t)?;
        Ok(Self::hermite(&self.f, &self.fp, i, s, h, 0))
    }

    /// `f'(t)`, Hermite on the `(f', f'')` samples.
    pub fn eval_fp(&self, t: R) -> Result<R, FieldError> {
        let (i, s, h) = self.locate(t)?;
        Ok(Self::hermite(&self.fp, &self.fpp, i, s, h, 0))
    }

    /// `f''(t)`, first derivative of the `f'` interpolant.
    pub fn eval_fpp(&self, t: R) -> Result<R, FieldError> {
        let (i, s, h) = self.locate(t)?;
        Ok(Self::hermite(&self.fp, &self.fpp, i, s, h, 1))
    }

    /// `f'''(t)`, second derivative of the `f'` interpolant.
    pub fn eval_fppp(&self, t: R) -> Result<R, FieldError> {
        let (i, s, h) = self.locate(t)?;
        Ok(Self::hermite(&self.fp, &self.fpp, i, s, h, 2))
    }
}

/// Stream function and velocity components at one physical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamSample<R> {
    pub x: R,
    pub y: R,
    pub psi: R,
    pub u: R,
    pub v: R,
}

/// Reconstruct the pseudo-similarity stream function at `(x, y)`:
/// `psi = a f(t) + a tau log x`, `u = U_inf f'(t)/x`, `v = (a/x)(t f'(t) - tau)`.
pub fn pseudo_stream<R: Real>(
    x: R,
    y: R,
    profile: &Profile<R>,
    constants: &FlowConstants<R>,
) -> Result<StreamSample<R>, FieldError> {
    if x <= R::zero() || x.is_nan() {
        return Err(FieldError::NonPositiveX { x: x.to_f64().unwrap_or(f64::NAN) });
    }
    let a = constants.a();
    let b = constants.b();
    let tau = constants.tau();
    let t = b * y / x;
    let f = profile.eval_f(t)?;
    let fp = profile.eval_fp(t)?;
    Ok(StreamSample {
        x,
        y,
        psi: a * f + a * tau * x.ln(),
        u: a * b * fp / x,
        v: (a / x) * (t * fp - tau),
    })
}

/// Reconstruct the Falkner-Skan stream function at `(x, y)`:
/// `psi = a x^alpha f(t)`, `t = b y x^{-beta}`, `u = U_inf x^m f'(t)`,
/// `v = -a x^{alpha-1} (alpha f - beta t f')`.
pub fn fs_stream<R: Real>(
    x: R,
    y: R,
    profile: &Profile<R>,
    constants: &FlowConstants<R>,
    params: &FalknerSkanParams<R>,
) -> Result<StreamSample<R>, FieldError> {
    if x <= R::zero() || x.is_nan() {
        return Err(FieldError::NonPositiveX { x: x.to_f64().unwrap_or(f64::NAN) });
    }
    let a = constants.a();
    let b = constants.b();
    let t = b * y * x.powf(-params.beta);
    let f = profile.eval_f(t)?;
    let fp = profile.eval_fp(t)?;
    let psi = a * x.powf(params.alpha) * f;
    let u = a * b * x.powf(params.m) * fp;
    let v = -a * x.powf(params.alpha - R::one()) * (params.alpha * f - params.beta * t * fp);
    Ok(StreamSample { x, y, psi, u, v })
}

/// How to evaluate the boundary-layer PDE residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualMethod {
    /// Analytic chain rule through the similarity form.
    ChainRule,
    /// Second-order central differences of `psi` on the physical plane; the
    /// independent path, never sharing derivatives with `ChainRule`.
    FiniteDifference,
}

/// Evaluation grid for [`pde_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<R> {
    pub x: (R, R),
    pub y: (R, R),
    pub nx: usize,
    pub ny: usize,
}

impl<R: Real> GridSpec<R> {
    fn points(&self) -> impl Iterator<Item = (R, R)> + '_ {
        let coord = |lo: R, hi: R, n: usize, i: usize| {
            lo + (hi - lo) * R::from_usize(i).expect("index") / R::from_usize(n - 1).expect("size")
        };
        (0..self.nx).flat_map(move |ix| {
            (0..self.ny).map(move |iy| {
                (coord(self.x.0, self.x.1, self.nx, ix), coord(self.y.0, self.y.1, self.ny, iy))
            })
        })
    }
}

/// Maximum relative residual of the momentum equation
/// `psi_y psi_xy - psi_x psi_yy = nu psi_yyy - U_inf^2 x^{-3}` over the grid,
/// normalized by the largest right-hand side magnitude seen.
pub fn pde_residual<R: Real>(
    profile: &Profile<R>,
    constants: &FlowConstants<R>,
    grid: &GridSpec<R>,
    method: ResidualMethod,
) -> Result<R, FieldError> {
    assert!(grid.nx >= 2 && grid.ny >= 2, "residual grid below 2x2");
    let a = constants.a();
    let b = constants.b();
    let nu = constants.nu;
    let u_inf = constants.u_inf;
    let tau = constants.tau();

    let mut worst = R::zero();
    let mut rhs_max = R::zero();
    for (x, y) in grid.points() {
        if x <= R::zero() || x.is_nan() {
            return Err(FieldError::NonPositiveX { x: x.to_f64().unwrap_or(f64::NAN) });
        }
        let (lhs, rhs) = match method {
            ResidualMethod::ChainRule => {
                let t = b * y / x;
                let fp = profile.eval_fp(t)?;
                let fpp = profile.eval_fpp(t)?;
                let fppp = profile.eval_fppp(t)?;
                let x2 = x * x;
                let x3 = x2 * x;
                let psi_y = a * b * fp / x;
                let psi_x = -(a / x) * (t * fp - tau);
                let psi_yy = a * b * b * fpp / x2;
                let psi_xy = -(a * b / x2) * (fp + t * fpp);
                let psi_yyy = a * b * b * b * fppp / x3;
                (psi_y * psi_xy - psi_x * psi_yy, nu * psi_yyy - u_inf * u_inf / x3)
            }
            ResidualMethod::FiniteDifference => {
                let dx = cast::<R>(1e-3);
                let dy = cast::<R>(1e-3);
                let psi = |x: R, y: R| -> Result<R, FieldError> {
                    let t = b * y / x;
                    Ok(a * profile.eval_f(t)? + a * tau * x.ln())
                };
                let two = cast::<R>(2.0);
                let four = cast::<R>(4.0);
                let psi_y = (psi(x, y + dy)? - psi(x, y - dy)?) / (two * dy);
                let psi_x = (psi(x + dx, y)? - psi(x - dx, y)?) / (two * dx);
                let psi_yy = (psi(x, y + dy)? - two * psi(x, y)? + psi(x, y - dy)?) / (dy * dy);
                let psi_xy = (psi(x + dx, y + dy)? - psi(x + dx, y - dy)?
                    - psi(x - dx, y + dy)?
                    + psi(x - dx, y - dy)?)
                    / (four * dx * dy);
                let psi_yyy = (psi(x, y + two * dy)? - two * psi(x, y + dy)?
                    + two * psi(x, y - dy)?
                    - psi(x, y - two * dy)?)
                    / (two * dy * dy * dy);
                (psi_y * psi_xy - psi_x * psi_yy, nu * psi_yyy - u_inf * u_inf / (x * x * x))
            }
        };
        worst = worst.max((lhs - rhs).abs());
        rhs_max = rhs_max.max(rhs.abs());
    }
    Ok(worst / rhs_max)
}

/// Fitted external-velocity law `U_e^2 = c1 x^{2m} + c2`.
///
/// `rms_residual` is in `U_e^2` units: `sqrt(SSE / n)` of the squared-velocity
/// residuals the fit minimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityFit<R> {
    pub c1: R,
    pub c2: R,
    pub m: R,
    pub rms_residual: R,
}

/// Nonnegative least squares in `(c1, c2)` for fixed `m`: the unconstrained
/// 2x2 solve plus both single-coefficient fits, best SSE wins.
fn linear_fit<R: Real>(xs: &[R], u2: &[R], m: R) -> (R, R, R) {
    let two_m = cast::<R>(2.0) * m;
    let n = R::from_usize(xs.len()).expect("sample count");
    let mut s_pp = R::zero();
    let mut s_p = R::zero();
    let mut s_pu = R::zero();
    let mut s_u = R::zero();
    for (&x, &u) in xs.iter().zip(u2) {
        let p = x.powf(two_m);
        s_pp = s_pp + p * p;
        s_p = s_p + p;
        s_pu = s_pu + p * u;
        s_u = s_u + u;
    }
    let sse = |c1: R, c2: R| -> R {
        xs.iter()
            .zip(u2)
            .map(|(&x, &u)| {
                let r = c1 * x.powf(two_m) + c2 - u;
                r * r
            })
            .fold(R::zero(), |acc, r| acc + r)
    };
    let mut best: Option<(R, R, R)> = None;
    let mut consider = |c1: R, c2: R| {
        if c1 >= R::zero() && c2 >= R::zero() {
            let s = sse(c1, c2);
            if best.is_none_or(|(bs, _, _)| s < bs) {
                best = Some((s, c1, c2));
            }
        }
    };
    let det = s_pp * n - s_p * s_p;
    if det.abs() > R::epsilon() * s_pp * n {
        consider((s_pu * n - s_p * s_u) / det, (s_pp * s_u - s_p * s_pu) / det);
    }
    if s_pp > R::zero() {
        consider(s_pu.max(R::zero()) / s_pp, R::zero());
    }
    consider(R::zero(), (s_u / n).max(R::zero()));
    let (s, c1, c2) = best.expect("constant fit always admissible");
    (c1, c2, s)
}

/// Least-squares fit of `(c1, c2, m)` to samples `(x, U_e)`, minimizing the
/// squared-velocity residuals. The problem is linear in `(c1, c2)` for fixed
/// `m`; the outer search scans `m` over `[-3, 3]` and refines the best
/// bracket by golden section.
pub fn fit_external_velocity<R: Real>(samples: &[(R, R)]) -> Result<VelocityFit<R>, FieldError> {
    if samples.len() < 4 {
        return Err(FieldError::InsufficientSamples { n: samples.len() });
    }
    for (i, &(x, ue)) in samples.iter().enumerate() {
        if !(x > R::zero() && x.is_finite() && ue >= R::zero() && ue.is_finite()) {
            return Err(FieldError::InvalidSample { index: i });
        }
    }
    let xs: Vec<R> = samples.iter().map(|&(x, _)| x).collect();
    let u2: Vec<R> = samples.iter().map(|&(_, u)| u * u).collect();
    if xs.iter().all(|&x| x == xs[0]) || u2.iter().all(|&u| u == R::zero()) {
        return Err(FieldError::DegenerateFit);
    }

    let sse_at = |m: R| linear_fit(&xs, &u2, m).2;
    let m_lo = cast::<R>(-3.0);
    let m_hi = cast::<R>(3.0);
    let n_scan = 241;
    let step = (m_hi - m_lo) / cast::<R>((n_scan - 1) as f64);
    let mut best_i = 0usize;
    let mut best_s = R::infinity();
    for i in 0..n_scan {
        let m = m_lo + step * cast::<R>(i as f64);
        let s = sse_at(m);
        if s < best_s {
            best_s = s;
            best_i = i;
        }
    }
    let mut a = m_lo + step * cast::<R>(best_i.saturating_sub(1) as f64);
    let mut b = m_lo + step * cast::<R>(best_i.min(n_scan - 2).saturating_add(1) as f64);

    // golden section to scalar resolution
    let gr = (cast::<R>(5.0).sqrt() - R::one()) / cast::<R>(2.0);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = sse_at(c);
    let mut fd = sse_at(d);
    let tol = cast::<R>(1e-12);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = sse_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = sse_at(d);
        }
    }
    let m = (a + b) / cast::<R>(2.0);
    let (c1, c2, sse) = linear_fit(&xs, &u2, m);
    let n = R::from_usize(xs.len()).expect("sample count");
    Ok(VelocityFit { c1, c2, m, rms_residual: (sse / n).sqrt() })
}

/// Similarity exponents `alpha = (m+1)/2`, `beta = -(m-1)/2`; they sum to one.
pub fn similarity_exponents<R: Real>(m: R) -> (R, R) {
    let two = cast::<R>(2.0);
    ((m + R::one()) / two, -(m - R::one()) / two)
}
