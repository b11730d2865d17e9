//! ODE families, parameter conversions and closed-form solutions.
//!
//! Three fixed right-hand sides cover everything downstream:
//!
//! - [`fs_rhs`]: the Falkner-Skan equation `f''' = -(m+1)/2 f f'' - m (1 - f'^2)`,
//! - [`pseudo_rhs`]: the planar system `theta' = phi`, `phi' = -tau phi + 1 - theta^2`,
//! - [`pseudo_rhs3`]: its third-order form `f''' = -tau f'' - f'^2 + 1`, which keeps
//!   the shape function `f` itself available for stream-function reconstruction.
//!
//! All functions here are pure; errors are explicit values, never panics.

use std::fmt;

use crate::{cast, Real};

/// Errors from parameter conversions and the closed-form branch solution.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// `gamma = 2m/(m+1)` has no value at `m = -1`; that regime is served by
    /// the pseudo-similarity path instead.
    GammaUndefined,
    /// `m = gamma/(2-gamma)` has no value at `gamma = 2`.
    MUndefined,
    /// The tanh branch solution needs `-1 < zeta <= 2`.
    ZetaOutOfRange { zeta: f64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::GammaUndefined => write!(f, "gamma = 2m/(m+1) is undefined at m = -1"),
            ModelError::MUndefined => write!(f, "m = gamma/(2-gamma) is undefined at gamma = 2"),
            ModelError::ZetaOutOfRange { zeta } => {
                write!(f, "tanh branch requires -1 < zeta <= 2, got {zeta}")
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// Parameters of the Falkner-Skan equation for external velocity `U_e = U_inf x^m`.
///
/// The similarity exponents `alpha = (m+1)/2` and `beta = -(m-1)/2` always sum
/// to one; `gamma = 2m/(m+1)` is the exponent of the equivalent
/// Spalding-normalized equation and is undefined at `m = -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FalknerSkanParams<R> {
    pub m: R,
    pub alpha: R,
    pub beta: R,
    gamma: Option<R>,
}

impl<R: Real> FalknerSkanParams<R> {
    pub fn new(m: R) -> Self {
        let two = cast::<R>(2.0);
        let alpha = (m + R::one()) / two;
        let beta = -(m - R::one()) / two;
        let gamma = if m == -R::one() {
            None
        } else {
            Some(two * m / (m + R::one()))
        };
        FalknerSkanParams { m, alpha, beta, gamma }
    }

    /// `2m/(m+1)`, or an error at `m = -1`.
    pub fn gamma(&self) -> Result<R, ModelError> {
        self.gamma.ok_or(ModelError::GammaUndefined)
    }
}

/// Parameters of the pseudo-similarity problem (`m = -1`).
///
/// `tau = V_w (nu U_inf)^{-1/2}` is the suction/injection parameter (`tau > 0`
/// means suction); `zeta = U_w / U_inf` the wall-to-stream velocity ratio.
/// Physical runs use `zeta` in `[0, 1)`; basin analysis admits `(-1, sqrt(3)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoParams<R> {
    pub tau: R,
    pub zeta: R,
}

impl<R: Real> PseudoParams<R> {
    pub fn new(tau: R, zeta: R) -> Self {
        PseudoParams { tau, zeta }
    }

    /// True when `zeta` lies in the range the basin analysis covers, `(-1, sqrt(3)]`.
    pub fn zeta_in_analysis_range(&self) -> bool {
        self.zeta > -R::one() && self.zeta <= cast::<R>(3.0).sqrt()
    }
}

/// Dimensional flow constants; `tau` and `zeta` derive from these.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConstants<R> {
    /// Kinematic viscosity, positive.
    pub nu: R,
    /// External velocity scale, positive.
    pub u_inf: R,
    /// Wall stretching scale, nonnegative; below `u_inf` for the pseudo-similarity BVP.
    pub u_w: R,
    /// Transpiration scale, any sign.
    pub v_w: R,
}

impl<R: Real> FlowConstants<R> {
    pub fn new(nu: R, u_inf: R, u_w: R, v_w: R) -> Self {
        assert!(nu > R::zero() && u_inf > R::zero(), "nu and U_inf must be positive");
        assert!(u_w >= R::zero(), "U_w must be nonnegative");
        FlowConstants { nu, u_inf, u_w, v_w }
    }

    /// `V_w (nu U_inf)^{-1/2}`.
    pub fn tau(&self) -> R {
        self.v_w / (self.nu * self.u_inf).sqrt()
    }

    /// `U_w / U_inf`.
    pub fn zeta(&self) -> R {
        self.u_w / self.u_inf
    }

    /// Stream-function scale `a = sqrt(nu U_inf)`.
    pub fn a(&self) -> R {
        (self.nu * self.u_inf).sqrt()
    }

    /// Similarity-variable scale `b = sqrt(U_inf / nu)`.
    pub fn b(&self) -> R {
        (self.u_inf / self.nu).sqrt()
    }

    pub fn pseudo_params(&self) -> PseudoParams<R> {
        PseudoParams::new(self.tau(), self.zeta())
    }
}

/// A point `(t, theta, theta')` of the second-order pseudo-similarity system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState<R> {
    pub t: R,
    /// Dimensionless velocity `theta = f'`.
    pub theta: R,
    /// `phi = theta'`.
    pub phi: R,
}

impl<R: Real> PhaseState<R> {
    pub fn new(t: R, theta: R, phi: R) -> Self {
        PhaseState { t, theta, phi }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.theta.is_finite() && self.phi.is_finite()
    }
}

/// A point `(t, f, f', f'')` of a third-order similarity system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdOrderState<R> {
    pub t: R,
    /// Dimensionless stream function.
    pub f: R,
    pub fp: R,
    pub fpp: R,
}

impl<R: Real> ThirdOrderState<R> {
    pub fn new(t: R, f: R, fp: R, fpp: R) -> Self {
        ThirdOrderState { t, f, fp, fpp }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.f.is_finite() && self.fp.is_finite() && self.fpp.is_finite()
    }
}

/// Falkner-Skan right-hand side: `(f', f'', f''')` with
/// `f''' = -(m+1)/2 f f'' - m (1 - f'^2)`.
#[inline]
pub fn fs_rhs<R: Real>(state: &ThirdOrderState<R>, params: &FalknerSkanParams<R>) -> [R; 3] {
    let fppp = -params.alpha * state.f * state.fpp
        - params.m * (R::one() - state.fp * state.fp);
    [state.fp, state.fpp, fppp]
}

/// Pseudo-similarity planar system: `(theta', phi')` with
/// `phi' = -tau phi + 1 - theta^2`.
#[inline]
pub fn pseudo_rhs<R: Real>(state: &PhaseState<R>, tau: R) -> [R; 2] {
    [state.phi, -tau * state.phi + R::one() - state.theta * state.theta]
}

/// Third-order pseudo-similarity equation: `(f', f'', f''')` with
/// `f''' = -tau f'' - f'^2 + 1`.
#[inline]
pub fn pseudo_rhs3<R: Real>(state: &ThirdOrderState<R>, tau: R) -> [R; 3] {
    [state.fp, state.fpp, -tau * state.fpp - state.fp * state.fp + R::one()]
}

/// `gamma = 2m/(m+1)`; undefined at `m = -1`.
pub fn gamma_of_m<R: Real>(m: R) -> Result<R, ModelError> {
    if m == -R::one() {
        return Err(ModelError::GammaUndefined);
    }
    Ok(cast::<R>(2.0) * m / (m + R::one()))
}

/// Inverse of [`gamma_of_m`]: `m = gamma/(2-gamma)`; undefined at `gamma = 2`.
pub fn m_of_gamma<R: Real>(gamma: R) -> Result<R, ModelError> {
    let two = cast::<R>(2.0);
    if gamma == two {
        return Err(ModelError::MUndefined);
    }
    Ok(gamma / (two - gamma))
}

/// Branch selector for the tanh solution: the `+` branch decays toward
/// `theta = -1` as `t` grows, the `-` branch first climbs toward the
/// turning value `2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn signum<R: Real>(self) -> R {
        match self {
            Branch::Plus => R::one(),
            Branch::Minus => -R::one(),
        }
    }
}

#[inline]
fn tanh_shift<R: Real>(zeta: R) -> Result<R, ModelError> {
    // arctanh argument sqrt((2-zeta)/3) must sit in [0,1): -1 < zeta <= 2.
    if !(zeta > -R::one() && zeta <= cast::<R>(2.0)) || !zeta.is_finite() {
        return Err(ModelError::ZetaOutOfRange { zeta: zeta.to_f64().unwrap_or(f64::NAN) });
    }
    let arg = ((cast::<R>(2.0) - zeta) / cast::<R>(3.0)).sqrt();
    Ok(arg.atanh())
}

/// Exact solution of the undamped equation `theta'' + theta^2 - 1 = 0` on the
/// energy level through the saddle:
///
/// ```text
/// theta(t) = 2 - 3 tanh^2( s t / sqrt(2) + arctanh sqrt((2 - zeta)/3) )
/// ```
///
/// with `theta(0) = zeta` and `theta -> -1` along either branch.
pub fn exact_tanh<R: Real>(t: R, zeta: R, sign: Branch) -> Result<R, ModelError> {
    let shift = tanh_shift(zeta)?;
    let u = sign.signum::<R>() * t / cast::<R>(2.0).sqrt() + shift;
    Ok(cast::<R>(2.0) - cast::<R>(3.0) * u.tanh() * u.tanh())
}

/// Analytic derivative `theta'(t)` of [`exact_tanh`]. At `t = 0` this is the
/// slope on the energy level `E = 2/3`, i.e. `theta'(0)^2 = 2(2/3 + zeta - zeta^3/3)`.
pub fn exact_tanh_slope<R: Real>(t: R, zeta: R, sign: Branch) -> Result<R, ModelError> {
    let shift = tanh_shift(zeta)?;
    let s = sign.signum::<R>();
    let u = s * t / cast::<R>(2.0).sqrt() + shift;
    let sech2 = R::one() - u.tanh() * u.tanh();
    Ok(-cast::<R>(3.0) * cast::<R>(2.0).sqrt() * s * u.tanh() * sech2)
}
