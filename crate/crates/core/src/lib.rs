//! Similarity and pseudo-similarity boundary-layer flows.
//!
//! This crate integrates the Falkner-Skan family of similarity equations
//!
//! ```text
//! f''' + (m+1)/2 f f'' + m (1 - f'^2) = 0,   f(0) = f'(0) = 0, f'(inf) = 1,
//! ```
//!
//! together with the pseudo-similarity problem that arises when the external
//! velocity varies inversely with the streamwise coordinate (`U_e = U_inf / x`),
//!
//! ```text
//! theta'' + tau theta' + theta^2 - 1 = 0,   theta(0) = zeta, theta(inf) = 1,
//! ```
//!
//! where `tau` is the wall suction/injection parameter and `zeta = U_w / U_inf`
//! the wall-to-stream velocity ratio.
//!
//! The pieces:
//!
//! - [`model`] - right-hand sides, parameter conversions, the exact tanh branch
//!   solution of the undamped equation.
//! - [`integrate`] - fixed-step classical RK4 with convergence, divergence and
//!   level-crossing detection.
//! - [`shoot`] - shooting solvers: skin friction `f''(0)` for Falkner-Skan,
//!   admissible initial-slope intervals for the pseudo-similarity problem.
//! - [`phase`] - phase-plane analytics: Lyapunov energy, equilibrium
//!   classification, the homoclinic separatrix and the basin of attraction.
//! - [`field`] - physical-plane reconstruction: stream function, velocity
//!   components, boundary-layer PDE residuals and external-velocity fits.
//!
//! All numerics are generic over the scalar type through the [`Real`] trait;
//! `f64` aliases for the common types live at the crate root.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive};

pub mod field;
pub mod integrate;
pub mod model;
pub mod phase;
pub mod shoot;

/// Floating-point scalar the solvers are generic over: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + LowerExp + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + LowerExp + Send + Sync + 'static {}

/// Lossless-enough constant injection; panics only for values outside the
/// scalar's range, which none of the crate's constants are.
#[inline]
pub(crate) fn cast<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("constant representable in scalar type")
}

pub type FalknerSkanParams64 = model::FalknerSkanParams<f64>;
pub type PseudoParams64 = model::PseudoParams<f64>;
pub type FlowConstants64 = model::FlowConstants<f64>;
pub type PhaseState64 = model::PhaseState<f64>;
pub type ThirdOrderState64 = model::ThirdOrderState<f64>;
pub type IntegratorConfig64 = integrate::IntegratorConfig<f64>;
pub type PhaseTrajectory64 = integrate::Trajectory<f64, 2>;
pub type ThirdOrderTrajectory64 = integrate::Trajectory<f64, 3>;
pub type ShootResult64 = shoot::ShootResult<f64>;
pub type AdmissibleInterval64 = shoot::AdmissibleInterval<f64>;
pub type EquilibriumReport64 = phase::EquilibriumReport<f64>;
pub type BasinMap64 = phase::BasinMap<f64>;
pub type Profile64 = field::Profile<f64>;
pub type StreamSample64 = field::StreamSample<f64>;
pub type VelocityFit64 = field::VelocityFit<f64>;
