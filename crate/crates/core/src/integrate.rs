//! Fixed-step classical RK4 with event detection.
//!
//! The integrator is deliberately fixed-step: runs are bit-reproducible, the
//! fourth-order convergence is directly checkable by halving `h`, and the
//! horizons involved are short enough that adaptivity buys nothing.
//!
//! Systems are autonomous first-order arrays `y' = rhs(y)`. One component is
//! designated the *velocity* component `theta` (index [`Trajectory::theta_index`]);
//! the component after it is `theta'`. Both feed the convergence test, and
//! sign changes of `theta - 1` are recorded as crossings.

use std::fmt;
use std::io::{self, Write};

use crate::{cast, Real};

/// Why an integration stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum StopReason<R> {
    /// `|theta - 1| < conv_tol` and `|theta'| < conv_tol` held from `t`
    /// onward for at least `conv_hold` time units.
    Converged { t: R },
    /// A state component left `[-div_bound, div_bound]` or became non-finite at `t`.
    Diverged { t: R },
    /// `t_max` reached without another event.
    Horizon,
    /// Reserved for caller-defined events.
    Event { tag: String },
}

impl<R> StopReason<R> {
    pub fn is_converged(&self) -> bool {
        matches!(self, StopReason::Converged { .. })
    }

    pub fn is_diverged(&self) -> bool {
        matches!(self, StopReason::Diverged { .. })
    }
}

/// Direction of a `theta = 1` crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
}

/// A located level crossing; `t` comes from linear interpolation within the
/// step and is only used for reporting, so its O(h^2) error is fine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing<R> {
    pub t: R,
    pub direction: Direction,
}

/// Step size, horizon and event thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<R> {
    /// Fixed step, positive.
    pub h: R,
    /// Integration horizon, positive and at least `h`.
    pub t_max: R,
    /// Convergence tolerance on `|theta - 1|` and `|theta'|`.
    pub conv_tol: R,
    /// How long the convergence test must hold, in time units; spirals pass
    /// near the equilibrium repeatedly, so a single small sample proves nothing.
    pub conv_hold: R,
    /// Divergence bound on any component magnitude.
    pub div_bound: R,
}

impl<R: Real> Default for IntegratorConfig<R> {
    fn default() -> Self {
        IntegratorConfig {
            h: cast(1e-3),
            t_max: cast(100.0),
            conv_tol: cast(1e-6),
            conv_hold: cast(1.0),
            div_bound: cast(1e2),
        }
    }
}

/// Invalid [`IntegratorConfig`] field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid integrator config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl<R: Real> IntegratorConfig<R> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.h > R::zero() && self.h.is_finite()) {
            return Err(ConfigError(format!("step h must be positive, got {}", self.h)));
        }
        if !(self.t_max > R::zero() && self.t_max.is_finite()) {
            return Err(ConfigError(format!("horizon t_max must be positive, got {}", self.t_max)));
        }
        if self.h > self.t_max {
            return Err(ConfigError(format!("step h = {} exceeds horizon t_max = {}", self.h, self.t_max)));
        }
        if self.conv_tol <= R::zero() || self.conv_tol.is_nan() {
            return Err(ConfigError(format!("conv_tol must be positive, got {}", self.conv_tol)));
        }
        if self.conv_hold <= R::zero() || self.conv_hold.is_nan() {
            return Err(ConfigError(format!("conv_hold must be positive, got {}", self.conv_hold)));
        }
        if self.div_bound <= R::zero() || self.div_bound.is_nan() {
            return Err(ConfigError(format!("div_bound must be positive, got {}", self.div_bound)));
        }
        Ok(())
    }

    pub fn with_h(mut self, h: R) -> Self {
        self.h = h;
        self
    }

    pub fn with_t_max(mut self, t_max: R) -> Self {
        self.t_max = t_max;
        self
    }
}

/// An integrated orbit: samples at `t_k = k h` (plus a final partial sample
/// when the horizon is not a multiple of `h`), the stop reason, and every
/// located crossing of `theta = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<R, const N: usize> {
    pub times: Vec<R>,
    pub states: Vec<[R; N]>,
    pub stop: StopReason<R>,
    pub crossings: Vec<Crossing<R>>,
    /// Which state component is the velocity `theta`; `theta_index + 1` is `theta'`.
    pub theta_index: usize,
}

impl<R: Real, const N: usize> Trajectory<R, N> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> R {
        *self.times.last().expect("trajectory has at least the initial sample")
    }

    pub fn final_state(&self) -> [R; N] {
        *self.states.last().expect("trajectory has at least the initial sample")
    }

    /// `theta` at sample `i`.
    pub fn theta(&self, i: usize) -> R {
        self.states[i][self.theta_index]
    }

    /// `theta'` at sample `i`.
    pub fn phi(&self, i: usize) -> R {
        self.states[i][self.theta_index + 1]
    }

    /// CSV with header `t,theta,phi` (planar) or `t,theta,phi,f` (third
    /// order); floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        if N == 3 {
            writeln!(w, "t,theta,phi,f")?;
        } else {
            writeln!(w, "t,theta,phi")?;
        }
        for (t, y) in self.times.iter().zip(&self.states) {
            write!(w, "{:.16e},{:.16e},{:.16e}", t, y[self.theta_index], y[self.theta_index + 1])?;
            if N == 3 {
                write!(w, ",{:.16e}", y[0])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// One classical RK4 update of the autonomous system `y' = rhs(y)`.
///
/// Local error O(h^5). If the field overflows during a stage the result is
/// non-finite; [`integrate`] classifies that as divergence.
#[inline]
pub fn rk4_step<R: Real, F, const N: usize>(rhs: F, y: &[R; N], h: R) -> [R; N]
where
    F: Fn(&[R; N]) -> [R; N],
{
    let half = h / cast::<R>(2.0);
    let two = cast::<R>(2.0);
    let k1 = rhs(y);
    let k2 = rhs(&offset(y, half, &k1));
    let k3 = rhs(&offset(y, half, &k2));
    let k4 = rhs(&offset(y, h, &k3));
    let sixth = h / cast::<R>(6.0);
    std::array::from_fn(|i| y[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
}

#[inline]
fn offset<R: Real, const N: usize>(y: &[R; N], c: R, d: &[R; N]) -> [R; N] {
    std::array::from_fn(|i| y[i] + c * d[i])
}

/// Integrate with the full event set: convergence, divergence, horizon.
pub fn integrate<R: Real, F, const N: usize>(
    rhs: F,
    y0: [R; N],
    theta_index: usize,
    cfg: &IntegratorConfig<R>,
) -> Trajectory<R, N>
where
    F: Fn(&[R; N]) -> [R; N],
{
    run(rhs, y0, theta_index, cfg, true)
}

/// Integrate to the horizon without the convergence stop; divergence and
/// crossings are still detected. This is the variant for shooting miss
/// functions, which need the state at `t_max` itself.
pub fn integrate_to_horizon<R: Real, F, const N: usize>(
    rhs: F,
    y0: [R; N],
    theta_index: usize,
    cfg: &IntegratorConfig<R>,
) -> Trajectory<R, N>
where
    F: Fn(&[R; N]) -> [R; N],
{
    run(rhs, y0, theta_index, cfg, false)
}

fn run<R: Real, F, const N: usize>(
    rhs: F,
    y0: [R; N],
    theta_index: usize,
    cfg: &IntegratorConfig<R>,
    stop_on_convergence: bool,
) -> Trajectory<R, N>
where
    F: Fn(&[R; N]) -> [R; N],
{
    assert!(theta_index + 1 < N, "theta' must be a state component");
    debug_assert!(cfg.validate().is_ok(), "invalid config: {:?}", cfg);

    let one = R::one();
    let capacity = (cfg.t_max / cfg.h).to_usize().unwrap_or(0).saturating_add(2);
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    let mut crossings = Vec::new();

    let mut t = R::zero();
    let mut y = y0;
    times.push(t);
    states.push(y);

    let sign_of = |g: R| -> i8 {
        if g > R::zero() {
            1
        } else if g < R::zero() {
            -1
        } else {
            0
        }
    };
    let mut last_sign = sign_of(y[theta_index] - one);

    let in_window = |y: &[R; N]| -> bool {
        (y[theta_index] - one).abs() < cfg.conv_tol && y[theta_index + 1].abs() < cfg.conv_tol
    };
    let mut window_start = if stop_on_convergence && in_window(&y) { Some(t) } else { None };

    let mut step: u64 = 0;
    let stop = loop {
        if t >= cfg.t_max {
            break StopReason::Horizon;
        }
        // Sample times come from k*h, not accumulation, so they are exact
        // labels of the constant-step grid; the last step shrinks to land
        // on t_max.
        let t_full = R::from_u64(step + 1).expect("step count representable") * cfg.h;
        let (h_step, t_next) = if t_full < cfg.t_max {
            (cfg.h, t_full)
        } else {
            (cfg.t_max - t, cfg.t_max)
        };
        let y_next = rk4_step(&rhs, &y, h_step);
        step += 1;

        if y_next.iter().any(|v| !v.is_finite()) {
            break StopReason::Diverged { t: t_next };
        }

        let g_old = y[theta_index] - one;
        let g_new = y_next[theta_index] - one;
        let s_new = sign_of(g_new);
        if s_new != 0 && last_sign != 0 && s_new != last_sign {
            let t_cross = t + h_step * g_old / (g_old - g_new);
            crossings.push(Crossing {
                t: t_cross,
                direction: if s_new > 0 { Direction::Rising } else { Direction::Falling },
            });
        }
        if s_new != 0 {
            last_sign = s_new;
        }

        times.push(t_next);
        states.push(y_next);
        t = t_next;
        y = y_next;

        if y.iter().any(|v| v.abs() > cfg.div_bound) {
            break StopReason::Diverged { t };
        }

        if stop_on_convergence {
            if in_window(&y) {
                match window_start {
                    None => window_start = Some(t),
                    Some(start) => {
                        if t - start >= cfg.conv_hold {
                            break StopReason::Converged { t: start };
                        }
                    }
                }
            } else {
                window_start = None;
            }
        }
    };

    Trajectory { times, states, stop, crossings, theta_index }
}
