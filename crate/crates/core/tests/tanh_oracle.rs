//! The closed-form tanh branch as an integration oracle: RK4 on
//! `theta'' = 1 - theta^2` from the branch initial data must track the
//! formula to discretization accuracy, and the error must shrink at fourth
//! order.

use fsbl::integrate::{integrate, IntegratorConfig, StopReason};
use fsbl::model::{exact_tanh, exact_tanh_slope, pseudo_rhs, Branch, PhaseState};

fn max_error_vs_closed_form(zeta: f64, h: f64) -> f64 {
    let d0 = exact_tanh_slope(0.0, zeta, Branch::Plus).unwrap();
    let cfg = IntegratorConfig { h, t_max: 10.0, ..IntegratorConfig::default() };
    let traj = integrate(
        |y: &[f64; 2]| pseudo_rhs(&PhaseState::new(0.0, y[0], y[1]), 0.0),
        [zeta, d0],
        0,
        &cfg,
    );
    assert_eq!(traj.stop, StopReason::Horizon);
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, y)| (y[0] - exact_tanh(t, zeta, Branch::Plus).unwrap()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn rk4_tracks_the_tanh_branch() {
    let err = max_error_vs_closed_form(0.5, 1e-3);
    assert!(err < 1e-6, "max error {err}");
}

#[test]
fn halving_h_shrinks_error_at_fourth_order() {
    let e1 = max_error_vs_closed_form(0.5, 1e-3);
    let e2 = max_error_vs_closed_form(0.5, 5e-4);
    assert!(e1 / e2 >= 12.0, "ratio {}", e1 / e2);
}

#[test]
fn both_branches_and_the_turning_start() {
    // minus branch climbs to the turning value 2 before heading to -1
    let d0 = exact_tanh_slope(0.0, 0.5, Branch::Minus).unwrap();
    assert!(d0 > 0.0);
    let peak = (0..2000)
        .map(|k| exact_tanh(k as f64 * 5e-3, 0.5, Branch::Minus).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((peak - 2.0).abs() < 1e-4, "peak {peak}");

    // zeta = 2 starts exactly at the turning point with zero slope
    assert_eq!(exact_tanh(0.0, 2.0, Branch::Plus).unwrap(), 2.0);
    assert_eq!(exact_tanh_slope(0.0, 2.0, Branch::Plus).unwrap(), 0.0);
    let err = max_error_vs_closed_form(2.0, 1e-3);
    assert!(err < 1e-6, "max error from the turning point {err}");
}
