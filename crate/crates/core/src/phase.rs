//! Phase-plane analytics for the pseudo-similarity system.
//!
//! The planar system `theta' = phi`, `phi' = -tau phi + 1 - theta^2` has
//! equilibria at `(+/-1, 0)`. The Lyapunov energy
//!
//! ```text
//! E(theta, phi) = phi^2/2 + theta^3/3 - theta
//! ```
//!
//! is conserved when `tau = 0` and dissipated at rate `dE/dt = -tau phi^2`
//! otherwise. The level `E = 2/3` through `(2, 0)` is a homoclinic loop at
//! the saddle `(-1, 0)`; its open interior
//!
//! ```text
//! P = { (zeta, d) : zeta > -1,  d^2/2 + zeta (zeta^2/3 - 1) < 2/3 }
//! ```
//!
//! is a basin of attraction of `(1, 0)` for every `tau > 0`.

use std::fmt;
use std::io::{self, Write};

use num_complex::Complex;
use rayon::prelude::*;

use crate::integrate::{IntegratorConfig, StopReason, Trajectory};
use crate::model::PseudoParams;
use crate::shoot::{shoot_pseudo, ShotClass};
use crate::{cast, Real};

/// Errors from the phase analytics.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseError {
    /// The separatrix curve is only defined for `theta` in `[-1, 2]`.
    ThetaOutOfRange { theta: f64 },
    /// Basin analysis needs dissipation; the `tau = 0` center has no basin.
    TauNotPositive { tau: f64 },
    /// Basin rasters need at least a 2 x 2 grid.
    GridTooSmall { nz: usize, nd: usize },
}

impl fmt::Display for PhaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseError::ThetaOutOfRange { theta } => {
                write!(f, "separatrix defined on theta in [-1,2], got {theta}")
            }
            PhaseError::TauNotPositive { tau } => {
                write!(f, "basin analysis requires tau > 0, got {tau}")
            }
            PhaseError::GridTooSmall { nz, nd } => write!(f, "grid {nz}x{nd} below 2x2"),
        }
    }
}

impl std::error::Error for PhaseError {}

/// Lyapunov energy `phi^2/2 + theta^3/3 - theta`.
#[inline]
pub fn energy<R: Real>(theta: R, phi: R) -> R {
    phi * phi / cast::<R>(2.0) + theta * theta * theta / cast::<R>(3.0) - theta
}

/// Strict membership in the open basin `P`: `zeta > -1` and
/// `d^2/2 + zeta (zeta^2/3 - 1) < 2/3`, evaluated in the cleared-denominator
/// form `3 d^2 + 2 zeta^3 - 6 zeta < 4` so that exactly-representable
/// separatrix points like `(2, 0)` land on the boundary, not inside.
#[inline]
pub fn in_basin<R: Real>(zeta: R, d: R) -> bool {
    zeta > -R::one() && basin_lhs6(zeta, d) < cast::<R>(4.0)
}

/// `6 * (d^2/2 + zeta (zeta^2/3 - 1)) = 3 d^2 + 2 zeta^3 - 6 zeta`.
#[inline]
fn basin_lhs6<R: Real>(zeta: R, d: R) -> R {
    cast::<R>(3.0) * d * d + cast::<R>(2.0) * zeta * zeta * zeta - cast::<R>(6.0) * zeta
}

/// Stability class of the equilibrium `(1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumClass {
    /// `tau >= sqrt(8)`: real negative pair, monotone approach.
    StableNode,
    /// `0 < tau < sqrt(8)`: complex pair with negative real part.
    StableSpiral,
    /// `tau = 0` exactly: conserved energy, closed orbits.
    Center,
    /// `tau < 0`.
    Unstable,
}

/// Eigenvalues of the Jacobian `[[0, 1], [-2, -tau]]` at `(1, 0)` and the
/// resulting class. `lambda1 + lambda2 = -tau` and `lambda1 lambda2 = 2`
/// hold to roundoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReport<R> {
    pub tau: R,
    pub lambda1: Complex<R>,
    pub lambda2: Complex<R>,
    pub class: EquilibriumClass,
}

/// Classify `(1, 0)` for the given `tau` from the eigenvalues
/// `(-tau +/- sqrt(tau^2 - 8)) / 2`.
pub fn classify_equilibrium<R: Real>(tau: R) -> EquilibriumReport<R> {
    let two = cast::<R>(2.0);
    let eight = cast::<R>(8.0);
    let disc = tau * tau - eight;
    let (lambda1, lambda2) = if disc >= R::zero() {
        let s = disc.sqrt();
        (
            Complex::new((-tau - s) / two, R::zero()),
            Complex::new((-tau + s) / two, R::zero()),
        )
    } else {
        let w = (-disc).sqrt() / two;
        (Complex::new(-tau / two, -w), Complex::new(-tau / two, w))
    };
    let class = if tau == R::zero() {
        EquilibriumClass::Center
    } else if tau < R::zero() {
        EquilibriumClass::Unstable
    } else if disc >= R::zero() {
        EquilibriumClass::StableNode
    } else {
        EquilibriumClass::StableSpiral
    };
    EquilibriumReport { tau, lambda1, lambda2, class }
}

/// `phi^2` on the homoclinic orbit: `2 theta - 2 theta^3/3 + 4/3` for
/// `theta` in `[-1, 2]`, evaluated in the factored form
/// `(2/3)(theta + 1)^2 (2 - theta)` so it is exactly zero at the endpoints
/// and nonnegative in between.
pub fn separatrix_phi2<R: Real>(theta: R) -> Result<R, PhaseError> {
    if !(theta >= -R::one() && theta <= cast::<R>(2.0)) {
        return Err(PhaseError::ThetaOutOfRange { theta: theta.to_f64().unwrap_or(f64::NAN) });
    }
    let two = cast::<R>(2.0);
    let w = theta + R::one();
    Ok(two / cast::<R>(3.0) * w * w * (two - theta))
}

/// Qualitative shape of an integrated trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryClass {
    /// Converged with at most one crossing of `theta = 1`; node-type
    /// overshoot allows the single crossing.
    Monotone,
    /// Converged with two or more crossings: spiral approach.
    Oscillatory,
    Divergent,
    /// Hit the horizon without settling; nothing can be claimed.
    Indeterminate,
}

pub fn classify_trajectory<R: Real, const N: usize>(traj: &Trajectory<R, N>) -> TrajectoryClass {
    match traj.stop {
        StopReason::Diverged { .. } => TrajectoryClass::Divergent,
        StopReason::Converged { .. } => {
            if traj.crossings.len() >= 2 {
                TrajectoryClass::Oscillatory
            } else {
                TrajectoryClass::Monotone
            }
        }
        StopReason::Horizon | StopReason::Event { .. } => TrajectoryClass::Indeterminate,
    }
}

/// Analytic membership and empirical convergence for one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasinVerdict<R> {
    pub zeta: R,
    pub d: R,
    pub analytic_member: bool,
    pub empirical_converged: bool,
}

/// Raster of [`BasinVerdict`]s, row-major in `zeta` (each row sweeps `d`).
#[derive(Debug, Clone, PartialEq)]
pub struct BasinMap<R> {
    pub n_zeta: usize,
    pub n_d: usize,
    pub tau: R,
    pub verdicts: Vec<BasinVerdict<R>>,
}

impl<R: Real> BasinMap<R> {
    pub fn cell(&self, iz: usize, id: usize) -> &BasinVerdict<R> {
        &self.verdicts[iz * self.n_d + id]
    }

    /// Cells that contradict the basin property: analytic members that did
    /// not converge empirically. Always zero for `tau > 0`.
    pub fn violations(&self) -> usize {
        self.verdicts
            .iter()
            .filter(|v| v.analytic_member && !v.empirical_converged)
            .count()
    }

    /// CSV raster `zeta,d,member,converged` (flags as 0/1).
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "zeta,d,member,converged")?;
        for v in &self.verdicts {
            writeln!(
                w,
                "{:.16e},{:.16e},{},{}",
                v.zeta,
                v.d,
                v.analytic_member as u8,
                v.empirical_converged as u8
            )?;
        }
        Ok(())
    }

    /// Binary PGM (P5) raster for quick viewing. Columns sweep `zeta` left to
    /// right, rows sweep `d` top (largest) to bottom. Gray levels: 255
    /// member+converged, 170 converged outside `P`, 85 member that failed to
    /// converge (a violation), 0 neither.
    pub fn write_pgm<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.n_zeta, self.n_d)?;
        let mut row = Vec::with_capacity(self.n_zeta);
        for id in (0..self.n_d).rev() {
            row.clear();
            for iz in 0..self.n_zeta {
                let v = self.cell(iz, id);
                let gray = match (v.analytic_member, v.empirical_converged) {
                    (true, true) => 255u8,
                    (false, true) => 170,
                    (true, false) => 85,
                    (false, false) => 0,
                };
                row.push(gray);
            }
            w.write_all(&row)?;
        }
        Ok(())
    }
}

/// Tolerance band around the separatrix: cells within 1e-12 of equality (in
/// energy units) count as outside, since `P` is open and roundoff must not
/// promote boundary cells.
fn member_with_margin<R: Real>(zeta: R, d: R) -> bool {
    zeta > -R::one() && basin_lhs6(zeta, d) < cast::<R>(4.0) - cast::<R>(6e-12)
}

/// Shoot every cell of a `(zeta, d)` grid and compare analytic membership in
/// `P` with empirical convergence. Rows are distributed across `jobs`
/// workers; the merge is by index, so output is identical for any `jobs`.
pub fn basin_map<R: Real>(
    zeta_range: (R, R),
    d_range: (R, R),
    grid: (usize, usize),
    tau: R,
    cfg: &IntegratorConfig<R>,
    jobs: usize,
) -> Result<BasinMap<R>, PhaseError> {
    if tau <= R::zero() || tau.is_nan() {
        return Err(PhaseError::TauNotPositive { tau: tau.to_f64().unwrap_or(f64::NAN) });
    }
    let (nz, nd) = grid;
    if nz < 2 || nd < 2 {
        return Err(PhaseError::GridTooSmall { nz, nd });
    }
    let coord = |lo: R, hi: R, n: usize, i: usize| -> R {
        lo + (hi - lo) * R::from_usize(i).expect("index representable")
            / R::from_usize(n - 1).expect("grid size representable")
    };
    let zetas: Vec<R> = (0..nz).map(|i| coord(zeta_range.0, zeta_range.1, nz, i)).collect();
    let ds: Vec<R> = (0..nd).map(|i| coord(d_range.0, d_range.1, nd, i)).collect();

    let row = |&zeta: &R| -> Vec<BasinVerdict<R>> {
        ds.iter()
            .map(|&d| {
                let shot = shoot_pseudo(&PseudoParams::new(tau, zeta), d, cfg);
                BasinVerdict {
                    zeta,
                    d,
                    analytic_member: member_with_margin(zeta, d),
                    empirical_converged: shot.classification == ShotClass::Converged,
                }
            })
            .collect()
    };
    let rows: Vec<Vec<BasinVerdict<R>>> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| zetas.par_iter().map(row).collect())
    } else {
        zetas.iter().map(row).collect()
    };
    Ok(BasinMap { n_zeta: nz, n_d: nd, tau, verdicts: rows.concat() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::integrate;
    use crate::model::{pseudo_rhs, PhaseState};

    #[test]
    fn energy_landmark_values() {
        assert!((energy(1.0_f64, 0.0) + 2.0 / 3.0).abs() < 1e-15);
        assert!((energy(2.0_f64, 0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((energy(-1.0_f64, 0.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn basin_membership_examples() {
        assert!(in_basin(0.2_f64, 0.0)); // lhs ~ -0.19733 < 2/3
        assert!(!in_basin(-1.0_f64, 0.0)); // zeta > -1 violated
        assert!(!in_basin(2.0_f64, 0.0)); // separatrix point, open set
        assert!(in_basin(1.0_f64, 0.0));
    }

    #[test]
    fn equilibrium_classes_across_tau() {
        let r = classify_equilibrium(3.0_f64);
        assert_eq!(r.class, EquilibriumClass::StableNode);
        assert!((r.lambda1.re + 2.0).abs() < 1e-12 && r.lambda1.im == 0.0);
        assert!((r.lambda2.re + 1.0).abs() < 1e-12);

        // double-root boundary: the eigenvalues are ill-conditioned in the
        // discriminant there, so only sqrt(eps)-level agreement is available
        let r = classify_equilibrium(8.0_f64.sqrt());
        assert_eq!(r.class, EquilibriumClass::StableNode);
        assert!((r.lambda1.re + 2.0_f64.sqrt()).abs() < 1e-7);
        assert!((r.lambda2.re + 2.0_f64.sqrt()).abs() < 1e-7);
        assert_eq!(r.lambda1.im, 0.0);

        let r = classify_equilibrium(0.5_f64);
        assert_eq!(r.class, EquilibriumClass::StableSpiral);
        assert!((r.lambda1.re + 0.25).abs() < 1e-12);
        assert!((r.lambda2.im - (8.0_f64 - 0.25).sqrt() / 2.0).abs() < 1e-12);

        assert_eq!(classify_equilibrium(0.0_f64).class, EquilibriumClass::Center);
        assert_eq!(classify_equilibrium(-0.5_f64).class, EquilibriumClass::Unstable);
    }

    #[test]
    fn eigenvalue_trace_and_determinant_identities() {
        // deterministic pseudo-random taus in [-5, 5]
        let mut state = 0x9e3779b97f4a7c15_u64;
        for _ in 0..1000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let tau = ((state >> 11) as f64 / (1u64 << 53) as f64) * 10.0 - 5.0;
            let r = classify_equilibrium(tau);
            let sum = r.lambda1 + r.lambda2;
            let prod = r.lambda1 * r.lambda2;
            assert!((sum.re + tau).abs() <= 1e-12 * (1.0 + tau.abs()), "tau={tau}");
            assert!(sum.im.abs() <= 1e-12, "tau={tau}");
            assert!((prod.re - 2.0).abs() <= 1e-12 * 2.0, "tau={tau}");
            assert!(prod.im.abs() <= 1e-12, "tau={tau}");
        }
    }

    #[test]
    fn separatrix_curve_landmarks() {
        assert_eq!(separatrix_phi2(2.0_f64).unwrap(), 0.0);
        assert_eq!(separatrix_phi2(-1.0_f64).unwrap(), 0.0);
        assert!((separatrix_phi2(1.0_f64).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert!(separatrix_phi2(2.0_f64 + 1e-12).is_err());
        assert!(separatrix_phi2(-1.1_f64).is_err());
        // nonnegative across the domain
        let mut th = -1.0;
        while th <= 2.0 {
            assert!(separatrix_phi2(th).unwrap() >= 0.0);
            th += 0.01;
        }
    }

    #[test]
    fn trajectory_classification_examples() {
        let cfg = IntegratorConfig::default();
        let run = |tau: f64, theta0: f64| {
            integrate(
                move |y: &[f64; 2]| pseudo_rhs(&PhaseState::new(0.0, y[0], y[1]), tau),
                [theta0, 0.0],
                0,
                &cfg,
            )
        };
        assert_eq!(classify_trajectory(&run(2.83, 0.2)), TrajectoryClass::Monotone);
        assert_eq!(classify_trajectory(&run(0.5, 0.2)), TrajectoryClass::Oscillatory);
        assert_eq!(classify_trajectory(&run(-0.5, 0.5)), TrajectoryClass::Divergent);
        // horizon too short to settle
        let short = IntegratorConfig { t_max: 0.5, ..cfg };
        let traj = integrate(
            |y: &[f64; 2]| pseudo_rhs(&PhaseState::new(0.0, y[0], y[1]), 1.0),
            [0.2, 0.0],
            0,
            &short,
        );
        assert_eq!(classify_trajectory(&traj), TrajectoryClass::Indeterminate);
    }

    #[test]
    fn basin_map_small_grids() {
        let cfg = IntegratorConfig::default();
        let map = basin_map((0.99, 1.01), (-0.01, 0.01), (2, 2), 1.0, &cfg, 1).unwrap();
        assert_eq!(map.verdicts.len(), 4);
        for v in &map.verdicts {
            assert!(v.analytic_member && v.empirical_converged);
        }
        assert_eq!(map.violations(), 0);

        // far corner outside P: recorded, not asserted convergent
        let map = basin_map((-0.96, -0.94), (2.9, 3.1), (2, 2), 1.0, &cfg, 1).unwrap();
        assert!(map.verdicts.iter().all(|v| !v.analytic_member));
    }

    #[test]
    fn basin_map_rejects_bad_arguments() {
        let cfg = IntegratorConfig::default();
        assert!(matches!(
            basin_map((0.0, 1.0), (0.0, 1.0), (2, 2), 0.0, &cfg, 1),
            Err(PhaseError::TauNotPositive { .. })
        ));
        assert!(matches!(
            basin_map((0.0, 1.0), (0.0, 1.0), (1, 2), 1.0, &cfg, 1),
            Err(PhaseError::GridTooSmall { .. })
        ));
    }

    #[test]
    fn basin_raster_outputs() {
        let cfg = IntegratorConfig::default();
        let map = basin_map((0.9, 1.1), (-0.1, 0.1), (2, 3), 1.0, &cfg, 1).unwrap();
        let mut csv = Vec::new();
        map.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("zeta,d,member,converged\n"));
        assert_eq!(text.lines().count(), 1 + 6);

        let mut pgm = Vec::new();
        map.write_pgm(&mut pgm).unwrap();
        assert!(pgm.starts_with(b"P5\n2 3\n255\n"));
        assert_eq!(pgm.len(), b"P5\n2 3\n255\n".len() + 6);
    }

    #[test]
    fn boundary_cells_are_not_members() {
        // exactly on the separatrix level
        assert!(!member_with_margin(2.0_f64, 0.0));
        // a hair inside the margin band still counts as outside
        let d_on = (2.0 * (2.0 / 3.0_f64 - 0.2 * (0.04 / 3.0 - 1.0))).sqrt();
        assert!(!member_with_margin(0.2_f64, d_on));
        assert!(member_with_margin(0.2_f64, 0.0));
    }
}
