//! Piecewise-exponential integration of the scaled-time Schrödinger equation
//! `i d/ds |psi> = T H(s) |psi>`, and the two-level adiabatic frame.
//!
//! Each step applies `exp(-i T H(s_k + h/2) h)`, the second-order Magnus
//! (exponential midpoint) rule. Every step is exactly unitary, so norm is
//! preserved independent of step size; accuracy is `O(h^2)`.
//!
//! The adiabatic frame uses `|phi> = U(s)^dagger |psi>` with
//! `U(s) = [[cos eta, -sin eta], [sin eta, cos eta]]` chosen so that
//! `U^dagger H U = diag(eps, -eps)`. In that frame the generator is
//! `[[T eps, -i gamma], [i gamma, -T eps]]` with `gamma` from
//! [`gamma_coupling`].

use num_complex::Complex64 as C64;

use crate::envelope::TwoLevelPath;
use crate::error::{invalid, Error, Result};
use crate::linalg::{apply, expm_step, HermitianOperator, QuantumState, UnitaryOperator};
use crate::plant::Plant;

/// Uniform grid on `[s_start, s_end]` with `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    s_start: f64,
    s_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(s_start: f64, s_end: f64, steps: usize) -> Result<Self> {
        if !s_start.is_finite() || !s_end.is_finite() || s_start >= s_end {
            return invalid(format!("time grid needs finite s_start < s_end, got [{s_start}, {s_end}]"));
        }
        if steps == 0 {
            return invalid("time grid needs at least one step");
        }
        Ok(Self { s_start, s_end, steps })
    }

    /// `[-s_max, s_max]`
    pub fn symmetric(s_max: f64, steps: usize) -> Result<Self> {
        Self::new(-s_max, s_max, steps)
    }

    pub fn s_start(&self) -> f64 {
        self.s_start
    }

    pub fn s_end(&self) -> f64 {
        self.s_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        (self.s_end - self.s_start) / self.steps as f64
    }

    /// Grid node `k`; node `steps` is exactly `s_end`.
    pub fn point(&self, k: usize) -> f64 {
        if k == self.steps {
            self.s_end
        } else {
            self.s_start + k as f64 * self.step_size()
        }
    }

    /// Midpoint of interval `k`.
    pub fn midpoint(&self, k: usize) -> f64 {
        self.s_start + (k as f64 + 0.5) * self.step_size()
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        Self::new(self.s_start, self.s_end, steps)
    }
}

/// Basis in which trajectory states are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Diabatic,
    Adiabatic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<QuantumState>,
    pub frame: Frame,
}

impl Trajectory {
    pub fn final_state(&self) -> &QuantumState {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return invalid(format!("horizon T must be positive and finite, got {horizon}"));
    }
    Ok(())
}

fn step_with(
    plant: &Plant,
    theta: &[f64],
    grid: &TimeGrid,
    horizon: f64,
    psi: &QuantumState,
    k: usize,
) -> Result<QuantumState> {
    let h = plant.hamiltonian_at(theta, grid.midpoint(k))?;
    let u = expm_step(&h, horizon * grid.step_size())?;
    apply(&u, psi)
}

fn check_dims(plant: &Plant, psi0: &QuantumState) -> Result<()> {
    if plant.dim() != psi0.dim() {
        return invalid(format!("plant dimension {} does not match state dimension {}", plant.dim(), psi0.dim()));
    }
    Ok(())
}

/// Integrates `i d/ds psi = T H(s) psi` over `grid`, recording every node.
pub fn propagate(
    plant: &Plant,
    theta: &[f64],
    psi0: &QuantumState,
    grid: &TimeGrid,
    horizon: f64,
) -> Result<Trajectory> {
    check_dims(plant, psi0)?;
    check_horizon(horizon)?;
    let mut states = Vec::with_capacity(grid.steps() + 1);
    states.push(psi0.clone());
    for k in 0..grid.steps() {
        let next = step_with(plant, theta, grid, horizon, &states[k], k)?;
        states.push(next);
    }
    Ok(Trajectory { grid: *grid, states, frame: Frame::Diabatic })
}

/// Same stepping as [`propagate`], keeping only the final state.
pub fn propagate_final(
    plant: &Plant,
    theta: &[f64],
    psi0: &QuantumState,
    grid: &TimeGrid,
    horizon: f64,
) -> Result<QuantumState> {
    check_dims(plant, psi0)?;
    check_horizon(horizon)?;
    let mut psi = psi0.clone();
    for k in 0..grid.steps() {
        psi = step_with(plant, theta, grid, horizon, &psi, k)?;
    }
    Ok(psi)
}

/// Instantaneous eigenframe of `[[-Delta, Omega], [Omega, Delta]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticFrame {
    /// `U(s)`; its first column is the `+eps` eigenvector.
    pub rotation: UnitaryOperator,
    pub energy: f64,
    /// Rotation angle `eta` in `(-pi/2, pi/2]`.
    pub mixing_angle: f64,
}

fn rotation(eta: f64) -> UnitaryOperator {
    let (s, c) = eta.sin_cos();
    let r = |x: f64| C64::new(x, 0.0);
    UnitaryOperator::new(2, vec![r(c), r(-s), r(s), r(c)]).expect("rotation is unitary")
}

/// The frame at detuning `delta` and coupling `omega`.
///
/// The angle is `eta = atan2(omega, -delta) / 2`, which puts the `+eps`
/// eigenvector in the first column and is continuous along any path with
/// `omega > 0`.
pub fn adiabatic_frame_at(delta: f64, omega: f64) -> Result<AdiabaticFrame> {
    if !delta.is_finite() || !omega.is_finite() {
        return invalid(format!("detuning and coupling must be finite, got ({delta}, {omega})"));
    }
    if delta == 0.0 && omega == 0.0 {
        return Err(Error::DegeneratePoint { s: f64::NAN });
    }
    let eta = 0.5 * omega.atan2(-delta);
    Ok(AdiabaticFrame { rotation: rotation(eta), energy: delta.hypot(omega), mixing_angle: eta })
}

/// `gamma = (Delta dOmega - Omega dDelta) / (2 (Delta^2 + Omega^2))`, the rate
/// of change of `atan2(Omega, Delta) / 2`. The frame angle of
/// [`adiabatic_frame_at`] moves at `-gamma`.
pub fn gamma_coupling(delta: f64, omega: f64, d_delta: f64, d_omega: f64) -> Result<f64> {
    let r2 = delta * delta + omega * omega;
    if r2 == 0.0 {
        return Err(Error::DegeneratePoint { s: f64::NAN });
    }
    Ok(0.5 * (delta * d_omega - omega * d_delta) / r2)
}

fn frame_on_path(path: &TwoLevelPath, s: f64) -> Result<AdiabaticFrame> {
    let (d, o) = path.at(s);
    adiabatic_frame_at(d, o).map_err(|e| match e {
        Error::DegeneratePoint { .. } => Error::DegeneratePoint { s },
        other => other,
    })
}

fn adiabatic_generator(path: &TwoLevelPath, s: f64, horizon: f64) -> Result<HermitianOperator> {
    let (d, o) = path.at(s);
    let (dd, dom) = path.derivative_at(s);
    let gamma = gamma_coupling(d, o, dd, dom).map_err(|_| Error::DegeneratePoint { s })?;
    let te = horizon * d.hypot(o);
    HermitianOperator::new(2, vec![C64::new(te, 0.0), C64::new(0.0, -gamma), C64::new(0.0, gamma), C64::new(-te, 0.0)])
        .map_err(|_| Error::InvalidInput(format!("non-finite adiabatic generator at s = {s}")))
}

/// Rotates a diabatic state into the adiabatic frame at `s`.
pub fn to_adiabatic(path: &TwoLevelPath, s: f64, psi: &QuantumState) -> Result<QuantumState> {
    let frame = frame_on_path(path, s)?;
    apply(&frame.rotation.adjoint(), psi)
}

/// Rotates an adiabatic-frame state back to the diabatic basis at `s`.
pub fn to_diabatic(path: &TwoLevelPath, s: f64, phi: &QuantumState) -> Result<QuantumState> {
    let frame = frame_on_path(path, s)?;
    apply(&frame.rotation, phi)
}

/// Integrates the adiabatic-frame equation for a two-level path.
///
/// `psi0` is given in the diabatic basis and rotated into the frame at
/// `s_start`; the returned trajectory is expressed in the adiabatic frame.
pub fn propagate_adiabatic(
    path: &TwoLevelPath,
    psi0: &QuantumState,
    grid: &TimeGrid,
    horizon: f64,
) -> Result<Trajectory> {
    if psi0.dim() != 2 {
        return invalid(format!("adiabatic frame is two-level only, got dimension {}", psi0.dim()));
    }
    check_horizon(horizon)?;
    frame_on_path(path, grid.s_end())?;
    let mut states = Vec::with_capacity(grid.steps() + 1);
    states.push(to_adiabatic(path, grid.s_start(), psi0)?);
    let h = grid.step_size();
    for k in 0..grid.steps() {
        frame_on_path(path, grid.point(k))?;
        let g = adiabatic_generator(path, grid.midpoint(k), horizon)?;
        let next = apply(&expm_step(&g, h)?, &states[k])?;
        states.push(next);
    }
    Ok(Trajectory { grid: *grid, states, frame: Frame::Adiabatic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{Envelope, ScaledEnvelope};
    use crate::plant::ControlFunction;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn two_level_plant(path: TwoLevelPath) -> Plant {
        Plant::new(
            HermitianOperator::zeros(2),
            vec![HermitianOperator::pauli_z().scaled(-1.0), HermitianOperator::pauli_x()],
            vec![
                ControlFunction::new("delta", "path", move |_, s| path.detuning.value(s)),
                ControlFunction::new("omega", "path", move |_, s| path.coupling.value(s)),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn grid_validation_and_nodes() {
        assert!(TimeGrid::new(1.0, 1.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, f64::INFINITY, 10).is_err());
        let g = TimeGrid::new(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.step_size(), 0.5);
        assert_eq!(g.point(4), 1.0);
        assert_eq!(g.midpoint(0), -0.75);
    }

    #[test]
    fn constant_rabi_half_period_flips_state() {
        let omega = 0.7;
        let path = TwoLevelPath::new(ScaledEnvelope::zero(), ScaledEnvelope::new(omega, Envelope::Constant(1.0)));
        let grid = TimeGrid::new(0.0, 1.0, 50).unwrap();
        let horizon = FRAC_PI_2 / omega;
        let traj = propagate(&two_level_plant(path), &[], &QuantumState::basis(2, 0).unwrap(), &grid, horizon).unwrap();
        assert_eq!(traj.states.len(), 51);
        let last = traj.final_state();
        assert!((last.amplitudes()[1] - C64::new(0.0, -1.0)).norm() < 1e-13);
        assert!(traj.states.iter().all(|s| (s.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn adiabatic_frame_examples() {
        let f = adiabatic_frame_at(0.0, 1.0).unwrap();
        assert!((f.mixing_angle - FRAC_PI_4).abs() < 1e-15);
        assert!((f.energy - 1.0).abs() < 1e-15);
        let f = adiabatic_frame_at(3.0, 4.0).unwrap();
        assert!((f.energy - 5.0).abs() < 1e-15);
        let h = HermitianOperator::from_real_rows(&[&[-3.0, 4.0], &[4.0, 3.0]]).unwrap();
        let d = f.rotation.conjugate(&h).unwrap();
        assert!(d[1].norm() < 1e-12 && d[2].norm() < 1e-12);
        assert!((d[0].re - 5.0).abs() < 1e-12 && (d[3].re + 5.0).abs() < 1e-12);
        // +eps eigenvector of diag(-1, 1) is e2
        let f = adiabatic_frame_at(1.0, 0.0).unwrap();
        assert!((f.mixing_angle - FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(adiabatic_frame_at(0.0, 0.0), Err(Error::DegeneratePoint { .. })));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_coupling(1.0, 0.0, 0.0, 1.0).unwrap(), 0.5);
        assert_eq!(gamma_coupling(2.0, 1.0, 4.0, 2.0).unwrap(), 0.0);
        assert_eq!(gamma_coupling(0.0, 1.0, 1.0, 0.0).unwrap(), -0.5);
        assert!(gamma_coupling(0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gamma_matches_finite_difference_of_frame_angle() {
        let path =
            TwoLevelPath::new(ScaledEnvelope::new(1.0, Envelope::Tanh), ScaledEnvelope::new(1.0, Envelope::Sech));
        let angle = |s: f64| adiabatic_frame_at(path.at(s).0, path.at(s).1).unwrap().mixing_angle;
        let h = 1e-6;
        for &s in &[-2.0, -0.3, 0.0, 0.8, 3.0] {
            let fd = (angle(s + h) - angle(s - h)) / (2.0 * h);
            let (d, o) = path.at(s);
            let (dd, dom) = path.derivative_at(s);
            let gamma = gamma_coupling(d, o, dd, dom).unwrap();
            assert!((fd + gamma).abs() < 1e-5, "s = {s}: fd {fd}, gamma {gamma}");
        }
    }

    #[test]
    fn frozen_controls_keep_adiabatic_populations() {
        let path = TwoLevelPath::new(
            ScaledEnvelope::new(0.4, Envelope::Constant(1.0)),
            ScaledEnvelope::new(0.9, Envelope::Constant(1.0)),
        );
        let psi0 = QuantumState::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let grid = TimeGrid::new(0.0, 1.0, 200).unwrap();
        let traj = propagate_adiabatic(&path, &psi0, &grid, 3.0).unwrap();
        let p0 = traj.states[0].populations();
        for s in &traj.states {
            let p = s.populations();
            assert!((p[0] - p0[0]).abs() < 1e-13 && (p[1] - p0[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn degenerate_point_on_grid_is_reported() {
        let path = TwoLevelPath::new(ScaledEnvelope::zero(), ScaledEnvelope::new(1.0, Envelope::Linear { slope: 1.0 }));
        let grid = TimeGrid::new(-1.0, 1.0, 4).unwrap();
        let err = propagate_adiabatic(&path, &QuantumState::basis(2, 0).unwrap(), &grid, 1.0).unwrap_err();
        assert_eq!(err, Error::DegeneratePoint { s: 0.0 });
    }

    #[test]
    fn dimension_and_horizon_checks() {
        let path = TwoLevelPath::new(ScaledEnvelope::zero(), ScaledEnvelope::new(1.0, Envelope::Constant(1.0)));
        let plant = two_level_plant(path);
        let grid = TimeGrid::new(0.0, 1.0, 4).unwrap();
        assert!(propagate(&plant, &[], &QuantumState::basis(3, 0).unwrap(), &grid, 1.0).is_err());
        assert!(propagate(&plant, &[], &QuantumState::basis(2, 0).unwrap(), &grid, 0.0).is_err());
        assert!(propagate_final(&plant, &[], &QuantumState::basis(2, 0).unwrap(), &grid, -PI).is_err());
    }
}
