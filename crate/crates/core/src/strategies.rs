//! Built-in two-level state-flipping strategies and their closed-form error
//! probabilities.
//!
//! All strategies drive `H(s) = [[-Delta(s), Omega(s)], [Omega(s), Delta(s)]]`
//! in scaled time `s = t / T` with `Delta(s) = Delta0 Phi(s)` and
//! `Omega(s) = Omega0 Lambda(s)`:
//!
//! | strategy      | `Delta(s)`           | `Omega(s)`           | parameters        |
//! |---------------|----------------------|----------------------|-------------------|
//! | resonance     | `0`                  | `Omega0 Lambda(s)`   | `(Omega0, A)`     |
//! | Landau-Zener  | `(Delta0^2 / T) s`   | `Omega0`             | `(Delta0, Omega0)`|
//! | Allen-Eberly  | `Delta0 tanh(s)`     | `Omega0 sech(s)`     | `(Delta0, Omega0)`|
//! | custom        | `Delta0 Phi(s)`      | `Omega0 Lambda(s)`   | `(Delta0, Omega0)`|
//!
//! For resonance the second parameter is the pulse area `A` of the coupling
//! envelope: the envelope is rescaled so that its integral over the grid
//! equals `A`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::envelope::{Envelope, ScaledEnvelope, TwoLevelPath};
use crate::error::{invalid, Error, Result};
use crate::linalg::HermitianOperator;
use crate::plant::{ControlFunction, Plant};
use crate::propagator::TimeGrid;

/// Default half-width of the symmetric grid for Landau-Zener and Allen-Eberly.
pub const DEFAULT_S_MAX: f64 = 8.0;
/// Default number of integration steps.
pub const DEFAULT_STEPS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    Resonance { envelope: Envelope },
    LandauZener,
    AllenEberly,
    Custom { detuning: Envelope, coupling: Envelope },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Resonance,
    LandauZener,
    AllenEberly,
    Custom,
}

impl StrategyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyKind::Resonance => "resonance",
            StrategyKind::LandauZener => "landau-zener",
            StrategyKind::AllenEberly => "allen-eberly",
            StrategyKind::Custom => "custom",
        }
    }

    /// `[0, 1]` for resonance and custom, `[-8, 8]` otherwise, 4000 steps.
    pub fn default_grid(&self) -> TimeGrid {
        match self {
            StrategyKind::Resonance | StrategyKind::Custom => TimeGrid::new(0.0, 1.0, DEFAULT_STEPS),
            StrategyKind::LandauZener | StrategyKind::AllenEberly => TimeGrid::symmetric(DEFAULT_S_MAX, DEFAULT_STEPS),
        }
        .expect("default grids are valid")
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self, StrategyKind::Custom)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resonance" => Ok(StrategyKind::Resonance),
            "landau-zener" => Ok(StrategyKind::LandauZener),
            "allen-eberly" => Ok(StrategyKind::AllenEberly),
            "custom" => Ok(StrategyKind::Custom),
            other => invalid(format!(
                "unknown strategy kind {other:?} (expected resonance, landau-zener, allen-eberly or custom)"
            )),
        }
    }
}

impl Strategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            Strategy::Resonance { .. } => StrategyKind::Resonance,
            Strategy::LandauZener => StrategyKind::LandauZener,
            Strategy::AllenEberly => StrategyKind::AllenEberly,
            Strategy::Custom { .. } => StrategyKind::Custom,
        }
    }
}

/// A strategy with its nominal amplitudes, horizon and integration grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategySpec {
    strategy: Strategy,
    delta0: f64,
    omega0: f64,
    horizon: f64,
    grid: TimeGrid,
    /// Integral of the resonance envelope over the grid.
    base_area: f64,
}

impl StrategySpec {
    pub fn new(strategy: Strategy, delta0: f64, omega0: f64, horizon: f64, grid: TimeGrid) -> Result<Self> {
        for (name, v) in [("delta0", delta0), ("omega0", omega0)] {
            if !(v.is_finite() && v >= 0.0) {
                return invalid(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return invalid(format!("horizon T must be positive and finite, got {horizon}"));
        }
        let base_area = match strategy {
            Strategy::Resonance { envelope } => {
                envelope.validate()?;
                let area = envelope.area(grid.s_start(), grid.s_end());
                if area == 0.0 || !area.is_finite() {
                    return invalid(format!("resonance envelope has pulse area {area} on the grid"));
                }
                area
            }
            Strategy::Custom { detuning, coupling } => {
                detuning.validate()?;
                coupling.validate()?;
                f64::NAN
            }
            _ => f64::NAN,
        };
        Ok(Self { strategy, delta0, omega0, horizon, grid, base_area })
    }

    pub fn resonance(omega0: f64, envelope: Envelope, horizon: f64, grid: TimeGrid) -> Result<Self> {
        Self::new(Strategy::Resonance { envelope }, 0.0, omega0, horizon, grid)
    }

    pub fn landau_zener(delta0: f64, omega0: f64, horizon: f64, grid: TimeGrid) -> Result<Self> {
        Self::new(Strategy::LandauZener, delta0, omega0, horizon, grid)
    }

    pub fn allen_eberly(delta0: f64, omega0: f64, horizon: f64, grid: TimeGrid) -> Result<Self> {
        Self::new(Strategy::AllenEberly, delta0, omega0, horizon, grid)
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn kind(&self) -> StrategyKind {
        self.strategy.kind()
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Pulse area of the resonance envelope over the grid (NaN otherwise).
    pub fn pulse_area(&self) -> f64 {
        self.base_area
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.strategy, self.delta0, self.omega0, horizon, self.grid)
    }

    pub fn with_grid(&self, grid: TimeGrid) -> Result<Self> {
        Self::new(self.strategy, self.delta0, self.omega0, self.horizon, grid)
    }

    pub fn with_amplitudes(&self, delta0: f64, omega0: f64) -> Result<Self> {
        Self::new(self.strategy, delta0, omega0, self.horizon, self.grid)
    }

    /// Names of the two swept parameters.
    pub fn parameter_names(&self) -> [&'static str; 2] {
        match self.kind() {
            StrategyKind::Resonance => ["omega0", "pulse_area"],
            _ => ["delta0", "omega0"],
        }
    }

    /// The nominal parameter vector.
    pub fn theta(&self) -> [f64; 2] {
        match self.kind() {
            StrategyKind::Resonance => [self.omega0, self.base_area],
            _ => [self.delta0, self.omega0],
        }
    }

    /// Detuning and coupling at parameter vector `theta`.
    pub fn path_at(&self, theta: &[f64]) -> Result<TwoLevelPath> {
        if theta.len() != 2 {
            return invalid(format!("{} takes 2 parameters, got {}", self.kind(), theta.len()));
        }
        Ok(self.path_unchecked(theta[0], theta[1]))
    }

    fn path_unchecked(&self, a: f64, b: f64) -> TwoLevelPath {
        match self.strategy {
            Strategy::Resonance { envelope } => {
                TwoLevelPath::new(ScaledEnvelope::zero(), ScaledEnvelope::new(a * b / self.base_area, envelope))
            }
            Strategy::LandauZener => TwoLevelPath::new(
                ScaledEnvelope::new(a * a / self.horizon, Envelope::Linear { slope: 1.0 }),
                ScaledEnvelope::new(b, Envelope::Constant(1.0)),
            ),
            Strategy::AllenEberly => ae_controls(a, b),
            Strategy::Custom { detuning, coupling } => {
                TwoLevelPath::new(ScaledEnvelope::new(a, detuning), ScaledEnvelope::new(b, coupling))
            }
        }
    }

    /// The nominal path.
    pub fn path(&self) -> TwoLevelPath {
        let [a, b] = self.theta();
        self.path_unchecked(a, b)
    }

    /// A two-parameter plant `(0, -sigma_z, sigma_x)` whose controls are the
    /// strategy's detuning and coupling as functions of `theta`.
    pub fn plant(&self) -> Plant {
        let d = *self;
        let o = *self;
        Plant::new(
            HermitianOperator::zeros(2),
            vec![HermitianOperator::pauli_z().scaled(-1.0), HermitianOperator::pauli_x()],
            vec![
                ControlFunction::new("detuning", self.detuning_envelope_name(), move |th, s| {
                    d.path_unchecked(th[0], th[1]).detuning.value(s)
                }),
                ControlFunction::new("coupling", self.coupling_envelope_name(), move |th, s| {
                    o.path_unchecked(th[0], th[1]).coupling.value(s)
                }),
            ],
            2,
        )
        .expect("two-level plant is well formed")
    }

    fn detuning_envelope_name(&self) -> &'static str {
        match self.strategy {
            Strategy::Resonance { .. } => "zero",
            Strategy::LandauZener => "linear",
            Strategy::AllenEberly => "tanh",
            Strategy::Custom { detuning, .. } => detuning.name(),
        }
    }

    fn coupling_envelope_name(&self) -> &'static str {
        match self.strategy {
            Strategy::Resonance { envelope } => envelope.name(),
            Strategy::LandauZener => "constant",
            Strategy::AllenEberly => "sech",
            Strategy::Custom { coupling, .. } => coupling.name(),
        }
    }

    /// Closed-form error probability at `theta` and this strategy's horizon.
    pub fn analytic_perr(&self, theta: &[f64]) -> Result<f64> {
        if theta.len() != 2 {
            return invalid(format!("{} takes 2 parameters, got {}", self.kind(), theta.len()));
        }
        let t = self.horizon;
        match self.kind() {
            StrategyKind::Resonance => Ok(resonance_perr(t, theta[0], theta[1])),
            StrategyKind::LandauZener => lz_perr_estimate(t, theta[1], theta[0]),
            StrategyKind::AllenEberly => Ok(ae_perr_exact(t, theta[1], theta[0])),
            StrategyKind::Custom => Err(Error::Unsupported("custom strategies have no closed form".into())),
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{} (delta0 = {}, omega0 = {}, T = {}, s in [{}, {}], {} steps)",
            self.kind(),
            self.delta0,
            self.omega0,
            self.horizon,
            self.grid.s_start(),
            self.grid.s_end(),
            self.grid.steps()
        )
    }
}

/// `Delta = 0`, `Omega(s) = omega0 * envelope(s)`.
pub fn resonance_controls(omega0: f64, envelope: Envelope) -> TwoLevelPath {
    TwoLevelPath::new(ScaledEnvelope::zero(), ScaledEnvelope::new(omega0, envelope))
}

/// `cos^2(omega0 T A)`.
pub fn resonance_perr(horizon: f64, omega0: f64, area: f64) -> f64 {
    (omega0 * horizon * area).cos().powi(2)
}

/// `(k + 1/2) pi / (T A)`, the `k`-th amplitude at which resonance is exact.
pub fn resonance_zeros(horizon: f64, area: f64, k: u32) -> Result<f64> {
    let ta = horizon * area;
    if ta == 0.0 || !ta.is_finite() {
        return invalid(format!("T * A must be finite and nonzero, got {ta}"));
    }
    Ok((k as f64 + 0.5) * PI / ta)
}

/// `cos^2(T (omega* + beta) (A* + sigma))`, the worst case over the box
/// `[omega* - beta, omega* + beta] x [A* - sigma, A* + sigma]` when
/// `sin(2 T omega A)` is monotone on it.
pub fn resonance_pmax(omega_star: f64, area_star: f64, beta: f64, sigma: f64, horizon: f64) -> f64 {
    (horizon * (omega_star + beta) * (area_star + sigma)).cos().powi(2)
}

/// `Delta(s) = (delta0^2 / T) s`, `Omega(s) = omega0`.
pub fn lz_controls(delta0: f64, omega0: f64, horizon: f64) -> Result<TwoLevelPath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return invalid(format!("horizon T must be positive and finite, got {horizon}"));
    }
    Ok(TwoLevelPath::new(
        ScaledEnvelope::new(delta0 * delta0 / horizon, Envelope::Linear { slope: 1.0 }),
        ScaledEnvelope::new(omega0, Envelope::Constant(1.0)),
    ))
}

/// Landau-Zener estimate `exp(-pi T omega0^2 / delta0^2)`.
pub fn lz_perr_estimate(horizon: f64, omega0: f64, delta0: f64) -> Result<f64> {
    if delta0 == 0.0 {
        return invalid("Landau-Zener estimate needs delta0 != 0");
    }
    Ok((-PI * horizon * omega0 * omega0 / (delta0 * delta0)).exp())
}

/// Half-width of a Landau-Zener window whose edges have `|Delta| / Omega >= factor`,
/// never narrower than `s_min`.
pub fn lz_window(delta0: f64, omega0: f64, horizon: f64, factor: f64, s_min: f64) -> Result<f64> {
    if delta0 == 0.0 || !(horizon > 0.0) {
        return invalid(format!("Landau-Zener window needs delta0 != 0 and T > 0, got {delta0}, {horizon}"));
    }
    Ok(s_min.max(factor * horizon * omega0.abs() / (delta0 * delta0)))
}

/// Steps on `[-s_max, s_max]` keeping the Landau-Zener phase per step,
/// `2 delta0^2 s_max^2 / steps` at the window edge, below `max_phase`.
pub fn lz_steps(delta0: f64, s_max: f64, max_phase: f64, min_steps: usize) -> usize {
    let needed = (2.0 * delta0 * delta0 * s_max * s_max / max_phase).ceil();
    if needed.is_finite() && needed > min_steps as f64 {
        needed as usize
    } else {
        min_steps
    }
}

/// Upper estimate of the error probability caused by starting and ending on
/// `[-s_max, s_max]` instead of the infinite line: the diabatic states miss
/// the adiabatic ones by half the edge mixing angle at each end.
pub fn lz_edge_leakage(delta0: f64, omega0: f64, horizon: f64, s_max: f64) -> f64 {
    let x = horizon * omega0.abs() / (delta0 * delta0 * s_max);
    (2.0 * (0.5 * x.atan()).sin()).powi(2)
}

/// `Delta(s) = delta0 tanh(s)`, `Omega(s) = omega0 sech(s)`.
pub fn ae_controls(delta0: f64, omega0: f64) -> TwoLevelPath {
    TwoLevelPath::new(ScaledEnvelope::new(delta0, Envelope::Tanh), ScaledEnvelope::new(omega0, Envelope::Sech))
}

/// `cosh(a) / cosh(b)` without overflow, for `a, b >= 0`.
fn cosh_ratio(a: f64, b: f64) -> f64 {
    (a - b).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp())
}

fn sech(x: f64) -> f64 {
    let x = x.abs();
    2.0 * (-x).exp() / (1.0 + (-2.0 * x).exp())
}

/// Exact Allen-Eberly error probability.
///
/// For `delta0 >= omega0`: `cosh^2(pi T sqrt(delta0^2 - omega0^2)) sech^2(pi delta0 T)`;
/// otherwise `cos^2(pi T sqrt(omega0^2 - delta0^2)) sech^2(pi delta0 T)`.
pub fn ae_perr_exact(horizon: f64, omega0: f64, delta0: f64) -> f64 {
    let b = PI * delta0.abs() * horizon;
    let gap = delta0 * delta0 - omega0 * omega0;
    if gap >= 0.0 {
        cosh_ratio(PI * horizon * gap.sqrt(), b).powi(2)
    } else {
        ((PI * horizon * (-gap).sqrt()).cos() * sech(b)).powi(2)
    }
}

/// `4 exp(-2 pi T (delta0 - sqrt(delta0^2 - omega0^2)))`, valid for `delta0 >= omega0`.
pub fn ae_perr_bound(horizon: f64, omega0: f64, delta0: f64) -> Result<f64> {
    if delta0 < omega0 {
        return invalid(format!("bound needs delta0 >= omega0, got delta0 = {delta0}, omega0 = {omega0}"));
    }
    if !(horizon > 0.0) {
        return invalid(format!("horizon T must be positive, got {horizon}"));
    }
    Ok(4.0 * (-2.0 * PI * horizon * ae_gap(delta0, omega0)).exp())
}

/// `delta0 - sqrt(delta0^2 - omega0^2)`, computed without cancellation.
fn ae_gap(delta0: f64, omega0: f64) -> f64 {
    let root = (delta0 * delta0 - omega0 * omega0).max(0.0).sqrt();
    omega0 * omega0 / (delta0 + root)
}

/// Horizon beyond which the Allen-Eberly error stays below `epsilon`:
/// `max(-ln(epsilon/4) / (2 pi (delta0 - sqrt(delta0^2 - omega0^2))), -ln(epsilon) / (2 pi delta0))`.
pub fn ae_t_epsilon(epsilon: f64, delta0: f64, omega0: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return invalid(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    if !(omega0 > 0.0) {
        return invalid(format!("omega0 must be positive, got {omega0}"));
    }
    if delta0 < omega0 {
        return invalid(format!("T_epsilon needs delta0 >= omega0, got delta0 = {delta0}, omega0 = {omega0}"));
    }
    let first = -(epsilon / 4.0).ln() / (2.0 * PI * ae_gap(delta0, omega0));
    let second = -epsilon.ln() / (2.0 * PI * delta0);
    Ok(first.max(second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn resonance_examples() {
        let path = resonance_controls(2.0, Envelope::Constant(1.0));
        assert_eq!(path.at(0.5), (0.0, 2.0));
        assert!((Envelope::SinePi.area(0.0, 1.0) - 2.0 / PI).abs() < 1e-15);
        assert!(resonance_perr(1.0, FRAC_PI_2, 1.0) < 1e-30);
        assert_eq!(resonance_perr(3.0, 0.0, 1.0), 1.0);
        assert!((resonance_perr(1.0, FRAC_PI_4, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn resonance_zero_examples() {
        assert!((resonance_zeros(1.0, 1.0, 0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((resonance_zeros(2.0, 1.0, 0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        let z3 = resonance_zeros(1.0, 1.0, 3).unwrap();
        assert!((z3 - 3.5 * PI).abs() < 1e-14);
        assert!(resonance_perr(1.0, z3, 1.0) <= 1e-12);
        assert!(resonance_zeros(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn resonance_pmax_examples() {
        assert!(resonance_pmax(FRAC_PI_2, 1.0, 0.0, 0.0, 1.0) < 1e-30);
        let expected = (FRAC_PI_2 + 0.1).cos().powi(2);
        assert!((resonance_pmax(FRAC_PI_2, 1.0, 0.1, 0.0, 1.0) - expected).abs() < 1e-15);
        assert!((expected - 9.966_711_079_379_185e-3).abs() < 1e-15);
        assert_eq!(resonance_pmax(1.1, 0.7, 0.0, 0.0, 2.0), resonance_perr(2.0, 1.1, 0.7));
    }

    #[test]
    fn lz_examples() {
        let path = lz_controls(2.0, 0.3, 4.0).unwrap();
        assert_eq!(path.at(0.0).0, 0.0);
        assert_eq!(path.at(1.0).0, 1.0);
        assert_eq!(path.at(-5.0).1, path.at(7.0).1);
        assert!(lz_controls(1.0, 1.0, 0.0).is_err());
        assert_eq!(lz_perr_estimate(1.0, 0.0, 1.0).unwrap(), 1.0);
        assert!((lz_perr_estimate(1.0, 1.0, 1.0).unwrap() - (-PI).exp()).abs() < 1e-16);
        assert!(lz_perr_estimate(1.0, 1.0, 0.0).is_err());
        let mut prev = 1.0;
        for t in 1..20 {
            let p = lz_perr_estimate(t as f64, 0.4, 1.3).unwrap();
            assert!(p < prev);
            prev = p;
        }
    }

    #[test]
    fn lz_window_and_leakage() {
        assert_eq!(lz_window(1.0, 1.0, 1.0, 64.0, 8.0).unwrap(), 64.0);
        assert_eq!(lz_window(2.0, 0.5, 1.0, 64.0, 8.0).unwrap(), 8.0);
        assert!(lz_window(0.0, 1.0, 1.0, 64.0, 8.0).is_err());
        // edge ratio 1/64: 4 sin^2(atan(1/64) / 2) ~ 1/64^2
        let f = lz_edge_leakage(1.0, 1.0, 1.0, 64.0);
        assert!((f - 2.440_959_306_094_23e-4).abs() < 1e-15, "{f}");
        assert_eq!(lz_edge_leakage(1.0, 0.0, 1.0, 8.0), 0.0);
        assert_eq!(lz_steps(0.5, 6144.0, 8.0, 200_000), 2_359_296);
        assert_eq!(lz_steps(1.0, 8.0, 8.0, 200_000), 200_000);
    }

    #[test]
    fn ae_controls_examples() {
        let path = ae_controls(1.5, 0.8);
        assert_eq!(path.at(0.0), (0.0, 0.8));
        let (d, o) = path.at(40.0);
        assert!((d - 1.5).abs() < 1e-15 && o < 1e-16);
        let (d, _) = path.at(-40.0);
        assert!((d + 1.5).abs() < 1e-15);
        let level = ae_controls(1.3, 1.3);
        for &s in &[-3.0, -0.5, 0.0, 1.2, 6.0] {
            assert!((level.energy_at(s) - 1.3).abs() < 1e-14);
        }
        let (dd, dom) = path.derivative_at(0.7);
        let sech = 1.0 / 0.7f64.cosh();
        assert!((dd - 1.5 * sech * sech).abs() < 1e-15);
        assert!((dom + 0.8 * sech * 0.7f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn ae_exact_examples() {
        assert!((ae_perr_exact(1.3, 0.0, 0.9) - 1.0).abs() < 1e-15);
        let sech_pi = 1.0 / PI.cosh();
        assert!((ae_perr_exact(1.0, 1.0, 1.0) - sech_pi * sech_pi).abs() < 1e-16);
        assert!((ae_perr_exact(1.0, 1.0, 1.0) - 7.441_950_142_796_216e-3).abs() < 1e-15);
        // pi T sqrt(omega0^2 - delta0^2) = pi/2
        let omega0 = (0.25f64 + 0.36).sqrt();
        assert!(ae_perr_exact(1.0, omega0, 0.6) < 1e-30);
        // huge arguments stay finite
        assert!(ae_perr_exact(500.0, 1.0, 2.0).is_finite());
    }

    #[test]
    fn ae_bound_examples() {
        let t = 0.8;
        assert!((ae_perr_bound(t, 1.2, 1.2).unwrap() - 4.0 * (-2.0 * PI * t * 1.2).exp()).abs() < 1e-15);
        assert_eq!(ae_perr_bound(t, 0.0, 1.0).unwrap(), 4.0);
        assert!(ae_perr_bound(2.0, 0.6, 1.0).unwrap() >= ae_perr_exact(2.0, 0.6, 1.0));
        assert!(ae_perr_bound(2.0, 1.1, 1.0).is_err());
    }

    #[test]
    fn t_epsilon_examples() {
        let t = ae_t_epsilon(1e-3, 1.0, 1.0).unwrap();
        assert!((t - (-(2.5e-4f64).ln() / (2.0 * PI))).abs() < 1e-14);
        assert!((t - 1.320).abs() < 1e-3);
        assert!(ae_perr_exact(1.33, 1.0, 1.0) < 1e-3);
        assert!(ae_t_epsilon(1.0 - 1e-12, 1.0, 1.0).unwrap() > 0.0);
        let t = ae_t_epsilon(1e-2, 2.0, 1.0).unwrap();
        assert!(ae_perr_exact(1.01 * t, 1.0, 2.0) < 1e-2);
        assert!(ae_t_epsilon(1e-2, 0.5, 1.0).is_err());
        assert!(ae_t_epsilon(1e-2, 1.0, 0.0).is_err());
        assert!(ae_t_epsilon(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn strategy_spec_plant_matches_paths() {
        let grid = StrategyKind::AllenEberly.default_grid();
        let spec = StrategySpec::allen_eberly(1.2, 0.7, 2.0, grid).unwrap();
        let plant = spec.plant();
        let h = plant.hamiltonian_at(&[1.2, 0.7], 0.4).unwrap();
        let (d, o) = spec.path().at(0.4);
        assert_eq!(h.get(0, 0).re, -d);
        assert_eq!(h.get(0, 1).re, o);
        assert_eq!(h.get(1, 1).re, d);
    }

    #[test]
    fn resonance_area_parametrization() {
        let grid = TimeGrid::new(0.0, 1.0, 100).unwrap();
        let spec = StrategySpec::resonance(1.5, Envelope::SinePi, 2.0, grid).unwrap();
        assert!((spec.pulse_area() - 2.0 / PI).abs() < 1e-15);
        assert_eq!(spec.theta(), [1.5, 2.0 / PI]);
        let doubled = spec.path_at(&[1.5, 4.0 / PI]).unwrap();
        assert!((doubled.at(0.5).1 - 3.0).abs() < 1e-14);
        assert!(StrategySpec::resonance(1.0, Envelope::SinePi, 1.0, TimeGrid::new(0.0, 2.0, 10).unwrap()).is_err());
    }

    #[test]
    fn spec_validation_and_kinds() {
        let grid = StrategyKind::LandauZener.default_grid();
        assert!(StrategySpec::landau_zener(-1.0, 1.0, 1.0, grid).is_err());
        assert!(StrategySpec::landau_zener(1.0, 1.0, 0.0, grid).is_err());
        assert!(StrategySpec::landau_zener(1.0, f64::NAN, 1.0, grid).is_err());
        for kind in
            [StrategyKind::Resonance, StrategyKind::LandauZener, StrategyKind::AllenEberly, StrategyKind::Custom]
        {
            assert_eq!(kind.as_str().parse::<StrategyKind>().unwrap(), kind);
        }
        assert!("rap".parse::<StrategyKind>().is_err());
        let custom = StrategySpec::new(
            Strategy::Custom { detuning: Envelope::Tanh, coupling: Envelope::Sech },
            1.0,
            1.0,
            1.0,
            grid,
        )
        .unwrap();
        assert!(matches!(custom.analytic_perr(&[1.0, 1.0]), Err(Error::Unsupported(_))));
    }
}
