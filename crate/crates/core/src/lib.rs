//! Open-loop steering of finite-dimensional quantum systems under
//! parametrized controls, closed-form error probabilities for the resonance,
//! Landau-Zener and Allen-Eberly strategies, and epsilon-robustness maps over
//! parameter boxes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod envelope;
pub mod error;
pub mod linalg;
pub mod plant;
pub mod propagator;
pub mod robustness;
pub mod strategies;

pub use envelope::{Envelope, ScaledEnvelope, TwoLevelPath};
pub use error::{Error, Result};
pub use linalg::{apply, expm_step, overlap, HermitianOperator, QuantumState, UnitaryOperator};
pub use plant::{ControlFunction, ParameterBox, Plant};
pub use propagator::{
    adiabatic_frame_at, gamma_coupling, propagate, propagate_adiabatic, propagate_final, AdiabaticFrame, Frame,
    TimeGrid, Trajectory,
};
pub use robustness::{
    analytic_sweep, error_probability, robustness_set, sweep, sweep_plant, worst_case, ErrorMap, RobustnessReport,
    SweepOptions,
};
pub use strategies::{Strategy, StrategyKind, StrategySpec};
