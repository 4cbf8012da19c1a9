//! Semiclassical bound-state energies from quantized classical actions.
//!
//! A potential is described by a [`PotentialSpec`]. Its classically allowed
//! intervals come from [`find_cuts`], the action over them from
//! [`total_action`], and the levels from [`solve_level`] or [`spectrum`].
//! [`fd_eigenvalues`] supplies a finite-difference reference spectrum and
//! [`coulomb`] handles the separable three-dimensional Coulomb problem.

pub mod action;
pub mod coulomb;
pub mod error;
pub mod fd_oracle;
pub mod format;
pub mod potential;
pub mod quadrature;
pub mod quantizer;
pub mod state_function;
pub mod turning_points;

pub use action::{
    action_over_cut, action_over_cuts, phase_at, total_action, total_action_in, ActionValue, PhaseKind,
    PhaseValue, DEFAULT_ACTION_RTOL,
};
pub use coulomb::{
    coulomb_closed_form, coulomb_spectrum, ActionTriple, CoulombParams, QuantumNumbers, SeparationConstants,
};
pub use error::{Error, Result};
pub use fd_oracle::{fd_eigenvalues, FdGrid};
pub use format::sig15;
pub use potential::{
    parse_potential, Family, Interval, MomentumRegion, MomentumValue, PotentialSpec, UnitSystem,
};
pub use quadrature::{integrate_adaptive, integrate_turning, Estimate, GaussLegendre};
pub use quantizer::{
    rotation_action, solve_level, solve_level_with, spectrum, spectrum_with, EnergyLevel, MaslovRule,
    QuantizationTarget, SolveOptions,
};
pub use state_function::{
    build_state_function, closed_form_norm_constant, connect, count_nodes, count_sign_changes,
    ClosedFormNormConstant, ConnectionCoefficients, GridSpec, RegionTag, StateFunctionTable,
};
pub use turning_points::{find_cuts, find_cuts_default, Cut, CutSet, Endpoint};
