//! Steady-state and time-domain solvers for the two-mode medium.

mod spectral;
mod steady;
mod time_domain;

pub use spectral::{energy_transmission, group_delay, propagate_pulse, Port};
pub use steady::{
    extract_bs_coefficients, has_degenerate_phase, steady_state_coherences, transfer_matrix,
    transfer_matrix_rk4, Coherences, TransferMatrix,
};
pub use time_domain::{time_domain_oracle, time_domain_propagate};
