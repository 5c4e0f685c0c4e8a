//! Exact intersection numbers of λ_g, Θ and DR cycles, and the dictionary
//! between differential polynomials and those numbers via Fourier modes.

mod closed;
mod extract;
mod fourier;

pub use closed::{
    proof_consistency_residual, psi_pullback_factor, quadratic_dr_integral, quadratic_table, step1_series,
    theta_dr_boundary_term, theta_dr_psi_integral, theta_normalized_recursive, theta_power_dr_value,
    RamificationData, TableRow, ThetaValue,
};
pub use extract::{extract_intersection_numbers, hamiltonian_density, ExtractionSource};
pub use fourier::{
    constant_coefficient, fourier_substitute, functional_equal, zero_sum_multisets, FourierKey, FourierPoly,
    Mode,
};
