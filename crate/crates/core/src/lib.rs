//! Average fidelities of quantum operations in closed form.
//!
//! For an operation that acts on an n-dimensional register, the average over
//! Haar-random pure states of |<psi|M|psi>|^2 equals
//! [Tr(M M†) + |Tr M|^2] / (n(n+1)). Everything in this crate builds on that
//! identity: exact average fidelities for unitaries, subspace-restricted
//! operations and Kraus channels, the closed-form scaling law for K identical
//! copies, worst-case bounds from eigenphase geometry, and a seeded Monte
//! Carlo estimator used as an independent cross-check.

pub mod channels;
pub mod error;
pub mod fidelity;
pub mod haar;
pub mod matrix;
pub mod pulse;

pub use channels::{
    amplitude_damping_channel, depolarizing_channel, DensityMatrix, KrausChannel,
};
pub use error::{Error, Result};
pub use fidelity::{
    acceptance_probability, avg_kraus, avg_quadratic_form, avg_subspace, avg_unitary,
    composite_bruteforce_check, composite_fidelity, conditional_fidelity, worst_case_unitary,
    FidelityKind, FidelityReport, SubspaceSelector,
};
pub use haar::{
    mc_channel_fidelity, mc_quadratic_form_average, sample_haar_state, sample_haar_unitary,
    sample_kraus_channel, McEstimate, PureState, SplitMix64,
};
pub use matrix::{Complex64, ComplexMatrix, EigenphaseSet};
pub use pulse::{
    optimize, robust_fidelity, sequence_unitary, ErrorGrid, OptOptions, OptResult, Pulse,
    PulseSequence,
};
