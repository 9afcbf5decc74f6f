//! Arithmetic side of the toolkit: the group F_p^n, its Fourier analysis,
//! subspace regularity, and removal of solutions to x + y + z = 0.

pub mod fourier;
pub mod regularity;
pub mod removal;
pub mod space;
pub mod subspace;

pub use fourier::{dft, idft, lambda, lambda_direct, lambda_spectral, parseval_sides};
pub use regularity::{
    counting_lemma_gap, is_weakly_regular, regularity_defect, weak_regularity_subspace,
    CountingGap,
};
pub use removal::{
    count_solutions, min_deletions, weighted_removal_roundtrip, ArithRemovalMode,
    ArithRemovalOutcome, RoundTripOutcome,
};
pub use space::{DensityFunction, FpnSpace};
pub use subspace::{coset_average, Subspace};
