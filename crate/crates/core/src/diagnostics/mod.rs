//! Empirical checks of the chain's behaviour: burn-in of the `r` statistics,
//! edge independence, metastability, and pseudo-randomness of samples.

pub mod burn_in;
pub mod hysteresis;
pub mod independence;
pub mod pseudo;
pub mod spectral;

pub use burn_in::{burn_in_trace, resolve_p_star, BurnInOptions, BurnInRow, BurnInTrace, StartState};
pub use hysteresis::{hysteresis_probe, HysteresisOptions, HysteresisReport, StartOutcome};
pub use independence::{exact_independence, independence_test, IndependenceOptions, IndependenceReport};
pub use pseudo::{pseudo_random_check, CheckResult, PseudoRandomOptions, PseudoRandomReport};
pub use spectral::{top_two_eigenvalues, SpectralEstimate, SpectralOptions};
