//! Inputs shared by the criterion benches.

use anyonic::{Charge, SchmidtState};

/// `|τ,τ;1⟩`.
pub fn tau_pair() -> SchmidtState {
    SchmidtState::tau_pair()
}

/// A state with two coefficients in each sector.
pub fn mixed_sectors() -> SchmidtState {
    SchmidtState::new([(Charge::Vacuum, [0.3, 0.2]), (Charge::Tau, [0.35, 0.15])])
        .expect("normalized")
}
