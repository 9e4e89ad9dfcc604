//! Entanglement and Bell nonlocality of pure bipartite Fibonacci-anyon states.
//!
//! States are given by their anyonic Schmidt coefficients `λ_{c,i}` grouped
//! by total charge `c ∈ {1, τ}`. The crate computes the anyonic entanglement
//! entropy and the three relative-entropy measures (anyonic, charge and
//! conventional), builds joint multi-copy states, and searches for CHSH
//! violations.
//!
//! ```
//! use anyonic::{measure_report, SchmidtState};
//!
//! let r = measure_report(&SchmidtState::tau_pair()).unwrap();
//! assert!((r.aree - 1.388483827261).abs() < 1e-12);
//! assert_eq!(r.ce, 0.0);
//! ```

pub mod bell;
pub mod error;
pub mod io;
pub mod measures;
pub mod model;
pub mod multicopy;
pub mod operator;
pub mod random;
pub mod states;
pub mod verify;

pub use bell::{
    chsh_value, expectation, locality_certificate, optimize_chsh, optimize_chsh_state,
    rotation_observable, type_c_bound, ChshBudget, ChshResult, LocalityCertificate, Observable,
    PlaneTarget, RefusalReason, SectorObservable, Verdict,
};
pub use error::{Error, Result};
pub use measures::{
    closest_separable_candidate, e_ace_pure, e_aree_pure, e_ce_pure, embed, measure_report,
    minimality_gradient, omega, omega_project, pythagorean_residual, relative_entropy,
    MeasureReport, OmegaOperator, SeparableState, SeparableTerm,
};
pub use model::{Charge, QSqrt5, D_TAU};
pub use multicopy::{copy_series, n_copy, CopyRow, CopySeries};
pub use operator::{BipartiteShape, BlockKey, CMatrix, GradedDensityOperator};
pub use states::{aee, anyonic_entropy, classify, reduced_density, SchmidtState, Side, StateClass};
