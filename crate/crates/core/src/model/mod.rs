//! The Fibonacci anyon model: charges `{1, τ}`, fusion rules, quantum
//! dimensions and fusion-space dimensions.
//!
//! Quantum dimensions are exact elements of ℚ[√5]; use [`Charge::dim`] for
//! the `f64` projection at numerical boundaries.

mod qfield;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use qfield::QSqrt5;

use crate::error::{Error, Result};

/// Golden ratio `d_τ = (1 + √5) / 2`.
pub const D_TAU: f64 = 1.618_033_988_749_894_8;

/// `log₂ d_τ`.
pub fn log2_d_tau() -> f64 {
    D_TAU.log2()
}

/// Topological charge of the Fibonacci model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Charge {
    #[serde(rename = "1")]
    Vacuum,
    #[serde(rename = "tau")]
    Tau,
}

impl Charge {
    pub const ALL: [Charge; 2] = [Charge::Vacuum, Charge::Tau];

    /// Every Fibonacci charge is self-dual.
    pub fn dual(self) -> Charge {
        self
    }

    /// Exact quantum dimension.
    pub fn qdim(self) -> QSqrt5 {
        match self {
            Charge::Vacuum => QSqrt5::integer(1),
            Charge::Tau => QSqrt5::golden(),
        }
    }

    /// Quantum dimension as `f64`.
    pub fn dim(self) -> f64 {
        match self {
            Charge::Vacuum => 1.0,
            Charge::Tau => D_TAU,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Charge::Vacuum => 0,
            Charge::Tau => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Charge::Vacuum => "1",
            Charge::Tau => "tau",
        }
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Charge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "vacuum" => Ok(Charge::Vacuum),
            "tau" | "τ" => Ok(Charge::Tau),
            other => Err(Error::Parse(format!("unknown charge label {other:?}"))),
        }
    }
}

/// Possible outcomes of fusing `a` with `b`. Fibonacci fusion is
/// multiplicity-free, so a set suffices.
pub fn fuse(a: Charge, b: Charge) -> Vec<Charge> {
    use Charge::*;
    match (a, b) {
        (Vacuum, x) | (x, Vacuum) => vec![x],
        (Tau, Tau) => vec![Vacuum, Tau],
    }
}

/// Fusion multiplicity `N_ab^c` (always 0 or 1 here).
pub fn fusion_multiplicity(a: Charge, b: Charge, c: Charge) -> u32 {
    u32::from(fuse(a, b).contains(&c))
}

/// Exact quantum dimension of a charge.
pub fn qdim(a: Charge) -> QSqrt5 {
    a.qdim()
}

/// Total quantum dimension `D = √(d₁² + d_τ²)`.
pub fn total_quantum_dimension() -> f64 {
    total_quantum_dimension_squared().to_f64().sqrt()
}

/// `D² = 1 + d_τ²`, exact.
pub fn total_quantum_dimension_squared() -> QSqrt5 {
    Charge::ALL
        .iter()
        .map(|c| c.qdim().pow(2))
        .fold(QSqrt5::integer(0), |acc, x| &acc + &x)
}

/// Number of fusion paths for `n` τ anyons to reach total charge `c`.
///
/// Unlike [`fusion_space_dim`] this accepts `n = 0` (empty product is the
/// vacuum), which the multi-copy construction needs for all-vacuum charge
/// vectors.
pub fn tau_paths(n: u32, c: Charge) -> u64 {
    // (vacuum, tau) counts after k anyons
    let (mut v, mut t) = (1u64, 0u64);
    for _ in 0..n {
        // fusing one more τ: 1×τ = τ, τ×τ = 1 + τ
        let nv = t;
        let nt = v + t;
        v = nv;
        t = nt;
    }
    match c {
        Charge::Vacuum => v,
        Charge::Tau => t,
    }
}

/// Dimension of the fusion space of `n ≥ 1` τ anyons with total charge `c`.
pub fn fusion_space_dim(n: u32, c: Charge) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidCopyCount(0));
    }
    Ok(tau_paths(n, c))
}

/// Vacuum-channel bend coefficient `√(d_c / (d_a d_b))`, or 0 when `c` is not
/// an allowed channel of `a × b̄`.
pub fn vacuum_bend_coefficient(a: Charge, b: Charge, c: Charge) -> f64 {
    if fusion_multiplicity(a, b.dual(), c) == 0 {
        return 0.0;
    }
    (c.dim() / (a.dim() * b.dim())).sqrt()
}

/// Static description of the model, for reporting and tests.
#[derive(Clone, Debug)]
pub struct ModelData {
    pub charges: Vec<Charge>,
    pub fusion_table: Vec<((Charge, Charge), Vec<Charge>)>,
    pub total_dimension: f64,
}

impl ModelData {
    pub fn fibonacci() -> Self {
        let mut table = Vec::new();
        for a in Charge::ALL {
            for b in Charge::ALL {
                table.push(((a, b), fuse(a, b)));
            }
        }
        Self {
            charges: Charge::ALL.to_vec(),
            fusion_table: table,
            total_dimension: total_quantum_dimension(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fusion_rules() {
        assert_eq!(fuse(Charge::Tau, Charge::Tau), vec![Charge::Vacuum, Charge::Tau]);
        assert_eq!(fuse(Charge::Vacuum, Charge::Tau), vec![Charge::Tau]);
        assert_eq!(fuse(Charge::Tau, Charge::Vacuum), vec![Charge::Tau]);
        assert_eq!(fuse(Charge::Vacuum, Charge::Vacuum), vec![Charge::Vacuum]);
    }

    #[test]
    fn duals_and_dims() {
        assert_eq!(Charge::Tau.dual(), Charge::Tau);
        assert_eq!(Charge::Vacuum.dual(), Charge::Vacuum);
        assert_eq!(qdim(Charge::Vacuum), QSqrt5::integer(1));
        assert!((qdim(Charge::Tau).to_f64() - 1.618_033_988_7).abs() < 1e-10);
        assert!((total_quantum_dimension() - 1.902_113_032_6).abs() < 1e-10);
    }

    #[test]
    fn total_dimension_squared_exact() {
        let d = qdim(Charge::Tau);
        assert_eq!(total_quantum_dimension_squared(), &QSqrt5::integer(1) + &d.pow(2));
        // 1 + φ² = (5 + √5)/2
        assert_eq!(total_quantum_dimension_squared(), QSqrt5::from_integers(5, 1));
    }

    #[test]
    fn fusion_space_dims() {
        assert_eq!(fusion_space_dim(2, Charge::Vacuum).unwrap(), 1);
        assert_eq!(fusion_space_dim(3, Charge::Tau).unwrap(), 2);
        assert_eq!(fusion_space_dim(4, Charge::Vacuum).unwrap(), 2);
        assert_eq!(fusion_space_dim(1, Charge::Vacuum).unwrap(), 0);
        assert!(matches!(
            fusion_space_dim(0, Charge::Tau),
            Err(Error::InvalidCopyCount(0))
        ));
    }

    #[test]
    fn bend_coefficients() {
        use Charge::*;
        assert!((vacuum_bend_coefficient(Tau, Tau, Vacuum) - 0.618_033_988_7).abs() < 1e-10);
        assert!((vacuum_bend_coefficient(Tau, Tau, Tau) - 0.786_151_377_8).abs() < 1e-10);
        assert_eq!(vacuum_bend_coefficient(Vacuum, Vacuum, Vacuum), 1.0);
        assert_eq!(vacuum_bend_coefficient(Vacuum, Tau, Vacuum), 0.0);
        assert_eq!(vacuum_bend_coefficient(Vacuum, Vacuum, Tau), 0.0);
    }

    #[test]
    fn charge_labels_parse() {
        assert_eq!("1".parse::<Charge>().unwrap(), Charge::Vacuum);
        assert_eq!("tau".parse::<Charge>().unwrap(), Charge::Tau);
        assert!("sigma".parse::<Charge>().is_err());
    }
}
