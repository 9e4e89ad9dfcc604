//! Pure bipartite anyonic states with total charge vacuum, in Schmidt form.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{log2_d_tau, Charge};
use crate::operator::{BlockKey, GradedDensityOperator};

/// Maximum sum deviation that [`SchmidtState::new`] silently renormalizes.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Entropy below which a state counts as pure.
pub const PURITY_TOL: f64 = 1e-10;
/// Threshold separating zero from positive measures in [`classify`].
pub const CLASS_TOL: f64 = 1e-10;
/// Largest total dimension for which dense matrices are built.
pub const MAX_DENSE_DIM: u64 = 4096;

/// A run of equal Schmidt coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub value: f64,
    pub multiplicity: u64,
}

/// `Σ_c Σ_i √λ_{c,i} |i;c⟩_A |i;c⟩_B |c,c;1⟩` stored as sector-indexed
/// coefficient lists.
///
/// Canonical form: zero coefficients stripped, each sector sorted in
/// descending order with exactly equal values grouped into one [`Level`].
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtState {
    sectors: [Vec<Level>; 2],
}

fn shannon_term(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

fn canonical_levels(mut values: Vec<(f64, u64)>) -> Vec<Level> {
    values.retain(|&(v, m)| v > 0.0 && m > 0);
    values.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out: Vec<Level> = Vec::with_capacity(values.len());
    for (value, multiplicity) in values {
        match out.last_mut() {
            Some(last) if last.value == value => last.multiplicity += multiplicity,
            _ => out.push(Level {
                value,
                multiplicity,
            }),
        }
    }
    out
}

impl SchmidtState {
    /// Validates and canonicalises user-supplied coefficients.
    ///
    /// Sums within [`NORMALIZATION_TOL`] of 1 are renormalized; larger
    /// deviations are rejected.
    pub fn new<I, V>(sectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Charge, V)>,
        V: AsRef<[f64]>,
    {
        let mut raw: [Vec<f64>; 2] = Default::default();
        for (charge, values) in sectors {
            raw[charge.index()].extend_from_slice(values.as_ref());
        }
        for charge in Charge::ALL {
            for (index, &value) in raw[charge.index()].iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::Validation {
                        sector: charge,
                        index,
                        value,
                        reason: "not a finite number",
                    });
                }
                if value < 0.0 {
                    return Err(Error::Validation {
                        sector: charge,
                        index,
                        value,
                        reason: "negative",
                    });
                }
            }
        }
        let sum: f64 = raw.iter().flatten().sum();
        if sum <= 0.0 || (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization {
                sum,
                tolerance: NORMALIZATION_TOL,
            });
        }
        let sectors = raw.map(|v| canonical_levels(v.into_iter().map(|x| (x / sum, 1)).collect()));
        Ok(Self { sectors })
    }

    /// Convenience constructor from a map.
    pub fn from_map(map: &BTreeMap<Charge, Vec<f64>>) -> Result<Self> {
        Self::new(map.iter().map(|(c, v)| (*c, v.as_slice())))
    }

    /// The state `|τ,τ;1⟩`.
    pub fn tau_pair() -> Self {
        Self::new([(Charge::Tau, [1.0])]).expect("valid")
    }

    /// Builds a state from grouped levels without renormalizing.
    ///
    /// The sum must already lie within [`NORMALIZATION_TOL`] of 1.
    pub fn from_levels(levels: [Vec<(f64, u64)>; 2]) -> Result<Self> {
        for charge in Charge::ALL {
            for (index, &(value, _)) in levels[charge.index()].iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::Validation {
                        sector: charge,
                        index,
                        value,
                        reason: "negative or non-finite",
                    });
                }
            }
        }
        let state = Self {
            sectors: levels.map(canonical_levels),
        };
        let sum = state.total_weight();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization {
                sum,
                tolerance: NORMALIZATION_TOL,
            });
        }
        Ok(state)
    }

    pub fn levels(&self, c: Charge) -> &[Level] {
        &self.sectors[c.index()]
    }

    /// Sector Schmidt rank `K_c`.
    pub fn rank(&self, c: Charge) -> u64 {
        self.levels(c).iter().map(|l| l.multiplicity).sum()
    }

    /// `p_c = Σ_i λ_{c,i}`.
    pub fn sector_weight(&self, c: Charge) -> f64 {
        self.levels(c)
            .iter()
            .map(|l| l.value * l.multiplicity as f64)
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        Charge::ALL.iter().map(|&c| self.sector_weight(c)).sum()
    }

    /// Sectors that hold at least one coefficient.
    pub fn occupied(&self) -> impl Iterator<Item = Charge> + '_ {
        Charge::ALL.into_iter().filter(|&c| self.rank(c) > 0)
    }

    /// The `index`-th largest coefficient of sector `c`.
    pub fn coefficient_at(&self, c: Charge, index: u64) -> Option<f64> {
        let mut seen = 0u64;
        for level in self.levels(c) {
            seen += level.multiplicity;
            if index < seen {
                return Some(level.value);
            }
        }
        None
    }

    /// Expanded coefficients of one sector (descending).
    pub fn coefficients(&self, c: Charge) -> Result<Vec<f64>> {
        let rank = self.rank(c);
        if rank > MAX_DENSE_DIM {
            return Err(Error::TooLarge {
                dim: rank,
                max: MAX_DENSE_DIM,
            });
        }
        Ok(self
            .levels(c)
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.value, l.multiplicity as usize))
            .collect())
    }

    /// Sector ranks as `usize`, for dense constructions.
    pub fn dense_dims(&self) -> Result<[usize; 2]> {
        let dims = [self.rank(Charge::Vacuum), self.rank(Charge::Tau)];
        let total: u64 = dims.iter().map(|d| d * d).sum();
        if total > MAX_DENSE_DIM {
            return Err(Error::TooLarge {
                dim: total,
                max: MAX_DENSE_DIM,
            });
        }
        Ok(dims.map(|d| d as usize))
    }

    /// `H({λ_{c,i}})` over all coefficients.
    pub fn shannon_entropy(&self) -> f64 {
        self.sectors
            .iter()
            .flatten()
            .map(|l| l.multiplicity as f64 * shannon_term(l.value))
            .sum()
    }

    /// `H({p_c})`.
    pub fn sector_entropy(&self) -> f64 {
        Charge::ALL
            .iter()
            .map(|&c| shannon_term(self.sector_weight(c)))
            .sum()
    }

    /// `Σ_c p_c H({λ_{c,i}/p_c})`.
    pub fn conditional_entropy(&self) -> f64 {
        Charge::ALL
            .iter()
            .map(|&c| {
                let p = self.sector_weight(c);
                if p <= 0.0 {
                    return 0.0;
                }
                let h: f64 = self
                    .levels(c)
                    .iter()
                    .map(|l| l.multiplicity as f64 * shannon_term(l.value / p))
                    .sum();
                p * h
            })
            .sum()
    }

    /// Returns a copy with sector `c`'s coefficients permuted; exposed for
    /// invariance tests since the canonical form re-sorts anyway.
    pub fn with_sector(&self, c: Charge, values: &[f64]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for other in Charge::ALL {
            let v = if other == c {
                values.to_vec()
            } else {
                self.coefficients(other)?
            };
            map.insert(other, v);
        }
        Self::from_map(&map)
    }
}

/// Which party a reduced state belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Anyonic entanglement entropy `H({λ}) + p_τ log₂ d_τ`.
pub fn aee(state: &SchmidtState) -> f64 {
    state.shannon_entropy() + state.sector_weight(Charge::Tau) * log2_d_tau()
}

/// Reduced state of one party: sector block `diag(λ_{c,·}) / d_c`.
///
/// Both sides have the same blocks since every Fibonacci charge is
/// self-dual.
pub fn reduced_density(state: &SchmidtState, _side: Side) -> Result<GradedDensityOperator> {
    let mut op = GradedDensityOperator::subsystem();
    for c in state.occupied() {
        let diag: Vec<Complex64> = state
            .coefficients(c)?
            .into_iter()
            .map(|l| Complex64::new(l / c.dim(), 0.0))
            .collect();
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
        op.insert(BlockKey::Subsystem(c), m)?;
    }
    Ok(op)
}

/// Anyonic entropy `−Tr̃(ρ log₂ ρ)` of a state.
pub fn anyonic_entropy(op: &GradedDensityOperator) -> Result<f64> {
    op.check_state()?;
    op.entropy_unchecked()
}

/// Purity: zero anyonic entropy.
pub fn is_pure(op: &GradedDensityOperator) -> Result<bool> {
    Ok(anyonic_entropy(op)? <= PURITY_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateClass {
    TypeA,
    TypeB,
    TypeC,
}

/// Type A/B/C tag from the charge and conventional entanglement measures.
pub fn classify(state: &SchmidtState) -> StateClass {
    let ce = crate::measures::e_ce_pure(state);
    let ace = crate::measures::e_ace_pure(state);
    if ce > CLASS_TOL {
        StateClass::TypeC
    } else if ace > CLASS_TOL {
        StateClass::TypeB
    } else {
        StateClass::TypeA
    }
}
