//! Joint `n`-copy states and the per-copy measure series.
//!
//! The `n`-copy of `Σ √λ_{a,i} |i;a⟩|i;a⟩|a,a;1⟩` is rebuilt directly in the
//! joint Schmidt basis: every charge vector `a = (a₁…a_n)`, index vector `i`
//! and fusion path of `a` to total charge `c` contributes one sector-`c`
//! coefficient `λ_{a,i} d_c / d_a`. Coefficients depend only on how many
//! times each single-copy coefficient was drawn, so they are enumerated per
//! composition of `n` and stored grouped with their multiplicity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{e_ace_pure, e_aree_pure, e_ce_pure};
use crate::model::{fusion_multiplicity, log2_d_tau, tau_paths, Charge};
use crate::states::{aee, SchmidtState};

/// Default copy limit.
pub const DEFAULT_MAX_COPIES: u32 = 24;
/// Bound on the number of compositions enumerated by [`n_copy`].
pub const MAX_COMPOSITIONS: u128 = 5_000_000;
/// Agreement required between constructed and closed-form values.
pub const CONSISTENCY_TOL: f64 = 1e-9;

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

struct Item {
    charge: Charge,
    value: f64,
    multiplicity: u64,
}

/// Joint `n`-copy state with the default copy limit.
pub fn n_copy(state: &SchmidtState, n: u32) -> Result<SchmidtState> {
    n_copy_with_limit(state, n, DEFAULT_MAX_COPIES)
}

pub fn n_copy_with_limit(state: &SchmidtState, n: u32, max_copies: u32) -> Result<SchmidtState> {
    if n == 0 {
        return Err(Error::InvalidCopyCount(0));
    }
    if n > max_copies {
        return Err(Error::CopyLimitExceeded { n, max: max_copies });
    }
    let items: Vec<Item> = Charge::ALL
        .iter()
        .flat_map(|&c| {
            state.levels(c).iter().map(move |l| Item {
                charge: c,
                value: l.value,
                multiplicity: l.multiplicity,
            })
        })
        .collect();
    let k = items.len() as u32;
    let compositions = binomial(n + k - 1, k - 1);
    if compositions > MAX_COMPOSITIONS {
        return Err(Error::TooLarge {
            dim: u64::try_from(compositions).unwrap_or(u64::MAX),
            max: MAX_COMPOSITIONS as u64,
        });
    }

    let d = Charge::Tau.dim();
    let mut out: [Vec<(f64, u64)>; 2] = Default::default();
    let mut counts = vec![0u32; items.len()];
    let overflow = || Error::MultiplicityOverflow(n);

    let mut emit = |counts: &[u32]| -> Result<()> {
        let mut ways: u128 = 1;
        let mut left = n;
        let mut lambda = 1.0;
        let mut taus = 0u32;
        for (item, &cnt) in items.iter().zip(counts) {
            if cnt == 0 {
                continue;
            }
            ways = ways.checked_mul(binomial(left, cnt)).ok_or_else(overflow)?;
            ways = ways
                .checked_mul(u128::from(item.multiplicity).checked_pow(cnt).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
            left -= cnt;
            lambda *= item.value.powi(cnt as i32);
            if item.charge == Charge::Tau {
                taus += cnt;
            }
        }
        let d_a = d.powi(taus as i32);
        for c in Charge::ALL {
            let paths = tau_paths(taus, c);
            if paths == 0 {
                continue;
            }
            let mult = ways.checked_mul(u128::from(paths)).ok_or_else(overflow)?;
            let mult = u64::try_from(mult).map_err(|_| overflow())?;
            out[c.index()].push((lambda * c.dim() / d_a, mult));
        }
        Ok(())
    };

    // enumerate compositions of n into items.len() parts
    fn walk(
        pos: usize,
        left: u32,
        counts: &mut [u32],
        emit: &mut dyn FnMut(&[u32]) -> Result<()>,
    ) -> Result<()> {
        if pos + 1 == counts.len() {
            counts[pos] = left;
            return emit(counts);
        }
        for take in (0..=left).rev() {
            counts[pos] = take;
            walk(pos + 1, left - take, counts, emit)?;
        }
        Ok(())
    }
    walk(0, n, &mut counts, &mut emit)?;
    SchmidtState::from_levels(out)
}

/// Total-charge distribution `p_c` of the `n`-copy, by fusing one copy at a
/// time: `P_n(c) = Σ_{c′,a} P_{n−1}(c′) p_a N_{c′a}^c d_c / (d_{c′} d_a)`.
pub fn ncopy_sector_weights(state: &SchmidtState, n: u32) -> Result<[f64; 2]> {
    if n == 0 {
        return Err(Error::InvalidCopyCount(0));
    }
    let single = Charge::ALL.map(|c| state.sector_weight(c));
    let mut p = single;
    for _ in 1..n {
        let mut next = [0.0; 2];
        for prev in Charge::ALL {
            for a in Charge::ALL {
                for c in Charge::ALL {
                    if fusion_multiplicity(prev, a, c) == 1 {
                        next[c.index()] +=
                            p[prev.index()] * single[a.index()] * c.dim() / (prev.dim() * a.dim());
                    }
                }
            }
        }
        p = next;
    }
    Ok(p)
}

/// `n H({λ}) + n p_τ log₂ d_τ + p_τ^{(n)} log₂ d_τ`, without building the
/// `n`-copy state.
pub fn e_aree_ncopy(state: &SchmidtState, n: u32) -> Result<f64> {
    let p = ncopy_sector_weights(state, n)?;
    let nf = f64::from(n);
    Ok(nf * state.shannon_entropy()
        + nf * state.sector_weight(Charge::Tau) * log2_d_tau()
        + p[Charge::Tau.index()] * log2_d_tau())
}

/// `aee(ψⁿ) − n·aee(ψ)`; zero up to rounding.
pub fn aee_additivity_check(state: &SchmidtState, n: u32) -> Result<f64> {
    let joint = n_copy(state, n)?;
    Ok(aee(&joint) - f64::from(n) * aee(state))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyRow {
    pub n: u32,
    pub aee: f64,
    pub aree: f64,
    pub ace: f64,
    pub ce: f64,
}

/// Per-copy averages of the four measures for `n = 1..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopySeries {
    pub rows: Vec<CopyRow>,
}

pub fn copy_series(state: &SchmidtState, n_max: u32) -> Result<CopySeries> {
    if n_max == 0 {
        return Err(Error::InvalidCopyCount(0));
    }
    if n_max > DEFAULT_MAX_COPIES {
        return Err(Error::CopyLimitExceeded {
            n: n_max,
            max: DEFAULT_MAX_COPIES,
        });
    }
    let rows = (1..=n_max)
        .into_par_iter()
        .map(|n| -> Result<CopyRow> {
            let joint = n_copy(state, n)?;
            let nf = f64::from(n);
            let aree = e_aree_pure(&joint);
            let closed = e_aree_ncopy(state, n)?;
            if (aree - closed).abs() > CONSISTENCY_TOL * closed.max(1.0) {
                return Err(Error::DecompositionViolation {
                    residual: aree - closed,
                });
            }
            Ok(CopyRow {
                n,
                aee: aee(&joint) / nf,
                aree: aree / nf,
                ace: e_ace_pure(&joint) / nf,
                ce: e_ce_pure(&joint) / nf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CopySeries { rows })
}
