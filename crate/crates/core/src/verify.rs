//! Seeded invariant suite behind the `verify` command.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bell::{chsh_value, operator_chsh_value, rotation_observable, tsirelson_bound, Observable, PlaneTarget};
use crate::error::Result;
use crate::measures::{
    bipartite_shape, e_ace_pure, e_aree_pure, e_ce_pure, minimality_gradient, omega_project,
    pythagorean_residual,
};
use crate::model::{fusion_space_dim, total_quantum_dimension_squared, Charge, QSqrt5, D_TAU};
use crate::multicopy::{aee_additivity_check, n_copy};
use crate::random::{random_entangled_state, random_observable, random_separable, random_state};
use crate::states::SchmidtState;

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Largest violation observed, or a short note.
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }
}

fn outcome(name: &'static str, worst: Result<f64>, tol: f64) -> CheckOutcome {
    match worst {
        Ok(w) => CheckOutcome {
            name,
            passed: w <= tol,
            detail: format!("worst {w:.3e} (tolerance {tol:e})"),
        },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn max_over<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |acc, x| Ok(acc.max(x?)))
}

fn model_identities() -> Result<f64> {
    let phi = QSqrt5::golden();
    let mut bad = 0.0;
    if &phi * &phi != &phi + &QSqrt5::integer(1) {
        bad = 1.0;
    }
    if total_quantum_dimension_squared() != &QSqrt5::integer(1) + &(&phi * &phi) {
        bad = 1.0;
    }
    for n in 1..=20u32 {
        let lhs = &QSqrt5::integer(fusion_space_dim(n, Charge::Vacuum)? as i64)
            + &(&QSqrt5::integer(fusion_space_dim(n, Charge::Tau)? as i64) * &phi);
        if lhs != phi.pow(n) {
            bad = 1.0;
        }
    }
    Ok(bad)
}

fn superactivation_point() -> Result<f64> {
    let s = n_copy(&SchmidtState::tau_pair(), 3)?;
    let dims = [s.rank(Charge::Vacuum), s.rank(Charge::Tau)];
    let obs = [0.0, PI / 2.0, PI / 4.0, -PI / 4.0]
        .map(|t| rotation_observable(dims, t, PlaneTarget::leading(Charge::Tau)));
    let [a1, a2, b1, b2] = obs;
    let v = chsh_value(&s, &[a1?, a2?, b1?, b2?])?;
    Ok((v - (4.0 * 2f64.sqrt() * D_TAU + 2.0) / D_TAU.powi(3)).abs())
}

fn dense_dims(s: &SchmidtState) -> Result<[usize; 2]> {
    s.dense_dims()
}

/// Runs every check on `cases` seeded random inputs.
pub fn run_suite(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<SchmidtState> = (0..cases).map(|_| random_state(&mut rng)).collect();
    let entangled: Vec<SchmidtState> = (0..cases.min(20)).map(|_| random_entangled_state(&mut rng)).collect();
    let numeric = cases.min(20);

    let mut checks = vec![outcome("model identities are exact", model_identities(), 0.0)];
    checks.push(outcome(
        "AREE = ACE + CE (closed form)",
        max_over(states.iter().map(|s| Ok((e_aree_pure(s) - e_ace_pure(s) - e_ce_pure(s)).abs()))),
        1e-9,
    ));
    checks.push(outcome(
        "AREE = ACE + CE (block relative entropies)",
        max_over(states.iter().take(numeric).map(|s| pythagorean_residual(s).map(f64::abs))),
        1e-8,
    ));
    checks.push(outcome(
        "AEE is additive over copies",
        max_over(states.iter().take(numeric).map(|s| aee_additivity_check(s, 3).map(f64::abs))),
        1e-9,
    ));

    let mut grad_rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    checks.push(outcome(
        "closest separable state is a stationary minimum",
        max_over(entangled.iter().flat_map(|s| {
            (0..5)
                .map(|_| {
                    let dir = random_separable(&mut grad_rng, bipartite_shape(s)?, 1)?;
                    Ok((-minimality_gradient(s, &dir)?).max(0.0))
                })
                .collect::<Vec<_>>()
        })),
        1e-6,
    ));

    let mut obs_rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut tsirelson = Vec::new();
    let mut invariance = Vec::new();
    for s in &states {
        let eval = (|| -> Result<(f64, Option<f64>)> {
            let dims = dense_dims(s)?;
            let obs: Vec<Observable> = (0..4).map(|_| random_observable(&mut obs_rng, dims)).collect();
            let obs = [obs[0].clone(), obs[1].clone(), obs[2].clone(), obs[3].clone()];
            let v = chsh_value(s, &obs)?;
            let om = if invariance.len() < numeric {
                Some((operator_chsh_value(&*omega_project(s)?, &obs)? - v).abs())
            } else {
                None
            };
            Ok(((v.abs() - tsirelson_bound()).max(0.0), om))
        })();
        match eval {
            Ok((t, om)) => {
                tsirelson.push(Ok(t));
                if let Some(d) = om {
                    invariance.push(Ok(d));
                }
            }
            Err(e) => tsirelson.push(Err(e)),
        }
    }
    checks.push(outcome("Tsirelson bound", max_over(tsirelson), 1e-9));
    checks.push(outcome("CHSH value is invariant under Ω", max_over(invariance), 1e-10));
    checks.push(outcome("three-copy CHSH at the standard angles", superactivation_point(), 1e-12));

    SuiteReport { seed, cases, checks }
}
