//! Seeded generators for states, observables and separable directions.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::bell::{random_involution, Observable};
use crate::error::{Error, Result};
use crate::measures::{pure_factor, SeparableState, SeparableTerm};
use crate::model::Charge;
use crate::operator::BipartiteShape;
use crate::states::SchmidtState;

/// Largest Schmidt rank per sector drawn by [`random_state`].
pub const MAX_RANDOM_RANK: usize = 3;

fn normalized_state<R: Rng + ?Sized>(rng: &mut R, ranks: [usize; 2]) -> SchmidtState {
    // floor keeps every coefficient strictly positive
    let raw = ranks.map(|k| (0..k).map(|_| rng.random::<f64>() + 0.05).collect::<Vec<_>>());
    let total: f64 = raw.iter().flatten().sum();
    let [v, t] = raw.map(|xs| xs.into_iter().map(|x| x / total).collect::<Vec<_>>());
    SchmidtState::new([(Charge::Vacuum, v), (Charge::Tau, t)]).expect("positive normalized coefficients")
}

/// Random state with sector ranks in `0..=MAX_RANDOM_RANK`, not both zero.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> SchmidtState {
    loop {
        let ranks = [0, 1].map(|_| rng.random_range(0..=MAX_RANDOM_RANK));
        if ranks.iter().sum::<usize>() > 0 {
            return normalized_state(rng, ranks);
        }
    }
}

/// Random state with at least one sector of rank ≥ 2.
pub fn random_entangled_state<R: Rng + ?Sized>(rng: &mut R) -> SchmidtState {
    let big = rng.random_range(0..2usize);
    let mut ranks = [0usize; 2];
    ranks[big] = rng.random_range(2..=MAX_RANDOM_RANK);
    ranks[1 - big] = rng.random_range(0..=MAX_RANDOM_RANK);
    normalized_state(rng, ranks)
}

/// Random state with the given sector ranks.
pub fn random_state_with_ranks<R: Rng + ?Sized>(rng: &mut R, ranks: [usize; 2]) -> Result<SchmidtState> {
    if ranks.iter().sum::<usize>() == 0 {
        return Err(Error::Domain("at least one coefficient is required".into()));
    }
    Ok(normalized_state(rng, ranks))
}

/// Uniformly random unit vector in `ℂ^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<Complex64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| {
            Complex64::new(gaussian(rng), gaussian(rng))
        });
        let n = v.norm();
        if n > 1e-8 {
            return v / Complex64::new(n, 0.0);
        }
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Dense random observable with the given sector dimensions.
pub fn random_observable<R: Rng + ?Sized>(rng: &mut R, dims: [usize; 2]) -> Observable {
    Observable::dense(dims.map(|d| random_involution(rng, d))).expect("Cayley involutions are valid")
}

/// Random mixture of `terms` pure product states on `shape`; each party's
/// factor sits in a randomly chosen nonempty sector.
pub fn random_separable<R: Rng + ?Sized>(
    rng: &mut R,
    shape: BipartiteShape,
    terms: usize,
) -> Result<SeparableState> {
    let sectors = |dims: [usize; 2]| Charge::ALL.into_iter().filter(|c| dims[c.index()] > 0).collect::<Vec<_>>();
    let (sa, sb) = (sectors(shape.alice), sectors(shape.bob));
    if sa.is_empty() || sb.is_empty() || terms == 0 {
        return Err(Error::Domain("no product state fits this shape".into()));
    }
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    let mut out = Vec::with_capacity(terms);
    for w in weights {
        let ca = sa[rng.random_range(0..sa.len())];
        let cb = sb[rng.random_range(0..sb.len())];
        out.push(SeparableTerm {
            probability: w / total,
            alice: pure_factor(ca, &random_unit_vector(rng, shape.alice[ca.index()]))?,
            bob: pure_factor(cb, &random_unit_vector(rng, shape.bob[cb.index()]))?,
        });
    }
    // rounding can leave the sum a few ulps off 1
    let sum: f64 = out.iter().map(|t| t.probability).sum();
    if let Some(last) = out.last_mut() {
        last.probability += 1.0 - sum;
    }
    SeparableState::new(shape, out)
}
