//! Entanglement measures of pure anyonic states.
//!
//! Closed forms (all in bits):
//!
//! | measure | value |
//! |---------|-------|
//! | AREE | `H({λ}) + 2 p_τ log₂ d_τ` |
//! | ACE  | `H({p_c}) + 2 p_τ log₂ d_τ` |
//! | CE   | `Σ_c p_c H({λ_{c,i} / p_c})` |
//!
//! and `AREE = ACE + CE` holds identically. The numeric side of the module
//! rebuilds the same quantities from graded operators: the state itself
//! ([`embed`]), its Ω image ([`omega_project`]) and the separable state that
//! attains the AREE ([`closest_separable_candidate`]).

use std::ops::Deref;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{log2_d_tau, Charge};
use crate::operator::{self, BipartiteShape, BlockKey, GradedDensityOperator};
use crate::states::{aee, SchmidtState};

pub use crate::operator::relative_entropy;

/// Tolerance of the `AREE = ACE + CE` identity.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// Finite-difference steps for [`minimality_gradient`].
pub const GRADIENT_STEPS: (f64, f64) = (1e-4, 1e-5);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub aee: f64,
    pub aree: f64,
    pub ace: f64,
    pub ce: f64,
}

/// Anyonic relative entropy of entanglement of a pure state.
pub fn e_aree_pure(state: &SchmidtState) -> f64 {
    state.shannon_entropy() + 2.0 * state.sector_weight(Charge::Tau) * log2_d_tau()
}

/// Anyonic charge entanglement of a pure state.
pub fn e_ace_pure(state: &SchmidtState) -> f64 {
    state.sector_entropy() + 2.0 * state.sector_weight(Charge::Tau) * log2_d_tau()
}

/// Conventional entanglement of a pure state.
pub fn e_ce_pure(state: &SchmidtState) -> f64 {
    state.conditional_entropy()
}

pub fn measure_report(state: &SchmidtState) -> Result<MeasureReport> {
    let report = MeasureReport {
        aee: aee(state),
        aree: e_aree_pure(state),
        ace: e_ace_pure(state),
        ce: e_ce_pure(state),
    };
    let residual = report.aree - report.ace - report.ce;
    if residual.abs() > DECOMPOSITION_TOL {
        return Err(Error::DecompositionViolation { residual });
    }
    Ok(report)
}

/// Dense sector shape of the bipartite space carrying `state`.
pub fn bipartite_shape(state: &SchmidtState) -> Result<BipartiteShape> {
    Ok(BipartiteShape::symmetric(state.dense_dims()?))
}

/// Amplitude vector `ψ_c` of sector `c` on the `K_c × K_c` product space:
/// `√λ_{c,i}` at the paired position `(i, i)`, zero elsewhere.
fn paired_amplitudes(coeffs: &[f64]) -> DVector<Complex64> {
    let k = coeffs.len();
    let mut v = DVector::zeros(k * k);
    for (i, l) in coeffs.iter().enumerate() {
        v[i * k + i] = Complex64::new(l.sqrt(), 0.0);
    }
    v
}

/// The pure state `|ψ⟩⟨ψ|` as a rank-1 block in the vacuum fusion channel.
///
/// Kets `|i;c⟩_A |j;c⟩_B |c,c;1⟩` are quantum-trace orthonormal, so the
/// block is the ordinary projector on `ψ` with weight 1.
pub fn embed(state: &SchmidtState) -> Result<GradedDensityOperator> {
    let shape = bipartite_shape(state)?;
    let layout = shape.channel_layout(Charge::Vacuum);
    let dim: usize = layout.iter().map(|s| s.dim).sum();
    let mut psi = DVector::<Complex64>::zeros(dim);
    for slot in &layout {
        let amps = paired_amplitudes(&state.coefficients(slot.alice)?);
        psi.rows_mut(slot.offset, slot.dim).copy_from(&amps);
    }
    let mut op = GradedDensityOperator::bipartite(shape);
    op.insert(BlockKey::Channel(Charge::Vacuum), &psi * psi.adjoint())?;
    Ok(op)
}

/// Ω image of a pure state: pair block `(c, c)` equal to `ψ_c ψ_c† / d_c²`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaOperator(GradedDensityOperator);

impl OmegaOperator {
    pub fn into_inner(self) -> GradedDensityOperator {
        self.0
    }
}

impl Deref for OmegaOperator {
    type Target = GradedDensityOperator;
    fn deref(&self) -> &GradedDensityOperator {
        &self.0
    }
}

pub fn omega_project(state: &SchmidtState) -> Result<OmegaOperator> {
    Ok(OmegaOperator(operator::omega(&embed(state)?)?))
}

/// Ω applied to an arbitrary bipartite operator.
pub fn omega(op: &GradedDensityOperator) -> Result<GradedDensityOperator> {
    operator::omega(op)
}

/// One product term `p · ρ_A ⊗ ρ_B` of a separable state.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableTerm {
    pub probability: f64,
    pub alice: GradedDensityOperator,
    pub bob: GradedDensityOperator,
}

/// `Σ_k p_k ρ_A^k ⊗ ρ_B^k` over a fixed bipartite sector shape.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableState {
    shape: BipartiteShape,
    terms: Vec<SeparableTerm>,
}

impl SeparableState {
    pub fn new(shape: BipartiteShape, terms: Vec<SeparableTerm>) -> Result<Self> {
        let total: f64 = terms.iter().map(|t| t.probability).sum();
        if terms.iter().any(|t| t.probability < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotAState(format!(
                "mixture weights must be nonnegative and sum to 1 (sum {total})"
            )));
        }
        for term in &terms {
            for (party, op, dims) in [("Alice", &term.alice, shape.alice), ("Bob", &term.bob, shape.bob)] {
                if op.shape().is_some() {
                    return Err(Error::BlockMismatch(format!("{party}'s factor is bipartite")));
                }
                for (key, m) in op.blocks() {
                    let BlockKey::Subsystem(c) = key else { unreachable!() };
                    if m.nrows() != dims[c.index()] {
                        return Err(Error::DimensionMismatch(format!(
                            "{party}'s factor has a {}-dim block in sector {c}, shape has {}",
                            m.nrows(),
                            dims[c.index()]
                        )));
                    }
                }
                op.check_state()?;
            }
        }
        Ok(Self { shape, terms })
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn terms(&self) -> &[SeparableTerm] {
        &self.terms
    }

    /// The mixture as a product-form bipartite operator.
    pub fn to_operator(&self) -> Result<GradedDensityOperator> {
        let mut op = GradedDensityOperator::bipartite(self.shape);
        for term in &self.terms {
            for (ka, a) in term.alice.blocks() {
                for (kb, b) in term.bob.blocks() {
                    let (BlockKey::Subsystem(ca), BlockKey::Subsystem(cb)) = (ka, kb) else {
                        unreachable!()
                    };
                    op.accumulate(BlockKey::Pair(ca, cb), &a.kronecker(b), term.probability)?;
                }
            }
        }
        Ok(op)
    }
}

/// `(1/d_c) |v⟩⟨v|` as a one-party state in sector `c` of dimension `v.len()`.
pub fn pure_factor(c: Charge, v: &DVector<Complex64>) -> Result<GradedDensityOperator> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::Domain("zero vector".into()));
    }
    let u = v / Complex64::new(norm, 0.0);
    let mut op = GradedDensityOperator::subsystem();
    op.insert(BlockKey::Subsystem(c), (&u * u.adjoint()) / Complex64::new(c.dim(), 0.0))?;
    Ok(op)
}

/// The separable state `Σ_{c,i} λ_{c,i} (1/d_c)|i;c⟩⟨i;c| ⊗ (1/d_c)|i;c⟩⟨i;c|`.
pub fn closest_separable_candidate(state: &SchmidtState) -> Result<SeparableState> {
    let shape = bipartite_shape(state)?;
    let mut terms = Vec::new();
    for c in state.occupied() {
        let coeffs = state.coefficients(c)?;
        let k = coeffs.len();
        for (i, &lambda) in coeffs.iter().enumerate() {
            let mut e = DVector::zeros(k);
            e[i] = Complex64::new(1.0, 0.0);
            let factor = pure_factor(c, &e)?;
            terms.push(SeparableTerm {
                probability: lambda,
                alice: factor.clone(),
                bob: factor,
            });
        }
    }
    // weights sum to 1 up to rounding; renormalize the last bit away
    let total: f64 = terms.iter().map(|t| t.probability).sum();
    for t in &mut terms {
        t.probability /= total;
    }
    SeparableState::new(shape, terms)
}

/// `S̃(ρ ‖ (1−x) ρ₀ + x ρ′)` at a given `x`.
fn mixed_relative_entropy(
    rho: &GradedDensityOperator,
    base: &GradedDensityOperator,
    direction: &GradedDensityOperator,
    x: f64,
) -> Result<f64> {
    let sigma = base.combine(1.0 - x, direction, x)?;
    relative_entropy(rho, &sigma)
}

/// Directional derivative of `x ↦ S̃(ρ ‖ (1−x)ρ₀ + xρ′)` at `x = 0`, with
/// `ρ₀` the [`closest_separable_candidate`] and `ρ′ = direction`.
///
/// One-sided differences at both [`GRADIENT_STEPS`], combined by first-order
/// Richardson extrapolation. Negative `x` would leave the state cone.
pub fn minimality_gradient(state: &SchmidtState, direction: &SeparableState) -> Result<f64> {
    let rho = embed(state)?;
    let base = closest_separable_candidate(state)?;
    if base.shape() != direction.shape() {
        return Err(Error::BlockMismatch(
            "direction lives on a different sector shape".into(),
        ));
    }
    let base = base.to_operator()?;
    let dir = direction.to_operator()?;
    let f0 = relative_entropy(&rho, &base)?;
    let (h1, h2) = GRADIENT_STEPS;
    let d1 = (mixed_relative_entropy(&rho, &base, &dir, h1)? - f0) / h1;
    let d2 = (mixed_relative_entropy(&rho, &base, &dir, h2)? - f0) / h2;
    Ok((h1 * d2 - h2 * d1) / (h1 - h2))
}

/// `AREE − S̃(ρ‖Ω(ρ)) − S̃(Ω(ρ)‖ρ₀)`, evaluated numerically.
pub fn pythagorean_residual(state: &SchmidtState) -> Result<f64> {
    let rho = embed(state)?;
    let omega = omega_project(state)?;
    let sep = closest_separable_candidate(state)?.to_operator()?;
    Ok(e_aree_pure(state) - relative_entropy(&rho, &omega)? - relative_entropy(&omega, &sep)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::D_TAU;
    use crate::states::{anyonic_entropy, is_pure};

    fn state(pairs: &[(Charge, &[f64])]) -> SchmidtState {
        SchmidtState::new(pairs.iter().map(|(c, v)| (*c, *v))).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let tau = SchmidtState::tau_pair();
        let vac = state(&[(Charge::Vacuum, &[1.0])]);
        let mix = state(&[(Charge::Vacuum, &[0.5]), (Charge::Tau, &[0.5])]);
        let bell = state(&[(Charge::Vacuum, &[0.5, 0.5])]);

        assert!((e_aree_pure(&tau) - 1.388_483_827_3).abs() < 1e-10);
        assert_eq!(e_aree_pure(&vac), 0.0);
        assert!((e_aree_pure(&mix) - 1.694_241_913_6).abs() < 1e-10);

        assert!((e_ace_pure(&tau) - 1.388_483_827_3).abs() < 1e-10);
        assert_eq!(e_ace_pure(&bell), 0.0);
        assert!((e_ace_pure(&mix) - 1.694_241_913_6).abs() < 1e-10);

        assert_eq!(e_ce_pure(&tau), 0.0);
        assert!((e_ce_pure(&bell) - 1.0).abs() < 1e-15);
        let three = state(&[
            (Charge::Vacuum, &[1.0 / D_TAU.powi(3)]),
            (Charge::Tau, &[1.0 / (D_TAU * D_TAU), 1.0 / (D_TAU * D_TAU)]),
        ]);
        assert!((e_ce_pure(&three) - 0.763_932_0).abs() < 1e-7);
        assert!((e_ce_pure(&three) - 2.0 / (D_TAU * D_TAU)).abs() < 1e-12);
    }

    #[test]
    fn report_examples() {
        let r = measure_report(&SchmidtState::tau_pair()).unwrap();
        assert!((r.aee - 0.694_241_9).abs() < 1e-7);
        assert!((r.aree - 1.388_483_8).abs() < 1e-7);
        assert!((r.ace - 1.388_483_8).abs() < 1e-7);
        assert_eq!(r.ce, 0.0);
        let zero = measure_report(&state(&[(Charge::Vacuum, &[1.0])])).unwrap();
        assert_eq!(zero, MeasureReport { aee: 0.0, aree: 0.0, ace: 0.0, ce: 0.0 });
        let r = measure_report(&state(&[(Charge::Vacuum, &[0.25, 0.25]), (Charge::Tau, &[0.5])])).unwrap();
        assert!((r.ce - 0.5).abs() < 1e-15);
        assert!((r.aree - r.ace - r.ce).abs() < 1e-12);
    }

    #[test]
    fn embed_is_pure_and_normalized() {
        for s in [
            SchmidtState::tau_pair(),
            state(&[(Charge::Vacuum, &[1.0])]),
            state(&[(Charge::Vacuum, &[0.3, 0.2]), (Charge::Tau, &[0.4, 0.1])]),
        ] {
            let e = embed(&s).unwrap();
            assert!((e.quantum_trace() - 1.0).abs() < 1e-12);
            assert!(is_pure(&e).unwrap());
        }
        let vac = embed(&state(&[(Charge::Vacuum, &[1.0])])).unwrap();
        assert_eq!(vac.block(BlockKey::Channel(Charge::Vacuum)).unwrap()[(0, 0)].re, 1.0);
    }

    #[test]
    fn omega_examples() {
        let om = omega_project(&SchmidtState::tau_pair()).unwrap();
        let b = om.block(BlockKey::Pair(Charge::Tau, Charge::Tau)).unwrap();
        assert_eq!(b.shape(), (1, 1));
        assert!((b[(0, 0)].re - 1.0 / (D_TAU * D_TAU)).abs() < 1e-15);
        assert!((om.quantum_trace() - 1.0).abs() < 1e-12);
        // the Ω image of |τ,τ;1⟩ is mixed: entropy 2 log₂ d_τ
        assert!((anyonic_entropy(&om).unwrap() - 2.0 * D_TAU.log2()).abs() < 1e-12);

        let vac = omega_project(&state(&[(Charge::Vacuum, &[1.0])])).unwrap();
        assert_eq!(vac.block(BlockKey::Pair(Charge::Vacuum, Charge::Vacuum)).unwrap()[(0, 0)].re, 1.0);

        let s = state(&[(Charge::Vacuum, &[0.3, 0.2]), (Charge::Tau, &[0.4, 0.1])]);
        let once = omega_project(&s).unwrap();
        let twice = omega(&once).unwrap();
        assert_eq!(once.max_abs_diff(&twice).unwrap(), 0.0);
    }

    #[test]
    fn candidate_examples() {
        let c = closest_separable_candidate(&SchmidtState::tau_pair()).unwrap();
        assert_eq!(c.terms().len(), 1);
        let t = &c.terms()[0];
        assert_eq!(t.probability, 1.0);
        let a = t.alice.block(BlockKey::Subsystem(Charge::Tau)).unwrap();
        assert!((a[(0, 0)].re - 1.0 / D_TAU).abs() < 1e-15);

        let c = closest_separable_candidate(&state(&[(Charge::Vacuum, &[0.5, 0.5])])).unwrap();
        assert_eq!(c.terms().len(), 2);
        assert!(c.terms().iter().all(|t| t.probability == 0.5));
        assert!((c.to_operator().unwrap().quantum_trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let s = SchmidtState::tau_pair();
        let rho = embed(&s).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-12);
        let sep = closest_separable_candidate(&s).unwrap().to_operator().unwrap();
        assert!((relative_entropy(&rho, &sep).unwrap() - 1.388_483_827_3).abs() < 1e-10);
        let om = omega_project(&s).unwrap();
        assert!((relative_entropy(&rho, &om).unwrap() - e_ace_pure(&s)).abs() < 1e-10);
    }

    #[test]
    fn separable_state_validation() {
        let shape = BipartiteShape::symmetric([1, 1]);
        let f = pure_factor(Charge::Tau, &DVector::from_element(1, Complex64::new(1.0, 0.0))).unwrap();
        let bad = SeparableState::new(
            shape,
            vec![SeparableTerm { probability: 0.7, alice: f.clone(), bob: f.clone() }],
        );
        assert!(bad.is_err());
        let wrong_dim = SeparableState::new(
            BipartiteShape::symmetric([1, 2]),
            vec![SeparableTerm { probability: 1.0, alice: f.clone(), bob: f }],
        );
        assert!(matches!(wrong_dim, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn gradient_along_own_direction_vanishes() {
        let s = state(&[(Charge::Tau, &[0.6, 0.4])]);
        let base = closest_separable_candidate(&s).unwrap();
        assert!(minimality_gradient(&s, &base).unwrap().abs() < 1e-6);
    }

    #[test]
    fn pythagorean_examples() {
        assert!(pythagorean_residual(&SchmidtState::tau_pair()).unwrap().abs() < 1e-8);
        assert!(pythagorean_residual(&state(&[(Charge::Vacuum, &[1.0])])).unwrap().abs() < 1e-12);
    }
}
