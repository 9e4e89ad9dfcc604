//! Charge-graded operators and their quantum trace.
//!
//! A [`GradedDensityOperator`] is a set of complex blocks, each carrying the
//! quantum-trace weight of its key:
//!
//! * [`BlockKey::Subsystem`]`(x)`: a one-party operator on sector `x`, weight `d_x`;
//! * [`BlockKey::Pair`]`(a, b)`: a two-party operator with no charge line
//!   between the parties, on the product space of sectors `a` (Alice) and `b`
//!   (Bob), weight `d_a d_b`;
//! * [`BlockKey::Channel`]`(c)`: a two-party operator in the fused basis where
//!   the parties' charges meet in total charge `c`, weight `d_c`.
//!
//! Product-form and channel-form blocks describe the same operator algebra:
//! a pair block `(a, b)` acts identically in every channel `c ∈ a × b`, so
//! [`GradedDensityOperator::to_channel_form`] copies it into each of those
//! channels. Channel form is the one in which every bipartite operator is
//! block diagonal, so spectral functions are evaluated there whenever a state
//! carries coherences between different sector pairs.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{fusion_multiplicity, vacuum_bend_coefficient, Charge};

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues below this are treated as zero in support checks.
pub const SUPPORT_EPS: f64 = 1e-12;
/// Floor applied before taking logarithms.
pub const LOG_CLAMP: f64 = 1e-300;
/// Weight of `ρ` allowed outside `supp(σ)` before a relative entropy is refused.
pub const SUPPORT_LEAK_TOL: f64 = 1e-10;
/// Tolerance for state checks (PSD and unit quantum trace).
pub const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockKey {
    Subsystem(Charge),
    Pair(Charge, Charge),
    Channel(Charge),
}

impl BlockKey {
    /// Quantum-trace weight of one unit of ordinary trace in this block.
    pub fn weight(self) -> f64 {
        match self {
            BlockKey::Subsystem(x) => x.dim(),
            BlockKey::Pair(a, b) => a.dim() * b.dim(),
            BlockKey::Channel(c) => c.dim(),
        }
    }
}

/// Sector dimensions of both parties: `alice[c.index()]` is Alice's
/// dimension in sector `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteShape {
    pub alice: [usize; 2],
    pub bob: [usize; 2],
}

/// One sector pair inside a channel block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelSlot {
    pub alice: Charge,
    pub bob: Charge,
    pub offset: usize,
    pub dim: usize,
}

impl BipartiteShape {
    pub fn symmetric(dims: [usize; 2]) -> Self {
        Self {
            alice: dims,
            bob: dims,
        }
    }

    pub fn pair_dim(&self, a: Charge, b: Charge) -> usize {
        self.alice[a.index()] * self.bob[b.index()]
    }

    /// Layout of the channel-`c` block: sector pairs `(a, b)` with
    /// `c ∈ a × b`, in canonical order, with Alice's index major inside each
    /// slot.
    pub fn channel_layout(&self, c: Charge) -> Vec<ChannelSlot> {
        let mut slots = Vec::new();
        let mut offset = 0;
        for a in Charge::ALL {
            for b in Charge::ALL {
                if fusion_multiplicity(a, b, c) == 0 {
                    continue;
                }
                let dim = self.pair_dim(a, b);
                if dim == 0 {
                    continue;
                }
                slots.push(ChannelSlot {
                    alice: a,
                    bob: b,
                    offset,
                    dim,
                });
                offset += dim;
            }
        }
        slots
    }

    pub fn channel_dim(&self, c: Charge) -> usize {
        self.channel_layout(c).iter().map(|s| s.dim).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedDensityOperator {
    blocks: BTreeMap<BlockKey, CMatrix>,
    shape: Option<BipartiteShape>,
}

impl GradedDensityOperator {
    /// An empty one-party operator.
    pub fn subsystem() -> Self {
        Self {
            blocks: BTreeMap::new(),
            shape: None,
        }
    }

    /// An empty two-party operator with the given sector dimensions.
    pub fn bipartite(shape: BipartiteShape) -> Self {
        Self {
            blocks: BTreeMap::new(),
            shape: Some(shape),
        }
    }

    pub fn shape(&self) -> Option<BipartiteShape> {
        self.shape
    }

    pub fn blocks(&self) -> impl Iterator<Item = (BlockKey, &CMatrix)> {
        self.blocks.iter().map(|(k, m)| (*k, m))
    }

    pub fn block(&self, key: BlockKey) -> Option<&CMatrix> {
        self.blocks.get(&key)
    }

    fn expected_dim(&self, key: BlockKey) -> Option<usize> {
        match (key, self.shape) {
            (BlockKey::Subsystem(_), None) => None,
            (BlockKey::Pair(a, b), Some(s)) => Some(s.pair_dim(a, b)),
            (BlockKey::Channel(c), Some(s)) => Some(s.channel_dim(c)),
            _ => Some(usize::MAX),
        }
    }

    /// Inserts (or replaces) a block.
    pub fn insert(&mut self, key: BlockKey, matrix: CMatrix) -> Result<()> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "block {key:?} is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        match self.expected_dim(key) {
            Some(usize::MAX) => {
                return Err(Error::BlockMismatch(format!(
                    "key {key:?} does not fit a {} operator",
                    if self.shape.is_some() { "bipartite" } else { "one-party" }
                )))
            }
            Some(d) if d != matrix.nrows() => {
                return Err(Error::DimensionMismatch(format!(
                    "block {key:?} has dimension {}, shape requires {d}",
                    matrix.nrows()
                )))
            }
            _ => {}
        }
        self.blocks.insert(key, matrix);
        Ok(())
    }

    /// Adds `scale * matrix` into a block, creating it if absent.
    pub fn accumulate(&mut self, key: BlockKey, matrix: &CMatrix, scale: f64) -> Result<()> {
        let scaled = matrix * Complex64::new(scale, 0.0);
        match self.blocks.get_mut(&key) {
            Some(existing) => {
                if existing.shape() != scaled.shape() {
                    return Err(Error::DimensionMismatch(format!(
                        "cannot add a {:?} block into {:?} at {key:?}",
                        scaled.shape(),
                        existing.shape()
                    )));
                }
                *existing += scaled;
                Ok(())
            }
            None => self.insert(key, scaled),
        }
    }

    /// Quantum trace: `Σ weight · tr(block)`.
    pub fn quantum_trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(k, m)| k.weight() * m.trace().re)
            .sum()
    }

    fn has_channel_blocks(&self) -> bool {
        self.blocks.keys().any(|k| matches!(k, BlockKey::Channel(_)))
    }

    /// Rewrites every two-party block in the fused (channel) basis.
    pub fn to_channel_form(&self) -> Result<Self> {
        let shape = self.shape.ok_or_else(|| {
            Error::BlockMismatch("channel form requires a bipartite operator".into())
        })?;
        let mut out = Self::bipartite(shape);
        for c in Charge::ALL {
            let layout = shape.channel_layout(c);
            let dim: usize = layout.iter().map(|s| s.dim).sum();
            if dim == 0 {
                continue;
            }
            let mut acc = CMatrix::zeros(dim, dim);
            let mut touched = false;
            if let Some(m) = self.blocks.get(&BlockKey::Channel(c)) {
                acc += m;
                touched = true;
            }
            for slot in &layout {
                if let Some(m) = self.blocks.get(&BlockKey::Pair(slot.alice, slot.bob)) {
                    let mut view = acc.view_mut((slot.offset, slot.offset), (slot.dim, slot.dim));
                    view += m;
                    touched = true;
                }
            }
            if touched {
                out.blocks.insert(BlockKey::Channel(c), acc);
            }
        }
        Ok(out)
    }

    /// The form in which the operator is block diagonal: channel form when
    /// any channel block is present, otherwise the operator itself.
    pub fn spectral_form(&self) -> Result<Self> {
        if self.has_channel_blocks() {
            self.to_channel_form()
        } else {
            Ok(self.clone())
        }
    }

    /// Blockwise eigen-decompositions of the spectral form.
    pub fn eigen_blocks(&self) -> Result<Vec<(BlockKey, HermitianEigen)>> {
        let form = self.spectral_form()?;
        Ok(form
            .blocks
            .iter()
            .map(|(k, m)| (*k, HermitianEigen::new(m)))
            .collect())
    }

    /// Checks Hermiticity, positivity and unit quantum trace.
    pub fn check_state(&self) -> Result<()> {
        for (k, m) in &self.blocks {
            let herm = (m - m.adjoint()).camax();
            if herm > STATE_TOL {
                return Err(Error::NotAState(format!(
                    "block {k:?} is not Hermitian (deviation {herm:e})"
                )));
            }
        }
        for (k, eig) in self.eigen_blocks()? {
            if let Some(min) = eig.values.iter().cloned().reduce(f64::min) {
                if min < -STATE_TOL {
                    return Err(Error::NotAState(format!(
                        "block {k:?} has negative eigenvalue {min:e}"
                    )));
                }
            }
        }
        let tr = self.quantum_trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::NotAState(format!("quantum trace is {tr}")));
        }
        Ok(())
    }

    /// `-Σ weight · tr(block log₂ block)` with `0 log 0 = 0`.
    pub fn entropy_unchecked(&self) -> Result<f64> {
        let mut s = 0.0;
        for (k, eig) in self.eigen_blocks()? {
            let w = k.weight();
            for &mu in eig.values.iter() {
                if mu > LOG_CLAMP {
                    s -= w * mu * mu.log2();
                }
            }
        }
        Ok(s)
    }

    /// `a·self + b·other`, brought to a common form first.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        let (lhs, rhs) = common_form(self, other)?;
        let mut out = Self {
            blocks: BTreeMap::new(),
            shape: lhs.shape,
        };
        for (k, m) in &lhs.blocks {
            out.accumulate(*k, m, a)?;
        }
        for (k, m) in &rhs.blocks {
            out.accumulate(*k, m, b)?;
        }
        Ok(out)
    }

    /// Largest entrywise deviation after bringing both to a common form.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let diff = self.combine(1.0, other, -1.0)?;
        Ok(diff
            .blocks
            .values()
            .map(|m| m.iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max))
    }

    /// `Tr̃(self · A ⊗ B)` for party-local operators given per sector.
    ///
    /// `alice[c.index()]` must be square of Alice's sector-`c` dimension;
    /// likewise for Bob.
    pub fn product_expectation(&self, alice: &[CMatrix; 2], bob: &[CMatrix; 2]) -> Result<f64> {
        let shape = self.shape.ok_or_else(|| {
            Error::BlockMismatch("product expectation needs a bipartite operator".into())
        })?;
        for c in Charge::ALL {
            let i = c.index();
            if alice[i].nrows() != shape.alice[i] || bob[i].nrows() != shape.bob[i] {
                return Err(Error::DimensionMismatch(format!(
                    "observable blocks in sector {c} do not match the operator shape"
                )));
            }
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (k, m) in &self.blocks {
            match *k {
                BlockKey::Pair(a, b) => {
                    let ab = alice[a.index()].kronecker(&bob[b.index()]);
                    total += (m * ab).trace() * k.weight();
                }
                BlockKey::Channel(c) => {
                    for slot in shape.channel_layout(c) {
                        let ab = alice[slot.alice.index()].kronecker(&bob[slot.bob.index()]);
                        let sub = m.view((slot.offset, slot.offset), (slot.dim, slot.dim));
                        total += (sub * ab).trace() * k.weight();
                    }
                }
                BlockKey::Subsystem(_) => unreachable!("bipartite operators hold no subsystem blocks"),
            }
        }
        Ok(total.re)
    }
}

fn common_form(
    x: &GradedDensityOperator,
    y: &GradedDensityOperator,
) -> Result<(GradedDensityOperator, GradedDensityOperator)> {
    if x.shape != y.shape {
        return Err(Error::BlockMismatch(format!(
            "operators have different shapes: {:?} vs {:?}",
            x.shape, y.shape
        )));
    }
    if x.shape.is_some() && (x.has_channel_blocks() || y.has_channel_blocks()) {
        Ok((x.to_channel_form()?, y.to_channel_form()?))
    } else {
        Ok((x.clone(), y.clone()))
    }
}

/// Eigen-decomposition of a Hermitian block (symmetrised before solving).
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        if m.nrows() == 0 {
            return Self {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            };
        }
        let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        Self {
            values: eig.eigenvalues.iter().cloned().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// `⟨v_k| m |v_k⟩` for every eigenvector.
    pub fn diagonal_of(&self, m: &CMatrix) -> Vec<f64> {
        let rotated = self.vectors.adjoint() * m * &self.vectors;
        (0..rotated.nrows()).map(|k| rotated[(k, k)].re).collect()
    }
}

/// Anyonic relative entropy `Tr̃(ρ log₂ ρ) − Tr̃(ρ log₂ σ)`.
///
/// Product-form operators with matching keys are handled blockwise; as soon
/// as either side carries channel blocks both are rewritten in channel form.
pub fn relative_entropy(rho: &GradedDensityOperator, sigma: &GradedDensityOperator) -> Result<f64> {
    if rho.shape.is_some() != sigma.shape.is_some() {
        return Err(Error::BlockMismatch(
            "cannot compare a one-party operator with a two-party operator".into(),
        ));
    }
    if rho.shape != sigma.shape {
        return Err(Error::BlockMismatch(format!(
            "operators have different shapes: {:?} vs {:?}",
            rho.shape, sigma.shape
        )));
    }
    let (r, s) = common_form(rho, sigma)?;
    let mut value = 0.0;
    let mut leak = 0.0;
    for (key, rb) in &r.blocks {
        let w = key.weight();
        let r_eig = HermitianEigen::new(rb);
        let self_term: f64 = r_eig
            .values
            .iter()
            .filter(|&&mu| mu > LOG_CLAMP)
            .map(|&mu| mu * mu.log2())
            .sum();
        let cross = match s.blocks.get(key) {
            Some(sb) => {
                if sb.shape() != rb.shape() {
                    return Err(Error::BlockMismatch(format!(
                        "block {key:?} has different dimensions"
                    )));
                }
                let s_eig = HermitianEigen::new(sb);
                let overlaps = s_eig.diagonal_of(rb);
                let mut cross = 0.0;
                for (&mu, &ov) in s_eig.values.iter().zip(&overlaps) {
                    if mu <= SUPPORT_EPS {
                        leak += w * ov.max(0.0);
                    } else {
                        cross += ov * mu.max(LOG_CLAMP).log2();
                    }
                }
                cross
            }
            None => {
                leak += w * rb.trace().re.max(0.0);
                0.0
            }
        };
        value += w * (self_term - cross);
    }
    if leak > SUPPORT_LEAK_TOL {
        return Err(Error::SupportViolation { weight: leak });
    }
    Ok(value)
}

/// The Ω map: keeps only the part of an operator with no charge line
/// between the parties.
///
/// Channel-`c` blocks contribute their diagonal sector-pair sub-blocks scaled
/// by `d_c / (d_a d_b)`; product-form blocks are already in the image and pass
/// through. Ω is therefore idempotent and preserves the quantum trace.
pub fn omega(op: &GradedDensityOperator) -> Result<GradedDensityOperator> {
    let shape = op
        .shape
        .ok_or_else(|| Error::BlockMismatch("Ω acts on bipartite operators".into()))?;
    let mut out = GradedDensityOperator::bipartite(shape);
    for (key, m) in &op.blocks {
        match *key {
            BlockKey::Pair(..) => out.accumulate(*key, m, 1.0)?,
            BlockKey::Channel(c) => {
                for slot in shape.channel_layout(c) {
                    let bend = vacuum_bend_coefficient(slot.alice, slot.bob, c);
                    let sub = m
                        .view((slot.offset, slot.offset), (slot.dim, slot.dim))
                        .into_owned();
                    out.accumulate(BlockKey::Pair(slot.alice, slot.bob), &sub, bend * bend)?;
                }
            }
            BlockKey::Subsystem(_) => unreachable!("bipartite operators hold no subsystem blocks"),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn weights_follow_keys() {
        let d = crate::model::D_TAU;
        assert_eq!(BlockKey::Subsystem(Charge::Vacuum).weight(), 1.0);
        assert!((BlockKey::Pair(Charge::Tau, Charge::Tau).weight() - d * d).abs() < 1e-15);
        assert!((BlockKey::Channel(Charge::Tau).weight() - d).abs() < 1e-15);
    }

    #[test]
    fn channel_layout_order() {
        let shape = BipartiteShape::symmetric([2, 3]);
        let vac = shape.channel_layout(Charge::Vacuum);
        assert_eq!(vac.len(), 2);
        assert_eq!((vac[0].dim, vac[1].offset, vac[1].dim), (4, 4, 9));
        let tau = shape.channel_layout(Charge::Tau);
        // (1,τ), (τ,1), (τ,τ)
        assert_eq!(tau.iter().map(|s| s.dim).collect::<Vec<_>>(), vec![6, 6, 9]);
    }

    #[test]
    fn pair_block_trace_survives_channel_form() {
        let d = crate::model::D_TAU;
        let shape = BipartiteShape::symmetric([0, 1]);
        let mut op = GradedDensityOperator::bipartite(shape);
        op.insert(
            BlockKey::Pair(Charge::Tau, Charge::Tau),
            CMatrix::from_element(1, 1, c(1.0 / (d * d))),
        )
        .unwrap();
        let ch = op.to_channel_form().unwrap();
        assert!((op.quantum_trace() - 1.0).abs() < 1e-14);
        assert!((ch.quantum_trace() - 1.0).abs() < 1e-14);
        assert!((op.entropy_unchecked().unwrap() - ch.entropy_unchecked().unwrap()).abs() < 1e-14);
    }

    #[test]
    fn subsystem_keys_rejected_on_bipartite() {
        let mut op = GradedDensityOperator::bipartite(BipartiteShape::symmetric([1, 1]));
        let err = op
            .insert(BlockKey::Subsystem(Charge::Tau), CMatrix::identity(1, 1))
            .unwrap_err();
        assert!(matches!(err, Error::BlockMismatch(_)));
        let err = op
            .insert(BlockKey::Pair(Charge::Tau, Charge::Tau), CMatrix::identity(2, 2))
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn relative_entropy_refuses_support_violation() {
        let mut rho = GradedDensityOperator::subsystem();
        rho.insert(BlockKey::Subsystem(Charge::Vacuum), CMatrix::identity(1, 1))
            .unwrap();
        let mut sigma = GradedDensityOperator::subsystem();
        sigma
            .insert(
                BlockKey::Subsystem(Charge::Tau),
                CMatrix::from_element(1, 1, c(1.0 / crate::model::D_TAU)),
            )
            .unwrap();
        assert!(matches!(
            relative_entropy(&rho, &sigma),
            Err(Error::SupportViolation { .. })
        ));
        assert!(matches!(
            relative_entropy(&rho, &GradedDensityOperator::bipartite(BipartiteShape::symmetric([1, 0]))),
            Err(Error::BlockMismatch(_))
        ));
    }
}
