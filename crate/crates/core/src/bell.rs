//! CHSH tests on pure anyonic states.
//!
//! Observables are party-local, block diagonal across charge sectors, and
//! have spectrum `{−1, +1}`. Each sector block is stored as a small matrix on
//! a chosen set of Schmidt indices plus a sign acting on the remaining
//! indices, so that observables on very large multi-copy sectors stay cheap.
//!
//! Expectations are `Σ_c ψ_c† (A_c ⊗ B_c) ψ_c` with `ψ_c` the paired
//! amplitudes `√λ_{c,i}`; the quantum-dimension factors are already part of
//! the Schmidt normalisation.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{closest_separable_candidate, omega_project, SeparableState};
use crate::model::Charge;
use crate::multicopy::{n_copy_with_limit, DEFAULT_MAX_COPIES};
use crate::operator::{CMatrix, GradedDensityOperator, HermitianEigen};
use crate::states::{SchmidtState, MAX_DENSE_DIM};

/// Tolerance on `A² = 1` and Hermiticity.
pub const INVOLUTION_TOL: f64 = 1e-9;
/// CHSH values above `2 + LOCAL_BOUND_TOL` count as violations.
pub const LOCAL_BOUND_TOL: f64 = 1e-9;
/// Smallest angular step of the coordinate-ascent refinement.
pub const REFINE_STEP: f64 = 1e-8;
/// Values closer than this are treated as ties.
const TIE_TOL: f64 = 1e-12;
/// Schmidt vectors per sector used by the general-observable search.
const SEARCH_SUBSPACE: u64 = 3;
const SEESAW_ITERS: usize = 200;

/// Tsirelson's bound `2√2`.
pub fn tsirelson_bound() -> f64 {
    2.0 * 2f64.sqrt()
}

/// One sector block: `matrix` on the Schmidt indices `active`, `rest · 1`
/// on every other index of the sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorObservable {
    dim: u64,
    active: Vec<u64>,
    matrix: CMatrix,
    rest: f64,
}

impl SectorObservable {
    pub fn new(dim: u64, active: Vec<u64>, matrix: CMatrix, rest: f64) -> Result<Self> {
        if matrix.nrows() != active.len() || matrix.ncols() != active.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} active indices but a {}x{} block",
                active.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if active.iter().any(|&i| i >= dim) {
            return Err(Error::DimensionMismatch(format!(
                "active index outside a sector of dimension {dim}"
            )));
        }
        let mut sorted = active.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != active.len() {
            return Err(Error::Domain("repeated active index".into()));
        }
        if rest != 1.0 && rest != -1.0 {
            return Err(Error::Domain(format!("rest sign must be ±1, got {rest}")));
        }
        let obs = Self {
            dim,
            active,
            matrix,
            rest,
        };
        obs.check_involution()?;
        Ok(obs)
    }

    pub fn identity(dim: u64) -> Self {
        Self {
            dim,
            active: Vec::new(),
            matrix: CMatrix::zeros(0, 0),
            rest: 1.0,
        }
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    fn check_involution(&self) -> Result<()> {
        let m = &self.matrix;
        let herm = (m - m.adjoint()).camax();
        let sq = (m * m - CMatrix::identity(m.nrows(), m.ncols())).camax();
        if herm > INVOLUTION_TOL || sq > INVOLUTION_TOL {
            return Err(Error::Domain(format!(
                "observable block is not a Hermitian involution (|A−A†| = {herm:e}, |A²−1| = {sq:e})"
            )));
        }
        Ok(())
    }

    /// Matrix element `⟨u|A|v⟩` for Schmidt indices `u`, `v`.
    fn element(&self, u: u64, v: u64) -> Complex64 {
        let pu = self.active.iter().position(|&x| x == u);
        let pv = self.active.iter().position(|&x| x == v);
        match (pu, pv) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            (None, None) if u == v => Complex64::new(self.rest, 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.dim > MAX_DENSE_DIM {
            return Err(Error::TooLarge {
                dim: self.dim,
                max: MAX_DENSE_DIM,
            });
        }
        let n = self.dim as usize;
        Ok(DMatrix::from_fn(n, n, |i, j| self.element(i as u64, j as u64)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    sectors: [SectorObservable; 2],
}

impl Observable {
    pub fn new(vacuum: SectorObservable, tau: SectorObservable) -> Self {
        Self {
            sectors: [vacuum, tau],
        }
    }

    /// A fully dense observable; `blocks[c.index()]` is the sector-`c` block.
    pub fn dense(blocks: [CMatrix; 2]) -> Result<Self> {
        let [v, t] = blocks;
        let make = |m: CMatrix| {
            let n = m.nrows() as u64;
            SectorObservable::new(n, (0..n).collect(), m, 1.0)
        };
        Ok(Self::new(make(v)?, make(t)?))
    }

    pub fn identity(dims: [u64; 2]) -> Self {
        Self::new(
            SectorObservable::identity(dims[0]),
            SectorObservable::identity(dims[1]),
        )
    }

    pub fn sector(&self, c: Charge) -> &SectorObservable {
        &self.sectors[c.index()]
    }

    pub fn dims(&self) -> [u64; 2] {
        [self.sectors[0].dim, self.sectors[1].dim]
    }

    pub fn to_dense(&self) -> Result<[CMatrix; 2]> {
        Ok([self.sectors[0].to_dense()?, self.sectors[1].to_dense()?])
    }
}

fn state_dims(state: &SchmidtState) -> [u64; 2] {
    [state.rank(Charge::Vacuum), state.rank(Charge::Tau)]
}

/// `⟨A ⊗ B⟩` on a pure state.
pub fn expectation(state: &SchmidtState, a: &Observable, b: &Observable) -> Result<f64> {
    let dims = state_dims(state);
    if a.dims() != dims || b.dims() != dims {
        return Err(Error::DimensionMismatch(format!(
            "observable sector dimensions {:?} / {:?} do not match state ranks {dims:?}",
            a.dims(),
            b.dims()
        )));
    }
    let mut total = 0.0;
    for c in state.occupied() {
        let (sa, sb) = (a.sector(c), b.sector(c));
        let mut support: Vec<u64> = sa.active.iter().chain(&sb.active).copied().collect();
        support.sort_unstable();
        support.dedup();
        let amps: Vec<f64> = support
            .iter()
            .map(|&u| state.coefficient_at(c, u).unwrap_or(0.0))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (iu, &u) in support.iter().enumerate() {
            for (iv, &v) in support.iter().enumerate() {
                let w = (amps[iu] * amps[iv]).sqrt();
                if w != 0.0 {
                    acc += sa.element(u, v) * sb.element(u, v) * w;
                }
            }
        }
        let covered: f64 = amps.iter().sum();
        let rest = (state.sector_weight(c) - covered).max(0.0);
        total += acc.re + sa.rest * sb.rest * rest;
    }
    Ok(total)
}

/// `⟨A₁B₁⟩ + ⟨A₁B₂⟩ + ⟨A₂B₁⟩ − ⟨A₂B₂⟩`.
pub fn chsh_value(state: &SchmidtState, observables: &[Observable; 4]) -> Result<f64> {
    let [a1, a2, b1, b2] = observables;
    Ok(expectation(state, a1, b1)? + expectation(state, a1, b2)? + expectation(state, a2, b1)?
        - expectation(state, a2, b2)?)
}

/// `Tr̃(ρ · A ⊗ B)` for any bipartite graded operator.
pub fn operator_expectation(op: &GradedDensityOperator, a: &Observable, b: &Observable) -> Result<f64> {
    op.product_expectation(&a.to_dense()?, &b.to_dense()?)
}

pub fn operator_chsh_value(op: &GradedDensityOperator, observables: &[Observable; 4]) -> Result<f64> {
    let [a1, a2, b1, b2] = observables;
    Ok(operator_expectation(op, a1, b1)? + operator_expectation(op, a1, b2)?
        + operator_expectation(op, a2, b1)?
        - operator_expectation(op, a2, b2)?)
}

/// Two Schmidt indices of one sector spanning the rotation plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneTarget {
    pub sector: Charge,
    pub first: u64,
    pub second: u64,
}

impl PlaneTarget {
    /// The plane of the two largest coefficients of `sector`.
    pub fn leading(sector: Charge) -> Self {
        Self {
            sector,
            first: 0,
            second: 1,
        }
    }
}

/// `[[cos θ, sin θ], [sin θ, −cos θ]]` on the target plane, `+1` elsewhere.
pub fn rotation_observable(dims: [u64; 2], angle: f64, target: PlaneTarget) -> Result<Observable> {
    let rank = dims[target.sector.index()];
    if rank < 2 || target.first >= rank || target.second >= rank || target.first == target.second {
        return Err(Error::TargetRank {
            sector: target.sector,
            rank,
            required: 2,
        });
    }
    let (s, c) = angle.sin_cos();
    let block = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-c, 0.0),
        ],
    );
    let mut sectors = [
        SectorObservable::identity(dims[0]),
        SectorObservable::identity(dims[1]),
    ];
    sectors[target.sector.index()] = SectorObservable {
        dim: rank,
        active: vec![target.first, target.second],
        matrix: block,
        rest: 1.0,
    };
    let [v, t] = sectors;
    Ok(Observable::new(v, t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    LocalBoundRespected,
    Violation,
}

impl Verdict {
    pub fn from_value(value: f64) -> Self {
        if value > 2.0 + LOCAL_BOUND_TOL {
            Verdict::Violation
        } else {
            Verdict::LocalBoundRespected
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChshResult {
    pub value: f64,
    pub observables: [Observable; 4],
    /// `(α₁, α₂, β₁, β₂)` in `(−π, π]` when the rotation family won.
    pub angles: Option<[f64; 4]>,
    pub plane: Option<PlaneTarget>,
    pub copies: u32,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChshBudget {
    pub grid: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_copies: u32,
}

impl Default for ChshBudget {
    fn default() -> Self {
        Self {
            grid: 64,
            restarts: 32,
            seed: 42,
            max_copies: DEFAULT_MAX_COPIES,
        }
    }
}

fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

struct Candidate {
    value: f64,
    observables: [Observable; 4],
    angles: Option<[f64; 4]>,
    plane: Option<PlaneTarget>,
}

/// Grid search over the four-angle rotation family on one plane, then
/// coordinate ascent down to [`REFINE_STEP`].
fn optimize_rotation_family(state: &SchmidtState, plane: PlaneTarget, grid: usize) -> Result<Candidate> {
    let dims = state_dims(state);
    let grid = grid.max(4);
    let thetas: Vec<f64> = (0..grid).map(|k| TAU * k as f64 / grid as f64).collect();
    let obs: Vec<Observable> = thetas
        .iter()
        .map(|&t| rotation_observable(dims, t, plane))
        .collect::<Result<_>>()?;
    let table: Vec<Vec<f64>> = obs
        .par_iter()
        .map(|a| obs.iter().map(|b| expectation(state, a, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    // for fixed (i1, i2) the value splits into a j1 part and a j2 part
    let argmax = |f: &dyn Fn(usize) -> f64| {
        let mut best = (f64::NEG_INFINITY, 0);
        for j in 0..grid {
            let v = f(j);
            if v > best.0 + TIE_TOL {
                best = (v, j);
            }
        }
        best
    };
    let best_in_row = |i1: usize| {
        let mut best = (f64::NEG_INFINITY, [i1, 0, 0, 0]);
        for i2 in 0..grid {
            let (v1, j1) = argmax(&|j| table[i1][j] + table[i2][j]);
            let (v2, j2) = argmax(&|j| table[i1][j] - table[i2][j]);
            if v1 + v2 > best.0 + TIE_TOL {
                best = (v1 + v2, [i1, i2, j1, j2]);
            }
        }
        best
    };
    let rows: Vec<(f64, [usize; 4])> = (0..grid).into_par_iter().map(best_in_row).collect();
    let mut best = rows[0];
    for r in &rows[1..] {
        if r.0 > best.0 + TIE_TOL {
            best = *r;
        }
    }

    let eval = |angles: &[f64; 4]| -> Result<f64> {
        let o = angles
            .iter()
            .map(|&t| rotation_observable(dims, t, plane))
            .collect::<Result<Vec<_>>>()?;
        chsh_value(state, &[o[0].clone(), o[1].clone(), o[2].clone(), o[3].clone()])
    };

    let mut angles = best.1.map(|k| thetas[k]);
    let mut value = eval(&angles)?;
    let mut step = TAU / grid as f64;
    while step >= REFINE_STEP {
        let mut moved = false;
        for k in 0..4 {
            for dir in [1.0, -1.0] {
                let mut trial = angles;
                trial[k] += dir * step;
                let v = eval(&trial)?;
                if v > value + 1e-15 {
                    angles = trial;
                    value = v;
                    moved = true;
                }
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    let angles = angles.map(wrap_angle);
    let o: Vec<Observable> = angles
        .iter()
        .map(|&t| rotation_observable(dims, t, plane))
        .collect::<Result<_>>()?;
    Ok(Candidate {
        value: eval(&angles)?,
        observables: [o[0].clone(), o[1].clone(), o[2].clone(), o[3].clone()],
        angles: Some(angles),
        plane: Some(plane),
    })
}

/// Involution closest to `sign(m)`: eigenvalues ≥ 0 map to `+1`.
fn hermitian_sign(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 {
        return m.clone();
    }
    let eig = HermitianEigen::new(m);
    let signs = DVector::from_iterator(
        eig.values.len(),
        eig.values
            .iter()
            .map(|&v| Complex64::new(if v >= 0.0 { 1.0 } else { -1.0 }, 0.0)),
    );
    &eig.vectors * DMatrix::from_diagonal(&signs) * eig.vectors.adjoint()
}

/// Random Hermitian involution `U diag(±1) U†` with `U` the Cayley transform
/// of a random Hermitian matrix.
pub fn random_involution<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    if dim == 0 {
        return CMatrix::zeros(0, 0);
    }
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in (i + 1)..dim {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let id = CMatrix::identity(dim, dim);
    let i_h = &h * Complex64::new(0.0, 1.0);
    let inv = (&id + &i_h).try_inverse().expect("I + iH is invertible for Hermitian H");
    let u = (&id - &i_h) * inv;
    let signs = DVector::from_iterator(
        dim,
        (0..dim).map(|_| Complex64::new(if rng.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0)),
    );
    let m = &u * DMatrix::from_diagonal(&signs) * u.adjoint();
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Observables restricted to the leading Schmidt vectors of every sector,
/// with a free sign on the remaining indices.
#[derive(Clone)]
struct Truncated {
    blocks: [CMatrix; 2],
    rests: [f64; 2],
}

struct Subspace {
    dims: [u64; 2],
    active: [Vec<u64>; 2],
    /// `√λ` on the active indices.
    amps: [Vec<f64>; 2],
    /// Weight of the inactive indices.
    rest_weight: [f64; 2],
}

impl Subspace {
    fn new(state: &SchmidtState) -> Self {
        let dims = state_dims(state);
        let active = Charge::ALL.map(|c| (0..dims[c.index()].min(SEARCH_SUBSPACE)).collect::<Vec<_>>());
        let amps = Charge::ALL.map(|c| {
            active[c.index()]
                .iter()
                .map(|&i| state.coefficient_at(c, i).unwrap_or(0.0).sqrt())
                .collect::<Vec<_>>()
        });
        let rest_weight = Charge::ALL.map(|c| {
            let covered: f64 = amps[c.index()].iter().map(|a| a * a).sum();
            (state.sector_weight(c) - covered).max(0.0)
        });
        Self {
            dims,
            active,
            amps,
            rest_weight,
        }
    }

    fn has_rest(&self, c: usize) -> bool {
        self.dims[c] > self.active[c].len() as u64
    }

    fn to_observable(&self, t: &Truncated) -> Result<Observable> {
        let make = |c: usize| {
            SectorObservable::new(self.dims[c], self.active[c].clone(), t.blocks[c].clone(), t.rests[c])
        };
        Ok(Observable::new(make(0)?, make(1)?))
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> Truncated {
        Truncated {
            blocks: [0, 1].map(|c| random_involution(rng, self.active[c].len())),
            rests: [1.0, 1.0],
        }
    }

    /// Best involution against the operator `Σ_k coef_k · other_k` on the
    /// other party: maximises `Σ_uv s_u s_v X_uv Y_uv` over `Y`.
    fn best_response(&self, first: &Truncated, second: &Truncated, sign: f64) -> Truncated {
        let mut out = first.clone();
        for c in 0..2 {
            let n = self.active[c].len();
            let combo = &first.blocks[c] + &second.blocks[c] * Complex64::new(sign, 0.0);
            let x = DMatrix::from_fn(n, n, |u, v| combo[(u, v)] * self.amps[c][u] * self.amps[c][v]);
            // maximise Re tr(Xᵀ Y): Y = sign(conj X)
            out.blocks[c] = hermitian_sign(&x.map(|z| z.conj()));
            let r = self.rest_weight[c] * (first.rests[c] + sign * second.rests[c]);
            out.rests[c] = if !self.has_rest(c) || r >= 0.0 { 1.0 } else { -1.0 };
        }
        out
    }

    fn chsh(&self, state: &SchmidtState, obs: &[Truncated; 4]) -> Result<f64> {
        let o = obs
            .iter()
            .map(|t| self.to_observable(t))
            .collect::<Result<Vec<_>>>()?;
        chsh_value(state, &[o[0].clone(), o[1].clone(), o[2].clone(), o[3].clone()])
    }
}

fn seesaw(state: &SchmidtState, sub: &Subspace, seed: u64) -> Result<Candidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a1 = sub.random(&mut rng);
    let mut a2 = sub.random(&mut rng);
    let mut b1 = sub.best_response(&a1, &a2, 1.0);
    let mut b2 = sub.best_response(&a1, &a2, -1.0);
    let mut value = sub.chsh(state, &[a1.clone(), a2.clone(), b1.clone(), b2.clone()])?;
    for _ in 0..SEESAW_ITERS {
        a1 = sub.best_response(&b1, &b2, 1.0);
        a2 = sub.best_response(&b1, &b2, -1.0);
        b1 = sub.best_response(&a1, &a2, 1.0);
        b2 = sub.best_response(&a1, &a2, -1.0);
        let v = sub.chsh(state, &[a1.clone(), a2.clone(), b1.clone(), b2.clone()])?;
        let gained = v - value;
        value = v;
        if gained < 1e-13 {
            break;
        }
    }
    let obs = [a1, a2, b1, b2]
        .iter()
        .map(|t| sub.to_observable(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Candidate {
        value,
        observables: [obs[0].clone(), obs[1].clone(), obs[2].clone(), obs[3].clone()],
        angles: None,
        plane: None,
    })
}

/// Maximises the CHSH value of a given (already joint) state.
pub fn optimize_chsh_state(state: &SchmidtState, budget: &ChshBudget) -> Result<ChshResult> {
    let dims = state_dims(state);
    let identity = Observable::identity(dims);
    let mut best = Candidate {
        value: chsh_value(
            state,
            &[identity.clone(), identity.clone(), identity.clone(), identity.clone()],
        )?,
        observables: [identity.clone(), identity.clone(), identity.clone(), identity],
        angles: None,
        plane: None,
    };
    for c in Charge::ALL {
        if dims[c.index()] >= 2 {
            let cand = optimize_rotation_family(state, PlaneTarget::leading(c), budget.grid)?;
            if cand.value > best.value + TIE_TOL {
                best = cand;
            }
        }
    }
    let sub = Subspace::new(state);
    let restarts: Vec<Candidate> = (0..budget.restarts)
        .into_par_iter()
        .map(|k| seesaw(state, &sub, budget.seed.wrapping_add(k as u64)))
        .collect::<Result<_>>()?;
    for cand in restarts {
        if cand.value > best.value + TIE_TOL {
            best = cand;
        }
    }
    Ok(ChshResult {
        value: best.value,
        verdict: Verdict::from_value(best.value),
        observables: best.observables,
        angles: best.angles,
        plane: best.plane,
        copies: 1,
    })
}

/// Maximises the CHSH value of the joint `copies`-copy of `state`.
pub fn optimize_chsh(state: &SchmidtState, copies: u32, budget: &ChshBudget) -> Result<ChshResult> {
    let joint = n_copy_with_limit(state, copies, budget.max_copies)?;
    let mut result = optimize_chsh_state(&joint, budget)?;
    result.copies = copies;
    Ok(result)
}

/// CHSH value reached by rotating in the plane of two same-sector
/// coefficients `l1`, `l2`, with `rest` the weight of all other coefficients:
/// `2p√(1 + 4 l1 l2 / p²) + 2(1 − p)`, `p = l1 + l2`.
///
/// Returns the value and the angles `(0, π/2, θ, −θ)` that attain it, where
/// `tan θ = 2√(l1 l2) / p`.
pub fn type_c_bound(l1: f64, l2: f64, rest: f64) -> Result<(f64, [f64; 4])> {
    if !(l1 > 0.0 && l2 > 0.0) || rest < -1e-9 {
        return Err(Error::Domain(format!(
            "need l1, l2 > 0 and rest ≥ 0 (got {l1}, {l2}, {rest})"
        )));
    }
    if (l1 + l2 + rest - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "l1 + l2 + rest must equal 1 (got {})",
            l1 + l2 + rest
        )));
    }
    let p = l1 + l2;
    let s = 2.0 * (l1 * l2).sqrt();
    let value = 2.0 * p * (1.0 + s * s / (p * p)).sqrt() + 2.0 * (1.0 - p);
    let theta = s.atan2(p);
    Ok((value, [0.0, PI / 2.0, theta, -theta]))
}

/// Why no certificate was issued.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RefusalReason {
    #[serde(rename = "CE_POSITIVE")]
    CePositive,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LocalityCertificate {
    /// `Ω(ψ)` written as an explicit separable mixture.
    Separable {
        decomposition: SeparableState,
        residual: f64,
    },
    Refused(RefusalReason),
}

/// Reconstruction tolerance for certificates.
pub const CERTIFICATE_TOL: f64 = 1e-12;

/// Separable decomposition of `Ω(ψ)` when every sector has Schmidt rank ≤ 1.
pub fn locality_certificate(state: &SchmidtState) -> Result<LocalityCertificate> {
    if Charge::ALL.iter().any(|&c| state.rank(c) > 1) {
        return Ok(LocalityCertificate::Refused(RefusalReason::CePositive));
    }
    let decomposition = closest_separable_candidate(state)?;
    let omega = omega_project(state)?;
    let residual = omega.max_abs_diff(&decomposition.to_operator()?)?;
    if residual >= CERTIFICATE_TOL {
        return Err(Error::Domain(format!(
            "separable reconstruction residual {residual:e} exceeds {CERTIFICATE_TOL:e}"
        )));
    }
    Ok(LocalityCertificate::Separable {
        decomposition,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::D_TAU;
    use crate::multicopy::n_copy;

    fn three_copy() -> SchmidtState {
        n_copy(&SchmidtState::tau_pair(), 3).unwrap()
    }

    fn rot(state: &SchmidtState, angle: f64) -> Observable {
        rotation_observable(
            [state.rank(Charge::Vacuum), state.rank(Charge::Tau)],
            angle,
            PlaneTarget::leading(Charge::Tau),
        )
        .unwrap()
    }

    #[test]
    fn three_copy_expectations() {
        let s = three_copy();
        assert!((expectation(&s, &rot(&s, 0.0), &rot(&s, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        let v = expectation(&s, &rot(&s, 0.0), &rot(&s, PI)).unwrap();
        assert!((v - (D_TAU.powi(-3) - 2.0 / (D_TAU * D_TAU))).abs() < 1e-12);
        assert!((v + 0.527_864_045_0).abs() < 1e-9);
        let id = Observable::identity([1, 2]);
        assert!((expectation(&s, &id, &id).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let s = three_copy();
        let wrong = Observable::identity([1, 3]);
        assert!(matches!(
            expectation(&s, &wrong, &wrong),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn superactivation_angles() {
        let s = three_copy();
        let obs = [0.0, PI / 2.0, PI / 4.0, -PI / 4.0].map(|t| rot(&s, t));
        let v = chsh_value(&s, &obs).unwrap();
        let expected = (4.0 * 2f64.sqrt() * D_TAU + 2.0) / D_TAU.powi(3);
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 2.632_862_0).abs() < 1e-6);
    }

    #[test]
    fn product_state_stays_local() {
        let s = SchmidtState::new([(Charge::Vacuum, [1.0])]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let obs: Vec<Observable> = (0..4)
                .map(|_| Observable::dense([random_involution(&mut rng, 1), CMatrix::zeros(0, 0)]).unwrap())
                .collect();
            let v = chsh_value(&s, &[obs[0].clone(), obs[1].clone(), obs[2].clone(), obs[3].clone()]).unwrap();
            assert!((-2.0 - 1e-12..=2.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn bell_pair_reaches_tsirelson_with_standard_angles() {
        let s = SchmidtState::new([(Charge::Vacuum, [0.5, 0.5])]).unwrap();
        let plane = PlaneTarget::leading(Charge::Vacuum);
        let obs = [0.0, PI / 2.0, PI / 4.0, -PI / 4.0]
            .map(|t| rotation_observable([2, 0], t, plane).unwrap());
        assert!((chsh_value(&s, &obs).unwrap() - tsirelson_bound()).abs() < 1e-12);
    }

    #[test]
    fn rotation_observable_shapes() {
        let a = rotation_observable([1, 2], 0.0, PlaneTarget::leading(Charge::Tau)).unwrap();
        let [v, t] = a.to_dense().unwrap();
        assert_eq!(v[(0, 0)].re, 1.0);
        assert_eq!(t[(0, 0)].re, 1.0);
        assert_eq!(t[(1, 1)].re, -1.0);
        let b = rotation_observable([1, 2], PI / 2.0, PlaneTarget::leading(Charge::Tau)).unwrap();
        let t = &b.to_dense().unwrap()[1];
        assert!(t[(0, 0)].re.abs() < 1e-15 && (t[(0, 1)].re - 1.0).abs() < 1e-15);
        for theta in [0.3, 1.7, -2.2] {
            let t = &rotation_observable([0, 3], theta, PlaneTarget::leading(Charge::Tau))
                .unwrap()
                .to_dense()
                .unwrap()[1];
            assert!((t * t - CMatrix::identity(3, 3)).camax() < 1e-12);
        }
        assert!(matches!(
            rotation_observable([2, 1], 0.0, PlaneTarget::leading(Charge::Tau)),
            Err(Error::TargetRank { rank: 1, .. })
        ));
    }

    #[test]
    fn type_c_bound_examples() {
        let (v, angles) = type_c_bound(0.5, 0.5, 0.0).unwrap();
        assert!((v - 2.828_427_124_7).abs() < 1e-10);
        assert!((angles[2] - PI / 4.0).abs() < 1e-15);
        let (v, _) = type_c_bound(0.3, 0.3, 0.4).unwrap();
        assert!((v - (1.2 * 2f64.sqrt() + 0.8)).abs() < 1e-12);
        assert!((v - 2.497_056_274_8).abs() < 1e-10);
        let (v, _) = type_c_bound(1e-14, 1e-14, 1.0 - 2e-14).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!(type_c_bound(0.0, 0.5, 0.5).is_err());
        assert!(type_c_bound(0.3, 0.3, 0.3).is_err());
    }

    #[test]
    fn type_c_angles_attain_the_bound() {
        let s = SchmidtState::new([(Charge::Vacuum, vec![0.45, 0.15]), (Charge::Tau, vec![0.4])]).unwrap();
        let (v, angles) = type_c_bound(0.45, 0.15, 0.4).unwrap();
        let obs = angles.map(|t| rotation_observable([2, 1], t, PlaneTarget::leading(Charge::Vacuum)).unwrap());
        assert!((chsh_value(&s, &obs).unwrap() - v).abs() < 1e-12);
    }

    #[test]
    fn sign_of_hermitian_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_involution(&mut rng, 3) * Complex64::new(0.3, 0.0) + CMatrix::identity(3, 3) * Complex64::new(0.1, 0.0);
        let s = hermitian_sign(&m);
        assert!((&s * &s - CMatrix::identity(3, 3)).camax() < 1e-12);
    }

    #[test]
    fn wrap_angles() {
        assert!((wrap_angle(7.0 * PI / 4.0) + PI / 4.0).abs() < 1e-15);
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
    }

    #[test]
    fn certificate_examples() {
        let tau = SchmidtState::tau_pair();
        match locality_certificate(&tau).unwrap() {
            LocalityCertificate::Separable { decomposition, residual } => {
                assert_eq!(decomposition.terms().len(), 1);
                assert!(residual < CERTIFICATE_TOL);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            locality_certificate(&three_copy()).unwrap(),
            LocalityCertificate::Refused(RefusalReason::CePositive)
        );
    }
}
