//! Reference implementations used only by the tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use anyonic::{BlockKey, CMatrix, Charge, GradedDensityOperator, SchmidtState};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub const PHI: f64 = 1.618_033_988_749_894_8;

/// Counts fusion trees of `n` τ anyons with total charge `c` by walking every
/// sequence of intermediate charges.
pub fn brute_force_paths(n: u32, c: Charge) -> u64 {
    fn walk(left: u32, current: Option<Charge>, target: Charge) -> u64 {
        if left == 0 {
            return u64::from(current.unwrap_or(Charge::Vacuum) == target);
        }
        let next: Vec<Charge> = match current {
            None | Some(Charge::Vacuum) => vec![Charge::Tau],
            Some(Charge::Tau) => vec![Charge::Vacuum, Charge::Tau],
        };
        next.into_iter().map(|x| walk(left - 1, Some(x), target)).sum()
    }
    walk(n, None, c)
}

/// Number of fusion paths of an explicit charge sequence to total `c`.
fn paths_of(charges: &[Charge], c: Charge) -> u64 {
    let mut counts = BTreeMap::from([(Charge::Vacuum, 1u64)]);
    for &a in charges {
        let mut next = BTreeMap::new();
        for (&prev, &k) in &counts {
            let outs: Vec<Charge> = match (prev, a) {
                (Charge::Vacuum, x) | (x, Charge::Vacuum) => vec![x],
                (Charge::Tau, Charge::Tau) => vec![Charge::Vacuum, Charge::Tau],
            };
            for o in outs {
                *next.entry(o).or_insert(0) += k;
            }
        }
        counts = next;
    }
    counts.get(&c).copied().unwrap_or(0)
}

/// Expanded `n`-copy coefficients per sector, sorted descending, built by
/// enumerating every tuple of single-copy Schmidt vectors.
pub fn brute_force_n_copy(state: &SchmidtState, n: u32) -> [Vec<f64>; 2] {
    let items: Vec<(Charge, f64)> = Charge::ALL
        .iter()
        .flat_map(|&c| state.coefficients(c).unwrap().into_iter().map(move |x| (c, x)))
        .collect();
    let mut out: [Vec<f64>; 2] = Default::default();
    let total = items.len().pow(n);
    for mut code in 0..total {
        let mut charges = Vec::new();
        let mut lambda = 1.0;
        let mut d_a = 1.0;
        for _ in 0..n {
            let (c, x) = items[code % items.len()];
            code /= items.len();
            charges.push(c);
            lambda *= x;
            d_a *= c.dim();
        }
        for c in Charge::ALL {
            for _ in 0..paths_of(&charges, c) {
                out[c.index()].push(lambda * c.dim() / d_a);
            }
        }
    }
    for v in &mut out {
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    }
    out
}

fn h(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().filter(|&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

/// `(aree, ace, ce)` from expanded coefficient lists.
pub fn closed_forms(coeffs: &[Vec<f64>; 2]) -> (f64, f64, f64) {
    let p = [0, 1].map(|c| coeffs[c].iter().sum::<f64>());
    let l = PHI.log2();
    let aree = h(coeffs.iter().flatten().copied()) + 2.0 * p[1] * l;
    let ace = h(p) + 2.0 * p[1] * l;
    let ce: f64 = (0..2)
        .filter(|&c| p[c] > 0.0)
        .map(|c| p[c] * h(coeffs[c].iter().map(|x| x / p[c])))
        .sum();
    (aree, ace, ce)
}

pub fn expanded(state: &SchmidtState) -> [Vec<f64>; 2] {
    Charge::ALL.map(|c| state.coefficients(c).unwrap())
}

/// Hermitian eigen-decomposition `(values, vectors)`.
fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let e = sym.symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

fn channel_blocks(op: &GradedDensityOperator) -> BTreeMap<BlockKey, CMatrix> {
    op.to_channel_form().unwrap().blocks().map(|(k, m)| (k, m.clone())).collect()
}

/// `d/dx S̃(ρ ‖ (1−x)σ₀ + xσ′)` at `x = 0` from the Fréchet derivative of
/// the matrix logarithm, in bits. `ρ` must lie in the support of `σ₀`.
pub fn analytic_gradient(
    rho: &GradedDensityOperator,
    base: &GradedDensityOperator,
    direction: &GradedDensityOperator,
) -> f64 {
    let r = channel_blocks(rho);
    let s0 = channel_blocks(base);
    let s1 = channel_blocks(direction);
    let mut total = 0.0;
    for (key, rb) in &r {
        let w = key.weight();
        let sb = &s0[key];
        let delta = match s1.get(key) {
            Some(d) => d - sb,
            None => -sb,
        };
        let (mu, u) = eigh(sb);
        let dt = u.adjoint() * &delta * &u;
        let rt = u.adjoint() * rb * &u;
        let support: Vec<usize> = (0..mu.len()).filter(|&k| mu[k] > 1e-12).collect();
        let mut acc = 0.0;
        for &k in &support {
            for &l in &support {
                let f = if (mu[k] - mu[l]).abs() < 1e-14 {
                    1.0 / mu[k]
                } else {
                    (mu[k].ln() - mu[l].ln()) / (mu[k] - mu[l])
                };
                acc += (rt[(l, k)] * dt[(k, l)]).re * f;
            }
        }
        total -= w * acc;
    }
    total / std::f64::consts::LN_2
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn zeros(n: usize) -> CMatrix {
    DMatrix::zeros(n, n)
}
