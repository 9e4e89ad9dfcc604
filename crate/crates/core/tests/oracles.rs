mod common;

use anyonic::measures::{bipartite_shape, minimality_gradient};
use anyonic::model::{fusion_space_dim, tau_paths, total_quantum_dimension_squared};
use anyonic::multicopy::{e_aree_ncopy, ncopy_sector_weights};
use anyonic::random::{random_entangled_state, random_separable, random_state};
use anyonic::{closest_separable_candidate, embed, n_copy, Charge, QSqrt5, SchmidtState};
use common::{analytic_gradient, brute_force_n_copy, brute_force_paths, closed_forms, expanded, PHI};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn fusion_dimensions_match_path_enumeration() {
    for n in 1..=12 {
        for c in Charge::ALL {
            assert_eq!(fusion_space_dim(n, c).unwrap(), brute_force_paths(n, c), "n={n} c={c}");
            assert_eq!(tau_paths(n, c), brute_force_paths(n, c));
        }
    }
}

#[test]
fn weighted_dimensions_sum_to_golden_powers() {
    let phi = QSqrt5::golden();
    for n in 1..=20 {
        let v = QSqrt5::integer(fusion_space_dim(n, Charge::Vacuum).unwrap() as i64);
        let t = QSqrt5::integer(fusion_space_dim(n, Charge::Tau).unwrap() as i64);
        assert_eq!(&v + &(&t * &phi), phi.pow(n));
    }
    assert_eq!(&phi * &phi, &phi + &QSqrt5::integer(1));
    assert_eq!(total_quantum_dimension_squared(), QSqrt5::from_integers(5, 1));
}

#[test]
fn n_copy_matches_explicit_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut states = vec![
        SchmidtState::tau_pair(),
        SchmidtState::new([(Charge::Vacuum, vec![0.5]), (Charge::Tau, vec![0.3, 0.2])]).unwrap(),
    ];
    states.extend((0..6).map(|_| random_state(&mut rng)));
    for s in &states {
        for n in 1..=4 {
            let joint = n_copy(s, n).unwrap();
            let want = brute_force_n_copy(s, n);
            let got = expanded(&joint);
            for c in 0..2 {
                assert_eq!(got[c].len(), want[c].len(), "rank mismatch n={n}");
                for (a, b) in got[c].iter().zip(&want[c]) {
                    assert!((a - b).abs() < 1e-14, "n={n}: {a} vs {b}");
                }
            }
            let p = ncopy_sector_weights(s, n).unwrap();
            for c in 0..2 {
                assert!((p[c] - want[c].iter().sum::<f64>()).abs() < 1e-12);
            }
            let (aree, _, _) = closed_forms(&want);
            assert!((e_aree_ncopy(s, n).unwrap() - aree).abs() < 1e-10);
        }
    }
}

#[test]
fn tau_pair_ncopy_closed_forms() {
    let l = PHI.log2();
    let s = SchmidtState::tau_pair();
    assert!((e_aree_ncopy(&s, 2).unwrap() - (2.0 + 1.0 / PHI) * l).abs() < 1e-12);
    assert!((e_aree_ncopy(&s, 3).unwrap() - (3.0 + 2.0 / (PHI * PHI)) * l).abs() < 1e-12);
}

#[test]
fn gradient_matches_frechet_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let s = random_entangled_state(&mut rng);
        let rho = embed(&s).unwrap();
        let base = closest_separable_candidate(&s).unwrap().to_operator().unwrap();
        for terms in [1, 2] {
            let dir = random_separable(&mut rng, bipartite_shape(&s).unwrap(), terms).unwrap();
            let numeric = minimality_gradient(&s, &dir).unwrap();
            let exact = analytic_gradient(&rho, &base, &dir.to_operator().unwrap());
            // directions that add support contribute an x² log x term, which
            // the fixed steps leave as a small nonnegative bias
            let gap = numeric - exact;
            assert!(
                (-1e-8..5e-4).contains(&gap),
                "finite differences {numeric} vs analytic {exact}"
            );
            assert!(exact >= -1e-9, "negative analytic gradient {exact}");
        }
    }
}
