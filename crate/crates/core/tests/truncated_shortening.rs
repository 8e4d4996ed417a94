//! Shortening where the logical X keeps only its first c X factors.

use qecc_forge::codes::{mds_generator, DEFAULT_BUDGET};
use qecc_forge::construct::{shorten_with, ShortenOptions};
use qecc_forge::verify::{check_logical_algebra, check_orthonormal, check_stabilizes, code_distance, Budget, DistanceMethod};
use qecc_forge::PrimeField;

fn distance(q: u64, gamma: Option<u64>, k: usize, c: usize, method: DistanceMethod) -> usize {
    let f = PrimeField::new(q, gamma).unwrap();
    let g = mds_generator(f, k, q as usize + 1).unwrap();
    let code = shorten_with(&g, 1, ShortenOptions { truncate_x: Some(c) }, DEFAULT_BUDGET).unwrap();
    assert!(check_stabilizes(&code).passed);
    assert!(check_orthonormal(&code).passed);
    assert!(check_logical_algebra(&code).passed);
    code_distance(&code, method, &mut Budget::new(u64::MAX)).unwrap().distance
}

#[test]
fn distance_is_min_of_kept_factors_and_k() {
    for (q, gamma) in [(3, None), (5, Some(3))] {
        let n = q as usize + 1;
        for k in 2..=n / 2 {
            for c in 1..=n - k {
                for method in [DistanceMethod::Overlap, DistanceMethod::Symplectic] {
                    assert_eq!(distance(q, gamma, k, c, method), c.min(k), "q={q} k={k} c={c} {method:?}");
                }
            }
        }
    }
}

#[test]
fn keeping_k_factors_preserves_distance_q7() {
    for k in 2..=4 {
        assert_eq!(distance(7, None, k, k, DistanceMethod::Symplectic), k);
        assert_eq!(distance(7, None, k, k - 1, DistanceMethod::Symplectic), k - 1);
    }
}
