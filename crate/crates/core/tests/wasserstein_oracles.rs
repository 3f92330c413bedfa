mod common;

use common::{random_diagram, wasserstein_oracle};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toposeries::distance::{wasserstein, WassersteinConfig};
use toposeries::persistence::PersistenceDiagram;

fn w(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> f64 {
    let cfg = WassersteinConfig { p, dimension: 0 };
    wasserstein(
        &PersistenceDiagram::from_pairs(0, a),
        &PersistenceDiagram::from_pairs(0, b),
        &cfg,
    )
    .unwrap()
}

#[test]
fn matches_full_matching_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..500 {
        let a = random_diagram(&mut rng, 4);
        let b = random_diagram(&mut rng, 4);
        let p = if case % 5 == 4 { 2.0 } else { 1.0 };
        let (got, want) = (w(&a, &b, p), wasserstein_oracle(&a, &b, p));
        assert!(
            (got - want).abs() <= 1e-9,
            "{a:?} {b:?} p={p}: {got} vs {want}"
        );
    }
}

#[test]
fn worked_example() {
    assert!((w(&[(0.0, 1.0)], &[(0.0, 5.0)], 1.0) - 3.0).abs() < 1e-12);
    assert!((wasserstein_oracle(&[(0.0, 1.0)], &[(0.0, 5.0)], 1.0) - 3.0).abs() < 1e-12);
    assert_eq!(w(&[], &[], 1.0), 0.0);
}

#[test]
fn symmetric_and_triangle() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..200 {
        let a = random_diagram(&mut rng, 5);
        let b = random_diagram(&mut rng, 5);
        let c = random_diagram(&mut rng, 5);
        let (ab, ba, bc, ac) = (
            w(&a, &b, 1.0),
            w(&b, &a, 1.0),
            w(&b, &c, 1.0),
            w(&a, &c, 1.0),
        );
        assert!((ab - ba).abs() <= 1e-9);
        assert!(ac <= ab + bc + 1e-9);
        assert!(w(&a, &a, 1.0).abs() <= 1e-12);
    }
}

#[test]
fn rejects_non_finite_points() {
    let cfg = WassersteinConfig::default();
    let a = PersistenceDiagram::from_pairs(0, &[(0.0, f64::INFINITY)]);
    assert!(wasserstein(&a, &PersistenceDiagram::empty(0), &cfg).is_err());
}

proptest! {
    #[test]
    fn diagonal_points_cost_nothing(
        seed in any::<u64>(),
        on_diagonal in prop::collection::vec(0.0f64..3.0, 1..4),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_diagram(&mut rng, 4);
        let b = random_diagram(&mut rng, 4);
        let mut padded = a.clone();
        padded.extend(on_diagonal.iter().map(|&t| (t, t)));
        prop_assert!((w(&a, &b, 1.0) - w(&padded, &b, 1.0)).abs() <= 1e-9);
    }

    #[test]
    fn lone_point_costs_half_its_lifetime(b in 0.0f64..5.0, len in 0.0f64..5.0) {
        prop_assert!((w(&[(b, b + len)], &[], 1.0) - len / 2.0).abs() <= 1e-12);
    }

    #[test]
    fn non_negative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_diagram(&mut rng, 6);
        let b = random_diagram(&mut rng, 6);
        let d = w(&a, &b, 1.0);
        prop_assert!(d >= 0.0 && d.is_finite());
    }
}
