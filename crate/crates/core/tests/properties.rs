mod common;

use common::{basis, uniform_cloud};
use proptest::prelude::*;
use samplet_core::soft_shrinkage;

proptest! {
    #[test]
    fn shrinkage_is_the_l1_prox(v in prop::collection::vec(-10.0f64..10.0, 1..20), t in 0.0f64..5.0) {
        let w = vec![t; v.len()];
        let s = soft_shrinkage(&v, &w).unwrap();
        for (x, y) in v.iter().zip(&s) {
            // y minimizes ½(y − x)² + t|y| locally
            let f = |z: f64| 0.5 * (z - x) * (z - x) + t * z.abs();
            for dz in [-1e-3, 1e-3, -0.1, 0.1] {
                prop_assert!(f(*y) <= f(y + dz) + 1e-12);
            }
            prop_assert!(y.abs() <= x.abs());
            prop_assert!(*y == 0.0 || y.signum() == x.signum());
        }
        prop_assert_eq!(soft_shrinkage(&v, &vec![0.0; v.len()]).unwrap(), v.clone());
    }

    #[test]
    fn transform_round_trip(n in 1usize..300, dim in 1usize..4, q in 0usize..4, seed in 0u64..1000) {
        let cloud = uniform_cloud(n, dim, seed);
        let b = basis(&cloud, q);
        let v: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.37 + seed as f64).sin()).collect();
        let back = b.inverse(&b.forward(&v).unwrap()).unwrap();
        for (x, y) in v.iter().zip(&back) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn shrinkage_examples() {
    let s = soft_shrinkage(&[2.0, -3.0, 0.5], &[1.0, 1.0, 1.0]).unwrap();
    assert_eq!(s, vec![1.0, -2.0, 0.0]);
    assert_eq!(soft_shrinkage(&[1.5], &[1.5]).unwrap(), vec![0.0]);
    assert!(soft_shrinkage(&[1.0], &[-1.0]).is_err());
    assert!(soft_shrinkage(&[1.0, 2.0], &[1.0]).is_err());
}
