//! Randomized invariants of the discrete operator and its principal eigenvalue.

use nichewave_core::*;
use proptest::prelude::*;

fn operator(eps: f64, m: f64, radius: f64, a: &[f64]) -> DiscreteOperator {
    let g = build_grid(1, radius, 0.2, Topology::BallTruncated).unwrap();
    let k = rescale_kernel(&Kernel::tent(1), eps, m, 1.0).unwrap();
    let a: Vec<f64> = (0..g.len()).map(|i| a[i % a.len()]).collect();
    DiscreteOperator::new(&g, &k, a).unwrap()
}

fn growth() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn assembled_matrix_is_symmetric(eps in 0.5f64..3.0, m in 0.0f64..2.0, a in growth()) {
        let op = operator(eps, m, 3.0, &a);
        let mat = op.assemble_matrix(4096).unwrap();
        prop_assert!((&mat - mat.transpose()).amax() <= 1e-14 * mat.amax());
    }

    #[test]
    fn dispersal_quadratic_form_is_nonpositive(eps in 0.5f64..3.0, u in prop::collection::vec(-1.0f64..1.0, 30)) {
        let op = operator(eps, 1.0, 3.0, &[0.0]);
        prop_assume!(op.len() == u.len());
        let mu = op.apply(&u, false, Path::Direct).unwrap();
        let q: f64 = mu.iter().zip(&u).map(|(x, y)| x * y).sum();
        prop_assert!(q <= 1e-12);
    }

    #[test]
    fn lambda_p_is_lipschitz_in_growth(eps in 0.5f64..3.0, a in growth(), d in -0.5f64..0.5) {
        let opts = SpectralOptions::default();
        let op = operator(eps, 0.0, 4.0, &a);
        let shifted: Vec<f64> = op.growth().iter().enumerate().map(|(i, v)| v + d * ((i as f64).sin())).collect();
        let l0 = principal_eigenvalue(&op, &opts).unwrap();
        let l1 = principal_eigenvalue(&op.with_growth(shifted).unwrap(), &opts).unwrap();
        prop_assert!((l1.value - l0.value).abs() <= d.abs() + l0.width() + l1.width());
    }

    #[test]
    fn larger_growth_lowers_lambda_p(eps in 0.5f64..3.0, a in growth(), bump in 0.0f64..1.0) {
        let opts = SpectralOptions::default();
        let op = operator(eps, 1.0, 4.0, &a);
        let raised: Vec<f64> = op.growth().iter().map(|v| v + bump).collect();
        let l0 = principal_eigenvalue(&op, &opts).unwrap();
        let l1 = principal_eigenvalue(&op.with_growth(raised).unwrap(), &opts).unwrap();
        prop_assert!(l1.lower <= l0.upper);
        // a constant shift moves the eigenvalue by exactly that amount
        prop_assert!((l0.value - l1.value - bump).abs() <= 1e-8);
    }
}
