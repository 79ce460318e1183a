mod common;

use common::to_na;
use nalgebra::DMatrix;
use septensor_core::sgti::{
    build_kronecker_sum, build_laplacian_1d, build_nullspace_projector, schulz_invert, ErrorNorm,
    SchulzConfig, StencilOrder,
};
use septensor_core::{Matrix, SepOperator};

#[test]
fn second_order_periodic_laplacian() {
    let m = 8;
    let a = to_na(&build_laplacian_1d(m, StencilOrder::from_order(2).unwrap(), true).unwrap());
    let h2 = (m * m) as f64;
    for i in 0..m {
        for k in 0..m {
            let off = (k + m - i) % m;
            let expected = match off {
                0 => -2.0 * h2,
                1 => h2,
                o if o == m - 1 => h2,
                _ => 0.0,
            };
            assert!((a[(i, k)] - expected).abs() < 1e-10, "({i}, {k})");
        }
    }
}

#[test]
fn periodic_stencils_annihilate_constants() {
    for order in [2, 8] {
        let a =
            to_na(&build_laplacian_1d(16, StencilOrder::from_order(order).unwrap(), true).unwrap());
        assert!((&a - a.transpose()).amax() < 1e-9);
        let ones = nalgebra::DVector::from_element(16, 1.0);
        assert!((&a * ones).amax() < 1e-9 * a.amax(), "order {order}");
        let eig = a.symmetric_eigenvalues();
        assert!(eig.iter().all(|&x| x < 1e-8 * a.amax()));
    }
    assert!(StencilOrder::from_order(4).is_err());
}

#[test]
fn kronecker_sum_matches_dense() {
    let a = Matrix::from_rows(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]);
    let op = build_kronecker_sum(&a, 2).unwrap();
    let na = to_na(&a);
    let i = DMatrix::<f64>::identity(3, 3);
    let expected = i.kronecker(&na) + na.kronecker(&i);
    assert!((to_na(&op.densify().unwrap()) - expected).amax() < 1e-13);
}

#[test]
fn nullspace_projector_is_an_orthogonal_projector() {
    let p = to_na(
        &build_nullspace_projector(&[3, 4])
            .unwrap()
            .densify()
            .unwrap(),
    );
    assert!((&p * &p - &p).amax() < 1e-13);
    assert!((&p - p.transpose()).amax() < 1e-13);
    let ones = nalgebra::DVector::from_element(12, 1.0);
    assert!((&p * ones).amax() < 1e-13);
    assert!((p.trace() - 11.0).abs() < 1e-12);
}

#[test]
fn inverts_diagonal_kronecker_sum() {
    let dmat = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
    let b = build_kronecker_sum(&dmat, 2).unwrap();
    let reference = to_na(&b.densify().unwrap()).try_inverse().unwrap();
    for error_norm in [ErrorNorm::OperatorS, ErrorNorm::TensorS] {
        let cfg = SchulzConfig {
            eps_reduce: 1e-14,
            target: 1e-13,
            error_norm,
            ..SchulzConfig::default()
        };
        let (x, trace) = schulz_invert(&b, &cfg).unwrap();
        let got = to_na(&x.densify().unwrap());
        assert!(
            (got - &reference).amax() <= 1e-10 * reference.amax(),
            "{error_norm:?}"
        );
        assert!(trace.records.windows(2).all(|w| w[1].iter == w[0].iter + 1));
        assert!(trace.final_error().unwrap() <= 1e-10);
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let b = SepOperator::identity(&[2, 2]).unwrap();
    for cfg in [
        SchulzConfig {
            eps_reduce: 0.0,
            ..SchulzConfig::default()
        },
        SchulzConfig {
            max_rank: 0,
            ..SchulzConfig::default()
        },
        SchulzConfig {
            alpha: Some(-1.0),
            ..SchulzConfig::default()
        },
    ] {
        assert!(schulz_invert(&b, &cfg).is_err());
    }
    let far = SchulzConfig {
        alpha: Some(10.0),
        ..SchulzConfig::default()
    };
    assert!(schulz_invert(&b, &far).is_err());
}
