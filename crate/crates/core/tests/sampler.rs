use wavespeed::covariance::{assemble_cov, BoxForm, CovMatrix, DEFAULT_SIZE_CAP};
use wavespeed::sampler::*;
use wavespeed::specfun::QuadratureSpec;
use wavespeed::stats::{mean, variance};
use wavespeed::{Error, ModelParams, SamplingDesign};

#[test]
fn factor_reproduces_matrix() {
    let p = ModelParams::new(1.0, 0.5, 2).unwrap();
    let design = SamplingDesign::Temporal { delta: 0.01, m: 30 };
    let cov = assemble_cov(
        &design,
        &p,
        &QuadratureSpec::default(),
        BoxForm::SpatialForm,
        DEFAULT_SIZE_CAP,
    )
    .unwrap()
    .into_dense();
    let f = factorize(&cov).unwrap();
    assert_eq!(f.jitter_used, 0.0);
    let n = cov.dim;
    let scale = cov.get(0, 0);
    for i in 0..n {
        for j in 0..=i {
            let llt: f64 = (0..=j).map(|k| f.get(i, k) * f.get(j, k)).sum();
            assert!((llt - cov.get(i, j)).abs() < 1e-12 * scale, "({i},{j})");
        }
    }
}

#[test]
fn singular_matrix_gets_jitter() {
    let ones = CovMatrix::from_fn(4, "rank one", |_, _| 1.0);
    let f = factorize(&ones).unwrap();
    assert!(f.jitter_used > 0.0 && f.jitter_used <= 1e-10);
}

#[test]
fn indefinite_matrix_is_rejected() {
    let bad = CovMatrix {
        dim: 2,
        data: vec![1.0, 2.0, 2.0, 1.0],
        label: "bad".into(),
    };
    assert!(matches!(factorize(&bad), Err(Error::NotPsd { .. })));
}

#[test]
fn draws_are_reproducible_and_independent_across_streams() {
    let f = factorize(&CovMatrix::identity(5)).unwrap();
    assert_eq!(draw(&f, 11, 3), draw(&f, 11, 3));
    assert_ne!(draw(&f, 11, 3), draw(&f, 11, 4));
    assert_ne!(draw(&f, 11, 3), draw(&f, 12, 3));
    let batch = sample(&f, 11, 6);
    assert_eq!(batch[3], draw(&f, 11, 3));
}

#[test]
fn normals_have_unit_moments() {
    let mut rng = replicate_rng(5, 0);
    let z = standard_normals(&mut rng, 200_000);
    assert!(mean(&z).abs() < 0.01);
    assert!((variance(&z) - 1.0).abs() < 0.01);
    let mut rng = replicate_rng(5, 1);
    let u: Vec<f64> = (0..10_000).map(|_| uniform(&mut rng)).collect();
    assert!(u.iter().all(|&x| x > 0.0 && x < 1.0));
}

#[test]
fn empirical_covariance_matches_target() {
    let cov = CovMatrix {
        dim: 2,
        data: vec![2.0, -0.6, -0.6, 0.5],
        label: "t".into(),
    };
    let f = factorize(&cov).unwrap();
    let xs = sample(&f, 99, 40_000);
    let n = xs.len() as f64;
    let c00 = xs.iter().map(|x| x[0] * x[0]).sum::<f64>() / n;
    let c01 = xs.iter().map(|x| x[0] * x[1]).sum::<f64>() / n;
    let c11 = xs.iter().map(|x| x[1] * x[1]).sum::<f64>() / n;
    assert!((c00 - 2.0).abs() < 0.06);
    assert!((c01 + 0.6).abs() < 0.03);
    assert!((c11 - 0.5).abs() < 0.015);
}

#[test]
fn temporal_paths_scale_with_speed() {
    let design = SamplingDesign::Temporal { delta: 0.1, m: 8 };
    let slow =
        sample_temporal_u_path(&design, &ModelParams::new(1.0, 1.0, 1).unwrap(), 4, 3).unwrap();
    let fast =
        sample_temporal_u_path(&design, &ModelParams::new(16.0, 1.0, 1).unwrap(), 4, 3).unwrap();
    assert_eq!(slow[0].len(), 10);
    assert_eq!(slow[0][0], 0.0);
    for (a, b) in slow.iter().flatten().zip(fast.iter().flatten()) {
        assert!((b - a * 0.5).abs() <= 1e-15 * a.abs().max(1.0));
    }
}

#[test]
fn shape_checks() {
    let bad = CovMatrix {
        dim: 3,
        data: vec![1.0; 4],
        label: "bad".into(),
    };
    assert!(factorize(&bad).is_err());
    let spatial = SamplingDesign::Spatial {
        t: 1.0,
        lambda: 0.1,
        n: 3,
    };
    assert!(
        sample_temporal_u_path(&spatial, &ModelParams::new(1.0, 1.0, 1).unwrap(), 0, 1).is_err()
    );
}
