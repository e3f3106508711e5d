use wavespeed::covariance::CovMatrix;
use wavespeed::inference::*;
use wavespeed::sampler::sample_temporal_u_path;
use wavespeed::specfun::{constants_table, QuadratureSpec};
use wavespeed::stats::{mean, variance};
use wavespeed::{ModelParams, NoiseProfile, SamplingDesign};

fn dense_solve(a: &CovMatrix, b: &[f64]) -> Vec<f64> {
    // Gaussian elimination with partial pivoting, independent of the Cholesky path
    let n = a.dim;
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i]);
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .unwrap();
        m.swap(c, p);
        let pivot = m[c].clone();
        for row in m.iter_mut().skip(c + 1) {
            let f = row[c] / pivot[c];
            for (x, p) in row.iter_mut().zip(&pivot).skip(c) {
                *x -= f * p;
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

#[test]
fn weighted_form_differs_by_boundary_term() {
    for m in 2..=10usize {
        let a = CovMatrix::from_fn(m, "A", |i, j| ((i.min(j) + 1) * (i.min(j) + 1)) as f64);
        let solver = MleSolver::new(m).unwrap();
        for seed in 0..5 {
            let u: Vec<f64> = (0..m)
                .map(|k| ((k * 7 + seed * 13) % 11) as f64 / 3.0 - 1.5 + 0.01 * seed as f64)
                .collect();
            let x = dense_solve(&a, &u);
            let q_ref: f64 = u.iter().zip(&x).map(|(a, b)| a * b).sum();
            let r = solver.estimate(&u, 0.1).unwrap();
            let (qw, boundary) = weighted_quadratic_variation(&u);
            assert_eq!(qw, r.q_weighted);
            assert!(
                (r.q_direct - q_ref).abs() < 1e-10 * q_ref.abs().max(1.0),
                "m={m}"
            );
            assert!(
                (r.q_weighted - r.boundary_term - r.q_direct).abs() < 1e-10 * q_ref.abs().max(1.0),
                "m={m}"
            );
            assert!((boundary - u[m - 1] * u[m - 1] / (2 * m + 1) as f64).abs() < 1e-15);
        }
    }
}

#[test]
fn mle_is_unbiased_in_monte_carlo() {
    let (m, reps, vartheta) = (500usize, 200usize, 1.7);
    let p = ModelParams::new(vartheta, 1.0, 1).unwrap();
    let delta = 1.0 / m as f64;
    let design = SamplingDesign::Temporal { delta, m };
    let paths = sample_temporal_u_path(&design, &p, 314, reps).unwrap();
    let solver = MleSolver::new(m).unwrap();
    let est: Vec<f64> = paths
        .iter()
        .map(|u| solver.estimate(&u[1..=m], delta).unwrap().estimate)
        .collect();
    let se = (variance(&est) / reps as f64).sqrt();
    assert!(
        (mean(&est) - vartheta).abs() < 3.0 * se,
        "mean {} se {se}",
        mean(&est)
    );
}

#[test]
fn moment_estimator_inverts_the_target() {
    let p = NoiseProfile::new(1.0, 1).unwrap();
    let c = constants_table(p, &QuadratureSpec::default(), 64).unwrap();
    let design = SamplingDesign::Temporal {
        delta: 0.01,
        m: 100,
    };
    let vartheta = 2.25;
    // increments whose rescaled variation equals the asymptotic target exactly
    let target = VariationKind::Te.target(&c, &design, vartheta);
    let norm = VariationKind::Te.normalization(&design, p).unwrap();
    let x = (target / norm / 100.0).sqrt();
    let v = variation(VariationKind::Te, &vec![x; 100], &design, p).unwrap();
    assert!((v.rescaled - target).abs() < 1e-12 * target);
    let e = estimate(&v, &c, &design, 0.9).unwrap();
    assert!((e.estimate - vartheta).abs() < 1e-10);
    assert!(e.covers(vartheta) && e.lower < e.upper);
    let wider = estimate(&v, &c, &design, 0.99).unwrap();
    assert!(wider.upper - wider.lower > e.upper - e.lower);
}

#[test]
fn spatial_estimator_scales_with_time() {
    let p = NoiseProfile::new(1.0, 1).unwrap();
    let c = constants_table(p, &QuadratureSpec::default(), 64).unwrap();
    let design = SamplingDesign::Spatial {
        t: 2.0,
        lambda: 0.01,
        n: 50,
    };
    let target = VariationKind::Sp.target(&c, &design, 0.8);
    let norm = VariationKind::Sp.normalization(&design, p).unwrap();
    let x = (target / norm / 50.0).sqrt();
    let v = variation(VariationKind::Sp, &vec![x; 50], &design, p).unwrap();
    let e = estimate(&v, &c, &design, 0.95).unwrap();
    assert!((e.estimate - 0.8).abs() < 1e-10);
}

#[test]
fn kind_design_mismatch_and_bad_input() {
    let p = NoiseProfile::new(1.0, 1).unwrap();
    let te = SamplingDesign::Temporal { delta: 0.1, m: 3 };
    assert!(variation(VariationKind::Sp, &[1.0; 3], &te, p).is_err());
    assert!(variation(VariationKind::Te, &[1.0; 4], &te, p).is_err());
    let c = constants_table(p, &QuadratureSpec::default(), 32).unwrap();
    let zero = variation(VariationKind::Te, &[0.0; 3], &te, p).unwrap();
    assert!(estimate(&zero, &c, &te, 0.95).is_err());
    assert!(mle_whitenoise(&[1.0, 2.0], 0.0).is_err());
    assert!(MleSolver::new(0).is_err());
}

#[test]
fn hellinger_properties() {
    assert_eq!(hellinger_sq(2.0, 2.0, 1.0, 50).unwrap(), 0.0);
    let a = hellinger_sq(1.0, 1.1, 1.0, 10).unwrap();
    let b = hellinger_sq(1.0, 1.1, 1.0, 1000).unwrap();
    assert!(a < b && b < 1.0);
    assert!(
        (hellinger_sq(1.0, 1.1, 0.5, 10).unwrap() - hellinger_sq(1.1, 1.0, 0.5, 10).unwrap()).abs()
            < 1e-15
    );
    assert!((hellinger_sq(1.0, 4.0, 1.0, 2).unwrap() - 1.0 / 9.0).abs() < 1e-14);
}

#[test]
fn box_increments_from_grid() {
    // u(t, x) = t² x² has box increment 2·2 = 4 everywhere
    let grid: Vec<Vec<f64>> = (0..5)
        .map(|i| (0..6).map(|k| ((i * i) * (k * k)) as f64).collect())
        .collect();
    let b = box_diff(&grid).unwrap();
    assert_eq!(b.len(), 3 * 4);
    assert!(b.iter().all(|&v| v == 4.0));
    assert!(box_diff(&grid[..2]).is_err());
}
