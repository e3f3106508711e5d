use proptest::prelude::*;
use rand_chacha::rand_core::RngCore;
use wavespeed::increments::*;
use wavespeed::sampler::{replicate_rng, uniform};

fn manual_inc(f: &dyn Fn(f64) -> f64, p: u32, z: f64) -> f64 {
    match p {
        1 => f(z + 1.0) - f(z - 1.0),
        2 => f(z + 1.0) - 2.0 * f(z) + f(z - 1.0),
        3 => f(z + 2.0) - 2.0 * f(z + 1.0) + 2.0 * f(z - 1.0) - f(z - 2.0),
        4 => f(z + 2.0) - 4.0 * f(z + 1.0) + 6.0 * f(z) - 4.0 * f(z - 1.0) + f(z - 2.0),
        _ => unreachable!(),
    }
}

#[test]
fn low_order_stencils_match_hand_expansion() {
    let f = |x: f64| (0.3 * x).exp() + x.powi(3);
    for p in 1..=4 {
        for z in [-3.0, 0.0, 2.0, 7.0] {
            let a = inc_p(f, p, z);
            let b = manual_inc(&f, p, z);
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "p={p} z={z}");
        }
    }
}

#[test]
fn polynomials_are_annihilated() {
    // every order-p increment kills polynomials of degree < p
    for p in 1..=6u32 {
        let deg = p - 1;
        let f = |x: f64| {
            (0..=deg)
                .map(|k| (k as f64 + 1.0) * x.powi(k as i32))
                .sum::<f64>()
        };
        assert!(inc_p(f, p, 3.0).abs() < 1e-8, "p={p}");
    }
}

#[test]
fn sequence_increments_respect_bounds() {
    let data: Vec<f64> = (0..10).map(|k| (k * k) as f64).collect();
    assert_eq!(inc_seq(&data, 2, 0), None);
    assert_eq!(inc_seq(&data, 2, 5), Some(2.0));
    assert_eq!(inc_seq(&data, 4, 1), None);
    assert_eq!(inc_seq(&data, 4, 8), None);
    assert_eq!(inc_seq(&data, 4, 7), Some(0.0));
}

#[test]
fn binomials() {
    assert_eq!(binomial(4, 2), 6);
    assert_eq!(binomial(60, 30), 118264581564861424);
    assert_eq!(binomial(3, 5), 0);
}

/// 1200 random cases for every closed form, three quarters of them on the
/// `|q - z| ∈ {0, 1}` boundary branches.
#[test]
fn closed_forms_match_brute_force_random() {
    let mut rng = replicate_rng(20240611, 0);
    let mut worst = 0.0f64;
    let mut near_cases = 0;
    for case in 0..1200 {
        let r = 0.01 + 3.1 * uniform(&mut rng);
        let p = 1 + (rng.next_u64() % 6) as u32;
        let z = (rng.next_u64() % 41) as f64 - 20.0;
        for kind in [Trig::Cos, Trig::Sin] {
            let brute = inc_p(|x| kind.eval(x * r), p, z);
            worst = worst.max((trig_inc(kind, p, r, z) - brute).abs());
        }

        let a = 0.1 + 1.5 * uniform(&mut rng);
        let b = uniform(&mut rng);
        let f = move |x: f64| (a * x).cos() + b * (x / 3.0).sin().powi(2) + (-(x * x) / 9.0).exp();
        let q = 1.0 + (rng.next_u64() % 15) as f64;
        let gap = match case % 4 {
            0 => 0.0,
            1 => 1.0,
            2 => -1.0,
            _ => (rng.next_u64() % 9) as f64 - 4.0,
        };
        if gap.abs() <= 1.0 {
            near_cases += 1;
        }
        let zz = q + gap;
        for form in StructuredForm::ALL {
            let brute = inc2_2d(|u, v| form.kernel(&f, u, v), q, zz);
            let closed = inc2_structured(form, f, q, zz).unwrap();
            worst = worst.max((closed - brute).abs() / (1.0 + brute.abs()));
        }
    }
    assert!(near_cases >= 900);
    assert!(worst < 1e-12, "worst deviation {worst:e}");
}

#[test]
fn min_form_rejects_odd_functions() {
    let err = inc2_structured(StructuredForm::Min, |x: f64| x.sin(), 3.0, 3.0);
    assert!(err.is_err());
}

proptest! {
    #[test]
    fn trig_closed_form(r in 0.001f64..3.1, z in -50i32..50, p in 1u32..8) {
        for kind in [Trig::Cos, Trig::Sin] {
            let brute = inc_p(|x| kind.eval(x * r), p, z as f64);
            prop_assert!((trig_inc(kind, p, r, z as f64) - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn structured_rules(a in 0.05f64..2.0, q in 1i32..30, gap in -3i32..4) {
        let f = move |x: f64| (a * x).cos() * (1.0 + 0.01 * x * x);
        let (q, z) = (q as f64, (q + gap) as f64);
        for form in StructuredForm::ALL {
            let brute = inc2_2d(|u, v| form.kernel(&f, u, v), q, z);
            let closed = inc2_structured(form, f, q, z).unwrap();
            prop_assert!((closed - brute).abs() <= 1e-12 * (1.0 + brute.abs()), "{form:?}");
        }
    }
}
