mod common;

use proptest::prelude::*;
use sparse_steady::generators::random_general_field;
use sparse_steady::io::{field_from_json, field_to_json};
use sparse_steady::spectral::{leray_project, sobolev_norm, superpose, GeneralMode};
use sparse_steady::{Frequency, Phase, PhasorMode, SolenoidalField, WideReal};

use common::{as_map, cartesian_leray, largest, max_rel_diff};

#[test]
fn leray_matches_cartesian_projection() {
    for seed in 0..200 {
        let g = random_general_field(seed, 12, 32).unwrap();
        let p = as_map(&leray_project(&g));
        let oracle = cartesian_leray(&g);
        let scale = largest(&oracle).max(1e-300);
        assert!(max_rel_diff(&p, &oracle, scale) < 1e-13, "seed {seed}");
    }
}

#[test]
fn leray_is_idempotent_and_structurally_solenoidal() {
    for seed in 0..200 {
        let g = random_general_field(seed, 10, 32).unwrap();
        let p = leray_project(&g);
        let general = p.to_general();
        for (_, a) in general.iter() {
            assert!(a.long.is_zero());
        }
        let again = leray_project(&general);
        assert_eq!(again, p);
    }
}

#[test]
fn evaluation_is_divergence_free_by_finite_differences() {
    let f = superpose([
        &SolenoidalField::single(Frequency::new(3, -2), WideReal::from_f64(0.8), Phase::new(1, 5).unwrap()).unwrap(),
        &SolenoidalField::single(Frequency::new(1, 4), WideReal::from_f64(0.3), Phase::HALF_PI).unwrap(),
    ]);
    let h = 1e-5;
    for x in [[0.1, 0.2], [1.7, -0.4], [3.0, 2.5]] {
        let d1 = (f.evaluate([x[0] + h, x[1]]).unwrap()[0] - f.evaluate([x[0] - h, x[1]]).unwrap()[0]) / (2.0 * h);
        let d2 = (f.evaluate([x[0], x[1] + h]).unwrap()[1] - f.evaluate([x[0], x[1] - h]).unwrap()[1]) / (2.0 * h);
        assert!((d1 + d2).abs() < 1e-8);
    }
}

#[test]
fn single_mode_sobolev_norms() {
    let f = SolenoidalField::single(Frequency::new(1, 1), WideReal::from_f64(1.0), Phase::ZERO).unwrap();
    // ρ²|k|^{2+2s}/2 with |k|² = 2
    assert!((sobolev_norm(&f, -1.0).to_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((sobolev_norm(&f, 0.0).to_f64().unwrap() - 1.0).abs() < 1e-15);
    assert!((sobolev_norm(&f, -3.0).to_f64().unwrap() - 0.125f64.sqrt()).abs() < 1e-15);
}

#[test]
fn field_files_round_trip_extreme_amplitudes() {
    let tiny = WideReal::from_parts(1.0, -4000);
    let huge = Frequency::new(
        "174434473058375118900568643777".parse::<num_bigint::BigInt>().unwrap(),
        "174434473083580327954119661727".parse::<num_bigint::BigInt>().unwrap(),
    );
    let f = SolenoidalField::from_modes([
        PhasorMode::polar(huge, tiny, Phase::new(3, 2).unwrap()).unwrap(),
        PhasorMode::polar(Frequency::new(0, 5), WideReal::from_f64(0.5), Phase::PI).unwrap(),
    ]);
    let back = field_from_json(&field_to_json(&f).unwrap()).unwrap();
    assert_eq!(back, f);
}

proptest! {
    #[test]
    fn canonical_representative_is_unique(k1 in -40i64..40, k2 in -40i64..40, num in 0i64..8) {
        prop_assume!(k1 != 0 || k2 != 0);
        let theta = Phase::new(num, 4).unwrap();
        let m = PhasorMode::polar(Frequency::new(k1, k2), WideReal::from_f64(1.0), theta).unwrap();
        let flipped = PhasorMode::polar(Frequency::new(-k1, -k2), WideReal::from_f64(1.0), Phase::PI - theta).unwrap();
        // ρcos(k·x+θ)k^⊥ = ρcos(−k·x+π−θ)(−k)^⊥
        prop_assert!(m.freq.is_canonical());
        prop_assert_eq!(&m.freq, &flipped.freq);
        prop_assert!(m.phasor.rel_err(&flipped.phasor, WideReal::ONE) < 1e-15);
        let x = [0.37, -1.1];
        let a = SolenoidalField::from_modes([m]).evaluate(x).unwrap();
        let direct = {
            let arg = k1 as f64 * x[0] + k2 as f64 * x[1] + theta.radians();
            [-(k2 as f64) * arg.cos(), k1 as f64 * arg.cos()]
        };
        prop_assert!((a[0] - direct[0]).abs() < 1e-10 && (a[1] - direct[1]).abs() < 1e-10);
    }

    #[test]
    fn cartesian_frame_round_trip(k1 in -20i64..20, k2 in -20i64..20, v in prop::array::uniform4(-1.0f64..1.0)) {
        prop_assume!(k1 != 0 || k2 != 0);
        let w = |x: f64| WideReal::from_f64(x);
        let k = Frequency::new(k1, k2);
        let m = GeneralMode::from_cartesian(&k, [w(v[0]), w(v[1])], [w(v[2]), w(v[3])]).unwrap();
        let (cv, cw) = m.cartesian();
        let sign = if k.is_canonical() { 1.0 } else { -1.0 };
        prop_assert!((cv[0].to_f64().unwrap() - v[0]).abs() < 1e-14);
        prop_assert!((cv[1].to_f64().unwrap() - v[1]).abs() < 1e-14);
        prop_assert!((cw[0].to_f64().unwrap() - sign * v[2]).abs() < 1e-14);
        prop_assert!((cw[1].to_f64().unwrap() - sign * v[3]).abs() < 1e-14);
    }
}
