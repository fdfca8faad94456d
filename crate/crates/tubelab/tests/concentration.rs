//! Oracle and property tests for the concentration module.
//!
//! Reference values were frozen from 30-digit arbitrary-precision
//! evaluations of the defining integrals, independent of the quadrature and
//! special-function code under test.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use tubelab::concentration::{
    complement_upper_bound, equator_complement_measure, scan_concentration,
    symmetric_complement_measure, ConcentrationError, ConcentrationFamily, EpsSchedule,
    RicciModel, ScanResult, Verdict,
};
use tubelab::quad::integrate;
use tubelab::tube::SpectralData;

/// P(|Z| > 1) for a standard normal, to 16 digits.
const TWO_TAIL_ONE_SIGMA: f64 = 0.3173105078629141;

fn equator_by_quadrature(n: u32, eps: f64) -> f64 {
    let density = move |t: f64| t.cos().powi(n as i32 - 1);
    let total = integrate(density, 0.0, FRAC_PI_2, 1e-13).unwrap().value;
    let outside = integrate(density, eps, FRAC_PI_2, 1e-13).unwrap().value;
    outside / total
}

#[test]
fn equator_complement_is_one_at_zero_radius() {
    for n in [2, 3, 10, 101] {
        assert_eq!(equator_complement_measure(n, 0.0).unwrap(), 1.0);
    }
}

#[test]
fn equator_complement_vanishes_at_right_angle() {
    for n in [2, 5, 40] {
        assert_eq!(equator_complement_measure(n, FRAC_PI_2).unwrap(), 0.0);
    }
}

#[test]
fn equator_complement_on_two_sphere_is_one_minus_sine() {
    for i in 1..10 {
        let eps = FRAC_PI_2 * i as f64 / 10.0;
        let got = equator_complement_measure(2, eps).unwrap();
        assert!((got - (1.0 - eps.sin())).abs() < 1e-12, "eps={eps} got={got}");
    }
}

#[test]
fn equator_complement_matches_direct_quadrature() {
    for n in [2, 3, 5, 10, 50] {
        for eps in [0.1, 0.4, 1.0] {
            let got = equator_complement_measure(n, eps).unwrap();
            let want = equator_by_quadrature(n, eps);
            assert!((got - want).abs() < 1e-9, "n={n} eps={eps} got={got} want={want}");
        }
    }
}

#[test]
fn equator_complement_matches_frozen_references() {
    let got = equator_complement_measure(10, 0.4).unwrap();
    assert!((got - 0.21084389362183404).abs() < 1e-13, "got={got}");
    let got = equator_complement_measure(2000, 0.05).unwrap();
    assert!((got - 0.025335098755453150).abs() < 1e-13, "got={got}");
}

#[test]
fn equator_complement_strictly_decreases_in_radius_and_dimension() {
    let mut prev = equator_complement_measure(6, 0.0).unwrap();
    for i in 1..=20 {
        let eps = FRAC_PI_2 * i as f64 / 20.0;
        let value = equator_complement_measure(6, eps).unwrap();
        assert!(value < prev, "not decreasing at eps={eps}");
        prev = value;
    }
    let mut prev = equator_complement_measure(2, 0.3).unwrap();
    for n in 3..=12 {
        let value = equator_complement_measure(n, 0.3).unwrap();
        assert!(value < prev, "not decreasing at n={n}");
        prev = value;
    }
}

#[test]
fn equator_complement_rejects_bad_arguments() {
    assert!(equator_complement_measure(1, 0.3).is_err());
    assert!(equator_complement_measure(4, -0.1).is_err());
    assert!(equator_complement_measure(4, 1.6).is_err());
    assert!(equator_complement_measure(4, f64::NAN).is_err());
}

#[test]
fn symmetric_complement_with_unit_spectrum_matches_equator() {
    for n in [2usize, 4, 9] {
        let spectrum = SpectralData::new(vec![1.0; n]).unwrap();
        for eps in [0.2, 0.7, 1.4] {
            let got = symmetric_complement_measure(&spectrum, eps, FRAC_PI_2).unwrap();
            let want = equator_complement_measure(n as u32 + 1, eps).unwrap();
            assert!((got - want).abs() < 1e-9, "n={n} eps={eps} got={got} want={want}");
        }
    }
}

#[test]
fn symmetric_complement_endpoints() {
    let spectrum = SpectralData::new(vec![0.5, 1.25, 2.0]).unwrap();
    assert_eq!(symmetric_complement_measure(&spectrum, 0.0, FRAC_PI_4).unwrap(), 1.0);
    assert_eq!(symmetric_complement_measure(&spectrum, FRAC_PI_4, FRAC_PI_4).unwrap(), 0.0);
}

#[test]
fn symmetric_complement_matches_frozen_reference() {
    let spectrum = SpectralData::new(vec![0.5, 1.25, 2.0]).unwrap();
    let got = symmetric_complement_measure(&spectrum, 0.3, FRAC_PI_4).unwrap();
    assert!((got - 0.3886096543962169).abs() < 1e-10, "got={got}");
}

#[test]
fn symmetric_complement_rejects_bad_windows() {
    let spectrum = SpectralData::new(vec![0.5, 1.25, 2.0]).unwrap();
    assert!(symmetric_complement_measure(&spectrum, 0.1, 0.0).is_err());
    assert!(symmetric_complement_measure(&spectrum, 0.1, FRAC_PI_4 * 1.01).is_err());
    assert!(symmetric_complement_measure(&spectrum, 0.8, FRAC_PI_4).is_err());
    assert!(symmetric_complement_measure(&spectrum, -0.1, FRAC_PI_4).is_err());
}

#[test]
fn upper_bound_is_exactly_one_at_zero_radius() {
    let cases = [
        (1, RicciModel::new(1.0, 0.0).unwrap()),
        (5, RicciModel::new(1.0, -0.5).unwrap()),
        (40, RicciModel::new(0.5, 0.25).unwrap()),
    ];
    for (n, model) in cases {
        assert_eq!(complement_upper_bound(n, 0.0, model).unwrap(), 1.0);
    }
}

#[test]
fn upper_bound_matches_frozen_references() {
    let got = complement_upper_bound(60, 0.3, RicciModel::new(1.0, 0.0).unwrap()).unwrap();
    assert!((got - 0.5300367873440267).abs() < 1e-9, "got={got}");
    let got = complement_upper_bound(25, 0.55, RicciModel::new(1.0, -0.5).unwrap()).unwrap();
    assert!((got - 0.10167259179097952).abs() < 1e-9, "got={got}");
}

#[test]
fn upper_bound_vanishes_past_the_window() {
    let model = RicciModel::new(1.0, 0.0).unwrap();
    assert_eq!(complement_upper_bound(4, 2.0, model).unwrap(), 0.0);
}

#[test]
fn upper_bound_decreases_in_dimension() {
    let model = RicciModel::new(1.0, 0.0).unwrap();
    let mut prev = f64::INFINITY;
    let mut seen_interior = false;
    for n in (10..=200).step_by(10) {
        let bound = complement_upper_bound(n, 0.3, model).unwrap();
        assert!(bound <= prev + 1e-12, "n={n} bound={bound} prev={prev}");
        seen_interior |= bound < 1.0;
        prev = bound;
    }
    assert!(seen_interior, "sweep never left the clamp at 1");
}

#[test]
fn upper_bound_dominates_symmetric_complement() {
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    let models = [(1.0, 0.0), (1.0, -0.5), (2.0, 0.5), (0.5, 0.25)];
    for trial in 0..150 {
        let n = rng.gen_range(1..=8u32);
        let (a, b) = models[rng.gen_range(0..models.len())];
        let s = a * n as f64 + b;
        if s <= 0.0 {
            continue;
        }
        let mut weights: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        if trial % 5 == 0 {
            weights = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        }
        let total: f64 = weights.iter().sum();
        let spectrum =
            SpectralData::new(weights.iter().map(|w| (s * w / total).sqrt()).collect()).unwrap();
        let t_max = FRAC_PI_2 / spectrum.max_eigenvalue();
        let eps = rng.gen::<f64>() * t_max;
        let complement = symmetric_complement_measure(&spectrum, eps, t_max).unwrap();
        let model = RicciModel::new(a, b).unwrap();
        let bound = complement_upper_bound(n, eps, model).unwrap();
        assert!(
            bound + 1e-9 >= complement,
            "trial={trial} n={n} s={s} eps={eps} complement={complement} bound={bound}"
        );
    }
}

#[test]
fn ricci_model_rejects_bad_parameters() {
    assert!(RicciModel::new(0.0, 1.0).is_err());
    assert!(RicciModel::new(-1.0, 1.0).is_err());
    assert!(RicciModel::new(1.0, f64::NAN).is_err());
    let model = RicciModel::new(1.0, -1.0).unwrap();
    assert!(matches!(
        complement_upper_bound(1, 0.1, model),
        Err(ConcentrationError::Domain(_))
    ));
    assert!(complement_upper_bound(0, 0.1, model).is_err());
    assert!(complement_upper_bound(4, -0.2, model).is_err());
}

#[test]
fn quarter_rate_equator_scan_reports_locus() {
    let family = ConcentrationFamily::equators();
    let schedule = EpsSchedule::power(1.0, 0.25).unwrap();
    let range: Vec<u32> = (20..=400).step_by(20).collect();
    let result = scan_concentration(&family, &schedule, &range, 1e-3).unwrap();
    assert_eq!(result.verdict, Verdict::Locus);
    assert_eq!(result.label, "sphere-equators");
    assert_eq!(result.rows.len(), range.len());
    for row in &result.rows {
        assert!(row.complement <= row.bound + 1e-9, "row {row:?} violates the bound");
    }
    let rate = result.rate.unwrap();
    assert!((rate.k - 0.25).abs() < 1e-10, "k={}", rate.k);
    assert!((rate.c - 1.0).abs() < 1e-9, "c={}", rate.c);
    assert!(rate.r2 > 0.999, "r2={}", rate.r2);
}

#[test]
fn half_rate_equator_scan_reports_not_locus() {
    let family = ConcentrationFamily::equators();
    let schedule = EpsSchedule::power(1.0, 0.5).unwrap();
    let range: Vec<u32> = (0..8).map(|k| 100 << k).collect();
    let result = scan_concentration(&family, &schedule, &range, 1e-3).unwrap();
    assert_eq!(result.verdict, Verdict::NotLocus);
    let last = result.rows.last().unwrap();
    assert!(
        (last.complement - TWO_TAIL_ONE_SIGMA).abs() < 1e-4,
        "limit mass off: {}",
        last.complement
    );
    for row in &result.rows {
        assert!(row.complement <= row.bound + 1e-9);
    }
    let rate = result.rate.unwrap();
    assert!((rate.k - 0.5).abs() < 1e-10);
}

#[test]
fn constant_schedule_scan_reports_locus_with_zero_rate() {
    let family = ConcentrationFamily::equators();
    let schedule = EpsSchedule::constant(0.3).unwrap();
    let range: Vec<u32> = (40..=400).step_by(40).collect();
    let result = scan_concentration(&family, &schedule, &range, 1e-3).unwrap();
    assert_eq!(result.verdict, Verdict::Locus);
    let rate = result.rate.unwrap();
    assert!(rate.k.abs() < 1e-12, "k={}", rate.k);
    assert_eq!(rate.r2, 1.0);
    assert!((rate.c - 0.3).abs() < 1e-12);
}

#[test]
fn scan_verdict_is_scale_invariant() {
    let scale = 2.5;
    let base_family = ConcentrationFamily::equators();
    let base_schedule = EpsSchedule::power(1.0, 0.25).unwrap();
    let scaled_family = ConcentrationFamily::new(
        "sphere-equators-rescaled",
        Box::new(move |n, eps| {
            equator_complement_measure(n, (eps / scale).clamp(0.0, FRAC_PI_2))
        }),
        RicciModel::new(1.0 / (scale * scale), -1.0 / (scale * scale)).unwrap(),
        scale * FRAC_PI_2,
    )
    .unwrap();
    let scaled_schedule = EpsSchedule::power(scale, 0.25).unwrap();
    let range: Vec<u32> = (20..=400).step_by(20).collect();
    let base = scan_concentration(&base_family, &base_schedule, &range, 1e-3).unwrap();
    let scaled = scan_concentration(&scaled_family, &scaled_schedule, &range, 1e-3).unwrap();
    assert_eq!(base.verdict, scaled.verdict);
    for (b, s) in base.rows.iter().zip(&scaled.rows) {
        assert!((s.eps / b.eps - scale).abs() < 1e-12);
        assert!((b.complement - s.complement).abs() < 1e-12);
        assert!((b.bound - s.bound).abs() < 1e-8, "bounds {} vs {}", b.bound, s.bound);
    }
    let (bra, sra) = (base.rate.unwrap(), scaled.rate.unwrap());
    assert!((bra.k - sra.k).abs() < 1e-9);
    assert!((sra.c / bra.c - scale).abs() < 1e-9);
}

#[test]
fn shrinking_radius_complement_is_eventually_gaussian_dominated() {
    for n in [16u32, 256, 4096] {
        let eps = (n as f64).powf(-0.25);
        let complement = equator_complement_measure(n, eps).unwrap();
        let gaussian = (-eps * eps * n as f64 / 2.0).exp();
        assert!(complement <= gaussian, "n={n} complement={complement} gaussian={gaussian}");
    }
}

#[test]
fn scan_rejects_bad_inputs() {
    let family = ConcentrationFamily::equators();
    let schedule = EpsSchedule::constant(0.3).unwrap();
    assert!(scan_concentration(&family, &schedule, &[], 1e-3).is_err());
    assert!(scan_concentration(&family, &schedule, &[5, 5], 1e-3).is_err());
    assert!(scan_concentration(&family, &schedule, &[5, 3], 1e-3).is_err());
    assert!(scan_concentration(&family, &schedule, &[2, 4], 0.0).is_err());
    let growing = EpsSchedule::new(Box::new(|n| n as f64 / 100.0), None);
    assert!(scan_concentration(&family, &growing, &[2, 4, 8], 1e-3).is_err());
}

#[test]
fn family_constructor_enforces_invariants() {
    let model = RicciModel::new(1.0, 0.0).unwrap();
    let increasing = ConcentrationFamily::new(
        "bad",
        Box::new(|_, eps| Ok((eps / 2.0).min(1.0))),
        model,
        1.0,
    );
    assert!(increasing.is_err());
    let nonvanishing =
        ConcentrationFamily::new("bad", Box::new(|_, _| Ok(0.5)), model, 1.0);
    assert!(nonvanishing.is_err());
    let too_heavy = ConcentrationFamily::new(
        "bad",
        Box::new(|_, eps| Ok((1.5 * (1.0 - eps)).max(0.0))),
        model,
        1.0,
    );
    assert!(too_heavy.is_err());
    let bad_diameter = ConcentrationFamily::new(
        "bad",
        Box::new(|n, eps| equator_complement_measure(n, eps.clamp(0.0, FRAC_PI_2))),
        model,
        0.0,
    );
    assert!(bad_diameter.is_err());
}

#[test]
fn schedule_constructors_reject_bad_parameters() {
    assert!(EpsSchedule::power(0.0, 0.25).is_err());
    assert!(EpsSchedule::power(1.0, -0.1).is_err());
    assert!(EpsSchedule::constant(0.0).is_err());
    assert_eq!(EpsSchedule::power(2.0, 0.5).unwrap().claimed_rate(), Some(0.5));
    assert_eq!(EpsSchedule::constant(0.1).unwrap().claimed_rate(), Some(0.0));
    let schedule = EpsSchedule::power(2.0, 0.5).unwrap();
    assert!((schedule.value(4) - 1.0).abs() < 1e-15);
}

fn small_scan() -> ScanResult {
    let family = ConcentrationFamily::equators();
    let schedule = EpsSchedule::constant(0.4).unwrap();
    scan_concentration(&family, &schedule, &[2, 4, 8, 16, 32, 64], 1e-3).unwrap()
}

#[test]
fn scan_result_json_has_the_documented_shape() {
    let result = small_scan();
    let text = result.to_json().unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let object = value.as_object().unwrap();
    let mut keys: Vec<&str> = object.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["label", "rate", "rows", "verdict"]);
    let rows = object["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let mut row_keys: Vec<&str> =
        rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    row_keys.sort_unstable();
    assert_eq!(row_keys, ["bound", "complement", "eps", "n"]);
    let verdict = object["verdict"].as_str().unwrap();
    assert!(["locus", "not_locus", "inconclusive"].contains(&verdict));
    let mut rate_keys: Vec<&str> =
        object["rate"].as_object().unwrap().keys().map(String::as_str).collect();
    rate_keys.sort_unstable();
    assert_eq!(rate_keys, ["c", "k", "r2"]);
    let round_trip = ScanResult::from_json(&text).unwrap();
    assert_eq!(round_trip, result);
}

#[test]
fn scan_result_csv_has_the_documented_header() {
    let result = small_scan();
    let text = result.to_csv();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,eps,complement,bound");
    assert_eq!(lines.len(), result.rows.len() + 1);
    assert!(lines[1].starts_with("2,0.4,"));
    assert!(text.ends_with('\n'));
}
