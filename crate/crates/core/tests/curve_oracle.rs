//! The prevalence curve against a separately written SIR integrator.

use std::time::Instant;

use epiplan::disease::{build_prevalence_curve, DiseaseParams};
use proptest::prelude::*;

/// Straightforward forward-Euler SIR with a unit time step. Daily incidence
/// is `β·S·I`, limited by the susceptibles still available.
fn sir_oracle(r0: f64, shedding: f64, i0: f64, days: usize) -> Vec<f64> {
    let beta = r0 / shedding;
    let gamma = 1.0 / shedding;
    let (mut s, mut i) = (1.0 - i0, i0);
    let mut infected_so_far = 0.0;
    let mut out = Vec::new();
    for _ in 0..days {
        let mut new_inf = beta * s * i;
        let room = (1.0 - i0) - infected_so_far;
        if new_inf > room {
            new_inf = room;
        }
        if new_inf < 0.0 {
            new_inf = 0.0;
        }
        let new_rec = gamma * i;
        s -= new_inf;
        i = i + new_inf - new_rec;
        infected_so_far += new_inf;
        out.push(new_inf);
    }
    out
}

fn params(r0: f64, shedding: u32, horizon: u32) -> DiseaseParams {
    DiseaseParams {
        r0,
        shedding_period: shedding,
        horizon,
        initial_infectious_fraction: 1e-4,
        ..DiseaseParams::default()
    }
}

#[test]
fn matches_oracle_on_grid() {
    let started = Instant::now();
    for r0 in [0.5, 1.0, 1.5, 2.5, 4.0] {
        for shedding in [5u32, 7, 10] {
            let curve = build_prevalence_curve(&params(r0, shedding, 200)).unwrap();
            let oracle = sir_oracle(r0, f64::from(shedding), 1e-4, 200);
            assert_eq!(curve.len(), oracle.len());
            for (t, (a, b)) in curve.daily_incidence().iter().zip(&oracle).enumerate() {
                assert!(
                    (a - b).abs() <= 1e-12,
                    "r0={r0} shedding={shedding} day {t}: {a} vs {b}"
                );
            }
        }
    }
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn moderate_epidemic_peaks_between_day_20_and_60() {
    let curve = build_prevalence_curve(&params(2.5, 7, 200)).unwrap();
    let peak = curve.peak_day().unwrap();
    assert!((20..=60).contains(&peak), "peak on day {peak}");
}

#[test]
fn subcritical_curve_decays() {
    let c = build_prevalence_curve(&params(0.5, 5, 100)).unwrap();
    assert_eq!(c.peak_day(), Some(0));
    assert!(c.total() < 1e-3);
}

proptest! {
    #[test]
    fn attack_rate_non_decreasing_in_r0(
        r0 in 0.0f64..6.0,
        bump in 0.0f64..2.0,
        shedding in 2u32..14,
    ) {
        let low = build_prevalence_curve(&params(r0, shedding, 300)).unwrap().total();
        let high = build_prevalence_curve(&params(r0 + bump, shedding, 300)).unwrap().total();
        prop_assert!(high >= low - 1e-12, "r0 {r0} -> {low}, r0 {} -> {high}", r0 + bump);
    }

    #[test]
    fn cumulative_never_exceeds_susceptible_pool(r0 in 0.0f64..20.0, shedding in 1u32..14) {
        let c = build_prevalence_curve(&params(r0, shedding, 200)).unwrap();
        prop_assert!(c.total() <= 1.0 - 1e-4 + 1e-12);
        prop_assert!(c.daily_incidence().iter().all(|&x| x >= 0.0));
    }
}
