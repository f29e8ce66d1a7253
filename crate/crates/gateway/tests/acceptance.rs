//! Acceptance suite. Each criterion prints one PASS or FAIL line; the test
//! fails if any criterion does.
//!
//! The report goes to stderr and is shown even without `--nocapture`.

mod common;

use std::io::Write;
use std::time::Instant;

use axum::http::StatusCode;
use common::{app, baseline, baseline_json, fixture_dir, get, parse_export, post};
use epiplan::disease::{build_prevalence_curve, DiseaseParams, PerGroup};
use epiplan::scenario::write_export;
use epiplan::spatial::{build_network, County, DensityClass, Edge, Seed, SpreadSettings};
use epiplan::{
    load_config, simulate, ActionSpec, DecisionAction, InputBundle, MeasureKind, Metric,
    ModelConfig, ScenarioStore, Simulation, SimulationResult,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const OKC: &str = "40109";
const TULSA: &str = "40143";

type Outcome = Result<String, String>;

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    let detail = detail.into();
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn inputs() -> InputBundle {
    InputBundle::load(&common::fixture_inputs()).unwrap()
}

fn fixture_config(name: &str) -> ModelConfig {
    load_config(fixture_dir().join(name)).unwrap().config
}

fn run_fixture(config: &ModelConfig) -> SimulationResult {
    let net = inputs().network(config.spread).unwrap();
    simulate("acceptance", config, &net).unwrap()
}

/// Forward-Euler SIR with a one-day step, written without reference to the
/// engine's curve builder.
fn sir_oracle(r0: f64, shedding: f64, i0: f64, days: usize) -> Vec<f64> {
    let (beta, gamma) = (r0 / shedding, 1.0 / shedding);
    let (mut s, mut i, mut total) = (1.0 - i0, i0, 0.0);
    (0..days)
        .map(|_| {
            let new = (beta * s * i).min(1.0 - i0 - total).max(0.0);
            let rec = gamma * i;
            s -= new;
            i += new - rec;
            total += new;
            new
        })
        .collect()
}

fn curve_oracle() -> Outcome {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for r0 in [0.5, 1.0, 1.5, 2.5, 4.0] {
        for shedding in [5u32, 7, 10] {
            let params = DiseaseParams {
                r0,
                shedding_period: shedding,
                horizon: 200,
                initial_infectious_fraction: 1e-4,
                ..DiseaseParams::default()
            };
            let curve = build_prevalence_curve(&params).unwrap();
            let oracle = sir_oracle(r0, f64::from(shedding), 1e-4, 200);
            for (a, b) in curve.daily_incidence().iter().zip(&oracle) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    check(
        worst <= 1e-12 && secs < 1.0,
        format!("max abs diff {worst:.1e} over 15 grid points in {secs:.3}s"),
    )
}

/// A random world of at most ten counties with a horizon of at most 120 days.
struct World {
    counties: Vec<County>,
    adjacency: Vec<Edge>,
    air: Vec<Edge>,
    config: ModelConfig,
}

impl World {
    fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=10usize);
        let horizon = rng.random_range(30..=120u32);
        let counties: Vec<County> = (0..n)
            .map(|i| {
                let mut pop = [0u64; 3].map(|_| rng.random_range(0..6000));
                if pop.iter().sum::<u64>() == 0 {
                    pop[1] = 1;
                }
                County {
                    fips: format!("C{i}"),
                    name: format!("County {i}"),
                    population: PerGroup(pop),
                    density_class: [
                        DensityClass::Rural,
                        DensityClass::Small,
                        DensityClass::Urban,
                    ][rng.random_range(0..3)],
                    total_beds: rng.random_range(0..400),
                    lat: 35.0,
                    lon: -97.0,
                    has_airport: rng.random_bool(0.5),
                }
            })
            .collect();
        let mut adjacency = Vec::new();
        let mut air = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(0.35) {
                    adjacency.push(Edge::new(format!("C{a}"), format!("C{b}")));
                }
                if counties[a].has_airport && counties[b].has_airport && rng.random_bool(0.3) {
                    air.push(Edge::new(format!("C{a}"), format!("C{b}")));
                }
            }
        }
        let incubation = rng.random_range(1..8);
        let disease = DiseaseParams {
            r0: rng.random_range(0.5..4.0),
            shedding_period: rng.random_range(2..10),
            incubation_period: incubation,
            time_to_death: incubation + rng.random_range(0..20),
            recovery_time: rng.random_range(1..25),
            mortality_rate: rng.random_range(0.0..0.05),
            hospitalization_rate: rng.random_range(0.0..0.3),
            days_in_hospital: rng.random_range(1..15),
            excess_mortality_multiplier: rng.random_range(1.0..4.0),
            horizon,
            ..DiseaseParams::default()
        };
        let actions = MeasureKind::ALL
            .into_iter()
            .filter(|_| rng.random_bool(0.4))
            .collect::<Vec<_>>()
            .into_iter()
            .map(|kind| DecisionAction {
                kind,
                start_day: rng.random_range(0..horizon),
                ramp_days: rng.random_range(0..15),
                reduction: rng.random_range(0.0..0.9),
            })
            .collect();
        let seeds = (0..rng.random_range(1..=2))
            .map(|_| Seed {
                fips: format!("C{}", rng.random_range(0..n)),
                day: rng.random_range(0..10).min(horizon - 1),
                cases: rng.random_range(1..60),
            })
            .collect();
        let config = ModelConfig {
            disease,
            spread: SpreadSettings {
                spread_rate: rng.random_range(0.0..6000.0),
                air_weight: rng.random_range(0.0..2.0),
                trigger_threshold: rng.random_range(0.1..3.0),
                ..SpreadSettings::default()
            },
            air_enabled: rng.random_bool(0.5),
            occupancy_fraction: rng.random_range(0.0..=1.0),
            seeds,
            actions,
            ..ModelConfig::default()
        };
        Self {
            counties,
            adjacency,
            air,
            config,
        }
    }

    fn run(&self, config: &ModelConfig) -> SimulationResult {
        let net = build_network(
            self.counties.clone(),
            &self.adjacency,
            Some(&self.air),
            config.spread,
        )
        .unwrap();
        simulate("w", config, &net).unwrap()
    }
}

fn conservation() -> Outcome {
    let mut checked_cells = 0u64;
    for seed in 0..200 {
        let w = World::random(seed);
        let net = build_network(
            w.counties.clone(),
            &w.adjacency,
            Some(&w.air),
            w.config.spread,
        )
        .unwrap();
        let mut sim = Simulation::new(&w.config, &net).unwrap();
        let n = net.len();
        let caps: Vec<u64> = (0..n).map(|i| sim.bed_supply(i).capacity()).collect();
        let mut prev = vec![(0u64, 0u64); n];
        while !sim.is_finished() {
            let day = sim.day();
            for (i, s) in sim.step().unwrap().iter().enumerate() {
                for g in epiplan::disease::AgeGroup::ALL {
                    if s.susceptible[g] + s.cumulative_sick[g] != s.population[g] {
                        return Err(format!(
                            "world {seed} day {day} county {i} {g}: population not conserved"
                        ));
                    }
                }
                let expected_cap =
                    (w.counties[i].total_beds as f64 * (1.0 - w.config.occupancy_fraction) + 1e-9)
                        .floor() as u64;
                if caps[i] != expected_cap || s.beds_filled > expected_cap {
                    return Err(format!(
                        "world {seed} day {day} county {i}: beds {} over cap {expected_cap}",
                        s.beds_filled
                    ));
                }
                let now = (s.cumulative_sick.total(), s.deaths.total());
                if now.0 < prev[i].0 || now.1 < prev[i].1 {
                    return Err(format!(
                        "world {seed} day {day} county {i}: cumulative metric decreased"
                    ));
                }
                prev[i] = now;
                checked_cells += 1;
            }
        }
    }
    Ok(format!(
        "200 random worlds, {checked_cells} county-days exact"
    ))
}

fn determinism() -> Outcome {
    let config = fixture_config("baseline.json");
    let export = || {
        let mut buf = Vec::new();
        write_export(&mut buf, &run_fixture(&config)).unwrap();
        buf
    };
    let (a, b) = (export(), export());
    if a != b {
        return Err("baseline exports differ".into());
    }

    let store = ScenarioStore::in_memory();
    let parent = store.create(config, None).unwrap();
    let shelter = ActionSpec {
        kind: MeasureKind::ShelterInPlace,
        start_day: 15,
        ramp_days: None,
        reduction: None,
    };
    let child = store.branch(&parent.id, 15, &[shelter]).unwrap();
    let net = |s: &epiplan::Scenario| inputs().network(s.config.spread);
    let p = store.run(&parent.id, net).unwrap().result;
    let c = store.run(&child.id, net).unwrap().result;
    let prefix_equal = (0..15).all(|d| {
        Metric::ALL
            .iter()
            .all(|&m| p.day_slice(m, d) == c.day_slice(m, d))
    });
    check(
        prefix_equal,
        format!(
            "export {} bytes identical twice; branch at day 15 prefix identical",
            a.len()
        ),
    )
}

fn interventions() -> Outcome {
    let mut compared = 0;
    for seed in 1000..1100u64 {
        let w = World::random(seed);
        let Some(kind) = MeasureKind::ALL
            .into_iter()
            .find(|k| w.config.actions.iter().all(|a| a.kind != *k))
        else {
            continue;
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let horizon = w.config.disease.horizon;
        let start = rng.random_range(1..horizon);
        let action = |start_day| DecisionAction {
            kind,
            start_day,
            ramp_days: 3,
            reduction: 0.4,
        };
        let with = |a: DecisionAction| {
            let mut c = w.config.clone();
            c.actions.push(a);
            w.run(&c)
        };
        let base = w.run(&w.config);
        let late = with(action(start));
        for d in start..horizon {
            for i in 0..base.county_count() {
                if late.value(Metric::CumulativeSick, d, i)
                    > base.value(Metric::CumulativeSick, d, i)
                {
                    return Err(format!(
                        "world {seed}: adding {kind} raised cumulative_sick on day {d}"
                    ));
                }
            }
        }
        let early = with(action(start / 2));
        let last = horizon - 1;
        for i in 0..base.county_count() {
            if early.value(Metric::CumulativeSick, last, i)
                > late.value(Metric::CumulativeSick, last, i)
            {
                return Err(format!(
                    "world {seed}: earlier {kind} raised final cumulative_sick"
                ));
            }
        }
        compared += 1;
    }

    let peak = |day| {
        let mut c = fixture_config("baseline.json");
        c.actions.push(DecisionAction::with_defaults(
            MeasureKind::ShelterInPlace,
            day,
        ));
        run_fixture(&c).summary().peak_sick_count
    };
    let (p10, p15) = (peak(10), peak(15));
    check(
        p10 < p15,
        format!("{compared} random worlds monotone; shelter day 10 peak {p10} < day 15 peak {p15}"),
    )
}

fn air_travel() -> Outcome {
    let mut config = fixture_config("baseline.json");
    let with_air = run_fixture(&config).first_infection_day(TULSA);
    config.air_enabled = false;
    let land_only = run_fixture(&config).first_infection_day(TULSA);
    match (with_air, land_only) {
        (Some(a), Some(l)) => check(
            a < l,
            format!("Tulsa first infected day {a} with air, day {l} without"),
        ),
        other => Err(format!("Tulsa never infected: {other:?}")),
    }
}

fn banded_reproduction() -> Outcome {
    let config = fixture_config("baseline.json");
    let net = inputs().network(config.spread).unwrap();
    let started = Instant::now();
    let r = simulate("baseline", &config, &net).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let s = r.summary();

    let beds = run_fixture(&fixture_config("bed_pressure.json"));
    let (okc, tulsa) = (
        beds.first_saturation_day(OKC),
        beds.first_saturation_day(TULSA),
    );
    let beds_ok = matches!((okc, tulsa), (Some(o), Some(t)) if o < t && t - o <= 10);
    let show = |d: Option<u32>| d.map_or("never".to_string(), |d| format!("day {d}"));

    check(
        (20..=45).contains(&s.peak_sick_day)
            && (55..=100).contains(&s.outbreak_duration)
            && beds_ok
            && secs < 1.0,
        format!(
            "peak day {}, duration {} days, beds saturate OKC {} then Tulsa {}, run {secs:.3}s",
            s.peak_sick_day,
            s.outbreak_duration,
            show(okc),
            show(tulsa)
        ),
    )
}

async fn gateway_contract() -> Outcome {
    let app = app();
    let id = baseline(&app).await;
    let export = get(&app, &format!("/v1/scenarios/{id}/export.csv"))
        .await
        .text();
    let (header, rows) = parse_export(&export);
    let n = 77;
    let mut cells = 0;
    for metric in [
        "new_sick",
        "cumulative_sick",
        "active_sick",
        "hospital_demand",
        "beds_filled",
        "unmet_demand",
        "new_deaths",
        "cumulative_deaths",
    ] {
        let col = header.iter().position(|h| h == metric).unwrap();
        for day in [0usize, 10, 41, 120, 199] {
            let f = get(
                &app,
                &format!("/v1/scenarios/{id}/frames/{day}?metric={metric}"),
            )
            .await
            .json();
            for (i, v) in f["values"].as_array().unwrap().iter().enumerate() {
                if v["value"].as_u64().unwrap().to_string() != rows[day * n + i][col] {
                    return Err(format!(
                        "frame {metric} day {day} county {i} differs from export"
                    ));
                }
                cells += 1;
            }
        }
        let s = get(
            &app,
            &format!("/v1/scenarios/{id}/series?counties={OKC},{TULSA}&metric={metric}"),
        )
        .await
        .json();
        for entry in s.as_array().unwrap() {
            let i = (0..n).find(|&i| rows[i][1] == entry["fips"]).unwrap();
            for (day, v) in entry["values"].as_array().unwrap().iter().enumerate() {
                if v.as_u64().unwrap().to_string() != rows[day * n + i][col] {
                    return Err(format!(
                        "series {metric} day {day} county {i} differs from export"
                    ));
                }
                cells += 1;
            }
        }
    }
    let bad = post(
        &app,
        &format!("/v1/scenarios/{id}/branch"),
        json!({ "branch_day": 20, "actions": [{ "kind": "shelter_in_place", "start_day": 19 }] }),
    )
    .await;
    if bad.status != StatusCode::CONFLICT {
        return Err(format!("history-violating branch gave {}", bad.status));
    }
    let rerun = post(&app, &format!("/v1/scenarios/{id}/run"), json!({}))
        .await
        .json();
    let export_again = get(&app, &format!("/v1/scenarios/{id}/export.csv"))
        .await
        .text();
    check(
        rerun["cached"] == json!(true) && export_again == export,
        format!("{cells} frame and series cells equal export; 409 on history; rerun cached"),
    )
}

#[tokio::test(flavor = "multi_thread")]
async fn primary_criteria() {
    let suite = Instant::now();
    let _ = baseline_json();
    let mut results: Vec<(&str, Outcome)> = vec![
        ("curve oracle", curve_oracle()),
        ("conservation", conservation()),
        ("determinism", determinism()),
        ("intervention properties", interventions()),
        ("air travel", air_travel()),
        ("banded reproduction", banded_reproduction()),
    ];
    results.push(("gateway contract", gateway_contract().await));
    let secs = suite.elapsed().as_secs_f64();
    results.push(("suite runtime", check(secs < 60.0, format!("{secs:.1}s"))));

    // Written to the raw stderr handle so the report shows up even when the
    // harness captures test output.
    let mut report = std::io::stderr().lock();
    writeln!(report).unwrap();
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => writeln!(report, "PASS {name}: {detail}").unwrap(),
            Err(detail) => {
                failed += 1;
                writeln!(report, "FAIL {name}: {detail}").unwrap();
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
