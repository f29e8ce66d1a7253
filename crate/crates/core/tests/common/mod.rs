#![allow(dead_code)]

use std::path::PathBuf;

use epiplan::disease::{DiseaseParams, PerGroup};
use epiplan::spatial::{
    build_network, County, DensityClass, Edge, Seed, SpreadNetwork, SpreadSettings,
};
use epiplan::{DecisionAction, InputBundle, InputPaths, MeasureKind, ModelConfig};
use proptest::prelude::*;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/oklahoma")
}

pub fn oklahoma_inputs() -> InputBundle {
    let d = fixture_dir();
    InputBundle::load(&InputPaths {
        counties: d.join("counties.csv"),
        adjacency: d.join("adjacency.csv"),
        air_routes: Some(d.join("air_routes.csv")),
        geometry: None,
    })
    .expect("fixture loads")
}

pub fn baseline_config() -> ModelConfig {
    epiplan::load_config(fixture_dir().join("baseline.json"))
        .expect("baseline config")
        .config
}

/// A small random world with its own edges and configuration.
#[derive(Debug, Clone)]
pub struct World {
    pub counties: Vec<County>,
    pub adjacency: Vec<Edge>,
    pub air: Vec<Edge>,
    pub config: ModelConfig,
}

impl World {
    pub fn network(&self) -> SpreadNetwork {
        build_network(
            self.counties.clone(),
            &self.adjacency,
            Some(&self.air),
            self.config.spread,
        )
        .expect("generated network is valid")
    }

    pub fn fips(i: usize) -> String {
        format!("C{i}")
    }
}

fn arb_county(i: usize) -> impl Strategy<Value = County> {
    (
        prop::array::uniform3(0u64..6000),
        0usize..3,
        0u64..400,
        any::<bool>(),
    )
        .prop_map(move |(mut pop, class, beds, has_airport)| {
            if pop.iter().sum::<u64>() == 0 {
                pop[1] = 1;
            }
            County {
                fips: World::fips(i),
                name: format!("County {i}"),
                population: PerGroup(pop),
                density_class: [
                    DensityClass::Rural,
                    DensityClass::Small,
                    DensityClass::Urban,
                ][class],
                total_beds: beds,
                lat: 35.0,
                lon: -97.0,
                has_airport,
            }
        })
}

pub fn arb_params(horizon: u32) -> impl Strategy<Value = DiseaseParams> {
    (
        (0.5f64..4.0, 2u32..10, 1u32..8, 0u32..20, 1u32..25),
        (0.0f64..0.05, 0.0f64..0.3, 1u32..15, 1.0f64..4.0),
    )
        .prop_map(
            move |((r0, shed, inc, extra, rec), (mort, hosp, stay, excess))| DiseaseParams {
                r0,
                shedding_period: shed,
                incubation_period: inc,
                time_to_death: inc + extra,
                recovery_time: rec,
                mortality_rate: mort,
                hospitalization_rate: hosp,
                days_in_hospital: stay,
                excess_mortality_multiplier: excess,
                horizon,
                ..DiseaseParams::default()
            },
        )
}

/// Up to one action per measure kind, so the timeline multiplier is
/// non-increasing in time.
pub fn arb_actions(horizon: u32) -> impl Strategy<Value = Vec<DecisionAction>> {
    prop::array::uniform3(prop::option::of((0..horizon, 0u32..15, 0.0f64..0.9))).prop_map(|slots| {
        slots
            .into_iter()
            .zip(MeasureKind::ALL)
            .filter_map(|(s, kind)| {
                s.map(|(start_day, ramp_days, reduction)| DecisionAction {
                    kind,
                    start_day,
                    ramp_days,
                    reduction,
                })
            })
            .collect()
    })
}

pub fn arb_world() -> impl Strategy<Value = World> {
    (1usize..=10, 30u32..=120).prop_flat_map(|(n, horizon)| {
        let counties: Vec<_> = (0..n).map(arb_county).collect();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        let np = pairs.len();
        (
            counties,
            prop::collection::vec(prop::bool::weighted(0.35), np),
            prop::collection::vec(prop::bool::weighted(0.3), np),
            prop::collection::vec((0..n, 0u32..10, 1u64..60), 1..=2),
            arb_params(horizon),
            arb_actions(horizon),
            (
                0.0f64..6000.0,
                0.0f64..2.0,
                0.1f64..3.0,
                0.0f64..=1.0,
                any::<bool>(),
            ),
        )
            .prop_map(
                move |(counties, land, air, seeds, disease, actions, knobs)| {
                    let (spread_rate, air_weight, trigger_threshold, occupancy, air_enabled) =
                        knobs;
                    let pick = |mask: &[bool], need_airports: bool| -> Vec<Edge> {
                        pairs
                            .iter()
                            .zip(mask)
                            .filter(|(&(a, b), &on)| {
                                on && (!need_airports
                                    || (counties[a].has_airport && counties[b].has_airport))
                            })
                            .map(|(&(a, b), _)| Edge::new(World::fips(a), World::fips(b)))
                            .collect()
                    };
                    let adjacency = pick(&land, false);
                    let air = pick(&air, true);
                    let config = ModelConfig {
                        disease,
                        spread: SpreadSettings {
                            spread_rate,
                            air_weight,
                            trigger_threshold,
                            ..SpreadSettings::default()
                        },
                        air_enabled,
                        occupancy_fraction: occupancy,
                        seeds: seeds
                            .into_iter()
                            .map(|(c, day, cases)| Seed {
                                fips: World::fips(c),
                                day: day.min(horizon - 1),
                                cases,
                            })
                            .collect(),
                        actions,
                        ..ModelConfig::default()
                    };
                    World {
                        counties: counties.clone(),
                        adjacency,
                        air,
                        config,
                    }
                },
            )
    })
}
