use crate::config::ModelConfig;
use crate::disease::{
    build_prevalence_curve, BedSupply, CountyModel, CountyState, PrevalenceCurve,
};
use crate::error::Result;
use crate::interventions::ActionTimeline;
use crate::rounding::Rounder;
use crate::spatial::{seed_initial, ImportationLedger, SeedSchedule, SpreadNetwork};

use super::result::{CountyMeta, SimulationResult};

/// A run in progress, advanced one day at a time.
///
/// Each day applies that day's seeds, accumulates importation pressure from
/// yesterday's active cases, starts any county crossing the trigger
/// threshold, then steps every started county under the day's combined
/// intervention multiplier.
pub struct Simulation<'a> {
    config: &'a ModelConfig,
    network: &'a SpreadNetwork,
    curve: PrevalenceCurve,
    timeline: ActionTimeline,
    seeds: SeedSchedule,
    ledger: ImportationLedger,
    supplies: Vec<BedSupply>,
    states: Vec<CountyState>,
    day: u32,
}

impl<'a> Simulation<'a> {
    /// The network must have been built with `config.spread`.
    pub fn new(config: &'a ModelConfig, network: &'a SpreadNetwork) -> Result<Self> {
        config.validate().into_result()?;
        let curve = build_prevalence_curve(&config.disease)?;
        let (states, seeds) = seed_initial(network, &config.seeds)?;
        let supplies = network
            .counties()
            .iter()
            .map(|c| BedSupply {
                total_beds: c.total_beds,
                occupancy_fraction: config.occupancy_fraction,
            })
            .collect();
        Ok(Self {
            config,
            network,
            curve,
            timeline: config.timeline(),
            seeds,
            ledger: ImportationLedger::new(network.len()),
            supplies,
            states,
            day: 0,
        })
    }

    /// The next day to be simulated.
    pub fn day(&self) -> u32 {
        self.day
    }

    pub fn is_finished(&self) -> bool {
        self.day >= self.config.disease.horizon
    }

    pub fn states(&self) -> &[CountyState] {
        &self.states
    }

    pub fn pressure(&self) -> &[f64] {
        &self.ledger.pressure
    }

    pub fn bed_supply(&self, county: usize) -> BedSupply {
        self.supplies[county]
    }

    /// Simulates the current day and returns the end-of-day states.
    pub fn step(&mut self) -> Result<&[CountyState]> {
        let day = self.day;
        let cfg = self.config;
        self.seeds.apply(&mut self.states, day);
        self.ledger
            .accumulate(self.network, &self.states, cfg.air_enabled);
        self.ledger.trigger(
            &mut self.states,
            self.network.settings().trigger_threshold,
            day,
        );
        let multiplier = self.timeline.multiplier(day);
        let model = CountyModel::new(&cfg.disease, &self.curve, &cfg.age_groups);
        for (i, state) in self.states.iter_mut().enumerate() {
            let mut rounder = Rounder::new(cfg.rounding, cfg.rng_seed, day, i);
            model.advance(state, multiplier, self.supplies[i], day, &mut rounder)?;
        }
        self.day += 1;
        Ok(&self.states)
    }

    /// Runs the remaining days, recording a frame after each.
    pub fn run(mut self, scenario_id: impl Into<String>) -> Result<SimulationResult> {
        let meta = self
            .network
            .counties()
            .iter()
            .zip(&self.supplies)
            .map(|(c, b)| CountyMeta {
                fips: c.fips.clone(),
                name: c.name.clone(),
                population: c.total_population(),
                bed_capacity: b.capacity(),
            })
            .collect();
        let horizon = self.config.disease.horizon;
        let mut result = SimulationResult::with_capacity(scenario_id.into(), horizon, meta);
        while !self.is_finished() {
            result.record(self.step()?);
        }
        Ok(result)
    }
}

/// Runs a configuration over a network for the full horizon.
///
/// The network must have been built with `config.spread`; the caller owns
/// that pairing so a loaded network can be reused across runs.
pub fn simulate(
    scenario_id: impl Into<String>,
    config: &ModelConfig,
    network: &SpreadNetwork,
) -> Result<SimulationResult> {
    Simulation::new(config, network)?.run(scenario_id)
}
