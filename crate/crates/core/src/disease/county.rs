use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::disease::beds::{allocate_beds, bed_capacity};
use crate::disease::{AgeGroup, AgeGroupProfiles, DiseaseParams, PerGroup, PrevalenceCurve};
use crate::error::{Error, Result};
use crate::rounding::Rounder;

/// Events due on one absolute day.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledEvents {
    /// Infection cohorts reaching symptom onset. Hospital demand, deaths and
    /// recoveries for the cohort are decided on this day.
    pub onsets: PerGroup<u64>,
    pub deaths: PerGroup<u64>,
    pub recoveries: PerGroup<u64>,
    /// Patients leaving their hospital stay window.
    pub hospital_exits: u64,
}

/// Flows recorded during the most recent step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyFlows {
    pub new_sick: PerGroup<u64>,
    pub new_hospitalizations: u64,
    pub new_deaths: u64,
    pub new_recoveries: u64,
}

/// Where hospital demand can be placed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BedSupply {
    pub total_beds: u64,
    pub occupancy_fraction: f64,
}

impl BedSupply {
    pub fn capacity(&self) -> u64 {
        bed_capacity(self.total_beds, self.occupancy_fraction)
    }
}

/// Compartment counts and scheduled events for one county.
///
/// Susceptible people move into `cumulative_sick` when infected and stay
/// there; recovered and dead people are tracked as subsets of it, so
/// `active_sick = cumulative_sick − recovered − deaths`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountyState {
    pub fips: String,
    pub population: PerGroup<u64>,
    pub outbreak_start_day: Option<u32>,
    /// Days since the local outbreak began. Meaningful only once started.
    pub local_day: u32,
    pub susceptible: PerGroup<u64>,
    pub cumulative_sick: PerGroup<u64>,
    pub recovered: PerGroup<u64>,
    pub deaths: PerGroup<u64>,
    /// People inside their hospital stay window, with or without a bed.
    pub hospital_demand: u64,
    pub beds_filled: u64,
    /// `hospital_demand − beds_filled`.
    pub unmet_demand: u64,
    pub today: DailyFlows,
    /// Cases imported by seeding, turned into a cohort on the next step.
    pub pending_introductions: PerGroup<u64>,
    pub pipeline: BTreeMap<u32, ScheduledEvents>,
}

impl CountyState {
    pub fn new(fips: impl Into<String>, population: PerGroup<u64>) -> Self {
        Self {
            fips: fips.into(),
            population,
            outbreak_start_day: None,
            local_day: 0,
            susceptible: population,
            cumulative_sick: PerGroup::default(),
            recovered: PerGroup::default(),
            deaths: PerGroup::default(),
            hospital_demand: 0,
            beds_filled: 0,
            unmet_demand: 0,
            today: DailyFlows::default(),
            pending_introductions: PerGroup::default(),
            pipeline: BTreeMap::new(),
        }
    }

    pub fn outbreak_started(&self) -> bool {
        self.outbreak_start_day.is_some()
    }

    /// Starts the local outbreak clock at `day`. No-op if already started.
    pub fn start_outbreak(&mut self, day: u32) {
        if self.outbreak_start_day.is_none() {
            self.outbreak_start_day = Some(day);
            self.local_day = 0;
        }
    }

    /// Queues imported cases; they are infected during the next step.
    pub fn introduce(&mut self, cases: PerGroup<u64>) {
        for g in AgeGroup::ALL {
            self.pending_introductions[g] += cases[g];
        }
    }

    pub fn total_population(&self) -> u64 {
        self.population.total()
    }

    pub fn active_sick(&self) -> u64 {
        self.cumulative_sick.total() - self.recovered.total() - self.deaths.total()
    }
    /// Checks that the population is conserved and the bed cap holds.
    /// Checks population conservation against the bed cap and event ordering.
    pub fn check_invariants(&self, capacity: u64) -> Result<(), String> {
        for g in AgeGroup::ALL {
            if self.susceptible[g] + self.cumulative_sick[g] != self.population[g] {
                return Err(format!(
                    "{} {g}: susceptible {} + cumulative_sick {} != population {}",
                    self.fips, self.susceptible[g], self.cumulative_sick[g], self.population[g]
                ));
            }
            if self.recovered[g] + self.deaths[g] > self.cumulative_sick[g] {
                return Err(format!("{} {g}: more removed than ever sick", self.fips));
            }
        }
        if self.beds_filled > capacity {
            return Err(format!(
                "{}: beds_filled {} exceeds capacity {capacity}",
                self.fips, self.beds_filled
            ));
        }
        if self.unmet_demand != self.hospital_demand.saturating_sub(capacity) {
            return Err(format!(
                "{}: unmet {} != max(0, demand {} - capacity {capacity})",
                self.fips, self.unmet_demand, self.hospital_demand
            ));
        }
        Ok(())
    }

    fn schedule(&mut self, day: u32) -> &mut ScheduledEvents {
        self.pipeline.entry(day).or_default()
    }
}

/// Everything a county step needs besides the state itself.
#[derive(Debug, Clone, Copy)]
pub struct CountyModel<'a> {
    pub params: &'a DiseaseParams,
    pub curve: &'a PrevalenceCurve,
    pub profiles: &'a AgeGroupProfiles,
}

impl<'a> CountyModel<'a> {
    pub fn new(
        params: &'a DiseaseParams,
        curve: &'a PrevalenceCurve,
        profiles: &'a AgeGroupProfiles,
    ) -> Self {
        Self {
            params,
            curve,
            profiles,
        }
    }

    /// Real-valued new infections per group before rounding.
    pub fn expected_infections(
        &self,
        state: &CountyState,
        intervention_multiplier: f64,
    ) -> Result<PerGroup<f64>> {
        let incidence = self
            .curve
            .get(state.local_day)
            .ok_or(Error::HorizonExceeded {
                local_day: state.local_day,
                len: self.curve.len(),
            })?;
        let mut out = PerGroup::splat(0.0);
        for g in AgeGroup::ALL {
            out[g] = state.susceptible[g] as f64
                * incidence
                * self.profiles[g].prevalence_multiplier
                * intervention_multiplier;
        }
        Ok(out)
    }

    /// Value-semantics wrapper around [`CountyModel::advance`].
    pub fn step(
        &self,
        state: &CountyState,
        intervention_multiplier: f64,
        beds: BedSupply,
        day: u32,
        rounder: &mut Rounder,
    ) -> Result<CountyState> {
        let mut next = state.clone();
        self.advance(&mut next, intervention_multiplier, beds, day, rounder)?;
        Ok(next)
    }

    /// Advances a started county by one day in place.
    ///
    /// A county whose outbreak has not started is left untouched apart from
    /// clearing its daily flows.
    pub fn advance(
        &self,
        state: &mut CountyState,
        intervention_multiplier: f64,
        beds: BedSupply,
        day: u32,
        rounder: &mut Rounder,
    ) -> Result<()> {
        state.today = DailyFlows::default();
        if !state.outbreak_started() {
            return Ok(());
        }
        debug_assert!(
            intervention_multiplier > 0.0 && intervention_multiplier <= 1.0,
            "intervention multiplier {intervention_multiplier} outside (0, 1]"
        );
        let expected = self.expected_infections(state, intervention_multiplier)?;

        let mut cohort = PerGroup::<u64>::default();
        let introduced = std::mem::take(&mut state.pending_introductions);
        for g in AgeGroup::ALL {
            let imported = introduced[g].min(state.susceptible[g]);
            state.susceptible[g] -= imported;
            let infected = rounder.round(expected[g]).min(state.susceptible[g]);
            state.susceptible[g] -= infected;
            cohort[g] = imported + infected;
            state.cumulative_sick[g] += cohort[g];
        }
        state.today.new_sick = cohort;
        if cohort.total() > 0 {
            let e = state.schedule(day + self.params.incubation_period);
            e.onsets = add(e.onsets, cohort);
        }

        if let Some(due) = state.pipeline.remove(&day) {
            state.hospital_demand -= due.hospital_exits;
            self.remove_people(state, &due);
            self.process_onsets(state, due.onsets, beds, day, rounder);
            // Onsets may schedule same-day deaths or recoveries.
            if let Some(same_day) = state.pipeline.remove(&day) {
                self.remove_people(state, &same_day);
            }
        }
        let capacity = beds.capacity();
        state.beds_filled = state.hospital_demand.min(capacity);
        state.unmet_demand = state.hospital_demand - state.beds_filled;

        state.local_day += 1;
        Ok(())
    }

    fn remove_people(&self, state: &mut CountyState, due: &ScheduledEvents) {
        for g in AgeGroup::ALL {
            state.deaths[g] += due.deaths[g];
            state.recovered[g] += due.recoveries[g];
        }
        state.today.new_deaths += due.deaths.total();
        state.today.new_recoveries += due.recoveries.total();
    }

    fn process_onsets(
        &self,
        state: &mut CountyState,
        onsets: PerGroup<u64>,
        beds: BedSupply,
        day: u32,
        rounder: &mut Rounder,
    ) {
        if onsets.total() == 0 {
            return;
        }
        let p = self.params;
        let mut arrivals = PerGroup::<u64>::default();
        for g in AgeGroup::ALL {
            let frac =
                (p.hospitalization_rate * self.profiles[g].hospitalization_multiplier).min(1.0);
            arrivals[g] = rounder.round(onsets[g] as f64 * frac).min(onsets[g]);
        }
        let demand = arrivals.total();

        // Patients already waiting take beds freed by today's exits first.
        let capacity = beds.capacity();
        let occupied = state.hospital_demand.min(capacity);
        let placed = allocate_beds(demand, occupied, beds.total_beds, beds.occupancy_fraction);
        state.hospital_demand += demand;
        state.today.new_hospitalizations += demand;
        if demand > 0 {
            state.schedule(day + p.days_in_hospital).hospital_exits += demand;
        }

        let unmet_share = if demand > 0 {
            placed.unmet as f64 / demand as f64
        } else {
            0.0
        };
        let severity = 1.0 + unmet_share * (p.excess_mortality_multiplier - 1.0);
        let death_day = day + (p.time_to_death - p.incubation_period);
        let recovery_day = day + p.recovery_time.saturating_sub(p.incubation_period);
        let mut deaths = PerGroup::<u64>::default();
        let mut recoveries = PerGroup::<u64>::default();
        for g in AgeGroup::ALL {
            let frac = (p.mortality_rate * self.profiles[g].mortality_multiplier).min(1.0);
            deaths[g] = rounder
                .round(onsets[g] as f64 * frac * severity)
                .min(onsets[g]);
            recoveries[g] = onsets[g] - deaths[g];
        }
        if deaths.total() > 0 {
            let e = state.schedule(death_day);
            e.deaths = add(e.deaths, deaths);
        }
        if recoveries.total() > 0 {
            let e = state.schedule(recovery_day);
            e.recoveries = add(e.recoveries, recoveries);
        }
    }
}

fn add(a: PerGroup<u64>, b: PerGroup<u64>) -> PerGroup<u64> {
    PerGroup([a.0[0] + b.0[0], a.0[1] + b.0[1], a.0[2] + b.0[2]])
}

/// Free-function form of [`CountyModel::step`].
#[allow(clippy::too_many_arguments)]
pub fn step_county(
    state: &CountyState,
    params: &DiseaseParams,
    curve: &PrevalenceCurve,
    profiles: &AgeGroupProfiles,
    intervention_multiplier: f64,
    beds: BedSupply,
    absolute_day: u32,
    rounder: &mut Rounder,
) -> Result<CountyState> {
    CountyModel::new(params, curve, profiles).step(
        state,
        intervention_multiplier,
        beds,
        absolute_day,
        rounder,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_profiles() -> AgeGroupProfiles {
        PerGroup::splat(crate::disease::AgeGroupProfile {
            prevalence_multiplier: 1.0,
            hospitalization_multiplier: 1.0,
            mortality_multiplier: 1.0,
        })
    }

    fn started(pop: [u64; 3]) -> CountyState {
        let mut s = CountyState::new("00001", PerGroup(pop));
        s.start_outbreak(0);
        s
    }

    const BEDS: BedSupply = BedSupply {
        total_beds: 1000,
        occupancy_fraction: 0.7,
    };

    #[test]
    fn no_susceptibles_means_no_infections_but_pipeline_drains() {
        let params = DiseaseParams::default();
        let curve = PrevalenceCurve::from(vec![0.5; 40]);
        let profiles = flat_profiles();
        let model = CountyModel::new(&params, &curve, &profiles);

        let mut s = started([0, 100, 0]);
        s.introduce(PerGroup([0, 100, 0]));
        let mut r = Rounder::half_even();
        model.advance(&mut s, 1.0, BEDS, 0, &mut r).unwrap();
        assert_eq!(s.susceptible.total(), 0);
        assert_eq!(s.active_sick(), 100);

        for day in 1..30 {
            model.advance(&mut s, 1.0, BEDS, day, &mut r).unwrap();
            assert_eq!(s.today.new_sick.total(), 0);
        }
        assert!(s.pipeline.is_empty());
        assert_eq!(s.active_sick(), 0);
        assert_eq!(s.recovered.total() + s.deaths.total(), 100);
        assert_eq!(s.hospital_demand, 0);
    }

    #[test]
    fn halving_the_multiplier_halves_expected_infections() {
        let params = DiseaseParams::default();
        let curve = PrevalenceCurve::from(vec![0.013; 10]);
        let profiles = AgeGroupProfiles::default();
        let model = CountyModel::new(&params, &curve, &profiles);
        let s = started([1234, 5678, 910]);
        let full = model.expected_infections(&s, 1.0).unwrap();
        let half = model.expected_infections(&s, 0.5).unwrap();
        for g in AgeGroup::ALL {
            assert_eq!(half[g], full[g] * 0.5);
        }
    }

    #[test]
    fn step_does_not_mutate_input() {
        let params = DiseaseParams::default();
        let curve = PrevalenceCurve::from(vec![0.1; 10]);
        let profiles = flat_profiles();
        let s = started([100, 100, 100]);
        let before = s.clone();
        let next = step_county(
            &s,
            &params,
            &curve,
            &profiles,
            1.0,
            BEDS,
            0,
            &mut Rounder::half_even(),
        )
        .unwrap();
        assert_eq!(s, before);
        assert_eq!(next.local_day, 1);
        assert_eq!(next.today.new_sick.total(), 30);
    }

    #[test]
    fn stepping_past_the_curve_is_an_error() {
        let params = DiseaseParams::default();
        let curve = PrevalenceCurve::from(vec![0.1; 2]);
        let profiles = flat_profiles();
        let model = CountyModel::new(&params, &curve, &profiles);
        let mut s = started([10, 10, 10]);
        let mut r = Rounder::half_even();
        model.advance(&mut s, 1.0, BEDS, 0, &mut r).unwrap();
        model.advance(&mut s, 1.0, BEDS, 1, &mut r).unwrap();
        let err = model.advance(&mut s, 1.0, BEDS, 2, &mut r).unwrap_err();
        assert!(matches!(
            err,
            Error::HorizonExceeded {
                local_day: 2,
                len: 2
            }
        ));
    }

    #[test]
    fn unstarted_county_is_inert() {
        let params = DiseaseParams::default();
        let curve = PrevalenceCurve::from(vec![0.1; 5]);
        let profiles = flat_profiles();
        let model = CountyModel::new(&params, &curve, &profiles);
        let mut s = CountyState::new("x", PerGroup([5, 5, 5]));
        model
            .advance(&mut s, 1.0, BEDS, 0, &mut Rounder::half_even())
            .unwrap();
        assert_eq!(s.local_day, 0);
        assert_eq!(s.cumulative_sick.total(), 0);
    }

    #[test]
    fn bed_shortage_raises_deaths() {
        let params = DiseaseParams {
            hospitalization_rate: 0.5,
            mortality_rate: 0.1,
            excess_mortality_multiplier: 3.0,
            ..DiseaseParams::default()
        };
        let curve = PrevalenceCurve::from(vec![0.0; 60]);
        let profiles = flat_profiles();
        let model = CountyModel::new(&params, &curve, &profiles);
        let run = |total_beds| {
            let mut s = started([0, 1000, 0]);
            s.introduce(PerGroup([0, 1000, 0]));
            let beds = BedSupply {
                total_beds,
                occupancy_fraction: 0.0,
            };
            let mut r = Rounder::half_even();
            for day in 0..40 {
                model.advance(&mut s, 1.0, beds, day, &mut r).unwrap();
                s.check_invariants(beds.capacity()).unwrap();
            }
            s.deaths.total()
        };
        // Ample beds: 10% die. No beds: 100 * 3 = 300 die.
        assert_eq!(run(10_000), 100);
        assert_eq!(run(0), 300);
        // 250 of 500 patients placed: severity 1 + 0.5 * 2 = 2.
        assert_eq!(run(250), 200);
    }
}
