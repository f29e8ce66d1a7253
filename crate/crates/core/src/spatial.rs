//! Between-county spread: the county graph, importation pressure, outbreak
//! triggering, and initial seeding.
//!
//! Each county that has not yet started its local outbreak accumulates
//! pressure from every started neighbour `i`:
//!
//! ```text
//! pressure_j += spread_rate × modifier(i) × modifier(j) × weight × active_sick_i / population_i
//! ```
//!
//! where `weight` is 1 for land adjacency and `air_weight` for an air route
//! (counted only while air travel is enabled). A county starts its outbreak on
//! the first day its pressure reaches the trigger threshold. Terms are summed
//! in ascending county index so runs are bitwise reproducible.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::disease::{AgeGroup, CountyState, PerGroup};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityClass {
    Rural,
    Small,
    Urban,
}

impl DensityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DensityClass::Rural => "rural",
            DensityClass::Small => "small",
            DensityClass::Urban => "urban",
        }
    }
}

impl fmt::Display for DensityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DensityClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rural" => Ok(DensityClass::Rural),
            "small" => Ok(DensityClass::Small),
            "urban" => Ok(DensityClass::Urban),
            other => Err(format!(
                "unknown density class {other:?} (expected rural, small or urban)"
            )),
        }
    }
}

/// Spread-rate multiplier per density class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityModifiers {
    pub rural: f64,
    pub small: f64,
    pub urban: f64,
}

impl Default for DensityModifiers {
    fn default() -> Self {
        Self {
            rural: 0.6,
            small: 1.0,
            urban: 1.5,
        }
    }
}

impl DensityModifiers {
    pub fn get(&self, class: DensityClass) -> f64 {
        match class {
            DensityClass::Rural => self.rural,
            DensityClass::Small => self.small,
            DensityClass::Urban => self.urban,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct County {
    pub fips: String,
    pub name: String,
    pub population: PerGroup<u64>,
    pub density_class: DensityClass,
    pub total_beds: u64,
    pub lat: f64,
    pub lon: f64,
    pub has_airport: bool,
}

impl County {
    pub fn total_population(&self) -> u64 {
        self.population.total()
    }
}

/// An undirected edge between two counties, by FIPS code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
}

impl Edge {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
        }
    }
}

/// Scalar knobs of the spread process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadSettings {
    pub spread_rate: f64,
    pub air_weight: f64,
    pub trigger_threshold: f64,
    pub density_modifiers: DensityModifiers,
}

impl Default for SpreadSettings {
    fn default() -> Self {
        Self {
            spread_rate: 4000.0,
            air_weight: 1.0,
            trigger_threshold: 1.0,
            density_modifiers: DensityModifiers::default(),
        }
    }
}

/// Validated county graph with a land adjacency layer and an air-route layer.
#[derive(Debug, Clone)]
pub struct SpreadNetwork {
    counties: Vec<County>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    air_routes: Vec<Vec<usize>>,
    settings: SpreadSettings,
    // Per target county: (source index, coefficient) in ascending source order.
    inbound_land: Vec<Vec<(usize, f64)>>,
    inbound_with_air: Vec<Vec<(usize, f64)>>,
}

/// Builds and validates the spread network.
///
/// `air_edges = None` connects every pair of airport counties.
pub fn build_network(
    counties: Vec<County>,
    adjacency_edges: &[Edge],
    air_edges: Option<&[Edge]>,
    settings: SpreadSettings,
) -> Result<SpreadNetwork> {
    let mut problems = Vec::new();
    let mut index = HashMap::with_capacity(counties.len());
    for (i, c) in counties.iter().enumerate() {
        if index.insert(c.fips.clone(), i).is_some() {
            problems.push(format!("duplicate county {}", c.fips));
        }
    }
    if !(settings.spread_rate.is_finite() && settings.spread_rate >= 0.0) {
        problems.push(format!(
            "spread_rate must be >= 0, got {}",
            settings.spread_rate
        ));
    }
    if !(settings.air_weight.is_finite() && settings.air_weight >= 0.0) {
        problems.push(format!(
            "air_weight must be >= 0, got {}",
            settings.air_weight
        ));
    }
    if !(settings.trigger_threshold.is_finite() && settings.trigger_threshold > 0.0) {
        problems.push(format!(
            "trigger_threshold must be > 0, got {}",
            settings.trigger_threshold
        ));
    }
    let m = settings.density_modifiers;
    for (name, v) in [("rural", m.rural), ("small", m.small), ("urban", m.urban)] {
        if !(v.is_finite() && v > 0.0) {
            problems.push(format!("density modifier {name} must be > 0, got {v}"));
        }
    }

    let resolve = |edges: &[Edge], label: &str, problems: &mut Vec<String>| {
        let mut set = BTreeSet::new();
        for e in edges {
            match (index.get(&e.a), index.get(&e.b)) {
                (Some(&i), Some(&j)) if i == j => {
                    problems.push(format!("{label} self-loop on {}", e.a))
                }
                (Some(&i), Some(&j)) => {
                    set.insert((i.min(j), i.max(j)));
                }
                _ => {
                    let missing: Vec<&str> = [&e.a, &e.b]
                        .into_iter()
                        .filter(|f| !index.contains_key(*f))
                        .map(String::as_str)
                        .collect();
                    problems.push(format!(
                        "{label} edge {}-{} references unknown county {}",
                        e.a,
                        e.b,
                        missing.join(", ")
                    ));
                }
            }
        }
        set
    };

    let land = resolve(adjacency_edges, "adjacency", &mut problems);
    let air = match air_edges {
        Some(edges) => {
            let set = resolve(edges, "air", &mut problems);
            for &(i, j) in &set {
                for k in [i, j] {
                    if !counties[k].has_airport {
                        problems.push(format!(
                            "air edge {}-{} uses {} which has no airport",
                            counties[i].fips, counties[j].fips, counties[k].fips
                        ));
                    }
                }
            }
            set
        }
        None => {
            let airports: Vec<usize> = (0..counties.len())
                .filter(|&i| counties[i].has_airport)
                .collect();
            let mut set = BTreeSet::new();
            for (k, &i) in airports.iter().enumerate() {
                for &j in &airports[k + 1..] {
                    set.insert((i, j));
                }
            }
            set
        }
    };
    if !problems.is_empty() {
        return Err(Error::Network(problems.join("; ")));
    }

    let n = counties.len();
    let to_lists = |set: &BTreeSet<(usize, usize)>| {
        let mut lists = vec![Vec::new(); n];
        for &(i, j) in set {
            lists[i].push(j);
            lists[j].push(i);
        }
        for l in &mut lists {
            l.sort_unstable();
        }
        lists
    };
    let adjacency = to_lists(&land);
    let air_routes = to_lists(&air);

    let modifier = |i: usize| m.get(counties[i].density_class);
    let inbound = |with_air: bool| -> Vec<Vec<(usize, f64)>> {
        (0..n)
            .map(|j| {
                let mut weights: Vec<(usize, f64)> =
                    adjacency[j].iter().map(|&i| (i, 1.0)).collect();
                if with_air {
                    for &i in &air_routes[j] {
                        match weights.iter_mut().find(|(k, _)| *k == i) {
                            Some((_, w)) => *w += settings.air_weight,
                            None => weights.push((i, settings.air_weight)),
                        }
                    }
                }
                weights.sort_by_key(|&(i, _)| i);
                weights
                    .into_iter()
                    .map(|(i, w)| (i, settings.spread_rate * modifier(i) * modifier(j) * w))
                    .collect()
            })
            .collect()
    };
    let inbound_land = inbound(false);
    let inbound_with_air = inbound(true);

    Ok(SpreadNetwork {
        counties,
        index,
        adjacency,
        air_routes,
        settings,
        inbound_land,
        inbound_with_air,
    })
}

impl SpreadNetwork {
    pub fn counties(&self) -> &[County] {
        &self.counties
    }

    pub fn len(&self) -> usize {
        self.counties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counties.is_empty()
    }

    pub fn settings(&self) -> &SpreadSettings {
        &self.settings
    }

    pub fn index_of(&self, fips: &str) -> Option<usize> {
        self.index.get(fips).copied()
    }

    pub fn county(&self, fips: &str) -> Option<&County> {
        self.index_of(fips).map(|i| &self.counties[i])
    }

    pub fn adjacency(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn air_routes(&self, i: usize) -> &[usize] {
        &self.air_routes[i]
    }

    /// Number of distinct land edges.
    pub fn adjacency_edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn air_edge_count(&self) -> usize {
        self.air_routes.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Counties pushing pressure into `j`, with their coefficients.
    pub fn inbound(&self, j: usize, air_enabled: bool) -> &[(usize, f64)] {
        if air_enabled {
            &self.inbound_with_air[j]
        } else {
            &self.inbound_land[j]
        }
    }

    /// Fresh, unstarted state for every county, in network order.
    pub fn initial_states(&self) -> Vec<CountyState> {
        self.counties
            .iter()
            .map(|c| CountyState::new(c.fips.clone(), c.population))
            .collect()
    }
}

/// Accumulated importation pressure per county.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportationLedger {
    pub pressure: Vec<f64>,
}

impl ImportationLedger {
    pub fn new(n: usize) -> Self {
        Self {
            pressure: vec![0.0; n],
        }
    }

    /// Adds one day of pressure to every county that has not started.
    pub fn accumulate(
        &mut self,
        network: &SpreadNetwork,
        states: &[CountyState],
        air_enabled: bool,
    ) {
        debug_assert_eq!(states.len(), network.len());
        for (j, state) in states.iter().enumerate() {
            if state.outbreak_started() {
                continue;
            }
            let mut added = 0.0;
            for &(i, coef) in network.inbound(j, air_enabled) {
                let src = &states[i];
                if src.outbreak_started() {
                    added += coef * src.active_sick() as f64 / src.total_population() as f64;
                }
            }
            self.pressure[j] += added;
        }
    }

    /// Starts the outbreak of every unstarted county whose pressure reached
    /// `threshold`. Returns the indices triggered.
    pub fn trigger(&self, states: &mut [CountyState], threshold: f64, day: u32) -> Vec<usize> {
        let mut fired = Vec::new();
        for (j, state) in states.iter_mut().enumerate() {
            if !state.outbreak_started() && self.pressure[j] >= threshold {
                state.start_outbreak(day);
                fired.push(j);
            }
        }
        fired
    }
}

/// One-shot form of [`ImportationLedger::accumulate`].
pub fn accumulate_pressure(
    ledger: &mut ImportationLedger,
    network: &SpreadNetwork,
    states: &[CountyState],
    air_enabled: bool,
) {
    ledger.accumulate(network, states, air_enabled);
}

/// One-shot form of [`ImportationLedger::trigger`].
pub fn trigger_outbreaks(
    ledger: &ImportationLedger,
    states: &mut [CountyState],
    threshold: f64,
    day: u32,
) -> Vec<usize> {
    ledger.trigger(states, threshold, day)
}

/// Initial cases placed in a county on a given absolute day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub fips: String,
    #[serde(default)]
    pub day: u32,
    pub cases: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedSeed {
    pub county: usize,
    pub day: u32,
    pub cases: PerGroup<u64>,
}

/// Seeds resolved against a network, applied at the start of their day.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeedSchedule(pub Vec<ResolvedSeed>);

impl SeedSchedule {
    /// Starts the outbreak of, and introduces cases into, every county seeded
    /// on `day`.
    pub fn apply(&self, states: &mut [CountyState], day: u32) {
        for s in self.0.iter().filter(|s| s.day == day) {
            states[s.county].start_outbreak(day);
            states[s.county].introduce(s.cases);
        }
    }
}

/// Resolves seeds and returns fresh county states alongside the schedule.
pub fn seed_initial(
    network: &SpreadNetwork,
    seeds: &[Seed],
) -> Result<(Vec<CountyState>, SeedSchedule)> {
    let mut resolved = Vec::with_capacity(seeds.len());
    for s in seeds {
        let county = network
            .index_of(&s.fips)
            .ok_or_else(|| Error::UnknownCounty(s.fips.clone()))?;
        if s.cases == 0 {
            return Err(Error::Network(format!(
                "seed in {} must have at least one case",
                s.fips
            )));
        }
        resolved.push(ResolvedSeed {
            county,
            day: s.day,
            cases: split_by_population(s.cases, &network.counties()[county].population),
        });
    }
    Ok((network.initial_states(), SeedSchedule(resolved)))
}

/// Splits `cases` across age groups proportionally to population using the
/// largest-remainder method (ties go to the younger group).
pub fn split_by_population(cases: u64, population: &PerGroup<u64>) -> PerGroup<u64> {
    let total = population.total();
    if total == 0 {
        return PerGroup::default();
    }
    let mut out = PerGroup::<u64>::default();
    let mut remainders = Vec::with_capacity(3);
    for g in AgeGroup::ALL {
        let exact = cases as u128 * population[g] as u128;
        out[g] = (exact / total as u128) as u64;
        remainders.push((exact % total as u128, g));
    }
    let mut left = cases - out.total();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, g) in remainders {
        if left == 0 {
            break;
        }
        out[g] += 1;
        left -= 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn county(fips: &str, class: DensityClass, airport: bool) -> County {
        County {
            fips: fips.into(),
            name: format!("County {fips}"),
            population: PerGroup([250, 500, 250]),
            density_class: class,
            total_beds: 10,
            lat: 0.0,
            lon: 0.0,
            has_airport: airport,
        }
    }

    #[test]
    fn two_counties_one_edge() {
        let net = build_network(
            vec![
                county("a", DensityClass::Small, false),
                county("b", DensityClass::Small, false),
            ],
            &[Edge::new("a", "b"), Edge::new("b", "a")],
            None,
            SpreadSettings::default(),
        )
        .unwrap();
        assert_eq!(net.adjacency_edge_count(), 1);
        assert_eq!(net.air_edge_count(), 0);
    }

    #[test]
    fn air_edge_without_airport_is_rejected() {
        let err = build_network(
            vec![
                county("a", DensityClass::Small, true),
                county("b", DensityClass::Small, false),
            ],
            &[],
            Some(&[Edge::new("a", "b")]),
            SpreadSettings::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("b which has no airport"), "{err}");
    }

    #[test]
    fn dangling_and_self_loop_edges_are_named() {
        let err = build_network(
            vec![county("a", DensityClass::Small, false)],
            &[Edge::new("a", "zz"), Edge::new("a", "a")],
            None,
            SpreadSettings::default(),
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("unknown county zz"), "{err}");
        assert!(err.contains("self-loop on a"), "{err}");
    }

    #[test]
    fn default_air_routes_form_a_complete_graph() {
        let cs = (0..4)
            .map(|i| county(&i.to_string(), DensityClass::Urban, i != 2))
            .collect();
        let net = build_network(cs, &[], None, SpreadSettings::default()).unwrap();
        assert_eq!(net.air_edge_count(), 3);
        assert!(net.air_routes(2).is_empty());
    }

    #[test]
    fn land_and_air_on_the_same_pair_both_count() {
        let settings = SpreadSettings {
            spread_rate: 2.0,
            air_weight: 0.5,
            ..SpreadSettings::default()
        };
        let net = build_network(
            vec![
                county("a", DensityClass::Small, true),
                county("b", DensityClass::Small, true),
            ],
            &[Edge::new("a", "b")],
            None,
            settings,
        )
        .unwrap();
        assert_eq!(net.inbound(1, false), &[(0, 2.0)]);
        assert_eq!(net.inbound(1, true), &[(0, 3.0)]);
    }

    #[test]
    fn trigger_boundary_is_inclusive() {
        let net = build_network(
            vec![
                county("a", DensityClass::Small, false),
                county("b", DensityClass::Small, false),
            ],
            &[],
            None,
            SpreadSettings::default(),
        )
        .unwrap();
        let mut states = net.initial_states();
        let ledger = ImportationLedger {
            pressure: vec![1.0 - 1e-12, 1.0],
        };
        let fired = trigger_outbreaks(&ledger, &mut states, 1.0, 4);
        assert_eq!(fired, [1]);
        assert!(!states[0].outbreak_started());
        assert_eq!(states[1].outbreak_start_day, Some(4));
    }

    #[test]
    fn nothing_started_means_no_pressure() {
        let net = build_network(
            vec![
                county("a", DensityClass::Urban, false),
                county("b", DensityClass::Rural, false),
            ],
            &[Edge::new("a", "b")],
            None,
            SpreadSettings::default(),
        )
        .unwrap();
        let states = net.initial_states();
        let mut ledger = ImportationLedger::new(2);
        for _ in 0..10 {
            accumulate_pressure(&mut ledger, &net, &states, true);
        }
        assert_eq!(ledger.pressure, [0.0, 0.0]);
    }

    #[test]
    fn seeding_unknown_county_fails() {
        let net = build_network(
            vec![county("a", DensityClass::Small, false)],
            &[],
            None,
            SpreadSettings::default(),
        )
        .unwrap();
        let err = seed_initial(
            &net,
            &[Seed {
                fips: "q".into(),
                day: 0,
                cases: 3,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownCounty(f) if f == "q"));
    }

    #[test]
    fn split_is_proportional_and_exact() {
        let pop = PerGroup([250, 500, 250]);
        assert_eq!(split_by_population(10, &pop), PerGroup([3, 5, 2]));
        assert_eq!(split_by_population(4, &pop), PerGroup([1, 2, 1]));
        assert_eq!(split_by_population(1, &pop), PerGroup([0, 1, 0]));
        for cases in 0..50 {
            assert_eq!(
                split_by_population(cases, &PerGroup([7, 3, 11])).total(),
                cases
            );
        }
    }
}
