//! County-level epidemic simulation for scenario planning.
//!
//! A run combines a per-county disease model driven by a shared prevalence
//! curve, a spread process that starts outbreaks in neighbouring counties
//! once importation pressure builds up, and decision measures that scale
//! transmission down over time. Runs are deterministic: the same inputs and
//! configuration give bitwise identical results.
//!
//! ```
//! use epiplan::disease::PerGroup;
//! use epiplan::spatial::{build_network, County, DensityClass, Edge, Seed};
//! use epiplan::{simulate, Metric, ModelConfig};
//!
//! let county = |fips: &str| County {
//!     fips: fips.into(),
//!     name: format!("County {fips}"),
//!     population: PerGroup([20_000, 60_000, 20_000]),
//!     density_class: DensityClass::Small,
//!     total_beds: 300,
//!     lat: 35.0,
//!     lon: -97.0,
//!     has_airport: false,
//! };
//! let mut config = ModelConfig::default();
//! config.disease.horizon = 120;
//! config.seeds.push(Seed { fips: "A".into(), day: 0, cases: 20 });
//!
//! let network = build_network(
//!     vec![county("A"), county("B")],
//!     &[Edge::new("A", "B")],
//!     Some(&[]),
//!     config.spread,
//! )?;
//! let result = simulate("demo", &config, &network)?;
//!
//! // The seeded county infects its neighbour.
//! assert!(result.first_infection_day("B").unwrap() > 0);
//! let summary = result.summary();
//! assert!(summary.peak_sick_count > 0);
//! assert_eq!(result.frame(10, Metric::ActiveSick)?.values.len(), 2);
//! # Ok::<(), epiplan::Error>(())
//! ```

pub mod config;
pub mod disease;
pub mod error;
pub mod interventions;
pub mod io;
pub mod rounding;
pub mod scenario;
pub mod spatial;

pub use config::{load_config, parse_config, ActionSpec, LoadedConfig, ModelConfig};
pub use error::{Error, Result};
pub use interventions::{ActionTimeline, DecisionAction, MeasureKind};
pub use io::{InputBundle, InputPaths};
pub use scenario::{
    simulate, Frame, Metric, RunOutcome, Scenario, ScenarioStore, Series, Simulation,
    SimulationResult, StateSummary,
};
