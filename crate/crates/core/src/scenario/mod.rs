//! Scenarios and their run results.

mod engine;
mod export;
mod result;
mod store;
mod summary;

pub use engine::{simulate, Simulation};
pub use export::{export_header, read_export, write_export, write_summary, SUMMARY_HEADER};
pub use result::{CountyMeta, Frame, FrameValue, Metric, Series, SimulationResult};
pub use store::{RunOutcome, Scenario, ScenarioStore};
pub use summary::StateSummary;
