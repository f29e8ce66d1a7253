//! Single-county disease dynamics: the baseline prevalence curve, the daily
//! compartment step, and hospital bed allocation.

mod beds;
mod county;
mod curve;
mod params;

pub use beds::{allocate_beds, bed_capacity, BedAllocation};
pub use county::{step_county, BedSupply, CountyModel, CountyState, DailyFlows, ScheduledEvents};
pub use curve::{build_prevalence_curve, PrevalenceCurve};
pub use params::{AgeGroup, AgeGroupProfile, AgeGroupProfiles, DiseaseParams, PerGroup};
