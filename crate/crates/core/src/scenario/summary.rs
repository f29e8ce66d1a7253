use serde::{Deserialize, Serialize};

use super::result::{Metric, SimulationResult};

/// Statewide headline numbers for one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSummary {
    /// Day of the statewide active-case peak (earliest on ties, 0 if none).
    pub peak_sick_day: u32,
    pub peak_sick_count: u64,
    /// Days from the first new case to the last day with at least one
    /// active case, inclusive. Zero when no one was ever sick.
    pub outbreak_duration: u32,
    pub first_case_day: Option<u32>,
    pub last_active_day: Option<u32>,
    pub total_sick: u64,
    pub total_hospitalizations: u64,
    pub total_deaths: u64,
}

impl StateSummary {
    pub fn of(result: &SimulationResult) -> Self {
        let active = result.statewide(Metric::ActiveSick);
        let new_sick = result.statewide(Metric::NewSick);

        let (mut peak_sick_day, mut peak_sick_count) = (0u32, 0u64);
        for (d, &a) in active.iter().enumerate() {
            if a > peak_sick_count {
                peak_sick_day = d as u32;
                peak_sick_count = a;
            }
        }
        let first_case_day = new_sick.iter().position(|&n| n > 0).map(|d| d as u32);
        let last_active_day = active.iter().rposition(|&a| a >= 1).map(|d| d as u32);
        let outbreak_duration = match (first_case_day, last_active_day) {
            (Some(f), Some(l)) if l >= f => l - f + 1,
            _ => 0,
        };
        let last = result.horizon.checked_sub(1);
        let final_total = |m: Metric| last.map_or(0, |d| result.day_slice(m, d).iter().sum());

        Self {
            peak_sick_day,
            peak_sick_count,
            outbreak_duration,
            first_case_day,
            last_active_day,
            total_sick: final_total(Metric::CumulativeSick),
            total_hospitalizations: result.statewide(Metric::NewHospitalizations).iter().sum(),
            total_deaths: final_total(Metric::CumulativeDeaths),
        }
    }
}

impl SimulationResult {
    pub fn summary(&self) -> StateSummary {
        StateSummary::of(self)
    }
}
