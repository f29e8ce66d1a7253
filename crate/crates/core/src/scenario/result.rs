use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::disease::{AgeGroup, CountyState};
use crate::error::{Error, Result};

/// A per-county, per-day quantity recorded in every frame.
///
/// The declaration order is the column order of the frame export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[serde(rename = "new_sick_0_17")]
    NewSickChildren,
    #[serde(rename = "new_sick_18_64")]
    NewSickAdults,
    #[serde(rename = "new_sick_65plus")]
    NewSickSeniors,
    NewSick,
    #[serde(rename = "susceptible_0_17")]
    SusceptibleChildren,
    #[serde(rename = "susceptible_18_64")]
    SusceptibleAdults,
    #[serde(rename = "susceptible_65plus")]
    SusceptibleSeniors,
    CumulativeSick,
    ActiveSick,
    HospitalDemand,
    BedsFilled,
    UnmetDemand,
    NewHospitalizations,
    NewDeaths,
    CumulativeDeaths,
}

impl Metric {
    pub const ALL: [Metric; 15] = [
        Metric::NewSickChildren,
        Metric::NewSickAdults,
        Metric::NewSickSeniors,
        Metric::NewSick,
        Metric::SusceptibleChildren,
        Metric::SusceptibleAdults,
        Metric::SusceptibleSeniors,
        Metric::CumulativeSick,
        Metric::ActiveSick,
        Metric::HospitalDemand,
        Metric::BedsFilled,
        Metric::UnmetDemand,
        Metric::NewHospitalizations,
        Metric::NewDeaths,
        Metric::CumulativeDeaths,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::NewSickChildren => "new_sick_0_17",
            Metric::NewSickAdults => "new_sick_18_64",
            Metric::NewSickSeniors => "new_sick_65plus",
            Metric::NewSick => "new_sick",
            Metric::SusceptibleChildren => "susceptible_0_17",
            Metric::SusceptibleAdults => "susceptible_18_64",
            Metric::SusceptibleSeniors => "susceptible_65plus",
            Metric::CumulativeSick => "cumulative_sick",
            Metric::ActiveSick => "active_sick",
            Metric::HospitalDemand => "hospital_demand",
            Metric::BedsFilled => "beds_filled",
            Metric::UnmetDemand => "unmet_demand",
            Metric::NewHospitalizations => "new_hospitalizations",
            Metric::NewDeaths => "new_deaths",
            Metric::CumulativeDeaths => "cumulative_deaths",
        }
    }

    pub fn new_sick(group: AgeGroup) -> Metric {
        [
            Metric::NewSickChildren,
            Metric::NewSickAdults,
            Metric::NewSickSeniors,
        ][group.index()]
    }

    pub fn susceptible(group: AgeGroup) -> Metric {
        [
            Metric::SusceptibleChildren,
            Metric::SusceptibleAdults,
            Metric::SusceptibleSeniors,
        ][group.index()]
    }

    fn column(self) -> usize {
        self as usize
    }

    fn read(self, s: &CountyState) -> u64 {
        match self {
            Metric::NewSickChildren => s.today.new_sick[AgeGroup::Children],
            Metric::NewSickAdults => s.today.new_sick[AgeGroup::Adults],
            Metric::NewSickSeniors => s.today.new_sick[AgeGroup::Seniors],
            Metric::NewSick => s.today.new_sick.total(),
            Metric::SusceptibleChildren => s.susceptible[AgeGroup::Children],
            Metric::SusceptibleAdults => s.susceptible[AgeGroup::Adults],
            Metric::SusceptibleSeniors => s.susceptible[AgeGroup::Seniors],
            Metric::CumulativeSick => s.cumulative_sick.total(),
            Metric::ActiveSick => s.active_sick(),
            Metric::HospitalDemand => s.hospital_demand,
            Metric::BedsFilled => s.beds_filled,
            Metric::UnmetDemand => s.unmet_demand,
            Metric::NewHospitalizations => s.today.new_hospitalizations,
            Metric::NewDeaths => s.today.new_deaths,
            Metric::CumulativeDeaths => s.deaths.total(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    /// Accepts every column name plus the aliases `deaths` and
    /// `hospitalized_demand`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deaths" => Ok(Metric::CumulativeDeaths),
            "hospitalized_demand" => Ok(Metric::HospitalDemand),
            _ => Metric::ALL
                .into_iter()
                .find(|m| m.as_str() == s)
                .ok_or_else(|| Error::UnknownMetric(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountyMeta {
    pub fips: String,
    pub name: String,
    pub population: u64,
    /// Simulation beds: total beds minus the pre-occupied share.
    pub bed_capacity: u64,
}

/// Immutable per-day, per-county record of a completed run.
///
/// Stored column-wise: each metric is one flat array indexed
/// `day * county_count + county`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub scenario_id: String,
    pub horizon: u32,
    pub counties: Vec<CountyMeta>,
    columns: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameValue {
    pub fips: String,
    pub value: u64,
    /// `value / population`, for choropleth shading.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub day: u32,
    pub metric: Metric,
    pub values: Vec<FrameValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub fips: String,
    pub values: Vec<u64>,
}

impl SimulationResult {
    pub(crate) fn with_capacity(
        scenario_id: String,
        horizon: u32,
        counties: Vec<CountyMeta>,
    ) -> Self {
        let cells = horizon as usize * counties.len();
        Self {
            scenario_id,
            horizon,
            counties,
            columns: vec![Vec::with_capacity(cells); Metric::ALL.len()],
        }
    }

    /// Appends the next day's frame from the county states.
    pub(crate) fn record(&mut self, states: &[CountyState]) {
        debug_assert_eq!(states.len(), self.counties.len());
        for m in Metric::ALL {
            let col = &mut self.columns[m.column()];
            col.extend(states.iter().map(|s| m.read(s)));
        }
    }

    /// Rebuilds a result from raw column data, as read back from an export.
    pub(crate) fn from_columns(
        scenario_id: String,
        horizon: u32,
        counties: Vec<CountyMeta>,
        columns: Vec<Vec<u64>>,
    ) -> Self {
        Self {
            scenario_id,
            horizon,
            counties,
            columns,
        }
    }

    pub fn days_recorded(&self) -> u32 {
        if self.counties.is_empty() {
            return self.horizon;
        }
        (self.columns[0].len() / self.counties.len()) as u32
    }

    pub fn county_count(&self) -> usize {
        self.counties.len()
    }

    pub fn county_index(&self, fips: &str) -> Option<usize> {
        self.counties.iter().position(|c| c.fips == fips)
    }

    /// Raw cell access. Panics if out of range.
    pub fn value(&self, metric: Metric, day: u32, county: usize) -> u64 {
        self.columns[metric.column()][day as usize * self.counties.len() + county]
    }

    /// The values of `metric` on `day`, one per county in network order.
    pub fn day_slice(&self, metric: Metric, day: u32) -> &[u64] {
        let n = self.counties.len();
        let start = day as usize * n;
        &self.columns[metric.column()][start..start + n]
    }

    fn check_day(&self, day: u32) -> Result<()> {
        if day >= self.horizon {
            return Err(Error::DayOutOfRange {
                day,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// Map frame: every county's value on `day`, plus the
    /// population-normalized value.
    pub fn frame(&self, day: u32, metric: Metric) -> Result<Frame> {
        self.check_day(day)?;
        let values = self
            .counties
            .iter()
            .zip(self.day_slice(metric, day))
            .map(|(c, &value)| FrameValue {
                fips: c.fips.clone(),
                value,
                normalized: if c.population > 0 {
                    value as f64 / c.population as f64
                } else {
                    0.0
                },
            })
            .collect();
        Ok(Frame {
            day,
            metric,
            values,
        })
    }

    /// Day-indexed series for each requested county, in request order.
    pub fn series<S: AsRef<str>>(&self, fips: &[S], metric: Metric) -> Result<Vec<Series>> {
        fips.iter()
            .map(|f| {
                let f = f.as_ref();
                let i = self
                    .county_index(f)
                    .ok_or_else(|| Error::UnknownCounty(f.to_string()))?;
                Ok(Series {
                    fips: f.to_string(),
                    values: (0..self.horizon)
                        .map(|d| self.value(metric, d, i))
                        .collect(),
                })
            })
            .collect()
    }

    /// Sum over counties of `metric`, per day.
    pub fn statewide(&self, metric: Metric) -> Vec<u64> {
        (0..self.horizon)
            .map(|d| self.day_slice(metric, d).iter().sum())
            .collect()
    }

    /// First day the county has any cumulative cases.
    pub fn first_infection_day(&self, fips: &str) -> Option<u32> {
        let i = self.county_index(fips)?;
        (0..self.horizon).find(|&d| self.value(Metric::CumulativeSick, d, i) > 0)
    }

    /// First day the county's beds were all filled.
    pub fn first_saturation_day(&self, fips: &str) -> Option<u32> {
        let i = self.county_index(fips)?;
        let cap = self.counties[i].bed_capacity;
        (0..self.horizon).find(|&d| self.value(Metric::BedsFilled, d, i) >= cap)
    }
}
