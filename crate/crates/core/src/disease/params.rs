use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Violations;

/// Epidemiological constants shared by every county in a run.
///
/// All periods are whole days. `time_to_death` and `recovery_time` are
/// measured from infection, as is `incubation_period`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseaseParams {
    pub r0: f64,
    /// Days an infected person stays contagious.
    pub shedding_period: u32,
    /// Days from infection to symptom onset, which is also when hospital
    /// demand arises.
    pub incubation_period: u32,
    pub mortality_rate: f64,
    pub time_to_death: u32,
    pub recovery_time: u32,
    pub hospitalization_rate: f64,
    pub days_in_hospital: u32,
    /// Mortality multiplier applied to the share of a cohort whose hospital
    /// demand found no free bed.
    pub excess_mortality_multiplier: f64,
    /// Simulation length in days.
    pub horizon: u32,
    /// Infectious fraction at local day 0 of the normalized curve integration.
    pub initial_infectious_fraction: f64,
}

impl Default for DiseaseParams {
    fn default() -> Self {
        Self {
            r0: 3.0,
            shedding_period: 4,
            incubation_period: 5,
            mortality_rate: 0.007,
            time_to_death: 18,
            recovery_time: 14,
            hospitalization_rate: 0.05,
            days_in_hospital: 8,
            excess_mortality_multiplier: 2.0,
            horizon: 200,
            initial_infectious_fraction: 1e-4,
        }
    }
}

impl DiseaseParams {
    pub fn validate(&self) -> Violations {
        let mut v = Violations::default();
        if !(self.r0.is_finite() && self.r0 >= 0.0) {
            v.push("r0", format!("must be finite and >= 0, got {}", self.r0));
        }
        for (name, days) in [
            ("shedding_period", self.shedding_period),
            ("incubation_period", self.incubation_period),
            ("time_to_death", self.time_to_death),
            ("recovery_time", self.recovery_time),
            ("days_in_hospital", self.days_in_hospital),
            ("horizon", self.horizon),
        ] {
            if days < 1 {
                v.push(name, "must be at least 1 day");
            }
        }
        for (name, rate) in [
            ("mortality_rate", self.mortality_rate),
            ("hospitalization_rate", self.hospitalization_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                v.push(name, format!("must be within [0, 1], got {rate}"));
            }
        }
        if !(self.excess_mortality_multiplier.is_finite()
            && self.excess_mortality_multiplier >= 1.0)
        {
            v.push(
                "excess_mortality_multiplier",
                format!("must be >= 1, got {}", self.excess_mortality_multiplier),
            );
        }
        if self.time_to_death < self.incubation_period {
            v.push(
                "time_to_death",
                format!(
                    "must be >= incubation_period ({}), got {}",
                    self.incubation_period, self.time_to_death
                ),
            );
        }
        let i0 = self.initial_infectious_fraction;
        if !(i0 > 0.0 && i0 < 1.0) {
            v.push(
                "initial_infectious_fraction",
                format!("must be within (0, 1), got {i0}"),
            );
        }
        v
    }
}

/// The three fixed age bands the population is partitioned into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgeGroup {
    #[serde(rename = "0-17")]
    Children,
    #[serde(rename = "18-64")]
    Adults,
    #[serde(rename = "65+")]
    Seniors,
}

impl AgeGroup {
    pub const ALL: [AgeGroup; 3] = [AgeGroup::Children, AgeGroup::Adults, AgeGroup::Seniors];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            AgeGroup::Children => "0-17",
            AgeGroup::Adults => "18-64",
            AgeGroup::Seniors => "65+",
        }
    }

    /// Column suffix used in CSV files.
    pub fn column_suffix(self) -> &'static str {
        match self {
            AgeGroup::Children => "0_17",
            AgeGroup::Adults => "18_64",
            AgeGroup::Seniors => "65plus",
        }
    }
}

impl fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AgeGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgeGroup::ALL
            .into_iter()
            .find(|g| g.label() == s)
            .ok_or_else(|| format!("unknown age group {s:?}"))
    }
}

/// A value per age group, indexable by [`AgeGroup`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerGroup<T>(pub [T; 3]);

impl<T: Copy> PerGroup<T> {
    pub fn splat(v: T) -> Self {
        Self([v; 3])
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgeGroup, T)> + '_ {
        AgeGroup::ALL
            .into_iter()
            .map(move |g| (g, self.0[g.index()]))
    }
}

impl PerGroup<u64> {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl<T> Index<AgeGroup> for PerGroup<T> {
    type Output = T;
    fn index(&self, g: AgeGroup) -> &T {
        &self.0[g.index()]
    }
}

impl<T> IndexMut<AgeGroup> for PerGroup<T> {
    fn index_mut(&mut self, g: AgeGroup) -> &mut T {
        &mut self.0[g.index()]
    }
}

/// Relative susceptibility and severity of one age group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeGroupProfile {
    pub prevalence_multiplier: f64,
    pub hospitalization_multiplier: f64,
    pub mortality_multiplier: f64,
}

pub type AgeGroupProfiles = PerGroup<AgeGroupProfile>;

impl Default for AgeGroupProfiles {
    // Placeholder values; real deployments should supply their own.
    fn default() -> Self {
        let p = |prevalence, hospitalization, mortality| AgeGroupProfile {
            prevalence_multiplier: prevalence,
            hospitalization_multiplier: hospitalization,
            mortality_multiplier: mortality,
        };
        PerGroup([p(1.0, 0.2, 0.1), p(1.0, 1.0, 1.0), p(1.0, 3.0, 5.0)])
    }
}

impl AgeGroupProfiles {
    pub fn validate(&self) -> Violations {
        let mut v = Violations::default();
        for (g, p) in self.iter() {
            for (name, m) in [
                ("prevalence_multiplier", p.prevalence_multiplier),
                ("hospitalization_multiplier", p.hospitalization_multiplier),
                ("mortality_multiplier", p.mortality_multiplier),
            ] {
                if !(m.is_finite() && m >= 0.0) {
                    v.push(
                        format!("{g}.{name}"),
                        format!("must be finite and >= 0, got {m}"),
                    );
                }
            }
        }
        v
    }
}
