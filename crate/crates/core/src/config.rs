//! Model configuration: the JSON file schema with its defaults and validation.
//!
//! Every key is optional. Missing keys take shipped defaults, unknown keys are
//! rejected, and [`LoadedConfig::echo`] records for each setting whether it
//! came from the file or from a default.
//!
//! ```json
//! {
//!   "disease": { "r0": 3.0, "shedding_period": 4, "horizon": 200 },
//!   "age_groups": { "65+": { "mortality_multiplier": 5.0 } },
//!   "density_modifiers": { "rural": 0.6, "small": 1.0, "urban": 1.5 },
//!   "spread": { "spread_rate": 4000.0, "air_weight": 1.0, "trigger_threshold": 1.0 },
//!   "air_enabled": true,
//!   "occupancy_fraction": 0.7,
//!   "measures": { "shelter_in_place": { "reduction": 0.5, "ramp_days": 7 } },
//!   "seeds": [ { "fips": "40109", "day": 0, "cases": 10 } ],
//!   "actions": [ { "kind": "media_alerts", "start_day": 1 } ],
//!   "rounding": "half_even",
//!   "rng_seed": 0
//! }
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::disease::{AgeGroup, AgeGroupProfile, AgeGroupProfiles, DiseaseParams};
use crate::error::{Error, Result, Violations};
use crate::interventions::{ActionTimeline, DecisionAction, MeasureKind};
use crate::rounding::RoundingPolicy;
use crate::spatial::{DensityModifiers, Seed, SpreadSettings};

pub const DEFAULT_OCCUPANCY: f64 = 0.7;

/// Default effect of each decision measure, used when an action omits its
/// own reduction or ramp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEffect {
    pub reduction: f64,
    pub ramp_days: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureDefaults {
    pub media_alerts: MeasureEffect,
    pub school_closures: MeasureEffect,
    pub shelter_in_place: MeasureEffect,
}

impl Default for MeasureDefaults {
    fn default() -> Self {
        let effect = |k: MeasureKind| {
            let (reduction, ramp_days) = k.default_effect();
            MeasureEffect {
                reduction,
                ramp_days,
            }
        };
        Self {
            media_alerts: effect(MeasureKind::MediaAlerts),
            school_closures: effect(MeasureKind::SchoolClosures),
            shelter_in_place: effect(MeasureKind::ShelterInPlace),
        }
    }
}

impl MeasureDefaults {
    pub fn get(&self, kind: MeasureKind) -> MeasureEffect {
        match kind {
            MeasureKind::MediaAlerts => self.media_alerts,
            MeasureKind::SchoolClosures => self.school_closures,
            MeasureKind::ShelterInPlace => self.shelter_in_place,
        }
    }

    fn get_mut(&mut self, kind: MeasureKind) -> &mut MeasureEffect {
        match kind {
            MeasureKind::MediaAlerts => &mut self.media_alerts,
            MeasureKind::SchoolClosures => &mut self.school_closures,
            MeasureKind::ShelterInPlace => &mut self.shelter_in_place,
        }
    }

    /// Fills the missing fields of a requested action from this table.
    pub fn resolve(&self, req: &ActionSpec) -> DecisionAction {
        let d = self.get(req.kind);
        DecisionAction {
            kind: req.kind,
            start_day: req.start_day,
            ramp_days: req.ramp_days.unwrap_or(d.ramp_days),
            reduction: req.reduction.unwrap_or(d.reduction),
        }
    }
}

/// An action as written in a config file or request: effect fields optional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub kind: MeasureKind,
    pub start_day: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_days: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<f64>,
}

/// Fully resolved configuration for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub disease: DiseaseParams,
    pub age_groups: AgeGroupProfiles,
    pub spread: SpreadSettings,
    pub air_enabled: bool,
    pub occupancy_fraction: f64,
    pub measures: MeasureDefaults,
    pub seeds: Vec<Seed>,
    pub actions: Vec<DecisionAction>,
    pub rounding: RoundingPolicy,
    pub rng_seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            disease: DiseaseParams::default(),
            age_groups: AgeGroupProfiles::default(),
            spread: SpreadSettings::default(),
            air_enabled: true,
            occupancy_fraction: DEFAULT_OCCUPANCY,
            measures: MeasureDefaults::default(),
            seeds: Vec::new(),
            actions: Vec::new(),
            rounding: RoundingPolicy::HalfEven,
            rng_seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn timeline(&self) -> ActionTimeline {
        ActionTimeline::new(self.actions.clone())
    }

    /// Collects every violated field across all sections.
    pub fn validate(&self) -> Violations {
        let mut v = Violations::default();
        v.extend(self.disease.validate().nest("disease"));
        v.extend(self.age_groups.validate().nest("age_groups"));
        let s = &self.spread;
        if !(s.spread_rate.is_finite() && s.spread_rate >= 0.0) {
            v.push(
                "spread.spread_rate",
                format!("must be >= 0, got {}", s.spread_rate),
            );
        }
        if !(s.air_weight.is_finite() && s.air_weight >= 0.0) {
            v.push(
                "spread.air_weight",
                format!("must be >= 0, got {}", s.air_weight),
            );
        }
        if !(s.trigger_threshold.is_finite() && s.trigger_threshold > 0.0) {
            v.push(
                "spread.trigger_threshold",
                format!("must be > 0, got {}", s.trigger_threshold),
            );
        }
        let m = s.density_modifiers;
        for (name, x) in [("rural", m.rural), ("small", m.small), ("urban", m.urban)] {
            if !(x.is_finite() && x > 0.0) {
                v.push(
                    format!("density_modifiers.{name}"),
                    format!("must be > 0, got {x}"),
                );
            }
        }
        if !(0.0..=1.0).contains(&self.occupancy_fraction) {
            v.push(
                "occupancy_fraction",
                format!("must be within [0, 1], got {}", self.occupancy_fraction),
            );
        }
        for kind in MeasureKind::ALL {
            let r = self.measures.get(kind).reduction;
            if !(r.is_finite() && (0.0..1.0).contains(&r)) {
                v.push(
                    format!("measures.{kind}.reduction"),
                    format!("must be within [0, 1), got {r}"),
                );
            }
        }
        for (i, seed) in self.seeds.iter().enumerate() {
            if seed.cases == 0 {
                v.push(format!("seeds[{i}].cases"), "must be at least 1");
            }
            if seed.day >= self.disease.horizon {
                v.push(
                    format!("seeds[{i}].day"),
                    format!("must be before the horizon ({})", self.disease.horizon),
                );
            }
        }
        v.extend(self.timeline().validate());
        v
    }
}

/// Where a resolved setting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Default,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoEntry {
    pub key: String,
    pub value: Value,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadedConfig {
    pub config: ModelConfig,
    pub echo: Vec<EchoEntry>,
}

impl LoadedConfig {
    pub fn source_of(&self, key: &str) -> Option<Source> {
        self.echo.iter().find(|e| e.key == key).map(|e| e.source)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    disease: Option<RawDisease>,
    age_groups: Option<RawAgeGroups>,
    density_modifiers: Option<RawDensity>,
    spread: Option<RawSpread>,
    air_enabled: Option<bool>,
    occupancy_fraction: Option<f64>,
    measures: Option<RawMeasures>,
    seeds: Option<Vec<Seed>>,
    actions: Option<Vec<ActionSpec>>,
    rounding: Option<RoundingPolicy>,
    rng_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDisease {
    r0: Option<f64>,
    shedding_period: Option<u32>,
    incubation_period: Option<u32>,
    mortality_rate: Option<f64>,
    time_to_death: Option<u32>,
    recovery_time: Option<u32>,
    hospitalization_rate: Option<f64>,
    days_in_hospital: Option<u32>,
    excess_mortality_multiplier: Option<f64>,
    horizon: Option<u32>,
    initial_infectious_fraction: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgeGroups {
    #[serde(rename = "0-17")]
    children: Option<RawProfile>,
    #[serde(rename = "18-64")]
    adults: Option<RawProfile>,
    #[serde(rename = "65+")]
    seniors: Option<RawProfile>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    prevalence_multiplier: Option<f64>,
    hospitalization_multiplier: Option<f64>,
    mortality_multiplier: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDensity {
    rural: Option<f64>,
    small: Option<f64>,
    urban: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpread {
    spread_rate: Option<f64>,
    air_weight: Option<f64>,
    trigger_threshold: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasures {
    media_alerts: Option<RawEffect>,
    school_closures: Option<RawEffect>,
    shelter_in_place: Option<RawEffect>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEffect {
    reduction: Option<f64>,
    ramp_days: Option<u32>,
}

struct Resolver {
    echo: Vec<EchoEntry>,
}

impl Resolver {
    fn pick<T: Serialize + Clone>(&mut self, key: &str, user: Option<T>, default: T) -> T {
        let (value, source) = match user {
            Some(v) => (v, Source::User),
            None => (default, Source::Default),
        };
        self.echo.push(EchoEntry {
            key: key.to_string(),
            value: serde_json::to_value(&value).unwrap_or(Value::Null),
            source,
        });
        value
    }
}

/// Parses a JSON config document and fills in defaults before validating.
pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        let mut v = Violations::default();
        v.push("config", e.to_string());
        Error::Validation(v)
    })?;
    let loaded = resolve(raw);
    loaded.config.validate().into_result()?;
    Ok(loaded)
}

/// Like [`parse_config`] but from an already-parsed JSON value.
pub fn config_from_value(value: Value) -> Result<LoadedConfig> {
    let raw: RawConfig = from_value(value)?;
    let loaded = resolve(raw);
    loaded.config.validate().into_result()?;
    Ok(loaded)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        context: format!("reading {}", path.display()),
        source,
    })?;
    parse_config(&text)
}

fn from_value<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| {
        let mut v = Violations::default();
        v.push("config", e.to_string());
        Error::Validation(v)
    })
}

fn resolve(raw: RawConfig) -> LoadedConfig {
    let mut r = Resolver { echo: Vec::new() };
    let d0 = DiseaseParams::default();
    let d = raw.disease.unwrap_or_default();
    let disease = DiseaseParams {
        r0: r.pick("disease.r0", d.r0, d0.r0),
        shedding_period: r.pick(
            "disease.shedding_period",
            d.shedding_period,
            d0.shedding_period,
        ),
        incubation_period: r.pick(
            "disease.incubation_period",
            d.incubation_period,
            d0.incubation_period,
        ),
        mortality_rate: r.pick(
            "disease.mortality_rate",
            d.mortality_rate,
            d0.mortality_rate,
        ),
        time_to_death: r.pick("disease.time_to_death", d.time_to_death, d0.time_to_death),
        recovery_time: r.pick("disease.recovery_time", d.recovery_time, d0.recovery_time),
        hospitalization_rate: r.pick(
            "disease.hospitalization_rate",
            d.hospitalization_rate,
            d0.hospitalization_rate,
        ),
        days_in_hospital: r.pick(
            "disease.days_in_hospital",
            d.days_in_hospital,
            d0.days_in_hospital,
        ),
        excess_mortality_multiplier: r.pick(
            "disease.excess_mortality_multiplier",
            d.excess_mortality_multiplier,
            d0.excess_mortality_multiplier,
        ),
        horizon: r.pick("disease.horizon", d.horizon, d0.horizon),
        initial_infectious_fraction: r.pick(
            "disease.initial_infectious_fraction",
            d.initial_infectious_fraction,
            d0.initial_infectious_fraction,
        ),
    };

    let a0 = AgeGroupProfiles::default();
    let ag = raw.age_groups.unwrap_or_default();
    let mut age_groups = a0;
    for (group, raw_profile) in [
        (AgeGroup::Children, ag.children),
        (AgeGroup::Adults, ag.adults),
        (AgeGroup::Seniors, ag.seniors),
    ] {
        let p = raw_profile.unwrap_or_default();
        let def = a0[group];
        let key = |f: &str| format!("age_groups.{group}.{f}");
        age_groups[group] = AgeGroupProfile {
            prevalence_multiplier: r.pick(
                &key("prevalence_multiplier"),
                p.prevalence_multiplier,
                def.prevalence_multiplier,
            ),
            hospitalization_multiplier: r.pick(
                &key("hospitalization_multiplier"),
                p.hospitalization_multiplier,
                def.hospitalization_multiplier,
            ),
            mortality_multiplier: r.pick(
                &key("mortality_multiplier"),
                p.mortality_multiplier,
                def.mortality_multiplier,
            ),
        };
    }

    let m0 = DensityModifiers::default();
    let dm = raw.density_modifiers.unwrap_or_default();
    let density_modifiers = DensityModifiers {
        rural: r.pick("density_modifiers.rural", dm.rural, m0.rural),
        small: r.pick("density_modifiers.small", dm.small, m0.small),
        urban: r.pick("density_modifiers.urban", dm.urban, m0.urban),
    };

    let s0 = SpreadSettings::default();
    let sp = raw.spread.unwrap_or_default();
    let spread = SpreadSettings {
        spread_rate: r.pick("spread.spread_rate", sp.spread_rate, s0.spread_rate),
        air_weight: r.pick("spread.air_weight", sp.air_weight, s0.air_weight),
        trigger_threshold: r.pick(
            "spread.trigger_threshold",
            sp.trigger_threshold,
            s0.trigger_threshold,
        ),
        density_modifiers,
    };

    let air_enabled = r.pick("air_enabled", raw.air_enabled, true);
    let occupancy_fraction = r.pick(
        "occupancy_fraction",
        raw.occupancy_fraction,
        DEFAULT_OCCUPANCY,
    );

    let mut measures = MeasureDefaults::default();
    let rm = raw.measures.unwrap_or_default();
    for (kind, effect) in [
        (MeasureKind::MediaAlerts, rm.media_alerts),
        (MeasureKind::SchoolClosures, rm.school_closures),
        (MeasureKind::ShelterInPlace, rm.shelter_in_place),
    ] {
        let e = effect.unwrap_or_default();
        let def = measures.get(kind);
        let slot = measures.get_mut(kind);
        slot.reduction = r.pick(
            &format!("measures.{kind}.reduction"),
            e.reduction,
            def.reduction,
        );
        slot.ramp_days = r.pick(
            &format!("measures.{kind}.ramp_days"),
            e.ramp_days,
            def.ramp_days,
        );
    }

    let seeds = r.pick("seeds", raw.seeds, Vec::new());
    let specs = raw.actions.unwrap_or_default();
    let actions: Vec<DecisionAction> = specs.iter().map(|s| measures.resolve(s)).collect();
    let actions = r.pick(
        "actions",
        (!specs.is_empty()).then(|| actions.clone()),
        actions.clone(),
    );
    let rounding = r.pick("rounding", raw.rounding, RoundingPolicy::HalfEven);
    let rng_seed = r.pick("rng_seed", raw.rng_seed, 0);

    LoadedConfig {
        config: ModelConfig {
            disease,
            age_groups,
            spread,
            air_enabled,
            occupancy_fraction,
            measures,
            seeds,
            actions,
            rounding,
            rng_seed,
        },
        echo: r.echo,
    }
}
