//! Decision measures and the multiplier they apply to the prevalence curve.
//!
//! A measure switched on at `start_day` ramps linearly from no effect to its
//! full `reduction` over `ramp_days`, then stays at full effect for the rest
//! of the run. Simultaneous measures compose multiplicatively.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Violations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    MediaAlerts,
    SchoolClosures,
    ShelterInPlace,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 3] = [
        MeasureKind::MediaAlerts,
        MeasureKind::SchoolClosures,
        MeasureKind::ShelterInPlace,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::MediaAlerts => "media_alerts",
            MeasureKind::SchoolClosures => "school_closures",
            MeasureKind::ShelterInPlace => "shelter_in_place",
        }
    }

    /// Shipped default `(reduction, ramp_days)`.
    pub fn default_effect(self) -> (f64, u32) {
        match self {
            MeasureKind::MediaAlerts => (0.10, 7),
            MeasureKind::SchoolClosures => (0.25, 7),
            MeasureKind::ShelterInPlace => (0.50, 7),
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                format!("unknown measure {s:?} (expected media_alerts, school_closures or shelter_in_place)")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionAction {
    pub kind: MeasureKind,
    pub start_day: u32,
    pub ramp_days: u32,
    /// Fractional cut to the prevalence curve at full effect, in `[0, 1)`.
    pub reduction: f64,
}

impl DecisionAction {
    /// An action using the kind's shipped default effect.
    pub fn with_defaults(kind: MeasureKind, start_day: u32) -> Self {
        let (reduction, ramp_days) = kind.default_effect();
        Self {
            kind,
            start_day,
            ramp_days,
            reduction,
        }
    }

    pub fn validate(&self) -> Violations {
        let mut v = Violations::default();
        if !(self.reduction.is_finite() && (0.0..1.0).contains(&self.reduction)) {
            v.push(
                "reduction",
                format!("must be within [0, 1), got {}", self.reduction),
            );
        }
        v
    }
}

/// Multiplier contributed by a single action on an absolute day.
pub fn measure_multiplier(action: &DecisionAction, day: u32) -> f64 {
    if day < action.start_day {
        return 1.0;
    }
    let elapsed = day - action.start_day;
    if elapsed >= action.ramp_days {
        1.0 - action.reduction
    } else {
        1.0 - action.reduction * f64::from(elapsed) / f64::from(action.ramp_days)
    }
}

/// Product of the per-action multipliers. An empty set gives 1.
pub fn combined_multiplier<'a>(
    actions: impl IntoIterator<Item = &'a DecisionAction>,
    day: u32,
) -> f64 {
    actions
        .into_iter()
        .map(|a| measure_multiplier(a, day))
        .product()
}

/// A scenario's full action history.
///
/// Several actions of the same kind may appear (a later one re-applies the
/// measure). On any day, only the most recently started action of each kind
/// is in force, so the per-day set handed to [`combined_multiplier`] holds at
/// most one action per kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionTimeline(Vec<DecisionAction>);

impl ActionTimeline {
    pub fn new(mut actions: Vec<DecisionAction>) -> Self {
        actions.sort_by_key(|a| (a.start_day, a.kind));
        Self(actions)
    }

    pub fn actions(&self) -> &[DecisionAction] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Actions in force on `day`, at most one per kind.
    pub fn in_force(&self, day: u32) -> impl Iterator<Item = &DecisionAction> {
        MeasureKind::ALL.into_iter().filter_map(move |kind| {
            self.0
                .iter()
                .rfind(|a| a.kind == kind && a.start_day <= day)
        })
    }

    pub fn multiplier(&self, day: u32) -> f64 {
        combined_multiplier(self.in_force(day), day)
    }

    /// Actions starting strictly before `day`.
    pub fn before(&self, day: u32) -> Vec<DecisionAction> {
        self.0
            .iter()
            .filter(|a| a.start_day < day)
            .copied()
            .collect()
    }

    pub fn validate(&self) -> Violations {
        let mut v = Violations::default();
        for (i, a) in self.0.iter().enumerate() {
            v.extend(a.validate().nest(&format!("actions[{i}]")));
            if self.0[..i]
                .iter()
                .any(|b| b.kind == a.kind && b.start_day == a.start_day)
            {
                v.push(
                    format!("actions[{i}]"),
                    format!("{} already starts on day {}", a.kind, a.start_day),
                );
            }
        }
        v
    }
}
