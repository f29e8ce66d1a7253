use serde::{Deserialize, Serialize};

use crate::disease::DiseaseParams;
use crate::error::{Error, Result};

/// Baseline daily incidence for a county, indexed by days since its local
/// outbreak began.
///
/// Entry `t` is the fraction of the county's susceptible population newly
/// infected on local day `t`, before age and intervention multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceCurve {
    daily_incidence: Vec<f64>,
}

impl PrevalenceCurve {
    pub fn daily_incidence(&self) -> &[f64] {
        &self.daily_incidence
    }

    pub fn get(&self, local_day: u32) -> Option<f64> {
        self.daily_incidence.get(local_day as usize).copied()
    }

    pub fn len(&self) -> usize {
        self.daily_incidence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.daily_incidence.is_empty()
    }

    /// Sum of all daily values: the curve's attack fraction.
    pub fn total(&self) -> f64 {
        self.daily_incidence.iter().sum()
    }

    /// Local day with the largest incidence (first one on ties).
    pub fn peak_day(&self) -> Option<usize> {
        self.daily_incidence
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (t, &x)| match best {
                Some((_, b)) if b >= x => best,
                _ => Some((t, x)),
            })
            .map(|(t, _)| t)
    }
}

/// Integrates a normalized SIR model one day at a time and records the daily
/// incidence `β·S·I`.
///
/// `β = r0 / shedding_period`, `γ = 1 / shedding_period`, and the population
/// starts at `S = 1 − i₀`, `I = i₀`. Incidence is clamped so cumulative
/// infections never exceed `1 − i₀`.
pub fn build_prevalence_curve(params: &DiseaseParams) -> Result<PrevalenceCurve> {
    if params.horizon == 0 {
        return Err(Error::EmptyCurve);
    }
    let shedding = f64::from(params.shedding_period);
    let beta = params.r0 / shedding;
    let gamma = 1.0 / shedding;
    if !beta.is_finite() || !gamma.is_finite() {
        return Err(Error::Parameter(format!(
            "beta = {beta}, gamma = {gamma} (r0 = {}, shedding_period = {})",
            params.r0, params.shedding_period
        )));
    }
    let i0 = params.initial_infectious_fraction;
    let ceiling = 1.0 - i0;

    let mut susceptible = 1.0 - i0;
    let mut infectious = i0;
    let mut cumulative = 0.0;
    let mut daily_incidence = Vec::with_capacity(params.horizon as usize);
    for _ in 0..params.horizon {
        let incidence = (beta * susceptible * infectious)
            .min(ceiling - cumulative)
            .max(0.0);
        let removed = gamma * infectious;
        susceptible -= incidence;
        infectious += incidence - removed;
        cumulative += incidence;
        daily_incidence.push(incidence);
    }
    Ok(PrevalenceCurve { daily_incidence })
}

impl From<Vec<f64>> for PrevalenceCurve {
    /// Wraps a hand-built curve. Values are clamped into `[0, 1]`.
    fn from(values: Vec<f64>) -> Self {
        Self {
            daily_incidence: values.into_iter().map(|x| x.clamp(0.0, 1.0)).collect(),
        }
    }
}
