use serde::{Deserialize, Serialize};

/// Absorbs representation error in `total × (1 − occupancy)` so that, for
/// example, 10 beds at 90% occupancy leave exactly one bed rather than
/// `floor(0.9999999999999998) = 0`.
const CAPACITY_EPSILON: f64 = 1e-9;

/// Beds available to the simulation: `floor(total_beds × (1 − occupancy))`.
///
/// `occupancy_fraction` is the share of beds already taken by patients who
/// are not part of the outbreak.
pub fn bed_capacity(total_beds: u64, occupancy_fraction: f64) -> u64 {
    let free =
        (total_beds as f64 * (1.0 - occupancy_fraction.clamp(0.0, 1.0)) + CAPACITY_EPSILON).floor();
    (free.max(0.0) as u64).min(total_beds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BedAllocation {
    /// Simulation beds occupied after placing today's demand.
    pub filled: u64,
    /// Part of today's demand that got a bed.
    pub newly_filled: u64,
    /// Part of today's demand that found no free bed.
    pub unmet: u64,
}

/// Places `demand` new patients into the free simulation beds.
///
/// `demand == newly_filled + unmet` always holds, and `filled` never exceeds
/// [`bed_capacity`] unless `currently_filled` already did.
pub fn allocate_beds(
    demand: u64,
    currently_filled: u64,
    total_beds: u64,
    occupancy_fraction: f64,
) -> BedAllocation {
    let capacity = bed_capacity(total_beds, occupancy_fraction);
    let free = capacity.saturating_sub(currently_filled);
    let newly_filled = demand.min(free);
    BedAllocation {
        filled: currently_filled + newly_filled,
        newly_filled,
        unmet: demand - newly_filled,
    }
}
