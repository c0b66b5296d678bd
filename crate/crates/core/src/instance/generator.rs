//! Synthetic instance generator.
//!
//! Hubs are scattered over a rectangular region, customer sites are clustered
//! around hubs, and orders connect sites that are a long-haul distance apart.
//! Distances are Euclidean rounded up to tenths of a mile and times are
//! distances at a constant speed rounded up to whole minutes. Rounding up
//! preserves the triangle inequality exactly.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::orders::{filter_orders, split_order, OrderSplit};
use super::{Instance, Location, Network, Order, TravelMatrix, DEFAULT_HORIZON};
use crate::{Cost, Error, Minutes, Result, COST_SCALE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub hubs: usize,
    /// Number of orders kept after filtering; one autonomous task each.
    pub orders: usize,
    pub sites_per_hub: usize,
    /// Width and height of the region in miles.
    pub region: [i64; 2],
    /// Maximum distance of a customer site from its hub, in miles.
    pub site_radius: i64,
    pub min_direct_miles: i64,
    pub max_direct_miles: i64,
    pub speed_mph: i64,
    pub fleet_size: usize,
    pub flexibility: Minutes,
    pub service_time: Minutes,
    pub horizon: Minutes,
    /// Customer pickups are drawn uniformly from `[0, pickup_span]`.
    pub pickup_span: Minutes,
    /// Draw the k-th kept order's pickup from the k-th of `orders` equal
    /// slices of the span instead, which evens out demand over the week.
    pub stratify_pickups: bool,
    pub auto_cost_factor: f64,
    pub detour_factor: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self::n17()
    }
}

impl GeneratorParams {
    /// 17 hubs and 437 orders over one week.
    pub fn n17() -> Self {
        GeneratorParams {
            hubs: 17,
            orders: 437,
            sites_per_hub: 6,
            region: [700, 500],
            site_radius: 40,
            min_direct_miles: 250,
            max_direct_miles: 700,
            speed_mph: 55,
            fleet_size: 50,
            flexibility: 60,
            service_time: 30,
            horizon: DEFAULT_HORIZON,
            pickup_span: 6 * 24 * 60 + 12 * 60,
            stratify_pickups: true,
            auto_cost_factor: 0.75,
            detour_factor: 2.0,
        }
    }

    /// 30 hubs and 468 orders over one week.
    pub fn n30() -> Self {
        GeneratorParams {
            hubs: 30,
            orders: 468,
            sites_per_hub: 4,
            ..Self::n17()
        }
    }

    /// A compact region with a short pickup span so that `orders` tasks
    /// interact; sized for exhaustive solving.
    pub fn tiny(orders: usize) -> Self {
        GeneratorParams {
            hubs: 4,
            orders,
            sites_per_hub: 3,
            region: [240, 160],
            site_radius: 20,
            min_direct_miles: 60,
            max_direct_miles: 300,
            fleet_size: 3,
            horizon: 2 * 24 * 60,
            pickup_span: 16 * 60,
            stratify_pickups: false,
            ..Self::n17()
        }
    }

    /// The N-17 preset with `orders` orders. Small instances offer fewer
    /// chaining opportunities, so the fleet is about 18 trucks per 100
    /// orders, comparable in slack to 50 trucks for 437 orders.
    pub fn scaled(orders: usize) -> Self {
        let base = Self::n17();
        let fleet = (18 * orders).div_ceil(100) + 1;
        GeneratorParams {
            orders,
            fleet_size: fleet,
            ..base
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.hubs < 2 {
            return bad("at least two hubs are required");
        }
        if self.orders < 1 {
            return bad("at least one order is required");
        }
        if self.sites_per_hub < 1 {
            return bad("sites_per_hub must be positive");
        }
        if self.region[0] < 1 || self.region[1] < 1 || self.site_radius < 0 {
            return bad("region and site radius must be positive");
        }
        if self.min_direct_miles > self.max_direct_miles {
            return bad("min_direct_miles exceeds max_direct_miles");
        }
        if self.speed_mph < 1 {
            return bad("speed must be positive");
        }
        if self.fleet_size < 1 || self.flexibility < 0 || self.service_time < 0 {
            return bad("fleet size, flexibility and service time must be valid");
        }
        if self.pickup_span < 0 || self.pickup_span > self.horizon {
            return bad("pickup span must lie within the horizon");
        }
        let hub_area = self.hubs as i64;
        if hub_area * (1 + self.sites_per_hub as i64) > self.region[0] * self.region[1] {
            return bad("region too small for distinct locations");
        }
        Ok(())
    }
}

/// Distance in tenths of a mile between integer-mile coordinates, rounded up.
fn planar_dist(a: [i64; 2], b: [i64; 2]) -> Cost {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    let sq = COST_SCALE * COST_SCALE * (dx * dx + dy * dy);
    let mut r = (sq as f64).sqrt() as i64;
    while r * r > sq {
        r -= 1;
    }
    while r * r < sq {
        r += 1;
    }
    r
}

/// Driving minutes for a distance at `speed_mph`, rounded up.
fn drive_minutes(dist: Cost, speed_mph: i64) -> Minutes {
    let num = dist * 60;
    let den = COST_SCALE * speed_mph;
    (num + den - 1) / den
}

/// Layouts drawn before giving up on finding enough long-haul orders.
const LAYOUT_ATTEMPTS: usize = 20;

/// Generates an instance; a pure function of `(params, seed)`. A layout
/// whose hubs are too close together to yield enough orders is redrawn.
pub fn generate_instance(params: &GeneratorParams, seed: u64) -> Result<Instance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..LAYOUT_ATTEMPTS {
        match try_layout(params, &mut rng)? {
            Ok(inst) => return Ok(inst),
            Err(kept) => best = best.max(kept),
        }
    }
    Err(Error::InvalidParams(format!(
        "only {best} of {} orders could be generated",
        params.orders
    )))
}

/// One layout and its orders, or the number of orders that fit.
fn try_layout(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Result<std::result::Result<Instance, u32>> {
    let mut taken = HashSet::new();
    let mut coords = Vec::new();
    let [w, h] = params.region;
    while coords.len() < params.hubs {
        let c = [rng.gen_range(0..=w), rng.gen_range(0..=h)];
        if taken.insert(c) {
            coords.push(c);
        }
    }
    for hub in 0..params.hubs {
        let mut placed = 0;
        while placed < params.sites_per_hub {
            let r = params.site_radius;
            let (dx, dy) = (rng.gen_range(-r..=r), rng.gen_range(-r..=r));
            if dx * dx + dy * dy > r * r {
                continue;
            }
            let c = [
                (coords[hub][0] + dx).clamp(0, w),
                (coords[hub][1] + dy).clamp(0, h),
            ];
            if taken.insert(c) {
                coords.push(c);
                placed += 1;
            }
        }
    }

    let locations: Vec<Location> = coords
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let is_hub = i < params.hubs;
            let label = if is_hub {
                format!("H{i:02}")
            } else {
                format!("C{:03}", i - params.hubs)
            };
            Location {
                id: i as u32,
                is_hub,
                label: Some(label),
                coord: Some(c),
            }
        })
        .collect();
    let dist: Vec<Vec<Cost>> = coords
        .iter()
        .map(|&a| coords.iter().map(|&b| planar_dist(a, b)).collect())
        .collect();
    let time: Vec<Vec<Minutes>> = dist
        .iter()
        .map(|row| row.iter().map(|&d| drive_minutes(d, params.speed_mph)).collect())
        .collect();
    let network = Network::new(locations, TravelMatrix::from_rows(&time, &dist)?)?;

    let sites = params.hubs..coords.len();
    let min_direct = params.min_direct_miles * COST_SCALE;
    let max_direct = params.max_direct_miles * COST_SCALE;
    let mut tasks = Vec::with_capacity(3 * params.orders);
    let mut kept = 0u32;
    let max_attempts = 2000 * params.orders;
    for _ in 0..max_attempts {
        if kept as usize == params.orders {
            break;
        }
        let pickup = rng.gen_range(sites.clone());
        let dropoff = rng.gen_range(sites.clone());
        let direct = network.matrix().dist(pickup, dropoff);
        if pickup == dropoff || direct < min_direct || direct > max_direct {
            continue;
        }
        let order = Order {
            id: kept,
            pickup_loc: pickup as u32,
            dropoff_loc: dropoff as u32,
            pickup_time: if params.stratify_pickups {
                let slot = params.pickup_span / params.orders as Minutes;
                let lo = slot * kept as Minutes;
                rng.gen_range(lo..=lo + slot.max(1) - 1)
            } else {
                rng.gen_range(0..=params.pickup_span)
            },
        };
        let (ok, _) = filter_orders(std::slice::from_ref(&order), &network, params.detour_factor);
        if ok.is_empty() {
            continue;
        }
        if let OrderSplit::Automatable {
            first_mile,
            autonomous,
            last_mile,
        } = split_order(&order, &network, params.service_time)?
        {
            if last_mile.pickup_time > params.horizon {
                continue;
            }
            tasks.extend([first_mile, autonomous, last_mile]);
            kept += 1;
        }
    }
    if (kept as usize) < params.orders {
        return Ok(Err(kept));
    }

    Instance::from_parts(
        network,
        tasks,
        params.fleet_size,
        params.flexibility,
        params.service_time,
        params.horizon,
        params.auto_cost_factor,
    )
    .map(Ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{task_duration, Leg};

    #[test]
    fn rounding_is_exact() {
        assert_eq!(planar_dist([0, 0], [3, 4]), 50);
        assert_eq!(planar_dist([0, 0], [1, 1]), 15);
        // 431 miles at 55 mph is 470.18 minutes, rounded up.
        assert_eq!(drive_minutes(4310, 55), 471);
        assert_eq!(drive_minutes(550, 55), 60);
    }

    #[test]
    fn long_haul_task_duration() {
        // A 431-mile leg with S = 30.
        assert_eq!(drive_minutes(4310, 55) + 2 * 30, 531);

        let inst = generate_instance(&GeneratorParams::tiny(2), 5).unwrap();
        let net = inst.network();
        for t in inst.tasks() {
            let d = task_duration(t, &inst).unwrap();
            assert_eq!(d, drive_minutes(net.dist(t.origin, t.dest).unwrap(), 55) + 60);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = GeneratorParams::scaled(40);
        let a = serde_json::to_string(&generate_instance(&p, 1).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_instance(&p, 1).unwrap()).unwrap();
        let c = serde_json::to_string(&generate_instance(&p, 2).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn n17_scale() {
        let inst = generate_instance(&GeneratorParams::n17(), 1).unwrap();
        assert_eq!(inst.network().hubs().count(), 17);
        assert_eq!(inst.autonomous().len(), 437);
        assert_eq!(inst.tasks().len(), 3 * 437);
        assert_eq!(inst.fleet_size(), 50);
        assert_eq!((inst.flexibility(), inst.service_time()), (60, 30));
    }

    #[test]
    fn tiny_instance_fits_oracle() {
        let inst = generate_instance(&GeneratorParams::tiny(5), 1).unwrap();
        assert_eq!(inst.autonomous().len(), 5);
        assert!(inst
            .tasks()
            .iter()
            .filter(|t| t.leg == Leg::Autonomous)
            .all(|t| t.pickup_time <= inst.horizon()));
    }

    #[test]
    fn rejects_degenerate_params() {
        let p = GeneratorParams { hubs: 0, ..GeneratorParams::tiny(3) };
        assert!(matches!(generate_instance(&p, 1), Err(Error::InvalidParams(_))));
        let p = GeneratorParams { orders: 0, ..GeneratorParams::tiny(3) };
        assert!(generate_instance(&p, 1).is_err());
    }
}
