use std::collections::BTreeMap;

use serde::Serialize;

use crate::instance::{check_same_instance, verify_plan};
use crate::{to_miles, Cost, Error, Instance, Leg, Plan, Result};

/// Share of empty driving added to first- and last-mile legs.
pub const DEFAULT_EMPTY_MILE_FACTOR: f64 = 0.25;

/// Estimated cost of serving the orders today versus through the hub
/// network, in cost-weighted miles. A model, not a measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SavingsReport {
    /// Every order driven directly and the truck returning empty.
    pub current_cost: f64,
    pub athn_cost: f64,
    pub savings_fraction: f64,
    pub first_last_miles: f64,
    pub autonomous_miles: f64,
    pub empty_mile_factor: f64,
    pub auto_cost_factor: f64,
}

impl SavingsReport {
    pub const CSV_HEADER: &'static str =
        "current_cost,athn_cost,savings_fraction,first_last_miles,autonomous_miles,empty_mile_factor,auto_cost_factor";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.1},{:.1},{:.6},{:.1},{:.1},{},{}",
            self.current_cost,
            self.athn_cost,
            self.savings_fraction,
            self.first_last_miles,
            self.autonomous_miles,
            self.empty_mile_factor,
            self.auto_cost_factor
        )
    }
}

/// Hub-network cost is first/last-mile miles inflated by the empty-mile
/// factor plus autonomous miles at the autonomous cost factor.
pub fn savings_from_costs(
    current_cost: f64,
    first_last_miles: f64,
    autonomous_miles: f64,
    empty_mile_factor: f64,
    auto_cost_factor: f64,
) -> SavingsReport {
    let athn_cost = first_last_miles * (1.0 + empty_mile_factor) + autonomous_miles * auto_cost_factor;
    SavingsReport {
        current_cost,
        athn_cost,
        savings_fraction: 1.0 - athn_cost / current_cost,
        first_last_miles,
        autonomous_miles,
        empty_mile_factor,
        auto_cost_factor,
    }
}

/// Savings of `plan` on `inst`. The autonomous cost factor defaults to the
/// instance's own.
pub fn savings_report(
    inst: &Instance,
    plan: &Plan,
    empty_mile_factor: f64,
    auto_cost_factor: Option<f64>,
) -> Result<SavingsReport> {
    check_same_instance(plan, inst)?;
    if let Some(v) = verify_plan(plan, inst).violation {
        return Err(Error::PlanMismatch(v.to_string()));
    }
    let net = inst.network();
    // Per order: (pickup site, dropoff site, first- plus last-mile distance).
    let mut orders: BTreeMap<u32, (Option<u32>, Option<u32>, Cost)> = BTreeMap::new();
    for t in inst.tasks() {
        let e = orders.entry(t.order_id).or_insert((None, None, 0));
        match t.leg {
            Leg::FirstMile => {
                e.0 = Some(t.origin);
                e.2 += net.dist(t.origin, t.dest)?;
            }
            Leg::LastMile => {
                e.1 = Some(t.dest);
                e.2 += net.dist(t.origin, t.dest)?;
            }
            Leg::Autonomous => {
                e.0.get_or_insert(t.origin);
                e.1.get_or_insert(t.dest);
            }
        }
    }
    let mut current: Cost = 0;
    let mut first_last: Cost = 0;
    for (id, (from, to, fl)) in orders {
        let (Some(from), Some(to)) = (from, to) else {
            return Err(Error::InvalidInstance(format!("order {id} has no pickup or dropoff")));
        };
        current += 2 * net.dist(from, to)?;
        first_last += fl;
    }
    Ok(savings_from_costs(
        to_miles(current),
        to_miles(first_last),
        to_miles(plan.total_cost),
        empty_mile_factor,
        auto_cost_factor.unwrap_or(inst.auto_cost_factor()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_when_nothing_is_cheaper() {
        let r = savings_from_costs(200.0, 50.0, 100.0, 1.0, 1.0);
        assert_eq!(r.athn_cost, 200.0);
        assert_eq!(r.savings_fraction, 0.0);
    }

    #[test]
    fn fewer_autonomous_miles_save_more() {
        let full = savings_from_costs(1000.0, 200.0, 600.0, 0.25, 0.75);
        let half = savings_from_costs(1000.0, 200.0, 300.0, 0.25, 0.75);
        assert!(half.savings_fraction > full.savings_fraction);
        assert!((full.savings_fraction - (1.0 - (250.0 + 450.0) / 1000.0)).abs() < 1e-12);
    }
}
