//! Splitting customer orders into first-mile, autonomous and last-mile tasks.

use serde::{Deserialize, Serialize};

use super::{Leg, Network, Task};
use crate::{Cost, Error, Minutes, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub id: u32,
    pub pickup_loc: u32,
    pub dropoff_loc: u32,
    pub pickup_time: Minutes,
}

/// Result of routing an order through the hub network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderSplit {
    Automatable {
        first_mile: Task,
        autonomous: Task,
        last_mile: Task,
    },
    /// Pickup and dropoff share their nearest hub, so there is no
    /// hub-to-hub leg.
    NonAutomatable { hub: u32 },
}

impl OrderSplit {
    pub fn tasks(&self) -> Option<[&Task; 3]> {
        match self {
            OrderSplit::Automatable {
                first_mile,
                autonomous,
                last_mile,
            } => Some([first_mile, autonomous, last_mile]),
            OrderSplit::NonAutomatable { .. } => None,
        }
    }
}

/// Splits an order into its three legs via the hubs nearest to the pickup
/// and dropoff locations. Each leg's pickup time is the planned arrival of
/// the freight at the leg's origin. Task ids are `3 * order.id + leg`.
pub fn split_order(order: &Order, net: &Network, service_time: Minutes) -> Result<OrderSplit> {
    let invalid = |reason: &str| Error::InvalidOrder {
        order: order.id,
        reason: reason.to_string(),
    };
    if order.pickup_loc == order.dropoff_loc {
        return Err(invalid("pickup and dropoff coincide"));
    }
    if net.location(order.pickup_loc)?.is_hub || net.location(order.dropoff_loc)?.is_hub {
        return Err(invalid("pickup and dropoff must be customer sites, not hubs"));
    }
    let h1 = net
        .nearest_hub(order.pickup_loc)?
        .ok_or_else(|| invalid("no hub reachable"))?;
    let h2 = net
        .nearest_hub(order.dropoff_loc)?
        .ok_or_else(|| invalid("no hub reachable"))?;
    if h1 == h2 {
        return Ok(OrderSplit::NonAutomatable { hub: h1 });
    }

    let leg = |n: u32, origin: u32, dest: u32, pickup_time: Minutes, leg: Leg| Task {
        id: 3 * order.id + n,
        origin,
        dest,
        pickup_time,
        leg,
        order_id: order.id,
    };
    let p_first = order.pickup_time;
    let p_auto = p_first + net.time(order.pickup_loc, h1)? + 2 * service_time;
    let p_last = p_auto + net.time(h1, h2)? + 2 * service_time;
    Ok(OrderSplit::Automatable {
        first_mile: leg(0, order.pickup_loc, h1, p_first, Leg::FirstMile),
        autonomous: leg(1, h1, h2, p_auto, Leg::Autonomous),
        last_mile: leg(2, h2, order.dropoff_loc, p_last, Leg::LastMile),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropReason {
    NoAutonomousLeg,
    ExcessiveDetour,
    Invalid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DroppedOrder {
    pub order: Order,
    pub reason: DropReason,
}

/// Keeps the orders worth routing through the hub network: those with
/// distinct hubs whose hub-routed distance is at most `detour_factor` times
/// the direct distance.
pub fn filter_orders(
    orders: &[Order],
    net: &Network,
    detour_factor: f64,
) -> (Vec<Order>, Vec<DroppedOrder>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for order in orders {
        let reason = match classify(order, net, detour_factor) {
            Ok(None) => {
                kept.push(order.clone());
                continue;
            }
            Ok(Some(reason)) => reason,
            Err(_) => DropReason::Invalid,
        };
        dropped.push(DroppedOrder {
            order: order.clone(),
            reason,
        });
    }
    (kept, dropped)
}

fn classify(order: &Order, net: &Network, detour_factor: f64) -> Result<Option<DropReason>> {
    match split_order(order, net, 0)? {
        OrderSplit::NonAutomatable { .. } => Ok(Some(DropReason::NoAutonomousLeg)),
        OrderSplit::Automatable {
            first_mile,
            autonomous,
            last_mile,
        } => {
            let routed: Cost = [&first_mile, &autonomous, &last_mile]
                .iter()
                .map(|t| net.dist(t.origin, t.dest))
                .sum::<Result<Cost>>()?;
            let direct = net.dist(order.pickup_loc, order.dropoff_loc)?;
            if routed as f64 > detour_factor * direct as f64 {
                Ok(Some(DropReason::ExcessiveDetour))
            } else {
                Ok(None)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Location, TravelMatrix};

    /// Sites A (id 0) and B (id 3) with hubs H0 (1) and H1 (2). Times are
    /// chosen independently of distances.
    fn net(time: [[i64; 4]; 4], dist: [[i64; 4]; 4]) -> Network {
        let locations = (0..4)
            .map(|id| Location {
                id,
                is_hub: id == 1 || id == 2,
                label: None,
                coord: None,
            })
            .collect();
        let rows = |m: [[i64; 4]; 4]| m.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
        Network::new(locations, TravelMatrix::from_rows(&rows(time), &rows(dist)).unwrap()).unwrap()
    }

    fn chain_net() -> Network {
        let time = [
            [0, 60, 260, 320],
            [60, 0, 200, 260],
            [260, 200, 0, 60],
            [320, 260, 60, 0],
        ];
        net(time, time.map(|r| r.map(|v| v * 10)))
    }

    #[test]
    fn split_chains_pickup_times() {
        let order = Order {
            id: 4,
            pickup_loc: 0,
            dropoff_loc: 3,
            pickup_time: 480,
        };
        let split = split_order(&order, &chain_net(), 30).unwrap();
        let [f, a, l] = split.tasks().unwrap();
        assert_eq!((f.origin, f.dest, f.pickup_time), (0, 1, 480));
        assert_eq!((a.origin, a.dest, a.pickup_time), (1, 2, 600));
        assert_eq!((l.origin, l.dest, l.pickup_time), (2, 3, 860));
        assert_eq!([f.id, a.id, l.id], [12, 13, 14]);
        assert!(split.tasks().unwrap().iter().all(|t| t.order_id == 4));
    }

    #[test]
    fn same_nearest_hub_is_not_automatable() {
        // Both sites are closest to H0.
        let time = [
            [0, 10, 50, 20],
            [10, 0, 40, 10],
            [50, 40, 0, 30],
            [20, 10, 30, 0],
        ];
        let n = net(time, time);
        let order = Order {
            id: 0,
            pickup_loc: 0,
            dropoff_loc: 3,
            pickup_time: 0,
        };
        assert_eq!(
            split_order(&order, &n, 30).unwrap(),
            OrderSplit::NonAutomatable { hub: 1 }
        );
        let (kept, dropped) = filter_orders(&[order], &n, 2.0);
        assert!(kept.is_empty());
        assert_eq!(dropped[0].reason, DropReason::NoAutonomousLeg);
    }

    #[test]
    fn detour_threshold() {
        // direct 100 mi, hub-routed 45 + 160 + 45 = 250 mi
        let d = [
            [0, 45, 140, 100],
            [45, 0, 160, 140],
            [140, 160, 0, 45],
            [100, 140, 45, 0],
        ];
        let n = net(d, d.map(|r| r.map(|v| v * 10)));
        let order = Order {
            id: 1,
            pickup_loc: 0,
            dropoff_loc: 3,
            pickup_time: 0,
        };
        let (kept, dropped) = filter_orders(std::slice::from_ref(&order), &n, 2.0);
        assert!(kept.is_empty());
        assert_eq!(dropped[0].reason, DropReason::ExcessiveDetour);

        // direct 431 mi, hub-routed 15 + 430 + 15 = 460 mi
        let d = [
            [0, 15, 440, 431],
            [15, 0, 430, 440],
            [440, 430, 0, 15],
            [431, 440, 15, 0],
        ];
        let n = net(d, d.map(|r| r.map(|v| v * 10)));
        let (kept, dropped) = filter_orders(&[order], &n, 2.0);
        assert_eq!(kept.len(), 1);
        assert!(dropped.is_empty());
    }

    #[test]
    fn hub_endpoints_are_invalid() {
        let order = Order {
            id: 1,
            pickup_loc: 1,
            dropoff_loc: 3,
            pickup_time: 0,
        };
        assert!(split_order(&order, &chain_net(), 30).is_err());
        let (_, dropped) = filter_orders(&[order], &chain_net(), 2.0);
        assert_eq!(dropped[0].reason, DropReason::Invalid);
    }
}
