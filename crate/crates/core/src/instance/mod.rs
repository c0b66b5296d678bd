//! Problem data: locations, travel matrices, tasks and fleet parameters.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Cost, Error, Minutes, Result};

mod generator;
mod io;
mod orders;
mod plan;
mod verify;

pub use generator::{generate_instance, GeneratorParams};
pub use io::{load_instance, load_plan, save_instance, save_plan};
pub use orders::{filter_orders, split_order, DropReason, DroppedOrder, Order, OrderSplit};
pub use plan::{Plan, Visit};
pub(crate) use plan::check_same_instance;
pub use verify::{verify_plan, Check, VerificationReport, Violation};

/// One week in minutes.
pub const DEFAULT_HORIZON: Minutes = 7 * 24 * 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub id: u32,
    pub is_hub: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Plane position in miles. Only the generator uses it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<[i64; 2]>,
}

/// Square travel-time (minutes) and distance (tenths of a mile) matrices,
/// indexed by location position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TravelMatrix {
    n: usize,
    time: Vec<Minutes>,
    dist: Vec<Cost>,
}

impl TravelMatrix {
    pub fn from_rows(time: &[Vec<Minutes>], dist: &[Vec<Cost>]) -> Result<Self> {
        let n = time.len();
        if dist.len() != n {
            return Err(Error::InvalidInstance(format!(
                "time matrix has {n} rows but distance matrix has {}",
                dist.len()
            )));
        }
        for (name, rows) in [("time_matrix", time), ("dist_matrix", dist)] {
            if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(Error::InvalidInstance(format!(
                    "{name} row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        let m = TravelMatrix {
            n,
            time: time.concat(),
            dist: dist.concat(),
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for (name, data) in [("time_matrix", &self.time), ("dist_matrix", &self.dist)] {
            for i in 0..n {
                for j in 0..n {
                    let v = data[i * n + j];
                    if v < 0 {
                        return Err(Error::InvalidInstance(format!(
                            "{name}[{i}][{j}] = {v} is negative"
                        )));
                    }
                    if i == j && v != 0 {
                        return Err(Error::InvalidInstance(format!(
                            "{name}[{i}][{i}] = {v}, diagonal must be zero"
                        )));
                    }
                    if i != j && v == 0 {
                        return Err(Error::InvalidInstance(format!(
                            "{name}[{i}][{j}] is zero between distinct locations"
                        )));
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let ij = data[i * n + j];
                    for k in 0..n {
                        if data[i * n + k] > ij + data[j * n + k] {
                            return Err(Error::InvalidInstance(format!(
                                "{name} violates the triangle inequality at ({i}, {j}, {k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn time(&self, from: usize, to: usize) -> Minutes {
        self.time[from * self.n + to]
    }

    #[inline]
    pub fn dist(&self, from: usize, to: usize) -> Cost {
        self.dist[from * self.n + to]
    }

    pub fn time_rows(&self) -> Vec<Vec<Minutes>> {
        self.time.chunks(self.n.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn dist_rows(&self) -> Vec<Vec<Cost>> {
        self.dist.chunks(self.n.max(1)).map(<[_]>::to_vec).collect()
    }
}

/// Locations together with their travel matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    locations: Vec<Location>,
    matrix: TravelMatrix,
    index: HashMap<u32, usize>,
}

impl Network {
    pub fn new(locations: Vec<Location>, matrix: TravelMatrix) -> Result<Self> {
        if locations.len() != matrix.len() {
            return Err(Error::InvalidInstance(format!(
                "{} locations but matrices are {}x{}",
                locations.len(),
                matrix.len(),
                matrix.len()
            )));
        }
        let mut index = HashMap::with_capacity(locations.len());
        for (i, loc) in locations.iter().enumerate() {
            if index.insert(loc.id, i).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "duplicate location id {}",
                    loc.id
                )));
            }
        }
        Ok(Network {
            locations,
            matrix,
            index,
        })
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn matrix(&self) -> &TravelMatrix {
        &self.matrix
    }

    pub fn index_of(&self, id: u32) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownLocation(id))
    }

    pub fn location(&self, id: u32) -> Result<&Location> {
        Ok(&self.locations[self.index_of(id)?])
    }

    pub fn time(&self, from: u32, to: u32) -> Result<Minutes> {
        Ok(self.matrix.time(self.index_of(from)?, self.index_of(to)?))
    }

    pub fn dist(&self, from: u32, to: u32) -> Result<Cost> {
        Ok(self.matrix.dist(self.index_of(from)?, self.index_of(to)?))
    }

    pub fn hubs(&self) -> impl Iterator<Item = &Location> {
        self.locations.iter().filter(|l| l.is_hub)
    }

    /// Hub closest to `id` by distance; ties go to the lowest hub id.
    pub fn nearest_hub(&self, id: u32) -> Result<Option<u32>> {
        let from = self.index_of(id)?;
        let best = self
            .locations
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_hub)
            .min_by_key(|(j, l)| (self.matrix.dist(from, *j), l.id))
            .map(|(_, l)| l.id);
        Ok(best)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Leg {
    FirstMile,
    Autonomous,
    LastMile,
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Leg::FirstMile => "first-mile",
            Leg::Autonomous => "autonomous",
            Leg::LastMile => "last-mile",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: u32,
    pub origin: u32,
    pub dest: u32,
    pub pickup_time: Minutes,
    pub leg: Leg,
    pub order_id: u32,
}

/// An autonomous task resolved against the network, with its derived
/// duration and loaded distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AutoTask {
    pub id: u32,
    /// Position in [`Instance::tasks`].
    pub task: usize,
    pub origin: usize,
    pub dest: usize,
    pub pickup: Minutes,
    pub duration: Minutes,
    pub loaded: Cost,
}

/// File representation of an instance. Every field is required.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceData {
    pub locations: Vec<Location>,
    pub time_matrix: Vec<Vec<Minutes>>,
    pub dist_matrix: Vec<Vec<Cost>>,
    pub tasks: Vec<Task>,
    pub fleet_size: usize,
    pub flexibility: Minutes,
    pub service_time: Minutes,
    pub horizon: Minutes,
    pub auto_cost_factor: f64,
}

/// A validated problem instance. Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceData", into = "InstanceData")]
pub struct Instance {
    network: Network,
    tasks: Vec<Task>,
    fleet_size: usize,
    flexibility: Minutes,
    service_time: Minutes,
    horizon: Minutes,
    auto_cost_factor: f64,
    auto: Vec<AutoTask>,
    task_index: HashMap<u32, usize>,
}

impl Instance {
    pub fn new(data: InstanceData) -> Result<Self> {
        let matrix = TravelMatrix::from_rows(&data.time_matrix, &data.dist_matrix)?;
        let network = Network::new(data.locations, matrix)?;
        Self::from_parts(
            network,
            data.tasks,
            data.fleet_size,
            data.flexibility,
            data.service_time,
            data.horizon,
            data.auto_cost_factor,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        network: Network,
        tasks: Vec<Task>,
        fleet_size: usize,
        flexibility: Minutes,
        service_time: Minutes,
        horizon: Minutes,
        auto_cost_factor: f64,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if fleet_size < 1 {
            return bad("fleet_size must be at least 1".into());
        }
        if flexibility < 0 {
            return bad(format!("flexibility {flexibility} is negative"));
        }
        if service_time < 0 {
            return bad(format!("service_time {service_time} is negative"));
        }
        if horizon < 0 {
            return bad(format!("horizon {horizon} is negative"));
        }
        if !(auto_cost_factor > 0.0 && auto_cost_factor <= 1.0) {
            return bad(format!(
                "auto_cost_factor {auto_cost_factor} must lie in (0, 1]"
            ));
        }

        let mut task_index = HashMap::with_capacity(tasks.len());
        let mut auto = Vec::new();
        for (pos, t) in tasks.iter().enumerate() {
            if task_index.insert(t.id, pos).is_some() {
                return bad(format!("duplicate task id {}", t.id));
            }
            let o = network.index_of(t.origin)?;
            let d = network.index_of(t.dest)?;
            if o == d {
                return bad(format!("task {} has identical origin and destination", t.id));
            }
            if t.pickup_time < 0 || t.pickup_time > horizon {
                return bad(format!(
                    "task {} pickup time {} outside horizon [0, {horizon}]",
                    t.id, t.pickup_time
                ));
            }
            if t.leg == Leg::Autonomous {
                let locs = network.locations();
                if !locs[o].is_hub || !locs[d].is_hub {
                    return bad(format!(
                        "autonomous task {} must run between hubs",
                        t.id
                    ));
                }
                let m = network.matrix();
                auto.push(AutoTask {
                    id: t.id,
                    task: pos,
                    origin: o,
                    dest: d,
                    pickup: t.pickup_time,
                    duration: m.time(o, d) + 2 * service_time,
                    loaded: m.dist(o, d),
                });
            }
        }
        if !auto.is_empty() && network.hubs().count() < 2 {
            return bad("autonomous tasks require at least two hubs".into());
        }

        Ok(Instance {
            network,
            tasks,
            fleet_size,
            flexibility,
            service_time,
            horizon,
            auto_cost_factor,
            auto,
            task_index,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn matrix(&self) -> &TravelMatrix {
        self.network.matrix()
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    /// The autonomous tasks, in file order. Solvers index tasks by their
    /// position in this slice.
    pub fn autonomous(&self) -> &[AutoTask] {
        &self.auto
    }

    pub fn task(&self, id: u32) -> Result<&Task> {
        self.task_index
            .get(&id)
            .map(|&i| &self.tasks[i])
            .ok_or(Error::UnknownTask(id))
    }

    /// Position of an autonomous task in [`Instance::autonomous`].
    pub fn auto_position(&self, id: u32) -> Option<usize> {
        self.auto.iter().position(|a| a.id == id)
    }

    pub fn fleet_size(&self) -> usize {
        self.fleet_size
    }

    pub fn flexibility(&self) -> Minutes {
        self.flexibility
    }

    pub fn service_time(&self) -> Minutes {
        self.service_time
    }

    pub fn horizon(&self) -> Minutes {
        self.horizon
    }

    pub fn auto_cost_factor(&self) -> f64 {
        self.auto_cost_factor
    }

    /// Empty driving time from the end of `from` to the start of `to`.
    #[inline]
    pub fn reloc_time(&self, from: &AutoTask, to: &AutoTask) -> Minutes {
        self.matrix().time(from.dest, to.origin)
    }

    /// Empty driving distance from the end of `from` to the start of `to`.
    #[inline]
    pub fn reloc_cost(&self, from: &AutoTask, to: &AutoTask) -> Cost {
        self.matrix().dist(from.dest, to.origin)
    }

    pub fn with_flexibility(&self, flexibility: Minutes) -> Result<Self> {
        if flexibility < 0 {
            return Err(Error::InvalidInstance(format!(
                "flexibility {flexibility} is negative"
            )));
        }
        Ok(Instance {
            flexibility,
            ..self.clone()
        })
    }

    pub fn with_fleet_size(&self, fleet_size: usize) -> Result<Self> {
        if fleet_size < 1 {
            return Err(Error::InvalidInstance("fleet_size must be at least 1".into()));
        }
        Ok(Instance {
            fleet_size,
            ..self.clone()
        })
    }

    pub fn with_auto_cost_factor(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(Error::InvalidInstance(format!(
                "auto_cost_factor {factor} must lie in (0, 1]"
            )));
        }
        Ok(Instance {
            auto_cost_factor: factor,
            ..self.clone()
        })
    }

    pub fn to_data(&self) -> InstanceData {
        InstanceData {
            locations: self.network.locations.clone(),
            time_matrix: self.matrix().time_rows(),
            dist_matrix: self.matrix().dist_rows(),
            tasks: self.tasks.clone(),
            fleet_size: self.fleet_size,
            flexibility: self.flexibility,
            service_time: self.service_time,
            horizon: self.horizon,
            auto_cost_factor: self.auto_cost_factor,
        }
    }
}

impl TryFrom<InstanceData> for Instance {
    type Error = Error;

    fn try_from(data: InstanceData) -> Result<Self> {
        Instance::new(data)
    }
}

impl From<Instance> for InstanceData {
    fn from(inst: Instance) -> Self {
        inst.to_data()
    }
}

/// Duration of a task: driving time plus loading and unloading.
pub fn task_duration(task: &Task, inst: &Instance) -> Result<Minutes> {
    Ok(inst.network.time(task.origin, task.dest)? + 2 * inst.service_time)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Two hubs and two customer sites on a line: A - H0 - H1 - B.
    pub(crate) fn line_network() -> Network {
        let xs = [0i64, 60, 260, 320];
        let locations = vec![
            Location { id: 0, is_hub: false, label: Some("A".into()), coord: None },
            Location { id: 1, is_hub: true, label: Some("H0".into()), coord: None },
            Location { id: 2, is_hub: true, label: Some("H1".into()), coord: None },
            Location { id: 3, is_hub: false, label: Some("B".into()), coord: None },
        ];
        let rows = |scale: i64| -> Vec<Vec<i64>> {
            xs.iter()
                .map(|a| xs.iter().map(|b| (a - b).abs() * scale).collect())
                .collect()
        };
        let m = TravelMatrix::from_rows(&rows(1), &rows(10)).unwrap();
        Network::new(locations, m).unwrap()
    }

    fn data_with(time: Vec<Vec<i64>>) -> InstanceData {
        let inst = Instance::from_parts(line_network(), vec![], 1, 60, 30, 600, 0.75).unwrap();
        InstanceData { time_matrix: time, ..inst.to_data() }
    }

    #[test]
    fn duration_adds_two_service_times() {
        let tasks = vec![Task {
            id: 7,
            origin: 1,
            dest: 2,
            pickup_time: 0,
            leg: Leg::Autonomous,
            order_id: 0,
        }];
        let inst = Instance::from_parts(line_network(), tasks, 1, 60, 30, 600, 0.75).unwrap();
        // tau(H0, H1) = 200
        assert_eq!(task_duration(&inst.tasks()[0], &inst).unwrap(), 260);
        assert_eq!(inst.autonomous()[0].duration, 260);
        assert_eq!(inst.autonomous()[0].loaded, 2000);

        let zero_s = Instance::from_parts(
            line_network(),
            inst.tasks().to_vec(),
            1,
            60,
            0,
            600,
            0.75,
        )
        .unwrap();
        assert_eq!(task_duration(&zero_s.tasks()[0], &zero_s).unwrap(), 200);
    }

    #[test]
    fn duration_rejects_unknown_location() {
        let inst = Instance::from_parts(line_network(), vec![], 1, 60, 30, 600, 0.75).unwrap();
        let t = Task {
            id: 1,
            origin: 1,
            dest: 99,
            pickup_time: 0,
            leg: Leg::Autonomous,
            order_id: 0,
        };
        assert!(matches!(task_duration(&t, &inst), Err(Error::UnknownLocation(99))));
    }

    #[test]
    fn rejects_negative_and_asymmetric_diagonal_entries() {
        let mut time = line_network().matrix().time_rows();
        time[0][1] = -5;
        let err = Instance::new(data_with(time)).unwrap_err();
        assert!(err.to_string().contains("negative"), "{err}");

        let mut time = line_network().matrix().time_rows();
        time[2][2] = 3;
        assert!(Instance::new(data_with(time)).is_err());
    }

    #[test]
    fn rejects_triangle_violation() {
        let mut time = line_network().matrix().time_rows();
        time[0][3] = 1000;
        let err = Instance::new(data_with(time)).unwrap_err();
        assert!(err.to_string().contains("triangle"), "{err}");
    }

    #[test]
    fn autonomous_tasks_need_hub_endpoints() {
        let tasks = vec![Task {
            id: 1,
            origin: 0,
            dest: 2,
            pickup_time: 0,
            leg: Leg::Autonomous,
            order_id: 0,
        }];
        assert!(Instance::from_parts(line_network(), tasks, 1, 60, 30, 600, 0.75).is_err());
    }

    #[test]
    fn nearest_hub_breaks_ties_by_lowest_id() {
        // Equidistant from both hubs.
        let xs = [0i64, 100, 50];
        let rows: Vec<Vec<i64>> = xs
            .iter()
            .map(|a| xs.iter().map(|b| (a - b).abs()).collect())
            .collect();
        let locations = vec![
            Location { id: 5, is_hub: true, label: None, coord: None },
            Location { id: 3, is_hub: true, label: None, coord: None },
            Location { id: 9, is_hub: false, label: None, coord: None },
        ];
        let net = Network::new(locations, TravelMatrix::from_rows(&rows, &rows).unwrap()).unwrap();
        assert_eq!(net.nearest_hub(9).unwrap(), Some(3));
    }
}
