use std::fmt;

use serde::Serialize;

use crate::instance::{check_same_instance, verify_plan, Check};
use crate::{Error, Instance, Minutes, Plan, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Task,
    Relocation,
}

impl fmt::Display for SegmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SegmentKind::Task => "task",
            SegmentKind::Relocation => "relocation",
        })
    }
}

/// One bar of the chart. Rows are trucks, numbered from zero in plan order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GanttSegment {
    pub row: usize,
    pub kind: SegmentKind,
    /// The task performed, or for a relocation the task driven to.
    pub task_id: u32,
    pub start: Minutes,
    pub end: Minutes,
}

impl GanttSegment {
    pub const CSV_HEADER: &'static str = "row,kind,task_id,start,end";
}

/// Task bars from the planned start times and durations, and a relocation
/// bar leaving right after each task whenever the next task starts elsewhere.
/// The plan must cover the instance's autonomous tasks exactly once; timing
/// violations are drawn as they are.
pub fn gantt_export(plan: &Plan, inst: &Instance) -> Result<Vec<GanttSegment>> {
    check_same_instance(plan, inst)?;
    if let Some(v) = verify_plan(plan, inst).violation.filter(|v| v.check() == Check::Coverage) {
        return Err(Error::PlanMismatch(v.to_string()));
    }
    let auto = inst.autonomous();
    let mut segments = Vec::new();
    for (row, route) in plan.routes.iter().enumerate() {
        let mut prev: Option<(usize, Minutes)> = None;
        for v in route {
            let t = inst.auto_position(v.task_id).expect("checked above");
            if let Some((p, end)) = prev {
                let tau = inst.reloc_time(&auto[p], &auto[t]);
                if tau > 0 {
                    segments.push(GanttSegment {
                        row,
                        kind: SegmentKind::Relocation,
                        task_id: v.task_id,
                        start: end,
                        end: end + tau,
                    });
                }
            }
            let end = v.start_time + auto[t].duration;
            segments.push(GanttSegment {
                row,
                kind: SegmentKind::Task,
                task_id: v.task_id,
                start: v.start_time,
                end,
            });
            prev = Some((t, end));
        }
    }
    Ok(segments)
}

pub fn gantt_csv(segments: &[GanttSegment]) -> String {
    let mut out = String::from(GanttSegment::CSV_HEADER);
    out.push('\n');
    for s in segments {
        out.push_str(&format!("{},{},{},{},{}\n", s.row, s.kind, s.task_id, s.start, s.end));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::line_network;
    use crate::instance::{Leg, Task, Visit};

    fn task(id: u32, origin: u32, dest: u32, p: Minutes) -> Task {
        Task {
            id,
            origin,
            dest,
            pickup_time: p,
            leg: Leg::Autonomous,
            order_id: id,
        }
    }

    #[test]
    fn back_to_back_tasks_have_no_relocation_bar() {
        // H0 -> H1 then H1 -> H0: 200 minutes of driving plus 60 of service each.
        let tasks = vec![task(0, 1, 2, 0), task(1, 2, 1, 260), task(2, 1, 2, 1000)];
        let inst = Instance::from_parts(line_network(), tasks, 2, 0, 30, 10_000, 0.75).unwrap();
        let route = vec![
            Visit { task_id: 0, start_time: 0 },
            Visit { task_id: 1, start_time: 260 },
        ];
        let plan = Plan::from_routes(vec![route, vec![Visit { task_id: 2, start_time: 1000 }]], &inst).unwrap();
        let segs = gantt_export(&plan, &inst).unwrap();
        assert_eq!(segs.len(), 3);
        assert!(segs.iter().all(|s| s.kind == SegmentKind::Task));
        assert_eq!((segs[1].row, segs[1].start, segs[1].end), (0, 260, 520));

        // 0 then 2 needs a drive back from H1 to H0.
        let plan = Plan::from_routes(
            vec![
                vec![Visit { task_id: 0, start_time: 0 }, Visit { task_id: 2, start_time: 1000 }],
                vec![Visit { task_id: 1, start_time: 260 }],
            ],
            &inst,
        )
        .unwrap();
        let segs = gantt_export(&plan, &inst).unwrap();
        let reloc: Vec<_> = segs.iter().filter(|s| s.kind == SegmentKind::Relocation).collect();
        assert_eq!(reloc.len(), 1);
        assert_eq!((reloc[0].row, reloc[0].start, reloc[0].end), (0, 260, 460));
        let csv = gantt_csv(&segs);
        assert!(csv.starts_with("row,kind,task_id,start,end\n0,task,0,0,260\n0,relocation,2,260,460\n"));
    }

    #[test]
    fn foreign_task_is_a_mismatch() {
        let inst = Instance::from_parts(line_network(), vec![task(0, 1, 2, 0)], 1, 0, 30, 10_000, 0.75).unwrap();
        let plan = Plan {
            routes: vec![vec![Visit { task_id: 9, start_time: 0 }]],
            total_cost: 0,
            empty_cost: 0,
        };
        assert!(matches!(gantt_export(&plan, &inst), Err(crate::Error::PlanMismatch(_))));
    }

    #[test]
    fn uncovered_task_is_a_mismatch() {
        let tasks = vec![task(0, 1, 2, 0), task(1, 2, 1, 260)];
        let inst = Instance::from_parts(line_network(), tasks, 2, 0, 30, 10_000, 0.75).unwrap();
        let plan = Plan::from_routes(vec![vec![Visit { task_id: 0, start_time: 0 }]], &inst).unwrap();
        assert!(matches!(gantt_export(&plan, &inst), Err(crate::Error::PlanMismatch(_))));
    }
}
