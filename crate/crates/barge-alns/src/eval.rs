//! Schedule decoding and loss evaluation.
//!
//! A route fixes only the visiting order; times and loads follow from an
//! earliest-start decode: a tugboat leaves the depot at hour zero, arrives
//! at each node after the travel time of the leg, and stays exactly long
//! enough to satisfy the node's readiness (window open, and for barges the
//! idle time). Loads change by one full barge at laden endpoints, one empty
//! barge at pickups, and drop at an empty-barge destination everything
//! collected for that order since the tugboat's previous call there.
//!
//! The loss of a solution is the travel cost of all legs, depot legs
//! included, plus weighted penalties for lateness, working-hours overruns
//! and unassigned work. Waiting time is free.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, NodeId, NodeKind, RouteElement, Solution};

/// Decoded timing and load state of one route element, loads as seen when
/// the tugboat departs the node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementTiming {
    pub arrival: f64,
    pub stay: f64,
    pub full: i32,
    pub empty: i32,
    /// Barges handed over at an empty-barge destination visit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropped: Option<u32>,
}

impl ElementTiming {
    /// When service at the node completes and the tugboat may depart.
    pub fn departure(&self) -> f64 {
        self.arrival + self.stay
    }
}

/// Per-route element timings plus the arrival time back at the depot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub timings: Vec<Vec<ElementTiming>>,
    pub finish: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("route {route} reaches a negative full-barge load at node {node}")]
    NegativeLoad { route: usize, node: NodeId },
}

/// Loss components; `total` is their sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub time_cost: f64,
    pub distance_cost: f64,
    pub tw_penalty: f64,
    pub hours_penalty: f64,
    pub unserved_penalty: f64,
    pub total: f64,
}

/// Earliest-start decode of every route in the solution.
pub fn propagate(inst: &Instance, sol: &Solution) -> Result<Schedule, EvalError> {
    let mut timings = Vec::with_capacity(sol.routes.len());
    let mut finish = Vec::with_capacity(sol.routes.len());
    for (p, route) in sol.routes.iter().enumerate() {
        let (t, f) = walk_route(inst, p, route)?;
        timings.push(t);
        finish.push(f);
    }
    Ok(Schedule { timings, finish })
}

fn walk_route(
    inst: &Instance,
    p: usize,
    route: &[RouteElement],
) -> Result<(Vec<ElementTiming>, f64), EvalError> {
    let mut timings = Vec::with_capacity(route.len());
    let mut prev = inst.start_node();
    let mut depart = 0.0f64;
    let mut full = 0i32;
    let mut empty = 0i32;
    // Barges collected per empty-barge order since its last visit here.
    let mut trip: Vec<u32> = vec![0; inst.empty.len()];
    for e in route {
        let arrival = depart + inst.travel_time(prev, e.node);
        let stay = (inst.readiness(e.node) - arrival).max(0.0);
        let mut dropped = None;
        match inst.kind(e.node) {
            NodeKind::LadenOrigin(_) => full += 1,
            NodeKind::LadenDestination(_) => {
                full -= 1;
                if full < 0 {
                    return Err(EvalError::NegativeLoad { route: p, node: e.node });
                }
            }
            NodeKind::Barge(_) => {
                empty += 1;
                if let Some(order) = e.serves {
                    trip[order] += 1;
                }
            }
            NodeKind::EmptyDestination(m) => {
                let d = trip[m];
                empty -= d as i32;
                trip[m] = 0;
                dropped = Some(d);
            }
        }
        timings.push(ElementTiming { arrival, stay, full, empty, dropped });
        depart = arrival + stay;
        prev = e.node;
    }
    Ok((timings, depart + inst.travel_time(prev, inst.end_node())))
}

/// Travel cost plus soft penalties of a single route, without materializing
/// the schedule. Kept allocation-free for the insertion search.
pub fn route_cost(inst: &Instance, p: usize, route: &[RouteElement]) -> Result<f64, EvalError> {
    let tug = &inst.tugboats[p];
    let pen = &inst.params.penalties;
    let mut cost = 0.0;
    let mut prev = inst.start_node();
    let mut depart = 0.0f64;
    let mut full = 0i32;
    let mut late = 0.0f64;
    for e in route {
        cost += tug.cost_per_time * inst.travel_time(prev, e.node)
            + tug.cost_per_distance * inst.distance(prev, e.node);
        let arrival = depart + inst.travel_time(prev, e.node);
        let start = arrival.max(inst.readiness(e.node));
        late += (start - inst.window(e.node).close()).max(0.0);
        match inst.kind(e.node) {
            NodeKind::LadenOrigin(_) => full += 1,
            NodeKind::LadenDestination(_) => {
                full -= 1;
                if full < 0 {
                    return Err(EvalError::NegativeLoad { route: p, node: e.node });
                }
            }
            _ => {}
        }
        depart = start;
        prev = e.node;
    }
    cost += tug.cost_per_time * inst.travel_time(prev, inst.end_node())
        + tug.cost_per_distance * inst.distance(prev, inst.end_node());
    let finish = depart + inst.travel_time(prev, inst.end_node());
    cost += pen.time_window * late;
    cost += pen.working_hours * (finish - inst.tugboats[p].max_working_time).max(0.0);
    Ok(cost)
}

/// [`route_cost`] plus a hard tow-capacity check. Returns `None` when the
/// route would tow more than `capacity` barges at once or drop a full barge
/// it never picked up, so infeasible insertion candidates are discarded
/// instead of mispriced.
pub fn route_cost_capped(inst: &Instance, p: usize, route: &[RouteElement]) -> Option<f64> {
    let cap = inst.capacity() as i32;
    let mut full = 0i32;
    let mut empty = 0i32;
    let mut trip = vec![0i32; inst.empty.len()];
    for e in route {
        match inst.kind(e.node) {
            NodeKind::LadenOrigin(_) => full += 1,
            NodeKind::LadenDestination(_) => full -= 1,
            NodeKind::Barge(_) => {
                empty += 1;
                if let Some(order) = e.serves {
                    trip[order] += 1;
                }
            }
            NodeKind::EmptyDestination(m) => {
                empty -= trip[m];
                trip[m] = 0;
            }
        }
        if full < 0 || empty < 0 || full + empty > cap {
            return None;
        }
    }
    route_cost(inst, p, route).ok()
}

/// Weighted count of unassigned work: each pooled order plus each barge
/// still owed to an empty-barge order counts one unit.
pub fn unserved_units(sol: &Solution) -> u32 {
    sol.pool_laden.len() as u32
        + sol.pool_empty.len() as u32
        + sol.pool_empty.iter().map(|&(_, c)| c).sum::<u32>()
}

pub fn loss_with_schedule(inst: &Instance, sol: &Solution, sched: &Schedule) -> LossBreakdown {
    let pen = &inst.params.penalties;
    let mut time_cost = 0.0;
    let mut distance_cost = 0.0;
    let mut late = 0.0;
    let mut over = 0.0;
    for (p, route) in sol.routes.iter().enumerate() {
        let tug = &inst.tugboats[p];
        let mut prev = inst.start_node();
        for e in route {
            time_cost += tug.cost_per_time * inst.travel_time(prev, e.node);
            distance_cost += tug.cost_per_distance * inst.distance(prev, e.node);
            prev = e.node;
        }
        time_cost += tug.cost_per_time * inst.travel_time(prev, inst.end_node());
        distance_cost += tug.cost_per_distance * inst.distance(prev, inst.end_node());
        for (e, t) in route.iter().zip(&sched.timings[p]) {
            late += (t.departure() - inst.window(e.node).close()).max(0.0);
        }
        over += (sched.finish[p] - tug.max_working_time).max(0.0);
    }
    let tw_penalty = pen.time_window * late;
    let hours_penalty = pen.working_hours * over;
    let unserved_penalty = pen.unserved * unserved_units(sol) as f64;
    LossBreakdown {
        time_cost,
        distance_cost,
        tw_penalty,
        hours_penalty,
        unserved_penalty,
        total: time_cost + distance_cost + tw_penalty + hours_penalty + unserved_penalty,
    }
}

/// Decode the solution and price it in one call.
pub fn loss(inst: &Instance, sol: &Solution) -> Result<LossBreakdown, EvalError> {
    let sched = propagate(inst, sol)?;
    Ok(loss_with_schedule(inst, sol, &sched))
}
