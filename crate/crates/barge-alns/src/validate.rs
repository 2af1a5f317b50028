//! Hard-feasibility validation of a solution against its instance.
//!
//! The validator re-derives times and loads with its own tolerant walk
//! (loads may go negative here; that is reported, not panicked on) and
//! checks the full constraint catalog. Each finding carries the constraint
//! tag, the tugboat and node involved where meaningful, and a magnitude in
//! the constraint's natural unit (hours, barges, visits). An empty result
//! means the solution is hard-feasible.
//!
//! [`validate`] checks the earliest-start schedule implied by the routes;
//! [`validate_with_schedule`] checks a supplied schedule instead, which can
//! additionally violate the consistency constraints (time chain, load
//! recursions, boundary conditions) that a derived schedule satisfies by
//! construction.

use std::fmt;

use crate::eval::Schedule;
use crate::model::{EmptyId, Instance, NodeId, NodeKind, RouteElement, Solution};

/// Feasibility tolerance for consistency checks between supplied times and
/// recomputed ones. Inequality constraints that mirror loss penalties use
/// exact comparisons so that a clean validation implies zero penalties.
pub const TIME_TOLERANCE: f64 = 1e-6;

/// The constraint catalog. One tag per checkable rule of the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    /// Routes may only open at a laden origin or a barge pickup.
    DepartureArc,
    /// Routes may only close at a laden or empty-barge destination.
    ArrivalArc,
    /// Every laden origin is visited exactly once.
    OriginCoverage,
    /// Every laden destination is visited exactly once.
    DestinationCoverage,
    /// An empty-barge order is served by one or two tugboats, each calling
    /// at the destination at most twice.
    ServiceShape,
    /// Each barge is picked up at most once.
    BargeSingleUse,
    /// Every towed barge serves an order whose destination the same route
    /// visits later.
    PickupPurpose,
    /// Supplied schedule rows must align with the route elements.
    FlowContinuity,
    /// A laden order's endpoints share one route, origin first.
    PairAssignment,
    /// Barges handed over at a visit equal those collected for the order
    /// since the tugboat's previous call there.
    TripBalance,
    /// Total barges handed over match the order's demand.
    DemandTotal,
    /// A second visit requires a first visit on the same route.
    SecondVisitSupport,
    /// The second visit comes after the first.
    VisitOrder,
    /// No duplicated visit index at a destination on one route.
    VisitDuplicate,
    /// Routes finish within the tugboat's working-hours limit.
    WorkingHours,
    /// No departure from a barge before it becomes available.
    BargeReadiness,
    /// Towed barges never exceed the capacity.
    TowCapacity,
    /// Loads never go negative.
    LoadSanity,
    /// Service completes no earlier than the window opens.
    WindowOpen,
    /// Service completes no later than the window closes.
    WindowClose,
    /// Window open, checked per visit at empty-barge destinations.
    VisitWindowOpen,
    /// Window close, checked per visit at empty-barge destinations.
    VisitWindowClose,
    /// Each arrival equals the previous departure plus travel time.
    TimeChain,
    /// Delivery of a pair happens no earlier than origin departure plus
    /// direct travel.
    PairTravelTime,
    /// A visit happens no earlier than each served barge's departure plus
    /// direct travel.
    PickupTravelTime,
    /// Full-barge load steps by one at origins and is carried elsewhere.
    FullLoadStep,
    /// Full-barge load drops by one at laden destinations.
    FullLoadDrop,
    /// Empty-barge load follows pickups and hand-overs.
    EmptyLoadStep,
    /// First arrival equals travel from the depot at hour zero.
    StartTime,
    /// Empty-barge load starts from zero.
    StartEmptyLoad,
    /// Full-barge load starts from zero.
    StartFullLoad,
    /// No empty barges are towed back to the depot.
    EndEmptyLoad,
    /// No full barges are towed back to the depot.
    EndFullLoad,
}

impl Constraint {
    /// Stable kebab-case code used in reports and the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Constraint::DepartureArc => "departure-arc",
            Constraint::ArrivalArc => "arrival-arc",
            Constraint::OriginCoverage => "origin-coverage",
            Constraint::DestinationCoverage => "destination-coverage",
            Constraint::ServiceShape => "service-shape",
            Constraint::BargeSingleUse => "barge-single-use",
            Constraint::PickupPurpose => "pickup-purpose",
            Constraint::FlowContinuity => "flow-continuity",
            Constraint::PairAssignment => "pair-assignment",
            Constraint::TripBalance => "trip-balance",
            Constraint::DemandTotal => "demand-total",
            Constraint::SecondVisitSupport => "second-visit-support",
            Constraint::VisitOrder => "visit-order",
            Constraint::VisitDuplicate => "visit-duplicate",
            Constraint::WorkingHours => "working-hours",
            Constraint::BargeReadiness => "barge-readiness",
            Constraint::TowCapacity => "tow-capacity",
            Constraint::LoadSanity => "load-sanity",
            Constraint::WindowOpen => "window-open",
            Constraint::WindowClose => "window-close",
            Constraint::VisitWindowOpen => "visit-window-open",
            Constraint::VisitWindowClose => "visit-window-close",
            Constraint::TimeChain => "time-chain",
            Constraint::PairTravelTime => "pair-travel-time",
            Constraint::PickupTravelTime => "pickup-travel-time",
            Constraint::FullLoadStep => "full-load-step",
            Constraint::FullLoadDrop => "full-load-drop",
            Constraint::EmptyLoadStep => "empty-load-step",
            Constraint::StartTime => "start-time",
            Constraint::StartEmptyLoad => "start-empty-load",
            Constraint::StartFullLoad => "start-full-load",
            Constraint::EndEmptyLoad => "end-empty-load",
            Constraint::EndFullLoad => "end-full-load",
        }
    }

    pub const ALL: [Constraint; 33] = [
        Constraint::DepartureArc,
        Constraint::ArrivalArc,
        Constraint::OriginCoverage,
        Constraint::DestinationCoverage,
        Constraint::ServiceShape,
        Constraint::BargeSingleUse,
        Constraint::PickupPurpose,
        Constraint::FlowContinuity,
        Constraint::PairAssignment,
        Constraint::TripBalance,
        Constraint::DemandTotal,
        Constraint::SecondVisitSupport,
        Constraint::VisitOrder,
        Constraint::VisitDuplicate,
        Constraint::WorkingHours,
        Constraint::BargeReadiness,
        Constraint::TowCapacity,
        Constraint::LoadSanity,
        Constraint::WindowOpen,
        Constraint::WindowClose,
        Constraint::VisitWindowOpen,
        Constraint::VisitWindowClose,
        Constraint::TimeChain,
        Constraint::PairTravelTime,
        Constraint::PickupTravelTime,
        Constraint::FullLoadStep,
        Constraint::FullLoadDrop,
        Constraint::EmptyLoadStep,
        Constraint::StartTime,
        Constraint::StartEmptyLoad,
        Constraint::StartFullLoad,
        Constraint::EndEmptyLoad,
        Constraint::EndFullLoad,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    pub tugboat: Option<usize>,
    pub node: Option<NodeId>,
    /// Size of the breach in the constraint's own unit.
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constraint.code())?;
        if let Some(p) = self.tugboat {
            write!(f, " tug={p}")?;
        }
        if let Some(n) = self.node {
            write!(f, " node={n}")?;
        }
        write!(f, " magnitude={:.6}", self.magnitude)
    }
}

/// Times and loads under scrutiny, either recomputed or supplied.
struct Row {
    arrival: f64,
    departure: f64,
    full: i64,
    empty: i64,
    dropped: i64,
}

struct Checker<'a> {
    inst: &'a Instance,
    sol: &'a Solution,
    out: Vec<Violation>,
}

pub fn validate(inst: &Instance, sol: &Solution) -> Vec<Violation> {
    let rows: Vec<Vec<Row>> = sol.routes.iter().map(|r| derive_rows(inst, r)).collect();
    let mut c = Checker { inst, sol, out: Vec::new() };
    c.check_structure();
    for (p, route) in sol.routes.iter().enumerate() {
        c.check_rows(p, route, &rows[p], false);
    }
    c.finish()
}

/// Validate against an externally supplied schedule, e.g. one loaded from a
/// solution file, instead of re-deriving it.
pub fn validate_with_schedule(inst: &Instance, sol: &Solution, sched: &Schedule) -> Vec<Violation> {
    let mut c = Checker { inst, sol, out: Vec::new() };
    c.check_structure();
    for (p, route) in sol.routes.iter().enumerate() {
        let supplied = sched.timings.get(p);
        let aligned = supplied.map(|t| t.len() == route.len()).unwrap_or(false);
        if !aligned {
            c.push(Constraint::FlowContinuity, Some(p), None, 1.0);
            continue;
        }
        let rows: Vec<Row> = route
            .iter()
            .zip(supplied.unwrap())
            .map(|(_, t)| Row {
                arrival: t.arrival,
                departure: t.arrival + t.stay,
                full: t.full as i64,
                empty: t.empty as i64,
                dropped: t.dropped.unwrap_or(0) as i64,
            })
            .collect();
        c.check_rows(p, route, &rows, true);
        // The supplied finish time is what the hours limit applies to.
        if let Some(&finish) = sched.finish.get(p) {
            let over = finish - inst.tugboats[p].max_working_time;
            if over > 0.0 {
                c.push(Constraint::WorkingHours, Some(p), None, over);
            }
            if let (Some(last), Some(row)) = (route.last(), rows.last()) {
                let expect = row.departure + inst.travel_time(last.node, inst.end_node());
                if (finish - expect).abs() > TIME_TOLERANCE {
                    c.push(Constraint::TimeChain, Some(p), None, (finish - expect).abs());
                }
            }
        } else {
            c.push(Constraint::FlowContinuity, Some(p), None, 1.0);
        }
    }
    c.finish()
}

/// The same earliest-start decode the evaluator uses, but tolerant of
/// malformed routes so that every problem surfaces as a violation.
fn derive_rows(inst: &Instance, route: &[RouteElement]) -> Vec<Row> {
    let mut rows = Vec::with_capacity(route.len());
    let mut prev = inst.start_node();
    let mut depart = 0.0f64;
    let mut full = 0i64;
    let mut empty = 0i64;
    let mut trip: Vec<i64> = vec![0; inst.empty.len()];
    for e in route {
        let arrival = depart + inst.travel_time(prev, e.node);
        let departure = arrival.max(inst.readiness(e.node));
        let mut dropped = 0i64;
        match inst.kind(e.node) {
            NodeKind::LadenOrigin(_) => full += 1,
            NodeKind::LadenDestination(_) => full -= 1,
            NodeKind::Barge(_) => {
                empty += 1;
                if let Some(m) = e.serves {
                    trip[m] += 1;
                }
            }
            NodeKind::EmptyDestination(m) => {
                dropped = trip[m];
                empty -= dropped;
                trip[m] = 0;
            }
        }
        rows.push(Row { arrival, departure, full, empty, dropped });
        depart = departure;
        prev = e.node;
    }
    rows
}

impl<'a> Checker<'a> {
    fn push(&mut self, constraint: Constraint, tugboat: Option<usize>, node: Option<NodeId>, magnitude: f64) {
        self.out.push(Violation { constraint, tugboat, node, magnitude });
    }

    fn finish(mut self) -> Vec<Violation> {
        self.out.sort_by(|a, b| {
            (a.constraint, a.tugboat, a.node)
                .partial_cmp(&(b.constraint, b.tugboat, b.node))
                .unwrap()
        });
        self.out
    }

    /// Route-shape checks that need no times or loads.
    fn check_structure(&mut self) {
        let inst = self.inst;
        for (p, route) in self.sol.routes.iter().enumerate() {
            if let Some(first) = route.first() {
                if !matches!(inst.kind(first.node), NodeKind::LadenOrigin(_) | NodeKind::Barge(_)) {
                    self.push(Constraint::DepartureArc, Some(p), Some(first.node), 1.0);
                }
            }
            if let Some(last) = route.last() {
                if !matches!(
                    inst.kind(last.node),
                    NodeKind::LadenDestination(_) | NodeKind::EmptyDestination(_)
                ) {
                    self.push(Constraint::ArrivalArc, Some(p), Some(last.node), 1.0);
                }
            }
        }

        self.check_coverage();
        self.check_pairs();
        self.check_service_shape();
        self.check_pickups();
        self.check_demand();
    }

    fn check_demand(&mut self) {
        let delivered = delivered_per_order(self.inst, self.sol);
        for (m, order) in self.inst.empty.iter().enumerate() {
            let diff = delivered[m] as i64 - order.required_barges as i64;
            if diff != 0 {
                self.push(
                    Constraint::DemandTotal,
                    None,
                    Some(order.destination),
                    diff.unsigned_abs() as f64,
                );
            }
        }
    }

    fn count_node(&self, node: NodeId) -> usize {
        self.sol
            .routes
            .iter()
            .flatten()
            .filter(|e| e.node == node)
            .count()
    }

    fn check_coverage(&mut self) {
        for order in 0..self.inst.laden.len() {
            let o = self.inst.laden[order].origin;
            let d = self.inst.laden[order].destination;
            let co = self.count_node(o);
            let cd = self.count_node(d);
            if co != 1 {
                self.push(Constraint::OriginCoverage, None, Some(o), (co as f64 - 1.0).abs());
            }
            if cd != 1 {
                self.push(Constraint::DestinationCoverage, None, Some(d), (cd as f64 - 1.0).abs());
            }
        }
        for barge in &self.inst.barges {
            let routed = self.count_node(barge.node);
            let pooled = self.sol.pool_barges.iter().filter(|&&n| n == barge.node).count();
            let c = routed + pooled;
            if c > 1 {
                self.push(Constraint::BargeSingleUse, None, Some(barge.node), c as f64 - 1.0);
            }
        }
    }

    fn check_pairs(&mut self) {
        for order in 0..self.inst.laden.len() {
            let o = self.inst.laden[order].origin;
            let d = self.inst.laden[order].destination;
            let find = |node: NodeId| {
                self.sol.routes.iter().enumerate().find_map(|(p, r)| {
                    r.iter().position(|e| e.node == node).map(|k| (p, k))
                })
            };
            match (find(o), find(d)) {
                (None, None) => {}
                (Some((po, ko)), Some((pd, kd))) => {
                    if po != pd {
                        self.push(Constraint::PairAssignment, Some(po), Some(o), 1.0);
                    } else if ko > kd {
                        self.push(Constraint::PairAssignment, Some(po), Some(d), 1.0);
                    }
                }
                (one, _) => {
                    let node = if one.is_some() { o } else { d };
                    self.push(Constraint::PairAssignment, None, Some(node), 1.0);
                }
            }
        }
    }

    fn check_service_shape(&mut self) {
        for (m, order) in self.inst.empty.iter().enumerate() {
            let dest = order.destination;
            let mut serving = 0usize;
            for (p, route) in self.sol.routes.iter().enumerate() {
                let visits: Vec<&RouteElement> =
                    route.iter().filter(|e| e.node == dest).collect();
                if visits.is_empty() {
                    continue;
                }
                serving += 1;
                if visits.len() > 2 {
                    self.push(Constraint::ServiceShape, Some(p), Some(dest), visits.len() as f64 - 2.0);
                }
                let firsts = visits.iter().filter(|e| e.visit == 1).count();
                let seconds = visits.iter().filter(|e| e.visit == 2).count();
                if firsts > 1 || seconds > 1 {
                    self.push(
                        Constraint::VisitDuplicate,
                        Some(p),
                        Some(dest),
                        (firsts.max(seconds) - 1) as f64,
                    );
                }
                if seconds > 0 && firsts == 0 {
                    self.push(Constraint::SecondVisitSupport, Some(p), Some(dest), 1.0);
                }
                if let (Some(k1), Some(k2)) = (
                    route.iter().position(|e| e.node == dest && e.visit == 1),
                    route.iter().position(|e| e.node == dest && e.visit == 2),
                ) {
                    if k2 < k1 {
                        self.push(Constraint::VisitOrder, Some(p), Some(dest), 1.0);
                    }
                }
            }
            if serving > 2 {
                self.push(Constraint::ServiceShape, None, Some(dest), serving as f64 - 2.0);
            }
            let _ = m;
        }
    }

    fn check_pickups(&mut self) {
        for (p, route) in self.sol.routes.iter().enumerate() {
            for (k, e) in route.iter().enumerate() {
                if !matches!(self.inst.kind(e.node), NodeKind::Barge(_)) {
                    continue;
                }
                let served = e.serves.filter(|&m| m < self.inst.empty.len());
                let has_later_visit = served.map(|m| {
                    let dest = self.inst.empty[m].destination;
                    route[k + 1..].iter().any(|later| later.node == dest)
                });
                if has_later_visit != Some(true) {
                    self.push(Constraint::PickupPurpose, Some(p), Some(e.node), 1.0);
                }
            }
        }
    }

    /// Checks on one route's times and loads. `supplied` marks externally
    /// provided rows, for which the consistency families can fire.
    fn check_rows(&mut self, p: usize, route: &[RouteElement], rows: &[Row], supplied: bool) {
        let inst = self.inst;
        if route.is_empty() {
            return;
        }

        // Window and readiness checks in the loss function's arithmetic.
        let mut max_load = 0i64;
        let mut min_load = 0i64;
        for (e, row) in route.iter().zip(rows) {
            let w = inst.window(e.node);
            let (open_tag, close_tag) = match inst.kind(e.node) {
                NodeKind::EmptyDestination(_) => {
                    (Constraint::VisitWindowOpen, Constraint::VisitWindowClose)
                }
                _ => (Constraint::WindowOpen, Constraint::WindowClose),
            };
            if row.departure < w.open() {
                self.push(open_tag, Some(p), Some(e.node), w.open() - row.departure);
            }
            if row.departure > w.close() {
                self.push(close_tag, Some(p), Some(e.node), row.departure - w.close());
            }
            if let NodeKind::Barge(b) = inst.kind(e.node) {
                let idle = inst.barges[b].idle_until;
                if row.departure < idle {
                    self.push(Constraint::BargeReadiness, Some(p), Some(e.node), idle - row.departure);
                }
            }
            max_load = max_load.max(row.full + row.empty);
            min_load = min_load.min(row.full.min(row.empty));
        }
        let cap = inst.capacity() as i64;
        if max_load > cap {
            self.push(Constraint::TowCapacity, Some(p), None, (max_load - cap) as f64);
        }
        if min_load < 0 {
            self.push(Constraint::LoadSanity, Some(p), None, -min_load as f64);
        }
        let last = rows.last().unwrap();
        if last.empty != 0 {
            self.push(Constraint::EndEmptyLoad, Some(p), None, last.empty.unsigned_abs() as f64);
        }
        if last.full != 0 {
            self.push(Constraint::EndFullLoad, Some(p), None, last.full.unsigned_abs() as f64);
        }

        if !supplied {
            // Derived rows satisfy the consistency families by construction;
            // only the working-hours bound remains.
            let last = route.last().unwrap();
            let finish =
                rows.last().unwrap().departure + inst.travel_time(last.node, inst.end_node());
            let over = finish - inst.tugboats[p].max_working_time;
            if over > 0.0 {
                self.push(Constraint::WorkingHours, Some(p), None, over);
            }
        } else {
            self.check_consistency(p, route, rows);
        }

        self.check_trips(p, route, rows);
        self.check_pair_times(p, route, rows);
        self.check_pickup_times(p, route, rows);
    }

    /// Time-chain, load recursions and boundary conditions of supplied rows.
    fn check_consistency(&mut self, p: usize, route: &[RouteElement], rows: &[Row]) {
        let inst = self.inst;
        let first_arrival = inst.travel_time(inst.start_node(), route[0].node);
        if (rows[0].arrival - first_arrival).abs() > TIME_TOLERANCE {
            self.push(
                Constraint::StartTime,
                Some(p),
                Some(route[0].node),
                (rows[0].arrival - first_arrival).abs(),
            );
        }
        for k in 0..route.len() {
            let e = &route[k];
            let row = &rows[k];
            if k > 0 {
                let expect = rows[k - 1].departure + inst.travel_time(route[k - 1].node, e.node);
                if (row.arrival - expect).abs() > TIME_TOLERANCE {
                    self.push(Constraint::TimeChain, Some(p), Some(e.node), (row.arrival - expect).abs());
                }
            }
            let (full_prev, empty_prev) = if k == 0 { (0, 0) } else { (rows[k - 1].full, rows[k - 1].empty) };
            let (full_delta, empty_delta) = match inst.kind(e.node) {
                NodeKind::LadenOrigin(_) => (1, 0),
                NodeKind::LadenDestination(_) => (-1, 0),
                NodeKind::Barge(_) => (0, 1),
                NodeKind::EmptyDestination(_) => (0, -row.dropped),
            };
            let full_diff = row.full - (full_prev + full_delta);
            let empty_diff = row.empty - (empty_prev + empty_delta);
            if full_diff != 0 {
                let tag = if matches!(inst.kind(e.node), NodeKind::LadenDestination(_)) {
                    Constraint::FullLoadDrop
                } else {
                    Constraint::FullLoadStep
                };
                let tag = if k == 0 { Constraint::StartFullLoad } else { tag };
                self.push(tag, Some(p), Some(e.node), full_diff.unsigned_abs() as f64);
            }
            if empty_diff != 0 {
                let tag = if k == 0 { Constraint::StartEmptyLoad } else { Constraint::EmptyLoadStep };
                self.push(tag, Some(p), Some(e.node), empty_diff.unsigned_abs() as f64);
            }
        }
    }

    /// Per-visit hand-over balance and the per-order totals.
    fn check_trips(&mut self, p: usize, route: &[RouteElement], rows: &[Row]) {
        let inst = self.inst;
        let mut since_visit: Vec<i64> = vec![0; inst.empty.len()];
        for (e, row) in route.iter().zip(rows) {
            match inst.kind(e.node) {
                NodeKind::Barge(_) => {
                    if let Some(m) = e.serves.filter(|&m| m < inst.empty.len()) {
                        since_visit[m] += 1;
                    }
                }
                NodeKind::EmptyDestination(m) => {
                    let collected = since_visit[m];
                    if row.dropped != collected {
                        self.push(
                            Constraint::TripBalance,
                            Some(p),
                            Some(e.node),
                            (row.dropped - collected).unsigned_abs() as f64,
                        );
                    }
                    since_visit[m] = 0;
                }
                _ => {}
            }
        }
    }

    fn check_pair_times(&mut self, p: usize, route: &[RouteElement], rows: &[Row]) {
        let inst = self.inst;
        for order in 0..inst.laden.len() {
            let o = inst.laden[order].origin;
            let d = inst.laden[order].destination;
            let ko = route.iter().position(|e| e.node == o);
            let kd = route.iter().position(|e| e.node == d);
            if let (Some(ko), Some(kd)) = (ko, kd) {
                if ko < kd {
                    let earliest = rows[ko].departure + inst.travel_time(o, d);
                    if rows[kd].departure + TIME_TOLERANCE < earliest {
                        self.push(
                            Constraint::PairTravelTime,
                            Some(p),
                            Some(d),
                            earliest - rows[kd].departure,
                        );
                    }
                }
            }
        }
    }

    fn check_pickup_times(&mut self, p: usize, route: &[RouteElement], rows: &[Row]) {
        let inst = self.inst;
        for (k, e) in route.iter().enumerate() {
            let NodeKind::EmptyDestination(m) = inst.kind(e.node) else {
                continue;
            };
            // Barges in this visit's trip segment: after the previous call
            // at the same destination, tagged for this order.
            let seg_start = route[..k]
                .iter()
                .rposition(|x| x.node == e.node)
                .map(|i| i + 1)
                .unwrap_or(0);
            for j in seg_start..k {
                if route[j].serves == Some(m as EmptyId)
                    && matches!(inst.kind(route[j].node), NodeKind::Barge(_))
                {
                    let earliest = rows[j].departure + inst.travel_time(route[j].node, e.node);
                    if rows[k].departure + TIME_TOLERANCE < earliest {
                        self.push(
                            Constraint::PickupTravelTime,
                            Some(p),
                            Some(e.node),
                            earliest - rows[k].departure,
                        );
                    }
                }
            }
        }
    }
}

/// Count barges handed over to each empty-barge order across the solution.
/// A barge counts only when its route reaches the order's destination later.
pub fn delivered_per_order(inst: &Instance, sol: &Solution) -> Vec<u32> {
    let mut delivered = vec![0u32; inst.empty.len()];
    for route in &sol.routes {
        for (k, e) in route.iter().enumerate() {
            if !matches!(inst.kind(e.node), NodeKind::Barge(_)) {
                continue;
            }
            if let Some(m) = e.serves.filter(|&m| m < inst.empty.len()) {
                let dest = inst.empty[m].destination;
                if route[k + 1..].iter().any(|later| later.node == dest) {
                    delivered[m] += 1;
                }
            }
        }
    }
    delivered
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Instance, RouteElement, Solution};
    use crate::testkit;

    fn empty_pools(routes: Vec<Vec<RouteElement>>) -> Solution {
        Solution { routes, pool_laden: vec![], pool_empty: vec![], pool_barges: vec![] }
    }

    fn tags(vs: &[Violation]) -> Vec<Constraint> {
        let mut t: Vec<Constraint> = vs.iter().map(|v| v.constraint).collect();
        t.dedup();
        t
    }

    #[test]
    fn clean_solution_passes() {
        let mut raw = testkit::raw_line_instance(1, 1, 2);
        raw.orders_e[0].required_barges = 2;
        let inst = Instance::build(raw).unwrap();
        let sol = empty_pools(vec![
            vec![RouteElement::stop(0), RouteElement::stop(1)],
            vec![
                RouteElement::barge(3, 0),
                RouteElement::barge(4, 0),
                RouteElement::visit(2, 1),
            ],
        ]);
        assert_eq!(validate(&inst, &sol), vec![]);
    }

    #[test]
    fn capacity_excess_is_one_violation_with_the_excess_as_magnitude() {
        let mut raw = testkit::raw_line_instance(0, 1, 6);
        raw.orders_e[0].required_barges = 6;
        raw.params.capacity = 5;
        let inst = Instance::build(raw).unwrap();
        let mut route: Vec<RouteElement> =
            (1..=6).map(|n| RouteElement::barge(n, 0)).collect();
        route.push(RouteElement::visit(0, 1));
        let sol = empty_pools(vec![route, vec![]]);
        let vs = validate(&inst, &sol);
        let cap: Vec<&Violation> = vs
            .iter()
            .filter(|v| v.constraint == Constraint::TowCapacity)
            .collect();
        assert_eq!(cap.len(), 1);
        assert_eq!(cap[0].magnitude, 1.0);
        assert_eq!(cap[0].tugboat, Some(0));
    }

    #[test]
    fn short_delivery_reports_the_deficit() {
        let mut raw = testkit::raw_line_instance(0, 1, 7);
        raw.orders_e[0].required_barges = 7;
        raw.params.capacity = 7;
        let inst = Instance::build(raw).unwrap();
        let mut route: Vec<RouteElement> =
            (1..=5).map(|n| RouteElement::barge(n, 0)).collect();
        route.push(RouteElement::visit(0, 1));
        let mut sol = empty_pools(vec![route, vec![]]);
        sol.pool_empty = vec![(0, 2)];
        sol.pool_barges = vec![6, 7];
        let vs = validate(&inst, &sol);
        let demand: Vec<&Violation> = vs
            .iter()
            .filter(|v| v.constraint == Constraint::DemandTotal)
            .collect();
        assert_eq!(demand.len(), 1);
        assert_eq!(demand[0].magnitude, 2.0);
    }

    #[test]
    fn split_pair_is_flagged() {
        let inst = testkit::line_instance(1, 0, 0);
        let sol = empty_pools(vec![
            vec![RouteElement::stop(0)],
            vec![RouteElement::stop(1)],
        ]);
        let vs = validate(&inst, &sol);
        assert!(tags(&vs).contains(&Constraint::PairAssignment));
        // Origin-only route also ends illegally.
        assert!(tags(&vs).contains(&Constraint::ArrivalArc));
    }

    #[test]
    fn reversed_pair_is_flagged_without_panicking() {
        let inst = testkit::line_instance(1, 0, 0);
        let sol = empty_pools(vec![
            vec![RouteElement::stop(1), RouteElement::stop(0)],
            vec![],
        ]);
        let vs = validate(&inst, &sol);
        let t = tags(&vs);
        assert!(t.contains(&Constraint::PairAssignment));
        assert!(t.contains(&Constraint::LoadSanity));
    }

    #[test]
    fn dangling_barge_is_an_end_load_violation() {
        let inst = testkit::line_instance(1, 0, 1);
        let sol = empty_pools(vec![
            vec![
                RouteElement::stop(0),
                RouteElement { node: 2, visit: 1, serves: None },
                RouteElement::stop(1),
            ],
            vec![],
        ]);
        let vs = validate(&inst, &sol);
        let t = tags(&vs);
        assert!(t.contains(&Constraint::PickupPurpose));
        assert!(t.contains(&Constraint::EndEmptyLoad), "{vs:?}");
    }

    #[test]
    fn derived_and_supplied_schedules_agree_on_clean_input() {
        let mut raw = testkit::raw_line_instance(1, 1, 2);
        raw.orders_e[0].required_barges = 2;
        let inst = Instance::build(raw).unwrap();
        let sol = empty_pools(vec![
            vec![RouteElement::stop(0), RouteElement::stop(1)],
            vec![
                RouteElement::barge(3, 0),
                RouteElement::barge(4, 0),
                RouteElement::visit(2, 1),
            ],
        ]);
        let sched = crate::eval::propagate(&inst, &sol).unwrap();
        assert_eq!(validate_with_schedule(&inst, &sol, &sched), vec![]);
    }

    #[test]
    fn tampered_schedule_breaks_the_time_chain() {
        let inst = testkit::line_instance(1, 0, 0);
        let sol = empty_pools(vec![
            vec![RouteElement::stop(0), RouteElement::stop(1)],
            vec![],
        ]);
        let mut sched = crate::eval::propagate(&inst, &sol).unwrap();
        sched.timings[0][1].arrival += 0.5;
        let vs = validate_with_schedule(&inst, &sol, &sched);
        assert!(tags(&vs).contains(&Constraint::TimeChain), "{vs:?}");
    }
}
