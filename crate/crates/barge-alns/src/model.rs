//! Problem data model: nodes, orders, tugboats, the port network and the
//! route-based solution encoding, plus JSON (de)serialization for both.
//!
//! Node indexing is canonical and contiguous. For `F` laden orders, `E`
//! empty-barge orders and `B` barges the layout is:
//!
//! ```text
//! 0, 1, 2, 3, ...        laden origin/destination pairs, interleaved
//! 2F .. 2F+E-1           empty-barge order destinations
//! 2F+E .. 2F+E+B-1       idle empty barges
//! 2F+E+B, 2F+E+B+1       virtual start and end depot
//! ```
//!
//! Routes never store the virtual depot nodes; every route implicitly starts
//! at the start depot and ends at the end depot.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Index into the canonical node numbering of an instance.
pub type NodeId = usize;
/// Index of a laden order within [`Instance::laden`].
pub type LadenId = usize;
/// Index of an empty-barge order within [`Instance::empty`].
pub type EmptyId = usize;

/// Mean-earth-radius great-circle distance between two `[lat, lon]` points
/// in degrees, returned in kilometres.
pub fn great_circle_km(a: [f64; 2], b: [f64; 2]) -> f64 {
    const EARTH_RADIUS_KM: f64 = 6371.0088;
    let (la1, lo1) = (a[0].to_radians(), a[1].to_radians());
    let (la2, lo2) = (b[0].to_radians(), b[1].to_radians());
    let dlat = la2 - la1;
    let dlon = lo2 - lo1;
    let h = (dlat / 2.0).sin().powi(2) + la1.cos() * la2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().asin()
}

/// Closed time window `[open, close]` on a node, in hours.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window(pub f64, pub f64);

impl Window {
    pub fn open(&self) -> f64 {
        self.0
    }

    pub fn close(&self) -> f64 {
        self.1
    }
}

/// What a non-virtual node is, with a back-reference to the owning entity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Berth where a laden order's loaded barge waits.
    LadenOrigin(LadenId),
    /// Berth where the loaded barge must be delivered.
    LadenDestination(LadenId),
    /// Port that requested a batch of empty barges.
    EmptyDestination(EmptyId),
    /// An idle empty barge, indexed into [`Instance::barges`].
    Barge(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tugboat {
    /// Working-hours limit for the whole route, in hours.
    pub max_working_time: f64,
    /// Cost per hour of travel time.
    pub cost_per_time: f64,
    /// Cost per kilometre travelled.
    pub cost_per_distance: f64,
}

/// Move one loaded barge from `origin` to `destination` with the same tugboat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadenOrder {
    pub origin: NodeId,
    pub destination: NodeId,
    pub origin_window: Window,
    pub destination_window: Window,
}

/// Deliver `required_barges` empty barges to `destination`. The order may be
/// shared by at most two tugboats, each calling at the destination at most
/// twice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmptyOrder {
    pub destination: NodeId,
    pub required_barges: u32,
    pub window: Window,
}

/// An idle empty barge moored at `node`, not ready for pickup departure
/// before `idle_until`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmptyBarge {
    pub node: NodeId,
    pub idle_until: f64,
    pub window: Window,
}

/// Soft-constraint weights applied by the loss function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Penalties {
    /// Per hour of lateness past a node's window close.
    pub time_window: f64,
    /// Per hour past a tugboat's working limit.
    pub working_hours: f64,
    /// Per pooled order and per missing barge.
    pub unserved: f64,
}

impl Default for Penalties {
    fn default() -> Self {
        Penalties {
            time_window: 1e4,
            working_hours: 1e4,
            unserved: 1e5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Barge-towing capacity shared by all tugboats.
    pub capacity: u32,
    /// Sailing speed in km/h used to derive travel times from coordinates.
    pub speed: f64,
    pub penalties: Penalties,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            capacity: 5,
            speed: 20.0,
            penalties: Penalties::default(),
        }
    }
}

/// Dense square matrix of travel metrics over all nodes, virtual included.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Matrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Matrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn zero(n: usize) -> Matrix {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }
}

/// Node kinds plus travel metrics. Built from per-node coordinates (times
/// derived from great-circle distance at the configured speed) or from
/// explicit time and distance matrices.
#[derive(Clone, Debug)]
pub struct Network {
    kinds: Vec<NodeKind>,
    travel_time: Matrix,
    distance: Matrix,
    coordinates: Option<Vec<[f64; 2]>>,
    explicit_matrices: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("instance has no tugboats")]
    NoTugboats,
    #[error("{what} must be positive")]
    NonPositive { what: &'static str },
    #[error("node {node} breaks the canonical numbering for {context}")]
    BadNodeId { context: &'static str, node: NodeId },
    #[error("window on node {node} has open {open} after close {close}")]
    InvertedWindow { node: NodeId, open: f64, close: f64 },
    #[error("empty-barge order {order} needs {required} barges but at most {limit} can be delivered")]
    OversizedOrder { order: EmptyId, required: u32, limit: u32 },
    #[error("orders require {required} empty barges but only {available} exist")]
    BargeShortage { required: u32, available: u32 },
    #[error("network must supply either coordinates or both matrices")]
    AmbiguousNetwork,
    #[error("expected {expected} coordinate pairs, found {found}")]
    CoordinateCount { expected: usize, found: usize },
    #[error("{which} matrix must be {expected}x{expected}")]
    MatrixShape { which: &'static str, expected: usize },
    #[error("{which} matrix has {problem} at ({i}, {j})")]
    MatrixValue { which: &'static str, problem: &'static str, i: usize, j: usize },
    #[error("negative {what} on {context}")]
    NegativeValue { what: &'static str, context: String },
}

/// A fully validated problem instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub tugboats: Vec<Tugboat>,
    pub laden: Vec<LadenOrder>,
    pub empty: Vec<EmptyOrder>,
    pub barges: Vec<EmptyBarge>,
    pub params: Params,
    network: Network,
}

impl Instance {
    /// Number of non-virtual nodes.
    pub fn n_real(&self) -> usize {
        2 * self.laden.len() + self.empty.len() + self.barges.len()
    }

    /// Total node count including the two virtual depot nodes.
    pub fn n_nodes(&self) -> usize {
        self.n_real() + 2
    }

    /// Virtual start depot every route leaves from.
    pub fn start_node(&self) -> NodeId {
        self.n_real()
    }

    /// Virtual end depot every route finishes at.
    pub fn end_node(&self) -> NodeId {
        self.n_real() + 1
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        self.network.kinds[node]
    }

    pub fn is_real(&self, node: NodeId) -> bool {
        node < self.n_real()
    }

    #[inline]
    pub fn travel_time(&self, i: NodeId, j: NodeId) -> f64 {
        self.network.travel_time.at(i, j)
    }

    #[inline]
    pub fn distance(&self, i: NodeId, j: NodeId) -> f64 {
        self.network.distance.at(i, j)
    }

    pub fn coordinates(&self) -> Option<&[[f64; 2]]> {
        self.network.coordinates.as_deref()
    }

    /// Time window of a non-virtual node.
    pub fn window(&self, node: NodeId) -> Window {
        match self.kind(node) {
            NodeKind::LadenOrigin(k) => self.laden[k].origin_window,
            NodeKind::LadenDestination(k) => self.laden[k].destination_window,
            NodeKind::EmptyDestination(m) => self.empty[m].window,
            NodeKind::Barge(b) => self.barges[b].window,
        }
    }

    /// Earliest time service can finish at a node: window open for order
    /// nodes, additionally the barge's readiness for barge nodes.
    pub fn readiness(&self, node: NodeId) -> f64 {
        match self.kind(node) {
            NodeKind::Barge(b) => self.barges[b].idle_until.max(self.barges[b].window.open()),
            _ => self.window(node).open(),
        }
    }

    pub fn capacity(&self) -> u32 {
        self.params.capacity
    }

    /// Upper bound on barges a single empty-barge order may request: two
    /// visits per tugboat, at most two tugboats, a full tow each visit.
    pub fn order_size_limit(&self) -> u32 {
        2 * self.params.capacity * 2.min(self.tugboats.len() as u32)
    }

    /// A generous horizon used for big-M constants: the latest window close
    /// or barge readiness plus one full traversal of the longest arcs.
    pub fn time_horizon(&self) -> f64 {
        let mut latest: f64 = 0.0;
        for node in 0..self.n_real() {
            latest = latest.max(self.window(node).close()).max(self.readiness(node));
        }
        let max_leg = (0..self.n_nodes())
            .flat_map(|i| (0..self.n_nodes()).map(move |j| (i, j)))
            .map(|(i, j)| self.network.travel_time.at(i, j))
            .fold(0.0, f64::max);
        latest + max_leg * (self.n_real() + 2) as f64
    }
}

/// One stop in a route. `visit` distinguishes the first and second call of a
/// tugboat at an empty-barge destination and is always 1 elsewhere. Barge
/// elements carry the order the barge is collected for; `None` marks a barge
/// towed without any matching delivery ahead of it, which the validator
/// rejects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RouteElement {
    pub node: NodeId,
    pub visit: u8,
    pub serves: Option<EmptyId>,
}

impl RouteElement {
    pub fn stop(node: NodeId) -> RouteElement {
        RouteElement { node, visit: 1, serves: None }
    }

    pub fn visit(node: NodeId, visit: u8) -> RouteElement {
        RouteElement { node, visit, serves: None }
    }

    pub fn barge(node: NodeId, serves: EmptyId) -> RouteElement {
        RouteElement { node, visit: 1, serves: Some(serves) }
    }
}

/// Route-set encoding of a candidate schedule, together with the pools of
/// work still unassigned. A solution is *complete* when all pools are empty;
/// it may still be infeasible, which the loss function prices via penalties.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Solution {
    /// One element sequence per tugboat, depot endpoints implicit.
    pub routes: Vec<Vec<RouteElement>>,
    /// Laden orders with neither endpoint routed.
    pub pool_laden: Vec<LadenId>,
    /// Empty-barge orders still owed barges, with the outstanding count.
    pub pool_empty: Vec<(EmptyId, u32)>,
    /// Barges not currently towed by any route.
    pub pool_barges: Vec<NodeId>,
}

impl Solution {
    /// Everything unassigned; the constructive heuristic starts from here.
    pub fn unassigned(inst: &Instance) -> Solution {
        Solution {
            routes: vec![Vec::new(); inst.tugboats.len()],
            pool_laden: (0..inst.laden.len()).collect(),
            pool_empty: inst
                .empty
                .iter()
                .enumerate()
                .map(|(m, o)| (m, o.required_barges))
                .collect(),
            pool_barges: inst.barges.iter().map(|b| b.node).collect(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.pool_laden.is_empty() && self.pool_empty.is_empty()
    }

    /// Restore the sorted pool order the operators rely on for determinism
    /// and drop empty-order entries that no longer owe any barges.
    pub fn canonicalize_pools(&mut self) {
        self.pool_laden.sort_unstable();
        self.pool_empty.retain(|&(_, c)| c > 0);
        self.pool_empty.sort_unstable();
        self.pool_barges.sort_unstable();
    }

    /// Add `count` outstanding barges for an order, merging pool entries.
    pub fn pool_empty_add(&mut self, order: EmptyId, count: u32) {
        match self.pool_empty.iter_mut().find(|(m, _)| *m == order) {
            Some((_, c)) => *c += count,
            None => {
                self.pool_empty.push((order, count));
                self.pool_empty.sort_unstable();
            }
        }
    }

    /// Number of visits tugboat `p` makes to the destination of `order`.
    pub fn visit_count(&self, p: usize, order: EmptyId, inst: &Instance) -> u8 {
        let dest = inst.empty[order].destination;
        self.routes[p]
            .iter()
            .filter(|e| e.node == dest && e.serves.is_none())
            .count() as u8
    }

    /// Tugboats currently serving `order` (at least one destination visit).
    pub fn serving_tugs(&self, order: EmptyId, inst: &Instance) -> Vec<usize> {
        (0..self.routes.len())
            .filter(|&p| self.visit_count(p, order, inst) > 0)
            .collect()
    }
}

impl fmt::Display for Solution {
    /// Compact route dump: one bracketed node list per tugboat, second
    /// visits marked with a prime.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, route) in self.routes.iter().enumerate() {
            if p > 0 {
                writeln!(f)?;
            }
            write!(f, "tug {p}: [")?;
            for (k, e) in route.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", e.node)?;
                if e.visit > 1 {
                    write!(f, "'")?;
                }
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON file formats
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RawNetwork {
    #[serde(skip_serializing_if = "Option::is_none")]
    coordinates: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    time_matrix: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distance_matrix: Option<Vec<Vec<f64>>>,
}

/// On-disk instance schema; see the crate README for a worked example.
#[derive(Serialize, Deserialize)]
pub struct RawInstance {
    pub params: Params,
    pub tugboats: Vec<Tugboat>,
    pub orders_f: Vec<LadenOrder>,
    pub orders_e: Vec<EmptyOrder>,
    pub barges: Vec<EmptyBarge>,
    network: RawNetwork,
}

impl RawInstance {
    pub fn new(
        params: Params,
        tugboats: Vec<Tugboat>,
        orders_f: Vec<LadenOrder>,
        orders_e: Vec<EmptyOrder>,
        barges: Vec<EmptyBarge>,
    ) -> RawInstance {
        RawInstance {
            params,
            tugboats,
            orders_f,
            orders_e,
            barges,
            network: RawNetwork {
                coordinates: None,
                time_matrix: None,
                distance_matrix: None,
            },
        }
    }

    pub fn set_network_coordinates(&mut self, coordinates: Vec<[f64; 2]>) {
        self.network = RawNetwork {
            coordinates: Some(coordinates),
            time_matrix: None,
            distance_matrix: None,
        };
    }

    pub fn set_network_matrices(&mut self, time: Vec<Vec<f64>>, distance: Vec<Vec<f64>>) {
        self.network = RawNetwork {
            coordinates: None,
            time_matrix: Some(time),
            distance_matrix: Some(distance),
        };
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance, String> {
        let raw: RawInstance =
            serde_json::from_str(text).map_err(|e| format!("instance parse error: {e}"))?;
        Instance::build(raw).map_err(|e| format!("inconsistent instance: {e}"))
    }

    pub fn to_json(&self) -> String {
        let raw = self.to_raw();
        serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
    }

    fn to_raw(&self) -> RawInstance {
        let network = if self.network.explicit_matrices {
            RawNetwork {
                coordinates: self.network.coordinates.clone(),
                time_matrix: Some(self.network.travel_time.rows()),
                distance_matrix: Some(self.network.distance.rows()),
            }
        } else {
            RawNetwork {
                coordinates: self.network.coordinates.clone(),
                time_matrix: None,
                distance_matrix: None,
            }
        };
        RawInstance {
            params: self.params,
            tugboats: self.tugboats.clone(),
            orders_f: self.laden.clone(),
            orders_e: self.empty.clone(),
            barges: self.barges.clone(),
            network,
        }
    }

    /// Validate a raw instance and derive travel metrics. Node ids in the
    /// raw orders must already follow the canonical numbering.
    pub fn build(raw: RawInstance) -> Result<Instance, InstanceError> {
        if raw.tugboats.is_empty() {
            return Err(InstanceError::NoTugboats);
        }
        if raw.params.capacity == 0 {
            return Err(InstanceError::NonPositive { what: "capacity" });
        }
        if raw.params.speed <= 0.0 {
            return Err(InstanceError::NonPositive { what: "speed" });
        }
        for (p, tug) in raw.tugboats.iter().enumerate() {
            for (what, v) in [
                ("max_working_time", tug.max_working_time),
                ("cost_per_time", tug.cost_per_time),
                ("cost_per_distance", tug.cost_per_distance),
            ] {
                if v < 0.0 {
                    return Err(InstanceError::NegativeValue {
                        what,
                        context: format!("tugboat {p}"),
                    });
                }
            }
        }

        let f = raw.orders_f.len();
        let e = raw.orders_e.len();
        let b = raw.barges.len();
        let n_real = 2 * f + e + b;
        let n = n_real + 2;

        let mut kinds = vec![NodeKind::Barge(0); n_real];
        for (k, order) in raw.orders_f.iter().enumerate() {
            if order.origin != 2 * k {
                return Err(InstanceError::BadNodeId {
                    context: "laden order origin",
                    node: order.origin,
                });
            }
            if order.destination != 2 * k + 1 {
                return Err(InstanceError::BadNodeId {
                    context: "laden order destination",
                    node: order.destination,
                });
            }
            kinds[2 * k] = NodeKind::LadenOrigin(k);
            kinds[2 * k + 1] = NodeKind::LadenDestination(k);
        }
        for (m, order) in raw.orders_e.iter().enumerate() {
            if order.destination != 2 * f + m {
                return Err(InstanceError::BadNodeId {
                    context: "empty-barge order destination",
                    node: order.destination,
                });
            }
            kinds[2 * f + m] = NodeKind::EmptyDestination(m);
        }
        for (i, barge) in raw.barges.iter().enumerate() {
            if barge.node != 2 * f + e + i {
                return Err(InstanceError::BadNodeId {
                    context: "barge",
                    node: barge.node,
                });
            }
            kinds[2 * f + e + i] = NodeKind::Barge(i);
        }

        let windows: Vec<(NodeId, Window)> = raw
            .orders_f
            .iter()
            .flat_map(|o| [(o.origin, o.origin_window), (o.destination, o.destination_window)])
            .chain(raw.orders_e.iter().map(|o| (o.destination, o.window)))
            .chain(raw.barges.iter().map(|g| (g.node, g.window)))
            .collect();
        for (node, w) in windows {
            if w.open() > w.close() || w.open() < 0.0 {
                return Err(InstanceError::InvertedWindow {
                    node,
                    open: w.open(),
                    close: w.close(),
                });
            }
        }
        for (i, barge) in raw.barges.iter().enumerate() {
            if barge.idle_until < 0.0 {
                return Err(InstanceError::NegativeValue {
                    what: "idle_until",
                    context: format!("barge {i}"),
                });
            }
        }

        let order_limit = 2 * raw.params.capacity * 2.min(raw.tugboats.len() as u32);
        let mut required = 0u32;
        for (m, order) in raw.orders_e.iter().enumerate() {
            if order.required_barges == 0 {
                return Err(InstanceError::NonPositive { what: "required_barges" });
            }
            if order.required_barges > order_limit {
                return Err(InstanceError::OversizedOrder {
                    order: m,
                    required: order.required_barges,
                    limit: order_limit,
                });
            }
            required += order.required_barges;
        }
        if required > b as u32 {
            return Err(InstanceError::BargeShortage {
                required,
                available: b as u32,
            });
        }

        let network = match (&raw.network.coordinates, &raw.network.time_matrix, &raw.network.distance_matrix) {
            (Some(coords), None, None) => {
                if coords.len() != n {
                    return Err(InstanceError::CoordinateCount {
                        expected: n,
                        found: coords.len(),
                    });
                }
                let mut distance = Matrix::zero(n);
                let mut travel_time = Matrix::zero(n);
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            let d = great_circle_km(coords[i], coords[j]);
                            distance.set(i, j, d);
                            travel_time.set(i, j, d / raw.params.speed);
                        }
                    }
                }
                Network {
                    kinds,
                    travel_time,
                    distance,
                    coordinates: Some(coords.clone()),
                    explicit_matrices: false,
                }
            }
            (coords, Some(t), Some(d)) => {
                let travel_time = check_matrix("time", t, n)?;
                let distance = check_matrix("distance", d, n)?;
                if let Some(coords) = coords {
                    if coords.len() != n {
                        return Err(InstanceError::CoordinateCount {
                            expected: n,
                            found: coords.len(),
                        });
                    }
                }
                Network {
                    kinds,
                    travel_time,
                    distance,
                    coordinates: coords.clone(),
                    explicit_matrices: true,
                }
            }
            _ => return Err(InstanceError::AmbiguousNetwork),
        };

        Ok(Instance {
            tugboats: raw.tugboats,
            laden: raw.orders_f,
            empty: raw.orders_e,
            barges: raw.barges,
            params: raw.params,
            network,
        })
    }
}

fn check_matrix(which: &'static str, rows: &[Vec<f64>], n: usize) -> Result<Matrix, InstanceError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(InstanceError::MatrixShape { which, expected: n });
    }
    let m = Matrix::from_rows(rows).expect("shape checked above");
    for i in 0..n {
        for j in 0..n {
            let v = m.at(i, j);
            if !v.is_finite() || v < 0.0 {
                return Err(InstanceError::MatrixValue {
                    which,
                    problem: "a negative or non-finite entry",
                    i,
                    j,
                });
            }
            if i == j && v != 0.0 {
                return Err(InstanceError::MatrixValue {
                    which,
                    problem: "a non-zero diagonal entry",
                    i,
                    j,
                });
            }
        }
    }
    Ok(m)
}

/// On-disk solution schema. Routes are `[node, visit]` pairs; the order a
/// towed barge serves is kept in `barge_orders` (pairs of barge node and
/// empty-order index) so that arrangements where a barge is carried past
/// another order's destination survive a round trip.
#[derive(Serialize, Deserialize)]
pub struct RawSolution {
    pub routes: Vec<Vec<[usize; 2]>>,
    #[serde(default)]
    pub barge_orders: Vec<[usize; 2]>,
    #[serde(default)]
    pub unassigned_f: Vec<usize>,
    #[serde(default)]
    pub unassigned_e: Vec<[u32; 2]>,
    #[serde(default)]
    pub free_barges: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<crate::eval::Schedule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<crate::eval::LossBreakdown>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SolutionIoError {
    #[error("solution has {found} routes but the instance has {expected} tugboats")]
    RouteCount { expected: usize, found: usize },
    #[error("route {route} references unknown node {node}")]
    UnknownNode { route: usize, node: NodeId },
    #[error("visit index {visit} on node {node} is not 1 or 2")]
    BadVisit { node: NodeId, visit: usize },
    #[error("barge_orders references {what} {id}")]
    BadBargeOrder { what: &'static str, id: usize },
    #[error("pool references unknown {what} {id}")]
    BadPoolRef { what: &'static str, id: usize },
}

impl Solution {
    pub fn to_raw(&self, inst: &Instance, schedule_and_loss: bool) -> RawSolution {
        let routes = self
            .routes
            .iter()
            .map(|r| r.iter().map(|e| [e.node, e.visit as usize]).collect())
            .collect();
        let mut barge_orders: Vec<[usize; 2]> = self
            .routes
            .iter()
            .flatten()
            .filter_map(|e| e.serves.map(|m| [e.node, m]))
            .collect();
        barge_orders.sort_unstable();
        let (schedule, loss) = if schedule_and_loss {
            let schedule = crate::eval::propagate(inst, self).ok();
            let loss = schedule
                .as_ref()
                .map(|s| crate::eval::loss_with_schedule(inst, self, s));
            (schedule, loss)
        } else {
            (None, None)
        };
        RawSolution {
            routes,
            barge_orders,
            unassigned_f: self.pool_laden.clone(),
            unassigned_e: self.pool_empty.iter().map(|&(m, c)| [m as u32, c]).collect(),
            free_barges: self.pool_barges.clone(),
            schedule,
            loss,
        }
    }

    /// Decode a raw solution against its instance. Barge elements take their
    /// served order from `barge_orders` when listed, otherwise from the next
    /// empty-barge destination element on the same route.
    pub fn from_raw(raw: &RawSolution, inst: &Instance) -> Result<Solution, SolutionIoError> {
        if raw.routes.len() != inst.tugboats.len() {
            return Err(SolutionIoError::RouteCount {
                expected: inst.tugboats.len(),
                found: raw.routes.len(),
            });
        }
        for pair in &raw.barge_orders {
            if !inst.is_real(pair[0]) || !matches!(inst.kind(pair[0]), NodeKind::Barge(_)) {
                return Err(SolutionIoError::BadBargeOrder { what: "non-barge node", id: pair[0] });
            }
            if pair[1] >= inst.empty.len() {
                return Err(SolutionIoError::BadBargeOrder { what: "empty order", id: pair[1] });
            }
        }
        let tag_of = |node: NodeId| {
            raw.barge_orders
                .iter()
                .find(|pair| pair[0] == node)
                .map(|pair| pair[1])
        };
        let mut routes = Vec::with_capacity(raw.routes.len());
        for (r, raw_route) in raw.routes.iter().enumerate() {
            let mut route = Vec::with_capacity(raw_route.len());
            for (k, pair) in raw_route.iter().enumerate() {
                let (node, visit) = (pair[0], pair[1]);
                if !inst.is_real(node) {
                    return Err(SolutionIoError::UnknownNode { route: r, node });
                }
                if visit == 0 || visit > 2 || (visit == 2 && !matches!(inst.kind(node), NodeKind::EmptyDestination(_))) {
                    return Err(SolutionIoError::BadVisit { node, visit });
                }
                let serves = match inst.kind(node) {
                    NodeKind::Barge(_) => tag_of(node).or_else(|| {
                        raw_route[k + 1..].iter().find_map(|later| {
                            match inst.kind(later[0]) {
                                NodeKind::EmptyDestination(m) => Some(m),
                                _ => None,
                            }
                        })
                    }),
                    _ => None,
                };
                route.push(RouteElement { node, visit: visit as u8, serves });
            }
            routes.push(route);
        }
        for &id in &raw.unassigned_f {
            if id >= inst.laden.len() {
                return Err(SolutionIoError::BadPoolRef { what: "laden order", id });
            }
        }
        for pair in &raw.unassigned_e {
            if pair[0] as usize >= inst.empty.len() {
                return Err(SolutionIoError::BadPoolRef { what: "empty order", id: pair[0] as usize });
            }
        }
        for &node in &raw.free_barges {
            if !inst.is_real(node) || !matches!(inst.kind(node), NodeKind::Barge(_)) {
                return Err(SolutionIoError::BadPoolRef { what: "barge node", id: node });
            }
        }
        let mut sol = Solution {
            routes,
            pool_laden: raw.unassigned_f.clone(),
            pool_empty: raw
                .unassigned_e
                .iter()
                .map(|pair| (pair[0] as usize, pair[1]))
                .collect(),
            pool_barges: raw.free_barges.clone(),
        };
        sol.canonicalize_pools();
        Ok(sol)
    }
}
