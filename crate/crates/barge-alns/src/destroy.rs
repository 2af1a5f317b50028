//! Destroy operators: move part of the current solution back into the
//! pools. Laden orders leave with both endpoints; an empty-barge visit
//! leaves together with the barges collected for it since the tugboat's
//! previous call, and surviving calls are renumbered. Route operators clear
//! whole routes and are shared by both operator families.

use rand::Rng;

use crate::eval::route_cost;
use crate::model::{EmptyId, Instance, LadenId, NodeId, NodeKind, RouteElement, Solution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DestroyOp {
    /// Remove randomly chosen laden orders.
    RandomLaden,
    /// Remove the laden orders whose removal saves the most cost.
    WorstLaden,
    /// Remove randomly chosen empty-barge visits with their barges.
    RandomVisits,
    /// Remove the visits whose removal saves the most cost.
    WorstVisits,
    /// Clear randomly chosen nonempty routes.
    RandomRoutes,
    /// Clear the costliest routes.
    WorstRoutes,
}

/// Destroy bank used when the iteration works on laden orders.
pub const LADEN_BANK: [DestroyOp; 4] = [
    DestroyOp::RandomLaden,
    DestroyOp::WorstLaden,
    DestroyOp::RandomRoutes,
    DestroyOp::WorstRoutes,
];

/// Destroy bank used when the iteration works on empty-barge orders.
pub const EMPTY_BANK: [DestroyOp; 4] = [
    DestroyOp::RandomVisits,
    DestroyOp::WorstVisits,
    DestroyOp::RandomRoutes,
    DestroyOp::WorstRoutes,
];

impl DestroyOp {
    pub fn name(&self) -> &'static str {
        match self {
            DestroyOp::RandomLaden => "remove-random-laden",
            DestroyOp::WorstLaden => "remove-worst-laden",
            DestroyOp::RandomVisits => "remove-random-visits",
            DestroyOp::WorstVisits => "remove-worst-visits",
            DestroyOp::RandomRoutes => "remove-random-routes",
            DestroyOp::WorstRoutes => "remove-worst-routes",
        }
    }

    /// Removal count when none is configured: 15 % of the operator's own
    /// entity count, at least one.
    pub fn default_step(&self, inst: &Instance, sol: &Solution) -> usize {
        let entities = match self {
            DestroyOp::RandomLaden | DestroyOp::WorstLaden => routed_laden(inst, sol).len(),
            DestroyOp::RandomVisits | DestroyOp::WorstVisits => visit_slots(inst, sol).len(),
            DestroyOp::RandomRoutes | DestroyOp::WorstRoutes => {
                sol.routes.iter().filter(|r| !r.is_empty()).count()
            }
        };
        ((entities as f64 * 0.15).ceil() as usize).max(1)
    }

    pub fn apply(&self, inst: &Instance, sol: &mut Solution, step: usize, rng: &mut impl Rng) {
        match self {
            DestroyOp::RandomLaden => {
                let routed = routed_laden(inst, sol);
                for i in pick(rng, routed.len(), step) {
                    remove_laden_order(inst, sol, routed[i]);
                }
            }
            DestroyOp::WorstLaden => {
                for _ in 0..step {
                    let mut best: Option<(LadenId, f64)> = None;
                    for j in routed_laden(inst, sol) {
                        if let Some(saving) = laden_removal_saving(inst, sol, j) {
                            if best.map_or(true, |(_, s)| saving > s) {
                                best = Some((j, saving));
                            }
                        }
                    }
                    match best {
                        Some((j, _)) => remove_laden_order(inst, sol, j),
                        None => break,
                    }
                }
            }
            DestroyOp::RandomVisits => {
                let slots = visit_slots(inst, sol);
                let mut picked: Vec<(usize, NodeId, u8)> = pick(rng, slots.len(), step)
                    .into_iter()
                    .map(|i| {
                        let (p, k) = slots[i];
                        let e = &sol.routes[p][k];
                        (p, e.node, e.visit)
                    })
                    .collect();
                // Removing a first call renumbers the second; dropping the
                // higher call first keeps the remaining handles valid.
                picked.sort_unstable_by(|a, b| b.cmp(a));
                for (p, node, visit) in picked {
                    if let Some(k) = sol.routes[p]
                        .iter()
                        .position(|e| e.node == node && e.visit == visit)
                    {
                        remove_visit(inst, sol, p, k);
                    }
                }
            }
            DestroyOp::WorstVisits => {
                for _ in 0..step {
                    let mut best: Option<(usize, usize, f64)> = None;
                    for (p, k) in visit_slots(inst, sol) {
                        let Ok(base) = route_cost(inst, p, &sol.routes[p]) else {
                            continue;
                        };
                        let (reduced, _, _) = visit_removal(inst, &sol.routes[p], k);
                        let Ok(cost) = route_cost(inst, p, &reduced) else {
                            continue;
                        };
                        let saving = base - cost;
                        if best.map_or(true, |(_, _, s)| saving > s) {
                            best = Some((p, k, saving));
                        }
                    }
                    match best {
                        Some((p, k, _)) => remove_visit(inst, sol, p, k),
                        None => break,
                    }
                }
            }
            DestroyOp::RandomRoutes => {
                let nonempty: Vec<usize> = (0..sol.routes.len())
                    .filter(|&p| !sol.routes[p].is_empty())
                    .collect();
                for i in pick(rng, nonempty.len(), step) {
                    clear_route(inst, sol, nonempty[i]);
                }
            }
            DestroyOp::WorstRoutes => {
                for _ in 0..step {
                    let mut best: Option<(usize, f64)> = None;
                    for (p, route) in sol.routes.iter().enumerate() {
                        if route.is_empty() {
                            continue;
                        }
                        let Ok(cost) = route_cost(inst, p, route) else {
                            continue;
                        };
                        let Ok(idle) = route_cost(inst, p, &[]) else {
                            continue;
                        };
                        let saving = cost - idle;
                        if best.map_or(true, |(_, s)| saving > s) {
                            best = Some((p, saving));
                        }
                    }
                    match best {
                        Some((p, _)) => clear_route(inst, sol, p),
                        None => break,
                    }
                }
            }
        }
        sol.canonicalize_pools();
    }
}

/// Distinct random indices, `amount` clamped to the population.
fn pick(rng: &mut impl Rng, len: usize, amount: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, len, amount.min(len)).into_vec()
}

pub fn routed_laden(inst: &Instance, sol: &Solution) -> Vec<LadenId> {
    (0..inst.laden.len())
        .filter(|j| !sol.pool_laden.contains(j))
        .collect()
}

/// Positions of empty-barge destination calls as (tugboat, element index).
pub fn visit_slots(inst: &Instance, sol: &Solution) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (p, route) in sol.routes.iter().enumerate() {
        for (k, e) in route.iter().enumerate() {
            if matches!(inst.kind(e.node), NodeKind::EmptyDestination(_)) {
                out.push((p, k));
            }
        }
    }
    out
}

fn remove_laden_order(inst: &Instance, sol: &mut Solution, j: LadenId) {
    let o = inst.laden[j].origin;
    let d = inst.laden[j].destination;
    for route in &mut sol.routes {
        route.retain(|e| e.node != o && e.node != d);
    }
    sol.pool_laden.push(j);
}

fn laden_removal_saving(inst: &Instance, sol: &Solution, j: LadenId) -> Option<f64> {
    let o = inst.laden[j].origin;
    let d = inst.laden[j].destination;
    let p = sol
        .routes
        .iter()
        .position(|r| r.iter().any(|e| e.node == o))?;
    let base = route_cost(inst, p, &sol.routes[p]).ok()?;
    let reduced: Vec<RouteElement> = sol.routes[p]
        .iter()
        .filter(|e| e.node != o && e.node != d)
        .copied()
        .collect();
    let cost = route_cost(inst, p, &reduced).ok()?;
    Some(base - cost)
}

/// The route with the call at `k` removed along with the barges collected
/// for it, remaining calls renumbered. Also returns the freed barge nodes
/// and the order served.
fn visit_removal(
    inst: &Instance,
    route: &[RouteElement],
    k: usize,
) -> (Vec<RouteElement>, Vec<NodeId>, EmptyId) {
    let dest = route[k].node;
    let NodeKind::EmptyDestination(m) = inst.kind(dest) else {
        panic!("element {k} is not an empty-barge destination");
    };
    let seg_start = route[..k]
        .iter()
        .rposition(|e| e.node == dest)
        .map_or(0, |i| i + 1);
    let mut freed = Vec::new();
    let mut out = Vec::with_capacity(route.len());
    for (i, e) in route.iter().enumerate() {
        if i == k {
            continue;
        }
        if i >= seg_start
            && i < k
            && e.serves == Some(m)
            && matches!(inst.kind(e.node), NodeKind::Barge(_))
        {
            freed.push(e.node);
            continue;
        }
        out.push(*e);
    }
    let mut v = 1u8;
    for e in out.iter_mut() {
        if e.node == dest {
            e.visit = v;
            v += 1;
        }
    }
    (out, freed, m)
}

fn remove_visit(inst: &Instance, sol: &mut Solution, p: usize, k: usize) {
    let (route, freed, m) = visit_removal(inst, &sol.routes[p], k);
    sol.routes[p] = route;
    if !freed.is_empty() {
        sol.pool_empty_add(m, freed.len() as u32);
    }
    sol.pool_barges.extend(freed);
}

fn clear_route(inst: &Instance, sol: &mut Solution, p: usize) {
    let elems = std::mem::take(&mut sol.routes[p]);
    let mut owed = vec![0u32; inst.empty.len()];
    for e in elems {
        match inst.kind(e.node) {
            NodeKind::LadenOrigin(j) => sol.pool_laden.push(j),
            NodeKind::LadenDestination(_) | NodeKind::EmptyDestination(_) => {}
            NodeKind::Barge(_) => {
                sol.pool_barges.push(e.node);
                if let Some(m) = e.serves {
                    owed[m] += 1;
                }
            }
        }
    }
    for (m, c) in owed.into_iter().enumerate() {
        if c > 0 {
            sol.pool_empty_add(m, c);
        }
    }
}
