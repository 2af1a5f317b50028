//! Exhaustive reference search for tiny instances.
//!
//! Enumerates every complete candidate schedule: all assignments of laden
//! orders to tugboats, all serving plans for empty-barge orders (one or two
//! tugboats, one or two visits each), all taggings of physical barges onto
//! those plans, and all orderings of each tugboat's stops that keep pairs
//! and visit numbers in sequence. Each candidate is priced by a direct
//! simulation of the route walk, written separately from the incremental
//! machinery the heuristic search relies on, so the two can be checked
//! against one another.
//!
//! Placements that make a visit hand over nothing, or that leave a tagged
//! barge in tow at the depot, are skipped: they only ever add cost over the
//! same candidate without the pointless element.

use thiserror::Error;

use crate::model::{EmptyId, Instance, NodeId, NodeKind, RouteElement, Solution};

/// Largest instance, in non-virtual nodes, the exhaustive search accepts.
pub const NODE_LIMIT: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("exhaustive search handles at most {limit} real nodes, instance has {nodes}")]
    TooLarge { nodes: usize, limit: usize },
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub solution: Solution,
    /// Loss of the candidate; absent when the tow exceeds capacity somewhere,
    /// matching the region the heuristic search is allowed to move in.
    pub cost: Option<f64>,
    /// Verdict of an independent constraint sweep over the simulated walk.
    pub clean: bool,
}

fn check_size(inst: &Instance) -> Result<(), OracleError> {
    let nodes = inst.n_real();
    if nodes > NODE_LIMIT {
        return Err(OracleError::TooLarge { nodes, limit: NODE_LIMIT });
    }
    Ok(())
}

/// Every candidate in the search universe, priced and judged.
pub fn universe(inst: &Instance) -> Result<Vec<Candidate>, OracleError> {
    check_size(inst)?;
    let mut out = Vec::new();
    drive(inst, &mut |sol| out.push(simulate(inst, sol)));
    Ok(out)
}

/// Cheapest capacity-feasible candidate; ties within 1e-9 go to the
/// lexicographically smaller solution so the result is deterministic.
pub fn optimum(inst: &Instance) -> Result<Option<Candidate>, OracleError> {
    check_size(inst)?;
    let mut best: Option<Candidate> = None;
    drive(inst, &mut |sol| {
        let cand = simulate(inst, sol);
        let Some(c) = cand.cost else { return };
        match &best {
            None => best = Some(cand),
            Some(b) => {
                let bc = b.cost.unwrap();
                if c < bc - 1e-9 || ((c - bc).abs() <= 1e-9 && cand.solution < b.solution) {
                    best = Some(cand);
                }
            }
        }
    });
    Ok(best)
}

/// Price a candidate and judge its constraints with the same walk. The
/// accumulation order mirrors the loss function so clean comparisons are
/// exact rather than within a tolerance.
fn simulate(inst: &Instance, solution: Solution) -> Candidate {
    let cap = inst.capacity() as i32;
    let pen = &inst.params.penalties;
    let mut time_cost = 0.0f64;
    let mut distance_cost = 0.0f64;
    let mut late = 0.0f64;
    let mut over = 0.0f64;
    let mut capacity_ok = true;
    for (p, route) in solution.routes.iter().enumerate() {
        let tug = &inst.tugboats[p];
        let mut prev = inst.start_node();
        let mut depart = 0.0f64;
        let mut full = 0i32;
        let mut empty = 0i32;
        let mut trip = vec![0i32; inst.empty.len()];
        for e in route {
            time_cost += tug.cost_per_time * inst.travel_time(prev, e.node);
            distance_cost += tug.cost_per_distance * inst.distance(prev, e.node);
            let arrival = depart + inst.travel_time(prev, e.node);
            let stay = (inst.readiness(e.node) - arrival).max(0.0);
            let departure = arrival + stay;
            late += (departure - inst.window(e.node).close()).max(0.0);
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
                    empty -= trip[m];
                    trip[m] = 0;
                }
            }
            if full + empty > cap {
                capacity_ok = false;
            }
            depart = departure;
            prev = e.node;
        }
        time_cost += tug.cost_per_time * inst.travel_time(prev, inst.end_node());
        distance_cost += tug.cost_per_distance * inst.distance(prev, inst.end_node());
        let finish = depart + inst.travel_time(prev, inst.end_node());
        over += (finish - tug.max_working_time).max(0.0);
    }
    let total = time_cost + distance_cost + pen.time_window * late + pen.working_hours * over;
    Candidate {
        clean: capacity_ok && late == 0.0 && over == 0.0,
        cost: capacity_ok.then_some(total),
        solution,
    }
}

/// One or two (tugboat, visit count) slots serving an empty-barge order.
type Plan = Vec<(usize, u8)>;

fn order_plans(tugs: usize) -> Vec<Plan> {
    let mut plans = Vec::new();
    for p in 0..tugs {
        for v in 1..=2u8 {
            plans.push(vec![(p, v)]);
        }
    }
    for p in 0..tugs {
        for q in p + 1..tugs {
            for vp in 1..=2u8 {
                for vq in 1..=2u8 {
                    plans.push(vec![(p, vp), (q, vq)]);
                }
            }
        }
    }
    plans
}

/// All index vectors below the given limits, odometer order.
fn index_product(limits: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &limit in limits {
        let mut next = Vec::with_capacity(out.len() * limit);
        for prefix in &out {
            for i in 0..limit {
                let mut row = prefix.clone();
                row.push(i);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Work given to one tugboat before sequencing.
#[derive(Default)]
struct Tasks {
    /// Laden orders as (origin, destination) node pairs.
    pairs: Vec<(NodeId, NodeId)>,
    /// Visit groups as (destination node, order, number of visits).
    groups: Vec<(NodeId, EmptyId, u8)>,
    /// Tagged pickups as (barge node, order served).
    barges: Vec<(NodeId, EmptyId)>,
}

/// All orderings of a tugboat's tasks that keep each pair origin-first and
/// visit numbers ascending, dropping placements where a visit hands over
/// nothing or a tagged barge survives to the end.
fn sequences(inst: &Instance, tasks: &Tasks) -> Vec<Vec<RouteElement>> {
    let total = 2 * tasks.pairs.len()
        + tasks.groups.iter().map(|g| g.2 as usize).sum::<usize>()
        + tasks.barges.len();
    let mut out = Vec::new();
    let mut seq = Vec::with_capacity(total);
    let mut pair_state = vec![0u8; tasks.pairs.len()];
    let mut group_state = vec![0u8; tasks.groups.len()];
    let mut barge_used = vec![false; tasks.barges.len()];
    extend(
        inst,
        tasks,
        total,
        &mut seq,
        &mut pair_state,
        &mut group_state,
        &mut barge_used,
        &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn extend(
    inst: &Instance,
    tasks: &Tasks,
    total: usize,
    seq: &mut Vec<RouteElement>,
    pair_state: &mut [u8],
    group_state: &mut [u8],
    barge_used: &mut [bool],
    out: &mut Vec<Vec<RouteElement>>,
) {
    if seq.len() == total {
        if drops_work_out(inst, seq) {
            out.push(seq.clone());
        }
        return;
    }
    for (i, &(origin, dest)) in tasks.pairs.iter().enumerate() {
        if pair_state[i] == 2 {
            continue;
        }
        let e = if pair_state[i] == 0 {
            RouteElement::stop(origin)
        } else {
            RouteElement::stop(dest)
        };
        pair_state[i] += 1;
        seq.push(e);
        extend(inst, tasks, total, seq, pair_state, group_state, barge_used, out);
        seq.pop();
        pair_state[i] -= 1;
    }
    for (i, &(dest, _, visits)) in tasks.groups.iter().enumerate() {
        if group_state[i] == visits {
            continue;
        }
        group_state[i] += 1;
        seq.push(RouteElement::visit(dest, group_state[i]));
        extend(inst, tasks, total, seq, pair_state, group_state, barge_used, out);
        seq.pop();
        group_state[i] -= 1;
    }
    for (i, &(node, order)) in tasks.barges.iter().enumerate() {
        if barge_used[i] {
            continue;
        }
        barge_used[i] = true;
        seq.push(RouteElement::barge(node, order));
        extend(inst, tasks, total, seq, pair_state, group_state, barge_used, out);
        seq.pop();
        barge_used[i] = false;
    }
}

fn drops_work_out(inst: &Instance, seq: &[RouteElement]) -> bool {
    let mut trip = vec![0u32; inst.empty.len()];
    for e in seq {
        match inst.kind(e.node) {
            NodeKind::Barge(_) => {
                if let Some(m) = e.serves {
                    trip[m] += 1;
                }
            }
            NodeKind::EmptyDestination(m) => {
                if trip[m] == 0 {
                    return false;
                }
                trip[m] = 0;
            }
            _ => {}
        }
    }
    trip.iter().all(|&c| c == 0)
}

/// All ways to tag physical barges onto the chosen plan slots: each barge
/// serves one slot or stays idle, every slot gets at least one barge per
/// visit, and each order receives exactly its demand.
fn barge_assignments(
    inst: &Instance,
    slots: &[(EmptyId, usize, u8)],
) -> Vec<Vec<Option<usize>>> {
    let b = inst.barges.len();
    let mut out = Vec::new();
    for pick in index_product(&vec![slots.len() + 1; b]) {
        // Option index 0 means idle; i+1 means slot i.
        let mut per_slot = vec![0u32; slots.len()];
        for &choice in &pick {
            if choice > 0 {
                per_slot[choice - 1] += 1;
            }
        }
        if slots
            .iter()
            .zip(&per_slot)
            .any(|(&(_, _, visits), &n)| n < visits as u32)
        {
            continue;
        }
        let mut per_order = vec![0u32; inst.empty.len()];
        for (&(m, _, _), &n) in slots.iter().zip(&per_slot) {
            per_order[m] += n;
        }
        if per_order
            .iter()
            .zip(&inst.empty)
            .any(|(&got, order)| got != order.required_barges)
        {
            continue;
        }
        out.push(pick.iter().map(|&c| c.checked_sub(1)).collect());
    }
    out
}

fn drive(inst: &Instance, yield_fn: &mut impl FnMut(Solution)) {
    let tugs = inst.tugboats.len();
    let plans = order_plans(tugs);
    let barge_base = 2 * inst.laden.len() + inst.empty.len();
    for f_assign in index_product(&vec![tugs; inst.laden.len()]) {
        for plan_pick in index_product(&vec![plans.len(); inst.empty.len()]) {
            let slots: Vec<(EmptyId, usize, u8)> = plan_pick
                .iter()
                .enumerate()
                .flat_map(|(m, &i)| plans[i].iter().map(move |&(p, v)| (m, p, v)))
                .collect();
            for tagging in barge_assignments(inst, &slots) {
                let mut tasks: Vec<Tasks> = (0..tugs).map(|_| Tasks::default()).collect();
                for (k, &p) in f_assign.iter().enumerate() {
                    tasks[p].pairs.push((2 * k, 2 * k + 1));
                }
                for &(m, p, v) in &slots {
                    tasks[p].groups.push((inst.empty[m].destination, m, v));
                }
                let mut pooled = Vec::new();
                for (i, &slot) in tagging.iter().enumerate() {
                    match slot {
                        Some(s) => {
                            let (m, p, _) = slots[s];
                            tasks[p].barges.push((barge_base + i, m));
                        }
                        None => pooled.push(barge_base + i),
                    }
                }
                let per_tug: Vec<Vec<Vec<RouteElement>>> =
                    tasks.iter().map(|t| sequences(inst, t)).collect();
                if per_tug.iter().any(|s| s.is_empty()) {
                    continue;
                }
                for combo in index_product(&per_tug.iter().map(|s| s.len()).collect::<Vec<_>>()) {
                    let routes = combo
                        .iter()
                        .enumerate()
                        .map(|(p, &i)| per_tug[p][i].clone())
                        .collect();
                    yield_fn(Solution {
                        routes,
                        pool_laden: vec![],
                        pool_empty: vec![],
                        pool_barges: pooled.clone(),
                    });
                }
            }
        }
    }
}
