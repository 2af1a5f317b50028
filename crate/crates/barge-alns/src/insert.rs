//! Shared insertion machinery for the constructive heuristic and the repair
//! operators: cheapest position search for laden orders, service-plan
//! enumeration for empty-barge orders, and the greedy completion sweep.
//!
//! Empty-barge orders are inserted as contiguous blocks `[barges..., visit]`.
//! The plan space is tiered by total visit count: a single visit when the
//! demand fits the tow capacity, then splits over two visits of one tugboat
//! or one visit each of two tugboats, then two tugboats with up to two
//! visits each. A tier is only considered when no cheaper tier has a
//! feasible plan. Within a single tugboat every split of the demand is
//! tried; when a share of a two-tugboat plan needs two visits, the first
//! visit is filled to capacity.

use rand::Rng;

use crate::eval::{route_cost, route_cost_capped};
use crate::model::{EmptyId, Instance, LadenId, NodeId, RouteElement, Solution};

/// Randomization of insertion deltas. `Uniform` multiplies every candidate
/// evaluation by a fresh factor in [0.8, 1.2]; `Const` multiplies by a fixed
/// factor without consuming randomness, so `Const(1.0)` behaves exactly like
/// `Off`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Noise {
    Off,
    Uniform,
    Const(f64),
}

impl Noise {
    pub fn factor(&self, rng: &mut impl Rng) -> f64 {
        match self {
            Noise::Off => 1.0,
            Noise::Const(c) => *c,
            Noise::Uniform => rng.gen_range(0.8..=1.2),
        }
    }
}

/// A candidate placement of a laden order: origin at gap `origin_gap`, the
/// destination after the elements originally at `origin_gap..dest_gap`.
#[derive(Clone, Copy, Debug)]
pub struct FInsertion {
    pub tug: usize,
    pub origin_gap: usize,
    pub dest_gap: usize,
    pub delta: f64,
}

/// Cheapest feasible placement of a laden order in each route. Routes with
/// no capacity-feasible position are absent from the result.
pub fn f_best_per_route(
    inst: &Instance,
    sol: &Solution,
    order: LadenId,
    noise: Noise,
    rng: &mut impl Rng,
) -> Vec<FInsertion> {
    let o = inst.laden[order].origin;
    let d = inst.laden[order].destination;
    let mut out = Vec::new();
    let mut scratch: Vec<RouteElement> = Vec::new();
    for (p, route) in sol.routes.iter().enumerate() {
        let Ok(base) = route_cost(inst, p, route) else {
            continue;
        };
        let mut best: Option<FInsertion> = None;
        for i in 0..=route.len() {
            for k in i..=route.len() {
                scratch.clear();
                scratch.extend_from_slice(&route[..i]);
                scratch.push(RouteElement::stop(o));
                scratch.extend_from_slice(&route[i..k]);
                scratch.push(RouteElement::stop(d));
                scratch.extend_from_slice(&route[k..]);
                let Some(cost) = route_cost_capped(inst, p, &scratch) else {
                    continue;
                };
                let delta = (cost - base) * noise.factor(rng);
                if best.map_or(true, |b| delta < b.delta) {
                    best = Some(FInsertion { tug: p, origin_gap: i, dest_gap: k, delta });
                }
            }
        }
        if let Some(b) = best {
            out.push(b);
        }
    }
    out
}

pub fn apply_f(inst: &Instance, sol: &mut Solution, order: LadenId, ins: &FInsertion) {
    let o = inst.laden[order].origin;
    let d = inst.laden[order].destination;
    let route = &mut sol.routes[ins.tug];
    route.insert(ins.origin_gap, RouteElement::stop(o));
    route.insert(ins.dest_gap + 1, RouteElement::stop(d));
    sol.pool_laden.retain(|&j| j != order);
}

/// A committed insertion of all outstanding barges of one empty-barge order.
#[derive(Clone, Debug)]
pub struct EInsertion {
    pub order: EmptyId,
    /// Selection metric: sum of (noised) chunk deltas plus swap gains.
    pub delta: f64,
    /// Gap to the second-cheapest plan of the winning tier.
    pub regret: f64,
    pub solution: Solution,
}

/// One service plan: per tugboat, the barge count of each planned visit.
type Plan = Vec<(usize, Vec<u32>)>;

/// Enumerate service plans grouped by total visit count, cheapest-shaped
/// tiers first. `visits[p]` counts the tugboat's existing calls at the
/// order's destination.
fn plan_tiers(n_tugs: usize, visits: &[u8], cap: u32, n: u32) -> Vec<Vec<Plan>> {
    let serving: Vec<usize> = (0..n_tugs).filter(|&p| visits[p] > 0).collect();
    let eligible = |extra: &[usize]| {
        let mut union = serving.clone();
        for &p in extra {
            if !union.contains(&p) {
                union.push(p);
            }
        }
        union.len() <= 2
    };
    let slots = |p: usize| 2u32.saturating_sub(visits[p] as u32);

    let mut plans: Vec<(u32, Plan)> = Vec::new();
    for p in 0..n_tugs {
        if !eligible(&[p]) {
            continue;
        }
        if n <= cap && slots(p) >= 1 {
            plans.push((1, vec![(p, vec![n])]));
        }
        if n >= 2 && slots(p) >= 2 {
            let lo = n.saturating_sub(cap).max(1);
            let hi = (n - 1).min(cap);
            for s in lo..=hi {
                plans.push((2, vec![(p, vec![s, n - s])]));
            }
        }
    }
    let share_shape = |p: usize, share: u32| -> Option<Vec<u32>> {
        if share <= cap {
            (slots(p) >= 1).then(|| vec![share])
        } else if share <= 2 * cap {
            (slots(p) >= 2).then(|| vec![cap, share - cap])
        } else {
            None
        }
    };
    for p in 0..n_tugs {
        for q in p + 1..n_tugs {
            if !eligible(&[p, q]) {
                continue;
            }
            for sp in 1..n {
                if let (Some(a), Some(b)) = (share_shape(p, sp), share_shape(q, n - sp)) {
                    let t = (a.len() + b.len()) as u32;
                    plans.push((t, vec![(p, a), (q, b)]));
                }
            }
        }
    }

    plans.sort_by_key(|&(t, _)| t);
    let mut tiers: Vec<Vec<Plan>> = Vec::new();
    let mut cur: Option<u32> = None;
    for (t, plan) in plans {
        if cur != Some(t) {
            tiers.push(Vec::new());
            cur = Some(t);
        }
        tiers.last_mut().unwrap().push(plan);
    }
    tiers
}

fn visit_state(route: &[RouteElement], dest: NodeId) -> (u8, Option<usize>) {
    let mut count = 0u8;
    let mut last = None;
    for (k, e) in route.iter().enumerate() {
        if e.node == dest {
            count += 1;
            last = Some(k);
        }
    }
    (count, last)
}

/// Pick `s` pool barges by walking nearest-first from `from`, ties broken by
/// the smaller node id.
fn nearest_chain(inst: &Instance, pool: &[NodeId], from: NodeId, s: u32) -> Vec<NodeId> {
    let mut avail: Vec<NodeId> = pool.to_vec();
    let mut chain = Vec::with_capacity(s as usize);
    let mut cur = from;
    for _ in 0..s {
        let (k, _) = avail
            .iter()
            .enumerate()
            .map(|(k, &b)| (k, (inst.travel_time(cur, b), b)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        cur = avail.swap_remove(k);
        chain.push(cur);
    }
    chain
}

/// Place every chunk of `plan` in sequence, each at its cheapest gap after
/// the tugboat's previous call at the destination. Returns the updated
/// solution and the summed (noised) delta, or `None` when some chunk has no
/// capacity-feasible gap.
fn evaluate_plan(
    inst: &Instance,
    base: &Solution,
    order: EmptyId,
    plan: &Plan,
    noise: Noise,
    rng: &mut impl Rng,
) -> Option<(Solution, f64)> {
    let dest = inst.empty[order].destination;
    let mut work = base.clone();
    let mut total = 0.0;
    let mut scratch: Vec<RouteElement> = Vec::new();
    for &(p, ref sizes) in plan {
        for &s in sizes {
            let (vcount, last_pos) = visit_state(&work.routes[p], dest);
            let gap_lo = last_pos.map_or(0, |k| k + 1);
            let route = &work.routes[p];
            let base_cost = route_cost(inst, p, route).ok()?;
            if (work.pool_barges.len() as u32) < s {
                return None;
            }
            let mut best: Option<(usize, Vec<NodeId>, f64)> = None;
            for g in gap_lo..=route.len() {
                let pred = if g == 0 { inst.start_node() } else { route[g - 1].node };
                let chain = nearest_chain(inst, &work.pool_barges, pred, s);
                scratch.clear();
                scratch.extend_from_slice(&route[..g]);
                scratch.extend(chain.iter().map(|&b| RouteElement::barge(b, order)));
                scratch.push(RouteElement::visit(dest, vcount + 1));
                scratch.extend_from_slice(&route[g..]);
                let Some(cost) = route_cost_capped(inst, p, &scratch) else {
                    continue;
                };
                let delta = (cost - base_cost) * noise.factor(rng);
                if best.as_ref().map_or(true, |b| delta < b.2) {
                    best = Some((g, chain, delta));
                }
            }
            let (g, chain, delta) = best?;
            for b in &chain {
                let k = work.pool_barges.iter().position(|x| x == b).unwrap();
                work.pool_barges.remove(k);
            }
            let mut block: Vec<RouteElement> =
                chain.iter().map(|&b| RouteElement::barge(b, order)).collect();
            block.push(RouteElement::visit(dest, vcount + 1));
            work.routes[p].splice(g..g, block);
            total += delta;
        }
    }
    work.pool_empty.retain(|&(m, _)| m != order);
    Some((work, total))
}

/// Substitute inserted barges with pool barges while it lowers true route
/// cost. The load profile is unchanged by a swap, so feasibility holds.
fn one_swap_improve(inst: &Instance, sol: &mut Solution, base: &Solution, order: EmptyId) -> f64 {
    let used: Vec<NodeId> = base
        .pool_barges
        .iter()
        .copied()
        .filter(|b| !sol.pool_barges.contains(b))
        .collect();
    let mut spots: Vec<(usize, usize)> = Vec::new();
    for (p, route) in sol.routes.iter().enumerate() {
        for (k, e) in route.iter().enumerate() {
            if e.serves == Some(order) && used.contains(&e.node) {
                spots.push((p, k));
            }
        }
    }
    let mut gained = 0.0;
    loop {
        let mut best: Option<(usize, usize, NodeId, f64)> = None;
        for &(p, k) in &spots {
            let Ok(cur) = route_cost(inst, p, &sol.routes[p]) else {
                continue;
            };
            for &b in &sol.pool_barges {
                let mut cand = sol.routes[p].clone();
                cand[k].node = b;
                let Some(cost) = route_cost_capped(inst, p, &cand) else {
                    continue;
                };
                let d = cost - cur;
                if d < -1e-9 && best.as_ref().map_or(true, |x| d < x.3) {
                    best = Some((p, k, b, d));
                }
            }
        }
        let Some((p, k, b, d)) = best else {
            break;
        };
        let old = sol.routes[p][k].node;
        sol.routes[p][k].node = b;
        let j = sol.pool_barges.iter().position(|&x| x == b).unwrap();
        sol.pool_barges.remove(j);
        sol.pool_barges.push(old);
        gained += d;
    }
    gained
}

/// Cheapest way to deliver all outstanding barges of one order, or `None`
/// when no tier has a feasible plan.
pub fn best_e_insertion(
    inst: &Instance,
    sol: &Solution,
    order: EmptyId,
    noise: Noise,
    rng: &mut impl Rng,
) -> Option<EInsertion> {
    let n = sol.pool_empty.iter().find(|&&(m, _)| m == order).map(|&(_, c)| c)?;
    if n == 0 || (sol.pool_barges.len() as u32) < n {
        return None;
    }
    let dest = inst.empty[order].destination;
    let visits: Vec<u8> = sol
        .routes
        .iter()
        .map(|r| r.iter().filter(|e| e.node == dest).count() as u8)
        .collect();
    for tier in plan_tiers(sol.routes.len(), &visits, inst.capacity(), n) {
        let mut best: Option<Solution> = None;
        let mut best_delta = f64::INFINITY;
        let mut second = f64::INFINITY;
        for plan in &tier {
            let Some((cand, delta)) = evaluate_plan(inst, sol, order, plan, noise, rng) else {
                continue;
            };
            if delta < best_delta {
                second = best_delta;
                best_delta = delta;
                best = Some(cand);
            } else if delta < second {
                second = delta;
            }
        }
        if let Some(mut winner) = best {
            let gained = one_swap_improve(inst, &mut winner, sol, order);
            winner.canonicalize_pools();
            let regret = if second.is_finite() { second - best_delta } else { f64::INFINITY };
            return Some(EInsertion {
                order,
                delta: best_delta + gained,
                regret,
                solution: winner,
            });
        }
    }
    None
}

/// Insert everything still pooled, cheapest first across both order kinds,
/// skipping work with no feasible placement. Every repair ends with this
/// sweep so it returns complete solutions whenever capacity allows.
pub fn greedy_complete(inst: &Instance, sol: &mut Solution, noise: Noise, rng: &mut impl Rng) {
    loop {
        let mut best_f: Option<(LadenId, FInsertion)> = None;
        for j in sol.pool_laden.clone() {
            for cand in f_best_per_route(inst, sol, j, noise, rng) {
                if best_f.as_ref().map_or(true, |(_, b)| cand.delta < b.delta) {
                    best_f = Some((j, cand));
                }
            }
        }
        let mut best_e: Option<EInsertion> = None;
        for (m, _) in sol.pool_empty.clone() {
            if let Some(cand) = best_e_insertion(inst, sol, m, noise, rng) {
                if best_e.as_ref().map_or(true, |b| cand.delta < b.delta) {
                    best_e = Some(cand);
                }
            }
        }
        match (best_f, best_e) {
            (None, None) => break,
            (Some((j, f)), None) => apply_f(inst, sol, j, &f),
            (None, Some(e)) => *sol = e.solution,
            (Some((j, f)), Some(e)) => {
                if f.delta <= e.delta {
                    apply_f(inst, sol, j, &f);
                } else {
                    *sol = e.solution;
                }
            }
        }
    }
    sol.canonicalize_pools();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::testkit;
    use crate::validate::validate;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn laden_pair_lands_on_an_empty_route() {
        let inst = testkit::line_instance(1, 0, 0);
        let sol = Solution::unassigned(&inst);
        let cands = f_best_per_route(&inst, &sol, 0, Noise::Off, &mut rng());
        assert_eq!(cands.len(), 2);
        // Both routes are empty and identical; four hours of travel each.
        assert_eq!(cands[0].delta, 4.0);
        assert_eq!(cands[1].delta, 4.0);
        let mut sol = sol;
        apply_f(&inst, &mut sol, 0, &cands[0]);
        assert_eq!(sol.routes[0], vec![RouteElement::stop(0), RouteElement::stop(1)]);
        assert!(sol.pool_laden.is_empty());
    }

    #[test]
    fn laden_insertion_avoids_overloading_a_full_tow() {
        let mut raw = testkit::raw_line_instance(1, 1, 1);
        raw.params.capacity = 1;
        let inst = Instance::build(raw).unwrap();
        let mut sol = Solution::unassigned(&inst);
        let e = best_e_insertion(&inst, &sol, 0, Noise::Off, &mut rng()).unwrap();
        sol = e.solution;
        let cands = f_best_per_route(&inst, &sol, 0, Noise::Off, &mut rng());
        assert!(!cands.is_empty());
        let best = cands
            .iter()
            .min_by(|a, b| a.delta.partial_cmp(&b.delta).unwrap())
            .unwrap();
        apply_f(&inst, &mut sol, 0, best);
        assert!(sol.is_complete());
        assert_eq!(validate(&inst, &sol), vec![]);
    }

    #[test]
    fn single_visit_chains_barges_nearest_first() {
        let mut raw = testkit::raw_line_instance(0, 1, 2);
        raw.orders_e[0].required_barges = 2;
        let inst = Instance::build(raw).unwrap();
        let sol = Solution::unassigned(&inst);
        let e = best_e_insertion(&inst, &sol, 0, Noise::Off, &mut rng()).unwrap();
        assert_eq!(
            e.solution.routes[0],
            vec![
                RouteElement::barge(1, 0),
                RouteElement::barge(2, 0),
                RouteElement::visit(0, 1),
            ]
        );
        assert_eq!(e.delta, 6.0);
        assert!(e.solution.is_complete());
        assert_eq!(validate(&inst, &e.solution), vec![]);
    }

    #[test]
    fn oversized_demand_splits_into_multiple_visits() {
        let mut raw = testkit::raw_line_instance(0, 1, 7);
        raw.orders_e[0].required_barges = 7;
        let inst = Instance::build(raw).unwrap();
        let sol = Solution::unassigned(&inst);
        let e = best_e_insertion(&inst, &sol, 0, Noise::Off, &mut rng()).unwrap();
        assert!(e.solution.is_complete());
        assert_eq!(validate(&inst, &e.solution), vec![]);
        let visits: usize = e
            .solution
            .routes
            .iter()
            .map(|r| r.iter().filter(|el| el.node == 0).count())
            .sum();
        assert_eq!(visits, 2);
    }

    #[test]
    fn completion_sweep_serves_everything() {
        let mut raw = testkit::raw_line_instance(2, 2, 5);
        raw.orders_e[0].required_barges = 3;
        raw.orders_e[1].required_barges = 2;
        let inst = Instance::build(raw).unwrap();
        let mut sol = Solution::unassigned(&inst);
        greedy_complete(&inst, &mut sol, Noise::Off, &mut rng());
        assert!(sol.is_complete());
        assert!(sol.pool_barges.is_empty());
        assert_eq!(validate(&inst, &sol), vec![]);
    }

    #[test]
    fn constant_noise_factor_one_matches_noise_off() {
        let mut raw = testkit::raw_line_instance(2, 1, 3);
        raw.orders_e[0].required_barges = 3;
        let inst = Instance::build(raw).unwrap();
        let mut a = Solution::unassigned(&inst);
        let mut b = Solution::unassigned(&inst);
        greedy_complete(&inst, &mut a, Noise::Off, &mut rng());
        greedy_complete(&inst, &mut b, Noise::Const(1.0), &mut rng());
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn sweep_completes_and_validates(f in 0usize..3, e in 0usize..3, extra in 0usize..3, qs in proptest::collection::vec(1u32..4, 3)) {
            let demands: Vec<u32> = qs.iter().take(e).copied().collect();
            let b = demands.iter().sum::<u32>() as usize + extra;
            let mut raw = testkit::raw_line_instance(f, e, b);
            for (m, &q) in demands.iter().enumerate() {
                raw.orders_e[m].required_barges = q;
            }
            let inst = Instance::build(raw).unwrap();
            let mut sol = Solution::unassigned(&inst);
            greedy_complete(&inst, &mut sol, Noise::Off, &mut rng());
            prop_assert!(sol.is_complete());
            prop_assert_eq!(validate(&inst, &sol), vec![]);
        }
    }
}
