//! Repair operators: reinsert pooled work. Each operator runs its family
//! strategy (random order, cheapest-first, or regret-based) and then the
//! cross-family completion sweep, so repairing a destroyed solution yields a
//! complete one whenever capacity allows.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::insert::{
    apply_f, best_e_insertion, f_best_per_route, greedy_complete, FInsertion, Noise,
};
use crate::model::{Instance, LadenId, Solution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairOp {
    /// Insert pooled laden orders in random order, each at its best spot.
    LadenRandom,
    /// Insert pooled laden orders cheapest-first.
    LadenGreedy,
    /// Insert pooled laden orders by regret across routes.
    LadenRegret,
    LadenRandomNoised,
    LadenGreedyNoised,
    LadenRegretNoised,
    /// Insert pooled empty-barge orders in random order.
    EmptyRandom,
    /// Insert pooled empty-barge orders cheapest-first.
    EmptyGreedy,
    /// Insert pooled empty-barge orders by regret between plans.
    EmptyRegret,
    EmptyGreedyNoised,
    EmptyRegretNoised,
}

/// Repair bank used when the iteration works on laden orders.
pub const LADEN_BANK: [RepairOp; 6] = [
    RepairOp::LadenRandom,
    RepairOp::LadenGreedy,
    RepairOp::LadenRegret,
    RepairOp::LadenRandomNoised,
    RepairOp::LadenGreedyNoised,
    RepairOp::LadenRegretNoised,
];

/// Repair bank used when the iteration works on empty-barge orders.
pub const EMPTY_BANK: [RepairOp; 5] = [
    RepairOp::EmptyRandom,
    RepairOp::EmptyGreedy,
    RepairOp::EmptyRegret,
    RepairOp::EmptyGreedyNoised,
    RepairOp::EmptyRegretNoised,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Strategy {
    Random,
    Greedy,
    Regret,
}

impl RepairOp {
    pub fn name(&self) -> &'static str {
        match self {
            RepairOp::LadenRandom => "insert-random-laden",
            RepairOp::LadenGreedy => "insert-greedy-laden",
            RepairOp::LadenRegret => "insert-regret-laden",
            RepairOp::LadenRandomNoised => "insert-random-laden-noised",
            RepairOp::LadenGreedyNoised => "insert-greedy-laden-noised",
            RepairOp::LadenRegretNoised => "insert-regret-laden-noised",
            RepairOp::EmptyRandom => "insert-random-empty",
            RepairOp::EmptyGreedy => "insert-greedy-empty",
            RepairOp::EmptyRegret => "insert-regret-empty",
            RepairOp::EmptyGreedyNoised => "insert-greedy-empty-noised",
            RepairOp::EmptyRegretNoised => "insert-regret-empty-noised",
        }
    }

    fn strategy(&self) -> Strategy {
        match self {
            RepairOp::LadenRandom | RepairOp::LadenRandomNoised | RepairOp::EmptyRandom => {
                Strategy::Random
            }
            RepairOp::LadenGreedy
            | RepairOp::LadenGreedyNoised
            | RepairOp::EmptyGreedy
            | RepairOp::EmptyGreedyNoised => Strategy::Greedy,
            RepairOp::LadenRegret
            | RepairOp::LadenRegretNoised
            | RepairOp::EmptyRegret
            | RepairOp::EmptyRegretNoised => Strategy::Regret,
        }
    }

    fn laden_family(&self) -> bool {
        matches!(
            self,
            RepairOp::LadenRandom
                | RepairOp::LadenGreedy
                | RepairOp::LadenRegret
                | RepairOp::LadenRandomNoised
                | RepairOp::LadenGreedyNoised
                | RepairOp::LadenRegretNoised
        )
    }

    fn noise(&self) -> Noise {
        match self {
            RepairOp::LadenRandomNoised
            | RepairOp::LadenGreedyNoised
            | RepairOp::LadenRegretNoised
            | RepairOp::EmptyGreedyNoised
            | RepairOp::EmptyRegretNoised => Noise::Uniform,
            _ => Noise::Off,
        }
    }

    pub fn apply(
        &self,
        inst: &Instance,
        sol: &mut Solution,
        regret_literal: bool,
        rng: &mut impl Rng,
    ) {
        repair_with(
            inst,
            sol,
            self.strategy(),
            self.laden_family(),
            self.noise(),
            regret_literal,
            rng,
        );
    }
}

/// The operator body with the noise source explicit, so tests can compare a
/// constant factor of one against no noise on identical streams.
fn repair_with(
    inst: &Instance,
    sol: &mut Solution,
    strategy: Strategy,
    laden: bool,
    noise: Noise,
    regret_literal: bool,
    rng: &mut impl Rng,
) {
    if laden {
        laden_phase(inst, sol, strategy, noise, regret_literal, rng);
    } else {
        empty_phase(inst, sol, strategy, noise, regret_literal, rng);
    }
    greedy_complete(inst, sol, noise, rng);
    sol.canonicalize_pools();
}

#[doc(hidden)]
pub fn repair_with_noise(
    inst: &Instance,
    sol: &mut Solution,
    op: RepairOp,
    noise: Noise,
    regret_literal: bool,
    rng: &mut impl Rng,
) {
    repair_with(
        inst,
        sol,
        op.strategy(),
        op.laden_family(),
        noise,
        regret_literal,
        rng,
    );
}

fn laden_phase(
    inst: &Instance,
    sol: &mut Solution,
    strategy: Strategy,
    noise: Noise,
    regret_literal: bool,
    rng: &mut impl Rng,
) {
    match strategy {
        Strategy::Random => {
            let mut pool = sol.pool_laden.clone();
            pool.shuffle(rng);
            for j in pool {
                let mut best: Option<FInsertion> = None;
                for cand in f_best_per_route(inst, sol, j, noise, rng) {
                    if best.map_or(true, |b| cand.delta < b.delta) {
                        best = Some(cand);
                    }
                }
                if let Some(b) = best {
                    apply_f(inst, sol, j, &b);
                }
            }
        }
        Strategy::Greedy => loop {
            let mut best: Option<(LadenId, FInsertion)> = None;
            for j in sol.pool_laden.clone() {
                for cand in f_best_per_route(inst, sol, j, noise, rng) {
                    if best.as_ref().map_or(true, |(_, b)| cand.delta < b.delta) {
                        best = Some((j, cand));
                    }
                }
            }
            let Some((j, ins)) = best else { break };
            apply_f(inst, sol, j, &ins);
        },
        Strategy::Regret => loop {
            // Regret per order: gap between its best and second-best route.
            let mut chosen: Option<(LadenId, FInsertion, f64)> = None;
            for j in sol.pool_laden.clone() {
                let mut cands = f_best_per_route(inst, sol, j, noise, rng);
                if cands.is_empty() {
                    continue;
                }
                cands.sort_by(|a, b| a.delta.partial_cmp(&b.delta).unwrap());
                let regret = if cands.len() > 1 {
                    cands[1].delta - cands[0].delta
                } else {
                    f64::INFINITY
                };
                let better = match chosen {
                    None => true,
                    Some((_, _, r)) => {
                        if regret_literal {
                            regret < r
                        } else {
                            regret > r
                        }
                    }
                };
                if better {
                    chosen = Some((j, cands[0], regret));
                }
            }
            let Some((j, ins, _)) = chosen else { break };
            apply_f(inst, sol, j, &ins);
        },
    }
}

fn empty_phase(
    inst: &Instance,
    sol: &mut Solution,
    strategy: Strategy,
    noise: Noise,
    regret_literal: bool,
    rng: &mut impl Rng,
) {
    match strategy {
        Strategy::Random => {
            let mut pool: Vec<_> = sol.pool_empty.iter().map(|&(m, _)| m).collect();
            pool.shuffle(rng);
            for m in pool {
                if let Some(ins) = best_e_insertion(inst, sol, m, noise, rng) {
                    *sol = ins.solution;
                }
            }
        }
        Strategy::Greedy => loop {
            let mut best: Option<crate::insert::EInsertion> = None;
            for (m, _) in sol.pool_empty.clone() {
                if let Some(cand) = best_e_insertion(inst, sol, m, noise, rng) {
                    if best.as_ref().map_or(true, |b| cand.delta < b.delta) {
                        best = Some(cand);
                    }
                }
            }
            let Some(ins) = best else { break };
            *sol = ins.solution;
        },
        Strategy::Regret => loop {
            let mut chosen: Option<crate::insert::EInsertion> = None;
            for (m, _) in sol.pool_empty.clone() {
                if let Some(cand) = best_e_insertion(inst, sol, m, noise, rng) {
                    let better = match &chosen {
                        None => true,
                        Some(c) => {
                            if regret_literal {
                                cand.regret < c.regret
                            } else {
                                cand.regret > c.regret
                            }
                        }
                    };
                    if better {
                        chosen = Some(cand);
                    }
                }
            }
            let Some(ins) = chosen else { break };
            *sol = ins.solution;
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::construct;
    use crate::destroy::DestroyOp;
    use crate::model::Instance;
    use crate::testkit;
    use crate::validate::validate;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn midsize_instance() -> Instance {
        let mut raw = testkit::raw_line_instance(3, 2, 7);
        raw.orders_e[0].required_barges = 4;
        raw.orders_e[1].required_barges = 3;
        Instance::build(raw).unwrap()
    }

    #[test]
    fn each_operator_restores_a_destroyed_solution() {
        let inst = midsize_instance();
        let base = construct(&inst);
        assert!(base.is_complete());
        for (d_i, d) in [
            DestroyOp::RandomLaden,
            DestroyOp::WorstLaden,
            DestroyOp::RandomVisits,
            DestroyOp::WorstVisits,
            DestroyOp::RandomRoutes,
            DestroyOp::WorstRoutes,
        ]
        .iter()
        .enumerate()
        {
            for (r_i, r) in LADEN_BANK.iter().chain(EMPTY_BANK.iter()).enumerate() {
                let mut sol = base.clone();
                let mut rng = ChaCha8Rng::seed_from_u64((d_i * 16 + r_i) as u64);
                let step = d.default_step(&inst, &sol);
                d.apply(&inst, &mut sol, step, &mut rng);
                r.apply(&inst, &mut sol, false, &mut rng);
                assert!(sol.is_complete(), "{} then {}", d.name(), r.name());
                assert!(testkit::conserved(&inst, &sol), "{} then {}", d.name(), r.name());
                assert_eq!(validate(&inst, &sol), vec![], "{} then {}", d.name(), r.name());
            }
        }
    }

    #[test]
    fn repair_is_deterministic_per_seed() {
        let inst = midsize_instance();
        let base = construct(&inst);
        let run = || {
            let mut sol = base.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            DestroyOp::RandomVisits.apply(&inst, &mut sol, 2, &mut rng);
            RepairOp::EmptyRegretNoised.apply(&inst, &mut sol, false, &mut rng);
            sol
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn constant_factor_one_equals_no_noise_through_an_operator() {
        let inst = midsize_instance();
        let base = construct(&inst);
        let run = |noise| {
            let mut sol = base.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            DestroyOp::RandomVisits.apply(&inst, &mut sol, 2, &mut rng);
            repair_with_noise(
                &inst,
                &mut sol,
                RepairOp::EmptyGreedyNoised,
                noise,
                false,
                &mut rng,
            );
            sol
        };
        assert_eq!(run(Noise::Const(1.0)), run(Noise::Off));
    }

    #[test]
    fn literal_regret_picks_the_smallest_gap_first() {
        let inst = testkit::line_instance(2, 0, 0);
        let mut default_order = Solution::unassigned(&inst);
        let mut literal_order = default_order.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        laden_phase(&inst, &mut default_order, super::Strategy::Regret, Noise::Off, false, &mut rng);
        laden_phase(&inst, &mut literal_order, super::Strategy::Regret, Noise::Off, true, &mut rng);
        assert!(default_order.is_complete());
        assert!(literal_order.is_complete());
    }

    proptest! {
        #[test]
        fn repaired_solutions_are_complete_and_clean(
            d_i in 0usize..6,
            r_i in 0usize..11,
            seed in 0u64..32,
        ) {
            let destroys = [
                DestroyOp::RandomLaden,
                DestroyOp::WorstLaden,
                DestroyOp::RandomVisits,
                DestroyOp::WorstVisits,
                DestroyOp::RandomRoutes,
                DestroyOp::WorstRoutes,
            ];
            let repairs: Vec<RepairOp> =
                LADEN_BANK.iter().chain(EMPTY_BANK.iter()).copied().collect();
            let inst = midsize_instance();
            let mut sol = construct(&inst);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = destroys[d_i];
            let step = d.default_step(&inst, &sol);
            d.apply(&inst, &mut sol, step, &mut rng);
            repairs[r_i].apply(&inst, &mut sol, false, &mut rng);
            prop_assert!(sol.is_complete());
            prop_assert!(testkit::conserved(&inst, &sol));
            prop_assert_eq!(validate(&inst, &sol), vec![]);
        }
    }
}
