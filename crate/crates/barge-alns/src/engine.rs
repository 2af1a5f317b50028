//! The search loop: pick an order family, draw destroy and repair operators
//! from that family's banks, evaluate the rebuilt candidate, decide
//! acceptance by annealing, reward the operators, and adapt weights at
//! segment boundaries. Restarts the temperature when it bottoms out and
//! stops on stagnation, an iteration cap, or a wall-clock budget.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adaptive::{
    Annealer, OperatorBank, REWARD_ACCEPTED, REWARD_BETTER, REWARD_GLOBAL_BEST, REWARD_OTHER,
    SEGMENT_LENGTH, SMOOTHING,
};
use crate::construct::construct;
use crate::destroy::{self, DestroyOp};
use crate::eval::{loss, LossBreakdown};
use crate::model::{Instance, Solution};
use crate::repair::{self, RepairOp};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub seed: u64,
    /// Hard iteration cap.
    pub iterations: usize,
    /// Wall-clock budget in seconds.
    pub time_limit: Option<f64>,
    /// Stop after this many iterations without a new best.
    pub stagnation_limit: usize,
    pub t_init: f64,
    pub cooling: f64,
    pub t_min: f64,
    pub segment: usize,
    pub smoothing: f64,
    /// Family die: a roll of `family_bias` works on empty-barge orders, any
    /// other face works on laden orders.
    pub family_bias: u32,
    /// Fixed removal count; derived per operator when absent.
    pub step: Option<usize>,
    /// Prefer the smallest regret gap instead of the largest.
    pub regret_literal: bool,
    /// Independent runs with consecutive seeds; the best result wins.
    pub multistart: usize,
    /// Keep per-iteration and per-segment traces.
    pub record: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            seed: 0,
            iterations: 5000,
            time_limit: None,
            stagnation_limit: 200,
            t_init: 100.0,
            cooling: 0.98,
            t_min: 10.0,
            segment: SEGMENT_LENGTH,
            smoothing: SMOOTHING,
            family_bias: 4,
            step: None,
            regret_literal: false,
            multistart: 1,
            record: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IterationRecord {
    pub iteration: usize,
    pub temperature: f64,
    pub candidate_loss: f64,
    pub current_loss: f64,
    pub best_loss: f64,
    pub accepted: bool,
    pub destroy: &'static str,
    pub repair: &'static str,
    pub reward: f64,
}

#[derive(Clone, Debug)]
pub struct WeightRecord {
    pub segment: usize,
    pub bank: &'static str,
    pub op: &'static str,
    pub weight: f64,
}

#[derive(Clone, Debug, Default)]
pub struct RunStats {
    pub iterations: Vec<IterationRecord>,
    pub weights: Vec<WeightRecord>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best: Solution,
    pub best_loss: LossBreakdown,
    pub initial_loss: f64,
    pub iterations: usize,
    pub seed: u64,
    pub stats: Option<RunStats>,
}

fn hash64(sol: &Solution) -> u64 {
    let mut h = DefaultHasher::new();
    sol.hash(&mut h);
    h.finish()
}

struct Banks {
    laden_destroy: OperatorBank,
    laden_repair: OperatorBank,
    empty_destroy: OperatorBank,
    empty_repair: OperatorBank,
}

impl Banks {
    fn new() -> Banks {
        Banks {
            laden_destroy: OperatorBank::new(destroy::LADEN_BANK.len()),
            laden_repair: OperatorBank::new(repair::LADEN_BANK.len()),
            empty_destroy: OperatorBank::new(destroy::EMPTY_BANK.len()),
            empty_repair: OperatorBank::new(repair::EMPTY_BANK.len()),
        }
    }

    fn snapshot(&self, segment: usize, out: &mut Vec<WeightRecord>) {
        let dump = |bank: &OperatorBank,
                    names: &mut dyn Iterator<Item = &'static str>,
                    label: &'static str,
                    out: &mut Vec<WeightRecord>| {
            for (w, op) in bank.weights().iter().zip(names) {
                out.push(WeightRecord { segment, bank: label, op, weight: *w });
            }
        };
        dump(
            &self.laden_destroy,
            &mut destroy::LADEN_BANK.iter().map(|o| o.name()),
            "laden-destroy",
            out,
        );
        dump(
            &self.laden_repair,
            &mut repair::LADEN_BANK.iter().map(|o| o.name()),
            "laden-repair",
            out,
        );
        dump(
            &self.empty_destroy,
            &mut destroy::EMPTY_BANK.iter().map(|o| o.name()),
            "empty-destroy",
            out,
        );
        dump(
            &self.empty_repair,
            &mut repair::EMPTY_BANK.iter().map(|o| o.name()),
            "empty-repair",
            out,
        );
    }
}

fn solve_single(inst: &Instance, cfg: &SearchConfig) -> SearchOutcome {
    assert!(cfg.family_bias >= 1, "family bias must be at least one");
    assert!(cfg.segment >= 1, "segment length must be at least one");
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let initial = construct(inst);
    let initial_loss = loss(inst, &initial).expect("constructed solution evaluates").total;
    let mut current = initial.clone();
    let mut current_loss = initial_loss;
    let mut best = initial;
    let mut best_loss = current_loss;

    let mut banks = Banks::new();
    let mut annealer = Annealer::new(cfg.t_init, cfg.cooling, cfg.t_min);
    let mut visited: HashSet<u64> = HashSet::new();
    visited.insert(hash64(&current));
    let mut stats = cfg.record.then(RunStats::default);
    let mut stagnant = 0usize;
    let mut done = 0usize;

    for it in 1..=cfg.iterations {
        if stagnant >= cfg.stagnation_limit {
            break;
        }
        if let Some(limit) = cfg.time_limit {
            if started.elapsed().as_secs_f64() >= limit {
                break;
            }
        }
        done = it;

        let roll = rng.gen_range(1..=cfg.family_bias);
        let mut laden = roll != cfg.family_bias;
        if inst.empty.is_empty() {
            laden = true;
        } else if inst.laden.is_empty() {
            laden = false;
        }
        let (d_bank, r_bank) = if laden {
            (&mut banks.laden_destroy, &mut banks.laden_repair)
        } else {
            (&mut banks.empty_destroy, &mut banks.empty_repair)
        };
        let di = d_bank.choose(&mut rng);
        let ri = r_bank.choose(&mut rng);
        let d_op: DestroyOp = if laden {
            destroy::LADEN_BANK[di]
        } else {
            destroy::EMPTY_BANK[di]
        };
        let r_op: RepairOp = if laden {
            repair::LADEN_BANK[ri]
        } else {
            repair::EMPTY_BANK[ri]
        };

        let mut cand = current.clone();
        let step = cfg.step.unwrap_or_else(|| d_op.default_step(inst, &cand));
        d_op.apply(inst, &mut cand, step, &mut rng);
        r_op.apply(inst, &mut cand, cfg.regret_literal, &mut rng);
        let cand_loss = loss(inst, &cand).expect("repaired solution evaluates").total;

        let fresh = visited.insert(hash64(&cand));
        let accepted = annealer.accepts(current_loss, cand_loss, &mut rng);
        let improved_best = cand_loss < best_loss - 1e-9;
        let reward = if improved_best {
            REWARD_GLOBAL_BEST
        } else if fresh && cand_loss < current_loss {
            REWARD_BETTER
        } else if fresh && accepted {
            REWARD_ACCEPTED
        } else {
            REWARD_OTHER
        };
        d_bank.reward(di, reward);
        r_bank.reward(ri, reward);

        if improved_best {
            best = cand.clone();
            best_loss = cand_loss;
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        if let Some(s) = stats.as_mut() {
            s.iterations.push(IterationRecord {
                iteration: it,
                temperature: annealer.temperature,
                candidate_loss: cand_loss,
                current_loss,
                best_loss,
                accepted,
                destroy: d_op.name(),
                repair: r_op.name(),
                reward,
            });
        }
        if accepted {
            current = cand;
            current_loss = cand_loss;
        }
        annealer.cool();
        if it % cfg.segment == 0 {
            banks.laden_destroy.end_segment(cfg.smoothing);
            banks.laden_repair.end_segment(cfg.smoothing);
            banks.empty_destroy.end_segment(cfg.smoothing);
            banks.empty_repair.end_segment(cfg.smoothing);
            if let Some(s) = stats.as_mut() {
                banks.snapshot(it / cfg.segment, &mut s.weights);
            }
        }
    }

    let best_loss = loss(inst, &best).expect("best solution evaluates");
    SearchOutcome {
        best,
        best_loss,
        initial_loss,
        iterations: done,
        seed: cfg.seed,
        stats,
    }
}

fn thread_cap() -> usize {
    std::env::var("BARGE_ALNS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Run the search; with `multistart > 1`, launch that many runs on
/// consecutive seeds (parallel up to the thread cap) and keep the best
/// result, ties broken by the lower seed.
pub fn solve(inst: &Instance, cfg: &SearchConfig) -> SearchOutcome {
    if cfg.multistart <= 1 {
        return solve_single(inst, cfg);
    }
    let workers = thread_cap().min(cfg.multistart);
    let mut outcomes: Vec<Option<SearchOutcome>> = vec![None; cfg.multistart];
    std::thread::scope(|scope| {
        let chunks: Vec<Vec<usize>> = (0..workers)
            .map(|w| (0..cfg.multistart).filter(|i| i % workers == w).collect())
            .collect();
        let mut handles = Vec::new();
        for chunk in chunks {
            handles.push(scope.spawn(move || {
                chunk
                    .into_iter()
                    .map(|i| {
                        let mut sub = cfg.clone();
                        sub.seed = cfg.seed.wrapping_add(i as u64);
                        sub.multistart = 1;
                        (i, solve_single(inst, &sub))
                    })
                    .collect::<Vec<_>>()
            }));
        }
        for h in handles {
            for (i, outcome) in h.join().expect("solver thread panicked") {
                outcomes[i] = Some(outcome);
            }
        }
    });
    outcomes
        .into_iter()
        .map(|o| o.expect("every start produced an outcome"))
        .min_by(|a, b| {
            (a.best_loss.total, a.seed)
                .partial_cmp(&(b.best_loss.total, b.seed))
                .unwrap()
        })
        .expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::testkit;
    use crate::validate::validate;

    fn small_config() -> SearchConfig {
        SearchConfig {
            iterations: 300,
            ..SearchConfig::default()
        }
    }

    fn busy_instance() -> Instance {
        let mut raw = testkit::raw_line_instance(3, 2, 6);
        raw.orders_e[0].required_barges = 4;
        raw.orders_e[1].required_barges = 2;
        Instance::build(raw).unwrap()
    }

    #[test]
    fn search_never_worsens_the_construction() {
        let inst = busy_instance();
        let out = solve(&inst, &small_config());
        assert!(out.best_loss.total <= out.initial_loss + 1e-9);
        assert!(out.best.is_complete());
        assert_eq!(validate(&inst, &out.best), vec![]);
    }

    #[test]
    fn same_seed_same_outcome() {
        let inst = busy_instance();
        let a = solve(&inst, &small_config());
        let b = solve(&inst, &small_config());
        assert_eq!(a.best, b.best);
        assert_eq!(a.best_loss.total, b.best_loss.total);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn stagnation_cuts_the_run_short() {
        let inst = testkit::line_instance(1, 0, 0);
        let cfg = SearchConfig {
            iterations: 100_000,
            stagnation_limit: 50,
            ..SearchConfig::default()
        };
        let out = solve(&inst, &cfg);
        assert!(out.iterations < 100_000);
    }

    #[test]
    fn multistart_returns_the_best_of_its_seeds() {
        let inst = busy_instance();
        let multi = solve(
            &inst,
            &SearchConfig {
                multistart: 3,
                ..small_config()
            },
        );
        let singles: Vec<f64> = (0..3)
            .map(|i| {
                let cfg = SearchConfig {
                    seed: i,
                    ..small_config()
                };
                solve(&inst, &cfg).best_loss.total
            })
            .collect();
        let best = singles.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(multi.best_loss.total, best);
    }

    #[test]
    fn recorded_stats_cover_every_iteration_and_segment() {
        let inst = busy_instance();
        let cfg = SearchConfig {
            iterations: 240,
            segment: 60,
            record: true,
            stagnation_limit: 10_000,
            ..SearchConfig::default()
        };
        let out = solve(&inst, &cfg);
        let stats = out.stats.expect("stats were requested");
        assert_eq!(stats.iterations.len(), out.iterations);
        // 4 segment boundaries, 19 operators across the four banks.
        assert_eq!(stats.weights.len(), (out.iterations / 60) * 19);
    }
}
