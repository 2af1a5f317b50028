//! Adaptive operator weighting and the annealing acceptance schedule.
//!
//! Operators start with equal weights and are drawn by roulette wheel.
//! Rewards accumulate per segment; at a segment boundary each used
//! operator's weight becomes a blend of its old weight and its mean reward,
//! and unused operators keep their weight.

use rand::Rng;

/// Reward when the iteration found a new overall best solution.
pub const REWARD_GLOBAL_BEST: f64 = 1.5;
/// Reward for an unvisited solution better than the current one.
pub const REWARD_BETTER: f64 = 1.2;
/// Reward for an unvisited worse solution that was still accepted.
pub const REWARD_ACCEPTED: f64 = 0.8;
/// Reward in every other case.
pub const REWARD_OTHER: f64 = 0.6;

/// Iterations per adaptivity segment.
pub const SEGMENT_LENGTH: usize = 115;
/// Share of the old weight kept at a segment boundary.
pub const SMOOTHING: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct OperatorBank {
    weights: Vec<f64>,
    scores: Vec<f64>,
    uses: Vec<u32>,
}

impl OperatorBank {
    pub fn new(n: usize) -> OperatorBank {
        OperatorBank {
            weights: vec![1.0; n],
            scores: vec![0.0; n],
            uses: vec![0; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Roulette-wheel draw proportional to the current weights.
    pub fn choose(&self, rng: &mut impl Rng) -> usize {
        let total: f64 = self.weights.iter().sum();
        let mut x = rng.gen_range(0.0..total);
        for (i, w) in self.weights.iter().enumerate() {
            if x < *w {
                return i;
            }
            x -= w;
        }
        self.weights.len() - 1
    }

    pub fn reward(&mut self, op: usize, score: f64) {
        self.scores[op] += score;
        self.uses[op] += 1;
    }

    /// Blend weights with the segment's mean rewards and reset the tallies.
    pub fn end_segment(&mut self, smoothing: f64) {
        for i in 0..self.weights.len() {
            if self.uses[i] > 0 {
                self.weights[i] = smoothing * self.weights[i]
                    + (1.0 - smoothing) * self.scores[i] / self.uses[i] as f64;
            }
            self.scores[i] = 0.0;
            self.uses[i] = 0;
        }
    }
}

/// Exponential-cooling acceptance with periodic reheating: the temperature
/// is multiplied by `cooling` every iteration and snaps back to the start
/// value once it falls below `t_min`.
#[derive(Clone, Debug)]
pub struct Annealer {
    pub temperature: f64,
    t_init: f64,
    cooling: f64,
    t_min: f64,
}

impl Annealer {
    pub fn new(t_init: f64, cooling: f64, t_min: f64) -> Annealer {
        Annealer { temperature: t_init, t_init, cooling, t_min }
    }

    /// Better candidates always pass; worse ones pass with probability
    /// exp(-(candidate - current) / temperature).
    pub fn accepts(&self, current: f64, candidate: f64, rng: &mut impl Rng) -> bool {
        if candidate < current {
            return true;
        }
        let p = ((current - candidate) / self.temperature).exp();
        rng.gen::<f64>() < p
    }

    pub fn cool(&mut self) {
        self.temperature *= self.cooling;
        if self.temperature < self.t_min {
            self.temperature = self.t_init;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn segment_update_blends_mean_reward_and_spares_unused() {
        let mut bank = OperatorBank::new(3);
        bank.reward(0, REWARD_GLOBAL_BEST);
        bank.reward(0, REWARD_GLOBAL_BEST);
        bank.reward(2, REWARD_OTHER);
        bank.end_segment(SMOOTHING);
        assert_eq!(bank.weights(), &[1.25, 1.0, 0.8]);
        // Tallies reset: an empty segment leaves everything unchanged.
        bank.end_segment(SMOOTHING);
        assert_eq!(bank.weights(), &[1.25, 1.0, 0.8]);
    }

    #[test]
    fn roulette_frequencies_follow_the_weights() {
        let mut bank = OperatorBank::new(2);
        bank.reward(1, 4.2);
        bank.reward(1, 4.2);
        bank.end_segment(0.0);
        // Weights are now [1.0, 4.2]; expect op 1 in 4.2/5.2 of draws.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let trials = 100_000;
        let hits = (0..trials).filter(|_| bank.choose(&mut rng) == 1).count();
        let expect = 4.2 / 5.2;
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        let freq = hits as f64 / trials as f64;
        assert!((freq - expect).abs() < 3.0 * sigma, "freq {freq} vs {expect}");
    }

    #[test]
    fn cooling_follows_the_geometric_sequence_and_reheats() {
        let mut a = Annealer::new(100.0, 0.98, 10.0);
        let mut expect = 100.0;
        for _ in 0..113 {
            a.cool();
            expect *= 0.98;
            assert_eq!(a.temperature, expect);
        }
        assert!(a.temperature >= 10.0);
        a.cool();
        assert_eq!(a.temperature, 100.0);
    }

    #[test]
    fn half_acceptance_at_the_matching_delta() {
        let a = Annealer::new(100.0, 0.98, 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let trials = 20_000;
        let hits = (0..trials)
            .filter(|_| a.accepts(100.0, 169.3147, &mut rng))
            .count();
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.02, "freq {freq}");
    }
}
