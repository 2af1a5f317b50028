//! Starting solution: cheapest-insertion construction over both order kinds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::insert::{greedy_complete, Noise};
use crate::model::{Instance, Solution};

/// Build a solution from scratch by repeatedly committing the cheapest
/// feasible insertion over all pooled orders. Deterministic; work that has
/// no feasible placement stays pooled and is priced by the loss.
pub fn construct(inst: &Instance) -> Solution {
    let mut sol = Solution::unassigned(inst);
    // Noise off consumes no randomness; the generator argument is only part
    // of the insertion machinery's signature.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    greedy_complete(inst, &mut sol, Noise::Off, &mut rng);
    sol
}
