//! Metropolis simulated annealing on Ising spins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{lex_less, Backend, Solution};
use crate::error::{Error, Result};
use crate::ising::{evaluate_ising, ising_energy_unchecked, qubo_to_ising, spins_to_bits, IsingModel};
use crate::qubo::{evaluate_qubo, QuboModel};

/// Geometric cooling from `t_start` to `t_end` over `steps` temperatures.
/// Each step runs `sweeps_per_step` sweeps of `n` uniformly drawn single-spin
/// flip proposals.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub sweeps_per_step: usize,
    pub restarts: usize,
}

impl AnnealSchedule {
    /// `t_start = 2 max|coef|`, `t_end = 1e-3`, 1000 steps of one sweep,
    /// 20 restarts.
    pub fn default_for(model: &IsingModel) -> Self {
        let scale = model.max_abs_coef();
        Self {
            t_start: if scale > 0.0 { 2.0 * scale } else { 1.0 },
            t_end: 1e-3,
            steps: 1000,
            sweeps_per_step: 1,
            restarts: 20,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.t_start.is_finite()
            && self.t_end > 0.0
            && self.t_end < self.t_start
            && self.steps >= 1
            && self.sweeps_per_step >= 1
            && self.restarts >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!("invalid anneal schedule {self:?}")))
        }
    }

    /// Multiplicative temperature step, in (0, 1).
    pub fn decay(&self) -> f64 {
        if self.steps <= 1 {
            return 0.5;
        }
        (self.t_end / self.t_start).powf(1.0 / (self.steps - 1) as f64)
    }
}

/// Best-so-far energy after every temperature step, per restart.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealTrace {
    pub best_history: Vec<Vec<f64>>,
}

struct RestartOutcome {
    spins: Vec<i8>,
    energy: f64,
    history: Vec<f64>,
    proposals: u64,
}

fn run_restart(
    model: &IsingModel,
    adj: &[Vec<(usize, f64)>],
    schedule: &AnnealSchedule,
    seed: u64,
    restart: usize,
) -> RestartOutcome {
    let n = model.n_spins();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let mut s: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    // local[i] = h_i + sum_j J_ij s_j, so flipping i changes E by -2 s_i local[i].
    let mut local: Vec<f64> = (0..n)
        .map(|i| model.fields()[i] + adj[i].iter().map(|&(j, c)| c * s[j] as f64).sum::<f64>())
        .collect();
    let mut e = ising_energy_unchecked(model, &s);
    let mut best = s.clone();
    let mut best_e = e;
    let mut history = Vec::with_capacity(schedule.steps);
    let decay = schedule.decay();
    let mut t = schedule.t_start;
    let mut proposals = 0u64;
    for _ in 0..schedule.steps {
        for _ in 0..schedule.sweeps_per_step * n {
            let i = rng.gen_range(0..n);
            let delta = -2.0 * s[i] as f64 * local[i];
            proposals += 1;
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp() {
                s[i] = -s[i];
                e += delta;
                let si = 2.0 * s[i] as f64;
                for &(j, c) in &adj[i] {
                    local[j] += c * si;
                }
                if e < best_e {
                    best_e = e;
                    best.copy_from_slice(&s);
                }
            }
        }
        history.push(best_e);
        t *= decay;
    }
    RestartOutcome {
        energy: ising_energy_unchecked(model, &best),
        spins: best,
        history,
        proposals,
    }
}

/// Best of `schedule.restarts` independent anneals. Restart `r` draws from
/// stream `r` of a ChaCha8 generator seeded with `seed`, so the result does
/// not depend on how restarts are scheduled across threads.
pub fn solve_simulated_annealing(model: &IsingModel, schedule: &AnnealSchedule, seed: u64) -> Result<Solution> {
    solve_simulated_annealing_traced(model, schedule, seed).map(|(s, _)| s)
}

pub fn solve_simulated_annealing_traced(
    model: &IsingModel,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<(Solution, AnnealTrace)> {
    schedule.validate()?;
    let n = model.n_spins();
    if n == 0 || model.max_abs_coef() == 0.0 {
        let bits = vec![0u8; n];
        let energy = evaluate_ising(model, &vec![-1; n])?;
        let sol = Solution {
            bits,
            energy,
            backend: Backend::Sa,
            seed: Some(seed),
            evaluations: 1,
        };
        return Ok((sol, AnnealTrace { best_history: vec![vec![energy]] }));
    }
    let adj = model.neighbours();
    let outcomes: Vec<RestartOutcome> = (0..schedule.restarts)
        .into_par_iter()
        .map(|r| run_restart(model, &adj, schedule, seed, r))
        .collect();

    let tie = 1e-9 * (1.0 + model.max_abs_coef());
    let mut pick = 0;
    for (r, o) in outcomes.iter().enumerate().skip(1) {
        let cur = &outcomes[pick];
        let better = o.energy < cur.energy - tie
            || (o.energy <= cur.energy + tie && lex_less(&spins_to_bits(&o.spins), &spins_to_bits(&cur.spins)));
        if better {
            pick = r;
        }
    }
    let evaluations = outcomes.iter().map(|o| o.proposals + 1).sum();
    let chosen = &outcomes[pick];
    let sol = Solution {
        bits: spins_to_bits(&chosen.spins),
        energy: evaluate_ising(model, &chosen.spins)?,
        backend: Backend::Sa,
        seed: Some(seed),
        evaluations,
    };
    let trace = AnnealTrace {
        best_history: outcomes.into_iter().map(|o| o.history).collect(),
    };
    Ok((sol, trace))
}

/// Anneals the Ising form of a QUBO and reports the QUBO energy.
pub fn solve_simulated_annealing_qubo(
    model: &QuboModel,
    schedule: Option<&AnnealSchedule>,
    seed: u64,
) -> Result<Solution> {
    let ising = qubo_to_ising(model);
    let default = AnnealSchedule::default_for(&ising);
    let mut sol = solve_simulated_annealing(&ising, schedule.unwrap_or(&default), seed)?;
    sol.energy = evaluate_qubo(model, &sol.bits)?;
    Ok(sol)
}
