//! Exhaustive minimisation of a diagonal Hamiltonian by Gray-code walk.

use super::{lex_less, Backend, Solution};
use crate::error::{Error, Result};
use crate::ising::{bits_to_spins, evaluate_ising, ising_to_qubo, IsingModel};
use crate::qubo::{energy_unchecked, QuboModel};

pub const DEFAULT_EXACT_LIMIT: usize = 24;

/// Rebuild the running energy from scratch this often to bound drift.
const RESYNC_EVERY: u64 = 1 << 12;

struct Tolerances {
    /// States whose walked energy lies this close to the incumbent are
    /// re-evaluated exactly.
    window: f64,
    /// Exactly evaluated energies this close are ties.
    tie: f64,
}

fn tolerances(model: &QuboModel) -> Tolerances {
    let total: f64 = model
        .quadratic()
        .values()
        .chain(model.linear())
        .map(|c| c.abs())
        .sum::<f64>()
        + model.constant().abs();
    Tolerances {
        window: 1e-7 * (1.0 + total),
        tie: 1e-9 * (1.0 + model.max_abs_coef()),
    }
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit || n >= 63 {
        return Err(Error::Size {
            required: n,
            limit: limit.min(62),
        });
    }
    Ok(())
}

/// Calls `visit(bits, walked_energy)` for all `2^n` assignments.
fn gray_walk(model: &QuboModel, mut visit: impl FnMut(&[u8], f64)) {
    let n = model.n_vars();
    let adj = model.neighbours();
    let mut bits = vec![0u8; n];
    let mut field = model.linear().to_vec();
    let mut e = model.constant();
    visit(&bits, e);
    for step in 1..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let up = bits[i] == 0;
        e += if up { field[i] } else { -field[i] };
        bits[i] ^= 1;
        let sign = if up { 1.0 } else { -1.0 };
        for &(j, q) in &adj[i] {
            field[j] += sign * q;
        }
        if step % RESYNC_EVERY == 0 {
            e = energy_unchecked(model, &bits);
        }
        visit(&bits, e);
    }
}

/// Global minimum of a QUBO. Ties resolve to the lexicographically smallest
/// bit vector.
pub fn solve_exact(model: &QuboModel, limit: usize) -> Result<Solution> {
    let n = model.n_vars();
    check_size(n, limit)?;
    let tol = tolerances(model);
    let mut best_bits = vec![0u8; n];
    let mut best = energy_unchecked(model, &best_bits);
    let mut walked_best = best;
    gray_walk(model, |bits, walked| {
        if walked > walked_best + tol.window {
            return;
        }
        let exact = energy_unchecked(model, bits);
        let better = exact < best - tol.tie || (exact <= best + tol.tie && lex_less(bits, &best_bits));
        if better {
            best = exact;
            best_bits.copy_from_slice(bits);
        }
        walked_best = walked_best.min(walked);
    });
    Ok(Solution {
        bits: best_bits,
        energy: best,
        backend: Backend::Exact,
        seed: None,
        evaluations: 1u64 << n,
    })
}

pub fn solve_exact_ising(model: &IsingModel, limit: usize) -> Result<Solution> {
    let mut sol = solve_exact(&ising_to_qubo(model), limit)?;
    sol.energy = evaluate_ising(model, &bits_to_spins(&sol.bits))?;
    Ok(sol)
}

/// Minimum energy and every assignment attaining it (within rounding), in
/// lexicographic order.
pub fn ground_states(model: &QuboModel, limit: usize) -> Result<(f64, Vec<Vec<u8>>)> {
    check_size(model.n_vars(), limit)?;
    let tol = tolerances(model);
    let mut walked_best = f64::INFINITY;
    let mut candidates: Vec<(f64, Vec<u8>)> = Vec::new();
    gray_walk(model, |bits, walked| {
        if walked > walked_best + tol.window {
            return;
        }
        if walked < walked_best {
            walked_best = walked;
            candidates.retain(|(e, _)| *e <= walked_best + tol.window);
        }
        candidates.push((energy_unchecked(model, bits), bits.to_vec()));
    });
    let min = candidates.iter().map(|(e, _)| *e).fold(f64::INFINITY, f64::min);
    let mut states: Vec<Vec<u8>> = candidates
        .into_iter()
        .filter(|(e, _)| *e <= min + tol.tie)
        .map(|(_, b)| b)
        .collect();
    states.sort();
    Ok((min, states))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::qubo_to_ising;
    use crate::qubo::{evaluate_qubo, index_to_bits};

    #[test]
    fn single_spin_aligns_against_field() {
        let m = IsingModel::new(1, [], vec![1.0], 0.5).unwrap();
        let s = solve_exact_ising(&m, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!(s.spins(), vec![-1]);
        assert_eq!(s.energy, -0.5);
    }

    #[test]
    fn antiferromagnetic_pair_tie_break() {
        let m = IsingModel::new(2, [((0, 1), 1.0)], vec![0.0, 0.0], 0.0).unwrap();
        let s = solve_exact_ising(&m, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!(s.energy, -1.0);
        // (-1, +1) is bits (0, 1), smaller than (1, 0).
        assert_eq!(s.spins(), vec![-1, 1]);
        let (e, states) = ground_states(&ising_to_qubo(&m), 4).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(states, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn size_guard() {
        let m = QuboModel::builder(5).build().unwrap();
        match solve_exact(&m, 4) {
            Err(Error::Size { required, limit }) => assert_eq!((required, limit), (5, 4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn matches_naive_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 9;
            let mut b = QuboModel::builder(n);
            for i in 0..n {
                b.add_linear(i, rng.gen_range(-3..=3) as f64);
                for j in i + 1..n {
                    if rng.gen_bool(0.4) {
                        b.add_quadratic(i, j, rng.gen_range(-3..=3) as f64);
                    }
                }
            }
            let m = b.build().unwrap();
            let mut naive: Option<(f64, Vec<u8>)> = None;
            for idx in 0..(1u64 << n) {
                let x = index_to_bits(idx, n);
                let e = evaluate_qubo(&m, &x).unwrap();
                let take = match &naive {
                    None => true,
                    Some((be, bx)) => e < *be || (e == *be && x < *bx),
                };
                if take {
                    naive = Some((e, x));
                }
            }
            let s = solve_exact(&m, 24).unwrap();
            let (ne, nx) = naive.unwrap();
            assert_eq!((s.energy, s.bits.clone()), (ne, nx));
            assert_eq!(s.energy, evaluate_qubo(&m, &s.bits).unwrap());
            let (ge, states) = ground_states(&m, 24).unwrap();
            assert_eq!(ge, ne);
            assert_eq!(states[0], s.bits);
            let via_ising = solve_exact_ising(&qubo_to_ising(&m), 24).unwrap();
            assert_eq!(via_ising.bits, s.bits);
        }
    }

    #[test]
    fn empty_model() {
        let mut b = QuboModel::builder(0);
        b.add_constant(3.0);
        let s = solve_exact(&b.build().unwrap(), 4).unwrap();
        assert!(s.bits.is_empty());
        assert_eq!(s.energy, 3.0);
    }
}
