//! Seeded fixtures shared by the benchmarks.

use qroute::instance::{build_weight_matrix, generate_swp_instance, SwpGenerator};
use qroute::qubo::{build_swp_qubo, SwpQuboOptions};
use qroute::{IsingModel, QuboModel, SwpInstance, WeightMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense random Ising model with couplings and fields in `[-1, 1)`.
pub fn random_ising(n: usize, seed: u64) -> IsingModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut couplings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            couplings.push(((i, j), rng.gen_range(-1.0..1.0)));
        }
    }
    let fields = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    IsingModel::new(n, couplings, fields, 0.0).expect("finite coefficients")
}

pub fn swp(n: usize, k: usize, seed: u64) -> (SwpInstance, WeightMatrix, QuboModel) {
    let (inst, d) = generate_swp_instance(&SwpGenerator::new(n, k, seed)).expect("valid generator");
    let w = build_weight_matrix(&inst, &d, 0.01).expect("non-degenerate instance");
    let q = build_swp_qubo(&inst, &w, &SwpQuboOptions::default()).expect("valid model");
    (inst, w, q)
}
