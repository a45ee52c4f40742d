//! Variational eigensolver and QAOA loops over exact expectations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::circuit::ParamCircuit;
use super::optim::{nelder_mead, spsa_minimize, NelderMeadConfig, OptimResult, SpsaConfig};
use super::state::{Gate, Statevector};
use crate::error::{Error, Result};
use crate::ising::PauliTermList;
use crate::qubo::index_to_bits;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Optimizer {
    Spsa(SpsaConfig),
    NelderMead(NelderMeadConfig),
}

impl Optimizer {
    /// SPSA with calibrated gain and `c = 0.2`.
    pub fn spsa(iters: usize) -> Self {
        Optimizer::Spsa(SpsaConfig {
            iters,
            c: 0.2,
            calibrate: true,
            ..SpsaConfig::default()
        })
    }

    pub fn nelder_mead(iters: usize) -> Self {
        Optimizer::NelderMead(NelderMeadConfig {
            iters,
            ..NelderMeadConfig::default()
        })
    }

    /// Runs from `init`; the starting point is always evaluated first.
    fn minimize<F: FnMut(&[f64]) -> f64>(&self, f: F, init: &[f64], seed: u64) -> Result<OptimResult> {
        match self {
            Optimizer::Spsa(cfg) => {
                let cfg = SpsaConfig {
                    evaluate_initial: true,
                    ..cfg.clone()
                };
                spsa_minimize(f, init, &cfg, seed)
            }
            Optimizer::NelderMead(cfg) => nelder_mead(f, init, cfg),
        }
    }
}

/// Outcome of a variational run. `history[0]` is the starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalResult {
    pub backend: String,
    pub seed: u64,
    pub params: Vec<f64>,
    pub energy: f64,
    pub history: Vec<(usize, f64)>,
    pub most_probable_bits: Vec<u8>,
    pub probability: f64,
    pub evaluations: usize,
}

pub type VqeResult = VariationalResult;

/// QAOA result; `params` interleaves `[gamma_1, beta_1, gamma_2, ..]`.
pub type QaoaResult = VariationalResult;

impl VariationalResult {
    pub fn gammas(&self) -> Vec<f64> {
        self.params.iter().step_by(2).copied().collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.params.iter().skip(1).step_by(2).copied().collect()
    }
}

fn random_angles(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..n)
        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

fn readout(state: &Statevector) -> (Vec<u8>, f64) {
    let (idx, p) = state.most_probable();
    (index_to_bits(idx, state.n_qubits()), p)
}

fn finish(backend: &str, seed: u64, opt: OptimResult, state: &Statevector) -> VariationalResult {
    let (bits, probability) = readout(state);
    VariationalResult {
        backend: backend.to_string(),
        seed,
        params: opt.best_params,
        energy: opt.best_value,
        history: opt.history,
        most_probable_bits: bits,
        probability,
        evaluations: opt.evaluations + opt.calibration_evaluations,
    }
}

pub fn run_vqe(
    terms: &PauliTermList,
    ansatz: &ParamCircuit,
    optimizer: &Optimizer,
    seed: u64,
    initial: Option<&[f64]>,
) -> Result<VqeResult> {
    if terms.n_qubits != ansatz.n_qubits {
        return Err(Error::param(format!(
            "Hamiltonian has {} qubits, ansatz {}",
            terms.n_qubits, ansatz.n_qubits
        )));
    }
    let init = match initial {
        Some(p) if p.len() == ansatz.param_count() => p.to_vec(),
        Some(p) => {
            return Err(Error::param(format!(
                "initial point has {} entries, ansatz takes {}",
                p.len(),
                ansatz.param_count()
            )))
        }
        None => random_angles(ansatz.param_count(), seed),
    };
    let diag = terms.diagonal();
    let energy = |theta: &[f64]| -> f64 {
        match ansatz.state(theta) {
            Ok(s) => s.expectation_diagonal(&diag).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    let opt = optimizer.minimize(energy, &init, seed)?;
    let state = ansatz.state(&opt.best_params)?;
    Ok(finish("vqe", seed, opt, &state))
}

/// `prod_k exp(-i beta_k H_B) exp(-i gamma_k H_A) |+>^n` with the mixer as
/// `RX(2 beta)` on every qubit.
pub fn qaoa_state(diag: &[f64], n_qubits: usize, params: &[f64]) -> Result<Statevector> {
    if !params.len().is_multiple_of(2) {
        return Err(Error::param("QAOA takes gamma/beta pairs"));
    }
    let mut s = Statevector::plus(n_qubits)?;
    for layer in params.chunks(2) {
        s.apply_diagonal_phase(diag, layer[0])?;
        for q in 0..n_qubits {
            s.apply(&Gate::Rx(q, 2.0 * layer[1]))?;
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaOptions {
    pub p: usize,
    pub optimizer: Optimizer,
    pub seed: u64,
    /// Starting angles; shorter vectors (a previous depth's optimum) are
    /// padded with zeros, which leaves the state unchanged.
    pub initial: Option<Vec<f64>>,
}

pub fn run_qaoa(terms: &PauliTermList, opts: &QaoaOptions) -> Result<QaoaResult> {
    let n = terms.n_qubits;
    let dim = 2 * opts.p;
    if opts.p == 0 {
        let state = Statevector::plus(n)?;
        let e = super::state::expectation(&state, terms)?;
        let (bits, probability) = readout(&state);
        return Ok(VariationalResult {
            backend: "qaoa".into(),
            seed: opts.seed,
            params: Vec::new(),
            energy: e,
            history: vec![(0, e)],
            most_probable_bits: bits,
            probability,
            evaluations: 1,
        });
    }
    let init = match &opts.initial {
        Some(v) if v.len() <= dim => {
            let mut x = v.clone();
            x.resize(dim, 0.0);
            x
        }
        Some(v) => {
            return Err(Error::param(format!(
                "{} initial angles for p = {}",
                v.len(),
                opts.p
            )))
        }
        None => random_angles(dim, opts.seed),
    };
    let diag = terms.diagonal();
    let energy = |x: &[f64]| -> f64 {
        match qaoa_state(&diag, n, x) {
            Ok(s) => s.expectation_diagonal(&diag).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    let opt = opts.optimizer.minimize(energy, &init, opts.seed)?;
    let state = qaoa_state(&diag, n, &opt.best_params)?;
    Ok(finish("qaoa", opts.seed, opt, &state))
}
