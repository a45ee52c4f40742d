//! Dense little-endian statevector: basis index `b` has qubit `q` set when
//! `(b >> q) & 1 == 1`.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ising::PauliTermList;

pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Simulator width limit; `QOPT_MAX_QUBITS` overrides the default of 24.
pub fn max_qubits() -> usize {
    std::env::var("QOPT_MAX_QUBITS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    H(usize),
    X(usize),
    Z(usize),
    /// `(control, target)`
    Cnot(usize, usize),
    Cz(usize, usize),
    /// `(control, target, angle)`
    Crz(usize, usize, f64),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) | Gate::H(q) | Gate::X(q) | Gate::Z(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Crz(a, b, _) => vec![a, b],
        }
    }

    /// Row-major 2x2 matrix of a single-qubit gate, or of the target action
    /// of a controlled gate.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let z = c(0.0, 0.0);
        match *self {
            Gate::Rx(_, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate::Ry(_, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            Gate::Rz(_, t) | Gate::Crz(_, _, t) => {
                [[Complex64::from_polar(1.0, -t / 2.0), z], [z, Complex64::from_polar(1.0, t / 2.0)]]
            }
            Gate::H(_) => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]
            }
            Gate::X(_) | Gate::Cnot(..) => [[z, c(1.0, 0.0)], [c(1.0, 0.0), z]],
            Gate::Z(_) | Gate::Cz(..) => [[c(1.0, 0.0), z], [z, c(-1.0, 0.0)]],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        let limit = max_qubits();
        if n > limit {
            return Err(Error::Size { required: n, limit });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// `|+>^n`.
    pub fn plus(n: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        let a = Complex64::new((s.amps.len() as f64).sqrt().recip(), 0.0);
        s.amps.iter_mut().for_each(|x| *x = a);
        Ok(s)
    }

    /// Normalises the given amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::param("amplitude count must be a power of two"));
        }
        let n = dim.trailing_zeros() as usize;
        if n > max_qubits() {
            return Err(Error::Size {
                required: n,
                limit: max_qubits(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::param("amplitudes must have a finite non-zero norm"));
        }
        Ok(Self {
            n_qubits: n,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        let qs = gate.qubits();
        if qs.iter().any(|&q| q >= self.n_qubits) || (qs.len() == 2 && qs[0] == qs[1]) {
            return Err(Error::param(format!(
                "gate {gate:?} does not fit a {}-qubit register",
                self.n_qubits
            )));
        }
        let u = gate.matrix();
        match *gate {
            Gate::Z(q) => self.phase_where(1 << q, 1 << q, -1.0),
            Gate::Cz(a, b) => {
                let mask = (1 << a) | (1 << b);
                self.phase_where(mask, mask, -1.0)
            }
            Gate::Cnot(c, t) | Gate::Crz(c, t, _) => self.single(t, &u, 1 << c),
            _ => self.single(qs[0], &u, 0),
        }
        Ok(())
    }

    /// Applies `u` to qubit `t` on the subspace where every bit of `control`
    /// is set.
    fn single(&mut self, t: usize, u: &[[Complex64; 2]; 2], control: usize) {
        let bit = 1usize << t;
        for i in 0..self.amps.len() {
            if i & bit != 0 || i & control != control {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[i | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
    }

    fn phase_where(&mut self, mask: usize, value: usize, factor: f64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == value {
                *a *= factor;
            }
        }
    }

    /// Multiplies amplitude `b` by `exp(-i gamma diag[b])`.
    pub fn apply_diagonal_phase(&mut self, diag: &[f64], gamma: f64) -> Result<()> {
        if diag.len() != self.amps.len() {
            return Err(Error::param("diagonal length does not match the register"));
        }
        for (a, &e) in self.amps.iter_mut().zip(diag) {
            *a *= Complex64::from_polar(1.0, -gamma * e);
        }
        Ok(())
    }

    /// `sum_b |amp_b|^2 diag[b]`.
    pub fn expectation_diagonal(&self, diag: &[f64]) -> Result<f64> {
        if diag.len() != self.amps.len() {
            return Err(Error::param("diagonal length does not match the register"));
        }
        Ok(self.amps.iter().zip(diag).map(|(a, &e)| a.norm_sqr() * e).sum())
    }

    /// Basis index with the largest probability; ties go to the
    /// lexicographically smallest bit vector.
    pub fn most_probable(&self) -> (u64, f64) {
        let probs = self.probabilities();
        let max = probs.iter().copied().fold(0.0f64, f64::max);
        let bits_key = |idx: usize| crate::qubo::index_to_bits(idx as u64, self.n_qubits);
        let best = (0..probs.len())
            .filter(|&i| probs[i] >= max - 1e-12)
            .min_by_key(|&i| bits_key(i))
            .unwrap_or(0);
        (best as u64, probs[best])
    }

    /// Basis-state counts from `shots` seeded draws.
    pub fn sample_counts(&self, shots: usize, seed: u64) -> Result<Vec<(u64, usize)>> {
        let dist = WeightedIndex::new(self.probabilities()).map_err(|e| Error::param(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..shots {
            *counts.entry(dist.sample(&mut rng) as u64).or_insert(0usize) += 1;
        }
        Ok(counts.into_iter().collect())
    }
}

pub fn apply_gate(state: &mut Statevector, gate: &Gate) -> Result<()> {
    state.apply(gate)
}

/// `<psi|H|psi>` for a diagonal Hamiltonian, accumulated term by term as
/// `sum_t c_t sum_b |amp_b|^2 (-1)^{parity_t(b)}`.
pub fn expectation(state: &Statevector, terms: &PauliTermList) -> Result<f64> {
    if terms.n_qubits != state.n_qubits() {
        return Err(Error::param(format!(
            "Hamiltonian acts on {} qubits, state has {}",
            terms.n_qubits,
            state.n_qubits()
        )));
    }
    let probs = state.probabilities();
    let mut total = 0.0;
    for t in &terms.terms {
        let mask: usize = t.qubits.iter().map(|&q| 1usize << q).sum();
        let z: f64 = probs
            .iter()
            .enumerate()
            .map(|(b, &p)| if (b & mask).count_ones() % 2 == 1 { -p } else { p })
            .sum();
        total += t.coef * z;
    }
    Ok(total)
}

/// Mean energy over seeded measurement shots.
pub fn sampled_expectation(state: &Statevector, terms: &PauliTermList, shots: usize, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::param("shots must be positive"));
    }
    let diag = terms.diagonal();
    if diag.len() != state.amplitudes().len() {
        return Err(Error::param("Hamiltonian does not match the register"));
    }
    let counts = state.sample_counts(shots, seed)?;
    Ok(counts.iter().map(|&(b, c)| diag[b as usize] * c as f64).sum::<f64>() / shots as f64)
}
