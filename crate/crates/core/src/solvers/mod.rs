//! Classical backends: exhaustive enumeration, routing backtracking and
//! simulated annealing.

mod anneal;
mod backtrack;
mod exact;

use serde::{Deserialize, Serialize};

pub use anneal::{
    solve_simulated_annealing, solve_simulated_annealing_qubo, solve_simulated_annealing_traced,
    AnnealSchedule, AnnealTrace,
};
pub use backtrack::{solve_backtracking, BacktrackOptions, DEFAULT_BACKTRACK_LIMIT};
pub use exact::{ground_states, solve_exact, solve_exact_ising, DEFAULT_EXACT_LIMIT};

use crate::ising::bits_to_spins;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Backtracking,
    Sa,
    Vqe,
    Qaoa,
}

impl Backend {
    pub const ALL: [Backend; 5] = [
        Backend::Exact,
        Backend::Backtracking,
        Backend::Sa,
        Backend::Vqe,
        Backend::Qaoa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Backtracking => "backtracking",
            Backend::Sa => "sa",
            Backend::Vqe => "vqe",
            Backend::Qaoa => "qaoa",
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Backend {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Backend::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| crate::Error::param(format!("unknown backend `{s}`")))
    }
}

/// A solver's best assignment; `energy` is the model evaluated at `bits`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub bits: Vec<u8>,
    pub energy: f64,
    pub backend: Backend,
    pub seed: Option<u64>,
    pub evaluations: u64,
}

impl Solution {
    pub fn spins(&self) -> Vec<i8> {
        bits_to_spins(&self.bits)
    }
}

/// Lexicographic order on bit vectors with bit 0 most significant.
pub(crate) fn lex_less(a: &[u8], b: &[u8]) -> bool {
    a < b
}
