//! Closed-form variable and solution counts.

use serde::{Deserialize, Serialize};

use super::penalty::ceil_log2;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QubitParams {
    /// `n_nodes` counts the depot. `capacity_bound` is the integer slack
    /// bound when the workload constraint is encoded.
    Swp {
        n_nodes: usize,
        capacity_bound: Option<u64>,
    },
    Qrobot {
        n_items: usize,
        k_robots: usize,
        capacity: u32,
    },
}

pub fn qubit_count(params: QubitParams) -> Result<usize> {
    match params {
        QubitParams::Swp {
            n_nodes,
            capacity_bound,
        } => {
            if n_nodes < 2 {
                return Err(Error::param("an SWP model needs the depot and at least one patient"));
            }
            let slack = match capacity_bound {
                None => 0,
                Some(0) => return Err(Error::param("capacity bound must be >= 1")),
                Some(b) => ceil_log2(b) + 1,
            };
            Ok(n_nodes * (n_nodes - 1) + slack)
        }
        QubitParams::Qrobot {
            n_items,
            k_robots,
            capacity,
        } => {
            if n_items == 0 || k_robots == 0 || capacity == 0 {
                return Err(Error::param("n, K and M must all be positive"));
            }
            Ok(k_robots * (n_items + 1) * (n_items + 2) + k_robots * ceil_log2(capacity as u64))
        }
    }
}

/// Ways to split `n` patients among `m` indistinguishable workers with every
/// worker busy (Stirling number of the second kind). Zero when `m > n`.
pub fn count_solution_classes(n: u32, m: u32) -> Result<u128> {
    if m == 0 {
        return Err(Error::param("at least one worker is required"));
    }
    if m > n {
        return Ok(0);
    }
    let overflow = || Error::Overflow("solution class count");
    let mut sum: i128 = 0;
    let mut binom: i128 = 1; // C(m, k)
    for k in 0..m {
        let power = ((m - k) as i128).checked_pow(n).ok_or_else(overflow)?;
        let term = binom.checked_mul(power).ok_or_else(overflow)?;
        sum = if k % 2 == 0 { sum.checked_add(term) } else { sum.checked_sub(term) }
            .ok_or_else(overflow)?;
        binom = binom * (m - k) as i128 / (k + 1) as i128;
    }
    let factorial: i128 = (1..=m as i128).product();
    debug_assert_eq!(sum % factorial, 0);
    Ok((sum / factorial) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts set partitions of `0..n` into exactly `m` blocks by growing
    /// restricted-growth strings.
    fn brute_partitions(n: usize, m: usize) -> u128 {
        fn rec(pos: usize, n: usize, m: usize, blocks: usize) -> u128 {
            if pos == n {
                return (blocks == m) as u128;
            }
            let mut total = 0;
            for b in 0..=blocks.min(m - 1) {
                total += rec(pos + 1, n, m, blocks.max(b + 1));
            }
            total
        }
        rec(0, n, m, 0)
    }

    #[test]
    fn partition_counts_match_enumeration() {
        for n in 1..=7u32 {
            for m in 1..=n.min(4) {
                assert_eq!(
                    count_solution_classes(n, m).unwrap(),
                    brute_partitions(n as usize, m as usize),
                    "({n}, {m})"
                );
            }
        }
    }

    #[test]
    fn four_patients_three_workers() {
        let c = count_solution_classes(4, 3).unwrap();
        assert_eq!(c, 6);
        assert_eq!(ceil_log2(c as u64), 3);
        assert_eq!(count_solution_classes(5, 1).unwrap(), 1);
        assert_eq!(count_solution_classes(5, 5).unwrap(), 1);
        assert_eq!(count_solution_classes(2, 3).unwrap(), 0);
    }

    #[test]
    fn large_counts_overflow_cleanly() {
        assert!(count_solution_classes(25, 12).is_ok());
        assert!(matches!(count_solution_classes(200, 30), Err(Error::Overflow(_))));
    }

    #[test]
    fn qrobot_counts() {
        let expected = [18, 26, 36, 48, 62, 78, 96, 116, 138, 162, 188];
        for (n, &q) in (2..=12).zip(&expected) {
            let p = QubitParams::Qrobot {
                n_items: n,
                k_robots: 1,
                capacity: 45,
            };
            assert_eq!(qubit_count(p).unwrap(), q);
        }
    }

    #[test]
    fn swp_counts() {
        let p = |n_nodes, capacity_bound| QubitParams::Swp {
            n_nodes,
            capacity_bound,
        };
        assert_eq!(qubit_count(p(4, None)).unwrap(), 12);
        assert_eq!(qubit_count(p(3, Some(25000))).unwrap(), 6 + 16);
        assert!(qubit_count(p(1, None)).is_err());
    }
}
