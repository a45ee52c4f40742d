//! SWP routing QUBO over directed arc variables `x_ij`, `i != j`, on nodes
//! `0..=n` (node 0 is the depot).
//!
//! Variables are laid out row-major with the diagonal skipped:
//! `x_0_1, x_0_2, .., x_1_0, x_1_2, .., x_n_(n-1)`, followed by capacity
//! slack bits when requested.

use serde::{Deserialize, Serialize};

use super::penalty::{inequality_to_penalty, square_of_affine};
use super::{ModelMeta, QuboModel};
use crate::error::{Error, Result};
use crate::instance::{SwpInstance, WeightMatrix};
use crate::io::ProblemKind;

/// Distances enter the capacity constraint as integers in units of 1/100,
/// which is exact for distances rounded to two decimals.
pub const CAPACITY_SCALE: f64 = 100.0;

/// How the degree constraints are squared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyForm {
    /// One `(1 - degree)^2` square per patient and direction. Zero penalty
    /// exactly on degree-feasible arc sets.
    #[default]
    PerNode,
    /// A single square per direction over all patients,
    /// `(n - sum of patient in-arcs)^2` and `(n - sum of patient out-arcs)^2`.
    /// This is the hand expansion used in the 4-node worked example; it only
    /// constrains degree totals.
    Aggregated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwpQuboOptions {
    /// Penalty strength `A`; defaults to the smallest integer above `max W_ij`.
    pub penalty: Option<f64>,
    /// Adds the slack-encoded `sum d_ij x_ij <= q` constraint.
    pub include_capacity: bool,
    pub form: PenaltyForm,
    /// Adds `A x_ij x_ji` for every 2-cycle no feasible plan can contain:
    /// patient pairs, and depot round trips when a single worker must see
    /// several patients. Degree penalties alone admit these subtours.
    pub forbid_two_cycles: bool,
}

impl Default for SwpQuboOptions {
    fn default() -> Self {
        Self {
            penalty: None,
            include_capacity: false,
            form: PenaltyForm::PerNode,
            forbid_two_cycles: true,
        }
    }
}

/// Index of arc `(i, j)` among `m` nodes.
#[inline]
pub fn arc_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < m && j < m);
    i * (m - 1) + if j < i { j } else { j - 1 }
}

pub fn build_swp_qubo(
    instance: &SwpInstance,
    weights: &WeightMatrix,
    opts: &SwpQuboOptions,
) -> Result<QuboModel> {
    let m = instance.n_nodes();
    let n = instance.n_patients();
    let k = instance.k_workers() as f64;
    if weights.n_nodes() != m {
        return Err(Error::param(format!(
            "weight matrix covers {} nodes, instance has {m}",
            weights.n_nodes()
        )));
    }
    let max_w = weights.max_weight();
    let a = opts.penalty.unwrap_or(max_w.floor() + 1.0);
    if !(a.is_finite() && a > max_w) {
        return Err(Error::param(format!(
            "penalty A = {a} must exceed the largest arc weight {max_w}"
        )));
    }

    let n_arcs = m * (m - 1);
    let capacity = if opts.include_capacity {
        let q = instance.max_workload().ok_or_else(|| {
            Error::param("capacity requested but the instance has no max_workload")
        })?;
        let bound = (q * CAPACITY_SCALE + 1e-9).floor() as i64;
        let d = instance.distances()?;
        let coeffs: Vec<(usize, i64)> = arcs(m)
            .map(|(i, j)| (arc_index(m, i, j), (d.get(i, j) * CAPACITY_SCALE).round() as i64))
            .collect();
        Some(inequality_to_penalty(&coeffs, bound, a, n_arcs)?)
    } else {
        None
    };
    let n_vars = n_arcs + capacity.as_ref().map_or(0, |(_, e)| e.bit_count);

    let mut b = QuboModel::builder(n_vars);
    for (i, j) in arcs(m) {
        b.set_name(arc_index(m, i, j), format!("x_{i}_{j}"));
    }

    let out_of = |i: usize| -> Vec<(usize, f64)> {
        (0..m).filter(|&j| j != i).map(|j| (arc_index(m, i, j), 1.0)).collect()
    };
    let into = |j: usize| -> Vec<(usize, f64)> {
        (0..m).filter(|&i| i != j).map(|i| (arc_index(m, i, j), 1.0)).collect()
    };

    match opts.form {
        PenaltyForm::PerNode => {
            for p in 1..m {
                b.add_terms(&square_of_affine(&out_of(p), -1.0, a));
                b.add_terms(&square_of_affine(&into(p), -1.0, a));
            }
        }
        PenaltyForm::Aggregated => {
            let all_in: Vec<(usize, f64)> = (1..m).flat_map(into).collect();
            let all_out: Vec<(usize, f64)> = (1..m).flat_map(out_of).collect();
            b.add_terms(&square_of_affine(&all_out, -(n as f64), a));
            b.add_terms(&square_of_affine(&all_in, -(n as f64), a));
        }
    }
    b.add_terms(&square_of_affine(&out_of(0), -k, a));
    b.add_terms(&square_of_affine(&into(0), -k, a));

    if opts.forbid_two_cycles {
        for i in 1..m {
            for j in i + 1..m {
                b.add_quadratic(arc_index(m, i, j), arc_index(m, j, i), a);
            }
        }
        if instance.k_workers() == 1 && n > 1 {
            for p in 1..m {
                b.add_quadratic(arc_index(m, 0, p), arc_index(m, p, 0), a);
            }
        }
    }
    if let Some((terms, enc)) = &capacity {
        b.add_terms(terms);
        for (bit, &v) in enc.var_indices.iter().enumerate() {
            b.set_name(v, format!("slack_cap_b{bit}"));
        }
    }
    // Objective last: with an integral A the penalty part is exact, so each
    // linear coefficient is W_ij plus that integer in a single rounding.
    for (i, j) in arcs(m) {
        b.add_linear(arc_index(m, i, j), weights.get(i, j));
    }

    b.meta(ModelMeta {
        penalty: Some(a),
        problem: Some(ProblemKind::Swp),
        form: Some(opts.form),
    });
    b.build()
}

fn arcs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
}
