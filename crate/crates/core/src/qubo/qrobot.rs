//! Time-indexed picking QUBO. Variable `x_t{t}_i{i}_p{p}` is 1 when robot
//! `p` stands at node `i` at step `t`, for `t in 0..=n+1`, `i in 0..=n`,
//! `p in 1..=K`. Each robot then owns `ceil(log2 M)` capacity slack bits.

use super::penalty::{ceil_log2, slack_penalty, square_of_affine, SlackEncoding};
use super::{ModelMeta, QuboModel};
use crate::error::{Error, Result};
use crate::instance::QRobotInstance;
use crate::io::ProblemKind;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QRobotQuboOptions {
    /// Penalty strength `A`; defaults to the smallest integer above
    /// `2 max d_ij`, since skipping one item saves at most two arcs.
    pub penalty: Option<f64>,
}

/// Index of `x_{t,i,p}` (`p` is 1-based).
#[inline]
pub fn qrobot_var_index(n_items: usize, t: usize, i: usize, p: usize) -> usize {
    let nodes = n_items + 1;
    let steps = n_items + 2;
    (p - 1) * steps * nodes + t * nodes + i
}

pub fn build_qrobot_qubo(instance: &QRobotInstance, opts: &QRobotQuboOptions) -> Result<QuboModel> {
    let n = instance.n_items();
    let big_k = instance.k_robots();
    let cap = instance.capacity();
    if let Some((i, &w)) = instance.weights().iter().enumerate().find(|(_, &w)| w > cap) {
        return Err(Error::Infeasible(format!(
            "item {} weighs {w} kg, more than the capacity {cap} kg",
            i + 1
        )));
    }
    let d = instance.distances();
    let max_d = d.max_off_diagonal().unwrap_or(0.0);
    let a = opts.penalty.unwrap_or((2.0 * max_d).floor() + 1.0);
    if !(a.is_finite() && a > max_d) {
        return Err(Error::param(format!(
            "penalty A = {a} must exceed the largest edge weight {max_d}"
        )));
    }

    let nodes = n + 1;
    let steps = n + 2;
    let n_decision = big_k * steps * nodes;
    let slack_bits = ceil_log2(cap as u64);
    let n_vars = n_decision + big_k * slack_bits;
    let x = |t: usize, i: usize, p: usize| qrobot_var_index(n, t, i, p);

    let mut b = QuboModel::builder(n_vars);
    for p in 1..=big_k {
        for t in 0..steps {
            for i in 0..nodes {
                b.set_name(x(t, i, p), format!("x_t{t}_i{i}_p{p}"));
            }
        }
    }

    let kf = big_k as f64;
    let start: Vec<(usize, f64)> = (1..=big_k).map(|p| (x(0, 0, p), 1.0)).collect();
    let end: Vec<(usize, f64)> = (1..=big_k).map(|p| (x(steps - 1, 0, p), 1.0)).collect();
    b.add_terms(&square_of_affine(&start, -kf, a));
    b.add_terms(&square_of_affine(&end, -kf, a));

    for p in 1..=big_k {
        for t in 0..steps {
            let here: Vec<(usize, f64)> = (0..nodes).map(|i| (x(t, i, p), 1.0)).collect();
            b.add_terms(&square_of_affine(&here, -1.0, a));
        }
    }

    for i in 1..nodes {
        let visits: Vec<(usize, f64)> = (1..=big_k)
            .flat_map(|p| (0..steps).map(move |t| (t, p)))
            .map(|(t, p)| (x(t, i, p), 1.0))
            .collect();
        b.add_terms(&square_of_affine(&visits, -1.0, a));
    }

    for p in 1..=big_k {
        let first = n_decision + (p - 1) * slack_bits;
        let enc = SlackEncoding::with_bit_count(cap as u64, slack_bits, first);
        let load: Vec<(usize, i64)> = (0..steps)
            .flat_map(|t| (1..nodes).map(move |i| (t, i)))
            .map(|(t, i)| (x(t, i, p), instance.weights()[i - 1] as i64))
            .collect();
        b.add_terms(&slack_penalty(&load, &enc, a));
        for (bit, &v) in enc.var_indices.iter().enumerate() {
            b.set_name(v, format!("slack_p{p}_b{bit}"));
        }
    }

    for p in 1..=big_k {
        for t in 1..steps {
            for i in 0..nodes {
                for j in 0..nodes {
                    let dij = d.get(i, j);
                    if dij != 0.0 {
                        b.add_quadratic(x(t - 1, i, p), x(t, j, p), dij);
                    }
                }
            }
        }
    }

    b.meta(ModelMeta {
        penalty: Some(a),
        problem: Some(ProblemKind::Qrobot),
        form: None,
    });
    b.build()
}
