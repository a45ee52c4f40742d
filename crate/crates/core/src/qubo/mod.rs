//! QUBO models: `E(x) = sum_{i<j} Q_ij x_i x_j + sum_i g_i x_i + C` over
//! binary `x`.

mod counting;
mod penalty;
mod qrobot;
mod swp;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{check_version, ProblemKind, SCHEMA_VERSION};

pub use counting::{count_solution_classes, qubit_count, QubitParams};
pub use penalty::{
    constraint_to_penalty, inequality_to_penalty, square_of_affine, ConstraintKind, PenaltyTerms,
    SlackEncoding,
};
pub use qrobot::{build_qrobot_qubo, qrobot_var_index, QRobotQuboOptions};
pub use swp::{arc_index, build_swp_qubo, PenaltyForm, SwpQuboOptions, CAPACITY_SCALE};

/// Bookkeeping carried alongside the coefficients.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<PenaltyForm>,
}

/// An immutable QUBO model with an upper-triangular quadratic part.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    n_vars: usize,
    quadratic: BTreeMap<(usize, usize), f64>,
    linear: Vec<f64>,
    constant: f64,
    var_names: Vec<String>,
    meta: ModelMeta,
}

impl QuboModel {
    pub fn builder(n_vars: usize) -> QuboBuilder {
        QuboBuilder {
            n_vars,
            quadratic: BTreeMap::new(),
            linear: vec![0.0; n_vars],
            constant: 0.0,
            var_names: (0..n_vars).map(|i| format!("v{i}")).collect(),
            meta: ModelMeta::default(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Non-zero quadratic coefficients keyed by `(i, j)` with `i < j`, in
    /// ascending key order.
    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    /// Coefficient of `x_i x_j` (order-insensitive); zero when absent.
    pub fn quadratic_coef(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    /// Largest absolute coefficient over the quadratic and linear parts.
    pub fn max_abs_coef(&self) -> f64 {
        self.quadratic
            .values()
            .chain(self.linear.iter())
            .fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Adjacency view: for each variable the `(other, Q)` couplings.
    pub fn neighbours(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n_vars];
        for (&(i, j), &c) in &self.quadratic {
            adj[i].push((j, c));
            adj[j].push((i, c));
        }
        adj
    }

    pub fn to_doc(&self) -> QuboDoc {
        QuboDoc {
            schema_version: SCHEMA_VERSION,
            kind: ModelKindTag::Qubo,
            n_vars: self.n_vars,
            quadratic: self.quadratic.iter().map(|(&(i, j), &c)| (i, j, c)).collect(),
            linear: self
                .linear
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0.0)
                .map(|(i, &c)| (i, c))
                .collect(),
            constant: self.constant,
            var_names: self.var_names.clone(),
            meta: self.meta.clone(),
        }
    }

    pub fn from_doc(doc: &QuboDoc) -> Result<Self> {
        check_version(doc.schema_version)?;
        if doc.kind != ModelKindTag::Qubo {
            return Err(Error::validation("kind", "expected a qubo document"));
        }
        if doc.var_names.len() != doc.n_vars {
            return Err(Error::validation(
                "var_names",
                format!("expected {} names, found {}", doc.n_vars, doc.var_names.len()),
            ));
        }
        let mut b = QuboModel::builder(doc.n_vars);
        for (slot, &(i, j, c)) in doc.quadratic.iter().enumerate() {
            if i >= j || j >= doc.n_vars {
                return Err(Error::validation(
                    format!("quadratic[{slot}]"),
                    format!("pair ({i}, {j}) must satisfy i < j < n_vars"),
                ));
            }
            b.add_quadratic(i, j, c);
        }
        for (slot, &(i, c)) in doc.linear.iter().enumerate() {
            if i >= doc.n_vars {
                return Err(Error::validation(format!("linear[{slot}]"), "index out of range"));
            }
            b.add_linear(i, c);
        }
        b.add_constant(doc.constant);
        b.var_names(doc.var_names.clone()).meta(doc.meta.clone()).build()
    }
}

/// Incremental construction of a [`QuboModel`].
#[derive(Debug, Clone)]
pub struct QuboBuilder {
    n_vars: usize,
    quadratic: BTreeMap<(usize, usize), f64>,
    linear: Vec<f64>,
    constant: f64,
    var_names: Vec<String>,
    meta: ModelMeta,
}

impl QuboBuilder {
    /// `i == j` folds into the linear part since `x^2 = x`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) -> &mut Self {
        assert!(i < self.n_vars && j < self.n_vars, "variable index out of range");
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.linear[i] += c,
            std::cmp::Ordering::Less => *self.quadratic.entry((i, j)).or_insert(0.0) += c,
            std::cmp::Ordering::Greater => *self.quadratic.entry((j, i)).or_insert(0.0) += c,
        }
        self
    }

    pub fn add_linear(&mut self, i: usize, c: f64) -> &mut Self {
        self.linear[i] += c;
        self
    }

    pub fn add_constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    pub fn add_terms(&mut self, terms: &PenaltyTerms) -> &mut Self {
        for &((i, j), c) in &terms.quadratic {
            self.add_quadratic(i, j, c);
        }
        for &(i, c) in &terms.linear {
            self.add_linear(i, c);
        }
        self.add_constant(terms.constant)
    }

    pub fn var_names(&mut self, names: Vec<String>) -> &mut Self {
        self.var_names = names;
        self
    }

    pub fn set_name(&mut self, i: usize, name: impl Into<String>) -> &mut Self {
        self.var_names[i] = name.into();
        self
    }

    pub fn meta(&mut self, meta: ModelMeta) -> &mut Self {
        self.meta = meta;
        self
    }

    pub fn build(&mut self) -> Result<QuboModel> {
        if self.var_names.len() != self.n_vars {
            return Err(Error::Model("one name per variable required".into()));
        }
        let finite = self.constant.is_finite()
            && self.linear.iter().all(|c| c.is_finite())
            && self.quadratic.values().all(|c| c.is_finite());
        if !finite {
            return Err(Error::param("QUBO coefficients must be finite"));
        }
        let quadratic = self
            .quadratic
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(&k, &c)| (k, c))
            .collect();
        Ok(QuboModel {
            n_vars: self.n_vars,
            quadratic,
            linear: self.linear.clone(),
            constant: self.constant,
            var_names: self.var_names.clone(),
            meta: self.meta.clone(),
        })
    }
}

pub(crate) fn check_bits(bits: &[u8], n: usize) -> Result<()> {
    if bits.len() != n {
        return Err(Error::param(format!(
            "assignment has {} entries, model has {n} variables",
            bits.len()
        )));
    }
    if let Some(pos) = bits.iter().position(|&b| b > 1) {
        return Err(Error::param(format!("entry {pos} is not binary")));
    }
    Ok(())
}

/// Energy of `bits`, summed in ascending index order: quadratic, linear,
/// then the constant.
pub fn evaluate_qubo(model: &QuboModel, bits: &[u8]) -> Result<f64> {
    check_bits(bits, model.n_vars)?;
    Ok(energy_unchecked(model, bits))
}

pub(crate) fn energy_unchecked(model: &QuboModel, bits: &[u8]) -> f64 {
    let mut e = 0.0;
    for (&(i, j), &c) in &model.quadratic {
        if bits[i] == 1 && bits[j] == 1 {
            e += c;
        }
    }
    for (i, &c) in model.linear.iter().enumerate() {
        if bits[i] == 1 {
            e += c;
        }
    }
    e + model.constant
}

/// Bits of a basis index: `bits[q] = (index >> q) & 1`.
pub fn index_to_bits(index: u64, n: usize) -> Vec<u8> {
    (0..n).map(|q| ((index >> q) & 1) as u8).collect()
}

pub fn bits_to_index(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (q, &b)| acc | ((b as u64) << q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKindTag {
    Qubo,
    Ising,
}

/// QUBO export document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuboDoc {
    pub schema_version: u32,
    pub kind: ModelKindTag,
    pub n_vars: usize,
    pub quadratic: Vec<(usize, usize, f64)>,
    pub linear: Vec<(usize, f64)>,
    pub constant: f64,
    pub var_names: Vec<String>,
    #[serde(default)]
    pub meta: ModelMeta,
}
