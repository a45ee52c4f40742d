//! Ising models `H(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + offset` over
//! `s in {-1, +1}^n`, with the spin convention `s = 2x - 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{check_version, SCHEMA_VERSION};
use crate::qubo::{ModelKindTag, ModelMeta, QuboModel};

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n_spins: usize,
    couplings: BTreeMap<(usize, usize), f64>,
    fields: Vec<f64>,
    offset: f64,
    var_names: Vec<String>,
    meta: ModelMeta,
}

impl IsingModel {
    /// Couplings with `i == j` are rejected; `i > j` keys are swapped and
    /// duplicate pairs summed.
    pub fn new(
        n_spins: usize,
        couplings: impl IntoIterator<Item = ((usize, usize), f64)>,
        fields: Vec<f64>,
        offset: f64,
    ) -> Result<Self> {
        if fields.len() != n_spins {
            return Err(Error::param(format!(
                "{} fields given for {n_spins} spins",
                fields.len()
            )));
        }
        let mut j = BTreeMap::new();
        for ((a, b), c) in couplings {
            if a == b || a >= n_spins || b >= n_spins {
                return Err(Error::param(format!("invalid coupling pair ({a}, {b})")));
            }
            *j.entry((a.min(b), a.max(b))).or_insert(0.0) += c;
        }
        j.retain(|_, c| *c != 0.0);
        let finite =
            offset.is_finite() && fields.iter().all(|h| h.is_finite()) && j.values().all(|c| c.is_finite());
        if !finite {
            return Err(Error::param("Ising coefficients must be finite"));
        }
        Ok(Self {
            n_spins,
            couplings: j,
            fields,
            offset,
            var_names: (0..n_spins).map(|i| format!("v{i}")).collect(),
            meta: ModelMeta::default(),
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_spins {
            return Err(Error::Model("one name per spin required".into()));
        }
        self.var_names = names;
        Ok(self)
    }

    pub fn with_meta(mut self, meta: ModelMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.couplings
            .values()
            .chain(self.fields.iter())
            .fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn neighbours(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n_spins];
        for (&(i, j), &c) in &self.couplings {
            adj[i].push((j, c));
            adj[j].push((i, c));
        }
        adj
    }

    pub fn to_doc(&self) -> IsingDoc {
        IsingDoc {
            schema_version: SCHEMA_VERSION,
            kind: ModelKindTag::Ising,
            n_vars: self.n_spins,
            couplings: self.couplings.iter().map(|(&(i, j), &c)| (i, j, c)).collect(),
            fields: self.fields.clone(),
            offset: self.offset,
            var_names: self.var_names.clone(),
            meta: self.meta.clone(),
        }
    }

    pub fn from_doc(doc: &IsingDoc) -> Result<Self> {
        check_version(doc.schema_version)?;
        if doc.kind != ModelKindTag::Ising {
            return Err(Error::validation("kind", "expected an ising document"));
        }
        for (slot, &(i, j, _)) in doc.couplings.iter().enumerate() {
            if i >= j || j >= doc.n_vars {
                return Err(Error::validation(
                    format!("J[{slot}]"),
                    format!("pair ({i}, {j}) must satisfy i < j < n_vars"),
                ));
            }
        }
        if doc.fields.len() != doc.n_vars {
            return Err(Error::validation("h", format!("expected {} entries", doc.n_vars)));
        }
        Ok(IsingModel::new(
            doc.n_vars,
            doc.couplings.iter().map(|&(i, j, c)| ((i, j), c)),
            doc.fields.clone(),
            doc.offset,
        )?
        .with_names(doc.var_names.clone())
        .map_err(|_| Error::validation("var_names", format!("expected {} names", doc.n_vars)))?
        .with_meta(doc.meta.clone()))
    }
}

/// Ising export document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingDoc {
    pub schema_version: u32,
    pub kind: ModelKindTag,
    pub n_vars: usize,
    #[serde(rename = "J")]
    pub couplings: Vec<(usize, usize, f64)>,
    #[serde(rename = "h")]
    pub fields: Vec<f64>,
    pub offset: f64,
    pub var_names: Vec<String>,
    #[serde(default)]
    pub meta: ModelMeta,
}

pub fn qubo_to_ising(model: &QuboModel) -> IsingModel {
    let n = model.n_vars();
    let mut h: Vec<f64> = model.linear().iter().map(|g| g / 2.0).collect();
    let mut offset = model.constant() + model.linear().iter().sum::<f64>() / 2.0;
    let mut j = Vec::with_capacity(model.quadratic().len());
    for (&(a, b), &q) in model.quadratic() {
        j.push(((a, b), q / 4.0));
        h[a] += q / 4.0;
        h[b] += q / 4.0;
        offset += q / 4.0;
    }
    IsingModel::new(n, j, h, offset)
        .and_then(|m| m.with_names(model.var_names().to_vec()))
        .expect("a valid QUBO converts to a valid Ising model")
        .with_meta(model.meta().clone())
}

pub fn ising_to_qubo(model: &IsingModel) -> QuboModel {
    let mut b = QuboModel::builder(model.n_spins);
    let mut constant = model.offset;
    for (i, &h) in model.fields.iter().enumerate() {
        b.add_linear(i, 2.0 * h);
        constant -= h;
    }
    for (&(i, j), &c) in &model.couplings {
        b.add_quadratic(i, j, 4.0 * c);
        b.add_linear(i, -2.0 * c);
        b.add_linear(j, -2.0 * c);
        constant += c;
    }
    b.add_constant(constant)
        .var_names(model.var_names.clone())
        .meta(model.meta.clone())
        .build()
        .expect("a valid Ising model converts to a valid QUBO")
}

/// Energy of `spins`, summed as couplings, fields, then the offset.
pub fn evaluate_ising(model: &IsingModel, spins: &[i8]) -> Result<f64> {
    if spins.len() != model.n_spins {
        return Err(Error::param(format!(
            "assignment has {} spins, model has {}",
            spins.len(),
            model.n_spins
        )));
    }
    if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
        return Err(Error::param(format!("spin {pos} is {} (expected -1 or +1)", spins[pos])));
    }
    Ok(ising_energy_unchecked(model, spins))
}

pub(crate) fn ising_energy_unchecked(model: &IsingModel, spins: &[i8]) -> f64 {
    let mut e = 0.0;
    for (&(i, j), &c) in &model.couplings {
        e += c * (spins[i] * spins[j]) as f64;
    }
    for (i, &h) in model.fields.iter().enumerate() {
        e += h * spins[i] as f64;
    }
    e + model.offset
}

pub fn bits_to_spins(bits: &[u8]) -> Vec<i8> {
    bits.iter().map(|&b| 2 * b as i8 - 1).collect()
}

pub fn spins_to_bits(spins: &[i8]) -> Vec<u8> {
    spins.iter().map(|&s| (s > 0) as u8).collect()
}

/// A product of Z operators on at most two qubits; no qubits is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub qubits: Vec<usize>,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTermList {
    pub n_qubits: usize,
    pub terms: Vec<PauliTerm>,
}

impl PauliTermList {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            let sorted = t.qubits.windows(2).all(|w| w[0] < w[1]);
            if t.qubits.len() > 2 || !sorted || t.qubits.iter().any(|&q| q >= n_qubits) {
                return Err(Error::param(format!("bad Pauli term on qubits {:?}", t.qubits)));
            }
            if !t.coef.is_finite() {
                return Err(Error::param("Pauli coefficients must be finite"));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    /// Sum of the identity coefficients.
    pub fn identity_coef(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.qubits.is_empty())
            .map(|t| t.coef)
            .sum()
    }

    /// `<b|H|b>` using `Z|b> = (1 - 2b)|b>`.
    pub fn basis_energy(&self, bits: &[u8]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let sign = t
                    .qubits
                    .iter()
                    .fold(1.0, |s, &q| if bits[q] == 1 { -s } else { s });
                sign * t.coef
            })
            .sum()
    }

    /// All `2^n` diagonal entries, indexed little-endian.
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.n_qubits;
        let mut diag = vec![0.0; dim];
        for t in &self.terms {
            let mask: usize = t.qubits.iter().map(|&q| 1usize << q).sum();
            for (idx, d) in diag.iter_mut().enumerate() {
                let odd = (idx & mask).count_ones() % 2 == 1;
                *d += if odd { -t.coef } else { t.coef };
            }
        }
        diag
    }
}

pub fn to_pauli_terms(model: &IsingModel) -> PauliTermList {
    let mut terms = vec![PauliTerm {
        qubits: Vec::new(),
        coef: model.offset,
    }];
    for (i, &h) in model.fields.iter().enumerate() {
        if h != 0.0 {
            terms.push(PauliTerm {
                qubits: vec![i],
                coef: -h,
            });
        }
    }
    for (&(i, j), &c) in &model.couplings {
        terms.push(PauliTerm {
            qubits: vec![i, j],
            coef: c,
        });
    }
    PauliTermList {
        n_qubits: model.n_spins,
        terms,
    }
}

/// `h_i = 1/4 sum_k (q_ik + q_ki)` for a full square matrix.
pub fn external_field_from_q(q: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = q.len();
    if let Some((r, row)) = q.iter().enumerate().find(|(_, row)| row.len() != n) {
        return Err(Error::param(format!(
            "matrix is not square: row {r} has {} entries, expected {n}",
            row.len()
        )));
    }
    Ok((0..n)
        .map(|i| (0..n).map(|k| q[i][k] + q[k][i]).sum::<f64>() / 4.0)
        .collect())
}
