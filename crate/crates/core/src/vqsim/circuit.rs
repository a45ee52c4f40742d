//! Layered hardware-efficient ansatz circuits.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::state::{Gate, Statevector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzForm {
    Ry,
    RyRz,
}

impl AnsatzForm {
    fn rotations_per_qubit(self) -> usize {
        match self {
            AnsatzForm::Ry => 1,
            AnsatzForm::RyRz => 2,
        }
    }
}

impl FromStr for AnsatzForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ry" => Ok(AnsatzForm::Ry),
            "ryrz" => Ok(AnsatzForm::RyRz),
            other => Err(Error::param(format!("unknown ansatz form `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entanglement {
    Linear,
    Full,
    None,
}

impl FromStr for Entanglement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Entanglement::Linear),
            "full" => Ok(Entanglement::Full),
            "none" => Ok(Entanglement::None),
            other => Err(Error::param(format!("unknown entanglement `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Fixed(Gate),
    /// Rotation on `qubit` whose angle is parameter `slot`.
    Ry { qubit: usize, slot: usize },
    Rz { qubit: usize, slot: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit {
    pub n_qubits: usize,
    pub depth: usize,
    pub form: AnsatzForm,
    pub entanglement: Entanglement,
    ops: Vec<Op>,
    param_count: usize,
}

/// `depth` repetitions of (rotation layer, CZ entangler), then a final
/// rotation layer. RY uses `n (d + 1)` parameters, RYRZ `2 n (d + 1)`.
pub fn build_ansatz(n_qubits: usize, depth: usize, form: AnsatzForm, entanglement: Entanglement) -> Result<ParamCircuit> {
    if n_qubits == 0 {
        return Err(Error::param("an ansatz needs at least one qubit"));
    }
    let mut ops = Vec::new();
    let mut slot = 0;
    let mut rotations = |ops: &mut Vec<Op>| {
        for q in 0..n_qubits {
            ops.push(Op::Ry { qubit: q, slot });
            slot += 1;
        }
        if form == AnsatzForm::RyRz {
            for q in 0..n_qubits {
                ops.push(Op::Rz { qubit: q, slot });
                slot += 1;
            }
        }
    };
    for _ in 0..depth {
        rotations(&mut ops);
        match entanglement {
            Entanglement::Linear => {
                for q in 0..n_qubits.saturating_sub(1) {
                    ops.push(Op::Fixed(Gate::Cz(q, q + 1)));
                }
            }
            Entanglement::Full => {
                for a in 0..n_qubits {
                    for b in a + 1..n_qubits {
                        ops.push(Op::Fixed(Gate::Cz(a, b)));
                    }
                }
            }
            Entanglement::None => {}
        }
    }
    rotations(&mut ops);
    let param_count = n_qubits * (depth + 1) * form.rotations_per_qubit();
    debug_assert_eq!(slot, param_count);
    Ok(ParamCircuit {
        n_qubits,
        depth,
        form,
        entanglement,
        ops,
        param_count,
    })
}

impl ParamCircuit {
    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, Op::Fixed(g) if g.qubits().len() == 2))
            .count()
    }

    /// Applies the bound circuit to `state`.
    pub fn apply(&self, params: &[f64], state: &mut Statevector) -> Result<()> {
        if params.len() != self.param_count {
            return Err(Error::param(format!(
                "circuit takes {} parameters, got {}",
                self.param_count,
                params.len()
            )));
        }
        if state.n_qubits() != self.n_qubits {
            return Err(Error::param("register width does not match the circuit"));
        }
        for op in &self.ops {
            let gate = match *op {
                Op::Fixed(g) => g,
                Op::Ry { qubit, slot } => Gate::Ry(qubit, params[slot]),
                Op::Rz { qubit, slot } => Gate::Rz(qubit, params[slot]),
            };
            state.apply(&gate)?;
        }
        Ok(())
    }

    /// The circuit applied to `|0...0>`.
    pub fn state(&self, params: &[f64]) -> Result<Statevector> {
        let mut s = Statevector::zero(self.n_qubits)?;
        self.apply(params, &mut s)?;
        Ok(s)
    }
}
