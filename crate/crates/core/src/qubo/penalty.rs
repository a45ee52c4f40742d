//! Quadratic penalty terms for hard constraints over binary variables.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A quadratic polynomial in binary variables, keyed by model indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PenaltyTerms {
    pub quadratic: Vec<((usize, usize), f64)>,
    pub linear: Vec<(usize, f64)>,
    pub constant: f64,
}

impl PenaltyTerms {
    /// Value of the polynomial; `bits` is indexed by model variable.
    pub fn evaluate(&self, bits: &[u8]) -> f64 {
        let q: f64 = self
            .quadratic
            .iter()
            .filter(|((i, j), _)| bits[*i] == 1 && bits[*j] == 1)
            .map(|(_, c)| c)
            .sum();
        let l: f64 = self
            .linear
            .iter()
            .filter(|(i, _)| bits[*i] == 1)
            .map(|(_, c)| c)
            .sum();
        q + l + self.constant
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.quadratic.iter_mut().for_each(|(_, c)| *c *= s);
        self.linear.iter_mut().for_each(|(_, c)| *c *= s);
        self.constant *= s;
        self
    }
}

/// Expands `scale * (sum_i a_i x_i + offset)^2` using `x^2 = x`.
///
/// Repeated indices in `coeffs` are merged first.
pub fn square_of_affine(coeffs: &[(usize, f64)], offset: f64, scale: f64) -> PenaltyTerms {
    let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
    for &(i, a) in coeffs {
        *merged.entry(i).or_insert(0.0) += a;
    }
    let vars: Vec<(usize, f64)> = merged.into_iter().filter(|&(_, a)| a != 0.0).collect();
    let mut terms = PenaltyTerms {
        constant: scale * offset * offset,
        ..Default::default()
    };
    for (k, &(i, a)) in vars.iter().enumerate() {
        terms.linear.push((i, scale * (a * a + 2.0 * a * offset)));
        for &(j, b) in &vars[k + 1..] {
            terms.quadratic.push(((i, j), scale * 2.0 * a * b));
        }
    }
    terms
}

/// The classical two- and three-variable constraints with known exact
/// quadratic penalties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    /// `x = y`: `P(x + y - 2xy)`
    Equal,
    /// `x + y = 1`: `P(1 - x - y + 2xy)`
    ExactlyOne,
    /// `x + y <= 1`: `P xy`
    AtMostOne,
    /// `x + y >= 1`: `P(1 - x - y + xy)`
    AtLeastOne,
    /// `x <= y`: `P(x - xy)`
    Implies,
    /// `x1 + x2 + x3 <= 1`: `P(x1x2 + x1x3 + x2x3)`
    AtMostOneOfThree,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 6] = [
        ConstraintKind::Equal,
        ConstraintKind::ExactlyOne,
        ConstraintKind::AtMostOne,
        ConstraintKind::AtLeastOne,
        ConstraintKind::Implies,
        ConstraintKind::AtMostOneOfThree,
    ];

    pub fn arity(self) -> usize {
        match self {
            ConstraintKind::AtMostOneOfThree => 3,
            _ => 2,
        }
    }

    /// Whether a binary tuple satisfies the constraint.
    pub fn holds(self, x: &[u8]) -> bool {
        let s: u8 = x.iter().sum();
        match self {
            ConstraintKind::Equal => x[0] == x[1],
            ConstraintKind::ExactlyOne => s == 1,
            ConstraintKind::AtMostOne | ConstraintKind::AtMostOneOfThree => s <= 1,
            ConstraintKind::AtLeastOne => s >= 1,
            ConstraintKind::Implies => x[0] <= x[1],
        }
    }
}

impl FromStr for ConstraintKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "x=y" | "equal" => ConstraintKind::Equal,
            "x+y=1" | "exactly-one" => ConstraintKind::ExactlyOne,
            "x+y<=1" | "at-most-one" => ConstraintKind::AtMostOne,
            "x+y>=1" | "at-least-one" => ConstraintKind::AtLeastOne,
            "x<=y" | "implies" => ConstraintKind::Implies,
            "x1+x2+x3<=1" | "at-most-one-of-three" => ConstraintKind::AtMostOneOfThree,
            other => return Err(Error::param(format!("unknown constraint kind `{other}`"))),
        })
    }
}

pub fn constraint_to_penalty(kind: ConstraintKind, vars: &[usize], p: f64) -> Result<PenaltyTerms> {
    if vars.len() != kind.arity() {
        return Err(Error::param(format!(
            "{kind:?} takes {} variables, got {}",
            kind.arity(),
            vars.len()
        )));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::param("penalty strength must be positive"));
    }
    let pair = |i: usize, j: usize| if i < j { (i, j) } else { (j, i) };
    let (x, y) = (vars[0], vars[1]);
    if x == y || (kind.arity() == 3 && (vars[2] == x || vars[2] == y)) {
        return Err(Error::param("constraint variables must be distinct"));
    }
    let t = match kind {
        ConstraintKind::Equal => PenaltyTerms {
            quadratic: vec![(pair(x, y), -2.0 * p)],
            linear: vec![(x, p), (y, p)],
            constant: 0.0,
        },
        ConstraintKind::ExactlyOne => PenaltyTerms {
            quadratic: vec![(pair(x, y), 2.0 * p)],
            linear: vec![(x, -p), (y, -p)],
            constant: p,
        },
        ConstraintKind::AtMostOne => PenaltyTerms {
            quadratic: vec![(pair(x, y), p)],
            ..Default::default()
        },
        ConstraintKind::AtLeastOne => PenaltyTerms {
            quadratic: vec![(pair(x, y), p)],
            linear: vec![(x, -p), (y, -p)],
            constant: p,
        },
        ConstraintKind::Implies => PenaltyTerms {
            quadratic: vec![(pair(x, y), -p)],
            linear: vec![(x, p)],
            constant: 0.0,
        },
        ConstraintKind::AtMostOneOfThree => {
            let z = vars[2];
            PenaltyTerms {
                quadratic: vec![(pair(x, y), p), (pair(x, z), p), (pair(y, z), p)],
                ..Default::default()
            }
        }
    };
    Ok(t)
}

pub(crate) fn ceil_log2(b: u64) -> usize {
    debug_assert!(b >= 1);
    (64 - (b - 1).leading_zeros()) as usize
}

/// Binary slack register `sum_i 2^i y_i` turning `a.x <= b` into an equality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackEncoding {
    pub bound: u64,
    pub bit_count: usize,
    pub bit_weights: Vec<u64>,
    pub var_indices: Vec<usize>,
}

impl SlackEncoding {
    /// `ceil(log2 b) + 1` bits, enough to represent every slack in `0..=b`.
    pub fn for_bound(bound: u64, first_index: usize) -> Result<Self> {
        if bound < 1 {
            return Err(Error::param("inequality bound must be >= 1"));
        }
        Ok(Self::with_bit_count(bound, ceil_log2(bound) + 1, first_index))
    }

    pub fn with_bit_count(bound: u64, bit_count: usize, first_index: usize) -> Self {
        Self {
            bound,
            bit_count,
            bit_weights: (0..bit_count).map(|i| 1u64 << i).collect(),
            var_indices: (first_index..first_index + bit_count).collect(),
        }
    }

    pub fn max_value(&self) -> u64 {
        self.bit_weights.iter().sum()
    }
}

/// `P (sum_i a_i x_i - b + sum_k 2^k y_k)^2` with slack bits allocated from
/// `first_slack`. Minimised over the slack bits the penalty vanishes exactly
/// when `a.x <= b` (for non-negative `a`), and is at least `P` otherwise.
pub fn inequality_to_penalty(
    coeffs: &[(usize, i64)],
    bound: i64,
    p: f64,
    first_slack: usize,
) -> Result<(PenaltyTerms, SlackEncoding)> {
    if bound < 1 {
        return Err(Error::param(format!("inequality bound must be >= 1, got {bound}")));
    }
    let enc = SlackEncoding::for_bound(bound as u64, first_slack)?;
    Ok((slack_penalty(coeffs, &enc, p), enc))
}

pub(crate) fn slack_penalty(coeffs: &[(usize, i64)], enc: &SlackEncoding, p: f64) -> PenaltyTerms {
    let mut affine: Vec<(usize, f64)> = coeffs.iter().map(|&(i, a)| (i, a as f64)).collect();
    affine.extend(
        enc.var_indices
            .iter()
            .zip(&enc.bit_weights)
            .map(|(&i, &w)| (i, w as f64)),
    );
    square_of_affine(&affine, -(enc.bound as f64), p)
}
