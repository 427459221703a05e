//! Noncontextual hidden-variable model: deterministic ±1 assignments to
//! `Z1`, `X1`, `Z2`, `X2`, their constraints and the detector each one
//! selects.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::hilbert::EXACT_TOL;
use crate::observables::{JointOutcome, Sign};
use crate::optics::DetectorId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ValueAssignment {
    pub z1: Sign,
    pub x1: Sign,
    pub z2: Sign,
    pub x2: Sign,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NchvError {
    #[error("value {0} is not ±1")]
    NotPlusMinusOne(i32),
    #[error("assignment weights must be nonnegative and sum to 1 (sum {sum})")]
    Unnormalized { sum: f64 },
}

impl ValueAssignment {
    pub fn new(z1: Sign, x1: Sign, z2: Sign, x2: Sign) -> Self {
        ValueAssignment { z1, x1, z2, x2 }
    }

    /// From integer values in the order `(Z1, X1, Z2, X2)`.
    pub fn from_values(z1: i32, x1: i32, z2: i32, x2: i32) -> Result<Self, NchvError> {
        let s = |v| Sign::from_value(v).ok_or(NchvError::NotPlusMinusOne(v));
        Ok(ValueAssignment { z1: s(z1)?, x1: s(x1)?, z2: s(z2)?, x2: s(x2)? })
    }

    /// Position in [`enumerate_assignments`]: bits `(Z1, X1, Z2, X2)`, most
    /// significant first, set for −1.
    pub fn index(&self) -> usize {
        [self.z1, self.x1, self.z2, self.x2].iter().fold(0, |acc, s| (acc << 1) | usize::from(*s == Sign::Minus))
    }

    pub fn from_index(i: usize) -> Option<Self> {
        if i >= 16 {
            return None;
        }
        let bit = |k: usize| if (i >> k) & 1 == 1 { Sign::Minus } else { Sign::Plus };
        Some(ValueAssignment { z1: bit(3), x1: bit(2), z2: bit(1), x2: bit(0) })
    }

    pub fn values(&self) -> [i32; 4] {
        [self.z1, self.x1, self.z2, self.x2].map(Sign::value)
    }
}

impl fmt::Display for ValueAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.z1, self.x1, self.z2, self.x2)
    }
}

/// All 16 assignments in index order.
pub fn enumerate_assignments() -> Vec<ValueAssignment> {
    (0..16).filter_map(ValueAssignment::from_index).collect()
}

/// `1 + v(Z1)v(Z2) + v(X1)v(X2) − v(Z1)v(X2)v(X1)v(Z2)`
pub fn c_value(a: &ValueAssignment) -> i32 {
    let [z1, x1, z2, x2] = a.values();
    1 + z1 * z2 + x1 * x2 - z1 * x2 * x1 * z2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintCheck {
    /// `v(Z1)v(Z2) = +1`
    pub zz: bool,
    /// `v(X1)v(X2) = +1`
    pub xx: bool,
    /// `v(Z1)v(X2) = −v(X1)v(Z2)`
    pub anti: bool,
}

impl ConstraintCheck {
    pub fn all(&self) -> bool {
        self.zz && self.xx && self.anti
    }
}

pub fn check_constraints(a: &ValueAssignment) -> ConstraintCheck {
    ConstraintCheck {
        zz: a.z1 * a.z2 == Sign::Plus,
        xx: a.x1 * a.x2 == Sign::Plus,
        anti: a.z1 * a.x2 == -(a.x1 * a.z2),
    }
}

/// One constraint of the form `Π v(vars) = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityEquation {
    pub label: &'static str,
    /// Exponents of `(Z1, X1, Z2, X2)` on the left side.
    pub exponents: [u8; 4],
    pub rhs: i32,
}

/// Exhaustive and parity-based argument that no assignment meets all
/// three constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ContradictionProof {
    pub satisfying: Vec<ValueAssignment>,
    pub equations: Vec<ParityEquation>,
    /// Exponent of each variable in the product of all left sides.
    pub product_exponents: [u8; 4],
    /// Value of the product of left sides for any assignment.
    pub lhs_product: i32,
    /// Product of right sides.
    pub rhs_product: i32,
}

impl ContradictionProof {
    pub fn explanation(&self) -> String {
        format!(
            "multiplying the {} constraints: every value appears with exponents {:?}, so the left side is {:+}; the right side is {:+}",
            self.equations.len(),
            self.product_exponents,
            self.lhs_product,
            self.rhs_product
        )
    }
}

pub fn contradiction_proof() -> ContradictionProof {
    let satisfying = enumerate_assignments().into_iter().filter(|a| check_constraints(a).all()).collect();
    // The third constraint, moved to one side: v(Z1)v(X2)v(X1)v(Z2) = −1.
    let equations = vec![
        ParityEquation { label: "Z1Z2", exponents: [1, 0, 1, 0], rhs: 1 },
        ParityEquation { label: "X1X2", exponents: [0, 1, 0, 1], rhs: 1 },
        ParityEquation { label: "Z1X2=-X1Z2", exponents: [1, 1, 1, 1], rhs: -1 },
    ];
    let mut product_exponents = [0u8; 4];
    for eq in &equations {
        for (p, e) in product_exponents.iter_mut().zip(eq.exponents) {
            *p += e;
        }
    }
    let lhs_product = if product_exponents.iter().all(|e| e % 2 == 0) { 1 } else { 0 };
    let rhs_product = equations.iter().map(|e| e.rhs).product();
    ContradictionProof { satisfying, equations, product_exponents, lhs_product, rhs_product }
}

/// Detector that an assignment deterministically selects: `v(Z1)v(X2)` picks
/// the S1 group (−1) or S2 group (+1), `v(X1)` the u′/d′ output and `v(Z2)`
/// the →/↑ port.
pub fn assignment_to_detector(a: &ValueAssignment) -> DetectorId {
    let group = if a.z1 * a.x2 == Sign::Minus { 0 } else { 4 };
    let port = if a.x1 == Sign::Plus { 0 } else { 2 };
    let pol = if a.z2 == Sign::Plus { 0 } else { 1 };
    DetectorId::from_index(group + port + pol).expect("index below 8")
}

/// Outcome `(v(Z1)v(Z2), v(X1)v(X2))` of the auxiliary measurement.
pub fn assignment_to_joint(a: &ValueAssignment) -> JointOutcome {
    JointOutcome::new(a.z1 * a.z2, a.x1 * a.x2)
}

/// Weights over the 16 assignments, indexed by [`ValueAssignment::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentDistribution {
    weights: [f64; 16],
    cumulative: [f64; 16],
}

impl AssignmentDistribution {
    pub fn new(weights: [f64; 16]) -> Result<Self, NchvError> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (sum - 1.0).abs() > EXACT_TOL {
            return Err(NchvError::Unnormalized { sum });
        }
        let mut cumulative = [0.0; 16];
        let mut acc = 0.0;
        for (c, w) in cumulative.iter_mut().zip(weights) {
            acc += w;
            *c = acc;
        }
        Ok(AssignmentDistribution { weights, cumulative })
    }

    /// Uniform over the given assignments (duplicates add weight).
    pub fn uniform_over(members: &[ValueAssignment]) -> Result<Self, NchvError> {
        let mut w = [0.0; 16];
        let share = 1.0 / members.len() as f64;
        for a in members {
            w[a.index()] += share;
        }
        Self::new(w)
    }

    pub fn point_mass(a: ValueAssignment) -> Self {
        Self::uniform_over(&[a]).expect("single point")
    }

    pub fn uniform() -> Self {
        Self::new([1.0 / 16.0; 16]).expect("uniform weights")
    }

    /// Uniform over the four assignments with `v(Z1)v(Z2) = v(X1)v(X2) = +1`.
    pub fn constrained() -> Self {
        let members: Vec<_> = enumerate_assignments()
            .into_iter()
            .filter(|a| {
                let c = check_constraints(a);
                c.zz && c.xx
            })
            .collect();
        Self::uniform_over(&members).expect("four members")
    }

    pub fn weights(&self) -> &[f64; 16] {
        &self.weights
    }

    pub fn weight(&self, a: &ValueAssignment) -> f64 {
        self.weights[a.index()]
    }
}

impl Default for AssignmentDistribution {
    fn default() -> Self {
        Self::constrained()
    }
}

/// Draws one assignment using a single uniform variate.
pub fn sample_assignment<R: Rng + ?Sized>(dist: &AssignmentDistribution, rng: &mut R) -> ValueAssignment {
    let u: f64 = rng.random::<f64>() * dist.cumulative[15];
    let k = dist.cumulative.iter().position(|&c| u < c).unwrap_or_else(|| {
        // u landed on the top edge; take the last assignment with weight
        dist.weights.iter().rposition(|&w| w > 0.0).unwrap_or(15)
    });
    ValueAssignment::from_index(k).expect("index below 16")
}
