//! The four two-valued observables, their products, the two measurement
//! contexts and the detector value table.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};

use crate::hilbert::diagonal_change_matrix;
use crate::hilbert::{apply, Complex, DensityMatrix, Frame, HilbertError, Operator4, PhotonState, EXACT_TOL};
use crate::nchv;
use crate::optics::{splitter_matrix, DetectorId};

/// A measured value, ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i32) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservableName {
    Z1,
    X1,
    Z2,
    X2,
    Z1Z2,
    X1X2,
    Z1X2,
    X1Z2,
    /// `Z1X2·X1Z2`
    Z1X2X1Z2,
}

impl ObservableName {
    pub const ALL: [ObservableName; 9] = [
        ObservableName::Z1,
        ObservableName::X1,
        ObservableName::Z2,
        ObservableName::X2,
        ObservableName::Z1Z2,
        ObservableName::X1X2,
        ObservableName::Z1X2,
        ObservableName::X1Z2,
        ObservableName::Z1X2X1Z2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ObservableName::Z1 => "Z1",
            ObservableName::X1 => "X1",
            ObservableName::Z2 => "Z2",
            ObservableName::X2 => "X2",
            ObservableName::Z1Z2 => "Z1Z2",
            ObservableName::X1X2 => "X1X2",
            ObservableName::Z1X2 => "Z1X2",
            ObservableName::X1Z2 => "X1Z2",
            ObservableName::Z1X2X1Z2 => "Z1X2*X1Z2",
        }
    }
}

impl fmt::Display for ObservableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown observable `{0}`")]
pub struct UnknownObservable(pub String);

impl FromStr for ObservableName {
    type Err = UnknownObservable;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| !matches!(c, '*' | '·' | '.' | ' ')).collect();
        match key.as_str() {
            "Z1X2X1Z2" => Ok(ObservableName::Z1X2X1Z2),
            other => ObservableName::ALL
                .into_iter()
                .find(|n| n.as_str() == other)
                .ok_or_else(|| UnknownObservable(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedObservable {
    pub name: ObservableName,
    pub matrix: Operator4,
}

fn diag2(a: f64, b: f64) -> Matrix2<Complex> {
    Matrix2::new(Complex::new(a, 0.0), Complex::ZERO, Complex::ZERO, Complex::new(b, 0.0))
}

/// `|u′⟩⟨u′| − |d′⟩⟨d′|` pulled back into arm coordinates through the
/// balanced splitter.
fn x1_path() -> Matrix2<Complex> {
    let b = splitter_matrix(0.5);
    b.adjoint() * diag2(1.0, -1.0) * b
}

/// `|↗⟩⟨↗| − |↘⟩⟨↘|` expressed in rectilinear components.
fn x2_pol() -> Matrix2<Complex> {
    let r = diagonal_change_matrix();
    r * diag2(1.0, -1.0) * r.adjoint()
}

fn product(a: ObservableName, b: ObservableName) -> Operator4 {
    let (a, b) = (make_observable(a).matrix, make_observable(b).matrix);
    Operator4::new(a.entries() * b.entries(), Frame::CANONICAL)
}

/// Builds an observable in the canonical frame.
pub fn make_observable(name: ObservableName) -> NamedObservable {
    use ObservableName::*;
    let id = Matrix2::identity();
    let f = Frame::CANONICAL;
    let matrix = match name {
        Z1 => Operator4::kron(&diag2(1.0, -1.0), &id, f),
        X1 => Operator4::kron(&x1_path(), &id, f),
        Z2 => Operator4::kron(&id, &diag2(1.0, -1.0), f),
        X2 => Operator4::kron(&id, &x2_pol(), f),
        Z1Z2 => product(Z1, Z2),
        X1X2 => product(X1, X2),
        Z1X2 => product(Z1, X2),
        X1Z2 => product(X1, Z2),
        Z1X2X1Z2 => {
            let a = product(Z1, X2);
            let b = product(X1, Z2);
            Operator4::new(a.entries() * b.entries(), f)
        }
    };
    NamedObservable { name, matrix }
}

pub fn observable(name: ObservableName) -> Operator4 {
    make_observable(name).matrix
}

/// `C = I + Z1Z2 + X1X2 − Z1X2·X1Z2`.
pub fn combination_operator() -> Operator4 {
    let m =
        Matrix4::identity() + observable(ObservableName::Z1Z2).entries() + observable(ObservableName::X1X2).entries()
            - observable(ObservableName::Z1X2X1Z2).entries();
    Operator4::new(m, Frame::CANONICAL)
}

/// A joint outcome of two commuting ±1 observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointOutcome {
    pub first: Sign,
    pub second: Sign,
}

impl JointOutcome {
    /// Ordered `(+,+)`, `(+,−)`, `(−,+)`, `(−,−)`.
    pub const ALL: [JointOutcome; 4] = [
        JointOutcome { first: Sign::Plus, second: Sign::Plus },
        JointOutcome { first: Sign::Plus, second: Sign::Minus },
        JointOutcome { first: Sign::Minus, second: Sign::Plus },
        JointOutcome { first: Sign::Minus, second: Sign::Minus },
    ];

    pub fn new(first: Sign, second: Sign) -> Self {
        JointOutcome { first, second }
    }

    pub fn index(self) -> usize {
        let hi = usize::from(self.first == Sign::Minus);
        let lo = usize::from(self.second == Sign::Minus);
        2 * hi + lo
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for JointOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementContext {
    /// Joint `Z1X2` and `X1Z2`: the interferometer itself.
    A,
    /// Joint `Z1Z2` and `X1X2`: an auxiliary projective device.
    B,
}

impl fmt::Display for MeasurementContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasurementContext::A => "A",
            MeasurementContext::B => "B",
        })
    }
}

impl MeasurementContext {
    pub fn observables(self) -> (ObservableName, ObservableName) {
        match self {
            MeasurementContext::A => (ObservableName::Z1X2, ObservableName::X1Z2),
            MeasurementContext::B => (ObservableName::Z1Z2, ObservableName::X1X2),
        }
    }

    /// Joint eigenprojectors `(I + a·A)(I + b·B)/4`, in [`JointOutcome::ALL`] order.
    pub fn projectors(self) -> [(JointOutcome, Operator4); 4] {
        let (a, b) = self.observables();
        let (a, b) = (observable(a), observable(b));
        JointOutcome::ALL.map(|o| {
            let id = Matrix4::<Complex>::identity();
            let sa = Complex::new(f64::from(o.first.value()), 0.0);
            let sb = Complex::new(f64::from(o.second.value()), 0.0);
            let m = (id + a.entries() * sa) * (id + b.entries() * sb) * Complex::new(0.25, 0.0);
            (o, Operator4::new(m, Frame::CANONICAL))
        })
    }
}

/// Residual norms of the three eigenstate relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenReport {
    /// `‖Z1Z2ψ − ψ‖`
    pub z1z2_residual: f64,
    /// `‖X1X2ψ − ψ‖`
    pub x1x2_residual: f64,
    /// `‖Z1X2ψ + X1Z2ψ‖`
    pub anticorrelation_residual: f64,
}

impl EigenReport {
    pub fn z1z2_holds(&self) -> bool {
        self.z1z2_residual < EXACT_TOL
    }

    pub fn x1x2_holds(&self) -> bool {
        self.x1x2_residual < EXACT_TOL
    }

    pub fn anticorrelation_holds(&self) -> bool {
        self.anticorrelation_residual < EXACT_TOL
    }

    pub fn all_hold(&self) -> bool {
        self.z1z2_holds() && self.x1x2_holds() && self.anticorrelation_holds()
    }
}

pub fn verify_eigenstate_relations(state: &PhotonState) -> Result<EigenReport, HilbertError> {
    state.require_normalized()?;
    let on = |n| apply(&observable(n), state);
    let zz = on(ObservableName::Z1Z2)?;
    let xx = on(ObservableName::X1X2)?;
    let zx = on(ObservableName::Z1X2)?;
    let xz = on(ObservableName::X1Z2)?;
    Ok(EigenReport {
        z1z2_residual: zz.distance(state),
        x1x2_residual: xx.distance(state),
        anticorrelation_residual: (zx.vector() + xz.vector()).norm(),
    })
}

/// Values revealed by a click at one detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorValues {
    pub z1x2: Sign,
    pub x1z2: Sign,
    pub product: Sign,
}

const P: Sign = Sign::Plus;
const M: Sign = Sign::Minus;

const TABLE: [(Sign, Sign, Sign); 8] =
    [(M, P, M), (M, M, P), (M, M, P), (M, P, M), (P, P, P), (P, M, M), (P, M, M), (P, P, P)];

pub fn detector_values(d: DetectorId) -> DetectorValues {
    let (z1x2, x1z2, product) = TABLE[d.index()];
    DetectorValues { z1x2, x1z2, product }
}

/// Joint `(Z1Z2, X1X2)` eigenbasis, in [`JointOutcome::ALL`] order: the four
/// maximally path–polarization correlated states.
pub fn context_b_basis() -> [PhotonState; 4] {
    let s = FRAC_1_SQRT_2;
    let rows = [[s, 0.0, 0.0, s], [s, 0.0, 0.0, -s], [0.0, s, s, 0.0], [0.0, s, -s, 0.0]];
    rows.map(|r| PhotonState::new(r.map(|x| Complex::new(x, 0.0)), Frame::CANONICAL).expect("unit vectors"))
}

/// Outcome probabilities of the auxiliary `(Z1Z2, X1X2)` measurement.
pub fn context_b_measure(state: &PhotonState) -> Result<[f64; 4], HilbertError> {
    state.require_normalized()?;
    if state.frame() != Frame::CANONICAL {
        return Err(HilbertError::FrameMismatch { expected: Frame::CANONICAL, found: state.frame() });
    }
    let basis = context_b_basis();
    Ok(std::array::from_fn(|k| basis[k].inner(state).norm_sqr()))
}

/// Same as [`context_b_measure`] for a mixed state, via the joint projectors.
pub fn context_b_probabilities(rho: &DensityMatrix) -> Result<[f64; 4], HilbertError> {
    let projectors = MeasurementContext::B.projectors();
    let mut out = [0.0; 4];
    for (k, (_, p)) in projectors.iter().enumerate() {
        out[k] = rho.expectation(p)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    /// Largest `|⟨C⟩|` attainable by noncontextual assignments.
    pub nchv_max: f64,
    /// Largest eigenvalue of `C`.
    pub qm_max: f64,
    /// Eigenvector belonging to `qm_max`.
    pub qm_eigenvector: PhotonState,
}

pub fn observable_bounds() -> Bounds {
    let nchv_max =
        nchv::enumerate_assignments().iter().map(|a| nchv::c_value(a).abs()).max().map(f64::from).unwrap_or(0.0);

    let eig = SymmetricEigen::new(*combination_operator().entries());
    let (k, qm_max) =
        eig.eigenvalues.iter().copied().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).expect("four eigenvalues");
    let v = eig.eigenvectors.column(k);
    let qm_eigenvector = PhotonState::normalized_from([v[0], v[1], v[2], v[3]], Frame::CANONICAL)
        .expect("eigenvector is finite and nonzero");
    Bounds { nchv_max, qm_max, qm_eigenvector }
}
