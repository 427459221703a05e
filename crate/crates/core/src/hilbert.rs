//! Linear algebra on the four-dimensional path ⊗ polarization space.
//!
//! Every state and operator is stored in the canonical index order
//! `(u⊗H, u⊗V, d⊗H, d⊗V)`. A [`Frame`] tag records which path modes
//! (source ports, interferometer arms, or splitter outputs) and which
//! polarization basis the indices refer to; operations refuse to mix frames.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub type Complex = Complex64;

/// Tolerance for exact-algebra checks.
pub const EXACT_TOL: f64 = 1e-12;
/// Residues above this threshold are treated as internal inconsistencies.
pub const ERROR_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("frame mismatch: operator expects {expected}, state is in {found}")]
    FrameMismatch { expected: Frame, found: Frame },
    #[error("state is already in the {0:?} polarization frame")]
    FrameUnchanged(PolFrame),
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
}

/// Which spatial modes the path index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathFrame {
    /// The two input ports `a`, `b` of the entry polarizing splitter.
    Source,
    /// The interferometer arms `u`, `d`.
    Arm,
    /// The balanced-splitter outputs `u′`, `d′`.
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolFrame {
    /// `{|→⟩, |↑⟩}`
    Rectilinear,
    /// `{|↗⟩, |↘⟩}`
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathLabel {
    U,
    D,
}

/// Polarization labels; `H`/`V` belong to the rectilinear frame, `P` (+45°)
/// and `M` (−45°) to the diagonal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolLabel {
    H,
    V,
    P,
    M,
}

impl PolLabel {
    pub fn frame(self) -> PolFrame {
        match self {
            PolLabel::H | PolLabel::V => PolFrame::Rectilinear,
            PolLabel::P | PolLabel::M => PolFrame::Diagonal,
        }
    }

    /// The orthogonal label in the same frame.
    pub fn orthogonal(self) -> PolLabel {
        match self {
            PolLabel::H => PolLabel::V,
            PolLabel::V => PolLabel::H,
            PolLabel::P => PolLabel::M,
            PolLabel::M => PolLabel::P,
        }
    }

    /// Rectilinear components of the unit vector carrying this label.
    pub fn rectilinear_vector(self) -> [Complex; 2] {
        let s = Complex::new(FRAC_1_SQRT_2, 0.0);
        match self {
            PolLabel::H => [Complex::ONE, Complex::ZERO],
            PolLabel::V => [Complex::ZERO, Complex::ONE],
            PolLabel::P => [s, s],
            PolLabel::M => [s, -s],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frame {
    pub path: PathFrame,
    pub pol: PolFrame,
}

impl Frame {
    /// Arm modes with rectilinear polarization: the frame of the observables.
    pub const CANONICAL: Frame = Frame { path: PathFrame::Arm, pol: PolFrame::Rectilinear };
    pub const SOURCE: Frame = Frame { path: PathFrame::Source, pol: PolFrame::Rectilinear };

    pub const fn new(path: PathFrame, pol: PolFrame) -> Self {
        Frame { path, pol }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{:?}", self.path, self.pol)
    }
}

/// Canonical index of a (path, polarization) pair; the polarization label's
/// position within its own frame decides the low bit.
pub fn index(path: PathLabel, pol: PolLabel) -> usize {
    let p = match path {
        PathLabel::U => 0,
        PathLabel::D => 2,
    };
    let q = match pol {
        PolLabel::H | PolLabel::P => 0,
        PolLabel::V | PolLabel::M => 1,
    };
    p + q
}

/// Matrix taking rectilinear components to diagonal components (and back:
/// it is its own inverse).
pub fn diagonal_change_matrix() -> Matrix2<Complex> {
    let s = Complex::new(FRAC_1_SQRT_2, 0.0);
    Matrix2::new(s, s, s, -s)
}

fn check_finite(v: &Vector4<Complex>) -> Result<(), HilbertError> {
    if v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(HilbertError::NonFinite)
    }
}

/// A (possibly unnormalized) ket in a tagged frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonState {
    amps: Vector4<Complex>,
    frame: Frame,
}

impl PhotonState {
    /// Builds a state that must be normalized within [`EXACT_TOL`].
    pub fn new(amps: [Complex; 4], frame: Frame) -> Result<Self, HilbertError> {
        let s = Self::unnormalized(amps, frame)?;
        s.require_normalized()?;
        Ok(s)
    }

    pub fn unnormalized(amps: [Complex; 4], frame: Frame) -> Result<Self, HilbertError> {
        let amps = Vector4::from(amps);
        check_finite(&amps)?;
        Ok(PhotonState { amps, frame })
    }

    /// Rescales arbitrary finite, nonzero amplitudes to unit norm.
    pub fn normalized_from(amps: [Complex; 4], frame: Frame) -> Result<Self, HilbertError> {
        let mut s = Self::unnormalized(amps, frame)?;
        let n = s.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(HilbertError::NotNormalized { norm_sqr: 0.0 });
        }
        s.amps /= Complex::new(n, 0.0);
        Ok(s)
    }

    pub fn basis(i: usize, frame: Frame) -> Self {
        let mut amps = Vector4::zeros();
        amps[i] = Complex::ONE;
        PhotonState { amps, frame }
    }

    /// Random state with Haar-distributed direction.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, frame: Frame) -> Self {
        loop {
            let amps: [Complex; 4] =
                std::array::from_fn(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
            if let Ok(s) = Self::normalized_from(amps, frame) {
                return s;
            }
        }
    }

    /// `(|u→⟩ + |d↑⟩)/√2`, the state right after the entry splitter.
    pub fn psi1() -> Self {
        let s = Complex::new(FRAC_1_SQRT_2, 0.0);
        PhotonState { amps: Vector4::new(s, Complex::ZERO, Complex::ZERO, s), frame: Frame::CANONICAL }
    }

    /// `|a⟩|↗⟩`, the prepared input at the source.
    pub fn psi0() -> Self {
        let s = Complex::new(FRAC_1_SQRT_2, 0.0);
        PhotonState { amps: Vector4::new(s, s, Complex::ZERO, Complex::ZERO), frame: Frame::SOURCE }
    }

    pub fn amps(&self) -> [Complex; 4] {
        self.amps.into()
    }

    pub fn amp(&self, i: usize) -> Complex {
        self.amps[i]
    }

    pub fn vector(&self) -> &Vector4<Complex> {
        &self.amps
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// Relabels the path frame without touching the amplitudes.
    pub fn with_path_frame(mut self, path: PathFrame) -> Self {
        self.frame.path = path;
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= EXACT_TOL
    }

    pub fn require_normalized(&self) -> Result<(), HilbertError> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(HilbertError::NotNormalized { norm_sqr: self.norm_sqr() })
        }
    }

    /// `⟨self|other⟩`, ignoring frame tags.
    pub fn inner(&self, other: &PhotonState) -> Complex {
        self.amps.dotc(&other.amps)
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &PhotonState) -> f64 {
        (self.amps - other.amps).norm()
    }

    /// True when both states coincide up to a global phase, i.e.
    /// `|⟨a|b⟩| = 1` within `tol`. Both states must be normalized.
    pub fn equal_up_to_phase(&self, other: &PhotonState, tol: f64) -> bool {
        self.frame == other.frame && (self.inner(other).norm() - 1.0).abs() <= tol
    }

    /// Projection onto one arm (`u` or `d`), unnormalized.
    pub fn path_component(&self, path: PathLabel) -> PhotonState {
        let mut amps = self.amps;
        let (lo, hi) = match path {
            PathLabel::U => (2, 4),
            PathLabel::D => (0, 2),
        };
        for i in lo..hi {
            amps[i] = Complex::ZERO;
        }
        PhotonState { amps, frame: self.frame }
    }

    /// The polarization 2-vector carried on one path mode.
    pub fn pol_on(&self, path: PathLabel) -> [Complex; 2] {
        let base = index(path, PolLabel::H);
        [self.amps[base], self.amps[base + 1]]
    }
}

/// Kronecker product `path ⊗ pol` in the canonical frame.
pub fn tensor(path: [Complex; 2], pol: [Complex; 2]) -> Result<PhotonState, HilbertError> {
    tensor_in(Frame::CANONICAL, path, pol)
}

pub fn tensor_in(frame: Frame, path: [Complex; 2], pol: [Complex; 2]) -> Result<PhotonState, HilbertError> {
    for factor in [path, pol] {
        let n: f64 = factor.iter().map(|c| c.norm_sqr()).sum();
        if !n.is_finite() {
            return Err(HilbertError::NonFinite);
        }
        if (n - 1.0).abs() > EXACT_TOL {
            return Err(HilbertError::NotNormalized { norm_sqr: n });
        }
    }
    let amps = [path[0] * pol[0], path[0] * pol[1], path[1] * pol[0], path[1] * pol[1]];
    PhotonState::new(amps, frame)
}

/// Re-expresses the polarization factor in `target`, using
/// `|↗⟩ = (|→⟩+|↑⟩)/√2` and `|↘⟩ = (|→⟩−|↑⟩)/√2`.
pub fn polarization_basis_change(state: &PhotonState, target: PolFrame) -> Result<PhotonState, HilbertError> {
    if state.frame.pol == target {
        return Err(HilbertError::FrameUnchanged(target));
    }
    state.require_normalized()?;
    let change = diagonal_change_matrix();
    let mut amps = state.amps;
    for path in [PathLabel::U, PathLabel::D] {
        let base = index(path, PolLabel::H);
        let v = nalgebra::Vector2::new(amps[base], amps[base + 1]);
        let w = change * v;
        amps[base] = w[0];
        amps[base + 1] = w[1];
    }
    Ok(PhotonState { amps, frame: Frame { path: state.frame.path, pol: target } })
}

/// A 4×4 matrix mapping kets in `input` frame to kets in `output` frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator4 {
    entries: Matrix4<Complex>,
    input: Frame,
    output: Frame,
}

impl Operator4 {
    /// Operator acting within a single frame.
    pub fn new(entries: Matrix4<Complex>, frame: Frame) -> Self {
        Operator4 { entries, input: frame, output: frame }
    }

    /// Operator changing frames, e.g. an optical element.
    pub fn mapping(entries: Matrix4<Complex>, input: Frame, output: Frame) -> Self {
        Operator4 { entries, input, output }
    }

    pub fn identity(frame: Frame) -> Self {
        Self::new(Matrix4::identity(), frame)
    }

    pub fn diagonal(d: [f64; 4], frame: Frame) -> Self {
        let v = Vector4::from(d.map(|x| Complex::new(x, 0.0)));
        Self::new(Matrix4::from_diagonal(&v), frame)
    }

    /// `path ⊗ pol` for 2×2 factors.
    pub fn kron(path: &Matrix2<Complex>, pol: &Matrix2<Complex>, frame: Frame) -> Self {
        Self::new(path.kronecker(pol).fixed_view::<4, 4>(0, 0).into_owned(), frame)
    }

    pub fn entries(&self) -> &Matrix4<Complex> {
        &self.entries
    }

    pub fn input_frame(&self) -> Frame {
        self.input
    }

    pub fn output_frame(&self) -> Frame {
        self.output
    }

    pub fn adjoint(&self) -> Self {
        Operator4 { entries: self.entries.adjoint(), input: self.output, output: self.input }
    }

    /// `self · rhs`; the frames must chain.
    pub fn compose(&self, rhs: &Operator4) -> Result<Operator4, HilbertError> {
        if rhs.output != self.input {
            return Err(HilbertError::FrameMismatch { expected: self.input, found: rhs.output });
        }
        Ok(Operator4 { entries: self.entries * rhs.entries, input: rhs.input, output: self.output })
    }

    pub fn scale(&self, k: f64) -> Self {
        Operator4 { entries: self.entries * Complex::new(k, 0.0), ..*self }
    }

    /// Entrywise sum of two same-frame operators.
    pub fn add(&self, rhs: &Operator4) -> Result<Operator4, HilbertError> {
        if rhs.input != self.input || rhs.output != self.output {
            return Err(HilbertError::FrameMismatch { expected: self.input, found: rhs.input });
        }
        Ok(Operator4 { entries: self.entries + rhs.entries, ..*self })
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.input == self.output && (self.entries - self.entries.adjoint()).iter().all(|c| c.norm() <= EXACT_TOL)
    }

    pub fn is_unitary(&self) -> bool {
        let g = self.entries.adjoint() * self.entries;
        (g - Matrix4::identity()).iter().all(|c| c.norm() <= EXACT_TOL)
    }

    /// Largest entry of `AB − BA`.
    pub fn commutator_norm(&self, other: &Operator4) -> f64 {
        (self.entries * other.entries - other.entries * self.entries).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `AB + BA`.
    pub fn anticommutator_norm(&self, other: &Operator4) -> f64 {
        (self.entries * other.entries + other.entries * self.entries).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Matrix-vector product.
pub fn apply(op: &Operator4, state: &PhotonState) -> Result<PhotonState, HilbertError> {
    if op.input != state.frame {
        return Err(HilbertError::FrameMismatch { expected: op.input, found: state.frame });
    }
    Ok(PhotonState { amps: op.entries * state.amps, frame: op.output })
}

/// `⟨ψ|A|ψ⟩` for Hermitian `A`.
pub fn expectation(op: &Operator4, state: &PhotonState) -> Result<f64, HilbertError> {
    if !op.is_hermitian() {
        return Err(HilbertError::NotHermitian);
    }
    state.require_normalized()?;
    let out = apply(op, state)?;
    let value = state.inner(&out);
    real_part_checked(value)
}

fn real_part_checked(value: Complex) -> Result<f64, HilbertError> {
    if value.im.abs() > ERROR_TOL {
        return Err(HilbertError::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}

/// Density operator on a single frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: Matrix4<Complex>,
    frame: Frame,
}

impl DensityMatrix {
    pub fn pure(state: &PhotonState) -> Result<Self, HilbertError> {
        state.require_normalized()?;
        Ok(DensityMatrix { rho: state.amps * state.amps.adjoint(), frame: state.frame })
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self, HilbertError> {
        let frame = parts.first().map(|(_, d)| d.frame).unwrap_or(Frame::CANONICAL);
        let mut rho = Matrix4::zeros();
        let mut total = 0.0;
        for (w, d) in parts {
            if d.frame != frame {
                return Err(HilbertError::FrameMismatch { expected: frame, found: d.frame });
            }
            total += w;
            rho += d.rho * Complex::new(*w, 0.0);
        }
        if (total - 1.0).abs() > EXACT_TOL || parts.iter().any(|(w, _)| *w < 0.0) {
            return Err(HilbertError::NotNormalized { norm_sqr: total });
        }
        Ok(DensityMatrix { rho, frame })
    }

    /// Removes the coherence between the `u` and `d` arms.
    pub fn dephase_path(&self) -> Self {
        let mut rho = self.rho;
        for i in 0..2 {
            for j in 2..4 {
                rho[(i, j)] = Complex::ZERO;
                rho[(j, i)] = Complex::ZERO;
            }
        }
        DensityMatrix { rho, frame: self.frame }
    }

    pub fn matrix(&self) -> &Matrix4<Complex> {
        &self.rho
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `tr(ρA)`.
    pub fn expectation(&self, op: &Operator4) -> Result<f64, HilbertError> {
        if op.input != self.frame {
            return Err(HilbertError::FrameMismatch { expected: op.input, found: self.frame });
        }
        if !op.is_hermitian() {
            return Err(HilbertError::NotHermitian);
        }
        real_part_checked((self.rho * op.entries).trace())
    }

    /// Populations of the canonical basis states.
    pub fn populations(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.rho[(i, i)].re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex {
        Complex::new(x, 0.0)
    }

    #[test]
    fn tensor_basis_product() {
        let s = tensor([c(1.0), c(0.0)], [c(1.0), c(0.0)]).unwrap();
        assert_eq!(s.amps(), [c(1.0), c(0.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn tensor_diagonal_polarization() {
        let h = FRAC_1_SQRT_2;
        let s = tensor([c(1.0), c(0.0)], [c(h), c(h)]).unwrap();
        assert_eq!(s.amps(), [c(h), c(h), c(0.0), c(0.0)]);
    }

    #[test]
    fn tensor_expanded_by_hand() {
        let h = FRAC_1_SQRT_2;
        let s = tensor([c(h), c(h)], [c(h), c(-h)]).unwrap();
        let expected = [0.5, -0.5, 0.5, -0.5];
        for (a, e) in s.amps().iter().zip(expected) {
            assert!((a - c(e)).norm() < EXACT_TOL);
        }
    }

    #[test]
    fn tensor_rejects_unnormalized_factor() {
        let err = tensor([c(1.0), c(1.0)], [c(1.0), c(0.0)]).unwrap_err();
        assert!(matches!(err, HilbertError::NotNormalized { .. }));
    }

    #[test]
    fn diagonal_to_rectilinear() {
        // |u⟩|↗⟩ written in the diagonal frame is (1, 0, 0, 0).
        let diag = PhotonState::basis(0, Frame::new(PathFrame::Arm, PolFrame::Diagonal));
        let rect = polarization_basis_change(&diag, PolFrame::Rectilinear).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(rect.distance(&PhotonState::new([c(h), c(h), c(0.0), c(0.0)], Frame::CANONICAL).unwrap()) < EXACT_TOL);
        assert_eq!(rect.frame(), Frame::CANONICAL);
    }

    #[test]
    fn rectilinear_to_diagonal() {
        // |d⟩|→⟩ = (|d⟩|↗⟩ + |d⟩|↘⟩)/√2
        let s = PhotonState::basis(2, Frame::CANONICAL);
        let d = polarization_basis_change(&s, PolFrame::Diagonal).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [c(0.0), c(0.0), c(h), c(h)];
        for (a, e) in d.amps().iter().zip(expected) {
            assert!((a - e).norm() < EXACT_TOL);
        }
    }

    #[test]
    fn basis_change_to_same_frame_is_rejected() {
        let s = PhotonState::psi1();
        assert_eq!(
            polarization_basis_change(&s, PolFrame::Rectilinear),
            Err(HilbertError::FrameUnchanged(PolFrame::Rectilinear))
        );
    }

    #[test]
    fn basis_change_round_trip_and_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let s = PhotonState::random(&mut rng, Frame::CANONICAL);
            let d = polarization_basis_change(&s, PolFrame::Diagonal).unwrap();
            assert!((d.norm_sqr() - 1.0).abs() < EXACT_TOL);
            let back = polarization_basis_change(&d, PolFrame::Rectilinear).unwrap();
            assert!(back.distance(&s) < EXACT_TOL);
        }
    }

    #[test]
    fn identity_apply() {
        let s = PhotonState::psi1();
        let out = apply(&Operator4::identity(Frame::CANONICAL), &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn apply_frame_mismatch() {
        let s = PhotonState::psi0();
        let err = apply(&Operator4::identity(Frame::CANONICAL), &s).unwrap_err();
        assert!(matches!(err, HilbertError::FrameMismatch { .. }));
    }

    #[test]
    fn expectation_rejects_non_hermitian() {
        let mut m = Matrix4::zeros();
        m[(0, 1)] = Complex::ONE;
        let op = Operator4::new(m, Frame::CANONICAL);
        assert_eq!(expectation(&op, &PhotonState::psi1()), Err(HilbertError::NotHermitian));
    }

    #[test]
    fn expectation_requires_normalized_state() {
        let s = PhotonState::unnormalized([c(1.0), c(1.0), c(0.0), c(0.0)], Frame::CANONICAL).unwrap();
        let op = Operator4::identity(Frame::CANONICAL);
        assert!(matches!(expectation(&op, &s), Err(HilbertError::NotNormalized { .. })));
    }

    #[test]
    fn non_finite_amplitudes_rejected() {
        let err = PhotonState::unnormalized([c(f64::NAN), c(0.0), c(0.0), c(0.0)], Frame::CANONICAL);
        assert_eq!(err, Err(HilbertError::NonFinite));
    }

    #[test]
    fn global_phase_comparison() {
        let s = PhotonState::psi1();
        let phased = PhotonState::new(s.amps().map(|a| a * Complex::from_polar(1.0, 0.7)), Frame::CANONICAL).unwrap();
        assert!(s.equal_up_to_phase(&phased, EXACT_TOL));
        assert!(s.distance(&phased) > 0.1);
    }

    #[test]
    fn dephasing_keeps_populations() {
        let rho = DensityMatrix::pure(&PhotonState::psi1()).unwrap();
        let d = rho.dephase_path();
        assert_eq!(d.populations(), rho.populations());
        assert_eq!(d.matrix()[(0, 3)], Complex::ZERO);
        assert!((d.trace() - 1.0).abs() < EXACT_TOL);
    }
}
