//! Simulation of a single-photon interferometric test of noncontextuality.
//!
//! The crate covers four layers:
//!
//! * [`hilbert`]: states and operators on the path ⊗ polarization space.
//! * [`optics`]: the interferometer as a network of optical elements.
//! * [`observables`] and [`nchv`]: the quantum observables and the rival
//!   noncontextual hidden-variable model.
//! * [`experiment`]: Monte Carlo runs with detector imperfections, the
//!   inequality estimator and exact predictions for cross-checks.

pub mod experiment;
pub mod hilbert;
pub mod nchv;
pub mod observables;
pub mod optics;

pub use hilbert::{Complex, Frame, Operator4, PhotonState};
pub use nchv::{AssignmentDistribution, ValueAssignment};
pub use observables::{JointOutcome, MeasurementContext, ObservableName, Sign};
pub use optics::{DetectorId, OpticalNetwork};
