use std::f64::consts::FRAC_PI_4;
use std::fmt;

use crate::hilbert::{Complex, Frame, PhotonState};
use crate::optics::{DetectorId, Fig1Params};

use super::ExperimentError;

/// Parametric non-idealities of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImperfectionModel {
    /// Detection probability of D1..D8.
    pub efficiency: [f64; 8],
    /// Probability that a given detector fires spuriously in one trial window.
    pub dark_count_prob: f64,
    /// Offset of the prepared linear polarization from +45°, in radians.
    pub prep_angle_error: f64,
    /// Arm phases in radians, ordered as [`crate::optics::ARM_NAMES`].
    pub arm_phases: [f64; 4],
    /// Intensity transmittance of S1 and S2.
    pub bs_transmittance: [f64; 2],
    /// Weight of the coherent state against its path-dephased mixture.
    pub visibility: f64,
}

impl Default for ImperfectionModel {
    fn default() -> Self {
        Self::ideal()
    }
}

/// An out-of-range field.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamIssue {
    pub field: String,
    pub value: f64,
    pub expected: &'static str,
}

impl fmt::Display for ParamIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} (expected {})", self.field, self.value, self.expected)
    }
}

const UNIT: &str = "a value in [0, 1]";

impl ImperfectionModel {
    pub fn ideal() -> Self {
        ImperfectionModel {
            efficiency: [1.0; 8],
            dark_count_prob: 0.0,
            prep_angle_error: 0.0,
            arm_phases: [0.0; 4],
            bs_transmittance: [0.5; 2],
            visibility: 1.0,
        }
    }

    /// Every field paired with its parameter path.
    pub fn fields(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for d in DetectorId::ALL {
            out.push((format!("efficiency.{d}"), self.efficiency[d.index()]));
        }
        out.push(("dark_count_prob".into(), self.dark_count_prob));
        out.push(("prep_angle_error".into(), self.prep_angle_error));
        for (k, p) in self.arm_phases.iter().enumerate() {
            out.push((format!("arm_phases.{k}"), *p));
        }
        out.push(("bs_transmittance.S1".into(), self.bs_transmittance[0]));
        out.push(("bs_transmittance.S2".into(), self.bs_transmittance[1]));
        out.push(("visibility".into(), self.visibility));
        out
    }

    /// Collects every range violation.
    pub fn issues(&self) -> Vec<ParamIssue> {
        let mut issues = Vec::new();
        for (field, value) in self.fields() {
            let expected = if field == "dark_count_prob" {
                (!(0.0..1.0).contains(&value)).then_some("a value in [0, 1)")
            } else if field.starts_with("efficiency") || field.starts_with("bs_transmittance") || field == "visibility"
            {
                (!(0.0..=1.0).contains(&value)).then_some(UNIT)
            } else {
                (!value.is_finite()).then_some("a finite angle")
            };
            if let Some(expected) = expected {
                issues.push(ParamIssue { field: format!("imperfection.{field}"), value, expected });
            }
        }
        issues
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ExperimentError::InvalidParameters(issues))
        }
    }

    /// Sets a field by path, e.g. `visibility`, `efficiency` (all detectors),
    /// `efficiency.D3`, `arm_phases.2`, `bs_transmittance.S1`. A leading
    /// `imperfection.` is accepted. Values are not range-checked here.
    pub fn set(&mut self, path: &str, value: f64) -> Result<(), ExperimentError> {
        let unknown = || ExperimentError::UnknownParameter(path.to_string());
        let key = path.strip_prefix("imperfection.").unwrap_or(path);
        let (head, tail) = match key.split_once('.') {
            Some((h, t)) => (h, Some(t)),
            None => (key, None),
        };
        match (head, tail) {
            ("efficiency", None) => self.efficiency = [value; 8],
            ("efficiency", Some(d)) => {
                let d: DetectorId = d.parse().map_err(|_| unknown())?;
                self.efficiency[d.index()] = value;
            }
            ("dark_count_prob", None) => self.dark_count_prob = value,
            ("prep_angle_error", None) => self.prep_angle_error = value,
            ("arm_phases", None) => self.arm_phases = [value; 4],
            ("arm_phases", Some(k)) => {
                let k: usize = k.parse().map_err(|_| unknown())?;
                *self.arm_phases.get_mut(k).ok_or_else(unknown)? = value;
            }
            ("bs_transmittance", None) => self.bs_transmittance = [value; 2],
            ("bs_transmittance", Some("S1")) => self.bs_transmittance[0] = value,
            ("bs_transmittance", Some("S2")) => self.bs_transmittance[1] = value,
            ("visibility", None) => self.visibility = value,
            _ => return Err(unknown()),
        }
        Ok(())
    }

    pub fn fig1_params(&self) -> Fig1Params {
        Fig1Params { arm_phases: self.arm_phases, transmittance: self.bs_transmittance, reflection_phase: Complex::ONE }
    }

    /// `|a⟩ ⊗ (cos θ|→⟩ + sin θ|↑⟩)` with `θ = 45° + prep_angle_error`.
    pub fn source_state(&self) -> PhotonState {
        let theta = FRAC_PI_4 + self.prep_angle_error;
        let amps = [Complex::new(theta.cos(), 0.0), Complex::new(theta.sin(), 0.0), Complex::ZERO, Complex::ZERO];
        PhotonState::normalized_from(amps, Frame::SOURCE).expect("unit polarization vector")
    }

    /// Efficiency applied to each outcome of the auxiliary device.
    pub fn context_b_efficiency(&self) -> f64 {
        self.efficiency.iter().sum::<f64>() / 8.0
    }
}
