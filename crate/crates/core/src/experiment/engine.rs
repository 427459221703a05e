use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::hilbert::{apply, DensityMatrix, PathLabel, PhotonState};
use crate::nchv::{assignment_to_detector, assignment_to_joint, sample_assignment, AssignmentDistribution};
use crate::observables::{context_b_measure, JointOutcome};
use crate::optics::{build_fig1_network_with, entry_operator, propagate, DetectorId};

use super::detection::{DetectionLayer, Resolution};
use super::{Context, ExperimentError, ExperimentOptions, ImperfectionModel, Theory};

/// Trials handled by one parallel work item. Fixed so that the partition,
/// and therefore the result, does not depend on the worker count.
const CHUNK: u64 = 8192;

/// A click either at a detector of the interferometer or at one outcome of
/// the auxiliary device.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Click {
    Detector(DetectorId),
    Joint(JointOutcome),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Detector(DetectorId),
    Joint(JointOutcome),
    NoDetection,
    /// A click produced by a dark count rather than the photon.
    DarkCount(Click),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub context: Context,
    pub outcome: Outcome,
}

/// Tallies of one run.
///
/// `context_a` and `context_b` hold every registered click, including those
/// caused by dark counts; `dark` counts how many of those clicks were dark.
/// Hence `Σ context_a + Σ context_b + no_detection = trials`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountsTable {
    pub context: Context,
    pub context_a: [u64; 8],
    pub context_b: [u64; 4],
    pub no_detection: u64,
    pub dark: u64,
    pub trials: u64,
}

impl CountsTable {
    pub fn empty(context: Context) -> Self {
        CountsTable { context, context_a: [0; 8], context_b: [0; 4], no_detection: 0, dark: 0, trials: 0 }
    }

    pub fn record(&mut self, r: &TrialRecord) {
        self.trials += 1;
        let click = match r.outcome {
            Outcome::NoDetection => {
                self.no_detection += 1;
                return;
            }
            Outcome::Detector(d) => Click::Detector(d),
            Outcome::Joint(j) => Click::Joint(j),
            Outcome::DarkCount(c) => {
                self.dark += 1;
                c
            }
        };
        match click {
            Click::Detector(d) => self.context_a[d.index()] += 1,
            Click::Joint(j) => self.context_b[j.index()] += 1,
        }
    }

    pub fn merge(mut self, other: &CountsTable) -> Self {
        for (a, b) in self.context_a.iter_mut().zip(other.context_a) {
            *a += b;
        }
        for (a, b) in self.context_b.iter_mut().zip(other.context_b) {
            *a += b;
        }
        self.no_detection += other.no_detection;
        self.dark += other.dark;
        self.trials += other.trials;
        self
    }

    pub fn detected(&self) -> u64 {
        self.context_a.iter().sum::<u64>() + self.context_b.iter().sum::<u64>()
    }

    pub fn is_consistent(&self) -> bool {
        self.detected() + self.no_detection == self.trials && self.dark <= self.detected()
    }
}

/// Per-trial random stream: the master seed and context select a ChaCha
/// key, the trial index selects the stream.
pub fn trial_rng(seed: u64, context: Context, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8] = match context {
        Context::A => b'A',
        Context::B => b'B',
    };
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// Precomputed sampling tables for one (theory, context, imperfections).
#[derive(Debug, Clone)]
pub struct TrialSampler {
    context: Context,
    source: Source,
    detection: DetectionLayer,
}

#[derive(Debug, Clone)]
enum Source {
    /// Mixture components (the coherent state and its two dephased arm
    /// branches) and each component's outcome distribution.
    Quantum {
        branches: Option<WeightedIndex<f64>>,
        outcomes: Vec<WeightedIndex<f64>>,
    },
    Hidden(AssignmentDistribution),
}

impl TrialSampler {
    pub fn new(
        theory: Theory,
        context: Context,
        imp: &ImperfectionModel,
        opts: &ExperimentOptions,
    ) -> Result<Self, ExperimentError> {
        imp.validate()?;
        let source = match theory {
            Theory::Qm => quantum_source(context, imp)?,
            Theory::Nchv => Source::Hidden(opts.ensemble.clone()),
        };
        let detection = match context {
            Context::A => DetectionLayer::new(imp.efficiency.to_vec(), imp.dark_count_prob),
            Context::B => DetectionLayer::new(vec![imp.context_b_efficiency(); 4], imp.dark_count_prob),
        };
        Ok(TrialSampler { context, source, detection })
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> TrialRecord {
        let channel = match &self.source {
            Source::Quantum { branches, outcomes } => {
                let b = branches.as_ref().map_or(0, |w| w.sample(rng));
                outcomes[b].sample(rng)
            }
            Source::Hidden(dist) => {
                let a = sample_assignment(dist, rng);
                match self.context {
                    Context::A => assignment_to_detector(&a).index(),
                    Context::B => assignment_to_joint(&a).index(),
                }
            }
        };
        let click = |c: usize| match self.context {
            Context::A => Click::Detector(DetectorId::from_index(c).expect("detector channel")),
            Context::B => Click::Joint(JointOutcome::from_index(c).expect("joint channel")),
        };
        let outcome = match self.detection.resolve(channel, rng) {
            Resolution::NoDetection => Outcome::NoDetection,
            Resolution::Click { channel, dark: true } => Outcome::DarkCount(click(channel)),
            Resolution::Click { channel, dark: false } => match click(channel) {
                Click::Detector(d) => Outcome::Detector(d),
                Click::Joint(j) => Outcome::Joint(j),
            },
        };
        TrialRecord { context: self.context, outcome }
    }
}

fn quantum_source(context: Context, imp: &ImperfectionModel) -> Result<Source, ExperimentError> {
    let source = imp.source_state();
    let arm = apply(&entry_operator(), &source)?;
    let net = build_fig1_network_with(&imp.fig1_params());

    // Pure components of ρ = V|ψ⟩⟨ψ| + (1−V)(P_u|ψ⟩⟨ψ|P_u + P_d|ψ⟩⟨ψ|P_d).
    let mut parts: Vec<(f64, PhotonState, bool)> = vec![(imp.visibility, source, true)];
    for path in [PathLabel::U, PathLabel::D] {
        let comp = arm.path_component(path);
        let w = comp.norm_sqr();
        if w > 0.0 {
            let unit = PhotonState::normalized_from(comp.amps(), comp.frame())?;
            parts.push(((1.0 - imp.visibility) * w, unit, false));
        }
    }
    parts.retain(|(w, _, _)| *w > 0.0);

    let mut weights = Vec::new();
    let mut outcomes = Vec::new();
    for (w, state, at_source) in parts {
        let probs: Vec<f64> = match context {
            // source-frame and arm-frame states enter the network at different ports
            Context::A => propagate(&net, &state)?.probabilities().to_vec(),
            Context::B => {
                let s = if at_source { apply(&entry_operator(), &state)? } else { state };
                context_b_measure(&s)?.to_vec()
            }
        };
        weights.push(w);
        outcomes.push(WeightedIndex::new(probs).map_err(|e| ExperimentError::Internal(e.to_string()))?);
    }
    let branches = if weights.len() > 1 {
        Some(WeightedIndex::new(weights).map_err(|e| ExperimentError::Internal(e.to_string()))?)
    } else {
        None
    };
    Ok(Source::Quantum { branches, outcomes })
}

/// Simulates trial `index` of a run on its own random stream.
pub fn simulate_trial(sampler: &TrialSampler, seed: u64, index: u64) -> TrialRecord {
    let mut rng = trial_rng(seed, sampler.context, index);
    sampler.sample(&mut rng)
}

pub fn run_experiment(
    theory: Theory,
    context: Context,
    imp: &ImperfectionModel,
    trials: u64,
    seed: u64,
) -> Result<CountsTable, ExperimentError> {
    run_experiment_with(theory, context, imp, trials, seed, &ExperimentOptions::default())
}

/// Runs `trials` independent trials. The result depends only on
/// `(theory, context, imp, trials, seed, opts.ensemble)`, never on
/// `opts.workers`.
pub fn run_experiment_with(
    theory: Theory,
    context: Context,
    imp: &ImperfectionModel,
    trials: u64,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<CountsTable, ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::ZeroTrials);
    }
    let sampler = TrialSampler::new(theory, context, imp, opts)?;
    let chunks = trials.div_ceil(CHUNK);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut table = CountsTable::empty(context);
                for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    table.record(&simulate_trial(&sampler, seed, i));
                }
                table
            })
            .reduce(|| CountsTable::empty(context), |a, b| a.merge(&b))
    };
    let table = match opts.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| ExperimentError::Internal(e.to_string()))?
            .install(work),
        None => work(),
    };
    Ok(table)
}

/// Mixed state prepared under the given imperfections, in the arm frame.
pub fn prepared_density(imp: &ImperfectionModel) -> Result<DensityMatrix, ExperimentError> {
    let arm = apply(&entry_operator(), &imp.source_state())?;
    let pure = DensityMatrix::pure(&arm)?;
    let dephased = pure.dephase_path();
    Ok(DensityMatrix::mixture(&[(imp.visibility, pure), (1.0 - imp.visibility, dephased)])?)
}
