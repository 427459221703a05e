//! Optical elements, the interferometer network and exact propagation.
//!
//! A network is a set of nodes joined by directed edges between numbered
//! ports. Every port carries one spatial mode with a polarization 2-vector in
//! rectilinear components. Port conventions:
//!
//! | element        | inputs            | outputs                          |
//! |----------------|-------------------|----------------------------------|
//! | `Source`       | –                 | `out0` = a, `out1` = b           |
//! | `PolarizingBs` | `in0`, `in1`      | `out0` transmitted side of `in0`, `out1` reflected side of `in0` (roles swap for `in1`) |
//! | `BalancedBs`   | `in0` = u, `in1` = d | `out0` = u′, `out1` = d′       |
//! | `PhaseShift`, `Attenuator` | `in0` | `out0`                           |
//! | `Detector`     | `in0`             | –                                |
//!
//! Input ports may be left unconnected (vacuum). Every output port of a
//! non-detector element must feed exactly one input port.
//!
//! [`OpticalNetwork::dump`] writes the adjacency listing, one edge per line
//! as `NODE.outK -> NODE.inK`, in insertion order.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, SMatrix};
use thiserror::Error;

use crate::hilbert::{
    Complex, Frame, HilbertError, Operator4, PathFrame, PathLabel, PhotonState, PolFrame, PolLabel, EXACT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorId {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
    D8,
}

impl DetectorId {
    pub const ALL: [DetectorId; 8] = [
        DetectorId::D1,
        DetectorId::D2,
        DetectorId::D3,
        DetectorId::D4,
        DetectorId::D5,
        DetectorId::D6,
        DetectorId::D7,
        DetectorId::D8,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.index() + 1)
    }
}

impl FromStr for DetectorId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('D')
            .and_then(|n| n.parse::<usize>().ok())
            .and_then(|n| n.checked_sub(1))
            .and_then(Self::from_index)
            .ok_or_else(|| format!("unknown detector `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementKind {
    Source,
    /// Transmits the `transmit` component and reflects the orthogonal one,
    /// multiplied by `reflection_phase`.
    PolarizingBs {
        split_basis: PolFrame,
        transmit: PolLabel,
        reflection_phase: Complex,
    },
    /// Polarization-independent splitter with intensity transmittance `T`:
    /// `u → √T u′ + √(1−T) d′`, `d → √(1−T) u′ − √T d′`.
    BalancedBs {
        transmittance: f64,
    },
    PhaseShift {
        phi: f64,
    },
    /// Lossy element scaling intensity by `transmission`.
    Attenuator {
        transmission: f64,
    },
    /// Registers the amplitude of the `pol` component of its input mode.
    Detector {
        id: DetectorId,
        pol: PolLabel,
    },
}

impl ElementKind {
    /// Polarizing splitter with real reflection coefficient +1.
    pub fn pbs(transmit: PolLabel) -> Self {
        ElementKind::PolarizingBs { split_basis: transmit.frame(), transmit, reflection_phase: Complex::ONE }
    }

    pub fn balanced() -> Self {
        ElementKind::BalancedBs { transmittance: 0.5 }
    }

    pub fn inputs(&self) -> usize {
        match self {
            ElementKind::Source => 0,
            ElementKind::PolarizingBs { .. } | ElementKind::BalancedBs { .. } => 2,
            _ => 1,
        }
    }

    pub fn outputs(&self) -> usize {
        match self {
            ElementKind::Source | ElementKind::PolarizingBs { .. } | ElementKind::BalancedBs { .. } => 2,
            ElementKind::Detector { .. } => 0,
            _ => 1,
        }
    }

    pub fn is_polarizing(&self) -> bool {
        matches!(self, ElementKind::PolarizingBs { .. })
    }

    pub fn is_balanced(&self) -> bool {
        matches!(self, ElementKind::BalancedBs { .. })
    }
}

pub type NodeId = usize;
pub type PolVec = [Complex; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PortRef {
    pub node: NodeId,
    pub port: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub name: String,
    pub kind: ElementKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: PortRef,
    pub to: PortRef,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("invalid network: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Issue>),
    #[error("states in the {0:?} path frame cannot be injected")]
    NotInjectable(PathFrame),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// A single problem found while validating a network.
#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    PortOutOfRange { node: String, port: usize, output: bool },
    InputFedTwice { node: String, port: usize },
    OutputUsedTwice { node: String, port: usize },
    DanglingOutput { node: String, port: usize },
    UnfedDetector { node: String },
    Cycle { nodes: Vec<String> },
    SourceCount(usize),
    DetectorCount(usize),
    DuplicateDetector(DetectorId),
    LabelOutsideBasis { node: String },
    NotConserving { probe: usize, deficit: f64 },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::PortOutOfRange { node, port, output } => {
                let dir = if *output { "out" } else { "in" };
                write!(f, "{node}.{dir}{port} does not exist")
            }
            Issue::InputFedTwice { node, port } => write!(f, "{node}.in{port} is fed by more than one edge"),
            Issue::OutputUsedTwice { node, port } => write!(f, "{node}.out{port} feeds more than one edge"),
            Issue::DanglingOutput { node, port } => write!(f, "{node}.out{port} is not connected"),
            Issue::UnfedDetector { node } => write!(f, "detector {node} has no incoming edge"),
            Issue::Cycle { nodes } => write!(f, "cycle through {}", nodes.join(", ")),
            Issue::SourceCount(n) => write!(f, "expected exactly one source, found {n}"),
            Issue::DetectorCount(n) => write!(f, "expected 8 detectors, found {n}"),
            Issue::DuplicateDetector(d) => write!(f, "detector {d} appears more than once"),
            Issue::LabelOutsideBasis { node } => write!(f, "{node}: transmit label outside its split basis"),
            Issue::NotConserving { probe, deficit } => {
                write!(f, "probability not conserved for basis input {probe} (deficit {deficit:e})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
    /// Largest `1 − Σ|amp|²` over the four basis probes (0 if not probed).
    pub max_deficit: f64,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Complex amplitudes at D1..D8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorAmplitudes {
    pub amp: [Complex; 8],
}

impl DetectorAmplitudes {
    pub fn probabilities(&self) -> [f64; 8] {
        self.amp.map(|a| a.norm_sqr())
    }

    pub fn total(&self) -> f64 {
        self.probabilities().iter().sum()
    }

    pub fn get(&self, d: DetectorId) -> Complex {
        self.amp[d.index()]
    }
}

/// Tunable knobs of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1Params {
    /// Phases on the four arms, ordered as [`ARM_NAMES`].
    pub arm_phases: [f64; 4],
    /// Intensity transmittance of S1 and S2.
    pub transmittance: [f64; 2],
    /// Reflection coefficient shared by all polarizing splitters.
    pub reflection_phase: Complex,
}

impl Default for Fig1Params {
    fn default() -> Self {
        Fig1Params { arm_phases: [0.0; 4], transmittance: [0.5; 2], reflection_phase: Complex::ONE }
    }
}

/// Arms between the diagonal splitters and the balanced splitters.
pub const ARM_NAMES: [&str; 4] = ["PS1-S1", "PS2-S1", "PS1-S2", "PS2-S2"];

/// 2×2 path transform of a splitter with intensity transmittance `t`,
/// columns indexed by input mode (u, d), rows by output mode (u′, d′).
pub fn splitter_matrix(t: f64) -> Matrix2<Complex> {
    let a = Complex::new(t.sqrt(), 0.0);
    let b = Complex::new((1.0 - t).sqrt(), 0.0);
    Matrix2::new(a, b, b, -a)
}

/// Applies a splitter to the polarization vectors carried by its two inputs,
/// identically for both polarization components.
pub fn balanced_bs(transmittance: f64, u: PolVec, d: PolVec) -> (PolVec, PolVec) {
    let m = splitter_matrix(transmittance);
    let out = |row: usize| -> PolVec { std::array::from_fn(|k| m[(row, 0)] * u[k] + m[(row, 1)] * d[k]) };
    (out(0), out(1))
}

fn project(label: PolLabel, v: PolVec) -> Complex {
    let e = label.rectilinear_vector();
    e[0].conj() * v[0] + e[1].conj() * v[1]
}

fn along(label: PolLabel, amp: Complex) -> PolVec {
    label.rectilinear_vector().map(|c| c * amp)
}

/// Splits one input mode into its transmitted and reflected parts.
pub fn polarizing_bs(transmit: PolLabel, reflection_phase: Complex, input: PolVec) -> (PolVec, PolVec) {
    let reflect = transmit.orthogonal();
    let t = along(transmit, project(transmit, input));
    let r = along(reflect, reflection_phase * project(reflect, input));
    (t, r)
}

/// The entry splitter (rectilinear, transmitting →) as a map from the source
/// ports `(a, b)` to the arms `(u, d)`.
pub fn entry_operator() -> Operator4 {
    let mut m = nalgebra::Matrix4::zeros();
    let one = Complex::ONE;
    // a→ to u→, a↑ to d↑, b→ to d→, b↑ to u↑
    m[(0, 0)] = one;
    m[(3, 1)] = one;
    m[(2, 2)] = one;
    m[(1, 3)] = one;
    Operator4::mapping(m, Frame::SOURCE, Frame::CANONICAL)
}

fn zero_vec() -> PolVec {
    [Complex::ZERO; 2]
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OpticalNetwork {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

struct Topology {
    order: Vec<NodeId>,
    /// `(node, output port)` → destination input port.
    downstream: HashMap<(NodeId, usize), PortRef>,
}

impl OpticalNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>, kind: ElementKind) -> NodeId {
        self.nodes.push(Node { name: name.into(), kind });
        self.nodes.len() - 1
    }

    pub fn connect(&mut self, from: NodeId, from_port: usize, to: NodeId, to_port: usize) {
        self.edges
            .push(Edge { from: PortRef { node: from, port: from_port }, to: PortRef { node: to, port: to_port } });
    }

    /// Removes every edge ending at the given node.
    pub fn disconnect_inputs(&mut self, node: NodeId) {
        self.edges.retain(|e| e.to.node != node);
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn count(&self, pred: impl Fn(&ElementKind) -> bool) -> usize {
        self.nodes.iter().filter(|n| pred(&n.kind)).count()
    }

    pub fn detector_node(&self, id: DetectorId) -> Option<NodeId> {
        self.nodes.iter().position(|n| matches!(n.kind, ElementKind::Detector { id: d, .. } if d == id))
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            out.push_str(&format!(
                "{}.out{} -> {}.in{}\n",
                self.nodes[e.from.node].name, e.from.port, self.nodes[e.to.node].name, e.to.port
            ));
        }
        out
    }

    fn name(&self, id: NodeId) -> String {
        self.nodes.get(id).map(|n| n.name.clone()).unwrap_or_else(|| format!("#{id}"))
    }

    fn structural_issues(&self) -> (Vec<Issue>, Option<Topology>) {
        let mut issues = Vec::new();
        let mut downstream = HashMap::new();
        let mut fed = HashMap::new();

        for e in &self.edges {
            let mut ok = true;
            for (p, output) in [(e.from, true), (e.to, false)] {
                let limit = self.nodes.get(p.node).map(|n| if output { n.kind.outputs() } else { n.kind.inputs() });
                if limit.is_none_or(|l| p.port >= l) {
                    issues.push(Issue::PortOutOfRange { node: self.name(p.node), port: p.port, output });
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            if downstream.insert((e.from.node, e.from.port), e.to).is_some() {
                issues.push(Issue::OutputUsedTwice { node: self.name(e.from.node), port: e.from.port });
            }
            if fed.insert((e.to.node, e.to.port), e.from).is_some() {
                issues.push(Issue::InputFedTwice { node: self.name(e.to.node), port: e.to.port });
            }
        }

        let mut sources = 0;
        let mut detectors = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            match node.kind {
                ElementKind::Source => sources += 1,
                ElementKind::Detector { id: d, .. } => {
                    if detectors.contains(&d) {
                        issues.push(Issue::DuplicateDetector(d));
                    }
                    detectors.push(d);
                    if !fed.contains_key(&(id, 0)) {
                        issues.push(Issue::UnfedDetector { node: node.name.clone() });
                    }
                }
                ElementKind::PolarizingBs { split_basis, transmit, .. } if transmit.frame() != split_basis => {
                    issues.push(Issue::LabelOutsideBasis { node: node.name.clone() });
                }
                _ => {}
            }
            for port in 0..node.kind.outputs() {
                if !downstream.contains_key(&(id, port)) {
                    issues.push(Issue::DanglingOutput { node: node.name.clone(), port });
                }
            }
        }
        if sources != 1 {
            issues.push(Issue::SourceCount(sources));
        }
        if detectors.len() != 8 {
            issues.push(Issue::DetectorCount(detectors.len()));
        }

        // Kahn's algorithm over node-level edges.
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for (&(from, _), to) in &downstream {
            succ[from].push(to.node);
            indegree[to.node] += 1;
        }
        let mut queue: VecDeque<NodeId> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &succ[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        if order.len() < n {
            let mut nodes: Vec<String> = (0..n).filter(|&i| indegree[i] > 0).map(|i| self.name(i)).collect();
            nodes.sort();
            issues.push(Issue::Cycle { nodes });
        }

        let topo = issues.is_empty().then_some(Topology { order, downstream });
        (issues, topo)
    }

    fn topology(&self) -> Result<Topology, NetworkError> {
        match self.structural_issues() {
            (_, Some(t)) => Ok(t),
            (issues, None) => Err(NetworkError::Invalid(issues)),
        }
    }

    /// Node fed by the source's first output.
    fn entry_node(&self, topo: &Topology) -> Option<NodeId> {
        let src = self.nodes.iter().position(|n| n.kind == ElementKind::Source)?;
        topo.downstream.get(&(src, 0)).map(|p| p.node)
    }

    fn run(
        &self,
        topo: &Topology,
        emission: Option<(PolVec, PolVec)>,
        injections: &[(PortRef, PolVec)],
    ) -> DetectorAmplitudes {
        let mut inputs: Vec<Vec<PolVec>> = self.nodes.iter().map(|n| vec![zero_vec(); n.kind.inputs()]).collect();
        for (p, v) in injections {
            let slot = &mut inputs[p.node][p.port];
            for k in 0..2 {
                slot[k] += v[k];
            }
        }
        let mut amp = [Complex::ZERO; 8];

        for &id in &topo.order {
            let ins = std::mem::take(&mut inputs[id]);
            let outs: Vec<PolVec> = match self.nodes[id].kind {
                ElementKind::Source => {
                    let (a, b) = emission.unwrap_or((zero_vec(), zero_vec()));
                    vec![a, b]
                }
                ElementKind::PolarizingBs { transmit, reflection_phase, .. } => {
                    let (t0, r0) = polarizing_bs(transmit, reflection_phase, ins[0]);
                    let (t1, r1) = polarizing_bs(transmit, reflection_phase, ins[1]);
                    vec![[t0[0] + r1[0], t0[1] + r1[1]], [r0[0] + t1[0], r0[1] + t1[1]]]
                }
                ElementKind::BalancedBs { transmittance } => {
                    let (u, d) = balanced_bs(transmittance, ins[0], ins[1]);
                    vec![u, d]
                }
                ElementKind::PhaseShift { phi } => {
                    let z = Complex::from_polar(1.0, phi);
                    vec![ins[0].map(|c| c * z)]
                }
                ElementKind::Attenuator { transmission } => {
                    let k = Complex::new(transmission.sqrt(), 0.0);
                    vec![ins[0].map(|c| c * k)]
                }
                ElementKind::Detector { id: d, pol } => {
                    amp[d.index()] = project(pol, ins[0]);
                    vec![]
                }
            };
            for (port, v) in outs.into_iter().enumerate() {
                let to = topo.downstream[&(id, port)];
                let slot = &mut inputs[to.node][to.port];
                for k in 0..2 {
                    slot[k] += v[k];
                }
            }
        }
        DetectorAmplitudes { amp }
    }

    /// Injects polarization vectors directly into element input ports.
    pub fn propagate_from(&self, injections: &[(PortRef, PolVec)]) -> Result<DetectorAmplitudes, NetworkError> {
        let topo = self.topology()?;
        Ok(self.run(&topo, None, injections))
    }

    /// Transfer matrix from the given path frame (rectilinear polarization)
    /// to the eight detector amplitudes; column `j` is the response to
    /// canonical basis state `j`.
    pub fn transfer_matrix(&self, path: PathFrame) -> Result<SMatrix<Complex, 8, 4>, NetworkError> {
        let mut t = SMatrix::<Complex, 8, 4>::zeros();
        for j in 0..4 {
            let out = propagate(self, &PhotonState::basis(j, Frame::new(path, PolFrame::Rectilinear)))?;
            for i in 0..8 {
                t[(i, j)] = out.amp[i];
            }
        }
        Ok(t)
    }
}

/// Builds the interferometer with ideal parameters.
pub fn build_fig1_network() -> OpticalNetwork {
    build_fig1_network_with(&Fig1Params::default())
}

/// Builds the interferometer: source → PS0; PS0's arms u, d → PS1 (+45°),
/// PS2 (−45°); transmitted ports → S2, reflected ports → S1 (each through an
/// arm phase); splitter outputs → PS3..PS6 → D1..D8.
pub fn build_fig1_network_with(params: &Fig1Params) -> OpticalNetwork {
    let mut net = OpticalNetwork::new();
    let pbs = |transmit| ElementKind::PolarizingBs {
        split_basis: PolLabel::frame(transmit),
        transmit,
        reflection_phase: params.reflection_phase,
    };
    let src = net.add_node("SRC", ElementKind::Source);
    let ps0 = net.add_node("PS0", pbs(PolLabel::H));
    let ps1 = net.add_node("PS1", pbs(PolLabel::P));
    let ps2 = net.add_node("PS2", pbs(PolLabel::M));
    let arms: [NodeId; 4] = std::array::from_fn(|k| {
        net.add_node(format!("PH:{}", ARM_NAMES[k]), ElementKind::PhaseShift { phi: params.arm_phases[k] })
    });
    let s1 = net.add_node("S1", ElementKind::BalancedBs { transmittance: params.transmittance[0] });
    let s2 = net.add_node("S2", ElementKind::BalancedBs { transmittance: params.transmittance[1] });
    let analysers: [NodeId; 4] = std::array::from_fn(|k| net.add_node(format!("PS{}", k + 3), pbs(PolLabel::H)));
    let detectors: [NodeId; 8] = std::array::from_fn(|k| {
        let id = DetectorId::ALL[k];
        let pol = if k % 2 == 0 { PolLabel::H } else { PolLabel::V };
        net.add_node(id.to_string(), ElementKind::Detector { id, pol })
    });

    net.connect(src, 0, ps0, 0);
    net.connect(src, 1, ps0, 1);
    net.connect(ps0, 0, ps1, 0);
    net.connect(ps0, 1, ps2, 0);
    // reflected parts go to S1, transmitted parts to S2
    net.connect(ps1, 1, arms[0], 0);
    net.connect(ps2, 1, arms[1], 0);
    net.connect(ps1, 0, arms[2], 0);
    net.connect(ps2, 0, arms[3], 0);
    net.connect(arms[0], 0, s1, 0);
    net.connect(arms[1], 0, s1, 1);
    net.connect(arms[2], 0, s2, 0);
    net.connect(arms[3], 0, s2, 1);
    net.connect(s1, 0, analysers[0], 0);
    net.connect(s1, 1, analysers[1], 0);
    net.connect(s2, 0, analysers[2], 0);
    net.connect(s2, 1, analysers[3], 0);
    for (k, &a) in analysers.iter().enumerate() {
        net.connect(a, 0, detectors[2 * k], 0);
        net.connect(a, 1, detectors[2 * k + 1], 0);
    }
    net
}

/// Propagates a normalized state to the detectors.
///
/// Source-frame states enter through the source ports `a`, `b`; arm-frame
/// states are injected into the elements fed by the entry splitter's `u` and
/// `d` outputs.
pub fn propagate(net: &OpticalNetwork, input: &PhotonState) -> Result<DetectorAmplitudes, NetworkError> {
    let state = match input.frame().pol {
        PolFrame::Rectilinear => input.clone(),
        PolFrame::Diagonal => crate::hilbert::polarization_basis_change(input, PolFrame::Rectilinear)?,
    };
    let topo = net.topology()?;
    let u = state.pol_on(PathLabel::U);
    let d = state.pol_on(PathLabel::D);
    match state.frame().path {
        PathFrame::Source => Ok(net.run(&topo, Some((u, d)), &[])),
        PathFrame::Arm => {
            let entry = net.entry_node(&topo).ok_or(NetworkError::NotInjectable(PathFrame::Arm))?;
            let to_u = *topo.downstream.get(&(entry, 0)).ok_or(NetworkError::NotInjectable(PathFrame::Arm))?;
            let to_d = *topo.downstream.get(&(entry, 1)).ok_or(NetworkError::NotInjectable(PathFrame::Arm))?;
            Ok(net.run(&topo, None, &[(to_u, u), (to_d, d)]))
        }
        PathFrame::Exit => Err(NetworkError::NotInjectable(PathFrame::Exit)),
    }
}

/// Structural checks plus a probability-conservation probe with the four
/// source basis states.
pub fn validate_network(net: &OpticalNetwork) -> ValidationReport {
    let (mut issues, topo) = net.structural_issues();
    let mut max_deficit = 0.0;
    if let Some(topo) = topo {
        let mut worst: Option<(usize, f64)> = None;
        for j in 0..4 {
            let mut a = [Complex::ZERO; 2];
            let mut b = [Complex::ZERO; 2];
            if j < 2 {
                a[j] = Complex::ONE;
            } else {
                b[j - 2] = Complex::ONE;
            }
            let deficit = 1.0 - net.run(&topo, Some((a, b)), &[]).total();
            if worst.is_none_or(|(_, w)| deficit.abs() > w.abs()) {
                worst = Some((j, deficit));
            }
        }
        if let Some((probe, deficit)) = worst {
            max_deficit = deficit;
            if deficit.abs() > EXACT_TOL {
                issues.push(Issue::NotConserving { probe, deficit });
            }
        }
    }
    ValidationReport { issues, max_deficit }
}
