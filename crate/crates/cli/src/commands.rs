use std::fmt::Write as _;
use std::io;

use photonctx_core::experiment::{
    analytic_prediction, csv, run_inequality, sweep, ExperimentError, ExperimentRow, ImperfectionModel, Theory,
};
use photonctx_core::hilbert::PhotonState;
use photonctx_core::nchv::{
    assignment_to_detector, c_value, check_constraints, contradiction_proof, enumerate_assignments,
};
use photonctx_core::observables::{observable_bounds, verify_eigenstate_relations, JointOutcome};
use photonctx_core::optics::{build_fig1_network, propagate};
use photonctx_core::DetectorId;

use crate::config::{ConfigError, Format, RunConfig};

/// Process exit status for each failure class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const INSUFFICIENT_DATA: u8 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Experiment(ExperimentError::InsufficientData(_)) => exit::INSUFFICIENT_DATA,
            CliError::Experiment(ExperimentError::InvalidParameters(_) | ExperimentError::UnknownParameter(_)) => {
                exit::CONFIG
            }
            CliError::Experiment(_) | CliError::Io { .. } => exit::IO,
        }
    }
}

fn check(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

/// Exact detector distribution of the ideal input, eigenstate residuals and
/// the exact left-hand side.
pub fn cmd_ideal() -> Result<String, CliError> {
    let mut s = String::new();
    let probs = propagate(&build_fig1_network(), &PhotonState::psi0()).map_err(ExperimentError::from)?.probabilities();
    writeln!(s, "Detector probabilities for |a>|+45>:").unwrap();
    for d in DetectorId::ALL {
        writeln!(s, "  {d}  {:.12}", probs[d.index()].abs()).unwrap();
    }
    let r = verify_eigenstate_relations(&PhotonState::psi1()).map_err(ExperimentError::from)?;
    writeln!(s, "\nEigenstate relations for |Psi1>:").unwrap();
    writeln!(s, "  Z1Z2 |Psi1> = +|Psi1>      residual {:.3e}  {}", r.z1z2_residual, check(r.z1z2_holds())).unwrap();
    writeln!(s, "  X1X2 |Psi1> = +|Psi1>      residual {:.3e}  {}", r.x1x2_residual, check(r.x1x2_holds())).unwrap();
    writeln!(
        s,
        "  Z1X2 |Psi1> = -X1Z2 |Psi1>  residual {:.3e}  {}",
        r.anticorrelation_residual,
        check(r.anticorrelation_holds())
    )
    .unwrap();
    let p = analytic_prediction(Theory::Qm, &ImperfectionModel::ideal())?;
    writeln!(s, "\n<Z1Z2> = {:.12}", p.avg_z1z2).unwrap();
    writeln!(s, "<X1X2> = {:.12}", p.avg_x1x2).unwrap();
    writeln!(s, "<Z1X2*X1Z2> = {:.12}", p.avg_product).unwrap();
    writeln!(s, "lhs = {:.12}", p.lhs).unwrap();
    Ok(s)
}

fn sign(v: i32) -> &'static str {
    if v > 0 {
        "+1"
    } else {
        "-1"
    }
}

fn assignment_table(s: &mut String) -> usize {
    writeln!(s, "  Z1 X1 Z2 X2    C   Z1Z2=+1 X1X2=+1 Z1X2=-X1Z2  detector").unwrap();
    let mut satisfying = 0;
    for a in enumerate_assignments() {
        let c = check_constraints(&a);
        satisfying += usize::from(c.all());
        let [z1, x1, z2, x2] = a.values();
        let flag = |b: bool| if b { "yes" } else { "no" };
        writeln!(
            s,
            "  {} {} {} {}  {:+}   {:<7} {:<7} {:<10}  {}",
            sign(z1),
            sign(x1),
            sign(z2),
            sign(x2),
            c_value(&a),
            flag(c.zz),
            flag(c.xx),
            flag(c.anti),
            assignment_to_detector(&a)
        )
        .unwrap();
    }
    satisfying
}

fn summary(s: &mut String, satisfying: usize) {
    let b = observable_bounds();
    writeln!(s, "\nNCHV max = {}", b.nchv_max).unwrap();
    writeln!(s, "QM max = {}", format_max(b.qm_max)).unwrap();
    writeln!(s, "satisfying all constraints = {satisfying}").unwrap();
}

/// The quantum maximum as an integer when it is one to working precision.
fn format_max(x: f64) -> String {
    if (x - x.round()).abs() < 1e-10 {
        format!("{}", x.round())
    } else {
        format!("{x:.12}")
    }
}

pub fn cmd_nchv_enumerate() -> String {
    let mut s = String::new();
    let n = assignment_table(&mut s);
    summary(&mut s, n);
    s
}

pub fn cmd_bounds() -> String {
    let mut s = String::new();
    let n = assignment_table(&mut s);
    summary(&mut s, n);
    let b = observable_bounds();
    let v = b.qm_eigenvector.amps();
    // report the eigenvector with its first nonzero amplitude made real and positive
    let pivot = v.iter().copied().find(|a| a.norm() > 1e-9).unwrap_or_default();
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { pivot };
    let shown: Vec<String> = v.iter().map(|a| format!("{:+.6}", (a * phase).re)).collect();
    writeln!(s, "QM maximizer (u H, u V, d H, d V) = ({})", shown.join(", ")).unwrap();
    writeln!(s, "{}", contradiction_proof().explanation()).unwrap();
    s
}

fn row_table(s: &mut String, row: &ExperimentRow) {
    let r = &row.report;
    writeln!(s, "theory           {}", row.theory).unwrap();
    writeln!(s, "trials/context   {}", row.trials).unwrap();
    writeln!(s, "seed             {}", row.seed).unwrap();
    if let Some((p, v)) = &row.param {
        writeln!(s, "{p} = {v}").unwrap();
    }
    writeln!(s, "context A counts").unwrap();
    for d in DetectorId::ALL {
        writeln!(s, "  {d}  {}", row.counts_a.context_a[d.index()]).unwrap();
    }
    writeln!(s, "context B counts").unwrap();
    for o in JointOutcome::ALL {
        writeln!(s, "  {o}  {}", row.counts_b.context_b[o.index()]).unwrap();
    }
    writeln!(s, "no detection     A {}  B {}", row.counts_a.no_detection, row.counts_b.no_detection).unwrap();
    writeln!(s, "dark clicks      A {}  B {}", row.counts_a.dark, row.counts_b.dark).unwrap();
    writeln!(s, "<Z1Z2>           {:.6} +/- {:.6}", r.avg_z1z2, r.se_z1z2).unwrap();
    writeln!(s, "<X1X2>           {:.6} +/- {:.6}", r.avg_x1x2, r.se_x1x2).unwrap();
    writeln!(s, "<Z1X2*X1Z2>      {:.6} +/- {:.6}", r.avg_product, r.se_product).unwrap();
    writeln!(s, "lhs              {:.6} +/- {:.6}", r.lhs, r.lhs_se).unwrap();
    writeln!(s, "violation        {:.2} sigma", r.violation_sigma).unwrap();
    writeln!(s, "exact lhs        {:.6}", row.exact.lhs).unwrap();
}

fn sweep_table(s: &mut String, rows: &[ExperimentRow], param: &str) {
    writeln!(s, "{:>14}  {:>10}  {:>10}  {:>10}  {:>10}", param, "lhs", "lhs_se", "sigma", "exact").unwrap();
    for row in rows {
        let v = row.param.as_ref().map_or(f64::NAN, |p| p.1);
        let r = &row.report;
        writeln!(
            s,
            "{:>14}  {:>10.6}  {:>10.6}  {:>10.2}  {:>10.6}",
            csv::format_real(v),
            r.lhs,
            r.lhs_se,
            r.violation_sigma,
            row.exact.lhs
        )
        .unwrap();
    }
}

fn seed_of(cfg: &RunConfig) -> u64 {
    cfg.seed.expect("validated config carries a seed")
}

pub fn cmd_run(cfg: &RunConfig) -> Result<String, CliError> {
    let row = run_inequality(cfg.theory, &cfg.imperfection, cfg.trials, seed_of(cfg), &cfg.options())?;
    let rows = [row];
    match cfg.format {
        Format::Csv => Ok(csv::to_string(&rows)?),
        Format::Table => {
            let mut s = String::new();
            row_table(&mut s, &rows[0]);
            Ok(s)
        }
    }
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let param = cfg.sweep_param.as_deref().expect("validated sweep has a parameter");
    let rows =
        sweep(cfg.theory, &cfg.imperfection, param, &cfg.sweep_values, cfg.trials, seed_of(cfg), &cfg.options())?;
    match cfg.format {
        Format::Csv => Ok(csv::to_string(&rows)?),
        Format::Table => {
            let mut s = String::new();
            sweep_table(&mut s, &rows, param);
            Ok(s)
        }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    use crate::config::Command;
    match cfg.command {
        Command::Ideal => cmd_ideal(),
        Command::Bounds => Ok(cmd_bounds()),
        Command::NchvEnumerate => Ok(cmd_nchv_enumerate()),
        Command::Run => cmd_run(cfg),
        Command::Sweep => cmd_sweep(cfg),
    }
}
