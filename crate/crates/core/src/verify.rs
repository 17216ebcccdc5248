//! The acceptance battery: the runner's experiments at reference parameters,
//! grouped into numbered criteria, plus a cross-worker determinism check.

use std::str::FromStr;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{Error, Result};
use crate::report::{summary_json, Check, ExperimentReport, Table};
use crate::row;
use crate::runner::run;
use crate::sampling::Workers;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Fast,
    Full,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Suite::Fast),
            "full" => Ok(Suite::Full),
            other => Err(Error::Config(format!("unknown suite tag {other:?}; expected fast or full"))),
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Fast => "fast",
            Suite::Full => "full",
        }
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub experiment: Experiment,
    /// Check-name prefixes that make up the criterion.
    pub checks: &'static [&'static str],
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "curve preservation", experiment: Experiment::Curves, checks: &["preservation."] },
    Criterion { id: 2, name: "transversality", experiment: Experiment::Curves, checks: &["transversality."] },
    Criterion { id: 3, name: "strip measures", experiment: Experiment::Curves, checks: &["strip."] },
    Criterion { id: 4, name: "distortion and Gibbs", experiment: Experiment::Curves, checks: &["distortion."] },
    Criterion { id: 5, name: "displacement partitions", experiment: Experiment::Curves, checks: &["displacement."] },
    Criterion { id: 6, name: "deep-return tail", experiment: Experiment::Recurrence, checks: &["deep_tail."] },
    Criterion { id: 7, name: "positive exponents", experiment: Experiment::Lyapunov, checks: &["lyapunov."] },
    Criterion { id: 8, name: "NUE and SR tails", experiment: Experiment::Recurrence, checks: &["first_times."] },
    Criterion {
        id: 9,
        name: "SRB statistics",
        experiment: Experiment::Density,
        checks: &["density.chebyshev_l1", "correlations.", "ldp.", "clt."],
    },
    Criterion { id: 10, name: "fibered hyperbolic", experiment: Experiment::Fibered, checks: &["fibered."] },
    Criterion { id: 11, name: "coexistence", experiment: Experiment::Coexistence, checks: &["coexistence."] },
];

pub const DETERMINISM: (u8, &str) = (12, "determinism");

const EXPERIMENTS: [Experiment; 9] = [
    Experiment::Curves,
    Experiment::Recurrence,
    Experiment::Lyapunov,
    Experiment::Density,
    Experiment::Correlations,
    Experiment::Ldp,
    Experiment::Clt,
    Experiment::Fibered,
    Experiment::Coexistence,
];

/// Reference config for a suite. The full suite uses the default sizes;
/// the fast suite shrinks the curve and Monte Carlo counts.
pub fn suite_config(seed: u64, suite: Suite) -> ExperimentConfig {
    let mut c = ExperimentConfig { seed, ..ExperimentConfig::default() };
    if suite == Suite::Fast {
        c.curves.count = 20;
        c.curves.nodes = 20_000;
        c.curves.strip_triples = 100;
        c.curves.max_j = 4;
        c.curves.displacement_curves = 20;
        c.curves.itineraries = 50;
        c.recurrence.alpha_ladder = vec![1e-2, 1e-3];
        c.recurrence.ladder_samples = 200;
        c.recurrence.samples = 200;
        c.recurrence.tail_nodes = 50_000;
        c.lyapunov.n = 2000;
        c.lyapunov.samples = 200;
        c.density.n = 5000;
        c.density.samples = 40;
        c.correlations.n = 5000;
        c.correlations.samples = 20;
        c.clt.n = 2000;
        c.fibered.samples = 200;
        c.fibered.invariance_samples = 20;
        c.coexistence.n = 2000;
        c.coexistence.samples = 200;
    }
    c
}

/// Which criterion a check belongs to, if any.
pub fn criterion_of(check: &str) -> Option<u8> {
    CRITERIA.iter().find(|c| c.checks.iter().any(|p| check.starts_with(p))).map(|c| c.id)
}

/// Serialized outputs of a report, as the CLI would write them.
pub fn serialized(report: &ExperimentReport, cfg: &ExperimentConfig) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::with_capacity(report.tables.len() + 1);
    for t in &report.tables {
        out.push((format!("{}_{}.csv", report.experiment, t.name), t.to_csv()?));
    }
    out.push((format!("{}_summary.json", report.experiment), summary_json(report, cfg).into_bytes()));
    Ok(out)
}

/// Criteria 1-11 on the ambient worker pool.
pub fn battery(cfg: &ExperimentConfig, suite: Suite) -> Result<ExperimentReport> {
    let mut checks = Table::new("checks", &["criterion", "experiment", "name", "estimate", "tolerance", "pass"]);
    let mut supplementary = Table::new("supplementary", &["experiment", "name", "estimate", "tolerance", "pass"]);
    let mut grouped: Vec<Vec<Check>> = vec![Vec::new(); CRITERIA.len()];
    for exp in EXPERIMENTS {
        let rep = run(cfg, exp)?;
        for c in rep.checks {
            match criterion_of(&c.name) {
                Some(id) => {
                    checks.push(row![id, exp.name(), c.name, c.estimate, c.tolerance, c.pass]);
                    grouped[usize::from(id) - 1].push(c);
                }
                None => supplementary.push(row![exp.name(), c.name, c.estimate, c.tolerance, c.pass]),
            }
        }
    }
    let mut out = ExperimentReport::new("verify");
    let mut criteria = Table::new("criteria", &["criterion", "name", "pass", "checks", "failed"]);
    for (crit, cs) in CRITERIA.iter().zip(&grouped) {
        let failed = cs.iter().filter(|c| !c.pass).count();
        // An empty criterion means the battery lost a check, which is a failure.
        let pass = !cs.is_empty() && failed == 0;
        criteria.push(row![crit.id, crit.name, pass, cs.len(), failed]);
        out.checks.push(Check::new(
            &format!("criterion.{}", crit.id),
            crit.experiment.name(),
            crit.name,
            cs.len() as f64 - failed as f64,
            cs.len() as f64,
            pass,
        ));
    }
    out.tables.extend([criteria, checks, supplementary]);
    out.result("suite", suite.name());
    Ok(out)
}

/// Runs the fast battery on one and on eight workers and compares every
/// serialized byte. Returns the one-worker report and the check.
pub fn determinism(seed: u64) -> Result<(ExperimentReport, Check)> {
    let cfg = suite_config(seed, Suite::Fast);
    let pool = |n: usize| Workers::new(n).map_err(|e| Error::Config(format!("worker pool: {e}")));
    let one = pool(1)?.install(|| battery(&cfg, Suite::Fast))?;
    let eight = pool(8)?.install(|| battery(&cfg, Suite::Fast))?;
    let (a, b) = (serialized(&one, &cfg)?, serialized(&eight, &cfg)?);
    let differing = if a.len() == b.len() { a.iter().zip(&b).filter(|(x, y)| x != y).count() } else { a.len().max(b.len()) };
    let check = Check::at_most(
        &format!("criterion.{}", DETERMINISM.0),
        "verify_all",
        "fast battery byte-identical on 1 and 8 workers",
        differing as f64,
        0.0,
    );
    Ok((one, check))
}

/// All twelve criteria. The fast suite reuses the one-worker run of the
/// determinism check as its result.
pub fn verify_all(seed: u64, suite: Suite) -> Result<(ExperimentConfig, ExperimentReport)> {
    let cfg = suite_config(seed, suite);
    let (fast, det) = determinism(seed)?;
    let mut rep = match suite {
        Suite::Fast => fast,
        Suite::Full => battery(&cfg, suite)?,
    };
    if let Some(t) = rep.tables.iter_mut().find(|t| t.name == "criteria") {
        t.push(row![DETERMINISM.0, DETERMINISM.1, det.pass, 1, usize::from(!det.pass)]);
    }
    rep.checks.push(det);
    Ok((cfg, rep))
}
