//! Run one experiment from a TOML config the way the CLI does and print
//! its checks and summary.

use viana::config::{Experiment, ExperimentConfig};
use viana::report::summary_json;
use viana::runner::run;

const CONFIG: &str = r#"
seed = 11

[system]
alpha = 0.01

[lyapunov]
n = 1000
samples = 100
"#;

fn main() -> viana::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let report = run(&cfg, Experiment::Lyapunov)?;
    for c in &report.checks {
        println!("{}", c.line());
    }
    println!("{}", summary_json(&report, &cfg));
    Ok(())
}
