//! Data builders, scenarios and the experiment drivers.

pub mod builders;
pub mod report;
pub mod scenario;
pub mod sweep;
pub mod verify;

pub use builders::*;
pub use report::{emit_report, fit_loglog, ExperimentReport, Fit, Provenance, Quantity, Series, Verdict, REPORT_SCHEMA};
pub use scenario::{run_experiment, run_scenario, Run, DiagnosticsSpec, Family, Method, Scenario, ScenarioSpec, SolverSpec};
pub use sweep::{run_shell_sweep, shell_largeness, shell_point, Largeness, ShellPoint, ShellSweepConfig};
pub use verify::{run_all, run_criterion, CriterionOutcome};

pub const CRITERION_PROJECTION: &str = "C01 projection-algebra";
pub const CRITERION_REDUCTION: &str = "C02 reduction-round-trip";
pub const CRITERION_CLOSED_FORM: &str = "C03 closed-form-vs-flow";
pub const CRITERION_CONSERVATION: &str = "C04 free-conservation";
pub const CRITERION_DECAY: &str = "C05 decay-exponents";
pub const CRITERION_REFERENCE: &str = "C06 reference-solver";
pub const CRITERION_PICARD: &str = "C07 picard-small-data";
pub const CRITERION_LOCAL: &str = "C08 local-existence-scaling";
pub const CRITERION_SHELL: &str = "C09 shell-scaling";
pub const CRITERION_MEASURE: &str = "C10 outer-measure";
pub const CRITERION_LORENTZ: &str = "C11 lorentz-choquet-scaling";
pub const CRITERION_EMBEDDING: &str = "C12 embedding-and-atoms";
pub const CRITERION_CLOSED_LOOP: &str = "C13 closed-loop";

pub const CRITERIA: [&str; 13] = [
    CRITERION_PROJECTION,
    CRITERION_REDUCTION,
    CRITERION_CLOSED_FORM,
    CRITERION_CONSERVATION,
    CRITERION_DECAY,
    CRITERION_REFERENCE,
    CRITERION_PICARD,
    CRITERION_LOCAL,
    CRITERION_SHELL,
    CRITERION_MEASURE,
    CRITERION_LORENTZ,
    CRITERION_EMBEDDING,
    CRITERION_CLOSED_LOOP,
];

/// `C^inf` step: 0 for `x <= 0`, 1 for `x >= 1`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}
