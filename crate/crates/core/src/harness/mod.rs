//! Scenario runner: seeded property suites, reports, and certificates.
//!
//! A scenario fixes the dimension, the scalar backend, the master seed, the
//! per-suite trial counts, and the tolerance; a run executes the selected
//! suites and produces a report that is byte-identical across reruns of the
//! same build — every trial derives its generator from (seed, suite, index),
//! so results do not depend on scheduling. Wall-clock timing is deliberately
//! not part of the report; the CLI prints it to stderr instead.

pub mod certificate;
pub mod sampler;
pub mod suites;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prng::SplitMix64;
use crate::scalar::{set_tolerance, Exact};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("certification requires the exact backend")]
    CertifyNeedsExact,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Quaternion,
    Linalg,
    Model,
    Isometry,
    Mostow,
    Fan,
    Starlike,
}

impl SuiteKind {
    pub fn all() -> Vec<SuiteKind> {
        use SuiteKind::*;
        vec![Quaternion, Linalg, Model, Isometry, Mostow, Fan, Starlike]
    }

    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Quaternion => "quaternion",
            SuiteKind::Linalg => "linalg",
            SuiteKind::Model => "model",
            SuiteKind::Isometry => "isometry",
            SuiteKind::Mostow => "mostow",
            SuiteKind::Fan => "fan",
            SuiteKind::Starlike => "starlike",
        }
    }
}

/// Per-suite trial counts. The defaults keep a full run near a second; the
/// acceptance suite raises them to the certified volumes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Trials {
    pub quaternion: usize,
    pub linalg: usize,
    pub model: usize,
    pub isometry: usize,
    pub mostow_spine: usize,
    pub mostow_fibers: usize,
    pub mostow_reverse: usize,
    pub spine_rebuilds: usize,
    pub spine_samples: usize,
    pub fan_points: usize,
    pub fan_blade_samples: usize,
    pub fan_pairs: usize,
    pub starlike_pairs: usize,
    pub starlike_steps: usize,
}

impl Default for Trials {
    fn default() -> Self {
        Trials {
            quaternion: 200,
            linalg: 48,
            model: 96,
            isometry: 12,
            mostow_spine: 32,
            mostow_fibers: 4,
            mostow_reverse: 48,
            spine_rebuilds: 4,
            spine_samples: 16,
            fan_points: 6,
            fan_blade_samples: 12,
            fan_pairs: 2,
            starlike_pairs: 4,
            starlike_steps: 8,
        }
    }
}

fn default_n() -> usize {
    2
}
fn default_seed() -> u64 {
    1
}
fn default_tolerance() -> f64 {
    1e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub trials: Trials,
    #[serde(default = "SuiteKind::all")]
    pub suites: Vec<SuiteKind>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            n: default_n(),
            backend: Backend::Exact,
            seed: default_seed(),
            tolerance: default_tolerance(),
            trials: Trials::default(),
            suites: SuiteKind::all(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(1..=8).contains(&self.n) {
            return Err(HarnessError::InvalidScenario(format!(
                "n: {} out of range 1..=8",
                self.n
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(HarnessError::InvalidScenario(format!(
                "tolerance: {} must be positive",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn root_rng(&self) -> SplitMix64 {
        SplitMix64::new(self.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    /// Largest relative residual observed (float backend; zero when exact).
    pub max_residual: f64,
    /// First few failing witnesses, as human-readable one-liners.
    pub violations: Vec<String>,
    /// Informational notes (vacuous runs, recorded counterexamples).
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub scenario: Scenario,
    pub core_version: String,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Number of worker threads: `QBISECT_THREADS` if set, else the available
/// parallelism capped at 8.
pub fn thread_budget() -> usize {
    if let Ok(v) = std::env::var("QBISECT_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1)
}

/// Outcome of a single trial.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub ok: bool,
    pub residual: f64,
    pub witness: Option<String>,
}

impl TrialOutcome {
    pub fn pass() -> Self {
        TrialOutcome { ok: true, residual: 0.0, witness: None }
    }

    pub fn check(ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            TrialOutcome::pass()
        } else {
            TrialOutcome { ok: false, residual: 0.0, witness: Some(witness()) }
        }
    }

    pub fn with_residual(mut self, r: f64) -> Self {
        self.residual = self.residual.max(r);
        self
    }
}

/// Runs `count` indexed trials, possibly across threads; each trial derives
/// its PRNG from (seed, label, index), so the merged result is independent
/// of the schedule and identical to a serial run.
pub fn parallel_trials<F>(
    root: &SplitMix64,
    label: &str,
    count: usize,
    f: F,
) -> Vec<TrialOutcome>
where
    F: Fn(usize, &mut SplitMix64) -> TrialOutcome + Sync,
{
    let threads = thread_budget().min(count.max(1));
    if threads <= 1 || count < 16 {
        return (0..count)
            .map(|idx| {
                let mut rng = root.split_indexed(label, idx as u64);
                f(idx, &mut rng)
            })
            .collect();
    }
    let mut slots: Vec<Option<TrialOutcome>> = vec![None; count];
    let chunk = count.div_ceil(threads);
    std::thread::scope(|scope| {
        for (worker, piece) in slots.chunks_mut(chunk).enumerate() {
            let f = &f;
            let root = root.clone();
            scope.spawn(move || {
                for (offset, slot) in piece.iter_mut().enumerate() {
                    let idx = worker * chunk + offset;
                    let mut rng = root.split_indexed(label, idx as u64);
                    *slot = Some(f(idx, &mut rng));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("all trials ran")).collect()
}

/// Folds trial outcomes into a suite report (sorted by trial index already).
pub fn fold_outcomes(name: &str, outcomes: Vec<TrialOutcome>) -> SuiteReport {
    let trials = outcomes.len();
    let mut passes = 0;
    let mut failures = 0;
    let mut max_residual: f64 = 0.0;
    let mut violations = Vec::new();
    for (idx, out) in outcomes.into_iter().enumerate() {
        if out.ok {
            passes += 1;
        } else {
            failures += 1;
            if violations.len() < 8 {
                let msg = out.witness.unwrap_or_else(|| "unspecified".into());
                violations.push(format!("trial {idx}: {msg}"));
            }
        }
        max_residual = max_residual.max(out.residual);
    }
    let mut notes = Vec::new();
    if trials == 0 {
        notes.push("vacuous: zero trials requested".to_string());
    }
    SuiteReport {
        name: name.to_string(),
        trials,
        passes,
        failures,
        max_residual,
        violations,
        notes,
    }
}

/// Executes the scenario and returns its report.
pub fn run(scenario: &Scenario) -> Result<Report, HarnessError> {
    scenario.validate()?;
    set_tolerance(scenario.tolerance);
    let suites = match scenario.backend {
        Backend::Exact => suites::run_all::<Exact>(scenario),
        Backend::Float => suites::run_all::<f64>(scenario),
    };
    let passed = suites.iter().all(SuiteReport::passed);
    Ok(Report {
        schema: "qbisect/report/v1".to_string(),
        scenario: scenario.clone(),
        core_version: env!("CARGO_PKG_VERSION").to_string(),
        suites,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_round_trip_and_defaults() {
        let s = Scenario::default();
        let text = serde_json::to_string(&s).unwrap();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
        // Partial configs pick up defaults.
        let partial: Scenario = serde_json::from_str(r#"{"n": 3, "seed": 7}"#).unwrap();
        assert_eq!(partial.n, 3);
        assert_eq!(partial.seed, 7);
        assert_eq!(partial.backend, Backend::Exact);
        // Unknown fields are usage errors with the field named.
        let err = serde_json::from_str::<Scenario>(r#"{"bogus": 1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn scenario_validation() {
        let mut s = Scenario::default();
        s.n = 0;
        assert!(s.validate().is_err());
        s.n = 9;
        assert!(s.validate().is_err());
        s.n = 4;
        s.tolerance = -1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn zero_trials_is_vacuous_pass() {
        let report = fold_outcomes("demo", Vec::new());
        assert!(report.passed());
        assert!(report.notes[0].contains("vacuous"));
    }

    #[test]
    fn parallel_matches_serial() {
        let root = SplitMix64::new(17);
        let f = |idx: usize, rng: &mut SplitMix64| {
            let v = rng.next_u64() ^ idx as u64;
            TrialOutcome::check(v % 7 != 0, || format!("v = {v}"))
        };
        let serial: Vec<bool> = (0..64)
            .map(|idx| {
                let mut rng = root.split_indexed("x", idx as u64);
                f(idx, &mut rng).ok
            })
            .collect();
        let parallel: Vec<bool> = parallel_trials(&root, "x", 64, f)
            .into_iter()
            .map(|o| o.ok)
            .collect();
        assert_eq!(serial, parallel);
    }
}
