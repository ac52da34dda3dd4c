//! Randomized verification campaigns over Haar-random pure states.
//!
//! Sample `i` is generated from `seed ^ i` and its roof searches are seeded
//! from the same value, so output does not depend on the worker count.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{to_json, write_file, HarnessError, EXIT_OK, EXIT_VIOLATION};
use crate::bounds::{
    evaluate_from_values, measure_values, BoundError, BoundReport, EvaluateOptions, Mode, TighteningParams, MEAN_POWER,
};
use crate::entropy::EntropyParams;
use crate::measures::{tsallis2_fast_path, FastPathValidation, RoofOptions};
use crate::states::{haar_random_pure, PartitionSpec, QuantumState};

/// Violation tolerance when every quantity is computed exactly.
pub const TOL_EXACT: f64 = 1e-7;
/// Violation tolerance when UEoA maximization enters the comparison.
pub const TOL_OPTIMIZED: f64 = 5e-4;
/// The negative-power bound must be strict once every pairwise value exceeds this.
pub const STRICT_FLOOR: f64 = 1e-3;

fn one() -> f64 {
    1.0
}

fn default_out() -> PathBuf {
    PathBuf::from("campaign-out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub n_states: usize,
    pub n_qubits: usize,
    pub q: f64,
    pub s: f64,
    pub mode: Mode,
    pub exponents: Vec<f64>,
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the mode's tolerance.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub roof: RoofOptions,
    /// Worker threads; all available cores when absent.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    #[serde(default = "default_out", skip_serializing)]
    pub out_dir: PathBuf,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.n_states == 0 {
            return bad("n_states must be positive".into());
        }
        if !matches!(self.n_qubits, 3 | 4) {
            return bad(format!("n_qubits must be 3 or 4, got {}", self.n_qubits));
        }
        if self.exponents.is_empty() {
            return bad("the exponent grid is empty".into());
        }
        if let Some(x) = self.exponents.iter().find(|&&x| !self.mode.admits(x)) {
            return bad(format!("exponent {x} is outside the {} range", self.mode));
        }
        let p = self.entropy_params()?;
        if !self.mode.admits_entropy(&p) {
            return bad(format!("(q, s) = ({}, {}) is outside the {} domain", self.q, self.s, self.mode));
        }
        for &x in &self.exponents {
            TighteningParams::new(self.k, self.delta, x).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("tolerance {t} must be finite and nonnegative"));
            }
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        self.roof.validate().map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn entropy_params(&self) -> Result<EntropyParams, HarnessError> {
        EntropyParams::new(self.q, self.s).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn effective_tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(if self.mode == Mode::Polygamy { TOL_OPTIMIZED } else { TOL_EXACT })
    }
}

/// One line of `reports.jsonl`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleLine {
    pub sample: usize,
    pub seed: u64,
    pub report: BoundReport,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BoundStats {
    pub evaluated: usize,
    pub precondition_passed: usize,
    pub precondition_pass_rate: f64,
    /// Over reports whose precondition holds.
    pub min_slack: Option<f64>,
    /// Over every report carrying this bound.
    pub min_slack_any: Option<f64>,
    pub violations: usize,
    pub findings: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckCount {
    pub checked: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Incident {
    pub sample: usize,
    pub exponent: f64,
    pub bound: String,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignSummary {
    pub config: CampaignConfig,
    pub samples: usize,
    pub reports: usize,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fast_path: Option<FastPathValidation>,
    pub bounds: BTreeMap<String, BoundStats>,
    pub hierarchy: CheckCount,
    /// Negative-power mode: strictness on samples with every pairwise value above the floor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<CheckCount>,
    pub violation_count: usize,
    pub violations: Vec<Incident>,
    /// Negative slack on bounds whose precondition fails; recorded, not counted.
    pub findings: Vec<Incident>,
    pub exit_code: i32,
}

pub struct CampaignOutput {
    pub summary: CampaignSummary,
    pub lines: Vec<SampleLine>,
    pub files: Vec<PathBuf>,
}

fn run_sample(cfg: &CampaignConfig, p: &EntropyParams, index: usize) -> Result<Vec<SampleLine>, BoundError> {
    let seed = cfg.seed ^ index as u64;
    let psi = haar_random_pure(cfg.n_qubits, seed)?;
    let state = QuantumState::Pure(psi);
    let part = PartitionSpec::first_vs_rest(cfg.n_qubits);
    let opts = EvaluateOptions { roof: RoofOptions { seed: cfg.roof.seed ^ seed, ..cfg.roof }, mixed_lhs: false };
    // measure once, reuse across the exponent grid
    let (lhs, pairwise) = measure_values(&state, &part, p, cfg.mode, &opts)?;
    cfg.exponents
        .iter()
        .map(|&x| {
            let t = TighteningParams::new(cfg.k, cfg.delta, x)?;
            let report = evaluate_from_values(lhs, &pairwise, p, &t, cfg.mode)?;
            Ok(SampleLine { sample: index, seed, report })
        })
        .collect()
}

fn summarize(cfg: &CampaignConfig, lines: &[SampleLine], fast_path: Option<FastPathValidation>) -> CampaignSummary {
    let tol = cfg.effective_tolerance();
    let mut bounds: BTreeMap<String, BoundStats> = BTreeMap::new();
    let mut hierarchy = CheckCount::default();
    let mut strict = (cfg.mode == Mode::NegativePower).then(CheckCount::default);
    let mut violations = Vec::new();
    let mut findings = Vec::new();

    for line in lines {
        let r = &line.report;
        let incident = |bound: &str, slack| Incident { sample: line.sample, exponent: r.params.exponent, bound: bound.into(), slack };
        for (name, &holds) in &r.preconditions {
            let stats = bounds.entry(name.clone()).or_default();
            stats.evaluated += 1;
            stats.precondition_passed += usize::from(holds);
            let Some(&slack) = r.slack.get(name) else { continue };
            stats.min_slack_any = Some(stats.min_slack_any.map_or(slack, |m: f64| m.min(slack)));
            if holds {
                stats.min_slack = Some(stats.min_slack.map_or(slack, |m: f64| m.min(slack)));
            }
            let strict_sample = name == MEAN_POWER && r.pairwise.iter().all(|&v| v > STRICT_FLOOR);
            if strict_sample {
                let s = strict.get_or_insert_with(CheckCount::default);
                s.checked += 1;
                if slack <= 0.0 {
                    s.failed += 1;
                    stats.violations += 1;
                    violations.push(incident(name, slack));
                }
            } else if slack < -tol {
                if holds {
                    stats.violations += 1;
                    violations.push(incident(name, slack));
                } else {
                    stats.findings += 1;
                    findings.push(incident(name, slack));
                }
            }
        }
        if let Some(ok) = r.hierarchy_holds() {
            hierarchy.checked += 1;
            if !ok {
                hierarchy.failed += 1;
                violations.push(incident("hierarchy", f64::NAN));
            }
        }
    }
    for stats in bounds.values_mut() {
        stats.precondition_pass_rate = stats.precondition_passed as f64 / stats.evaluated.max(1) as f64;
    }
    let violation_count = violations.len();
    CampaignSummary {
        config: cfg.clone(),
        samples: cfg.n_states,
        reports: lines.len(),
        tolerance: tol,
        fast_path,
        bounds,
        hierarchy,
        strict,
        violation_count,
        violations,
        findings,
        exit_code: if violation_count == 0 { EXIT_OK } else { EXIT_VIOLATION },
    }
}

/// Runs the campaign and writes `reports.jsonl` and `summary.json` into
/// `cfg.out_dir`. The summary's `exit_code` is nonzero iff a violation was found.
pub fn cmd_campaign(cfg: &CampaignConfig) -> Result<CampaignOutput, HarnessError> {
    cfg.validate()?;
    let p = cfg.entropy_params()?;
    // settle the process-wide fast-path check before any worker needs it
    let fast_path = (cfg.roof.fast_path && p.is_tsallis2() && cfg.mode != Mode::Polygamy)
        .then(|| tsallis2_fast_path().clone());

    let run = || (0..cfg.n_states).into_par_iter().map(|i| run_sample(cfg, &p, i)).collect::<Vec<_>>();
    let results = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    let mut lines = Vec::with_capacity(cfg.n_states * cfg.exponents.len());
    for r in results {
        lines.extend(r?);
    }

    let summary = summarize(cfg, &lines, fast_path);
    let mut jsonl = String::new();
    for line in &lines {
        jsonl.push_str(&serde_json::to_string(line).expect("plain data serializes"));
        jsonl.push('\n');
    }
    let files = vec![
        write_file(&cfg.out_dir, "reports.jsonl", &jsonl)?,
        write_file(&cfg.out_dir, "summary.json", &to_json(&summary))?,
    ];
    Ok(CampaignOutput { summary, lines, files })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(mode: Mode, exponents: Vec<f64>) -> CampaignConfig {
        CampaignConfig {
            n_states: 4,
            n_qubits: 3,
            q: 2.0,
            s: 1.0,
            mode,
            exponents,
            k: 1.0,
            delta: 1.0,
            seed: 7,
            tolerance: None,
            roof: RoofOptions { restarts: 4, parallel: false, fast_path: false, ..Default::default() },
            workers: Some(1),
            out_dir: std::env::temp_dir().join("umono-campaign-unit"),
        }
    }

    #[test]
    fn config_validation() {
        let ok = config(Mode::Monogamy, vec![1.0, 2.0]);
        assert!(ok.validate().is_ok());
        let bad = [
            CampaignConfig { n_states: 0, ..ok.clone() },
            CampaignConfig { n_qubits: 5, ..ok.clone() },
            CampaignConfig { exponents: vec![0.5], ..ok.clone() },
            CampaignConfig { exponents: vec![], ..ok.clone() },
            CampaignConfig { q: 1.5, ..ok.clone() },
            CampaignConfig { k: 0.0, ..ok.clone() },
            CampaignConfig { workers: Some(0), ..ok.clone() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(HarnessError::Config(_))), "{c:?}");
        }
        assert_eq!(config(Mode::Polygamy, vec![0.5]).effective_tolerance(), TOL_OPTIMIZED);
    }

    #[test]
    fn config_file_round_trip() {
        let text = r#"{"n_states": 3, "n_qubits": 4, "q": 2, "s": 1, "mode": "negative-power", "exponents": [-1]}"#;
        let cfg: CampaignConfig = serde_json::from_str(text).unwrap();
        assert_eq!((cfg.k, cfg.delta, cfg.seed), (1.0, 1.0, 0));
        assert!(cfg.validate().is_ok());
        assert!(serde_json::from_str::<CampaignConfig>(r#"{"n_states": 3, "bogus": 1}"#).is_err());
    }

    #[test]
    fn small_monogamy_run() {
        let cfg = config(Mode::Monogamy, vec![1.0, 2.0]);
        let out = cmd_campaign(&cfg).unwrap();
        assert_eq!(out.lines.len(), 8);
        assert_eq!(out.summary.violation_count, 0);
        assert_eq!(out.summary.bounds["hamming"].precondition_passed, 8);
        assert!(out.lines.windows(2).all(|w| w[0].sample <= w[1].sample));
    }

    #[test]
    fn negative_slack_is_classified() {
        let cfg = config(Mode::Monogamy, vec![2.0]);
        let mut lines = cmd_campaign(&cfg).unwrap().lines;
        assert_eq!(summarize(&cfg, &lines, None).exit_code, EXIT_OK);

        // a failing bound without its precondition is only a finding
        let r = &mut lines[0].report;
        r.preconditions.insert("hamming".into(), false);
        r.slack.insert("hamming".into(), -0.1);
        let s = summarize(&cfg, &lines, None);
        assert_eq!((s.violation_count, s.findings.len(), s.exit_code), (0, 1, EXIT_OK));

        lines[1].report.slack.insert("plain".into(), -1e-6);
        let s = summarize(&cfg, &lines, None);
        assert_eq!((s.violation_count, s.exit_code), (1, EXIT_VIOLATION));
        assert_eq!(s.violations[0].bound, "plain");
        assert_eq!(s.bounds["plain"].violations, 1);

        // within tolerance is not a violation
        lines[1].report.slack.insert("plain".into(), -1e-9);
        assert_eq!(summarize(&cfg, &lines, None).violation_count, 0);
    }
}
