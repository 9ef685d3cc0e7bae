//! Verification harness: identity checks over a corpus of small groups.
//!
//! Every check yields a [`CheckResult`]. A check that runs out of room is
//! reported as skipped, never as a failure. Results are sorted, so the
//! output does not depend on scheduling.

mod checks;
mod corpus;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checks::{
    finiteness_theorem_check, perturbed_action_control, perturbed_commutator_control, schur_baer_divisibility,
};
pub use corpus::{Corpus, CorpusEntry};

use crate::abelian::AbelianGroup;
use crate::error::{Error, Result};
use crate::group::FinGroup;
use crate::tensor::{tensor_power, BuildLimits, TensorPowerTower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "skipped(limit)")]
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped(limit)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub group: String,
    pub params: BTreeMap<String, u64>,
    pub verdict: Verdict,
    /// Values that justify the verdict.
    pub data: BTreeMap<String, String>,
    /// On failure, enough to reproduce it; on a skip, the limit that fired.
    pub witness: Option<String>,
    /// Wall time; kept out of the JSON so that reruns compare equal.
    #[serde(skip)]
    pub elapsed_ms: u64,
}

impl CheckResult {
    pub fn new(check: &str, group: &str) -> CheckResult {
        CheckResult {
            check: check.to_string(),
            group: group.to_string(),
            params: BTreeMap::new(),
            verdict: Verdict::Pass,
            data: BTreeMap::new(),
            witness: None,
            elapsed_ms: 0,
        }
    }

    pub fn param(mut self, key: &str, value: u64) -> CheckResult {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.data.insert(key.to_string(), value.to_string());
    }

    /// Pass iff `ok`; otherwise fail with `witness`.
    pub fn expect(mut self, ok: bool, witness: impl FnOnce() -> String) -> CheckResult {
        if ok {
            self.verdict = Verdict::Pass;
        } else {
            self.verdict = Verdict::Fail;
            self.witness = Some(witness());
        }
        self
    }

    /// Limit errors become skips; anything else is a failure.
    pub fn from_error(mut self, e: &Error) -> CheckResult {
        self.verdict = if e.is_limit() { Verdict::Skipped } else { Verdict::Fail };
        self.witness = Some(e.to_string());
        self
    }

    fn params_key(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
    }
}

/// Runs `f`, converting an error into a skip or failure and recording time.
pub(crate) fn timed(base: CheckResult, f: impl FnOnce(CheckResult) -> Result<CheckResult>) -> CheckResult {
    let start = Instant::now();
    let fallback = base.clone();
    let mut r = f(base).unwrap_or_else(|e| fallback.from_error(&e));
    r.elapsed_ms = start.elapsed().as_millis() as u64;
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub limits: BuildLimits,
    /// Highest tensor power built per group.
    pub max_power: usize,
    /// Checks that enumerate ν(G) in full, or use the bar complex, run only
    /// up to this group order.
    pub small_order: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { limits: BuildLimits::default(), max_power: 3, small_order: 64 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identity,
    SchurBaer,
    All,
}

/// A corpus group with its tensor powers built once and shared by checks.
pub(crate) struct Subject {
    pub name: String,
    pub g: Arc<FinGroup>,
    pub tower: Result<TensorPowerTower>,
    pub h2: OnceLock<Result<AbelianGroup>>,
}

fn load(entry: &CorpusEntry, config: &SuiteConfig) -> (CheckResult, Option<Subject>) {
    let mut loaded = None;
    let result = timed(CheckResult::new("corpus.order", &entry.name), |mut r| {
        let g = Arc::new(FinGroup::from_presentation(&entry.presentation, config.limits.enumeration)?);
        r.record("order", g.order());
        let ok = entry.expected_order.map_or(true, |n| n == g.order() as u64);
        let expected = entry.expected_order;
        let tower = tensor_power(g.clone(), config.max_power.max(2), &config.limits);
        loaded = Some(Subject { name: entry.name.clone(), g, tower, h2: OnceLock::new() });
        Ok(r.expect(ok, || format!("expected order {}", expected.unwrap_or(0))))
    });
    (result, loaded)
}

/// All identity checks for every corpus entry.
pub fn run_identity_suite(corpus: &Corpus, config: &SuiteConfig) -> Vec<CheckResult> {
    let per_group: Vec<Vec<CheckResult>> = corpus
        .entries
        .par_iter()
        .map(|entry| {
            let (loaded, subject) = load(entry, config);
            let mut out = vec![loaded];
            if let Some(s) = subject {
                out.extend(checks::identity_checks(&s, config));
            }
            out
        })
        .collect();
    sorted(corpus, per_group.into_iter().flatten().collect())
}

/// Divisibility check for `n = 1, 2` on every entry.
pub fn run_schur_baer_suite(corpus: &Corpus, config: &SuiteConfig) -> Vec<CheckResult> {
    let jobs: Vec<(&CorpusEntry, usize)> = corpus.entries.iter().flat_map(|e| [(e, 1), (e, 2)]).collect();
    let results = jobs.par_iter().map(|&(e, n)| schur_baer_divisibility(e, n, &config.limits)).collect();
    sorted(corpus, results)
}

/// The requested suites plus the negative controls.
pub fn run_suite(suite: Suite, corpus: &Corpus, config: &SuiteConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Identity | Suite::All) {
        out.extend(run_identity_suite(corpus, config));
    }
    if matches!(suite, Suite::SchurBaer | Suite::All) {
        let sb = Corpus::builtin().select(&["D4", "Q8", "D6", "Heis27"]).expect("builtin");
        let target = if suite == Suite::SchurBaer { corpus } else { &sb };
        out.extend(run_schur_baer_suite(target, config));
    }
    if suite == Suite::All {
        let (a, b) = rayon::join(
            || perturbed_action_control(&config.limits),
            || perturbed_commutator_control(&config.limits),
        );
        out.extend([a, b]);
    }
    out
}

/// Sorts by corpus position, then check id and parameters.
fn sorted(corpus: &Corpus, mut results: Vec<CheckResult>) -> Vec<CheckResult> {
    let position: BTreeMap<&str, usize> =
        corpus.entries.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect();
    results.sort_by_cached_key(|r| {
        (position.get(r.group.as_str()).copied().unwrap_or(usize::MAX), r.check.clone(), r.params_key())
    });
    results
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn of(results: &[CheckResult]) -> Summary {
        let mut s = Summary::default();
        for r in results {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Skipped => s.skipped += 1,
            }
        }
        s
    }
}

/// Pretty JSON array with a trailing newline.
pub fn write_json(results: &[CheckResult], out: &mut impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, results)?;
    out.write_all(b"\n")
}

/// One row per result: check, group, params, verdict, elapsed_ms, witness.
pub fn write_csv(results: &[CheckResult], out: impl Write) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "group", "params", "verdict", "elapsed_ms", "witness"])?;
    for r in results {
        w.write_record([
            r.check.as_str(),
            r.group.as_str(),
            &r.params_key(),
            &r.verdict.to_string(),
            &r.elapsed_ms.to_string(),
            r.witness.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}
