//! Submission validation: does the score file cover the protocol?
//!
//! Validation cross-references scored trial ids against the key file and
//! reports three kinds of finding: key trials with no score (`missing`),
//! scored ids absent from the key (`extra`), and ids scored more than once
//! (`duplicate`). Malformed rows and non-finite scores never reach this
//! stage; the readers reject them outright.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::model::{ScoreSet, Track, TrialRecord};

/// Evaluation condition the submission claims.
///
/// The closed condition restricts key files to the known attack and codec
/// vocabulary; the open condition admits novel labels. The distinction is
/// enforced while reading keys and recorded here for the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalCondition {
    Closed,
    Open,
}

impl std::fmt::Display for EvalCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvalCondition::Closed => "closed",
            EvalCondition::Open => "open",
        })
    }
}

/// Outcome of checking a score set against a key.
///
/// The `missing`, `extra`, and `duplicate` lists hold at most
/// [`ValidationReport::LISTED`] example ids each (sorted); the `*_total`
/// fields count every finding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub track: Track,
    pub condition: EvalCondition,
    pub scored_trials: usize,
    pub key_trials: usize,
    pub missing: Vec<String>,
    pub missing_total: usize,
    pub extra: Vec<String>,
    pub extra_total: usize,
    pub duplicate: Vec<String>,
    pub duplicate_total: usize,
}

impl ValidationReport {
    /// Cap on the example ids kept per finding list.
    pub const LISTED: usize = 20;

    /// `true` when the submission scores the key exactly once per trial.
    pub fn is_clean(&self) -> bool {
        self.missing_total == 0 && self.extra_total == 0 && self.duplicate_total == 0
    }

    /// Pass/fail verdict. `allow_extra` tolerates scores for unknown ids
    /// (useful when checking a progress-phase submission against the full
    /// evaluation key); missing and duplicated trials always fail.
    pub fn passed(&self, allow_extra: bool) -> bool {
        self.missing_total == 0
            && self.duplicate_total == 0
            && (allow_extra || self.extra_total == 0)
    }

    /// Human-readable summary, one finding per line.
    pub fn render_text(&self, allow_extra: bool) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "track {} submission, {} condition\n",
            self.track, self.condition
        ));
        out.push_str(&format!(
            "scored trials: {} ({} in key)\n",
            self.scored_trials, self.key_trials
        ));
        for (name, total, listed) in [
            ("missing", self.missing_total, &self.missing),
            ("extra", self.extra_total, &self.extra),
            ("duplicate", self.duplicate_total, &self.duplicate),
        ] {
            if total == 0 {
                out.push_str(&format!("{name}: 0\n"));
            } else {
                out.push_str(&format!("{name}: {total} (e.g. {})\n", listed.join(", ")));
            }
        }
        let verdict = if self.passed(allow_extra) {
            "PASS"
        } else {
            "FAIL"
        };
        out.push_str(&format!("result: {verdict}\n"));
        out
    }
}

/// Checks score coverage of the protocol key.
pub fn validate_submission(
    scores: &ScoreSet,
    records: &[TrialRecord],
    track: Track,
    condition: EvalCondition,
) -> ValidationReport {
    let key_ids: HashSet<&str> = records.iter().map(|r| r.trial_id.as_str()).collect();

    let mut scored_once: HashSet<&str> = HashSet::with_capacity(scores.len());
    let mut duplicate: BTreeSet<&str> = BTreeSet::new();
    let mut extra: BTreeSet<&str> = BTreeSet::new();
    for id in scores.trial_ids() {
        if !scored_once.insert(id.as_str()) {
            duplicate.insert(id.as_str());
        }
        if !key_ids.contains(id.as_str()) {
            extra.insert(id.as_str());
        }
    }
    let missing: BTreeSet<&str> = records
        .iter()
        .map(|r| r.trial_id.as_str())
        .filter(|id| !scored_once.contains(id))
        .collect();

    let clip = |set: &BTreeSet<&str>| -> Vec<String> {
        set.iter()
            .take(ValidationReport::LISTED)
            .map(|id| (*id).to_owned())
            .collect()
    };

    ValidationReport {
        track,
        condition,
        scored_trials: scores.len(),
        key_trials: records.len(),
        missing: clip(&missing),
        missing_total: missing.len(),
        extra: clip(&extra),
        extra_total: extra.len(),
        duplicate: clip(&duplicate),
        duplicate_total: duplicate.len(),
    }
}
