//! Brute-force referees. Each oracle recomputes a quantity or checks a
//! lemma instance by exhaustive search, without calling the metric and
//! tree code it is used to test.

mod distance;
mod sublemma;
mod sweep;

use serde::Serialize;

pub use distance::{oracle_distance, random_subcomplex, DISTANCE_CAP};
pub use sublemma::{oracle_sublemma, random_tree, sublemma_sweep, tree_path, SublemmaOutcome};
pub use sweep::{oracle_lemma_sweep, CorpusEntry, SweepConfig, SWEEP_LEMMAS};

/// One violated instance.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub instance: String,
    pub detail: String,
    /// The instance's patch passed the admissibility filter.
    pub admissible: bool,
}

/// Tally of one lemma (or oracle comparison) over a corpus.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleResult {
    pub lemma: String,
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<Witness>,
    pub millis: u128,
}

impl OracleResult {
    pub fn new(lemma: &str) -> Self {
        OracleResult { lemma: lemma.into(), ..Default::default() }
    }

    pub fn violated(&self) -> usize {
        self.violations.len()
    }

    /// Violations on admissible instances; these fail a run.
    pub fn unexplained(&self) -> usize {
        self.violations.iter().filter(|w| w.admissible).count()
    }

    pub fn record(&mut self, ok: bool, instance: impl FnOnce() -> String, detail: impl FnOnce() -> String, admissible: bool) {
        self.checked += 1;
        if !ok {
            self.violations.push(Witness { instance: instance(), detail: detail(), admissible });
        }
    }
}

/// Fixed-width table of `lemma × {checked, skipped, violated}`.
pub fn summary_table(results: &[OracleResult]) -> String {
    let mut out = format!("{:<20} {:>9} {:>9} {:>9} {:>12}\n", "lemma", "checked", "skipped", "violated", "unexplained");
    for r in results {
        out += &format!(
            "{:<20} {:>9} {:>9} {:>9} {:>12}\n",
            r.lemma,
            r.checked,
            r.skipped,
            r.violated(),
            r.unexplained()
        );
    }
    out
}
