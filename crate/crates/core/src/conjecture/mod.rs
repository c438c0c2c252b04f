//! Verdicts, the randomized counterexample search and the theorem suites.

mod corpus;
mod search;
mod suites;
mod verdict;

pub use corpus::{corpus_item, CorpusItem, Family};
pub use search::{counterexample_search, normalized_defect, SearchParams, SearchResult};
pub use suites::{
    run_suite, theorem_suite, FailureRecord, SuiteConfig, SuiteId, SuiteReport, LIMIT_IDENTITY_BOUND, SUITE_LIMIT,
};
pub use verdict::{verdict, Branch, Certificate, Recheck, Verdict};
