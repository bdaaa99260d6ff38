//! The envelope shared by every report.

use serde::Serialize;

/// Every report records the run parameters next to its results, so a
/// report file is self-describing. Timing is deliberately absent: reports
/// for identical inputs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<T: Serialize> {
    pub command: String,
    pub seed: u64,
    pub arity_cap: usize,
    pub window: i64,
    pub passed: bool,
    pub results: T,
}

impl<T: Serialize> Report<T> {
    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }
}
