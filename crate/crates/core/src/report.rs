//! Report envelope shared by every command.
//!
//! Reports carry no timestamps, hostnames or hash-ordered maps, so the same
//! configuration and seed always serialise to the same bytes.

use std::collections::BTreeMap;

use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Report<T> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    /// Parameter values per case label.
    pub params: BTreeMap<String, BTreeMap<String, f64>>,
    pub tolerances: BTreeMap<String, f64>,
    pub pass: bool,
    pub results: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: impl Into<String>, seed: u64, results: T) -> Self {
        Report {
            tool: "symbsm",
            version: VERSION,
            command: command.into(),
            seed,
            params: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            pass: true,
            results,
        }
    }

    pub fn with_params(mut self, label: impl Into<String>, params: BTreeMap<String, f64>) -> Self {
        self.params.insert(label.into(), params);
        self
    }

    pub fn with_tolerance(mut self, name: impl Into<String>, value: f64) -> Self {
        self.tolerances.insert(name.into(), value);
        self
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }
}
