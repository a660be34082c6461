use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Tcp,
    Tmd,
    Tpt,
    Acf,
}

impl TestKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestKind::Tcp => "tcp",
            TestKind::Tmd => "tmd",
            TestKind::Tpt => "tpt",
            TestKind::Acf => "acf",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one resampling test. The p-value is always
/// `exceedances / iterations`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub test: TestKind,
    pub mood: String,
    pub scope: String,
    /// `c` for TCP, the mean score difference for TMD, none for TPT.
    pub statistic: Option<f64>,
    pub exceedances: u64,
    pub iterations: u64,
    pub seed: u64,
    pub parameters: Vec<(String, String)>,
    /// Per-iteration statistic: `r_i` for TCP, the score difference for TMD,
    /// the first extremum hour for TPT.
    pub trace: Vec<f64>,
}

impl TestReport {
    pub fn p_value(&self) -> f64 {
        self.exceedances as f64 / self.iterations as f64
    }

    pub fn parameter(&self, key: &str) -> Option<&str> {
        self.parameters
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}
