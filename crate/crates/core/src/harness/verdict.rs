use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
    Within,
    /// Recorded only; never fails.
    Report,
}

/// One pass/fail line with the measured value and its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    /// Upper end of the band for [`Comparison::Within`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured <= threshold,
            measured,
            comparison: Comparison::AtMost,
            threshold,
            upper: None,
            detail: None,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured >= threshold,
            measured,
            comparison: Comparison::AtLeast,
            threshold,
            upper: None,
            detail: None,
        }
    }

    pub fn within(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured >= lo && measured <= hi,
            measured,
            comparison: Comparison::Within,
            threshold: lo,
            upper: Some(hi),
            detail: None,
        }
    }

    pub fn report(name: impl Into<String>, measured: f64) -> Self {
        Check {
            name: name.into(),
            passed: true,
            measured,
            comparison: Comparison::Report,
            threshold: f64::NAN,
            upper: None,
            detail: None,
        }
    }

    /// A check that could not be evaluated because a computation failed.
    pub fn failed(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            comparison: Comparison::Report,
            threshold: f64::NAN,
            upper: None,
            detail: Some(reason.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let bound = match self.comparison {
            Comparison::AtMost => format!("<= {:.3e}", self.threshold),
            Comparison::AtLeast => format!(">= {:.3e}", self.threshold),
            Comparison::Within => format!(
                "in [{:.4}, {:.4}]",
                self.threshold,
                self.upper.unwrap_or(f64::NAN)
            ),
            Comparison::Report => "(report)".to_string(),
        };
        write!(f, "{status}  {:<52} {:>12.4e} {bound}", self.name, self.measured)?;
        if let Some(d) = &self.detail {
            write!(f, "  [{d}]")?;
        }
        Ok(())
    }
}

/// The checks of one run, with an overall flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Verdict {
    pub fn new(checks: Vec<Check>) -> Self {
        Verdict {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}
