use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Per-run integrator diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Largest accepted local error estimate, in absolute units.
    pub max_error_estimate: f64,
}

/// Time-stamped states. Each state is a flat vector made of equally sized
/// groups, e.g. `[x₁..x_N, p₁..p_N]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub stats: StepStats,
}

impl Trajectory {
    pub(crate) fn push(&mut self, t: f64, state: Vec<Complex64>) {
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[Complex64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Column names `t, Re x1, Im x1, ..., Re p1, Im p1, ...` for the
    /// given group labels.
    pub fn columns(&self, groups: &[&str]) -> Vec<String> {
        let width = self.states.first().map_or(0, Vec::len);
        let per_group = if groups.is_empty() { 0 } else { width / groups.len() };
        let mut cols = vec!["t".to_string()];
        for g in groups {
            for i in 1..=per_group {
                cols.push(format!("Re {g}{i}"));
                cols.push(format!("Im {g}{i}"));
            }
        }
        cols
    }

    /// Writes one CSV row per sample. Floats use Rust's shortest
    /// round-trip formatting, so output is deterministic.
    pub fn write_csv<W: Write>(&self, mut w: W, groups: &[&str]) -> std::io::Result<()> {
        writeln!(w, "{}", self.columns(groups).join(","))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut row = t.to_string();
            for z in s {
                row.push(',');
                row.push_str(&z.re.to_string());
                row.push(',');
                row.push_str(&z.im.to_string());
            }
            writeln!(w, "{row}")?;
        }
        Ok(())
    }

    /// JSON document with the same content as the CSV plus step statistics.
    pub fn to_json(&self, groups: &[&str]) -> serde_json::Value {
        serde_json::json!({
            "columns": self.columns(groups),
            "groups": groups,
            "times": self.times,
            "states": self.states,
            "step_stats": self.stats,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut tr = Trajectory::default();
        tr.push(0.0, vec![Complex64::new(1.0, 2.0), Complex64::new(3.0, -4.0)]);
        tr.push(0.5, vec![Complex64::new(1.5, 2.0), Complex64::new(3.0, -4.5)]);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, &["x", "p"]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,Re x1,Im x1,Re p1,Im p1");
        assert_eq!(lines[2], "0.5,1.5,2,3,-4.5");
        let js = tr.to_json(&["x", "p"]);
        assert_eq!(js["states"][1][1], serde_json::json!([3.0, -4.5]));
    }
}
