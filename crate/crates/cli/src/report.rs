//! Line-oriented experiment reports. One fact per line, pipe-separated
//! fields, versioned schema header. Everything except `#` comment lines is
//! reproducible byte-for-byte for a fixed experiment, parameters, inputs,
//! and seed; wall-clock time goes into a trailing comment so diffing two
//! runs ignores it.

use std::fmt::Write as _;

pub const SCHEMA: &str = "trl-report v1";

/// A single checked inequality: `lhs op rhs` with both sides' exact values.
#[derive(Clone, Debug)]
pub struct Assertion {
    /// Stable kebab-case identifier, unique within a report.
    pub id: String,
    /// The inequality with symbolic names, e.g. `sum_i I(i,v) <= ln |V(F)|`.
    pub formula: String,
    pub lhs: String,
    pub op: &'static str,
    pub rhs: String,
    pub pass: bool,
    /// How far the inequality clears (positive) or misses (negative).
    pub slack: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    /// Ordered `name value` parameter pairs.
    pub params: Vec<(String, String)>,
    /// `name sha256-hex` digests of file inputs.
    pub inputs: Vec<(String, String)>,
    /// Measured quantities, exact decimal reprs, in insertion order.
    pub values: Vec<(String, String)>,
    pub assertions: Vec<Assertion>,
    pub wall_ms: u128,
}

impl Report {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Report {
            experiment: experiment.to_string(),
            seed,
            ..Report::default()
        }
    }

    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.params.push((name.to_string(), value.to_string()));
    }

    pub fn input_digest(&mut self, name: &str, bytes: &[u8]) {
        use sha2::{Digest, Sha256};
        let hex: String = Sha256::digest(bytes)
            .iter()
            .fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            });
        self.inputs.push((name.to_string(), hex));
    }

    pub fn value(&mut self, name: &str, value: impl ToString) {
        self.values.push((name.to_string(), value.to_string()));
    }

    /// Record `lhs op rhs`, deciding pass/fail from the numeric values.
    pub fn check(&mut self, id: &str, formula: &str, lhs: f64, op: &'static str, rhs: f64) {
        let (pass, slack) = match op {
            "<" => (lhs < rhs, rhs - lhs),
            "<=" => (lhs <= rhs, rhs - lhs),
            "==" => (lhs == rhs, -(lhs - rhs).abs()),
            ">=" => (lhs >= rhs, lhs - rhs),
            ">" => (lhs > rhs, lhs - rhs),
            other => panic!("unknown comparison {other}"),
        };
        self.assertions.push(Assertion {
            id: id.to_string(),
            formula: formula.to_string(),
            lhs: lhs.to_string(),
            op,
            rhs: rhs.to_string(),
            pass,
            slack,
        });
    }

    /// Record an exact yes/no fact as `1 == 1` / `0 == 1`.
    pub fn check_bool(&mut self, id: &str, formula: &str, holds: bool) {
        self.check(id, formula, u8::from(holds) as f64, "==", 1.0);
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "schema {SCHEMA}");
        let _ = writeln!(out, "experiment {}", self.experiment);
        let _ = writeln!(out, "seed {}", self.seed);
        for (name, value) in &self.params {
            let _ = writeln!(out, "param {name} {value}");
        }
        for (name, hex) in &self.inputs {
            let _ = writeln!(out, "input {name} sha256 {hex}");
        }
        for (name, value) in &self.values {
            let _ = writeln!(out, "value {name} {value}");
        }
        for a in &self.assertions {
            let _ = writeln!(
                out,
                "assert {} | {} | {} {} {} | {} | slack {}",
                a.id,
                a.formula,
                a.lhs,
                a.op,
                a.rhs,
                if a.pass { "PASS" } else { "FAIL" },
                a.slack,
            );
        }
        let _ = writeln!(
            out,
            "result {} ({} of {} assertions hold)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.assertions.iter().filter(|a| a.pass).count(),
            self.assertions.len(),
        );
        let _ = writeln!(out, "# wall_ms {}", self.wall_ms);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_deterministic_outside_comments() {
        let mut r = Report::new("demo", 7);
        r.param("n", 5);
        r.input_digest("graph", b"3 0\n");
        r.value("edges", 0);
        r.check("edges-zero", "edges == 0", 0.0, "==", 0.0);
        r.wall_ms = 123;
        let a = r.render();
        r.wall_ms = 456;
        let b = r.render();
        let strip = |s: &str| {
            s.lines()
                .filter(|l| !l.starts_with('#'))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_ne!(a, b);
        assert_eq!(strip(&a), strip(&b));
        assert!(a.starts_with("schema trl-report v1\n"));
        assert!(a.contains("assert edges-zero | edges == 0 | 0 == 0 | PASS | slack -0"));
        assert!(a.contains("result PASS (1 of 1 assertions hold)"));
    }

    #[test]
    fn failures_flip_the_result_line() {
        let mut r = Report::new("demo", 0);
        r.check("too-big", "x <= 1", 2.0, "<=", 1.0);
        assert!(!r.passed());
        let text = r.render();
        assert!(text.contains("| 2 <= 1 | FAIL | slack -1"));
        assert!(text.contains("result FAIL (0 of 1 assertions hold)"));
    }

    #[test]
    fn comparison_semantics() {
        let mut r = Report::new("ops", 0);
        r.check("lt", "a < b", 1.0, "<", 1.0);
        r.check_bool("yes", "property holds", true);
        r.check_bool("no", "property holds", false);
        assert_eq!(
            r.assertions.iter().map(|a| a.pass).collect::<Vec<_>>(),
            vec![false, true, false]
        );
    }
}
