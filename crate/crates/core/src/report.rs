//! Machine-readable reports and DOT output.

use serde::Serialize;
use serde_json::Value;

use crate::gf::FieldSpecJson;
use crate::theta::Filtration;

pub const SCHEMA: &str = "thetarep-report-v1";

/// Default seed for randomized spot-checks.
pub const DEFAULT_SEED: u64 = 1729;

/// One checked claim. `pass` holds exactly when `expected == computed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub claim: String,
    pub anchor: String,
    pub parameters: Value,
    pub expected: Value,
    pub computed: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Report {
    pub fn new(
        claim: &str,
        anchor: &str,
        parameters: impl Serialize,
        expected: impl Serialize,
        computed: impl Serialize,
    ) -> Report {
        let expected = to_value(expected);
        let computed = to_value(computed);
        Report {
            claim: claim.to_string(),
            anchor: anchor.to_string(),
            parameters: to_value(parameters),
            pass: expected == computed,
            expected,
            computed,
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: impl Serialize) -> Report {
        self.details = to_value(details);
        self
    }

    pub fn status(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn line(&self) -> String {
        format!("{} {} {}: expected {}, computed {}", self.status(), self.claim, self.parameters, self.expected, self.computed)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub schema: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpecJson>,
    pub reports: Vec<Report>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl Envelope {
    pub fn new(seed: u64, field: Option<FieldSpecJson>) -> Envelope {
        Envelope { schema: SCHEMA, seed, field, reports: Vec::new(), data: Value::Null }
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }
}

/// The cells of each level as a lattice: an edge joins `j` to `j + e_l`
/// inside the same level.
pub fn filtration_dot(filt: &Filtration, name: &str) -> String {
    let mut s = format!("digraph {name} {{\n");
    for (i, c) in filt.cells.iter().enumerate() {
        let j: Vec<String> = c.theta.j.iter().map(u32::to_string).collect();
        s += &format!(
            "  c{i} [label=\"level {} j=({}) dim {}\\n{}\"];\n",
            c.level,
            j.join(","),
            c.dim,
            c.series
        );
    }
    for (a, ca) in filt.cells.iter().enumerate() {
        for (b, cb) in filt.cells.iter().enumerate() {
            let diff: Option<Vec<i64>> = (ca.level == cb.level)
                .then(|| ca.theta.j.iter().zip(&cb.theta.j).map(|(&x, &y)| y as i64 - x as i64).collect());
            if let Some(d) = diff {
                if d.iter().all(|&x| x >= 0) && d.iter().sum::<i64>() == 1 {
                    s += &format!("  c{a} -> c{b};\n");
                }
            }
        }
    }
    s += "}\n";
    s
}
