//! Named inequality checks carried in every pipeline report.

use crate::rational::{self, Rational};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    #[serde(serialize_with = "ser_q")]
    pub value: Rational,
    #[serde(serialize_with = "ser_q")]
    pub bound: Rational,
    pub passed: bool,
}

pub(crate) fn ser_q<S: serde::Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(rational::to_f64(v))
}

impl BoundCheck {
    /// `value ≤ bound`, exactly.
    pub fn at_most(name: impl Into<String>, value: Rational, bound: Rational) -> Self {
        let passed = value <= bound;
        Self { name: name.into(), value, bound, passed }
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.6} <= {:.6}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            rational::to_f64(&self.value),
            rational::to_f64(&self.bound)
        )
    }
}

pub fn all_passed(checks: &[BoundCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}
