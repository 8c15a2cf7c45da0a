use capkm_core::bounds::BoundCheck;
use capkm_core::rational::{self, Rational};
use capkm_core::{save_instance, Instance};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write;

/// SHA-256 of the canonical instance text, so equal instances share a digest
/// whatever file layout they were read from.
pub fn instance_digest(inst: &Instance) -> String {
    let hash = Sha256::digest(save_instance(inst).as_bytes());
    let mut out = String::from("sha256:");
    for b in hash.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub instance_digest: String,
    pub algorithm: String,
    pub eps: Option<String>,
    pub ell: usize,
    pub seed: Option<u64>,
    pub clients: usize,
    pub facilities: usize,
    pub k: usize,
    pub lp_value: f64,
    pub stages: Vec<Stage>,
    pub final_cost: f64,
    pub cost_ratio: f64,
    pub cost_factor: f64,
    pub max_violation: f64,
    pub violation_bound: f64,
    pub open_count: usize,
    pub checks: Vec<BoundCheck>,
    /// Verifier findings on the final solution, one line each.
    pub findings: Vec<String>,
    pub passed: bool,
    pub wall_time_ms: u128,
}

pub fn stage(name: &str, cost: &Rational) -> Stage {
    Stage { name: name.into(), cost: rational::to_f64(cost) }
}

pub fn ratio(cost: &Rational, lp: &Rational) -> f64 {
    if *lp == rational::zero() {
        if *cost == rational::zero() {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        rational::to_f64(&(cost / lp))
    }
}

fn num(v: f64) -> String {
    format!("{v:.9}")
}

impl RunReport {
    /// One `key=value` per line. Timing comes last and is left out when
    /// `timing` is false so reruns can be compared byte for byte.
    pub fn to_kv(&self, timing: bool) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("instance_digest", self.instance_digest.clone());
        kv("algorithm", self.algorithm.clone());
        if let Some(e) = &self.eps {
            kv("eps", e.clone());
        }
        kv("ell", self.ell.to_string());
        if let Some(s) = self.seed {
            kv("seed", s.to_string());
        }
        kv("clients", self.clients.to_string());
        kv("facilities", self.facilities.to_string());
        kv("k", self.k.to_string());
        kv("lp_value", num(self.lp_value));
        for s in &self.stages {
            kv(&format!("stage.{}", s.name), num(s.cost));
        }
        kv("final_cost", num(self.final_cost));
        kv("cost_ratio", num(self.cost_ratio));
        kv("cost_factor", num(self.cost_factor));
        kv("max_violation", num(self.max_violation));
        kv("violation_bound", num(self.violation_bound));
        kv("open_count", self.open_count.to_string());
        for c in &self.checks {
            kv(
                &format!("check.{}", c.name),
                format!("{} {} <= {}", if c.passed { "PASS" } else { "FAIL" }, num(rational::to_f64(&c.value)), num(rational::to_f64(&c.bound))),
            );
        }
        for (n, f) in self.findings.iter().enumerate() {
            kv(&format!("finding.{n}"), f.clone());
        }
        kv("verdict", if self.passed { "PASS" } else { "FAIL" }.into());
        if timing {
            kv("wall_time_ms", self.wall_time_ms.to_string());
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} on {} ({} clients, {} facilities, k = {})", self.algorithm, self.instance_digest, self.clients, self.facilities, self.k);
        let mut params = format!("ell = {}", self.ell);
        if let Some(e) = &self.eps {
            params += &format!(", eps = {e}");
        }
        if let Some(s) = self.seed {
            params += &format!(", seed = {s}");
        }
        let _ = writeln!(out, "{params}");
        let _ = writeln!(out, "{:<28} {:>16}", "LP value", num(self.lp_value));
        for s in &self.stages {
            let _ = writeln!(out, "{:<28} {:>16}", s.name, num(s.cost));
        }
        let _ = writeln!(out, "{:<28} {:>16}", "final cost", num(self.final_cost));
        let _ = writeln!(out, "{:<28} {:>16}   (bound {})", "cost / LP", num(self.cost_ratio), num(self.cost_factor));
        let _ = writeln!(out, "{:<28} {:>16}   (bound {})", "max violation", num(self.max_violation), num(self.violation_bound));
        let _ = writeln!(out, "{:<28} {:>16}   (k = {})", "open facilities", self.open_count, self.k);
        let _ = writeln!(out);
        for c in &self.checks {
            let _ = writeln!(out, "{c}");
        }
        for f in &self.findings {
            let _ = writeln!(out, "FINDING {f}");
        }
        let _ = writeln!(out, "verdict: {}   ({} ms)", if self.passed { "PASS" } else { "FAIL" }, self.wall_time_ms);
        out
    }
}

/// JSON sidecar: the run summary next to the pipeline's own report.
pub fn sidecar(report: &RunReport, pipeline: &serde_json::Value) -> String {
    let doc = serde_json::json!({ "run": report, "pipeline": pipeline });
    serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n"
}
