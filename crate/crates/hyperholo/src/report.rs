use serde::Serialize;

/// One named residual measurement.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub id: String,
    pub points: usize,
    pub max_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Structured result of a batch of checks. Serialization is stable:
/// field order is the declaration order, checks are sorted by id, and
/// every float goes through serde_json's shortest-roundtrip formatting,
/// so a fixed seed gives byte-identical output.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub version: String,
    pub command: String,
    pub model: Option<String>,
    pub seed: u64,
    pub tolerance: f64,
    pub checks: Vec<CheckLine>,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(command: &str, model: Option<String>, seed: u64, tolerance: f64) -> Self {
        CheckReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            model,
            seed,
            tolerance,
            checks: Vec::new(),
            pass: true,
        }
    }

    /// Record one check; passing means the defect is within its tolerance.
    pub fn push(&mut self, id: &str, points: usize, max_defect: f64, tol: f64) {
        let pass = max_defect.is_finite() && max_defect <= tol;
        self.checks.push(CheckLine {
            id: id.to_string(),
            points,
            max_defect,
            tol,
            pass,
        });
        self.pass &= pass;
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }

    /// Merge another report's checks (ids are namespaced by the caller).
    pub fn absorb(&mut self, other: CheckReport) {
        for line in other.checks {
            self.pass &= line.pass;
            self.checks.push(line);
        }
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let model = self.model.as_deref().unwrap_or("-");
        out.push_str(&format!(
            "command={} model={} seed={} tol={:e}\n",
            self.command, model, self.seed, self.tolerance
        ));
        for c in &self.checks {
            out.push_str(&format!(
                "{:6} {:24} points={:<4} max_defect={:<12.3e} tol={:<9.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.points,
                c.max_defect,
                c.tol
            ));
        }
        out.push_str(if self.pass {
            "overall: PASS\n"
        } else {
            "overall: FAIL\n"
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_sorts_checks_and_aggregates_pass() {
        let mut r = CheckReport::new("verify", Some("flat1".into()), 7, 1e-9);
        r.push("zeta", 4, 1e-12, 1e-9);
        r.push("alpha", 4, 1.0, 1e-9);
        assert_eq!(r.checks[0].id, "alpha");
        assert!(!r.pass);
        assert!(r.checks[1].pass);
    }

    #[test]
    fn json_field_order_is_stable() {
        let mut r = CheckReport::new("verify", None, 0, 1e-7);
        r.push("a", 1, 0.0, 1e-7);
        let s = r.to_json();
        let iv = s.find("\"version\"").unwrap();
        let ic = s.find("\"command\"").unwrap();
        let ik = s.find("\"checks\"").unwrap();
        let ip = s.rfind("\"pass\"").unwrap();
        assert!(iv < ic && ic < ik && ik < ip);
    }

    #[test]
    fn nan_defect_fails() {
        let mut r = CheckReport::new("verify", None, 0, 1e-7);
        r.push("bad", 1, f64::NAN, 1e-7);
        assert!(!r.pass);
    }
}
