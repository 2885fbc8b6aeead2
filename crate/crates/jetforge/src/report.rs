//! `report.json` and its plain-text mirror.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::checks::{CheckResult, Options, PairOut, Status, Summary};

#[derive(Clone, Debug, Serialize)]
pub struct Counts {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub error: usize,
    pub mismatched: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub manifest: String,
    pub seed: u64,
    pub points: usize,
    pub max_order: u32,
    pub counts: Counts,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(manifest: &str, opts: &Options, mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let n = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let counts = Counts {
            total: checks.len(),
            pass: n(Status::Pass),
            fail: n(Status::Fail),
            skipped: n(Status::Skipped),
            error: n(Status::Error),
            mismatched: checks.iter().filter(|c| !c.matched).count(),
        };
        Report {
            tool: "jetforge",
            version: env!("CARGO_PKG_VERSION"),
            manifest: manifest.to_string(),
            seed: opts.seed,
            points: opts.points,
            max_order: opts.max_order,
            counts,
            checks,
        }
    }

    pub fn all_matched(&self) -> bool {
        self.counts.mismatched == 0
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn text(&self) -> String {
        let mut o = String::new();
        let c = &self.counts;
        let _ = writeln!(o, "jetforge {} report for {}", self.version, self.manifest);
        let _ = writeln!(o, "seed {}, {} oracle points, max jet order {}", self.seed, self.points, self.max_order);
        let _ = writeln!(
            o,
            "{} checks: {} PASS, {} FAIL, {} SKIPPED-UNDERSPECIFIED, {} ERROR; {} differ from the expected status",
            c.total, c.pass, c.fail, c.skipped, c.error, c.mismatched
        );
        for r in &self.checks {
            o.push('\n');
            check_text(&mut o, r);
        }
        o
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.json())?;
        std::fs::write(dir.join("report.txt"), self.text())
    }
}

fn summary_text(o: &mut String, label: &str, s: &Summary, indent: &str) {
    if s.zero {
        let _ = writeln!(o, "{indent}{label}: 0");
        return;
    }
    let den = if s.denominator.is_empty() { String::new() } else { format!(", denominator {}", s.denominator.join("*")) };
    let _ = writeln!(o, "{indent}{label}: {} terms{den}", s.terms);
    match &s.full {
        Some(f) => {
            let _ = writeln!(o, "{indent}  = {f}");
        }
        None => {
            let _ = writeln!(o, "{indent}  leading terms: {}", s.top.join(" ; "));
        }
    }
}

fn pair_text(o: &mut String, p: &PairOut, indent: &str) {
    let v = &p.oracle;
    let agree = if v.agrees { "" } else { " DISAGREES" };
    if p.residual.zero {
        let _ = writeln!(o, "{indent}{}: 0 [{}{agree}]", p.basis, v.verdict);
        return;
    }
    let _ = writeln!(o, "{indent}{}: {} terms [{}{agree}]", p.basis, p.residual.terms, v.verdict);
    if let Some(f) = &p.residual.full {
        let _ = writeln!(o, "{indent}  = {f}");
    }
}

fn check_text(o: &mut String, r: &CheckResult) {
    let mark = if r.matched { "" } else { "  <-- expected " };
    let exp = if r.matched { String::new() } else { r.expected.clone() };
    let _ = writeln!(o, "{} {}({}) {}{mark}{exp}", r.name, r.op, r.args.join(", "), r.status.as_str());
    let _ = writeln!(o, "  defined in {}, seed {}", r.file, r.seed);
    if let Some(e) = &r.error {
        let _ = writeln!(o, "  error: {e}");
    }
    if let Some(s) = &r.residual {
        summary_text(o, "residual", s, "  ");
    }
    if let Some(s) = &r.cofactor {
        summary_text(o, "cofactor", s, "  ");
        if let Some(u) = r.cofactor_unit {
            let _ = writeln!(o, "  cofactor is a unit: {u}");
        }
    }
    if !r.assumptions.is_empty() {
        let _ = writeln!(o, "  assumed nonzero: {}", r.assumptions.join(", "));
    }
    if let Some(v) = &r.oracle {
        let agree = if v.agrees { "agrees" } else { "DISAGREES" };
        let _ = writeln!(o, "  oracle: {} at {} points ({} rejected), {agree}", v.verdict, v.points, v.rejected);
        if let Some(w) = &v.witness {
            let vals: Vec<String> = w.values.iter().map(|(k, q)| format!("{k}={q}")).collect();
            let _ = writeln!(
                o,
                "    witness kappa={} {} -> normalized {}, source {}",
                w.kappa,
                vals.join(" "),
                w.normalized.as_deref().unwrap_or("-"),
                w.source.as_deref().unwrap_or("-")
            );
        }
    }
    if let Some(s) = &r.smoke {
        let _ = writeln!(o, "  float smoke at kappa={}: value {:e}, scale {:e}, {}", s.kappa, s.value, s.scale, if s.pass { "ok" } else { "FAILED" });
    }
    for rd in &r.readings {
        let ov = if rd.overrides.is_empty() { String::new() } else { format!(" with {}", rd.overrides.join(", ")) };
        let _ = writeln!(
            o,
            "  reading {}{ov}: {} ({} nonzero pairs), engines {}",
            rd.reading,
            if rd.zero { "zero" } else { "nonzero" },
            rd.nonzero_pairs,
            if rd.agrees { "agree" } else { "DISAGREE" }
        );
        for p in &rd.pairs {
            pair_text(o, p, "    ");
        }
        if let Some(s) = &rd.solver {
            let _ = writeln!(o, "    solver: {}", s.outcome);
            for (k, v) in &s.solution {
                let _ = writeln!(o, "      {k} = {v}");
            }
            if !s.inconsistent_pairs.is_empty() {
                let _ = writeln!(o, "      inconsistent at {}", s.inconsistent_pairs.join(", "));
            }
            if let Some(z) = s.back_substituted_zero {
                let _ = writeln!(o, "      back-substituted residual zero: {z}");
            }
        }
    }
    if let Some(a) = &r.adopted_reading {
        let _ = writeln!(o, "  adopted reading: {a}");
    }
    for (k, v) in &r.details {
        let _ = writeln!(o, "  {k}: {v}");
    }
    if let Some(ms) = r.wall_ms {
        let _ = writeln!(o, "  wall time: {ms} ms");
    }
}
