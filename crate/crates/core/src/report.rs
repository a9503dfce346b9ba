//! Text and JSON renderings of scenario and verification reports. Both are
//! deterministic; the only time-dependent field is the elapsed time, which
//! is left out when it was not recorded.

use std::fmt::Write;

use serde_json::{json, Map, Value};

use crate::scenario::ScenarioReport;
use crate::verify::VerifyReport;

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn render_text(rep: &ScenarioReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario {} on {}", rep.name, rep.ambient);
    for h in &rep.hypersurfaces {
        let _ = writeln!(s, "\nhypersurface {} (c(L) = {})", h.name, h.line_bundle);
        let _ = writeln!(s, "  {:<10} {}", "virtual", h.virt);
        let _ = writeln!(s, "  {:<10} {}", "csm", h.csm);
        let _ = writeln!(s, "  {:<10} {}", "milnor", h.milnor);
        if let Some(mu) = &h.mu {
            let _ = writeln!(s, "  {:<10} {}", "mu", mu);
        }
        for (k, c) in &h.le_cycles {
            let _ = writeln!(s, "  {:<10} {}", format!("le[{k}]"), c);
        }
        for (route, c) in &h.routes {
            let _ = writeln!(s, "  route {:<10} {}", route, c);
        }
        let _ = write!(s, "  chi        {}", h.chi);
        if let Some(c) = h.chi_strata {
            let _ = write!(s, " (strata: {c})");
        }
        let _ = writeln!(s, "\n  routes-agree: {}", yes_no(h.routes_agree));
    }
    if let Some((names, ir)) = &rep.intersection {
        let _ = writeln!(s, "\nintersection {}", names.join(" ∩ "));
        for (f, c) in &ir.results {
            let _ = writeln!(s, "  {:<10} {}", f.name(), c);
        }
        for (f, e) in &ir.errors {
            let _ = writeln!(s, "  {:<10} error: {}", f.name(), e);
        }
        for o in &ir.oracle {
            let _ = writeln!(
                s,
                "  oracle {:<12} expected {} got {} {}",
                o.name,
                o.expected,
                o.got,
                verdict(o.pass)
            );
        }
        let _ = writeln!(
            s,
            "  formulas-agree: {}",
            yes_no(ir.agree && ir.errors.is_empty())
        );
    }
    if let Some(g) = &rep.general {
        let _ = writeln!(s, "\ngeneral case on {}", g.total);
        for c in &g.checks {
            let _ = writeln!(s, "  {:<22} {}  {}", c.name, verdict(c.pass), c.detail);
        }
        match &g.milnor {
            Some(m) => {
                let _ = writeln!(s, "  milnor                 {m}");
            }
            None => {
                let _ = writeln!(s, "  milnor                 (not computed)");
            }
        }
    }
    for v in &rep.verify {
        let _ = writeln!(
            s,
            "\nverify {} seed {}: {} properties, {} cases, {} failed",
            v.suite, v.seed, v.properties, v.cases, v.failed
        );
    }
    if !rep.expected.is_empty() {
        let _ = writeln!(s, "\nexpected");
        for e in &rep.expected {
            let _ = writeln!(
                s,
                "  {:<22} {} (got {}) {}",
                e.key,
                e.expected,
                e.got,
                verdict(e.pass)
            );
        }
    }
    let _ = writeln!(s, "\nverdict: {}", verdict(rep.pass()));
    if let Some(ms) = rep.elapsed_ms {
        let _ = writeln!(s, "elapsed: {ms:.3} ms");
    }
    s
}

pub fn render_json(rep: &ScenarioReport) -> Value {
    let hyps: Vec<Value> = rep
        .hypersurfaces
        .iter()
        .map(|h| {
            let routes: Map<String, Value> = h
                .routes
                .iter()
                .map(|(r, c)| (r.clone(), json!(c.to_string())))
                .collect();
            let le: Map<String, Value> = h
                .le_cycles
                .iter()
                .map(|(k, c)| (k.to_string(), json!(c.to_string())))
                .collect();
            json!({
                "name": h.name,
                "line_bundle": h.line_bundle.to_string(),
                "virtual": h.virt.to_string(),
                "csm": h.csm.to_string(),
                "milnor": h.milnor.to_string(),
                "mu": h.mu.as_ref().map(|c| c.to_string()),
                "le_cycles": le,
                "routes": routes,
                "routes_agree": h.routes_agree,
                "chi": h.chi,
                "chi_strata": h.chi_strata,
            })
        })
        .collect();
    let intersection = rep.intersection.as_ref().map(|(names, ir)| {
        let formulas: Map<String, Value> = ir
            .results
            .iter()
            .map(|(f, c)| (f.name().to_string(), json!(c.to_string())))
            .collect();
        let errors: Map<String, Value> = ir
            .errors
            .iter()
            .map(|(f, e)| (f.name().to_string(), json!(e)))
            .collect();
        let oracle: Vec<Value> = ir
            .oracle
            .iter()
            .map(|o| json!({"name": o.name, "expected": o.expected, "got": o.got, "pass": o.pass}))
            .collect();
        json!({
            "hypersurfaces": names,
            "formulas": formulas,
            "errors": errors,
            "oracle": oracle,
            "agree": ir.agree && ir.errors.is_empty(),
        })
    });
    let general = rep.general.as_ref().map(|g| {
        let checks: Vec<Value> = g
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
            .collect();
        json!({
            "total_space": g.total,
            "checks": checks,
            "milnor": g.milnor.as_ref().map(|c| c.to_string()),
        })
    });
    let verify: Vec<Value> = rep
        .verify
        .iter()
        .map(|v| {
            json!({"suite": v.suite, "seed": v.seed, "properties": v.properties,
                   "cases": v.cases, "failed": v.failed})
        })
        .collect();
    let expected: Vec<Value> = rep
        .expected
        .iter()
        .map(|e| json!({"key": e.key, "expected": e.expected, "got": e.got, "pass": e.pass}))
        .collect();
    let mut out = json!({
        "scenario": rep.name,
        "ambient": rep.ambient,
        "hypersurfaces": hyps,
        "intersection": intersection,
        "general_case": general,
        "verify": verify,
        "expected": expected,
        "pass": rep.pass(),
    });
    if let Some(ms) = rep.elapsed_ms {
        out["elapsed_ms"] = json!(ms);
    }
    out
}

pub fn render_json_string(rep: &ScenarioReport) -> String {
    serde_json::to_string_pretty(&render_json(rep)).expect("json values serialize")
}

pub fn render_verify_text(rep: &VerifyReport, timing: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "seed {}", rep.seed);
    for r in &rep.results {
        let _ = writeln!(
            s,
            "{:<11} {:<32} {:>5} cases {:>3} failed  {}",
            r.suite.name(),
            r.name,
            r.cases,
            r.failed,
            verdict(r.pass())
        );
        if let Some(f) = &r.first_failure {
            let _ = writeln!(s, "    first failure: {f}");
        }
    }
    let _ = writeln!(
        s,
        "{} properties, {} cases: {}",
        rep.results.len(),
        rep.total_cases(),
        verdict(rep.pass())
    );
    if timing {
        let _ = writeln!(s, "elapsed: {:.3} s", rep.elapsed.as_secs_f64());
    }
    s
}

pub fn render_verify_json(rep: &VerifyReport, timing: bool) -> Value {
    let props: Vec<Value> = rep
        .results
        .iter()
        .map(|r| {
            json!({"suite": r.suite.name(), "property": r.name, "cases": r.cases,
                   "failed": r.failed, "first_failure": r.first_failure})
        })
        .collect();
    let mut out = json!({
        "seed": rep.seed,
        "properties": props,
        "cases": rep.total_cases(),
        "pass": rep.pass(),
    });
    if timing {
        out["elapsed_ms"] = json!(rep.elapsed.as_secs_f64() * 1e3);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::{AmbientSpace, CycleClass};
    use crate::scenario::{run_compute, RunOptions, ScenarioFile};

    const FILE: &str = r#"{
      "name": "planes",
      "ambient": "P^3",
      "hypersurfaces": [
        { "name": "X1", "degree": 2, "segre": "linear(1)",
          "strata": [
            { "name": "reg", "closure": "hypersurface", "milnor_fiber_chi": 1 },
            { "name": "line", "closure": "linear(1)", "milnor_fiber_chi": 0 } ] },
        { "name": "X2", "degree": 1 }
      ],
      "intersection": { "hypersurfaces": ["X1", "X2"] }
    }"#;

    #[test]
    fn deterministic_without_timing() {
        let f = ScenarioFile::from_json(FILE).unwrap();
        let a = run_compute(&f, &RunOptions::default()).unwrap();
        let b = run_compute(&f, &RunOptions::default()).unwrap();
        assert_eq!(render_text(&a), render_text(&b));
        assert_eq!(render_json_string(&a), render_json_string(&b));
        assert!(render_text(&a).contains("formulas-agree: yes"));
    }

    #[test]
    fn machine_values_reparse() {
        let f = ScenarioFile::from_json(FILE).unwrap();
        let rep = run_compute(&f, &RunOptions::default()).unwrap();
        let v = render_json(&rep);
        let p3 = AmbientSpace::proj_space(3).unwrap();
        for (name, c) in v["intersection"]["formulas"].as_object().unwrap() {
            let back = CycleClass::parse(&p3, c.as_str().unwrap()).unwrap();
            assert_eq!(
                Some(&back),
                rep.intersection
                    .as_ref()
                    .unwrap()
                    .1
                    .results
                    .iter()
                    .find(|(f, _)| f.name() == name)
                    .map(|(_, c)| c)
            );
        }
        let h = &v["hypersurfaces"][0];
        assert_eq!(
            CycleClass::parse(&p3, h["milnor"].as_str().unwrap()).unwrap(),
            rep.hypersurfaces[0].milnor
        );
        assert_eq!(
            CycleClass::parse(&p3, h["csm"].as_str().unwrap()).unwrap(),
            rep.hypersurfaces[0].csm
        );
    }
}
