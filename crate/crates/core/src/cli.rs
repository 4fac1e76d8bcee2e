//! The commands behind the `flowspace` binary. Each returns what to print
//! and the exit code, so they can be driven without a process.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::dot::{hasse_dot, support_dot};
use crate::error::Error;
use crate::flow::{flow_map_violation, DiscreteFlow, GlobAttachment};
use crate::flow_io::{parse_attachment, parse_flow};
use crate::moore::{act, associator, blend, moore_compose, normalized_compose, PLPath, PLReparam, Rational};
use crate::oracle::Tally;
use crate::pathspace::{compare_constructions, pathspace_via_reedy, Comparison};
use crate::pushout::pushout_glob_oracle;
use crate::reedy::PosetContext;
use crate::report::{CheckReport, RunReport, SuiteReport, Verdict};
use crate::verify::{run_verify, Suite};

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: 0 }
    }

    fn error(code: u8, message: impl std::fmt::Display) -> Self {
        Outcome { stdout: String::new(), stderr: format!("error: {message}\n"), code }
    }

    fn report(report: &RunReport) -> Self {
        let code = if report.failed() { EXIT_FAIL } else { 0 };
        Outcome { stdout: report.to_json() + "\n", stderr: String::new(), code }
    }
}

/// Lists the truncation with degree, height, `simplify` and `latch_base`
/// columns, or its Hasse diagram.
pub fn cmd_enumerate(states: &[String], u: &str, v: &str, max_degree: usize, dot: bool) -> Outcome {
    let ctx = match PosetContext::new(states.iter().cloned(), u, v) {
        Ok(ctx) => ctx,
        Err(e) => return Outcome::error(EXIT_INPUT, e),
    };
    if max_degree == 0 {
        return Outcome::error(EXIT_INPUT, "--max-degree must be at least 1");
    }
    let poset = ctx.enumerate_up_to(max_degree);
    if dot {
        return Outcome::ok(hasse_dot(&ctx, &poset));
    }
    let mut out = String::from("degree\theight\tobject\tsimplify\tlatch_base\n");
    for obj in &poset.objects {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            obj.degree(),
            obj.height(),
            ctx.display(obj),
            ctx.display(&ctx.simplify(obj)),
            ctx.display(&ctx.latch_base(obj))
        ));
    }
    Outcome::ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Reedy,
    Both,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Reedy => "reedy",
            Method::Both => "both",
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NotLoopFree | Error::NotLoopFreeAndNoCap | Error::CapTooSmallToClose { .. } => EXIT_PRECONDITION,
        Error::Parse(_) | Error::InvalidFlow(_) | Error::InvalidAttachment(_) => EXIT_INPUT,
        _ => EXIT_FAIL,
    }
}

/// Number of paths in each hom-set, keyed by `(source,target)` labels.
pub fn class_counts(flow: &DiscreteFlow) -> Map<String, Value> {
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for p in flow.paths() {
        *counts.entry((p.src, p.tgt)).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|((a, b), n)| (format!("({},{})", flow.state_label(a), flow.state_label(b)), json!(n)))
        .collect()
}

fn map_check(name: &str, src: &DiscreteFlow, dst: &DiscreteFlow, f: &crate::flow::FlowMap) -> CheckReport {
    let tally = match flow_map_violation(src, dst, f) {
        None => Tally::pass(),
        Some(w) => Tally::fail(w),
    };
    CheckReport::from_tally(name, tally)
}

/// Loads a flow and an attachment and runs the chosen construction(s).
pub fn cmd_pushout(flow_file: &Path, attach_file: &Path, method: Method, cap: Option<usize>, dot: Option<&Path>) -> Outcome {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()));
    let (flow_text, attach_text) = match (read(flow_file), read(attach_file)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(EXIT_INPUT, e),
    };
    let base = match parse_flow(&flow_text) {
        Ok(f) => f,
        Err(e) => return Outcome::error(EXIT_INPUT, e),
    };
    let att = match parse_attachment(&attach_text, &base) {
        Ok(a) => a,
        Err(e) => return Outcome::error(EXIT_INPUT, e),
    };
    pushout_report(&base, &att, method, cap, dot, flow_file, attach_file)
}

fn pushout_report(
    base: &DiscreteFlow,
    att: &GlobAttachment,
    method: Method,
    cap: Option<usize>,
    dot: Option<&Path>,
    flow_file: &Path,
    attach_file: &Path,
) -> Outcome {
    let mut parameters = Map::new();
    parameters.insert("flow".into(), json!(flow_file.display().to_string()));
    parameters.insert("attachment".into(), json!(attach_file.display().to_string()));
    parameters.insert("method".into(), json!(method.name()));
    parameters.insert("cap".into(), json!(cap));
    let glob = att.cell_globe();
    let mut checks = Vec::new();
    let mut tables = Map::new();

    let oracle = if method != Method::Reedy {
        match pushout_glob_oracle(base, att, cap) {
            Ok(o) => {
                checks.push(map_check("oracle_from_base", base, &o.flow, &o.from_base));
                checks.push(map_check("oracle_from_cells", &glob, &o.flow, &o.from_cells));
                tables.insert(
                    "oracle".into(),
                    json!({
                        "paths": o.flow.paths().iter().map(|p| p.id.clone()).collect::<Vec<_>>(),
                        "class_counts": class_counts(&o.flow),
                        "truncated": o.quotient.truncated,
                        "word_bound": o.quotient.bound,
                    }),
                );
                Some(o)
            }
            Err(e) => return Outcome::error(exit_code_for(&e), e),
        }
    } else {
        None
    };

    let reedy = if method != Method::Oracle {
        match pathspace_via_reedy(base, att) {
            Ok(r) => {
                checks.push(map_check("reedy_from_base", base, &r.flow, &r.from_base));
                checks.push(map_check("reedy_from_cells", &glob, &r.flow, &r.from_cells));
                tables.insert(
                    "reedy".into(),
                    json!({
                        "paths": r.flow.paths().iter().map(|p| p.id.clone()).collect::<Vec<_>>(),
                        "class_counts": class_counts(&r.flow),
                        "support_objects": r.df.support.len(),
                        "attached_cells": r.df.cells.labels,
                    }),
                );
                if let Some(path) = dot {
                    if let Err(e) = fs::write(path, support_dot(&r.df, None)) {
                        return Outcome::error(EXIT_INPUT, format!("cannot write {}: {e}", path.display()));
                    }
                }
                Some(r)
            }
            Err(Error::NotLoopFree) if method == Method::Both && cap.is_some() => {
                checks.push(CheckReport {
                    name: "reedy".into(),
                    verdict: Verdict::Skipped { reason: "the Reedy computation needs a loop-free instance".into() },
                    cases: 0,
                    failures: 0,
                    notes: Vec::new(),
                });
                None
            }
            Err(e) => return Outcome::error(exit_code_for(&e), e),
        }
    } else {
        None
    };

    if let (Some(o), Some(r)) = (&oracle, &reedy) {
        match compare_constructions(r, o) {
            Comparison::Isomorphism { path_map } => {
                let witness: Map<String, Value> = path_map
                    .iter()
                    .enumerate()
                    .map(|(p, &q)| (r.flow.path(p).id.clone(), json!(o.flow.path(q).id)))
                    .collect();
                tables.insert("isomorphism".into(), Value::Object(witness));
                checks.push(CheckReport::from_tally("isomorphism", Tally::pass()));
            }
            Comparison::Mismatch { reason } => {
                checks.push(CheckReport::from_tally("isomorphism", Tally::fail(reason)));
            }
        }
    }

    let mut report = RunReport::new("pushout", parameters, vec![SuiteReport { name: "pushout".into(), checks }]);
    report.tables = tables;
    Outcome::report(&report)
}

/// Runs a verification suite; `timing` adds the wall time to the report.
pub fn cmd_verify(suite: Suite, seed: u64, count: usize, timing: bool) -> Outcome {
    let start = Instant::now();
    let mut report = run_verify(suite, seed, count);
    if timing {
        report.wall_time_ms = Some(start.elapsed().as_millis());
    }
    Outcome::report(&report)
}

/// The seed in effect: `FLOWSPACE_SEED` wins over the flag.
pub fn effective_seed(flag: u64, env: Option<&str>) -> Result<u64, String> {
    match env {
        Some(text) => text.trim().parse().map_err(|_| format!("FLOWSPACE_SEED={text:?} is not a seed")),
        None => Ok(flag),
    }
}

#[derive(Debug, Clone)]
pub enum MooreDemo {
    Compose { a: String, b: String },
    Normalized { a: String, b: String },
    Associator { a: String, b: String, c: String },
    Blend { phi: String, psi: String, weight: String },
}

fn parse_path(text: &str) -> Result<PLPath, Error> {
    text.parse()
}

/// Small worked computations on path literals.
pub fn cmd_moore(demo: &MooreDemo) -> Outcome {
    let run = || -> Result<String, Error> {
        Ok(match demo {
            MooreDemo::Compose { a, b } => {
                let g = moore_compose(&parse_path(a)?, &parse_path(b)?)?;
                format!("{g}\n")
            }
            MooreDemo::Normalized { a, b } => format!("{}\n", normalized_compose(&parse_path(a)?, &parse_path(b)?)?),
            MooreDemo::Associator { a, b, c } => {
                let (a, b, c) = (parse_path(a)?, parse_path(b)?, parse_path(c)?);
                let left = normalized_compose(&normalized_compose(&a, &b)?, &c)?;
                let right = normalized_compose(&a, &normalized_compose(&b, &c)?)?;
                let phi = PLReparam::associator();
                let repaired = act(&right, &phi)?;
                let verified = associator(&a, &b, &c).is_ok();
                format!(
                    "left\t{left}\nright\t{right}\nequal\t{}\nphi\t{phi}\nright.phi\t{repaired}\nrepaired\t{verified}\n",
                    left == right
                )
            }
            MooreDemo::Blend { phi, psi, weight } => {
                let (phi, psi): (PLReparam, PLReparam) = (phi.parse()?, psi.parse()?);
                let s: Rational = weight
                    .parse()
                    .map_err(|_| Error::Parse(format!("{weight:?} is not a rational")))?;
                format!("{}\n", blend(&phi, &psi, &s)?)
            }
        })
    };
    match run() {
        Ok(text) => Outcome::ok(text),
        Err(e @ (Error::Parse(_) | Error::InvalidPiecewiseLinear(_))) => Outcome::error(EXIT_INPUT, e),
        Err(e) => Outcome::error(EXIT_PRECONDITION, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_counts_rows() {
        let out = cmd_enumerate(&["a".into()], "a", "a", 2, false);
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout.lines().count(), 1 + 3);
        let out = cmd_enumerate(&["a".into(), "b".into(), "c".into()], "a", "b", 1, false);
        assert_eq!(out.stdout.lines().count(), 1 + 9);
        assert_eq!(cmd_enumerate(&["a".into()], "a", "z", 2, false).code, EXIT_INPUT);
    }

    #[test]
    fn seed_override() {
        assert_eq!(effective_seed(7, None), Ok(7));
        assert_eq!(effective_seed(7, Some("11")), Ok(11));
        assert!(effective_seed(7, Some("x")).is_err());
    }

    #[test]
    fn moore_demo() {
        let out = cmd_moore(&MooreDemo::Compose { a: "dur=1; pts=(0,0),(1,1)".into(), b: "dur=2; pts=(0,1),(2,0)".into() });
        assert_eq!(out.stdout, "dur=3; pts=(0,0),(1,1),(3,0)\n");
        let bad = cmd_moore(&MooreDemo::Compose { a: "dur=1; pts=(0,0),(1,1)".into(), b: "dur=1; pts=(0,5),(1,0)".into() });
        assert_eq!(bad.code, EXIT_PRECONDITION);
        assert_eq!(cmd_moore(&MooreDemo::Normalized { a: "nonsense".into(), b: "x".into() }).code, EXIT_INPUT);
    }
}
